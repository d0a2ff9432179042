//! Exact rational linear programming.
//!
//! A dense two-phase primal simplex over [`Rational`] with Bland's
//! anti-cycling rule. Problems are stated as equality rows over variables
//! that are either nonnegative or free; free variables are split internally.
//! Optimal outcomes carry row duals, infeasible ones carry a Farkas ray.

use num_traits::{Signed, Zero};

use crate::measures::MotInstance;
use crate::rational::{dot, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarLabel {
    /// Mass moved from atom `i` of the first marginal to atom `j` of the second.
    Transport { i: usize, j: usize },
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    labels: Vec<VarLabel>,
    nonneg: Vec<bool>,
    rows: Vec<Vec<(usize, Rational)>>,
    rhs: Vec<Rational>,
    objective: Vec<Rational>,
    sense: Sense,
}

impl Default for LinearProgram {
    fn default() -> Self {
        Self::new(Sense::Maximize)
    }
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        Self {
            labels: Vec::new(),
            nonneg: Vec::new(),
            rows: Vec::new(),
            rhs: Vec::new(),
            objective: Vec::new(),
            sense,
        }
    }

    pub fn add_var(&mut self, label: VarLabel, nonneg: bool) -> usize {
        self.labels.push(label);
        self.nonneg.push(nonneg);
        self.objective.push(Rational::zero());
        self.labels.len() - 1
    }

    /// Adds the equality row `sum coeff * x[var] = rhs`. Repeated variables
    /// are summed.
    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, rhs: Rational) -> usize {
        debug_assert!(coeffs.iter().all(|(k, _)| *k < self.labels.len()));
        self.rows.push(coeffs);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    pub fn set_objective(&mut self, sense: Sense, coeffs: &[(usize, Rational)]) {
        self.sense = sense;
        self.objective = vec![Rational::zero(); self.labels.len()];
        for (k, c) in coeffs {
            self.objective[*k] += c;
        }
    }

    pub fn num_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[VarLabel] {
        &self.labels
    }

    pub fn is_nonneg(&self, var: usize) -> bool {
        self.nonneg[var]
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn var_index(&self, label: &VarLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Dense row `r` over the original variables.
    pub fn dense_row(&self, r: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.labels.len()];
        for (k, c) in &self.rows[r] {
            out[*k] += c;
        }
        out
    }

    /// Row activities `A x - b`.
    pub fn residuals(&self, x: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| row.iter().fold(-b.clone(), |acc, (k, c)| acc + c * &x[*k]))
            .collect()
    }

    /// True when `x` satisfies every row exactly and every sign constraint.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x.iter().zip(&self.nonneg).all(|(v, nn)| !nn || !v.is_negative())
            && self.residuals(x).iter().all(Zero::is_zero)
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// `duals` satisfy `b . duals == value`; for maximization `A^T y >= c`
    /// on nonnegative columns, for minimization `A^T y <= c`, with equality
    /// on free columns.
    Optimal {
        value: Rational,
        primal: Vec<Rational>,
        duals: Vec<Rational>,
    },
    /// Farkas ray `y`: `A^T y <= 0` on nonnegative columns, `A^T y = 0` on
    /// free columns, and `b . y > 0`.
    Infeasible { farkas: Vec<Rational> },
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible { .. } => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn primal(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { primal, .. } => Some(primal),
            _ => None,
        }
    }
}

/// Solves `lp` from scratch.
pub fn solve(lp: &LinearProgram) -> LpOutcome {
    match FeasibleRegion::new(lp) {
        Ok(region) => region.optimize(lp.objective(), lp.sense()),
        Err(outcome) => outcome,
    }
}

#[derive(Debug, Clone)]
struct Tableau {
    // rows x (cols + 1); the last column is the right-hand side
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    n_real: usize,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.t.first().map_or(0, |r| r.len() - 1)
    }

    fn pivot(&mut self, r: usize, e: usize, cost_row: &mut [Rational]) {
        let inv = self.t[r][e].recip();
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let nz: Vec<usize> = (0..self.t[r].len()).filter(|&j| !self.t[r][j].is_zero()).collect();
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !cost_row[e].is_zero() {
            let f = cost_row[e].clone();
            for &j in &nz {
                cost_row[j] -= &f * &pivot_row[j];
            }
        }
        self.basis[r] = e;
    }

    /// Reduced-cost row for `cost` (length = number of columns); the final
    /// entry holds minus the current objective value.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let rhs = self.rhs_col();
        let mut r: Vec<Rational> = cost.iter().cloned().chain(std::iter::once(Rational::zero())).collect();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (rj, tij) in r.iter_mut().zip(&self.t[i][..=rhs]) {
                if !tij.is_zero() {
                    *rj -= cb * tij;
                }
            }
        }
        r
    }

    /// Minimizes `cost` with Bland's rule. Returns false when unbounded.
    fn minimize(&mut self, cost: &[Rational], allow_artificial: bool) -> (bool, Vec<Rational>) {
        let rhs = self.rhs_col();
        let mut r = self.reduced_costs(cost);
        let limit = if allow_artificial { rhs } else { self.n_real };
        loop {
            let Some(e) = (0..limit).find(|&j| r[j].is_negative()) else {
                return (true, r);
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][rhs] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr || (ratio == lr && self.basis[i] < self.basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
            match leave {
                Some((i, _)) => self.pivot(i, e, &mut r),
                None => return (false, r),
            }
        }
    }
}

/// A phase-one feasible basis for a fixed constraint system, reusable
/// across objectives.
#[derive(Debug, Clone)]
pub struct FeasibleRegion {
    tableau: Tableau,
    // original var -> (plus column, optional minus column)
    columns: Vec<(usize, Option<usize>)>,
    row_negated: Vec<bool>,
    n_vars: usize,
}

impl FeasibleRegion {
    /// Runs phase one. On infeasibility returns the finished
    /// [`LpOutcome::Infeasible`] carrying the Farkas ray.
    pub fn new(lp: &LinearProgram) -> Result<Self, LpOutcome> {
        let m = lp.num_rows();
        let mut columns = Vec::with_capacity(lp.num_vars());
        let mut n_real = 0;
        for k in 0..lp.num_vars() {
            if lp.is_nonneg(k) {
                columns.push((n_real, None));
                n_real += 1;
            } else {
                columns.push((n_real, Some(n_real + 1)));
                n_real += 2;
            }
        }
        let width = n_real + m + 1;
        let mut t = vec![vec![Rational::zero(); width]; m];
        let mut row_negated = vec![false; m];
        for r in 0..m {
            let dense = lp.dense_row(r);
            let neg = lp.rhs()[r].is_negative();
            row_negated[r] = neg;
            let s = |v: &Rational| if neg { -v.clone() } else { v.clone() };
            for (k, &(plus, minus)) in columns.iter().enumerate() {
                if dense[k].is_zero() {
                    continue;
                }
                t[r][plus] = s(&dense[k]);
                if let Some(mc) = minus {
                    t[r][mc] = -s(&dense[k]);
                }
            }
            t[r][n_real + r] = Rational::from_integer(1.into());
            t[r][width - 1] = s(&lp.rhs()[r]);
        }
        let mut tableau = Tableau {
            t,
            basis: (n_real..n_real + m).collect(),
            n_real,
        };
        let mut cost = vec![Rational::zero(); n_real + m];
        for c in cost.iter_mut().skip(n_real) {
            *c = Rational::from_integer(1.into());
        }
        let (bounded, r) = tableau.minimize(&cost, false);
        debug_assert!(bounded, "phase one is bounded below by zero");
        let infeasibility = -r[width - 1].clone();
        if infeasibility.is_positive() {
            let farkas = (0..m)
                .map(|row| {
                    let y: Rational = tableau
                        .basis
                        .iter()
                        .enumerate()
                        .fold(Rational::zero(), |acc, (i, &b)| acc + &cost[b] * &tableau.t[i][n_real + row]);
                    if row_negated[row] {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            return Err(LpOutcome::Infeasible { farkas });
        }
        // Drive zero-level artificials out of the basis where possible;
        // rows where that fails are redundant and keep their artificial.
        for i in 0..m {
            if tableau.basis[i] < n_real {
                continue;
            }
            if let Some(e) = (0..n_real).find(|&j| !tableau.t[i][j].is_zero()) {
                let mut scratch = vec![Rational::zero(); width];
                tableau.pivot(i, e, &mut scratch);
            }
        }
        Ok(Self {
            tableau,
            columns,
            row_negated,
            n_vars: lp.num_vars(),
        })
    }

    /// Phase two for `objective` (dense over the original variables).
    pub fn optimize(&self, objective: &[Rational], sense: Sense) -> LpOutcome {
        let n_real = self.tableau.n_real;
        let m = self.tableau.t.len();
        let mut cost = vec![Rational::zero(); n_real + m];
        for (k, &(plus, minus)) in self.columns.iter().enumerate() {
            let c = match sense {
                Sense::Minimize => objective[k].clone(),
                Sense::Maximize => -objective[k].clone(),
            };
            if let Some(mc) = minus {
                cost[mc] = -c.clone();
            }
            cost[plus] = c;
        }
        let mut tableau = self.tableau.clone();
        let (bounded, r) = tableau.minimize(&cost, false);
        if !bounded {
            return LpOutcome::Unbounded;
        }
        let rhs = tableau.rhs_col();
        let mut std_x = vec![Rational::zero(); n_real + m];
        for (i, &b) in tableau.basis.iter().enumerate() {
            std_x[b] = tableau.t[i][rhs].clone();
        }
        let primal: Vec<Rational> = self
            .columns
            .iter()
            .map(|&(plus, minus)| match minus {
                Some(mc) => &std_x[plus] - &std_x[mc],
                None => std_x[plus].clone(),
            })
            .collect();
        let min_value = -r[rhs].clone();
        let duals: Vec<Rational> = (0..m)
            .map(|row| {
                let y: Rational = tableau
                    .basis
                    .iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (i, &b)| acc + &cost[b] * &tableau.t[i][n_real + row]);
                let y = if self.row_negated[row] { -y } else { y };
                match sense {
                    Sense::Minimize => y,
                    Sense::Maximize => -y,
                }
            })
            .collect();
        let value = match sense {
            Sense::Minimize => min_value,
            Sense::Maximize => -min_value,
        };
        debug_assert_eq!(primal.len(), self.n_vars);
        LpOutcome::Optimal { value, primal, duals }
    }
}

/// The martingale transport polytope `M(mu, nu)` as an equality system over
/// `p[i][j] >= 0`: row marginals, column marginals, then `d` martingale rows
/// per first-marginal atom. Variable `i * m + j` is `p[i][j]`; the objective
/// is zero.
pub fn build_mot_lp(instance: &MotInstance) -> LinearProgram {
    let mu = &instance.mu;
    let nu = &instance.nu;
    let (n, m, d) = (mu.len(), nu.len(), instance.dim());
    let mut lp = LinearProgram::new(Sense::Maximize);
    for i in 0..n {
        for j in 0..m {
            lp.add_var(VarLabel::Transport { i, j }, true);
        }
    }
    let one = || Rational::from_integer(1.into());
    for i in 0..n {
        lp.add_row((0..m).map(|j| (i * m + j, one())).collect(), mu.mass(i).clone());
    }
    for j in 0..m {
        lp.add_row((0..n).map(|i| (i * m + j, one())).collect(), nu.mass(j).clone());
    }
    for i in 0..n {
        let x = mu.point(i);
        for c in 0..d {
            let coeffs = (0..m)
                .map(|j| (i * m + j, &nu.point(j).coords()[c] - &x.coords()[c]))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            lp.add_row(coeffs, Rational::zero());
        }
    }
    lp
}
