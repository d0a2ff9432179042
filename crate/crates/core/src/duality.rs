//! Primal transport values, pointwise and quasi-sure superhedging duals, and
//! tangent convex functions.
//!
//! The quasi-sure dual enforces the superhedging inequality only on pairs
//! some martingale coupling charges. With an infinite cost on a polar pair
//! that is the difference between a finite value and an infeasible dual.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coupling::{self, Coupling};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::lp::{self, FeasibleRegion, LinearProgram, LpOutcome, Sense, VarLabel};
use crate::measures::{DiscreteMeasure, MotInstance};
use crate::rational::{self, dot, Rational};

/// A cost entry: a nonnegative rational or `+inf`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cost {
    Finite(Rational),
    Infinite,
}

impl Cost {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinite => None,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.trim() == "inf" {
            Ok(Cost::Infinite)
        } else {
            rational::parse(&s).map(Cost::Finite).map_err(serde::de::Error::custom)
        }
    }
}

/// `c(x_i, y_j)` on the product of the two supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostFunction {
    values: Vec<Vec<Cost>>,
}

impl CostFunction {
    pub fn new(values: Vec<Vec<Cost>>) -> Result<Self> {
        let width = values.first().map_or(0, Vec::len);
        if values.iter().any(|r| r.len() != width) {
            return Err(Error::Parse("ragged cost table".into()));
        }
        if values.iter().flatten().any(|c| c.finite().is_some_and(Signed::is_negative)) {
            return Err(Error::Parse("costs must be nonnegative".into()));
        }
        Ok(Self { values })
    }

    pub fn zero(instance: &MotInstance) -> Self {
        let (n, m) = instance.shape();
        Self { values: vec![vec![Cost::Finite(Rational::zero()); m]; n] }
    }

    /// `c(x_i, y_j) = f(i, j)`.
    pub fn from_fn(instance: &MotInstance, f: impl Fn(usize, usize) -> Cost) -> Self {
        let (n, m) = instance.shape();
        Self { values: (0..n).map(|i| (0..m).map(|j| f(i, j)).collect()).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Cost {
        &self.values[i][j]
    }

    pub fn rows(&self) -> &[Vec<Cost>] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().flatten().all(|c| c.finite().is_some())
    }

    pub fn check_shape(&self, instance: &MotInstance) -> Result<()> {
        let (n, m) = instance.shape();
        if self.values.len() != n || self.values.iter().any(|r| r.len() != m) {
            return Err(Error::InstanceMismatch(format!("cost table is not {n}x{m}")));
        }
        Ok(())
    }
}

/// `(phi, psi, h)` with `phi(x) + psi(y) + h(x).(y - x) >= c(x, y)` on
/// `constraint_set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    pub phi: Vec<Rational>,
    pub psi: Vec<Rational>,
    pub h: Vec<Vec<Rational>>,
    pub constraint_set: Vec<(usize, usize)>,
}

impl DualCertificate {
    pub fn hedge(&self, instance: &MotInstance, i: usize, j: usize) -> Rational {
        let step = instance.nu.point(j).sub(instance.mu.point(i));
        &self.phi[i] + &self.psi[j] + dot(&self.h[i], &step)
    }

    /// Exact check of the superhedging inequality on the constraint set.
    pub fn verify(&self, instance: &MotInstance, cost: &CostFunction) -> bool {
        self.constraint_set.iter().all(|&(i, j)| match cost.get(i, j) {
            Cost::Finite(c) => &self.hedge(instance, i, j) >= c,
            Cost::Infinite => false,
        })
    }

    /// `mu[phi] + nu[psi]`.
    pub fn value(&self, instance: &MotInstance) -> Rational {
        let a: Rational = self.phi.iter().enumerate().map(|(i, v)| instance.mu.mass(i) * v).sum();
        let b: Rational = self.psi.iter().enumerate().map(|(j, v)| instance.nu.mass(j) * v).sum();
        a + b
    }

    /// Moves a constant from `phi` to `psi` so that `min psi = 0`; returns
    /// the shifted certificate when `phi` is then nonnegative too. Value and
    /// validity are unchanged by the shift.
    pub fn shifted_nonnegative(&self) -> Option<DualCertificate> {
        let lo = self.psi.iter().min()?.clone();
        let out = DualCertificate {
            phi: self.phi.iter().map(|v| v + &lo).collect(),
            psi: self.psi.iter().map(|v| v - &lo).collect(),
            h: self.h.clone(),
            constraint_set: self.constraint_set.clone(),
        };
        out.phi.iter().all(|v| !v.is_negative()).then_some(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrimalValue {
    Finite { value: Rational, coupling: Coupling },
    /// Some coupling charges a pair of infinite cost.
    Infinite { pair: (usize, usize) },
}

impl PrimalValue {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            PrimalValue::Finite { value, .. } => Some(value),
            PrimalValue::Infinite { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DualValue {
    Finite { value: Rational, certificate: DualCertificate },
    /// No finite certificate exists; `pair` is an infinite-cost pair that
    /// has to be superhedged.
    Infinite { pair: (usize, usize) },
}

impl DualValue {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            DualValue::Finite { value, .. } => Some(value),
            DualValue::Infinite { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&DualCertificate> {
        match self {
            DualValue::Finite { certificate, .. } => Some(certificate),
            DualValue::Infinite { .. } => None,
        }
    }
}

fn region_for(instance: &MotInstance) -> Result<(LinearProgram, FeasibleRegion)> {
    let prog = lp::build_mot_lp(instance);
    let region = FeasibleRegion::new(&prog).map_err(|_| Error::NotInConvexOrder)?;
    Ok((prog, region))
}

/// Pairs charged by some martingale coupling (the support of the
/// maximal-support coupling), row-major.
pub fn nonpolar_pairs(instance: &MotInstance) -> Result<Vec<(usize, usize)>> {
    let phat = coupling::maximal_support_coupling(instance)?;
    let (n, m) = instance.shape();
    Ok((0..n).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|&(i, j)| phat.get(i, j).is_positive()).collect())
}

/// `sup P[c]` over `M(mu, nu)`. Infinite costs on polar pairs are ignored;
/// on a nonpolar pair they make the value infinite.
pub fn primal_value(cost: &CostFunction, instance: &MotInstance) -> Result<PrimalValue> {
    cost.check_shape(instance)?;
    let (prog, region) = region_for(instance)?;
    let m = instance.nu.len();
    let mut objective = vec![Rational::zero(); prog.num_vars()];
    for (i, row) in cost.rows().iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            match c {
                Cost::Finite(v) => objective[i * m + j] = v.clone(),
                Cost::Infinite => {
                    let mut probe = vec![Rational::zero(); prog.num_vars()];
                    probe[i * m + j] = Rational::from_integer(1.into());
                    match region.optimize(&probe, Sense::Maximize) {
                        LpOutcome::Optimal { value, .. } if value.is_positive() => {
                            return Ok(PrimalValue::Infinite { pair: (i, j) })
                        }
                        LpOutcome::Optimal { .. } => {}
                        other => return Err(Error::Internal(format!("pair probe ended {:?}", other.status()))),
                    }
                }
            }
        }
    }
    match region.optimize(&objective, Sense::Maximize) {
        LpOutcome::Optimal { value, primal, .. } => {
            Ok(PrimalValue::Finite { value, coupling: coupling::Coupling::from_flat(instance, &primal) })
        }
        other => Err(Error::Internal(format!("primal LP ended {:?}", other.status()))),
    }
}

/// Minimizes `mu[phi] + nu[psi]` subject to superhedging on `pairs`.
fn solve_dual(instance: &MotInstance, cost: &CostFunction, pairs: &[(usize, usize)]) -> Result<DualValue> {
    if let Some(&pair) = pairs.iter().find(|&&(i, j)| cost.get(i, j) == &Cost::Infinite) {
        return Ok(DualValue::Infinite { pair });
    }
    let (n, m) = instance.shape();
    let d = instance.dim();
    let mut prog = LinearProgram::new(Sense::Minimize);
    let phi: Vec<usize> = (0..n).map(|i| prog.add_var(VarLabel::Named(format!("phi{i}")), false)).collect();
    let psi: Vec<usize> = (0..m).map(|j| prog.add_var(VarLabel::Named(format!("psi{j}")), false)).collect();
    let h: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..d).map(|c| prog.add_var(VarLabel::Named(format!("h{i}_{c}")), false)).collect())
        .collect();
    for &(i, j) in pairs {
        let s = prog.add_var(VarLabel::Named(format!("s{i}_{j}")), true);
        let step = instance.nu.point(j).sub(instance.mu.point(i));
        let mut row = vec![(phi[i], Rational::from_integer(1.into())), (psi[j], Rational::from_integer(1.into()))];
        row.extend(h[i].iter().zip(step).filter(|(_, v)| !v.is_zero()).map(|(&k, v)| (k, v)));
        row.push((s, -Rational::from_integer(1.into())));
        let Cost::Finite(c) = cost.get(i, j) else { unreachable!() };
        prog.add_row(row, c.clone());
    }
    let mut objective: Vec<(usize, Rational)> = phi.iter().enumerate().map(|(i, &k)| (k, instance.mu.mass(i).clone())).collect();
    objective.extend(psi.iter().enumerate().map(|(j, &k)| (k, instance.nu.mass(j).clone())));
    prog.set_objective(Sense::Minimize, &objective);
    match lp::solve(&prog) {
        LpOutcome::Optimal { value, primal, .. } => {
            let certificate = DualCertificate {
                phi: phi.iter().map(|&k| primal[k].clone()).collect(),
                psi: psi.iter().map(|&k| primal[k].clone()).collect(),
                h: h.iter().map(|hi| hi.iter().map(|&k| primal[k].clone()).collect()).collect(),
                constraint_set: pairs.to_vec(),
            };
            if !certificate.verify(instance, cost) || certificate.value(instance) != value {
                return Err(Error::Internal("dual LP returned an invalid certificate".into()));
            }
            Ok(DualValue::Finite { value, certificate })
        }
        other => Err(Error::Internal(format!("dual LP ended {:?}", other.status()))),
    }
}

/// Superhedging enforced on every pair of atoms.
pub fn dual_value_pointwise(cost: &CostFunction, instance: &MotInstance) -> Result<DualValue> {
    cost.check_shape(instance)?;
    let (n, m) = instance.shape();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    solve_dual(instance, cost, &pairs)
}

/// Superhedging enforced only on nonpolar pairs. Equals [`primal_value`].
pub fn dual_value_quasisure(cost: &CostFunction, instance: &MotInstance) -> Result<DualValue> {
    cost.check_shape(instance)?;
    let pairs = nonpolar_pairs(instance)?;
    solve_dual(instance, cost, &pairs)
}

/// `f = max_k (slope_k . y + intercept_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseAffineConvex {
    pieces: Vec<(Vec<Rational>, Rational)>,
}

impl PiecewiseAffineConvex {
    pub fn new(pieces: Vec<(Vec<Rational>, Rational)>) -> Result<Self> {
        let first = pieces.first().ok_or_else(|| Error::Parse("convex function needs a piece".into()))?;
        let d = first.0.len();
        if let Some(p) = pieces.iter().find(|p| p.0.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: p.0.len() });
        }
        Ok(Self { pieces })
    }

    pub fn affine(slope: Vec<Rational>, intercept: Rational) -> Self {
        Self { pieces: vec![(slope, intercept)] }
    }

    pub fn pieces(&self) -> &[(Vec<Rational>, Rational)] {
        &self.pieces
    }

    fn piece_value(&self, k: usize, x: &Point) -> Rational {
        dot(&self.pieces[k].0, x.coords()) + &self.pieces[k].1
    }

    /// Lowest-index piece attaining the maximum at `x`.
    pub fn active_piece(&self, x: &Point) -> usize {
        let mut best = 0;
        let mut best_val = self.piece_value(0, x);
        for k in 1..self.pieces.len() {
            let v = self.piece_value(k, x);
            if v > best_val {
                best = k;
                best_val = v;
            }
        }
        best
    }

    pub fn eval(&self, x: &Point) -> Rational {
        self.piece_value(self.active_piece(x), x)
    }

    /// Subgradient at `x`: the slope of [`Self::active_piece`].
    pub fn subgradient(&self, x: &Point) -> &[Rational] {
        &self.pieces[self.active_piece(x)].0
    }

    /// `self + (slope . y + intercept)`.
    pub fn add_affine(&self, slope: &[Rational], intercept: &Rational) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|(s, b)| (s.iter().zip(slope).map(|(a, c)| a + c).collect(), b + intercept))
                .collect(),
        }
    }
}

/// `T_p f(x, y) = f(y) - f(x) - p(x).(y - x)` tabulated on the two supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentConvexFn {
    pub f: PiecewiseAffineConvex,
    /// Selected subgradient at each atom of the first marginal.
    pub subgradients: Vec<Vec<Rational>>,
    pub table: Vec<Vec<Rational>>,
}

impl TangentConvexFn {
    /// Nonnegative everywhere and zero at `(x, x)` for shared atoms.
    pub fn check_invariants(&self, instance: &MotInstance) -> bool {
        let nonneg = self.table.iter().flatten().all(|v| !v.is_negative());
        let diagonal = (0..instance.mu.len()).all(|i| match instance.nu.index_of(instance.mu.point(i)) {
            Some(j) => self.table[i][j].is_zero(),
            None => true,
        });
        nonneg && diagonal
    }

    /// `Q[T_p f]` for a coupling `Q`.
    pub fn integrate(&self, q: &Coupling) -> Rational {
        q.integrate(|i, j| self.table[i][j].clone())
    }
}

pub fn tangent_transform(f: &PiecewiseAffineConvex, instance: &MotInstance) -> TangentConvexFn {
    let subgradients: Vec<Vec<Rational>> = instance.mu.points().map(|x| f.subgradient(x).to_vec()).collect();
    let table = instance
        .mu
        .points()
        .zip(&subgradients)
        .map(|(x, p)| {
            let fx = f.eval(x);
            instance.nu.points().map(|y| f.eval(y) - &fx - dot(p, &y.sub(x))).collect()
        })
        .collect();
    TangentConvexFn { f: f.clone(), subgradients, table }
}

/// `nu[f] - mu[f]`, the coupling-independent integral of `T_p f`.
pub fn nu_ominus_mu(f: &PiecewiseAffineConvex, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Rational {
    nu.integrate(|y| f.eval(y)) - mu.integrate(|x| f.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn line(pairs: &[(i64, (i64, i64))]) -> DiscreteMeasure {
        DiscreteMeasure::from_pairs(pairs.iter().map(|&(x, (p, q))| (Point::from_ints(&[x]), ratio(p, q))).collect())
            .unwrap()
    }

    fn abs_1d() -> PiecewiseAffineConvex {
        PiecewiseAffineConvex::new(vec![(vec![int(1)], int(0)), (vec![int(-1)], int(0))]).unwrap()
    }

    #[test]
    fn zero_cost_everywhere() {
        let inst = MotInstance::new(line(&[(0, (1, 1))]), line(&[(-1, (1, 2)), (1, (1, 2))])).unwrap();
        let c = CostFunction::zero(&inst);
        assert_eq!(primal_value(&c, &inst).unwrap().value(), Some(&int(0)));
        assert_eq!(dual_value_pointwise(&c, &inst).unwrap().value(), Some(&int(0)));
        assert_eq!(dual_value_quasisure(&c, &inst).unwrap().value(), Some(&int(0)));
    }

    #[test]
    fn tangent_of_abs() {
        let inst = MotInstance::new(line(&[(1, (1, 2)), (-1, (1, 2))]), line(&[(-1, (1, 2)), (1, (1, 2))])).unwrap();
        let t = tangent_transform(&abs_1d(), &inst);
        // x = 1, y = -1: 1 - 1 - 1 * (-2)
        assert_eq!(t.table[0][0], int(2));
        assert_eq!(t.table[0][1], int(0));
        assert!(t.check_invariants(&inst));
    }

    #[test]
    fn tangent_of_affine_vanishes() {
        let inst = MotInstance::new(line(&[(0, (1, 1))]), line(&[(-3, (1, 4)), (1, (3, 4))])).unwrap();
        let f = PiecewiseAffineConvex::affine(vec![ratio(5, 2)], int(-7));
        let t = tangent_transform(&f, &inst);
        assert!(t.table.iter().flatten().all(Zero::is_zero));
        assert_eq!(nu_ominus_mu(&f, &inst.mu, &inst.nu), int(0));
    }

    #[test]
    fn split_dirac_ominus() {
        let mu = line(&[(0, (1, 1))]);
        let nu = line(&[(-1, (1, 2)), (1, (1, 2))]);
        assert_eq!(nu_ominus_mu(&abs_1d(), &mu, &nu), int(1));
    }

    #[test]
    fn kink_selection_is_lowest_index() {
        let f = abs_1d();
        assert_eq!(f.active_piece(&Point::from_ints(&[0])), 0);
        assert_eq!(f.subgradient(&Point::from_ints(&[0])), &[int(1)]);
        assert_eq!(f.active_piece(&Point::from_ints(&[-2])), 1);
    }

    #[test]
    fn shift_to_nonnegative() {
        let cert = DualCertificate {
            phi: vec![int(3)],
            psi: vec![int(-1), int(2)],
            h: vec![vec![int(0)]],
            constraint_set: vec![],
        };
        let s = cert.shifted_nonnegative().unwrap();
        assert_eq!(s.psi, vec![int(0), int(3)]);
        assert_eq!(s.phi, vec![int(2)]);
        let bad = DualCertificate { phi: vec![int(0)], ..cert };
        assert!(bad.shifted_nonnegative().is_none());
    }

    #[test]
    fn cost_validation() {
        assert!(CostFunction::new(vec![vec![Cost::Finite(int(-1))]]).is_err());
        assert!(CostFunction::new(vec![vec![Cost::Infinite], vec![]]).is_err());
        let inst = MotInstance::new(line(&[(0, (1, 1))]), line(&[(0, (1, 1))])).unwrap();
        let wrong = CostFunction::new(vec![vec![Cost::Infinite, Cost::Infinite]]).unwrap();
        assert!(matches!(primal_value(&wrong, &inst), Err(Error::InstanceMismatch(_))));
    }
}
