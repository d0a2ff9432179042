//! Martingale couplings, the maximal-support coupling, vertex sampling of
//! the transport polytope, and the support functional.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{self, Point, Polytope, RelOpenConvexSet};
use crate::lp::{self, FeasibleRegion, LpOutcome, Sense};
use crate::measures::MotInstance;
use crate::rational::{self, Rational};

/// Transport masses `p[i][j]` between the atoms of the two marginals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coupling {
    rows: usize,
    cols: usize,
    p: Vec<Rational>,
}

impl Coupling {
    /// From the LP variable vector of [`lp::build_mot_lp`].
    pub fn from_flat(instance: &MotInstance, flat: &[Rational]) -> Self {
        let (n, m) = instance.shape();
        assert_eq!(flat.len(), n * m, "coupling shape");
        Self { rows: n, cols: m, p: flat.to_vec() }
    }

    pub fn from_matrix(matrix: Vec<Vec<Rational>>) -> Self {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        Self { rows, cols, p: matrix.into_iter().flatten().collect() }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.p[i * self.cols + j]
    }

    pub fn flat(&self) -> &[Rational] {
        &self.p
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.p[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Indices `j` with `p[i][j] > 0`.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.get(i, j).is_positive()).collect()
    }

    pub fn support_points(&self, instance: &MotInstance, i: usize) -> Vec<Point> {
        self.row_support(i).into_iter().map(|j| instance.nu.point(j).clone()).collect()
    }

    /// Conditional law of `Y` given `X = x_i`.
    pub fn kernel(&self, instance: &MotInstance, i: usize) -> Vec<Rational> {
        let w = instance.mu.mass(i);
        self.row(i).iter().map(|v| v / w).collect()
    }

    /// Residuals of every marginal and martingale row, in LP row order.
    pub fn residuals(&self, instance: &MotInstance) -> Vec<Rational> {
        lp::build_mot_lp(instance).residuals(&self.p)
    }

    /// Exact membership in `M(mu, nu)`.
    pub fn validate(&self, instance: &MotInstance) -> Result<()> {
        if self.shape() != instance.shape() {
            return Err(Error::InstanceMismatch(format!(
                "coupling is {:?} but instance is {:?}",
                self.shape(),
                instance.shape()
            )));
        }
        if self.p.iter().any(Signed::is_negative) {
            return Err(Error::Internal("negative transport mass".into()));
        }
        if let Some(r) = self.residuals(instance).iter().find(|r| !r.is_zero()) {
            return Err(Error::Internal(format!("nonzero constraint residual {r}")));
        }
        Ok(())
    }

    /// Expectation of `f(i, j)`.
    pub fn integrate(&self, f: impl Fn(usize, usize) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if !v.is_zero() {
                    acc += v * f(i, j);
                }
            }
        }
        acc
    }

    /// Uniform average of `couplings`.
    pub fn average(couplings: &[Coupling]) -> Option<Coupling> {
        let first = couplings.first()?;
        let k = Rational::from_integer(couplings.len().into());
        let p = (0..first.p.len())
            .map(|t| couplings.iter().fold(Rational::zero(), |acc, c| acc + &c.p[t]) / &k)
            .collect();
        Some(Coupling { rows: first.rows, cols: first.cols, p })
    }

    /// True when `supp self_x` is contained in `supp other_x` for every row.
    pub fn support_within(&self, other: &Coupling) -> bool {
        self.p.iter().zip(&other.p).all(|(a, b)| !a.is_positive() || b.is_positive())
    }
}

fn feasible_region(instance: &MotInstance) -> Result<(lp::LinearProgram, FeasibleRegion)> {
    let prog = lp::build_mot_lp(instance);
    let region = FeasibleRegion::new(&prog).map_err(|_| Error::NotInConvexOrder)?;
    Ok((prog, region))
}

fn optimal_point(region: &FeasibleRegion, objective: &[Rational]) -> Result<(Rational, Vec<Rational>)> {
    match region.optimize(objective, Sense::Maximize) {
        LpOutcome::Optimal { value, primal, .. } => Ok((value, primal)),
        other => Err(Error::Internal(format!("bounded transport LP ended {:?}", other.status()))),
    }
}

/// A coupling whose conditional supports contain those of every other
/// martingale coupling.
///
/// Repeatedly maximizes the total mass on pairs not yet seen charged; each
/// optimum charges at least one new pair, and a zero optimum proves the
/// remaining pairs are charged by no coupling. The result is the uniform
/// average of the optimizers collected along the way.
pub fn maximal_support_coupling(instance: &MotInstance) -> Result<Coupling> {
    let (prog, region) = feasible_region(instance)?;
    let nvars = prog.num_vars();
    let mut uncharged: Vec<bool> = vec![true; nvars];
    let mut collected: Vec<Coupling> = Vec::new();
    while uncharged.iter().any(|&u| u) {
        let objective: Vec<Rational> =
            uncharged.iter().map(|&u| if u { Rational::from_integer(1.into()) } else { Rational::zero() }).collect();
        let (value, primal) = optimal_point(&region, &objective)?;
        if value.is_zero() {
            break;
        }
        for (u, v) in uncharged.iter_mut().zip(&primal) {
            if v.is_positive() {
                *u = false;
            }
        }
        collected.push(Coupling::from_flat(instance, &primal));
    }
    let phat = Coupling::average(&collected).ok_or_else(|| Error::Internal("no coupling collected".into()))?;
    phat.validate(instance)?;
    Ok(phat)
}

/// Maximizes `k` seeded random integer objectives over `M(mu, nu)` and
/// returns the distinct optimal basic solutions, each a vertex of the
/// polytope, in order of first appearance.
pub fn sample_vertices(instance: &MotInstance, k: usize, seed: u64) -> Result<Vec<Coupling>> {
    let (prog, region) = feasible_region(instance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objectives: Vec<Vec<Rational>> = (0..k)
        .map(|_| (0..prog.num_vars()).map(|_| rational::int(rng.random_range(-1000..=1000))).collect())
        .collect();
    let found: Vec<Vec<Rational>> = objectives
        .par_iter()
        .map(|obj| optimal_point(&region, obj).map(|(_, x)| x))
        .collect::<Result<_>>()?;
    let mut out: Vec<Coupling> = Vec::new();
    for x in found {
        let c = Coupling::from_flat(instance, &x);
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Closed convex hull of the conditional support of row `i`.
pub fn row_hull(instance: &MotInstance, p: &Coupling, i: usize) -> Polytope {
    Polytope::from_points(&p.support_points(instance, i)).expect("every row of a coupling carries mass")
}

/// `sum_i mu_i G(conv supp P_{x_i})`, each term estimated with `samples`
/// Monte Carlo draws from `seed` in dimensions two and up.
pub fn support_functional_with(instance: &MotInstance, p: &Coupling, samples: usize, seed: u64) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..instance.mu.len() {
        let set = RelOpenConvexSet::relative_interior_of(row_hull(instance, p, i));
        total += rational::to_f64(instance.mu.mass(i)) * geometry::g_functional(&set, samples, seed)?;
    }
    Ok(total)
}

pub fn support_functional(instance: &MotInstance, p: &Coupling, seed: u64) -> Result<f64> {
    support_functional_with(instance, p, geometry::DEFAULT_G_SAMPLES, seed)
}

/// Exact dimension part of the support functional, `sum_i mu_i dim(conv supp P_{x_i})`.
pub fn support_dimension(instance: &MotInstance, p: &Coupling) -> Rational {
    (0..instance.mu.len())
        .map(|i| instance.mu.mass(i) * Rational::from_integer(row_hull(instance, p, i).dim().into()))
        .sum()
}
