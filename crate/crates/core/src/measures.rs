//! Finitely supported probability measures and the convex order.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coupling::Coupling;
use crate::duality::PiecewiseAffineConvex;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::lp::{self, LpOutcome};
use crate::oned;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Point,
    #[serde(with = "crate::cli::rational_str")]
    pub mass: Rational,
}

/// A probability measure with finitely many atoms of positive rational mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    /// Checks positivity, exact unit total mass, distinct points and a
    /// common dimension.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let first = atoms.first().ok_or_else(|| Error::InvalidMeasure("no atoms".into()))?;
        let d = first.point.dim();
        if d == 0 {
            return Err(Error::InvalidMeasure("zero-dimensional points".into()));
        }
        let mut total = Rational::zero();
        for (k, a) in atoms.iter().enumerate() {
            if a.point.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: a.point.dim() });
            }
            if !a.mass.is_positive() {
                return Err(Error::InvalidMeasure(format!("atom {} has non-positive mass {}", a.point, a.mass)));
            }
            if atoms[..k].iter().any(|b| b.point == a.point) {
                return Err(Error::InvalidMeasure(format!("repeated atom {}", a.point)));
            }
            total += &a.mass;
        }
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    /// Builds from `(point, mass)` pairs.
    pub fn from_pairs(pairs: Vec<(Point, Rational)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(point, mass)| Atom { point, mass }).collect())
    }

    pub fn dirac(p: Point) -> Self {
        Self { atoms: vec![Atom { point: p, mass: Rational::one() }] }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].point.dim()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.atoms[i].point
    }

    pub fn mass(&self, i: usize) -> &Rational {
        &self.atoms[i].mass
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.atoms.iter().map(|a| &a.point)
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.atoms.iter().position(|a| &a.point == p)
    }

    /// Exact integral of `f` against the measure.
    pub fn integrate(&self, f: impl Fn(&Point) -> Rational) -> Rational {
        self.atoms.iter().fold(Rational::zero(), |acc, a| acc + &a.mass * f(&a.point))
    }
}

/// Exact barycenter.
pub fn mean(m: &DiscreteMeasure) -> Point {
    let mut acc = vec![Rational::zero(); m.dim()];
    for a in m.atoms() {
        for (s, c) in acc.iter_mut().zip(a.point.coords()) {
            *s += &a.mass * c;
        }
    }
    Point::new(acc)
}

/// An ordered pair of marginals sharing an ambient dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotInstance {
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
}

impl MotInstance {
    pub fn new(mu: DiscreteMeasure, nu: DiscreteMeasure) -> Result<Self> {
        if mu.dim() != nu.dim() {
            return Err(Error::DimensionMismatch { expected: mu.dim(), found: nu.dim() });
        }
        Ok(Self { mu, nu })
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    /// `(atoms of mu, atoms of nu)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.mu.len(), self.nu.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexOrder {
    /// `mu <= nu`; carries a martingale coupling.
    Holds(Coupling),
    /// Not in convex order; `f` is convex with `mu[f] - nu[f] = gap > 0`.
    Fails { witness: PiecewiseAffineConvex, gap: Rational },
}

impl ConvexOrder {
    pub fn holds(&self) -> bool {
        matches!(self, ConvexOrder::Holds(_))
    }
}

/// Decides `mu <= nu` by feasibility of the martingale transport LP. In one
/// dimension the answer is cross-checked against the potential criterion.
pub fn convex_order(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<ConvexOrder> {
    let instance = MotInstance::new(mu.clone(), nu.clone())?;
    let prog = lp::build_mot_lp(&instance);
    let answer = match lp::FeasibleRegion::new(&prog) {
        Ok(region) => {
            let LpOutcome::Optimal { primal, .. } = region.optimize(prog.objective(), prog.sense()) else {
                return Err(Error::Internal("zero objective over a feasible region must be optimal".into()));
            };
            ConvexOrder::Holds(Coupling::from_flat(&instance, &primal))
        }
        Err(LpOutcome::Infeasible { farkas }) => {
            let witness = witness_from_farkas(&instance, &farkas);
            let gap = mu.integrate(|x| witness.eval(x)) - nu.integrate(|y| witness.eval(y));
            if !gap.is_positive() {
                return Err(Error::Internal(format!("Farkas witness has non-positive gap {gap}")));
            }
            ConvexOrder::Fails { witness, gap }
        }
        Err(other) => return Err(Error::Internal(format!("unexpected phase-one outcome {:?}", other.status()))),
    };
    if instance.dim() == 1 {
        let by_potentials = oned::potential_order(mu, nu)?;
        if by_potentials != answer.holds() {
            return Err(Error::Internal("LP and potential convex-order answers disagree".into()));
        }
    }
    Ok(answer)
}

/// The Farkas ray `(a, b, h)` of the transport LP satisfies
/// `a_i + b_j + h_i . (y_j - x_i) <= 0` and `mu[a] + nu[b] > 0`, so
/// `f(y) = max_i a_i + h_i . (y - x_i)` has `f(x_i) >= a_i`,
/// `f(y_j) <= -b_j`, hence `mu[f] - nu[f] >= mu[a] + nu[b] > 0`.
fn witness_from_farkas(instance: &MotInstance, farkas: &[Rational]) -> PiecewiseAffineConvex {
    let (n, m) = instance.shape();
    let d = instance.dim();
    let pieces = (0..n)
        .map(|i| {
            let a = &farkas[i];
            let h: Vec<Rational> = (0..d).map(|c| farkas[n + m + i * d + c].clone()).collect();
            let intercept = a - rational::dot(&h, instance.mu.point(i).coords());
            (h, intercept)
        })
        .collect();
    PiecewiseAffineConvex::new(pieces).expect("at least one atom")
}
