//! One-dimensional potential functions and the interval decomposition of
//! the line into irreducible components. Serves as an independent check on
//! the general paving in dimension one.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::lp::{self, LpOutcome, Sense};
use crate::measures::{mean, DiscreteMeasure, MotInstance};
use crate::rational::Rational;

/// `U(t) = sum_k m_k |x_k - t|`, stored as exact breakpoints, values at the
/// breakpoints, and slopes on the `breakpoints.len() + 1` linear pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
    slopes: Vec<Rational>,
}

impl Potential {
    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        // index of the first breakpoint strictly greater than t
        let k = self.breakpoints.partition_point(|b| b <= t);
        if k == 0 {
            &self.values[0] + &self.slopes[0] * (t - &self.breakpoints[0])
        } else {
            &self.values[k - 1] + &self.slopes[k] * (t - &self.breakpoints[k - 1])
        }
    }
}

fn scalar(p: &Point) -> &Rational {
    &p.coords()[0]
}

fn require_line(m: &DiscreteMeasure) -> Result<()> {
    if m.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: m.dim() });
    }
    Ok(())
}

pub fn potential(m: &DiscreteMeasure) -> Result<Potential> {
    require_line(m)?;
    let mut atoms: Vec<(Rational, Rational)> = m.atoms().iter().map(|a| (scalar(&a.point).clone(), a.mass.clone())).collect();
    atoms.sort();
    let breakpoints: Vec<Rational> = atoms.iter().map(|(x, _)| x.clone()).collect();
    let values = breakpoints
        .iter()
        .map(|t| atoms.iter().fold(Rational::zero(), |acc, (x, w)| acc + w * (x - t).abs()))
        .collect();
    // slope on piece k is (mass left of it) - (mass right of it)
    let mut slopes = Vec::with_capacity(atoms.len() + 1);
    let mut left = Rational::zero();
    slopes.push(-Rational::one());
    for (_, w) in &atoms {
        left += w;
        slopes.push(&left - (Rational::one() - &left));
    }
    Ok(Potential { breakpoints, values, slopes })
}

fn merged_breakpoints(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Vec<Rational> {
    let mut pts: Vec<Rational> = mu.points().chain(nu.points()).map(|p| scalar(p).clone()).collect();
    pts.sort();
    pts.dedup();
    pts
}

/// Convex order through potentials: equal means and `U^mu <= U^nu` at every
/// atom of either measure (both potentials are linear between atoms and
/// coincide outside their hull once the means agree).
pub fn potential_order(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<bool> {
    require_line(mu)?;
    require_line(nu)?;
    if mean(mu) != mean(nu) {
        return Ok(false);
    }
    let (um, un) = (potential(mu)?, potential(nu)?);
    Ok(merged_breakpoints(mu, nu).iter().all(|t| um.eval(t) <= un.eval(t)))
}

/// An irreducible interval `(left, right)` with its boundary augmentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BjInterval {
    #[serde(with = "crate::cli::rational_str")]
    pub left: Rational,
    #[serde(with = "crate::cli::rational_str")]
    pub right: Rational,
    /// Whether `left` (resp. `right`) belongs to `J`.
    pub left_in_j: bool,
    pub right_in_j: bool,
    /// First-marginal atoms inside the open interval.
    pub mu_atoms: Vec<usize>,
    /// Second-marginal atoms in `J`.
    pub nu_atoms: Vec<usize>,
}

impl BjInterval {
    pub fn contains_open(&self, t: &Rational) -> bool {
        &self.left < t && t < &self.right
    }

    pub fn contains_j(&self, t: &Rational) -> bool {
        self.contains_open(t) || (self.left_in_j && t == &self.left) || (self.right_in_j && t == &self.right)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDecomposition {
    pub intervals: Vec<BjInterval>,
    /// First-marginal atoms lying outside every interval.
    pub singletons: Vec<usize>,
}

impl IntervalDecomposition {
    pub fn interval_of(&self, t: &Rational) -> Option<&BjInterval> {
        self.intervals.iter().find(|iv| iv.contains_open(t))
    }
}

/// Maximal open intervals of `{U^mu < U^nu}`. An endpoint joins `J` when it
/// is an atom of `nu` that can receive mass from inside the interval under
/// some martingale coupling (one LP per endpoint).
pub fn bj_decomposition(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<IntervalDecomposition> {
    if !potential_order(mu, nu)? {
        return Err(Error::NotInConvexOrder);
    }
    let (um, un) = (potential(mu)?, potential(nu)?);
    let ts = merged_breakpoints(mu, nu);
    let gaps: Vec<Rational> = ts.iter().map(|t| un.eval(t) - um.eval(t)).collect();

    let mut spans: Vec<(usize, usize)> = Vec::new();
    for k in 0..ts.len().saturating_sub(1) {
        if !(gaps[k].is_positive() || gaps[k + 1].is_positive()) {
            continue;
        }
        match spans.last_mut() {
            Some((_, end)) if *end == k && gaps[k].is_positive() => *end = k + 1,
            _ => spans.push((k, k + 1)),
        }
    }

    let instance = MotInstance::new(mu.clone(), nu.clone())?;
    let prog = lp::build_mot_lp(&instance);
    let region = lp::FeasibleRegion::new(&prog).map_err(|_| Error::NotInConvexOrder)?;
    let m = nu.len();
    let charged_from = |inside: &[usize], endpoint: &Rational| -> Result<bool> {
        let Some(j) = nu.index_of(&Point::new(vec![endpoint.clone()])) else {
            return Ok(false);
        };
        let mut obj = vec![Rational::zero(); prog.num_vars()];
        for &i in inside {
            obj[i * m + j] = Rational::one();
        }
        match region.optimize(&obj, Sense::Maximize) {
            LpOutcome::Optimal { value, .. } => Ok(value.is_positive()),
            other => Err(Error::Internal(format!("endpoint LP ended {:?}", other.status()))),
        }
    };

    let mut intervals = Vec::with_capacity(spans.len());
    for (a, b) in spans {
        let (left, right) = (ts[a].clone(), ts[b].clone());
        let mu_atoms: Vec<usize> =
            (0..mu.len()).filter(|&i| &left < scalar(mu.point(i)) && scalar(mu.point(i)) < &right).collect();
        let left_in_j = charged_from(&mu_atoms, &left)?;
        let right_in_j = charged_from(&mu_atoms, &right)?;
        let mut iv = BjInterval { left, right, left_in_j, right_in_j, mu_atoms, nu_atoms: Vec::new() };
        iv.nu_atoms = (0..nu.len()).filter(|&j| iv.contains_j(scalar(nu.point(j)))).collect();
        intervals.push(iv);
    }
    let singletons =
        (0..mu.len()).filter(|&i| !intervals.iter().any(|iv| iv.contains_open(scalar(mu.point(i))))).collect();
    Ok(IntervalDecomposition { intervals, singletons })
}

/// Contact points of the two potentials, i.e. barriers no martingale
/// transport crosses. Returns the touching breakpoints plus the midpoint of
/// every linear piece along which the potentials coincide; together these
/// catch any atom-to-atom transport across the contact set.
pub fn contact_points(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Vec<Rational>> {
    let (um, un) = (potential(mu)?, potential(nu)?);
    let ts = merged_breakpoints(mu, nu);
    let touching: Vec<bool> = ts.iter().map(|t| um.eval(t) == un.eval(t)).collect();
    let mut out = Vec::new();
    for k in 0..ts.len() {
        if touching[k] {
            out.push(ts[k].clone());
            if k + 1 < ts.len() && touching[k + 1] {
                out.push((&ts[k] + &ts[k + 1]) / Rational::from_integer(2.into()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn line(pairs: &[(i64, (i64, i64))]) -> DiscreteMeasure {
        DiscreteMeasure::from_pairs(pairs.iter().map(|&(x, (p, q))| (Point::from_ints(&[x]), ratio(p, q))).collect())
            .unwrap()
    }

    fn direct(m: &DiscreteMeasure, t: &Rational) -> Rational {
        m.integrate(|x| (scalar(x) - t).abs())
    }

    #[test]
    fn potential_examples() {
        let d0 = line(&[(0, (1, 1))]);
        let u = potential(&d0).unwrap();
        for t in -3..=3 {
            assert_eq!(u.eval(&int(t)), int(t.abs()));
        }
        let spread = line(&[(-1, (1, 2)), (1, (1, 2))]);
        let u = potential(&spread).unwrap();
        for t in [-2, -1, 0, 1, 2] {
            let expected = if t.abs() > 1 { int(t.abs()) } else { int(1) };
            assert_eq!(u.eval(&int(t)), expected);
            assert_eq!(u.eval(&int(t)), direct(&spread, &int(t)));
        }
        assert_eq!(u.eval(&ratio(1, 3)), int(1));
        let three = line(&[(-2, (1, 4)), (0, (1, 2)), (2, (1, 4))]);
        assert_eq!(potential(&three).unwrap().eval(&int(0)), int(1));
        assert_eq!(potential(&three).unwrap().slopes(), &[int(-1), ratio(-1, 2), ratio(1, 2), int(1)]);
    }

    #[test]
    fn rejects_higher_dimension() {
        let p = DiscreteMeasure::dirac(Point::from_ints(&[0, 0]));
        assert!(potential(&p).is_err());
    }

    #[test]
    fn decomposition_of_split_dirac() {
        let mu = line(&[(0, (1, 1))]);
        let nu = line(&[(-1, (1, 2)), (1, (1, 2))]);
        let dec = bj_decomposition(&mu, &nu).unwrap();
        assert_eq!(dec.intervals.len(), 1);
        let iv = &dec.intervals[0];
        assert_eq!((iv.left.clone(), iv.right.clone()), (int(-1), int(1)));
        assert!(iv.left_in_j && iv.right_in_j);
        assert_eq!(iv.mu_atoms, vec![0]);
        assert!(dec.singletons.is_empty());
    }

    #[test]
    fn decomposition_of_equal_marginals() {
        let mu = line(&[(-1, (1, 3)), (2, (2, 3))]);
        let dec = bj_decomposition(&mu, &mu).unwrap();
        assert!(dec.intervals.is_empty());
        assert_eq!(dec.singletons, vec![0, 1]);
    }

    #[test]
    fn decomposition_single_wide_interval() {
        let mu = line(&[(-1, (1, 2)), (1, (1, 2))]);
        let nu = line(&[(-2, (1, 2)), (2, (1, 2))]);
        let dec = bj_decomposition(&mu, &nu).unwrap();
        assert_eq!(dec.intervals.len(), 1);
        assert_eq!((dec.intervals[0].left.clone(), dec.intervals[0].right.clone()), (int(-2), int(2)));
        assert_eq!(dec.intervals[0].mu_atoms, vec![0, 1]);
    }

    #[test]
    fn barrier_splits_components() {
        // every atom splits to its neighbours at distance one, and the
        // potentials touch in the gaps between those pairs
        let mu = line(&[(-2, (1, 4)), (2, (1, 4)), (-5, (1, 4)), (5, (1, 4))]);
        let nu = line(&[(-3, (1, 8)), (-1, (1, 8)), (1, (1, 8)), (3, (1, 8)), (-6, (1, 8)), (-4, (1, 8)), (4, (1, 8)), (6, (1, 8))]);
        let dec = bj_decomposition(&mu, &nu).unwrap();
        // each first-marginal atom gets its own interval of half-width 1
        assert_eq!(dec.intervals.len(), 4);
        for iv in &dec.intervals {
            assert_eq!(&iv.right - &iv.left, int(2));
            assert_eq!(iv.mu_atoms.len(), 1);
            assert!(iv.left_in_j && iv.right_in_j);
        }
    }

    #[test]
    fn not_in_order_is_an_error() {
        let mu = line(&[(-1, (1, 2)), (1, (1, 2))]);
        let nu = line(&[(0, (1, 1))]);
        assert_eq!(bj_decomposition(&mu, &nu).unwrap_err(), Error::NotInConvexOrder);
    }
}
