#![allow(dead_code)]

pub mod geometry_checks;

use motpave::geometry::{Point, Polytope};
use motpave::measures::{DiscreteMeasure, MotInstance};
use motpave::rational::{ratio, Rational};

pub fn pt(c: &[i64]) -> Point {
    Point::from_ints(c)
}

pub fn poly(pts: &[&[i64]]) -> Polytope {
    Polytope::from_points(&pts.iter().map(|c| pt(c)).collect::<Vec<_>>()).unwrap()
}

/// One-dimensional measure from `(atom, (p, q))` pairs.
pub fn line(pairs: &[(i64, (i64, i64))]) -> DiscreteMeasure {
    DiscreteMeasure::from_pairs(pairs.iter().map(|&(x, (p, q))| (pt(&[x]), ratio(p, q))).collect()).unwrap()
}

pub fn inst(mu: DiscreteMeasure, nu: DiscreteMeasure) -> MotInstance {
    MotInstance::new(mu, nu).unwrap()
}

pub fn dirac0() -> DiscreteMeasure {
    line(&[(0, (1, 1))])
}

pub fn pm1() -> DiscreteMeasure {
    line(&[(-1, (1, 2)), (1, (1, 2))])
}

pub fn q(s: &str) -> Rational {
    motpave::rational::parse(s).unwrap()
}
