//! Seeded generators for random instances, costs and convex functions.
//!
//! Instances in convex order are built by splitting each atom of the first
//! marginal along a mean-preserving kernel, so the second marginal dominates
//! by construction.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::duality::{Cost, CostFunction, PiecewiseAffineConvex};
use crate::geometry::{Point, Polytope};
use crate::measures::{DiscreteMeasure, MotInstance};
use crate::rational::{int, ratio, Rational};

fn random_masses<R: Rng>(rng: &mut R, k: usize) -> Vec<Rational> {
    let weights: Vec<i64> = (0..k).map(|_| rng.random_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| ratio(w, total)).collect()
}

fn distinct_points<R: Rng>(rng: &mut R, k: usize, dim: usize, span: i64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(k);
    while out.len() < k {
        let p = Point::from_ints(&(0..dim).map(|_| rng.random_range(-span..=span)).collect::<Vec<_>>());
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn add(p: &Point, v: &[i64], scale: i64) -> Point {
    Point::new(p.coords().iter().zip(v).map(|(c, d)| c + int(d * scale)).collect())
}

fn measure_from(acc: BTreeMap<Point, Rational>) -> DiscreteMeasure {
    DiscreteMeasure::from_pairs(acc.into_iter().filter(|(_, w)| !w.is_zero()).collect())
        .expect("generated masses are positive and sum to one")
}

/// Splits mass `w` at `x` into a mean-preserving law on at most three points.
fn split_atom<R: Rng>(rng: &mut R, x: &Point, w: &Rational, acc: &mut BTreeMap<Point, Rational>) {
    let dim = x.dim();
    let mut push = |p: Point, m: Rational| *acc.entry(p).or_insert_with(Rational::zero) += m;
    let direction = |rng: &mut R| loop {
        let v: Vec<i64> = (0..dim).map(|_| rng.random_range(-2..=2)).collect();
        if v.iter().any(|&c| c != 0) {
            break v;
        }
    };
    match rng.random_range(0..10) {
        0 | 1 => push(x.clone(), w.clone()),
        2..=6 => {
            let v = direction(rng);
            let (a, b) = (rng.random_range(1..=3), rng.random_range(1..=3));
            push(add(x, &v, -a), w * ratio(b, a + b));
            push(add(x, &v, b), w * ratio(a, a + b));
        }
        7 | 8 if dim >= 2 => {
            let (u, v) = (direction(rng), direction(rng));
            let minus: Vec<i64> = u.iter().zip(&v).map(|(a, b)| -a - b).collect();
            let third = w * ratio(1, 3);
            push(add(x, &u, 1), third.clone());
            push(add(x, &v, 1), third.clone());
            push(add(x, &minus, 1), third);
        }
        _ => {
            let v = direction(rng);
            let (a, b) = (rng.random_range(1..=2), rng.random_range(1..=2));
            let keep = ratio(rng.random_range(1..=3), 4);
            let moved = w * (Rational::one() - &keep);
            push(x.clone(), w * &keep);
            push(add(x, &v, -a), &moved * ratio(b, a + b));
            push(add(x, &v, b), &moved * ratio(a, a + b));
        }
    }
}

/// A random instance in convex order with at most `max_atoms` atoms per
/// marginal.
pub fn convex_order_instance<R: Rng>(rng: &mut R, dim: usize, max_atoms: usize) -> MotInstance {
    let span = if dim == 1 { 6 } else { 3 };
    loop {
        let n = rng.random_range(1..=max_atoms.min(4));
        let points = distinct_points(rng, n, dim, span);
        let masses = random_masses(rng, n);
        let mut acc = BTreeMap::new();
        for (x, w) in points.iter().zip(&masses) {
            split_atom(rng, x, w, &mut acc);
        }
        if acc.len() > max_atoms {
            continue;
        }
        let mu = DiscreteMeasure::from_pairs(points.into_iter().zip(masses).collect()).expect("valid");
        return MotInstance::new(mu, measure_from(acc)).expect("same dimension");
    }
}

/// A random pair that may or may not be in convex order.
pub fn mixed_pair<R: Rng>(rng: &mut R, dim: usize, max_atoms: usize) -> MotInstance {
    let base = convex_order_instance(rng, dim, max_atoms);
    match rng.random_range(0..4) {
        0 => base,
        1 => MotInstance::new(base.nu, base.mu).expect("same dimension"),
        2 => {
            // nudge one atom of the second marginal
            let mut pairs: Vec<(Point, Rational)> = base.nu.atoms().iter().map(|a| (a.point.clone(), a.mass.clone())).collect();
            let k = rng.random_range(0..pairs.len());
            let shift: Vec<i64> = (0..dim).map(|_| rng.random_range(-1..=1)).collect();
            pairs[k].0 = add(&pairs[k].0, &shift, 1);
            let mut acc = BTreeMap::new();
            for (p, w) in pairs {
                *acc.entry(p).or_insert_with(Rational::zero) += w;
            }
            MotInstance::new(base.mu, measure_from(acc)).expect("same dimension")
        }
        _ => {
            // an unrelated second marginal recentred to the same mean
            let k = rng.random_range(1..=max_atoms.min(5));
            let mut pts = distinct_points(rng, k, dim, 6);
            pts.shuffle(rng);
            let masses = random_masses(rng, k);
            let nu0 = DiscreteMeasure::from_pairs(pts.into_iter().zip(masses).collect()).expect("valid");
            let shift: Vec<Rational> = crate::measures::mean(&base.mu)
                .coords()
                .iter()
                .zip(crate::measures::mean(&nu0).coords())
                .map(|(a, b)| a - b)
                .collect();
            let moved = nu0
                .atoms()
                .iter()
                .map(|a| (Point::new(a.point.coords().iter().zip(&shift).map(|(c, s)| c + s).collect()), a.mass.clone()))
                .collect();
            MotInstance::new(base.mu, DiscreteMeasure::from_pairs(moved).expect("valid")).expect("same dimension")
        }
    }
}

/// Hull of 1..=`max_points` integer points in `[-span, span]^dim`, with
/// halves mixed in so faces are not all axis-aligned.
pub fn polytope<R: Rng>(rng: &mut R, dim: usize, max_points: usize, span: i64) -> Polytope {
    let k = rng.random_range(1..=max_points);
    let pts: Vec<Point> = (0..k).map(|_| point(rng, dim, span)).collect();
    Polytope::from_points(&pts).expect("nonempty")
}

/// A point with coordinates in `[-span, span]` on the half-integer grid.
pub fn point<R: Rng>(rng: &mut R, dim: usize, span: i64) -> Point {
    Point::new((0..dim).map(|_| ratio(rng.random_range(-2 * span..=2 * span), 2)).collect())
}

pub fn convex_function<R: Rng>(rng: &mut R, dim: usize) -> PiecewiseAffineConvex {
    let k = rng.random_range(1..=4);
    let pieces = (0..k)
        .map(|_| {
            let slope = (0..dim).map(|_| ratio(rng.random_range(-6..=6), 2)).collect();
            (slope, ratio(rng.random_range(-10..=10), rng.random_range(1..=3)))
        })
        .collect();
    PiecewiseAffineConvex::new(pieces).expect("at least one piece")
}

pub fn finite_cost<R: Rng>(rng: &mut R, instance: &MotInstance) -> CostFunction {
    let (n, m) = instance.shape();
    let values = (0..n)
        .map(|_| (0..m).map(|_| Cost::Finite(ratio(rng.random_range(0..=20), rng.random_range(1..=4)))).collect())
        .collect();
    CostFunction::new(values).expect("nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::convex_order;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_in_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [1, 2] {
            for _ in 0..20 {
                let inst = convex_order_instance(&mut rng, dim, 8);
                assert!(inst.mu.len() <= 8 && inst.nu.len() <= 8);
                assert!(convex_order(&inst.mu, &inst.nu).unwrap().holds());
            }
        }
    }

    #[test]
    fn mixed_pairs_cover_both_answers() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let holds: Vec<bool> = (0..40)
            .map(|_| {
                let p = mixed_pair(&mut rng, 1, 8);
                convex_order(&p.mu, &p.nu).unwrap().holds()
            })
            .collect();
        assert!(holds.iter().any(|&h| h) && holds.iter().any(|&h| !h));
    }
}
