//! Face-algebra and Gaussian-functional identities, each returning the first
//! violation found.

use motpave::geometry::{self, conv_union, relative_face, relative_interiors_meet, ContainmentMode, RelOpenConvexSet};
use motpave::rational::{self, Rational};
use motpave::{Point, Polytope};

pub const G_SAMPLES: usize = 100_000;

fn centroid(p: &Polytope) -> Point {
    let k = rational::int(p.vertices().len() as i64);
    let d = p.ambient_dim();
    Point::new(
        (0..d).map(|c| p.vertices().iter().map(|v| v.coords()[c].clone()).sum::<Rational>() / &k).collect(),
    )
}

/// `rf_a(A n B) = rf_a A n rf_a B`, and inclusion passes to faces.
pub fn rf_algebra(a_set: &Polytope, b_set: &Polytope, a: &Point) -> Result<(), String> {
    let fa = relative_face(a, a_set);
    let fb = relative_face(a, b_set);
    match a_set.intersection(b_set) {
        None => {
            if fa.is_some() && fb.is_some() {
                return Err(format!("{a} lies in both {a_set} and {b_set} but they do not meet"));
            }
        }
        Some(ab) => {
            let fab = relative_face(a, &ab);
            match (fab, fa, fb) {
                (None, fa, fb) => {
                    if fa.is_some() && fb.is_some() {
                        return Err(format!("{a} in both sets but not in {ab}"));
                    }
                }
                (Some(f), Some(f1), Some(f2)) => {
                    if !relative_interiors_meet(&f1, &f2) {
                        return Err(format!("faces {f1} and {f2} at {a} have disjoint interiors"));
                    }
                    if f1.intersection(&f2).as_ref() != Some(&f) {
                        return Err(format!("face of intersection {f} differs from {f1} n {f2}"));
                    }
                    if !f.contains(a, ContainmentMode::RelativeInterior) {
                        return Err(format!("{a} not in ri of its face {f}"));
                    }
                    if !f.is_subset_of(&f1) || !f.is_subset_of(&f2) {
                        return Err(format!("face {f} not inside {f1} and {f2}"));
                    }
                }
                (Some(f), _, _) => return Err(format!("{a} has face {f} in the intersection only")),
            }
        }
    }
    // monotonicity: A n B is inside A
    if let Some(ab) = a_set.intersection(b_set) {
        if let (Some(small), Some(big)) = (relative_face(a, &ab), relative_face(a, a_set)) {
            if !small.is_subset_of(&big) {
                return Err(format!("rf of {ab} at {a} not inside rf of {a_set}"));
            }
        }
    }
    Ok(())
}

/// `rf_a A = ri A` exactly when `a` is in `ri A`.
pub fn rf_is_interior(a_set: &Polytope, a: &Point) -> Result<(), String> {
    let whole = relative_face(a, a_set).as_ref() == Some(a_set);
    let inside = a_set.contains(a, ContainmentMode::RelativeInterior);
    if whole != inside {
        return Err(format!("{a} in ri {a_set}: {inside}, face is whole set: {whole}"));
    }
    Ok(())
}

/// LP and facet descriptions agree on membership in every mode.
pub fn containment_agrees(p: &Polytope, x: &Point) -> Result<(), String> {
    for mode in [ContainmentMode::Closure, ContainmentMode::RelativeInterior, ContainmentMode::RelativeBoundary] {
        if p.contains(x, mode) != p.contains_by_facets(x, mode) {
            return Err(format!("{x} vs {p} disagree in {mode:?}"));
        }
    }
    Ok(())
}

/// If `ri K1` meets `ri K2` then `conv(ri K1 u ri K2) = ri conv(K1 u K2)`.
/// Both sides share the closure `conv(K1 u K2)`; the check is that strict
/// combinations of interior points of the two sets are interior to the hull.
pub fn intersecting_interiors(k1: &Polytope, k2: &Polytope) -> Result<(), String> {
    if !relative_interiors_meet(k1, k2) {
        return Ok(());
    }
    let hull = conv_union(k1, k2);
    if !k1.is_subset_of(&hull) || !k2.is_subset_of(&hull) {
        return Err(format!("{hull} does not contain {k1} and {k2}"));
    }
    let (c1, c2) = (centroid(k1), centroid(k2));
    for (p, q) in [(1, 2), (1, 1), (3, 1)] {
        let t = rational::ratio(p, p + q);
        let z = Point::new(c1.coords().iter().zip(c2.coords()).map(|(a, b)| &t * a + (rational::int(1) - &t) * b).collect());
        if !hull.contains(&z, ContainmentMode::RelativeInterior) {
            return Err(format!("{z} between interior points of {k1} and {k2} is not in ri {hull}"));
        }
    }
    Ok(())
}

fn g(p: &Polytope, seed: u64) -> Result<geometry::GEstimate, String> {
    geometry::g_estimate(&RelOpenConvexSet::relative_interior_of(p.clone()), G_SAMPLES, seed).map_err(|e| e.to_string())
}

/// `G` is monotone along inclusions, strictly so across dimensions, and
/// equal closures give equal values. Numeric comparisons between sets of
/// equal dimension allow three standard errors.
pub fn g_monotone(small: &Polytope, big: &Polytope, seed: u64) -> Result<(), String> {
    if !small.is_subset_of(big) {
        return Err(format!("{small} is not inside {big}"));
    }
    let (a, b) = (g(small, seed)?, g(big, seed)?);
    for e in [&a, &b] {
        let top = (small.ambient_dim() + 1) as f64;
        if !(0.0..=top).contains(&e.value) {
            return Err(format!("G = {} outside [0, {top}]", e.value));
        }
    }
    if small == big {
        if a.value != b.value {
            return Err(format!("equal closures but G {} != {}", a.value, b.value));
        }
    } else if small.dim() < big.dim() {
        if a.value >= b.value {
            return Err(format!("G({small}) = {} not below G({big}) = {}", a.value, b.value));
        }
    } else if a.value > b.value + 3.0 * (a.std_error + b.std_error) {
        return Err(format!("G({small}) = {} exceeds G({big}) = {} beyond noise", a.value, b.value));
    }
    Ok(())
}

/// Monte Carlo against the closed forms in dimensions 0 and 1.
pub fn g_closed_form_agrees(p: &Polytope, seed: u64) -> Result<(), String> {
    if p.dim() > 1 {
        return Ok(());
    }
    let set = RelOpenConvexSet::relative_interior_of(p.clone());
    let exact = geometry::g_estimate(&set, G_SAMPLES, seed).map_err(|e| e.to_string())?;
    let mc = geometry::g_monte_carlo(&set, G_SAMPLES, seed).map_err(|e| e.to_string())?;
    if !exact.closed_form || (exact.value - mc.value).abs() >= 0.005 {
        return Err(format!("{p}: closed form {} vs Monte Carlo {}", exact.value, mc.value));
    }
    Ok(())
}
