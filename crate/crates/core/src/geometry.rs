//! Exact convex geometry over rational coordinates.
//!
//! Polytopes are held in V-representation, reduced to their extreme points
//! and sorted, so two polytopes are equal iff their vertex lists are. Facets
//! are derived on demand and cached.

use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome, Sense, VarLabel};
use crate::rational::{self, dot, Rational};

/// Default Monte Carlo sample count for [`g_functional`].
pub const DEFAULT_G_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct Point(Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![Rational::zero(); dim])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sub(&self, other: &Point) -> Vec<Rational> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational::to_f64).collect()
    }
}

impl From<Point> for Vec<String> {
    fn from(p: Point) -> Self {
        p.0.iter().map(rational::format).collect()
    }
}

impl TryFrom<Vec<String>> for Point {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        v.iter().map(|s| rational::parse(s)).collect::<Result<_>>().map(Point)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().map(rational::format).join(", "))
    }
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub(crate) fn rref(mut rows: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Unique solution of a square system, if it exists.
pub(crate) fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = b.len();
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().cloned().chain(std::iter::once(bi.clone())).collect())
        .collect();
    let (red, pivots) = rref(aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(red.iter().map(|row| row[n].clone()).collect())
}

/// An affine subspace `base + span(basis)`. The basis is kept in reduced row
/// echelon form, so it is canonical for the direction space and the
/// coordinates of `x` along it are `(x - base)` read at the pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSubspace {
    base: Point,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl AffineSubspace {
    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    /// Coordinates of `x - base` in the echelon basis (meaningful when `x`
    /// lies in the subspace).
    pub fn local_coords(&self, x: &Point) -> Vec<Rational> {
        let v = x.sub(&self.base);
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    pub fn contains(&self, x: &Point) -> bool {
        if x.dim() != self.ambient_dim() {
            return false;
        }
        let mut v = x.sub(&self.base);
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let f = v[p].clone();
            if f.is_zero() {
                continue;
            }
            for (vi, ri) in v.iter_mut().zip(row) {
                *vi -= &f * ri;
            }
        }
        v.iter().all(Zero::is_zero)
    }

    /// Equations `a . x = b` cutting out the subspace.
    pub fn equations(&self) -> Vec<(Vec<Rational>, Rational)> {
        let d = self.ambient_dim();
        (0..d)
            .filter(|c| !self.pivots.contains(c))
            .map(|c| {
                let mut a = vec![Rational::zero(); d];
                a[c] = Rational::one();
                for (row, &p) in self.basis.iter().zip(&self.pivots) {
                    a[p] -= &row[c];
                }
                let b = dot(&a, self.base.coords());
                (a, b)
            })
            .collect()
    }
}

/// Smallest affine subspace containing `points`.
pub fn affine_hull(points: &[Point]) -> Result<AffineSubspace> {
    let base = points.first().ok_or(Error::EmptyPointSet)?.clone();
    let d = base.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
    }
    let diffs: Vec<Vec<Rational>> = points[1..].iter().map(|p| p.sub(&base)).collect();
    let (basis, pivots) = if diffs.is_empty() { (Vec::new(), Vec::new()) } else { rref(diffs) };
    Ok(AffineSubspace { base, basis, pivots })
}

/// The inequality `normal . x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Facet {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Facet {
    pub fn slack(&self, x: &Point) -> Rational {
        &self.offset - dot(&self.normal, x.coords())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentMode {
    Closure,
    RelativeInterior,
    RelativeBoundary,
}

/// A nonempty polytope given by its extreme points.
#[derive(Debug, Clone)]
pub struct Polytope {
    vertices: Vec<Point>,
    hull: AffineSubspace,
    facets: OnceLock<Vec<Facet>>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for Polytope {}

impl Polytope {
    /// Convex hull of `points`, reduced to extreme points.
    pub fn from_points(points: &[Point]) -> Result<Self> {
        let hull = affine_hull(points)?;
        let mut pts: Vec<Point> = points.iter().cloned().sorted().dedup().collect();
        let mut k = 0;
        while k < pts.len() && pts.len() > 1 {
            let others: Vec<Point> = pts.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, p)| p.clone()).collect();
            if in_convex_hull(&others, &pts[k]) {
                pts.remove(k);
            } else {
                k += 1;
            }
        }
        // rebuild from the sorted vertices so equal polytopes share a base point
        let hull = if hull.dim() == 0 { hull } else { affine_hull(&pts)? };
        Ok(Self { vertices: pts, hull, facets: OnceLock::new() })
    }

    pub fn point(p: Point) -> Self {
        Self::from_points(&[p]).expect("single point")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.hull.ambient_dim()
    }

    pub fn affine_hull(&self) -> &AffineSubspace {
        &self.hull
    }

    /// Facets relative to the affine hull. A point has none; the equations
    /// of the hull are not included.
    pub fn facets(&self) -> &[Facet] {
        self.facets.get_or_init(|| compute_facets(&self.vertices, &self.hull))
    }

    /// Exact membership decided by LP feasibility over convex weights.
    pub fn contains(&self, x: &Point, mode: ContainmentMode) -> bool {
        contains(self, x, mode)
    }

    /// Exact membership decided from the facet description.
    pub fn contains_by_facets(&self, x: &Point, mode: ContainmentMode) -> bool {
        if !self.hull.contains(x) {
            return false;
        }
        let slacks: Vec<Rational> = self.facets().iter().map(|f| f.slack(x)).collect();
        let closed = slacks.iter().all(|s| !s.is_negative());
        let interior = slacks.iter().all(Signed::is_positive);
        match mode {
            ContainmentMode::Closure => closed,
            ContainmentMode::RelativeInterior => interior,
            ContainmentMode::RelativeBoundary => closed && !interior,
        }
    }

    pub fn is_subset_of(&self, other: &Polytope) -> bool {
        self.vertices.iter().all(|v| other.contains_by_facets(v, ContainmentMode::Closure))
    }

    /// Intersection via the combined H-representation, or `None` if empty.
    pub fn intersection(&self, other: &Polytope) -> Option<Polytope> {
        let d = self.ambient_dim();
        let mut eqs = self.hull.equations();
        eqs.extend(other.hull.equations());
        let ineqs: Vec<Facet> = self.facets().iter().chain(other.facets()).cloned().collect();
        let rows: Vec<(Vec<Rational>, Rational)> = eqs
            .iter()
            .cloned()
            .chain(ineqs.iter().map(|f| (f.normal.clone(), f.offset.clone())))
            .collect();
        let feasible = |x: &Point| {
            eqs.iter().all(|(a, b)| &dot(a, x.coords()) == b) && ineqs.iter().all(|f| !f.slack(x).is_negative())
        };
        let mut found = Vec::new();
        for combo in (0..rows.len()).combinations(d) {
            let a: Vec<Vec<Rational>> = combo.iter().map(|&r| rows[r].0.clone()).collect();
            let b: Vec<Rational> = combo.iter().map(|&r| rows[r].1.clone()).collect();
            if let Some(sol) = solve_square(&a, &b) {
                let x = Point(sol);
                if feasible(&x) {
                    found.push(x);
                }
            }
        }
        if found.is_empty() {
            None
        } else {
            Some(Polytope::from_points(&found).expect("nonempty"))
        }
    }
}

impl fmt::Display for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conv{{{}}}", self.vertices.iter().join(", "))
    }
}

fn compute_facets(vertices: &[Point], hull: &AffineSubspace) -> Vec<Facet> {
    let k = hull.dim();
    if k == 0 {
        return Vec::new();
    }
    let local: Vec<Vec<Rational>> = vertices.iter().map(|v| hull.local_coords(v)).collect();
    let base_shift = |n: &[Rational]| -> (Vec<Rational>, Rational) {
        let mut normal = vec![Rational::zero(); hull.ambient_dim()];
        for (ni, &p) in n.iter().zip(&hull.pivots) {
            normal[p] = ni.clone();
        }
        let shift = dot(&normal, hull.base.coords());
        (normal, shift)
    };
    let mut out: Vec<Facet> = Vec::new();
    for combo in (0..vertices.len()).combinations(k) {
        let q0 = &local[combo[0]];
        let diffs: Vec<Vec<Rational>> =
            combo[1..].iter().map(|&i| local[i].iter().zip(q0).map(|(a, b)| a - b).collect()).collect();
        let Some(n) = nullspace_line(&diffs, k) else {
            continue;
        };
        let b = dot(&n, q0);
        let sides: Vec<Rational> = local.iter().map(|c| dot(&n, c) - &b).collect();
        let n = if sides.iter().all(|s| !s.is_positive()) {
            n
        } else if sides.iter().all(|s| !s.is_negative()) {
            n.iter().map(|v| -v).collect()
        } else {
            continue;
        };
        let scaled = rational::primitive(&n);
        let n = if dot(&scaled, &n).is_negative() { scaled.iter().map(|v| -v).collect() } else { scaled };
        let b = dot(&n, q0);
        let (normal, shift) = base_shift(&n);
        let facet = Facet { normal, offset: b + shift };
        if !out.contains(&facet) {
            out.push(facet);
        }
    }
    out
}

/// Spanning vector of the one-dimensional nullspace of `rows` (each of
/// length `k`), or `None` if the nullspace has another dimension.
fn nullspace_line(rows: &[Vec<Rational>], k: usize) -> Option<Vec<Rational>> {
    let (red, pivots) = if rows.is_empty() { (Vec::new(), Vec::new()) } else { rref(rows.to_vec()) };
    if pivots.len() + 1 != k {
        return None;
    }
    let free = (0..k).find(|c| !pivots.contains(c))?;
    let mut n = vec![Rational::zero(); k];
    n[free] = Rational::one();
    for (row, &p) in red.iter().zip(&pivots) {
        n[p] = -row[free].clone();
    }
    Some(n)
}

fn weights_lp(generators: &[Point], x: &Point, strict: bool) -> LinearProgram {
    let mut prog = LinearProgram::new(Sense::Maximize);
    let lambdas: Vec<usize> =
        (0..generators.len()).map(|i| prog.add_var(VarLabel::Named(format!("l{i}")), true)).collect();
    prog.add_row(lambdas.iter().map(|&l| (l, Rational::one())).collect(), Rational::one());
    for c in 0..x.dim() {
        let coeffs = lambdas.iter().zip(generators).map(|(&l, g)| (l, g.coords()[c].clone())).collect();
        prog.add_row(coeffs, x.coords()[c].clone());
    }
    if strict {
        let t = prog.add_var(VarLabel::Named("t".into()), true);
        for (i, &l) in lambdas.iter().enumerate() {
            let s = prog.add_var(VarLabel::Named(format!("s{i}")), true);
            prog.add_row(vec![(l, Rational::one()), (t, -Rational::one()), (s, -Rational::one())], Rational::zero());
        }
        prog.set_objective(Sense::Maximize, &[(t, Rational::one())]);
    }
    prog
}

fn in_convex_hull(generators: &[Point], x: &Point) -> bool {
    lp::FeasibleRegion::new(&weights_lp(generators, x, false)).is_ok()
}

/// `x` is a strictly positive convex combination of `generators`, i.e. lies
/// in the relative interior of their hull.
fn in_relative_interior(generators: &[Point], x: &Point) -> bool {
    match lp::solve(&weights_lp(generators, x, true)) {
        LpOutcome::Optimal { value, .. } => value.is_positive(),
        _ => false,
    }
}

/// Exact membership of `x` in the closure, relative interior or relative
/// boundary of `p`, decided by rational LP feasibility.
pub fn contains(p: &Polytope, x: &Point, mode: ContainmentMode) -> bool {
    if x.dim() != p.ambient_dim() || !p.hull.contains(x) {
        return false;
    }
    match mode {
        ContainmentMode::Closure => in_convex_hull(&p.vertices, x),
        ContainmentMode::RelativeInterior => in_relative_interior(&p.vertices, x),
        ContainmentMode::RelativeBoundary => in_convex_hull(&p.vertices, x) && !in_relative_interior(&p.vertices, x),
    }
}

/// Whether `ri p1` and `ri p2` share a point: some point is a strictly
/// positive convex combination of both vertex sets.
pub fn relative_interiors_meet(p1: &Polytope, p2: &Polytope) -> bool {
    let mut prog = LinearProgram::new(Sense::Maximize);
    let t = prog.add_var(VarLabel::Named("t".into()), true);
    let weights = |vs: &[Point], tag: &str, prog: &mut LinearProgram| -> Vec<usize> {
        let ws: Vec<usize> =
            (0..vs.len()).map(|i| prog.add_var(VarLabel::Named(format!("{tag}{i}")), true)).collect();
        prog.add_row(ws.iter().map(|&w| (w, Rational::one())).collect(), Rational::one());
        for (i, &w) in ws.iter().enumerate() {
            let s = prog.add_var(VarLabel::Named(format!("{tag}s{i}")), true);
            prog.add_row(vec![(w, Rational::one()), (t, -Rational::one()), (s, -Rational::one())], Rational::zero());
        }
        ws
    };
    let a = weights(&p1.vertices, "a", &mut prog);
    let b = weights(&p2.vertices, "b", &mut prog);
    for c in 0..p1.ambient_dim() {
        let mut row: Vec<(usize, Rational)> = a.iter().zip(&p1.vertices).map(|(&w, v)| (w, v.coords()[c].clone())).collect();
        row.extend(b.iter().zip(&p2.vertices).map(|(&w, v)| (w, -v.coords()[c].clone())));
        prog.add_row(row, Rational::zero());
    }
    prog.set_objective(Sense::Maximize, &[(t, Rational::one())]);
    matches!(lp::solve(&prog), LpOutcome::Optimal { value, .. } if value.is_positive())
}

/// Closed face `F` of `p` with `rf_a p = ri F`: the smallest face containing
/// `a`, or `None` when `a` is not in `p`.
pub fn relative_face(a: &Point, p: &Polytope) -> Option<Polytope> {
    if !p.contains_by_facets(a, ContainmentMode::Closure) {
        return None;
    }
    let active: Vec<&Facet> = p.facets().iter().filter(|f| f.slack(a).is_zero()).collect();
    if active.is_empty() {
        return Some(p.clone());
    }
    let on_face: Vec<Point> =
        p.vertices.iter().filter(|v| active.iter().all(|f| f.slack(v).is_zero())).cloned().collect();
    Some(Polytope::from_points(&on_face).expect("a face of a polytope containing a is nonempty"))
}

/// Convex hull of the union of two polytopes.
pub fn conv_union(p1: &Polytope, p2: &Polytope) -> Polytope {
    let pts: Vec<Point> = p1.vertices.iter().chain(&p2.vertices).cloned().collect();
    Polytope::from_points(&pts).expect("nonempty union")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    RelativelyOpen,
    Closed,
}

/// A convex set given as the relative interior (or the whole) of a polytope.
/// Equality compares closures only.
#[derive(Debug, Clone)]
pub struct RelOpenConvexSet {
    pub closure: Polytope,
    pub kind: SetKind,
}

impl PartialEq for RelOpenConvexSet {
    fn eq(&self, other: &Self) -> bool {
        self.closure == other.closure
    }
}

impl Eq for RelOpenConvexSet {}

impl RelOpenConvexSet {
    pub fn relative_interior_of(closure: Polytope) -> Self {
        Self { closure, kind: SetKind::RelativelyOpen }
    }

    pub fn closed(closure: Polytope) -> Self {
        Self { closure, kind: SetKind::Closed }
    }

    pub fn dim(&self) -> usize {
        self.closure.dim()
    }

    pub fn contains(&self, x: &Point) -> bool {
        let mode = match self.kind {
            SetKind::RelativelyOpen => ContainmentMode::RelativeInterior,
            SetKind::Closed => ContainmentMode::Closure,
        };
        self.closure.contains_by_facets(x, mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GEstimate {
    pub value: f64,
    pub std_error: f64,
    pub dim: usize,
    pub closed_form: bool,
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(x / std::f64::consts::SQRT_2))
}

/// Float frame of an affine hull: orthonormal directions and the foot of
/// the perpendicular from the origin.
struct GaussFrame {
    directions: Vec<Vec<f64>>,
    foot: Vec<f64>,
}

impl GaussFrame {
    fn new(hull: &AffineSubspace) -> Self {
        let mut directions: Vec<Vec<f64>> = Vec::new();
        for row in &hull.basis {
            let mut v: Vec<f64> = row.iter().map(rational::to_f64).collect();
            for e in &directions {
                let proj: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(e).for_each(|(a, b)| *a -= proj * b);
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            directions.push(v.into_iter().map(|a| a / norm).collect());
        }
        let mut foot = hull.base.to_f64();
        for e in &directions {
            let proj: f64 = foot.iter().zip(e).map(|(a, b)| a * b).sum();
            foot.iter_mut().zip(e).for_each(|(a, b)| *a -= proj * b);
        }
        Self { directions, foot }
    }

    fn foot_density(&self) -> f64 {
        (-0.5 * self.foot.iter().map(|a| a * a).sum::<f64>()).exp()
    }
}

/// `G(C) = dim C + g_C(C)` with closed forms in dimensions 0 and 1 and
/// seeded Monte Carlo otherwise.
pub fn g_functional(c: &RelOpenConvexSet, mc_samples: usize, seed: u64) -> Result<f64> {
    g_estimate(c, mc_samples, seed).map(|g| g.value)
}

pub fn g_estimate(c: &RelOpenConvexSet, mc_samples: usize, seed: u64) -> Result<GEstimate> {
    let poly = &c.closure;
    let frame = GaussFrame::new(poly.affine_hull());
    match poly.dim() {
        0 => Ok(GEstimate { value: frame.foot_density(), std_error: 0.0, dim: 0, closed_form: true }),
        1 => {
            let e = &frame.directions[0];
            let mut s: Vec<f64> =
                poly.vertices().iter().map(|v| v.to_f64().iter().zip(e).map(|(a, b)| a * b).sum()).collect();
            s.sort_by(f64::total_cmp);
            let mass = std_normal_cdf(s[s.len() - 1]) - std_normal_cdf(s[0]);
            Ok(GEstimate { value: 1.0 + frame.foot_density() * mass, std_error: 0.0, dim: 1, closed_form: true })
        }
        _ => g_monte_carlo(c, mc_samples, seed),
    }
}

/// Monte Carlo estimate of `G` in any dimension; used directly to validate
/// the closed forms.
pub fn g_monte_carlo(c: &RelOpenConvexSet, mc_samples: usize, seed: u64) -> Result<GEstimate> {
    if mc_samples == 0 {
        return Err(Error::InvalidMeasure("Monte Carlo sample count must be positive".into()));
    }
    let poly = &c.closure;
    let k = poly.dim();
    let frame = GaussFrame::new(poly.affine_hull());
    // each facet as: offset - normal.foot  >=  sum_i z_i (normal . e_i)
    let cuts: Vec<(Vec<f64>, f64)> = poly
        .facets()
        .iter()
        .map(|f| {
            let a: Vec<f64> = f.normal.iter().map(rational::to_f64).collect();
            let along = frame.directions.iter().map(|e| a.iter().zip(e).map(|(x, y)| x * y).sum()).collect();
            let room = rational::to_f64(&f.offset) - a.iter().zip(&frame.foot).map(|(x, y)| x * y).sum::<f64>();
            (along, room)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![0.0f64; k];
    let mut hits = 0usize;
    for _ in 0..mc_samples {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let inside = cuts.iter().all(|(along, room)| along.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() <= *room);
        if inside {
            hits += 1;
        }
    }
    let frac = hits as f64 / mc_samples as f64;
    let w = frame.foot_density();
    Ok(GEstimate {
        value: k as f64 + w * frac,
        std_error: w * (frac * (1.0 - frac) / mc_samples as f64).sqrt(),
        dim: k,
        closed_form: false,
    })
}
