//! A two-dimensional instance whose transport polytope is a segment, with
//! known vertices, paving and polar structure.
//!
//! First marginal on `x0 = (0,0)`, `x1 = (1,0)`; second marginal on
//! `y0 = (0,0)`, `y-1 = (0,-1)`, `y1 = (0,1)`, `y2 = (2,0)`, stored in that
//! order.

use serde::{Deserialize, Serialize};

use crate::coupling::{self, Coupling};
use crate::duality::{self, Cost, CostFunction, DualValue, PrimalValue};
use crate::error::Result;
use crate::geometry::{Point, Polytope};
use crate::measures::{DiscreteMeasure, MotInstance};
use crate::paving::{PairClassifier, Polarity};
use crate::rational::{int, ratio, Rational};

/// Seed for vertex sampling and the Gaussian functional.
pub const SEED: u64 = 22;
/// Random objectives used to recover the vertex set.
pub const VERTEX_DRAWS: usize = 64;

pub fn x(k: usize) -> Point {
    [Point::from_ints(&[0, 0]), Point::from_ints(&[1, 0])][k].clone()
}

/// `y(-1)`, `y(0)`, `y(1)`, `y(2)`.
pub fn y(k: i32) -> Point {
    match k {
        -1 => Point::from_ints(&[0, -1]),
        0 => Point::from_ints(&[0, 0]),
        1 => Point::from_ints(&[0, 1]),
        2 => Point::from_ints(&[2, 0]),
        _ => panic!("no atom y({k})"),
    }
}

/// Column index of `y(k)` in the instance.
pub fn col(k: i32) -> usize {
    match k {
        0 => 0,
        -1 => 1,
        1 => 2,
        2 => 3,
        _ => panic!("no atom y({k})"),
    }
}

pub fn instance() -> MotInstance {
    let mu = DiscreteMeasure::from_pairs(vec![(x(0), ratio(1, 2)), (x(1), ratio(1, 2))]).expect("valid");
    let nu = DiscreteMeasure::from_pairs(vec![
        (y(0), ratio(4, 8)),
        (y(-1), ratio(1, 8)),
        (y(1), ratio(1, 8)),
        (y(2), ratio(2, 8)),
    ])
    .expect("valid");
    MotInstance::new(mu, nu).expect("same dimension")
}

fn eighths(rows: [[i64; 4]; 2]) -> Coupling {
    Coupling::from_matrix(rows.iter().map(|r| r.iter().map(|&v| ratio(v, 8)).collect()).collect())
}

/// Columns ordered `y0, y-1, y1, y2`.
pub fn p1() -> Coupling {
    eighths([[4, 0, 0, 0], [0, 1, 1, 2]])
}

pub fn p2() -> Coupling {
    eighths([[2, 1, 1, 0], [2, 0, 0, 2]])
}

/// Infinite on `(x0, y2)` only, zero elsewhere.
pub fn polar_gap_cost() -> CostFunction {
    CostFunction::from_fn(&instance(), |i, j| if (i, j) == (0, col(2)) { Cost::Infinite } else { Cost::Finite(int(0)) })
}

fn indicator(eq: bool) -> CostFunction {
    let inst = instance();
    CostFunction::from_fn(&inst, |i, j| Cost::Finite(int(((inst.mu.point(i) == inst.nu.point(j)) == eq) as i64)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenCheck {
    pub name: String,
    pub ok: bool,
    pub expected: String,
    pub found: String,
}

fn check(name: &str, expected: impl ToString, found: impl ToString) -> GoldenCheck {
    let (expected, found) = (expected.to_string(), found.to_string());
    GoldenCheck { name: name.to_string(), ok: expected == found, expected, found }
}

fn describe(v: &[Coupling]) -> String {
    let mut names: Vec<String> = v
        .iter()
        .map(|c| {
            if *c == p1() {
                "P1".to_string()
            } else if *c == p2() {
                "P2".to_string()
            } else {
                format!("{:?}", c.matrix().iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
            }
        })
        .collect();
    names.sort();
    format!("{{{}}}", names.join(", "))
}

fn primal_text(v: &PrimalValue) -> String {
    v.value().map_or_else(|| "inf".to_string(), Rational::to_string)
}

fn dual_text(v: &DualValue) -> String {
    v.value().map_or_else(|| "inf".to_string(), Rational::to_string)
}

/// Runs the whole pipeline on the instance and compares every golden value.
pub fn checks() -> Result<Vec<GoldenCheck>> {
    let inst = instance();
    let mut out = Vec::new();

    out.push(check("vertices", "{P1, P2}", describe(&coupling::sample_vertices(&inst, VERTEX_DRAWS, SEED)?)));
    for (name, p) in [("P1 feasible", p1()), ("P2 feasible", p2())] {
        out.push(check(name, "ok", p.validate(&inst).map_or_else(|e| e.to_string(), |_| "ok".into())));
    }

    let classifier = PairClassifier::new(&inst)?;
    let cm = classifier.paving();
    out.push(check("components", 2, cm.components().len()));
    let seg = Polytope::from_points(&[y(1), y(-1)])?;
    let tri = Polytope::from_points(&[y(1), y(-1), y(2)])?;
    out.push(check("cl I(x0)", &seg, cm.closure_of(0)));
    out.push(check("cl I(x1)", &tri, cm.closure_of(1)));

    let mut polar = Vec::new();
    for (i, row) in classifier.classify_all()?.iter().enumerate() {
        for (j, pc) in row.iter().enumerate() {
            if pc.polarity == Polarity::Polar {
                polar.push(format!("({}, {})", inst.mu.point(i), inst.nu.point(j)));
            }
        }
    }
    out.push(check("polar pairs", format!("[({}, {})]", x(0), y(2)), format!("[{}]", polar.join(", "))));

    let dims: Vec<Rational> =
        [p1(), p2(), coupling::maximal_support_coupling(&inst)?].iter().map(|p| coupling::support_dimension(&inst, p)).collect();
    out.push(check("support dimensions P1, P2, Phat", "1, 1, 3/2", dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")));
    let phat = coupling::maximal_support_coupling(&inst)?;
    let g: Vec<f64> = [p1(), p2(), phat]
        .iter()
        .map(|p| coupling::support_functional(&inst, p, SEED))
        .collect::<Result<_>>()?;
    out.push(check("G(Phat) exceeds both vertices", true, g[2] > g[0] && g[2] > g[1]));

    out.push(check("sup P[X = Y]", "1/2", primal_text(&duality::primal_value(&indicator(true), &inst)?)));
    out.push(check("sup P[X != Y]", "3/4", primal_text(&duality::primal_value(&indicator(false), &inst)?)));
    let gap = polar_gap_cost();
    out.push(check("primal, polar infinite cost", "0", primal_text(&duality::primal_value(&gap, &inst)?)));
    out.push(check("quasi-sure dual, polar infinite cost", "0", dual_text(&duality::dual_value_quasisure(&gap, &inst)?)));
    out.push(check("pointwise dual, polar infinite cost", "inf", dual_text(&duality::dual_value_pointwise(&gap, &inst)?)));
    Ok(out)
}
