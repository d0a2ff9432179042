//! Command-line front end: instance files, command dispatch and reports.
//!
//! Reports are deterministic for a given instance, command and seed, so the
//! JSON form can be diffed byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coupling::{self, Coupling};
use crate::duality::{self, Cost, CostFunction, DualCertificate, DualValue, PrimalValue};
use crate::error::{Error, Result};
use crate::geometry::{Point, Polytope};
use crate::golden::{self, GoldenCheck};
use crate::measures::{self, Atom, ConvexOrder, DiscreteMeasure, MotInstance};
use crate::oned::{self, BjInterval};
use crate::paving::{PairClassifier, Polarity};
use crate::rational::{self, Rational};

/// Serde adapter storing a rational as its exact `"p/q"` string.
pub mod rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rational::{self, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

// ---- instance files ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub point: Vec<String>,
    pub mass: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dim: usize,
    pub mu: Vec<AtomSpec>,
    pub nu: Vec<AtomSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<Vec<Vec<Cost>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A parsed instance file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedInstance {
    pub instance: MotInstance,
    pub cost: Option<CostFunction>,
    pub seed: Option<u64>,
}

fn parse_measure(atoms: &[AtomSpec], dim: usize, name: &str) -> Result<DiscreteMeasure> {
    let atoms = atoms
        .iter()
        .map(|a| {
            let point = Point::try_from(a.point.clone())?;
            if point.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: point.dim() });
            }
            Ok(Atom { point, mass: rational::parse(&a.mass)? })
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::new(atoms).map_err(|e| match e {
        Error::InvalidMeasure(m) => Error::InvalidMeasure(format!("{name}: {m}")),
        other => other,
    })
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<LoadedInstance> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.load()
    }

    pub fn load(&self) -> Result<LoadedInstance> {
        let mu = parse_measure(&self.mu, self.dim, "mu")?;
        let nu = parse_measure(&self.nu, self.dim, "nu")?;
        let instance = MotInstance::new(mu, nu)?;
        let cost = match &self.cost {
            Some(rows) => {
                let c = CostFunction::new(rows.clone())?;
                c.check_shape(&instance)?;
                Some(c)
            }
            None => None,
        };
        Ok(LoadedInstance { instance, cost, seed: self.seed })
    }

    /// Canonical file for an instance: exact strings, atoms in stored order.
    pub fn from_instance(instance: &MotInstance, cost: Option<&CostFunction>, seed: Option<u64>) -> Self {
        let atoms = |m: &DiscreteMeasure| {
            m.atoms()
                .iter()
                .map(|a| AtomSpec {
                    point: a.point.coords().iter().map(rational::format).collect(),
                    mass: rational::format(&a.mass),
                })
                .collect()
        };
        InstanceFile {
            dim: instance.dim(),
            mu: atoms(&instance.mu),
            nu: atoms(&instance.nu),
            cost: cost.map(|c| c.rows().to_vec()),
            seed,
        }
    }
}

pub fn load_instance(path: &Path) -> Result<LoadedInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    InstanceFile::parse(&text)
}

/// A bare cost table: `[[str | "inf"]]`.
pub fn parse_cost(text: &str) -> Result<CostFunction> {
    let rows: Vec<Vec<Cost>> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    CostFunction::new(rows)
}

pub fn load_cost(path: &Path) -> Result<CostFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_cost(&text)
}

/// SHA-256 of the canonical JSON of the marginals and cost.
pub fn digest(instance: &MotInstance, cost: Option<&CostFunction>) -> String {
    let canonical = InstanceFile::from_instance(instance, cost, None);
    let bytes = serde_json::to_vec(&canonical).expect("instance serializes");
    hex::encode(Sha256::digest(&bytes))
}

// ---- reports ----

/// A rational with a float rendering alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exact {
    pub exact: String,
    pub float: f64,
}

impl From<&Rational> for Exact {
    fn from(r: &Rational) -> Self {
        Exact { exact: rational::format(r), float: rational::to_f64(r) }
    }
}

type Matrix = Vec<Vec<String>>;

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational::format).collect()
}

fn coords(p: &Point) -> Vec<String> {
    strings(p.coords())
}

fn matrix(c: &Coupling) -> Matrix {
    c.matrix().iter().map(|r| strings(r)).collect()
}

fn vertices(p: &Polytope) -> Vec<Vec<String>> {
    p.vertices().iter().map(coords).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub slope: Vec<String>,
    pub intercept: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub holds: bool,
    /// A martingale coupling when the order holds.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coupling: Option<Matrix>,
    /// `f = max of the pieces`, convex with `mu[f] > nu[f]`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<AffinePiece>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mu_f: Option<Exact>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu_f: Option<Exact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry {
    pub matrix: Matrix,
    /// Charged columns per row.
    pub support: Vec<Vec<usize>>,
    pub residuals_zero: bool,
    pub support_dimension: Exact,
    pub support_functional: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub draws: Option<usize>,
    pub couplings: Vec<CouplingEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRow {
    pub closure: Vec<Vec<String>>,
    pub dim: usize,
    pub mu_atoms: Vec<usize>,
    pub nu_atoms: Vec<usize>,
    pub j_lower_atoms: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j_upper_boundary: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PavingReport {
    pub maximal_coupling: Matrix,
    pub components: Vec<ComponentRow>,
    /// Component index per atom of the first marginal.
    pub atom_component: Vec<usize>,
    /// `"polar"` or `"nonpolar"` per pair.
    pub polar: Vec<Vec<Polarity>>,
    /// Largest mass any martingale coupling puts on the pair.
    pub max_mass: Matrix,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub intervals: Option<Vec<BjInterval>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub phi: Vec<String>,
    pub psi: Vec<String>,
    pub h: Vec<Vec<String>>,
    pub constraint_pairs: usize,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueEntry {
    /// Absent when the value is `+inf`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<Exact>,
    pub infinite: bool,
    /// The infinite-cost pair responsible for an infinite value.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coupling: Option<Matrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub mode: DualMode,
    pub primal: ValueEntry,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pointwise: Option<ValueEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quasisure: Option<ValueEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialReport {
    pub breakpoints: Vec<String>,
    pub u_mu: Vec<String>,
    pub u_nu: Vec<String>,
    pub order_holds: bool,
    pub intervals: Vec<BjInterval>,
    pub contact_points: Vec<String>,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub all_ok: bool,
    pub checks: Vec<GoldenCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ReportBody {
    CheckOrder(OrderReport),
    Coupling(CouplingReport),
    Paving(PavingReport),
    Dual(DualReport),
    Potentials(PotentialReport),
    Example(ExampleReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub instance_digest: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub result: ReportBody,
}

impl Report {
    pub fn new(command: &str, instance: &MotInstance, cost: Option<&CostFunction>, seed: Option<u64>, result: ReportBody) -> Self {
        Report { command: command.to_string(), instance_digest: digest(instance, cost), seed, result }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// True unless a golden comparison failed.
    pub fn ok(&self) -> bool {
        match &self.result {
            ReportBody::Example(e) => e.all_ok,
            _ => true,
        }
    }
}

// ---- command line ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualMode {
    Pointwise,
    Quasisure,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "motpave", version, about = "Irreducible convex paving for discrete martingale transport")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Instance JSON file.
    #[arg(long, global = true)]
    pub instance: Option<PathBuf>,
    /// Cost table JSON file (overrides the instance's cost).
    #[arg(long, global = true)]
    pub cost: Option<PathBuf>,
    /// Where to write potential samples.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Seed for vertex sampling and Monte Carlo (overrides the instance's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel LP fan-out.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Print elapsed time to stderr.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Decide the convex order, with a coupling or a separating convex function.
    CheckOrder,
    /// The maximal-support coupling, or sampled vertices of the coupling polytope.
    Coupling {
        #[arg(long, conflicts_with = "vertices")]
        maximal: bool,
        /// Number of random objectives to maximize.
        #[arg(long)]
        vertices: Option<usize>,
    },
    /// Components, boundary augmentations and the polar-pair matrix.
    Paving,
    /// Primal value and the pointwise / quasi-sure dual values.
    Dual {
        #[arg(long, value_enum, default_value_t = DualMode::Both)]
        mode: DualMode,
    },
    /// One-dimensional potential functions and their contact structure.
    Potentials {
        /// Uniform grid intervals between the outermost atoms, padded by one.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Built-in two-dimensional instance with known answers.
    #[command(name = "example-2-2")]
    Example22,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckOrder => "check-order",
            Command::Coupling { .. } => "coupling",
            Command::Paving => "paving",
            Command::Dual { .. } => "dual",
            Command::Potentials { .. } => "potentials",
            Command::Example22 => "example-2-2",
        }
    }
}

fn require_instance(cli: &Cli) -> Result<LoadedInstance> {
    let path = cli.instance.as_deref().ok_or_else(|| Error::Parse(format!("{} needs --instance", cli.command.name())))?;
    load_instance(path)
}

pub fn cmd_check_order(instance: &MotInstance) -> Result<OrderReport> {
    Ok(match measures::convex_order(&instance.mu, &instance.nu)? {
        ConvexOrder::Holds(p) => {
            OrderReport { holds: true, coupling: Some(matrix(&p)), witness: None, mu_f: None, nu_f: None }
        }
        ConvexOrder::Fails { witness, .. } => {
            let pieces = witness
                .pieces()
                .iter()
                .map(|(s, b)| AffinePiece { slope: strings(s), intercept: rational::format(b) })
                .collect();
            let mu_f = instance.mu.integrate(|x| witness.eval(x));
            let nu_f = instance.nu.integrate(|y| witness.eval(y));
            OrderReport {
                holds: false,
                coupling: None,
                witness: Some(pieces),
                mu_f: Some(Exact::from(&mu_f)),
                nu_f: Some(Exact::from(&nu_f)),
            }
        }
    })
}

/// The Gaussian part only runs Monte Carlo for hulls of dimension two or
/// more; a seed is then mandatory.
fn functional(instance: &MotInstance, p: &Coupling, seed: Option<u64>) -> Result<f64> {
    let needs_mc = (0..instance.mu.len()).any(|i| coupling::row_hull(instance, p, i).dim() >= 2);
    match (seed, needs_mc) {
        (Some(s), _) => coupling::support_functional(instance, p, s),
        (None, false) => coupling::support_functional(instance, p, 0),
        (None, true) => Err(Error::MissingSeed("the support functional")),
    }
}

fn coupling_entry(instance: &MotInstance, p: &Coupling, seed: Option<u64>) -> Result<CouplingEntry> {
    Ok(CouplingEntry {
        matrix: matrix(p),
        support: (0..instance.mu.len()).map(|i| p.row_support(i)).collect(),
        residuals_zero: p.residuals(instance).iter().all(Zero::is_zero),
        support_dimension: Exact::from(&coupling::support_dimension(instance, p)),
        support_functional: functional(instance, p, seed)?,
    })
}

pub fn cmd_coupling(instance: &MotInstance, vertices: Option<usize>, seed: Option<u64>) -> Result<CouplingReport> {
    match vertices {
        Some(k) => {
            let seed = seed.ok_or(Error::MissingSeed("vertex sampling"))?;
            let found = coupling::sample_vertices(instance, k, seed)?;
            Ok(CouplingReport {
                mode: "vertices".into(),
                draws: Some(k),
                couplings: found.iter().map(|p| coupling_entry(instance, p, Some(seed))).collect::<Result<_>>()?,
            })
        }
        None => {
            let phat = coupling::maximal_support_coupling(instance)?;
            Ok(CouplingReport { mode: "maximal".into(), draws: None, couplings: vec![coupling_entry(instance, &phat, seed)?] })
        }
    }
}

pub fn cmd_paving(instance: &MotInstance) -> Result<PavingReport> {
    let classifier = PairClassifier::new(instance)?;
    let cm = classifier.paving();
    let classes = classifier.classify_all()?;
    let components = cm
        .components()
        .iter()
        .zip(&classifier.jmaps().per_component)
        .map(|(c, j)| ComponentRow {
            closure: vertices(&c.closure),
            dim: c.closure.dim(),
            mu_atoms: c.mu_atoms.clone(),
            nu_atoms: c.nu_atoms.clone(),
            j_lower_atoms: j.lower_atoms.clone(),
            j_upper_boundary: j.upper_boundary.as_ref().map(vertices),
        })
        .collect();
    let intervals = if instance.dim() == 1 { Some(oned::bj_decomposition(&instance.mu, &instance.nu)?.intervals) } else { None };
    Ok(PavingReport {
        maximal_coupling: matrix(&coupling::maximal_support_coupling(instance)?),
        components,
        atom_component: (0..instance.mu.len()).map(|i| cm.component_of(i)).collect(),
        polar: classes.iter().map(|r| r.iter().map(|c| c.polarity).collect()).collect(),
        max_mass: classes.iter().map(|r| r.iter().map(|c| rational::format(&c.max_mass)).collect()).collect(),
        intervals,
    })
}

fn certificate(instance: &MotInstance, cost: &CostFunction, c: &DualCertificate) -> Certificate {
    Certificate {
        phi: strings(&c.phi),
        psi: strings(&c.psi),
        h: c.h.iter().map(|r| strings(r)).collect(),
        constraint_pairs: c.constraint_set.len(),
        verified: c.verify(instance, cost),
    }
}

fn dual_entry(instance: &MotInstance, cost: &CostFunction, v: &DualValue) -> ValueEntry {
    match v {
        DualValue::Finite { value, certificate: c } => ValueEntry {
            value: Some(Exact::from(value)),
            infinite: false,
            pair: None,
            coupling: None,
            certificate: Some(certificate(instance, cost, c)),
        },
        DualValue::Infinite { pair } => {
            ValueEntry { value: None, infinite: true, pair: Some(*pair), coupling: None, certificate: None }
        }
    }
}

pub fn cmd_dual(instance: &MotInstance, cost: &CostFunction, mode: DualMode) -> Result<DualReport> {
    cost.check_shape(instance)?;
    let primal = match duality::primal_value(cost, instance)? {
        PrimalValue::Finite { value, coupling } => ValueEntry {
            value: Some(Exact::from(&value)),
            infinite: false,
            pair: None,
            coupling: Some(matrix(&coupling)),
            certificate: None,
        },
        PrimalValue::Infinite { pair } => {
            ValueEntry { value: None, infinite: true, pair: Some(pair), coupling: None, certificate: None }
        }
    };
    let pointwise = if mode != DualMode::Quasisure {
        Some(dual_entry(instance, cost, &duality::dual_value_pointwise(cost, instance)?))
    } else {
        None
    };
    let quasisure = if mode != DualMode::Pointwise {
        Some(dual_entry(instance, cost, &duality::dual_value_quasisure(cost, instance)?))
    } else {
        None
    };
    Ok(DualReport { mode, primal, pointwise, quasisure })
}

/// Grid of `steps` equal intervals over the atoms padded by one on each side,
/// merged with every breakpoint.
pub fn potential_grid(mu: &DiscreteMeasure, nu: &DiscreteMeasure, steps: usize) -> Vec<Rational> {
    let mut pts: Vec<Rational> = mu.points().chain(nu.points()).map(|p| p.coords()[0].clone()).collect();
    pts.sort();
    let lo = pts[0].clone() - rational::int(1);
    let hi = pts[pts.len() - 1].clone() + rational::int(1);
    let steps = steps.max(1);
    let h = (&hi - &lo) / rational::int(steps as i64);
    pts.extend((0..=steps).map(|k| &lo + &h * rational::int(k as i64)));
    pts.sort();
    pts.dedup();
    pts
}

/// CSV with header `t,U_mu,U_nu,gap`, twelve significant digits.
pub fn potentials_csv(mu: &DiscreteMeasure, nu: &DiscreteMeasure, steps: usize) -> Result<String> {
    let (um, un) = (oned::potential(mu)?, oned::potential(nu)?);
    let mut out = String::from("t,U_mu,U_nu,gap\n");
    for t in potential_grid(mu, nu, steps) {
        let (a, b) = (um.eval(&t), un.eval(&t));
        let gap = &b - &a;
        let cells: Vec<String> = [&t, &a, &b, &gap].iter().map(|v| rational::format_sig(rational::to_f64(v), 12)).collect();
        writeln!(out, "{}", cells.join(",")).expect("write to string");
    }
    Ok(out)
}

pub fn cmd_potentials(instance: &MotInstance, steps: usize, csv: Option<&Path>) -> Result<PotentialReport> {
    let (mu, nu) = (&instance.mu, &instance.nu);
    let (um, un) = (oned::potential(mu)?, oned::potential(nu)?);
    let mut ts: Vec<Rational> = mu.points().chain(nu.points()).map(|p| p.coords()[0].clone()).collect();
    ts.sort();
    ts.dedup();
    let order_holds = oned::potential_order(mu, nu)?;
    let (intervals, contact) = if order_holds {
        (oned::bj_decomposition(mu, nu)?.intervals, oned::contact_points(mu, nu)?)
    } else {
        (Vec::new(), Vec::new())
    };
    if let Some(path) = csv {
        std::fs::write(path, potentials_csv(mu, nu, steps)?)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(PotentialReport {
        u_mu: ts.iter().map(|t| rational::format(&um.eval(t))).collect(),
        u_nu: ts.iter().map(|t| rational::format(&un.eval(t))).collect(),
        breakpoints: strings(&ts),
        order_holds,
        intervals,
        contact_points: strings(&contact),
        grid_points: potential_grid(mu, nu, steps).len(),
    })
}

pub fn cmd_example_2_2() -> Result<ExampleReport> {
    let checks = golden::checks()?;
    Ok(ExampleReport { all_ok: checks.iter().all(|c| c.ok), checks })
}

/// Runs one command and builds its report.
pub fn run(cli: &Cli) -> Result<Report> {
    let (result, digest_of, seed) = match &cli.command {
        Command::Example22 => {
            let inst = golden::instance();
            let seed = Some(golden::SEED);
            (ReportBody::Example(cmd_example_2_2()?), digest(&inst, None), seed)
        }
        cmd => {
            let loaded = require_instance(cli)?;
            let inst = &loaded.instance;
            let seed = cli.seed.or(loaded.seed);
            let mut cost = loaded.cost.clone();
            let body = match cmd {
                Command::CheckOrder => ReportBody::CheckOrder(cmd_check_order(inst)?),
                Command::Coupling { vertices, .. } => ReportBody::Coupling(cmd_coupling(inst, *vertices, seed)?),
                Command::Paving => ReportBody::Paving(cmd_paving(inst)?),
                Command::Dual { mode } => {
                    if let Some(path) = &cli.cost {
                        cost = Some(load_cost(path)?);
                    }
                    let c = cost.as_ref().ok_or_else(|| Error::Parse("dual needs --cost or a cost table".into()))?;
                    ReportBody::Dual(cmd_dual(inst, c, *mode)?)
                }
                Command::Potentials { grid } => ReportBody::Potentials(cmd_potentials(inst, *grid, cli.csv.as_deref())?),
                Command::Example22 => unreachable!(),
            };
            (body, digest(inst, cost.as_ref()), seed)
        }
    };
    Ok(Report { command: cli.command.name().to_string(), instance_digest: digest_of, seed, result })
}

fn value_text(v: &ValueEntry) -> String {
    match (&v.value, v.pair) {
        (Some(x), _) => format!("{} (~{})", x.exact, rational::format_sig(x.float, 6)),
        (None, Some((i, j))) => format!("+inf (pair {i},{j})"),
        (None, None) => "+inf".into(),
    }
}

fn matrix_text(out: &mut String, m: &Matrix) {
    for row in m {
        let _ = writeln!(out, "    [{}]", row.join(", "));
    }
}

fn points_text(v: &[Vec<String>]) -> String {
    v.iter().map(|p| format!("({})", p.join(", "))).collect::<Vec<_>>().join(" ")
}

/// Human-readable rendering.
pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "command: {}", r.command);
    let _ = writeln!(out, "instance: {}", r.instance_digest);
    if let Some(s) = r.seed {
        let _ = writeln!(out, "seed: {s}");
    }
    match &r.result {
        ReportBody::CheckOrder(o) => {
            let _ = writeln!(out, "convex order: {}", o.holds);
            if let Some(m) = &o.coupling {
                let _ = writeln!(out, "  martingale coupling:");
                matrix_text(&mut out, m);
            }
            if let Some(w) = &o.witness {
                let _ = writeln!(out, "  convex witness f = max of:");
                for p in w {
                    let _ = writeln!(out, "    slope ({}) intercept {}", p.slope.join(", "), p.intercept);
                }
                if let (Some(a), Some(b)) = (&o.mu_f, &o.nu_f) {
                    let _ = writeln!(out, "  mu[f] = {} > nu[f] = {}", a.exact, b.exact);
                }
            }
        }
        ReportBody::Coupling(c) => {
            let _ = writeln!(out, "mode: {}", c.mode);
            if let Some(k) = c.draws {
                let _ = writeln!(out, "draws: {k}, distinct vertices: {}", c.couplings.len());
            }
            for (k, e) in c.couplings.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "coupling {k}: support dimension {} G {} residuals {}",
                    e.support_dimension.exact,
                    rational::format_sig(e.support_functional, 6),
                    if e.residuals_zero { "zero" } else { "NONZERO" }
                );
                matrix_text(&mut out, &e.matrix);
            }
        }
        ReportBody::Paving(p) => {
            let _ = writeln!(out, "maximal-support coupling:");
            matrix_text(&mut out, &p.maximal_coupling);
            for (k, c) in p.components.iter().enumerate() {
                let _ = writeln!(out, "component {k} (dim {}): ri conv {}", c.dim, points_text(&c.closure));
                let _ = writeln!(out, "  mu atoms {:?}, nu atoms in closure {:?}", c.mu_atoms, c.nu_atoms);
                let _ = writeln!(out, "  J lower adds {:?}", c.j_lower_atoms);
                match &c.j_upper_boundary {
                    Some(b) => {
                        let _ = writeln!(out, "  J upper adds conv {}", points_text(b));
                    }
                    None => {
                        let _ = writeln!(out, "  J upper adds nothing");
                    }
                }
            }
            let _ = writeln!(out, "polar matrix (P polar, . nonpolar):");
            for row in &p.polar {
                let cells: String = row.iter().map(|c| if *c == Polarity::Polar { 'P' } else { '.' }).collect();
                let _ = writeln!(out, "    {cells}");
            }
            if let Some(ivs) = &p.intervals {
                for iv in ivs {
                    let _ = writeln!(out, "interval ({}, {}) J adds left {} right {}", iv.left, iv.right, iv.left_in_j, iv.right_in_j);
                }
            }
        }
        ReportBody::Dual(d) => {
            let _ = writeln!(out, "primal sup: {}", value_text(&d.primal));
            if let Some(v) = &d.pointwise {
                let _ = writeln!(out, "pointwise dual: {}", value_text(v));
            }
            if let Some(v) = &d.quasisure {
                let _ = writeln!(out, "quasi-sure dual: {}", value_text(v));
            }
        }
        ReportBody::Potentials(p) => {
            let _ = writeln!(out, "convex order by potentials: {}", p.order_holds);
            let _ = writeln!(out, "t U_mu U_nu");
            for ((t, a), b) in p.breakpoints.iter().zip(&p.u_mu).zip(&p.u_nu) {
                let _ = writeln!(out, "  {t} {a} {b}");
            }
            for iv in &p.intervals {
                let _ = writeln!(out, "interval ({}, {}) J adds left {} right {}", iv.left, iv.right, iv.left_in_j, iv.right_in_j);
            }
            let _ = writeln!(out, "contact points: {}", p.contact_points.join(" "));
        }
        ReportBody::Example(e) => {
            for c in &e.checks {
                let mark = if c.ok { "ok  " } else { "FAIL" };
                if c.ok {
                    let _ = writeln!(out, "{mark} {}: {}", c.name, c.found);
                } else {
                    let _ = writeln!(out, "{mark} {}: expected {} found {}", c.name, c.expected, c.found);
                }
            }
            let _ = writeln!(out, "golden: {}", if e.all_ok { "all match" } else { "MISMATCH" });
        }
    }
    out
}

pub fn render(r: &Report, format: Format) -> String {
    match format {
        Format::Text => render_text(r),
        Format::Json => r.to_json(),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let outcome = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => Err(Error::Internal(format!("thread pool: {e}"))),
    };
    if cli.timing {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    match outcome {
        Ok(report) => {
            print!("{}", render(&report, cli.format));
            if report.ok() {
                0
            } else {
                eprintln!("error: golden values do not match");
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
