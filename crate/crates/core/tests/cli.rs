use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use motpave::cli::{Report, ReportBody};
use motpave::duality::PiecewiseAffineConvex;
use motpave::rational::{parse, Rational};
use motpave::{DiscreteMeasure, Point};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motpave")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn golden_command_passes_and_is_stable() {
    let a = run(&["example-2-2", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&["example-2-2", "--format", "json", "--jobs", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let report = Report::from_json(&stdout(&a)).unwrap();
    assert_eq!(report.to_json(), stdout(&a));
    let ReportBody::Example(e) = report.result else { panic!("wrong report kind") };
    assert!(e.all_ok);
    assert!(e.checks.iter().any(|c| c.name == "vertices" && c.found == "{P1, P2}"));

    let text = run(&["example-2-2"]);
    assert!(stdout(&text).contains("golden: all match"));
}

#[test]
fn reversed_pair_ships_a_witness() {
    let o = run(&["check-order", "--instance", data("not_ordered.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let ReportBody::CheckOrder(r) = Report::from_json(&stdout(&o)).unwrap().result else { panic!("wrong report kind") };
    assert!(!r.holds);
    let pieces = r
        .witness
        .unwrap()
        .iter()
        .map(|p| (p.slope.iter().map(|s| parse(s).unwrap()).collect(), parse(&p.intercept).unwrap()))
        .collect();
    let f = PiecewiseAffineConvex::new(pieces).unwrap();
    let mu = DiscreteMeasure::from_pairs(vec![
        (Point::from_ints(&[-1]), motpave::rational::ratio(1, 2)),
        (Point::from_ints(&[1]), motpave::rational::ratio(1, 2)),
    ])
    .unwrap();
    let nu = DiscreteMeasure::dirac(Point::from_ints(&[0]));
    let (mf, nf) = (mu.integrate(|x| f.eval(x)), nu.integrate(|y| f.eval(y)));
    assert!(mf > nf);
    assert_eq!(parse(&r.mu_f.unwrap().exact).unwrap(), mf);
    assert_eq!(parse(&r.nu_f.unwrap().exact).unwrap(), nf);
}

#[test]
fn potentials_csv_gap_is_positive_inside_the_interval() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let o = run(&["potentials", "--instance", data("split.json").to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,U_mu,U_nu,gap"));
    let mut rows = 0;
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (t, gap) = (cells[0], cells[3]);
        assert_eq!(gap > 0.0, -1.0 < t && t < 1.0, "row {line}");
        rows += 1;
    }
    assert!(rows > 50);
}

#[test]
fn domain_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_mass = write(dir.path(), "m.json", r#"{"dim": 1, "mu": [{"point": ["0"], "mass": "1/3"}], "nu": [{"point": ["0"], "mass": "1"}]}"#);
    let o = run(&["check-order", "--instance", &bad_mass]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sum"));

    let unknown_key = write(dir.path(), "k.json", r#"{"dim": 1, "mu": [], "nu": [], "extra": 1}"#);
    assert_eq!(run(&["paving", "--instance", &unknown_key]).status.code(), Some(2));

    let not_ordered = data("not_ordered.json");
    assert_eq!(run(&["paving", "--instance", not_ordered.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["paving"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn sampling_without_a_seed_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let golden = std::fs::read_to_string(data("example22.json")).unwrap();
    let unseeded = golden.replace(",\n  \"seed\": 22", "");
    assert!(!unseeded.contains("seed"));
    let path = write(dir.path(), "g.json", &unseeded);
    let o = run(&["coupling", "--vertices", "10", "--instance", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    // the maximal coupling has a two-dimensional row, so G needs the seed too
    assert_eq!(run(&["coupling", "--maximal", "--instance", &path]).status.code(), Some(2));
    let o = run(&["coupling", "--vertices", "10", "--instance", &path, "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn decimals_and_fractions_give_the_same_instance() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"dim": 1, "mu": [{"point": ["0"], "mass": "1"}],
        "nu": [{"point": ["-0.5"], "mass": "0.25"}, {"point": ["1/6"], "mass": "3/4"}]}"#);
    let b = write(dir.path(), "b.json", r#"{"dim": 1, "mu": [{"point": ["0.0"], "mass": "1/1"}],
        "nu": [{"point": ["-1/2"], "mass": "1/4"}, {"point": ["2/12"], "mass": "0.75"}]}"#);
    let ra = run(&["check-order", "--instance", &a, "--format", "json"]);
    let rb = run(&["check-order", "--instance", &b, "--format", "json"]);
    assert_eq!(ra.status.code(), Some(0));
    assert_eq!(ra.stdout, rb.stdout);
}

fn exact_strings(v: &serde_json::Value, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Object(m) => {
            for (k, x) in m {
                if k == "exact" {
                    out.push(x.as_str().unwrap().to_string());
                } else {
                    exact_strings(x, out);
                }
            }
        }
        serde_json::Value::Array(a) => a.iter().for_each(|x| exact_strings(x, out)),
        _ => {}
    }
}

#[test]
fn every_report_round_trips() {
    let g = data("example22.json");
    let g = g.to_str().unwrap();
    for args in [
        vec!["check-order", "--instance", g],
        vec!["coupling", "--maximal", "--instance", g],
        vec!["coupling", "--vertices", "25", "--instance", g],
        vec!["paving", "--instance", g],
        vec!["dual", "--instance", g],
        vec!["dual", "--instance", g, "--mode", "quasisure"],
    ] {
        let mut args = args.clone();
        args.extend(["--format", "json"]);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        let report = Report::from_json(&text).unwrap();
        assert_eq!(report.to_json(), text, "{args:?}");
        assert_eq!(run(&args).stdout, o.stdout, "{args:?} not deterministic");
        let mut exact = Vec::new();
        exact_strings(&serde_json::from_str(&text).unwrap(), &mut exact);
        for s in exact {
            let r: Rational = parse(&s).unwrap();
            assert_eq!(motpave::rational::format(&r), s);
        }
        let text_mode = run(&args[..args.len() - 2]);
        assert_eq!(text_mode.status.code(), Some(0));
    }
}

#[test]
fn separate_cost_file_overrides_the_instance() {
    let dir = tempfile::tempdir().unwrap();
    let cost = write(dir.path(), "c.json", r#"[["1", "0", "0", "0"], ["0", "0", "0", "0"]]"#);
    let o = run(&["dual", "--instance", data("example22.json").to_str().unwrap(), "--cost", &cost, "--format", "json"]);
    let ReportBody::Dual(d) = Report::from_json(&stdout(&o)).unwrap().result else { panic!("wrong report kind") };
    assert_eq!(d.primal.value.unwrap().exact, "1/2");
    assert_eq!(d.pointwise.unwrap().value.unwrap().exact, "1/2");
    assert!(d.quasisure.unwrap().certificate.unwrap().verified);
}
