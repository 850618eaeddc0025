use std::fs;
use std::path::Path;
use std::process::Command;

use spectral_uncertainty::closed_form::star_gamma;
use spectral_uncertainty_cli::run;

fn specunc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_specunc")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn args<'a>(v: &'a [&'a str], out: &'a Path) -> Vec<&'a str> {
    let mut a = vec!["specunc"];
    a.extend_from_slice(v);
    a.push("--output");
    a.push(out.to_str().unwrap());
    a
}

#[test]
fn star_curve_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("star.json");
    let argv = ["curve", "--generate", "star:10", "--center", "0", "--epsilon", "1e-6", "--format", "json"];
    assert_eq!(run(args(&argv, &path)), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["metadata"]["u0"], 0);
    assert_eq!(v["metadata"]["n"], 10);
    let gap = v["gap"].as_f64().unwrap();
    assert!(gap <= 1e-6, "gap {gap}");
    for k in v["knots"].as_array().unwrap() {
        let (s, g) = (k["s"].as_f64().unwrap(), k["g"].as_f64().unwrap());
        assert!((g - star_gamma(s.clamp(0.0, 2.0)).unwrap()).abs() < 1e-8, "knot ({s}, {g})");
    }
}

#[test]
fn impulse_point() {
    let (code, out, _) = specunc(&["point", "--generate", "complete:4", "--center", "0", "--s", "1.0"]);
    assert_eq!(code, 0);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|t| t.parse().unwrap()).collect();
    assert!(row[1] <= 0.0 && 0.0 <= row[2], "{row:?}");
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.edges");
    let argv = ["generate", "--generate", "er:100:0.1", "--seed", "7"];
    assert_eq!(run(args(&argv, &path)), 0);
    let first = fs::read(&path).unwrap();
    assert_eq!(run(args(&argv, &path)), 0);
    assert_eq!(first, fs::read(&path).unwrap());
    assert!(!first.is_empty());
}

fn polylines(svg: &str) -> Vec<String> {
    let doc = roxmltree::Document::parse(svg).unwrap();
    assert_eq!(doc.root_element().attribute("version"), Some("1.1"));
    doc.descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .map(|n| n.attribute("class").unwrap().to_string())
        .collect()
}

#[test]
fn svg_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("c.svg");
    assert_eq!(run(args(&["curve", "--generate", "star:10", "--rounds", "5", "--format", "svg"], &curve)), 0);
    let svg = fs::read_to_string(&curve).unwrap();
    assert_eq!(polylines(&svg), ["upper", "lower"]);
    assert!(svg.contains("Δ²_s") && svg.contains("Δ²_{g,u0}"));

    let overlay = dir.path().join("d.svg");
    assert_eq!(run(args(&["diffusion", "--generate", "cycle:12", "--points", "40", "--format", "svg"], &overlay)), 0);
    assert_eq!(polylines(&fs::read_to_string(&overlay).unwrap()), ["upper", "lower", "diffusion"]);
}

#[test]
fn csv_outputs() {
    let (code, out, _) = specunc(&["curve", "--generate", "complete:5", "--rounds", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "alpha,s,g");
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines[1].starts_with("-inf,") && lines[9].starts_with("inf,"));

    let (code, out, _) = specunc(&["diffusion", "--generate", "grid:4:3", "--points", "30"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("t,s,g"));
    assert_eq!(out.lines().count(), 1 + 31);

    let (code, out, _) = specunc(&["oracle", "--family", "complete:4", "--points", "8"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("s,gamma"));
    assert_eq!(out.lines().count(), 10);

    let (code, out, _) = specunc(&["er-expected", "--n", "1000", "--p", "0.05", "--epsilon", "1e-4", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["gap"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn spreads_of_a_signal() {
    let dir = tempfile::tempdir().unwrap();
    let signal = dir.path().join("x.txt");
    fs::write(&signal, "# impulse at the hub\n1\n0\n0\n0\n0\n").unwrap();
    let (code, out, _) = specunc(&["spreads", "--generate", "star:5", "--signal", signal.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["g"], 0.0);
    assert!((v["s"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(v["global"]["center"], 0);
}

#[test]
fn edge_list_input() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("path.edges");
    fs::write(&edges, "# path\n0 1\n1 2\n2 3\n").unwrap();
    let (code, out, _) = specunc(&["curve", "--input", edges.to_str().unwrap(), "--center", "1", "--rounds", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 5);
}

#[test]
fn exit_codes() {
    assert_eq!(specunc(&["frobnicate"]).0, 1);
    assert_eq!(specunc(&["curve", "--generate", "star:5", "--input", "x.edges"]).0, 1);
    assert_eq!(specunc(&["curve"]).0, 1);
    assert_eq!(specunc(&["curve", "--generate", "star:5", "--epsilon", "-1"]).0, 1);
    assert_eq!(specunc(&["curve", "--generate", "star:5", "--center", "9"]).0, 1);
    assert_eq!(specunc(&["point", "--generate", "star:5", "--s", "1", "--format", "svg"]).0, 1);
    assert_eq!(specunc(&["oracle", "--family", "complete:2"]).0, 1);
    assert_eq!(specunc(&["--help"]).0, 0);
    // the tail of a very sparse graph does not converge
    let (code, _, err) = specunc(&["er-expected", "--n", "1000", "--p", "1e-9"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}
