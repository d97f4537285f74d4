use std::path::PathBuf;
use std::process::Command;

use uvnet::cli::run;
use uvnet::geometry::io::parse_region;
use uvnet::geometry::{Region, Verdict};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn uvnet(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("uvnet").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn region_of(text: &str) -> Region {
    parse_region(text).unwrap()
}

fn assert_same(text: &str, expected: Region) {
    assert_eq!(region_of(text).equals(&expected).unwrap(), Verdict::True, "got\n{text}");
}

#[test]
fn marginal_of_the_chain() {
    let (code, out, _) = uvnet(&["marginal", &data("chain.net"), "--nodes", "1,3"]);
    assert_eq!(code, 0);
    // 0 ≤ x1 ≤ 1, x1 ≤ x3 ≤ x1 + 2
    let expected = Region::polytope(
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![1.0, -1.0], vec![-1.0, 1.0]],
        vec![1.0, 0.0, 0.0, 2.0],
    )
    .unwrap();
    assert_same(&out, expected);
}

#[test]
fn posterior_uses_the_file_evidence() {
    let (code, out, err) = uvnet(&["posterior", &data("chain.net"), "--query", "1,3"]);
    assert_eq!(code, 0);
    assert!(err.is_empty());
    assert_same(&out, Region::boxed(vec![0.5, 1.5], vec![1.0, 2.5]).unwrap());
}

#[test]
fn file_evidence_overrides_flags_with_a_warning() {
    let (code, out, err) = uvnet(&["posterior", &data("chain.net"), "--evidence", "2=0.2", "--query", "1"]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"));
    assert_same(&out, Region::interval(0.5, 1.0));
}

#[test]
fn condition_slices_the_diamond() {
    let (code, out, _) = uvnet(&["condition", &data("diamond.net"), "--evidence", "1=1"]);
    assert_eq!(code, 0);
    assert_same(&out, Region::interval(1.5, 3.5));
}

#[test]
fn collider_separation() {
    assert_eq!(
        uvnet(&["dsep", &data("collider.net"), "--a", "1", "--b", "2"]).1,
        "separated\n"
    );
    assert_eq!(
        uvnet(&["dsep", &data("collider.net"), "--a", "1", "--b", "2", "--c", "3"]).1,
        "connected\n"
    );
}

#[test]
fn tetrahedron_independence() {
    let (code, out, _) = uvnet(&["independence", &data("tetrahedron.net"), "--mode", "total"]);
    assert_eq!(code, 0);
    assert_eq!(out, "pairwise: yes\ntotal: no\n");
}

#[test]
fn squares_estimate() {
    let (code, out, _) = uvnet(&["estimate", &data("squares.net")]);
    assert_eq!(code, 0);
    for line in [
        "status optimal",
        "objective 5",
        "x 1 1 0",
        "beta 4 4",
        "posterior",
        "EMPTY",
    ] {
        assert!(out.lines().any(|l| l == line), "missing `{line}` in\n{out}");
    }
}

#[test]
fn corridor_filter_has_two_pieces() {
    let (code, out, _) = uvnet(&["filter", &data("corridor.scn")]);
    assert_eq!(code, 0);
    let body = out.strip_prefix("step 1\n").unwrap();
    let r = region_of(body);
    assert_eq!(r.pieces().unwrap().len(), 2);
    assert!(r.contains(&[3.5, 0.4]).unwrap());
}

#[test]
fn integrator_filter_steps() {
    let (code, out, _) = uvnet(&["filter", &data("integrator.scn")]);
    assert_eq!(code, 0);
    let steps: Vec<&str> = out.split("step ").filter(|s| !s.is_empty()).collect();
    assert_eq!(steps.len(), 3);
    let last = steps[2].split_once('\n').unwrap().1;
    assert_same(last, Region::interval(1.6, 2.2));
}

#[test]
fn inconsistent_scenario_exits_with_two() {
    let path = std::env::temp_dir().join(format!("uvnet-inconsistent-{}.scn", std::process::id()));
    std::fs::write(
        &path,
        "world\n-10 10\nsensors\n0 0.1\nmotion\n0.1\nmeasurements\n1 1\n2 5\n",
    )
    .unwrap();
    let (code, out, _) = uvnet(&["filter", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 2);
    assert!(out.contains("step 2\nEMPTY"));
}

#[test]
fn vertex_dumps_for_planar_regions() {
    let (code, out, _) = uvnet(&["--format", "vertices", "filter", &data("corridor.scn")]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("vertices t=1 ")).count(), 2);
}

#[test]
fn errors_exit_with_one() {
    assert_eq!(uvnet(&["marginal", "/nonexistent/file.net", "--nodes", "1"]).0, 1);
    assert_eq!(uvnet(&["marginal", &data("chain.net"), "--nodes", "9"]).0, 1);
    assert_eq!(uvnet(&["frobnicate"]).0, 1);
    let (code, _, err) = uvnet(&["dsep", &data("collider.net"), "--a", "1", "--b", "1"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
}

#[test]
fn figures_print() {
    assert_eq!(
        uvnet(&["figures", "fig2"]).1,
        "vertices t=0 (0,2.5) (2.5,0) (5,2.5) (2.5,5)\n"
    );
    let (_, out, _) = uvnet(&["figures", "fig1"]);
    assert!(out.contains("components 2"));
    let (_, out, _) = uvnet(&["figures", "fig6"]);
    assert!(out.contains("estimate (1,0)"));
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_uvnet");
    let ok = Command::new(bin)
        .args(["dsep", &data("collider.net"), "--a", "1", "--b", "2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "separated\n");
    let bad = Command::new(bin).arg("--nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("estimate"));
}
