use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hele_shaw_cli::config::RunConfig;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn hele_shaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hele-shaw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

const SMALL_CHANNEL: &str = r#"
geometry = "channel"
U = 2.0
alpha = [-0.5, 0.0]
n = 64

[streamlines]
grid = 60
count = 6

[[circles]]
center = [0.0, 0.03]
radius = 0.2

[[circles]]
center = [0.6, 0.15]
radius = 0.25
"#;

#[test]
fn free_space_pair_scales_both_bubbles_to_pi() {
    let dir = tempfile::tempdir().unwrap();
    let out = hele_shaw(&[
        "solve",
        fixture("free_space_pair.toml").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema"], 1);
    for a in summary["areas"].as_array().unwrap() {
        assert!((a.as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-8);
    }
    assert!(summary["maps"]["vertical"]["gmres_iterations"].as_u64().unwrap() > 0);
}

#[test]
fn unknown_geometry_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL_CHANNEL.replace("\"channel\"", "\"torus\""));
    let out = hele_shaw(&["solve", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("geometry") && err.contains("torus"), "{err}");
}

#[test]
fn channel_scale_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL_CHANNEL}\n[scale]\nbubble = 0\narea = 1.0\n"));
    let out = hele_shaw(&["solve", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("scale_not_allowed"), "{}", stderr(&out));
}

#[test]
fn unknown_subcommand_prints_usage() {
    let out = hele_shaw(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("Usage"), "{}", stderr(&out));
}

#[test]
fn wrong_t_scaling_fails_validation() {
    let out = hele_shaw(&["validate", "--debug-wrong-t-scaling", "--quiet"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL wall residuals"));
}

#[test]
fn validate_passes() {
    let out = hele_shaw(&["validate"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn dumped_config_reparses_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_CHANNEL);
    let out = hele_shaw(&["solve", cfg.to_str().unwrap(), "--dump-config"]);
    assert_eq!(out.status.code(), Some(0));
    let dumped = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        RunConfig::from_toml(&dumped).unwrap(),
        RunConfig::from_toml(SMALL_CHANNEL).unwrap()
    );
}

#[test]
fn repeated_runs_write_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_CHANNEL);
    let mut bytes = Vec::new();
    for k in 0..2 {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = hele_shaw(&["solve", cfg.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap(), "--quiet"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        bytes.push((
            fs::read(out_dir.join("boundary.csv")).unwrap(),
            fs::read(out_dir.join("streamlines.csv")).unwrap(),
        ));
    }
    assert_eq!(bytes[0], bytes[1]);
    let csv = String::from_utf8(bytes[0].0.clone()).unwrap();
    assert!(csv.starts_with("bubble_index,t,x,y\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 64);
}

#[test]
fn svg_has_one_path_per_bubble_and_streamline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_CHANNEL);
    let out = hele_shaw(&["solve", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).expect("well-formed XML");
    let paths = doc.descendants().filter(|n| n.has_tag_name("path")).count();
    let polylines: std::collections::BTreeSet<String> = fs::read_to_string(dir.path().join("streamlines.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(paths, 2 + polylines.len());
    let walls = doc.descendants().filter(|n| n.has_tag_name("line")).count();
    assert_eq!(walls, 2);
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL_CHANNEL}\n[solver]\nmax_iterations = 2\n"));
    let out = hele_shaw(&["solve", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn bench_with_one_n_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL_CHANNEL}\n[bench]\nn_values = [64]\nrepetitions = 1\n"));
    let out = hele_shaw(&["bench", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("64,"));
}

#[test]
fn every_shipped_fixture_parses() {
    for entry in fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let parsed = if text.contains("[bench]") {
            hele_shaw_cli::config::BenchConfig::from_toml(&text).map(|_| ())
        } else {
            RunConfig::from_toml(&text).map(|_| ())
        };
        assert!(parsed.is_ok(), "{}: {:?}", path.display(), parsed);
    }
}
