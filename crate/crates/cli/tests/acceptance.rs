//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::path::Path;
use std::time::Instant;

use hele_shaw_cli::checks::{self, Check, Solves};

fn scale_run() -> Check {
    let name = "9 25-bubble scale run";
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/channel_25.toml");
    let out = tempfile::tempdir().expect("temporary directory");
    let start = Instant::now();
    let code = hele_shaw_cli::run([
        "hele-shaw".as_ref(),
        "solve".as_ref(),
        fixture.as_os_str(),
        "--out-dir".as_ref(),
        out.path().as_os_str(),
        "--quiet".as_ref(),
    ]);
    let secs = start.elapsed().as_secs_f64();
    let files = ["boundary.csv", "summary.json", "plot.svg", "streamlines.csv"];
    let written = files.iter().all(|f| out.path().join(f).is_file());
    Check {
        name: name.into(),
        passed: code == 0 && written && secs < 120.0,
        detail: format!("exit {code}, outputs written {written}, {secs:.1}s (26 x 512 = 13312 unknowns)"),
    }
}

fn main() {
    let mut solves = Solves::default();
    let results = [
        checks::ellipse_law(&solves),
        checks::equal_areas(&mut solves),
        checks::boundary_residuals(&mut solves),
        checks::exponential_convergence(&mut solves),
        checks::gmres_behaviour(&mut solves),
        checks::piecewise_constant_h(&mut solves),
        checks::channel_fixtures(&mut solves),
        checks::symmetry(&mut solves),
        scale_run(),
        checks::oracle_cross_checks(),
    ];
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
