use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use hele_shaw::{solve_bubbles, streamlines, Error as CoreError};
use serde_json::json;

use crate::checks;
use crate::config::{BenchConfig, ConfigError, Format, RunConfig};
use crate::output;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_BAD_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hele-shaw", version, about = "Steady Hele-Shaw bubbles from slit conformal maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write outputs here instead of the config's `outputs.directory`
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Print the parsed config as TOML and exit
    #[arg(long, global = true)]
    dump_config: bool,
    /// Suppress progress output on stdout
    #[arg(long, global = true)]
    quiet: bool,
    /// Debugging aid: use T = +Φ_h instead of (1 - U)Φ_h
    #[arg(long, global = true, hide = true)]
    debug_wrong_t_scaling: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one configuration and write its outputs
    Solve { config: PathBuf },
    /// Time both map solves over a list of n
    Bench { config: PathBuf },
    /// Run the built-in invariant checks
    Validate,
}

enum Failure {
    Config(ConfigError),
    Core(CoreError),
    Io(PathBuf, std::io::Error),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(CoreError::Breakdown { .. }) => EXIT_NO_CONVERGENCE,
            _ => EXIT_BAD_INPUT,
        }
    }

    fn report(&self) {
        let (code, field, message) = match self {
            Failure::Config(e) => (e.code.to_string(), Some(e.field.clone()), e.message.clone()),
            Failure::Core(e) => (core_code(e).to_string(), None, e.to_string()),
            Failure::Io(p, e) => ("io".to_string(), Some(p.display().to_string()), e.to_string()),
        };
        match &field {
            Some(f) => eprintln!("error: {f}: {message}"),
            None => eprintln!("error: {message}"),
        }
        let report = json!({"error": {"code": code, "field": field, "message": message, "exit": self.exit_code()}});
        eprintln!("{report}");
    }
}

fn core_code(e: &CoreError) -> &'static str {
    match e {
        CoreError::Overlap { .. } => "overlap",
        CoreError::Outside { .. } => "circle_outside",
        CoreError::BadRadius { .. } => "bad_radius",
        CoreError::CountMismatch { .. } => "count_mismatch",
        CoreError::BadN { .. } => "bad_n",
        CoreError::AlphaOutside { .. } => "alpha_outside",
        CoreError::ThetaLength { .. } => "theta_length",
        CoreError::UnsupportedAngle { .. } => "unsupported_angle",
        CoreError::DifferentComponent { .. } => "different_component",
        CoreError::LengthMismatch { .. } => "length_mismatch",
        CoreError::ZeroDimension => "zero_dimension",
        CoreError::Breakdown { .. } => "breakdown",
        CoreError::PointOutside { .. } => "point_outside",
        CoreError::PoleProximity { .. } => "pole_proximity",
        CoreError::BadSpeed(_) => "bad_speed",
        CoreError::ScaleNotAllowed => "scale_not_allowed",
        CoreError::BadIndex { .. } => "bad_index",
        CoreError::BadArea(_) => "bad_area",
        CoreError::EmptyGrid { .. } => "empty_grid",
        CoreError::InvalidParameter(_) => "invalid_parameter",
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Io(path, e))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Solve { config } => solve(&cli, config),
        Command::Bench { config } => bench(&cli, config),
        Command::Validate => Ok(validate(&cli)),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            f.report();
            f.exit_code()
        }
    }
}

fn solve(cli: &Cli, path: &Path) -> Result<i32, Failure> {
    let config = RunConfig::from_toml(&read(path)?).map_err(Failure::Config)?;
    if cli.dump_config {
        print!("{}", config.to_toml());
        return Ok(EXIT_OK);
    }
    let mut problem = config.problem().map_err(Failure::Config)?;
    if cli.debug_wrong_t_scaling {
        problem.t_factor_override = Some(1.0);
    }
    let start = Instant::now();
    let solution = solve_bubbles(&problem, &config.settings()).map_err(Failure::Core)?;
    let lines = match config.streamline_settings() {
        Some(s) => Some(streamlines(&solution, &s).map_err(Failure::Core)?),
        None => None,
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let dir = cli.out_dir.clone().unwrap_or_else(|| config.outputs.directory.clone());
    fs::create_dir_all(&dir).map_err(|e| Failure::Io(dir.clone(), e))?;
    let formats = &config.outputs.formats;
    if formats.contains(&Format::Csv) {
        write(&dir, "boundary.csv", &output::boundary_csv(&solution))?;
        if let Some(l) = &lines {
            write(&dir, "streamlines.csv", &output::streamline_csv(l))?;
        }
    }
    if formats.contains(&Format::Json) {
        let summary = output::summary_json(&solution, lines.as_deref(), wall_ms);
        let text = serde_json::to_string_pretty(&summary).expect("json values serialize");
        write(&dir, "summary.json", &(text + "\n"))?;
    }
    if formats.contains(&Format::Svg) {
        write(&dir, "plot.svg", &output::svg(&solution, lines.as_deref().unwrap_or(&[])))?;
    }

    let report = solution.residual_report();
    if report.any_self_intersection() {
        eprintln!("warning: at least one bubble boundary intersects itself");
    }
    if !cli.quiet {
        println!(
            "{}: {} bubbles, n = {}, areas {:?}",
            problem.geometry.name(),
            solution.curves().len(),
            problem.n,
            solution.areas()
        );
        println!(
            "GMRES: W {} its (res {:.1e}), T {} its (res {:.1e}); max boundary residual {:.1e}; {:.0} ms",
            report.w_solve.iterations,
            report.w_solve.residual,
            report.t_solve.iterations,
            report.t_solve.residual,
            report.max_boundary_residual(),
            wall_ms
        );
        println!("outputs in {}", dir.display());
    }
    if !report.converged() {
        eprintln!("error: GMRES did not reach the tolerance within the iteration limit");
        return Ok(EXIT_NO_CONVERGENCE);
    }
    Ok(EXIT_OK)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

fn bench(cli: &Cli, path: &Path) -> Result<i32, Failure> {
    let config = BenchConfig::from_toml(&read(path)?).map_err(Failure::Config)?;
    if cli.dump_config {
        print!("{}", config.base.to_toml());
        return Ok(EXIT_OK);
    }
    let settings = config.base.settings();
    let mut csv = String::from("n,w_ms,t_ms,w_iterations,t_iterations,w_residual,t_residual\n");
    let mut all_converged = true;
    if !cli.quiet {
        println!(
            "{:>6} {:>10} {:>10} {:>6} {:>6} {:>10} {:>10}",
            "n", "W ms", "T ms", "W its", "T its", "W res", "T res"
        );
    }
    for &n in &config.bench.n_values {
        let mut base = config.base.clone();
        base.n = n;
        let problem = base.problem().map_err(Failure::Config)?;
        let (mut tw, mut tt) = (Vec::new(), Vec::new());
        let mut last = None;
        for _ in 0..config.bench.repetitions {
            let start = Instant::now();
            let w = problem.vertical_map(&settings).map_err(Failure::Core)?;
            tw.push(start.elapsed().as_secs_f64() * 1e3);
            let start = Instant::now();
            let h = problem.horizontal_map(&settings).map_err(Failure::Core)?;
            tt.push(start.elapsed().as_secs_f64() * 1e3);
            last = Some((w, h));
        }
        let (w, h) = last.expect("at least one repetition");
        let (bw, bh) = (w.bie(), h.bie());
        all_converged &= bw.converged && bh.converged;
        let (mw, mt) = (median(&mut tw), median(&mut tt));
        csv.push_str(&format!(
            "{n},{mw:.3},{mt:.3},{},{},{:.3e},{:.3e}\n",
            bw.iterations, bh.iterations, bw.residual, bh.residual
        ));
        if !cli.quiet {
            println!(
                "{n:>6} {mw:>10.1} {mt:>10.1} {:>6} {:>6} {:>10.1e} {:>10.1e}",
                bw.iterations, bh.iterations, bw.residual, bh.residual
            );
        }
    }
    let dir = cli.out_dir.clone().unwrap_or_else(|| config.base.outputs.directory.clone());
    fs::create_dir_all(&dir).map_err(|e| Failure::Io(dir.clone(), e))?;
    write(&dir, "bench.csv", &csv)?;
    Ok(if all_converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

fn validate(cli: &Cli) -> i32 {
    let t_override = cli.debug_wrong_t_scaling.then_some(1.0);
    let results = checks::validate_suite(t_override);
    for check in &results {
        if !cli.quiet || !check.passed {
            println!("{}", check.line());
        }
    }
    if results.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}
