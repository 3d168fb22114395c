//! Browser bindings: solve a bubble configuration, check a circle layout while
//! it is being edited, and load the preset layouts. Results cross the wasm
//! boundary as JSON strings so the page needs no generated type definitions.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

use hele_shaw::{
    solve_bubbles, streamlines, BubbleProblem, CircularDomain, Geometry, GmresSettings, Levels,
    StreamlineSettings, DEFAULT_MIN_GAP,
};
use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn geometry(name: &str) -> Result<Geometry, String> {
    match name {
        "free_space" => Ok(Geometry::FreeSpace),
        "half_plane" => Ok(Geometry::HalfPlane),
        "channel" => Ok(Geometry::Channel),
        other => Err(format!("unknown geometry {other:?}")),
    }
}

/// `circles` is a flat list of `(x, y, r)` triples.
fn domain(circles: &[f64]) -> Result<CircularDomain, String> {
    if circles.len() % 3 != 0 {
        return Err("circles must be given as (x, y, r) triples".into());
    }
    let centers = circles.chunks(3).map(|c| Complex64::new(c[0], c[1])).collect();
    let radii = circles.chunks(3).map(|c| c[2]).collect();
    CircularDomain::new(centers, radii, DEFAULT_MIN_GAP).map_err(|e| e.to_string())
}

fn flat(points: &[Complex64]) -> Vec<f64> {
    points.iter().flat_map(|z| [z.re, z.im]).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn solve_value(
    geometry_name: &str,
    circles: &[f64],
    speed: f64,
    alpha_re: f64,
    alpha_im: f64,
    n: usize,
    streamline_count: usize,
    grid: usize,
) -> Result<Value, String> {
    let problem = BubbleProblem::new(
        geometry(geometry_name)?,
        domain(circles)?,
        speed,
        Complex64::new(alpha_re, alpha_im),
        n,
    );
    let solution = solve_bubbles(&problem, &GmresSettings::default()).map_err(|e| e.to_string())?;
    let lines = if streamline_count > 0 {
        let settings = StreamlineSettings {
            resolution: grid,
            levels: Levels::Count(streamline_count),
            ..Default::default()
        };
        streamlines(&solution, &settings).map_err(|e| e.to_string())?
    } else {
        Vec::new()
    };
    let report = solution.residual_report();
    Ok(json!({
        "bubbles": solution.curves().iter().map(|c| flat(c)).collect::<Vec<_>>(),
        "streamlines": lines.iter().map(|l| json!({"level": l.level, "xy": flat(&l.z)})).collect::<Vec<_>>(),
        "areas": solution.areas(),
        "iterations": [report.w_solve.iterations, report.t_solve.iterations],
        "residual": report.max_boundary_residual(),
        "converged": report.converged(),
    }))
}

fn to_json(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Solves a configuration; returns `{bubbles, streamlines, areas, ...}` or
/// `{error}`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn solve(
    geometry_name: &str,
    circles: &[f64],
    speed: f64,
    alpha_re: f64,
    alpha_im: f64,
    n: usize,
    streamline_count: usize,
    grid: usize,
) -> String {
    to_json(solve_value(geometry_name, circles, speed, alpha_re, alpha_im, n, streamline_count, grid))
}

/// Empty string when the circles form a valid domain, otherwise the reason.
#[wasm_bindgen]
pub fn check_domain(circles: &[f64]) -> String {
    domain(circles).err().unwrap_or_default()
}

/// Preset layouts as `{geometry, alpha, circles}`.
#[wasm_bindgen]
pub fn preset(name: &str) -> String {
    let (g, alpha, circles): (&str, [f64; 2], Vec<f64>) = match name {
        "free_space_pair" => ("free_space", [0.0, 0.4f64.sqrt()], vec![0.0, 0.0, 0.4]),
        "half_plane_pair" => (
            "half_plane",
            [0.0, 0.0],
            vec![0.0, 0.5009, 0.0558, 0.0, 0.3277, 0.1003],
        ),
        "channel_three" => (
            "channel",
            [-0.5, 0.0],
            vec![0.0, 0.0, 0.18, 0.6, 0.23, 0.22, 0.2, 0.63, 0.195],
        ),
        "channel_four" => (
            "channel",
            [-0.5, 0.0],
            vec![0.0, 0.0, 0.19, 0.6, 0.23, 0.235, 0.2, 0.63, 0.2, 0.4, -0.25, 0.175],
        ),
        _ => ("channel", [-0.5, 0.0], vec![0.0, 0.03, 0.2, 0.6, 0.15, 0.25]),
    };
    json!({ "geometry": g, "alpha": alpha, "circles": circles }).to_string()
}
