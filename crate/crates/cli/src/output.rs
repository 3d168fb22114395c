//! CSV, JSON and SVG writers. Floats in CSV use 17 significant digits so
//! that repeated runs are byte-identical and values round-trip exactly.

use std::fmt::Write as _;

use hele_shaw::{BubbleSolution, Geometry, Streamline};
use num_complex::Complex64;
use serde_json::{json, Value};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `bubble_index,t,x,y`, one row per boundary node of each bubble.
pub fn boundary_csv(solution: &BubbleSolution) -> String {
    let mut out = String::from("bubble_index,t,x,y\n");
    for (b, curve) in solution.curves().iter().enumerate() {
        let n = curve.len();
        for (k, z) in curve.iter().enumerate() {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            writeln!(out, "{b},{},{},{}", num(t), num(z.re), num(z.im)).unwrap();
        }
    }
    out
}

/// `polyline_id,x,y,level`.
pub fn streamline_csv(lines: &[Streamline]) -> String {
    let mut out = String::from("polyline_id,x,y,level\n");
    for (id, line) in lines.iter().enumerate() {
        for z in &line.z {
            writeln!(out, "{id},{},{},{}", num(z.re), num(z.im), num(line.level)).unwrap();
        }
    }
    out
}

/// Finite JSON number, or `null`.
fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn summary_json(
    solution: &BubbleSolution,
    streamlines: Option<&[Streamline]>,
    wall_ms: f64,
) -> Value {
    let d = solution.residual_report();
    let map = |m: &hele_shaw::bubbles::MapDiagnostics| {
        json!({
            "h": m.h,
            "h_deviation": m.h_deviation,
            "gmres_iterations": m.iterations,
            "gmres_residual": m.residual,
            "converged": m.converged,
        })
    };
    let p = solution.problem();
    json!({
        "schema": 1,
        "geometry": p.geometry.name(),
        "U": p.speed,
        "n": p.n,
        "bubbles": solution.curves().len(),
        "areas": solution.areas(),
        "scale_factor": solution.scale_factor(),
        "maps": {
            "vertical": map(&d.w_solve),
            "horizontal": map(&d.t_solve),
        },
        "diagnostics": {
            "bubbles": d.bubbles.iter().map(|b| json!({
                "component": b.component,
                "std_re_w": b.std_re_w,
                "std_im_t": b.std_im_t,
                "self_intersects": b.self_intersects,
            })).collect::<Vec<_>>(),
            "wall": d.wall.map(finite),
            "contained": d.contained,
            "max_boundary_residual": d.max_boundary_residual(),
        },
        "streamlines": streamlines.map(|s| s.len()),
        "wall_clock_ms": wall_ms,
    })
}

struct View {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

impl View {
    fn new(solution: &BubbleSolution) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for z in solution.curves().iter().flatten() {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        // keep the walls in view
        match solution.problem().geometry {
            Geometry::Channel => {
                y0 = y0.min(-1.0);
                y1 = y1.max(1.0);
            }
            Geometry::HalfPlane => y0 = y0.min(0.0),
            Geometry::FreeSpace => {}
        }
        let (pw, ph) = (0.1 * (x1 - x0), 0.1 * (y1 - y0));
        Self {
            x0: x0 - pw,
            y0: y0 - ph,
            w: (x1 - x0) + 2.0 * pw,
            h: (y1 - y0) + 2.0 * ph,
        }
    }

    /// SVG coordinates with the y axis pointing up.
    fn point(&self, z: Complex64) -> String {
        format!("{:.6},{:.6}", z.re, -z.im)
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x0 + self.w && z.im >= self.y0 && z.im <= self.y0 + self.h
    }
}

/// Bubbles filled, streamlines stroked, walls as `<line>` elements.
pub fn svg(solution: &BubbleSolution, streamlines: &[Streamline]) -> String {
    let v = View::new(solution);
    let stroke = 0.003 * v.w.max(v.h);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        v.x0,
        -(v.y0 + v.h),
        v.w,
        v.h
    )
    .unwrap();
    let wall = |out: &mut String, y: f64| {
        writeln!(
            out,
            r#"<line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="black" stroke-width="{:.6}"/>"#,
            v.x0,
            -y,
            v.x0 + v.w,
            -y,
            2.0 * stroke
        )
        .unwrap();
    };
    match solution.problem().geometry {
        Geometry::Channel => {
            wall(&mut out, 1.0);
            wall(&mut out, -1.0);
        }
        Geometry::HalfPlane => wall(&mut out, 0.0),
        Geometry::FreeSpace => {}
    }
    for line in streamlines {
        let pts: Vec<String> = line.z.iter().filter(|z| v.contains(**z)).map(|&z| v.point(z)).collect();
        let d = if pts.len() >= 2 {
            format!("M{}", pts.join(" L"))
        } else {
            String::new()
        };
        writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="steelblue" stroke-width="{stroke:.6}"/>"#
        )
        .unwrap();
    }
    for curve in solution.curves() {
        let pts: Vec<String> = curve.iter().map(|&z| v.point(z)).collect();
        writeln!(
            out,
            r#"<path d="M{} Z" fill="lightgray" stroke="black" stroke-width="{stroke:.6}"/>"#,
            pts.join(" L")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
