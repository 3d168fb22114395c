//! Co-moving streamlines: level sets of `Im T` traced on a grid over the
//! circular domain and carried into the physical plane through `z(ζ)`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::bubbles::BubbleSolution;
use crate::domain::Location;
use crate::error::{Error, Result};
use crate::slitmap::Geometry;

pub const DEFAULT_RESOLUTION: usize = 400;
pub const DEFAULT_MARGIN: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub enum Levels {
    /// Equispaced between the extremes of `Im T` on the masked grid.
    Count(usize),
    Values(Vec<f64>),
}

/// Axis-aligned viewing rectangle in the physical plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= self.y_min && z.im <= self.y_max
    }

    /// Bubble bounding box padded by half its larger side; the channel keeps
    /// its walls as the vertical limits.
    pub fn around(solution: &BubbleSolution) -> Self {
        let pts = solution.curves().iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for z in pts {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let pad = 0.5 * (x1 - x0).max(y1 - y0);
        match solution.problem().geometry {
            Geometry::FreeSpace => Self {
                x_min: x0 - pad,
                x_max: x1 + pad,
                y_min: y0 - pad,
                y_max: y1 + pad,
            },
            Geometry::HalfPlane => Self {
                x_min: x0 - pad,
                x_max: x1 + pad,
                y_min: 0.0,
                y_max: y1 + pad,
            },
            Geometry::Channel => {
                let pad = pad.max(1.0);
                Self {
                    x_min: x0 - pad,
                    x_max: x1 + pad,
                    y_min: -1.0,
                    y_max: 1.0,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamlineSettings {
    /// Grid nodes per side of `[-1, 1]²`.
    pub resolution: usize,
    pub levels: Levels,
    /// Clearance kept from every circle (and from the free-space pole).
    pub margin: f64,
    /// Move each vertex onto the exact level set along its grid edge.
    pub refine: bool,
    /// Defaults to [`Window::around`].
    pub window: Option<Window>,
}

impl Default for StreamlineSettings {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            levels: Levels::Count(20),
            margin: DEFAULT_MARGIN,
            refine: true,
            window: None,
        }
    }
}

/// One traced polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Streamline {
    pub level: f64,
    pub zeta: Vec<Complex64>,
    /// Vertex images in the physical plane, including the scale factor.
    pub z: Vec<Complex64>,
}

struct Grid {
    size: usize,
    coords: Vec<f64>,
    // Im T at unmasked nodes
    values: Vec<Option<f64>>,
}

impl Grid {
    fn at(&self, i: usize, j: usize) -> Option<f64> {
        self.values[j * self.size + i]
    }

    fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.coords[i], self.coords[j])
    }
}

/// Traces level sets of `Im T` and maps them to the physical plane.
pub fn streamlines(solution: &BubbleSolution, settings: &StreamlineSettings) -> Result<Vec<Streamline>> {
    let size = settings.resolution;
    if size < 2 || !(settings.margin > 0.0) {
        return Err(Error::InvalidParameter(
            "streamlines need resolution >= 2 and margin > 0".into(),
        ));
    }
    let window = settings.window.unwrap_or_else(|| Window::around(solution));
    let domain = &solution.problem().domain;
    let alpha = solution.problem().alpha;
    let free = solution.problem().geometry == Geometry::FreeSpace;
    let coords: Vec<f64> = (0..size)
        .map(|i| -1.0 + 2.0 * i as f64 / (size - 1) as f64)
        .collect();

    let mut idx = Vec::new();
    let mut pts = Vec::new();
    for j in 0..size {
        for i in 0..size {
            let p = Complex64::new(coords[i], coords[j]);
            let clear = domain.locate(p, settings.margin) == Location::Inside
                && !(free && (p - alpha).norm() <= settings.margin);
            if clear {
                idx.push(j * size + i);
                pts.push(p);
            }
        }
    }
    let mut values = vec![None; size * size];
    for (k, (_, t, z)) in idx.iter().zip(solution.eval(&pts)?) {
        if window.contains(z) {
            values[*k] = Some(t.im);
        }
    }
    if values.iter().all(Option::is_none) {
        return Err(Error::EmptyGrid {
            resolution: size,
            margin: settings.margin,
        });
    }
    let grid = Grid {
        size,
        coords,
        values,
    };

    let levels = match &settings.levels {
        Levels::Values(v) => v.clone(),
        Levels::Count(k) => default_levels(solution, &grid, *k),
    };

    let mut out = Vec::new();
    for &level in &levels {
        let traced = trace_level(&grid, level);
        let mut lines: Vec<Vec<Complex64>> = traced;
        if settings.refine {
            refine(solution, &grid, level, &mut lines)?;
        }
        for line in lines {
            let images: Vec<Complex64> = solution.eval(&line)?.into_iter().map(|(_, _, z)| z).collect();
            // split where the image leaves the window
            let mut cur_zeta = Vec::new();
            let mut cur_z = Vec::new();
            for (zeta, z) in line.into_iter().zip(images) {
                if window.contains(z) {
                    cur_zeta.push(zeta);
                    cur_z.push(z);
                } else if !cur_z.is_empty() {
                    push_line(&mut out, level, std::mem::take(&mut cur_zeta), std::mem::take(&mut cur_z));
                }
            }
            push_line(&mut out, level, cur_zeta, cur_z);
        }
    }
    Ok(out)
}

fn push_line(out: &mut Vec<Streamline>, level: f64, zeta: Vec<Complex64>, z: Vec<Complex64>) {
    if z.len() >= 2 {
        out.push(Streamline { level, zeta, z });
    }
}

/// `count` equispaced interior levels, dropping those within one typical
/// grid-cell change of `Im T` from a bubble's streamline value.
fn default_levels(solution: &BubbleSolution, grid: &Grid, count: usize) -> Vec<f64> {
    let vals: Vec<f64> = grid.values.iter().flatten().copied().collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut steps: Vec<f64> = (0..grid.size - 1)
        .flat_map(|j| (0..grid.size).map(move |i| (i, j)))
        .filter_map(|(i, j)| Some((grid.at(i, j)? - grid.at(i, j + 1)?).abs()))
        .collect();
    steps.sort_by(f64::total_cmp);
    let cell = steps.get(steps.len() / 2).copied().unwrap_or(0.0);
    let n = solution.problem().n;
    let t = solution.boundary_t();
    let slits: Vec<f64> = solution
        .problem()
        .bubble_components()
        .map(|j| t[j * n].im)
        .collect();
    (1..=count)
        .map(|i| lo + (hi - lo) * i as f64 / (count + 1) as f64)
        .filter(|l| slits.iter().all(|s| (l - s).abs() > cell))
        .collect()
}

#[derive(Clone, Copy)]
struct EdgeHit {
    // grid endpoints of the crossed edge
    a: (usize, usize),
    b: (usize, usize),
}

fn edge_id(size: usize, e: EdgeHit) -> usize {
    let (i, j) = e.a;
    let vertical = e.b.1 != j;
    2 * (j * size + i) + usize::from(vertical)
}

/// Marching squares over cells with four unmasked corners, stitched into
/// polylines in `ζ`. Closed loops repeat their first vertex at the end.
fn trace_level(grid: &Grid, level: f64) -> Vec<Vec<Complex64>> {
    let size = grid.size;
    let mut segments: Vec<(usize, usize)> = Vec::new();
    let mut hits: HashMap<usize, EdgeHit> = HashMap::new();
    for j in 0..size - 1 {
        for i in 0..size - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let Some(v) = corners
                .iter()
                .map(|&(a, b)| grid.at(a, b))
                .collect::<Option<Vec<f64>>>()
            else {
                continue;
            };
            let inside: Vec<bool> = v.iter().map(|&x| x >= level).collect();
            // edges: 0 bottom, 1 right, 2 top, 3 left
            let edges = [
                (corners[0], corners[1], 0, 1),
                (corners[1], corners[2], 1, 2),
                (corners[3], corners[2], 3, 2),
                (corners[0], corners[3], 0, 3),
            ];
            let crossing: Vec<usize> = (0..4)
                .filter(|&e| inside[edges[e].2] != inside[edges[e].3])
                .collect();
            let mut register = |e: usize| {
                let hit = EdgeHit {
                    a: edges[e].0,
                    b: edges[e].1,
                };
                let id = edge_id(size, hit);
                hits.insert(id, hit);
                id
            };
            match crossing.len() {
                2 => {
                    let s = (register(crossing[0]), register(crossing[1]));
                    segments.push(s);
                }
                4 => {
                    let center = v.iter().sum::<f64>() / 4.0 >= level;
                    // isolate corners whose state differs from the center
                    let corner_edges = [(3, 0), (0, 1), (1, 2), (2, 3)];
                    for (c, &(e1, e2)) in corner_edges.iter().enumerate() {
                        if inside[c] != center {
                            let s = (register(e1), register(e2));
                            segments.push(s);
                        }
                    }
                }
                _ => {}
            }
        }
    }

    let position = |id: usize| {
        let h = hits[&id];
        let va = grid.at(h.a.0, h.a.1).expect("unmasked");
        let vb = grid.at(h.b.0, h.b.1).expect("unmasked");
        let s = if va == vb { 0.5 } else { (level - va) / (vb - va) };
        grid.point(h.a.0, h.a.1) + (grid.point(h.b.0, h.b.1) - grid.point(h.a.0, h.a.1)) * s
    };

    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        adjacency.entry(a).or_default().push(k);
        adjacency.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let mut starts: Vec<usize> = adjacency
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(&id, _)| id)
        .collect();
    starts.sort_unstable();
    let mut all_ids: Vec<usize> = adjacency.keys().copied().collect();
    all_ids.sort_unstable();
    starts.extend(all_ids);
    for start in starts {
        let Some(&first) = adjacency[&start].iter().find(|&&k| !used[k]) else {
            continue;
        };
        let mut ids = vec![start];
        let mut cur = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == cur { b } else { a };
            ids.push(next);
            cur = next;
            match adjacency[&cur].iter().find(|&&k| !used[k]) {
                Some(&k) => seg = k,
                None => break,
            }
        }
        lines.push(ids.into_iter().map(position).collect());
    }
    lines
}

/// Regula falsi (Illinois variant) along each vertex's grid edge, batched so
/// that every sweep costs one evaluation per vertex.
fn refine(solution: &BubbleSolution, grid: &Grid, level: f64, lines: &mut [Vec<Complex64>]) -> Result<()> {
    let h = 2.0 / (grid.size - 1) as f64;
    let domain = &solution.problem().domain;
    struct Bracket {
        line: usize,
        vertex: usize,
        lo: Complex64,
        hi: Complex64,
        f_lo: f64,
        f_hi: f64,
    }
    let mut brackets = Vec::new();
    for (li, line) in lines.iter().enumerate() {
        for (vi, &p) in line.iter().enumerate() {
            // recover the edge: the vertex lies on a grid line
            let gx = (p.re + 1.0) / h;
            let gy = (p.im + 1.0) / h;
            let on_x = (gx - gx.round()).abs() < 1e-9;
            let (a, b) = if on_x {
                let i = gx.round() as usize;
                let j = gy.floor().min((grid.size - 2) as f64) as usize;
                ((i, j), (i, j + 1))
            } else {
                let j = gy.round() as usize;
                let i = gx.floor().min((grid.size - 2) as f64) as usize;
                ((i, j), (i + 1, j))
            };
            let (Some(va), Some(vb)) = (grid.at(a.0, a.1), grid.at(b.0, b.1)) else {
                continue;
            };
            let (f_lo, f_hi) = (va - level, vb - level);
            if f_lo == 0.0 || f_hi == 0.0 || f_lo.signum() == f_hi.signum() {
                continue;
            }
            brackets.push(Bracket {
                line: li,
                vertex: vi,
                lo: grid.point(a.0, a.1),
                hi: grid.point(b.0, b.1),
                f_lo,
                f_hi,
            });
        }
    }
    let mut side = vec![0i8; brackets.len()];
    for _ in 0..30 {
        let trial: Vec<Complex64> = brackets
            .iter()
            .map(|b| b.lo + (b.hi - b.lo) * (b.f_lo / (b.f_lo - b.f_hi)))
            .collect();
        if trial.iter().any(|&p| domain.locate(p, 0.0) != Location::Inside) {
            break;
        }
        let vals = solution.eval(&trial)?;
        let mut done = true;
        for (k, (b, (_, t, _))) in brackets.iter_mut().zip(vals).enumerate() {
            let f = t.im - level;
            if f.abs() > 1e-13 * (1.0 + level.abs()) {
                done = false;
            }
            if f.signum() == b.f_lo.signum() {
                b.lo = trial[k];
                b.f_lo = f;
                if side[k] == -1 {
                    b.f_hi *= 0.5;
                }
                side[k] = -1;
            } else {
                b.hi = trial[k];
                b.f_hi = f;
                if side[k] == 1 {
                    b.f_lo *= 0.5;
                }
                side[k] = 1;
            }
            lines[b.line][b.vertex] = trial[k];
        }
        if done {
            break;
        }
    }
    Ok(())
}
