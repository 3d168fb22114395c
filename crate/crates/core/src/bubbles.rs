//! Bubble shapes from the fixed-frame and co-moving complex potentials.
//!
//! `W` is the slit map with vertical slits on the bubble circles; `T` is
//! `(1 - U)` times the map with all slits horizontal, which gives the co-moving
//! potential its far-field behaviour `(1 - U) z`. The physical map is
//! `z = (W - T) / U`.

use std::f64::consts::FRAC_PI_2;
use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::bie::std_dev;
use crate::domain::CircularDomain;
use crate::error::{Error, Result};
use crate::gmres::GmresSettings;
use crate::kernel::ThetaSpec;
use crate::slitmap::{eval_maps, Geometry, MapOptions, SlitMap};
use crate::spectral::Spectral;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleTarget {
    pub bubble: usize,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BubbleProblem {
    pub geometry: Geometry,
    pub domain: CircularDomain,
    /// Bubble speed `U`, in units of the far-field speed.
    pub speed: f64,
    pub alpha: Complex64,
    pub n: usize,
    pub scale: Option<ScaleTarget>,
    pub map_options: MapOptions,
    /// Replaces the `1 - U` factor on the horizontal-slit map. Only for
    /// checking that the diagnostics catch a wrong scaling.
    pub t_factor_override: Option<f64>,
}

impl BubbleProblem {
    pub fn new(geometry: Geometry, domain: CircularDomain, speed: f64, alpha: Complex64, n: usize) -> Self {
        Self {
            geometry,
            domain,
            speed,
            alpha,
            n,
            scale: None,
            map_options: MapOptions::default(),
            t_factor_override: None,
        }
    }

    pub fn with_scale(mut self, bubble: usize, area: f64) -> Self {
        self.scale = Some(ScaleTarget { bubble, area });
        self
    }

    /// Boundary components that are bubbles.
    pub fn bubble_components(&self) -> RangeInclusive<usize> {
        bubble_components(self.geometry, self.domain.m())
    }

    pub fn bubble_count(&self) -> usize {
        self.bubble_components().count()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed > 1.0) || !self.speed.is_finite() {
            return Err(Error::BadSpeed(self.speed));
        }
        if let Some(target) = self.scale {
            check_scale(self.geometry, target.bubble, target.area, self.bubble_count())?;
        }
        if self.geometry != Geometry::FreeSpace && self.domain.m() == 0 {
            return Err(Error::InvalidParameter(format!(
                "the {} geometry needs at least one inner circle",
                self.geometry.name()
            )));
        }
        Ok(())
    }

    fn build_map(&self, theta: ThetaSpec, settings: &GmresSettings) -> Result<SlitMap> {
        SlitMap::build(
            self.geometry,
            &self.domain,
            self.n,
            self.alpha,
            theta,
            settings,
            self.map_options,
        )
    }

    /// The map behind `W`: vertical slits on every bubble (and a horizontal
    /// outer slit in free space, where `C_0` is a bubble too).
    pub fn vertical_map(&self, settings: &GmresSettings) -> Result<SlitMap> {
        let outer = match self.geometry {
            Geometry::FreeSpace => FRAC_PI_2,
            _ => 0.0,
        };
        self.build_map(ThetaSpec::split(self.domain.components(), outer, FRAC_PI_2), settings)
    }

    /// The all-horizontal map, `T / (1 - U)`.
    pub fn horizontal_map(&self, settings: &GmresSettings) -> Result<SlitMap> {
        self.build_map(ThetaSpec::uniform(self.domain.components(), 0.0), settings)
    }

    fn t_factor(&self) -> f64 {
        self.t_factor_override.unwrap_or(1.0 - self.speed)
    }
}

/// Components carrying bubbles: all of them in free space, the inner circles
/// otherwise.
pub fn bubble_components(geometry: Geometry, m: usize) -> RangeInclusive<usize> {
    match geometry {
        Geometry::FreeSpace => 0..=m,
        _ => 1..=m,
    }
}

fn check_scale(geometry: Geometry, bubble: usize, area: f64, count: usize) -> Result<()> {
    if geometry == Geometry::Channel {
        return Err(Error::ScaleNotAllowed);
    }
    if bubble >= count {
        return Err(Error::BadIndex { index: bubble, count });
    }
    if !(area > 0.0) || !area.is_finite() {
        return Err(Error::BadArea(area));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct BubbleSolution {
    problem: BubbleProblem,
    w: SlitMap,
    horizontal: SlitMap,
    t_factor: f64,
    /// `z` on each bubble boundary, already multiplied by `scale_factor`.
    curves: Vec<Vec<Complex64>>,
    areas: Vec<f64>,
    scale_factor: f64,
}

/// Computes both maps and the bubble curves; applies the problem's scale
/// target if present.
pub fn solve_bubbles(problem: &BubbleProblem, settings: &GmresSettings) -> Result<BubbleSolution> {
    problem.validate()?;
    let w = problem.vertical_map(settings)?;
    let horizontal = problem.horizontal_map(settings)?;
    let t_factor = problem.t_factor();
    let n = problem.n;
    let curves: Vec<Vec<Complex64>> = problem
        .bubble_components()
        .map(|j| {
            (j * n..(j + 1) * n)
                .map(|k| (w.boundary_phi()[k] - t_factor * horizontal.boundary_phi()[k]) / problem.speed)
                .collect()
        })
        .collect();
    let areas = bubble_areas(&curves);
    let mut solution = BubbleSolution {
        problem: problem.clone(),
        w,
        horizontal,
        t_factor,
        curves,
        areas,
        scale_factor: 1.0,
    };
    if let Some(target) = problem.scale {
        solution = rescale_to_area(&solution, target.bubble, target.area)?;
    }
    Ok(solution)
}

/// Green's-theorem areas `Re[(i/2) ∮ conj(z) dz]` of closed curves sampled
/// at equispaced parameters, with `dz/dt` from spectral differentiation.
/// Clockwise curves give positive areas.
pub fn bubble_areas(curves: &[Vec<Complex64>]) -> Vec<f64> {
    curves
        .iter()
        .map(|curve| {
            let n = curve.len();
            let dz = Spectral::new(n).derivative(curve);
            let sum: Complex64 = curve.iter().zip(&dz).map(|(z, d)| z.conj() * d).sum();
            (Complex64::i() * 0.5 * sum * (std::f64::consts::TAU / n as f64)).re
        })
        .collect()
}

/// Multiplies every curve by `sqrt(target / A_bubble)`.
pub fn rescale_to_area(solution: &BubbleSolution, bubble: usize, target: f64) -> Result<BubbleSolution> {
    check_scale(
        solution.problem.geometry,
        bubble,
        target,
        solution.curves.len(),
    )?;
    let s = (target / solution.areas[bubble]).sqrt();
    let mut out = solution.clone();
    for curve in &mut out.curves {
        curve.iter_mut().for_each(|z| *z *= s);
    }
    out.areas.iter_mut().for_each(|a| *a *= s * s);
    out.scale_factor *= s;
    Ok(out)
}

impl BubbleSolution {
    pub fn problem(&self) -> &BubbleProblem {
        &self.problem
    }

    /// Vertical-slit map `W`.
    pub fn w(&self) -> &SlitMap {
        &self.w
    }

    /// Unscaled horizontal-slit map; `T = t_factor · Φ_h`.
    pub fn horizontal(&self) -> &SlitMap {
        &self.horizontal
    }

    pub fn t_factor(&self) -> f64 {
        self.t_factor
    }

    pub fn curves(&self) -> &[Vec<Complex64>] {
        &self.curves
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale_factor
    }

    /// `T(ζ)` at every boundary node.
    pub fn boundary_t(&self) -> Vec<Complex64> {
        self.horizontal
            .boundary_phi()
            .iter()
            .map(|p| self.t_factor * p)
            .collect()
    }

    /// Unscaled `z = (W - T)/U` at every boundary node (infinite at pole nodes).
    pub fn boundary_z(&self) -> Vec<Complex64> {
        self.w
            .boundary_phi()
            .iter()
            .zip(self.boundary_t())
            .map(|(w, t)| (w - t) / self.problem.speed)
            .collect()
    }

    /// `(W, T, z)` at interior points; `z` includes the scale factor.
    pub fn eval(&self, points: &[Complex64]) -> Result<Vec<(Complex64, Complex64, Complex64)>> {
        let mut v = eval_maps(&[&self.w, &self.horizontal], points)?;
        let h = v.pop().expect("two maps");
        let w = v.pop().expect("two maps");
        Ok(w.into_iter()
            .zip(h)
            .map(|(w, h)| {
                let t = self.t_factor * h;
                (w, t, (w - t) / self.problem.speed * self.scale_factor)
            })
            .collect())
    }

    /// Boundary-condition residuals and solver statistics.
    pub fn residual_report(&self) -> Diagnostics {
        let n = self.problem.n;
        let t = self.boundary_t();
        let bubbles = self
            .problem
            .bubble_components()
            .zip(&self.curves)
            .map(|(j, curve)| {
                let range = j * n..(j + 1) * n;
                let re_w: Vec<f64> = self.w.boundary_phi()[range.clone()].iter().map(|z| z.re).collect();
                let im_t: Vec<f64> = t[range].iter().map(|z| z.im).collect();
                BubbleDiagnostics {
                    component: j,
                    std_re_w: std_dev(&re_w),
                    std_im_t: std_dev(&im_t),
                    self_intersects: closed_polyline_self_intersects(curve),
                }
            })
            .collect();

        let z = self.boundary_z();
        let poles = self.w.pole_nodes();
        let wall = match self.problem.geometry {
            Geometry::FreeSpace => None,
            Geometry::HalfPlane => Some(
                (0..n)
                    .filter(|k| !poles.contains(k))
                    .map(|k| z[k].im.abs())
                    .fold(0.0, f64::max),
            ),
            Geometry::Channel => Some(
                (0..n)
                    .filter(|k| !poles.contains(k))
                    .map(|k| {
                        let side = if 2 * k < n { 1.0 } else { -1.0 };
                        (z[k].im - side).abs()
                    })
                    .fold(0.0, f64::max),
            ),
        };
        let contained = self.curves.iter().flatten().all(|z| match self.problem.geometry {
            Geometry::FreeSpace => true,
            Geometry::HalfPlane => z.im > 0.0,
            Geometry::Channel => z.im.abs() < 1.0,
        });
        Diagnostics {
            bubbles,
            wall,
            contained,
            w_solve: MapDiagnostics::of(&self.w),
            t_solve: MapDiagnostics::of(&self.horizontal),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BubbleDiagnostics {
    pub component: usize,
    /// Spread of `Re W` on the bubble (zero for an exact vertical slit).
    pub std_re_w: f64,
    /// Spread of `Im T` on the bubble (zero for an exact streamline).
    pub std_im_t: f64,
    pub self_intersects: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapDiagnostics {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub h: Vec<f64>,
    /// Largest within-component deviation of the raw `h` samples.
    pub h_deviation: Vec<f64>,
}

impl MapDiagnostics {
    fn of(map: &SlitMap) -> Self {
        let bie = map.bie();
        Self {
            iterations: bie.iterations,
            residual: bie.residual,
            converged: bie.converged,
            h: bie.h.clone(),
            h_deviation: (0..bie.h.len()).map(|j| bie.h_max_deviation(j)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub bubbles: Vec<BubbleDiagnostics>,
    /// Channel: `max |Im z ∓ 1|` on the two halves of the unit circle;
    /// half-plane: `max |Im z|` there. Pole nodes are skipped.
    pub wall: Option<f64>,
    /// Bubbles lie strictly inside the fluid region's walls.
    pub contained: bool,
    pub w_solve: MapDiagnostics,
    pub t_solve: MapDiagnostics,
}

impl Diagnostics {
    /// Largest boundary-condition residual (slit spreads and wall).
    pub fn max_boundary_residual(&self) -> f64 {
        self.bubbles
            .iter()
            .flat_map(|b| [b.std_re_w, b.std_im_t])
            .chain(self.wall)
            .fold(0.0, f64::max)
    }

    pub fn converged(&self) -> bool {
        self.w_solve.converged && self.t_solve.converged
    }

    pub fn any_self_intersection(&self) -> bool {
        self.bubbles.iter().any(|b| b.self_intersects)
    }
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Sweep over segments sorted by their left end; only pairs whose x-ranges
/// overlap are tested. Segments sharing a vertex are skipped.
pub fn closed_polyline_self_intersects(curve: &[Complex64]) -> bool {
    let n = curve.len();
    if n < 4 {
        return false;
    }
    let seg = |i: usize| (curve[i], curve[(i + 1) % n]);
    let mut order: Vec<(f64, f64, usize)> = (0..n)
        .map(|i| {
            let (a, b) = seg(i);
            (a.re.min(b.re), a.re.max(b.re), i)
        })
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut active: Vec<(f64, usize)> = Vec::new();
    for &(lo, hi, i) in &order {
        active.retain(|&(end, _)| end >= lo);
        for &(_, k) in &active {
            let adjacent = (i + 1) % n == k || (k + 1) % n == i;
            if adjacent {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(k);
            if segments_cross(a, b, c, d) {
                return true;
            }
        }
        active.push((hi, i));
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(speed: f64) -> BubbleSolution {
        let p = BubbleProblem::new(
            Geometry::FreeSpace,
            CircularDomain::unit_disk(),
            speed,
            c(0.0, 0.0),
            64,
        );
        solve_bubbles(&p, &GmresSettings::default()).unwrap()
    }

    #[test]
    fn clockwise_unit_circle_area() {
        let curve: Vec<Complex64> = (0..32)
            .map(|p| Complex64::from_polar(1.0, -TAU * p as f64 / 32.0))
            .collect();
        assert!((bubble_areas(&[curve])[0] - PI).abs() < 1e-13);
    }

    #[test]
    fn single_bubble_closed_form() {
        let s = single(2.0);
        assert!(s.curves()[0].iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        let s = single(3.0);
        assert!((s.areas()[0] - 8.0 * PI / 9.0).abs() < 1e-12);
        let r = s.residual_report();
        assert!(r.max_boundary_residual() < 1e-12, "{r:?}");
        assert!(!r.any_self_intersection());
    }

    #[test]
    fn rescale_semantics() {
        let s = single(3.0);
        let same = rescale_to_area(&s, 0, s.areas()[0]).unwrap();
        assert_eq!(same.scale_factor(), 1.0);
        let r = rescale_to_area(&s, 0, PI).unwrap();
        assert!((r.areas()[0] - PI).abs() < 1e-12);
        assert!((r.scale_factor() - (9.0f64 / 8.0).sqrt()).abs() < 1e-12);
        assert!(matches!(
            rescale_to_area(&s, 1, PI),
            Err(Error::BadIndex { .. })
        ));
    }

    #[test]
    fn validation() {
        let d = CircularDomain::new(vec![c(0.0, 0.0)], vec![0.3], 0.0).unwrap();
        let p = BubbleProblem::new(Geometry::Channel, d.clone(), 2.0, c(0.5, 0.0), 32);
        assert!(p.validate().is_ok());
        assert_eq!(p.clone().with_scale(0, 1.0).validate(), Err(Error::ScaleNotAllowed));
        let slow = BubbleProblem::new(Geometry::HalfPlane, d, 1.0, c(0.5, 0.0), 32);
        assert_eq!(slow.validate(), Err(Error::BadSpeed(1.0)));
    }

    #[test]
    fn figure_eight_self_intersects() {
        let curve: Vec<Complex64> = (0..64)
            .map(|p| {
                let t = TAU * p as f64 / 64.0;
                c(t.sin(), (2.0 * t).sin() * 0.5)
            })
            .collect();
        assert!(closed_polyline_self_intersects(&curve));
        let circle: Vec<Complex64> = (0..64).map(|p| Complex64::from_polar(1.0, TAU * p as f64 / 64.0)).collect();
        assert!(!closed_polyline_self_intersects(&circle));
    }
}
