//! Canonical slit maps of circular domains.
//!
//! Each map is `Φ = (closed-form part) + (ζ - α) f(ζ) + (normalization)`,
//! where `f` comes from one boundary integral equation solve:
//!
//! | geometry    | closed-form part          | boundary data on `C_0` | normalization   |
//! |-------------|---------------------------|------------------------|-----------------|
//! | free space  | `1/(ζ - α)`               | same as inner circles  | none            |
//! | half-plane  | `i (i + ζ)/(i - ζ)`       | `γ = 0`                | `+ i h_0`       |
//! | channel     | `(2/π) log((1+ζ)/(1-ζ))`  | `γ = 0`                | `- (i - α) f(i)` |

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::bie::{cauchy_eval_many, solve_bie, BieSolution};
use crate::domain::CircularDomain;
use crate::error::{Error, Result};
use crate::gmres::GmresSettings;
use crate::kernel::{KernelContext, ThetaSpec};

/// Points closer than this to `α` are refused by free-space evaluation.
pub const POLE_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    FreeSpace,
    HalfPlane,
    Channel,
}

impl Geometry {
    pub fn name(self) -> &'static str {
        match self {
            Geometry::FreeSpace => "free_space",
            Geometry::HalfPlane => "half_plane",
            Geometry::Channel => "channel",
        }
    }
}

/// Options that only matter for the channel map.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MapOptions {
    /// Read `f(i)` from the trigonometric interpolant when `ζ = i` is not a
    /// node (`n` not divisible by 4). Off by default.
    pub interpolate_f_at_i: bool,
}

/// One computed canonical slit map.
#[derive(Debug, Clone)]
pub struct SlitMap {
    geometry: Geometry,
    ctx: KernelContext,
    bie: BieSolution,
    f_at_i: Option<Complex64>,
    boundary_phi: Vec<Complex64>,
    pole_nodes: Vec<usize>,
}

/// Upper half-plane Möbius map; sends `C_0` to the real line and `i` to ∞.
pub fn half_plane_psi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    i * (i + z) / (i - z)
}

/// Channel map onto `|Im w| < 1` with `±1 ↦ ±∞` and `i ↦ i`.
pub fn channel_psi(z: Complex64) -> Complex64 {
    ((1.0 + z) / (1.0 - z)).ln() * (2.0 / PI)
}

fn check_theta(theta: &ThetaSpec, components: usize, outer_horizontal: bool) -> Result<()> {
    if theta.len() != components {
        return Err(Error::ThetaLength {
            expected: components,
            got: theta.len(),
        });
    }
    for (component, &angle) in theta.angles().iter().enumerate() {
        if angle != 0.0 && angle != FRAC_PI_2 {
            return Err(Error::UnsupportedAngle { component, angle });
        }
    }
    if outer_horizontal && theta.angles()[0] != 0.0 {
        return Err(Error::InvalidParameter(
            "the unit circle must map to a horizontal line (theta_0 = 0)".into(),
        ));
    }
    Ok(())
}

impl SlitMap {
    /// Dispatches to the constructor for `geometry`.
    pub fn build(
        geometry: Geometry,
        domain: &CircularDomain,
        n: usize,
        alpha: Complex64,
        theta: ThetaSpec,
        settings: &GmresSettings,
        options: MapOptions,
    ) -> Result<Self> {
        match geometry {
            Geometry::FreeSpace => map_free_space(domain, n, alpha, theta, settings),
            Geometry::HalfPlane => map_half_plane(domain, n, alpha, theta, settings),
            Geometry::Channel => map_channel(domain, n, alpha, theta, settings, options),
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn context(&self) -> &KernelContext {
        &self.ctx
    }

    pub fn bie(&self) -> &BieSolution {
        &self.bie
    }

    pub fn alpha(&self) -> Complex64 {
        self.ctx.alpha()
    }

    /// `h_0`, the half-plane normalization constant.
    pub fn h0(&self) -> f64 {
        self.bie.h[0]
    }

    /// `f(i)`, the channel normalization value.
    pub fn f_at_i(&self) -> Option<Complex64> {
        self.f_at_i
    }

    /// `Φ(ζ(t))` at every node. Pole nodes on the unit circle hold an infinite
    /// real part; see [`SlitMap::pole_nodes`].
    pub fn boundary_phi(&self) -> &[Complex64] {
        &self.boundary_phi
    }

    /// Global node indices where `Φ` is infinite (half-plane `ζ = i`, channel
    /// `ζ = ±1`).
    pub fn pole_nodes(&self) -> &[usize] {
        &self.pole_nodes
    }

    fn closed_form(&self, z: Complex64) -> Complex64 {
        match self.geometry {
            Geometry::FreeSpace => 1.0 / (z - self.ctx.alpha()),
            Geometry::HalfPlane => half_plane_psi(z),
            Geometry::Channel => channel_psi(z),
        }
    }

    fn constant(&self) -> Complex64 {
        match self.geometry {
            Geometry::FreeSpace => Complex64::new(0.0, 0.0),
            Geometry::HalfPlane => Complex64::new(0.0, self.h0()),
            Geometry::Channel => {
                -(Complex64::i() - self.ctx.alpha()) * self.f_at_i.unwrap_or_default()
            }
        }
    }

    fn assemble(&self, z: Complex64, f: Complex64) -> Complex64 {
        self.closed_form(z) + (z - self.ctx.alpha()) * f + self.constant()
    }

    fn check_poles(&self, points: &[Complex64]) -> Result<()> {
        if self.geometry == Geometry::FreeSpace {
            for (index, &p) in points.iter().enumerate() {
                let distance = (p - self.ctx.alpha()).norm();
                if distance < POLE_GUARD {
                    return Err(Error::PoleProximity { index, distance });
                }
            }
        }
        Ok(())
    }

    /// `Φ` at interior points, with `f` from the Cauchy integral formula.
    pub fn eval(&self, points: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(eval_maps(&[self], points)?.pop().expect("one map"))
    }
}

/// Evaluates several maps built on the same boundary sampling at the same
/// points, sharing the Cauchy kernel evaluations.
pub fn eval_maps(maps: &[&SlitMap], points: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
    let Some(first) = maps.first() else {
        return Ok(Vec::new());
    };
    let sampling = first.ctx.sampling();
    for m in maps {
        if m.ctx.sampling() != sampling {
            return Err(Error::InvalidParameter(
                "maps evaluated together must share one boundary sampling".into(),
            ));
        }
        m.check_poles(points)?;
    }
    let functions: Vec<&[Complex64]> = maps.iter().map(|m| m.bie.f_boundary.as_slice()).collect();
    let fs = cauchy_eval_many(sampling, &functions, points)?;
    Ok(maps
        .iter()
        .zip(fs)
        .map(|(m, f)| {
            points
                .iter()
                .zip(f)
                .map(|(&z, fz)| m.assemble(z, fz))
                .collect()
        })
        .collect())
}

/// Free space minus `m + 1` slits, with `Φ(ζ) ~ 1/(ζ - α)` at the pole.
pub fn map_free_space(
    domain: &CircularDomain,
    n: usize,
    alpha: Complex64,
    theta: ThetaSpec,
    settings: &GmresSettings,
) -> Result<SlitMap> {
    check_theta(&theta, domain.components(), false)?;
    let sampling = domain.discretize(n)?;
    let ctx = KernelContext::new(&sampling, theta, alpha)?;
    let gamma: Vec<f64> = sampling
        .zeta()
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let th = ctx.theta().angles()[sampling.component_of(k)];
            (Complex64::from_polar(1.0, -th) / (z - alpha)).im
        })
        .collect();
    let bie = solve_bie(&ctx, &gamma, settings)?;
    let mut map = SlitMap {
        geometry: Geometry::FreeSpace,
        ctx,
        bie,
        f_at_i: None,
        boundary_phi: Vec::new(),
        pole_nodes: Vec::new(),
    };
    map.boundary_phi = boundary_values(&map);
    Ok(map)
}

/// Upper half-plane minus `m` slits; `C_0` goes to the real axis and `ζ = i`
/// to infinity.
pub fn map_half_plane(
    domain: &CircularDomain,
    n: usize,
    alpha: Complex64,
    theta: ThetaSpec,
    settings: &GmresSettings,
) -> Result<SlitMap> {
    check_theta(&theta, domain.components(), true)?;
    let sampling = domain.discretize(n)?;
    let ctx = KernelContext::new(&sampling, theta, alpha)?;
    let gamma = inner_gamma(&ctx, half_plane_psi);
    let bie = solve_bie(&ctx, &gamma, settings)?;
    let pole_nodes = if n % 4 == 0 { vec![n / 4] } else { Vec::new() };
    let mut map = SlitMap {
        geometry: Geometry::HalfPlane,
        ctx,
        bie,
        f_at_i: None,
        boundary_phi: Vec::new(),
        pole_nodes,
    };
    map.boundary_phi = boundary_values(&map);
    Ok(map)
}

/// Channel `|Im w| < 1` minus `m` slits, normalized so that `Φ(i) = i`.
pub fn map_channel(
    domain: &CircularDomain,
    n: usize,
    alpha: Complex64,
    theta: ThetaSpec,
    settings: &GmresSettings,
    options: MapOptions,
) -> Result<SlitMap> {
    check_theta(&theta, domain.components(), true)?;
    if n % 4 != 0 && !options.interpolate_f_at_i {
        return Err(Error::BadN {
            n,
            reason: "the channel map reads f(i) at a node, so n must be divisible by 4",
        });
    }
    let sampling = domain.discretize(n)?;
    let ctx = KernelContext::new(&sampling, theta, alpha)?;
    let gamma = inner_gamma(&ctx, channel_psi);
    let bie = solve_bie(&ctx, &gamma, settings)?;
    let f_at_i = if n % 4 == 0 {
        bie.f_boundary[n / 4]
    } else {
        ctx.spectral()
            .interpolate(&bie.f_boundary[sampling.range(0)], FRAC_PI_2)
    };
    let mut map = SlitMap {
        geometry: Geometry::Channel,
        ctx,
        bie,
        f_at_i: Some(f_at_i),
        boundary_phi: Vec::new(),
        pole_nodes: vec![0, n / 2],
    };
    map.boundary_phi = boundary_values(&map);
    Ok(map)
}

fn inner_gamma(ctx: &KernelContext, psi: fn(Complex64) -> Complex64) -> Vec<f64> {
    let sampling = ctx.sampling();
    sampling
        .zeta()
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let j = sampling.component_of(k);
            if j == 0 {
                0.0
            } else {
                let th = ctx.theta().angles()[j];
                (Complex64::from_polar(1.0, -th) * psi(z)).im
            }
        })
        .collect()
}

/// Closed-form part on the boundary. On the unit circle the half-plane and
/// channel maps use trigonometric identities instead of complex arithmetic,
/// which avoids cancellation next to the poles.
fn boundary_closed_form(map: &SlitMap, k: usize) -> Complex64 {
    let sampling = map.ctx.sampling();
    let z = sampling.zeta()[k];
    if sampling.component_of(k) != 0 {
        return map.closed_form(z);
    }
    let t = sampling.param_of(k);
    match map.geometry {
        Geometry::FreeSpace => map.closed_form(z),
        // i(i + e^{it})/(i - e^{it}) = cot(π/4 - t/2)
        Geometry::HalfPlane => Complex64::new(1.0 / (FRAC_PI_4 - 0.5 * t).tan(), 0.0),
        // (1 + e^{it})/(1 - e^{it}) = i cot(t/2)
        Geometry::Channel => {
            let cot = 1.0 / (0.5 * t).tan();
            let im = if t < PI { 1.0 } else { -1.0 };
            Complex64::new(2.0 / PI * cot.abs().ln(), im)
        }
    }
}

fn boundary_values(map: &SlitMap) -> Vec<Complex64> {
    let sampling = map.ctx.sampling();
    let n = sampling.n();
    (0..sampling.len())
        .map(|k| {
            if map.pole_nodes.contains(&k) {
                let re = if map.geometry == Geometry::Channel && k == n / 2 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                };
                return Complex64::new(re, 0.0);
            }
            let z = sampling.zeta()[k];
            boundary_closed_form(map, k)
                + (z - map.ctx.alpha()) * map.bie.f_boundary[k]
                + map.constant()
        })
        .collect()
}
