//! The generalized Neumann kernel and its singular companion, discretized by
//! the Nyström method with the trapezoidal rule.
//!
//! With `A(t) = e^{i(π/2 - θ(t))} (ζ(t) - α)` both kernels are the imaginary
//! and real parts of one Cauchy-type expression,
//!
//! ```text
//! N(s,t) = (1/π) Im[ A(s)/A(t) · ζ'(t)/(ζ(t) - ζ(s)) ]
//! M(s,t) = (1/π) Re[ A(s)/A(t) · ζ'(t)/(ζ(t) - ζ(s)) ]
//! ```
//!
//! so one pass over the source nodes gives `Σ_q c_q / (ζ_q - ζ_p)` with
//! `c_q = v_q ζ'_q / A_q`, and the target factor `A_p` is applied afterwards.
//! `N` is smooth. On a single component `M` carries the cotangent singularity
//! `-(1/2π) cot((s-t)/2)`, which is split off and applied as a Fourier
//! multiplier on that component.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::domain::{BoundarySampling, Location};
use crate::error::{Error, Result};
use crate::spectral::Spectral;

/// Slit inclination `θ_j` for each boundary component.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSpec(Vec<f64>);

impl ThetaSpec {
    pub fn new(angles: Vec<f64>) -> Self {
        Self(angles)
    }

    /// The same angle on all `components`.
    pub fn uniform(components: usize, angle: f64) -> Self {
        Self(vec![angle; components])
    }

    /// `outer` on the unit circle and `inner` on every inner circle.
    pub fn split(components: usize, outer: f64, inner: f64) -> Self {
        let mut v = vec![inner; components];
        if let Some(first) = v.first_mut() {
            *first = outer;
        }
        Self(v)
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tabulated `A(t)`, `A'(t)` and diagonal limits for one map computation.
#[derive(Debug, Clone)]
pub struct KernelContext {
    sampling: BoundarySampling,
    theta: ThetaSpec,
    alpha: Complex64,
    a: Vec<Complex64>,
    da: Vec<Complex64>,
    // (1/π)(ζ''/(2ζ') - A'/A) at every node; Im is N(t,t), Re is M1(t,t)
    diag: Vec<Complex64>,
    // cot(π d / n) for d = 0..n (entry 0 unused)
    cot: Vec<f64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    spectral: Spectral,
}

impl KernelContext {
    pub fn new(sampling: &BoundarySampling, theta: ThetaSpec, alpha: Complex64) -> Result<Self> {
        if theta.len() != sampling.components() {
            return Err(Error::ThetaLength {
                expected: sampling.components(),
                got: theta.len(),
            });
        }
        if sampling.domain().locate(alpha, 0.0) != Location::Inside {
            return Err(Error::AlphaOutside {
                re: alpha.re,
                im: alpha.im,
            });
        }
        let n = sampling.n();
        let mut a = Vec::with_capacity(sampling.len());
        let mut da = Vec::with_capacity(sampling.len());
        let mut diag = Vec::with_capacity(sampling.len());
        for k in 0..sampling.len() {
            let th = theta.0[sampling.component_of(k)];
            let rot = Complex64::from_polar(1.0, FRAC_PI_2 - th);
            let ak = rot * (sampling.zeta()[k] - alpha);
            let dak = rot * sampling.dzeta()[k];
            let d = sampling.ddzeta()[k] / (2.0 * sampling.dzeta()[k]) - dak / ak;
            a.push(ak);
            da.push(dak);
            diag.push(d / PI);
        }
        let cot = (0..n)
            .map(|d| {
                if d == 0 {
                    0.0
                } else {
                    1.0 / (PI * d as f64 / n as f64).tan()
                }
            })
            .collect();
        Ok(Self {
            sampling: sampling.clone(),
            theta,
            alpha,
            a,
            da,
            diag,
            cot,
            xs: sampling.zeta().iter().map(|z| z.re).collect(),
            ys: sampling.zeta().iter().map(|z| z.im).collect(),
            spectral: Spectral::new(n),
        })
    }

    pub fn sampling(&self) -> &BoundarySampling {
        &self.sampling
    }

    pub fn theta(&self) -> &ThetaSpec {
        &self.theta
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// `A(t)` at every node.
    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    /// `A'(t)` at every node.
    pub fn da(&self) -> &[Complex64] {
        &self.da
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn dim(&self) -> usize {
        self.sampling.len()
    }

    fn raw(&self, p: usize, q: usize) -> Complex64 {
        let z = self.sampling.zeta();
        self.a[p] / self.a[q] * self.sampling.dzeta()[q] / (z[q] - z[p]) / PI
    }

    /// Generalized Neumann kernel `N(t_p, t_q)`, with the continuous limit on
    /// the diagonal.
    pub fn kernel_n(&self, p: usize, q: usize) -> f64 {
        if p == q {
            self.diag[p].im
        } else {
            self.raw(p, q).im
        }
    }

    /// Companion kernel `M(t_p, t_q)` for `p != q`. Unbounded as the two nodes
    /// approach each other on one component.
    pub fn kernel_m(&self, p: usize, q: usize) -> f64 {
        debug_assert_ne!(p, q);
        self.raw(p, q).re
    }

    /// Smooth remainder `M1(s,t) = M(s,t) + (1/2π) cot((s-t)/2)` on one
    /// component.
    pub fn kernel_m1(&self, p: usize, q: usize) -> Result<f64> {
        let (jp, jq) = (self.sampling.component_of(p), self.sampling.component_of(q));
        if jp != jq {
            return Err(Error::DifferentComponent { p, q });
        }
        if p == q {
            return Ok(self.diag[p].re);
        }
        let n = self.sampling.n();
        let d = (p % n + n - q % n) % n;
        Ok(self.raw(p, q).re + self.cot[d] / (2.0 * PI))
    }

    /// `(2π/n)/π · A_p Σ_{q≠p} c_q / (ζ_q - ζ_p)` with `c_q = v_q ζ'_q / A_q`.
    /// Real part is the off-diagonal trapezoidal sum of `M`, imaginary part
    /// that of `N`.
    fn cauchy_pass(&self, v: &[f64]) -> Vec<Complex64> {
        let dz = self.sampling.dzeta();
        let (cr, ci): (Vec<f64>, Vec<f64>) = v
            .iter()
            .zip(dz)
            .zip(&self.a)
            .map(|((&vq, &d), &aq)| {
                let c = vq * d / aq;
                (c.re, c.im)
            })
            .unzip();
        let scale = self.sampling.weight() / PI;
        (0..v.len())
            .map(|p| {
                let (x0, y0) = (self.xs[p], self.ys[p]);
                let (r1, i1) = cauchy_row(
                    &self.xs[..p],
                    &self.ys[..p],
                    &cr[..p],
                    &ci[..p],
                    x0,
                    y0,
                );
                let (r2, i2) = cauchy_row(
                    &self.xs[p + 1..],
                    &self.ys[p + 1..],
                    &cr[p + 1..],
                    &ci[p + 1..],
                    x0,
                    y0,
                );
                self.a[p] * Complex64::new(r1 + r2, i1 + i2) * scale
            })
            .collect()
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `v - N_h v` with the Nyström trapezoidal discretization of `N`.
    pub fn apply_i_minus_n(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        let w = self.sampling.weight();
        let sums = self.cauchy_pass(v);
        Ok(v.iter()
            .zip(&sums)
            .zip(&self.diag)
            .map(|((&vp, s), d)| vp - s.im - w * d.im * vp)
            .collect())
    }

    /// `M_h v`: cross-component blocks by the trapezoidal rule, same-component
    /// blocks as trapezoidal `M1` plus the spectral conjugate-function term.
    pub fn apply_m(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        let n = self.sampling.n();
        if n % 2 != 0 {
            return Err(Error::BadN {
                n,
                reason: "the conjugate-function multiplier needs even n",
            });
        }
        let w = self.sampling.weight();
        let sums = self.cauchy_pass(v);
        let mut out: Vec<f64> = v
            .iter()
            .zip(&sums)
            .zip(&self.diag)
            .map(|((&vp, s), d)| s.re + w * d.re * vp)
            .collect();
        let inv_n = 1.0 / n as f64;
        for j in 0..self.sampling.components() {
            let range = self.sampling.range(j);
            let block = &v[range.clone()];
            let conj = self.spectral.conjugate(block);
            for p in 0..n {
                let mut acc = 0.0;
                for (q, &vq) in block.iter().enumerate() {
                    if q != p {
                        acc += self.cot[(p + n - q) % n] * vq;
                    }
                }
                out[range.start + p] += acc * inv_n - conj[p];
            }
        }
        Ok(out)
    }

    /// Dense matrix of `I - N_h`, row-major. Intended for small `n` only.
    pub fn dense_i_minus_n(&self) -> Vec<Vec<f64>> {
        let w = self.sampling.weight();
        (0..self.dim())
            .map(|p| {
                (0..self.dim())
                    .map(|q| f64::from(u8::from(p == q)) - w * self.kernel_n(p, q))
                    .collect()
            })
            .collect()
    }

    /// `I - N_h` as a [`LinearMap`] for Krylov solvers.
    pub fn i_minus_n(&self) -> IMinusN<'_> {
        IMinusN(self)
    }
}

/// Matrix-free square linear map on real vectors.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

/// Borrowed `I - N_h` operator of a [`KernelContext`].
#[derive(Debug, Clone, Copy)]
pub struct IMinusN<'a>(&'a KernelContext);

impl LinearMap for IMinusN<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0
            .apply_i_minus_n(x)
            .expect("operator applied to a vector of its own dimension")
    }
}

/// Adapts a closure into a [`LinearMap`].
pub struct FnMap<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> FnMap<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> LinearMap for FnMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}

/// `Σ_q c_q / (ζ_q - ζ0)` over split real/imaginary source arrays. Four
/// interleaved accumulators with a fixed combination order keep the result
/// deterministic.
#[inline]
pub(crate) fn cauchy_row(
    xs: &[f64],
    ys: &[f64],
    cr: &[f64],
    ci: &[f64],
    x0: f64,
    y0: f64,
) -> (f64, f64) {
    let mut ar = [0.0f64; 4];
    let mut ai = [0.0f64; 4];
    let xc = xs.chunks_exact(4);
    let yc = ys.chunks_exact(4);
    let rc = cr.chunks_exact(4);
    let ic = ci.chunks_exact(4);
    let (xt, yt, rt, it) = (xc.remainder(), yc.remainder(), rc.remainder(), ic.remainder());
    for (((x, y), r), i) in xc.zip(yc).zip(rc).zip(ic) {
        for l in 0..4 {
            let dx = x[l] - x0;
            let dy = y[l] - y0;
            let inv = 1.0 / (dx * dx + dy * dy);
            ar[l] += (r[l] * dx + i[l] * dy) * inv;
            ai[l] += (i[l] * dx - r[l] * dy) * inv;
        }
    }
    let mut sr = (ar[0] + ar[1]) + (ar[2] + ar[3]);
    let mut si = (ai[0] + ai[1]) + (ai[2] + ai[3]);
    for l in 0..xt.len() {
        let dx = xt[l] - x0;
        let dy = yt[l] - y0;
        let inv = 1.0 / (dx * dx + dy * dy);
        sr += (rt[l] * dx + it[l] * dy) * inv;
        si += (it[l] * dx - rt[l] * dy) * inv;
    }
    (sr, si)
}
