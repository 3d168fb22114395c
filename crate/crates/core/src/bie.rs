//! Solution of `(I - N) μ = -M γ`, recovery of the piecewise constant `h`,
//! and interior evaluation of the resulting analytic function.

use num_complex::Complex64;

use crate::domain::{BoundarySampling, Location};
use crate::error::{Error, Result};
use crate::gmres::{gmres_solve, GmresSettings};
use crate::kernel::KernelContext;

/// Density, piecewise constants and boundary values of `f` for one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct BieSolution {
    pub gamma: Vec<f64>,
    pub mu: Vec<f64>,
    /// `h_j`, the mean of the raw samples over component `j`.
    pub h: Vec<f64>,
    /// Raw `h(t) = [M μ - (I - N) γ] / 2` at every node.
    pub h_samples: Vec<f64>,
    /// `f(ζ(t)) = (γ + h + iμ) / A` at every node.
    pub f_boundary: Vec<Complex64>,
    pub iterations: usize,
    /// True relative GMRES residual.
    pub residual: f64,
    pub converged: bool,
}

impl BieSolution {
    fn component(&self, j: usize, n: usize) -> &[f64] {
        &self.h_samples[j * n..(j + 1) * n]
    }

    /// Largest `|h(t) - h_j|` on component `j`.
    pub fn h_max_deviation(&self, j: usize) -> f64 {
        let n = self.h_samples.len() / self.h.len();
        self.component(j, n)
            .iter()
            .map(|x| (x - self.h[j]).abs())
            .fold(0.0, f64::max)
    }

    /// Standard deviation of the raw `h` samples on component `j`.
    pub fn h_std(&self, j: usize) -> f64 {
        let n = self.h_samples.len() / self.h.len();
        std_dev(self.component(j, n))
    }
}

pub(crate) fn std_dev(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Solves the boundary integral equation for the data `gamma` sampled at the
/// nodes of `ctx`.
pub fn solve_bie(ctx: &KernelContext, gamma: &[f64], settings: &GmresSettings) -> Result<BieSolution> {
    let sampling = ctx.sampling();
    let rhs: Vec<f64> = ctx.apply_m(gamma)?.into_iter().map(|x| -x).collect();
    let outcome = gmres_solve(&ctx.i_minus_n(), &rhs, settings)?;
    let mu = outcome.solution;

    let m_mu = ctx.apply_m(&mu)?;
    let imn_gamma = ctx.apply_i_minus_n(gamma)?;
    let h_samples: Vec<f64> = m_mu
        .iter()
        .zip(&imn_gamma)
        .map(|(a, b)| 0.5 * (a - b))
        .collect();
    let h: Vec<f64> = (0..sampling.components())
        .map(|j| {
            let block = &h_samples[sampling.range(j)];
            block.iter().sum::<f64>() / block.len() as f64
        })
        .collect();
    let f_boundary = (0..sampling.len())
        .map(|k| {
            let hj = h[sampling.component_of(k)];
            Complex64::new(gamma[k] + hj, mu[k]) / ctx.a()[k]
        })
        .collect();
    Ok(BieSolution {
        gamma: gamma.to_vec(),
        mu,
        h,
        h_samples,
        f_boundary,
        iterations: outcome.iterations,
        residual: outcome.residual,
        converged: outcome.converged,
    })
}

/// Cauchy integral of boundary values at interior points, in the quotient
/// form `Σ g_q ζ'_q/(ζ_q - ẑ) / Σ ζ'_q/(ζ_q - ẑ)`.
pub fn cauchy_eval(
    sampling: &BoundarySampling,
    values: &[Complex64],
    points: &[Complex64],
) -> Result<Vec<Complex64>> {
    Ok(cauchy_eval_many(sampling, &[values], points)?
        .pop()
        .expect("one function in, one out"))
}

/// [`cauchy_eval`] for several boundary functions sharing the same points.
/// Returns one vector per function.
pub fn cauchy_eval_many(
    sampling: &BoundarySampling,
    functions: &[&[Complex64]],
    points: &[Complex64],
) -> Result<Vec<Vec<Complex64>>> {
    for f in functions {
        if f.len() != sampling.len() {
            return Err(Error::LengthMismatch {
                expected: sampling.len(),
                got: f.len(),
            });
        }
    }
    for (index, &p) in points.iter().enumerate() {
        if sampling.domain().locate(p, 0.0) != Location::Inside {
            return Err(Error::PointOutside { index });
        }
    }
    let xs: Vec<f64> = sampling.zeta().iter().map(|z| z.re).collect();
    let ys: Vec<f64> = sampling.zeta().iter().map(|z| z.im).collect();
    let dz = sampling.dzeta();
    let (wr, wi): (Vec<f64>, Vec<f64>) = dz.iter().map(|d| (d.re, d.im)).unzip();
    let mut kr = vec![0.0; sampling.len()];
    let mut ki = vec![0.0; sampling.len()];
    let mut out = vec![Vec::with_capacity(points.len()); functions.len()];
    for &p in points {
        // ζ'_q / (ζ_q - p)
        for q in 0..xs.len() {
            let dx = xs[q] - p.re;
            let dy = ys[q] - p.im;
            let inv = 1.0 / (dx * dx + dy * dy);
            kr[q] = (wr[q] * dx + wi[q] * dy) * inv;
            ki[q] = (wi[q] * dx - wr[q] * dy) * inv;
        }
        let den = Complex64::new(kr.iter().sum(), ki.iter().sum());
        for (f, dst) in functions.iter().zip(out.iter_mut()) {
            dst.push(complex_dot(f, &kr, &ki) / den);
        }
    }
    Ok(out)
}

fn complex_dot(f: &[Complex64], kr: &[f64], ki: &[f64]) -> Complex64 {
    let mut re = [0.0f64; 2];
    let mut im = [0.0f64; 2];
    for ((g, &a), &b) in f.iter().zip(kr).zip(ki) {
        re[0] += g.re * a;
        re[1] -= g.im * b;
        im[0] += g.re * b;
        im[1] += g.im * a;
    }
    Complex64::new(re[0] + re[1], im[0] + im[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::CircularDomain;
    use crate::kernel::ThetaSpec;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_disk_closed_form_chain() {
        let s = CircularDomain::unit_disk().discretize(64).unwrap();
        let ctx = KernelContext::new(&s, ThetaSpec::uniform(1, FRAC_PI_2), c(0.0, 0.0)).unwrap();
        let gamma: Vec<f64> = s.params().iter().map(|t| -t.cos()).collect();
        let sol = solve_bie(&ctx, &gamma, &GmresSettings::default()).unwrap();
        assert!(sol.converged);
        for (k, &t) in s.params().iter().enumerate() {
            assert!((sol.mu[k] + t.sin()).abs() < 1e-13);
            assert!((sol.f_boundary[k] + 1.0).norm() < 1e-13);
        }
        assert!(sol.h[0].abs() < 1e-13);
    }

    #[test]
    fn homogeneous_data_gives_zero() {
        let d = CircularDomain::new(vec![c(0.1, 0.2)], vec![0.3], 0.0).unwrap();
        let s = d.discretize(32).unwrap();
        let ctx = KernelContext::new(&s, ThetaSpec::uniform(2, 0.0), c(-0.5, 0.0)).unwrap();
        let sol = solve_bie(&ctx, &vec![0.0; 64], &GmresSettings::default()).unwrap();
        assert_eq!(sol.iterations, 0);
        assert!(sol.mu.iter().all(|&x| x == 0.0));
        assert!(sol.h.iter().all(|&x| x == 0.0));
        assert!(sol.f_boundary.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn cauchy_of_constant_is_exact() {
        let d = CircularDomain::new(vec![c(0.0, 0.0)], vec![0.4], 0.0).unwrap();
        let s = d.discretize(32).unwrap();
        let ones = vec![c(1.0, 0.0); s.len()];
        let v = cauchy_eval(&s, &ones, &[c(0.7, 0.1), c(-0.2, -0.6)]).unwrap();
        for x in v {
            assert!((x - 1.0).norm() < 1e-15);
        }
        assert!(matches!(
            cauchy_eval(&s, &ones, &[c(0.1, 0.0)]),
            Err(Error::PointOutside { index: 0 })
        ));
    }
}
