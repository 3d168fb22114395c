//! Unrestarted GMRES with modified Gram–Schmidt Arnoldi.

use crate::error::{Error, Result};
use crate::kernel::LinearMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresSettings {
    /// Relative residual target `‖b - Ax‖ ≤ tol ‖b‖`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for GmresSettings {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iterations: 100,
        }
    }
}

impl GmresSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidParameter(format!(
                "GMRES needs tol > 0 and max_iterations >= 1 (got {}, {})",
                self.tol, self.max_iterations
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub solution: Vec<f64>,
    /// Arnoldi steps (operator applications excluding the final check).
    pub iterations: usize,
    /// True relative residual `‖b - Ax‖₂ / ‖b‖₂` of the returned iterate.
    pub residual: f64,
    /// Residual estimate from the Givens recurrence.
    pub estimated_residual: f64,
    /// `false` means `max_iterations` ran out before the estimate reached `tol`.
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `op x = rhs` from a zero initial guess without restarts.
pub fn gmres_solve(op: &dyn LinearMap, rhs: &[f64], settings: &GmresSettings) -> Result<GmresOutcome> {
    settings.validate()?;
    let dim = op.dim();
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if rhs.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            got: rhs.len(),
        });
    }
    let beta = norm(rhs);
    if beta == 0.0 {
        return Ok(GmresOutcome {
            solution: vec![0.0; dim],
            iterations: 0,
            residual: 0.0,
            estimated_residual: 0.0,
            converged: true,
        });
    }

    let max_k = settings.max_iterations.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_k + 1);
    basis.push(rhs.iter().map(|x| x / beta).collect());
    // column j of the Hessenberg matrix, after rotation, is hess[j][0..=j]
    let mut hess: Vec<Vec<f64>> = Vec::with_capacity(max_k);
    let mut cs: Vec<f64> = Vec::with_capacity(max_k);
    let mut sn: Vec<f64> = Vec::with_capacity(max_k);
    let mut g = vec![0.0; max_k + 1];
    g[0] = beta;

    let mut steps = 0;
    let mut converged = false;
    let mut breakdown = false;
    for j in 0..max_k {
        let mut w = op.apply(&basis[j]);
        let w_norm0 = norm(&w);
        let mut col = vec![0.0; j + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dot(&w, v);
            col[i] = hij;
            w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= hij * vk);
        }
        // one reorthogonalization pass when cancellation was severe
        if norm(&w) < 0.5 * w_norm0 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(&w, v);
                col[i] += c;
                w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= c * vk);
            }
        }
        let h_next = norm(&w);
        col[j + 1] = h_next;

        for i in 0..j {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let denom = col[j].hypot(col[j + 1]);
        let (c, s) = if denom == 0.0 {
            (1.0, 0.0)
        } else {
            (col[j] / denom, col[j + 1] / denom)
        };
        cs.push(c);
        sn.push(s);
        col[j] = denom;
        col[j + 1] = 0.0;
        g[j + 1] = -s * g[j];
        g[j] *= c;
        col.truncate(j + 1);
        hess.push(col);
        steps = j + 1;

        if g[j + 1].abs() <= settings.tol * beta {
            converged = true;
            break;
        }
        if h_next <= f64::EPSILON * w_norm0.max(f64::MIN_POSITIVE) {
            breakdown = true;
            break;
        }
        basis.push(w.iter().map(|x| x / h_next).collect());
    }

    let estimated_residual = g[steps].abs() / beta;
    if breakdown && !converged && estimated_residual > settings.tol {
        return Err(Error::Breakdown {
            iterations: steps,
            residual: estimated_residual,
        });
    }

    // back substitution for the least-squares coefficients
    let mut y = vec![0.0; steps];
    for i in (0..steps).rev() {
        let mut acc = g[i];
        for k in i + 1..steps {
            acc -= hess[k][i] * y[k];
        }
        y[i] = acc / hess[i][i];
    }
    let mut x = vec![0.0; dim];
    for (yi, v) in y.iter().zip(&basis) {
        x.iter_mut().zip(v).for_each(|(xk, vk)| *xk += yi * vk);
    }
    let ax = op.apply(&x);
    let residual = norm(
        &rhs.iter()
            .zip(&ax)
            .map(|(b, a)| b - a)
            .collect::<Vec<_>>(),
    ) / beta;
    Ok(GmresOutcome {
        solution: x,
        iterations: steps,
        residual,
        estimated_residual,
        converged: converged || breakdown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::FnMap;

    #[test]
    fn identity_in_one_step() {
        let op = FnMap::new(5, |x: &[f64]| x.to_vec());
        let b = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        let out = gmres_solve(&op, &b, &GmresSettings::default()).unwrap();
        assert!(out.iterations <= 1);
        for (x, y) in out.solution.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15 * y.abs().max(1.0));
        }
    }

    #[test]
    fn two_eigenvalues_in_two_steps() {
        let op = FnMap::new(2, |x: &[f64]| vec![x[0], 2.0 * x[1]]);
        let out = gmres_solve(&op, &[1.0, 2.0], &GmresSettings::default()).unwrap();
        assert!(out.iterations <= 2);
        assert!((out.solution[0] - 1.0).abs() < 1e-14);
        assert!((out.solution[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_rhs_and_zero_dimension() {
        let op = FnMap::new(3, |x: &[f64]| x.to_vec());
        let out = gmres_solve(&op, &[0.0; 3], &GmresSettings::default()).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.solution, vec![0.0; 3]);
        let empty = FnMap::new(0, |x: &[f64]| x.to_vec());
        assert_eq!(
            gmres_solve(&empty, &[], &GmresSettings::default()),
            Err(Error::ZeroDimension)
        );
    }

    #[test]
    fn singular_operator_breaks_down() {
        // projection onto the first axis; rhs has a component outside the range
        let op = FnMap::new(2, |x: &[f64]| vec![x[0], 0.0]);
        let err = gmres_solve(&op, &[1.0, 1.0], &GmresSettings::default());
        assert!(matches!(err, Err(Error::Breakdown { .. })));
    }

    #[test]
    fn exhausted_iterations_are_flagged() {
        let n = 50;
        let op = FnMap::new(n, move |x: &[f64]| {
            (0..n).map(|i| (i as f64 + 1.0) * x[i]).collect()
        });
        let b = vec![1.0; n];
        let settings = GmresSettings {
            tol: 1e-14,
            max_iterations: 5,
        };
        let out = gmres_solve(&op, &b, &settings).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 5);
        assert!(out.residual < 1.0);
    }
}
