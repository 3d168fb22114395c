//! Circular preimage domains and their boundary discretization.
//!
//! The domain is the unit disk with `m` disjoint closed disks removed. Boundary
//! component 0 is the unit circle, traversed counterclockwise as `e^{it}`;
//! component `j >= 1` is the circle `z_j + r_j e^{-it}`, traversed clockwise so
//! that the domain always lies to the left.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default minimum separation between boundary circles.
pub const DEFAULT_MIN_GAP: f64 = 1e-3;

/// Unit disk minus `m` disjoint interior disks.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularDomain {
    centers: Vec<Complex64>,
    radii: Vec<f64>,
}

/// Classification of a point relative to a [`CircularDomain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    NearBoundary,
}

impl CircularDomain {
    /// Validates and builds a domain. Gaps are measured between every pair of
    /// inner circles and between each inner circle and the unit circle.
    /// Component indices in errors are 1-based for inner circles (0 is the
    /// unit circle).
    pub fn new(centers: Vec<Complex64>, radii: Vec<f64>, min_gap: f64) -> Result<Self> {
        if centers.len() != radii.len() {
            return Err(Error::CountMismatch {
                centers: centers.len(),
                radii: radii.len(),
            });
        }
        if !(min_gap >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "min_gap must be non-negative, got {min_gap}"
            )));
        }
        for (j, (&c, &r)) in centers.iter().zip(&radii).enumerate() {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::BadRadius {
                    index: j + 1,
                    radius: r,
                });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "center of circle {} is not finite",
                    j + 1
                )));
            }
            let reach = c.norm() + r;
            if reach >= 1.0 {
                return Err(Error::Outside {
                    index: j + 1,
                    reach,
                    min_gap,
                });
            }
            let gap = 1.0 - reach;
            if gap < min_gap {
                return Err(Error::Overlap {
                    first: 0,
                    second: j + 1,
                    gap,
                    min_gap,
                });
            }
        }
        for j in 0..centers.len() {
            for k in j + 1..centers.len() {
                let gap = (centers[j] - centers[k]).norm() - radii[j] - radii[k];
                if gap <= 0.0 || gap < min_gap {
                    return Err(Error::Overlap {
                        first: j + 1,
                        second: k + 1,
                        gap,
                        min_gap,
                    });
                }
            }
        }
        Ok(Self { centers, radii })
    }

    /// The unit disk (`m = 0`).
    pub fn unit_disk() -> Self {
        Self {
            centers: Vec::new(),
            radii: Vec::new(),
        }
    }

    /// Number of inner circles.
    pub fn m(&self) -> usize {
        self.centers.len()
    }

    /// Number of boundary components, `m + 1`.
    pub fn components(&self) -> usize {
        self.centers.len() + 1
    }

    pub fn centers(&self) -> &[Complex64] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Classifies `point`. `Inside` requires clearance greater than `margin`
    /// from every circle; `NearBoundary` means within `margin` of some circle.
    pub fn locate(&self, point: Complex64, margin: f64) -> Location {
        let outer = point.norm();
        let inner: Vec<f64> = self
            .centers
            .iter()
            .zip(&self.radii)
            .map(|(&c, &r)| (point - c).norm() - r)
            .collect();
        if outer < 1.0 - margin && inner.iter().all(|&d| d > margin) {
            return Location::Inside;
        }
        if (outer - 1.0).abs() <= margin || inner.iter().any(|d| d.abs() <= margin) {
            return Location::NearBoundary;
        }
        Location::Outside
    }

    /// Distance from `point` to the nearest boundary circle.
    pub fn boundary_distance(&self, point: Complex64) -> f64 {
        self.centers
            .iter()
            .zip(&self.radii)
            .map(|(&c, &r)| ((point - c).norm() - r).abs())
            .fold((point.norm() - 1.0).abs(), f64::min)
    }

    /// Samples every component at `n` equispaced parameter values.
    pub fn discretize(&self, n: usize) -> Result<BoundarySampling> {
        BoundarySampling::new(self, n)
    }
}

/// Equispaced samples of the boundary parametrization with exact derivatives.
///
/// Node `k` lies on component `k / n` at parameter `t_{k % n} = 2π (k % n) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySampling {
    domain: CircularDomain,
    n: usize,
    params: Vec<f64>,
    zeta: Vec<Complex64>,
    dzeta: Vec<Complex64>,
    ddzeta: Vec<Complex64>,
}

impl BoundarySampling {
    fn new(domain: &CircularDomain, n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::BadN {
                n,
                reason: "at least 8 nodes per component are required",
            });
        }
        if n % 2 != 0 {
            return Err(Error::BadN {
                n,
                reason: "node count must be even",
            });
        }
        let params: Vec<f64> = (0..n).map(|p| TAU * p as f64 / n as f64).collect();
        let total = domain.components() * n;
        let mut zeta = Vec::with_capacity(total);
        let mut dzeta = Vec::with_capacity(total);
        let mut ddzeta = Vec::with_capacity(total);
        for j in 0..domain.components() {
            for &t in &params {
                let (z, dz, ddz) = parametrize(domain, j, t);
                zeta.push(z);
                dzeta.push(dz);
                ddzeta.push(ddz);
            }
        }
        Ok(Self {
            domain: domain.clone(),
            n,
            params,
            zeta,
            dzeta,
            ddzeta,
        })
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }

    /// Nodes per component.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total node count `(m + 1) n`.
    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    pub fn components(&self) -> usize {
        self.domain.components()
    }

    /// Parameter values `t_p`, shared by all components.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn zeta(&self) -> &[Complex64] {
        &self.zeta
    }

    pub fn dzeta(&self) -> &[Complex64] {
        &self.dzeta
    }

    pub fn ddzeta(&self) -> &[Complex64] {
        &self.ddzeta
    }

    pub fn component_of(&self, node: usize) -> usize {
        node / self.n
    }

    /// Parameter value at a global node index.
    pub fn param_of(&self, node: usize) -> f64 {
        self.params[node % self.n]
    }

    /// Global index range of component `j`.
    pub fn range(&self, j: usize) -> std::ops::Range<usize> {
        j * self.n..(j + 1) * self.n
    }

    /// Trapezoidal weight `2π/n`.
    pub fn weight(&self) -> f64 {
        TAU / self.n as f64
    }
}

/// Closed-form position and first two derivatives of component `j` at `t`.
pub fn parametrize(
    domain: &CircularDomain,
    j: usize,
    t: f64,
) -> (Complex64, Complex64, Complex64) {
    let (s, c) = t.sin_cos();
    if j == 0 {
        let e = Complex64::new(c, s);
        (e, Complex64::i() * e, -e)
    } else {
        let r = domain.radii[j - 1];
        let e = Complex64::new(c, -s) * r;
        (domain.centers[j - 1] + e, -Complex64::i() * e, -e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn paper_two_bubble_domain_is_valid() {
        let d = CircularDomain::new(vec![c(0.0, 0.0)], vec![0.4], 0.0).unwrap();
        assert_eq!(d.m(), 1);
    }

    #[test]
    fn empty_domain_is_unit_disk() {
        let d = CircularDomain::new(vec![], vec![], DEFAULT_MIN_GAP).unwrap();
        assert_eq!(d.m(), 0);
        assert_eq!(d, CircularDomain::unit_disk());
    }

    #[test]
    fn rejects_disk_leaving_unit_disk() {
        let err = CircularDomain::new(vec![c(0.5, 0.0)], vec![0.6], 0.0).unwrap_err();
        assert!(matches!(err, Error::Outside { index: 1, .. }));
    }

    #[test]
    fn rejects_bad_radius_and_overlap() {
        assert!(matches!(
            CircularDomain::new(vec![c(0.0, 0.0)], vec![0.0], 0.0),
            Err(Error::BadRadius { index: 1, .. })
        ));
        assert!(matches!(
            CircularDomain::new(vec![c(-0.2, 0.0), c(0.2, 0.0)], vec![0.25, 0.25], 0.0),
            Err(Error::Overlap {
                first: 1,
                second: 2,
                ..
            })
        ));
        // gap 0.01 between the circles, below a 0.05 requirement
        assert!(matches!(
            CircularDomain::new(vec![c(-0.2, 0.0), c(0.2, 0.0)], vec![0.195, 0.195], 0.05),
            Err(Error::Overlap { .. })
        ));
        // gap 0.005 to the unit circle
        assert!(matches!(
            CircularDomain::new(vec![c(0.5, 0.0)], vec![0.495], 0.01),
            Err(Error::Overlap {
                first: 0,
                second: 1,
                ..
            })
        ));
        assert!(matches!(
            CircularDomain::new(vec![c(0.0, 0.0)], vec![], 0.0),
            Err(Error::CountMismatch { .. })
        ));
    }

    #[test]
    fn quarter_point_nodes() {
        let d = CircularDomain::new(vec![c(0.0, 0.0)], vec![0.4], 0.0).unwrap();
        // n = 4 is below the solver minimum, so sample the parametrization directly
        let outer: Vec<_> = (0..4)
            .map(|p| parametrize(&d, 0, TAU * p as f64 / 4.0).0)
            .collect();
        let inner: Vec<_> = (0..4)
            .map(|p| parametrize(&d, 1, TAU * p as f64 / 4.0).0)
            .collect();
        let expect_outer = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        let expect_inner = [c(0.4, 0.0), c(0.0, -0.4), c(-0.4, 0.0), c(0.0, 0.4)];
        for k in 0..4 {
            assert!((outer[k] - expect_outer[k]).norm() < 1e-15);
            assert!((inner[k] - expect_inner[k]).norm() < 1e-15);
        }
        assert!(matches!(d.discretize(4), Err(Error::BadN { .. })));
        assert!(matches!(d.discretize(10 + 1), Err(Error::BadN { .. })));
    }

    #[test]
    fn sampling_layout_and_derivatives() {
        let d = CircularDomain::new(vec![c(0.3, 0.1), c(-0.4, -0.2)], vec![0.2, 0.15], 0.0)
            .unwrap();
        let s = d.discretize(16).unwrap();
        assert_eq!(s.len(), 48);
        assert_eq!(s.dzeta()[0], Complex64::i());
        for k in 0..s.len() {
            let j = s.component_of(k);
            let sign = if j == 0 { 1.0 } else { -1.0 };
            let expect = Complex64::i() * sign * s.dzeta()[k];
            assert!((s.ddzeta()[k] - expect).norm() < 1e-15);
            assert!(s.dzeta()[k].norm() > 0.0);
            let (z, _, _) = parametrize(&d, j, s.param_of(k));
            assert_eq!(z, s.zeta()[k]);
        }
    }

    #[test]
    fn locate_examples() {
        let disk = CircularDomain::unit_disk();
        assert_eq!(disk.locate(c(0.0, 0.0), 0.01), Location::Inside);
        assert_eq!(disk.locate(c(0.995, 0.0), 0.01), Location::NearBoundary);
        assert_eq!(disk.locate(c(1.5, 0.0), 0.01), Location::Outside);
        let d = CircularDomain::new(vec![c(0.0, 0.0)], vec![0.4], 0.0).unwrap();
        assert_eq!(d.locate(c(0.2, 0.0), 0.0), Location::Outside);
        assert_eq!(d.locate(c(0.41, 0.0), 0.02), Location::NearBoundary);
        assert_eq!(d.locate(c(0.7, 0.0), 0.02), Location::Inside);
    }
}
