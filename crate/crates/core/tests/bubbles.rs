use std::f64::consts::{PI, TAU};

use hele_shaw::{
    rescale_to_area, solve_bubbles, BubbleProblem, BubbleSolution, CircularDomain, Geometry,
    GmresSettings,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn extent(curve: &[Complex64]) -> (f64, f64) {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for z in curve {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    (x1 - x0, y1 - y0)
}

fn single(speed: f64) -> BubbleSolution {
    let p = BubbleProblem::new(Geometry::FreeSpace, CircularDomain::unit_disk(), speed, c(0.0, 0.0), 256);
    solve_bubbles(&p, &GmresSettings::default()).unwrap()
}

fn free_pair(speed: f64, n: usize) -> BubbleSolution {
    let d = CircularDomain::new(vec![c(0.0, 0.0)], vec![0.4], 0.0).unwrap();
    let p = BubbleProblem::new(Geometry::FreeSpace, d, speed, c(0.0, 0.4f64.sqrt()), n);
    solve_bubbles(&p, &GmresSettings::default()).unwrap()
}

#[test]
fn single_bubble_is_an_ellipse_with_aspect_u_minus_one() {
    for u in [1.5, 2.0, 3.0, 4.0] {
        let sol = single(u);
        // nodes sit at the extremes t = 0, π/2, so the sampled extent is exact
        let (w, h) = extent(&sol.curves()[0]);
        assert!((w / h - (u - 1.0)).abs() < 1e-8, "U = {u}: {}", w / h);
    }
}

#[test]
fn single_bubble_at_u_two_is_a_circle() {
    let sol = single(2.0);
    let curve = &sol.curves()[0];
    let centroid = curve.iter().sum::<Complex64>() / curve.len() as f64;
    let radii: Vec<f64> = curve.iter().map(|z| (z - centroid).norm()).collect();
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    let dev = radii.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-10, "{dev:e}");
}

#[test]
fn single_bubble_area_at_u_three() {
    let sol = single(3.0);
    assert!((sol.areas()[0] - 8.0 * PI / 9.0).abs() < 1e-10);
}

#[test]
fn pole_has_unit_residue() {
    let sol = free_pair(2.0, 256);
    let alpha = sol.problem().alpha;
    let k = 64;
    let pts: Vec<Complex64> = (0..k)
        .map(|i| alpha + Complex64::from_polar(0.05, TAU * i as f64 / k as f64))
        .collect();
    let res = sol
        .eval(&pts)
        .unwrap()
        .iter()
        .zip(&pts)
        .map(|((_, _, z), p)| z * (p - alpha))
        .sum::<Complex64>()
        / k as f64;
    assert!((res - 1.0).norm() < 1e-8, "{res}");
}

#[test]
fn co_moving_potential_identity_holds_on_the_boundary() {
    let sol = free_pair(3.0, 128);
    let u = sol.problem().speed;
    let w = sol.w().boundary_phi();
    for ((w, t), z) in w.iter().zip(sol.boundary_t()).zip(sol.boundary_z()) {
        assert!((w - u * z - t).norm() <= 1e-12 * (1.0 + w.norm()));
    }
}

#[test]
fn equal_areas_and_rescale() {
    let sol = free_pair(2.0, 512);
    let a = sol.areas();
    assert!((a[0] - a[1]).abs() / PI < 1e-8, "{a:?}");
    let scaled = rescale_to_area(&sol, 0, PI).unwrap();
    for area in scaled.areas() {
        assert!((area - PI).abs() < 1e-10);
    }
}

#[test]
fn elongation_grows_with_speed() {
    let mut last = [0.0f64; 2];
    for u in [1.5, 2.0, 3.0, 4.0] {
        let sol = rescale_to_area(&free_pair(u, 256), 0, PI).unwrap();
        for (b, curve) in sol.curves().iter().enumerate() {
            let (w, _) = extent(curve);
            assert!(w >= last[b], "bubble {b} shrank at U = {u}");
            last[b] = w;
        }
    }
}

#[test]
fn mirror_domains_give_mirror_bubbles() {
    let d = CircularDomain::new(vec![c(0.0, 0.5), c(0.0, -0.5)], vec![0.35, 0.35], 0.0).unwrap();
    let n = 256;
    let p = BubbleProblem::new(Geometry::Channel, d, 2.0, c(-0.5, 0.0), n);
    let sol = solve_bubbles(&p, &GmresSettings::default()).unwrap();
    let (a, b) = (&sol.curves()[0], &sol.curves()[1]);
    for k in 0..n {
        let d = (a[k].conj() - b[(n - k) % n]).norm();
        assert!(d < 1e-8, "node {k}: {d:e}");
    }
    let report = sol.residual_report();
    assert!(report.max_boundary_residual() < 1e-8);
    assert!(report.contained && !report.any_self_intersection());
}
