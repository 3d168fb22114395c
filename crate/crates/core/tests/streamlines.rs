use hele_shaw::{
    solve_bubbles, streamlines, BubbleProblem, CircularDomain, Geometry, GmresSettings, Levels,
    StreamlineSettings,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn single_bubble_centre_streamline_is_the_real_axis() {
    let p = BubbleProblem::new(Geometry::FreeSpace, CircularDomain::unit_disk(), 2.0, c(0.0, 0.0), 64);
    let sol = solve_bubbles(&p, &GmresSettings::default()).unwrap();
    let settings = StreamlineSettings {
        levels: Levels::Values(vec![0.0]),
        ..Default::default()
    };
    let lines = streamlines(&sol, &settings).unwrap();
    assert!(!lines.is_empty());
    for l in &lines {
        for z in &l.z {
            assert!(z.im.abs() < 1e-8, "Im z = {}", z.im);
        }
    }
}

#[test]
fn refined_vertices_sit_on_their_level() {
    let d = CircularDomain::new(vec![c(0.0, 0.0)], vec![0.4], 0.0).unwrap();
    let p = BubbleProblem::new(Geometry::FreeSpace, d, 2.0, c(0.0, 0.4f64.sqrt()), 128);
    let sol = solve_bubbles(&p, &GmresSettings::default()).unwrap();
    let settings = StreamlineSettings {
        resolution: 120,
        levels: Levels::Count(8),
        ..Default::default()
    };
    let lines = streamlines(&sol, &settings).unwrap();
    assert!(lines.len() >= 4);
    let levels: std::collections::BTreeSet<u64> = lines.iter().map(|l| l.level.to_bits()).collect();
    assert!(levels.len() >= 4);
    for l in &lines {
        let vals = sol.eval(&l.zeta).unwrap();
        for (_, t, _) in vals {
            assert!((t.im - l.level).abs() < 1e-6, "{} vs {}", t.im, l.level);
        }
    }
}

#[test]
fn up_down_symmetric_channel_gives_mirrored_streamlines() {
    let d = CircularDomain::new(vec![c(0.0, 0.5), c(0.0, -0.5)], vec![0.35, 0.35], 0.0).unwrap();
    let p = BubbleProblem::new(Geometry::Channel, d, 2.0, c(0.0, 0.0), 128);
    let sol = solve_bubbles(&p, &GmresSettings::default()).unwrap();
    let settings = StreamlineSettings {
        resolution: 150,
        levels: Levels::Count(10),
        ..Default::default()
    };
    let lines = streamlines(&sol, &settings).unwrap();
    assert!(!lines.is_empty());
    let cell = 2.0 / 149.0;
    // directed distance from every point to the closest mirrored vertex,
    // measured in ζ so the tolerance is the grid spacing
    let zeta: Vec<Complex64> = lines.iter().flat_map(|l| l.zeta.iter().copied()).collect();
    let zeta_m: Vec<Complex64> = zeta.iter().map(|z| z.conj()).collect();
    let hausdorff = |a: &[Complex64], b: &[Complex64]| {
        a.iter()
            .map(|p| b.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let h = hausdorff(&zeta, &zeta_m).max(hausdorff(&zeta_m, &zeta));
    assert!(h < cell, "hausdorff {h} >= cell {cell}");
}
