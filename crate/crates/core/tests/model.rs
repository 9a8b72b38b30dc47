use std::f64::consts::PI;

use tat_core::model::*;

#[test]
fn four_point_circle_weights() {
    let d = DetectorSet::circle(1.0, 4).unwrap();
    assert_eq!(d.len(), 4);
    for (p, w) in d.positions().iter().zip(d.weights()) {
        assert!((w - PI / 2.0).abs() < 1e-15);
        assert!((norm(p) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn half_arc_weights_sum_to_pi() {
    let d = DetectorSet::arc(2.0, 0.0, PI, 37).unwrap();
    assert!((d.total_weight() - 2.0 * PI).abs() < 1e-12);
    let u = DetectorSet::arc(1.0, 0.3, PI, 50).unwrap();
    assert!((u.total_weight() - PI).abs() < 1e-12);
    for i in 0..u.len() {
        let rel = (u.angle(i) - 0.3).rem_euclid(2.0 * PI);
        assert!(rel > 0.0 && rel < PI);
    }
}

#[test]
fn sphere_weights_sum_to_area() {
    for (np, naz) in [(4, 8), (16, 32), (48, 96)] {
        let d = DetectorSet::sphere(1.5, np, naz).unwrap();
        assert!((d.total_weight() - 4.0 * PI * 2.25).abs() < 1e-6 * 4.0 * PI * 2.25);
        for (p, n) in d.positions().iter().zip(d.normals()) {
            assert!((norm(p) - 1.5).abs() < 1e-12);
            assert!((norm(n) - 1.0).abs() < 1e-12);
            assert!(dot(p, n) > 0.0);
        }
    }
}

#[test]
fn rectangle_and_cuboid_weights_are_perimeter_and_area() {
    let r = DetectorSet::rectangle([-0.5, -1.0], [1.0, 1.0], [30, 40]).unwrap();
    assert!((r.total_weight() - 7.0).abs() < 1e-12);
    let c = DetectorSet::cuboid([0.0; 3], [1.0, 2.0, 3.0], 6).unwrap();
    assert!((c.total_weight() - 22.0).abs() < 1e-12);
}

#[test]
fn invalid_geometries_are_rejected() {
    assert!(DetectorSet::circle(0.0, 8).is_err());
    assert!(DetectorSet::circle(-1.0, 8).is_err());
    assert!(DetectorSet::circle(1.0, 0).is_err());
    assert!(DetectorSet::arc(1.0, 0.0, 7.0, 8).is_err());
    assert!(DetectorSet::sphere(f64::NAN, 4, 8).is_err());
}

#[test]
fn disk_on_four_by_four_grid_fills_central_cells() {
    let spec = GridSpec::centered(Dim::Two, 1.0, 4).unwrap();
    let img = Phantom::new(Dim::Two)
        .with_ball([0.0; 3], 0.5, 2.0)
        .unwrap()
        .rasterize(&spec)
        .unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let central = (1..3).contains(&i) && (1..3).contains(&j);
            assert_eq!(img.get(i, j, 0), if central { 2.0 } else { 0.0 });
        }
    }
}

#[test]
fn averaged_rasterization_preserves_mass() {
    let spec = GridSpec::centered(Dim::Two, 1.0, 64).unwrap();
    let img = Phantom::new(Dim::Two)
        .with_ball([0.1, -0.2, 0.0], 0.4, 1.0)
        .unwrap()
        .rasterize_averaged(&spec, 8)
        .unwrap();
    let mass: f64 = img.values.iter().sum::<f64>() * spec.spacing * spec.spacing;
    assert!((mass - PI * 0.16).abs() < 2e-3 * PI * 0.16);
}

#[test]
fn overlapping_balls_add() {
    let p = Phantom::new(Dim::Three)
        .with_ball([0.0; 3], 0.5, 1.0)
        .unwrap()
        .with_ball([0.2, 0.0, 0.0], 0.5, 0.5)
        .unwrap();
    assert_eq!(p.eval(&[0.1, 0.0, 0.0]), 1.5);
    assert_eq!(p.eval(&[-0.45, 0.0, 0.0]), 1.0);
    assert_eq!(p.eval(&[0.0, 0.0, 0.9]), 0.0);
}

#[test]
fn phantom_validation() {
    assert!(Phantom::new(Dim::Two).with_ball([0.0; 3], 0.0, 1.0).is_err());
    assert!(Phantom::new(Dim::Two).with_ball([0.0, 0.0, 0.5], 0.2, 1.0).is_err());
    assert!(Phantom::new(Dim::Two).with_ball([0.0; 3], 0.2, f64::NAN).is_err());
}

#[test]
fn grid_geometry() {
    let s = GridSpec::centered(Dim::Three, 0.5, 10).unwrap();
    assert_eq!(s.len(), 1000);
    assert!((s.spacing - 0.1).abs() < 1e-15);
    assert_eq!(s.unravel(s.index(3, 4, 5)), [3, 4, 5]);
    let p = s.point(0, 0, 9);
    assert!((p[0] + 0.45).abs() < 1e-12 && (p[2] - 0.45).abs() < 1e-12);
    assert!(GridSpec::centered(Dim::Two, -1.0, 4).is_err());
    let n = GridSpec::nodes(Dim::Two, 0.0, 1.0, 8).unwrap();
    assert_eq!(n.shape, [9, 9, 1]);
    let mask = s.interior_mask(2);
    assert_eq!(mask.iter().filter(|&&b| b).count(), 6 * 6 * 6);
}

#[test]
fn bilinear_sampling_reproduces_affine_functions() {
    let s = GridSpec::centered(Dim::Two, 1.0, 16).unwrap();
    let img = ImageGrid::from_fn(s, |x| 1.0 + 2.0 * x[0] - 3.0 * x[1]);
    for &(x, y) in &[(0.1, 0.2), (-0.8, 0.93), (0.0, 0.0)] {
        let v = img.sample(&[x, y, 0.0]);
        assert!((v - (1.0 + 2.0 * x - 3.0 * y)).abs() < 1e-12);
    }
    assert_eq!(img.sample(&[1.5, 0.0, 0.0]), 0.0);
}

fn ramp(det: DetectorSet, kind: Kind) -> ProjectionData {
    let times = TimeGrid::new(2.0, 41).unwrap();
    let n = det.len();
    let values = (0..n)
        .flat_map(|i| (0..41).map(move |j| 1.0 + 0.1 * i as f64 + 0.05 * j as f64))
        .collect();
    ProjectionData::new(det, times, kind, values).unwrap()
}

#[test]
fn kind_round_trip() {
    for det in [
        DetectorSet::circle(1.0, 8).unwrap(),
        DetectorSet::sphere(1.0, 4, 8).unwrap(),
    ] {
        let g = ramp(det, Kind::Mean);
        let back = g.convert_kind(Kind::Integral).convert_kind(Kind::Mean);
        for (row_a, row_b) in g.rows().zip(back.rows()) {
            for (a, b) in row_a.iter().zip(row_b).skip(1) {
                assert!((a - b).abs() < 1e-12 * a.abs());
            }
        }
    }
}

#[test]
fn area_law_converts_to_unit_means() {
    let det = DetectorSet::sphere(1.0, 4, 8).unwrap();
    let times = TimeGrid::new(2.0, 21).unwrap();
    let values = (0..det.len())
        .flat_map(|_| (0..21).map(|j| 4.0 * PI * (0.1 * j as f64).powi(2)))
        .collect();
    let g = ProjectionData::new(det, times, Kind::Integral, values).unwrap();
    let m = g.convert_kind(Kind::Mean);
    assert!(m.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn normalization_rescales_radius_time_and_amplitude() {
    let g = ramp(DetectorSet::sphere(2.0, 4, 8).unwrap(), Kind::Integral);
    let (n, r) = g.normalized().unwrap();
    assert_eq!(r, 2.0);
    assert!((n.times.t_max - 1.0).abs() < 1e-15);
    assert!((n.detectors.radius().unwrap() - 1.0).abs() < 1e-15);
    assert!((n.values[3] - g.values[3] / 4.0).abs() < 1e-15);
    let flat = ramp(DetectorSet::rectangle([0.0, 0.0], [1.0, 1.0], [4, 4]).unwrap(), Kind::Mean);
    assert!(flat.normalized().is_err());
}

#[test]
fn projection_shape_is_validated() {
    let det = DetectorSet::circle(1.0, 4).unwrap();
    let times = TimeGrid::new(1.0, 5).unwrap();
    assert!(ProjectionData::new(det.clone(), times, Kind::Mean, vec![0.0; 19]).is_err());
    assert!(ProjectionData::new(det, times, Kind::Mean, vec![f64::NAN; 20]).is_err());
    assert!(TimeGrid::new(0.0, 5).is_err());
}

#[test]
fn left_half_arc_visibility_of_square() {
    let arc = DetectorSet::arc(1.0, PI / 2.0, PI, 64).unwrap();
    let pts = square_interface([0.15, 0.0], 0.5, 4);
    let map = visibility_map(&pts, &arc).unwrap();
    for (p, vis) in map.iter() {
        // Horizontal normal lines always cross the left half; vertical ones only for x < 0.
        let expect = p.normal[0] != 0.0 || p.position[0] < 0.0;
        assert_eq!(vis, expect, "{:?}", p);
    }
    let full = DetectorSet::circle(1.0, 64).unwrap();
    assert_eq!(visibility_map(&pts, &full).unwrap().visible_count(), pts.len());
}

#[test]
fn disk_boundary_visibility_from_half_arc() {
    let arc = DetectorSet::arc(1.0, PI / 2.0, PI, 64).unwrap();
    let ball = Ball {
        center: [0.0; 3],
        radius: 0.3,
        value: 1.0,
    };
    // Normals through the center hit the circle at ±n, so every point is visible.
    let map = visibility_map(&ball_interface(&ball, 32), &arc).unwrap();
    assert_eq!(map.visible_count(), 32);
    let offset = Ball {
        center: [0.5, 0.0, 0.0],
        ..ball
    };
    let map = visibility_map(&ball_interface(&offset, 32), &arc).unwrap();
    assert!(map.visible_count() < 32);
    assert!(map.visible_count() > 0);
    let sphere = DetectorSet::sphere(1.0, 4, 8).unwrap();
    assert!(visibility_map(&ball_interface(&ball, 4), &sphere).is_err());
}
