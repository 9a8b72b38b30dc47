use tat_core::forward::{add_noise, forward_analytic};
use tat_core::model::*;
use tat_core::range::*;
use tat_core::specfun::{bessel_j, bessel_zeros};

fn data(p: &Phantom, nd: usize, nt: usize) -> ProjectionData {
    let det = DetectorSet::circle(1.0, nd).unwrap();
    forward_analytic(p, &det, TimeGrid::new(2.0, nt).unwrap(), Kind::Mean).unwrap()
}

fn two_balls() -> Phantom {
    Phantom::new(Dim::Two)
        .with_ball([0.3, 0.1, 0.0], 0.35, 1.0)
        .unwrap()
        .with_ball([-0.25, -0.2, 0.0], 0.2, 0.5)
        .unwrap()
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

#[test]
fn centered_disk_satisfies_the_moment_conditions() {
    let p = Phantom::new(Dim::Two).with_ball([0.0; 3], 0.5, 1.0).unwrap();
    let r = check_moments(&data(&p, 64, 257), 5).unwrap();
    assert!(r[0] < 1e-20, "{}", r[0]);
    assert!(max(&r) < 1e-3, "{r:?}");
}

#[test]
fn off_center_data_satisfies_all_conditions() {
    let g = data(&two_balls(), 128, 513);
    assert!(max(&check_moments(&g, 5).unwrap()) < 1e-3);
    let modes = disk_modes(4, 2).unwrap();
    assert_eq!(modes.len(), 10);
    assert!(max(&check_orthogonality(&g, &modes).unwrap()) < 1e-3);
    let bz: Vec<f64> = check_bessel_zeros(&g, 3, 3).unwrap().concat();
    assert!(max(&bz) < 1e-2, "{bz:?}");
}

#[test]
fn noise_raises_every_family() {
    let g = data(&two_balls(), 256, 513);
    let cfg = RangeConfig::default();
    let clean = validate(&g, &cfg).unwrap();
    assert!(clean.passes());
    let noisy = validate(&add_noise(&g, 0.05, 7).unwrap(), &cfg).unwrap();
    assert!(!noisy.passes());
    assert!(max(&noisy.moments) >= 10.0 * max(&clean.moments));
    assert!(max(&noisy.orthogonality) >= 10.0 * max(&clean.orthogonality));
    assert!(max(&noisy.bessel_zeros.concat()) >= 10.0 * max(&clean.bessel_zeros.concat()));
}

#[test]
fn radial_bessel_witness_fails_orthogonality() {
    let lam = bessel_zeros(0, 1).unwrap().zeros[0];
    let det = DetectorSet::circle(1.0, 64).unwrap();
    let times = TimeGrid::new(2.0, 257).unwrap();
    let values = (0..64)
        .flat_map(|_| (0..257).map(|j| bessel_j(0, lam * times.t(j))))
        .collect();
    let g = ProjectionData::new(det, times, Kind::Mean, values).unwrap();
    let r = check_orthogonality(&g, &[DiskMode { order: 0, lambda: lam }]).unwrap();
    assert!(r[0] > 0.1, "{}", r[0]);
}

#[test]
fn residuals_are_scale_invariant() {
    let g = data(&two_balls(), 64, 257);
    let cfg = RangeConfig {
        k_max: 3,
        max_order: 2,
        per_order: 2,
        ..RangeConfig::default()
    };
    let noisy = add_noise(&g, 0.02, 1).unwrap();
    let a = validate(&noisy, &cfg).unwrap();
    let b = validate(&noisy.scaled(-37.5), &cfg).unwrap();
    let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(u, v)| (u - v).abs() <= 1e-9 * u.abs().max(1e-300));
    assert!(close(&a.moments, &b.moments));
    assert!(close(&a.orthogonality, &b.orthogonality));
    assert!(close(&a.bessel_zeros.concat(), &b.bessel_zeros.concat()));
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = rank as f64;
    }
    r
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn orthogonality_and_bessel_zero_checks_flag_the_same_data() {
    let g = data(&two_balls(), 96, 257);
    let modes = disk_modes(3, 2).unwrap();
    let (mut orth, mut zeros) = (Vec::new(), Vec::new());
    for k in 0..12u64 {
        let level = 0.002 * (1u64 << (k % 6)) as f64;
        let noisy = add_noise(&g, level, 100 + k).unwrap();
        orth.push(max(&check_orthogonality(&noisy, &modes).unwrap()));
        zeros.push(max(&check_bessel_zeros(&noisy, 3, 2).unwrap().concat()));
    }
    let rho = spearman(&orth, &zeros);
    assert!(rho > 0.8, "{rho} {orth:?} {zeros:?}");
}

#[test]
fn validators_refuse_unsupported_data() {
    let g = data(&two_balls(), 32, 65);
    let short = ProjectionData::zeros(g.detectors.clone(), TimeGrid::new(1.5, 49).unwrap(), Kind::Mean);
    assert!(check_orthogonality(&short, &disk_modes(1, 1).unwrap()).is_err());
    let rect = ProjectionData::zeros(
        DetectorSet::rectangle([-1.0, -1.0], [1.0, 1.0], [8, 8]).unwrap(),
        TimeGrid::new(2.0, 33).unwrap(),
        Kind::Mean,
    );
    assert!(validate(&rect, &RangeConfig::default()).is_err());
    let sphere = ProjectionData::zeros(
        DetectorSet::sphere(1.0, 4, 8).unwrap(),
        TimeGrid::new(2.0, 33).unwrap(),
        Kind::Mean,
    );
    assert!(check_moments(&sphere, 1).is_err());
}
