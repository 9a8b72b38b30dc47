mod common;

use common::{bessel_integral_j, bisect, power_series_j, y0_integral};
use tat_core::specfun::{bessel_j, bessel_jp, bessel_y0, bessel_zeros};
use tat_core::Error;

#[test]
fn values_at_origin() {
    assert_eq!(bessel_j(0, 0.0), 1.0);
    assert_eq!(bessel_j(1, 0.0), 0.0);
    assert_eq!(bessel_j(5, 0.0), 0.0);
}

#[test]
fn matches_power_series_below_twelve() {
    for m in 0..=6 {
        for i in 1..=240 {
            let x = 0.05 * i as f64;
            let (a, b) = (bessel_j(m, x), power_series_j(m, x));
            assert!((a - b).abs() < 1e-10, "J_{m}({x}): {a} vs {b}");
        }
    }
}

#[test]
fn matches_integral_representation_up_to_one_hundred() {
    for m in [0, 1, 2, 3, 7] {
        for i in 0..=400 {
            let x = 0.25 * i as f64;
            let (a, b) = (bessel_j(m, x), bessel_integral_j(m, x, 512));
            assert!((a - b).abs() < 1e-10, "J_{m}({x}): {a} vs {b}");
        }
    }
}

#[test]
fn first_zero_of_j0_from_power_series_bisection() {
    let oracle = bisect(|x| power_series_j(0, x), 2.0, 3.0);
    assert!((oracle - 2.404825557695773).abs() < 1e-12);
    assert!(bessel_j(0, 2.404825557695773).abs() < 1e-10);
    let table = bessel_zeros(0, 1).unwrap();
    assert!((table.zeros[0] - oracle).abs() < 1e-10);
}

#[test]
fn first_zero_of_j1_from_power_series_bisection() {
    let oracle = bisect(|x| power_series_j(1, x), 3.0, 4.5);
    assert!((oracle - 3.8317059702).abs() < 1e-9);
    let table = bessel_zeros(1, 1).unwrap();
    assert!((table.zeros[0] - oracle).abs() < 1e-10);
}

#[test]
fn y0_diverges_logarithmically() {
    let y = bessel_y0(1e-6).unwrap();
    assert!(y < -8.0, "{y}");
    let leading = 2.0 / std::f64::consts::PI * ((0.5e-6f64).ln() + 0.577_215_664_901_532_9);
    assert!((y - leading).abs() < 1e-9);
}

#[test]
fn y0_rejects_nonpositive_arguments() {
    assert!(matches!(bessel_y0(0.0), Err(Error::Domain(_))));
    assert!(matches!(bessel_y0(-1.0), Err(Error::Domain(_))));
}

#[test]
fn y0_matches_integral_representation() {
    for i in 1..=200 {
        let x = 0.5 * i as f64;
        let (a, b) = (bessel_y0(x).unwrap(), y0_integral(x));
        assert!((a - b).abs() < 1e-9, "Y_0({x}): {a} vs {b}");
    }
    for x in [1e-6, 1e-4, 1e-2, 0.1, 0.3] {
        let (a, b) = (bessel_y0(x).unwrap(), y0_integral(x));
        assert!((a - b).abs() < 1e-9, "Y_0({x}): {a} vs {b}");
    }
}

#[test]
fn y0_at_first_zero_of_j0() {
    let j01 = bessel_zeros(0, 1).unwrap().zeros[0];
    let oracle = y0_integral(j01);
    assert!((oracle - 0.509_924_383_4).abs() < 1e-9);
    assert!((bessel_y0(j01).unwrap() - oracle).abs() < 1e-9);
}

#[test]
fn y0_maximum_sits_at_first_zero_of_y1() {
    // Y_0' = -Y_1; the global maximum 0.5207864... is attained near 2.19714.
    let d = 1e-3;
    let slope = |x: f64| {
        let y = |u: f64| bessel_y0(u).unwrap();
        (8.0 * (y(x + d) - y(x - d)) - (y(x + 2.0 * d) - y(x - 2.0 * d))) / (12.0 * d)
    };
    let x_max = bisect(slope, 1.5, 3.0);
    assert!((x_max - 2.197_141_326).abs() < 1e-6);
    let peak = y0_integral(x_max);
    assert!((peak - 0.520_786_4).abs() < 1e-7);
    assert!((bessel_y0(x_max).unwrap() - peak).abs() < 1e-9);
}

#[test]
fn wronskian() {
    for x in [1.0, 2.0, 5.0, 17.0, 40.0] {
        let d = 1e-3;
        let y = |u: f64| bessel_y0(u).unwrap();
        let y0p = (8.0 * (y(x + d) - y(x - d)) - (y(x + 2.0 * d) - y(x - 2.0 * d))) / (12.0 * d);
        let w = bessel_j(0, x) * y0p - bessel_jp(0, x) * bessel_y0(x).unwrap();
        let expect = 2.0 / (std::f64::consts::PI * x);
        assert!((w - expect).abs() < 1e-9, "x = {x}: {w} vs {expect}");
    }
}

#[test]
fn derivative_matches_recurrence() {
    for m in 0..5u32 {
        for i in 1..100 {
            let x = 0.37 * i as f64;
            let expect = if m == 0 {
                -bessel_j(1, x)
            } else {
                0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
            };
            assert!((bessel_jp(m, x) - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn three_term_recurrence() {
    for m in 1..10u32 {
        for i in 1..=200 {
            let x = 0.5 * i as f64;
            let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
            let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
            assert!((lhs - rhs).abs() < 1e-9, "m = {m}, x = {x}");
        }
    }
}

#[test]
fn zero_residuals_and_spacing() {
    let table = bessel_zeros(0, 40).unwrap();
    for z in &table.zeros {
        assert!(bessel_j(0, *z).abs() < 1e-10);
    }
    for k in 20..39 {
        let gap = table.zeros[k + 1] - table.zeros[k];
        assert!((gap - std::f64::consts::PI).abs() < 0.01);
    }
}

#[test]
fn zeros_interleave() {
    for m in 0..6u32 {
        let a = bessel_zeros(m, 12).unwrap().zeros;
        let b = bessel_zeros(m + 1, 12).unwrap().zeros;
        for k in 0..11 {
            let between = b.iter().filter(|&&z| z > a[k] && z < a[k + 1]).count();
            assert_eq!(between, 1, "order {m}, gap {k}");
        }
        assert!(b[0] > a[0]);
    }
}

