/// Linear interpolation of samples `v[j]` at `x0 + j*dx`; zero outside.
#[inline]
pub fn lerp(v: &[f64], x0: f64, dx: f64, x: f64) -> f64 {
    let u = (x - x0) / dx;
    if !(u >= 0.0) {
        return 0.0;
    }
    let i = u as usize;
    if i + 1 >= v.len() {
        return if i + 1 == v.len() && u == i as f64 { v[i] } else { 0.0 };
    }
    let f = u - i as f64;
    v[i] + f * (v[i + 1] - v[i])
}

/// Cubic (Catmull-Rom) interpolation on uniform samples; zero outside.
#[inline]
pub fn cubic(v: &[f64], x0: f64, dx: f64, x: f64) -> f64 {
    let u = (x - x0) / dx;
    let n = v.len();
    if !(u >= 0.0) || u > (n - 1) as f64 {
        return 0.0;
    }
    let i = (u as usize).min(n - 2);
    let f = u - i as f64;
    let p1 = v[i];
    let p2 = v[i + 1];
    let p0 = if i > 0 { v[i - 1] } else { 2.0 * p1 - p2 };
    let p3 = if i + 2 < n { v[i + 2] } else { 2.0 * p2 - p1 };
    let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    let c = -0.5 * p0 + 0.5 * p2;
    ((a * f + b) * f + c) * f + p1
}

/// First derivative by central differences, one-sided second-order at the ends.
pub fn derivative(v: &[f64], dx: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        return d;
    }
    for j in 1..n - 1 {
        d[j] = (v[j + 1] - v[j - 1]) / (2.0 * dx);
    }
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dx);
    d
}

/// Second derivative by central differences, one-sided second-order at the ends.
pub fn second_derivative(v: &[f64], dx: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    if n < 4 {
        return d;
    }
    let dx2 = dx * dx;
    for j in 1..n - 1 {
        d[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / dx2;
    }
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / dx2;
    d[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / dx2;
    d
}

/// Trapezoid rule on uniform samples.
pub fn trapezoid(v: &[f64], dx: f64) -> f64 {
    match v.len() {
        0 | 1 => 0.0,
        n => dx * (0.5 * (v[0] + v[n - 1]) + v[1..n - 1].iter().sum::<f64>()),
    }
}
