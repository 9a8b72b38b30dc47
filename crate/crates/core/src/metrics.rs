//! Error norms between images on the same grid.

use crate::error::{invalid, Result};
use crate::model::ImageGrid;

fn check(a: &ImageGrid, b: &ImageGrid) -> Result<()> {
    if a.spec != b.spec {
        return Err(invalid("image", "grids differ"));
    }
    Ok(())
}

fn masked<'a>(a: &'a ImageGrid, b: &'a ImageGrid, mask: Option<&'a [bool]>) -> impl Iterator<Item = (f64, f64)> + 'a {
    a.values
        .iter()
        .zip(&b.values)
        .enumerate()
        .filter(move |(i, _)| mask.is_none_or(|m| m[*i]))
        .map(|(_, (x, y))| (*x, *y))
}

/// `‖a - b‖₂ / ‖b‖₂` over the masked samples; `b` is the reference.
pub fn rel_l2(a: &ImageGrid, reference: &ImageGrid, mask: Option<&[bool]>) -> Result<f64> {
    check(a, reference)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in masked(a, reference, mask) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    Ok(if den == 0.0 {
        if num == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (num / den).sqrt()
    })
}

/// `max |a - b|` over the masked samples.
pub fn linf(a: &ImageGrid, reference: &ImageGrid, mask: Option<&[bool]>) -> Result<f64> {
    check(a, reference)?;
    Ok(masked(a, reference, mask).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Discrete `‖a - b‖₂ h^{dim/2}`.
pub fn l2(a: &ImageGrid, reference: &ImageGrid, mask: Option<&[bool]>) -> Result<f64> {
    check(a, reference)?;
    let cell = a.spec.spacing.powi(a.spec.dim.n() as i32);
    let s: f64 = masked(a, reference, mask).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((s * cell).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub l2: f64,
    pub linf: f64,
    pub rel_l2: f64,
    pub masked_l2: f64,
    pub masked_linf: f64,
    pub masked_rel_l2: f64,
}

/// All norms, the masked ones excluding `rings` boundary layers.
pub fn compare(a: &ImageGrid, reference: &ImageGrid, rings: usize) -> Result<Comparison> {
    let mask = a.spec.interior_mask(rings);
    Ok(Comparison {
        l2: l2(a, reference, None)?,
        linf: linf(a, reference, None)?,
        rel_l2: rel_l2(a, reference, None)?,
        masked_l2: l2(a, reference, Some(&mask))?,
        masked_linf: linf(a, reference, Some(&mask))?,
        masked_rel_l2: rel_l2(a, reference, Some(&mask))?,
    })
}
