use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::model::ProjectionData;

/// Add seeded Gaussian noise with standard deviation `level * rms(data)`.
pub fn add_noise(data: &ProjectionData, level: f64, seed: u64) -> Result<ProjectionData> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(invalid("noise level", format!("{level} is not a non-negative number")));
    }
    let mut out = data.clone();
    if level == 0.0 {
        return Ok(out);
    }
    let sigma = level * data.rms();
    let normal = Normal::new(0.0, sigma).map_err(|e| invalid("noise level", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in out.values.iter_mut() {
        *v += normal.sample(&mut rng);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DetectorSet, Kind, TimeGrid};

    fn data() -> ProjectionData {
        let det = DetectorSet::circle(1.0, 64).unwrap();
        let times = TimeGrid::new(2.0, 200).unwrap();
        let vals = (0..det.len() * times.samples)
            .map(|i| (i as f64 * 0.01).sin() + 0.5)
            .collect();
        ProjectionData::new(det, times, Kind::Mean, vals).unwrap()
    }

    #[test]
    fn zero_level_is_identity() {
        let d = data();
        assert_eq!(add_noise(&d, 0.0, 1).unwrap(), d);
    }

    #[test]
    fn relative_rms_matches_level() {
        let d = data();
        let n = add_noise(&d, 0.01, 7).unwrap();
        let diff: f64 = d
            .values
            .iter()
            .zip(&n.values)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            / d.values.len() as f64;
        let rel = diff.sqrt() / d.rms();
        assert!((rel - 0.01).abs() < 0.001, "rel rms {rel}");
    }

    #[test]
    fn seeded_output_is_reproducible() {
        let d = data();
        assert_eq!(add_noise(&d, 0.05, 3).unwrap(), add_noise(&d, 0.05, 3).unwrap());
        assert_ne!(add_noise(&d, 0.05, 3).unwrap(), add_noise(&d, 0.05, 4).unwrap());
        assert!(add_noise(&d, -1.0, 3).is_err());
    }
}
