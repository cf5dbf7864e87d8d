//! Seeded Monte Carlo over the sphere and the ball. Each configuration names a
//! ChaCha stream, so sweeps can give every row its own reproducible sequence.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, Open01, StandardNormal};

use super::{IntegrationResult, Method, QuadConfig};
use crate::error::{Error, Result};
use crate::geometry::{CPoint, C64};

pub fn rng_for(cfg: &QuadConfig) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cfg.stream);
    rng
}

/// A point of the unit sphere, uniform for the normalized surface measure.
pub fn sample_sphere(rng: &mut ChaCha8Rng, n: usize) -> CPoint {
    loop {
        let coords: Vec<C64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        if let Some(p) = CPoint::new(coords).normalized() {
            return p;
        }
    }
}

/// A point of the unit ball, uniform for the normalized volume measure.
pub fn sample_ball(rng: &mut ChaCha8Rng, n: usize) -> CPoint {
    let xi = sample_sphere(rng, n);
    let u: f64 = Open01.sample(rng);
    xi.scale(C64::new(u.powf(1.0 / (2 * n) as f64), 0.0))
}

pub(crate) fn mc_mean(
    f: &dyn Fn(&CPoint) -> f64,
    draw: fn(&mut ChaCha8Rng, usize) -> CPoint,
    n: usize,
    cfg: &QuadConfig,
) -> Result<IntegrationResult> {
    let mut rng = rng_for(cfg);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..cfg.mc_samples {
        let v = f(&draw(&mut rng, n));
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        let k = (i + 1) as f64;
        let d = v - mean;
        mean += d / k;
        m2 += d * (v - mean);
    }
    let count = cfg.mc_samples as f64;
    let var = m2 / (count - 1.0);
    Ok(IntegrationResult {
        value: mean,
        error_estimate: (var / count).sqrt(),
        evaluations: cfg.mc_samples,
        method: Method::MonteCarlo,
    })
}
