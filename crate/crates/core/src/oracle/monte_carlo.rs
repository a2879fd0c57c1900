use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pairwise_sum;
use super::sampling::NoiseSampler;
use crate::adiabatic::{closed_system_coherence, ProtocolParams};
use crate::error::{Error, Result};
use crate::noise::Lorentzian;
use crate::path::DrivePath;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSettings {
    pub trials: usize,
    pub seed: u64,
    pub grid_points: usize,
}

impl Default for McSettings {
    fn default() -> Self {
        Self { trials: 10_000, seed: 0x5eed, grid_points: 4097 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: Complex64,
    /// Jackknife standard error of `|mean|`.
    pub std_error: f64,
    pub trials: usize,
    /// Set when the noise could not be embedded in a circulant and a dense
    /// factorization was used.
    pub fallback_warning: bool,
}

/// Sample average of `αβ* e^{−iγ_d} e^{−iX}` with `X = ∫ w(θ(t)) δω1(t) dt`.
pub fn monte_carlo_coherence(
    params: &ProtocolParams,
    path: &DrivePath,
    spec: &Lorentzian,
    settings: McSettings,
) -> Result<McEstimate> {
    if settings.trials < 100 {
        return Err(Error::Domain("Monte-Carlo estimates need at least 100 trials".into()));
    }
    params.check_path(path)?;
    let t_f = params.t_f;
    let sampler = NoiseSampler::new(spec, t_f, settings.grid_points)?;
    let dt = t_f / (settings.grid_points - 1) as f64;
    let last = settings.grid_points - 1;
    // Trapezoid weights folded with the phase weight of the path.
    let weights: Vec<f64> = sampler
        .times()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let end = if k == 0 || k == last { 0.5 } else { 1.0 };
            end * dt * spec.weight(path.s(t))
        })
        .collect();

    let samples: Vec<Complex64> = (0..settings.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
            rng.set_stream(trial);
            let noise = sampler.sample(&mut rng);
            let products: Vec<f64> = weights.iter().zip(&noise).map(|(w, x)| w * x).collect();
            Complex64::from_polar(1.0, -pairwise_sum(&products))
        })
        .collect();

    let n = samples.len() as f64;
    let total = pairwise_sum(&samples);
    let mean = total / n;
    let leave_one_out: Vec<f64> = samples.iter().map(|z| ((total - z) / (n - 1.0)).norm()).collect();
    let jk_mean = pairwise_sum(&leave_one_out) / n;
    let spread: Vec<f64> = leave_one_out.iter().map(|v| (v - jk_mean).powi(2)).collect();
    let std_error = ((n - 1.0) / n * pairwise_sum(&spread)).sqrt();

    let c0 = closed_system_coherence(params, path, t_f)?;
    Ok(McEstimate {
        mean: c0 * mean,
        std_error: std_error * c0.norm(),
        trials: settings.trials,
        fallback_warning: sampler.fallback_warning(),
    })
}
