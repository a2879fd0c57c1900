//! Stationary Gaussian trajectories with the Lorentzian covariance, by
//! circulant embedding on a periodic grid.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::Lorentzian;

const MIN_POINTS: usize = 256;
const CLIP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

/// How covariance square roots are realized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Embedding {
    /// Periodic embedding of length `size`; clipped eigenvalues are reported.
    Circulant { size: usize, clipped: usize },
    /// Dense Cholesky factor; used only when no embedding is non-negative.
    Dense,
}

#[derive(Clone)]
enum Factor {
    Circulant { sqrt_eigs: Vec<f64>, fft: Option<Arc<dyn Fft<f64>>> },
    Dense(DMatrix<f64>),
}

/// Reusable sampler for one covariance and one uniform grid.
#[derive(Clone)]
pub struct NoiseSampler {
    times: Vec<f64>,
    factor: Factor,
    embedding: Embedding,
    silent: bool,
}

impl std::fmt::Debug for NoiseSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NoiseSampler").field("points", &self.times.len()).field("embedding", &self.embedding).finish()
    }
}

impl NoiseSampler {
    pub fn new(spec: &Lorentzian, t_f: f64, points: usize) -> Result<Self> {
        spec.validate()?;
        if points < MIN_POINTS || t_f.is_nan() || t_f <= 0.0 {
            return Err(Error::Domain(format!("need at least {MIN_POINTS} grid points and t_f > 0")));
        }
        let dt = t_f / (points - 1) as f64;
        let times: Vec<f64> = (0..points).map(|k| k as f64 * dt).collect();
        if spec.sigma == 0.0 {
            return Ok(Self {
                times,
                factor: Factor::Circulant { sqrt_eigs: Vec::new(), fft: None },
                embedding: Embedding::Circulant { size: 0, clipped: 0 },
                silent: true,
            });
        }
        for pad in [1, 2, 4] {
            let size = 2 * (points - 1) * pad;
            if let Some((sqrt_eigs, clipped)) = circulant_factor(spec, dt, size) {
                let fft = Some(FftPlanner::new().plan_fft_forward(size));
                return Ok(Self {
                    times,
                    factor: Factor::Circulant { sqrt_eigs, fft },
                    embedding: Embedding::Circulant { size, clipped },
                    silent: false,
                });
            }
        }
        let factor = dense_factor(spec, &times)?;
        Ok(Self { times, factor: Factor::Dense(factor), embedding: Embedding::Dense, silent: false })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    /// `true` when the dense fallback was needed.
    pub fn fallback_warning(&self) -> bool {
        self.embedding == Embedding::Dense
    }

    /// Trajectory number `stream` of the family identified by `seed`.
    pub fn trajectory(&self, seed: u64, stream: u64) -> NoiseTrajectory {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NoiseTrajectory { times: self.times.clone(), values: self.sample(&mut rng), seed, stream }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.times.len();
        if self.silent {
            return vec![0.0; n];
        }
        match &self.factor {
            Factor::Circulant { sqrt_eigs, fft } => {
                let mut buf: Vec<Complex64> = sqrt_eigs
                    .iter()
                    .map(|&s| {
                        let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                        Complex64::new(re, im) * s
                    })
                    .collect();
                if let Some(fft) = fft {
                    fft.process(&mut buf);
                }
                buf.iter().take(n).map(|z| z.re).collect()
            }
            Factor::Dense(l) => {
                let z = DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
                (l * z).iter().copied().collect()
            }
        }
    }
}

/// `√(λ/M)` for the circulant extension of the covariance, or `None` when an
/// eigenvalue is more negative than the clipping tolerance.
fn circulant_factor(spec: &Lorentzian, dt: f64, size: usize) -> Option<(Vec<f64>, usize)> {
    let mut row: Vec<Complex64> = (0..size)
        .map(|j| {
            let lag = j.min(size - j) as f64 * dt;
            Complex64::from(spec.correlation(lag))
        })
        .collect();
    FftPlanner::new().plan_fft_forward(size).process(&mut row);
    let lambda_max = row.iter().map(|z| z.re).fold(0.0, f64::max);
    let floor = -CLIP * lambda_max;
    if row.iter().any(|z| z.re < floor) {
        return None;
    }
    let clipped = row.iter().filter(|z| z.re < 0.0).count();
    let m = size as f64;
    Some((row.iter().map(|z| (z.re.max(0.0) / m).sqrt()).collect(), clipped))
}

fn dense_factor(spec: &Lorentzian, times: &[f64]) -> Result<DMatrix<f64>> {
    let n = times.len();
    let cov = DMatrix::from_fn(n, n, |i, j| spec.correlation(times[i] - times[j]));
    let jitter = 1e-12 * spec.sigma * spec.sigma;
    [0.0, jitter, 1e3 * jitter]
        .into_iter()
        .find_map(|eps| (&cov + DMatrix::identity(n, n) * eps).cholesky())
        .map(|c| c.l())
        .ok_or_else(|| Error::Embedding("covariance is not positive semidefinite on this grid".into()))
}

/// One trajectory of the Lorentzian process on `points` uniform samples of `[0, t_f]`.
pub fn sample_noise_trajectory(spec: &Lorentzian, t_f: f64, points: usize, seed: u64) -> Result<NoiseTrajectory> {
    Ok(NoiseSampler::new(spec, t_f, points)?.trajectory(seed, 0))
}
