//! Brute-force reference computations: Schrödinger integration, Gaussian
//! noise synthesis and Monte-Carlo coherence estimates.

mod monte_carlo;
mod ode;
mod sampling;
mod transfer;

pub use monte_carlo::{monte_carlo_coherence, McEstimate, McSettings};
pub use ode::{integrate_fixed_step, integrate_schrodinger, OdeMethod, OdeSolution, OdeTolerance};
pub use sampling::{sample_noise_trajectory, Embedding, NoiseSampler, NoiseTrajectory};
pub use transfer::{closed_system_evolution, closed_system_transfer_oracle, TransferOutcome};

/// Pairwise (cascade) summation, independent of how the inputs were produced.
pub(crate) fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    match values.len() {
        0 => T::default(),
        1..=8 => values.iter().fold(T::default(), |acc, &v| acc + v),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}
