//! Dormand–Prince 5(4) integration of `i ∂ψ/∂t = H(t) ψ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{ComplexMatrix4, StateVector4};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OdeTolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        Self { rtol: 1e-11, atol: 1e-13 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdeMethod {
    pub scheme: &'static str,
    pub controller: &'static str,
    pub tolerance: OdeTolerance,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<StateVector4>,
    pub method: OdeMethod,
}

impl OdeSolution {
    pub fn final_state(&self) -> &StateVector4 {
        self.states.last().expect("solution holds at least the initial state")
    }

    /// `max_t |‖ψ(t)‖ − 1|` over the recorded states, relative to `‖ψ0‖`.
    pub fn max_norm_drift(&self) -> f64 {
        let n0 = self.states[0].norm_sqr().sqrt();
        self.states.iter().map(|s| (s.norm_sqr().sqrt() / n0 - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn derivative<H>(hamiltonian: &H, t: f64, psi: &StateVector4) -> Result<StateVector4>
where
    H: Fn(f64) -> Result<ComplexMatrix4>,
{
    Ok(hamiltonian(t)?.apply(psi).scale(Complex64::new(0.0, -1.0)))
}

fn combine(psi: &StateVector4, h: f64, weights: &[f64], k: &[StateVector4]) -> StateVector4 {
    weights.iter().zip(k).filter(|(w, _)| **w != 0.0).fold(*psi, |acc, (w, ki)| acc.axpy(Complex64::from(h * w), ki))
}

fn check_hermitian(h: &ComplexMatrix4, t: f64) -> Result<()> {
    if !h.is_hermitian(1e-12 * h.max_abs().max(1.0)) {
        return Err(Error::Contract(format!("Hamiltonian is not Hermitian at t = {t}")));
    }
    Ok(())
}

/// Adaptive integration from `0` to `t_f`, recording the state at each of
/// `sample_times` (sorted, inside `[0, t_f]`; `t_f` alone when empty).
pub fn integrate_schrodinger<H>(
    hamiltonian: H,
    psi0: &StateVector4,
    t_f: f64,
    tol: OdeTolerance,
    sample_times: &[f64],
) -> Result<OdeSolution>
where
    H: Fn(f64) -> Result<ComplexMatrix4>,
{
    let tol_ok = tol.rtol >= 1e-12 && tol.atol > 0.0;
    if !tol_ok {
        return Err(Error::Domain(format!("need rtol ≥ 1e−12 and atol > 0, got {:?}", tol)));
    }
    if t_f.is_nan() || t_f <= 0.0 || t_f.is_infinite() {
        return Err(Error::Domain("t_f must be positive".into()));
    }
    let mut targets: Vec<f64> = if sample_times.is_empty() { vec![t_f] } else { sample_times.to_vec() };
    if targets.windows(2).any(|w| w[1] < w[0]) || targets.iter().any(|&t| !(0.0..=t_f).contains(&t)) {
        return Err(Error::Domain("sample times must be sorted and inside [0, t_f]".into()));
    }
    targets.dedup();

    let mut method = OdeMethod {
        scheme: "dormand-prince 5(4)",
        controller: "elementary error-per-step, safety 0.9, factor in [0.2, 5]",
        tolerance: tol,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut times = Vec::with_capacity(targets.len());
    let mut states = Vec::with_capacity(targets.len());
    let mut t = 0.0;
    let mut psi = *psi0;
    let mut k0 = derivative(&hamiltonian, t, &psi)?;
    check_hermitian(&hamiltonian(0.0)?, 0.0)?;
    let scale = hamiltonian(0.0)?.max_abs().max(1.0 / t_f);
    let mut h = (0.01 / scale).min(t_f);
    let h_min = 1e-14 * t_f;

    for &target in &targets {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let mut k = [k0, k0, k0, k0, k0, k0, k0];
            for s in 1..7 {
                let y = combine(&psi, step, &A[s][..s], &k[..s]);
                k[s] = derivative(&hamiltonian, t + C[s] * step, &y)?;
            }
            let next = combine(&psi, step, &A[6], &k[..6]);
            let err_vec = combine(&StateVector4::new(0.0.into(), 0.0.into(), 0.0.into(), 0.0.into()), step, &E, &k);
            let err = (0..4)
                .map(|i| {
                    let sc = tol.atol + tol.rtol * psi.amplitude(i).norm().max(next.amplitude(i).norm());
                    (err_vec.amplitude(i).norm() / sc).powi(2)
                })
                .sum::<f64>()
                .sqrt()
                / 2.0;
            if !err.is_finite() {
                return Err(Error::Stiffness { t, h: step });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { target } else { t + step };
                psi = next;
                k0 = k[6];
                method.accepted_steps += 1;
                if !last {
                    h = step * factor;
                }
            } else {
                method.rejected_steps += 1;
                h = step * factor.min(1.0);
                if h < h_min {
                    return Err(Error::Stiffness { t, h });
                }
            }
        }
        check_hermitian(&hamiltonian(target)?, target)?;
        times.push(target);
        states.push(psi);
    }
    if times.first() != Some(&0.0) {
        times.insert(0, 0.0);
        states.insert(0, *psi0);
    }
    Ok(OdeSolution { times, states, method })
}

/// Classical fourth-order Runge–Kutta with `steps` equal steps; used to
/// measure convergence order.
pub fn integrate_fixed_step<H>(hamiltonian: H, psi0: &StateVector4, t_f: f64, steps: usize) -> Result<StateVector4>
where
    H: Fn(f64) -> Result<ComplexMatrix4>,
{
    if steps == 0 {
        return Err(Error::Domain("need at least one step".into()));
    }
    let h = t_f / steps as f64;
    let mut psi = *psi0;
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = derivative(&hamiltonian, t, &psi)?;
        let k2 = derivative(&hamiltonian, t + 0.5 * h, &psi.axpy((0.5 * h).into(), &k1))?;
        let k3 = derivative(&hamiltonian, t + 0.5 * h, &psi.axpy((0.5 * h).into(), &k2))?;
        let k4 = derivative(&hamiltonian, t + h, &psi.axpy(h.into(), &k3))?;
        psi = combine(&psi, h, &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0], &[k1, k2, k3, k4]);
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::build_interaction_hamiltonian;

    #[test]
    fn eigenstate_picks_up_phase() {
        let h = build_interaction_hamiltonian(-3.0, 4.0, 0.3).unwrap();
        let frame = crate::quantum::instantaneous_eigenframe(-3.0, 4.0, 0.3).unwrap();
        let t_f = 2.0;
        let sol = integrate_schrodinger(|_| Ok(h), &frame.plus, t_f, OdeTolerance::default(), &[]).unwrap();
        let expected = frame.plus.scale(Complex64::from_polar(1.0, -frame.gap * t_f));
        let diff = sol.final_state().axpy((-1.0).into(), &expected);
        assert!(diff.norm_sqr().sqrt() < 1e-9);
        assert!(sol.max_norm_drift() < 1e-10);
    }

    #[test]
    fn rejects_loose_inputs() {
        let h = ComplexMatrix4::zeros();
        let psi = StateVector4::basis(0);
        let tight = OdeTolerance { rtol: 1e-13, atol: 1e-14 };
        assert!(integrate_schrodinger(|_| Ok(h), &psi, 1.0, tight, &[]).is_err());
        assert!(integrate_schrodinger(|_| Ok(h), &psi, 1.0, OdeTolerance::default(), &[0.5, 0.2]).is_err());
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut h = ComplexMatrix4::zeros();
        h.0[(0, 1)] = Complex64::new(1.0, 0.0);
        let psi = StateVector4::basis(0);
        let r = integrate_schrodinger(|_| Ok(h), &psi, 1.0, OdeTolerance::default(), &[]);
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn samples_are_recorded() {
        let h = build_interaction_hamiltonian(1.0, 1.0, 0.0).unwrap();
        let psi = StateVector4::basis(1);
        let sol =
            integrate_schrodinger(|_| Ok(h), &psi, 1.0, OdeTolerance::default(), &[0.0, 0.25, 1.0]).unwrap();
        assert_eq!(sol.times, vec![0.0, 0.25, 1.0]);
        assert_eq!(sol.states[0], psi);
    }
}
