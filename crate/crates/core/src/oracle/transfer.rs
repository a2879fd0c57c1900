use num_complex::Complex64;
use serde::Serialize;

use super::ode::{integrate_schrodinger, OdeSolution, OdeTolerance};
use crate::adiabatic::{geometric_phase, ProtocolParams};
use crate::error::Result;
use crate::path::DrivePath;
use crate::quantum::{build_interaction_hamiltonian, EigenFrame, StateVector4, G1, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferOutcome {
    /// `|⟨α0 + βe^{−iγ_d} d(t_f)|ψ(t_f)⟩|²`.
    pub fidelity: f64,
    /// Relative phase of the dark-state component, `None` when `α` or `β` vanish.
    pub phase: Option<f64>,
    pub predicted_phase: f64,
    pub norm_drift: f64,
}

/// Dark state with the path-continuous mixing angle.
fn dark_state(path: &DrivePath, t: f64) -> Result<StateVector4> {
    Ok(EigenFrame::from_angles(path.theta_at(t)?, path.gap(), path.phi_at(t)?).dark)
}

/// Integrates the bare tripod Hamiltonian from `α|0⟩ + β|g1⟩`.
pub fn closed_system_evolution(
    params: &ProtocolParams,
    path: &DrivePath,
    tol: OdeTolerance,
    sample_times: &[f64],
) -> Result<OdeSolution> {
    params.check_path(path)?;
    let mut psi0 = StateVector4::basis(ZERO).scale(params.alpha);
    psi0.0[G1] = params.beta;
    let hamiltonian = |t: f64| {
        let (o1, o2) = path.drives_at(t)?;
        build_interaction_hamiltonian(o1, o2, path.phi_at(t)?)
    };
    integrate_schrodinger(hamiltonian, &psi0, params.t_f, tol, sample_times)
}

pub fn closed_system_transfer_oracle(
    params: &ProtocolParams,
    path: &DrivePath,
    tol: OdeTolerance,
) -> Result<TransferOutcome> {
    let sol = closed_system_evolution(params, path, tol, &[])?;
    let psi = sol.final_state();
    let gamma = geometric_phase(path, params.t_f)?;
    let dark = dark_state(path, params.t_f)?;
    let zero = StateVector4::basis(ZERO);
    let target = zero.scale(params.alpha).axpy(params.beta * Complex64::from_polar(1.0, -gamma), &dark);
    let on_dark = dark.inner(psi);
    let on_zero = zero.inner(psi);
    let phase = (params.alpha.norm() > 0.0 && params.beta.norm() > 0.0)
        .then(|| -((on_dark / params.beta) / (on_zero / params.alpha)).arg());
    Ok(TransferOutcome {
        fidelity: target.inner(psi).norm_sqr(),
        phase,
        predicted_phase: gamma,
        norm_drift: sol.max_norm_drift(),
    })
}
