//! Coherence traces and transfer fidelities from the geometric phase and the
//! second-cumulant dephasing exponent.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adiabatic::{geometric_phase, validity_check, ProtocolParams, ValidityReport};
use crate::error::{Error, Result};
use crate::noise::{
    boson_second_moment_quadrature, cavity_second_moment_closed_form, exp_tail, phase_variance, CavityShot, NoiseSpec,
};
use crate::path::{DrivePath, PathShape, PhaseProfile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceTrace {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub params: ProtocolParams,
    pub path_digest: String,
    pub noise_digest: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub geometric_phase: f64,
    pub dephasing_exponent: f64,
    pub validity: ValidityReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Short,
    Long,
}

/// Stable 64-bit FNV-1a digest of a debug rendering.
pub fn digest<T: std::fmt::Debug>(value: &T) -> String {
    let text = format!("{value:?}");
    let hash = text
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, byte| (h ^ u64::from(byte)).wrapping_mul(0x0000_0100_0000_01b3));
    format!("{hash:016x}")
}

/// Complex second cumulant `⟨T X²(t)⟩`. Only the boson bath has an imaginary part.
fn second_cumulant(path: &DrivePath, noise: &NoiseSpec, t: f64) -> Result<Complex64> {
    match noise {
        NoiseSpec::BosonBath(b) => boson_second_moment_quadrature(path, b, t),
        NoiseSpec::CavityShot(c) if is_whole_circular(path, t) => {
            Ok(cavity_second_moment_closed_form(c, loops(path), t).into())
        }
        _ => Ok(phase_variance(path, noise, t)?.value.into()),
    }
}

fn loops(path: &DrivePath) -> u32 {
    match path.shape() {
        PathShape::Circular { loops } => *loops,
        PathShape::FourierCos2Theta { .. } => 0,
    }
}

fn is_whole_circular(path: &DrivePath, t: f64) -> bool {
    matches!(path.shape(), PathShape::Circular { .. }) && t == path.t_f()
}

/// `αβ* e^{−iγ_d(t)} e^{−½⟨T X²(t)⟩}` on `t_grid`.
pub fn coherence(
    params: &ProtocolParams,
    path: &DrivePath,
    noise: &NoiseSpec,
    t_grid: &[f64],
) -> Result<CoherenceTrace> {
    params.check_path(path)?;
    noise.validate()?;
    let c0 = params.coherence0();
    let values = t_grid
        .par_iter()
        .map(|&t| {
            let gamma = geometric_phase(path, t)?;
            let cumulant = second_cumulant(path, noise, t)?;
            Ok(c0 * Complex64::from_polar(1.0, -gamma) * (-0.5 * cumulant).exp())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceTrace {
        times: t_grid.to_vec(),
        values,
        params: *params,
        path_digest: digest(path),
        noise_digest: digest(noise),
    })
}

/// `|α|⁴ + |β|⁴ + 2|α|²|β|² cos(γ) e^{−exponent}`.
pub fn fidelity_from_parts(params: &ProtocolParams, gamma: f64, exponent: f64) -> f64 {
    let (a2, b2) = (params.alpha.norm_sqr(), params.beta.norm_sqr());
    a2 * a2 + b2 * b2 + 2.0 * a2 * b2 * gamma.cos() * (-exponent).exp()
}

/// Fidelity of the full transfer at `t_f`. The dephasing exponent is half the
/// real part of the second cumulant.
pub fn fidelity(params: &ProtocolParams, path: &DrivePath, noise: &NoiseSpec) -> Result<FidelityReport> {
    params.check_path(path)?;
    noise.validate()?;
    let t_f = path.t_f();
    let gamma = geometric_phase(path, t_f)?;
    let exponent = 0.5 * second_cumulant(path, noise, t_f)?.re;
    Ok(FidelityReport {
        fidelity: fidelity_from_parts(params, gamma, exponent),
        geometric_phase: gamma,
        dephasing_exponent: exponent,
        validity: validity_check(params, path, noise)?,
    })
}

/// Dephasing exponent when the state sits in `|g1⟩` for the whole time:
/// `N(N+1)(g²/Δ)²(e^{−κt_f} − 1 + κt_f)/κ²`.
pub fn no_transfer_exponent(spec: &CavityShot, t_f: f64) -> f64 {
    spec.strength() * exp_tail(spec.kappa * t_f) / (spec.kappa * spec.kappa)
}

pub fn no_transfer_fidelity(params: &ProtocolParams, noise: &NoiseSpec, t_f: f64) -> Result<f64> {
    let spec = noise.as_cavity()?;
    spec.validate()?;
    Ok(fidelity_from_parts(params, 0.0, no_transfer_exponent(spec, t_f)))
}

/// Limiting forms of the circular-path exponent: `½N(N+1)(g²/Δ)² t_f/κ` for
/// `κt_f ≫ 1` and `½N(N+1)(g²/Δ)² κt_f³/(16π²n²)` for `κt_f ≪ 1`.
pub fn asymptotic_exponent(spec: &CavityShot, n: u32, t_f: f64, regime: Regime) -> f64 {
    let w = spec.strength();
    match regime {
        Regime::Long => 0.5 * w * t_f / spec.kappa,
        Regime::Short => {
            let n = n as f64;
            0.5 * w * spec.kappa * t_f.powi(3) / (16.0 * std::f64::consts::PI.powi(2) * n * n)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NcycleRow {
    pub t_f: f64,
    pub n: u32,
    pub fidelity: f64,
    pub exponent: f64,
    pub no_transfer_fidelity: f64,
    pub no_transfer_exponent: f64,
    /// Transfer exponent over no-transfer exponent; tends to ½ at long times.
    pub exponent_ratio: f64,
}

/// Circular `n`-loop transfers against the idle baseline over a `t_f` sweep.
/// Each loop count runs with `φ ≡ 0`.
pub fn ncycle_comparison(
    params: &ProtocolParams,
    spec: &CavityShot,
    t_f_grid: &[f64],
    n_list: &[u32],
) -> Result<Vec<NcycleRow>> {
    spec.validate()?;
    if n_list.contains(&0) {
        return Err(Error::Domain("loop counts must be positive".into()));
    }
    let noise = NoiseSpec::CavityShot(*spec);
    let jobs: Vec<(f64, u32)> = t_f_grid.iter().flat_map(|&t| n_list.iter().map(move |&n| (t, n))).collect();
    jobs.par_iter()
        .map(|&(t_f, n)| {
            let p = params.with_duration(t_f)?;
            let path = DrivePath::circular(n, 2.0 * p.gap, t_f)?.with_phase(PhaseProfile::Zero);
            let report = fidelity(&p, &path, &noise)?;
            let idle = no_transfer_exponent(spec, t_f);
            Ok(NcycleRow {
                t_f,
                n,
                fidelity: report.fidelity,
                exponent: report.dephasing_exponent,
                no_transfer_fidelity: fidelity_from_parts(&p, 0.0, idle),
                no_transfer_exponent: idle,
                exponent_ratio: if idle > 0.0 { report.dephasing_exponent / idle } else { f64::NAN },
            })
        })
        .collect()
}
