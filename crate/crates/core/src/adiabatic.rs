//! Transfer protocol parameters, the dark-state geometric phase and the
//! validity ledger.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::noise::{CavityShot, NoiseSpec};
use crate::path::DrivePath;
use crate::quadrature::{integrate_with_breakpoints, Tolerance};

pub const DEFAULT_THRESHOLD: f64 = 0.1;
const VALIDITY_GRID: usize = 2000;

/// Qubit amplitudes on `{|0⟩, |g1⟩}`, gap `G` and transfer time `t_f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gap: f64,
    pub t_f: f64,
}

impl ProtocolParams {
    pub fn new(alpha: Complex64, beta: Complex64, gap: f64, t_f: f64) -> Result<Self> {
        let p = Self { alpha, beta, gap, t_f };
        p.validate()?;
        Ok(p)
    }

    /// Equal populations, `α = β = 1/√2`.
    pub fn balanced(gap: f64, t_f: f64) -> Result<Self> {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(a, a, gap, t_f)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(
            "protocol parameters",
            &[self.alpha.re, self.alpha.im, self.beta.re, self.beta.im, self.gap, self.t_f],
        )?;
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("|α|² + |β|² = {norm}, expected 1")));
        }
        if self.gap <= 0.0 || self.t_f <= 0.0 {
            return Err(Error::Domain("gap and t_f must be positive".into()));
        }
        Ok(())
    }

    pub fn with_duration(&self, t_f: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.gap, t_f)
    }

    /// `αβ*`.
    pub fn coherence0(&self) -> Complex64 {
        self.alpha * self.beta.conj()
    }

    /// Path with amplitude `2G` and duration `t_f` matching these parameters.
    pub fn check_path(&self, path: &DrivePath) -> Result<()> {
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        if !rel(path.t_f(), self.t_f) || !rel(path.gap(), self.gap) {
            return Err(Error::Contract(format!(
                "path (G = {}, t_f = {}) does not match protocol (G = {}, t_f = {})",
                path.gap(),
                path.t_f(),
                self.gap,
                self.t_f
            )));
        }
        Ok(())
    }
}

/// `γ_d(t) = ∫₀ᵗ φ̇ sin²θ dt′`.
pub fn geometric_phase(path: &DrivePath, t: f64) -> Result<f64> {
    geometric_phase_between(path, 0.0, t)
}

pub fn geometric_phase_between(path: &DrivePath, t0: f64, t1: f64) -> Result<f64> {
    let (t0, t1) = (path.check_time(t0)?, path.check_time(t1)?);
    let phase = path.phase();
    if phase.rate() == 0.0 || t0 == t1 {
        return Ok(0.0);
    }
    let scale = 1.0f64.max(phase.rate().abs() * path.t_f() * path.t_f().max(1.0));
    let tol = Tolerance::new(1e-14 * scale, 1e-14);
    let (lo, hi) = (t0.min(t1), t0.max(t1));
    let mut points: Vec<f64> = vec![lo];
    points.extend(path.breakpoints().into_iter().filter(|&p| p > lo && p < hi));
    points.push(hi);
    let est = integrate_with_breakpoints(|x| phase.phi_dot(x) * path.sin2_theta(x), &points, tol)?;
    Ok(if t1 >= t0 { est.value } else { -est.value })
}

/// `αβ* e^{−iγ_d(t)}`.
pub fn closed_system_coherence(params: &ProtocolParams, path: &DrivePath, t: f64) -> Result<Complex64> {
    let gamma = geometric_phase(path, t)?;
    Ok(params.coherence0() * Complex64::from_polar(1.0, -gamma))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityEntry {
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl ValidityEntry {
    pub fn new(ratio: f64, threshold: f64) -> Self {
        Self { ratio, threshold, pass: ratio < threshold }
    }
}

/// Named "≪ 1" ratios. Reports only; nothing here blocks a computation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub entries: BTreeMap<String, ValidityEntry>,
}

impl ValidityReport {
    fn push(&mut self, name: &str, ratio: f64) {
        self.entries.insert(name.to_string(), ValidityEntry::new(ratio, DEFAULT_THRESHOLD));
    }

    pub fn get(&self, name: &str) -> Option<&ValidityEntry> {
        self.entries.get(name)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.values().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().filter(|(_, e)| !e.pass).map(|(k, _)| k.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct PathRates {
    theta_dot: f64,
    phi_dot: f64,
    second: f64,
}

fn path_rates(path: &DrivePath) -> Result<PathRates> {
    let mut r = PathRates::default();
    for i in 0..=VALIDITY_GRID {
        let t = path.t_f() * i as f64 / VALIDITY_GRID as f64;
        r.theta_dot = r.theta_dot.max(path.theta_dot_at(t)?.abs());
        r.phi_dot = r.phi_dot.max(path.phi_dot_at(t)?.abs());
        let second = path.theta_ddot_at(t)?.abs().max(path.phi_ddot_at(t)?.abs());
        r.second = r.second.max(second);
    }
    Ok(r)
}

/// Evaluates the adiabaticity, dispersive and truncation ratios for a run.
pub fn validity_check(params: &ProtocolParams, path: &DrivePath, noise: &NoiseSpec) -> Result<ValidityReport> {
    let g = params.gap;
    let t_f = params.t_f;
    let rates = path_rates(path)?;
    let mut report = ValidityReport::default();
    report.push("phi_dot_over_gap", rates.phi_dot / g);
    report.push("theta_dot_over_gap", rates.theta_dot / g);
    report.push("inverse_gap_time", 1.0 / (g * t_f));
    report.push("second_derivative_over_gap_squared", rates.second / (g * g));

    if let NoiseSpec::CavityShot(c) = noise {
        cavity_rows(&mut report, c, g, t_f, rates, cycles(path));
    }
    Ok(report)
}

fn cycles(path: &DrivePath) -> f64 {
    match path.cos2theta_periods() {
        Some(p) => 0.5 * p as f64,
        None => 0.5 * path.coefficients().cutoff() as f64,
    }
}

fn cavity_rows(report: &mut ValidityReport, c: &CavityShot, gap: f64, t_f: f64, rates: PathRates, n: f64) {
    let n_th = c.n_thermal;
    report.push("small_coupling", c.g * n_th.sqrt() / gap);
    report.push("large_detuning", gap / c.delta.abs());
    report.push("small_damping", c.kappa / c.delta.abs());
    report.push("slow_drive_vs_detuning", c.g * rates.theta_dot.max(rates.phi_dot) / (c.delta * c.delta));
    // Both dispersive shifts come from the same mode with opposite detunings,
    // so g1²/Δ1 + g2²/Δ2 vanishes identically in this model.
    report.push("detuning_matching", 0.0);
    let correction = [
        1.0 / (t_f * t_f * gap * gap),
        c.g * n_th.sqrt() / (gap * t_f * c.delta.abs()),
        c.g * c.g * n_th / (c.delta * c.delta),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    report.push("initial_state_correction", correction);
    let bounds = crate::noise::cavity_third_moment_bounds(c, n, t_f);
    report.push("truncation_long_time", bounds.long_time_ratio);
    report.push("truncation_short_time", bounds.short_time_ratio);
}
