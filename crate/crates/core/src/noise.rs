//! Noise models, their correlation functions and the accumulated phase
//! variance `⟨X²(t)⟩`, in closed form where one exists and by quadrature
//! otherwise.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::path::DrivePath;
use crate::quadrature::{integrate_stationary_square, Tolerance};

/// Relation between the two ground-state frequency fluctuations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// `δω2 = −δω1`; the phase weight is `cos2θ`.
    #[default]
    Antisymmetric,
    /// Only `|g1⟩` fluctuates; the phase weight is `cos²θ`.
    OnlyG1,
}

/// Classical Gaussian noise with `C(τ) = σ² cos(ν0 τ) e^{−Γ|τ|}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lorentzian {
    pub sigma: f64,
    pub gamma: f64,
    pub nu0: f64,
    #[serde(default)]
    pub symmetry: Symmetry,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BosonMode {
    pub coupling: f64,
    pub energy: f64,
}

/// Discrete independent-boson bath at inverse temperature `β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BosonBath {
    pub modes: Vec<BosonMode>,
    pub beta: f64,
}

/// Thermal photon shot noise of a dispersively coupled cavity mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityShot {
    pub g: f64,
    pub delta: f64,
    pub kappa: f64,
    pub n_thermal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    Lorentzian(Lorentzian),
    BosonBath(BosonBath),
    CavityShot(CavityShot),
}

impl Lorentzian {
    pub fn validate(&self) -> Result<()> {
        ensure_finite("Lorentzian parameters", &[self.sigma, self.gamma, self.nu0])?;
        if self.sigma < 0.0 || self.gamma < 0.0 {
            return Err(Error::Domain("σ and Γ must be non-negative".into()));
        }
        Ok(())
    }

    pub fn correlation(&self, tau: f64) -> f64 {
        lorentzian_correlation(self, tau)
    }

    pub(crate) fn weight(&self, s: f64) -> f64 {
        match self.symmetry {
            Symmetry::Antisymmetric => s,
            Symmetry::OnlyG1 => 0.5 * (1.0 + s),
        }
    }
}

impl BosonBath {
    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::Domain("boson bath needs at least one mode".into()));
        }
        ensure_finite("inverse temperature", &[self.beta])?;
        if self.beta <= 0.0 {
            return Err(Error::Domain("β must be positive".into()));
        }
        for m in &self.modes {
            ensure_finite("boson mode", &[m.coupling, m.energy])?;
            if m.energy <= 0.0 {
                return Err(Error::Domain("mode energies must be positive".into()));
            }
        }
        Ok(())
    }

    /// `1 + 2 n_B(ε) = coth(βε/2)`.
    pub fn thermal_factor(&self, energy: f64) -> f64 {
        1.0 / (0.5 * self.beta * energy).tanh()
    }
}

impl CavityShot {
    pub fn validate(&self) -> Result<()> {
        ensure_finite("cavity parameters", &[self.g, self.delta, self.kappa, self.n_thermal])?;
        if self.kappa <= 0.0 || self.n_thermal < 0.0 || self.delta == 0.0 {
            return Err(Error::Domain("need κ > 0, N_th ≥ 0 and Δ ≠ 0".into()));
        }
        Ok(())
    }

    /// `g²/Δ`.
    pub fn dispersive_shift(&self) -> f64 {
        self.g * self.g / self.delta
    }

    /// `N(N+1)(g²/Δ)²`, the weight of the photon-number correlation.
    pub fn strength(&self) -> f64 {
        let chi = self.dispersive_shift();
        self.n_thermal * (self.n_thermal + 1.0) * chi * chi
    }
}

impl NoiseSpec {
    /// Noise with zero amplitude.
    pub fn silent() -> Self {
        Self::Lorentzian(Lorentzian { sigma: 0.0, gamma: 0.0, nu0: 0.0, symmetry: Symmetry::Antisymmetric })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Lorentzian(l) => l.validate(),
            Self::BosonBath(b) => b.validate(),
            Self::CavityShot(c) => c.validate(),
        }
    }

    pub fn as_cavity(&self) -> Result<&CavityShot> {
        match self {
            Self::CavityShot(c) => Ok(c),
            _ => Err(Error::Domain("operation requires cavity shot noise".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceResult {
    pub value: f64,
    pub method: Method,
}

pub fn lorentzian_correlation(spec: &Lorentzian, tau: f64) -> f64 {
    spec.sigma * spec.sigma * (spec.nu0 * tau).cos() * (-spec.gamma * tau.abs()).exp()
}

/// `⟨d†(t1) d(t2)⟩ = N e^{−κ|τ|/2}`.
pub fn cavity_d_correlation(spec: &CavityShot, tau: f64) -> f64 {
    spec.n_thermal * (-0.5 * spec.kappa * tau.abs()).exp()
}

/// `N(N+1) e^{−κ|τ|}`, the connected photon-number correlation.
pub fn cavity_pair_correlation(spec: &CavityShot, tau: f64) -> f64 {
    spec.n_thermal * (spec.n_thermal + 1.0) * (-spec.kappa * tau.abs()).exp()
}

fn tolerance(scale: f64, t: f64) -> Tolerance {
    Tolerance::new(1e-16 * scale * t * t, 1e-11)
}

/// `⟨X²(t)⟩ = ∫₀ᵗ∫₀ᵗ w(t1) w(t2) C(t1 − t2)` by adaptive quadrature.
///
/// For the boson bath this is the real part of the time-ordered second
/// moment; see [`boson_second_moment_quadrature`] for the full value.
pub fn phase_variance(path: &DrivePath, spec: &NoiseSpec, t: f64) -> Result<VarianceResult> {
    let t = path.check_time(t)?;
    spec.validate()?;
    let breaks = path.breakpoints();
    let est = match spec {
        NoiseSpec::Lorentzian(l) => {
            let amp = l.sigma * l.sigma;
            if amp == 0.0 {
                return Ok(VarianceResult { value: 0.0, method: Method::ClosedForm });
            }
            integrate_stationary_square(|x| l.weight(path.s(x)), |u| l.correlation(u), t, &breaks, tolerance(amp, t))?
        }
        NoiseSpec::CavityShot(c) => {
            let amp = c.strength();
            if amp == 0.0 {
                return Ok(VarianceResult { value: 0.0, method: Method::ClosedForm });
            }
            integrate_stationary_square(
                |x| path.s(x),
                |u| amp * (-c.kappa * u.abs()).exp(),
                t,
                &breaks,
                tolerance(amp, t),
            )?
        }
        NoiseSpec::BosonBath(b) => {
            return Ok(VarianceResult {
                value: boson_second_moment_quadrature(path, b, t)?.re,
                method: Method::Quadrature,
            });
        }
    };
    Ok(VarianceResult { value: est.value.max(0.0), method: Method::Quadrature })
}

/// Time-ordered `⟨T X²(t)⟩` of the boson bath for any path, by quadrature.
pub fn boson_second_moment_quadrature(path: &DrivePath, spec: &BosonBath, t: f64) -> Result<Complex64> {
    let t = path.check_time(t)?;
    spec.validate()?;
    let breaks = path.breakpoints();
    let amp: f64 = spec.modes.iter().map(|m| m.coupling * m.coupling * spec.thermal_factor(m.energy)).sum();
    if amp == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tol = tolerance(amp, t);
    let real = integrate_stationary_square(
        |x| path.s(x),
        |u| {
            spec.modes
                .iter()
                .map(|m| m.coupling * m.coupling * spec.thermal_factor(m.energy) * (m.energy * u).cos())
                .sum()
        },
        t,
        &breaks,
        tol,
    )?;
    let imag = integrate_stationary_square(
        |x| path.s(x),
        |u| -spec.modes.iter().map(|m| m.coupling * m.coupling * (m.energy * u.abs()).sin()).sum::<f64>(),
        t,
        &breaks,
        tol,
    )?;
    Ok(Complex64::new(real.value, imag.value))
}

/// `sin(x)/x`.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// `(1 − cos x)/x²` without cancellation.
fn one_minus_cos_over_sq(x: f64) -> f64 {
    let h = sinc(0.5 * x);
    0.5 * h * h
}

/// Γ = 0 variance for `s(t) = cos(2πk t/t_f)`:
/// `2σ²t_f⁴ν0²(1 − cos ν0t_f)/(ν0²t_f² − 4π²k²)²`.
///
/// `periods = 1` is a single `cos2θ` period; one circular loop has
/// `periods = 2`. The value at the removable point `ν0 t_f = 2πk` is
/// `σ²t_f²/4`.
pub fn lorentzian_variance_closed_form(sigma: f64, nu0: f64, t_f: f64, periods: u32) -> f64 {
    let x = (nu0 * t_f).abs();
    let a = 2.0 * PI * periods as f64;
    let delta = x - a;
    // 1 − cos x = 2 sin²((x − a)/2) because a is a multiple of 2π.
    let ratio = x / (x + a);
    4.0 * sigma * sigma * t_f * t_f * ratio * ratio * one_minus_cos_over_sq(delta) * 0.5
}

/// `⟨T X²(t)⟩` of the boson bath on the single circular loop
/// `cos2θ = cos(2bt)`, `b = 2π/t_f`.
pub fn boson_second_moment(spec: &BosonBath, t: f64, t_f: f64) -> Result<Complex64> {
    spec.validate()?;
    ensure_finite("times", &[t, t_f])?;
    if t_f <= 0.0 || t < 0.0 || t > t_f * (1.0 + 1e-12) {
        return Err(Error::OutOfRange { t, t_f });
    }
    let b = 2.0 * PI / t_f;
    Ok(spec
        .modes
        .iter()
        .map(|m| {
            let g2 = m.coupling * m.coupling;
            Complex64::new(
                g2 * spec.thermal_factor(m.energy) * boson_real_kernel(b, m.energy, t),
                g2 * boson_imag_kernel(b, m.energy, t),
            )
        })
        .sum())
}

/// `|∫₀ᵗ cos(2bτ) e^{iετ} dτ|²`.
fn boson_real_kernel(b: f64, eps: f64, t: f64) -> f64 {
    let window = |k: f64| Complex64::from_polar(t * sinc(0.5 * k * t), 0.5 * k * t);
    (0.5 * (window(eps + 2.0 * b) + window(eps - 2.0 * b))).norm_sqr()
}

fn boson_imag_kernel(b: f64, eps: f64, t: f64) -> f64 {
    let d = eps - 2.0 * b;
    if d.abs() < 4e-4 * b {
        let (s4, c2) = ((4.0 * b * t).sin(), (2.0 * b * t).cos());
        let bt = b * t;
        let c0 = (8.0 * bt * c2 * c2 - 4.0 * bt - s4) / (32.0 * b * b);
        let c1 = t * t * (-bt / 12.0 - s4 / 16.0) / b;
        let c2_coef =
            (-64.0 * bt.powi(3) * c2 * c2 - 24.0 * bt * c2 * c2 + 12.0 * bt + 3.0 * s4) / (1536.0 * b.powi(4));
        return c0 + d * (c1 + d * c2_coef);
    }
    let diff = eps * eps - 4.0 * b * b;
    let bracket = 16.0 * b * b * (eps * t).cos() * (2.0 * b * t).sin() + diff * (4.0 * b * t + (4.0 * b * t).sin())
        - 8.0 * b * eps * (2.0 * b * t).cos() * (eps * t).sin();
    -eps / (4.0 * b * diff * diff) * bracket
}

/// `e^{−x} − 1 + x` without cancellation at small `x`.
pub(crate) fn exp_tail(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x2 * (0.5 - x / 6.0 + x2 / 24.0 - x2 * x / 120.0)
    } else {
        (-x).exp_m1() + x
    }
}

/// Second moment of the cavity phase for `n` circular loops:
/// `N(N+1)(g²/Δ)² κt_f³[16n²π² + 2κt_f(e^{−κt_f} − 1) + κ²t_f²]/(16n²π² + κ²t_f²)²`.
pub fn cavity_second_moment_closed_form(spec: &CavityShot, n: u32, t_f: f64) -> f64 {
    let x = spec.kappa * t_f;
    let w = 16.0 * (n as f64 * PI).powi(2);
    let numerator = w + 2.0 * x * (-x).exp_m1() + x * x;
    let denominator = w + x * x;
    spec.strength() * spec.kappa * t_f.powi(3) * numerator / (denominator * denominator)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThirdMomentBounds {
    /// `N g²/(Δκ²t_f)`.
    pub long_time_ratio: f64,
    /// `N g²κt_f² n/Δ`.
    pub short_time_ratio: f64,
    /// Single-loop triple correlation integral
    /// `−2N²(N+1)(1 − e^{−κt_f})κt_f⁴/(1024π⁴ + 80π²κ²t_f² + κ⁴t_f⁴)`.
    pub single_loop_term: f64,
}

pub fn cavity_third_moment_bounds(spec: &CavityShot, n: f64, t_f: f64) -> ThirdMomentBounds {
    let n_th = spec.n_thermal;
    let g2_over_delta = spec.dispersive_shift().abs();
    let x = spec.kappa * t_f;
    let denominator = 1024.0 * PI.powi(4) + 80.0 * PI * PI * x * x + x.powi(4);
    ThirdMomentBounds {
        long_time_ratio: n_th * g2_over_delta / (spec.kappa * spec.kappa * t_f),
        short_time_ratio: n_th * g2_over_delta * spec.kappa * t_f * t_f * n,
        single_loop_term: -2.0 * n_th * n_th * (n_th + 1.0) * (-(-x).exp_m1()) * spec.kappa * t_f.powi(4) / denominator,
    }
}
