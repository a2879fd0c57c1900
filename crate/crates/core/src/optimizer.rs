//! Filter functions, the short-time path optimizer, decay-time ratios and
//! phase-gate design.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::adiabatic::geometric_phase;
use crate::error::{Error, Result};
use crate::noise::{sinc, NoiseSpec, Symmetry};
use crate::path::{DrivePath, FourierCoefficients, PhaseProfile};
use crate::quadrature::{integrate, integrate_with_breakpoints, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Weight function `a0 + Σ A_m cos(2πmt/t_f) + B_m sin(2πmt/t_f)`.
#[derive(Clone, Debug, PartialEq)]
struct TrigSeries {
    a0: f64,
    coeffs: FourierCoefficients,
}

impl TrigSeries {
    fn for_noise(coeffs: &FourierCoefficients, spec: &NoiseSpec) -> Self {
        match spec {
            NoiseSpec::Lorentzian(l) if l.symmetry == Symmetry::OnlyG1 => Self {
                a0: 0.5,
                coeffs: FourierCoefficients::new(
                    coeffs.a.iter().map(|a| 0.5 * a).collect(),
                    coeffs.b.iter().map(|b| 0.5 * b).collect(),
                ),
            },
            _ => Self { a0: 0.0, coeffs: coeffs.clone() },
        }
    }

    /// `f(ω) = ∫₀^{t_f} e^{iωt} w(t) dt`.
    fn transform(&self, omega: f64, t_f: f64) -> Complex64 {
        let z = omega * t_f;
        let half = Complex64::from_polar(1.0, 0.5 * z);
        let mut sum = half * (self.a0 * sinc(0.5 * z));
        for (m, a_m, b_m) in self.coeffs.harmonics() {
            if a_m == 0.0 && b_m == 0.0 {
                continue;
            }
            let a = 2.0 * PI * m;
            let sign = if (m as u64).is_multiple_of(2) { 1.0 } else { -1.0 };
            // (1 − e^{iz})/(z² − a²) with the pole nearest to z cancelled analytically.
            let q = if (z - a).abs() <= (z + a).abs() {
                -I * half * (sign * sinc(0.5 * (z - a)) / (z + a))
            } else {
                -I * half * (sign * sinc(0.5 * (z + a)) / (z - a))
            };
            sum += q * (I * z * a_m - a * b_m);
        }
        sum * t_f
    }

    /// `f(ω) = t_f (1 − e^{iz}) R(z)` away from the harmonic poles.
    fn smooth_factor(&self, z: f64) -> Complex64 {
        let mut r = I * self.a0 / z;
        for (m, a_m, b_m) in self.coeffs.harmonics() {
            let a = 2.0 * PI * m;
            r += (I * z * a_m - a * b_m) / (z * z - a * a);
        }
        r
    }
}

/// `f(ω, t_f) = ∫₀^{t_f} e^{iωt} s(t) dt`.
pub fn filter_amplitude(coeffs: &FourierCoefficients, omega: f64, t_f: f64) -> Complex64 {
    TrigSeries { a0: 0.0, coeffs: coeffs.clone() }.transform(omega, t_f)
}

/// `𝓕(ω, t_f) = |f(ω, t_f)|²`.
pub fn filter_function(coeffs: &FourierCoefficients, omega: f64, t_f: f64) -> f64 {
    filter_amplitude(coeffs, omega, t_f).norm_sqr()
}

/// `f̄(z) = z Σ_m (1 − e^{iz})(izA_m − 2πmB_m)/(z² − 4π²m²) = ω f(ω)`, in units of `t_f = 1`.
pub fn filter_bar(coeffs: &FourierCoefficients, z: f64) -> Complex64 {
    z * filter_amplitude(coeffs, z, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterFunctionSample {
    pub omega: f64,
    pub value: f64,
}

pub fn sample_filter_function(coeffs: &FourierCoefficients, t_f: f64, omegas: &[f64]) -> Vec<FilterFunctionSample> {
    omegas.iter().map(|&omega| FilterFunctionSample { omega, value: filter_function(coeffs, omega, t_f) }).collect()
}

/// Two-sided spectral density `S(ω) = ∫ C(τ) e^{iωτ} dτ` for noises with a
/// Lorentzian line shape.
pub fn spectral_density(spec: &NoiseSpec, omega: f64) -> Result<f64> {
    match spec {
        NoiseSpec::Lorentzian(l) => {
            let line = |d: f64| if l.gamma == 0.0 { 0.0 } else { l.gamma / (d * d + l.gamma * l.gamma) };
            Ok(l.sigma * l.sigma * (line(omega - l.nu0) + line(omega + l.nu0)))
        }
        NoiseSpec::CavityShot(c) => Ok(c.strength() * 2.0 * c.kappa / (omega * omega + c.kappa * c.kappa)),
        NoiseSpec::BosonBath(_) => Err(Error::Domain("no classical spectral density for a boson bath".into())),
    }
}

/// `⟨X²(t_f)⟩ = ∫ dω/2π S(ω) 𝓕(ω, t_f)`.
pub fn variance_via_filter(spec: &NoiseSpec, coeffs: &FourierCoefficients, t_f: f64) -> Result<f64> {
    spec.validate()?;
    let series = TrigSeries::for_noise(coeffs, spec);
    let (scale, peaks) = match spec {
        NoiseSpec::Lorentzian(l) => {
            if l.sigma == 0.0 {
                return Ok(0.0);
            }
            if l.gamma == 0.0 {
                return Ok(l.sigma * l.sigma * series.transform(l.nu0, t_f).norm_sqr());
            }
            (l.sigma * l.sigma, Some((l.nu0.abs(), l.gamma)))
        }
        NoiseSpec::CavityShot(c) => {
            if c.strength() == 0.0 {
                return Ok(0.0);
            }
            (c.strength(), Some((0.0, c.kappa)))
        }
        NoiseSpec::BosonBath(_) => {
            return Err(Error::Domain("no classical spectral density for a boson bath".into()));
        }
    };
    let (center, width) = peaks.unwrap_or((0.0, 0.0));
    let density = |w: f64| spectral_density(spec, w).unwrap_or(0.0);

    // Cutoff on a multiple of 2π/t_f beyond every feature of S and 𝓕.
    let cutoff_periods = [64.0, coeffs.cutoff() as f64 + 8.0, ((center + 40.0 * width) * t_f / (2.0 * PI)).ceil()]
        .into_iter()
        .fold(0.0, f64::max)
        .min(2e5);
    let cutoff = 2.0 * PI * cutoff_periods / t_f;

    let mut points: Vec<f64> = (0..=(2.0 * cutoff_periods) as usize).map(|k| k as f64 * PI / t_f).collect();
    for k in [0.0, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1e3, 1e4] {
        for p in [center - k * width, center + k * width] {
            if p > 0.0 && p < cutoff {
                points.push(p);
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    let tol = Tolerance { abs: 1e-15 * scale * t_f * t_f, rel: 1e-11, max_subdivisions: 2 * points.len() + 20_000 };
    let body = integrate_with_breakpoints(|w| density(w) * series.transform(w, t_f).norm_sqr(), &points, tol)?;

    // Beyond the cutoff 𝓕 = t_f²(2 − 2cos ωt_f)|R|² with a smooth R. The
    // non-oscillating half is integrated after ω = cutoff/u; the oscillating
    // half is taken from its endpoint expansion (sin(cutoff·t_f) = 0).
    let envelope = |w: f64| 2.0 * t_f * t_f * density(w) * series.smooth_factor(w * t_f).norm_sqr();
    let smooth = integrate(
        |u| if u <= 0.0 { 0.0 } else { envelope(cutoff / u) * cutoff / (u * u) },
        0.0,
        1.0,
        Tolerance::new(1e-16 * scale * t_f * t_f, 1e-12),
    )?;
    let h = 1e-3 * cutoff;
    let slope = (envelope(cutoff + h) - envelope(cutoff - h)) / (2.0 * h);
    let oscillating = -slope / (t_f * t_f);

    // The integrand is even in ω.
    Ok(2.0 * (body.value + smooth.value + oscillating) / (2.0 * PI))
}

/// One linear equation `Σ a_m A_m + Σ b_m B_m = rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub label: String,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn residual(&self, coeffs: &FourierCoefficients) -> f64 {
        let dot = |w: &[f64], x: &[f64]| w.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
        dot(&self.a, &coeffs.a) + dot(&self.b, &coeffs.b) - self.rhs
    }
}

/// Vanishing low-frequency derivatives of `f̄` plus `Σ A_m = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierConstraintSystem {
    pub n: usize,
    pub equations: Vec<LinearConstraint>,
}

impl FourierConstraintSystem {
    pub fn residuals(&self, coeffs: &FourierCoefficients) -> Vec<f64> {
        self.equations.iter().map(|e| e.residual(coeffs)).collect()
    }
}

pub fn derivative_conditions(n: usize) -> FourierConstraintSystem {
    let n = n.max(1);
    let powers = |p: i32| (1..=n).map(|m| (m as f64).powi(-p)).collect::<Vec<_>>();
    let zeros = vec![0.0; n];
    let mut equations = vec![LinearConstraint { label: "sum_a".into(), a: vec![1.0; n], b: zeros.clone(), rhs: 1.0 }];
    let (j_max, l_max) = if n.is_multiple_of(2) { (n.saturating_sub(2), n - 1) } else { (n - 1, n.saturating_sub(2)) };
    for j in (2..=j_max).step_by(2) {
        equations.push(LinearConstraint {
            label: format!("a_moment_{j}"),
            a: powers(j as i32),
            b: zeros.clone(),
            rhs: 0.0,
        });
    }
    for l in (1..=l_max).step_by(2) {
        equations.push(LinearConstraint {
            label: format!("b_moment_{l}"),
            a: zeros.clone(),
            b: powers(l as i32),
            rhs: 0.0,
        });
    }
    FourierConstraintSystem { n, equations }
}

/// `q(s) = lim ⟨X²⟩/(W t_f³) = −∫₀¹∫₀¹ s(x)s(y)|x − y| dx dy` for zero-mean `s`.
pub fn short_time_coefficient(coeffs: &FourierCoefficients) -> f64 {
    let mut a_part = 0.0;
    let (mut b_linear, mut b_square) = (0.0, 0.0);
    for (m, a, b) in coeffs.harmonics() {
        a_part += a * a / (m * m);
        b_linear += b / m;
        b_square += b * b / (m * m);
    }
    a_part / (4.0 * PI * PI) + (b_linear * b_linear + 0.5 * b_square) / (2.0 * PI * PI)
}

/// Prefactor `W` of the short-time law `⟨X²⟩ ≈ W q t_f³`.
pub fn short_time_weight(spec: &NoiseSpec) -> Result<f64> {
    match spec {
        NoiseSpec::CavityShot(c) => Ok(c.strength() * c.kappa),
        NoiseSpec::Lorentzian(l) if l.symmetry == Symmetry::Antisymmetric => Ok(l.sigma * l.sigma * l.gamma),
        _ => Err(Error::Domain("short-time cubic law needs cavity or antisymmetric Lorentzian noise".into())),
    }
}

/// Minimizes `q(s)` over cutoff-`n` Fourier paths under [`derivative_conditions`].
pub fn solve_optimal_path(n: usize, spec: &NoiseSpec) -> Result<FourierCoefficients> {
    short_time_weight(spec)?;
    let coeffs = match n {
        0 => return Err(Error::Domain("cutoff must be at least 1".into())),
        1 => FourierCoefficients::new(vec![1.0], vec![0.0]),
        // Minimizer of 1 − 2A1 + 5A1² + 2B2².
        2 => FourierCoefficients::new(vec![0.2, 0.8], vec![0.0, 0.0]),
        _ => solve_kkt(n)?,
    };
    DrivePath::fourier(coeffs.clone(), 1.0, 1.0)
        .map_err(|e| Error::NoFeasiblePath(format!("optimum for n = {n} is not a valid path: {e}")))?;
    Ok(coeffs)
}

fn solve_kkt(n: usize) -> Result<FourierCoefficients> {
    let system = derivative_conditions(n);
    let k = system.equations.len();
    let dim = 2 * n + k;
    let mut kkt = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..n {
        let m = (i + 1) as f64;
        kkt[(i, i)] = 2.0 / (4.0 * PI * PI * m * m);
        for j in 0..n {
            let mj = (j + 1) as f64;
            let cross = 1.0 / (m * mj) + if i == j { 0.5 / (m * m) } else { 0.0 };
            kkt[(n + i, n + j)] = 2.0 * cross / (2.0 * PI * PI);
        }
    }
    let mut rhs = DVector::<f64>::zeros(dim);
    for (r, eq) in system.equations.iter().enumerate() {
        let row = 2 * n + r;
        for i in 0..n {
            kkt[(row, i)] = eq.a[i];
            kkt[(i, row)] = eq.a[i];
            kkt[(row, n + i)] = eq.b[i];
            kkt[(n + i, row)] = eq.b[i];
        }
        rhs[row] = eq.rhs;
    }
    let x =
        kkt.lu().solve(&rhs).ok_or_else(|| Error::NoFeasiblePath(format!("singular optimality system for n = {n}")))?;
    Ok(FourierCoefficients::new(x.rows(0, n).iter().copied().collect(), x.rows(n, n).iter().copied().collect()))
}

/// `τ_b/τ_a` for decay under the short-time law `exp(−½W q t³)`, i.e.
/// `(q_a/q_b)^{1/3}`.
pub fn decay_time_ratio(path_a: &DrivePath, path_b: &DrivePath, spec: &NoiseSpec) -> Result<f64> {
    let w = short_time_weight(spec)?;
    let qa = short_time_coefficient(path_a.coefficients());
    let qb = short_time_coefficient(path_b.coefficients());
    if w <= 0.0 || qa <= 0.0 || qb <= 0.0 {
        return Err(Error::Domain("decay time undefined for a vanishing cubic coefficient".into()));
    }
    Ok((qa / qb).cbrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileShape {
    LinearRate,
    QuadraticRate,
}

impl ProfileShape {
    fn profile(self, c: f64) -> PhaseProfile {
        match self {
            Self::LinearRate => PhaseProfile::LinearRate { c },
            Self::QuadraticRate => PhaseProfile::QuadraticRate { c },
        }
    }
}

/// Rate `c` of a phase profile giving geometric phase `target` at `t_f`.
pub fn design_phase_profile(path: &DrivePath, target: f64, shape: ProfileShape) -> Result<PhaseProfile> {
    if target == 0.0 {
        return Ok(PhaseProfile::Zero);
    }
    let t_f = path.t_f();
    let phase_for = |c: f64| geometric_phase(&path.clone().with_phase(shape.profile(c)), t_f);
    let guess = match shape {
        ProfileShape::QuadraticRate => 4.0 * target / (t_f * t_f),
        ProfileShape::LinearRate => 2.0 * target / t_f,
    };
    let tol = 1e-8;
    let mut f0 = phase_for(guess)? - target;
    if f0.abs() <= tol {
        return Ok(shape.profile(guess));
    }
    // Secant iteration; γ is linear in c so this settles in one or two steps.
    let (mut c0, mut c1) = (guess, 1.1 * guess);
    for _ in 0..50 {
        let f1 = phase_for(c1)? - target;
        if f1.abs() <= 1e-12 * target.abs().max(1.0) {
            return Ok(shape.profile(c1));
        }
        if f1 == f0 {
            break;
        }
        let next = c1 - f1 * (c1 - c0) / (f1 - f0);
        (c0, f0, c1) = (c1, f1, next);
    }
    Err(Error::Domain(format!("no phase rate reaches γ = {target} on this path")))
}

/// Area swept by the transverse Bloch vector `S⊥ = ½ sinθ (cosφ, sinφ)`:
/// `½∫ (S⊥ × Ṡ⊥)_z dt`.
pub fn bloch_area(path: &DrivePath, profile: PhaseProfile) -> Result<f64> {
    if profile.rate() == 0.0 {
        return Ok(0.0);
    }
    let path = path.clone().with_phase(profile);
    let t_f = path.t_f();
    let integrand = |t: f64| -> f64 {
        let (theta, theta_dot) = match (path.theta_at(t), path.theta_dot_at(t)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return f64::NAN,
        };
        let (phi, phi_dot) = (profile.phi(t), profile.phi_dot(t));
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let (sx, sy) = (0.5 * st * cp, 0.5 * st * sp);
        let dx = 0.5 * (theta_dot * ct * cp - st * sp * phi_dot);
        let dy = 0.5 * (theta_dot * ct * sp + st * cp * phi_dot);
        0.5 * (sx * dy - sy * dx)
    };
    let scale = 1.0f64.max(profile.rate().abs() * t_f * t_f.max(1.0));
    let est = integrate_with_breakpoints(integrand, &path.breakpoints(), Tolerance::new(1e-15 * scale, 1e-14))?;
    if !est.value.is_finite() {
        return Err(Error::InvalidPath("path angle undefined inside the interval".into()));
    }
    Ok(est.value)
}
