//! Drive paths `(θ(t), φ(t))` over `[0, t_f]`.
//!
//! A circular path with `n` loops has `θ = 2nπ t/t_f`, so `cos2θ` completes
//! `2n` periods. Fourier paths prescribe `s(t) = cos2θ(t)` directly and recover
//! `θ` by continuous branch tracking of `½ arccos s`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

pub const BOUNDEDNESS_GRID: usize = 10_000;
const BOUND_TOL: f64 = 1e-9;
const TOUCH_WINDOW: f64 = 1e-6;

/// Time dependence of the relative laser phase `φ(t)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseProfile {
    #[default]
    Zero,
    /// `φ̇ = c`.
    LinearRate { c: f64 },
    /// `φ̇ = c t`.
    QuadraticRate { c: f64 },
}

impl PhaseProfile {
    pub fn phi(&self, t: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::LinearRate { c } => c * t,
            Self::QuadraticRate { c } => 0.5 * c * t * t,
        }
    }

    pub fn phi_dot(&self, t: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::LinearRate { c } => c,
            Self::QuadraticRate { c } => c * t,
        }
    }

    pub fn phi_ddot(&self) -> f64 {
        match *self {
            Self::QuadraticRate { c } => c,
            _ => 0.0,
        }
    }

    pub fn rate(&self) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::LinearRate { c } | Self::QuadraticRate { c } => c,
        }
    }
}

/// Shape of `cos2θ(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathShape {
    Circular {
        loops: u32,
    },
    /// `s(t) = Σ_m A_m cos(2πmt/t_f) + B_m sin(2πmt/t_f)`, `m = 1..`.
    FourierCos2Theta {
        a: Vec<f64>,
        b: Vec<f64>,
    },
}

/// Cosine and sine coefficients of `s(t)` on harmonics `m = 1..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl FourierCoefficients {
    pub fn new(mut a: Vec<f64>, mut b: Vec<f64>) -> Self {
        let n = a.len().max(b.len());
        a.resize(n, 0.0);
        b.resize(n, 0.0);
        Self { a, b }
    }

    pub fn cutoff(&self) -> usize {
        self.a.len()
    }

    /// `(m, A_m, B_m)` with `m` starting at 1.
    pub fn harmonics(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.a.iter().zip(&self.b).enumerate().map(|(i, (&a, &b))| ((i + 1) as f64, a, b))
    }

    /// `s` and its first two derivatives in the unit time `x = t/t_f`.
    pub fn eval(&self, x: f64) -> [f64; 3] {
        self.harmonics().fold([0.0; 3], |acc, (m, a, b)| {
            let w = 2.0 * PI * m;
            let (sn, cs) = (w * x).sin_cos();
            [acc[0] + a * cs + b * sn, acc[1] + w * (b * cs - a * sn), acc[2] - w * w * (a * cs + b * sn)]
        })
    }
}

/// Point where `s` touches `±1` and the arccos branch flips.
#[derive(Clone, Copy, Debug, PartialEq)]
struct BranchFlip {
    x: f64,
    base: f64,
    dir: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrivePath {
    shape: PathShape,
    amplitude: f64,
    t_f: f64,
    phase: PhaseProfile,
    coeffs: FourierCoefficients,
    flips: Vec<BranchFlip>,
}

impl DrivePath {
    pub fn circular(loops: u32, amplitude: f64, t_f: f64) -> Result<Self> {
        if loops == 0 {
            return Err(Error::InvalidPath("circular path needs at least one loop".into()));
        }
        let n = 2 * loops as usize;
        let mut a = vec![0.0; n];
        a[n - 1] = 1.0;
        Self::build(PathShape::Circular { loops }, FourierCoefficients::new(a, vec![]), amplitude, t_f)
    }

    pub fn fourier(coeffs: FourierCoefficients, amplitude: f64, t_f: f64) -> Result<Self> {
        let shape = PathShape::FourierCos2Theta { a: coeffs.a.clone(), b: coeffs.b.clone() };
        Self::build(shape, coeffs, amplitude, t_f)
    }

    pub fn from_shape(shape: PathShape, amplitude: f64, t_f: f64) -> Result<Self> {
        match shape {
            PathShape::Circular { loops } => Self::circular(loops, amplitude, t_f),
            PathShape::FourierCos2Theta { a, b } => Self::fourier(FourierCoefficients::new(a, b), amplitude, t_f),
        }
    }

    fn build(shape: PathShape, coeffs: FourierCoefficients, amplitude: f64, t_f: f64) -> Result<Self> {
        ensure_finite("path amplitude and duration", &[amplitude, t_f])?;
        if t_f <= 0.0 {
            return Err(Error::InvalidPath(format!("t_f must be positive, got {t_f}")));
        }
        if amplitude <= 0.0 {
            return Err(Error::InvalidPath(format!("amplitude must be positive, got {amplitude}")));
        }
        if coeffs.cutoff() == 0 {
            return Err(Error::InvalidPath("no harmonics given".into()));
        }
        ensure_finite("Fourier coefficients", &coeffs.a)?;
        ensure_finite("Fourier coefficients", &coeffs.b)?;
        let sum: f64 = coeffs.a.iter().sum();
        if (sum - 1.0).abs() > BOUND_TOL {
            return Err(Error::InvalidPath(format!("cosine coefficients sum to {sum}, expected 1")));
        }
        let flips = match shape {
            PathShape::Circular { .. } => Vec::new(),
            PathShape::FourierCos2Theta { .. } => track_branches(&coeffs)?,
        };
        Ok(Self { shape, amplitude, t_f, phase: PhaseProfile::Zero, coeffs, flips })
    }

    pub fn with_phase(mut self, phase: PhaseProfile) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_duration(&self, t_f: f64) -> Result<Self> {
        Self::from_shape(self.shape.clone(), self.amplitude, t_f).map(|p| p.with_phase(self.phase))
    }

    pub fn shape(&self) -> &PathShape {
        &self.shape
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `G = A/2`.
    pub fn gap(&self) -> f64 {
        0.5 * self.amplitude
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn phase(&self) -> PhaseProfile {
        self.phase
    }

    /// `s(t)` as a Fourier series (circular paths included).
    pub fn coefficients(&self) -> &FourierCoefficients {
        &self.coeffs
    }

    /// Number of `cos2θ` periods for circular paths.
    pub fn cos2theta_periods(&self) -> Option<u32> {
        match self.shape {
            PathShape::Circular { loops } => Some(2 * loops),
            PathShape::FourierCos2Theta { .. } => None,
        }
    }

    /// Split points at multiples of the shortest harmonic period.
    pub fn breakpoints(&self) -> Vec<f64> {
        let n = self.coeffs.cutoff().max(1);
        (0..=n).map(|k| self.t_f * k as f64 / n as f64).collect()
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.t_f;
        if !t.is_finite() || t < -slack || t > self.t_f + slack {
            return Err(Error::OutOfRange { t, t_f: self.t_f });
        }
        Ok(t.clamp(0.0, self.t_f))
    }

    /// `cos2θ(t)` without range checks.
    pub(crate) fn s(&self, t: f64) -> f64 {
        match self.shape {
            PathShape::Circular { loops } => (4.0 * PI * loops as f64 * t / self.t_f).cos(),
            PathShape::FourierCos2Theta { .. } => self.coeffs.eval(t / self.t_f)[0],
        }
    }

    /// `sin²θ = (1 − cos2θ)/2` without range checks.
    pub(crate) fn sin2_theta(&self, t: f64) -> f64 {
        0.5 * (1.0 - self.s(t))
    }

    pub fn cos2theta_at(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        let s = self.s(t);
        if s.abs() > 1.0 + BOUND_TOL {
            return Err(Error::InvalidPath(format!("|cos2θ| = {} > 1 at t = {t}", s.abs())));
        }
        Ok(s)
    }

    pub fn theta_at(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        match self.shape {
            PathShape::Circular { loops } => Ok(2.0 * PI * loops as f64 * t / self.t_f),
            PathShape::FourierCos2Theta { .. } => {
                let s = self.cos2theta_at(t)?;
                let branch = self.branch(t / self.t_f);
                Ok(branch.base + branch.dir * principal(s))
            }
        }
    }

    pub fn theta_dot_at(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        match self.shape {
            PathShape::Circular { loops } => Ok(2.0 * PI * loops as f64 / self.t_f),
            PathShape::FourierCos2Theta { .. } => {
                let x = t / self.t_f;
                let [s, ds, dds] = self.coeffs.eval(x);
                let w2 = 1.0 - s * s;
                let dir = self.branch(x).dir;
                let rate = if w2 > 1e-14 {
                    -dir * ds / (2.0 * w2.sqrt())
                } else {
                    // At a touch point θ̇² → |s''|/4; take the sign from the motion of θ.
                    let h = 1e-7;
                    let ahead = self.theta_unit((x + h).min(1.0));
                    let behind = self.theta_unit((x - h).max(0.0));
                    (ahead - behind).signum() * 0.5 * dds.abs().sqrt()
                };
                Ok(rate / self.t_f)
            }
        }
    }

    pub fn theta_ddot_at(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        match self.shape {
            PathShape::Circular { .. } => Ok(0.0),
            PathShape::FourierCos2Theta { .. } => {
                let x = t / self.t_f;
                let [s, ds, dds] = self.coeffs.eval(x);
                let w2 = 1.0 - s * s;
                if w2 > 1e-8 {
                    let w = w2.sqrt();
                    let dir = self.branch(x).dir;
                    let unit = -dir * (dds / (2.0 * w) + s * ds * ds / (2.0 * w2 * w));
                    Ok(unit / (self.t_f * self.t_f))
                } else {
                    let h = 1e-4 * self.t_f;
                    let lo = (t - h).max(0.0);
                    let hi = (t + h).min(self.t_f);
                    Ok((self.theta_dot_at(hi)? - self.theta_dot_at(lo)?) / (hi - lo))
                }
            }
        }
    }

    pub fn phi_at(&self, t: f64) -> Result<f64> {
        Ok(self.phase.phi(self.check_time(t)?))
    }

    pub fn phi_dot_at(&self, t: f64) -> Result<f64> {
        Ok(self.phase.phi_dot(self.check_time(t)?))
    }

    pub fn phi_ddot_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.phase.phi_ddot())
    }

    /// Drive amplitudes `(Ω1, Ω2) = (−A sinθ, A cosθ)` at `t`.
    pub fn drives_at(&self, t: f64) -> Result<(f64, f64)> {
        let (s, c) = self.theta_at(t)?.sin_cos();
        Ok((-self.amplitude * s, self.amplitude * c))
    }

    fn theta_unit(&self, x: f64) -> f64 {
        let s = self.coeffs.eval(x)[0];
        let branch = self.branch(x);
        branch.base + branch.dir * principal(s)
    }

    fn branch(&self, x: f64) -> BranchFlip {
        let idx = self.flips.partition_point(|f| f.x <= x);
        if idx == 0 {
            BranchFlip { x: 0.0, base: 0.0, dir: 1.0 }
        } else {
            self.flips[idx - 1]
        }
    }
}

fn principal(s: f64) -> f64 {
    0.5 * s.clamp(-1.0, 1.0).acos()
}

/// Locates interior touches of `s = ±1` and records the continuation of `θ`
/// through each one, so that `θ` passes through `kπ/2` instead of reflecting.
fn track_branches(coeffs: &FourierCoefficients) -> Result<Vec<BranchFlip>> {
    let n = BOUNDEDNESS_GRID;
    let samples: Vec<f64> = (0..=n).map(|i| coeffs.eval(i as f64 / n as f64)[0]).collect();
    if let Some((i, s)) = samples.iter().enumerate().find(|(_, s)| s.abs() > 1.0 + BOUND_TOL) {
        return Err(Error::InvalidPath(format!("|cos2θ| = {} > 1 at x = {}", s.abs(), i as f64 / n as f64)));
    }

    let mut touches: Vec<f64> = Vec::new();
    for i in 1..n {
        let (prev, cur, next) = (samples[i - 1].abs(), samples[i].abs(), samples[i + 1].abs());
        if cur < 1.0 - TOUCH_WINDOW || cur < prev || cur < next {
            continue;
        }
        let x = refine_extremum(coeffs, (i - 1) as f64 / n as f64, (i + 1) as f64 / n as f64);
        let s = coeffs.eval(x)[0];
        if s.abs() > 1.0 + BOUND_TOL {
            return Err(Error::InvalidPath(format!("|cos2θ| = {} > 1 at x = {x}", s.abs())));
        }
        let spacing = 1.0 / n as f64;
        if s.abs() >= 1.0 - BOUND_TOL
            && x > spacing
            && x < 1.0 - spacing
            && touches.last().is_none_or(|&last| x - last > spacing)
        {
            touches.push(x);
        }
    }

    let mut flips = Vec::with_capacity(touches.len());
    let (mut base, mut dir) = (0.0, 1.0);
    for x in touches {
        let pivot = if coeffs.eval(x)[0] > 0.0 { 0.0 } else { FRAC_PI_2 };
        base += 2.0 * dir * pivot;
        dir = -dir;
        flips.push(BranchFlip { x, base, dir });
    }
    Ok(flips)
}

/// Bisection on `s'` for the extremum bracketed by `[lo, hi]`.
fn refine_extremum(coeffs: &FourierCoefficients, mut lo: f64, mut hi: f64) -> f64 {
    let slope = |x: f64| coeffs.eval(x)[1];
    let (mut f_lo, f_hi) = (slope(lo), slope(hi));
    if f_lo.signum() == f_hi.signum() {
        // Extremum sits on a grid node; keep the larger |s|.
        let mid = 0.5 * (lo + hi);
        return [lo, mid, hi]
            .into_iter()
            .max_by(|a, b| coeffs.eval(*a)[0].abs().total_cmp(&coeffs.eval(*b)[0].abs()))
            .unwrap_or(mid);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let f_mid = slope(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal_n2() -> DrivePath {
        DrivePath::fourier(FourierCoefficients::new(vec![0.2, 0.8], vec![0.0, 0.0]), 10.0, 1.0).unwrap()
    }

    #[test]
    fn circular_basics() {
        let p = DrivePath::circular(1, 2.0, 4.0).unwrap();
        assert_eq!(p.theta_at(0.0).unwrap(), 0.0);
        assert_eq!(p.cos2theta_at(0.0).unwrap(), 1.0);
        assert!(p.cos2theta_at(0.5).unwrap().abs() < 1e-15);
        assert_eq!(p.gap(), 1.0);
        assert!(matches!(p.theta_at(4.1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn fourier_starts_at_one() {
        assert_eq!(optimal_n2().cos2theta_at(0.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_unbounded_or_unnormalized() {
        let bad = DrivePath::fourier(FourierCoefficients::new(vec![-1.0, 2.0], vec![]), 1.0, 1.0);
        assert!(matches!(bad, Err(Error::InvalidPath(_))));
        let bad = DrivePath::fourier(FourierCoefficients::new(vec![0.5], vec![]), 1.0, 1.0);
        assert!(matches!(bad, Err(Error::InvalidPath(_))));
    }

    #[test]
    fn single_harmonic_tracks_through_minus_one() {
        let p = DrivePath::fourier(FourierCoefficients::new(vec![1.0], vec![]), 1.0, 1.0).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((p.theta_at(t).unwrap() - PI * t).abs() < 1e-7, "t = {t}");
            assert!((p.theta_dot_at(t).unwrap() - PI).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn round_trip_cos2theta() {
        let p = optimal_n2();
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            let th = p.theta_at(t).unwrap();
            assert!(((2.0 * th).cos() - p.cos2theta_at(t).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn phase_profiles() {
        let q = PhaseProfile::QuadraticRate { c: 2.0 };
        assert_eq!(q.phi(3.0), 9.0);
        assert_eq!(q.phi_dot(3.0), 6.0);
        assert_eq!(PhaseProfile::LinearRate { c: 2.0 }.phi(3.0), 6.0);
    }
}
