//! Four-level tripod algebra: matrices, states, the drive Hamiltonian and its
//! instantaneous eigenbasis.
//!
//! Basis order is `{|0⟩, |g1⟩, |g2⟩, |e⟩}`. The reference basis used by the
//! superadiabatic frame is `{|0⟩, |d⟩, |+⟩, |−⟩}`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::path::DrivePath;

pub const ZERO: usize = 0;
pub const G1: usize = 1;
pub const G2: usize = 2;
pub const EXCITED: usize = 3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 4×4 complex matrix. Hamiltonians are in angular-frequency units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix4(pub Matrix4<Complex64>);

impl ComplexMatrix4 {
    pub fn zeros() -> Self {
        Self(Matrix4::zeros())
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn from_fn(f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(Matrix4::from_fn(f))
    }

    /// Matrix whose rows are the conjugated vectors, i.e. `Σ_j |ref_j⟩⟨v_j|`.
    pub fn from_bras(vectors: [&StateVector4; 4]) -> Self {
        Self::from_fn(|r, c| vectors[r].0[c].conj())
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0 * factor)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max|H − H†| ≤ tol · max|H|`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol * self.max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (*self * self.adjoint()).max_abs_diff(&Self::identity()) <= tol
    }

    pub fn apply(&self, v: &StateVector4) -> StateVector4 {
        StateVector4(self.0 * v.0)
    }

    /// Eigenvalues in ascending order, treating the matrix as Hermitian.
    pub fn hermitian_eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.0);
        let mut values = [0.0; 4];
        values.copy_from_slice(eig.eigenvalues.as_slice());
        values.sort_by(f64::total_cmp);
        values
    }
}

impl Add for ComplexMatrix4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for ComplexMatrix4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Mul for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

/// Amplitudes on `{|0⟩, |g1⟩, |g2⟩, |e⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector4(pub Vector4<Complex64>);

impl StateVector4 {
    pub fn new(c0: Complex64, g1: Complex64, g2: Complex64, e: Complex64) -> Self {
        Self(Vector4::new(c0, g1, g2, e))
    }

    pub fn basis(index: usize) -> Self {
        let mut v = Vector4::zeros();
        v[index] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.0[index]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0 * factor)
    }

    pub fn axpy(&self, factor: Complex64, other: &Self) -> Self {
        Self(self.0 + other.0 * factor)
    }
}

/// Instantaneous eigenvectors of the tripod Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenFrame {
    pub spectator: StateVector4,
    pub dark: StateVector4,
    pub plus: StateVector4,
    pub minus: StateVector4,
    pub theta: f64,
    pub gap: f64,
    pub phi: f64,
}

impl EigenFrame {
    /// Frame for mixing angle `theta`, gap `G` and relative phase `phi`,
    /// consistent with drives `Ω1 = −2G sinθ`, `Ω2 = 2G cosθ`.
    pub fn from_angles(theta: f64, gap: f64, phi: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let e_phi = Complex64::from_polar(1.0, phi);
        let zero = Complex64::new(0.0, 0.0);
        let dark = StateVector4::new(zero, c.into(), e_phi * s, zero);
        let bright = |sign: f64| StateVector4::new(zero, (-s).into(), e_phi * c, I * sign).scale(FRAC_1_SQRT_2.into());
        Self { spectator: StateVector4::basis(ZERO), dark, plus: bright(1.0), minus: bright(-1.0), theta, gap, phi }
    }

    pub fn vectors(&self) -> [&StateVector4; 4] {
        [&self.spectator, &self.dark, &self.plus, &self.minus]
    }

    /// `U = Σ_j |ref_j⟩⟨j(t)|`, mapping lab amplitudes onto the reference basis.
    pub fn unitary(&self) -> ComplexMatrix4 {
        ComplexMatrix4::from_bras(self.vectors())
    }
}

/// The interaction-picture tripod Hamiltonian
/// `iΩ1/2(|e⟩⟨g1| − |g1⟩⟨e|) + iΩ2/2(e^{−iφ}|e⟩⟨g2| − e^{iφ}|g2⟩⟨e|)`.
pub fn build_interaction_hamiltonian(omega1: f64, omega2: f64, phi: f64) -> Result<ComplexMatrix4> {
    ensure_finite("drive amplitudes and phase", &[omega1, omega2, phi])?;
    let mut h = ComplexMatrix4::zeros();
    let e_phi = Complex64::from_polar(1.0, phi);
    h.0[(EXCITED, G1)] = I * (0.5 * omega1);
    h.0[(G1, EXCITED)] = -I * (0.5 * omega1);
    h.0[(EXCITED, G2)] = I * (0.5 * omega2) * e_phi.conj();
    h.0[(G2, EXCITED)] = -I * (0.5 * omega2) * e_phi;
    Ok(h)
}

/// Eigenbasis of [`build_interaction_hamiltonian`] for the given drives.
///
/// The mixing angle is `atan2(−Ω1, Ω2)`; the dark state is returned with a
/// non-negative `|g1⟩` amplitude. Frames that must stay continuous along a
/// path should use [`EigenFrame::from_angles`] with the path's own angle.
pub fn instantaneous_eigenframe(omega1: f64, omega2: f64, phi: f64) -> Result<EigenFrame> {
    ensure_finite("drive amplitudes and phase", &[omega1, omega2, phi])?;
    if omega1 == 0.0 && omega2 == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let theta = (-omega1).atan2(omega2);
    let gap = 0.5 * omega1.hypot(omega2);
    let mut frame = EigenFrame::from_angles(theta, gap, phi);
    if theta.cos() < 0.0 {
        frame.dark = frame.dark.scale((-1.0).into());
    }
    Ok(frame)
}

/// `U H U† − i U U̇†`.
pub fn rotating_frame_transform(
    h: &ComplexMatrix4,
    u: &ComplexMatrix4,
    u_dot: &ComplexMatrix4,
) -> Result<ComplexMatrix4> {
    if !u.is_unitary(1e-10) {
        return Err(Error::Contract("frame transformation is not unitary".into()));
    }
    let rotated = *u * *h * u.adjoint();
    Ok(rotated - (*u * u_dot.adjoint()).scale(I))
}

/// First-order superadiabatic Hamiltonian `E_j δ_jk − i⟨j|∂_t k⟩` on the
/// reference basis `{|0⟩, |d⟩, |+⟩, |−⟩}`, built from the path derivatives.
pub fn superadiabatic_hamiltonian(path: &DrivePath, t: f64) -> Result<ComplexMatrix4> {
    let theta = path.theta_at(t)?;
    let theta_dot = path.theta_dot_at(t)?;
    let phi_dot = path.phi_dot_at(t)?;
    let gap = path.gap();
    let (s, c) = theta.sin_cos();

    let re = |x: f64| Complex64::new(x, 0.0);
    let mut h = ComplexMatrix4::zeros();
    let bright_shift = 0.5 * phi_dot * c * c;
    h.0[(1, 1)] = re(phi_dot * s * s);
    h.0[(2, 2)] = re(gap + bright_shift);
    h.0[(3, 3)] = re(-gap + bright_shift);
    h.0[(2, 3)] = re(bright_shift);
    h.0[(3, 2)] = re(bright_shift);

    let coupling = Complex64::new(phi_dot * s * c, -theta_dot) * FRAC_1_SQRT_2;
    for bright in [2, 3] {
        h.0[(bright, 1)] = coupling;
        h.0[(1, bright)] = coupling.conj();
    }
    Ok(h)
}
