//! Angular-momentum matrices, rotations and spin coherent states.
//!
//! Every matrix is written in the `|S, m>` basis ordered `m = S, S-1, ..., -S`,
//! so row/column `i` carries `m = S - i`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, real, CMatrix, CVector};
use num_complex::Complex64;

/// Spin quantum number stored as the integer `2S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinValue {
    twice_s: u32,
}

impl SpinValue {
    pub const ZERO: SpinValue = SpinValue { twice_s: 0 };
    pub const HALF: SpinValue = SpinValue { twice_s: 1 };
    pub const ONE: SpinValue = SpinValue { twice_s: 2 };

    pub const fn from_twice(twice_s: u32) -> Self {
        SpinValue { twice_s }
    }

    /// Spin whose multiplet has dimension `dim` (`dim >= 1`).
    pub fn from_dim(dim: usize) -> Self {
        assert!(dim >= 1, "a spin multiplet has dimension at least one");
        SpinValue::from_twice((dim - 1) as u32)
    }

    pub const fn twice(self) -> u32 {
        self.twice_s
    }

    pub fn value(self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    pub const fn dim(self) -> usize {
        self.twice_s as usize + 1
    }

    /// `m` values in basis order, `S` down to `-S`.
    pub fn m_values(self) -> impl Iterator<Item = f64> {
        let t = self.twice_s as i64;
        (0..=t).map(move |i| (t - 2 * i) as f64 / 2.0)
    }

    /// `S/(S+1)`, the largest `alpha` for which the qubit-spin isotropic
    /// state is positive, computed as `2S/(2S+2)`.
    pub fn alpha_max(self) -> f64 {
        self.twice_s as f64 / (self.twice_s as f64 + 2.0)
    }
}

impl fmt::Display for SpinValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_s.is_multiple_of(2) {
            write!(f, "{}", self.twice_s / 2)
        } else {
            write!(f, "{}/2", self.twice_s)
        }
    }
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amplitudes: amplitudes.unscale(norm) })
    }

    /// `|S, m>` basis vector at basis index `index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = real(1.0);
        StateVector { amplitudes: v }
    }

    pub(crate) fn from_unit(amplitudes: CVector) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() < 1e-10);
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_inner(self) -> CVector {
        self.amplitudes
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        self.amplitudes.dotc(&(op * &self.amplitudes))
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        StateVector { amplitudes: self.amplitudes.kronecker(&other.amplitudes) }
    }

    pub fn conj(&self) -> StateVector {
        StateVector { amplitudes: self.amplitudes.conjugate() }
    }
}

/// Point on the unit sphere in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub const fn new(theta: f64, phi: f64) -> Self {
        Direction { theta, phi }
    }

    pub const Z: Direction = Direction::new(0.0, 0.0);
    pub const X: Direction = Direction::new(std::f64::consts::FRAC_PI_2, 0.0);
    pub const Y: Direction = Direction::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);

    /// Direction of a nonzero Cartesian vector.
    pub fn from_vector(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        assert!(r > 0.0, "zero vector has no direction");
        Direction { theta: (v[2] / r).clamp(-1.0, 1.0).acos(), phi: v[1].atan2(v[0]) }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn antipode(&self) -> Direction {
        Direction { theta: std::f64::consts::PI - self.theta, phi: self.phi + std::f64::consts::PI }
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }
}

#[derive(Debug, Clone)]
struct NormalizedOps {
    s_plus_hat: CMatrix,
    s_minus_hat: CMatrix,
    sz_hat: CMatrix,
}

/// Cartesian spin matrices together with the normalized ladder operators
/// `sz/S` and `(sx +- i sy)/(sqrt(2) S)`.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub s: SpinValue,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
    normalized: Option<NormalizedOps>,
}

impl SpinOperators {
    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    pub fn sz_hat(&self) -> Result<&CMatrix> {
        self.normalized.as_ref().map(|n| &n.sz_hat).ok_or(Error::ZeroSpinHasNoDirection)
    }

    pub fn s_plus_hat(&self) -> Result<&CMatrix> {
        self.normalized.as_ref().map(|n| &n.s_plus_hat).ok_or(Error::ZeroSpinHasNoDirection)
    }

    pub fn s_minus_hat(&self) -> Result<&CMatrix> {
        self.normalized.as_ref().map(|n| &n.s_minus_hat).ok_or(Error::ZeroSpinHasNoDirection)
    }

    /// `(sx, sy, sz) / S`.
    pub fn unit_vector_ops(&self) -> Result<[CMatrix; 3]> {
        if self.s.twice() == 0 {
            return Err(Error::ZeroSpinHasNoDirection);
        }
        let inv = real(1.0 / self.s.value());
        Ok([&self.sx * inv, &self.sy * inv, &self.sz * inv])
    }
}

/// Raising operator `S+`, with `<m+1|S+|m> = sqrt((S-m)(S+m+1))`.
fn raising(s: SpinValue) -> CMatrix {
    let d = s.dim();
    let t = s.twice() as f64;
    let mut sp = CMatrix::zeros(d, d);
    for i in 1..d {
        // column i has m = S - i; (S-m)(S+m+1) = i (2S - i + 1)
        let i_f = i as f64;
        sp[(i - 1, i)] = real((i_f * (t - i_f + 1.0)).sqrt());
    }
    sp
}

pub fn make_spin_operators(s: SpinValue) -> SpinOperators {
    let d = s.dim();
    let sp = raising(s);
    let sm = sp.adjoint();
    let sx = (&sp + &sm) * real(0.5);
    let sy = (&sp - &sm) * c(0.0, -0.5);
    let sz = CMatrix::from_diagonal(&CVector::from_iterator(d, s.m_values().map(real)));
    let normalized = (s.twice() > 0).then(|| {
        let sv = s.value();
        let s_plus_hat = &sp * real(1.0 / (std::f64::consts::SQRT_2 * sv));
        NormalizedOps { s_minus_hat: s_plus_hat.adjoint(), s_plus_hat, sz_hat: &sz * real(1.0 / sv) }
    });
    SpinOperators { s, sx, sy, sz, normalized }
}

/// Spectral data for `sy`, reused for every rotation of a given spin.
///
/// `sy` has the exact spectrum `{-S, ..., S}`; its eigenvectors are taken
/// from a Hermitian eigensolve and the eigenvalues are replaced by the exact
/// `m` values, so `exp(-i theta sy)` is built without series truncation.
#[derive(Debug, Clone)]
pub struct SpinRotations {
    s: SpinValue,
    m: Vec<f64>,
    sy_vectors: CMatrix,
    sy_values: Vec<f64>,
}

impl SpinRotations {
    pub fn new(s: SpinValue) -> Self {
        let ops = make_spin_operators(s);
        let (_, vectors) = crate::linalg::eigh(&ops.sy);
        // ascending eigenvalues are -S, -S+1, ..., S
        let t = s.twice() as i64;
        let sy_values = (0..=t).map(|k| (2 * k - t) as f64 / 2.0).collect();
        SpinRotations { s, m: s.m_values().collect(), sy_vectors: vectors, sy_values }
    }

    pub fn spin(&self) -> SpinValue {
        self.s
    }

    fn z_phases(&self, angle: f64) -> Vec<Complex64> {
        self.m.iter().map(|&m| Complex64::from_polar(1.0, -m * angle)).collect()
    }

    /// `exp(-i theta sy)`.
    pub fn y_rotation(&self, theta: f64) -> CMatrix {
        let v = &self.sy_vectors;
        let d = self.s.dim();
        let phases: Vec<Complex64> = self.sy_values.iter().map(|&mu| Complex64::from_polar(1.0, -mu * theta)).collect();
        CMatrix::from_fn(d, d, |r, col| (0..d).map(|k| v[(r, k)] * phases[k] * v[(col, k)].conj()).sum())
    }

    /// `exp(-i sz phi) exp(-i sy theta) exp(-i sz psi)`.
    pub fn rotation(&self, phi: f64, theta: f64, psi: f64) -> CMatrix {
        let left = self.z_phases(phi);
        let right = self.z_phases(psi);
        let mut r = self.y_rotation(theta);
        for i in 0..r.nrows() {
            for j in 0..r.ncols() {
                r[(i, j)] *= left[i] * right[j];
            }
        }
        r
    }

    /// Coherent state `|n(theta, phi)>`, the highest-weight vector rotated
    /// with `psi = 0`.
    pub fn coherent(&self, theta: f64, phi: f64) -> StateVector {
        let d = self.s.dim();
        let v = &self.sy_vectors;
        // first column of exp(-i theta sy)
        let weights: Vec<Complex64> = self
            .sy_values
            .iter()
            .enumerate()
            .map(|(k, &mu)| Complex64::from_polar(1.0, -mu * theta) * v[(0, k)].conj())
            .collect();
        let z = self.z_phases(phi);
        let amps = CVector::from_fn(d, |r, _| z[r] * (0..d).map(|k| v[(r, k)] * weights[k]).sum::<Complex64>());
        StateVector::from_unit(amps)
    }

    pub fn coherent_at(&self, n: Direction) -> StateVector {
        self.coherent(n.theta, n.phi)
    }
}

pub fn rotation_matrix(s: SpinValue, phi: f64, theta: f64, psi: f64) -> CMatrix {
    SpinRotations::new(s).rotation(phi, theta, psi)
}

pub fn coherent_state(s: SpinValue, theta: f64, phi: f64) -> StateVector {
    SpinRotations::new(s).coherent(theta, phi)
}
