//! Parametric state families and their positivity ranges.
//!
//! Two-qubit states use the basis `|uu>, |ud>, |du>, |dd>`; higher spins use
//! the descending `m` ordering of [`crate::spin`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMatrix};
use crate::qrep::DensityMatrix;
use crate::spin::{make_spin_operators, SpinValue};

/// Slack allowed when a parameter sits on the boundary of its range.
const RANGE_SLACK: f64 = 1e-12;

fn check_range(family: &'static str, param: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !(value >= lo - RANGE_SLACK && value <= hi + RANGE_SLACK) {
        return Err(Error::PositivityViolation { family, param, value, lo, hi });
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidParameter {
            name: "theta",
            value: theta,
            reason: "Schmidt angle must lie in [0, pi]",
        });
    }
    Ok(())
}

/// `sigma . S_hat = sum_i sigma_i (x) S_i / S` on qubit (x) spin-S.
fn sigma_dot_s_hat(s: SpinValue) -> Result<CMatrix> {
    let half = make_spin_operators(SpinValue::HALF);
    let ops = make_spin_operators(s);
    let unit = ops.unit_vector_ops()?;
    let sigmas = [&half.sx * real(2.0), &half.sy * real(2.0), &half.sz * real(2.0)];
    Ok(sigmas
        .iter()
        .zip(unit.iter())
        .map(|(a, b)| a.kronecker(b))
        .fold(CMatrix::zeros(2 * s.dim(), 2 * s.dim()), |acc, t| acc + t))
}

/// `1/4 (I + alpha sigma^A . sigma^B)` for `-1 <= alpha <= 1/3`.
///
/// Spectrum: `(1 + alpha)/4` three times and `(1 - 3 alpha)/4`.
pub fn werner(alpha: f64) -> Result<DensityMatrix> {
    check_range("werner", "alpha", alpha, -1.0, 1.0 / 3.0)?;
    let m = (linalg::identity(4) + sigma_dot_s_hat(SpinValue::HALF)? * real(alpha)) * real(0.25);
    DensityMatrix::with_known_spectrum(2, 2, m)
}

/// `1/(2(2S+1)) (I + alpha sigma . S/S)` for `-1 <= alpha <= S/(S+1)`.
///
/// `sigma . S_hat` has eigenvalues `1` and `-(S+1)/S`, which fixes the range.
pub fn isotropic(s: SpinValue, alpha: f64) -> Result<DensityMatrix> {
    if s.twice() == 0 {
        return Err(Error::ZeroSpinHasNoDirection);
    }
    check_range("isotropic", "alpha", alpha, -1.0, s.alpha_max())?;
    let d = 2 * s.dim();
    let m = (linalg::identity(d) + sigma_dot_s_hat(s)? * real(alpha)) * real(1.0 / d as f64);
    DensityMatrix::with_known_spectrum(2, s.dim(), m)
}

/// `cos(theta/2)|uu> + sin(theta/2)|dd>` as a projector.
pub fn pure_entangled(theta: f64) -> Result<DensityMatrix> {
    check_theta(theta)?;
    let (s, c) = (theta / 2.0).sin_cos();
    let v = linalg::CVector::from_vec(vec![real(c), real(0.0), real(0.0), real(s)]);
    DensityMatrix::with_known_spectrum(2, 2, linalg::projector(&v))
}

/// Matrix of the spin-S (x) spin-S state whose Q function equals that of
/// `pure_entangled(theta)`:
///
/// ```text
/// 1/(2S+1)^2 { I + cos(theta)(Sz^ (x) I + I (x) Sz^) + Sz^ (x) Sz^
///              + sin(theta)(S+^ (x) S+^ + S-^ (x) S-^) }
/// ```
///
/// Built elementwise; no positivity check.
pub(crate) fn equivalent_mixed_operator(s: SpinValue, theta: f64) -> Result<CMatrix> {
    let el = EquivalentMixedElements::new(s, theta)?;
    let n = s.dim() * s.dim();
    Ok(CMatrix::from_fn(n, n, |r, c| real(el.get(r, c))))
}

/// Lazy matrix elements of [`equivalent_mixed`], indexed by `(i d + j)` with
/// `m_A = S - i`, `m_B = S - j`. Used where only a handful of entries are
/// needed at large spin.
pub(crate) struct EquivalentMixedElements {
    d: usize,
    twice: f64,
    spin: f64,
    norm: f64,
    sin: f64,
    cos: f64,
}

impl EquivalentMixedElements {
    pub(crate) fn new(s: SpinValue, theta: f64) -> Result<Self> {
        if s.twice() == 0 {
            return Err(Error::ZeroSpinHasNoDirection);
        }
        let d = s.dim();
        let (sin, cos) = theta.sin_cos();
        Ok(EquivalentMixedElements {
            d,
            twice: s.twice() as f64,
            spin: s.value(),
            norm: 1.0 / (d * d) as f64,
            sin,
            cos,
        })
    }

    /// `<i-1| S+^ |i>`
    fn raise(&self, i: usize) -> f64 {
        let i_f = i as f64;
        (i_f * (self.twice - i_f + 1.0)).sqrt() / (std::f64::consts::SQRT_2 * self.spin)
    }

    pub(crate) fn get(&self, row: usize, col: usize) -> f64 {
        let (i, j) = (row / self.d, row % self.d);
        let (k, l) = (col / self.d, col % self.d);
        if row == col {
            let (m1, m2) = (self.spin - i as f64, self.spin - j as f64);
            let sv = self.spin;
            return self.norm * (1.0 + self.cos * (m1 + m2) / sv + m1 * m2 / (sv * sv));
        }
        if k == i + 1 && l == j + 1 {
            return self.norm * self.sin * self.raise(k) * self.raise(l);
        }
        if i == k + 1 && j == l + 1 {
            return self.norm * self.sin * self.raise(i) * self.raise(j);
        }
        0.0
    }
}

/// Spin-S (x) spin-S mixed state equivalent to `pure_entangled(theta)`.
/// Rejected if its minimum eigenvalue is below `-1e-10`.
pub fn equivalent_mixed(s: SpinValue, theta: f64) -> Result<DensityMatrix> {
    check_theta(theta)?;
    let m = equivalent_mixed_operator(s, theta)?;
    DensityMatrix::new(s.dim(), s.dim(), m)
}

fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::InvalidParameter { name: "mu", value: mu, reason: "mixing weight must lie in [0, 1]" });
    }
    Ok(())
}

/// `mu |psi(theta)><psi(theta)| + (1 - mu) |psi(theta')><psi(theta')|`.
pub fn rank_two(mu: f64, theta: f64, theta_p: f64) -> Result<DensityMatrix> {
    check_mu(mu)?;
    let a = pure_entangled(theta)?.into_matrix();
    let b = pure_entangled(theta_p)?.into_matrix();
    DensityMatrix::with_known_spectrum(2, 2, a * real(mu) + b * real(1.0 - mu))
}

/// Convex mix of [`equivalent_mixed`] at `theta` and `theta'`.
pub fn equivalent_mixed_rank_two(s: SpinValue, mu: f64, theta: f64, theta_p: f64) -> Result<DensityMatrix> {
    check_mu(mu)?;
    check_theta(theta)?;
    check_theta(theta_p)?;
    let a = equivalent_mixed_operator(s, theta)?;
    let b = equivalent_mixed_operator(s, theta_p)?;
    DensityMatrix::new(s.dim(), s.dim(), a * real(mu) + b * real(1.0 - mu))
}

/// A member of one of the parametric families, as data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum StateFamily {
    Werner { alpha: f64 },
    Isotropic { s: SpinValue, alpha: f64 },
    PureEntangled { theta: f64 },
    EquivalentMixed { s: SpinValue, theta: f64 },
    RankTwo { mu: f64, theta: f64, theta_p: f64 },
}

impl StateFamily {
    pub fn instantiate(&self) -> Result<DensityMatrix> {
        match *self {
            StateFamily::Werner { alpha } => werner(alpha),
            StateFamily::Isotropic { s, alpha } => isotropic(s, alpha),
            StateFamily::PureEntangled { theta } => pure_entangled(theta),
            StateFamily::EquivalentMixed { s, theta } => equivalent_mixed(s, theta),
            StateFamily::RankTwo { mu, theta, theta_p } => rank_two(mu, theta, theta_p),
        }
    }
}
