//! Minimal simulating spin for Werner states, region classification and
//! hidden-variable resource counts.
//!
//! `isotropic(S, alpha)` is separable for `|alpha| <= S/(S+1)` and carries the
//! Werner Q function, so the Werner state `W(alpha)` is simulated by spin `S`
//! exactly when `S/(S+1) >= -alpha`. The resulting map `alpha -> S_min` is a
//! staircase with jumps at `alpha = -S/(S+1)` that diverges at the singlet.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::separability::{min_eigenvalue_2x2, projected_pt_block, projected_pt_block_rank_two};
use crate::spin::SpinValue;

/// Werner states are PPT (hence separable) iff `alpha >= -1/3`.
pub const PPT_THRESHOLD_ALPHA: f64 = -1.0 / 3.0;

/// Werner states violate the CHSH inequality iff `alpha < -1/sqrt(2)`
/// (Horodecki criterion, maximal CHSH value `2 sqrt(2) |alpha|`).
pub const BELL_THRESHOLD_ALPHA: f64 = -FRAC_1_SQRT_2;

/// Relative tolerance used to snap `2 * (-alpha/(1+alpha))` onto an integer
/// when `alpha` is a rounded jump point such as `-0.9`.
const JUMP_SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Separable,
    EntangledLocal,
    BellViolating,
    ExceptionalPoint,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Separable => "separable",
            Region::EntangledLocal => "entangled_local",
            Region::BellViolating => "bell_violating",
            Region::ExceptionalPoint => "exceptional_point",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Minimal spin of an equivalent separable state; infinite for the singlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulatingSpin {
    Finite(SpinValue),
    Infinite,
}

impl SimulatingSpin {
    pub fn finite(self) -> Option<SpinValue> {
        match self {
            SimulatingSpin::Finite(s) => Some(s),
            SimulatingSpin::Infinite => None,
        }
    }

    /// `2 S_min`, or `"inf"`.
    pub fn twice_label(self) -> String {
        match self {
            SimulatingSpin::Finite(s) => s.twice().to_string(),
            SimulatingSpin::Infinite => "inf".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenVariableCount {
    Finite(u64),
    Infinite,
}

impl HiddenVariableCount {
    pub fn finite(self) -> Option<u64> {
        match self {
            HiddenVariableCount::Finite(n) => Some(n),
            HiddenVariableCount::Infinite => None,
        }
    }

    pub fn label(self) -> String {
        match self {
            HiddenVariableCount::Finite(n) => n.to_string(),
            HiddenVariableCount::Infinite => "inf".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulabilityReport {
    pub alpha: f64,
    pub region: Region,
    pub s_min: SimulatingSpin,
    pub n_h: HiddenVariableCount,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(-1.0..=1.0 / 3.0 + 1e-12).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(())
}

/// `-alpha/(1+alpha)`, the unrounded simulating spin.
pub fn s_min_continuous(alpha: f64) -> f64 {
    -alpha / (1.0 + alpha)
}

/// Least half-integer `S >= 1/2` with `S/(S+1) >= -alpha`.
///
/// Rounding `-alpha/(1+alpha)` down would leave `alpha` outside the positivity
/// range of the isotropic state, so the ceiling is taken. Values within
/// `1e-12` (relative) of a half-integer are read as that half-integer.
pub fn s_min(alpha: f64) -> Result<SimulatingSpin> {
    check_alpha(alpha)?;
    if alpha == -1.0 {
        return Ok(SimulatingSpin::Infinite);
    }
    let two_x = 2.0 * s_min_continuous(alpha);
    if two_x <= 1.0 {
        return Ok(SimulatingSpin::Finite(SpinValue::HALF));
    }
    let nearest = two_x.round();
    let twice = if (two_x - nearest).abs() <= JUMP_SNAP_TOL * two_x { nearest } else { two_x.ceil() };
    if twice > u32::MAX as f64 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "simulating spin exceeds the representable range",
        });
    }
    Ok(SimulatingSpin::Finite(SpinValue::from_twice(twice as u32)))
}

/// Jump location `alpha = -S/(S+1) = -2S/(2S+2)` as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpPoint {
    pub spin: SpinValue,
}

impl JumpPoint {
    /// `(numerator, denominator)` in lowest terms.
    pub fn fraction(self) -> (i64, i64) {
        let (mut n, mut d) = (self.spin.twice() as i64, self.spin.twice() as i64 + 2);
        let (mut a, mut b) = (n, d);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        n /= a;
        d /= a;
        (-n, d)
    }

    pub fn alpha(self) -> f64 {
        -(self.spin.twice() as f64) / (self.spin.twice() as f64 + 2.0)
    }
}

impl fmt::Display for JumpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.fraction();
        write!(f, "{n}/{d}")
    }
}

/// All jump points `-S/(S+1)` inside `[lo, hi]`, in ascending `alpha`.
pub fn jump_points(lo: f64, hi: f64) -> Vec<JumpPoint> {
    let mut out = Vec::new();
    if lo <= -1.0 {
        return out;
    }
    let mut t = 1u32;
    loop {
        let jp = JumpPoint { spin: SpinValue::from_twice(t) };
        let a = jp.alpha();
        if a < lo - JUMP_SNAP_TOL {
            break;
        }
        if a <= hi + JUMP_SNAP_TOL {
            out.push(jp);
        }
        t += 1;
    }
    out.reverse();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaircaseRow {
    pub alpha: f64,
    pub s_min: SpinValue,
    /// Set when the row sits exactly on a jump point.
    pub jump: Option<JumpPoint>,
}

/// Samples `alpha -> S_min` on a uniform grid over `[lo, hi]` plus every jump
/// point in range, sorted by `alpha`.
pub fn staircase(lo: f64, hi: f64, step: f64) -> Result<Vec<StaircaseRow>> {
    let invalid = |reason| Error::InvalidRange { lo, hi, step, reason };
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(invalid("bounds and step must be finite"));
    }
    if lo > hi {
        return Err(invalid("lower bound exceeds upper bound"));
    }
    if step <= 0.0 {
        return Err(invalid("step must be positive"));
    }
    if lo <= -1.0 {
        return Err(invalid("range touches alpha = -1 where S_min is infinite"));
    }
    if hi > 1.0 / 3.0 + 1e-12 {
        return Err(invalid("range exceeds the Werner bound 1/3"));
    }
    let jumps = jump_points(lo, hi);
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut alphas: Vec<(f64, Option<JumpPoint>)> = (0..=n)
        .map(|i| (lo + i as f64 * step, None))
        .filter(|(a, _)| !jumps.iter().any(|j| (j.alpha() - a).abs() <= JUMP_SNAP_TOL))
        .collect();
    alphas.extend(jumps.iter().map(|&j| (j.alpha(), Some(j))));
    alphas.sort_by(|a, b| a.0.total_cmp(&b.0));
    alphas
        .into_iter()
        .map(|(alpha, jump)| {
            let s = match jump {
                Some(j) => j.spin,
                None => s_min(alpha)?.finite().expect("alpha > -1 has finite S_min"),
            };
            Ok(StaircaseRow { alpha, s_min: s, jump })
        })
        .collect()
}

pub fn region(alpha: f64) -> Result<Region> {
    check_alpha(alpha)?;
    Ok(if alpha == -1.0 {
        Region::ExceptionalPoint
    } else if alpha < BELL_THRESHOLD_ALPHA {
        Region::BellViolating
    } else if alpha < PPT_THRESHOLD_ALPHA {
        Region::EntangledLocal
    } else {
        Region::Separable
    })
}

pub fn classify(alpha: f64) -> Result<SimulabilityReport> {
    Ok(SimulabilityReport { alpha, region: region(alpha)?, s_min: s_min(alpha)?, n_h: lhv_count(alpha)? })
}

/// Caratheodory bound `(M N)^2 + 1` on the number of terms of a separable
/// decomposition on `C^M (x) C^N`.
pub fn caratheodory_bound(d_a: usize, d_b: usize) -> u64 {
    let mn = (d_a * d_b) as u64;
    mn * mn + 1
}

/// `4 (2 S_min + 1)^2 + 1`, the Caratheodory bound for qubit (x) spin `S_min`.
pub fn lhv_count(alpha: f64) -> Result<HiddenVariableCount> {
    Ok(match s_min(alpha)? {
        SimulatingSpin::Finite(s) => HiddenVariableCount::Finite(caratheodory_bound(2, s.dim())),
        SimulatingSpin::Infinite => HiddenVariableCount::Infinite,
    })
}

/// Continuous estimate `4 (1 - alpha)^2 / (1 + alpha)^2`, i.e. `4 (2S+1)^2`
/// with the unrounded `S = -alpha/(1+alpha)` and without the `+1`.
pub fn lhv_count_continuous(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let r = (1.0 - alpha) / (1.0 + alpha);
    Ok(4.0 * r * r)
}

/// Families for approximate-simulation resource counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ResourceFamily {
    Bell,
    Pure { theta: f64 },
    RankTwo { mu: f64, theta: f64, theta_p: f64 },
}

impl ResourceFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ResourceFamily::Bell => "bell",
            ResourceFamily::Pure { .. } => "pure",
            ResourceFamily::RankTwo { .. } => "rank_two",
        }
    }

    /// Entanglement factor multiplying `1/epsilon^2`: `1`, `|sin theta|`, or
    /// `|mu sin theta + (1 - mu) sin theta'|`.
    pub fn entanglement_factor(&self) -> f64 {
        match *self {
            ResourceFamily::Bell => 1.0,
            ResourceFamily::Pure { theta } => theta.sin().abs(),
            ResourceFamily::RankTwo { mu, theta, theta_p } => (mu * theta.sin() + (1.0 - mu) * theta_p.sin()).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub epsilon: f64,
    pub n_h_epsilon: f64,
    pub effective_epsilon: f64,
}

/// `N_h(epsilon) ~ 1/epsilon_eff^2` for approximating an exceptional state
/// to error `epsilon`.
pub fn epsilon_resources(family: ResourceFamily, epsilon: f64) -> Result<ResourceEstimate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "error tolerance must be positive",
        });
    }
    let g = family.entanglement_factor();
    if g < 1e-15 {
        return Err(Error::SeparableLimit);
    }
    let effective_epsilon = epsilon / g;
    let inv = 1.0 / effective_epsilon;
    Ok(ResourceEstimate { epsilon, n_h_epsilon: inv * inv, effective_epsilon })
}

/// Negative eigenvalue of the projected partial transpose of the spin-S
/// equivalent of `pure_entangled(theta)` (zero when `sin theta = 0`).
pub fn lambda_minus(s: SpinValue, theta: f64) -> Result<f64> {
    Ok(min_eigenvalue_2x2(&projected_pt_block(s, theta)?))
}

pub fn lambda_minus_rank_two(s: SpinValue, mu: f64, theta: f64, theta_p: f64) -> Result<f64> {
    Ok(min_eigenvalue_2x2(&projected_pt_block_rank_two(s, mu, theta, theta_p)?))
}

/// Smallest `S <= max` whose witness eigenvalue satisfies `|lambda_-| <= epsilon`.
pub fn min_spin_for_error(theta: f64, epsilon: f64, max: SpinValue) -> Result<Option<SpinValue>> {
    for t in 1..=max.twice() {
        let s = SpinValue::from_twice(t);
        if lambda_minus(s, theta)?.abs() <= epsilon {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separability::{ppt_check, DEFAULT_NEGATIVITY_TOL};
    use crate::states::isotropic;
    use std::f64::consts::PI;

    fn twice(alpha: f64) -> u32 {
        s_min(alpha).unwrap().finite().unwrap().twice()
    }

    #[test]
    fn s_min_examples() {
        assert_eq!(twice(-FRAC_1_SQRT_2), 5);
        assert_eq!(twice(-1.0 / 3.0), 1);
        assert_eq!(twice(-0.9), 18);
        assert_eq!(twice(-0.2), 1);
        assert_eq!(twice(0.3), 1);
        assert_eq!(s_min(-1.0).unwrap(), SimulatingSpin::Infinite);
        assert!(s_min(-1.1).is_err());
        assert!(s_min(0.4).is_err());
    }

    #[test]
    fn s_min_cross_checked_by_ppt() {
        assert!(!ppt_check(&isotropic(SpinValue::from_twice(18), -0.9).unwrap(), DEFAULT_NEGATIVITY_TOL).entangled);
        assert!(ppt_check(&isotropic(SpinValue::from_twice(17), -0.9).unwrap(), DEFAULT_NEGATIVITY_TOL).entangled);
    }

    #[test]
    fn s_min_is_least_admissible() {
        for k in 1..200 {
            let alpha = -1.0 + k as f64 * (2.0 / 3.0) / 200.0;
            let s = s_min(alpha).unwrap().finite().unwrap();
            assert!(s.alpha_max() >= -alpha - 1e-12);
            if s.twice() > 1 {
                assert!(SpinValue::from_twice(s.twice() - 1).alpha_max() < -alpha);
            }
        }
    }

    #[test]
    fn jump_fractions() {
        let j = JumpPoint { spin: SpinValue::from_twice(37) };
        assert_eq!(j.fraction(), (-37, 39));
        let j = JumpPoint { spin: SpinValue::from_twice(18) };
        assert_eq!(j.fraction(), (-9, 10));
        assert_eq!(j.to_string(), "-9/10");
    }

    #[test]
    fn figure_window() {
        let rows = staircase(-0.95, -0.85, 1e-3).unwrap();
        assert!(rows.windows(2).all(|w| w[0].alpha < w[1].alpha && w[0].s_min >= w[1].s_min));
        assert_eq!(rows.first().unwrap().s_min, SpinValue::from_twice(38));
        assert_eq!(rows.last().unwrap().s_min, SpinValue::from_twice(12));
        let jumps: Vec<(i64, i64)> = rows.iter().filter_map(|r| r.jump).map(|j| j.fraction()).collect();
        for want in [(-19, 20), (-37, 39), (-9, 10), (-17, 19), (-8, 9), (-15, 17), (-7, 8), (-13, 15), (-6, 7)] {
            assert!(jumps.contains(&want), "{want:?}");
        }
        assert_eq!(jumps.len(), 27);
        // s_min changes only across jump points
        for w in rows.windows(2) {
            if w[0].s_min != w[1].s_min {
                assert!(w[1].jump.is_some(), "change at {} without a jump", w[1].alpha);
            }
        }
    }

    #[test]
    fn narrow_window_single_jump() {
        let rows = staircase(-0.5, -0.4, 0.01).unwrap();
        let jumps: Vec<_> = rows.iter().filter_map(|r| r.jump).collect();
        assert_eq!(jumps.len(), 1);
        assert_eq!(jumps[0].spin, SpinValue::ONE);
        assert!(rows.iter().all(|r| r.s_min == SpinValue::ONE));
        let rows = staircase(-0.4, -0.35, 0.01).unwrap();
        assert!(rows.iter().all(|r| r.s_min == SpinValue::ONE && r.jump.is_none()));
    }

    #[test]
    fn staircase_rejects_bad_ranges() {
        assert!(staircase(-1.0, -0.9, 0.01).is_err());
        assert!(staircase(-0.8, -0.9, 0.01).is_err());
        assert!(staircase(-0.9, -0.8, 0.0).is_err());
        assert!(staircase(-0.9, 0.5, 0.01).is_err());
    }

    #[test]
    fn classify_examples() {
        let r = classify(-0.2).unwrap();
        assert_eq!(r.region, Region::Separable);
        assert_eq!(r.s_min, SimulatingSpin::Finite(SpinValue::HALF));
        assert_eq!(classify(-0.6).unwrap().region, Region::EntangledLocal);
        assert_eq!(classify(-0.8).unwrap().region, Region::BellViolating);
        let bell = classify(-1.0).unwrap();
        assert_eq!(bell.region, Region::ExceptionalPoint);
        assert_eq!(bell.n_h, HiddenVariableCount::Infinite);
    }

    #[test]
    fn region_boundaries() {
        let t = PPT_THRESHOLD_ALPHA;
        assert_eq!(region(t + 1e-9).unwrap(), Region::Separable);
        assert_eq!(region(t - 1e-9).unwrap(), Region::EntangledLocal);
        let b = BELL_THRESHOLD_ALPHA;
        assert_eq!(region(b + 1e-9).unwrap(), Region::EntangledLocal);
        assert_eq!(region(b - 1e-9).unwrap(), Region::BellViolating);
    }

    #[test]
    fn lhv_counts() {
        assert_eq!(lhv_count(-0.5).unwrap(), HiddenVariableCount::Finite(37));
        assert_eq!(lhv_count(-FRAC_1_SQRT_2).unwrap(), HiddenVariableCount::Finite(145));
        assert_eq!(lhv_count(-1.0).unwrap(), HiddenVariableCount::Infinite);
        assert!(caratheodory_bound(2, 2) >= 5);
    }

    #[test]
    fn continuous_count_diverges_as_inverse_square() {
        // 4 ((2 - eps)/eps)^2 eps^2 -> 16
        for k in 1..=6 {
            let eps = 10f64.powi(-k);
            let n = lhv_count_continuous(-1.0 + eps).unwrap();
            let want = 4.0 * (2.0 - eps) * (2.0 - eps);
            assert!((n * eps * eps - want).abs() < 1e-6 * want, "k={k}");
        }
        assert_eq!(lhv_count_continuous(-1.0).unwrap(), f64::INFINITY);
        // the exact integer count differs from the estimate by the +1 and the ceiling
        let exact = lhv_count(-0.5).unwrap().finite().unwrap() as f64;
        assert_eq!(exact - lhv_count_continuous(-0.5).unwrap(), 1.0);
    }

    #[test]
    fn epsilon_scalings() {
        assert_eq!(epsilon_resources(ResourceFamily::Bell, 0.01).unwrap().n_h_epsilon, 1e4);
        let pure = epsilon_resources(ResourceFamily::Pure { theta: PI / 2.0 }, 0.1).unwrap();
        assert!((pure.n_h_epsilon - 100.0).abs() < 1e-9);
        let th = 0.7;
        let a = epsilon_resources(ResourceFamily::RankTwo { mu: 1.0, theta: th, theta_p: 0.2 }, 0.05).unwrap();
        let b = epsilon_resources(ResourceFamily::Pure { theta: th }, 0.05).unwrap();
        assert!((a.n_h_epsilon - b.n_h_epsilon).abs() < 1e-9 * b.n_h_epsilon);
        assert!((a.effective_epsilon - b.effective_epsilon).abs() < 1e-15);
        assert_eq!(epsilon_resources(ResourceFamily::Pure { theta: 0.0 }, 0.1).unwrap_err(), Error::SeparableLimit);
        assert!(epsilon_resources(ResourceFamily::Bell, 0.0).is_err());
        for est in [a, b, pure] {
            assert!(
                (est.n_h_epsilon - 1.0 / (est.effective_epsilon * est.effective_epsilon)).abs()
                    < 1e-9 * est.n_h_epsilon
            );
        }
    }

    #[test]
    fn lambda_minus_examples() {
        assert_eq!(lambda_minus(SpinValue::ONE, 0.0).unwrap(), 0.0);
        let l = lambda_minus(SpinValue::ONE, PI / 2.0).unwrap();
        assert!((l - (1.0 - 5f64.sqrt()) / 18.0).abs() < 1e-15);
        let mags: Vec<f64> =
            (2..=40).map(|t| lambda_minus(SpinValue::from_twice(t), PI / 2.0).unwrap().abs()).collect();
        assert!(mags.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn spin_for_target_error() {
        let eps = 1e-3;
        let s = min_spin_for_error(PI / 2.0, eps, SpinValue::from_twice(200)).unwrap().unwrap();
        assert!(lambda_minus(s, PI / 2.0).unwrap().abs() <= eps);
        let below = SpinValue::from_twice(s.twice() - 1);
        assert!(lambda_minus(below, PI / 2.0).unwrap().abs() > eps);
        assert_eq!(min_spin_for_error(PI / 2.0, 1e-12, SpinValue::from_twice(4)).unwrap(), None);
    }
}
