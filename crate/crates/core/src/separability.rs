//! Partial transposes, projected non-separability witnesses and explicit
//! separable ensembles.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::qrep::DensityMatrix;
use crate::sphere::SphereGrid;
use crate::spin::{make_spin_operators, rotation_matrix, SpinRotations, SpinValue, StateVector};
use crate::states;
use num_complex::Complex64;

/// Eigenvalues below `-DEFAULT_NEGATIVITY_TOL` count as negative.
pub const DEFAULT_NEGATIVITY_TOL: f64 = 1e-10;
/// Elementwise tolerance when rebuilding a target state from an ensemble.
pub const DEFAULT_RECONSTRUCTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Transposes the chosen tensor factor of a `d_a d_b` square matrix:
/// `(PT_B m)[(i,j),(k,l)] = m[(i,l),(k,j)]`.
pub fn partial_transpose_matrix(m: &CMatrix, d_a: usize, d_b: usize, sub: Subsystem) -> CMatrix {
    let n = d_a * d_b;
    assert_eq!(m.shape(), (n, n), "matrix does not match d_a * d_b");
    CMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / d_b, r % d_b);
        let (k, l) = (c / d_b, c % d_b);
        match sub {
            Subsystem::B => m[(i * d_b + l, k * d_b + j)],
            Subsystem::A => m[(k * d_b + j, i * d_b + l)],
        }
    })
}

pub fn partial_transpose(rho: &DensityMatrix, sub: Subsystem) -> CMatrix {
    partial_transpose_matrix(rho.matrix(), rho.d_a(), rho.d_b(), sub)
}

/// Result of the positive-partial-transpose test.
#[derive(Debug, Clone, PartialEq)]
pub struct PptReport {
    pub min_eigenvalue: f64,
    pub entangled: bool,
    /// Eigenvector of the partial transpose belonging to `min_eigenvalue`.
    pub witness_vector: CVector,
}

pub fn ppt_check(rho: &DensityMatrix, tol: f64) -> PptReport {
    let pt = partial_transpose(rho, Subsystem::B);
    let (values, vectors) = linalg::eigh(&pt);
    PptReport { min_eigenvalue: values[0], entangled: values[0] < -tol, witness_vector: vectors.column(0).into_owned() }
}

/// Smaller eigenvalue of a real symmetric 2x2 matrix.
pub fn min_eigenvalue_2x2(m: &Matrix2<f64>) -> f64 {
    let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    half_tr - half_diff.hypot(off)
}

/// Basis indices of `|S>|-S>` and `|S-1>|-S+1>` in a spin-S (x) spin-S space.
fn projection_indices(s: SpinValue) -> [usize; 2] {
    let d = s.dim();
    [d - 1, d + (d - 2)]
}

/// Row/column of the matrix element that lands at `(r, c)` after a partial
/// transpose on B.
fn pt_b_source(r: usize, c: usize, d_b: usize) -> (usize, usize) {
    let (i, j) = (r / d_b, r % d_b);
    let (k, l) = (c / d_b, c % d_b);
    (i * d_b + l, k * d_b + j)
}

/// Partial transpose of [`states::equivalent_mixed`] projected onto
/// `span{|S>|-S>, |S-1>|-S+1>}`.
///
/// Equals `[[0, sin(theta)/S], [sin(theta)/S, (2S-1)/S^2]] / (2S+1)^2`, which
/// has a negative eigenvalue whenever `sin(theta) != 0`. Only the four
/// needed elements are evaluated, so large spins are cheap.
pub fn projected_pt_block(s: SpinValue, theta: f64) -> Result<Matrix2<f64>> {
    let el = states::EquivalentMixedElements::new(s, theta)?;
    let idx = projection_indices(s);
    Ok(Matrix2::from_fn(|r, c| {
        let (row, col) = pt_b_source(idx[r], idx[c], s.dim());
        el.get(row, col)
    }))
}

/// `mu * block(theta) + (1 - mu) * block(theta')`.
pub fn projected_pt_block_rank_two(s: SpinValue, mu: f64, theta: f64, theta_p: f64) -> Result<Matrix2<f64>> {
    Ok(projected_pt_block(s, theta)? * mu + projected_pt_block(s, theta_p)? * (1.0 - mu))
}

/// One term `weight * |a><a| (x) |b><b|` of a separable decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEntry {
    pub weight: f64,
    pub a: StateVector,
    pub b: StateVector,
}

/// Explicit separable decomposition `sum_i p_i |a_i><a_i| (x) |b_i><b_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableEnsemble {
    entries: Vec<EnsembleEntry>,
}

impl SeparableEnsemble {
    pub const WEIGHT_SUM_TOL: f64 = 1e-12;

    pub fn new(entries: Vec<EnsembleEntry>) -> Result<Self> {
        let first = entries.first().ok_or(Error::InvalidParameter {
            name: "entries",
            value: 0.0,
            reason: "ensemble must not be empty",
        })?;
        let (da, db) = (first.a.dim(), first.b.dim());
        for e in &entries {
            if !(e.weight > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "weight",
                    value: e.weight,
                    reason: "ensemble weights must be positive",
                });
            }
            if e.a.dim() != da || e.b.dim() != db {
                return Err(Error::DimensionMismatch { expected: da * db, got: e.a.dim() * e.b.dim() });
            }
        }
        let total: f64 = entries.iter().map(|e| e.weight).sum();
        if (total - 1.0).abs() > Self::WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter {
                name: "weight sum",
                value: total,
                reason: "ensemble weights must sum to one",
            });
        }
        Ok(SeparableEnsemble { entries })
    }

    pub fn entries(&self) -> &[EnsembleEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn d_a(&self) -> usize {
        self.entries[0].a.dim()
    }

    pub fn d_b(&self) -> usize {
        self.entries[0].b.dim()
    }

    /// `sum_i p_i |a_i (x) b_i><a_i (x) b_i|` as a plain matrix.
    pub fn mixture_matrix(&self) -> CMatrix {
        let n = self.d_a() * self.d_b();
        // W W^dagger with columns sqrt(p_i) a_i (x) b_i
        let w = CMatrix::from_fn(n, self.len(), |r, col| {
            let e = &self.entries[col];
            let (i, j) = (r / self.d_b(), r % self.d_b());
            e.a.amplitudes()[i] * e.b.amplitudes()[j] * e.weight.sqrt()
        });
        &w * w.adjoint()
    }

    pub fn mixture(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.d_a(), self.d_b(), self.mixture_matrix())
    }

    /// Applies local maps to every product term.
    pub fn map_local<FA, FB>(&self, fa: FA, fb: FB) -> SeparableEnsemble
    where
        FA: Fn(&StateVector) -> StateVector,
        FB: Fn(&StateVector) -> StateVector,
    {
        SeparableEnsemble {
            entries: self
                .entries
                .iter()
                .map(|e| EnsembleEntry { weight: e.weight, a: fa(&e.a), b: fb(&e.b) })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&EnsembleRecord::from(self))?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(EnsembleRecord::from(self)).expect("ensemble records serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: EnsembleRecord = serde_json::from_str(s)?;
        rec.try_into()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryRecord {
    weight: f64,
    a: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EnsembleRecord {
    entries: Vec<EntryRecord>,
}

fn complex_list(v: &StateVector) -> Vec<[f64; 2]> {
    v.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

fn state_from_list(list: &[[f64; 2]]) -> Result<StateVector> {
    StateVector::new(CVector::from_iterator(list.len(), list.iter().map(|p| Complex64::new(p[0], p[1]))))
}

impl From<&SeparableEnsemble> for EnsembleRecord {
    fn from(ens: &SeparableEnsemble) -> Self {
        EnsembleRecord {
            entries: ens
                .entries
                .iter()
                .map(|e| EntryRecord { weight: e.weight, a: complex_list(&e.a), b: complex_list(&e.b) })
                .collect(),
        }
    }
}

impl TryFrom<EnsembleRecord> for SeparableEnsemble {
    type Error = Error;

    fn try_from(rec: EnsembleRecord) -> Result<Self> {
        let entries = rec
            .entries
            .iter()
            .map(|e| Ok(EnsembleEntry { weight: e.weight, a: state_from_list(&e.a)?, b: state_from_list(&e.b)? }))
            .collect::<Result<Vec<_>>>()?;
        SeparableEnsemble::new(entries)
    }
}

/// Coherent products `(w_i / 4pi, |n_i>_{1/2}, |n_i>_S)` over a grid, the
/// exact sphere average of the aligned product state.
///
/// The mixture is `isotropic(S, S/(S+1))`; a grid of degree `>= 2S + 1` is
/// needed, `2 * 2S` is the documented choice. The mixture is checked and a
/// mismatch beyond `1e-10` is returned as an error.
pub fn constructive_isotropic_ensemble(s: SpinValue, grid: &SphereGrid) -> Result<SeparableEnsemble> {
    let target = states::isotropic(s, s.alpha_max())?;
    let ens = aligned_ensemble(s, grid, 1.0)?;
    ensure_reproduces(&ens, &target, grid.degree())?;
    Ok(ens)
}

/// Grid ensemble whose mixture is `isotropic(S, lambda S/(S+1))` for
/// `0 <= lambda <= 1`: at each node the qubit is aligned with probability
/// `(1+lambda)/2` and anti-aligned otherwise. `lambda = 0` gives the maximally
/// mixed state as a uniform ensemble over antipodal-pair products.
fn aligned_ensemble(s: SpinValue, grid: &SphereGrid, lambda: f64) -> Result<SeparableEnsemble> {
    let rot_a = SpinRotations::new(SpinValue::HALF);
    let rot_b = SpinRotations::new(s);
    let p_aligned = 0.5 * (1.0 + lambda);
    let p_anti = 0.5 * (1.0 - lambda);
    let total_w: f64 = grid.weights().iter().sum();
    let mut entries = Vec::with_capacity(2 * grid.len());
    for (n, w) in grid.iter() {
        let b = rot_b.coherent_at(n);
        let w = w / total_w;
        if p_aligned > 0.0 {
            entries.push(EnsembleEntry { weight: w * p_aligned, a: rot_a.coherent_at(n), b: b.clone() });
        }
        if p_anti > 0.0 {
            entries.push(EnsembleEntry { weight: w * p_anti, a: rot_a.coherent_at(n.antipode()), b });
        }
    }
    SeparableEnsemble::new(entries)
}

fn ensure_reproduces(ens: &SeparableEnsemble, target: &DensityMatrix, degree: usize) -> Result<()> {
    let residual = linalg::max_abs_diff(&ens.mixture_matrix(), target.matrix());
    if residual > DEFAULT_RECONSTRUCTION_TOL {
        return Err(Error::EnsembleMismatch { residual, degree });
    }
    Ok(())
}

/// Uniform antipodal-pair ensemble for `I/2 (x) I/(2S+1)`.
pub fn maximally_mixed_ensemble(s: SpinValue, grid: &SphereGrid) -> Result<SeparableEnsemble> {
    aligned_ensemble(s, grid, 0.0)
}

/// Separable ensemble for `isotropic(S, alpha)` with `|alpha| <= S/(S+1)`.
///
/// For `alpha >= 0` this mixes the constructive ensemble with the maximally
/// mixed one at weight `alpha (S+1)/S`. For `alpha < 0` the `|alpha|`
/// ensemble is mapped term by term: the spin-S factor is complex conjugated
/// (transpose in the `sz` basis) and the qubit is rotated by `pi` about `y`.
/// Both maps send product states to product states and together flip the
/// sign of `sigma . S`.
pub fn ensemble_for_alpha(s: SpinValue, alpha: f64, grid: &SphereGrid) -> Result<SeparableEnsemble> {
    if s.twice() == 0 {
        return Err(Error::ZeroSpinHasNoDirection);
    }
    let bound = s.alpha_max();
    if !(alpha.abs() <= bound + 1e-12) {
        return Err(Error::OutsideSimulableRange { alpha, bound, spin: s.value() });
    }
    let lambda = (alpha.abs() / bound).min(1.0);
    let positive = aligned_ensemble(s, grid, lambda)?;
    let ens = if alpha >= 0.0 {
        positive
    } else {
        let flip = rotation_matrix(SpinValue::HALF, 0.0, PI, 0.0);
        positive.map_local(|a| StateVector::from_unit(&flip * a.amplitudes()), |b| b.conj())
    };
    let target = states::isotropic(s, alpha.clamp(-bound, bound))?;
    ensure_reproduces(&ens, &target, grid.degree())?;
    Ok(ens)
}

/// Residuals of an ensemble against a target state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleVerification {
    /// Largest elementwise difference between the mixture and the target.
    pub reconstruction_residual: f64,
    /// Largest violation of `Tr{(O1 (x) O2) rho} = sum_i p_i <O1>_i <O2>_i`
    /// over `O1, O2` in `{I, Sx, Sy, Sz}`.
    pub factorization_residual: f64,
    pub passed: bool,
}

pub fn check_ensemble(ens: &SeparableEnsemble, target: &DensityMatrix, tol: f64) -> EnsembleVerification {
    if ens.d_a() != target.d_a() || ens.d_b() != target.d_b() {
        return EnsembleVerification {
            reconstruction_residual: f64::INFINITY,
            factorization_residual: f64::INFINITY,
            passed: false,
        };
    }
    let reconstruction_residual = linalg::max_abs_diff(&ens.mixture_matrix(), target.matrix());
    let local_ops = |d: usize| {
        let ops = make_spin_operators(SpinValue::from_dim(d));
        [linalg::identity(d), ops.sx, ops.sy, ops.sz]
    };
    let ops_a = local_ops(ens.d_a());
    let ops_b = local_ops(ens.d_b());
    let mut factorization_residual = 0.0f64;
    for oa in &ops_a {
        for ob in &ops_b {
            let quantum = target.expectation(&oa.kronecker(ob));
            let classical: Complex64 =
                ens.entries().iter().map(|e| e.a.expectation(oa) * e.b.expectation(ob) * e.weight).sum();
            factorization_residual = factorization_residual.max((quantum - classical).norm());
        }
    }
    EnsembleVerification {
        reconstruction_residual,
        factorization_residual,
        passed: reconstruction_residual <= tol && factorization_residual <= tol,
    }
}

/// `true` iff the ensemble rebuilds `target` elementwise within `tol` and
/// reproduces its spin correlations as weighted products of local averages.
pub fn verify_ensemble(ens: &SeparableEnsemble, target: &DensityMatrix, tol: f64) -> bool {
    check_ensemble(ens, target, tol).passed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, real};
    use crate::sphere::make_sphere_grid;
    use crate::states::{isotropic, pure_entangled, werner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_density(rng: &mut impl Rng, d_a: usize, d_b: usize) -> DensityMatrix {
        let n = d_a * d_b;
        let g = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let m = &g * g.adjoint();
        let tr = linalg::trace(&m).re;
        DensityMatrix::new(d_a, d_b, m * real(1.0 / tr)).unwrap()
    }

    fn random_state(rng: &mut impl Rng, d: usize) -> StateVector {
        StateVector::normalized(CVector::from_fn(d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .unwrap()
    }

    fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
        let g = CMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = (&g + g.adjoint()) * real(0.5);
        let (vals, vecs) = linalg::eigh(&h);
        let phases =
            CMatrix::from_diagonal(&CVector::from_iterator(d, vals.iter().map(|&v| Complex64::from_polar(1.0, v))));
        &vecs * phases * vecs.adjoint()
    }

    #[test]
    fn product_state_stays_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_density(&mut rng, 2, 1);
        let b = random_density(&mut rng, 3, 1);
        let rho = DensityMatrix::new(2, 3, a.matrix().kronecker(b.matrix())).unwrap();
        let pt = partial_transpose(&rho, Subsystem::B);
        assert!(max_abs_diff(&pt, &a.matrix().kronecker(&b.matrix().transpose())) < 1e-15);
        assert!(linalg::min_eigenvalue(&pt) > -1e-12);
    }

    #[test]
    fn werner_partial_transpose_spectrum() {
        assert!((linalg::min_eigenvalue(&partial_transpose(&werner(-1.0).unwrap(), Subsystem::B)) + 0.5).abs() < 1e-12);
        for k in 0..=40 {
            let alpha = -1.0 + k as f64 / 40.0;
            let rep = ppt_check(&werner(alpha).unwrap(), DEFAULT_NEGATIVITY_TOL);
            assert!((rep.min_eigenvalue - (1.0 + 3.0 * alpha) / 4.0).abs() < 1e-12);
            assert_eq!(rep.entangled, alpha < -1.0 / 3.0 - 1e-9, "alpha={alpha}");
        }
    }

    #[test]
    fn isotropic_ppt_examples() {
        assert!(ppt_check(&isotropic(SpinValue::ONE, -0.6).unwrap(), DEFAULT_NEGATIVITY_TOL).entangled);
        assert!(!ppt_check(&isotropic(SpinValue::ONE, -0.4).unwrap(), DEFAULT_NEGATIVITY_TOL).entangled);
        let rep = ppt_check(&pure_entangled(PI / 2.0).unwrap(), DEFAULT_NEGATIVITY_TOL);
        assert!((rep.min_eigenvalue + 0.5).abs() < 1e-12);
        // the witness vector is an eigenvector of the partial transpose
        let pt = partial_transpose(&pure_entangled(PI / 2.0).unwrap(), Subsystem::B);
        let resid = (&pt * &rep.witness_vector - &rep.witness_vector * real(rep.min_eigenvalue)).norm();
        assert!(resid < 1e-12);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (da, db) in [(2, 2), (2, 3), (3, 4)] {
            let rho = random_density(&mut rng, da, db);
            for sub in [Subsystem::A, Subsystem::B] {
                let pt = partial_transpose(&rho, sub);
                let back = partial_transpose_matrix(&pt, da, db, sub);
                assert!(max_abs_diff(&back, rho.matrix()) < 1e-12);
                assert!(linalg::hermiticity_defect(&pt) < 1e-12);
                assert!((linalg::trace(&pt).re - 1.0).abs() < 1e-12);
            }
            // PT_A is the full transpose of PT_B
            let pa = partial_transpose(&rho, Subsystem::A);
            let pb = partial_transpose(&rho, Subsystem::B);
            assert!(max_abs_diff(&pa, &pb.transpose()) < 1e-15);
        }
    }

    #[test]
    fn separable_mixtures_are_ppt() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let n = rng.gen_range(1..6);
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let entries = raw
                .iter()
                .map(|w| EnsembleEntry {
                    weight: w / total,
                    a: random_state(&mut rng, 2),
                    b: random_state(&mut rng, 4),
                })
                .collect();
            let ens = SeparableEnsemble::new(entries).unwrap();
            let rep = ppt_check(&ens.mixture().unwrap(), DEFAULT_NEGATIVITY_TOL);
            assert!(rep.min_eigenvalue >= -1e-10);
        }
    }

    #[test]
    fn local_unitaries_preserve_ppt_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for alpha in [-0.9, -0.5, -0.2] {
            let rho = isotropic(SpinValue::ONE, alpha).unwrap();
            let before = ppt_check(&rho, DEFAULT_NEGATIVITY_TOL).min_eigenvalue;
            let moved = rho.local_transform(&random_unitary(&mut rng, 2), &random_unitary(&mut rng, 3));
            let after = ppt_check(&moved, DEFAULT_NEGATIVITY_TOL).min_eigenvalue;
            assert!((before - after).abs() < 1e-10);
        }
    }

    fn closed_form_block(s: SpinValue, theta: f64) -> Matrix2<f64> {
        let sv = s.value();
        let pref = 1.0 / (s.dim() * s.dim()) as f64;
        Matrix2::new(0.0, theta.sin() / sv, theta.sin() / sv, (2.0 * sv - 1.0) / (sv * sv)) * pref
    }

    #[test]
    fn projected_block_closed_form() {
        for t in [2u32, 3, 4, 10, 20] {
            let s = SpinValue::from_twice(t);
            for k in 0..20 {
                let theta = PI * k as f64 / 19.0;
                let block = projected_pt_block(s, theta).unwrap();
                assert!((block - closed_form_block(s, theta)).abs().max() < 1e-10, "2S={t} theta={theta}");
            }
        }
    }

    #[test]
    fn projected_block_matches_full_partial_transpose() {
        for t in [1u32, 2, 3, 6] {
            let s = SpinValue::from_twice(t);
            for theta in [0.2, 1.3, 2.8] {
                let full = states::equivalent_mixed_operator(s, theta).unwrap();
                let pt = partial_transpose_matrix(&full, s.dim(), s.dim(), Subsystem::B);
                let idx = projection_indices(s);
                let block = projected_pt_block(s, theta).unwrap();
                for r in 0..2 {
                    for c in 0..2 {
                        assert!((pt[(idx[r], idx[c])] - real(block[(r, c)])).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn projected_block_spin_one_eigenvalues() {
        let block = projected_pt_block(SpinValue::ONE, PI / 2.0).unwrap();
        let pref = 1.0 / 9.0;
        assert!((block - Matrix2::new(0.0, 1.0, 1.0, 1.0) * pref).abs().max() < 1e-15);
        let lmin = min_eigenvalue_2x2(&block);
        assert!((lmin - pref * (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        // 2x2 closed form agrees with a general eigensolve
        let sym = nalgebra::SymmetricEigen::new(block);
        assert!((sym.eigenvalues.min() - lmin).abs() < 1e-15);
    }

    #[test]
    fn projected_block_flat_at_poles() {
        for t in [2u32, 5, 9] {
            let s = SpinValue::from_twice(t);
            let block = projected_pt_block(s, 0.0).unwrap();
            assert_eq!(block[(0, 1)], 0.0);
            assert!(min_eigenvalue_2x2(&block) >= 0.0);
        }
    }

    #[test]
    fn projected_block_shrinks_with_spin() {
        let l1 = min_eigenvalue_2x2(&projected_pt_block(SpinValue::ONE, PI / 2.0).unwrap());
        let l10 = min_eigenvalue_2x2(&projected_pt_block(SpinValue::from_twice(20), PI / 2.0).unwrap());
        assert!(l1 < 0.0 && l10 < 0.0 && l10.abs() < l1.abs());
    }

    #[test]
    fn projection_bounds_full_spectrum() {
        for t in [1u32, 2, 3, 4] {
            let s = SpinValue::from_twice(t);
            for theta in [0.3, PI / 2.0, 2.4] {
                let rho = states::equivalent_mixed(s, theta).unwrap();
                let full = ppt_check(&rho, DEFAULT_NEGATIVITY_TOL).min_eigenvalue;
                let block = min_eigenvalue_2x2(&projected_pt_block(s, theta).unwrap());
                assert!(full <= block + 1e-10);
                assert!(full < 0.0);
            }
        }
    }

    #[test]
    fn rank_two_blocks() {
        let s = SpinValue::ONE;
        let a = projected_pt_block_rank_two(s, 1.0, 0.7, 0.1).unwrap();
        assert!((a - projected_pt_block(s, 0.7).unwrap()).abs().max() < 1e-15);
        let b = projected_pt_block_rank_two(s, 0.5, PI / 3.0, PI / 6.0).unwrap();
        assert!(min_eigenvalue_2x2(&b) < 0.0);
        let c = projected_pt_block_rank_two(s, 0.4, 0.0, 0.0).unwrap();
        assert!(min_eigenvalue_2x2(&c) >= 0.0);
    }

    #[test]
    fn constructive_endpoint() {
        for t in [1u32, 2, 5] {
            let s = SpinValue::from_twice(t);
            let grid = make_sphere_grid(2 * t as usize);
            let ens = constructive_isotropic_ensemble(s, &grid).unwrap();
            let target = isotropic(s, s.alpha_max()).unwrap();
            assert!(max_abs_diff(&ens.mixture_matrix(), target.matrix()) < 1e-10);
            assert!(verify_ensemble(&ens, &target, 1e-10));
        }
        let grid = make_sphere_grid(2);
        let ens = constructive_isotropic_ensemble(SpinValue::HALF, &grid).unwrap();
        assert!(max_abs_diff(&ens.mixture_matrix(), werner(1.0 / 3.0).unwrap().matrix()) < 1e-10);
    }

    #[test]
    fn constructive_rejects_coarse_grid() {
        let s = SpinValue::from_twice(6);
        let err = constructive_isotropic_ensemble(s, &make_sphere_grid(3)).unwrap_err();
        assert!(matches!(err, Error::EnsembleMismatch { degree: 3, .. }), "{err:?}");
    }

    #[test]
    fn ensembles_across_alpha() {
        let s = SpinValue::ONE;
        let grid = make_sphere_grid(4);
        let center = ensemble_for_alpha(s, 0.0, &grid).unwrap();
        assert!(max_abs_diff(&center.mixture_matrix(), &(linalg::identity(6) * real(1.0 / 6.0))) < 1e-10);
        let neg = ensemble_for_alpha(s, -0.5, &grid).unwrap();
        assert!(verify_ensemble(&neg, &isotropic(s, -0.5).unwrap(), 1e-10));
        for alpha in [-0.37, -0.1, 0.2, 0.5] {
            let ens = ensemble_for_alpha(s, alpha, &grid).unwrap();
            assert!(verify_ensemble(&ens, &isotropic(s, alpha).unwrap(), 1e-10), "alpha={alpha}");
        }
        assert!(matches!(ensemble_for_alpha(s, -0.6, &grid), Err(Error::OutsideSimulableRange { .. })));
    }

    #[test]
    fn maximally_mixed_from_antipodal_pairs() {
        let s = SpinValue::from_twice(3);
        let ens = maximally_mixed_ensemble(s, &make_sphere_grid(6)).unwrap();
        assert!(max_abs_diff(&ens.mixture_matrix(), &(linalg::identity(8) * real(0.125))) < 1e-12);
    }

    #[test]
    fn single_entry_ensemble() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_state(&mut rng, 2);
        let b = random_state(&mut rng, 3);
        let target = DensityMatrix::product_pure(a.amplitudes(), b.amplitudes()).unwrap();
        let ens = SeparableEnsemble::new(vec![EnsembleEntry { weight: 1.0, a, b }]).unwrap();
        assert!(verify_ensemble(&ens, &target, 1e-10));
    }

    #[test]
    fn perturbed_weights_fail_verification() {
        let s = SpinValue::ONE;
        let grid = make_sphere_grid(4);
        let ens = constructive_isotropic_ensemble(s, &grid).unwrap();
        let mut entries = ens.entries().to_vec();
        entries[0].weight *= 1.01;
        let total: f64 = entries.iter().map(|e| e.weight).sum();
        entries.iter_mut().for_each(|e| e.weight /= total);
        let perturbed = SeparableEnsemble::new(entries).unwrap();
        assert!(!verify_ensemble(&perturbed, &isotropic(s, 0.5).unwrap(), 1e-10));
    }

    #[test]
    fn ensemble_validation() {
        let up = StateVector::basis(2, 0);
        assert!(SeparableEnsemble::new(vec![]).is_err());
        assert!(SeparableEnsemble::new(vec![EnsembleEntry { weight: 0.5, a: up.clone(), b: up.clone() }]).is_err());
        assert!(SeparableEnsemble::new(vec![
            EnsembleEntry { weight: 0.5, a: up.clone(), b: up.clone() },
            EnsembleEntry { weight: 0.5, a: up.clone(), b: StateVector::basis(3, 0) },
        ])
        .is_err());
        assert!(SeparableEnsemble::new(vec![EnsembleEntry { weight: -1.0, a: up.clone(), b: up }]).is_err());
    }

    #[test]
    fn ensemble_json_round_trip() {
        let ens = constructive_isotropic_ensemble(SpinValue::HALF, &make_sphere_grid(2)).unwrap();
        let json = ens.to_json().unwrap();
        assert!(json.starts_with("{\"entries\":[{\"weight\":"));
        let back = SeparableEnsemble::from_json(&json).unwrap();
        assert_eq!(back.len(), ens.len());
        assert!(max_abs_diff(&back.mixture_matrix(), &ens.mixture_matrix()) < 1e-15);
    }
}
