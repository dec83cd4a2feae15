//! Husimi Q functions on (products of) spheres, multipole tensors and the
//! equivalence relation between states of different dimension.
//!
//! For a bipartite state on `C^{d_a} (x) C^{d_b}` the Q function is
//!
//! ```text
//! F(m, n) = d_a d_b / (4 pi)^2 * <m (x) n| rho |m (x) n>
//! ```
//!
//! with spin coherent states `|m>`, `|n>` of spins `(d_a - 1)/2` and
//! `(d_b - 1)/2`. The prefactor makes `F` integrate to one over both spheres.
//! A single system is the case `d_b = 1` (a spin-0 partner), so `F` is then
//! uniform on the second sphere.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMatrix, CVector};
use crate::sphere::{harmonic_count, harmonic_index, make_sphere_grid, spherical_harmonics, SphereGrid};
use crate::spin::{make_spin_operators, Direction, SpinRotations, SpinValue};
use crate::states;
use num_complex::Complex64;

/// Hermitian, unit-trace, positive semidefinite matrix on `C^{d_a} (x) C^{d_b}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct DensityMatrix {
    d_a: usize,
    d_b: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const PSD_TOL: f64 = 1e-10;

    pub fn new(d_a: usize, d_b: usize, matrix: CMatrix) -> Result<Self> {
        let rho = Self::checked_shape(d_a, d_b, matrix)?;
        let min = linalg::min_eigenvalue(&rho.matrix);
        if min < -Self::PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(rho)
    }

    /// Single system, stored with `d_b = 1`.
    pub fn single(matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        Self::new(d, 1, matrix)
    }

    /// Validates everything except positivity, which the caller guarantees
    /// analytically (closed-form spectrum).
    pub(crate) fn with_known_spectrum(d_a: usize, d_b: usize, matrix: CMatrix) -> Result<Self> {
        Self::checked_shape(d_a, d_b, matrix)
    }

    fn checked_shape(d_a: usize, d_b: usize, matrix: CMatrix) -> Result<Self> {
        let dim = d_a * d_b;
        if matrix.nrows() != dim || matrix.ncols() != dim || dim == 0 {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        Ok(DensityMatrix { d_a, d_b, matrix })
    }

    pub fn maximally_mixed(d_a: usize, d_b: usize) -> Self {
        let dim = d_a * d_b;
        DensityMatrix { d_a, d_b, matrix: linalg::identity(dim) * real(1.0 / dim as f64) }
    }

    /// `|a><a| (x) |b><b|`
    pub fn product_pure(a: &CVector, b: &CVector) -> Result<Self> {
        let v = a.kronecker(b);
        Self::new(a.len(), b.len(), linalg::projector(&v))
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Spins of the two factors inferred from `d = 2S + 1`.
    pub fn spins(&self) -> (SpinValue, SpinValue) {
        (SpinValue::from_dim(self.d_a), SpinValue::from_dim(self.d_b))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }

    /// `Tr{rho O}`
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        linalg::trace(&(&self.matrix * op))
    }

    /// Reduced state of factor A.
    pub fn reduced_a(&self) -> CMatrix {
        let (da, db) = (self.d_a, self.d_b);
        CMatrix::from_fn(da, da, |i, k| (0..db).map(|j| self.matrix[(i * db + j, k * db + j)]).sum())
    }

    /// Reduced state of factor B.
    pub fn reduced_b(&self) -> CMatrix {
        let (da, db) = (self.d_a, self.d_b);
        CMatrix::from_fn(db, db, |j, l| (0..da).map(|i| self.matrix[(i * db + j, i * db + l)]).sum())
    }

    /// `(U (x) V) rho (U (x) V)^dagger`
    pub fn local_transform(&self, u: &CMatrix, v: &CMatrix) -> DensityMatrix {
        let w = u.kronecker(v);
        DensityMatrix { d_a: self.d_a, d_b: self.d_b, matrix: &w * &self.matrix * w.adjoint() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixEntry {
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StateRecord {
    d_a: usize,
    d_b: usize,
    entries: Vec<MatrixEntry>,
}

impl From<DensityMatrix> for StateRecord {
    fn from(rho: DensityMatrix) -> Self {
        let n = rho.dim();
        let mut entries = Vec::new();
        for row in 0..n {
            for col in 0..n {
                let z = rho.matrix[(row, col)];
                if z.re != 0.0 || z.im != 0.0 {
                    entries.push(MatrixEntry { row, col, re: z.re, im: z.im });
                }
            }
        }
        StateRecord { d_a: rho.d_a, d_b: rho.d_b, entries }
    }
}

impl TryFrom<StateRecord> for DensityMatrix {
    type Error = Error;

    fn try_from(rec: StateRecord) -> Result<Self> {
        let n = rec.d_a * rec.d_b;
        let mut m = CMatrix::zeros(n, n);
        for e in rec.entries {
            if e.row >= n || e.col >= n {
                return Err(Error::DimensionMismatch { expected: n, got: e.row.max(e.col) + 1 });
            }
            m[(e.row, e.col)] = Complex64::new(e.re, e.im);
        }
        DensityMatrix::new(rec.d_a, rec.d_b, m)
    }
}

/// Tolerance below which a Q value is read as round-off rather than a
/// non-positive input.
pub const Q_NEGATIVITY_TOL: f64 = 1e-10;

/// Default tolerance for [`states_equivalent`].
pub const DEFAULT_EQUIVALENCE_TOL: f64 = 1e-8;

/// Evaluates the Q function of one state at many direction pairs, reusing
/// the rotation data of both spins.
pub struct QFunction<'a> {
    rho: &'a DensityMatrix,
    rot_a: SpinRotations,
    rot_b: SpinRotations,
    prefactor: f64,
}

impl<'a> QFunction<'a> {
    pub fn new(rho: &'a DensityMatrix) -> Self {
        let (sa, sb) = rho.spins();
        QFunction {
            rho,
            rot_a: SpinRotations::new(sa),
            rot_b: SpinRotations::new(sb),
            prefactor: rho.dim() as f64 / (16.0 * PI * PI),
        }
    }

    pub fn value(&self, m: Direction, n: Direction) -> Result<f64> {
        let a = self.rot_a.coherent_at(m);
        let b = self.rot_b.coherent_at(n);
        let v = a.amplitudes().kronecker(b.amplitudes());
        let f = self.prefactor * linalg::expectation(self.rho.matrix(), &v).re;
        if f < -Q_NEGATIVITY_TOL {
            return Err(Error::NegativeQValue(f));
        }
        Ok(f)
    }

    /// `F(m_i, n_j)` for every pair of grid nodes, row-major in `i`.
    fn tabulate(&self, grid_a: &SphereGrid, grid_b: &SphereGrid) -> Vec<f64> {
        let (da, db) = (self.rho.d_a, self.rho.d_b);
        let rho = self.rho.matrix();
        let b_states: Vec<CVector> = grid_b.nodes().iter().map(|&n| self.rot_b.coherent_at(n).into_inner()).collect();
        let mut out = Vec::with_capacity(grid_a.len() * grid_b.len());
        for &m in grid_a.nodes() {
            let a = self.rot_a.coherent_at(m).into_inner();
            // <a| rho |a> as an operator on B
            let block = CMatrix::from_fn(db, db, |j, l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..da {
                    for k in 0..da {
                        acc += a[i].conj() * rho[(i * db + j, k * db + l)] * a[k];
                    }
                }
                acc
            });
            for b in &b_states {
                out.push(self.prefactor * linalg::expectation(&block, b).re);
            }
        }
        out
    }
}

/// `F(m, n)` of a bipartite state.
pub fn q_value(rho: &DensityMatrix, m: Direction, n: Direction) -> Result<f64> {
    QFunction::new(rho).value(m, n)
}

/// Coefficients of a Q function in products of orthonormal spherical
/// harmonics, `F(m, n) = sum c[k1 q1 k2 q2] Y_{k1 q1}(m) Y_{k2 q2}(n)`.
///
/// Ranks are capped at `2 S` per factor; coefficients beyond the cap are
/// never stored and read back as zero. With orthonormal harmonics the
/// `(0,0,0,0)` coefficient of any state is `Y_00^2 = 1/(4 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleTensor {
    k_max_a: usize,
    k_max_b: usize,
    coeffs: Vec<Complex64>,
}

/// One JSON record of a [`MultipoleTensor`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipoleRecord {
    pub k1: usize,
    pub q1: i64,
    pub k2: usize,
    pub q2: i64,
    pub re: f64,
    pub im: f64,
}

impl MultipoleTensor {
    /// Magnitude below which coefficients are omitted from serialized output.
    pub const SERIALIZE_CUTOFF: f64 = 1e-14;

    pub fn k_max_a(&self) -> usize {
        self.k_max_a
    }

    pub fn k_max_b(&self) -> usize {
        self.k_max_b
    }

    fn offset(&self, k1: usize, q1: i64, k2: usize, q2: i64) -> usize {
        harmonic_index(k1, q1) * harmonic_count(self.k_max_b) + harmonic_index(k2, q2)
    }

    /// Coefficient `c[k1 q1 k2 q2]`; zero outside the stored rank range.
    pub fn get(&self, k1: usize, q1: i64, k2: usize, q2: i64) -> Complex64 {
        if k1 > self.k_max_a || k2 > self.k_max_b || q1.unsigned_abs() as usize > k1 || q2.unsigned_abs() as usize > k2
        {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[self.offset(k1, q1, k2, q2)]
    }

    /// All stored `(k1, q1, k2, q2, value)` tuples.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, usize, i64, Complex64)> + '_ {
        let (ka, kb) = (self.k_max_a, self.k_max_b);
        (0..=ka).flat_map(move |k1| {
            (-(k1 as i64)..=k1 as i64).flat_map(move |q1| {
                (0..=kb).flat_map(move |k2| {
                    (-(k2 as i64)..=k2 as i64).map(move |q2| (k1, q1, k2, q2, self.get(k1, q1, k2, q2)))
                })
            })
        })
    }

    pub fn records(&self) -> Vec<MultipoleRecord> {
        self.iter()
            .filter(|(.., c)| c.norm() >= Self::SERIALIZE_CUTOFF)
            .map(|(k1, q1, k2, q2, c)| MultipoleRecord { k1, q1, k2, q2, re: c.re, im: c.im })
            .collect()
    }

    pub fn from_records(k_max_a: usize, k_max_b: usize, records: &[MultipoleRecord]) -> Result<Self> {
        let mut t = MultipoleTensor {
            k_max_a,
            k_max_b,
            coeffs: vec![Complex64::new(0.0, 0.0); harmonic_count(k_max_a) * harmonic_count(k_max_b)],
        };
        for r in records {
            if r.k1 > k_max_a
                || r.k2 > k_max_b
                || r.q1.unsigned_abs() as usize > r.k1
                || r.q2.unsigned_abs() as usize > r.k2
            {
                return Err(Error::InvalidParameter {
                    name: "multipole index",
                    value: r.k1.max(r.k2) as f64,
                    reason: "outside the declared rank range",
                });
            }
            let off = t.offset(r.k1, r.q1, r.k2, r.q2);
            t.coeffs[off] = Complex64::new(r.re, r.im);
        }
        Ok(t)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.records())?)
    }
}

/// Projects the Q function of `rho` onto products of spherical harmonics.
///
/// Both spheres use a grid of degree `2 * 2 max(S_a, S_b)`, which integrates
/// `F * conj(Y_k)` exactly for every `k <= 2S`.
pub fn multipole_decompose(rho: &DensityMatrix) -> MultipoleTensor {
    let (sa, sb) = rho.spins();
    let (ka, kb) = (sa.twice() as usize, sb.twice() as usize);
    let grid = make_sphere_grid(2 * ka.max(kb));
    let q = QFunction::new(rho);
    let table = q.tabulate(&grid, &grid);
    let ys_a: Vec<Vec<Complex64>> =
        grid.nodes().iter().map(|&n| spherical_harmonics(ka, n).expect("rank within harmonic cap")).collect();
    let ys_b: Vec<Vec<Complex64>> =
        grid.nodes().iter().map(|&n| spherical_harmonics(kb, n).expect("rank within harmonic cap")).collect();
    let (ca, cb) = (harmonic_count(ka), harmonic_count(kb));
    let nb = grid.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); ca * cb];
    let mut partial = vec![Complex64::new(0.0, 0.0); cb];
    for (i, &wa) in grid.weights().iter().enumerate() {
        partial.iter_mut().for_each(|p| *p = Complex64::new(0.0, 0.0));
        for (j, &wb) in grid.weights().iter().enumerate() {
            let f = wb * table[i * nb + j];
            for (p, y) in partial.iter_mut().zip(&ys_b[j]) {
                *p += y.conj() * f;
            }
        }
        for (x, ya) in ys_a[i].iter().enumerate() {
            let scale = ya.conj() * wa;
            let row = &mut coeffs[x * cb..(x + 1) * cb];
            for (c, p) in row.iter_mut().zip(&partial) {
                *c += scale * p;
            }
        }
    }
    MultipoleTensor { k_max_a: ka, k_max_b: kb, coeffs }
}

/// Outcome of comparing two states in multipole space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub max_coeff_deviation: f64,
    /// Largest coefficient magnitude at ranks beyond the smaller state's cap.
    pub excess_rank_leakage: f64,
}

/// Compares two Q functions coefficient by coefficient over the union of
/// their rank ranges.
pub fn states_equivalent(rho1: &DensityMatrix, rho2: &DensityMatrix, tol: f64) -> EquivalenceReport {
    let t1 = multipole_decompose(rho1);
    let t2 = multipole_decompose(rho2);
    compare_tensors(&t1, &t2, tol)
}

pub fn compare_tensors(t1: &MultipoleTensor, t2: &MultipoleTensor, tol: f64) -> EquivalenceReport {
    let ka = t1.k_max_a.max(t2.k_max_a);
    let kb = t1.k_max_b.max(t2.k_max_b);
    let cap_a = t1.k_max_a.min(t2.k_max_a);
    let cap_b = t1.k_max_b.min(t2.k_max_b);
    let mut deviation = 0.0f64;
    let mut leakage = 0.0f64;
    for k1 in 0..=ka {
        for q1 in -(k1 as i64)..=k1 as i64 {
            for k2 in 0..=kb {
                for q2 in -(k2 as i64)..=k2 as i64 {
                    let (c1, c2) = (t1.get(k1, q1, k2, q2), t2.get(k1, q1, k2, q2));
                    deviation = deviation.max((c1 - c2).norm());
                    if k1 > cap_a || k2 > cap_b {
                        leakage = leakage.max(c1.norm()).max(c2.norm());
                    }
                }
            }
        }
    }
    EquivalenceReport {
        equivalent: deviation <= tol && leakage <= tol,
        max_coeff_deviation: deviation,
        excess_rank_leakage: leakage,
    }
}

/// Polarization `3 * int n F(n) dOmega` of a single qubit from its Q function.
pub fn qubit_polarization_from_q(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.d_a() != 2 || rho.d_b() != 1 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.dim() });
    }
    let grid = make_sphere_grid(2);
    let rot = SpinRotations::new(SpinValue::HALF);
    let mut p = [0.0; 3];
    for (n, w) in grid.iter() {
        let f = 2.0 / (4.0 * PI) * rot.coherent_at(n).expectation(rho.matrix()).re;
        let u = n.unit_vector();
        for (pi, ui) in p.iter_mut().zip(u) {
            *pi += 3.0 * w * ui * f;
        }
    }
    Ok(p)
}

/// `3S/(S+1)`, the rescaling that makes `sigma_z (x) S_z/S` on the qubit-spin
/// isotropic state reproduce `sigma_z (x) sigma_z` on the Werner state.
pub fn equivalent_observable_scale(s: SpinValue) -> f64 {
    let t = s.twice() as f64;
    3.0 * t / (t + 2.0)
}

/// `(Tr{W(alpha) sz(x)sz}, Tr{iso(S, alpha) (3S/(S+1)) sz (x) Sz/S})`.
pub fn equivalent_observable_expectation(alpha: f64, s: SpinValue) -> Result<(f64, f64)> {
    if s.twice() == 0 {
        return Err(Error::ZeroSpinHasNoDirection);
    }
    let werner = states::werner(alpha)?;
    let iso = states::isotropic(s, alpha)?;
    let half = make_spin_operators(SpinValue::HALF);
    let sigma_z = &half.sz * real(2.0);
    let ops = make_spin_operators(s);
    let o = sigma_z.kronecker(&sigma_z);
    let o_prime = sigma_z.kronecker(ops.sz_hat()?) * real(equivalent_observable_scale(s));
    Ok((werner.expectation(&o).re, iso.expectation(&o_prime).re))
}
