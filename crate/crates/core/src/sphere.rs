//! Product quadrature on the unit sphere and orthonormal spherical harmonics.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::Direction;

/// Largest spherical-harmonic degree evaluated by [`spherical_harmonics`].
pub const MAX_HARMONIC_DEGREE: usize = 80;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending in `x`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root
        let mut x = ((i as f64 + 0.75) / (nf + 0.5) * PI).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss-Legendre in `cos(theta)` times the trapezoid rule in `phi`.
///
/// Integrates every spherical polynomial of degree `<= degree` exactly (up to
/// round-off). Weights sum to `4 pi`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    nodes: Vec<Direction>,
    weights: Vec<f64>,
    degree: usize,
}

impl SphereGrid {
    pub fn nodes(&self) -> &[Direction] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Direction, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `sum_i w_i f(node_i)`
    pub fn integrate<F: FnMut(Direction) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(n, w)| w * f(n)).sum()
    }
}

pub fn make_sphere_grid(degree: usize) -> SphereGrid {
    let n_theta = (degree + 1).div_ceil(2);
    let n_phi = degree + 1;
    let (xs, ws) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (&x, &w) in xs.iter().zip(&ws) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for j in 0..n_phi {
            nodes.push(Direction::new(theta, j as f64 * dphi));
            weights.push(w * dphi);
        }
    }
    SphereGrid { nodes, weights, degree }
}

/// Index of `Y_{k q}` in the flat layout used by [`spherical_harmonics`].
#[inline]
pub fn harmonic_index(k: usize, q: i64) -> usize {
    k * k + (q + k as i64) as usize
}

/// Number of harmonics with degree `<= k_max`.
#[inline]
pub fn harmonic_count(k_max: usize) -> usize {
    (k_max + 1) * (k_max + 1)
}

/// Orthonormal complex harmonics `Y_{kq}(theta, phi)` for all `k <= k_max`,
/// with the Condon-Shortley phase, laid out by [`harmonic_index`].
///
/// Fully normalized associated Legendre functions come from the standard
/// three-term recurrence in degree at fixed order.
pub fn spherical_harmonics(k_max: usize, n: Direction) -> Result<Vec<Complex64>> {
    if k_max > MAX_HARMONIC_DEGREE {
        return Err(Error::DegreeTooHigh(k_max));
    }
    let x = n.theta.cos();
    let sx = n.theta.sin().abs();
    let mut out = vec![Complex64::new(0.0, 0.0); harmonic_count(k_max)];
    let mut p_mm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=k_max {
        if m > 0 {
            let mf = m as f64;
            p_mm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sx;
        }
        let phase = Complex64::from_polar(1.0, m as f64 * n.phi);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut store = |l: usize, p: f64| {
            let y = phase * p;
            out[harmonic_index(l, m as i64)] = y;
            if m > 0 {
                out[harmonic_index(l, -(m as i64))] = y.conj() * sign;
            }
        };
        store(m, p_mm);
        if m == k_max {
            break;
        }
        let mf = m as f64;
        let mut p_prev = p_mm;
        let mut p_cur = x * (2.0 * mf + 3.0).sqrt() * p_mm;
        store(m + 1, p_cur);
        for l in (m + 2)..=k_max {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            let p_next = a * (x * p_cur - b * p_prev);
            p_prev = p_cur;
            p_cur = p_next;
            store(l, p_cur);
        }
    }
    Ok(out)
}
