//! Classical simulation of entangled spin states.
//!
//! Two bipartite states are *equivalent* when their Husimi Q functions on the
//! product of two spheres coincide, irrespective of the Hilbert-space
//! dimensions involved. A state is *classically simulable* when some
//! finite-dimensional separable state is equivalent to it. This crate provides
//! the pieces needed to decide that question for the Werner, pure and rank-two
//! two-qubit families:
//!
//! - [`spin`]: angular-momentum operators, rotations and spin coherent states.
//! - [`sphere`]: product quadrature on the unit sphere and spherical harmonics.
//! - [`qrep`]: Q functions, multipole tensors and the equivalence relation.
//! - [`states`]: the parametric state families with their positivity ranges.
//! - [`separability`]: partial transposes, projected witnesses and explicit
//!   separable ensembles (LHV certificates).
//! - [`simulability`]: minimal simulating spin, region classification and
//!   hidden-variable counts.
//! - [`tables`]: CSV/JSON emitters for sweeps.
//!
//! ```
//! use simkit::separability::{check_ensemble, ensemble_for_alpha};
//! use simkit::simulability::s_min;
//! use simkit::sphere::make_sphere_grid;
//! use simkit::states::isotropic;
//!
//! let alpha = -std::f64::consts::FRAC_1_SQRT_2;
//! let s = s_min(alpha)?.finite().unwrap();
//! assert_eq!(s.twice(), 5);
//! let grid = make_sphere_grid(2 * s.twice() as usize);
//! let ens = ensemble_for_alpha(s, alpha, &grid)?;
//! assert!(check_ensemble(&ens, &isotropic(s, alpha)?, 1e-10).passed);
//! # Ok::<(), simkit::Error>(())
//! ```

pub mod error;
pub mod linalg;
pub mod qrep;
pub mod separability;
pub mod simulability;
pub mod sphere;
pub mod spin;
pub mod states;
pub mod tables;

pub use error::{Error, Result};
pub use qrep::{DensityMatrix, EquivalenceReport, MultipoleTensor};
pub use separability::{PptReport, SeparableEnsemble, Subsystem};
pub use simulability::{Region, SimulabilityReport};
pub use sphere::SphereGrid;
pub use spin::{SpinOperators, SpinValue, StateVector};

pub use num_complex::Complex64;
