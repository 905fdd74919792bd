//! Pseudo-spectral Fourier-Galerkin simulation of incompressible, chemically
//! reacting generalized Newtonian fluids on the periodic torus `[0,1]^d`.
//!
//! The velocity obeys a power-law momentum equation whose exponent `p(c)`
//! depends on a transported concentration `c`:
//!
//! ```text
//! dv/dt + div(v (x) v) - div S(c, Dv) = -grad pi + f,   div v = 0,
//! dc/dt + div(c v) - lap c = -div g,
//! S(c, D) = 2 nu0 (1 + |D|^2)^((p(c)-2)/2) D.
//! ```
//!
//! Modules:
//! - [`spectral`]: grid, transforms, derivatives, Leray projection, dealiasing.
//! - [`constitutive`]: exponent profiles, stress, Jacobians, structural checks.
//! - [`solver`]: IMEX time stepping with Picard iteration on the stress.
//! - [`diagnostics`]: energy budgets and the monitored a priori functionals.
//! - [`scenarios`]: manufactured solutions, convergence studies, twin runs, demo.
//! - [`io`]: config files, diagnostics CSV, binary snapshots, run manifests.
//!
//! The `examples/` directory has one runnable program per capability.

// `!(x > a)` is used on purpose so that NaN parameters are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constitutive;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod scenarios;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
