//! Fourier representation of periodic fields on the unit torus.
//!
//! Fields are expanded as `u(x) = sum_k c_k exp(2 pi i k.x)`, so a constant
//! field has a single unit coefficient at `k = 0` and the coefficient l2 norm
//! equals the physical L2 norm. First-derivative symbols zero the Nyquist
//! frequency; even symbols (Laplacian, Leray projector) keep it.

mod field;
mod grid;
mod ops;

pub use field::{PhysicalField, Rank, SpectralField};
pub use grid::{signed_frequency, Grid};
pub use ops::{korn_ratio, outer, random_solenoidal, scale_pointwise, DealiasRule, DerivativeKind};

pub use rustfft::num_complex::Complex64;
