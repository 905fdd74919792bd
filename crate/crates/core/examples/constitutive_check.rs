//! Randomized checks of the structural bounds of the power-law stress
//! (coercivity, growth, strict monotonicity and Jacobian bounds) and of
//! the regime flags for a few exponent ranges.
//!
//!     cargo run --release --example constitutive_check

use crfs::constitutive::{check_properties, PowerLawIndex, StressModel};
use crfs::solver::compute_regime;

fn main() -> crfs::Result<()> {
    let models = [
        ("tanh 2.0 -> 2.9", StressModel::new(0.01, PowerLawIndex::tanh_profile(2.0, 2.9, 0.6, 0.15, true)?)?),
        ("affine 1.5 .. 3.0", StressModel::new(1.0, PowerLawIndex::affine_clamped(1.5, 3.0, 0.8)?)?),
        ("constant 1.8", StressModel::new(0.3, PowerLawIndex::constant(1.8)?)?),
    ];
    for (name, model) in &models {
        let r = check_properties(model, 10_000, 1)?;
        println!(
            "{name:18} K1 >= {:.3e}  K2 <= {:.3e}  K3 <= {:.3e}  K4 >= {:.3e}  violations {}",
            r.k1, r.k2, r.k3, r.k4, r.violations
        );
    }
    for (d, lo, hi) in [(2, 2.0, 2.9), (3, 2.5, 3.0), (2, 1.8, 2.5)] {
        let f = compute_regime(d, lo, hi)?;
        println!("d = {d}, p in [{lo}, {hi}]: strong {}, unique {}", f.strong_regime, f.unique_regime);
    }
    Ok(())
}
