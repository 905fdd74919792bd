//! With the fluid at rest the concentration obeys the heat equation. The
//! implicit step damps mode `k` by `1 / (1 + dt 4 pi^2 |k|^2)` per step,
//! which converges to `exp(-4 pi^2 |k|^2 t)` at first order in `dt`.
//!
//!     cargo run --release --example heat_decay

use std::f64::consts::PI;

use crfs::constitutive::PowerLawIndex;
use crfs::solver::{run, NoForcing, SolverConfig, State};
use crfs::spectral::{PhysicalField, Rank};

fn main() -> crfs::Result<()> {
    let t_end = 0.1;
    let lambda = 4.0 * PI * PI * 2.0;
    println!("{:>10} {:>14} {:>14}", "dt", "amplitude", "error");
    for dt in [1e-3, 5e-4, 2.5e-4, 1.25e-4] {
        let cfg = SolverConfig::new(2, 16, dt, t_end, 1.0, PowerLawIndex::constant(2.0)?);
        let grid = cfg.grid()?;
        let c = PhysicalField::scalar_from_fn(&grid, |x| 1.0 + (2.0 * PI * (x[0] + x[1])).cos());
        let initial = State::from_physical(0.0, &PhysicalField::zeros(&grid, Rank::Vector), &c)?;
        let amp0 = initial.c.axpy(-1.0, &State::rest(&grid, 1.0).c)?.l2_norm();
        let out = run(&cfg, initial, &NoForcing)?;
        let amp = out.final_state.c.axpy(-1.0, &State::rest(&grid, 1.0).c)?.l2_norm() / amp0;
        println!("{dt:>10.3e} {amp:>14.8} {:>14.4e}", (amp - (-lambda * t_end).exp()).abs());
    }
    Ok(())
}
