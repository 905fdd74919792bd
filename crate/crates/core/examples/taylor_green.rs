//! Newtonian limit: with p = 2 the solver reduces to an IMEX Navier-Stokes
//! step. A Taylor-Green vortex decays at the rate `8 pi^2 nu0`; the printed
//! ratio compares the measured kinetic energy with `exp(-16 pi^2 nu0 t)`.
//!
//!     cargo run --release --example taylor_green

use std::f64::consts::PI;

use crfs::constitutive::PowerLawIndex;
use crfs::solver::{NoForcing, Simulation, SolverConfig, State};
use crfs::spectral::{PhysicalField, Rank};

fn main() -> crfs::Result<()> {
    let nu0 = 0.01;
    let cfg = SolverConfig::new(2, 64, 1e-3, 1.0, nu0, PowerLawIndex::constant(2.0)?);
    let grid = cfg.grid()?;
    let v = PhysicalField::from_fn(&grid, Rank::Vector, |x| {
        let (a, b) = (2.0 * PI * x[0], 2.0 * PI * x[1]);
        vec![a.sin() * b.cos(), -a.cos() * b.sin()]
    });
    let c = PhysicalField::scalar_from_fn(&grid, |_| 1.0);
    let initial = State::from_physical(0.0, &v, &c)?;
    let e0 = initial.kinetic_energy();

    let mut sim = Simulation::new(&cfg, initial, &NoForcing)?;
    println!("{:>6} {:>14} {:>14}", "t", "kinetic", "ratio to exact");
    for k in 1..=cfg.steps() {
        let info = sim.step()?;
        if k % 200 == 0 {
            let e = sim.state().kinetic_energy();
            let exact = e0 * (-16.0 * PI * PI * nu0 * info.t).exp();
            println!("{:>6.3} {:>14.6e} {:>14.8}", info.t, e, e / exact);
        }
    }
    Ok(())
}
