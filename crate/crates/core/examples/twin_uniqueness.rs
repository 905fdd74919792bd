//! Twin runs from initial data `eps` apart. The distance
//! `y = |v1 - v2|^2 + |grad(c1 - c2)|^2` must stay below the Gronwall
//! envelope built from the measured coefficient `phi`.
//!
//!     cargo run --release --example twin_uniqueness

use crfs::scenarios::TwinDemo;

fn main() -> crfs::Result<()> {
    let demo = TwinDemo::nonlinear()?;
    for eps in [1e-6, 1e-4, 0.0] {
        let r = demo.run(eps)?;
        let g = &r.gronwall;
        println!(
            "eps = {eps:e}: envelope {} with C = {:.3e}, y(T) = {:.3e}, max y/envelope = {:.3}",
            if g.passed { "holds" } else { "violated" },
            g.constant,
            r.y.last().copied().unwrap_or(0.0),
            r.envelope_ratio().iter().copied().fold(0.0, f64::max)
        );
    }

    // without convection the difference evolves linearly: y scales like eps^2
    let linear = TwinDemo::linear()?;
    let (a, b) = (linear.run(1e-6)?, linear.run(2e-6)?);
    println!("linear twins: y(2 eps) / y(eps) at T = {:.6}", b.y.last().unwrap() / a.y.last().unwrap());
    Ok(())
}
