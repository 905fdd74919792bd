//! Spectral checks of two inequalities the a priori estimates rest on:
//! Korn (`|grad v| <= sqrt 2 |Dv|` for solenoidal `v`) and the
//! Calderon-Zygmund bound `|grad grad v| <= |lap v|`.
//!
//!     cargo run --release --example functional_inequalities

use crfs::diagnostics::calderon_zygmund_check;
use crfs::spectral::{korn_ratio, random_solenoidal, Grid};

fn main() -> crfs::Result<()> {
    for (d, n) in [(2, 32), (3, 16)] {
        let grid = Grid::new(d, n)?;
        let (mut korn, mut cz) = (0.0f64, 0.0f64);
        for seed in 0..200 {
            let v = random_solenoidal(&grid, seed);
            korn = korn.max(korn_ratio(&v)?);
            let r = calderon_zygmund_check(&v)?;
            cz = cz.max(r.global_ratio.max(r.mode_ratio));
        }
        println!("d = {d}: max Korn ratio {korn:.12} (sqrt 2 = {:.12}), max Calderon-Zygmund ratio {cz:.12}", 2f64.sqrt());
    }
    Ok(())
}
