//! File formats: a diagnostics CSV and a binary snapshot are written,
//! read back and compared bit for bit.
//!
//!     cargo run --release --example snapshot_io

use crfs::io::{read_diagnostics, read_snapshot, write_diagnostics, write_snapshot, Snapshot};
use crfs::scenarios::{synovial_config, synovial_forcing, synovial_initial, SynovialParams};
use crfs::solver::run;

fn main() -> crfs::Result<()> {
    let mut cfg = synovial_config();
    cfg.n = 32;
    cfg.t_end = 0.05;
    cfg.cadence = 10;
    let grid = cfg.grid()?;
    let params = SynovialParams::default();
    let out = run(&cfg, synovial_initial(&grid, &params)?, &synovial_forcing(&grid, &params)?)?;

    let dir = std::env::temp_dir().join("crfs-snapshot-io");
    std::fs::create_dir_all(&dir).map_err(|e| crfs::Error::io(&dir, e))?;
    let csv = dir.join("diagnostics.csv");
    write_diagnostics(&out.records, &csv)?;
    let back = read_diagnostics(&csv)?;
    let same = back.iter().zip(&out.records).all(|(a, b)| a.values().map(f64::to_bits) == b.values().map(f64::to_bits));
    println!("{}: {} records, identical after reading back: {same}", csv.display(), back.len());

    let bin = dir.join("final.bin");
    write_snapshot(&out.final_state, &bin)?;
    let snap = read_snapshot(&bin)?;
    let same = snap.to_bytes() == Snapshot::of(&out.final_state).to_bytes();
    println!("{}: t = {}, identical after reading back: {same}", bin.display(), snap.t);
    let restored = snap.to_state()?;
    println!("restored state: mean c = {:.12}, divergence {:.1e}", restored.concentration_mean(), restored.divergence_defect());
    Ok(())
}
