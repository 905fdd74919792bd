use std::fs;

use proptest::prelude::*;

use crfs::diagnostics::{DiagnosticsRecord, COLUMNS};
use crfs::io::{parse_config_str, read_diagnostics, read_snapshot, write_diagnostics, write_snapshot, Snapshot};
use crfs::scenarios::{synovial_initial, SynovialParams};
use crfs::solver::State;
use crfs::spectral::{random_solenoidal, Grid, PhysicalField};
use crfs::Error;

const MINIMAL: &str = "\
# seven required keys
[solver]
d = 2
n = 32
dt = 1e-3
t_end = 0.1

[constitutive]
nu0 = 0.01
p_minus = 2.0
p_plus = 2.9
";

fn record(vals: [f64; 20]) -> DiagnosticsRecord {
    DiagnosticsRecord::from_values(vals)
}

#[test]
fn zero_record_gives_two_line_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diagnostics.csv");
    write_diagnostics(&[record([0.0; 20])], &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], COLUMNS.join(","));
    assert_eq!(lines[1].split(',').count(), 20);
}

#[test]
fn empty_series_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(write_diagnostics(&[], &dir.path().join("d.csv")).is_err());
}

#[test]
fn foreign_header_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diagnostics.csv");
    let header = COLUMNS.join(",").replace("potential", "free_energy");
    fs::write(&path, format!("{header}\n{}\n", vec!["0"; 20].join(","))).unwrap();
    assert!(matches!(read_diagnostics(&path), Err(Error::Schema { expected: 1, .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagnostics_round_trip_bit_exactly(
        vals in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 20..=20),
        iters in 0u32..1000,
    ) {
        let mut arr = [0.0; 20];
        arr.copy_from_slice(&vals);
        arr[18] = iters as f64;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("diagnostics.csv");
        let records = vec![record(arr), record([1.0; 20])];
        write_diagnostics(&records, &path).unwrap();
        let back = read_diagnostics(&path).unwrap();
        prop_assert_eq!(back.len(), 2);
        for (a, b) in back[0].values().iter().zip(arr) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

fn random_state(d: usize, n: usize, seed: u64) -> State {
    let g = Grid::new(d, n).unwrap();
    let v = random_solenoidal(&g, seed);
    let c = PhysicalField::scalar_from_fn(&g, |x| 0.3 + (x[0] * 7.0 + x[1] * 3.0 + x[2]).sin());
    State::new(0.123456789, v, c.to_spectral().unwrap()).unwrap()
}

#[test]
fn snapshot_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (d, n, seed) in [(2, 16, 1), (3, 8, 2)] {
        let state = random_state(d, n, seed);
        let path = dir.path().join(format!("s{d}.bin"));
        write_snapshot(&state, &path).unwrap();
        let back = read_snapshot(&path).unwrap();
        let orig = Snapshot::of(&state);
        assert_eq!(back.t.to_bits(), orig.t.to_bits());
        for (a, b) in back.v.components().iter().chain(back.c.components()).zip(orig.v.components().iter().chain(orig.c.components())) {
            assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        // the file itself is reproduced
        assert_eq!(back.to_bytes(), fs::read(&path).unwrap());
    }
}

#[test]
fn snapshot_header_layout() {
    let g = Grid::new(2, 16).unwrap();
    let state = synovial_initial(&g, &SynovialParams::default()).unwrap();
    let bytes = Snapshot::of(&state).to_bytes();
    assert_eq!(&bytes[..4], b"CRFS");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
    assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 16);
    assert_eq!(bytes.len(), 24 + 8 * 256 * 3);
    // first velocity sample sits right after the header, x-fastest
    let v = state.v.to_physical();
    assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), v.component(0)[0]);
    assert_eq!(f64::from_le_bytes(bytes[32..40].try_into().unwrap()), v.component(0)[1]);
}

#[test]
fn truncated_snapshot_is_a_size_mismatch() {
    let bytes = Snapshot::of(&random_state(2, 8, 3)).to_bytes();
    for cut in [bytes.len() - 1, bytes.len() - 8, 20] {
        match Snapshot::from_bytes(&bytes[..cut]) {
            Err(Error::Snapshot(msg)) => assert!(msg.contains("size mismatch"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn wrong_magic_and_version_are_rejected() {
    let mut bytes = Snapshot::of(&random_state(2, 8, 4)).to_bytes();
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(Snapshot::from_bytes(&bad), Err(Error::Snapshot(m)) if m.contains("magic")));
    bytes[4] = 9;
    assert!(matches!(Snapshot::from_bytes(&bytes), Err(Error::Snapshot(m)) if m.contains("version")));
}

#[test]
fn minimal_config_uses_documented_defaults() {
    let cfg = parse_config_str(MINIMAL).unwrap();
    assert_eq!((cfg.solver.d, cfg.solver.n), (2, 32));
    assert_eq!(cfg.solver.picard_tol, 1e-10);
    assert_eq!(cfg.solver.picard_max, 50);
    assert_eq!(cfg.solver.q_monitor, 6.0);
}

#[test]
fn p_minus_of_one_is_rejected_with_its_line() {
    let text = MINIMAL.replace("p_minus = 2.0", "p_minus = 1.0");
    match parse_config_str(&text) {
        Err(Error::Config { line, msg }) => {
            assert_eq!(line, 10);
            assert!(msg.contains("p_minus"), "{msg}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn q_monitor_must_exceed_twice_the_dimension() {
    let text = MINIMAL.replace("t_end = 0.1", "t_end = 0.1\nq_monitor = 4");
    match parse_config_str(&text) {
        Err(Error::Config { line, msg }) => {
            assert_eq!(line, 7);
            assert!(msg.contains("q_monitor"), "{msg}");
        }
        other => panic!("{other:?}"),
    }
    let ok = MINIMAL.replace("t_end = 0.1", "t_end = 0.1\nq_monitor = 4.5");
    assert_eq!(parse_config_str(&ok).unwrap().solver.q_monitor, 4.5);
}

#[test]
fn unknown_and_duplicate_keys_are_errors() {
    let unknown = MINIMAL.replace("n = 32", "n = 32\ntheta = 1");
    assert!(matches!(parse_config_str(&unknown), Err(Error::Config { line: 5, .. })));
    let dup = MINIMAL.replace("n = 32", "n = 32\nn = 64");
    assert!(matches!(parse_config_str(&dup), Err(Error::Config { line: 5, .. })));
    let section = format!("{MINIMAL}[plots]\n");
    assert!(matches!(parse_config_str(&section), Err(Error::Config { line: 12, .. })));
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        crfs::io::parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
