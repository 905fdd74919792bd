//! The command implementations behind the `crfs` binary. Each writes its
//! artifacts into the output directory and returns what the caller needs
//! to print and to choose an exit code.

use std::fs::File;
use std::path::{Path, PathBuf};

use super::config::{parse_config_str, RunConfig, ScenarioKind};
use super::csv_out::{write_convergence_table, write_diagnostics, write_json, write_property_report, write_twin_report};
use super::manifest::RunManifest;
use super::snapshot::write_snapshot;
use crate::constitutive::{check_properties, PropertyReport, StressModel};
use crate::error::{Error, Result};
use crate::scenarios::{
    convergence_study, make_manufactured, synovial_config, synovial_forcing, synovial_initial, uniqueness_experiment,
    ConvergenceTable, TwinRunReport,
};
use crate::solver::{run_observed, Forcing, MonitorSample, RunOutput, State, Termination};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_PICARD: i32 = 4;

/// Command-line settings that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub cadence: Option<usize>,
}

pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::Config { .. }
        | Error::ConfigMissing(_)
        | Error::InvalidParameter(_)
        | Error::InvalidGrid(_)
        | Error::ExponentOutOfRange { .. } => EXIT_CONFIG,
        Error::Blowup { .. } | Error::NonFinite(_) => EXIT_BLOWUP,
        Error::PicardDiverged { .. } => EXIT_PICARD,
        _ => EXIT_FAILURE,
    }
}

pub fn exit_code_for(termination: Termination) -> i32 {
    match termination {
        Termination::Completed => EXIT_OK,
        Termination::Blowup => EXIT_BLOWUP,
        Termination::PicardFailure => EXIT_PICARD,
    }
}

/// A parsed config with overrides applied, its raw bytes and output directory.
pub struct Loaded {
    pub config: RunConfig,
    pub bytes: Vec<u8>,
    pub out_dir: PathBuf,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<Loaded> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::ConfigMissing(format!("{} is not valid UTF-8", path.display())))?;
    let mut config = parse_config_str(&text)?;
    if let Some(c) = overrides.cadence {
        config.solver.cadence = c;
        config.solver.validate()?;
    }
    let out_dir = overrides.out_dir.clone().unwrap_or_else(|| config.output.out_dir.clone());
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    Ok(Loaded { config, bytes, out_dir })
}

fn write_monitors(monitors: &[MonitorSample], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    for m in monitors {
        w.serialize(m)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn initial_and_forcing(cfg: &RunConfig) -> Result<(State, Box<dyn Forcing>)> {
    let grid = cfg.solver.grid()?;
    match cfg.kind {
        ScenarioKind::Synovial => {
            Ok((synovial_initial(&grid, &cfg.synovial)?, Box::new(synovial_forcing(&grid, &cfg.synovial)?)))
        }
        ScenarioKind::Manufactured => {
            let case = make_manufactured(cfg.manufactured.case, cfg.manufactured.params)?;
            Ok((case.state_at(&grid, 0.0)?, Box::new(case.forcing(&grid)?)))
        }
    }
}

/// Result of `run`: the manifest as written plus the run itself when
/// stepping started.
pub struct RunResult {
    pub manifest: RunManifest,
    pub output: Option<RunOutput>,
    pub out_dir: PathBuf,
}

impl RunResult {
    pub fn exit_code(&self) -> i32 {
        if self.manifest.error.is_some() {
            EXIT_FAILURE
        } else {
            exit_code_for(self.manifest.termination)
        }
    }
}

/// `run <config>`: integrates the selected scenario and writes
/// `diagnostics.csv`, `monitors.csv`, snapshots and `manifest.json`.
pub fn cmd_run(path: &Path, overrides: &Overrides) -> Result<RunResult> {
    let loaded = load(path, overrides)?;
    let cfg = &loaded.config;
    let out_dir = loaded.out_dir.clone();
    let mut manifest = RunManifest::start("run", &loaded.bytes);
    manifest.regime = Some(cfg.solver.regime()?);
    let (initial, forcing) = initial_and_forcing(cfg)?;
    let every = cfg.output.snapshot_every;
    let total = cfg.solver.steps();
    let mut steps = 0;
    let mut observer = |k: usize, s: &State| {
        steps = k;
        if k == 0 || k == total || (every > 0 && k.is_multiple_of(every)) {
            write_snapshot(s, &out_dir.join(format!("snapshot_{k:08}.bin")))?;
        }
        Ok(())
    };
    let result = run_observed(&cfg.solver, initial, forcing.as_ref(), &mut observer);
    manifest.steps = steps;
    let output = match result {
        Ok(out) => {
            if out.termination != Termination::Completed {
                // the last accepted state, for post-mortem inspection
                write_snapshot(&out.final_state, &out_dir.join(format!("snapshot_{:08}.bin", out.steps.len())))?;
            }
            let written = write_diagnostics(&out.records, &out_dir.join("diagnostics.csv"))
                .and_then(|_| write_monitors(&out.monitors, &out_dir.join("monitors.csv")));
            manifest.finish(out.termination, out.message.clone());
            if let Err(e) = written {
                manifest.error = Some(e.to_string());
            }
            Some(out)
        }
        Err(e) => {
            manifest.finish(Termination::Completed, None);
            manifest.error = Some(e.to_string());
            None
        }
    };
    manifest.write(&out_dir.join("manifest.json"))?;
    Ok(RunResult { manifest, output, out_dir })
}

/// `converge <config>`: the manufactured convergence study of the
/// `[scenario]` section, written to `convergence.csv`.
pub fn cmd_converge(path: &Path, overrides: &Overrides) -> Result<ConvergenceTable> {
    let loaded = load(path, overrides)?;
    let m = &loaded.config.manufactured;
    let mut manifest = RunManifest::start("converge", &loaded.bytes);
    manifest.regime = Some(loaded.config.solver.regime()?);
    let case = make_manufactured(m.case, m.params)?;
    let table = convergence_study(&case, &m.n_ladder, &m.dt_ladder, &m.study);
    match &table {
        Ok(t) => {
            manifest.finish(Termination::Completed, None);
            write_convergence_table(t, &loaded.out_dir.join("convergence.csv"))?;
        }
        Err(e) => {
            let term = match e {
                Error::PicardDiverged { .. } => Termination::PicardFailure,
                _ => Termination::Blowup,
            };
            manifest.finish(term, Some(e.to_string()));
        }
    }
    manifest.write(&loaded.out_dir.join("manifest.json"))?;
    table
}

/// `unique <config>`: twin runs from the scenario state and its perturbation
/// by `eps`, written to `twin.csv` and `twin_summary.json`.
pub fn cmd_unique(path: &Path, overrides: &Overrides) -> Result<TwinRunReport> {
    let loaded = load(path, overrides)?;
    let cfg = &loaded.config;
    let mut manifest = RunManifest::start("unique", &loaded.bytes);
    manifest.regime = Some(cfg.solver.regime()?);
    let (initial, forcing) = initial_and_forcing(cfg)?;
    let report = uniqueness_experiment(&cfg.solver, &initial, forcing.as_ref(), cfg.eps);
    match &report {
        Ok(r) => {
            manifest.steps = cfg.solver.steps();
            manifest.finish(Termination::Completed, r.regime_warning.clone());
            write_twin_report(r, &loaded.out_dir.join("twin.csv"))?;
            let summary = serde_json::json!({
                "eps": r.eps,
                "regime": r.regime,
                "regime_warning": r.regime_warning,
                "passed": r.gronwall.passed,
                "constant": r.gronwall.constant,
                "margin": r.gronwall.margin,
                "first_violation": r.gronwall.first_violation,
            });
            write_json(&summary, &loaded.out_dir.join("twin_summary.json"))?;
        }
        Err(e) => {
            let term = match e {
                Error::PicardDiverged { .. } => Termination::PicardFailure,
                _ => Termination::Blowup,
            };
            manifest.finish(term, Some(e.to_string()));
        }
    }
    manifest.write(&loaded.out_dir.join("manifest.json"))?;
    report
}

/// `check-constitutive`: randomized structural checks of the model in
/// `config` (the synovial demo model when absent), written to
/// `property_report.csv` when `out_dir` is given.
pub fn cmd_check_constitutive(
    config: Option<&Path>,
    samples: usize,
    seed: u64,
    out_dir: Option<&Path>,
) -> Result<PropertyReport> {
    let model: StressModel = match config {
        Some(p) => load(p, &Overrides { out_dir: out_dir.map(Path::to_path_buf), cadence: None })?.config.solver.model()?,
        None => synovial_config().model()?,
    };
    let report = check_properties(&model, samples, seed)?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_property_report(&report, &dir.join("property_report.csv"))?;
    }
    Ok(report)
}
