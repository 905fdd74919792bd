//! Line-oriented `key = value` configuration files.
//!
//! ```text
//! # comment
//! [solver]
//! d = 2
//! n = 64
//! ```
//!
//! Sections are `[solver]`, `[constitutive]`, `[scenario]` and `[output]`.
//! Keys are looked up in [`KEYS`], which also holds every default; unknown
//! keys and duplicates are errors.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::constitutive::{ExponentProfile, PowerLawIndex};
use crate::error::{Error, Result};
use crate::scenarios::{CaseId, ManufacturedParams, StudySetup, SynovialParams};
use crate::solver::{default_delta_monitor, default_q_monitor, Convection, SolverConfig, ViscousSplit};
use crate::spectral::DealiasRule;

/// One documented key: section, name, default (`None` when required), help.
pub struct KeySpec {
    pub section: &'static str,
    pub key: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(section: &'static str, key: &'static str, default: Option<&'static str>, help: &'static str) -> KeySpec {
    KeySpec { section, key, default, help }
}

pub const SECTIONS: [&str; 4] = ["solver", "constitutive", "scenario", "output"];

pub const KEYS: &[KeySpec] = &[
    key("solver", "d", None, "spatial dimension, 2 or 3"),
    key("solver", "n", None, "grid points per axis, even"),
    key("solver", "dt", None, "time step"),
    key("solver", "t_end", None, "final time"),
    key("solver", "picard_tol", Some("1e-10"), "relative L2 update at which Picard stops"),
    key("solver", "picard_max", Some("50"), "Picard iteration cap; reaching it flags the step"),
    key("solver", "split", Some("adaptive"), "implicit viscosity: adaptive or a number >= nu0"),
    key("solver", "dealias", Some("two_thirds"), "two_thirds or none"),
    key("solver", "convection", Some("divergence"), "divergence, skew_symmetric or off"),
    key("solver", "q_monitor", Some("auto"), "exponent of the grad c monitor, > 2d (auto: 2d + 2)"),
    key("solver", "delta_monitor", Some("auto"), "exponent of the dc/dt monitor (auto: 4.5 in 2D, 3.25 in 3D)"),
    key("solver", "cadence", Some("1"), "steps between diagnostics records"),
    key("constitutive", "nu0", None, "viscosity scale"),
    key("constitutive", "p_minus", None, "lower exponent bound, > 1"),
    key("constitutive", "p_plus", None, "upper exponent bound, >= p_minus"),
    key("constitutive", "profile", Some("auto"), "constant, affine or tanh (auto: constant if p_minus = p_plus, else tanh)"),
    key("constitutive", "center", Some("0.5"), "tanh profile centre"),
    key("constitutive", "width", Some("0.2"), "tanh profile width"),
    key("constitutive", "decreasing", Some("true"), "tanh profile falls from p_plus to p_minus as c grows"),
    key("constitutive", "slope", Some("1.0"), "affine profile slope dp/dc"),
    key("scenario", "kind", Some("synovial"), "synovial or manufactured"),
    key("scenario", "background", Some("0.2"), "synovial: concentration away from the blob"),
    key("scenario", "blob_amplitude", Some("1.0"), "synovial: blob height"),
    key("scenario", "blob_center", Some("0.5, 0.5, 0.5"), "synovial: blob centre"),
    key("scenario", "blob_width", Some("0.12"), "synovial: blob width"),
    key("scenario", "vortex", Some("0.2"), "synovial: initial vortex amplitude"),
    key("scenario", "shear", Some("1.0"), "synovial: body force amplitude"),
    key("scenario", "flux", Some("0.05"), "synovial: flux amplitude"),
    key("scenario", "eps", Some("1e-6"), "twin runs: perturbation size"),
    key("scenario", "case", Some("decaying_mode_2d"), "manufactured: decaying_mode_2d, decaying_mode_3d or steady_shear_2d"),
    key("scenario", "amplitude", Some("0.3"), "manufactured: velocity amplitude"),
    key("scenario", "conc_amplitude", Some("0.5"), "manufactured: concentration fluctuation amplitude"),
    key("scenario", "conc_mean", Some("0.5"), "manufactured: concentration mean"),
    key("scenario", "decay_v", Some("3.0"), "manufactured: velocity decay rate"),
    key("scenario", "decay_c", Some("3.0"), "manufactured: concentration decay rate"),
    key("scenario", "rho", Some("0.3"), "manufactured: amplitude ratio of successive modes"),
    key("scenario", "modes", Some("12"), "manufactured: number of modes"),
    key("scenario", "n_ladder", Some("16, 32, 64"), "convergence: resolutions of the spatial ladder"),
    key("scenario", "dt_ladder", Some("4e-4, 2e-4, 1e-4"), "convergence: steps of the temporal ladder"),
    key("scenario", "dt_spatial", Some("1e-5"), "convergence: time step of the spatial ladder"),
    key("scenario", "n_temporal", Some("64"), "convergence: resolution of the temporal ladder"),
    key("scenario", "t_end_spatial", Some("0.01"), "convergence: final time of the spatial ladder"),
    key("scenario", "t_end_temporal", Some("0.1"), "convergence: final time of the temporal ladder"),
    key("output", "out_dir", Some("out"), "output directory"),
    key("output", "snapshot_every", Some("0"), "steps between snapshots (0: initial and final only)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Synovial,
    Manufactured,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedSetup {
    pub case: CaseId,
    pub params: ManufacturedParams,
    pub study: StudySetup,
    pub n_ladder: Vec<usize>,
    pub dt_ladder: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub out_dir: PathBuf,
    pub snapshot_every: usize,
}

/// Everything a config file selects.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub kind: ScenarioKind,
    pub synovial: SynovialParams,
    pub manufactured: ManufacturedSetup,
    pub eps: f64,
    pub output: OutputConfig,
}

struct Entry {
    value: String,
    line: usize,
}

struct Table {
    entries: HashMap<(String, String), Entry>,
}

fn spec_of(section: &str, name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.section == section && k.key == name)
}

impl Table {
    fn parse(text: &str) -> Result<Table> {
        let mut entries: HashMap<(String, String), Entry> = HashMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config { line, msg: format!("malformed section header '{content}'") })?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(Error::Config { line, msg: format!("unknown section [{name}]") });
                }
                section = Some(name.to_string());
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| Error::Config { line, msg: format!("expected 'key = value', got '{content}'") })?;
            let (k, v) = (k.trim(), v.trim());
            let sec = section.as_deref().ok_or_else(|| Error::Config { line, msg: format!("key '{k}' before any section") })?;
            if spec_of(sec, k).is_none() {
                return Err(Error::Config { line, msg: format!("unknown key '{k}' in [{sec}]") });
            }
            if v.is_empty() {
                return Err(Error::Config { line, msg: format!("key '{k}' has no value") });
            }
            let prev = entries.insert((sec.to_string(), k.to_string()), Entry { value: v.to_string(), line });
            if let Some(prev) = prev {
                return Err(Error::Config { line, msg: format!("duplicate key '{k}' (first set on line {})", prev.line) });
            }
        }
        Ok(Table { entries })
    }

    /// Raw value and line (0 for defaults).
    fn raw(&self, section: &str, name: &str) -> Result<(String, usize)> {
        if let Some(e) = self.entries.get(&(section.to_string(), name.to_string())) {
            return Ok((e.value.clone(), e.line));
        }
        let spec = spec_of(section, name).expect("key listed in KEYS");
        match spec.default {
            Some(d) => Ok((d.to_string(), 0)),
            None => Err(Error::ConfigMissing(format!("missing required key '{name}' in [{section}]"))),
        }
    }

    fn get<T: FromStr>(&self, section: &str, name: &str) -> Result<T> {
        let (v, line) = self.raw(section, name)?;
        v.parse::<T>().map_err(|_| Error::Config {
            line,
            msg: format!("cannot parse '{v}' as {} for '{name}'", std::any::type_name::<T>()),
        })
    }

    fn list<T: FromStr>(&self, section: &str, name: &str) -> Result<Vec<T>> {
        let (v, line) = self.raw(section, name)?;
        v.split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<T>().map_err(|_| Error::Config { line, msg: format!("cannot parse list entry '{s}' for '{name}'") })
            })
            .collect()
    }

    /// Wraps a semantic failure with the line of the key it came from.
    fn at(&self, section: &str, name: &str, err: Error) -> Error {
        match self.entries.get(&(section.to_string(), name.to_string())) {
            Some(e) => Error::Config { line: e.line, msg: err.to_string() },
            None => err,
        }
    }

    fn line_of(&self, section: &str, name: &str) -> usize {
        self.entries.get(&(section.to_string(), name.to_string())).map_or(0, |e| e.line)
    }
}

fn parse_index(t: &Table) -> Result<PowerLawIndex> {
    let p_minus: f64 = t.get("constitutive", "p_minus")?;
    let p_plus: f64 = t.get("constitutive", "p_plus")?;
    if !(p_minus > 1.0) {
        return Err(Error::Config { line: t.line_of("constitutive", "p_minus"), msg: format!("requires p_minus > 1, got {p_minus}") });
    }
    let profile: String = t.get("constitutive", "profile")?;
    let profile = match profile.as_str() {
        "auto" if p_minus == p_plus => ExponentProfile::Constant,
        "constant" => ExponentProfile::Constant,
        "auto" | "tanh" => ExponentProfile::Tanh {
            center: t.get("constitutive", "center")?,
            width: t.get("constitutive", "width")?,
            decreasing: t.get("constitutive", "decreasing")?,
        },
        "affine" => {
            let slope: f64 = t.get("constitutive", "slope")?;
            let base = if slope < 0.0 { p_plus } else { p_minus };
            ExponentProfile::AffineClamped { base, slope }
        }
        other => {
            return Err(Error::Config { line: t.line_of("constitutive", "profile"), msg: format!("unknown profile '{other}'") })
        }
    };
    PowerLawIndex::new(p_minus, p_plus, profile).map_err(|e| t.at("constitutive", "p_plus", e))
}

fn parse_solver(t: &Table) -> Result<SolverConfig> {
    let d: usize = t.get("solver", "d")?;
    let mut cfg = SolverConfig::new(
        d,
        t.get("solver", "n")?,
        t.get("solver", "dt")?,
        t.get("solver", "t_end")?,
        t.get("constitutive", "nu0")?,
        parse_index(t)?,
    );
    cfg.picard_tol = t.get("solver", "picard_tol")?;
    cfg.picard_max = t.get("solver", "picard_max")?;
    let split: String = t.get("solver", "split")?;
    cfg.split = if split == "adaptive" { ViscousSplit::Adaptive } else { ViscousSplit::Fixed(t.get("solver", "split")?) };
    cfg.dealias = match t.get::<String>("solver", "dealias")?.as_str() {
        "two_thirds" => DealiasRule::TwoThirds,
        "none" => DealiasRule::None,
        other => return Err(Error::Config { line: t.line_of("solver", "dealias"), msg: format!("unknown dealias rule '{other}'") }),
    };
    cfg.convection = match t.get::<String>("solver", "convection")?.as_str() {
        "divergence" => Convection::Divergence,
        "skew_symmetric" => Convection::SkewSymmetric,
        "off" => Convection::Off,
        other => {
            return Err(Error::Config { line: t.line_of("solver", "convection"), msg: format!("unknown convection form '{other}'") })
        }
    };
    let q: String = t.get("solver", "q_monitor")?;
    cfg.q_monitor = if q == "auto" { default_q_monitor(d) } else { t.get("solver", "q_monitor")? };
    let delta: String = t.get("solver", "delta_monitor")?;
    cfg.delta_monitor = if delta == "auto" { default_delta_monitor(d) } else { t.get("solver", "delta_monitor")? };
    cfg.cadence = t.get("solver", "cadence")?;
    if let Err(e) = cfg.validate() {
        // attribute the failure to the most likely key
        let msg = e.to_string();
        let culprit = ["q_monitor", "delta_monitor", "dt", "t_end", "n", "d", "picard_tol", "picard_max", "cadence", "split"]
            .into_iter()
            .find(|k| msg.contains(k))
            .unwrap_or("d");
        return Err(t.at("solver", culprit, e));
    }
    Ok(cfg)
}

fn parse_synovial(t: &Table) -> Result<SynovialParams> {
    let centre: Vec<f64> = t.list("scenario", "blob_center")?;
    if centre.is_empty() || centre.len() > 3 {
        return Err(Error::Config { line: t.line_of("scenario", "blob_center"), msg: "blob_center takes 1 to 3 numbers".into() });
    }
    let mut blob_center = [0.5; 3];
    blob_center[..centre.len()].copy_from_slice(&centre);
    let p = SynovialParams {
        background: t.get("scenario", "background")?,
        blob_amplitude: t.get("scenario", "blob_amplitude")?,
        blob_center,
        blob_width: t.get("scenario", "blob_width")?,
        vortex: t.get("scenario", "vortex")?,
        shear: t.get("scenario", "shear")?,
        flux: t.get("scenario", "flux")?,
    };
    p.validate().map_err(|e| t.at("scenario", "blob_width", e))?;
    Ok(p)
}

fn parse_manufactured(t: &Table, solver: &SolverConfig) -> Result<ManufacturedSetup> {
    let case: String = t.get("scenario", "case")?;
    let case: CaseId = case.parse().map_err(|e| t.at("scenario", "case", e))?;
    let params = ManufacturedParams {
        amplitude: t.get("scenario", "amplitude")?,
        conc_amplitude: t.get("scenario", "conc_amplitude")?,
        conc_mean: t.get("scenario", "conc_mean")?,
        decay_v: t.get("scenario", "decay_v")?,
        decay_c: t.get("scenario", "decay_c")?,
        rho: t.get("scenario", "rho")?,
        modes: t.get("scenario", "modes")?,
        nu0: solver.nu0,
        index: solver.index,
    };
    let study = StudySetup {
        t_end_spatial: t.get("scenario", "t_end_spatial")?,
        t_end_temporal: t.get("scenario", "t_end_temporal")?,
        dt_spatial: t.get("scenario", "dt_spatial")?,
        n_temporal: t.get("scenario", "n_temporal")?,
        picard_tol: solver.picard_tol,
        picard_max: solver.picard_max,
    };
    Ok(ManufacturedSetup { case, params, study, n_ladder: t.list("scenario", "n_ladder")?, dt_ladder: t.list("scenario", "dt_ladder")? })
}

/// Parses configuration text.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let t = Table::parse(text)?;
    let solver = parse_solver(&t)?;
    let kind = match t.get::<String>("scenario", "kind")?.as_str() {
        "synovial" => ScenarioKind::Synovial,
        "manufactured" => ScenarioKind::Manufactured,
        other => return Err(Error::Config { line: t.line_of("scenario", "kind"), msg: format!("unknown scenario kind '{other}'") }),
    };
    let manufactured = parse_manufactured(&t, &solver)?;
    if kind == ScenarioKind::Manufactured && manufactured.case.dim() != solver.d {
        return Err(t.at(
            "solver",
            "d",
            Error::InvalidParameter(format!("case {} needs d = {}", manufactured.case, manufactured.case.dim())),
        ));
    }
    let eps: f64 = t.get("scenario", "eps")?;
    let output = OutputConfig {
        out_dir: PathBuf::from(t.get::<String>("output", "out_dir")?),
        snapshot_every: t.get("output", "snapshot_every")?,
    };
    Ok(RunConfig { solver, kind, synovial: parse_synovial(&t)?, manufactured, eps, output })
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

/// A complete config file listing every key with its default and meaning.
/// Required keys carry example values.
pub fn print_defaults() -> String {
    let example = |k: &str| match k {
        "d" => "2",
        "n" => "64",
        "dt" => "1e-3",
        "t_end" => "2.0",
        "nu0" => "0.01",
        "p_minus" => "2.0",
        "p_plus" => "2.9",
        _ => "",
    };
    let mut out = String::from("# crfs configuration; every key is listed with its default\n");
    for section in SECTIONS {
        let _ = writeln!(out, "\n[{section}]");
        for k in KEYS.iter().filter(|k| k.section == section) {
            let _ = writeln!(out, "# {}", k.help);
            match k.default {
                Some(d) => {
                    let _ = writeln!(out, "{} = {}", k.key, d);
                }
                None => {
                    let _ = writeln!(out, "# required\n{} = {}", k.key, example(k.key));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[solver]\nd = 2\nn = 32\ndt = 1e-3\nt_end = 0.1\n[constitutive]\nnu0 = 0.01\np_minus = 2\np_plus = 2.9\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.solver.n, 32);
        assert_eq!(cfg.solver.picard_max, 50);
        assert_eq!(cfg.solver.q_monitor, 6.0);
        assert_eq!(cfg.kind, ScenarioKind::Synovial);
        assert!(matches!(cfg.solver.index.profile(), ExponentProfile::Tanh { .. }));
    }

    #[test]
    fn defaults_text_parses() {
        let cfg = parse_config_str(&print_defaults()).unwrap();
        assert_eq!(cfg.solver.n, 64);
        assert_eq!(cfg.manufactured.n_ladder, vec![16, 32, 64]);
    }

    #[test]
    fn errors_carry_lines() {
        let text = MINIMAL.replace("n = 32", "n = many");
        match parse_config_str(&text) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let text = format!("{MINIMAL}colour = red\n");
        assert!(matches!(parse_config_str(&text), Err(Error::Config { line: 10, .. })));
    }

    #[test]
    fn missing_required_key() {
        let text = MINIMAL.replace("nu0 = 0.01\n", "");
        let err = parse_config_str(&text).unwrap_err();
        assert!(matches!(err, Error::ConfigMissing(ref m) if m.contains("nu0")), "{err}");
    }
}
