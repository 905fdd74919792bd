use serde::{Deserialize, Serialize};

use super::manufactured::ManufacturedCase;
use crate::error::{Error, Result};
use crate::solver::{run, SolverConfig, Termination};

/// Fixed parameters of a convergence study besides the two ladders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudySetup {
    /// Final times of the spatial and temporal ladders. The spatial one is
    /// short so that time-stepping error stays below the resolution error.
    pub t_end_spatial: f64,
    pub t_end_temporal: f64,
    /// Time step of the spatial ladder.
    pub dt_spatial: f64,
    /// Resolution of the temporal ladder.
    pub n_temporal: usize,
    pub picard_tol: f64,
    pub picard_max: usize,
}

impl Default for StudySetup {
    fn default() -> Self {
        StudySetup {
            t_end_spatial: 0.01,
            t_end_temporal: 0.1,
            dt_spatial: 1e-5,
            n_temporal: 64,
            picard_tol: 1e-10,
            picard_max: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dt: f64,
    pub err_v: f64,
    pub err_c: f64,
    pub max_picard: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub case: String,
    pub spatial: Vec<ConvergenceRow>,
    pub temporal: Vec<ConvergenceRow>,
}

fn ratios(rows: &[ConvergenceRow], err: impl Fn(&ConvergenceRow) -> f64) -> Vec<f64> {
    rows.windows(2).map(|w| err(&w[0]) / err(&w[1])).collect()
}

/// Least-squares slope of `log err` against `log dt`.
fn slope(rows: &[ConvergenceRow], err: impl Fn(&ConvergenceRow) -> f64) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.dt.ln(), err(r).ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    num / den
}

impl ConvergenceTable {
    /// Error ratios between consecutive resolutions, `(velocity, concentration)`.
    pub fn spatial_ratios(&self) -> (Vec<f64>, Vec<f64>) {
        (ratios(&self.spatial, |r| r.err_v), ratios(&self.spatial, |r| r.err_c))
    }

    /// Fitted temporal orders, `(velocity, concentration)`.
    pub fn temporal_slopes(&self) -> (f64, f64) {
        (slope(&self.temporal, |r| r.err_v), slope(&self.temporal, |r| r.err_c))
    }

    pub fn spatial_passes(&self, min_ratio: f64) -> bool {
        let (rv, rc) = self.spatial_ratios();
        rv.iter().chain(&rc).all(|&r| r >= min_ratio)
    }

    pub fn temporal_passes(&self, order: f64, tol: f64) -> bool {
        let (sv, sc) = self.temporal_slopes();
        (sv - order).abs() <= tol && (sc - order).abs() <= tol
    }
}

/// One run from exact initial data; reports the final-time L2 errors.
pub fn run_manufactured(
    case: &ManufacturedCase,
    n: usize,
    dt: f64,
    t_end: f64,
    setup: &StudySetup,
) -> Result<ConvergenceRow> {
    let p = case.params();
    let mut cfg = SolverConfig::new(case.dim(), n, dt, t_end, p.nu0, p.index);
    cfg.picard_tol = setup.picard_tol;
    cfg.picard_max = setup.picard_max;
    cfg.cadence = cfg.steps().max(1);
    cfg.validate()?;
    let grid = cfg.grid()?;
    let start = std::time::Instant::now();
    let forcing = case.forcing(&grid)?;
    let out = run(&cfg, case.state_at(&grid, 0.0)?, &forcing)?;
    if out.termination != Termination::Completed {
        return Err(Error::Blowup {
            t: out.final_state.t,
            what: out.message.unwrap_or_else(|| "manufactured run stopped early".into()),
        });
    }
    let (err_v, err_c) = case.errors(&out.final_state)?;
    Ok(ConvergenceRow { n, dt, err_v, err_c, max_picard: out.max_picard_iterations(), seconds: start.elapsed().as_secs_f64() })
}

/// Spatial ladder at `setup.dt_spatial`, temporal ladder at `setup.n_temporal`.
pub fn convergence_study(
    case: &ManufacturedCase,
    n_ladder: &[usize],
    dt_ladder: &[f64],
    setup: &StudySetup,
) -> Result<ConvergenceTable> {
    if n_ladder.len() < 3 || dt_ladder.len() < 3 {
        return Err(Error::InvalidParameter("convergence ladders need at least three points".into()));
    }
    let spatial = n_ladder.iter().map(|&n| run_manufactured(case, n, setup.dt_spatial, setup.t_end_spatial, setup)).collect::<Result<Vec<_>>>()?;
    let temporal =
        dt_ladder.iter().map(|&dt| run_manufactured(case, setup.n_temporal, dt, setup.t_end_temporal, setup)).collect::<Result<Vec<_>>>()?;
    for r in spatial.iter().chain(&temporal) {
        log::info!("n = {:4}  dt = {:.2e}  err_v = {:.3e}  err_c = {:.3e}", r.n, r.dt, r.err_v, r.err_c);
    }
    Ok(ConvergenceTable { case: case.id().to_string(), spatial, temporal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{make_manufactured, CaseId, ManufacturedParams};

    fn row(n: usize, dt: f64, err_v: f64, err_c: f64) -> ConvergenceRow {
        ConvergenceRow { n, dt, err_v, err_c, max_picard: 1, seconds: 0.0 }
    }

    #[test]
    fn slopes_and_ratios_of_synthetic_errors() {
        let table = ConvergenceTable {
            case: "synthetic".into(),
            spatial: vec![row(16, 1e-5, 1e-2, 1e-3), row(32, 1e-5, 1e-4, 1e-4), row(64, 1e-5, 1e-6, 5e-5)],
            temporal: [4e-4, 2e-4, 1e-4].iter().map(|&dt| row(64, dt, 3.0 * dt, 0.5 * dt * dt)).collect(),
        };
        let (rv, rc) = table.spatial_ratios();
        assert!(rv.iter().all(|r| (r - 100.0).abs() < 1e-10));
        assert!((rc[1] - 2.0).abs() < 1e-12);
        assert!(!table.spatial_passes(4.0));
        let (sv, sc) = table.temporal_slopes();
        assert!((sv - 1.0).abs() < 1e-12 && (sc - 2.0).abs() < 1e-12);
        assert!(!table.temporal_passes(1.0, 0.1));
    }

    #[test]
    fn short_ladders_are_rejected() {
        let id = CaseId::DecayingMode2d;
        let case = make_manufactured(id, ManufacturedParams::default_for(id)).unwrap();
        let err = convergence_study(&case, &[16, 32], &[1e-3, 5e-4, 2.5e-4], &StudySetup::default());
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }
}
