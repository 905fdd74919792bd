//! Manufactured solutions with exactly computed forcings.
//!
//! Velocity, concentration and pressure are finite Fourier sums whose
//! amplitudes decay geometrically, `rho^(m-1)` for the `m`-th mode, so the
//! spatial resolution needed to represent them is tunable. The body force
//!
//! ```text
//! f* = dv*/dt + (v*.grad) v* - div S(c*, Dv*) + grad pi*
//! ```
//!
//! is evaluated pointwise with the chain rule through the stress Jacobians,
//! and the flux is the gradient `g* = grad G` with
//! `-lap G = dc*/dt + div(c* v*) - lap c*`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::trig::{GridSampler, TrigPoly};
use crate::constitutive::{PowerLawIndex, StressModel};
use crate::error::{Error, Result};
use crate::solver::{Forcing, State};
use crate::spectral::{Grid, PhysicalField, Rank, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    DecayingMode2d,
    DecayingMode3d,
    SteadyShear2d,
}

impl CaseId {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::DecayingMode2d => "decaying_mode_2d",
            CaseId::DecayingMode3d => "decaying_mode_3d",
            CaseId::SteadyShear2d => "steady_shear_2d",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            CaseId::DecayingMode3d => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<CaseId> {
        match s {
            "decaying_mode_2d" => Ok(CaseId::DecayingMode2d),
            "decaying_mode_3d" => Ok(CaseId::DecayingMode3d),
            "steady_shear_2d" => Ok(CaseId::SteadyShear2d),
            other => Err(Error::InvalidParameter(format!("unknown manufactured case '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedParams {
    /// Velocity amplitude.
    pub amplitude: f64,
    /// Amplitude of the concentration fluctuation.
    pub conc_amplitude: f64,
    pub conc_mean: f64,
    /// Decay rates of the velocity and the concentration fluctuation.
    pub decay_v: f64,
    pub decay_c: f64,
    /// Geometric ratio of successive mode amplitudes.
    pub rho: f64,
    /// Number of modes in each sum.
    pub modes: usize,
    pub nu0: f64,
    pub index: PowerLawIndex,
}

impl ManufacturedParams {
    /// Defaults used by the convergence harness.
    pub fn default_for(id: CaseId) -> ManufacturedParams {
        let index = PowerLawIndex::tanh_profile(2.0, 2.9, 0.5, 0.5, true).expect("valid profile");
        let base = ManufacturedParams {
            amplitude: 0.3,
            conc_amplitude: 0.5,
            conc_mean: 0.5,
            decay_v: 3.0,
            decay_c: 3.0,
            rho: 0.3,
            modes: 12,
            nu0: 0.05,
            index,
        };
        match id {
            CaseId::DecayingMode2d => base,
            CaseId::DecayingMode3d => ManufacturedParams { modes: 4, ..base },
            CaseId::SteadyShear2d => ManufacturedParams { decay_v: 0.0, decay_c: 0.0, ..base },
        }
    }

    /// Newtonian Taylor-Green degeneration: single mode, constant
    /// concentration, and the decay rate `8 pi^2 nu0` of the free vortex.
    pub fn taylor_green(nu0: f64, amplitude: f64) -> ManufacturedParams {
        ManufacturedParams {
            amplitude,
            conc_amplitude: 0.0,
            conc_mean: 1.0,
            decay_v: 8.0 * PI * PI * nu0,
            decay_c: 0.0,
            rho: 0.0,
            modes: 1,
            nu0,
            index: PowerLawIndex::constant(2.0).expect("valid exponent"),
        }
    }
}

/// Fixed phase of the `m`-th mode; deterministic and irregular.
fn phase(m: usize, salt: f64) -> f64 {
    ((m * m) as f64 * 0.731 + salt).rem_euclid(2.0 * PI)
}

/// Exact fields and forcings of one manufactured solution.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    id: CaseId,
    params: ManufacturedParams,
    model: StressModel,
    v: Vec<TrigPoly>,
    c: TrigPoly,
    pressure: TrigPoly,
    /// `dv/dt + (v.grad) v + grad pi`.
    polynomial_force: Vec<TrigPoly>,
    /// `d_j v_i` at `i*d + j` and `d_l d_j v_i` at `(i*d + j)*d + l`.
    grad_v: Vec<TrigPoly>,
    hess_v: Vec<TrigPoly>,
    grad_c: Vec<TrigPoly>,
    flux: Vec<TrigPoly>,
    source: TrigPoly,
}

fn grad(p: &TrigPoly, d: usize) -> Vec<TrigPoly> {
    (0..d).map(|j| p.dx(j)).collect()
}

pub fn make_manufactured(id: CaseId, params: ManufacturedParams) -> Result<ManufacturedCase> {
    if params.modes == 0 {
        return Err(Error::InvalidParameter("manufactured case needs at least one mode".into()));
    }
    if !(params.rho >= 0.0 && params.rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in [0, 1), got {}", params.rho)));
    }
    let model = StressModel::new(params.nu0, params.index)?;
    let d = id.dim();
    let p = &params;
    let weight = |m: usize| p.rho.powi(m as i32 - 1);

    let (v, c, pressure) = match id {
        CaseId::DecayingMode2d => {
            let s = p.amplitude / (2.0 * PI);
            let mut psi = TrigPoly::sine(s, [1, 0, 0], 0.0, p.decay_v).mul(&TrigPoly::sine(1.0, [0, 1, 0], 0.0, 0.0));
            let mut conc = TrigPoly::wave(p.conc_amplitude, [1, 0, 0], 0.0, p.decay_c);
            for m in 2..=p.modes {
                let mi = m as i64;
                psi = psi.add(&TrigPoly::sine(s * weight(m), [mi, mi - 1, 0], phase(m, 0.0), p.decay_v));
                conc = conc.add(&TrigPoly::wave(p.conc_amplitude * weight(m), [mi - 1, mi, 0], phase(m, 1.3), p.decay_c));
            }
            let v = vec![psi.dx(1).scale(-1.0), psi.dx(0)];
            let q = 0.25 * p.amplitude * p.amplitude;
            let pressure = TrigPoly::wave(q, [2, 0, 0], 0.0, 2.0 * p.decay_v)
                .add(&TrigPoly::wave(q, [0, 2, 0], 0.0, 2.0 * p.decay_v));
            (v, TrigPoly::constant(p.conc_mean).add(&conc), pressure)
        }
        CaseId::SteadyShear2d => {
            let mut u = TrigPoly::sine(p.amplitude, [0, 1, 0], 0.0, 0.0);
            let mut conc = TrigPoly::wave(p.conc_amplitude, [1, 0, 0], 0.0, 0.0);
            for m in 2..=p.modes {
                let mi = m as i64;
                u = u.add(&TrigPoly::sine(p.amplitude * weight(m), [0, mi, 0], phase(m, 0.0), 0.0));
                conc = conc.add(&TrigPoly::wave(p.conc_amplitude * weight(m), [mi, 1, 0], phase(m, 1.3), 0.0));
            }
            (vec![u, TrigPoly::zero()], TrigPoly::constant(p.conc_mean).add(&conc), TrigPoly::zero())
        }
        CaseId::DecayingMode3d => {
            // v = curl A with A_i = s (sin, sin) products over the other two axes
            let s = p.amplitude / (2.0 * PI);
            let pair = |a: usize, b: usize| {
                let mut fa = [0i64; 3];
                let mut fb = [0i64; 3];
                fa[a] = 1;
                fb[b] = 1;
                TrigPoly::sine(s, fa, 0.0, p.decay_v).mul(&TrigPoly::sine(1.0, fb, 0.0, 0.0))
            };
            let mut pot = [pair(1, 2), pair(2, 0).scale(0.5), pair(0, 1).scale(-0.75)];
            let mut conc = TrigPoly::wave(p.conc_amplitude, [1, 0, 0], 0.0, p.decay_c);
            for m in 2..=p.modes {
                let mi = m as i64;
                for (a, comp) in pot.iter_mut().enumerate() {
                    let mut f = [mi - 1, mi - 1, mi - 1];
                    f[a] = mi;
                    *comp = comp.add(&TrigPoly::sine(s * weight(m), f, phase(m, a as f64), p.decay_v));
                }
                conc = conc.add(&TrigPoly::wave(p.conc_amplitude * weight(m), [mi - 1, mi, 1], phase(m, 1.3), p.decay_c));
            }
            let v = vec![
                pot[2].dx(1).add(&pot[1].dx(2).scale(-1.0)),
                pot[0].dx(2).add(&pot[2].dx(0).scale(-1.0)),
                pot[1].dx(0).add(&pot[0].dx(1).scale(-1.0)),
            ];
            let q = 0.125 * p.amplitude * p.amplitude;
            let pressure = (0..3).fold(TrigPoly::zero(), |acc, a| {
                let mut f = [0i64; 3];
                f[a] = 2;
                acc.add(&TrigPoly::wave(q, f, 0.0, 2.0 * p.decay_v))
            });
            (v, TrigPoly::constant(p.conc_mean).add(&conc), pressure)
        }
    };

    let grad_v: Vec<TrigPoly> = v.iter().flat_map(|vi| grad(vi, d)).collect();
    let hess_v: Vec<TrigPoly> = grad_v.iter().flat_map(|g| grad(g, d)).collect();
    let grad_c = grad(&c, d);

    let mut polynomial_force = Vec::with_capacity(d);
    for i in 0..d {
        let mut fi = v[i].dt().add(&pressure.dx(i));
        for j in 0..d {
            fi = fi.add(&v[j].mul(&grad_v[i * d + j]));
        }
        polynomial_force.push(fi);
    }

    // -div g = dc/dt + div(c v) - lap c
    let mut source = c.dt().add(&c.laplacian().scale(-1.0));
    for (j, vj) in v.iter().enumerate() {
        source = source.add(&c.mul(vj).dx(j));
    }
    let potential = source.solve_poisson(1e-12)?;
    let flux = grad(&potential, d);

    Ok(ManufacturedCase { id, params, model, v, c, pressure, polynomial_force, grad_v, hess_v, grad_c, flux, source })
}

impl ManufacturedCase {
    pub fn id(&self) -> CaseId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.id.dim()
    }

    pub fn params(&self) -> &ManufacturedParams {
        &self.params
    }

    pub fn model(&self) -> &StressModel {
        &self.model
    }

    pub fn velocity(&self) -> &[TrigPoly] {
        &self.v
    }

    pub fn concentration(&self) -> &TrigPoly {
        &self.c
    }

    pub fn pressure(&self) -> &TrigPoly {
        &self.pressure
    }

    pub fn flux(&self) -> &[TrigPoly] {
        &self.flux
    }

    /// `-div g*`.
    pub fn source(&self) -> &TrigPoly {
        &self.source
    }

    pub fn velocity_at(&self, x: [f64; 3], t: f64) -> Vec<f64> {
        self.v.iter().map(|p| p.eval(x, t)).collect()
    }

    pub fn concentration_at(&self, x: [f64; 3], t: f64) -> f64 {
        self.c.eval(x, t)
    }

    pub fn pressure_at(&self, x: [f64; 3], t: f64) -> f64 {
        self.pressure.eval(x, t)
    }

    pub fn flux_at(&self, x: [f64; 3], t: f64) -> Vec<f64> {
        self.flux.iter().map(|p| p.eval(x, t)).collect()
    }

    /// `div S(c*, Dv*)` from pointwise values of `c`, `grad c`, `grad v`, `grad grad v`.
    fn stress_divergence(&self, c: f64, grad_c: &[f64], grad_v: &[f64], hess_v: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let m = d * d;
        let mut dmat = vec![0.0; m];
        for i in 0..d {
            for j in 0..d {
                dmat[i * d + j] = 0.5 * (grad_v[i * d + j] + grad_v[j * d + i]);
            }
        }
        let jd = self.model.jacobian_d(c, &dmat);
        let jc = self.model.jacobian_c(c, &dmat).tensor;
        // d_l D_kh = (d_l d_h v_k + d_l d_k v_h) / 2
        let grad_d = |k: usize, h: usize, l: usize| 0.5 * (hess_v[(k * d + h) * d + l] + hess_v[(h * d + k) * d + l]);
        let mut out = vec![0.0; d];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..d {
                let row = i * d + j;
                let mut acc = jc[row] * grad_c[j];
                for k in 0..d {
                    for h in 0..d {
                        acc += jd[row * m + k * d + h] * grad_d(k, h, j);
                    }
                }
                *o += acc;
            }
        }
        out
    }

    /// Exact body force `f*(x, t)`.
    pub fn momentum_forcing_at(&self, x: [f64; 3], t: f64) -> Vec<f64> {
        let ev = |ps: &[TrigPoly]| ps.iter().map(|p| p.eval(x, t)).collect::<Vec<_>>();
        let div_s = self.stress_divergence(self.c.eval(x, t), &ev(&self.grad_c), &ev(&self.grad_v), &ev(&self.hess_v));
        self.polynomial_force.iter().zip(div_s).map(|(p, s)| p.eval(x, t) - s).collect()
    }

    pub fn source_at(&self, x: [f64; 3], t: f64) -> f64 {
        self.source.eval(x, t)
    }

    fn check_grid(&self, grid: &Arc<Grid>) -> Result<()> {
        if grid.dim() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "case {} is {}-dimensional, grid is {}-dimensional",
                self.id,
                self.dim(),
                grid.dim()
            )));
        }
        Ok(())
    }

    /// Exact fields sampled on `grid`, band-limited as solver initial data.
    pub fn state_at(&self, grid: &Arc<Grid>, t: f64) -> Result<State> {
        self.check_grid(grid)?;
        let mut polys = self.v.clone();
        polys.push(self.c.clone());
        let mut vals = GridSampler::new(grid, &polys)?.sample(t);
        let c = vals.pop().expect("concentration samples");
        let v = PhysicalField::from_components(grid, Rank::Vector, vals)?;
        let c = PhysicalField::from_components(grid, Rank::Scalar, vec![c])?;
        State::from_physical(t, &v, &c)
    }

    pub fn forcing(&self, grid: &Arc<Grid>) -> Result<ManufacturedForcing> {
        self.check_grid(grid)?;
        let d = self.dim();
        let mut fields = self.polynomial_force.clone();
        fields.push(self.c.clone());
        fields.extend(self.grad_c.iter().cloned());
        fields.extend(self.grad_v.iter().cloned());
        fields.extend(self.hess_v.iter().cloned());
        let parts = GridSampler::new(grid, &fields)?;
        let flux = GridSampler::new(grid, &self.flux)?;
        let source = GridSampler::new(grid, std::slice::from_ref(&self.source))?;
        Ok(ManufacturedForcing { case: self.clone(), grid: grid.clone(), d, parts, flux, source })
    }

    /// Final-time L2 errors `(||v - v*||, ||c - c*||)`, counting exact content
    /// the grid cannot resolve as error.
    pub fn errors(&self, state: &State) -> Result<(f64, f64)> {
        let grid = state.grid();
        self.check_grid(grid)?;
        let err = |poly: &TrigPoly, num: &[rustfft::num_complex::Complex64]| {
            let (exact, outside) = poly.coefficients(grid, state.t);
            let inside: f64 = exact.iter().zip(num).map(|(a, b)| (a - b).norm_sqr()).sum();
            inside + outside
        };
        let ev: f64 = self.v.iter().enumerate().map(|(i, p)| err(p, state.v.component(i))).sum();
        let ec = err(&self.c, state.c.component(0));
        Ok((ev.sqrt(), ec.sqrt()))
    }
}

/// Exact forcing of a manufactured case on one grid.
#[derive(Debug, Clone)]
pub struct ManufacturedForcing {
    case: ManufacturedCase,
    grid: Arc<Grid>,
    d: usize,
    parts: GridSampler,
    flux: GridSampler,
    source: GridSampler,
}

impl ManufacturedForcing {
    fn matches(&self, grid: &Arc<Grid>) -> bool {
        let ok = **grid == *self.grid;
        if !ok {
            log::error!("manufactured forcing sampled on a different grid");
        }
        ok
    }
}

impl Forcing for ManufacturedForcing {
    fn momentum(&self, grid: &Arc<Grid>, t: f64) -> Option<PhysicalField> {
        if !self.matches(grid) {
            return None;
        }
        let d = self.d;
        let vals = self.parts.sample(t);
        let (poly, rest) = vals.split_at(d);
        let (c, rest) = rest.split_at(1);
        let (gc, rest) = rest.split_at(d);
        let (gv, hv) = rest.split_at(d * d);
        let mut out = PhysicalField::zeros(grid, Rank::Vector);
        let mut gcp = vec![0.0; d];
        let mut gvp = vec![0.0; d * d];
        let mut hvp = vec![0.0; d * d * d];
        for idx in 0..grid.len() {
            for (a, s) in gcp.iter_mut().enumerate() {
                *s = gc[a][idx];
            }
            for (a, s) in gvp.iter_mut().enumerate() {
                *s = gv[a][idx];
            }
            for (a, s) in hvp.iter_mut().enumerate() {
                *s = hv[a][idx];
            }
            let div_s = self.case.stress_divergence(c[0][idx], &gcp, &gvp, &hvp);
            for i in 0..d {
                out.component_mut(i)[idx] = poly[i][idx] - div_s[i];
            }
        }
        Some(out)
    }

    fn flux(&self, grid: &Arc<Grid>, t: f64) -> Option<PhysicalField> {
        if !self.matches(grid) {
            return None;
        }
        self.flux.field(Rank::Vector, t).ok()
    }

    fn concentration_source(&self, grid: &Arc<Grid>, t: f64) -> Result<Option<SpectralField>> {
        if !self.matches(grid) {
            return Ok(None);
        }
        Ok(Some(self.source.field(Rank::Scalar, t)?.to_spectral()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_green_needs_no_forcing() {
        let case = make_manufactured(CaseId::DecayingMode2d, ManufacturedParams::taylor_green(0.1, 1.0)).unwrap();
        for x in [[0.1, 0.2, 0.0], [0.77, 0.4, 0.0]] {
            for t in [0.0, 0.3] {
                let f = case.momentum_forcing_at(x, t);
                assert!(f.iter().all(|v| v.abs() < 1e-12), "{f:?}");
                assert!(case.flux_at(x, t).iter().all(|v| v.abs() < 1e-15));
            }
        }
    }

    #[test]
    fn steady_shear_is_time_independent() {
        let case = make_manufactured(CaseId::SteadyShear2d, ManufacturedParams::default_for(CaseId::SteadyShear2d))
            .unwrap();
        let x = [0.3, 0.6, 0.0];
        assert_eq!(case.momentum_forcing_at(x, 0.0), case.momentum_forcing_at(x, 5.0));
        assert_eq!(case.flux_at(x, 0.0), case.flux_at(x, 5.0));
    }

    #[test]
    fn case_names_round_trip() {
        for id in [CaseId::DecayingMode2d, CaseId::DecayingMode3d, CaseId::SteadyShear2d] {
            assert_eq!(id.as_str().parse::<CaseId>().unwrap(), id);
        }
        assert!("vortex".parse::<CaseId>().is_err());
    }
}
