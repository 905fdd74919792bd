//! Discrete Grönwall certificates
//! `y(t_m) <= exp(int_0^t_m phi) (y(0) + int_0^t_m psi)`, with trapezoidal
//! time integrals.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallReport {
    pub passed: bool,
    /// `min_m (envelope_m - y_m)`; negative on failure.
    pub margin: f64,
    pub first_violation: Option<usize>,
    /// Constant multiplying `phi` and `psi`.
    pub constant: f64,
    pub envelope: Vec<f64>,
}

fn validate(t: &[f64], y: &[f64], phi: &[f64], psi: &[f64]) -> Result<()> {
    let n = t.len();
    if n == 0 {
        return Err(Error::MisalignedSeries("empty series".into()));
    }
    if y.len() != n || phi.len() != n || psi.len() != n {
        return Err(Error::MisalignedSeries(format!(
            "lengths t={n}, y={}, phi={}, psi={}",
            y.len(),
            phi.len(),
            psi.len()
        )));
    }
    if t.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::MisalignedSeries("time samples must be nondecreasing".into()));
    }
    if phi.iter().chain(psi).any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::MisalignedSeries("phi and psi must be finite and nonnegative".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::MisalignedSeries("y must be finite".into()));
    }
    Ok(())
}

fn cumulative(t: &[f64], f: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(t.len());
    out.push(0.0);
    for m in 1..t.len() {
        acc += 0.5 * (f[m] + f[m - 1]) * (t[m] - t[m - 1]);
        out.push(acc);
    }
    out
}

fn envelope(t: &[f64], y0: f64, phi: &[f64], psi: &[f64], constant: f64) -> Vec<f64> {
    let ip = cumulative(t, phi);
    let is = cumulative(t, psi);
    ip.iter().zip(&is).map(|(a, b)| (constant * a).exp() * (y0 + constant * b)).collect()
}

/// Certificate with `phi`, `psi` taken as given (constant 1).
pub fn gronwall_certificate(t: &[f64], y: &[f64], phi: &[f64], psi: &[f64]) -> Result<GronwallReport> {
    certify_with(t, y, phi, psi, 1.0)
}

fn certify_with(t: &[f64], y: &[f64], phi: &[f64], psi: &[f64], constant: f64) -> Result<GronwallReport> {
    validate(t, y, phi, psi)?;
    let env = envelope(t, y[0], phi, psi, constant);
    let mut margin = f64::INFINITY;
    let mut first_violation = None;
    for (m, (e, v)) in env.iter().zip(y).enumerate() {
        let gap = e - v;
        margin = margin.min(gap);
        let slack = 1e-12 * e.abs().max(v.abs());
        if gap < -slack && first_violation.is_none() {
            first_violation = Some(m);
        }
    }
    Ok(GronwallReport { passed: first_violation.is_none(), margin, first_violation, constant, envelope: env })
}

/// Smallest `C >= 0` for which the first interval `[t_0, t_1]` satisfies the
/// envelope with `C phi`, `C psi`. Infinite when no finite constant works.
pub fn calibrate_constant(t: &[f64], y: &[f64], phi: &[f64], psi: &[f64]) -> Result<f64> {
    validate(t, y, phi, psi)?;
    if t.len() < 2 {
        return Ok(0.0);
    }
    let (tt, yy, pp, ss) = (&t[..2], &y[..2], &phi[..2], &psi[..2]);
    let passes = |c: f64| envelope(tt, yy[0], pp, ss, c)[1] >= yy[1];
    if passes(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while !passes(hi) {
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 {
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Calibrates the constant on the first interval, then certifies the whole series.
pub fn calibrated_certificate(t: &[f64], y: &[f64], phi: &[f64], psi: &[f64]) -> Result<GronwallReport> {
    let c = calibrate_constant(t, y, phi, psi)?;
    if c.is_infinite() {
        let mut r = certify_with(t, y, phi, psi, 0.0)?;
        r.passed = false;
        r.constant = c;
        return Ok(r);
    }
    certify_with(t, y, phi, psi, c)
}
