//! Exact trigonometric polynomials in space with exponential time factors.
//!
//! A term `a exp(-r t) cos(2 pi f.x + phi)` is closed under products,
//! derivatives and inverse Laplacians, so manufactured fields built from
//! such terms have exact derivatives of every order.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, PhysicalField, Rank, SpectralField};

/// `amp * exp(-rate t) * cos(2 pi freq.x + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub amp: f64,
    pub freq: [i64; 3],
    pub phase: f64,
    pub rate: f64,
}

impl Wave {
    pub fn eval(&self, x: [f64; 3], t: f64) -> f64 {
        let arg = 2.0 * PI * (self.freq[0] as f64 * x[0] + self.freq[1] as f64 * x[1] + self.freq[2] as f64 * x[2]);
        self.amp * (-self.rate * t).exp() * (arg + self.phase).cos()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigPoly {
    terms: Vec<Wave>,
}

fn canonical(w: Wave) -> Wave {
    // cos(-theta) = cos(theta): make the first nonzero frequency positive
    let first = w.freq.iter().copied().find(|&f| f != 0).unwrap_or(0);
    if first < 0 {
        Wave { amp: w.amp, freq: [-w.freq[0], -w.freq[1], -w.freq[2]], phase: -w.phase, rate: w.rate }
    } else {
        w
    }
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn constant(value: f64) -> Self {
        Self::wave(value, [0, 0, 0], 0.0, 0.0)
    }

    pub fn wave(amp: f64, freq: [i64; 3], phase: f64, rate: f64) -> Self {
        TrigPoly { terms: vec![Wave { amp, freq, phase, rate }] }.simplify()
    }

    /// `amp exp(-rate t) sin(2 pi freq.x + phase)`.
    pub fn sine(amp: f64, freq: [i64; 3], phase: f64, rate: f64) -> Self {
        Self::wave(amp, freq, phase - 0.5 * PI, rate)
    }

    pub fn terms(&self) -> &[Wave] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges terms sharing frequency and rate and drops terms that cancel
    /// to roundoff.
    pub fn simplify(self) -> Self {
        let mut acc: BTreeMap<([i64; 3], u64), (Complex64, f64)> = BTreeMap::new();
        for w in self.terms {
            let w = canonical(w);
            let z = Complex64::from_polar(w.amp, w.phase);
            let rate = if w.rate == 0.0 { 0.0 } else { w.rate };
            let key = (w.freq, rate.to_bits());
            let entry = acc.entry(key).or_default();
            // only the real part survives at zero frequency
            entry.0 += if w.freq == [0, 0, 0] { Complex64::new(z.re, 0.0) } else { z };
            entry.1 += w.amp.abs();
        }
        let terms = acc
            .into_iter()
            .filter(|(_, (z, size))| z.norm() > 1e-14 * size)
            .map(|((freq, rate), (z, _))| Wave { amp: z.norm(), freq, phase: z.arg(), rate: f64::from_bits(rate) })
            .collect();
        TrigPoly { terms }
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        TrigPoly { terms }.simplify()
    }

    pub fn scale(&self, s: f64) -> TrigPoly {
        TrigPoly { terms: self.terms.iter().map(|w| Wave { amp: w.amp * s, ..*w }).collect() }.simplify()
    }

    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let mut terms = Vec::with_capacity(2 * self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let amp = 0.5 * a.amp * b.amp;
                let rate = a.rate + b.rate;
                let sum = [a.freq[0] + b.freq[0], a.freq[1] + b.freq[1], a.freq[2] + b.freq[2]];
                let diff = [a.freq[0] - b.freq[0], a.freq[1] - b.freq[1], a.freq[2] - b.freq[2]];
                terms.push(Wave { amp, freq: sum, phase: a.phase + b.phase, rate });
                terms.push(Wave { amp, freq: diff, phase: a.phase - b.phase, rate });
            }
        }
        TrigPoly { terms }.simplify()
    }

    /// Partial derivative in `x_j`.
    pub fn dx(&self, j: usize) -> TrigPoly {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .map(|w| Wave { amp: w.amp * 2.0 * PI * w.freq[j] as f64, phase: w.phase + 0.5 * PI, ..*w })
                .collect(),
        }
        .simplify()
    }

    pub fn dt(&self) -> TrigPoly {
        TrigPoly { terms: self.terms.iter().map(|w| Wave { amp: -w.amp * w.rate, ..*w }).collect() }.simplify()
    }

    pub fn laplacian(&self) -> TrigPoly {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .map(|w| {
                    let f2 = (w.freq[0] * w.freq[0] + w.freq[1] * w.freq[1] + w.freq[2] * w.freq[2]) as f64;
                    Wave { amp: -w.amp * 4.0 * PI * PI * f2, ..*w }
                })
                .collect(),
        }
        .simplify()
    }

    /// Zero-frequency terms, as a time-dependent mean.
    pub fn mean(&self, t: f64) -> f64 {
        self.terms.iter().filter(|w| w.freq == [0, 0, 0]).map(|w| w.eval([0.0; 3], t)).sum()
    }

    /// Largest term amplitude at `t = 0`.
    pub fn scale_hint(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, w| m.max(w.amp))
    }

    /// Zero-mean `u` with `-lap u = self`. Fails when `self` has a mean
    /// component above `tol` times its largest amplitude.
    pub fn solve_poisson(&self, tol: f64) -> Result<TrigPoly> {
        let scale = self.scale_hint();
        let mean: f64 = self.terms.iter().filter(|w| w.freq == [0, 0, 0]).map(|w| w.amp * w.phase.cos()).sum();
        if mean.abs() > tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Manufactured(format!("Poisson right side has nonzero mean {mean:e}")));
        }
        Ok(TrigPoly {
            terms: self
                .terms
                .iter()
                .filter(|w| w.freq != [0, 0, 0])
                .map(|w| {
                    let f2 = (w.freq[0] * w.freq[0] + w.freq[1] * w.freq[1] + w.freq[2] * w.freq[2]) as f64;
                    Wave { amp: w.amp / (4.0 * PI * PI * f2), ..*w }
                })
                .collect(),
        }
        .simplify())
    }

    pub fn eval(&self, x: [f64; 3], t: f64) -> f64 {
        self.terms.iter().map(|w| w.eval(x, t)).sum()
    }

    /// Distinct decay rates.
    pub fn rates(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.terms.iter().map(|w| w.rate).collect();
        r.sort_by(f64::total_cmp);
        r.dedup();
        r
    }

    /// Exact Fourier coefficients at time `t` for the frequencies a grid
    /// resolves (signed range `[-n/2, n/2)`), plus the squared L2 norm of the
    /// content outside that range.
    pub fn coefficients(&self, grid: &Arc<Grid>, t: f64) -> (Vec<Complex64>, f64) {
        let n = grid.modes() as i64;
        let d = grid.dim();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut outside = BTreeMap::<[i64; 3], Complex64>::new();
        for w in &self.terms {
            let z = Complex64::from_polar(0.5 * w.amp * (-w.rate * t).exp(), w.phase);
            for (sign, zz) in [(1, z), (-1, z.conj())] {
                let f = [sign * w.freq[0], sign * w.freq[1], sign * w.freq[2]];
                let inside = f.iter().take(d).all(|&fi| fi >= -n / 2 && fi < n / 2) && f[d..].iter().all(|&fi| fi == 0);
                if inside {
                    coeffs[alias_index(f, n, d)] += zz;
                } else {
                    *outside.entry(f).or_default() += zz;
                }
            }
        }
        let energy = outside.values().map(|z| z.norm_sqr()).sum();
        (coeffs, energy)
    }
}

fn alias_index(f: [i64; 3], n: i64, d: usize) -> usize {
    let mut idx = 0usize;
    let mut stride = 1usize;
    for &fi in f.iter().take(d) {
        idx += (fi.rem_euclid(n)) as usize * stride;
        stride *= n as usize;
    }
    idx
}

/// Samples of a family of trigonometric polynomials on a fixed grid, with
/// one precomputed array per decay rate.
#[derive(Debug, Clone)]
pub struct GridSampler {
    grid: Arc<Grid>,
    /// Per component: (rate, samples at t = 0).
    parts: Vec<Vec<(f64, Vec<f64>)>>,
}

impl GridSampler {
    pub fn new(grid: &Arc<Grid>, polys: &[TrigPoly]) -> Result<GridSampler> {
        let n = grid.modes() as i64;
        let d = grid.dim();
        let mut parts = Vec::with_capacity(polys.len());
        for p in polys {
            if p.terms.iter().any(|w| w.freq[d..].iter().any(|&f| f != 0)) {
                return Err(Error::Manufactured("polynomial depends on an axis the grid lacks".into()));
            }
            let mut comp = Vec::new();
            for rate in p.rates() {
                let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
                for w in p.terms.iter().filter(|w| w.rate == rate) {
                    let z = Complex64::from_polar(0.5 * w.amp, w.phase);
                    coeffs[alias_index(w.freq, n, d)] += z;
                    coeffs[alias_index([-w.freq[0], -w.freq[1], -w.freq[2]], n, d)] += z.conj();
                }
                let field = SpectralField::from_components(grid, Rank::Scalar, vec![coeffs])?;
                comp.push((rate, field.to_physical().into_components().remove(0)));
            }
            parts.push(comp);
        }
        Ok(GridSampler { grid: grid.clone(), parts })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Component samples at time `t`.
    pub fn sample(&self, t: f64) -> Vec<Vec<f64>> {
        self.parts
            .iter()
            .map(|comp| {
                let mut out = vec![0.0; self.grid.len()];
                for (rate, vals) in comp {
                    let s = (-rate * t).exp();
                    for (o, v) in out.iter_mut().zip(vals) {
                        *o += s * v;
                    }
                }
                out
            })
            .collect()
    }

    pub fn field(&self, rank: Rank, t: f64) -> Result<PhysicalField> {
        PhysicalField::from_components(&self.grid, rank, self.sample(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_identity() {
        let a = TrigPoly::wave(1.5, [1, 2, 0], 0.3, 1.0);
        let b = TrigPoly::sine(-0.7, [2, -1, 0], 1.1, 0.5);
        let p = a.mul(&b);
        for x in [[0.1, 0.7, 0.0], [0.33, 0.05, 0.0]] {
            let t = 0.4;
            assert!((p.eval(x, t) - a.eval(x, t) * b.eval(x, t)).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let a = TrigPoly::wave(1.0, [1, 3, 0], 0.2, 2.0).add(&TrigPoly::sine(0.5, [2, 0, 1], -0.4, 0.0));
        let x = [0.21, 0.63, 0.4];
        let h = 1e-6;
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fd = (a.eval(xp, 0.3) - a.eval(xm, 0.3)) / (2.0 * h);
            assert!((a.dx(j).eval(x, 0.3) - fd).abs() < 1e-6);
        }
        let fd = (a.eval(x, 0.3 + h) - a.eval(x, 0.3 - h)) / (2.0 * h);
        assert!((a.dt().eval(x, 0.3) - fd).abs() < 1e-7);
    }

    #[test]
    fn poisson_inverse() {
        let r = TrigPoly::wave(2.0, [1, 1, 0], 0.0, 0.0).add(&TrigPoly::wave(1.0, [3, 0, 0], 1.0, 1.0));
        let u = r.solve_poisson(1e-12).unwrap();
        let back = u.laplacian().scale(-1.0);
        let x = [0.3, 0.9, 0.0];
        assert!((back.eval(x, 0.2) - r.eval(x, 0.2)).abs() < 1e-13);
        assert!(TrigPoly::constant(1.0).add(&r).solve_poisson(1e-12).is_err());
    }

    #[test]
    fn cancellation_simplifies() {
        let a = TrigPoly::wave(1.0, [1, 0, 0], 0.5, 0.0);
        assert!(a.add(&a.scale(-1.0)).is_zero());
        // cos(-theta) merges with cos(theta)
        let b = TrigPoly::wave(1.0, [-1, 0, 0], -0.5, 0.0);
        assert_eq!(a.add(&b).terms().len(), 1);
    }

    #[test]
    fn sampler_matches_pointwise() {
        let g = Grid::new(2, 8).unwrap();
        // frequency 6 aliases on n = 8; sampling must still be exact
        let p = TrigPoly::wave(1.0, [6, 1, 0], 0.4, 1.5).add(&TrigPoly::constant(0.25));
        let s = GridSampler::new(&g, std::slice::from_ref(&p)).unwrap();
        let vals = s.sample(0.7);
        for idx in 0..g.len() {
            assert!((vals[0][idx] - p.eval(g.point(idx), 0.7)).abs() < 1e-14);
        }
    }

    #[test]
    fn coefficients_split_resolved_and_outside() {
        let g = Grid::new(2, 8).unwrap();
        let p = TrigPoly::wave(2.0, [1, 0, 0], 0.0, 0.0).add(&TrigPoly::wave(1.0, [5, 0, 0], 0.0, 0.0));
        let (c, outside) = p.coefficients(&g, 0.0);
        assert!((c[1].re - 1.0).abs() < 1e-15);
        assert!((c[7].re - 1.0).abs() < 1e-15);
        // cos(2 pi 5 x): both halves lie outside [-4, 4)
        assert!((outside - 0.5).abs() < 1e-15);
    }
}
