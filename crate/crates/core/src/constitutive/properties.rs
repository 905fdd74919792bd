//! Randomized search for the extremal constants of the structural bounds
//!
//! ```text
//! dS/dD : (B (x) B) >= K1 (1+|D|^2)^((p-2)/2) |B|^2
//! |dS/dD|           <= K2 (1+|D|^2)^((p-2)/2)
//! |dS/dc|           <= K3 (1+|D|^2)^((p-1)/2) log(2+|D|)
//! (S(D1)-S(D2)):(D1-D2) >= K4 (1+|D1|^2+|D2|^2)^((p-2)/2) |D1-D2|^2
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::stress::{frob_sq, operator_norm, quadratic_form, StressModel};
use crate::error::{Error, Result};

/// Sampling ranges for [`check_properties`].
#[derive(Debug, Clone, Copy)]
pub struct SamplingRange {
    pub dim: usize,
    pub strain_min: f64,
    pub strain_max: f64,
    pub conc_min: f64,
    pub conc_max: f64,
}

impl Default for SamplingRange {
    fn default() -> Self {
        SamplingRange { dim: 3, strain_min: 1e-3, strain_max: 1e3, conc_min: -5.0, conc_max: 5.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub property: &'static str,
    pub c: f64,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub b: Vec<f64>,
}

/// Measured extremal ratios. `k1`, `k4` are minima; `k2`, `k3` maxima.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub samples: usize,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub violations: usize,
    pub witness: Option<Witness>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Random symmetric `dim x dim` matrix with Frobenius norm `scale`.
pub fn random_symmetric(rng: &mut impl Rng, dim: usize, scale: f64) -> Vec<f64> {
    let mut m = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v: f64 = rng.gen_range(-1.0..1.0);
            m[i * dim + j] = v;
            m[j * dim + i] = v;
        }
    }
    let norm = frob_sq(&m).sqrt();
    if norm == 0.0 {
        m[0] = scale;
        return m;
    }
    m.iter().map(|x| x * scale / norm).collect()
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

pub fn check_properties(model: &StressModel, n_samples: usize, seed: u64) -> Result<PropertyReport> {
    check_properties_in(model, n_samples, seed, SamplingRange::default())
}

pub fn check_properties_in(
    model: &StressModel,
    n_samples: usize,
    seed: u64,
    range: SamplingRange,
) -> Result<PropertyReport> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let dim = range.dim;
    let m = dim * dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PropertyReport {
        samples: n_samples,
        k1: f64::INFINITY,
        k2: 0.0,
        k3: 0.0,
        k4: f64::INFINITY,
        violations: 0,
        witness: None,
    };

    for _ in 0..n_samples {
        let c = rng.gen_range(range.conc_min..=range.conc_max);
        let s1 = log_uniform(&mut rng, range.strain_min, range.strain_max);
        let d1 = random_symmetric(&mut rng, dim, s1);
        let s2 = log_uniform(&mut rng, range.strain_min, range.strain_max);
        let d2 = random_symmetric(&mut rng, dim, s2);
        let b = random_symmetric(&mut rng, dim, 1.0);
        let p = model.index().eval(c);
        let base1 = 1.0 + frob_sq(&d1);
        let weight = base1.powf(0.5 * (p - 2.0));

        let fail = |report: &mut PropertyReport, property: &'static str| {
            report.violations += 1;
            if report.witness.is_none() {
                report.witness =
                    Some(Witness { property, c, d1: d1.clone(), d2: d2.clone(), b: b.clone() });
            }
        };

        // lower quadratic-form bound
        let jac = model.jacobian_d(c, &d1);
        let q = quadratic_form(&jac, &b) / (weight * frob_sq(&b));
        if q.is_finite() && q > 0.0 {
            report.k1 = report.k1.min(q);
        } else {
            fail(&mut report, "P1 lower bound");
        }

        // operator-norm upper bound
        let r2 = operator_norm(&jac, m) / weight;
        if r2.is_finite() {
            report.k2 = report.k2.max(r2);
        } else {
            fail(&mut report, "P1 operator bound");
        }

        // concentration sensitivity bound
        let dsdc = model.jacobian_c(c, &d1);
        let bound = base1.powf(0.5 * (p - 1.0)) * (2.0 + frob_sq(&d1).sqrt()).ln();
        let r3 = frob_sq(&dsdc.tensor).sqrt() / bound;
        if r3.is_finite() {
            report.k3 = report.k3.max(r3);
        } else {
            fail(&mut report, "P1 concentration bound");
        }

        // monotonicity
        let s1 = model.stress_at(c, &d1);
        let s2 = model.stress_at(c, &d2);
        let diff: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| a - b).collect();
        let inner: f64 = s1.iter().zip(&s2).zip(&diff).map(|((a, b), e)| (a - b) * e).sum();
        let dd = frob_sq(&diff);
        if dd > 0.0 {
            let denom = (base1 + frob_sq(&d2)).powf(0.5 * (p - 2.0)) * dd;
            let r4 = inner / denom;
            if r4.is_finite() && r4 > 0.0 {
                report.k4 = report.k4.min(r4);
            } else {
                fail(&mut report, "P2 monotonicity");
            }
        }
    }
    Ok(report)
}

/// `(S(c,D1) - S(c,D2)) : (D1 - D2)`.
pub fn monotonicity_product(model: &StressModel, c: f64, d1: &[f64], d2: &[f64]) -> f64 {
    let s1 = model.stress_at(c, d1);
    let s2 = model.stress_at(c, d2);
    s1.iter().zip(&s2).zip(d1.iter().zip(d2)).map(|((a, b), (x, y))| (a - b) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::PowerLawIndex;

    #[test]
    fn newtonian_constants() {
        let model = StressModel::newtonian(0.8).unwrap();
        for seed in [1, 2, 99] {
            let r = check_properties(&model, 500, seed).unwrap();
            assert!(r.passed());
            assert!((r.k1 - 1.6).abs() < 1e-12);
            assert!((r.k2 - 1.6).abs() < 1e-12);
            assert!((r.k4 - 1.6).abs() < 1e-12);
            assert_eq!(r.k3, 0.0);
        }
    }

    #[test]
    fn variable_exponent_no_violations() {
        let model = StressModel::new(1.0, PowerLawIndex::tanh_profile(2.0, 3.0, 0.0, 1.0, true).unwrap()).unwrap();
        let r = check_properties(&model, 10_000, 7).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.k4 > 0.0);
        // analytic minimum of the quadratic form: min(1, p-1) * 2 nu0
        assert!(r.k1 >= 2.0 - 1e-9);
    }

    #[test]
    fn shear_thinning_lower_bound() {
        let model = StressModel::new(0.5, PowerLawIndex::affine_clamped(1.4, 1.9, 0.2).unwrap()).unwrap();
        let r = check_properties(&model, 5000, 3).unwrap();
        assert!(r.passed());
        assert!(r.k1 >= (1.4 - 1.0) * 1.0 - 1e-9);
    }

    #[test]
    fn degenerate_pair_is_zero() {
        let model = StressModel::new(1.0, PowerLawIndex::constant(2.5).unwrap()).unwrap();
        let d = [0.3, 0.2, 0.2, -0.1];
        assert_eq!(monotonicity_product(&model, 0.0, &d, &d), 0.0);
    }

    #[test]
    fn rejects_zero_samples() {
        assert!(check_properties(&StressModel::newtonian(1.0).unwrap(), 0, 1).is_err());
    }
}
