//! Substitution oracle for the manufactured solutions.
//!
//! The exact fields are re-evaluated here in nested dual-number arithmetic,
//! which yields first and second derivatives to roundoff without finite
//! differences, and the stress is rebuilt from its closed form. The PDE
//! residuals at random space-time points must then vanish.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crfs::constitutive::ExponentProfile;
use crfs::scenarios::{make_manufactured, CaseId, ManufacturedCase, ManufacturedParams, TrigPoly};

trait Num:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn lift(x: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn cos(self) -> Self;
    fn sin(self) -> Self;
    fn tanh(self) -> Self;
}

impl Num for f64 {
    fn lift(x: f64) -> Self {
        x
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
}

/// `a + b eps` with `eps^2 = 0`.
#[derive(Clone, Copy, Debug)]
struct Dual<T> {
    a: T,
    b: T,
}

impl<T: Num> Dual<T> {
    fn var(a: T, b: T) -> Self {
        Dual { a, b }
    }
}

impl<T: Num> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual { a: self.a + o.a, b: self.b + o.b }
    }
}

impl<T: Num> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual { a: self.a - o.a, b: self.b - o.b }
    }
}

impl<T: Num> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual { a: self.a * o.a, b: self.a * o.b + self.b * o.a }
    }
}

impl<T: Num> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Dual { a: self.a / o.a, b: (self.b * o.a - self.a * o.b) / (o.a * o.a) }
    }
}

impl<T: Num> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { a: -self.a, b: -self.b }
    }
}

impl<T: Num> Num for Dual<T> {
    fn lift(x: f64) -> Self {
        Dual { a: T::lift(x), b: T::lift(0.0) }
    }
    fn exp(self) -> Self {
        let e = self.a.exp();
        Dual { a: e, b: self.b * e }
    }
    fn ln(self) -> Self {
        Dual { a: self.a.ln(), b: self.b / self.a }
    }
    fn cos(self) -> Self {
        Dual { a: self.a.cos(), b: -(self.b * self.a.sin()) }
    }
    fn sin(self) -> Self {
        Dual { a: self.a.sin(), b: self.b * self.a.cos() }
    }
    fn tanh(self) -> Self {
        let t = self.a.tanh();
        Dual { a: t, b: self.b * (T::lift(1.0) - t * t) }
    }
}

type D1 = Dual<f64>;
type D2 = Dual<D1>;

fn eval<T: Num>(p: &TrigPoly, x: [T; 3], t: T) -> T {
    let mut acc = T::lift(0.0);
    for w in p.terms() {
        let arg = (0..3).fold(T::lift(w.phase), |s, i| s + T::lift(2.0 * PI * w.freq[i] as f64) * x[i]);
        acc = acc + T::lift(w.amp) * (T::lift(-w.rate) * t).exp() * arg.cos();
    }
    acc
}

fn d1_point(x: [f64; 3], dir: Option<usize>) -> [D1; 3] {
    std::array::from_fn(|m| D1::var(x[m], if Some(m) == dir { 1.0 } else { 0.0 }))
}

/// First derivative of `p` along axis `j`.
fn partial(p: &TrigPoly, x: [f64; 3], t: f64, j: usize) -> f64 {
    eval(p, d1_point(x, Some(j)), D1::lift(t)).b
}

fn time_derivative(p: &TrigPoly, x: [f64; 3], t: f64) -> f64 {
    eval(p, d1_point(x, None), D1::var(t, 1.0)).b
}

/// `(d_k p, d_j d_k p)` carried as a dual number in the `j` direction.
fn gradient_along(p: &TrigPoly, x: [f64; 3], t: f64, j: usize, k: usize) -> D1 {
    let pt: [D2; 3] = std::array::from_fn(|m| {
        let inner = D1::var(x[m], if m == k { 1.0 } else { 0.0 });
        let outer = D1::var(if m == j { 1.0 } else { 0.0 }, 0.0);
        D2::var(inner, outer)
    });
    let r = eval(p, pt, D2::lift(t));
    D1::var(r.a.b, r.b.b)
}

/// Exponent and stress written out from their definitions.
fn exponent(params: &ManufacturedParams, c: D1) -> D1 {
    let idx = params.index;
    let (pm, pp) = (idx.p_minus(), idx.p_plus());
    match idx.profile() {
        ExponentProfile::Constant => D1::lift(pm),
        ExponentProfile::Tanh { center, width, decreasing } => {
            let s = ((c - D1::lift(center)) / D1::lift(width)).tanh();
            let sign = if decreasing { -1.0 } else { 1.0 };
            let p = D1::lift(0.5 * (pm + pp)) + D1::lift(sign * 0.5 * (pp - pm)) * s;
            assert!(p.a > pm && p.a < pp, "sample on the clamp");
            p
        }
        other => panic!("profile {other:?} not covered by the oracle"),
    }
}

/// `div S(c, Dv)` at `x`, one component per row.
fn stress_divergence(case: &ManufacturedCase, x: [f64; 3], t: f64) -> Vec<f64> {
    let d = case.dim();
    let params = case.params();
    let mut out = vec![0.0; d];
    for j in 0..d {
        let grad: Vec<D1> = (0..d * d).map(|ik| gradient_along(&case.velocity()[ik / d], x, t, j, ik % d)).collect();
        let strain: Vec<D1> =
            (0..d * d).map(|ik| D1::lift(0.5) * (grad[ik] + grad[(ik % d) * d + ik / d])).collect();
        let c = eval(case.concentration(), d1_point(x, Some(j)), D1::lift(t));
        let norm_sq = strain.iter().fold(D1::lift(0.0), |s, &e| s + e * e);
        let p = exponent(params, c);
        let visc = D1::lift(2.0 * params.nu0)
            * ((p - D1::lift(2.0)) * D1::lift(0.5) * (D1::lift(1.0) + norm_sq).ln()).exp();
        for (i, o) in out.iter_mut().enumerate() {
            *o += (visc * strain[i * d + j]).b;
        }
    }
    out
}

struct Residuals {
    momentum: f64,
    concentration: f64,
    source: f64,
    divergence: f64,
}

fn residuals(case: &ManufacturedCase, x: [f64; 3], t: f64) -> Residuals {
    let d = case.dim();
    let v = case.velocity();
    let c = case.concentration();
    let vx: Vec<f64> = v.iter().map(|p| eval(p, x, t)).collect();
    let f = case.momentum_forcing_at(x, t);
    let div_s = stress_divergence(case, x, t);
    let mut momentum: f64 = 0.0;
    for i in 0..d {
        let conv: f64 = (0..d).map(|j| vx[j] * partial(&v[i], x, t, j)).sum();
        let r = time_derivative(&v[i], x, t) + conv + partial(case.pressure(), x, t, i) - div_s[i] - f[i];
        momentum = momentum.max(r.abs());
    }
    let div_cv: f64 = (0..d)
        .map(|j| {
            let pt = d1_point(x, Some(j));
            (eval(c, pt, D1::lift(t)) * eval(&v[j], pt, D1::lift(t))).b
        })
        .sum();
    let lap_c: f64 = (0..d).map(|j| gradient_along(c, x, t, j, j).b).sum();
    let div_g: f64 = (0..d).map(|j| partial(&case.flux()[j], x, t, j)).sum();
    let divergence: f64 = (0..d).map(|j| partial(&v[j], x, t, j)).sum();
    let concentration = time_derivative(c, x, t) + div_cv - lap_c + div_g;
    Residuals {
        momentum,
        concentration: concentration.abs(),
        source: (case.source_at(x, t) + div_g).abs(),
        divergence: divergence.abs(),
    }
}

fn check_case(case: &ManufacturedCase, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let mut x = [0.0; 3];
        for xi in x.iter_mut().take(case.dim()) {
            *xi = rng.gen_range(0.0..1.0);
        }
        let t = rng.gen_range(0.0..0.5);
        let r = residuals(case, x, t);
        assert!(r.momentum <= 1e-10, "{:?} momentum residual {:e} at {x:?}, t = {t}", case.id(), r.momentum);
        assert!(r.concentration <= 1e-10, "{:?} concentration residual {:e}", case.id(), r.concentration);
        assert!(r.source <= 1e-10, "{:?} source and flux disagree by {:e}", case.id(), r.source);
        assert!(r.divergence <= 1e-12, "{:?} divergence {:e}", case.id(), r.divergence);
    }
}

#[test]
fn decaying_mode_2d_satisfies_the_equations() {
    let id = CaseId::DecayingMode2d;
    check_case(&make_manufactured(id, ManufacturedParams::default_for(id)).unwrap(), 1);
}

#[test]
fn decaying_mode_3d_satisfies_the_equations() {
    let id = CaseId::DecayingMode3d;
    check_case(&make_manufactured(id, ManufacturedParams::default_for(id)).unwrap(), 2);
}

#[test]
fn steady_shear_satisfies_the_equations() {
    let id = CaseId::SteadyShear2d;
    check_case(&make_manufactured(id, ManufacturedParams::default_for(id)).unwrap(), 3);
}

#[test]
fn taylor_green_satisfies_the_equations() {
    let case = make_manufactured(CaseId::DecayingMode2d, ManufacturedParams::taylor_green(0.05, 1.0)).unwrap();
    check_case(&case, 4);
}

#[test]
fn strongly_shear_thickening_case_satisfies_the_equations() {
    let id = CaseId::DecayingMode2d;
    let mut params = ManufacturedParams::default_for(id);
    params.amplitude = 2.0;
    params.index = crfs::constitutive::PowerLawIndex::tanh_profile(1.6, 3.5, 0.4, 0.2, false).unwrap();
    check_case(&make_manufactured(id, params).unwrap(), 5);
}

#[test]
fn zero_amplitude_case_is_exact_on_any_grid() {
    let id = CaseId::DecayingMode2d;
    let mut params = ManufacturedParams::default_for(id);
    params.amplitude = 0.0;
    params.conc_amplitude = 0.0;
    let case = make_manufactured(id, params).unwrap();
    let out = crfs::scenarios::run_manufactured(&case, 16, 1e-3, 0.05, &crfs::scenarios::StudySetup::default()).unwrap();
    assert_eq!((out.err_v, out.err_c), (0.0, 0.0));
}
