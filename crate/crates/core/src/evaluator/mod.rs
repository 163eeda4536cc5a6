//! Evaluation of Hurwitz zeta, `L(s, chi)` and its derivatives, the
//! functional-equation factor `F(s, chi)`, its logarithmic derivative, and
//! the normalized derivative `G1(s, chi)`.
//!
//! All values carry an absolute error estimate. A value is accepted when the
//! estimate is at most `target_abs_error * max(1, |value|)`; beyond that the
//! evaluation fails with [`Error::Accuracy`].
//!
//! A logarithm of `epsilon(chi)` is never exposed: arguments of `L`, `L'`,
//! `G1` and `F'/F` are obtained by continuous tracking along paths (see
//! [`path`]), starting from `sigma = 30` where the normalized series are
//! close to 1.

mod hurwitz;
pub mod jet;
pub mod path;
pub mod special;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{smallest_nondividing_prime, DirichletCharacter};
use crate::error::{Error, Result};
use crate::zerofinder::{FunctionTag, ZeroRecord};
use hurwitz::hurwitz_regular;
use jet::Jet;

pub use path::{arg_along_path, Target};

/// Number of times the Euler–Maclaurin shift may be doubled before giving up.
const MAX_DOUBLINGS: usize = 6;

/// Largest number of terms used when `G1` is summed as a Dirichlet series.
const MAX_DIRECT_TERMS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Minimum number of directly summed terms. The effective shift is the
    /// larger of this and `max(50, ceil(1.3 |t|) + 20)`.
    pub shift: Option<usize>,
    /// Number of Bernoulli correction terms, within `[5, 30]`.
    pub bernoulli_terms: usize,
    pub target_abs_error: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            shift: None,
            bernoulli_terms: 12,
            target_abs_error: 1e-10,
        }
    }
}

impl EvalConfig {
    pub fn with_target(target_abs_error: f64) -> Self {
        EvalConfig {
            target_abs_error,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(5..=30).contains(&self.bernoulli_terms) {
            return Err(Error::domain(format!(
                "bernoulli_terms = {} outside [5, 30]",
                self.bernoulli_terms
            )));
        }
        if !(1e-14..=1e-6).contains(&self.target_abs_error) {
            return Err(Error::domain(format!(
                "target_abs_error = {:e} outside [1e-14, 1e-6]",
                self.target_abs_error
            )));
        }
        Ok(())
    }

    /// Effective Euler–Maclaurin shift at height `t`.
    pub fn shift_for(&self, t: f64) -> usize {
        let adaptive = 50usize.max((1.3 * t.abs()).ceil() as usize + 20);
        adaptive.max(self.shift.unwrap_or(0))
    }

    fn accepts(&self, value: f64, bound: f64) -> bool {
        bound <= self.target_abs_error * value.max(1.0)
    }
}

/// A complex value with an estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub abs_error_bound: f64,
}

impl ComplexValue {
    pub fn new(value: Complex64, abs_error_bound: f64) -> Self {
        ComplexValue {
            re: value.re,
            im: value.im,
            abs_error_bound,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.value().norm()
    }
}

fn check_deriv(deriv: usize) -> Result<()> {
    if deriv > 2 {
        return Err(Error::domain(format!("derivative order {deriv} not in 0..=2")));
    }
    Ok(())
}

/// `d^deriv/ds^deriv zeta(s, a)` for `a` in `(0, 1]`.
pub fn hurwitz_zeta(s: Complex64, a: f64, deriv: usize, cfg: &EvalConfig) -> Result<ComplexValue> {
    cfg.validate()?;
    check_deriv(deriv)?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::domain(format!("Hurwitz parameter a = {a} outside (0, 1]")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole(s));
    }
    let pole = Jet::pole(s);
    let mut n = cfg.shift_for(s.im);
    let mut raw = hurwitz_regular(s, a, n, cfg.bernoulli_terms);
    for _ in 0..MAX_DOUBLINGS {
        let v = (raw.jet + pole).deriv(deriv).norm();
        if cfg.accepts(v, 2.0 * raw.trunc[deriv]) {
            break;
        }
        n *= 2;
        raw = hurwitz_regular(s, a, n, cfg.bernoulli_terms);
    }
    let value = (raw.jet + pole).deriv(deriv);
    let bound = raw.trunc[deriv] + raw.round[deriv];
    if !cfg.accepts(value.norm(), bound) {
        return Err(Error::Accuracy {
            achieved: bound,
            target: cfg.target_abs_error,
        });
    }
    Ok(ComplexValue::new(value, bound))
}

/// A second-order jet with per-order absolute error estimates.
#[derive(Debug, Clone, Copy)]
pub struct ErrJet {
    pub jet: Jet,
    pub err: [f64; 3],
}

impl ErrJet {
    fn pick(&self, d: usize) -> ComplexValue {
        ComplexValue::new(self.jet.deriv(d), self.err[d])
    }
}

/// Jet of `L(s, chi)` through order 2, accuracy-checked up to `order`.
pub fn l_jet(chi: &DirichletCharacter, s: Complex64, order: usize, cfg: &EvalConfig) -> Result<ErrJet> {
    let out = l_jet_estimate(chi, s, order, cfg)?;
    check_orders(&out, order, cfg)?;
    Ok(out)
}

fn check_orders(out: &ErrJet, order: usize, cfg: &EvalConfig) -> Result<()> {
    for d in 0..=order {
        if !cfg.accepts(out.jet.deriv(d).norm(), out.err[d]) {
            return Err(Error::Accuracy {
                achieved: out.err[d],
                target: cfg.target_abs_error,
            });
        }
    }
    Ok(())
}

/// As [`l_jet`], but returns the best estimate with its error bound even when
/// the bound misses the target.
pub(crate) fn l_jet_estimate(
    chi: &DirichletCharacter,
    s: Complex64,
    order: usize,
    cfg: &EvalConfig,
) -> Result<ErrJet> {
    cfg.validate()?;
    check_deriv(order)?;
    if chi.is_principal() {
        return Err(Error::domain("L(s, chi) requires a nonprincipal character"));
    }
    let q = chi.modulus();
    let qf = q as f64;
    let ln_q = qf.ln();
    let q_pow = Jet::power((-s * ln_q).exp(), ln_q);
    let q_abs = q_pow.value().norm();

    let compute = |n: usize| {
        let mut sum = Jet::ZERO;
        let mut trunc = [0.0; 3];
        let mut round_sq = [0.0; 3];
        for a in 1..q {
            let c = chi.eval(a as i64);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let raw = hurwitz_regular(s, a as f64 / qf, n, cfg.bernoulli_terms);
            sum += raw.jet.scale(c);
            for d in 0..3 {
                trunc[d] += raw.trunc[d];
                round_sq[d] += raw.round[d] * raw.round[d];
            }
        }
        // The 1/(s - 1) pole parts cancel because sum_a chi(a) = 0.
        let value = q_pow * sum;
        let combine = |e: [f64; 3]| {
            let mut out = [0.0; 3];
            for (d, slot) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..=d {
                    let binom = if j == 0 || j == d { 1.0 } else { 2.0 };
                    acc += binom * ln_q.powi((d - j) as i32) * e[j];
                }
                *slot = q_abs * acc;
            }
            out
        };
        let round = round_sq.map(f64::sqrt);
        (value, combine(trunc), combine(round))
    };

    let mut n = cfg.shift_for(s.im);
    let (mut value, mut trunc, mut round) = compute(n);
    for _ in 0..MAX_DOUBLINGS {
        let ok = (0..=order).all(|d| cfg.accepts(value.deriv(d).norm(), 2.0 * trunc[d]));
        if ok {
            break;
        }
        n *= 2;
        (value, trunc, round) = compute(n);
    }
    let err = [trunc[0] + round[0], trunc[1] + round[1], trunc[2] + round[2]];
    Ok(ErrJet { jet: value, err })
}

/// `L^{(deriv)}(s, chi)` for nonprincipal `chi`.
pub fn l_value(
    chi: &DirichletCharacter,
    s: Complex64,
    deriv: usize,
    cfg: &EvalConfig,
) -> Result<ComplexValue> {
    Ok(l_jet(chi, s, deriv, cfg)?.pick(deriv))
}

fn require_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_primitive() || chi.is_principal() {
        return Err(Error::domain(format!(
            "primitive nonprincipal character required (q = {}, index {})",
            chi.modulus(),
            chi.index()
        )));
    }
    Ok(())
}

/// `F(s, chi) = eps(chi) 2^s pi^{s-1} q^{1/2-s} sin(pi (s + kappa) / 2) Gamma(1 - s)`,
/// so that `L(s, chi) = F(s, chi) L(1 - s, conj chi)`.
pub fn f_factor(chi: &DirichletCharacter, s: Complex64) -> Result<ComplexValue> {
    require_primitive(chi)?;
    if s.im == 0.0 && s.re >= 1.0 && s.re.fract() == 0.0 {
        return Err(Error::domain(format!("F(s, chi) undefined at s = {s}")));
    }
    let eps = chi.root_number()?;
    let q = chi.modulus() as f64;
    let kappa = chi.kappa() as f64;
    let log_f = s * 2f64.ln() + (s - 1.0) * PI.ln() + (0.5 - s) * q.ln()
        + special::log_sin((s + kappa) * (PI / 2.0))
        + special::ln_gamma(1.0 - s);
    let value = eps * log_f.exp();
    // Rounding in log F is amplified by exponentiation.
    let bound = value.norm() * 16.0 * f64::EPSILON * (log_f.norm() + s.norm() + 10.0);
    Ok(ComplexValue::new(value, bound))
}

/// How `F'/F` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogDerivMode {
    /// Exact: `log 2 pi - log q + (pi/2) cot(pi (s + kappa) / 2) - psi(1 - s)`.
    Direct,
    /// `-log(q (1 - s)) + log 2 pi -+ pi i / 2 + 1 / (2 (1 - s))`.
    Asymptotic,
}

fn f_logderiv_raw(q: f64, kappa: u8, s: Complex64) -> Complex64 {
    let k = kappa as f64;
    (2.0 * PI).ln() - q.ln() + (PI / 2.0) * special::cot((s + k) * (PI / 2.0))
        - special::digamma(1.0 - s)
}

/// `d/ds (F'/F)(s, chi)`.
fn f_logderiv_deriv_raw(kappa: u8, s: Complex64) -> Complex64 {
    let k = kappa as f64;
    -(PI * PI / 4.0) * special::csc2((s + k) * (PI / 2.0)) + special::trigamma(1.0 - s)
}

/// `(F'/F)(s, chi)` for `Re s < 1`, `|Im s| > 1`.
pub fn f_logderiv(chi: &DirichletCharacter, s: Complex64, mode: LogDerivMode) -> Result<ComplexValue> {
    if !(s.re < 1.0 && s.im.abs() > 1.0) {
        return Err(Error::domain(format!(
            "F'/F requires Re(s) < 1 and |Im(s)| > 1, got s = {s}"
        )));
    }
    let q = chi.modulus() as f64;
    let value = match mode {
        LogDerivMode::Direct => f_logderiv_raw(q, chi.kappa(), s),
        LogDerivMode::Asymptotic => {
            let w = 1.0 - s;
            let sign = if s.im > 0.0 { -1.0 } else { 1.0 };
            -(w * q).ln() + (2.0 * PI).ln() + Complex64::new(0.0, sign * PI / 2.0) + 0.5 / w
        }
    };
    Ok(ComplexValue::new(value, 64.0 * f64::EPSILON * (value.norm() + 1.0)))
}

/// Number of Dirichlet-series terms needed for `G1` at abscissa `sigma`, if
/// the direct series is affordable.
fn g1_direct_terms(m: u64, sigma: f64, tol: f64) -> Option<usize> {
    if sigma <= 2.0 {
        return None;
    }
    let mf = m as f64;
    let prefactor = mf.powf(sigma) / mf.ln();
    let mut k = (2 * m) as usize;
    while k <= MAX_DIRECT_TERMS {
        let kf = k as f64;
        let lk = kf.ln();
        let tail = prefactor * kf.powf(1.0 - sigma) * (lk / (sigma - 1.0) + 1.0 / (sigma - 1.0).powi(2))
            * (1.0 + lk).powi(2);
        if tail <= tol {
            return Some(k);
        }
        k *= 2;
    }
    None
}

/// Jet of `G1(s, chi) = -m^s / (chi(m) log m) L'(s, chi)`, accurate through
/// first order.
pub fn g1_jet(chi: &DirichletCharacter, s: Complex64, cfg: &EvalConfig) -> Result<ErrJet> {
    let out = g1_jet_estimate(chi, s, cfg)?;
    check_orders(&out, 0, cfg)?;
    Ok(out)
}

pub(crate) fn g1_jet_estimate(chi: &DirichletCharacter, s: Complex64, cfg: &EvalConfig) -> Result<ErrJet> {
    cfg.validate()?;
    if chi.is_principal() {
        return Err(Error::domain("G1 requires a nonprincipal character"));
    }
    let q = chi.modulus();
    let m = smallest_nondividing_prime(q);
    let ln_m = (m as f64).ln();
    let chi_m = chi.eval(m as i64);
    let chi_m_bar = chi_m.conj();

    if let Some(k) = g1_direct_terms(m, s.re, cfg.target_abs_error * 1e-2) {
        // G1 = sum_{n >= m} chi(n) conj(chi(m)) (log n / log m) (n/m)^{-s};
        // every 1 < n < m shares a prime factor with q.
        let mut jet = Jet::ZERO;
        let mut mags = [0.0; 3];
        for n in m as usize..=k {
            let c = chi.eval(n as i64);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let ratio_ln = (n as f64 / m as f64).ln();
            let v = (-s * ratio_ln).exp();
            let w = (n as f64).ln() / ln_m;
            let term = Jet::power(v, ratio_ln).scale(c * chi_m_bar * w);
            let tn = term.norms();
            for d in 0..3 {
                mags[d] += tn[d];
            }
            jet += term;
        }
        let tail = cfg.target_abs_error * 1e-2;
        let err = [
            tail + 4.0 * f64::EPSILON * mags[0],
            tail + 4.0 * f64::EPSILON * mags[1],
            tail + 4.0 * f64::EPSILON * mags[2],
        ];
        return Ok(ErrJet { jet, err });
    }

    let l = l_jet_estimate(chi, s, 2, cfg)?;
    let a = -(s * ln_m).exp() / (chi_m * ln_m);
    let a_abs = a.norm();
    let g0 = a * l.jet.deriv(1);
    let g1 = a * (l.jet.deriv(1) * ln_m + l.jet.deriv(2));
    let err0 = a_abs * l.err[1];
    let err1 = a_abs * (ln_m * l.err[1] + l.err[2]);
    Ok(ErrJet {
        jet: Jet([g0, g1, Complex64::new(f64::NAN, f64::NAN)]),
        err: [err0, err1, f64::INFINITY],
    })
}

/// `G1(s, chi)`; shares its zeros with `L'(s, chi)`.
pub fn g1_value(chi: &DirichletCharacter, s: Complex64, cfg: &EvalConfig) -> Result<ComplexValue> {
    Ok(g1_jet(chi, s, cfg)?.pick(0))
}

/// `(L'/L)(s, chi) - sum 1/(s - rho)` over the supplied `L`-zeros with
/// `|gamma - t| <= 1`, for `-1 <= Re s <= 2`.
pub fn logderiv_zero_sum_residual(
    chi: &DirichletCharacter,
    s: Complex64,
    zeros: &[ZeroRecord],
    cfg: &EvalConfig,
) -> Result<ComplexValue> {
    if !(-1.0..=2.0).contains(&s.re) {
        return Err(Error::domain(format!("Re(s) = {} outside [-1, 2]", s.re)));
    }
    let l = l_jet(chi, s, 1, cfg)?;
    let ratio = l.jet.deriv(1) / l.jet.deriv(0);
    let mut sum = Complex64::new(0.0, 0.0);
    for z in zeros
        .iter()
        .filter(|z| z.function_tag == FunctionTag::L && (z.gamma - s.im).abs() <= 1.0)
    {
        let rho = Complex64::new(z.beta, z.gamma);
        if rho == s {
            return Err(Error::domain(format!("s = {s} coincides with a supplied zero")));
        }
        sum += (z.multiplicity as f64) / (s - rho);
    }
    let l0 = l.jet.deriv(0).norm();
    let bound = (l.err[1] + ratio.norm() * l.err[0]) / l0;
    Ok(ComplexValue::new(ratio - sum, bound))
}
