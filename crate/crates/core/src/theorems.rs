//! Main terms of the zero-counting formulas, their acceptance bands, and
//! zero-free region checks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::characters::{smallest_nondividing_prime, DirichletCharacter};
use crate::error::{Error, Result};
use crate::evaluator::Target;
use crate::quadrature::integrate;
use crate::zerofinder::{count_zeros_rect, zero_offset_sum, FunctionTag, Rectangle, ScanConfig, ZeroDatabase, ZeroRecord};

/// `Li(x) = int_2^x dt / log t`.
pub fn li(x: f64) -> Result<f64> {
    if !(x >= 2.0 && x.is_finite()) {
        return Err(Error::domain(format!("Li(x) requires x >= 2, got {x}")));
    }
    if x == 2.0 {
        return Ok(0.0);
    }
    let panels = ((x - 2.0).ln().max(0.0) as usize) + 1;
    integrate(|t| Ok(1.0 / t.ln()), 2.0, x, panels, 1e-12)
}

fn check_height(t: f64) -> Result<()> {
    if !(t >= 2.0 && t.is_finite()) {
        return Err(Error::domain(format!("T = {t} must be at least 2")));
    }
    Ok(())
}

/// `(T/pi) log log(qT/2pi) + (T/pi)((1/2) log m - log log m) - (2/q) Li(qT/2pi)`.
pub fn thm1_main_term(q: u64, m: u64, t: f64) -> Result<f64> {
    check_height(t)?;
    let x = q as f64 * t / (2.0 * PI);
    if x <= std::f64::consts::E {
        return Err(Error::domain(format!("qT/2pi = {x} must exceed e")));
    }
    let mf = m as f64;
    Ok(t / PI * x.ln().ln() + t / PI * (0.5 * mf.ln() - mf.ln().ln()) - 2.0 / q as f64 * li(x)?)
}

/// `(T/pi) log(qT/(2 m pi)) - T/pi`.
pub fn thm2_main_term(q: u64, m: u64, t: f64) -> Result<f64> {
    check_height(t)?;
    Ok(t / PI * (q as f64 * t / (2.0 * m as f64 * PI)).ln() - t / PI)
}

/// `(T/pi) log(qT/2pi) - T/pi`.
pub fn prop_ntchi_main_term(q: u64, t: f64) -> Result<f64> {
    check_height(t)?;
    Ok(t / PI * (q as f64 * t / (2.0 * PI)).ln() - t / PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Statistic {
    #[serde(rename = "N1")]
    N1,
    #[serde(rename = "offset_sum")]
    OffsetSum,
    #[serde(rename = "N")]
    N,
}

impl Statistic {
    pub fn as_str(self) -> &'static str {
        match self {
            Statistic::N1 => "N1",
            Statistic::OffsetSum => "offset_sum",
            Statistic::N => "N",
        }
    }

    pub fn default_c(self) -> f64 {
        match self {
            Statistic::N1 | Statistic::OffsetSum => 5.0,
            Statistic::N => 3.0,
        }
    }

    /// Function whose zeros the statistic is built from.
    pub fn function(self) -> FunctionTag {
        match self {
            Statistic::N => FunctionTag::L,
            _ => FunctionTag::Lprime,
        }
    }

    pub fn main_term(self, q: u64, t: f64) -> Result<f64> {
        let m = smallest_nondividing_prime(q);
        match self {
            Statistic::N1 => thm2_main_term(q, m, t),
            Statistic::OffsetSum => thm1_main_term(q, m, t),
            Statistic::N => prop_ntchi_main_term(q, t),
        }
    }

    /// Allowed `|measured - main|` with engineering constant `c`.
    pub fn band(self, q: u64, t: f64, c: f64) -> Result<f64> {
        check_height(t)?;
        let m = smallest_nondividing_prime(q) as f64;
        let qt = q as f64 * t;
        let ll = qt.ln().ln();
        if !(ll > 0.0) {
            return Err(Error::domain(format!("log log(qT) undefined for qT = {qt}")));
        }
        let sm = m.sqrt();
        let lq = (q as f64).ln();
        Ok(match self {
            Statistic::N1 => c * (sm * qt.ln() / ll.sqrt() + sm * lq),
            Statistic::OffsetSum => c * (sm * ll * ll + m * ll + sm * lq),
            Statistic::N => c * qt.ln() / ll + 2.0,
        })
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N1" => Ok(Statistic::N1),
            "sum" | "offset_sum" => Ok(Statistic::OffsetSum),
            "N" => Ok(Statistic::N),
            other => Err(Error::domain(format!("unknown statistic {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub statistic: Statistic,
    pub q: u64,
    pub chi_index: usize,
    #[serde(rename = "T")]
    pub t: f64,
    pub measured: f64,
    pub main_term: f64,
    pub residual: f64,
    pub band: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(statistic: Statistic, q: u64, chi_index: usize, t: f64, measured: f64, c: f64) -> Result<Self> {
        let main_term = statistic.main_term(q, t)?;
        let band = statistic.band(q, t, c)?;
        let residual = measured - main_term;
        Ok(ResidualReport {
            statistic,
            q,
            chi_index,
            t,
            measured,
            main_term,
            residual,
            band,
            pass: residual.abs() <= band,
        })
    }

    /// `|residual| / main_term`.
    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / self.main_term.abs()
    }
}

fn check_db(chi: &DirichletCharacter, db: &ZeroDatabase, function: FunctionTag) -> Result<()> {
    if db.q != chi.modulus() || db.chi_index != chi.index() || db.function != function {
        return Err(Error::domain(format!(
            "zero database is for q = {}, index {}, {}; expected q = {}, index {}, {}",
            db.q,
            db.chi_index,
            db.function,
            chi.modulus(),
            chi.index(),
            function
        )));
    }
    Ok(())
}

/// Measured value of a statistic at height `t` from a completed scan.
pub fn measure(statistic: Statistic, chi: &DirichletCharacter, t: f64, db: &ZeroDatabase) -> Result<f64> {
    check_db(chi, db, statistic.function())?;
    Ok(match statistic {
        Statistic::N1 | Statistic::N => db.count_within(t)? as f64,
        Statistic::OffsetSum => zero_offset_sum(&db.zeros_within(t)?, 0.5),
    })
}

/// Compares a statistic measured from `db` with its main term.
pub fn verify(statistic: Statistic, chi: &DirichletCharacter, t: f64, db: &ZeroDatabase, c: f64) -> Result<ResidualReport> {
    let measured = measure(statistic, chi, t, db)?;
    ResidualReport::new(statistic, chi.modulus(), chi.index(), t, measured, c)
}

/// `N1(T, chi)` against `(T/pi) log(qT/(2 m pi)) - T/pi`.
pub fn verify_counting(chi: &DirichletCharacter, t: f64, db: &ZeroDatabase, c: f64) -> Result<ResidualReport> {
    verify(Statistic::N1, chi, t, db, c)
}

/// `sum (beta' - 1/2)` against the main term with the `Li` correction.
pub fn verify_offset_sum(chi: &DirichletCharacter, t: f64, db: &ZeroDatabase, c: f64) -> Result<ResidualReport> {
    verify(Statistic::OffsetSum, chi, t, db, c)
}

/// `N(T, chi)` against `(T/pi) log(qT/2pi) - T/pi`.
pub fn verify_n(chi: &DirichletCharacter, t: f64, db: &ZeroDatabase, c: f64) -> Result<ResidualReport> {
    verify(Statistic::N, chi, t, db, c)
}

/// Kendall rank correlation (tau-b) of the pairs `(x_i, y_i)`.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    let (mut concordant, mut discordant, mut ties_x, mut ties_y) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = xs[i].total_cmp(&xs[j]);
            let dy = ys[i].total_cmp(&ys[j]);
            match (dx.is_eq(), dy.is_eq()) {
                (true, true) => {}
                (true, false) => ties_x += 1.0,
                (false, true) => ties_y += 1.0,
                _ if dx == dy => concordant += 1.0,
                _ => discordant += 1.0,
            }
        }
    }
    let denom = ((concordant + discordant + ties_x) * (concordant + discordant + ties_y)).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (concordant - discordant) / denom
    }
}

/// `1 + (m/2)(1 + sqrt(1 + 4/(m log m)))`, right of which `L'` has no zeros.
pub fn zero_free_right_bound(m: u64) -> f64 {
    let mf = m as f64;
    1.0 + 0.5 * mf * (1.0 + (1.0 + 4.0 / (mf * mf.ln())).sqrt())
}

/// Whether every zero lies left of the zero-free bound and of the scanner's
/// cap `1 + 3m/2`.
pub fn check_zero_free_right(chi: &DirichletCharacter, zeros: &[ZeroRecord]) -> bool {
    let m = smallest_nondividing_prime(chi.modulus());
    let bound = zero_free_right_bound(m);
    let cap = 1.0 + 1.5 * m as f64;
    bound <= cap && zeros.iter().all(|z| z.beta <= bound && z.beta < cap)
}

/// Zero counts of `L'` left of the critical line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeftRegionReport {
    pub q: u64,
    pub chi_index: usize,
    pub kappa: u8,
    /// Window actually used (after any widening).
    pub window: f64,
    /// Zeros in `[-3, 0] x [6, window]` and its mirror image.
    pub box_upper: u32,
    pub box_lower: u32,
    /// Zeros in `[1e-6, 1/2 - 1e-6] x [-window, window]`.
    pub strip: u32,
    /// Strip count predicted for this `(kappa, q)`, if any.
    pub expected_strip: Option<u32>,
    pub pass: bool,
}

const JITTER_RETRIES: usize = 8;

/// Counts zeros of `L'` in `rect`, enlarging it by `1e-4 (1 + |t|)`, then by
/// half of that, and so on, when its boundary meets a zero.
fn count_with_jitter(chi: &DirichletCharacter, rect: &Rectangle, cfg: &ScanConfig) -> Result<u32> {
    let eps = 1e-4 * (1.0 + rect.t_min.abs().max(rect.t_max.abs()));
    let mut last = None;
    for k in 0..=JITTER_RETRIES {
        let d = if k == 0 { 0.0 } else { eps / f64::powi(2.0, k as i32 - 1) };
        let r = Rectangle::new(rect.sigma_min - d, rect.sigma_max + d, rect.t_min - d, rect.t_max + d)?;
        match count_zeros_rect(Target::LPrime, chi, &r, &cfg.eval) {
            Ok(n) => return Ok(n),
            Err(e @ Error::ZeroOnPath { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Checks that `L'` has no zeros with `sigma <= 0`, `6 <= |t| <= window`, and
/// counts its zeros in `0 < sigma < 1/2`, `|t| <= window`.
pub fn check_left_halfplane(chi: &DirichletCharacter, window: f64, cfg: &ScanConfig) -> Result<LeftRegionReport> {
    if !(window >= 6.0 && window.is_finite()) {
        return Err(Error::domain(format!("window {window} must be at least 6")));
    }
    if !chi.is_primitive() || chi.is_principal() {
        return Err(Error::domain("a primitive nonprincipal character is required"));
    }
    let q = chi.modulus();
    let kappa = chi.kappa();
    let expected_strip = match (kappa, q) {
        (1, q) if q >= 23 => Some(0),
        (0, q) if q >= 216 => Some(1),
        _ => None,
    };
    let mut window = window;
    let mut attempts = 0;
    loop {
        let box_upper = count_with_jitter(chi, &Rectangle::new(-3.0, 0.0, 6.0, window)?, cfg)?;
        let box_lower = count_with_jitter(chi, &Rectangle::new(-3.0, 0.0, -window, -6.0)?, cfg)?;
        let strip = count_with_jitter(chi, &Rectangle::new(1e-6, 0.5 - 1e-6, -window, window)?, cfg)?;
        if expected_strip == Some(1) && strip == 0 && attempts < 2 {
            attempts += 1;
            window *= 2.0;
            continue;
        }
        let pass = box_upper == 0 && box_lower == 0 && expected_strip.is_none_or(|e| e == strip);
        return Ok(LeftRegionReport {
            q,
            chi_index: chi.index(),
            kappa,
            window,
            box_upper,
            box_lower,
            strip,
            expected_strip,
            pass,
        });
    }
}
