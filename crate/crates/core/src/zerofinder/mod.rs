//! Zero location and counting for `L(s, chi)` and `L'(s, chi)` by the
//! argument principle, the statistics `N(T, chi)`, `N1(T, chi)` and
//! `sum (beta' - b)`, and a Littlewood boundary-integral cross-check.

mod isolate;
mod littlewood;
mod scan;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::evaluator::path::Tracker;
use crate::evaluator::{EvalConfig, Target};

pub use isolate::{isolate_zeros, Isolator, RESIDUAL_LIMIT};
pub use littlewood::littlewood_boundary_sum;
pub use scan::{
    count_n, count_n1, scan_l_zeros, scan_lprime_zeros, BandStatus, BandSummary, CountResult, EdgeLevel,
    ScanConfig, Scanner, ZeroDatabase, SLIVER_SIGMA, SLIVER_ZERO_FREE_HEIGHT,
};

/// Largest distance of a pre-rounding winding from an integer that is still
/// rounded.
pub const WINDING_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionTag {
    L,
    Lprime,
}

impl FunctionTag {
    /// The function whose argument is tracked for this tag.
    pub fn tracked(self) -> Target {
        match self {
            FunctionTag::L => Target::L,
            FunctionTag::Lprime => Target::G1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionTag::L => "L",
            FunctionTag::Lprime => "Lprime",
        }
    }
}

impl std::fmt::Display for FunctionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FunctionTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" => Ok(FunctionTag::L),
            "Lprime" | "L'" => Ok(FunctionTag::Lprime),
            other => Err(Error::domain(format!("unknown function tag {other:?}"))),
        }
    }
}

fn tag_for(target: Target) -> Result<FunctionTag> {
    match target {
        Target::L => Ok(FunctionTag::L),
        Target::LPrime | Target::G1 => Ok(FunctionTag::Lprime),
        Target::FLogDeriv => Err(Error::domain("zeros of F'/F are not supported")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub q: u64,
    pub chi_index: usize,
    #[serde(rename = "fn")]
    pub function_tag: FunctionTag,
    pub beta: f64,
    pub gamma: f64,
    pub multiplicity: u32,
    pub residual: f64,
}

impl ZeroRecord {
    pub fn point(&self) -> Complex64 {
        Complex64::new(self.beta, self.gamma)
    }

    /// Checks the record invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.gamma.is_finite()) {
            return Err(Error::domain("non-finite zero coordinates"));
        }
        if self.multiplicity < 1 {
            return Err(Error::domain("multiplicity must be at least 1"));
        }
        if !(self.residual >= 0.0 && self.residual <= RESIDUAL_LIMIT) {
            return Err(Error::domain(format!(
                "residual {:e} exceeds {RESIDUAL_LIMIT:e}",
                self.residual
            )));
        }
        Ok(())
    }
}

/// Orders records by `(gamma, beta)`.
pub fn sort_zeros(zeros: &mut [ZeroRecord]) {
    zeros.sort_by(|a, b| a.gamma.total_cmp(&b.gamma).then(a.beta.total_cmp(&b.beta)));
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Rectangle {
    pub fn new(sigma_min: f64, sigma_max: f64, t_min: f64, t_max: f64) -> Result<Self> {
        let finite = [sigma_min, sigma_max, t_min, t_max].iter().all(|v| v.is_finite());
        if !finite || sigma_min >= sigma_max || t_min >= t_max {
            return Err(Error::domain(format!(
                "invalid rectangle [{sigma_min}, {sigma_max}] x [{t_min}, {t_max}]"
            )));
        }
        Ok(Rectangle {
            sigma_min,
            sigma_max,
            t_min,
            t_max,
        })
    }

    /// Corners counterclockwise from the bottom left.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.sigma_min, self.t_min),
            Complex64::new(self.sigma_max, self.t_min),
            Complex64::new(self.sigma_max, self.t_max),
            Complex64::new(self.sigma_min, self.t_max),
        ]
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.sigma_min + self.sigma_max),
            0.5 * (self.t_min + self.t_max),
        )
    }

    pub fn width(&self) -> f64 {
        self.sigma_max - self.sigma_min
    }

    pub fn height(&self) -> f64 {
        self.t_max - self.t_min
    }

    /// Whether `z` lies in the rectangle enlarged by `slack` on every side.
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.sigma_min - slack
            && z.re <= self.sigma_max + slack
            && z.im >= self.t_min - slack
            && z.im <= self.t_max + slack
    }

    /// Splits at `(sigma, t)` into bottom-left, bottom-right, top-right and
    /// top-left parts.
    pub fn split_at(&self, sigma: f64, t: f64) -> [Rectangle; 4] {
        [
            Rectangle { sigma_max: sigma, t_max: t, ..*self },
            Rectangle { sigma_min: sigma, t_max: t, ..*self },
            Rectangle { sigma_min: sigma, t_min: t, ..*self },
            Rectangle { sigma_max: sigma, t_min: t, ..*self },
        ]
    }
}

/// Rounds a winding, failing when it is not close to a nonnegative integer.
pub fn round_winding(value: f64) -> Result<u32> {
    let n = value.round();
    if (value - n).abs() > WINDING_TOLERANCE || n < 0.0 {
        return Err(Error::NonIntegerWinding {
            value,
            tolerance: WINDING_TOLERANCE,
        });
    }
    Ok(n as u32)
}

/// Winding of the tracked target around `rect`, before rounding.
pub fn winding_value(target: Target, chi: &DirichletCharacter, rect: &Rectangle, cfg: &EvalConfig) -> Result<f64> {
    let tracked = tag_for(target)?.tracked();
    let tracker = Tracker::new(tracked, chi, cfg);
    let c = rect.corners();
    Ok(tracker.polyline(&[c[0], c[1], c[2], c[3], c[0]])? / (2.0 * PI))
}

/// Number of zeros of `target` inside `rect`, with multiplicity.
pub fn count_zeros_rect(target: Target, chi: &DirichletCharacter, rect: &Rectangle, cfg: &EvalConfig) -> Result<u32> {
    round_winding(winding_value(target, chi, rect, cfg)?)
}

/// `sum multiplicity * (beta - b)`.
pub fn zero_offset_sum(zeros: &[ZeroRecord], b: f64) -> f64 {
    zeros.iter().map(|z| z.multiplicity as f64 * (z.beta - b)).sum()
}
