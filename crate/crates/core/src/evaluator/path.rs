//! Continuous argument tracking along polygonal paths.
//!
//! Each step compares the principal argument of `f(z_new) / f(z_old)` with a
//! trapezoidal prediction from the logarithmic derivative. A step is accepted
//! only when the jump is below `pi/2` and agrees with the prediction; otherwise
//! it is halved. This keeps the unwrapped phase honest near zeros.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{f_logderiv_deriv_raw, f_logderiv_raw, g1_jet_estimate, l_jet_estimate, EvalConfig};
use crate::characters::{smallest_nondividing_prime, DirichletCharacter};
use crate::error::{Error, Result};

/// Below this modulus the tracked function is treated as vanishing.
pub const ZERO_THRESHOLD: f64 = 1e-13;

/// Largest relative error of a sample for its phase to be trusted; samples
/// beyond it are too close to a zero to be resolved.
pub const PHASE_TOLERANCE: f64 = 1e-4;

/// Abscissa of the ray on which the normalized functions are close to 1.
pub const BRANCH_SIGMA: f64 = 30.0;

const MAX_STEP: f64 = 1.0;
const PHASE_PER_STEP: f64 = 0.5;
const PREDICTION_SLACK: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    L,
    LPrime,
    G1,
    FLogDeriv,
}

/// A sample of the tracked function: its value and logarithmic derivative.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub z: Complex64,
    pub value: Complex64,
    pub logderiv: Complex64,
}

/// Evaluates a target and its logarithmic derivative. `LPrime` is evaluated
/// through `G1`, which has the same zeros and is of size about 1 for large
/// `sigma`.
#[derive(Debug, Clone)]
pub struct Tracker<'a> {
    target: Target,
    chi: &'a DirichletCharacter,
    cfg: EvalConfig,
}

impl<'a> Tracker<'a> {
    pub fn new(target: Target, chi: &'a DirichletCharacter, cfg: &EvalConfig) -> Self {
        Tracker {
            target,
            chi,
            cfg: *cfg,
        }
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn sample(&self, z: Complex64) -> Result<Sample> {
        let (value, deriv, err) = match self.target {
            Target::L => {
                let j = l_jet_estimate(self.chi, z, 1, &self.cfg)?;
                (j.jet.deriv(0), j.jet.deriv(1), j.err[0])
            }
            Target::LPrime | Target::G1 => {
                let j = g1_jet_estimate(self.chi, z, &self.cfg)?;
                (j.jet.deriv(0), j.jet.deriv(1), j.err[0])
            }
            Target::FLogDeriv => {
                let q = self.chi.modulus() as f64;
                let k = self.chi.kappa();
                (f_logderiv_raw(q, k, z), f_logderiv_deriv_raw(k, z), 0.0)
            }
        };
        let norm = value.norm();
        if !(norm >= ZERO_THRESHOLD && err <= PHASE_TOLERANCE * norm) {
            return Err(Error::ZeroOnPath { at: z });
        }
        Ok(Sample {
            z,
            value,
            logderiv: deriv / value,
        })
    }

    /// Argument increment of the internally tracked function along the
    /// segment from `start.z` to `end`, returning the sample at `end`.
    pub fn segment(&self, start: Sample, end: Complex64) -> Result<(f64, Sample)> {
        let delta = end - start.z;
        let len = delta.norm();
        if len == 0.0 {
            return Ok((0.0, start));
        }
        let dir = delta / len;
        let mut cur = start;
        let mut pos = 0.0;
        let mut total = 0.0;
        let mut h = step_for(&cur).min(len);
        loop {
            let last = pos + h >= len * (1.0 - 1e-12);
            let z = if last { end } else { start.z + dir * (pos + h) };
            let step = if last { len - pos } else { h };
            let next = self.sample(z)?;
            let jump = (next.value / cur.value).arg();
            let predicted = ((cur.logderiv + next.logderiv) * (dir * (0.5 * step))).im;
            if jump.abs() < FRAC_PI_2 && (jump - predicted).abs() <= PREDICTION_SLACK {
                total += jump;
                cur = next;
                if last {
                    return Ok((total, cur));
                }
                pos += step;
                h = (2.0 * h).min(step_for(&cur));
            } else {
                h = step / 2.0;
                if h < 1e-12 * (1.0 + z.norm()) {
                    return Err(Error::ZeroOnPath { at: z });
                }
            }
        }
    }

    /// Argument increment of the internally tracked function along a
    /// polyline.
    pub fn polyline(&self, path: &[Complex64]) -> Result<f64> {
        let Some((&first, rest)) = path.split_first() else {
            return Ok(0.0);
        };
        let mut cur = self.sample(first)?;
        let mut total = 0.0;
        for &z in rest {
            let (inc, next) = self.segment(cur, z)?;
            total += inc;
            cur = next;
        }
        Ok(total)
    }

    /// Converts an increment of the tracked function into one of the
    /// requested target: `arg L' = arg G1 - t log m + const`.
    fn correction(&self, from: Complex64, to: Complex64) -> f64 {
        match self.target {
            Target::LPrime => {
                let m = smallest_nondividing_prime(self.chi.modulus()) as f64;
                -(to.im - from.im) * m.ln()
            }
            _ => 0.0,
        }
    }

    /// Continuous argument at `z`, in the branch fixed by `arg -> 0` as
    /// `sigma -> +infinity` along the horizontal line through `z`. Only
    /// meaningful for `L` and `G1`.
    pub fn branch_arg(&self, z: Complex64) -> Result<f64> {
        let anchor = Complex64::new(BRANCH_SIGMA.max(z.re), z.im);
        let start = self.sample(anchor)?;
        let (inc, _) = self.segment(start, z)?;
        Ok(start.value.arg() + inc)
    }

    /// Continuous arguments at the points of a horizontal line at height `t`,
    /// given in decreasing `sigma` order, in the `sigma -> +infinity` branch.
    pub fn branch_args_along(&self, t: f64, sigmas_desc: &[f64]) -> Result<Vec<f64>> {
        let top = sigmas_desc.first().copied().unwrap_or(BRANCH_SIGMA);
        let anchor = Complex64::new(BRANCH_SIGMA.max(top), t);
        let mut cur = self.sample(anchor)?;
        let mut arg = cur.value.arg();
        let mut out = Vec::with_capacity(sigmas_desc.len());
        for &sigma in sigmas_desc {
            let (inc, next) = self.segment(cur, Complex64::new(sigma, t))?;
            arg += inc;
            cur = next;
            out.push(arg);
        }
        Ok(out)
    }
}

fn step_for(s: &Sample) -> f64 {
    let rate = s.logderiv.norm();
    if rate > 0.0 {
        (PHASE_PER_STEP / rate).min(MAX_STEP)
    } else {
        MAX_STEP
    }
}

/// Continuous argument increment of `target` along `path`.
pub fn arg_along_path(
    target: Target,
    chi: &DirichletCharacter,
    path: &[Complex64],
    cfg: &EvalConfig,
) -> Result<f64> {
    let tracker = Tracker::new(target, chi, cfg);
    let inc = tracker.polyline(path)?;
    let correction = match (path.first(), path.last()) {
        (Some(&a), Some(&b)) => tracker.correction(a, b),
        _ => 0.0,
    };
    Ok(inc + correction)
}

/// Winding number (not rounded) of `target` around the closed polygon.
pub fn winding(tracker: &Tracker<'_>, vertices: &[Complex64]) -> Result<f64> {
    let mut closed = vertices.to_vec();
    if let Some(&first) = vertices.first() {
        closed.push(first);
    }
    Ok(tracker.polyline(&closed)? / (2.0 * PI))
}
