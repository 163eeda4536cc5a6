//! Littlewood's boundary integral for `G1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::Rectangle;
use crate::characters::DirichletCharacter;
use crate::error::Result;
use crate::evaluator::path::{Sample, Tracker};
use crate::evaluator::{EvalConfig, Target};
use crate::quadrature::integrate_batched;

const QUAD_TOL: f64 = 1e-8;

/// Arguments at the points `(sigma, t)` for `sigmas` ascending, continued
/// leftward from the sample `start` on the same line.
fn args_leftward(tracker: &Tracker<'_>, start: Sample, start_arg: f64, sigmas: &[f64]) -> Result<Vec<f64>> {
    let t = start.z.im;
    let mut out = vec![0.0; sigmas.len()];
    let (mut cur, mut arg) = (start, start_arg);
    for (i, &sigma) in sigmas.iter().enumerate().rev() {
        let (inc, next) = tracker.segment(cur, Complex64::new(sigma, t))?;
        arg += inc;
        cur = next;
        out[i] = arg;
    }
    Ok(out)
}

/// `sum (beta' - sigma_min)` over the zeros of `L'` inside `rect`, computed
/// from boundary values of `G1` alone:
///
/// `2 pi sum = int log|G1| (left) - int log|G1| (right) + int arg G1 (top) - int arg G1 (bottom)`,
///
/// with `arg G1` continuous along the bottom edge, up the right edge and
/// along the top edge.
pub fn littlewood_boundary_sum(chi: &DirichletCharacter, rect: &Rectangle, cfg: &EvalConfig) -> Result<f64> {
    let tracker = Tracker::new(Target::G1, chi, cfg);
    let c = rect.corners();
    let bottom_right = tracker.sample(c[1])?;
    let bottom_arg = tracker.branch_arg(c[1])?;
    let (up, top_right) = tracker.segment(bottom_right, c[2])?;
    let top_arg = bottom_arg + up;

    let tr = &tracker;
    let log_abs = |sigma: f64| {
        move |ts: &[f64]| -> Result<Vec<f64>> {
            ts.iter()
                .map(|&t| Ok(tr.sample(Complex64::new(sigma, t))?.value.norm().ln()))
                .collect()
        }
    };
    let panels_v = rect.height().ceil() as usize;
    let panels_h = rect.width().ceil() as usize;
    let left = integrate_batched(log_abs(rect.sigma_min), rect.t_min, rect.t_max, panels_v, QUAD_TOL)?;
    let right = integrate_batched(log_abs(rect.sigma_max), rect.t_min, rect.t_max, panels_v, QUAD_TOL)?;
    let top = integrate_batched(
        |s: &[f64]| args_leftward(&tracker, top_right, top_arg, s),
        rect.sigma_min,
        rect.sigma_max,
        panels_h,
        QUAD_TOL,
    )?;
    let bottom = integrate_batched(
        |s: &[f64]| args_leftward(&tracker, bottom_right, bottom_arg, s),
        rect.sigma_min,
        rect.sigma_max,
        panels_h,
        QUAD_TOL,
    )?;
    Ok((left - right + top - bottom) / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::character;
    use crate::zerofinder::{isolate_zeros, zero_offset_sum};

    #[test]
    fn empty_rectangle_gives_zero() {
        let chi = character(5, 1).unwrap();
        let rect = Rectangle::new(4.0, 6.0, 3.0, 7.0).unwrap();
        let v = littlewood_boundary_sum(&chi, &rect, &EvalConfig::default()).unwrap();
        assert!(v.abs() < 1e-6, "{v}");
    }

    #[test]
    fn matches_located_zeros() {
        let cfg = EvalConfig::default();
        let chi = character(3, 1).unwrap();
        let rect = Rectangle::new(0.3, 4.0, 2.0, 16.0).unwrap();
        let zeros = isolate_zeros(Target::LPrime, &chi, &rect, 1e-10, &cfg).unwrap();
        assert!(!zeros.is_empty());
        let direct = zero_offset_sum(&zeros, rect.sigma_min);
        let boundary = littlewood_boundary_sum(&chi, &rect, &cfg).unwrap();
        assert!((direct - boundary).abs() < 1e-5, "{direct} {boundary}");
    }
}
