//! Recursive quadrisection with shared edge increments and Newton refinement.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{round_winding, tag_for, FunctionTag, Rectangle, ZeroRecord};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::evaluator::path::Tracker;
use crate::evaluator::{l_jet_estimate, EvalConfig, Target};

/// Largest accepted `|f|` at a refined zero.
pub const RESIDUAL_LIMIT: f64 = 1e-9;

/// Boxes still holding several zeros at this size are recorded as one
/// multiple zero.
const MULTIPLICITY_FLOOR: f64 = 1e-6;

/// Below this size a simple-zero box is accepted even if Newton stalls.
const BISECTION_FLOOR: f64 = 1e-8;

const NEWTON_ITERATIONS: usize = 60;
const SPLIT_RETRIES: usize = 8;

/// Split lines are drawn within this fraction of the side around the middle.
const SPLIT_SPREAD: f64 = 1.0 / 16.0;

type Key = [u64; 4];

fn key(a: Complex64, b: Complex64) -> Key {
    [a.re.to_bits(), a.im.to_bits(), b.re.to_bits(), b.im.to_bits()]
}

/// Isolates and refines zeros of one function, caching argument increments
/// of every segment so that adjacent boxes share their common edges.
pub struct Isolator<'a> {
    chi: &'a DirichletCharacter,
    tag: FunctionTag,
    tracker: Tracker<'a>,
    cfg: EvalConfig,
    tol: f64,
    rng: ChaCha8Rng,
    cache: HashMap<Key, f64>,
}

impl<'a> Isolator<'a> {
    pub fn new(target: Target, chi: &'a DirichletCharacter, tol: f64, cfg: &EvalConfig, seed: u64) -> Result<Self> {
        let tag = tag_for(target)?;
        if !(tol > 0.0) {
            return Err(Error::domain(format!("tolerance {tol} must be positive")));
        }
        Ok(Isolator {
            chi,
            tag,
            tracker: Tracker::new(tag.tracked(), chi, cfg),
            cfg: *cfg,
            tol,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cache: HashMap::new(),
        })
    }

    /// Argument increment of the tracked function from `a` to `b`.
    pub fn increment(&mut self, a: Complex64, b: Complex64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if let Some(&v) = self.cache.get(&key(a, b)) {
            return Ok(v);
        }
        if let Some(&v) = self.cache.get(&key(b, a)) {
            return Ok(-v);
        }
        let v = self.tracker.polyline(&[a, b])?;
        self.cache.insert(key(a, b), v);
        Ok(v)
    }

    /// Records a known increment, e.g. from an earlier pass over the edge.
    pub fn remember(&mut self, a: Complex64, b: Complex64, inc: f64) {
        self.cache.insert(key(a, b), inc);
    }

    fn polygon_winding(&mut self, vertices: &[Complex64]) -> Result<f64> {
        let mut total = 0.0;
        for (i, &a) in vertices.iter().enumerate() {
            let b = vertices[(i + 1) % vertices.len()];
            total += self.increment(a, b)?;
        }
        Ok(total / (2.0 * PI))
    }

    pub fn count(&mut self, rect: &Rectangle) -> Result<u32> {
        round_winding(self.polygon_winding(&rect.corners())?)
    }

    /// Splits `rect` into four boxes whose counts add up to `count`.
    fn quadrisect(&mut self, rect: &Rectangle, count: u32) -> Result<[(Rectangle, u32); 4]> {
        let mut last_err = None;
        for _ in 0..SPLIT_RETRIES {
            let c = rect.center();
            let sigma = c.re + self.rng.random_range(-SPLIT_SPREAD..SPLIT_SPREAD) * rect.width();
            let t = c.im + self.rng.random_range(-SPLIT_SPREAD..SPLIT_SPREAD) * rect.height();
            let parts = rect.split_at(sigma, t);
            let mut counts = [0u32; 4];
            let mut failed = None;
            for (slot, part) in counts.iter_mut().zip(&parts) {
                match self.count(part) {
                    Ok(n) => *slot = n,
                    Err(e) => {
                        failed = Some(e);
                        break;
                    }
                }
            }
            match failed {
                None => {
                    let total: u32 = counts.iter().sum();
                    if total == count {
                        return Ok([
                            (parts[0], counts[0]),
                            (parts[1], counts[1]),
                            (parts[2], counts[2]),
                            (parts[3], counts[3]),
                        ]);
                    }
                    last_err = Some(Error::Additivity {
                        parent: count as i64,
                        children: total as i64,
                    });
                }
                Some(e @ (Error::ZeroOnPath { .. } | Error::NonIntegerWinding { .. })) => last_err = Some(e),
                Some(e) => return Err(e),
            }
        }
        Err(last_err.expect("at least one split attempt"))
    }

    /// `f` and `f'` for Newton's method: `L, L'` or `L', L''`.
    fn newton_pair(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        match self.tag {
            FunctionTag::L => {
                let j = l_jet_estimate(self.chi, z, 1, &self.cfg)?;
                Ok((j.jet.deriv(0), j.jet.deriv(1)))
            }
            FunctionTag::Lprime => {
                let j = l_jet_estimate(self.chi, z, 2, &self.cfg)?;
                Ok((j.jet.deriv(1), j.jet.deriv(2)))
            }
        }
    }

    /// Damped Newton iteration from the box center. Returns the limit and
    /// its residual when it converges inside the box.
    fn newton(&self, rect: &Rectangle, multiplicity: u32) -> Result<Option<(Complex64, f64)>> {
        let radius = 0.5 * rect.width().hypot(rect.height());
        let mut z = rect.center();
        let mut converged = false;
        for _ in 0..NEWTON_ITERATIONS {
            let (f, fp) = self.newton_pair(z)?;
            if f == Complex64::new(0.0, 0.0) {
                converged = true;
                break;
            }
            if !(fp.norm() > 0.0) {
                return Ok(None);
            }
            let mut step = f / fp * multiplicity as f64;
            let len = step.norm();
            if !len.is_finite() {
                return Ok(None);
            }
            if len > radius {
                step *= radius / len;
            }
            z -= step;
            if len <= 1e-2 * self.tol || len <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
                converged = true;
                break;
            }
        }
        let slack = self.tol.max(1e-12 * (1.0 + z.norm()));
        if !converged || !rect.contains(z, slack) {
            return Ok(None);
        }
        let residual = self.newton_pair(z)?.0.norm();
        if residual > RESIDUAL_LIMIT {
            return Ok(None);
        }
        Ok(Some((z, residual)))
    }

    fn record(&self, z: Complex64, multiplicity: u32, residual: f64) -> ZeroRecord {
        ZeroRecord {
            q: self.chi.modulus(),
            chi_index: self.chi.index(),
            function_tag: self.tag,
            beta: z.re,
            gamma: z.im,
            multiplicity,
            residual,
        }
    }

    /// Zeros in `rect`, which is known to hold `count` of them.
    pub fn isolate(&mut self, rect: &Rectangle, count: u32) -> Result<Vec<ZeroRecord>> {
        let mut out = Vec::new();
        let mut stack = vec![(*rect, count)];
        while let Some((r, n)) = stack.pop() {
            if n == 0 {
                continue;
            }
            let size = r.width().max(r.height());
            if n == 1 || size < MULTIPLICITY_FLOOR {
                if let Some((z, residual)) = self.newton(&r, n)? {
                    out.push(self.record(z, n, residual));
                    continue;
                }
                if size < BISECTION_FLOOR || (n > 1 && size < MULTIPLICITY_FLOOR) {
                    let z = r.center();
                    let residual = self.newton_pair(z)?.0.norm();
                    out.push(self.record(z, n, residual));
                    continue;
                }
            }
            for (part, k) in self.quadrisect(&r, n)? {
                if k > 0 {
                    stack.push((part, k));
                }
            }
        }
        Ok(out)
    }
}

/// Zeros of `target` in `rect`, refined to `tol`. The number of records,
/// counted with multiplicity, equals the winding count of `rect`.
pub fn isolate_zeros(
    target: Target,
    chi: &DirichletCharacter,
    rect: &Rectangle,
    tol: f64,
    cfg: &EvalConfig,
) -> Result<Vec<ZeroRecord>> {
    let mut iso = Isolator::new(target, chi, tol, cfg, 0)?;
    let n = iso.count(rect)?;
    let mut zeros = iso.isolate(rect, n)?;
    super::sort_zeros(&mut zeros);
    Ok(zeros)
}
