//! Composite Gauss–Legendre quadrature with panel halving.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Number of nodes per panel.
pub const NODES: usize = 16;

const MAX_REFINEMENTS: usize = 200;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES))
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    /// Sum of the estimates on the two halves.
    value: f64,
    /// Difference between the whole-panel estimate and `value`.
    diff: f64,
}

/// Estimates of the rule on each `(a, b)` interval, with one call of `f`.
fn estimate_all<F>(f: &mut F, intervals: &[(f64, f64)]) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut tagged = Vec::with_capacity(intervals.len() * NODES);
    for (i, &(a, b)) in intervals.iter().enumerate() {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, w) in rule() {
            tagged.push((mid + half * x, half * w, i));
        }
    }
    tagged.sort_by(|p, q| p.0.total_cmp(&q.0));
    let xs: Vec<f64> = tagged.iter().map(|p| p.0).collect();
    let ys = f(&xs)?;
    let mut out = vec![0.0; intervals.len()];
    for ((_, w, i), y) in tagged.iter().zip(ys) {
        out[*i] += w * y;
    }
    Ok(out)
}

/// Integrates over `[a, b]`, starting from `panels` equal panels. Each panel
/// is compared with the sum over its two halves, and the panels with the
/// largest differences are halved until the differences sum to less than
/// `tol`. The integrand receives all nodes of one refinement step at once,
/// in ascending order.
pub fn integrate_batched<F>(mut f: F, a: f64, b: f64, panels: usize, tol: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    let bounds: Vec<(f64, f64)> = (0..n)
        .map(|i| (a + h * i as f64, if i + 1 == n { b } else { a + h * (i + 1) as f64 }))
        .collect();
    let mut intervals = Vec::with_capacity(3 * n);
    for &(lo, hi) in &bounds {
        let mid = 0.5 * (lo + hi);
        intervals.extend([(lo, hi), (lo, mid), (mid, hi)]);
    }
    let est = estimate_all(&mut f, &intervals)?;
    let mut list: Vec<Panel> = bounds
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            let value = est[3 * i + 1] + est[3 * i + 2];
            Panel {
                a: lo,
                b: hi,
                value,
                diff: (value - est[3 * i]).abs(),
            }
        })
        .collect();

    let min_width = (b - a).abs() * 1e-14;
    let mut previous = f64::NAN;
    for _ in 0..MAX_REFINEMENTS {
        let total: f64 = list.iter().map(|p| p.diff).sum();
        let value: f64 = list.iter().map(|p| p.value).sum();
        if total < tol {
            return Ok(value);
        }
        let cut = tol / (2.0 * list.len() as f64);
        let (split, keep): (Vec<Panel>, Vec<Panel>) = list
            .into_iter()
            .partition(|p| p.diff > cut && (p.b - p.a).abs() > min_width);
        if split.is_empty() {
            return Err(Error::Quadrature { last: value, previous });
        }
        // Each split panel yields two halves whose quarters are estimated now.
        let mut intervals = Vec::with_capacity(4 * split.len());
        for p in &split {
            let m = 0.5 * (p.a + p.b);
            let (q1, q3) = (0.5 * (p.a + m), 0.5 * (m + p.b));
            intervals.extend([(p.a, q1), (q1, m), (m, q3), (q3, p.b)]);
        }
        let est = estimate_all(&mut f, &intervals)?;
        let mut next = keep;
        for (i, p) in split.iter().enumerate() {
            let m = 0.5 * (p.a + p.b);
            let (e1, e2, e3, e4) = (est[4 * i], est[4 * i + 1], est[4 * i + 2], est[4 * i + 3]);
            // The halves were estimated when `p` was created.
            let halves = p.value;
            let (left, right) = (e1 + e2, e3 + e4);
            let spread = (left + right - halves).abs();
            next.push(Panel { a: p.a, b: m, value: left, diff: 0.5 * spread });
            next.push(Panel { a: m, b: p.b, value: right, diff: 0.5 * spread });
        }
        previous = value;
        list = next;
    }
    let value: f64 = list.iter().map(|p| p.value).sum();
    Err(Error::Quadrature { last: value, previous })
}

/// Pointwise version of [`integrate_batched`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, panels: usize, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_batched(|xs| xs.iter().map(|&x| f(x)).collect(), a, b, panels, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let r = gauss_legendre(NODES);
        let total: f64 = r.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
        for deg in 0..(2 * NODES) {
            let got: f64 = r.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "degree {deg}");
        }
        assert!(r.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn smooth_integrals() {
        let v = integrate(|x| Ok(x.sin()), 0.0, PI, 1, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate(|x| Ok(1.0 / x), 1.0, 1000.0, 1, 1e-12).unwrap();
        assert!((v - 1000f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn log_singularity_converges() {
        // int_0^1 log|x - 0.3| dx
        let exact = 0.7 * 0.7f64.ln() - 0.7 + 0.3 * 0.3f64.ln() - 0.3;
        let v = integrate(|x| Ok((x - 0.3f64).abs().ln()), 0.0, 1.0, 1, 1e-9).unwrap();
        assert!((v - exact).abs() < 1e-7, "{v} {exact}");
    }
}
