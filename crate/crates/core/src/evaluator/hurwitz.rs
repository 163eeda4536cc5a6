//! Euler–Maclaurin evaluation of the Hurwitz zeta function and its first two
//! derivatives in `s`.

use num_complex::Complex64;

use super::jet::Jet;
use super::special::bernoulli_over_factorial;

/// Second-order jet with separate truncation and rounding error estimates
/// for each derivative order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawJet {
    pub jet: Jet,
    pub trunc: [f64; 3],
    pub round: [f64; 3],
}

/// Rounding errors of the summed terms are treated as independent: the
/// estimate is three times the root-sum-square of per-term errors.
const ROUNDING_FACTOR: f64 = 3.0 * f64::EPSILON;

/// Jet of `(X^{1-s} - 1) / (s - 1)` for `X = exp(c)`, entire in `s`.
fn regular_integral_term(s: Complex64, c: f64, x_pow: Complex64) -> Jet {
    let w = 1.0 - s;
    let cw = w * c;
    let (e0, e1, e2) = if cw.norm() > 0.5 {
        // X^{1-s} = X * X^{-s}
        let e = x_pow * c.exp();
        let e0 = (e - 1.0) / w;
        let e1 = (e * c - e0) / w;
        let e2 = (e * (c * c) - e1 * 2.0) / w;
        (e0, e1, e2)
    } else {
        let mut e0 = Complex64::new(0.0, 0.0);
        let mut e1 = Complex64::new(0.0, 0.0);
        let mut e2 = Complex64::new(0.0, 0.0);
        // E(w) = c sum (cw)^j / (j+1)!, differentiated term by term.
        let mut pow = Complex64::new(1.0, 0.0);
        let mut f1 = 1.0; // (j + 1)!
        for j in 0..30usize {
            let jf = j as f64;
            f1 *= jf + 1.0;
            let f2 = f1 * (jf + 2.0);
            let f3 = f2 * (jf + 3.0);
            e0 += pow / f1;
            e1 += pow * ((jf + 1.0) / f2);
            e2 += pow * ((jf + 2.0) * (jf + 1.0) / f3);
            pow *= cw;
        }
        (e0 * c, e1 * (c * c), e2 * (c * c * c))
    };
    // value = -E(w), d/ds = E'(w), d2/ds2 = -E''(w)
    Jet([-e0, e1, -e2])
}

/// `zeta(s, a) - 1 / (s - 1)` with `n_shift` directly summed terms and
/// `m_terms` Bernoulli corrections.
pub(crate) fn hurwitz_regular(s: Complex64, a: f64, n_shift: usize, m_terms: usize) -> RawJet {
    let mut jet = Jet::ZERO;
    let mut mags = [0.0f64; 3];
    for n in 0..n_shift {
        let x = n as f64 + a;
        let ln_x = x.ln();
        let v = (-s * ln_x).exp();
        jet += Jet::power(v, ln_x);
        // Relative error of x^{-s} grows with the size of the exponent.
        let m = v.norm() * (1.0 + s.norm() * ln_x.abs());
        let l = ln_x.abs();
        mags[0] += m * m;
        mags[1] += (m * l).powi(2);
        mags[2] += (m * l * l).powi(2);
    }

    let x = n_shift as f64 + a;
    let ln_x = x.ln();
    let x_pow = (-s * ln_x).exp();
    let xs = Jet::power(x_pow, ln_x);

    let integral = regular_integral_term(s, ln_x, x_pow);
    jet += integral;
    jet += xs.scale_re(0.5);

    let bern = bernoulli_over_factorial();
    let mut poly = Jet::linear(s);
    let mut x_inv_pow = 1.0 / x;
    let x_inv2 = x_inv_pow * x_inv_pow;
    let mut next = Jet::ZERO;
    for k in 1..=(m_terms + 1) {
        let term = (poly * xs).scale_re(bern[k] * x_inv_pow);
        if k <= m_terms {
            jet += term;
        } else {
            next = term;
        }
        let kk = 2.0 * k as f64;
        poly = poly * Jet::linear(s + (kk - 1.0)) * Jet::linear(s + kk);
        x_inv_pow *= x_inv2;
    }

    let mt = m_terms as f64;
    let damping = (s + (2.0 * mt + 1.0)).norm() / (s.re + 2.0 * mt + 1.0).max(1.0);
    let next_norms = next.norms();
    let trunc = [
        next_norms[0] * damping,
        next_norms[1] * damping,
        next_norms[2] * damping,
    ];
    let (tail, int) = (xs.norms(), integral.norms());
    let spread = 1.0 + s.norm() * ln_x;
    let round: [f64; 3] =
        std::array::from_fn(|d| ROUNDING_FACTOR * (mags[d].sqrt() + (tail[d] + int[d]) * spread));
    RawJet { jet, trunc, round }
}
