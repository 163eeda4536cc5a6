//! Bernoulli numbers and the complex Gamma family (log-Gamma, digamma,
//! trigamma) via the Stirling series with argument shifting and reflection.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

/// Largest `k` for which `B_{2k} / (2k)!` is tabulated.
pub const MAX_BERNOULLI_K: usize = 32;

const STIRLING_TERMS: usize = 10;
const SHIFT_THRESHOLD: f64 = 12.0;

/// `B_{2k} / (2k)!` for `k = 0..=MAX_BERNOULLI_K` (index 0 unused).
///
/// Uses `B_{2k} / (2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}`.
pub fn bernoulli_over_factorial() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = vec![0.0; MAX_BERNOULLI_K + 1];
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            let two_k = 2 * k as i32;
            let zeta = match k {
                1 => PI.powi(2) / 6.0,
                2 => PI.powi(4) / 90.0,
                3 => PI.powi(6) / 945.0,
                4 => PI.powi(8) / 9450.0,
                _ => {
                    // Tail beyond n = 64 is below 64^{-9} / 9.
                    let mut acc = 0.0;
                    for n in (1..=64).rev() {
                        acc += (n as f64).powi(-two_k);
                    }
                    acc
                }
            };
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *slot = sign * 2.0 * zeta / (2.0 * PI).powi(two_k);
        }
        out
    })
}

/// `B_{2k}` as a float, `k >= 1`.
pub fn bernoulli(k: usize) -> f64 {
    let mut fact = 1.0;
    for j in 1..=(2 * k) {
        fact *= j as f64;
    }
    bernoulli_over_factorial()[k] * fact
}

fn stirling_coefficients() -> &'static [f64; STIRLING_TERMS] {
    static C: OnceLock<[f64; STIRLING_TERMS]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; STIRLING_TERMS];
        for (i, slot) in c.iter_mut().enumerate() {
            let k = i + 1;
            *slot = bernoulli(k);
        }
        c
    })
}

/// `e^{2 i z}` or `e^{-2 i z}`, whichever has modulus at most 1.
fn small_exponential(z: Complex64) -> (Complex64, bool) {
    let i = Complex64::i();
    if z.im >= 0.0 {
        ((2.0 * i * z).exp(), true)
    } else {
        ((-2.0 * i * z).exp(), false)
    }
}

/// A logarithm of `sin z`, stable for large `|Im z|`. The branch is not
/// continuous in `z`; only `exp` of the result is meaningful.
pub fn log_sin(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let (e, upper) = small_exponential(z);
    if upper {
        // sin z = e^{-iz} (e^{2iz} - 1) / (2i)
        -i * z + ((e - 1.0) / (2.0 * i)).ln()
    } else {
        // sin z = e^{iz} (1 - e^{-2iz}) / (2i)
        i * z + ((1.0 - e) / (2.0 * i)).ln()
    }
}

pub fn cot(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let (e, upper) = small_exponential(z);
    if upper {
        i * (e + 1.0) / (e - 1.0)
    } else {
        i * (1.0 + e) / (1.0 - e)
    }
}

/// `1 / sin^2 z`.
pub fn csc2(z: Complex64) -> Complex64 {
    let (e, _) = small_exponential(z);
    -4.0 * e / ((e - 1.0) * (e - 1.0))
}

/// `ln Gamma(z)` up to a multiple of `2 pi i`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return Complex64::new(PI.ln(), 0.0) - log_sin(PI * z) - ln_gamma(1.0 - z);
    }
    let mut z = z;
    let mut product = Complex64::new(1.0, 0.0);
    let mut shifted = false;
    while z.re < SHIFT_THRESHOLD {
        product *= z;
        z += 1.0;
        shifted = true;
    }
    let c = stirling_coefficients();
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut zpow = zinv;
    for (i, &b) in c.iter().enumerate() {
        let k = (i + 1) as f64;
        series += zpow * (b / (2.0 * k * (2.0 * k - 1.0)));
        zpow *= zinv2;
    }
    let main = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series;
    if shifted {
        main - product.ln()
    } else {
        main
    }
}

/// `Gamma(z)` via `exp(ln_gamma(z))`.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Digamma `psi(z) = Gamma'(z) / Gamma(z)`.
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return digamma(1.0 - z) - PI * cot(PI * z);
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < SHIFT_THRESHOLD {
        acc -= z.inv();
        z += 1.0;
    }
    let c = stirling_coefficients();
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut zpow = zinv2;
    for (i, &b) in c.iter().enumerate() {
        let k = (i + 1) as f64;
        series += zpow * (b / (2.0 * k));
        zpow *= zinv2;
    }
    acc + z.ln() - 0.5 * zinv - series
}

/// Trigamma `psi'(z)`.
pub fn trigamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return -trigamma(1.0 - z) + PI * PI * csc2(PI * z);
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < SHIFT_THRESHOLD {
        acc += (z * z).inv();
        z += 1.0;
    }
    let c = stirling_coefficients();
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut zpow = zinv2 * zinv;
    for &b in c.iter() {
        series += zpow * b;
        zpow *= zinv2;
    }
    acc + zinv + 0.5 * zinv2 + series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bernoulli_values() {
        assert!((bernoulli(1) - 1.0 / 6.0).abs() < 1e-16);
        assert!((bernoulli(2) + 1.0 / 30.0).abs() < 1e-16);
        assert!((bernoulli(3) - 1.0 / 42.0).abs() < 1e-16);
        assert!((bernoulli(6) + 691.0 / 2730.0).abs() < 1e-14);
        assert!((bernoulli(10) + 174611.0 / 330.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_known_values() {
        assert!((gamma(c(5.0, 0.0)) - c(24.0, 0.0)).norm() < 1e-12);
        assert!((gamma(c(0.5, 0.0)) - c(PI.sqrt(), 0.0)).norm() < 1e-14);
        assert!((gamma(c(-0.5, 0.0)) - c(-2.0 * PI.sqrt(), 0.0)).norm() < 1e-13);
        // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
        for t in [1.0, 5.0, 20.0] {
            let g = gamma(c(0.5, t));
            assert!((g.norm_sqr() / (PI / (PI * t).cosh()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn recurrences() {
        for z in [c(0.3, 4.0), c(-2.7, 11.0), c(3.2, -25.0), c(7.0, 0.3)] {
            // ln Gamma(z + 1) - ln Gamma(z) = ln z  (mod 2 pi i)
            let d = ln_gamma(z + 1.0) - ln_gamma(z) - z.ln();
            let k = (d.im / (2.0 * PI)).round();
            assert!((d - c(0.0, 2.0 * PI * k)).norm() < 1e-11, "{z} {d}");
            assert!((digamma(z + 1.0) - digamma(z) - z.inv()).norm() < 1e-12);
            assert!((trigamma(z) - trigamma(z + 1.0) - (z * z).inv()).norm() < 1e-12);
        }
    }

    #[test]
    fn derivatives_by_central_differences() {
        let h = 1e-5;
        for z in [c(0.2, 3.0), c(-4.5, 10.0), c(2.0, -1.5)] {
            let num = (ln_gamma(z + h) - ln_gamma(z - h)) / (2.0 * h);
            assert!((num - digamma(z)).norm() < 1e-8, "{z}");
            let num = (digamma(z + h) - digamma(z - h)) / (2.0 * h);
            assert!((num - trigamma(z)).norm() < 1e-8, "{z}");
        }
    }

    #[test]
    fn euler_gamma() {
        assert!((digamma(c(1.0, 0.0)) + c(0.5772156649015329, 0.0)).norm() < 1e-14);
        assert!((trigamma(c(1.0, 0.0)) - c(PI * PI / 6.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn trig_helpers_large_imaginary() {
        for z in [c(0.3, 40.0), c(-1.2, -55.0), c(0.7, 0.2)] {
            let s = log_sin(z).exp();
            let direct = z.sin();
            assert!((s / direct - 1.0).norm() < 1e-12);
            assert!((cot(z) - z.cos() / z.sin()).norm() < 1e-12);
            assert!((csc2(z) * direct * direct - 1.0).norm() < 1e-12);
        }
    }
}
