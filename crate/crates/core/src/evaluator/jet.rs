//! Second-order jets: a value together with its first two derivatives in `s`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet(pub [Complex64; 3]);

impl Jet {
    pub const ZERO: Jet = Jet([Complex64::new(0.0, 0.0); 3]);

    pub fn constant(c: Complex64) -> Jet {
        Jet([c, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])
    }

    /// The identity map `s -> s + shift`.
    pub fn linear(s: Complex64) -> Jet {
        Jet([s, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
    }

    /// `x^{-s}` for real `x > 0`, given `ln x` and the value `x^{-s}`.
    #[inline]
    pub fn power(value: Complex64, ln_x: f64) -> Jet {
        Jet([value, value * -ln_x, value * (ln_x * ln_x)])
    }

    pub fn scale(self, c: Complex64) -> Jet {
        Jet([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }

    pub fn scale_re(self, c: f64) -> Jet {
        Jet([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }

    /// `1 / (s - 1)` and its derivatives.
    pub fn pole(s: Complex64) -> Jet {
        let r = (s - 1.0).inv();
        Jet([r, -r * r, r * r * r * 2.0])
    }

    pub fn value(&self) -> Complex64 {
        self.0[0]
    }

    pub fn deriv(&self, d: usize) -> Complex64 {
        self.0[d]
    }

    pub fn norms(&self) -> [f64; 3] {
        [self.0[0].norm(), self.0[1].norm(), self.0[2].norm()]
    }

    pub fn conj(self) -> Jet {
        Jet([self.0[0].conj(), self.0[1].conj(), self.0[2].conj()])
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, o: Jet) -> Jet {
        Jet([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Jet {
    #[inline]
    fn add_assign(&mut self, o: Jet) {
        self.0[0] += o.0[0];
        self.0[1] += o.0[1];
        self.0[2] += o.0[2];
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul for Jet {
    type Output = Jet;
    /// Leibniz rule truncated at second order.
    #[inline]
    fn mul(self, o: Jet) -> Jet {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Jet([a0 * b0, a1 * b0 + a0 * b1, a2 * b0 + a1 * b1 * 2.0 + a0 * b2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_matches_polynomial() {
        // (s + 1)(s + 2) = s^2 + 3s + 2: derivative 2s + 3, second derivative 2.
        let s = Complex64::new(0.5, 2.0);
        let p = Jet::linear(s + 1.0) * Jet::linear(s + 2.0);
        assert!((p.0[0] - (s * s + s * 3.0 + 2.0)).norm() < 1e-14);
        assert!((p.0[1] - (s * 2.0 + 3.0)).norm() < 1e-14);
        assert!((p.0[2] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }
}
