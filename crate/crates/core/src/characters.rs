//! Dirichlet characters modulo `q`.
//!
//! The group `(Z/q)^*` is split over the prime powers of `q` into cyclic
//! components, each with a fixed generator. A character is an exponent
//! vector `k` over those components, and `chi(n)` is kept as an exact
//! exponent `e` of a root of unity of the character's order. Complex values
//! are a cache derived from those exponents.
//!
//! Character indices follow the lexicographic order of exponent vectors, with
//! components ordered by increasing prime (for `2^e`, `e >= 3`, the `-1`
//! component precedes the `5` component). Index 0 is the principal character.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factorize, gcd, lcm};
use crate::error::{Error, Result};

pub use crate::arith::smallest_nondividing_prime;

/// One cyclic factor of `(Z/q)^*`.
#[derive(Debug, Clone)]
struct Component {
    order: u64,
}

/// A Dirichlet character modulo `q`. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    q: u64,
    index: usize,
    /// Exponent vector over the cyclic components.
    exponents: Vec<u64>,
    radices: Vec<u64>,
    /// Order of the character; every value is a power of `exp(2 pi i / order)`.
    order: u64,
    /// `Some(e)` for `chi(n) = exp(2 pi i e / order)`, `None` for `chi(n) = 0`.
    table: Vec<Option<u64>>,
    values: Vec<Complex64>,
    conductor: u64,
    kappa: u8,
}

/// Serializable summary, also used by the CLI listing.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CharacterSummary {
    pub q: u64,
    pub index: usize,
    pub conductor: u64,
    pub primitive: bool,
    pub kappa: u8,
    pub order: u64,
}

fn root_of_unity(e: u64, order: u64) -> Complex64 {
    let e = e % order;
    if (4 * e) % order == 0 {
        return match 4 * e / order {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (s, c) = (2.0 * PI * e as f64 / order as f64).sin_cos();
    Complex64::new(c, s)
}

/// Discrete-log table for one prime power: residue mod `p^e` -> logs over
/// the components it contributes.
fn prime_power_logs(p: u64, e: u32) -> (Vec<Component>, Vec<Option<Vec<u64>>>) {
    let pe = p.pow(e);
    let mut table: Vec<Option<Vec<u64>>> = vec![None; pe as usize];
    if p == 2 {
        match e {
            1 => {
                table[1] = Some(vec![]);
                (vec![], table)
            }
            2 => {
                table[1] = Some(vec![0]);
                table[3] = Some(vec![1]);
                (vec![Component { order: 2 }], table)
            }
            _ => {
                let half = pe / 4;
                let mut five_pow = 1u64;
                for j in 0..half {
                    table[five_pow as usize] = Some(vec![0, j]);
                    table[(pe - five_pow) as usize] = Some(vec![1, j]);
                    five_pow = five_pow * 5 % pe;
                }
                (
                    vec![
                        Component { order: 2 },
                        Component { order: half },
                    ],
                    table,
                )
            }
        }
    } else {
        let phi = pe / p * (p - 1);
        let g = (2..pe)
            .find(|&g| {
                if g % p == 0 {
                    return false;
                }
                let mut x = g;
                let mut ord = 1;
                while x != 1 {
                    x = x * g % pe;
                    ord += 1;
                }
                ord == phi
            })
            .expect("odd prime powers have primitive roots");
        let mut x = 1u64;
        for k in 0..phi {
            table[x as usize] = Some(vec![k]);
            x = x * g % pe;
        }
        (vec![Component { order: phi }], table)
    }
}

/// Enumerates all `phi(q)` characters modulo `q`, principal character first.
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q < 3 {
        return Err(Error::domain(format!("modulus q = {q} must be at least 3")));
    }
    let mut components = Vec::new();
    let mut tables = Vec::new();
    for (p, e) in factorize(q) {
        let (comps, table) = prime_power_logs(p, e);
        components.extend(comps);
        tables.push((p.pow(e), table));
    }
    let radices: Vec<u64> = components.iter().map(|c| c.order).collect();
    let group_exponent = radices.iter().fold(1, |acc, &r| lcm(acc, r));

    // Log vector of every residue class mod q.
    let logs: Vec<Option<Vec<u64>>> = (0..q)
        .map(|n| {
            if gcd(n, q) != 1 {
                return None;
            }
            let mut v = Vec::with_capacity(components.len());
            for (pe, table) in &tables {
                v.extend(table[(n % pe) as usize].as_ref()?.iter().copied());
            }
            Some(v)
        })
        .collect();

    let count: u64 = radices.iter().product();
    let mut out = Vec::with_capacity(count as usize);
    let mut exps = vec![0u64; radices.len()];
    for index in 0..count as usize {
        let raw: Vec<Option<u64>> = logs
            .iter()
            .map(|l| {
                l.as_ref().map(|l| {
                    l.iter()
                        .zip(&exps)
                        .zip(&radices)
                        .map(|((&li, &ki), &ni)| li * ki % ni * (group_exponent / ni))
                        .sum::<u64>()
                        % group_exponent
                })
            })
            .collect();
        out.push(DirichletCharacter::from_raw(
            q,
            index,
            exps.clone(),
            radices.clone(),
            group_exponent,
            raw,
        ));
        // Lexicographic increment, last component fastest.
        for pos in (0..exps.len()).rev() {
            exps[pos] += 1;
            if exps[pos] < radices[pos] {
                break;
            }
            exps[pos] = 0;
        }
    }
    Ok(out)
}

/// The character with the given index modulo `q`.
pub fn character(q: u64, index: usize) -> Result<DirichletCharacter> {
    let mut all = enumerate_characters(q)?;
    if index >= all.len() {
        return Err(Error::domain(format!(
            "character index {index} out of range for q = {q} ({} characters)",
            all.len()
        )));
    }
    Ok(all.swap_remove(index))
}

/// Primitive characters modulo `q`, in index order.
pub fn primitive_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(enumerate_characters(q)?
        .into_iter()
        .filter(|c| c.is_primitive())
        .collect())
}

impl DirichletCharacter {
    fn from_raw(
        q: u64,
        index: usize,
        exponents: Vec<u64>,
        radices: Vec<u64>,
        group_exponent: u64,
        raw: Vec<Option<u64>>,
    ) -> Self {
        let common = raw
            .iter()
            .flatten()
            .fold(group_exponent, |acc, &e| gcd(acc, e));
        let order = group_exponent / common;
        let table: Vec<Option<u64>> = raw.into_iter().map(|e| e.map(|e| e / common)).collect();
        let values = table
            .iter()
            .map(|e| e.map_or(Complex64::new(0.0, 0.0), |e| root_of_unity(e, order)))
            .collect();

        let conductor = divisors(q)
            .into_iter()
            .find(|&d| {
                (1..q)
                    .filter(|&n| n % d == 1 % d)
                    .all(|n| matches!(table[n as usize], None | Some(0)))
            })
            .unwrap_or(q);

        let minus_one = table[(q - 1) as usize].expect("gcd(q - 1, q) = 1");
        let kappa = if minus_one == 0 { 0 } else { 1 };

        DirichletCharacter {
            q,
            index,
            exponents,
            radices,
            order,
            table,
            values,
            conductor,
            kappa,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.q
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// Parity: 0 if `chi(-1) = 1`, 1 if `chi(-1) = -1`.
    pub fn kappa(&self) -> u8 {
        self.kappa
    }

    /// Order of the character as an element of the character group.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Real (quadratic or principal) characters have order at most 2.
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// Exact exponent `e` with `chi(n) = exp(2 pi i e / order)`, or `None`
    /// when `gcd(n, q) > 1`.
    pub fn exponent(&self, n: i64) -> Option<u64> {
        self.table[n.rem_euclid(self.q as i64) as usize]
    }

    /// `chi(n)` for any integer `n`.
    pub fn eval(&self, n: i64) -> Complex64 {
        self.values[n.rem_euclid(self.q as i64) as usize]
    }

    /// Values `chi(0), ..., chi(q - 1)`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The complex conjugate character.
    pub fn conj(&self) -> DirichletCharacter {
        let exponents: Vec<u64> = self
            .exponents
            .iter()
            .zip(&self.radices)
            .map(|(&k, &n)| (n - k) % n)
            .collect();
        let index = exponents
            .iter()
            .zip(&self.radices)
            .fold(0u64, |acc, (&k, &n)| acc * n + k) as usize;
        let table: Vec<Option<u64>> = self
            .table
            .iter()
            .map(|e| e.map(|e| (self.order - e) % self.order))
            .collect();
        let values = table
            .iter()
            .map(|e| e.map_or(Complex64::new(0.0, 0.0), |e| root_of_unity(e, self.order)))
            .collect();
        DirichletCharacter {
            q: self.q,
            index,
            exponents,
            radices: self.radices.clone(),
            order: self.order,
            table,
            values,
            conductor: self.conductor,
            kappa: self.kappa,
        }
    }

    pub fn summary(&self) -> CharacterSummary {
        CharacterSummary {
            q: self.q,
            index: self.index,
            conductor: self.conductor,
            primitive: self.is_primitive(),
            kappa: self.kappa,
            order: self.order,
        }
    }

    /// Gauss sum `tau(chi) = sum_{a=1}^{q} chi(a) exp(2 pi i a / q)`.
    pub fn gauss_sum(&self) -> Result<Complex64> {
        if !self.is_primitive() {
            return Err(Error::domain(format!(
                "Gauss sum requested for imprimitive character (q = {}, index {})",
                self.q, self.index
            )));
        }
        Ok((1..=self.q)
            .map(|a| self.eval(a as i64) * root_of_unity(a % self.q, self.q))
            .sum())
    }

    /// Root number `epsilon(chi) = tau(chi) / (i^kappa sqrt(q))`.
    pub fn root_number(&self) -> Result<Complex64> {
        let tau = self.gauss_sum()?;
        let i_kappa = if self.kappa == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        Ok(tau / (i_kappa * (self.q as f64).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn rejects_small_moduli() {
        assert!(enumerate_characters(1).is_err());
        assert!(enumerate_characters(2).is_err());
    }

    #[test]
    fn mod_four() {
        let chars = enumerate_characters(4).unwrap();
        assert_eq!(chars.len(), 2);
        assert_eq!(chars.iter().filter(|c| c.is_primitive()).count(), 1);
        let odd = &chars[1];
        assert!(odd.is_primitive());
        assert_eq!(odd.kappa(), 1);
        assert_eq!(odd.eval(3), Complex64::new(-1.0, 0.0));
        assert_eq!(odd.eval(4), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn mod_three() {
        let chars = enumerate_characters(3).unwrap();
        assert_eq!(chars.len(), 2);
        assert!(chars[0].is_principal());
        assert_eq!(chars[1].kappa(), 1);
        assert_eq!(chars[1].conductor(), 3);
    }

    /// Conductor by the definition: the least `d | q` such that `chi` is
    /// constant on classes mod `d` (restricted to units mod q).
    fn brute_conductor(chi: &DirichletCharacter) -> u64 {
        let q = chi.modulus();
        (1..=q)
            .filter(|d| q % d == 0)
            .find(|&d| {
                (1..q as i64).all(|a| {
                    (1..q as i64).all(|b| {
                        if gcd(a as u64, q) != 1 || gcd(b as u64, q) != 1 || (a - b) % d as i64 != 0
                        {
                            return true;
                        }
                        close(chi.eval(a), chi.eval(b), 1e-12)
                    })
                })
            })
            .unwrap()
    }

    #[test]
    fn mod_eight_conductors() {
        let chars = enumerate_characters(8).unwrap();
        assert_eq!(chars.len(), 4);
        for c in &chars {
            assert_eq!(c.conductor(), brute_conductor(c));
        }
        assert_eq!(chars.iter().filter(|c| c.is_primitive()).count(), 2);
    }

    #[test]
    fn conductors_match_brute_force() {
        for q in [9u64, 12, 15, 16, 20, 24, 36] {
            for c in enumerate_characters(q).unwrap() {
                assert_eq!(c.conductor(), brute_conductor(&c), "q={q} index={}", c.index());
            }
        }
    }

    #[test]
    fn mod_five_square_of_i() {
        let chars = enumerate_characters(5).unwrap();
        let chi = chars
            .iter()
            .find(|c| c.eval(2) == Complex64::new(0.0, 1.0))
            .unwrap();
        assert_eq!(chi.eval(4), Complex64::new(-1.0, 0.0));
        assert_eq!(chi.eval(4), chi.eval(2) * chi.eval(2));
    }

    #[test]
    fn counts_and_principal() {
        for q in 3..=60u64 {
            let chars = enumerate_characters(q).unwrap();
            assert_eq!(chars.len() as u64, crate::arith::euler_phi(q));
            assert!(chars[0].values().iter().enumerate().all(|(n, v)| {
                if gcd(n as u64, q) == 1 {
                    *v == Complex64::new(1.0, 0.0)
                } else {
                    *v == Complex64::new(0.0, 0.0)
                }
            }));
            for (i, c) in chars.iter().enumerate() {
                assert_eq!(c.index(), i);
            }
        }
    }

    #[test]
    fn exact_multiplicativity_and_orthogonality() {
        for q in 3..=50u64 {
            for chi in enumerate_characters(q).unwrap() {
                for a in 1..q as i64 {
                    for b in 1..q as i64 {
                        let (ea, eb, eab) = (chi.exponent(a), chi.exponent(b), chi.exponent(a * b));
                        match (ea, eb) {
                            (Some(x), Some(y)) => assert_eq!(eab, Some((x + y) % chi.order())),
                            _ => assert_eq!(eab, None),
                        }
                    }
                }
                let total: Complex64 = (1..=q as i64).map(|n| chi.eval(n)).sum();
                if chi.is_principal() {
                    assert!((total.re - crate::arith::euler_phi(q) as f64).abs() < 1e-9);
                } else {
                    assert!(total.norm() < 1e-12, "q={q} idx={} sum={total}", chi.index());
                }
                let expected = if chi.kappa() == 0 { 1.0 } else { -1.0 };
                assert_eq!(chi.eval(q as i64 - 1), Complex64::new(expected, 0.0));
                assert_eq!(chi.eval(-1), chi.eval(q as i64 - 1));
                assert_eq!(chi.is_primitive(), chi.conductor() == q);
                for n in 0..q as i64 {
                    assert_eq!(chi.eval(n), chi.eval(n + 3 * q as i64));
                    let v = chi.eval(n);
                    if gcd(n as u64, q) == 1 {
                        assert!((v.norm() - 1.0).abs() < 1e-15);
                    } else {
                        assert_eq!(v, Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn conjugate_index_round_trip() {
        for q in [5u64, 7, 8, 11, 13, 15, 16] {
            let chars = enumerate_characters(q).unwrap();
            for chi in &chars {
                let bar = chi.conj();
                assert_eq!(&chars[bar.index()], &bar);
                assert_eq!(bar.conj(), *chi);
            }
        }
    }

    #[test]
    fn gauss_sums() {
        let chi4 = character(4, 1).unwrap();
        assert!(close(chi4.gauss_sum().unwrap(), Complex64::new(0.0, 2.0), 1e-14));
        assert!(close(chi4.root_number().unwrap(), Complex64::new(1.0, 0.0), 1e-14));

        let quad5 = enumerate_characters(5)
            .unwrap()
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap();
        // Direct five-term sum of the Legendre symbol against e(a/5).
        let legendre = [0.0, 1.0, -1.0, -1.0, 1.0];
        let oracle: Complex64 = (1..=5)
            .map(|a| {
                let (s, c) = (2.0 * PI * a as f64 / 5.0).sin_cos();
                legendre[a % 5] * Complex64::new(c, s)
            })
            .sum();
        assert!(close(quad5.gauss_sum().unwrap(), oracle, 1e-13));
        assert!(close(oracle, Complex64::new(5f64.sqrt(), 0.0), 1e-13));
        assert!(close(quad5.root_number().unwrap(), Complex64::new(1.0, 0.0), 1e-13));

        for q in [7u64, 11, 8, 9, 15, 23] {
            for chi in primitive_characters(q).unwrap() {
                let tau = chi.gauss_sum().unwrap();
                assert!((tau.norm() - (q as f64).sqrt()).abs() < 1e-10);
                assert!((chi.root_number().unwrap().norm() - 1.0).abs() < 1e-12);
            }
        }
        assert!(character(8, 0).unwrap().gauss_sum().is_err());
        assert!(character(9, 0).unwrap().root_number().is_err());
    }
}
