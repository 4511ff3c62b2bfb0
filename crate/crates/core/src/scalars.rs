//! Prime fields GF(p) with a discrete-log view of the unit group.
//!
//! Multiplicative equations over GF(p)^x become additive equations over
//! Z/(p-1) once every unit is written as a power of a fixed primitive root.
//! [`Field`] precomputes both directions of that correspondence.

use std::fmt;
use std::ops::{Add, Div, Mul, MulAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest modulus accepted; the log table has one entry per residue.
pub const MAX_MODULUS: u32 = 1_000_003;

/// An element of GF(p). The modulus travels with the value so that the
/// usual operators work without a field handle.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    value: u32,
    modulus: u32,
}

impl Fp {
    pub fn new(value: u64, modulus: u32) -> Self {
        Fp {
            value: (value % modulus as u64) as u32,
            modulus,
        }
    }

    pub fn from_i64(value: i64, modulus: u32) -> Self {
        Fp {
            value: value.rem_euclid(modulus as i64) as u32,
            modulus,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn one(modulus: u32) -> Self {
        Fp::new(1, modulus)
    }

    pub fn zero(modulus: u32) -> Self {
        Fp { value: 0, modulus }
    }

    pub fn pow(self, mut e: u64) -> Self {
        let p = self.modulus as u64;
        let mut base = self.value as u64;
        let mut acc = 1 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Fp {
            value: acc as u32,
            modulus: self.modulus,
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self) -> Self {
        assert!(
            !self.is_zero(),
            "zero has no inverse in GF({})",
            self.modulus
        );
        self.pow(self.modulus as u64 - 2)
    }

    pub fn try_inv(self) -> Option<Self> {
        (!self.is_zero()).then(|| self.inv())
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp::new(self.value as u64 + rhs.value as u64, self.modulus)
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp::new(
            self.value as u64 + self.modulus as u64 - rhs.value as u64,
            self.modulus,
        )
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp::new(self.modulus as u64 - self.value as u64, self.modulus)
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp::new(self.value as u64 * rhs.value as u64, self.modulus)
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, rhs: Fp) {
        *self = *self * rhs;
    }
}

impl Div for Fp {
    type Output = Fp;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Fp) -> Fp {
        self * rhs.inv()
    }
}

impl std::iter::Product for Fp {
    fn product<I: Iterator<Item = Fp>>(mut iter: I) -> Fp {
        let first = iter.next().expect("empty product has no modulus");
        iter.fold(first, |acc, x| acc * x)
    }
}

/// A unit written as `generator^e`, with `e` in `[0, p-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(pub u32);

/// The prime field GF(p) together with a primitive root and its log table.
#[derive(Clone)]
pub struct Field {
    p: u32,
    generator: u32,
    // log[x] for x in 1..p; log[0] unused.
    log: Vec<u32>,
    // exp[e] = generator^e for e in 0..p-1.
    exp: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("generator", &self.generator)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for Field {}

#[derive(Serialize, Deserialize)]
struct FieldSpec {
    p: u32,
}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSpec { p: self.p }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = FieldSpec::deserialize(d)?;
        Field::new(spec.p).map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Field {
    /// Builds GF(p); the primitive root is the least residue of order p-1.
    pub fn new(p: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("modulus {p} is not prime")));
        }
        if p > MAX_MODULUS {
            return Err(Error::Resource(format!(
                "modulus {p} exceeds the log-table bound {MAX_MODULUS}"
            )));
        }
        let order = p - 1;
        let factors = prime_factors(order);
        let generator = (1..p)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&q| Fp::new(g as u64, p).pow((order / q) as u64).value() != 1)
            })
            .expect("every prime field has a primitive root");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; p as usize];
        let mut x = 1u64;
        for e in 0..order {
            exp.push(x as u32);
            log[x as usize] = e;
            x = x * generator as u64 % p as u64;
        }
        Ok(Field {
            p,
            generator,
            log,
            exp,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn generator(&self) -> Fp {
        self.elem(self.generator as u64)
    }

    /// Order of the unit group, the modulus of exponent arithmetic.
    pub fn unit_order(&self) -> u32 {
        self.p - 1
    }

    pub fn elem(&self, v: u64) -> Fp {
        Fp::new(v, self.p)
    }

    pub fn elem_i64(&self, v: i64) -> Fp {
        Fp::from_i64(v, self.p)
    }

    pub fn one(&self) -> Fp {
        Fp::one(self.p)
    }

    pub fn zero(&self) -> Fp {
        Fp::zero(self.p)
    }

    /// All units in increasing residue order.
    pub fn units(&self) -> impl Iterator<Item = Fp> + '_ {
        (1..self.p as u64).map(move |v| self.elem(v))
    }

    pub fn discrete_log(&self, a: Fp) -> Result<Exponent> {
        debug_assert_eq!(a.modulus(), self.p);
        if a.is_zero() {
            return domain("discrete log of zero");
        }
        Ok(Exponent(self.log[a.value() as usize]))
    }

    /// Discrete log for values already known to be units.
    pub(crate) fn log_unit(&self, a: Fp) -> u64 {
        assert!(!a.is_zero(), "log of zero");
        self.log[a.value() as usize] as u64
    }

    pub fn exp(&self, e: Exponent) -> Fp {
        self.exp_u64(e.0 as u64)
    }

    pub(crate) fn exp_u64(&self, e: u64) -> Fp {
        self.elem(self.exp[(e % self.unit_order() as u64) as usize] as u64)
    }

    /// `{x : x^n = 1}` in increasing order.
    pub fn roots_of_unity(&self, n: u64) -> Vec<Fp> {
        self.nth_roots_of(self.one(), n).expect("one is a unit")
    }

    /// `{x : x^n = a}` in increasing order. Zero is accepted only for `n = 1`.
    pub fn nth_roots_of(&self, a: Fp, n: u64) -> Result<Vec<Fp>> {
        if n == 0 {
            return domain("root degree must be positive");
        }
        if a.is_zero() {
            if n == 1 {
                return Ok(vec![a]);
            }
            return domain("roots of zero are only defined for n = 1");
        }
        // x = g^e with n e = log a (mod p-1).
        let order = self.unit_order() as u64;
        let target = self.log_unit(a);
        let g = gcd(n % order, order);
        let g = if g == 0 { order } else { g };
        if target % g != 0 {
            return Ok(Vec::new());
        }
        let mut roots: Vec<Fp> = (0..order)
            .filter(|e| (n % order) * e % order == target)
            .map(|e| self.exp_u64(e))
            .collect();
        roots.sort();
        Ok(roots)
    }

    /// A square root when one exists, choosing the smaller residue.
    pub fn sqrt(&self, a: Fp) -> Option<Fp> {
        self.nth_roots_of(a, 2).ok()?.into_iter().next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan_roots(p: u32, a: u32, n: u64) -> Vec<u32> {
        (1..p)
            .filter(|&x| Fp::new(x as u64, p).pow(n).value() == a)
            .collect()
    }

    fn vals(v: Vec<Fp>) -> Vec<u32> {
        v.into_iter().map(Fp::value).collect()
    }

    #[test]
    fn roots_of_unity_examples() {
        let f17 = Field::new(17).unwrap();
        assert_eq!(scan_roots(17, 1, 4), vec![1, 4, 13, 16]);
        assert_eq!(vals(f17.roots_of_unity(4)), vec![1, 4, 13, 16]);
        assert_eq!(vals(f17.roots_of_unity(1)), vec![1]);
        let f5 = Field::new(5).unwrap();
        assert_eq!(vals(f5.roots_of_unity(2)), scan_roots(5, 1, 2));
        assert_eq!(vals(f5.roots_of_unity(2)), vec![1, 4]);
    }

    #[test]
    fn nth_roots_examples() {
        let f17 = Field::new(17).unwrap();
        assert_eq!(scan_roots(17, 16, 4), vec![2, 8, 9, 15]);
        assert_eq!(
            vals(f17.nth_roots_of(f17.elem(16), 4).unwrap()),
            vec![2, 8, 9, 15]
        );
        assert_eq!(vals(f17.nth_roots_of(f17.elem(9), 2).unwrap()), vec![3, 14]);
        let f7 = Field::new(7).unwrap();
        assert!(scan_roots(7, 5, 2).is_empty());
        assert!(f7.nth_roots_of(f7.elem(5), 2).unwrap().is_empty());
    }

    #[test]
    fn roots_of_zero() {
        let f7 = Field::new(7).unwrap();
        assert_eq!(vals(f7.nth_roots_of(f7.zero(), 1).unwrap()), vec![0]);
        assert!(matches!(
            f7.nth_roots_of(f7.zero(), 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn discrete_log_examples() {
        let f17 = Field::new(17).unwrap();
        assert_eq!(f17.generator().value(), 3);
        assert_eq!(f17.discrete_log(f17.elem(1)).unwrap(), Exponent(0));
        assert_eq!(f17.discrete_log(f17.elem(3)).unwrap(), Exponent(1));
        assert_eq!(f17.discrete_log(f17.elem(13)).unwrap(), Exponent(4));
        assert!(matches!(
            f17.discrete_log(f17.zero()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rejects_composites() {
        assert!(matches!(Field::new(15), Err(Error::Invalid(_))));
        assert!(matches!(Field::new(1), Err(Error::Invalid(_))));
        assert!(Field::new(2).is_ok());
    }

    #[test]
    fn roots_count_is_gcd() {
        for p in [2u32, 3, 5, 7, 13, 17, 31] {
            let f = Field::new(p).unwrap();
            for n in 1..=p as u64 {
                assert_eq!(
                    f.roots_of_unity(n).len() as u64,
                    gcd(n, (p - 1) as u64),
                    "p={p} n={n}"
                );
            }
        }
    }

    #[test]
    fn generator_has_full_order() {
        for p in [2u32, 3, 5, 7, 11, 13, 17, 257] {
            let f = Field::new(p).unwrap();
            let g = f.generator();
            let order = (1..=p - 1).find(|&k| g.pow(k as u64).value() == 1).unwrap();
            assert_eq!(order, p - 1);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn log_is_a_homomorphism(a in 1u32..257, b in 1u32..257) {
                let f = Field::new(257).unwrap();
                let (x, y) = (f.elem(a as u64), f.elem(b as u64));
                let lx = f.discrete_log(x).unwrap().0 as u64;
                let ly = f.discrete_log(y).unwrap().0 as u64;
                let lxy = f.discrete_log(x * y).unwrap().0 as u64;
                prop_assert_eq!(lxy, (lx + ly) % 256);
            }

            #[test]
            fn exp_log_round_trip(a in 1u32..101, e in 0u32..100) {
                let f = Field::new(101).unwrap();
                let x = f.elem(a as u64);
                prop_assert_eq!(f.exp(f.discrete_log(x).unwrap()), x);
                prop_assert_eq!(f.discrete_log(f.exp(Exponent(e))).unwrap(), Exponent(e));
            }
        }
    }
}
