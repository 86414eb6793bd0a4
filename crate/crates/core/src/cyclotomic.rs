//! Exact arithmetic with integer combinations of roots of unity.
//!
//! A [`CycNum`] of order `L` represents an element of `Z[w]` where
//! `w = exp(2*pi*i/L)`. Coefficients are stored reduced modulo the `L`-th
//! cyclotomic polynomial, so the vector has length `phi(L)` and the zero
//! test is exact: a value is zero iff every reduced coefficient is zero.
//! Values of different orders interoperate by lifting to the least common
//! multiple order. Nothing here is ever rounded; the floating-point view
//! ([`CycNum::to_complex`]) exists only for the optional cross-check
//! backend.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest coefficient magnitude encoded as a JSON number; anything bigger
/// is written as a decimal string so readers in other languages stay exact.
const MAX_SAFE_JSON_INT: i64 = (1 << 53) - 1;

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

fn poly_trim(v: &mut Vec<i64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division of polynomials over Z by a monic divisor.
fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    assert_eq!(*den.last().unwrap(), 1, "divisor must be monic");
    let mut rem: Vec<i64> = num.to_vec();
    poly_trim(&mut rem);
    let dd = den.len() - 1;
    if rem.len() <= dd {
        assert!(rem.is_empty(), "inexact polynomial division");
        return Vec::new();
    }
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - dd] = c;
        for (k, &dc) in den.iter().enumerate() {
            rem[i - dd + k] -= c * dc;
        }
    }
    poly_trim(&mut rem);
    assert!(rem.is_empty(), "inexact polynomial division");
    quot
}

/// Remainder of `num` modulo a monic divisor, padded to `den.len() - 1`.
fn poly_rem(num: &[i64], den: &[i64]) -> Vec<i64> {
    assert_eq!(*den.last().unwrap(), 1, "divisor must be monic");
    let dd = den.len() - 1;
    let mut rem: Vec<i64> = num.to_vec();
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        rem[i] = 0;
        for (k, &dc) in den.iter().enumerate().take(dd) {
            rem[i - dd + k] -= c * dc;
        }
    }
    rem.resize(dd, 0);
    rem
}

/// Coefficients of the `n`-th cyclotomic polynomial, low degree first.
///
/// Computed by dividing `x^n - 1` by the cyclotomic polynomials of the
/// proper divisors of `n`; results are cached process-wide.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return Arc::clone(p);
    }
    assert!(n >= 1, "order must be positive");
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    let mut poly = num;
    for d in 1..n {
        if n.is_multiple_of(d) {
            poly = poly_div_exact(&poly, &cyclotomic_poly(d));
        }
    }
    let arc = Arc::new(poly);
    cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| Arc::clone(&arc));
    arc
}

/// Degree of the `n`-th cyclotomic polynomial (Euler phi of `n`).
pub fn phi(n: u32) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// An exact cyclotomic integer: an integer combination of `order`-th roots
/// of unity, reduced modulo the cyclotomic polynomial of the order.
#[derive(Debug, Clone)]
pub struct CycNum {
    order: u32,
    coeffs: Vec<i64>,
}

impl CycNum {
    fn reduced(order: u32, raw: &[i64]) -> Self {
        let coeffs = poly_rem(raw, &cyclotomic_poly(order));
        CycNum { order, coeffs }
    }

    pub fn zero(order: u32) -> Self {
        CycNum {
            order,
            coeffs: vec![0; phi(order)],
        }
    }

    pub fn one() -> Self {
        CycNum::integer(1)
    }

    pub fn integer(v: i64) -> Self {
        CycNum::reduced(1, &[v])
    }

    /// `w^exp` where `w = exp(2*pi*i/order)`.
    pub fn root(order: u32, exp: i64) -> Self {
        assert!(order >= 1);
        let e = exp.rem_euclid(order as i64) as usize;
        let mut raw = vec![0i64; e + 1];
        raw[e] = 1;
        CycNum::reduced(order, &raw)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_integer(&self) -> bool {
        self.coeffs.iter().skip(1).all(|&c| c == 0)
    }

    pub fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            Some(self.coeffs.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    /// Rewrites the value at a larger compatible order.
    pub fn promote(&self, target: u32) -> Self {
        assert!(
            target.is_multiple_of(self.order),
            "incompatible order promotion"
        );
        if target == self.order {
            return self.clone();
        }
        let stride = (target / self.order) as usize;
        let mut raw = vec![0i64; (self.coeffs.len().max(1) - 1) * stride + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            raw[i * stride] = c;
        }
        CycNum::reduced(target, &raw)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let l = lcm(self.order as u64, other.order as u64) as u32;
        (self.promote(l), other.promote(l))
    }

    /// Applies the ring automorphism `w -> w^j` for `j` coprime to the order.
    pub fn galois(&self, j: u32) -> Self {
        assert_eq!(gcd(j as u64, self.order as u64), 1, "exponent not a unit");
        let l = self.order as usize;
        let mut raw = vec![0i64; l.max(1)];
        for (i, &c) in self.coeffs.iter().enumerate() {
            raw[(i * j as usize) % l.max(1)] += c;
        }
        CycNum::reduced(self.order, &raw)
    }

    /// Complex conjugate: sends exponent `j` to `order - j`.
    pub fn conj(&self) -> Self {
        if self.order <= 2 {
            self.clone()
        } else {
            self.galois(self.order - 1)
        }
    }

    /// Exact quotient `self / div`. Panics if `div` is zero or the quotient
    /// is not a cyclotomic integer; elimination code only divides where the
    /// algorithm guarantees exactness.
    pub fn div_exact(&self, div: &Self) -> Self {
        assert!(!div.is_zero(), "division by zero");
        let (a, b) = self.common(div);
        let l = a.order;
        // Multiply by the product of the nontrivial conjugates of b; the
        // denominator collapses to the integer field norm of b.
        let mut num = a;
        let mut den = b.clone();
        for j in 2..l {
            if gcd(j as u64, l as u64) == 1 {
                let conj = b.galois(j);
                num = &num * &conj;
                den = &den * &conj;
            }
        }
        let n = den
            .as_integer()
            .expect("norm of a cyclotomic integer is an integer");
        assert!(n != 0);
        let coeffs = num
            .coeffs
            .iter()
            .map(|&c| {
                assert!(c % n == 0, "inexact cyclotomic division");
                c / n
            })
            .collect();
        CycNum { order: l, coeffs }
    }

    /// Floating-point value, for the cross-check backend only.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let theta = 2.0 * std::f64::consts::PI * (i as f64) / (self.order as f64);
                re += c as f64 * theta.cos();
                im += c as f64 * theta.sin();
            }
        }
        (re, im)
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            self.coeffs == other.coeffs
        } else {
            let (a, b) = self.common(other);
            a.coeffs == b.coeffs
        }
    }
}

impl Eq for CycNum {}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        let (mut a, b) = self.common(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        let (mut a, b) = self.common(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        let (a, b) = self.common(rhs);
        CycNum::reduced(a.order, &poly_mul(&a.coeffs, &b.coeffs))
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            first = false;
            let mag = c.unsigned_abs();
            if i == 0 {
                write!(f, "{mag}")?;
            } else {
                if mag != 1 {
                    write!(f, "{mag}*")?;
                }
                write!(f, "w{}^{}", self.order, i)?;
            }
        }
        Ok(())
    }
}

struct CoeffSeq<'a>(&'a [i64]);

impl Serialize for CoeffSeq<'_> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(self.0.len()))?;
        for &c in self.0 {
            if c.abs() > MAX_SAFE_JSON_INT {
                seq.serialize_element(&c.to_string())?;
            } else {
                seq.serialize_element(&c)?;
            }
        }
        seq.end()
    }
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(Some(2))?;
        map.serialize_entry("coeffs", &CoeffSeq(&self.coeffs))?;
        map.serialize_entry("order", &self.order)?;
        map.end()
    }
}

struct CoeffVisitor;

impl<'de> Visitor<'de> for CoeffVisitor {
    type Value = Vec<i64>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a sequence of integers or decimal strings")
    }

    fn visit_seq<A: SeqAccess<'de>>(
        self,
        mut seq: A,
    ) -> std::result::Result<Self::Value, A::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Text(String),
        }
        let mut out = Vec::new();
        while let Some(item) = seq.next_element::<Raw>()? {
            out.push(match item {
                Raw::Num(v) => v,
                Raw::Text(s) => s.parse::<i64>().map_err(de::Error::custom)?,
            });
        }
        Ok(out)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(deserialize_with = "de_coeffs")]
            coeffs: Vec<i64>,
            order: u32,
        }
        fn de_coeffs<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<i64>, D::Error> {
            de.deserialize_seq(CoeffVisitor)
        }
        let raw = Raw::deserialize(de)?;
        if raw.order == 0 {
            return Err(de::Error::custom("order must be positive"));
        }
        Ok(CycNum::reduced(raw.order, &raw.coeffs))
    }
}

/// Checks a deserialized amplitude against the schema rules.
pub(crate) fn validate_amp(a: &CycNum) -> Result<()> {
    if a.order == 0 {
        return Err(Error::malformed("amplitude order must be positive"));
    }
    if a.coeffs.len() != phi(a.order) {
        return Err(Error::malformed("amplitude coefficients not reduced"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials_match_the_table() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(*cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn geometric_sums_vanish() {
        for m in 2..=12u32 {
            let mut sum = CycNum::zero(m);
            for j in 0..m {
                sum = &sum + &CycNum::root(m, j as i64);
            }
            assert!(sum.is_zero(), "sum of all order-{m} roots");
        }
    }

    #[test]
    fn square_root_of_unity_is_minus_one() {
        assert_eq!(CycNum::root(2, 1), CycNum::integer(-1));
        assert_eq!(CycNum::root(4, 2), CycNum::integer(-1));
        assert_eq!(CycNum::root(12, 6), CycNum::integer(-1));
    }

    #[test]
    fn conjugation_inverts_roots() {
        for m in [3u32, 4, 5, 6, 12] {
            let w = CycNum::root(m, 1);
            assert_eq!(w.conj(), CycNum::root(m, m as i64 - 1));
            assert_eq!(&w * &w.conj(), CycNum::one());
        }
    }

    #[test]
    fn division_undoes_multiplication() {
        let a = &CycNum::root(12, 5) + &CycNum::integer(3);
        let b = &CycNum::root(12, 7) - &CycNum::integer(2);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&b), a);
        assert_eq!(prod.div_exact(&a), b);
    }

    #[test]
    fn serde_roundtrip_with_large_coefficient() {
        let big = CycNum::integer(1 << 60);
        let text = serde_json::to_string(&big).unwrap();
        assert!(text.contains('"'), "large coefficient must be a string");
        let back: CycNum = serde_json::from_str(&text).unwrap();
        assert_eq!(back, big);

        let small = &CycNum::root(12, 1) - &CycNum::root(12, 3);
        let text = serde_json::to_string(&small).unwrap();
        let back: CycNum = serde_json::from_str(&text).unwrap();
        assert_eq!(back, small);
    }

    fn arb_cyc() -> impl Strategy<Value = CycNum> {
        (
            prop::sample::select(vec![1u32, 2, 3, 4, 6, 12]),
            prop::collection::vec(-3i64..=3, 0..6),
        )
            .prop_map(|(order, raw)| CycNum::reduced(order, &raw))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_cyc(), b in arb_cyc(), c in arb_cyc()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn conjugation_is_multiplicative(a in arb_cyc(), b in arb_cyc()) {
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        }

        #[test]
        fn exact_division_roundtrips(a in arb_cyc(), b in arb_cyc()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b), a);
        }
    }
}
