//! Exact arithmetic in the biquadratic field Q(√2, √3).
//!
//! An element is stored as `a + b·√2 + c·√3 + d·√6` with arbitrary-precision
//! rational coordinates. The basis `{1, √2, √3, √6}` is closed under
//! multiplication, so every operation stays inside the four coordinates and
//! equality is coordinate-wise.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Index of a coordinate in the `{1, √2, √3, √6}` basis.
const RADICALS: [u32; 4] = [1, 2, 3, 6];

/// `BASIS_PRODUCT[i][j] = (k, m)` means `basis[i] * basis[j] = m * basis[k]`.
const BASIS_PRODUCT: [[(usize, i64); 4]; 4] = [
    [(0, 1), (1, 1), (2, 1), (3, 1)],
    [(1, 1), (0, 2), (3, 1), (2, 2)],
    [(2, 1), (3, 1), (0, 3), (1, 3)],
    [(3, 1), (2, 2), (1, 3), (0, 6)],
];

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    coords: [Rational; 4],
}

impl Scalar {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Scalar {
            coords: [a, b, c, d],
        }
    }

    pub fn zero() -> Self {
        Scalar {
            coords: [
                Rational::zero(),
                Rational::zero(),
                Rational::zero(),
                Rational::zero(),
            ],
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; panics on a zero denominator.
    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut s = Self::zero();
        s.coords[0] = r;
        s
    }

    pub fn sqrt2() -> Self {
        Self::radical(1)
    }

    pub fn sqrt3() -> Self {
        Self::radical(2)
    }

    pub fn sqrt6() -> Self {
        Self::radical(3)
    }

    fn radical(slot: usize) -> Self {
        let mut s = Self::zero();
        s.coords[slot] = Rational::one();
        s
    }

    /// Coordinates `(a, b, c, d)` of `a + b√2 + c√3 + d√6`.
    pub fn coords(&self) -> &[Rational; 4] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coords[1..]
            .iter()
            .all(Zero::is_zero)
            .then_some(&self.coords[0])
    }

    /// Automorphism sending √2 to −√2 (and √6 to −√6).
    pub fn conj_sqrt2(&self) -> Self {
        let [a, b, c, d] = self.coords.clone();
        Scalar::new(a, -b, c, -d)
    }

    /// Automorphism sending √3 to −√3 (and √6 to −√6).
    pub fn conj_sqrt3(&self) -> Self {
        let [a, b, c, d] = self.coords.clone();
        Scalar::new(a, b, -c, -d)
    }

    /// Field norm: the product of all four Galois conjugates.
    pub fn norm(&self) -> Rational {
        let y = self * &self.conj_sqrt2();
        let n = &y * &y.conj_sqrt3();
        debug_assert!(n.coords[1..].iter().all(Zero::is_zero));
        n.coords[0].clone()
    }

    /// Multiplicative inverse, computed from the Galois conjugates and the
    /// rational norm.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(r.recip()));
        }
        let c2 = self.conj_sqrt2();
        let y = self * &c2;
        let c3 = y.conj_sqrt3();
        let norm = (&y * &c3).coords[0].clone();
        let numer = &c2 * &c3;
        Ok(numer.scale(&norm.recip()))
    }

    pub fn div(&self, other: &Scalar) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Multiply every coordinate by a rational.
    pub fn scale(&self, r: &Rational) -> Self {
        Scalar {
            coords: [
                &self.coords[0] * r,
                &self.coords[1] * r,
                &self.coords[2] * r,
                &self.coords[3] * r,
            ],
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        match n {
            1 => self.clone(),
            -1 => -self,
            0 => Self::zero(),
            _ => self.scale(&Rational::from_integer(BigInt::from(n))),
        }
    }

    /// Number of nonzero coordinates.
    fn support(&self) -> usize {
        self.coords.iter().filter(|c| !c.is_zero()).count()
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar {
            coords: [
                &self.coords[0] + &rhs.coords[0],
                &self.coords[1] + &rhs.coords[1],
                &self.coords[2] + &rhs.coords[2],
                &self.coords[3] + &rhs.coords[3],
            ],
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (x, y) in self.coords.iter_mut().zip(&rhs.coords) {
            if !y.is_zero() {
                *x += y;
            }
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (x, y) in self.coords.iter_mut().zip(&rhs.coords) {
            if !y.is_zero() {
                *x -= y;
            }
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            coords: [
                -&self.coords[0],
                -&self.coords[1],
                -&self.coords[2],
                -&self.coords[3],
            ],
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (i, x) in self.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coords.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let (k, m) = BASIS_PRODUCT[i][j];
                let p = x * y;
                if m == 1 {
                    out.coords[k] += p;
                } else {
                    out.coords[k] += p * BigInt::from(m);
                }
            }
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// Canonical text form with explicit rationals, e.g. `1/2 + 3/4 r2 - 1 r6`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (slot, q) in self.coords.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mag = q.abs();
            if first {
                if q.is_negative() {
                    write!(f, "-")?;
                }
            } else if q.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            fmt_rational(&mag, f)?;
            if slot > 0 {
                write!(f, " r{}", RADICALS[slot])?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl Scalar {
    /// True when the text form needs parentheses to act as a single factor.
    pub fn is_compound(&self) -> bool {
        self.support() > 1
    }
}

/// Parse the text form `p/q [rK] (('+'|'-') p/q [rK])*` with `K` in
/// `{2, 3, 6}`. A bare `rK` is read as `1 rK`.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::ScalarSyntax(format!("{msg} in {s:?}"));
        let mut out = Scalar::zero();
        let mut rest = s.trim();
        if rest.is_empty() {
            return Err(bad("empty scalar"));
        }
        let mut first = true;
        while !rest.is_empty() {
            let mut negative = false;
            if let Some(r) = rest.strip_prefix('-') {
                negative = true;
                rest = r.trim_start();
            } else if let Some(r) = rest.strip_prefix('+') {
                if first {
                    return Err(bad("leading '+'"));
                }
                rest = r.trim_start();
            } else if !first {
                return Err(bad("expected '+' or '-'"));
            }
            first = false;

            let (coef, after) = take_rational(rest);
            let after = after.trim_start();
            let (slot, after) = match take_radical(after) {
                Some((slot, a)) => (slot, a),
                None => (0, after),
            };
            let coef = match coef {
                Some(c) => c?,
                None if slot > 0 => Rational::one(),
                None => return Err(bad("expected a rational")),
            };
            let coef = if negative { -coef } else { coef };
            out.coords[slot] += coef;
            rest = after.trim_start();
        }
        Ok(out)
    }
}

/// Consume `digits[/digits]` from the front of `s`.
pub(crate) fn take_rational(s: &str) -> (Option<Result<Rational>>, &str) {
    let digits = |t: &str| t.bytes().take_while(u8::is_ascii_digit).count();
    let n = digits(s);
    if n == 0 {
        return (None, s);
    }
    let numer: BigInt = s[..n].parse().expect("ascii digits");
    let rest = &s[n..];
    if let Some(after_slash) = rest.strip_prefix('/') {
        let m = digits(after_slash);
        if m == 0 {
            return (
                Some(Err(Error::ScalarSyntax(format!(
                    "missing denominator in {s:?}"
                )))),
                after_slash,
            );
        }
        let denom: BigInt = after_slash[..m].parse().expect("ascii digits");
        if denom.is_zero() {
            return (Some(Err(Error::DivisionByZero)), &after_slash[m..]);
        }
        (Some(Ok(Rational::new(numer, denom))), &after_slash[m..])
    } else {
        (Some(Ok(Rational::from_integer(numer))), rest)
    }
}

/// Consume `r2`, `r3` or `r6` (not followed by another digit).
pub(crate) fn take_radical(s: &str) -> Option<(usize, &str)> {
    let rest = s.strip_prefix('r')?;
    let slot = match rest.as_bytes().first()? {
        b'2' => 1,
        b'3' => 2,
        b'6' => 3,
        _ => return None,
    };
    let rest = &rest[1..];
    if rest
        .bytes()
        .next()
        .is_some_and(|b| b.is_ascii_alphanumeric())
    {
        return None;
    }
    Some((slot, rest))
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
