//! Supercommutative polynomials in the even variables `q`, `p`, `X` and the
//! odd variables `Θ` (`T`) and `θ` (`th`).
//!
//! Every monomial is kept in one canonical order: even factors first (they
//! commute with everything), then odd factors sorted by family and index.
//! Constructors that receive factors in any other order pick up the sign of
//! the sorting permutation, so two polynomials are equal exactly when their
//! term maps are equal.

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalars::Scalar;

pub use parse::parse_expression;

/// Largest index supported for each odd family.
pub const MAX_ODD_INDEX: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Q,
    P,
    X,
    ThetaBig,
    ThetaSmall,
}

impl Family {
    pub fn is_odd(self) -> bool {
        matches!(self, Family::ThetaBig | Family::ThetaSmall)
    }

    /// Spelling used by the expression grammar.
    pub fn prefix(self) -> &'static str {
        match self {
            Family::Q => "q",
            Family::P => "p",
            Family::X => "X",
            Family::ThetaBig => "T",
            Family::ThetaSmall => "th",
        }
    }
}

/// A single generator, indexed from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableId {
    pub family: Family,
    pub index: usize,
}

impl VariableId {
    pub fn new(family: Family, index: usize) -> Self {
        assert!(index >= 1, "variable indices start at 1");
        if family.is_odd() {
            assert!(index <= MAX_ODD_INDEX, "odd index {index} exceeds capacity");
        }
        VariableId { family, index }
    }

    pub fn q(index: usize) -> Self {
        Self::new(Family::Q, index)
    }

    pub fn p(index: usize) -> Self {
        Self::new(Family::P, index)
    }

    pub fn x(index: usize) -> Self {
        Self::new(Family::X, index)
    }

    /// `Θ_index`
    pub fn theta(index: usize) -> Self {
        Self::new(Family::ThetaBig, index)
    }

    /// `θ_index`
    pub fn theta_small(index: usize) -> Self {
        Self::new(Family::ThetaSmall, index)
    }

    pub fn is_odd(&self) -> bool {
        self.family.is_odd()
    }

    /// Bit position inside the combined odd mask.
    fn odd_bit(&self) -> u32 {
        let offset = match self.family {
            Family::ThetaBig => 0,
            Family::ThetaSmall => MAX_ODD_INDEX as u32,
            _ => unreachable!("even variable has no odd bit"),
        };
        offset + self.index as u32 - 1
    }

    fn from_odd_bit(bit: u32) -> Self {
        if bit < MAX_ODD_INDEX as u32 {
            VariableId::theta(bit as usize + 1)
        } else {
            VariableId::theta_small((bit - MAX_ODD_INDEX as u32) as usize + 1)
        }
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.prefix(), self.index)
    }
}

/// Grassmann parity of a polynomial. The zero polynomial reports `Even`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn from_bit(bit: u32) -> Self {
        if bit % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// 0 or 1 for homogeneous parities.
    pub fn bit(self) -> Option<u32> {
        match self {
            Parity::Even => Some(0),
            Parity::Odd => Some(1),
            Parity::Mixed => None,
        }
    }
}

/// Sign `(-1)^n` of moving the odd factors `right` leftwards past the odd
/// factors of `left` into ascending order. `None` when the two share a
/// factor.
fn merge_sign(left: u128, right: u128) -> Option<bool> {
    if left & right != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = right;
    while rest != 0 {
        let b = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += if b == 127 {
            0
        } else {
            (left >> (b + 1)).count_ones()
        };
    }
    Some(swaps % 2 == 1)
}

/// Canonical monomial: sorted even factors with positive exponents and a
/// bitmask of odd factors (bits 0..64 for `Θ`, 64..128 for `θ`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SuperMonomial {
    even: Vec<(VariableId, u32)>,
    odd: u128,
}

impl SuperMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// Monomial `Θ_{i1}…Θ_{ik}` from a bitmask over `Θ` indices (bit `i-1`).
    pub fn from_theta_mask(mask: u64) -> Self {
        SuperMonomial {
            even: Vec::new(),
            odd: mask as u128,
        }
    }

    /// Build from factors in the given order. Returns the sign of the sorting
    /// permutation (`true` for negative), or `None` if an odd factor repeats.
    pub fn from_factors(factors: &[VariableId]) -> Option<(bool, Self)> {
        let mut mono = SuperMonomial::one();
        let mut negative = false;
        for v in factors {
            let (neg, next) = mono.mul(&SuperMonomial::var(*v))?;
            negative ^= neg;
            mono = next;
        }
        Some((negative, mono))
    }

    pub fn var(v: VariableId) -> Self {
        if v.is_odd() {
            SuperMonomial {
                even: Vec::new(),
                odd: 1u128 << v.odd_bit(),
            }
        } else {
            SuperMonomial {
                even: vec![(v, 1)],
                odd: 0,
            }
        }
    }

    pub fn is_one(&self) -> bool {
        self.even.is_empty() && self.odd == 0
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.odd.count_ones())
    }

    pub fn odd_degree(&self) -> u32 {
        self.odd.count_ones()
    }

    pub fn even_degree(&self) -> u32 {
        self.even.iter().map(|(_, e)| e).sum()
    }

    pub fn even_factors(&self) -> &[(VariableId, u32)] {
        &self.even
    }

    /// Odd factors in canonical order.
    pub fn odd_factors(&self) -> impl Iterator<Item = VariableId> + '_ {
        let mut rest = self.odd;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros();
            rest &= rest - 1;
            Some(VariableId::from_odd_bit(b))
        })
    }

    /// `Θ` part as a bitmask over indices (bit `i-1` for `Θ_i`), if the
    /// monomial is built from `Θ` variables only.
    pub fn theta_mask(&self) -> Option<u64> {
        (self.even.is_empty() && self.odd >> 64 == 0).then_some(self.odd as u64)
    }

    pub fn variables(&self) -> impl Iterator<Item = VariableId> + '_ {
        self.even.iter().map(|(v, _)| *v).chain(self.odd_factors())
    }

    /// Product `self · other`; `None` when it vanishes, otherwise the sign
    /// (`true` for negative) and the canonical monomial.
    pub fn mul(&self, other: &SuperMonomial) -> Option<(bool, SuperMonomial)> {
        let negative = merge_sign(self.odd, other.odd)?;
        let mut even = Vec::with_capacity(self.even.len() + other.even.len());
        let (mut i, mut j) = (0, 0);
        while i < self.even.len() && j < other.even.len() {
            let (a, ea) = self.even[i];
            let (b, eb) = other.even[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    even.push((a, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    even.push((b, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    even.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        even.extend_from_slice(&self.even[i..]);
        even.extend_from_slice(&other.even[j..]);
        Some((
            negative,
            SuperMonomial {
                even,
                odd: self.odd | other.odd,
            },
        ))
    }

    /// Remove odd factor `v`; returns (number of odd factors before it, number
    /// after it, remaining monomial).
    fn remove_odd(&self, v: VariableId) -> Option<(u32, u32, SuperMonomial)> {
        let bit = v.odd_bit();
        if self.odd >> bit & 1 == 0 {
            return None;
        }
        let below = (self.odd & ((1u128 << bit) - 1)).count_ones();
        let above = self.odd.count_ones() - below - 1;
        Some((
            below,
            above,
            SuperMonomial {
                even: self.even.clone(),
                odd: self.odd & !(1u128 << bit),
            },
        ))
    }
}

impl fmt::Display for SuperMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in &self.even {
            for _ in 0..*e {
                if !first {
                    write!(f, "*")?;
                }
                write!(f, "{v}")?;
                first = false;
            }
        }
        for v in self.odd_factors() {
            if !first {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// A finite sum of monomials with nonzero coefficients in Q(√2, √3).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SuperPolynomial {
    terms: BTreeMap<SuperMonomial, Scalar>,
}

impl SuperPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::term(c, SuperMonomial::one())
    }

    pub fn var(v: VariableId) -> Self {
        Self::term(Scalar::one(), SuperMonomial::var(v))
    }

    pub fn term(c: Scalar, m: SuperMonomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, &c);
        p
    }

    /// Product of factors in the given order, sign-normalized.
    pub fn product(c: Scalar, factors: &[VariableId]) -> Self {
        match SuperMonomial::from_factors(factors) {
            Some((neg, m)) => Self::term(if neg { -c } else { c }, m),
            None => Self::zero(),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (SuperMonomial, Scalar)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    /// Add `c · m` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: SuperMonomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    fn add_signed(&mut self, m: SuperMonomial, c: &Scalar, negative: bool) {
        if negative {
            self.add_term(m, &-c);
        } else {
            self.add_term(m, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SuperMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &SuperMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SuperPolynomial {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn parity(&self) -> Parity {
        let mut seen: Option<Parity> = None;
        for m in self.terms.keys() {
            let p = m.parity();
            match seen {
                None => seen = Some(p),
                Some(s) if s != p => return Parity::Mixed,
                _ => {}
            }
        }
        seen.unwrap_or(Parity::Even)
    }

    /// Split into (even part, odd part).
    pub fn homogeneous_parts(&self) -> (SuperPolynomial, SuperPolynomial) {
        let mut even = Self::zero();
        let mut odd = Self::zero();
        for (m, c) in &self.terms {
            let target = if m.parity() == Parity::Even {
                &mut even
            } else {
                &mut odd
            };
            target.terms.insert(m.clone(), c.clone());
        }
        (even, odd)
    }

    pub fn max_even_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.even_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn variables(&self) -> std::collections::BTreeSet<VariableId> {
        self.terms.keys().flat_map(|m| m.variables()).collect()
    }

    /// Left derivative `→∂_v` for an odd variable `v`.
    pub fn left_deriv_odd(&self, v: VariableId) -> Result<Self> {
        if !v.is_odd() {
            return Err(Error::WrongParity {
                expected: "odd",
                var: v,
            });
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((below, _, rest)) = m.remove_odd(v) {
                out.add_signed(rest, c, below % 2 == 1);
            }
        }
        Ok(out)
    }

    /// Right derivative `←∂_v` for an odd variable `v`.
    pub fn right_deriv_odd(&self, v: VariableId) -> Result<Self> {
        if !v.is_odd() {
            return Err(Error::WrongParity {
                expected: "odd",
                var: v,
            });
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((_, above, rest)) = m.remove_odd(v) {
                out.add_signed(rest, c, above % 2 == 1);
            }
        }
        Ok(out)
    }

    /// Ordinary partial derivative in an even variable.
    pub fn deriv_even(&self, v: VariableId) -> Result<Self> {
        if v.is_odd() {
            return Err(Error::WrongParity {
                expected: "even",
                var: v,
            });
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let Some(pos) = m.even.iter().position(|(w, _)| *w == v) else {
                continue;
            };
            let mut rest = m.clone();
            let exp = rest.even[pos].1;
            if exp == 1 {
                rest.even.remove(pos);
            } else {
                rest.even[pos].1 -= 1;
            }
            out.add_term(rest, &c.scale_int(exp as i64));
        }
        Ok(out)
    }
}

impl Add for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Add for SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(self, rhs: SuperPolynomial) -> SuperPolynomial {
        &self + &rhs
    }
}

impl Sub for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl Sub for SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(self, rhs: SuperPolynomial) -> SuperPolynomial {
        &self - &rhs
    }
}

impl Neg for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        SuperPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        -&self
    }
}

impl Mul for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn mul(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if let Some((neg, m)) = ma.mul(mb) {
                    out.add_signed(m, &(ca * cb), neg);
                }
            }
        }
        out
    }
}

impl Mul for SuperPolynomial {
    type Output = SuperPolynomial;
    fn mul(self, rhs: SuperPolynomial) -> SuperPolynomial {
        &self * &rhs
    }
}

impl fmt::Display for SuperPolynomial {
    /// Prints in the expression grammar, so the output parses back to the
    /// same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if c.is_compound() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "({c})")?;
                if !m.is_one() {
                    write!(f, "*{m}")?;
                }
                continue;
            }
            let negative = c
                .coords()
                .iter()
                .any(|q| num_traits::Signed::is_negative(q));
            let mag = if negative { -c } else { c.clone() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperPolynomial({self})")
    }
}

impl Serialize for SuperPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: usize) -> SuperPolynomial {
        SuperPolynomial::var(VariableId::theta(i))
    }

    fn e(src: &str) -> SuperPolynomial {
        parse_expression(src, None).unwrap()
    }

    #[test]
    fn anticommuting_generators() {
        assert_eq!(&t(1) * &t(2), e("T1*T2"));
        assert_eq!(&t(2) * &t(1), -e("T1*T2"));
        assert!((&t(1) * &t(1)).is_zero());
    }

    #[test]
    fn odd_element_squares_to_zero() {
        let a = &t(1) + &(&(&t(2) * &t(3)) * &t(4));
        assert!((&a * &a).is_zero());
    }

    #[test]
    fn left_derivative_signs() {
        let th = VariableId::theta;
        assert_eq!(e("T1*T2").left_deriv_odd(th(1)).unwrap(), e("T2"));
        assert_eq!(e("T1*T2").left_deriv_odd(th(2)).unwrap(), e("-T1"));
        assert_eq!(
            e("T1*T2*T3 + T2").left_deriv_odd(th(2)).unwrap(),
            e("-T1*T3 + 1")
        );
        assert!(e("T1").left_deriv_odd(VariableId::q(1)).is_err());
    }

    #[test]
    fn right_derivative_signs() {
        let th = VariableId::theta;
        assert_eq!(e("T1*T2").right_deriv_odd(th(2)).unwrap(), e("T1"));
        assert_eq!(e("T1*T2").right_deriv_odd(th(1)).unwrap(), e("-T2"));
        assert!(e("T1").right_deriv_odd(VariableId::x(1)).is_err());
    }

    #[test]
    fn right_and_left_derivatives_differ_by_parity_sign() {
        // every Θ-monomial up to degree 4 in four variables
        for mask in 0u64..16 {
            let m = SuperPolynomial::term(Scalar::one(), SuperMonomial::from_theta_mask(mask));
            let g = mask.count_ones();
            for i in 1..=4 {
                let v = VariableId::theta(i);
                let left = m.left_deriv_odd(v).unwrap();
                let right = m.right_deriv_odd(v).unwrap();
                let expected = if (g + 1) % 2 == 0 { left } else { -left };
                assert_eq!(right, expected, "mask {mask:b}, var {v}");
            }
        }
    }

    #[test]
    fn even_derivative() {
        let q1 = VariableId::q(1);
        assert_eq!(e("q1*q1").deriv_even(q1).unwrap(), e("2*q1"));
        assert!(e("q2").deriv_even(q1).unwrap().is_zero());
        assert_eq!(e("q1*T2").deriv_even(q1).unwrap(), e("T2"));
        assert!(e("T1").deriv_even(VariableId::theta(1)).is_err());
    }

    #[test]
    fn parity_classification() {
        assert_eq!(e("T1*T2").parity(), Parity::Even);
        assert_eq!(e("T1 + T2*T3*T4").parity(), Parity::Odd);
        assert_eq!(e("1 + T1").parity(), Parity::Mixed);
        assert_eq!(SuperPolynomial::zero().parity(), Parity::Even);
    }

    #[test]
    fn mixed_families_order() {
        // θ_1 Θ_2 q_1 → q_1 Θ_2 θ_1 with one transposition of odd factors
        let p = SuperPolynomial::product(
            Scalar::one(),
            &[
                VariableId::theta_small(1),
                VariableId::theta(2),
                VariableId::q(1),
            ],
        );
        assert_eq!(p, e("-q1*T2*th1"));
        assert_eq!(p.to_string(), "-q1*T2*th1");
    }
}
