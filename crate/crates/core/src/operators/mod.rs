//! Normal-ordered differential operators on the Grassmann algebra generated
//! by `Θ_1 … Θ_N`.
//!
//! A term `c · Θ_{i1}…Θ_{ik} ∂_{j1}…∂_{jl}` is stored as a pair of bitmasks
//! `(theta, deriv)` with both index lists ascending; all multiplications stand
//! left of all (left) derivatives. Every linear map on the `2^N`-dimensional
//! algebra has exactly one such normal form, so operator equality is map
//! equality.

mod build;
mod verify;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalars::Scalar;
use crate::superpoly::{Family, Parity, SuperMonomial, SuperPolynomial};

pub use build::{build_auxiliary, build_brst, build_delta, build_generators, Auxiliary, DeltaKind};
pub use verify::{
    contraction_identities, verify_compatibility, verify_degenerate, verify_superalgebra,
    CheckResult, CheckStatus, CompatibilityReport, DegenerateReport, SuperalgebraReport,
    CHECK_NAMES,
};

/// Largest supported number of odd generators.
pub const MAX_DIM: usize = 64;

/// Element of the Grassmann algebra: `Θ`-monomial bitmask to coefficient.
pub type GrassmannVector = BTreeMap<u64, Scalar>;

#[inline]
fn odd_sign(n: u32) -> bool {
    n % 2 == 1
}

/// Number of set bits of `mask` strictly above bit `i`.
#[inline]
fn count_above(mask: u64, i: u32) -> u32 {
    if i >= 63 {
        0
    } else {
        (mask >> (i + 1)).count_ones()
    }
}

/// Number of set bits of `mask` strictly below bit `i`.
#[inline]
fn count_below(mask: u64, i: u32) -> u32 {
    (mask & ((1u64 << i) - 1)).count_ones()
}

/// Sign of concatenating two ascending index sets `left · right` and sorting.
/// `None` if they overlap.
#[inline]
fn concat_sign(left: u64, right: u64) -> Option<bool> {
    if left & right != 0 {
        return None;
    }
    let mut swaps = 0;
    let mut rest = right;
    while rest != 0 {
        let b = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += count_above(left, b);
    }
    Some(odd_sign(swaps))
}

/// Apply the composite derivative `∂_{j1}∘…∘∂_{jl}` (ascending `deriv`) to the
/// monomial `mask`. Returns the sign and the remaining monomial.
#[inline]
fn apply_derivs(deriv: u64, mask: u64) -> Option<(bool, u64)> {
    if deriv & !mask != 0 {
        return None;
    }
    let mut m = mask;
    let mut negative = false;
    // rightmost derivative acts first: descending index order
    let mut rest = deriv;
    while rest != 0 {
        let j = 63 - rest.leading_zeros();
        rest &= !(1u64 << j);
        negative ^= odd_sign(count_below(m, j));
        m &= !(1u64 << j);
    }
    Some((negative, m))
}

/// Normal order `∂_B ∘ Θ_K` as a list of `(negative, theta, deriv)`.
fn reorder(b: u64, k: u64) -> Vec<(bool, u64, u64)> {
    // multiply Θ_∅ ∂_B on the right by Θ_k, one factor at a time
    let mut terms = vec![(false, 0u64, b)];
    let mut rest = k;
    while rest != 0 {
        let idx = rest.trailing_zeros();
        rest &= rest - 1;
        let bit = 1u64 << idx;
        let mut next = Vec::with_capacity(terms.len() * 2);
        for (neg, th, de) in terms {
            // Θ_A ∂_B Θ_k = (-1)^{|B|} Θ_A Θ_k ∂_B + [k ∈ B] (-1)^{#B>k} Θ_A ∂_{B\k}
            if th & bit == 0 {
                let s = odd_sign(de.count_ones()) ^ odd_sign(count_above(th, idx));
                next.push((neg ^ s, th | bit, de));
            }
            if de & bit != 0 {
                let s = odd_sign(count_above(de, idx));
                next.push((neg ^ s, th, de & !bit));
            }
        }
        terms = next;
    }
    terms
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrassmannOperator {
    dim: usize,
    terms: BTreeMap<(u64, u64), Scalar>,
}

impl GrassmannOperator {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        GrassmannOperator {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::constant(dim, Scalar::one())
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        let mut op = Self::zero(dim);
        op.add_term(0, 0, &c);
        op
    }

    /// Left multiplication by `Θ_i` (1-based).
    pub fn theta(dim: usize, i: usize) -> Self {
        Self::word(dim, Scalar::one(), &[i], &[])
    }

    /// Left derivative `∂/∂Θ_i` (1-based).
    pub fn deriv(dim: usize, i: usize) -> Self {
        Self::word(dim, Scalar::one(), &[], &[i])
    }

    /// `c · Θ_{t1}…Θ_{tk} ∂_{d1}…∂_{dl}` with factors in the given (arbitrary)
    /// order, normal-ordered with the sign of the sorting permutations.
    pub fn word(dim: usize, c: Scalar, thetas: &[usize], derivs: &[usize]) -> Self {
        let mut op = Self::zero(dim);
        let to_mask = |idx: &[usize]| -> Option<(bool, u64)> {
            let mut mask = 0u64;
            let mut negative = false;
            for &i in idx {
                assert!((1..=dim).contains(&i), "index {i} out of range 1..={dim}");
                negative ^= concat_sign(mask, 1u64 << (i - 1))?;
                mask |= 1u64 << (i - 1);
            }
            Some((negative, mask))
        };
        if let (Some((s1, th)), Some((s2, de))) = (to_mask(thetas), to_mask(derivs)) {
            let c = if s1 ^ s2 { -c } else { c };
            op.add_term(th, de, &c);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
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

    /// Terms `((theta_mask, deriv_mask), coefficient)`, bit `i-1` standing for
    /// index `i`.
    pub fn terms(&self) -> impl Iterator<Item = ((u64, u64), &Scalar)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coefficient(&self, theta: u64, deriv: u64) -> Scalar {
        self.terms.get(&(theta, deriv)).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, theta: u64, deriv: u64, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((theta, deriv)) {
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

    fn add_signed(&mut self, theta: u64, deriv: u64, c: &Scalar, negative: bool) {
        if negative {
            self.add_term(theta, deriv, &-c);
        } else {
            self.add_term(theta, deriv, c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        GrassmannOperator {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Highest number of derivatives in any term.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|(_, d)| d.count_ones())
            .max()
            .unwrap_or(0)
    }

    /// Grassmann parity; the zero operator is even.
    pub fn parity(&self) -> Parity {
        let mut seen = None;
        for (th, de) in self.terms.keys() {
            let p = Parity::from_bit(th.count_ones() + de.count_ones());
            match seen {
                None => seen = Some(p),
                Some(s) if s != p => return Parity::Mixed,
                _ => {}
            }
        }
        seen.unwrap_or(Parity::Even)
    }

    fn check_dim(&self, other: &GrassmannOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// Operator product `self ∘ other` in normal form.
    pub fn compose(&self, other: &GrassmannOperator) -> Result<GrassmannOperator> {
        self.check_dim(other)?;
        let dim = self.dim;
        let left: Vec<_> = self.terms.iter().collect();
        let result = left
            .par_iter()
            .fold(
                || (GrassmannOperator::zero(dim), HashMap::new()),
                |(mut acc, mut cache), ((a, b), c1)| {
                    for ((k, l), c2) in &other.terms {
                        let reordered: &Vec<(bool, u64, u64)> =
                            cache.entry((*b, *k)).or_insert_with(|| reorder(*b, *k));
                        if reordered.is_empty() {
                            continue;
                        }
                        let c = *c1 * c2;
                        for &(neg, th, de) in reordered {
                            let Some(s1) = concat_sign(*a, th) else {
                                continue;
                            };
                            let Some(s2) = concat_sign(de, *l) else {
                                continue;
                            };
                            acc.add_signed(a | th, de | l, &c, neg ^ s1 ^ s2);
                        }
                    }
                    (acc, cache)
                },
            )
            .map(|(acc, _)| acc)
            .reduce(|| GrassmannOperator::zero(dim), |x, y| &x + &y);
        Ok(result)
    }

    /// Graded commutator `ab − (−1)^{g(a)g(b)} ba`: the anticommutator for two
    /// odd operators and the commutator otherwise.
    pub fn graded_bracket(&self, other: &GrassmannOperator) -> Result<GrassmannOperator> {
        self.check_dim(other)?;
        let (Some(ga), Some(gb)) = (self.parity().bit(), other.parity().bit()) else {
            return Err(Error::MixedParity);
        };
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        Ok(if ga * gb == 1 { &ab + &ba } else { &ab - &ba })
    }

    /// Act on a single basis monomial.
    pub fn apply_mask(&self, mask: u64) -> GrassmannVector {
        let mut out = GrassmannVector::new();
        for ((th, de), c) in &self.terms {
            let Some((s1, rest)) = apply_derivs(*de, mask) else {
                continue;
            };
            let Some(s2) = concat_sign(*th, rest) else {
                continue;
            };
            let c = if s1 ^ s2 { -c } else { c.clone() };
            add_to_vector(&mut out, th | rest, &c);
        }
        out
    }

    pub fn apply_vector(&self, v: &GrassmannVector) -> GrassmannVector {
        let mut out = GrassmannVector::new();
        for (mask, c) in v {
            for (m, x) in self.apply_mask(*mask) {
                add_to_vector(&mut out, m, &(&x * c));
            }
        }
        out
    }

    /// Act on a polynomial in `Θ_1 … Θ_dim`.
    pub fn apply(&self, p: &SuperPolynomial) -> Result<SuperPolynomial> {
        Ok(vector_to_poly(
            &self.apply_vector(&poly_to_vector(p, self.dim)?),
        ))
    }

    /// Images of all `2^dim` basis monomials.
    pub fn action_on_basis(&self) -> Vec<GrassmannVector> {
        assert!(self.dim < 32, "basis too large to enumerate");
        (0..1u64 << self.dim)
            .into_par_iter()
            .map(|m| self.apply_mask(m))
            .collect()
    }

    /// Recover the unique normal form of a linear map given by its action on
    /// basis monomials.
    pub fn from_action(dim: usize, action: impl Fn(u64) -> GrassmannVector) -> Self {
        assert!(dim < 32, "basis too large to enumerate");
        let mut masks: Vec<u64> = (0..1u64 << dim).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        let mut op = GrassmannOperator::zero(dim);
        for m in masks {
            let target = action(m);
            let current = op.apply_mask(m);
            // only terms with derivative part exactly `m` remain unexplained;
            // ∂_M Θ_M = (−1)^{k(k−1)/2}
            let k = m.count_ones();
            let negative = odd_sign(k * (k.saturating_sub(1)) / 2);
            let mut residual = target;
            for (mask, c) in current {
                add_to_vector(&mut residual, mask, &-c);
            }
            for (th, c) in residual {
                op.add_signed(th, m, &c, negative);
            }
        }
        op
    }

    /// `k` with `self = k · other`, if one exists. `None` for a zero `other`
    /// unless `self` is zero too, in which case `0`.
    pub fn ratio_to(&self, other: &GrassmannOperator) -> Option<Scalar> {
        let Some((key, base)) = other.terms.iter().next() else {
            return self.is_zero().then(Scalar::zero);
        };
        let here = self.terms.get(key).cloned().unwrap_or_default();
        let k = here.div(base).ok()?;
        (other.scale(&k) == *self).then_some(k)
    }
}

fn add_to_vector(v: &mut GrassmannVector, mask: u64, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = v.entry(mask).or_default();
    *slot += c;
    if slot.is_zero() {
        v.remove(&mask);
    }
}

/// Convert a polynomial in `Θ_1 … Θ_dim` to a vector of basis monomials.
pub fn poly_to_vector(p: &SuperPolynomial, dim: usize) -> Result<GrassmannVector> {
    let mut out = GrassmannVector::new();
    for (m, c) in p.terms() {
        for v in m.variables() {
            if v.family != Family::ThetaBig {
                return Err(Error::WrongFamily {
                    var: v,
                    reason: "operators act on Θ variables only".into(),
                });
            }
            if v.index > dim {
                return Err(Error::DimensionMismatch {
                    left: v.index,
                    right: dim,
                });
            }
        }
        let mask = m.theta_mask().expect("checked above");
        add_to_vector(&mut out, mask, c);
    }
    Ok(out)
}

pub fn vector_to_poly(v: &GrassmannVector) -> SuperPolynomial {
    SuperPolynomial::from_terms(
        v.iter()
            .map(|(m, c)| (SuperMonomial::from_theta_mask(*m), c.clone())),
    )
}

impl Add for &GrassmannOperator {
    type Output = GrassmannOperator;
    fn add(self, rhs: &GrassmannOperator) -> GrassmannOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let (mut out, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for ((th, de), c) in &small.terms {
            out.add_term(*th, *de, c);
        }
        out
    }
}

impl Sub for &GrassmannOperator {
    type Output = GrassmannOperator;
    fn sub(self, rhs: &GrassmannOperator) -> GrassmannOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for ((th, de), c) in &rhs.terms {
            out.add_term(*th, *de, &-c);
        }
        out
    }
}

impl Neg for &GrassmannOperator {
    type Output = GrassmannOperator;
    fn neg(self) -> GrassmannOperator {
        GrassmannOperator {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

fn write_factors(
    f: &mut fmt::Formatter<'_>,
    prefix: &str,
    mask: u64,
    first: &mut bool,
) -> fmt::Result {
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        if !*first {
            write!(f, "*")?;
        }
        write!(f, "{prefix}{}", i + 1)?;
        *first = false;
    }
    Ok(())
}

impl fmt::Display for GrassmannOperator {
    /// `T3*d2` stands for `Θ_3 ∂/∂Θ_2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, ((th, de), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let bare = *th == 0 && *de == 0;
            if c.is_compound() {
                write!(f, "({c})")?;
            } else if !c.is_one() || bare {
                write!(f, "{c}")?;
            }
            let mut first = c.is_one() && !bare;
            if !first && !bare {
                write!(f, "*")?;
                first = true;
            }
            write_factors(f, "T", *th, &mut first)?;
            write_factors(f, "d", *de, &mut first)?;
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrassmannOperator[{}]({self})", self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superpoly::parse_expression;

    fn e(src: &str) -> SuperPolynomial {
        parse_expression(src, None).unwrap()
    }

    #[test]
    fn canonical_anticommutator() {
        let d1 = GrassmannOperator::deriv(2, 1);
        let t1 = GrassmannOperator::theta(2, 1);
        let t2 = GrassmannOperator::theta(2, 2);
        // ∂_1 Θ_1 = 1 − Θ_1 ∂_1
        let expected = &GrassmannOperator::identity(2)
            - &GrassmannOperator::word(2, Scalar::one(), &[1], &[1]);
        assert_eq!(d1.compose(&t1).unwrap(), expected);
        // ∂_1 Θ_2 = −Θ_2 ∂_1
        assert_eq!(
            d1.compose(&t2).unwrap(),
            GrassmannOperator::word(2, Scalar::from_int(-1), &[2], &[1])
        );
        assert_eq!(
            d1.graded_bracket(&t1).unwrap(),
            GrassmannOperator::identity(2)
        );
    }

    #[test]
    fn word_normalizes_order() {
        let a = GrassmannOperator::word(3, Scalar::one(), &[2, 1], &[3, 1]);
        let b = GrassmannOperator::word(3, Scalar::one(), &[1, 2], &[1, 3]);
        assert_eq!(a, b);
        assert!(GrassmannOperator::word(3, Scalar::one(), &[1, 1], &[]).is_zero());
    }

    #[test]
    fn apply_derivatives_in_order() {
        // ∂_1∘∂_2 (Θ_1Θ_2): ∂_2 gives −Θ_1, then ∂_1 gives −1
        let op = GrassmannOperator::word(2, Scalar::one(), &[], &[1, 2]);
        assert_eq!(op.apply(&e("T1*T2")).unwrap(), e("-1"));
        let op = GrassmannOperator::word(2, Scalar::one(), &[], &[2, 1]);
        assert_eq!(op.apply(&e("T1*T2")).unwrap(), e("1"));
    }

    #[test]
    fn apply_rejects_foreign_variables() {
        let op = GrassmannOperator::identity(2);
        assert!(op.apply(&e("T3")).is_err());
        assert!(op.apply(&e("q1")).is_err());
        assert!(op.apply(&e("th1")).is_err());
    }

    #[test]
    fn mixed_parity_is_rejected() {
        let mixed = &GrassmannOperator::identity(2) + &GrassmannOperator::theta(2, 1);
        assert_eq!(mixed.parity(), Parity::Mixed);
        assert!(matches!(
            mixed.graded_bracket(&GrassmannOperator::identity(2)),
            Err(Error::MixedParity)
        ));
        assert!(GrassmannOperator::identity(2)
            .compose(&GrassmannOperator::identity(3))
            .is_err());
    }

    #[test]
    fn normal_form_from_action() {
        let op = &GrassmannOperator::word(3, Scalar::from_int(2), &[1, 3], &[2])
            + &GrassmannOperator::word(3, Scalar::sqrt2(), &[], &[1, 2, 3]);
        let rebuilt = GrassmannOperator::from_action(3, |m| op.apply_mask(m));
        assert_eq!(rebuilt, op);
    }

    #[test]
    fn ratio() {
        let a = GrassmannOperator::word(2, Scalar::from_int(3), &[1], &[2]);
        let b = GrassmannOperator::word(2, Scalar::one(), &[1], &[2]);
        assert_eq!(a.ratio_to(&b), Some(Scalar::from_int(3)));
        assert_eq!(b.ratio_to(&(&b + &GrassmannOperator::identity(2))), None);
    }

    #[test]
    fn display() {
        let op = GrassmannOperator::word(3, Scalar::from_int(-2), &[3], &[2]);
        assert_eq!(op.to_string(), "-2*T3*d2");
        assert_eq!(GrassmannOperator::identity(2).to_string(), "1");
        assert_eq!(GrassmannOperator::theta(2, 1).to_string(), "T1");
    }
}
