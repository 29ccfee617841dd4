//! Canonical and linear Poisson brackets, even and odd, together with an
//! exact randomized checker for the graded bracket axioms.
//!
//! Every bracket is evaluated term by term from explicit derivative formulas:
//!
//! * linear odd: `{A,B} = A ←∂_{Θ_a} c_{ab}^g Θ_g →∂_{Θ_b} B`
//! * linear even: `{A,B} = ∂_{X_a}A · c_{ab}^g X_g · ∂_{X_b}B`
//! * canonical even: `{A,B} = Σ_a A(←∂_{q_a} →∂_{p_a} − ←∂_{p_a} →∂_{q_a})B`
//! * canonical odd: `{A,B} = Σ_a A(←∂_{q_a} →∂_{θ_a} − ←∂_{θ_a} →∂_{q_a})B`

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::{KillingMetric, StructureConstants, ValidationReport};
use crate::scalars::{Rational, Scalar};
use crate::superpoly::{Family, Parity, SuperMonomial, SuperPolynomial, VariableId};

#[derive(Clone, Debug)]
pub enum BracketKind {
    /// Canonical even bracket on `(q_a, p_a)`, `a = 1..=dim`.
    CanonicalEven { dim: usize },
    /// Canonical odd bracket on `(q_a, θ_a)`, `a = 1..=dim`.
    CanonicalOdd { dim: usize },
    /// Linear even bracket on `X_a`.
    LinearEven(StructureConstants),
    /// Linear odd bracket on `Θ_a`.
    LinearOdd(StructureConstants),
}

impl BracketKind {
    pub fn dim(&self) -> usize {
        match self {
            BracketKind::CanonicalEven { dim } | BracketKind::CanonicalOdd { dim } => *dim,
            BracketKind::LinearEven(sc) | BracketKind::LinearOdd(sc) => sc.dim(),
        }
    }

    /// Grassmann parity of the bracket itself: 0 for even, 1 for odd.
    pub fn shift(&self) -> u32 {
        match self {
            BracketKind::CanonicalEven { .. } | BracketKind::LinearEven(_) => 0,
            BracketKind::CanonicalOdd { .. } | BracketKind::LinearOdd(_) => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BracketKind::CanonicalEven { .. } => "canonical-even",
            BracketKind::CanonicalOdd { .. } => "canonical-odd",
            BracketKind::LinearEven(_) => "linear-even",
            BracketKind::LinearOdd(_) => "linear-odd",
        }
    }

    /// Variable families the bracket acts on.
    pub fn families(&self) -> &'static [Family] {
        match self {
            BracketKind::CanonicalEven { .. } => &[Family::Q, Family::P],
            BracketKind::CanonicalOdd { .. } => &[Family::Q, Family::ThetaSmall],
            BracketKind::LinearEven(_) => &[Family::X],
            BracketKind::LinearOdd(_) => &[Family::ThetaBig],
        }
    }

    fn check_operand(&self, p: &SuperPolynomial) -> Result<()> {
        let dim = self.dim();
        for v in p.variables() {
            if !self.families().contains(&v.family) {
                return Err(Error::WrongFamily {
                    var: v,
                    reason: format!("the {} bracket does not act on it", self.name()),
                });
            }
            if v.index > dim {
                return Err(Error::DimensionMismatch {
                    left: v.index,
                    right: dim,
                });
            }
        }
        Ok(())
    }
}

/// Evaluate `{a, b}` for the given bracket.
pub fn bracket(
    kind: &BracketKind,
    a: &SuperPolynomial,
    b: &SuperPolynomial,
) -> Result<SuperPolynomial> {
    kind.check_operand(a)?;
    kind.check_operand(b)?;
    Ok(match kind {
        BracketKind::LinearOdd(sc) => linear(sc, a, b, true),
        BracketKind::LinearEven(sc) => linear(sc, a, b, false),
        BracketKind::CanonicalEven { dim } => canonical(*dim, a, b, VariableId::p),
        BracketKind::CanonicalOdd { dim } => canonical(*dim, a, b, VariableId::theta_small),
    })
}

fn linear(
    sc: &StructureConstants,
    a: &SuperPolynomial,
    b: &SuperPolynomial,
    odd: bool,
) -> SuperPolynomial {
    let n = sc.dim();
    let var = if odd {
        VariableId::theta
    } else {
        VariableId::x
    };
    let deriv = |p: &SuperPolynomial, v: VariableId, right: bool| {
        if !odd {
            p.deriv_even(v)
        } else if right {
            p.right_deriv_odd(v)
        } else {
            p.left_deriv_odd(v)
        }
        .expect("variable parity matches the bracket")
    };
    let da: Vec<_> = (0..n).map(|i| deriv(a, var(i + 1), true)).collect();
    let db: Vec<_> = (0..n).map(|i| deriv(b, var(i + 1), false)).collect();
    let mut out = SuperPolynomial::zero();
    for (i, left) in da.iter().enumerate() {
        if left.is_zero() {
            continue;
        }
        for (j, right) in db.iter().enumerate() {
            if right.is_zero() {
                continue;
            }
            let middle = SuperPolynomial::from_terms(
                sc.bracket(i, j)
                    .map(|(g, c)| (SuperMonomial::var(var(g + 1)), c.clone())),
            );
            if middle.is_zero() {
                continue;
            }
            out = &out + &(&(left * &middle) * right);
        }
    }
    out
}

fn canonical(
    dim: usize,
    a: &SuperPolynomial,
    b: &SuperPolynomial,
    partner: fn(usize) -> VariableId,
) -> SuperPolynomial {
    let right = |p: &SuperPolynomial, v: VariableId| {
        if v.is_odd() {
            p.right_deriv_odd(v)
        } else {
            p.deriv_even(v)
        }
        .expect("parity checked")
    };
    let left = |p: &SuperPolynomial, v: VariableId| {
        if v.is_odd() {
            p.left_deriv_odd(v)
        } else {
            p.deriv_even(v)
        }
        .expect("parity checked")
    };
    let mut out = SuperPolynomial::zero();
    for i in 1..=dim {
        let (q, mom) = (VariableId::q(i), partner(i));
        let first = &right(a, q) * &left(b, mom);
        let second = &right(a, mom) * &left(b, q);
        out = &(&out + &first) - &second;
    }
    out
}

/// `{Θ_a, Θ_b} = c_{ab}^g Θ_g` for every pair, evaluated through the
/// derivative formula.
pub fn check_generator_relation(sc: &StructureConstants) -> ValidationReport {
    let kind = BracketKind::LinearOdd(sc.clone());
    let n = sc.dim();
    let mut report = ValidationReport::new("linear odd bracket on generators");
    for a in 0..n {
        for b in 0..n {
            let lhs = bracket(
                &kind,
                &SuperPolynomial::var(VariableId::theta(a + 1)),
                &SuperPolynomial::var(VariableId::theta(b + 1)),
            )
            .expect("generators are in range");
            let rhs = SuperPolynomial::from_terms(
                sc.bracket(a, b)
                    .map(|(g, c)| (SuperMonomial::var(VariableId::theta(g + 1)), c.clone())),
            );
            if let Some(w) = first_coefficient(&(&lhs - &rhs)) {
                report.push("generator relation", vec![a, b], w);
            }
        }
    }
    report
}

/// Leading coefficient of a nonzero residual, used as a report witness.
fn first_coefficient(p: &SuperPolynomial) -> Option<Scalar> {
    p.terms().next().map(|(_, c)| c.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Realization {
    Even,
    Odd,
}

/// Composite generators on canonical variables: `X_a = c_{ab}^g q_b p_g`
/// (even) or `Θ_a = c_{ab}^g q_b θ_g` (odd).
pub fn bilinear_realization(kind: Realization, sc: &StructureConstants) -> Vec<SuperPolynomial> {
    let momentum = match kind {
        Realization::Even => VariableId::p,
        Realization::Odd => VariableId::theta_small,
    };
    (0..sc.dim())
        .map(|a| {
            let mut out = SuperPolynomial::zero();
            for b in 0..sc.dim() {
                for (g, c) in sc.bracket(a, b) {
                    out = &out
                        + &SuperPolynomial::product(
                            c.clone(),
                            &[VariableId::q(b + 1), momentum(g + 1)],
                        );
                }
            }
            out
        })
        .collect()
}

/// Checks that the canonical bracket of the composite generators reproduces
/// the linear bracket: `{R_a, R_b} = c_{ab}^g R_g`.
pub fn check_reduction(kind: Realization, sc: &StructureConstants) -> ValidationReport {
    let composites = bilinear_realization(kind, sc);
    let n = sc.dim();
    let canonical = match kind {
        Realization::Even => BracketKind::CanonicalEven { dim: n },
        Realization::Odd => BracketKind::CanonicalOdd { dim: n },
    };
    let mut report = ValidationReport::new(match kind {
        Realization::Even => "even bilinear reduction",
        Realization::Odd => "odd bilinear reduction",
    });
    for a in 0..n {
        for b in 0..n {
            let lhs = bracket(&canonical, &composites[a], &composites[b]).expect("in range");
            let mut rhs = SuperPolynomial::zero();
            for (g, c) in sc.bracket(a, b) {
                rhs = &rhs + &composites[g].scale(c);
            }
            let diff = &lhs - &rhs;
            if let Some(w) = first_coefficient(&diff) {
                report.push("reduction", vec![a, b], w);
            }
        }
    }
    report
}

/// `C = g^{ab} X_a X_b`.
pub fn even_casimir(sc: &StructureConstants, km: &KillingMetric) -> Result<SuperPolynomial> {
    if sc.dim() != km.dim() {
        return Err(Error::DimensionMismatch {
            left: sc.dim(),
            right: km.dim(),
        });
    }
    let inv = km.require_inverse()?;
    let mut out = SuperPolynomial::zero();
    for (a, row) in inv.iter().enumerate() {
        for (b, g) in row.iter().enumerate() {
            if !g.is_zero() {
                out = &out
                    + &SuperPolynomial::product(
                        g.clone(),
                        &[VariableId::x(a + 1), VariableId::x(b + 1)],
                    );
            }
        }
    }
    Ok(out)
}

/// `{X_a, C} = 0` for every generator.
pub fn check_casimir(sc: &StructureConstants, km: &KillingMetric) -> Result<ValidationReport> {
    let casimir = even_casimir(sc, km)?;
    let kind = BracketKind::LinearEven(sc.clone());
    let mut report = ValidationReport::new("even Casimir annihilation");
    for a in 0..sc.dim() {
        let r = bracket(&kind, &SuperPolynomial::var(VariableId::x(a + 1)), &casimir)?;
        if let Some(w) = first_coefficient(&r) {
            report.push("casimir", vec![a], w);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Axiom checker

/// Shape of the random polynomials fed to the axiom checker.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleShape {
    /// Terms per random polynomial, drawn uniformly from `1..=max_terms`.
    pub max_terms: usize,
    /// Maximum total degree in the even variables.
    pub max_even_degree: u32,
    /// Numerators and denominators of coefficients are bounded by this.
    pub coefficient_bound: i64,
}

impl Default for SampleShape {
    fn default() -> Self {
        SampleShape {
            max_terms: 3,
            max_even_degree: 3,
            coefficient_bound: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub inputs: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub samples: usize,
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomSuiteReport {
    pub bracket: String,
    pub dim: usize,
    pub seed: u64,
    pub samples: usize,
    pub axioms: Vec<AxiomReport>,
}

impl AxiomSuiteReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(AxiomReport::passed)
    }
}

pub const AXIOMS: [&str; 5] = [
    "bilinearity",
    "parity",
    "graded-symmetry",
    "jacobi",
    "leibniz",
];

/// Independent random stream for sample `index`.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

fn random_coefficient(rng: &mut impl Rng, bound: i64) -> Scalar {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-bound..=bound);
    }
    let den = rng.gen_range(1..=bound);
    Scalar::from_rational(Rational::new(num.into(), den.into()))
}

/// Random polynomial of definite parity in the bracket's variables.
pub fn random_homogeneous(
    kind: &BracketKind,
    parity: u32,
    shape: &SampleShape,
    rng: &mut impl Rng,
) -> SuperPolynomial {
    let n = kind.dim();
    let families = kind.families();
    let odd_family = families.iter().copied().find(|f| f.is_odd());
    let even_families: Vec<Family> = families.iter().copied().filter(|f| !f.is_odd()).collect();
    let odd_count = if odd_family.is_some() { n } else { 0 };

    let terms = rng.gen_range(1..=shape.max_terms);
    let mut out = SuperPolynomial::zero();
    for _ in 0..terms {
        let degrees: Vec<usize> = (0..=odd_count)
            .filter(|k| *k as u32 % 2 == parity)
            .collect();
        if degrees.is_empty() {
            break;
        }
        let k = degrees[rng.gen_range(0..degrees.len())];
        let mut factors: Vec<VariableId> = Vec::new();
        if let Some(f) = odd_family {
            for i in sample(rng, n, k).into_iter() {
                factors.push(VariableId::new(f, i + 1));
            }
        }
        let even_degree = if even_families.is_empty() {
            0
        } else {
            rng.gen_range(0..=shape.max_even_degree)
        };
        for _ in 0..even_degree {
            let f = even_families[rng.gen_range(0..even_families.len())];
            factors.push(VariableId::new(f, rng.gen_range(1..=n)));
        }
        let c = random_coefficient(rng, shape.coefficient_bound);
        out = &out + &SuperPolynomial::product(c, &factors);
    }
    out
}

fn sign(exponent: u32) -> Scalar {
    if exponent % 2 == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

struct Triple {
    polys: [SuperPolynomial; 3],
    parities: [u32; 3],
    lambda: Scalar,
}

fn random_triple(kind: &BracketKind, shape: &SampleShape, rng: &mut impl Rng) -> Triple {
    let has_odd = kind.families().iter().any(|f| f.is_odd());
    let pick = |rng: &mut ChaCha8Rng| {
        let parity = if has_odd { rng.gen_range(0..2) } else { 0 };
        (random_homogeneous(kind, parity, shape, rng), parity)
    };
    let mut inner = ChaCha8Rng::seed_from_u64(rng.gen());
    let (a, ga) = pick(&mut inner);
    let (b, gb) = pick(&mut inner);
    let (c, gc) = pick(&mut inner);
    let lambda = random_coefficient(&mut inner, shape.coefficient_bound);
    Triple {
        polys: [a, b, c],
        parities: [ga, gb, gc],
        lambda,
    }
}

/// Evaluate all five axioms on one triple; returns per-axiom failures.
fn check_triple(kind: &BracketKind, t: &Triple) -> Result<[Option<AxiomFailure>; 5]> {
    let [a, b, c] = &t.polys;
    let [ga, gb, gc] = t.parities;
    let s = kind.shift();
    let br = |x: &SuperPolynomial, y: &SuperPolynomial| bracket(kind, x, y);
    let inputs = || t.polys.iter().map(ToString::to_string).collect::<Vec<_>>();
    let fail = |lhs: &SuperPolynomial, rhs: &SuperPolynomial| {
        (lhs != rhs).then(|| AxiomFailure {
            inputs: inputs(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        })
    };

    let ab = br(a, b)?;
    let ac = br(a, c)?;
    let ba = br(b, a)?;
    let bc = br(b, c)?;

    // linearity in each slot, with a scalar: {A, λB + C} and {λB + C, A}
    // (B and C may differ in parity; linearity does not care)
    let lb_c = &b.scale(&t.lambda) + c;
    let right_lhs = br(a, &lb_c)?;
    let right_rhs = &ab.scale(&t.lambda) + &ac;
    let ca = br(c, a)?;
    let left_lhs = br(&lb_c, a)?;
    let left_rhs = &ba.scale(&t.lambda) + &ca;
    let bilinearity = fail(&right_lhs, &right_rhs).or_else(|| fail(&left_lhs, &left_rhs));

    // g({A,B}) = g(A) + g(B) + shift, vacuous when the bracket vanishes
    let expected = Parity::from_bit(ga + gb + s);
    let parity = (!ab.is_zero() && ab.parity() != expected).then(|| AxiomFailure {
        inputs: inputs(),
        lhs: format!("{:?}", ab.parity()),
        rhs: format!("{expected:?}"),
    });

    // {A,B} = -(-1)^{(gA+s)(gB+s)} {B,A}
    let sym_rhs = ba.scale(&-sign((ga + s) * (gb + s)));
    let symmetry = fail(&ab, &sym_rhs);

    // Σ_cyclic (-1)^{(gA+s)(gC+s)} {A,{B,C}} = 0
    let jac = &(&br(a, &bc)?.scale(&sign((ga + s) * (gc + s)))
        + &br(b, &ca)?.scale(&sign((gb + s) * (ga + s))))
        + &br(c, &ab)?.scale(&sign((gc + s) * (gb + s)));
    let jacobi = fail(&jac, &SuperPolynomial::zero());

    // {A,BC} = {A,B}C + (-1)^{(gA+s)gB} B{A,C}
    let bc_prod = b * c;
    let leib_lhs = br(a, &bc_prod)?;
    let leib_rhs = &(&ab * c) + &(b * &ac).scale(&sign((ga + s) * gb));
    let leibniz = fail(&leib_lhs, &leib_rhs);

    Ok([bilinearity, parity, symmetry, jacobi, leibniz])
}

/// Exact check of the bracket axioms on `samples` seeded random triples of
/// homogeneous polynomials.
pub fn check_axioms(kind: &BracketKind, samples: usize, seed: u64) -> Result<AxiomSuiteReport> {
    check_axioms_with(kind, samples, seed, &SampleShape::default())
}

pub fn check_axioms_with(
    kind: &BracketKind,
    samples: usize,
    seed: u64,
    shape: &SampleShape,
) -> Result<AxiomSuiteReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let results: Vec<[Option<AxiomFailure>; 5]> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let triple = random_triple(kind, shape, &mut rng);
            check_triple(kind, &triple)
        })
        .collect::<Result<_>>()?;

    let axioms = AXIOMS
        .iter()
        .enumerate()
        .map(|(k, name)| AxiomReport {
            axiom: name.to_string(),
            samples,
            failures: results.iter().filter_map(|r| r[k].clone()).collect(),
        })
        .collect();
    Ok(AxiomSuiteReport {
        bracket: kind.name().to_string(),
        dim: kind.dim(),
        seed,
        samples,
        axioms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::catalog;
    use crate::superpoly::parse_expression;

    fn e(src: &str) -> SuperPolynomial {
        parse_expression(src, None).unwrap()
    }

    #[test]
    fn generators_of_so3() {
        let so3 = catalog("so3").unwrap();
        let odd = BracketKind::LinearOdd(so3.clone());
        assert_eq!(bracket(&odd, &e("T1"), &e("T2")).unwrap(), e("T3"));
        let even = BracketKind::LinearEven(so3);
        assert_eq!(bracket(&even, &e("X1"), &e("X2")).unwrap(), e("X3"));
    }

    #[test]
    fn nilpotent_cancellation() {
        // ←∂_1(T1T2) = -T2, ←∂_2(T1T2) = T1; the two surviving terms are
        // -T2 c_{13}^2 T2 + T1 c_{23}^1 T1 = 0
        let odd = BracketKind::LinearOdd(catalog("so3").unwrap());
        assert!(bracket(&odd, &e("T1*T2"), &e("T3")).unwrap().is_zero());
    }

    #[test]
    fn canonical_pairing() {
        let odd = BracketKind::CanonicalOdd { dim: 2 };
        assert_eq!(bracket(&odd, &e("q1"), &e("th1")).unwrap(), e("1"));
        assert_eq!(bracket(&odd, &e("th1"), &e("q1")).unwrap(), e("-1"));
        let even = BracketKind::CanonicalEven { dim: 2 };
        assert_eq!(bracket(&even, &e("q2"), &e("p2")).unwrap(), e("1"));
        assert!(bracket(&even, &e("q1"), &e("p2")).unwrap().is_zero());
    }

    #[test]
    fn operand_checks() {
        let odd = BracketKind::LinearOdd(catalog("so3").unwrap());
        assert!(matches!(
            bracket(&odd, &e("X1"), &e("T1")),
            Err(Error::WrongFamily { .. })
        ));
        assert!(matches!(
            bracket(&odd, &e("T4"), &e("T1")),
            Err(Error::DimensionMismatch { .. })
        ));
        let even = BracketKind::CanonicalEven { dim: 3 };
        assert!(bracket(&even, &e("th1"), &e("q1")).is_err());
    }

    #[test]
    fn odd_elements_have_vanishing_self_bracket() {
        let kind = BracketKind::LinearOdd(catalog("so3").unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_homogeneous(&kind, 1, &SampleShape::default(), &mut rng);
            assert!(bracket(&kind, &a, &a).unwrap().is_zero(), "{a}");
        }
    }

    #[test]
    fn random_polynomials_are_homogeneous() {
        let kind = BracketKind::CanonicalOdd { dim: 4 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for parity in [0, 1] {
            for _ in 0..50 {
                let p = random_homogeneous(&kind, parity, &SampleShape::default(), &mut rng);
                assert!(p.is_zero() || p.parity() == Parity::from_bit(parity));
                assert!(p.max_even_degree() <= 3);
            }
        }
    }

    #[test]
    fn odd_realization_of_so3() {
        let so3 = catalog("so3").unwrap();
        let r = bilinear_realization(Realization::Odd, &so3);
        assert_eq!(r[0], e("q2*th3 - q3*th2"));
        let zero = bilinear_realization(Realization::Even, &catalog("zero(3)").unwrap());
        assert!(zero.iter().all(SuperPolynomial::is_zero));
    }

    #[test]
    fn samples_must_be_positive() {
        let kind = BracketKind::CanonicalEven { dim: 2 };
        assert!(check_axioms(&kind, 0, 0).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let kind = BracketKind::LinearOdd(catalog("sl2").unwrap());
        let a = check_axioms(&kind, 10, 42).unwrap();
        let b = check_axioms(&kind, 10, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.passed());
    }
}
