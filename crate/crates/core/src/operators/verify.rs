use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::build::{
    build_auxiliary, build_brst, build_delta, build_generators, Auxiliary, DeltaKind,
};
use super::{add_to_vector, GrassmannOperator, GrassmannVector};
use crate::error::{Error, Result};
use crate::liealg::{KillingMetric, StructureConstants, Tensor3, ValidationReport};
use crate::scalars::Scalar;

/// Names of the superalgebra checks, in report order.
pub const CHECK_NAMES: [&str; 11] = [
    "contraction-identities",
    "nilpotency",
    "anticommutator-minus1-plus1",
    "anticommutator-minus3-plus3",
    "z-commutes-with-deltas",
    "d-grading",
    "z-commutes-with-d",
    "generator-invariance",
    "z-quadratic-casimir",
    "unlisted-anticommutators",
    "divergence",
];

const WITNESS_TERMS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    /// Offending normal-form differences, one line per failing identity.
    pub witness: Option<String>,
}

impl CheckResult {
    fn from_failures(name: &str, failures: Vec<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            status: if failures.is_empty() {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            witness: (!failures.is_empty()).then(|| failures.join("\n")),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuperalgebraReport {
    pub dim: usize,
    pub checks: Vec<CheckResult>,
    /// `k` with `Q = k Δ+1` when `G_α = S_α`, if such a `k` exists.
    pub brst_constant: Option<Scalar>,
    pub brst_nilpotent: bool,
}

impl SuperalgebraReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegenerateReport {
    pub dim: usize,
    pub rank: usize,
    pub minus1_is_zero: bool,
    pub minus3_is_zero: bool,
    pub checks: Vec<CheckResult>,
}

impl DegenerateReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    pub dim: usize,
    pub first_valid: bool,
    pub second_valid: bool,
    pub tensor_compatible: bool,
    pub tensor: ValidationReport,
    pub anticommutator_vanishes: bool,
    pub witness: Option<String>,
    pub agree: bool,
}

/// Short rendering of an operator for witnesses.
pub(crate) fn summarize(op: &GrassmannOperator) -> String {
    if op.len() <= WITNESS_TERMS {
        return op.to_string();
    }
    let mut head = GrassmannOperator::zero(op.dim());
    for ((th, de), c) in op.terms().take(WITNESS_TERMS) {
        head.add_term(th, de, c);
    }
    format!("{head} + ... ({} more terms)", op.len() - WITNESS_TERMS)
}

fn expect_zero(failures: &mut Vec<String>, label: String, op: &GrassmannOperator) {
    if !op.is_zero() {
        failures.push(format!("{label}: {}", summarize(op)));
    }
}

fn ok<T>(r: Result<T>) -> T {
    r.expect("dimensions agree and parities are definite by construction")
}

fn bracket(a: &GrassmannOperator, b: &GrassmannOperator) -> GrassmannOperator {
    ok(a.graded_bracket(b))
}

/// `(c_{αβ}^λ c_{λγ}^δ + 2 c_{γα}^λ c_{λβ}^δ)` for fixed `(γ, δ)` and
/// `c_{αβ}^λ c_{λγ}^δ` for fixed `δ`, as dense tables.
fn contraction_tensors(sc: &StructureConstants) -> (Vec<Vec<Vec<Vec<Scalar>>>>, Vec<Tensor3>) {
    let n = sc.dim();
    // cc[α][β][γ][δ] = Σ_λ c_{αβ}^λ c_{λγ}^δ
    let mut cc = vec![vec![vec![vec![Scalar::zero(); n]; n]; n]; n];
    for ((a, b, l), v) in sc.entries() {
        for g in 0..n {
            for (d, w) in sc.bracket(l, g) {
                cc[a][b][g][d] += &(v * w);
            }
        }
    }
    let two = Scalar::from_int(2);
    let mut pair = vec![vec![vec![vec![Scalar::zero(); n]; n]; n]; n];
    for g in 0..n {
        for d in 0..n {
            for a in 0..n {
                for b in 0..n {
                    pair[g][d][a][b] = &cc[a][b][g][d] + &(&two * &cc[g][a][b][d]);
                }
            }
        }
    }
    let mut triple = Vec::with_capacity(n);
    for d in 0..n {
        let mut t = Tensor3::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for g in 0..n {
                    *t.get_mut(a, b, g) = cc[a][b][g][d].clone();
                }
            }
        }
        triple.push(t);
    }
    (pair, triple)
}

/// Evaluate the four contraction identities. Returns one line per nonzero
/// polynomial or operator; empty means all vanish.
pub fn contraction_identities(sc: &StructureConstants, km: &KillingMetric) -> Result<Vec<String>> {
    let n = sc.dim();
    let ginv = km.require_inverse()?;
    let (pair, triple) = contraction_tensors(sc);
    let mut failures = Vec::new();
    for g in 0..n {
        for d in 0..n {
            let m = &pair[g][d];
            let mut upper = GrassmannOperator::zero(n);
            let mut lower = GrassmannOperator::zero(n);
            for al in 0..n {
                for be in 0..n {
                    let v = &m[al][be];
                    if v.is_zero() {
                        continue;
                    }
                    lower = &lower + &GrassmannOperator::word(n, v.clone(), &[], &[al + 1, be + 1]);
                    for a in 0..n {
                        let wa = &ginv[al][a];
                        if wa.is_zero() {
                            continue;
                        }
                        for b in 0..n {
                            let wb = &ginv[be][b];
                            if wb.is_zero() {
                                continue;
                            }
                            let c = &(wa * wb) * v;
                            upper = &upper + &GrassmannOperator::word(n, c, &[a + 1, b + 1], &[]);
                        }
                    }
                }
            }
            expect_zero(
                &mut failures,
                format!("theta-pair[γ={},δ={}]", g + 1, d + 1),
                &upper,
            );
            expect_zero(
                &mut failures,
                format!("deriv-pair[γ={},δ={}]", g + 1, d + 1),
                &lower,
            );
        }
    }
    for (d, t) in triple.iter().enumerate() {
        let mut upper = GrassmannOperator::zero(n);
        let mut lower = GrassmannOperator::zero(n);
        for ((a, b, g), v) in t.transform(ginv).nonzero() {
            upper = &upper + &GrassmannOperator::word(n, v.clone(), &[a + 1, b + 1, g + 1], &[]);
        }
        for ((a, b, g), v) in t.nonzero() {
            lower = &lower + &GrassmannOperator::word(n, v.clone(), &[], &[a + 1, b + 1, g + 1]);
        }
        expect_zero(&mut failures, format!("theta-triple[δ={}]", d + 1), &upper);
        expect_zero(&mut failures, format!("deriv-triple[δ={}]", d + 1), &lower);
    }
    Ok(failures)
}

struct Family {
    deltas: BTreeMap<DeltaKind, GrassmannOperator>,
    d: GrassmannOperator,
    z: GrassmannOperator,
    n_const: GrassmannOperator,
    s: Vec<GrassmannOperator>,
}

impl Family {
    fn build(sc: &StructureConstants, km: &KillingMetric) -> Result<Self> {
        let mut deltas = BTreeMap::new();
        for k in DeltaKind::ALL {
            deltas.insert(k, build_delta(sc, km, k)?);
        }
        Ok(Family {
            deltas,
            d: build_auxiliary(sc, km, Auxiliary::D)?,
            z: build_auxiliary(sc, km, Auxiliary::Z)?,
            n_const: build_auxiliary(sc, km, Auxiliary::NConst)?,
            s: build_generators(sc),
        })
    }

    fn delta(&self, k: DeltaKind) -> &GrassmannOperator {
        &self.deltas[&k]
    }
}

fn divergence_failures(fam: &Family, dim: usize) -> Vec<String> {
    let minus1 = fam.delta(DeltaKind::Minus1);
    let factor = -Scalar::sqrt2();
    let derivs: Vec<_> = (1..=dim)
        .map(|i| GrassmannOperator::deriv(dim, i))
        .collect();
    let masks: Vec<u64> = (0..1u64 << dim).collect();
    masks
        .par_iter()
        .filter_map(|&m| {
            let mut lhs = GrassmannVector::new();
            for (s, d) in fam.s.iter().zip(&derivs) {
                for (k, v) in d.apply_vector(&s.apply_mask(m)) {
                    add_to_vector(&mut lhs, k, &v);
                }
            }
            let mut diff = lhs;
            for (k, v) in minus1.apply_mask(m) {
                add_to_vector(&mut diff, k, &-(&factor * &v));
            }
            (!diff.is_empty()).then(|| {
                format!(
                    "A={}: {}",
                    super::vector_to_poly(&GrassmannVector::from([(m, Scalar::one())])),
                    super::vector_to_poly(&diff)
                )
            })
        })
        .collect()
}

fn generator_failures(sc: &StructureConstants, fam: &Family) -> Vec<String> {
    let n = sc.dim();
    let casimir = fam
        .delta(DeltaKind::Plus3)
        .apply_vector(&GrassmannVector::from([(0, Scalar::one())]));
    (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let s = &fam.s[a];
            let mut failures = Vec::new();
            for k in DeltaKind::ALL {
                expect_zero(
                    &mut failures,
                    format!("[S{},{}]", a + 1, k.label()),
                    &bracket(s, fam.delta(k)),
                );
            }
            expect_zero(
                &mut failures,
                format!("[S{},Z]", a + 1),
                &bracket(s, &fam.z),
            );
            expect_zero(
                &mut failures,
                format!("[S{},D]", a + 1),
                &bracket(s, &fam.d),
            );
            for b in 0..n {
                let mut rhs = GrassmannOperator::zero(n);
                for (c, v) in sc.bracket(a, b) {
                    rhs = &rhs + &fam.s[c].scale(v);
                }
                let diff = &bracket(s, &fam.s[b]) - &rhs;
                expect_zero(
                    &mut failures,
                    format!("[S{},S{}] - c S", a + 1, b + 1),
                    &diff,
                );
            }
            let image = s.apply_vector(&casimir);
            if !image.is_empty() {
                failures.push(format!("S{} Δ+3: {}", a + 1, super::vector_to_poly(&image)));
            }
            failures
        })
        .collect()
}

/// Run every superalgebra identity for `sc` as an exact normal-form check.
pub fn verify_superalgebra(
    sc: &StructureConstants,
    km: &KillingMetric,
) -> Result<SuperalgebraReport> {
    let n = sc.dim();
    let ginv = km.require_inverse()?.clone();
    let fam = Family::build(sc, km)?;
    let contraction = contraction_identities(sc, km)?;

    type Task<'a> = Box<dyn Fn() -> Vec<String> + Send + Sync + 'a>;
    let fam = &fam;
    let tasks: Vec<Task> = vec![
        Box::new(move || contraction.clone()),
        Box::new(move || {
            let mut f = Vec::new();
            for k in DeltaKind::ALL {
                let d = fam.delta(k);
                expect_zero(&mut f, format!("({})^2", k.label()), &ok(d.compose(d)));
            }
            f
        }),
        Box::new(move || {
            let lhs = bracket(fam.delta(DeltaKind::Minus1), fam.delta(DeltaKind::Plus1));
            let mut f = Vec::new();
            expect_zero(&mut f, "{Δ-1,Δ+1} - Z".into(), &(&lhs - &fam.z));
            f
        }),
        Box::new(move || {
            let lhs = bracket(fam.delta(DeltaKind::Minus3), fam.delta(DeltaKind::Plus3));
            let rhs = &fam.n_const - &fam.z.scale(&Scalar::from_int(3));
            let mut f = Vec::new();
            expect_zero(&mut f, "{Δ-3,Δ+3} - (N - 3Z)".into(), &(&lhs - &rhs));
            f
        }),
        Box::new(move || {
            let mut f = Vec::new();
            for k in DeltaKind::ALL {
                expect_zero(
                    &mut f,
                    format!("[Z,{}]", k.label()),
                    &bracket(&fam.z, fam.delta(k)),
                );
            }
            f
        }),
        Box::new(move || {
            let mut f = Vec::new();
            for k in DeltaKind::ALL {
                let d = fam.delta(k);
                let diff = &bracket(&fam.d, d) - &d.scale(&Scalar::from_int(k.weight()));
                expect_zero(
                    &mut f,
                    format!("[D,{0}] - ({1}){0}", k.label(), k.weight()),
                    &diff,
                );
            }
            f
        }),
        Box::new(move || {
            let mut f = Vec::new();
            expect_zero(&mut f, "[Z,D]".into(), &bracket(&fam.z, &fam.d));
            f
        }),
        Box::new(move || generator_failures(sc, fam)),
        Box::new(move || {
            let mut casimir = GrassmannOperator::zero(n);
            for a in 0..n {
                for b in 0..n {
                    let w = &ginv[a][b];
                    if !w.is_zero() {
                        casimir = &casimir + &ok(fam.s[a].compose(&fam.s[b])).scale(w);
                    }
                }
            }
            let mut f = Vec::new();
            expect_zero(&mut f, "Z - g^{ab} S_a S_b".into(), &(&fam.z - &casimir));
            f
        }),
        Box::new(move || {
            use DeltaKind::*;
            let mut f = Vec::new();
            for (a, b) in [
                (Plus1, Plus3),
                (Minus1, Minus3),
                (Minus1, Plus3),
                (Plus1, Minus3),
            ] {
                expect_zero(
                    &mut f,
                    format!("finding {{{},{}}}", a.label(), b.label()),
                    &bracket(fam.delta(a), fam.delta(b)),
                );
            }
            f
        }),
        Box::new(move || divergence_failures(fam, n)),
    ];
    let checks = tasks
        .par_iter()
        .zip(CHECK_NAMES.par_iter())
        .map(|(task, name)| CheckResult::from_failures(name, task()))
        .collect();

    let q = build_brst(sc, km, &fam.s)?;
    let brst_constant = q.ratio_to(fam.delta(DeltaKind::Plus1));
    let brst_nilpotent = ok(q.compose(&q)).is_zero();
    Ok(SuperalgebraReport {
        dim: n,
        checks,
        brst_constant,
        brst_nilpotent,
    })
}

/// Checks for algebras whose Killing form is degenerate, where only `Δ-1`
/// and `Δ-3` exist.
pub fn verify_degenerate(sc: &StructureConstants) -> Result<DegenerateReport> {
    let km = sc.killing();
    if !km.is_degenerate() {
        return Err(Error::NondegenerateMetric(format!(
            "Killing form has full rank {}; use the superalgebra checks instead",
            km.rank()
        )));
    }
    let m1 = build_delta(sc, &km, DeltaKind::Minus1)?;
    let m3 = build_delta(sc, &km, DeltaKind::Minus3)?;
    let mut checks = Vec::new();
    for (name, op) in [
        ("minus1-nilpotent", ok(m1.compose(&m1))),
        ("minus3-nilpotent", ok(m3.compose(&m3))),
        ("minus1-minus3-anticommute", bracket(&m1, &m3)),
    ] {
        let mut f = Vec::new();
        expect_zero(&mut f, name.to_string(), &op);
        checks.push(CheckResult::from_failures(name, f));
    }
    Ok(DegenerateReport {
        dim: sc.dim(),
        rank: km.rank(),
        minus1_is_zero: m1.is_zero(),
        minus3_is_zero: m3.is_zero(),
        checks,
    })
}

/// Cyclic mixed-Jacobi sum `Σ_{(αβγ)} (c¹_{αβ}^λ c²_{λγ}^δ + c²_{αβ}^λ c¹_{λγ}^δ)`
/// over all index tuples.
fn compatibility_tensor(sc1: &StructureConstants, sc2: &StructureConstants) -> ValidationReport {
    let n = sc1.dim();
    let mixed = |x: &StructureConstants, y: &StructureConstants, a: usize, b: usize, g: usize| {
        let mut out = vec![Scalar::zero(); n];
        for (l, v) in x.bracket(a, b) {
            for (d, w) in y.bracket(l, g) {
                out[d] += &(v * w);
            }
        }
        out
    };
    let mut report = ValidationReport::new("compatibility");
    for a in 0..n {
        for b in 0..n {
            for g in 0..n {
                let mut sum = vec![Scalar::zero(); n];
                for (x, y, z) in [(a, b, g), (b, g, a), (g, a, b)] {
                    for (p, q) in [(sc1, sc2), (sc2, sc1)] {
                        for (d, v) in mixed(p, q, x, y, z).into_iter().enumerate() {
                            sum[d] += &v;
                        }
                    }
                }
                for (d, v) in sum.into_iter().enumerate() {
                    if !v.is_zero() {
                        report.push("cyclic-sum", vec![a, b, g, d], v);
                    }
                }
            }
        }
    }
    report
}

/// Compare the tensor compatibility condition for two tables with the
/// anticommutator of their `Δ-1` operators.
pub fn verify_compatibility(
    sc1: &StructureConstants,
    sc2: &StructureConstants,
) -> Result<CompatibilityReport> {
    if sc1.dim() != sc2.dim() {
        return Err(Error::DimensionMismatch {
            left: sc1.dim(),
            right: sc2.dim(),
        });
    }
    let tensor = compatibility_tensor(sc1, sc2);
    let d1 = build_delta(sc1, &sc1.killing(), DeltaKind::Minus1)?;
    let d2 = build_delta(sc2, &sc2.killing(), DeltaKind::Minus1)?;
    let anti = bracket(&d1, &d2);
    let tensor_compatible = tensor.is_ok();
    let anticommutator_vanishes = anti.is_zero();
    Ok(CompatibilityReport {
        dim: sc1.dim(),
        first_valid: sc1.validate().is_ok(),
        second_valid: sc2.validate().is_ok(),
        tensor_compatible,
        tensor,
        anticommutator_vanishes,
        witness: (!anticommutator_vanishes).then(|| summarize(&anti)),
        agree: tensor_compatible == anticommutator_vanishes,
    })
}
