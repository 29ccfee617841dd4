use std::collections::BTreeMap;

use super::GrassmannOperator;
use crate::error::{Error, Result};
use crate::liealg::{KillingMetric, Matrix, StructureConstants};
use crate::scalars::Scalar;

/// Which Δ-operator to build; the label is its `D`-weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeltaKind {
    Minus3,
    Minus1,
    Plus1,
    Plus3,
}

impl DeltaKind {
    pub const ALL: [DeltaKind; 4] = [
        DeltaKind::Minus3,
        DeltaKind::Minus1,
        DeltaKind::Plus1,
        DeltaKind::Plus3,
    ];

    pub fn weight(self) -> i64 {
        match self {
            DeltaKind::Minus3 => -3,
            DeltaKind::Minus1 => -1,
            DeltaKind::Plus1 => 1,
            DeltaKind::Plus3 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DeltaKind::Minus3 => "Δ-3",
            DeltaKind::Minus1 => "Δ-1",
            DeltaKind::Plus1 => "Δ+1",
            DeltaKind::Plus3 => "Δ+3",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Auxiliary {
    D,
    K,
    Z,
    NConst,
}

fn inv_sqrt2() -> Scalar {
    Scalar::sqrt2().div(&Scalar::from_int(2)).expect("nonzero")
}

fn inv_sqrt6() -> Scalar {
    Scalar::sqrt6().div(&Scalar::from_int(6)).expect("nonzero")
}

/// `Σ g^{αa} g^{βb} t_{αβ…}` on the first two slots of a sparse tensor.
fn raise_pair<K: Ord + Clone>(
    ginv: &Matrix,
    entries: &BTreeMap<(usize, usize, K), Scalar>,
) -> BTreeMap<(usize, usize, K), Scalar> {
    let n = ginv.len();
    let mut half: BTreeMap<(usize, usize, K), Scalar> = BTreeMap::new();
    for ((al, be, rest), v) in entries {
        for a in 0..n {
            let w = &ginv[*al][a];
            if w.is_zero() {
                continue;
            }
            *half.entry((a, *be, rest.clone())).or_default() += &(w * v);
        }
    }
    let mut out: BTreeMap<(usize, usize, K), Scalar> = BTreeMap::new();
    for ((a, be, rest), v) in half {
        if v.is_zero() {
            continue;
        }
        for b in 0..n {
            let w = &ginv[be][b];
            if w.is_zero() {
                continue;
            }
            *out.entry((a, b, rest.clone())).or_default() += &(w * &v);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn bit(i: usize) -> u64 {
    1u64 << i
}

/// `c · Θ_{a}Θ_{b} …` accumulated into `op` with 0-based indices, reordering
/// signs included.
fn add_word(op: &mut GrassmannOperator, c: &Scalar, thetas: &[usize], derivs: &[usize]) {
    let word = GrassmannOperator::word(
        op.dim(),
        c.clone(),
        &thetas.iter().map(|i| i + 1).collect::<Vec<_>>(),
        &derivs.iter().map(|i| i + 1).collect::<Vec<_>>(),
    );
    for ((th, de), v) in word.terms() {
        op.add_term(th, de, v);
    }
}

/// `Θ^αΘ^β c_{αβ}^γ ∂_{Θ^γ}` expanded into lowered indices.
fn raised_quadratic(sc: &StructureConstants, km: &KillingMetric) -> Result<GrassmannOperator> {
    let ginv = km.require_inverse()?;
    let n = sc.dim();
    let low = km.lowered();
    let mut entries = BTreeMap::new();
    for ((a, b, c), v) in low.nonzero() {
        entries.insert((a, b, c), v.clone());
    }
    let mut op = GrassmannOperator::zero(n);
    for ((a, b, d), v) in raise_pair(ginv, &entries) {
        add_word(&mut op, &v, &[a, b], &[d]);
    }
    Ok(op)
}

pub fn build_delta(
    sc: &StructureConstants,
    km: &KillingMetric,
    which: DeltaKind,
) -> Result<GrassmannOperator> {
    let n = sc.dim();
    let mut op = GrassmannOperator::zero(n);
    match which {
        DeltaKind::Plus3 => {
            let raised = km.raised()?;
            for ((a, b, c), v) in raised.nonzero() {
                add_word(&mut op, v, &[a, b, c], &[]);
            }
            Ok(op.scale(&inv_sqrt6()))
        }
        DeltaKind::Plus1 => Ok(raised_quadratic(sc, km)?.scale(&inv_sqrt2())),
        DeltaKind::Minus1 => {
            for ((a, b, c), v) in sc.entries() {
                if a != b {
                    add_word(&mut op, v, &[c], &[a, b]);
                }
            }
            Ok(op.scale(&inv_sqrt2()))
        }
        DeltaKind::Minus3 => {
            for ((a, b, c), v) in km.lowered().nonzero() {
                add_word(&mut op, v, &[], &[a, b, c]);
            }
            Ok(op.scale(&inv_sqrt6()))
        }
    }
}

/// `S_α = Θ_γ c_{αβ}^γ ∂_{Θ_β}` for every α.
pub fn build_generators(sc: &StructureConstants) -> Vec<GrassmannOperator> {
    let n = sc.dim();
    let mut out = vec![GrassmannOperator::zero(n); n];
    for ((a, b, c), v) in sc.entries() {
        out[a].add_term(bit(c), bit(b), v);
    }
    out
}

pub fn build_auxiliary(
    sc: &StructureConstants,
    km: &KillingMetric,
    which: Auxiliary,
) -> Result<GrassmannOperator> {
    let n = sc.dim();
    match which {
        Auxiliary::D => {
            let mut op = GrassmannOperator::zero(n);
            for i in 0..n {
                op.add_term(bit(i), bit(i), &Scalar::one());
            }
            Ok(op)
        }
        Auxiliary::NConst => Ok(GrassmannOperator::constant(n, Scalar::from_int(n as i64))),
        Auxiliary::K => {
            let ginv = km.require_inverse()?;
            let low = km.lowered();
            let mut entries: BTreeMap<(usize, usize, (usize, usize)), Scalar> = BTreeMap::new();
            for ((al, be, la), v) in sc.entries() {
                for ga in 0..n {
                    for de in 0..n {
                        let w = low.get(la, ga, de);
                        if w.is_zero() {
                            continue;
                        }
                        *entries.entry((al, be, (ga, de))).or_default() += &(v * w);
                    }
                }
            }
            entries.retain(|_, v| !v.is_zero());
            let mut op = GrassmannOperator::zero(n);
            for ((a, b, (g, d)), v) in raise_pair(ginv, &entries) {
                add_word(&mut op, &v, &[a, b], &[g, d]);
            }
            Ok(op.scale(&Scalar::from_frac(1, 2)))
        }
        Auxiliary::Z => {
            let d = build_auxiliary(sc, km, Auxiliary::D)?;
            let k = build_auxiliary(sc, km, Auxiliary::K)?;
            Ok(&d - &k)
        }
    }
}

/// `Q = Θ^α G_α − (1/2) Θ^αΘ^β c_{αβ}^γ ∂_{Θ^γ}`.
pub fn build_brst(
    sc: &StructureConstants,
    km: &KillingMetric,
    generators: &[GrassmannOperator],
) -> Result<GrassmannOperator> {
    let n = sc.dim();
    if generators.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: generators.len(),
        });
    }
    let ginv = km.require_inverse()?;
    let mut q = raised_quadratic(sc, km)?.scale(&Scalar::from_frac(-1, 2));
    for (al, g) in generators.iter().enumerate() {
        for a in 0..n {
            let w = &ginv[al][a];
            if w.is_zero() {
                continue;
            }
            let part = GrassmannOperator::theta(n, a + 1).compose(g)?;
            q = &q + &part.scale(w);
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::catalog;
    use crate::superpoly::parse_expression;
    use crate::Parity;

    fn so3() -> (StructureConstants, KillingMetric) {
        let sc = catalog("so3").unwrap();
        let km = sc.killing();
        (sc, km)
    }

    fn e(src: &str) -> crate::SuperPolynomial {
        parse_expression(src, None).unwrap()
    }

    #[test]
    fn dilatation_counts_degree() {
        let (sc, km) = so3();
        let d = build_auxiliary(&sc, &km, Auxiliary::D).unwrap();
        assert_eq!(d.apply(&e("T1*T2")).unwrap(), e("2*T1*T2"));
        assert_eq!(d.apply(&e("T1*T2*T3 + T3")).unwrap(), e("3*T1*T2*T3 + T3"));
        let t1 = GrassmannOperator::theta(3, 1);
        assert_eq!(d.graded_bracket(&t1).unwrap(), t1);
    }

    #[test]
    fn so3_casimir_function() {
        let (sc, km) = so3();
        let d = build_delta(&sc, &km, DeltaKind::Plus3).unwrap();
        let expected = GrassmannOperator::word(
            3,
            Scalar::sqrt6().div(&Scalar::from_int(4)).unwrap(),
            &[1, 2, 3],
            &[],
        );
        assert_eq!(d, expected);
    }

    #[test]
    fn so3_minus_one_action() {
        let (sc, km) = so3();
        let d = build_delta(&sc, &km, DeltaKind::Minus1).unwrap();
        let r2 = Scalar::sqrt2();
        let expected = crate::SuperPolynomial::product(-r2, &[crate::VariableId::theta(3)]);
        assert_eq!(d.apply(&e("T1*T2")).unwrap(), expected);
        let d3 = build_delta(&sc, &km, DeltaKind::Minus3).unwrap();
        assert!(d3.apply(&e("T1")).unwrap().is_zero());
    }

    #[test]
    fn parities() {
        let (sc, km) = so3();
        for k in DeltaKind::ALL {
            assert_eq!(build_delta(&sc, &km, k).unwrap().parity(), Parity::Odd);
        }
        for a in [Auxiliary::D, Auxiliary::K, Auxiliary::Z, Auxiliary::NConst] {
            assert_eq!(build_auxiliary(&sc, &km, a).unwrap().parity(), Parity::Even);
        }
        for s in build_generators(&sc) {
            assert_eq!(s.parity(), Parity::Even);
        }
    }

    #[test]
    fn degenerate_algebras() {
        let sc = catalog("heisenberg").unwrap();
        let km = sc.killing();
        assert!(!build_delta(&sc, &km, DeltaKind::Minus1).unwrap().is_zero());
        assert!(build_delta(&sc, &km, DeltaKind::Minus3).unwrap().is_zero());
        assert!(matches!(
            build_delta(&sc, &km, DeltaKind::Plus1),
            Err(Error::MissingInverseMetric)
        ));
        assert!(build_auxiliary(&sc, &km, Auxiliary::Z).is_err());
        let sc = catalog("zero(3)").unwrap();
        let km = sc.killing();
        assert!(build_delta(&sc, &km, DeltaKind::Minus1).unwrap().is_zero());
        assert!(build_delta(&sc, &km, DeltaKind::Minus3).unwrap().is_zero());
        assert!(build_generators(&sc).iter().all(GrassmannOperator::is_zero));
    }

    #[test]
    fn brst_without_generators() {
        let (sc, km) = so3();
        let zeros = vec![GrassmannOperator::zero(3); 3];
        let q = build_brst(&sc, &km, &zeros).unwrap();
        let d = build_delta(&sc, &km, DeltaKind::Plus1).unwrap();
        assert_eq!(q, -&d.scale(&inv_sqrt2()));
        assert!(build_brst(&sc, &km, &zeros[..2]).is_err());
    }
}
