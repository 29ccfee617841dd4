//! Killing-form machinery checked against brute-force traces of adjoint
//! matrices.

use oddbracket::liealg::{catalog, StructureConstants};
use oddbracket::Scalar;

/// `(ad_a)^c_b = c_{ab}^c` as a dense matrix indexed `[c][b]`.
fn ad(sc: &StructureConstants, a: usize) -> Vec<Vec<Scalar>> {
    let n = sc.dim();
    (0..n)
        .map(|c| (0..n).map(|b| sc.get(a, b, c)).collect())
        .collect()
}

fn trace_product(x: &[Vec<Scalar>], y: &[Vec<Scalar>]) -> Scalar {
    let n = x.len();
    let mut acc = Scalar::zero();
    for i in 0..n {
        for k in 0..n {
            acc += &(&x[i][k] * &y[k][i]);
        }
    }
    acc
}

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

#[test]
fn metric_is_the_trace_form() {
    for name in ["so3", "sl2", "sl3", "so5", "heisenberg", "e2"] {
        let sc = catalog(name).unwrap();
        let km = sc.killing();
        let ads: Vec<_> = (0..sc.dim()).map(|a| ad(&sc, a)).collect();
        for a in 0..sc.dim() {
            for b in 0..sc.dim() {
                assert_eq!(
                    km.metric()[a][b],
                    trace_product(&ads[a], &ads[b]),
                    "{name} g_({a},{b})"
                );
            }
        }
    }
}

#[test]
fn known_metrics() {
    let km = catalog("so3").unwrap().killing();
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(km.metric()[a][b], if a == b { s(-2) } else { s(0) });
        }
    }
    let km = catalog("sl2").unwrap().killing();
    assert_eq!(km.metric()[0][1], s(4));
    assert_eq!(km.metric()[2][2], s(8));
    assert_eq!(km.metric()[0][0], s(0));
    assert_eq!(km.inverse().unwrap()[2][2], Scalar::from_frac(1, 8));
}

#[test]
fn lowered_constants_by_direct_sum() {
    for name in ["so3", "sl2", "heisenberg"] {
        let sc = catalog(name).unwrap();
        let km = sc.killing();
        let n = sc.dim();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut acc = Scalar::zero();
                    for d in 0..n {
                        acc += &(&sc.get(a, b, d) * &km.metric()[d][c]);
                    }
                    assert_eq!(*km.lowered().get(a, b, c), acc, "{name}");
                }
            }
        }
    }
    // so3: c_abc = -2 ε_abc
    let km = catalog("so3").unwrap().killing();
    assert_eq!(*km.lowered().get(0, 1, 2), s(-2));
    assert_eq!(*km.lowered().get(2, 1, 0), s(2));
}

#[test]
fn symmetric_inverse_and_antisymmetric() {
    for name in ["so3", "sl2", "sl3", "so5"] {
        let km = catalog(name).unwrap().killing();
        assert!(km.check_symmetry().is_ok(), "{name}");
        assert!(km.check_inverse().unwrap().is_ok(), "{name}");
        assert!(km.check_total_antisymmetry().is_ok(), "{name}");
        assert!(!km.is_degenerate());
    }
    for name in ["heisenberg", "e2"] {
        let km = catalog(name).unwrap().killing();
        assert!(km.check_symmetry().is_ok(), "{name}");
        assert!(km.check_total_antisymmetry().is_ok(), "{name}");
        assert!(km.is_degenerate());
        assert!(km.check_inverse().is_err());
    }
    assert_eq!(catalog("heisenberg").unwrap().killing().rank(), 0);
    assert_eq!(catalog("e2").unwrap().killing().rank(), 1);
}

#[test]
fn dimension_invariants() {
    for (name, n) in [("so3", 3), ("sl2", 3), ("sl3", 8), ("so5", 10)] {
        let km = catalog(name).unwrap().killing();
        assert_eq!(km.dimension_invariant().unwrap(), s(n), "{name}");
    }
    assert!(catalog("heisenberg")
        .unwrap()
        .killing()
        .dimension_invariant()
        .is_err());
}
