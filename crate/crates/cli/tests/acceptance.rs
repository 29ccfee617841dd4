//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use oddbracket::brackets::{
    bracket, check_axioms, check_casimir, check_generator_relation, check_reduction,
    random_homogeneous, BracketKind, Realization, SampleShape,
};
use oddbracket::liealg::{catalog, StructureConstants};
use oddbracket::operators::{
    build_auxiliary, build_brst, build_delta, build_generators, contraction_identities,
    verify_compatibility, verify_degenerate, verify_superalgebra, Auxiliary, DeltaKind,
    GrassmannOperator,
};
use oddbracket::{parse_expression, Scalar, SuperMonomial, SuperPolynomial, VariableId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const SEMISIMPLE: [&str; 4] = ["so3", "sl2", "sl3", "so5"];

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn alg(name: &str) -> StructureConstants {
    catalog(name).expect("catalog entry")
}

fn bracket_axioms() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for name in ["so3", "sl2", "sl3"] {
        for kind in [
            BracketKind::LinearOdd(alg(name)),
            BracketKind::LinearEven(alg(name)),
        ] {
            let r = check_axioms(&kind, 200, 1).map_err(|e| e.to_string())?;
            ensure(
                r.passed(),
                format!("{} on {name}: {:?}", kind.name(), r.axioms),
            )?;
            runs += 1;
        }
    }
    for kind in [
        BracketKind::CanonicalEven { dim: 3 },
        BracketKind::CanonicalOdd { dim: 3 },
    ] {
        let r = check_axioms(&kind, 200, 1).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("{}: {:?}", kind.name(), r.axioms))?;
        runs += 1;
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(30),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("{runs} suites x 200 triples, {elapsed:.1?}"))
}

fn generator_relation() -> Outcome {
    for name in SEMISIMPLE {
        let r = check_generator_relation(&alg(name));
        ensure(r.is_ok(), format!("{name}: {:?}", r.violations))?;
    }
    Ok("all pairs on so3, sl2, sl3, so5".into())
}

/// Killing metric recomputed as tr(ad_a ad_b).
fn trace_form(sc: &StructureConstants) -> Vec<Vec<Scalar>> {
    let n = sc.dim();
    let mut g = vec![vec![Scalar::zero(); n]; n];
    for (a, row) in g.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            for i in 0..n {
                for k in 0..n {
                    *slot += &(&sc.get(a, k, i) * &sc.get(b, i, k));
                }
            }
        }
    }
    g
}

fn killing_machinery() -> Outcome {
    let mut invariants = Vec::new();
    for (name, n) in [("so3", 3), ("sl2", 3), ("sl3", 8), ("so5", 10)] {
        let sc = alg(name);
        let km = sc.killing();
        ensure(
            km.metric() == &trace_form(&sc),
            format!("{name}: metric differs from trace form"),
        )?;
        ensure(
            km.check_symmetry().is_ok(),
            format!("{name}: asymmetric metric"),
        )?;
        let inv = km.check_inverse().map_err(|e| e.to_string())?;
        ensure(inv.is_ok(), format!("{name}: g g^-1 != 1"))?;
        ensure(
            km.check_total_antisymmetry().is_ok(),
            format!("{name}: c_abc not antisymmetric"),
        )?;
        let value = km.dimension_invariant().map_err(|e| e.to_string())?;
        ensure(
            value == Scalar::from_int(n),
            format!("{name}: invariant {value}"),
        )?;
        invariants.push(value.to_string());
    }
    let km = alg("heisenberg").killing();
    ensure(km.is_degenerate(), "heisenberg metric should be degenerate")?;
    ensure(
        km.check_total_antisymmetry().is_ok(),
        "heisenberg c_abc not antisymmetric",
    )?;
    Ok(format!("-c^abc c_abc = {}", invariants.join(", ")))
}

fn nilpotency() -> Outcome {
    for name in SEMISIMPLE {
        let sc = alg(name);
        let km = sc.killing();
        for k in DeltaKind::ALL {
            let d = build_delta(&sc, &km, k).map_err(|e| e.to_string())?;
            ensure(!d.is_zero(), format!("{name}: {} vanishes", k.label()))?;
            ensure(
                d.compose(&d).unwrap().is_zero(),
                format!("{name}: ({})^2 != 0", k.label()),
            )?;
        }
    }
    let mut bad = alg("so3");
    bad.set(0, 1, 0, Scalar::one());
    bad.set(1, 0, 0, -Scalar::one());
    ensure(
        !bad.validate().is_ok(),
        "control table should violate Jacobi",
    )?;
    let d = build_delta(&bad, &bad.killing(), DeltaKind::Minus1).unwrap();
    let square = d.compose(&d).unwrap();
    ensure(!square.is_zero(), "control table gave (Δ-1)^2 = 0")?;
    Ok(format!(
        "4 algebras x 4 operators; control (Δ-1)^2 has {} terms",
        square.len()
    ))
}

fn superalgebra() -> Outcome {
    let mut times = Vec::new();
    for name in SEMISIMPLE {
        let sc = alg(name);
        let start = Instant::now();
        let r = verify_superalgebra(&sc, &sc.killing()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        for c in &r.checks {
            ensure(c.passed(), format!("{name} {}: {:?}", c.name, c.witness))?;
        }
        if name == "so5" {
            ensure(
                elapsed < Duration::from_secs(60),
                format!("so5 took {elapsed:?}"),
            )?;
        }
        times.push(format!("{name} {elapsed:.1?}"));
    }
    Ok(format!("11 checks each; {}", times.join(", ")))
}

fn contractions() -> Outcome {
    for name in SEMISIMPLE {
        let sc = alg(name);
        let failures = contraction_identities(&sc, &sc.killing()).map_err(|e| e.to_string())?;
        ensure(failures.is_empty(), format!("{name}: {failures:?}"))?;
    }
    Ok("pair and triple contractions vanish in Θ and ∂ on so3, sl2, sl3, so5".into())
}

fn divergence() -> Outcome {
    let mut count = 0;
    for name in ["so3", "sl2"] {
        let sc = alg(name);
        let km = sc.killing();
        let n = sc.dim();
        let kind = BracketKind::LinearOdd(sc.clone());
        let minus1 = build_delta(&sc, &km, DeltaKind::Minus1).unwrap();
        for mask in 0..1u64 << n {
            let a = SuperPolynomial::term(Scalar::one(), SuperMonomial::from_theta_mask(mask));
            let mut lhs = SuperPolynomial::zero();
            for i in 1..=n {
                let v = VariableId::theta(i);
                let field = bracket(&kind, &SuperPolynomial::var(v), &a).unwrap();
                lhs = &lhs + &field.left_deriv_odd(v).unwrap();
            }
            let rhs = minus1.apply(&a).unwrap().scale(&-Scalar::sqrt2());
            ensure(lhs == rhs, format!("{name} on {a}: {lhs} vs {rhs}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} basis monomials"))
}

fn brst() -> Outcome {
    let mut constants = Vec::new();
    for name in SEMISIMPLE {
        let sc = alg(name);
        let km = sc.killing();
        let q = build_brst(&sc, &km, &build_generators(&sc)).unwrap();
        let plus1 = build_delta(&sc, &km, DeltaKind::Plus1).unwrap();
        let k = q
            .ratio_to(&plus1)
            .ok_or_else(|| format!("{name}: Q not proportional to Δ+1"))?;
        ensure(
            q.compose(&q).unwrap().is_zero(),
            format!("{name}: Q^2 != 0"),
        )?;
        constants.push(format!("{name} {k}"));
    }
    Ok(format!("Q = k Δ+1 with k: {}", constants.join(", ")))
}

fn reductions() -> Outcome {
    for name in ["so3", "sl2"] {
        for kind in [Realization::Odd, Realization::Even] {
            let r = check_reduction(kind, &alg(name));
            ensure(r.is_ok(), format!("{name} {kind:?}: {:?}", r.violations))?;
        }
    }
    Ok("odd and even realizations on so3, sl2".into())
}

fn degenerate_and_compatibility() -> Outcome {
    for name in ["heisenberg", "e2"] {
        let r = verify_degenerate(&alg(name)).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("{name}: {:?}", r.checks))?;
    }
    let so3 = alg("so3");
    for other in ["zero(3)", "so3"] {
        let r = verify_compatibility(&so3, &alg(other)).unwrap();
        ensure(
            r.tensor_compatible && r.agree,
            format!("(so3, {other}) verdicts {r:?}"),
        )?;
    }
    let mut found = None;
    'search: for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if a == b {
                    continue;
                }
                let mut other = so3.clone();
                let bumped = &so3.get(a, b, c) + &Scalar::one();
                other.set(a, b, c, bumped.clone());
                other.set(b, a, c, -bumped);
                let r = verify_compatibility(&so3, &other).unwrap();
                if !r.tensor_compatible {
                    found = Some(((a + 1, b + 1, c + 1), r));
                    break 'search;
                }
            }
        }
    }
    let (entry, r) = found.ok_or("no single-entry perturbation breaks compatibility")?;
    ensure(
        r.agree && !r.anticommutator_vanishes,
        format!("verdicts disagree at {entry:?}"),
    )?;
    Ok(format!(
        "incompatible pair: so3 with c{entry:?} bumped by 1"
    ))
}

fn even_casimir() -> Outcome {
    for name in ["so3", "sl2", "sl3"] {
        let sc = alg(name);
        let r = check_casimir(&sc, &sc.killing()).map_err(|e| e.to_string())?;
        ensure(r.is_ok(), format!("{name}: {:?}", r.violations))?;
    }
    Ok("{X_a, C} = 0 on so3, sl2, sl3".into())
}

fn random_operator(dim: usize, rng: &mut impl Rng) -> GrassmannOperator {
    let mut op = GrassmannOperator::zero(dim);
    let full = (1u64 << dim) - 1;
    for _ in 0..rng.gen_range(1..=4) {
        let th = rng.gen::<u64>() & rng.gen::<u64>() & full;
        let de = rng.gen::<u64>() & rng.gen::<u64>() & full;
        let mut c = Scalar::from_frac(rng.gen_range(-6..=6), rng.gen_range(1..=5));
        if rng.gen_bool(0.3) {
            c = &c * &Scalar::sqrt6();
        }
        op.add_term(th, de, &c);
    }
    op
}

fn engine_cross_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in SEMISIMPLE {
        let sc = alg(name);
        let n = sc.dim();
        for _ in 0..100 {
            let a = random_operator(n, &mut rng);
            let b = random_operator(n, &mut rng);
            let ab = a.compose(&b).unwrap();
            for m in 0..1u64 << n {
                ensure(
                    ab.apply_mask(m) == a.apply_vector(&b.apply_mask(m)),
                    format!("{name}: compose disagrees with apply on mask {m:b}"),
                )?;
            }
        }
        let km = sc.killing();
        let z = build_auxiliary(&sc, &km, Auxiliary::Z).unwrap();
        ensure(
            GrassmannOperator::from_action(n, |m| z.apply_mask(m)) == z,
            format!("{name}: Z normal form not recovered from its action"),
        )?;
    }
    let shape = SampleShape::default();
    for (i, kind) in [
        BracketKind::LinearOdd(alg("sl3")),
        BracketKind::LinearEven(alg("sl3")),
        BracketKind::CanonicalOdd { dim: 4 },
    ]
    .iter()
    .enumerate()
    {
        for parity in 0..2 {
            let p = random_homogeneous(kind, parity, &shape, &mut rng);
            let text = p.to_string();
            let back = parse_expression(&text, None).map_err(|e| e.to_string())?;
            ensure(
                back == p && back.to_string() == text,
                format!("round trip {i}: {text}"),
            )?;
        }
    }
    let args = [
        "oddbracket",
        "report",
        "--algebra",
        "sl2",
        "--seed",
        "9",
        "--samples",
        "20",
    ];
    let first = oddbracket_cli::run(args);
    let second = oddbracket_cli::run(args);
    ensure(
        first.code == 0,
        format!("report exited {}: {}", first.code, first.stderr),
    )?;
    ensure(
        first.stdout == second.stdout,
        "reports differ between identical runs",
    )?;
    let md = [
        "oddbracket",
        "superalgebra",
        "--algebra",
        "so3",
        "--format",
        "markdown",
    ];
    ensure(
        oddbracket_cli::run(md).stdout == oddbracket_cli::run(md).stdout,
        "markdown reports differ between identical runs",
    )?;
    Ok("400 operator pairs, round trips, byte-identical reports".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("bracket axioms", bracket_axioms),
        ("generator relation", generator_relation),
        ("Killing machinery", killing_machinery),
        ("nilpotency", nilpotency),
        ("superalgebra", superalgebra),
        ("contraction identities", contractions),
        ("divergence identity", divergence),
        ("BRST charge", brst),
        ("bilinear reductions", reductions),
        (
            "degenerate and compatibility cases",
            degenerate_and_compatibility,
        ),
        ("even Casimir", even_casimir),
        ("engine cross-checks", engine_cross_checks),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
