use oddbracket::brackets::{
    bracket, check_axioms_with, check_casimir, check_generator_relation, check_reduction,
    AxiomSuiteReport, BracketKind, Realization, SampleShape,
};
use oddbracket::liealg::{KillingMetric, Matrix, ValidationReport};
use oddbracket::operators::{verify_compatibility, verify_degenerate, verify_superalgebra};
use oddbracket::{parse_expression, Error, Result};
use serde_json::{json, Value};

use crate::markdown;
use crate::{
    load, AxiomArgs, BracketArg, Command, Common, CompatArgs, EvalArgs, Format, Loaded, Report,
    EVEN_DEGREE_WARNING,
};

pub(crate) fn dispatch(command: &Command) -> Result<Report> {
    match command {
        Command::Validate(c) => validate(c),
        Command::Killing(c) => killing(c),
        Command::BracketAxioms(a) => bracket_axioms(a),
        Command::Superalgebra(c) => superalgebra(c),
        Command::Degenerate(c) => degenerate(c),
        Command::Compat(c) => compat(c),
        Command::Eval(e) => eval(e),
        Command::Report(a) => full_report(a),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn report(command: &'static str, format: Format, alg: &Loaded) -> Report {
    Report {
        command,
        format,
        meta: vec![("algebra", alg.header())],
        result: Value::Null,
        passed: true,
        markdown: String::new(),
        warnings: Vec::new(),
    }
}

fn matrix_value(m: &Matrix) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(|x| json!(x.to_string())).collect()))
            .collect(),
    )
}

fn matrix_markdown(m: &Matrix) -> String {
    let n = m.len();
    let mut header = vec![String::new()];
    header.extend((1..=n).map(|i| i.to_string()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = vec![format!("**{}**", i + 1)];
            r.extend(row.iter().map(ToString::to_string));
            r
        })
        .collect();
    markdown::table(&header, &rows)
}

fn validate(c: &Common) -> Result<Report> {
    let alg = load(&c.algebra)?;
    let v = alg.sc.validate();
    let mut r = report("validate", c.format, &alg);
    r.passed = v.is_ok();
    r.markdown = markdown::validation(&[&v]);
    r.result = to_value(&v);
    Ok(r)
}

/// Tensor-level Killing checks; the inverse and the dimension invariant only
/// apply when the form is nondegenerate.
fn killing_checks(alg: &Loaded, km: &KillingMetric) -> Vec<ValidationReport> {
    let mut checks = vec![km.check_symmetry(), km.check_total_antisymmetry()];
    if let Ok(inv) = km.check_inverse() {
        checks.push(inv);
    }
    if let Ok(value) = km.dimension_invariant() {
        let mut dim_check = ValidationReport::new("dimension invariant");
        let expected = oddbracket::Scalar::from_int(alg.sc.dim() as i64);
        if value != expected {
            dim_check.push("dimension invariant", vec![], &value - &expected);
        }
        checks.push(dim_check);
    }
    checks
}

fn killing(c: &Common) -> Result<Report> {
    let alg = load(&c.algebra)?;
    let km = alg.sc.killing();
    let checks = killing_checks(&alg, &km);
    let lowered: Vec<Value> = km
        .lowered()
        .nonzero()
        .map(|((a, b, c), v)| json!({"a": a + 1, "b": b + 1, "c": c + 1, "value": v}))
        .collect();
    let invariant = km.dimension_invariant().ok();
    let mut r = report("killing", c.format, &alg);
    r.passed = checks.iter().all(ValidationReport::is_ok);
    r.result = json!({
        "rank": km.rank(),
        "degenerate": km.is_degenerate(),
        "metric": matrix_value(km.metric()),
        "inverse": km.inverse().map(matrix_value),
        "lowered": lowered,
        "dimension_invariant": invariant,
        "checks": to_value(&checks),
    });
    let mut md = format!(
        "rank {} of {}{}\n\n## metric\n\n{}",
        km.rank(),
        alg.sc.dim(),
        if km.is_degenerate() {
            " (degenerate)"
        } else {
            ""
        },
        matrix_markdown(km.metric())
    );
    if let Some(inv) = km.inverse() {
        md.push_str(&format!("\n## inverse metric\n\n{}", matrix_markdown(inv)));
    }
    if let Some(v) = invariant {
        md.push_str(&format!("\ndimension invariant: {v}\n"));
    }
    let refs: Vec<&ValidationReport> = checks.iter().collect();
    md.push_str(&format!("\n## checks\n\n{}", markdown::validation(&refs)));
    r.markdown = md;
    Ok(r)
}

fn bracket_kind(arg: BracketArg, alg: &Loaded) -> BracketKind {
    let dim = alg.sc.dim();
    match arg {
        BracketArg::LinearOdd => BracketKind::LinearOdd(alg.sc.clone()),
        BracketArg::LinearEven => BracketKind::LinearEven(alg.sc.clone()),
        BracketArg::CanonicalOdd => BracketKind::CanonicalOdd { dim },
        BracketArg::CanonicalEven => BracketKind::CanonicalEven { dim },
    }
}

fn degree_warning(degree: u32) -> Option<String> {
    (degree > EVEN_DEGREE_WARNING).then(|| {
        format!("even degree {degree} exceeds {EVEN_DEGREE_WARNING}; expect slow exact arithmetic")
    })
}

fn axiom_suites(a: &AxiomArgs, alg: &Loaded) -> Result<Vec<AxiomSuiteReport>> {
    let kinds = match a.bracket {
        Some(b) => vec![b],
        None => vec![BracketArg::LinearOdd, BracketArg::LinearEven],
    };
    let shape = SampleShape {
        max_even_degree: a.max_even_degree,
        ..SampleShape::default()
    };
    kinds
        .into_iter()
        .map(|k| check_axioms_with(&bracket_kind(k, alg), a.samples, a.seed, &shape))
        .collect()
}

fn axioms_markdown(suites: &[AxiomSuiteReport]) -> String {
    let mut rows = Vec::new();
    for s in suites {
        for ax in &s.axioms {
            let first = ax
                .failures
                .first()
                .map(|f| format!("inputs {:?}: {} != {}", f.inputs, f.lhs, f.rhs))
                .unwrap_or_default();
            rows.push(vec![
                s.bracket.clone(),
                ax.axiom.clone(),
                ax.samples.to_string(),
                if ax.passed() {
                    "pass".into()
                } else {
                    "FAIL".into()
                },
                ax.failures.len().to_string(),
                first,
            ]);
        }
    }
    markdown::table(
        &[
            "bracket",
            "axiom",
            "samples",
            "status",
            "failures",
            "first failure",
        ],
        &rows,
    )
}

fn bracket_axioms(a: &AxiomArgs) -> Result<Report> {
    let alg = load(&a.common.algebra)?;
    let suites = axiom_suites(a, &alg)?;
    let mut r = report("bracket-axioms", a.common.format, &alg);
    r.meta.push(("seed", json!(a.seed)));
    r.meta.push(("samples", json!(a.samples)));
    r.warnings.extend(degree_warning(a.max_even_degree));
    r.passed = suites.iter().all(AxiomSuiteReport::passed);
    r.markdown = axioms_markdown(&suites);
    r.result = to_value(&suites);
    Ok(r)
}

fn superalgebra_section(
    alg: &Loaded,
    km: &KillingMetric,
    format: Format,
) -> Result<(Value, bool, String)> {
    let rep = verify_superalgebra(&alg.sc, km)?;
    let mut md = markdown::checks(&rep.checks);
    md.push_str(&format!(
        "\nBRST charge with G = S: Q = {} Δ+1, Q^2 = 0: {}\n",
        rep.brst_constant
            .as_ref()
            .map(ToString::to_string)
            .unwrap_or_else(|| "(not proportional)".into()),
        rep.brst_nilpotent
    ));
    if format == Format::Markdown {
        md.push_str(&format!(
            "\n## commutation table\n\nEntry in row X, column Y is the graded bracket of X and Y; N is the constant operator N·1.\n\n{}",
            markdown::commutation_table(&alg.sc, km)?
        ));
    }
    let passed = rep.passed() && rep.brst_nilpotent && rep.brst_constant.is_some();
    Ok((to_value(&rep), passed, md))
}

fn superalgebra(c: &Common) -> Result<Report> {
    let alg = load(&c.algebra)?;
    let km = alg.sc.killing();
    let (value, passed, md) = superalgebra_section(&alg, &km, c.format)?;
    let mut r = report("superalgebra", c.format, &alg);
    r.result = value;
    r.passed = passed;
    r.markdown = md;
    Ok(r)
}

fn degenerate(c: &Common) -> Result<Report> {
    let alg = load(&c.algebra)?;
    let rep = verify_degenerate(&alg.sc)?;
    let mut r = report("degenerate", c.format, &alg);
    r.passed = rep.passed();
    r.markdown = format!(
        "Killing rank {} of {}; Δ-1 is {}zero, Δ-3 is {}zero\n\n{}",
        rep.rank,
        rep.dim,
        if rep.minus1_is_zero { "" } else { "non" },
        if rep.minus3_is_zero { "" } else { "non" },
        markdown::checks(&rep.checks)
    );
    r.result = to_value(&rep);
    Ok(r)
}

fn compat(c: &CompatArgs) -> Result<Report> {
    let first = load(&c.common.algebra)?;
    let second = load(&c.other)?;
    let rep = verify_compatibility(&first.sc, &second.sc)?;
    let mut r = report("compat", c.common.format, &first);
    r.meta.push(("other", second.header()));
    r.passed = rep.agree;
    r.markdown =
        format!(
        "tensor condition: {}\nanticommutator of the Δ-1 operators: {}\nverdicts agree: {}\n\n{}",
        if rep.tensor_compatible { "compatible" } else { "incompatible" },
        rep.witness.as_deref().unwrap_or("0"),
        rep.agree,
        markdown::validation(&[&rep.tensor])
    );
    r.result = to_value(&rep);
    Ok(r)
}

fn eval(e: &EvalArgs) -> Result<Report> {
    let alg = e.algebra.as_deref().map(load).transpose()?;
    let max_index = alg.as_ref().map(|a| a.sc.dim());
    let parsed = e
        .expressions
        .iter()
        .map(|s| parse_expression(s, max_index))
        .collect::<Result<Vec<_>>>()?;
    let warnings: Vec<String> = parsed
        .iter()
        .filter_map(|p| degree_warning(p.max_even_degree()))
        .collect();
    let mut meta = Vec::new();
    if let Some(a) = &alg {
        meta.push(("algebra", a.header()));
    }
    let (result, md) = if let [single] = parsed.as_slice() {
        (json!({ "expression": single }), format!("{single}\n"))
    } else {
        let kind = match (e.bracket, &alg) {
            (BracketArg::LinearOdd | BracketArg::LinearEven, None) => {
                return Err(Error::InvalidArgument(
                    "linear brackets need --algebra".into(),
                ))
            }
            (b, Some(a)) => bracket_kind(b, a),
            (BracketArg::CanonicalOdd, None) => BracketKind::CanonicalOdd {
                dim: max_variable_index(&parsed),
            },
            (BracketArg::CanonicalEven, None) => BracketKind::CanonicalEven {
                dim: max_variable_index(&parsed),
            },
        };
        let value = bracket(&kind, &parsed[0], &parsed[1])?;
        (
            json!({ "bracket": kind.name(), "left": parsed[0], "right": parsed[1], "result": value }),
            format!("{{{}, {}}} = {}\n", parsed[0], parsed[1], value),
        )
    };
    Ok(Report {
        command: "eval",
        format: e.format,
        meta,
        result,
        passed: true,
        markdown: md,
        warnings,
    })
}

fn max_variable_index(polys: &[oddbracket::SuperPolynomial]) -> usize {
    polys
        .iter()
        .flat_map(|p| p.variables())
        .map(|v| v.index)
        .max()
        .unwrap_or(1)
}

fn full_report(a: &AxiomArgs) -> Result<Report> {
    let alg = load(&a.common.algebra)?;
    let km = alg.sc.killing();
    let mut sections = serde_json::Map::new();
    let mut md = String::new();
    let mut passed = true;

    let validation = alg.sc.validate();
    let generators = check_generator_relation(&alg.sc);
    let mut tensor_checks = vec![validation, generators];
    tensor_checks.extend(killing_checks(&alg, &km));
    tensor_checks.push(check_reduction(Realization::Odd, &alg.sc));
    tensor_checks.push(check_reduction(Realization::Even, &alg.sc));
    if let Ok(casimir) = check_casimir(&alg.sc, &km) {
        tensor_checks.push(casimir);
    }
    passed &= tensor_checks.iter().all(ValidationReport::is_ok);
    let refs: Vec<&ValidationReport> = tensor_checks.iter().collect();
    md.push_str(&format!(
        "## structure constants\n\n{}",
        markdown::validation(&refs)
    ));
    sections.insert("tensor_checks".into(), to_value(&tensor_checks));

    let suites = axiom_suites(a, &alg)?;
    passed &= suites.iter().all(AxiomSuiteReport::passed);
    md.push_str(&format!(
        "\n## bracket axioms\n\n{}",
        axioms_markdown(&suites)
    ));
    sections.insert("bracket_axioms".into(), to_value(&suites));

    if km.is_degenerate() {
        let rep = verify_degenerate(&alg.sc)?;
        passed &= rep.passed();
        md.push_str(&format!(
            "\n## degenerate Killing form\n\n{}",
            markdown::checks(&rep.checks)
        ));
        sections.insert("degenerate".into(), to_value(&rep));
    } else {
        let (value, ok, section) = superalgebra_section(&alg, &km, a.common.format)?;
        passed &= ok;
        md.push_str(&format!("\n## superalgebra\n\n{section}"));
        sections.insert("superalgebra".into(), value);
    }

    let mut r = report("report", a.common.format, &alg);
    r.meta.push(("seed", json!(a.seed)));
    r.meta.push(("samples", json!(a.samples)));
    r.warnings.extend(degree_warning(a.max_even_degree));
    r.passed = passed;
    r.markdown = md;
    r.result = Value::Object(sections);
    Ok(r)
}
