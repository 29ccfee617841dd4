use oddbracket::liealg::{KillingMetric, StructureConstants, ValidationReport};
use oddbracket::operators::{
    build_auxiliary, build_delta, build_generators, Auxiliary, CheckResult, DeltaKind,
    GrassmannOperator,
};
use oddbracket::{Parity, Result, Scalar};
use serde_json::Value;

/// One-line rendering of a metadata value.
pub fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => format!("`{s}`"),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", inline(v)))
            .collect::<Vec<_>>()
            .join(", "),
        other => other.to_string(),
    }
}

pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!("| {} |\n", header.join(" | "));
    s.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| c.replace('|', "\\|").replace('\n', "<br>"))
            .collect();
        s.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    s
}

pub fn validation(reports: &[&ValidationReport]) -> String {
    let mut rows = Vec::new();
    for r in reports {
        let first = r
            .violations
            .first()
            .map(|v| format!("{} at {:?}: {}", v.kind, v.indices, v.residual))
            .unwrap_or_default();
        rows.push(vec![
            r.check.clone(),
            if r.is_ok() {
                "pass".into()
            } else {
                "FAIL".into()
            },
            r.total.to_string(),
            first,
        ]);
    }
    table(&["check", "status", "violations", "first violation"], &rows)
}

pub fn checks(results: &[CheckResult]) -> String {
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                if c.passed() {
                    "pass".into()
                } else {
                    "FAIL".into()
                },
                c.witness.clone().unwrap_or_default(),
            ]
        })
        .collect();
    table(&["check", "status", "witness"], &rows)
}

fn render_coefficient(c: &Scalar, name: &str) -> String {
    if name.is_empty() {
        return c.to_string();
    }
    if c.is_one() {
        name.to_string()
    } else if *c == -Scalar::one() {
        format!("-{name}")
    } else if c.is_compound() {
        format!("({c}) {name}")
    } else {
        format!("{c} {name}")
    }
}

fn render_combination(parts: &[(String, Scalar)]) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (name, c)) in parts.iter().enumerate() {
        let term = render_coefficient(c, name);
        if i == 0 {
            s.push_str(&term);
        } else if let Some(rest) = term.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(&term);
        }
    }
    s
}

/// Exact coordinates of `target` over `basis`, if it lies in their span.
fn decompose(basis: &[GrassmannOperator], target: &GrassmannOperator) -> Option<Vec<Scalar>> {
    let mut keys: Vec<(u64, u64)> = target.terms().map(|(k, _)| k).collect();
    for b in basis {
        keys.extend(b.terms().map(|(k, _)| k));
    }
    keys.sort_unstable();
    keys.dedup();
    let cols = basis.len();
    let mut m: Vec<Vec<Scalar>> = keys
        .iter()
        .map(|&(th, de)| {
            let mut row: Vec<Scalar> = basis.iter().map(|b| b.coefficient(th, de)).collect();
            row.push(target.coefficient(th, de));
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().ok()?;
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= &v;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if m.iter().skip(r).any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut out = vec![Scalar::zero(); cols];
    for (i, c) in pivot_cols.into_iter().enumerate() {
        out[c] = m[i][cols].clone();
    }
    Some(out)
}

/// Graded brackets among `Δ-3, Δ-1, Δ+1, Δ+3, D, Z, S_α`, each written as a
/// combination of those operators and `N` (the constant operator).
pub fn commutation_table(sc: &StructureConstants, km: &KillingMetric) -> Result<String> {
    let n = sc.dim();
    let mut named: Vec<(String, GrassmannOperator)> = Vec::new();
    for k in DeltaKind::ALL {
        named.push((k.label().to_string(), build_delta(sc, km, k)?));
    }
    named.push(("D".into(), build_auxiliary(sc, km, Auxiliary::D)?));
    named.push(("Z".into(), build_auxiliary(sc, km, Auxiliary::Z)?));
    for (a, s) in build_generators(sc).into_iter().enumerate() {
        named.push((format!("S{}", a + 1), s));
    }
    let mut basis_names: Vec<String> = vec![String::new()];
    let mut basis = vec![GrassmannOperator::identity(n)];
    for (name, op) in &named {
        basis_names.push(name.clone());
        basis.push(op.clone());
    }
    let count = named.len();
    let mut cells = vec![vec![String::new(); count]; count];
    for (i, j) in upper_pairs(count) {
        let (a, b) = (&named[i].1, &named[j].1);
        let both_odd = a.parity() == Parity::Odd && b.parity() == Parity::Odd;
        let result = a.graded_bracket(b)?;
        let (forward, backward) = match decompose(&basis, &result) {
            Some(coords) => {
                let parts: Vec<(String, Scalar)> = basis_names
                    .iter()
                    .zip(coords)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(name, c)| {
                        if name.is_empty() {
                            // constant multiples of the identity are shown via N
                            let ratio = c.div(&Scalar::from_int(n as i64)).expect("n > 0");
                            ("N".to_string(), ratio)
                        } else {
                            (name.clone(), c)
                        }
                    })
                    .collect();
                let flipped: Vec<(String, Scalar)> =
                    parts.iter().map(|(name, c)| (name.clone(), -c)).collect();
                let back = if both_odd { &parts } else { &flipped };
                (render_combination(&parts), render_combination(back))
            }
            None => {
                let text = format!("({} terms)", result.len());
                (text.clone(), text)
            }
        };
        cells[i][j] = forward;
        cells[j][i] = backward;
    }
    let mut header: Vec<&str> = vec!["X \\ Y"];
    header.extend(named.iter().map(|(name, _)| name.as_str()));
    let rows: Vec<Vec<String>> = named
        .iter()
        .zip(cells)
        .map(|((name, _), row)| {
            let mut r = vec![format!("**{name}**")];
            r.extend(row);
            r
        })
        .collect();
    Ok(table(&header, &rows))
}

/// Index pairs `(i, j)` with `i <= j`.
fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i..n).map(move |j| (i, j)))
}
