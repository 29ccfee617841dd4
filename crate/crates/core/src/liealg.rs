//! Lie algebra structure constants: ingestion, validation, the Cartan–Killing
//! metric with its inverse, the lowered tensor `c_{αβγ}`, and a small catalog.
//!
//! Indices are 0-based in the API and 1-based in JSON files and reports.

use std::collections::BTreeMap;
use std::ops::Bound;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::Scalar;

/// Reports list at most this many violations; `total` keeps the full count.
pub const MAX_LISTED_VIOLATIONS: usize = 100;

/// Sparse table `c_{ab}^c` of a Lie algebra of dimension `dim`.
///
/// The table is stored as given: antisymmetry and the Jacobi identity are
/// checked by [`StructureConstants::validate`], not enforced on construction,
/// so that broken tables can be examined as well.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    dim: usize,
    table: BTreeMap<(usize, usize, usize), Scalar>,
}

/// One entry of the JSON schema (1-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub value: Scalar,
}

/// JSON form of a structure-constant table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub dim: usize,
    #[serde(default = "default_field")]
    pub scalar: String,
    pub entries: Vec<EntryRecord>,
    #[serde(default)]
    pub half: bool,
}

fn default_field() -> String {
    FIELD_TAG.to_string()
}

/// Tag naming the coefficient field Q(√2, √3) in algebra files.
pub const FIELD_TAG: &str = "q23";

impl StructureConstants {
    /// The abelian algebra of dimension `dim`.
    pub fn zero(dim: usize) -> Self {
        StructureConstants {
            dim,
            table: BTreeMap::new(),
        }
    }

    /// Build from 0-based entries `((a, b, c), value)`.
    ///
    /// With `half = true` only `a < b` may be given and the `a > b` half is
    /// filled by antisymmetry. Otherwise the entries are stored verbatim.
    pub fn from_entries(
        dim: usize,
        entries: impl IntoIterator<Item = ((usize, usize, usize), Scalar)>,
        half: bool,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidTable("dimension must be positive".into()));
        }
        let mut sc = Self::zero(dim);
        for ((a, b, c), v) in entries {
            if a >= dim || b >= dim || c >= dim {
                return Err(Error::InvalidTable(format!(
                    "entry ({}, {}, {}) outside 1..={dim}",
                    a + 1,
                    b + 1,
                    c + 1
                )));
            }
            if half && a >= b {
                return Err(Error::InvalidTable(format!(
                    "half table entry ({}, {}, {}) must have a < b",
                    a + 1,
                    b + 1,
                    c + 1
                )));
            }
            if sc.table.contains_key(&(a, b, c)) {
                return Err(Error::InvalidTable(format!(
                    "duplicate entry ({}, {}, {})",
                    a + 1,
                    b + 1,
                    c + 1
                )));
            }
            if v.is_zero() {
                continue;
            }
            if half {
                sc.table.insert((b, a, c), -&v);
            }
            sc.table.insert((a, b, c), v);
        }
        Ok(sc)
    }

    pub fn from_file(file: &AlgebraFile) -> Result<Self> {
        if file.scalar != FIELD_TAG {
            return Err(Error::InvalidTable(format!(
                "unsupported scalar field {:?}, expected {FIELD_TAG:?}",
                file.scalar
            )));
        }
        let mut entries = Vec::with_capacity(file.entries.len());
        for e in &file.entries {
            if e.a == 0 || e.b == 0 || e.c == 0 {
                return Err(Error::InvalidTable("indices start at 1".into()));
            }
            entries.push(((e.a - 1, e.b - 1, e.c - 1), e.value.clone()));
        }
        Self::from_entries(file.dim, entries, file.half)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AlgebraFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    /// Full (non-half) JSON form, entries in index order.
    pub fn to_file(&self) -> AlgebraFile {
        AlgebraFile {
            dim: self.dim,
            scalar: FIELD_TAG.to_string(),
            entries: self
                .table
                .iter()
                .map(|(&(a, b, c), v)| EntryRecord {
                    a: a + 1,
                    b: b + 1,
                    c: c + 1,
                    value: v.clone(),
                })
                .collect(),
            half: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_abelian(&self) -> bool {
        self.table.is_empty()
    }

    /// `c_{ab}^c`
    pub fn get(&self, a: usize, b: usize, c: usize) -> Scalar {
        self.table.get(&(a, b, c)).cloned().unwrap_or_default()
    }

    /// Overwrite a single stored entry (no antisymmetric partner is touched).
    pub fn set(&mut self, a: usize, b: usize, c: usize, value: Scalar) {
        assert!(a < self.dim && b < self.dim && c < self.dim);
        if value.is_zero() {
            self.table.remove(&(a, b, c));
        } else {
            self.table.insert((a, b, c), value);
        }
    }

    /// Nonzero entries `((a, b, c), c_{ab}^c)`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &Scalar)> {
        self.table.iter().map(|(k, v)| (*k, v))
    }

    /// Nonzero `(c, c_{ab}^c)` for fixed `a, b`.
    pub fn bracket(&self, a: usize, b: usize) -> impl Iterator<Item = (usize, &Scalar)> {
        self.table
            .range((
                Bound::Included((a, b, 0)),
                Bound::Included((a, b, usize::MAX)),
            ))
            .map(|(k, v)| (k.2, v))
    }

    /// Check antisymmetry in the lower indices and the Jacobi identity.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let mut report = ValidationReport::new("structure constants");
        for a in 0..n {
            for b in a..n {
                for c in 0..n {
                    let residual = &self.get(a, b, c) + &self.get(b, a, c);
                    if !residual.is_zero() {
                        report.push("antisymmetry", vec![a, b, c], residual);
                    }
                }
            }
        }
        // sum_l c_{al}^d c_{bg}^l + c_{bl}^d c_{ga}^l + c_{gl}^d c_{ab}^l
        for a in 0..n {
            for b in 0..n {
                for g in 0..n {
                    let mut total = vec![Scalar::zero(); n];
                    for (x, y, z) in [(a, b, g), (b, g, a), (g, a, b)] {
                        for (l, inner) in self.bracket(y, z) {
                            for (d, outer) in self.bracket(x, l) {
                                total[d] += &(outer * inner);
                            }
                        }
                    }
                    for (d, residual) in total.into_iter().enumerate() {
                        if !residual.is_zero() {
                            report.push("jacobi", vec![a, b, g, d], residual);
                        }
                    }
                }
            }
        }
        report
    }

    /// Cartan–Killing metric, its inverse when nondegenerate, and `c_{αβγ}`.
    pub fn killing(&self) -> KillingMetric {
        KillingMetric::new(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: String,
    /// 1-based index tuple.
    pub indices: Vec<usize>,
    pub residual: Scalar,
}

/// Outcome of a tensor-level check. Empty `violations` means it passed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub check: String,
    pub total: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new(check: &str) -> Self {
        ValidationReport {
            check: check.to_string(),
            total: 0,
            violations: Vec::new(),
        }
    }

    /// Record a violation at 0-based `indices`.
    pub fn push(&mut self, kind: &str, indices: Vec<usize>, residual: Scalar) {
        self.total += 1;
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(Violation {
                kind: kind.to_string(),
                indices: indices.into_iter().map(|i| i + 1).collect(),
                residual,
            });
        }
    }

    pub fn is_ok(&self) -> bool {
        self.total == 0
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.total += other.total;
        for v in other.violations {
            if self.violations.len() < MAX_LISTED_VIOLATIONS {
                self.violations.push(v);
            }
        }
    }
}

/// Dense square matrix of scalars.
pub type Matrix = Vec<Vec<Scalar>>;

/// Dense rank-3 tensor indexed `[a][b][c]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<Scalar>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            data: vec![Scalar::zero(); n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &Scalar {
        &self.data[(a * self.n + b) * self.n + c]
    }

    pub fn get_mut(&mut self, a: usize, b: usize, c: usize) -> &mut Scalar {
        &mut self.data[(a * self.n + b) * self.n + c]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Nonzero entries in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = ((usize, usize, usize), &Scalar)> {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(i, v)| ((i / (n * n), (i / n) % n, i % n), v))
    }

    /// Contract every slot with the matrix `m`: `out_{ijk} = m_{ia} m_{jb} m_{kc} t_{abc}`.
    pub fn transform(&self, m: &Matrix) -> Tensor3 {
        let n = self.n;
        let step = |t: &Tensor3, slot: usize| {
            let mut out = Tensor3::zeros(n);
            for ((a, b, c), v) in t.nonzero() {
                let src = [a, b, c][slot];
                for (i, row) in m.iter().enumerate() {
                    let w = &row[src];
                    if w.is_zero() {
                        continue;
                    }
                    let mut idx = [a, b, c];
                    idx[slot] = i;
                    *out.get_mut(idx[0], idx[1], idx[2]) += &(w * v);
                }
            }
            out
        };
        let t = step(self, 0);
        let t = step(&t, 1);
        step(&t, 2)
    }
}

/// Cartan–Killing data of an algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillingMetric {
    dim: usize,
    metric: Matrix,
    inverse: Option<Matrix>,
    rank: usize,
    lowered: Tensor3,
}

impl KillingMetric {
    fn new(sc: &StructureConstants) -> Self {
        let n = sc.dim();
        // g_{ab} = c_{ac}^l c_{bl}^c
        let mut metric = vec![vec![Scalar::zero(); n]; n];
        for (a, row) in metric.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                let mut acc = Scalar::zero();
                for c in 0..n {
                    for (l, x) in sc.bracket(a, c) {
                        let y = sc.get(b, l, c);
                        if !y.is_zero() {
                            acc += &(x * &y);
                        }
                    }
                }
                *slot = acc;
            }
        }
        let (rank, inverse) = invert(&metric);

        // c_{abc} = c_{ab}^d g_{dc}
        let mut lowered = Tensor3::zeros(n);
        for ((a, b, d), v) in sc.entries() {
            for (c, g) in metric[d].iter().enumerate() {
                if !g.is_zero() {
                    *lowered.get_mut(a, b, c) += &(v * g);
                }
            }
        }
        KillingMetric {
            dim: n,
            metric,
            inverse,
            rank,
            lowered,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `g_{ab}`
    pub fn metric(&self) -> &Matrix {
        &self.metric
    }

    /// `g^{ab}`, present iff the metric is nondegenerate.
    pub fn inverse(&self) -> Option<&Matrix> {
        self.inverse.as_ref()
    }

    pub fn require_inverse(&self) -> Result<&Matrix> {
        self.inverse.as_ref().ok_or(Error::MissingInverseMetric)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_degenerate(&self) -> bool {
        self.inverse.is_none()
    }

    /// `c_{abc} = c_{ab}^d g_{dc}`
    pub fn lowered(&self) -> &Tensor3 {
        &self.lowered
    }

    /// `c^{abc}` with every index raised by `g^{ab}`.
    pub fn raised(&self) -> Result<Tensor3> {
        Ok(self.lowered.transform(self.require_inverse()?))
    }

    pub fn check_symmetry(&self) -> ValidationReport {
        let mut report = ValidationReport::new("metric symmetry");
        for a in 0..self.dim {
            for b in a + 1..self.dim {
                let residual = &self.metric[a][b] - &self.metric[b][a];
                if !residual.is_zero() {
                    report.push("symmetry", vec![a, b], residual);
                }
            }
        }
        report
    }

    /// `g^{ab} g_{bc} = δ^a_c`; fails outright when the inverse is absent.
    pub fn check_inverse(&self) -> Result<ValidationReport> {
        let inv = self.require_inverse()?;
        let mut report = ValidationReport::new("inverse metric");
        for a in 0..self.dim {
            for c in 0..self.dim {
                let mut acc = Scalar::zero();
                for b in 0..self.dim {
                    acc += &(&inv[a][b] * &self.metric[b][c]);
                }
                if a == c {
                    acc -= &Scalar::one();
                }
                if !acc.is_zero() {
                    report.push("inverse", vec![a, c], acc);
                }
            }
        }
        Ok(report)
    }

    /// `c_{abc} = -c_{acb}`, which together with lower-index antisymmetry
    /// makes the tensor totally antisymmetric. Checked for all six
    /// permutations.
    pub fn check_total_antisymmetry(&self) -> ValidationReport {
        let mut report = ValidationReport::new("total antisymmetry of c_abc");
        let n = self.dim;
        let t = &self.lowered;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let base = t.get(a, b, c);
                    let odd = [t.get(a, c, b), t.get(b, a, c), t.get(c, b, a)];
                    let even = [t.get(b, c, a), t.get(c, a, b)];
                    for other in odd {
                        let residual = base + other;
                        if !residual.is_zero() {
                            report.push("antisymmetry", vec![a, b, c], residual);
                        }
                    }
                    for other in even {
                        let residual = base - other;
                        if !residual.is_zero() {
                            report.push("cyclic symmetry", vec![a, b, c], residual);
                        }
                    }
                }
            }
        }
        report
    }

    /// `-c^{abc} c_{abc}`, which equals the dimension for semisimple algebras.
    pub fn dimension_invariant(&self) -> Result<Scalar> {
        let raised = self.raised()?;
        let mut acc = Scalar::zero();
        for ((a, b, c), up) in raised.nonzero() {
            let down = self.lowered.get(a, b, c);
            if !down.is_zero() {
                acc += &(up * down);
            }
        }
        Ok(-acc)
    }
}

/// Gauss–Jordan elimination over the scalar field. Returns the exact rank and
/// the inverse when the matrix is nonsingular.
pub fn invert(m: &Matrix) -> (usize, Option<Matrix>) {
    let n = m.len();
    let mut a: Matrix = m.clone();
    let mut inv: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..n).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        inv.swap(rank, pivot);
        let p = a[rank][col].inv().expect("pivot is nonzero");
        for x in a[rank].iter_mut().chain(inv[rank].iter_mut()) {
            *x = &*x * &p;
        }
        for r in 0..n {
            if r == rank || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let da = &f * &a[rank][j];
                a[r][j] -= &da;
                let di = &f * &inv[rank][j];
                inv[r][j] -= &di;
            }
        }
        rank += 1;
    }
    (rank, (rank == n).then_some(inv))
}

mod catalog {
    pub const SO3: &str = include_str!("../data/so3.json");
    pub const SL2: &str = include_str!("../data/sl2.json");
    pub const SL3: &str = include_str!("../data/sl3.json");
    pub const SO5: &str = include_str!("../data/so5.json");
    pub const HEISENBERG: &str = include_str!("../data/heisenberg.json");
    pub const E2: &str = include_str!("../data/e2.json");
}

/// Names accepted by [`catalog`], `zero(N)` standing for any positive `N`.
pub const CATALOG_NAMES: &[&str] = &["so3", "sl2", "sl3", "so5", "heisenberg", "e2", "zero(N)"];

/// Look up a built-in algebra.
///
/// * `so3`: `c_{ab}^c = ε_{abc}`
/// * `sl2`: basis `(e, f, h)` with `[e,f] = h`, `[h,e] = 2e`, `[h,f] = -2f`
/// * `sl3`: Chevalley basis `(h1, h2, e1, e2, e12, f1, f2, f12)`
/// * `so5`: Chevalley basis of type B2 = C2, realized in `sp(4)`:
///   `(h1, h2, e_a1, e_a2, e_a1+a2, e_2a1+a2, f…)` with `a1` short
/// * `heisenberg`: `[x, y] = z`
/// * `e2`: `(J, P1, P2)` with `[J, P1] = P2`, `[J, P2] = -P1`
/// * `zero(N)`: the abelian algebra of dimension `N`
pub fn catalog(name: &str) -> Result<StructureConstants> {
    let text = match name {
        "so3" => catalog::SO3,
        "sl2" => catalog::SL2,
        "sl3" => catalog::SL3,
        "so5" => catalog::SO5,
        "heisenberg" => catalog::HEISENBERG,
        "e2" => catalog::E2,
        _ => {
            let dim = name
                .strip_prefix("zero(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|d| d.trim().parse::<usize>().ok())
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::UnknownAlgebra(name.to_string()))?;
            return Ok(StructureConstants::zero(dim));
        }
    };
    StructureConstants::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn half_tables_are_completed() {
        let sc = catalog("so3").unwrap();
        assert_eq!(sc.get(0, 1, 2), s(1));
        assert_eq!(sc.get(1, 0, 2), s(-1));
        assert_eq!(sc.get(2, 0, 1), s(1));
        assert_eq!(sc.entries().count(), 6);
    }

    #[test]
    fn half_table_rejects_lower_entries() {
        let err = StructureConstants::from_entries(3, [((1, 0, 2), s(1))], true);
        assert!(err.is_err());
        let err = StructureConstants::from_entries(3, [((0, 1, 3), s(1))], false);
        assert!(err.is_err());
    }

    #[test]
    fn antisymmetry_counterexample() {
        let sc = StructureConstants::from_entries(3, [((0, 1, 2), s(1)), ((1, 0, 2), s(1))], false)
            .unwrap();
        let report = sc.validate();
        assert!(!report.is_ok());
        let first = &report.violations[0];
        assert_eq!(first.kind, "antisymmetry");
        assert_eq!(first.indices, vec![1, 2, 3]);
        assert_eq!(first.residual, s(2));
    }

    #[test]
    fn report_is_capped() {
        // a table of garbage: every c_{ab}^c = 1
        let n = 5;
        let mut entries = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    entries.push(((a, b, c), s(1)));
                }
            }
        }
        let sc = StructureConstants::from_entries(n, entries, false).unwrap();
        let report = sc.validate();
        assert!(report.total > MAX_LISTED_VIOLATIONS);
        assert_eq!(report.violations.len(), MAX_LISTED_VIOLATIONS);
    }

    #[test]
    fn catalog_names() {
        assert_eq!(catalog("zero(4)").unwrap().dim(), 4);
        assert!(catalog("zero(4)").unwrap().is_abelian());
        assert!(matches!(catalog("zero(0)"), Err(Error::UnknownAlgebra(_))));
        assert!(matches!(catalog("g2"), Err(Error::UnknownAlgebra(_))));
        assert_eq!(catalog("sl3").unwrap().dim(), 8);
        assert_eq!(catalog("so5").unwrap().dim(), 10);
    }

    #[test]
    fn singular_matrix_rank() {
        let m = vec![vec![s(1), s(2)], vec![s(2), s(4)]];
        let (rank, inv) = invert(&m);
        assert_eq!(rank, 1);
        assert!(inv.is_none());
        let m = vec![vec![s(0), s(1)], vec![s(1), s(0)]];
        let (rank, inv) = invert(&m);
        assert_eq!(rank, 2);
        assert_eq!(inv.unwrap(), m);
    }

    #[test]
    fn json_round_trip() {
        let sc = catalog("sl2").unwrap();
        let text = serde_json::to_string(&sc.to_file()).unwrap();
        assert_eq!(StructureConstants::from_json(&text).unwrap(), sc);
        let bad = r#"{"dim": 2, "scalar": "q5", "entries": []}"#;
        assert!(StructureConstants::from_json(bad).is_err());
    }
}
