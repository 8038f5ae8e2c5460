//! Dense square matrices, membership tests for Ω_n and K_n, samplers, and
//! row/column surgery.
//!
//! Indices are 0-based throughout the API. Text and report output that is
//! meant for people uses the same 0-based convention so that witnesses can be
//! pasted back into code.

use std::fmt;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar, ScalarMode};

/// Largest order accepted by the constructors. Algorithms that enumerate
/// subsets or permutations document their own, smaller limits.
pub const MAX_ORDER: usize = 30;

/// Largest order for the exhaustive subset scans (full indecomposability,
/// naive permanent as an oracle).
pub const MAX_EXHAUSTIVE_ORDER: usize = 8;

/// Dense square matrix stored row-major.
///
/// Matrices built through the checked constructors are nonnegative. Signed
/// matrices (such as `A - J_n`, whose subpermanents enter the hypothesis
/// polynomials) are built with [`Mat::signed`] or [`Mat::sub_signed`]; every
/// permanent routine accepts them.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    n: usize,
    entries: Vec<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumVectors<S> {
    pub rows: Vec<S>,
    pub cols: Vec<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Row,
    Col,
}

/// A strictly increasing selection of indices from `0..n`, an element of
/// `Q_{k,n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsetIndex {
    members: Vec<usize>,
}

impl SubsetIndex {
    pub fn new(members: Vec<usize>, n: usize) -> Result<Self> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "subset {members:?} is not strictly increasing"
            )));
        }
        if let Some(&last) = members.last() {
            if last >= n {
                return Err(Error::invalid(format!(
                    "subset index {last} out of range for order {n}"
                )));
            }
        }
        Ok(SubsetIndex { members })
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn complement(&self, n: usize) -> SubsetIndex {
        SubsetIndex {
            members: (0..n).filter(|i| !self.members.contains(i)).collect(),
        }
    }

    /// All of `Q_{k,n}` in lexicographic order.
    pub fn all(k: usize, n: usize) -> impl Iterator<Item = SubsetIndex> {
        (0..n)
            .combinations(k)
            .map(|members| SubsetIndex { members })
    }
}

impl<S: Scalar> Mat<S> {
    /// Builds a nonnegative matrix from row-major entries.
    pub fn from_entries(n: usize, entries: Vec<S>) -> Result<Self> {
        let m = Self::signed(n, entries)?;
        if let Some(pos) = m.entries.iter().position(|v| v.is_negative()) {
            return Err(Error::invalid(format!(
                "entry ({}, {}) = {} is negative",
                pos / n,
                pos % n,
                m.entries[pos]
            )));
        }
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix is not square"));
        }
        Self::from_entries(n, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix without the nonnegativity check.
    pub fn signed(n: usize, entries: Vec<S>) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::invalid(format!(
                "order {n} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        if entries.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} entries for order {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(Mat { n, entries })
    }

    pub(crate) fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Mat { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    /// `J_n`: every entry equal to `1/n`.
    pub fn uniform(n: usize) -> Self {
        let v = S::from_ratio(1, n as i64);
        Self::from_fn(n, |_, _| v.clone())
    }

    /// Every entry equal to `value`.
    pub fn constant(n: usize, value: S) -> Self {
        Self::from_fn(n, |_, _| value.clone())
    }

    /// Permutation matrix with a one at `(i, perm[i])`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Self::from_fn(n, |i, j| {
            if perm[i] == j {
                S::one()
            } else {
                S::zero()
            }
        }))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> ScalarMode {
        S::MODE
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.entries[i * self.n + j] = value;
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entry_sum(&self) -> S {
        self.entries.iter().fold(S::zero(), |acc, v| acc + v.clone())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|v| !v.is_negative())
    }

    pub fn min_entry(&self) -> Option<S> {
        self.entries
            .iter()
            .cloned()
            .reduce(|a, b| if b < a { b } else { a })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.map(|v| v.to_f64())
    }

    /// Exact rational copy. Float entries are lifted without rounding.
    pub fn to_exact(&self) -> Mat<Rational> {
        self.map(|v| v.to_rational())
    }

    pub fn scaled(&self, factor: &S) -> Self {
        self.map(|v| v.clone() * factor.clone())
    }

    /// Entrywise sum. Panics if the orders differ.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "order mismatch");
        Mat {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// Entrywise difference; the result may have negative entries.
    pub fn sub_signed(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "order mismatch");
        Mat {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    /// `t·J_n + (1 - t)·A`.
    pub fn convex_with_uniform(&self, t: &S) -> Self {
        let jn = t.clone() / S::from_usize(self.n);
        let keep = S::one() - t.clone();
        self.map(|v| jn.clone() + keep.clone() * v.clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// `A[rows / cols]` for equal-length index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        assert_eq!(rows.len(), cols.len(), "submatrix must be square");
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for &i in rows {
            for &j in cols {
                entries.push(self.get(i, j).clone());
            }
        }
        Mat { n: k, entries }
    }

    /// `A(rows / cols)`: the matrix with the given rows and columns deleted.
    pub fn delete(&self, rows: &[usize], cols: &[usize]) -> Self {
        let keep_r: Vec<usize> = (0..self.n).filter(|i| !rows.contains(i)).collect();
        let keep_c: Vec<usize> = (0..self.n).filter(|j| !cols.contains(j)).collect();
        self.submatrix(&keep_r, &keep_c)
    }

    /// `A(i|j)`.
    pub fn minor(&self, i: usize, j: usize) -> Self {
        self.delete(&[i], &[j])
    }

    /// Applies row and column permutations: entry `(i, j)` of the result is
    /// `a[row_perm[i]][col_perm[j]]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        Self::from_fn(self.n, |i, j| self.get(row_perm[i], col_perm[j]).clone())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.clone() - b.clone()).abs().to_f64())
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> fmt::Display for Mat<S> {
    /// Matrix text format: the order on the first line, then one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for i in 0..self.n {
            let line = self.row(i).iter().map(|v| v.render()).join(" ");
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Parses the matrix text format exactly: first non-blank line `n`, then `n`
/// rows of whitespace-separated decimal or `p/q` entries. Lines starting with
/// `#` are ignored.
pub fn parse_matrix_text(text: &str) -> Result<Mat<Rational>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty input"))?;
    let n: usize = header
        .parse()
        .map_err(|_| Error::parse(line_no, format!("expected the order, found `{header}`")))?;
    if n == 0 || n > MAX_ORDER {
        return Err(Error::parse(
            line_no,
            format!("order must be between 1 and {MAX_ORDER}"),
        ));
    }
    let mut entries = Vec::with_capacity(n * n);
    for r in 0..n {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(line_no, format!("missing row {r}")))?;
        let row: Vec<&str> = line.split_whitespace().collect();
        if row.len() != n {
            return Err(Error::parse(
                line_no,
                format!("row {r} has {} entries, expected {n}", row.len()),
            ));
        }
        for tok in row {
            let v = parse_rational(tok)
                .ok_or_else(|| Error::parse(line_no, format!("cannot parse entry `{tok}`")))?;
            entries.push(v);
        }
    }
    if let Some((line_no, extra)) = lines.next() {
        return Err(Error::parse(line_no, format!("unexpected trailing line `{extra}`")));
    }
    Mat::from_entries(n, entries).map_err(|e| Error::parse(0, e.to_string()))
}

/// Structured-object form of a matrix for machine exchange.
///
/// Float entries serialize as JSON numbers; exact entries as `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatRecord {
    pub n: usize,
    pub entries: Vec<Vec<serde_json::Value>>,
    pub scalar_mode: ScalarMode,
}

impl<S: Scalar> From<&Mat<S>> for MatRecord {
    fn from(m: &Mat<S>) -> Self {
        let entries = m
            .rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .map(|v| match S::MODE {
                        ScalarMode::Float64 => serde_json::json!(v.to_f64()),
                        ScalarMode::ExactRational => serde_json::json!(v.render()),
                    })
                    .collect()
            })
            .collect();
        MatRecord {
            n: m.order(),
            entries,
            scalar_mode: S::MODE,
        }
    }
}

impl MatRecord {
    /// Reads the record exactly; numbers and strings are both accepted.
    pub fn to_exact(&self) -> Result<Mat<Rational>> {
        if self.entries.len() != self.n {
            return Err(Error::parse(0, "row count does not match n"));
        }
        let mut flat = Vec::with_capacity(self.n * self.n);
        for row in &self.entries {
            if row.len() != self.n {
                return Err(Error::parse(0, "row length does not match n"));
            }
            for v in row {
                let r = match v {
                    serde_json::Value::Number(num) => num
                        .as_f64()
                        .filter(|f| f.is_finite())
                        .map(Rational::from_f64),
                    serde_json::Value::String(s) => parse_rational(s),
                    _ => None,
                };
                flat.push(r.ok_or_else(|| Error::parse(0, format!("bad entry {v}")))?);
            }
        }
        Mat::from_entries(self.n, flat)
    }
}

impl<S: Scalar> Serialize for Mat<S> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        MatRecord::from(self).serialize(s)
    }
}

pub fn sum_vectors<S: Scalar>(a: &Mat<S>) -> SumVectors<S> {
    let n = a.order();
    let rows = (0..n)
        .map(|i| a.row(i).iter().fold(S::zero(), |acc, v| acc + v.clone()))
        .collect();
    let cols = (0..n)
        .map(|j| (0..n).fold(S::zero(), |acc, i| acc + a.get(i, j).clone()))
        .collect();
    SumVectors { rows, cols }
}

/// Ω_n membership: every row and column sum within `tol` of one.
pub fn is_doubly_stochastic<S: Scalar>(a: &Mat<S>, tol: &S) -> bool {
    if !a.is_nonnegative() {
        return false;
    }
    let sv = sum_vectors(a);
    sv.rows
        .iter()
        .chain(&sv.cols)
        .all(|s| (s.clone() - S::one()).abs() <= *tol)
}

/// K_n membership: total entry sum within `tol` of `n`.
pub fn is_in_kn<S: Scalar>(a: &Mat<S>, tol: &S) -> bool {
    a.is_nonnegative() && (a.entry_sum() - S::from_usize(a.order())).abs() <= *tol
}

pub(crate) fn require_doubly_stochastic<S: Scalar>(a: &Mat<S>, what: &str) -> Result<()> {
    if is_doubly_stochastic(a, &S::domain_tol()) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{what} requires a doubly stochastic matrix of order {}",
            a.order()
        )))
    }
}

pub(crate) fn require_kn<S: Scalar>(a: &Mat<S>, what: &str) -> Result<()> {
    if is_in_kn(a, &S::domain_tol()) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{what} requires a nonnegative matrix with entry sum {}",
            a.order()
        )))
    }
}

pub const SINKHORN_TOL: f64 = 1e-12;
pub const SINKHORN_MAX_ITERS: usize = 10_000;

/// Alternating row/column normalisation towards a doubly stochastic scaling
/// `D1·A·D2`.
pub fn sinkhorn_project(a: &Mat<f64>, tol: f64, max_iters: usize) -> Result<Mat<f64>> {
    if !(tol > 0.0) {
        return Err(Error::invalid("sinkhorn tolerance must be positive"));
    }
    let n = a.order();
    let mut m = a.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        for i in 0..n {
            let s: f64 = m.row(i).iter().sum();
            if s <= 0.0 {
                return Err(Error::ZeroLine { axis: "row", index: i });
            }
            for j in 0..n {
                m.entries[i * n + j] /= s;
            }
        }
        for j in 0..n {
            let s: f64 = (0..n).map(|i| m.entries[i * n + j]).sum();
            if s <= 0.0 {
                return Err(Error::ZeroLine { axis: "column", index: j });
            }
            for i in 0..n {
                m.entries[i * n + j] /= s;
            }
        }
        let sv = sum_vectors(&m);
        residual = sv
            .rows
            .iter()
            .chain(&sv.cols)
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max);
        if residual <= tol {
            return Ok(m);
        }
    }
    Err(Error::NonConvergence {
        iters: max_iters,
        residual,
    })
}

/// Deterministic per-call generator.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random point of the `(m-1)`-simplex.
pub fn random_simplex_weights<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// `Σ w_i P_i` for explicit weights and permutations.
pub fn birkhoff_combination(weights: &[f64], perms: &[Vec<usize>]) -> Mat<f64> {
    assert_eq!(weights.len(), perms.len());
    let n = perms.first().map_or(0, Vec::len);
    let mut entries = vec![0.0; n * n];
    for (w, p) in weights.iter().zip(perms) {
        for (i, &j) in p.iter().enumerate() {
            entries[i * n + j] += w;
        }
    }
    Mat { n, entries }
}

/// Convex combination of `m` uniformly random permutation matrices with
/// uniformly random simplex weights.
pub fn random_birkhoff(n: usize, m: usize, seed: u64) -> Result<Mat<f64>> {
    if m == 0 {
        return Err(Error::invalid("need at least one permutation"));
    }
    let mut rng = seeded_rng(seed);
    let weights = random_simplex_weights(m, &mut rng);
    let perms: Vec<Vec<usize>> = (0..m).map(|_| random_permutation(n, &mut rng)).collect();
    Ok(birkhoff_combination(&weights, &perms))
}

/// Exact counterpart of [`random_birkhoff`]: integer weights in `1..=denom`
/// normalized to sum one, so the result lies in Ω_n exactly.
pub fn random_birkhoff_exact(n: usize, m: usize, denom: u32, seed: u64) -> Result<Mat<Rational>> {
    if m == 0 || denom == 0 {
        return Err(Error::invalid("need at least one permutation and a positive weight bound"));
    }
    let mut rng = seeded_rng(seed);
    let raw: Vec<i64> = (0..m).map(|_| rng.random_range(1..=denom) as i64).collect();
    let total: i64 = raw.iter().sum();
    let perms: Vec<Vec<usize>> = (0..m).map(|_| random_permutation(n, &mut rng)).collect();
    let mut out = Mat::<Rational>::constant(n, <Rational as Scalar>::from_int(0));
    for (w, p) in raw.iter().zip(&perms) {
        let w = <Rational as Scalar>::from_ratio(*w, total);
        for (i, &j) in p.iter().enumerate() {
            let v = out.get(i, j).clone() + w.clone();
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Uniform sample of K_n (i.i.d. exponential entries rescaled to sum `n`).
pub fn random_kn(n: usize, seed: u64) -> Mat<f64> {
    let mut rng = seeded_rng(seed);
    let w = random_simplex_weights(n * n, &mut rng);
    Mat {
        n,
        entries: w.into_iter().map(|v| v * n as f64).collect(),
    }
}

/// Replaces lines `s` and `t` along `axis` by their entrywise mean.
pub fn average_lines<S: Scalar>(a: &Mat<S>, axis: Axis, s: usize, t: usize) -> Result<Mat<S>> {
    let n = a.order();
    if s == t || s >= n || t >= n {
        return Err(Error::invalid(format!(
            "cannot average lines {s} and {t} of an order-{n} matrix"
        )));
    }
    let two = S::from_int(2);
    let mut out = a.clone();
    for k in 0..n {
        let (p, q) = match axis {
            Axis::Row => ((s, k), (t, k)),
            Axis::Col => ((k, s), (k, t)),
        };
        let mean = (a.get(p.0, p.1).clone() + a.get(q.0, q.1).clone()) / two.clone();
        out.set(p.0, p.1, mean.clone());
        out.set(q.0, q.1, mean);
    }
    Ok(out)
}

/// Exact test for full indecomposability: no nonempty row set `S` and column
/// set `T` with `|S| + |T| = n` index an all-zero submatrix.
///
/// An entry counts as zero when it does not exceed
/// [`Scalar::support_threshold`]. For every row subset the set of columns
/// vanishing on all of its rows is computed, so the scan over column subsets
/// is implicit. Panics if `n > MAX_EXHAUSTIVE_ORDER`.
pub fn is_fully_indecomposable<S: Scalar>(a: &Mat<S>) -> bool {
    let n = a.order();
    assert!(
        n <= MAX_EXHAUSTIVE_ORDER,
        "exhaustive scan limited to order {MAX_EXHAUSTIVE_ORDER}"
    );
    if n == 0 {
        return false;
    }
    let thr = S::support_threshold();
    let zero_cols: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| *a.get(i, j) <= thr)
                .fold(0u32, |acc, j| acc | (1 << j))
        })
        .collect();
    if n == 1 {
        return zero_cols[0] == 0;
    }
    let full = (1u32 << n) - 1;
    for rows in 1..full {
        let common = (0..n)
            .filter(|i| rows & (1 << i) != 0)
            .fold(full, |acc, i| acc & zero_cols[i]);
        let s = rows.count_ones() as usize;
        if common.count_ones() as usize >= n - s {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(rows: &[&[(i64, i64)]]) -> Mat<Rational> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(p, d)| rat(p, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sum_vectors_examples() {
        let sv = sum_vectors(&Mat::<Rational>::uniform(4));
        assert_eq!(sv.rows, vec![rat(1, 1); 4]);
        assert_eq!(sv.cols, vec![rat(1, 1); 4]);
        let sv = sum_vectors(&Mat::<Rational>::identity(3));
        assert_eq!(sv.rows, vec![rat(1, 1); 3]);
        let m = q(&[&[(2, 1), (0, 1)], &[(0, 1), (0, 1)]]);
        let sv = sum_vectors(&m);
        assert_eq!(sv.rows, vec![rat(2, 1), rat(0, 1)]);
        assert_eq!(sv.cols, vec![rat(2, 1), rat(0, 1)]);
    }

    #[test]
    fn doubly_stochastic_examples() {
        let zero = rat(0, 1);
        assert!(is_doubly_stochastic(&Mat::<Rational>::uniform(4), &zero));
        assert!(is_doubly_stochastic(&Mat::<Rational>::identity(4), &zero));
        let m = Mat::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.6]]).unwrap();
        assert!(!is_doubly_stochastic(&m, &1e-12));
    }

    #[test]
    fn kn_examples() {
        let zero = rat(0, 1);
        let j4 = Mat::<Rational>::uniform(4);
        assert!(is_in_kn(&j4, &zero));
        assert!(!is_in_kn(&j4.scaled(&rat(2, 1)), &zero));
        let p = Mat::<Rational>::permutation(&[2, 0, 3, 1]).unwrap();
        assert!(is_in_kn(&p, &zero));
    }

    #[test]
    fn sinkhorn_fixed_points_and_two_by_two() {
        let j = Mat::<f64>::uniform(5);
        let out = sinkhorn_project(&j, 1e-12, 100).unwrap();
        assert!(out.max_abs_diff(&j) < 1e-15);

        let m = Mat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let out = sinkhorn_project(&m, 1e-14, 10_000).unwrap();
        let want = Mat::from_rows(vec![vec![2.0 / 3.0, 1.0 / 3.0], vec![1.0 / 3.0, 2.0 / 3.0]])
            .unwrap();
        assert!(out.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn sinkhorn_matches_closed_form_two_by_two_scaling() {
        // For [[a, b], [c, d]] the balanced (1,1) entry is sqrt(ad)/(sqrt(ad)+sqrt(bc)).
        let (a, b, c, d) = (1.0f64, 2.0, 3.0, 4.0);
        let m = Mat::from_rows(vec![vec![a, b], vec![c, d]]).unwrap();
        let out = sinkhorn_project(&m, 1e-14, 10_000).unwrap();
        let x = (a * d).sqrt() / ((a * d).sqrt() + (b * c).sqrt());
        assert!((out.get(0, 0) - x).abs() < 1e-13);
        assert!((out.get(0, 1) - (1.0 - x)).abs() < 1e-13);
    }

    #[test]
    fn sinkhorn_errors() {
        let m = Mat::from_rows(vec![vec![0.0, 0.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            sinkhorn_project(&m, 1e-12, 100),
            Err(Error::ZeroLine { axis: "row", index: 0 })
        ));
        let m = Mat::from_rows(vec![vec![1.0, 1e-8], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            sinkhorn_project(&m, 1e-15, 1),
            Err(Error::NonConvergence { iters: 1, .. })
        ));
    }

    #[test]
    fn birkhoff_examples() {
        let p = random_birkhoff(4, 1, 7).unwrap();
        assert!(p.entries().iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(is_doubly_stochastic(&p, &0.0));

        let perms: Vec<Vec<usize>> = (0..4).permutations(4).collect();
        let avg = birkhoff_combination(&vec![1.0 / 24.0; 24], &perms);
        assert!(avg.max_abs_diff(&Mat::uniform(4)) < 1e-15);

        let m = random_birkhoff(6, 8, 42).unwrap();
        assert!(is_doubly_stochastic(&m, &1e-12));
        assert!(random_birkhoff(3, 0, 1).is_err());
    }

    #[test]
    fn kn_sampler_contract() {
        let a = random_kn(4, 99);
        assert!(is_in_kn(&a, &1e-12));
        assert_eq!(a, random_kn(4, 99));
        assert!(!is_in_kn(&a.scaled(&2.0), &1e-12));
    }

    #[test]
    fn averaging_examples() {
        let i2 = Mat::<Rational>::identity(2);
        let avg = average_lines(&i2, Axis::Row, 0, 1).unwrap();
        assert_eq!(avg, Mat::constant(2, rat(1, 2)));
        let m = q(&[
            &[(1, 1), (0, 1), (0, 1)],
            &[(1, 3), (1, 3), (1, 3)],
            &[(1, 3), (1, 3), (1, 3)],
        ]);
        assert_eq!(average_lines(&m, Axis::Row, 1, 2).unwrap(), m);
        assert!(average_lines(&m, Axis::Col, 1, 1).is_err());
    }

    #[test]
    fn fully_indecomposable_examples() {
        assert!(is_fully_indecomposable(&Mat::<Rational>::uniform(4)));
        assert!(!is_fully_indecomposable(&Mat::<Rational>::identity(4)));
        let mut a3 = Mat::<Rational>::constant(4, rat(1, 5));
        for j in 1..4 {
            a3.set(0, j, rat(0, 1));
        }
        assert!(!is_fully_indecomposable(&a3));
    }

    #[test]
    fn text_format_round_trip() {
        let text = "3\n1/2 1/2 0\n0.25 0.25 1/2\n1/4 1/4 0.5\n";
        let m = parse_matrix_text(text).unwrap();
        assert_eq!(*m.get(1, 0), rat(1, 4));
        assert_eq!(parse_matrix_text(&m.to_string()).unwrap(), m);
        assert!(matches!(
            parse_matrix_text("2\n1 2\n3\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_matrix_text("2\n1 -2\n3 4\n").is_err());
    }

    #[test]
    fn structured_record_round_trip() {
        let m = parse_matrix_text("2\n1/3 2/3\n2/3 1/3\n").unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"1/3\""));
        assert!(json.contains("exact_rational"));
        let rec: MatRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(rec.to_exact().unwrap(), m);

        let f = Mat::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let rec = MatRecord::from(&f);
        assert_eq!(rec.scalar_mode, ScalarMode::Float64);
        assert_eq!(rec.to_exact().unwrap().to_f64(), f);
    }

    #[test]
    fn subset_index_validation() {
        assert!(SubsetIndex::new(vec![0, 2], 3).is_ok());
        assert!(SubsetIndex::new(vec![2, 0], 3).is_err());
        assert!(SubsetIndex::new(vec![0, 3], 3).is_err());
        let s = SubsetIndex::new(vec![1], 3).unwrap();
        assert_eq!(s.complement(3).members(), &[0, 2]);
        assert_eq!(SubsetIndex::all(2, 4).count(), 6);
    }
}
