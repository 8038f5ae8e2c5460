//! Dittert's function φ on `K_n`, its minor analogues φ_ij, the necessary
//! conditions for a φ-maximizer, and the perturbation matrices used to show
//! that order-4 maximizers are fully indecomposable.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use rand::Rng;

use crate::matcore::{is_fully_indecomposable, random_kn, require_kn, seeded_rng, sum_vectors, Mat};
use crate::perm::per_ryser;
use crate::scalar::{rat, Rational, Scalar};

fn product<S: Scalar>(v: impl IntoIterator<Item = S>) -> S {
    v.into_iter().fold(S::one(), |acc, x| acc * x)
}

/// φ without the `K_n` check.
pub fn phi_unchecked<S: Scalar>(x: &Mat<S>) -> S {
    let sv = sum_vectors(x);
    product(sv.rows) + product(sv.cols) - per_ryser(x)
}

/// φ_ij without the `K_n` check. Indices are 0-based.
pub fn phi_ij_unchecked<S: Scalar>(x: &Mat<S>, i: usize, j: usize) -> S {
    let sv = sum_vectors(x);
    let rows = sv.rows.into_iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| v);
    let cols = sv.cols.into_iter().enumerate().filter(|&(l, _)| l != j).map(|(_, v)| v);
    product(rows) + product(cols) - per_ryser(&x.minor(i, j))
}

/// `φ(X) = Π r_i + Π c_j - per X` on `K_n`.
pub fn phi<S: Scalar>(x: &Mat<S>) -> Result<S> {
    require_kn(x, "phi")?;
    Ok(phi_unchecked(x))
}

/// `φ_ij(X) = Π_{k≠i} r_k + Π_{l≠j} c_l - per X(i|j)` on `K_n`.
pub fn phi_ij<S: Scalar>(x: &Mat<S>, i: usize, j: usize) -> Result<S> {
    require_kn(x, "phi_ij")?;
    let n = x.order();
    if i >= n || j >= n {
        return Err(Error::invalid(format!("index ({i}, {j}) out of range for order {n}")));
    }
    Ok(phi_ij_unchecked(x, i, j))
}

/// `φ(J_n) - φ(X)`; nonnegative if J_n maximizes φ.
pub fn phi_vs_jn<S: Scalar>(x: &Mat<S>) -> Result<S> {
    let v = phi(x)?;
    Ok(phi_unchecked(&Mat::<S>::uniform(x.order())) - v)
}

/// Outcome of the maximizer-condition test.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiReport<S> {
    pub phi: S,
    pub phi_ij: Vec<Vec<S>>,
    /// True iff φ_ij agrees with φ on the support and does not exceed it off
    /// the support. Necessary for a maximizer, not sufficient.
    pub support_consistent: bool,
    /// Pairs of positive entries whose φ_ij values differ by more than the
    /// tolerance, each pair in lexicographic order (0-based).
    pub violating_pairs: Vec<((usize, usize), (usize, usize))>,
    /// Single entries breaking the comparison with φ itself.
    pub off_phi: Vec<(usize, usize)>,
}

impl<S: Scalar> Serialize for PhiReport<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeStruct;
        let grid: Vec<Vec<serde_json::Value>> = self
            .phi_ij
            .iter()
            .map(|row| row.iter().map(Scalar::to_json).collect())
            .collect();
        let mut st = s.serialize_struct("PhiReport", 5)?;
        st.serialize_field("phi", &self.phi.to_json())?;
        st.serialize_field("phi_ij", &grid)?;
        st.serialize_field("support_consistent", &self.support_consistent)?;
        st.serialize_field("violating_pairs", &self.violating_pairs)?;
        st.serialize_field("off_phi", &self.off_phi)?;
        st.end()
    }
}

/// Checks the necessary conditions on a φ-maximizer: φ_ij constant and equal
/// to φ over positive entries, and at most φ over zero entries.
pub fn maximizer_conditions<S: Scalar>(x: &Mat<S>, tol: &S) -> PhiReport<S> {
    let n = x.order();
    let phi = phi_unchecked(x);
    let grid: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| phi_ij_unchecked(x, i, j)).collect())
        .collect();
    let thr = S::support_threshold();
    let support: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| *x.get(i, j) > thr)
        .collect();
    let mut violating_pairs = Vec::new();
    for (k, &(i, j)) in support.iter().enumerate() {
        for &(p, q) in &support[k + 1..] {
            if (grid[i][j].clone() - grid[p][q].clone()).abs() > *tol {
                violating_pairs.push(((i, j), (p, q)));
            }
        }
    }
    let mut off_phi = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let d = grid[i][j].clone() - phi.clone();
            let bad = if *x.get(i, j) > thr { d.abs() > *tol } else { d > *tol };
            if bad {
                off_phi.push((i, j));
            }
        }
    }
    PhiReport {
        support_consistent: violating_pairs.is_empty() && off_phi.is_empty(),
        phi,
        phi_ij: grid,
        violating_pairs,
        off_phi,
    }
}

/// Named parameters of the perturbation family. Each matrix uses a subset.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbParams<S> {
    pub a: S,
    pub b: S,
    pub x: S,
    pub y: S,
    pub z: S,
    pub t: S,
    pub l: S,
    pub m: S,
    pub v: S,
    pub p: S,
    pub q: S,
    pub r: S,
    pub s: S,
    pub epsilon: S,
}

impl<S: Scalar> PerturbParams<S> {
    /// Every parameter set to `value`, epsilon to `epsilon`.
    pub fn constant(value: S, epsilon: S) -> Self {
        let v = || value.clone();
        PerturbParams {
            a: v(),
            b: v(),
            x: v(),
            y: v(),
            z: v(),
            t: v(),
            l: v(),
            m: v(),
            v: v(),
            p: v(),
            q: v(),
            r: v(),
            s: v(),
            epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Perturbation {
    A1,
    A2,
    A3,
    /// Needs `x >= y`.
    A4,
    /// Needs `x <= y`.
    A5,
    /// Column average of A5's last two columns; needs `x <= y`.
    A6,
    /// The positive-block form before averaging rows 3 and 4.
    ABlock,
    ATilde,
    ATildeEps,
    /// The block-triangular form perturbed by [`Perturbation::AHat`].
    ATriangular,
    AHat,
}

impl Perturbation {
    pub const ALL: [Perturbation; 11] = [
        Perturbation::A1,
        Perturbation::A2,
        Perturbation::A3,
        Perturbation::A4,
        Perturbation::A5,
        Perturbation::A6,
        Perturbation::ABlock,
        Perturbation::ATilde,
        Perturbation::ATildeEps,
        Perturbation::ATriangular,
        Perturbation::AHat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Perturbation::A1 => "A1",
            Perturbation::A2 => "A2",
            Perturbation::A3 => "A3",
            Perturbation::A4 => "A4",
            Perturbation::A5 => "A5",
            Perturbation::A6 => "A6",
            Perturbation::ABlock => "Ablock",
            Perturbation::ATilde => "Atilde",
            Perturbation::ATildeEps => "Atilde_eps",
            Perturbation::ATriangular => "Atriangular",
            Perturbation::AHat => "Ahat",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name().eq_ignore_ascii_case(name))
    }

    /// Names of the parameters the matrix depends on.
    pub fn uses(self) -> &'static [&'static str] {
        match self {
            Perturbation::A1 => &["a", "x", "y", "z", "t", "p", "q", "r", "s"],
            Perturbation::A2 => &["a", "x", "y", "p", "q"],
            Perturbation::A3 | Perturbation::A4 | Perturbation::A5 | Perturbation::A6 => &["a", "x", "y"],
            Perturbation::ABlock => &["a", "b", "x", "y", "z"],
            Perturbation::ATilde => &["a", "b", "x", "y"],
            Perturbation::ATildeEps => &["a", "b", "x", "y", "epsilon"],
            Perturbation::ATriangular => &["a", "b", "x", "y", "z", "l", "m", "v"],
            Perturbation::AHat => &["a", "b", "x", "y", "z", "l", "m", "v", "epsilon"],
        }
    }
}

impl<S: Scalar> PerturbParams<S> {
    fn get(&self, name: &str) -> &S {
        match name {
            "a" => &self.a,
            "b" => &self.b,
            "x" => &self.x,
            "y" => &self.y,
            "z" => &self.z,
            "t" => &self.t,
            "l" => &self.l,
            "m" => &self.m,
            "v" => &self.v,
            "p" => &self.p,
            "q" => &self.q,
            "r" => &self.r,
            "s" => &self.s,
            "epsilon" => &self.epsilon,
            _ => unreachable!("unknown parameter {name}"),
        }
    }
}

/// The displayed matrix for `kind`. Parameters it uses must be positive and
/// every resulting entry nonnegative.
pub fn build_perturbation<S: Scalar>(kind: Perturbation, p: &PerturbParams<S>) -> Result<Mat<S>> {
    for name in kind.uses() {
        if !p.get(name).is_positive() {
            return Err(Error::domain(format!(
                "{} needs {name} > 0, got {}",
                kind.name(),
                p.get(name)
            )));
        }
    }
    let m = build_unchecked(kind, p);
    if !m.is_nonnegative() {
        return Err(Error::domain(format!(
            "{} has a negative entry for these parameters",
            kind.name()
        )));
    }
    Ok(m)
}

fn build_unchecked<S: Scalar>(kind: Perturbation, p: &PerturbParams<S>) -> Mat<S> {
    let (a, b, x, y, z) = (p.a.clone(), p.b.clone(), p.x.clone(), p.y.clone(), p.z.clone());
    let e = p.epsilon.clone();
    let o = S::zero;
    let half_x = x.clone() / S::from_int(2);
    let two = S::from_int(2);
    let rows: [[S; 4]; 4] = match kind {
        Perturbation::A1 => [
            [a, o(), o(), o()],
            [x.clone(), y.clone(), z.clone(), p.t.clone()],
            [x, y, z, p.t.clone()],
            [p.p.clone(), p.q.clone(), p.r.clone(), p.s.clone()],
        ],
        Perturbation::A2 => [
            [a, o(), o(), o()],
            [x.clone(), y.clone(), y.clone(), y.clone()],
            [x, y.clone(), y.clone(), y],
            [p.p.clone(), p.q.clone(), p.q.clone(), p.q.clone()],
        ],
        Perturbation::A3 => [
            [a, o(), o(), o()],
            [x.clone(), y.clone(), y.clone(), y.clone()],
            [x.clone(), y.clone(), y.clone(), y.clone()],
            [x, y.clone(), y.clone(), y],
        ],
        Perturbation::A4 => [
            [a, o(), o(), o()],
            [x.clone(), y.clone(), y.clone(), y.clone()],
            [x.clone() + y.clone(), o(), y.clone(), y.clone()],
            [x - y.clone(), two * y.clone(), y.clone(), y],
        ],
        Perturbation::A5 => [
            [a, o(), o(), o()],
            [x.clone(), y.clone(), y.clone(), y.clone()],
            [two * x.clone(), y.clone(), y.clone(), y.clone() - x.clone()],
            [o(), y.clone(), y.clone(), y + x],
        ],
        Perturbation::A6 => [
            [a, o(), o(), o()],
            [x.clone(), y.clone(), y.clone(), y.clone()],
            [two * x, y.clone(), y.clone() - half_x.clone(), y.clone() - half_x.clone()],
            [o(), y.clone(), y.clone() + half_x.clone(), y + half_x],
        ],
        Perturbation::ABlock => [
            [a, o(), o(), o()],
            [b, x.clone(), x.clone(), x],
            [o(), y.clone(), y.clone(), y],
            [o(), z.clone(), z.clone(), z],
        ],
        Perturbation::ATilde => [
            [a, o(), o(), o()],
            [b, x.clone(), x.clone(), x],
            [o(), y.clone(), y.clone(), y.clone()],
            [o(), y.clone(), y.clone(), y],
        ],
        Perturbation::ATildeEps => [
            [a - e.clone(), e.clone(), o(), o()],
            [b + e.clone(), x.clone() - e, x.clone(), x],
            [o(), y.clone(), y.clone(), y.clone()],
            [o(), y.clone(), y.clone(), y],
        ],
        Perturbation::ATriangular => [
            [a, o(), o(), o()],
            [b, x, p.l.clone(), p.m.clone()],
            [o(), o(), y, p.v.clone()],
            [o(), o(), o(), z],
        ],
        Perturbation::AHat => [
            [a, o(), o(), o()],
            [b - e.clone(), x, p.l.clone(), p.m.clone() + e.clone()],
            [o(), o(), y, p.v.clone()],
            [e.clone(), o(), o(), z - e],
        ],
    };
    Mat::signed(4, rows.into_iter().flatten().collect()).expect("4x4 by construction")
}

/// Rescales a nonnegative matrix so that its entry sum is `n`.
pub fn normalize_to_kn<S: Scalar>(x: &Mat<S>) -> Result<Mat<S>> {
    if !x.is_nonnegative() {
        return Err(Error::domain("cannot normalize a matrix with negative entries"));
    }
    let total = x.entry_sum();
    if total.is_zero() {
        return Err(Error::domain("cannot normalize the zero matrix"));
    }
    Ok(x.scaled(&(S::from_usize(x.order()) / total)))
}

/// Random positive rational parameters with denominators up to 12, on the
/// `x >= y` side when `x_ge_y` holds and the `x < y` side otherwise.
/// Epsilon is a fraction of `min(a, b, x, z)`, small enough to keep every
/// matrix of the family nonnegative.
pub fn random_perturb_params(seed: u64, x_ge_y: bool) -> PerturbParams<Rational> {
    let mut rng = seeded_rng(seed);
    let mut draw = || rat(rng.random_range(1..=24), rng.random_range(1..=12));
    let mut p = PerturbParams::constant(rat(1, 1), rat(1, 1));
    for slot in [
        &mut p.a, &mut p.b, &mut p.x, &mut p.y, &mut p.z, &mut p.t, &mut p.l,
        &mut p.m, &mut p.v, &mut p.p, &mut p.q, &mut p.r, &mut p.s,
    ] {
        *slot = draw();
    }
    if (p.x < p.y) == x_ge_y {
        std::mem::swap(&mut p.x, &mut p.y);
    }
    if !x_ge_y && p.x == p.y {
        p.y = p.y.clone() * rat(3, 2);
    }
    let floor = [&p.a, &p.b, &p.x, &p.z]
        .into_iter()
        .cloned()
        .fold(p.a.clone(), |m, v| if v < m { v } else { m });
    p.epsilon = floor / rat(rng.random_range(4..=40), 1);
    p
}

/// One checked identity or strict inequality of the perturbation family.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck<S> {
    pub name: &'static str,
    /// Zero for identities; the (positive) margin for strict inequalities;
    /// for the slope check, the largest excess over the first-order bound.
    pub residual: S,
    pub holds: bool,
}

impl<S: Scalar> Serialize for IdentityCheck<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IdentityCheck", 3)?;
        st.serialize_field("name", self.name)?;
        st.serialize_field("residual", &self.residual.to_json())?;
        st.serialize_field("holds", &self.holds)?;
        st.end()
    }
}

fn equality<S: Scalar>(name: &'static str, residual: S, tol: &S) -> IdentityCheck<S> {
    let holds = residual.abs() <= *tol;
    IdentityCheck { name, residual, holds }
}

fn strict<S: Scalar>(name: &'static str, margin: S) -> IdentityCheck<S> {
    let holds = margin.is_positive();
    IdentityCheck { name, residual: margin, holds }
}

/// Slope of `ε ↦ per Ã_ε` at zero for arbitrary parameters.
pub fn atilde_eps_general_slope<S: Scalar>(p: &PerturbParams<S>) -> S {
    S::from_int(2) * p.y.clone() * p.y.clone() * (p.b.clone() - p.a.clone() - S::from_int(3) * p.x.clone())
}

/// Evaluates every identity whose case condition the parameters meet.
///
/// The A4 identities need `x >= y`; the A5/A6 ones need `x <= y`. The slope
/// check replaces `a` by `b + 7x/3` and needs `epsilon <= x`.
pub fn perturbation_identities<S: Scalar>(p: &PerturbParams<S>) -> Result<Vec<IdentityCheck<S>>> {
    let tol = S::domain_tol();
    let build = |k| build_perturbation(k, p);
    let mut out = Vec::new();
    let a3 = build(Perturbation::A3)?;
    let per_a3 = per_ryser(&a3);
    let (a, x, y) = (p.a.clone(), p.x.clone(), p.y.clone());
    let y2 = y.clone() * y.clone();

    if x >= y {
        let a4 = build(Perturbation::A4)?;
        out.push(equality("per A4 - per A3", per_ryser(&a4) - per_a3.clone(), &tol));
        let d = phi_ij_unchecked(&a4, 3, 1) - phi_ij_unchecked(&a4, 2, 2) - a.clone() * y2.clone();
        out.push(equality("phi_42(A4) - phi_33(A4) - a y^2", d, &tol));
    }
    if x <= y {
        let a5 = build(Perturbation::A5)?;
        let a6 = build(Perturbation::A6)?;
        let per_a5 = per_ryser(&a5);
        let per_a6 = per_ryser(&a6);
        let six_a_y3 = S::from_int(6) * a.clone() * y2.clone() * y.clone();
        out.push(equality("per A5 - per A3", per_a5.clone() - per_a3.clone(), &tol));
        out.push(equality("per A5 - 6 a y^3", per_a5.clone() - six_a_y3.clone(), &tol));
        let closed = a.clone() * (six_a_y3 / a.clone() - x.clone() * x.clone() * y.clone() / S::from_int(2));
        out.push(equality("per A6 - a(6y^3 - x^2 y/2)", per_a6.clone() - closed, &tol));
        out.push(strict("per A5 - per A6 > 0", per_a5 - per_a6));
    }

    let at = build(Perturbation::ATilde)?;
    let three = S::from_int(3);
    let d = phi_ij_unchecked(&at, 0, 0)
        - phi_ij_unchecked(&at, 1, 0)
        - three.clone() * y2.clone() * (three.clone() * p.b.clone() - three * a + S::from_int(7) * x.clone());
    out.push(equality("phi_11(Atilde) - phi_21(Atilde) - 3y^2(3b-3a+7x)", d, &tol));

    let tri = build(Perturbation::ATriangular)?;
    let hat = build(Perturbation::AHat)?;
    let per_hat = per_ryser(&hat);
    let closed = p.a.clone() * x.clone() * y.clone() * (p.z.clone() - p.epsilon.clone());
    out.push(equality("per Ahat - a x y (z - eps)", per_hat.clone() - closed, &tol));
    out.push(strict("per Atriangular - per Ahat > 0", per_ryser(&tri) - per_hat));

    out.push(atilde_slope_check(p)?);
    Ok(out)
}

/// Two-step finite-difference check of `d/dε per Ã_ε = -(32/3)·x·y²` under
/// `3a = 3b + 7x`. With `d_k` the difference quotient at `ε_k` and `C` the
/// curvature estimated from the two quotients, the check requires
/// `|d_k - slope| <= 2·C·ε_k` for `ε_1 = ε` and `ε_2 = ε/2`.
pub fn atilde_slope_check<S: Scalar>(p: &PerturbParams<S>) -> Result<IdentityCheck<S>> {
    let mut q = p.clone();
    q.a = p.b.clone() + S::from_int(7) * p.x.clone() / S::from_int(3);
    let per0 = per_ryser(&build_perturbation(Perturbation::ATilde, &q)?);
    let slope = S::from_ratio(-32, 3) * q.x.clone() * q.y.clone() * q.y.clone();
    let e1 = p.epsilon.clone();
    let e2 = e1.clone() / S::from_int(2);
    let mut quotients = Vec::with_capacity(2);
    for e in [&e1, &e2] {
        q.epsilon = e.clone();
        let pe = per_ryser(&build_perturbation(Perturbation::ATildeEps, &q)?);
        quotients.push((pe - per0.clone()) / e.clone());
    }
    let c = (quotients[0].clone() - quotients[1].clone()).abs() / (e1.clone() - e2.clone());
    let two = S::from_int(2);
    let excess = |d: &S, e: &S| (d.clone() - slope.clone()).abs() - two.clone() * c.clone() * e.clone();
    let x1 = excess(&quotients[0], &e1);
    let x2 = excess(&quotients[1], &e2);
    let worst = if x1 > x2 { x1 } else { x2 };
    let holds = worst <= S::domain_tol();
    Ok(IdentityCheck {
        name: "Atilde_eps slope + (32/3) x y^2 (first order)",
        residual: worst,
        holds,
    })
}

/// One row of the `K_n` sampling experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnSample {
    pub seed: u64,
    pub diff: f64,
    pub min_entry: f64,
    pub fully_indecomposable: bool,
}

impl KnSample {
    pub const CSV_HEADER: &'static str = "seed,phi_jn_minus_phi,min_entry,fully_indecomposable";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.17e},{:.17e},{}",
            self.seed, self.diff, self.min_entry, self.fully_indecomposable
        )
    }
}

/// Aggregate of a sampling run; identical for any thread count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnSummary {
    pub n: usize,
    pub samples: usize,
    pub min_diff: f64,
    pub argmin_seed: u64,
    pub below_tolerance: usize,
}

/// `φ(J_n) - φ(X)` over `samples` uniform `K_n` draws with seeds
/// `base_seed, base_seed + 1, …`. Rows come back in seed order.
pub fn sample_phi_vs_jn(n: usize, samples: usize, base_seed: u64) -> Vec<KnSample> {
    let phi_j = phi_unchecked(&Mat::<f64>::uniform(n));
    (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            let x = random_kn(n, seed);
            KnSample {
                seed,
                diff: phi_j - phi_unchecked(&x),
                min_entry: x.min_entry().unwrap_or(0.0),
                fully_indecomposable: n <= crate::matcore::MAX_EXHAUSTIVE_ORDER && is_fully_indecomposable(&x),
            }
        })
        .collect()
}

pub fn summarize_samples(n: usize, rows: &[KnSample], tol: f64) -> KnSummary {
    let (min_diff, argmin_seed) = rows
        .iter()
        .fold((f64::INFINITY, 0), |(best, seed), r| {
            if r.diff < best {
                (r.diff, r.seed)
            } else {
                (best, seed)
            }
        });
    KnSummary {
        n,
        samples: rows.len(),
        min_diff,
        argmin_seed,
        below_tolerance: rows.iter().filter(|r| r.diff < -tol).count(),
    }
}
