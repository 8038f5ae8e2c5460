//! Gap functions for the convex-combination permanent inequality
//! `per(tJ_n + (1-t)A) <= t·per J_n + (1-t)·per A` on Ω_4 and Ω_6, the
//! printed and corrected order-4 quartics, the order-6 factorization and
//! bound chain, and the root tests used as hypotheses.

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matcore::{require_doubly_stochastic, Mat};
use crate::perm::{per_ryser, sigma_k};
use crate::poly::{count_roots, sturm_sequence, Poly};
use crate::scalar::{binomial, factorial, Rational, Scalar};
use crate::symf::{elem_sym, t_family};

/// Lower end of the `t` range on which the order-6 chain is asserted.
pub const CHAIN_T_MIN: (i64, i64) = (7836, 10000);

/// Default half-width of root witness intervals.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    Direct,
    QuarticPaper,
    QuarticCorrected,
    FFactored,
}

/// One evaluation of the gap `t·per J_n + (1-t)·per A - per(tJ_n + (1-t)A)`.
/// The quartic methods report their polynomial divided by 32 so that all
/// methods are on the same scale.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport<S> {
    pub n: usize,
    pub parameter: S,
    pub gap: S,
    pub witness: Mat<S>,
    pub method: GapMethod,
}

impl<S: Scalar> Serialize for GapReport<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        #[serde(bound = "")]
        struct Record<'a, S: Scalar> {
            n: usize,
            parameter: serde_json::Value,
            gap: serde_json::Value,
            witness: &'a Mat<S>,
            method: GapMethod,
        }
        Record {
            n: self.n,
            parameter: self.parameter.to_json(),
            gap: self.gap.to_json(),
            witness: &self.witness,
            method: self.method,
        }
        .serialize(s)
    }
}

fn require_unit_interval<S: Scalar>(t: &S) -> Result<()> {
    if t.is_negative() || *t > S::one() {
        return Err(Error::domain(format!("parameter {t} outside [0, 1]")));
    }
    Ok(())
}

fn require_order<S: Scalar>(a: &Mat<S>, n: usize, what: &str) -> Result<()> {
    if a.order() != n {
        return Err(Error::domain(format!(
            "{what} is defined for order {n}, got {}",
            a.order()
        )));
    }
    require_doubly_stochastic(a, what)
}

/// `per J_n = n!/n^n`.
pub fn per_uniform<S: Scalar>(n: usize) -> S {
    factorial::<S>(n) / S::from_usize(n).powu(n as u32)
}

fn gap_unchecked<S: Scalar>(a: &Mat<S>, per_a: &S, t: &S) -> S {
    let n = a.order();
    t.clone() * per_uniform::<S>(n) + (S::one() - t.clone()) * per_a.clone()
        - per_ryser(&a.convex_with_uniform(t))
}

pub fn gap_direct<S: Scalar>(a: &Mat<S>, t: &S) -> Result<S> {
    require_doubly_stochastic(a, "gap_direct")?;
    require_unit_interval(t)?;
    Ok(gap_unchecked(a, &per_ryser(a), t))
}

/// Column statistics entering the order-4 quartic: `Σ_i e_r(a_i)` over the
/// columns for r = 2, 3, 4 and `Σ_{T_2} e_4`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticFeatures<S> {
    pub e2: S,
    pub e3: S,
    pub e4: S,
    pub t2_e4: S,
}

pub fn quartic_features<S: Scalar>(a: &Mat<S>) -> Result<QuarticFeatures<S>> {
    require_order(a, 4, "quartic_features")?;
    let cols = t_family(a, 1)?;
    Ok(QuarticFeatures {
        e2: cols.sum_elem_sym(2),
        e3: cols.sum_elem_sym(3),
        e4: cols.sum_elem_sym(4),
        t2_e4: t_family(a, 2)?.sum_elem_sym(4),
    })
}

/// The printed quartic in α, coefficient for coefficient.
pub fn quartic_paper<S: Scalar>(a: &Mat<S>) -> Result<Poly<S>> {
    let f = quartic_features(a)?;
    Ok(quartic_paper_from_features(&f))
}

/// Same polynomial from precomputed features (used by the searches).
pub fn quartic_paper_from_features<S: Scalar>(f: &QuarticFeatures<S>) -> Poly<S> {
    let lin = |c: i64, c2: i64, c3: i64, c4: i64, ct: i64| {
        S::from_int(c)
            + S::from_int(c2) * f.e2.clone()
            + S::from_int(c3) * f.e3.clone()
            + S::from_int(c4) * f.e4.clone()
            + S::from_int(ct) * f.t2_e4.clone()
    };
    Poly::new(vec![
        S::from_ratio(128, 3),
        lin(67, -80, 80, -192, 96),
        lin(-120, 148, -144, 384, -192),
        lin(68, -88, 80, -256, 128),
        lin(-15, 24, -16, 64, -32),
    ])
}

/// Nodes for the corrected quartic: `k/7`, k = 1..5.
pub fn interpolation_nodes<S: Scalar>() -> Vec<S> {
    (1..=5).map(|k| S::from_ratio(k, 7)).collect()
}

/// `32·gap(A, α)` as a polynomial in α, recovered by interpolation.
pub fn quartic_corrected<S: Scalar>(a: &Mat<S>) -> Result<Poly<S>> {
    require_order(a, 4, "quartic_corrected")?;
    let per_a = per_ryser(a);
    let nodes = interpolation_nodes::<S>();
    let values: Vec<S> = nodes
        .iter()
        .map(|x| S::from_int(32) * gap_unchecked(a, &per_a, x))
        .collect();
    Poly::interpolate(&nodes, &values)
}

/// `F_A(t)` with `gap(A, t) = t(1-t)·F_A(t)` on Ω_6.
pub fn f6_poly<S: Scalar>(a: &Mat<S>) -> Result<Poly<S>> {
    require_order(a, 6, "f6_poly")?;
    let parts = F6Parts::new(a)?;
    Ok(parts.poly())
}

/// The coefficient polynomials of `F_A` in front of per A and σ_5..σ_2,
/// together with those quantities for a given matrix.
struct F6Parts<S> {
    per: S,
    sigma: [S; 6],
    p_per: Poly<S>,
    p: [Poly<S>; 6],
    p0: Poly<S>,
}

impl<S: Scalar> F6Parts<S> {
    fn new(a: &Mat<S>) -> Result<Self> {
        let t = Poly::<S>::t();
        let u = Poly::<S>::one_minus_t();
        let c = |p: i64, q: i64| Poly::constant(S::from_ratio(p, q));
        let mut sigma: [S; 6] = std::array::from_fn(|_| S::zero());
        for (k, s) in sigma.iter_mut().enumerate().skip(2) {
            *s = sigma_k(a, k)?;
        }
        Ok(F6Parts {
            per: per_ryser(a),
            sigma,
            p_per: Poly::from_ratios(&[(5, 1), (-10, 1), (10, 1), (-5, 1), (1, 1)]),
            p: [
                Poly::zero(),
                Poly::zero(),
                &(&c(-1, 54) * &t.pow(3)) * &u,
                &(&c(-1, 36) * &t.pow(2)) * &u.pow(2),
                &(&c(-1, 18) * &t) * &u.pow(3),
                &c(-1, 6) * &u.pow(4),
            ],
            p0: &c(5, 324) * &Poly::from_ratios(&[(1, 1), (1, 1), (1, 1), (1, 1), (-5, 1)]),
        })
    }

    fn poly(&self) -> Poly<S> {
        let mut acc = &self.p0 + &self.p_per.scale(&self.per);
        for k in 2..=5 {
            acc = &acc + &self.p[k].scale(&self.sigma[k]);
        }
        acc
    }
}

fn sum_powers<S: Scalar>(a: &Mat<S>, p: u32) -> S {
    a.entries().iter().fold(S::zero(), |acc, v| acc + v.powu(p))
}

/// `σ_2(A) = ½Σa_ij² + ½n(n-2)` on Ω_n.
pub fn sigma2_closed<S: Scalar>(a: &Mat<S>) -> Result<S> {
    require_doubly_stochastic(a, "sigma2_closed")?;
    let n = S::from_usize(a.order());
    let half = S::from_ratio(1, 2);
    Ok(half.clone() * sum_powers(a, 2) + half * n.clone() * (n - S::from_int(2)))
}

/// `σ_3(A) = ⅔Σa_ij³ + ½(n-4)Σa_ij² + n(n²-6n+10)/6` on Ω_n.
pub fn sigma3_closed<S: Scalar>(a: &Mat<S>) -> Result<S> {
    require_doubly_stochastic(a, "sigma3_closed")?;
    let n = S::from_usize(a.order());
    Ok(S::from_ratio(2, 3) * sum_powers(a, 3)
        + S::from_ratio(1, 2) * (n.clone() - S::from_int(4)) * sum_powers(a, 2)
        + n.clone() * (n.clone() * n.clone() - S::from_int(6) * n + S::from_int(10))
            / S::from_int(6))
}

/// `Σ_{r=2}^{k} r·(k-r)!/n^{k-r}·C(n-r, k-r)²·σ_r(A - J_n)·t^{r-2}`.
pub fn hypothesis_poly<S: Scalar>(a: &Mat<S>, k: usize) -> Result<Poly<S>> {
    let n = a.order();
    if k < 2 || k > n {
        return Err(Error::invalid(format!(
            "hypothesis polynomial needs 2 <= k <= n, got k={k}, n={n}"
        )));
    }
    let d = a.sub_signed(&Mat::uniform(n));
    let nn = S::from_usize(n);
    let mut coeffs = Vec::with_capacity(k - 1);
    for r in 2..=k {
        let b = binomial::<S>(n - r, k - r);
        let w = S::from_usize(r) * factorial::<S>(k - r) / nn.powu((k - r) as u32) * b.clone() * b;
        coeffs.push(w * sigma_k(&d, r)?);
    }
    Ok(Poly::new(coeffs))
}

/// Decides whether `p` has a real root in the open interval (0, 1).
///
/// Coefficients are lifted exactly to rationals, so float and exact inputs
/// go through the same Sturm-sequence bisection. Returns a witness interval
/// `(m - tol, m + tol)` containing a root, or `None`. The zero polynomial
/// has no roots by convention.
pub fn roots_in_open_unit<S: Scalar>(p: &Poly<S>, tol: f64) -> Option<(f64, f64)> {
    let tol = if tol > 0.0 && tol.is_finite() { tol } else { ROOT_TOL };
    let mut q = p.to_exact();
    if q.is_zero() {
        return None;
    }
    let zero = Rational::from_int(0);
    let one = Rational::from_int(1);
    let t = Poly::<Rational>::t();
    let t_minus_one = Poly::<Rational>::from_ratios(&[(-1, 1), (1, 1)]);
    while q.degree() > Some(0) && q.eval(&zero).is_zero() {
        q = q.div_rem(&t).0;
    }
    while q.degree() > Some(0) && q.eval(&one).is_zero() {
        q = q.div_rem(&t_minus_one).0;
    }
    if q.degree() == Some(0) {
        return None;
    }
    let seq = sturm_sequence(&q);
    if count_roots(&seq, &zero, &one) == 0 {
        return None;
    }
    let width = Rational::from_f64(2.0 * tol);
    let (mut lo, mut hi) = (zero, one);
    let two = Rational::from_int(2);
    while hi.clone() - lo.clone() > width {
        let mid = (lo.clone() + hi.clone()) / two.clone();
        if q.eval(&mid).is_zero() {
            let m = mid.to_f64();
            return Some((m - tol, m + tol));
        }
        if count_roots(&seq, &lo, &mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let m = ((lo + hi) / two).to_f64();
    Some((m - tol, m + tol))
}

/// `106t³ - 418t² + 465t - 153`, whose root in (0, 1) is the `t_2` constant.
pub fn foregger_cubic() -> Poly<Rational> {
    Poly::from_ratios(&[(-153, 1), (465, 1), (-418, 1), (106, 1)])
}

/// One labelled lower bound in the order-6 chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep<S> {
    pub label: &'static str,
    pub value: S,
}

impl<S: Scalar> Serialize for ChainStep<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ChainStep", 2)?;
        st.serialize_field("label", self.label)?;
        st.serialize_field("value", &self.value.to_json())?;
        st.end()
    }
}

/// Successive lower bounds for `F_A(t)`; `steps[0]` is `F_A(t)` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundChain<S> {
    pub t: S,
    pub steps: Vec<ChainStep<S>>,
    /// Coefficient of `Σa_ij³` once σ_3 is written in closed form; the cube
    /// step needs it nonnegative.
    pub cube_coefficient: S,
    /// Derivative at `x = 1/6` of the per-row quadratic in `x = Σ_j a_ij²`.
    pub slope_at_row_bound: S,
}

impl<S: Scalar> BoundChain<S> {
    pub fn values(&self) -> Vec<S> {
        self.steps.iter().map(|s| s.value.clone()).collect()
    }

    /// Each step at most the previous one, up to `slack`.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.steps
            .windows(2)
            .all(|w| w[1].value.to_f64() <= w[0].value.to_f64() + slack)
    }

    pub fn terminal(&self) -> &S {
        &self.steps.last().expect("chain is never empty").value
    }
}

impl<S: Scalar> Serialize for BoundChain<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundChain", 4)?;
        st.serialize_field("t", &self.t.to_json())?;
        st.serialize_field("steps", &self.steps)?;
        st.serialize_field("cube_coefficient", &self.cube_coefficient.to_json())?;
        st.serialize_field("slope_at_row_bound", &self.slope_at_row_bound.to_json())?;
        st.end()
    }
}

/// Coefficient polynomials of the chain after σ_5 and σ_4 are eliminated:
/// `(q3, p2, p0)` with `L3 = q3·σ_3 + p2·σ_2 + p0`.
fn chain_coefficients<S: Scalar>(parts: &F6Parts<S>) -> [Poly<S>; 5] {
    let c = |p: i64, q: i64| S::from_ratio(p, q);
    // per A >= σ_5/36, σ_5 >= (2/15)σ_4, σ_4 >= (3/8)σ_3.
    let q5 = &parts.p[5] + &parts.p_per.scale(&c(1, 36));
    let q4 = &parts.p[4] + &q5.scale(&c(2, 15));
    let q3 = &parts.p[3] + &q4.scale(&c(3, 8));
    [q5, q4, q3, parts.p[2].clone(), parts.p0.clone()]
}

/// Per-row quadratic `c3·x² + c2·x` and the constant `K` of the last two
/// chain lines, as polynomials in t.
fn row_quadratic<S: Scalar>(q3: &Poly<S>, p2: &Poly<S>, p0: &Poly<S>) -> (Poly<S>, Poly<S>, Poly<S>) {
    let c = |p: i64, q: i64| S::from_ratio(p, q);
    // σ_3 = ⅔Σa³ + Σa² + 10 and σ_2 = ½Σa² + 12 at n = 6.
    let c3 = q3.scale(&c(2, 3));
    let c2 = q3 + &p2.scale(&c(1, 2));
    let k = &(&q3.scale(&c(10, 1)) + &p2.scale(&c(12, 1))) + p0;
    (c3, c2, k)
}

/// `f(1/6) = c3/36 + c2/6` as a polynomial in t.
pub fn row_bound_value_poly() -> Poly<Rational> {
    let (c3, c2, _) = generic_row_quadratic();
    &c3.scale(&Rational::from_ratio(1, 36)) + &c2.scale(&Rational::from_ratio(1, 6))
}

/// The constant `K(t)` left after the per-row terms are split off.
pub fn row_constant_poly() -> Poly<Rational> {
    generic_row_quadratic().2
}

/// `c3(t)`, the coefficient of `x²` in the per-row quadratic.
pub fn cube_coefficient_poly() -> Poly<Rational> {
    generic_row_quadratic().0
}

fn generic_row_quadratic() -> (Poly<Rational>, Poly<Rational>, Poly<Rational>) {
    let parts = F6Parts::<Rational>::new(&Mat::uniform(6)).expect("J_6 is valid");
    let [_, _, q3, p2, p0] = chain_coefficients(&parts);
    row_quadratic(&q3, &p2, &p0)
}

/// `6·f(1/6) + K(t)` in the displayed closed form; identically zero.
pub fn terminal_identity_poly() -> Poly<Rational> {
    let f = Poly::<Rational>::from_ratios(&[(-1, 3888), (-1, 3888), (-1, 3888), (1, 486), (-1, 972)]);
    let k = Poly::<Rational>::from_ratios(&[(1, 648), (1, 648), (1, 648), (-8, 648), (4, 648)]);
    &f.scale(&Rational::from_int(6)) + &k
}

/// Evaluates the lower-bound chain for `F_A(t)` on Ω_6.
///
/// Requires `t ∈ [0.7836, 1]` and that both hypothesis polynomials (k = 5,
/// 6) have no root in (0, 1).
pub fn bound_chain_check6<S: Scalar>(a: &Mat<S>, t: &S) -> Result<BoundChain<S>> {
    require_order(a, 6, "bound_chain_check6")?;
    let t_min = S::from_ratio(CHAIN_T_MIN.0, CHAIN_T_MIN.1);
    if *t < t_min || *t > S::one() {
        return Err(Error::domain(format!("chain parameter {t} outside [0.7836, 1]")));
    }
    for k in [5, 6] {
        let h = hypothesis_poly(a, k)?;
        if let Some((lo, hi)) = roots_in_open_unit(&h, ROOT_TOL) {
            return Err(Error::HypothesisFailed(format!(
                "hypothesis polynomial for k={k} has a root in ({lo}, {hi})"
            )));
        }
    }
    let parts = F6Parts::new(a)?;
    let [q5, q4, q3, p2, p0] = chain_coefficients(&parts);
    let (c3, c2, k) = row_quadratic(&q3, &p2, &p0);
    let ev = |p: &Poly<S>| p.eval(t);
    let s = &parts.sigma;

    let l0 = parts.poly().eval(t);
    let tail2 = ev(&p2) * s[2].clone() + ev(&p0);
    let l1 = ev(&q5) * s[5].clone() + ev(&parts.p[4]) * s[4].clone() + ev(&parts.p[3]) * s[3].clone() + tail2.clone();
    let l2 = ev(&q4) * s[4].clone() + ev(&parts.p[3]) * s[3].clone() + tail2.clone();
    let l3 = ev(&q3) * s[3].clone() + tail2;

    let s2 = sum_powers(a, 2);
    let s3 = sum_powers(a, 3);
    let c = |p: i64, q: i64| S::from_ratio(p, q);
    let l4 = ev(&q3) * (c(2, 3) * s3 + s2.clone() + c(10, 1))
        + ev(&p2) * (c(1, 2) * s2 + c(12, 1))
        + ev(&p0);

    let (c3t, c2t, kt) = (ev(&c3), ev(&c2), ev(&k));
    let row_sq: Vec<S> = (0..6)
        .map(|i| a.row(i).iter().fold(S::zero(), |acc, v| acc + v.powu(2)))
        .collect();
    let l5 = row_sq.iter().fold(kt.clone(), |acc, x| {
        acc + c3t.clone() * x.clone() * x.clone() + c2t.clone() * x.clone()
    });
    let sixth = c(1, 6);
    let l6 = S::from_int(6) * (c3t.clone() * sixth.clone() * sixth.clone() + c2t.clone() * sixth) + kt;

    let steps = vec![
        ChainStep { label: "F_A(t)", value: l0 },
        ChainStep { label: "per A >= sigma_5/36", value: l1 },
        ChainStep { label: "sigma_5 >= 2 sigma_4/15", value: l2 },
        ChainStep { label: "sigma_4 >= 3 sigma_3/8", value: l3 },
        ChainStep { label: "closed forms for sigma_2, sigma_3", value: l4 },
        ChainStep { label: "row cube-square inequality", value: l5 },
        ChainStep { label: "row bound sum_j a_ij^2 >= 1/6", value: l6 },
    ];
    Ok(BoundChain {
        t: t.clone(),
        steps,
        cube_coefficient: c3t.clone(),
        slope_at_row_bound: c3t / S::from_int(3) + c2t,
    })
}

/// Per-row slack `Σ_j a_ij³ - (Σ_j a_ij²)²`, nonnegative on stochastic rows.
pub fn kopotun_row_slacks<S: Scalar>(a: &Mat<S>) -> Result<Vec<S>> {
    require_doubly_stochastic(a, "kopotun_row_slacks")?;
    Ok((0..a.order())
        .map(|i| {
            let row = a.row(i);
            let sq = row.iter().fold(S::zero(), |acc, v| acc + v.powu(2));
            let cu = row.iter().fold(S::zero(), |acc, v| acc + v.powu(3));
            cu - sq.clone() * sq
        })
        .collect())
}

/// Per-row slack `Σ_j a_ij² - 1/n`.
pub fn london_minc_row_slacks<S: Scalar>(a: &Mat<S>) -> Result<Vec<S>> {
    require_doubly_stochastic(a, "london_minc_row_slacks")?;
    let inv = S::one() / S::from_usize(a.order());
    Ok((0..a.order())
        .map(|i| a.row(i).iter().fold(S::zero(), |acc, v| acc + v.powu(2)) - inv.clone())
        .collect())
}

/// `σ_k(A) - ((n-k+1)²/(kn))·σ_{k-1}(A)`. Diagnostic only: the inequality
/// this measures is false in general.
pub fn holens_dokovic_ratio<S: Scalar>(a: &Mat<S>, k: usize) -> Result<S> {
    let n = a.order();
    if k < 2 || k > n {
        return Err(Error::invalid(format!("need 2 <= k <= n, got k={k}, n={n}")));
    }
    let m = S::from_usize(n - k + 1);
    let w = m.clone() * m / (S::from_usize(k) * S::from_usize(n));
    Ok(sigma_k(a, k)? - w * sigma_k(a, k - 1)?)
}

/// Evaluates the gap at `t` by the chosen method.
pub fn gap_report<S: Scalar>(a: &Mat<S>, t: &S, method: GapMethod) -> Result<GapReport<S>> {
    require_unit_interval(t)?;
    let thirty_two = S::from_int(32);
    let gap = match method {
        GapMethod::Direct => gap_direct(a, t)?,
        GapMethod::QuarticPaper => quartic_paper(a)?.eval(t) / thirty_two,
        GapMethod::QuarticCorrected => quartic_corrected(a)?.eval(t) / thirty_two,
        GapMethod::FFactored => {
            t.clone() * (S::one() - t.clone()) * f6_poly(a)?.eval(t)
        }
    };
    Ok(GapReport {
        n: a.order(),
        parameter: t.clone(),
        gap,
        witness: a.clone(),
        method,
    })
}

/// `Σ_i e_r(row_i)` helper kept for callers that work with rows.
pub fn row_elem_sym_sum<S: Scalar>(a: &Mat<S>, r: usize) -> S {
    (0..a.order()).fold(S::zero(), |acc, i| acc + elem_sym(a.row(i), r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random_birkhoff;
    use crate::scalar::rat;

    #[test]
    fn gap_examples() {
        let j4 = Mat::<Rational>::uniform(4);
        assert_eq!(gap_direct(&j4, &rat(1, 3)).unwrap(), rat(0, 1));
        let i4 = Mat::<Rational>::identity(4);
        assert_eq!(gap_direct(&i4, &rat(0, 1)).unwrap(), rat(0, 1));
        assert_eq!(gap_direct(&i4, &rat(1, 1)).unwrap(), rat(0, 1));
        // per(½J_4 + ½I_4) = Σ_σ (5/8)^{fix}(1/8)^{4-fix}: derangement counts 9, 8, 6, 0, 1.
        let expansion = [9i64, 8, 6, 0, 1]
            .iter()
            .enumerate()
            .fold(rat(0, 1), |acc, (fix, &cnt)| {
                acc + rat(cnt, 1) * rat(5, 8).powu(fix as u32) * rat(1, 8).powu(4 - fix as u32)
            });
        assert_eq!(expansion, rat(103, 512));
        assert_eq!(
            gap_direct(&i4, &rat(1, 2)).unwrap(),
            rat(1, 2) * rat(3, 32) + rat(1, 2) - rat(103, 512)
        );
        assert!(matches!(gap_direct(&Mat::<f64>::constant(4, 1.0), &0.5), Err(Error::Domain(_))));
        assert!(gap_direct(&j4, &rat(3, 2)).is_err());
    }

    #[test]
    fn quartic_paper_examples() {
        let f = quartic_features(&Mat::<Rational>::uniform(4)).unwrap();
        assert_eq!((f.e2.clone(), f.e3.clone(), f.e4.clone(), f.t2_e4.clone()), (rat(3, 2), rat(1, 4), rat(1, 64), rat(3, 8)));
        assert_eq!(
            quartic_paper(&Mat::<Rational>::uniform(4)).unwrap(),
            Poly::from_ratios(&[(128, 3), (0, 1), (0, 1), (0, 1), (6, 1)])
        );
        assert_eq!(
            quartic_paper(&Mat::<Rational>::identity(4)).unwrap(),
            Poly::from_ratios(&[(128, 3), (67, 1), (-120, 1), (68, 1), (-15, 1)])
        );
        assert!(quartic_paper(&Mat::<Rational>::identity(3)).is_err());
    }

    #[test]
    fn quartic_corrected_examples() {
        assert!(quartic_corrected(&Mat::<Rational>::uniform(4)).unwrap().is_zero());
        let a = random_birkhoff(4, 6, 11).unwrap();
        let q = quartic_corrected(&a).unwrap();
        assert!(q.coeff(0).abs() < 1e-12);
        let direct = 32.0 * gap_direct(&a, &0.37).unwrap();
        assert!((q.eval(&0.37) - direct).abs() < 1e-12);
        let exact = quartic_corrected(&crate::matcore::random_birkhoff_exact(4, 6, 50, 11).unwrap()).unwrap();
        assert!(exact.coeff(0).is_zero());
        assert!(exact.eval(&rat(1, 1)).is_zero());
    }

    #[test]
    fn f6_examples() {
        assert!(f6_poly(&Mat::<Rational>::uniform(6)).unwrap().is_zero());
        let a = random_birkhoff(6, 8, 5).unwrap();
        let f = f6_poly(&a).unwrap();
        let t = 0.7836;
        let direct = gap_direct(&a, &t).unwrap() / (t * (1.0 - t));
        assert!((f.eval(&t) - direct).abs() < 1e-9);
        assert!(f6_poly(&Mat::<f64>::uniform(5)).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(sigma2_closed(&Mat::<Rational>::uniform(6)).unwrap(), rat(25, 2));
        assert_eq!(sigma2_closed(&Mat::<Rational>::uniform(4)).unwrap(), rat(9, 2));
        assert_eq!(sigma2_closed(&Mat::<Rational>::identity(5)).unwrap(), rat(10, 1));
        assert_eq!(sigma3_closed(&Mat::<Rational>::uniform(6)).unwrap(), rat(100, 9));
        assert_eq!(sigma3_closed(&Mat::<Rational>::identity(3)).unwrap(), rat(1, 1));
        let a = random_birkhoff(5, 6, 2).unwrap();
        assert!((sigma3_closed(&a).unwrap() - sigma_k(&a, 3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_examples() {
        assert!(hypothesis_poly(&Mat::<Rational>::uniform(6), 6).unwrap().is_zero());
        assert!(hypothesis_poly(&Mat::<Rational>::uniform(6), 5).unwrap().is_zero());
        let i6 = Mat::<Rational>::identity(6);
        let h = hypothesis_poly(&i6, 6).unwrap();
        assert_eq!(h.degree(), Some(4));
        let d = i6.sub_signed(&Mat::uniform(6));
        for r in 2..=6usize {
            let w = rat(r as i64, 1) * factorial::<Rational>(6 - r) / rat(6, 1).powu((6 - r) as u32);
            assert_eq!(h.coeff(r - 2), w * sigma_k(&d, r).unwrap());
        }
        assert!(hypothesis_poly(&i6, 1).is_err());
    }

    #[test]
    fn root_examples() {
        let tol = 1e-12;
        let p = Poly::<Rational>::from_ratios(&[(-1, 2), (1, 1)]);
        assert_eq!(roots_in_open_unit(&p, tol), Some((0.5 - tol, 0.5 + tol)));
        assert_eq!(roots_in_open_unit(&Poly::<f64>::new(vec![1.0, 1.0]), tol), None);
        // The cubic is (t - 1)(106t² - 312t + 153); its root in (0, 1) is
        // (156 - sqrt(156² - 106·153))/106.
        let (lo, hi) = roots_in_open_unit(&foregger_cubic(), tol).unwrap();
        let closed = (156.0 - (156.0f64 * 156.0 - 106.0 * 153.0).sqrt()) / 106.0;
        assert!(lo < closed && closed < hi);
        assert!(((lo + hi) / 2.0 - 0.6216986477375).abs() < 2e-8);
        assert_eq!(roots_in_open_unit(&Poly::<f64>::zero(), tol), None);
        // Roots only at the endpoints do not count.
        let ends = &Poly::<Rational>::t() * &Poly::from_ratios(&[(-1, 1), (1, 1)]);
        assert_eq!(roots_in_open_unit(&ends, tol), None);
    }

    #[test]
    fn chain_closed_forms() {
        assert!(terminal_identity_poly().is_zero());
        assert_eq!(
            row_bound_value_poly(),
            Poly::from_ratios(&[(-1, 3888), (-1, 3888), (-1, 3888), (1, 486), (-1, 972)])
        );
        assert_eq!(
            row_constant_poly(),
            Poly::from_ratios(&[(1, 648), (1, 648), (1, 648), (-8, 648), (4, 648)])
        );
        assert_eq!(
            cube_coefficient_poly(),
            Poly::from_ratios(&[(-3, 3240), (-3, 3240), (-3, 3240), (42, 3240), (-30, 3240)])
        );
    }

    #[test]
    fn chain_examples() {
        let chain = bound_chain_check6(&Mat::<Rational>::uniform(6), &rat(9, 10)).unwrap();
        assert!(chain.values().iter().all(|v| v.is_zero()));
        let a = random_birkhoff(6, 10, 21).unwrap();
        let chain = bound_chain_check6(&a, &0.7836).unwrap();
        assert_eq!(chain.steps.len(), 7);
        assert!(chain.is_non_increasing(1e-12));
        assert!(*chain.terminal() >= -1e-12);
        assert!(chain.cube_coefficient >= 0.0);
        assert!(chain.slope_at_row_bound >= 0.0);
        assert!(matches!(bound_chain_check6(&a, &0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn holens_dokovic_examples() {
        for n in 3..=5 {
            for k in 2..=n {
                assert!(holens_dokovic_ratio(&Mat::<Rational>::uniform(n), k).unwrap().is_zero());
            }
        }
        assert_eq!(holens_dokovic_ratio(&Mat::<Rational>::identity(4), 2).unwrap(), rat(3, 2));
    }
}
