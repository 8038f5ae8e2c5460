//! Dense univariate polynomials with ascending coefficients, plus the Sturm
//! machinery used for exact root counting.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, ScalarMode};

/// Polynomial `Σ coeffs[k]·t^k`. Trailing zero coefficients are trimmed, so
/// the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::new(coeffs.iter().map(|&(p, q)| S::from_ratio(p, q)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        Self::new(vec![S::zero(), S::one()])
    }

    /// `1 - t`.
    pub fn one_minus_t() -> Self {
        Self::new(vec![S::one(), -S::one()])
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `t^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_usize(k))
                .collect(),
        )
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|v| v.clone() * c.clone()).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(S::one()), |acc, _| &acc * self)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].clone() - c.clone() * dc.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Newton divided-difference interpolation through `(nodes[i], values[i])`,
    /// converted to ascending monomial coefficients.
    pub fn interpolate(nodes: &[S], values: &[S]) -> Result<Self> {
        if nodes.len() != values.len() || nodes.is_empty() {
            return Err(Error::invalid("interpolation needs matching, nonempty node and value lists"));
        }
        let m = nodes.len();
        let mut dd = values.to_vec();
        for level in 1..m {
            for i in (level..m).rev() {
                let denom = nodes[i].clone() - nodes[i - level].clone();
                if denom.is_zero() {
                    return Err(Error::invalid("interpolation nodes must be distinct"));
                }
                dd[i] = (dd[i].clone() - dd[i - 1].clone()) / denom;
            }
        }
        // Horner on the Newton form.
        let mut acc = Self::constant(dd[m - 1].clone());
        for i in (0..m - 1).rev() {
            let factor = Self::new(vec![-nodes[i].clone(), S::one()]);
            acc = &(&acc * &factor) + &Self::constant(dd[i].clone());
        }
        Ok(acc)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> Poly<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn to_exact(&self) -> Poly<Rational> {
        self.map(|c| c.to_rational())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.abs().to_f64())
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &Poly<S>) -> Poly<S> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<S: Scalar> Sub for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &Poly<S>) -> Poly<S> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &Poly<S>) -> Poly<S> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<S: Scalar> Serialize for Poly<S> {
    /// `{"coeffs": [...], "scalar_mode": ...}` with ascending coefficients;
    /// rationals as `"p/q"` strings.
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        struct Record {
            coeffs: Vec<serde_json::Value>,
            scalar_mode: ScalarMode,
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match S::MODE {
                ScalarMode::Float64 => serde_json::json!(c.to_f64()),
                ScalarMode::ExactRational => serde_json::json!(c.render()),
            })
            .collect();
        Record {
            coeffs,
            scalar_mode: S::MODE,
        }
        .serialize(s)
    }
}

/// Sturm sequence `p, p', -rem(p, p'), …` of a nonzero polynomial.
pub fn sturm_sequence(p: &Poly<Rational>) -> Vec<Poly<Rational>> {
    let mut seq = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let k = seq.len();
        let (_, r) = seq[k - 2].div_rem(&seq[k - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    seq
}

/// Sign changes of the sequence evaluated at `x`, zeros skipped.
pub fn sign_variations(seq: &[Poly<Rational>], x: &Rational) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|p| p.eval(x))
        .filter(|v| !num_traits::Zero::is_zero(v))
        .map(|v| num_traits::Signed::is_positive(&v))
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in `(a, b]`; `a` must not be a root.
pub fn count_roots(seq: &[Poly<Rational>], a: &Rational, b: &Rational) -> usize {
    sign_variations(seq, a).saturating_sub(sign_variations(seq, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn arithmetic_and_trim() {
        let p = Poly::<Rational>::from_ratios(&[(1, 1), (2, 1), (0, 1)]);
        assert_eq!(p.degree(), Some(1));
        let q = &p * &p;
        assert_eq!(q, Poly::from_ratios(&[(1, 1), (4, 1), (4, 1)]));
        assert!((&q - &q).is_zero());
        assert_eq!(q.eval(&rat(1, 2)), rat(4, 1));
        assert_eq!(q.derivative(), Poly::from_ratios(&[(4, 1), (8, 1)]));
        let (d, r) = q.div_rem(&p);
        assert_eq!(d, p);
        assert!(r.is_zero());
    }

    #[test]
    fn interpolation_recovers_quartic_exactly() {
        let p = Poly::<Rational>::from_ratios(&[(0, 1), (3, 7), (-5, 2), (1, 3), (9, 4)]);
        let nodes: Vec<Rational> = (1..=5).map(|k| rat(k, 7)).collect();
        let values: Vec<Rational> = nodes.iter().map(|x| p.eval(x)).collect();
        assert_eq!(Poly::interpolate(&nodes, &values).unwrap(), p);
        assert!(Poly::interpolate(&[rat(1, 2), rat(1, 2)], &[rat(0, 1), rat(1, 1)]).is_err());
    }

    #[test]
    fn sturm_counts_roots() {
        // (t - 1/4)(t - 1/2)(t - 2)
        let p = &(&Poly::<Rational>::from_ratios(&[(-1, 4), (1, 1)])
            * &Poly::from_ratios(&[(-1, 2), (1, 1)]))
            * &Poly::from_ratios(&[(-2, 1), (1, 1)]);
        let seq = sturm_sequence(&p);
        assert_eq!(count_roots(&seq, &rat(0, 1), &rat(1, 1)), 2);
        assert_eq!(count_roots(&seq, &rat(0, 1), &rat(3, 1)), 3);
        assert_eq!(count_roots(&seq, &rat(1, 3), &rat(1, 1)), 1);
        // Double root counts once.
        let sq = &Poly::<Rational>::from_ratios(&[(-1, 3), (1, 1)]).pow(2) * &Poly::from_ratios(&[(1, 1), (0, 1), (1, 1)]);
        assert_eq!(count_roots(&sturm_sequence(&sq), &rat(0, 1), &rat(1, 1)), 1);
    }

    #[test]
    fn serializes_rationals_as_strings() {
        let p = Poly::<Rational>::from_ratios(&[(128, 3), (0, 1), (6, 1)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"coeffs":["128/3","0","6"],"scalar_mode":"exact_rational"}"#);
    }
}
