//! Elementary symmetric functions, column-sum families `T_r(A)`, the
//! inclusion–exclusion permanent formula, and the Eberlein–Mudholkar formula
//! for order four with its two Ω_4 identities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{require_doubly_stochastic, Mat, SubsetIndex};
use crate::scalar::Scalar;

/// `T_r(A)`: the `C(n, r)` sums of `r` distinct columns, in lexicographic
/// order of the column subsets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColFamily<S> {
    pub r: usize,
    pub subsets: Vec<SubsetIndex>,
    pub vectors: Vec<Vec<S>>,
}

impl<S: Scalar> ColFamily<S> {
    /// `Σ_{x ∈ T_r} e_k(x)`.
    pub fn sum_elem_sym(&self, k: usize) -> S {
        self.vectors
            .iter()
            .fold(S::zero(), |acc, x| acc + elem_sym(x, k))
    }
}

/// `e_r(x)`, read off the coefficients of `Π (1 + x_i·t)` built one factor at
/// a time. `e_0 = 1`; `e_r = 0` for `r > len(x)`.
pub fn elem_sym<S: Scalar>(x: &[S], r: usize) -> S {
    if r > x.len() {
        return S::zero();
    }
    let mut e = vec![S::zero(); r + 1];
    e[0] = S::one();
    for (i, xi) in x.iter().enumerate() {
        for k in (1..=r.min(i + 1)).rev() {
            e[k] = e[k].clone() + xi.clone() * e[k - 1].clone();
        }
    }
    e.swap_remove(r)
}

pub fn t_family<S: Scalar>(a: &Mat<S>, r: usize) -> Result<ColFamily<S>> {
    let n = a.order();
    if r == 0 || r > n {
        return Err(Error::invalid(format!("T_{r} undefined for order {n}")));
    }
    let subsets: Vec<SubsetIndex> = SubsetIndex::all(r, n).collect();
    let vectors = subsets
        .iter()
        .map(|cols| {
            (0..n)
                .map(|i| {
                    cols.members()
                        .iter()
                        .fold(S::zero(), |acc, &j| acc + a.get(i, j).clone())
                })
                .collect()
        })
        .collect();
    Ok(ColFamily { r, subsets, vectors })
}

/// `per A = Σ_{T_n} e_n − Σ_{T_{n−1}} e_n + … + (−1)^{n−1} Σ_{T_1} e_n`.
pub fn per_incl_excl<S: Scalar>(a: &Mat<S>) -> S {
    let n = a.order();
    if n == 0 {
        return S::one();
    }
    let mut total = S::zero();
    for r in 1..=n {
        let fam = t_family(a, r).expect("1 <= r <= n");
        let term = fam.sum_elem_sym(n);
        if (n - r) % 2 == 0 {
            total = total + term;
        } else {
            total = total - term;
        }
    }
    total
}

fn require_omega4<S: Scalar>(a: &Mat<S>, what: &str) -> Result<()> {
    if a.order() != 4 {
        return Err(Error::domain(format!("{what} is defined for order 4 only")));
    }
    require_doubly_stochastic(a, what)
}

/// Eberlein–Mudholkar closed form for a permanent in Ω_4:
/// `−1/3 + (1/9)·Σ_{T_1}(−4e_2 + 9e_3 − 18e_4) + (1/18)·Σ_{T_2}(4e_2 − 9e_3 + 18e_4)`.
pub fn em_permanent4<S: Scalar>(b: &Mat<S>) -> Result<S> {
    require_omega4(b, "em_permanent4")?;
    let t1 = t_family(b, 1)?;
    let t2 = t_family(b, 2)?;
    let c = |v: i64| S::from_int(v);
    let t1_part = c(-4) * t1.sum_elem_sym(2) + c(9) * t1.sum_elem_sym(3) - c(18) * t1.sum_elem_sym(4);
    let t2_part = c(4) * t2.sum_elem_sym(2) - c(9) * t2.sum_elem_sym(3) + c(18) * t2.sum_elem_sym(4);
    Ok(S::from_ratio(-1, 3) + t1_part / c(9) + t2_part / c(18))
}

/// Residuals `(Σ_{T_2} e_2 − 2Σ_{T_1} e_2 − 6, Σ_{T_2} e_3 − 2Σ_{T_1} e_2)`,
/// both zero on Ω_4.
pub fn em_identities4<S: Scalar>(a: &Mat<S>) -> Result<(S, S)> {
    require_omega4(a, "em_identities4")?;
    em_identity_residuals(a)
}

/// The same residuals without the domain check, for negative controls.
pub fn em_identity_residuals<S: Scalar>(a: &Mat<S>) -> Result<(S, S)> {
    let t1 = t_family(a, 1)?;
    let t2 = t_family(a, 2)?;
    let t1_e2 = t1.sum_elem_sym(2);
    let two = S::from_int(2);
    let first = t2.sum_elem_sym(2) - two.clone() * t1_e2.clone() - S::from_int(6);
    let second = t2.sum_elem_sym(3) - two * t1_e2;
    Ok((first, second))
}
