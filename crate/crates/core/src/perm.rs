//! Permanents by three independent routes, subpermanent sums, and the
//! Laplace-type and `per(A + B)` expansions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{require_doubly_stochastic, Mat, SubsetIndex};
use crate::scalar::{factorial, Scalar};

/// A pair of equal-size index sets naming both `A[α/β]` (kept) and
/// `A(α/β)` (deleted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorSpec {
    pub removed_rows: SubsetIndex,
    pub removed_cols: SubsetIndex,
}

impl MinorSpec {
    pub fn new(removed_rows: SubsetIndex, removed_cols: SubsetIndex) -> Result<Self> {
        if removed_rows.k() != removed_cols.k() {
            return Err(Error::invalid("row and column index sets differ in size"));
        }
        Ok(MinorSpec {
            removed_rows,
            removed_cols,
        })
    }

    /// `A[α/β]`.
    pub fn selected<S: Scalar>(&self, a: &Mat<S>) -> Mat<S> {
        a.submatrix(self.removed_rows.members(), self.removed_cols.members())
    }

    /// `A(α/β)`.
    pub fn complementary<S: Scalar>(&self, a: &Mat<S>) -> Mat<S> {
        a.delete(self.removed_rows.members(), self.removed_cols.members())
    }
}

/// Permanent by summing over all `n!` permutations. Kept as an oracle; the
/// cost is prohibitive beyond order 10.
pub fn per_naive<S: Scalar>(a: &Mat<S>) -> S {
    fn walk<S: Scalar>(a: &Mat<S>, row: usize, used: u32, acc: S, total: &mut S) {
        let n = a.order();
        if row == n {
            *total = total.clone() + acc;
            return;
        }
        for j in 0..n {
            if used & (1 << j) != 0 {
                continue;
            }
            let v = a.get(row, j);
            if v.is_zero() {
                continue;
            }
            walk(a, row + 1, used | (1 << j), acc.clone() * v.clone(), total);
        }
    }
    let mut total = S::zero();
    walk(a, 0, 0, S::one(), &mut total);
    total
}

/// Ryser's inclusion–exclusion formula with Gray-code subset iteration,
/// `O(2^n · n)`.
pub fn per_ryser<S: Scalar>(a: &Mat<S>) -> S {
    let n = a.order();
    if n == 0 {
        return S::one();
    }
    let mut row_sums = vec![S::zero(); n];
    let mut total = S::zero();
    let mut size = 0usize;
    let mut prev = 0u64;
    for k in 1..(1u64 << n) {
        let gray = k ^ (k >> 1);
        let flipped = gray ^ prev;
        let j = flipped.trailing_zeros() as usize;
        let adding = gray & flipped != 0;
        for (i, rs) in row_sums.iter_mut().enumerate() {
            let v = a.get(i, j).clone();
            *rs = if adding { rs.clone() + v } else { rs.clone() - v };
        }
        if adding {
            size += 1;
        } else {
            size -= 1;
        }
        prev = gray;
        let prod = row_sums
            .iter()
            .fold(S::one(), |acc, v| acc * v.clone());
        if (n - size) % 2 == 0 {
            total = total + prod;
        } else {
            total = total - prod;
        }
    }
    total
}

/// `per A(i|j)`.
pub fn per_minor<S: Scalar>(a: &Mat<S>, i: usize, j: usize) -> Result<S> {
    let n = a.order();
    if i >= n || j >= n {
        return Err(Error::invalid(format!(
            "minor ({i}, {j}) out of range for order {n}"
        )));
    }
    Ok(per_ryser(&a.minor(i, j)))
}

/// `σ_k(A)`: sum of the permanents of all `k × k` submatrices, by direct
/// enumeration of the `C(n,k)^2` minors. `σ_0 = 1`.
pub fn sigma_k<S: Scalar>(a: &Mat<S>, k: usize) -> Result<S> {
    let n = a.order();
    if k > n {
        return Err(Error::invalid(format!("σ_{k} undefined for order {n}")));
    }
    let row_sets: Vec<SubsetIndex> = SubsetIndex::all(k, n).collect();
    let mut total = S::zero();
    for rows in &row_sets {
        for cols in &row_sets {
            total = total + per_ryser(&a.submatrix(rows.members(), cols.members()));
        }
    }
    Ok(total)
}

/// Laplace-type expansion along the row set `alpha`:
/// `Σ_β per A[α/β] · per A(α/β)`.
pub fn laplace_expand<S: Scalar>(a: &Mat<S>, alpha: &SubsetIndex) -> Result<S> {
    let n = a.order();
    if alpha.members().last().is_some_and(|&m| m >= n) {
        return Err(Error::invalid("row set out of range"));
    }
    let mut total = S::zero();
    for beta in SubsetIndex::all(alpha.k(), n) {
        let spec = MinorSpec::new(alpha.clone(), beta)?;
        let kept = per_ryser(&spec.selected(a));
        if kept.is_zero() {
            continue;
        }
        total = total + kept * per_ryser(&spec.complementary(a));
    }
    Ok(total)
}

/// `S_k(A, B) = Σ_{α,β} per A[α/β] · per B(α/β)`, with the empty-permanent
/// conventions making `S_0 = per B` and `S_n = per A`.
pub fn s_k_mixed<S: Scalar>(a: &Mat<S>, b: &Mat<S>, k: usize) -> Result<S> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::invalid("matrices have different orders"));
    }
    if k > n {
        return Err(Error::invalid(format!("S_{k} undefined for order {n}")));
    }
    let sets: Vec<SubsetIndex> = SubsetIndex::all(k, n).collect();
    let mut total = S::zero();
    for alpha in &sets {
        for beta in &sets {
            let spec = MinorSpec::new(alpha.clone(), beta.clone())?;
            let left = per_ryser(&spec.selected(a));
            if left.is_zero() {
                continue;
            }
            total = total + left * per_ryser(&spec.complementary(b));
        }
    }
    Ok(total)
}

/// `per(t·J_n + (1-t)·A)` through the subpermanent expansion
/// `Σ_r t^r (1-t)^{n-r} (r!/n^r) σ_{n-r}(A)`.
pub fn per_convex_j<S: Scalar>(a: &Mat<S>, t: &S) -> Result<S> {
    require_doubly_stochastic(a, "per_convex_j")?;
    if t.is_negative() || *t > S::one() {
        return Err(Error::domain("t must lie in [0, 1]"));
    }
    let n = a.order();
    let s = S::one() - t.clone();
    let nn = S::from_usize(n);
    let mut total = S::zero();
    for r in 0..=n {
        let coeff = t.powu(r as u32) * s.powu((n - r) as u32) * factorial::<S>(r)
            / nn.powu(r as u32);
        if coeff.is_zero() {
            continue;
        }
        total = total + coeff * sigma_k(a, n - r)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn permanent_examples() {
        for n in 1..=6 {
            let id = Mat::<Rational>::identity(n);
            assert_eq!(per_naive(&id), rat(1, 1));
            assert_eq!(per_ryser(&id), rat(1, 1));
        }
        let ones = Mat::<Rational>::constant(3, rat(1, 1));
        assert_eq!(per_naive(&ones), rat(6, 1));
        assert_eq!(per_ryser(&ones), rat(6, 1));
        assert_eq!(per_naive(&Mat::<Rational>::uniform(4)), rat(3, 32));
        assert_eq!(per_ryser(&Mat::<Rational>::uniform(6)), rat(5, 324));
        let p = Mat::<Rational>::permutation(&[3, 1, 0, 4, 2]).unwrap();
        assert_eq!(per_ryser(&p), rat(1, 1));
        assert_eq!(per_ryser(&Mat::<Rational>::identity(0)), rat(1, 1));
    }

    #[test]
    fn minor_examples() {
        let j4 = Mat::<Rational>::uniform(4);
        // 3x3 all-1/4: 3! / 64.
        assert_eq!(per_minor(&j4, 0, 0).unwrap(), rat(3, 32));
        let i4 = Mat::<Rational>::identity(4);
        assert_eq!(per_minor(&i4, 0, 0).unwrap(), rat(1, 1));
        assert_eq!(per_minor(&i4, 0, 1).unwrap(), rat(0, 1));
        assert!(per_minor(&i4, 4, 0).is_err());
    }

    #[test]
    fn sigma_examples() {
        let j4 = Mat::<Rational>::uniform(4);
        assert_eq!(sigma_k(&j4, 1).unwrap(), rat(4, 1));
        assert_eq!(sigma_k(&j4, 4).unwrap(), rat(3, 32));
        // 36 minors, each a 2x2 all-1/4 block with permanent 2/16.
        assert_eq!(sigma_k(&j4, 2).unwrap(), rat(9, 2));
        assert_eq!(sigma_k(&j4, 0).unwrap(), rat(1, 1));
        assert!(sigma_k(&j4, 5).is_err());
    }

    #[test]
    fn laplace_examples() {
        let j4 = Mat::<Rational>::uniform(4);
        let alpha = SubsetIndex::new(vec![0, 1], 4).unwrap();
        assert_eq!(laplace_expand(&j4, &alpha).unwrap(), rat(3, 32));
        let i4 = Mat::<Rational>::identity(4);
        let alpha = SubsetIndex::new(vec![0], 4).unwrap();
        assert_eq!(laplace_expand(&i4, &alpha).unwrap(), rat(1, 1));
    }

    #[test]
    fn mixed_sum_conventions() {
        let a = crate::matcore::parse_matrix_text("3\n1 2 0\n0 1/2 3\n1 1 1\n").unwrap();
        let b = crate::matcore::parse_matrix_text("3\n2 0 1\n1/3 1 0\n0 5 1\n").unwrap();
        assert_eq!(s_k_mixed(&a, &b, 0).unwrap(), per_naive(&b));
        assert_eq!(s_k_mixed(&a, &b, 3).unwrap(), per_naive(&a));
        let total = (0..=3).fold(rat(0, 1), |acc, k| acc + s_k_mixed(&a, &b, k).unwrap());
        assert_eq!(total, per_naive(&a.add(&b)));
    }

    #[test]
    fn convex_j_endpoints() {
        let a = Mat::<Rational>::permutation(&[1, 2, 0, 3]).unwrap();
        assert_eq!(per_convex_j(&a, &rat(0, 1)).unwrap(), rat(1, 1));
        assert_eq!(per_convex_j(&a, &rat(1, 1)).unwrap(), rat(3, 32));
        let i6 = Mat::<f64>::identity(6);
        let direct = per_ryser(&i6.convex_with_uniform(&0.5));
        assert!((per_convex_j(&i6, &0.5).unwrap() - direct).abs() < 1e-12);
        assert!(matches!(
            per_convex_j(&Mat::<f64>::constant(3, 1.0), &0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn float_ryser_matches_naive() {
        let a = crate::matcore::random_birkhoff(6, 5, 3).unwrap();
        let naive = per_naive(&a);
        assert!((per_ryser(&a) - naive).abs() <= 1e-12 * naive.abs());
    }
}
