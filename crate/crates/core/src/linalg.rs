//! Exact rational linear algebra: vectors, matrices, solving, kernels.
//!
//! Matrices are dense row-major `Vec<Vec<Rat>>`; sizes in this crate never
//! exceed a few dozen, so exact Gaussian elimination is always fast enough.

use crate::rat::{rint, Rat};
use num_traits::{One, Zero};

/// Dense rational vector.
pub type RVec = Vec<Rat>;
/// Dense rational matrix, row major.
pub type RMat = Vec<RVec>;

/// Zero vector of length `n`.
#[must_use]
pub fn zeros(n: usize) -> RVec {
    vec![Rat::zero(); n]
}

/// Identity matrix of size `n`.
#[must_use]
pub fn identity(n: usize) -> RMat {
    (0..n)
        .map(|i| {
            let mut row = zeros(n);
            row[i] = Rat::one();
            row
        })
        .collect()
}

/// Converts an integer vector to a rational one.
#[must_use]
pub fn from_ints(v: &[i64]) -> RVec {
    v.iter().map(|&x| rint(x)).collect()
}

/// Componentwise sum.
#[must_use]
pub fn add(a: &[Rat], b: &[Rat]) -> RVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Componentwise difference.
#[must_use]
pub fn sub(a: &[Rat], b: &[Rat]) -> RVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Scalar multiple.
#[must_use]
pub fn scale(c: &Rat, v: &[Rat]) -> RVec {
    v.iter().map(|x| c * x).collect()
}

/// Componentwise negation.
#[must_use]
pub fn neg(v: &[Rat]) -> RVec {
    v.iter().map(|x| -x).collect()
}

/// Plain dot product (no bilinear form).
#[must_use]
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// True iff every entry is zero.
#[must_use]
pub fn is_zero(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Matrix times column vector.
#[must_use]
pub fn mat_vec(m: &[RVec], v: &[Rat]) -> RVec {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Row vector times matrix.
#[must_use]
pub fn vec_mat(v: &[Rat], m: &[RVec]) -> RVec {
    assert!(!m.is_empty());
    let cols = m[0].len();
    (0..cols)
        .map(|j| v.iter().zip(m).map(|(x, row)| x * &row[j]).sum())
        .collect()
}

/// Matrix product.
#[must_use]
pub fn mat_mul(a: &[RVec], b: &[RVec]) -> RMat {
    a.iter().map(|row| vec_mat(row, b)).collect()
}

/// Matrix transpose.
#[must_use]
pub fn transpose(m: &[RVec]) -> RMat {
    if m.is_empty() {
        return Vec::new();
    }
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

/// Sum of two matrices.
#[must_use]
pub fn mat_add(a: &[RVec], b: &[RVec]) -> RMat {
    a.iter().zip(b).map(|(r, s)| add(r, s)).collect()
}

/// Difference of two matrices.
#[must_use]
pub fn mat_sub(a: &[RVec], b: &[RVec]) -> RMat {
    a.iter().zip(b).map(|(r, s)| sub(r, s)).collect()
}

/// Scalar multiple of a matrix.
#[must_use]
pub fn mat_scale(c: &Rat, m: &[RVec]) -> RMat {
    m.iter().map(|r| scale(c, r)).collect()
}

/// True iff two matrices are equal entrywise.
#[must_use]
pub fn mat_eq(a: &[RVec], b: &[RVec]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(r, s)| r == s)
}

/// Reduced row echelon form; returns (rref, pivot column per pivot row).
#[must_use]
pub fn rref(m: &[RVec]) -> (RMat, Vec<usize>) {
    let mut a: RMat = m.to_vec();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        a[r] = scale(&inv, &a[r]);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                a[i] = sub(&a[i], &scale(&f, &a[r]));
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Rank of a matrix.
#[must_use]
pub fn rank(m: &[RVec]) -> usize {
    rref(m).1.len()
}

/// Solves the square system `a x = b` exactly; `None` if singular.
#[must_use]
pub fn solve(a: &[RVec], b: &[Rat]) -> Option<RVec> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let aug: RMat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (red, pivots) = rref(&aug);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some((0..n).map(|i| red[i][n].clone()).collect())
}

/// Basis of the null space {x : m x = 0} (columns of `m` index the unknowns).
#[must_use]
pub fn kernel_basis(m: &[RVec]) -> Vec<RVec> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    let (red, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(cols);
            v[f] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -red[row][f].clone();
            }
            v
        })
        .collect()
}

/// Determinant by fraction-free elimination on a copy.
#[must_use]
pub fn det(m: &[RVec]) -> Rat {
    let n = m.len();
    let mut a: RMat = m.to_vec();
    let mut result = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            result = -result;
        }
        result *= a[c][c].clone();
        let inv = a[c][c].recip();
        for i in (c + 1)..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                a[i] = sub(&a[i], &scale(&f, &a[c]));
            }
        }
    }
    result
}

/// Inverse of a square matrix; `None` if singular.
#[must_use]
pub fn inverse(m: &[RVec]) -> Option<RMat> {
    let n = m.len();
    let aug: RMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(identity(n)[i].iter().cloned());
            r
        })
        .collect();
    let (red, pivots) = rref(&aug);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some((0..n).map(|i| red[i][n..].to_vec()).collect())
}

/// Projects repeated powers: (1/m) * sum of `mat^i` for i in 0..m.
#[must_use]
pub fn power_average(mat: &[RVec], m: usize) -> RMat {
    let n = mat.len();
    let mut acc = identity(n);
    let mut sum = identity(n);
    for _ in 1..m {
        acc = mat_mul(&acc, mat);
        sum = mat_add(&sum, &acc);
    }
    let inv_m = rint(m as i64).recip();
    mat_scale(&inv_m, &sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn solve_and_inverse_agree() {
        let a = vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(3, 1)],
        ];
        let b = vec![rat(5, 1), rat(10, 1)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(mat_vec(&a, &x), b);
        let inv = inverse(&a).unwrap();
        assert!(mat_eq(&mat_mul(&a, &inv), &identity(2)));
        assert_eq!(det(&a), rat(5, 1));
    }

    #[test]
    fn kernel_of_rank_one_map() {
        let m = vec![vec![rat(1, 1), rat(1, 1), rat(1, 1)]];
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero(&mat_vec(&m, v)));
        }
    }

    #[test]
    fn singular_solve_is_none() {
        let a = vec![
            vec![rat(1, 1), rat(2, 1)],
            vec![rat(2, 1), rat(4, 1)],
        ];
        assert!(solve(&a, &[rat(1, 1), rat(1, 1)]).is_none());
        assert_eq!(det(&a), rat(0, 1));
        assert_eq!(rank(&a), 1);
    }
}
