//! Dense row-major matrices and exact Gaussian elimination.

use super::field::Field;
use super::subspace::Subspace;
use crate::error::Error;

pub type Matrix<F> = Vec<Vec<F>>;

/// Checks that every row has `ncols` entries and returns `ncols`.
pub fn check_rectangular<F>(rows: &[Vec<F>]) -> Result<usize, Error> {
    let ncols = rows.first().map_or(0, Vec::len);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Ragged {
                row: i,
                found: row.len(),
                expected: ncols,
            });
        }
    }
    Ok(ncols)
}

pub fn identity<F: Field>(n: usize) -> Matrix<F> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect()
}

pub fn transpose<F: Field>(m: &[Vec<F>]) -> Matrix<F> {
    let ncols = m.first().map_or(0, Vec::len);
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Matrix<F> {
    let inner = b.len();
    let ncols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), inner);
            (0..ncols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(F::zero(), |acc, (x, brow)| acc.add(&x.mul(&brow[j])))
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<F: Field>(a: &[Vec<F>], v: &[F]) -> Vec<F> {
    a.iter().map(|row| dot(row, v)).collect()
}

/// Plain bilinear dot product (no conjugation).
pub fn dot<F: Field>(x: &[F], y: &[F]) -> F {
    x.iter()
        .zip(y)
        .fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
}

pub fn scale<F: Field>(v: &[F], c: &F) -> Vec<F> {
    v.iter().map(|x| x.mul(c)).collect()
}

pub fn axpy<F: Field>(y: &[F], c: &F, x: &[F]) -> Vec<F> {
    y.iter().zip(x).map(|(a, b)| a.add(&c.mul(b))).collect()
}

pub fn is_zero_vec<F: Field>(v: &[F]) -> bool {
    v.iter().all(Field::is_zero)
}

pub fn lift_matrix<F: Field>(m: &[Vec<super::Gauss>]) -> Matrix<F> {
    m.iter()
        .map(|row| row.iter().map(F::from_gauss).collect())
        .collect()
}

/// Reduced row-echelon form; returns the nonzero rows and their pivot columns.
pub fn rref<F: Field>(mut rows: Matrix<F>, ncols: usize) -> (Matrix<F>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        if !inv.is_one() {
            rows[r] = scale(&rows[r], &inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].neg();
                *row = axpy(row, &factor, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank<F: Field>(rows: &[Vec<F>], ncols: usize) -> usize {
    rref(rows.to_vec(), ncols).1.len()
}

/// Basis of `{x : M x = 0}`.
pub fn kernel_basis<F: Field>(rows: &[Vec<F>], ncols: usize) -> Matrix<F> {
    let (reduced, pivots) = rref(rows.to_vec(), ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![F::zero(); ncols];
            v[free] = F::one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                v[p] = row[free].neg();
            }
            v
        })
        .collect()
}

/// Solves `M x = b` for some `x`, if the system is consistent.
pub fn solve<F: Field>(m: &[Vec<F>], b: &[F], ncols: usize) -> Option<Vec<F>> {
    let aug: Matrix<F> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (reduced, pivots) = rref(aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![F::zero(); ncols];
    for (row, &p) in reduced.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

pub fn inverse<F: Field>(m: &[Vec<F>]) -> Option<Matrix<F>> {
    let n = m.len();
    let aug: Matrix<F> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let (reduced, pivots) = rref(aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(reduced.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Rank of `M` together with its kernel as a subspace of the column space.
pub fn rank_kernel<F: Field>(rows: &[Vec<F>]) -> Result<(usize, Subspace<F>), Error> {
    let ncols = check_rectangular(rows)?;
    rank_kernel_with_cols(rows, ncols)
}

/// As [`rank_kernel`], with an explicit column count (needed for empty matrices).
pub fn rank_kernel_with_cols<F: Field>(
    rows: &[Vec<F>],
    ncols: usize,
) -> Result<(usize, Subspace<F>), Error> {
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(Error::Ragged {
            row: i,
            found: row.len(),
            expected: ncols,
        });
    }
    let r = rank(rows, ncols);
    let kernel = Subspace::span(ncols, kernel_basis(rows, ncols));
    Ok((r, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Gauss;

    fn g(re: i64, im: i64) -> Gauss {
        Gauss::from_ints(re, im)
    }

    #[test]
    fn identity_has_full_rank() {
        let (r, k) = rank_kernel(&identity::<Gauss>(3)).unwrap();
        assert_eq!(r, 3);
        assert_eq!(k.dim(), 0);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let z = vec![vec![Gauss::zero(); 4]; 2];
        let (r, k) = rank_kernel(&z).unwrap();
        assert_eq!(r, 0);
        assert_eq!(k.dim(), 4);
    }

    #[test]
    fn gaussian_rank_one() {
        // rows (1, i), (i, -1): second row is i times the first, so the
        // kernel is x + iy = 0, spanned by (-i, 1)
        let m = vec![vec![g(1, 0), g(0, 1)], vec![g(0, 1), g(-1, 0)]];
        let (r, k) = rank_kernel(&m).unwrap();
        assert_eq!(r, 1);
        assert_eq!(k, Subspace::span(2, vec![vec![g(0, -1), g(1, 0)]]));
        for row in &m {
            assert!(dot(row, &k.basis()[0]).is_zero());
        }
    }

    #[test]
    fn ragged_is_rejected() {
        let m = vec![vec![g(1, 0), g(0, 0)], vec![g(1, 0)]];
        assert!(matches!(rank_kernel(&m), Err(Error::Ragged { row: 1, .. })));
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![g(2, 1), g(1, 0)], vec![g(0, 3), g(1, -1)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(2));
        let singular = vec![vec![g(1, 0), g(2, 0)], vec![g(2, 0), g(4, 0)]];
        assert!(inverse(&singular).is_none());
    }
}
