use super::field::{Field, Gauss};
use super::matrix::{check_rectangular, kernel_basis, rref, Matrix};
use crate::error::Error;

/// A linear subspace of `F^p`, stored by its reduced row-echelon basis so that
/// equal subspaces compare equal syntactically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace<F: Field> {
    ambient: usize,
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    /// Span of the given vectors. Panics if a vector has the wrong length.
    pub fn span(ambient: usize, vectors: Matrix<F>) -> Self {
        assert!(
            vectors.iter().all(|v| v.len() == ambient),
            "vector length differs from ambient dimension {ambient}"
        );
        let (basis, _) = rref(vectors, ambient);
        Subspace { ambient, basis }
    }

    pub fn try_span(ambient: usize, vectors: Matrix<F>) -> Result<Self, Error> {
        if !vectors.is_empty() {
            let n = check_rectangular(&vectors)?;
            if n != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    found: n,
                });
            }
        }
        Ok(Self::span(ambient, vectors))
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, super::matrix::identity(ambient))
    }

    /// Span of the standard basis vectors with the given (0-based) indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let vectors = indices
            .iter()
            .map(|&i| {
                let mut v = vec![F::zero(); ambient];
                v[i] = F::one();
                v
            })
            .collect();
        Self::span(ambient, vectors)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    fn pivot(row: &[F]) -> usize {
        row.iter()
            .position(|x| !x.is_zero())
            .expect("basis rows are nonzero")
    }

    pub fn contains(&self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut r = v.to_vec();
        for row in &self.basis {
            let p = Self::pivot(row);
            if !r[p].is_zero() {
                let c = r[p].neg();
                r = super::matrix::axpy(&r, &c, row);
            }
        }
        r.iter().all(Field::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|v| other.contains(v))
    }

    pub fn join(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        if other.is_zero() || self.is_full() {
            return self.clone();
        }
        if self.is_zero() || other.is_full() {
            return other.clone();
        }
        let mut vectors = self.basis.clone();
        vectors.extend(other.basis.iter().cloned());
        Self::span(self.ambient, vectors)
    }

    /// `{x : b·x = 0 for every basis vector b}` under the plain dot product.
    pub fn annihilator(&self) -> Self {
        Self::span(self.ambient, kernel_basis(&self.basis, self.ambient))
    }

    pub fn meet(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        if self.is_zero() || other.is_full() {
            return self.clone();
        }
        if other.is_zero() || self.is_full() {
            return other.clone();
        }
        self.annihilator().join(&other.annihilator()).annihilator()
    }

    /// Image under the matrix `g` (acting on column vectors).
    pub fn map(&self, g: &[Vec<F>]) -> Self {
        let vectors = self
            .basis
            .iter()
            .map(|v| super::matrix::mat_vec(g, v))
            .collect();
        Self::span(self.ambient, vectors)
    }
}

impl Subspace<Gauss> {
    pub fn lift<G: Field>(&self) -> Subspace<G> {
        Subspace {
            ambient: self.ambient,
            basis: super::matrix::lift_matrix(&self.basis),
        }
    }
}

/// Row echelon basis grown one vector at a time. Rows are reduced against
/// earlier rows only, which is enough for membership tests in insertion order.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    pub fn from_subspace(s: &Subspace<F>) -> Self {
        let mut e = Self::new();
        for v in s.basis() {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut r = v.to_vec();
        for (p, row) in &self.rows {
            if !r[*p].is_zero() {
                let c = r[*p].neg();
                r = super::matrix::axpy(&r, &c, row);
            }
        }
        r
    }

    /// Adds `v`; returns whether it was independent of the rows so far.
    pub fn insert(&mut self, v: &[F]) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inv().expect("nonzero pivot");
        self.rows.push((p, super::matrix::scale(&r, &inv)));
        true
    }
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Self::new()
    }
}

/// Intersection and sum of two subspaces of the same ambient space.
pub fn meet_join<F: Field>(
    u: &Subspace<F>,
    v: &Subspace<F>,
) -> Result<(Subspace<F>, Subspace<F>), Error> {
    if u.ambient() != v.ambient() {
        return Err(Error::DimensionMismatch {
            expected: u.ambient(),
            found: v.ambient(),
        });
    }
    Ok((u.meet(v), u.join(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coord(p: usize, idx: &[usize]) -> Subspace<Gauss> {
        Subspace::coordinate(p, idx)
    }

    #[test]
    fn canonical_storage() {
        let a = Subspace::span(
            2,
            vec![vec![Gauss::from_int(2), Gauss::from_int(4)]],
        );
        let b = Subspace::span(
            2,
            vec![vec![Gauss::from_ints(0, 1), Gauss::from_ints(0, 2)]],
        );
        assert_eq!(a, b);
    }

    #[test]
    fn meet_join_idempotent() {
        let u = coord(3, &[0, 2]);
        let (m, j) = meet_join(&u, &u).unwrap();
        assert_eq!(m, u);
        assert_eq!(j, u);
    }

    #[test]
    fn complementary_lines() {
        let u = coord(2, &[0]);
        let v = Subspace::span(2, vec![vec![Gauss::from_int(1), Gauss::from_int(1)]]);
        let (m, j) = meet_join(&u, &v).unwrap();
        assert!(m.is_zero());
        assert!(j.is_full());
    }

    #[test]
    fn coordinate_planes_meet_in_a_line() {
        let (m, j) = meet_join(&coord(4, &[0, 1]), &coord(4, &[1, 2])).unwrap();
        assert_eq!(m, coord(4, &[1]));
        assert_eq!(j, coord(4, &[0, 1, 2]));
    }

    #[test]
    fn ambient_mismatch() {
        assert!(matches!(
            meet_join(&coord(3, &[0]), &coord(4, &[0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
