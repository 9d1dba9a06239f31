//! The split symmetric bilinear form `Q(x, y) = Σ x_k y_{p+1-k}` and the
//! isotropy machinery built on it.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::field::{Field, Gauss, Quad};
use super::matrix::{self, identity, inverse, kernel_basis, mat_mul, Matrix};
use super::subspace::Subspace;
use crate::error::Error;

/// The non-degenerate form with antidiagonal Gram matrix `J_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitForm {
    dim: usize,
}

/// Result of restricting the form to a subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropyInfo<F: Field> {
    pub is_isotropic: bool,
    pub radical: Subspace<F>,
    pub restricted_rank: usize,
}

impl SplitForm {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "form dimension must be positive");
        SplitForm { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval<F: Field>(&self, x: &[F], y: &[F]) -> F {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        x.iter()
            .zip(y.iter().rev())
            .fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
    }

    /// `J x`, i.e. the coordinates reversed.
    fn flip<F: Field>(x: &[F]) -> Vec<F> {
        x.iter().rev().cloned().collect()
    }

    pub fn gram<F: Field>(&self, vectors: &[Vec<F>]) -> Matrix<F> {
        vectors
            .iter()
            .map(|x| vectors.iter().map(|y| self.eval(x, y)).collect())
            .collect()
    }

    /// `J_p` itself.
    pub fn matrix<F: Field>(&self) -> Matrix<F> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        if i + j + 1 == self.dim {
                            F::one()
                        } else {
                            F::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn check<F: Field>(&self, y: &Subspace<F>) -> Result<(), Error> {
        if y.ambient() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: y.ambient(),
            });
        }
        Ok(())
    }

    pub fn orthocomplement<F: Field>(&self, y: &Subspace<F>) -> Result<Subspace<F>, Error> {
        self.check(y)?;
        Ok(self.perp(y))
    }

    /// Orthocomplement without the dimension check.
    pub fn perp<F: Field>(&self, y: &Subspace<F>) -> Subspace<F> {
        let flipped: Matrix<F> = y.basis().iter().map(|v| Self::flip(v)).collect();
        Subspace::span(self.dim, kernel_basis(&flipped, self.dim))
    }

    pub fn radical<F: Field>(&self, y: &Subspace<F>) -> Subspace<F> {
        y.meet(&self.perp(y))
    }

    pub fn isotropy_classify<F: Field>(&self, y: &Subspace<F>) -> Result<IsotropyInfo<F>, Error> {
        self.check(y)?;
        let radical = self.radical(y);
        let restricted_rank = y.dim() - radical.dim();
        Ok(IsotropyInfo {
            is_isotropic: restricted_rank == 0,
            radical,
            restricted_rank,
        })
    }

    pub fn is_isotropic<F: Field>(&self, y: &Subspace<F>) -> bool {
        let b = y.basis();
        b.iter()
            .enumerate()
            .all(|(i, x)| b[i..].iter().all(|z| self.eval(x, z).is_zero()))
    }

    pub fn is_coisotropic<F: Field>(&self, y: &Subspace<F>) -> bool {
        self.is_isotropic(&self.perp(y))
    }

    /// Largest dimension of an isotropic subspace of `y` over an algebraically
    /// closed field: radical plus half the non-degenerate part.
    pub fn max_isotropic_dim<F: Field>(&self, y: &Subspace<F>) -> usize {
        let rad = self.radical(y).dim();
        rad + (y.dim() - rad) / 2
    }

    /// Whether the subspace has a nonzero isotropic vector over the algebraic closure.
    pub fn has_isotropic_vector<F: Field>(&self, y: &Subspace<F>) -> bool {
        match y.dim() {
            0 => false,
            1 => self.eval(&y.basis()[0], &y.basis()[0]).is_zero(),
            _ => true,
        }
    }

    /// `gᵗ J g = J`
    pub fn is_isometry<F: Field>(&self, g: &[Vec<F>]) -> bool {
        let cols = matrix::transpose(g);
        let gram = self.gram(&cols);
        gram == self.matrix::<F>()
    }

    /// Reflection `x ↦ x - 2 Q(x,v)/Q(v,v) v` in an anisotropic vector.
    pub fn reflection<F: Field>(&self, v: &[F]) -> Matrix<F> {
        let qvv = self.eval(v, v);
        let c = F::from_i64(2).div(&qvv);
        let jv = Self::flip(v);
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let delta = if i == j { F::one() } else { F::zero() };
                        delta.sub(&c.mul(&v[i]).mul(&jv[j]))
                    })
                    .collect()
            })
            .collect()
    }

    /// A random isometry with small Gaussian-rational entries: a Cayley
    /// transform of a random element of the Lie algebra, optionally composed
    /// with a reflection to leave `SO`.
    pub fn random_isometry(&self, rng: &mut impl Rng, proper: bool) -> Matrix<Gauss> {
        let p = self.dim;
        let g = loop {
            // K = J S with S antisymmetric lies in so(J)
            let mut s = vec![vec![Gauss::zero(); p]; p];
            for i in 0..p {
                for j in (i + 1)..p {
                    let re = rng.gen_range(-2..=2);
                    let im = if rng.gen_bool(0.25) {
                        rng.gen_range(-1..=1)
                    } else {
                        0
                    };
                    s[i][j] = Gauss::from_ints(re, im);
                    s[j][i] = s[i][j].neg();
                }
            }
            let k: Matrix<Gauss> = (0..p).map(|i| s[p - 1 - i].clone()).collect();
            let id = identity::<Gauss>(p);
            let minus: Matrix<Gauss> = id
                .iter()
                .zip(&k)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.sub(y)).collect())
                .collect();
            let plus: Matrix<Gauss> = id
                .iter()
                .zip(&k)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
                .collect();
            if let Some(inv) = inverse(&minus) {
                break mat_mul(&inv, &plus);
            }
        };
        if proper {
            return g;
        }
        let v = loop {
            let v: Vec<Gauss> = (0..p)
                .map(|_| Gauss::from_int(rng.gen_range(-2..=2)))
                .collect();
            if !self.eval(&v, &v).is_zero() {
                break v;
            }
        };
        mat_mul(&self.reflection(&v), &g)
    }
}

/// An ordered basis `(w_1, …, w_p)` with Gram matrix exactly `J_p`.
///
/// Seed 0 returns the standard basis; other seeds apply a random isometry
/// (possibly improper) to it.
pub fn hyperbolic_basis(dim: usize, seed: u64) -> Matrix<Gauss> {
    if seed == 0 {
        return identity(dim);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let proper = rng.gen_bool(0.5);
    let g = SplitForm::new(dim).random_isometry(&mut rng, proper);
    matrix::transpose(&g)
}

/// A nonzero isotropic vector of `y`, if one exists over the algebraic
/// closure. The result lies in Q(i) or in a single quadratic extension of it.
pub fn isotropic_vector(form: &SplitForm, y: &Subspace<Gauss>) -> Option<Vec<Quad>> {
    let lift = |v: &[Gauss]| v.iter().map(Quad::from_gauss).collect::<Vec<_>>();
    let basis = y.basis();
    if basis.is_empty() {
        return None;
    }
    let gram = form.gram(basis);
    let radical = kernel_basis(&gram, basis.len());
    if let Some(c) = radical.first() {
        let v = c
            .iter()
            .zip(basis)
            .fold(vec![Gauss::zero(); y.ambient()], |acc, (ck, bk)| {
                matrix::axpy(&acc, ck, bk)
            });
        return Some(lift(&v));
    }
    if basis.len() == 1 {
        return None;
    }
    if let Some(k) = (0..basis.len()).find(|&k| gram[k][k].is_zero()) {
        return Some(lift(&basis[k]));
    }
    // Q(x y1 + y2) = a x² + 2 b x + c with a ≠ 0
    let (a, b, c) = (&gram[0][0], &gram[0][1], &gram[1][1]);
    let disc = b.mul(b).sub(&a.mul(c));
    let ainv = a.inv().expect("a nonzero");
    let base = b.neg().mul(&ainv);
    let x = if disc.is_zero() {
        Quad::from_gauss(&base)
    } else if let Some(r) = disc.sqrt() {
        Quad::from_gauss(&base.add(&r.mul(&ainv)))
    } else {
        let d = Arc::new(disc);
        Quad::new(base, ainv, d)
    };
    let y1 = lift(&basis[0]);
    let y2 = lift(&basis[1]);
    Some(matrix::axpy(&y2, &x, &y1))
}

/// For an isotropic subspace with basis `v_1..v_k`, returns isotropic vectors
/// `y_1..y_k` with `Q(v_a, y_b) = δ_ab` spanning an isotropic subspace, and a
/// basis of the orthocomplement of `span(v, y)`.
pub fn isotropic_completion<F: Field>(
    form: &SplitForm,
    isotropic: &[Vec<F>],
) -> (Matrix<F>, Matrix<F>) {
    let p = form.dim();
    let k = isotropic.len();
    let pairing: Matrix<F> = isotropic.iter().map(|v| SplitForm::flip(v)).collect();
    let raw: Matrix<F> = (0..k)
        .map(|b| {
            let rhs: Vec<F> = (0..k)
                .map(|a| if a == b { F::one() } else { F::zero() })
                .collect();
            matrix::solve(&pairing, &rhs, p).expect("isotropic basis is independent")
        })
        .collect();
    let half = F::one().div(&F::from_i64(2));
    let duals: Matrix<F> = (0..k)
        .map(|b| {
            (0..k).fold(raw[b].clone(), |acc, c| {
                let coeff = form.eval(&raw[b], &raw[c]).mul(&half).neg();
                matrix::axpy(&acc, &coeff, &isotropic[c])
            })
        })
        .collect();
    let mut hyperbolic = isotropic.to_vec();
    hyperbolic.extend(duals.iter().cloned());
    let middle = form.perp(&Subspace::span(p, hyperbolic));
    (duals, middle.basis().clone())
}
