//! Complete isotropic flags and the parabolic degree of subspaces.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::linalg::subspace::Echelon;
use crate::linalg::{hyperbolic_basis, matrix, Field, Gauss, Matrix, Rational, SplitForm, Subspace};
use crate::weights::Weight;

/// A complete isotropic flag given by an adapted basis `(w_1, …, w_q)` with
/// Gram matrix `J_q`; the pieces are `F_i = span(w_1, …, w_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicFlag<F: Field> {
    basis: Matrix<F>,
    pieces: Vec<Subspace<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlagViolation {
    Shape(String),
    /// Gram entry `(i, j)` (0-based) differs from `J_q`.
    Gram { i: usize, j: usize, found: String },
}

impl std::fmt::Display for FlagViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlagViolation::Shape(m) => write!(f, "{m}"),
            FlagViolation::Gram { i, j, found } => write!(
                f,
                "Q(w_{}, w_{}) = {found} differs from the split form",
                i + 1,
                j + 1
            ),
        }
    }
}

pub fn validate_flag<F: Field>(basis: &[Vec<F>]) -> Result<(), FlagViolation> {
    let q = basis.len();
    if q < 2 {
        return Err(FlagViolation::Shape(format!("flag of C^{q}, need q >= 2")));
    }
    if let Some(r) = basis.iter().position(|w| w.len() != q) {
        return Err(FlagViolation::Shape(format!(
            "basis vector {} has {} entries, expected {q}",
            r + 1,
            basis[r].len()
        )));
    }
    let form = SplitForm::new(q);
    for i in 0..q {
        for j in i..q {
            let v = form.eval(&basis[i], &basis[j]);
            let ok = if i + j + 1 == q { v.is_one() } else { v.is_zero() };
            if !ok {
                return Err(FlagViolation::Gram {
                    i,
                    j,
                    found: v.to_string(),
                });
            }
        }
    }
    Ok(())
}

impl<F: Field> IsotropicFlag<F> {
    pub fn new(basis: Matrix<F>) -> Result<Self, Error> {
        validate_flag(&basis).map_err(|v| Error::InvalidFlag(v.to_string()))?;
        Ok(Self::from_valid(basis))
    }

    fn from_valid(basis: Matrix<F>) -> Self {
        let q = basis.len();
        let pieces = (0..=q)
            .map(|i| Subspace::span(q, basis[..i].to_vec()))
            .collect();
        IsotropicFlag { basis, pieces }
    }

    pub fn standard(q: usize) -> Self {
        Self::from_valid(matrix::identity(q))
    }

    pub fn q(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    /// `F_i` for `0 ≤ i ≤ q`.
    pub fn piece(&self, i: usize) -> &Subspace<F> {
        &self.pieces[i]
    }

    /// `dim(V ∩ F_i)` for `i = 0..=q`.
    pub fn intersection_dims(&self, v: &Subspace<F>) -> Vec<usize> {
        let mut e = Echelon::from_subspace(v);
        let mut out = Vec::with_capacity(self.q() + 1);
        out.push(0);
        for (i, w) in self.basis.iter().enumerate() {
            e.insert(w);
            // dim(V ∩ F_i) = dim V + i - dim(V + F_i)
            out.push(v.dim() + i + 1 - e.rank());
        }
        out
    }

    /// The flag `g·F`; `g` must be an isometry of the form.
    pub fn map(&self, g: &[Vec<F>]) -> Self {
        Self::from_valid(self.basis.iter().map(|w| matrix::mat_vec(g, w)).collect())
    }
}

impl IsotropicFlag<Gauss> {
    pub fn lift<G: Field>(&self) -> IsotropicFlag<G> {
        IsotropicFlag::from_valid(matrix::lift_matrix(&self.basis))
    }
}

/// Deterministic per seed; seed 0 is the standard flag.
pub fn random_flag(q: usize, seed: u64) -> IsotropicFlag<Gauss> {
    IsotropicFlag::from_valid(hyperbolic_basis(q, seed))
}

/// One flag per puncture, all in the same `C^q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagSystem<F: Field> {
    pub flags: Vec<IsotropicFlag<F>>,
}

impl<F: Field> FlagSystem<F> {
    pub fn new(flags: Vec<IsotropicFlag<F>>) -> Result<Self, Error> {
        if let Some(q) = flags.first().map(IsotropicFlag::q) {
            if let Some(f) = flags.iter().find(|f| f.q() != q) {
                return Err(Error::DimensionMismatch {
                    expected: q,
                    found: f.q(),
                });
            }
        }
        Ok(FlagSystem { flags })
    }

    pub fn standard(q: usize, s: usize) -> Self {
        FlagSystem {
            flags: vec![IsotropicFlag::standard(q); s],
        }
    }

    pub fn q(&self) -> usize {
        self.flags.first().map_or(0, IsotropicFlag::q)
    }

    pub fn s(&self) -> usize {
        self.flags.len()
    }

    pub fn map(&self, g: &[Vec<F>]) -> Self {
        FlagSystem {
            flags: self.flags.iter().map(|f| f.map(g)).collect(),
        }
    }
}

impl FlagSystem<Gauss> {
    pub fn lift<G: Field>(&self) -> FlagSystem<G> {
        FlagSystem {
            flags: self.flags.iter().map(IsotropicFlag::lift).collect(),
        }
    }

    /// `s` independent random flags; seed 0 gives the standard flags.
    pub fn random(q: usize, s: usize, seed: u64) -> Self {
        if seed == 0 {
            return Self::standard(q, s);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FlagSystem {
            flags: (0..s)
                .map(|_| random_flag(q, rng.gen_range(1..u64::MAX)))
                .collect(),
        }
    }
}

fn check_dims<F: Field>(v: &Subspace<F>, fs: &FlagSystem<F>, w: &Weight) -> Result<(), Error> {
    if fs.s() != w.s || w.beta.len() != w.s {
        return Err(Error::DimensionMismatch {
            expected: w.s,
            found: fs.s(),
        });
    }
    for (q, found) in [(w.q, fs.q()), (w.q, v.ambient())] {
        if q != found {
            return Err(Error::DimensionMismatch { expected: q, found });
        }
    }
    Ok(())
}

/// `Σ_j Σ_i β_i^j (dim(V ∩ F_i^j) - dim(V ∩ F_{i-1}^j))`.
pub fn pardeg_subspace<F: Field>(
    v: &Subspace<F>,
    fs: &FlagSystem<F>,
    w: &Weight,
) -> Result<Rational, Error> {
    check_dims(v, fs, w)?;
    Ok(pardeg_unchecked(v, fs, w))
}

pub(crate) fn pardeg_unchecked<F: Field>(v: &Subspace<F>, fs: &FlagSystem<F>, w: &Weight) -> Rational {
    let mut total = Rational::zero();
    for (flag, beta) in fs.flags.iter().zip(&w.beta) {
        let dims = flag.intersection_dims(v);
        for (i, b) in beta.iter().enumerate() {
            if dims[i + 1] > dims[i] {
                total += b;
            }
        }
    }
    total
}

/// Score of a subspace of `C^2` against the fixed isotropic flag
/// `0 ⊂ ⟨e_1⟩ ⊂ C^2` with weights `(-Nα^j, Nα^j)` at every puncture.
pub fn so2_score(t: &Subspace<Gauss>, w: &Weight, n: &BigInt) -> Result<BigInt, Error> {
    if t.ambient() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: t.ambient(),
        });
    }
    let abs_alpha: Rational = w.alpha.iter().sum();
    let na = Rational::from_integer(n.clone()) * abs_alpha;
    debug_assert!(na.is_integer());
    let na = na.to_integer();
    let u = Subspace::coordinate(2, &[0]);
    let u_prime = Subspace::coordinate(2, &[1]);
    if t.is_zero() || t.is_full() {
        Ok(BigInt::zero())
    } else if *t == u {
        Ok(na)
    } else if *t == u_prime {
        Ok(-na)
    } else {
        Err(Error::Input(
            "subspace of C^2 is not 0, C^2 or one of the two coordinate lines".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn g(n: i64) -> Gauss {
        Gauss::from_int(n)
    }

    fn q4_weight() -> Weight {
        Weight::uniform(
            4,
            rat(1, 8),
            vec![rat(1, 16), rat(1, 32), rat(-1, 32), rat(-1, 16)],
        )
    }

    #[test]
    fn standard_flag_is_valid() {
        for q in 2..7 {
            assert!(validate_flag(IsotropicFlag::<Gauss>::standard(q).basis()).is_ok());
        }
    }

    #[test]
    fn swapped_q2_basis_still_valid() {
        let b = vec![vec![g(0), g(1)], vec![g(1), g(0)]];
        assert!(validate_flag(&b).is_ok());
    }

    #[test]
    fn anisotropic_first_vector_rejected() {
        let b = vec![vec![g(1), g(1)], vec![g(0), g(1)]];
        assert!(matches!(
            validate_flag(&b),
            Err(FlagViolation::Gram { i: 0, j: 0, .. })
        ));
    }

    #[test]
    fn random_flags() {
        assert_eq!(random_flag(3, 0), IsotropicFlag::standard(3));
        let mut firsts = std::collections::HashSet::new();
        for seed in 1..=100 {
            let f = random_flag(4, seed);
            assert!(validate_flag(f.basis()).is_ok());
            assert_eq!(f, random_flag(4, seed));
            firsts.insert(f.piece(1).clone());
        }
        assert!(firsts.len() > 90);
    }

    #[test]
    fn pieces_are_perp_dual() {
        let form = SplitForm::new(5);
        for seed in 0..10 {
            let f = random_flag(5, seed);
            for i in 0..=5 {
                assert_eq!(form.perp(f.piece(i)), *f.piece(5 - i));
            }
        }
    }

    #[test]
    fn pardeg_examples() {
        let w = q4_weight();
        let fs = FlagSystem::standard(4, 4);
        let e1 = Subspace::coordinate(4, &[0]);
        let e123 = Subspace::coordinate(4, &[0, 1, 2]);
        assert_eq!(pardeg_subspace(&e1, &fs, &w).unwrap(), rat(1, 4));
        assert_eq!(pardeg_subspace(&e123, &fs, &w).unwrap(), rat(1, 4));
        assert!(pardeg_subspace(&Subspace::full(4), &fs, &w).unwrap().is_zero());
        assert!(pardeg_subspace(&Subspace::zero(4), &fs, &w).unwrap().is_zero());
        let e4 = Subspace::coordinate(4, &[3]);
        assert_eq!(pardeg_subspace(&e4, &fs, &w).unwrap(), rat(-1, 4));
        assert!(pardeg_subspace(&Subspace::<Gauss>::full(3), &fs, &w).is_err());
    }

    /// Reverse-flag form of the degree: with `V_k = F_{k-1}^⊥` the parabolic
    /// degree of a subspace of the trivial bundle is
    /// `-Σ_k (β_k - β_{k-1}) dim(V' ∩ V_k)` with `β_0 = 0`.
    fn reverse_flag_pardeg(v: &Subspace<Gauss>, f: &IsotropicFlag<Gauss>, beta: &[Rational]) -> Rational {
        let form = SplitForm::new(f.q());
        let mut total = Rational::zero();
        let mut prev = Rational::zero();
        for (k, b) in beta.iter().enumerate() {
            let vk = form.perp(f.piece(k));
            let d = v.meet(&vk).dim() as i64;
            total -= (b - &prev) * Rational::from_integer(d.into());
            prev = b.clone();
        }
        total
    }

    #[test]
    fn pardeg_matches_reverse_flag_convention_on_c2() {
        let beta = vec![rat(3, 16), rat(-3, 16)];
        let w = Weight::new(vec![rat(1, 4)], vec![beta.clone()]);
        let subspaces = [
            Subspace::zero(2),
            Subspace::coordinate(2, &[0]),
            Subspace::coordinate(2, &[1]),
            Subspace::span(2, vec![vec![g(1), g(3)]]),
            Subspace::full(2),
        ];
        let flags = [
            IsotropicFlag::standard(2),
            IsotropicFlag::new(vec![vec![g(0), g(1)], vec![g(1), g(0)]]).unwrap(),
        ];
        for f in &flags {
            let fs = FlagSystem::new(vec![f.clone()]).unwrap();
            for v in &subspaces {
                assert_eq!(
                    pardeg_subspace(v, &fs, &w).unwrap(),
                    reverse_flag_pardeg(v, f, &beta),
                    "{v:?}"
                );
            }
        }
    }

    #[test]
    fn pardeg_matches_reverse_flag_convention_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let q = 2 + trial % 3;
            let f = random_flag(q, trial as u64 + 1);
            let mut beta: Vec<Rational> = (0..q / 2).map(|_| rat(rng.gen_range(0..8), 32)).collect();
            beta.sort_by(|a, b| b.cmp(a));
            let mut full = beta.clone();
            if q % 2 == 1 {
                full.push(Rational::zero());
            }
            full.extend(beta.iter().rev().map(|b| -b.clone()));
            let w = Weight::new(vec![rat(1, 4)], vec![full.clone()]);
            let dim = rng.gen_range(0..=q);
            let vecs: Matrix<Gauss> = (0..dim)
                .map(|_| (0..q).map(|_| g(rng.gen_range(-2..=2))).collect())
                .collect();
            let v = Subspace::span(q, vecs);
            let fs = FlagSystem::new(vec![f.clone()]).unwrap();
            assert_eq!(pardeg_subspace(&v, &fs, &w).unwrap(), reverse_flag_pardeg(&v, &f, &full));
        }
    }

    #[test]
    fn so2_scores() {
        let w = Weight::uniform(4, rat(1, 8), vec![rat(1, 16), rat(-1, 16)]);
        let n = BigInt::from(32);
        assert_eq!(so2_score(&Subspace::full(2), &w, &n).unwrap(), BigInt::zero());
        assert_eq!(so2_score(&Subspace::zero(2), &w, &n).unwrap(), BigInt::zero());
        assert_eq!(so2_score(&Subspace::coordinate(2, &[0]), &w, &n).unwrap(), 16.into());
        assert_eq!(so2_score(&Subspace::coordinate(2, &[1]), &w, &n).unwrap(), (-16).into());
        let diag = Subspace::span(2, vec![vec![g(1), g(1)]]);
        assert!(so2_score(&diag, &w, &n).is_err());
    }
}
