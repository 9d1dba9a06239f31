//! Seeded generators for weights, subspaces and whole instances.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flags::FlagSystem;
use crate::higgs::HiggsTuple;
use crate::hm::OnePS;
use crate::linalg::{hyperbolic_basis, Field, Gauss, Matrix, Rational, SplitForm, Subspace};
use crate::weights::Weight;

pub fn small_gauss(rng: &mut impl Rng) -> Gauss {
    let im = if rng.gen_bool(0.2) { rng.gen_range(-1..=1) } else { 0 };
    Gauss::from_ints(rng.gen_range(-3..=3), im)
}

/// A weight in the region `α^j > |β^j|`, `|α| + |β| < 1`; with `strict` the
/// `β^j` are also strictly decreasing.
pub fn random_weight(q: usize, s: usize, strict: bool, rng: &mut impl Rng) -> Weight {
    let h = q / 2;
    loop {
        let mut raw_alpha = Vec::with_capacity(s);
        let mut raw_beta = Vec::with_capacity(s);
        for _ in 0..s {
            // positive half of β^j as decreasing integers
            let mut b: Vec<i64> = Vec::with_capacity(h);
            let mut next = rng.gen_range(0..4) + if strict { h as i64 } else { 0 };
            for _ in 0..h {
                b.push(next);
                let step = if strict { rng.gen_range(1..=2) } else { rng.gen_range(0..=2) };
                next = (next - step).max(0);
            }
            if strict {
                // keep the last entry positive so β_h > β_{q+1-h}
                for (k, x) in b.iter_mut().enumerate() {
                    *x = (*x).max((h - k) as i64);
                }
                for k in (0..h.saturating_sub(1)).rev() {
                    if b[k] <= b[k + 1] {
                        b[k] = b[k + 1] + 1;
                    }
                }
            }
            let pos: i64 = b.iter().sum();
            raw_alpha.push(pos + rng.gen_range(1..=6));
            raw_beta.push(b);
        }
        let total: i64 = raw_alpha
            .iter()
            .zip(&raw_beta)
            .map(|(a, b)| a + b.iter().sum::<i64>())
            .sum();
        let d = total + rng.gen_range(1..=2 * total);
        if raw_alpha.iter().any(|a| 2 * a > d) {
            continue;
        }
        let r = |n: i64| Rational::new(BigInt::from(n), BigInt::from(d));
        let alpha = raw_alpha.iter().map(|&a| r(a)).collect();
        let beta = raw_beta
            .iter()
            .map(|b| {
                let mut full: Vec<Rational> = b.iter().map(|&x| r(x)).collect();
                if q % 2 == 1 {
                    full.push(r(0));
                }
                full.extend(b.iter().rev().map(|&x| r(-x)));
                full
            })
            .collect();
        return Weight::new(alpha, beta);
    }
}

/// Span of the first `k` vectors of a random hyperbolic basis; isotropic for
/// `k ≤ q/2`.
pub fn random_isotropic(q: usize, k: usize, rng: &mut impl Rng) -> Subspace<Gauss> {
    let b = hyperbolic_basis(q, rng.gen_range(1..u64::MAX));
    Subspace::span(q, b[..k].to_vec())
}

pub fn random_subspace(q: usize, dim: usize, rng: &mut impl Rng) -> Subspace<Gauss> {
    Subspace::span(q, (0..dim).map(|_| (0..q).map(|_| small_gauss(rng)).collect()).collect())
}

/// `count` random combinations of the basis of `v`.
pub fn random_rows_in(v: &Subspace<Gauss>, count: usize, rng: &mut impl Rng) -> Matrix<Gauss> {
    let q = v.ambient();
    (0..count)
        .map(|_| {
            let mut row = vec![Gauss::zero(); q];
            for b in v.basis() {
                let c = small_gauss(rng);
                row = crate::linalg::matrix::axpy(&row, &c, b);
            }
            row
        })
        .collect()
}

/// Higgs rows drawn from a mix of regimes so that every verdict occurs:
/// generic rows, rows inside an isotropic subspace, rows inside the
/// orthocomplement of an isotropic flag piece, and rows in a random
/// low-dimensional subspace.
pub fn random_higgs(q: usize, s: usize, fs: &FlagSystem<Gauss>, rng: &mut impl Rng) -> HiggsTuple {
    let count = s - 2;
    let form = SplitForm::new(q);
    let rows = match rng.gen_range(0..5) {
        0 => random_rows_in(&Subspace::full(q), count, rng),
        1 => {
            let k = rng.gen_range(1..=q / 2);
            random_rows_in(&random_isotropic(q, k, rng), count, rng)
        }
        2 => {
            let flag = fs.flags.choose(rng).expect("at least one flag");
            let i = rng.gen_range(1..=q / 2);
            random_rows_in(&form.perp(flag.piece(i)), count, rng)
        }
        3 => {
            let a = fs.flags.choose(rng).expect("at least one flag");
            let b = fs.flags.choose(rng).expect("at least one flag");
            let v = form.perp(&a.piece(1).join(b.piece(1)));
            random_rows_in(&v, count, rng)
        }
        _ => {
            let dim = rng.gen_range(1..=q);
            random_rows_in(&random_subspace(q, dim, rng), count, rng)
        }
    };
    HiggsTuple::new(q, s, rows).expect("rows have the right shape")
}

#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub weight: Weight,
    pub flags: FlagSystem<Gauss>,
    pub higgs: HiggsTuple,
}

pub fn random_instance(q: usize, s: usize, strict: bool, rng: &mut impl Rng) -> RandomInstance {
    let weight = random_weight(q, s, strict, rng);
    let flags = FlagSystem::random(q, s, rng.gen_range(1..u64::MAX));
    let higgs = random_higgs(q, s, &flags, rng);
    RandomInstance { weight, flags, higgs }
}

/// A one-parameter subgroup on a random hyperbolic basis with weights in
/// `[-bound, bound]`.
pub fn random_oneps(q: usize, bound: i64, rng: &mut impl Rng) -> OnePS<Gauss> {
    let mut half: Vec<i64> = (0..q / 2).map(|_| rng.gen_range(0..=bound)).collect();
    half.sort_unstable_by(|a, b| b.cmp(a));
    let mut m = half.clone();
    if q % 2 == 1 {
        m.push(0);
    }
    m.extend(half.iter().rev().map(|x| -x));
    let basis = hyperbolic_basis(q, rng.gen_range(0..u64::MAX));
    OnePS::new(rng.gen_range(-bound..=bound), m, basis).expect("hyperbolic basis with antisymmetric weights")
}

/// The same, from a seed alone.
pub fn seeded_instance(q: usize, s: usize, strict: bool, seed: u64) -> RandomInstance {
    random_instance(q, s, strict, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A random pair `(g, c)`: an isometry of `C^q` over `Q(i)` and a nonzero
/// scalar for the `SO(2)` factor.
pub fn random_group_element(q: usize, rng: &mut impl Rng) -> (Matrix<Gauss>, Gauss) {
    let proper = rng.gen_bool(0.5);
    let g = SplitForm::new(q).random_isometry(rng, proper);
    let mut c = small_gauss(rng);
    while c.is_zero() {
        c = small_gauss(rng);
    }
    (g, c)
}

/// Moves `(A, F)` by a seeded group element: `A ↦ c·g·A`, `F ↦ g·F`.
pub fn act_randomly(a: &HiggsTuple, fs: &FlagSystem<Gauss>, seed: u64) -> (HiggsTuple, FlagSystem<Gauss>) {
    let (g, c) = random_group_element(a.q(), &mut ChaCha8Rng::seed_from_u64(seed));
    (a.act(&g, &c), fs.map(&g))
}
