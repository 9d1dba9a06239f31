//! One-parameter subgroups of `SO(2) × SO(q)`, their filtrations, and
//! Hilbert–Mumford weights for the linearization attached to a weight.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::flags::{pardeg_unchecked, FlagSystem, IsotropicFlag};
use crate::higgs::{decide_stability, Certificate, ExactSubspace, HiggsTuple, Tag, Verdict};
use crate::linalg::{isotropic_completion, matrix, Field, Gauss, Matrix, Quad, Rational, SplitForm, Subspace};
use crate::weights::Weight;

/// `λ(t)` acts by `t^ℓ, t^{-ℓ}` on the fixed basis `(u, u') = (e_1, e_2)` of
/// `C^2`, and by `t^{m_i}` on `v_i` in `C^q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnePS<F: Field> {
    pub l: i64,
    pub m: Vec<i64>,
    /// Eigenvectors `v_1, …, v_q` as rows.
    pub basis: Matrix<F>,
}

impl<F: Field> OnePS<F> {
    pub fn new(l: i64, m: Vec<i64>, basis: Matrix<F>) -> Result<Self, Error> {
        let q = m.len();
        if q == 0 || basis.len() != q || basis.iter().any(|v| v.len() != q) {
            return Err(Error::Input(format!("need q = {q} eigenvectors of length {q}")));
        }
        if m.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::Input("weights must be non-increasing".into()));
        }
        if (0..q).any(|i| m[i] + m[q - 1 - i] != 0) {
            return Err(Error::Input("weights must satisfy m_i + m_{q+1-i} = 0".into()));
        }
        if matrix::rank(&basis, q) < q {
            return Err(Error::Input("eigenvectors are linearly dependent".into()));
        }
        let form = SplitForm::new(q);
        for a in 0..q {
            for b in a..q {
                if m[a] + m[b] != 0 && !form.eval(&basis[a], &basis[b]).is_zero() {
                    return Err(Error::Input(format!(
                        "Q(v_{}, v_{}) must vanish since m_{} + m_{} != 0",
                        a + 1,
                        b + 1,
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(OnePS { l, m, basis })
    }

    pub fn trivial(q: usize) -> Self {
        OnePS {
            l: 0,
            m: vec![0; q],
            basis: matrix::identity(q),
        }
    }

    pub fn q(&self) -> usize {
        self.m.len()
    }

    /// `V_n = span{v_i : m_i ≥ n}`
    pub fn v(&self, n: i64) -> Subspace<F> {
        let q = self.q();
        Subspace::span(
            q,
            self.basis
                .iter()
                .zip(&self.m)
                .filter(|(_, &mi)| mi >= n)
                .map(|(v, _)| v.clone())
                .collect(),
        )
    }

    /// `U_n` in `C^2`.
    pub fn u(&self, n: i64) -> Subspace<Gauss> {
        so2_level(self.l, n)
    }

    fn range(&self) -> (i64, i64) {
        let lo = self.m.iter().copied().min().unwrap_or(0).min(-self.l.abs());
        let hi = self.m.iter().copied().max().unwrap_or(0).max(self.l.abs()) + 1;
        (lo, hi)
    }
}

fn so2_level(l: i64, n: i64) -> Subspace<Gauss> {
    let mut idx = Vec::new();
    if l >= n {
        idx.push(0);
    }
    if -l >= n {
        idx.push(1);
    }
    Subspace::coordinate(2, &idx)
}

impl OnePS<Gauss> {
    pub fn lift<G: Field>(&self) -> OnePS<G> {
        OnePS {
            l: self.l,
            m: self.m.clone(),
            basis: matrix::lift_matrix(&self.basis),
        }
    }
}

/// A one-parameter subgroup with eigenvectors over `Q(i)` or an extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactOnePS {
    Gaussian(OnePS<Gauss>),
    Extended(OnePS<Quad>),
}

impl ExactOnePS {
    pub fn l(&self) -> i64 {
        match self {
            ExactOnePS::Gaussian(p) => p.l,
            ExactOnePS::Extended(p) => p.l,
        }
    }

    pub fn m(&self) -> &[i64] {
        match self {
            ExactOnePS::Gaussian(p) => &p.m,
            ExactOnePS::Extended(p) => &p.m,
        }
    }

    pub fn radicand(&self) -> Option<Gauss> {
        match self {
            ExactOnePS::Gaussian(_) => None,
            ExactOnePS::Extended(p) => p.basis.iter().flatten().find_map(|x| x.radicand().cloned()),
        }
    }

    pub fn hm_total(&self, a: &HiggsTuple, fs: &FlagSystem<Gauss>, w: &Weight) -> Result<HmBreakdown, Error> {
        let lin = build_linearization(w);
        match self {
            ExactOnePS::Gaussian(p) => hm_total(p, a, fs, &lin),
            ExactOnePS::Extended(p) => hm_total(p, a, &fs.lift(), &lin),
        }
    }
}

/// Levels `n ↦ (U_n, V_n)` for `lo ≤ n ≤ hi`; below `lo` both are the whole
/// space and above `hi` both are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration<F: Field> {
    pub lo: i64,
    pub hi: i64,
    pub u: Vec<Subspace<Gauss>>,
    pub v: Vec<Subspace<F>>,
}

impl<F: Field> Filtration<F> {
    pub fn u_at(&self, n: i64) -> Subspace<Gauss> {
        let k = (n.clamp(self.lo, self.hi) - self.lo) as usize;
        self.u[k].clone()
    }

    pub fn v_at(&self, n: i64) -> Subspace<F> {
        let k = (n.clamp(self.lo, self.hi) - self.lo) as usize;
        self.v[k].clone()
    }

    /// Values of `n` where `V_n` or `U_n` changes, i.e. the distinct weights.
    pub fn jumps(&self) -> Vec<i64> {
        (self.lo..self.hi)
            .filter(|&n| self.u_at(n) != self.u_at(n + 1) || self.v_at(n) != self.v_at(n + 1))
            .collect()
    }
}

pub fn filtration_of<F: Field>(lambda: &OnePS<F>) -> Filtration<F> {
    let (lo, hi) = lambda.range();
    Filtration {
        lo,
        hi,
        u: (lo..=hi).map(|n| lambda.u(n)).collect(),
        v: (lo..=hi).map(|n| lambda.v(n)).collect(),
    }
}

/// Integer data of the linearization: `N` clears every denominator,
/// `a^j = 2Nα^j`, `b_i^j = N(β_i^j - β_{i+1}^j)`, `ξ^j = (-Nα^j, Nα^j)`,
/// `ζ^j = -Nβ^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linearization {
    pub n: BigInt,
    pub a: Vec<BigInt>,
    pub b: Vec<Vec<BigInt>>,
    pub xi: Vec<[BigInt; 2]>,
    pub zeta: Vec<Vec<BigInt>>,
}

impl Linearization {
    pub fn xi_norm(&self) -> BigInt {
        self.xi.iter().map(|x| &x[0] + &x[1]).sum()
    }

    pub fn zeta_norm(&self) -> BigInt {
        self.zeta.iter().flatten().sum()
    }

    /// `N·|α|`
    pub fn n_abs_alpha(&self) -> BigInt {
        self.xi.iter().map(|x| x[1].clone()).sum()
    }
}

pub fn build_linearization(w: &Weight) -> Linearization {
    let n = w
        .alpha
        .iter()
        .chain(w.beta.iter().flatten())
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let nr = Rational::from_integer(n.clone());
    let int = |r: Rational| -> BigInt {
        debug_assert!(r.is_integer());
        r.to_integer()
    };
    let a = w.alpha.iter().map(|x| int(x * &nr * BigInt::from(2))).collect();
    let b = w
        .beta
        .iter()
        .map(|bj| bj.windows(2).map(|p| int((&p[0] - &p[1]) * &nr)).collect())
        .collect();
    let xi = w
        .alpha
        .iter()
        .map(|x| {
            let v = int(x * &nr);
            [-v.clone(), v]
        })
        .collect();
    let zeta = w
        .beta
        .iter()
        .map(|bj| bj.iter().map(|x| int(-(x * &nr))).collect())
        .collect();
    Linearization { n, a, b, xi, zeta }
}

/// Both sides of the Grassmannian weight computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannianWeight {
    pub filtration_form: BigInt,
    pub plucker_form: BigInt,
}

/// `μ(λ, F)` for the point `F ∈ Gr_i(C^p)` and the bundle `O_i(2m)`, where
/// `λ` acts with weights `weights` on the rows of `basis`. Computed from the
/// filtration sum and from the Plücker coordinates; the two must agree.
pub fn hm_grassmannian<F: Field>(
    weights: &[i64],
    basis: &[Vec<F>],
    f: &Subspace<F>,
    i: usize,
    m: i64,
) -> Result<BigInt, Error> {
    let g = hm_grassmannian_both(weights, basis, f, i, m)?;
    if g.filtration_form != g.plucker_form {
        return Err(Error::Consistency(format!(
            "Grassmannian weight {} (filtration) vs {} (Plücker)",
            g.filtration_form, g.plucker_form
        )));
    }
    Ok(g.filtration_form)
}

pub fn hm_grassmannian_both<F: Field>(
    weights: &[i64],
    basis: &[Vec<F>],
    f: &Subspace<F>,
    i: usize,
    m: i64,
) -> Result<GrassmannianWeight, Error> {
    let p = weights.len();
    if f.dim() != i {
        return Err(Error::Input(format!("subspace has dimension {}, expected {i}", f.dim())));
    }
    if f.ambient() != p || basis.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: f.ambient(),
        });
    }
    let level = |n: i64| -> Subspace<F> {
        Subspace::span(
            p,
            basis
                .iter()
                .zip(weights)
                .filter(|(_, &w)| w >= n)
                .map(|(v, _)| v.clone())
                .collect(),
        )
    };
    let (lo, hi) = (
        weights.iter().copied().min().unwrap_or(0),
        weights.iter().copied().max().unwrap_or(0),
    );
    let (pb, ib, mb) = (BigInt::from(p), BigInt::from(i), BigInt::from(m));
    // terms with n ≤ min weight vanish: U_n is everything and meets F in F
    let mut sum = BigInt::zero();
    for n in (lo + 1)..=hi {
        let un = level(n);
        let d = un.dim();
        let dm = un.meet(f).dim();
        sum += &ib * BigInt::from(d) - &pb * BigInt::from(dm);
    }
    let numer = BigInt::from(2) * &mb * sum;
    let (filtration_form, rem) = numer.div_rem(&pb);
    if !rem.is_zero() {
        return Err(Error::Consistency("filtration sum is not divisible by p".into()));
    }
    // sort weights descending alongside their vectors for m_1 ≥ … ≥ m_p
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| weights[y].cmp(&weights[x]));
    let ms: Vec<i64> = order.iter().map(|&k| weights[k]).collect();
    let mut inner = -&ib * BigInt::from(ms[p - 1]);
    for k in 0..p - 1 {
        let d = f.meet(&level(ms[k])).dim();
        inner += BigInt::from(d) * BigInt::from(ms[k + 1] - ms[k]);
    }
    Ok(GrassmannianWeight {
        filtration_form,
        plucker_form: BigInt::from(2) * mb * inner,
    })
}

/// One summand of the flag weight at level `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagSummand {
    pub n: i64,
    /// `-‖ξ‖ dim U_n`
    pub xi_norm_term: BigInt,
    /// `-2 |ξ(U_n ∩ •)|`
    pub xi_term: BigInt,
    /// `-(2/q) ‖ζ‖ dim V_n`
    pub zeta_norm_term: Rational,
    /// `-2 |ζ(V_n ∩ F)|`
    pub zeta_term: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagTotal {
    pub total: BigInt,
    pub summands: Vec<FlagSummand>,
}

/// `|ξ(U ∩ •)|` for the fixed flag `0 ⊂ ⟨e_1⟩ ⊂ C^2` at every puncture.
fn xi_score(u: &Subspace<Gauss>, lin: &Linearization) -> BigInt {
    let bullet: IsotropicFlag<Gauss> = IsotropicFlag::standard(2);
    let dims = bullet.intersection_dims(u);
    lin.xi
        .iter()
        .map(|x| {
            (0..2)
                .map(|i| &x[i] * BigInt::from(dims[i] as i64 - dims[i + 1] as i64))
                .sum::<BigInt>()
        })
        .sum()
}

/// `|ζ(V ∩ F)| = Σ_j Σ_i ζ_i^j (dim(V ∩ F_{i-1}^j) - dim(V ∩ F_i^j))`
fn zeta_score<F: Field>(v: &Subspace<F>, fs: &FlagSystem<F>, lin: &Linearization) -> BigInt {
    let mut total = BigInt::zero();
    for (flag, z) in fs.flags.iter().zip(&lin.zeta) {
        let dims = flag.intersection_dims(v);
        for (i, zi) in z.iter().enumerate() {
            if dims[i + 1] > dims[i] {
                total -= zi;
            }
        }
    }
    total
}

fn so2_flag_part(l: i64, lin: &Linearization) -> BigInt {
    let (lo, hi) = (-l.abs(), l.abs() + 1);
    ((lo + 1)..hi)
        .map(|n| {
            let u = so2_level(l, n);
            -lin.xi_norm() * BigInt::from(u.dim()) - BigInt::from(2) * xi_score(&u, lin)
        })
        .sum()
}

fn soq_flag_part_for_levels<F: Field>(
    levels: impl Iterator<Item = Subspace<F>>,
    fs: &FlagSystem<F>,
    lin: &Linearization,
) -> BigInt {
    levels
        .map(|v| {
            debug_assert!(lin.zeta_norm().is_zero());
            -BigInt::from(2) * zeta_score(&v, fs, lin)
        })
        .sum()
}

/// The flag part of the weight, summed over the levels where it can be
/// nonzero, with each summand kept for audit. Also recomputed as a sum of
/// Grassmannian weights over all flag pieces; a mismatch is a fault.
pub fn hm_flag_total<F: Field>(
    lambda: &OnePS<F>,
    fs: &FlagSystem<F>,
    lin: &Linearization,
) -> Result<FlagTotal, Error> {
    let q = lambda.q();
    if fs.q() != q || lin.zeta.len() != fs.s() {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: fs.q(),
        });
    }
    let (lo, hi) = lambda.range();
    let qb = BigInt::from(q);
    let mut summands = Vec::new();
    let mut total = Rational::zero();
    for n in (lo + 1)..hi {
        let u = lambda.u(n);
        let v = lambda.v(n);
        let s = FlagSummand {
            n,
            xi_norm_term: -lin.xi_norm() * BigInt::from(u.dim()),
            xi_term: -BigInt::from(2) * xi_score(&u, lin),
            zeta_norm_term: Rational::new(-BigInt::from(2) * lin.zeta_norm() * BigInt::from(v.dim()), qb.clone()),
            zeta_term: -BigInt::from(2) * zeta_score(&v, fs, lin),
        };
        total += Rational::from_integer(&s.xi_norm_term + &s.xi_term + &s.zeta_term) + &s.zeta_norm_term;
        summands.push(s);
    }
    if !total.is_integer() {
        return Err(Error::Consistency(format!("flag weight {total} is not an integer")));
    }
    let total = total.to_integer();

    let so2_basis: Matrix<F> = matrix::identity(2);
    let so2_weights = [lambda.l, -lambda.l];
    let u1 = Subspace::<F>::coordinate(2, &[0]);
    let mut grass = BigInt::zero();
    for (j, flag) in fs.flags.iter().enumerate() {
        let aj = i64::try_from(&lin.a[j]).map_err(|_| Error::Input("linearization too large".into()))?;
        grass += hm_grassmannian(&so2_weights, &so2_basis, &u1, 1, aj)?;
        for i in 1..q {
            let bij = i64::try_from(&lin.b[j][i - 1]).map_err(|_| Error::Input("linearization too large".into()))?;
            if bij != 0 {
                grass += hm_grassmannian(&lambda.m, &lambda.basis, flag.piece(i), i, bij)?;
            }
        }
    }
    if grass != total {
        return Err(Error::Consistency(format!(
            "flag weight {total} disagrees with the sum of Grassmannian weights {grass}"
        )));
    }
    Ok(FlagTotal { total, summands })
}

/// A weight that may be `+∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HmValue {
    Finite(BigInt),
    Infinite,
}

impl HmValue {
    pub fn add(&self, rhs: &HmValue) -> HmValue {
        match (self, rhs) {
            (HmValue::Finite(a), HmValue::Finite(b)) => HmValue::Finite(a + b),
            _ => HmValue::Infinite,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, HmValue::Finite(x) if x.is_negative())
    }
}

impl fmt::Display for HmValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HmValue::Finite(x) => write!(f, "{x}"),
            HmValue::Infinite => write!(f, "+inf"),
        }
    }
}

/// `0` when the rows land in `V_n` whenever `u ∈ U_n`, i.e. in `V_ℓ`; `+∞`
/// otherwise.
pub fn hm_base<F: Field>(lambda: &OnePS<F>, a: &HiggsTuple) -> HmValue {
    let target = lambda.v(lambda.l);
    let ok = a
        .rows()
        .iter()
        .all(|r| target.contains(&r.iter().map(F::from_gauss).collect::<Vec<_>>()));
    if ok {
        HmValue::Finite(BigInt::zero())
    } else {
        HmValue::Infinite
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HmBreakdown {
    pub base: HmValue,
    pub flag: FlagTotal,
    pub total: HmValue,
}

pub fn hm_total<F: Field>(
    lambda: &OnePS<F>,
    a: &HiggsTuple,
    fs: &FlagSystem<F>,
    lin: &Linearization,
) -> Result<HmBreakdown, Error> {
    if a.q() != lambda.q() {
        return Err(Error::DimensionMismatch {
            expected: lambda.q(),
            found: a.q(),
        });
    }
    let base = hm_base(lambda, a);
    let flag = hm_flag_total(lambda, fs, lin)?;
    let total = base.add(&HmValue::Finite(flag.total.clone()));
    Ok(HmBreakdown { base, flag, total })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `V'` isotropic: weight 1 on `V'` and on `u`.
    Isotropic,
    /// `V'` coisotropic: weight 1 on `V'^⊥`, trivial on `C^2`.
    Coisotropic,
}

/// The eigenbasis `v_1..v_k, middle, y_k..y_1` for an isotropic basis `v`,
/// with `Q(v_a, y_b) = δ_ab`.
fn adapted_basis<F: Field>(form: &SplitForm, isotropic: &[Vec<F>]) -> Matrix<F> {
    let (duals, middle) = isotropic_completion(form, isotropic);
    let mut basis = isotropic.to_vec();
    basis.extend(middle);
    basis.extend(duals.into_iter().rev());
    basis
}

/// The one-parameter subgroup with weights `(a^{k1}, b^{k2-k1}, 0, …, -b, -a)`
/// adapted to the isotropic basis `iso` whose first `k1` vectors carry `a`.
fn chain_oneps<F: Field>(q: usize, l: i64, iso: &[Vec<F>], k1: usize, a: i64, b: i64) -> OnePS<F> {
    let form = SplitForm::new(q);
    let basis = adapted_basis(&form, iso);
    let k = iso.len();
    let mut m = vec![0; q];
    for i in 0..k {
        let wt = if i < k1 { a } else { b };
        m[i] = wt;
        m[q - 1 - i] = -wt;
    }
    OnePS { l, m, basis }
}

/// The destabilizing subgroup attached to `V'` and the closed form of its
/// weight: `-4N(|α| + pardeg V')` for isotropic `V'`, `-4N pardeg V'` for
/// coisotropic `V'`.
pub fn destabilizing_oneps<F: Field>(
    shape: Shape,
    v: &Subspace<F>,
    fs: &FlagSystem<F>,
    w: &Weight,
) -> Result<(OnePS<F>, BigInt), Error> {
    let q = w.q;
    if v.ambient() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: v.ambient(),
        });
    }
    let form = SplitForm::new(q);
    let lin = build_linearization(w);
    let pardeg = pardeg_unchecked(v, fs, w);
    let n = Rational::from_integer(lin.n.clone());
    let four = Rational::from_integer(BigInt::from(4));
    let (iso, l, predicted) = match shape {
        Shape::Isotropic => {
            if !form.is_isotropic(v) {
                return Err(Error::Input("shape needs an isotropic subspace".into()));
            }
            let abs_alpha: Rational = w.alpha.iter().sum();
            (v.clone(), 1, -(four * n * (abs_alpha + pardeg)))
        }
        Shape::Coisotropic => {
            if !form.is_coisotropic(v) {
                return Err(Error::Input("shape needs a coisotropic subspace".into()));
            }
            (form.perp(v), 0, -(four * n * pardeg))
        }
    };
    let k = iso.dim();
    let lambda = chain_oneps(q, l, iso.basis(), k, 1, 1);
    debug_assert!(predicted.is_integer());
    Ok((lambda, predicted.to_integer()))
}

/// Result of the bounded search for a destabilizing subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub found: Option<(OnePS<Gauss>, BigInt)>,
    pub candidates: usize,
    pub evaluated: usize,
}

/// Isotropic subspaces reachable from `S`, `S^⊥` and the flag pieces by one
/// round of meets and joins followed by taking radicals.
fn isotropic_candidates(a: &HiggsTuple, fs: &FlagSystem<Gauss>) -> Vec<Subspace<Gauss>> {
    let q = a.q();
    let form = SplitForm::new(q);
    let s = a.span();
    let mut gens = vec![s.clone(), form.perp(&s)];
    for flag in &fs.flags {
        for i in 1..q {
            gens.push(flag.piece(i).clone());
        }
    }
    let mut seen = HashSet::new();
    let mut members = Vec::new();
    let mut push = |x: Subspace<Gauss>, members: &mut Vec<Subspace<Gauss>>| {
        if seen.insert(x.clone()) {
            members.push(x);
        }
    };
    for g in &gens {
        push(g.clone(), &mut members);
    }
    for x in 0..gens.len() {
        for y in 0..x {
            push(gens[x].meet(&gens[y]), &mut members);
            push(gens[x].join(&gens[y]), &mut members);
        }
    }
    let mut out = vec![Subspace::zero(q)];
    let mut iso_seen: HashSet<Subspace<Gauss>> = out.iter().cloned().collect();
    for mbr in &members {
        let r = form.radical(mbr);
        if iso_seen.insert(r.clone()) {
            out.push(r);
        }
    }
    out.sort_by_key(Subspace::dim);
    out
}

/// Candidate `c` with weight `a`, or with weight `a` on the smaller candidate
/// `inner` and `b` on the rest of `c`, tried for each `ℓ` in `ls`.
type Pattern = (usize, Option<usize>, i64, i64, Vec<i64>);

/// Largest number of subgroup weights evaluated before the search gives up.
pub const SEARCH_CAP: usize = 200_000;

/// Looks for a one-parameter subgroup with finite negative weight among
/// filtrations adapted to chains of at most two candidate isotropic
/// subspaces, with integer weights bounded by `bound`. The two destabilizing
/// shapes are tried before the general patterns; the first hit in this fixed
/// order is returned.
pub fn bounded_destabilizer_search(
    a: &HiggsTuple,
    fs: &FlagSystem<Gauss>,
    w: &Weight,
    bound: i64,
) -> Result<SearchOutcome, Error> {
    let q = a.q();
    let lin = build_linearization(w);
    let cands = isotropic_candidates(a, fs);
    let so2: Vec<(i64, BigInt)> = (-bound..=bound).map(|l| (l, so2_flag_part(l, &lin))).collect();
    let mut evaluated = 0;

    let mut patterns: Vec<Pattern> = Vec::new();
    for (c, _) in cands.iter().enumerate() {
        patterns.push((c, None, 1, 1, vec![1]));
        patterns.push((c, None, 1, 1, vec![0]));
    }
    for (c, _) in cands.iter().enumerate() {
        for wt in 1..=bound {
            patterns.push((c, None, wt, wt, (-bound..=bound).collect()));
        }
    }
    for (c2, big) in cands.iter().enumerate() {
        for (c1, small) in cands.iter().enumerate() {
            if small.is_zero() || small.dim() >= big.dim() || !small.is_subspace_of(big) {
                continue;
            }
            for wa in 2..=bound {
                for wb in 1..wa {
                    patterns.push((c2, Some(c1), wa, wb, (-bound..=bound).collect()));
                }
            }
        }
    }

    let s = a.span();
    for (c, inner, wa, wb, ls) in patterns {
        if evaluated >= SEARCH_CAP {
            break;
        }
        let big = &cands[c];
        let (iso, k1) = match inner {
            None => (big.basis().clone(), big.dim()),
            Some(c1) => {
                let small = &cands[c1];
                let mut e = crate::linalg::subspace::Echelon::from_subspace(small);
                let mut basis = small.basis().clone();
                for v in big.basis() {
                    if e.insert(v) {
                        basis.push(v.clone());
                    }
                }
                (basis, small.dim())
            }
        };
        let lambda = chain_oneps(q, 0, &iso, k1, wa, wb);
        let (lo, hi) = lambda.range();
        let levels: Vec<Subspace<Gauss>> = ((lo + 1)..hi).map(|n| lambda.v(n)).collect();
        let soq = soq_flag_part_for_levels(levels.into_iter(), fs, &lin);
        for l in ls {
            evaluated += 1;
            if !s.is_subspace_of(&lambda.v(l)) {
                continue;
            }
            let so2_part = &so2.iter().find(|(x, _)| *x == l).expect("ℓ in range").1;
            let mu = &soq + so2_part;
            if mu.is_negative() {
                let found = OnePS { l, ..lambda.clone() };
                let check = hm_total(&found, a, fs, &lin)?;
                if check.total != HmValue::Finite(mu.clone()) {
                    return Err(Error::Consistency(format!(
                        "search weight {mu} differs from full evaluation {}",
                        check.total
                    )));
                }
                return Ok(SearchOutcome {
                    found: Some((found, mu)),
                    candidates: cands.len(),
                    evaluated,
                });
            }
        }
    }
    Ok(SearchOutcome {
        found: None,
        candidates: cands.len(),
        evaluated,
    })
}

/// Comparison of the linear-algebraic verdict with the GIT side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub verdict: Verdict,
    /// Subgroup built from the verdict's certificate, with its weight and the
    /// closed-form prediction.
    pub constructed: Option<(ExactOnePS, HmBreakdown, BigInt)>,
    pub search: Option<SearchOutcome>,
    pub consistent: bool,
    pub note: String,
}

fn from_certificate(
    cert: &Certificate,
    a: &HiggsTuple,
    fs: &FlagSystem<Gauss>,
    w: &Weight,
) -> Result<(ExactOnePS, HmBreakdown, BigInt), Error> {
    let lin = build_linearization(w);
    match cert {
        Certificate::IsotropicSpan(s) => {
            let (l, p) = destabilizing_oneps(Shape::Isotropic, s, fs, w)?;
            let t = hm_total(&l, a, fs, &lin)?;
            Ok((ExactOnePS::Gaussian(l), t, p))
        }
        Certificate::PositiveCoisotropic { subspace, .. } => match subspace {
            ExactSubspace::Gaussian(v) => {
                let (l, p) = destabilizing_oneps(Shape::Coisotropic, v, fs, w)?;
                let t = hm_total(&l, a, fs, &lin)?;
                Ok((ExactOnePS::Gaussian(l), t, p))
            }
            ExactSubspace::Extended(v) => {
                let qfs = fs.lift::<Quad>();
                let (l, p) = destabilizing_oneps(Shape::Coisotropic, v, &qfs, w)?;
                let t = hm_total(&l, a, &qfs, &lin)?;
                Ok((ExactOnePS::Extended(l), t, p))
            }
        },
        Certificate::DestabilizingOnePS { oneps, mu } => {
            let t = oneps.hm_total(a, fs, w)?;
            Ok((oneps.clone(), t, mu.clone()))
        }
    }
}

/// Decides the instance, then checks the verdict against Hilbert–Mumford
/// weights: an unstable verdict must yield a subgroup of negative weight
/// matching the closed form, and a (semi)stable verdict must survive the
/// bounded search.
pub fn crosscheck(a: &HiggsTuple, fs: &FlagSystem<Gauss>, w: &Weight, bound: i64) -> Result<CrossCheck, Error> {
    let verdict = decide_stability(a, fs, w)?;
    let mut out = CrossCheck {
        verdict: verdict.clone(),
        constructed: None,
        search: None,
        consistent: true,
        note: String::new(),
    };
    match verdict.tag {
        Tag::Unstable => {
            let cert = verdict.certificate.as_ref().expect("unstable verdict has a certificate");
            let (l, t, predicted) = from_certificate(cert, a, fs, w)?;
            match &t.total {
                HmValue::Finite(mu) if mu.is_negative() && *mu == predicted => {
                    out.note = format!("certificate gives weight {mu}");
                }
                other => {
                    out.consistent = false;
                    out.note = format!("certificate subgroup has weight {other}, predicted {predicted}");
                }
            }
            out.constructed = Some((l, t, predicted));
        }
        Tag::Stable | Tag::StrictlySemistable => {
            let s = bounded_destabilizer_search(a, fs, w, bound)?;
            if let Some((_, mu)) = &s.found {
                out.consistent = false;
                out.note = format!("search found weight {mu} < 0 for a semistable verdict");
            } else {
                out.note = format!("no negative weight among {} subgroups", s.evaluated);
            }
            out.search = Some(s);
        }
        Tag::Undetermined => {
            let s = bounded_destabilizer_search(a, fs, w, bound)?;
            out.note = match &s.found {
                Some((_, mu)) => format!("search found weight {mu}: the instance is unstable"),
                None => format!("no negative weight among {} subgroups", s.evaluated),
            };
            out.search = Some(s);
        }
    }
    Ok(out)
}
