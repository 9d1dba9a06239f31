//! Maximizing the parabolic degree over isotropic subspaces of a fixed `T`.
//!
//! For lines this is exact: an isotropic line `⟨w⟩` meets flag `j` first at
//! some position `i_j`, and `pardeg⟨w⟩ = Σ_j β_{i_j}^j`. Conversely any
//! isotropic `w ∈ T ∩ ⋂_j F_{i_j}^j` has degree at least `Σ_j β_{i_j}^j`
//! because `β` is non-increasing. So the maximum over isotropic lines is the
//! maximum of `Σ_j β_{i_j}^j` over position tuples whose intersection still
//! holds a nonzero isotropic vector, which is a finite search.

use std::collections::HashSet;

use num_traits::Zero;

use super::ExactSubspace;
use crate::error::Error;
use crate::flags::{pardeg_unchecked, FlagSystem};
use crate::linalg::{isotropic_vector, Gauss, Rational, SplitForm, Subspace};
use crate::weights::Weight;

/// Largest number of lattice elements generated before giving up on closure.
pub const LATTICE_CAP: usize = 96;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineMax {
    pub value: Rational,
    pub witness: ExactSubspace,
}

/// Bounds on `sup pardeg(W)` over nonzero isotropic `W ⊆ T`. `None` stands for
/// `-∞` (no such `W`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PardegBounds {
    pub lower: Option<Rational>,
    pub witness: Option<ExactSubspace>,
    pub upper: Option<Rational>,
    pub exact: bool,
    pub lattice_capped: bool,
}

fn check(t: &Subspace<Gauss>, fs: &FlagSystem<Gauss>, w: &Weight) -> Result<(), Error> {
    if fs.s() != w.s {
        return Err(Error::DimensionMismatch {
            expected: w.s,
            found: fs.s(),
        });
    }
    for found in [fs.q(), t.ambient()] {
        if found != w.q {
            return Err(Error::DimensionMismatch {
                expected: w.q,
                found,
            });
        }
    }
    Ok(())
}

struct LineSearch<'a> {
    fs: &'a FlagSystem<Gauss>,
    w: &'a Weight,
    form: SplitForm,
    /// `suffix[j] = Σ_{j' ≥ j} β_1^{j'}`
    suffix: Vec<Rational>,
    best: Option<(Rational, Subspace<Gauss>)>,
}

impl LineSearch<'_> {
    fn go(&mut self, j: usize, y: &Subspace<Gauss>, acc: Rational) {
        if let Some((b, _)) = &self.best {
            if &acc + &self.suffix[j] <= *b {
                return;
            }
        }
        if j == self.fs.s() {
            self.best = Some((acc, y.clone()));
            return;
        }
        let flag = &self.fs.flags[j];
        let dims = flag.intersection_dims(y);
        for i in 1..dims.len() {
            if dims[i] == dims[i - 1] {
                continue;
            }
            let yi = if dims[i] == y.dim() {
                y.clone()
            } else {
                y.meet(flag.piece(i))
            };
            if !self.form.has_isotropic_vector(&yi) {
                continue;
            }
            self.go(j + 1, &yi, &acc + &self.w.beta[j][i - 1]);
        }
    }
}

/// Exact maximum of `pardeg` over isotropic lines in `T`, with a witness line,
/// or `None` when `T` contains no nonzero isotropic vector.
pub fn line_oracle(
    t: &Subspace<Gauss>,
    fs: &FlagSystem<Gauss>,
    w: &Weight,
) -> Result<Option<LineMax>, Error> {
    check(t, fs, w)?;
    let form = SplitForm::new(w.q);
    if !form.has_isotropic_vector(t) {
        return Ok(None);
    }
    let mut suffix = vec![Rational::zero(); w.s + 1];
    for j in (0..w.s).rev() {
        suffix[j] = &suffix[j + 1] + &w.beta[j][0];
    }
    let mut search = LineSearch {
        fs,
        w,
        form,
        suffix,
        best: None,
    };
    search.go(0, t, Rational::zero());
    let (value, y) = search
        .best
        .ok_or_else(|| Error::Consistency("isotropic vector exists but no position tuple is feasible".into()))?;
    let v = isotropic_vector(&form, &y)
        .ok_or_else(|| Error::Consistency("feasible slice has no isotropic vector".into()))?;
    let witness = ExactSubspace::from_quad(w.q, vec![v]);
    let actual = witness.pardeg(fs, w)?;
    if actual != value {
        return Err(Error::Consistency(format!(
            "line witness has degree {actual}, search value {value}"
        )));
    }
    Ok(Some(LineMax { value, witness }))
}

/// Meet/join closure of `gens`, stopping once `cap` elements exist. The flag
/// reports whether the cap cut the closure short.
pub(crate) fn lattice_closure(gens: &[Subspace<Gauss>], cap: usize) -> (Vec<Subspace<Gauss>>, bool) {
    let mut seen: HashSet<Subspace<Gauss>> = HashSet::new();
    let mut out = Vec::new();
    for g in gens {
        if seen.insert(g.clone()) {
            out.push(g.clone());
        }
    }
    let mut k = 0;
    while k < out.len() {
        for l in 0..k {
            for c in [out[k].meet(&out[l]), out[k].join(&out[l])] {
                if !seen.contains(&c) {
                    if out.len() >= cap {
                        return (out, true);
                    }
                    seen.insert(c.clone());
                    out.push(c);
                }
            }
        }
        k += 1;
    }
    (out, false)
}

/// Upper bound for `pardeg(W)` over `k`-dimensional `W ⊆ T`, treating each
/// flag separately: the best jump pattern allowed by `dim(W ∩ F_i) ≤
/// min(k, dim(T ∩ F_i))` takes every jump as early as possible.
fn relaxed_bound(t: &Subspace<Gauss>, fs: &FlagSystem<Gauss>, w: &Weight, k: usize) -> Rational {
    let mut total = Rational::zero();
    for (flag, beta) in fs.flags.iter().zip(&w.beta) {
        let dims = flag.intersection_dims(t);
        for i in 1..dims.len() {
            if dims[i].min(k) > dims[i - 1].min(k) {
                total += &beta[i - 1];
            }
        }
    }
    total
}

pub fn max_pardeg_isotropic_in(
    t: &Subspace<Gauss>,
    fs: &FlagSystem<Gauss>,
    w: &Weight,
) -> Result<PardegBounds, Error> {
    let form = SplitForm::new(w.q);
    let Some(line) = line_oracle(t, fs, w)? else {
        return Ok(PardegBounds {
            lower: None,
            witness: None,
            upper: None,
            exact: true,
            lattice_capped: false,
        });
    };
    let kmax = form.max_isotropic_dim(t);
    let mut lower = line.value.clone();
    let mut witness = line.witness;
    let mut upper = line.value;
    let mut capped = false;
    if kmax >= 2 {
        for k in 2..=kmax {
            let b = relaxed_bound(t, fs, w, k);
            if b > upper {
                upper = b;
            }
        }
        if lower < upper {
            let mut gens = vec![t.clone()];
            for flag in &fs.flags {
                for i in 1..w.q {
                    gens.push(t.meet(flag.piece(i)));
                }
            }
            let (members, was_capped) = lattice_closure(&gens, LATTICE_CAP);
            capped = was_capped;
            let mut candidates: Vec<Subspace<Gauss>> = Vec::new();
            for m in &members {
                if m.dim() >= 2 {
                    let r = form.radical(m);
                    if r.dim() >= 2 {
                        candidates.push(r);
                    }
                }
            }
            for c in candidates {
                let p = pardeg_unchecked(&c, fs, w);
                if p > lower {
                    lower = p;
                    witness = ExactSubspace::Gaussian(c);
                }
            }
        }
    }
    Ok(PardegBounds {
        exact: lower == upper,
        lower: Some(lower),
        witness: Some(witness),
        upper: Some(upper),
        lattice_capped: capped,
    })
}
