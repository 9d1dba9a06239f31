//! The `(A, F)` model: Higgs rows plus one isotropic flag per puncture, and
//! the stability decision on it.

mod decide;
mod oracle;

pub use decide::{condition1_isotropic_span, decide_stability, generate_stable_instance, verify_certificate};
pub use oracle::{line_oracle, max_pardeg_isotropic_in, LineMax, PardegBounds};

use num_bigint::BigInt;

use crate::error::Error;
use crate::flags::{pardeg_subspace, FlagSystem};
use crate::hm::ExactOnePS;
use crate::linalg::{matrix, Field, Gauss, Matrix, Quad, Rational, SplitForm, Subspace};
use crate::weights::Weight;

/// The rows `A_1, …, A_{s-2}`, each read as a vector of `C^q` in the split
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiggsTuple {
    q: usize,
    s: usize,
    rows: Matrix<Gauss>,
}

impl HiggsTuple {
    pub fn new(q: usize, s: usize, rows: Matrix<Gauss>) -> Result<Self, Error> {
        if s < 3 {
            return Err(Error::Input(format!("need s >= 3 punctures, got {s}")));
        }
        if rows.len() != s - 2 {
            return Err(Error::Input(format!(
                "expected {} rows for s = {s}, got {}",
                s - 2,
                rows.len()
            )));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != q) {
            return Err(Error::Ragged {
                row: i,
                found: r.len(),
                expected: q,
            });
        }
        Ok(HiggsTuple { q, s, rows })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn rows(&self) -> &Matrix<Gauss> {
        &self.rows
    }

    pub fn span(&self) -> Subspace<Gauss> {
        Subspace::span(self.q, self.rows.clone())
    }

    /// The tuple with one more row (and one more puncture).
    pub fn with_row(&self, row: Vec<Gauss>) -> Result<Self, Error> {
        let mut rows = self.rows.clone();
        rows.push(row);
        HiggsTuple::new(self.q, self.s + 1, rows)
    }

    /// Action of `(c, g)` with `c` the scalar of the `SO(2)` factor on the
    /// distinguished line and `g` an isometry of `C^q`: `A_i ↦ c·g·A_i`.
    pub fn act(&self, g: &[Vec<Gauss>], c: &Gauss) -> Self {
        HiggsTuple {
            q: self.q,
            s: self.s,
            rows: self
                .rows
                .iter()
                .map(|r| matrix::scale(&matrix::mat_vec(g, r), c))
                .collect(),
        }
    }
}

/// A subspace whose basis lives in `Q(i)` or in one quadratic extension of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactSubspace {
    Gaussian(Subspace<Gauss>),
    Extended(Subspace<Quad>),
}

impl ExactSubspace {
    /// Span of vectors over the extension, lowered to `Q(i)` when possible.
    pub fn from_quad(ambient: usize, vectors: Matrix<Quad>) -> Self {
        let s = Subspace::span(ambient, vectors);
        let lowered: Option<Matrix<Gauss>> = s
            .basis()
            .iter()
            .map(|v| v.iter().map(Quad::lower).collect())
            .collect();
        match lowered {
            Some(b) => ExactSubspace::Gaussian(Subspace::span(ambient, b)),
            None => ExactSubspace::Extended(s),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ExactSubspace::Gaussian(s) => s.dim(),
            ExactSubspace::Extended(s) => s.dim(),
        }
    }

    pub fn ambient(&self) -> usize {
        match self {
            ExactSubspace::Gaussian(s) => s.ambient(),
            ExactSubspace::Extended(s) => s.ambient(),
        }
    }

    pub fn radicand(&self) -> Option<Gauss> {
        match self {
            ExactSubspace::Gaussian(_) => None,
            ExactSubspace::Extended(s) => s
                .basis()
                .iter()
                .flatten()
                .find_map(|x| x.radicand().cloned()),
        }
    }

    pub fn as_quad(&self) -> Subspace<Quad> {
        match self {
            ExactSubspace::Gaussian(s) => s.lift(),
            ExactSubspace::Extended(s) => s.clone(),
        }
    }

    pub fn perp(&self) -> Self {
        match self {
            ExactSubspace::Gaussian(s) => {
                ExactSubspace::Gaussian(SplitForm::new(s.ambient()).perp(s))
            }
            ExactSubspace::Extended(s) => {
                ExactSubspace::Extended(SplitForm::new(s.ambient()).perp(s))
            }
        }
    }

    pub fn is_isotropic(&self) -> bool {
        match self {
            ExactSubspace::Gaussian(s) => gram_vanishes(s),
            ExactSubspace::Extended(s) => gram_vanishes(s),
        }
    }

    pub fn is_coisotropic(&self) -> bool {
        self.perp().is_isotropic()
    }

    pub fn contains_rows(&self, rows: &[Vec<Gauss>]) -> bool {
        match self {
            ExactSubspace::Gaussian(s) => rows.iter().all(|r| s.contains(r)),
            ExactSubspace::Extended(s) => rows
                .iter()
                .all(|r| s.contains(&r.iter().map(Quad::from_gauss).collect::<Vec<_>>())),
        }
    }

    pub fn pardeg(&self, fs: &FlagSystem<Gauss>, w: &Weight) -> Result<Rational, Error> {
        match self {
            ExactSubspace::Gaussian(s) => pardeg_subspace(s, fs, w),
            ExactSubspace::Extended(s) => pardeg_subspace(s, &fs.lift(), w),
        }
    }
}

/// Every pair of basis vectors pairs to zero.
fn gram_vanishes<F: Field>(s: &Subspace<F>) -> bool {
    let form = SplitForm::new(s.ambient());
    form.gram(s.basis()).iter().flatten().all(Field::is_zero)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Stable,
    StrictlySemistable,
    Unstable,
    Undetermined,
}

impl Tag {
    pub fn exit_code(self) -> i32 {
        match self {
            Tag::Stable => 0,
            Tag::StrictlySemistable => 1,
            Tag::Unstable => 2,
            Tag::Undetermined => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::Stable => "Stable",
            Tag::StrictlySemistable => "StrictlySemistable",
            Tag::Unstable => "Unstable",
            Tag::Undetermined => "Undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// All rows lie in this isotropic subspace.
    IsotropicSpan(Subspace<Gauss>),
    /// A coisotropic subspace containing all rows with positive degree.
    PositiveCoisotropic { subspace: ExactSubspace, pardeg: Rational },
    /// A one-parameter subgroup with negative Hilbert–Mumford weight.
    DestabilizingOnePS { oneps: ExactOnePS, mu: BigInt },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::IsotropicSpan(_) => "IsotropicSpan",
            Certificate::PositiveCoisotropic { .. } => "PositiveCoisotropic",
            Certificate::DestabilizingOnePS { .. } => "DestabilizingOnePS",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub tag: Tag,
    pub certificate: Option<Certificate>,
    pub bounds: Option<PardegBounds>,
}
