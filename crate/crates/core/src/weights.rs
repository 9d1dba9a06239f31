//! Parabolic weights `(α^j; β_1^j, …, β_q^j)` per puncture, their admissible
//! regions, and the degree bookkeeping derived from them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::linalg::{rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub q: usize,
    pub s: usize,
    pub alpha: Vec<Rational>,
    pub beta: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightViolation {
    Shape(String),
    Antisymmetry { puncture: usize, i: usize },
    AlphaRange { puncture: usize },
    BetaBound { puncture: usize, i: usize },
    NonIncreasing { puncture: usize, i: usize },
}

impl fmt::Display for WeightViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // indices are reported 1-based to match the usual notation
        match self {
            WeightViolation::Shape(m) => write!(f, "shape: {m}"),
            WeightViolation::Antisymmetry { puncture, i } => {
                write!(f, "β_i^j+β_{{q+1-i}}^j=0 fails at j={}, i={}", puncture + 1, i + 1)
            }
            WeightViolation::AlphaRange { puncture } => {
                write!(f, "α^j ∈ [0,1/2] fails at j={}", puncture + 1)
            }
            WeightViolation::BetaBound { puncture, i } => {
                write!(f, "β_i^j<1/2 fails at j={}, i={}", puncture + 1, i + 1)
            }
            WeightViolation::NonIncreasing { puncture, i } => write!(
                f,
                "β^j non-increasing fails at j={}, i={}",
                puncture + 1,
                i + 1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightStats {
    pub abs_alpha: Rational,
    pub abs_beta: Rational,
    pub abs_beta1: Rational,
    pub abs_beta_per_puncture: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionMembership {
    pub in_w: bool,
    pub in_w_prime: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JInterval {
    pub lower: Rational,
    pub upper: Rational,
    pub integer: Option<BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompactnessCondition {
    /// `α^j > β_1^j` fails at this puncture.
    AlphaAboveBeta1 { puncture: usize },
    /// `|α| - |β_1| < 2` fails.
    Spread,
    /// `2d > -2 + |β_1| - |α|` fails.
    Degree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Compactness {
    pub eta_forced_zero: bool,
    pub failing: Option<CompactnessCondition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monodromy {
    /// Per puncture: `α^j, -α^j, β_1^j, …, β_q^j`, reduced into `(-1/2, 1/2]`.
    pub phases: Vec<Vec<Rational>>,
    pub all_unit_modulus: bool,
    pub toledo: Rational,
}

impl Weight {
    pub fn new(alpha: Vec<Rational>, beta: Vec<Vec<Rational>>) -> Self {
        let s = alpha.len();
        let q = beta.first().map_or(0, Vec::len);
        Weight { q, s, alpha, beta }
    }

    /// The same `(α; β)` at every one of `s` punctures.
    pub fn uniform(s: usize, alpha: Rational, beta: Vec<Rational>) -> Self {
        Weight::new(vec![alpha; s], vec![beta; s])
    }

    pub fn check(&self) -> Result<(), Error> {
        validate_weight(self).map_err(|v| {
            Error::InvalidWeight(
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })
    }

    /// Weights at or beyond the boundary `α^j = 1/2` or `α^j = β_i^j`, where
    /// the correspondence with representations degenerates. Flagged only.
    pub fn boundary_warnings(&self) -> Vec<String> {
        let half = rat(1, 2);
        let mut out = Vec::new();
        for (j, a) in self.alpha.iter().enumerate() {
            if *a == half {
                out.push(format!("α^{} = 1/2", j + 1));
            }
            if let Some(i) = self.beta[j].iter().position(|b| b == a) {
                out.push(format!("α^{} = β_{}^{}", j + 1, i + 1, j + 1));
            }
        }
        out
    }
}

pub fn validate_weight(w: &Weight) -> Result<(), Vec<WeightViolation>> {
    let mut v = Vec::new();
    if w.q < 2 {
        v.push(WeightViolation::Shape(format!("q = {} < 2", w.q)));
    }
    if w.s < 3 {
        v.push(WeightViolation::Shape(format!("s = {} < 3", w.s)));
    }
    if w.alpha.len() != w.s || w.beta.len() != w.s {
        v.push(WeightViolation::Shape(format!(
            "expected {} punctures, got {} α and {} β",
            w.s,
            w.alpha.len(),
            w.beta.len()
        )));
    }
    if let Some(j) = w.beta.iter().position(|b| b.len() != w.q) {
        v.push(WeightViolation::Shape(format!(
            "β at puncture {} has {} entries, expected {}",
            j + 1,
            w.beta[j].len(),
            w.q
        )));
    }
    if !v.is_empty() {
        return Err(v);
    }
    let half = rat(1, 2);
    for j in 0..w.s {
        let a = &w.alpha[j];
        if a.is_negative() || *a > half {
            v.push(WeightViolation::AlphaRange { puncture: j });
        }
        let b = &w.beta[j];
        for i in 0..w.q {
            if !(&b[i] + &b[w.q - 1 - i]).is_zero() && i <= w.q - 1 - i {
                v.push(WeightViolation::Antisymmetry { puncture: j, i });
            }
            if b[i] >= half {
                v.push(WeightViolation::BetaBound { puncture: j, i });
            }
            if i + 1 < w.q && b[i] < b[i + 1] {
                v.push(WeightViolation::NonIncreasing { puncture: j, i });
            }
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

pub fn weight_stats(w: &Weight) -> Result<WeightStats, Error> {
    w.check()?;
    let abs_alpha = w.alpha.iter().sum();
    let abs_beta_per_puncture: Vec<Rational> = w
        .beta
        .iter()
        .map(|b| b.iter().filter(|x| !x.is_negative()).sum())
        .collect();
    let abs_beta = abs_beta_per_puncture.iter().sum();
    let abs_beta1 = w.beta.iter().map(|b| &b[0]).sum();
    Ok(WeightStats {
        abs_alpha,
        abs_beta,
        abs_beta1,
        abs_beta_per_puncture,
    })
}

pub fn region_membership(w: &Weight) -> Result<RegionMembership, Error> {
    let st = weight_stats(w)?;
    let in_w = w
        .alpha
        .iter()
        .zip(&st.abs_beta_per_puncture)
        .all(|(a, b)| a > b)
        && &st.abs_alpha + &st.abs_beta < Rational::one();
    let strict = w.beta.iter().all(|b| b.windows(2).all(|p| p[0] > p[1]));
    Ok(RegionMembership {
        in_w,
        in_w_prime: in_w && strict,
    })
}

/// The open interval `(-1 + (|β_1| - |α|)/2, -|α|)` and the integer it
/// contains, if any (it has length at most 1).
pub fn j_interval(w: &Weight) -> Result<JInterval, Error> {
    let st = weight_stats(w)?;
    let lower = -Rational::one() + (&st.abs_beta1 - &st.abs_alpha) / BigInt::from(2);
    let upper = -st.abs_alpha.clone();
    let candidate: BigInt = lower.floor().to_integer() + 1;
    let integer = (Rational::from_integer(candidate.clone()) < upper).then_some(candidate);
    Ok(JInterval {
        lower,
        upper,
        integer,
    })
}

pub fn compactness_criterion(w: &Weight, d: i64) -> Result<Compactness, Error> {
    let st = weight_stats(w)?;
    let failing = if let Some(j) = (0..w.s).find(|&j| w.alpha[j] <= w.beta[j][0]) {
        Some(CompactnessCondition::AlphaAboveBeta1 { puncture: j })
    } else if &st.abs_alpha - &st.abs_beta1 >= Rational::from_integer(2.into()) {
        Some(CompactnessCondition::Spread)
    } else if Rational::from_integer((2 * d).into())
        <= Rational::from_integer((-2).into()) + &st.abs_beta1 - &st.abs_alpha
    {
        Some(CompactnessCondition::Degree)
    } else {
        None
    };
    Ok(Compactness {
        eta_forced_zero: failing.is_none(),
        failing,
    })
}

/// Reduces a phase modulo 1 into `(-1/2, 1/2]`.
pub fn normalize_phase(x: &Rational) -> Rational {
    // x - ceil(x - 1/2) lands in (-1/2, 1/2]
    x - (x - rat(1, 2)).ceil()
}

pub fn monodromy_and_toledo(w: &Weight, d: i64) -> Result<Monodromy, Error> {
    let st = weight_stats(w)?;
    let phases = (0..w.s)
        .map(|j| {
            let a = &w.alpha[j];
            std::iter::once(a.clone())
                .chain(std::iter::once(-a.clone()))
                .chain(w.beta[j].iter().cloned())
                .map(|x| normalize_phase(&x))
                .collect()
        })
        .collect();
    Ok(Monodromy {
        phases,
        // every eigenvalue is exp(2πi·phase) with a rational phase
        all_unit_modulus: true,
        toledo: Rational::from_integer(d.into()) + st.abs_alpha,
    })
}

/// Decimal rendering rounded half away from zero to `digits` places.
pub fn decimal(x: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10).pow(digits);
    let scaled = x * Rational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r.abs() * 2;
    let mut n = q;
    if &twice >= scaled.denom() {
        n += if x.is_negative() { -1 } else { 1 };
    }
    let neg = n.is_negative();
    let mag = n.abs().to_string();
    let digits = digits as usize;
    let padded = format!("{:0>width$}", mag, width = digits + 1);
    let (int, frac) = padded.split_at(padded.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// `exp(2πi·phase)` rendered as `(re, im)` decimals, for reports only.
pub fn eigenvalue_decimal(phase: &Rational, digits: u32) -> (String, String) {
    let t = phase.to_f64().unwrap_or(0.0) * std::f64::consts::TAU;
    let d = digits as usize;
    (format!("{:.d$}", t.cos()), format!("{:.d$}", t.sin()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2(alpha: Rational, b: Rational) -> Weight {
        Weight::uniform(4, alpha, vec![b.clone(), -b])
    }

    fn q4() -> Weight {
        Weight::uniform(
            4,
            rat(1, 8),
            vec![rat(1, 16), rat(1, 32), rat(-1, 32), rat(-1, 16)],
        )
    }

    #[test]
    fn validation_examples() {
        assert!(validate_weight(&q2(rat(1, 8), rat(1, 16))).is_ok());

        let v = validate_weight(&q2(rat(1, 8), rat(1, 2))).unwrap_err();
        assert!(v.iter().any(|x| matches!(x, WeightViolation::BetaBound { i: 0, .. })));
        assert!(v[0].to_string().contains("β_i^j<1/2"));

        let v = validate_weight(&q2(rat(1, 8), rat(-1, 16))).unwrap_err();
        assert!(v.iter().all(|x| matches!(x, WeightViolation::NonIncreasing { .. })));
        assert!(v[0].to_string().contains("non-increasing"));

        let mut w = q2(rat(1, 8), rat(1, 16));
        w.beta[2][1] = rat(-1, 8);
        assert!(validate_weight(&w)
            .unwrap_err()
            .contains(&WeightViolation::Antisymmetry { puncture: 2, i: 0 }));

        let w = q2(rat(3, 4), rat(1, 16));
        assert!(matches!(
            validate_weight(&w).unwrap_err()[0],
            WeightViolation::AlphaRange { puncture: 0 }
        ));
    }

    #[test]
    fn stats_examples() {
        assert_eq!(weight_stats(&q2(rat(1, 8), rat(1, 16))).unwrap().abs_alpha, rat(1, 2));
        let z = weight_stats(&q2(rat(1, 8), rat(0, 1))).unwrap();
        assert!(z.abs_beta.is_zero() && z.abs_beta1.is_zero());
        let st = weight_stats(&q4()).unwrap();
        assert_eq!(st.abs_beta_per_puncture, vec![rat(3, 32); 4]);
        assert_eq!(st.abs_beta, rat(3, 8));
        assert_eq!(st.abs_beta1, rat(1, 4));
    }

    #[test]
    fn odd_q_middle_entry_counts_once() {
        let w = Weight::uniform(3, rat(1, 4), vec![rat(1, 8), rat(0, 1), rat(-1, 8)]);
        assert_eq!(weight_stats(&w).unwrap().abs_beta, rat(3, 8));
    }

    #[test]
    fn region_examples() {
        let r = region_membership(&q2(rat(1, 8), rat(1, 16))).unwrap();
        assert!(r.in_w && r.in_w_prime);
        let r = region_membership(&q2(rat(1, 32), rat(1, 16))).unwrap();
        assert!(!r.in_w);
        let r = region_membership(&q2(rat(1, 8), rat(0, 1))).unwrap();
        assert!(r.in_w && !r.in_w_prime);
        let r = region_membership(&q2(rat(0, 1), rat(0, 1))).unwrap();
        assert!(!r.in_w);
        let r = region_membership(&q2(rat(1, 4), rat(0, 1))).unwrap();
        assert!(!r.in_w);
    }

    #[test]
    fn j_interval_examples() {
        // |α| = 1/2, |β_1| = 1/4
        let j = j_interval(&q2(rat(1, 8), rat(1, 16))).unwrap();
        assert_eq!((j.lower.clone(), j.upper.clone()), (rat(-9, 8), rat(-1, 2)));
        assert_eq!(j.integer, Some(BigInt::from(-1)));

        let j = j_interval(&q2(rat(0, 1), rat(1, 16))).unwrap();
        assert!(j.lower > rat(-1, 1) && j.integer.is_none());

        let w = Weight::uniform(3, rat(1, 2), vec![rat(0, 1), rat(0, 1)]);
        let j = j_interval(&w).unwrap();
        assert_eq!((j.lower, j.upper, j.integer), (rat(-7, 4), rat(-3, 2), None));
    }

    #[test]
    fn compactness_examples() {
        let w = q2(rat(1, 8), rat(1, 16));
        assert_eq!(
            compactness_criterion(&w, -1).unwrap(),
            Compactness {
                eta_forced_zero: true,
                failing: None
            }
        );
        let c = compactness_criterion(&q2(rat(1, 16), rat(1, 16)), -1).unwrap();
        assert_eq!(
            c.failing,
            Some(CompactnessCondition::AlphaAboveBeta1 { puncture: 0 })
        );
        let c = compactness_criterion(&w, -2).unwrap();
        assert_eq!(c.failing, Some(CompactnessCondition::Degree));
    }

    #[test]
    fn monodromy_examples() {
        let m = monodromy_and_toledo(&q2(rat(1, 8), rat(1, 16)), -1).unwrap();
        assert_eq!(m.phases[0], vec![rat(1, 8), rat(-1, 8), rat(1, 16), rat(-1, 16)]);
        assert!(m.all_unit_modulus);
        assert_eq!(m.toledo, rat(-1, 2));

        let z = monodromy_and_toledo(&q2(rat(0, 1), rat(0, 1)), 0).unwrap();
        assert!(z.toledo.is_zero());
        assert!(z.phases.iter().flatten().all(Zero::is_zero));

        let h = monodromy_and_toledo(&q2(rat(1, 2), rat(0, 1)), 0).unwrap();
        assert_eq!(h.phases[0][..2], [rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn phase_normalization() {
        for (x, y) in [
            (rat(1, 2), rat(1, 2)),
            (rat(-1, 2), rat(1, 2)),
            (rat(3, 4), rat(-1, 4)),
            (rat(-7, 3), rat(-1, 3)),
            (rat(0, 1), rat(0, 1)),
        ] {
            assert_eq!(normalize_phase(&x), y);
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&rat(1, 8), 3), "0.125");
        assert_eq!(decimal(&rat(-1, 2), 2), "-0.50");
        assert_eq!(decimal(&rat(2, 3), 4), "0.6667");
        assert_eq!(decimal(&rat(-7, 4), 0), "-2");
        assert_eq!(decimal(&rat(-1, 1000), 2), "0.00");
        let (re, im) = eigenvalue_decimal(&rat(1, 4), 3);
        assert_eq!((re.as_str(), im.as_str()), ("0.000", "1.000"));
    }
}
