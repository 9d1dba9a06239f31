use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{max_pardeg_isotropic_in, Certificate, ExactSubspace, HiggsTuple, Tag, Verdict};
use crate::error::Error;
use crate::flags::FlagSystem;
use crate::hm::HmValue;
use crate::linalg::{hyperbolic_basis, Gauss, SplitForm, Subspace};
use crate::weights::{region_membership, Weight};

/// Whether no isotropic subspace contains every row, together with the span of
/// the rows. A subspace of an isotropic subspace is isotropic and the span is
/// the smallest subspace containing the rows, so it suffices to test the span.
pub fn condition1_isotropic_span(a: &HiggsTuple) -> (bool, Subspace<Gauss>) {
    let span = a.span();
    let holds = !SplitForm::new(a.q()).is_isotropic(&span);
    (holds, span)
}

fn check_inputs(a: &HiggsTuple, fs: &FlagSystem<Gauss>, w: &Weight) -> Result<(), Error> {
    if !region_membership(w)?.in_w {
        return Err(Error::OutsideRegion(
            "need α^j > |β^j| for every puncture and |α| + |β| < 1".into(),
        ));
    }
    for (expected, found) in [(w.q, a.q()), (w.q, fs.q()), (w.s, a.s()), (w.s, fs.s())] {
        if expected != found {
            return Err(Error::DimensionMismatch { expected, found });
        }
    }
    Ok(())
}

/// Decides stability of `(A, F)`.
///
/// Unstable when the rows span an isotropic subspace, or when some nonzero
/// isotropic `W ⊆ span(A)^⊥` has positive degree (then `W^⊥` is coisotropic,
/// contains the rows, and has the same degree). Stable when every such `W` has
/// negative degree.
pub fn decide_stability(a: &HiggsTuple, fs: &FlagSystem<Gauss>, w: &Weight) -> Result<Verdict, Error> {
    check_inputs(a, fs, w)?;
    let (holds, span) = condition1_isotropic_span(a);
    if !holds {
        return Ok(Verdict {
            tag: Tag::Unstable,
            certificate: Some(Certificate::IsotropicSpan(span)),
            bounds: None,
        });
    }
    let t = SplitForm::new(w.q).perp(&span);
    let bounds = max_pardeg_isotropic_in(&t, fs, w)?;
    let zero = num_traits::zero();
    let (tag, certificate) = match (&bounds.lower, &bounds.upper) {
        (None, _) => (Tag::Stable, None),
        (Some(lo), _) if *lo > zero => {
            let witness = bounds.witness.as_ref().expect("lower bound has a witness");
            let subspace = witness.perp();
            let pardeg = subspace.pardeg(fs, w)?;
            (
                Tag::Unstable,
                Some(Certificate::PositiveCoisotropic { subspace, pardeg }),
            )
        }
        (_, Some(up)) if *up < zero => (Tag::Stable, None),
        (Some(lo), Some(up)) if *lo == zero && *up == zero => (Tag::StrictlySemistable, None),
        _ => (Tag::Undetermined, None),
    };
    Ok(Verdict {
        tag,
        certificate,
        bounds: Some(bounds),
    })
}

/// Recomputes a certificate from scratch against the instance.
pub fn verify_certificate(
    cert: &Certificate,
    a: &HiggsTuple,
    fs: &FlagSystem<Gauss>,
    w: &Weight,
) -> Result<(), String> {
    match cert {
        Certificate::IsotropicSpan(s) => {
            let e = ExactSubspace::Gaussian(s.clone());
            if !e.is_isotropic() {
                return Err("span is not isotropic".into());
            }
            if !e.contains_rows(a.rows()) {
                return Err("a row lies outside the span".into());
            }
        }
        Certificate::PositiveCoisotropic { subspace, pardeg } => {
            if subspace.dim() == w.q {
                return Err("subspace is the whole space".into());
            }
            if !subspace.is_coisotropic() {
                return Err("subspace is not coisotropic".into());
            }
            if !subspace.contains_rows(a.rows()) {
                return Err("a row lies outside the subspace".into());
            }
            let p = subspace.pardeg(fs, w).map_err(|e| e.to_string())?;
            if p != *pardeg {
                return Err(format!("recomputed degree {p} differs from {pardeg}"));
            }
            if p <= num_traits::zero() {
                return Err(format!("degree {p} is not positive"));
            }
        }
        Certificate::DestabilizingOnePS { oneps, mu } => {
            let total = oneps.hm_total(a, fs, w).map_err(|e| e.to_string())?;
            match total.total {
                HmValue::Finite(m) if m == *mu && m < num_traits::zero() => {}
                other => return Err(format!("recomputed weight {other} does not match {mu} < 0")),
            }
        }
    }
    Ok(())
}

/// Rows containing a basis of `C^q` followed by random rows. Such a tuple is
/// stable for every flag system: the span is everything, so it is not
/// isotropic and its orthocomplement is zero.
pub fn generate_stable_instance(
    q: usize,
    s: usize,
    fs: &FlagSystem<Gauss>,
    w: &Weight,
    seed: u64,
) -> Result<HiggsTuple, Error> {
    if s < q + 2 {
        return Err(Error::Input(format!(
            "need s >= q + 2 to fit a spanning set, got q = {q}, s = {s}"
        )));
    }
    let mut rows = hyperbolic_basis(q, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while rows.len() < s - 2 {
        rows.push(
            (0..q)
                .map(|_| Gauss::from_ints(rng.gen_range(-3..=3), rng.gen_range(-1..=1)))
                .collect(),
        );
    }
    let a = HiggsTuple::new(q, s, rows)?;
    check_inputs(&a, fs, w)?;
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, Field};

    fn g(n: i64) -> Gauss {
        Gauss::from_int(n)
    }

    fn q2() -> Weight {
        Weight::uniform(4, rat(1, 8), vec![rat(1, 16), rat(-1, 16)])
    }

    fn q4() -> Weight {
        Weight::uniform(
            4,
            rat(1, 8),
            vec![rat(1, 16), rat(1, 32), rat(-1, 32), rat(-1, 16)],
        )
    }

    fn tuple(q: usize, rows: Vec<Vec<i64>>) -> HiggsTuple {
        let s = rows.len() + 2;
        HiggsTuple::new(q, s, rows.into_iter().map(|r| r.into_iter().map(g).collect()).collect()).unwrap()
    }

    #[test]
    fn condition1_examples() {
        let (holds, span) = condition1_isotropic_span(&tuple(2, vec![vec![1, 0], vec![1, 0]]));
        assert!(!holds);
        assert_eq!(span, Subspace::coordinate(2, &[0]));
        assert!(condition1_isotropic_span(&tuple(2, vec![vec![1, 0], vec![0, 1]])).0);
        assert!(condition1_isotropic_span(&tuple(2, vec![vec![1, 1], vec![1, 1]])).0);
    }

    #[test]
    fn decide_q2_examples() {
        let fs = FlagSystem::standard(2, 4);
        let v = decide_stability(&tuple(2, vec![vec![1, 0], vec![0, 1]]), &fs, &q2()).unwrap();
        assert_eq!(v.tag, Tag::Stable);

        let a = tuple(2, vec![vec![1, 0], vec![1, 0]]);
        let v = decide_stability(&a, &fs, &q2()).unwrap();
        assert_eq!(v.tag, Tag::Unstable);
        let cert = v.certificate.unwrap();
        assert_eq!(cert, Certificate::IsotropicSpan(Subspace::coordinate(2, &[0])));
        verify_certificate(&cert, &a, &fs, &q2()).unwrap();
    }

    #[test]
    fn decide_q4_positive_coisotropic() {
        let fs = FlagSystem::standard(4, 4);
        let a = tuple(4, vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0]]);
        let v = decide_stability(&a, &fs, &q4()).unwrap();
        assert_eq!(v.tag, Tag::Unstable);
        let cert = v.certificate.unwrap();
        assert_eq!(
            cert,
            Certificate::PositiveCoisotropic {
                subspace: ExactSubspace::Gaussian(Subspace::coordinate(4, &[0, 1, 2])),
                pardeg: rat(1, 4),
            }
        );
        verify_certificate(&cert, &a, &fs, &q4()).unwrap();
    }

    #[test]
    fn outside_region_is_refused() {
        let w = Weight::uniform(4, rat(1, 32), vec![rat(1, 16), rat(-1, 16)]);
        let fs = FlagSystem::standard(2, 4);
        assert!(matches!(
            decide_stability(&tuple(2, vec![vec![1, 0], vec![0, 1]]), &fs, &w),
            Err(Error::OutsideRegion(_))
        ));
    }

    #[test]
    fn bogus_certificates_fail() {
        let fs = FlagSystem::standard(2, 4);
        let a = tuple(2, vec![vec![1, 0], vec![0, 1]]);
        let c = Certificate::IsotropicSpan(Subspace::coordinate(2, &[0]));
        assert!(verify_certificate(&c, &a, &fs, &q2()).is_err());
        let c = Certificate::PositiveCoisotropic {
            subspace: ExactSubspace::Gaussian(Subspace::coordinate(2, &[0])),
            pardeg: rat(1, 4),
        };
        assert!(verify_certificate(&c, &a, &fs, &q2()).is_err());
    }

    #[test]
    fn generated_instances_are_stable() {
        let w = q2();
        let fs = FlagSystem::random(2, 4, 5);
        let a = generate_stable_instance(2, 4, &fs, &w, 0).unwrap();
        assert_eq!(a.rows()[..2], [vec![g(1), g(0)], vec![g(0), g(1)]]);
        assert_eq!(decide_stability(&a, &fs, &w).unwrap().tag, Tag::Stable);
        assert!(generate_stable_instance(3, 4, &fs, &w, 0).is_err());
    }

    #[test]
    fn appending_rows_keeps_condition1() {
        let a = tuple(3, vec![vec![1, 0, 0], vec![0, 1, 0]]);
        assert!(condition1_isotropic_span(&a).0);
        let b = a.with_row(vec![g(0), g(0), g(1)]).unwrap();
        assert!(condition1_isotropic_span(&b).0);
        assert!(b.rows()[0][0].is_one());
    }
}
