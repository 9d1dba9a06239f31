//! JSON wire format. Rationals travel as strings (`"-3/8"`, `"5"`, `"0.125"`),
//! never as floats; complex scalars are `{"re": .., "im": ..}` and elements of a
//! quadratic extension are `{"a": .., "b": ..}` meaning `a + b·√d` with `d`
//! given once as `"radicand"`. Parse errors carry a JSON pointer.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::flags::{FlagSystem, IsotropicFlag};
use crate::higgs::{Certificate, ExactSubspace, HiggsTuple, PardegBounds, Verdict};
use crate::hm::{CrossCheck, ExactOnePS, HmBreakdown, HmValue, OnePS, SearchOutcome};
use crate::linalg::{Field, Gauss, Matrix, Quad, Rational, Subspace};
use crate::weights::Weight;

/// Everything needed to decide one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub weight: Weight,
    pub flags: FlagSystem<Gauss>,
    pub higgs: HiggsTuple,
    pub seed: Option<u64>,
    pub metadata: Option<Value>,
}

fn child(ptr: &str, key: impl std::fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{ptr}/{key}")
}

pub fn parse_rational_str(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    let int = |x: &str| -> Result<BigInt, String> {
        let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("malformed rational {s:?}"));
        }
        x.parse::<BigInt>().map_err(|_| format!("malformed rational {s:?}"))
    };
    if let Some((n, d)) = t.split_once('/') {
        let (n, d) = (int(n)?, int(d)?);
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        let whole = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            int(whole)?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("malformed rational {s:?}"));
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let f = Rational::new(frac.parse::<BigInt>().expect("digits"), den);
        let w = Rational::from_integer(whole);
        return Ok(if neg { w - f } else { w + f });
    }
    Ok(Rational::from_integer(int(t)?))
}

fn parse_rational(v: &Value, ptr: &str) -> Result<Rational, Error> {
    match v {
        Value::String(s) => parse_rational_str(s).map_err(|m| Error::parse(ptr, m)),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => Err(Error::parse(
                ptr,
                format!("non-integer number {n}; write rationals as strings like \"3/8\""),
            )),
        },
        _ => Err(Error::parse(ptr, "expected a rational string")),
    }
}

fn parse_int(v: &Value, ptr: &str) -> Result<i64, Error> {
    v.as_i64().ok_or_else(|| Error::parse(ptr, "expected an integer"))
}

fn parse_usize(v: &Value, ptr: &str) -> Result<usize, Error> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(ptr, "expected a non-negative integer"))
}

fn object<'a>(v: &'a Value, ptr: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>, Error> {
    let m = v.as_object().ok_or_else(|| Error::parse(ptr, "expected an object"))?;
    if let Some(k) = m.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::parse(child(ptr, k), "unknown field"));
    }
    Ok(m)
}

fn field<'a>(m: &'a Map<String, Value>, ptr: &str, key: &str) -> Result<&'a Value, Error> {
    m.get(key).ok_or_else(|| Error::parse(ptr, format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, Error> {
    v.as_array().ok_or_else(|| Error::parse(ptr, "expected an array"))
}

pub fn parse_gauss(v: &Value, ptr: &str) -> Result<Gauss, Error> {
    match v {
        Value::Object(_) => {
            let m = object(v, ptr, &["re", "im"])?;
            let part = |k: &str| match m.get(k) {
                Some(x) => parse_rational(x, &child(ptr, k)),
                None => Ok(Rational::zero()),
            };
            Ok(Gauss::new(part("re")?, part("im")?))
        }
        _ => Ok(Gauss::real(parse_rational(v, ptr)?)),
    }
}

fn parse_quad(v: &Value, ptr: &str, d: &Arc<Gauss>) -> Result<Quad, Error> {
    if let Some(m) = v.as_object() {
        if m.contains_key("a") || m.contains_key("b") {
            let m = object(v, ptr, &["a", "b"])?;
            let part = |k: &str| match m.get(k) {
                Some(x) => parse_gauss(x, &child(ptr, k)),
                None => Ok(Gauss::zero()),
            };
            return Ok(Quad::new(part("a")?, part("b")?, d.clone()));
        }
    }
    Ok(Quad::new(parse_gauss(v, ptr)?, Gauss::zero(), d.clone()))
}

fn parse_matrix_with<T>(
    v: &Value,
    ptr: &str,
    cols: usize,
    entry: impl Fn(&Value, &str) -> Result<T, Error>,
) -> Result<Vec<Vec<T>>, Error> {
    array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let rp = child(ptr, i);
            let row = array(row, &rp)?;
            if row.len() != cols {
                return Err(Error::parse(&rp, format!("expected {cols} entries, found {}", row.len())));
            }
            row.iter()
                .enumerate()
                .map(|(k, x)| entry(x, &child(&rp, k)))
                .collect()
        })
        .collect()
}

pub fn parse_matrix(v: &Value, ptr: &str, cols: usize) -> Result<Matrix<Gauss>, Error> {
    parse_matrix_with(v, ptr, cols, parse_gauss)
}

pub fn parse_weight(v: &Value, ptr: &str) -> Result<Weight, Error> {
    let m = object(v, ptr, &["q", "s", "alpha", "beta"])?;
    let q = parse_usize(field(m, ptr, "q")?, &child(ptr, "q"))?;
    let s = parse_usize(field(m, ptr, "s")?, &child(ptr, "s"))?;
    let ap = child(ptr, "alpha");
    let alpha: Vec<Rational> = array(field(m, ptr, "alpha")?, &ap)?
        .iter()
        .enumerate()
        .map(|(j, x)| parse_rational(x, &child(&ap, j)))
        .collect::<Result<_, _>>()?;
    if alpha.len() != s {
        return Err(Error::parse(ap, format!("expected {s} entries, found {}", alpha.len())));
    }
    let bp = child(ptr, "beta");
    let beta = parse_matrix_with(field(m, ptr, "beta")?, &bp, q, parse_rational)?;
    if beta.len() != s {
        return Err(Error::parse(bp, format!("expected {s} rows, found {}", beta.len())));
    }
    let w = Weight { q, s, alpha, beta };
    w.check().map_err(|e| Error::parse(ptr, e.to_string()))?;
    Ok(w)
}

pub fn parse_flags(v: &Value, ptr: &str, q: usize, s: usize) -> Result<FlagSystem<Gauss>, Error> {
    let items = array(v, ptr)?;
    if items.len() != s {
        return Err(Error::parse(ptr, format!("expected {s} flags, found {}", items.len())));
    }
    let flags = items
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let fp = child(ptr, j);
            let basis = parse_matrix(f, &fp, q)?;
            if basis.len() != q {
                return Err(Error::parse(&fp, format!("expected {q} basis vectors, found {}", basis.len())));
            }
            IsotropicFlag::new(basis).map_err(|e| Error::parse(&fp, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    FlagSystem::new(flags).map_err(|e| Error::parse(ptr, e.to_string()))
}

pub fn parse_instance_value(v: &Value) -> Result<Instance, Error> {
    let m = object(v, "", &["weight", "flags", "A", "seed", "metadata"])?;
    let weight = parse_weight(field(m, "", "weight")?, "/weight")?;
    let (q, s) = (weight.q, weight.s);
    let flags = parse_flags(field(m, "", "flags")?, "/flags", q, s)?;
    let rows = parse_matrix(field(m, "", "A")?, "/A", q)?;
    if rows.len() + 2 != s {
        return Err(Error::parse("/A", format!("expected {} rows for s = {s}, found {}", s.saturating_sub(2), rows.len())));
    }
    let higgs = HiggsTuple::new(q, s, rows).map_err(|e| Error::parse("/A", e.to_string()))?;
    let seed = match m.get("seed") {
        Some(x) => Some(x.as_u64().ok_or_else(|| Error::parse("/seed", "expected a non-negative integer"))?),
        None => None,
    };
    Ok(Instance {
        weight,
        flags,
        higgs,
        seed,
        metadata: m.get("metadata").cloned(),
    })
}

fn parse_json(text: &str) -> Result<Value, Error> {
    serde_json::from_str(text).map_err(|e| Error::parse("", format!("invalid JSON: {e}")))
}

pub fn parse_instance(text: &str) -> Result<Instance, Error> {
    parse_instance_value(&parse_json(text)?)
}

pub fn read_instance(path: &Path) -> Result<Instance, Error> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn parse_oneps_value(v: &Value) -> Result<ExactOnePS, Error> {
    let m = object(v, "", &["l", "m", "basis", "radicand"])?;
    let l = parse_int(field(m, "", "l")?, "/l")?;
    let weights: Vec<i64> = array(field(m, "", "m")?, "/m")?
        .iter()
        .enumerate()
        .map(|(i, x)| parse_int(x, &child("/m", i)))
        .collect::<Result<_, _>>()?;
    let q = weights.len();
    let basis = field(m, "", "basis")?;
    let bad = |e: Error| Error::parse("", e.to_string());
    match m.get("radicand") {
        None => {
            let b = parse_matrix(basis, "/basis", q)?;
            OnePS::new(l, weights, b).map(ExactOnePS::Gaussian).map_err(bad)
        }
        Some(d) => {
            let d = Arc::new(parse_gauss(d, "/radicand")?);
            if d.sqrt().is_some() {
                return Err(Error::parse("/radicand", "radicand is a square in Q(i)"));
            }
            let b = parse_matrix_with(basis, "/basis", q, |x, p| parse_quad(x, p, &d))?;
            OnePS::new(l, weights, b).map(ExactOnePS::Extended).map_err(bad)
        }
    }
}

pub fn parse_oneps(text: &str) -> Result<ExactOnePS, Error> {
    parse_oneps_value(&parse_json(text)?)
}

pub fn read_oneps(path: &Path) -> Result<ExactOnePS, Error> {
    parse_oneps(&std::fs::read_to_string(path)?)
}

pub fn rational_json(x: &Rational) -> Value {
    Value::String(x.to_string())
}

/// Integers that fit in `i64` as numbers, larger ones as strings.
pub fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(i) => json!(i),
        None => Value::String(x.to_string()),
    }
}

pub fn gauss_json(x: &Gauss) -> Value {
    if x.im.is_zero() {
        rational_json(&x.re)
    } else {
        json!({"re": rational_json(&x.re), "im": rational_json(&x.im)})
    }
}

fn quad_json(x: &Quad) -> Value {
    if x.b.is_zero() {
        gauss_json(&x.a)
    } else {
        json!({"a": gauss_json(&x.a), "b": gauss_json(&x.b)})
    }
}

pub fn matrix_json(m: &[Vec<Gauss>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(gauss_json).collect())).collect())
}

fn quad_matrix_json(m: &[Vec<Quad>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(quad_json).collect())).collect())
}

pub fn weight_json(w: &Weight) -> Value {
    json!({
        "q": w.q,
        "s": w.s,
        "alpha": w.alpha.iter().map(rational_json).collect::<Vec<_>>(),
        "beta": w.beta.iter().map(|b| b.iter().map(rational_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn flags_json(fs: &FlagSystem<Gauss>) -> Value {
    Value::Array(fs.flags.iter().map(|f| matrix_json(f.basis())).collect())
}

pub fn instance_json(inst: &Instance) -> Value {
    let mut m = Map::new();
    m.insert("weight".into(), weight_json(&inst.weight));
    m.insert("flags".into(), flags_json(&inst.flags));
    m.insert("A".into(), matrix_json(inst.higgs.rows()));
    if let Some(seed) = inst.seed {
        m.insert("seed".into(), json!(seed));
    }
    if let Some(meta) = &inst.metadata {
        m.insert("metadata".into(), meta.clone());
    }
    Value::Object(m)
}

pub fn instance_to_string(inst: &Instance) -> String {
    serde_json::to_string_pretty(&instance_json(inst)).expect("values serialize")
}

/// Re-serialization of a parsed instance.
pub fn canonicalize(text: &str) -> Result<String, Error> {
    Ok(instance_to_string(&parse_instance(text)?))
}

pub fn oneps_json(p: &ExactOnePS) -> Value {
    let mut m = Map::new();
    m.insert("l".into(), json!(p.l()));
    m.insert("m".into(), json!(p.m()));
    match p {
        ExactOnePS::Gaussian(p) => {
            m.insert("basis".into(), matrix_json(&p.basis));
        }
        ExactOnePS::Extended(x) => {
            m.insert("basis".into(), quad_matrix_json(&x.basis));
            if let Some(d) = p.radicand() {
                m.insert("radicand".into(), gauss_json(&d));
            }
        }
    }
    Value::Object(m)
}

pub fn oneps_to_string(p: &ExactOnePS) -> String {
    serde_json::to_string_pretty(&oneps_json(p)).expect("values serialize")
}

fn subspace_json(s: &ExactSubspace) -> Value {
    let mut m = Map::new();
    m.insert("dim".into(), json!(s.dim()));
    match s {
        ExactSubspace::Gaussian(s) => {
            m.insert("basis".into(), matrix_json(s.basis()));
        }
        ExactSubspace::Extended(x) => {
            m.insert("basis".into(), quad_matrix_json(x.basis()));
            if let Some(d) = s.radicand() {
                m.insert("radicand".into(), gauss_json(&d));
            }
        }
    }
    Value::Object(m)
}

fn gauss_subspace_json(s: &Subspace<Gauss>) -> Value {
    subspace_json(&ExactSubspace::Gaussian(s.clone()))
}

pub fn hm_value_json(v: &HmValue) -> Value {
    match v {
        HmValue::Finite(x) => int_json(x),
        HmValue::Infinite => json!("+inf"),
    }
}

pub fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::IsotropicSpan(s) => json!({"kind": c.kind(), "subspace": gauss_subspace_json(s)}),
        Certificate::PositiveCoisotropic { subspace, pardeg } => json!({
            "kind": c.kind(),
            "subspace": subspace_json(subspace),
            "pardeg": rational_json(pardeg),
        }),
        Certificate::DestabilizingOnePS { oneps, mu } => json!({
            "kind": c.kind(),
            "oneps": oneps_json(oneps),
            "mu": int_json(mu),
        }),
    }
}

fn opt_rational(x: &Option<Rational>) -> Value {
    x.as_ref().map_or(Value::Null, rational_json)
}

pub fn bounds_json(b: &PardegBounds) -> Value {
    json!({
        "lower": opt_rational(&b.lower),
        "upper": opt_rational(&b.upper),
        "exact": b.exact,
        "lattice_capped": b.lattice_capped,
    })
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({
        "verdict": v.tag.name(),
        "certificate": v.certificate.as_ref().map_or(Value::Null, certificate_json),
        "pardeg_bounds": v.bounds.as_ref().map_or(Value::Null, bounds_json),
    })
}

pub fn breakdown_json(b: &HmBreakdown) -> Value {
    json!({
        "base": hm_value_json(&b.base),
        "flag": int_json(&b.flag.total),
        "total": hm_value_json(&b.total),
        "summands": b.flag.summands.iter().map(|s| json!({
            "n": s.n,
            "xi_norm_term": int_json(&s.xi_norm_term),
            "xi_term": int_json(&s.xi_term),
            "zeta_norm_term": rational_json(&s.zeta_norm_term),
            "zeta_term": int_json(&s.zeta_term),
        })).collect::<Vec<_>>(),
    })
}

pub fn search_json(s: &SearchOutcome) -> Value {
    json!({
        "found": s.found.as_ref().map_or(Value::Null, |(p, mu)| json!({
            "oneps": oneps_json(&ExactOnePS::Gaussian(p.clone())),
            "mu": int_json(mu),
        })),
        "candidates": s.candidates,
        "evaluated": s.evaluated,
    })
}

pub fn crosscheck_json(c: &CrossCheck) -> Value {
    json!({
        "verdict": verdict_json(&c.verdict),
        "consistent": c.consistent,
        "note": c.note,
        "constructed": c.constructed.as_ref().map_or(Value::Null, |(p, b, predicted)| json!({
            "oneps": oneps_json(p),
            "hm": breakdown_json(b),
            "predicted": int_json(predicted),
        })),
        "search": c.search.as_ref().map_or(Value::Null, search_json),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    const Q2: &str = r#"{
        "weight": {"q": 2, "s": 4, "alpha": ["1/8", "1/8", "1/8", "1/8"],
                   "beta": [["1/16", "-1/16"], ["1/16", "-1/16"], ["1/16", "-1/16"], ["1/16", "-1/16"]]},
        "flags": [[[1, 0], [0, 1]], [[1, 0], [0, 1]], [[1, 0], [0, 1]], [[1, 0], [0, 1]]],
        "A": [["1", "0"], ["0", {"re": "1"}]]
    }"#;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational_str("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational_str("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational_str("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational_str("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational_str("7").unwrap(), rat(7, 1));
        for bad in ["1/0", "", "1/", "a", "1.2.3", "1e3", "--1", "1/-"] {
            assert!(parse_rational_str(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn floats_are_rejected() {
        let e = parse_rational(&json!(0.5), "/x").unwrap_err();
        assert!(matches!(e, Error::Parse { ref pointer, .. } if pointer == "/x"));
    }

    #[test]
    fn instance_round_trip() {
        let inst = parse_instance(Q2).unwrap();
        assert_eq!(inst.weight.alpha[0], rat(1, 8));
        let text = instance_to_string(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert_eq!(canonicalize(&text).unwrap(), text);
    }

    #[test]
    fn errors_point_at_the_culprit() {
        let bad = Q2.replacen("\"1/8\"", "\"1/0\"", 1);
        match parse_instance(&bad).unwrap_err() {
            Error::Parse { pointer, message } => {
                assert_eq!(pointer, "/weight/alpha/0");
                assert!(message.contains("zero denominator"));
            }
            e => panic!("{e}"),
        }
        let bad = Q2.replace("[\"0\", {\"re\": \"1\"}]", "[\"0\"]");
        match parse_instance(&bad).unwrap_err() {
            Error::Parse { pointer, .. } => assert_eq!(pointer, "/A/1"),
            e => panic!("{e}"),
        }
        let bad = Q2.replacen("[[1, 0], [0, 1]]", "[[1, 0], [1, 1]]", 1);
        match parse_instance(&bad).unwrap_err() {
            Error::Parse { pointer, .. } => assert_eq!(pointer, "/flags/0"),
            e => panic!("{e}"),
        }
        let bad = Q2.replace("\"A\"", "\"B\"");
        assert!(matches!(parse_instance(&bad).unwrap_err(), Error::Parse { pointer, .. } if pointer == "/B"));
    }

    #[test]
    fn oneps_round_trip() {
        let text = r#"{"l": 1, "m": [1, -1], "basis": [[1, 0], [0, 1]]}"#;
        let p = parse_oneps(text).unwrap();
        assert_eq!(parse_oneps(&oneps_to_string(&p)).unwrap(), p);

        let text = r#"{"l": 0, "m": [0, 0], "radicand": "2",
            "basis": [[{"a": 1, "b": "1/2"}, 0], [0, 1]]}"#;
        let p = parse_oneps(text).unwrap();
        assert!(matches!(p, ExactOnePS::Extended(_)));
        assert_eq!(p.radicand(), Some(Gauss::from_int(2)));
        assert_eq!(parse_oneps(&oneps_to_string(&p)).unwrap(), p);

        assert!(parse_oneps(r#"{"l": 0, "m": [1, 1], "basis": [[1, 0], [0, 1]]}"#).is_err());
        assert!(parse_oneps(r#"{"l": 0, "m": [0], "basis": [[1]], "radicand": "4"}"#).is_err());
    }
}
