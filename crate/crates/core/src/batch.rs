//! Parallel batch runs over many instances with a deterministic report.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Error;
use crate::higgs::Tag;
use crate::hm::{crosscheck, HmValue};
use crate::io::{self, Instance};

pub const JOBS_ENV: &str = "ISOFLAG_JOBS";

#[derive(Clone, Debug, PartialEq)]
pub struct BatchOptions {
    pub jobs: usize,
    pub bound: i64,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions { jobs: 1, bound: 3 }
    }
}

/// `ISOFLAG_JOBS` wins over the command line; zero or garbage means one worker
/// per core.
pub fn resolve_jobs(flag: Option<usize>) -> usize {
    let env = std::env::var(JOBS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    match env.or(flag) {
        Some(n) if n > 0 => n,
        _ => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub id: String,
    pub q: usize,
    pub s: usize,
    /// Verdict name, or `"Error"` when the instance could not be decided.
    pub verdict: String,
    pub certificate: Option<String>,
    pub pardeg_lower: Option<String>,
    pub pardeg_upper: Option<String>,
    /// Weight of the destabilizing subgroup, from the certificate or the search.
    pub mu: Option<String>,
    pub consistent: bool,
    pub note: String,
    pub wall_ms: f64,
}

impl Record {
    /// Everything except the timing, which is the only nondeterministic field.
    pub fn key(&self) -> Record {
        Record { wall_ms: 0.0, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
    pub counts: BTreeMap<String, usize>,
    pub inconsistencies: usize,
    /// Instances whose degree bounds met, i.e. decided without a gap.
    pub exact_bounds: usize,
    pub wall_ms: f64,
}

fn run_one(id: &str, inst: &Instance, bound: i64) -> Record {
    let start = Instant::now();
    let mut rec = Record {
        id: id.to_string(),
        q: inst.weight.q,
        s: inst.weight.s,
        verdict: "Error".into(),
        certificate: None,
        pardeg_lower: None,
        pardeg_upper: None,
        mu: None,
        consistent: false,
        note: String::new(),
        wall_ms: 0.0,
    };
    match crosscheck(&inst.higgs, &inst.flags, &inst.weight, bound) {
        Ok(c) => {
            rec.verdict = c.verdict.tag.name().into();
            rec.certificate = c.verdict.certificate.as_ref().map(|x| x.kind().to_string());
            if let Some(b) = &c.verdict.bounds {
                rec.pardeg_lower = Some(b.lower.as_ref().map_or("-inf".into(), ToString::to_string));
                rec.pardeg_upper = Some(b.upper.as_ref().map_or("-inf".into(), ToString::to_string));
            }
            rec.mu = match (&c.constructed, &c.search) {
                (Some((_, t, _)), _) => Some(match &t.total {
                    HmValue::Finite(x) => x.to_string(),
                    HmValue::Infinite => "+inf".into(),
                }),
                (None, Some(s)) => s.found.as_ref().map(|(_, mu)| mu.to_string()),
                (None, None) => None,
            };
            rec.consistent = c.consistent;
            rec.note = c.note;
        }
        Err(e) => rec.note = e.to_string(),
    }
    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}

fn bounds_exact(r: &Record) -> bool {
    r.pardeg_lower.is_some() && r.pardeg_lower == r.pardeg_upper
}

/// Crosschecks every instance. Records come back in input order whatever the
/// number of workers.
pub fn batch_report(instances: &[(String, Instance)], opts: &BatchOptions) -> Result<Report, Error> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::Input(format!("cannot start workers: {e}")))?;
    let records: Vec<Record> = pool.install(|| {
        instances
            .par_iter()
            .map(|(id, inst)| run_one(id, inst, opts.bound))
            .collect()
    });
    let mut counts = BTreeMap::new();
    for tag in [Tag::Stable, Tag::StrictlySemistable, Tag::Unstable, Tag::Undetermined] {
        counts.insert(tag.name().to_string(), 0);
    }
    counts.insert("Error".to_string(), 0);
    for r in &records {
        *counts.entry(r.verdict.clone()).or_insert(0) += 1;
    }
    Ok(Report {
        inconsistencies: records.iter().filter(|r| !r.consistent).count(),
        exact_bounds: records.iter().filter(|r| bounds_exact(r)).count(),
        counts,
        records,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// `*.instance.json` files of a directory in file-name order, keyed by the
/// name without that suffix.
pub fn load_dir(dir: &Path) -> Result<Vec<(String, Instance)>, Error> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".instance.json")))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            let id = name.trim_end_matches(".instance.json").to_string();
            let inst = io::read_instance(&p).map_err(|e| match e {
                Error::Parse { pointer, message } => Error::parse(pointer, format!("{}: {message}", p.display())),
                e => e,
            })?;
            Ok((id, inst))
        })
        .collect()
}

pub fn report_json(r: &Report) -> Value {
    let total = r.records.len();
    let undetermined = r.counts.get("Undetermined").copied().unwrap_or(0);
    json!({
        "instances": total,
        "counts": r.counts,
        "inconsistencies": r.inconsistencies,
        "determinacy": {
            "undetermined": undetermined,
            "determined_fraction": if total == 0 { 1.0 } else { 1.0 - undetermined as f64 / total as f64 },
            "exact_bounds": r.exact_bounds,
        },
        "wall_ms": r.wall_ms,
        "records": r.records.iter().map(|x| json!({
            "id": x.id,
            "q": x.q,
            "s": x.s,
            "verdict": x.verdict,
            "certificate": x.certificate,
            "pardeg_lower": x.pardeg_lower,
            "pardeg_upper": x.pardeg_upper,
            "mu": x.mu,
            "consistent": x.consistent,
            "note": x.note,
            "wall_ms": x.wall_ms,
        })).collect::<Vec<_>>(),
    })
}

pub fn write_csv<W: Write>(r: &Report, out: W) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Input(format!("csv: {e}"));
    w.write_record([
        "id", "q", "s", "verdict", "certificate", "pardeg_lower", "pardeg_upper", "mu", "wall_ms",
    ])
    .map_err(csv_err)?;
    for x in &r.records {
        w.write_record([
            x.id.clone(),
            x.q.to_string(),
            x.s.to_string(),
            x.verdict.clone(),
            x.certificate.clone().unwrap_or_default(),
            x.pardeg_lower.clone().unwrap_or_default(),
            x.pardeg_upper.clone().unwrap_or_default(),
            x.mu.clone().unwrap_or_default(),
            format!("{:.3}", x.wall_ms),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
