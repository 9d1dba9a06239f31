use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use isoflag_core::batch::{self, BatchOptions};
use isoflag_core::higgs::{decide_stability, generate_stable_instance};
use isoflag_core::hm::{build_linearization, crosscheck, hm_total, ExactOnePS};
use isoflag_core::io::{self, Instance};
use isoflag_core::random::{act_randomly, seeded_instance};
use isoflag_core::weights::{
    compactness_criterion, j_interval, monodromy_and_toledo, region_membership, weight_stats,
    CompactnessCondition,
};
use isoflag_core::Error;

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;

#[derive(Parser)]
#[command(name = "isoflag", version, about = "Exact stability decisions for parabolic SO0(2,q)-Higgs data on the punctured line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance file and report whether it is well formed.
    Validate { file: PathBuf },
    /// Region membership, compactness, degree interval and monodromy of the weight.
    Regions {
        file: PathBuf,
        /// Degree used for the compactness test and the Toledo label; defaults
        /// to the integer in the degree interval, or -1.
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
    },
    /// Decide stability. Exit code 0 stable, 1 strictly semistable, 2 unstable, 3 undetermined.
    Decide {
        file: PathBuf,
        /// Also decide a copy moved by a random group element drawn from this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Hilbert-Mumford weight of a one-parameter subgroup, with every summand.
    Hm {
        file: PathBuf,
        #[arg(long)]
        oneps: PathBuf,
    },
    /// Decide, then check the verdict against Hilbert-Mumford weights.
    Crosscheck {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Print a random instance.
    Gen {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Strictly decreasing β at every puncture.
        #[arg(long)]
        strict: bool,
        /// Rows spanning C^q, which is always stable (needs s >= q + 2).
        #[arg(long)]
        stable: bool,
    },
    /// Crosscheck every *.instance.json in a directory.
    Batch {
        dir: PathBuf,
        /// Worker threads; ISOFLAG_JOBS overrides this.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 3)]
        bound: i64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn emit(text: &str) {
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print(v: &Value) {
    emit(&serde_json::to_string_pretty(v).expect("values serialize"));
}

fn error_json(e: &Error) -> Value {
    match e {
        Error::Parse { pointer, message } => json!({"error": {"pointer": pointer, "message": message}}),
        e => json!({"error": {"message": e.to_string()}}),
    }
}

fn load(path: &Path) -> Result<Instance, Error> {
    io::read_instance(path)
}

fn validate(file: &Path) -> Result<u8, Error> {
    let inst = load(file)?;
    let region = region_membership(&inst.weight)?;
    print(&json!({
        "valid": true,
        "q": inst.weight.q,
        "s": inst.weight.s,
        "in_W": region.in_w,
        "warnings": inst.weight.boundary_warnings(),
    }));
    Ok(0)
}

fn condition_json(c: &Option<CompactnessCondition>) -> Value {
    match c {
        None => Value::Null,
        Some(CompactnessCondition::AlphaAboveBeta1 { puncture }) => {
            json!({"condition": "alpha_above_beta1", "puncture": puncture + 1})
        }
        Some(CompactnessCondition::Spread) => json!({"condition": "spread"}),
        Some(CompactnessCondition::Degree) => json!({"condition": "degree"}),
    }
}

fn regions(file: &Path, degree: Option<i64>) -> Result<u8, Error> {
    let w = load(file)?.weight;
    let region = region_membership(&w)?;
    let stats = weight_stats(&w)?;
    let interval = j_interval(&w)?;
    let d = degree
        .or_else(|| interval.integer.as_ref().and_then(ToPrimitive::to_i64))
        .unwrap_or(-1);
    let compact = compactness_criterion(&w, d)?;
    let mono = monodromy_and_toledo(&w, d)?;
    let r = io::rational_json;
    print(&json!({
        "in_W": region.in_w,
        "in_W_prime": region.in_w_prime,
        "abs_alpha": r(&stats.abs_alpha),
        "abs_beta": r(&stats.abs_beta),
        "abs_beta1": r(&stats.abs_beta1),
        "degree_interval": {
            "lower": r(&interval.lower),
            "upper": r(&interval.upper),
            "integer": interval.integer.as_ref().map_or(Value::Null, io::int_json),
        },
        "degree": d,
        "compactness": {
            "eta_forced_zero": compact.eta_forced_zero,
            "failing": condition_json(&compact.failing),
        },
        "monodromy": {
            "phases": mono.phases.iter().map(|p| p.iter().map(r).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "all_unit_modulus": mono.all_unit_modulus,
        },
        "toledo": r(&mono.toledo),
    }));
    Ok(0)
}

fn decide(file: &Path, seed: Option<u64>) -> Result<u8, Error> {
    let inst = load(file)?;
    let v = decide_stability(&inst.higgs, &inst.flags, &inst.weight)?;
    let mut out = io::verdict_json(&v);
    if let Some(seed) = seed {
        let (a, fs) = act_randomly(&inst.higgs, &inst.flags, seed);
        let moved = decide_stability(&a, &fs, &inst.weight)?;
        out["moved_copy"] = json!({"seed": seed, "verdict": moved.tag.name(), "agrees": moved.tag == v.tag});
    }
    print(&out);
    Ok(v.tag.exit_code() as u8)
}

fn hm(file: &Path, oneps: &Path) -> Result<u8, Error> {
    let inst = load(file)?;
    let p = io::read_oneps(oneps)?;
    let lin = build_linearization(&inst.weight);
    let b = match &p {
        ExactOnePS::Gaussian(l) => hm_total(l, &inst.higgs, &inst.flags, &lin)?,
        ExactOnePS::Extended(l) => hm_total(l, &inst.higgs, &inst.flags.lift(), &lin)?,
    };
    let mut out = io::breakdown_json(&b);
    out["N"] = io::int_json(&lin.n);
    out["destabilizing"] = json!(b.total.is_negative());
    print(&out);
    Ok(0)
}

fn cross(file: &Path, bound: i64) -> Result<u8, Error> {
    let inst = load(file)?;
    let c = crosscheck(&inst.higgs, &inst.flags, &inst.weight, bound)?;
    print(&io::crosscheck_json(&c));
    Ok(if c.consistent { 0 } else { 1 })
}

fn gen(q: usize, s: usize, seed: u64, strict: bool, stable: bool) -> Result<u8, Error> {
    if q < 2 || s < 3 {
        return Err(Error::Input(format!("need q >= 2 and s >= 3, got q = {q}, s = {s}")));
    }
    let r = seeded_instance(q, s, strict, seed);
    let higgs = if stable {
        generate_stable_instance(q, s, &r.flags, &r.weight, seed)?
    } else {
        r.higgs
    };
    let inst = Instance {
        weight: r.weight,
        flags: r.flags,
        higgs,
        seed: Some(seed),
        metadata: None,
    };
    emit(&io::instance_to_string(&inst));
    Ok(0)
}

fn run_batch(dir: &Path, jobs: Option<usize>, bound: i64, csv: Option<&Path>) -> Result<u8, Error> {
    let items = batch::load_dir(dir)?;
    let opts = BatchOptions {
        jobs: batch::resolve_jobs(jobs),
        bound,
    };
    let report = batch::batch_report(&items, &opts)?;
    if let Some(path) = csv {
        batch::write_csv(&report, std::fs::File::create(path)?)?;
    }
    print(&batch::report_json(&report));
    Ok(if report.inconsistencies == 0 { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Regions { file, degree } => regions(file, *degree),
        Command::Decide { file, seed } => decide(file, *seed),
        Command::Hm { file, oneps } => hm(file, oneps),
        Command::Crosscheck { file, bound } => cross(file, *bound),
        Command::Gen { q, s, seed, strict, stable } => gen(*q, *s, *seed, *strict, *stable),
        Command::Batch { dir, jobs, bound, csv } => run_batch(dir, *jobs, *bound, csv.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            print(&error_json(&e));
            eprintln!("isoflag: {e}");
            ExitCode::from(EX_DATAERR)
        }
    }
}
