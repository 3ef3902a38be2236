use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use flagiso::acceptance::{self, CRITERIA};
use flagiso::counting::{brute_force_count, dimension, point_count, poincare_polynomial};
use flagiso::decision::{decide_finite, decide_ind};
use flagiso::derived::{derived_values, mismatches};
use flagiso::linalg::{Field, FormKind, PrimeField, Rationals};
use flagiso::sample::rng;
use flagiso::syntax::{parse_descriptor, parse_order, parse_variety};
use flagiso::witness::bd::{bd_square_check, BdSample};
use flagiso::witness::bundle::{bd_bundle, rebase_bundle, WitnessBundle};
use flagiso::witness::rebase::{random_general_instance, random_isotropic_instance};
use flagiso::{Error, FiniteFlagVariety, FlagDescriptor, LieType};

#[derive(Parser)]
#[command(name = "flagiso", version, about = "Isomorphism tests for (ind-)varieties of generalized flags")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct VarietyArgs {
    /// Lie type: A, B, C or D.
    #[arg(long = "type")]
    lie_type: LieType,
    #[arg(long)]
    ambient: u64,
    /// Comma-separated dimensions, e.g. 1,3.
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<u64>,
}

impl VarietyArgs {
    fn variety(&self) -> flagiso::Result<FiniteFlagVariety> {
        FiniteFlagVariety::new(self.lie_type, self.ambient, self.dims.clone())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two ind-varieties of generalized flags are isomorphic.
    Decide { x: String, y: String },
    /// Decide whether two finite flag varieties, written like "A(1,3; 6)", are isomorphic.
    DecideFinite { x: String, y: String },
    /// Normal form of a weighted order.
    Normalize { order: String },
    /// Dual descriptor.
    Dual { descriptor: String },
    /// Number of F_q-points of a finite flag variety.
    Points {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long)]
        q: u64,
        /// Count by enumerating flags instead of Weyl cosets.
        #[arg(long)]
        brute: bool,
    },
    /// Poincare polynomial of a finite flag variety.
    Poincare {
        #[command(flatten)]
        variety: VarietyArgs,
    },
    /// Dimension of a finite flag variety.
    Dim {
        #[command(flatten)]
        variety: VarietyArgs,
    },
    /// Rank of the Picard group of an ind-variety.
    PicRank { descriptor: String },
    /// Finite flag variety at truncation width n.
    Truncate {
        descriptor: String,
        #[arg(long)]
        n: u64,
    },
    /// Automorphism carrying one compatible basis to another, on a random instance.
    WitnessRebase {
        /// A prime p or Q.
        #[arg(long, default_value = "5")]
        field: String,
        /// gen, orth or symp.
        #[arg(long, default_value = "gen")]
        form: String,
        #[arg(long, default_value_t = 4)]
        ambient: usize,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Commuting square between the odd and even orthogonal grassmannians.
    WitnessBd {
        #[arg(long)]
        n: usize,
        /// A prime p or Q.
        #[arg(long)]
        field: String,
        /// Check every point (finite fields only).
        #[arg(long, conflicts_with = "random")]
        all: bool,
        /// Check this many random points.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the acceptance criteria and compare oracle outputs with the lockfile.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
        #[arg(long, default_value = "derived_values.json")]
        lockfile: PathBuf,
        /// Rewrite the lockfile from the current outputs.
        #[arg(long)]
        update_lockfile: bool,
    },
}

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output {
            text: text.into(),
            json,
            ok: true,
        }
    }
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Resource(_)) => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Lib(e) => {
                let kind = match e {
                    Error::Syntax { .. } => "syntax",
                    Error::Malformed(_) => "malformed",
                    Error::Invalid(_) => "validation",
                    Error::Domain(_) => "domain",
                    Error::BelowThreshold { .. } => "below_threshold",
                    Error::Hypothesis(_) => "hypothesis",
                    Error::Resource(_) => "resource",
                    Error::Linalg(_) => "linalg",
                    Error::IncompatibleBasis { .. } => "incompatible_basis",
                    Error::NotIsotropic { .. } => "not_isotropic",
                };
                let mut v = json!({ "kind": kind, "message": e.to_string() });
                if let Error::Invalid(violations) = e {
                    v["violations"] = json!(violations);
                }
                json!({ "error": v })
            }
            Failure::Usage(m) => json!({ "error": { "kind": "usage", "message": m } }),
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Usage(m) => m.clone(),
        }
    }
}

type Run = Result<Output, Failure>;

fn descriptor(text: &str) -> flagiso::Result<FlagDescriptor> {
    let d = parse_descriptor(text)?;
    d.validate().map_err(Error::Invalid)?;
    Ok(d)
}

fn decide(x: &str, y: &str) -> Run {
    let (a, b) = (descriptor(x)?, descriptor(y)?);
    let swapped = a.to_string() > b.to_string();
    let (l, r) = if swapped { (b, a) } else { (a, b) };
    let res = decide_ind(&l, &r)?;
    Ok(Output::new(
        res.to_string(),
        json!({
            "verdict": res.verdict,
            "reason": res.reason,
            "detail": res.detail,
            "left": l,
            "right": r,
            "swapped": swapped,
        }),
    ))
}

fn decide_finite_cmd(x: &str, y: &str) -> Run {
    let (a, b) = (parse_variety(x)?, parse_variety(y)?);
    let swapped = a.to_string() > b.to_string();
    let (l, r) = if swapped { (b, a) } else { (a, b) };
    let res = decide_finite(&l, &r)?;
    Ok(Output::new(
        res.to_string(),
        json!({
            "verdict": res.verdict,
            "reason": res.reason,
            "detail": res.detail,
            "left": l.to_string(),
            "right": r.to_string(),
            "swapped": swapped,
        }),
    ))
}

fn field_arg(s: &str) -> Result<Option<PrimeField>, Failure> {
    if s.eq_ignore_ascii_case("q") {
        return Ok(None);
    }
    let p: u64 = s
        .parse()
        .map_err(|_| Failure::Usage(format!("field must be a prime or Q, got {s:?}")))?;
    Ok(Some(PrimeField::new(p)?))
}

fn rebase_for<F: Field>(f: &F, form: &str, ambient: usize, dims: &[usize], seed: u64) -> Result<WitnessBundle, Failure> {
    let mut r = rng(seed);
    let inst = match form {
        "gen" => random_general_instance(f, ambient, dims, &mut r)?,
        "orth" => random_isotropic_instance(f, FormKind::Orthogonal, ambient, dims, &mut r)?,
        "symp" => random_isotropic_instance(f, FormKind::Symplectic, ambient, dims, &mut r)?,
        other => return Err(Failure::Usage(format!("form must be gen, orth or symp, got {other:?}"))),
    };
    Ok(rebase_bundle(&inst.chain, &inst.e, &inst.e2, inst.form.as_ref())?)
}

fn bundle_output(b: WitnessBundle) -> Output {
    let text = b
        .transcript
        .iter()
        .map(|c| format!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name))
        .collect::<Vec<_>>()
        .join("\n");
    let ok = b.passed();
    Output {
        text: format!("{} witness over {}\n{text}", b.kind, b.field),
        json: json!(b),
        ok,
    }
}

fn bd_for<F: Field>(f: &F, n: usize, sample: BdSample<F>) -> Output {
    bundle_output(bd_bundle(&bd_square_check(f, n, sample)))
}

fn read_lockfile(path: &PathBuf) -> Result<Option<BTreeMap<String, Value>>, Failure> {
    match std::fs::read_to_string(path) {
        Ok(s) => serde_json::from_str(&s)
            .map(Some)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Failure::Usage(format!("{}: {e}", path.display()))),
    }
}

fn selftest(only: Option<u8>, lockfile: &PathBuf, update: bool) -> Run {
    let reports = match only {
        Some(id) if CRITERIA.iter().any(|c| c.0 == id) => vec![acceptance::run(id)],
        Some(id) => return Err(Failure::Usage(format!("no criterion {id}"))),
        None => acceptance::run_all(),
    };
    let current = derived_values()?;
    let (status, bad) = match read_lockfile(lockfile)? {
        Some(lock) if !update => {
            let bad = mismatches(&current, &lock);
            (if bad.is_empty() { "match" } else { "mismatch" }, bad)
        }
        existing => {
            let body = serde_json::to_string_pretty(&current).expect("json") + "\n";
            std::fs::write(lockfile, body).map_err(|e| Failure::Usage(format!("{}: {e}", lockfile.display())))?;
            (if existing.is_some() { "updated" } else { "created" }, Vec::new())
        }
    };
    let mut lines: Vec<String> = reports.iter().map(|r| r.to_string()).collect();
    lines.push(format!(
        "derived values: {status} ({} values, {})",
        current.len(),
        lockfile.display()
    ));
    for k in &bad {
        lines.push(format!("  differs: {k}"));
    }
    let ok = reports.iter().all(|r| r.passed) && bad.is_empty();
    Ok(Output {
        text: lines.join("\n"),
        json: json!({
            "criteria": reports,
            "derived": { "lockfile": lockfile.display().to_string(), "status": status, "mismatches": bad },
            "passed": ok,
        }),
        ok,
    })
}

fn run(cmd: Command) -> Run {
    match cmd {
        Command::Decide { x, y } => decide(&x, &y),
        Command::DecideFinite { x, y } => decide_finite_cmd(&x, &y),
        Command::Normalize { order } => {
            let o = parse_order(&order)?;
            let n = o.normalize();
            Ok(Output::new(n.to_string(), json!({ "input": o, "normalized": n })))
        }
        Command::Dual { descriptor: d } => {
            let d = descriptor(&d)?;
            let dual = d.dual();
            Ok(Output::new(
                dual.descriptor.to_string(),
                json!({ "descriptor": d, "dual": dual.descriptor, "unchanged_isotropic": dual.unchanged_isotropic }),
            ))
        }
        Command::Points { variety, q, brute } => {
            let v = variety.variety()?;
            let (count, method) = if brute {
                (brute_force_count(&v, q, None)?, "brute")
            } else {
                (point_count(&v, q)?, "weyl")
            };
            Ok(Output::new(
                count.to_string(),
                json!({ "variety": v.to_string(), "q": q, "count": count.to_string(), "method": method }),
            ))
        }
        Command::Poincare { variety } => {
            let v = variety.variety()?;
            let p = poincare_polynomial(&v)?;
            let coeffs: Vec<String> = p.coefficients().iter().map(|c| c.to_string()).collect();
            Ok(Output::new(
                p.to_string(),
                json!({ "variety": v.to_string(), "polynomial": p.to_string(), "coefficients": coeffs }),
            ))
        }
        Command::Dim { variety } => {
            let v = variety.variety()?;
            let d = dimension(&v)?;
            Ok(Output::new(d.to_string(), json!({ "variety": v.to_string(), "dimension": d })))
        }
        Command::PicRank { descriptor: d } => {
            let d = descriptor(&d)?;
            let r = d.pic_rank();
            Ok(Output::new(r.to_string(), json!({ "descriptor": d, "pic_rank": r })))
        }
        Command::Truncate { descriptor: d, n } => {
            let d = descriptor(&d)?;
            let v = d.truncate_to_variety(n)?;
            let n0 = d.threshold()?;
            Ok(Output::new(
                v.to_string(),
                json!({
                    "descriptor": d,
                    "n": n,
                    "n0": n0,
                    "variety": v.to_string(),
                    "lie_type": v.lie_type,
                    "ambient": v.ambient,
                    "dims": v.dims,
                }),
            ))
        }
        Command::WitnessRebase { field, form, ambient, dims, seed } => {
            let b = match field_arg(&field)? {
                Some(f) => rebase_for(&f, &form, ambient, &dims, seed)?,
                None => rebase_for(&Rationals, &form, ambient, &dims, seed)?,
            };
            Ok(bundle_output(b))
        }
        Command::WitnessBd { n, field, all, random, seed } => {
            let f = field_arg(&field)?;
            match (f, all, random) {
                (Some(f), true, _) => Ok(bd_for(&f, n, BdSample::All)),
                (None, true, _) => Err(Failure::Lib(Error::Domain(
                    "--all needs a finite field".into(),
                ))),
                (f, false, count) => {
                    let count = count.unwrap_or(20);
                    Ok(match f {
                        Some(f) => bd_for(&f, n, BdSample::Random { count, seed }),
                        None => bd_for(&Rationals, n, BdSample::Random { count, seed }),
                    })
                }
            }
        }
        Command::Selftest { only, lockfile, update_lockfile } => selftest(only, &lockfile, update_lockfile),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let json_mode = cli.json;
    match run(cli.command) {
        Ok(out) => {
            if json_mode {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(f) => {
            if json_mode {
                println!("{}", serde_json::to_string_pretty(&f.to_json()).expect("json"));
            }
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
