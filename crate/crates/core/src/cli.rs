//! Command-line front end: parse field/modulus/experiment specs,
//! dispatch to the library, and emit deterministic JSON/CSV/text reports.
//!
//! Exit statuses: 0 success, 1 any "violated" verdict (or a hard
//! failure), 2 usage/validation error, 3 undecided or cap errors.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::abgroup::Element;
use crate::analytic::verify_smoothing_claims;
use crate::error::{Error, Result};
use crate::quadfield::{
    enumerate_degree_one_primes, field_invariants, FieldSpec, IdealHNF, PrimeKind,
};
use crate::rayclass::{build_ray_class_group, build_ray_class_group_auto};
use crate::report::{json_to_string, normalize_runtime, report_to_csv, report_to_text};
use crate::sieve::{
    classical_prime_checks, g_lower_bound_checks, lambda_norm_bounds, lambda_table,
    verify_reciprocal_identity, SieveContext,
};
use crate::verify::{
    run_brun_titchmarsh, run_cover_argument, run_degree_one_ideal, run_ideal_count,
    run_kernel_prime, run_three_primes, ExperimentReport, STANDARD_TEST_MATRIX,
};

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(
    name = "rcprod",
    version,
    about = "Ray class groups of quadratic fields: products of small degree-one primes, \
             Selberg sieve tables, smoothing transforms, and theorem-level verification.",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Parallelism degree; overrides RCPROD_THREADS. Default 1.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized sweeps; recorded in the reports.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Classical invariants of a field: discriminant, class numbers,
    /// units, regulator, zeta residue.
    FieldInfo {
        #[arg(long)]
        field: String,
    },
    /// Construct the narrow ray class group H_q(K).
    Rayclass {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
        /// Generator prime norm bound (default: automatic escalation).
        #[arg(long)]
        gen_bound: Option<i128>,
    },
    /// Enumerate degree-one primes coprime to the modulus.
    Primes {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
        #[arg(long)]
        xmax: i128,
        #[arg(long, default_value_t = false)]
        include_ramified: bool,
    },
    /// Selberg sieve table with the exact reciprocal identity and the
    /// λ-norm bounds.
    SieveCheck {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
        /// Sieve level z, as an integer or a fraction a/b.
        #[arg(long)]
        z: String,
        /// Exponent α ∈ [0,1) for the weighted λ-norm bound.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Smoothing-function certificates for the given degree parameter.
    AnalyticCheck {
        #[arg(long)]
        n: u32,
    },
    /// Theorem-level verification experiments.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Every ray class as a product of three degree-one primes.
    ThreePrimes {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
        #[arg(long, default_value_t = 1000)]
        xmax: i128,
    },
    /// Minimal degree-one-smooth ideal per ray class.
    DegreeOneIdeal {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
        #[arg(long, default_value_t = 1000)]
        xmax: i128,
    },
    /// Least kernel prime of each quadratic character.
    KernelPrime {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
    },
    /// Prime counts in a class against the sieve bound.
    BrunTitchmarsh {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
        /// Representative ideal of the target class.
        #[arg(long, default_value = "(1)")]
        class: String,
        #[arg(long, value_delimiter = ',', default_value = "100,1000")]
        xlist: Vec<i128>,
    },
    /// Ideal counts in a class against the main term and error bound.
    IdealCount {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
        #[arg(long, default_value = "(1)")]
        class: String,
        #[arg(long, value_delimiter = ',', default_value = "100,1000")]
        xlist: Vec<i128>,
    },
    /// The pigeonhole covering argument at a fixed radius.
    Cover {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
        #[arg(long, default_value_t = 14)]
        xmax: i128,
    },
    /// Classical prime-power and reciprocal-prime-sum checks over Z.
    ClassicalPrimes {
        #[arg(long, default_value_t = 1_000_000)]
        xmax: u64,
    },
    /// Run every experiment on one field plus a seeded covering sweep.
    All {
        #[arg(long)]
        field: String,
        #[arg(long)]
        modulus: String,
        #[arg(long, default_value_t = 1000)]
        xmax: i128,
        #[arg(long, default_value_t = 24)]
        sweep_runs: u64,
    },
}

/// Either a list of experiment reports (CSV/text flatten per report) or
/// a free-form JSON document.
enum Output {
    Reports(Vec<ExperimentReport>),
    Json(Value),
}

fn parse_field(s: &str) -> Result<FieldSpec> {
    FieldSpec::parse(s)
}

fn parse_pair(field: &str, modulus: &str) -> Result<(FieldSpec, IdealHNF)> {
    let spec = parse_field(field)?;
    let q = IdealHNF::parse(spec, modulus)?;
    Ok((spec, q))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| -> Result<num_bigint::BigInt> {
        t.trim()
            .parse()
            .map_err(|_| Error::Validation(format!("bad rational component: {t:?}")))
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let d = parse_int(b)?;
            if d == num_bigint::BigInt::from(0) {
                return Err(Error::Validation("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(a)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

fn field_info(field: &str) -> Result<Value> {
    let spec = parse_field(field)?;
    let inv = field_invariants(spec)?;
    Ok(json!({
        "field": spec.to_string(),
        "discriminant": inv.disc,
        "degree": inv.n,
        "signature": [inv.r1, inv.r2],
        "class_number": inv.h,
        "narrow_class_number": inv.h_narrow,
        "fundamental_unit": inv.fund_unit.as_ref().map(|u| {
            json!({"a": u.a.to_string(), "b": u.b.to_string(), "norm": inv.fund_unit_norm})
        }),
        "regulator": inv.regulator,
        "roots_of_unity": inv.mu_order,
        "zeta_residue": inv.alpha,
    }))
}

fn rayclass_cmd(field: &str, modulus: &str, gen_bound: Option<i128>) -> Result<Value> {
    let (spec, q) = parse_pair(field, modulus)?;
    let rcg = match gen_bound {
        Some(b) => build_ray_class_group(spec, &q, b)?,
        None => build_ray_class_group_auto(spec, &q)?,
    };
    let mut v = serde_json::to_value(&rcg).map_err(|e| Error::Internal(e.to_string()))?;
    let reps: Vec<Value> = rcg
        .class_reps
        .iter()
        .map(|(e, h)| json!([class_label(e), h.to_string()]))
        .collect();
    v["class_representatives"] = Value::Array(reps);
    Ok(v)
}

fn class_label(e: &Element) -> String {
    let coords: Vec<String> = e.coords.iter().map(|c| c.to_string()).collect();
    format!("[{}]", coords.join(","))
}

fn primes_cmd(field: &str, modulus: &str, xmax: i128, include_ramified: bool) -> Result<Value> {
    let (spec, q) = parse_pair(field, modulus)?;
    let primes = enumerate_degree_one_primes(spec, xmax, &q, include_ramified)?;
    let rows: Vec<Value> = primes
        .iter()
        .map(|pr| {
            json!({
                "p": pr.p,
                "norm": pr.norm(),
                "ideal": pr.hnf.to_string(),
                "kind": match pr.kind {
                    PrimeKind::Split => "split",
                    PrimeKind::Inert => "inert",
                    PrimeKind::Ramified => "ramified",
                },
                "conj": pr.conj,
            })
        })
        .collect();
    Ok(json!({
        "field": spec.to_string(),
        "modulus": q.to_string(),
        "xmax": xmax,
        "count": rows.len(),
        "primes": rows,
    }))
}

fn sieve_check_cmd(field: &str, modulus: &str, z: &str, alpha: Option<&str>) -> Result<Value> {
    let (spec, q) = parse_pair(field, modulus)?;
    let z = parse_rational(z)?;
    let ctx = SieveContext::new(spec, &q, z.clone())?;
    let table = lambda_table(&ctx)?;
    let reciprocal = verify_reciprocal_identity(&ctx)?;
    let lower = g_lower_bound_checks(&ctx)?;
    let lambdas: Vec<Value> = table
        .lambdas
        .iter()
        .map(|(e, l)| json!([e.to_string(), l.to_string()]))
        .collect();
    let mut out = json!({
        "field": spec.to_string(),
        "modulus": q.to_string(),
        "z": z.to_string(),
        "lambdas": lambdas,
        "g_q_z": table.g_q_z.to_string(),
        "reciprocal_identity": reciprocal,
        "g_lower_bounds": serde_json::to_value(&lower)
            .map_err(|e| Error::Internal(e.to_string()))?,
    });
    if let Some(a) = alpha {
        let a = parse_rational(a)?;
        let norms = lambda_norm_bounds(&ctx, &a)?;
        out["lambda_norm_bounds"] =
            serde_json::to_value(&norms).map_err(|e| Error::Internal(e.to_string()))?;
    }
    if !reciprocal {
        out["verdict"] = json!("violated");
    }
    Ok(out)
}

fn analytic_check_cmd(n: u32) -> Result<Value> {
    let report = verify_smoothing_claims(n)?;
    let mut v = serde_json::to_value(&report).map_err(|e| Error::Internal(e.to_string()))?;
    v["verdict"] = json!(if report.all_ok { "holds" } else { "violated" });
    Ok(v)
}

fn classical_primes_report(xmax: u64) -> Result<ExperimentReport> {
    let rep = classical_prime_checks(xmax)?;
    let ok = rep.prime_power_count_ok && rep.reciprocal_prime_sum_ok;
    Ok(ExperimentReport {
        experiment: "classical-primes".into(),
        field: "Q".into(),
        modulus: "(1)".into(),
        params: [("xmax".to_string(), xmax.to_string())].into(),
        per_class: Vec::new(),
        extrema: [
            (
                "prime_power_count_ok".to_string(),
                json!(rep.prime_power_count_ok),
            ),
            (
                "prime_power_worst_ratio".to_string(),
                json!(rep.prime_power_worst_ratio),
            ),
            (
                "reciprocal_prime_sum_ok".to_string(),
                json!(rep.reciprocal_prime_sum_ok),
            ),
            (
                "checked_jump_points".to_string(),
                json!(rep.checked_jump_points),
            ),
        ]
        .into(),
        bound_log: 0.0,
        verdict: if ok { "holds".into() } else { "violated".into() },
        runtime_ms: 0,
    })
}

/// One random covering configuration drawn from the standard matrix.
fn sweep_config(rng: &mut ChaCha8Rng) -> (i64, i128, i128) {
    let d = STANDARD_TEST_MATRIX[rng.gen_range(0..STANDARD_TEST_MATRIX.len())];
    let m = rng.gen_range(1..=20i128);
    let x = rng.gen_range(5..=60i128);
    (d, m, x)
}

/// Seeded sweep of covering-argument runs; asserts eq:8 ⇒ covered on
/// every draw via the per-run verdicts.
fn cover_sweep(seed: u64, runs: u64, threads: usize) -> Result<ExperimentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs: Vec<(i64, i128, i128)> = (0..runs).map(|_| sweep_config(&mut rng)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let results: Vec<Result<ExperimentReport>> = pool.install(|| {
        use rayon::prelude::*;
        configs
            .par_iter()
            .map(|&(d, m, x)| {
                let spec = FieldSpec::quadratic(d)?;
                let q = IdealHNF::from_rational(spec, m)?;
                run_cover_argument(spec, &q, x)
            })
            .collect()
    });
    let mut per_class = Vec::new();
    let mut verdict = "holds".to_string();
    for (cfg, res) in configs.iter().zip(results) {
        let rep = res?;
        if rep.verdict == "violated" {
            verdict = "violated".into();
        }
        per_class.push(
            [
                ("d".to_string(), json!(cfg.0)),
                ("modulus".to_string(), json!(format!("({})", cfg.1))),
                ("x".to_string(), json!(cfg.2)),
                (
                    "eq8_holds".to_string(),
                    rep.extrema.get("eq8_holds").cloned().unwrap_or(json!(false)),
                ),
                (
                    "covered".to_string(),
                    rep.extrema.get("covered").cloned().unwrap_or(json!(false)),
                ),
                ("verdict".to_string(), json!(rep.verdict)),
            ]
            .into(),
        );
    }
    Ok(ExperimentReport {
        experiment: "cover-sweep".into(),
        field: "-".into(),
        modulus: "-".into(),
        params: [
            ("seed".to_string(), seed.to_string()),
            ("runs".to_string(), runs.to_string()),
        ]
        .into(),
        per_class,
        extrema: BTreeMapExt::new(),
        bound_log: 0.0,
        verdict,
        runtime_ms: 0,
    })
}

type BTreeMapExt = std::collections::BTreeMap<String, Value>;

fn verify_cmd(what: &VerifyCmd, seed: u64, threads: usize) -> Result<Output> {
    let one = |r: ExperimentReport| Ok(Output::Reports(vec![r]));
    match what {
        VerifyCmd::ThreePrimes {
            field,
            modulus,
            xmax,
        } => {
            let (spec, q) = parse_pair(field, modulus)?;
            one(run_three_primes(spec, &q, *xmax)?)
        }
        VerifyCmd::DegreeOneIdeal {
            field,
            modulus,
            xmax,
        } => {
            let (spec, q) = parse_pair(field, modulus)?;
            one(run_degree_one_ideal(spec, &q, *xmax)?)
        }
        VerifyCmd::KernelPrime { field, modulus } => {
            let (spec, q) = parse_pair(field, modulus)?;
            one(run_kernel_prime(spec, &q)?)
        }
        VerifyCmd::BrunTitchmarsh {
            field,
            modulus,
            class,
            xlist,
        } => {
            let (spec, q) = parse_pair(field, modulus)?;
            let c = IdealHNF::parse(spec, class)?;
            one(run_brun_titchmarsh(spec, &q, &c, xlist)?)
        }
        VerifyCmd::IdealCount {
            field,
            modulus,
            class,
            xlist,
        } => {
            let (spec, q) = parse_pair(field, modulus)?;
            let c = IdealHNF::parse(spec, class)?;
            one(run_ideal_count(spec, &q, &c, xlist)?)
        }
        VerifyCmd::Cover {
            field,
            modulus,
            xmax,
        } => {
            let (spec, q) = parse_pair(field, modulus)?;
            one(run_cover_argument(spec, &q, *xmax)?)
        }
        VerifyCmd::ClassicalPrimes { xmax } => one(classical_primes_report(*xmax)?),
        VerifyCmd::All {
            field,
            modulus,
            xmax,
            sweep_runs,
        } => {
            let (spec, q) = parse_pair(field, modulus)?;
            let identity = IdealHNF::one(spec);
            let xlist = [100.min(*xmax), *xmax];
            let reports = vec![
                run_three_primes(spec, &q, *xmax)?,
                run_degree_one_ideal(spec, &q, *xmax)?,
                run_kernel_prime(spec, &q)?,
                run_brun_titchmarsh(spec, &q, &identity, &xlist)?,
                run_ideal_count(spec, &q, &identity, &xlist)?,
                run_cover_argument(spec, &q, *xmax)?,
                classical_primes_report(100_000)?,
                cover_sweep(seed, *sweep_runs, threads)?,
            ];
            Ok(Output::Reports(reports))
        }
    }
}

fn generic_csv(v: &Value) -> String {
    let mut out = String::from("key,value\n");
    if let Value::Object(map) = v {
        for (k, item) in map {
            let cell = match item {
                Value::String(s) => s.clone(),
                other => json_to_string(other),
            };
            let quoted = if cell.contains([',', '"', '\n']) {
                format!("\"{}\"", cell.replace('"', "\"\""))
            } else {
                cell
            };
            out.push_str(&format!("{k},{quoted}\n"));
        }
    } else {
        out.push_str(&format!("value,{}\n", json_to_string(v)));
    }
    out
}

fn generic_text(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = v {
        for (k, item) in map {
            let cell = match item {
                Value::String(s) => s.clone(),
                other => json_to_string(other),
            };
            out.push_str(&format!("{k} = {cell}\n"));
        }
    } else {
        out.push_str(&json_to_string(v));
        out.push('\n');
    }
    out
}

fn render(output: &Output, format: Format, seed: u64) -> Result<String> {
    match output {
        Output::Reports(reports) => {
            let mut reports = reports.clone();
            for r in &mut reports {
                normalize_runtime(r);
                r.params.insert("seed".into(), seed.to_string());
            }
            match format {
                Format::Json => {
                    let vals: Vec<Value> = reports
                        .iter()
                        .map(serde_json::to_value)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::Internal(e.to_string()))?;
                    let doc = if vals.len() == 1 {
                        vals.into_iter().next().expect("one report")
                    } else {
                        Value::Array(vals)
                    };
                    Ok(json_to_string(&doc) + "\n")
                }
                Format::Csv => Ok(reports
                    .iter()
                    .map(report_to_csv)
                    .collect::<Vec<_>>()
                    .join("\n")),
                Format::Text => Ok(reports
                    .iter()
                    .map(report_to_text)
                    .collect::<Vec<_>>()
                    .join("\n")),
            }
        }
        Output::Json(v) => match format {
            Format::Json => Ok(json_to_string(v) + "\n"),
            Format::Csv => Ok(generic_csv(v)),
            Format::Text => Ok(generic_text(v)),
        },
    }
}

fn any_violated(output: &Output) -> bool {
    fn scan(v: &Value) -> bool {
        match v {
            Value::Object(map) => map.iter().any(|(k, item)| {
                (k == "verdict" && item == &json!("violated")) || scan(item)
            }),
            Value::Array(items) => items.iter().any(scan),
            _ => false,
        }
    }
    match output {
        Output::Reports(reports) => reports.iter().any(|r| r.verdict == "violated"),
        Output::Json(v) => scan(v),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::Validation(_) => 2,
        Error::Undecided(_) | Error::FactoringCap { .. } | Error::Unsaturated { .. } => 3,
        _ => 1,
    }
}

fn resolve_threads(cli: &Cli) -> usize {
    cli.threads
        .or_else(|| {
            std::env::var("RCPROD_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1)
        .max(1)
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let threads = resolve_threads(cli);
    match &cli.cmd {
        Cmd::FieldInfo { field } => Ok(Output::Json(field_info(field)?)),
        Cmd::Rayclass {
            field,
            modulus,
            gen_bound,
        } => Ok(Output::Json(rayclass_cmd(field, modulus, *gen_bound)?)),
        Cmd::Primes {
            field,
            modulus,
            xmax,
            include_ramified,
        } => Ok(Output::Json(primes_cmd(
            field,
            modulus,
            *xmax,
            *include_ramified,
        )?)),
        Cmd::SieveCheck {
            field,
            modulus,
            z,
            alpha,
        } => Ok(Output::Json(sieve_check_cmd(
            field,
            modulus,
            z,
            alpha.as_deref(),
        )?)),
        Cmd::AnalyticCheck { n } => Ok(Output::Json(analytic_check_cmd(*n)?)),
        Cmd::Verify { what } => verify_cmd(what, cli.seed, threads),
    }
}

/// Run the CLI on explicit arguments; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses status 2 for usage errors, 0 for --help/--version.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(output) => {
            let rendered = match render(&output, cli.format, cli.seed) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return exit_code_for(&e);
                }
            };
            let write_result = match &cli.out {
                Some(path) => std::fs::write(path, rendered.as_bytes()),
                None => std::io::stdout().write_all(rendered.as_bytes()),
            };
            if let Err(e) = write_result {
                eprintln!("I/O error: {e}");
                return 1;
            }
            if any_violated(&output) {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("{}", json_to_string(&json!({"error": e.to_string()})));
            exit_code_for(&e)
        }
    }
}
