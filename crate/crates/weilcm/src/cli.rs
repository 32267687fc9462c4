//! Command-line front end: parameter generation, exhaustive search with
//! histograms, record validation, and curve verification, with JSON, CSV,
//! and plain-text output.
//!
//! Exit codes: 0 success; 2 precondition failure (bad parameters, r does
//! not split, k does not divide r-1); 3 iteration limit exceeded; 4
//! enumeration budget exceeded; 5 record parse failure; 6 curve check
//! failed or no twist found.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cm::{parse_cm_type, CMFieldSpec, CMTypeData};
use crate::jacobian::{probable_order_check, twist_search, HyperellipticCurve};
use crate::numfield::FieldElement;
use crate::weil::{
    construct_pi_parallel, default_max_iters, exhaustive_search, validate_weil, SearchReport,
    WeilNumber,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_ITERATION_LIMIT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_RECORD_PARSE: i32 = 5;
pub const EXIT_CURVE_FAIL: i32 = 6;

#[derive(Parser, Debug)]
#[command(
    name = "weilcm",
    about = "Weil numbers in CM-fields with prescribed subgroup size and embedding degree"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Randomized construction of a validated Weil number.
    Generate(GenerateArgs),
    /// Exhaustive enumeration for small r, with statistics and a histogram.
    Exhaust(ExhaustArgs),
    /// Re-validate a record produced by `generate`.
    Validate(ValidateArgs),
    /// Check a Jacobian order probabilistically, or search for a twist.
    CurveCheck(CurveCheckArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Field family: cyclotomic:<m> or quartic:<a>,<b>,<d>
    #[arg(long)]
    pub field: String,
    /// CM-type: `auto` or comma-separated embedding indices
    #[arg(long, default_value = "auto")]
    pub cm_type: String,
    /// Prescribed subgroup size, decimal or 2^e+c / 2^e-c
    #[arg(long)]
    pub r: String,
    /// Prescribed embedding degree
    #[arg(long)]
    pub k: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Iteration budget (default scales with the size of r)
    #[arg(long)]
    pub max_iters: Option<u64>,
    /// Known prime factors of r-1, comma separated (accepted for
    /// compatibility; primitive-root sampling does not require them)
    #[arg(long)]
    pub r_minus_one_factors: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct ExhaustArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long, default_value = "auto")]
    pub cm_type: String,
    #[arg(long)]
    pub r: String,
    #[arg(long)]
    pub k: u64,
    /// Maximum number of candidates to enumerate
    #[arg(long, default_value_t = 2_000_000_000)]
    pub budget: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Path to a JSON record emitted by `generate`, or `-` for stdin
    #[arg(long)]
    pub record: String,
    /// Floor for the working precision of the archimedean check, in bits
    #[arg(long, default_value_t = 0)]
    pub precision: u32,
}

#[derive(Args, Debug)]
pub struct CurveCheckArgs {
    /// Curve spec: hyperelliptic:<q>:<c0,c1,...> (omit when twist-searching)
    #[arg(long)]
    pub curve: Option<String>,
    /// Expected Jacobian order N
    #[arg(long)]
    pub order: String,
    #[arg(long, default_value_t = 10)]
    pub trials: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Search twists y^2 = x^p + a for this odd prime p
    #[arg(long)]
    pub twist_p: Option<u64>,
    /// Base field size for the twist search
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub a_bound: u64,
}

/// Self-contained serialized Weil number: the field and CM-type are spelled
/// out so the record validates without side information. Coordinates are
/// power-basis rationals printed as `n` or `n/d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeilRecord {
    pub field: String,
    pub cm_type: String,
    pub r: String,
    pub k: u64,
    pub q: String,
    pub pi: Vec<String>,
    pub xi: Vec<String>,
    pub group_order: String,
    pub rho: f64,
    pub checks: BTreeMap<String, bool>,
    pub seed: u64,
    pub iterations: u64,
}

impl WeilRecord {
    pub fn from_weil(w: &WeilNumber, field: &str, seed: u64) -> Self {
        WeilRecord {
            field: field.to_string(),
            cm_type: w
                .cm_type
                .selected
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(","),
            r: w.r.to_string(),
            k: w.k,
            q: w.q.to_string(),
            pi: w.pi.coords.iter().map(|c| c.to_string()).collect(),
            xi: w.xi.coords.iter().map(|c| c.to_string()).collect(),
            group_order: w.group_order.to_string(),
            rho: (w.rho * 1e6).round() / 1e6,
            checks: w
                .checks
                .items()
                .iter()
                .map(|(n, b)| (n.to_string(), *b))
                .collect(),
            seed,
            iterations: w.iterations,
        }
    }

    /// Rebuild the algebraic objects; errors carry `Error::Parse` so the
    /// caller can map them to the record-parse exit code.
    pub fn to_weil(&self) -> Result<WeilNumber> {
        let spec = CMFieldSpec::parse(&self.field)?;
        let t = parse_cm_type(&spec, &self.cm_type)?;
        let parse_coords = |raw: &[String]| -> Result<FieldElement> {
            let coords = raw
                .iter()
                .map(|s| {
                    BigRational::from_str(s)
                        .map_err(|_| Error::Parse(format!("bad coordinate '{s}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FieldElement { coords })
        };
        let pi = parse_coords(&self.pi)?;
        let xi = parse_coords(&self.xi)?;
        let parse_int = |s: &str, what: &str| -> Result<BigUint> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad {what} '{s}'")))
        };
        Ok(WeilNumber {
            pi,
            q: parse_int(&self.q, "q")?,
            r: parse_int(&self.r, "r")?,
            k: self.k,
            group_order: parse_int(&self.group_order, "group order")?,
            rho: self.rho,
            xi,
            cm_type: t,
            checks: Default::default(),
            iterations: self.iterations,
        })
    }
}

/// Parse a subgroup size given in decimal or as `2^e+c` / `2^e-c`.
pub fn parse_r(s: &str) -> Result<BigUint> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("2^") {
        let (e, c, neg) = if let Some((e, c)) = rest.split_once('+') {
            (e, c, false)
        } else if let Some((e, c)) = rest.split_once('-') {
            (e, c, true)
        } else {
            (rest, "0", false)
        };
        let e: u64 = e
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in '{s}'")))?;
        let c: BigUint = c
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad offset in '{s}'")))?;
        let base = BigUint::one() << e;
        if neg {
            if c >= base {
                return Err(Error::Parse(format!("'{s}' is not positive")));
            }
            Ok(base - c)
        } else {
            Ok(base + c)
        }
    } else {
        s.parse()
            .map_err(|_| Error::Parse(format!("bad integer '{s}'")))
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Precondition(_) | Error::NotSplit(_) | Error::RamifiedPrime(_) => {
            EXIT_PRECONDITION
        }
        Error::IterationLimit(_) => EXIT_ITERATION_LIMIT,
        Error::BudgetExceeded(_) => EXIT_BUDGET,
        _ => EXIT_INTERNAL,
    }
}

fn parse_field_and_type(field: &str, cm_type: &str) -> Result<CMTypeData> {
    let spec = CMFieldSpec::parse(field)?;
    parse_cm_type(&spec, cm_type)
}

fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let t = parse_field_and_type(&args.field, &args.cm_type)?;
    let r = parse_r(&args.r)?;
    let max_iters = args
        .max_iters
        .unwrap_or_else(|| default_max_iters(t.spec.g(), &r));
    let w = construct_pi_parallel(&t, args.k, &r, args.seed, args.threads.max(1), max_iters)?;
    let record = WeilRecord::from_weil(&w, &args.field, args.seed);
    match args.format {
        OutputFormat::Json => {
            let json = serde_json::to_string_pretty(&record).expect("record serializes");
            writeln!(out, "{json}").ok();
        }
        OutputFormat::Csv => {
            writeln!(out, "field,cm_type,r,k,q,group_order,rho,iterations").ok();
            writeln!(
                out,
                "{},\"{}\",{},{},{},{},{:.6},{}",
                record.field,
                record.cm_type,
                record.r,
                record.k,
                record.q,
                record.group_order,
                record.rho,
                record.iterations
            )
            .ok();
        }
        OutputFormat::Text => {
            writeln!(out, "q = {} ({} bits)", w.q, w.q.bits()).ok();
            writeln!(out, "pi = {:?}", record.pi).ok();
            writeln!(out, "group_order = {}", w.group_order).ok();
            writeln!(out, "rho = {:.6}", w.rho).ok();
            writeln!(out, "iterations = {}", w.iterations).ok();
            for (name, pass) in w.checks.items() {
                writeln!(out, "check {name}: {}", if pass { "pass" } else { "FAIL" }).ok();
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ExhaustRecord {
    domain_size: u128,
    prime_count: u64,
    step8_failures: u64,
    min_q: Option<String>,
    winners: Vec<WeilRecord>,
    /// (bin start, count) pairs; bin i covers [start, start + 0.05)
    rho_histogram: Vec<(f64, u64)>,
}

fn histogram_rows(report: &SearchReport) -> Vec<(f64, u64)> {
    report
        .rho_histogram
        .iter()
        .map(|(&bin, &count)| (bin as f64 * 0.05, count))
        .collect()
}

fn cmd_exhaust(args: &ExhaustArgs, out: &mut dyn Write) -> Result<()> {
    let t = parse_field_and_type(&args.field, &args.cm_type)?;
    let r = parse_r(&args.r)?;
    let report = exhaustive_search(&t, args.k, &r, args.budget)?;
    match args.format {
        OutputFormat::Json => {
            let rec = ExhaustRecord {
                domain_size: report.domain_size,
                prime_count: report.prime_count,
                step8_failures: report.step8_failures,
                min_q: report.min_q.as_ref().map(|q| q.to_string()),
                winners: report
                    .winners
                    .iter()
                    .map(|w| WeilRecord::from_weil(w, &args.field, 0))
                    .collect(),
                rho_histogram: histogram_rows(&report),
            };
            let json = serde_json::to_string_pretty(&rec).expect("report serializes");
            writeln!(out, "{json}").ok();
        }
        OutputFormat::Csv => {
            writeln!(out, "# domain_size,{}", report.domain_size).ok();
            writeln!(out, "# prime_count,{}", report.prime_count).ok();
            writeln!(out, "# step8_failures,{}", report.step8_failures).ok();
            if let Some(q) = &report.min_q {
                writeln!(out, "# min_q,{q}").ok();
            }
            if let Some(w) = report.winners.first() {
                writeln!(out, "# winner_group_order,{}", w.group_order).ok();
                writeln!(out, "# winner_rho,{:.6}", w.rho).ok();
            }
            writeln!(out, "bin_start,count").ok();
            for (start, count) in histogram_rows(&report) {
                writeln!(out, "{start:.2},{count}").ok();
            }
        }
        OutputFormat::Text => {
            writeln!(out, "domain_size = {}", report.domain_size).ok();
            writeln!(out, "prime_count = {}", report.prime_count).ok();
            writeln!(out, "step8_failures = {}", report.step8_failures).ok();
            match &report.min_q {
                Some(q) => writeln!(out, "min_q = {q}").ok(),
                None => writeln!(out, "min_q = none").ok(),
            };
            for w in &report.winners {
                writeln!(
                    out,
                    "winner: q = {}, group_order = {}, rho = {:.6}",
                    w.q, w.group_order, w.rho
                )
                .ok();
            }
        }
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> std::result::Result<(), i32> {
    let raw = if args.record == "-" {
        let mut buf = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)
            .map_err(|_| EXIT_RECORD_PARSE)?;
        buf
    } else {
        std::fs::read_to_string(&args.record).map_err(|e| {
            eprintln!("cannot read {}: {e}", args.record);
            EXIT_RECORD_PARSE
        })?
    };
    let record: WeilRecord = serde_json::from_str(&raw).map_err(|e| {
        eprintln!("malformed record: {e}");
        EXIT_RECORD_PARSE
    })?;
    let w = record.to_weil().map_err(|e| {
        eprintln!("malformed record: {e}");
        EXIT_RECORD_PARSE
    })?;
    let report = validate_weil(&w, args.precision).map_err(|e| {
        eprintln!("validation error: {e}");
        exit_code_for(&e)
    })?;
    for (name, pass) in report.items() {
        writeln!(out, "check {name}: {}", if pass { "pass" } else { "FAIL" }).ok();
    }
    if report.all_pass() {
        writeln!(out, "all checks passed").ok();
        Ok(())
    } else {
        writeln!(out, "validation FAILED").ok();
        Err(EXIT_INTERNAL)
    }
}

fn cmd_curve_check(args: &CurveCheckArgs, out: &mut dyn Write) -> std::result::Result<(), i32> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let n: BigUint = args.order.parse().map_err(|_| {
        eprintln!("bad order '{}'", args.order);
        EXIT_PRECONDITION
    })?;
    if let Some(p) = args.twist_p {
        let q: BigUint = args
            .q
            .as_deref()
            .ok_or_else(|| {
                eprintln!("twist search needs --q");
                EXIT_PRECONDITION
            })?
            .parse()
            .map_err(|_| {
                eprintln!("bad field size");
                EXIT_PRECONDITION
            })?;
        let found = twist_search(p, &n, &q, args.a_bound, &mut rng).map_err(|e| {
            eprintln!("{e}");
            exit_code_for(&e)
        })?;
        match found {
            Some((a, _)) => {
                writeln!(out, "found a = {a}: y^2 = x^{p} + {a} over F_{q} has order {n}").ok();
                Ok(())
            }
            None => {
                writeln!(out, "no twist found for a <= {}", args.a_bound).ok();
                Err(EXIT_CURVE_FAIL)
            }
        }
    } else {
        let spec = args.curve.as_deref().ok_or_else(|| {
            eprintln!("need --curve or --twist-p");
            EXIT_PRECONDITION
        })?;
        let curve = HyperellipticCurve::parse(spec).map_err(|e| {
            eprintln!("{e}");
            EXIT_PRECONDITION
        })?;
        let pass = probable_order_check(&curve, &n, args.trials, &mut rng).map_err(|e| {
            eprintln!("{e}");
            exit_code_for(&e)
        })?;
        writeln!(
            out,
            "order check ({} trials): {}",
            args.trials,
            if pass { "pass" } else { "FAIL" }
        )
        .ok();
        if pass {
            Ok(())
        } else {
            Err(EXIT_CURVE_FAIL)
        }
    }
}

/// Run a parsed command, writing results to `out`; returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Generate(args) => match cmd_generate(args, out) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("{e}");
                exit_code_for(&e)
            }
        },
        Command::Exhaust(args) => match cmd_exhaust(args, out) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("{e}");
                exit_code_for(&e)
            }
        },
        Command::Validate(args) => match cmd_validate(args, out) {
            Ok(()) => EXIT_OK,
            Err(code) => code,
        },
        Command::CurveCheck(args) => match cmd_curve_check(args, out) {
            Ok(()) => EXIT_OK,
            Err(code) => code,
        },
    }
}

/// Entry point for the binary: parse argv and execute.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    execute(&cli, &mut out)
}
