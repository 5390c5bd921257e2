//! Command-line surface tying construction, verification, and scanning
//! into reproducible runs with machine-readable outputs.
//!
//! Exit codes: 0 success, 1 usage, 2 invariant/verification failure,
//! 3 non-convergence.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_complex::Complex64;

use erdos967::construct::{construct, verify, ConstructOutcome, TargetSpec};
use erdos967::powersum::SumPolicy;
use erdos967::scanner::{
    scan, scan_with_csv, BlockSeries, FiniteSet, ScanParams, ScanReport, Series,
};
use erdos967::setrep::BlockSet;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INVARIANT: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;

/// Final-start digit estimate above which a run is refused without
/// --allow-huge: block starts grow like e^(2π/|t|) per step, so small |t|
/// must be deliberate, not accidental.
const HUGE_DIGITS: f64 = 1e4;

#[derive(Parser)]
#[command(
    name = "erdos967",
    about = "Construct sparse integer sets with a prescribed twisted harmonic sum, and scan 1 + sum n^(-1-it) for certified zero-free intervals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a set S with sum over S of n^(-1-it) within epsilon of lambda.
    Construct(ConstructArgs),
    /// Re-audit a saved block set against a target spec.
    Verify(VerifyArgs),
    /// Certified zero-free scan of g(t) = 1 + sum over S of n^(-1-it).
    Scan(ScanArgs),
    /// One-shot reproduction: lambda = -1 drives 1 + sum to zero at t.
    Demo967(DemoArgs),
}

#[derive(Args)]
struct TargetArgs {
    /// Imaginary shift t (nonzero).
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    /// Target as "re,im".
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    lambda: Complex64,
    /// Stop once |lambda_k| <= epsilon.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// Floor: every emitted element is >= n0.
    #[arg(long, default_value = "2", value_parser = parse_biguint)]
    n0: BigUint,
    /// Clamp radius (default: the exact-scheme value r(t)).
    #[arg(long, conflicts_with = "delta")]
    rho: Option<f64>,
    /// Harmonic-budget knob: choose rho so that sum 1/n <= |lambda| + delta.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    max_blocks: usize,
    /// With lambda = 0, emit a nonempty set that still sums to 0.
    #[arg(long)]
    detour: bool,
    /// Proceed even when the predicted final block start exceeds 10^4 digits.
    #[arg(long)]
    allow_huge: bool,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Where to write the block-set JSON.
    #[arg(long)]
    out: PathBuf,
    /// Optional per-block report JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Block-set JSON produced by construct or demo967.
    #[arg(long)]
    input: PathBuf,
    /// Target as "re,im" the set was built for.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    lambda: Complex64,
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    #[arg(long, default_value = "2", value_parser = parse_biguint)]
    n0: BigUint,
    #[arg(long, conflicts_with = "delta")]
    rho: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct ScanArgs {
    /// Explicit elements, e.g. "2,3,5".
    #[arg(long, conflicts_with_all = ["elements_file", "blocks"])]
    elements: Option<String>,
    /// JSON file holding a list of integers.
    #[arg(long, conflicts_with = "blocks")]
    elements_file: Option<PathBuf>,
    /// Block-set JSON (a constructed set) to scan.
    #[arg(long)]
    blocks: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    t1: f64,
    /// Base grid step.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Bisection floor below which failing cells are reported as suspect.
    #[arg(long, default_value_t = 1e-12)]
    h_min: f64,
    /// Stream grid samples t,re_g,im_g,abs_g here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the scan report JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Exit 2 unless the whole interval certified zero-free
    /// (default: exit 0 once the scan completes).
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    #[arg(long, default_value = "demo967-blocks.json")]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    allow_huge: bool,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"re,im\", got {s:?}"))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| format!("bad re part {re:?}"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| format!("bad im part {im:?}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_biguint(s: &str) -> Result<BigUint, String> {
    BigUint::from_str(s).map_err(|_| format!("expected a nonnegative integer, got {s:?}"))
}

fn policy_from_env() -> Result<SumPolicy, String> {
    let mut policy = SumPolicy::default();
    if let Ok(v) = std::env::var("ERDOS967_DIRECT_CAP") {
        policy.direct_cap = v
            .parse()
            .map_err(|_| format!("ERDOS967_DIRECT_CAP: expected an integer, got {v:?}"))?;
    }
    Ok(policy)
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn build_spec(a: &TargetArgs) -> Result<TargetSpec, String> {
    if a.t == 0.0 {
        return Err("t must be nonzero: the construction hypothesis is t != 0 \
                    (at t = 0 the series is real and cannot hit a general target)"
            .into());
    }
    let mut spec = TargetSpec::new(a.t, a.lambda).map_err(|e| e.to_string())?;
    spec.epsilon = a.epsilon;
    spec.n0 = a.n0.clone();
    spec.max_blocks = a.max_blocks;
    spec.detour = a.detour;
    spec.policy = policy_from_env()?;
    if let Some(rho) = a.rho {
        spec.rho = rho;
    }
    if let Some(delta) = a.delta {
        spec = spec.with_budget_delta(delta).map_err(|e| e.to_string())?;
    }
    spec.validate().map_err(|e| e.to_string())?;
    if spec.predicted_final_digits() > HUGE_DIGITS && !a.allow_huge {
        return Err(format!(
            "predicted final block start has ~{:.0} digits (over {HUGE_DIGITS:.0}); \
             pass --allow-huge to proceed",
            spec.predicted_final_digits()
        ));
    }
    Ok(spec)
}

fn run_construct(spec: &TargetSpec) -> Result<ConstructOutcome, ExitCode> {
    match construct(spec) {
        Ok(out) => Ok(out),
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(EXIT_INVARIANT))
        }
    }
}

fn print_headline(spec: &TargetSpec, out: &ConstructOutcome) {
    println!(
        "certified: |lambda - sum over S| <= {:.6e} (residual {:.6e} + err {:.6e})",
        out.report.certified_gap(),
        out.residual.norm(),
        out.report.err_budget
    );
    println!(
        "blocks: {}   harmonic mass: {:.9} (+/- {:.3e})   rho: {:.9}",
        out.report.steps.len(),
        out.report.total_mass.value,
        out.report.total_mass.err,
        spec.rho
    );
}

fn cmd_construct(args: ConstructArgs) -> ExitCode {
    let spec = match build_spec(&args.target) {
        Ok(s) => s,
        Err(m) => return usage(m),
    };
    let out = match run_construct(&spec) {
        Ok(o) => o,
        Err(code) => return code,
    };
    if let Err(e) = out.set.save(&args.out) {
        return usage(format!("writing {}: {e}", args.out.display()));
    }
    if let Some(report) = &args.report {
        if let Err(e) = fs::write(report, out.report.to_json(&spec)) {
            return usage(format!("writing {}: {e}", report.display()));
        }
    }
    print_headline(&spec, &out);
    println!("block set written to {}", args.out.display());
    if !out.report.converged {
        eprintln!(
            "warning: NOT converged after {} blocks; residual {:.3e} > epsilon {:.3e}",
            out.report.steps.len(),
            out.residual.norm(),
            spec.epsilon
        );
        return ExitCode::from(EXIT_NONCONVERGED);
    }
    ExitCode::from(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let set = match BlockSet::load(&args.input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: loading {}: {e}", args.input.display());
            return ExitCode::from(EXIT_INVARIANT);
        }
    };
    let target = TargetArgs {
        t: set.t(),
        lambda: args.lambda,
        epsilon: args.epsilon,
        n0: args.n0,
        rho: args.rho,
        delta: args.delta,
        max_blocks: 4096,
        detour: false,
        allow_huge: true,
    };
    let spec = match build_spec(&target) {
        Ok(s) => s,
        Err(m) => return usage(m),
    };
    let report = verify(&set, &spec);
    for c in &report.checks {
        println!(
            "{} {:<16} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    println!(
        "certified: |lambda - sum over S| <= {:.6e}",
        report.certified_bound
    );
    if report.pass() {
        ExitCode::from(EXIT_OK)
    } else {
        ExitCode::from(EXIT_INVARIANT)
    }
}

fn load_series(args: &ScanArgs) -> Result<Box<dyn Series>, String> {
    match (&args.elements, &args.elements_file, &args.blocks) {
        (Some(csv), None, None) => Ok(Box::new(
            FiniteSet::parse_csv(csv).map_err(|e| e.to_string())?,
        )),
        (None, Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let elems: Vec<u64> = serde_json_from(&text)?;
            Ok(Box::new(FiniteSet::new(elems).map_err(|e| e.to_string())?))
        }
        (None, None, Some(path)) => {
            let set = BlockSet::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(Box::new(BlockSeries::new(&set)))
        }
        _ => Err("exactly one of --elements, --elements-file, --blocks is required".into()),
    }
}

// minimal JSON integer-list parser; avoids pulling serde into the binary
// for one input shape
fn serde_json_from(text: &str) -> Result<Vec<u64>, String> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| "expected a JSON list of integers".to_string())?;
    let mut out = Vec::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(
            part.parse::<u64>()
                .map_err(|_| format!("bad element {part:?}"))?,
        );
    }
    Ok(out)
}

fn cmd_scan(args: ScanArgs) -> ExitCode {
    let series = match load_series(&args) {
        Ok(s) => s,
        Err(m) => return usage(m),
    };
    let mut params = ScanParams::new(args.t0, args.t1, args.step);
    params.h_min = args.h_min;

    let result: Result<ScanReport, _> = match &args.csv {
        Some(path) => {
            let file = match fs::File::create(path) {
                Ok(f) => f,
                Err(e) => return usage(format!("creating {}: {e}", path.display())),
            };
            let mut w = std::io::BufWriter::new(file);
            scan_with_csv(series.as_ref(), &params, &mut w)
        }
        None => scan(series.as_ref(), &params),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    if let Some(path) = &args.report {
        if let Err(e) = fs::write(path, report.to_json()) {
            return usage(format!("writing {}: {e}", path.display()));
        }
    }
    println!(
        "scanned [{}, {}] at step {}: certified_zero_free = {}",
        report.interval[0], report.interval[1], report.grid_step, report.certified_zero_free
    );
    println!(
        "min |g| = {:.9e} at t = {:.12}   (L = {:.6}, {} evaluations)",
        report.min_abs_g, report.argmin_t, report.lipschitz_l, report.evaluations
    );
    if !report.uncertified_cells.is_empty() {
        println!(
            "{} suspect cell(s) remain uncertified at the bisection floor",
            report.uncertified_cells.len()
        );
    }
    if args.strict && !report.certified_zero_free {
        return ExitCode::from(EXIT_INVARIANT);
    }
    ExitCode::from(EXIT_OK)
}

fn cmd_demo967(args: DemoArgs) -> ExitCode {
    let target = TargetArgs {
        t: args.t,
        lambda: Complex64::new(-1.0, 0.0),
        epsilon: args.epsilon,
        n0: BigUint::from(2u32),
        rho: None,
        delta: None,
        max_blocks: 4096,
        detour: false,
        allow_huge: args.allow_huge,
    };
    let spec = match build_spec(&target) {
        Ok(s) => s,
        Err(m) => return usage(m),
    };
    println!(
        "target: 1 + sum over S of n^(-1-it) = 0 at t = {} (lambda = -1, rho = r = {:.9})",
        args.t, spec.rho
    );
    let out = match run_construct(&spec) {
        Ok(o) => o,
        Err(code) => return code,
    };
    if !out.report.converged {
        eprintln!(
            "error: not converged after {} blocks (residual {:.3e})",
            out.report.steps.len(),
            out.residual.norm()
        );
        return ExitCode::from(EXIT_NONCONVERGED);
    }
    let vreport = verify(&out.set, &spec);
    if let Err(e) = out.set.save(&args.out) {
        return usage(format!("writing {}: {e}", args.out.display()));
    }
    if let Some(report) = &args.report {
        if let Err(e) = fs::write(report, out.report.to_json(&spec)) {
            return usage(format!("writing {}: {e}", report.display()));
        }
    }
    // headline: |1 + Σ| over the emitted set, with every constant stated
    println!(
        "|1 + sum over S| <= epsilon + err = {:.6e} + {:.6e} = {:.6e}",
        spec.epsilon,
        out.report.err_budget,
        spec.epsilon + out.report.err_budget
    );
    println!(
        "computed residual |1 + sum| = {:.6e} over {} blocks, harmonic mass {:.9}",
        out.residual.norm(),
        out.report.steps.len(),
        out.report.total_mass.value
    );
    println!("block set written to {}", args.out.display());
    for c in &vreport.checks {
        println!(
            "{} {:<16} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if !vreport.pass() {
        return ExitCode::from(EXIT_INVARIANT);
    }
    ExitCode::from(EXIT_OK)
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes (e.g. `... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are not usage errors
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::from(EXIT_OK)
            } else {
                ExitCode::from(EXIT_USAGE)
            };
        }
    };
    match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Demo967(args) => cmd_demo967(args),
    }
}
