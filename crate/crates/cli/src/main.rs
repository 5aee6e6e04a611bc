//! `ctpotts` command-line tool.

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ctpotts::bounds::{asymptote_check, classify_point, curve_table, log_grid};
use ctpotts::mc::{
    estimate_free_energy, joint_histogram_check, run_with_trace, ChainParams, ChainState, TRACE_HEADER,
};
use ctpotts::transfer::{divergence_diagnostic, scan, scan_csv};
use ctpotts::triangulation::{count_triangulations, enumerate_triangulations, text};
use ctpotts::verify::{self, SuiteReport};
use ctpotts::{Error, Side};

pub const THREADS_ENV: &str = "CTPOTTS_THREADS";

const EXIT_PASS: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SKIPPED: u8 = 3;

/// Edge bound of the Edwards–Sokal suite (exhaustive FK sums).
const ES_MAX_EDGES: usize = 24;

#[derive(Parser, Debug)]
#[command(name = "ctpotts", version, about = "Potts models on causal triangulations of the torus")]
struct Cli {
    /// Flat `key = value` file; explicit flags override its entries.
    // Consumed by `config::merge` before clap sees the arguments; declared
    // here for the help text.
    #[allow(dead_code)]
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump or count rooted triangulations.
    Enumerate(EnumerateArgs),
    /// Run identity and inequality suites; writes a JSON report.
    Verify(VerifyArgs),
    /// Phase-diagram curve tables and point classification.
    Phase(PhaseArgs),
    /// Transfer-matrix scans of ln Z_N against ln Λ.
    Transfer(TransferArgs),
    /// Joint triangulation/spin Monte Carlo.
    Mc(McArgs),
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "K")]
    k: usize,
    /// Print the exact number of triangulations only.
    #[arg(long)]
    count_only: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Euler,
    Es,
    Duality,
    Bounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    Backmap,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Euler suite over every triangulation with N <= 3, K <= 3 and at most
    /// `--max-edges` edges, all bond configurations.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long = "N-max", default_value_t = 2)]
    n_max: usize,
    #[arg(long = "K-max", default_value_t = 2)]
    k_max: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    q: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1.0,2.0")]
    beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1.0,2.0,3.0")]
    mu: Vec<f64>,
    /// Largest edge count for exhaustive bond sweeps and FK sums.
    #[arg(long, default_value_t = 18)]
    max_edges: usize,
    /// Largest subset size for the circuit-count bound.
    #[arg(long, default_value_t = 12)]
    circuit_k: usize,
    #[arg(long, value_enum)]
    inject_fault: Option<FaultArg>,
    /// Exit 0 even when some instances were skipped for budget reasons.
    #[arg(long)]
    allow_skip: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Primal,
    Dual,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Primal => Side::Primal,
            SideArg::Dual => Side::Dual,
        }
    }
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[arg(long)]
    q: f64,
    #[arg(long, value_enum, default_value = "primal")]
    side: SideArg,
    /// `a:b:n`, `n` points log-spaced from `a` to `b`.
    #[arg(long, default_value = "0.01:20:200")]
    beta_grid: String,
    /// `beta,mu` to classify; repeatable.
    #[arg(long)]
    point: Vec<String>,
    #[arg(long)]
    check_asymptote: bool,
    /// Curve table CSV path (stdout when nothing else is requested).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Verdict JSONL path (stdout by default).
    #[arg(long)]
    verdicts: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TransferArgs {
    #[arg(long, value_delimiter = ',')]
    mu: Vec<f64>,
    #[arg(long = "K", value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long = "N", value_delimiter = ',')]
    n: Vec<usize>,
    /// Also emit divergence diagnostics (JSONL, K_max = largest K) to this path.
    #[arg(long)]
    divergence: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum McMode {
    /// Compare the stationary histogram with the exact law.
    Check,
    /// Run the chain and write a trace.
    Run,
    /// Thermodynamic-integration estimate of (1/N) ln Ξ_N.
    FreeEnergy,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "Kmax")]
    k_max: usize,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    mu: f64,
    /// Steps (run/check) or steps per quadrature node (free-energy); accepts `1e6`.
    #[arg(long, default_value = "1e5")]
    sweeps: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "check")]
    mode: McMode,
    /// Trace CSV path for `--mode run` (stdout by default).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    trace_every: u64,
    /// Write the final chain state here (`--mode run`).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Continue from a checkpoint instead of a fresh chain (`--mode run`).
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Report path for `check` and `free-energy` (stdout by default).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(Vec<String>),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type Outcome = Result<u8, Failure>;

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| {
            Failure::Lib(Error::Io(io::Error::new(e.kind(), format!("{}: {e}", p.display()))))
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn usage_if(errors: Vec<String>) -> Result<(), Failure> {
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Failure::Usage(errors))
    }
}

fn cmd_enumerate(a: &EnumerateArgs) -> Outcome {
    let mut errs = Vec::new();
    if a.n == 0 {
        errs.push("--N must be positive".to_string());
    }
    if a.k == 0 {
        errs.push("--K must be positive".to_string());
    }
    usage_if(errs)?;
    if a.count_only {
        let c = count_triangulations(a.n, a.k)?;
        write_out(a.output.as_deref(), &format!("{c}\n"))?;
        eprintln!("N = {}, K = {}: {c} triangulations", a.n, a.k);
        return Ok(EXIT_PASS);
    }
    let all: Vec<_> = enumerate_triangulations(a.n, a.k)?.collect();
    write_out(a.output.as_deref(), &text::to_text(&all, a.k))?;
    eprintln!("wrote {} triangulations", all.len());
    Ok(EXIT_PASS)
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let mut errs = Vec::new();
    if a.n_max == 0 || a.k_max == 0 {
        errs.push("--N-max and --K-max must be positive".to_string());
    }
    if a.q.is_empty() || a.q.iter().any(|&q| q < 2) {
        errs.push("--q values must be at least 2".to_string());
    }
    if a.beta.is_empty() || a.beta.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
        errs.push("--beta values must be positive and finite".to_string());
    }
    if a.mu.is_empty() || a.mu.iter().any(|m| !m.is_finite()) {
        errs.push("--mu values must be finite".to_string());
    }
    if a.max_edges > 30 {
        errs.push("--max-edges above 30 is not supported".to_string());
    }
    if a.exhaustive && !matches!(a.suite, SuiteArg::Euler | SuiteArg::All) {
        errs.push("--exhaustive applies to the euler suite only".to_string());
    }
    usage_if(errs)?;

    let run = |s: SuiteArg| a.suite == SuiteArg::All || a.suite == s;
    let mut insts = verify::instances(a.n_max, a.k_max)?;
    let mut fault_at = None;
    if a.inject_fault == Some(FaultArg::Backmap) {
        fault_at = verify::inject_backmap_fault(&mut insts);
    }
    let mut report = SuiteReport::default();
    let mut suites = Vec::new();
    if run(SuiteArg::Euler) {
        suites.push("euler");
        if a.exhaustive {
            let mut big: Vec<_> = verify::instances(3, 3)?
                .into_iter()
                .filter(|i| i.num_edges() <= a.max_edges)
                .collect();
            if a.inject_fault == Some(FaultArg::Backmap) {
                fault_at = verify::inject_backmap_fault(&mut big);
            }
            report.merge(verify::euler_suite(&big, a.max_edges)?);
        } else {
            report.merge(verify::euler_suite(&insts, a.max_edges)?);
        }
    }
    if run(SuiteArg::Es) {
        suites.push("edwards_sokal");
        report.merge(verify::es_suite(&insts, &[Side::Primal, Side::Dual], &a.q, &a.beta, ES_MAX_EDGES, 1e-9)?);
    }
    if run(SuiteArg::Duality) {
        suites.push("duality");
        report.merge(verify::duality_suite(&insts, a.n_max, a.k_max, &a.q, &a.beta, &a.mu)?);
    }
    if run(SuiteArg::Bounds) {
        suites.push("bounds");
        report.merge(verify::bounds_suite(&insts, &[Side::Primal, Side::Dual], &a.q, &a.beta, a.circuit_k)?);
    }

    let failures: Vec<_> = report
        .failures()
        .map(|c| json!({"suite": c.suite, "name": c.name, "instance": c.instance, "margin": c.margin}))
        .collect();
    let passed = report.passed();
    let doc = json!({
        "command": "verify",
        "suites": suites,
        "N_max": a.n_max, "K_max": a.k_max, "q": a.q, "beta": a.beta, "mu": a.mu,
        "injected_fault": fault_at,
        "passed": passed,
        "num_checks": report.checks.len(),
        "failures": failures,
        "skipped": report.skipped,
        "checks": report.checks,
    });
    write_out(a.output.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&doc).map_err(Error::from)?))?;

    eprintln!(
        "{} checks, {} failed, {} skipped",
        report.checks.len(),
        failures.len(),
        report.skipped.len()
    );
    let mut names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    for n in names {
        let count = report.failures().filter(|c| c.name == n).count();
        eprintln!("FAILED {n} ({count} instances)");
    }
    Ok(if !passed {
        EXIT_CHECK_FAILED
    } else if !report.skipped.is_empty() && !a.allow_skip {
        EXIT_SKIPPED
    } else {
        EXIT_PASS
    })
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("--beta-grid must be a:b:n, got {s:?}"));
    };
    let a = a.parse().map_err(|_| format!("bad grid start {a:?}"))?;
    let b = b.parse().map_err(|_| format!("bad grid end {b:?}"))?;
    let n = n.parse().map_err(|_| format!("bad grid size {n:?}"))?;
    Ok((a, b, n))
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (b, m) = s.split_once(',').ok_or_else(|| format!("--point must be beta,mu, got {s:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad beta in point {s:?}"))?;
    let m = m.trim().parse().map_err(|_| format!("bad mu in point {s:?}"))?;
    Ok((b, m))
}

fn cmd_phase(a: &PhaseArgs) -> Outcome {
    let mut errs = Vec::new();
    if !(a.q >= 2.0) {
        errs.push(format!("--q must be at least 2, got {}", a.q));
    }
    let grid = parse_grid(&a.beta_grid).map_err(|e| errs.push(e)).ok();
    let points: Vec<_> = a
        .point
        .iter()
        .filter_map(|p| parse_point(p).map_err(|e| errs.push(e)).ok())
        .collect();
    usage_if(errs)?;
    let (ga, gb, gn) = grid.unwrap();
    let side = Side::from(a.side);
    let betas = log_grid(ga, gb, gn)?;
    let table = curve_table(a.q, side, &betas)?;
    let mut code = EXIT_PASS;
    if !table.lower_below_upper() {
        eprintln!("FAILED lower curve exceeds upper curve somewhere on the grid");
        code = EXIT_CHECK_FAILED;
    }
    let table_to_stdout = a.output.is_none() && points.is_empty() && !a.check_asymptote;
    if a.output.is_some() || table_to_stdout {
        write_out(a.output.as_deref(), &table.to_csv())?;
    }
    if !points.is_empty() {
        let mut lines = String::new();
        for (b, m) in points {
            let v = classify_point(b, m, a.q, side)?;
            lines.push_str(&serde_json::to_string(&v).map_err(Error::from)?);
            lines.push('\n');
        }
        write_out(a.verdicts.as_deref(), &lines)?;
    }
    if a.check_asymptote {
        let c = asymptote_check(a.q, side)?;
        if !c.ok {
            eprintln!("FAILED asymptote deviations outside tolerance");
            code = EXIT_CHECK_FAILED;
        }
        let mut out = io::stdout().lock();
        writeln!(out, "{}", serde_json::to_string(&c).map_err(Error::from)?)?;
    }
    eprintln!("q = {}, side = {:?}: {} grid points", a.q, a.side, betas.len());
    Ok(code)
}

fn cmd_transfer(a: &TransferArgs) -> Outcome {
    let mut errs = Vec::new();
    if a.mu.is_empty() || a.mu.iter().any(|m| !m.is_finite()) {
        errs.push("--mu needs at least one finite value".to_string());
    }
    if a.k.is_empty() || a.k.contains(&0) {
        errs.push("--K needs positive values".to_string());
    }
    if a.n.is_empty() || a.n.contains(&0) {
        errs.push("--N needs positive values".to_string());
    }
    usage_if(errs)?;
    let rows = scan(&a.n, &a.k, &a.mu)?;
    write_out(a.output.as_deref(), &scan_csv(&rows))?;
    for &mu in &a.mu {
        for &k in &a.k {
            let gaps: Vec<f64> = rows
                .iter()
                .filter(|r| r.mu == mu && r.k == k)
                .map(|r| r.gap.abs())
                .collect();
            let shrinking = gaps.windows(2).all(|w| w[1] < w[0]);
            eprintln!("mu = {mu}, K = {k}: |gap| over N {gaps:?} shrinking = {shrinking}");
        }
    }
    if let Some(path) = &a.divergence {
        let k_max = *a.k.iter().max().unwrap();
        let mut lines = String::new();
        for &n in &a.n {
            for &mu in &a.mu {
                let r = divergence_diagnostic(n, mu, k_max)?;
                lines.push_str(&serde_json::to_string(&r).map_err(Error::from)?);
                lines.push('\n');
            }
        }
        write_out(Some(path), &lines)?;
    }
    Ok(EXIT_PASS)
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1e15 => Ok(x as u64),
        _ => Err(format!("--sweeps must be a nonnegative integer, got {s:?}")),
    }
}

fn cmd_mc(a: &McArgs) -> Outcome {
    let mut errs = Vec::new();
    let sweeps = parse_count(&a.sweeps).map_err(|e| errs.push(e)).ok();
    let params = ChainParams { beta: a.beta, mu: a.mu, q: a.q, k_max: a.k_max };
    if let Err(e) = params.validate() {
        errs.push(e.to_string());
    }
    if a.n == 0 {
        errs.push("--N must be positive".to_string());
    }
    if a.mode != McMode::Run && (a.resume.is_some() || a.checkpoint.is_some() || a.trace.is_some()) {
        errs.push("--trace, --checkpoint and --resume require --mode run".to_string());
    }
    usage_if(errs)?;
    let sweeps = sweeps.unwrap();
    match a.mode {
        McMode::Check => {
            let r = joint_histogram_check(a.n, params, sweeps, a.seed)?;
            let doc = json!({
                "command": "mc", "mode": "check", "N": a.n, "K_max": a.k_max, "q": a.q,
                "beta": a.beta, "mu": a.mu, "steps": sweeps, "seed": a.seed, "report": r,
            });
            write_out(a.output.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&doc).map_err(Error::from)?))?;
            eprintln!(
                "{} cells, max |z| = {:.3} (tolerance {})",
                r.cells.len(),
                r.max_abs_z,
                r.tolerance
            );
            Ok(if r.ok { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        McMode::Run => {
            let mut chain = match &a.resume {
                Some(p) => {
                    let c = ChainState::from_checkpoint(&fs::read_to_string(p)?)?;
                    if *c.params() != params || c.n_strips() != a.n {
                        return Err(Failure::Usage(vec![
                            "checkpoint parameters differ from the command line".to_string(),
                        ]));
                    }
                    c
                }
                None => ChainState::new(a.n, params, a.seed)?,
            };
            let mut buf = Vec::new();
            writeln!(buf, "{TRACE_HEADER}")?;
            run_with_trace(&mut chain, sweeps, a.trace_every, &mut buf)?;
            write_out(a.trace.as_deref(), std::str::from_utf8(&buf).expect("trace is ASCII"))?;
            if let Some(p) = &a.checkpoint {
                write_out(Some(p), &chain.to_checkpoint()?)?;
            }
            let s = chain.stats();
            eprintln!(
                "{} steps; acceptance {:.4}; insert {}/{}, delete {}/{}, flip {}/{}",
                chain.steps(),
                s.acceptance_rate(),
                s.insert.accepted,
                s.insert.proposed,
                s.delete.accepted,
                s.delete.proposed,
                s.flip.accepted,
                s.flip.proposed
            );
            Ok(EXIT_PASS)
        }
        McMode::FreeEnergy => {
            let e = estimate_free_energy(a.n, params, sweeps, a.seed)?;
            write_out(a.output.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&e).map_err(Error::from)?))?;
            eprintln!("(1/N) ln Xi = {:.6} +- {:.6}", e.value, e.error);
            Ok(EXIT_PASS)
        }
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(config::ConfigError(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS });
        }
    };
    if let Err(m) = init_threads() {
        eprintln!("error: {m}");
        return ExitCode::from(EXIT_USAGE);
    }
    let outcome = match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Phase(a) => cmd_phase(a),
        Command::Transfer(a) => cmd_transfer(a),
        Command::Mc(a) => cmd_mc(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(errs)) => {
            eprintln!("error: invalid arguments:");
            for e in errs {
                eprintln!("  - {e}");
            }
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Domain(_) | Error::Parse { .. } => EXIT_USAGE,
                Error::Resource { .. } => EXIT_SKIPPED,
                _ => EXIT_CHECK_FAILED,
            })
        }
    }
}
