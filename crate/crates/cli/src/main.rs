//! `apdensity`: command-line front end for the arithmetic-progression
//! density toolkit.
//!
//! Exit status: 0 success, 1 I/O or internal failure, 2 invalid arguments,
//! 3 a verification failed, 4 an enumeration cap was exceeded. Every failure
//! prints exactly one line to standard error:
//!
//! ```text
//! apdensity: error code=<id> kind=<argument|verification|resource|io> message="<text>"
//! ```

mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use apdensity_core::{apcount, certify, lpbound, necklace};
use apdensity_core::{Error, ErrorKind, LpStatus, Order, PrimeModulus, QuadExt, TableCell, Theorem};
use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{ConfigError, FileConfig, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "apdensity",
    version,
    about = "Necklace enumeration, exact AP minima, SOS certificate checks and LP bounds over Z_n"
)]
struct Cli {
    /// Largest n enumerated by brute force (at most 32).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output encoding.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true, conflicts_with = "format")]
    json: bool,
    /// Write output to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List fixed-density binary necklaces.
    Necklaces {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ones: usize,
        #[arg(long, default_value = "coollex", value_parser = parse_order)]
        order: Order,
    },
    /// Table of W(k, Z_n, D/n) for a range of n and every D.
    Table {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        /// One CSV row per n (columns D = 0..=n_max) instead of one per (n, D).
        #[arg(long)]
        wide: bool,
    },
    /// Distribution of AP counts over necklaces with a fixed number of ones.
    Dist {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ones: usize,
    },
    /// Closed-form certified lower bound λ(D).
    Lambda {
        #[arg(long)]
        p: u64,
        #[arg(long = "D", alias = "d")]
        d: i64,
        /// Certificate family (default: general).
        #[arg(long, value_parser = parse_theorem)]
        theorem: Option<Theorem>,
    },
    /// Expand and check a sum-of-squares certificate exactly.
    Certify {
        #[arg(long)]
        p: u64,
        /// Certificate family (default: small when available, else general).
        #[arg(long, value_parser = parse_theorem)]
        theorem: Option<Theorem>,
        /// Corrupt one coefficient before checking, as TERM=DELTA (TERM is a
        /// term name such as sigma2, or lambda; DELTA an exact number such
        /// as 1/7). The verifier is expected to reject the result.
        #[arg(long, value_parser = parse_perturbation)]
        perturb: Option<(String, QuadExt)>,
    },
    /// Solve the LP bound for one (p, D).
    Lp {
        #[arg(long)]
        p: u64,
        #[arg(long = "D", alias = "d")]
        d: u32,
    },
    /// Least D with a positive LP bound.
    Threshold {
        #[arg(long)]
        p: u64,
    },
    /// Thresholds for every prime up to p-max.
    ThresholdCurve {
        #[arg(long)]
        p_max: u64,
        /// Write the CSV table to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_perturbation(s: &str) -> Result<(String, QuadExt), String> {
    let (target, delta) = s.split_once('=').ok_or("expected TERM=DELTA, e.g. sigma2=1/7")?;
    let delta: QuadExt = delta.trim().parse().map_err(|e: Error| e.to_string())?;
    Ok((target.trim().to_string(), delta))
}

fn parse_order(s: &str) -> Result<Order, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Everything a command can fail with.
#[derive(Debug)]
enum Failure {
    Core(Error),
    /// A check ran to completion and came out negative.
    NotVerified(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Unreadable(m) => Failure::Io(m),
            ConfigError::Invalid(e) => Failure::Core(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) => match e.kind() {
                ErrorKind::Argument => 2,
                ErrorKind::Verification => 3,
                ErrorKind::Resource => 4,
            },
            Failure::NotVerified(_) => 3,
            Failure::Io(_) => 1,
        }
    }

    fn diagnostic(&self) -> String {
        let (code, kind, msg) = match self {
            Failure::Core(e) => {
                let kind = match e.kind() {
                    ErrorKind::Argument => "argument",
                    ErrorKind::Verification => "verification",
                    ErrorKind::Resource => "resource",
                };
                (e.code(), kind, e.to_string())
            }
            Failure::NotVerified(m) => ("not_verified", "verification", m.clone()),
            Failure::Io(m) => ("io", "io", m.clone()),
        };
        let msg = serde_json::to_string(&msg).expect("strings serialize");
        format!("apdensity: error code={code} kind={kind} message={msg}")
    }
}

type Outcome = Result<String, Failure>;

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn csv_of<I: IntoIterator<Item = String>>(header: &str, rows: I) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn run_necklaces(cfg: &RunConfig, n: usize, ones: usize, order: Order) -> Outcome {
    let list = necklace::generate(n, ones, order)?;
    Ok(match cfg.format {
        Format::Json => to_json(&list),
        Format::Csv => csv_of("necklace", list.iter().map(ToString::to_string)),
        Format::Text => list.iter().map(|b| format!("{b}\n")).collect(),
    })
}

fn run_table(cfg: &RunConfig, k: usize, n_min: usize, n_max: usize, wide: bool) -> Outcome {
    if n_min > n_max {
        return Err(Error::InvalidArgument(format!("n-min {n_min} exceeds n-max {n_max}")).into());
    }
    if n_max > cfg.enumeration_cap {
        return Err(Error::CapExceeded {
            n: n_max,
            cap: cfg.enumeration_cap,
        }
        .into());
    }
    if k < 3 || k > n_min {
        return Err(Error::InvalidArgument(format!("need 3 <= k <= n-min, got k = {k}")).into());
    }
    let rows = apcount::w_table(k, n_min..=n_max, cfg.enumeration_cap);
    // every cell is in range after the checks above
    if let Some(TableCell::Uncomputed(why)) = rows.iter().flat_map(|r| &r.cells).find(|c| c.value().is_none()) {
        return Err(Failure::Io(format!("table cell not computed: {why}")));
    }
    let value = |c: &TableCell| c.value().expect("checked above").to_string();
    Ok(match cfg.format {
        Format::Json => to_json(&rows),
        Format::Csv if wide => {
            let header: Vec<String> = std::iter::once("n".to_string())
                .chain((0..=n_max).map(|d| format!("D={d}")))
                .collect();
            csv_of(
                &header.join(","),
                rows.iter().map(|r| {
                    let mut cells: Vec<String> = vec![r.n.to_string()];
                    cells.extend(r.cells.iter().map(value));
                    cells.resize(n_max + 2, String::new());
                    cells.join(",")
                }),
            )
        }
        Format::Csv => csv_of(
            "n,D,W",
            rows.iter().flat_map(|r| {
                r.cells
                    .iter()
                    .enumerate()
                    .map(move |(d, c)| format!("{},{d},{}", r.n, value(c)))
            }),
        ),
        Format::Text => {
            let width = rows
                .iter()
                .flat_map(|r| r.cells.iter().map(|c| value(c).len()))
                .max()
                .unwrap_or(1)
                .max(2);
            let mut s = format!("W({k}, Z_n, D/n)\n{:>4}", "n\\D");
            for d in 0..=n_max {
                let _ = write!(s, " {d:>width$}");
            }
            s.push('\n');
            for r in &rows {
                let _ = write!(s, "{:>4}", r.n);
                for c in &r.cells {
                    let _ = write!(s, " {:>width$}", value(c));
                }
                s.push('\n');
            }
            s
        }
    })
}

fn run_dist(cfg: &RunConfig, n: usize, k: usize, ones: usize) -> Outcome {
    let stats = apcount::min_aps(n, k, ones, cfg.enumeration_cap)?;
    let rows = stats.histogram.iter().map(|(c, m)| format!("{c},{m}"));
    Ok(match cfg.format {
        Format::Json => to_json(&stats),
        Format::Csv => csv_of("count,necklaces", rows),
        Format::Text => {
            let mut s = format!(
                "W({k}, Z_{n}, {ones}/{n}) = {} (first minimizer in cool-lex order: {})\n",
                stats.min_count, stats.witness
            );
            s.push_str(&csv_of("count,necklaces", rows));
            s
        }
    })
}

fn prime(p: u64) -> Result<PrimeModulus, Failure> {
    Ok(PrimeModulus::new(p)?)
}

fn run_lambda(cfg: &RunConfig, p: u64, d: i64, theorem: Option<Theorem>) -> Outcome {
    let pm = prime(p)?;
    if d < 0 || d > p as i64 {
        return Err(Error::InvalidArgument(format!("D = {d} outside 0..={p}")).into());
    }
    let value = match theorem.unwrap_or(Theorem::General) {
        Theorem::General => certify::lambda_general(pm, d).to_string(),
        Theorem::SmallPrime => certify::lambda_small(pm, d)?.to_string(),
    };
    #[derive(Serialize)]
    struct Row<'a> {
        p: u64,
        #[serde(rename = "D")]
        d: i64,
        theorem: Theorem,
        lambda: &'a str,
    }
    Ok(match cfg.format {
        Format::Json => to_json(&Row {
            p,
            d,
            theorem: theorem.unwrap_or(Theorem::General),
            lambda: &value,
        }),
        Format::Csv => csv_of("p,D,lambda", [format!("{p},{d},{value}")]),
        Format::Text => format!("{value}\n"),
    })
}

fn certify_text(r: &apdensity_core::CertificateReport) -> String {
    let family = match r.theorem {
        Theorem::General => "general",
        Theorem::SmallPrime => "small-prime",
    };
    let mut s = format!(
        "p = {}: {family} certificate {}\n",
        r.p,
        if r.verified { "verified" } else { "NOT verified" }
    );
    let _ = writeln!(s, "bound: lambda(D) = {}", r.bound_formula);
    let ds: Vec<String> = r.checked_d.iter().map(ToString::to_string).collect();
    let _ = writeln!(s, "identity checked exactly at D = {}", ds.join(", "));
    match &r.convention {
        Some(c) => {
            let _ = writeln!(s, "reading: {c}");
        }
        None => s.push_str("no reading of the certificate makes the identity hold\n"),
    }
    for t in r.trials.iter().filter(|t| !t.verified) {
        let bad: Vec<String> = t
            .residual
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| match (&x.omega, &x.diagnostic) {
                (Some(w), _) => format!("D={}: {}", x.d, w.nonzero_slots().join(" ")),
                (None, Some(msg)) => format!("D={}: {msg}", x.d),
                (None, None) => format!("D={}", x.d),
            })
            .collect();
        let _ = writeln!(s, "rejected reading: {} [{}]", t.convention, bad.join("; "));
    }
    s.push_str("term omega-lines:\n");
    for line in &r.term_lines {
        let shown = match (&line.omega, &line.diagnostic) {
            (Some(w), _) => w.to_string(),
            (None, Some(m)) => format!("not invariant: {m}"),
            (None, None) => String::new(),
        };
        let _ = writeln!(s, "  {} at D={}: {shown}", line.term, line.d);
    }
    s
}

fn run_certify(cfg: &RunConfig, p: u64, theorem: Option<Theorem>, perturb: Option<(String, QuadExt)>) -> Outcome {
    let pm = prime(p)?;
    let theorem = theorem.unwrap_or(if certify::SMALL_PRIMES.contains(&pm.get()) {
        Theorem::SmallPrime
    } else {
        Theorem::General
    });
    let report = match (theorem, perturb) {
        (_, Some((target, delta))) => certify::verify_perturbed(pm, theorem, &target, &delta)?,
        (Theorem::General, None) => certify::verify_general(pm),
        (Theorem::SmallPrime, None) => certify::verify_smallprime(pm)?,
    };
    let out = match cfg.format {
        Format::Json => to_json(&report),
        Format::Csv => csv_of(
            "p,theorem,verified,convention,bound",
            [format!(
                "{p},{},{},\"{}\",\"{}\"",
                if theorem == Theorem::General {
                    "general"
                } else {
                    "small-prime"
                },
                report.verified,
                report.convention.clone().unwrap_or_default().replace('"', "\"\""),
                report.bound_formula
            )],
        ),
        Format::Text => certify_text(&report),
    };
    if report.verified {
        Ok(out)
    } else {
        // still show the report, then fail
        emit(cfg, &out)?;
        Err(Failure::NotVerified(format!("certificate at p = {p} does not verify")))
    }
}

fn run_lp(cfg: &RunConfig, p: u64, d: u32) -> Outcome {
    let r = lpbound::solve_lp(p, d)?;
    let out = match cfg.format {
        Format::Json => to_json(&r),
        Format::Csv => csv_of(
            "p,D,bound,status,residual",
            [format!(
                "{},{},{:.9},{},{:e}",
                r.p,
                r.d,
                r.bound,
                status_name(r.status),
                r.residuals
            )],
        ),
        Format::Text => {
            let u: Vec<String> = r.u_opt.iter().map(|x| format!("{x:.9}")).collect();
            format!(
                "bound = {:.9}\nstatus = {}\nmax violation = {:e}\nu = [{}]\n",
                r.bound,
                status_name(r.status),
                r.residuals,
                u.join(", ")
            )
        }
    };
    match r.status {
        LpStatus::Optimal => Ok(out),
        _ => {
            emit(cfg, &out)?;
            Err(lpbound::require_optimal(r).unwrap_err().into())
        }
    }
}

fn status_name(s: LpStatus) -> &'static str {
    match s {
        LpStatus::Optimal => "optimal",
        LpStatus::Infeasible => "infeasible",
        LpStatus::NumericalFailure => "numerical-failure",
    }
}

const CURVE_HEADER: &str = "p,Dstar,delta_star,lower_bracket,upper_bracket";

fn curve_csv(rows: &[apdensity_core::ThresholdRow]) -> String {
    csv_of(
        CURVE_HEADER,
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{}",
                r.p, r.dstar, r.delta_star, r.lower_bracket, r.upper_bracket
            )
        }),
    )
}

fn run_threshold(cfg: &RunConfig, p: u64) -> Outcome {
    let dstar = lpbound::threshold(p)?;
    let (lower_bracket, upper_bracket) = lpbound::bracket(p as u32);
    let row = apdensity_core::ThresholdRow {
        p: p as u32,
        dstar,
        delta_star: dstar as f64 / p as f64,
        lower_bracket,
        upper_bracket,
    };
    Ok(match cfg.format {
        Format::Json => to_json(&row),
        Format::Csv => curve_csv(&[row]),
        Format::Text => format!("{dstar}\n"),
    })
}

fn run_curve(cfg: &RunConfig, p_max: u64, csv: Option<PathBuf>) -> Outcome {
    let rows = lpbound::threshold_curve(p_max)?;
    if let Some(path) = csv {
        write_file(&path, &curve_csv(&rows))?;
    }
    Ok(match cfg.format {
        Format::Json => to_json(&rows),
        Format::Csv => curve_csv(&rows),
        Format::Text => rows
            .iter()
            .map(|r| {
                format!(
                    "p = {:>3}  D* = {:>3}  D*/p = {:.4}  bracket [{}, {}]\n",
                    r.p, r.dstar, r.delta_star, r.lower_bracket, r.upper_bracket
                )
            })
            .collect(),
    })
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.output {
        Some(path) => write_file(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn dispatch(cfg: &RunConfig, command: Command) -> Outcome {
    match command {
        Command::Necklaces { n, ones, order } => run_necklaces(cfg, n, ones, order),
        Command::Table { k, n_min, n_max, wide } => run_table(cfg, k, n_min, n_max, wide),
        Command::Dist { n, k, ones } => run_dist(cfg, n, k, ones),
        Command::Lambda { p, d, theorem } => run_lambda(cfg, p, d, theorem),
        Command::Certify { p, theorem, perturb } => run_certify(cfg, p, theorem, perturb),
        Command::Lp { p, d } => run_lp(cfg, p, d),
        Command::Threshold { p } => run_threshold(cfg, p),
        Command::ThresholdCurve { p_max, csv } => run_curve(cfg, p_max, csv),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let format = if cli.json { Some(Format::Json) } else { cli.format };
    let cfg = RunConfig::resolve(FileConfig::from_env()?, cli.cap, cli.threads, format, cli.output)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.thread_count {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Io(format!("cannot start worker pool: {e}")))?;
    let text = pool.install(|| dispatch(&cfg, cli.command))?;
    emit(&cfg, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let first = first
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            let msg = serde_json::to_string(first).expect("strings serialize");
            eprintln!("apdensity: error code=invalid_argument kind=argument message={msg}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.diagnostic());
            ExitCode::from(f.exit_code())
        }
    }
}
