//! `qcommute`: counts of ζ-commuting matrix pairs over finite fields.

mod output;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};

use qcommute_core::counting::{ClosedForm, CountSet, Method};
use qcommute_core::oracle::{self, OracleJob};
use qcommute_core::qfunc::{self, ExactFactors, VALIDITY_NOTE};
use qcommute_core::suite::{self, Level, SuiteOptions};
use qcommute_core::{Error, FieldElement, FieldSpec};

use output::{CheckRecord, CountRecord, Format, PolyRecord, SeriesRecord, Sink};

/// Largest `n` accepted by the symbolic commands.
const MAX_ORDER: usize = 40;

#[derive(Parser)]
#[command(name = "qcommute", version, about = "Count pairs (A, B) of matrices over F_q with AB = zeta BA")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Jsonl, global = true)]
    format: Format,
    /// Add wall-clock times to records (output is then no longer reproducible byte for byte).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count one set at a concrete q.
    Count(CountArgs),
    /// Print the counting polynomial in q.
    Poly(PolyArgs),
    /// Print the generating-series coefficients.
    Series(SeriesArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SetArg {
    K,
    U,
    N,
    S,
}

impl From<SetArg> for CountSet {
    fn from(s: SetArg) -> Self {
        match s {
            SetArg::K => CountSet::K,
            SetArg::U => CountSet::U,
            SetArg::N => CountSet::N,
            SetArg::S => CountSet::S,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Closed,
    Series,
    Oracle,
    All,
}

#[derive(Args)]
struct FieldArgs {
    /// Field size (a prime power).
    #[arg(long, conflicts_with_all = ["p", "k"])]
    q: Option<u64>,
    /// Characteristic, with --k.
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree (default 1).
    #[arg(long, requires = "p")]
    k: Option<u32>,
}

impl FieldArgs {
    fn field(&self) -> Result<Option<FieldSpec>, Failure> {
        Ok(match (self.q, self.p) {
            (Some(q), _) => Some(FieldSpec::of_order(q)?),
            (None, Some(p)) => Some(FieldSpec::new(p, self.k.unwrap_or(1))?),
            (None, None) => None,
        })
    }
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_enum)]
    set: SetArg,
    #[arg(long)]
    n: usize,
    /// Multiplicative order of zeta.
    #[arg(long)]
    m: Option<u64>,
    /// Zeta as a field element, e.g. "2" or "1+t".
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    method: MethodArg,
    /// Oracle worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Report oracle shard progress on stderr.
    #[arg(long)]
    progress: bool,
}

#[derive(Args)]
struct PolyArgs {
    #[arg(long, value_enum)]
    set: SetArg,
    #[arg(long)]
    n: usize,
    /// Multiplicative order of zeta (ignored for N).
    #[arg(long)]
    m: Option<u64>,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    set: SetArg,
    /// Multiplicative order of zeta (ignored for N).
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    /// Evaluate each coefficient exactly at this q.
    #[arg(long)]
    eval_q: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
    level: LevelArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

enum Failure {
    /// Checks ran and something disagreed.
    Verification(String),
    Usage(String),
    Budget(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::Integrality(_) | Error::Singular | Error::NotInvertible | Error::InverseOfZero => {
                Failure::Internal(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut sink = Sink::new(cli.format);
    let result = match &cli.command {
        Command::Count(a) => count(a, cli.timings, &mut sink),
        Command::Poly(a) => poly(a, cli.timings, &mut sink),
        Command::Series(a) => series(a, &mut sink),
        Command::Verify(a) => verify(a, cli.timings, &mut sink),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Verification(m) => (1, "verification failed", m),
                Failure::Internal(m) => (1, "internal error", m),
                Failure::Usage(m) => (2, "usage error", m),
                Failure::Budget(m) => (3, "refused", m),
            };
            eprintln!("qcommute: {kind}: {msg}");
            ExitCode::from(code)
        }
    }
}

fn threads(requested: Option<usize>) -> usize {
    requested.or_else(|| std::thread::available_parallelism().ok().map(|n| n.get())).unwrap_or(1).max(1)
}

fn ms(start: Instant, timings: bool) -> Option<f64> {
    timings.then(|| start.elapsed().as_secs_f64() * 1e3)
}

/// `m` for a symbolic command: required except for N, where it defaults to 1.
fn symbolic_m(set: CountSet, m: Option<u64>) -> Result<u64, Failure> {
    match (set, m) {
        (_, Some(0)) => Err(Failure::Usage("--m must be positive".into())),
        (_, Some(m)) => Ok(m),
        (CountSet::N, None) => Ok(1),
        (_, None) => Err(Failure::Usage(format!("--m is required for set {set}"))),
    }
}

fn check_order(n: usize, what: &str) -> Result<(), Failure> {
    if n > MAX_ORDER {
        return Err(Failure::Usage(format!("{what} is at most {MAX_ORDER}")));
    }
    Ok(())
}

/// The resolved `ζ`: its order, and the element itself when one is needed.
struct Zeta {
    m: u64,
    element: Option<FieldElement>,
}

fn resolve_zeta(a: &CountArgs, set: CountSet, field: &FieldSpec, needs_element: bool) -> Result<Zeta, Failure> {
    let q = field.q() as u64;
    if let Some(lit) = &a.zeta {
        let z = field.parse_element(lit)?;
        if z.is_zero() {
            return Err(Error::ZeroZeta.into());
        }
        let m = field.mult_order(z)?;
        if let Some(given) = a.m {
            if given != m {
                return Err(Failure::Usage(format!("zeta {lit} has order {m}, not {given}")));
            }
        }
        return Ok(Zeta { m, element: Some(z) });
    }
    let m = match (set, a.m) {
        (CountSet::N, None) => 1,
        _ => symbolic_m(set, a.m)?,
    };
    if !(q - 1).is_multiple_of(m) {
        return Err(Failure::Usage(format!("m = {m} does not divide q - 1 = {}", q - 1)));
    }
    let element =
        if needs_element { Some(field.roots_of_order(m).first().copied().expect("m divides q - 1")) } else { None };
    Ok(Zeta { m, element })
}

fn count(a: &CountArgs, timings: bool, sink: &mut Sink) -> Result<(), Failure> {
    let set = CountSet::from(a.set);
    let field = a.field.field()?.ok_or_else(|| Failure::Usage("a field is required: --q or --p/--k".into()))?;
    let q = field.q() as u64;
    let methods: Vec<Method> = match a.method {
        MethodArg::Closed => vec![Method::ClosedForm],
        MethodArg::Series => vec![Method::Series],
        MethodArg::Oracle => vec![Method::Oracle],
        MethodArg::All => vec![Method::ClosedForm, Method::Series, Method::Oracle],
    };
    let zeta = resolve_zeta(a, set, &field, methods.contains(&Method::Oracle))?;
    let budget = oracle::budget_from_env()?;
    if methods.contains(&Method::Oracle) {
        match set {
            CountSet::S => {
                let needed = (q as u128).checked_pow(a.n as u32).unwrap_or(u128::MAX);
                if needed > budget {
                    return Err(Error::BudgetExceeded { needed, budget }.into());
                }
            }
            _ => oracle::check_budget(&field, a.n, budget)?,
        }
    }
    if methods.contains(&Method::Series) {
        check_order(a.n, "--n for the series method")?;
    }
    let zeta_text = zeta.element.map(|z| field.format_element(z));
    let mut values: Vec<BigUint> = Vec::new();
    for method in methods.iter().copied() {
        let start = Instant::now();
        let value = match method {
            Method::ClosedForm => ClosedForm::new(q)?.count(set, a.n, zeta.m)?,
            Method::Series => {
                let v = qfunc::count_eval(set, zeta.m, a.n, q)?;
                v.to_biguint().ok_or_else(|| Failure::Internal(format!("negative count {v}")))?
            }
            Method::Oracle => {
                let z = zeta.element.expect("resolved for the oracle");
                match set {
                    CountSet::S => oracle::oracle_count_s(&field, a.n, z, budget)?,
                    _ => {
                        let mut job = OracleJob::new(&field, a.n, z, set)?.workers(threads(a.threads)).budget(budget);
                        if a.progress {
                            job = job.progress(1, Arc::new(|d, t| eprintln!("shards {d}/{t}")));
                        }
                        oracle::oracle_count(&job)?
                    }
                }
            }
        };
        sink.emit(&CountRecord {
            set: set.to_string(),
            n: a.n,
            q,
            m: zeta.m,
            zeta: zeta_text.clone(),
            method: method.to_string(),
            value: value.to_string(),
            wall_ms: ms(start, timings),
        })?;
        values.push(value);
    }
    if a.method == MethodArg::All {
        let consistent = values.windows(2).all(|w| w[0] == w[1]);
        sink.emit(&CountRecord {
            set: set.to_string(),
            n: a.n,
            q,
            m: zeta.m,
            zeta: zeta_text,
            method: "verdict".into(),
            value: if consistent { "consistent" } else { "inconsistent" }.into(),
            wall_ms: None,
        })?;
        if !consistent {
            return Err(Failure::Verification("methods disagree".into()));
        }
    }
    Ok(())
}

fn poly(a: &PolyArgs, timings: bool, sink: &mut Sink) -> Result<(), Failure> {
    let set = CountSet::from(a.set);
    let m = symbolic_m(set, a.m)?;
    check_order(a.n, "--n")?;
    let start = Instant::now();
    let p = qfunc::count_poly(set, m, a.n)?;
    sink.emit(&PolyRecord {
        set: set.to_string(),
        n: a.n,
        m,
        poly: p.to_string(),
        validity: VALIDITY_NOTE.into(),
        wall_ms: ms(start, timings),
    })?;
    Ok(())
}

fn series(a: &SeriesArgs, sink: &mut Sink) -> Result<(), Failure> {
    let set = CountSet::from(a.set);
    let m = symbolic_m(set, a.m)?;
    check_order(a.max_n, "--max-n")?;
    if a.eval_q.is_some_and(|q| q < 2) {
        return Err(Failure::Usage("--eval-q must be at least 2".into()));
    }
    let s = qfunc::series_for(set, m, a.max_n)?;
    for (degree, c) in s.coeffs().iter().enumerate() {
        let value = match a.eval_q {
            Some(q) => Some(c.eval(&BigInt::from(q))?.to_string()),
            None => None,
        };
        sink.emit(&SeriesRecord {
            set: set.to_string(),
            m,
            degree,
            coefficient: c.to_string(),
            eval_q: a.eval_q,
            value,
        })?;
    }
    Ok(())
}

fn verify(a: &VerifyArgs, timings: bool, sink: &mut Sink) -> Result<(), Failure> {
    let opts = SuiteOptions {
        level: match a.level {
            LevelArg::Fast => Level::Fast,
            LevelArg::Full => Level::Full,
        },
        threads: threads(a.threads),
        seed: a.seed,
        budget: oracle::budget_from_env()?,
    };
    let start = Instant::now();
    let mut io_error = None;
    let results = suite::run_suite_with(&opts, &ExactFactors, &mut |r| {
        let record = CheckRecord {
            check: r.name.clone(),
            passed: r.passed,
            detail: r.detail.clone(),
            wall_ms: timings.then_some(r.elapsed.as_secs_f64() * 1e3),
        };
        if let Err(e) = sink.emit(&record) {
            io_error.get_or_insert(e);
        }
    });
    if let Some(e) = io_error {
        return Err(e.into());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    sink.emit(&CheckRecord {
        check: "summary".into(),
        passed: failed == 0,
        detail: format!("{}/{} checks passed", results.len() - failed, results.len()),
        wall_ms: ms(start, timings),
    })?;
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} checks failed")));
    }
    Ok(())
}
