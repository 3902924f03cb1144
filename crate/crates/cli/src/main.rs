use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use monotone_core::burnside::check;
use monotone_core::cache::ENV_VAR;
use monotone_core::{
    census, cycle_types, dedekind, known_values, Budget, Cache, CensusReport, Engine, Error,
    Method, PhiResult, Policy, VarPerm, Verification,
};
use serde_json::json;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_IO: u8 = 4;

/// Exact counts of monotone Boolean functions fixed by variable permutations, and of
/// their equivalence classes.
#[derive(Parser)]
#[command(name = "monotone", version)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Directory of cached function sets.
    #[arg(long, global = true, env = ENV_VAR)]
    cache_dir: Option<PathBuf>,
    /// Which published constants may stand in for computation.
    #[arg(long, global = true, default_value = "quick")]
    policy: Policy,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on element pairs visited by square-map sums.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_pairs: Option<u64>,
    /// Cap on streamed functions and ideal-counting steps.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_ideals: Option<u64>,
    /// Give up (exit 3) after this many seconds.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    timeout_seconds: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Count the functions fixed by one permutation.
    Phi {
        #[arg(value_parser = clap::value_parser!(u8).range(0..=9))]
        n: u8,
        /// Cycle notation with 1-based variables, e.g. "(12)(345)"; "()" is the identity.
        cycles: String,
        #[arg(long)]
        method: Option<Method>,
    },
    /// Count inequivalent monotone functions of n variables.
    Rn {
        #[arg(value_parser = clap::value_parser!(u8).range(0..=9))]
        n: u8,
    },
    /// Count monotone functions of n variables.
    Dn {
        #[arg(value_parser = clap::value_parser!(u8).range(0..=9))]
        n: u8,
    },
    /// Recompute a census, or re-check a saved JSON report, against the published tables.
    Verify {
        #[arg(value_parser = clap::value_parser!(u8).range(0..=9), required_unless_present = "report")]
        n: Option<u8>,
        #[arg(long, conflicts_with = "n")]
        report: Option<PathBuf>,
    },
    /// Manage cached function sets.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    List,
    Clear,
    /// Precompute D_n and the fixed-point sets of S_n that fit the budget.
    Warm {
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=9))]
        n: u8,
    },
}

enum Failure {
    Core(Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Format { .. } => EXIT_IO,
        Error::Capacity { .. }
        | Error::Infeasible(_)
        | Error::NotApplicable(_)
        | Error::Overflow(_)
        | Error::MissingKey(_) => EXIT_INFEASIBLE,
        Error::NotDivisible { .. } => EXIT_MISMATCH,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = &cli.run;
    if let Some(t) = run.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
        {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if let Some(secs) = run.timeout_seconds {
        std::thread::spawn(move || {
            std::thread::sleep(Duration::from_secs(secs));
            eprintln!("error: timed out after {secs}s");
            std::process::exit(EXIT_INFEASIBLE.into());
        });
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(EXIT_MISMATCH),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn engine(run: &RunConfig) -> Engine {
    let defaults = Budget::default();
    let budget = Budget {
        pairs: run.budget_pairs.unwrap_or(defaults.pairs),
        ideals: run.budget_ideals.unwrap_or(defaults.ideals),
        ..defaults
    };
    let mut engine = Engine::new(budget).with_progress(|msg| eprintln!("{msg}"));
    if let Some(dir) = cache_dir(run) {
        engine = engine.with_cache(Cache::new(dir));
    }
    engine
}

fn cache_dir(run: &RunConfig) -> Option<PathBuf> {
    run.cache_dir.clone().or_else(Cache::default_dir)
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let run = &cli.run;
    match &cli.command {
        Command::Phi { n, cycles, method } => {
            let p = VarPerm::parse(cycles, *n as usize)?;
            let start = Instant::now();
            let t = p.cycle_type();
            let r = engine(run).phi(&t, *method, run.policy.constants_for(&t))?;
            print_phi(run.format, &r, start.elapsed());
        }
        Command::Rn { n } => {
            let report = run_census(run, *n as usize)?;
            print_report(run.format, &report);
        }
        Command::Dn { n } => {
            let n = *n as usize;
            let d = dedekind(&engine(run), n)?;
            let matches = known_values().d(n).ok().map(|k| *k == d);
            match run.format {
                Format::Text => println!("{d}"),
                Format::Json => println!(
                    "{}",
                    json!({ "n": n, "d": d.to_string(), "matches_registry": matches })
                ),
                Format::Csv => println!("n,d,matches_registry\n{n},{d},{}", opt(matches)),
            }
            if matches == Some(false) {
                eprintln!("d_{n} differs from the published value");
                return Err(Failure::Mismatch);
            }
        }
        Command::Verify { n, report } => {
            let v = match (n, report) {
                (_, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                        path: path.clone(),
                        source,
                    })?;
                    check(CensusReport::from_json(&text)?)
                }
                (Some(n), None) => check(run_census(run, *n as usize)?),
                (None, None) => unreachable!("clap requires n or --report"),
            };
            print_verification(run.format, &v);
            if !v.ok() {
                return Err(Failure::Mismatch);
            }
        }
        Command::Cache { action } => {
            let dir = cache_dir(run).ok_or_else(|| {
                Error::MissingKey(format!("cache directory (set --cache-dir or {ENV_VAR})"))
            })?;
            let cache = Cache::new(&dir);
            match action {
                CacheAction::List => {
                    for e in cache.list()? {
                        println!("{}\t{}", e.name, e.bytes);
                    }
                }
                CacheAction::Clear => {
                    let removed = cache.clear()?;
                    println!("removed {removed} files from {}", dir.display());
                }
                CacheAction::Warm { n } => warm(run, &cache, *n as usize)?,
            }
        }
    }
    Ok(())
}

fn run_census(run: &RunConfig, n: usize) -> Result<CensusReport, Error> {
    let engine = engine(run);
    let total = cycle_types(n).len();
    let mut done = 0;
    let mut last = Instant::now();
    census(&engine, n, run.policy, |r| {
        done += 1;
        eprintln!(
            "[{done}/{total}] phi_{n}({}) = {} via {} in {:.3}s",
            r.cycle_type,
            r.value,
            r.method,
            last.elapsed().as_secs_f64()
        );
        last = Instant::now();
    })
}

fn warm(run: &RunConfig, cache: &Cache, n: usize) -> Result<(), Error> {
    let engine = engine(run);
    for t in cycle_types(n) {
        let path = cache.path(&t);
        if path.exists() {
            println!("{}\tpresent", path.display());
            continue;
        }
        match engine.fixed_point_set(&t.representative()) {
            Ok(fixed) => {
                // the engine caches only large sets on its own
                if !path.exists() {
                    cache.store(&t, fixed.set())?;
                }
                println!("{}\t{} functions", path.display(), fixed.len());
            }
            Err(e @ Error::Capacity { .. }) => eprintln!("skipping phi_{n}({t}): {e}"),
            Err(e) => return Err(e),
        }
        engine.forget();
    }
    Ok(())
}

fn opt(b: Option<bool>) -> String {
    b.map_or(String::new(), |b| b.to_string())
}

fn print_phi(format: Format, r: &PhiResult, elapsed: Duration) {
    let secs = elapsed.as_secs_f64();
    let notation = r.cycle_type.notation();
    match format {
        Format::Text => {
            println!("{}", r.value);
            println!("phi_{}({notation}) via {} in {secs:.3}s", r.n, r.method);
        }
        Format::Json => println!(
            "{}",
            json!({
                "n": r.n,
                "cycle_type": notation,
                "phi": r.value.to_string(),
                "method": r.method.name(),
                "seconds": secs,
            })
        ),
        Format::Csv => println!(
            "n,cycle_type,phi,method,seconds\n{},{notation},{},{},{secs:.6}",
            r.n, r.value, r.method
        ),
    }
}

fn print_report(format: Format, report: &CensusReport) {
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
    }
}

fn print_verification(format: Format, v: &Verification) {
    if format != Format::Text {
        return print_report(format, &v.report);
    }
    print!("{}", v.report.to_text());
    let computed = v.matched + v.mismatched;
    println!(
        "{}/{} computed, {} from the registry; {} match, {} differ; r_{} {}",
        computed,
        v.report.entries.len(),
        v.from_registry,
        v.matched,
        v.mismatched,
        v.report.n,
        if v.r_matches { "matches" } else { "DIFFERS" }
    );
}
