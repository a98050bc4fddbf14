use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use laorder_core::arith::is_prime;
use laorder_core::classify::{classify_general_factored, direct_classification};
use laorder_core::laorder::{l_value_factored, minimal_unit_power_factored};
use laorder_core::pell::{load_checkpoint, save_checkpoint, ConjectureScan};
use laorder_core::quadfield::global_unit_cache;
use laorder_core::tables::{
    d_range, generate_table, load_unit_cache_into, save_unit_cache, undetermined_stats, write_csv,
    write_jsonl, StatsPolicy, UndeterminedCase,
};
use laorder_core::{factorize, make_field, Error, PrimeFactorization};

/// Environment variable naming a unit-cache file to load before and save
/// after each command.
const UNIT_CACHE_ENV: &str = "LAORDER_UNIT_CACHE";

/// Checkpoint cadence for `conjecture --resume`, in primes.
const CHECKPOINT_EVERY: usize = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "laorder",
    version,
    about = "Locally associated orders in real quadratic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fundamental unit of Q(sqrt d) and its norm
    Unit {
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// L(n, d)
    Lfunc {
        /// Index, decimal or factored as q1^k1*q2^k2
        n: String,
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Minimal unit power m in R_n, L(n, d) and the direct verdict
    Minpow {
        n: String,
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Decide whether R_n is locally associated
    Classify {
        /// Index, decimal or factored as q1^k1*q2^k2
        n: String,
        #[arg(allow_negative_numbers = true)]
        d: i64,
        /// Print the rule trace
        #[arg(long)]
        trace: bool,
        /// Skip the rules and compute every prime power directly
        #[arg(long)]
        direct: bool,
        /// Print the full classification as JSON
        #[arg(long)]
        json: bool,
    },
    /// Table of verdicts over a range of d and 1 <= n <= n-max
    Table {
        #[arg(long)]
        d_min: u64,
        #[arg(long)]
        d_max: u64,
        #[arg(long)]
        n_max: u64,
        /// Only prime d (otherwise every squarefree d in range)
        #[arg(long)]
        primes_only: bool,
        #[arg(long, value_enum)]
        format: Format,
        /// Output file (standard output if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan primes p <= p-max for a minimal Pell solution with p | y
    Conjecture {
        #[arg(long)]
        p_max: u64,
        /// Checkpoint file: resume after the prime it records, and keep it updated
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Print one CSV row per prime
        #[arg(long)]
        verbose: bool,
    },
    /// Count the cases the rules leave to direct computation
    Stats {
        #[arg(long)]
        p_max: u64,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        case: u8,
        /// Largest index n, required for cases 2 and 3
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// A run that completed but found a counterexample.
#[derive(Debug)]
struct Counterexample;

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("counterexample found")
    }
}

impl std::error::Error for Counterexample {}

/// Parses `n` as a decimal or as `q1^k1*q2^k2*...` with every `q` prime.
fn parse_index(text: &str) -> anyhow::Result<PrimeFactorization> {
    let text = text.trim();
    if !text.contains(['*', '^']) {
        let n: u64 = text
            .parse()
            .map_err(|_| Error::Domain(format!("index {text:?} is not a positive integer")))?;
        if n == 0 {
            return Err(Error::Domain("order index must be positive".into()).into());
        }
        return Ok(factorize(n)?);
    }
    let mut pairs = Vec::new();
    for part in text.split('*') {
        let (base, exp) = part.split_once('^').unwrap_or((part, "1"));
        let bad = || Error::Domain(format!("malformed factor {part:?} in {text:?}"));
        let base = base.trim();
        let q: u64 = match base.parse() {
            Ok(q) => q,
            Err(_) if base.parse::<num_bigint::BigUint>().is_ok() => {
                return Err(Error::Capacity(format!("prime {base} exceeds 64 bits")).into())
            }
            Err(_) => return Err(bad().into()),
        };
        let k: u32 = exp.trim().parse().map_err(|_| bad())?;
        if !is_prime(q) {
            return Err(Error::Domain(format!("{q} in {text:?} is not prime")).into());
        }
        pairs.push((q, k));
    }
    Ok(PrimeFactorization::from_pairs(pairs)?)
}

fn verdict_text(la: bool) -> &'static str {
    if la {
        "locally associated"
    } else {
        "not locally associated"
    }
}

fn run(command: Command, out: &mut dyn Write) -> anyhow::Result<()> {
    match command {
        Command::Unit { d } => {
            let field = make_field(d)?;
            let u = global_unit_cache().get_or_compute(&field);
            let c = u.sqrt_coords();
            let scale = 2 / c.denom;
            writeln!(out, "{u}, norm {}", u.norm())?;
            writeln!(
                out,
                "({} + {}·√{})/2",
                &c.rational * scale,
                &c.irrational * scale,
                field.d()
            )?;
        }
        Command::Lfunc { n, d } => {
            let n = parse_index(&n)?;
            writeln!(out, "{}", l_value_factored(&n, d))?;
        }
        Command::Minpow { n, d } => {
            let n = parse_index(&n)?;
            let field = make_field(d)?;
            let r = minimal_unit_power_factored(&n, &field)?;
            writeln!(out, "m = {}", r.m)?;
            writeln!(out, "L = {}", r.l_value)?;
            writeln!(out, "{}", verdict_text(r.locally_associated))?;
        }
        Command::Classify {
            n,
            d,
            trace,
            direct,
            json,
        } => {
            let n = parse_index(&n)?;
            let c = if direct {
                direct_classification(&n, &make_field(d)?)?
            } else {
                classify_general_factored(&n, d)?
            };
            if json {
                serde_json::to_writer(&mut *out, &c)?;
                writeln!(out)?;
                return Ok(());
            }
            writeln!(out, "{}", verdict_text(c.verdict))?;
            if trace {
                for step in &c.trace {
                    writeln!(
                        out,
                        "  R_{}: {} -> {}",
                        step.subindex, step.rule, step.outcome
                    )?;
                }
                for dc in &c.direct_computations {
                    writeln!(
                        out,
                        "  direct R_{}: m = {}, L = {}",
                        dc.subindex, dc.m, dc.l_value
                    )?;
                }
            }
        }
        Command::Table {
            d_min,
            d_max,
            n_max,
            primes_only,
            format,
            out: path,
        } => {
            let ds: BTreeSet<u64> = d_range(d_min, d_max, primes_only)?;
            let rows = generate_table(&ds, n_max)?;
            let sink: Box<dyn Write + '_> = match &path {
                Some(p) => Box::new(BufWriter::new(
                    fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
                )),
                None => Box::new(&mut *out),
            };
            match format {
                Format::Csv => write_csv(rows, sink)?,
                Format::Json => write_jsonl(rows, sink)?,
            }
        }
        Command::Conjecture {
            p_max,
            resume,
            verbose,
        } => conjecture(p_max, resume.as_deref(), verbose, out)?,
        Command::Stats {
            p_max,
            case,
            n_max,
            json,
        } => {
            let policy = StatsPolicy {
                cases: vec![UndeterminedCase::from_id(case)?],
                n_max,
            };
            for s in undetermined_stats(p_max, &policy)? {
                if json {
                    serde_json::to_writer(&mut *out, &s)?;
                    writeln!(out)?;
                } else {
                    writeln!(
                        out,
                        "case {}: {} occurrences, {} locally associated ({})",
                        s.case_id, s.occurrences, s.locally_associated, s.parameters
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn conjecture(
    p_max: u64,
    checkpoint: Option<&Path>,
    verbose: bool,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    if p_max < 2 {
        return Err(Error::Domain("p_max must be at least 2".into()).into());
    }
    let start = match checkpoint {
        Some(path) => load_checkpoint(path)?.unwrap_or(0),
        None => 0,
    };
    if verbose {
        writeln!(out, "p,holds,x_digits,y_digits")?;
    }
    let (mut count, mut last) = (0usize, start);
    for entry in ConjectureScan::resume_after(start, p_max) {
        let entry = entry?;
        if !entry.holds {
            if let Some(path) = checkpoint {
                save_checkpoint(path, last)?;
            }
            serde_json::to_writer(&mut *out, &entry.solution)?;
            writeln!(out)?;
            return Err(Counterexample.into());
        }
        if verbose {
            writeln!(
                out,
                "{},1,{},{}",
                entry.p,
                entry.solution.x.to_str_radix(10).len(),
                entry.solution.y.to_str_radix(10).len()
            )?;
        }
        count += 1;
        last = entry.p;
        if let Some(path) = checkpoint {
            if count % CHECKPOINT_EVERY == 0 {
                save_checkpoint(path, last)?;
            }
        }
    }
    if let Some(path) = checkpoint {
        save_checkpoint(path, last.max(start))?;
    }
    let summary = format!("{count} primes in ({start}, {p_max}] scanned, all hold");
    if verbose {
        eprintln!("{summary}");
    } else {
        writeln!(out, "{summary}")?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Counterexample>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Capacity(_)) => 3,
        _ => 1,
    }
}

fn with_unit_cache(f: impl FnOnce() -> anyhow::Result<()>) -> anyhow::Result<()> {
    let Some(path) = std::env::var_os(UNIT_CACHE_ENV).map(PathBuf::from) else {
        return f();
    };
    if path.exists() {
        load_unit_cache_into(&path, global_unit_cache())
            .with_context(|| format!("loading unit cache {}", path.display()))?;
    }
    let result = f();
    save_unit_cache(&path, global_unit_cache())
        .with_context(|| format!("saving unit cache {}", path.display()))?;
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = with_unit_cache(|| run(cli.command, &mut out)).and_then(|()| {
        out.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            if code != 2 {
                eprintln!("laorder: {e:#}");
            } else {
                eprintln!("laorder: {e}");
            }
            ExitCode::from(code)
        }
    }
}
