//! `huopm` — mine, verify, generate, benchmark.
//!
//! Results (patterns, CSV) go to standard output or `--out`; every
//! human-readable line goes to standard error. Exit codes: 0 success,
//! 1 verification divergence, 2 input/format error, 3 parameter-domain
//! error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use huopm::datamodel::{
    parse_profit_table, parse_transactions, serialize_patterns, serialize_profit_table,
    serialize_transactions, DataError, Pattern,
};
use huopm::gen::generate;
use huopm::oracle::{enumerate_all, OracleError, DEFAULT_MAX_ITEMS};
use huopm::search::mine;
use huopm::{
    ConfigError, GenParams, OrderPolicy, ProfitTable, QuantDatabase, SearchConfig, SearchError,
    StrategySet,
};

#[derive(Parser)]
#[command(
    name = "huopm",
    version,
    about = "High utility occupancy pattern mining over quantitative transaction databases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine all frequent, dominant patterns from a database.
    Mine(MineArgs),
    /// Cross-check the miner against exhaustive enumeration.
    Verify(VerifyArgs),
    /// Write a seeded synthetic database and profit table.
    Gen(GenArgs),
    /// Time every strategy configuration over a threshold grid (CSV).
    Bench(BenchArgs),
}

fn strategies_flag(s: &str) -> Result<StrategySet, String> {
    s.parse()
}

fn order_flag(s: &str) -> Result<OrderPolicy, String> {
    s.parse()
}

#[derive(Args)]
struct MineArgs {
    /// Transaction file: one row per line, `item:quantity` tokens.
    transactions: PathBuf,
    /// Profit file: `item profit` per line.
    profits: PathBuf,
    /// Minimum support share, in (0, 1].
    #[arg(long)]
    alpha: f64,
    /// Minimum mean utility occupancy, in (0, 1].
    #[arg(long)]
    beta: f64,
    /// Comma list from {s2,s3,s4}; the support gate s1 is always on.
    #[arg(long, default_value = "s2,s3,s4", value_parser = strategies_flag)]
    strategies: StrategySet,
    /// Item processing order: lexi, twu-asc, twu-desc, sup-asc, sup-desc.
    #[arg(long, default_value = "sup-asc", value_parser = order_flag)]
    order: OrderPolicy,
    /// Write patterns here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    transactions: Option<PathBuf>,
    profits: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Check N seeded random instances instead of the given files.
    #[arg(long)]
    fuzz: Option<u32>,
}

#[derive(Args)]
struct GenArgs {
    out_transactions: PathBuf,
    out_profits: PathBuf,
    #[arg(long, default_value_t = 100)]
    transactions: usize,
    #[arg(long, default_value_t = 10)]
    items: usize,
    /// Mean row length (Poisson, clamped to [1, items]).
    #[arg(long, default_value_t = 4.0)]
    avg_len: f64,
    #[arg(long, default_value_t = 5)]
    max_quantity: u32,
    #[arg(long, default_value_t = 1.0)]
    profit_low: f64,
    #[arg(long, default_value_t = 10.0)]
    profit_high: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    transactions: PathBuf,
    profits: PathBuf,
    /// Comma list of alpha values.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    /// Comma list of beta values.
    #[arg(long, value_delimiter = ',')]
    betas: Vec<f64>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Divergence(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Divergence(_) => 1,
            CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Data(_)
            | CliError::Usage(_)
            | CliError::Oracle(OracleError::TooManyItems { .. }) => 2,
            CliError::Config(_)
            | CliError::Search(_)
            | CliError::Oracle(OracleError::Config(_)) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mine(args) => run_mine(args),
        Command::Verify(args) => run_verify(args),
        Command::Gen(args) => run_gen(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })
}

fn load(transactions: &Path, profits: &Path) -> Result<(QuantDatabase, ProfitTable), CliError> {
    let profits = parse_profit_table::<f64>(&read(profits)?)?;
    let db = parse_transactions(&read(transactions)?, &profits)?;
    Ok((db, profits))
}

/// Results go to the given path, or to standard output when there is none.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|source| CliError::Write { path: path.into(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_mine(args: MineArgs) -> Result<(), CliError> {
    let (db, profits) = load(&args.transactions, &args.profits)?;
    let config = SearchConfig {
        strategies: args.strategies,
        order: args.order,
        audit_bounds: false,
    };
    let (patterns, stats) = mine(&db, &profits, args.alpha, args.beta, &config)?;
    emit(args.out.as_deref(), &serialize_patterns(&patterns))?;
    eprintln!(
        "visited_nodes={} joins={} wall_time={:?}",
        stats.visited_nodes, stats.joins, stats.wall_time
    );
    Ok(())
}

/// First difference between a mined result and the oracle's, if any.
fn first_divergence(got: &[Pattern<f64>], want: &[Pattern<f64>]) -> Option<String> {
    if got.len() != want.len() {
        return Some(format!("{} patterns vs oracle's {}", got.len(), want.len()));
    }
    for (g, w) in got.iter().zip(want) {
        if g.itemset != w.itemset {
            return Some(format!("pattern ({}) vs oracle's ({})", g.itemset, w.itemset));
        }
        if g.sup != w.sup {
            return Some(format!("({}) support {} vs oracle's {}", g.itemset, g.sup, w.sup));
        }
        if (g.uo - w.uo).abs() > 1e-9 {
            return Some(format!("({}) uo {} vs oracle's {}", g.itemset, g.uo, w.uo));
        }
    }
    None
}

/// Mines under every strategy subset and order, comparing each run to the
/// exhaustive oracle. Returns the number of agreeing configurations.
fn verify_instance(
    db: &QuantDatabase,
    profits: &ProfitTable,
    alpha: f64,
    beta: f64,
    label: &str,
) -> Result<u32, CliError> {
    let oracle = enumerate_all(db, profits, alpha, beta, DEFAULT_MAX_ITEMS)?;
    let mut checked = 0;
    for strategies in StrategySet::subsets() {
        for order in OrderPolicy::ALL {
            let config = SearchConfig { strategies, order, audit_bounds: true };
            let (got, stats) = mine(db, profits, alpha, beta, &config)?;
            if let Some(diff) = first_divergence(&got, &oracle.patterns) {
                return Err(CliError::Divergence(format!(
                    "{label}: strategies {strategies}, order {order}: {diff}"
                )));
            }
            if stats.audit.total() != 0 {
                return Err(CliError::Divergence(format!(
                    "{label}: strategies {strategies}, order {order}: bound audit tripped"
                )));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    if let Some(rounds) = args.fuzz {
        let mut checked = 0;
        for seed in 1..=rounds as u64 {
            let params = GenParams {
                n_transactions: 10 + (seed % 21) as usize,
                n_items: 4 + (seed % 9) as usize,
                avg_len: 2.0 + (seed % 5) as f64 * 0.5,
                max_quantity: 5,
                profit_range: (1.0, 10.0),
                seed,
            };
            let (db, profits) = generate(&params).expect("fuzz knobs are in range");
            for (alpha, beta) in [(0.3, 0.35), (0.3, 0.65), (0.5, 0.35), (0.5, 0.65)] {
                checked +=
                    verify_instance(&db, &profits, alpha, beta, &format!("seed {seed}"))?;
            }
        }
        eprintln!("verified: {rounds} seeded instances, {checked} configurations agree");
        return Ok(());
    }
    match (&args.transactions, &args.profits, args.alpha, args.beta) {
        (Some(transactions), Some(profits), Some(alpha), Some(beta)) => {
            let (db, profits) = load(transactions, profits)?;
            let checked = verify_instance(&db, &profits, alpha, beta, "input")?;
            eprintln!("verified: {checked} configurations agree with the oracle");
            Ok(())
        }
        _ => Err(CliError::Usage(
            "verify needs TRANSACTIONS PROFITS --alpha A --beta B, or --fuzz N".into(),
        )),
    }
}

fn run_gen(args: GenArgs) -> Result<(), CliError> {
    let params = GenParams {
        n_transactions: args.transactions,
        n_items: args.items,
        avg_len: args.avg_len,
        max_quantity: args.max_quantity,
        profit_range: (args.profit_low, args.profit_high),
        seed: args.seed,
    };
    let (db, profits) = generate(&params)?;
    emit(Some(&args.out_transactions), &serialize_transactions(&db))?;
    emit(Some(&args.out_profits), &serialize_profit_table(&profits))?;
    eprintln!(
        "wrote {} transactions over {} items to {} and {}",
        db.len(),
        profits.len(),
        args.out_transactions.display(),
        args.out_profits.display()
    );
    Ok(())
}

/// The four timed configurations, weakest to strongest.
const BENCH_CONFIGS: [&str; 4] = ["s2", "s3", "s2,s3", "s2,s3,s4"];

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.alphas.is_empty() || args.betas.is_empty() {
        return Err(CliError::Usage("bench needs --alphas and --betas value lists".into()));
    }
    let (db, profits) = load(&args.transactions, &args.profits)?;
    let mut csv = String::from("alpha,beta,config,patterns,visited_nodes,joins,wall_ms\n");
    for &alpha in &args.alphas {
        for &beta in &args.betas {
            let mut rows = Vec::new();
            for flags in BENCH_CONFIGS {
                let strategies: StrategySet = flags.parse().expect("fixed configurations parse");
                let config = SearchConfig { strategies, ..Default::default() };
                let (patterns, stats) = mine(&db, &profits, alpha, beta, &config)?;
                rows.push((strategies, patterns.len(), stats));
            }

            // the configurations must agree on the result, and the visit
            // counts must respect the strategy lattice: adding s2 on top
            // of s3 can only shrink the tree, and s4 is a no-op under s3
            let counts: Vec<usize> = rows.iter().map(|r| r.1).collect();
            if counts.windows(2).any(|w| w[0] != w[1]) {
                return Err(CliError::Divergence(format!(
                    "pattern counts differ at alpha={alpha} beta={beta}: {counts:?}"
                )));
            }
            let visited: Vec<u64> = rows.iter().map(|r| r.2.visited_nodes).collect();
            let (v12, v13, v123, v1234) = (visited[0], visited[1], visited[2], visited[3]);
            if !(v123 <= v13 && v123 <= v12 && v123 == v1234) {
                return Err(CliError::Divergence(format!(
                    "visit counts break the strategy lattice at alpha={alpha} beta={beta}: \
                     {visited:?}"
                )));
            }

            for (strategies, patterns, stats) in rows {
                csv.push_str(&format!(
                    "{alpha},{beta},{strategies},{patterns},{},{},{:.3}\n",
                    stats.visited_nodes,
                    stats.joins,
                    stats.wall_time.as_secs_f64() * 1e3
                ));
            }
        }
    }
    emit(args.out.as_deref(), &csv)
}
