mod cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cmd::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "lieshift",
    version,
    about = "Exact experiments on Lie brackets over vector shifts"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Tsv, global = true)]
    format: Format,
    /// Worker threads for the enumeration kernels (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count periodic pairs with vanishing bracket for the []_k algebras.
    PeriodicCount {
        /// Inclusive range `a..b` or a single value.
        #[arg(long, default_value = "1..3")]
        k: String,
        #[arg(long, default_value = "1..3")]
        n: String,
        /// Largest allowed number of pairs per count.
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Support sizes of the powers of ada + dad + c in the Grigorchuk group ring.
    GrigPowers {
        #[arg(long)]
        i_max: usize,
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Power cache file.
        #[arg(long, env = "LIESHIFT_CACHE")]
        cache: Option<PathBuf>,
    },
    /// Schreier graph on the orbit of 1^∞ with geodesic counts.
    Schreier {
        #[arg(long)]
        vertices: usize,
    },
    /// Check bilinearity, reflexivity and the Jacobi identity of a rule file.
    BracketVerify {
        rule: PathBuf,
        #[arg(long, default_value_t = 2)]
        window: u64,
    },
    /// Dimensions of the homoclinic window spaces.
    Homoclinic {
        #[arg(long)]
        level: usize,
        /// Raise the level cap (at most 6).
        #[arg(long)]
        level_cap: Option<usize>,
        /// Also run the invariance and homoclinic checks.
        #[arg(long)]
        check: bool,
    },
    /// Left-nest the terms of a file, one per line.
    Rewrite {
        terms: PathBuf,
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Rule file of an evaluation model; enables elimination and affine forms.
        #[arg(long)]
        rule: Option<PathBuf>,
        /// Generator configurations of the model, in order.
        #[arg(long = "gen")]
        gens: Vec<String>,
    },
    /// Enumerate orbit-rule brackets of bounded radius.
    Search {
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        w: u64,
        #[arg(long)]
        max_active: Option<usize>,
        #[arg(long)]
        cap: Option<u128>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let f = cli.format;
    match cli.command {
        Command::PeriodicCount { k, n, cap } => cmd::periodic_count(f, &k, &n, cap),
        Command::GrigPowers { i_max, q, cache } => cmd::grig_powers(f, i_max, q, cache.as_deref()),
        Command::Schreier { vertices } => cmd::schreier(f, vertices),
        Command::BracketVerify { rule, window } => cmd::bracket_verify(f, &rule, window),
        Command::Homoclinic {
            level,
            level_cap,
            check,
        } => cmd::homoclinic(f, level, level_cap, check),
        Command::Rewrite {
            terms,
            q,
            rule,
            gens,
        } => cmd::rewrite(f, &terms, q, rule.as_deref(), &gens),
        Command::Search {
            q,
            d,
            r,
            w,
            max_active,
            cap,
        } => cmd::search(f, q, d, r, w, max_active, cap),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Verification(out)) => {
            print!("{out}");
            eprintln!("error: verification failed");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
