use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtspp_core::okada::{DEFAULT_DET_LIMIT, Identity};
use qtspp_core::qfield::modular::{default_primes, is_prime};
use qtspp_core::tspp::DEFAULT_ENUM_LIMIT;

use crate::io::CliError;

/// Smallest prime accepted on the command line.
const MIN_PRIME: u64 = 1 << 20;

#[derive(Parser, Debug)]
#[command(name = "qtspp", version, about = "Exact checks around the q-enumeration of totally symmetric plane partitions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for evaluation points and sampling
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Prime for modular work (repeatable)
    #[arg(long = "prime", global = true)]
    pub primes: Vec<u64>,
    /// Largest n for brute-force enumeration
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_LIMIT)]
    pub cap_enum: u32,
    /// Largest n for determinant, cofactor and identity checks
    #[arg(long, global = true, default_value_t = DEFAULT_DET_LIMIT)]
    pub cap_n: u32,
}

impl Global {
    pub fn validate(&self) -> Result<(), CliError> {
        for &p in &self.primes {
            if p < MIN_PRIME || !is_prime(p) {
                return Err(CliError::usage(format!("--prime {p} is not a prime >= {MIN_PRIME}")));
            }
        }
        Ok(())
    }

    /// The configured primes, or `count` defaults.
    pub fn primes_or_default(&self, count: usize) -> Vec<u64> {
        if self.primes.is_empty() {
            default_primes(count)
        } else {
            self.primes.clone()
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Brute-force plane partition checks
    #[command(subcommand)]
    Tspp(TsppCmd),
    /// Determinant, cofactors and identities of the Okada matrix
    #[command(subcommand)]
    Okada(OkadaCmd),
    /// Recurrence guessing
    #[command(subcommand)]
    Guess(GuessCmd),
    /// Operator utilities
    #[command(subcommand)]
    Ore(OreCmd),
}

/// `--n N` or `--from A --to B`.
#[derive(Args, Debug, Clone)]
pub struct NRange {
    #[arg(long, conflicts_with_all = ["from", "to"])]
    pub n: Option<u32>,
    #[arg(long, requires = "to")]
    pub from: Option<u32>,
    #[arg(long, requires = "from")]
    pub to: Option<u32>,
}

impl NRange {
    pub fn values(&self) -> Result<Vec<u32>, CliError> {
        match (self.n, self.from, self.to) {
            (Some(n), None, None) => Ok(vec![n]),
            (None, Some(a), Some(b)) if a <= b => Ok((a..=b).collect()),
            (None, Some(a), Some(b)) => Err(CliError::usage(format!("empty range --from {a} --to {b}"))),
            _ => Err(CliError::usage("give --n or both --from and --to")),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum TsppCmd {
    /// Compare the orbit generating function with the product formula
    Verify(NRange),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Modular,
}

#[derive(Subcommand, Debug)]
pub enum OkadaCmd {
    /// Check det(a_ij) = b_n
    Det(NRange),
    /// Print the normalized cofactors c(n, j)
    Cofactors {
        #[arg(long)]
        n: u32,
    },
    /// Check the identities the cofactors satisfy
    Identities {
        #[command(flatten)]
        range: NRange,
        /// Only this identity
        #[arg(long, value_parser = parse_identity)]
        which: Option<Identity>,
        /// Row for identities 2 and 2p; all rows when omitted
        #[arg(long)]
        i: Option<u32>,
        /// `modular` checks at prime images only
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Screen modulo primes before the exact check
        #[arg(long)]
        fast: bool,
    },
}

fn parse_identity(s: &str) -> Result<Identity, String> {
    s.parse().map_err(|e: qtspp_core::Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Diagonal,
    Cofactors,
}

#[derive(Subcommand, Debug)]
pub enum GuessCmd {
    /// Write a cofactor table as JSON
    Table {
        #[arg(long, value_enum)]
        source: Source,
        #[arg(long)]
        from: i64,
        #[arg(long)]
        to: i64,
        /// `modular` projects at the first prime and a seeded q
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit an ansatz to a table and validate it
    Run {
        #[arg(long)]
        table: PathBuf,
        /// Ansatz: {"stencil":[[a,b],..],"degrees":[dq,dn,dj],"inhomogeneous":bool}
        #[arg(long)]
        stencil: PathBuf,
        #[arg(long, default_value_t = qtspp_core::guess::DEFAULT_OVERSAMPLE)]
        oversample: usize,
        #[arg(long, default_value_t = qtspp_core::guess::DEFAULT_HOLDOUT)]
        holdout: usize,
        /// q images per prime
        #[arg(long)]
        images: Option<usize>,
        /// Keep modular candidates only
        #[arg(long)]
        no_lift: bool,
        /// Write the full report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a saved report on a second table
    Revalidate {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        table: PathBuf,
    },
    /// Try increasing degree bounds until one validates
    Escalate {
        #[arg(long)]
        table: PathBuf,
        /// Ansatz file; its degrees are ignored
        #[arg(long)]
        stencil: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        /// Largest number of unknowns tried
        #[arg(long, default_value_t = 400)]
        budget: usize,
        #[arg(long, default_value_t = qtspp_core::guess::DEFAULT_OVERSAMPLE)]
        oversample: usize,
        #[arg(long, default_value_t = qtspp_core::guess::DEFAULT_HOLDOUT)]
        holdout: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum OreCmd {
    /// Apply an operator at one point of a table
    Apply {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        table: PathBuf,
        /// n,j or n,j,i
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: [i64; 3],
    },
    /// Check that an operator annihilates a table
    Annihilates {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = qtspp_core::ore::DEFAULT_MIN_ADMISSIBLE)]
        min_admissible: usize,
    },
    /// Right division a = q*b + r; exit 0 iff r = 0
    Divide {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Product a*b
    Leftmul {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Check a telescoping certificate against a summand table
    Telescope {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        table: PathBuf,
        /// lo,hi: the summation range in j
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
    },
    /// Substitute j -> n; with a diagonal table, run the constant-diagonal argument
    Diagonal {
        #[arg(long)]
        op: PathBuf,
        /// Diagonal values at (n, n) or (n, 0)
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        initial: usize,
    },
}

fn parse_ints(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_point(s: &str) -> Result<[i64; 3], String> {
    match parse_ints(s)?.as_slice() {
        [n, j] => Ok([*n, *j, 0]),
        [n, j, i] => Ok([*n, *j, *i]),
        _ => Err("expected n,j or n,j,i".into()),
    }
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    match parse_ints(s)?.as_slice() {
        [lo, hi] if lo <= hi => Ok((*lo, *hi)),
        [_, _] => Err("window must have lo <= hi".into()),
        _ => Err("expected lo,hi".into()),
    }
}
