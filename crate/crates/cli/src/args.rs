use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "circortho",
    version,
    about = "Circulant matrices with orthogonal rows and unimodular off-diagonal entries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exhaustive sign-pattern search for Hermitian solutions.
    Search(SearchArgs),
    /// Re-verify a JSONL catalog or an appendix-style text file.
    Verify(VerifyArgs),
    /// Number-theoretic admissibility of (n, d) pairs for even n.
    Classify(ClassifyArgs),
    /// Explicit constructions.
    Construct(ConstructArgs),
    /// Circulants over Z_m with ±1 off the diagonal.
    Zm(ZmArgs),
    /// Mutually unbiased bases from d = 1 solutions.
    Mub(MubArgs),
}

/// Order or inclusive order range, written `N` or `A..B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderRange {
    pub lo: usize,
    pub hi: usize,
}

impl OrderRange {
    pub fn single(&self) -> Option<usize> {
        (self.lo == self.hi).then_some(self.lo)
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

pub fn parse_range(s: &str) -> Result<OrderRange, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{t}` is not an order"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(OrderRange { lo, hi })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Order `N` or inclusive range `A..B`.
    #[arg(long, value_parser = parse_range)]
    pub n: OrderRange,
    /// Verification tolerance (default 1e-9, or CIRCORTHO_TOL).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads; 0 uses available parallelism.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Write one record per solution here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    /// Overrides the recorded tolerance (text input defaults to 1e-4).
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["n", "d"])))]
pub struct ClassifyArgs {
    /// Even order `N` or range `A..B`.
    #[arg(long, value_parser = parse_range)]
    pub n: Option<OrderRange>,
    /// Integer diagonal; lists admissible even orders up to --n-max.
    #[arg(long, requires = "n_max")]
    pub d: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Settle open candidates with n ≤ 22 by exhaustive search.
    #[arg(long)]
    pub search: bool,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["trivial", "quaternary"])))]
pub struct ConstructArgs {
    /// (n/2 − 1, −ω^ν, −ω^{2ν}, …); needs --n and --nu.
    #[arg(long, requires_all = ["n", "nu"])]
    pub trivial: bool,
    /// Quaternary generators for diagonal --d.
    #[arg(long, requires = "d")]
    pub quaternary: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nu: Option<usize>,
    /// Diagonal such as `5/2`; `2d` must be an integer.
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    AllMinus,
    OnePlus,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["family", "search", "orders"])))]
pub struct ZmArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Brute force over d and all ±1 assignments.
    #[arg(long)]
    pub search: bool,
    /// Orders up to --n at which the one-plus family is consistent.
    #[arg(long)]
    pub orders: bool,
    /// Restrict --search to symmetric generators.
    #[arg(long, requires = "search")]
    pub symmetric: bool,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["generator", "xz"])))]
pub struct MubArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated entries; `w` is ω = e^{2πi/n}, `w2` its square.
    #[arg(long, allow_hyphen_values = true)]
    pub generator: Option<String>,
    /// Check {I, F, eigenbasis of XZ} for prime n.
    #[arg(long)]
    pub xz: bool,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
