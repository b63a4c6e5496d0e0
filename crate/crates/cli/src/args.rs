use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qflow_core::registry::ExampleId;

#[derive(Debug, Parser)]
#[command(name = "qflow", version, about = "Formal solutions and q-Gevrey diagnostics for q-difference equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an equation document and write its coefficient table.
    Solve(SolveArgs),
    /// Solve a registered example and compare it with its closed form.
    Reproduce(ReproduceArgs),
    /// Compute the P_m polynomials of the dq-p1-pm example.
    PmLadder(PmLadderArgs),
    /// Randomized check of the Nagumo norm inequalities.
    Norms(NormsArgs),
    /// Growth fits, space membership and theorem disciplines.
    Growth(GrowthArgs),
    /// Compare an example at q near 1 with its classical limit.
    Confluence(ConfluenceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RingArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Auto,
    X,
    E,
}

/// Parses `NX,NE`.
pub fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected NX,NE, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// Parses `LO..HI`, `LO,HI`, or a single `K`.
pub fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let p = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = if let Some((a, b)) = s.split_once("..") {
        (p(a.trim_end_matches('='))?, p(b.trim_start_matches('='))?)
    } else if let Some((a, b)) = s.split_once(',') {
        (p(a)?, p(b)?)
    } else {
        let k = p(s)?;
        (k, k)
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Equation document (JSON).
    pub spec: PathBuf,
    /// Coefficient table to write; reports go next to it.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Output window, overriding the document truncation.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value_t = RingArg::Exact)]
    pub ring: RingArg,
    /// Also solve along the other path and compare.
    #[arg(long)]
    pub both_paths: bool,
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    pub path: PathArg,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    pub example: ExampleId,
    /// Square window size.
    #[arg(long, default_value_t = 12)]
    pub max_order: usize,
    /// `symbolic`, `a/b`, `a/b+c/di`, a float, or `re,im`.
    #[arg(long, default_value = "3/2")]
    pub q: String,
    #[arg(long, default_value_t = 1)]
    pub alpha: u32,
    /// Write the table as CSV.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PmLadderArgs {
    #[arg(long, default_value_t = 5)]
    pub m_max: u32,
    /// Print every polynomial in full.
    #[arg(long)]
    pub full: bool,
    /// Window of the solved table used for cross-validation.
    #[arg(long, value_parser = parse_window, default_value = "12,5")]
    pub check_window: (usize, usize),
    /// Write a JSON document with every polynomial.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[arg(long, default_value = "3/2")]
    pub q: String,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Maximal degree of the random polynomials.
    #[arg(long, default_value_t = 8)]
    pub degrees: usize,
    /// Largest norm index n, m.
    #[arg(long, default_value_t = 5)]
    pub max_index: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.02)]
    pub slack: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceArg {
    Auto,
    None,
    OZero,
    Monomial { p: u32, alpha: u32 },
}

/// Parses `auto`, `none`, `o0`, or `monomial:P,ALPHA`.
pub fn parse_space(s: &str) -> Result<SpaceArg, String> {
    match s {
        "auto" => Ok(SpaceArg::Auto),
        "none" => Ok(SpaceArg::None),
        "o0" => Ok(SpaceArg::OZero),
        _ => {
            let rest = s.strip_prefix("monomial:").ok_or_else(|| format!("unknown space {s:?}"))?;
            let bad = || format!("expected monomial:P,ALPHA, got {s:?}");
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            let p: u32 = a.trim().parse().map_err(|_| bad())?;
            let alpha: u32 = b.trim().parse().map_err(|_| bad())?;
            if p == 0 || alpha == 0 {
                return Err("monomial space needs P, ALPHA >= 1".into());
            }
            Ok(SpaceArg::Monomial { p, alpha })
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct GrowthSource {
    #[arg(long)]
    pub example: Option<ExampleId>,
    /// A coefficient table written by `solve` or `reproduce`.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub source: GrowthSource,
    /// Value of q for `--example`.
    #[arg(long, default_value = "2")]
    pub q: String,
    #[arg(long, default_value_t = 1)]
    pub alpha: u32,
    #[arg(long, value_parser = parse_window, default_value = "40,40")]
    pub window: (usize, usize),
    #[arg(long, value_parser = parse_space, default_value = "auto")]
    pub space: SpaceArg,
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Numeric q used to evaluate symbolic coefficients; defaults to `--q`.
    #[arg(long)]
    pub q_point: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub component: usize,
    /// Range of eps-orders for the Gevrey fit of row maxima.
    #[arg(long, value_parser = parse_range)]
    pub fit_window: Option<(u32, u32)>,
    /// First index of the nested stabilization windows.
    #[arg(long, default_value_t = 5)]
    pub start: usize,
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConfluenceArgs {
    pub example: ExampleId,
    /// Dyadic points q_k = 1 + 2^-k.
    #[arg(long, value_parser = parse_range, default_value = "4..8")]
    pub k_range: (u32, u32),
    /// Explicit rational points, replacing `--k-range`.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<String>,
    #[arg(long, value_parser = parse_window, default_value = "8,8")]
    pub window: (usize, usize),
    #[arg(long, default_value_t = 20)]
    pub bracket_max: u32,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
