use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lprime_core::{FunctionTag, ReportFormat, Statistic};

#[derive(Debug, Parser)]
#[command(name = "lprime", version, about = "Dirichlet L-functions and the zeros of L'(s, chi)")]
pub struct Cli {
    /// Target absolute error of every evaluation (relative above magnitude 1).
    #[arg(long, global = true, env = "LPRIME_PRECISION", default_value_t = 1e-10)]
    pub precision: f64,

    /// Worker threads; all cores when omitted.
    #[arg(long, global = true, env = "LPRIME_THREADS")]
    pub threads: Option<usize>,

    /// Seed for split-line and boundary jitter.
    #[arg(long, global = true, env = "LPRIME_SEED", default_value_t = 0x5eed)]
    pub seed: u64,

    /// Output file. Required by `zeros scan`; elsewhere defaults to stdout.
    #[arg(long, global = true, env = "LPRIME_OUT")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dirichlet characters.
    #[command(subcommand)]
    Characters(CharactersCmd),
    /// Evaluate L, G1 or F at one point.
    Eval(EvalArgs),
    /// Locate and count zeros.
    #[command(subcommand)]
    Zeros(ZerosCmd),
    /// Check one statistic against its main term.
    Verify(VerifyCmd),
    /// Residual reports over several moduli and heights.
    Report(ReportArgs),
    /// Measured statistic, main term and residual along a height grid.
    Plotdata(PlotArgs),
}

#[derive(Debug, Subcommand)]
pub enum CharactersCmd {
    /// One CSV line per character modulo `q`.
    List {
        #[arg(long)]
        q: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFn {
    L,
    G1,
    F,
}

#[derive(Debug, Args)]
pub struct Character {
    #[arg(long)]
    pub q: u64,
    /// Character index as printed by `characters list`.
    #[arg(long)]
    pub chi: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub character: Character,
    /// The point, as `re,im`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    pub s: (f64, f64),
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub deriv: u8,
    #[arg(long = "fn", value_enum, ignore_case = true, default_value = "l")]
    pub function: EvalFn,
}

#[derive(Debug, Subcommand)]
pub enum ZerosCmd {
    /// Scan `|t| <= T` into a resumable JSONL database at `--out`.
    Scan {
        #[command(flatten)]
        character: Character,
        #[arg(long = "T")]
        t: f64,
        #[arg(long = "fn", default_value = "Lprime")]
        function: FunctionTag,
    },
    /// Print `N(T, chi)` (for `--fn L`) or `N1(T, chi)`.
    Count {
        #[command(flatten)]
        character: Character,
        #[arg(long = "T")]
        t: f64,
        #[arg(long = "fn", default_value = "Lprime")]
        function: FunctionTag,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct VerifyCmd {
    #[command(subcommand)]
    pub regions: Option<VerifySub>,
    #[command(flatten)]
    pub args: VerifyArgs,
}

#[derive(Debug, Subcommand)]
pub enum VerifySub {
    /// Zero-free regions of L' on both sides of the critical strip.
    Regions {
        #[command(flatten)]
        character: Character,
        #[arg(long, default_value_t = 30.0)]
        window: f64,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, required = true)]
    pub q: Option<u64>,
    #[arg(long, required = true)]
    pub chi: Option<usize>,
    #[arg(long = "T", required = true)]
    pub t: Option<f64>,
    /// N1, sum or N.
    #[arg(long, required = true)]
    pub stat: Option<Statistic>,
    /// Band constant; the statistic's default when omitted.
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Zero database written by `zeros scan`; scanned in memory otherwise.
    #[arg(long)]
    pub db: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Jsonl => ReportFormat::Jsonl,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<u64>,
    /// Restrict to one character index; all primitive characters otherwise.
    #[arg(long)]
    pub chi: Option<usize>,
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "N1,sum,N")]
    pub stat: Vec<Statistic>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub character: Character,
    #[arg(long, default_value = "N1")]
    pub stat: Statistic,
    /// Heights, as a list `a,b,c` or a range `start:stop:step`.
    #[arg(long = "T", value_parser = parse_grid)]
    pub grid: Grid,
    #[arg(long)]
    pub db: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Grid(pub Vec<f64>);

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (re, im) = s.split_once(',').ok_or("expected `re,im`")?;
    let re = re.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = im.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((re, im))
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    if let [a, b, step] = s.split(':').collect::<Vec<_>>()[..] {
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0 && b >= a) {
            return Err("range needs start <= stop and a positive step".into());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Ok(Grid((0..=n).map(|i| a + step * i as f64).collect()));
    }
    let values = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(Grid(values))
}
