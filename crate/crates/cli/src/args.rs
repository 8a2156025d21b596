use std::path::PathBuf;

use bjss_core::{FormulaSource, InequalityKind};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Detection probabilities, Bell margins and critical curves for the
/// single-photon Bell test with a coherent local oscillator.
#[derive(Debug, Parser)]
#[command(name = "bjss", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-photon-number and summed probabilities under every formula source.
    Probabilities(ProbabilitiesOpts),
    /// Margin of one inequality at the optimal or given phases.
    Margin(MarginOpts),
    /// Threshold curve over a grid of eta or l.
    CriticalCurve(CurveOpts),
    /// Ratios of the numerically summed Poisson sums to their estimates.
    ApproxCheck(ApproxOpts),
    /// Run every reproduction check and write the discrepancy ledger.
    Reproduce(ReproduceOpts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Eta,
    L,
}

#[derive(Debug, Args)]
pub struct OutputOpts {
    /// Output file; relative paths are resolved against $BJSS_OUT_DIR when set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PointOpts {
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
    #[arg(long, default_value_t = 100.0)]
    pub alpha2: f64,
}

#[derive(Debug, Args)]
pub struct ProbabilitiesOpts {
    #[command(flatten)]
    pub point: PointOpts,
    /// Phase difference phi_c - phi_d.
    #[arg(long, default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
    pub delta: f64,
    /// Read angles in degrees.
    #[arg(long)]
    pub degrees: bool,
    /// Photon number at c for the per-n rows; defaults to the mean arriving number.
    #[arg(long)]
    pub nc: Option<usize>,
    /// Photon number at d for the per-n rows.
    #[arg(long)]
    pub nd: Option<usize>,
    /// Photon-number cutoff of the summed rows.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Args)]
pub struct PhaseOpts {
    #[arg(long, allow_negative_numbers = true, requires_all = ["phi_cp", "phi_d", "phi_dp"])]
    pub phi_c: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "phi_c")]
    pub phi_cp: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "phi_c")]
    pub phi_d: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "phi_c")]
    pub phi_dp: Option<f64>,
    /// Read angles in degrees.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Args)]
pub struct MarginOpts {
    #[arg(long, default_value = "ch", value_parser = parse_kind)]
    pub kind: InequalityKind,
    #[command(flatten)]
    pub point: PointOpts,
    #[arg(long, default_value = "derived", value_parser = parse_source)]
    pub source: FormulaSource,
    #[command(flatten)]
    pub phases: PhaseOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Args)]
pub struct CurveOpts {
    #[arg(long, value_parser = parse_kind, conflicts_with = "all", required_unless_present = "all")]
    pub kind: Option<InequalityKind>,
    /// Emit the werner-ch, ch, chsh and ch-mixed curves together.
    #[arg(long)]
    pub all: bool,
    /// Independent variable of the grid.
    #[arg(long, value_enum, default_value_t = AxisArg::L)]
    pub axis: AxisArg,
    /// `lo:hi:step` or a comma-separated list.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    #[arg(long, default_value = "derived", value_parser = parse_source)]
    pub source: FormulaSource,
    /// Bisection tolerance; defaults to 1e-10, or 1e-6 for the oracle.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Mean photon number per coherent mode for oracle margins.
    #[arg(long, default_value_t = 100.0)]
    pub alpha2: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Args)]
pub struct ApproxOpts {
    #[arg(long, default_value_t = 0.2)]
    pub x: f64,
    /// Grid of alpha2 values, `lo:hi:step` or a comma-separated list.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Args)]
pub struct ReproduceOpts {
    #[arg(long, default_value = "derived", value_parser = parse_source)]
    pub source: FormulaSource,
    /// Replace every pinned comparison tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Ledger file; defaults to ledger.csv or ledger.json in $BJSS_OUT_DIR or the working directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn parse_kind(s: &str) -> Result<InequalityKind, String> {
    s.parse()
}

fn parse_source(s: &str) -> Result<FormulaSource, String> {
    s.parse()
}

/// Grid values from `--grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// Parses `lo:hi:step` into an inclusive ladder, or `a,b,c` into a list.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{t}` is not a number"))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(format!("grid `{s}` must have the form lo:hi:step"));
        };
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if step <= 0.0 || hi < lo {
            return Err(format!("grid `{s}` needs lo <= hi and step > 0"));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok(Grid(
            (0..=n)
                .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
                .collect(),
        ))
    } else {
        let v: Vec<f64> = s.split(',').map(num).collect::<Result<_, _>>()?;
        if v.is_empty() {
            return Err("empty grid".into());
        }
        Ok(Grid(v))
    }
}
