use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lochness",
    version,
    about = "Flat and hyperbolic models of the Infinite Loch Ness Monster",
    args_override_self = true
)]
pub struct Cli {
    /// Emit a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Read default parameters from a `key = value` file; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The Fuchsian group model in the upper half-plane.
    #[command(subcommand)]
    Hyp(HypCommand),
    /// The slit-plane translation surface.
    #[command(subcommand)]
    Flat(FlatCommand),
    /// Genus of truncations and end counting.
    #[command(subcommand)]
    Topo(TopoCommand),
    /// Draw the exponential-sum curve with phase (ln n)^4.
    Curve(CurveArgs),
}

#[derive(Debug, Subcommand)]
pub enum HypCommand {
    /// Check that each generator carries its source circle onto its target.
    Verify(VerifyArgs),
    /// Move a point into the fundamental domain.
    Reduce(ReduceArgs),
    /// Draw the orbit of the base circles.
    Tessellate(TessellateArgs),
    /// Draw the fundamental domain.
    Domain(DomainArgs),
    /// Classify every reduced word and look for fixed points in the half-plane.
    Probe(ProbeArgs),
}

#[derive(Debug, Subcommand)]
pub enum FlatCommand {
    /// Follow a straight line through the slit gluings.
    Trace(TraceArgs),
    /// Measure the total angle around a point.
    Cone(ConeArgs),
    /// Draw the slit plane, optionally with a traced geodesic.
    Render(FlatRenderArgs),
}

#[derive(Debug, Subcommand)]
pub enum TopoCommand {
    /// Genus and boundary of a compact piece of either model.
    Truncation(TruncationArgs),
    /// Count the ends of the slit plane or the slit cylinder.
    Ends(EndsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Printed,
    Corrected,
}

impl From<Variant> for lochness_core::GVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Printed => lochness_core::GVariant::Printed,
            Variant::Corrected => lochness_core::GVariant::Corrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Flat,
    Hyp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseKind {
    Plane,
    Cylinder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Upper,
    Lower,
}

impl From<SideArg> for lochness_core::Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Upper => lochness_core::Side::Upper,
            SideArg::Lower => lochness_core::Side::Lower,
        }
    }
}

/// Two comma-separated reals, as in `3.5,1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub f64, pub f64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = parse_reals(s, 2)?;
        Ok(Pair(parts[0], parts[1]))
    }
}

/// A view rectangle `XMIN,XMAX,YMIN,YMAX`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewArg(pub [f64; 4]);

impl FromStr for ViewArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v = parse_reals(s, 4)?;
        Ok(ViewArg([v[0], v[1], v[2], v[3]]))
    }
}

fn parse_reals(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got `{s}`"));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{p}` is not a finite number"))
        })
        .collect()
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    pub window: u32,
    #[arg(long, value_enum, default_value_t = Variant::Corrected)]
    pub variant: Variant,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Samples per circle side for the region-exchange check (0 skips it).
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long, value_name = "RE,IM")]
    pub point: Pair,
    #[arg(long, default_value_t = 15)]
    pub window: u32,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct TessellateArgs {
    #[arg(long)]
    pub window: u32,
    #[arg(long)]
    pub depth: u32,
    #[arg(long)]
    pub out: PathBuf,
    /// Drop arcs whose top lies below this height.
    #[arg(long, default_value_t = 1e-3)]
    pub clip: f64,
    #[arg(long, value_name = "XMIN,XMAX,YMIN,YMAX")]
    pub view: Option<ViewArg>,
    #[arg(long)]
    pub width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    #[arg(long)]
    pub window: u32,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_name = "XMIN,XMAX,YMIN,YMAX")]
    pub view: Option<ViewArg>,
    #[arg(long)]
    pub width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub window: u32,
    #[arg(long)]
    pub depth: u32,
    #[arg(long, value_enum, default_value_t = Variant::Corrected)]
    pub variant: Variant,
    /// Refuse to enumerate more words than this.
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
    pub start: Pair,
    /// Needed when the start lies on a slit.
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long, value_name = "DX,DY", allow_hyphen_values = true)]
    pub dir: Pair,
    #[arg(long, default_value_t = 50)]
    pub max_events: usize,
    #[arg(long, default_value_t = 1000.0)]
    pub max_length: f64,
}

#[derive(Debug, Args)]
pub struct ConeArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
    pub point: Pair,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long, default_value_t = 1e-3)]
    pub radius: f64,
}

#[derive(Debug, Args)]
pub struct FlatRenderArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Overlay the geodesic from this point (requires --dir).
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true, requires = "dir")]
    pub start: Option<Pair>,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(
        long,
        value_name = "DX,DY",
        allow_hyphen_values = true,
        requires = "start"
    )]
    pub dir: Option<Pair>,
    #[arg(long, default_value_t = 50)]
    pub max_events: usize,
    #[arg(long, default_value_t = 100.0)]
    pub max_length: f64,
    #[arg(long, value_name = "XMIN,XMAX,YMIN,YMAX")]
    pub view: Option<ViewArg>,
    #[arg(long)]
    pub width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TruncationArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Number of slit pairs (flat model).
    #[arg(long, required_if_eq("model", "flat"))]
    pub k: Option<usize>,
    /// Strip index (hyperbolic model).
    #[arg(long, required_if_eq("model", "hyp"), allow_hyphen_values = true)]
    pub m: Option<i64>,
    /// Disk radius for the flat model; defaults to 8k + 4.
    #[arg(long)]
    pub radius: Option<u64>,
    #[arg(long, value_enum, default_value_t = Variant::Corrected)]
    pub variant: Variant,
}

#[derive(Debug, Args)]
pub struct EndsArgs {
    #[arg(long, value_enum)]
    pub base: BaseKind,
    #[arg(long)]
    pub k: usize,
    /// Cylinder circumference; defaults to 8k + 8.
    #[arg(long)]
    pub circumference: Option<u32>,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
}
