use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nullstat::commands::{run_to_bytes, OutputFormat, Overrides};
use nullstat::manifest::load_manifest_file;

/// Numerical engine and verification harness for the induced geometry of
/// lightlike hypersurfaces under a dual pair of affine connections.
#[derive(Parser)]
#[command(name = "nullstat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the ambient connection pair against the statistical-structure conditions.
    Validate(Common),
    /// Emit the assembled null frame at the sampled points.
    Frame(Common),
    /// Emit tables of induced objects for frame-field pairs.
    Objects(Common),
    /// Emit curvature components, Ricci-type matrices, and scalar quantities.
    Curvature(Common),
    /// Run the full identity-check catalog and classify the hypersurface.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Manifest file (JSON); `{"fixture": "<name>"}` selects a bundled geometry.
    #[arg(long)]
    manifest: PathBuf,
    /// Override the number of grid sample points.
    #[arg(long)]
    points: Option<usize>,
    /// Override the random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the jet order (2..=4).
    #[arg(long)]
    order: Option<usize>,
    /// Override the base tolerance (higher tiers scale by 1e2 and 1e4).
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, default_value = "json")]
    format: String,
}

fn run(name: &str, common: &Common) -> anyhow::Result<i32> {
    let mut manifest = load_manifest_file(&common.manifest)?;
    let overrides = Overrides {
        points: common.points,
        seed: common.seed,
        jet_order: common.order,
        tol: common.tol,
    };
    overrides.apply(&mut manifest);
    let format: OutputFormat = common.format.parse()?;
    let (bytes, code) = run_to_bytes(name, &manifest, format)?;
    match &common.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Validate(c) => ("validate", c),
        Command::Frame(c) => ("frame", c),
        Command::Objects(c) => ("objects", c),
        Command::Curvature(c) => ("curvature", c),
        Command::Verify(c) => ("verify", c),
    };
    match run(name, common) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
