use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cgpt3d", version, about = "Polarization tensors, MSR data and invariant shape descriptors of 3D inclusions")]
pub struct Cli {
    /// JSON run configuration; command-line flags take precedence over it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect or generate triangle meshes.
    #[command(subcommand)]
    Mesh(MeshCmd),
    /// Compute, transform and check CGPTs.
    #[command(subcommand)]
    Cgpt(CgptCmd),
    /// Simulate, synthesize and invert multistatic response matrices.
    #[command(subcommand)]
    Msr(MsrCmd),
    /// Shape descriptors.
    #[command(subcommand)]
    Desc(DescCmd),
    /// Descriptor dictionaries.
    #[command(subcommand)]
    Dict(DictCmd),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ContrastArgs {
    /// Contrast parameter λ, |λ| > 1/2.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "kappa")]
    pub lambda: Option<f64>,
    /// Conductivity ratio κ; λ = (κ+1)/(2(κ-1)).
    #[arg(long)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SensorArgs {
    /// Number of sensors on the Fibonacci sphere.
    #[arg(long = "sensors")]
    pub count: Option<usize>,
    /// Radius of the sensor sphere.
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct NoiseArgs {
    /// Relative noise level.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolveArgs {
    /// Surface quadrature rule: 1pt or 3pt.
    #[arg(long)]
    pub rule: Option<String>,
    /// Repair inconsistent face orientation while loading meshes.
    #[arg(long)]
    pub reorient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeKind {
    Sphere,
    Ellipsoid,
    Box,
    Torus,
}

#[derive(Debug, Subcommand)]
pub enum MeshCmd {
    /// Print size, area, volume and extent of a mesh.
    Info {
        path: PathBuf,
        #[arg(long)]
        reorient: bool,
    },
    /// Tessellate a primitive shape.
    Make {
        kind: ShapeKind,
        /// Radius (sphere), semi-axes (ellipsoid), edges (box) or major and minor radius (torus).
        #[arg(long, num_args = 1..=3, required = true)]
        size: Vec<f64>,
        /// Refinement level.
        #[arg(long)]
        level: Option<u32>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum CgptCmd {
    /// Solve for the CGPTs of a mesh.
    Compute {
        #[arg(long)]
        mesh: PathBuf,
        #[command(flatten)]
        contrast: ContrastArgs,
        /// Highest degree K.
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Apply x ↦ s R x + z to a CGPT file.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Euler angles α β γ.
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["ALPHA", "BETA", "GAMMA"])]
        euler: Option<Vec<f64>>,
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        shift: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Report Hermitian residual, diagonal-block conditioning and sphere-oracle error.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Compare against the analytic tensor of a centred ball of this radius.
        #[arg(long)]
        sphere_radius: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum MsrCmd {
    /// Solve the transmission problem for every source.
    Simulate {
        #[arg(long)]
        mesh: PathBuf,
        #[command(flatten)]
        contrast: ContrastArgs,
        #[command(flatten)]
        sensors: SensorArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build V = Y M Y* from a CGPT file.
    Synthesize {
        #[arg(long)]
        cgpt: PathBuf,
        #[command(flatten)]
        sensors: SensorArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Least-squares CGPTs from an MSR file.
    Estimate {
        #[arg(long)]
        msr: PathBuf,
        #[command(flatten)]
        contrast: ContrastArgs,
        #[arg(long)]
        order: Option<usize>,
        /// Relative singular-value cutoff.
        #[arg(long, default_value_t = cgpt3d::msr::DEFAULT_RCOND)]
        rcond: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum DescCmd {
    /// Invariant descriptor of a CGPT file.
    Compute {
        #[arg(long)]
        cgpt: PathBuf,
        /// Second CGPT file; prints the largest descriptor difference instead.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum DictCmd {
    /// Build a dictionary from meshes (.off, .obj) or CGPT files (.json).
    Build {
        /// NAME=PATH, repeatable.
        #[arg(long = "entry", required = true, value_name = "NAME=PATH")]
        entries: Vec<String>,
        #[command(flatten)]
        contrast: ContrastArgs,
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rank dictionary entries by distance to a CGPT or descriptor file.
    Match {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}
