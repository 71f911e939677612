//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::io::obj::{write_obj, write_obj_parts};
use crate::io::report::RunReport;
use crate::io::{read_mesh, Format, IoError};
use crate::pipeline::{decompose, DecomposeError, DecomposeParams, Decomposition, PlannerKind};
use crate::planner::Exploration;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CAPPED: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlannerArg {
    Mcts,
    Greedy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Auto,
    Obj,
    Stl,
}

/// Approximate convex decomposition of a closed triangle mesh.
#[derive(Debug, Parser)]
#[command(name = "convexcut", version)]
struct Cli {
    /// Input mesh (.obj or .stl).
    #[arg(long)]
    input: PathBuf,
    /// Input format; `auto` uses the file extension.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    /// Output OBJ with one object per hull.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write `<stem>_part<k>.obj` files instead of a single OBJ.
    #[arg(long, requires = "output")]
    per_part: bool,
    /// Concavity threshold, in units where the largest input extent is 2.
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    /// Candidate planes per axis.
    #[arg(long, default_value_t = 20)]
    m: usize,
    /// Search iterations per cut.
    #[arg(long, default_value_t = 500)]
    iterations: usize,
    /// Search depth.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Weight of the volume term in the concavity.
    #[arg(long, default_value_t = 0.3)]
    k: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed exploration weight (default: root concavity / depth).
    #[arg(long)]
    exploration: Option<f64>,
    /// Cut along the principal axes instead of the coordinate axes.
    #[arg(long)]
    pca: bool,
    #[arg(long)]
    no_merge: bool,
    #[arg(long, value_enum, default_value_t = PlannerArg::Mcts)]
    planner: PlannerArg,
    /// JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Keep both halves of a cut whole instead of splitting disconnected shells.
    #[arg(long)]
    verbatim_halves: bool,
    /// Compute the decomposition score.
    #[arg(long)]
    score: bool,
    /// Also compute the interior concavity oracle per part.
    #[arg(long)]
    exact_concavity: bool,
    #[arg(long, default_value_t = 512)]
    max_components: usize,
}

impl Cli {
    fn params(&self) -> DecomposeParams {
        let mut p = DecomposeParams::with_seed(self.seed);
        p.epsilon = self.threshold;
        p.concavity.k = self.k;
        p.planner.m = self.m;
        p.planner.t = self.iterations;
        p.planner.d = self.depth;
        p.planner.use_pca = self.pca;
        p.planner.separate_shells = !self.verbatim_halves;
        if let Some(c) = self.exploration {
            p.planner.exploration = Exploration::Fixed(c);
        }
        p.planner_kind = match self.planner {
            PlannerArg::Mcts => PlannerKind::Mcts,
            PlannerArg::Greedy => PlannerKind::Greedy,
        };
        p.merge = !self.no_merge;
        p.exact_concavity = self.exact_concavity;
        p.max_components = self.max_components;
        p
    }
}

/// Runs the CLI and returns the process exit code. Diagnostics go to `err`.
pub fn run_cli<I, T>(args: I, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let format = match cli.format {
        FormatArg::Auto => Format::Auto,
        FormatArg::Obj => Format::Obj,
        FormatArg::Stl => Format::Stl,
    };
    let mesh = match read_mesh(&cli.input, format) {
        Ok(m) => m,
        Err(e @ IoError::Invalid { .. }) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_IO;
        }
    };
    let params = cli.params();
    let (decomposition, capped) = match decompose(&mesh, &params) {
        Ok(d) => (d, false),
        Err(DecomposeError::CapExceeded { cap, partial }) => {
            let _ = writeln!(err, "warning: component cap of {cap} reached; writing the partial decomposition");
            (*partial, true)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    if let Err(e) = write_outputs(&cli, &mesh, &params, &decomposition) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_IO;
    }
    if capped {
        EXIT_CAPPED
    } else {
        EXIT_OK
    }
}

fn write_outputs(
    cli: &Cli,
    mesh: &crate::mesh::SolidMesh,
    params: &DecomposeParams,
    d: &Decomposition,
) -> Result<(), IoError> {
    let hulls = d.hulls();
    if let Some(out) = &cli.output {
        if cli.per_part {
            write_obj_parts(out, &hulls)?;
        } else {
            write_obj(out, &hulls)?;
        }
    }
    if let Some(path) = &cli.report {
        let score = cli.score.then(|| d.score(mesh, &params.concavity));
        let report = RunReport::new(&cli.input.display().to_string(), mesh, params, d, score);
        std::fs::write(path, report.to_json()).map_err(|e| crate::io::io_error(path, e))?;
    }
    Ok(())
}
