//! `turanpat`: pattern Lagrangians, `P`-constructions, forbidden families and
//! limit diagnostics from the command line.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use turanpat_core::lagrangian::LagrangianConfig;
use turanpat_core::Caps;

use crate::render::{Manifest, Outcome};

const AFTER_HELP: &str = "\
Exit codes:
  0  success
  1  negative decision (does not embed, not minimal, not rigid, certificate failed)
  2  usage error (bad flags, unreadable files)
  3  cap exceeded or invalid input (pattern, hypergraph, size tree)

Search caps can be raised through environment variables:
  TURANPAT_CAP_FAMILY_VERTICES     largest member size in `forbid` / `exact-ex` (default 6)
  TURANPAT_CAP_CANONICAL_VERTICES  largest graph given a canonical form (default 9)
  TURANPAT_CAP_BRUTEFORCE_N        largest n for `exact-ex` (default 6)
  TURANPAT_CAP_RIGIDITY_VERTICES   largest construction for `rigid` (default 8)
  TURANPAT_CAP_HOM_SOURCE          largest F in `homdensity` (default 7)
  TURANPAT_CAP_HOM_TARGET          largest G in `homdensity` (default 12)

Pattern files: a header `k m`, a line `R: i j ...` listing the recursive parts
(1-based, possibly none), then one profile per line as m multiplicities. Hypergraph files: a header
`n k`, then one edge per line as 0-based vertices. `#` starts a comment.";

#[derive(Parser, Debug, Serialize)]
#[command(name = "turanpat", version, about, after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for the randomized optimizer restarts.
    #[arg(long, global = true, default_value_t = LagrangianConfig::default().seed)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Where to write the run manifest.
    #[arg(long, global = true, default_value = "turanpat-manifest.json")]
    manifest: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Optimizer settings shared by every command that maximizes a Lagrangian.
#[derive(Args, Debug, Clone, Serialize)]
pub struct OptArgs {
    /// Random restarts of the ascent.
    #[arg(long, default_value_t = 50)]
    starts: usize,
    /// Grid subdivisions per coordinate for seeding.
    #[arg(long, default_value_t = 20)]
    grid: usize,
    /// Best grid points that are ascended.
    #[arg(long, default_value_t = 32)]
    grid_seeds: usize,
    /// Step-size tolerance of the ascent.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Iteration limit per ascent.
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Largest n used for the p_n / C(n,k) upper bound.
    #[arg(long, default_value_t = 30)]
    upper_n: usize,
}

impl OptArgs {
    pub fn config(&self, seed: u64) -> LagrangianConfig {
        LagrangianConfig {
            starts: self.starts,
            grid_resolution: self.grid,
            grid_seeds: self.grid_seeds,
            tol: self.tol,
            max_iterations: self.max_iter,
            dp_n_for_upper: self.upper_n,
            seed,
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Maximize the pattern Lagrangian.
    Lagrangian {
        #[arg(long)]
        pattern: PathBuf,
        #[command(flatten)]
        opt: OptArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Exact p_n with an optimal construction.
    Pn {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        n: usize,
        /// Include the optimal size tree and its degree report.
        #[arg(long)]
        witness: bool,
        /// Same as `--out csv`.
        #[arg(long)]
        csv: bool,
        /// Also write the optimal construction as a hypergraph file.
        #[arg(long)]
        graph_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Check that removing any part strictly lowers the Lagrangian.
    Minimal {
        #[arg(long)]
        pattern: PathBuf,
        #[command(flatten)]
        opt: OptArgs,
        /// Margins at or below this count as "not strictly smaller".
        #[arg(long, default_value_t = 1e-6)]
        margin_tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Enumerate the forbidden family up to a vertex count.
    Forbid {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        max_vertices: usize,
        /// Keep only members that are minimal non-embeddable.
        #[arg(long)]
        minimal: bool,
        /// Directory for the member files and their index.
        #[arg(long)]
        out: PathBuf,
        /// Format of the summary on stdout.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Decide whether a hypergraph lies in some P-construction.
    Embed {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Exhaustive extremal number for a forbidden family.
    ExactEx {
        #[arg(long, required_unless_present = "family", conflicts_with = "family")]
        pattern: Option<PathBuf>,
        /// Directory of `.hg` files forming the family.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        /// Uniformity, needed only when the family directory is empty.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Rigidity of the construction with the given level-1 part sizes.
    Rigid {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Verify the irrational-Lagrangian two-part pattern for uniformity k.
    Irrational {
        #[arg(long)]
        k: usize,
        /// Allowed gap between closed form and optimizer, and the allowed
        /// stationarity residual.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Random restarts of the ascent.
        #[arg(long, default_value_t = 50)]
        starts: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Homomorphism density t(F, G).
    Homdensity {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Hypergraph Lagrangian of a hypergraph.
    Hlagrangian {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        opt: OptArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Edge density minus Lagrangian, plus optional density violations.
    Ctgap {
        #[arg(long)]
        graph: PathBuf,
        /// Directory of `.hg` files to test as denser members inside the graph.
        #[arg(long)]
        family: Option<PathBuf>,
        #[command(flatten)]
        opt: OptArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Lagrangian { .. } => "lagrangian",
            Command::Pn { .. } => "pn",
            Command::Minimal { .. } => "minimal",
            Command::Forbid { .. } => "forbid",
            Command::Embed { .. } => "embed",
            Command::ExactEx { .. } => "exact-ex",
            Command::Rigid { .. } => "rigid",
            Command::Irrational { .. } => "irrational",
            Command::Homdensity { .. } => "homdensity",
            Command::Hlagrangian { .. } => "hlagrangian",
            Command::Ctgap { .. } => "ctgap",
        }
    }
}

/// Errors caused by how the tool was invoked rather than by the inputs'
/// mathematical content.
#[derive(Debug, Clone)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<turanpat_core::Error>() {
            return if e.is_cap_or_validation() { 3 } else { 2 };
        }
    }
    2
}

fn env_cap(name: &str, slot: &mut usize) -> Result<(), UsageError> {
    if let Ok(raw) = std::env::var(name) {
        *slot = raw
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("{name}={raw:?} is not a non-negative integer")))?;
    }
    Ok(())
}

fn caps_from_env() -> Result<Caps, UsageError> {
    let mut caps = Caps::default();
    env_cap("TURANPAT_CAP_FAMILY_VERTICES", &mut caps.family_vertices)?;
    env_cap(
        "TURANPAT_CAP_CANONICAL_VERTICES",
        &mut caps.canonical_vertices,
    )?;
    env_cap("TURANPAT_CAP_BRUTEFORCE_N", &mut caps.bruteforce_n)?;
    env_cap(
        "TURANPAT_CAP_RIGIDITY_VERTICES",
        &mut caps.rigidity_vertices,
    )?;
    env_cap("TURANPAT_CAP_HOM_SOURCE", &mut caps.hom_source_vertices)?;
    env_cap("TURANPAT_CAP_HOM_TARGET", &mut caps.hom_target_vertices)?;
    Ok(caps)
}

fn run(cli: &Cli, ctx: &mut commands::Context) -> anyhow::Result<Outcome> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(UsageError("--jobs must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    let seed = cli.seed;
    match &cli.command {
        Command::Lagrangian { pattern, opt, out } => {
            ctx.lagrangian(pattern, &opt.config(seed), *out)
        }
        Command::Pn {
            pattern,
            n,
            witness,
            csv,
            graph_out,
            out,
        } => {
            let format = if *csv { Format::Csv } else { *out };
            ctx.pn(pattern, *n, *witness, graph_out.as_deref(), format)
        }
        Command::Minimal {
            pattern,
            opt,
            margin_tol,
            out,
        } => ctx.minimal(pattern, &opt.config(seed), *margin_tol, *out),
        Command::Forbid {
            pattern,
            max_vertices,
            minimal,
            out,
            format,
        } => ctx.forbid(pattern, *max_vertices, *minimal, out, *format),
        Command::Embed {
            pattern,
            graph,
            out,
        } => ctx.embed(pattern, graph, *out),
        Command::ExactEx {
            pattern,
            family,
            n,
            k,
            out,
        } => ctx.exact_ex(pattern.as_deref(), family.as_deref(), *n, *k, *out),
        Command::Rigid {
            pattern,
            sizes,
            out,
        } => ctx.rigid(pattern, sizes, *out),
        Command::Irrational {
            k,
            tol,
            starts,
            out,
        } => {
            let cfg = LagrangianConfig {
                starts: *starts,
                seed,
                ..LagrangianConfig::default()
            };
            ctx.irrational(*k, *tol, &cfg, *out)
        }
        Command::Homdensity { f, g, out } => ctx.homdensity(f, g, *out),
        Command::Hlagrangian { graph, opt, out } => ctx.hlagrangian(graph, &opt.config(seed), *out),
        Command::Ctgap {
            graph,
            family,
            opt,
            out,
        } => ctx.ctgap(graph, family.as_deref(), &opt.config(seed), *out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let started = Instant::now();
    let caps = caps_from_env();
    let mut ctx = commands::Context::new(caps.clone().unwrap_or_default());
    let result = caps
        .map_err(anyhow::Error::from)
        .and_then(|_| run(&cli, &mut ctx));

    let (code, result_sha256, error) = match &result {
        Ok(outcome) => {
            let text = outcome.rendered();
            print!("{text}");
            (
                if outcome.negative { 1 } else { 0 },
                Some(render::sha256_hex(text.as_bytes())),
                None,
            )
        }
        Err(err) => {
            eprintln!("turanpat {}: {err:#}", cli.command.name());
            (exit_code(err), None, Some(format!("{err:#}")))
        }
    };
    let manifest = Manifest {
        subcommand: cli.command.name(),
        config: serde_json::json!({
            "args": &cli.command,
            "seed": cli.seed,
            "jobs": cli.jobs,
            "caps": &ctx.caps,
        }),
        inputs: ctx.inputs.clone(),
        outputs: ctx.outputs.clone(),
        version: env!("CARGO_PKG_VERSION"),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        result_sha256,
        exit_code: code,
        error,
    };
    if let Err(e) = manifest.write(&cli.manifest) {
        eprintln!(
            "turanpat: cannot write manifest {}: {e}",
            cli.manifest.display()
        );
        if code == 0 {
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
