use std::path::PathBuf;
use std::process::ExitCode;

use cfs_cli::commands::{
    cmd_classify, cmd_connect, cmd_distance, cmd_holonomy, cmd_lattice, resolve_scales, FrameKind,
};
use cfs_cli::config::GenerateConfig;
use cfs_cli::converge::{cmd_converge, ConvergeConfig};
use cfs_cli::error::{load_error, CliError, CliResult};
use cfs_cli::file::{read_system, SystemFile};
use cfs_cli::validate::{cmd_validate, ValidateOptions};
use cfs_cli::{thread_pool, ReportBundle};
use cfs_core::causal::{GraphConfig, ProductNorm, LATTICE_DEFAULT_CAP};
use cfs_core::CausalFermionSystem;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Thread count override, read when --threads is absent.
const THREADS_ENV: &str = "CFS_THREADS";

#[derive(Parser)]
#[command(
    name = "cfs",
    version,
    about = "Analysis of finite causal fermion systems"
)]
struct Cli {
    /// Worker threads for pair and triple work (default: CFS_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long)]
    eig_rel: Option<f64>,
    #[arg(long)]
    imag_rel: Option<f64>,
    #[arg(long)]
    zero_abs: Option<f64>,
}

#[derive(Args)]
struct SystemArgs {
    /// System file (JSON).
    system: String,
    #[command(flatten)]
    tol: TolArgs,
    /// Write every report file into this directory instead of printing the primary one.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Spectral,
    Operator,
}

#[derive(Args)]
struct ScaleArgs {
    #[arg(long)]
    lmin: Option<f64>,
    #[arg(long)]
    lmax: Option<f64>,
    #[arg(long, value_enum, default_value = "spectral")]
    norm: NormArg,
    /// Only join spin-connectable pairs.
    #[arg(long)]
    spin_connectable: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build a system from a generator configuration.
    Generate {
        #[arg(long)]
        config: String,
        /// Output file (default: stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Causal classification and time direction of every pair.
    Classify {
        #[command(flatten)]
        sys: SystemArgs,
        /// Report the self-relation on the diagonal.
        #[arg(long)]
        include_diagonal: bool,
    },
    /// Causal graph, Lorentzian distances and the causal order.
    Distance {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        scales: ScaleArgs,
    },
    /// The orthogonality lattice of the causal order.
    Lattice {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        scales: ScaleArgs,
        #[arg(long, default_value_t = LATTICE_DEFAULT_CAP)]
        max_points: usize,
    },
    /// Spin transport along a path of point ids.
    Connect {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        path: Vec<String>,
        #[arg(long, value_enum, default_value = "directional")]
        frames: FrameKind,
    },
    /// Holonomy around a triangle of point ids.
    Holonomy {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        triangle: Vec<String>,
        #[arg(long, value_enum, default_value = "directional")]
        frames: FrameKind,
    },
    /// Transport convergence along a timelike geodesic of the Minkowski model.
    Converge {
        #[arg(long)]
        config: Option<String>,
        #[arg(long, value_delimiter = ',')]
        eps_list: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        refine_list: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite; exits with 1 on any violation.
    Validate {
        #[command(flatten)]
        sys: SystemArgs,
        /// Largest dimension for the dense classification oracle.
        #[arg(long, default_value_t = ValidateOptions::default().dense_oracle_max_f)]
        dense_max_f: usize,
    },
}

fn read_text(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.into(),
        message: e.to_string(),
    })
}

fn load(args: &SystemArgs) -> CliResult<CausalFermionSystem> {
    let mut sys = read_system(&args.system)?;
    let mut tol = *sys.tolerances();
    tol.eig_rel = args.tol.eig_rel.unwrap_or(tol.eig_rel);
    tol.imag_rel = args.tol.imag_rel.unwrap_or(tol.imag_rel);
    tol.zero_abs = args.tol.zero_abs.unwrap_or(tol.zero_abs);
    sys.set_tolerances(tol)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(sys)
}

fn graph_config(sys: &CausalFermionSystem, a: &ScaleArgs) -> CliResult<GraphConfig> {
    let norm = match a.norm {
        NormArg::Spectral => ProductNorm::SpectralRadius,
        NormArg::Operator => ProductNorm::OperatorNorm,
    };
    let mut c = GraphConfig::new(resolve_scales(sys, a.lmin, a.lmax, norm)?);
    c.require_spin_connectable = a.spin_connectable;
    Ok(c)
}

fn emit(bundle: &ReportBundle, out: &Option<PathBuf>) -> CliResult<()> {
    match out {
        Some(dir) => bundle.write_to(dir),
        None => {
            print!("{}", bundle.primary());
            Ok(())
        }
    }
}

fn warn(lines: impl IntoIterator<Item = String>) {
    for l in lines {
        eprintln!("warning: {l}");
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Generate { config, output } => {
            let cfg = GenerateConfig::parse(&read_text(&config)?, &config)?;
            warn(cfg.warnings());
            let text = SystemFile::from_system(&cfg.build()?).emit();
            match output {
                Some(p) => std::fs::write(&p, text).map_err(|e| CliError::Io {
                    path: p.display().to_string(),
                    message: e.to_string(),
                })?,
                None => print!("{text}"),
            }
        }
        Command::Classify {
            sys,
            include_diagonal,
        } => {
            let s = load(&sys)?;
            emit(&cmd_classify(&s, include_diagonal)?, &sys.out)?;
        }
        Command::Distance { sys, scales } => {
            let s = load(&sys)?;
            let g = graph_config(&s, &scales)?;
            warn(g.scales.warnings(&s));
            emit(&cmd_distance(&s, &g)?, &sys.out)?;
        }
        Command::Lattice {
            sys,
            scales,
            max_points,
        } => {
            let s = load(&sys)?;
            emit(
                &cmd_lattice(&s, &graph_config(&s, &scales)?, max_points)?,
                &sys.out,
            )?;
        }
        Command::Connect { sys, path, frames } => {
            let s = load(&sys)?;
            emit(&cmd_connect(&s, &path, frames)?, &sys.out)?;
        }
        Command::Holonomy {
            sys,
            triangle,
            frames,
        } => {
            let s = load(&sys)?;
            emit(&cmd_holonomy(&s, &triangle, frames)?, &sys.out)?;
        }
        Command::Converge {
            config,
            eps_list,
            refine_list,
            out,
        } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = read_text(&path)?;
                    serde_json::from_str(&text).map_err(|e| CliError::Parse {
                        source_name: path.clone(),
                        message: e.to_string(),
                    })?
                }
                None => ConvergeConfig::default(),
            };
            cfg.tolerances.validate().map_err(load_error)?;
            if let Some(e) = eps_list {
                cfg.eps_list = e;
            }
            if let Some(r) = refine_list {
                cfg.refine_list = r;
            }
            emit(&cmd_converge(&cfg)?, &out)?;
        }
        Command::Validate { sys, dense_max_f } => {
            let s = load(&sys)?;
            let opt = ValidateOptions {
                dense_oracle_max_f: dense_max_f,
                ..Default::default()
            };
            let (bundle, passed) = cmd_validate(&s, &opt);
            emit(&bundle, &sys.out)?;
            return Ok(passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse() {
                Ok(t) => Some(t),
                Err(_) => {
                    eprintln!("error: {THREADS_ENV}={v} is not a thread count");
                    return ExitCode::from(2);
                }
            },
            Err(_) => None,
        },
    };
    let result = thread_pool(threads).and_then(|pool| pool.install(|| run(cli)));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
