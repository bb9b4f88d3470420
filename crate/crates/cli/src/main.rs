//! `recourse`: batch front end for capacitated recourse matching.
//!
//! Subcommands cover the three optimization layers plus utilities:
//! `match` (welfare-optimal matching under fixed capacities), `allocate`
//! (optimal capacity split of a total budget), `redistribute` (penalty-aware
//! capacity moves), `sweep` (welfare curve over budgets, CSV), and `costs`
//! (cost-matrix generation from linear provider models).
//!
//! Exit codes: 0 success, 1 validation error, 2 size guard exceeded. Errors
//! go to stderr only; output files are written only on success.

mod config;
mod matrix_io;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use recourse_core::{
    build_cost_matrix, individual_welfare, optimal_capacity, solve_matching, solve_penalized,
    to_weights, welfare_curve, ActionConstraints, CapacityVector, CostMatrix, Error, Norm,
    PenaltyConfig, Result, WeightMatrix,
};

use config::{load_config, RunConfig};
use matrix_io::{read_bounds, read_matrix, read_providers, read_seekers, write_matrix};
use report::{build_report, file_sha256, fmt9, sha256_of_parts, write_json, ConfigEcho, ReportParts};

#[derive(Parser)]
#[command(
    name = "recourse",
    version,
    about = "Capacitated many-to-many recourse matching toolkit"
)]
struct Cli {
    /// Output directory for reports and curves (falls back to
    /// RECOURSE_OUT_DIR, then the current directory)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum-weight matching under the configured capacities
    Match(SolveArgs),
    /// Optimal capacity distribution for the configured total budget
    Allocate(SolveArgs),
    /// Capacity redistribution balancing welfare against deviation penalties
    Redistribute(SolveArgs),
    /// Welfare curve over total budgets 0..=k_max (JSON report + CSV)
    Sweep(SweepArgs),
    /// Cost matrix from linear provider models
    Costs(CostsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MatrixKind {
    /// Recourse costs; the exponential transform applies (requires gamma)
    Cost,
    /// Ready edge weights in (0, 1]
    Weight,
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix CSV: header of provider ids, leading seeker-id column
    #[arg(long)]
    matrix: PathBuf,

    /// Whether the matrix holds costs or weights
    #[arg(long, value_enum)]
    kind: MatrixKind,

    /// Flat key-value config (gamma, betas, initial_capacities, k_total, k_max, norm)
    #[arg(long)]
    config: PathBuf,

    /// Report file name, relative to the output directory
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    solve: SolveArgs,

    /// Curve CSV file name, relative to the output directory
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct CostsArgs {
    /// Seekers CSV: header `seeker,<features...>`
    #[arg(long)]
    seekers: PathBuf,

    /// Providers CSV: header `provider,bias,<weights...>`
    #[arg(long)]
    providers: PathBuf,

    /// Bounds CSV: header `feature,lower,upper,mutable` (default: unbounded,
    /// all mutable)
    #[arg(long)]
    bounds: Option<PathBuf>,

    /// Flat key-value config; `norm` is required here
    #[arg(long)]
    config: PathBuf,

    /// Cost matrix output file name, relative to the output directory
    #[arg(long)]
    matrix_out: Option<PathBuf>,

    /// Report file name, relative to the output directory
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = match resolve_out_dir(cli.out_dir) {
        Ok(dir) => dir,
        Err(err) => return fail(&err),
    };
    let outcome = match &cli.command {
        Command::Match(args) => run_match(args, &out_dir),
        Command::Allocate(args) => run_allocate(args, &out_dir),
        Command::Redistribute(args) => run_redistribute(args, &out_dir),
        Command::Sweep(args) => run_sweep(args, &out_dir),
        Command::Costs(args) => run_costs(args, &out_dir),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => fail(&err),
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("{err}");
    match err {
        Error::SizeGuard(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn resolve_out_dir(flag: Option<PathBuf>) -> Result<PathBuf> {
    let dir = flag
        .or_else(|| std::env::var_os("RECOURSE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::Validation(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn out_path(dir: &Path, name: Option<&PathBuf>, default: &str) -> PathBuf {
    match name {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => dir.join(p),
        None => dir.join(default),
    }
}

struct LoadedMatrix {
    weights: WeightMatrix,
    transform: &'static str,
    hash: String,
}

fn load_weights(path: &Path, kind: MatrixKind, cfg: &RunConfig) -> Result<LoadedMatrix> {
    let hash = file_sha256(path)?;
    let raw = read_matrix(path)?;
    match kind {
        MatrixKind::Cost => {
            let gamma = cfg.gamma.ok_or_else(|| {
                Error::Validation("--kind cost requires `gamma` in the config".into())
            })?;
            let costs = CostMatrix::new(raw.rows, raw.seeker_ids, raw.provider_ids)?;
            let weights = to_weights(&costs, gamma)?;
            if weights.underflow_clamped() > 0 {
                eprintln!(
                    "warning: {} weight(s) underflowed exp(-gamma*cost) and were clamped \
                     to the smallest positive value",
                    weights.underflow_clamped()
                );
            }
            Ok(LoadedMatrix {
                weights,
                transform: "exp",
                hash,
            })
        }
        MatrixKind::Weight => {
            let weights = WeightMatrix::new(
                raw.rows,
                cfg.gamma.unwrap_or(1.0),
                raw.seeker_ids,
                raw.provider_ids,
            )?;
            Ok(LoadedMatrix {
                weights,
                transform: "none",
                hash,
            })
        }
    }
}

fn kind_name(kind: MatrixKind) -> &'static str {
    match kind {
        MatrixKind::Cost => "cost",
        MatrixKind::Weight => "weight",
    }
}

fn norm_name(norm: Option<Norm>) -> Option<&'static str> {
    norm.map(|n| match n {
        Norm::L1 => "l1",
        Norm::Linf => "linf",
    })
}

fn solver_echo<'a>(
    command: &'a str,
    args: &SolveArgs,
    cfg: &RunConfig,
    loaded: &LoadedMatrix,
) -> ConfigEcho<'a> {
    ConfigEcho {
        command,
        matrix_file: Some(args.matrix.display().to_string()),
        kind: Some(kind_name(args.kind)),
        transform: Some(loaded.transform),
        fixture_hash: loaded.hash.clone(),
        gamma: cfg.gamma,
        betas: None,
        initial_capacities: cfg.initial_capacities.clone(),
        k_total: cfg.k_total,
        k_max: cfg.k_max,
        norm: norm_name(cfg.norm),
        seekers_file: None,
        providers_file: None,
        bounds_file: None,
    }
}

fn run_match(args: &SolveArgs, out_dir: &Path) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let loaded = load_weights(&args.matrix, args.kind, &cfg)?;
    let caps = CapacityVector::new(cfg.initial_capacities.clone().ok_or_else(|| {
        Error::Validation("`match` requires `initial_capacities` in the config".into())
    })?);
    let (matching, welfare) = solve_matching(&loaded.weights, &caps)?;
    let value = build_report(&ReportParts {
        config: solver_echo("match", args, &cfg, &loaded),
        capacities_in: Some(&caps),
        capacities_out: Some(&caps),
        outcome: Some((&loaded.weights, &matching, &welfare)),
    });
    write_json(&out_path(out_dir, args.report.as_ref(), "match_report.json"), &value)
}

fn run_allocate(args: &SolveArgs, out_dir: &Path) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let loaded = load_weights(&args.matrix, args.kind, &cfg)?;
    let k_total = cfg.k_total.ok_or_else(|| {
        Error::Validation("`allocate` requires `k_total` in the config".into())
    })?;
    let best = optimal_capacity(&loaded.weights, k_total);
    let (matching, welfare) = solve_matching(&loaded.weights, &best)?;
    let initial = cfg.initial_capacities.clone().map(CapacityVector::new);
    let value = build_report(&ReportParts {
        config: solver_echo("allocate", args, &cfg, &loaded),
        capacities_in: initial.as_ref(),
        capacities_out: Some(&best),
        outcome: Some((&loaded.weights, &matching, &welfare)),
    });
    write_json(
        &out_path(out_dir, args.report.as_ref(), "allocate_report.json"),
        &value,
    )
}

fn run_redistribute(args: &SolveArgs, out_dir: &Path) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let loaded = load_weights(&args.matrix, args.kind, &cfg)?;
    let initial = CapacityVector::new(cfg.initial_capacities.clone().ok_or_else(|| {
        Error::Validation("`redistribute` requires `initial_capacities` in the config".into())
    })?);
    let betas = cfg
        .betas
        .as_ref()
        .ok_or_else(|| Error::Validation("`redistribute` requires `betas` in the config".into()))?
        .expand(loaded.weights.n_providers())?;
    let k_total = match cfg.k_total {
        Some(k) => k,
        None => u32::try_from(initial.total()).map_err(|_| {
            Error::Validation("initial capacities total overflows the budget type".into())
        })?,
    };
    let penalty = PenaltyConfig::new(betas.clone(), initial.clone())?;
    let (chosen, matching, welfare) = solve_penalized(&loaded.weights, &penalty, k_total)?;

    let mut echo = solver_echo("redistribute", args, &cfg, &loaded);
    echo.betas = Some(betas);
    echo.k_total = Some(k_total);
    let value = build_report(&ReportParts {
        config: echo,
        capacities_in: Some(&initial),
        capacities_out: Some(&chosen),
        outcome: Some((&loaded.weights, &matching, &welfare)),
    });
    write_json(
        &out_path(out_dir, args.report.as_ref(), "redistribute_report.json"),
        &value,
    )
}

fn run_sweep(args: &SweepArgs, out_dir: &Path) -> Result<()> {
    let cfg = load_config(&args.solve.config)?;
    let loaded = load_weights(&args.solve.matrix, args.solve.kind, &cfg)?;
    let weights = &loaded.weights;
    let k_max = cfg
        .k_max
        .unwrap_or((weights.n_seekers() * weights.n_providers()) as u32);
    let curve = welfare_curve(weights, k_max);

    let mut csv = String::from("k,welfare,individual_welfare,gap\n");
    let individual = individual_welfare(weights);
    for point in &curve {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            point.k_total,
            fmt9(point.welfare),
            fmt9(individual),
            fmt9(individual - point.welfare)
        ));
    }

    let last = curve.last().expect("curve has the budget-0 point");
    let (matching, welfare) = solve_matching(weights, &last.capacity)?;
    let initial = cfg.initial_capacities.clone().map(CapacityVector::new);
    let mut echo = solver_echo("sweep", &args.solve, &cfg, &loaded);
    echo.k_max = Some(k_max);
    let value = build_report(&ReportParts {
        config: echo,
        capacities_in: initial.as_ref(),
        capacities_out: Some(&last.capacity),
        outcome: Some((weights, &matching, &welfare)),
    });

    let curve_path = out_path(out_dir, args.curve.as_ref(), "sweep_curve.csv");
    std::fs::write(&curve_path, csv)
        .map_err(|e| Error::Validation(format!("cannot write {}: {e}", curve_path.display())))?;
    write_json(
        &out_path(out_dir, args.solve.report.as_ref(), "sweep_report.json"),
        &value,
    )
}

fn run_costs(args: &CostsArgs, out_dir: &Path) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let norm = cfg
        .norm
        .ok_or_else(|| Error::Validation("`costs` requires `norm` in the config".into()))?;
    let seekers = read_seekers(&args.seekers)?;
    let providers = read_providers(&args.providers)?;
    let dimension = seekers[0].features.len();
    let constraints = match &args.bounds {
        Some(path) => read_bounds(path, dimension)?,
        None => ActionConstraints::unbounded(dimension),
    };
    let costs = build_cost_matrix(&seekers, &providers, &constraints, norm)?;

    let read_bytes = |path: &Path| -> Result<Vec<u8>> {
        std::fs::read(path)
            .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))
    };
    let seeker_bytes = read_bytes(&args.seekers)?;
    let provider_bytes = read_bytes(&args.providers)?;
    let bound_bytes = match &args.bounds {
        Some(path) => read_bytes(path)?,
        None => Vec::new(),
    };
    let hash = sha256_of_parts(&[&seeker_bytes, &provider_bytes, &bound_bytes]);

    let echo = ConfigEcho {
        command: "costs",
        matrix_file: None,
        kind: None,
        transform: None,
        fixture_hash: hash,
        gamma: cfg.gamma,
        betas: None,
        initial_capacities: None,
        k_total: None,
        k_max: None,
        norm: norm_name(Some(norm)),
        seekers_file: Some(args.seekers.display().to_string()),
        providers_file: Some(args.providers.display().to_string()),
        bounds_file: args.bounds.as_ref().map(|p| p.display().to_string()),
    };
    let value = build_report(&ReportParts {
        config: echo,
        capacities_in: None,
        capacities_out: None,
        outcome: None,
    });

    let rows: Vec<Vec<f64>> = (0..costs.n_seekers())
        .map(|i| costs.row(i).to_vec())
        .collect();
    write_matrix(
        &out_path(out_dir, args.matrix_out.as_ref(), "cost_matrix.csv"),
        costs.seeker_ids(),
        costs.provider_ids(),
        &rows,
        fmt9,
    )?;
    write_json(
        &out_path(out_dir, args.report.as_ref(), "costs_report.json"),
        &value,
    )
}
