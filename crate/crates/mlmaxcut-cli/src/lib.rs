//! Command-line front end for the multilevel Max-Cut solver.
//!
//! Two subcommands: `solve` runs one graph through the pipeline and emits a
//! JSON report; `bench` runs every loadable graph in a directory and emits
//! one CSV row per graph. All solver configuration is exposed as flags that
//! map one-to-one onto [`RunConfig`] fields, so the config echoed inside a
//! report can be turned back into an identical invocation.
//!
//! Reports go to stdout (or `--out`); progress and the one-line summary go
//! to stderr, keeping stdout machine-readable. Exit codes: 0 success, 1
//! stage-named runtime error, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Once;

use clap::{ArgAction, Args, Parser, Subcommand};
use mlmaxcut::error::{Error, Result};
use mlmaxcut::io::{detect_format, load_graph, GraphFormat, LoadedGraph};
use mlmaxcut::pipeline::{self, RunConfig, RunReport};
use mlmaxcut::qaoa::QaoaParams;
use mlmaxcut::solver::SolverKind;

#[derive(Debug, Parser)]
#[command(
    name = "mlmaxcut",
    version,
    about = "Multilevel weighted Max-Cut solver",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Increase log verbosity (-v info, -vv debug, -vvv trace).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one graph and emit a JSON report.
    Solve(SolveArgs),
    /// Solve every loadable graph in a directory and emit a CSV summary.
    Bench(BenchArgs),
}

/// Solver configuration flags; each maps onto one [`RunConfig`] field.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// Subproblem size K: refinement solves K-variable subproblems and
    /// coarsening stops below K nodes.
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Independent refinement instances per level; the best one wins.
    #[arg(long, default_value_t = 40)]
    multistarts: usize,
    /// Embedding dimension used by coarsening.
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Fraction of each level's edges to sparsify away before matching.
    #[arg(long, default_value_t = 0.0)]
    sparsify: f64,
    /// Subproblem solver: exact, tabu, or qaoa.
    #[arg(long, default_value = "tabu")]
    solver: SolverKind,
    /// Master seed; fixes every random choice of the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coarsest-level solve budget, seconds.
    #[arg(long = "coarsest-budget", default_value_t = 5.0)]
    coarsest_budget: f64,
    /// Per-subproblem solve budget, seconds.
    #[arg(long = "sub-budget", default_value_t = 0.1)]
    sub_budget: f64,
    /// Stop refining after this many consecutive non-improving iterations.
    #[arg(long = "no-improve-limit", default_value_t = 3)]
    no_improve_limit: usize,
    /// QAOA circuit depth (layer pairs).
    #[arg(long = "qaoa-p", default_value_t = 3)]
    qaoa_p: usize,
    /// QAOA measurement shots per solve.
    #[arg(long = "qaoa-shots", default_value_t = 1024)]
    qaoa_shots: usize,
    /// QAOA dense-simulation qubit cap.
    #[arg(long = "qaoa-max-qubits", default_value_t = 16)]
    qaoa_max_qubits: usize,
}

impl ConfigArgs {
    fn to_run_config(&self) -> Result<RunConfig> {
        if self.solver == SolverKind::Qaoa && self.k > self.qaoa_max_qubits {
            return Err(Error::InvalidConfig(format!(
                "--solver qaoa cannot simulate subproblems of --k {} variables \
                 (cap {}); lower --k or raise --qaoa-max-qubits",
                self.k, self.qaoa_max_qubits
            ))
            .in_stage("config"));
        }
        Ok(RunConfig {
            subproblem_size: self.k,
            multistarts: self.multistarts,
            dim: self.dim,
            sparsify_fraction: self.sparsify,
            solver: self.solver,
            seed: self.seed,
            coarsest_budget_secs: self.coarsest_budget,
            subproblem_budget_secs: self.sub_budget,
            no_improve_limit: self.no_improve_limit,
            qaoa: QaoaParams {
                layers: self.qaoa_p,
                shots: self.qaoa_shots,
                max_qubits: self.qaoa_max_qubits,
                ..QaoaParams::default()
            },
        })
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Input graph file.
    input: PathBuf,
    /// Input format (edgelist or mtx); inferred from the extension if
    /// omitted.
    #[arg(long)]
    format: Option<GraphFormat>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the cut as two-column "label side" lines to this file.
    #[arg(long = "partition-out")]
    partition_out: Option<PathBuf>,
    /// Write the finest-level embedding as "label x y ..." lines to this
    /// file.
    #[arg(long = "dump-embedding")]
    dump_embedding: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory of graph files.
    dir: PathBuf,
    /// Input format for every file; inferred per file if omitted.
    #[arg(long)]
    format: Option<GraphFormat>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `argv` and run. Returns the process exit code; never exits or
/// panics on user errors, so tests can call it directly.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Prints help/version to stdout, diagnostics to stderr; exit
            // code 2 for usage errors, 0 for help and version.
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_logging(cli.verbose);
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mlmaxcut: {e}");
            1
        }
    }
}

fn run_solve(args: &SolveArgs) -> Result<()> {
    let cfg = args.config.to_run_config()?;
    let format = args.format.unwrap_or_else(|| detect_format(&args.input));
    let loaded = load_graph(&args.input, format).map_err(|e| e.in_stage("load"))?;
    if loaded.self_loops_dropped > 0 {
        log::info!("dropped {} self-loops while loading", loaded.self_loops_dropped);
    }
    let report = pipeline::solve(&loaded.graph, &cfg)?;

    let json = report_json(&report);
    match &args.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| Error::from(e).in_stage("report"))?,
        None => print!("{json}"),
    }
    if let Some(path) = &args.partition_out {
        std::fs::write(path, partition_text(&loaded, &report))
            .map_err(|e| Error::from(e).in_stage("report"))?;
    }
    if let Some(path) = &args.dump_embedding {
        let embedding = pipeline::finest_embedding(&loaded.graph, &cfg)
            .map_err(|e| e.in_stage("embedding"))?;
        let mut text = String::new();
        for (i, &label) in loaded.labels.iter().enumerate() {
            write!(text, "{label}").unwrap();
            for c in embedding.position(i) {
                write!(text, " {c}").unwrap();
            }
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| Error::from(e).in_stage("report"))?;
    }
    eprintln!("{}", summary_line(&report));
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    let cfg = args.config.to_run_config()?;
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&args.dir)
        .map_err(|e| Error::from(e).in_stage("load"))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    entries.sort();

    let mut csv = String::from("name,nodes,edges,objective,coarse_ratio,wall_time_secs\n");
    let mut solved = 0usize;
    for path in &entries {
        let format = args.format.unwrap_or_else(|| detect_format(path));
        let loaded = match load_graph(path, format) {
            Ok(loaded) => loaded,
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                continue;
            }
        };
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        eprintln!("solving {name} ({} nodes, {} edges)", loaded.graph.num_nodes(),
            loaded.graph.num_edges());
        let report = pipeline::solve(&loaded.graph, &cfg)?;
        let ratio = report.coarse_ratio.map(|r| r.to_string()).unwrap_or_default();
        writeln!(
            csv,
            "{name},{},{},{},{ratio},{}",
            loaded.graph.num_nodes(),
            loaded.graph.num_edges(),
            report.objective,
            report.wall_time_secs
        )
        .unwrap();
        eprintln!("{}", summary_line(&report));
        solved += 1;
    }
    if solved == 0 {
        return Err(Error::InvalidInstance(format!(
            "no loadable graph files in {}",
            args.dir.display()
        ))
        .in_stage("load"));
    }
    match &args.out {
        Some(path) => std::fs::write(path, &csv).map_err(|e| Error::from(e).in_stage("report"))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn report_json(report: &RunReport) -> String {
    let mut json =
        serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    json.push('\n');
    json
}

fn partition_text(loaded: &LoadedGraph, report: &RunReport) -> String {
    let mut text = String::new();
    for (&label, &side) in loaded.labels.iter().zip(&report.assignment) {
        writeln!(text, "{label} {side}").unwrap();
    }
    text
}

fn summary_line(report: &RunReport) -> String {
    let ratio = report
        .coarse_ratio
        .map(|r| format!("{r:.4}"))
        .unwrap_or_else(|| "n/a".into());
    format!(
        "objective {} coarse_ratio {ratio} wall_time {:.3}s",
        report.objective, report.wall_time_secs
    )
}

/// Render a config as the exact flag list that reproduces it, the inverse
/// of flag parsing. Covers every flag-mapped field; the QAOA optimizer
/// settings have no flags and stay at their defaults.
pub fn config_to_flags(cfg: &RunConfig) -> Vec<String> {
    vec![
        "--k".into(),
        cfg.subproblem_size.to_string(),
        "--multistarts".into(),
        cfg.multistarts.to_string(),
        "--dim".into(),
        cfg.dim.to_string(),
        "--sparsify".into(),
        cfg.sparsify_fraction.to_string(),
        "--solver".into(),
        cfg.solver.to_string(),
        "--seed".into(),
        cfg.seed.to_string(),
        "--coarsest-budget".into(),
        cfg.coarsest_budget_secs.to_string(),
        "--sub-budget".into(),
        cfg.subproblem_budget_secs.to_string(),
        "--no-improve-limit".into(),
        cfg.no_improve_limit.to_string(),
        "--qaoa-p".into(),
        cfg.qaoa.layers.to_string(),
        "--qaoa-shots".into(),
        cfg.qaoa.shots.to_string(),
        "--qaoa-max-qubits".into(),
        cfg.qaoa.max_qubits.to_string(),
    ]
}

/// Parse a flag list (as produced by [`config_to_flags`]) back into the
/// [`RunConfig`] it denotes, without running anything.
pub fn parse_config_flags(flags: &[String]) -> Result<RunConfig> {
    let mut argv: Vec<String> = vec!["mlmaxcut".into(), "solve".into(), "unused.edges".into()];
    argv.extend(flags.iter().cloned());
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| Error::InvalidConfig(e.to_string()).in_stage("config"))?;
    match cli.command {
        Command::Solve(args) => args.config.to_run_config(),
        Command::Bench(_) => unreachable!("constructed argv always uses solve"),
    }
}

fn init_logging(verbosity: u8) {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        let level = match verbosity {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            2 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        };
        let _ = env_logger::Builder::new()
            .filter_level(level)
            .format_timestamp(None)
            .try_init();
    });
}
