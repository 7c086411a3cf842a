//! Command-line front end: configuration-driven experiment runs, figure
//! reproduction, network diagnostics, identification checks, and plot
//! emission. Exit code 0 on success, nonzero on validation or numeric
//! failure.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use peerfx::experiment::{
    diagnose_graph, reproduce_figure, run_to_files, ExperimentConfig, IdentifyConfig,
};
use peerfx::graph::Graph;
use peerfx::identify::Tolerances;
use peerfx::ops::TraceOptions;
use peerfx::plot::plot_summary_file;

#[derive(Parser)]
#[command(
    name = "peerfx",
    about = "Simulation and estimation toolkit for network peer-effect models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of replications.
        #[arg(long)]
        reps: Option<usize>,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reproduce one of the six benchmark figures end to end.
    ReproduceFigure {
        /// Figure number, 1 through 6.
        figure: u8,
        /// Output directory (default `figures/figure<N>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of replications (default 200).
        #[arg(long)]
        reps: Option<usize>,
        /// Override the base seed (default 42).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print structural diagnostics for a graph (from an edge-list file or
    /// drawn from an experiment config's ensemble).
    Diagnose {
        /// Edge-list file: header `n <count>`, then `i j` per edge.
        #[arg(long, conflicts_with = "config")]
        graph: Option<PathBuf>,
        /// Experiment config whose ensemble is sampled instead.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Grid point to sample when using --config (default: first).
        #[arg(long)]
        n: Option<usize>,
        /// Seed for the sampled graph (default: the config's seed).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the identification checks described by a TOML config file.
    Identify {
        #[arg(long)]
        config: PathBuf,
        /// Optional path for the machine-readable CSV verdict.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVG plots from a summary CSV.
    Plot {
        /// Summary CSV produced by `run` or `reproduce-figure`.
        #[arg(long)]
        summary: PathBuf,
        /// Output directory for the SVG files.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            reps,
            seed,
        } => {
            let mut cfg = ExperimentConfig::from_toml_file(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            if let Some(r) = reps {
                cfg.replications = r;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out_dir = out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
            let outputs = run_to_files(&cfg, &out_dir)?;
            println!("results: {}", outputs.results_csv.display());
            println!("summary: {}", outputs.summary_csv.display());
            for svg in outputs.svgs {
                println!("plot:    {}", svg.display());
            }
        }
        Command::ReproduceFigure {
            figure,
            out,
            reps,
            seed,
        } => {
            let out_dir =
                out.unwrap_or_else(|| PathBuf::from("figures").join(format!("figure{figure}")));
            let outputs = reproduce_figure(figure, &out_dir, reps, seed)?;
            println!("results: {}", outputs.results_csv.display());
            println!("summary: {}", outputs.summary_csv.display());
            for svg in outputs.svgs {
                println!("plot:    {}", svg.display());
            }
        }
        Command::Diagnose {
            graph,
            config,
            n,
            seed,
        } => {
            let (g, params) = match (graph, config) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    (Graph::from_edge_list(&text)?, None)
                }
                (None, Some(path)) => {
                    let cfg = ExperimentConfig::from_toml_file(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let n = n.unwrap_or(cfg.n_grid[0]);
                    let seed = seed.unwrap_or(cfg.seed);
                    let g = cfg.ensemble.generate(n, seed)?;
                    let params = match cfg.model {
                        peerfx::experiment::ModelConfig::Lim(p) => Some(p),
                        peerfx::experiment::ModelConfig::Lis(_) => None,
                    };
                    (g, params)
                }
                _ => bail!("diagnose needs exactly one of --graph or --config"),
            };
            let report = diagnose_graph(&g, params.as_ref(), &TraceOptions::default())?;
            print!("{report}");
        }
        Command::Identify { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = IdentifyConfig::from_toml_str(&text)?;
            let report = cfg.run(&Tolerances::default())?;
            print!("{}", report.render());
            if let Some(path) = out {
                std::fs::write(&path, report.csv())?;
                println!("verdicts: {}", path.display());
            }
        }
        Command::Plot { summary, out } => {
            let paths = plot_summary_file(&summary, &out)?;
            for p in paths {
                println!("plot: {}", p.display());
            }
        }
    }
    Ok(())
}
