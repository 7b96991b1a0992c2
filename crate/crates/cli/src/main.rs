use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use rsplab::bounds::{evaluate, FORMULA_IDS};
use rsplab::fmt::{g17, parse_f64};
use rsplab::graphs::{complete_graph, cut_parameters_exact, draw_weights, generate_erdos_renyi, parse_graph_file};
use rsplab::heuristics::{
    exact_kmedian, greedy_matching, insertion_tour, nearest_neighbor_tour, trivial_kmedian, two_opt, InsertionRule,
    Tour,
};
use rsplab::lab::{run_suite, ExperimentConfig, OutputFormat, SuiteId};
use rsplab::metric::{build_metric, diameter, METRIC_TOLERANCE};
use rsplab::{Metric, Seed};

/// Random shortest path metric laboratory.
#[derive(Parser)]
#[command(name = "rsplab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph file.
    Gen {
        #[arg(long, value_parser = ["complete", "er"])]
        model: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also draw Exp(1) weights and write a weighted file.
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact cut parameters (alpha, beta) of a graph.
    Cutparams {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Shortest path metric of a graph (file weights, or Exp(1) drawn from the seed).
    Metric {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Run a heuristic on the metric of a graph.
    Heur {
        #[arg(value_parser = ["greedy-matching", "nn", "insertion", "two-opt", "kmedian"])]
        algorithm: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "nearest")]
        rule: InsertionRule,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        start: usize,
    },
    /// Run an experiment suite from a key=value config file.
    Suite {
        id: SuiteId,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Evaluate closed-form bounds.
    Bounds {
        #[command(subcommand)]
        action: BoundsAction,
    },
}

#[derive(Subcommand)]
enum BoundsAction {
    /// Evaluate one formula, e.g. `bounds eval exp-sum-cdf --params c=2,n=3,a=1`.
    Eval {
        formula: String,
        #[arg(long, default_value = "")]
        params: String,
    },
    /// List formula ids.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_metric(path: &Path, seed: u64) -> Result<Metric> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_graph_file(&text)?;
    if !file.graph.is_connected() {
        bail!("graph in {} is disconnected", path.display());
    }
    let weighted = match file.weights {
        Some(w) => w,
        None => draw_weights(&file.graph, Seed::new(seed)),
    };
    Ok(build_metric(&weighted))
}

fn print_tour(label: &str, tour: &Tour) {
    let order: Vec<String> = tour.order.iter().map(|v| (v + 1).to_string()).collect();
    println!("{label}_cost {}", g17(tour.cost));
    println!("{label}_order {}", order.join(" "));
}

/// Returns whether the command passed its checks.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Gen { model, n, p, seed, weighted, out } => {
            let graph = match model.as_str() {
                "complete" => complete_graph(n)?,
                _ => {
                    let p = p.context("--model er needs --p")?;
                    generate_erdos_renyi(n, p, Seed::new(seed).child(0, "graph"))?
                }
            };
            let text = if weighted {
                draw_weights(&graph, Seed::new(seed).child(0, "weights")).to_file_string()
            } else {
                graph.to_file_string()
            };
            emit(&text, out.as_deref())?;
            Ok(true)
        }
        Command::Cutparams { graph } => {
            let text = fs::read_to_string(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let cut = cut_parameters_exact(&parse_graph_file(&text)?.graph)?;
            println!("alpha {}", g17(cut.alpha));
            println!("beta {}", g17(cut.beta));
            Ok(true)
        }
        Command::Metric { graph, seed, export } => {
            let metric = load_metric(&graph, seed)?;
            let violations = metric.axiom_violations(METRIC_TOLERANCE);
            println!("n {}", metric.n());
            println!("diameter {}", g17(diameter(&metric)));
            println!("axiom_violations {violations}");
            if let Some(path) = export {
                emit(&metric.to_file_string(), Some(&path))?;
            }
            Ok(violations == 0)
        }
        Command::Heur { algorithm, graph, seed, rule, k, start } => {
            let metric = load_metric(&graph, seed)?;
            match algorithm.as_str() {
                "greedy-matching" => {
                    let m = greedy_matching(&metric)?;
                    println!("cost {}", g17(m.cost));
                    for (u, v) in &m.pairs {
                        println!("pair {} {}", u + 1, v + 1);
                    }
                }
                "nn" => print_tour("tour", &nearest_neighbor_tour(&metric, start)?),
                "insertion" => {
                    print_tour("tour", &insertion_tour(&metric, rule, Seed::new(seed).child(0, "insertion"))?)
                }
                "two-opt" => {
                    let trace = two_opt(&metric, &nearest_neighbor_tour(&metric, start)?)?;
                    println!("initial_cost {}", g17(trace.initial_cost));
                    println!("iterations {}", trace.iterations);
                    print_tour("final", &trace.final_tour);
                }
                _ => {
                    let centers: Vec<usize> = (0..k).collect();
                    let trivial = trivial_kmedian(&metric, &centers)?;
                    let exact = exact_kmedian(&metric, k)?;
                    let fmt = |c: &[usize]| c.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ");
                    println!("trivial_cost {}", g17(trivial.cost));
                    println!("exact_cost {}", g17(exact.cost));
                    println!("exact_centers {}", fmt(&exact.centers));
                }
            }
            Ok(true)
        }
        Command::Suite { id, config, format, out, sequential } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = ExperimentConfig::parse(&text, Some(id))?;
            if cfg.suite != id {
                bail!("config file is for suite `{}`, not `{id}`", cfg.suite);
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            if out.is_some() {
                cfg.output = out;
            }
            if sequential {
                cfg.parallel = false;
            }
            let report = run_suite(&cfg)?;
            let body = match cfg.format {
                OutputFormat::Csv => report.to_csv()?,
                OutputFormat::Json => report.to_json()? + "\n",
            };
            emit(&body, cfg.output.as_deref())?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("fail: {}: {}", c.name, c.detail);
            }
            Ok(report.passed())
        }
        Command::Bounds { action: BoundsAction::List } => {
            for id in FORMULA_IDS {
                println!("{id}");
            }
            Ok(true)
        }
        Command::Bounds { action: BoundsAction::Eval { formula, params } } => {
            let mut map = BTreeMap::new();
            for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (k, v) = item.split_once('=').with_context(|| format!("expected key=value, got `{item}`"))?;
                let value = parse_f64(v.trim()).with_context(|| format!("bad number `{v}`"))?;
                map.insert(k.trim().to_string(), value);
            }
            let value = evaluate(&formula, &map)?;
            println!("{} {}", value.formula, g17(value.value));
            if let Some(second) = value.second {
                println!("second {}", g17(second));
            }
            if value.clamped {
                println!("clamped true");
            }
            Ok(true)
        }
    }
}
