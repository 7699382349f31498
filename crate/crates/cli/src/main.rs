use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use skelpath::eval::{run_experiment, ExperimentSpec};
use skelpath::graph::{
    dijkstra, load_edge_list, load_graph, save_graph, save_id_map, shortest_path, Graph, LandmarkIndex, PathResult,
};
use skelpath::hierarchy::{
    build_index, load_index, partition, save_index, IndexConfig, LeafModelKind, Objective, Partitioning, Territory,
};
use skelpath::search::{lsearch, SearchConfig};
use skelpath::sgnn::{load_model, save_model, train, TrainingConfig};
use skelpath::skeleton::{build_labels, load_labels, save_labels, write_labels_text, SkeletonConfig, SkeletonGraph};

#[derive(Parser)]
#[command(name = "skelpath", version, about = "Skeleton-guided learned shortest-path search")]
struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Directory that relative artifact paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    data_dir: PathBuf,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a `u v [w]` edge list and write a binary graph.
    Ingest {
        edges: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the original vertex ids, one per compact id.
        #[arg(long)]
        ids: Option<PathBuf>,
    },
    /// Build skeleton labels.
    Skeleton {
        #[arg(short, long)]
        graph: PathBuf,
        /// Bucket base [default: 2 for dense graphs, 3 for sparse ones]
        #[arg(short, long)]
        base: Option<usize>,
        /// Highest tier [default: 2]
        #[arg(short = 'm', long)]
        max_tier: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
        /// Human-readable dump of every label.
        #[arg(long)]
        text: Option<PathBuf>,
        /// Edge list of the skeleton graph (`u v weight tier hop`).
        #[arg(long)]
        skeleton_graph: Option<PathBuf>,
    },
    /// Train a distance and hop model.
    Train {
        #[arg(short, long)]
        graph: PathBuf,
        #[arg(short, long)]
        labels: PathBuf,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(short, long)]
        output: PathBuf,
        /// Per-epoch losses as CSV.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Training report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Predict distance and hop length for one pair.
    Predict {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        source: usize,
        #[arg(short, long)]
        target: usize,
        /// Graph to compute the true values on.
        #[arg(short, long)]
        graph: Option<PathBuf>,
        /// Print the true distance and hops next to the prediction (needs --graph).
        #[arg(long, requires = "graph")]
        truth: bool,
    },
    /// Answer one shortest-path query.
    Search(SearchArgs),
    /// Split a graph into leaves.
    Partition {
        #[arg(short, long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 100)]
        min_leaf: usize,
        /// Number of growth seeds (highest-degree vertices).
        #[arg(long, default_value_t = 16)]
        seeds: usize,
        /// Partitioning as JSON.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Hierarchical index commands.
    Hindex {
        #[command(subcommand)]
        command: HindexCommand,
    },
    /// Run an experiment described by a JSON spec.
    Eval {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Subcommand)]
enum HindexCommand {
    /// Build leaf models, leaf matrices and inner distance-path matrices.
    Build {
        #[arg(short, long)]
        graph: PathBuf,
        /// Partitioning JSON from `partition`.
        #[arg(short, long)]
        partition: PathBuf,
        #[arg(long, default_value_t = 5)]
        fanout: usize,
        #[arg(long, value_enum, default_value_t = TerritoryArg::Full)]
        territory: TerritoryArg,
        #[arg(long, value_enum, default_value_t = LeafModelArg::Sgnn)]
        leaf_model: LeafModelArg,
        /// Skeleton base for leaf models [default: chosen per leaf]
        #[arg(short, long)]
        base: Option<usize>,
        /// Skeleton highest tier for leaf models [default: 2]
        #[arg(short = 'm', long)]
        max_tier: Option<usize>,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Clone)]
struct TrainArgs {
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 10_000)]
    batch: usize,
    #[arg(long, default_value_t = 32)]
    emb: usize,
    /// Weight of the distance loss; the hop loss gets `1 - gamma`.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Fraction of sampled pairs used for training; the rest is held out.
    #[arg(long, default_value_t = 0.9)]
    train_fraction: f64,
    /// Maximum number of ground-truth pairs.
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    /// Hidden widths of the prediction heads, comma separated.
    #[arg(long, default_value = "64,64", value_delimiter = ',')]
    hidden: Vec<usize>,
}

impl TrainArgs {
    fn config(&self, seed: u64) -> TrainingConfig {
        TrainingConfig {
            learning_rate: self.lr,
            batch_size: self.batch,
            epochs: self.epochs,
            embedding_dim: self.emb,
            gamma: self.gamma,
            seed,
            train_fraction: self.train_fraction,
            pair_sample_budget: self.pairs,
            head_hidden: self.hidden.clone(),
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(value_enum)]
    method: MethodArg,
    #[arg(short, long)]
    graph: PathBuf,
    #[arg(short, long)]
    source: usize,
    #[arg(short, long)]
    target: usize,
    /// Model file (lsearch).
    #[arg(short, long)]
    model: Option<PathBuf>,
    /// Index file (hsearch, hlsearch).
    #[arg(short, long)]
    index: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Hop depth below which guidance stays off; `inf` disables it.
    #[arg(long, default_value = "0")]
    beta: Beta,
    /// Landmark count (landmark).
    #[arg(long, default_value_t = 16)]
    landmarks: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Corrected)]
    objective: ObjectiveArg,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Dijkstra,
    Landmark,
    Lsearch,
    Hsearch,
    Hlsearch,
}

#[derive(Clone, Copy, ValueEnum)]
enum TerritoryArg {
    Full,
    Restricted,
}

#[derive(Clone, Copy, ValueEnum)]
enum LeafModelArg {
    Sgnn,
    Oracle,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Corrected,
    /// Ignores the distance between access vertices; approximate.
    Literal,
}

#[derive(Clone, Copy, Debug)]
struct Beta(Option<usize>);

impl FromStr for Beta {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "none" => Ok(Beta(None)),
            _ => s
                .parse()
                .map(|b| Beta(Some(b)))
                .map_err(|_| format!("expected a hop count or `inf`, got `{s}`")),
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(b) => write!(f, "{b}"),
            None => write!(f, "inf"),
        }
    }
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<skelpath::Error> for Failure {
    fn from(e: skelpath::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    seed: u64,
    data_dir: PathBuf,
}

impl Ctx {
    fn path(&self, p: &Path) -> PathBuf {
        if p.is_relative() {
            self.data_dir.join(p)
        } else {
            p.to_path_buf()
        }
    }

    /// Resolves an input path and fails with a usage error if it is missing.
    fn input(&self, p: &Path) -> Result<PathBuf, Failure> {
        let full = self.path(p);
        if full.exists() {
            Ok(full)
        } else {
            Err(Failure::Usage(format!("input file {} does not exist", full.display())))
        }
    }

    fn graph(&self, p: &Path) -> Result<Graph, Failure> {
        Ok(load_graph(&self.input(p)?)?)
    }
}

fn check_vertex(g: &Graph, v: usize) -> Result<(), Failure> {
    if v < g.vertex_count() {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "vertex {v} out of range (graph has {} vertices)",
            g.vertex_count()
        )))
    }
}

fn skeleton_config(g: &Graph, base: Option<usize>, max_tier: Option<usize>) -> Result<SkeletonConfig, Failure> {
    let auto = SkeletonConfig::for_graph(g);
    SkeletonConfig::new(base.unwrap_or(auto.base), max_tier.unwrap_or(auto.max_tier))
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn print_path(r: &PathResult, json: bool) -> Outcome {
    if json {
        println!("{}", serde_json::to_string(r).map_err(|e| Failure::Run(e.to_string()))?);
    } else if r.is_reachable() {
        println!(
            "distance {} hops {} popped {} pruned {}",
            r.distance, r.hops, r.popped, r.pruned
        );
        let path: Vec<String> = r.vertices.iter().map(usize::to_string).collect();
        println!("path {}", path.join(" "));
    } else {
        println!("unreachable popped {}", r.popped);
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        seed: cli.seed,
        data_dir: cli.data_dir,
    };
    match cli.command {
        Command::Ingest { edges, output, ids } => {
            let loaded = load_edge_list(&ctx.input(&edges)?)?;
            save_graph(&ctx.path(&output), &loaded.graph)?;
            if let Some(ids) = ids {
                save_id_map(&ctx.path(&ids), &loaded.ids)?;
            }
            println!(
                "{} vertices, {} edges, {} self-loops skipped",
                loaded.graph.vertex_count(),
                loaded.graph.edge_count(),
                loaded.skipped_self_loops
            );
        }
        Command::Skeleton {
            graph,
            base,
            max_tier,
            output,
            text,
            skeleton_graph,
        } => {
            let g = ctx.graph(&graph)?;
            let cfg = skeleton_config(&g, base, max_tier)?;
            let labels = build_labels(&g, cfg);
            save_labels(&ctx.path(&output), &labels)?;
            if let Some(p) = text {
                write_labels_text(&ctx.path(&p), &labels)?;
            }
            let sk = SkeletonGraph::build(&labels);
            if let Some(p) = skeleton_graph {
                sk.write_edge_list(&ctx.path(&p))?;
            }
            println!(
                "b={} m={}: {} label entries, {} skeleton edges",
                cfg.base,
                cfg.max_tier,
                labels.entry_count(),
                sk.edge_count()
            );
        }
        Command::Train {
            graph,
            labels,
            train: args,
            output,
            log,
            report,
        } => {
            let g = ctx.graph(&graph)?;
            let labels = load_labels(&ctx.input(&labels)?)?;
            if labels.vertex_count() != g.vertex_count() {
                return Err(Failure::Usage("labels were built for a different graph".into()));
            }
            let cfg = args.config(ctx.seed);
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let (model, rep) = train(&g, &labels, &cfg)?;
            save_model(&ctx.path(&output), &model)?;
            if let Some(p) = log {
                rep.write_epoch_log(&ctx.path(&p))?;
            }
            if let Some(p) = report {
                let text = serde_json::to_string_pretty(&rep).map_err(|e| Failure::Run(e.to_string()))?;
                let p = ctx.path(&p);
                fs::write(&p, text).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?;
            }
            println!(
                "held-out MAPE_d {:.2}% MAPE_h {:.2}% over {} pairs; error buffers {:.3} {:.3}",
                rep.test.mape_distance, rep.test.mape_hop, rep.test.pairs, rep.error_buffers.0, rep.error_buffers.1
            );
        }
        Command::Predict {
            model,
            source,
            target,
            graph,
            truth,
        } => {
            let m = load_model(&ctx.input(&model)?)?;
            let n = m.embeddings().map_or(0, |e| e.nrows());
            if source >= n || target >= n {
                return Err(Failure::Usage(format!(
                    "vertex out of range (model covers {n} vertices)"
                )));
            }
            let (d, h) = m.predict_pair(source, target);
            print!("distance {d} hops {h}");
            if truth {
                let g = ctx.graph(graph.as_deref().expect("clap enforces --graph"))?;
                check_vertex(&g, source)?;
                check_vertex(&g, target)?;
                let tree = dijkstra(&g, source);
                print!(" truth_distance {} truth_hops {}", tree.dist[target], tree.hop[target]);
            }
            println!();
        }
        Command::Search(a) => {
            let g = ctx.graph(&a.graph)?;
            check_vertex(&g, a.source)?;
            check_vertex(&g, a.target)?;
            let cfg = SearchConfig {
                alpha: a.alpha,
                beta: a.beta.0,
            };
            let objective = match a.objective {
                ObjectiveArg::Corrected => Objective::Corrected,
                ObjectiveArg::Literal => Objective::Literal,
            };
            let need = |p: &Option<PathBuf>, what: &str| -> Result<PathBuf, Failure> {
                match p {
                    Some(p) => ctx.input(p),
                    None => Err(Failure::Usage(format!("this method needs --{what}"))),
                }
            };
            let r = match a.method {
                MethodArg::Dijkstra => shortest_path(&g, a.source, a.target),
                MethodArg::Landmark => {
                    LandmarkIndex::build(&g, a.landmarks.clamp(1, g.vertex_count())).query(&g, a.source, a.target)
                }
                MethodArg::Lsearch => {
                    let m = load_model(&need(&a.model, "model")?)?;
                    if m.embeddings().map_or(0, |e| e.nrows()) != g.vertex_count() {
                        return Err(Failure::Usage("model was trained on a different graph".into()));
                    }
                    lsearch(&g, &m, a.source, a.target, &cfg)
                }
                MethodArg::Hsearch => {
                    load_index(&need(&a.index, "index")?, &g)?.hsearch_with(&g, a.source, a.target, objective)
                }
                MethodArg::Hlsearch => {
                    load_index(&need(&a.index, "index")?, &g)?.hlsearch_with(&g, a.source, a.target, &cfg, objective)
                }
            };
            print_path(&r, a.json)?;
        }
        Command::Partition {
            graph,
            min_leaf,
            seeds,
            output,
        } => {
            let g = ctx.graph(&graph)?;
            let p = partition(&g, min_leaf, seeds).map_err(|e| Failure::Usage(e.to_string()))?;
            let text = serde_json::to_string(&p).map_err(|e| Failure::Run(e.to_string()))?;
            let out = ctx.path(&output);
            fs::write(&out, text).map_err(|e| Failure::Run(format!("{}: {e}", out.display())))?;
            println!(
                "{} leaves, {} cross edges ({} before refinement, {} moves)",
                p.leaf_count(),
                p.cross_after_refine,
                p.cross_before_refine,
                p.moves
            );
        }
        Command::Hindex {
            command:
                HindexCommand::Build {
                    graph,
                    partition: part,
                    fanout,
                    territory,
                    leaf_model,
                    base,
                    max_tier,
                    train: args,
                    output,
                },
        } => {
            let g = ctx.graph(&graph)?;
            let part_path = ctx.input(&part)?;
            let text =
                fs::read_to_string(&part_path).map_err(|e| Failure::Run(format!("{}: {e}", part_path.display())))?;
            let p: Partitioning =
                serde_json::from_str(&text).map_err(|e| Failure::Run(format!("{}: {e}", part_path.display())))?;
            let skeleton = match (base, max_tier) {
                (None, None) => None,
                _ => Some(skeleton_config(&g, base, max_tier)?),
            };
            let leaf_models = match leaf_model {
                LeafModelArg::Sgnn => {
                    let cfg = args.config(ctx.seed);
                    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
                    LeafModelKind::Sgnn(cfg)
                }
                LeafModelArg::Oracle => LeafModelKind::Oracle,
                LeafModelArg::None => LeafModelKind::None,
            };
            let cfg = IndexConfig {
                fanout,
                territory: match territory {
                    TerritoryArg::Full => Territory::Full,
                    TerritoryArg::Restricted => Territory::Restricted,
                },
                leaf_models,
                skeleton,
            };
            let idx = build_index(&g, &p, &cfg)?;
            save_index(&ctx.path(&output), &idx)?;
            println!(
                "{} nodes, {} leaves, {} matrix bytes",
                idx.nodes.len(),
                idx.leaf_count(),
                idx.matrix_bytes()
            );
        }
        Command::Eval { spec } => {
            let path = ctx.input(&spec)?;
            let mut s = ExperimentSpec::from_file(&path).map_err(|e| Failure::Usage(e.to_string()))?;
            if ctx.seed != 0 {
                s.queries.seed = ctx.seed;
            }
            s.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let summary = run_experiment(&s)?;
            for m in &summary.methods {
                println!(
                    "{:<24} acc {:>7.3}% hit {:.3} pops {:>9} prunes {:>9} {:>10.1} us",
                    m.label, m.metrics.acc, m.metrics.hit, m.total_popped, m.total_pruned, m.metrics.query_time_micros
                );
            }
            println!("results written to {}", s.output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
