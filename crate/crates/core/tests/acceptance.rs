//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers to run a subset:
//! `cargo test --test acceptance -- 3 9`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use skelpath::eval::{compute_metrics, generate_queries, EvalConfig, MetricsReport};
use skelpath::fixtures::{names, v, worked_example};
use skelpath::graph::generate::{power_law, random_connected, Weights};
use skelpath::graph::{dijkstra, shortest_path, Graph, PathResult, Vertex};
use skelpath::hierarchy::{build_index, partition, save_index, HierIndex, IndexConfig, LeafModelKind, Partitioning};
use skelpath::search::{lsearch, NullModel, OracleModel, SearchConfig};
use skelpath::sgnn::{
    feature_dim, raw_features, save_model, train, Architecture, GraphContext, Normalizer, SgnnModel, TrainReport,
    TrainingConfig, TrainingPair,
};
use skelpath::skeleton::{build_labels, SkeletonConfig, SkeletonGraph};

use common::{check_buckets, floyd};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn label_corpus() -> Vec<(Graph, SkeletonConfig)> {
    (0..50u64)
        .map(|i| {
            let n = 20 + (i as usize * 37) % 181;
            let g = random_connected(n, n / 2 + i as usize, Weights::Uniform(1.0, 10.0), 1000 + i);
            let b = [2, 3][i as usize % 2];
            let m = [1, 2][(i as usize / 2) % 2];
            (g, SkeletonConfig::new(b, m).unwrap())
        })
        .collect()
}

fn c1_label_oracle() -> Result<String, String> {
    let start = Instant::now();
    let mut buckets = 0;
    for (i, (g, cfg)) in label_corpus().iter().enumerate() {
        let labels = build_labels(g, *cfg);
        check_buckets(g, &labels, &floyd(g)).map_err(|e| format!("graph {i}: {e}"))?;
        buckets += g.vertex_count() * cfg.bucket_count();
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{buckets} buckets on 50 graphs exact"))
}

fn c2_skeleton_weights() -> Result<String, String> {
    let mut edges = 0;
    for (i, (g, cfg)) in label_corpus().iter().enumerate() {
        let oracle = floyd(g);
        let sk = SkeletonGraph::build(&build_labels(g, *cfg));
        for (a, b, e) in sk.edges() {
            ensure(
                e.weight == oracle.dist[a][b] || (e.weight - oracle.dist[a][b]).abs() < 1e-9,
                || format!("graph {i} edge ({a}, {b}): {} vs {}", e.weight, oracle.dist[a][b]),
            )?;
            edges += 1;
        }
    }
    let g = worked_example();
    let labels = build_labels(&g, SkeletonConfig::new(3, 2).unwrap());
    let cfg = &labels.config;
    let bucket = |k| names(labels.label(v(1)).bucket(cfg, 0, k).iter().map(|e| e.vertex));
    ensure(bucket(1) == vec![8], || format!("B1 = {:?}", bucket(1)))?;
    ensure(bucket(2) == vec![2, 7, 9], || format!("B2 = {:?}", bucket(2)))?;
    ensure(bucket(3) == vec![3, 10, 11, 14], || format!("B3 = {:?}", bucket(3)))?;
    let w = SkeletonGraph::build(&labels).edge(v(1), v(2)).map(|e| e.weight);
    ensure(w == Some(4.0), || format!("<v1,v2> weight {w:?}"))?;
    Ok(format!("{edges} skeleton edges exact; worked example reproduced"))
}

fn all_pairs_agree(g: &Graph, run: impl Fn(Vertex, Vertex) -> PathResult) -> Result<usize, String> {
    let n = g.vertex_count();
    for s in 0..n {
        let tree = dijkstra(g, s);
        for t in 0..n {
            let r = run(s, t);
            ensure(r.distance == tree.dist[t], || {
                format!("pair ({s}, {t}): {} vs {}", r.distance, tree.dist[t])
            })?;
        }
    }
    Ok(n * n)
}

fn c3_null_reduction() -> Result<String, String> {
    let cfg = SearchConfig { alpha: 0.2, beta: None };
    let mut pairs = 0;
    for seed in 0..5 {
        let g = random_connected(100, 120, Weights::Uniform(1.0, 10.0), 300 + seed);
        pairs += all_pairs_agree(&g, |s, t| lsearch(&g, &NullModel, s, t, &cfg))?;
    }
    Ok(format!("{pairs} pairs equal to dijkstra"))
}

fn c4_oracle_exact() -> Result<String, String> {
    let cfg = SearchConfig {
        alpha: 0.0,
        beta: Some(0),
    };
    let mut pairs = 0;
    for seed in 0..5 {
        let g = random_connected(200, 250, Weights::Integer(1, 10), 400 + seed);
        let oracle = OracleModel::new(&g);
        pairs += all_pairs_agree(&g, |s, t| lsearch(&g, &oracle, s, t, &cfg))?;
    }
    Ok(format!("{pairs} pairs equal to dijkstra"))
}

fn c5_gradient_check() -> Result<String, String> {
    let start = Instant::now();
    let g = random_connected(20, 14, Weights::Uniform(1.0, 5.0), 5);
    let cfg = SkeletonConfig::new(2, 1).unwrap();
    let labels = build_labels(&g, cfg);
    let norm = Normalizer::fit(&raw_features(&g, &labels));
    let arch = Architecture {
        feature_dim: feature_dim(&labels),
        embedding_dim: 6,
        layers: cfg.tier_count(),
        head_hidden: vec![8, 4],
    };
    let mut model = SgnnModel::new(arch, cfg, norm.clone(), 0.5, 11);
    for spec in model.layout().iter().filter(|s| s.name.ends_with("bias")) {
        for (k, p) in model.params[spec.range()].iter_mut().enumerate() {
            *p = 0.03 * (k % 7) as f64 - 0.09;
        }
    }
    model.dist_scale = 8.0;
    model.hop_scale = 5.0;
    let ctx = GraphContext::new(&g, &labels, &norm);
    let mut batch = Vec::new();
    for s in 0..20 {
        let tree = dijkstra(&g, s);
        for t in (s + 1..20).step_by(3) {
            batch.push(TrainingPair {
                source: s,
                target: t,
                distance: tree.dist[t],
                hops: tree.hop[t] as f64,
            });
        }
    }
    let (_, grads) = model.loss_and_grads(&ctx, &batch);
    let h = 1e-6;
    let (mut worst_rel, mut worst_abs) = (0.0f64, 0.0f64);
    #[allow(clippy::needless_range_loop)]
    for i in 0..model.params.len() {
        let orig = model.params[i];
        model.params[i] = orig + h;
        let up = model.loss(&ctx, &batch).total;
        model.params[i] = orig - h;
        let down = model.loss(&ctx, &batch).total;
        model.params[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        let diff = (numeric - grads[i]).abs();
        let mag = numeric.abs().max(grads[i].abs());
        if mag < 1e-6 {
            worst_abs = worst_abs.max(diff);
        } else {
            worst_rel = worst_rel.max(diff / mag);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst_rel <= 1e-4 && worst_abs <= 1e-6 && secs < 120.0, || {
        format!("worst relative {worst_rel:.2e}, worst absolute {worst_abs:.2e}, {secs:.1} s")
    })?;
    Ok(format!(
        "{} parameters, worst relative error {worst_rel:.2e}",
        model.params.len()
    ))
}

struct Trained {
    graph: Graph,
    model: SgnnModel,
    report: TrainReport,
    secs: f64,
}

fn criterion6_training() -> TrainingConfig {
    TrainingConfig {
        batch_size: 2000,
        seed: 1,
        ..TrainingConfig::default()
    }
}

fn trained() -> &'static Trained {
    static CELL: OnceLock<Trained> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let graph = power_law(1000, 2, Weights::Uniform(1.0, 10.0), 42);
        let labels = build_labels(&graph, SkeletonConfig::for_graph(&graph));
        let (model, report) = train(&graph, &labels, &criterion6_training()).expect("training runs");
        Trained {
            graph,
            model,
            report,
            secs: start.elapsed().as_secs_f64(),
        }
    })
}

fn c6_training_quality() -> Result<String, String> {
    let t = trained();
    let m = t.report.test;
    let summary = format!(
        "held-out MAPE_d {:.2}%, MAPE_h {:.2}% on {} pairs after {} epochs, {:.0} s",
        m.mape_distance,
        m.mape_hop,
        m.pairs,
        t.report.epochs.len(),
        t.secs
    );
    ensure(m.mape_distance <= 20.0 && m.mape_hop <= 20.0 && t.secs < 1800.0, || {
        summary.clone()
    })?;
    Ok(summary)
}

fn search_workload(beta: Option<usize>) -> (MetricsReport, usize, usize) {
    let t = trained();
    let g = &t.graph;
    let queries = generate_queries(
        g,
        &EvalConfig {
            seed: 7,
            ..EvalConfig::default()
        },
        None,
    )
    .expect("queries");
    let truth: Vec<PathResult> = queries.iter().map(|&(s, q)| shortest_path(g, s, q)).collect();
    let cfg = SearchConfig { alpha: 0.2, beta };
    let found: Vec<PathResult> = queries.iter().map(|&(s, q)| lsearch(g, &t.model, s, q, &cfg)).collect();
    let pops = |rs: &[PathResult]| rs.iter().map(|r| r.popped).sum::<usize>();
    (compute_metrics(&truth, &found), pops(&found), pops(&truth))
}

fn c7_search_effectiveness() -> Result<String, String> {
    let (m, lpops, dpops) = search_workload(Some(0));
    let summary = format!("Acc {:.2}%, Hit {:.2}, pops {lpops} vs dijkstra {dpops}", m.acc, m.hit);
    ensure(m.acc >= 95.0 && m.hit >= 0.70 && lpops < dpops, || summary.clone())?;
    Ok(summary)
}

fn c8_beta_monotone() -> Result<String, String> {
    let (m0, _, _) = search_workload(Some(0));
    let (m4, _, _) = search_workload(Some(4));
    let summary = format!(
        "beta=0: Acc {:.2}% Hit {:.2}; beta=4: Acc {:.2}% Hit {:.2}",
        m0.acc, m0.hit, m4.acc, m4.hit
    );
    ensure(m4.acc >= m0.acc && m4.hit >= m0.hit, || summary.clone())?;
    Ok(summary)
}

struct Partitioned {
    graph: Graph,
    partition: Partitioning,
    plain: HierIndex,
}

fn partitioned() -> &'static Partitioned {
    static CELL: OnceLock<Partitioned> = OnceLock::new();
    CELL.get_or_init(|| {
        let graph = random_connected(2000, 2000, Weights::Uniform(1.0, 10.0), 2000);
        let partition = partition(&graph, 100, 16).expect("partition");
        let cfg = IndexConfig {
            leaf_models: LeafModelKind::None,
            ..IndexConfig::default()
        };
        let plain = build_index(&graph, &partition, &cfg).expect("index");
        Partitioned {
            graph,
            partition,
            plain,
        }
    })
}

fn cross_leaf_queries(p: &Partitioned, seed: u64) -> Vec<(Vertex, Vertex)> {
    let cfg = EvalConfig {
        eta: 1.0,
        seed,
        ..EvalConfig::default()
    };
    generate_queries(&p.graph, &cfg, Some(&p.plain)).expect("queries")
}

fn c9_hsearch_exact() -> Result<String, String> {
    let p = partitioned();
    let queries = cross_leaf_queries(p, 9);
    for &(s, t) in &queries {
        let want = dijkstra(&p.graph, s).dist[t];
        let got = p.plain.hsearch(&p.graph, s, t).distance;
        ensure(got == want, || format!("pair ({s}, {t}): {got} vs {want}"))?;
    }
    Ok(format!(
        "{} cross-leaf queries exact on {} leaves, {} levels",
        queries.len(),
        p.plain.leaf_count(),
        p.plain.nodes.iter().map(|n| n.depth).max().unwrap_or(0) + 1
    ))
}

fn hlsearch_acc(p: &Partitioned, idx: &HierIndex, queries: &[(Vertex, Vertex)]) -> MetricsReport {
    let cfg = SearchConfig::default();
    let truth: Vec<PathResult> = queries.iter().map(|&(s, t)| shortest_path(&p.graph, s, t)).collect();
    let found: Vec<PathResult> = queries
        .iter()
        .map(|&(s, t)| idx.hlsearch(&p.graph, s, t, &cfg))
        .collect();
    compute_metrics(&truth, &found)
}

fn c10_hlsearch() -> Result<String, String> {
    let p = partitioned();
    let queries = cross_leaf_queries(p, 10);
    let oracle_idx = build_index(
        &p.graph,
        &p.partition,
        &IndexConfig {
            leaf_models: LeafModelKind::Oracle,
            ..IndexConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let oracle = hlsearch_acc(p, &oracle_idx, &queries);
    let learned_idx = build_index(
        &p.graph,
        &p.partition,
        &IndexConfig {
            leaf_models: LeafModelKind::Sgnn(criterion6_training()),
            ..IndexConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let learned = hlsearch_acc(p, &learned_idx, &queries);
    let summary = format!(
        "learned leaves Acc {:.2}%, oracle leaves Acc {:.2}%",
        learned.acc, oracle.acc
    );
    ensure(learned.acc >= 95.0 && oracle.acc == 100.0, || summary.clone())?;
    Ok(summary)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool")
        .install(f)
}

fn c11_determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let g = random_connected(120, 150, Weights::Uniform(1.0, 10.0), 11);
    let labels = build_labels(&g, SkeletonConfig::DENSE);
    let cfg = TrainingConfig {
        epochs: 15,
        embedding_dim: 8,
        head_hidden: vec![16],
        seed: 3,
        ..TrainingConfig::default()
    };
    let p = partition(&g, 30, 4).map_err(|e| e.to_string())?;
    let icfg = IndexConfig {
        leaf_models: LeafModelKind::Sgnn(cfg.clone()),
        ..IndexConfig::default()
    };
    let mut files = Vec::new();
    for run in 0..2 {
        let (model, _) = in_pool(1, || train(&g, &labels, &cfg)).map_err(|e| e.to_string())?;
        let mp = dir.path().join(format!("model{run}.bin"));
        save_model(&mp, &model).map_err(|e| e.to_string())?;
        let idx = in_pool(1, || build_index(&g, &p, &icfg)).map_err(|e| e.to_string())?;
        let ip = dir.path().join(format!("index{run}.bin"));
        save_index(&ip, &idx).map_err(|e| e.to_string())?;
        files.push((std::fs::read(&mp).unwrap(), std::fs::read(&ip).unwrap(), model, idx));
    }
    ensure(files[0].0 == files[1].0, || "model files differ".into())?;
    ensure(files[0].1 == files[1].1, || "index files differ".into())?;
    let (model, idx) = (&files[0].2, &files[0].3);
    let queries: Vec<(Vertex, Vertex)> = (0..60).map(|i| ((i * 7) % 120, (i * 13 + 5) % 120)).collect();
    let run = |threads| {
        in_pool(threads, || {
            use rayon::prelude::*;
            let cfg = SearchConfig::default();
            queries
                .par_iter()
                .map(|&(s, t)| (lsearch(&g, model, s, t, &cfg), idx.hlsearch(&g, s, t, &cfg)))
                .collect::<Vec<_>>()
        })
    };
    let one = run(1);
    ensure(one == run(1) && one == run(4), || {
        "search outputs depend on thread count".into()
    })?;
    Ok(format!(
        "model and index bytes identical; {} query outputs identical at 1 and 4 threads",
        queries.len()
    ))
}

fn c12_partition_invariants() -> Result<String, String> {
    for seed in 0..20u64 {
        let n = 150 + 40 * seed as usize;
        let g = random_connected(n, n, Weights::Integer(1, 10), 1200 + seed);
        let min = 10 + seed as usize;
        let p = partition(&g, min, 8).map_err(|e| e.to_string())?;
        let mut owner = vec![usize::MAX; n];
        for (id, leaf) in p.leaves.iter().enumerate() {
            ensure(leaf.len() >= min, || {
                format!("graph {seed}: leaf {id} has {} < {min}", leaf.len())
            })?;
            for &x in leaf {
                ensure(owner[x] == usize::MAX, || {
                    format!("graph {seed}: vertex {x} in two leaves")
                })?;
                owner[x] = id;
            }
        }
        ensure(owner.iter().all(|&o| o != usize::MAX), || {
            format!("graph {seed}: cover incomplete")
        })?;
        let cross = g.edges().filter(|&(a, b, _)| owner[a] != owner[b]).count();
        ensure(cross == p.cross_after_refine && cross <= p.cross_before_refine, || {
            format!(
                "graph {seed}: cross {cross}, before {}, after {}",
                p.cross_before_refine, p.cross_after_refine
            )
        })?;
    }
    Ok("20 graphs: disjoint cover, minimum size, refinement never worse".into())
}

fn main() {
    let criteria: [(usize, &str, Check); 12] = [
        (1, "skeleton labels match brute force", c1_label_oracle),
        (2, "skeleton graph weights are exact", c2_skeleton_weights),
        (3, "null-model search reduces to dijkstra", c3_null_reduction),
        (4, "oracle-guided search is exact", c4_oracle_exact),
        (5, "analytic gradients match central differences", c5_gradient_check),
        (
            6,
            "training quality on 1000-vertex power-law graph",
            c6_training_quality,
        ),
        (7, "learned search accuracy and pops", c7_search_effectiveness),
        (8, "larger beta does not hurt accuracy", c8_beta_monotone),
        (9, "hsearch exact on cross-leaf queries", c9_hsearch_exact),
        (10, "hlsearch accuracy on cross-leaf queries", c10_hlsearch),
        (11, "determinism", c11_determinism),
        (12, "partition invariants", c12_partition_invariants),
    ];
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2}: {name}: {detail} [{secs:.1} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2}: {name}: {detail} [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
