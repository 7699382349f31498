use proptest::prelude::*;

use skelpath::graph::generate::{power_law, random_connected, Weights};
use skelpath::graph::{dijkstra, Graph, LandmarkIndex};
use skelpath::search::{compare_searches, lsearch, NullModel, OracleModel, SearchConfig};

fn exhaustive_matches_dijkstra(g: &Graph, model: &dyn skelpath::search::DistanceModel, cfg: &SearchConfig) {
    for s in 0..g.vertex_count() {
        let tree = dijkstra(g, s);
        for t in 0..g.vertex_count() {
            let r = lsearch(g, model, s, t, cfg);
            assert_eq!(r.distance, tree.dist[t], "pair ({s}, {t}) cfg {cfg:?}");
            assert_eq!(g.path_weight(&r.vertices), Some(r.distance));
        }
    }
}

#[test]
fn same_source_and_target() {
    let g = random_connected(10, 5, Weights::Integer(1, 5), 1);
    let r = lsearch(&g, &NullModel, 4, 4, &SearchConfig::default());
    assert_eq!(r.vertices, vec![4]);
    assert_eq!((r.distance, r.hops, r.popped), (0.0, 0, 1));
}

#[test]
fn unreachable_target() {
    let g = Graph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
    let r = lsearch(&g, &OracleModel::new(&g), 0, 3, &SearchConfig::default());
    assert!(!r.is_reachable());
    assert!(r.distance.is_infinite());
}

#[test]
fn null_model_without_guidance_is_dijkstra() {
    let cfg = SearchConfig { alpha: 0.2, beta: None };
    for seed in 0..3 {
        let g = random_connected(100, 120, Weights::Uniform(1.0, 10.0), seed);
        exhaustive_matches_dijkstra(&g, &NullModel, &cfg);
    }
}

#[test]
fn oracle_model_is_exact_for_any_alpha_beta() {
    for (seed, alpha, beta) in [(0, 0.0, Some(0)), (1, 0.5, Some(2)), (2, 1.0, None), (3, 0.2, Some(0))] {
        let g = random_connected(120, 150, Weights::Integer(1, 10), seed);
        exhaustive_matches_dijkstra(&g, &OracleModel::new(&g), &SearchConfig { alpha, beta });
    }
}

#[test]
fn oracle_guidance_expands_fewer_vertices() {
    let g = power_law(300, 2, Weights::Integer(1, 10), 5);
    let oracle = OracleModel::new(&g);
    let landmarks = LandmarkIndex::build(&g, 8);
    let queries: Vec<_> = (0..40).map(|i| (i * 7 % 300, (i * 13 + 101) % 300)).collect();
    let cfg = SearchConfig::default();
    let summary = compare_searches(&g, &oracle, &landmarks, &queries, &cfg);
    let by = |name: &str| summary.iter().find(|m| m.method == name).unwrap();
    assert_eq!(by("dijkstra").metrics.hit, 1.0);
    assert_eq!(by("lsearch").metrics.acc, 100.0);
    assert!(by("lsearch").total_popped < by("dijkstra").total_popped);
    assert!(by("landmark").metrics.acc <= 100.0);

    let null = compare_searches(&g, &NullModel, &landmarks, &queries, &cfg);
    assert_eq!(null.iter().find(|m| m.method == "lsearch").unwrap().total_pruned, 0);
}

/// Predicts a constant multiple of the true distance, with finite buffers,
/// so the search is both misguided and allowed to skip.
struct Skewed(OracleModel, f64);

impl skelpath::search::DistanceModel for Skewed {
    fn predict_distance(&self, s: usize, t: usize) -> f64 {
        self.0.predict_distance(s, t) * self.1
    }
    fn predict_hop(&self, s: usize, t: usize) -> f64 {
        self.0.predict_hop(s, t) * self.1
    }
    fn error_buffers(&self) -> skelpath::sgnn::ErrorBuffers {
        skelpath::sgnn::ErrorBuffers {
            distance: 1.0,
            hop: 1.0,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn never_undershoots(seed in 0u64..1000, skew in 0.3f64..3.0, alpha in 0.0f64..1.0, beta in 0usize..4) {
        let g = random_connected(40, 40, Weights::Uniform(1.0, 10.0), seed);
        let model = Skewed(OracleModel::new(&g), skew);
        let cfg = SearchConfig { alpha, beta: Some(beta) };
        for s in (0..40).step_by(7) {
            let tree = dijkstra(&g, s);
            for t in 0..40 {
                let r = lsearch(&g, &model, s, t, &cfg);
                if r.is_reachable() {
                    prop_assert!(r.distance >= tree.dist[t] - 1e-9);
                    prop_assert_eq!(g.path_weight(&r.vertices), Some(r.distance));
                    prop_assert_eq!(r.vertices.first(), Some(&s));
                    prop_assert_eq!(r.vertices.last(), Some(&t));
                }
            }
        }
    }
}
