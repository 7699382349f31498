mod common;

use proptest::prelude::*;

use skelpath::fixtures::{names, v, worked_example};
use skelpath::graph::generate::{random_connected, Weights};
use skelpath::graph::{dijkstra, Graph};
use skelpath::skeleton::{build_labels, load_labels, save_labels, SkeletonConfig, SkeletonGraph};

use common::{check_buckets, floyd};

fn graph_strategy() -> impl Strategy<Value = (Graph, SkeletonConfig)> {
    (5usize..60, 0usize..80, 2usize..4, 0usize..3, any::<u64>()).prop_map(|(n, extra, b, m, seed)| {
        (
            random_connected(n, extra, Weights::Uniform(1.0, 10.0), seed),
            SkeletonConfig::new(b, m).unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn buckets_match_brute_force((g, cfg) in graph_strategy()) {
        let labels = build_labels(&g, cfg);
        prop_assert_eq!(check_buckets(&g, &labels, &floyd(&g)), Ok(()));
    }

    #[test]
    fn links_point_one_bucket_back((g, cfg) in graph_strategy()) {
        let labels = build_labels(&g, cfg);
        for owner in 0..g.vertex_count() {
            let label = labels.label(owner);
            for tier in 0..=cfg.max_tier {
                for e in label.bucket(&cfg, tier, 1) {
                    prop_assert_eq!(e.linked, owner);
                }
                for k in 2..=cfg.base {
                    let below: Vec<usize> = label.bucket(&cfg, tier, k - 1).iter().map(|e| e.vertex).collect();
                    for e in label.bucket(&cfg, tier, k) {
                        prop_assert!(below.contains(&e.linked), "owner {} tier {} k {}", owner, tier, k);
                    }
                }
            }
        }
    }

    #[test]
    fn skeleton_edges_are_exact_label_links((g, cfg) in graph_strategy()) {
        let labels = build_labels(&g, cfg);
        let oracle = floyd(&g);
        let sk = SkeletonGraph::build(&labels);
        let mut links = std::collections::BTreeSet::new();
        for label in &labels.labels {
            for bucket in &label.buckets {
                for e in bucket {
                    links.insert((label.owner.min(e.vertex), label.owner.max(e.vertex)));
                }
            }
        }
        let edges: std::collections::BTreeSet<_> = sk.edges().map(|(a, b, _)| (a.min(b), a.max(b))).collect();
        prop_assert_eq!(&edges, &links);
        for (a, b, e) in sk.edges() {
            prop_assert!((e.weight - oracle.dist[a][b]).abs() <= 1e-9);
        }
    }
}

#[test]
fn integer_weights_agree_with_dijkstra_hops() {
    // Ties are possible here, so compare against the oracle's own tie-breaking.
    for seed in 0..5 {
        let g = random_connected(80, 60, Weights::Integer(1, 3), seed);
        let cfg = SkeletonConfig::DENSE;
        let labels = build_labels(&g, cfg);
        for owner in 0..80 {
            if g.degree(owner) == 1 {
                continue;
            }
            let tree = dijkstra(&g, owner);
            for index in 0..cfg.bucket_count() {
                let h = cfg.bucket_hop(index);
                let mut got: Vec<usize> = labels.label(owner).buckets[index].iter().map(|e| e.vertex).collect();
                got.sort_unstable();
                let want: Vec<usize> = (0..80).filter(|&x| x != owner && tree.hop[x] == h).collect();
                assert_eq!(got, want);
            }
        }
    }
}

#[test]
fn worked_example_values() {
    let g = worked_example();
    let labels = build_labels(&g, SkeletonConfig::new(3, 2).unwrap());
    let cfg = &labels.config;
    let bucket = |k| names(labels.label(v(1)).bucket(cfg, 0, k).iter().map(|e| e.vertex));
    assert_eq!(bucket(1), vec![8]);
    assert_eq!(bucket(2), vec![2, 7, 9]);
    assert_eq!(bucket(3), vec![3, 10, 11, 14]);
    let sk = SkeletonGraph::build(&labels);
    assert_eq!(sk.edge(v(1), v(2)).unwrap().weight, 4.0);
    assert_eq!(g.edge_weight(v(1), v(2)), Some(5.0));
}

#[test]
fn sparse_default_for_low_degree() {
    let path: Vec<_> = (0..20).map(|i| (i, i + 1, 1.0)).collect();
    let g = Graph::from_edges(21, &path).unwrap();
    assert_eq!(SkeletonConfig::for_graph(&g), SkeletonConfig::SPARSE);
    assert_eq!((SkeletonConfig::SPARSE.base, SkeletonConfig::SPARSE.max_tier), (3, 2));
    let dense = random_connected(50, 200, Weights::Integer(1, 3), 0);
    assert_eq!(SkeletonConfig::for_graph(&dense), SkeletonConfig::DENSE);
}

#[test]
fn labels_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.bin");
    let g = random_connected(60, 50, Weights::Uniform(1.0, 4.0), 9);
    let labels = build_labels(&g, SkeletonConfig::DENSE);
    save_labels(&path, &labels).unwrap();
    assert_eq!(load_labels(&path).unwrap(), labels);
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 3);
    std::fs::write(&path, &bytes).unwrap();
    assert!(load_labels(&path).is_err());
}
