//! Small hand-built graphs shared by tests, examples and the CLI smoke run.

use crate::graph::{Graph, Vertex};

/// Id of the 1-based vertex `v_k` in [`worked_example`].
pub const fn v(k: usize) -> Vertex {
    k - 1
}

/// 17-vertex weighted graph used as the running example.
///
/// From `v1` (base 3): `v8` is one hop away, `v2` two hops (the direct edge
/// of weight 5 loses to `v1-v8-v2` of weight 4), `v7, v9` two hops,
/// `v3, v10, v11, v14` three hops, `v5, v15` six hops and `v17` nine hops.
/// The four highest-degree vertices are `v8, v7, v12, v13`.
pub fn worked_example() -> Graph {
    let e = |a: usize, b: usize, w: f64| (v(a), v(b), w);
    let edges = [
        e(1, 8, 2.0),
        e(1, 2, 5.0),
        e(8, 2, 2.0),
        e(8, 7, 1.0),
        e(8, 9, 1.0),
        e(8, 11, 5.0),
        e(2, 3, 1.0),
        e(7, 11, 1.0),
        e(7, 10, 3.0),
        e(7, 14, 3.0),
        e(9, 14, 1.0),
        e(9, 10, 1.0),
        e(3, 4, 1.0),
        e(4, 6, 1.0),
        e(6, 5, 1.0),
        e(4, 12, 1.0),
        e(12, 15, 1.0),
        e(12, 6, 5.0),
        e(12, 5, 5.0),
        e(5, 13, 1.0),
        e(13, 16, 1.0),
        e(13, 15, 5.0),
        e(13, 17, 5.0),
        e(16, 17, 1.0),
    ];
    Graph::from_edges(17, &edges).expect("valid fixture")
}

/// Maps 0-based ids back to 1-based `v_k` numbers, sorted.
pub fn names(vertices: impl IntoIterator<Item = Vertex>) -> Vec<usize> {
    let mut out: Vec<usize> = vertices.into_iter().map(|x| x + 1).collect();
    out.sort_unstable();
    out
}

/// [`worked_example`] rendered as edge-list text with 1-based ids.
pub fn worked_example_edge_list() -> String {
    let g = worked_example();
    let mut s = String::from("# 17-vertex worked example, 1-based ids\n");
    for (a, b, w) in g.edges() {
        s.push_str(&format!("{} {} {}\n", a + 1, b + 1, w));
    }
    s
}
