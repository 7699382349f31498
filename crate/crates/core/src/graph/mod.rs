//! Undirected weighted graphs and the exact search machinery built on them.

mod dijkstra;
pub mod generate;
mod io;
mod landmark;
mod path;
pub(crate) mod queue;

pub use dijkstra::{dijkstra, shortest_path, OracleEntry, ShortestPathTree};
pub use io::{load_edge_list, load_graph, parse_edge_list, save_graph, save_id_map, LoadedGraph};
pub use landmark::LandmarkIndex;
pub use path::{remove_cycles, PathResult};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Immutable undirected graph stored as per-vertex adjacency lists sorted by
/// neighbor id. Every edge appears in both endpoint lists with the same weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<(Vertex, f64)>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Duplicate pairs keep the
    /// minimum weight.
    pub fn from_edges(vertex_count: usize, edges: &[(Vertex, Vertex, f64)]) -> Result<Self> {
        let mut adj: Vec<Vec<(Vertex, f64)>> = vec![Vec::new(); vertex_count];
        for &(u, v, w) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::Validation(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop on vertex {u}")));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Validation(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            list.dedup_by_key(|e| e.0);
            edge_count += list.len();
        }
        Ok(Graph {
            adj,
            edge_count: edge_count / 2,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, f64)] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn edge_weight(&self, u: Vertex, v: Vertex) -> Option<f64> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |e| e.0).ok().map(|i| list[i].1)
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`, in id order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, f64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&(v, _)| u < v).map(move |&(v, w)| (u, v, w)))
    }

    /// Total weight of a walk, or `None` if two consecutive vertices are not adjacent.
    pub fn path_weight(&self, path: &[Vertex]) -> Option<f64> {
        let mut total = 0.0;
        for pair in path.windows(2) {
            total += self.edge_weight(pair[0], pair[1])?;
        }
        Some(total)
    }

    /// Vertices ordered by descending degree, ties broken by smaller id.
    pub fn vertices_by_degree(&self) -> Vec<Vertex> {
        let mut order: Vec<Vertex> = (0..self.vertex_count()).collect();
        order.sort_by(|&a, &b| self.degree(b).cmp(&self.degree(a)).then(a.cmp(&b)));
        order
    }

    /// Component id per vertex; components are numbered by their smallest vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// The subgraph induced by `vertices` (in the given order), with local ids.
    pub fn induced(&self, vertices: &[Vertex]) -> Subgraph {
        let mut local = vec![u32::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i as u32;
        }
        let mut adj = Vec::with_capacity(vertices.len());
        let mut edge_count = 0;
        for &v in vertices {
            let list: Vec<(Vertex, f64)> = self
                .neighbors(v)
                .iter()
                .filter(|&&(u, _)| local[u] != u32::MAX)
                .map(|&(u, w)| (local[u] as Vertex, w))
                .collect::<Vec<_>>();
            edge_count += list.len();
            adj.push(list);
        }
        for list in &mut adj {
            list.sort_by_key(|e| e.0);
        }
        Subgraph {
            graph: Graph {
                adj,
                edge_count: edge_count / 2,
            },
            global: vertices.to_vec(),
            local,
        }
    }

    /// Sum over vertices of `|adjacency|` in bytes, used by memory accounting.
    pub fn storage_bytes(&self) -> usize {
        self.edge_count * 2 * std::mem::size_of::<(Vertex, f64)>()
            + self.vertex_count() * std::mem::size_of::<Vec<(Vertex, f64)>>()
    }
}

/// An induced subgraph together with its local/global id maps.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    pub global: Vec<Vertex>,
    local: Vec<u32>,
}

impl Subgraph {
    pub fn to_local(&self, v: Vertex) -> Option<Vertex> {
        match self.local.get(v) {
            Some(&l) if l != u32::MAX => Some(l as Vertex),
            _ => None,
        }
    }

    pub fn to_global(&self, v: Vertex) -> Vertex {
        self.global[v]
    }

    pub fn path_to_global(&self, path: &[Vertex]) -> Vec<Vertex> {
        path.iter().map(|&v| self.global[v]).collect()
    }
}
