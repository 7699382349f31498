use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partitioning {
    /// Leaf id of every vertex.
    pub assignment: Vec<usize>,
    /// Sorted vertex sets, indexed by leaf id.
    pub leaves: Vec<Vec<Vertex>>,
    pub cross_edges: Vec<(Vertex, Vertex, f64)>,
    /// Cross-edge count before and after boundary refinement.
    pub cross_before_refine: usize,
    pub cross_after_refine: usize,
    pub moves: usize,
}

impl Partitioning {
    pub fn single_leaf(g: &Graph) -> Self {
        let n = g.vertex_count();
        Partitioning {
            assignment: vec![0; n],
            leaves: vec![(0..n).collect()],
            cross_edges: Vec::new(),
            cross_before_refine: 0,
            cross_after_refine: 0,
            moves: 0,
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Partitioning with the given leaf ids (renumbered densely in id order).
    pub fn from_assignment(g: &Graph, assignment: Vec<usize>) -> Self {
        let mut ids: Vec<usize> = assignment.clone();
        ids.sort_unstable();
        ids.dedup();
        let remap: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let assignment: Vec<usize> = assignment.iter().map(|p| remap[p]).collect();
        let mut leaves = vec![Vec::new(); ids.len()];
        for (v, &p) in assignment.iter().enumerate() {
            leaves[p].push(v);
        }
        let cross_edges: Vec<_> = g.edges().filter(|&(a, b, _)| assignment[a] != assignment[b]).collect();
        Partitioning {
            assignment,
            leaves,
            cross_before_refine: cross_edges.len(),
            cross_after_refine: cross_edges.len(),
            cross_edges,
            moves: 0,
        }
    }
}

fn cross_count(g: &Graph, assignment: &[usize]) -> usize {
    g.edges().filter(|&(a, b, _)| assignment[a] != assignment[b]).count()
}

/// Splits `g` into leaves of at least `min_leaf_size` vertices.
///
/// Regions grow round-robin by BFS from the `seed_count` highest-degree
/// vertices, one vertex per region per turn. Vertices no region reaches join
/// the smallest region. Undersized regions are merged into the neighbor
/// sharing the most cross edges, then boundary vertices move to the
/// neighboring leaf holding most of their edges whenever that strictly
/// lowers the cross-edge count and keeps every leaf at the minimum size.
/// At most `n` such moves are made.
pub fn partition(g: &Graph, min_leaf_size: usize, seed_count: usize) -> Result<Partitioning> {
    if min_leaf_size < 2 || seed_count < 2 {
        return Err(Error::Config(format!(
            "min leaf size ({min_leaf_size}) and seed count ({seed_count}) must both be at least 2"
        )));
    }
    let n = g.vertex_count();
    if n < 2 * min_leaf_size {
        return Ok(Partitioning::single_leaf(g));
    }
    let seeds: Vec<Vertex> = g.vertices_by_degree().into_iter().take(seed_count).collect();
    let mut assignment = grow_regions(g, &seeds);
    merge_undersized(g, &mut assignment, min_leaf_size);
    let before = cross_count(g, &assignment);
    let moves = refine(g, &mut assignment, min_leaf_size);
    let mut p = Partitioning::from_assignment(g, assignment);
    p.cross_before_refine = before;
    p.moves = moves;
    debug_assert!(p.cross_after_refine <= before);
    Ok(p)
}

const UNASSIGNED: usize = usize::MAX;

fn grow_regions(g: &Graph, seeds: &[Vertex]) -> Vec<usize> {
    let n = g.vertex_count();
    let mut assignment = vec![UNASSIGNED; n];
    let mut queues: Vec<VecDeque<Vertex>> = Vec::with_capacity(seeds.len());
    let mut sizes = vec![0usize; seeds.len()];
    for (p, &s) in seeds.iter().enumerate() {
        assignment[s] = p;
        sizes[p] = 1;
        queues.push(g.neighbors(s).iter().map(|&(u, _)| u).collect());
    }
    let mut active = true;
    while active {
        active = false;
        for p in 0..seeds.len() {
            while let Some(v) = queues[p].pop_front() {
                if assignment[v] != UNASSIGNED {
                    continue;
                }
                assignment[v] = p;
                sizes[p] += 1;
                queues[p].extend(
                    g.neighbors(v)
                        .iter()
                        .map(|&(u, _)| u)
                        .filter(|&u| assignment[u] == UNASSIGNED),
                );
                active = true;
                break;
            }
        }
    }
    for a in assignment.iter_mut().filter(|a| **a == UNASSIGNED) {
        let smallest = (0..sizes.len())
            .min_by_key(|&p| (sizes[p], p))
            .expect("at least one seed");
        *a = smallest;
        sizes[smallest] += 1;
    }
    assignment
}

fn sizes_of(assignment: &[usize]) -> BTreeMap<usize, usize> {
    let mut sizes = BTreeMap::new();
    for &p in assignment {
        *sizes.entry(p).or_insert(0) += 1;
    }
    sizes
}

fn merge_undersized(g: &Graph, assignment: &mut [usize], min_size: usize) {
    loop {
        let sizes = sizes_of(assignment);
        if sizes.len() <= 1 {
            return;
        }
        let Some((&small, _)) = sizes
            .iter()
            .filter(|(_, &s)| s < min_size)
            .min_by_key(|(&p, &s)| (s, p))
        else {
            return;
        };
        let mut shared: BTreeMap<usize, usize> = BTreeMap::new();
        for (a, b, _) in g.edges() {
            let (pa, pb) = (assignment[a], assignment[b]);
            if pa == small && pb != small {
                *shared.entry(pb).or_insert(0) += 1;
            } else if pb == small && pa != small {
                *shared.entry(pa).or_insert(0) += 1;
            }
        }
        let target = shared
            .iter()
            .max_by_key(|(&p, &c)| (c, std::cmp::Reverse(p)))
            .map(|(&p, _)| p)
            .unwrap_or_else(|| {
                *sizes
                    .iter()
                    .filter(|(&p, _)| p != small)
                    .min_by_key(|(&p, &s)| (s, p))
                    .expect("another leaf exists")
                    .0
            });
        for a in assignment.iter_mut().filter(|a| **a == small) {
            *a = target;
        }
    }
}

fn refine(g: &Graph, assignment: &mut [usize], min_size: usize) -> usize {
    let n = g.vertex_count();
    let mut sizes = sizes_of(assignment);
    let mut moves = 0;
    let mut changed = true;
    while changed && moves < n {
        changed = false;
        for v in 0..n {
            if moves >= n {
                break;
            }
            let home = assignment[v];
            if sizes[&home] <= min_size {
                continue;
            }
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for &(u, _) in g.neighbors(v) {
                *counts.entry(assignment[u]).or_insert(0) += 1;
            }
            let stay = counts.get(&home).copied().unwrap_or(0);
            let best = counts
                .iter()
                .filter(|(&p, _)| p != home)
                .max_by_key(|(&p, &c)| (c, std::cmp::Reverse(p)));
            if let Some((&to, &c)) = best {
                if c > stay {
                    assignment[v] = to;
                    *sizes.get_mut(&home).expect("home leaf") -= 1;
                    *sizes.get_mut(&to).expect("target leaf") += 1;
                    moves += 1;
                    changed = true;
                }
            }
        }
    }
    moves
}
