use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{dijkstra, Graph, Vertex};
use crate::search::OracleModel;
use crate::sgnn::{train, TrainingConfig};
use crate::skeleton::{build_labels, SkeletonConfig};

use super::{DistPathMatrix, HierIndex, HierNode, IndexConfig, Leaf, LeafModel, LeafModelKind, Partitioning, Payload};

/// Vertices of `members` with at least one neighbor outside it.
fn access_vertices(g: &Graph, owner: &[usize], id: usize, members: &[Vertex]) -> Vec<Vertex> {
    members
        .iter()
        .copied()
        .filter(|&v| g.neighbors(v).iter().any(|&(u, _)| owner[u] != id))
        .collect()
}

pub(crate) fn leaf_model(
    sub: &Graph,
    kind: &LeafModelKind,
    skeleton: Option<SkeletonConfig>,
    leaf_id: usize,
) -> Result<LeafModel> {
    Ok(match kind {
        LeafModelKind::None => LeafModel::None,
        LeafModelKind::Oracle => LeafModel::Oracle(OracleModel::new(sub)),
        LeafModelKind::Sgnn(cfg) => {
            let labels = build_labels(sub, skeleton.unwrap_or_else(|| SkeletonConfig::for_graph(sub)));
            let cfg = TrainingConfig {
                seed: cfg.seed.wrapping_add(leaf_id as u64),
                ..cfg.clone()
            };
            let (model, report) =
                train(sub, &labels, &cfg).map_err(|e| Error::Config(format!("leaf {leaf_id}: {e}")))?;
            log::info!(
                "leaf {leaf_id}: {} vertices, test MAPE_d {:.2}% MAPE_h {:.2}%",
                sub.vertex_count(),
                report.test.mape_distance,
                report.test.mape_hop
            );
            LeafModel::Sgnn(Box::new(model))
        }
    })
}

fn build_leaf(g: &Graph, p: &Partitioning, id: usize, cfg: &IndexConfig) -> Result<(Vec<Vertex>, Leaf)> {
    let vertices = p.leaves[id].clone();
    let access = access_vertices(g, &p.assignment, id, &vertices);
    let subgraph = g.induced(&vertices);
    let columns: Vec<Vec<f64>> = access
        .iter()
        .map(|&a| dijkstra(&subgraph.graph, subgraph.to_local(a).expect("access vertex in leaf")).dist)
        .collect();
    let mut dist = vec![f64::INFINITY; vertices.len() * access.len()];
    for (k, col) in columns.iter().enumerate() {
        for (local, &d) in col.iter().enumerate() {
            dist[local * access.len() + k] = d;
        }
    }
    let model = leaf_model(&subgraph.graph, &cfg.leaf_models, cfg.skeleton, id)?;
    Ok((
        access,
        Leaf {
            vertices,
            dist,
            model,
            subgraph,
        },
    ))
}

fn build_matrix(g: &Graph, sources: Vec<Vertex>, territory: Vec<Vertex>) -> DistPathMatrix {
    let sub = g.induced(&territory);
    let rows: Vec<(Vec<f64>, Vec<u32>)> = sources
        .par_iter()
        .map(|&a| {
            let tree = dijkstra(&sub.graph, sub.to_local(a).expect("source inside territory"));
            let dist = sources
                .iter()
                .map(|&b| tree.dist[sub.to_local(b).expect("source inside territory")])
                .collect();
            let prev = tree.prev.iter().map(|p| p.map_or(u32::MAX, |x| x as u32)).collect();
            (dist, prev)
        })
        .collect();
    let mut dist = Vec::with_capacity(sources.len() * sources.len());
    let mut prev = Vec::with_capacity(sources.len() * territory.len());
    for (d, p) in rows {
        dist.extend(d);
        prev.extend(p);
    }
    DistPathMatrix {
        sources,
        territory: sub.global.clone(),
        dist,
        prev,
    }
}

/// Groups the nodes of one level. At most `2 * fanout - 1` nodes become a
/// single group. Otherwise groups are grown greedily from the lowest free
/// node by adding the free node sharing the most cross edges with the group,
/// up to `fanout` members; an undersized last group joins the group it
/// shares most edges with.
fn group_level(shared: &BTreeMap<(usize, usize), usize>, count: usize, fanout: usize) -> Vec<Vec<usize>> {
    if count < 2 * fanout {
        return vec![(0..count).collect()];
    }
    let link = |a: usize, b: usize| shared.get(&(a.min(b), a.max(b))).copied().unwrap_or(0);
    let mut free: BTreeSet<usize> = (0..count).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    while let Some(seed) = free.pop_first() {
        let mut group = vec![seed];
        while group.len() < fanout && !free.is_empty() {
            let next = *free
                .iter()
                .max_by_key(|&&u| (group.iter().map(|&m| link(m, u)).sum::<usize>(), std::cmp::Reverse(u)))
                .expect("free is non-empty");
            free.remove(&next);
            group.push(next);
        }
        groups.push(group);
    }
    if groups.len() > 1 && groups.last().is_some_and(|g| g.len() < fanout) {
        let last = groups.pop().expect("checked");
        let target = (0..groups.len())
            .max_by_key(|&i| {
                let s: usize = groups[i]
                    .iter()
                    .flat_map(|&a| last.iter().map(move |&b| (a, b)))
                    .map(|(a, b)| link(a, b))
                    .sum();
                (s, std::cmp::Reverse(i))
            })
            .expect("another group exists");
        groups[target].extend(last);
        groups[target].sort_unstable();
    }
    groups
}

/// Builds leaves for every partition, then groups them level by level into
/// inner nodes until one root remains.
pub fn build_index(g: &Graph, p: &Partitioning, cfg: &IndexConfig) -> Result<HierIndex> {
    if cfg.fanout < 2 {
        return Err(Error::Config(format!("fanout must be at least 2, got {}", cfg.fanout)));
    }
    let n = g.vertex_count();
    if p.assignment.len() != n || p.leaves.iter().map(Vec::len).sum::<usize>() != n {
        return Err(Error::Validation("partitioning does not cover the graph".into()));
    }
    let built: Vec<(Vec<Vertex>, Leaf)> = (0..p.leaf_count())
        .into_par_iter()
        .map(|id| build_leaf(g, p, id, cfg))
        .collect::<Result<_>>()?;
    let mut nodes: Vec<HierNode> = built
        .into_iter()
        .enumerate()
        .map(|(id, (access, leaf))| HierNode {
            id,
            parent: None,
            children: Vec::new(),
            depth: 0,
            access,
            payload: Payload::Leaf(leaf),
        })
        .collect();

    let mut level: Vec<usize> = (0..nodes.len()).collect();
    let mut members: Vec<Vec<Vertex>> = p.leaves.clone();
    let mut owner: Vec<usize> = p.assignment.clone();
    while level.len() > 1 {
        let mut shared = BTreeMap::new();
        for (a, b, _) in g.edges() {
            let (x, y) = (owner[a], owner[b]);
            if x != y {
                *shared.entry((x.min(y), x.max(y))).or_insert(0) += 1;
            }
        }
        let groups = group_level(&shared, level.len(), cfg.fanout);
        let mut next_owner = vec![0; n];
        let mut next_members = Vec::with_capacity(groups.len());
        for (gi, group) in groups.iter().enumerate() {
            let mut verts: Vec<Vertex> = group.iter().flat_map(|&i| members[i].iter().copied()).collect();
            verts.sort_unstable();
            for &v in &verts {
                next_owner[v] = gi;
            }
            next_members.push(verts);
        }
        let mut next_level = Vec::with_capacity(groups.len());
        for (gi, group) in groups.iter().enumerate() {
            let id = nodes.len();
            let children: Vec<usize> = group.iter().map(|&i| level[i]).collect();
            let mut sources: Vec<Vertex> = children.iter().flat_map(|&c| nodes[c].access.iter().copied()).collect();
            sources.sort_unstable();
            sources.dedup();
            let territory = match cfg.territory {
                super::Territory::Restricted => next_members[gi].clone(),
                super::Territory::Full => (0..n).collect(),
            };
            let matrix = build_matrix(g, sources, territory);
            let access = access_vertices(g, &next_owner, gi, &next_members[gi]);
            for &c in &children {
                nodes[c].parent = Some(id);
            }
            nodes.push(HierNode {
                id,
                parent: None,
                children,
                depth: 0,
                access,
                payload: Payload::Inner(matrix),
            });
            next_level.push(id);
        }
        level = next_level;
        members = next_members;
        owner = next_owner;
    }
    let root = level[0];
    let mut stack = vec![(root, 0)];
    while let Some((id, depth)) = stack.pop() {
        nodes[id].depth = depth;
        for &c in &nodes[id].children {
            stack.push((c, depth + 1));
        }
    }
    Ok(HierIndex {
        nodes,
        leaf_of: p.assignment.clone(),
        root,
        territory: cfg.territory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels_become_one_group() {
        assert_eq!(group_level(&BTreeMap::new(), 9, 5), vec![(0..9).collect::<Vec<_>>()]);
    }

    #[test]
    fn groups_respect_fanout_floor() {
        let mut shared = BTreeMap::new();
        for i in 0..22 {
            shared.insert((i, i + 1), 1);
        }
        let groups = group_level(&shared, 23, 5);
        assert!(groups.iter().all(|g| g.len() >= 5));
        let mut all: Vec<usize> = groups.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        assert_eq!(groups[0], vec![0, 1, 2, 3, 4]);
    }
}
