use std::path::Path;

use crate::codec;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::search::OracleModel;
use crate::sgnn::{read_model, write_model};

use super::{DistPathMatrix, HierIndex, HierNode, Leaf, LeafModel, Payload, Territory};

const MAGIC: &[u8; 8] = b"SKHINDEX";
const VERSION: u32 = 1;
const NONE: u64 = u64::MAX;

pub fn save_index(path: &Path, idx: &HierIndex) -> Result<()> {
    let mut enc = codec::create(path)?;
    enc.header(MAGIC, VERSION)?;
    enc.u8(match idx.territory {
        Territory::Restricted => 0,
        Territory::Full => 1,
    })?;
    enc.usize_slice(&idx.leaf_of)?;
    enc.usize(idx.root)?;
    enc.usize(idx.nodes.len())?;
    for node in &idx.nodes {
        enc.u64(node.parent.map_or(NONE, |p| p as u64))?;
        enc.usize(node.depth)?;
        enc.usize_slice(&node.children)?;
        enc.usize_slice(&node.access)?;
        match &node.payload {
            Payload::Leaf(leaf) => {
                enc.u8(0)?;
                enc.usize_slice(&leaf.vertices)?;
                enc.f64_slice(&leaf.dist)?;
                match &leaf.model {
                    LeafModel::None => enc.u8(0)?,
                    LeafModel::Oracle(_) => enc.u8(1)?,
                    LeafModel::Sgnn(m) => {
                        enc.u8(2)?;
                        write_model(&mut enc, m)?;
                    }
                }
            }
            Payload::Inner(m) => {
                enc.u8(1)?;
                enc.usize_slice(&m.sources)?;
                enc.usize_slice(&m.territory)?;
                enc.f64_slice(&m.dist)?;
                enc.u32_slice(&m.prev)?;
            }
        }
    }
    enc.finish()?;
    Ok(())
}

/// Loads an index built on `g`. Leaf subgraphs and oracle leaf models are
/// rebuilt from the graph.
pub fn load_index(path: &Path, g: &Graph) -> Result<HierIndex> {
    let mut dec = codec::open(path)?;
    dec.header(MAGIC, "index", VERSION)?;
    let territory = match dec.u8()? {
        0 => Territory::Restricted,
        1 => Territory::Full,
        t => return Err(Error::Format(format!("unknown territory tag {t}"))),
    };
    let leaf_of = dec.usize_vec()?;
    if leaf_of.len() != g.vertex_count() {
        return Err(Error::Validation(format!(
            "index covers {} vertices, graph has {}",
            leaf_of.len(),
            g.vertex_count()
        )));
    }
    let root = dec.usize()?;
    let count = dec.len(1 << 32)?;
    let n = g.vertex_count();
    let check = |vs: &[usize]| -> Result<()> {
        match vs.iter().find(|&&v| v >= n) {
            Some(v) => Err(Error::Format(format!("vertex {v} out of range"))),
            None => Ok(()),
        }
    };
    let mut nodes = Vec::with_capacity(count);
    for id in 0..count {
        let parent = match dec.u64()? {
            NONE => None,
            p => Some(p as usize),
        };
        let depth = dec.usize()?;
        let children = dec.usize_vec()?;
        let access = dec.usize_vec()?;
        check(&access)?;
        let payload = match dec.u8()? {
            0 => {
                let vertices = dec.usize_vec()?;
                check(&vertices)?;
                let dist = dec.f64_vec()?;
                if dist.len() != vertices.len() * access.len() {
                    return Err(Error::Format(format!("leaf {id} matrix size mismatch")));
                }
                let subgraph = g.induced(&vertices);
                let model = match dec.u8()? {
                    0 => LeafModel::None,
                    1 => LeafModel::Oracle(OracleModel::new(&subgraph.graph)),
                    2 => LeafModel::Sgnn(Box::new(read_model(&mut dec)?)),
                    t => return Err(Error::Format(format!("unknown leaf model tag {t}"))),
                };
                Payload::Leaf(Leaf {
                    vertices,
                    dist,
                    model,
                    subgraph,
                })
            }
            1 => {
                let sources = dec.usize_vec()?;
                let territory = dec.usize_vec()?;
                check(&sources)?;
                check(&territory)?;
                let dist = dec.f64_vec()?;
                let prev = dec.u32_vec()?;
                if dist.len() != sources.len() * sources.len() || prev.len() != sources.len() * territory.len() {
                    return Err(Error::Format(format!("node {id} matrix size mismatch")));
                }
                Payload::Inner(DistPathMatrix {
                    sources,
                    territory,
                    dist,
                    prev,
                })
            }
            t => return Err(Error::Format(format!("unknown node tag {t}"))),
        };
        nodes.push(HierNode {
            id,
            parent,
            children,
            depth,
            access,
            payload,
        });
    }
    dec.expect_end()?;
    if root >= nodes.len() || leaf_of.iter().any(|&l| l >= nodes.len() || nodes[l].leaf().is_none()) {
        return Err(Error::Format("index tree references missing nodes".into()));
    }
    Ok(HierIndex {
        nodes,
        leaf_of,
        root,
        territory,
    })
}
