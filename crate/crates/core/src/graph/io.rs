use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::codec;
use crate::error::{Error, Result};

use super::{Graph, Vertex};

const MAGIC: &[u8; 8] = b"SKPGRAPH";
const VERSION: u32 = 1;

/// A parsed edge list: the compacted graph plus the original id of every
/// compact vertex.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub ids: Vec<String>,
    pub skipped_self_loops: usize,
}

pub fn load_edge_list(path: &Path) -> Result<LoadedGraph> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(f))
}

/// Parses `u v [w]` lines (whitespace or comma separated, `#` comments).
/// Original ids are compacted to `0..n` in numeric order when every id is an
/// integer, lexicographic order otherwise.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut raw: Vec<(String, String, f64)> = Vec::new();
    let mut skipped_self_loops = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `u v [w]`, found {} fields", fields.len()),
            });
        }
        let w = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid weight `{s}`"),
            })?,
            None => 1.0,
        };
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::Validation(format!(
                "line {lineno}: weight must be positive and finite, found {w}"
            )));
        }
        if fields[0] == fields[1] {
            skipped_self_loops += 1;
            continue;
        }
        raw.push((fields[0].to_string(), fields[1].to_string(), w));
    }

    let mut ids: Vec<String> = raw.iter().flat_map(|(u, v, _)| [u.clone(), v.clone()]).collect();
    ids.sort();
    ids.dedup();
    let numeric: Option<Vec<u64>> = ids.iter().map(|s| s.parse::<u64>().ok()).collect();
    if let Some(nums) = numeric {
        let mut pairs: Vec<(u64, String)> = nums.into_iter().zip(ids).collect();
        pairs.sort();
        ids = pairs.into_iter().map(|(_, s)| s).collect();
    }
    let index: HashMap<&str, Vertex> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let edges: Vec<(Vertex, Vertex, f64)> = raw
        .iter()
        .map(|(u, v, w)| (index[u.as_str()], index[v.as_str()], *w))
        .collect();
    let graph = Graph::from_edges(ids.len(), &edges)?;
    Ok(LoadedGraph {
        graph,
        ids,
        skipped_self_loops,
    })
}

/// Writes the two-column `compact_id original_id` map.
pub fn save_id_map(path: &Path, ids: &[String]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    writeln!(w, "# compact_id original_id")?;
    for (i, id) in ids.iter().enumerate() {
        writeln!(w, "{i} {id}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_graph(path: &Path, g: &Graph) -> Result<()> {
    let mut enc = codec::create(path)?;
    enc.header(MAGIC, VERSION)?;
    enc.usize(g.vertex_count())?;
    enc.usize(g.edge_count())?;
    for (u, v, w) in g.edges() {
        enc.usize(u)?;
        enc.usize(v)?;
        enc.f64(w)?;
    }
    enc.finish()?;
    Ok(())
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    let mut dec = codec::open(path)?;
    dec.header(MAGIC, "graph", VERSION)?;
    let n = dec.usize()?;
    let m = dec.len(1 << 40)?;
    let mut edges = Vec::with_capacity(m.min(1 << 24));
    for _ in 0..m {
        edges.push((dec.usize()?, dec.usize()?, dec.f64()?));
    }
    dec.expect_end()?;
    Graph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_line_file() {
        let g = parse_edge_list("0 1 5\n1 2 3\n".as_bytes()).unwrap().graph;
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_weight(1, 2), Some(3.0));
    }

    #[test]
    fn reversed_duplicate_keeps_min() {
        let g = parse_edge_list("0 1 5\n1 0 4\n".as_bytes()).unwrap().graph;
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(4.0));
    }

    #[test]
    fn comments_default_weight_and_compaction() {
        let text = "# header\n10 30\n30,20,2.5\n\n";
        let loaded = parse_edge_list(text.as_bytes()).unwrap();
        assert_eq!(loaded.ids, vec!["10", "20", "30"]);
        assert_eq!(loaded.graph.edge_weight(0, 2), Some(1.0));
        assert_eq!(loaded.graph.edge_weight(1, 2), Some(2.5));
    }

    #[test]
    fn numeric_ids_sort_numerically() {
        let loaded = parse_edge_list("9 10\n".as_bytes()).unwrap();
        assert_eq!(loaded.ids, vec!["9", "10"]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse_edge_list("0 1 1\n0 1 2 3\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list("0 1 x\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_positive_weight_is_validation_error() {
        assert!(matches!(
            parse_edge_list("0 1 0\n".as_bytes()),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_edge_list("0 1 -1\n".as_bytes()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn self_loops_are_skipped() {
        let loaded = parse_edge_list("0 0 1\n0 1 1\n".as_bytes()).unwrap();
        assert_eq!(loaded.skipped_self_loops, 1);
        assert_eq!(loaded.graph.edge_count(), 1);
    }

    #[test]
    fn binary_round_trip() {
        let g = Graph::from_edges(4, &[(0, 1, 1.5), (2, 3, 0.25), (1, 3, 7.0)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.bin");
        save_graph(&p, &g).unwrap();
        assert_eq!(load_graph(&p).unwrap(), g);
        std::fs::write(&p, b"garbage!\x01\0\0\0").unwrap();
        assert!(matches!(load_graph(&p), Err(Error::Format(_))));
    }
}
