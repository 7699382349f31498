use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Vertex;

/// Queue entry ordered so that `BinaryHeap` pops the smallest key first,
/// ties broken by smaller vertex id. `dist` is the vertex's tentative
/// distance at push time and is used for lazy deletion.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry {
    pub key: f64,
    pub vertex: Vertex,
    pub dist: f64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.vertex.cmp(&self.vertex))
            .then_with(|| other.dist.total_cmp(&self.dist))
    }
}

#[derive(Debug, Default)]
pub(crate) struct MinQueue {
    heap: BinaryHeap<Entry>,
    peak: usize,
}

impl MinQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: f64, vertex: Vertex, dist: f64) {
        self.heap.push(Entry { key, vertex, dist });
        self.peak = self.peak.max(self.heap.len());
    }

    pub fn pop(&mut self) -> Option<Entry> {
        self.heap.pop()
    }

    pub fn peak(&self) -> usize {
        self.peak
    }

    pub const ENTRY_BYTES: usize = std::mem::size_of::<Entry>();
}
