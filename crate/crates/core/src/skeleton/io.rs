use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::codec;
use crate::error::{Error, Result};

use super::{LabelEntry, SkeletonConfig, SkeletonLabel, SkeletonLabels};

const MAGIC: &[u8; 8] = b"SKPLABEL";
const VERSION: u32 = 1;

pub fn save_labels(path: &Path, labels: &SkeletonLabels) -> Result<()> {
    let mut enc = codec::create(path)?;
    enc.header(MAGIC, VERSION)?;
    enc.usize(labels.config.base)?;
    enc.usize(labels.config.max_tier)?;
    enc.usize(labels.vertex_count())?;
    for label in &labels.labels {
        enc.usize(label.owner)?;
        for bucket in &label.buckets {
            enc.usize(bucket.len())?;
            for e in bucket {
                enc.usize(e.vertex)?;
                enc.usize(e.linked)?;
                enc.f64(e.dist)?;
            }
        }
    }
    enc.finish()?;
    Ok(())
}

pub fn load_labels(path: &Path) -> Result<SkeletonLabels> {
    let mut dec = codec::open(path)?;
    dec.header(MAGIC, "label", VERSION)?;
    let config = SkeletonConfig {
        base: dec.usize()?,
        max_tier: dec.usize()?,
    };
    config.validate()?;
    let n = dec.len(1 << 32)?;
    let mut labels = Vec::with_capacity(n);
    for expected in 0..n {
        let owner = dec.usize()?;
        if owner != expected {
            return Err(Error::Format(format!("label {expected} has owner {owner}")));
        }
        let mut buckets = Vec::with_capacity(config.bucket_count());
        for _ in 0..config.bucket_count() {
            let len = dec.len(n)?;
            let mut bucket = Vec::with_capacity(len);
            for _ in 0..len {
                let vertex = dec.usize()?;
                let linked = dec.usize()?;
                let dist = dec.f64()?;
                if vertex >= n || linked >= n {
                    return Err(Error::Format(format!("label entry {vertex} out of range")));
                }
                bucket.push(LabelEntry { vertex, linked, dist });
            }
            buckets.push(bucket);
        }
        labels.push(SkeletonLabel { owner, buckets });
    }
    dec.expect_end()?;
    Ok(SkeletonLabels { config, labels })
}

/// Human-readable dump: one line per non-empty bucket,
/// `owner tier k hop: vertex<-linked@dist ...`.
pub fn write_labels_text(path: &Path, labels: &SkeletonLabels) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    let cfg = &labels.config;
    writeln!(w, "# base {} max_tier {}", cfg.base, cfg.max_tier)?;
    for label in &labels.labels {
        for (index, bucket) in label.buckets.iter().enumerate() {
            if bucket.is_empty() {
                continue;
            }
            let (tier, k) = cfg.bucket_of(index);
            write!(w, "{} {} {} {}:", label.owner, tier, k, cfg.bucket_hop(index))?;
            for e in bucket {
                write!(w, " {}<-{}@{}", e.vertex, e.linked, e.dist)?;
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
