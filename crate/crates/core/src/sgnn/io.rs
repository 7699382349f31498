use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::codec::{self, Decoder, Encoder};
use crate::error::{Error, Result};
use crate::skeleton::SkeletonConfig;

use super::features::Normalizer;
use super::model::{Architecture, ErrorBuffers, SgnnModel};

const MAGIC: &[u8; 8] = b"SKPMODEL";
const VERSION: u32 = 1;

pub fn save_model(path: &Path, model: &SgnnModel) -> Result<()> {
    let mut enc = codec::create(path)?;
    write_model(&mut enc, model)?;
    enc.finish()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<SgnnModel> {
    let mut dec = codec::open(path)?;
    let model = read_model(&mut dec)?;
    dec.expect_end()?;
    Ok(model)
}

/// Writes a self-contained model record, header included. Used on its own
/// and embedded inside hierarchical index files.
pub fn write_model<W: Write>(enc: &mut Encoder<W>, model: &SgnnModel) -> Result<()> {
    enc.header(MAGIC, VERSION)?;
    enc.usize(model.skeleton.base)?;
    enc.usize(model.skeleton.max_tier)?;
    enc.usize(model.arch.feature_dim)?;
    enc.usize(model.arch.embedding_dim)?;
    enc.usize(model.arch.layers)?;
    enc.usize_slice(&model.arch.head_hidden)?;
    enc.f64(model.gamma)?;
    enc.f64(model.error_buffers.distance)?;
    enc.f64(model.error_buffers.hop)?;
    enc.f64(model.dist_scale)?;
    enc.f64(model.hop_scale)?;
    enc.f64_slice(&model.normalizer.mean)?;
    enc.f64_slice(&model.normalizer.std)?;
    enc.f64_slice(&model.params)?;
    match model.embeddings() {
        Some(emb) => {
            enc.u8(1)?;
            enc.usize(emb.nrows())?;
            enc.f64_slice(emb.as_standard_layout().as_slice().expect("standard layout"))?;
        }
        None => enc.u8(0)?,
    }
    Ok(())
}

pub fn read_model<R: Read>(dec: &mut Decoder<R>) -> Result<SgnnModel> {
    dec.header(MAGIC, "model", VERSION)?;
    let skeleton = SkeletonConfig {
        base: dec.usize()?,
        max_tier: dec.usize()?,
    };
    skeleton.validate()?;
    let arch = Architecture {
        feature_dim: dec.usize()?,
        embedding_dim: dec.usize()?,
        layers: dec.usize()?,
        head_hidden: dec.usize_vec()?,
    };
    if arch.layers != skeleton.tier_count() || arch.feature_dim != 2 + 4 * skeleton.bucket_count() {
        return Err(Error::Format("model shape disagrees with its skeleton config".into()));
    }
    let gamma = dec.f64()?;
    let error_buffers = ErrorBuffers {
        distance: dec.f64()?,
        hop: dec.f64()?,
    };
    let dist_scale = dec.f64()?;
    let hop_scale = dec.f64()?;
    let normalizer = Normalizer {
        mean: dec.f64_vec()?,
        std: dec.f64_vec()?,
    };
    if normalizer.mean.len() != arch.feature_dim || normalizer.std.len() != arch.feature_dim {
        return Err(Error::Format("normalizer width mismatch".into()));
    }
    let params = dec.f64_vec()?;
    if params.len() != arch.param_count() {
        return Err(Error::Format(format!(
            "expected {} parameters, found {}",
            arch.param_count(),
            params.len()
        )));
    }
    let mut model = SgnnModel::new(arch, skeleton, normalizer, gamma, 0);
    model.params = params;
    model.error_buffers = error_buffers;
    model.dist_scale = dist_scale;
    model.hop_scale = hop_scale;
    match dec.u8()? {
        0 => {}
        1 => {
            let rows = dec.usize()?;
            let data = dec.f64_vec()?;
            let d = model.arch.embedding_dim;
            if data.len() != rows * d {
                return Err(Error::Format("embedding matrix size mismatch".into()));
            }
            let emb = Array2::from_shape_vec((rows, d), data).map_err(|e| Error::Format(e.to_string()))?;
            model.set_embeddings(emb);
        }
        flag => return Err(Error::Format(format!("bad embedding flag {flag}"))),
    }
    Ok(model)
}
