//! Model checkpoints.
//!
//! ```text
//! magic "MNC1", u32 version, u32 header length H
//! H bytes of JSON: { "spec": ModelSpec, "tensors": [len, ...], "extra": any }
//! f32 parameters in tensor order
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};
use crate::micronet::{Model, ModelSpec, Real};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"MNC1";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    spec: ModelSpec,
    tensors: Vec<usize>,
    #[serde(default)]
    extra: serde_json::Value,
}

/// Serialises the model with an arbitrary JSON payload (e.g. input normalisation).
pub fn encode_checkpoint<T: Real>(model: &Model<T>, extra: &serde_json::Value) -> Result<Vec<u8>> {
    let header = Header {
        spec: model.spec().clone(),
        tensors: model.parameters().iter().map(|p| p.len()).collect(),
        extra: extra.clone(),
    };
    let json = serde_json::to_vec(&header)?;
    let mut w = Writer::new();
    w.bytes(CHECKPOINT_MAGIC);
    w.u32(CHECKPOINT_VERSION);
    w.u32(u32::try_from(json.len()).map_err(|_| Error::Shape("checkpoint header too large".into()))?);
    w.bytes(&json);
    for p in model.parameters() {
        for &v in p {
            w.f32(v.to_f64() as f32);
        }
    }
    Ok(w.buf)
}

pub fn decode_checkpoint<T: Real>(data: &[u8]) -> Result<(Model<T>, serde_json::Value)> {
    let mut r = Reader::new(data);
    r.magic(CHECKPOINT_MAGIC)?;
    let version_at = r.offset();
    let version = r.u32("version")?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::format(version_at, format!("unsupported checkpoint version {version}")));
    }
    let len = r.u32("header length")? as usize;
    let header_at = r.offset();
    let header: Header = serde_json::from_slice(r.take(len, "header")?)
        .map_err(|e| Error::format(header_at, format!("bad checkpoint header: {e}")))?;
    let mut model = Model::<T>::new(&header.spec)?;
    let expected: Vec<usize> = model.parameters().iter().map(|p| p.len()).collect();
    if expected != header.tensors {
        return Err(Error::format(header_at, "tensor sizes do not match the model spec"));
    }
    let total: usize = expected.iter().sum();
    let values: Vec<T> = r
        .f32_vec(total, "parameters")?
        .into_iter()
        .map(|v| T::from_f64(v as f64))
        .collect();
    r.finish()?;
    model.set_parameters(&values)?;
    Ok((model, header.extra))
}

pub fn save_checkpoint<T: Real>(model: &Model<T>, extra: &serde_json::Value, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, encode_checkpoint(model, extra)?)?;
    Ok(())
}

pub fn load_checkpoint<T: Real>(path: impl AsRef<Path>) -> Result<(Model<T>, serde_json::Value)> {
    decode_checkpoint(&std::fs::read(path)?)
}
