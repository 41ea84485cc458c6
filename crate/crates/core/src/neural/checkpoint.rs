//! Binary checkpoint files.
//!
//! Layout: 8 magic bytes, a little-endian `u32` format version, a `u64`
//! metadata length, JSON metadata (configuration, vocabulary, epoch, exam
//! history, convergence flag and the tensor layout), the tensors as little-endian `f64` in
//! layout order, and a SHA-256 digest of everything before it.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::model::{GenModel, GenParams, ModelConfig};
use super::Vocabulary;
use crate::exam::ExamRecord;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"LGIGENCK";
const DIGEST_LEN: usize = 32;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a checkpoint file")]
    BadMagic,
    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("checkpoint is corrupt: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: GenModel,
    pub epoch: usize,
    pub exam_history: Vec<ExamRecord>,
    /// Whether training stopped on a full passing streak.
    pub converged: bool,
    pub format_version: u32,
}

impl Checkpoint {
    pub fn new(model: GenModel, epoch: usize, exam_history: Vec<ExamRecord>) -> Self {
        Checkpoint { model, epoch, exam_history, converged: false, format_version: FORMAT_VERSION }
    }

    pub fn with_converged(mut self, converged: bool) -> Self {
        self.converged = converged;
        self
    }
}

#[derive(Serialize, Deserialize)]
struct Metadata {
    config: ModelConfig,
    vocabulary: Vocabulary,
    epoch: usize,
    exam_history: Vec<ExamRecord>,
    converged: bool,
    tensors: Vec<(String, Vec<usize>)>,
}

pub fn to_bytes(ck: &Checkpoint) -> Vec<u8> {
    let params = &ck.model.params;
    let meta = Metadata {
        config: ck.model.config,
        vocabulary: ck.model.vocab.clone(),
        epoch: ck.epoch,
        exam_history: ck.exam_history.clone(),
        converged: ck.converged,
        tensors: params.layout(),
    };
    let meta = serde_json::to_vec(&meta).expect("metadata serializes");
    let mut out = Vec::with_capacity(20 + meta.len() + 8 * params.parameter_count() + DIGEST_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&ck.format_version.to_le_bytes());
    out.extend_from_slice(&(meta.len() as u64).to_le_bytes());
    out.extend_from_slice(&meta);
    for t in params.tensors() {
        for v in t {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest[..]);
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<Checkpoint, CheckpointError> {
    let corrupt = |m: &str| CheckpointError::Corrupt(m.to_string());
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(if bytes.len() < MAGIC.len() { corrupt("truncated header") } else { CheckpointError::BadMagic });
    }
    let version = bytes.get(8..12).ok_or_else(|| corrupt("truncated header"))?;
    let found = u32::from_le_bytes(version.try_into().unwrap());
    if found != FORMAT_VERSION {
        return Err(CheckpointError::Version { found, expected: FORMAT_VERSION });
    }
    if bytes.len() < 20 + DIGEST_LEN {
        return Err(corrupt("truncated header"));
    }
    let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
    if Sha256::digest(body)[..] != *digest {
        return Err(corrupt("checksum mismatch"));
    }
    let meta_len = u64::from_le_bytes(body[12..20].try_into().unwrap()) as usize;
    let meta_end = 20usize.checked_add(meta_len).filter(|&e| e <= body.len()).ok_or_else(|| corrupt("metadata length"))?;
    let meta: Metadata = serde_json::from_slice(&body[20..meta_end]).map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
    let mut params = GenParams::zeros(&meta.config, meta.vocabulary.len());
    if params.layout() != meta.tensors {
        return Err(corrupt("tensor layout does not match configuration"));
    }
    let mut data = body[meta_end..].chunks_exact(8);
    if data.len() != params.parameter_count() || !data.remainder().is_empty() {
        return Err(corrupt("tensor data length"));
    }
    for t in params.tensors_mut() {
        for (v, chunk) in t.iter_mut().zip(&mut data) {
            *v = f64::from_le_bytes(chunk.try_into().unwrap());
        }
    }
    Ok(Checkpoint {
        model: GenModel { config: meta.config, vocab: meta.vocabulary, params },
        epoch: meta.epoch,
        exam_history: meta.exam_history,
        converged: meta.converged,
        format_version: found,
    })
}

pub fn save_checkpoint(path: impl AsRef<Path>, ck: &Checkpoint) -> Result<(), CheckpointError> {
    Ok(fs::write(path, to_bytes(ck))?)
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint, CheckpointError> {
    from_bytes(&fs::read(path)?)
}
