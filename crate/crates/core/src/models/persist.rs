//! Binary model files: an 8-byte magic, a little-endian `u16` format
//! version, a one-byte kind tag, then the bincode-encoded model.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::ModelError;

pub const MAGIC: &[u8; 8] = b"PRESTI\0M";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ArtifactKind {
    Effort = 1,
    Satd = 2,
}

impl ArtifactKind {
    fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(Self::Effort),
            2 => Some(Self::Satd),
            _ => None,
        }
    }
}

const HEADER_LEN: usize = MAGIC.len() + 2 + 1;

pub fn encode<T: Serialize>(kind: ArtifactKind, value: &T) -> Result<Vec<u8>, ModelError> {
    let mut out = Vec::with_capacity(HEADER_LEN + 1024);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(kind as u8);
    bincode::serialize_into(&mut out, value).map_err(|e| ModelError::Persist(e.to_string()))?;
    Ok(out)
}

pub fn decode<T: DeserializeOwned>(kind: ArtifactKind, bytes: &[u8]) -> Result<T, ModelError> {
    if bytes.len() < HEADER_LEN || &bytes[..MAGIC.len()] != MAGIC {
        return Err(ModelError::Persist("not a model file".into()));
    }
    let version = u16::from_le_bytes([bytes[8], bytes[9]]);
    if version != FORMAT_VERSION {
        return Err(ModelError::Persist(format!(
            "unsupported format version {version} (expected {FORMAT_VERSION})"
        )));
    }
    match ArtifactKind::from_tag(bytes[10]) {
        Some(k) if k == kind => {}
        Some(k) => {
            return Err(ModelError::Persist(format!(
                "expected a {kind:?} model, found {k:?}"
            )))
        }
        None => {
            return Err(ModelError::Persist(format!(
                "unknown model kind {}",
                bytes[10]
            )))
        }
    }
    bincode::deserialize(&bytes[HEADER_LEN..]).map_err(|e| ModelError::Persist(e.to_string()))
}

pub fn save<T: Serialize>(path: &Path, kind: ArtifactKind, value: &T) -> Result<(), ModelError> {
    let bytes = encode(kind, value)?;
    let io = |e: std::io::Error| ModelError::Persist(format!("{}: {e}", path.display()));
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(&bytes).map_err(io)
}

pub fn load<T: DeserializeOwned>(path: &Path, kind: ArtifactKind) -> Result<T, ModelError> {
    let bytes =
        fs::read(path).map_err(|e| ModelError::Persist(format!("{}: {e}", path.display())))?;
    decode(kind, &bytes)
}
