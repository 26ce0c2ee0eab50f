//! IDX tensors, the container format of the MNIST distribution.
//!
//! Layout: a 4-byte big-endian magic `0x000008NN` (unsigned-byte payload,
//! `NN` dimensions), one 4-byte big-endian size per dimension, then the raw
//! bytes in row-major order. Only the 3-D image (`0x00000803`) and 1-D label
//! (`0x00000801`) layouts are accepted. Files ending in `.gz` are
//! decompressed on the fly.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, thiserror::Error)]
pub enum IdxError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("unknown IDX magic 0x{0:08x}")]
    UnknownMagic(u32),
    #[error("truncated IDX header: need {expected} bytes, found {actual}")]
    TruncatedHeader { expected: usize, actual: usize },
    #[error("zero-length IDX dimension {0}")]
    ZeroDimension(usize),
    #[error("truncated IDX payload: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("trailing data after IDX payload: expected {expected} bytes, found {actual}")]
    TrailingData { expected: usize, actual: usize },
}

/// A parsed IDX tensor of unsigned bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxTensor {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

impl IdxTensor {
    /// Number of items along the first axis.
    pub fn len(&self) -> usize {
        self.dims.first().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bytes per item (product of the trailing dimensions).
    pub fn item_size(&self) -> usize {
        self.dims[1..].iter().product()
    }

    pub fn item(&self, i: usize) -> &[u8] {
        let n = self.item_size();
        &self.data[i * n..(i + 1) * n]
    }

    /// Serialises back to the IDX byte layout.
    pub fn to_bytes(&self) -> Vec<u8> {
        let magic = 0x0000_0800u32 | self.dims.len() as u32;
        let mut out = Vec::with_capacity(4 + 4 * self.dims.len() + self.data.len());
        out.extend_from_slice(&magic.to_be_bytes());
        for &d in &self.dims {
            out.extend_from_slice(&(d as u32).to_be_bytes());
        }
        out.extend_from_slice(&self.data);
        out
    }
}

/// Parses an in-memory IDX file. Fails closed: nothing is returned unless
/// the header and payload sizes agree exactly.
pub fn parse_idx(bytes: &[u8]) -> Result<IdxTensor, IdxError> {
    let word = |i: usize| u32::from_be_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    if bytes.len() < 4 {
        return Err(IdxError::TruncatedHeader {
            expected: 4,
            actual: bytes.len(),
        });
    }
    let magic = word(0);
    let ndims = match magic {
        IMAGES_MAGIC => 3,
        LABELS_MAGIC => 1,
        other => return Err(IdxError::UnknownMagic(other)),
    };
    let header = 4 + 4 * ndims;
    if bytes.len() < header {
        return Err(IdxError::TruncatedHeader {
            expected: header,
            actual: bytes.len(),
        });
    }
    let dims: Vec<usize> = (0..ndims).map(|k| word(4 + 4 * k) as usize).collect();
    if let Some(k) = dims.iter().position(|&d| d == 0) {
        return Err(IdxError::ZeroDimension(k));
    }
    let expected: usize = dims.iter().product();
    let actual = bytes.len() - header;
    if actual < expected {
        return Err(IdxError::TruncatedPayload { expected, actual });
    }
    if actual > expected {
        return Err(IdxError::TrailingData { expected, actual });
    }
    Ok(IdxTensor {
        dims,
        data: bytes[header..].to_vec(),
    })
}

/// Reads and parses an IDX file, gunzipping when the name ends in `.gz`.
pub fn load_idx(path: impl AsRef<Path>) -> Result<IdxTensor, IdxError> {
    let path = path.as_ref();
    let io = |source| IdxError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::open(path).map_err(io)?;
    let mut bytes = Vec::new();
    let gz = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    if gz {
        GzDecoder::new(file).read_to_end(&mut bytes).map_err(io)?;
    } else {
        let mut file = file;
        file.read_to_end(&mut bytes).map_err(io)?;
    }
    parse_idx(&bytes)
}
