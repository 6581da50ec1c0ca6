//! Middlebury `.flo` reader and writer.
//!
//! Layout (little-endian): float32 magic `202021.25`, int32 width, int32
//! height, then row-major float32 payload. Two-channel files interleave
//! `(u, v)`; the single-channel variant stores one float32 per pixel and is
//! used for confidence rasters.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::{FlowField, ScalarMap};

pub const FLO_MAGIC: f32 = 202021.25;
pub const FLO_HEADER_LEN: usize = 12;

/// Parsed header: `(width, height)`.
fn parse_header(bytes: &[u8]) -> Result<(usize, usize)> {
    if bytes.len() < FLO_HEADER_LEN {
        return Err(Error::Truncated {
            expected: FLO_HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let magic = f32::from_le_bytes(bytes[0..4].try_into().unwrap());
    if magic != FLO_MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    let width = i32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let height = i32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if width <= 0 || height <= 0 {
        return Err(Error::InvalidDimensions {
            width: width as i64,
            height: height as i64,
        });
    }
    Ok((width as usize, height as usize))
}

fn payload(bytes: &[u8], count: usize) -> Result<Vec<f32>> {
    let expected = FLO_HEADER_LEN + 4 * count;
    if bytes.len() < expected {
        return Err(Error::Truncated {
            expected,
            actual: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::TrailingBytes {
            expected,
            actual: bytes.len(),
        });
    }
    Ok(bytes[FLO_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn header(width: usize, height: usize, payload_floats: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(FLO_HEADER_LEN + 4 * payload_floats);
    out.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    out.extend_from_slice(&(width as i32).to_le_bytes());
    out.extend_from_slice(&(height as i32).to_le_bytes());
    out
}

/// Decodes a two-channel flow file from memory.
pub fn decode_flo(bytes: &[u8]) -> Result<FlowField> {
    let (width, height) = parse_header(bytes)?;
    let data = payload(bytes, 2 * width * height)?;
    FlowField::from_vec(width, height, data)
}

/// Encodes a flow field into the Middlebury byte layout.
pub fn encode_flo(flow: &FlowField) -> Vec<u8> {
    let mut out = header(flow.width(), flow.height(), flow.data().len());
    for v in flow.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_flo(path: impl AsRef<Path>) -> Result<FlowField> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_flo(&bytes)
}

pub fn write_flo(flow: &FlowField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_flo(flow)).map_err(|e| Error::io(path, e))
}

/// Decodes the single-channel float variant.
pub fn decode_scalar_flo(bytes: &[u8]) -> Result<ScalarMap> {
    let (width, height) = parse_header(bytes)?;
    let data = payload(bytes, width * height)?;
    ScalarMap::new(width, height, data.into_iter().map(f64::from).collect())
}

/// Encodes a scalar map as single-channel float32; values are narrowed to `f32`.
pub fn encode_scalar_flo(map: &ScalarMap) -> Vec<u8> {
    let mut out = header(map.width(), map.height(), map.data().len());
    for &v in map.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn read_scalar_flo(path: impl AsRef<Path>) -> Result<ScalarMap> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_scalar_flo(&bytes)
}

pub fn write_scalar_flo(map: &ScalarMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_scalar_flo(map)).map_err(|e| Error::io(path, e))
}

/// True when `bytes` starts with the `.flo` magic number.
pub fn has_flo_magic(bytes: &[u8]) -> bool {
    bytes.len() >= 4 && f32::from_le_bytes(bytes[0..4].try_into().unwrap()) == FLO_MAGIC
}
