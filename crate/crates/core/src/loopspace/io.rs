//! Flat little-endian layout for path fixtures: `n_steps: u32`, `p: u32`,
//! then `p*n_steps + 1` triplets of `f64`.

use super::Vec3;
use crate::error::{param, Result};

pub fn path_to_bytes(n_steps: u32, p: u32, path: &[Vec3]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 24 * path.len());
    out.extend_from_slice(&n_steps.to_le_bytes());
    out.extend_from_slice(&p.to_le_bytes());
    for x in path {
        for v in x {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn path_from_bytes(bytes: &[u8]) -> Result<(u32, u32, Vec<Vec3>)> {
    if bytes.len() < 8 {
        return param("path buffer shorter than its header");
    }
    let n_steps = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
    let p = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let nodes = (p as usize) * (n_steps as usize) + 1;
    if bytes.len() != 8 + 24 * nodes {
        return param(format!("path buffer holds {} bytes, expected {}", bytes.len(), 8 + 24 * nodes));
    }
    let path = bytes[8..]
        .chunks_exact(24)
        .map(|c| {
            let f = |i: usize| f64::from_le_bytes(c[8 * i..8 * i + 8].try_into().unwrap());
            [f(0), f(1), f(2)]
        })
        .collect();
    Ok((n_steps, p, path))
}
