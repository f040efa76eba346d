//! KPS1 binary snapshots.
//!
//! Layout, all little-endian: magic `KPS1`, `u32` version, `u32` Nx, `u32` Ny,
//! `f64` Lx, Ly, time, then Ny·Nx `f64` values with x varying fastest.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::field::{BoundaryCondition, Field, FieldError, Grid2D};

pub const MAGIC: [u8; 4] = *b"KPS1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 3 * 4 + 3 * 8;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("not a KPS1 snapshot")]
    BadMagic,
    #[error("snapshot payload has {actual} bytes, header implies {expected}")]
    TruncatedFile { expected: usize, actual: usize },
    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(u32),
    #[error("snapshot dimensions too large for this platform")]
    TooLarge,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Decoded snapshot. The format does not record boundary conditions, so the
/// grid is rebuilt by the caller through [`Snapshot::to_field`].
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: u32,
    pub ny: u32,
    pub lx: f64,
    pub ly: f64,
    pub time: f64,
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn from_field(f: &Field, time: f64) -> Self {
        let g = f.grid();
        Self {
            nx: g.nx() as u32,
            ny: g.ny() as u32,
            lx: g.lx(),
            ly: g.ly(),
            time,
            values: f.values().to_vec(),
        }
    }

    pub fn to_field(&self, bc_y: BoundaryCondition) -> Result<Field, FieldError> {
        let grid = Grid2D::new(
            self.lx,
            self.ly,
            self.nx as usize,
            self.ny as usize,
            BoundaryCondition::Periodic,
            bc_y,
        )?;
        Field::new(grid, self.values.clone())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.values.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.nx.to_le_bytes());
        out.extend_from_slice(&self.ny.to_le_bytes());
        for v in [self.lx, self.ly, self.time] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, SnapshotError> {
        if bytes.len() < 4 || bytes[..4] != MAGIC {
            return Err(SnapshotError::BadMagic);
        }
        if bytes.len() < HEADER_LEN {
            return Err(SnapshotError::TruncatedFile { expected: HEADER_LEN, actual: bytes.len() });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != VERSION {
            return Err(SnapshotError::UnsupportedVersion(version));
        }
        let (nx, ny) = (u32_at(8), u32_at(12));
        let expected = (nx as usize)
            .checked_mul(ny as usize)
            .and_then(|n| n.checked_mul(8))
            .ok_or(SnapshotError::TooLarge)?;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != expected {
            return Err(SnapshotError::TruncatedFile { expected, actual: payload.len() });
        }
        let values = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self { nx, ny, lx: f64_at(16), ly: f64_at(24), time: f64_at(32), values })
    }
}

pub fn write_snapshot(f: &Field, time: f64, path: &Path) -> Result<(), SnapshotError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(&Snapshot::from_field(f, time).encode())?;
    file.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, SnapshotError> {
    Snapshot::decode(&std::fs::read(path)?)
}
