//! Binary snapshots of the physical-space fields.
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"CRFS"  u32 version  u32 d  u32 n  f64 t
//! f64[n^d] per velocity component, then f64[n^d] for c   (x-fastest)
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::State;
use crate::spectral::{Grid, PhysicalField, Rank};

pub const MAGIC: &[u8; 4] = b"CRFS";
pub const SNAPSHOT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub v: PhysicalField,
    pub c: PhysicalField,
}

impl Snapshot {
    pub fn of(state: &State) -> Snapshot {
        Snapshot { t: state.t, v: state.v.to_physical(), c: state.c.to_physical() }
    }

    pub fn to_state(&self) -> Result<State> {
        State::from_physical(self.t, &self.v, &self.c)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let grid = self.v.grid();
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * grid.len() * (grid.dim() + 1));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
        out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
        out.extend_from_slice(&(grid.modes() as u32).to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        for comp in self.v.components().iter().chain(self.c.components()) {
            for x in comp {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Snapshot> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Snapshot(format!("size mismatch: {} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::Snapshot(format!("bad magic {:?}", &bytes[..4])));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let version = u32_at(4);
        if version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!("unsupported version {version}, expected {SNAPSHOT_VERSION}")));
        }
        let (d, n) = (u32_at(8) as usize, u32_at(12) as usize);
        let t = f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
        let grid = Grid::new(d, n).map_err(|e| Error::Snapshot(e.to_string()))?;
        let len = grid.len();
        let expected = HEADER_LEN + 8 * len * (d + 1);
        if bytes.len() != expected {
            return Err(Error::Snapshot(format!("size mismatch: expected {expected} bytes, found {}", bytes.len())));
        }
        let mut comps: Vec<Vec<f64>> = bytes[HEADER_LEN..]
            .chunks_exact(8 * len)
            .map(|chunk| chunk.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect())
            .collect();
        let c = comps.pop().expect("concentration block");
        Ok(Snapshot {
            t,
            v: PhysicalField::from_components(&grid, Rank::Vector, comps)?,
            c: PhysicalField::from_components(&grid, Rank::Scalar, vec![c])?,
        })
    }
}

pub fn write_snapshot(state: &State, path: &Path) -> Result<()> {
    std::fs::write(path, Snapshot::of(state).to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Snapshot::from_bytes(&bytes)
}
