//! The `SWRD` field container.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `SWRD` |
//! | 4 | format version (`u32`) |
//! | 1 | domain kind (`0` torus, `1` disk patch) |
//! | 4 + 4 | `nx`, `ny` (`u32`) |
//! | 4 | component count (`u32`) |
//! | 16·nx·ny per component | row-major `(re, im)` pairs of `f64` |
//!
//! Component names are not stored; each producer fixes an order, listed in
//! the `*_COMPONENTS` constants.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use swlab_core::equations::Configuration;
use swlab_core::gauge::{Connection, LinkField};
use swlab_core::grid::{DomainKind, GridSpec, ScalarField};
use swlab_core::C64;

pub const MAGIC: [u8; 4] = *b"SWRD";
pub const VERSION: u32 = 1;

/// Order of components in a configuration snapshot.
pub const CONFIG_COMPONENTS: [&str; 7] = ["A.p10", "psi1", "psi2bar", "phi", "h", "sigma", "H"];
/// Order of components in a link-field snapshot.
pub const LINK_COMPONENTS: [&str; 2] = ["ux", "uy"];

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("not a field snapshot (magic bytes {0:?})")]
    BadMagic([u8; 4]),
    #[error("unsupported snapshot version {found} (expected {VERSION})")]
    VersionMismatch { found: u32 },
    #[error("unknown domain kind code {0}")]
    UnknownDomain(u8),
    #[error("snapshot is truncated")]
    Truncated,
    #[error("{0} trailing bytes after the last component")]
    TrailingBytes(usize),
    #[error("component {index} has {found} samples, expected {expected}")]
    ComponentLength {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("snapshot grid does not match: {0}")]
    Grid(#[from] swlab_core::Error),
    #[error("lattice connections have no potential to store")]
    LatticeConnection,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub kind: DomainKind,
    pub nx: usize,
    pub ny: usize,
    pub components: Vec<Vec<C64>>,
}

impl Snapshot {
    pub fn empty(grid: GridSpec) -> Self {
        Snapshot {
            kind: grid.kind,
            nx: grid.nx,
            ny: grid.ny,
            components: Vec::new(),
        }
    }

    pub fn from_fields(grid: GridSpec, fields: &[&ScalarField]) -> Result<Self, SnapshotError> {
        let mut s = Snapshot::empty(grid);
        for f in fields {
            swlab_core::grid::same_grid(&grid, &f.grid)?;
            s.components.push(f.values.clone());
        }
        Ok(s)
    }

    /// Components of a configuration in [`CONFIG_COMPONENTS`] order.
    pub fn from_config(c: &Configuration) -> Result<Self, SnapshotError> {
        let a = c.a.potential().ok_or(SnapshotError::LatticeConnection)?;
        Snapshot::from_fields(
            c.grid(),
            &[
                &a.p10,
                &c.psi.psi1,
                &c.psi.psi2bar,
                &c.phi.phi,
                &c.metric.h,
                &c.metric.sigma,
                &c.h.h,
            ],
        )
    }

    pub fn from_links(l: &LinkField) -> Self {
        let mut s = Snapshot::empty(l.grid);
        s.components = vec![l.ux.clone(), l.uy.clone()];
        s
    }

    /// Rebuilds component `k` on `grid`, which must agree with the header.
    pub fn field(&self, grid: GridSpec, k: usize) -> Result<ScalarField, SnapshotError> {
        if grid.kind != self.kind || grid.nx != self.nx || grid.ny != self.ny {
            return Err(swlab_core::Error::GridMismatch.into());
        }
        Ok(ScalarField::new(grid, self.components[k].clone())?)
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), SnapshotError> {
        let len = self.nx * self.ny;
        for (index, c) in self.components.iter().enumerate() {
            if c.len() != len {
                return Err(SnapshotError::ComponentLength {
                    index,
                    expected: len,
                    found: c.len(),
                });
            }
        }
        let mut buf = Vec::with_capacity(21 + 16 * len * self.components.len());
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.push(self.kind.code());
        buf.extend_from_slice(&to_u32(self.nx)?.to_le_bytes());
        buf.extend_from_slice(&to_u32(self.ny)?.to_le_bytes());
        buf.extend_from_slice(&to_u32(self.components.len())?.to_le_bytes());
        for c in &self.components {
            for v in c {
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, SnapshotError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Snapshot::decode(&bytes)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, SnapshotError> {
        let mut cur = Cursor { bytes, pos: 0 };
        let magic: [u8; 4] = cur.take(4)?.try_into().unwrap();
        if magic != MAGIC {
            return Err(SnapshotError::BadMagic(magic));
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(SnapshotError::VersionMismatch { found: version });
        }
        let code = cur.take(1)?[0];
        let kind = DomainKind::from_code(code).ok_or(SnapshotError::UnknownDomain(code))?;
        let nx = cur.u32()? as usize;
        let ny = cur.u32()? as usize;
        let count = cur.u32()? as usize;
        let len = nx.checked_mul(ny).ok_or(SnapshotError::Truncated)?;
        let need = len
            .checked_mul(count)
            .and_then(|n| n.checked_mul(16))
            .ok_or(SnapshotError::Truncated)?;
        if bytes.len() - cur.pos < need {
            return Err(SnapshotError::Truncated);
        }
        let mut components = Vec::with_capacity(count);
        for _ in 0..count {
            let mut c = Vec::with_capacity(len);
            for _ in 0..len {
                let re = f64::from_le_bytes(cur.take(8)?.try_into().unwrap());
                let im = f64::from_le_bytes(cur.take(8)?.try_into().unwrap());
                c.push(C64::new(re, im));
            }
            components.push(c);
        }
        if cur.pos != bytes.len() {
            return Err(SnapshotError::TrailingBytes(bytes.len() - cur.pos));
        }
        Ok(Snapshot {
            kind,
            nx,
            ny,
            components,
        })
    }

    /// Writes through a temporary file in the same directory and renames it
    /// into place, so readers never see a partial snapshot.
    pub fn save(&self, path: &Path) -> Result<(), SnapshotError> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        let tmp = path.with_extension("swrd.tmp");
        fs::write(&tmp, &buf)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SnapshotError> {
        Snapshot::decode(&fs::read(path)?)
    }

    /// Bitwise equality, distinguishing `-0.0` from `0.0` and comparing NaN
    /// payloads.
    pub fn bit_identical(&self, other: &Snapshot) -> bool {
        self.kind == other.kind
            && self.nx == other.nx
            && self.ny == other.ny
            && self.components.len() == other.components.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| {
                a.len() == b.len()
                    && a.iter()
                        .zip(b)
                        .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
            })
    }
}

/// Rebuilds link variables from a [`Snapshot::from_links`] container.
pub fn links_from_snapshot(s: &Snapshot, grid: GridSpec) -> Result<LinkField, SnapshotError> {
    let ux = s.field(grid, 0)?.values;
    let uy = s.field(grid, 1)?.values;
    Ok(LinkField::new(grid, ux, uy)?)
}

/// Rebuilds a configuration from a [`Snapshot::from_config`] container.
pub fn config_from_snapshot(s: &Snapshot, grid: GridSpec) -> Result<Configuration, SnapshotError> {
    use swlab_core::gauge::{HermitianMetric, HiggsField, SpinorPair};
    use swlab_core::grid::{MetricData, OneForm};
    let f = |k| s.field(grid, k);
    let a = Connection::smooth(OneForm::imaginary(f(0)?))?;
    let psi = SpinorPair::new(f(1)?, f(2)?)?;
    let phi = HiggsField::new(f(3)?);
    let metric = MetricData::new(f(4)?, f(5)?)?;
    let h = HermitianMetric::new(f(6)?)?;
    Ok(Configuration::new(a, psi, phi, metric, h)?)
}

fn to_u32(n: usize) -> Result<u32, SnapshotError> {
    u32::try_from(n).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "size exceeds u32").into())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SnapshotError> {
        let end = self.pos.checked_add(n).ok_or(SnapshotError::Truncated)?;
        let s = self.bytes.get(self.pos..end).ok_or(SnapshotError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}
