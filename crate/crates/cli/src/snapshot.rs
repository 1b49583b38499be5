//! Bit-exact binary snapshots of the solver state.
//!
//! Layout (little-endian throughout):
//! magic `NSFV` (4 bytes) | format version u32 | dim u8 | n u32 per axis |
//! time f64 | eps f64 | field count u8 | field tags (1 byte each) |
//! payload: count * n^dim IEEE-754 binary64 values in tag order, row-major.
//!
//! Tags: 0 = rho, 1 = m_x, 2 = m_y, 3 = g, 4 = theta.

use crate::error::{CliError, Result};
use nsf_core::field::{ScalarField, VectorField};
use nsf_core::grid::PeriodicGrid;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: [u8; 4] = *b"NSFV";
pub const FORMAT_VERSION: u32 = 1;

pub const TAG_RHO: u8 = 0;
pub const TAG_MX: u8 = 1;
pub const TAG_MY: u8 = 2;
pub const TAG_G: u8 = 3;
pub const TAG_THETA: u8 = 4;

/// One complete state: density, momentum, good unknown and temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBundle {
    pub grid: PeriodicGrid,
    pub time: f64,
    pub eps: f64,
    pub rho: ScalarField,
    pub m: VectorField,
    pub g: ScalarField,
    pub theta: ScalarField,
}

impl StateBundle {
    fn tags(&self) -> Vec<u8> {
        let mut tags = vec![TAG_RHO, TAG_MX];
        if self.grid.dim == 2 {
            tags.push(TAG_MY);
        }
        tags.push(TAG_G);
        tags.push(TAG_THETA);
        tags
    }
}

/// Writes the bundle; the byte stream is a pure function of the values.
pub fn write_snapshot(path: &Path, bundle: &StateBundle) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.push(bundle.grid.dim as u8);
    for _ in 0..bundle.grid.dim {
        buf.extend_from_slice(&(bundle.grid.n as u32).to_le_bytes());
    }
    buf.extend_from_slice(&bundle.time.to_le_bytes());
    buf.extend_from_slice(&bundle.eps.to_le_bytes());
    let tags = bundle.tags();
    buf.push(tags.len() as u8);
    buf.extend_from_slice(&tags);
    for tag in &tags {
        let values: &[f64] = match *tag {
            TAG_RHO => &bundle.rho.values,
            TAG_MX => &bundle.m.comps[0],
            TAG_MY => &bundle.m.comps[1],
            TAG_G => &bundle.g.values,
            TAG_THETA => &bundle.theta.values,
            _ => unreachable!(),
        };
        for v in values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn need(&mut self, count: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + count > self.bytes.len() {
            return Err(CliError::Format(format!(
                "truncated snapshot: needed {count} bytes for {what} at offset {}",
                self.pos
            )));
        }
        let slice = &self.bytes[self.pos..self.pos + count];
        self.pos += count;
        Ok(slice)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.need(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.need(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let b = self.need(8, what)?;
        Ok(f64::from_le_bytes([
            b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7],
        ]))
    }
}

/// Reads a snapshot back, verifying magic, version and shape.
pub fn read_snapshot(path: &Path) -> Result<StateBundle> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut r = Reader {
        bytes: &bytes,
        pos: 0,
    };

    let magic = r.need(4, "magic")?;
    if magic != MAGIC {
        return Err(CliError::Format(format!(
            "bad magic: expected {:?}, found {:?}",
            MAGIC, magic
        )));
    }
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(CliError::Format(format!(
            "unsupported snapshot version: expected {FORMAT_VERSION}, found {version}"
        )));
    }
    let dim = r.u8("dim")? as usize;
    if dim != 1 && dim != 2 {
        return Err(CliError::Format(format!("invalid dimension {dim}")));
    }
    let mut n = 0usize;
    for axis in 0..dim {
        let na = r.u32("cells per axis")? as usize;
        if axis == 0 {
            n = na;
        } else if na != n {
            return Err(CliError::Format(format!(
                "anisotropic grids are not supported: {n} vs {na}"
            )));
        }
    }
    let time = r.f64("time")?;
    let eps = r.f64("eps")?;
    let count = r.u8("field count")? as usize;
    let tags = r.need(count, "field tags")?.to_vec();

    let grid = PeriodicGrid::new(dim, n, 1.0)
        .map_err(|e| CliError::Format(format!("snapshot grid: {e}")))?;
    let cells = grid.cells();

    let mut rho = None;
    let mut mx = None;
    let mut my = None;
    let mut g = None;
    let mut theta = None;
    for tag in &tags {
        let mut values = Vec::with_capacity(cells);
        for _ in 0..cells {
            values.push(r.f64("field payload")?);
        }
        match *tag {
            TAG_RHO => rho = Some(values),
            TAG_MX => mx = Some(values),
            TAG_MY => my = Some(values),
            TAG_G => g = Some(values),
            TAG_THETA => theta = Some(values),
            other => {
                return Err(CliError::Format(format!("unknown field tag {other}")));
            }
        }
    }
    let missing = |what: &str| CliError::Format(format!("snapshot lacks the {what} field"));
    let rho = ScalarField::from_values(grid, rho.ok_or_else(|| missing("rho"))?)
        .map_err(CliError::from)?;
    let g = ScalarField::from_values(grid, g.ok_or_else(|| missing("g"))?)
        .map_err(CliError::from)?;
    let theta = ScalarField::from_values(grid, theta.ok_or_else(|| missing("theta"))?)
        .map_err(CliError::from)?;
    let mut comps = vec![mx.ok_or_else(|| missing("m_x"))?];
    if dim == 2 {
        comps.push(my.ok_or_else(|| missing("m_y"))?);
    }
    let m = VectorField::from_comps(grid, comps).map_err(CliError::from)?;

    Ok(StateBundle {
        grid,
        time,
        eps,
        rho,
        m,
        g,
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_bundle(dim: usize) -> StateBundle {
        let grid = PeriodicGrid::unit(dim, 8).unwrap();
        StateBundle {
            grid,
            time: 0.125,
            eps: 1e-3,
            rho: ScalarField::from_fn(grid, |x, y| 1.0 + 0.1 * x + 0.01 * y),
            m: VectorField::from_fn(grid, |x, y, a| x - y + a as f64),
            g: ScalarField::from_fn(grid, |x, _| 1.0 + x * x),
            theta: ScalarField::from_fn(grid, |x, y| 1.0 + x * y),
        }
    }

    #[test]
    fn roundtrip_bit_exact() {
        for dim in [1, 2] {
            let bundle = sample_bundle(dim);
            let dir = std::env::temp_dir().join(format!("nsfv_snap_test_{dim}"));
            std::fs::create_dir_all(&dir).unwrap();
            let path = dir.join("state.nsfv");
            write_snapshot(&path, &bundle).unwrap();
            let back = read_snapshot(&path).unwrap();
            assert_eq!(bundle, back);
            // Writing the read-back bundle reproduces the bytes verbatim.
            let path2 = dir.join("state2.nsfv");
            write_snapshot(&path2, &back).unwrap();
            assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
        }
    }

    #[test]
    fn truncated_file_is_format_error() {
        let bundle = sample_bundle(1);
        let dir = std::env::temp_dir().join("nsfv_snap_trunc");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.nsfv");
        write_snapshot(&path, &bundle).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        match read_snapshot(&path) {
            Err(CliError::Format(msg)) => assert!(msg.contains("truncated"), "{msg}"),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_names_versions() {
        let bundle = sample_bundle(1);
        let dir = std::env::temp_dir().join("nsfv_snap_ver");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.nsfv");
        write_snapshot(&path, &bundle).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 99;
        std::fs::write(&path, &bytes).unwrap();
        match read_snapshot(&path) {
            Err(CliError::Format(msg)) => {
                assert!(msg.contains("expected 1") && msg.contains("found 99"), "{msg}")
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }
}
