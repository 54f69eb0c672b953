//! HGLW snapshot files.
//!
//! Little-endian layout: magic `HGLW`, version u32, n u32, k u32,
//! cells[n] u64, spacing f64, origin[n] f64, time f64, epsilon f64, then the
//! u components followed by the uₜ components as f64, row-major (axis 0
//! fastest), component-major.

use std::io::{Read, Write};
use std::path::Path;

use kinklab_core::field::{Boundary, FieldState, Grid};

use crate::error::LabError;

pub const MAGIC: &[u8; 4] = b"HGLW";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub version: u32,
    pub k: usize,
    pub cells: Vec<usize>,
    pub spacing: f64,
    pub origin: Vec<f64>,
    pub time: f64,
    pub epsilon: f64,
}

fn bad(msg: impl Into<String>) -> LabError {
    LabError::Snapshot(msg.into())
}

pub fn write_snapshot<W: Write>(out: &mut W, s: &FieldState<f64>) -> Result<(), LabError> {
    let g = &s.grid;
    let mut buf = Vec::with_capacity(64 + 16 * s.k * g.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(s.k as u32).to_le_bytes());
    for &c in g.cells() {
        buf.extend_from_slice(&(c as u64).to_le_bytes());
    }
    buf.extend_from_slice(&g.spacing().to_le_bytes());
    for &o in g.origin() {
        buf.extend_from_slice(&o.to_le_bytes());
    }
    buf.extend_from_slice(&s.time.to_le_bytes());
    buf.extend_from_slice(&s.epsilon.to_le_bytes());
    for comp in s.u.iter().chain(&s.ut) {
        for x in comp {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], LabError> {
        let end = self.pos + N;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| bad("truncated file"))?;
        self.pos = end;
        Ok(s.try_into().unwrap())
    }

    fn u32(&mut self) -> Result<u32, LabError> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64, LabError> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64, LabError> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

fn parse_header(c: &mut Cursor<'_>) -> Result<Header, LabError> {
    if &c.take::<4>()? != MAGIC {
        return Err(bad("not an HGLW file"));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(bad(format!(
            "unsupported HGLW version {version} (reader understands {VERSION})"
        )));
    }
    let n = c.u32()? as usize;
    let k = c.u32()? as usize;
    if !(1..=3).contains(&n) || !(1..=2).contains(&k) {
        return Err(bad(format!("bad dimensions n = {n}, k = {k}")));
    }
    let cells = (0..n)
        .map(|_| c.u64().map(|x| x as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let spacing = c.f64()?;
    let origin = (0..n).map(|_| c.f64()).collect::<Result<Vec<_>, _>>()?;
    let time = c.f64()?;
    let epsilon = c.f64()?;
    Ok(Header {
        version,
        k,
        cells,
        spacing,
        origin,
        time,
        epsilon,
    })
}

/// Reads a snapshot; the format does not store the boundary type, so the
/// caller supplies it.
pub fn read_snapshot<R: Read>(
    input: &mut R,
    boundary: Boundary,
) -> Result<FieldState<f64>, LabError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut c = Cursor {
        bytes: &bytes,
        pos: 0,
    };
    let h = parse_header(&mut c)?;
    let len: usize = h.cells.iter().product();
    let need = c.pos + 16 * h.k * len;
    if bytes.len() != need {
        return Err(bad(format!(
            "payload size {} does not match header ({need} bytes expected)",
            bytes.len()
        )));
    }
    let mut comps = Vec::with_capacity(2 * h.k);
    for _ in 0..2 * h.k {
        comps.push((0..len).map(|_| c.f64()).collect::<Result<Vec<_>, _>>()?);
    }
    let ut = comps.split_off(h.k);
    let grid =
        Grid::new(&h.cells, &h.origin, h.spacing, boundary).map_err(|e| bad(e.to_string()))?;
    FieldState::new(grid, h.k, h.epsilon, h.time, comps, ut).map_err(|e| bad(e.to_string()))
}

pub fn save(path: &Path, s: &FieldState<f64>) -> Result<(), LabError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshot(&mut f, s)?;
    f.flush()?;
    Ok(())
}

pub fn load(path: &Path, boundary: Boundary) -> Result<FieldState<f64>, LabError> {
    let mut f = std::fs::File::open(path)
        .map_err(|e| bad(format!("cannot open {}: {e}", path.display())))?;
    read_snapshot(&mut f, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kinklab_core::field::init_from_profile;

    fn sample() -> FieldState<f64> {
        let g = Grid::<f64>::new(&[9, 8], &[-0.3, 0.1], 0.05, Boundary::Neumann).unwrap();
        let mut s = init_from_profile(
            g,
            2,
            0.07,
            |x, o| {
                o[0] = (3.0 * x[0]).sin();
                o[1] = x[1] * x[1] - 0.1;
            },
            |x, o| {
                o[0] = x[0] + x[1];
                o[1] = -1.0 / 3.0;
            },
        )
        .unwrap();
        s.time = 0.123456789;
        s
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = sample();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &s).unwrap();
        let back = read_snapshot(&mut buf.as_slice(), Boundary::Neumann).unwrap();
        assert_eq!(back.grid, s.grid);
        assert_eq!(back.time.to_bits(), s.time.to_bits());
        let bits = |v: &Vec<Vec<f64>>| v.iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back.u), bits(&s.u));
        assert_eq!(bits(&back.ut), bits(&s.ut));
        let mut again = Vec::new();
        write_snapshot(&mut again, &back).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &sample()).unwrap();
        assert_eq!(&buf[..4], b"HGLW");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 9);
        assert_eq!(buf.len(), 4 + 12 + 16 + 8 + 16 + 16 + 4 * 72 * 8);
    }

    #[test]
    fn version_gates_reader() {
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &sample()).unwrap();
        buf[4] = 2;
        let err = read_snapshot(&mut buf.as_slice(), Boundary::Neumann).unwrap_err();
        assert!(err.to_string().contains("version 2"));
        assert!(read_snapshot(&mut &b"HGLX"[..], Boundary::Neumann).is_err());
        let mut short = Vec::new();
        write_snapshot(&mut short, &sample()).unwrap();
        short.pop();
        assert!(read_snapshot(&mut short.as_slice(), Boundary::Neumann).is_err());
    }
}
