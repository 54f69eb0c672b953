//! 16-bit binary PGM (P5) images of 2D snapshots with a JSON sidecar.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use kinklab_core::diagnostics::densities;
use kinklab_core::field::{Boundary, FieldState};

use crate::error::LabError;
use crate::snapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSel {
    E,
    L,
    W,
    U0,
    U1,
    AbsU,
}

impl FromStr for FieldSel {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        Ok(match s {
            "e" => FieldSel::E,
            "l" => FieldSel::L,
            "w" => FieldSel::W,
            "u0" => FieldSel::U0,
            "u1" => FieldSel::U1,
            "abs_u" => FieldSel::AbsU,
            other => {
                return Err(LabError::Usage(format!(
                    "unknown field `{other}` (e, l, w, u0, u1, abs_u)"
                )))
            }
        })
    }
}

impl FieldSel {
    pub fn name(self) -> &'static str {
        match self {
            FieldSel::E => "e",
            FieldSel::L => "l",
            FieldSel::W => "w",
            FieldSel::U0 => "u0",
            FieldSel::U1 => "u1",
            FieldSel::AbsU => "abs_u",
        }
    }
}

pub fn field_values(s: &FieldState<f64>, sel: FieldSel) -> Result<Vec<f64>, LabError> {
    Ok(match sel {
        FieldSel::E => densities(s).e,
        FieldSel::L => densities(s).l,
        FieldSel::W => densities(s).w,
        FieldSel::U0 => s.u[0].clone(),
        FieldSel::U1 => {
            s.u.get(1)
                .cloned()
                .ok_or_else(|| LabError::Usage("field u1 needs a k = 2 snapshot".into()))?
        }
        FieldSel::AbsU => (0..s.grid.len())
            .map(|i| s.u.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect(),
    })
}

/// PGM bytes (top row = largest y) and the (min, max) mapped to 0 and 65535.
/// A constant field maps to 0 everywhere.
pub fn encode_pgm(s: &FieldState<f64>, sel: FieldSel) -> Result<(Vec<u8>, f64, f64), LabError> {
    let g = &s.grid;
    if g.dim() != 2 {
        return Err(LabError::Usage(format!(
            "heatmaps need a 2D snapshot, got n = {}",
            g.dim()
        )));
    }
    let v = field_values(s, sel)?;
    let (w, h) = (g.cells()[0], g.cells()[1]);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut out = format!("P5\n{w} {h}\n65535\n").into_bytes();
    out.reserve(2 * w * h);
    for row in (0..h).rev() {
        for col in 0..w {
            let x = v[g.flat([col, row, 0])];
            let q = if span > 0.0 {
                ((x - lo) / span * 65535.0).round() as u16
            } else {
                0
            };
            out.extend_from_slice(&q.to_be_bytes());
        }
    }
    Ok((out, lo, hi))
}

/// Writes `<out>` and `<out>.json`; `out` defaults to
/// `<snapshot stem>_<field>.pgm` beside the snapshot.
pub fn emit_heatmap(
    snapshot_path: &Path,
    sel: FieldSel,
    out: Option<&Path>,
) -> Result<PathBuf, LabError> {
    // the boundary only matters for differences at the edges
    let s = snapshot::load(snapshot_path, Boundary::Periodic)?;
    let (bytes, lo, hi) = encode_pgm(&s, sel)?;
    let out = match out {
        Some(p) => p.to_path_buf(),
        None => {
            let stem = snapshot_path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("snapshot");
            snapshot_path.with_file_name(format!("{stem}_{}.pgm", sel.name()))
        }
    };
    std::fs::write(&out, bytes)?;
    let side = serde_json::json!({
        "field": sel.name(),
        "min": lo,
        "max": hi,
        "width": s.grid.cells()[0],
        "height": s.grid.cells()[1],
        "time": s.time,
        "epsilon": s.epsilon,
        "source": snapshot_path.to_string_lossy(),
        "rows": "top row is the largest y",
    });
    let mut side_path = out.clone().into_os_string();
    side_path.push(".json");
    std::fs::write(
        PathBuf::from(side_path),
        serde_json::to_string_pretty(&side)?,
    )?;
    Ok(out)
}
