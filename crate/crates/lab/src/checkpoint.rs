//! `<out>/checkpoint/`: the resolved config, the two leapfrog levels as
//! HGLW files and `meta.json` with the observer state. Floats in the JSON
//! are stored as their IEEE bit patterns so a resumed run is bit-exact.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};

use kinklab_core::diagnostics::{default_test_family, AccumulatorParts, StationarityAccumulator};
use kinklab_core::field::FieldState;
use kinklab_core::solver::Leapfrog;
use serde::{Deserialize, Serialize};

use crate::config::{parse_str, resolved_text};
use crate::error::LabError;
use crate::runner::{Progress, RunOptions, RunReport, Runner, TABLES};
use crate::snapshot;

pub const DIR: &str = "checkpoint";

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    steps: u64,
    t0: u64,
    dt: u64,
    e0: u64,
    t_start: u64,
    metrics: BTreeMap<String, u64>,
    stationarity: Option<Accum>,
    table_lengths: Vec<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Accum {
    theta: u64,
    sums: Vec<u64>,
    tube_sums: Vec<u64>,
    last: Option<(u64, Vec<u64>, Vec<u64>)>,
    first: Option<u64>,
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn floats(v: &[u64]) -> Vec<f64> {
    v.iter().map(|&x| f64::from_bits(x)).collect()
}

fn level(integ: &Leapfrog<f64>, u: &[Vec<f64>], time: f64) -> FieldState<f64> {
    FieldState {
        grid: integ.grid().clone(),
        k: u.len(),
        epsilon: integ.epsilon(),
        time,
        u: u.to_vec(),
        ut: vec![vec![0.0; u[0].len()]; u.len()],
    }
}

pub(crate) fn write(r: &Runner) -> Result<PathBuf, LabError> {
    let tmp = r.dir.join(format!("{DIR}.tmp"));
    let dest = r.dir.join(DIR);
    if tmp.exists() {
        std::fs::remove_dir_all(&tmp)?;
    }
    std::fs::create_dir_all(&tmp)?;
    let integ = &r.integ;
    let t = integ.time();
    snapshot::save(
        &tmp.join("prev.hglw"),
        &level(integ, integ.previous(), t - integ.dt()),
    )?;
    snapshot::save(&tmp.join("curr.hglw"), &level(integ, integ.current(), t))?;
    std::fs::write(tmp.join("config.cfg"), resolved_text(&r.scenario))?;
    let stationarity = r.progress.stationarity.as_ref().map(|acc| {
        let p = acc.parts();
        Accum {
            theta: p.theta.to_bits(),
            sums: bits(&p.sums),
            tube_sums: bits(&p.tube_sums),
            last: p.last.map(|(t, a, b)| (t.to_bits(), bits(&a), bits(&b))),
            first: p.first_time.map(f64::to_bits),
        }
    });
    let meta = Meta {
        steps: integ.steps(),
        t0: integ.t0().to_bits(),
        dt: integ.dt().to_bits(),
        e0: r.progress.e0.to_bits(),
        t_start: r.progress.t_start.to_bits(),
        metrics: r
            .progress
            .metrics
            .iter()
            .map(|(k, v)| (k.clone(), v.to_bits()))
            .collect(),
        stationarity,
        table_lengths: r.out_lengths()?,
    };
    std::fs::write(tmp.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;
    if dest.exists() {
        std::fs::remove_dir_all(&dest)?;
    }
    std::fs::rename(&tmp, &dest)?;
    Ok(dest)
}

/// Accepts the checkpoint directory or a file inside it.
fn checkpoint_dir(path: &Path) -> PathBuf {
    if path.is_file() {
        path.parent().map(Path::to_path_buf).unwrap_or_default()
    } else {
        path.to_path_buf()
    }
}

/// Continues a run from its checkpoint. Outputs go to the checkpoint's
/// parent directory; tables are truncated back to the checkpointed state.
pub fn resume(path: &Path, opts: &RunOptions) -> Result<RunReport, LabError> {
    let dir = checkpoint_dir(path);
    let missing = |what: &str| {
        LabError::Usage(format!(
            "{} is not a checkpoint ({what} missing)",
            dir.display()
        ))
    };
    let text =
        std::fs::read_to_string(dir.join("config.cfg")).map_err(|_| missing("config.cfg"))?;
    let meta: Meta = serde_json::from_str(
        &std::fs::read_to_string(dir.join("meta.json")).map_err(|_| missing("meta.json"))?,
    )?;
    let mut s = parse_str(&text)?;
    let out = dir
        .canonicalize()?
        .parent()
        .map(Path::to_path_buf)
        .ok_or_else(|| missing("parent directory"))?;
    s.output.dir = out.to_string_lossy().into_owned();

    let prev = snapshot::load(&dir.join("prev.hglw"), s.grid.boundary)?;
    let curr = snapshot::load(&dir.join("curr.hglw"), s.grid.boundary)?;
    let integ = Leapfrog::from_levels(
        curr.grid.clone(),
        curr.epsilon,
        f64::from_bits(meta.dt),
        f64::from_bits(meta.t0),
        meta.steps,
        prev.u,
        curr.u,
    );
    if meta.table_lengths.len() != TABLES.len() {
        return Err(missing("table lengths"));
    }
    for (name, &len) in TABLES.iter().zip(&meta.table_lengths) {
        OpenOptions::new()
            .write(true)
            .open(out.join(name))?
            .set_len(len)?;
    }
    let stationarity = meta.stationarity.map(|a| {
        let fam = default_test_family(
            integ.grid(),
            (f64::from_bits(meta.t_start), s.solver.t_end),
            s.output.stationarity_lattice,
        );
        StationarityAccumulator::from_parts(
            fam,
            AccumulatorParts {
                theta: f64::from_bits(a.theta),
                sums: floats(&a.sums),
                tube_sums: floats(&a.tube_sums),
                last: a
                    .last
                    .map(|(t, x, y)| (f64::from_bits(t), floats(&x), floats(&y))),
                first_time: a.first.map(f64::from_bits),
            },
        )
    });
    let progress = Progress {
        e0: f64::from_bits(meta.e0),
        t_start: f64::from_bits(meta.t_start),
        metrics: meta
            .metrics
            .into_iter()
            .map(|(k, v)| (k, f64::from_bits(v)))
            .collect(),
        stationarity,
    };
    let steps = meta.steps;
    let mut r = Runner::new(s, out, integ, progress, Some(steps), opts)?;
    r.go(opts)
}
