//! Rippled-circle study over a wavelength sequence at fixed a/λ and ε/λ.
//!
//! Each member compares its extracted interface with the unperturbed
//! collapsing circle. The length-weighted mean radius minus r₀cos(t/r₀) is
//! the mean deviation; whether it vanishes as λ → 0 is the question.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{validate, Initial, Reference, Scenario};
use crate::error::LabError;
use crate::runner::{run_scenario, RunOptions, RunReport};
use crate::scenario::ripple_modes;

#[derive(Debug, Clone, Serialize)]
pub struct RippleMember {
    pub wavelength: f64,
    pub amplitude: f64,
    pub epsilon: f64,
    pub spacing: f64,
    pub modes: usize,
    pub dir: String,
    pub report: Option<RunReport>,
    pub error: Option<String>,
    /// (t, mean deviation) rows of the member's reference table.
    pub series: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RippleReport {
    pub name: String,
    pub members: Vec<RippleMember>,
    /// Common sample times of the trend table.
    pub times: Vec<f64>,
    /// trend[i][j]: deviation of member j at times[i] (linear interpolation).
    pub trend: Vec<Vec<Option<f64>>>,
}

impl RippleMember {
    /// Time average of the mean deviation (trapezoid over the samples).
    pub fn mean_deviation_avg(&self) -> Option<f64> {
        let s = &self.series;
        if s.len() < 2 {
            return s.first().map(|p| p.1);
        }
        let span = s[s.len() - 1].0 - s[0].0;
        let area: f64 = s
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum();
        (span > 0.0).then(|| area / span)
    }
}

/// Member scenario for wavelength λ: a and ε scale with λ relative to the
/// configured (largest) wavelength; h follows ε unless the grid was fixed,
/// and never exceeds λ/16.
pub fn member_scenario(
    s: &Scenario,
    index: usize,
    lambda: f64,
    dir: &Path,
) -> Result<Scenario, LabError> {
    let Initial::Ripple {
        r0,
        amplitude,
        wavelength,
        ..
    } = s.initial
    else {
        return Err(LabError::Config(
            "ripple study needs initial.kind = ripple".into(),
        ));
    };
    let scale = lambda / wavelength;
    let mut m = s.clone();
    m.name = format!("{}_l{index}", s.name);
    m.initial = Initial::Ripple {
        r0,
        amplitude: amplitude * scale,
        wavelength: lambda,
        wavelength_list: Vec::new(),
    };
    m.model.epsilon = s.model.epsilon * scale;
    m.model.epsilon_list.clear();
    m.reference = Reference::Radial;
    if s.grid.per_epsilon {
        let h = (m.model.epsilon / s.solver.points_per_width).min(lambda / 16.0);
        m.grid.cells = (0..s.grid.dim)
            .map(|a| (s.grid.extent(a) / h).round() as usize)
            .collect();
        m.grid.spacing = h;
        m.grid.per_epsilon = false;
    }
    m.output.dir = dir
        .join(format!(
            "{index:02}_lambda{}",
            format!("{lambda:.5}").replace('.', "p")
        ))
        .to_string_lossy()
        .into_owned();
    if m.output.interface_every == 0 {
        m.output.interface_every = m.output.energy_every.max(1);
    }
    validate(&m)?;
    Ok(m)
}

/// (t, mean_deviation) from a ripple member's reference.csv.
pub fn read_deviation(path: &Path) -> Result<Vec<(f64, f64)>, LabError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (Some(ct), Some(cd)) = (col("t"), col("mean_deviation")) else {
        return Err(LabError::Usage(format!(
            "{} has no mean_deviation column",
            path.display()
        )));
    };
    Ok(lines
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Some((f.get(ct)?.parse().ok()?, f.get(cd)?.parse().ok()?))
        })
        .collect())
}

fn interpolate(series: &[(f64, f64)], t: f64) -> Option<f64> {
    let first = series.first()?;
    let last = series.last()?;
    if t < first.0 - 1e-12 || t > last.0 + 1e-12 {
        return None;
    }
    for w in series.windows(2) {
        if t <= w[1].0 {
            let span = w[1].0 - w[0].0;
            let s = if span > 0.0 {
                ((t - w[0].0) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
            return Some(w[0].1 + s * (w[1].1 - w[0].1));
        }
    }
    Some(last.1)
}

pub fn ripple_study(s: &Scenario, opts: &RunOptions) -> Result<RippleReport, LabError> {
    let Initial::Ripple {
        wavelength_list, ..
    } = &s.initial
    else {
        return Err(LabError::Config(
            "ripple study needs initial.kind = ripple".into(),
        ));
    };
    if wavelength_list.len() < 2 {
        return Err(LabError::Config(
            "ripple study needs initial.wavelength_list with at least 2 values".into(),
        ));
    }
    let dir = PathBuf::from(&s.output.dir);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("resolved.cfg"), crate::config::resolved_text(s))?;
    let mut members = Vec::new();
    for (i, &lambda) in wavelength_list.iter().enumerate() {
        let m = member_scenario(s, i, lambda, &dir)?;
        let Initial::Ripple { r0, amplitude, .. } = m.initial else {
            unreachable!()
        };
        let (report, error) = match run_scenario(&m, opts) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let series =
            read_deviation(&Path::new(&m.output.dir).join("reference.csv")).unwrap_or_default();
        if !opts.quiet {
            eprintln!(
                "[{}] member lambda = {lambda}: {}",
                s.name,
                error.as_deref().unwrap_or("ok")
            );
        }
        members.push(RippleMember {
            wavelength: lambda,
            amplitude,
            epsilon: m.model.epsilon,
            spacing: m.grid.spacing,
            modes: ripple_modes(r0, lambda),
            dir: m.output.dir.clone(),
            report,
            error,
            series,
        });
    }
    let samples = 21;
    let times: Vec<f64> = (0..samples)
        .map(|i| s.solver.t_end * i as f64 / (samples - 1) as f64)
        .collect();
    let trend = times
        .iter()
        .map(|&t| members.iter().map(|m| interpolate(&m.series, t)).collect())
        .collect();
    let report = RippleReport {
        name: s.name.clone(),
        members,
        times,
        trend,
    };
    write_outputs(&dir, &report)?;
    Ok(report)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_outputs(dir: &Path, r: &RippleReport) -> Result<(), LabError> {
    let mut csv = String::from(
        "wavelength,amplitude,epsilon,spacing,modes,status,final_mean_deviation,time_avg_mean_deviation,\
         max_abs_mean_deviation,max_hausdorff,max_drift\n",
    );
    for m in &r.members {
        let metric = |k: &str| m.report.as_ref().and_then(|rep| rep.metric(k));
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            m.wavelength,
            m.amplitude,
            m.epsilon,
            m.spacing,
            m.modes,
            if m.error.is_none() { "ok" } else { "failed" },
            opt(m.series.last().map(|p| p.1)),
            opt(m.mean_deviation_avg()),
            opt(metric("max_abs_mean_deviation")),
            opt(metric("max_hausdorff")),
            opt(metric("max_drift")),
        );
    }
    std::fs::write(dir.join("ripples.csv"), csv)?;

    let mut trend = String::from("t");
    for m in &r.members {
        let _ = write!(trend, ",deviation_lambda_{}", m.wavelength);
    }
    trend.push('\n');
    for (t, row) in r.times.iter().zip(&r.trend) {
        let _ = write!(trend, "{t}");
        for v in row {
            let _ = write!(trend, ",{}", opt(*v));
        }
        trend.push('\n');
    }
    std::fs::write(dir.join("ripples_trend.csv"), trend)?;

    let mut txt = format!(
        "ripple study `{}`: mean interface deviation from the smooth circle\n\n",
        r.name
    );
    for m in &r.members {
        let _ = writeln!(
            txt,
            "  lambda = {:<10.5} a = {:<10.5} eps = {:<10.5} m = {:<4} time-avg deviation = {:>12}  final = {:>12}  {}",
            m.wavelength,
            m.amplitude,
            m.epsilon,
            m.modes,
            m.mean_deviation_avg().map(|v| format!("{v:.4e}")).unwrap_or("-".into()),
            m.series.last().map(|p| format!("{:.4e}", p.1)).unwrap_or("-".into()),
            m.error.as_deref().unwrap_or("ok"),
        );
    }
    std::fs::write(dir.join("ripples_report.txt"), txt)?;
    std::fs::write(
        dir.join("ripples_report.json"),
        serde_json::to_string_pretty(r)?,
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_inside_and_outside() {
        let s = [(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)];
        assert_eq!(interpolate(&s, 0.5), Some(1.0));
        assert_eq!(interpolate(&s, 2.0), Some(0.0));
        assert_eq!(interpolate(&s, 2.5), None);
    }
}
