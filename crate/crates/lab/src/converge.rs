//! ε-sequence studies: one member run per ε, then trends and fits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Scenario;
use crate::error::LabError;
use crate::runner::{run_scenario, RunOptions, RunReport};

/// Metrics tabulated per member, in column order.
pub const TREND_METRICS: &[&str] = &[
    "max_hausdorff",
    "max_interface_error",
    "max_field_error",
    "equipartition_final",
    "ball_ratio_final",
    "projection_trace_final",
    "stationarity_max",
    "stationarity_tube_max",
    "max_drift",
];

/// Ratios expected to behave like C/|log ε|.
const LOG_FIT_METRICS: &[&str] = &["ball_ratio_final", "equipartition_final"];

#[derive(Debug, Clone, Serialize)]
pub struct Member {
    pub epsilon: f64,
    pub spacing: f64,
    pub cells: Vec<usize>,
    pub dir: String,
    /// `None` when the run failed; `error` then says why.
    pub report: Option<RunReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trend {
    pub metric: String,
    /// Values in member order (ε as listed); `None` where missing.
    pub values: Vec<Option<f64>>,
    /// Strictly decreasing as ε decreases, over all members.
    pub monotone_decreasing: Option<bool>,
    /// Least-squares slope of log(metric) against log(ε).
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LogFit {
    pub metric: String,
    /// y ≈ C/|log ε| in the least-squares sense.
    pub c: f64,
    /// max |y − C/|log ε|| / y over members.
    pub max_rel_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub name: String,
    pub epsilon_list: Vec<f64>,
    pub members: Vec<Member>,
    pub trends: Vec<Trend>,
    pub log_fits: Vec<LogFit>,
}

impl ConvergenceReport {
    pub fn trend(&self, metric: &str) -> Option<&Trend> {
        self.trends.iter().find(|t| t.metric == metric)
    }

    pub fn log_fit(&self, metric: &str) -> Option<&LogFit> {
        self.log_fits.iter().find(|t| t.metric == metric)
    }
}

fn fmt_eps(e: f64) -> String {
    format!("{e}").replace('.', "p")
}

/// Scenario for one ε of the list: h follows ε when the config only fixed
/// the extent, otherwise the grid is shared.
pub fn member_scenario(s: &Scenario, index: usize, epsilon: f64, dir: &Path) -> Scenario {
    let mut m = s.clone();
    m.name = format!("{}_eps{}", s.name, fmt_eps(epsilon));
    m.model.epsilon = epsilon;
    m.model.epsilon_list.clear();
    if s.grid.per_epsilon {
        let h = epsilon / s.solver.points_per_width;
        m.grid.cells = (0..s.grid.dim)
            .map(|a| (s.grid.extent(a) / h).round() as usize)
            .collect();
        m.grid.spacing = h;
    }
    m.output.dir = dir
        .join(format!("{index:02}_eps{}", fmt_eps(epsilon)))
        .to_string_lossy()
        .into_owned();
    m
}

/// Slope of the least-squares line through (log x, log y).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// True when the values strictly decrease as ε decreases.
pub fn decreasing_with_epsilon(eps: &[f64], vals: &[f64]) -> bool {
    let mut pairs: Vec<(f64, f64)> = eps.iter().copied().zip(vals.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.windows(2).all(|w| w[1].1 < w[0].1)
}

/// Least-squares C in y = C/|log ε| and the worst relative residual.
pub fn fit_inverse_log(eps: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if eps.len() < 2 || eps.len() != y.len() {
        return None;
    }
    let x: Vec<f64> = eps.iter().map(|e| 1.0 / e.ln().abs()).collect();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let c = sxy / sxx;
    let worst = x
        .iter()
        .zip(y)
        .map(|(a, b)| ((b - c * a) / b).abs())
        .fold(0.0_f64, f64::max);
    Some((c, worst))
}

pub fn analyse(name: &str, epsilons: &[f64], members: Vec<Member>) -> ConvergenceReport {
    let mut trends = Vec::new();
    let mut log_fits = Vec::new();
    for &metric in TREND_METRICS {
        let values: Vec<Option<f64>> = members
            .iter()
            .map(|m| m.report.as_ref().and_then(|r| r.metric(metric)))
            .collect();
        if values.iter().all(Option::is_none) {
            continue;
        }
        let complete = values.iter().all(Option::is_some);
        let vals: Vec<f64> = values.iter().flatten().copied().collect();
        let eps: Vec<f64> = epsilons
            .iter()
            .zip(&values)
            .filter(|(_, v)| v.is_some())
            .map(|(e, _)| *e)
            .collect();
        trends.push(Trend {
            metric: metric.to_string(),
            monotone_decreasing: complete.then(|| decreasing_with_epsilon(&eps, &vals)),
            order: loglog_slope(&eps, &vals),
            values,
        });
        if complete && LOG_FIT_METRICS.contains(&metric) {
            if let Some((c, r)) = fit_inverse_log(&eps, &vals) {
                log_fits.push(LogFit {
                    metric: metric.to_string(),
                    c,
                    max_rel_residual: r,
                });
            }
        }
    }
    ConvergenceReport {
        name: name.to_string(),
        epsilon_list: epsilons.to_vec(),
        members,
        trends,
        log_fits,
    }
}

/// Runs every member (failures are recorded, not fatal) and writes
/// summary.csv, report.txt and report.json into the study directory.
pub fn convergence_study(s: &Scenario, opts: &RunOptions) -> Result<ConvergenceReport, LabError> {
    if s.model.epsilon_list.len() < 3 {
        return Err(LabError::Config(
            "convergence mode needs model.epsilon_list with at least 3 values".into(),
        ));
    }
    let dir = PathBuf::from(&s.output.dir);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("resolved.cfg"), crate::config::resolved_text(s))?;
    let mut members = Vec::new();
    for (i, &eps) in s.model.epsilon_list.iter().enumerate() {
        let m = member_scenario(s, i, eps, &dir);
        let (report, error) = match crate::config::validate(&m).and_then(|_| run_scenario(&m, opts))
        {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        if !opts.quiet {
            eprintln!(
                "[{}] member eps = {eps}: {}",
                s.name,
                error.as_deref().unwrap_or("ok")
            );
        }
        members.push(Member {
            epsilon: eps,
            spacing: m.grid.spacing,
            cells: m.grid.cells.clone(),
            dir: m.output.dir,
            report,
            error,
        });
    }
    let report = analyse(&s.name, &s.model.epsilon_list, members);
    write_outputs(&dir, &report)?;
    Ok(report)
}

fn write_outputs(dir: &Path, r: &ConvergenceReport) -> Result<(), LabError> {
    let mut csv = String::from("epsilon,spacing,cells,status,steps");
    for m in TREND_METRICS {
        let _ = write!(csv, ",{m}");
    }
    csv.push('\n');
    for m in &r.members {
        let cells = m
            .cells
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("x");
        let (status, steps) = match &m.report {
            Some(rep) => (
                serde_json::to_value(rep.status)?
                    .as_str()
                    .unwrap_or("")
                    .to_string(),
                rep.steps.to_string(),
            ),
            None => ("failed".to_string(), String::new()),
        };
        let _ = write!(csv, "{},{},{cells},{status},{steps}", m.epsilon, m.spacing);
        for k in TREND_METRICS {
            let v = m
                .report
                .as_ref()
                .and_then(|rep| rep.metric(k))
                .map(|v| v.to_string())
                .unwrap_or_default();
            let _ = write!(csv, ",{v}");
        }
        csv.push('\n');
    }
    std::fs::write(dir.join("summary.csv"), csv)?;

    let mut txt = format!(
        "convergence study `{}` over epsilon = {:?}\n\n",
        r.name, r.epsilon_list
    );
    for m in &r.members {
        let _ = writeln!(
            txt,
            "  eps = {:<8} h = {:<12.6e} cells = {:?}  {}",
            m.epsilon,
            m.spacing,
            m.cells,
            m.error.as_deref().unwrap_or("ok")
        );
    }
    txt.push('\n');
    for t in &r.trends {
        let vals: Vec<String> = t
            .values
            .iter()
            .map(|v| v.map(|x| format!("{x:.4e}")).unwrap_or("-".into()))
            .collect();
        let mono = match t.monotone_decreasing {
            Some(true) => "decreasing",
            Some(false) => "NOT monotone",
            None => "incomplete",
        };
        let order = t.order.map(|o| format!("{o:.3}")).unwrap_or("-".into());
        let _ = writeln!(
            txt,
            "  {:<24} [{}]  {mono}, order in eps {order}",
            t.metric,
            vals.join(", ")
        );
    }
    for f in &r.log_fits {
        let _ = writeln!(
            txt,
            "  {:<24} ~ {:.4}/|log eps|, worst relative residual {:.1}%",
            f.metric,
            f.c,
            100.0 * f.max_rel_residual
        );
    }
    std::fs::write(dir.join("report.txt"), txt)?;
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(r)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let x = [0.08, 0.04, 0.02];
        let y: Vec<f64> = x.iter().map(|e: &f64| 3.0 * e.powi(2)).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monotonicity_is_measured_in_epsilon_order() {
        assert!(decreasing_with_epsilon(
            &[0.02, 0.08, 0.04],
            &[1.0, 3.0, 2.0]
        ));
        assert!(!decreasing_with_epsilon(
            &[0.08, 0.04, 0.02],
            &[3.0, 1.0, 2.0]
        ));
    }

    #[test]
    fn inverse_log_fit_is_exact_on_its_model() {
        let eps = [0.08, 0.04, 0.02];
        let y: Vec<f64> = eps.iter().map(|e: &f64| 0.7 / e.ln().abs()).collect();
        let (c, r) = fit_inverse_log(&eps, &y).unwrap();
        assert!((c - 0.7).abs() < 1e-12 && r < 1e-12);
    }
}
