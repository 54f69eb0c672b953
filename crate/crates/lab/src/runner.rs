//! Drives one scenario: integrator loop, observers, artifacts, checkpoints.
//!
//! Observations at step m happen before the step to m + 1, and a checkpoint
//! taken at step m is written before step m is observed, so a resumed run
//! replays exactly the rows an uninterrupted run would write.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use kinklab_core::diagnostics::{
    default_test_family, densities, divergence_residual, equipartition_ratio,
    equipartition_ratio_in_ball, estimate_velocities, hausdorff_to_circle, hausdorff_to_polylines,
    interface_extract, projection_report, stress_energy, InterfaceSet, StationarityAccumulator,
};
use kinklab_core::exact::{
    kink_pair_state, kink_state, pulsating_radius, rotating_wave_state, PulsatingSphereSpec,
};
use kinklab_core::field::FieldState;
use kinklab_core::minimal::{front_track_step, FrontCurve, GraphSolver, GraphState};
use kinklab_core::solver::{stable_dt, Leapfrog, SolverConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::checkpoint;
use crate::config::{resolved_text, Initial, Reference, Scenario};
use crate::error::LabError;
use crate::scenario::{self, planar_wave_fronts, planar_wave_offset, ripple_modes};
use crate::snapshot;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Stop (with a checkpoint) after this many steps in total.
    pub max_steps: Option<u64>,
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Completed,
    /// Halted by a step cap before t_end; a checkpoint was written.
    Stopped,
    Diverged,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: String,
    pub status: Status,
    pub steps: u64,
    pub final_time: f64,
    pub dt: f64,
    pub epsilon: f64,
    pub spacing: f64,
    pub wall_seconds: f64,
    pub metrics: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }
}

pub(crate) const ENERGY_CSV: &str = "energy.csv";
pub(crate) const INTERFACE_CSV: &str = "interface.csv";
pub(crate) const REFERENCE_CSV: &str = "reference.csv";
pub(crate) const PROJECTION_JSONL: &str = "projection.jsonl";
pub(crate) const TABLES: [&str; 4] = [ENERGY_CSV, INTERFACE_CSV, REFERENCE_CSV, PROJECTION_JSONL];

const ENERGY_HEADER: &str =
    "step,t,energy,lagrangian,potential,drift,equipartition,ball_ratio,identity_err,div_max,div_l2";
const INTERFACE_HEADER: &str = "step,t,index,x,y,z,vx,vy,vz,winding";

/// Comparison target advanced lazily alongside the run. Front and graph
/// references are replayed from t = 0, so they need no checkpoint state.
enum Tracker {
    None,
    Radial {
        center: Vec<f64>,
        spec: PulsatingSphereSpec<f64>,
    },
    Front {
        curve: FrontCurve<f64>,
        dt: f64,
    },
    Graph {
        solver: GraphSolver<f64>,
        dt: f64,
        fronts: [f64; 2],
        y0: f64,
    },
    Exact,
}

fn front_curve(s: &Scenario) -> FrontCurve<f64> {
    let m = 512;
    match &s.initial {
        Initial::Circle { r0, center } => FrontCurve::circle([center[0], center[1]], *r0, 0.0, m),
        Initial::Ellipse { a, b, center } => FrontCurve::ellipse([center[0], center[1]], *a, *b, m),
        Initial::Ripple {
            r0,
            amplitude,
            wavelength,
            ..
        } => {
            let modes = ripple_modes(*r0, *wavelength);
            let m = m.max(16 * modes);
            FrontCurve::from_param(m, 0.0, |th| {
                let r = kinklab_core::exact::ripple_radius(*r0, *amplitude, modes, th);
                [r * th.cos(), r * th.sin()]
            })
        }
        _ => unreachable!("validated"),
    }
}

impl Tracker {
    fn new(s: &Scenario, dt: f64) -> Result<Self, LabError> {
        Ok(match s.reference {
            Reference::None => Tracker::None,
            Reference::Exact => Tracker::Exact,
            Reference::Radial => {
                let (r0, center) = match &s.initial {
                    Initial::Circle { r0, center } => (*r0, center.clone()),
                    Initial::Ripple { r0, .. } => (*r0, vec![0.0; s.grid.dim]),
                    _ => unreachable!("validated"),
                };
                let spec = PulsatingSphereSpec::new(r0, s.grid.dim)
                    .map_err(|e| LabError::Config(e.to_string()))?;
                Tracker::Radial { center, spec }
            }
            Reference::Front => Tracker::Front {
                curve: front_curve(s),
                dt,
            },
            Reference::Graph => {
                let Initial::PlanarWave { amplitude } = s.initial else {
                    unreachable!("validated")
                };
                let ly = s.grid.extent(1);
                let cells = s.grid.cells[1];
                let k = std::f64::consts::TAU / ly;
                let state = GraphState::from_fn(
                    cells,
                    ly,
                    0.0,
                    |y| planar_wave_offset(amplitude, ly, 0.0, y),
                    |y| -amplitude * k * (k * y).cos(),
                );
                let solver =
                    GraphSolver::new(&state, dt).map_err(|e| LabError::Config(e.to_string()))?;
                Tracker::Graph {
                    solver,
                    dt,
                    fronts: planar_wave_fronts(&s.grid),
                    y0: s.grid.origin[1],
                }
            }
        })
    }
}

struct Outputs {
    energy: BufWriter<File>,
    interface: BufWriter<File>,
    reference: BufWriter<File>,
    projection: BufWriter<File>,
}

fn open_append(path: &Path) -> Result<BufWriter<File>, LabError> {
    Ok(BufWriter::new(
        OpenOptions::new().create(true).append(true).open(path)?,
    ))
}

impl Outputs {
    fn open(dir: &Path) -> Result<Self, LabError> {
        Ok(Self {
            energy: open_append(&dir.join(ENERGY_CSV))?,
            interface: open_append(&dir.join(INTERFACE_CSV))?,
            reference: open_append(&dir.join(REFERENCE_CSV))?,
            projection: open_append(&dir.join(PROJECTION_JSONL))?,
        })
    }

    fn flush(&mut self) -> Result<(), LabError> {
        self.energy.flush()?;
        self.interface.flush()?;
        self.reference.flush()?;
        self.projection.flush()?;
        Ok(())
    }
}

/// Everything a checkpoint must carry besides the two field levels.
#[derive(Debug, Clone)]
pub(crate) struct Progress {
    pub e0: f64,
    /// Start of the stationarity time window.
    pub t_start: f64,
    pub metrics: BTreeMap<String, f64>,
    pub stationarity: Option<StationarityAccumulator<f64>>,
}

pub(crate) struct Runner {
    pub scenario: Scenario,
    pub dir: PathBuf,
    pub integ: Leapfrog<f64>,
    pub progress: Progress,
    target: u64,
    tracker: Tracker,
    out: Outputs,
    resumed_at: Option<u64>,
    clock: Instant,
    quiet: bool,
}

fn max_into(m: &mut BTreeMap<String, f64>, key: &str, v: f64) {
    if v.is_nan() {
        return;
    }
    let e = m.entry(key.to_string()).or_insert(v);
    if v > *e {
        *e = v;
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn solver_config(s: &Scenario) -> SolverConfig<f64> {
    let mut c = SolverConfig::new(s.solver.t_end);
    c.cfl_fraction = s.solver.cfl_fraction;
    c.points_per_width = s.solver.points_per_width;
    c
}

pub fn config_hash(s: &Scenario) -> String {
    let mut h = Sha256::new();
    h.update(resolved_text(s).as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs a scenario from its initial data into `scenario.output.dir`.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<RunReport, LabError> {
    let dir = PathBuf::from(&s.output.dir);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("resolved.cfg"), resolved_text(s))?;
    let state0 = scenario::initial_state(s)?;
    let cfg = solver_config(s);
    cfg.validate(&state0.grid, state0.epsilon)
        .map_err(|e| LabError::Config(e.to_string()))?;
    let dt = stable_dt(&state0.grid, cfg.cfl_fraction);
    let integ = Leapfrog::new(&state0, dt).map_err(|e| LabError::Config(e.to_string()))?;
    for (name, header) in [
        (ENERGY_CSV, Some(ENERGY_HEADER)),
        (INTERFACE_CSV, Some(INTERFACE_HEADER)),
        (REFERENCE_CSV, reference_header(s)),
        (PROJECTION_JSONL, None),
    ] {
        let mut f = File::create(dir.join(name))?;
        if let Some(h) = header {
            writeln!(f, "{h}")?;
        }
    }
    let stationarity = s.output.stationarity.then(|| {
        let fam = default_test_family(
            &state0.grid,
            (state0.time, s.solver.t_end),
            s.output.stationarity_lattice,
        );
        StationarityAccumulator::new(fam, s.output.theta)
    });
    let e0 = densities(&state0).total_e();
    let progress = Progress {
        e0,
        t_start: state0.time,
        metrics: BTreeMap::new(),
        stationarity,
    };
    let mut r = Runner::new(s.clone(), dir, integ, progress, None, opts)?;
    r.go(opts)
}

fn reference_header(s: &Scenario) -> Option<&'static str> {
    Some(match (s.reference, &s.initial) {
        (Reference::None, _) => return None,
        (Reference::Radial, Initial::Ripple { .. }) => {
            "step,t,r_ref,mean_radius,mean_deviation,hausdorff"
        }
        (Reference::Radial, _) => "step,t,r_ref,mean_radius,hausdorff",
        (Reference::Front, _) => "step,t,front_mean_radius,mean_radius,hausdorff",
        (Reference::Graph, _) => "step,t,graph_energy,hausdorff",
        (Reference::Exact, _) => "step,t,linf,interface_error",
    })
}

impl Runner {
    pub(crate) fn new(
        scenario: Scenario,
        dir: PathBuf,
        integ: Leapfrog<f64>,
        progress: Progress,
        resumed_at: Option<u64>,
        opts: &RunOptions,
    ) -> Result<Self, LabError> {
        let cfg = solver_config(&scenario);
        let tracker = Tracker::new(&scenario, integ.dt())?;
        let t_steps = SolverConfig {
            t_end: scenario.solver.t_end - integ.t0(),
            ..cfg
        }
        .steps_for(integ.dt());
        let target = t_steps.min(scenario.solver.max_steps.unwrap_or(u64::MAX));
        let out = Outputs::open(&dir)?;
        Ok(Self {
            scenario,
            dir,
            integ,
            progress,
            target,
            tracker,
            out,
            resumed_at,
            clock: Instant::now(),
            quiet: opts.quiet,
        })
    }

    pub(crate) fn go(&mut self, opts: &RunOptions) -> Result<RunReport, LabError> {
        let cap = opts.max_steps.unwrap_or(u64::MAX);
        let ce = self.scenario.output.checkpoint_every;
        loop {
            let step = self.integ.steps();
            let at_end = step >= self.target;
            let capped = !at_end && step >= cap;
            let fresh = self.resumed_at != Some(step);
            if fresh && step > 0 && !at_end && (capped || (ce > 0 && step.is_multiple_of(ce))) {
                self.out.flush()?;
                checkpoint::write(self)?;
            }
            if capped {
                return self.finish(Status::Stopped);
            }
            self.observe(step, at_end)?;
            if at_end {
                return self.finish(Status::Completed);
            }
            if !self.integ.step() {
                self.out.flush()?;
                let report = self.finish(Status::Diverged)?;
                return Err(LabError::Diverged {
                    step: report.steps,
                    time: report.final_time,
                });
            }
            if !self.quiet && self.integ.steps().is_multiple_of(1000) {
                eprintln!(
                    "[{}] step {} / {}",
                    self.scenario.name,
                    self.integ.steps(),
                    self.target
                );
            }
        }
    }

    fn due(every: u64, step: u64, at_end: bool) -> bool {
        every > 0 && (at_end || step.is_multiple_of(every))
    }

    fn observe(&mut self, step: u64, at_end: bool) -> Result<(), LabError> {
        let o = self.scenario.output.clone();
        let energy = Self::due(o.energy_every, step, at_end);
        let iface = Self::due(o.interface_every, step, at_end);
        let reference = self.scenario.reference != Reference::None
            && if o.interface_every > 0 { iface } else { energy };
        let projection = Self::due(o.projection_every, step, at_end);
        let snap_due = Self::due(o.snapshot_every, step, at_end);
        if !(energy || iface || reference || projection || snap_due || at_end) {
            return Ok(());
        }
        let state = self.integ.snapshot();
        if energy {
            self.energy_row(step, &state)?;
            if let Some(acc) = &mut self.progress.stationarity {
                acc.push(&state)
                    .map_err(|e| LabError::Config(e.to_string()))?;
            }
        }
        let set = if iface || reference || projection {
            self.interface(&state)
        } else {
            None
        };
        if iface {
            if let Some(set) = &set {
                for (i, p) in set.points.iter().enumerate() {
                    let v = set.velocities.get(i).copied().unwrap_or([f64::NAN; 3]);
                    let w = set
                        .windings
                        .get(i)
                        .map(|w| w.to_string())
                        .unwrap_or_default();
                    writeln!(
                        self.out.interface,
                        "{step},{},{i},{},{},{},{},{},{},{w}",
                        state.time, p[0], p[1], p[2], v[0], v[1], v[2]
                    )?;
                }
            }
        }
        if reference {
            self.reference_row(step, &state, set.as_ref())?;
        }
        if projection {
            if let Some(set) = &set {
                self.projection_row(step, &state, set)?;
            }
        }
        if snap_due {
            snapshot::save(&self.dir.join(format!("snap_{step:08}.hglw")), &state)?;
        }
        if at_end {
            snapshot::save(&self.dir.join("final.hglw"), &state)?;
        }
        Ok(())
    }

    fn energy_row(&mut self, step: u64, state: &FieldState<f64>) -> Result<(), LabError> {
        let o = &self.scenario.output;
        let d = densities(state);
        let (e, l, w) = (d.total_e(), d.total_l(), d.total_w());
        let e0 = self.progress.e0;
        let drift = if e0 != 0.0 {
            ((e - e0) / e0).abs()
        } else {
            e.abs()
        };
        let equi = equipartition_ratio(&d, o.theta).ok();
        let ball = if o.ball_radius > 0.0 {
            let g = &state.grid;
            let c: Vec<f64> = (0..g.dim())
                .map(|a| g.origin()[a] + 0.5 * g.extent(a))
                .collect();
            equipartition_ratio_in_ball(&d, g, &c, o.ball_radius).ok()
        } else {
            None
        };
        let tens = stress_energy(state);
        let n = state.grid.dim() as f64;
        let ident = (0..d.e.len()).fold(0.0_f64, |m, i| {
            let t = &tens.tensors[i];
            let a = (d.e[i] + t.get(0, 0)).abs();
            let b = (t.eta_trace() - (2.0 * d.w[i] + (n - 1.0) * d.l[i])).abs();
            m.max(a).max(b)
        });
        let (div_max, div_l2) = if o.divergence {
            let mut fwd = self.integ.clone();
            fwd.step();
            let mut back = self.integ.clone();
            back.reverse();
            back.step();
            let window = [back.snapshot(), state.clone(), fwd.snapshot()];
            match divergence_residual(&window, self.integ.dt()) {
                Ok(r) => (Some(r.max), Some(r.l2)),
                Err(_) => (None, None),
            }
        } else {
            (None, None)
        };
        writeln!(
            self.out.energy,
            "{step},{},{e},{l},{w},{drift},{},{},{ident},{},{}",
            state.time,
            opt(equi),
            opt(ball),
            opt(div_max),
            opt(div_l2)
        )?;
        let m = &mut self.progress.metrics;
        max_into(m, "max_drift", drift);
        max_into(m, "max_identity_err", ident);
        if let Some(v) = div_max {
            max_into(m, "max_divergence", v);
        }
        m.insert("energy_final".into(), e);
        m.insert("lagrangian_final".into(), l);
        m.insert("potential_final".into(), w);
        if let Some(v) = equi {
            m.insert("equipartition_final".into(), v);
        }
        if let Some(v) = ball {
            m.insert("ball_ratio_final".into(), v);
        }
        Ok(())
    }

    /// Interface at the current level, with velocities against the
    /// previous level.
    fn interface(&self, state: &FieldState<f64>) -> Option<InterfaceSet<f64>> {
        let mut curr = interface_extract(state).ok()?;
        let prev_state = FieldState {
            u: self.integ.previous().to_vec(),
            time: state.time - self.integ.dt(),
            ..state.clone()
        };
        if let Ok(prev) = interface_extract(&prev_state) {
            estimate_velocities(&prev, &mut curr, self.integ.dt());
        }
        Some(curr)
    }

    fn reference_row(
        &mut self,
        step: u64,
        state: &FieldState<f64>,
        set: Option<&InterfaceSet<f64>>,
    ) -> Result<(), LabError> {
        let t = state.time;
        let dim = state.grid.dim();
        let line = match &mut self.tracker {
            Tracker::None => return Ok(()),
            Tracker::Exact => {
                let exact = match &self.scenario.initial {
                    Initial::Kink { .. } => kink_state(
                        &state.grid,
                        &scenario::kink_spec(&self.scenario).unwrap(),
                        t,
                    )
                    .ok(),
                    Initial::KinkPair { position, speed } => {
                        kink_pair_state(&state.grid, *position, *speed, state.epsilon, t).ok()
                    }
                    Initial::RotatingWave { .. } => rotating_wave_state(
                        &state.grid,
                        &scenario::rotating_spec(&self.scenario).unwrap(),
                        t,
                    )
                    .ok(),
                    _ => None,
                };
                let linf = exact.map(|ex| {
                    ex.u.iter().zip(&state.u).fold(0.0_f64, |m, (a, b)| {
                        a.iter().zip(b).fold(m, |m, (x, y)| m.max((x - y).abs()))
                    })
                });
                let iface = match (&self.scenario.initial, set) {
                    (
                        Initial::Kink {
                            direction,
                            speed,
                            offset,
                        },
                        Some(set),
                    ) if !set.is_empty() => Some(set.points.iter().fold(0.0_f64, |m, p| {
                        let proj: f64 = (0..dim).map(|a| p[a] * direction[a]).sum();
                        m.max((proj - offset - speed * t).abs())
                    })),
                    _ => None,
                };
                if let Some(v) = linf {
                    max_into(&mut self.progress.metrics, "max_field_error", v);
                }
                if let Some(v) = iface {
                    max_into(&mut self.progress.metrics, "max_interface_error", v);
                }
                format!("{step},{t},{},{}", opt(linf), opt(iface))
            }
            Tracker::Radial { center, spec } => {
                let r_ref = pulsating_radius(spec, t).ok().map(|r| r.0);
                let mean = set.and_then(|s| mean_radius(s, center));
                let haus = match (r_ref, set) {
                    (Some(r), Some(s)) if !s.is_empty() => Some(if dim == 2 {
                        hausdorff_to_circle(s, [center[0], center[1]], r)
                    } else {
                        radial_deviation(s, center, r)
                    }),
                    _ => None,
                };
                let m = &mut self.progress.metrics;
                if let Some(h) = haus {
                    max_into(m, "max_hausdorff", h);
                    m.insert("final_hausdorff".into(), h);
                }
                if matches!(self.scenario.initial, Initial::Ripple { .. }) {
                    let dev = match (mean, r_ref) {
                        (Some(a), Some(b)) => Some(a - b),
                        _ => None,
                    };
                    if let Some(d) = dev {
                        max_into(m, "max_abs_mean_deviation", d.abs());
                        m.insert("mean_deviation_final".into(), d);
                    }
                    format!(
                        "{step},{t},{},{},{},{}",
                        opt(r_ref),
                        opt(mean),
                        opt(dev),
                        opt(haus)
                    )
                } else {
                    format!("{step},{t},{},{},{}", opt(r_ref), opt(mean), opt(haus))
                }
            }
            Tracker::Front { curve, dt } => {
                let mut alive = true;
                while curve.t < t - *dt / 2.0 {
                    match front_track_step(curve, *dt) {
                        Ok(next) => *curve = next,
                        Err(_) => {
                            alive = false;
                            break;
                        }
                    }
                }
                let front = alive.then(|| {
                    vec![curve
                        .vertices
                        .iter()
                        .map(|v| [v[0], v[1], 0.0])
                        .collect::<Vec<_>>()]
                });
                let c = curve.centroid();
                let mean = set.and_then(|s| mean_radius(s, &c));
                let haus = match (&front, set) {
                    (Some(f), Some(s)) if !s.is_empty() => Some(hausdorff_to_polylines(s, f, true)),
                    _ => None,
                };
                if let Some(h) = haus {
                    max_into(&mut self.progress.metrics, "max_hausdorff", h);
                    self.progress.metrics.insert("final_hausdorff".into(), h);
                }
                let fr = alive.then(|| curve.mean_radius());
                format!("{step},{t},{},{},{}", opt(fr), opt(mean), opt(haus))
            }
            Tracker::Graph {
                solver,
                dt,
                fronts,
                y0,
            } => {
                let mut ok = true;
                while solver.time() < t - *dt / 2.0 {
                    if solver.step().is_err() {
                        ok = false;
                        break;
                    }
                }
                let g = solver.state();
                let haus = match set {
                    Some(s) if ok && !s.is_empty() => {
                        let lines: Vec<Vec<[f64; 3]>> = fronts
                            .iter()
                            .map(|&c| {
                                let mut line: Vec<[f64; 3]> = (0..g.p.len())
                                    .map(|i| [c + g.h(i), *y0 + g.y(i), 0.0])
                                    .collect();
                                // close the periodic graph
                                line.push([c + g.h(0), *y0 + g.length, 0.0]);
                                line
                            })
                            .collect();
                        Some(hausdorff_to_polylines(s, &lines, false))
                    }
                    _ => None,
                };
                if let Some(h) = haus {
                    max_into(&mut self.progress.metrics, "max_hausdorff", h);
                }
                format!(
                    "{step},{t},{},{}",
                    if ok {
                        g.energy().to_string()
                    } else {
                        String::new()
                    },
                    opt(haus)
                )
            }
        };
        writeln!(self.out.reference, "{line}")?;
        Ok(())
    }

    fn projection_row(
        &mut self,
        step: u64,
        state: &FieldState<f64>,
        set: &InterfaceSet<f64>,
    ) -> Result<(), LabError> {
        let g = &state.grid;
        let n = g.dim();
        let mid: Vec<f64> = (0..n).map(|a| g.origin()[a] + 0.5 * g.extent(a)).collect();
        let Some(p) = set
            .points
            .iter()
            .min_by(|a, b| dist(a, &mid, n).total_cmp(&dist(b, &mid, n)))
            .map(|p| p[..n].to_vec())
        else {
            return Ok(());
        };
        let rho = if self.scenario.output.projection_radius > 0.0 {
            self.scenario.output.projection_radius
        } else {
            6.0 * g.spacing()
        };
        let d = densities(state);
        let tens = stress_energy(state);
        let rec = match projection_report(&tens, &d, g, &p, rho) {
            Ok(r) => {
                let m = &mut self.progress.metrics;
                m.insert("projection_trace_final".into(), r.trace);
                m.insert("projection_lambda0_final".into(), r.lambda0);
                serde_json::json!({
                "step": step,
                "t": state.time,
                "point": p,
                "radius": rho,
                "eigenvalues": r.eigenvalues,
                "lambda0": r.lambda0,
                "zero_count": r.zero_count,
                "trace": r.trace,
                "spacelike_ok": r.spacelike_ok,
                "real_spectrum": r.real_spectrum,
                "tube_mass": r.tube_mass,
                })
            }
            Err(e) => {
                serde_json::json!({ "step": step, "t": state.time, "point": p, "error": e.to_string() })
            }
        };
        writeln!(self.out.projection, "{rec}")?;
        Ok(())
    }

    fn finish(&mut self, status: Status) -> Result<RunReport, LabError> {
        self.out.flush()?;
        let grid = self.integ.grid().clone();
        if status == Status::Completed {
            if let Some(acc) = &self.progress.stationarity {
                let mut f = BufWriter::new(File::create(self.dir.join("stationarity.csv"))?);
                writeln!(f, "field,direction,cx,cy,cz,radius,residual,tube_residual")?;
                match (acc.finish(&grid), acc.finish_tube(&grid)) {
                    (Ok(res), Ok(tube)) => {
                        for (i, ((tf, r), q)) in
                            acc.fields().iter().zip(&res).zip(&tube).enumerate()
                        {
                            writeln!(
                                f,
                                "{i},{},{},{},{},{},{r},{q}",
                                tf.direction, tf.center[0], tf.center[1], tf.center[2], tf.radius
                            )?;
                        }
                        let worst = |v: &[f64]| v.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
                        self.progress
                            .metrics
                            .insert("stationarity_max".into(), worst(&res));
                        self.progress
                            .metrics
                            .insert("stationarity_tube_max".into(), worst(&tube));
                    }
                    (Err(e), _) | (_, Err(e)) => writeln!(f, "# {e}")?,
                }
                f.flush()?;
            }
        }
        let report = RunReport {
            name: self.scenario.name.clone(),
            status,
            steps: self.integ.steps(),
            final_time: self.integ.time(),
            dt: self.integ.dt(),
            epsilon: self.scenario.model.epsilon,
            spacing: grid.spacing(),
            wall_seconds: self.clock.elapsed().as_secs_f64(),
            metrics: self.progress.metrics.clone(),
        };
        let manifest = serde_json::json!({
            "name": report.name,
            "config_sha256": config_hash(&self.scenario),
            "kinklab_version": env!("CARGO_PKG_VERSION"),
            "format": { "snapshot": "HGLW", "snapshot_version": snapshot::VERSION },
            "resumed_at_step": self.resumed_at,
            "status": report.status,
            "steps": report.steps,
            "final_time": report.final_time,
            "dt": report.dt,
            "spacing": report.spacing,
            "epsilon": report.epsilon,
            "wall_seconds": report.wall_seconds,
            "metrics": report.metrics,
        });
        std::fs::write(
            self.dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        Ok(report)
    }

    pub(crate) fn out_lengths(&self) -> Result<Vec<u64>, LabError> {
        TABLES
            .iter()
            .map(|name| Ok(std::fs::metadata(self.dir.join(name))?.len()))
            .collect()
    }
}

fn dist(p: &[f64; 3], q: &[f64], n: usize) -> f64 {
    (0..n).map(|a| (p[a] - q[a]).powi(2)).sum::<f64>().sqrt()
}

/// Length-weighted mean distance of a 2D polyline (or point mean otherwise)
/// from `center`.
fn mean_radius(set: &InterfaceSet<f64>, center: &[f64]) -> Option<f64> {
    if set.is_empty() {
        return None;
    }
    let n = set.dim;
    let r = |p: &[f64; 3]| dist(p, center, n);
    if n == 2 && !set.segments.is_empty() {
        let (mut num, mut den) = (0.0, 0.0);
        for &[a, b] in &set.segments {
            let (p, q) = (&set.points[a], &set.points[b]);
            let len = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            num += 0.5 * (r(p) + r(q)) * len;
            den += len;
        }
        if den > 0.0 {
            return Some(num / den);
        }
    }
    Some(set.points.iter().map(r).sum::<f64>() / set.len() as f64)
}

/// max |‖p − c‖ − r| over the interface points.
fn radial_deviation(set: &InterfaceSet<f64>, center: &[f64], r: f64) -> f64 {
    set.points
        .iter()
        .fold(0.0_f64, |m, p| m.max((dist(p, center, set.dim) - r).abs()))
}
