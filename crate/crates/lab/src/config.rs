//! Flat `key = value` scenario files.
//!
//! ```text
//! # comment
//! name = kink
//! model.k = 1
//! model.epsilon = 0.05
//! grid.dim = 1
//! grid.cells = 2048
//! grid.extent = 2.5
//! ```
//!
//! Keys are `section.field`; lists are comma separated; a scalar given for a
//! per-axis key is broadcast. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use kinklab_core::field::Boundary;

use crate::error::LabError;

/// Initial data of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Vacuum,
    /// Planar boosted kink u = q(γ(x·ν − vt − x₀)/ε).
    Kink {
        direction: Vec<f64>,
        speed: f64,
        offset: f64,
    },
    /// Kink/antikink pair on a periodic line.
    KinkPair {
        position: f64,
        speed: f64,
    },
    /// Two kinks across the graph x = ±L/4 + a·sin(2πy/L_y) travelling
    /// along y at light speed (the null planar wave).
    PlanarWave {
        amplitude: f64,
    },
    Circle {
        r0: f64,
        center: Vec<f64>,
    },
    Ellipse {
        a: f64,
        b: f64,
        center: Vec<f64>,
    },
    /// Circle of radius r0 with radius perturbed by a·sin(mθ), m = round(2πr0/λ).
    Ripple {
        r0: f64,
        amplitude: f64,
        wavelength: f64,
        wavelength_list: Vec<f64>,
    },
    Vortex {
        center: Vec<f64>,
        degree: i32,
        relax_time: f64,
        damping: f64,
    },
    VortexPair {
        separation: f64,
        relax_time: f64,
        damping: f64,
    },
    RotatingWave {
        omega: f64,
        planar: bool,
    },
    Snapshot {
        path: String,
    },
}

impl Initial {
    pub fn kind(&self) -> &'static str {
        match self {
            Initial::Vacuum => "vacuum",
            Initial::Kink { .. } => "kink",
            Initial::KinkPair { .. } => "kink_pair",
            Initial::PlanarWave { .. } => "planar_wave",
            Initial::Circle { .. } => "circle",
            Initial::Ellipse { .. } => "ellipse",
            Initial::Ripple { .. } => "ripple",
            Initial::Vortex { .. } => "vortex",
            Initial::VortexPair { .. } => "vortex_pair",
            Initial::RotatingWave { .. } => "rotating_wave",
            Initial::Snapshot { .. } => "snapshot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    None,
    /// Radial ODE for circles (and the unperturbed circle of a ripple).
    Radial,
    /// Front tracking of the initial curve.
    Front,
    /// Closed-form field (kinks, rotating waves).
    Exact,
    /// Minimal graph solver (planar wave).
    Graph,
}

impl Reference {
    fn name(self) -> &'static str {
        match self {
            Reference::None => "none",
            Reference::Radial => "radial",
            Reference::Front => "front",
            Reference::Exact => "exact",
            Reference::Graph => "graph",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub k: usize,
    pub epsilon: f64,
    /// Non-empty in convergence mode.
    pub epsilon_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub cells: Vec<usize>,
    pub spacing: f64,
    pub origin: Vec<f64>,
    pub boundary: Boundary,
    /// Spacing derived as ε/points_per_width because only `grid.extent` was
    /// given; convergence members then refine with their own ε.
    pub per_epsilon: bool,
}

impl GridSpec {
    pub fn extent(&self, axis: usize) -> f64 {
        self.cells[axis] as f64 * self.spacing
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSpec {
    pub cfl_fraction: f64,
    pub points_per_width: f64,
    pub t_end: f64,
    pub max_steps: Option<u64>,
}

/// Cadences are in steps; 0 disables an output.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: String,
    pub energy_every: u64,
    pub interface_every: u64,
    pub snapshot_every: u64,
    pub projection_every: u64,
    pub checkpoint_every: u64,
    /// Tube radius of projection reports; 0 means 6h.
    pub projection_radius: f64,
    /// Density threshold of the tube equipartition ratio.
    pub theta: f64,
    /// Radius of the ball equipartition ratio around the grid centre; 0 disables.
    pub ball_radius: f64,
    /// Accumulate the stationarity residual of the default test family.
    pub stationarity: bool,
    pub stationarity_lattice: usize,
    /// Add the ∂_βT^{αβ} residual to energy rows (two extra steps per row).
    pub divergence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub grid: GridSpec,
    pub solver: SolverSpec,
    pub initial: Initial,
    pub reference: Reference,
    pub output: OutputSpec,
}

const KEYS: &[&str] = &[
    "name",
    "model.k",
    "model.epsilon",
    "model.epsilon_list",
    "model.potential",
    "grid.dim",
    "grid.cells",
    "grid.spacing",
    "grid.extent",
    "grid.origin",
    "grid.boundary",
    "solver.cfl_fraction",
    "solver.points_per_width",
    "solver.t_end",
    "solver.max_steps",
    "initial.kind",
    "initial.direction",
    "initial.speed",
    "initial.offset",
    "initial.position",
    "initial.amplitude",
    "initial.r0",
    "initial.center",
    "initial.a",
    "initial.b",
    "initial.wavelength",
    "initial.wavelength_list",
    "initial.degree",
    "initial.separation",
    "initial.relax_time",
    "initial.damping",
    "initial.omega",
    "initial.base",
    "initial.path",
    "reference.kind",
    "output.dir",
    "output.energy_every",
    "output.interface_every",
    "output.snapshot_every",
    "output.projection_every",
    "output.checkpoint_every",
    "output.projection_radius",
    "output.theta",
    "output.ball_radius",
    "output.stationarity",
    "output.stationarity_lattice",
    "output.divergence",
];

/// Raw key/value table with line numbers, consumed key by key.
struct Table {
    entries: BTreeMap<String, (usize, String)>,
}

fn cfg_err(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

impl Table {
    fn parse(text: &str) -> Result<Self, LabError> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(cfg_err(format!("line {}: expected `key = value`", no + 1)));
            };
            let key = k.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(cfg_err(format!("line {}: unknown key `{key}`", no + 1)));
            }
            if entries
                .insert(key.clone(), (no + 1, v.trim().to_string()))
                .is_some()
            {
                return Err(cfg_err(format!("line {}: duplicate key `{key}`", no + 1)));
            }
        }
        Ok(Self { entries })
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, LabError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| cfg_err(format!("line {line}: cannot parse `{key} = {v}`"))),
        }
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, LabError> {
        let v: Option<f64> = self.parsed(key)?;
        match v {
            Some(x) if !x.is_finite() => Err(cfg_err(format!("`{key}` must be finite"))),
            other => Ok(other),
        }
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, LabError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<Vec<T>, _>>()
                .map(Some)
                .map_err(|_| cfg_err(format!("line {line}: cannot parse list `{key} = {v}`"))),
        }
    }

    fn req_f64(&self, key: &str) -> Result<f64, LabError> {
        self.f64(key)?
            .ok_or_else(|| cfg_err(format!("missing required key `{key}`")))
    }

    /// Per-axis list, broadcasting a single value.
    fn axes<T: std::str::FromStr + Clone>(
        &self,
        key: &str,
        dim: usize,
    ) -> Result<Option<Vec<T>>, LabError> {
        match self.list::<T>(key)? {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(vec![v[0].clone(); dim])),
            Some(v) if v.len() == dim => Ok(Some(v)),
            Some(v) => Err(cfg_err(format!(
                "`{key}` has {} entries, grid.dim is {dim}",
                v.len()
            ))),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<f64, LabError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(cfg_err(format!("`{key}` must be positive, got {v}")))
    }
}

pub fn parse_config(path: &Path) -> Result<Scenario, LabError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
    let mut s = parse_str(&text)?;
    // snapshot paths are relative to the config file
    if let Initial::Snapshot { path: p } = &mut s.initial {
        let candidate = Path::new(p.as_str());
        if candidate.is_relative() {
            if let Some(parent) = path.parent() {
                *p = parent.join(candidate).to_string_lossy().into_owned();
            }
        }
    }
    Ok(s)
}

pub fn parse_str(text: &str) -> Result<Scenario, LabError> {
    let t = Table::parse(text)?;
    let name = t
        .str("name")
        .ok_or_else(|| cfg_err("missing required key `name`"))?
        .to_string();
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(cfg_err(format!("invalid name `{name}`")));
    }

    if let Some(p) = t.str("model.potential") {
        if p != "quartic" {
            return Err(cfg_err(format!(
                "unsupported potential `{p}` (only `quartic`)"
            )));
        }
    }
    let k: usize = t.parsed("model.k")?.unwrap_or(1);
    if !(1..=2).contains(&k) {
        return Err(cfg_err(format!("model.k must be 1 or 2, got {k}")));
    }
    let epsilon_list = t.list::<f64>("model.epsilon_list")?.unwrap_or_default();
    let epsilon = match (
        t.f64("model.epsilon")?,
        epsilon_list.iter().cloned().reduce(f64::min),
    ) {
        (Some(e), _) => e,
        (None, Some(e)) => e,
        (None, None) => {
            return Err(cfg_err(
                "missing required key `model.epsilon` (or `model.epsilon_list`)",
            ))
        }
    };
    for &e in std::iter::once(&epsilon).chain(&epsilon_list) {
        if !(e > 0.0 && e < 1.0) {
            return Err(cfg_err(format!("epsilon {e} not in (0, 1)")));
        }
    }

    let dim: usize = t
        .parsed("grid.dim")?
        .ok_or_else(|| cfg_err("missing required key `grid.dim`"))?;
    if !(1..=3).contains(&dim) {
        return Err(cfg_err(format!("grid.dim must be 1, 2 or 3, got {dim}")));
    }
    let solver = SolverSpec {
        cfl_fraction: t.f64("solver.cfl_fraction")?.unwrap_or(0.5),
        points_per_width: t.f64("solver.points_per_width")?.unwrap_or(4.0),
        t_end: t.req_f64("solver.t_end")?,
        max_steps: t.parsed("solver.max_steps")?,
    };
    let boundary = match t.str("grid.boundary").unwrap_or("periodic") {
        "periodic" => Boundary::Periodic,
        "neumann" => Boundary::Neumann,
        other => return Err(cfg_err(format!("unknown boundary `{other}`"))),
    };
    let extent = t.axes::<f64>("grid.extent", dim)?;
    let mut cells = t.axes::<usize>("grid.cells", dim)?;
    let per_epsilon = t.str("grid.spacing").is_none() && cells.is_none() && extent.is_some();
    let spacing = match (t.f64("grid.spacing")?, &cells, &extent) {
        (Some(h), _, _) => positive("grid.spacing", h)?,
        (None, Some(c), Some(e)) => {
            let h = e[0] / c[0] as f64;
            for a in 1..dim {
                if ((e[a] / c[a] as f64) - h).abs() > 1e-12 * h {
                    return Err(cfg_err(
                        "grid spacing differs between axes (uniform grids only)",
                    ));
                }
            }
            h
        }
        // convergence mode: h follows each epsilon
        (None, None, Some(_)) => epsilon / solver.points_per_width,
        _ => {
            return Err(cfg_err(
                "grid needs `grid.spacing` or `grid.extent` with `grid.cells`",
            ))
        }
    };
    if cells.is_none() {
        let e = extent
            .as_ref()
            .ok_or_else(|| cfg_err("grid needs `grid.cells` or `grid.extent`"))?;
        cells = Some(e.iter().map(|x| (x / spacing).round() as usize).collect());
    }
    let cells = cells.unwrap();
    let origin = match t.axes::<f64>("grid.origin", dim)? {
        Some(o) => o,
        None => cells.iter().map(|&c| -0.5 * c as f64 * spacing).collect(),
    };
    let grid = GridSpec {
        dim,
        cells,
        spacing,
        origin,
        boundary,
        per_epsilon,
    };

    let initial = parse_initial(&t, dim, k)?;
    let reference = match t.str("reference.kind").unwrap_or("none") {
        "none" => Reference::None,
        "radial" => Reference::Radial,
        "front" => Reference::Front,
        "exact" => Reference::Exact,
        "graph" => Reference::Graph,
        other => return Err(cfg_err(format!("unknown reference kind `{other}`"))),
    };
    let output = OutputSpec {
        dir: t
            .str("output.dir")
            .map(str::to_string)
            .unwrap_or_else(|| format!("out/{name}")),
        energy_every: t.parsed("output.energy_every")?.unwrap_or(10),
        interface_every: t.parsed("output.interface_every")?.unwrap_or(0),
        snapshot_every: t.parsed("output.snapshot_every")?.unwrap_or(0),
        projection_every: t.parsed("output.projection_every")?.unwrap_or(0),
        checkpoint_every: t.parsed("output.checkpoint_every")?.unwrap_or(0),
        projection_radius: t.f64("output.projection_radius")?.unwrap_or(0.0),
        theta: t.f64("output.theta")?.unwrap_or(0.1),
        ball_radius: t.f64("output.ball_radius")?.unwrap_or(0.0),
        stationarity: t.parsed("output.stationarity")?.unwrap_or(false),
        stationarity_lattice: t.parsed("output.stationarity_lattice")?.unwrap_or(2),
        divergence: t.parsed("output.divergence")?.unwrap_or(true),
    };
    let s = Scenario {
        name,
        model: Model {
            k,
            epsilon,
            epsilon_list,
        },
        grid,
        solver,
        initial,
        reference,
        output,
    };
    validate(&s)?;
    Ok(s)
}

fn parse_initial(t: &Table, dim: usize, k: usize) -> Result<Initial, LabError> {
    let kind = t
        .str("initial.kind")
        .ok_or_else(|| cfg_err("missing required key `initial.kind`"))?;
    let center = |t: &Table| -> Result<Vec<f64>, LabError> {
        Ok(t.axes::<f64>("initial.center", dim)?
            .unwrap_or(vec![0.0; dim]))
    };
    let relax = |t: &Table| -> Result<(f64, f64), LabError> {
        Ok((
            t.f64("initial.relax_time")?.unwrap_or(0.0),
            t.f64("initial.damping")?.unwrap_or(10.0),
        ))
    };
    let init = match kind {
        "vacuum" => Initial::Vacuum,
        "kink" => {
            let mut direction = t.list::<f64>("initial.direction")?.unwrap_or_else(|| {
                let mut d = vec![0.0; dim];
                d[0] = 1.0;
                d
            });
            if direction.len() != dim {
                return Err(cfg_err("`initial.direction` must have grid.dim entries"));
            }
            let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(cfg_err("`initial.direction` must be nonzero"));
            }
            direction.iter_mut().for_each(|x| *x /= norm);
            Initial::Kink {
                direction,
                speed: t.f64("initial.speed")?.unwrap_or(0.0),
                offset: t.f64("initial.offset")?.unwrap_or(0.0),
            }
        }
        "kink_pair" => Initial::KinkPair {
            position: t.f64("initial.position")?.unwrap_or(0.0),
            speed: t.f64("initial.speed")?.unwrap_or(0.0),
        },
        "planar_wave" => Initial::PlanarWave {
            amplitude: t.req_f64("initial.amplitude")?,
        },
        "circle" => Initial::Circle {
            r0: positive("initial.r0", t.req_f64("initial.r0")?)?,
            center: center(t)?,
        },
        "ellipse" => Initial::Ellipse {
            a: positive("initial.a", t.req_f64("initial.a")?)?,
            b: positive("initial.b", t.req_f64("initial.b")?)?,
            center: center(t)?,
        },
        "ripple" => {
            let wavelength_list = t
                .list::<f64>("initial.wavelength_list")?
                .unwrap_or_default();
            let wavelength = match (
                t.f64("initial.wavelength")?,
                wavelength_list.iter().cloned().reduce(f64::max),
            ) {
                (Some(w), _) | (None, Some(w)) => w,
                (None, None) => {
                    return Err(cfg_err(
                        "ripple needs `initial.wavelength` or `initial.wavelength_list`",
                    ))
                }
            };
            Initial::Ripple {
                r0: positive("initial.r0", t.req_f64("initial.r0")?)?,
                amplitude: t.req_f64("initial.amplitude")?,
                wavelength,
                wavelength_list,
            }
        }
        "vortex" => {
            let (relax_time, damping) = relax(t)?;
            Initial::Vortex {
                center: center(t)?,
                degree: t.parsed("initial.degree")?.unwrap_or(1),
                relax_time,
                damping,
            }
        }
        "vortex_pair" => {
            let (relax_time, damping) = relax(t)?;
            Initial::VortexPair {
                separation: t.req_f64("initial.separation")?,
                relax_time,
                damping,
            }
        }
        "rotating_wave" => Initial::RotatingWave {
            omega: t.req_f64("initial.omega")?,
            planar: match t.str("initial.base").unwrap_or("vacuum") {
                "vacuum" => false,
                "planar" => true,
                other => return Err(cfg_err(format!("unknown rotating-wave base `{other}`"))),
            },
        },
        "snapshot" => Initial::Snapshot {
            path: t
                .str("initial.path")
                .ok_or_else(|| cfg_err("snapshot initial data needs `initial.path`"))?
                .to_string(),
        },
        other => return Err(cfg_err(format!("unknown initial kind `{other}`"))),
    };
    let needs_k = match &init {
        Initial::Vortex { .. } | Initial::VortexPair { .. } | Initial::RotatingWave { .. } => {
            Some(2)
        }
        Initial::Vacuum | Initial::Snapshot { .. } => None,
        _ => Some(1),
    };
    if let Some(need) = needs_k {
        if need != k {
            return Err(cfg_err(format!(
                "initial kind `{kind}` needs model.k = {need}"
            )));
        }
    }
    let needs_dim: &[usize] = match &init {
        Initial::KinkPair { .. } => &[1],
        Initial::Circle { .. } => &[2, 3],
        Initial::PlanarWave { .. }
        | Initial::Ellipse { .. }
        | Initial::Ripple { .. }
        | Initial::Vortex { .. }
        | Initial::VortexPair { .. } => &[2],
        _ => &[1, 2, 3],
    };
    if !needs_dim.contains(&dim) {
        return Err(cfg_err(format!(
            "initial kind `{kind}` needs grid.dim in {needs_dim:?}"
        )));
    }
    Ok(init)
}

/// Rules checked before any run.
pub fn validate(s: &Scenario) -> Result<(), LabError> {
    let g = &s.grid;
    if g.cells.iter().any(|&c| c < 8) {
        return Err(cfg_err("grid.cells must be at least 8 per axis"));
    }
    if !(s.solver.cfl_fraction > 0.0 && s.solver.cfl_fraction <= 1.0) {
        return Err(cfg_err(format!(
            "solver.cfl_fraction {} not in (0, 1]",
            s.solver.cfl_fraction
        )));
    }
    if s.solver.points_per_width < 4.0 {
        return Err(cfg_err(format!(
            "solver.points_per_width {} must be at least 4",
            s.solver.points_per_width
        )));
    }
    if !(s.solver.t_end >= 0.0) {
        return Err(cfg_err("solver.t_end must be non-negative"));
    }
    // resolution rule for every member epsilon
    let eps_min = s
        .model
        .epsilon_list
        .iter()
        .cloned()
        .fold(s.model.epsilon, f64::min);
    let limit = eps_min / s.solver.points_per_width;
    if g.spacing > limit * (1.0 + 1e-12) {
        return Err(cfg_err(format!(
            "resolution rule violated: h = {} > epsilon/points_per_width = {limit}",
            g.spacing
        )));
    }
    if !s.model.epsilon_list.is_empty() && s.model.epsilon_list.len() < 3 {
        return Err(cfg_err("model.epsilon_list needs at least 3 values"));
    }
    if let Initial::KinkPair { speed, .. } | Initial::Kink { speed, .. } = s.initial {
        if !(speed.abs() < 1.0) {
            return Err(cfg_err(format!("kink speed {speed} is not subluminal")));
        }
    }
    let single_kink = matches!(
        s.initial,
        Initial::Kink { .. } | Initial::RotatingWave { planar: true, .. }
    );
    if single_kink && g.boundary == Boundary::Periodic {
        return Err(cfg_err(
            "a single kink is not periodic; use grid.boundary = neumann",
        ));
    }
    if let Initial::KinkPair { .. } = s.initial {
        if g.boundary != Boundary::Periodic {
            return Err(cfg_err("kink_pair needs grid.boundary = periodic"));
        }
    }
    if let Initial::PlanarWave { amplitude } = s.initial {
        if g.boundary != Boundary::Periodic {
            return Err(cfg_err("planar_wave needs grid.boundary = periodic"));
        }
        if amplitude.abs() * std::f64::consts::TAU >= g.extent(1) {
            return Err(cfg_err(
                "planar_wave amplitude too large for a graph interface",
            ));
        }
    }
    if let Initial::Ripple {
        r0,
        amplitude,
        wavelength,
        ref wavelength_list,
    } = s.initial
    {
        for &lam in std::iter::once(&wavelength).chain(wavelength_list) {
            if !(amplitude.abs() < lam && lam < r0) {
                return Err(cfg_err(format!("ripple needs a < wavelength < r0 (a = {amplitude}, wavelength = {lam}, r0 = {r0})")));
            }
            // study members pick their own grid
            if wavelength_list.is_empty() && lam < 16.0 * g.spacing * (1.0 - 1e-12) {
                return Err(cfg_err(format!(
                    "ripple wavelength {lam} resolved by fewer than 16 cells"
                )));
            }
        }
    }
    if s.reference == Reference::Graph && !matches!(s.initial, Initial::PlanarWave { .. }) {
        return Err(cfg_err(
            "reference.kind = graph applies to planar_wave only",
        ));
    }
    if matches!(s.reference, Reference::Radial | Reference::Front)
        && !matches!(
            s.initial,
            Initial::Circle { .. } | Initial::Ellipse { .. } | Initial::Ripple { .. }
        )
    {
        return Err(cfg_err(
            "radial and front references apply to circle, ellipse and ripple data",
        ));
    }
    if s.reference == Reference::Radial && matches!(s.initial, Initial::Ellipse { .. }) {
        return Err(cfg_err(
            "an ellipse has no radial reference; use reference.kind = front",
        ));
    }
    if s.reference == Reference::Exact
        && !matches!(
            s.initial,
            Initial::Kink { .. } | Initial::KinkPair { .. } | Initial::RotatingWave { .. }
        )
    {
        return Err(cfg_err(
            "reference.kind = exact applies to kink, kink_pair and rotating_wave data",
        ));
    }
    light_cone_check(s)
}

/// Interface must stay ≥ 0.1·extent away from Neumann walls for t ≤ t_end,
/// assuming it may move at light speed.
fn light_cone_check(s: &Scenario) -> Result<(), LabError> {
    let g = &s.grid;
    if g.boundary != Boundary::Neumann {
        return Ok(());
    }
    let reach = s.solver.t_end;
    // (axis, lo, hi) bounds of the initial interface along constrained axes
    let mut boxes: Vec<(usize, f64, f64)> = Vec::new();
    match &s.initial {
        Initial::Kink {
            direction, offset, ..
        } => {
            // a planar front meets the transverse walls orthogonally, which
            // Neumann walls respect; only axis-aligned normals are checked
            if let Some(axis) = direction
                .iter()
                .position(|&d| (d.abs() - 1.0).abs() < 1e-12)
            {
                let x = offset * direction[axis];
                boxes.push((axis, x, x));
            }
        }
        Initial::Circle { r0, center } => {
            for (a, &c) in center.iter().enumerate() {
                boxes.push((a, c - r0, c + r0));
            }
        }
        Initial::Ellipse { a, b, center } => {
            boxes.push((0, center[0] - a, center[0] + a));
            boxes.push((1, center[1] - b, center[1] + b));
        }
        Initial::Ripple { r0, amplitude, .. } => {
            for a in 0..2 {
                boxes.push((a, -r0 - amplitude.abs(), r0 + amplitude.abs()));
            }
        }
        Initial::Vortex { center, .. } => {
            for (a, &c) in center.iter().enumerate() {
                boxes.push((a, c, c));
            }
        }
        Initial::VortexPair { separation, .. } => {
            boxes.push((0, -separation / 2.0, separation / 2.0))
        }
        _ => {}
    }
    for (axis, lo, hi) in boxes {
        let wall_lo = g.origin[axis];
        let wall_hi = wall_lo + g.extent(axis);
        let margin = 0.1 * g.extent(axis);
        if lo - reach < wall_lo + margin || hi + reach > wall_hi - margin {
            return Err(cfg_err(format!(
                "domain too small: interface within light-cone reach {reach} of the Neumann wall on axis {axis} \
                 (needs 10% of the extent clear)"
            )));
        }
    }
    Ok(())
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Fully resolved config text; parsing it yields the same scenario.
pub fn resolved_text(s: &Scenario) -> String {
    let mut o = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(o, "{k} = {v}");
    };
    kv("name", s.name.clone());
    kv("model.k", s.model.k.to_string());
    kv("model.epsilon", s.model.epsilon.to_string());
    if !s.model.epsilon_list.is_empty() {
        kv("model.epsilon_list", join(&s.model.epsilon_list));
    }
    kv("model.potential", "quartic".into());
    kv("grid.dim", s.grid.dim.to_string());
    if s.grid.per_epsilon {
        let ext: Vec<f64> = (0..s.grid.dim).map(|a| s.grid.extent(a)).collect();
        kv("grid.extent", join(&ext));
    } else {
        kv("grid.cells", join(&s.grid.cells));
        kv("grid.spacing", s.grid.spacing.to_string());
    }
    kv("grid.origin", join(&s.grid.origin));
    kv(
        "grid.boundary",
        if s.grid.boundary == Boundary::Periodic {
            "periodic"
        } else {
            "neumann"
        }
        .into(),
    );
    kv("solver.cfl_fraction", s.solver.cfl_fraction.to_string());
    kv(
        "solver.points_per_width",
        s.solver.points_per_width.to_string(),
    );
    kv("solver.t_end", s.solver.t_end.to_string());
    if let Some(m) = s.solver.max_steps {
        kv("solver.max_steps", m.to_string());
    }
    kv("initial.kind", s.initial.kind().into());
    match &s.initial {
        Initial::Vacuum => {}
        Initial::Kink {
            direction,
            speed,
            offset,
        } => {
            kv("initial.direction", join(direction));
            kv("initial.speed", speed.to_string());
            kv("initial.offset", offset.to_string());
        }
        Initial::KinkPair { position, speed } => {
            kv("initial.position", position.to_string());
            kv("initial.speed", speed.to_string());
        }
        Initial::PlanarWave { amplitude } => kv("initial.amplitude", amplitude.to_string()),
        Initial::Circle { r0, center } => {
            kv("initial.r0", r0.to_string());
            kv("initial.center", join(center));
        }
        Initial::Ellipse { a, b, center } => {
            kv("initial.a", a.to_string());
            kv("initial.b", b.to_string());
            kv("initial.center", join(center));
        }
        Initial::Ripple {
            r0,
            amplitude,
            wavelength,
            wavelength_list,
        } => {
            kv("initial.r0", r0.to_string());
            kv("initial.amplitude", amplitude.to_string());
            kv("initial.wavelength", wavelength.to_string());
            if !wavelength_list.is_empty() {
                kv("initial.wavelength_list", join(wavelength_list));
            }
        }
        Initial::Vortex {
            center,
            degree,
            relax_time,
            damping,
        } => {
            kv("initial.center", join(center));
            kv("initial.degree", degree.to_string());
            kv("initial.relax_time", relax_time.to_string());
            kv("initial.damping", damping.to_string());
        }
        Initial::VortexPair {
            separation,
            relax_time,
            damping,
        } => {
            kv("initial.separation", separation.to_string());
            kv("initial.relax_time", relax_time.to_string());
            kv("initial.damping", damping.to_string());
        }
        Initial::RotatingWave { omega, planar } => {
            kv("initial.omega", omega.to_string());
            kv(
                "initial.base",
                if *planar { "planar" } else { "vacuum" }.into(),
            );
        }
        Initial::Snapshot { path } => kv("initial.path", path.clone()),
    }
    kv("reference.kind", s.reference.name().into());
    let o2 = &s.output;
    kv("output.dir", o2.dir.clone());
    kv("output.energy_every", o2.energy_every.to_string());
    kv("output.interface_every", o2.interface_every.to_string());
    kv("output.snapshot_every", o2.snapshot_every.to_string());
    kv("output.projection_every", o2.projection_every.to_string());
    kv("output.checkpoint_every", o2.checkpoint_every.to_string());
    kv("output.projection_radius", o2.projection_radius.to_string());
    kv("output.theta", o2.theta.to_string());
    kv("output.ball_radius", o2.ball_radius.to_string());
    kv("output.stationarity", o2.stationarity.to_string());
    kv(
        "output.stationarity_lattice",
        o2.stationarity_lattice.to_string(),
    );
    kv("output.divergence", o2.divergence.to_string());
    o
}
