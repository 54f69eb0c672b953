//! Initial data and reference solutions for a parsed [`Scenario`].

use kinklab_core::exact::{
    kink_pair_state, kink_profile, kink_state, relax_damped, ripple_state, rotating_wave_state,
    sphere_state, vortex_ansatz_state, BaseProfile, KinkSpec, RotatingWaveSpec, VortexSeed,
};
use kinklab_core::field::{init_from_profile, FieldState, Grid};

use crate::config::{GridSpec, Initial, Scenario};
use crate::error::LabError;
use crate::snapshot;

pub fn build_grid(g: &GridSpec) -> Result<Grid<f64>, LabError> {
    Grid::new(&g.cells, &g.origin, g.spacing, g.boundary)
        .map_err(|e| LabError::Config(e.to_string()))
}

fn exact_err(e: impl std::fmt::Display) -> LabError {
    LabError::Config(e.to_string())
}

/// Number of ripple periods around the circle, m = round(2πr₀/λ).
pub fn ripple_modes(r0: f64, wavelength: f64) -> usize {
    ((std::f64::consts::TAU * r0 / wavelength).round() as usize).max(1)
}

pub fn kink_spec(s: &Scenario) -> Option<KinkSpec<f64>> {
    match &s.initial {
        Initial::Kink {
            direction,
            speed,
            offset,
        } => KinkSpec::new(direction.clone(), *speed, *offset, s.model.epsilon).ok(),
        _ => None,
    }
}

pub fn rotating_spec(s: &Scenario) -> Option<RotatingWaveSpec<f64>> {
    match s.initial {
        Initial::RotatingWave { omega, planar } => {
            let base = if planar {
                let mut direction = vec![0.0; s.grid.dim];
                direction[0] = 1.0;
                BaseProfile::Planar {
                    direction,
                    offset: 0.0,
                }
            } else {
                BaseProfile::Vacuum
            };
            Some(RotatingWaveSpec {
                omega,
                epsilon: s.model.epsilon,
                base,
            })
        }
        _ => None,
    }
}

/// Graph offset g(t, y) = a·sin(2π(y − t)/L_y) of the planar wave, a null
/// profile moving in +y at light speed.
pub fn planar_wave_offset(amplitude: f64, length: f64, t: f64, y: f64) -> f64 {
    amplitude * (std::f64::consts::TAU * (y - t) / length).sin()
}

/// Centres of the two planar-wave fronts along x.
pub fn planar_wave_fronts(g: &GridSpec) -> [f64; 2] {
    let mid = g.origin[0] + 0.5 * g.extent(0);
    let quarter = 0.25 * g.extent(0);
    [mid - quarter, mid + quarter]
}

/// Two kinks across x = c_i + g(y − t): each factor q(d/ε) with
/// d = x − c − g is an exact travelling solution, and their product differs
/// from one only within the O(ε) layers.
fn planar_wave_state(
    grid: &Grid<f64>,
    spec: &GridSpec,
    amplitude: f64,
    eps: f64,
) -> Result<FieldState<f64>, LabError> {
    let ly = spec.extent(1);
    let [c0, c1] = planar_wave_fronts(spec);
    let (mid, half) = (0.5 * (c0 + c1), 0.5 * (c1 - c0));
    let y0 = spec.origin[1];
    let field = move |x: &[f64]| -> (f64, f64) {
        let g = planar_wave_offset(amplitude, ly, 0.0, x[1] - y0);
        let gt = -amplitude * std::f64::consts::TAU / ly
            * (std::f64::consts::TAU * (x[1] - y0) / ly).cos();
        // wrap about the midpoint so both factors see the same image
        let d = grid.displacement(0, mid + g, x[0]);
        let (d0, d1) = (d + half, d - half);
        let (q0, q1) = (kink_profile(d0 / eps), kink_profile(d1 / eps));
        // ∂ₜq(d/ε) = −q′(d/ε)·gₜ/ε
        let p0 = -(1.0 - q0 * q0) / std::f64::consts::SQRT_2 * gt / eps;
        let p1 = -(1.0 - q1 * q1) / std::f64::consts::SQRT_2 * gt / eps;
        (-q0 * q1, -(p0 * q1 + q0 * p1))
    };
    init_from_profile(
        grid.clone(),
        1,
        eps,
        |x, o| o[0] = field(x).0,
        |x, o| o[0] = field(x).1,
    )
    .map_err(exact_err)
}

/// Initial field of the scenario at t = 0 (or at the snapshot's time).
pub fn initial_state(s: &Scenario) -> Result<FieldState<f64>, LabError> {
    let grid = build_grid(&s.grid)?;
    let eps = s.model.epsilon;
    let state = match &s.initial {
        Initial::Vacuum => FieldState::vacuum(grid, s.model.k, eps).map_err(exact_err)?,
        Initial::Kink { .. } => {
            kink_state(&grid, &kink_spec(s).expect("kink"), 0.0).map_err(exact_err)?
        }
        Initial::KinkPair { position, speed } => {
            kink_pair_state(&grid, *position, *speed, eps, 0.0).map_err(exact_err)?
        }
        Initial::PlanarWave { amplitude } => planar_wave_state(&grid, &s.grid, *amplitude, eps)?,
        Initial::Circle { r0, center } => {
            sphere_state(&grid, center, *r0, eps).map_err(exact_err)?
        }
        Initial::Ellipse { a, b, center } => {
            kinklab_core::exact::ellipse_state(&grid, [center[0], center[1]], *a, *b, eps)
                .map_err(exact_err)?
        }
        Initial::Ripple {
            r0,
            amplitude,
            wavelength,
            ..
        } => ripple_state(&grid, *r0, *amplitude, ripple_modes(*r0, *wavelength), eps)
            .map_err(exact_err)?,
        Initial::Vortex {
            center,
            degree,
            relax_time,
            damping,
        } => {
            let seeds = [VortexSeed {
                center: [center[0], center[1]],
                degree: *degree,
            }];
            relaxed(
                vortex_ansatz_state(&grid, &seeds, eps).map_err(exact_err)?,
                *damping,
                *relax_time,
            )
        }
        Initial::VortexPair {
            separation,
            relax_time,
            damping,
        } => {
            let cx = s.grid.origin[0] + 0.5 * s.grid.extent(0);
            let cy = s.grid.origin[1] + 0.5 * s.grid.extent(1);
            let seeds = [
                VortexSeed {
                    center: [cx - separation / 2.0, cy],
                    degree: 1,
                },
                VortexSeed {
                    center: [cx + separation / 2.0, cy],
                    degree: -1,
                },
            ];
            relaxed(
                vortex_ansatz_state(&grid, &seeds, eps).map_err(exact_err)?,
                *damping,
                *relax_time,
            )
        }
        Initial::RotatingWave { .. } => {
            rotating_wave_state(&grid, &rotating_spec(s).expect("rotating wave"), 0.0)
                .map_err(exact_err)?
        }
        Initial::Snapshot { path } => {
            let st = snapshot::load(std::path::Path::new(path), s.grid.boundary)?;
            check_snapshot(s, &st, path)?;
            st
        }
    };
    Ok(state)
}

fn relaxed(state: FieldState<f64>, damping: f64, time: f64) -> FieldState<f64> {
    if time > 0.0 {
        relax_damped(&state, damping, time)
    } else {
        state
    }
}

fn check_snapshot(s: &Scenario, st: &FieldState<f64>, path: &str) -> Result<(), LabError> {
    let g = &st.grid;
    let same_grid = g.dim() == s.grid.dim
        && g.cells() == s.grid.cells.as_slice()
        && g.spacing() == s.grid.spacing
        && g.origin() == s.grid.origin.as_slice();
    if !same_grid {
        return Err(LabError::Config(format!(
            "snapshot {path} does not match the configured grid"
        )));
    }
    if st.k != s.model.k || st.epsilon != s.model.epsilon {
        return Err(LabError::Config(format!(
            "snapshot {path} has k = {}, epsilon = {}; config says k = {}, epsilon = {}",
            st.k, st.epsilon, s.model.k, s.model.epsilon
        )));
    }
    Ok(())
}
