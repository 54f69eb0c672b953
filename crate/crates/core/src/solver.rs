//! Explicit three-level leapfrog integration of □u + ∇W(u)/ε² = 0.
//!
//! The integrator keeps three consecutive levels (uᵐ⁻¹, uᵐ, uᵐ⁺¹) so a
//! snapshot at level m can carry the centred time derivative
//! (uᵐ⁺¹ − uᵐ⁻¹)/(2dt). Initial levels come from a second-order Taylor start
//! in both time directions.

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{FieldState, Grid, Stencil};
use crate::Real;

/// |u| above this marks blow-up.
pub const DIVERGENCE_BOUND: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("cfl fraction {0} not in (0, 1]")]
    Cfl(f64),
    #[error("points per width {0} must be at least 4")]
    PointsPerWidth(f64),
    #[error("resolution rule violated: h = {h} > epsilon/points_per_width = {limit}")]
    Resolution { h: f64, limit: f64 },
    #[error("t_end {0} must be finite and non-negative")]
    EndTime(f64),
    #[error("initial state is not finite")]
    NonFiniteState,
}

/// Fixed-step integration parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub cfl_fraction: T,
    pub points_per_width: T,
    pub t_end: T,
    pub max_steps: u64,
    /// Snapshot cadence in steps; 0 keeps only the first and last state.
    pub snapshot_every: u64,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(t_end: T) -> Self {
        Self {
            cfl_fraction: T::lit(0.5),
            points_per_width: T::lit(4.0),
            t_end,
            max_steps: u64::MAX,
            snapshot_every: 0,
        }
    }

    /// Checks the CFL fraction and the resolution rule h ≤ ε/points_per_width.
    pub fn validate(&self, grid: &Grid<T>, epsilon: T) -> Result<(), SolverError> {
        if !(self.cfl_fraction > T::zero() && self.cfl_fraction <= T::one()) {
            return Err(SolverError::Cfl(self.cfl_fraction.to_f64_lossy()));
        }
        if !(self.points_per_width >= T::lit(4.0)) {
            return Err(SolverError::PointsPerWidth(
                self.points_per_width.to_f64_lossy(),
            ));
        }
        if !(self.t_end >= T::zero() && self.t_end.is_finite()) {
            return Err(SolverError::EndTime(self.t_end.to_f64_lossy()));
        }
        let limit = epsilon / self.points_per_width;
        if grid.spacing() > limit * (T::one() + T::lit(1e-12)) {
            return Err(SolverError::Resolution {
                h: grid.spacing().to_f64_lossy(),
                limit: limit.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Number of fixed steps needed to reach `t_end`.
    pub fn steps_for(&self, dt: T) -> u64 {
        let s = (self.t_end / dt - T::lit(1e-9)).ceil();
        if s <= T::zero() {
            0
        } else {
            s.to_u64().unwrap_or(u64::MAX)
        }
    }
}

/// dt = cfl_fraction · h / √n.
pub fn stable_dt<T: Real>(grid: &Grid<T>, cfl_fraction: T) -> T {
    cfl_fraction * grid.spacing() / T::from_usize_lossy(grid.dim()).sqrt()
}

/// Right-hand side F(u) = Δu − ∇W(u)/ε² of every component.
pub fn acceleration<T: Real>(grid: &Grid<T>, u: &[Vec<T>], epsilon: T) -> Vec<Vec<T>> {
    let k = u.len();
    let zero = vec![vec![T::zero(); grid.len()]; k];
    let mut out = zero.clone();
    // u_next = 2u − u_prev + dt²F with u_prev = 2u, dt = 1 gives F directly
    let doubled: Vec<Vec<T>> = u
        .iter()
        .map(|c| c.iter().map(|&x| x + x).collect())
        .collect();
    let kernel = Kernel::new(grid, epsilon, T::one());
    kernel.advance(u, &doubled, &mut out);
    out
}

/// Taylor start uᵐ⁺¹ = u⁰ + dt·uₜ⁰ + dt²/2·(Δu⁰ − ∇W(u⁰)/ε²).
pub fn bootstrap_second_level<T: Real>(state0: &FieldState<T>, dt: T) -> Vec<Vec<T>> {
    taylor_level(state0, dt)
}

fn taylor_level<T: Real>(state0: &FieldState<T>, dt: T) -> Vec<Vec<T>> {
    let acc = acceleration(&state0.grid, &state0.u, state0.epsilon);
    let half_dt2 = dt * dt / T::lit(2.0);
    (0..state0.k)
        .map(|c| {
            state0.u[c]
                .iter()
                .zip(&state0.ut[c])
                .zip(&acc[c])
                .map(|((&u, &v), &a)| u + dt * v + half_dt2 * a)
                .collect()
        })
        .collect()
}

/// Row kernel for uᵐ⁺¹ = 2uᵐ − uᵐ⁻¹ + dt²(Δ_h uᵐ − ∇W(uᵐ)/ε²).
struct Kernel<T> {
    stencil: Stencil,
    lap_scale: T,
    pot_scale: T,
    bound_sq: T,
}

impl<T: Real> Kernel<T> {
    fn new(grid: &Grid<T>, epsilon: T, dt: T) -> Self {
        let h = grid.spacing();
        Self {
            stencil: Stencil::new(grid),
            lap_scale: dt * dt / (h * h),
            pot_scale: dt * dt / (epsilon * epsilon),
            bound_sq: T::lit(DIVERGENCE_BOUND * DIVERGENCE_BOUND),
        }
    }

    /// Writes the next level into `next`; returns true if any cell diverged.
    fn advance(&self, curr: &[Vec<T>], prev: &[Vec<T>], next: &mut [Vec<T>]) -> bool {
        let len = self.stencil.row_len;
        match next {
            [n0] => n0
                .par_chunks_mut(len)
                .enumerate()
                .map(|(r, o0)| self.row1(r, &curr[0], &prev[0], o0))
                .reduce(|| false, |a, b| a || b),
            [n0, n1] => n0
                .par_chunks_mut(len)
                .zip(n1.par_chunks_mut(len))
                .enumerate()
                .map(|(r, (o0, o1))| self.row2(r, curr, prev, o0, o1))
                .reduce(|| false, |a, b| a || b),
            _ => unreachable!("k is 1 or 2"),
        }
    }

    #[inline]
    fn row1(&self, r: usize, u: &[T], up: &[T], out: &mut [T]) -> bool {
        let len = out.len();
        let base = r * len;
        self.stencil.laplacian_row(u, r, out);
        let two = T::lit(2.0);
        let mut bad = false;
        for i in 0..len {
            let x = u[base + i];
            let nl = (T::one() - x * x) * x;
            let v = two * x - up[base + i] + self.lap_scale * out[i] + self.pot_scale * nl;
            bad |= !(v * v <= self.bound_sq);
            out[i] = v;
        }
        bad
    }

    #[inline]
    fn row2(&self, r: usize, u: &[Vec<T>], up: &[Vec<T>], o0: &mut [T], o1: &mut [T]) -> bool {
        let len = o0.len();
        let base = r * len;
        self.stencil.laplacian_row(&u[0], r, o0);
        self.stencil.laplacian_row(&u[1], r, o1);
        let two = T::lit(2.0);
        let mut bad = false;
        for i in 0..len {
            let (a, b) = (u[0][base + i], u[1][base + i]);
            let s = T::one() - a * a - b * b;
            let va = two * a - up[0][base + i] + self.lap_scale * o0[i] + self.pot_scale * s * a;
            let vb = two * b - up[1][base + i] + self.lap_scale * o1[i] + self.pot_scale * s * b;
            bad |= !(va * va + vb * vb <= self.bound_sq);
            o0[i] = va;
            o1[i] = vb;
        }
        bad
    }
}

/// One leapfrog step on raw levels; returns `None` if the result diverged.
pub fn step<T: Real>(
    grid: &Grid<T>,
    epsilon: T,
    u_prev: &[Vec<T>],
    u_curr: &[Vec<T>],
    dt: T,
) -> Option<Vec<Vec<T>>> {
    let mut next = vec![vec![T::zero(); grid.len()]; u_curr.len()];
    let bad = Kernel::new(grid, epsilon, dt).advance(u_curr, u_prev, &mut next);
    (!bad).then_some(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    Diverged,
    MaxSteps,
}

/// Stateful integrator over three consecutive levels.
#[derive(Debug, Clone)]
pub struct Leapfrog<T> {
    grid: Grid<T>,
    k: usize,
    epsilon: T,
    dt: T,
    /// +1 forward, −1 after [`Leapfrog::reverse`].
    direction: T,
    steps: u64,
    t0: T,
    prev: Vec<Vec<T>>,
    curr: Vec<Vec<T>>,
    next: Vec<Vec<T>>,
    diverged: bool,
}

impl<T: Real> Leapfrog<T> {
    pub fn new(state0: &FieldState<T>, dt: T) -> Result<Self, SolverError> {
        if !state0.is_finite() {
            return Err(SolverError::NonFiniteState);
        }
        let next = taylor_level(state0, dt);
        let prev = taylor_level(state0, -dt);
        let mut me = Self {
            grid: state0.grid.clone(),
            k: state0.k,
            epsilon: state0.epsilon,
            dt,
            direction: T::one(),
            steps: 0,
            t0: state0.time,
            prev,
            curr: state0.u.clone(),
            next,
            diverged: false,
        };
        me.diverged = !me.levels_ok();
        Ok(me)
    }

    /// Resumes from two stored levels (uᵐ⁻¹, uᵐ) at step `steps`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_levels(
        grid: Grid<T>,
        epsilon: T,
        dt: T,
        t0: T,
        steps: u64,
        prev: Vec<Vec<T>>,
        curr: Vec<Vec<T>>,
    ) -> Self {
        let k = curr.len();
        let mut me = Self {
            grid,
            k,
            epsilon,
            dt,
            direction: T::one(),
            steps,
            t0,
            prev: prev.clone(),
            curr: curr.clone(),
            next: vec![vec![T::zero(); curr[0].len()]; k],
            diverged: false,
        };
        let bad = Kernel::new(&me.grid, epsilon, dt).advance(&me.curr, &me.prev, &mut me.next);
        me.diverged = bad;
        me
    }

    fn levels_ok(&self) -> bool {
        let b = T::lit(DIVERGENCE_BOUND);
        self.next.iter().all(|c| c.iter().all(|x| x.abs() <= b))
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn time(&self) -> T {
        self.t0 + self.direction * T::from_u64(self.steps).unwrap() * self.dt
    }

    /// Starting time the step counter is measured from.
    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn diverged(&self) -> bool {
        self.diverged
    }

    pub fn current(&self) -> &[Vec<T>] {
        &self.curr
    }

    pub fn previous(&self) -> &[Vec<T>] {
        &self.prev
    }

    pub fn upcoming(&self) -> &[Vec<T>] {
        &self.next
    }

    /// Advances one step. Returns false once the solution has diverged.
    pub fn step(&mut self) -> bool {
        if self.diverged {
            return false;
        }
        // rotate: prev ← curr, curr ← next, next ← new
        std::mem::swap(&mut self.prev, &mut self.curr);
        std::mem::swap(&mut self.curr, &mut self.next);
        let kernel = Kernel::new(&self.grid, self.epsilon, self.dt);
        let bad = kernel.advance(&self.curr, &self.prev, &mut self.next);
        self.steps += 1;
        if bad {
            self.diverged = true;
        }
        !bad
    }

    /// Flips the arrow of time by exchanging the outer levels.
    pub fn reverse(&mut self) {
        std::mem::swap(&mut self.prev, &mut self.next);
        // keep time() continuous: t0 + dir·steps·dt stays fixed
        self.t0 = self.time();
        self.steps = 0;
        self.direction = -self.direction;
    }

    /// FieldState at the current level with uₜ = (uᵐ⁺¹ − uᵐ⁻¹)/(2dt).
    pub fn snapshot(&self) -> FieldState<T> {
        let inv = self.direction / (T::lit(2.0) * self.dt);
        let ut = (0..self.k)
            .map(|c| {
                self.next[c]
                    .iter()
                    .zip(&self.prev[c])
                    .map(|(&a, &b)| (a - b) * inv)
                    .collect()
            })
            .collect();
        FieldState {
            grid: self.grid.clone(),
            k: self.k,
            epsilon: self.epsilon,
            time: self.time(),
            u: self.curr.clone(),
            ut,
        }
    }
}

/// Read-only view handed to observers.
pub struct StepView<'a, T> {
    pub step: u64,
    pub state: &'a FieldState<T>,
    pub integrator: &'a Leapfrog<T>,
}

/// Callback invoked by [`run`] every `cadence()` steps (and at the end).
pub trait Observer<T> {
    fn cadence(&self) -> u64;
    fn observe(&mut self, view: &StepView<'_, T>);
}

#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub states: Vec<FieldState<T>>,
    pub step_count: u64,
    pub status: RunStatus,
    pub dt: T,
}

/// Integrates to `t_end` with fixed dt = stable_dt(grid, cfl_fraction).
pub fn run<T: Real>(
    state0: &FieldState<T>,
    config: &SolverConfig<T>,
    observers: &mut [&mut dyn Observer<T>],
) -> Result<Trajectory<T>, SolverError> {
    config.validate(&state0.grid, state0.epsilon)?;
    let dt = stable_dt(&state0.grid, config.cfl_fraction);
    let integ = Leapfrog::new(state0, dt)?;
    Ok(run_from(integ, config, observers))
}

/// Continues an existing integrator until `config.t_end` (absolute time).
pub fn run_from<T: Real>(
    mut integ: Leapfrog<T>,
    config: &SolverConfig<T>,
    observers: &mut [&mut dyn Observer<T>],
) -> Trajectory<T> {
    let dt = integ.dt();
    let total = config.steps_for(dt);
    let target = total.min(config.max_steps);
    let mut states = Vec::new();
    let mut status = RunStatus::Completed;

    let due = |step: u64, every: u64, last: bool| {
        last || step == 0 || (every > 0 && step.is_multiple_of(every))
    };

    loop {
        let step = integ.steps();
        let last = step >= target || integ.diverged();
        let want_snapshot = due(step, config.snapshot_every, last);
        let want_observer = observers.iter().any(|o| due(step, o.cadence(), last));
        if want_snapshot || want_observer {
            let snap = integ.snapshot();
            let view = StepView {
                step,
                state: &snap,
                integrator: &integ,
            };
            for o in observers.iter_mut() {
                if due(step, o.cadence(), last) {
                    o.observe(&view);
                }
            }
            if want_snapshot {
                states.push(snap);
            }
        }
        if integ.diverged() {
            status = RunStatus::Diverged;
            break;
        }
        if step >= target {
            if target < total {
                status = RunStatus::MaxSteps;
            }
            break;
        }
        integ.step();
    }
    Trajectory {
        states,
        step_count: integ.steps(),
        status,
        dt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{init_from_profile, Boundary};

    #[test]
    fn stable_dt_examples() {
        let g1 = Grid::new(&[16], &[0.0], 0.01, Boundary::Periodic).unwrap();
        assert!((stable_dt(&g1, 0.5) - 0.005_f64).abs() < 1e-18);
        let g2 = Grid::new(&[16, 16], &[0.0, 0.0], 0.01, Boundary::Periodic).unwrap();
        assert!((stable_dt(&g2, 0.5) - 0.01 * 0.5 / 2f64.sqrt()).abs() < 1e-18);
        assert!((stable_dt(&g2, 0.5) - 0.0035355).abs() < 1e-7);
        let g3 = Grid::new(&[8, 8, 8], &[0.0_f64; 3], 0.02, Boundary::Periodic).unwrap();
        assert!((stable_dt(&g3, 1.0) - 0.011547).abs() < 1e-6);
    }

    fn const_state(v: f64, b: Boundary) -> FieldState<f64> {
        let g = Grid::new(&[32], &[0.0], 0.01, b).unwrap();
        init_from_profile(g, 1, 0.05, |_, o| o[0] = v, |_, o| o[0] = 0.0).unwrap()
    }

    #[test]
    fn vacuum_and_zero_are_fixed_points() {
        for v in [1.0, -1.0, 0.0] {
            let s = const_state(v, Boundary::Periodic);
            let u1 = bootstrap_second_level(&s, 0.005);
            assert!(u1[0].iter().all(|&x| x == v));
            let next = step(&s.grid, s.epsilon, &s.u, &u1, 0.005).unwrap();
            assert!(next[0].iter().all(|&x| x == v));
        }
    }

    #[test]
    fn nan_marks_divergence() {
        let mut s = const_state(1.0, Boundary::Neumann);
        s.u[0][3] = 20.0;
        let dt = 0.005;
        assert!(step(&s.grid, s.epsilon, &s.u, &s.u, dt).is_none());
        s.u[0][3] = f64::NAN;
        assert!(step(&s.grid, s.epsilon, &s.u, &s.u, dt).is_none());
    }

    #[test]
    fn zero_duration_run_keeps_single_snapshot() {
        let s = const_state(1.0, Boundary::Periodic);
        let mut cfg = SolverConfig::new(0.0);
        cfg.points_per_width = 4.0;
        let tr = run(&s, &cfg, &mut []).unwrap();
        assert_eq!(tr.states.len(), 1);
        assert_eq!(tr.status, RunStatus::Completed);
        assert_eq!(tr.step_count, 0);
    }

    #[test]
    fn max_steps_is_reported() {
        let s = const_state(1.0, Boundary::Periodic);
        let mut cfg = SolverConfig::new(1.0);
        cfg.max_steps = 5;
        let tr = run(&s, &cfg, &mut []).unwrap();
        assert_eq!(tr.status, RunStatus::MaxSteps);
        assert_eq!(tr.step_count, 5);
    }

    #[test]
    fn resolution_rule_enforced() {
        let s = const_state(1.0, Boundary::Periodic);
        let mut cfg = SolverConfig::new(1.0);
        cfg.points_per_width = 8.0;
        assert!(matches!(
            run(&s, &cfg, &mut []),
            Err(SolverError::Resolution { .. })
        ));
        cfg.points_per_width = 4.0;
        cfg.cfl_fraction = 1.5;
        assert!(matches!(run(&s, &cfg, &mut []), Err(SolverError::Cfl(_))));
    }

    #[test]
    fn diverged_run_keeps_partial_trajectory() {
        let g = Grid::new(&[32], &[0.0_f64], 0.01, Boundary::Periodic).unwrap();
        // a supercritical step size makes the linear part blow up
        let s = init_from_profile(
            g,
            1,
            0.05,
            |x, o| o[0] = 1.0 + 1e-3 * (40.0 * x[0]).sin(),
            |_, o| o[0] = 0.0,
        )
        .unwrap();
        let integ = Leapfrog::new(&s, 0.03).unwrap();
        let mut cfg = SolverConfig::new(100.0);
        cfg.snapshot_every = 1;
        let tr = run_from(integ, &cfg, &mut []);
        assert_eq!(tr.status, RunStatus::Diverged);
        assert!(!tr.states.is_empty());
    }

    #[test]
    fn initial_snapshot_reproduces_initial_data() {
        let g = Grid::new(&[64], &[0.0], 1.0 / 64.0, Boundary::Periodic).unwrap();
        let tau = std::f64::consts::TAU;
        let s = init_from_profile(
            g,
            1,
            0.5,
            |x, o| o[0] = 1.0 + 0.01 * (tau * x[0]).sin(),
            |x, o| o[0] = 0.02 * (tau * x[0]).cos(),
        )
        .unwrap();
        let integ = Leapfrog::new(&s, 0.005).unwrap();
        let snap = integ.snapshot();
        assert_eq!(snap.u, s.u);
        for (a, b) in snap.ut[0].iter().zip(&s.ut[0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
