use super::densities::densities;
use super::stress::stress_energy;
use super::DiagnosticsError;
use crate::field::{FieldState, Grid};
use crate::minkowski::Mat;
use crate::reduce::tree_sum;
use crate::Real;

/// X = φ·e_a with φ a product of C^∞ bumps ψ(s) = exp(−1/(1 − s²)) in time
/// and in each space direction; `direction` 0 is time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestField<T> {
    pub t_center: T,
    pub t_radius: T,
    pub center: [T; 3],
    pub radius: T,
    pub direction: usize,
}

fn bump<T: Real>(s: T) -> (T, T) {
    let q = T::one() - s * s;
    if q <= T::zero() {
        return (T::zero(), T::zero());
    }
    let v = (-T::one() / q).exp();
    (v, v * (-T::lit(2.0) * s / (q * q)))
}

impl<T: Real> TestField<T> {
    /// φ and its space-time gradient (∂ₜφ, ∂₁φ, …) at (t, x).
    pub fn eval(&self, t: T, x: &[T]) -> (T, [T; 4]) {
        let n = x.len();
        let mut vals = [T::zero(); 4];
        let mut ders = [T::zero(); 4];
        let (v, d) = bump((t - self.t_center) / self.t_radius);
        vals[0] = v;
        ders[0] = d / self.t_radius;
        for a in 0..n {
            let (v, d) = bump((x[a] - self.center[a]) / self.radius);
            vals[a + 1] = v;
            ders[a + 1] = d / self.radius;
        }
        let phi = vals[..=n].iter().fold(T::one(), |p, &v| p * v);
        let mut grad = [T::zero(); 4];
        for b in 0..=n {
            let mut g = ders[b];
            for (c, &v) in vals[..=n].iter().enumerate() {
                if c != b {
                    g = g * v;
                }
            }
            grad[b] = g;
        }
        (phi, grad)
    }

    fn check_support(&self, grid: &Grid<T>, t0: T, t1: T) -> Result<(), DiagnosticsError> {
        if self.t_center - self.t_radius < t0 || self.t_center + self.t_radius > t1 {
            return Err(DiagnosticsError::SupportOutside);
        }
        for a in 0..grid.dim() {
            let lo = grid.origin()[a];
            let hi = lo + grid.extent(a);
            if self.center[a] - self.radius < lo || self.center[a] + self.radius > hi {
                return Err(DiagnosticsError::SupportOutside);
            }
        }
        Ok(())
    }
}

/// Lattice of `lattice`ⁿ bump centres in the domain interior, one field per
/// direction (time and each axis), centred in the time window.
pub fn default_test_family<T: Real>(
    grid: &Grid<T>,
    t_window: (T, T),
    lattice: usize,
) -> Vec<TestField<T>> {
    let n = grid.dim();
    let m = lattice.max(1);
    let frac = |j: usize| T::from_usize_lossy(j + 1) / T::from_usize_lossy(m + 1);
    let min_extent = (0..n).fold(T::infinity(), |a, ax| a.min(grid.extent(ax)));
    let radius = T::lit(0.95) * min_extent / T::from_usize_lossy(m + 1);
    let t_center = (t_window.0 + t_window.1) / T::lit(2.0);
    let t_radius = T::lit(0.49) * (t_window.1 - t_window.0);
    let total = m.pow(n as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut center = [T::zero(); 3];
        let mut r = idx;
        for (a, c) in center.iter_mut().enumerate().take(n) {
            *c = grid.origin()[a] + grid.extent(a) * frac(r % m);
            r /= m;
        }
        for direction in 0..=n {
            out.push(TestField {
                t_center,
                t_radius,
                center,
                radius,
                direction,
            });
        }
    }
    out
}

/// Trapezoid weights for the snapshot times.
fn time_weights<T: Real>(times: &[T]) -> Vec<T> {
    let m = times.len();
    let half = T::lit(0.5);
    (0..m)
        .map(|i| {
            let left = if i > 0 {
                times[i] - times[i - 1]
            } else {
                T::zero()
            };
            let right = if i + 1 < m {
                times[i + 1] - times[i]
            } else {
                T::zero()
            };
            (left + right) * half
        })
        .collect()
}

fn check_window<T: Real>(window: &[FieldState<T>]) -> Result<(), DiagnosticsError> {
    if window.len() < 2 {
        return Err(DiagnosticsError::Window {
            need: 2,
            got: window.len(),
        });
    }
    if window
        .iter()
        .any(|s| s.grid != window[0].grid || s.k != window[0].k || s.epsilon != window[0].epsilon)
    {
        return Err(DiagnosticsError::Mismatch);
    }
    Ok(())
}

/// Σₜ Σ_cells η_aa T^{aβ}∂_βφ·hⁿ·Δt for each test field: the discrete
/// weak form of ∂_β T^{αβ} = 0 over the snapshot window.
pub fn stationarity_residual<T: Real>(
    window: &[FieldState<T>],
    fields: &[TestField<T>],
) -> Result<Vec<T>, DiagnosticsError> {
    check_window(window)?;
    let grid = &window[0].grid;
    let t0 = window[0].time;
    let t1 = window[window.len() - 1].time;
    for f in fields {
        f.check_support(grid, t0, t1)?;
    }
    let times: Vec<T> = window.iter().map(|s| s.time).collect();
    let wts = time_weights(&times);
    let mut acc = vec![Vec::with_capacity(window.len()); fields.len()];
    for (s, &wt) in window.iter().zip(&wts) {
        for (fi, v) in slice_integrals(s, fields, None).0.into_iter().enumerate() {
            acc[fi].push(v * wt);
        }
    }
    Ok(acc.iter().map(|v| tree_sum(v)).collect())
}

/// Weighted point of the discrete lorentzian varifold: mass ℓ·hⁿ·Δt and
/// mixed tensor P = ηT/ℓ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarifoldSample<T> {
    pub t: T,
    pub x: [T; 3],
    pub weight: T,
    pub p: Mat<T>,
}

/// Collects cells with ℓ > θ·max ℓ over the window as varifold samples.
pub fn varifold_samples<T: Real>(
    window: &[FieldState<T>],
    theta: T,
) -> Result<Vec<VarifoldSample<T>>, DiagnosticsError> {
    check_window(window)?;
    let grid = &window[0].grid;
    let times: Vec<T> = window.iter().map(|s| s.time).collect();
    let wts = time_weights(&times);
    let mut out = Vec::new();
    for (s, &wt) in window.iter().zip(&wts) {
        let d = densities(s);
        let tens = stress_energy(s);
        let lmax = d.l.iter().fold(T::zero(), |a, &x| a.max(x));
        let cut = theta * lmax;
        for i in 0..grid.len() {
            let l = d.l[i];
            if l > cut && l > T::zero() {
                out.push(VarifoldSample {
                    t: s.time,
                    x: grid.center(i),
                    weight: l * grid.cell_volume() * wt,
                    p: tens.tensors[i].scale(T::one() / l).lower_first(),
                });
            }
        }
    }
    Ok(out)
}

/// First variation Σ weight·tr(P∇X) of the sampled varifold against X.
pub fn varifold_stationarity<T: Real>(
    samples: &[VarifoldSample<T>],
    dim: usize,
    field: &TestField<T>,
) -> T {
    let a = field.direction;
    let terms: Vec<T> = samples
        .iter()
        .map(|s| {
            let (_, g) = field.eval(s.t, &s.x[..dim]);
            let mut v = T::zero();
            for (b, &gb) in g[..=dim].iter().enumerate() {
                v = v + s.p.get(a, b) * gb;
            }
            s.weight * v
        })
        .collect();
    tree_sum(&terms)
}

/// Streaming form of [`stationarity_residual`]: snapshots are pushed one at a
/// time and folded into the trapezoid sum, so long runs need no window.
///
/// Alongside the full weak form it accumulates the tube residual: the same
/// integrand restricted to cells with ℓ > θ·max ℓ, which is the first
/// variation of the discrete varifold of [`varifold_samples`].
#[derive(Debug, Clone)]
pub struct StationarityAccumulator<T> {
    fields: Vec<TestField<T>>,
    theta: T,
    sums: Vec<T>,
    tube_sums: Vec<T>,
    last: Option<(T, Vec<T>, Vec<T>)>,
    first_time: Option<T>,
}

/// Checkpointable state of a [`StationarityAccumulator`].
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatorParts<T> {
    pub theta: T,
    pub sums: Vec<T>,
    pub tube_sums: Vec<T>,
    /// Time and (full, tube) slice integrals of the last push.
    pub last: Option<(T, Vec<T>, Vec<T>)>,
    pub first_time: Option<T>,
}

impl<T: Real> StationarityAccumulator<T> {
    pub fn new(fields: Vec<TestField<T>>, theta: T) -> Self {
        let sums = vec![T::zero(); fields.len()];
        Self {
            fields,
            theta,
            tube_sums: sums.clone(),
            sums,
            last: None,
            first_time: None,
        }
    }

    pub fn fields(&self) -> &[TestField<T>] {
        &self.fields
    }

    pub fn parts(&self) -> AccumulatorParts<T> {
        AccumulatorParts {
            theta: self.theta,
            sums: self.sums.clone(),
            tube_sums: self.tube_sums.clone(),
            last: self.last.clone(),
            first_time: self.first_time,
        }
    }

    pub fn from_parts(fields: Vec<TestField<T>>, p: AccumulatorParts<T>) -> Self {
        Self {
            fields,
            theta: p.theta,
            sums: p.sums,
            tube_sums: p.tube_sums,
            last: p.last,
            first_time: p.first_time,
        }
    }

    /// Adds a snapshot; times must increase.
    pub fn push(&mut self, state: &FieldState<T>) -> Result<(), DiagnosticsError> {
        let (full, tube) = slice_integrals(state, &self.fields, Some(self.theta));
        if let Some((t_prev, a_full, a_tube)) = &self.last {
            let half = (state.time - *t_prev) * T::lit(0.5);
            for ((s, a), b) in self.sums.iter_mut().zip(a_full).zip(&full) {
                *s = *s + half * (*a + *b);
            }
            for ((s, a), b) in self.tube_sums.iter_mut().zip(a_tube).zip(&tube) {
                *s = *s + half * (*a + *b);
            }
        } else {
            self.first_time = Some(state.time);
        }
        self.last = Some((state.time, full, tube));
        Ok(())
    }

    fn check(&self, grid: &Grid<T>) -> Result<(), DiagnosticsError> {
        let (Some(t0), Some((t1, _, _))) = (self.first_time, &self.last) else {
            return Err(DiagnosticsError::Window { need: 2, got: 0 });
        };
        for f in &self.fields {
            f.check_support(grid, t0, *t1)?;
        }
        Ok(())
    }

    /// Full weak-form residual per field; fails if a field's support leaves
    /// the pushed span.
    pub fn finish(&self, grid: &Grid<T>) -> Result<Vec<T>, DiagnosticsError> {
        self.check(grid)?;
        Ok(self.sums.clone())
    }

    /// Tube (varifold) residual per field.
    pub fn finish_tube(&self, grid: &Grid<T>) -> Result<Vec<T>, DiagnosticsError> {
        self.check(grid)?;
        Ok(self.tube_sums.clone())
    }
}

/// Σ_cells η_aa T^{aβ}∂_βφ·hⁿ at one instant for every field, over all
/// cells and (when `theta` is given) over the tube ℓ > θ·max ℓ.
fn slice_integrals<T: Real>(
    s: &FieldState<T>,
    fields: &[TestField<T>],
    theta: Option<T>,
) -> (Vec<T>, Vec<T>) {
    let grid = &s.grid;
    let n = grid.dim();
    let tens = stress_energy(s);
    let cut = theta.map(|th| {
        let d = densities(s);
        let lmax = d.l.iter().fold(T::zero(), |a, &x| a.max(x));
        let c = th * lmax;
        d.l.iter()
            .map(|&l| l > c && l > T::zero())
            .collect::<Vec<bool>>()
    });
    let mut full = Vec::with_capacity(fields.len());
    let mut tube = Vec::with_capacity(fields.len());
    for f in fields {
        let a = f.direction;
        let sign = if a == 0 { -T::one() } else { T::one() };
        let (phi_t, _) = bump((s.time - f.t_center) / f.t_radius);
        let mut terms = Vec::new();
        let mut tube_terms = Vec::new();
        if phi_t != T::zero() {
            for (i, t) in tens.tensors.iter().enumerate() {
                let x = grid.center(i);
                if (0..n).any(|ax| (x[ax] - f.center[ax]).abs() >= f.radius) {
                    continue;
                }
                let (_, g) = f.eval(s.time, &x[..n]);
                let mut v = T::zero();
                for (b, &gb) in g[..=n].iter().enumerate() {
                    v = v + t.get(a, b) * gb;
                }
                terms.push(sign * v);
                if cut.as_ref().is_some_and(|c| c[i]) {
                    tube_terms.push(sign * v);
                }
            }
        }
        full.push(tree_sum(&terms) * grid.cell_volume());
        tube.push(tree_sum(&tube_terms) * grid.cell_volume());
    }
    (full, tube)
}
