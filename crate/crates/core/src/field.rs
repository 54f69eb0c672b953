//! Grids, field states, the quartic potential and discrete spatial operators.

use rayon::prelude::*;
use thiserror::Error;

use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("spatial dimension {0} not in 1..=3")]
    Dimension(usize),
    #[error("axis {axis} has {cells} cells, need at least {min}")]
    TooFewCells {
        axis: usize,
        cells: usize,
        min: usize,
    },
    #[error("grid spacing must be positive and finite, got {0}")]
    Spacing(f64),
    #[error("anisotropic spacing: axis {axis} has {spacing}, axis 0 has {reference}")]
    Anisotropic {
        axis: usize,
        spacing: f64,
        reference: f64,
    },
    #[error("field has {0} components, only k = 1 or 2 is supported")]
    Components(usize),
    #[error("epsilon {0} must lie in (0, 1)")]
    Epsilon(f64),
    #[error("array shape mismatch: expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("non-finite initial sample at {coord:?}")]
    NonFiniteSample { coord: Vec<f64> },
}

/// Minimum cells per axis.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    /// Zero normal derivative via mirrored boundary-adjacent cells.
    Neumann,
}

/// Uniform cell-centred lattice in n ≤ 3 dimensions.
///
/// Storage is row-major with axis 0 slowest: the flat index of
/// `(i₀, i₁, i₂)` is `(i₀·c₁ + i₁)·c₂ + i₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    dim: usize,
    cells: [usize; 3],
    origin: [T; 3],
    spacing: T,
    boundary: Boundary,
}

impl<T: Real> Grid<T> {
    pub fn new(
        cells: &[usize],
        origin: &[T],
        spacing: T,
        boundary: Boundary,
    ) -> Result<Self, FieldError> {
        let dim = cells.len();
        if !(1..=3).contains(&dim) {
            return Err(FieldError::Dimension(dim));
        }
        if origin.len() != dim {
            return Err(FieldError::Shape {
                expected: dim,
                got: origin.len(),
            });
        }
        if !(spacing > T::zero() && spacing.is_finite()) {
            return Err(FieldError::Spacing(spacing.to_f64_lossy()));
        }
        let mut c = [1usize; 3];
        let mut o = [T::zero(); 3];
        for axis in 0..dim {
            if cells[axis] < MIN_CELLS {
                return Err(FieldError::TooFewCells {
                    axis,
                    cells: cells[axis],
                    min: MIN_CELLS,
                });
            }
            c[axis] = cells[axis];
            o[axis] = origin[axis];
        }
        Ok(Self {
            dim,
            cells: c,
            origin: o,
            spacing,
            boundary,
        })
    }

    /// Builds from physical extents; rejects axes whose implied spacing
    /// differs from axis 0 by more than 1e−12 relative.
    pub fn from_extents(
        cells: &[usize],
        origin: &[T],
        extents: &[T],
        boundary: Boundary,
    ) -> Result<Self, FieldError> {
        if extents.len() != cells.len() {
            return Err(FieldError::Shape {
                expected: cells.len(),
                got: extents.len(),
            });
        }
        if cells.contains(&0) {
            return Err(FieldError::TooFewCells {
                axis: 0,
                cells: 0,
                min: MIN_CELLS,
            });
        }
        let h0 = extents[0] / T::from_usize_lossy(cells[0]);
        for axis in 1..cells.len() {
            let h = extents[axis] / T::from_usize_lossy(cells[axis]);
            if ((h - h0) / h0).abs() > T::lit(1e-12) {
                return Err(FieldError::Anisotropic {
                    axis,
                    spacing: h.to_f64_lossy(),
                    reference: h0.to_f64_lossy(),
                });
            }
        }
        Self::new(cells, origin, h0, boundary)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    pub fn origin(&self) -> &[T] {
        &self.origin[..self.dim]
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn extent(&self, axis: usize) -> T {
        T::from_usize_lossy(self.cells[axis]) * self.spacing
    }

    /// hⁿ.
    pub fn cell_volume(&self) -> T {
        self.spacing.powi(self.dim as i32)
    }

    pub fn volume(&self) -> T {
        (0..self.dim).fold(T::one(), |v, a| v * self.extent(a))
    }

    /// Length of a contiguous row (the last axis).
    pub fn row_len(&self) -> usize {
        self.cells[self.dim - 1]
    }

    pub fn rows(&self) -> usize {
        self.len() / self.row_len()
    }

    #[inline]
    pub fn flat(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.cells[1] + idx[1]) * self.cells[2] + idx[2]
    }

    #[inline]
    pub fn multi(&self, flat: usize) -> [usize; 3] {
        let i2 = flat % self.cells[2];
        let r = flat / self.cells[2];
        [r / self.cells[1], r % self.cells[1], i2]
    }

    /// Coordinate of cell centre `i` along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> T {
        self.origin[axis] + (T::from_usize_lossy(i) + T::lit(0.5)) * self.spacing
    }

    /// Cell-centre position (first `dim` entries meaningful).
    pub fn center(&self, flat: usize) -> [T; 3] {
        let m = self.multi(flat);
        let mut x = [T::zero(); 3];
        for (a, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = self.coord(a, m[a]);
        }
        x
    }

    /// Index of the neighbour of `i` (along one axis) in direction `dir`,
    /// resolved through the boundary condition.
    #[inline]
    pub fn step_index(&self, i: usize, n: usize, dir: isize) -> usize {
        let j = i as isize + dir;
        if j < 0 {
            match self.boundary {
                Boundary::Periodic => (j + n as isize) as usize,
                Boundary::Neumann => 0,
            }
        } else if j as usize >= n {
            match self.boundary {
                Boundary::Periodic => (j - n as isize) as usize,
                Boundary::Neumann => n - 1,
            }
        } else {
            j as usize
        }
    }

    /// Row-neighbour table: for each row, the row index of its ± neighbours
    /// along every axis except the last.
    pub(crate) fn row_neighbors(&self) -> Vec<[usize; 4]> {
        let rows = self.rows();
        let mut out = vec![[0usize; 4]; rows];
        match self.dim {
            1 => {}
            2 => {
                let n0 = self.cells[0];
                for (r, nb) in out.iter_mut().enumerate() {
                    nb[0] = self.step_index(r, n0, -1);
                    nb[1] = self.step_index(r, n0, 1);
                }
            }
            _ => {
                let (n0, n1) = (self.cells[0], self.cells[1]);
                for (r, nb) in out.iter_mut().enumerate() {
                    let (i0, i1) = (r / n1, r % n1);
                    nb[0] = self.step_index(i0, n0, -1) * n1 + i1;
                    nb[1] = self.step_index(i0, n0, 1) * n1 + i1;
                    nb[2] = i0 * n1 + self.step_index(i1, n1, -1);
                    nb[3] = i0 * n1 + self.step_index(i1, n1, 1);
                }
            }
        }
        out
    }

    /// Minimum-image displacement `b − a` along `axis` (periodic grids wrap).
    pub fn displacement(&self, axis: usize, a: T, b: T) -> T {
        let d = b - a;
        match self.boundary {
            Boundary::Neumann => d,
            Boundary::Periodic => {
                let l = self.extent(axis);
                d - l * (d / l).round()
            }
        }
    }
}

/// The pair (u, ∂ₜu) on a grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub grid: Grid<T>,
    pub k: usize,
    pub epsilon: T,
    pub time: T,
    /// `u[c]` is component c, flat grid layout.
    pub u: Vec<Vec<T>>,
    pub ut: Vec<Vec<T>>,
}

impl<T: Real> FieldState<T> {
    pub fn new(
        grid: Grid<T>,
        k: usize,
        epsilon: T,
        time: T,
        u: Vec<Vec<T>>,
        ut: Vec<Vec<T>>,
    ) -> Result<Self, FieldError> {
        if !(1..=2).contains(&k) {
            return Err(FieldError::Components(k));
        }
        if !(epsilon > T::zero() && epsilon.is_finite()) {
            return Err(FieldError::Epsilon(epsilon.to_f64_lossy()));
        }
        for arr in [&u, &ut] {
            if arr.len() != k {
                return Err(FieldError::Shape {
                    expected: k,
                    got: arr.len(),
                });
            }
            for c in arr.iter() {
                if c.len() != grid.len() {
                    return Err(FieldError::Shape {
                        expected: grid.len(),
                        got: c.len(),
                    });
                }
            }
        }
        Ok(Self {
            grid,
            k,
            epsilon,
            time,
            u,
            ut,
        })
    }

    /// Vacuum u ≡ (1, 0, …), uₜ ≡ 0.
    pub fn vacuum(grid: Grid<T>, k: usize, epsilon: T) -> Result<Self, FieldError> {
        let n = grid.len();
        let mut u = vec![vec![T::zero(); n]; k];
        u[0].iter_mut().for_each(|x| *x = T::one());
        Self::new(grid, k, epsilon, T::zero(), u, vec![vec![T::zero(); n]; k])
    }

    /// False if any entry is NaN or infinite (the state has diverged).
    pub fn is_finite(&self) -> bool {
        self.u
            .iter()
            .chain(self.ut.iter())
            .all(|c| c.iter().all(|x| x.is_finite()))
    }

    /// Value of the k-vector u at cell `i`.
    #[inline]
    pub fn u_at(&self, i: usize) -> [T; 2] {
        let mut v = [T::zero(); 2];
        for c in 0..self.k {
            v[c] = self.u[c][i];
        }
        v
    }
}

/// Double-well (k = 1) / Mexican-hat (k = 2) potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Potential {
    /// W(u) = (1 − |u|²)²/4.
    #[default]
    Quartic,
}

impl Potential {
    #[inline]
    pub fn eval<T: Real>(&self, u: &[T]) -> T {
        match self {
            Potential::Quartic => {
                let s = T::one() - norm_sq(u);
                s * s / T::lit(4.0)
            }
        }
    }

    /// ∇W(u) = −(1 − |u|²)u.
    #[inline]
    pub fn grad<T: Real>(&self, u: &[T], out: &mut [T]) {
        match self {
            Potential::Quartic => {
                let s = T::one() - norm_sq(u);
                for (o, &x) in out.iter_mut().zip(u) {
                    *o = -s * x;
                }
            }
        }
    }

    /// Radial profile W̃(s) = (1 − s²)²/4 so that W(u) = W̃(|u|).
    pub fn radial<T: Real>(&self, s: T) -> T {
        self.eval(&[s])
    }

    /// W̃′(s) = −s(1 − s²).
    pub fn radial_derivative<T: Real>(&self, s: T) -> T {
        -s * (T::one() - s * s)
    }

    /// Second derivative of the k = 1 potential, W″(u) = 3u² − 1.
    pub fn second_derivative<T: Real>(&self, u: T) -> T {
        T::lit(3.0) * u * u - T::one()
    }
}

#[inline]
fn norm_sq<T: Real>(u: &[T]) -> T {
    u.iter().fold(T::zero(), |a, &x| a + x * x)
}

pub fn potential_eval<T: Real>(p: Potential, u: &[T]) -> T {
    p.eval(u)
}

pub fn potential_grad<T: Real>(p: Potential, u: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); u.len()];
    p.grad(u, &mut out);
    out
}

/// Normalisation of the rescaled densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConstant<T> {
    pub k: usize,
    pub epsilon: T,
    pub value: T,
}

/// c₁(ε) = ε, c₂(ε) = 1/|log ε|.
pub fn c_k<T: Real>(k: usize, epsilon: T) -> Result<T, FieldError> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(FieldError::Epsilon(epsilon.to_f64_lossy()));
    }
    match k {
        1 => Ok(epsilon),
        2 => Ok(T::one() / epsilon.ln().abs()),
        _ => Err(FieldError::Components(k)),
    }
}

impl<T: Real> ScalingConstant<T> {
    pub fn new(k: usize, epsilon: T) -> Result<Self, FieldError> {
        Ok(Self {
            k,
            epsilon,
            value: c_k(k, epsilon)?,
        })
    }
}

/// Precomputed neighbour table for row-wise stencil sweeps.
#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    pub dim: usize,
    pub row_len: usize,
    pub periodic: bool,
    pub neighbors: Vec<[usize; 4]>,
}

impl Stencil {
    pub fn new<T: Real>(grid: &Grid<T>) -> Self {
        Self {
            dim: grid.dim(),
            row_len: grid.row_len(),
            periodic: grid.boundary() == Boundary::Periodic,
            neighbors: grid.row_neighbors(),
        }
    }

    /// Unscaled Laplacian sum Σᵢ u(x±heᵢ) − 2n·u(x) for row `r` of `src`.
    #[inline]
    pub fn laplacian_row<T: Real>(&self, src: &[T], r: usize, out: &mut [T]) {
        let len = self.row_len;
        let base = r * len;
        let row = &src[base..base + len];
        let nb = &self.neighbors[r];
        let off: &[usize] = match self.dim {
            1 => &[],
            2 => &nb[..2],
            _ => &nb[..4],
        };
        for i in 0..len {
            let left = if i == 0 {
                if self.periodic {
                    row[len - 1]
                } else {
                    row[0]
                }
            } else {
                row[i - 1]
            };
            let right = if i + 1 == len {
                if self.periodic {
                    row[0]
                } else {
                    row[len - 1]
                }
            } else {
                row[i + 1]
            };
            // differences against the centre keep constants exactly harmonic
            let c = row[i];
            let mut acc = (left - c) + (right - c);
            for &o in off {
                acc = acc + (src[o * len + i] - c);
            }
            out[i] = acc;
        }
    }

    /// Central difference ∂u/∂x_axis (unscaled, i.e. u(x+h) − u(x−h)).
    #[inline]
    pub fn diff_row<T: Real>(&self, src: &[T], r: usize, axis: usize, out: &mut [T]) {
        let len = self.row_len;
        let base = r * len;
        let row = &src[base..base + len];
        if axis == self.dim - 1 {
            for i in 0..len {
                let left = if i == 0 {
                    if self.periodic {
                        row[len - 1]
                    } else {
                        row[0]
                    }
                } else {
                    row[i - 1]
                };
                let right = if i + 1 == len {
                    if self.periodic {
                        row[0]
                    } else {
                        row[len - 1]
                    }
                } else {
                    row[i + 1]
                };
                out[i] = right - left;
            }
        } else {
            let nb = &self.neighbors[r];
            let (lo, hi) = (nb[2 * axis] * len, nb[2 * axis + 1] * len);
            for i in 0..len {
                out[i] = src[hi + i] - src[lo + i];
            }
        }
    }
}

/// Second-order (2n+1)-point Laplacian of every component.
pub fn laplacian<T: Real>(state: &FieldState<T>) -> Vec<Vec<T>> {
    let st = Stencil::new(&state.grid);
    let inv_h2 = T::one() / (state.grid.spacing() * state.grid.spacing());
    state
        .u
        .iter()
        .map(|src| {
            let mut out = vec![T::zero(); src.len()];
            out.par_chunks_mut(st.row_len)
                .enumerate()
                .for_each(|(r, o)| {
                    st.laplacian_row(src, r, o);
                    o.iter_mut().for_each(|x| *x = *x * inv_h2);
                });
            out
        })
        .collect()
}

/// Central-difference gradient of one component array: `out[axis][cell]`.
pub fn gradient<T: Real>(grid: &Grid<T>, comp: &[T]) -> Vec<Vec<T>> {
    let st = Stencil::new(grid);
    let inv_2h = T::one() / (T::lit(2.0) * grid.spacing());
    (0..grid.dim())
        .map(|axis| {
            let mut out = vec![T::zero(); comp.len()];
            out.par_chunks_mut(st.row_len)
                .enumerate()
                .for_each(|(r, o)| {
                    st.diff_row(comp, r, axis, o);
                    o.iter_mut().for_each(|x| *x = *x * inv_2h);
                });
            out
        })
        .collect()
}

/// Samples `f` (values) and `g` (time derivatives) at cell centres; t = 0.
pub fn init_from_profile<T, F, G>(
    grid: Grid<T>,
    k: usize,
    epsilon: T,
    f: F,
    g: G,
) -> Result<FieldState<T>, FieldError>
where
    T: Real,
    F: Fn(&[T], &mut [T]) + Sync,
    G: Fn(&[T], &mut [T]) + Sync,
{
    if !(1..=2).contains(&k) {
        return Err(FieldError::Components(k));
    }
    let n = grid.len();
    let dim = grid.dim();
    let mut u = vec![vec![T::zero(); n]; k];
    let mut ut = vec![vec![T::zero(); n]; k];
    for i in 0..n {
        let x = grid.center(i);
        let mut a = [T::zero(); 2];
        let mut b = [T::zero(); 2];
        f(&x[..dim], &mut a[..k]);
        g(&x[..dim], &mut b[..k]);
        if a[..k].iter().chain(b[..k].iter()).any(|v| !v.is_finite()) {
            return Err(FieldError::NonFiniteSample {
                coord: x[..dim].iter().map(|v| v.to_f64_lossy()).collect(),
            });
        }
        for c in 0..k {
            u[c][i] = a[c];
            ut[c][i] = b[c];
        }
    }
    FieldState::new(grid, k, epsilon, T::zero(), u, ut)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize, b: Boundary) -> Grid<f64> {
        Grid::new(&[n], &[0.0], 1.0 / n as f64, b).unwrap()
    }

    #[test]
    fn potential_examples() {
        let p = Potential::Quartic;
        assert_eq!(p.eval(&[1.0_f64]), 0.0);
        assert_eq!(p.eval(&[0.0_f64]), 0.25);
        assert!(p.eval(&[0.6_f64, 0.8]).abs() < 1e-16);
        assert_eq!(potential_grad(p, &[0.0_f64]), vec![0.0]);
        assert_eq!(potential_grad(p, &[1.0_f64, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn potential_grad_matches_finite_difference_at_half() {
        let p = Potential::Quartic;
        let d = 1e-6_f64;
        let fd = (p.eval(&[0.5 + d]) - p.eval(&[0.5 - d])) / (2.0 * d);
        assert!((fd - (-0.375)).abs() < 1e-9);
        assert!((potential_grad(p, &[0.5_f64])[0] - (-0.375)).abs() < 1e-15);
    }

    #[test]
    fn scaling_constant_examples() {
        assert_eq!(c_k(1, 0.05).unwrap(), 0.05);
        assert!((c_k(2, (-1.0_f64).exp()).unwrap() - 1.0).abs() < 1e-15);
        assert!((c_k(2, 0.01).unwrap() - 1.0 / 100f64.ln()).abs() < 1e-15);
        assert!((c_k(2, 0.01_f64).unwrap() - 0.21715).abs() < 1e-5);
        assert!(c_k(1, 1.0).is_err());
        assert!(c_k(2, 0.0).is_err());
        assert!(c_k(3, 0.5).is_err());
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(matches!(
            Grid::new(&[4], &[0.0], 0.1, Boundary::Periodic),
            Err(FieldError::TooFewCells { .. })
        ));
        assert!(matches!(
            Grid::new(&[8, 8, 8, 8], &[0.0; 4], 0.1, Boundary::Periodic),
            Err(FieldError::Dimension(4))
        ));
        assert!(Grid::new(&[8], &[0.0], -0.1, Boundary::Periodic).is_err());
        assert!(matches!(
            Grid::from_extents(&[8, 8], &[0.0, 0.0], &[1.0, 2.0], Boundary::Periodic),
            Err(FieldError::Anisotropic { .. })
        ));
        let g = Grid::from_extents(&[8, 16], &[0.0, 0.0], &[1.0, 2.0], Boundary::Periodic).unwrap();
        assert_eq!(g.spacing(), 0.125);
    }

    #[test]
    fn laplacian_of_constant_is_exactly_zero() {
        for b in [Boundary::Periodic, Boundary::Neumann] {
            for cells in [&[16][..], &[8, 12], &[8, 9, 10]] {
                let g = Grid::new(cells, &vec![0.0; cells.len()], 0.1, b).unwrap();
                let s = init_from_profile(
                    g,
                    2,
                    0.1,
                    |_, o| {
                        o[0] = 0.7;
                        o[1] = -1.3
                    },
                    |_, o| o.fill(0.0),
                )
                .unwrap();
                for c in laplacian(&s) {
                    assert!(c.iter().all(|&x| x == 0.0));
                }
            }
        }
    }

    #[test]
    fn periodic_laplacian_of_sine() {
        let n = 256;
        let g = grid1(n, Boundary::Periodic);
        let h = g.spacing();
        let tau = std::f64::consts::TAU;
        let s = init_from_profile(
            g,
            1,
            0.1,
            |x, o| o[0] = (tau * x[0]).sin(),
            |_, o| o[0] = 0.0,
        )
        .unwrap();
        let lap = laplacian(&s);
        let bound = tau.powi(4) * h * h / 12.0 * (1.0 + 1e-2);
        let err = (0..n)
            .map(|i| (lap[0][i] + tau * tau * (tau * s.grid.coord(0, i)).sin()).abs())
            .fold(0.0, f64::max);
        assert!(err <= bound, "err {err} bound {bound}");
    }

    #[test]
    fn neumann_laplacian_orders() {
        let pi = std::f64::consts::PI;
        let errs = |n: usize| {
            let g = grid1(n, Boundary::Neumann);
            let s = init_from_profile(
                g,
                1,
                0.1,
                |x, o| o[0] = (pi * x[0]).cos(),
                |_, o| o[0] = 0.0,
            )
            .unwrap();
            let lap = laplacian(&s);
            let e = |i: usize| (lap[0][i] + pi * pi * (pi * s.grid.coord(0, i)).cos()).abs();
            let interior = (2..n - 2).map(e).fold(0.0, f64::max);
            let boundary = e(0).max(e(n - 1));
            (interior, boundary)
        };
        let (i1, b1) = errs(64);
        let (i2, b2) = errs(128);
        let interior_order = (i1 / i2).log2();
        let boundary_order = (b1 / b2).log2();
        assert!((interior_order - 2.0).abs() < 0.1, "{interior_order}");
        assert!(boundary_order >= 0.9, "{boundary_order}");
    }

    #[test]
    fn vacuum_profile() {
        let g = grid1(16, Boundary::Periodic);
        let s = init_from_profile(g, 1, 0.1, |_, o| o[0] = 1.0, |_, o| o[0] = 0.0).unwrap();
        assert!(s.u[0].iter().all(|&x| x == 1.0));
        assert_eq!(s.time, 0.0);
    }

    #[test]
    fn init_reports_non_finite_coordinate() {
        let g = grid1(16, Boundary::Periodic);
        let e = init_from_profile(
            g,
            1,
            0.1,
            |x, o| o[0] = if x[0] > 0.5 { f64::NAN } else { 0.0 },
            |_, o| o[0] = 0.0,
        )
        .unwrap_err();
        match e {
            FieldError::NonFiniteSample { coord } => assert!(coord[0] > 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn state_shape_validation() {
        let g = grid1(16, Boundary::Periodic);
        assert!(FieldState::new(g.clone(), 3, 0.1, 0.0, vec![], vec![]).is_err());
        assert!(FieldState::new(
            g.clone(),
            1,
            0.1,
            0.0,
            vec![vec![0.0; 15]],
            vec![vec![0.0; 16]]
        )
        .is_err());
        assert!(FieldState::new(g, 1, 0.0, 0.0, vec![vec![0.0; 16]], vec![vec![0.0; 16]]).is_err());
    }

    #[test]
    fn gradient_neumann_boundary_uses_mirror() {
        let g = grid1(8, Boundary::Neumann);
        let comp: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let gr = gradient(&g, &comp);
        let h = g.spacing();
        assert_eq!(gr[0][0], 1.0 / (2.0 * h));
        assert_eq!(gr[0][3], 2.0 / (2.0 * h));
    }
}
