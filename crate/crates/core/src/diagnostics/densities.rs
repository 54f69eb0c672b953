use rayon::prelude::*;

use crate::field::{c_k, gradient, FieldState, Grid, Potential};
use crate::reduce::tree_sum;
use crate::Real;

/// Per-cell rescaled densities at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFields<T> {
    pub e: Vec<T>,
    pub l: Vec<T>,
    pub w: Vec<T>,
    pub cell_volume: T,
}

impl<T: Real> DensityFields<T> {
    pub fn total_e(&self) -> T {
        tree_sum(&self.e) * self.cell_volume
    }

    pub fn total_l(&self) -> T {
        tree_sum(&self.l) * self.cell_volume
    }

    pub fn total_w(&self) -> T {
        tree_sum(&self.w) * self.cell_volume
    }
}

/// Spatial derivatives shared by the density and tensor code.
///
/// `grad[c][axis][cell]` is the central difference. `sq[c][axis][cell]` is
/// ½((D⁺u)² + (D⁻u)²), the squared gradient the leapfrog scheme's discrete
/// energy is built from; it replaces (∂u)² on the diagonal.
pub(crate) struct Derivs<T> {
    pub grad: Vec<Vec<Vec<T>>>,
    pub sq: Vec<Vec<Vec<T>>>,
    pub scale: T,
    pub inv_eps2: T,
}

fn one_sided_squares<T: Real>(grid: &Grid<T>, comp: &[T]) -> Vec<Vec<T>> {
    let inv_h = T::one() / grid.spacing();
    let half = T::lit(0.5);
    let cells = grid.cells().to_vec();
    (0..grid.dim())
        .map(|axis| {
            let n = cells[axis];
            let fwd: Vec<T> = (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let mut m = grid.multi(i);
                    m[axis] = grid.step_index(m[axis], n, 1);
                    (comp[grid.flat(m)] - comp[i]) * inv_h
                })
                .collect();
            (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let mut m = grid.multi(i);
                    m[axis] = grid.step_index(m[axis], n, -1);
                    let back = fwd[grid.flat(m)];
                    // the mirrored ghost has zero one-sided difference
                    let back = if grid.flat(m) == i { T::zero() } else { back };
                    half * (fwd[i] * fwd[i] + back * back)
                })
                .collect()
        })
        .collect()
}

impl<T: Real> Derivs<T> {
    pub fn new(state: &FieldState<T>) -> Self {
        let scale = c_k(state.k, state.epsilon).expect("state epsilon validated on construction");
        Self {
            grad: state.u.iter().map(|c| gradient(&state.grid, c)).collect(),
            sq: state
                .u
                .iter()
                .map(|c| one_sided_squares(&state.grid, c))
                .collect(),
            scale,
            inv_eps2: T::one() / (state.epsilon * state.epsilon),
        }
    }

    /// (|uₜ|², |∇u|², W(u)) at a cell.
    #[inline]
    pub fn parts(&self, state: &FieldState<T>, i: usize) -> (T, T, T) {
        let mut ut2 = T::zero();
        let mut g2 = T::zero();
        let mut u = [T::zero(); 2];
        for c in 0..state.k {
            ut2 = ut2 + state.ut[c][i] * state.ut[c][i];
            for g in &self.sq[c] {
                g2 = g2 + g[i];
            }
            u[c] = state.u[c][i];
        }
        (ut2, g2, Potential::Quartic.eval(&u[..state.k]))
    }

    /// (e, ℓ, w) at a cell.
    #[inline]
    pub fn densities_at(&self, state: &FieldState<T>, i: usize) -> (T, T, T) {
        let (ut2, g2, w) = self.parts(state, i);
        let half = T::lit(0.5);
        let pot = w * self.inv_eps2;
        let c = self.scale;
        (
            c * ((ut2 + g2) * half + pot),
            c * ((g2 - ut2) * half + pot),
            c * pot,
        )
    }
}

/// e = c((|uₜ|² + |∇u|²)/2 + W/ε²), ℓ = c((−|uₜ|² + |∇u|²)/2 + W/ε²),
/// w = cW/ε², with c = c_k(ε) and |∇u|² from one-sided differences.
pub fn densities<T: Real>(state: &FieldState<T>) -> DensityFields<T> {
    let d = Derivs::new(state);
    let triples: Vec<(T, T, T)> = (0..state.grid.len())
        .into_par_iter()
        .map(|i| d.densities_at(state, i))
        .collect();
    let mut e = Vec::with_capacity(triples.len());
    let mut l = Vec::with_capacity(triples.len());
    let mut w = Vec::with_capacity(triples.len());
    for (a, b, c) in triples {
        e.push(a);
        l.push(b);
        w.push(c);
    }
    DensityFields {
        e,
        l,
        w,
        cell_volume: state.grid.cell_volume(),
    }
}

/// Σ e·hⁿ with the deterministic tree sum.
pub fn total_energy<T: Real>(state: &FieldState<T>) -> T {
    densities(state).total_e()
}
