use rayon::prelude::*;

use super::densities::Derivs;
use super::DiagnosticsError;
use crate::field::{gradient, FieldState};
use crate::minkowski::SymTensor;
use crate::reduce::tree_sum;
use crate::Real;

/// Per-cell stress-energy tensors T^{αβ}.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField<T> {
    pub dim: usize,
    pub tensors: Vec<SymTensor<T>>,
}

impl<T: Real> SymTensorField<T> {
    /// One component T^{ab} as a flat cell array.
    pub fn component(&self, a: usize, b: usize) -> Vec<T> {
        self.tensors.iter().map(|t| t.get(a, b)).collect()
    }
}

/// T^{00} = −c|uₜ|² − ℓ, T^{0i} = c uₜ·∂ᵢu, T^{ij} = −c ∂ᵢu·∂ⱼu + ℓδᵢⱼ.
/// Diagonal squares use the same one-sided form as the densities.
pub fn stress_energy<T: Real>(state: &FieldState<T>) -> SymTensorField<T> {
    let d = Derivs::new(state);
    let n = state.grid.dim();
    let c = d.scale;
    let tensors = (0..state.grid.len())
        .into_par_iter()
        .map(|i| {
            let (_, l, _) = d.densities_at(state, i);
            let mut t = SymTensor::zeros(n + 1);
            let mut ut2 = T::zero();
            for k in 0..state.k {
                ut2 = ut2 + state.ut[k][i] * state.ut[k][i];
            }
            t.set(0, 0, -c * ut2 - l);
            for a in 0..n {
                let mut s = T::zero();
                for k in 0..state.k {
                    s = s + state.ut[k][i] * d.grad[k][a][i];
                }
                t.set(0, a + 1, c * s);
                for b in a..n {
                    let mut g = T::zero();
                    for k in 0..state.k {
                        g = g + if a == b {
                            d.sq[k][a][i]
                        } else {
                            d.grad[k][a][i] * d.grad[k][b][i]
                        };
                    }
                    let diag = if a == b { l } else { T::zero() };
                    t.set(a + 1, b + 1, -c * g + diag);
                }
            }
            t
        })
        .collect();
    SymTensorField { dim: n, tensors }
}

/// ∂_β T^{αβ} per cell, with norms.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceResidual<T> {
    pub per_cell: Vec<[T; 4]>,
    pub max: T,
    pub l2: T,
}

/// Central differences in t (outer snapshots) and x (middle snapshot) of
/// T^{αβ}. The three states must be consecutive at spacing `dt`.
pub fn divergence_residual<T: Real>(
    window: &[FieldState<T>],
    dt: T,
) -> Result<DivergenceResidual<T>, DiagnosticsError> {
    if window.len() != 3 {
        return Err(DiagnosticsError::Window {
            need: 3,
            got: window.len(),
        });
    }
    if window
        .iter()
        .any(|s| s.grid != window[1].grid || s.k != window[1].k)
    {
        return Err(DiagnosticsError::Mismatch);
    }
    let grid = &window[1].grid;
    let n = grid.dim();
    let t0 = stress_energy(&window[0]);
    let t1 = stress_energy(&window[1]);
    let t2 = stress_energy(&window[2]);
    let two_dt = T::lit(2.0) * dt;
    let mut per_cell = vec![[T::zero(); 4]; grid.len()];
    for a in 0..=n {
        for (i, r) in per_cell.iter_mut().enumerate() {
            r[a] = (t2.tensors[i].get(a, 0) - t0.tensors[i].get(a, 0)) / two_dt;
        }
        for b in 1..=n {
            let g = gradient(grid, &t1.component(a, b));
            for (i, r) in per_cell.iter_mut().enumerate() {
                r[a] = r[a] + g[b - 1][i];
            }
        }
    }
    let max = per_cell
        .iter()
        .flat_map(|r| r[..=n].iter())
        .fold(T::zero(), |m, &x| m.max(x.abs()));
    let sq: Vec<T> = per_cell
        .iter()
        .map(|r| r[..=n].iter().fold(T::zero(), |s, &x| s + x * x))
        .collect();
    let l2 = (tree_sum(&sq) * grid.cell_volume()).sqrt();
    Ok(DivergenceResidual { per_cell, max, l2 })
}
