use super::densities::DensityFields;
use super::stress::SymTensorField;
use super::DiagnosticsError;
use crate::field::Grid;
use crate::minkowski::{
    classify_slice, eig_eta_selfadjoint, null_vector, CausalClass, Mat, SymTensor, DEFAULT_TOL_NULL,
};
use crate::reduce::tree_sum;
use crate::Real;

/// Eigenvalues within this distance of 0 count as zero.
pub const ZERO_EIGEN_TOL: f64 = 0.05;

/// Image vectors shorter than this fraction of the input are treated as 0
/// in the space-like check.
const NEGLIGIBLE_IMAGE: f64 = 0.05;

/// Tube-averaged tensor T̃ = ΣT/Σℓ and the spectrum of ηT̃.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport<T> {
    pub t_tilde: SymTensor<T>,
    /// Real parts of the eigenvalues of ηT̃, descending.
    pub eigenvalues: Vec<T>,
    pub lambda0: T,
    pub zero_count: usize,
    pub trace: T,
    /// (Id − ηT̃)ξ is space-like (or negligible) for every probe ξ.
    pub spacelike_ok: bool,
    /// False if the characteristic polynomial had complex roots.
    pub real_spectrum: bool,
    pub tube_mass: T,
}

fn in_ball<T: Real>(grid: &Grid<T>, i: usize, p: &[T], rho: T) -> bool {
    let x = grid.center(i);
    let r2 = (0..grid.dim()).fold(T::zero(), |s, a| {
        let d = grid.displacement(a, p[a], x[a]);
        s + d * d
    });
    r2 <= rho * rho
}

/// Projection report for a spatial ball of radius ρ around `p` at one time.
pub fn projection_report<T: Real>(
    field: &SymTensorField<T>,
    d: &DensityFields<T>,
    grid: &Grid<T>,
    p: &[T],
    rho: T,
) -> Result<ProjectionReport<T>, DiagnosticsError> {
    projection_report_window(&[(field, d)], grid, p, rho)
}

/// As [`projection_report`], summing the tube over several snapshots.
pub fn projection_report_window<T: Real>(
    window: &[(&SymTensorField<T>, &DensityFields<T>)],
    grid: &Grid<T>,
    p: &[T],
    rho: T,
) -> Result<ProjectionReport<T>, DiagnosticsError> {
    let min = T::lit(3.0) * grid.spacing();
    if rho < min * (T::one() - T::lit(1e-12)) {
        return Err(DiagnosticsError::TubeTooThin {
            radius: rho.to_f64_lossy(),
            min: min.to_f64_lossy(),
        });
    }
    let size = grid.dim() + 1;
    let cells: Vec<usize> = (0..grid.len())
        .filter(|&i| in_ball(grid, i, p, rho))
        .collect();
    if cells.is_empty() {
        return Err(DiagnosticsError::EmptyTube);
    }
    let mut ls = Vec::new();
    let mut comps = vec![Vec::new(); size * size];
    for (f, d) in window {
        for &i in &cells {
            ls.push(d.l[i]);
            for a in 0..size {
                for b in a..size {
                    comps[a * size + b].push(f.tensors[i].get(a, b));
                }
            }
        }
    }
    let mass = tree_sum(&ls) * grid.cell_volume();
    if !(mass > T::lit(1e-10)) {
        return Err(DiagnosticsError::InsufficientConcentration(
            mass.to_f64_lossy(),
        ));
    }
    let lsum = tree_sum(&ls);
    let mut t_tilde = SymTensor::zeros(size);
    for a in 0..size {
        for b in a..size {
            t_tilde.set(a, b, tree_sum(&comps[a * size + b]) / lsum);
        }
    }
    Ok(report_for(t_tilde, mass))
}

fn report_for<T: Real>(t_tilde: SymTensor<T>, mass: T) -> ProjectionReport<T> {
    let size = t_tilde.size();
    let spec = eig_eta_selfadjoint(&t_tilde);
    let zero_count = spec
        .values
        .iter()
        .filter(|v| v.abs() <= T::lit(ZERO_EIGEN_TOL))
        .count();
    let p = t_tilde.lower_first();
    let m = Mat::identity(size).sub(&p);
    let mut probes = halton_directions::<T>(size, 100);
    if spec.real {
        for &lam in &spec.values {
            let mut shifted = p;
            for i in 0..size {
                shifted.set(i, i, shifted.get(i, i) - lam);
            }
            probes.push(null_vector(&shifted));
        }
    }
    let spacelike_ok = probes.iter().all(|xi| {
        let img = m.apply(xi);
        let nx = xi.iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
        let ni = img.iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
        ni <= T::lit(NEGLIGIBLE_IMAGE) * nx
            || classify_slice(&img, T::lit(DEFAULT_TOL_NULL)) == CausalClass::SpaceLike
    });
    ProjectionReport {
        lambda0: spec.values[0],
        trace: t_tilde.eta_trace(),
        eigenvalues: spec.values,
        zero_count,
        spacelike_ok,
        real_spectrum: spec.real,
        t_tilde,
        tube_mass: mass,
    }
}

/// Deterministic unit directions from the Halton sequence mapped to [−1, 1].
fn halton_directions<T: Real>(size: usize, count: usize) -> Vec<Vec<T>> {
    const PRIMES: [usize; 4] = [2, 3, 5, 7];
    let radical = |mut i: usize, base: usize| {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    };
    (1..=count)
        .map(|i| {
            let v: Vec<f64> = (0..size)
                .map(|a| 2.0 * radical(i, PRIMES[a]) - 1.0)
                .collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            v.iter().map(|x| T::lit(x / n)).collect()
        })
        .collect()
}

/// Σw/Σℓ over cells with ℓ > θ·max ℓ.
pub fn equipartition_ratio<T: Real>(d: &DensityFields<T>, theta: T) -> Result<T, DiagnosticsError> {
    let lmax = d.l.iter().fold(T::zero(), |a, &x| a.max(x));
    if !(lmax > T::zero()) {
        return Err(DiagnosticsError::EmptyTube);
    }
    let cut = theta * lmax;
    let idx: Vec<usize> = (0..d.l.len()).filter(|&i| d.l[i] > cut).collect();
    ratio(d, &idx)
}

/// Σw/Σℓ over the cells of a spatial ball (no density threshold).
pub fn equipartition_ratio_in_ball<T: Real>(
    d: &DensityFields<T>,
    grid: &Grid<T>,
    center: &[T],
    radius: T,
) -> Result<T, DiagnosticsError> {
    let idx: Vec<usize> = (0..grid.len())
        .filter(|&i| in_ball(grid, i, center, radius))
        .collect();
    ratio(d, &idx)
}

fn ratio<T: Real>(d: &DensityFields<T>, idx: &[usize]) -> Result<T, DiagnosticsError> {
    let ls: Vec<T> = idx.iter().map(|&i| d.l[i]).collect();
    let ws: Vec<T> = idx.iter().map(|&i| d.w[i]).collect();
    let l = tree_sum(&ls);
    if idx.is_empty() || !(l > T::zero()) {
        return Err(DiagnosticsError::EmptyTube);
    }
    Ok(tree_sum(&ws) / l)
}

/// ℓ(B_ρ)/ρ^{n+1−k} for space-time Euclidean balls around (t₀, p). Each
/// snapshot carries its time; slabs get trapezoid weights.
pub fn density_ratio_probe<T: Real>(
    window: &[(T, &DensityFields<T>)],
    grid: &Grid<T>,
    k: usize,
    t0: T,
    p: &[T],
    radii: &[T],
) -> Vec<T> {
    let m = window.len();
    let half = T::lit(0.5);
    let weights: Vec<T> = (0..m)
        .map(|i| {
            let left = if i > 0 {
                window[i].0 - window[i - 1].0
            } else {
                T::zero()
            };
            let right = if i + 1 < m {
                window[i + 1].0 - window[i].0
            } else {
                T::zero()
            };
            (left + right) * half
        })
        .collect();
    let exponent = (grid.dim() + 1).saturating_sub(k) as i32;
    radii
        .iter()
        .map(|&rho| {
            let mut terms = Vec::new();
            for ((t, d), &wt) in window.iter().zip(&weights) {
                let dt = *t - t0;
                if dt.abs() > rho {
                    continue;
                }
                let r_slice = (rho * rho - dt * dt).sqrt();
                let mut slab = Vec::new();
                for i in 0..grid.len() {
                    if in_ball(grid, i, p, r_slice) {
                        slab.push(d.l[i]);
                    }
                }
                terms.push(tree_sum(&slab) * grid.cell_volume() * wt);
            }
            tree_sum(&terms) / rho.powi(exponent)
        })
        .collect()
}
