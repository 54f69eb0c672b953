use std::collections::HashMap;

use super::DiagnosticsError;
use crate::field::{Boundary, FieldState};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceKind {
    LevelSet,
    Vortex,
}

/// Discrete concentration set at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSet<T> {
    pub dim: usize,
    pub kind: InterfaceKind,
    pub time: T,
    pub points: Vec<[T; 3]>,
    /// Polyline edges between points (n = 2 level sets only).
    pub segments: Vec<[usize; 2]>,
    /// Winding numbers (vortices only).
    pub windings: Vec<i32>,
    /// Velocity estimates; empty until [`estimate_velocities`] is applied.
    pub velocities: Vec<[T; 3]>,
}

impl<T: Real> InterfaceSet<T> {
    fn empty(dim: usize, kind: InterfaceKind, time: T) -> Self {
        Self {
            dim,
            kind,
            time,
            points: Vec::new(),
            segments: Vec::new(),
            windings: Vec::new(),
            velocities: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Zero set of a k = 1 field (edge crossings; marching squares in 2D) or the
/// vortices of a k = 2 field in 2D (plaquette winding numbers).
pub fn interface_extract<T: Real>(
    state: &FieldState<T>,
) -> Result<InterfaceSet<T>, DiagnosticsError> {
    match (state.k, state.grid.dim()) {
        (1, 1) => Ok(level_set_1d(state)),
        (1, 2) => Ok(marching_squares(state)),
        (1, 3) => Ok(edge_cloud_3d(state)),
        (2, 2) => Ok(vortices(state)),
        (k, n) => Err(DiagnosticsError::Unsupported(format!(
            "interface extraction for k = {k}, n = {n}"
        ))),
    }
}

/// Neighbour index along an axis or `None` past a Neumann boundary.
fn next_index(n: usize, i: usize, boundary: Boundary) -> Option<usize> {
    if i + 1 < n {
        Some(i + 1)
    } else if boundary == Boundary::Periodic {
        Some(0)
    } else {
        None
    }
}

/// Fraction along the edge a → b where the linear interpolant vanishes.
#[inline]
fn crossing<T: Real>(a: T, b: T) -> Option<T> {
    if (a > T::zero()) != (b > T::zero()) {
        Some(a / (a - b))
    } else {
        None
    }
}

fn level_set_1d<T: Real>(state: &FieldState<T>) -> InterfaceSet<T> {
    let g = &state.grid;
    let u = &state.u[0];
    let n = g.cells()[0];
    let h = g.spacing();
    let mut out = InterfaceSet::empty(1, InterfaceKind::LevelSet, state.time);
    for i in 0..n {
        let Some(j) = next_index(n, i, g.boundary()) else {
            continue;
        };
        if let Some(f) = crossing(u[i], u[j]) {
            out.points
                .push([g.coord(0, i) + f * h, T::zero(), T::zero()]);
        }
    }
    out
}

fn marching_squares<T: Real>(state: &FieldState<T>) -> InterfaceSet<T> {
    let g = &state.grid;
    let u = &state.u[0];
    let (n0, n1) = (g.cells()[0], g.cells()[1]);
    let h = g.spacing();
    let b = g.boundary();
    let at = |i: usize, j: usize| u[i * n1 + j];
    let mut out = InterfaceSet::empty(2, InterfaceKind::LevelSet, state.time);
    // edge key: (i, j, axis) of the edge starting at node (i, j)
    let mut index: HashMap<(usize, usize, u8), usize> = HashMap::new();
    let mut point_on = |i: usize, j: usize, axis: u8, out: &mut InterfaceSet<T>| -> Option<usize> {
        if let Some(&p) = index.get(&(i, j, axis)) {
            return Some(p);
        }
        let (i2, j2) = if axis == 0 {
            (next_index(n0, i, b)?, j)
        } else {
            (i, next_index(n1, j, b)?)
        };
        let f = crossing(at(i, j), at(i2, j2))?;
        let mut p = [g.coord(0, i), g.coord(1, j), T::zero()];
        p[axis as usize] = p[axis as usize] + f * h;
        out.points.push(p);
        index.insert((i, j, axis), out.points.len() - 1);
        Some(out.points.len() - 1)
    };
    for i in 0..n0 {
        let Some(i1) = next_index(n0, i, b) else {
            continue;
        };
        for j in 0..n1 {
            let Some(j1) = next_index(n1, j, b) else {
                continue;
            };
            // corners counter-clockwise: (i,j), (i1,j), (i1,j1), (i,j1)
            let v = [at(i, j), at(i1, j), at(i1, j1), at(i, j1)];
            let case = v
                .iter()
                .enumerate()
                .fold(0u8, |c, (k, &x)| c | (((x > T::zero()) as u8) << k));
            if case == 0 || case == 15 {
                continue;
            }
            // edges: 0 = bottom (i,j)-(i1,j), 1 = right (i1,j)-(i1,j1),
            //        2 = top (i,j1)-(i1,j1), 3 = left (i,j)-(i,j1)
            let edge_key = [(i, j, 0u8), (i1, j, 1u8), (i, j1, 0u8), (i, j, 1u8)];
            let crossed: Vec<usize> = (0..4)
                .filter(|&e| {
                    let (a, c) = match e {
                        0 => (v[0], v[1]),
                        1 => (v[1], v[2]),
                        2 => (v[3], v[2]),
                        _ => (v[0], v[3]),
                    };
                    (a > T::zero()) != (c > T::zero())
                })
                .collect();
            let pairs: Vec<[usize; 2]> = if crossed.len() == 2 {
                vec![[crossed[0], crossed[1]]]
            } else {
                // saddle: decide by the cell-centre average
                let centre_pos = (v[0] + v[1] + v[2] + v[3]) > T::zero();
                let corner0_pos = v[0] > T::zero();
                if centre_pos == corner0_pos {
                    vec![[0, 1], [2, 3]]
                } else {
                    vec![[0, 3], [1, 2]]
                }
            };
            for [e0, e1] in pairs {
                let (a0, b0, c0) = edge_key[e0];
                let (a1, b1, c1) = edge_key[e1];
                if let (Some(p), Some(q)) = (
                    point_on(a0, b0, c0, &mut out),
                    point_on(a1, b1, c1, &mut out),
                ) {
                    out.segments.push([p, q]);
                }
            }
        }
    }
    out
}

fn edge_cloud_3d<T: Real>(state: &FieldState<T>) -> InterfaceSet<T> {
    let g = &state.grid;
    let u = &state.u[0];
    let c = g.cells();
    let h = g.spacing();
    let mut out = InterfaceSet::empty(3, InterfaceKind::LevelSet, state.time);
    for flat in 0..g.len() {
        let m = g.multi(flat);
        for axis in 0..3 {
            let Some(nx) = next_index(c[axis], m[axis], g.boundary()) else {
                continue;
            };
            let mut m2 = m;
            m2[axis] = nx;
            if let Some(f) = crossing(u[flat], u[g.flat(m2)]) {
                let mut p = [g.coord(0, m[0]), g.coord(1, m[1]), g.coord(2, m[2])];
                p[axis] = p[axis] + f * h;
                out.points.push(p);
            }
        }
    }
    out
}

fn wrap_angle<T: Real>(a: T) -> T {
    let tau = T::TAU();
    a - tau * (a / tau).round()
}

fn vortices<T: Real>(state: &FieldState<T>) -> InterfaceSet<T> {
    let g = &state.grid;
    let (n0, n1) = (g.cells()[0], g.cells()[1]);
    let h = g.spacing();
    let b = g.boundary();
    let re = &state.u[0];
    let im = &state.u[1];
    let phase = |i: usize, j: usize| im[i * n1 + j].atan2(re[i * n1 + j]);
    let val = |i: usize, j: usize| [re[i * n1 + j], im[i * n1 + j]];
    let mut out = InterfaceSet::empty(2, InterfaceKind::Vortex, state.time);
    for i in 0..n0 {
        let Some(i1) = next_index(n0, i, b) else {
            continue;
        };
        for j in 0..n1 {
            let Some(j1) = next_index(n1, j, b) else {
                continue;
            };
            let ring = [(i, j), (i1, j), (i1, j1), (i, j1)];
            let mut total = T::zero();
            for k in 0..4 {
                let (p, q) = (ring[k], ring[(k + 1) % 4]);
                total = total + wrap_angle(phase(q.0, q.1) - phase(p.0, p.1));
            }
            let w = (total / T::TAU()).round().to_i32().unwrap_or(0);
            if w == 0 {
                continue;
            }
            // linear model u ≈ ū + J·δ from the four corners
            let [a, bb, c, d] = ring.map(|(x, y)| val(x, y));
            let mut mean = [T::zero(); 2];
            let mut jx = [T::zero(); 2];
            let mut jy = [T::zero(); 2];
            let two_h = T::lit(2.0) * h;
            for comp in 0..2 {
                mean[comp] = (a[comp] + bb[comp] + c[comp] + d[comp]) / T::lit(4.0);
                jx[comp] = ((bb[comp] - a[comp]) + (c[comp] - d[comp])) / two_h;
                jy[comp] = ((d[comp] - a[comp]) + (c[comp] - bb[comp])) / two_h;
            }
            let det = jx[0] * jy[1] - jy[0] * jx[1];
            let half = h / T::lit(2.0);
            let (mut dx, mut dy) = (T::zero(), T::zero());
            if det.abs() > T::min_positive_value() {
                dx = -(jy[1] * mean[0] - jy[0] * mean[1]) / det;
                dy = -(-jx[1] * mean[0] + jx[0] * mean[1]) / det;
                dx = dx.max(-half).min(half);
                dy = dy.max(-half).min(half);
            }
            out.points.push([
                g.coord(0, i) + half + dx,
                g.coord(1, j) + half + dy,
                T::zero(),
            ]);
            out.windings.push(w);
        }
    }
    out
}

fn dist<T: Real>(a: &[T; 3], b: &[T; 3], dim: usize) -> T {
    (0..dim)
        .fold(T::zero(), |s, k| s + (a[k] - b[k]) * (a[k] - b[k]))
        .sqrt()
}

/// Velocity per point of `curr` from its nearest point in `prev`, `dt`
/// earlier. For vortices, matches farther than 1.5·dt are rejected (NaN).
pub fn estimate_velocities<T: Real>(prev: &InterfaceSet<T>, curr: &mut InterfaceSet<T>, dt: T) {
    let dim = curr.dim;
    let limit = T::lit(1.5) * dt;
    curr.velocities = curr
        .points
        .iter()
        .map(|p| {
            let best = prev
                .points
                .iter()
                .map(|q| (dist(p, q, dim), q))
                .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
            match best {
                Some((d, q)) if curr.kind == InterfaceKind::LevelSet || d <= limit => {
                    let mut v = [T::zero(); 3];
                    for k in 0..dim {
                        v[k] = (p[k] - q[k]) / dt;
                    }
                    v
                }
                _ => [T::nan(); 3],
            }
        })
        .collect();
}

/// Hausdorff distance between a 2D point set and the circle |x − c| = r.
/// The circle side is sampled at 4096 angles (plus the polyline segments
/// when present, which bound gaps between points).
pub fn hausdorff_to_circle<T: Real>(set: &InterfaceSet<T>, center: [T; 2], r: T) -> T {
    if set.points.is_empty() {
        return T::infinity();
    }
    let radial =
        |p: &[T; 3]| (((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt() - r).abs();
    let mut d = set.points.iter().fold(T::zero(), |m, p| m.max(radial(p)));
    let samples = 4096;
    for s in 0..samples {
        let th = T::TAU() * T::from_usize_lossy(s) / T::from_usize_lossy(samples);
        let c = [
            center[0] + r * th.cos(),
            center[1] + r * th.sin(),
            T::zero(),
        ];
        let near = if set.segments.is_empty() {
            set.points
                .iter()
                .fold(T::infinity(), |m, p| m.min(dist(&c, p, 2)))
        } else {
            set.segments.iter().fold(T::infinity(), |m, seg| {
                m.min(point_segment(&c, &set.points[seg[0]], &set.points[seg[1]]))
            })
        };
        d = d.max(near);
    }
    d
}

fn point_segment<T: Real>(p: &[T; 3], a: &[T; 3], b: &[T; 3]) -> T {
    let (ax, ay) = (b[0] - a[0], b[1] - a[1]);
    let len2 = ax * ax + ay * ay;
    let s = if len2 > T::zero() {
        (((p[0] - a[0]) * ax + (p[1] - a[1]) * ay) / len2)
            .max(T::zero())
            .min(T::one())
    } else {
        T::zero()
    };
    let q = [a[0] + s * ax, a[1] + s * ay, T::zero()];
    dist(p, &q, 2)
}

/// Symmetric Hausdorff distance (n = 2) between the extracted polylines and
/// reference polylines, measured point to segment in both directions, so
/// the vertex spacing of either curve does not enter.
pub fn hausdorff_to_polylines<T: Real>(
    set: &InterfaceSet<T>,
    lines: &[Vec<[T; 3]>],
    closed: bool,
) -> T {
    if set.points.is_empty() || lines.iter().all(|l| l.is_empty()) {
        return T::infinity();
    }
    let to_lines = |p: &[T; 3]| {
        lines
            .iter()
            .filter(|l| !l.is_empty())
            .fold(T::infinity(), |d, l| {
                let m = l.len();
                let edges = if closed { m } else { m - 1 };
                if edges == 0 {
                    return d.min(dist(p, &l[0], 2));
                }
                (0..edges).fold(d, |d, i| d.min(point_segment(p, &l[i], &l[(i + 1) % m])))
            })
    };
    let to_set = |p: &[T; 3]| {
        if set.segments.is_empty() {
            set.points
                .iter()
                .fold(T::infinity(), |d, q| d.min(dist(p, q, 2)))
        } else {
            set.segments.iter().fold(T::infinity(), |d, seg| {
                d.min(point_segment(p, &set.points[seg[0]], &set.points[seg[1]]))
            })
        }
    };
    let a = set.points.iter().fold(T::zero(), |d, p| d.max(to_lines(p)));
    lines.iter().flatten().fold(a, |d, p| d.max(to_set(p)))
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff_points<T: Real>(a: &[[T; 3]], b: &[[T; 3]], dim: usize) -> T {
    if a.is_empty() || b.is_empty() {
        return T::infinity();
    }
    let directed = |x: &[[T; 3]], y: &[[T; 3]]| {
        x.iter().fold(T::zero(), |m, p| {
            m.max(y.iter().fold(T::infinity(), |n, q| n.min(dist(p, q, dim))))
        })
    };
    directed(a, b).max(directed(b, a))
}
