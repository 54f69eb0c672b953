//! Reference solvers for time-like minimal hypersurfaces.
//!
//! All three solve the normal law A = (1 − V²)κ, with A the normal
//! acceleration, V the normal velocity and κ the signed mean curvature.
//! Sign convention throughout: ν is the outward normal, so κ < 0 on convex
//! curves and spheres.
//!
//! # Graph form
//!
//! For a graph x = h(t, y) over one space variable the Minkowski area is
//! ∫∫ √(1 − hₜ² + h_y²) dy dt. Its Euler–Lagrange equation,
//! ∂ₜ(hₜ/√·) − ∂_y(h_y/√·) = 0, expands after multiplying by (1 − hₜ² + h_y²)^{3/2} to
//!
//! ```text
//! (1 + h_y²)hₜₜ − 2hₜh_y hₜy − (1 − hₜ²)h_yy = 0.
//! ```
//!
//! The area integral itself is not conserved; the Noether energy is
//! hₜ·∂L/∂hₜ − L with L = −√(1 − hₜ² + h_y²), i.e.
//! ∫ (1 + h_y²)/√(1 − hₜ² + h_y²) dy.

use std::io::{self, Write};

use crate::Real;

/// State of the radially symmetric surface r(t) in ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialState<T> {
    pub t: T,
    pub r: T,
    pub rdot: T,
}

/// (ṙ, r̈) with r̈ = −(1 − ṙ²)(n − 1)/r.
pub fn radial_rhs<T: Real>(r: T, rdot: T, n: usize) -> (T, T) {
    let nm1 = T::from_usize_lossy(n.saturating_sub(1));
    (rdot, -(T::one() - rdot * rdot) * nm1 / r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialStatus<T> {
    Completed,
    /// Collapse detected; t* extrapolated linearly as t + r/|ṙ|.
    Singular {
        t_star: T,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution<T> {
    pub samples: Vec<RadialState<T>>,
    pub status: RadialStatus<T>,
}

/// Classic RK4 for the radial law from (r0, rdot0) at t = 0 up to `t_end`.
/// Halts as Singular once r < 10·dt or 1 − ṙ² < 1e−6.
pub fn radial_solve<T: Real>(r0: T, rdot0: T, n: usize, dt: T, t_end: T) -> RadialSolution<T> {
    assert!(
        r0 > T::zero() && dt > T::zero(),
        "radial_solve needs r0 > 0 and dt > 0"
    );
    let mut s = RadialState {
        t: T::zero(),
        r: r0,
        rdot: rdot0,
    };
    let mut samples = vec![s];
    let tol = T::lit(1e-12) * (T::one() + t_end.abs());
    loop {
        if s.r < T::lit(10.0) * dt || T::one() - s.rdot * s.rdot < T::lit(1e-6) {
            let t_star = if s.rdot < T::zero() {
                s.t + s.r / s.rdot.abs()
            } else {
                s.t
            };
            return RadialSolution {
                samples,
                status: RadialStatus::Singular { t_star },
            };
        }
        if s.t >= t_end - tol {
            return RadialSolution {
                samples,
                status: RadialStatus::Completed,
            };
        }
        let h = dt.min(t_end - s.t);
        let f = |r: T, v: T| radial_rhs(r, v, n);
        let half = h / T::lit(2.0);
        let k1 = f(s.r, s.rdot);
        let k2 = f(s.r + half * k1.0, s.rdot + half * k1.1);
        let k3 = f(s.r + half * k2.0, s.rdot + half * k2.1);
        let k4 = f(s.r + h * k3.0, s.rdot + h * k3.1);
        let six = T::lit(6.0);
        let two = T::lit(2.0);
        s = RadialState {
            t: s.t + h,
            r: s.r + h * (k1.0 + two * k2.0 + two * k3.0 + k4.0) / six,
            rdot: s.rdot + h * (k1.1 + two * k2.1 + two * k3.1 + k4.1) / six,
        };
        samples.push(s);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinimalError {
    /// Area element or polygon degenerated at time t.
    Singular { t: f64 },
}

impl std::fmt::Display for MinimalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MinimalError::Singular { t } => write!(f, "singular at t = {t}"),
        }
    }
}

impl std::error::Error for MinimalError {}

/// Graph h(t, y) = slope·y + p(t, y) over a periodic interval with p periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphState<T> {
    pub length: T,
    pub slope: T,
    pub p: Vec<T>,
    pub hdot: Vec<T>,
    pub t: T,
}

impl<T: Real> GraphState<T> {
    pub fn dy(&self) -> T {
        self.length / T::from_usize_lossy(self.p.len())
    }

    pub fn y(&self, i: usize) -> T {
        T::from_usize_lossy(i) * self.dy()
    }

    /// h at sample i.
    pub fn h(&self, i: usize) -> T {
        self.slope * self.y(i) + self.p[i]
    }

    /// Samples h and hₜ from closures on y ∈ [0, length).
    pub fn from_fn(
        cells: usize,
        length: T,
        slope: T,
        h: impl Fn(T) -> T,
        hdot: impl Fn(T) -> T,
    ) -> Self {
        let dy = length / T::from_usize_lossy(cells);
        let ys: Vec<T> = (0..cells).map(|i| T::from_usize_lossy(i) * dy).collect();
        Self {
            length,
            slope,
            p: ys.iter().map(|&y| h(y) - slope * y).collect(),
            hdot: ys.iter().map(|&y| hdot(y)).collect(),
            t: T::zero(),
        }
    }

    /// Noether energy ∫ (1 + h_y²)/√(1 − hₜ² + h_y²) dy.
    pub fn energy(&self) -> T {
        let hy = d1(&self.p, self.dy(), self.slope);
        let terms: Vec<T> = hy
            .iter()
            .zip(&self.hdot)
            .map(|(&y, &t)| (T::one() + y * y) / (T::one() - t * t + y * y).sqrt())
            .collect();
        crate::reduce::tree_sum(&terms) * self.dy()
    }

    /// Area ∫ √(1 − hₜ² + h_y²) dy of the time slice.
    pub fn area(&self) -> T {
        let hy = d1(&self.p, self.dy(), self.slope);
        let terms: Vec<T> = hy
            .iter()
            .zip(&self.hdot)
            .map(|(&y, &t)| (T::one() - t * t + y * y).sqrt())
            .collect();
        crate::reduce::tree_sum(&terms) * self.dy()
    }
}

fn d1<T: Real>(p: &[T], dy: T, slope: T) -> Vec<T> {
    let n = p.len();
    let two = T::lit(2.0) * dy;
    (0..n)
        .map(|i| slope + (p[(i + 1) % n] - p[(i + n - 1) % n]) / two)
        .collect()
}

fn d2<T: Real>(p: &[T], dy: T) -> Vec<T> {
    let n = p.len();
    let h2 = dy * dy;
    (0..n)
        .map(|i| ((p[(i + 1) % n] - p[i]) + (p[(i + n - 1) % n] - p[i])) / h2)
        .collect()
}

/// hₜₜ from the graph equation; `None` where the area element degenerates.
fn graph_accel<T: Real>(p: &[T], ht: &[T], dy: T, slope: T) -> Option<Vec<T>> {
    let hy = d1(p, dy, slope);
    let hyy = d2(p, dy);
    let hty = d1(ht, dy, T::zero());
    let mut out = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let (t, y) = (ht[i], hy[i]);
        if !(T::one() - t * t + y * y > T::lit(1e-12)) {
            return None;
        }
        out.push((T::lit(2.0) * t * y * hty[i] + (T::one() - t * t) * hyy[i]) / (T::one() + y * y));
    }
    Some(out)
}

/// Leapfrog for the graph equation. The implicit hₜ = (pᵐ⁺¹ − pᵐ⁻¹)/(2dt)
/// in the right-hand side is resolved by fixed-point iteration.
#[derive(Debug, Clone)]
pub struct GraphSolver<T> {
    length: T,
    slope: T,
    dt: T,
    t: T,
    prev: Vec<T>,
    curr: Vec<T>,
    next: Vec<T>,
}

impl<T: Real> GraphSolver<T> {
    pub fn new(state: &GraphState<T>, dt: T) -> Result<Self, MinimalError> {
        let dy = state.dy();
        let singular = MinimalError::Singular {
            t: state.t.to_f64_lossy(),
        };
        let acc = graph_accel(&state.p, &state.hdot, dy, state.slope).ok_or(singular)?;
        let taylor = |s: T| -> Vec<T> {
            state
                .p
                .iter()
                .zip(&state.hdot)
                .zip(&acc)
                .map(|((&p, &v), &a)| p + s * dt * v + dt * dt / T::lit(2.0) * a)
                .collect()
        };
        let mut solver = Self {
            length: state.length,
            slope: state.slope,
            dt,
            t: state.t,
            prev: taylor(-T::one()),
            curr: state.p.clone(),
            next: taylor(T::one()),
        };
        // replace the Taylor guess for the upcoming level by the scheme's own
        solver.next = solver
            .solve_next(&solver.prev, &solver.curr, solver.next.clone())
            .ok_or(singular)?;
        Ok(solver)
    }

    fn dy(&self) -> T {
        self.length / T::from_usize_lossy(self.curr.len())
    }

    fn solve_next(&self, prev: &[T], curr: &[T], mut guess: Vec<T>) -> Option<Vec<T>> {
        let dt = self.dt;
        let two_dt = T::lit(2.0) * dt;
        let scale = curr.iter().fold(T::one(), |a, &x| a.max(x.abs()));
        for _ in 0..100 {
            let ht: Vec<T> = guess
                .iter()
                .zip(prev)
                .map(|(&n, &p)| (n - p) / two_dt)
                .collect();
            let acc = graph_accel(curr, &ht, self.dy(), self.slope)?;
            let mut change = T::zero();
            for i in 0..curr.len() {
                let v = T::lit(2.0) * curr[i] - prev[i] + dt * dt * acc[i];
                change = change.max((v - guess[i]).abs());
                guess[i] = v;
            }
            if !guess.iter().all(|x| x.is_finite()) {
                return None;
            }
            if change <= T::epsilon() * T::lit(4.0) * scale {
                break;
            }
        }
        Some(guess)
    }

    /// Advances one step; Singular when the area element degenerates.
    pub fn step(&mut self) -> Result<(), MinimalError> {
        let guess: Vec<T> = self
            .next
            .iter()
            .zip(&self.curr)
            .map(|(&n, &c)| T::lit(2.0) * n - c)
            .collect();
        let after =
            self.solve_next(&self.curr, &self.next, guess)
                .ok_or(MinimalError::Singular {
                    t: (self.t + self.dt).to_f64_lossy(),
                })?;
        self.prev = std::mem::replace(&mut self.curr, std::mem::replace(&mut self.next, after));
        self.t = self.t + self.dt;
        Ok(())
    }

    pub fn time(&self) -> T {
        self.t
    }

    /// Current level with hₜ = (pᵐ⁺¹ − pᵐ⁻¹)/(2dt).
    pub fn state(&self) -> GraphState<T> {
        let two_dt = T::lit(2.0) * self.dt;
        GraphState {
            length: self.length,
            slope: self.slope,
            p: self.curr.clone(),
            hdot: self
                .next
                .iter()
                .zip(&self.prev)
                .map(|(&n, &p)| (n - p) / two_dt)
                .collect(),
            t: self.t,
        }
    }
}

/// One leapfrog step from a single state (Taylor-started).
pub fn graph_pde_step<T: Real>(
    state: &GraphState<T>,
    dt: T,
) -> Result<GraphState<T>, MinimalError> {
    let mut s = GraphSolver::new(state, dt)?;
    s.step()?;
    Ok(s.state())
}

/// Closed polygon with a scalar normal speed per vertex, oriented
/// counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontCurve<T> {
    pub vertices: Vec<[T; 2]>,
    pub normal_speed: Vec<T>,
    pub t: T,
}

impl<T: Real> FrontCurve<T> {
    /// Polygon sampling of a parametrized closed curve θ ↦ x(θ), θ ∈ [0, 2π).
    pub fn from_param(m: usize, speed: T, x: impl Fn(T) -> [T; 2]) -> Self {
        let vertices = (0..m)
            .map(|j| x(T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(m)))
            .collect();
        let mut c = Self {
            vertices,
            normal_speed: vec![speed; m],
            t: T::zero(),
        };
        if c.signed_area() < T::zero() {
            c.vertices.reverse();
        }
        c
    }

    pub fn circle(center: [T; 2], r0: T, v0: T, m: usize) -> Self {
        Self::from_param(m, v0, |th| {
            [center[0] + r0 * th.cos(), center[1] + r0 * th.sin()]
        })
    }

    pub fn ellipse(center: [T; 2], a: T, b: T, m: usize) -> Self {
        Self::from_param(m, T::zero(), |th| {
            [center[0] + a * th.cos(), center[1] + b * th.sin()]
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area, positive for counter-clockwise orientation.
    pub fn signed_area(&self) -> T {
        let m = self.len();
        let terms: Vec<T> = (0..m)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % m]);
                a[0] * b[1] - a[1] * b[0]
            })
            .collect();
        crate::reduce::tree_sum(&terms) / T::lit(2.0)
    }

    pub fn perimeter(&self) -> T {
        let m = self.len();
        let terms: Vec<T> = (0..m)
            .map(|i| dist(self.vertices[i], self.vertices[(i + 1) % m]))
            .collect();
        crate::reduce::tree_sum(&terms)
    }

    pub fn mean_spacing(&self) -> T {
        self.perimeter() / T::from_usize_lossy(self.len())
    }

    pub fn centroid(&self) -> [T; 2] {
        let m = T::from_usize_lossy(self.len());
        let sx = self.vertices.iter().fold(T::zero(), |a, v| a + v[0]);
        let sy = self.vertices.iter().fold(T::zero(), |a, v| a + v[1]);
        [sx / m, sy / m]
    }

    /// Mean distance of the vertices from the centroid.
    pub fn mean_radius(&self) -> T {
        let c = self.centroid();
        let s = self.vertices.iter().fold(T::zero(), |a, &v| a + dist(v, c));
        s / T::from_usize_lossy(self.len())
    }

    /// Signed curvature per vertex from the circle through three consecutive
    /// vertices: κ = −2·cross/(abc), negative on convex counter-clockwise arcs.
    pub fn curvature(&self) -> Vec<T> {
        curvature_of(&self.vertices)
    }

    pub fn normals(&self) -> Vec<[T; 2]> {
        normals_of(&self.vertices)
    }

    /// True if two non-adjacent edges intersect.
    pub fn self_intersects(&self) -> bool {
        let m = self.len();
        for i in 0..m {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % m]);
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % m]);
                if segments_cross(a, b, c, d) {
                    return true;
                }
            }
        }
        false
    }

    /// Max/min edge length relative to the mean.
    pub fn spacing_range(&self) -> (T, T) {
        let m = self.len();
        let mean = self.mean_spacing();
        let (mut lo, mut hi) = (T::infinity(), T::zero());
        for i in 0..m {
            let d = dist(self.vertices[i], self.vertices[(i + 1) % m]) / mean;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }
}

fn dist<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn cross<T: Real>(o: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_cross<T: Real>(a: [T; 2], b: [T; 2], c: [T; 2], d: [T; 2]) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > T::zero()) != (d2 > T::zero())) && ((d3 > T::zero()) != (d4 > T::zero()))
}

fn curvature_of<T: Real>(v: &[[T; 2]]) -> Vec<T> {
    let m = v.len();
    (0..m)
        .map(|i| {
            let (p, q, r) = (v[(i + m - 1) % m], v[i], v[(i + 1) % m]);
            let abc = dist(p, q) * dist(q, r) * dist(p, r);
            -T::lit(2.0) * cross(p, q, r) / abc
        })
        .collect()
}

fn normals_of<T: Real>(v: &[[T; 2]]) -> Vec<[T; 2]> {
    let m = v.len();
    (0..m)
        .map(|i| {
            let (p, r) = (v[(i + m - 1) % m], v[(i + 1) % m]);
            let (tx, ty) = (r[0] - p[0], r[1] - p[1]);
            let n = (tx * tx + ty * ty).sqrt();
            [ty / n, -tx / n]
        })
        .collect()
}

fn front_rhs<T: Real>(x: &[[T; 2]], v: &[T]) -> (Vec<[T; 2]>, Vec<T>) {
    let k = curvature_of(x);
    let nu = normals_of(x);
    let dx = nu
        .iter()
        .zip(v)
        .map(|(n, &s)| [s * n[0], s * n[1]])
        .collect();
    let dv = v
        .iter()
        .zip(&k)
        .map(|(&s, &kk)| (T::one() - s * s) * kk)
        .collect();
    (dx, dv)
}

/// Uniform Catmull-Rom through periodic samples at local parameter u ∈ [0, 1].
fn catmull_rom<T: Real>(p0: T, p1: T, p2: T, p3: T, u: T) -> T {
    let h = T::lit(0.5);
    let u2 = u * u;
    let u3 = u2 * u;
    h * (T::lit(2.0) * p1
        + (p2 - p0) * u
        + (T::lit(2.0) * p0 - T::lit(5.0) * p1 + T::lit(4.0) * p2 - p3) * u2
        + (T::lit(3.0) * p1 - p0 - T::lit(3.0) * p2 + p3) * u3)
}

/// Resamples the curve (positions and V) at uniform chord arclength,
/// keeping vertex 0 fixed.
pub fn redistribute<T: Real>(curve: &FrontCurve<T>) -> FrontCurve<T> {
    let m = curve.len();
    let v = &curve.vertices;
    let mut s = Vec::with_capacity(m + 1);
    s.push(T::zero());
    for i in 0..m {
        let last = s[i];
        s.push(last + dist(v[i], v[(i + 1) % m]));
    }
    let total = s[m];
    let mut seg = 0;
    let mut verts = Vec::with_capacity(m);
    let mut speeds = Vec::with_capacity(m);
    for j in 0..m {
        let target = total * T::from_usize_lossy(j) / T::from_usize_lossy(m);
        while seg + 1 < m && s[seg + 1] <= target {
            seg += 1;
        }
        let u = (target - s[seg]) / (s[seg + 1] - s[seg]);
        let idx = |d: isize| ((seg as isize + d).rem_euclid(m as isize)) as usize;
        let (a, b, c, d) = (idx(-1), idx(0), idx(1), idx(2));
        let x = catmull_rom(v[a][0], v[b][0], v[c][0], v[d][0], u);
        let y = catmull_rom(v[a][1], v[b][1], v[c][1], v[d][1], u);
        let w = &curve.normal_speed;
        verts.push([x, y]);
        speeds.push(catmull_rom(w[a], w[b], w[c], w[d], u));
    }
    FrontCurve {
        vertices: verts,
        normal_speed: speeds,
        t: curve.t,
    }
}

/// RK4 step of X′ = Vν, V′ = (1 − V²)κ followed by redistribution.
/// Singular when max|V| ≥ 1 − 1e−6, the polygon self-intersects, or the
/// enclosed area drops below (10·mean spacing)².
pub fn front_track_step<T: Real>(
    curve: &FrontCurve<T>,
    dt: T,
) -> Result<FrontCurve<T>, MinimalError> {
    let singular = |t: T| MinimalError::Singular {
        t: t.to_f64_lossy(),
    };
    check_front(curve).map_err(|_| singular(curve.t))?;
    let x0 = &curve.vertices;
    let v0 = &curve.normal_speed;
    let axpy = |x: &[[T; 2]], v: &[T], k: &(Vec<[T; 2]>, Vec<T>), h: T| -> (Vec<[T; 2]>, Vec<T>) {
        (
            x.iter()
                .zip(&k.0)
                .map(|(a, d)| [a[0] + h * d[0], a[1] + h * d[1]])
                .collect(),
            v.iter().zip(&k.1).map(|(&a, &d)| a + h * d).collect(),
        )
    };
    let half = dt / T::lit(2.0);
    let k1 = front_rhs(x0, v0);
    let s2 = axpy(x0, v0, &k1, half);
    let k2 = front_rhs(&s2.0, &s2.1);
    let s3 = axpy(x0, v0, &k2, half);
    let k3 = front_rhs(&s3.0, &s3.1);
    let s4 = axpy(x0, v0, &k3, dt);
    let k4 = front_rhs(&s4.0, &s4.1);
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let m = curve.len();
    let mut verts = Vec::with_capacity(m);
    let mut speeds = Vec::with_capacity(m);
    for i in 0..m {
        let mut p = [T::zero(); 2];
        for (c, slot) in p.iter_mut().enumerate() {
            *slot = x0[i][c]
                + dt * (k1.0[i][c] + two * k2.0[i][c] + two * k3.0[i][c] + k4.0[i][c]) / six;
        }
        verts.push(p);
        speeds.push(v0[i] + dt * (k1.1[i] + two * k2.1[i] + two * k3.1[i] + k4.1[i]) / six);
    }
    let next = redistribute(&FrontCurve {
        vertices: verts,
        normal_speed: speeds,
        t: curve.t + dt,
    });
    check_front(&next).map_err(|_| singular(next.t))?;
    Ok(next)
}

fn check_front<T: Real>(c: &FrontCurve<T>) -> Result<(), ()> {
    let vmax = c
        .normal_speed
        .iter()
        .fold(T::zero(), |a, &v| a.max(v.abs()));
    let ok_finite = c
        .vertices
        .iter()
        .all(|p| p[0].is_finite() && p[1].is_finite())
        && vmax.is_finite();
    let h = c.mean_spacing();
    if !ok_finite
        || vmax >= T::one() - T::lit(1e-6)
        || c.signed_area() < (T::lit(10.0) * h).powi(2)
        || c.self_intersects()
    {
        return Err(());
    }
    Ok(())
}

/// Result of running the front tracker to `t_end` or collapse.
#[derive(Debug, Clone)]
pub struct FrontRun<T> {
    pub frames: Vec<FrontCurve<T>>,
    pub t_star: Option<T>,
}

/// Runs the front tracker, recording every `every`-th step.
pub fn front_track<T: Real>(curve: FrontCurve<T>, dt: T, t_end: T, every: usize) -> FrontRun<T> {
    let mut frames = vec![curve.clone()];
    let mut c = curve;
    let mut n = 0usize;
    while c.t < t_end - dt / T::lit(2.0) {
        match front_track_step(&c, dt) {
            Ok(next) => c = next,
            Err(_) => {
                if frames.last().map(|f| f.t) != Some(c.t) {
                    frames.push(c.clone());
                }
                let t_star = c.t;
                return FrontRun {
                    frames,
                    t_star: Some(t_star),
                };
            }
        }
        n += 1;
        if every > 0 && n.is_multiple_of(every) {
            frames.push(c.clone());
        }
    }
    if frames.last().map(|f| f.t) != Some(c.t) {
        frames.push(c);
    }
    FrontRun {
        frames,
        t_star: None,
    }
}

/// CSV `t,r,rdot`.
pub fn write_radial_csv<T: Real, W: Write>(
    out: &mut W,
    samples: &[RadialState<T>],
) -> io::Result<()> {
    writeln!(out, "t,r,rdot")?;
    for s in samples {
        writeln!(out, "{},{},{}", s.t, s.r, s.rdot)?;
    }
    Ok(())
}

/// CSV `t,y,h,hdot`.
pub fn write_graph_csv<T: Real, W: Write>(out: &mut W, states: &[GraphState<T>]) -> io::Result<()> {
    writeln!(out, "t,y,h,hdot")?;
    for s in states {
        for i in 0..s.p.len() {
            writeln!(out, "{},{},{},{}", s.t, s.y(i), s.h(i), s.hdot[i])?;
        }
    }
    Ok(())
}

/// CSV `t,vertex,x,y,v`.
pub fn write_front_csv<T: Real, W: Write>(out: &mut W, frames: &[FrontCurve<T>]) -> io::Result<()> {
    writeln!(out, "t,vertex,x,y,v")?;
    for f in frames {
        for (i, (p, v)) in f.vertices.iter().zip(&f.normal_speed).enumerate() {
            writeln!(out, "{},{},{},{},{}", f.t, i, p[0], p[1], v)?;
        }
    }
    Ok(())
}
