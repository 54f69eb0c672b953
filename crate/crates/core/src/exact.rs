//! Closed-form and semi-analytic reference solutions.
//!
//! * the kink q(s) = tanh(s/√2) and its Lorentz boosts,
//! * rotating waves ρ(x)e^{iωt} built from a scalar profile,
//! * the pulsating circle/sphere r(t),
//! * null graph profiles h = f(y − t),
//!
//! plus samplers that turn them (and a few non-exact initial interfaces) into
//! [`FieldState`]s.

use thiserror::Error;

use crate::field::{init_from_profile, FieldError, FieldState, Grid, Potential};
use crate::minimal::{radial_rhs, radial_solve, RadialStatus};
use crate::solver::{stable_dt, step};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("time {t} is at or past the collapse time {t_star}")]
    Singularity { t: f64, t_star: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Heteroclinic profile q(s) = tanh(s/√2), solving −q″ + W′(q) = 0.
#[inline]
pub fn kink_profile<T: Real>(s: T) -> T {
    (s * T::FRAC_1_SQRT_2()).tanh()
}

/// q′(s) = (1 − q²)/√2.
#[inline]
pub fn kink_derivative<T: Real>(s: T) -> T {
    let q = kink_profile(s);
    (T::one() - q * q) * T::FRAC_1_SQRT_2()
}

/// q″(s) = −q(1 − q²).
#[inline]
pub fn kink_second_derivative<T: Real>(s: T) -> T {
    let q = kink_profile(s);
    -q * (T::one() - q * q)
}

/// Surface tension σ = ∫₋₁¹ √(2W(u)) du = 2√2/3 for the quartic well.
pub fn sigma_quartic<T: Real>() -> T {
    T::lit(2.0) * T::SQRT_2() / T::lit(3.0)
}

/// Lorentz factor γ = (1 − v²)^{−1/2}.
pub fn lorentz_gamma<T: Real>(v: T) -> T {
    T::one() / (T::one() - v * v).sqrt()
}

/// Planar kink u = q(γ(x·ν − vt − x₀)/ε).
#[derive(Debug, Clone, PartialEq)]
pub struct KinkSpec<T> {
    pub direction: Vec<T>,
    pub speed: T,
    pub offset: T,
    pub epsilon: T,
}

impl<T: Real> KinkSpec<T> {
    pub fn new(direction: Vec<T>, speed: T, offset: T, epsilon: T) -> Result<Self, ExactError> {
        let s = Self {
            direction,
            speed,
            offset,
            epsilon,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ExactError> {
        let norm = self
            .direction
            .iter()
            .fold(T::zero(), |a, &x| a + x * x)
            .sqrt();
        if (norm - T::one()).abs() > T::lit(1e-12) {
            return Err(ExactError::InvalidSpec(format!(
                "direction norm {norm} != 1"
            )));
        }
        if !(self.speed.abs() < T::one()) {
            return Err(ExactError::InvalidSpec(format!(
                "speed {} not subluminal",
                self.speed
            )));
        }
        if !(self.epsilon > T::zero()) {
            return Err(ExactError::InvalidSpec("epsilon must be positive".into()));
        }
        Ok(())
    }

    pub fn gamma(&self) -> T {
        lorentz_gamma(self.speed)
    }

    /// Rescaled profile argument γ(x·ν − vt − x₀)/ε.
    pub fn argument(&self, t: T, x: &[T]) -> T {
        let proj = x
            .iter()
            .zip(&self.direction)
            .fold(T::zero(), |a, (&xi, &ni)| a + xi * ni);
        self.gamma() * (proj - self.speed * t - self.offset) / self.epsilon
    }

    /// Total energy per unit transverse area: γσ.
    pub fn energy_per_area(&self) -> T {
        self.gamma() * sigma_quartic::<T>()
    }

    /// Total lagrangian per unit transverse area: σ/γ.
    pub fn lagrangian_per_area(&self) -> T {
        sigma_quartic::<T>() / self.gamma()
    }
}

/// (u, uₜ) of the boosted kink at (t, x).
pub fn boosted_kink_field<T: Real>(spec: &KinkSpec<T>, t: T, x: &[T]) -> (T, T) {
    let s = spec.argument(t, x);
    let ut = -spec.speed * spec.gamma() * kink_derivative(s) / spec.epsilon;
    (kink_profile(s), ut)
}

/// Spatial gradient ∇u = γq′ν/ε of the boosted kink.
pub fn boosted_kink_gradient<T: Real>(spec: &KinkSpec<T>, t: T, x: &[T]) -> Vec<T> {
    let s = spec.argument(t, x);
    let g = spec.gamma() * kink_derivative(s) / spec.epsilon;
    spec.direction.iter().map(|&n| g * n).collect()
}

/// Samples a boosted kink at time `t` (k = 1). The state's time is `t`.
pub fn kink_state<T: Real>(
    grid: &Grid<T>,
    spec: &KinkSpec<T>,
    t: T,
) -> Result<FieldState<T>, ExactError> {
    if spec.direction.len() != grid.dim() {
        return Err(ExactError::InvalidSpec(
            "kink direction dimension differs from grid".into(),
        ));
    }
    let mut s = init_from_profile(
        grid.clone(),
        1,
        spec.epsilon,
        |x, o| o[0] = boosted_kink_field(spec, t, x).0,
        |x, o| o[0] = boosted_kink_field(spec, t, x).1,
    )?;
    s.time = t;
    Ok(s)
}

/// Kink at `a` and antikink at `a + L/2` along axis 0 of a periodic 1D grid,
/// both moving with speed `v`. Tails overlap only at O(e^{−γL/(2√2ε)}).
pub fn kink_pair_state<T: Real>(
    grid: &Grid<T>,
    a: T,
    v: T,
    epsilon: T,
    t: T,
) -> Result<FieldState<T>, ExactError> {
    let l = grid.extent(0);
    let b = a + l / T::lit(2.0);
    let gamma = lorentz_gamma(v);
    let field = move |x: T| -> (T, T) {
        let da = grid.displacement(0, a + v * t, x);
        let db = grid.displacement(0, b + v * t, x);
        if da.abs() <= db.abs() {
            let s = gamma * da / epsilon;
            (kink_profile(s), -v * gamma * kink_derivative(s) / epsilon)
        } else {
            let s = -gamma * db / epsilon;
            (kink_profile(s), v * gamma * kink_derivative(s) / epsilon)
        }
    };
    let mut s = init_from_profile(
        grid.clone(),
        1,
        epsilon,
        |x, o| o[0] = field(x[0]).0,
        |x, o| o[0] = field(x[0]).1,
    )?;
    s.time = t;
    Ok(s)
}

/// Scalar profile the rotating wave is built from.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseProfile<T> {
    /// f ≡ 1.
    Vacuum,
    /// f(x) = q((x·ν − x₀)/ε).
    Planar { direction: Vec<T>, offset: T },
}

/// u = ρ(x)e^{iωt}, ρ(x) = a·f(a·x), a = √(1 + ε²ω²).
#[derive(Debug, Clone, PartialEq)]
pub struct RotatingWaveSpec<T> {
    pub omega: T,
    pub epsilon: T,
    pub base: BaseProfile<T>,
}

impl<T: Real> RotatingWaveSpec<T> {
    /// Amplitude rescaling a = √(1 + ε²ω²).
    pub fn amplitude_factor(&self) -> T {
        (T::one() + self.epsilon * self.epsilon * self.omega * self.omega).sqrt()
    }

    /// ρ(x).
    pub fn rho(&self, x: &[T]) -> T {
        let a = self.amplitude_factor();
        match &self.base {
            BaseProfile::Vacuum => a,
            BaseProfile::Planar { direction, offset } => {
                let proj = x
                    .iter()
                    .zip(direction)
                    .fold(T::zero(), |s, (&xi, &ni)| s + xi * ni);
                a * kink_profile(a * (proj - *offset) / self.epsilon)
            }
        }
    }
}

/// Residual −ω²ρ* + W̃′(ρ*)/ε² of the constant-amplitude rotating wave.
pub fn rotating_constant_residual<T: Real>(omega: T, epsilon: T) -> T {
    let rho = (T::one() + epsilon * epsilon * omega * omega).sqrt();
    -omega * omega * rho + Potential::Quartic.radial_derivative(rho) / (epsilon * epsilon)
}

/// ((u₁, u₂), (∂ₜu₁, ∂ₜu₂)) of the rotating wave at (t, x).
pub fn rotating_wave_field<T: Real>(spec: &RotatingWaveSpec<T>, t: T, x: &[T]) -> ([T; 2], [T; 2]) {
    let rho = spec.rho(x);
    let (s, c) = (spec.omega * t).sin_cos();
    (
        [rho * c, rho * s],
        [-rho * spec.omega * s, rho * spec.omega * c],
    )
}

pub fn rotating_wave_state<T: Real>(
    grid: &Grid<T>,
    spec: &RotatingWaveSpec<T>,
    t: T,
) -> Result<FieldState<T>, ExactError> {
    let mut s = init_from_profile(
        grid.clone(),
        2,
        spec.epsilon,
        |x, o| o.copy_from_slice(&rotating_wave_field(spec, t, x).0),
        |x, o| o.copy_from_slice(&rotating_wave_field(spec, t, x).1),
    )?;
    s.time = t;
    Ok(s)
}

/// Radially symmetric collapsing circle (n = 2) or sphere (n = 3) released
/// from rest at radius `r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsatingSphereSpec<T> {
    pub r0: T,
    pub dim: usize,
}

impl<T: Real> PulsatingSphereSpec<T> {
    pub fn new(r0: T, dim: usize) -> Result<Self, ExactError> {
        if !(r0 > T::zero()) || !(2..=3).contains(&dim) {
            return Err(ExactError::InvalidSpec(format!("r0 = {r0}, n = {dim}")));
        }
        Ok(Self { r0, dim })
    }

    fn radial_dt(&self) -> T {
        self.r0 * T::lit(1e-4)
    }

    /// Collapse time t*: πr₀/2 for the circle, numerically for the sphere.
    pub fn collapse_time(&self) -> T {
        if self.dim == 2 {
            return T::FRAC_PI_2() * self.r0;
        }
        let sol = radial_solve(
            self.r0,
            T::zero(),
            self.dim,
            self.radial_dt(),
            T::lit(10.0) * self.r0,
        );
        match sol.status {
            RadialStatus::Singular { t_star } => t_star,
            RadialStatus::Completed => T::infinity(),
        }
    }
}

/// (r, r′, r″) of the pulsating sphere at time `t`.
pub fn pulsating_radius<T: Real>(
    spec: &PulsatingSphereSpec<T>,
    t: T,
) -> Result<(T, T, T), ExactError> {
    let t_star = spec.collapse_time();
    if t >= t_star {
        return Err(ExactError::Singularity {
            t: t.to_f64_lossy(),
            t_star: t_star.to_f64_lossy(),
        });
    }
    if spec.dim == 2 {
        let (s, c) = (t / spec.r0).sin_cos();
        return Ok((spec.r0 * c, -s, -c / spec.r0));
    }
    let dt = spec.radial_dt();
    // integrate to the last grid time before t, then one partial step
    let sol = radial_solve(spec.r0, T::zero(), spec.dim, dt, t);
    let last = sol
        .samples
        .last()
        .copied()
        .expect("at least the initial sample");
    let (r, rdot) = if (t - last.t).abs() <= T::lit(1e-12) * (T::one() + t.abs()) {
        (last.r, last.rdot)
    } else {
        let tail = radial_solve(last.r, last.rdot, spec.dim, t - last.t, t - last.t);
        let end = tail.samples.last().copied().unwrap();
        (end.r, end.rdot)
    };
    let (_, acc) = radial_rhs(r, rdot, spec.dim);
    Ok((r, rdot, acc))
}

/// h(t, y) = f(y − t): a right-moving null profile, an exact time-like
/// minimal graph.
pub fn null_graph_profile<T: Real, F: Fn(T) -> T>(f: F, t: T, y: T) -> T {
    f(y - t)
}

/// Circle (n = 2) or sphere (n = 3) interface at rest, +1 inside:
/// u = q((r₀ − |x − c|)/ε).
pub fn sphere_state<T: Real>(
    grid: &Grid<T>,
    center: &[T],
    r0: T,
    epsilon: T,
) -> Result<FieldState<T>, ExactError> {
    if center.len() != grid.dim() {
        return Err(ExactError::InvalidSpec(
            "center dimension differs from grid".into(),
        ));
    }
    Ok(init_from_profile(
        grid.clone(),
        1,
        epsilon,
        |x, o| {
            let r = x
                .iter()
                .zip(center)
                .fold(T::zero(), |a, (&xi, &ci)| a + (xi - ci) * (xi - ci))
                .sqrt();
            o[0] = kink_profile((r0 - r) / epsilon);
        },
        |_, o| o[0] = T::zero(),
    )?)
}

/// Ellipse x²/a² + y²/b² = 1 at rest, using the first-order distance
/// F/|∇F| with F = √(x²/a² + y²/b²) − 1.
pub fn ellipse_state<T: Real>(
    grid: &Grid<T>,
    center: [T; 2],
    a: T,
    b: T,
    epsilon: T,
) -> Result<FieldState<T>, ExactError> {
    if grid.dim() != 2 {
        return Err(ExactError::InvalidSpec("ellipse needs a 2D grid".into()));
    }
    Ok(init_from_profile(
        grid.clone(),
        1,
        epsilon,
        |x, o| {
            let (px, py) = (x[0] - center[0], x[1] - center[1]);
            let rho = ((px / a).powi(2) + (py / b).powi(2)).sqrt();
            let d = if rho > T::zero() {
                let gx = px / (a * a * rho);
                let gy = py / (b * b * rho);
                (rho - T::one()) / (gx * gx + gy * gy).sqrt()
            } else {
                -a.min(b)
            };
            o[0] = kink_profile(-d / epsilon);
        },
        |_, o| o[0] = T::zero(),
    )?)
}

/// Radius of the rippled circle R(θ) = r₀ + a·sin(mθ).
pub fn ripple_radius<T: Real>(r0: T, amplitude: T, modes: usize, theta: T) -> T {
    r0 + amplitude * (T::from_usize_lossy(modes) * theta).sin()
}

/// Kink profile across the rippled circle, at rest: u = q((R(θ) − r)/ε).
pub fn ripple_state<T: Real>(
    grid: &Grid<T>,
    r0: T,
    amplitude: T,
    modes: usize,
    epsilon: T,
) -> Result<FieldState<T>, ExactError> {
    if grid.dim() != 2 {
        return Err(ExactError::InvalidSpec("ripples need a 2D grid".into()));
    }
    Ok(init_from_profile(
        grid.clone(),
        1,
        epsilon,
        |x, o| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let theta = x[1].atan2(x[0]);
            o[0] = kink_profile((ripple_radius(r0, amplitude, modes, theta) - r) / epsilon);
        },
        |_, o| o[0] = T::zero(),
    )?)
}

/// A vortex seed: position and topological degree (±1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexSeed<T> {
    pub center: [T; 2],
    pub degree: i32,
}

/// Product ansatz Π f(|x − cⱼ|/ε)e^{idⱼθⱼ} with f(s) = tanh(s/√2).
pub fn vortex_ansatz_state<T: Real>(
    grid: &Grid<T>,
    seeds: &[VortexSeed<T>],
    epsilon: T,
) -> Result<FieldState<T>, ExactError> {
    if grid.dim() != 2 {
        return Err(ExactError::InvalidSpec("vortices need a 2D grid".into()));
    }
    Ok(init_from_profile(
        grid.clone(),
        2,
        epsilon,
        |x, o| {
            let (mut re, mut im) = (T::one(), T::zero());
            for s in seeds {
                let dx = grid.displacement(0, s.center[0], x[0]);
                let dy = grid.displacement(1, s.center[1], x[1]);
                let r = (dx * dx + dy * dy).sqrt();
                let amp = kink_profile(r / epsilon);
                let th = T::from_i32(s.degree).unwrap() * dy.atan2(dx);
                let (sn, cs) = th.sin_cos();
                let (a, b) = (amp * cs, amp * sn);
                let nre = re * a - im * b;
                im = re * b + im * a;
                re = nre;
            }
            o[0] = re;
            o[1] = im;
        },
        |_, o| o.fill(T::zero()),
    )?)
}

/// Relaxes a state with the damped wave equation uₜₜ + μuₜ = Δu − ∇W(u)/ε²
/// for duration `time`; returns the relaxed field at rest.
pub fn relax_damped<T: Real>(state: &FieldState<T>, damping: T, time: T) -> FieldState<T> {
    let dt = stable_dt(&state.grid, T::lit(0.5));
    let a = damping * dt / T::lit(2.0);
    let steps = (time / dt).ceil().to_usize().unwrap_or(0);
    let mut prev = state.u.clone();
    let mut curr = state.u.clone();
    for _ in 0..steps {
        let Some(plain) = step(&state.grid, state.epsilon, &prev, &curr, dt) else {
            break;
        };
        // (1 + a)uᵐ⁺¹ = [2uᵐ − uᵐ⁻¹ + dt²F] + a·uᵐ⁻¹
        let next: Vec<Vec<T>> = plain
            .iter()
            .zip(&prev)
            .map(|(p, q)| {
                p.iter()
                    .zip(q)
                    .map(|(&x, &y)| (x + a * y) / (T::one() + a))
                    .collect()
            })
            .collect();
        prev = curr;
        curr = next;
    }
    let mut out = state.clone();
    out.u = curr;
    out.ut.iter_mut().for_each(|c| c.fill(T::zero()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kink_profile_examples() {
        assert_eq!(kink_profile(0.0_f64), 0.0);
        assert!(kink_profile(20.0_f64) > 1.0 - 1e-6);
        assert!(kink_profile(-20.0_f64) < -1.0 + 1e-6);
    }

    #[test]
    fn kink_residual_with_analytic_derivatives() {
        let p = Potential::Quartic;
        for i in 0..1000 {
            let s = -10.0 + 20.0 * i as f64 / 999.0;
            let q = kink_profile(s);
            let mut w = [0.0];
            p.grad(&[q], &mut w);
            let r = -kink_second_derivative(s) + w[0];
            assert!(r.abs() <= 1e-12, "s={s} r={r}");
        }
    }

    #[test]
    fn kink_residual_with_finite_differences_is_second_order() {
        let res = |d: f64| {
            (0..200)
                .map(|i| {
                    let s = -5.0 + 10.0 * i as f64 / 199.0;
                    let fd = (kink_profile(s + d) - 2.0 * kink_profile(s) + kink_profile(s - d))
                        / (d * d);
                    let q = kink_profile(s);
                    (-fd - q * (1.0 - q * q)).abs()
                })
                .fold(0.0, f64::max)
        };
        let (a, b) = (res(1e-2), res(5e-3));
        assert!(((a / b).log2() - 2.0).abs() < 0.1);
        assert!(a <= 0.1 * 1e-4);
    }

    #[test]
    fn sigma_matches_quadrature() {
        // composite Simpson on ∫₋₁¹ √(2W(u)) du = ∫ (1 − u²)/√2 du
        let n = 2000;
        let h = 2.0 / n as f64;
        let f = |u: f64| (2.0 * Potential::Quartic.eval(&[u])).sqrt();
        let mut s = f(-1.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(-1.0 + i as f64 * h);
        }
        let quad = s * h / 3.0;
        assert!((quad - sigma_quartic::<f64>()).abs() < 1e-10);
        assert!((sigma_quartic::<f64>() - 0.9428090415).abs() < 1e-10);
    }

    #[test]
    fn boosted_kink_moves_at_speed() {
        let spec = KinkSpec::new(vec![1.0_f64], 0.6, 0.1, 0.05).unwrap();
        for t in [0.0, 0.3, 1.7] {
            let x0 = 0.6 * t + 0.1;
            assert!(boosted_kink_field(&spec, t, &[x0]).0.abs() < 1e-13);
        }
        let e = KinkSpec::new(vec![1.0_f64], 0.6, 0.0, 0.05).unwrap();
        assert!((e.energy_per_area() - 1.178511).abs() < 1e-6);
        assert!((e.lagrangian_per_area() - 0.754247).abs() < 1e-6);
    }

    #[test]
    fn kink_spec_validation() {
        assert!(KinkSpec::new(vec![1.0, 1.0], 0.0, 0.0, 0.05).is_err());
        assert!(KinkSpec::new(vec![1.0], 1.0, 0.0, 0.05).is_err());
    }

    #[test]
    fn equipartition_is_pointwise() {
        let spec = KinkSpec::new(vec![0.6, 0.8], 0.6, 0.0, 0.05).unwrap();
        let eps = spec.epsilon;
        for i in 0..50 {
            let x = [-0.2 + 0.008 * i as f64, 0.05];
            let t = 0.01 * i as f64;
            let (u, ut) = boosted_kink_field(&spec, t, &x);
            let g = boosted_kink_gradient(&spec, t, &x);
            let grad2: f64 = g.iter().map(|v| v * v).sum();
            let w = eps * Potential::Quartic.eval(&[u]) / (eps * eps);
            let l = eps * ((-ut * ut + grad2) / 2.0) + w;
            if l > 1e-8 {
                assert!((w / l - 0.5).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn boosted_kink_is_lorentz_covariant() {
        // the static kink evaluated in boosted coordinates
        let v = 0.6;
        let static_spec = KinkSpec::new(vec![1.0_f64], 0.0, 0.0, 0.05).unwrap();
        let moving = KinkSpec::new(vec![1.0], v, 0.0, 0.05).unwrap();
        let b = crate::minkowski::boost(&[v]).unwrap();
        for (t, x) in [(0.0, 0.01), (0.2, 0.1), (0.5, 0.33)] {
            let p = b.matrix.apply(&[t, x]);
            let a = boosted_kink_field(&static_spec, p[0], &[p[1]]).0;
            let c = boosted_kink_field(&moving, t, &[x]).0;
            assert!((a - c).abs() < 1e-14);
        }
    }

    #[test]
    fn rotating_wave_examples() {
        let spec = RotatingWaveSpec {
            omega: 0.0,
            epsilon: 0.05,
            base: BaseProfile::Vacuum,
        };
        assert_eq!(rotating_wave_field(&spec, 1.3, &[0.2]).0, [1.0, 0.0]);
        assert!(rotating_constant_residual(3.0_f64, 0.05).abs() < 1e-12);
        assert!(rotating_constant_residual(20.0_f64, 0.1).abs() < 1e-10);
        let spec = RotatingWaveSpec {
            omega: 2.0,
            epsilon: 0.05,
            base: BaseProfile::Vacuum,
        };
        assert!(spec.amplitude_factor() > 1.0);
    }

    #[test]
    fn rotating_planar_profile_solves_the_ode() {
        // −ρ″ − ρ(1 + ε²ω² − ρ²)/ε² = 0 via finite differences
        let spec = RotatingWaveSpec {
            omega: 2.0_f64,
            epsilon: 0.05,
            base: BaseProfile::Planar {
                direction: vec![1.0],
                offset: 0.0,
            },
        };
        let a2 = spec.amplitude_factor().powi(2);
        let d = 1e-4;
        for i in 0..40 {
            let x = -0.2 + 0.01 * i as f64;
            let r = spec.rho(&[x]);
            let rpp = (spec.rho(&[x + d]) - 2.0 * r + spec.rho(&[x - d])) / (d * d);
            let res = -rpp - r * (a2 - r * r) / (0.05 * 0.05);
            assert!(res.abs() < 1e-3, "x={x} res={res}");
        }
    }

    #[test]
    fn pulsating_circle_examples() {
        let s = PulsatingSphereSpec::new(1.0, 2).unwrap();
        assert_eq!(pulsating_radius(&s, 0.0).unwrap(), (1.0, -0.0, -1.0));
        let (r, rd, rdd) = pulsating_radius(&s, std::f64::consts::PI / 3.0).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
        assert!((rd + 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((rdd + 0.5).abs() < 1e-15);
        assert!((rdd + (1.0 - rd * rd) / r).abs() < 1e-10);
        let (_, rd, _) = pulsating_radius(&s, std::f64::consts::FRAC_PI_2 - 1e-6).unwrap();
        assert!((rd.abs() - 1.0).abs() < 1e-9);
        assert!(matches!(
            pulsating_radius(&s, 2.0),
            Err(ExactError::Singularity { .. })
        ));
    }

    #[test]
    fn pulsating_sphere_collapses_faster() {
        let s = PulsatingSphereSpec::new(1.0, 3).unwrap();
        let t_star = s.collapse_time();
        assert!(t_star < std::f64::consts::FRAC_PI_2);
        let (r, rd, rdd) = pulsating_radius(&s, 0.5).unwrap();
        assert!((rdd + 2.0 * (1.0 - rd * rd) / r).abs() < 1e-12);
        assert!(r < (0.5f64).cos());
    }

    #[test]
    fn null_profile_residual_vanishes() {
        // (1 + h_y²)h_tt − 2h_t h_y h_ty − (1 − h_t²)h_yy with h = sin(y − t)
        for i in 0..100 {
            let (t, y) = (0.01 * i as f64, 0.37 * i as f64);
            let s = y - t;
            assert_eq!(null_graph_profile(f64::sin, t, y), s.sin());
            let (f1, f2) = (s.cos(), -s.sin());
            let (ht, hy, htt, hty, hyy) = (-f1, f1, f2, -f2, f2);
            let res = (1.0 + hy * hy) * htt - 2.0 * ht * hy * hty - (1.0 - ht * ht) * hyy;
            assert!(res.abs() < 1e-14);
        }
    }

    #[test]
    fn kink_pair_is_periodic_and_two_sided() {
        let g = Grid::new(&[400], &[0.0], 0.005, crate::field::Boundary::Periodic).unwrap();
        let s = kink_pair_state(&g, 0.5, 0.6, 0.05, 0.0).unwrap();
        let u = &s.u[0];
        let crossings = (0..u.len())
            .filter(|&i| u[i] * u[(i + 1) % u.len()] < 0.0)
            .count();
        assert_eq!(crossings, 2);
        assert!(u[0] < -0.99);
    }
}
