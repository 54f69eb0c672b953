//! Flat Minkowski geometry in 1+n dimensions (n ≤ 3).
//!
//! Signature convention: η = diag(−1, +1, …, +1). Index 0 is time.

use num_complex::Complex;
use thiserror::Error;

use crate::Real;

/// Maximum number of space-time components (1 + 3).
pub const MAX_COMPONENTS: usize = 4;

/// Default null-classification tolerance, relative to the euclidean norm².
pub const DEFAULT_TOL_NULL: f64 = 1e-12;

/// Imaginary parts below this are truncated when classifying a spectrum.
pub const IMAG_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinkError {
    #[error("dimension mismatch: {0} vs {1} spatial components")]
    DimensionMismatch(usize, usize),
    #[error("spatial dimension {0} not in 1..=3")]
    InvalidDimension(usize),
    #[error("non-finite component at index {0}")]
    NonFinite(usize),
    #[error("boost speed {0} is not subluminal")]
    Causality(f64),
    #[error("minkowski norm undefined for a null vector")]
    NullVector,
}

/// A vector (t, x₁, …, xₙ) of ℝ^{1+n}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinkVector<T> {
    comps: [T; MAX_COMPONENTS],
    dim: usize,
}

impl<T: Real> MinkVector<T> {
    pub fn new(time: T, space: &[T]) -> Result<Self, MinkError> {
        let dim = space.len();
        if !(1..=3).contains(&dim) {
            return Err(MinkError::InvalidDimension(dim));
        }
        let mut comps = [T::zero(); MAX_COMPONENTS];
        comps[0] = time;
        comps[1..=dim].copy_from_slice(space);
        Self::from_components(&comps[..=dim])
    }

    /// Builds from the full component list `[t, x₁, …]`.
    pub fn from_components(c: &[T]) -> Result<Self, MinkError> {
        if !(2..=MAX_COMPONENTS).contains(&c.len()) {
            return Err(MinkError::InvalidDimension(c.len().saturating_sub(1)));
        }
        if let Some(i) = c.iter().position(|x| !x.is_finite()) {
            return Err(MinkError::NonFinite(i));
        }
        let mut comps = [T::zero(); MAX_COMPONENTS];
        comps[..c.len()].copy_from_slice(c);
        Ok(Self {
            comps,
            dim: c.len() - 1,
        })
    }

    /// Spatial dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time(&self) -> T {
        self.comps[0]
    }

    pub fn space(&self) -> &[T] {
        &self.comps[1..=self.dim]
    }

    pub fn components(&self) -> &[T] {
        &self.comps[..=self.dim]
    }

    pub fn euclidean_norm_sq(&self) -> T {
        self.components().iter().fold(T::zero(), |a, &x| a + x * x)
    }
}

/// ⟨a, b⟩_m = −a₀b₀ + Σ aᵢbᵢ.
pub fn mink_inner<T: Real>(a: &MinkVector<T>, b: &MinkVector<T>) -> Result<T, MinkError> {
    if a.dim != b.dim {
        return Err(MinkError::DimensionMismatch(a.dim, b.dim));
    }
    Ok(mink_inner_slice(a.components(), b.components()))
}

/// Minkowski product on raw component slices of equal length.
#[inline]
pub fn mink_inner_slice<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = -(a[0] * b[0]);
    for i in 1..a.len() {
        s = s + a[i] * b[i];
    }
    s
}

/// |ξ|_m = √|⟨ξ,ξ⟩_m|; undefined (error) on null vectors.
pub fn mink_norm<T: Real>(a: &MinkVector<T>, tol_null: T) -> Result<T, MinkError> {
    match causal_classify(a, tol_null) {
        CausalClass::Null => Err(MinkError::NullVector),
        _ => Ok(mink_inner_slice(a.components(), a.components())
            .abs()
            .sqrt()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalClass {
    SpaceLike,
    TimeLike,
    Null,
}

/// Sign classification of ⟨ξ,ξ⟩_m with a tolerance scaled by |ξ|².
pub fn causal_classify<T: Real>(a: &MinkVector<T>, tol_null: T) -> CausalClass {
    classify_slice(a.components(), tol_null)
}

pub(crate) fn classify_slice<T: Real>(c: &[T], tol_null: T) -> CausalClass {
    let q = mink_inner_slice(c, c);
    let scale = c.iter().fold(T::zero(), |a, &x| a + x * x);
    let tol = tol_null * scale;
    if q > tol {
        CausalClass::SpaceLike
    } else if q < -tol {
        CausalClass::TimeLike
    } else {
        CausalClass::Null
    }
}

/// Dense square matrix of size ≤ 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<T> {
    a: [[T; MAX_COMPONENTS]; MAX_COMPONENTS],
    size: usize,
}

impl<T: Real> Mat<T> {
    pub fn zeros(size: usize) -> Self {
        assert!(size <= MAX_COMPONENTS);
        Self {
            a: [[T::zero(); MAX_COMPONENTS]; MAX_COMPONENTS],
            size,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.a[i][i] = T::one();
        }
        m
    }

    /// The Minkowski metric; it is its own inverse.
    pub fn eta(size: usize) -> Self {
        let mut m = Self::identity(size);
        m.a[0][0] = -T::one();
        m
    }

    pub fn from_rows(rows: &[&[T]]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), rows.len(), "matrix must be square");
            m.a[i][..r.len()].copy_from_slice(r);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.a[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i][j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                m.a[i][j] = self.a[j][i];
            }
        }
        m
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.size, o.size);
        let mut m = Self::zeros(self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                let mut s = T::zero();
                for k in 0..self.size {
                    s = s + self.a[i][k] * o.a[k][j];
                }
                m.a[i][j] = s;
            }
        }
        m
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut m = *self;
        for i in 0..self.size {
            for j in 0..self.size {
                m.a[i][j] = m.a[i][j] - o.a[i][j];
            }
        }
        m
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.size);
        (0..self.size)
            .map(|i| (0..self.size).fold(T::zero(), |s, j| s + self.a[i][j] * v[j]))
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.size).fold(T::zero(), |s, i| s + self.a[i][i])
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut d = T::zero();
        for i in 0..self.size {
            for j in 0..self.size {
                d = d.max((self.a[i][j] - o.a[i][j]).abs());
            }
        }
        d
    }
}

/// Lorentz boost with spatial velocity `v`, |v| < 1.
///
/// Acts as (t, x) ↦ (γ(t − v·x), x + (γ−1)(v̂·x)v̂ − γvt), i.e. the passive
/// change to the frame moving with velocity v.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzBoost<T> {
    pub velocity: Vec<T>,
    pub gamma: T,
    pub matrix: Mat<T>,
}

pub fn boost<T: Real>(v: &[T]) -> Result<LorentzBoost<T>, MinkError> {
    let n = v.len();
    if !(1..=3).contains(&n) {
        return Err(MinkError::InvalidDimension(n));
    }
    let speed_sq = v.iter().fold(T::zero(), |a, &x| a + x * x);
    if !speed_sq.is_finite() || speed_sq >= T::one() {
        return Err(MinkError::Causality(speed_sq.sqrt().to_f64_lossy()));
    }
    let gamma = T::one() / (T::one() - speed_sq).sqrt();
    let mut m = Mat::identity(n + 1);
    m.set(0, 0, gamma);
    for i in 0..n {
        m.set(0, i + 1, -gamma * v[i]);
        m.set(i + 1, 0, -gamma * v[i]);
        if speed_sq > T::zero() {
            for j in 0..n {
                let delta = if i == j { T::one() } else { T::zero() };
                m.set(
                    i + 1,
                    j + 1,
                    delta + (gamma - T::one()) * v[i] * v[j] / speed_sq,
                );
            }
        }
    }
    Ok(LorentzBoost {
        velocity: v.to_vec(),
        gamma,
        matrix: m,
    })
}

impl<T: Real> LorentzBoost<T> {
    pub fn apply(&self, a: &MinkVector<T>) -> Result<MinkVector<T>, MinkError> {
        if a.dim() != self.velocity.len() {
            return Err(MinkError::DimensionMismatch(a.dim(), self.velocity.len()));
        }
        MinkVector::from_components(&self.matrix.apply(a.components()))
    }
}

/// Symmetric (n+1)×(n+1) tensor in packed upper-triangular storage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor<T> {
    tri: [T; 10],
    size: usize,
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row-major upper triangle of a 4×4 matrix
    const OFFSET: [usize; 4] = [0, 4, 7, 9];
    OFFSET[i] + (j - i)
}

impl<T: Real> SymTensor<T> {
    pub fn zeros(size: usize) -> Self {
        assert!((2..=MAX_COMPONENTS).contains(&size));
        Self {
            tri: [T::zero(); 10],
            size,
        }
    }

    /// The contravariant metric η^{αβ} (numerically equal to η_{αβ}).
    pub fn eta(size: usize) -> Self {
        let mut s = Self::zeros(size);
        s.set(0, 0, -T::one());
        for i in 1..size {
            s.set(i, i, T::one());
        }
        s
    }

    pub fn diag(d: &[T]) -> Self {
        let mut s = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            s.set(i, i, x);
        }
        s
    }

    /// Takes the upper triangle of `m`; the lower one is ignored.
    pub fn from_upper(m: &Mat<T>) -> Self {
        let mut s = Self::zeros(m.size());
        for i in 0..m.size() {
            for j in i..m.size() {
                s.set(i, j, m.get(i, j));
            }
        }
        s
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.tri[tri_index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.tri[tri_index(i, j)] = v;
    }

    pub fn to_matrix(&self) -> Mat<T> {
        let mut m = Mat::zeros(self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    /// ηA: the (generally non-symmetric) mixed tensor.
    pub fn lower_first(&self) -> Mat<T> {
        let mut m = self.to_matrix();
        for j in 0..self.size {
            m.set(0, j, -m.get(0, j));
        }
        m
    }

    /// tr(ηA) = −A₀₀ + Σ Aᵢᵢ.
    pub fn eta_trace(&self) -> T {
        (1..self.size).fold(-self.get(0, 0), |s, i| s + self.get(i, i))
    }

    /// Congruence Lᵀ A L.
    pub fn congruence(&self, l: &Mat<T>) -> Self {
        Self::from_upper(&l.transpose().mul(&self.to_matrix()).mul(l))
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for x in out.tri.iter_mut() {
            *x = *x * s;
        }
        out
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (a, &b) in self.tri.iter_mut().zip(o.tri.iter()) {
            *a = *a + b;
        }
    }

    pub fn max_abs(&self) -> T {
        let m = self.size;
        let mut d = T::zero();
        for i in 0..m {
            for j in i..m {
                d = d.max(self.get(i, j).abs());
            }
        }
        d
    }
}

/// Spectrum of ηA for symmetric A.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaSpectrum<T> {
    /// Real parts, sorted descending.
    pub values: Vec<T>,
    /// Largest imaginary part magnitude among the roots.
    pub max_imag: T,
    /// False when some root has |Im| > [`IMAG_TOLERANCE`].
    pub real: bool,
}

/// Eigenvalues of ηA via the characteristic polynomial and closed-form
/// root formulas (degree ≤ 4).
pub fn eig_eta_selfadjoint<T: Real>(a: &SymTensor<T>) -> EtaSpectrum<T> {
    let m = a.lower_first();
    let coeffs = char_poly(&m);
    let mut roots = poly_roots(&coeffs);
    for r in roots.iter_mut() {
        *r = polish(&coeffs, *r);
    }
    let tol = T::lit(IMAG_TOLERANCE);
    let max_imag = roots.iter().fold(T::zero(), |s, r| s.max(r.im.abs()));
    let mut values: Vec<T> = roots.iter().map(|r| r.re).collect();
    values.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    EtaSpectrum {
        values,
        max_imag,
        real: max_imag <= tol,
    }
}

/// Coefficients `c` of the monic characteristic polynomial
/// λ^m + c[m−1]λ^{m−1} + … + c[0] (Faddeev–LeVerrier).
pub fn char_poly<T: Real>(m: &Mat<T>) -> Vec<T> {
    let n = m.size();
    let mut c = vec![T::zero(); n + 1];
    c[n] = T::one();
    let mut mk = Mat::zeros(n);
    for k in 1..=n {
        // M_k = M·M_{k−1} + c_{n−k+1} I
        let mut next = m.mul(&mk);
        for i in 0..n {
            next.set(i, i, next.get(i, i) + c[n - k + 1]);
        }
        let am = m.mul(&next);
        c[n - k] = -am.trace() / T::from_usize_lossy(k);
        mk = next;
    }
    c
}

/// Evaluates the monic polynomial with low-to-high coefficients `c`.
fn poly_eval<T: Real>(c: &[T], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::new(T::zero(), T::zero());
    let mut dp = Complex::new(T::zero(), T::zero());
    for &ci in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(ci, T::zero());
    }
    (p, dp)
}

fn polish<T: Real>(c: &[T], mut z: Complex<T>) -> Complex<T> {
    let (mut p, _) = poly_eval(c, z);
    for _ in 0..8 {
        let (_, dp) = poly_eval(c, z);
        if dp.norm() == T::zero() {
            break;
        }
        let cand = z - p / dp;
        let (pc, _) = poly_eval(c, cand);
        if !(pc.norm() < p.norm()) {
            break;
        }
        z = cand;
        p = pc;
    }
    z
}

/// All complex roots of a monic polynomial of degree 1..=4.
pub fn poly_roots<T: Real>(c: &[T]) -> Vec<Complex<T>> {
    let deg = c.len() - 1;
    match deg {
        1 => vec![Complex::new(-c[0], T::zero())],
        2 => quadratic(c[1], c[0]).to_vec(),
        3 => cubic(c[2], c[1], c[0]).to_vec(),
        4 => quartic(c[3], c[2], c[1], c[0]).to_vec(),
        _ => panic!("unsupported polynomial degree {deg}"),
    }
}

fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

fn near_zero<T: Real>(x: T, scale: T) -> bool {
    x.abs() <= T::lit(1e-12) * scale
}

/// Roots of z² + bz + c.
fn quadratic<T: Real>(b: T, c: T) -> [Complex<T>; 2] {
    let two = T::lit(2.0);
    let mut disc = b * b - T::lit(4.0) * c;
    if near_zero(disc, b * b + T::lit(4.0) * c.abs()) {
        disc = T::zero();
    }
    if disc >= T::zero() {
        let s = disc.sqrt();
        let q = -(b + b.signum() * s) / two;
        if q == T::zero() {
            return [cplx(T::zero()), cplx(T::zero())];
        }
        [cplx(q), cplx(c / q)]
    } else {
        let re = -b / two;
        let im = (-disc).sqrt() / two;
        [Complex::new(re, im), Complex::new(re, -im)]
    }
}

/// Roots of z² + bz + c with complex coefficients.
fn quadratic_c<T: Real>(b: Complex<T>, c: Complex<T>) -> [Complex<T>; 2] {
    let two = T::lit(2.0);
    let disc = b * b - c * T::lit(4.0);
    let s = disc.sqrt();
    let q1 = -(b + s) / two;
    let q2 = -(b - s) / two;
    // pick the larger-magnitude root for stability
    let q = if q1.norm() >= q2.norm() { q1 } else { q2 };
    if q.norm() == T::zero() {
        return [cplx(T::zero()), cplx(T::zero())];
    }
    [q, c / q]
}

/// Roots of z³ + az² + bz + c.
fn cubic<T: Real>(a: T, b: T, c: T) -> [Complex<T>; 3] {
    let three = T::lit(3.0);
    let shift = a / three;
    let p = b - a * a / three;
    let q = T::lit(2.0) * a * a * a / T::lit(27.0) - a * b / three + c;
    let half_q = q / T::lit(2.0);
    let third_p = p / three;
    let mut disc = half_q * half_q + third_p * third_p * third_p;
    let scale = half_q * half_q + third_p.abs().powi(3);
    if near_zero(disc, scale) {
        disc = T::zero();
    }
    let roots: [Complex<T>; 3] = if scale == T::zero() {
        [cplx(T::zero()); 3]
    } else if disc < T::zero() {
        // three distinct real roots
        let r = T::lit(2.0) * (-third_p).sqrt();
        let arg = (T::lit(3.0) * q / (T::lit(2.0) * p) * (-three / p).sqrt())
            .max(-T::one())
            .min(T::one());
        let phi = arg.acos() / three;
        let tau = T::TAU() / three;
        [
            cplx(r * phi.cos()),
            cplx(r * (phi - tau).cos()),
            cplx(r * (phi - T::lit(2.0) * tau).cos()),
        ]
    } else {
        let sd = disc.sqrt();
        let u = (-half_q + sd).cbrt();
        let v = (-half_q - sd).cbrt();
        let re = -(u + v) / T::lit(2.0);
        let im = (u - v) * three.sqrt() / T::lit(2.0);
        [cplx(u + v), Complex::new(re, im), Complex::new(re, -im)]
    };
    roots.map(|z| z - cplx(shift))
}

/// Roots of z⁴ + az³ + bz² + cz + d (Ferrari).
fn quartic<T: Real>(a: T, b: T, c: T, d: T) -> [Complex<T>; 4] {
    let shift = a / T::lit(4.0);
    let a2 = a * a;
    let p = b - T::lit(3.0) * a2 / T::lit(8.0);
    let q = c - a * b / T::lit(2.0) + a2 * a / T::lit(8.0);
    let r = d - a * c / T::lit(4.0) + a2 * b / T::lit(16.0) - T::lit(3.0) * a2 * a2 / T::lit(256.0);
    let scale = T::one() + p.abs() + q.abs().sqrt() + r.abs().sqrt();
    let ys: [Complex<T>; 4] = if near_zero(q, scale * scale * scale) {
        // biquadratic: w² + pw + r = 0, y = ±√w
        let [w1, w2] = quadratic(p, r);
        let (s1, s2) = (w1.sqrt(), w2.sqrt());
        [s1, -s1, s2, -s2]
    } else {
        // resolvent: m³ + p m² + (p²/4 − r) m − q²/8 = 0, take the largest real root
        let res = cubic(p, p * p / T::lit(4.0) - r, -q * q / T::lit(8.0));
        let m = res
            .iter()
            .filter(|z| z.im.abs() <= T::lit(1e-9) * (T::one() + z.re.abs()))
            .map(|z| z.re)
            .fold(T::neg_infinity(), T::max)
            .max(T::zero());
        let s = Complex::new(T::lit(2.0) * m, T::zero()).sqrt();
        let base = cplx(p / T::lit(2.0) + m);
        let qs = if s.norm() > T::zero() {
            cplx(q) / (s * T::lit(2.0))
        } else {
            cplx(T::zero())
        };
        let [y1, y2] = quadratic_c(-s, base + qs);
        let [y3, y4] = quadratic_c(s, base - qs);
        [y1, y2, y3, y4]
    };
    ys.map(|z| z - cplx(shift))
}

/// A unit-norm null vector of `m` (assumed singular), by Gaussian
/// elimination with full pivoting.
pub fn null_vector<T: Real>(m: &Mat<T>) -> Vec<T> {
    let n = m.size();
    let mut a = *m;
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(T::zero(), |s, (i, j)| s.max(a.get(i, j).abs()));
    let tol = T::lit(1e-10) * scale.max(T::min_positive_value());
    for k in 0..n {
        // full pivot search in the trailing block
        let (mut pi, mut pj, mut best) = (k, k, T::zero());
        for i in k..n {
            for j in k..n {
                if a.get(i, j).abs() > best {
                    best = a.get(i, j).abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= tol {
            break;
        }
        for j in 0..n {
            let t = a.get(k, j);
            a.set(k, j, a.get(pi, j));
            a.set(pi, j, t);
        }
        for i in 0..n {
            let t = a.get(i, k);
            a.set(i, k, a.get(i, pj));
            a.set(i, pj, t);
        }
        col_perm.swap(k, pj);
        for i in (k + 1)..n {
            let f = a.get(i, k) / a.get(k, k);
            for j in k..n {
                a.set(i, j, a.get(i, j) - f * a.get(k, j));
            }
        }
        rank += 1;
    }
    if rank == n {
        rank = n - 1;
    }
    // free variable at position `rank` set to 1, the rest of the free ones 0
    let mut x = vec![T::zero(); n];
    x[rank] = T::one();
    for i in (0..rank).rev() {
        let mut s = T::zero();
        for j in (i + 1)..n {
            s = s + a.get(i, j) * x[j];
        }
        x[i] = -s / a.get(i, i);
    }
    let mut out = vec![T::zero(); n];
    for (k, &c) in col_perm.iter().enumerate() {
        out[c] = x[k];
    }
    let norm = out.iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
    out.iter().map(|&v| v / norm).collect()
}
