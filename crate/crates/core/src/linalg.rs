//! Dense complex matrices, pure and mixed states, and a deterministic
//! Hermitian eigensolver.
//!
//! Everything downstream (operator families, bounds, minimum-uncertainty
//! solvers) is written against the three carriers defined here:
//! [`ComplexMatrix`], [`PureState`] and [`DensityMatrix`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|‖ψ‖ − 1|` accepted by [`PureState::new`].
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance used by [`DensityMatrix::new`] for Hermiticity, trace and
/// positivity.
pub const DENSITY_TOL: f64 = 1e-12;

/// Dense `d × d` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty or non-finite
    /// input.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadDimension(0));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Panics if `dim == 0`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) })
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    /// Matrix–vector product `M v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix dimension");
        (0..self.dim).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `⟨a|M|b⟩`.
    pub fn sandwich(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mb = self.apply(b);
        inner(a, &mb)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow(&self, mut exp: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = &result * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `‖M†M − I‖_F ≤ tol · d`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).frobenius_norm() <= tol * self.dim as f64
    }

    /// `‖M − M†‖_F ≤ tol · d`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.dim as f64
    }

    pub fn hermitian_deviation(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    fn check_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Complex64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Component of `v` orthogonal to the unit vector `psi`.
pub fn project_out(v: &[Complex64], psi: &[Complex64]) -> Vec<Complex64> {
    let overlap = inner(psi, v);
    v.iter().zip(psi).map(|(x, p)| x - overlap * p).collect()
}

/// Anything expectation values can be taken in: a ket or a density matrix.
pub trait State {
    fn dim(&self) -> usize;

    /// `⟨ψ|A|ψ⟩` or `Tr(ρA)`.
    fn expect(&self, op: &ComplexMatrix) -> Result<Complex64>;
}

/// Unit-norm ket.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Accepts amplitudes already normalized to within [`NORM_TOL`].
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::BadDimension(0));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = norm(&amps);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::BadDimension(0));
        }
        let n = norm(&amps);
        if !n.is_finite() {
            return Err(Error::NonFinite);
        }
        if n <= f64::MIN_POSITIVE {
            return Err(Error::ZeroVector);
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Ok(Self { amps })
    }

    /// Computational basis vector `|k⟩` (storage slot `k`).
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if dim == 0 || k >= dim {
            return Err(Error::BadDimension(dim));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(inner(&self.amps, &other.amps))
    }

    /// `U|ψ⟩`, renormalized to absorb rounding.
    pub fn evolve(&self, op: &ComplexMatrix) -> Result<PureState> {
        check_dim(self.dim(), op.dim())?;
        PureState::normalized(op.apply(&self.amps))
    }

    pub fn with_phase(&self, alpha: f64) -> PureState {
        let ph = Complex64::from_polar(1.0, alpha);
        PureState { amps: self.amps.iter().map(|z| z * ph).collect() }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amps, &self.amps)
    }
}

impl State for PureState {
    fn dim(&self) -> usize {
        self.amps.len()
    }

    fn expect(&self, op: &ComplexMatrix) -> Result<Complex64> {
        check_dim(self.dim(), op.dim())?;
        Ok(op.sandwich(&self.amps, &self.amps))
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    rho: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and spectrum to [`DENSITY_TOL`].
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        let dev = rho.hermitian_deviation();
        if dev > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let eig = eig_hermitian(&rho)?;
        if let Some(&low) = eig.eigenvalues.first() {
            if low < -DENSITY_TOL {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {low:.3e}")));
            }
        }
        Ok(Self { rho })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { rho: psi.projector() }
    }

    /// `I / d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { rho: &ComplexMatrix::identity(dim) * (1.0 / dim as f64) }
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`; weights must be non-negative and sum to one.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        let first = states.first().ok_or(Error::BadRank { rank: 0, dim: 0 })?;
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch { expected: states.len(), found: weights.len() });
        }
        if weights.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidDensity("negative mixture weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("weights sum to {total}")));
        }
        let d = first.dim();
        let mut rho = ComplexMatrix::zeros(d);
        for (p, psi) in weights.iter().zip(states) {
            check_dim(d, psi.dim())?;
            rho = &rho + &(&psi.projector() * *p);
        }
        Ok(Self { rho })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eig_hermitian(&self.rho)?.eigenvalues)
    }
}

impl State for DensityMatrix {
    fn dim(&self) -> usize {
        self.rho.dim()
    }

    fn expect(&self, op: &ComplexMatrix) -> Result<Complex64> {
        check_dim(self.dim(), op.dim())?;
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.rho[(i, j)] * op[(j, i)];
            }
        }
        Ok(acc)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Stopping rule for [`eig_hermitian_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenConfig {
    /// Converged once the off-diagonal Frobenius norm is at most
    /// `tolerance · ‖H‖_F`.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_sweeps: 100 }
    }
}

/// Ascending eigenvalues with orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> PureState {
        PureState { amps: self.eigenvectors.column(k) }
    }

    pub fn ground_state(&self) -> PureState {
        self.vector(0)
    }

    /// `X diag(f(λ)) X†`.
    pub fn map_spectrum(&self, mut f: impl FnMut(f64) -> Complex64) -> ComplexMatrix {
        let x = &self.eigenvectors;
        let n = x.dim();
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| x[(i, k)] * fl[k] * x[(j, k)].conj()).sum())
    }

    /// `X Λ X†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| Complex64::new(l, 0.0))
    }
}

/// Hermitian eigendecomposition with the default [`EigenConfig`].
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    eig_hermitian_with(h, &EigenConfig::default())
}

/// Cyclic complex Jacobi eigensolver.
///
/// Rotations are applied in fixed row-major `(p, q)` order, so identical input
/// yields bit-identical output. Eigenpairs are sorted ascending (stable with
/// respect to the diagonal position on ties) and each eigenvector is rescaled
/// so that its first component of modulus above `1e-8` is real and positive.
pub fn eig_hermitian_with(h: &ComplexMatrix, config: &EigenConfig) -> Result<EigenDecomposition> {
    let n = h.dim();
    let deviation = h.hermitian_deviation();
    if deviation > 1e-10 * n as f64 {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            if i == j {
                Complex64::new(h[(i, i)].re, 0.0)
            } else {
                (h[(i, j)] + h[(j, i)].conj()) * 0.5
            }
        })
        .collect();
    let mut x = ComplexMatrix::identity(n).data;
    let scale = h.frobenius_norm();
    let target = config.tolerance * scale;

    let off_norm = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target || off == 0.0 {
            break;
        }
        if sweeps >= config.max_sweeps {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ph = apq / mag;
                let phc = ph.conj();

                // A <- A J
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * phc * s;
                    a[k * n + q] = akp * s + akq * phc * c;
                }
                // A <- J† A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * ph * s;
                    a[q * n + k] = apk * s + aqk * ph * c;
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                // X <- X J
                for k in 0..n {
                    let xkp = x[k * n + p];
                    let xkq = x[k * n + q];
                    x[k * n + p] = xkp * c - xkq * phc * s;
                    x[k * n + q] = xkp * s + xkq * phc * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (col, &src) in order.iter().enumerate() {
        let pivot = (0..n).map(|r| x[r * n + src]).find(|z| z.norm() > 1e-8);
        let fix = pivot.map(|z| z.conj() / z.norm()).unwrap_or(Complex64::new(1.0, 0.0));
        for r in 0..n {
            vectors[r * n + col] = x[r * n + src] * fix;
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: ComplexMatrix { dim: n, data: vectors } })
}
