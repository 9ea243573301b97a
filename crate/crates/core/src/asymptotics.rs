//! Large-`d` behaviour of the clock/shift pair.
//!
//! Writing `U = e^{i√(2π/d) u}` and `V = e^{i√(2π/d) v}`, states localized in
//! both eigenbases have `ΔU² ≈ (2π/d)Δu²`, and the unitary relations approach
//! their Hermitian counterparts for `u`, `v`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::bounds::{ur1, Sign};
use crate::error::{Error, Result};
use crate::linalg::{check_dim, eig_hermitian, inner, norm, ComplexMatrix, EigenDecomposition, PureState, State};
use crate::mus::harper_ground;
use crate::operators::{check_unitary, clock, cosine_part, dft, shift, symmetric_index, unitary_power, WeylPair};
use crate::uncertainty::{orthogonal_component, variance};

/// Two eigenvalues of `(W + W†)/2` closer than this share an eigenspace that
/// is split by the sine part.
const CLUSTER_TOL: f64 = 1e-9;

fn scale(d: usize) -> f64 {
    (2.0 * PI / d as f64).sqrt()
}

/// Eigenphase on `[−π, π)`.
fn wrap_phase(phi: f64) -> f64 {
    if phi >= PI - 1e-12 {
        phi - 2.0 * PI
    } else {
        phi
    }
}

/// Spectral decomposition of a unitary as `(phases, eigenvectors)`.
///
/// `C = (W + W†)/2` and `S = (W − W†)/2i` commute; `C` is diagonalized first
/// and `S` is then diagonalized inside each eigenspace of `C`.
fn unitary_eigen(w: &ComplexMatrix) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    check_unitary(w, 1e-10)?;
    let d = w.dim();
    let c = eig_hermitian(&cosine_part(w))?;
    let wd = w.adjoint();
    let s = &(w - &wd) * Complex64::new(0.0, -0.5);
    let mut phases = Vec::with_capacity(d);
    let mut vectors = Vec::with_capacity(d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && c.eigenvalues[end] - c.eigenvalues[end - 1] <= CLUSTER_TOL {
            end += 1;
        }
        let basis: Vec<Vec<Complex64>> = (start..end).map(|k| c.eigenvectors.column(k)).collect();
        let m = basis.len();
        let sb: Vec<Vec<Complex64>> = basis.iter().map(|b| s.apply(b)).collect();
        let block = ComplexMatrix::from_fn(m, |i, j| inner(&basis[i], &sb[j]));
        let sub = eig_hermitian(&block)?;
        for k in 0..m {
            let coef = sub.eigenvectors.column(k);
            let mut x = vec![Complex64::new(0.0, 0.0); d];
            for (b, cf) in basis.iter().zip(&coef) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += cf * bi;
                }
            }
            let mean = inner(&x, &w.apply(&x));
            phases.push(wrap_phase(mean.arg()));
            vectors.push(x);
        }
        start = end;
    }
    Ok((phases, vectors))
}

/// Hermitian `u` with `W = e^{i√(2π/d) u}`, eigenphases taken on `[−π, π)`.
pub fn generator(w: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = w.dim();
    let (phases, vectors) = unitary_eigen(w)?;
    let mut u = ComplexMatrix::zeros(d);
    let k = 1.0 / scale(d);
    for (phi, x) in phases.iter().zip(&vectors) {
        let term = ComplexMatrix::outer(x, x);
        u = &u + &(&term * (phi * k));
    }
    Ok(u)
}

/// `e^{i√(2π/d) u}` for Hermitian `u`.
pub fn exponentiate(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let s = scale(u.dim());
    let eig: EigenDecomposition = eig_hermitian(u)?;
    Ok(eig.map_spectrum(|x| Complex64::from_polar(1.0, s * x)))
}

/// Generators of clock and shift in closed form: `u = √(2π/d) diag(j)` and
/// `v = F u F†`.
pub fn clock_shift_generators(d: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let s = scale(d);
    let diag: Vec<Complex64> = (0..d).map(|k| Complex64::new(symmetric_index(k, d) as f64 * s, 0.0)).collect();
    let u = ComplexMatrix::from_diagonal(&diag);
    let f = dft(d)?;
    let v = &(&f * &u) * &f.adjoint();
    Ok((u, v))
}

/// Eigenbasis in which the window `I_{0,δ}` is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Clock eigenbasis `|j⟩`.
    Computational,
    /// Shift eigenbasis `F|j⟩`.
    Fourier,
}

/// Window `I_{0,δ} = { j : |j| ≤ (2/π)⌊d/2⌋δ }` over symmetric labels.
pub fn window(d: usize, delta: f64) -> Vec<usize> {
    let radius = 2.0 / PI * (d / 2) as f64 * delta;
    (0..d).filter(|&k| (symmetric_index(k, d) as f64).abs() <= radius).collect()
}

fn basis_coefficients(psi: &PureState, basis: Basis) -> Result<Vec<Complex64>> {
    Ok(match basis {
        Basis::Computational => psi.amplitudes().to_vec(),
        Basis::Fourier => dft(psi.dim())?.adjoint().apply(psi.amplitudes()),
    })
}

/// `⟨ψ|P_δ|ψ⟩` in the chosen basis.
pub fn window_weight(psi: &PureState, delta: f64, basis: Basis) -> Result<f64> {
    let c = basis_coefficients(psi, basis)?;
    Ok(window(psi.dim(), delta).iter().map(|&k| c[k].norm_sqr()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub d: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub p_delta_expectation: f64,
    /// `⟨ψ|P_δ|ψ⟩ > 1 − ε`.
    pub member: bool,
    /// `δ²/2 + 2ε`.
    pub variance_bound: f64,
}

pub fn pdelta_membership(psi: &PureState, delta: f64, epsilon: f64, basis: Basis) -> Result<MembershipReport> {
    let p = window_weight(psi, delta, basis)?;
    Ok(MembershipReport {
        d: psi.dim(),
        delta,
        epsilon,
        p_delta_expectation: p,
        member: p > 1.0 - epsilon,
        variance_bound: 0.5 * delta * delta + 2.0 * epsilon,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum LocalizationOutcome {
    /// `ψ` is outside `U_δ(ε)`; nothing to check.
    Vacuous,
    /// `margin = δ²/2 + 2ε − ΔW²`.
    Checked { holds: bool, margin: f64 },
}

/// Localization bound `ΔW² ≤ δ²/2 + 2ε` for members of `U_δ(ε)`, with `W`
/// the clock (computational window) or the shift (Fourier window).
pub fn localization_check(psi: &PureState, delta: f64, epsilon: f64, basis: Basis) -> Result<LocalizationOutcome> {
    let report = pdelta_membership(psi, delta, epsilon, basis)?;
    if !report.member {
        return Ok(LocalizationOutcome::Vacuous);
    }
    let w = match basis {
        Basis::Computational => clock(psi.dim())?,
        Basis::Fourier => shift(psi.dim())?,
    };
    let margin = report.variance_bound - variance(psi, &w)?;
    Ok(LocalizationOutcome::Checked { holds: margin >= 0.0, margin })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Centering {
    pub k: usize,
    pub state: PureState,
    /// `1 − ⟨V^kψ|P_δ|V^kψ⟩`.
    pub epsilon: f64,
    /// `(ΔU² + π²/d²) / sin²(δ/2)`.
    pub epsilon_bound: f64,
    /// Whether `V^kψ ∈ U_δ(ε_bound)`.
    pub found: bool,
}

/// Shift `V^k` that best concentrates `ψ` in the computational window.
pub fn center_translation(psi: &PureState, delta: f64, pair: &WeylPair) -> Result<Centering> {
    let d = pair.dim();
    check_dim(d, psi.dim())?;
    let win = window(d, delta);
    let amps = psi.amplitudes();
    // (V^k ψ)_j = ψ_{j−k}
    let weight = |k: usize| -> f64 { win.iter().map(|&j| amps[(j + d - k) % d].norm_sqr()).sum() };
    let mut best_k = 0;
    let mut best_w = f64::NEG_INFINITY;
    for k in 0..d {
        let w = weight(k);
        if w > best_w + 1e-14 {
            best_k = k;
            best_w = w;
        }
    }
    let state = psi.evolve(&unitary_power(pair.v(), best_k as i64))?;
    let epsilon = 1.0 - window_weight(&state, delta, Basis::Computational)?;
    let du = variance(psi, pair.u())?;
    let epsilon_bound = (du + PI * PI / (d * d) as f64) / (0.5 * delta).sin().powi(2);
    Ok(Centering { k: best_k, state, epsilon, epsilon_bound, found: 1.0 - epsilon > 1.0 - epsilon_bound })
}

/// `⟨A²⟩ − ⟨A⟩²` for Hermitian `A`.
pub fn hermitian_variance(psi: &PureState, a: &ComplexMatrix) -> Result<f64> {
    let mean = psi.expect(a)?.re;
    let ap = a.apply(psi.amplitudes());
    Ok((norm(&ap).powi(2) - mean * mean).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SideBySide {
    pub lhs: f64,
    pub rhs: f64,
}

impl SideBySide {
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// `Δu² + Δv² ≥ ±i⟨[u,v]⟩ + |⟨ψ|u ± iv|ψ⊥⟩|²` with the maximizing
/// `ψ⊥ ∝ (I − |ψ⟩⟨ψ|)(u ∓ iv)|ψ⟩`.
pub fn hermitian_mp_bound(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix, sign: Sign) -> Result<SideBySide> {
    check_dim(u.dim(), v.dim())?;
    let lhs = hermitian_variance(psi, u)? + hermitian_variance(psi, v)?;
    let s = sign.factor();
    let comm = psi.expect(&u.commutator(v))?;
    let op = u - &(v * Complex64::new(0.0, s));
    let (_, r) = orthogonal_component(psi, &op)?;
    let rhs = (Complex64::new(0.0, s) * comm).re + norm(&r).powi(2);
    Ok(SideBySide { lhs, rhs })
}

/// `Δu² + Δv² ≥ ½Δ(u + v)²`.
pub fn hermitian_parallelogram(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<SideBySide> {
    let lhs = hermitian_variance(psi, u)? + hermitian_variance(psi, v)?;
    Ok(SideBySide { lhs, rhs: 0.5 * hermitian_variance(psi, &(u + v))? })
}

/// `‖½[(u − ⟨u⟩)²/Δu² + (v − ⟨v⟩)²/Δv²]ψ − ψ‖`.
pub fn mus_limit_residual(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let p = psi.amplitudes();
    let mut acc = vec![Complex64::new(0.0, 0.0); p.len()];
    for a in [u, v] {
        check_dim(psi.dim(), a.dim())?;
        let var = hermitian_variance(psi, a)?;
        if var <= 1e-10 {
            return Err(Error::DegenerateVariance(var));
        }
        let mean = psi.expect(a)?.re;
        let shifted: Vec<Complex64> = a.apply(p).iter().zip(p).map(|(x, q)| x - mean * q).collect();
        let twice: Vec<Complex64> = a.apply(&shifted).iter().zip(&shifted).map(|(x, q)| x - mean * q).collect();
        for (s, t) in acc.iter_mut().zip(&twice) {
            *s += 0.5 * t / var;
        }
    }
    let r: Vec<Complex64> = acc.iter().zip(p).map(|(a, x)| a - x).collect();
    Ok(norm(&r))
}

/// Second-order expansion
/// `⟨U†V⟩ ≈ 1 + (π/d)(2⟨uv⟩ − ⟨u²⟩ − ⟨v²⟩) + i√(2π/d)(⟨v⟩ − ⟨u⟩)`.
pub fn udv_series(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Complex64> {
    let d = psi.dim();
    let uv = psi.expect(&(u * v))?;
    let uu = psi.expect(&(u * u))?;
    let vv = psi.expect(&(v * v))?;
    let eu = psi.expect(u)?;
    let ev = psi.expect(v)?;
    Ok(Complex64::new(1.0, 0.0) + (2.0 * uv - uu - vv) * (PI / d as f64) + Complex64::new(0.0, scale(d)) * (ev - eu))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `cos θ|0⟩ − sin θ|d−1⟩` in storage slots.
    ThetaSweep {
        theta: f64,
    },
    HarperGround,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticRecord {
    pub d: usize,
    pub family: Family,
    pub sum: f64,
    /// `(2π/d)(Δu² + Δv²)`.
    pub scaled_hermitian: f64,
    pub ur1: f64,
    /// `|sum − scaled| / sum`.
    pub gap_scaled: f64,
    /// `(sum − ur1) / sum`.
    pub gap_ur1: f64,
    /// Hermitian minimum-uncertainty residual; `None` when a variance vanishes.
    pub mus_residual: Option<f64>,
    /// `|⟨U†V⟩ − series|`.
    pub series_error: f64,
}

pub fn family_state(d: usize, family: Family) -> Result<PureState> {
    match family {
        Family::ThetaSweep { theta } => {
            let mut amps = vec![Complex64::new(0.0, 0.0); d];
            amps[0] = Complex64::new(theta.cos(), 0.0);
            amps[d - 1] += Complex64::new(-theta.sin(), 0.0);
            PureState::normalized(amps)
        }
        Family::HarperGround => Ok(harper_ground(&WeylPair::clock_shift(d)?)?.state),
    }
}

pub fn asymptotic_gap(d: usize, family: Family) -> Result<AsymptoticRecord> {
    let pair = WeylPair::clock_shift(d)?;
    let psi = family_state(d, family)?;
    let (u, v) = clock_shift_generators(d)?;
    let sum = variance(&psi, pair.u())? + variance(&psi, pair.v())?;
    let scaled = 2.0 * PI / d as f64 * (hermitian_variance(&psi, &u)? + hermitian_variance(&psi, &v)?);
    let bound = ur1(&psi, pair.u(), pair.v())?;
    let mus_residual = match mus_limit_residual(&psi, &u, &v) {
        Ok(r) => Some(r),
        Err(Error::DegenerateVariance(_)) => None,
        Err(e) => return Err(e),
    };
    let exact = psi.expect(&(&pair.u().adjoint() * pair.v()))?;
    Ok(AsymptoticRecord {
        d,
        family,
        sum,
        scaled_hermitian: scaled,
        ur1: bound,
        gap_scaled: (sum - scaled).abs() / sum,
        gap_ur1: (sum - bound) / sum,
        mus_residual,
        series_error: (exact - udv_series(&psi, &u, &v)?).norm(),
    })
}
