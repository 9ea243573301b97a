//! Minimum-uncertainty states for a Weyl pair.
//!
//! Critical points of `ΔU²ΔV²` on the unit sphere satisfy a self-consistent
//! eigenvalue equation. Once a translation `U^a V^{−b}` has made `⟨U⟩` and
//! `⟨V⟩` real, the minimizer is the ground state of the Harper Hamiltonian
//! `−(U + U†)/2 − (V + V†)/2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{ur1_bargmann, ur1_weak_cos, ur2_best, ur3};
use crate::error::{Error, Result};
use crate::linalg::{check_dim, eig_hermitian, norm, ComplexMatrix, EigenDecomposition, PureState, State};
use crate::operators::{harper, translation, WeylPair};
use crate::uncertainty::variance;

/// Variances at or below this make the critical-state equation singular.
pub const VARIANCE_FLOOR: f64 = 1e-10;

/// `|Im⟨U⟩| + |Im⟨V⟩|` accepted as real after realignment.
pub const ALIGNMENT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct HarperGround {
    pub state: PureState,
    pub delta_u2: f64,
    pub delta_v2: f64,
    pub energy: f64,
    /// `E₁ − E₀`; zero means the ground space is degenerate and `state` is the
    /// solver's lowest-index vector.
    pub gap: f64,
}

pub fn harper_spectrum(pair: &WeylPair) -> Result<EigenDecomposition> {
    eig_hermitian(&harper(pair))
}

pub fn harper_ground(pair: &WeylPair) -> Result<HarperGround> {
    let eig = harper_spectrum(pair)?;
    let state = eig.ground_state();
    let energy = eig.eigenvalues[0];
    let gap = eig.eigenvalues.get(1).map_or(f64::INFINITY, |e1| e1 - energy);
    Ok(HarperGround {
        delta_u2: variance(&state, pair.u())?,
        delta_v2: variance(&state, pair.v())?,
        state,
        energy,
        gap,
    })
}

/// `‖Lψ − ψ‖` with `L = (1/n) Σ_i [1 − (⟨U_i⟩U_i† + ⟨U_i†⟩U_i)/2] / ΔU_i²`,
/// expectations taken on `ψ` itself.
pub fn critical_residual_many(psi: &PureState, ops: &[ComplexMatrix]) -> Result<f64> {
    let p = psi.amplitudes();
    let mut acc = vec![Complex64::new(0.0, 0.0); p.len()];
    for w in ops {
        check_dim(psi.dim(), w.dim())?;
        let mean = psi.expect(w)?;
        let var = variance(psi, w)?;
        if var <= VARIANCE_FLOOR {
            return Err(Error::DegenerateVariance(var));
        }
        let wp = w.apply(p);
        let wdp = w.adjoint().apply(p);
        for (k, a) in acc.iter_mut().enumerate() {
            let cos_part = 0.5 * (mean * wdp[k] + mean.conj() * wp[k]);
            *a += (p[k] - cos_part) / var;
        }
    }
    let n = ops.len() as f64;
    let r: Vec<Complex64> = acc.iter().zip(p).map(|(a, x)| a / n - x).collect();
    Ok(norm(&r))
}

/// Residual of the two-operator critical-state equation.
pub fn critical_residual(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    critical_residual_many(psi, &[u.clone(), v.clone()])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Realignment {
    pub state: PureState,
    pub a: usize,
    pub b: usize,
    /// Whether `|Im⟨U⟩| + |Im⟨V⟩| ≤ 1e-6` on `state`.
    pub aligned: bool,
}

/// Translation `ψ' = U^a V^{−b} ψ` maximizing `Re⟨U⟩ + Re⟨V⟩`.
///
/// Under this translation `⟨U⟩ → ω^{−b}⟨U⟩` and `⟨V⟩ → ω^{−a}⟨V⟩` with
/// `ω = e^{iΦ_w}`, so the grid is scored from the two expectation values
/// before the winning translation is applied.
pub fn realign_phases(psi: &PureState, pair: &WeylPair) -> Result<Realignment> {
    let d = pair.dim();
    check_dim(d, psi.dim())?;
    let eu = psi.expect(pair.u())?;
    let ev = psi.expect(pair.v())?;
    let omega = |k: usize| Complex64::from_polar(1.0, -pair.phase() * k as f64);
    let score = |a: usize, b: usize| -> (f64, f64) {
        let nu = omega(b) * eu;
        let nv = omega(a) * ev;
        (nu.re + nv.re, nu.im.abs() + nv.im.abs())
    };
    let mut best = (0usize, 0usize);
    let mut best_key = (false, f64::NEG_INFINITY);
    for a in 0..d {
        for b in 0..d {
            let (re, im) = score(a, b);
            let key = (im <= ALIGNMENT_TOL, re);
            // aligned candidates first, then larger real part; ties keep the earliest
            let better = (key.0 && !best_key.0) || (key.0 == best_key.0 && key.1 > best_key.1 + 1e-14);
            if better {
                best = (a, b);
                best_key = key;
            }
        }
    }
    let (a, b) = best;
    let state = psi.evolve(&translation(pair, a as i64, b as i64))?;
    let im = state.expect(pair.u())?.im.abs() + state.expect(pair.v())?.im.abs();
    Ok(Realignment { state, a, b, aligned: im <= ALIGNMENT_TOL })
}

/// `θ = atan2(C₂, C₁)` with `C₁ = ΔV²√(1 − ΔU²)`, `C₂ = ΔU²√(1 − ΔV²)`.
pub fn squeezing_theta(delta_u2: f64, delta_v2: f64) -> f64 {
    let c1 = delta_v2 * (1.0 - delta_u2).max(0.0).sqrt();
    let c2 = delta_u2 * (1.0 - delta_v2).max(0.0).sqrt();
    c2.atan2(c1)
}

/// Residuals of `[cos θ C_Ũ + sin θ C_Ṽ]ψ = λψ` for the two candidate
/// eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TiltedResiduals {
    pub theta: f64,
    /// `λ = cos θ |⟨Ũ⟩| + sin θ |⟨Ṽ⟩|`
    pub direct_paired: f64,
    /// `λ = cos θ |⟨Ṽ⟩| + sin θ |⟨Ũ⟩|`
    pub cross_paired: f64,
}

/// `Ũ = e^{−iφ_U}U`, `Ṽ = e^{−iφ_V}V` with `φ` the phases of `⟨U⟩`, `⟨V⟩`.
pub fn tilted_stationarity_check(psi: &PureState, pair: &WeylPair) -> Result<TiltedResiduals> {
    check_dim(pair.dim(), psi.dim())?;
    let eu = psi.expect(pair.u())?;
    let ev = psi.expect(pair.v())?;
    let du = variance(psi, pair.u())?;
    let dv = variance(psi, pair.v())?;
    for var in [du, dv] {
        if var <= VARIANCE_FLOOR {
            return Err(Error::DegenerateVariance(var));
        }
    }
    let theta = squeezing_theta(du, dv);
    let (c, s) = (theta.cos(), theta.sin());
    let p = psi.amplitudes();
    let half_sum = |w: &ComplexMatrix, mean: Complex64| -> Vec<Complex64> {
        let phase = if mean.norm() > 0.0 { mean / mean.norm() } else { Complex64::new(1.0, 0.0) };
        let wp = w.apply(p);
        let wdp = w.adjoint().apply(p);
        wp.iter().zip(&wdp).map(|(x, y)| 0.5 * (phase.conj() * x + phase * y)).collect()
    };
    let cu = half_sum(pair.u(), eu);
    let cv = half_sum(pair.v(), ev);
    let lhs: Vec<Complex64> = cu.iter().zip(&cv).map(|(x, y)| c * x + s * y).collect();
    let residual = |lambda: f64| -> f64 {
        let r: Vec<Complex64> = lhs.iter().zip(p).map(|(l, x)| l - lambda * x).collect();
        norm(&r)
    };
    Ok(TiltedResiduals {
        theta,
        direct_paired: residual(c * eu.norm() + s * ev.norm()),
        cross_paired: residual(c * ev.norm() + s * eu.norm()),
    })
}

/// One row of the minimum-uncertainty table. Bound columns are half-sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MusRecord {
    pub d: usize,
    pub delta_u2: f64,
    pub delta_v2: f64,
    /// Half of the `|cos Φ₃|` form of the first relation.
    pub ur1_half: f64,
    /// Half of the signed `cos Φ₃` form of the first relation.
    pub ur1_tight_half: f64,
    pub ur2_half: f64,
    pub ur3_half: f64,
    pub energy: f64,
    pub gap: f64,
    pub residual: f64,
    pub realignment: (usize, usize),
}

pub fn mus_record(d: usize) -> Result<MusRecord> {
    let pair = WeylPair::clock_shift(d)?;
    let ground = harper_ground(&pair)?;
    let aligned = realign_phases(&ground.state, &pair)?;
    let psi = &aligned.state;
    let (u, v) = (pair.u(), pair.v());
    Ok(MusRecord {
        d,
        delta_u2: variance(psi, u)?,
        delta_v2: variance(psi, v)?,
        ur1_half: 0.5 * ur1_weak_cos(psi, u, v)?,
        ur1_tight_half: 0.5 * ur1_bargmann(psi, u, v)?,
        ur2_half: 0.5 * ur2_best(psi, u, v)?.value,
        ur3_half: 0.5 * ur3(psi, u, v)?,
        energy: ground.energy,
        gap: ground.gap,
        residual: critical_residual(psi, u, v)?,
        realignment: (aligned.a, aligned.b),
    })
}

/// Rows for `d_min..=d_max`, computed in parallel and returned in order of `d`.
pub fn mus_table(d_min: usize, d_max: usize) -> Result<Vec<MusRecord>> {
    if d_min < 2 {
        return Err(Error::DimensionTooSmall(d_min));
    }
    (d_min..=d_max).into_par_iter().map(mus_record).collect()
}
