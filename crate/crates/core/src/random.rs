//! Seeded sampling of pure states, density matrices and unitaries.
//!
//! All samplers draw from a ChaCha8 stream seeded with a 64-bit integer, so a
//! `(dimension, seed)` pair always produces the same output.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{inner, norm, project_out, ComplexMatrix, DensityMatrix, PureState, State};

/// Residual norm below which [`random_perp`] discards a draw and resamples.
const PERP_RESAMPLE_TOL: f64 = 1e-6;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Unitarily invariant random ket drawn from `rng`.
pub fn haar_state_from<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    if d == 0 {
        return Err(Error::BadDimension(0));
    }
    loop {
        let amps: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        match PureState::normalized(amps) {
            Ok(psi) => return Ok(psi),
            Err(Error::ZeroVector) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Haar-random pure state: normalized vector of i.i.d. complex Gaussians.
pub fn haar_random_state(d: usize, seed: u64) -> Result<PureState> {
    haar_state_from(d, &mut rng_from_seed(seed))
}

/// Random unit vector orthogonal to `psi`, drawn from `rng`.
pub fn random_perp_from<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> Result<PureState> {
    let d = psi.dim();
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let p = psi.amplitudes();
    loop {
        let sample = haar_state_from(d, rng)?;
        let mut r = project_out(sample.amplitudes(), p);
        if norm(&r) < PERP_RESAMPLE_TOL {
            continue;
        }
        // second pass removes the rounding left by the first projection
        r = project_out(&r, p);
        let phi = PureState::normalized(r)?;
        debug_assert!(inner(p, phi.amplitudes()).norm() <= 1e-12);
        return Ok(phi);
    }
}

/// Haar sample with `psi` projected out, renormalized.
pub fn random_perp(psi: &PureState, seed: u64) -> Result<PureState> {
    random_perp_from(psi, &mut rng_from_seed(seed))
}

/// Rank-`r` density matrix `Σ p_i |ψ_i⟩⟨ψ_i|` with Haar `ψ_i` and weights
/// uniform on the probability simplex.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    let mut rng = rng_from_seed(seed);
    let raw: Vec<f64> = (0..rank).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let states = (0..rank).map(|_| haar_state_from(d, &mut rng)).collect::<Result<Vec<_>>>()?;
    DensityMatrix::mixture(&weights, &states)
}

/// Haar-random unitary from Gram–Schmidt on a complex Ginibre matrix.
pub fn random_unitary(d: usize, seed: u64) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::BadDimension(0));
    }
    let mut rng = rng_from_seed(seed);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(&mut rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                v = project_out(&v, q);
            }
        }
        let n = norm(&v);
        if n < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    Ok(ComplexMatrix::from_fn(d, |i, j| cols[j][i]))
}
