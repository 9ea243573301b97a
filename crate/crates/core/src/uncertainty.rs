//! Scalar functionals of a state and one or two operators.
//!
//! For a unitary `U` the uncertainty is `ΔU² = 1 − |⟨U⟩|²`. It doubles as the
//! loss of interference visibility (`𝒱² + ΔU² = 1`) and as a quarter of the
//! squared Fubini–Study distance between `|ψ⟩` and `U|ψ⟩`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{check_dim, inner, norm, ComplexMatrix, PureState, State};

/// Round-off slack tolerated before a variance is clamped into range.
pub const VARIANCE_SLACK: f64 = 1e-12;

/// `|Δ³|` at or below which `Arg Δ³` is treated as undefined.
pub const PHASE_UNDEFINED_TOL: f64 = 1e-14;

/// Norm of the orthogonal component below which a state counts as an
/// eigenvector in [`vaidman_perp`].
pub const DEGENERATE_TOL: f64 = 1e-12;

fn clamp_variance(x: f64, upper: Option<f64>) -> f64 {
    if (-VARIANCE_SLACK..0.0).contains(&x) {
        return 0.0;
    }
    match upper {
        Some(hi) if x > hi && x <= hi + VARIANCE_SLACK => hi,
        _ => x,
    }
}

/// `ΔU² = 1 − |⟨U⟩|²` for a unitary `U`.
pub fn variance<S: State>(state: &S, u: &ComplexMatrix) -> Result<f64> {
    let mean = state.expect(u)?;
    Ok(clamp_variance(1.0 - mean.norm_sqr(), Some(1.0)))
}

/// Fringe visibility `|⟨U⟩|`.
pub fn visibility<S: State>(state: &S, u: &ComplexMatrix) -> Result<f64> {
    Ok(state.expect(u)?.norm())
}

/// Squared Fubini–Study distance `4(1 − |⟨ψ₁|ψ₂⟩|²)`.
pub fn fubini_study(a: &PureState, b: &PureState) -> Result<f64> {
    let overlap = a.inner(b)?;
    Ok((4.0 * (1.0 - overlap.norm_sqr())).clamp(0.0, 4.0))
}

/// `Cov(U, V) = ⟨U†V⟩ − ⟨U†⟩⟨V⟩`.
pub fn covariance<S: State>(state: &S, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Complex64> {
    check_dim(u.dim(), v.dim())?;
    let ud = u.adjoint();
    Ok(state.expect(&(&ud * v))? - state.expect(&ud)? * state.expect(v)?)
}

/// Three-point Bargmann invariant `Δ³ = ⟨ψ|ψ_U⟩⟨ψ_U|ψ_V⟩⟨ψ_V|ψ⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BargmannTriple {
    pub value: Complex64,
    pub modulus: f64,
    /// `Φ₃ = Arg Δ³`, `None` when `|Δ³| ≤ 1e-14`.
    pub phase: Option<f64>,
}

impl BargmannTriple {
    pub fn from_value(value: Complex64) -> Self {
        let modulus = value.norm();
        let phase = (modulus > PHASE_UNDEFINED_TOL).then(|| value.arg());
        Self { value, modulus, phase }
    }

    pub fn is_phase_defined(&self) -> bool {
        self.phase.is_some()
    }

    pub fn cos_phase(&self) -> Option<f64> {
        self.phase.map(f64::cos)
    }

    /// `cos Φ₃ · |Δ³|`, taken as zero when the phase is undefined.
    pub fn cos_weighted(&self) -> f64 {
        self.cos_phase().map_or(0.0, |c| c * self.modulus)
    }
}

pub fn bargmann3(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<BargmannTriple> {
    check_dim(psi.dim(), u.dim())?;
    check_dim(psi.dim(), v.dim())?;
    let p = psi.amplitudes();
    let pu = u.apply(p);
    let pv = v.apply(p);
    let value = inner(p, &pu) * inner(&pu, &pv) * inner(&pv, p);
    Ok(BargmannTriple::from_value(value))
}

/// Generalized variance `ΔA² = ⟨AA†⟩ − |⟨A⟩|²` for an arbitrary operator.
pub fn gvariance<S: State>(state: &S, a: &ComplexMatrix) -> Result<f64> {
    let aad = state.expect(&(a * &a.adjoint()))?.re;
    let mean = state.expect(a)?;
    Ok(clamp_variance(aad - mean.norm_sqr(), None))
}

/// `A|ψ⟩ = ⟨A⟩|ψ⟩ + dev · |ψ⊥_A⟩` with `⟨ψ|ψ⊥_A⟩ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct VaidmanDecomposition {
    pub mean: Complex64,
    pub dev: f64,
    pub perp: PureState,
}

/// `(I − |ψ⟩⟨ψ|) A|ψ⟩`.
pub fn orthogonal_component(psi: &PureState, a: &ComplexMatrix) -> Result<(Complex64, Vec<Complex64>)> {
    check_dim(psi.dim(), a.dim())?;
    let p = psi.amplitudes();
    let w = a.apply(p);
    let mean = inner(p, &w);
    let r = w.iter().zip(p).map(|(x, q)| x - mean * q).collect();
    Ok((mean, r))
}

pub fn vaidman_perp(psi: &PureState, a: &ComplexMatrix) -> Result<VaidmanDecomposition> {
    let (mean, r) = orthogonal_component(psi, a)?;
    let dev = norm(&r);
    if dev <= DEGENERATE_TOL {
        return Err(Error::DegenerateDecomposition);
    }
    let perp = PureState::normalized(r)?;
    Ok(VaidmanDecomposition { mean, dev, perp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_hermitian;
    use crate::linalg::DensityMatrix;
    use crate::operators::{clock, harper, shift, sigma_x, sigma_z, WeylPair};
    use crate::random::{haar_random_state, random_density, random_unitary};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Ground state of σz − σx, the d = 2 Harper Hamiltonian.
    fn harper2_ground() -> PureState {
        let pair = WeylPair::clock_shift(2).unwrap();
        eig_hermitian(&harper(&pair)).unwrap().ground_state()
    }

    #[test]
    fn variance_on_basis_states() {
        let psi = PureState::basis(3, 1).unwrap();
        assert_eq!(variance(&psi, &clock(3).unwrap()).unwrap(), 0.0);
        assert_eq!(variance(&psi, &shift(3).unwrap()).unwrap(), 1.0);
        assert_eq!(visibility(&psi, &shift(3).unwrap()).unwrap(), 0.0);
        assert_eq!(visibility(&psi, &clock(3).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let psi = PureState::basis(3, 0).unwrap();
        assert_eq!(variance(&psi, &clock(4).unwrap()), Err(Error::DimensionMismatch { expected: 3, found: 4 }));
    }

    #[test]
    fn visibility_complements_variance() {
        let psi = harper2_ground();
        let u = clock(2).unwrap();
        let vis = visibility(&psi, &u).unwrap();
        assert!((vis - 0.5f64.sqrt()).abs() < 1e-12);
        for seed in 0..20 {
            let psi = haar_random_state(5, seed).unwrap();
            let w = random_unitary(5, seed + 100).unwrap();
            let vis = visibility(&psi, &w).unwrap();
            assert!((vis * vis + variance(&psi, &w).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn fubini_study_identities() {
        let psi = haar_random_state(6, 1).unwrap();
        assert!(fubini_study(&psi, &psi).unwrap().abs() < 1e-14);
        let a = PureState::basis(6, 0).unwrap();
        let b = PureState::basis(6, 3).unwrap();
        assert_eq!(fubini_study(&a, &b).unwrap(), 4.0);
        let u = random_unitary(6, 7).unwrap();
        let moved = psi.evolve(&u).unwrap();
        let s2 = fubini_study(&psi, &moved).unwrap();
        assert!((s2 / 4.0 - variance(&psi, &u).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn covariance_cases() {
        let psi = haar_random_state(4, 3).unwrap();
        let u = random_unitary(4, 4).unwrap();
        let cov = covariance(&psi, &u, &u).unwrap();
        assert!(cov.im.abs() < 1e-14);
        assert!((cov.re - variance(&psi, &u).unwrap()).abs() < 1e-14);

        let joint = PureState::basis(2, 0).unwrap();
        assert!(covariance(&joint, &sigma_z(), &sigma_z()).unwrap().norm() < 1e-15);

        // Bloch vector (1,0,1)/√2 (up to the sign from clock(2) = −σz)
        let g = harper2_ground();
        let pair = WeylPair::clock_shift(2).unwrap();
        let cov = covariance(&g, pair.u(), pair.v()).unwrap();
        assert!((cov - c(-0.5, 0.0)).norm() < 1e-12, "{cov}");
    }

    #[test]
    fn bargmann_cases() {
        let psi = haar_random_state(3, 5).unwrap();
        let id = ComplexMatrix::identity(3);
        let b = bargmann3(&psi, &id, &id).unwrap();
        assert!((b.value - c(1.0, 0.0)).norm() < 1e-14);
        assert!(b.phase.unwrap().abs() < 1e-14);

        let e = PureState::basis(3, 0).unwrap();
        let b = bargmann3(&e, &clock(3).unwrap(), &shift(3).unwrap()).unwrap();
        assert_eq!(b.modulus, 0.0);
        assert!(!b.is_phase_defined());
        assert_eq!(b.cos_weighted(), 0.0);

        let u = random_unitary(3, 1).unwrap();
        let v = random_unitary(3, 2).unwrap();
        let b1 = bargmann3(&psi, &u, &v).unwrap();
        let b2 = bargmann3(&psi.with_phase(1.234), &u, &v).unwrap();
        assert!((b1.value - b2.value).norm() < 1e-14);
    }

    #[test]
    fn bargmann_modulus_identity() {
        for seed in 0..10 {
            let psi = haar_random_state(4, seed).unwrap();
            let u = random_unitary(4, 2 * seed + 1).unwrap();
            let v = random_unitary(4, 2 * seed + 2).unwrap();
            let b = bargmann3(&psi, &u, &v).unwrap();
            let du = variance(&psi, &u).unwrap();
            let dv = variance(&psi, &v).unwrap();
            let overlap = psi.expect(&(&u.adjoint() * &v)).unwrap().norm();
            let rhs = ((1.0 - du) * (1.0 - dv)).sqrt() * overlap;
            assert!((b.modulus - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn gvariance_cases() {
        let psi = haar_random_state(4, 8).unwrap();
        let u = random_unitary(4, 9).unwrap();
        assert!((gvariance(&psi, &u).unwrap() - variance(&psi, &u).unwrap()).abs() < 1e-12);

        let g = harper2_ground();
        let pair = WeylPair::clock_shift(2).unwrap();
        let sum = pair.u() + pair.v();
        let diff = pair.u() - pair.v();
        assert!(gvariance(&g, &sum).unwrap().abs() < 1e-12);
        assert!((gvariance(&g, &diff).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn vaidman_cases() {
        let psi = haar_random_state(3, 1).unwrap();
        assert_eq!(vaidman_perp(&psi, &ComplexMatrix::identity(3)), Err(Error::DegenerateDecomposition));

        let zero = PureState::basis(2, 0).unwrap();
        let dec = vaidman_perp(&zero, &sigma_x()).unwrap();
        assert!(dec.mean.norm() < 1e-15);
        assert!((dec.dev - 1.0).abs() < 1e-15);
        assert!((dec.perp.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-15);

        let psi = haar_random_state(7, 2).unwrap();
        let a = &random_unitary(7, 3).unwrap() + &random_unitary(7, 4).unwrap();
        let dec = vaidman_perp(&psi, &a).unwrap();
        let ap = a.apply(psi.amplitudes());
        let residual: Vec<Complex64> = ap
            .iter()
            .zip(psi.amplitudes())
            .zip(dec.perp.amplitudes())
            .map(|((x, p), q)| x - dec.mean * p - q * dec.dev)
            .collect();
        assert!(norm(&residual) <= 1e-12);
        assert!(psi.inner(&dec.perp).unwrap().norm() < 1e-12);
    }

    #[test]
    fn variance_is_concave_over_mixtures() {
        for seed in 0..50 {
            let d = 2 + (seed as usize % 5);
            let u = random_unitary(d, seed + 500).unwrap();
            let states: Vec<PureState> = (0..3).map(|k| haar_random_state(d, 10 * seed + k).unwrap()).collect();
            let weights = [0.2, 0.5, 0.3];
            let rho = DensityMatrix::mixture(&weights, &states).unwrap();
            let lhs = variance(&rho, &u).unwrap();
            let rhs: f64 = weights.iter().zip(&states).map(|(p, s)| p * variance(s, &u).unwrap()).sum();
            assert!(lhs >= rhs - 1e-12);
        }
    }

    #[test]
    fn variance_bounds_on_mixed_states() {
        for seed in 0..30 {
            let rho = random_density(4, 1 + seed as usize % 4, seed).unwrap();
            let u = random_unitary(4, seed).unwrap();
            let v = variance(&rho, &u).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!((gvariance(&rho, &u).unwrap() - gvariance(&rho, &u.adjoint()).unwrap()).abs() < 1e-12);
        }
    }
}
