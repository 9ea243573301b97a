//! Operator families: clock and shift, the discrete Fourier transform, Pauli
//! unitaries, Clifford-algebra generators, phase-space translations and the
//! Harper Hamiltonian.
//!
//! # Index convention
//!
//! Basis labels run over the symmetric range `j = −⌊d/2⌋ … ⌊(d−1)/2⌋`, mapped
//! in increasing order onto storage slots `0 … d−1`. The clock is
//! `U|j⟩ = ω^j |j⟩` with `ω = e^{2πi/d}`, the shift is `V|j⟩ = |j+1⟩`
//! (cyclic), and together they satisfy `UV = ω VU`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{check_dim, ComplexMatrix};

/// Symmetric label `j` of storage slot `slot`.
pub fn symmetric_index(slot: usize, d: usize) -> i64 {
    slot as i64 - (d / 2) as i64
}

/// All symmetric labels, in storage order.
pub fn symmetric_indices(d: usize) -> Vec<i64> {
    (0..d).map(|s| symmetric_index(s, d)).collect()
}

fn check_weyl_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::BadDimension(d))
    } else {
        Ok(())
    }
}

/// Diagonal clock matrix `Σ_j e^{2πij/d} |j⟩⟨j|`.
pub fn clock(d: usize) -> Result<ComplexMatrix> {
    check_weyl_dim(d)?;
    let diag: Vec<Complex64> =
        symmetric_indices(d).into_iter().map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64)).collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// Cyclic shift `Σ_j |j+1⟩⟨j|`.
pub fn shift(d: usize) -> Result<ComplexMatrix> {
    check_weyl_dim(d)?;
    Ok(ComplexMatrix::from_fn(
        d,
        |i, k| {
            if i == (k + 1) % d {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
    ))
}

/// Discrete Fourier transform with entries `e^{−2πijk/d}/√d` on the symmetric
/// labels.
///
/// The sign of the exponent is chosen so that `F · clock · F† = shift`
/// exactly; with the opposite sign the conjugate gives `shift†`.
pub fn dft(d: usize) -> Result<ComplexMatrix> {
    check_weyl_dim(d)?;
    let scale = 1.0 / (d as f64).sqrt();
    Ok(ComplexMatrix::from_fn(d, |a, b| {
        let j = symmetric_index(a, d);
        let k = symmetric_index(b, d);
        // reduce jk mod d before taking the phase to keep the argument small
        let jk = (j * k).rem_euclid(d as i64);
        Complex64::from_polar(scale, -2.0 * PI * jk as f64 / d as f64)
    }))
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| Complex64::new(if i != j { 1.0 } else { 0.0 }, 0.0))
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => Complex64::new(0.0, -1.0),
        (1, 0) => Complex64::new(0.0, 1.0),
        _ => Complex64::new(0.0, 0.0),
    })
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)])
}

/// `(σx, σy, σz)`.
pub fn pauli_matrices() -> [ComplexMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Real linear combination `Σ_i c_i G_i`.
pub fn linear_combination(coeffs: &[f64], gens: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    check_dim(gens.len(), coeffs.len())?;
    let first = gens.first().ok_or(Error::BadDimension(0))?;
    let mut out = ComplexMatrix::zeros(first.dim());
    for (c, g) in coeffs.iter().zip(gens) {
        out = &out + &(g * *c);
    }
    Ok(out)
}

fn check_unit(a: &[f64]) -> Result<()> {
    let n = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-12 {
        Err(Error::NotUnitVector(n))
    } else {
        Ok(())
    }
}

/// `a·σ` for a real unit vector `a`; Hermitian and unitary at once.
pub fn pauli_unitary(a: [f64; 3]) -> Result<ComplexMatrix> {
    check_unit(&a)?;
    linear_combination(&a, &pauli_matrices())
}

/// `2n` pairwise anticommuting Hermitian unitaries of size `2ⁿ` from the
/// Jordan–Wigner ladder
/// `Γ_{2k−1} = σz^{⊗(k−1)} ⊗ σx ⊗ I^{⊗(n−k)}`,
/// `Γ_{2k}   = σz^{⊗(k−1)} ⊗ σy ⊗ I^{⊗(n−k)}`.
pub fn gamma_generators(n: usize) -> Result<Vec<ComplexMatrix>> {
    if !(1..=5).contains(&n) {
        return Err(Error::BadRank { rank: n, dim: 1usize << n.min(16) });
    }
    let id = ComplexMatrix::identity(2);
    let z = sigma_z();
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        for middle in [sigma_x(), sigma_y()] {
            let mut m: Option<ComplexMatrix> = None;
            for site in 0..n {
                let factor = match site.cmp(&k) {
                    std::cmp::Ordering::Less => &z,
                    std::cmp::Ordering::Equal => &middle,
                    std::cmp::Ordering::Greater => &id,
                };
                m = Some(match m {
                    None => factor.clone(),
                    Some(acc) => acc.kron(factor),
                });
            }
            out.push(m.expect("n >= 1"));
        }
    }
    Ok(out)
}

/// Commutation phase `Φ_w ∈ (−π, π]` with `UV = e^{iΦ_w} VU`.
///
/// The phase is read off the ratio of the largest-modulus entries and then
/// verified over the whole matrix to `1e-8 · d`.
pub fn commutation_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    check_dim(u.dim(), v.dim())?;
    let uv = u * v;
    let vu = v * u;
    let (idx, _) =
        vu.as_slice()
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let ratio = uv.as_slice()[idx] / vu.as_slice()[idx];
    let mut phase = ratio.arg();
    if phase <= -PI {
        phase = PI;
    }
    let residual = (&uv - &(&vu * Complex64::from_polar(1.0, phase))).frobenius_norm();
    if residual > 1e-8 * u.dim() as f64 {
        return Err(Error::NotWeylPair { residual });
    }
    // snap −π rounding onto the closed end of the interval
    if (phase + PI).abs() < 1e-12 {
        phase = PI;
    }
    Ok(phase)
}

/// Unitary pair with `UV = e^{iΦ_w} VU`, `Φ_w ∈ (0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylPair {
    u: ComplexMatrix,
    v: ComplexMatrix,
    phase: f64,
}

impl WeylPair {
    pub fn new(u: ComplexMatrix, v: ComplexMatrix) -> Result<Self> {
        check_dim(u.dim(), v.dim())?;
        check_unitary(&u, 1e-10)?;
        check_unitary(&v, 1e-10)?;
        let mut phase = commutation_phase(&u, &v)?;
        if phase.abs() < 1e-12 {
            return Err(Error::NotWeylPair { residual: 0.0 });
        }
        if phase < 0.0 {
            phase += 2.0 * PI;
        }
        Ok(Self { u, v, phase })
    }

    /// Clock and shift in dimension `d`, with `Φ_w = 2π/d`.
    pub fn clock_shift(d: usize) -> Result<Self> {
        Ok(Self { u: clock(d)?, v: shift(d)?, phase: 2.0 * PI / d as f64 })
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// `A = tan(Φ_w / 2)`; infinite at `Φ_w = π`.
    pub fn tan_half_phase(&self) -> f64 {
        if (self.phase - PI).abs() < 1e-12 {
            f64::INFINITY
        } else {
            (self.phase / 2.0).tan()
        }
    }
}

pub(crate) fn check_unitary(w: &ComplexMatrix, tol: f64) -> Result<()> {
    if w.is_unitary(tol) {
        return Ok(());
    }
    let deviation = (&(&w.adjoint() * w) - &ComplexMatrix::identity(w.dim())).frobenius_norm();
    Err(Error::NotUnitary { deviation })
}

/// `W^k` for unitary `W` and any integer `k` (negative powers use `W†`).
pub fn unitary_power(w: &ComplexMatrix, k: i64) -> ComplexMatrix {
    if k >= 0 {
        w.pow(k as u64)
    } else {
        w.adjoint().pow(k.unsigned_abs())
    }
}

/// Phase-space translation `U^m V^{−n}`.
pub fn translation(pair: &WeylPair, m: i64, n: i64) -> ComplexMatrix {
    &unitary_power(pair.u(), m) * &unitary_power(pair.v(), -n)
}

/// Hermitian part `(W + W†)/2`.
pub fn cosine_part(w: &ComplexMatrix) -> ComplexMatrix {
    &(w + &w.adjoint()) * 0.5
}

/// Harper Hamiltonian `H = −(U + U†)/2 − (V + V†)/2`.
pub fn harper(pair: &WeylPair) -> ComplexMatrix {
    -&(&cosine_part(pair.u()) + &cosine_part(pair.v()))
}

/// `H̃ = −cos θ C_Ũ − sin θ C_Ṽ` with `Ũ = e^{−iφ_U} U`, `Ṽ = e^{−iφ_V} V`.
pub fn tilted_harper(pair: &WeylPair, theta: f64, phi_u: f64, phi_v: f64) -> ComplexMatrix {
    let ut = pair.u() * Complex64::from_polar(1.0, -phi_u);
    let vt = pair.v() * Complex64::from_polar(1.0, -phi_v);
    -&(&(&cosine_part(&ut) * theta.cos()) + &(&cosine_part(&vt) * theta.sin()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() <= tol
    }

    #[test]
    fn clock_d2_is_minus_one_one() {
        let u = clock(2).unwrap();
        assert!(close(&u, &ComplexMatrix::from_diagonal(&[c(-1.0, 0.0), c(1.0, 0.0)]), 1e-15));
    }

    #[test]
    fn clock_d3_roots_of_unity() {
        let diag = clock(3).unwrap().diagonal();
        let expected = [-1i32, 0, 1].map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / 3.0));
        for (z, e) in diag.iter().zip(expected) {
            assert!((z - e).norm() < 1e-15);
        }
    }

    #[test]
    fn clock_and_shift_have_order_d() {
        assert!(close(&clock(5).unwrap().pow(5), &ComplexMatrix::identity(5), 1e-12));
        assert_eq!(shift(4).unwrap().pow(4), ComplexMatrix::identity(4));
        assert_eq!(shift(2).unwrap(), sigma_x());
        assert_eq!(clock(1), Err(Error::BadDimension(1)));
        assert_eq!(shift(0), Err(Error::BadDimension(0)));
    }

    #[test]
    fn weyl_relations_hold() {
        for d in 2..=16 {
            let u = clock(d).unwrap();
            let v = shift(d).unwrap();
            let w = Complex64::from_polar(1.0, 2.0 * PI / d as f64);
            assert!(close(&(&u * &v), &(&(&v * &u) * w), 1e-12), "d={d}");
            assert!(close(&(&u.adjoint() * &v), &(&(&v * &u.adjoint()) * w.conj()), 1e-12), "d={d}");
        }
    }

    #[test]
    fn dft_conjugates_clock_into_shift() {
        for d in 2..=12 {
            let f = dft(d).unwrap();
            assert!(f.is_unitary(1e-13));
            let conj = &(&f * &clock(d).unwrap()) * &f.adjoint();
            assert!(close(&conj, &shift(d).unwrap(), 1e-12), "d={d}");
        }
    }

    #[test]
    fn dft_small_cases() {
        let f2 = dft(2).unwrap();
        assert!(f2.as_slice().iter().all(|z| (z.norm() - 0.5f64.sqrt()).abs() < 1e-15));
        let f5 = dft(5).unwrap();
        assert!(close(&(&f5.adjoint() * &f5), &ComplexMatrix::identity(5), 1e-12));
    }

    #[test]
    fn dft_columns_unbiased() {
        let f = dft(8).unwrap();
        for z in f.as_slice() {
            assert!((z.norm_sqr() - 1.0 / 8.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_unitary_algebra() {
        assert_eq!(pauli_unitary([0.0, 0.0, 1.0]).unwrap(), sigma_z());
        let n = (1.0f64 + 4.0 + 9.0).sqrt();
        let m = pauli_unitary([1.0 / n, 2.0 / n, 3.0 / n]).unwrap();
        assert!(close(&(&m * &m), &ComplexMatrix::identity(2), 1e-14));
        assert!(m.is_hermitian(1e-15) && m.trace().norm() < 1e-15);
        let ac = pauli_unitary([1.0, 0.0, 0.0]).unwrap().anticommutator(&sigma_z());
        assert!(ac.frobenius_norm() < 1e-15);
        assert!(matches!(pauli_unitary([1.0, 1.0, 0.0]), Err(Error::NotUnitVector(_))));
    }

    #[test]
    fn gamma_base_case_is_x_y() {
        let g = gamma_generators(1).unwrap();
        assert_eq!(g, vec![sigma_x(), sigma_y()]);
        assert!(gamma_generators(0).is_err());
        assert!(gamma_generators(6).is_err());
    }

    #[test]
    fn gamma_anticommutation_table() {
        for n in 1..=3 {
            let g = gamma_generators(n).unwrap();
            let d = 1usize << n;
            assert_eq!(g.len(), 2 * n);
            for (i, gi) in g.iter().enumerate() {
                assert!(gi.is_hermitian(1e-15) && gi.is_unitary(1e-15));
                for (j, gj) in g.iter().enumerate() {
                    let expected = if i == j { &ComplexMatrix::identity(d) * 2.0 } else { ComplexMatrix::zeros(d) };
                    assert!(close(&gi.anticommutator(gj), &expected, 1e-12), "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn translations() {
        let pair = WeylPair::clock_shift(3).unwrap();
        assert_eq!(translation(&pair, 0, 0), ComplexMatrix::identity(3));
        assert!(close(&translation(&pair, 1, 0), &clock(3).unwrap(), 1e-15));
        let t = translation(&pair, 1, 1);
        assert!(t.is_unitary(1e-13));
        let (u, v) = (pair.u(), pair.v());
        let conj = &(v * u) * &v.adjoint();
        let w = Complex64::from_polar(1.0, -2.0 * PI / 3.0);
        assert!(close(&conj, &(u * w), 1e-14));
    }

    #[test]
    fn harper_is_hermitian() {
        let pair = WeylPair::clock_shift(12).unwrap();
        assert!(harper(&pair).hermitian_deviation() < 1e-14);
        let h2 = harper(&WeylPair::clock_shift(2).unwrap());
        // clock(2) = −σz, so H = σz − σx
        assert!(close(&h2, &(&sigma_z() - &sigma_x()), 1e-15));
    }

    #[test]
    fn tilted_harper_special_cases() {
        let pair = WeylPair::clock_shift(5).unwrap();
        let tilted = tilted_harper(&pair, PI / 4.0, 0.0, 0.0);
        assert!(close(&(&tilted * 2f64.sqrt()), &harper(&pair), 1e-12));
        let only_u = tilted_harper(&pair, 0.0, 0.3, 1.1);
        let ut = pair.u() * Complex64::from_polar(1.0, -0.3);
        assert!(close(&only_u, &-&cosine_part(&ut), 1e-15));
        let p3 = WeylPair::clock_shift(3).unwrap();
        assert!(tilted_harper(&p3, PI / 3.0, 0.2, 0.0).hermitian_deviation() < 1e-14);
    }

    #[test]
    fn commutation_phases() {
        let p5 = WeylPair::clock_shift(5).unwrap();
        let phi = commutation_phase(p5.u(), p5.v()).unwrap();
        assert!((phi - 2.0 * PI / 5.0).abs() < 1e-12);
        assert_eq!(commutation_phase(p5.u(), p5.u()).unwrap(), 0.0);
        let phi = commutation_phase(&sigma_x(), &sigma_z()).unwrap();
        assert!((phi - PI).abs() < 1e-15);
        let p3 = WeylPair::clock_shift(3).unwrap();
        assert!((commutation_phase(p3.u(), p3.v()).unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
        let h = &sigma_x() + &sigma_z();
        let not_unitary = &h * (1.0 / 2f64.sqrt());
        assert!(matches!(commutation_phase(&sigma_x(), &not_unitary), Err(Error::NotWeylPair { .. })));
    }

    #[test]
    fn weyl_pair_from_matrices() {
        let pair = WeylPair::new(clock(4).unwrap(), shift(4).unwrap()).unwrap();
        assert!((pair.phase() - PI / 2.0).abs() < 1e-12);
        let swapped = WeylPair::new(shift(4).unwrap(), clock(4).unwrap()).unwrap();
        assert!((swapped.phase() - 3.0 * PI / 2.0).abs() < 1e-12);
        assert!(WeylPair::new(clock(4).unwrap(), clock(4).unwrap()).is_err());
        assert!(WeylPair::clock_shift(2).unwrap().tan_half_phase().is_infinite());
    }
}
