//! Lower bounds on `ΔU² + ΔV²` for a pair of unitaries.
//!
//! Every bound here is a full-sum bound. The minimum-uncertainty tables in
//! [`crate::mus`] report half-values.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{check_dim, inner, norm, ComplexMatrix, DensityMatrix, PureState, State};
use crate::operators::{commutation_phase, gamma_generators, linear_combination, pauli_matrices};
use crate::random::{random_perp_from, rng_from_seed};
use crate::uncertainty::{bargmann3, covariance, orthogonal_component, variance};

/// Slack below which a bound counts as exceeding the uncertainty sum.
pub const SLACK_TOL: f64 = 1e-10;

/// Denominators at or below this magnitude are rejected.
pub const DENOMINATOR_TOL: f64 = 1e-12;

/// `|⟨ψ|ψ⊥⟩|` tolerated by [`ur2`].
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

const UNIT_TOL: f64 = 1e-10;
const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Cross term `⟨U†V⟩⟨U⟩⟨V†⟩ + c.c.` of the first relation, from plain
/// expectation values. Valid for density matrices.
fn ur1_parts<S: State>(state: &S, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<(f64, f64)> {
    check_dim(u.dim(), v.dim())?;
    let ud = u.adjoint();
    let vd = v.adjoint();
    let udv = state.expect(&(&ud * v))?;
    let vdu = state.expect(&(&vd * u))?;
    let eu = state.expect(u)?;
    let ev = state.expect(v)?;
    let eud = state.expect(&ud)?;
    let evd = state.expect(&vd)?;
    let cross = udv * eu * evd + vdu * ev * eud;
    debug_assert!(cross.im.abs() <= IMAG_RESIDUE_TOL, "imaginary residue {}", cross.im);
    Ok((udv.norm_sqr(), cross.re))
}

/// `1 + |⟨U†V⟩|² − ⟨U†V⟩⟨U⟩⟨V†⟩ − ⟨V†U⟩⟨V⟩⟨U†⟩`, valid for pure and mixed
/// states.
pub fn ur1<S: State>(state: &S, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let (w2, cross) = ur1_parts(state, u, v)?;
    Ok(1.0 + w2 - cross)
}

/// Pure-state form `1 + |⟨ψ_U|ψ_V⟩|² − 2 cos Φ₃ |Δ³|`. An undefined `Φ₃`
/// contributes no cross term.
pub fn ur1_bargmann(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let b = bargmann3(psi, u, v)?;
    let w = psi.expect(&(&u.adjoint() * v))?;
    Ok(1.0 + w.norm_sqr() - 2.0 * b.cos_weighted())
}

/// `(x, x|cos Φ₃|)` with `x = |⟨ψ_U|ψ_V⟩|`.
fn overlap_and_weight(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<(f64, f64)> {
    let b = bargmann3(psi, u, v)?;
    let x = psi.expect(&(&u.adjoint() * v))?.norm();
    let c = b.cos_phase().map_or(0.0, f64::abs);
    Ok((x, x * c))
}

/// `1 + (x² − x|cos Φ₃|)/(1 − x|cos Φ₃|)` with `x = |⟨ψ_U|ψ_V⟩|`.
pub fn ur1_weak_cos(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let (x, xc) = overlap_and_weight(psi, u, v)?;
    let denom = 1.0 - xc;
    if denom <= DENOMINATOR_TOL {
        return Err(Error::DegenerateDenominator(denom));
    }
    Ok(1.0 + (x * x - xc) / denom)
}

/// `1 − |⟨U†V⟩|`.
pub fn ur1_weak_mod<S: State>(state: &S, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    check_dim(u.dim(), v.dim())?;
    Ok(1.0 - state.expect(&(&u.adjoint() * v))?.norm())
}

/// `2 − Δ(U†V)² / (1 − √(1 − Δ(U†V)²)|cos Φ₃|)`.
///
/// Algebraically identical to [`ur1_weak_cos`].
pub fn ur1_phase_form(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let w = &u.adjoint() * v;
    let d2 = variance(psi, &w)?;
    let b = bargmann3(psi, u, v)?;
    let c = b.cos_phase().map_or(0.0, f64::abs);
    let denom = 1.0 - (1.0 - d2).sqrt() * c;
    if denom <= DENOMINATOR_TOL {
        return Err(Error::DegenerateDenominator(denom));
    }
    Ok(2.0 - d2 / denom)
}

/// Branch of the second relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// `|⟨ψ|U† + iV†|ψ⊥⟩|² − 2 Im Cov(U,V)`
    Plus,
    /// `|⟨ψ|U† − iV†|ψ⊥⟩|² + 2 Im Cov(U,V)`
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `(U ∓ iV)` for `Sign::Plus` / `Sign::Minus`; its adjoint is `U† ± iV†`.
fn ur2_operator(u: &ComplexMatrix, v: &ComplexMatrix, sign: Sign) -> ComplexMatrix {
    u - &(v * Complex64::new(0.0, sign.factor()))
}

pub fn ur2(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix, perp: &PureState, sign: Sign) -> Result<f64> {
    check_dim(psi.dim(), perp.dim())?;
    let overlap = psi.inner(perp)?.norm();
    if overlap > ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal(overlap));
    }
    let cov = covariance(psi, u, v)?;
    let op = ur2_operator(u, v, sign);
    let element = inner(perp.amplitudes(), &op.apply(psi.amplitudes()));
    Ok(element.norm_sqr() - sign.factor() * 2.0 * cov.im)
}

/// Best second-relation bound over `ψ⊥` and the sign.
#[derive(Clone, Debug, PartialEq)]
pub struct Ur2Best {
    pub value: f64,
    /// `None` when `(U ∓ iV)ψ` is parallel to `ψ`; every `ψ⊥` then gives the
    /// same value.
    pub perp: Option<PureState>,
    pub sign: Sign,
}

/// The matrix element is maximized by `ψ⊥ ∝ (I − |ψ⟩⟨ψ|)(U ∓ iV)|ψ⟩`, which
/// makes the Cauchy–Schwarz step tight.
pub fn ur2_best(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Ur2Best> {
    let cov = covariance(psi, u, v)?;
    let mut best: Option<Ur2Best> = None;
    for sign in Sign::BOTH {
        let (_, r) = orthogonal_component(psi, &ur2_operator(u, v, sign))?;
        let n = norm(&r);
        let base = -sign.factor() * 2.0 * cov.im;
        let candidate = if n > DENOMINATOR_TOL {
            Ur2Best { value: n * n + base, perp: Some(PureState::normalized(r)?), sign }
        } else {
            Ur2Best { value: base, perp: None, sign }
        };
        if best.as_ref().is_none_or(|b| candidate.value > b.value) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("two signs evaluated"))
}

/// Maximum of [`ur2`] over `k` random `ψ⊥` and both signs.
pub fn ur2_sampled(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix, k: usize, seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..k {
        let perp = random_perp_from(psi, &mut rng)?;
        for sign in Sign::BOTH {
            best = best.max(ur2(psi, u, v, &perp, sign)?);
        }
    }
    Ok(best)
}

/// `½ max_± ‖(I − |ψ⟩⟨ψ|)(U ± V)|ψ⟩‖²`.
pub fn ur3(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    check_dim(u.dim(), v.dim())?;
    let (_, plus) = orthogonal_component(psi, &(u + v))?;
    let (_, minus) = orthogonal_component(psi, &(u - v))?;
    Ok(0.5 * norm(&plus).powi(2).max(norm(&minus).powi(2)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn check_unit(a: &[f64]) -> Result<()> {
    let n = dot(a, a).sqrt();
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector(n));
    }
    Ok(())
}

/// `r_i = Tr(ρ σ_i)`.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    check_dim(2, rho.dim())?;
    let sigmas = pauli_matrices();
    let mut r = [0.0; 3];
    for (ri, s) in r.iter_mut().zip(&sigmas) {
        *ri = rho.expect(s)?.re;
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PauliBound {
    pub state_dep: f64,
    pub state_indep: f64,
}

/// Bounds on `Δ(a·σ)² + Δ(b·σ)²` for a qubit.
pub fn pauli_bound(rho: &DensityMatrix, a: [f64; 3], b: [f64; 3]) -> Result<PauliBound> {
    check_unit(&a)?;
    check_unit(&b)?;
    let sigmas = pauli_matrices();
    let u = linear_combination(&a, &sigmas)?;
    let v = linear_combination(&b, &sigmas)?;
    let du = variance(rho, &u)?;
    let dv = variance(rho, &v)?;
    let ab = dot(&a, &b).abs();
    let state_indep = 1.0 + ab * ab - 2.0 * ab * ((1.0 - du) * (1.0 - dv)).sqrt();
    let r = bloch_vector(rho)?;
    let triple = dot(&cross(a, b), &r);
    Ok(PauliBound { state_dep: state_indep + triple * triple, state_indep })
}

/// `1 + |a·b|² − 2|a·b| √((1 − ΔΓ_a²)(1 − ΔΓ_b²))` for `Γ_a = a·Γ`.
pub fn gamma_bound<S: State>(state: &S, a: &[f64], b: &[f64], gens: &[ComplexMatrix]) -> Result<f64> {
    check_unit(a)?;
    check_unit(b)?;
    let ga = linear_combination(a, gens)?;
    let gb = linear_combination(b, gens)?;
    let da = variance(state, &ga)?;
    let db = variance(state, &gb)?;
    let ab = dot(a, b).abs();
    Ok(1.0 + ab * ab - 2.0 * ab * ((1.0 - da) * (1.0 - db)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

/// State `ρ = (I + g·Γ)/d` built from the unit vector `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct SaturatingState {
    pub rho: DensityMatrix,
    pub g: Vec<f64>,
    /// `‖g‖` when the transverse coefficient is `ΔΓ_a / (1 − (a·b)²)`
    /// instead of `ΔΓ_a / √(1 − (a·b)²)`.
    pub printed_norm: f64,
}

/// `g = √(1 − ΔΓ_a²) a ± τ ΔΓ_a (b − (a·b)a)/√(1 − (a·b)²)` with
/// `τ = sgn(a·b)`, plus `‖g‖` under the printed coefficient.
pub fn saturating_direction(a: &[f64], b: &[f64], delta_a2: f64, branch: Branch) -> Result<(Vec<f64>, f64)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    check_unit(a)?;
    check_unit(b)?;
    if !(0.0..=1.0).contains(&delta_a2) {
        return Err(Error::DegenerateVariance(delta_a2));
    }
    let ab = dot(a, b);
    let transverse = 1.0 - ab * ab;
    if transverse <= DENOMINATOR_TOL {
        return Err(Error::ParallelDirections);
    }
    let tau = if ab < 0.0 { -1.0 } else { 1.0 };
    let s = match branch {
        Branch::Plus => tau,
        Branch::Minus => -tau,
    };
    let dev = delta_a2.sqrt();
    let along = (1.0 - delta_a2).sqrt();
    let perp: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - ab * x).collect();
    let combine = |coef: f64| -> Vec<f64> { a.iter().zip(&perp).map(|(x, p)| along * x + s * coef * p).collect() };
    let printed = combine(dev / transverse);
    Ok((combine(dev / transverse.sqrt()), dot(&printed, &printed).sqrt()))
}

fn bloch_state(g: Vec<f64>, printed_norm: f64, gens: &[ComplexMatrix]) -> Result<SaturatingState> {
    let d = gens[0].dim();
    let rho = &(&ComplexMatrix::identity(d) + &linear_combination(&g, gens)?) * (1.0 / d as f64);
    Ok(SaturatingState { rho: DensityMatrix::new(rho)?, g, printed_norm })
}

/// `ρ = (I + g·Γ)/2ⁿ` from [`saturating_direction`]. The `Plus` branch
/// saturates [`gamma_bound`].
pub fn gamma_saturating_state(a: &[f64], b: &[f64], delta_a2: f64, branch: Branch) -> Result<SaturatingState> {
    if a.is_empty() || !a.len().is_multiple_of(2) {
        return Err(Error::BadDimension(a.len()));
    }
    let (g, printed_norm) = saturating_direction(a, b, delta_a2, branch)?;
    bloch_state(g, printed_norm, &gamma_generators(a.len() / 2)?)
}

/// Qubit state `ρ = (I + g·σ)/2` saturating the state-independent Pauli bound.
pub fn pauli_saturating_state(a: [f64; 3], b: [f64; 3], delta_a2: f64, branch: Branch) -> Result<SaturatingState> {
    let (g, printed_norm) = saturating_direction(&a, &b, delta_a2, branch)?;
    bloch_state(g, printed_norm, &pauli_matrices())
}

/// `A = |tan(Φ_w/2)|`, `None` at `Φ_w = π`.
fn ms_coefficient(phase_w: f64) -> Option<f64> {
    let half = 0.5 * phase_w;
    if half.cos().abs() <= 1e-12 {
        None
    } else {
        Some(half.tan().abs())
    }
}

/// `(1 + 2A)ΔU²ΔV² + A²(ΔU² + ΔV²) − A²`; at `Φ_w = π` the relation is
/// divided by `A²` and the residual is `ΔU² + ΔV² − 1`.
pub fn ms_relation_check(delta_u2: f64, delta_v2: f64, phase_w: f64) -> f64 {
    match ms_coefficient(phase_w) {
        None => delta_u2 + delta_v2 - 1.0,
        Some(a) => (1.0 + 2.0 * a) * delta_u2 * delta_v2 + a * a * (delta_u2 + delta_v2) - a * a,
    }
}

/// Smallest `ΔU² + ΔV²` permitted by the Massar–Spindel relation.
///
/// At fixed sum the left side is largest at `ΔU² = ΔV² = x`, where the
/// relation reduces to `(1 + 2A)x² + 2A²x − A² ≥ 0` with root
/// `x* = A/(1 + 2A)`.
pub fn ms_sum_bound(phase_w: f64) -> f64 {
    match ms_coefficient(phase_w) {
        None => 1.0,
        Some(a) => 2.0 * a / (1.0 + 2.0 * a),
    }
}

/// How [`evaluate_all`] picks `ψ⊥` and the sign for the second relation.
#[derive(Clone, Debug, PartialEq)]
pub enum Ur2Strategy {
    Explicit { perp: PureState, sign: Sign },
    Sampled { k: usize, seed: u64 },
    Optimal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Ur2Tag {
    Explicit,
    Sampled { k: usize, seed: u64 },
    Optimal,
}

impl Ur2Strategy {
    pub fn tag(&self) -> Ur2Tag {
        match *self {
            Ur2Strategy::Explicit { .. } => Ur2Tag::Explicit,
            Ur2Strategy::Sampled { k, seed } => Ur2Tag::Sampled { k, seed },
            Ur2Strategy::Optimal => Ur2Tag::Optimal,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub ur2: Ur2Strategy,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { ur2: Ur2Strategy::Optimal }
    }
}

/// All bounds at one state. `None` marks a bound whose denominator vanished
/// or, for `ms_sum`, a pair without a single commutation phase.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub d: usize,
    pub delta_u2: f64,
    pub delta_v2: f64,
    pub sum: f64,
    pub ur1: f64,
    pub ur1_weak_cos: Option<f64>,
    pub ur1_weak_mod: f64,
    pub ur1_phase_form: Option<f64>,
    pub ur2: f64,
    pub ur2_strategy: Ur2Tag,
    pub ur3: f64,
    pub ms_sum: Option<f64>,
    pub cos_phi3: Option<f64>,
}

impl BoundReport {
    /// `(name, sum − bound)` for every populated bound.
    pub fn slacks(&self) -> Vec<(&'static str, f64)> {
        let mut out =
            vec![("ur1", self.ur1), ("ur1_weak_mod", self.ur1_weak_mod), ("ur2", self.ur2), ("ur3", self.ur3)];
        out.extend(self.ur1_weak_cos.map(|b| ("ur1_weak_cos", b)));
        out.extend(self.ur1_phase_form.map(|b| ("ur1_phase_form", b)));
        out.extend(self.ms_sum.map(|b| ("ms_sum", b)));
        out.into_iter().map(|(name, b)| (name, self.sum - b)).collect()
    }

    pub fn min_slack(&self) -> (&'static str, f64) {
        self.slacks().into_iter().min_by(|x, y| x.1.total_cmp(&y.1)).expect("report always carries bounds")
    }
}

fn guarded(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::DegenerateDenominator(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Evaluates every bound and fails with [`Error::BoundViolated`] if one
/// exceeds the sum by more than [`SLACK_TOL`].
pub fn evaluate_all(psi: &PureState, u: &ComplexMatrix, v: &ComplexMatrix, config: &EvalConfig) -> Result<BoundReport> {
    check_dim(psi.dim(), u.dim())?;
    check_dim(psi.dim(), v.dim())?;
    let delta_u2 = variance(psi, u)?;
    let delta_v2 = variance(psi, v)?;
    let ur2_value = match &config.ur2 {
        Ur2Strategy::Explicit { perp, sign } => ur2(psi, u, v, perp, *sign)?,
        Ur2Strategy::Sampled { k, seed } => ur2_sampled(psi, u, v, *k, *seed)?,
        Ur2Strategy::Optimal => ur2_best(psi, u, v)?.value,
    };
    let ms_sum = match commutation_phase(u, v) {
        Ok(phase) => Some(ms_sum_bound(phase)),
        Err(Error::NotWeylPair { .. }) => None,
        Err(e) => return Err(e),
    };
    let report = BoundReport {
        d: psi.dim(),
        delta_u2,
        delta_v2,
        sum: delta_u2 + delta_v2,
        ur1: ur1(psi, u, v)?,
        ur1_weak_cos: guarded(ur1_weak_cos(psi, u, v))?,
        ur1_weak_mod: ur1_weak_mod(psi, u, v)?,
        ur1_phase_form: guarded(ur1_phase_form(psi, u, v))?,
        ur2: ur2_value,
        ur2_strategy: config.ur2.tag(),
        ur3: ur3(psi, u, v)?,
        ms_sum,
        cos_phi3: bargmann3(psi, u, v)?.cos_phase(),
    };
    let (name, slack) = report.min_slack();
    if slack < -SLACK_TOL {
        return Err(Error::BoundViolated { name, slack });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_hermitian;
    use crate::operators::{harper, sigma_x, sigma_z, WeylPair};
    use crate::random::{haar_random_state, random_density, random_perp, random_unitary};
    use std::f64::consts::PI;

    fn harper_ground(d: usize) -> (WeylPair, PureState) {
        let pair = WeylPair::clock_shift(d).unwrap();
        let psi = eig_hermitian(&harper(&pair)).unwrap().ground_state();
        (pair, psi)
    }

    fn sweep_state(d: usize, theta: f64) -> PureState {
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        amps[0] = Complex64::new(theta.cos(), 0.0);
        amps[d - 1] = Complex64::new(-theta.sin(), 0.0);
        PureState::new(amps).unwrap()
    }

    fn unit(v: &[f64]) -> Vec<f64> {
        let n = dot(v, v).sqrt();
        v.iter().map(|x| x / n).collect()
    }

    #[test]
    fn joint_eigenstate_gives_zero() {
        let z = sigma_z();
        let psi = PureState::basis(2, 0).unwrap();
        assert!(ur1(&psi, &z, &z).unwrap().abs() < 1e-15);
        assert!(ur1_bargmann(&psi, &z, &z).unwrap().abs() < 1e-15);
        assert!(matches!(ur1_weak_cos(&psi, &z, &z), Err(Error::DegenerateDenominator(_))));
        assert!(matches!(ur1_phase_form(&psi, &z, &z), Err(Error::DegenerateDenominator(_))));
        assert_eq!(ur1_weak_mod(&psi, &z, &z).unwrap(), 0.0);
        assert_eq!(ur3(&psi, &z, &z).unwrap(), 0.0);
        let best = ur2_best(&psi, &z, &z).unwrap();
        assert_eq!(best.value, 0.0);
        assert!(best.perp.is_none());
        let perp = PureState::basis(2, 1).unwrap();
        assert_eq!(ur2(&psi, &z, &z, &perp, Sign::Plus).unwrap(), 0.0);

        let report = evaluate_all(&psi, &z, &z, &EvalConfig::default()).unwrap();
        assert_eq!(report.sum, 0.0);
        assert!(report.ur1_weak_cos.is_none());
        assert_eq!(report.ms_sum, Some(0.0));
    }

    #[test]
    fn qubit_harper_ground_saturates_everything() {
        let (pair, psi) = harper_ground(2);
        let (u, v) = (pair.u(), pair.v());
        assert!((ur1(&psi, u, v).unwrap() - 1.0).abs() < 1e-12);
        assert!((ur1_weak_mod(&psi, u, v).unwrap() - 1.0).abs() < 1e-12);
        assert!((ur2_best(&psi, u, v).unwrap().value - 1.0).abs() < 1e-12);
        assert!((ur3(&psi, u, v).unwrap() - 1.0).abs() < 1e-12);
        let report = evaluate_all(&psi, u, v, &EvalConfig::default()).unwrap();
        assert!((report.sum - 1.0).abs() < 1e-12);
        assert_eq!(report.ms_sum, Some(1.0));
    }

    #[test]
    fn expectation_and_bargmann_routes_agree() {
        for seed in 0..40 {
            let d = 2 + seed as usize % 6;
            let psi = haar_random_state(d, seed).unwrap();
            let u = random_unitary(d, 1000 + seed).unwrap();
            let v = random_unitary(d, 2000 + seed).unwrap();
            let a = ur1(&psi, &u, &v).unwrap();
            let b = ur1_bargmann(&psi, &u, &v).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn phase_form_equals_weak_cos() {
        for seed in 0..30 {
            let psi = haar_random_state(4, seed).unwrap();
            let u = random_unitary(4, 50 + seed).unwrap();
            let v = random_unitary(4, 80 + seed).unwrap();
            let a = ur1_weak_cos(&psi, &u, &v).unwrap();
            let b = ur1_phase_form(&psi, &u, &v).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn weak_cos_vanishing_overlap() {
        // ψ = |0⟩ is a clock eigenstate and ⟨ψ|U†V|ψ⟩ = 0
        let pair = WeylPair::clock_shift(3).unwrap();
        let psi = PureState::basis(3, 0).unwrap();
        assert!((ur1_weak_cos(&psi, pair.u(), pair.v()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sweep_state_chain() {
        for d in [3usize, 5, 8, 12] {
            let pair = WeylPair::clock_shift(d).unwrap();
            let ms = ms_sum_bound(pair.phase());
            for i in 0..=20 {
                let theta = i as f64 * PI / 80.0;
                let psi = sweep_state(d, theta);
                let b = bargmann3(&psi, pair.u(), pair.v()).unwrap();
                let full = ur1(&psi, pair.u(), pair.v()).unwrap();
                let weak = ur1_weak_cos(&psi, pair.u(), pair.v()).unwrap();
                if b.cos_phase().is_some_and(|c| c >= 0.0) {
                    assert!(full >= weak - 1e-12, "d={d} θ={theta}");
                }
                assert!(full >= ms - 1e-12, "d={d} θ={theta}: {full} < {ms}");
            }
        }
    }

    #[test]
    fn cauchy_schwarz_equality_states() {
        // V = UW with Wψ = e^{iφ}ψ gives (V − ⟨V⟩)ψ = e^{iφ}(U − ⟨U⟩)ψ
        for seed in 0..10 {
            let d = 3 + seed as usize % 4;
            let psi = haar_random_state(d, seed).unwrap();
            let u = random_unitary(d, seed + 7).unwrap();
            let phase = Complex64::from_polar(1.0, 0.3 + seed as f64);
            let w = &ComplexMatrix::identity(d) + &(&psi.projector() * (phase - 1.0));
            let v = &u * &w;
            let sum = variance(&psi, &u).unwrap() + variance(&psi, &v).unwrap();
            assert!((sum - ur1(&psi, &u, &v).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn ur2_rejects_non_orthogonal() {
        let psi = PureState::basis(2, 0).unwrap();
        let err = ur2(&psi, &sigma_x(), &sigma_z(), &psi, Sign::Plus).unwrap_err();
        assert!(matches!(err, Error::NotOrthogonal(x) if (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn ur2_best_dominates_random_perps() {
        let psi = haar_random_state(4, 11).unwrap();
        let u = random_unitary(4, 12).unwrap();
        let v = random_unitary(4, 13).unwrap();
        let best = ur2_best(&psi, &u, &v).unwrap();
        let sum = variance(&psi, &u).unwrap() + variance(&psi, &v).unwrap();
        assert!((best.value - sum).abs() < 1e-12);
        let perp = best.perp.clone().unwrap();
        assert!((ur2(&psi, &u, &v, &perp, best.sign).unwrap() - best.value).abs() < 1e-12);
        for seed in 0..100 {
            let phi = random_perp(&psi, seed).unwrap();
            for sign in Sign::BOTH {
                assert!(ur2(&psi, &u, &v, &phi, sign).unwrap() <= best.value + 1e-12);
            }
        }
        assert!(ur2_sampled(&psi, &u, &v, 20, 3).unwrap() <= best.value + 1e-12);
    }

    #[test]
    fn pauli_cases() {
        let x = [1.0, 0.0, 0.0];
        let z = [0.0, 0.0, 1.0];
        let rho = DensityMatrix::from_pure(&PureState::basis(2, 0).unwrap());
        let pb = pauli_bound(&rho, x, z).unwrap();
        assert!((pb.state_indep - 1.0).abs() < 1e-15);
        assert!((pb.state_dep - 1.0).abs() < 1e-15);

        let rho = random_density(2, 2, 5).unwrap();
        let pb = pauli_bound(&rho, x, x).unwrap();
        let du = variance(&rho, &sigma_x()).unwrap();
        assert!((pb.state_indep - 2.0 * du).abs() < 1e-12);
        assert_eq!(pauli_bound(&rho, [1.0, 1.0, 0.0], x), Err(Error::NotUnitVector(2f64.sqrt())));
    }

    #[test]
    fn pauli_product_identity() {
        let sig = pauli_matrices();
        let mut rng = rng_from_seed(99);
        for seed in 0..50 {
            use rand::Rng;
            let a: [f64; 3] =
                unit(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                    .try_into()
                    .unwrap();
            let b: [f64; 3] =
                unit(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                    .try_into()
                    .unwrap();
            let rho = random_density(2, 1 + seed as usize % 2, seed).unwrap();
            let u = linear_combination(&a, &sig).unwrap();
            let v = linear_combination(&b, &sig).unwrap();
            let lhs = rho.expect(&(&u * &v)).unwrap().norm_sqr();
            let r = bloch_vector(&rho).unwrap();
            let rhs = dot(&a, &b).powi(2) + dot(&cross(a, b), &r).powi(2);
            assert!((lhs - rhs).abs() < 1e-12);
            let pb = pauli_bound(&rho, a, b).unwrap();
            assert!(pb.state_dep >= pb.state_indep);
            let sum = variance(&rho, &u).unwrap() + variance(&rho, &v).unwrap();
            assert!(sum >= pb.state_dep - 1e-10);
        }
    }

    #[test]
    fn pauli_saturation() {
        let a = [0.0, 0.0, 1.0];
        let b: [f64; 3] = unit(&[0.6, 0.0, 0.8]).try_into().unwrap();
        for da in [0.0, 0.25, 0.7, 1.0] {
            let sat = pauli_saturating_state(a, b, da, Branch::Plus).unwrap();
            let pb = pauli_bound(&sat.rho, a, b).unwrap();
            let sig = pauli_matrices();
            let sum = variance(&sat.rho, &linear_combination(&a, &sig).unwrap()).unwrap()
                + variance(&sat.rho, &linear_combination(&b, &sig).unwrap()).unwrap();
            assert!((sum - pb.state_indep).abs() < 1e-9, "ΔA²={da}");
            assert!((sat.rho.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_reduces_to_pauli_plane() {
        let gens = gamma_generators(1).unwrap();
        let rho = random_density(2, 2, 17).unwrap();
        let a = unit(&[0.3, 0.8]);
        let b = unit(&[-0.6, 0.2]);
        let gb = gamma_bound(&rho, &a, &b, &gens).unwrap();
        let pb = pauli_bound(&rho, [a[0], a[1], 0.0], [b[0], b[1], 0.0]).unwrap();
        assert!((gb - pb.state_indep).abs() < 1e-12);
    }

    #[test]
    fn gamma_maximally_mixed_orthogonal() {
        let gens = gamma_generators(2).unwrap();
        let rho = DensityMatrix::maximally_mixed(4);
        let a = [1.0, 0.0, 0.0, 0.0];
        let b = [0.0, 0.0, 1.0, 0.0];
        assert!((gamma_bound(&rho, &a, &b, &gens).unwrap() - 1.0).abs() < 1e-15);
        let sum = variance(&rho, &gens[0]).unwrap() + variance(&rho, &gens[2]).unwrap();
        assert!((sum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_saturation() {
        let a = [1.0, 0.0];
        let b = [PI / 4.0, PI / 4.0].map(f64::cos);
        let sat = gamma_saturating_state(&a, &b, 0.3, Branch::Plus).unwrap();
        assert!((dot(&sat.g, &sat.g) - 1.0).abs() < 1e-12);
        assert!((sat.printed_norm - 1.0).abs() > 1e-3);
        let gens = gamma_generators(1).unwrap();
        let ga = linear_combination(&a, &gens).unwrap();
        let gb = linear_combination(&b, &gens).unwrap();
        let sum = variance(&sat.rho, &ga).unwrap() + variance(&sat.rho, &gb).unwrap();
        assert!((variance(&sat.rho, &ga).unwrap() - 0.3).abs() < 1e-12);
        assert!((sum - gamma_bound(&sat.rho, &a, &b, &gens).unwrap()).abs() < 1e-9);

        let pure = gamma_saturating_state(&a, &b, 0.0, Branch::Plus).unwrap();
        assert!((pure.rho.expect(&ga).unwrap().re - 1.0).abs() < 1e-12);

        assert_eq!(gamma_saturating_state(&a, &a, 0.3, Branch::Plus), Err(Error::ParallelDirections));
    }

    #[test]
    fn gamma_saturation_higher_rank() {
        let mut rng = rng_from_seed(4);
        use rand::Rng;
        for n in 1..=3usize {
            let gens = gamma_generators(n).unwrap();
            for _ in 0..10 {
                let a = unit(&(0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
                let b = unit(&(0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
                let da: f64 = rng.random_range(0.0..1.0);
                let sat = gamma_saturating_state(&a, &b, da, Branch::Plus).unwrap();
                let ga = linear_combination(&a, &gens).unwrap();
                let gb = linear_combination(&b, &gens).unwrap();
                let sum = variance(&sat.rho, &ga).unwrap() + variance(&sat.rho, &gb).unwrap();
                assert!((sum - gamma_bound(&sat.rho, &a, &b, &gens).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ms_relation_cases() {
        assert_eq!(ms_relation_check(0.5, 0.5, PI), 0.0);
        let a = (PI / 5.0).tan();
        let full = ms_relation_check(1.0, 1.0, 2.0 * PI / 5.0);
        assert!((full - (1.0 + 2.0 * a + a * a)).abs() < 1e-12);
        let (pair, psi) = harper_ground(5);
        let du = variance(&psi, pair.u()).unwrap();
        let dv = variance(&psi, pair.v()).unwrap();
        assert!(ms_relation_check(du, dv, pair.phase()) >= 0.0);
    }

    #[test]
    fn ms_sum_cases() {
        assert_eq!(ms_sum_bound(PI), 1.0);
        let a = (PI / 3.0).tan();
        let x = ms_sum_bound(2.0 * PI / 3.0) / 2.0;
        assert!(((1.0 + 2.0 * a) * x * x + 2.0 * a * a * x - a * a).abs() < 1e-12);
        assert!((ms_sum_bound(2.0 * PI / 3.0) - 0.775_990_8).abs() < 1e-6);
        let small: f64 = 1e-4;
        let a = (small / 2.0).tan();
        assert!((ms_sum_bound(small) - 2.0 * a).abs() < 5.0 * a * a);
    }

    #[test]
    fn report_on_sweep_state() {
        let pair = WeylPair::clock_shift(3).unwrap();
        let psi = sweep_state(3, 0.3);
        let cfg = EvalConfig { ur2: Ur2Strategy::Sampled { k: 20, seed: 1 } };
        let r = evaluate_all(&psi, pair.u(), pair.v(), &cfg).unwrap();
        assert!(r.ur1 >= r.ms_sum.unwrap());
        assert_eq!(r.ur2_strategy, Ur2Tag::Sampled { k: 20, seed: 1 });
        assert!(r.slacks().iter().all(|(_, s)| *s >= -SLACK_TOL));
        assert!(r.cos_phi3.is_some());
    }

    #[test]
    fn mixed_ur1_validity() {
        for seed in 0..60 {
            let d = [2usize, 3, 5][seed as usize % 3];
            let rho = random_density(d, 1 + seed as usize % d, seed).unwrap();
            let pair = WeylPair::clock_shift(d).unwrap();
            let sum = variance(&rho, pair.u()).unwrap() + variance(&rho, pair.v()).unwrap();
            assert!(sum - ur1(&rho, pair.u(), pair.v()).unwrap() >= -SLACK_TOL);
            assert!(sum - ur1_weak_mod(&rho, pair.u(), pair.v()).unwrap() >= -SLACK_TOL);
        }
    }
}
