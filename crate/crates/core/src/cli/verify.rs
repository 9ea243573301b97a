use std::f64::consts::FRAC_PI_4;

use clap::ValueEnum;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::asymptotics::{asymptotic_gap, clock_shift_generators, family_state, hermitian_mp_bound, Family};
use crate::bounds::{
    evaluate_all, gamma_bound, gamma_saturating_state, ms_relation_check, pauli_bound, pauli_saturating_state, ur1,
    ur1_weak_mod, ur2_best, Branch, EvalConfig, Sign, Ur2Strategy, SLACK_TOL,
};
use crate::linalg::ComplexMatrix;
use crate::mus::{critical_residual, harper_ground, realign_phases};
use crate::operators::{gamma_generators, linear_combination, pauli_matrices, translation, WeylPair};
use crate::random::{haar_random_state, random_density, rng_from_seed};
use crate::uncertainty::variance;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Validity,
    Mixed,
    Pauli,
    Gamma,
    Critical,
    Dominance,
    Asymptotics,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Validity => "validity",
            Suite::Mixed => "mixed",
            Suite::Pauli => "pauli",
            Suite::Gamma => "gamma",
            Suite::Critical => "critical",
            Suite::Dominance => "dominance",
            Suite::Asymptotics => "asymptotics",
        }
    }

    fn default_dims(self) -> Vec<usize> {
        match self {
            Suite::Validity => vec![2, 3, 5, 8, 12],
            Suite::Mixed => vec![2, 3, 5],
            Suite::Pauli => vec![2],
            Suite::Gamma => vec![4],
            Suite::Critical => (2..=8).collect(),
            Suite::Dominance => vec![3, 5, 8, 12],
            Suite::Asymptotics => vec![32, 64, 128],
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Suite::Validity => 1000,
            Suite::Mixed => 500,
            Suite::Pauli | Suite::Gamma => 100,
            Suite::Critical => 0,
            Suite::Dominance => 200,
            Suite::Asymptotics => 0,
        }
    }
}

/// One named criterion. `worst` is the extreme observed value of the
/// quantity named in `criterion`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: &'static str,
    pub passed: bool,
    pub count: usize,
    pub worst: f64,
    pub criterion: &'static str,
}

/// Lower-is-worse accumulation for `value ≥ floor`.
fn at_least(suite: Suite, name: &'static str, criterion: &'static str, values: &[f64], floor: f64) -> Check {
    let worst = values.iter().copied().fold(f64::INFINITY, f64::min);
    Check { suite, name, passed: worst >= floor, count: values.len(), worst, criterion }
}

/// Higher-is-worse accumulation for `value ≤ ceiling`.
fn at_most(suite: Suite, name: &'static str, criterion: &'static str, values: &[f64], ceiling: f64) -> Check {
    let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Check { suite, name, passed: worst <= ceiling, count: values.len(), worst, criterion }
}

/// Per-sample seed: the base seed xor-ed with the dimension in the high word
/// and the row index in the low word.
pub fn sample_seed(seed: u64, d: usize, i: usize) -> u64 {
    seed ^ ((d as u64) << 32) ^ i as u64
}

fn unit_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Unit `(a, b)` with `|a·b| ≤ 0.99`, so the saturating construction is defined.
fn direction_pair<R: Rng>(n: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    loop {
        let a = unit_vector(n, rng);
        let b = unit_vector(n, rng);
        let ab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        if ab.abs() <= 0.99 {
            return (a, b);
        }
    }
}

fn slack_of(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::BoundViolated { slack, .. }) => Ok(slack),
        other => other,
    }
}

fn validity(dims: &[usize], samples: usize, seed: u64) -> Result<Vec<Check>> {
    let s = Suite::Validity;
    let mut bounds = Vec::new();
    let mut optimal = Vec::new();
    let mut ms = Vec::new();
    for &d in dims {
        let pair = WeylPair::clock_shift(d)?;
        let rows = (0..samples)
            .into_par_iter()
            .map(|i| -> Result<(f64, f64, f64)> {
                let sd = sample_seed(seed, d, i);
                let psi = haar_random_state(d, sd)?;
                let config = EvalConfig { ur2: Ur2Strategy::Sampled { k: 20, seed: sd } };
                let sampled = slack_of(evaluate_all(&psi, pair.u(), pair.v(), &config).map(|r| r.min_slack().1))?;
                let du = variance(&psi, pair.u())?;
                let dv = variance(&psi, pair.v())?;
                let best = du + dv - ur2_best(&psi, pair.u(), pair.v())?.value;
                Ok((sampled, best, ms_relation_check(du, dv, pair.phase())))
            })
            .collect::<Result<Vec<_>>>()?;
        for (a, b, c) in rows {
            bounds.push(a);
            optimal.push(b);
            ms.push(c);
        }
    }
    Ok(vec![
        at_least(s, "all_bounds_sampled_ur2", "min(sum - bound) >= -1e-10", &bounds, -SLACK_TOL),
        at_least(s, "ur2_optimal", "min(sum - ur2_optimal) >= -1e-10", &optimal, -SLACK_TOL),
        at_least(s, "massar_spindel", "min residual >= -1e-10", &ms, -SLACK_TOL),
    ])
}

fn mixed(dims: &[usize], samples: usize, seed: u64) -> Result<Vec<Check>> {
    let mut slacks = Vec::new();
    for &d in dims {
        let pair = WeylPair::clock_shift(d)?;
        let rows = (0..samples)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let rho = random_density(d, 1 + i % d, sample_seed(seed, d, i))?;
                let sum = variance(&rho, pair.u())? + variance(&rho, pair.v())?;
                let tight = ur1(&rho, pair.u(), pair.v())?;
                let weak = ur1_weak_mod(&rho, pair.u(), pair.v())?;
                Ok((sum - tight).min(sum - weak))
            })
            .collect::<Result<Vec<_>>>()?;
        slacks.extend(rows);
    }
    Ok(vec![at_least(Suite::Mixed, "ur1_mixed", "min(sum - bound) >= -1e-10", &slacks, -SLACK_TOL)])
}

fn pauli(samples: usize, seed: u64) -> Result<Vec<Check>> {
    let s = Suite::Pauli;
    let sig = pauli_matrices();
    let mut rng = rng_from_seed(seed);
    let mut errors = Vec::new();
    for _ in 0..samples {
        let (a, b) = direction_pair(3, &mut rng);
        let da: f64 = rng.random();
        let (a, b): ([f64; 3], [f64; 3]) = (a.try_into().unwrap(), b.try_into().unwrap());
        let sat = pauli_saturating_state(a, b, da, Branch::Plus)?;
        let sum =
            variance(&sat.rho, &linear_combination(&a, &sig)?)? + variance(&sat.rho, &linear_combination(&b, &sig)?)?;
        errors.push((sum - pauli_bound(&sat.rho, a, b)?.state_indep).abs());
    }
    let mut slacks = Vec::new();
    for i in 0..10 * samples {
        let (a, b) = direction_pair(3, &mut rng);
        let (a, b): ([f64; 3], [f64; 3]) = (a.try_into().unwrap(), b.try_into().unwrap());
        let rho = random_density(2, 1 + i % 2, rng.random())?;
        let sum = variance(&rho, &linear_combination(&a, &sig)?)? + variance(&rho, &linear_combination(&b, &sig)?)?;
        let pb = pauli_bound(&rho, a, b)?;
        slacks.push((sum - pb.state_dep).min(pb.state_dep - pb.state_indep));
    }
    Ok(vec![
        at_most(s, "saturation", "max |sum - bound| <= 1e-9", &errors, 1e-9),
        at_least(s, "validity", "min slack >= -1e-10", &slacks, -SLACK_TOL),
    ])
}

fn gamma(dims: &[usize], samples: usize, seed: u64) -> Result<Vec<Check>> {
    let s = Suite::Gamma;
    let mut table = Vec::new();
    let mut errors = Vec::new();
    let mut slacks = Vec::new();
    let mut rng = rng_from_seed(seed);
    for &d in dims {
        if !d.is_power_of_two() || d < 2 {
            return Err(Error::BadDimension(d));
        }
        let n = d.trailing_zeros() as usize;
        let gens = gamma_generators(n)?;
        let id = ComplexMatrix::identity(d);
        for (i, gi) in gens.iter().enumerate() {
            for (j, gj) in gens.iter().enumerate() {
                let target = if i == j { &id * 2.0 } else { ComplexMatrix::zeros(d) };
                table.push((&gi.anticommutator(gj) - &target).frobenius_norm());
            }
        }
        for i in 0..samples {
            let (a, b) = direction_pair(2 * n, &mut rng);
            let da: f64 = rng.random();
            let sat = gamma_saturating_state(&a, &b, da, Branch::Plus)?;
            let sum = variance(&sat.rho, &linear_combination(&a, &gens)?)?
                + variance(&sat.rho, &linear_combination(&b, &gens)?)?;
            errors.push((sum - gamma_bound(&sat.rho, &a, &b, &gens)?).abs());
            let rho = random_density(d, 1 + i % d, rng.random())?;
            let sum =
                variance(&rho, &linear_combination(&a, &gens)?)? + variance(&rho, &linear_combination(&b, &gens)?)?;
            slacks.push(sum - gamma_bound(&rho, &a, &b, &gens)?);
        }
    }
    Ok(vec![
        at_most(s, "anticommutation", "max ||{G_i,G_j} - 2 delta_ij I|| <= 1e-12", &table, 1e-12),
        at_most(s, "saturation", "max |sum - bound| <= 1e-8", &errors, 1e-8),
        at_least(s, "validity", "min slack >= -1e-10", &slacks, -SLACK_TOL),
    ])
}

fn critical(dims: &[usize]) -> Result<Vec<Check>> {
    let s = Suite::Critical;
    let rows = dims
        .par_iter()
        .map(|&d| -> Result<(f64, Vec<f64>)> {
            let pair = WeylPair::clock_shift(d)?;
            let ground = harper_ground(&pair)?;
            let aligned = realign_phases(&ground.state, &pair)?.state;
            let r0 = critical_residual(&aligned, pair.u(), pair.v())?;
            let mut drift = Vec::new();
            if d <= 6 {
                let du = variance(&aligned, pair.u())?;
                let dv = variance(&aligned, pair.v())?;
                for m in 0..d as i64 {
                    for n in 0..d as i64 {
                        let t = aligned.evolve(&translation(&pair, m, n))?;
                        let dev = (variance(&t, pair.u())? - du)
                            .abs()
                            .max((variance(&t, pair.v())? - dv).abs())
                            .max((critical_residual(&t, pair.u(), pair.v())? - r0).abs());
                        drift.push(dev);
                    }
                }
            }
            Ok((r0, drift))
        })
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let drift: Vec<f64> = rows.into_iter().flat_map(|r| r.1).collect();
    Ok(vec![
        at_most(s, "realigned_residual", "max residual <= 1e-8", &residuals, 1e-8),
        at_most(s, "translation_invariance", "max drift <= 1e-10 (d <= 6)", &drift, 1e-10),
    ])
}

/// Grid `θ_i = i·(π/4)/(n − 1)`; a single point sits at `θ = 0`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 * FRAC_PI_4 / (n - 1) as f64).collect(),
    }
}

fn dominance(dims: &[usize], points: usize) -> Result<Vec<Check>> {
    let mut slacks = Vec::new();
    for &d in dims {
        let pair = WeylPair::clock_shift(d)?;
        let rows = theta_grid(points)
            .into_par_iter()
            .map(|theta| -> Result<Option<f64>> {
                let psi = family_state(d, Family::ThetaSweep { theta })?;
                let report = evaluate_all(&psi, pair.u(), pair.v(), &EvalConfig::default())?;
                Ok(match (report.cos_phi3, report.ms_sum) {
                    (Some(c), Some(ms)) if c >= 0.0 => Some(report.ur1 - ms),
                    _ => None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        slacks.extend(rows.into_iter().flatten());
    }
    Ok(vec![at_least(
        Suite::Dominance,
        "ur1_over_ms",
        "min(ur1 - ms_sum) >= -1e-10 where cos >= 0",
        &slacks,
        -SLACK_TOL,
    )])
}

fn increments(xs: &[f64]) -> Vec<f64> {
    xs.windows(2).map(|w| w[1] - w[0]).collect()
}

fn asymptotics(dims: &[usize]) -> Result<Vec<Check>> {
    let s = Suite::Asymptotics;
    let rows = dims
        .par_iter()
        .map(|&d| -> Result<_> {
            let rec = asymptotic_gap(d, Family::HarperGround)?;
            let psi = family_state(d, Family::HarperGround)?;
            let (u, v) = clock_shift_generators(d)?;
            let mp = Sign::BOTH
                .iter()
                .map(|&sign| hermitian_mp_bound(&psi, &u, &v, sign).map(|b| b.slack()))
                .collect::<Result<Vec<_>>>()?;
            Ok((rec, mp))
        })
        .collect::<Result<Vec<_>>>()?;
    let gap_scaled: Vec<f64> = rows.iter().map(|r| r.0.gap_scaled).collect();
    let gap_ur1: Vec<f64> = rows.iter().map(|r| r.0.gap_ur1).collect();
    let residual: Vec<f64> = rows.iter().map(|r| r.0.mus_residual.unwrap_or(f64::INFINITY)).collect();
    let mp: Vec<f64> = rows.iter().flat_map(|r| r.1.iter().copied()).collect();
    let trend = "max increment <= 0 across ascending d";
    Ok(vec![
        at_most(s, "gap_scaled_trend", trend, &increments(&gap_scaled), 0.0),
        at_most(s, "gap_ur1_trend", trend, &increments(&gap_ur1), 0.0),
        at_most(s, "mus_residual_trend", trend, &increments(&residual), 0.0),
        at_least(s, "hermitian_relation", "min slack >= -1e-10", &mp, -SLACK_TOL),
    ])
}

/// Runs one suite. `dims` and `samples` fall back to the suite defaults.
pub fn run_suite(suite: Suite, dims: Option<&[usize]>, samples: Option<usize>, seed: u64) -> Result<Vec<Check>> {
    let default_dims = suite.default_dims();
    let mut dims = dims.unwrap_or(&default_dims).to_vec();
    let samples = samples.unwrap_or(suite.default_samples());
    match suite {
        Suite::Validity => validity(&dims, samples, seed),
        Suite::Mixed => mixed(&dims, samples, seed),
        Suite::Pauli => pauli(samples, seed),
        Suite::Gamma => gamma(&dims, samples, seed),
        Suite::Critical => critical(&dims),
        Suite::Dominance => dominance(&dims, samples),
        Suite::Asymptotics => {
            dims.sort_unstable();
            asymptotics(&dims)
        }
    }
}
