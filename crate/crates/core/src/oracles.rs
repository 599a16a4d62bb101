//! Seeded Monte-Carlo suites. Trial `i` of a run draws from a ChaCha8
//! stream seeded by the root seed with stream id `i`, so results do not
//! depend on scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grigoriev::{root_magnitude_oracle, RootReport};
use crate::hyperboloid::hyp_distance;
use crate::margulis::{displacement_witness, tube_radius_lower, MargulisConstant, MargulisSource};
use crate::sampling::{random_hyperboloid_point, random_rotation, random_unit_vector};
use crate::uhs::{
    find_recurrent_power, hyperboloid_to_uhs, pigeonhole_k_bound, recurrence_radius, uhs_distance, LoxodromicNormalForm,
    UhsPoint,
};

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::OutOfRange { name: "trials", value: 0.0, range: "[1, inf)" });
    }
    Ok(())
}

/// A point of height `h` with `|x| / x_n = e^D`.
fn point_at_radius<R: Rng + ?Sized>(rng: &mut R, n: usize, d: f64, h: f64) -> Result<UhsPoint> {
    let r = h * (2.0 * d).exp_m1().sqrt();
    let mut coords: Vec<f64> = random_unit_vector(rng, n - 1).into_iter().map(|v| v * r).collect();
    coords.push(h);
    UhsPoint::new(coords)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PigeonholeTrial {
    pub trial: usize,
    pub d: f64,
    pub a: f64,
    pub bound: f64,
    pub k: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PigeonholeSummary {
    pub suite: &'static str,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_k: u64,
    /// Largest `k / bound` over passing trials.
    pub max_k_ratio: f64,
    pub failures: Vec<PigeonholeTrial>,
    pub passes: bool,
}

fn pigeonhole_trial(n: usize, seed: u64, trial: usize) -> Result<PigeonholeTrial> {
    let mut rng = trial_rng(seed, trial);
    let d = rng.random_range(0.0..=2.0);
    let a = rng.random_range(0.05..0.95);
    let h = rng.random_range(-1.0f64..1.0).exp();
    let rot = random_rotation(&mut rng, n - 1);
    let x = point_at_radius(&mut rng, n, d, h)?;
    let bound = pigeonhole_k_bound(recurrence_radius(&x), a, n)?;
    let k = match find_recurrent_power(&rot, &x, a) {
        Ok(rec) => Some(rec.k).filter(|&k| k as f64 <= bound),
        Err(Error::RecurrenceNotFound { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(PigeonholeTrial { trial, d, a, bound, k })
}

/// Random rotations `A ∈ SO(n−1)`, points with `D ≤ 2` and `a ∈ (0.05, 0.95)`;
/// a trial passes when a recurrent power exists within the pigeonhole bound.
pub fn pigeonhole_suite(n: usize, trials: usize, seed: u64) -> Result<PigeonholeSummary> {
    check_trials(trials)?;
    if n < 3 {
        return Err(Error::OutOfRange { name: "n", value: n as f64, range: "[3, inf)" });
    }
    let results: Vec<PigeonholeTrial> =
        (0..trials).into_par_iter().map(|i| pigeonhole_trial(n, seed, i)).collect::<Result<_>>()?;
    let mut max_k = 0;
    let mut max_k_ratio = 0.0f64;
    let mut failures = Vec::new();
    for r in results {
        match r.k {
            Some(k) => {
                max_k = max_k.max(k);
                max_k_ratio = max_k_ratio.max(k as f64 / r.bound);
            }
            None => failures.push(r),
        }
    }
    Ok(PigeonholeSummary {
        suite: "pigeonhole",
        n,
        seed,
        trials,
        passed: trials - failures.len(),
        failed: failures.len(),
        max_k,
        max_k_ratio,
        passes: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThinOutcome {
    /// `tube_radius_lower(R) ≤ 0` or `R > 2ε`: no point satisfies the hypothesis.
    Vacuous,
    Passed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinPartTrial {
    pub trial: usize,
    pub log_r: f64,
    pub tube_radius: f64,
    pub axis_distance: f64,
    pub kmax: u64,
    pub witness_k: Option<u64>,
    pub displacement: Option<f64>,
    pub outcome: ThinOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinPartSummary {
    pub suite: &'static str,
    pub n: usize,
    pub epsilon: f64,
    pub epsilon_source: MargulisSource,
    pub seed: u64,
    pub trials: usize,
    pub vacuous: usize,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_kmax: u64,
    pub max_witness_k: u64,
    pub failures: Vec<ThinPartTrial>,
    pub passes: bool,
}

fn thin_part_trial(n: usize, eps: &MargulisConstant, seed: u64, trial: usize) -> Result<ThinPartTrial> {
    let mut rng = trial_rng(seed, trial);
    let log_r = rng.random_range(-30.0..=-10.0);
    let r = f64::exp(log_r);
    let rot = random_rotation(&mut rng, n - 1);
    let s: f64 = rng.random_range(0.0..1.0);
    let h = rng.random_range(-1.0f64..1.0).exp();
    let tube_radius = if r <= 2.0 * eps.value() { tube_radius_lower(r, n, eps)? } else { f64::NEG_INFINITY };
    let mut out = ThinPartTrial {
        trial,
        log_r,
        tube_radius,
        axis_distance: 0.0,
        kmax: 0,
        witness_k: None,
        displacement: None,
        outcome: ThinOutcome::Vacuous,
    };
    if !(tube_radius > 0.0) {
        return Ok(out);
    }
    // Axis distance s·radius, i.e. |x| / x_n = cosh of it.
    let dist = s * tube_radius;
    let mut coords: Vec<f64> = random_unit_vector(&mut rng, n - 1).into_iter().map(|v| v * h * dist.sinh()).collect();
    coords.push(h);
    let x = UhsPoint::new(coords)?;
    let phi = LoxodromicNormalForm::new(r, rot)?;
    let bound = pigeonhole_k_bound(tube_radius, eps.value(), n)?;
    out.axis_distance = dist;
    out.kmax = bound.ceil().min(u64::MAX as f64) as u64;
    let w = displacement_witness(&phi, &x, out.kmax, 2.0 * eps.value())?;
    out.witness_k = w.map(|(k, _)| k);
    out.displacement = w.map(|(_, d)| d);
    out.outcome = if w.is_some() { ThinOutcome::Passed } else { ThinOutcome::Failed };
    Ok(out)
}

/// For `R = e^{−u}` with `u ∈ [10, 30]`, a random rotation and a point
/// inside the radius-`tube_radius_lower(R)` tube, searches `k` up to the
/// pigeonhole cap at `a = ε` for a displacement below `2ε`. The search
/// stops at the first witness, which decides the exhaustive minimum.
pub fn thin_part_suite(n: usize, eps: &MargulisConstant, trials: usize, seed: u64) -> Result<ThinPartSummary> {
    check_trials(trials)?;
    if eps.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: eps.n() });
    }
    let results: Vec<ThinPartTrial> =
        (0..trials).into_par_iter().map(|i| thin_part_trial(n, eps, seed, i)).collect::<Result<_>>()?;
    let count = |o| results.iter().filter(|t| t.outcome == o).count();
    let (vacuous, passed, failed) = (count(ThinOutcome::Vacuous), count(ThinOutcome::Passed), count(ThinOutcome::Failed));
    Ok(ThinPartSummary {
        suite: "tube",
        n,
        epsilon: eps.value(),
        epsilon_source: eps.source(),
        seed,
        trials,
        vacuous,
        checked: passed + failed,
        passed,
        failed,
        max_kmax: results.iter().map(|t| t.kmax).max().unwrap_or(0),
        max_witness_k: results.iter().filter_map(|t| t.witness_k).max().unwrap_or(0),
        failures: results.iter().filter(|t| t.outcome == ThinOutcome::Failed).cloned().collect(),
        passes: failed == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootTrial {
    pub trial: usize,
    pub coefficients: Vec<i64>,
    pub report: RootReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootsSummary {
    pub suite: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub max_degree: usize,
    pub max_coefficient: i64,
    pub roots_checked: usize,
    pub violations: usize,
    /// Smallest `log₂(U/|θ|)` and `log₂(|θ|·U)` over all roots.
    pub min_upper_margin_log2: f64,
    pub min_lower_margin_log2: f64,
    pub failures: Vec<RootTrial>,
    pub passes: bool,
}

/// Random polynomials with degree in `[1, max_degree]` and coefficients in
/// `[−max_coefficient, max_coefficient]`, non-zero leading term.
pub fn roots_suite(trials: usize, max_degree: usize, max_coefficient: i64, seed: u64) -> Result<RootsSummary> {
    check_trials(trials)?;
    if max_degree == 0 || max_coefficient <= 0 {
        return Err(Error::OutOfRange { name: "max_degree", value: max_degree as f64, range: "[1, 64]" });
    }
    let results: Vec<RootTrial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let deg = rng.random_range(1..=max_degree);
            let mut coefficients: Vec<i64> =
                (0..=deg).map(|_| rng.random_range(-max_coefficient..=max_coefficient)).collect();
            while coefficients[0] == 0 {
                coefficients[0] = rng.random_range(-max_coefficient..=max_coefficient);
            }
            let wide: Vec<i128> = coefficients.iter().map(|&c| c as i128).collect();
            root_magnitude_oracle(&wide).map(|report| RootTrial { trial: i, coefficients, report })
        })
        .collect::<Result<_>>()?;
    let all = || results.iter().flat_map(|t| &t.report.roots);
    let violations: usize = results.iter().map(|t| t.report.violations).sum();
    Ok(RootsSummary {
        suite: "roots",
        seed,
        trials,
        max_degree,
        max_coefficient,
        roots_checked: all().count(),
        violations,
        min_upper_margin_log2: all().map(|c| c.upper_margin_log2).fold(f64::INFINITY, f64::min),
        min_lower_margin_log2: all().map(|c| c.lower_margin_log2).fold(f64::INFINITY, f64::min),
        failures: results.iter().filter(|t| !t.report.passes).cloned().collect(),
        passes: violations == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionSummary {
    pub suite: &'static str,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub passes: bool,
}

/// Hyperboloid and upper half-space distances of random pairs at
/// distance at most `max_r` from the basepoint.
pub fn conversion_suite(n: usize, trials: usize, max_r: f64, seed: u64) -> Result<ConversionSummary> {
    check_trials(trials)?;
    let errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let p = random_hyperboloid_point(&mut rng, n, max_r);
            let q = random_hyperboloid_point(&mut rng, n, max_r);
            let d_h = hyp_distance(&p, &q)?;
            let d_u = uhs_distance(&hyperboloid_to_uhs(&p)?, &hyperboloid_to_uhs(&q)?)?;
            Ok((d_h - d_u).abs())
        })
        .collect::<Result<_>>()?;
    let max_abs_error = errors.into_iter().fold(0.0, f64::max);
    let tolerance = 1e-9;
    Ok(ConversionSummary {
        suite: "conversion",
        n,
        seed,
        trials,
        max_abs_error,
        tolerance,
        passes: max_abs_error <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margulis::epsilon_lower;

    #[test]
    fn streams_are_independent_of_order() {
        let a: f64 = trial_rng(5, 3).random();
        let _: f64 = trial_rng(5, 2).random();
        let b: f64 = trial_rng(5, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, trial_rng(5, 4).random::<f64>());
    }

    #[test]
    fn small_suites_pass_and_repeat() {
        let a = pigeonhole_suite(3, 40, 7).unwrap();
        assert!(a.passes);
        assert_eq!(a, pigeonhole_suite(3, 40, 7).unwrap());
        assert!(pigeonhole_suite(4, 20, 7).unwrap().passes);

        let eps = epsilon_lower(3, MargulisSource::Meyerhoff).unwrap();
        let t = thin_part_suite(3, &eps, 40, 7).unwrap();
        assert!(t.passes && t.checked > 0);
        assert_eq!(t.vacuous + t.checked, 40);

        let r = roots_suite(20, 8, 1024, 7).unwrap();
        assert!(r.passes && r.roots_checked > 0);
        assert!(r.min_upper_margin_log2 >= 0.0 && r.min_lower_margin_log2 >= 0.0);

        assert!(conversion_suite(3, 50, 3.0, 7).unwrap().passes);
    }

    #[test]
    fn kellerhals_four_is_vacuous_on_range() {
        let eps = epsilon_lower(4, MargulisSource::Kellerhals).unwrap();
        let t = thin_part_suite(4, &eps, 20, 1).unwrap();
        assert_eq!(t.vacuous, 20);
    }
}
