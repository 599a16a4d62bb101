//! Log-space arithmetic for solution-size bounds of real polynomial
//! systems and their composition into a symbolic systole bound.
//!
//! Every asymptotic exponent is parameterized by an explicit constant `c`
//! supplied by the caller; nothing here knows its true value.

mod roots;

use serde::Serialize;

use crate::certificate::{BoundCertificate, Case};
use crate::error::{Error, Result};
use crate::margulis::MargulisConstant;
use crate::polysys::ComplexityProfile;
use crate::real::Real;

pub use roots::{root_magnitude_oracle, RootCheck, RootReport, MAX_ORACLE_DEGREE};

pub const PROVENANCE: &str = "parameterized bound, c user-supplied, default 1";

/// `l(p/q) = log₂(|pq| + 2)`.
pub fn rational_length(p: i64, q: i64) -> Result<f64> {
    if q == 0 {
        return Err(Error::ZeroDenominator);
    }
    let pq = (p as i128 * q as i128).unsigned_abs();
    Ok((pq as f64 + 2.0).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogSign {
    /// The quantity is at least 1: `log₂ Q ≥ 0`.
    Positive,
    /// The quantity is below 1: `log₂ Q < 0`.
    Negative,
}

/// `Q` known through `log₂|log₂ Q| ≤ level2` (upper bounds) or the
/// matching lower form, with the sign of `log₂ Q` recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogBound {
    pub level2: f64,
    pub sign: LogSign,
}

impl LogLogBound {
    pub fn positive(level2: f64) -> Self {
        LogLogBound { level2, sign: LogSign::Positive }
    }

    pub fn negative(level2: f64) -> Self {
        LogLogBound { level2, sign: LogSign::Negative }
    }

    /// `log₂ Q`, which may overflow to ±∞.
    pub fn log2_value(&self) -> f64 {
        let m = self.level2.exp2();
        match self.sign {
            LogSign::Positive => m,
            LogSign::Negative => -m,
        }
    }
}

/// Bounds on the size of an algebraic point in a system with profile
/// `(N, κ, d, M)`, with every `O(N)` exponent read as `cN`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraicSolutionProfile {
    #[serde(rename = "N")]
    pub n_vars: u64,
    pub kappa: u64,
    pub d: u64,
    #[serde(rename = "M")]
    pub m: f64,
    pub c: f64,
    /// `cN log₂(κd)`.
    pub phi_degree_log2: f64,
    /// `log₂ L` for `L = M (κd)^{cN}`, the length bound of `Φ`, the `α_i^{(j)}`
    /// and the interval endpoints.
    pub length_bound_log2: f64,
    /// `|θ| ≤ 2^L`.
    pub theta_upper: LogLogBound,
    /// `|θ| ≥ 2^{−L}`.
    pub theta_lower: LogLogBound,
    /// `|α_i| ≤ 2^L`.
    pub alpha_upper: LogLogBound,
    /// `|α_i| ≥ 2^{−L'}` for non-zero coordinates, with
    /// `L' = M ((κ + 2N) d)^{cN}`.
    pub alpha_lower: LogLogBound,
    pub provenance: &'static str,
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::OutOfRange { name, value: x, range: "(0, inf)" });
    }
    Ok(())
}

/// `log₂ M + cN log₂(κd)` in any [`Real`].
pub fn length_bound_log2<S: Real>(n_vars: u64, kappa: u64, d: u64, m: f64, c: f64) -> S {
    let ln2 = S::from_f64(2.0).ln();
    let kd = S::from_f64(kappa as f64) * S::from_f64(d as f64);
    S::from_f64(m).ln() / ln2 + S::from_f64(c) * S::from_f64(n_vars as f64) * kd.ln() / ln2
}

pub fn solution_size_bounds(n_vars: u64, kappa: u64, d: u64, m: f64, c: f64) -> Result<AlgebraicSolutionProfile> {
    check_positive("N", n_vars as f64)?;
    check_positive("kappa", kappa as f64)?;
    check_positive("d", d as f64)?;
    check_positive("M", m)?;
    check_positive("c", c)?;
    let phi_degree_log2 = c * n_vars as f64 * ((kappa * d) as f64).log2();
    let l = length_bound_log2::<f64>(n_vars, kappa, d, m, c);
    let l_wide = length_bound_log2::<f64>(n_vars, kappa + 2 * n_vars, d, m, c);
    Ok(AlgebraicSolutionProfile {
        n_vars,
        kappa,
        d,
        m,
        c,
        phi_degree_log2,
        length_bound_log2: l,
        theta_upper: LogLogBound::positive(l),
        theta_lower: LogLogBound::negative(l),
        alpha_upper: LogLogBound::positive(l),
        alpha_lower: LogLogBound::negative(l_wide),
        provenance: PROVENANCE,
    })
}

/// [`solution_size_bounds`] for a generated system.
pub fn bounds_for_profile(p: &ComplexityProfile, c: f64) -> Result<AlgebraicSolutionProfile> {
    solution_size_bounds(p.n_vars as u64, p.kappa as u64, p.d as u64, p.m, c)
}

/// `log₂(2^a + 2^b)` without overflow.
pub fn log2_add<S: Real>(a: S, b: S) -> S {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let ln2 = S::from_f64(2.0).ln();
    hi + ((lo - hi) * ln2).exp().ln_1p() / ln2
}

/// Symbolic systole bound with its intermediate logarithms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolicBound {
    pub case: Case,
    pub n: usize,
    pub t: usize,
    pub c: f64,
    pub epsilon: f64,
    /// `c n⁴ t log₂(nt)`.
    pub edge_bound_log2: f64,
    /// `log₂` of `tB` (closed) or of the reach `tB + ln(tB/ε)` (cusped).
    pub diameter_log2: f64,
    /// `log₂(−log₂ R) ≤ λ`.
    pub lambda: LogLogBound,
    pub provenance: &'static str,
}

/// `λ` in any [`Real`]: `log₂ n + log₂(D + ln(4/ε)) − log₂ ln 2` where
/// `log₂ D` is the diameter logarithm.
fn lambda_from_diameter<S: Real>(n: usize, diam_log2: S, eps: f64) -> S {
    let ln2 = S::from_f64(2.0).ln();
    let log2 = |x: S| x.ln() / ln2;
    let tail = (S::from_f64(4.0) / S::from_f64(eps)).ln();
    log2(S::from_f64(n as f64)) + log2_add(diam_log2, log2(tail)) - log2(ln2)
}

fn diameter_log2<S: Real>(case: Case, t: usize, b_log2: S, eps: f64) -> S {
    let ln2 = S::from_f64(2.0).ln();
    let tb_log2 = S::from_f64(t as f64).ln() / ln2 + b_log2;
    match case {
        Case::Closed => tb_log2,
        Case::Cusped => {
            // ln(tB/ε) = tB_log2·ln 2 − ln ε, clamped at 0 as in the reach bound.
            let d0 = tb_log2 * ln2 - S::from_f64(eps).ln();
            if d0 > S::zero() {
                log2_add(tb_log2, d0.ln() / ln2)
            } else {
                tb_log2
            }
        }
    }
}

/// `λ` computed entirely in `S`, for cross-checking the double path.
pub fn symbolic_lambda<S: Real>(case: Case, n: usize, t: usize, c: f64) -> Result<S> {
    let eps = MargulisConstant::default_for(n)?;
    let ln2 = S::from_f64(2.0).ln();
    let nt = S::from_f64((n * t) as f64);
    let b_log2 = S::from_f64(c) * S::from_f64(n.pow(4) as f64) * S::from_f64(t as f64) * nt.ln() / ln2;
    Ok(lambda_from_diameter(n, diameter_log2(case, t, b_log2, eps.value()), eps.value()))
}

/// Edge bound `B = (nt)^{c n⁴ t}` composed with the Margulis chain, using
/// the default ε for `n`. Returns `λ` with `log₂(−log₂ R) ≤ λ`.
pub fn systole_symbolic_bound_for(case: Case, n: usize, t: usize, c: f64) -> Result<(SymbolicBound, BoundCertificate)> {
    if n < 3 {
        return Err(Error::OutOfRange { name: "n", value: n as f64, range: "[3, inf)" });
    }
    if t == 0 {
        return Err(Error::OutOfRange { name: "t", value: 0.0, range: "[1, inf)" });
    }
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::OutOfRange { name: "c", value: c, range: "[0, inf)" });
    }
    let eps = MargulisConstant::default_for(n)?;
    let b_log2 = c * n.pow(4) as f64 * t as f64 * ((n * t) as f64).log2();
    let diam_log2 = diameter_log2(case, t, b_log2, eps.value());
    let lambda = lambda_from_diameter(n, diam_log2, eps.value());
    let bound = SymbolicBound {
        case,
        n,
        t,
        c,
        epsilon: eps.value(),
        edge_bound_log2: b_log2,
        diameter_log2: diam_log2,
        lambda: LogLogBound::negative(lambda),
        provenance: PROVENANCE,
    };
    let cert = BoundCertificate::symbolic(case, n, t, &eps, b_log2, diam_log2, lambda, c, PROVENANCE);
    Ok((bound, cert))
}

pub fn systole_symbolic_bound(n: usize, t: usize, c: f64) -> Result<(SymbolicBound, BoundCertificate)> {
    systole_symbolic_bound_for(Case::Closed, n, t, c)
}

/// `log₂(−log₂ R)` for an explicit `log₂ R < 0`.
pub fn level2_of(log2_r: f64) -> f64 {
    (-log2_r).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margulis::closed_certificate;
    use crate::real::DoubleDouble;

    #[test]
    fn rational_length_examples() {
        assert_eq!(rational_length(0, 1).unwrap(), 1.0);
        assert!((rational_length(1, 1).unwrap() - 1.5849625007211562).abs() < 1e-15);
        assert_eq!(rational_length(3, 2).unwrap(), 3.0);
        assert_eq!(rational_length(-3, 2).unwrap(), 3.0);
        assert!(matches!(rational_length(1, 0), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn solution_size_examples() {
        let p = solution_size_bounds(1, 1, 1, 1.0, 1.0).unwrap();
        assert_eq!(p.phi_degree_log2, 0.0);
        assert_eq!(p.length_bound_log2, 0.0);
        assert_eq!(p.theta_upper.log2_value(), 1.0);

        let p = solution_size_bounds(2, 3, 2, 2.0, 1.0).unwrap();
        assert!((p.length_bound_log2 - 6.169925001442312).abs() < 1e-14);
        assert!((p.theta_upper.log2_value() - 72.0).abs() < 1e-12);
        assert!((p.phi_degree_log2 - 2.0 * 6f64.log2()).abs() < 1e-15);
        assert!(p.alpha_lower.level2 > p.theta_lower.level2);
        assert!(solution_size_bounds(0, 1, 1, 1.0, 1.0).is_err());
        assert!(solution_size_bounds(1, 1, 1, 0.0, 1.0).is_err());
    }

    #[test]
    fn high_precision_length_agrees() {
        for &(n, k, d, m) in &[(2u64, 3u64, 2u64, 2.0), (374, 584, 2, 1.5849625007211562), (9000, 80000, 40, 2.0)] {
            let a = length_bound_log2::<f64>(n, k, d, m, 1.0);
            let b = length_bound_log2::<DoubleDouble>(n, k, d, m, 1.0);
            assert!(((a - b.to_f64()) / a).abs() < 1e-12);
        }
    }

    #[test]
    fn symbolic_lambda_frozen_values() {
        let (b, cert) = systole_symbolic_bound(3, 1, 1.0).unwrap();
        assert!((b.edge_bound_log2 - 128.38196255841365).abs() < 1e-12);
        assert!((b.lambda.level2 - 130.4956914320797).abs() < 1e-12);
        assert_eq!(cert.big_o_constant, Some(1.0));
        assert_eq!(cert.systole_log2_lower_level2, b.lambda.level2);
        let (b, _) = systole_symbolic_bound(4, 2, 1.0).unwrap();
        assert!((b.lambda.level2 - 1539.5287663729449).abs() < 1e-10);
        let (b, _) = systole_symbolic_bound(5, 10, 1.0).unwrap();
        assert!((b.lambda.level2 - 35280.27380865475).abs() < 1e-8);
        let (b, _) = systole_symbolic_bound_for(Case::Cusped, 3, 1, 1.0).unwrap();
        assert!((b.lambda.level2 - 130.4956914320797).abs() < 1e-12);
        for &(n, t) in &[(3, 1), (4, 2), (5, 10)] {
            let a = systole_symbolic_bound(n, t, 1.0).unwrap().0.lambda.level2;
            let dd = symbolic_lambda::<DoubleDouble>(Case::Closed, n, t, 1.0).unwrap().to_f64();
            assert!(((a - dd) / a).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_constant_reduces_to_numeric_chain() {
        let (b, _) = systole_symbolic_bound(3, 5, 0.0).unwrap();
        assert!((b.lambda.level2 - 5.337584772757465).abs() < 1e-12);
        let eps = MargulisConstant::default_for(3).unwrap();
        let cert = closed_certificate(3, 5, 1.0, &eps).unwrap();
        assert!((level2_of(cert.systole_log2_lower.unwrap()) - b.lambda.level2).abs() < 1e-12);
    }

    #[test]
    fn lambda_is_monotone_on_grid() {
        for n in 3..=5 {
            for t in 1..10 {
                let a = systole_symbolic_bound(n, t, 1.0).unwrap().0.lambda.level2;
                let b = systole_symbolic_bound(n, t + 1, 1.0).unwrap().0.lambda.level2;
                assert!(b > a);
                if n < 5 {
                    let c = systole_symbolic_bound(n + 1, t, 1.0).unwrap().0.lambda.level2;
                    assert!(c > a);
                }
            }
        }
    }
}
