//! Margulis constants, the tube-radius lower bound and the systole
//! certificate chains for closed and cusped manifolds.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::{BoundCertificate, Case};
use crate::error::{Error, Result};
use crate::uhs::{loxodromic_apply, uhs_distance, LoxodromicNormalForm, UhsPoint};

pub const MEYERHOFF_EPSILON: f64 = 0.052;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MargulisSource {
    Meyerhoff,
    Kellerhals,
    UserSupplied,
}

impl fmt::Display for MargulisSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MargulisSource::Meyerhoff => "meyerhoff",
            MargulisSource::Kellerhals => "kellerhals",
            MargulisSource::UserSupplied => "user_supplied",
        })
    }
}

impl FromStr for MargulisSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "meyerhoff" => Ok(MargulisSource::Meyerhoff),
            "kellerhals" => Ok(MargulisSource::Kellerhals),
            "user" | "user_supplied" | "user-supplied" => Ok(MargulisSource::UserSupplied),
            other => Err(format!("unknown Margulis constant source `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MargulisConstant {
    n: usize,
    value: f64,
    source: MargulisSource,
}

impl MargulisConstant {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn source(&self) -> MargulisSource {
        self.source
    }

    pub fn user_supplied(n: usize, value: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::OutOfRange { name: "epsilon", value, range: "(0, inf)" });
        }
        Ok(MargulisConstant { n, value, source: MargulisSource::UserSupplied })
    }

    /// Meyerhoff for n = 3, Kellerhals otherwise.
    pub fn default_for(n: usize) -> Result<Self> {
        let source = if n == 3 { MargulisSource::Meyerhoff } else { MargulisSource::Kellerhals };
        epsilon_lower(n, source)
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::OutOfRange { name: "n", value: n as f64, range: "[3, inf)" });
    }
    Ok(())
}

/// `(6π)^{−n}`.
pub fn kellerhals_value(n: usize) -> f64 {
    (-(n as f64) * (6.0 * PI).ln()).exp()
}

/// The cited lower bounds for ε_n. `UserSupplied` has no intrinsic value;
/// build it with [`MargulisConstant::user_supplied`].
pub fn epsilon_lower(n: usize, source: MargulisSource) -> Result<MargulisConstant> {
    check_dimension(n)?;
    let value = match source {
        MargulisSource::Meyerhoff if n == 3 => MEYERHOFF_EPSILON,
        MargulisSource::Meyerhoff => {
            return Err(Error::OutOfRange { name: "n", value: n as f64, range: "{3} for Meyerhoff" })
        }
        MargulisSource::Kellerhals => kellerhals_value(n),
        MargulisSource::UserSupplied => {
            return Err(Error::Invariant("a user-supplied epsilon needs an explicit value".into()))
        }
    };
    Ok(MargulisConstant { n, value, source })
}

/// `(1/n) ln(1/R) + ln ε − ln 4`, for `0 < R <= 2ε`.
pub fn tube_radius_lower(r: f64, n: usize, eps: &MargulisConstant) -> Result<f64> {
    check_dimension(n)?;
    if !(r > 0.0 && r <= 2.0 * eps.value) {
        return Err(Error::OutOfRange { name: "R", value: r, range: "(0, 2 epsilon]" });
    }
    Ok(-r.ln() / n as f64 + eps.value.ln() - 4f64.ln())
}

/// `log₂` of the thick-part floor `2ε`.
pub fn thick_floor_log2(eps: &MargulisConstant) -> f64 {
    (2.0 * eps.value).log2()
}

/// `log₂ R` for the `R` at which the tube radius equals `diam`:
/// `−n (diam − ln(ε/4)) / ln 2`. Never above the thick floor.
pub fn systole_lower_from_diameter(diam: f64, n: usize, eps: &MargulisConstant) -> f64 {
    let formula = -(n as f64) * (diam - (eps.value / 4.0).ln()) / LN_2;
    formula.min(thick_floor_log2(eps))
}

/// Reach of the 1-skeleton image in the cusped chain: `tB + ln(tB/ε)`,
/// with the logarithm clamped to 0 when `tB <= ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reach {
    pub bound: f64,
    pub d0: f64,
    pub clamped: bool,
}

pub fn cusped_reach_bound(t: usize, b: f64, eps: &MargulisConstant) -> Reach {
    let tb = t as f64 * b;
    if tb > eps.value {
        let d0 = (tb / eps.value).ln();
        Reach { bound: tb + d0, d0, clamped: false }
    } else {
        Reach { bound: tb, d0: 0.0, clamped: true }
    }
}

fn check_chain_inputs(n: usize, t: usize, b: f64, eps: &MargulisConstant) -> Result<()> {
    check_dimension(n)?;
    if t == 0 {
        return Err(Error::OutOfRange { name: "t", value: 0.0, range: "[1, inf)" });
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::OutOfRange { name: "B", value: b, range: "(0, inf)" });
    }
    if eps.n != n {
        return Err(Error::DimensionMismatch { expected: n, found: eps.n });
    }
    Ok(())
}

pub fn closed_certificate(n: usize, t: usize, b: f64, eps: &MargulisConstant) -> Result<BoundCertificate> {
    check_chain_inputs(n, t, b, eps)?;
    let diam = t as f64 * b;
    Ok(BoundCertificate::numeric(Case::Closed, n, t, eps, b, diam, None))
}

pub fn cusped_certificate(n: usize, t: usize, b: f64, eps: &MargulisConstant) -> Result<BoundCertificate> {
    check_chain_inputs(n, t, b, eps)?;
    let reach = cusped_reach_bound(t, b, eps);
    Ok(BoundCertificate::numeric(Case::Cusped, n, t, eps, b, reach.bound, Some(reach)))
}

/// `min_{1<=k<=kmax} d(x, φ^k x)`, exhaustively.
pub fn min_displacement_oracle(phi: &LoxodromicNormalForm, x: &UhsPoint, kmax: u64) -> Result<f64> {
    if kmax == 0 {
        return Err(Error::OutOfRange { name: "kmax", value: 0.0, range: "[1, inf)" });
    }
    let mut best = f64::INFINITY;
    for_each_power(phi, x, kmax, |_, d| {
        best = best.min(d);
        false
    })?;
    Ok(best)
}

/// First `k <= kmax` with `d(x, φ^k x) < threshold`, if any. Equivalent to
/// asking whether the exhaustive minimum is below `threshold`.
pub fn displacement_witness(
    phi: &LoxodromicNormalForm,
    x: &UhsPoint,
    kmax: u64,
    threshold: f64,
) -> Result<Option<(u64, f64)>> {
    let mut found = None;
    for_each_power(phi, x, kmax, |k, d| {
        if d < threshold {
            found = Some((k, d));
            true
        } else {
            false
        }
    })?;
    Ok(found)
}

/// Walks `φ^k x` for `k = 1..=kmax`, stopping early when `f` returns true.
/// Rotations are accumulated one step at a time; the height is recomputed
/// from `k` to avoid drift.
fn for_each_power(
    phi: &LoxodromicNormalForm,
    x: &UhsPoint,
    kmax: u64,
    mut f: impl FnMut(u64, f64) -> bool,
) -> Result<()> {
    if x.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), found: x.dim() });
    }
    if kmax <= 8 {
        for k in 1..=kmax {
            let d = uhs_distance(x, &loxodromic_apply(phi, x, k)?)?;
            if f(k, d) {
                break;
            }
        }
        return Ok(());
    }
    let a = phi.rotation();
    let r = phi.translation_length();
    let h = x.height();
    let origin = x.horizontal();
    let mut rotated = origin.to_vec();
    for k in 1..=kmax {
        rotated = a.mul_vec(&rotated);
        let s = (k as f64 * r).exp();
        let mut sq = (h * s - h) * (h * s - h);
        for (p, q) in rotated.iter().zip(origin) {
            let v = p * s - q;
            sq += v * v;
        }
        let d = crate::real::Real::acosh_1p(sq / (2.0 * h * h * s));
        if f(k, d) {
            break;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    const KELLERHALS: [f64; 8] = [
        1.4931265941296059807603e-4,
        7.9212826039230981397784e-6,
        4.2023709401406706180919e-7,
        2.2294270260970771092461e-8,
        1.1827477715533792164136e-9,
        6.2746718091214698080828e-11,
        3.3288167823368249337347e-12,
        1.7659921518538783835182e-13,
    ];

    fn meyerhoff() -> MargulisConstant {
        epsilon_lower(3, MargulisSource::Meyerhoff).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(meyerhoff().value(), 0.052);
        for (i, want) in KELLERHALS.iter().enumerate() {
            let got = epsilon_lower(i + 3, MargulisSource::Kellerhals).unwrap().value();
            assert!((got / want - 1.0).abs() < 1e-13, "n = {}", i + 3);
        }
        assert!(epsilon_lower(4, MargulisSource::Meyerhoff).is_err());
        assert!(epsilon_lower(2, MargulisSource::Kellerhals).is_err());
        assert_eq!(MargulisConstant::default_for(5).unwrap().source(), MargulisSource::Kellerhals);
        assert!(MargulisConstant::user_supplied(3, -1.0).is_err());
    }

    #[test]
    fn tube_radius_examples() {
        let eps = meyerhoff();
        let v = tube_radius_lower((-20f64).exp(), 3, &eps).unwrap();
        assert!((v - 2.3238607451460663506662).abs() < 1e-12);
        let v = tube_radius_lower(0.1, 3, &eps).unwrap();
        assert!((v + 3.5752775571892517546612).abs() < 1e-12);
        let zero = (eps.value() / 4.0).powi(3);
        assert!(tube_radius_lower(zero, 3, &eps).unwrap().abs() < 1e-12);
        assert!(tube_radius_lower(0.2, 3, &eps).is_err());
        assert!(tube_radius_lower(0.0, 3, &eps).is_err());
    }

    #[test]
    fn systole_from_diameter() {
        let eps = meyerhoff();
        let v = systole_lower_from_diameter(10.0, 3, &eps);
        assert!((v + 62.076884926231886870440).abs() < 1e-12);
        let at_zero = systole_lower_from_diameter(0.0, 3, &eps);
        assert!((at_zero - 3.0 * (eps.value() / 4.0).log2()).abs() < 1e-12);
        assert!(systole_lower_from_diameter(11.0, 3, &eps) < v);
    }

    #[test]
    fn reach_examples() {
        let eps = meyerhoff();
        let r = cusped_reach_bound(5, 2.0, &eps);
        assert!((r.bound - 15.259096653394755381184).abs() < 1e-12);
        assert!(!r.clamped);
        let edge = cusped_reach_bound(1, 0.052, &eps);
        assert_eq!((edge.bound, edge.d0, edge.clamped), (0.052, 0.0, true));
    }

    #[test]
    fn displacement_on_axis() {
        let x = UhsPoint::on_axis(3, 1.7).unwrap();
        let phi = LoxodromicNormalForm::new(0.3, Matrix::identity(2)).unwrap();
        assert!((min_displacement_oracle(&phi, &x, 20).unwrap() - 0.3).abs() < 1e-12);
        let (c, s) = (1.1f64.cos(), 1.1f64.sin());
        let rot = Matrix::from_rows(2, 2, vec![c, -s, s, c]).unwrap();
        let phi = LoxodromicNormalForm::new(0.3, rot).unwrap();
        assert!((min_displacement_oracle(&phi, &x, 5).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(displacement_witness(&phi, &x, 50, 0.31).unwrap().map(|w| w.0), Some(1));
    }

    #[test]
    fn incremental_walk_matches_direct() {
        let (c, s) = (0.4f64.cos(), 0.4f64.sin());
        let rot = Matrix::from_rows(2, 2, vec![c, -s, s, c]).unwrap();
        let phi = LoxodromicNormalForm::new(1e-3, rot).unwrap();
        let x = UhsPoint::new(vec![0.8, -0.3, 0.5]).unwrap();
        let mut walked = Vec::new();
        for_each_power(&phi, &x, 40, |_, d| {
            walked.push(d);
            false
        })
        .unwrap();
        for (k, d) in walked.iter().enumerate() {
            let direct = uhs_distance(&x, &loxodromic_apply(&phi, &x, k as u64 + 1).unwrap()).unwrap();
            assert!((d - direct).abs() < 1e-11);
        }
    }
}
