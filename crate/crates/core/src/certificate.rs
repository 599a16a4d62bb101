//! The `cert-v1` record: one flat JSON object holding the whole chain from
//! ε through the edge bound to the systole lower bound.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::margulis::{
    epsilon_lower, systole_lower_from_diameter, thick_floor_log2, MargulisConstant, MargulisSource, Reach,
};

pub const CERT_SCHEMA: &str = "cert-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Closed,
    Cusped,
}

/// Values too large for a double are `None`; their `_log2` companions are
/// always present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct BoundCertificate {
    pub schema: String,
    pub case: Case,
    pub n: usize,
    pub t: usize,
    pub epsilon: f64,
    pub epsilon_source: MargulisSource,
    pub edge_bound_B: Option<f64>,
    pub edge_bound_B_log2: f64,
    pub diameter_bound: Option<f64>,
    pub diameter_bound_log2: f64,
    pub reach_d0: Option<f64>,
    pub reach_d0_clamped: bool,
    pub tube_radius_formula_value: Option<f64>,
    pub systole_log2_lower: Option<f64>,
    pub systole_log2_lower_level2: f64,
    pub thick_floor_log2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_o_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl BoundCertificate {
    /// A certificate for an explicit edge bound `b`. `diam` is `t·b` in
    /// the closed case and the reach bound in the cusped case.
    pub(crate) fn numeric(
        case: Case,
        n: usize,
        t: usize,
        eps: &MargulisConstant,
        b: f64,
        diam: f64,
        reach: Option<Reach>,
    ) -> Self {
        let systole = systole_lower_from_diameter(diam, n, eps);
        BoundCertificate {
            schema: CERT_SCHEMA.to_string(),
            case,
            n,
            t,
            epsilon: eps.value(),
            epsilon_source: eps.source(),
            edge_bound_B: Some(b),
            edge_bound_B_log2: b.log2(),
            diameter_bound: Some(diam),
            diameter_bound_log2: diam.log2(),
            reach_d0: reach.map(|r| r.d0),
            reach_d0_clamped: reach.is_some_and(|r| r.clamped),
            tube_radius_formula_value: Some(tube_radius_at(systole, n, eps.value())),
            systole_log2_lower: Some(systole),
            systole_log2_lower_level2: (-systole).log2(),
            thick_floor_log2: thick_floor_log2(eps),
            big_o_constant: None,
            provenance: None,
        }
    }

    /// A certificate whose magnitudes are known only through logarithms.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn symbolic(
        case: Case,
        n: usize,
        t: usize,
        eps: &MargulisConstant,
        b_log2: f64,
        diam_log2: f64,
        systole_level2: f64,
        c: f64,
        provenance: &str,
    ) -> Self {
        let systole = finite_or_none(-systole_level2.exp2());
        BoundCertificate {
            schema: CERT_SCHEMA.to_string(),
            case,
            n,
            t,
            epsilon: eps.value(),
            epsilon_source: eps.source(),
            edge_bound_B: finite_or_none(b_log2.exp2()),
            edge_bound_B_log2: b_log2,
            diameter_bound: finite_or_none(diam_log2.exp2()),
            diameter_bound_log2: diam_log2,
            reach_d0: None,
            reach_d0_clamped: false,
            tube_radius_formula_value: systole.map(|s| tube_radius_at(s, n, eps.value())).and_then(finite_or_none),
            systole_log2_lower: systole,
            systole_log2_lower_level2: systole_level2,
            thick_floor_log2: (2.0 * eps.value()).log2(),
            big_o_constant: Some(c),
            provenance: Some(provenance.to_string()),
        }
    }

    pub fn margulis_constant(&self) -> Result<MargulisConstant> {
        match self.epsilon_source {
            MargulisSource::UserSupplied => MargulisConstant::user_supplied(self.n, self.epsilon),
            source => {
                let eps = epsilon_lower(self.n, source)?;
                if eps.value() != self.epsilon {
                    return Err(Error::Invariant(format!(
                        "epsilon {} does not match its source {}",
                        self.epsilon, source
                    )));
                }
                Ok(eps)
            }
        }
    }

    /// Recomputes `systole_log2_lower` from `n`, `epsilon` and the diameter.
    pub fn rederive_systole_log2(&self) -> Result<f64> {
        let eps = self.margulis_constant()?;
        let diam = self
            .diameter_bound
            .ok_or_else(|| Error::Invariant("diameter bound is only known in log space".into()))?;
        Ok(systole_lower_from_diameter(diam, self.n, &eps))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cert: BoundCertificate = serde_json::from_str(text).map_err(|e| Error::syntax(&e))?;
        if cert.schema != CERT_SCHEMA {
            return Err(Error::Invariant(format!("unsupported schema `{}`", cert.schema)));
        }
        Ok(cert)
    }
}

/// Tube radius `(1/n) ln(1/R) + ln ε − ln 4` at `log₂ R = systole_log2`.
fn tube_radius_at(systole_log2: f64, n: usize, eps: f64) -> f64 {
    -systole_log2 * LN_2 / n as f64 + eps.ln() - 4f64.ln()
}
