//! Polynomial systems whose real solutions are cocycles on a triangulation,
//! extended by developed vertex coordinates and edge-length variables.

mod assign;
mod build;
mod emit;
pub mod poly;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangulation::VertexId;
pub use assign::{lorentz_assignment, sl2c_assignment, Assignment};
pub use build::{build_closed_system, build_cusped_system};
pub use emit::{parse_system, SystemFormat, POLYSYS_FORMAT};
pub use poly::{ComplexPoly, Monomial, Polynomial, VarId};

/// Relation `f > 0`, `f ≥ 0` or `f = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Gt,
    Ge,
    Eq,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Gt => "gt",
            Relation::Ge => "ge",
            Relation::Eq => "eq",
        }
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gt" => Ok(Relation::Gt),
            "ge" => Ok(Relation::Ge),
            "eq" => Ok(Relation::Eq),
            other => Err(format!("unknown relation `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Re,
    Im,
}

/// What a variable stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    /// Entry `(row, col)` of the matrix on `tail→head` (orientation 0) or
    /// `head→tail` (orientation 1); complex entries carry a part.
    EdgeEntry {
        tail: VertexId,
        head: VertexId,
        orientation: u8,
        row: usize,
        col: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        part: Option<Part>,
    },
    /// Coordinate of the developed image of a vertex.
    VertexCoord { vertex: VertexId, axis: usize },
    /// Coordinate of the far endpoint of the lift of a non-tree edge.
    LiftCoord { tail: VertexId, head: VertexId, axis: usize },
    /// `cosh(length) − 1` of an edge.
    EdgeC { tail: VertexId, head: VertexId },
    /// Homogeneous coordinate of the fixed point shared by a cusp group.
    CuspFixed { vertex: VertexId, axis: usize },
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    #[serde(flatten)]
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub relation: Relation,
    pub poly: Polynomial,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemCase {
    Closed,
    Cusped,
}

impl fmt::Display for SystemCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemCase::Closed => "closed",
            SystemCase::Cusped => "cusped",
        })
    }
}

impl FromStr for SystemCase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "closed" => Ok(SystemCase::Closed),
            "cusped" => Ok(SystemCase::Cusped),
            other => Err(format!("unknown case `{other}` (expected closed or cusped)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Lorentz,
    Sl2c,
}

impl GroupKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupKind::Lorentz => "lorentz",
            GroupKind::Sl2c => "sl2c",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem {
    pub case: SystemCase,
    pub group: GroupKind,
    pub n: usize,
    pub t: usize,
    variables: Vec<Variable>,
    index: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
}

impl PolySystem {
    pub fn new(case: SystemCase, group: GroupKind, n: usize, t: usize) -> Self {
        PolySystem { case, group, n, t, variables: Vec::new(), index: HashMap::new(), constraints: Vec::new() }
    }

    /// Registers a variable, returning its id; re-registering a name with
    /// the same role returns the existing id.
    pub fn add_variable(&mut self, name: impl Into<String>, role: Role) -> Result<VarId> {
        let name = name.into();
        if let Some(&id) = self.index.get(&name) {
            if self.variables[id as usize].role == role {
                return Ok(id);
            }
            return Err(Error::Invariant(format!("variable {name} registered with two roles")));
        }
        if !valid_name(&name) {
            return Err(Error::Invariant(format!("invalid variable name `{name}`")));
        }
        let id = self.variables.len() as VarId;
        self.index.insert(name.clone(), id);
        self.variables.push(Variable { name, role });
        Ok(id)
    }

    /// Adds a constraint; every variable it mentions must be registered.
    pub fn add_constraint(&mut self, relation: Relation, poly: Polynomial, label: impl Into<String>) -> Result<()> {
        if let Some(v) = poly.variables().find(|&v| v as usize >= self.variables.len()) {
            return Err(Error::UnknownVariable(format!("#{v}")));
        }
        self.constraints.push(Constraint { relation, poly, label: label.into() });
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn var_name(&self, id: VarId) -> &str {
        &self.variables[id as usize].name
    }

    pub fn count(&self, relation: Relation) -> usize {
        self.constraints.iter().filter(|c| c.relation == relation).count()
    }

    /// Constraints whose label starts with `prefix`.
    pub fn count_labeled(&self, prefix: &str) -> usize {
        self.constraints.iter().filter(|c| c.label.starts_with(prefix)).count()
    }

    /// Each equality replaced by the pair `f ≥ 0`, `−f ≥ 0`.
    pub fn split_equalities(&self) -> PolySystem {
        let mut out = PolySystem { constraints: Vec::new(), ..self.clone() };
        for c in &self.constraints {
            if c.relation == Relation::Eq {
                out.constraints.push(Constraint { relation: Relation::Ge, poly: c.poly.clone(), label: format!("{}+", c.label) });
                out.constraints.push(Constraint { relation: Relation::Ge, poly: c.poly.neg(), label: format!("{}-", c.label) });
            } else {
                out.constraints.push(c.clone());
            }
        }
        out
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `(N, κ, d, M)` of a system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    #[serde(rename = "N")]
    pub n_vars: usize,
    pub kappa: usize,
    pub d: u32,
    /// Largest coefficient length `log₂(|c| + 2)`.
    #[serde(rename = "M")]
    pub m: f64,
}

impl ComplexityProfile {
    /// Each measure divided by `t`.
    pub fn per_t(&self, t: usize) -> [f64; 4] {
        let t = t.max(1) as f64;
        [self.n_vars as f64 / t, self.kappa as f64 / t, self.d as f64 / t, self.m / t]
    }
}

pub fn complexity_profile(sys: &PolySystem) -> ComplexityProfile {
    let max_coef = sys.constraints.iter().map(|c| c.poly.max_abs_coefficient()).max();
    ComplexityProfile {
        n_vars: sys.variables.len(),
        kappa: sys.constraints.len(),
        d: sys.constraints.iter().map(|c| c.poly.degree()).max().unwrap_or(0),
        m: max_coef.map_or(0.0, |c| (c as f64 + 2.0).log2()),
    }
}

/// Bounds for closed systems: `N ≤ (n+2)⁴t`, `κ ≤ (n+2)⁵t`, `d ≤ (n+1)²t`, `M ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedBounds {
    pub n_vars_max: u64,
    pub kappa_max: u64,
    pub d_max: u64,
    pub m_max: f64,
    pub holds: bool,
}

pub fn closed_bounds(profile: &ComplexityProfile, n: usize, t: usize) -> ClosedBounds {
    let (n, t) = (n as u64, t as u64);
    let n_vars_max = (n + 2).pow(4) * t;
    let kappa_max = (n + 2).pow(5) * t;
    let d_max = (n + 1).pow(2) * t;
    let holds = profile.n_vars as u64 <= n_vars_max
        && profile.kappa as u64 <= kappa_max
        && profile.d as u64 <= d_max
        && profile.m <= 2.0;
    ClosedBounds { n_vars_max, kappa_max, d_max, m_max: 2.0, holds }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualThresholds {
    /// Largest accepted `|f|` for equalities.
    pub eq_tol: f64,
    /// Strict constraints need `f > strict_min`.
    pub strict_min: f64,
    /// Non-strict constraints need `f ≥ −nonneg_tol`.
    pub nonneg_tol: f64,
}

impl Default for ResidualThresholds {
    fn default() -> Self {
        ResidualThresholds { eq_tol: 1e-7, strict_min: 0.0, nonneg_tol: 1e-7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintValue {
    pub index: usize,
    pub label: String,
    pub relation: Relation,
    pub value: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub thresholds: ResidualThresholds,
    pub values: Vec<ConstraintValue>,
    pub max_eq_residual: f64,
    /// Label of the equality with the largest `|f|`.
    pub worst_eq: Option<String>,
    pub min_strict: Option<f64>,
    pub min_nonneg: Option<f64>,
    pub failing: usize,
    pub passes: bool,
}

impl ResidualReport {
    pub fn failing_labels(&self) -> impl Iterator<Item = &str> {
        self.values.iter().filter(|v| !v.satisfied).map(|v| v.label.as_str())
    }
}

/// Signed value of every constraint at `assignment`.
pub fn eval_residuals(
    sys: &PolySystem,
    assignment: &BTreeMap<String, f64>,
    thresholds: ResidualThresholds,
) -> Result<ResidualReport> {
    let values: Vec<f64> = sys
        .variables
        .iter()
        .map(|v| assignment.get(&v.name).copied().ok_or_else(|| Error::MissingVariable(v.name.clone())))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(sys.constraints.len());
    let (mut max_eq, mut worst_eq) = (0.0f64, None);
    let (mut min_strict, mut min_nonneg) = (None::<f64>, None::<f64>);
    for (index, c) in sys.constraints.iter().enumerate() {
        let value = c.poly.eval(&values);
        let satisfied = match c.relation {
            Relation::Eq => {
                if value.abs() > max_eq || (worst_eq.is_none() && value.abs() >= max_eq) {
                    max_eq = value.abs();
                    worst_eq = Some(c.label.clone());
                }
                value.abs() <= thresholds.eq_tol
            }
            Relation::Gt => {
                min_strict = Some(min_strict.map_or(value, |m| m.min(value)));
                value > thresholds.strict_min
            }
            Relation::Ge => {
                min_nonneg = Some(min_nonneg.map_or(value, |m| m.min(value)));
                value >= -thresholds.nonneg_tol
            }
        };
        out.push(ConstraintValue { index, label: c.label.clone(), relation: c.relation, value, satisfied });
    }
    let failing = out.iter().filter(|v| !v.satisfied).count();
    Ok(ResidualReport {
        thresholds,
        values: out,
        max_eq_residual: max_eq,
        worst_eq,
        min_strict,
        min_nonneg,
        failing,
        passes: failing == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_examples() {
        let empty = PolySystem::new(SystemCase::Closed, GroupKind::Lorentz, 3, 1);
        let p = complexity_profile(&empty);
        assert_eq!((p.n_vars, p.kappa, p.d, p.m), (0, 0, 0, 0.0));

        let mut s = PolySystem::new(SystemCase::Closed, GroupKind::Lorentz, 3, 1);
        let x = s.add_variable("x", Role::Auxiliary).unwrap();
        let f = Polynomial::var(x).mul(&Polynomial::var(x)).unwrap().sub(&Polynomial::constant(1)).unwrap();
        s.add_constraint(Relation::Ge, f, "f").unwrap();
        let p = complexity_profile(&s);
        assert_eq!((p.n_vars, p.kappa, p.d), (1, 1, 2));
        assert!((p.m - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn registry_rules() {
        let mut s = PolySystem::new(SystemCase::Closed, GroupKind::Lorentz, 3, 1);
        assert_eq!(s.add_variable("x", Role::Auxiliary).unwrap(), 0);
        assert_eq!(s.add_variable("x", Role::Auxiliary).unwrap(), 0);
        assert!(s.add_variable("x", Role::EdgeC { tail: 0, head: 1 }).is_err());
        assert!(s.add_variable("1x", Role::Auxiliary).is_err());
        assert!(s.add_constraint(Relation::Eq, Polynomial::var(5), "bad").is_err());
    }

    #[test]
    fn residuals_and_splitting() {
        let mut s = PolySystem::new(SystemCase::Closed, GroupKind::Lorentz, 3, 1);
        let x = s.add_variable("x", Role::Auxiliary).unwrap();
        let y = s.add_variable("y", Role::Auxiliary).unwrap();
        s.add_constraint(Relation::Eq, Polynomial::var(x).sub(&Polynomial::constant(2)).unwrap(), "x=2").unwrap();
        s.add_constraint(Relation::Gt, Polynomial::var(y), "y>0").unwrap();
        let a = BTreeMap::from([("x".to_string(), 2.0), ("y".to_string(), 0.0)]);
        let r = eval_residuals(&s, &a, ResidualThresholds::default()).unwrap();
        assert!(!r.passes);
        assert_eq!(r.failing_labels().collect::<Vec<_>>(), vec!["y>0"]);
        assert_eq!(r.min_strict, Some(0.0));
        let missing = BTreeMap::from([("x".to_string(), 2.0)]);
        assert!(matches!(eval_residuals(&s, &missing, ResidualThresholds::default()), Err(Error::MissingVariable(v)) if v == "y"));

        let split = s.split_equalities();
        assert_eq!(split.constraints().len(), 3);
        assert_eq!(split.count(Relation::Ge), 2);
        let ps = complexity_profile(&split);
        let p = complexity_profile(&s);
        assert_eq!((ps.n_vars, ps.d, ps.m), (p.n_vars, p.d, p.m));
        assert!(ps.kappa <= 2 * p.kappa);
    }
}
