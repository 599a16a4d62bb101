use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::poly::{Monomial, Polynomial};
use super::{complexity_profile, ComplexityProfile, GroupKind, PolySystem, Relation, Role, SystemCase, Variable};
use crate::error::{Error, Result};
use crate::real::format_sig;

pub const POLYSYS_FORMAT: &str = "polysys-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemFormat {
    Text,
    Json,
}

impl FromStr for SystemFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" => Ok(SystemFormat::Text),
            "json" => Ok(SystemFormat::Json),
            other => Err(format!("unknown format `{other}` (expected text or json)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSystem {
    format: String,
    case: SystemCase,
    group: GroupKind,
    n: usize,
    t: usize,
    profile: ComplexityProfile,
    variables: Vec<Variable>,
    constraints: Vec<JsonConstraint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonConstraint {
    relation: Relation,
    label: String,
    /// `[coefficient, [[name, exponent], ...]]`.
    terms: Vec<(i64, Vec<(String, u32)>)>,
}

fn format_poly(sys: &PolySystem, p: &Polynomial, out: &mut String) {
    if p.is_zero() {
        out.push('0');
        return;
    }
    for (i, (c, m)) in p.terms().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}{}", if *c < 0 { '-' } else { '+' }, c.unsigned_abs());
        for &(v, e) in m.factors() {
            let _ = if e == 1 { write!(out, "*{}", sys.var_name(v)) } else { write!(out, "*{}^{e}", sys.var_name(v)) };
        }
    }
}

fn role_fields(role: &Role) -> (String, Map<String, Value>) {
    let Value::Object(mut map) = serde_json::to_value(role).expect("role serializes") else { unreachable!() };
    let tag = match map.remove("role") {
        Some(Value::String(s)) => s,
        _ => unreachable!(),
    };
    (tag, map)
}

impl PolySystem {
    pub fn emit(&self, format: SystemFormat) -> String {
        match format {
            SystemFormat::Text => self.to_text(),
            SystemFormat::Json => self.to_json(),
        }
    }

    /// One constraint per line, terms in descending lex order.
    pub fn to_text(&self) -> String {
        let p = complexity_profile(self);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {POLYSYS_FORMAT} case={} group={} n={} t={}",
            self.case,
            self.group.as_str(),
            self.n,
            self.t
        );
        let _ = writeln!(out, "# profile N={} kappa={} d={} M={}", p.n_vars, p.kappa, p.d, format_sig(p.m, 12));
        for v in self.variables() {
            let (tag, fields) = role_fields(&v.role);
            let _ = write!(out, "VAR {} {tag}", v.name);
            for (k, val) in fields {
                match val {
                    Value::String(s) => write!(out, " {k}={s}"),
                    other => write!(out, " {k}={other}"),
                }
                .expect("write to string");
            }
            out.push('\n');
        }
        for c in self.constraints() {
            let _ = write!(out, "REL {}: ", c.relation.as_str());
            format_poly(self, &c.poly, &mut out);
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = JsonSystem {
            format: POLYSYS_FORMAT.to_string(),
            case: self.case,
            group: self.group,
            n: self.n,
            t: self.t,
            profile: complexity_profile(self),
            variables: self.variables().to_vec(),
            constraints: self
                .constraints()
                .iter()
                .map(|c| JsonConstraint {
                    relation: c.relation,
                    label: c.label.clone(),
                    terms: c
                        .poly
                        .terms()
                        .iter()
                        .map(|(k, m)| (*k, m.factors().iter().map(|&(v, e)| (self.var_name(v).to_string(), e)).collect()))
                        .collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string(&doc).expect("system serializes");
        s.push('\n');
        s
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::SystemFormat { line, message: message.into() }
}

fn parse_header(line: &str, lineno: usize) -> Result<PolySystem> {
    let rest = line
        .strip_prefix("# ")
        .and_then(|r| r.strip_prefix(POLYSYS_FORMAT))
        .ok_or_else(|| err(lineno, format!("expected `# {POLYSYS_FORMAT} ...` header")))?;
    let (mut case, mut group, mut n, mut t) = (None, None, None, None);
    for kv in rest.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| err(lineno, format!("bad header field `{kv}`")))?;
        match k {
            "case" => case = Some(v.parse::<SystemCase>().map_err(|e| err(lineno, e))?),
            "group" => {
                group = Some(match v {
                    "lorentz" => GroupKind::Lorentz,
                    "sl2c" => GroupKind::Sl2c,
                    other => return Err(err(lineno, format!("unknown group `{other}`"))),
                })
            }
            "n" => n = Some(v.parse().map_err(|_| err(lineno, "bad n"))?),
            "t" => t = Some(v.parse().map_err(|_| err(lineno, "bad t"))?),
            other => return Err(err(lineno, format!("unknown header field `{other}`"))),
        }
    }
    match (case, group, n, t) {
        (Some(case), Some(group), Some(n), Some(t)) => Ok(PolySystem::new(case, group, n, t)),
        _ => Err(err(lineno, "header needs case, group, n and t")),
    }
}

fn parse_term(sys: &PolySystem, tok: &str, lineno: usize) -> Result<(i64, Monomial)> {
    let sign = match tok.as_bytes().first() {
        Some(b'+') => 1,
        Some(b'-') => -1,
        _ => return Err(err(lineno, format!("term `{tok}` lacks a sign"))),
    };
    let mut parts = tok[1..].split('*');
    let coef: i64 = parts
        .next()
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| err(lineno, format!("term `{tok}` lacks an integer coefficient")))?;
    let mut factors = Vec::new();
    for f in parts {
        let (name, e) = match f.split_once('^') {
            Some((name, e)) => (name, e.parse::<u32>().map_err(|_| err(lineno, format!("bad exponent in `{f}`")))?),
            None => (f, 1),
        };
        let id = sys.var_id(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        factors.push((id, e));
    }
    Ok((sign * coef, Monomial::from_pairs(factors)))
}

fn parse_text(text: &str) -> Result<PolySystem> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (lineno, first) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let mut sys = parse_header(first, lineno)?;
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("VAR ") {
            let mut toks = rest.split_whitespace();
            let name = toks.next().ok_or_else(|| err(lineno, "VAR needs a name"))?;
            let tag = toks.next().ok_or_else(|| err(lineno, "VAR needs a role"))?;
            let mut map = Map::new();
            map.insert("role".into(), Value::String(tag.into()));
            for kv in toks {
                let (k, v) = kv.split_once('=').ok_or_else(|| err(lineno, format!("bad field `{kv}`")))?;
                let val = v.parse::<u64>().map(Value::from).unwrap_or_else(|_| Value::String(v.into()));
                map.insert(k.into(), val);
            }
            let role: Role = serde_json::from_value(Value::Object(map)).map_err(|e| err(lineno, e.to_string()))?;
            if sys.var_id(name).is_some() {
                return Err(err(lineno, format!("variable {name} declared twice")));
            }
            sys.add_variable(name, role).map_err(|e| err(lineno, e.to_string()))?;
        } else if let Some(rest) = line.strip_prefix("REL ") {
            let (kind, body) = rest.split_once(':').ok_or_else(|| err(lineno, "REL needs `kind:`"))?;
            let relation: Relation = kind.trim().parse().map_err(|e: String| err(lineno, e))?;
            let body = body.trim();
            let poly = if body == "0" {
                Polynomial::zero()
            } else {
                let terms = body.split_whitespace().map(|tok| parse_term(&sys, tok, lineno)).collect::<Result<Vec<_>>>()?;
                Polynomial::from_terms(terms)?
            };
            let label = format!("c{}", sys.constraints().len());
            sys.add_constraint(relation, poly, label)?;
        } else {
            return Err(err(lineno, format!("unrecognized line `{line}`")));
        }
    }
    Ok(sys)
}

fn parse_json(text: &str) -> Result<PolySystem> {
    let doc: JsonSystem = serde_json::from_str(text).map_err(|e| Error::syntax(&e))?;
    if doc.format != POLYSYS_FORMAT {
        return Err(err(1, format!("unknown format `{}`", doc.format)));
    }
    let mut sys = PolySystem::new(doc.case, doc.group, doc.n, doc.t);
    for v in doc.variables {
        if sys.var_id(&v.name).is_some() {
            return Err(err(1, format!("variable {} declared twice", v.name)));
        }
        sys.add_variable(v.name, v.role)?;
    }
    for c in doc.constraints {
        let mut terms = Vec::with_capacity(c.terms.len());
        for (k, factors) in c.terms {
            let mut pairs = Vec::with_capacity(factors.len());
            for (name, e) in factors {
                pairs.push((sys.var_id(&name).ok_or(Error::UnknownVariable(name))?, e));
            }
            terms.push((k, Monomial::from_pairs(pairs)));
        }
        sys.add_constraint(c.relation, Polynomial::from_terms(terms)?, c.label)?;
    }
    Ok(sys)
}

/// Reads either emitted format; JSON is recognized by a leading `{`.
pub fn parse_system(text: &str) -> Result<PolySystem> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}
