use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use serde::Deserialize;
use serde_json::Value;

use super::{Cocycle, LorentzGroup, Sl2cGroup};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::triangulation::{Triangulation, VertexId};

pub const COC_FORMAT: &str = "coc-v1";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCocycle {
    format: String,
    group: String,
    n: usize,
    values: serde_json::Map<String, Value>,
}

/// A cocycle file, with the group determined at load time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyCocycle {
    Lorentz(Cocycle<LorentzGroup<f64>>),
    Sl2c(Cocycle<Sl2cGroup<f64>>),
}

fn parse_key(key: &str) -> Result<(VertexId, VertexId)> {
    let bad = || Error::CocycleFormat(format!("edge key `{key}` is not of the form tail-head"));
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    let u = a.parse().map_err(|_| bad())?;
    let v = b.parse().map_err(|_| bad())?;
    if u >= v {
        return Err(Error::CocycleFormat(format!("edge key `{key}` must have tail < head")));
    }
    Ok((u, v))
}

fn number(v: &Value, key: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::CocycleFormat(format!("edge {key}: entry {v} is not a number")))
}

fn entries<'a>(v: &'a Value, key: &str, len: usize) -> Result<&'a Vec<Value>> {
    let arr = v.as_array().ok_or_else(|| Error::CocycleFormat(format!("edge {key}: value is not an array")))?;
    if arr.len() != len {
        return Err(Error::CocycleFormat(format!("edge {key}: expected {len} entries, found {}", arr.len())));
    }
    Ok(arr)
}

impl AnyCocycle {
    pub fn parse(tri: &Triangulation, text: &str) -> Result<Self> {
        let raw: RawCocycle = serde_json::from_str(text).map_err(|e| Error::syntax(&e))?;
        if raw.format != COC_FORMAT {
            return Err(Error::CocycleFormat(format!("unknown format `{}`", raw.format)));
        }
        if raw.n != tri.dim() {
            return Err(Error::DimensionMismatch { expected: tri.dim(), found: raw.n });
        }
        match raw.group.as_str() {
            "lorentz" => {
                let k = raw.n + 1;
                let mut values = BTreeMap::new();
                for (key, v) in &raw.values {
                    let arr = entries(v, key, k * k)?;
                    let data = arr.iter().map(|x| number(x, key)).collect::<Result<Vec<_>>>()?;
                    values.insert(parse_key(key)?, Matrix::from_rows(k, k, data)?);
                }
                Ok(AnyCocycle::Lorentz(Cocycle::new(tri, LorentzGroup::new(raw.n), values)?))
            }
            "sl2c" => {
                if raw.n != 3 {
                    return Err(Error::CocycleFormat(format!("sl2c cocycles need n = 3, found {}", raw.n)));
                }
                let mut values = BTreeMap::new();
                for (key, v) in &raw.values {
                    let arr = entries(v, key, 4)?;
                    let mut data = Vec::with_capacity(4);
                    for z in arr {
                        let pair = entries(z, key, 2)?;
                        data.push(Complex::new(number(&pair[0], key)?, number(&pair[1], key)?));
                    }
                    values.insert(parse_key(key)?, Matrix::from_rows(2, 2, data)?);
                }
                Ok(AnyCocycle::Sl2c(Cocycle::new(tri, Sl2cGroup::new(), values)?))
            }
            other => Err(Error::CocycleFormat(format!("unknown group `{other}`"))),
        }
    }

    pub fn group_name(&self) -> &'static str {
        match self {
            AnyCocycle::Lorentz(_) => "lorentz",
            AnyCocycle::Sl2c(_) => "sl2c",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyCocycle::Lorentz(a) => a.dim(),
            AnyCocycle::Sl2c(_) => 3,
        }
    }

    /// Canonical text: one edge per line, edges in numeric order.
    pub fn to_json(&self) -> String {
        let rows: Vec<(String, String)> = match self {
            AnyCocycle::Lorentz(a) => a
                .values()
                .iter()
                .map(|(&(u, v), m)| (format!("{u}-{v}"), serde_json::to_string(m.entries()).expect("finite")))
                .collect(),
            AnyCocycle::Sl2c(a) => a
                .values()
                .iter()
                .map(|(&(u, v), m)| {
                    let pairs: Vec<[f64; 2]> = m.entries().iter().map(|z| [z.re, z.im]).collect();
                    (format!("{u}-{v}"), serde_json::to_string(&pairs).expect("finite"))
                })
                .collect(),
        };
        let mut out = String::new();
        let _ = write!(out, "{{\"format\":\"{COC_FORMAT}\",\"group\":\"{}\",\"n\":{},\"values\":{{", self.group_name(), self.dim());
        for (i, (k, v)) in rows.iter().enumerate() {
            let sep = if i + 1 < rows.len() { "," } else { "" };
            let _ = write!(out, "\n  \"{k}\":{v}{sep}");
        }
        out.push_str(if rows.is_empty() { "}}\n" } else { "\n}}\n" });
        out
    }
}

impl From<Cocycle<LorentzGroup<f64>>> for AnyCocycle {
    fn from(a: Cocycle<LorentzGroup<f64>>) -> Self {
        AnyCocycle::Lorentz(a)
    }
}

impl From<Cocycle<Sl2cGroup<f64>>> for AnyCocycle {
    fn from(a: Cocycle<Sl2cGroup<f64>>) -> Self {
        AnyCocycle::Sl2c(a)
    }
}
