use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};

pub type VarId = u32;

/// Expansions that would exceed this many intermediate terms are refused.
pub const MAX_EXPANSION_TERMS: usize = 5_000_000;

/// Sparse monomial: `(variable, exponent)` pairs, ascending variable id,
/// exponents positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Builds from arbitrary pairs, merging repeats and dropping zero exponents.
    pub fn from_pairs(mut pairs: Vec<(VarId, u32)>) -> Self {
        pairs.sort_unstable_by_key(|p| p.0);
        let mut out: Vec<(VarId, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        out.retain(|p| p.1 > 0);
        Monomial(out)
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Pure lexicographic order with variable 0 most significant;
    /// `Greater` means `self` comes first when sorting descending.
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        // The side holding the smaller variable has a
                        // positive exponent where the other has zero.
                        return if va < vb { Ordering::Greater } else { Ordering::Less };
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

/// Polynomial with exact integer coefficients, terms kept in descending
/// lex order with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: Vec<(i64, Monomial)>,
}

fn overflow(what: &str) -> Error {
    Error::Invariant(format!("integer coefficient overflow in {what}"))
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn constant(c: i64) -> Self {
        Self::from_terms(vec![(c, Monomial::one())]).expect("single term")
    }

    pub fn var(v: VarId) -> Self {
        Polynomial { terms: vec![(1, Monomial::var(v))] }
    }

    /// Collects like terms and sorts.
    pub fn from_terms(terms: Vec<(i64, Monomial)>) -> Result<Self> {
        let mut acc: HashMap<Monomial, i64> = HashMap::with_capacity(terms.len());
        for (c, m) in terms {
            let slot = acc.entry(m).or_insert(0);
            *slot = slot.checked_add(c).ok_or_else(|| overflow("collection"))?;
        }
        let mut terms: Vec<(i64, Monomial)> = acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (c, m)).collect();
        terms.sort_by(|a, b| b.1.lex_cmp(&a.1));
        Ok(Polynomial { terms })
    }

    pub fn terms(&self) -> &[(i64, Monomial)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.1.degree()).max().unwrap_or(0)
    }

    pub fn variables(&self) -> impl Iterator<Item = VarId> + '_ {
        self.terms.iter().flat_map(|t| t.1.factors().iter().map(|f| f.0))
    }

    pub fn add(&self, other: &Polynomial) -> Result<Self> {
        Self::from_terms(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial { terms: self.terms.iter().map(|(c, m)| (-c, m.clone())).collect() }
    }

    pub fn scale(&self, k: i64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(c, m)| c.checked_mul(k).map(|c| (c, m.clone())).ok_or_else(|| overflow("scaling")))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(terms)
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Self> {
        let work = self.terms.len().saturating_mul(other.terms.len());
        if work > MAX_EXPANSION_TERMS {
            return Err(Error::ExpansionTooLarge { what: "polynomial product".into(), terms: work as f64 });
        }
        let mut acc: HashMap<Monomial, i64> = HashMap::with_capacity(work.min(1 << 16));
        for (a, ma) in &self.terms {
            for (b, mb) in &other.terms {
                let c = a.checked_mul(*b).ok_or_else(|| overflow("product"))?;
                let slot = acc.entry(ma.mul(mb)).or_insert(0);
                *slot = slot.checked_add(c).ok_or_else(|| overflow("product"))?;
            }
        }
        let mut terms: Vec<(i64, Monomial)> = acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (c, m)).collect();
        terms.sort_by(|a, b| b.1.lex_cmp(&a.1));
        Ok(Polynomial { terms })
    }

    /// Evaluates with `values[v]` for variable `v`.
    pub fn eval(&self, values: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (c, m) in &self.terms {
            let mut p = *c as f64;
            for &(v, e) in m.factors() {
                p *= values[v as usize].powi(e as i32);
            }
            sum += p;
        }
        sum
    }

    pub fn max_abs_coefficient(&self) -> u64 {
        self.terms.iter().map(|t| t.0.unsigned_abs()).max().unwrap_or(0)
    }
}

/// `Σ_k a_k b_k` over paired slices.
pub fn dot(a: &[Polynomial], b: &[Polynomial]) -> Result<Polynomial> {
    let mut acc = Polynomial::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc.add(&x.mul(y)?)?;
    }
    Ok(acc)
}

/// Complex polynomial as a pair of real polynomials; `i² = −1` is applied
/// in the product formula.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComplexPoly {
    pub re: Polynomial,
    pub im: Polynomial,
}

impl ComplexPoly {
    pub fn new(re: Polynomial, im: Polynomial) -> Self {
        ComplexPoly { re, im }
    }

    pub fn real(c: i64) -> Self {
        ComplexPoly { re: Polynomial::constant(c), im: Polynomial::zero() }
    }

    pub fn add(&self, o: &ComplexPoly) -> Result<Self> {
        Ok(ComplexPoly { re: self.re.add(&o.re)?, im: self.im.add(&o.im)? })
    }

    pub fn sub(&self, o: &ComplexPoly) -> Result<Self> {
        Ok(ComplexPoly { re: self.re.sub(&o.re)?, im: self.im.sub(&o.im)? })
    }

    pub fn mul(&self, o: &ComplexPoly) -> Result<Self> {
        let work = (self.re.len() + self.im.len()).saturating_mul(o.re.len() + o.im.len());
        if work > MAX_EXPANSION_TERMS {
            return Err(Error::ExpansionTooLarge { what: "complex product".into(), terms: work as f64 });
        }
        let re = self.re.mul(&o.re)?.sub(&self.im.mul(&o.im)?)?;
        let im = self.re.mul(&o.im)?.add(&self.im.mul(&o.re)?)?;
        Ok(ComplexPoly { re, im })
    }

    pub fn conj(&self) -> Self {
        ComplexPoly { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn len(&self) -> usize {
        self.re.len() + self.im.len()
    }
}
