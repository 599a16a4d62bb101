//! Exact real-root isolation for integer polynomials, used to check the
//! root magnitude window `1/(deg·2^l) ≤ |θ| ≤ deg·2^l`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_ORACLE_DEGREE: usize = 64;
const MAX_REFINE_STEPS: usize = 400;
const RELATIVE_BITS: u32 = 60;

type Poly = Vec<BigRational>;
type IntPoly = Vec<BigInt>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn derivative(p: &Poly) -> Poly {
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect()
}

/// Quotient and remainder of `a / b`, `b ≠ 0`.
fn div_rem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        q[shift] = f;
        r.pop();
        trim(&mut r);
    }
    (q, r)
}

fn monic(mut p: Poly) -> Poly {
    if let Some(lead) = p.last().cloned() {
        for c in &mut p {
            *c /= &lead;
        }
    }
    p
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

/// `m / 2^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Dyadic {
    m: BigInt,
    k: u32,
}

impl Dyadic {
    fn int(m: BigInt) -> Self {
        Dyadic { m, k: 0 }
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        let k = self.k.max(other.k);
        (&self.m << (k - self.k), &other.m << (k - other.k), k)
    }

    fn midpoint(&self, other: &Dyadic) -> Dyadic {
        let (a, b, k) = self.aligned(other);
        Dyadic { m: a + b, k: k + 1 }
    }

    fn den(&self) -> BigInt {
        BigInt::one() << self.k
    }

    fn to_rational(&self) -> BigRational {
        BigRational::new(self.m.clone(), self.den())
    }

    fn sign(&self) -> i8 {
        sign_of(&self.m)
    }
}

fn sign_of(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Primitive integer multiple of `p` with the same sign.
fn to_integer_poly(p: &Poly) -> IntPoly {
    let den = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: IntPoly = p.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|c| c / &g).collect()
    }
}

fn horner(p: &IntPoly, num: &BigInt, den: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut den_pow = BigInt::one();
    for c in p.iter().rev() {
        acc = acc * num + c * &den_pow;
        den_pow *= den;
    }
    acc
}

struct Sturm {
    chain: Vec<IntPoly>,
}

impl Sturm {
    fn new(p: &Poly) -> Self {
        let mut chain = vec![p.clone(), derivative(p)];
        loop {
            let k = chain.len();
            if chain[k - 1].is_empty() {
                chain.pop();
                break;
            }
            let (_, r) = div_rem(&chain[k - 2], &chain[k - 1]);
            if r.is_empty() {
                break;
            }
            chain.push(r.into_iter().map(|c| -c).collect());
        }
        Sturm { chain: chain.iter().map(to_integer_poly).collect() }
    }

    fn poly(&self) -> &IntPoly {
        &self.chain[0]
    }

    fn variations(&self, num: &BigInt, den: &BigInt) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for p in &self.chain {
            let sign = sign_of(&horner(p, num, den));
            if sign != 0 {
                if last != 0 && sign != last {
                    v += 1;
                }
                last = sign;
            }
        }
        v
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: &Dyadic, b: &Dyadic) -> usize {
        self.variations(&a.m, &a.den()).saturating_sub(self.variations(&b.m, &b.den()))
    }

    fn count_rational(&self, a: &Dyadic, b: &BigRational) -> usize {
        self.variations(&a.m, &a.den()).saturating_sub(self.variations(b.numer(), b.denom()))
    }

    fn sign(&self, x: &Dyadic) -> i8 {
        sign_of(&horner(self.poly(), &x.m, &x.den()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootCheck {
    pub value: f64,
    /// `log₂(U / |θ|)`.
    pub upper_margin_log2: f64,
    /// `log₂(|θ| · U)`.
    pub lower_margin_log2: f64,
    pub within_upper: bool,
    pub within_lower: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootReport {
    pub degree: usize,
    /// Multiplicity of the root at zero, which is excluded from the check.
    pub zero_multiplicity: usize,
    /// `l`, the largest coefficient length.
    pub coefficient_length_log2: f64,
    /// `U = deg · 2^l`.
    pub upper_bound: f64,
    pub upper_bound_log2: f64,
    pub roots: Vec<RootCheck>,
    pub violations: usize,
    pub passes: bool,
}

/// An isolating interval `(lo, hi]` holding exactly one root, or the
/// exact root when `lo == hi`.
struct Isolated {
    lo: Dyadic,
    hi: Dyadic,
}

fn isolate(sturm: &Sturm, bound: BigInt) -> Vec<Isolated> {
    let mut out = Vec::new();
    let mut stack = vec![(Dyadic::int(-bound.clone()), Dyadic::int(bound))];
    while let Some((a, b)) = stack.pop() {
        match sturm.count(&a, &b) {
            0 => {}
            1 => out.push(refine(sturm, a, b)),
            _ => {
                let m = a.midpoint(&b);
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }
    out.sort_by(|x, y| x.hi.to_rational().cmp(&y.hi.to_rational()));
    out
}

/// Whether `(lo, hi]` is narrow relative to its distance from zero.
fn narrow(a: &Dyadic, b: &Dyadic) -> bool {
    if a.sign() * b.sign() <= 0 {
        return false;
    }
    let (x, y, _) = a.aligned(b);
    ((&y - &x) << RELATIVE_BITS) <= x.abs().min(y.abs())
}

fn refine(sturm: &Sturm, mut a: Dyadic, mut b: Dyadic) -> Isolated {
    if sturm.sign(&b) == 0 {
        return Isolated { lo: b.clone(), hi: b };
    }
    // A left endpoint that is itself a root belongs to the previous interval.
    while sturm.sign(&a) == 0 {
        let m = a.midpoint(&b);
        if sturm.sign(&m) == 0 && sturm.count(&a, &m) == 1 {
            return Isolated { lo: m.clone(), hi: m };
        }
        if sturm.count(&a, &m) == 1 {
            b = m;
        } else {
            a = m;
        }
    }
    let sa = sturm.sign(&a);
    for _ in 0..MAX_REFINE_STEPS {
        if narrow(&a, &b) {
            break;
        }
        let m = a.midpoint(&b);
        match sturm.sign(&m) {
            0 => return Isolated { lo: m.clone(), hi: m },
            s if s == sa => a = m,
            _ => b = m,
        }
    }
    Isolated { lo: a, hi: b }
}

impl Isolated {
    fn midpoint(&self) -> f64 {
        self.lo.midpoint(&self.hi).to_rational().to_f64().unwrap_or(f64::NAN)
    }

    fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Whether the root is `≤ x`.
    fn le(&self, sturm: &Sturm, x: &BigRational) -> bool {
        let (lo, hi) = (self.lo.to_rational(), self.hi.to_rational());
        if hi <= *x {
            true
        } else if lo >= *x || self.is_exact() {
            false
        } else {
            sturm.count_rational(&self.lo, x) == 1
        }
    }

    /// Whether the root is `< x`.
    fn lt(&self, sturm: &Sturm, x: &BigRational) -> bool {
        let is_root_at_x = sign_of(&horner(sturm.poly(), x.numer(), x.denom())) == 0;
        let inside = self.lo.to_rational() < *x && *x <= self.hi.to_rational();
        let at = if self.is_exact() { self.hi.to_rational() == *x } else { inside && is_root_at_x };
        self.le(sturm, x) && !at
    }
}

/// Isolates every non-zero real root of `Φ`, given by its coefficients
/// from the leading term down, and checks it against the window
/// `[1/U, U]` with `U = deg · 2^l` using exact rational arithmetic.
pub fn root_magnitude_oracle(coeffs: &[i128]) -> Result<RootReport> {
    let limit = 1i128 << 64;
    if let Some(&c) = coeffs.iter().find(|c| c.abs() > limit) {
        return Err(Error::OutOfRange { name: "coefficient", value: c as f64, range: "[-2^64, 2^64]" });
    }
    let start = coeffs.iter().position(|&c| c != 0).ok_or(Error::ZeroPolynomial)?;
    let desc = &coeffs[start..];
    let degree = desc.len() - 1;
    if degree > MAX_ORACLE_DEGREE {
        return Err(Error::OutOfRange { name: "degree", value: degree as f64, range: "[0, 64]" });
    }
    let max_abs = desc.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    let two_l = BigInt::from(max_abs) + BigInt::from(2);
    let coefficient_length_log2 = (max_abs as f64 + 2.0).log2();
    let upper_int: BigInt = BigInt::from(degree.max(1)) * &two_l;
    let upper_bound = upper_int.to_f64().unwrap_or(f64::INFINITY);

    let zero_multiplicity = desc.iter().rev().take_while(|&&c| c == 0).count();
    let mut p: Poly =
        desc[..desc.len() - zero_multiplicity].iter().rev().map(|&c| BigRational::from_integer(c.into())).collect();
    trim(&mut p);
    let mut report = RootReport {
        degree,
        zero_multiplicity,
        coefficient_length_log2,
        upper_bound,
        upper_bound_log2: upper_bound.log2(),
        roots: Vec::new(),
        violations: 0,
        passes: true,
    };
    if p.len() <= 1 {
        return Ok(report);
    }

    let g = gcd(&p, &derivative(&p));
    let (q, _) = div_rem(&p, &g);
    let sturm = Sturm::new(&q);
    let lead = q.last().unwrap().abs();
    let cauchy = q.iter().map(|c| c.abs() / &lead).max().unwrap() + BigRational::one();
    let mut bound = BigInt::one();
    while BigRational::from_integer(bound.clone()) <= cauchy {
        bound <<= 1u32;
    }

    let u = BigRational::from_integer(upper_int);
    let inv_u = u.recip();
    for iv in isolate(&sturm, bound) {
        let value = iv.midpoint();
        let (within_upper, within_lower) = if iv.hi.sign() > 0 {
            (iv.le(&sturm, &u), !iv.lt(&sturm, &inv_u))
        } else {
            (!iv.lt(&sturm, &-u.clone()), iv.le(&sturm, &-inv_u.clone()))
        };
        let mag = value.abs().log2();
        if !(within_upper && within_lower) {
            report.violations += 1;
        }
        report.roots.push(RootCheck {
            value,
            upper_margin_log2: report.upper_bound_log2 - mag,
            lower_margin_log2: mag + report.upper_bound_log2,
            within_upper,
            within_lower,
        });
    }
    report.passes = report.violations == 0;
    Ok(report)
}
