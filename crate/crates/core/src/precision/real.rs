use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use regex::Regex;

use super::bigfloat::{BigFloat, DEFAULT_PREC, MIN_PREC};
use super::surd::QuadSurd;
use crate::error::{Error, Result};

/// A real argument: exact rational, exact quadratic surd, or a binary float
/// carrying its declared precision.
#[derive(Clone, Debug, PartialEq)]
pub enum RealInput {
    Rational(BigRational),
    Surd(QuadSurd),
    Float(BigFloat),
}

use RealInput::*;

fn surd_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*([+-]?\d+)$")
            .unwrap()
    })
}

fn decimal_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?$").unwrap())
}

fn int(s: &str) -> Result<BigInt> {
    s.trim_start_matches('+').parse::<BigInt>().map_err(|_| Error::Parse(s.to_string()))
}

/// Parses `p/q`, `(a+b*sqrt(d))/c`, an integer, or a decimal literal with an
/// optional `@bits` precision suffix.
pub fn parse_real(text: &str) -> Result<RealInput> {
    let t = text.trim();
    let bad = || Error::Parse(text.to_string());
    if let Some(c) = surd_regex().captures(t) {
        let a = int(&c[1])?;
        let mut b = int(&c[3])?;
        if &c[2] == "-" {
            b = -b;
        }
        let d: u64 = c[4].parse().map_err(|_| bad())?;
        let den = int(&c[5])?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let a = BigRational::new(a, den.clone());
        let b = BigRational::new(b, den);
        if d == 1 {
            return Ok(Rational(a + b));
        }
        return Ok(RealInput::surd(a, b, d)?);
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = int(p.trim())?;
        let q = int(q.trim())?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational(BigRational::new(p, q)));
    }
    let (body, prec) = match t.split_once('@') {
        Some((b, p)) => {
            let p: u32 = p.trim().parse().map_err(|_| bad())?;
            if p < MIN_PREC {
                return Err(Error::InvalidInput(format!("precision {p} below {MIN_PREC} bits")));
            }
            (b.trim(), Some(p))
        }
        None => (t, None),
    };
    let c = decimal_regex().captures(body).ok_or_else(bad)?;
    let ip = c.get(2).map_or("", |m| m.as_str());
    let fp = c.get(3).map(|m| m.as_str());
    let ex = c.get(4).map(|m| m.as_str());
    if ip.is_empty() && fp.map_or(true, |f| f.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{}{}", ip, fp.unwrap_or(""));
    let mut val = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let mut e10: i64 = -(fp.map_or(0, |f| f.len()) as i64);
    if let Some(e) = ex {
        e10 += e.parse::<i64>().map_err(|_| bad())?;
    }
    let ten = BigInt::from(10);
    if e10 >= 0 {
        val *= BigRational::from_integer(num_traits::pow(ten, e10 as usize));
    } else {
        val /= BigRational::from_integer(num_traits::pow(ten, (-e10) as usize));
    }
    if &c[1] == "-" {
        val = -val;
    }
    // plain integers stay exact unless a precision was requested
    if fp.is_none() && ex.is_none() && prec.is_none() {
        return Ok(Rational(val));
    }
    Ok(Float(BigFloat::from_rational(&val, prec.unwrap_or(DEFAULT_PREC))))
}

impl RealInput {
    pub fn int(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Rational(BigRational::new(p.into(), q.into()))
    }

    /// `a + b sqrt(d)`, collapsing to a rational when `b = 0`.
    pub fn surd(a: BigRational, b: BigRational, d: u64) -> Result<Self> {
        let s = QuadSurd::new(a, b, d)?;
        Ok(Self::from_surd(s))
    }

    fn from_surd(s: QuadSurd) -> Self {
        if s.is_rational() {
            Rational(s.a().clone())
        } else {
            Surd(s)
        }
    }

    /// `(a + b sqrt d)/c` from machine integers.
    pub fn surd_i(a: i64, b: i64, d: u64, c: i64) -> Self {
        Self::surd(BigRational::new(a.into(), c.into()), BigRational::new(b.into(), c.into()), d)
            .expect("square-free radicand")
    }

    pub fn float(v: f64, prec: u32) -> Self {
        Float(BigFloat::from_f64(v, prec))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Float(_))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Rational(_))
    }

    /// Precision of the float variant; `None` for exact values.
    pub fn precision(&self) -> Option<u32> {
        match self {
            Float(f) => Some(f.prec()),
            _ => None,
        }
    }

    pub fn to_bigfloat(&self, prec: u32) -> BigFloat {
        match self {
            Rational(r) => BigFloat::from_rational(r, prec),
            Surd(s) => s.to_bigfloat(prec),
            Float(f) => f.with_prec(prec.max(f.prec())),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational(r) => BigFloat::from_rational(r, 64).to_f64(),
            Surd(s) => s.to_f64(),
            Float(f) => f.to_f64(),
        }
    }

    fn as_surd(&self, d: u64) -> QuadSurd {
        match self {
            Rational(r) => QuadSurd::new(r.clone(), BigRational::zero(), d).expect("checked radicand"),
            Surd(s) => s.clone(),
            Float(_) => unreachable!("float has no surd form"),
        }
    }

    fn float_prec(a: &Self, b: &Self) -> u32 {
        a.precision().into_iter().chain(b.precision()).max().unwrap_or(DEFAULT_PREC)
    }

    fn binop(
        &self,
        o: &Self,
        fr: impl Fn(&BigRational, &BigRational) -> Result<BigRational>,
        fs: impl Fn(&QuadSurd, &QuadSurd) -> Result<QuadSurd>,
        ff: impl Fn(&BigFloat, &BigFloat) -> BigFloat,
    ) -> Result<Self> {
        match (self, o) {
            (Rational(a), Rational(b)) => Ok(Rational(fr(a, b)?)),
            (Float(_), _) | (_, Float(_)) => {
                let p = Self::float_prec(self, o);
                Ok(Float(ff(&self.to_bigfloat(p), &o.to_bigfloat(p))))
            }
            (Surd(s), _) | (_, Surd(s)) => {
                let d = s.d();
                Ok(Self::from_surd(fs(&self.as_surd(d), &o.as_surd(d))?))
            }
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.binop(o, |a, b| Ok(a + b), |a, b| a.add(b), |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.binop(o, |a, b| Ok(a - b), |a, b| a.sub(b), |a, b| a.sub(b))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.binop(o, |a, b| Ok(a * b), |a, b| a.mul(b), |a, b| a.mul(b))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.signum() == 0 {
            return Err(Error::DivisionByZero);
        }
        self.binop(o, |a, b| Ok(a / b), |a, b| a.div(b), |a, b| a.div(b))
    }

    pub fn neg(&self) -> Self {
        match self {
            Rational(r) => Rational(-r),
            Surd(s) => Surd(s.neg()),
            Float(f) => Float(f.neg()),
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self> {
        Self::int(1).div(self)
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rational(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Surd(s) => s.signum(),
            Float(f) => f.signum(),
        }
    }

    /// Sign with the convention sigma(0) = 1.
    pub fn sigma(&self) -> i32 {
        if self.signum() < 0 {
            -1
        } else {
            1
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    pub fn cmp(&self, o: &Self) -> Result<Ordering> {
        Ok(self.sub(o)?.signum().cmp(&0))
    }

    pub fn floor(&self) -> BigInt {
        match self {
            Rational(r) => r.floor().to_integer(),
            Surd(s) => s.floor(),
            Float(f) => f.floor(),
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    /// Fractional part in [0,1).
    pub fn fract(&self) -> Self {
        let fl = Rational(BigRational::from_integer(self.floor()));
        self.sub(&fl).expect("same field")
    }

    /// `self - m floor(self/m)` for a positive integer `m`.
    pub fn mod_int(&self, m: i64) -> Self {
        let mm = Self::int(m);
        let q = self.div(&mm).expect("nonzero modulus").floor();
        self.sub(&Rational(BigRational::from_integer(q * m))).expect("same field")
    }

    /// Representative of `self mod 2` in (-1, 1].
    pub fn mod2_sym(&self) -> Self {
        // y - 2 ceil((y - 1)/2)
        let k = self.sub(&Self::int(1)).unwrap().div(&Self::int(2)).unwrap().ceil();
        self.sub(&Rational(BigRational::from_integer(k * 2))).unwrap()
    }

    pub fn from_int_big(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// Fraction of a turn `frac(self / 2^k)` as 128-bit fixed point. Exact
    /// inputs are reduced exactly before rounding.
    pub fn turns(&self, k: i64) -> u128 {
        let period = if k >= 0 { 1i64 << k } else { 1 };
        let reduced = if k >= 0 { self.mod_int(period) } else { self.clone() };
        reduced.to_bigfloat(256).turns(k)
    }

    /// Whether `self` is an integer `m` (exact variants only).
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Rational(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    /// Small-integer check for convenience in tests and the CLI.
    pub fn to_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }
}

impl From<i64> for RealInput {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl fmt::Display for RealInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Surd(s) => write!(f, "{s}"),
            Float(x) => write!(f, "{x}"),
        }
    }
}

impl std::str::FromStr for RealInput {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_real(s)
    }
}
