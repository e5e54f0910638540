//! Binary floating point on top of `BigInt`: `mant * 2^exp`, rounded to
//! nearest-even at a fixed number of mantissa bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const DEFAULT_PREC: u32 = 192;
pub const MIN_PREC: u32 = 64;

#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

fn round_mag(mag: BigUint, exp: i64, sticky: bool, prec: u32) -> (BigUint, i64) {
    let bits = mag.bits();
    let p = prec as u64;
    if bits <= p {
        return (mag, exp);
    }
    let shift = bits - p;
    let mask = (BigUint::one() << shift) - 1u32;
    let low = &mag & &mask;
    let mut hi = mag >> shift;
    let half = BigUint::one() << (shift - 1);
    let up = match low.cmp(&half) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => sticky || hi.bit(0),
    };
    let mut e = exp + shift as i64;
    if up {
        hi += 1u32;
        if hi.bits() > p {
            hi >>= 1;
            e += 1;
        }
    }
    (hi, e)
}

impl BigFloat {
    /// Rounds `sign * mag * 2^exp` (plus a nonzero tail below the last bit if
    /// `sticky`) to `prec` bits.
    fn build(neg: bool, mag: BigUint, exp: i64, sticky: bool, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        if mag.is_zero() {
            return Self::zero(prec);
        }
        let (mut m, mut e) = round_mag(mag, exp, sticky, prec);
        let tz = m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            m >>= tz;
            e += tz as i64;
        }
        let sign = if neg { Sign::Minus } else { Sign::Plus };
        BigFloat { mant: BigInt::from_biguint(sign, m), exp: e, prec }
    }

    fn from_signed(m: BigInt, exp: i64, sticky: bool, prec: u32) -> Self {
        let neg = m.is_negative();
        Self::build(neg, m.magnitude().clone(), exp, sticky, prec)
    }

    pub fn zero(prec: u32) -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0, prec: prec.max(MIN_PREC) }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        Self::from_signed(n.clone(), 0, false, prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    /// Exact value `m * 2^e`, rounded only if `m` is wider than `prec`.
    pub fn from_parts(m: BigInt, e: i64, prec: u32) -> Self {
        Self::from_signed(m, e, false, prec)
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "non-finite f64");
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let eb = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if eb == 0 { (frac, -1074) } else { (frac | (1u64 << 52), eb - 1075) };
        Self::build(v < 0.0, BigUint::from(m), e, false, prec)
    }

    /// Quotient `n / d` correctly rounded.
    pub fn from_ratio(n: &BigInt, d: &BigInt, prec: u32) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        let prec = prec.max(MIN_PREC);
        if n.is_zero() {
            return Self::zero(prec);
        }
        let neg = n.is_negative() != d.is_negative();
        let nm = n.magnitude();
        let dm = d.magnitude();
        let shift = (prec as i64 + 2 + dm.bits() as i64 - nm.bits() as i64).max(0);
        let (q, r) = (nm << shift as u64).div_rem(dm);
        Self::build(neg, q, -shift, !r.is_zero(), prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Self::from_ratio(r.numer(), r.denom(), prec)
    }

    /// Correctly rounded square root of a nonnegative integer.
    pub fn sqrt_int(d: &BigUint, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        if d.is_zero() {
            return Self::zero(prec);
        }
        let k = prec as u64 + 2;
        let scaled = d << (2 * k);
        let m = scaled.sqrt();
        let sticky = &m * &m != scaled;
        Self::build(false, m, -(k as i64), sticky, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::from_signed(self.mant.clone(), self.exp, false, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Weight of the last mantissa bit at full precision: `2^(e_top - prec)`.
    pub fn ulp_exp(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN / 4;
        }
        self.exp + self.mant.bits() as i64 - self.prec as i64
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -&self.mant, exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        (a, b, e)
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return other.with_prec(prec);
        }
        if other.is_zero() {
            return self.with_prec(prec);
        }
        // keep the exact alignment bounded when exponents are far apart
        let top_a = self.exp + self.mant.bits() as i64;
        let top_b = other.exp + other.mant.bits() as i64;
        let (big, small) = if top_a >= top_b { (self, other) } else { (other, self) };
        let floor = big.exp.min(top_a.max(top_b) - prec as i64 - 8);
        if small.exp + (small.mant.bits() as i64) < floor {
            let tiny = BigFloat { mant: BigInt::from(small.signum()), exp: floor - 2, prec };
            let (a, b, e) = big.aligned(&tiny);
            return Self::from_signed(a + b, e, true, prec);
        }
        let (a, b, e) = self.aligned(other);
        Self::from_signed(a + b, e, false, prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        Self::from_signed(&self.mant * &other.mant, self.exp + other.exp, false, prec)
    }

    pub fn div(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        let q = Self::from_ratio(&self.mant, &other.mant, prec);
        if q.is_zero() {
            return q;
        }
        BigFloat { exp: q.exp + self.exp - other.exp, ..q }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::from_signed(&self.mant * k, self.exp, false, self.prec)
    }

    /// Multiplication by `2^k`, exact.
    pub fn ldexp(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat { mant: self.mant.clone(), exp: self.exp + k, prec: self.prec }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            self.mant.div_floor(&(BigInt::one() << (-self.exp) as u64))
        }
    }

    /// Exact `self - m * floor(self / m)` for `m = 2^k`.
    pub fn mod_pow2(&self, k: i64) -> Self {
        let q = self.ldexp(-k).floor();
        let fl = BigFloat { mant: q, exp: k, prec: self.prec };
        let (a, b, e) = self.aligned(&fl);
        // the difference keeps a subset of the mantissa bits, so this is exact
        Self::from_signed(a - b, e, false, self.prec)
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let (m, e) = round_mag(self.mant.magnitude().clone(), self.exp, false, 53);
        let v = ldexp_f64(m.to_f64().unwrap_or(f64::INFINITY), e);
        if self.mant.is_negative() {
            -v
        } else {
            v
        }
    }

    /// `floor(frac(self / 2^k) * 2^128)`, i.e. the value as a fraction of a
    /// period `2^k`, in 128-bit fixed point.
    pub fn turns(&self, k: i64) -> u128 {
        let shift = self.exp + 128 - k;
        let m = if shift >= 0 {
            &self.mant << shift as u64
        } else {
            self.mant.div_floor(&(BigInt::one() << (-shift) as u64))
        };
        let r = m.mod_floor(&(BigInt::one() << 128u32));
        r.to_u128().expect("reduced below 2^128")
    }
}

pub(crate) fn ldexp_f64(v: f64, e: i64) -> f64 {
    let mut v = v;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.mant == other.mant && (self.exp == other.exp || self.mant.is_zero())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}@{}", self.to_f64(), self.prec)
    }
}
