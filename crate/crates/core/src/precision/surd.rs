//! Exact arithmetic in Q(sqrt d) for a single square-free radicand.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::bigfloat::BigFloat;
use crate::error::{Error, Result};

/// `a + b * sqrt(d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: BigRational,
    b: BigRational,
    d: u64,
}

pub fn is_square_free(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl QuadSurd {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Result<Self> {
        if d < 2 || !is_square_free(d) {
            return Err(Error::NotSquareFree(d));
        }
        Ok(QuadSurd { a, b, d })
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.d != o.d {
            return Err(Error::FieldMismatch(self.d, o.d));
        }
        Ok(())
    }

    fn dd(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.d))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(QuadSurd { a: &self.a + &o.a, b: &self.b + &o.b, d: self.d })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(QuadSurd { a: &self.a - &o.a, b: &self.b - &o.b, d: self.d })
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let a = &self.a * &o.a + &self.b * &o.b * self.dd();
        let b = &self.a * &o.b + &self.b * &o.a;
        Ok(QuadSurd { a, b, d: self.d })
    }

    /// Conjugate `a - b sqrt d`.
    pub fn conj(&self) -> Self {
        QuadSurd { a: self.a.clone(), b: -&self.b, d: self.d }
    }

    /// `a^2 - d b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * self.dd()
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QuadSurd { a: &self.a / &n, b: -&self.b / &n, d: self.d })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        self.mul(&o.inv()?)
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        QuadSurd { a: &self.a + r, b: self.b.clone(), d: self.d }
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        QuadSurd { a: &self.a * r, b: &self.b * r, d: self.d }
    }

    pub fn neg(&self) -> Self {
        QuadSurd { a: -&self.a, b: -&self.b, d: self.d }
    }

    pub fn signum(&self) -> i32 {
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sa == 0 || sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        // opposite signs: compare a^2 with d b^2
        let a2 = &self.a * &self.a;
        let b2 = &self.b * &self.b * self.dd();
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn cmp(&self, o: &Self) -> Result<Ordering> {
        Ok(self.sub(o)?.signum().cmp(&0))
    }

    /// Exact floor via an integer square root.
    pub fn floor(&self) -> BigInt {
        // (A + B sqrt d) / C with C > 0
        let (an, ad) = (self.a.numer(), self.a.denom());
        let (bn, bd) = (self.b.numer(), self.b.denom());
        let a = an * bd;
        let b = bn * ad;
        let c = ad * bd;
        // floor(B sqrt d) from isqrt(B^2 d)
        let b2d: BigUint = (b.magnitude() * b.magnitude()) * BigUint::from(self.d);
        let r = BigInt::from(b2d.sqrt());
        let exact = &r * &r == BigInt::from(b2d);
        let bs = if b.is_negative() {
            if exact {
                -r
            } else {
                -r - BigInt::one()
            }
        } else {
            r
        };
        // B sqrt d lies in [bs, bs + 1); the sum A + B sqrt d lies in [A + bs, A + bs + 1)
        let lo = (&a + &bs).div_floor(&c);
        let hi_num = &a + &bs + BigInt::one();
        // candidates lo and lo + 1 at most; decide exactly
        let cand = &lo + BigInt::one();
        if &cand * &c < hi_num {
            // value might reach cand: test a + b sqrt d >= cand
            let t = self.add_rational(&BigRational::from_integer(-cand.clone()));
            if t.signum() >= 0 {
                return cand;
            }
        }
        lo
    }

    pub fn to_bigfloat(&self, prec: u32) -> BigFloat {
        let work = prec + 64;
        let s = BigFloat::sqrt_int(&BigUint::from(self.d), work);
        let a = BigFloat::from_rational(&self.a, work);
        let b = BigFloat::from_rational(&self.b, work);
        a.add(&b.mul(&s)).with_prec(prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_bigfloat(64).to_f64()
    }
}

fn rat_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // (p + q sqrt d)/c with a common denominator
        let c = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&c / self.a.denom());
        let q = self.b.numer() * (&c / self.b.denom());
        let sign = if q.is_negative() { '-' } else { '+' };
        if c.is_one() {
            write!(f, "({}{}{}*sqrt({}))/1", p, sign, q.abs(), self.d)
        } else {
            write!(f, "({}{}{}*sqrt({}))/{}", p, sign, q.abs(), self.d, c)
        }
    }
}
