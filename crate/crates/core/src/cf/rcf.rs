use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::precision::{BigFloat, RealInput};

/// Regular continued fraction `x = A_0 + 1/(A_1 + 1/(A_2 + ...))`.
#[derive(Clone, Debug, PartialEq)]
pub struct RcfExpansion {
    pub integer_part: BigInt,
    /// `A_1, A_2, ...`
    pub digits: Vec<BigUint>,
    /// `(P_n, Q_n)` for `n = 0..=digits.len()`, with `P_0/Q_0 = A_0/1`.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// The expansion of a rational ended before the requested depth.
    pub terminated: bool,
    /// Precision of a float input ran out before the requested depth.
    pub truncated: bool,
}

impl RcfExpansion {
    pub fn from_digits(integer_part: BigInt, digits: Vec<BigUint>) -> Self {
        let mut conv = Vec::with_capacity(digits.len() + 1);
        let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
        let (mut p1, mut q1) = (integer_part.clone(), BigInt::one());
        conv.push((p1.clone(), q1.clone()));
        for a in &digits {
            let a = BigInt::from(a.clone());
            let p2 = &a * &p1 + &p0;
            let q2 = &a * &q1 + &q0;
            p0 = std::mem::replace(&mut p1, p2);
            q0 = std::mem::replace(&mut q1, q2);
            conv.push((p1.clone(), q1.clone()));
        }
        RcfExpansion { integer_part, digits, convergents: conv, terminated: false, truncated: false }
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    /// `Q_n` for `n = 0..=depth`.
    pub fn q(&self, n: usize) -> &BigInt {
        &self.convergents[n].1
    }

    pub fn p(&self, n: usize) -> &BigInt {
        &self.convergents[n].0
    }

    /// `A_n` for `n >= 1`.
    pub fn a(&self, n: usize) -> &BigUint {
        &self.digits[n - 1]
    }
}

fn euclid(r: &BigRational, depth: usize) -> (BigInt, Vec<BigUint>, bool) {
    let mut n = r.numer().clone();
    let mut d = r.denom().clone();
    let (a0, rem) = n.div_mod_floor(&d);
    let mut digits = Vec::new();
    n = rem;
    // remaining value n/d in [0,1)
    while !n.is_zero() && digits.len() < depth {
        let (a, rem) = d.div_mod_floor(&n);
        digits.push(a.magnitude().clone());
        d = std::mem::replace(&mut n, rem);
    }
    (a0, digits, n.is_zero())
}

fn surd_digits(x: &RealInput, depth: usize) -> (BigInt, Vec<BigUint>, bool) {
    let a0 = x.floor();
    let mut y = x.sub(&RealInput::from_int_big(a0.clone())).expect("same field");
    let mut digits = Vec::new();
    while !y.is_zero() && digits.len() < depth {
        let inv = y.recip().expect("nonzero");
        let a = inv.floor();
        y = inv.sub(&RealInput::from_int_big(a.clone())).expect("same field");
        digits.push(a.magnitude().clone());
    }
    (a0, digits, y.is_zero())
}

/// Digits shared by every real in `[lo, hi]`, minus one for safety at
/// cylinder boundaries.
fn interval_digits(lo: &BigRational, hi: &BigRational, depth: usize) -> (BigInt, Vec<BigUint>, bool) {
    let (a_lo, d_lo, _) = euclid(lo, depth + 2);
    let (a_hi, d_hi, _) = euclid(hi, depth + 2);
    if a_lo != a_hi {
        return (a_lo, Vec::new(), true);
    }
    let common = d_lo.iter().zip(&d_hi).take_while(|(a, b)| a == b).count();
    let keep = common.saturating_sub(1).min(depth);
    (a_lo, d_lo[..keep].to_vec(), keep < depth)
}

/// Half-width interval around a float input at its declared precision.
pub(crate) fn float_interval(f: &BigFloat) -> (BigRational, BigRational) {
    let v = f.to_rational();
    let e = f.ulp_exp() - 1;
    let h = if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as u64)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as u64)
    };
    (&v - &h, &v + &h)
}

pub fn rcf_expand(x: &RealInput, depth: usize) -> Result<RcfExpansion> {
    let (a0, digits, ended, truncated) = match x {
        RealInput::Rational(r) => {
            let (a0, d, ended) = euclid(r, depth);
            (a0, d, ended, false)
        }
        RealInput::Surd(_) => {
            let (a0, d, ended) = surd_digits(x, depth);
            (a0, d, ended, false)
        }
        RealInput::Float(f) => {
            if f.is_zero() {
                (BigInt::zero(), Vec::new(), true, false)
            } else {
                let (lo, hi) = float_interval(f);
                let (a0, d, trunc) = interval_digits(&lo, &hi, depth);
                (a0, d, false, trunc)
            }
        }
    };
    let mut e = RcfExpansion::from_digits(a0, digits);
    e.terminated = ended && x.is_rational();
    e.truncated = truncated;
    Ok(e)
}

/// Value of `A_0 + [A_1, ..., A_N]` as a float; used to plant digits.
pub fn digits_value(integer_part: &BigInt, digits: &[BigUint], prec: u32) -> RealInput {
    let e = RcfExpansion::from_digits(integer_part.clone(), digits.to_vec());
    let (p, q) = e.convergents.last().unwrap();
    RealInput::Float(BigFloat::from_ratio(p, q, prec))
}
