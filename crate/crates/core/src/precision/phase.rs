//! Phases as fractions of a turn in 128-bit fixed point, with exact octant
//! symmetry so that quarter turns give exact zeros.

use num_bigint::BigInt;
use num_complex::Complex64;

use super::bigfloat::BigFloat;
use super::real::RealInput;

pub type Cplx = Complex64;

const OCTANT_BITS: u32 = 125;

/// `(sin, cos)` of `2 pi u / 2^128`.
pub fn sincos_turns(u: u128) -> (f64, f64) {
    let oct = (u >> OCTANT_BITS) as u8;
    let r = u & ((1u128 << OCTANT_BITS) - 1);
    let r = if oct & 1 == 1 { (1u128 << OCTANT_BITS) - r } else { r };
    let th = (r as f64) * 2f64.powi(-(OCTANT_BITS as i32)) * std::f64::consts::FRAC_PI_4;
    let (s, c) = if r == 0 {
        (0.0, 1.0)
    } else if r == 1u128 << OCTANT_BITS {
        (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
    } else {
        th.sin_cos()
    };
    match oct {
        0 => (s, c),
        1 => (c, s),
        2 => (c, -s),
        3 => (s, -c),
        4 => (-s, -c),
        5 => (-c, -s),
        6 => (-c, s),
        _ => (-s, c),
    }
}

pub fn cis_turns(u: u128) -> Cplx {
    let (s, c) = sincos_turns(u);
    Cplx::new(c, s)
}

/// `k^2 x mod 2`, reduced exactly and then rounded to `prec` bits.
pub fn phase_mod2(k: u64, x: &RealInput, prec: u32) -> BigFloat {
    let k2 = BigInt::from(k) * BigInt::from(k);
    match x {
        RealInput::Float(f) => {
            let exact = BigFloat::from_parts(f.mantissa() * &k2, f.exponent(), f.prec() + 80);
            exact.mod_pow2(1).with_prec(prec)
        }
        _ => x.mul(&RealInput::from_int_big(k2)).expect("same field").mod_int(2).to_bigfloat(prec),
    }
}

/// Turn counts of `k^2 x/2 + k t` for the theta kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaPhase {
    pub half_x: u128,
    pub t: u128,
}

impl ThetaPhase {
    pub fn new(x: &RealInput, t: &RealInput) -> Self {
        ThetaPhase { half_x: x.turns(1), t: t.turns(0) }
    }

    #[inline]
    pub fn turns(&self, k: u64) -> u128 {
        let k = k as u128;
        self.half_x.wrapping_mul(k.wrapping_mul(k)).wrapping_add(self.t.wrapping_mul(k))
    }
}

/// Turn counts of `(k - tau)^2 / (2x)` for the dual-side series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftedPhase {
    a: u128,
    b: u128,
    c: u128,
}

impl ShiftedPhase {
    /// `x > 0`, `tau` in [0,1).
    pub fn new(x: &RealInput, tau: &RealInput) -> Self {
        let p = 320;
        let xf = x.to_bigfloat(p);
        let tf = tau.to_bigfloat(p);
        let two_x = xf.ldexp(1);
        let one = BigFloat::from_i64(1, p);
        let a = one.div(&two_x);
        let b = tf.div(&xf);
        let c = tf.mul(&tf).div(&two_x);
        ShiftedPhase { a: a.turns(0), b: b.turns(0), c: c.turns(0) }
    }

    #[inline]
    pub fn turns(&self, k: u64) -> u128 {
        let k = k as u128;
        self.a
            .wrapping_mul(k.wrapping_mul(k))
            .wrapping_sub(self.b.wrapping_mul(k))
            .wrapping_add(self.c)
    }
}

/// `e^{i pi m / 4}` held exactly as `m mod 8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct EighthRoot(pub u8);

impl EighthRoot {
    pub fn from_sign(sigma: i32) -> Self {
        EighthRoot(if sigma < 0 { 7 } else { 1 })
    }

    pub fn mul(self, o: Self) -> Self {
        EighthRoot((self.0 + o.0) % 8)
    }

    pub fn turns(self) -> u128 {
        (self.0 as u128) << OCTANT_BITS
    }

    pub fn to_cplx(self) -> Cplx {
        cis_turns(self.turns())
    }
}
