use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::ecf::ecf_expand;
use super::rcf::float_interval;
use super::maps::t_map;
use crate::error::{Error, Result};
use crate::precision::{EighthRoot, RealInput};

/// Largest per-iterate error accepted for float orbits.
const ORBIT_ERR_MAX: f64 = 1e-24;
/// Floors closer than this to an integer are not certified.
const FLOOR_MARGIN: f64 = 1.0 / (1u64 << 30) as f64;

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPoint {
    pub value: RealInput,
    /// Absolute error bound; 0 for exact inputs.
    pub err: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitStop {
    /// All requested iterates were produced.
    Complete,
    /// The iterate with this index is 0 (rational input).
    Zero(usize),
    /// Float precision gave out; iterates before this index are valid.
    PrecisionExhausted(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub points: Vec<OrbitPoint>,
    pub stop: OrbitStop,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn signs(&self) -> Vec<i32> {
        self.points.iter().map(|p| p.value.sigma()).collect()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value.to_f64()).collect()
    }
}


fn pow2(e: i64) -> f64 {
    2f64.powi(e.clamp(-1074, 1023) as i32)
}

/// `[T^0 x, ..., T^J x]`. Exact inputs are iterated exactly. A float input is
/// iterated exactly on its dyadic value and on both ends of its half-ulp
/// interval; while the ends share the ECF digits up to depth `j`, `T^j` is a
/// monotone Mobius map there and the end images bound the error.
pub fn t_orbit(x: &RealInput, j_max: usize) -> Result<Orbit> {
    let x0 = x.mod2_sym();
    if x.is_exact() {
        let mut pts = vec![OrbitPoint { value: x0.clone(), err: 0.0 }];
        let mut y = x0;
        for j in 1..=j_max {
            if y.is_zero() {
                return Ok(Orbit { points: pts, stop: OrbitStop::Zero(j - 1) });
            }
            y = t_map(&y)?;
            pts.push(OrbitPoint { value: y.clone(), err: 0.0 });
        }
        let stop = if y.is_zero() && j_max == 0 { OrbitStop::Zero(0) } else { OrbitStop::Complete };
        return Ok(Orbit { points: pts, stop });
    }
    let RealInput::Float(f) = &x0 else { unreachable!("inexact input is a float") };
    let prec = f.prec();
    let ulp = pow2(f.ulp_exp());
    let mut pts = vec![OrbitPoint { value: x0.clone(), err: ulp }];
    if x0.is_zero() {
        return Ok(Orbit { points: pts, stop: OrbitStop::Zero(0) });
    }
    let certified = ecf_expand(&x0, j_max)?.depth();
    let (lo, hi) = float_interval(f);
    let mut ys = [RealInput::Rational(f.to_rational()), RealInput::Rational(lo), RealInput::Rational(hi)];
    for j in 1..=j_max {
        if j > certified || ys.iter().any(|y| y.is_zero()) {
            return Ok(Orbit { points: pts, stop: OrbitStop::PrecisionExhausted(j) });
        }
        for y in ys.iter_mut() {
            *y = t_map(y)?;
        }
        let err = ys[1..].iter().map(|e| e.sub(&ys[0]).expect("rational").to_f64().abs()).fold(0.0, f64::max);
        if err > ORBIT_ERR_MAX {
            return Ok(Orbit { points: pts, stop: OrbitStop::PrecisionExhausted(j) });
        }
        let v = ys[0].to_bigfloat(prec);
        let ulp_j = pow2(v.ulp_exp());
        pts.push(OrbitPoint { value: RealInput::Float(v), err: err + ulp_j });
    }
    Ok(Orbit { points: pts, stop: OrbitStop::Complete })
}

/// Cumulative phases `e^{i pi/4 sum_{l<j} sigma(T^l x)}` for `j = 0..=len`.
pub fn sign_phases(signs: &[i32]) -> Vec<EighthRoot> {
    let mut out = Vec::with_capacity(signs.len() + 1);
    let mut acc = EighthRoot(0);
    out.push(acc);
    for &s in signs {
        acc = acc.mul(EighthRoot::from_sign(s));
        out.push(acc);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductRecord {
    pub j: usize,
    /// `Pi_j = |x T(x) ... T^{j-1}(x)|`
    pub value: RealInput,
    pub value_f64: f64,
    pub err: f64,
    /// `1/|q_j + r_j q_{j-1}|` with the signed ECF tail `r_j`.
    pub via_convergents: f64,
    /// `1/(2 q_j)` and `1/(q_j - q_{j-1})`
    pub lower: f64,
    pub upper: f64,
    pub identity_ok: bool,
    pub sandwich_ok: bool,
}

/// Orbit products for `j = 1..=J`, each checked against the convergent
/// identity and the sandwich `1/(2q_j) <= Pi_j <= 1/(q_j - q_{j-1})`.
pub fn orbit_products(x: &RealInput, j_max: usize) -> Result<Vec<ProductRecord>> {
    let orbit = t_orbit(x, j_max)?;
    let ecf = ecf_expand(x, j_max + 1)?;
    let mut out = Vec::new();
    let mut prod = RealInput::int(1);
    let mut perr = 0.0f64;
    let one = RealInput::int(1);
    for j in 1..=j_max {
        if j >= orbit.len() || j > ecf.depth() {
            break;
        }
        let prev = &orbit.points[j - 1];
        let pf = prod.to_f64();
        prod = prod.mul(&prev.value.abs())?;
        perr = perr * prev.value.to_f64().abs() + pf * prev.err;
        let q = RealInput::from_int_big(ecf.q(j).clone());
        let qm = RealInput::from_int_big(ecf.q(j - 1).clone());
        // signed tail r_j = -sigma(T^{j-1} x) T^j x
        let tj = &orbit.points[j].value;
        let r = if prev.value.sigma() < 0 { tj.clone() } else { tj.neg() };
        let via = q.add(&r.mul(&qm)?)?.abs().recip()?;
        let two_q = q.mul(&RealInput::int(2))?;
        let gap = q.sub(&qm)?;
        let (identity_ok, sandwich_ok) = if x.is_exact() {
            let lo_ok = prod.mul(&two_q)?.cmp(&one)?.is_ge();
            let hi_ok = prod.mul(&gap)?.cmp(&one)?.is_le();
            (via == prod, lo_ok && hi_ok)
        } else {
            let tol = 8.0 * (perr + orbit.points[j].err) + 1e-30;
            let v = prod.to_f64();
            let lo = 1.0 / two_q.to_f64();
            let hi = 1.0 / gap.to_f64();
            ((via.to_f64() - v).abs() <= tol * (1.0 + q.to_f64()), v >= lo - tol && v <= hi + tol)
        };
        out.push(ProductRecord {
            j,
            value_f64: prod.to_f64(),
            value: prod.clone(),
            err: perr,
            via_convergents: via.to_f64(),
            lower: 1.0 / two_q.to_f64(),
            upper: 1.0 / gap.to_f64(),
            identity_ok,
            sandwich_ok,
        });
    }
    Ok(out)
}

/// `K(-1,n) = n`, `K(l,n) = floor(K(l-1,n) |T^l x|)`, down to the first zero
/// at level `L(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FloorChain {
    pub x: RealInput,
    pub n: u64,
    /// `K(-1,n), K(0,n), ..., K(L,n)`
    pub values: Vec<u64>,
    pub stop: usize,
}

impl FloorChain {
    /// `K(l, n)` for `l >= -1`.
    pub fn k(&self, l: isize) -> u64 {
        self.values[(l + 1) as usize]
    }
}

pub fn floor_chain(x: &RealInput, n: u64) -> Result<FloorChain> {
    let mut values = vec![n];
    let mut k = n;
    if n == 0 {
        return Ok(FloorChain { x: x.clone(), n, values, stop: 0 });
    }
    // each level at least halves K on average over two steps; 4 log2 n + 8 levels suffice
    let depth = 4 * (64 - n.leading_zeros() as usize) + 8;
    let orbit = t_orbit(x, depth)?;
    for (l, p) in orbit.points.iter().enumerate() {
        let kk = RealInput::from_int_big(BigInt::from(k));
        let prod = kk.mul(&p.value.abs())?;
        let fl = prod.floor();
        if !x.is_exact() {
            let v = prod.to_f64();
            let frac = v - v.floor();
            let dist = frac.min(1.0 - frac);
            let unc = (k as f64) * p.err;
            if dist < FLOOR_MARGIN.max(unc) {
                return Err(Error::UncertifiableFloor(l));
            }
        }
        k = fl.to_u64().expect("floor fits");
        values.push(k);
        if k == 0 {
            return Ok(FloorChain { x: x.clone(), n, values, stop: l });
        }
    }
    Err(Error::PrecisionExhausted(orbit.len()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TOpPair {
    pub j: usize,
    pub ttilde: RealInput,
    pub that: RealInput,
}

/// `T~_{j+1}(x,t) = T~_1(T^j x, T~_j)`, `T^_{j+1}(x,t) = T^_1(T^j x, T~_j)` with
/// `T~_1(y,u) = {{sigma(y) u}/y}` and `T^_1(y,u) = {sigma(y) u}^2 / y`.
/// Level 0 holds `({t}, 0)`.
pub fn t_ops(x: &RealInput, t: &RealInput, j_max: usize) -> Result<Vec<TOpPair>> {
    let orbit = t_orbit(x, j_max)?;
    let mut out = vec![TOpPair { j: 0, ttilde: t.fract(), that: RealInput::int(0) }];
    for j in 0..j_max {
        if j >= orbit.len() || orbit.points[j].value.is_zero() {
            break;
        }
        let y = &orbit.points[j].value;
        let prev = &out[j].ttilde;
        let u = if y.sigma() < 0 { prev.neg().fract() } else { prev.clone() };
        let tt = u.div(y)?.fract();
        let th = u.mul(&u)?.div(y)?;
        out.push(TOpPair { j: j + 1, ttilde: tt, that: th });
    }
    Ok(out)
}
