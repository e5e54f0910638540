use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::precision::RealInput;

/// `T(x) = -1/x mod 2`, valued in (-1, 1]. Inputs outside [-1,1] are first
/// reduced mod 2.
pub fn t_map(x: &RealInput) -> Result<RealInput> {
    let y = x.mod2_sym();
    if y.is_zero() {
        return Err(Error::InvalidInput("T is undefined at 0".into()));
    }
    Ok(y.recip()?.neg().mod2_sym())
}

/// Gauss map `G(x) = {1/x}` on (0, 1].
pub fn g_map(x: &RealInput) -> Result<RealInput> {
    if x.signum() <= 0 || x.cmp(&RealInput::int(1))?.is_gt() {
        return Err(Error::InvalidInput("G needs x in (0,1]".into()));
    }
    Ok(x.recip()?.fract())
}

/// One step of the folded map: `x` lies in `B(sign, k)` and
/// `value = |1/x - 2k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct UStep {
    pub value: RealInput,
    pub sign: i8,
    pub k: BigUint,
}

pub fn u_map(x: &RealInput) -> Result<UStep> {
    if x.signum() <= 0 || x.cmp(&RealInput::int(1))?.is_gt() {
        return Err(Error::InvalidInput("U needs x in (0,1]".into()));
    }
    let y = x.recip()?;
    let m = y.floor();
    // 1/x in [2k-1, 2k) gives B(+1,k); [2k, 2k+1) gives B(-1,k)
    let (sign, k) = if m.bit(0) { (1i8, (&m + 1u32) / 2u32) } else { (-1i8, &m / 2u32) };
    let two_k = RealInput::from_int_big(&k * 2u32);
    let value = y.sub(&two_k)?.abs();
    Ok(UStep { value, sign, k: k.magnitude().clone() })
}
