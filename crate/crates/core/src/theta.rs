//! Direct evaluation of `F_{s,n}(x,t) = sum_{k<=n} e^{i pi k^2 x + 2 i pi k t} / k^s`.

use num_traits::ToPrimitive;

use crate::cf::rcf_expand;
use crate::error::{Error, Result};
use crate::precision::{chunked_sum, cis_turns, Cplx, RealInput, ThetaPhase, DEFAULT_PREC};

/// Precision and truncation settings shared by the analytic evaluators.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    pub prec: u32,
    /// Hard cap on the number of terms any truncated series may use.
    pub max_terms: u64,
}

impl Default for Policy {
    fn default() -> Self {
        Policy { prec: DEFAULT_PREC, max_terms: 50_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesParams {
    pub s: f64,
    pub t: RealInput,
    pub policy: Policy,
}

impl SeriesParams {
    pub fn new(s: f64, t: RealInput) -> Self {
        SeriesParams { s, t, policy: Policy::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartialSum {
    pub n: u64,
    pub value: Cplx,
    pub phase_error_bound: f64,
}

/// Upper bound for `sum_{k<=n} k^{-s}`.
pub fn harmonic_bound(n: u64, s: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let integral = if (s - 1.0).abs() < 1e-12 { nf.ln() } else { (nf.powf(1.0 - s) - 1.0) / (1.0 - s) };
    1.0 + integral.max(0.0)
}

#[inline]
pub(crate) fn theta_term(phase: &ThetaPhase, s: f64, k: u64) -> Cplx {
    let w = if s == 0.0 { 1.0 } else { (k as f64).powf(-s) };
    cis_turns(phase.turns(k)) * w
}

/// Sum over `k` in `(n1, n2]`.
pub fn theta_slice(phase: &ThetaPhase, s: f64, n1: u64, n2: u64) -> Cplx {
    chunked_sum(n1 + 1, n2 + 1, |k| theta_term(phase, s, k))
}

fn error_bound(n: u64, s: f64) -> f64 {
    let eps = f64::EPSILON;
    let h = harmonic_bound(n, s);
    // per-term rounding of sin/cos/pow plus the 2^-128 phase grid scaled by k^2
    let grid = 2.0 * std::f64::consts::PI * 2f64.powi(-126) * (n as f64).powf(3.0 - s.min(3.0));
    8.0 * eps * h + grid
}

pub fn partial_sum(params: &SeriesParams, x: &RealInput, n: u64) -> Result<PartialSum> {
    let phase = ThetaPhase::new(x, &params.t);
    if n > params.policy.max_terms {
        return Err(Error::InvalidInput(format!("n = {n} exceeds the term cap {}", params.policy.max_terms)));
    }
    let value = theta_slice(&phase, params.s, 0, n);
    Ok(PartialSum { n, value, phase_error_bound: error_bound(n, params.s) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HlWitness {
    pub sum_abs: f64,
    pub bound_ratio: f64,
    pub r_star: usize,
}

/// `|sum_{k<=N} e^{i pi k^2 x}|` against `min_r (N/sqrt(Q_r) + sqrt(Q_r))`.
pub fn hl_witness(x: &RealInput, n: u64) -> Result<HlWitness> {
    let rcf = rcf_expand(x, 200)?;
    let nf = n as f64;
    let mut best = f64::INFINITY;
    let mut r_star = 0;
    let mut covered = false;
    for (r, (_, q)) in rcf.convergents.iter().enumerate() {
        let qf = q.to_f64().unwrap_or(f64::INFINITY);
        let v = nf / qf.sqrt() + qf.sqrt();
        if v < best {
            best = v;
            r_star = r;
        }
        if qf > nf {
            covered = true;
            break;
        }
    }
    if !covered && !rcf.terminated {
        return Err(Error::InsufficientDepth { need: rcf.depth() + 1, have: rcf.depth() });
    }
    let p = SeriesParams::new(0.0, RealInput::int(0));
    let s = partial_sum(&p, x, n)?.value.norm();
    Ok(HlWitness { sum_abs: s, bound_ratio: s / best, r_star })
}
