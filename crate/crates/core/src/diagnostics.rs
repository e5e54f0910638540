//! Continued-fraction convergence criteria, orbit sums, irrationality
//! witnesses and the invariant density of the U-map.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cf::{digits_value, orbit_products, rcf_expand, sign_phases, t_orbit, OrbitStop, RcfExpansion};
use crate::error::{Error, Result};
use crate::precision::{Cplx, RealInput};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConvergingTrend,
    DivergingTrend,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ConvergingTrend => "converging-trend",
            Verdict::DivergingTrend => "diverging-trend",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriteriaReport {
    pub name: String,
    /// Series index of the first term.
    pub start: usize,
    /// `|term|` per index.
    pub terms: Vec<f64>,
    /// `ln |term|`; finite even when the term itself underflows.
    pub ln_terms: Vec<f64>,
    /// `|partial sum|` per index.
    pub partials: Vec<f64>,
    /// Complex partial sums for phase-weighted series.
    pub complex_partials: Option<Vec<Cplx>>,
    pub last_term: f64,
    /// Geometric term ratio fitted over the last quarter.
    pub ratio_estimate: f64,
    pub verdict: Verdict,
}

/// Least-squares slope of `ln term` over the last quarter (at least 2 points),
/// exponentiated.
pub fn term_ratio(ln_terms: &[f64]) -> f64 {
    let n = ln_terms.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = (n / 4).max(2).min(n);
    let tail = &ln_terms[n - m..];
    let xm = (m as f64 - 1.0) / 2.0;
    let ym = tail.iter().sum::<f64>() / m as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, y) in tail.iter().enumerate() {
        let dx = i as f64 - xm;
        num += dx * (y - ym);
        den += dx * dx;
    }
    (num / den).exp()
}

pub fn verdict_for(ratio: f64) -> Verdict {
    if ratio < 0.95 {
        Verdict::ConvergingTrend
    } else if ratio > 1.02 {
        Verdict::DivergingTrend
    } else {
        Verdict::Inconclusive
    }
}

fn report_from_ln(name: &str, start: usize, ln_terms: Vec<f64>) -> CriteriaReport {
    let terms: Vec<f64> = ln_terms.iter().map(|l| l.exp()).collect();
    let mut partials = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in &terms {
        acc += t;
        partials.push(acc);
    }
    let ratio = term_ratio(&ln_terms);
    CriteriaReport {
        name: name.to_string(),
        start,
        last_term: terms.last().copied().unwrap_or(0.0),
        terms,
        ln_terms,
        partials,
        complex_partials: None,
        ratio_estimate: ratio,
        verdict: verdict_for(ratio),
    }
}

/// `ln q` for a positive big integer, without overflow.
pub fn ln_big(q: &BigInt) -> f64 {
    let bits = q.bits();
    if bits <= 1000 {
        return q.to_f64().expect("positive").ln();
    }
    let shift = bits - 64;
    let top = (q.magnitude() >> shift).to_f64().expect("fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln ln q`; `-inf` when `q = 1`.
fn ln_ln(q: &BigInt) -> f64 {
    ln_big(q).ln()
}

fn rcf_for(x: &RealInput, need: usize) -> Result<RcfExpansion> {
    let rcf = rcf_expand(x, need)?;
    if rcf.depth() < need {
        return Err(Error::InsufficientDepth { need, have: rcf.depth() });
    }
    Ok(rcf)
}

/// `sum_{k<N} Q_{k+1}^{(1-s)/2}/Q_k^{s/2}` for `s < 1`, and
/// `sum_{k<N} log Q_{k+1}/sqrt(Q_k)` for `s = 1`.
pub fn criteria_s(s: f64, x: &RealInput, n: usize) -> Result<CriteriaReport> {
    if !(s > 0.5 && s <= 1.0) {
        return Err(Error::InvalidInput(format!("s = {s} outside (1/2, 1]")));
    }
    let rcf = rcf_for(x, n)?;
    let lq: Vec<f64> = (0..=n).map(|k| ln_big(rcf.q(k))).collect();
    if s < 1.0 {
        let ln = (0..n).map(|k| (1.0 - s) / 2.0 * lq[k + 1] - s / 2.0 * lq[k]).collect();
        Ok(report_from_ln("s-power", 0, ln))
    } else {
        let ln = (0..n).map(|k| ln_ln(rcf.q(k + 1)) - 0.5 * lq[k]).collect();
        Ok(report_from_ln("s-log", 0, ln))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Below,
    Above,
    Critical,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaAlpha {
    pub alpha: f64,
    pub beta: f64,
    pub beta_critical: f64,
    pub regime: Regime,
}

impl BetaAlpha {
    pub fn new(alpha: f64, beta: f64) -> Self {
        let bc = beta_critical(alpha);
        let regime = if (beta - bc).abs() <= 1e-12 {
            Regime::Critical
        } else if beta < bc {
            Regime::Below
        } else {
            Regime::Above
        };
        BetaAlpha { alpha, beta, beta_critical: bc, regime }
    }
}

/// `(sqrt(alpha^2 + 4) - 1)/2`
pub fn beta_critical(alpha: f64) -> f64 {
    ((alpha * alpha + 4.0).sqrt() - 1.0) / 2.0
}

/// `sum_{n=1}^N Q_{n+1}^{beta+1}/Q_n^{alpha+beta+1}`
fn cond_below(lq: &[f64], a: f64, b: f64, n: usize) -> CriteriaReport {
    let ln = (1..=n).map(|k| (b + 1.0) * lq[k + 1] - (a + b + 1.0) * lq[k]).collect();
    report_from_ln("beta-below", 1, ln)
}

/// `sum_{n=1}^N Q_{n+2}^beta/Q_n^{alpha+beta}`
fn cond_above(lq: &[f64], a: f64, b: f64, n: usize) -> CriteriaReport {
    let ln = (1..=n).map(|k| b * lq[k + 2] - (a + b) * lq[k]).collect();
    report_from_ln("beta-above", 1, ln)
}

/// `sum_{n=1}^N log Q_{n+1}/Q_{n-1}^alpha + Q_{n+1} (log Q_{n+1})^2/Q_n^{1+alpha}`
fn cond_log(rcf: &RcfExpansion, lq: &[f64], a: f64, n: usize, name: &str) -> CriteriaReport {
    let ln = (1..=n)
        .map(|k| {
            let ll = ln_ln(rcf.q(k + 1));
            ln_add(ll - a * lq[k - 1], lq[k + 1] + 2.0 * ll - (1.0 + a) * lq[k])
        })
        .collect();
    report_from_ln(name, 1, ln)
}

/// Conditions for the regime of `beta` against `beta_alpha`, plus
/// the logarithmic condition when `with_log` is set.
pub fn criteria_beta(
    x: &RealInput,
    alpha: f64,
    beta: f64,
    n: usize,
    with_log: bool,
) -> Result<(BetaAlpha, Vec<CriteriaReport>)> {
    if alpha <= 0.0 || beta < 0.0 {
        return Err(Error::InvalidInput("need alpha > 0 and beta >= 0".into()));
    }
    let rcf = rcf_for(x, n + 2)?;
    let lq: Vec<f64> = (0..=n + 2).map(|k| ln_big(rcf.q(k))).collect();
    let ba = BetaAlpha::new(alpha, beta);
    let mut out = Vec::new();
    if matches!(ba.regime, Regime::Below | Regime::Critical) {
        out.push(cond_below(&lq, alpha, beta, n));
    }
    if matches!(ba.regime, Regime::Above | Regime::Critical) {
        out.push(cond_above(&lq, alpha, beta, n));
    }
    if with_log {
        out.push(cond_log(&rcf, &lq, alpha, n, "beta-log"));
    }
    Ok((ba, out))
}

/// Stronger conditions: `sum Q_{n+1}^{(3-s)/2}/Q_n^{1+s/2}` for `s < 1`,
/// the logarithmic condition with `alpha = 1/2` for `s = 1`.
pub fn criteria_s_strong(s: f64, x: &RealInput, n: usize) -> Result<CriteriaReport> {
    if !(s > 0.5 && s <= 1.0) {
        return Err(Error::InvalidInput(format!("s = {s} outside (1/2, 1]")));
    }
    let rcf = rcf_for(x, n + 1)?;
    let lq: Vec<f64> = (0..=n + 1).map(|k| ln_big(rcf.q(k))).collect();
    if s < 1.0 {
        let ln = (1..=n).map(|k| (3.0 - s) / 2.0 * lq[k + 1] - (1.0 + s / 2.0) * lq[k]).collect();
        Ok(report_from_ln("s-strong", 1, ln))
    } else {
        Ok(cond_log(&rcf, &lq, 0.5, n, "s-strong-log"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaCondition {
    /// `sum Q_{n+1}^beta/Q_n^{alpha+beta}`
    Power,
    /// `sum log Q_{n+1}/Q_n^alpha`
    Log,
}

pub fn criteria_alpha(x: &RealInput, alpha: f64, beta: f64, n: usize, cond: AlphaCondition) -> Result<CriteriaReport> {
    if alpha <= 0.0 {
        return Err(Error::InvalidInput("need alpha > 0".into()));
    }
    let rcf = rcf_for(x, n + 1)?;
    let lq: Vec<f64> = (0..=n + 1).map(|k| ln_big(rcf.q(k))).collect();
    Ok(match cond {
        AlphaCondition::Power => {
            report_from_ln("alpha-power", 1, (1..=n).map(|k| beta * lq[k + 1] - (alpha + beta) * lq[k]).collect())
        }
        AlphaCondition::Log => {
            report_from_ln("alpha-log", 1, (1..=n).map(|k| ln_ln(rcf.q(k + 1)) - alpha * lq[k]).collect())
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitSumMode {
    /// `sum Pi_j^alpha / |T^j x|^beta`
    Absolute,
    /// the same with the unit phases `e^{i pi/4 sum_{l<j} sigma(T^l x)}`
    PhaseWeighted,
    /// `sum Pi_j^alpha log(1/|T^j x|)`
    LogAbsolute,
    /// the same with the unit phases
    LogPhase,
}

impl std::str::FromStr for OrbitSumMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(OrbitSumMode::Absolute),
            "phase_weighted" | "phase-weighted" => Ok(OrbitSumMode::PhaseWeighted),
            "log_absolute" | "log-absolute" => Ok(OrbitSumMode::LogAbsolute),
            "log_phase" | "log-phase" => Ok(OrbitSumMode::LogPhase),
            _ => Err(Error::InvalidInput(format!("unknown mode `{s}`"))),
        }
    }
}

/// Orbit series `sum_{j=0}^J` in the given mode. `Pi_0 = 1`.
pub fn orbit_sums(x: &RealInput, alpha: f64, beta: f64, j_max: usize, mode: OrbitSumMode) -> Result<CriteriaReport> {
    let orbit = t_orbit(x, j_max)?;
    match orbit.stop {
        OrbitStop::Complete => {}
        OrbitStop::Zero(j) | OrbitStop::PrecisionExhausted(j) => {
            return Err(Error::InsufficientDepth { need: j_max, have: j.saturating_sub(1) })
        }
    }
    let prods = orbit_products(x, j_max)?;
    let mut pi = vec![1.0];
    pi.extend(prods.iter().map(|p| p.value_f64));
    if pi.len() < j_max + 1 {
        return Err(Error::InsufficientDepth { need: j_max, have: pi.len() - 1 });
    }
    let ys: Vec<f64> = orbit.values_f64().iter().map(|v| v.abs()).collect();
    let phases = sign_phases(&orbit.signs());
    let (name, log) = match mode {
        OrbitSumMode::Absolute => ("orbit-absolute", false),
        OrbitSumMode::PhaseWeighted => ("orbit-phase", false),
        OrbitSumMode::LogAbsolute => ("orbit-log-absolute", true),
        OrbitSumMode::LogPhase => ("orbit-log-phase", true),
    };
    let mags: Vec<f64> = (0..=j_max)
        .map(|j| {
            let w = if log { (1.0 / ys[j]).ln() } else { ys[j].powf(-beta) };
            pi[j].powf(alpha) * w
        })
        .collect();
    let ln_terms: Vec<f64> = mags.iter().map(|m| m.abs().ln()).collect();
    let mut rep = report_from_ln(name, 0, ln_terms);
    rep.terms = mags.iter().map(|m| m.abs()).collect();
    if matches!(mode, OrbitSumMode::PhaseWeighted | OrbitSumMode::LogPhase) {
        let mut acc = Cplx::new(0.0, 0.0);
        let mut cp = Vec::with_capacity(mags.len());
        for (j, m) in mags.iter().enumerate() {
            acc += phases[j].to_cplx() * *m;
            cp.push(acc);
        }
        rep.partials = cp.iter().map(|c| c.norm()).collect();
        rep.complex_partials = Some(cp);
    } else {
        let mut acc = 0.0;
        rep.partials = mags
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
    }
    Ok(rep)
}

/// `(n, 1 + log Q_{n+1}/log Q_n)` for `n <= N` with `Q_n > 1`. These tend to
/// `mu(x)` along the subsequence that realises it.
pub fn irrationality_profile(x: &RealInput, n: usize) -> Result<Vec<(usize, f64)>> {
    let rcf = rcf_for(x, n + 1)?;
    Ok((1..=n)
        .filter(|&k| rcf.q(k) > &BigInt::one())
        .map(|k| (k, 1.0 + ln_big(rcf.q(k + 1)) / ln_big(rcf.q(k))))
        .collect())
}

/// `max_{n<=N} 1 + log Q_{n+1}/log Q_n` and the maximizing `n`.
pub fn irrationality_lb(x: &RealInput, n: usize) -> Result<(f64, usize)> {
    let prof = irrationality_profile(x, n)?;
    let mut best = (f64::NEG_INFINITY, 0);
    for (k, v) in prof {
        if v > best.0 {
            best = (v, k);
        }
    }
    if best.0 == f64::NEG_INFINITY {
        return Err(Error::InsufficientDepth { need: n + 2, have: n + 1 });
    }
    Ok(best)
}

/// `[0; A_1, ..., A_N]` at the given precision, for adversarial fixtures.
pub fn planted_x(digits: &[u64], prec: u32) -> RealInput {
    let d: Vec<BigUint> = digits.iter().map(|&a| BigUint::from(a)).collect();
    digits_value(&BigInt::zero(), &d, prec)
}

/// `1/(x+1) + 1/(1-x)` on `(-1, 1)`.
pub fn u_density(x: f64) -> Result<f64> {
    if !(x.abs() < 1.0) {
        return Err(Error::InvalidInput(format!("|x| = {} must be < 1", x.abs())));
    }
    Ok(1.0 / (x + 1.0) + 1.0 / (1.0 - x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessVariant {
    /// `|T^j x| >= 1/A_n`
    Literal,
    /// `|T^j x| >= 1/(A_n + 2)`
    Shifted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallIterateWitness {
    pub j: usize,
    pub t_abs: f64,
    pub product: f64,
    pub n: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallIterateReport {
    pub variant: WitnessVariant,
    pub witnesses: Vec<SmallIterateWitness>,
    pub injective: bool,
    pub holds: bool,
}

/// For each `j <= J` with `|T^j x| <= 1/2`, searches the smallest unused `n`
/// with `Pi_j <= 1/Q_{n-1}` and `|T^j x|` above the variant's threshold.
pub fn small_iterate_check(x: &RealInput, j_max: usize, variant: WitnessVariant) -> Result<SmallIterateReport> {
    let orbit = t_orbit(x, j_max)?;
    if orbit.len() < j_max + 1 {
        return Err(Error::InsufficientDepth { need: j_max, have: orbit.len().saturating_sub(1) });
    }
    let prods = orbit_products(x, j_max)?;
    let mut pi = vec![RealInput::int(1)];
    pi.extend(prods.into_iter().map(|p| p.value));
    // Q_{n-1} <= 1/Pi_j needs n - 1 up to roughly log_phi(1/Pi_J); 2J + 8 is ample
    let depth = 2 * j_max + 8;
    let rcf = rcf_expand(x, depth)?;
    let half = RealInput::ratio(1, 2);
    let mut used = BTreeSet::new();
    let mut witnesses = Vec::new();
    for j in 0..=j_max.min(pi.len() - 1) {
        let t = orbit.points[j].value.abs();
        if t.cmp(&half)?.is_gt() {
            continue;
        }
        let mut found = None;
        for n in 1..=rcf.depth() {
            if used.contains(&n) {
                continue;
            }
            let q = RealInput::from_int_big(rcf.q(n - 1).clone());
            let a = BigInt::from(rcf.a(n).clone());
            let a = match variant {
                WitnessVariant::Literal => a,
                WitnessVariant::Shifted => a + 2,
            };
            let small = pi[j].mul(&q)?.cmp(&RealInput::int(1))?.is_le();
            let big = t.mul(&RealInput::from_int_big(a))?.cmp(&RealInput::int(1))?.is_ge();
            if small && big {
                found = Some(n);
                break;
            }
        }
        if let Some(n) = found {
            used.insert(n);
        }
        witnesses.push(SmallIterateWitness { j, t_abs: t.to_f64(), product: pi[j].to_f64(), n: found });
    }
    let ns: Vec<usize> = witnesses.iter().filter_map(|w| w.n).collect();
    let injective = ns.iter().collect::<BTreeSet<_>>().len() == ns.len();
    let holds = injective && witnesses.iter().all(|w| w.n.is_some());
    Ok(SmallIterateReport { variant, witnesses, injective, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> RealInput {
        RealInput::surd_i(-1, 1, 5, 2)
    }

    #[test]
    fn beta_alpha_closed_form() {
        let b = BetaAlpha::new(0.5, 0.0);
        assert!((b.beta_critical - 0.530776406404415).abs() < 1e-14);
        assert_eq!(b.regime, Regime::Below);
    }

    #[test]
    fn s_criterion_golden_ratio() {
        let r = criteria_s(0.75, &golden(), 40).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r.ratio_estimate - phi.powf(-0.25)).abs() < 1e-3);
        assert_eq!(r.verdict, Verdict::ConvergingTrend);
    }

    #[test]
    fn density() {
        assert_eq!(u_density(0.0).unwrap(), 2.0);
        assert!((u_density(0.5).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert!(u_density(1.0).is_err());
    }

    #[test]
    fn ln_big_large() {
        let q = BigInt::from(3u8).pow(2000);
        assert!((ln_big(&q) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
