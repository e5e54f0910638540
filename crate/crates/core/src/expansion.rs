//! The approximate functional equation, its error envelope, and the iterated
//! expansion of `F_s(x,t)` along the T-orbit of `x`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::cf::{orbit_products, sign_phases, t_ops, t_orbit, OrbitStop};
use crate::diagnostics::{orbit_sums, CriteriaReport, OrbitSumMode};
use crate::error::{Error, Result};
use crate::omega::{omega, OmegaValue, QuadConfig, RHO};
use crate::precision::{chunked_sum, cis_turns, ordered_map, Cplx, EighthRoot, RealInput, ThetaPhase};
use crate::theta::{partial_sum, SeriesParams};

/// Smoothed terms below `e^{-40}` are dropped.
const SMOOTH_CUTOFF: f64 = 40.0;

/// Shape of the error term of the functional equation, up to one constant per `s`:
/// `|x|^{s-1/2}/(floor(n|x| + tau) + 1 - tau)^s + min(1/((n+1)^s sqrt|x|), |x|^{-(1-s)/2})`,
/// with `1 + |log((n+1) sqrt|x|)|` in place of the last term at `s = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub s: f64,
    pub c: f64,
}

impl Envelope {
    pub fn unit(s: f64) -> Self {
        Envelope { s, c: 1.0 }
    }

    pub fn shape(&self, x: f64, tau: f64, n: u64) -> f64 {
        let s = self.s;
        let ax = x.abs();
        let nf = n as f64;
        let m = (nf * ax + tau).floor();
        let first = ax.powf(s - 0.5) / (m + 1.0 - tau).powf(s);
        let second = if (s - 1.0).abs() < 1e-12 {
            let a = (nf + 1.0) * ax.sqrt();
            (1.0 / a).min(1.0 + a.ln().abs())
        } else {
            (1.0 / ((nf + 1.0).powf(s) * ax.sqrt())).min(ax.powf(-(1.0 - s) / 2.0))
        };
        first + second
    }

    pub fn bound(&self, x: f64, tau: f64, n: u64) -> f64 {
        self.c * self.shape(x, tau, n)
    }

    /// Fits `c` as the largest `|residual| / shape` over all `(x, n)` pairs.
    pub fn calibrate(s: f64, xs: &[RealInput], ns: &[u64], t: &RealInput, cfg: &QuadConfig) -> Result<Self> {
        let unit = Envelope::unit(s);
        let ratios = ordered_map(xs, |x| -> Result<f64> {
            let om = omega(s, x, t, cfg)?;
            let mut worst: f64 = 0.0;
            for &n in ns {
                let r = funceq_residual_with(s, x, t, n, &om, &unit)?;
                worst = worst.max(r.residual.norm() / r.bound);
            }
            Ok(worst)
        });
        let mut c: f64 = 0.0;
        for r in ratios {
            c = c.max(r?);
        }
        Ok(Envelope { s, c })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualParts {
    /// `F_{s,n}(x,t)`
    pub direct: Cplx,
    /// `e^{sigma i pi/4} e^{-i pi tau^2/x} |x|^{s-1/2} F_{s,floor(n|x|)}(-1/x, tau/x)`
    pub modular: Cplx,
    pub omega: Cplx,
    /// `floor(n|x|)`
    pub m: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport {
    pub n: u64,
    pub residual: Cplx,
    pub bound: f64,
    pub parts: ResidualParts,
}

fn check_unit_x(x: &RealInput) -> Result<()> {
    if x.is_zero() {
        return Err(Error::Singularity(0.0));
    }
    if x.to_f64().abs() > 1.0 {
        return Err(Error::InvalidInput(format!("|x| = {} exceeds 1", x.to_f64().abs())));
    }
    Ok(())
}

/// The modular side `e^{sigma i pi/4} e^{-i pi tau^2/x} |x|^{s-1/2} F_{s,m}(-1/x, tau/x)`,
/// `tau = {sigma t}`, `m = floor(n|x|)`.
fn modular_side(s: f64, x: &RealInput, t: &RealInput, n: u64) -> Result<(Cplx, u64)> {
    let sigma = x.sigma();
    let tau = if sigma < 0 { t.neg().fract() } else { t.fract() };
    let m = RealInput::from_int_big(BigInt::from(n))
        .mul(&x.abs())?
        .floor()
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("n|x| overflows".into()))?;
    let xi = x.recip()?.neg();
    let ti = tau.div(x)?;
    let params = SeriesParams::new(s, ti);
    let f = partial_sum(&params, &xi, m)?.value;
    let gauss = tau.mul(&tau)?.div(x)?;
    let pre = EighthRoot::from_sign(sigma).turns().wrapping_sub(gauss.turns(1));
    Ok((cis_turns(pre) * x.to_f64().abs().powf(s - 0.5) * f, m))
}

/// Residual of the functional equation at `(x, t, n)` with a precomputed `Omega_s(x,t)`.
pub fn funceq_residual_with(
    s: f64,
    x: &RealInput,
    t: &RealInput,
    n: u64,
    om: &OmegaValue,
    env: &Envelope,
) -> Result<ResidualReport> {
    check_unit_x(x)?;
    let direct = partial_sum(&SeriesParams::new(s, t.clone()), x, n)?.value;
    let (modular, m) = modular_side(s, x, t, n)?;
    let residual = direct - modular - om.value;
    let tau = if x.sigma() < 0 { t.neg().fract() } else { t.fract() };
    let bound = env.bound(x.to_f64(), tau.to_f64(), n);
    Ok(ResidualReport { n, residual, bound, parts: ResidualParts { direct, modular, omega: om.value, m } })
}

/// `F_{s,n}(x,t) - modular side - Omega_s(x,t)` with its envelope bound.
pub fn funceq_residual(
    s: f64,
    x: &RealInput,
    t: &RealInput,
    n: u64,
    env: &Envelope,
    cfg: &QuadConfig,
) -> Result<ResidualReport> {
    check_unit_x(x)?;
    let om = omega(s, x, t, cfg)?;
    funceq_residual_with(s, x, t, n, &om, env)
}

/// `sum_k e^{i pi k^2 x + 2 i pi k t} e^{i pi k^2 d + 2 i pi k e} / k^s` over all `k`
/// with `Im(d) > 0`, where `x` and `t` carry the exact phase and `d`, `e` are
/// small complex corrections.
fn smoothed_sum(s: f64, x: &RealInput, t: &RealInput, d: Cplx, e: Cplx) -> Cplx {
    let ph = ThetaPhase::new(x, t);
    // |e^{i pi k^2 d}| = e^{-pi k^2 Im d}; stop once that is below e^{-40}
    let k_max = (SMOOTH_CUTOFF / (std::f64::consts::PI * d.im)).sqrt().ceil() as u64 + 2;
    let i_pi = Cplx::new(0.0, std::f64::consts::PI);
    chunked_sum(1, k_max + 1, |k| {
        let kf = k as f64;
        let corr = (i_pi * (d * (kf * kf) + e * (2.0 * kf))).exp();
        let w = if s == 0.0 { 1.0 } else { kf.powf(-s) };
        cis_turns(ph.turns(k)) * corr * w
    })
}

/// `F_s(x + iy, t)`.
pub fn smoothed_theta(s: f64, x: &RealInput, t: &RealInput, y: f64) -> Cplx {
    smoothed_sum(s, x, t, Cplx::new(0.0, y), Cplx::new(0.0, 0.0))
}

/// `F_s(z,t) - rho e^{-i pi tau^2/z} z^{s-1/2} F_s(-1/z, tau/z)` at `z = x + iy`, `x > 0`.
fn smoothed_defect(s: f64, x: &RealInput, t: &RealInput, y: f64) -> Result<Cplx> {
    let tau = t.fract();
    let xf = x.to_f64();
    let tf = tau.to_f64();
    let z = Cplx::new(xf, y);
    let first = smoothed_theta(s, x, t, y);
    // -1/z = -1/x + delta and tau/z = tau/x - tau delta with delta = i y/(x z)
    let delta = Cplx::new(0.0, y) / (z * xf);
    let xi = x.recip()?.neg();
    let ti = tau.div(x)?;
    let second = smoothed_sum(s, &xi, &ti, delta, -delta * tf);
    let i = Cplx::new(0.0, 1.0);
    let pre = RHO * (-i * std::f64::consts::PI * tf * tf / z).exp() * z.powf(s - 0.5);
    Ok(first - pre * second)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleValue {
    pub value: Cplx,
    /// Distance between the last two extrapolants.
    pub spread: f64,
    /// Raw smoothed defects, one per `n`.
    pub samples: Vec<Cplx>,
}

/// Independent estimate of `Omega_s(x,t)`: the modular defect evaluated at
/// `z = x + i/n^2` and extrapolated to `n -> inf` assuming an error linear in `1/n^2`.
pub fn omega_oracle(s: f64, x: &RealInput, t: &RealInput, n_list: &[u64]) -> Result<OracleValue> {
    if s <= 0.5 {
        return Err(Error::InvalidInput(format!("oracle needs s > 1/2, got {s}")));
    }
    if n_list.len() < 2 {
        return Err(Error::InvalidInput("oracle needs at least two n".into()));
    }
    check_unit_x(x)?;
    if x.signum() < 0 {
        let mut v = omega_oracle(s, &x.neg(), &t.neg(), n_list)?;
        v.value = v.value.conj();
        v.samples.iter_mut().for_each(|c| *c = c.conj());
        return Ok(v);
    }
    let samples = n_list
        .iter()
        .map(|&n| smoothed_defect(s, x, t, 1.0 / (n as f64 * n as f64)))
        .collect::<Result<Vec<_>>>()?;
    let w: Vec<f64> = n_list.iter().map(|&n| (n as f64) * (n as f64)).collect();
    Ok(extrapolate(&samples, &w))
}

/// Pairwise Richardson steps `(w2 g2 - w1 g1)/(w2 - w1)`; the last one is the value.
fn extrapolate(samples: &[Cplx], w: &[f64]) -> OracleValue {
    let r: Vec<Cplx> = (1..samples.len())
        .map(|i| (samples[i] * w[i] - samples[i - 1] * w[i - 1]) / (w[i] - w[i - 1]))
        .collect();
    let value = *r.last().expect("two samples");
    let spread = if r.len() >= 2 { (r[r.len() - 1] - r[r.len() - 2]).norm() } else { (samples[1] - samples[0]).norm() };
    OracleValue { value, spread, samples: samples.to_vec() }
}

/// Smoothed estimate of `F_s(x,t)` for `1/2 < s <= 1`, where the partial sums
/// oscillate: `F_s(x + i/n^2, t)` extrapolated assuming an error `~ n^{1/2-s}`.
pub fn smoothed_limit(s: f64, x: &RealInput, t: &RealInput, n_list: &[u64]) -> Result<OracleValue> {
    if s <= 0.5 || n_list.len() < 2 {
        return Err(Error::InvalidInput("smoothed limit needs s > 1/2 and two n".into()));
    }
    let a = s - 0.5;
    let samples: Vec<Cplx> = n_list.iter().map(|&n| smoothed_theta(s, x, t, 1.0 / (n as f64 * n as f64))).collect();
    let w: Vec<f64> = n_list.iter().map(|&n| (n as f64).powf(a)).collect();
    Ok(extrapolate(&samples, &w))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm {
    pub j: usize,
    /// Exact eighth-root part of the phase.
    pub sign_phase: EighthRoot,
    /// Full unit phase, including any `t` contribution.
    pub phase: Cplx,
    /// `Pi_j = |x T(x) ... T^{j-1}(x)|`
    pub product: f64,
    pub omega: Cplx,
    pub omega_err: f64,
    pub term: Cplx,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub s: f64,
    pub terms: Vec<ExpansionTerm>,
    pub partials: Vec<Cplx>,
    pub reference: Cplx,
    /// Uncertainty of the reference (spread or truncation estimate).
    pub reference_err: f64,
    pub residuals: Vec<f64>,
    /// Requested depth when fewer terms could be certified.
    pub truncated_from: Option<usize>,
    /// Absolute orbit series whose convergence the identity assumes
    /// (`1/2 < s <= 1` only).
    pub hypothesis: Option<CriteriaReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionConfig {
    pub quad: QuadConfig,
    /// Direct-summation length for the reference when `s > 1`.
    pub n_ref: u64,
    /// Smoothing levels for the reference when `s <= 1`.
    pub smooth_ns: Vec<u64>,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig { quad: QuadConfig::default(), n_ref: 100_000, smooth_ns: vec![1000, 2000, 4000] }
    }
}

/// `F_s(x,t)` estimate used to judge an expansion.
pub fn reference_value(s: f64, x: &RealInput, t: &RealInput, cfg: &ExpansionConfig) -> Result<(Cplx, f64)> {
    if s > 1.0 {
        let p = partial_sum(&SeriesParams::new(s, t.clone()), x, cfg.n_ref)?;
        // tail of sum k^{-s} beyond n_ref
        let tail = (cfg.n_ref as f64).powf(1.0 - s) / (s - 1.0);
        Ok((p.value, tail))
    } else {
        let o = smoothed_limit(s, x, t, &cfg.smooth_ns)?;
        Ok((o.value, o.spread))
    }
}

struct Level {
    y: RealInput,
    ttilde: RealInput,
    /// turns of `sum_{l<j} (sigma_l/4 - T^_{l+1})/2`
    phase_turns: u128,
    sign_phase: EighthRoot,
    product: f64,
}

fn assemble(
    s: f64,
    x: &RealInput,
    t: &RealInput,
    levels: Vec<Level>,
    requested: usize,
    cfg: &ExpansionConfig,
) -> Result<ExpansionReport> {
    let omegas = ordered_map(&levels, |l| omega(s, &l.y, &l.ttilde, &cfg.quad));
    let mut terms = Vec::with_capacity(levels.len());
    let mut truncated_from = if levels.len() < requested + 1 { Some(requested) } else { None };
    for (j, (l, om)) in levels.iter().zip(omegas).enumerate() {
        let om = match om {
            Ok(v) => v,
            Err(Error::Singularity(_)) => {
                truncated_from = Some(requested);
                break;
            }
            Err(e) => return Err(e),
        };
        let phase = cis_turns(l.phase_turns);
        let term = phase * l.product.powf(s - 0.5) * om.value;
        terms.push(ExpansionTerm {
            j,
            sign_phase: l.sign_phase,
            phase,
            product: l.product,
            omega: om.value,
            omega_err: om.est_error,
            term,
        });
    }
    let mut partials = Vec::with_capacity(terms.len());
    let mut acc = Cplx::new(0.0, 0.0);
    for t in &terms {
        acc += t.term;
        partials.push(acc);
    }
    let (reference, reference_err) = reference_value(s, x, t, cfg)?;
    let residuals = partials.iter().map(|p| (p - reference).norm()).collect();
    let hypothesis = hypothesis_series(s, x, terms.len().saturating_sub(1));
    Ok(ExpansionReport { s, terms, partials, reference, reference_err, residuals, truncated_from, hypothesis })
}

/// `sum Pi_j^{s-1/2}/|T^j x|^{(1-s)/2}` for `1/2 < s < 1`, and
/// `sum sqrt(Pi_j) log(1/|T^j x|)` for `s = 1`.
pub fn hypothesis_series(s: f64, x: &RealInput, j_max: usize) -> Option<CriteriaReport> {
    if s > 0.5 && s < 1.0 {
        orbit_sums(x, s - 0.5, (1.0 - s) / 2.0, j_max, OrbitSumMode::Absolute).ok()
    } else if s == 1.0 {
        orbit_sums(x, 0.5, 0.0, j_max, OrbitSumMode::LogAbsolute).ok()
    } else {
        None
    }
}

fn products_upto(x: &RealInput, j_max: usize) -> Result<Vec<f64>> {
    let mut out = vec![1.0];
    if j_max > 0 {
        out.extend(orbit_products(x, j_max)?.iter().map(|p| p.value_f64));
    }
    Ok(out)
}

/// `F_s(x) ~ sum_{j<=J} e^{i pi/4 sum_{l<j} sigma(T^l x)} Pi_j^{s-1/2} Omega_s(T^j x)`.
pub fn expand_series(s: f64, x: &RealInput, j_max: usize, cfg: &ExpansionConfig) -> Result<ExpansionReport> {
    let orbit = t_orbit(x, j_max)?;
    let mut pts = orbit.points;
    if let OrbitStop::Zero(j) = orbit.stop {
        pts.truncate(j);
    }
    let signs: Vec<i32> = pts.iter().map(|p| p.value.sigma()).collect();
    let phases = sign_phases(&signs);
    let prods = products_upto(x, pts.len().saturating_sub(1))?;
    let zero = RealInput::int(0);
    let levels = pts
        .into_iter()
        .zip(prods)
        .enumerate()
        .map(|(j, (p, product))| Level {
            y: p.value,
            ttilde: zero.clone(),
            phase_turns: phases[j].turns(),
            sign_phase: phases[j],
            product,
        })
        .collect();
    assemble(s, x, &zero, levels, j_max, cfg)
}

/// The same expansion for general `t`:
/// terms `e^{i pi sum_{l<j} (sigma_l/4 - T^_{l+1})} Pi_j^{s-1/2} Omega_s(T^j x, T~_j)`.
pub fn expand_series_t(
    s: f64,
    x: &RealInput,
    t: &RealInput,
    j_max: usize,
    cfg: &ExpansionConfig,
) -> Result<ExpansionReport> {
    let orbit = t_orbit(x, j_max)?;
    let ops = t_ops(x, t, j_max)?;
    let mut pts = orbit.points;
    if let OrbitStop::Zero(j) = orbit.stop {
        pts.truncate(j);
    }
    pts.truncate(ops.len());
    let signs: Vec<i32> = pts.iter().map(|p| p.value.sigma()).collect();
    let phases = sign_phases(&signs);
    let prods = products_upto(x, pts.len().saturating_sub(1))?;
    let mut hat_turns: u128 = 0;
    let mut levels = Vec::with_capacity(pts.len());
    for (j, (p, product)) in pts.into_iter().zip(prods).enumerate() {
        levels.push(Level {
            y: p.value,
            ttilde: ops[j].ttilde.clone(),
            phase_turns: phases[j].turns().wrapping_sub(hat_turns),
            sign_phase: phases[j],
            product,
        });
        if j + 1 < ops.len() {
            hat_turns = hat_turns.wrapping_add(ops[j + 1].that.turns(1));
        }
    }
    assemble(s, x, t, levels, j_max, cfg)
}
