//! The three pieces of `Omega_s = U_s + V_s + W_s` for `x > 0`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::precision::{chunked_sum, cis_turns, Cplx, RealInput, ShiftedPhase};
use crate::quad::integrate;

use super::QuadConfig;

pub const RHO: Cplx = Cplx { re: FRAC_1_SQRT_2, im: FRAC_1_SQRT_2 };

/// A computed piece with its error estimate and work count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartValue {
    pub value: Cplx,
    pub err: f64,
    /// Quadrature nodes or series terms used.
    pub count: u64,
    pub converged: bool,
}

impl PartValue {
    pub fn zero() -> Self {
        PartValue { value: Cplx::new(0.0, 0.0), err: 0.0, count: 0, converged: true }
    }
}

/// Contour cut-off: three fixed-point steps of
/// `u = max(8, sqrt((ln(8/tol) + sqrt2 pi u)/(pi x)))` from `u = 8`.
pub fn contour_cut(x: f64, tol: f64) -> f64 {
    let mut u: f64 = 8.0;
    for _ in 0..3 {
        u = (((8.0 / tol).ln() + SQRT_2 * PI * u).max(0.0) / (PI * x)).sqrt().max(8.0);
    }
    u
}

/// Integrand of `U_s` along `z = 1/2 + rho u`, including `dz = rho du`.
fn u_integrand(s: f64, x: f64, tau: f64, u: f64) -> Cplx {
    let z = Cplx::new(0.5, 0.0) + RHO * u;
    let i = Cplx::new(0.0, 1.0);
    let mut expo = i * PI * z * z * x + i * 2.0 * PI * z * tau;
    if s != 0.0 {
        expo -= z.ln() * s;
    }
    // 1 - e^{2 i pi z} = 1 + E with E = e^{2 i pi rho u}; divide through by E when |E| > 1
    let e_arg = i * 2.0 * PI * RHO * u;
    if u >= 0.0 {
        RHO * expo.exp() / (e_arg.exp() + 1.0)
    } else {
        RHO * (expo - e_arg).exp() / ((-e_arg).exp() + 1.0)
    }
}

/// Bound for the discarded contour beyond `|u| > cut`.
fn contour_tail(s: f64, x: f64, tau: f64, cut: f64) -> f64 {
    // both sides are dominated by e^{-pi x u^2} times a decaying linear factor; |z|^{-s} <= 8^{s/2}
    let zmax = 8f64.powf(s / 2.0);
    let a = PI * x;
    let lin_pos = PI * x * FRAC_1_SQRT_2 + SQRT_2 * PI * tau;
    let lin_neg = SQRT_2 * PI * (1.0 - tau) - PI * x * FRAC_1_SQRT_2;
    let side = |b: f64| {
        // int_cut^inf e^{-a u^2 - b u} du <= e^{-a c^2 - b c}/(2 a c + b) when 2ac + b > 0
        let den = 2.0 * a * cut + b;
        let num = (-a * cut * cut - b * cut).exp();
        if den > 0.0 {
            num / den
        } else {
            num * cut
        }
    };
    zmax * (side(lin_pos) + side(lin_neg))
}

/// `U_s(x,tau)`: the contour integral over `z = 1/2 + rho u`.
pub fn u_s_integral(s: f64, x: f64, tau: f64, cfg: &QuadConfig) -> (PartValue, f64) {
    let cut = cfg.u_cut.unwrap_or_else(|| contour_cut(x, cfg.tol));
    let tail = contour_tail(s, x, tau, cut);
    // the integrand varies on a unit scale near u = 0 however long the contour is
    let mut breaks = vec![0.0];
    let mut b = 1.0;
    while b < cut {
        breaks.push(b);
        breaks.insert(0, -b);
        b *= 4.0;
    }
    breaks.insert(0, -cut);
    breaks.push(cut);
    let q = integrate(
        |u| u_integrand(s, x, tau, u),
        &breaks,
        16,
        (cfg.tol - tail).max(cfg.tol * 0.5),
        cfg.max_nodes,
    );
    let pv = PartValue { value: q.value, err: q.err + tail, count: q.nodes as u64, converged: q.converged };
    (pv, cut)
}

/// Terms needed so that `x^{s-1/2}/(N+1-tau)^s < tol`.
pub fn v_terms_needed(s: f64, x: f64, tau: f64, tol: f64) -> f64 {
    ((x.powf(s - 0.5) / tol).powf(1.0 / s) + tau - 1.0).ceil().max(1.0)
}

pub fn v_tail_bound(s: f64, x: f64, tau: f64, n: u64) -> f64 {
    x.powf(s - 0.5) / (n as f64 + 1.0 - tau).powf(s)
}

/// `V_s = rho x^{s-1/2} sum_{k<=N} e^{-i pi (k-tau)^2/x} ((k-tau)^{-s} - k^{-s})`.
pub fn v_s_series(s: f64, x: &RealInput, tau: &RealInput, tail_tol: f64, max_terms: u64) -> PartValue {
    let tf = tau.to_f64();
    if s == 0.0 || tau.is_zero() {
        return PartValue::zero();
    }
    let xf = x.to_f64();
    let need = v_terms_needed(s, xf, tf, tail_tol);
    let n = if need > max_terms as f64 { max_terms } else { need as u64 };
    let ph = ShiftedPhase::new(x, tau);
    let sum = chunked_sum(1, n + 1, |k| {
        let c = k as f64 - tf;
        cis_turns(ph.turns(k).wrapping_neg()) * (c.powf(-s) - (k as f64).powf(-s))
    });
    let bound = v_tail_bound(s, xf, tf, n);
    PartValue { value: RHO * xf.powf(s - 0.5) * sum, err: bound, count: n, converged: bound <= tail_tol }
}

/// Large-`c` expansion of `w(c)`:
/// `c^{-s} x^{-1/2} sum_{j>=1} binom(-s,2j) i^j (2j-1)!! (x/(2 pi c^2))^j`.
/// `None` when the terms start growing before reaching full precision.
fn w_asymptotic(s: f64, x: f64, c: f64) -> Option<Cplx> {
    let eps = x / (2.0 * PI * c * c);
    let lead = c.powf(-s) / x.sqrt();
    let mut binom = 1.0; // binom(-s, 2j)
    let mut dfact = 1.0; // (2j-1)!!
    let mut ij = Cplx::new(1.0, 0.0); // i^j
    let mut epsj = 1.0;
    let mut sum = Cplx::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    for j in 1..200 {
        let m = 2.0 * j as f64;
        binom *= (-s - m + 2.0) * (-s - m + 1.0) / ((m - 1.0) * m);
        dfact *= m - 1.0;
        ij *= Cplx::new(0.0, 1.0);
        epsj *= eps;
        let term = ij * (binom * dfact * epsj);
        let mag = term.norm();
        if mag > prev {
            return None;
        }
        sum += term;
        if mag <= 1e-18 * sum.norm().max(1e-300) || mag == 0.0 {
            return Some(sum * lead);
        }
        prev = mag;
    }
    None
}

/// `w(c) = int e^{-pi x u^2} ((rho x u + c)^{-s} - c^{-s}) du`.
pub fn w_kernel(s: f64, x: f64, c: f64, tol: f64, max_nodes: usize) -> (Cplx, f64) {
    if c * c >= 16.0 * x {
        if let Some(v) = w_asymptotic(s, x, c) {
            return (v, 0.0);
        }
    }
    let cs = c.powf(-s);
    let l = (46.0 / (PI * x)).sqrt();
    let q = integrate(
        |u| {
            let z = RHO * (x * u) + c;
            ((z.ln() * -s).exp() - cs) * (-PI * x * u * u).exp()
        },
        &[-l, 0.0, l],
        8,
        tol,
        max_nodes,
    );
    (q.value, q.err)
}

/// Conservative bound for `x^s sum_{k>N} |w(k - tau)|`.
pub fn w_tail_bound(s: f64, x: f64, tau: f64, n: u64) -> f64 {
    let c = n as f64 - tau;
    if c <= 0.0 {
        return f64::INFINITY;
    }
    1.5 * s * x.powf(s + 0.5) * c.powf(-s - 1.0) / (4.0 * PI)
}

/// `W_s = rho x^s sum_k e^{-i pi (k-tau)^2/x} w(k - tau)`.
pub fn w_s_integral(s: f64, x: &RealInput, tau: &RealInput, cfg: &QuadConfig) -> PartValue {
    if s == 0.0 {
        return PartValue::zero();
    }
    let xf = x.to_f64();
    let tf = tau.to_f64();
    let tol = cfg.series_tail_tol;
    let need = (tf + (1.5 * s * xf.powf(s + 0.5) / (4.0 * PI * tol)).powf(1.0 / (s + 1.0))).ceil().max(2.0);
    let n = if need > cfg.max_series_terms as f64 { cfg.max_series_terms } else { need as u64 };
    let ph = ShiftedPhase::new(x, tau);
    // kernels evaluated by quadrature (small c) carry their own error
    let near = ((4.0 * xf.sqrt() + tf).ceil() as u64).min(n);
    let mut quad_err = 0.0;
    let mut near_sum = Cplx::new(0.0, 0.0);
    for k in 1..=near {
        let c = k as f64 - tf;
        let (w, e) = w_kernel(s, xf, c, cfg.tol * 0.1, cfg.max_nodes);
        near_sum += cis_turns(ph.turns(k).wrapping_neg()) * w;
        quad_err += e;
    }
    let far = chunked_sum(near + 1, n + 1, |k| {
        let c = k as f64 - tf;
        let (w, _) = w_kernel(s, xf, c, cfg.tol * 0.1, cfg.max_nodes);
        cis_turns(ph.turns(k).wrapping_neg()) * w
    });
    let scale = xf.powf(s);
    let bound = w_tail_bound(s, xf, tf, n);
    PartValue {
        value: RHO * scale * (near_sum + far),
        err: scale * quad_err + bound,
        count: n,
        converged: bound <= tol,
    }
}

/// `V_s + W_s` as one integral with the inner series truncated at `n` terms:
/// `rho x^s int e^{-pi x u^2} sum_{k<=n} e^{-i pi (k-tau)^2/x} ((rho x u + k - tau)^{-s} - k^{-s}) du`.
pub fn vw_single_integral(s: f64, x: &RealInput, tau: &RealInput, n: u64, cfg: &QuadConfig) -> PartValue {
    if s == 0.0 {
        return PartValue::zero();
    }
    let xf = x.to_f64();
    let tf = tau.to_f64();
    let ph = ShiftedPhase::new(x, tau);
    let phases: Vec<Cplx> = (1..=n).map(|k| cis_turns(ph.turns(k).wrapping_neg())).collect();
    let ks: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-s)).collect();
    let l = (46.0 / (PI * xf)).sqrt();
    let q = integrate(
        |u| {
            let g = (-PI * xf * u * u).exp();
            let shift = RHO * (xf * u);
            let mut acc = Cplx::new(0.0, 0.0);
            for k in 0..n as usize {
                let z = shift + (k as f64 + 1.0 - tf);
                acc += phases[k] * ((z.ln() * -s).exp() - ks[k]);
            }
            acc * g
        },
        &[-l, 0.0, l],
        8,
        cfg.tol,
        cfg.max_nodes,
    );
    let trunc = xf.powf(s) * (xf.sqrt() + tf) * (n as f64 + 1.0 - tf).powf(-s);
    PartValue { value: RHO * xf.powf(s) * q.value, err: q.err + trunc, count: q.nodes as u64, converged: q.converged }
}
