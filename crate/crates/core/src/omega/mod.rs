//! `Omega_s(x,t)`, the continuous defect in the approximate modular equation
//! `F_s(x,t) ~ e^{i pi/4} e^{-i pi t^2/x} x^{s-1/2} F_s(-1/x, t/x) + Omega_s(x,t)`.
//!
//! For `x > 0` it is `I_s(x,{t}) = U_s + V_s + W_s`; for `x < 0` it is the
//! conjugate of `I_s(-x,{-t})`.

mod parts;

use std::f64::consts::{PI, SQRT_2};

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::precision::{Cplx, RealInput};
use crate::quad::integrate;

pub use parts::{
    contour_cut, u_s_integral, v_s_series, v_tail_bound, v_terms_needed, vw_single_integral, w_kernel,
    w_s_integral, w_tail_bound, PartValue, RHO,
};

/// Smallest `|x|` that [`omega`] accepts.
pub const OMEGA_MIN_X: f64 = 1e-6;
/// Smallest `|x|` that [`omega_regularized`] accepts.
pub const REGULARIZED_MIN_X: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadConfig {
    /// Target absolute error of each quadrature.
    pub tol: f64,
    pub max_nodes: usize,
    /// Contour truncation; `None` picks it from `tol` and `x`.
    pub u_cut: Option<f64>,
    pub series_tail_tol: f64,
    pub max_series_terms: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: 1e-10, max_nodes: 400_000, u_cut: None, series_tail_tol: 1e-10, max_series_terms: 20_000_000 }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadConfig { tol, series_tail_tol: tol, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaParts {
    pub u: Cplx,
    pub v: Cplx,
    pub w: Cplx,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaDiagnostics {
    pub u_nodes: u64,
    pub u_cut: f64,
    pub v_terms: u64,
    pub w_terms: u64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaValue {
    pub value: Cplx,
    pub est_error: f64,
    /// Pieces of `I_s` at `(|x|, {sigma t})`, before any conjugation.
    pub parts: OmegaParts,
    pub diagnostics: OmegaDiagnostics,
}

impl OmegaValue {
    /// `Err(ToleranceNotMet)` when some piece missed its target.
    pub fn checked(self) -> Result<Self> {
        if self.diagnostics.converged {
            Ok(self)
        } else {
            Err(Error::ToleranceNotMet(format!("omega est_error {:e}", self.est_error)))
        }
    }
}

/// `I_s(x, tau)` for `x > 0`, `tau` in `[0,1)`.
fn i_s(s: f64, x: &RealInput, tau: &RealInput, cfg: &QuadConfig) -> OmegaValue {
    let xf = x.to_f64();
    let tf = tau.to_f64();
    let (u, cut) = u_s_integral(s, xf, tf, cfg);
    let v = v_s_series(s, x, tau, cfg.series_tail_tol, cfg.max_series_terms);
    let w = w_s_integral(s, x, tau, cfg);
    OmegaValue {
        value: u.value + v.value + w.value,
        est_error: u.err + v.err + w.err,
        parts: OmegaParts { u: u.value, v: v.value, w: w.value },
        diagnostics: OmegaDiagnostics {
            u_nodes: u.count,
            u_cut: cut,
            v_terms: v.count,
            w_terms: w.count,
            converged: u.converged && v.converged && w.converged,
        },
    }
}

fn check_s(s: f64) -> Result<()> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::InvalidInput(format!("s = {s} must be finite and >= 0")));
    }
    Ok(())
}

fn omega_unguarded(s: f64, x: &RealInput, t: &RealInput, cfg: &QuadConfig) -> Result<OmegaValue> {
    check_s(s)?;
    if x.is_zero() {
        return Err(Error::Singularity(0.0));
    }
    let xf = x.to_f64();
    if xf.abs() > 2.0 {
        return Err(Error::InvalidInput(format!("|x| = {} exceeds 2", xf.abs())));
    }
    if x.signum() > 0 {
        Ok(i_s(s, x, &t.fract(), cfg))
    } else {
        let mut v = i_s(s, &x.neg(), &t.neg().fract(), cfg);
        v.value = v.value.conj();
        Ok(v)
    }
}

/// `Omega_s(x,t)` for `1e-6 <= |x| <= 2`.
pub fn omega(s: f64, x: &RealInput, t: &RealInput, cfg: &QuadConfig) -> Result<OmegaValue> {
    let xf = x.to_f64();
    if xf.abs() < OMEGA_MIN_X {
        return Err(Error::Singularity(xf));
    }
    omega_unguarded(s, x, t, cfg)
}

/// `c(s) = rho^{1-s} Gamma((1-s)/2) / (2 pi^{(1-s)/2})` for `0 <= s < 1`.
pub fn c_s(s: f64) -> Cplx {
    let a = (1.0 - s) / 2.0;
    Cplx::from_polar(1.0, PI * (1.0 - s) / 4.0) * (gamma(a) / (2.0 * PI.powf(a)))
}

/// The part of `Omega_s` that blows up at `x = 0`, for `0 <= s <= 1`.
pub fn singular_part(s: f64, x: f64) -> Cplx {
    let ax = x.abs();
    if s >= 1.0 {
        return Cplx::new((1.0 / ax.sqrt()).ln(), 0.0);
    }
    let c = if x < 0.0 { c_s(s).conj() } else { c_s(s) };
    c * ax.powf((s - 1.0) / 2.0)
}

/// `Delta_s(x) = Omega_s(x,0)` minus its singular part, for `0 <= s <= 1`.
pub fn omega_regularized(s: f64, x: &RealInput, cfg: &QuadConfig) -> Result<(Cplx, OmegaValue)> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidInput(format!("s = {s} outside [0,1]")));
    }
    let xf = x.to_f64();
    if xf.abs() < REGULARIZED_MIN_X {
        return Err(Error::Singularity(xf));
    }
    let om = omega_unguarded(s, x, &RealInput::int(0), cfg)?;
    Ok((om.value - singular_part(s, xf), om))
}

/// `U_s(0, tau)` for `s > 1`: the limit of `Omega_s(x, tau)` as `x -> 0+`.
pub fn u_at_zero(s: f64, tau: f64, cfg: &QuadConfig) -> Result<PartValue> {
    if s <= 1.0 {
        return Err(Error::InvalidInput(format!("U_s(0) diverges for s = {s} <= 1")));
    }
    let f = |u: f64| {
        let z = Cplx::new(0.5, 0.0) + RHO * u;
        let i = Cplx::new(0.0, 1.0);
        let e_arg = i * 2.0 * PI * RHO * u;
        let num = i * 2.0 * PI * z * tau - z.ln() * s;
        if u >= 0.0 {
            RHO * num.exp() / (e_arg.exp() + 1.0)
        } else {
            RHO * (num - e_arg).exp() / ((-e_arg).exp() + 1.0)
        }
    };
    // left side decays like e^{-sqrt2 pi (1-tau)|u|}, right side only algebraically
    let left = 40.0 / (SQRT_2 * PI * (1.0 - tau).max(1e-3));
    let right = 1e4;
    let mut breaks = vec![-left, 0.0];
    let mut b = 1.0;
    while b < right {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(right);
    let q = integrate(f, &breaks, 8, cfg.tol, cfg.max_nodes);
    let mut tail = Cplx::new(0.0, 0.0);
    let mut tail_err = 0.0;
    if tau == 0.0 {
        // int_R^inf rho z^{-s} du = (1/2 + rho R)^{1-s}/(s-1), up to e^{-sqrt2 pi R}
        tail = (Cplx::new(0.5, 0.0) + RHO * right).powf(1.0 - s) / (s - 1.0);
    } else {
        tail_err = right.powf(1.0 - s) / (s - 1.0);
    }
    Ok(PartValue { value: q.value + tail, err: q.err + tail_err, count: q.nodes as u64, converged: q.converged })
}
