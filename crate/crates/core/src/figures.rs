//! Grid evaluation of the plotted sums on `[0, 2]`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::omega::RHO;
use crate::precision::{ordered_map, Cplx, RealInput};
use crate::theta::{partial_sum, SeriesParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// `F_{2,n}(x)`, Riemann's series.
    Fig0,
    /// `F_{0.7,100}(x)`
    Fig3,
    /// `F_{0.7,1000}(x) - e^{i pi/4} x^{0.2} F_{0.7,floor(1000x)}(-1/x)`; undefined at `x = 0`.
    Fig4,
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig0" => Ok(Figure::Fig0),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            _ => Err(Error::InvalidInput(format!("unknown figure `{s}`"))),
        }
    }
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig0 => "fig0",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }
}

pub const FIG0_DEFAULT_N: u64 = 10_000;

fn f_at(s: f64, x: &RealInput, n: u64) -> Result<Cplx> {
    Ok(partial_sum(&SeriesParams::new(s, RealInput::int(0)), x, n)?.value)
}

fn fig4_at(x: &RealInput) -> Result<Cplx> {
    if x.is_zero() {
        return Ok(Cplx::new(f64::NAN, f64::NAN));
    }
    let m = x.mul(&RealInput::int(1000))?.floor();
    let m: u64 = m.try_into().map_err(|_| Error::InvalidInput("grid point out of range".into()))?;
    let direct = f_at(0.7, x, 1000)?;
    let dual = f_at(0.7, &x.recip()?.neg(), m)?;
    Ok(direct - RHO * x.to_f64().powf(0.2) * dual)
}

/// Rows `(x_i, value)` at `x_i = 2i/(grid-1)`, each `x_i` exact.
/// `n` overrides the term count of `fig0`.
pub fn figure(fig: Figure, grid: usize, n: Option<u64>) -> Result<Vec<(f64, Cplx)>> {
    if grid < 2 {
        return Err(Error::InvalidInput("grid must be at least 2".into()));
    }
    let den = (grid - 1) as i64;
    let idx: Vec<i64> = (0..grid as i64).collect();
    let n0 = n.unwrap_or(FIG0_DEFAULT_N);
    let rows = ordered_map(&idx, |&i| -> Result<(f64, Cplx)> {
        let x = RealInput::ratio(2 * i, den);
        let v = match fig {
            Figure::Fig0 => f_at(2.0, &x, n0)?,
            Figure::Fig3 => f_at(0.7, &x, 100)?,
            Figure::Fig4 => fig4_at(&x)?,
        };
        Ok((x.to_f64(), v))
    });
    rows.into_iter().collect()
}

/// Largest `|Im v_{i+1} - Im v_i|` over adjacent finite samples.
pub fn max_adjacent_jump(rows: &[(f64, Cplx)]) -> f64 {
    rows.windows(2)
        .map(|w| (w[1].1.im - w[0].1.im).abs())
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max)
}

/// `# key=value` header lines followed by `x,re,im` rows at 17 significant digits.
pub fn to_csv(header: &[(String, String)], rows: &[(f64, Cplx)]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("x,re,im\n");
    for (x, v) in rows {
        let _ = writeln!(out, "{},{},{}", fmt17(*x), fmt17(v.re), fmt17(v.im));
    }
    out
}

/// Shortest-safe round-trip rendering with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}
