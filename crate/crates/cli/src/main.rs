use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use modtheta::cf::{ecf_expand, floor_chain, orbit_products, rcf_expand, t_orbit};
use modtheta::diagnostics::{
    criteria_s_strong, criteria_beta, criteria_s, criteria_alpha, irrationality_profile, small_iterate_check, orbit_sums,
    u_density, CriteriaReport, WitnessVariant, OrbitSumMode, AlphaCondition,
};
use modtheta::expansion::{expand_series, expand_series_t, funceq_residual, Envelope, ExpansionConfig, ExpansionReport};
use modtheta::figures::{figure, fmt17, to_csv, Figure};
use modtheta::omega::{omega, QuadConfig};
use modtheta::precision::{parse_real, RealInput, DEFAULT_PREC};
use modtheta::theta::{hl_witness, partial_sum, SeriesParams};
use modtheta::{Error, ErrorKind};

#[derive(Parser, Debug)]
#[command(name = "modtheta", version, about = "Theta sums, their modular companion and continued-fraction dynamics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Real number: p/q, (a+b*sqrt(d))/c, or a decimal with optional @bits.
    #[arg(long, global = true, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, global = true)]
    s: Option<f64>,
    #[arg(long, global = true)]
    n: Option<u64>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Bits for decimal inputs that carry no @bits suffix.
    #[arg(long, global = true)]
    prec: Option<u32>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    mode: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Cmd {
    /// CSV of fig0, fig3 or fig4 on [0,2] (--mode picks the figure).
    Figure,
    /// Regular continued fraction digits and convergents.
    Cf,
    /// Even continued fraction digits and convergents.
    Ecf,
    /// T-orbit of x.
    Orbit,
    /// Orbit products with their convergent checks.
    Products,
    /// Floor chain K(l,n).
    Floors,
    /// Partial sum F_{s,n}(x,t).
    Psum,
    /// Omega_s(x,t) and its pieces.
    Omega,
    /// Residual of the functional equation (unit envelope constant).
    Residual,
    /// Iterated expansion at t = 0.
    Expand,
    /// Iterated expansion carrying t.
    ExpandT,
    /// Convergence criteria (--mode s|s-strong|beta|beta-log|alpha|alpha-log).
    Criteria,
    /// Orbit series (--mode absolute|phase_weighted|log_absolute|log_phase).
    OrbitSums,
    /// Lower bound for the irrationality exponent.
    MuLb,
    /// Invariant density of the U-map.
    Density,
    /// Hardy-Littlewood growth witness.
    HlWitness,
    /// Small-iterate witnesses (--mode literal|shifted).
    SmallIterates,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Figure => "figure",
            Cmd::Cf => "cf",
            Cmd::Ecf => "ecf",
            Cmd::Orbit => "orbit",
            Cmd::Products => "products",
            Cmd::Floors => "floors",
            Cmd::Psum => "psum",
            Cmd::Omega => "omega",
            Cmd::Residual => "residual",
            Cmd::Expand => "expand",
            Cmd::ExpandT => "expand-t",
            Cmd::Criteria => "criteria",
            Cmd::OrbitSums => "orbit-sums",
            Cmd::MuLb => "mu-lb",
            Cmd::Density => "density",
            Cmd::HlWitness => "hl-witness",
            Cmd::SmallIterates => "small-iterates",
        }
    }
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Input => 2,
            ErrorKind::Precision => 3,
            ErrorKind::Tolerance => 4,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type Out = Result<String, Failure>;

impl Cli {
    fn real(&self, text: &Option<String>, flag: &str) -> Result<RealInput, Failure> {
        let text = text.as_deref().ok_or_else(|| input(format!("--{flag} is required")))?;
        let is_decimal = !text.contains('/') && !text.contains('@') && (text.contains('.') || text.contains('e'));
        let full = match (self.prec, is_decimal) {
            (Some(p), true) => format!("{text}@{p}"),
            _ => text.to_string(),
        };
        Ok(parse_real(&full)?)
    }

    fn x(&self) -> Result<RealInput, Failure> {
        self.real(&self.x, "x")
    }

    fn t(&self) -> Result<RealInput, Failure> {
        match &self.t {
            Some(_) => self.real(&self.t, "t"),
            None => Ok(RealInput::int(0)),
        }
    }

    fn s(&self) -> Result<f64, Failure> {
        self.s.ok_or_else(|| input("--s is required"))
    }

    fn n(&self) -> Result<u64, Failure> {
        self.n.ok_or_else(|| input("--n is required"))
    }

    fn depth(&self, default: usize) -> usize {
        self.depth.unwrap_or(default)
    }

    fn quad(&self) -> QuadConfig {
        self.tol.map(QuadConfig::with_tol).unwrap_or_default()
    }

    /// Everything that determines the output, in a fixed order; the thread
    /// count is left out on purpose.
    fn header(&self) -> Vec<(String, String)> {
        let mut h = vec![
            ("modtheta".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("command".to_string(), self.cmd.name().to_string()),
        ];
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                h.push((k.to_string(), v));
            }
        };
        push("x", self.x.clone());
        push("t", self.t.clone());
        push("s", self.s.map(|v| v.to_string()));
        push("n", self.n.map(|v| v.to_string()));
        push("depth", self.depth.map(|v| v.to_string()));
        push("alpha", self.alpha.map(|v| v.to_string()));
        push("beta", self.beta.map(|v| v.to_string()));
        push("mode", self.mode.clone());
        push("grid", self.grid.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        h.push(("prec".to_string(), self.prec.unwrap_or(DEFAULT_PREC).to_string()));
        let q = self.quad();
        h.push(("tol".to_string(), format!("{:e}", q.tol)));
        h.push(("max_nodes".to_string(), q.max_nodes.to_string()));
        h.push(("max_series_terms".to_string(), q.max_series_terms.to_string()));
        h
    }
}

fn table(header: &[(String, String)], cols: &str, rows: &[String]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(cols);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    out
}

fn c17(z: Complex64) -> String {
    format!("{},{}", fmt17(z.re), fmt17(z.im))
}

fn criteria_rows(r: &CriteriaReport) -> Vec<String> {
    let mut rows = Vec::with_capacity(r.terms.len());
    for (i, (t, p)) in r.terms.iter().zip(&r.partials).enumerate() {
        let c = match &r.complex_partials {
            Some(cp) => c17(cp[i]),
            None => format!("{},0", fmt17(*p)),
        };
        rows.push(format!("{},{},{},{},{}", r.name, r.start + i, fmt17(*t), fmt17(*p), c));
    }
    rows
}

fn criteria_header(cli: &Cli, reps: &[CriteriaReport]) -> Vec<(String, String)> {
    let mut h = cli.header();
    for r in reps {
        h.push((format!("{}.verdict", r.name), r.verdict.to_string()));
        h.push((format!("{}.ratio_estimate", r.name), fmt17(r.ratio_estimate)));
    }
    h
}

fn expansion_table(cli: &Cli, r: &ExpansionReport) -> String {
    let mut h = cli.header();
    h.push(("reference".into(), c17(r.reference)));
    h.push(("reference_err".into(), fmt17(r.reference_err)));
    if let Some(j) = r.truncated_from {
        h.push(("truncated_from".into(), j.to_string()));
    }
    if let Some(hy) = &r.hypothesis {
        h.push(("hypothesis.verdict".into(), hy.verdict.to_string()));
    }
    let rows: Vec<String> = r
        .terms
        .iter()
        .enumerate()
        .map(|(j, t)| {
            format!(
                "{},{},{},{},{},{},{}",
                j,
                c17(t.phase),
                fmt17(t.product),
                c17(t.omega),
                c17(t.term),
                c17(r.partials[j]),
                fmt17(r.residuals[j])
            )
        })
        .collect();
    table(&h, "j,phase_re,phase_im,product,omega_re,omega_im,term_re,term_im,partial_re,partial_im,residual", &rows)
}

fn run(cli: &Cli) -> Out {
    let h = cli.header();
    match cli.cmd {
        Cmd::Figure => {
            let name = cli.mode.as_deref().ok_or_else(|| input("--mode fig0|fig3|fig4 is required"))?;
            let fig: Figure = name.parse()?;
            let rows = figure(fig, cli.grid.unwrap_or(2001), cli.n)?;
            Ok(to_csv(&h, &rows))
        }
        Cmd::Cf => {
            let r = rcf_expand(&cli.x()?, cli.depth(10))?;
            let mut h = h;
            h.push(("terminated".into(), r.terminated.to_string()));
            h.push(("truncated".into(), r.truncated.to_string()));
            let rows = (0..=r.depth())
                .map(|n| {
                    let a = if n == 0 { r.integer_part.to_string() } else { r.a(n).to_string() };
                    format!("{},{},{},{}", n, a, r.p(n), r.q(n))
                })
                .collect::<Vec<_>>();
            Ok(table(&h, "n,a,p,q", &rows))
        }
        Cmd::Ecf => {
            let r = ecf_expand(&cli.x()?, cli.depth(10))?;
            let mut h = h;
            h.push(("cusp".into(), r.cusp.to_string()));
            h.push(("truncated".into(), r.truncated.to_string()));
            let rows = (0..=r.depth())
                .map(|j| {
                    let (e, a) = if j == 0 { ("".to_string(), "".to_string()) } else {
                        (r.digits[j - 1].0.to_string(), r.digits[j - 1].1.to_string())
                    };
                    format!("{},{},{},{},{}", j, e, a, r.p(j), r.q(j))
                })
                .collect::<Vec<_>>();
            Ok(table(&h, "j,e,a,p,q", &rows))
        }
        Cmd::Orbit => {
            let o = t_orbit(&cli.x()?, cli.depth(10))?;
            let mut h = h;
            h.push(("stop".into(), format!("{:?}", o.stop)));
            let rows = o
                .points
                .iter()
                .enumerate()
                .map(|(j, p)| format!("{},{},{},{:e},{}", j, fmt17(p.value.to_f64()), p.value.sigma(), p.err, p.value))
                .collect::<Vec<_>>();
            Ok(table(&h, "j,value,sign,err,exact", &rows))
        }
        Cmd::Products => {
            let r = orbit_products(&cli.x()?, cli.depth(10))?;
            let rows = r
                .iter()
                .map(|p| {
                    format!(
                        "{},{},{},{},{},{},{}",
                        p.j,
                        fmt17(p.value_f64),
                        fmt17(p.via_convergents),
                        fmt17(p.lower),
                        fmt17(p.upper),
                        p.identity_ok,
                        p.sandwich_ok
                    )
                })
                .collect::<Vec<_>>();
            Ok(table(&h, "j,product,via_convergents,lower,upper,identity_ok,sandwich_ok", &rows))
        }
        Cmd::Floors => {
            let c = floor_chain(&cli.x()?, cli.n()?)?;
            let mut h = h;
            h.push(("L".into(), c.stop.to_string()));
            let rows = c.values.iter().enumerate().map(|(i, k)| format!("{},{}", i as i64 - 1, k)).collect::<Vec<_>>();
            Ok(table(&h, "l,K", &rows))
        }
        Cmd::Psum => {
            let mut p = SeriesParams::new(cli.s()?, cli.t()?);
            if let Some(b) = cli.prec {
                p.policy.prec = b;
            }
            let v = partial_sum(&p, &cli.x()?, cli.n()?)?;
            Ok(table(&h, "n,re,im,phase_error_bound", &[format!("{},{},{}", v.n, c17(v.value), fmt17(v.phase_error_bound))]))
        }
        Cmd::Omega => {
            let v = omega(cli.s()?, &cli.x()?, &cli.t()?, &cli.quad())?;
            let mut h = h;
            let d = v.diagnostics;
            h.push(("u_nodes".into(), d.u_nodes.to_string()));
            h.push(("u_cut".into(), fmt17(d.u_cut)));
            h.push(("v_terms".into(), d.v_terms.to_string()));
            h.push(("w_terms".into(), d.w_terms.to_string()));
            h.push(("converged".into(), d.converged.to_string()));
            let row = format!(
                "{},{},{},{},{}",
                c17(v.value),
                fmt17(v.est_error),
                c17(v.parts.u),
                c17(v.parts.v),
                c17(v.parts.w)
            );
            let out = table(&h, "re,im,est_error,u_re,u_im,v_re,v_im,w_re,w_im", &[row]);
            v.checked().map_err(|e| Failure { code: 4, msg: format!("{e}\n{out}") })?;
            Ok(out)
        }
        Cmd::Residual => {
            let s = cli.s()?;
            let r = funceq_residual(s, &cli.x()?, &cli.t()?, cli.n()?, &Envelope::unit(s), &cli.quad())?;
            let row = format!(
                "{},{},{},{},{},{},{}",
                r.n,
                r.parts.m,
                c17(r.residual),
                fmt17(r.residual.norm()),
                fmt17(r.bound),
                c17(r.parts.direct),
                c17(r.parts.modular)
            );
            Ok(table(&h, "n,m,re,im,abs,shape,direct_re,direct_im,modular_re,modular_im", &[row]))
        }
        Cmd::Expand => {
            let cfg = ExpansionConfig { quad: cli.quad(), ..Default::default() };
            let r = expand_series(cli.s()?, &cli.x()?, cli.depth(10), &cfg)?;
            Ok(expansion_table(cli, &r))
        }
        Cmd::ExpandT => {
            let cfg = ExpansionConfig { quad: cli.quad(), ..Default::default() };
            let r = expand_series_t(cli.s()?, &cli.x()?, &cli.t()?, cli.depth(10), &cfg)?;
            Ok(expansion_table(cli, &r))
        }
        Cmd::Criteria => {
            let x = cli.x()?;
            let n = cli.depth(20);
            let alpha = || cli.alpha.ok_or_else(|| input("--alpha is required"));
            let reps = match cli.mode.as_deref().unwrap_or("s") {
                "s" => vec![criteria_s(cli.s()?, &x, n)?],
                "s-strong" => vec![criteria_s_strong(cli.s()?, &x, n)?],
                "beta" | "beta-log" => {
                    let (ba, reps) =
                        criteria_beta(&x, alpha()?, cli.beta.unwrap_or(0.0), n, cli.mode.as_deref() == Some("beta-log"))?;
                    let mut hh = criteria_header(cli, &reps);
                    hh.push(("beta_critical".into(), fmt17(ba.beta_critical)));
                    hh.push(("regime".into(), format!("{:?}", ba.regime).to_lowercase()));
                    let rows: Vec<String> = reps.iter().flat_map(criteria_rows).collect();
                    return Ok(table(&hh, "series,index,term,partial,partial_re,partial_im", &rows));
                }
                "alpha" => vec![criteria_alpha(&x, alpha()?, cli.beta.unwrap_or(0.0), n, AlphaCondition::Power)?],
                "alpha-log" => vec![criteria_alpha(&x, alpha()?, 0.0, n, AlphaCondition::Log)?],
                other => return Err(input(format!("unknown criteria mode `{other}`"))),
            };
            let rows: Vec<String> = reps.iter().flat_map(criteria_rows).collect();
            Ok(table(&criteria_header(cli, &reps), "series,index,term,partial,partial_re,partial_im", &rows))
        }
        Cmd::OrbitSums => {
            let mode: OrbitSumMode = cli.mode.as_deref().unwrap_or("absolute").parse()?;
            let alpha = cli.alpha.ok_or_else(|| input("--alpha is required"))?;
            let r = orbit_sums(&cli.x()?, alpha, cli.beta.unwrap_or(0.0), cli.depth(30), mode)?;
            let reps = [r];
            Ok(table(&criteria_header(cli, &reps), "series,index,term,partial,partial_re,partial_im", &criteria_rows(&reps[0])))
        }
        Cmd::MuLb => {
            let prof = irrationality_profile(&cli.x()?, cli.depth(20))?;
            let mut best = f64::NEG_INFINITY;
            let rows: Vec<String> = prof
                .iter()
                .map(|(n, v)| {
                    best = best.max(*v);
                    format!("{},{},{}", n, fmt17(*v), fmt17(best))
                })
                .collect();
            Ok(table(&h, "n,ratio,mu_lb", &rows))
        }
        Cmd::Density => {
            let x = cli.x()?.to_f64();
            Ok(table(&h, "x,density", &[format!("{},{}", fmt17(x), fmt17(u_density(x)?))]))
        }
        Cmd::HlWitness => {
            let w = hl_witness(&cli.x()?, cli.n()?)?;
            Ok(table(&h, "sum_abs,bound_ratio,r_star", &[format!("{},{},{}", fmt17(w.sum_abs), fmt17(w.bound_ratio), w.r_star)]))
        }
        Cmd::SmallIterates => {
            let v = match cli.mode.as_deref().unwrap_or("shifted") {
                "literal" => WitnessVariant::Literal,
                "shifted" => WitnessVariant::Shifted,
                other => return Err(input(format!("unknown mode `{other}`"))),
            };
            let r = small_iterate_check(&cli.x()?, cli.depth(15), v)?;
            let mut h = h;
            h.push(("injective".into(), r.injective.to_string()));
            h.push(("holds".into(), r.holds.to_string()));
            let rows = r
                .witnesses
                .iter()
                .map(|w| format!("{},{},{},{}", w.j, fmt17(w.t_abs), fmt17(w.product), w.n.map(|n| n.to_string()).unwrap_or_default()))
                .collect::<Vec<_>>();
            Ok(table(&h, "j,t_abs,product,n", &rows))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(text) => {
            let res = match &cli.out {
                Some(path) => fs::write(path, text.as_bytes()),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = res {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
