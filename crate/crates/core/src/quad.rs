//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::precision::{comp_sum, Cplx};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Cplx,
    pub err: f64,
    pub nodes: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: Cplx,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> Cplx>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    let value = k * h;
    let err = ((k - g) * h).norm();
    Panel { a, b, value, err }
}

/// Integrates `f` over the consecutive intervals given by `breaks`, each
/// first split into `init` panels, bisecting the worst panel until the summed
/// error estimate drops below `tol` or `max_nodes` evaluations are used.
pub fn integrate<F: Fn(f64) -> Cplx>(f: F, breaks: &[f64], init: usize, tol: f64, max_nodes: usize) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut nodes = 0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let n = init.max(1);
        for i in 0..n {
            let lo = a + (b - a) * i as f64 / n as f64;
            let hi = a + (b - a) * (i + 1) as f64 / n as f64;
            heap.push(gk15(&f, lo, hi));
            nodes += 15;
        }
    }
    let mut err: f64 = heap.iter().map(|p| p.err).sum();
    let mut stuck = 0.0;
    while err > tol && nodes + 30 <= max_nodes {
        let p = heap.pop().expect("nonempty");
        if p.err == 0.0 {
            heap.push(p);
            break;
        }
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // cannot split further; keep its error in the final report
            heap.push(Panel { err: 0.0, ..p });
            err -= p.err;
            stuck += p.err;
            continue;
        }
        let l = gk15(&f, p.a, m);
        let r = gk15(&f, m, p.b);
        err += l.err + r.err - p.err;
        heap.push(l);
        heap.push(r);
        nodes += 30;
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = comp_sum(panels.iter().map(|p| p.value));
    let err: f64 = panels.iter().map(|p| p.err).sum::<f64>() + stuck;
    QuadResult { value, err, nodes, converged: err <= tol }
}
