//! Compensated summation and the chunked kernel used by every long sum.
//! Chunks are summed independently and merged in index order, so the result
//! does not depend on how many threads ran the chunks.

use super::phase::Cplx;

pub const CHUNK: u64 = 4096;

/// Neumaier accumulator for a complex sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

#[inline]
fn two_sum(s: &mut f64, c: &mut f64, x: f64) {
    let t = *s + x;
    if s.abs() >= x.abs() {
        *c += (*s - t) + x;
    } else {
        *c += (x - t) + *s;
    }
    *s = t;
}

impl CompSum {
    #[inline]
    pub fn add(&mut self, z: Cplx) {
        two_sum(&mut self.re, &mut self.re_c, z.re);
        two_sum(&mut self.im, &mut self.im_c, z.im);
    }

    pub fn merge(&mut self, o: &CompSum) {
        self.add(Cplx::new(o.re, o.im));
        self.re_c += o.re_c;
        self.im_c += o.im_c;
    }

    pub fn value(&self) -> Cplx {
        Cplx::new(self.re + self.re_c, self.im + self.im_c)
    }
}

pub fn comp_sum<I: IntoIterator<Item = Cplx>>(terms: I) -> Cplx {
    let mut acc = CompSum::default();
    for z in terms {
        acc.add(z);
    }
    acc.value()
}

fn chunk_sum<F: Fn(u64) -> Cplx>(lo: u64, hi: u64, c: u64, f: &F) -> CompSum {
    let a = lo + c * CHUNK;
    let b = (a + CHUNK).min(hi);
    let mut acc = CompSum::default();
    for k in a..b {
        acc.add(f(k));
    }
    acc
}

fn n_chunks(lo: u64, hi: u64) -> u64 {
    if hi <= lo {
        0
    } else {
        (hi - lo).div_ceil(CHUNK)
    }
}

fn merge_all(parts: &[CompSum]) -> Cplx {
    let mut acc = CompSum::default();
    for p in parts {
        acc.merge(p);
    }
    acc.value()
}

/// Sum of `f(k)` for `k` in `[lo, hi)` on the current thread.
pub fn chunked_sum_sequential<F: Fn(u64) -> Cplx>(lo: u64, hi: u64, f: F) -> Cplx {
    let parts: Vec<CompSum> = (0..n_chunks(lo, hi)).map(|c| chunk_sum(lo, hi, c, &f)).collect();
    merge_all(&parts)
}

/// Sum of `f(k)` for `k` in `[lo, hi)`; bit-identical to
/// [`chunked_sum_sequential`].
#[cfg(feature = "parallel")]
pub fn chunked_sum<F: Fn(u64) -> Cplx + Sync>(lo: u64, hi: u64, f: F) -> Cplx {
    use rayon::prelude::*;
    let parts: Vec<CompSum> =
        (0..n_chunks(lo, hi)).into_par_iter().map(|c| chunk_sum(lo, hi, c, &f)).collect();
    merge_all(&parts)
}

#[cfg(not(feature = "parallel"))]
pub fn chunked_sum<F: Fn(u64) -> Cplx + Sync>(lo: u64, hi: u64, f: F) -> Cplx {
    chunked_sum_sequential(lo, hi, f)
}

/// Ordered map over a slice, parallel when the feature is on.
#[cfg(feature = "parallel")]
pub fn ordered_map<T: Sync, U: Send, F: Fn(&T) -> U + Sync + Send>(items: &[T], f: F) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn ordered_map<T: Sync, U: Send, F: Fn(&T) -> U + Sync + Send>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(f).collect()
}
