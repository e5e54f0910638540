use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::rcf::{rcf_expand, RcfExpansion};
use crate::error::Result;
use crate::precision::RealInput;

/// Even continued fraction `x = e_1/(a_1 + e_2/(a_2 + ...))` of a point in
/// (-1, 1], with every `a_j` even.
#[derive(Clone, Debug, PartialEq)]
pub struct EcfExpansion {
    /// `(e_j, a_j)` for `j = 1, 2, ...`
    pub digits: Vec<(i8, BigUint)>,
    /// `(p_j, q_j)` for `j = 0..=digits.len()`, starting from `(0, 1)`.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// Finite expansion (rational input) fully produced.
    pub terminated: bool,
    /// The expansion ends on an odd digit: the orbit reaches the cusp 1.
    pub cusp: bool,
    /// Float precision ran out before the requested depth.
    pub truncated: bool,
}

/// Rewrites RCF digits `[A_1, A_2, ...]` of a point in (0,1) into ECF pairs.
///
/// `(e, A odd), (1, B), (1, C)` becomes `(e, A+1), (-1, 2) x (B-1), (-1, C+1)`.
/// When `complete` is false the digits are a prefix of an infinite expansion
/// and only pairs fixed by that prefix are emitted.
pub fn singularize(digits: &[BigUint], complete: bool, max_len: usize) -> (Vec<(i8, BigUint)>, bool) {
    let mut out: Vec<(i8, BigUint)> = Vec::new();
    let mut cusp = false;
    let mut i = 0usize;
    let mut e: i8 = 1;
    let mut a = match digits.first() {
        Some(a) => a.clone(),
        None => return (out, false),
    };
    let two = BigUint::from(2u32);
    while out.len() < max_len {
        if !a.bit(0) {
            out.push((e, a));
            i += 1;
            if i >= digits.len() {
                break;
            }
            e = 1;
            a = digits[i].clone();
            continue;
        }
        let Some(b) = digits.get(i + 1) else {
            if complete {
                out.push((e, a));
                cusp = true;
            }
            break;
        };
        out.push((e, &a + 1u32));
        let mut run = b - 1u32;
        while !run.is_zero() && out.len() < max_len {
            out.push((-1, two.clone()));
            run -= 1u32;
        }
        match digits.get(i + 2) {
            Some(c) => {
                e = -1;
                a = c + 1u32;
                i += 2;
            }
            None => break,
        }
    }
    out.truncate(max_len);
    (out, cusp)
}

pub(crate) fn ecf_convergents(digits: &[(i8, BigUint)]) -> Vec<(BigInt, BigInt)> {
    let mut conv = Vec::with_capacity(digits.len() + 1);
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    conv.push((p1.clone(), q1.clone()));
    for (e, a) in digits {
        let a = BigInt::from(a.clone());
        let e = BigInt::from(*e);
        let p2 = &a * &p1 + &e * &p0;
        let q2 = &a * &q1 + &e * &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        conv.push((p1.clone(), q1.clone()));
    }
    conv
}

impl EcfExpansion {
    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn q(&self, j: usize) -> &BigInt {
        &self.convergents[j].1
    }

    pub fn p(&self, j: usize) -> &BigInt {
        &self.convergents[j].0
    }

    /// Signed tail `r_j` with `r_j = e_{j+1}/(a_{j+1} + r_{j+1})`, evaluated
    /// backward from the deepest digit with seed `seed` (in [-1,1]).
    pub fn tails(&self, seed: &BigRational) -> Vec<BigRational> {
        let d = self.depth();
        let mut r = vec![BigRational::zero(); d + 1];
        r[d] = seed.clone();
        for j in (0..d).rev() {
            let (e, a) = &self.digits[j];
            let den = BigRational::from_integer(BigInt::from(a.clone())) + &r[j + 1];
            r[j] = BigRational::from_integer(BigInt::from(*e)) / den;
        }
        r
    }

    /// Value of the first `j` pairs with the tail set to 0.
    pub fn truncated_value(&self, j: usize) -> BigRational {
        let (p, q) = &self.convergents[j];
        BigRational::new(p.clone(), q.clone())
    }
}

/// ECF of `x` reduced mod 2 into (-1, 1].
pub fn ecf_expand(x: &RealInput, depth: usize) -> Result<EcfExpansion> {
    let y = x.mod2_sym();
    let sign = y.signum();
    if sign == 0 {
        return Ok(EcfExpansion {
            digits: Vec::new(),
            convergents: ecf_convergents(&[]),
            terminated: true,
            cusp: false,
            truncated: false,
        });
    }
    let ay = y.abs();
    // every two RCF digits yield at least one ECF pair
    let rcf: RcfExpansion = rcf_expand(&ay, 2 * depth + 4)?;
    let (mut digits, mut cusp) = if rcf.integer_part.is_one() {
        // |x| = 1
        (Vec::new(), true)
    } else {
        singularize(&rcf.digits, rcf.terminated, depth)
    };
    if rcf.truncated {
        cusp = false;
    }
    if sign < 0 {
        if let Some(first) = digits.first_mut() {
            first.0 = -first.0;
        }
    }
    let truncated = rcf.truncated && digits.len() < depth;
    let terminated = rcf.terminated && digits.len() < depth;
    Ok(EcfExpansion { convergents: ecf_convergents(&digits), digits, terminated, cusp, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: &[u32]) -> Vec<BigUint> {
        v.iter().map(|&a| BigUint::from(a)).collect()
    }

    fn pairs(v: &[(i8, u32)]) -> Vec<(i8, BigUint)> {
        v.iter().map(|&(e, a)| (e, BigUint::from(a))).collect()
    }

    #[test]
    fn rewrite_golden() {
        let (d, _) = singularize(&u(&[1; 12]), false, 4);
        assert_eq!(d, pairs(&[(1, 2), (-1, 2), (1, 2), (-1, 2)]));
    }

    #[test]
    fn rewrite_long_run() {
        // [3, 4, 5]: (1,4), (-1,2) x 3, (-1,6)
        let (d, cusp) = singularize(&u(&[3, 4, 5]), true, 10);
        assert_eq!(d, pairs(&[(1, 4), (-1, 2), (-1, 2), (-1, 2), (-1, 6)]));
        assert!(!cusp);
        // rational 1/3 = [3] ends on an odd digit
        let (d, cusp) = singularize(&u(&[3]), true, 10);
        assert_eq!(d, pairs(&[(1, 3)]));
        assert!(cusp);
    }

    #[test]
    fn value_preserved() {
        let x = RealInput::ratio(17, 40);
        let e = ecf_expand(&x, 30).unwrap();
        assert!(e.terminated);
        let v = e.truncated_value(e.depth());
        assert_eq!(RealInput::Rational(v), x);
        for (_, a) in &e.digits {
            assert!(!a.bit(0));
        }
    }
}
