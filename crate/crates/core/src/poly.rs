//! Clifford-valued polynomials in the real coordinates `x_0, ..., x_n`.
//!
//! Used to certify Fueter polynomials symbolically: exact partial derivatives,
//! exact Dirac operator, exact evaluation.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::clifford::{CliffordNumber, Paravector};
use crate::fueter::FueterVariant;
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;

/// `sum_k x^k c_k` with exponent vectors `k` of length `n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClPoly<S: Scalar> {
    n: usize,
    terms: BTreeMap<Vec<u32>, CliffordNumber<S>>,
}

impl<S: Scalar> ClPoly<S> {
    pub fn zero(n: usize) -> Self {
        ClPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: CliffordNumber<S>) -> Self {
        let n = c.dim();
        let mut p = Self::zero(n);
        p.push(vec![0; n + 1], c);
        p
    }

    /// `x_k * c`.
    pub fn monomial(k: usize, c: CliffordNumber<S>) -> Self {
        let n = c.dim();
        let mut e = vec![0; n + 1];
        e[k] = 1;
        let mut p = Self::zero(n);
        p.push(e, c);
        p
    }

    fn push(&mut self, exps: Vec<u32>, c: CliffordNumber<S>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push(e.clone(), c.clone());
        }
        out
    }

    /// Product with Clifford coefficients multiplied in order `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.push(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.push(e.clone(), c.scale(s));
        }
        out
    }

    /// `d/dx_k`.
    pub fn partial(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[k] -= 1;
            out.push(d, c.scale(&S::from_i64(e[k] as i64)));
        }
        out
    }

    /// Left Dirac operator `d_0 f + sum_i e_i d_i f`.
    pub fn dirac(&self) -> Self {
        let mut out = self.partial(0);
        for i in 1..=self.n {
            let e = ClPoly::constant(CliffordNumber::unit(self.n, i).expect("axis"));
            out = out.add(&e.mul(&self.partial(i)));
        }
        out
    }

    pub fn eval(&self, x: &Paravector<S>) -> CliffordNumber<S> {
        let mut out = CliffordNumber::zero(self.n);
        for (e, c) in &self.terms {
            let mut w = S::one();
            for (k, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    w = w * x.coord(k);
                }
            }
            out += &c.scale(&w);
        }
        out
    }

    /// Value at the origin (the constant term).
    pub fn at_origin(&self) -> CliffordNumber<S> {
        self.terms
            .get(&vec![0; self.n + 1])
            .cloned()
            .unwrap_or_else(|| CliffordNumber::zero(self.n))
    }
}

/// `z_i = x_i - x_0 e_i` as a polynomial.
pub fn fueter_var_poly<S: Scalar>(n: usize, i: usize) -> ClPoly<S> {
    let xi = ClPoly::monomial(i, CliffordNumber::one(n));
    let x0e = ClPoly::monomial(0, CliffordNumber::unit(n, i).expect("axis").scale(&-S::one()));
    xi.add(&x0e)
}

/// Symbolic `V_m` built by the same recursion as [`crate::fueter::FueterCache`].
pub fn fueter_poly<S: Scalar>(m: &MultiIndex, variant: FueterVariant) -> ClPoly<S> {
    let n = m.dim();
    let mut memo: BTreeMap<MultiIndex, ClPoly<S>> = BTreeMap::new();
    memo.insert(MultiIndex::zero(n), ClPoly::constant(CliffordNumber::one(n)));
    let z: Vec<ClPoly<S>> = (1..=n).map(|i| fueter_var_poly(n, i)).collect();
    for p in m.lower_set() {
        if p.is_zero() {
            continue;
        }
        if variant == FueterVariant::LeftFactors {
            let k = (1..=n).find(|&i| p.get(i) > 0).expect("p != 0");
            let v = z[k - 1].mul(&memo[&p.dec(k).expect("p_k > 0")]);
            memo.insert(p, v);
            continue;
        }
        let total = p.degree() as i64;
        let mut acc = ClPoly::zero(n);
        for i in 1..=n {
            let pi = p.get(i);
            if pi == 0 {
                continue;
            }
            let prev = memo[&p.dec(i).expect("p_i > 0")]
                .scale(&S::from_ratio(&BigInt::from(pi), &BigInt::from(total)));
            acc = acc.add(&prev.mul(&z[i - 1]));
        }
        memo.insert(p, acc);
    }
    let v = memo.remove(m).expect("computed");
    match variant {
        FueterVariant::PermutationPrefactor => v.scale(&S::from_biguint(&m.factorial())),
        _ => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fueter::fueter_eval;
    use crate::multiindex::enumerate_up_to;
    use crate::scalar::Rational;

    #[test]
    fn symbolic_fueter_polynomials_are_monogenic() {
        for m in enumerate_up_to(3, 5) {
            let v: ClPoly<Rational> = fueter_poly(&m, FueterVariant::Standard);
            assert!(v.dirac().is_zero(), "{m:?}");
        }
    }

    #[test]
    fn left_factor_recursion_is_not_monogenic() {
        let v: ClPoly<Rational> = fueter_poly(&[1, 1].into(), FueterVariant::LeftFactors);
        assert!(!v.dirac().is_zero());
        // a single axis stays inside the commutative span of 1 and e_1
        let v: ClPoly<Rational> = fueter_poly(&[3, 0].into(), FueterVariant::LeftFactors);
        assert!(v.dirac().is_zero());
    }

    #[test]
    fn symbolic_matches_pointwise() {
        let q = |a: i64, b: i64| Rational::new(a.into(), b.into());
        let x = Paravector::new(q(2, 3), vec![q(-1, 2), q(5, 7)]);
        for m in enumerate_up_to(2, 5) {
            let v: ClPoly<Rational> = fueter_poly(&m, FueterVariant::Standard);
            assert_eq!(v.eval(&x), fueter_eval(&m, &x).unwrap());
        }
    }
}
