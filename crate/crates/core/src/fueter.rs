//! Fueter polynomials `V_m`, the monogenic counterpart of the monomials `z^k`.
//!
//! `V_m` is the average over all orderings of the word containing `m_i` copies
//! of `z_i = x_i - x_0 e_i`. Grouping the orderings by their last letter gives
//! the recursion used here,
//!
//! ```text
//! V_0 = 1,    V_m = (1/|m|) sum_{i: m_i > 0} m_i V_{m - e_i} z_i,
//! ```
//!
//! and the normalization `d_{x_i} V_m = m_i V_{m - e_i}`, i.e.
//! `d^p V_m(0) = delta_{pm} m!`, so that `f = sum V_m a_m` with `a_m = d^m f(0) / m!`.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::clifford::{CliffordNumber, Paravector};
use crate::multiindex::MultiIndex;
use crate::sampling::sphere_points;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Which recursion to run. Only [`FueterVariant::Standard`] produces Fueter
/// polynomials; the others exist as negative controls for the verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FueterVariant {
    #[default]
    Standard,
    /// `V_m = z_k V_{m - e_k}` with `k` the first axis where `m_k > 0`, i.e. the
    /// ordered word `z_1^{m_1} ... z_n^{m_n}`. Averaging the left-multiplied
    /// recursion over `k` would reproduce `V_m`, so the average is dropped as well.
    /// Not left monogenic once two distinct axes occur.
    LeftFactors,
    /// Prefactor `m!/|m|!` on the full permutation sum, i.e. `m! V_m`.
    PermutationPrefactor,
}

/// The variable `z_i = x_i - x_0 e_i` (axis `i` 1-based).
pub fn fueter_var<S: Scalar>(i: usize, x: &Paravector<S>) -> Result<CliffordNumber<S>> {
    let n = x.dim();
    if i == 0 || i > n {
        return Err(Error::AxisOutOfRange { axis: i, n });
    }
    let mut out = CliffordNumber::scalar(n, x.xv[i - 1].clone());
    let e = CliffordNumber::unit(n, i)?.scale(&(-x.x0.clone()));
    out += &e;
    Ok(out)
}

/// Memoized values of `V_m` at one point.
#[derive(Debug, Clone)]
pub struct FueterCache<S: Scalar> {
    point: Paravector<S>,
    z: Vec<CliffordNumber<S>>,
    memo: HashMap<MultiIndex, CliffordNumber<S>>,
    variant: FueterVariant,
}

impl<S: Scalar> FueterCache<S> {
    pub fn new(point: Paravector<S>) -> Self {
        Self::with_variant(point, FueterVariant::Standard)
    }

    pub fn with_variant(point: Paravector<S>, variant: FueterVariant) -> Self {
        let n = point.dim();
        let z = (1..=n)
            .map(|i| fueter_var(i, &point).expect("axis in range"))
            .collect();
        let mut memo = HashMap::new();
        memo.insert(MultiIndex::zero(n), CliffordNumber::one(n));
        FueterCache {
            point,
            z,
            memo,
            variant,
        }
    }

    pub fn point(&self) -> &Paravector<S> {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    /// `V_m` at the cached point.
    pub fn get(&mut self, m: &MultiIndex) -> Result<CliffordNumber<S>> {
        let n = self.dim();
        if m.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.dim(),
            });
        }
        if !self.memo.contains_key(m) {
            // lexicographic order visits every m - e_i before m
            for p in m.lower_set() {
                if self.memo.contains_key(&p) {
                    continue;
                }
                let value = self.step(&p);
                self.memo.insert(p, value);
            }
        }
        let v = self.memo[m].clone();
        Ok(match self.variant {
            FueterVariant::PermutationPrefactor => v.scale(&S::from_biguint(&m.factorial())),
            _ => v,
        })
    }

    fn step(&self, m: &MultiIndex) -> CliffordNumber<S> {
        let n = self.dim();
        if self.variant == FueterVariant::LeftFactors {
            let k = (1..=n).find(|&i| m.get(i) > 0).expect("m != 0");
            return self.z[k - 1].checked_mul(&self.memo[&m.dec(k).expect("m_k > 0")]).expect("same n");
        }
        let total = m.degree() as i64;
        let mut acc = CliffordNumber::zero(n);
        for i in 1..=n {
            let mi = m.get(i);
            if mi == 0 {
                continue;
            }
            let prev = &self.memo[&m.dec(i).expect("m_i > 0")];
            let weight = S::from_ratio(&BigInt::from(mi), &BigInt::from(total));
            let z = &self.z[i - 1];
            prev.scale(&weight).mul_acc_into(z, &mut acc);
        }
        acc
    }
}

/// `V_m(x)`.
pub fn fueter_eval<S: Scalar>(m: &MultiIndex, x: &Paravector<S>) -> Result<CliffordNumber<S>> {
    FueterCache::new(x.clone()).get(m)
}

/// Exact differentiation rule `d_{x_i} V_m = m_i V_{m - e_i}`; the index is `None`
/// when `m_i = 0` (the derivative vanishes).
pub fn fueter_derivative_rule(m: &MultiIndex, i: usize) -> (u32, Option<MultiIndex>) {
    match m.dec(i) {
        Some(p) => (m.get(i), Some(p)),
        None => (0, None),
    }
}

/// Sampled `max |V_m(x)|` over the closed unit ball. `V_m` is homogeneous, so the
/// maximum sits on the sphere; the signed axes are always among the samples.
pub fn fueter_sup_unit_ball(m: &MultiIndex, samples: usize, seed: u64) -> f64 {
    if m.is_zero() {
        return 1.0;
    }
    sphere_points(m.dim(), 1.0, samples, seed)
        .into_iter()
        .map(|x| fueter_eval(m, &x).expect("dimension").norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::enumerate_up_to;
    use crate::scalar::Rational;

    fn para(x0: f64, xv: &[f64]) -> Paravector<f64> {
        Paravector::new(x0, xv.to_vec())
    }

    fn close(a: &CliffordNumber<f64>, b: &CliffordNumber<f64>, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn variable_examples() {
        assert!(fueter_var(1, &para(0.0, &[0.0, 0.0])).unwrap().is_zero());
        let v = fueter_var(2, &para(0.0, &[0.0, 1.0])).unwrap();
        assert_eq!(v, CliffordNumber::one(2));
        let v = fueter_var(2, &para(1.0, &[0.0, 0.0])).unwrap();
        assert_eq!(v, CliffordNumber::blade(2, 0b10, -1.0).unwrap());
        assert!(fueter_var(3, &para(1.0, &[0.0, 0.0])).is_err());
    }

    #[test]
    fn low_degree_values() {
        let x = para(0.3, &[0.7, -1.1]);
        assert_eq!(fueter_eval(&MultiIndex::zero(2), &x).unwrap(), CliffordNumber::one(2));
        let v = fueter_eval(&[1, 0].into(), &x).unwrap();
        let expected = CliffordNumber::from_terms(2, [(0, 0.7), (0b01, -0.3)]).unwrap();
        assert!(close(&v, &expected, 1e-15));
        // (e1 e2 + e2 e1) / 2 = 0
        let v = fueter_eval(&[1, 1].into(), &para(1.0, &[0.0, 0.0])).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn recursion_matches_permutation_average() {
        fn perms(word: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
            if k == word.len() {
                out.push(word.clone());
                return;
            }
            for j in k..word.len() {
                word.swap(k, j);
                perms(word, k + 1, out);
                word.swap(k, j);
            }
        }
        let x = Paravector::<Rational>::new(
            Rational::new(1.into(), 3.into()),
            vec![Rational::new((-2).into(), 5.into()), Rational::new(3.into(), 7.into()), Rational::new(1.into(), 2.into())],
        );
        for m in enumerate_up_to(3, 4) {
            let mut word: Vec<usize> = (1..=3).flat_map(|i| std::iter::repeat_n(i, m.get(i) as usize)).collect();
            let mut all = Vec::new();
            perms(&mut word, 0, &mut all);
            let mut sum = CliffordNumber::zero(3);
            for w in &all {
                let prod = w.iter().fold(CliffordNumber::one(3), |acc, &i| &acc * &fueter_var(i, &x).unwrap());
                sum += &prod;
            }
            let avg = sum.scale(&Rational::new(1.into(), (all.len() as i64).into()));
            assert_eq!(fueter_eval(&m, &x).unwrap(), avg, "{m:?}");
        }
    }

    #[test]
    fn derivative_rule_examples() {
        assert_eq!(fueter_derivative_rule(&[2, 0].into(), 1), (2, Some([1, 0].into())));
        assert_eq!(fueter_derivative_rule(&[0, 1].into(), 1), (0, None));
        assert_eq!(fueter_derivative_rule(&[1, 1].into(), 2), (1, Some([1, 0].into())));
    }

    #[test]
    fn derivative_rule_matches_finite_differences() {
        let h = 1e-5;
        let x = para(0.4, &[-0.3, 0.8]);
        for (m, i) in [([2u32, 0u32], 1usize), ([1, 1], 2), ([3, 2], 1), ([1, 3], 2)] {
            let m: MultiIndex = m.into();
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp.xv[i - 1] += h;
            xm.xv[i - 1] -= h;
            let fd = (&fueter_eval(&m, &xp).unwrap() - &fueter_eval(&m, &xm).unwrap()).scale(&(0.5 / h));
            let (k, p) = fueter_derivative_rule(&m, i);
            let exact = fueter_eval(&p.unwrap(), &x).unwrap().scale(&(k as f64));
            assert!(fd.max_abs_diff(&exact) <= 1e-7 * (1.0 + exact.norm()), "{m:?}");
        }
    }

    #[test]
    fn sup_on_unit_ball() {
        assert_eq!(fueter_sup_unit_ball(&MultiIndex::zero(2), 10, 0), 1.0);
        let s = fueter_sup_unit_ball(&MultiIndex::axis(3, 1, 5), 200, 0);
        assert!((s - 1.0).abs() < 1e-12);
        let s = fueter_sup_unit_ball(&[1, 1].into(), 10_000, 0);
        assert!(s > 0.0 && s <= 1.0 + 1e-12, "{s}");
    }

    #[test]
    fn norm_bound_at_random_points() {
        let pts = crate::sampling::ball_points(3, 2.0, 50, 4);
        for m in enumerate_up_to(3, 6) {
            for x in &pts {
                let v = fueter_eval(&m, x).unwrap().norm();
                let bound = x.norm().powi(m.degree() as i32);
                assert!(v <= bound * (1.0 + 1e-12) + 1e-300, "{m:?}");
            }
        }
    }

    #[test]
    fn axis_relabeling_symmetry_exact() {
        // permuting axes of both the index and the point permutes the generators;
        // compare via the induced blade relabeling
        let q = |a: i64, b: i64| Rational::new(a.into(), b.into());
        let x = Paravector::new(q(1, 2), vec![q(2, 3), q(-1, 4), q(3, 5)]);
        let perm = [2usize, 0, 1];
        let mut xp = x.clone();
        for (i, &p) in perm.iter().enumerate() {
            xp.xv[p] = x.xv[i].clone();
        }
        for m in enumerate_up_to(3, 4) {
            let v = fueter_eval(&m, &x).unwrap();
            let vp = fueter_eval(&m.permuted(&perm), &xp).unwrap();
            // e_A maps to the product of relabeled generators, which may reorder
            let mapped = relabel(&v, &perm);
            assert_eq!(mapped, vp, "{m:?}");
        }
    }

    fn relabel(v: &CliffordNumber<Rational>, perm: &[usize]) -> CliffordNumber<Rational> {
        let n = v.dim();
        let mut out = CliffordNumber::zero(n);
        for (mask, c) in v.terms() {
            let mut prod = CliffordNumber::scalar(n, c.clone());
            for (i, &k) in perm.iter().enumerate().take(n) {
                if mask >> i & 1 == 1 {
                    prod = &prod * &CliffordNumber::unit(n, k + 1).unwrap();
                }
            }
            out += &prod;
        }
        out
    }
}
