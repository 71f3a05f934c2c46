//! Degree-truncated Taylor series `f(x) = sum_{|m| <= Q} V_m(x) a_m` with Clifford
//! coefficients on the right (left-monogenic convention).

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::clifford::{CliffordNumber, Paravector};
use crate::fueter::FueterCache;
use crate::multiindex::MultiIndex;
use crate::sampling::sphere_points;
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MonogenicSeries<S: Scalar> {
    n: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, CliffordNumber<S>>,
}

/// Degree-`q` homogeneous part `P_q(x) = sum_{|m| = q} V_m(x) a_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPart<S: Scalar> {
    pub degree: usize,
    pub series: MonogenicSeries<S>,
}

/// Sampled lower bound and coefficient upper bound for `M(r, f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusBounds {
    pub lower: f64,
    pub upper: f64,
}

impl<S: Scalar> MonogenicSeries<S> {
    pub fn new(n: usize, degree: usize) -> Self {
        MonogenicSeries {
            n,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs<I>(n: usize, degree: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, CliffordNumber<S>)>,
    {
        let mut out = Self::new(n, degree);
        for (m, c) in coeffs {
            out.add_coeff(m, c)?;
        }
        Ok(out)
    }

    /// The constant function `c`.
    pub fn constant(c: CliffordNumber<S>, degree: usize) -> Self {
        let n = c.dim();
        let mut out = Self::new(n, degree);
        out.add_coeff(MultiIndex::zero(n), c).expect("degree 0 fits");
        out
    }

    /// The CK-unit, i.e. the constant 1.
    pub fn unit(n: usize, degree: usize) -> Self {
        Self::constant(CliffordNumber::one(n), degree)
    }

    /// `V_m` itself, truncated at `degree` (empty when `|m| > degree`).
    pub fn fueter(m: &MultiIndex, degree: usize) -> Self {
        let n = m.dim();
        let mut out = Self::new(n, degree);
        if m.degree() <= degree {
            out.coeffs.insert(m.clone(), CliffordNumber::one(n));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, m: &MultiIndex) -> Option<&CliffordNumber<S>> {
        self.coeffs.get(m)
    }

    /// Non-zero coefficients in lexicographic index order.
    pub fn coeffs(&self) -> impl Iterator<Item = (&MultiIndex, &CliffordNumber<S>)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Largest `|m|` carrying a non-zero coefficient.
    pub fn top_degree(&self) -> Option<usize> {
        self.coeffs.keys().map(MultiIndex::degree).max()
    }

    /// `a_m += c`, dropping the entry when it becomes zero.
    pub fn add_coeff(&mut self, m: MultiIndex, c: CliffordNumber<S>) -> Result<()> {
        if m.dim() != self.n || c.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: if m.dim() != self.n { m.dim() } else { c.dim() },
            });
        }
        if m.degree() > self.degree {
            return Err(Error::InvalidArgument(format!(
                "index {m:?} exceeds truncation degree {}",
                self.degree
            )));
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.coeffs.get_mut(&m) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.coeffs.remove(&m);
                }
            }
            None => {
                self.coeffs.insert(m, c);
            }
        }
        Ok(())
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Restrict to `|m| <= q`.
    pub fn truncate(&self, q: usize) -> Self {
        MonogenicSeries {
            n: self.n,
            degree: q,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() <= q)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Same coefficients under a different truncation degree, which must cover them.
    pub fn with_degree(&self, degree: usize) -> Result<Self> {
        Self::from_coeffs(
            self.n,
            degree,
            self.coeffs.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = Self::new(self.n, self.degree.max(other.degree));
        for (m, c) in self.coeffs.iter().chain(&other.coeffs) {
            out.add_coeff(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MonogenicSeries {
            n: self.n,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Multiply by a real scalar.
    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::new(self.n, self.degree);
        for (m, c) in &self.coeffs {
            out.add_coeff(m.clone(), c.scale(s)).expect("same shape");
        }
        out
    }

    /// Right multiplication by a Clifford constant: `f(x) c = sum V_m (a_m c)`.
    pub fn mul_right(&self, c: &CliffordNumber<S>) -> Result<Self> {
        let mut out = Self::new(self.n, self.degree);
        for (m, a) in &self.coeffs {
            out.add_coeff(m.clone(), a.checked_mul(c)?)?;
        }
        Ok(out)
    }

    /// Left multiplication of every coefficient, `sum V_m (c a_m)`; this is `c_series (.)_L f`
    /// for the constant series `c`.
    pub fn mul_coeffs_left(&self, c: &CliffordNumber<S>) -> Result<Self> {
        let mut out = Self::new(self.n, self.degree);
        for (m, a) in &self.coeffs {
            out.add_coeff(m.clone(), c.checked_mul(a)?)?;
        }
        Ok(out)
    }

    pub fn homogeneous_part(&self, q: usize) -> HomogeneousPart<S> {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(m, _)| m.degree() == q)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        HomogeneousPart {
            degree: q,
            series: MonogenicSeries {
                n: self.n,
                degree: q,
                coeffs,
            },
        }
    }

    /// `f(x) = sum V_m(x) a_m`.
    pub fn eval(&self, x: &Paravector<S>) -> Result<CliffordNumber<S>> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        let mut cache = FueterCache::new(x.clone());
        let mut out = CliffordNumber::zero(self.n);
        for (m, a) in &self.coeffs {
            cache.get(m)?.mul_acc_into(a, &mut out);
        }
        Ok(out)
    }

    /// `d^p f`: `(d^p f)_m = ((m+p)!/m!) a_{m+p}`, truncated at `Q - |p|`.
    pub fn derivative(&self, p: &MultiIndex) -> Self {
        let shift = p.degree();
        if shift > self.degree {
            return Self::new(self.n, 0);
        }
        let mut out = Self::new(self.n, self.degree - shift);
        for (m, a) in &self.coeffs {
            let Some(base) = m.checked_sub(p) else {
                continue;
            };
            let w = falling_product(m, p);
            out.coeffs.insert(base, a.scale(&S::from_biguint(&w)));
        }
        out
    }

    /// CK-product `f (.)_L g = sum_p V_p sum_{m+k=p} a_m b_k`, truncated at `|p| <= q_out`.
    pub fn ck_mul(&self, g: &Self, q_out: usize) -> Result<Self> {
        self.same_dim(g)?;
        let mut acc: BTreeMap<MultiIndex, CliffordNumber<S>> = BTreeMap::new();
        for (m, a) in &self.coeffs {
            let dm = m.degree();
            if dm > q_out {
                continue;
            }
            for (k, b) in &g.coeffs {
                if dm + k.degree() > q_out {
                    continue;
                }
                let slot = acc
                    .entry(m.add(k))
                    .or_insert_with(|| CliffordNumber::zero(self.n));
                a.mul_acc_into(b, slot);
            }
        }
        let mut out = Self::new(self.n, q_out);
        for (p, c) in acc {
            out.add_coeff(p, c)?;
        }
        Ok(out)
    }

    /// `sum ||a_m|| r^{|m|}`, an upper bound for `M(r, f)`.
    pub fn coefficient_bound(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(m, a)| a.norm() * r.powi(m.degree() as i32))
            .sum()
    }

    /// `ln sum ||a_m|| r^{|m|}`, evaluated without overflow.
    pub fn ln_coefficient_bound(&self, r: f64) -> f64 {
        let ln_r = r.ln();
        let terms: Vec<f64> = self
            .coeffs
            .iter()
            .map(|(m, a)| {
                let d = m.degree();
                let ln_a = a.norm().ln();
                if d == 0 {
                    ln_a
                } else {
                    ln_a + d as f64 * ln_r
                }
            })
            .collect();
        log_sum_exp(&terms)
    }

    pub fn to_f64(&self) -> MonogenicSeries<f64> {
        MonogenicSeries {
            n: self.n,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (m.clone(), c.to_f64()))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Norms `||a_m||` of the stored coefficients.
    pub fn coeff_norms(&self) -> BTreeMap<MultiIndex, f64> {
        self.coeffs
            .iter()
            .map(|(m, c)| (m.clone(), c.norm()))
            .collect()
    }
}

/// `(m)!/(m-p)!` componentwise, i.e. `prod_i m_i (m_i - 1) ... (m_i - p_i + 1)`.
fn falling_product(m: &MultiIndex, p: &MultiIndex) -> BigUint {
    m.entries()
        .iter()
        .zip(p.entries())
        .fold(BigUint::one(), |acc, (&mi, &pi)| {
            (0..pi).fold(acc, |a, j| a * (mi - j))
        })
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

impl MonogenicSeries<f64> {
    /// Evaluate at many points in parallel.
    pub fn eval_many(&self, points: &[Paravector<f64>]) -> Result<Vec<CliffordNumber<f64>>> {
        points.par_iter().map(|x| self.eval(x)).collect()
    }

    /// Sampled `max ||f(x)||` over `||x|| = r` (signed axes included) and the
    /// coefficient bound `sum ||a_m|| r^{|m|}`.
    pub fn max_modulus(&self, r: f64, samples: usize, seed: u64) -> ModulusBounds {
        let upper = self.coefficient_bound(r);
        let lower = if r == 0.0 {
            self.coeff(&MultiIndex::zero(self.n))
                .map_or(0.0, CliffordNumber::norm)
        } else {
            sphere_points(self.n, r, samples, seed)
                .par_iter()
                .map(|x| self.eval(x).expect("dimension checked").norm())
                .reduce(|| 0.0, f64::max)
        };
        ModulusBounds { lower, upper }
    }

    /// Max over `points` of `||D f||` by central differences of step `h`.
    pub fn dirac_residual(&self, points: &[Paravector<f64>], h: f64) -> f64 {
        dirac_residual_fn(self.n, |x| self.eval(x).expect("dimension"), points, h)
    }
}

/// Max over `points` of the central-difference Dirac operator
/// `d_0 f + sum e_i d_i f` applied to an arbitrary function.
pub fn dirac_residual_fn<F>(n: usize, f: F, points: &[Paravector<f64>], h: f64) -> f64
where
    F: Fn(&Paravector<f64>) -> CliffordNumber<f64> + Sync,
{
    assert!(h > 0.0, "finite-difference step must be positive");
    points
        .par_iter()
        .map(|x| {
            let mut total = CliffordNumber::zero(n);
            for k in 0..=n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                *xp.coord_mut(k) += h;
                *xm.coord_mut(k) -= h;
                let d = (&f(&xp) - &f(&xm)).scale(&(0.5 / h));
                if k == 0 {
                    total += &d;
                } else {
                    let e = CliffordNumber::unit(n, k).expect("axis");
                    total += &(&e * &d);
                }
            }
            total.norm()
        })
        .reduce(|| 0.0, f64::max)
}
