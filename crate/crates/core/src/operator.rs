//! Formal differential operators of infinite order `P = sum_m u_m (.)_L d^m` with
//! monogenic coefficients, and their correspondence with right linear maps given
//! by the tables `b_p = F(V_p) / p!`:
//!
//! ```text
//! b_p = sum_{m <= p} u_m (.)_L V_{p-m}(x) / (p-m)!
//! u_m = sum_{p <= m} b_p (.)_L V_{m-p}(-x) / (m-p)!
//! ```
//!
//! Both maps only raise degrees, so truncating every series at a common degree
//! commutes with them and round trips are exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::growth::{ln_weighted_sup, LnNorms};
use crate::multiindex::{enumerate_up_to, ln_c_nm, MultiIndex};
use crate::proximate::{log_grid, ProximateOrder};
use crate::scalar::Scalar;
use crate::series::{log_sum_exp, MonogenicSeries};
use crate::{Error, Result};

/// Coefficient table `m -> u_m` of `P = sum u_m (.)_L d^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSymbol<S: Scalar> {
    n: usize,
    entries: BTreeMap<MultiIndex, MonogenicSeries<S>>,
}

/// Table `p -> b_p` for `|p| <= degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomTable<S: Scalar> {
    n: usize,
    degree: usize,
    entries: BTreeMap<MultiIndex, MonogenicSeries<S>>,
}

fn series_degree<'a, S: Scalar + 'a>(it: impl Iterator<Item = &'a MonogenicSeries<S>>) -> usize {
    it.map(MonogenicSeries::degree).max().unwrap_or(0)
}

/// `sum_k c_k (u (.)_L V_k)`, i.e. coefficients of `u` shifted by `k` and scaled,
/// accumulated into `acc` and truncated at `acc.degree()`.
fn add_shifted<S: Scalar>(acc: &mut MonogenicSeries<S>, u: &MonogenicSeries<S>, k: &MultiIndex, c: &S) -> Result<()> {
    let limit = acc.degree();
    for (j, a) in u.coeffs() {
        if j.degree() + k.degree() > limit {
            continue;
        }
        acc.add_coeff(j.add(k), a.scale(c))?;
    }
    Ok(())
}

/// `(-1)^{sign |k|} / k!`.
fn inv_factorial<S: Scalar>(k: &MultiIndex, alternate: bool) -> S {
    let num = if alternate && k.degree() % 2 == 1 { -1 } else { 1 };
    S::from_ratio(&BigInt::from(num), &BigInt::from(k.factorial()))
}

impl<S: Scalar> OperatorSymbol<S> {
    pub fn new(n: usize) -> Self {
        OperatorSymbol {
            n,
            entries: BTreeMap::new(),
        }
    }

    /// `P = 1 (.)_L d^0`, with the unit series truncated at `degree`.
    pub fn identity(n: usize, degree: usize) -> Self {
        let mut p = Self::new(n);
        p.insert(MultiIndex::zero(n), MonogenicSeries::unit(n, degree))
            .expect("same dimension");
        p
    }

    /// Sets `u_m`; zero series are dropped.
    pub fn insert(&mut self, m: MultiIndex, u: MonogenicSeries<S>) -> Result<()> {
        if m.dim() != self.n || u.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: if m.dim() != self.n { m.dim() } else { u.dim() },
            });
        }
        if u.is_zero() {
            self.entries.remove(&m);
        } else {
            self.entries.insert(m, u);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, m: &MultiIndex) -> Option<&MonogenicSeries<S>> {
        self.entries.get(m)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &MonogenicSeries<S>)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest `|m|` with `u_m != 0`.
    pub fn order(&self) -> usize {
        self.entries.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Common truncation degree of the coefficient series.
    pub fn series_degree(&self) -> usize {
        series_degree(self.entries.values())
    }

    /// Raises the truncation degree of every `u_m` to at least `degree`.
    pub fn with_series_degree(&self, degree: usize) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(m, u)| {
                let d = u.degree().max(degree);
                (m.clone(), u.with_degree(d).expect("raising the degree keeps all coefficients"))
            })
            .collect();
        OperatorSymbol { n: self.n, entries }
    }

    /// `Pf = sum_m u_m (.)_L d^m f`, truncated at `q_out`.
    pub fn apply(&self, f: &MonogenicSeries<S>, q_out: usize) -> Result<MonogenicSeries<S>> {
        if f.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: f.dim(),
            });
        }
        let mut out = MonogenicSeries::new(self.n, q_out);
        for (m, u) in &self.entries {
            if m.degree() > f.degree() {
                continue;
            }
            let d = f.derivative(m);
            if d.is_zero() {
                continue;
            }
            let term = u.ck_mul(&d, q_out)?;
            out = out.checked_add(&term)?;
        }
        Ok(out.with_degree(q_out).expect("within q_out"))
    }

    /// The table `b_p`, `|p| <= q`, each truncated at the operator's series degree.
    /// Both maps work modulo terms of total degree above that bound, so the
    /// full `b_p` needs a series degree of at least `|p| + ` the degree of `u_m`.
    pub fn to_hom(&self, q: usize) -> HomTable<S> {
        let d = self.series_degree();
        let entries = enumerate_up_to(self.n, q)
            .into_par_iter()
            .map(|p| {
                let mut b = MonogenicSeries::new(self.n, d);
                for (m, u) in &self.entries {
                    if let Some(k) = p.checked_sub(m) {
                        add_shifted(&mut b, u, &k, &inv_factorial::<S>(&k, false)).expect("same dimension");
                    }
                }
                (p, b)
            })
            .collect();
        HomTable {
            n: self.n,
            degree: q,
            entries,
        }
    }
}

/// Selects the denominator in the reconstruction of `P` from `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denominator {
    /// `b_s = F(V_s)/s!`, consistent with the inversion formula.
    #[default]
    SFactorial,
    /// `F(V_s) / ((m-s)! m!)`; breaks the telescoping and serves as a negative control.
    MFactorial,
}

impl<S: Scalar> HomTable<S> {
    pub fn new(n: usize, degree: usize) -> Self {
        HomTable {
            n,
            degree,
            entries: BTreeMap::new(),
        }
    }

    /// Sets `b_p` (zero series are kept: every index must be present).
    pub fn insert(&mut self, p: MultiIndex, b: MonogenicSeries<S>) -> Result<()> {
        if p.dim() != self.n || b.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: if p.dim() != self.n { p.dim() } else { b.dim() },
            });
        }
        if p.degree() > self.degree {
            return Err(Error::InvalidArgument(format!(
                "index {p:?} exceeds table degree {}",
                self.degree
            )));
        }
        self.entries.insert(p, b);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, p: &MultiIndex) -> Option<&MonogenicSeries<S>> {
        self.entries.get(p)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &MonogenicSeries<S>)> {
        self.entries.iter()
    }

    pub fn series_degree(&self) -> usize {
        series_degree(self.entries.values())
    }

    fn check_complete(&self) -> Result<()> {
        for p in enumerate_up_to(self.n, self.degree) {
            if !self.entries.contains_key(&p) {
                return Err(Error::IncompleteTable(p.entries().to_vec()));
            }
        }
        Ok(())
    }

    /// The operator `u_m`, `|m| <= degree`, each truncated at the table's series degree.
    pub fn to_op(&self) -> Result<OperatorSymbol<S>> {
        self.to_op_with(Denominator::SFactorial)
    }

    /// As [`HomTable::to_op`] with the chosen reconstruction denominator.
    pub fn to_op_with(&self, denom: Denominator) -> Result<OperatorSymbol<S>> {
        self.check_complete()?;
        let d = self.series_degree();
        let us: Vec<(MultiIndex, MonogenicSeries<S>)> = enumerate_up_to(self.n, self.degree)
            .into_par_iter()
            .map(|m| {
                let mut u = MonogenicSeries::new(self.n, d);
                for (p, b) in &self.entries {
                    if let Some(k) = m.checked_sub(p) {
                        let mut c = inv_factorial::<S>(&k, true);
                        if denom == Denominator::MFactorial {
                            // b_p here holds F(V_p) / p!; the printed variant divides F(V_p) by m! instead
                            c = c * S::from_ratio(&BigInt::from(p.factorial()), &BigInt::from(m.factorial()));
                        }
                        add_shifted(&mut u, b, &k, &c).expect("same dimension");
                    }
                }
                (m, u)
            })
            .collect();
        let mut op = OperatorSymbol::new(self.n);
        for (m, u) in us {
            op.insert(m, u)?;
        }
        Ok(op)
    }
}

/// The operator `P` with `P V_s = F(V_s)` for all `|s| <= q`, built from `b_s = F(V_s)/s!`.
/// `F` is called on `V_s` truncated at `degree`, which also truncates the table.
pub fn reconstruct_from_blackbox<S, F>(n: usize, q: usize, degree: usize, f: F) -> Result<OperatorSymbol<S>>
where
    S: Scalar,
    F: Fn(&MonogenicSeries<S>) -> Result<MonogenicSeries<S>>,
{
    reconstruct_with(n, q, degree, f, Denominator::SFactorial)
}

pub fn reconstruct_with<S, F>(n: usize, q: usize, degree: usize, f: F, denom: Denominator) -> Result<OperatorSymbol<S>>
where
    S: Scalar,
    F: Fn(&MonogenicSeries<S>) -> Result<MonogenicSeries<S>>,
{
    let mut table = HomTable::new(n, q);
    for s in enumerate_up_to(n, q) {
        let v = MonogenicSeries::fueter(&s, degree);
        let image = f(&v)?.truncate(degree);
        let b = image.scale(&S::from_ratio(&BigInt::from(1), &BigInt::from(s.factorial())));
        table.insert(s, b)?;
    }
    table.to_op_with(denom)
}

/// Largest coefficient-wise difference `max_{|s| <= q} |P V_s - F(V_s)|` (sup norm
/// over blades, converted to binary64; exactly 0 when `P` reproduces `F`).
pub fn blackbox_disagreement<S, F>(p: &OperatorSymbol<S>, q: usize, degree: usize, f: F) -> Result<f64>
where
    S: Scalar,
    F: Fn(&MonogenicSeries<S>) -> Result<MonogenicSeries<S>>,
{
    let mut worst: f64 = 0.0;
    for s in enumerate_up_to(p.dim(), q) {
        let v = MonogenicSeries::fueter(&s, degree);
        let lhs = p.apply(&v, degree)?;
        let rhs = f(&v)?.truncate(degree);
        let diff = lhs.checked_sub(&rhs)?;
        for (_, c) in diff.coeffs() {
            for (_, x) in c.terms() {
                worst = worst.max(x.to_f64().abs());
            }
        }
    }
    Ok(worst)
}

/// Outcome for one `(lambda, sigma)` grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassEntry {
    pub lambda: f64,
    pub sigma: f64,
    /// Smallest `C` with `||u_m||_{rho2,sigma} <= C G_{rho1,|m|} lambda^{|m|} / m!` on
    /// the table, reported when the per-degree ratio is non-increasing on the tail.
    pub c: Option<f64>,
    /// Worst increase of the per-degree log ratio over the tail degrees.
    pub tail_increase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassCertificate {
    pub entries: Vec<ClassEntry>,
    /// For every `lambda` some `sigma` works.
    pub every_lambda: bool,
    /// For every `sigma` some `lambda` works.
    pub every_sigma: bool,
    /// `max t_1(r)/t_2(r)` over the precondition grid.
    pub precondition_ratio: f64,
    /// Degrees treated as the tail.
    pub tail: (usize, usize),
}

/// `ln ||u||_{rho,sigma}` upper bound from the coefficient majorant.
pub fn ln_weighted_upper<S: Scalar>(u: &MonogenicSeries<S>, po: &ProximateOrder, sigma: f64) -> f64 {
    let terms: Vec<(usize, f64)> = LnNorms::from_series(u).degree_ln_sum().into_iter().collect();
    ln_weighted_sup(&terms, po, sigma).0
}

/// Checks `r^{rho_1(r)} = O(r^{rho_2(r)})` on a grid: the ratio on the last decade
/// may not exceed its maximum over the rest.
pub fn check_scale_domination(po1: &ProximateOrder, po2: &ProximateOrder) -> Result<f64> {
    let grid = log_grid(1e-3, 1e8, 400);
    let ratio = |r: f64| (po1.ln_t(r) - po2.ln_t(r)).exp();
    let head = grid.iter().filter(|&&r| r < 1e7).map(|&r| ratio(r)).fold(0.0, f64::max);
    let tail = grid.iter().filter(|&&r| r >= 1e7).map(|&r| ratio(r)).fold(0.0, f64::max);
    if tail > head * (1.0 + 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "r^rho1(r) is not O(r^rho2(r)) for {po1} -> {po2}: ratio still growing ({tail:.3e} > {head:.3e})"
        )));
    }
    Ok(head.max(tail))
}

/// Per-degree `max_{|m|=q} ln(||u_m||_{rho2,sigma} m! / G_{rho1,q})`, for every
/// degree up to `q_max` (`-inf` for vanishing degrees).
pub fn class_profile<S: Scalar>(
    p: &OperatorSymbol<S>,
    po1: &ProximateOrder,
    po2: &ProximateOrder,
    sigma: f64,
    q_max: usize,
) -> Vec<f64> {
    let mut prof = vec![f64::NEG_INFINITY; q_max + 1];
    for (m, u) in p.entries() {
        let q = m.degree();
        if q > q_max {
            continue;
        }
        let v = ln_weighted_upper(u, po2, sigma) + m.ln_factorial() - po1.ln_g(q);
        prof[q] = prof[q].max(v);
    }
    prof
}

/// Grid certificate for the classes defined by the bounds
/// `||u_m||_{rho2,sigma} <= C G_{rho1,|m|} lambda^{|m|} / m!`. The table is read
/// as the coefficient family up to `q_max` (default: the operator's order); a
/// pair `(lambda, sigma)` is accepted when the per-degree log ratio is
/// non-increasing over the last third of `0..=q_max`.
pub fn op_class_check<S: Scalar>(
    p: &OperatorSymbol<S>,
    po1: &ProximateOrder,
    po2: &ProximateOrder,
    sigma_grid: &[f64],
    lambda_grid: &[f64],
    q_max: Option<usize>,
) -> Result<ClassCertificate> {
    let precondition_ratio = check_scale_domination(po1, po2)?;
    let q_max = q_max.unwrap_or_else(|| p.order());
    let tail_lo = q_max - q_max / 3;
    let profiles: Vec<Vec<f64>> = sigma_grid
        .iter()
        .map(|&s| class_profile(p, po1, po2, s, q_max))
        .collect();
    let mut entries = Vec::new();
    for &lambda in lambda_grid {
        for (si, &sigma) in sigma_grid.iter().enumerate() {
            let ratios: Vec<f64> = profiles[si]
                .iter()
                .enumerate()
                .map(|(q, &v)| v - q as f64 * lambda.ln())
                .collect();
            let mut tail_increase = f64::NEG_INFINITY;
            for q in tail_lo..q_max {
                let (a, b) = (ratios[q], ratios[q + 1]);
                let inc = if b == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else if a == f64::NEG_INFINITY {
                    f64::INFINITY
                } else {
                    b - a
                };
                tail_increase = tail_increase.max(inc);
            }
            let ok = tail_increase <= 1e-9;
            let c_ln = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            entries.push(ClassEntry {
                lambda,
                sigma,
                c: ok.then(|| c_ln.exp()),
                tail_increase,
            });
        }
    }
    let works = |l: f64, s: f64| entries.iter().any(|e| e.lambda == l && e.sigma == s && e.c.is_some());
    let every_lambda = lambda_grid.iter().all(|&l| sigma_grid.iter().any(|&s| works(l, s)));
    let every_sigma = sigma_grid.iter().all(|&s| lambda_grid.iter().any(|&l| works(l, s)));
    Ok(ClassCertificate {
        entries,
        every_lambda,
        every_sigma,
        precondition_ratio,
        tail: (tail_lo, q_max),
    })
}

/// `C(n) = max_{1 <= |m| <= q_max} c(n,m)^{1/|m|}`.
pub fn cauchy_root_bound(n: usize, q_max: usize) -> f64 {
    enumerate_up_to(n, q_max)
        .iter()
        .filter(|m| !m.is_zero())
        .map(|m| (ln_c_nm(n, m) / m.degree() as f64).exp())
        .fold(0.0, f64::max)
}

/// Tail bounds of the series `sum_m ||u_m (.)_L d^m f||` for the convergence
/// argument of `Pf`, in natural logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityTail {
    pub epsilon: f64,
    /// `(C(n) (2 k tau)^{1/rho1})^{-1}`.
    pub threshold: f64,
    pub c_n: f64,
    /// Certificate constant at `lambda = epsilon`.
    pub c_epsilon: f64,
    /// `(M, ln sum_{q > M} C_eps eps^q (2 k tau)^{q/rho1} sum_{|m|=q} c(n,m))`.
    pub bound: Vec<(usize, f64)>,
    /// Same tail with the table's own `||u_m||_{rho2,sigma}` in place of the class bound.
    pub actual: Vec<(usize, f64)>,
}

impl ContinuityTail {
    /// Smallest `ln T(M) - ln T(M+1)` over consecutive cut-offs of the bound.
    pub fn min_log_decrease(&self) -> f64 {
        self.bound
            .windows(2)
            .map(|w| w[0].1 - w[1].1)
            .fold(f64::INFINITY, f64::min)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn continuity_tail<S: Scalar>(
    p: &OperatorSymbol<S>,
    po1: &ProximateOrder,
    po2: &ProximateOrder,
    sigma: f64,
    tau: f64,
    k: f64,
    epsilon: f64,
    cutoffs: std::ops::RangeInclusive<usize>,
    q_sum: usize,
) -> ContinuityTail {
    let n = p.dim();
    let rho1 = po1.rho();
    let c_n = cauchy_root_bound(n, 30);
    let threshold = 1.0 / (c_n * (2.0 * k * tau).powf(1.0 / rho1));
    let scale = (2.0 * k * tau).ln() / rho1;
    let q_op = p.order();
    let prof = class_profile(p, po1, po2, sigma, q_op);
    let c_epsilon = prof
        .iter()
        .enumerate()
        .map(|(q, v)| v - q as f64 * epsilon.ln())
        .fold(f64::NEG_INFINITY, f64::max)
        .exp();
    let ln_terms: Vec<f64> = (0..=q_sum)
        .map(|q| {
            q as f64 * (epsilon.ln() + scale) + degree_sum_c_ln(n, q)
        })
        .collect();
    let mut actual_terms: Vec<(usize, f64)> = Vec::new();
    for (m, u) in p.entries() {
        let q = m.degree();
        let v = ln_weighted_upper(u, po2, sigma) + m.ln_factorial() - po1.ln_g(q) + q as f64 * scale + ln_c_nm(n, m);
        actual_terms.push((q, v));
    }
    let bound = cutoffs
        .clone()
        .map(|mc| (mc, c_epsilon.ln() + log_sum_exp(&ln_terms[mc + 1..])))
        .collect();
    let actual = cutoffs
        .map(|mc| {
            let tail: Vec<f64> = actual_terms.iter().filter(|t| t.0 > mc).map(|t| t.1).collect();
            (mc, log_sum_exp(&tail))
        })
        .collect();
    ContinuityTail {
        epsilon,
        threshold,
        c_n,
        c_epsilon,
        bound,
        actual,
    }
}

/// `ln sum_{|m|=q} c(n,m) = ln(C(n+q-1, q) n^q)`.
fn degree_sum_c_ln(n: usize, q: usize) -> f64 {
    crate::scalar::ln_biguint(&crate::multiindex::binomial(n + q - 1, q)) + q as f64 * (n as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordNumber;
    use crate::fixtures::{random_rational_clifford, random_rational_series};
    use crate::scalar::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rq(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn random_op(n: usize, q: usize, d: usize, rng: &mut ChaCha8Rng) -> OperatorSymbol<Rational> {
        let mut p = OperatorSymbol::new(n);
        for m in enumerate_up_to(n, q) {
            let u = random_rational_series(n, d, rng);
            p.insert(m, u).unwrap();
        }
        p
    }

    fn random_table(n: usize, q: usize, d: usize, rng: &mut ChaCha8Rng) -> HomTable<Rational> {
        let mut h = HomTable::new(n, q);
        for p in enumerate_up_to(n, q) {
            h.insert(p, random_rational_series(n, d, rng)).unwrap();
        }
        h
    }

    #[test]
    fn apply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_rational_series(2, 5, &mut rng);
        let id = OperatorSymbol::identity(2, 5);
        assert_eq!(id.apply(&f, 3).unwrap(), f.truncate(3));

        let mut d1 = OperatorSymbol::new(2);
        d1.insert([1, 0].into(), MonogenicSeries::unit(2, 2)).unwrap();
        let g = MonogenicSeries::<Rational>::fueter(&[2, 0].into(), 2);
        let expect = MonogenicSeries::from_coeffs(2, 2, [([1, 0].into(), CliffordNumber::scalar(2, rq(2, 1)))]).unwrap();
        assert_eq!(d1.apply(&g, 2).unwrap(), expect);
        assert!(d1.apply(&MonogenicSeries::unit(3, 1), 2).is_err());
    }

    #[test]
    fn apply_is_right_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_op(2, 3, 3, &mut rng);
        let f = random_rational_series(2, 4, &mut rng);
        let g = random_rational_series(2, 4, &mut rng);
        let c = random_rational_clifford(2, &mut rng);
        let d = random_rational_clifford(2, &mut rng);
        let lhs = p
            .apply(&f.mul_right(&c).unwrap().checked_add(&g.mul_right(&d).unwrap()).unwrap(), 6)
            .unwrap();
        let rhs = p
            .apply(&f, 6)
            .unwrap()
            .mul_right(&c)
            .unwrap()
            .checked_add(&p.apply(&g, 6).unwrap().mul_right(&d).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hom_examples() {
        let h = OperatorSymbol::<Rational>::identity(2, 4).to_hom(4);
        for (p, b) in h.entries() {
            let expect = MonogenicSeries::from_coeffs(
                2,
                4,
                [(p.clone(), CliffordNumber::scalar(2, Rational::new(1.into(), BigInt::from(p.factorial()))))],
            )
            .unwrap();
            assert_eq!(b, &expect);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u0 = random_rational_series(2, 5, &mut rng);
        let mut p = OperatorSymbol::new(2);
        p.insert(MultiIndex::zero(2), u0.clone()).unwrap();
        for (q, b) in p.to_hom(3).entries() {
            let vq = MonogenicSeries::fueter(q, 5).scale(&Rational::new(1.into(), BigInt::from(q.factorial())));
            assert_eq!(b, &u0.ck_mul(&vq, 5).unwrap());
        }
    }

    #[test]
    fn identity_table_inverts_to_identity() {
        let h = OperatorSymbol::<Rational>::identity(2, 5).to_hom(5);
        assert_eq!(h.to_op().unwrap(), OperatorSymbol::identity(2, 5));
    }

    #[test]
    fn derivative_map_reconstructs_to_d1() {
        let d = 5;
        let op = reconstruct_from_blackbox::<Rational, _>(2, 5, d, |v| Ok(v.derivative(&[1, 0].into()).with_degree(d).unwrap())).unwrap();
        let mut expect = OperatorSymbol::new(2);
        expect.insert([1, 0].into(), MonogenicSeries::unit(2, d)).unwrap();
        assert_eq!(op, expect);
    }

    #[test]
    fn round_trips_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..3 {
            let p = random_op(2, 4, 3, &mut rng);
            assert_eq!(p.to_hom(4).to_op().unwrap(), p);
            let h = random_table(2, 4, 3, &mut rng);
            assert_eq!(h.to_op().unwrap().to_hom(4), h);
        }
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let mut h = OperatorSymbol::<Rational>::identity(2, 2).to_hom(2);
        h.entries.remove(&MultiIndex::from([1, 1]));
        assert_eq!(h.to_op(), Err(Error::IncompleteTable(vec![1, 1])));
    }

    #[test]
    fn blackbox_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_rational_series(2, 2, &mut rng);
        let q = 4;
        let d = q + 2;
        let op = reconstruct_from_blackbox::<Rational, _>(2, q, d, |v| g.ck_mul(v, d)).unwrap();
        let mut expect = OperatorSymbol::new(2);
        expect.insert(MultiIndex::zero(2), g.with_degree(d).unwrap()).unwrap();
        assert_eq!(op, expect);

        let comp = |v: &MonogenicSeries<Rational>| g.ck_mul(&v.derivative(&[1, 0].into()), d);
        let op = reconstruct_from_blackbox::<Rational, _>(2, q, d, comp).unwrap();
        let mut expect = OperatorSymbol::new(2);
        expect.insert([1, 0].into(), g.with_degree(d).unwrap()).unwrap();
        assert_eq!(op, expect);
        assert_eq!(blackbox_disagreement(&op, q, d, comp).unwrap(), 0.0);

        let bad = reconstruct_with::<Rational, _>(2, q, d, comp, Denominator::MFactorial).unwrap();
        assert!(blackbox_disagreement(&bad, q, d, comp).unwrap() > 0.0);
    }

    fn scaled_family(lambda0: f64, extra_factorial: bool, q_max: usize) -> OperatorSymbol<f64> {
        let po1 = ProximateOrder::constant(1.0).unwrap();
        let mut p = OperatorSymbol::new(1);
        for q in 0..=q_max {
            let m = MultiIndex::axis(1, 1, q as u32);
            let mut ln = po1.ln_g(q) - m.ln_factorial() + q as f64 * lambda0.ln();
            if extra_factorial {
                ln += crate::multiindex::ln_factorial(q);
            }
            p.insert(m, MonogenicSeries::constant(CliffordNumber::scalar(1, ln.exp()), 0)).unwrap();
        }
        p
    }

    #[test]
    fn class_check_examples() {
        let po1 = ProximateOrder::constant(1.0).unwrap();
        let po2 = ProximateOrder::constant(1.0).unwrap();
        let sig = [0.5, 1.0, 2.0];
        let lam = [0.5, 1.0, 2.0, 4.0];
        let mut fin = OperatorSymbol::<f64>::new(2);
        fin.insert([1, 0].into(), MonogenicSeries::unit(2, 3)).unwrap();
        fin.insert([0, 2].into(), MonogenicSeries::fueter(&[1, 1].into(), 3)).unwrap();
        let cert = op_class_check(&fin, &po1, &po2, &sig, &lam, Some(12)).unwrap();
        assert!(cert.every_lambda && cert.every_sigma);

        let p = scaled_family(2.0, false, 30);
        let cert = op_class_check(&p, &po1, &po2, &sig, &lam, None).unwrap();
        for e in &cert.entries {
            if e.lambda >= 2.0 {
                assert!((e.c.unwrap() - 1.0).abs() < 1e-9, "{e:?}");
            } else {
                assert!(e.c.is_none(), "{e:?}");
            }
        }
        assert!(!cert.every_lambda && cert.every_sigma);

        let p = scaled_family(1.0, true, 30);
        let cert = op_class_check(&p, &po1, &po2, &sig, &lam, None).unwrap();
        assert!(cert.entries.iter().all(|e| e.c.is_none()));
        assert!(!cert.every_lambda && !cert.every_sigma);

        let po_big = ProximateOrder::constant(2.0).unwrap();
        assert!(op_class_check(&fin, &po_big, &po1, &sig, &lam, None).is_err());
    }

    #[test]
    fn cauchy_root_bound_n2() {
        assert!((cauchy_root_bound(2, 30) - 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(cauchy_root_bound(1, 10), 1.0);
        for q in [1usize, 7, 20] {
            let oracle = Scalar::to_f64(&crate::multiindex::degree_sum_c(2, q)).ln();
            assert!((degree_sum_c_ln(2, q) - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn continuity_tail_geometric_below_threshold() {
        let po = ProximateOrder::constant(1.0).unwrap();
        let mut p = OperatorSymbol::<f64>::new(2);
        for m in enumerate_up_to(2, 30) {
            let q = m.degree();
            let ln = po.ln_g(q) - m.ln_factorial() - crate::multiindex::ln_factorial(q);
            p.insert(m, MonogenicSeries::constant(CliffordNumber::scalar(2, ln.exp()), 0)).unwrap();
        }
        let th = 1.0 / (6f64.sqrt() * 2.0);
        let t = continuity_tail(&p, &po, &po, 1.0, 1.0, 1.0, th / 4.0, 10..=20, 400);
        assert!((t.threshold - th).abs() < 1e-12);
        assert!(t.min_log_decrease() >= 2f64.ln(), "{t:?}");
        for w in t.actual.windows(2) {
            assert!(w[0].1 - w[1].1 >= 2f64.ln());
        }
        let above = continuity_tail(&p, &po, &po, 1.0, 1.0, 1.0, th * 2.0, 10..=20, 400);
        assert!(above.min_log_decrease() < 2f64.ln());
    }
}
