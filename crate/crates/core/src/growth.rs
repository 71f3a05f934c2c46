//! Growth of entire monogenic functions on a proximate-order scale: weighted
//! norms `||f||_{rho,sigma}`, the homogeneous sups `K_q`, and finite-window
//! estimators of order, type and membership in `A_{rho,sigma+0}`.
//!
//! All magnitudes are carried as natural logarithms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::multiindex::{binomial, ln_c_nm, MultiIndex};
use crate::proximate::ProximateOrder;
use crate::sampling::sphere_points;
use crate::scalar::{format_f64, ln_biguint, Scalar};
use crate::series::{log_sum_exp, MonogenicSeries};
use crate::{Error, Result};

/// Inclusive range of degrees `lo..=hi` standing in for a `limsup`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
}

impl Window {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "window must satisfy 1 <= lo <= hi, got {lo}:{hi}"
            )));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, q: usize) -> bool {
        self.lo <= q && q <= self.hi
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }

    fn empty(&self) -> Error {
        Error::EmptyWindow {
            lo: self.lo,
            hi: self.hi,
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected q0:q1, got {s:?}")))?;
        let p = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad degree {v:?}: {e}")))
        };
        Window::new(p(a)?, p(b)?)
    }
}

/// Table `m -> ln ||a_m||` of non-zero coefficient norms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LnNorms {
    n: usize,
    entries: BTreeMap<MultiIndex, f64>,
}

impl LnNorms {
    pub fn new(n: usize) -> Self {
        LnNorms {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Records `ln ||a_m||`; `-inf` (a zero coefficient) is dropped.
    pub fn insert(&mut self, m: MultiIndex, ln_norm: f64) -> Result<()> {
        if m.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: m.dim(),
            });
        }
        if ln_norm.is_nan() || ln_norm == f64::INFINITY {
            return Err(Error::InvalidArgument(format!("log norm {ln_norm} for {m:?}")));
        }
        if ln_norm > f64::NEG_INFINITY {
            self.entries.insert(m, ln_norm);
        }
        Ok(())
    }

    pub fn from_series<S: Scalar>(f: &MonogenicSeries<S>) -> Self {
        let mut out = LnNorms::new(f.dim());
        for (m, a) in f.coeffs() {
            out.insert(m.clone(), ln_norm(a)).expect("same dimension");
        }
        out
    }

    /// The axis family `ln ||a_{q e_1}|| = (q/rho) ln(e rho sigma / q)` for `q` in
    /// `degrees`, optionally multiplied by `c(n, q e_1)`.
    pub fn axis_family(
        n: usize,
        rho: f64,
        sigma: f64,
        degrees: std::ops::RangeInclusive<usize>,
        with_cauchy_constant: bool,
    ) -> Self {
        let mut out = LnNorms::new(n);
        for q in degrees {
            let m = MultiIndex::axis(n, 1, q as u32);
            let mut v = crate::fixtures::axis_ln_norm(rho, sigma, q);
            if with_cauchy_constant {
                v += ln_c_nm(n, &m);
            }
            out.insert(m, v).expect("same dimension");
        }
        out
    }

    pub fn get(&self, m: &MultiIndex) -> Option<f64> {
        self.entries.get(m).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.entries.iter().map(|(m, v)| (m, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Applies `v -> g(m, v)` to every entry.
    pub fn map<G: Fn(&MultiIndex, f64) -> f64>(&self, g: G) -> Self {
        LnNorms {
            n: self.n,
            entries: self.entries.iter().map(|(m, &v)| (m.clone(), g(m, v))).collect(),
        }
    }

    /// Groups entries by total degree.
    pub fn by_degree(&self) -> BTreeMap<usize, Vec<(&MultiIndex, f64)>> {
        let mut out: BTreeMap<usize, Vec<(&MultiIndex, f64)>> = BTreeMap::new();
        for (m, &v) in &self.entries {
            out.entry(m.degree()).or_default().push((m, v));
        }
        out
    }

    /// `max_{|m| = q} ln ||a_m||` for each populated degree.
    pub fn degree_max(&self) -> BTreeMap<usize, f64> {
        self.by_degree()
            .into_iter()
            .map(|(q, v)| (q, v.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max)))
            .collect()
    }

    /// `ln sum_{|m| = q} ||a_m||` for each populated degree.
    pub fn degree_ln_sum(&self) -> BTreeMap<usize, f64> {
        self.by_degree()
            .into_iter()
            .map(|(q, v)| (q, log_sum_exp(&v.iter().map(|x| x.1).collect::<Vec<_>>())))
            .collect()
    }
}

fn ln_norm<S: Scalar>(a: &crate::CliffordNumber<S>) -> f64 {
    let v = a.norm();
    if v > 0.0 && v.is_finite() {
        v.ln()
    } else if a.is_zero() {
        f64::NEG_INFINITY
    } else {
        // f64 under/overflow of the scaled norm: fall back to the largest entry.
        let big = a
            .coeffs()
            .iter()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max);
        big.ln()
    }
}

/// Bracket `[lower, upper]` for a quantity, both as natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnBounds {
    pub ln_lower: f64,
    pub ln_upper: f64,
}

impl LnBounds {
    pub fn exact(v: f64) -> Self {
        LnBounds {
            ln_lower: v,
            ln_upper: v,
        }
    }

    pub fn lower(&self) -> f64 {
        self.ln_lower.exp()
    }

    pub fn upper(&self) -> f64 {
        self.ln_upper.exp()
    }
}

/// `||f||_{rho,sigma}` bracket together with the maximizing radius of the upper function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNorm {
    pub bounds: LnBounds,
    pub r_star: f64,
}

/// `ln sup_r (sum_q A_q r^q) exp(-sigma t(r))` for terms `(q, ln A_q)`, with the
/// maximizing `u = ln r`. The supremum over `r -> 0+` (value `A_0`) is included.
pub fn ln_weighted_sup(terms: &[(usize, f64)], po: &ProximateOrder, sigma: f64) -> (f64, f64) {
    let terms: Vec<(f64, f64)> = terms
        .iter()
        .filter(|t| t.1 > f64::NEG_INFINITY)
        .map(|&(q, a)| (q as f64, a))
        .collect();
    if terms.is_empty() {
        return (f64::NEG_INFINITY, 0.0);
    }
    let objective = |u: f64| {
        let ln_sum = log_sum_exp(&terms.iter().map(|&(q, a)| a + q * u).collect::<Vec<_>>());
        ln_sum - sigma * po.ln_t_of_ln(u).exp()
    };
    let top = terms.iter().map(|t| t.0).fold(0.0, f64::max);
    let ln_mass = log_sum_exp(&terms.iter().map(|t| t.1).collect::<Vec<_>>());
    let u_lo = -60.0;
    let mut u_hi: f64 = 1.0;
    while sigma * po.ln_t_of_ln(u_hi).exp() < top * u_hi.max(0.0) + ln_mass.abs() + 60.0 {
        u_hi += 1.0 + 0.25 * u_hi.abs();
        if u_hi > 1e4 {
            break;
        }
    }
    let steps = 600;
    let h = (u_hi - u_lo) / steps as f64;
    let (mut best_i, mut best) = (0usize, f64::NEG_INFINITY);
    for i in 0..=steps {
        let v = objective(u_lo + h * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut a = u_lo + h * best_i.saturating_sub(1) as f64;
    let mut b = (u_lo + h * (best_i + 1) as f64).min(u_hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..200 {
        if b - a < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = objective(d);
        }
    }
    let u_star = 0.5 * (a + b);
    let mut value = objective(u_star).max(best);
    // r -> 0+ limit: only the constant term survives with weight 1.
    if let Some(&(_, a0)) = terms.iter().find(|t| t.0 == 0.0) {
        value = value.max(a0);
    }
    (value, u_star)
}

/// Upper and sampled lower bounds for `||f||_{rho,sigma}`. The upper function is
/// `sup_r (sum ||a_m|| r^{|m|}) e^{-sigma t(r)}`; the lower bound is the sampled
/// `M(r, f) e^{-sigma t(r)}` near its maximizer, and `||a_0||`.
pub fn weighted_norm(
    f: &MonogenicSeries<f64>,
    po: &ProximateOrder,
    sigma: f64,
    samples: usize,
    seed: u64,
) -> Result<WeightedNorm> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let norms = LnNorms::from_series(f);
    let terms: Vec<(usize, f64)> = norms.degree_ln_sum().into_iter().collect();
    let (ln_upper, u_star) = ln_weighted_sup(&terms, po, sigma);
    if ln_upper == f64::NEG_INFINITY {
        return Ok(WeightedNorm {
            bounds: LnBounds::exact(f64::NEG_INFINITY),
            r_star: 0.0,
        });
    }
    let mut ln_lower = norms
        .get(&MultiIndex::zero(f.dim()))
        .unwrap_or(f64::NEG_INFINITY);
    for du in [-0.5, -0.2, 0.0, 0.2, 0.5] {
        let u = u_star + du;
        let r = u.exp();
        let m = f.max_modulus(r, samples, seed).lower;
        if m > 0.0 {
            ln_lower = ln_lower.max(m.ln() - sigma * po.ln_t_of_ln(u).exp());
        }
    }
    Ok(WeightedNorm {
        bounds: LnBounds {
            ln_lower: ln_lower.min(ln_upper),
            ln_upper,
        },
        r_star: u_star.exp(),
    })
}

/// `K_q = sup_{||x|| <= 1} ||P_q(x)||`: sampled on the unit sphere (which carries
/// the sup by homogeneity; signed axes included) and bounded by `sum ||a_m||`.
pub fn k_q(f: &MonogenicSeries<f64>, q: usize, samples: usize, seed: u64) -> LnBounds {
    let part = f.homogeneous_part(q).series;
    if part.is_zero() {
        return LnBounds::exact(f64::NEG_INFINITY);
    }
    let ln_upper = LnNorms::from_series(&part)
        .degree_ln_sum()
        .get(&q)
        .copied()
        .unwrap_or(f64::NEG_INFINITY);
    let pts = sphere_points(f.dim(), 1.0, samples, seed);
    let lower = pts
        .par_iter()
        .map(|x| part.eval(x).expect("dimension").norm())
        .reduce(|| 0.0, f64::max);
    LnBounds {
        ln_lower: lower.ln().min(ln_upper),
        ln_upper,
    }
}

/// Degree-indexed table of `K_q` brackets.
pub type KqTable = BTreeMap<usize, LnBounds>;

pub fn kq_table_from_series(f: &MonogenicSeries<f64>, samples: usize, seed: u64) -> KqTable {
    let degrees: Vec<usize> = LnNorms::from_series(f).by_degree().keys().copied().collect();
    degrees
        .into_par_iter()
        .map(|q| (q, k_q(f, q, samples, seed)))
        .collect()
}

/// `K_q` brackets from coefficient norms alone: exact when degree `q` carries a
/// single axis index, otherwise `max ||a_m|| / c(n,m) <= K_q <= sum ||a_m||`.
pub fn kq_table_from_norms(norms: &LnNorms) -> KqTable {
    let n = norms.dim();
    norms
        .by_degree()
        .into_iter()
        .map(|(q, list)| {
            if list.len() == 1 && list[0].0.entries().iter().filter(|&&e| e > 0).count() <= 1 {
                return (q, LnBounds::exact(list[0].1));
            }
            let lower = list
                .iter()
                .map(|(m, v)| v - ln_c_nm(n, m))
                .fold(f64::NEG_INFINITY, f64::max);
            let upper = log_sum_exp(&list.iter().map(|x| x.1).collect::<Vec<_>>());
            (q, LnBounds { ln_lower: lower, ln_upper: upper })
        })
        .collect()
}

/// Order estimate from a window of coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    /// `-1/s`, where `s` is the least-squares slope of the upper concave hull of
    /// `(ln q, max_{|m|=q} ln(||a_m|| / c(n,m)) / q)` over the window.
    pub rho: f64,
    /// `max_q q ln q / -ln(||a_m|| / c(n,m))`, the plain finite-window ratio.
    pub raw_ratio_max: f64,
    pub window: Window,
}

fn window_points(norms: &LnNorms, window: Window, subtract_c: bool) -> Vec<(usize, f64)> {
    let n = norms.dim();
    let mut best: BTreeMap<usize, f64> = BTreeMap::new();
    for (m, v) in norms.iter() {
        let q = m.degree();
        if !window.contains(q) {
            continue;
        }
        let w = if subtract_c { v - ln_c_nm(n, m) } else { v };
        let slot = best.entry(q).or_insert(f64::NEG_INFINITY);
        *slot = slot.max(w);
    }
    best.into_iter().collect()
}

fn upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

pub fn order_from_coeffs(norms: &LnNorms, window: Window) -> Result<OrderEstimate> {
    let pts = window_points(norms, window, true);
    if pts.len() < 2 {
        return Err(window.empty());
    }
    let raw_ratio_max = pts
        .iter()
        .map(|&(q, v)| {
            let qf = q as f64;
            qf * qf.ln() / -v
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let curve: Vec<(f64, f64)> = pts.iter().map(|&(q, v)| ((q as f64).ln(), v / q as f64)).collect();
    let hull = upper_hull(&curve);
    let k = hull.len() as f64;
    let mx = hull.iter().map(|p| p.0).sum::<f64>() / k;
    let my = hull.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = hull.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = hull.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::Invariant(format!(
            "coefficients in window {window} do not decay like an entire function of finite positive order"
        )));
    }
    Ok(OrderEstimate {
        rho: -1.0 / slope,
        raw_ratio_max,
        window,
    })
}

/// `(1/(e rho)) max_q q max_{|m|=q} ||a_m||^{rho/q}`; 0 when the window has no
/// non-zero coefficient.
pub fn type_from_coeffs(norms: &LnNorms, rho: f64, window: Window) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!("order must be positive, got {rho}")));
    }
    let best = window_points(norms, window, false)
        .into_iter()
        .map(|(q, v)| (q as f64).ln() + rho / q as f64 * v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((best - 1.0 - rho.ln()).exp())
}

/// Per-degree bracket `(1/q) ln K_q + ln phi(q) - 1/rho - ln(rho)/rho`.
pub fn kq_bracket(ln_kq: f64, po: &ProximateOrder, q: usize) -> f64 {
    let qf = q as f64;
    let rho = po.rho();
    ln_kq / qf + po.ln_phi_of_ln(qf.ln()).expect("finite") - (1.0 + rho.ln()) / rho
}

/// Type from `K_q`: `sigma = exp(rho max_q bracket_q)`.
pub fn type_from_kq(ln_kq: &BTreeMap<usize, f64>, po: &ProximateOrder, window: Window) -> Result<f64> {
    let best = ln_kq
        .range(window.lo..=window.hi)
        .filter(|(_, v)| v.is_finite())
        .map(|(&q, &v)| kq_bracket(v, po, q))
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(window.empty());
    }
    Ok((po.rho() * best).exp())
}

/// Finite-window surrogates of `limsup (K_q G_q)^{rho/q}` and of the coefficient
/// variant `limsup (max_{|m|=q} ||a_m|| G_q)^{rho/q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub kq_value: f64,
    pub coeff_value: f64,
    /// `n^rho`.
    pub slack: f64,
    /// `max_q C(n+q-1, q)^{rho/q} - 1`, the finite-degree excess over `n^rho`.
    pub slack_eps: f64,
    pub window: Window,
}

pub fn membership_value(ln_kq: f64, po: &ProximateOrder, q: usize) -> f64 {
    (po.rho() / q as f64 * (ln_kq + po.ln_g(q))).exp()
}

pub fn membership_limsup(
    ln_kq: &BTreeMap<usize, f64>,
    norms: &LnNorms,
    po: &ProximateOrder,
    window: Window,
) -> Membership {
    let rho = po.rho();
    let n = norms.dim().max(1);
    let kq_value = ln_kq
        .range(window.lo..=window.hi)
        .filter(|(_, v)| v.is_finite())
        .map(|(&q, &v)| membership_value(v, po, q))
        .fold(0.0, f64::max);
    let coeff_value = window_points(norms, window, false)
        .into_iter()
        .map(|(q, v)| membership_value(v, po, q))
        .fold(0.0, f64::max);
    let slack_eps = window
        .degrees()
        .map(|q| (rho / q as f64 * ln_biguint(&binomial(n + q - 1, q))).exp() - 1.0)
        .fold(0.0, f64::max);
    Membership {
        kq_value,
        coeff_value,
        slack: (n as f64).powf(rho),
        slack_eps,
        window,
    }
}

/// One row of a growth report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRow {
    pub q: usize,
    pub ln_kq_lower: f64,
    pub ln_kq_upper: f64,
    pub ln_gq: f64,
    /// Per-degree bracket of the `K_q` type formula, from the upper `K_q`.
    pub kq_rhs: f64,
    /// `(K_q G_q)^{rho/q}` from the upper `K_q`.
    pub membership_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub po: ProximateOrder,
    pub order_window: Window,
    pub type_window: Window,
    pub order: Option<OrderEstimate>,
    pub type_coeffs: Option<f64>,
    pub type_kq: Option<f64>,
    pub membership: Membership,
    pub tested_sigma: Option<f64>,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    /// Builds the report from coefficient norms and a `K_q` table. The order is
    /// estimated on `order_window`; types and membership on `type_window` with the
    /// order of `po`.
    pub fn build(
        norms: &LnNorms,
        kq: &KqTable,
        po: &ProximateOrder,
        order_window: Window,
        type_window: Window,
        tested_sigma: Option<f64>,
    ) -> Self {
        let upper: BTreeMap<usize, f64> = kq.iter().map(|(&q, b)| (q, b.ln_upper)).collect();
        let rows = kq
            .range(type_window.lo..=type_window.hi)
            .map(|(&q, b)| GrowthRow {
                q,
                ln_kq_lower: b.ln_lower,
                ln_kq_upper: b.ln_upper,
                ln_gq: po.ln_g(q),
                kq_rhs: kq_bracket(b.ln_upper, po, q),
                membership_value: membership_value(b.ln_upper, po, q),
            })
            .collect();
        GrowthReport {
            po: *po,
            order_window,
            type_window,
            order: order_from_coeffs(norms, order_window).ok(),
            type_coeffs: type_from_coeffs(norms, po.rho(), type_window).ok(),
            type_kq: type_from_kq(&upper, po, type_window).ok(),
            membership: membership_limsup(&upper, norms, po, type_window),
            tested_sigma,
            rows,
        }
    }

    /// `Some(true)` when the membership surrogate does not exceed the tested type.
    pub fn verdict(&self) -> Option<bool> {
        self.tested_sigma.map(|s| self.membership.kq_value <= s)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,ln_Kq_lower,ln_Kq_upper,ln_Gq,kq_rhs,membership_value\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.q,
                format_f64(r.ln_kq_lower),
                format_f64(r.ln_kq_upper),
                format_f64(r.ln_gq),
                format_f64(r.kq_rhs),
                format_f64(r.membership_value)
            ));
        }
        out
    }

    /// Human-readable summary of the estimates.
    pub fn summary(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.6}"));
        let mut s = format!("proximate order: {}\n", self.po);
        match &self.order {
            Some(o) => s.push_str(&format!(
                "order (window {}): {:.6} (raw ratio max {:.6})\n",
                o.window, o.rho, o.raw_ratio_max
            )),
            None => s.push_str(&format!("order (window {}): undefined\n", self.order_window)),
        }
        s.push_str(&format!(
            "type from coefficients (window {}): {}\n",
            self.type_window,
            opt(self.type_coeffs)
        ));
        s.push_str(&format!("type from K_q (window {}): {}\n", self.type_window, opt(self.type_kq)));
        s.push_str(&format!(
            "membership limsup (K_q G_q)^(rho/q): {:.6}; coefficient variant {:.6} (slack n^rho = {:.6}, finite-degree excess {:.3e})\n",
            self.membership.kq_value, self.membership.coeff_value, self.membership.slack, self.membership.slack_eps
        ));
        if let (Some(sigma), Some(v)) = (self.tested_sigma, self.verdict()) {
            s.push_str(&format!(
                "membership in A_(rho,{sigma}+0): {}\n",
                if v { "yes" } else { "no" }
            ));
        }
        s
    }
}
