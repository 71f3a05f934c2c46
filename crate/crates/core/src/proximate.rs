//! Proximate orders `rho(r)`, their normalization `rho_hat`, the inverse `phi` of
//! `t = r^{rho_hat(r)}`, and the scale `G_q = phi(q)^q / (e rho)^{q/rho}`.
//!
//! Everything is parametrized by `u = ln r`. Writing `T(u) = ln t`, the
//! normalization keeps the family's own `T` for `u >= u_1`, joins `(0, 0)` to
//! `(u_1, T(u_1))` by a cubic Hermite piece matching value and slope at `u_1`,
//! and continues linearly with the secant slope for `u <= 0`, so `t(0+) = 0` and
//! `t(1) = 1`. `u_1` is doubled until the Hermite piece is strictly increasing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `rho(r) = rho`.
    Constant,
    /// `rho(r) = rho + a / ln r`, i.e. `t = e^a r^rho`.
    LogShift,
    /// `rho(r) = rho + a ln ln r / ln r`, i.e. `t = r^rho (ln r)^a`.
    LogLog,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::LogShift => "logshift",
            Family::LogLog => "loglog",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "constant" => Ok(Family::Constant),
            "logshift" => Ok(Family::LogShift),
            "loglog" => Ok(Family::LogLog),
            other => Err(Error::Parse(format!("unknown proximate-order family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Params {
    family: Family,
    rho: f64,
    #[serde(default)]
    a: f64,
}

/// A normalized proximate order from one of three parametric families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Params", into = "Params")]
pub struct ProximateOrder {
    family: Family,
    rho: f64,
    a: f64,
    /// Cutover `u_1 = ln r_1`.
    u1: f64,
    /// Secant slope `T(u_1) / u_1`, also `rho_hat` on `(0, 1]`.
    delta: f64,
    /// `T'(u_1)`.
    beta: f64,
}

impl From<ProximateOrder> for Params {
    fn from(po: ProximateOrder) -> Params {
        Params {
            family: po.family,
            rho: po.rho,
            a: po.a,
        }
    }
}

impl TryFrom<Params> for ProximateOrder {
    type Error = Error;

    fn try_from(s: Params) -> Result<Self> {
        ProximateOrder::new(s.family, s.rho, s.a)
    }
}

pub const DEFAULT_PHI_TOL: f64 = 1e-14;

impl ProximateOrder {
    pub fn new(family: Family, rho: f64, a: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidArgument(format!("order must be positive, got {rho}")));
        }
        if !a.is_finite() {
            return Err(Error::InvalidArgument(format!("parameter a must be finite, got {a}")));
        }
        let mut po = ProximateOrder {
            family,
            rho,
            a: if family == Family::Constant { 0.0 } else { a },
            u1: 0.0,
            delta: rho,
            beta: rho,
        };
        if family == Family::Constant {
            return Ok(po);
        }
        let mut u1: f64 = 1.0;
        for _ in 0..64 {
            let t1 = po.raw_ln_t(u1);
            let beta = po.raw_slope(u1);
            let delta = t1 / u1;
            if t1 > 0.0 && beta > 0.0 && beta < 3.0 * delta {
                po.u1 = u1;
                po.delta = delta;
                po.beta = beta;
                return Ok(po);
            }
            u1 *= 2.0;
        }
        Err(Error::Invariant(format!(
            "no monotone normalization found for {} rho={rho} a={a}",
            family.as_str()
        )))
    }

    pub fn constant(rho: f64) -> Result<Self> {
        Self::new(Family::Constant, rho, 0.0)
    }

    pub fn log_shift(rho: f64, a: f64) -> Result<Self> {
        Self::new(Family::LogShift, rho, a)
    }

    pub fn log_log(rho: f64, a: f64) -> Result<Self> {
        Self::new(Family::LogLog, rho, a)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// The limit order `rho`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Radius beyond which `rho_hat = rho(r)`.
    pub fn cutover_radius(&self) -> f64 {
        self.u1.exp()
    }

    fn raw_ln_t(&self, u: f64) -> f64 {
        match self.family {
            Family::Constant => self.rho * u,
            Family::LogShift => self.rho * u + self.a,
            Family::LogLog => self.rho * u + self.a * u.ln(),
        }
    }

    fn raw_slope(&self, u: f64) -> f64 {
        match self.family {
            Family::Constant | Family::LogShift => self.rho,
            Family::LogLog => self.rho + self.a / u,
        }
    }

    /// `T(u) = ln t(e^u)`.
    pub fn ln_t_of_ln(&self, u: f64) -> f64 {
        if self.family == Family::Constant {
            return self.rho * u;
        }
        if u >= self.u1 {
            self.raw_ln_t(u)
        } else if u <= 0.0 {
            self.delta * u
        } else {
            let s = u / self.u1;
            self.delta * u + (self.beta - self.delta) * self.u1 * s * s * (s - 1.0)
        }
    }

    /// `T'(u)`, the logarithmic derivative of `t`.
    pub fn ln_t_slope(&self, u: f64) -> f64 {
        if self.family == Family::Constant {
            return self.rho;
        }
        if u >= self.u1 {
            self.raw_slope(u)
        } else if u <= 0.0 {
            self.delta
        } else {
            let s = u / self.u1;
            self.delta + (self.beta - self.delta) * s * (3.0 * s - 2.0)
        }
    }

    pub fn ln_t(&self, r: f64) -> f64 {
        self.ln_t_of_ln(r.ln())
    }

    /// `t(r) = r^{rho_hat(r)}`, with `t(0) = 0`.
    pub fn t(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        self.ln_t(r).exp()
    }

    /// `rho_hat(r)`.
    pub fn value(&self, r: f64) -> f64 {
        let u = r.ln();
        if u == 0.0 {
            return self.delta;
        }
        self.ln_t_of_ln(u) / u
    }

    /// `rho'(r) r ln r` of the un-normalized family; tends to 0.
    pub fn slow_variation(&self, r: f64) -> f64 {
        let u = r.ln();
        match self.family {
            Family::Constant => 0.0,
            Family::LogShift => -self.a / u,
            Family::LogLog => self.a * (1.0 - u.ln()) / u,
        }
    }

    /// `ln phi(e^s)`, i.e. the solution `u` of `T(u) = s`.
    pub fn ln_phi_of_ln(&self, s: f64) -> Result<f64> {
        self.ln_phi_of_ln_tol(s, DEFAULT_PHI_TOL)
    }

    /// As [`ln_phi_of_ln`](Self::ln_phi_of_ln) with an explicit bisection width in `u`.
    pub fn ln_phi_of_ln_tol(&self, s: f64, tol: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("phi of non-finite log argument {s}")));
        }
        match self.family {
            Family::Constant => return Ok(s / self.rho),
            _ if s <= 0.0 => return Ok(s / self.delta),
            Family::LogShift if s >= self.raw_ln_t(self.u1) => return Ok((s - self.a) / self.rho),
            _ => {}
        }
        let (mut lo, mut hi) = (0.0, self.u1.max(1.0));
        let mut guard = 0;
        while self.ln_t_of_ln(hi) < s {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 2000 {
                return Err(Error::Invariant(format!("phi: cannot bracket log argument {s}")));
            }
        }
        for _ in 0..400 {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let v = self.ln_t_of_ln(mid);
            if v < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (tl, th) = (self.ln_t_of_ln(lo), self.ln_t_of_ln(hi));
        if !(tl <= s && s <= th) {
            return Err(Error::Invariant(format!(
                "phi: normalization not monotone near log argument {s}"
            )));
        }
        Ok(0.5 * (lo + hi))
    }

    /// `phi(t)`, the inverse of `t(r)`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("phi requires t > 0, got {t}")));
        }
        Ok(self.ln_phi_of_ln(t.ln())?.exp())
    }

    /// `ln G_q = q ln phi(q) - (q/rho)(1 + ln rho)`, with `ln G_0 = 0`.
    pub fn ln_g(&self, q: usize) -> f64 {
        if q == 0 {
            return 0.0;
        }
        let qf = q as f64;
        let lp = self.ln_phi_of_ln(qf.ln()).expect("finite argument");
        qf * lp - qf / self.rho * (1.0 + self.rho.ln())
    }

    pub fn g(&self, q: usize) -> f64 {
        self.ln_g(q).exp()
    }

    /// `y_sigma(u, t) = ln(phi(t)/phi(u)) - sigma t/u`.
    pub fn y_sigma(&self, sigma: f64, u: f64, t: f64) -> Result<f64> {
        Ok(self.ln_phi_of_ln(t.ln())? - self.ln_phi_of_ln(u.ln())? - sigma * t / u)
    }
}

impl fmt::Display for ProximateOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Constant => write!(f, "constant:{}", self.rho),
            fam => write!(f, "{}:{}:{}", fam.as_str(), self.rho, self.a),
        }
    }
}

/// Parses `family:rho[:a]`.
impl FromStr for ProximateOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(Error::Parse(format!("expected family:rho[:a], got {s:?}")));
        }
        let family: Family = parts[0].parse()?;
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {p:?} in {s:?}: {e}")))
        };
        let rho = num(parts[1])?;
        let a = if parts.len() == 3 { num(parts[2])? } else { 0.0 };
        ProximateOrder::new(family, rho, a)
    }
}

/// Log-spaced grid of `count` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Witnesses for `t(r+s) <= k (t(r) + t(s)) + B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubadditiveFit {
    pub k: f64,
    pub b: f64,
}

/// Fits `k` as the worst ratio `t(r+s)/(t(r)+t(s))` over grid pairs with
/// `r, s >= 1`, then the smallest `B >= 0` making every grid pair hold.
pub fn fit_subadditive<T: Fn(f64) -> f64>(t: T, grid: &[f64]) -> SubadditiveFit {
    let mut k: f64 = 0.0;
    for &r in grid.iter().filter(|&&r| r >= 1.0) {
        for &s in grid.iter().filter(|&&s| s >= 1.0) {
            k = k.max(t(r + s) / (t(r) + t(s)));
        }
    }
    let mut b: f64 = 0.0;
    for &r in grid {
        for &s in grid {
            b = b.max(t(r + s) - k * (t(r) + t(s)));
        }
    }
    SubadditiveFit { k, b }
}

/// Grid `{0} U log_grid(1e-3, r_max)`.
pub fn radial_grid(r_max: f64, count: usize) -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend(log_grid(1e-3, r_max, count));
    g
}

/// Result of fitting `t(kr) <= (1+eta) k^p t(r) + C_eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub c_eta: f64,
    /// `min ln((1+eta) k^p t(r)) - ln t(kr)` over the upper decade of the grid;
    /// negative means the excess is still growing where the grid ends.
    pub tail_margin: f64,
}

pub fn fit_scaling<T: Fn(f64) -> f64>(t: T, k: f64, exponent: f64, eta: f64, grid: &[f64]) -> ScalingFit {
    let factor = (1.0 + eta) * k.powf(exponent);
    let r_max = grid.iter().copied().fold(0.0, f64::max);
    let mut c_eta: f64 = 0.0;
    let mut tail_margin = f64::INFINITY;
    for &r in grid {
        let lhs = t(k * r);
        let rhs = factor * t(r);
        c_eta = c_eta.max(lhs - rhs);
        if r >= r_max / 10.0 && r > 0.0 {
            tail_margin = tail_margin.min(rhs.ln() - lhs.ln());
        }
    }
    ScalingFit { c_eta, tail_margin }
}

/// Smallest grid `T_1` with `y_sigma(u,t) + (1/rho) ln(e rho) <= -(1/rho) ln sigma'`
/// for all grid `u, t >= T_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YSigmaFit {
    pub t1: Option<f64>,
    /// Worst margin over pairs `u, t >= T_1` (or over all pairs above the
    /// largest candidate when no `T_1` works).
    pub margin: f64,
}

pub fn fit_y_sigma(
    po: &ProximateOrder,
    sigma: f64,
    sigma_prime: f64,
    candidates: &[f64],
    grid: &[f64],
) -> Result<YSigmaFit> {
    let rho = po.rho();
    let bound = -sigma_prime.ln() / rho - (std::f64::consts::E * rho).ln() / rho;
    let ln_phi: Vec<f64> = grid
        .iter()
        .map(|g| po.ln_phi_of_ln(g.ln()))
        .collect::<Result<_>>()?;
    let worst = |t1: f64| {
        let mut m = f64::INFINITY;
        for (i, &u) in grid.iter().enumerate().filter(|(_, &u)| u >= t1) {
            for (j, &t) in grid.iter().enumerate().filter(|(_, &t)| t >= t1) {
                let y = ln_phi[j] - ln_phi[i] - sigma * t / u;
                m = m.min(bound - y);
            }
        }
        m
    };
    let mut last = f64::NEG_INFINITY;
    for &t1 in candidates {
        let m = worst(t1);
        if m >= 0.0 {
            return Ok(YSigmaFit { t1: Some(t1), margin: m });
        }
        last = m;
    }
    Ok(YSigmaFit { t1: None, margin: last })
}
