//! Seeded random instances and synthetic families used by tests, the
//! verification suite and the CLI fixtures.

use num_bigint::BigInt;
use rand::Rng;

use crate::clifford::CliffordNumber;
use crate::multiindex::{enumerate_up_to, MultiIndex};
use crate::scalar::Rational;
use crate::series::MonogenicSeries;

/// Small random rational `p/q` with `|p| <= 5`, `1 <= q <= 4`.
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-5i64..=5)), BigInt::from(rng.gen_range(1i64..=4)))
}

/// Random element of `R_n` with each blade present with probability 1/2.
pub fn random_rational_clifford<R: Rng>(n: usize, rng: &mut R) -> CliffordNumber<Rational> {
    let mut terms = Vec::new();
    for mask in 0..1u32 << n {
        if rng.gen_bool(0.5) {
            terms.push((mask, random_rational(rng)));
        }
    }
    CliffordNumber::from_terms(n, terms).expect("masks in range")
}

pub fn random_float_clifford<R: Rng>(n: usize, rng: &mut R) -> CliffordNumber<f64> {
    let terms: Vec<_> = (0..1u32 << n).map(|mask| (mask, rng.gen_range(-1.0..1.0))).collect();
    CliffordNumber::from_terms(n, terms).expect("masks in range")
}

/// Random series of degree `q` where each index carries a coefficient with probability 0.6.
pub fn random_rational_series<R: Rng>(n: usize, q: usize, rng: &mut R) -> MonogenicSeries<Rational> {
    let mut coeffs = Vec::new();
    for m in enumerate_up_to(n, q) {
        if rng.gen_bool(0.6) {
            coeffs.push((m, random_rational_clifford(n, rng)));
        }
    }
    MonogenicSeries::from_coeffs(n, q, coeffs).expect("consistent shape")
}

/// Random float series of degree `q` with every coefficient present, entries in `(-1, 1)`.
pub fn random_float_series<R: Rng>(n: usize, q: usize, rng: &mut R) -> MonogenicSeries<f64> {
    let coeffs: Vec<_> = enumerate_up_to(n, q)
        .into_iter()
        .map(|m| {
            let c = random_float_clifford(n, rng);
            (m, c)
        })
        .collect();
    MonogenicSeries::from_coeffs(n, q, coeffs).expect("consistent shape")
}

/// `ln` of the axis-family coefficient norm `(e rho sigma / q)^{q/rho}` (0 at `q = 0`).
pub fn axis_ln_norm(rho: f64, sigma: f64, q: usize) -> f64 {
    if q == 0 {
        return 0.0;
    }
    let qf = q as f64;
    qf / rho * ((std::f64::consts::E * rho * sigma).ln() - qf.ln())
}

/// The synthetic family `a_{q e_1} = (e rho sigma / q)^{q/rho}` truncated at `q_max`,
/// supported on the first axis. It has order `rho` and type `sigma`.
pub fn axis_series(n: usize, rho: f64, sigma: f64, q_max: usize) -> MonogenicSeries<f64> {
    let coeffs: Vec<_> = (0..=q_max)
        .map(|q| {
            let m = MultiIndex::axis(n, 1, q as u32);
            (m, CliffordNumber::scalar(n, axis_ln_norm(rho, sigma, q).exp()))
        })
        .filter(|(_, c)| !c.is_zero())
        .collect();
    MonogenicSeries::from_coeffs(n, q_max, coeffs).expect("consistent shape")
}
