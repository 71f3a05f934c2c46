//! Multi-indices `m = (m_1, ..., m_n)` and their combinatorics.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::scalar::ln_biguint;

/// An `n`-tuple of non-negative integers. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `e_i`, with `i` 1-based.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i - 1] = 1;
        MultiIndex(v)
    }

    /// `q e_i`: the index supported on axis `i` alone.
    pub fn axis(n: usize, i: usize, q: u32) -> Self {
        let mut v = vec![0; n];
        v[i - 1] = q;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Entry for axis `i` (1-based).
    pub fn get(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    /// `|m| = m_1 + ... + m_n`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&v| v as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// `m! = m_1! ... m_n!`.
    pub fn factorial(&self) -> BigUint {
        self.0
            .iter()
            .fold(BigUint::one(), |acc, &v| acc * factorial(v as usize))
    }

    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&v| ln_factorial(v as usize)).sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when `other <= self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if !other.le(self) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `self - e_i` when `m_i >= 1`.
    pub fn dec(&self, i: usize) -> Option<Self> {
        let mut v = self.0.clone();
        let slot = &mut v[i - 1];
        *slot = slot.checked_sub(1)?;
        Some(MultiIndex(v))
    }

    pub fn inc(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v[i - 1] += 1;
        MultiIndex(v)
    }

    /// All `p` with `p <= self`, in lexicographic order.
    pub fn lower_set(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &bound in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=bound).map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(MultiIndex).collect()
    }

    /// Apply a permutation of axes: entry `i` moves to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut v = vec![0; self.dim()];
        for (i, &p) in perm.iter().enumerate() {
            v[p] = self.0[i];
        }
        MultiIndex(v)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

pub fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |acc, v| acc * v)
}

/// `ln k!`, exact summation for small `k`, big-integer boundary conversion otherwise.
pub fn ln_factorial(k: usize) -> f64 {
    if k < 2 {
        0.0
    } else if k <= 170 {
        (2..=k).map(|v| (v as f64).ln()).sum()
    } else {
        ln_biguint(&factorial(k))
    }
}

/// Rising factorial `n (n+1) ... (n+k-1)`; equals 1 for `k = 0`.
pub fn rising_factorial(n: usize, k: usize) -> BigUint {
    (0..k as u64).fold(BigUint::one(), |acc, j| acc * (n as u64 + j))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    (0..k as u64).fold(BigUint::one(), |acc, j| acc * (n as u64 - j) / (j + 1))
}

/// Number of multi-indices of length `n` with `|m| = q`: `C(q+n-1, n-1)`.
pub fn count_degree(n: usize, q: usize) -> BigUint {
    binomial(q + n - 1, n - 1)
}

/// All `m` with `|m| = q`, in lexicographic order.
pub fn enumerate_degree(n: usize, q: usize) -> Vec<MultiIndex> {
    assert!(n >= 1, "multi-index length must be at least 1");
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill(&mut cur, 0, q as u32, &mut out);
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        fill(cur, pos + 1, remaining - v, out);
    }
    cur[pos] = 0;
}

/// All `m` with `|m| <= max_degree`, in lexicographic order.
pub fn enumerate_up_to(n: usize, max_degree: usize) -> Vec<MultiIndex> {
    let mut all: Vec<_> = (0..=max_degree)
        .flat_map(|q| enumerate_degree(n, q))
        .collect();
    all.sort();
    all
}

/// Cauchy constant `c(n, m) = n (n+1) ... (n+|m|-1) / m!`, with `c(n, 0) = 1`.
pub fn c_nm(n: usize, m: &MultiIndex) -> BigRational {
    BigRational::new(
        BigInt::from(rising_factorial(n, m.degree())),
        BigInt::from(m.factorial()),
    )
}

/// `ln c(n, m)` in binary64.
pub fn ln_c_nm(n: usize, m: &MultiIndex) -> f64 {
    let q = m.degree();
    ln_factorial(n + q - 1) - ln_factorial(n - 1) - m.ln_factorial()
}

/// `sum_{|m| = q} c(n, m)` by direct summation.
pub fn degree_sum_c(n: usize, q: usize) -> BigRational {
    enumerate_degree(n, q)
        .iter()
        .fold(BigRational::from_integer(0.into()), |acc, m| acc + c_nm(n, m))
}
