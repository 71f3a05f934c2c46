//! Arithmetic in the real Clifford algebra `R_n` (generators `e_i^2 = -1`,
//! `e_i e_j = -e_j e_i` for `i != j`).
//!
//! Blades are encoded as bit masks: bit `i - 1` set means `e_i` is a factor,
//! factors always in increasing index order. Elements are stored densely over
//! all `2^n` blades.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Largest supported number of imaginary units.
pub const MAX_DIM: usize = 8;

/// A blade bit mask.
pub type Blade = u32;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

/// Sign of `e_a * e_b` in `R_n` with unchecked masks; the resulting mask is `a ^ b`.
#[inline]
pub(crate) fn blade_sign(a: Blade, b: Blade) -> bool {
    // count transpositions needed to bring the concatenated word into order
    let mut swaps = 0u32;
    let mut rest = a >> 1;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    // every shared generator contracts as e_i^2 = -1
    swaps += (a & b).count_ones();
    swaps % 2 == 1
}

/// Product of two basis blades: returns `(sign, mask)` with `e_a e_b = sign * e_mask`.
pub fn blade_product(n: usize, a: Blade, b: Blade) -> Result<(i8, Blade)> {
    check_dim(n)?;
    for mask in [a, b] {
        if mask >> n != 0 {
            return Err(Error::BladeOutOfRange { mask, n });
        }
    }
    let sign = if blade_sign(a, b) { -1 } else { 1 };
    Ok((sign, a ^ b))
}

/// Grade (number of generators) of a blade.
pub fn grade(mask: Blade) -> u32 {
    mask.count_ones()
}

/// Blade string: `""` for the scalar, otherwise the increasing generator indices, e.g. `"134"`.
pub fn blade_to_string(mask: Blade) -> String {
    (0..32)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| char::from_digit(i + 1, 10).expect("index below 10"))
        .collect()
}

/// Parse a blade string; digits must be strictly increasing and at most `n`.
pub fn blade_from_str(n: usize, s: &str) -> Result<Blade> {
    let mut mask = 0;
    let mut last = 0;
    for c in s.chars() {
        let d = c
            .to_digit(10)
            .ok_or_else(|| Error::Parse(format!("invalid blade string {s:?}")))?;
        if d == 0 || d as usize > n || d <= last {
            return Err(Error::Parse(format!(
                "blade string {s:?} must list increasing indices in 1..={n}"
            )));
        }
        last = d;
        mask |= 1 << (d - 1);
    }
    Ok(mask)
}

/// An element of `R_n`.
#[derive(Clone, PartialEq)]
pub struct CliffordNumber<S> {
    n: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> CliffordNumber<S> {
    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "unsupported dimension {n}");
        CliffordNumber {
            n,
            coeffs: vec![S::zero(); 1 << n],
        }
    }

    pub fn scalar(n: usize, value: S) -> Self {
        let mut out = Self::zero(n);
        out.coeffs[0] = value;
        out
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, S::one())
    }

    /// `value * e_mask`.
    pub fn blade(n: usize, mask: Blade, value: S) -> Result<Self> {
        check_dim(n)?;
        if mask >> n != 0 {
            return Err(Error::BladeOutOfRange { mask, n });
        }
        let mut out = Self::zero(n);
        out.coeffs[mask as usize] = value;
        Ok(out)
    }

    /// The generator `e_i` (1-based).
    pub fn unit(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::AxisOutOfRange { axis: i, n });
        }
        Self::blade(n, 1 << (i - 1), S::one())
    }

    /// Build from `(mask, value)` pairs; repeated masks accumulate.
    pub fn from_terms<I: IntoIterator<Item = (Blade, S)>>(n: usize, terms: I) -> Result<Self> {
        check_dim(n)?;
        let mut out = Self::zero(n);
        for (mask, v) in terms {
            if mask >> n != 0 {
                return Err(Error::BladeOutOfRange { mask, n });
            }
            out.coeffs[mask as usize] += v;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, mask: Blade) -> &S {
        &self.coeffs[mask as usize]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Non-zero blade coefficients in increasing mask order.
    pub fn terms(&self) -> impl Iterator<Item = (Blade, &S)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m as Blade, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(CliffordNumber {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        })
    }

    /// Clifford product `self * other`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = Self::zero(self.n);
        self.mul_acc_into(other, &mut out);
        Ok(out)
    }

    /// `out += self * other`, dimensions assumed equal.
    pub(crate) fn mul_acc_into(&self, other: &Self, out: &mut Self) {
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let term = ca.clone() * cb;
                let slot = &mut out.coeffs[a ^ b];
                if blade_sign(a as Blade, b as Blade) {
                    *slot = slot.clone() - term;
                } else {
                    *slot += term;
                }
            }
        }
    }

    /// Multiply every coefficient by a real scalar.
    pub fn scale(&self, s: &S) -> Self {
        CliffordNumber {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s).collect(),
        }
    }

    /// Squared Euclidean norm `sum_A y_A^2`.
    pub fn norm_sq(&self) -> S {
        self.coeffs
            .iter()
            .fold(S::zero(), |acc, c| acc + c.square())
    }

    /// Euclidean norm `sqrt(sum_A y_A^2)`.
    pub fn norm(&self) -> f64 {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return scale;
        }
        let s: f64 = self
            .coeffs
            .iter()
            .map(|c| (c.to_f64() / scale).powi(2))
            .sum();
        scale * s.sqrt()
    }

    pub fn to_f64(&self) -> CliffordNumber<f64> {
        CliffordNumber {
            n: self.n,
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Keep only grade-0 and grade-1 parts.
    pub fn paravector_part(&self) -> Paravector<S> {
        Paravector {
            x0: self.coeffs[0].clone(),
            xv: (0..self.n).map(|i| self.coeffs[1 << i].clone()).collect(),
        }
    }
}

impl CliffordNumber<f64> {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> fmt::Debug for CliffordNumber<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (mask, c) in self.terms() {
            map.entry(&format!("e{}", blade_to_string(mask)), c);
        }
        map.finish()
    }
}

impl<S: Scalar> Add for &CliffordNumber<S> {
    type Output = CliffordNumber<S>;
    /// Panics on dimension mismatch; use [`CliffordNumber::checked_add`] to recover.
    fn add(self, rhs: Self) -> CliffordNumber<S> {
        self.checked_add(rhs).expect("Clifford addition")
    }
}

impl<S: Scalar> Add for CliffordNumber<S> {
    type Output = CliffordNumber<S>;
    fn add(self, rhs: Self) -> CliffordNumber<S> {
        &self + &rhs
    }
}

impl<S: Scalar> AddAssign<&CliffordNumber<S>> for CliffordNumber<S> {
    fn add_assign(&mut self, rhs: &CliffordNumber<S>) {
        assert_eq!(self.n, rhs.n, "Clifford addition across dimensions");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b.clone();
        }
    }
}

impl<S: Scalar> Neg for &CliffordNumber<S> {
    type Output = CliffordNumber<S>;
    fn neg(self) -> CliffordNumber<S> {
        CliffordNumber {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<S: Scalar> Sub for &CliffordNumber<S> {
    type Output = CliffordNumber<S>;
    fn sub(self, rhs: Self) -> CliffordNumber<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Mul for &CliffordNumber<S> {
    type Output = CliffordNumber<S>;
    /// Panics on dimension mismatch; use [`CliffordNumber::checked_mul`] to recover.
    fn mul(self, rhs: Self) -> CliffordNumber<S> {
        self.checked_mul(rhs).expect("Clifford product")
    }
}

impl<S: Scalar> Mul for CliffordNumber<S> {
    type Output = CliffordNumber<S>;
    fn mul(self, rhs: Self) -> CliffordNumber<S> {
        &self * &rhs
    }
}

/// A point `x_0 + x_1 e_1 + ... + x_n e_n` of `R^{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Paravector<S> {
    pub x0: S,
    pub xv: Vec<S>,
}

impl<S: Scalar> Paravector<S> {
    pub fn new(x0: S, xv: Vec<S>) -> Self {
        Paravector { x0, xv }
    }

    pub fn origin(n: usize) -> Self {
        Paravector {
            x0: S::zero(),
            xv: vec![S::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.xv.len()
    }

    /// Coordinate `k` of `(x_0, x_1, ..., x_n)`.
    pub fn coord(&self, k: usize) -> &S {
        if k == 0 {
            &self.x0
        } else {
            &self.xv[k - 1]
        }
    }

    pub fn coord_mut(&mut self, k: usize) -> &mut S {
        if k == 0 {
            &mut self.x0
        } else {
            &mut self.xv[k - 1]
        }
    }

    pub fn to_clifford(&self) -> CliffordNumber<S> {
        let n = self.dim();
        let mut out = CliffordNumber::scalar(n, self.x0.clone());
        for (i, x) in self.xv.iter().enumerate() {
            out.coeffs[1 << i] = x.clone();
        }
        out
    }

    /// `|x|^2 = x_0^2 + ... + x_n^2`.
    pub fn norm_sq(&self) -> S {
        self.xv
            .iter()
            .fold(self.x0.square(), |acc, x| acc + x.square())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }

    pub fn to_f64(&self) -> Paravector<f64> {
        Paravector {
            x0: self.x0.to_f64(),
            xv: self.xv.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn scaled(&self, s: &S) -> Self {
        Paravector {
            x0: self.x0.clone() * s,
            xv: self.xv.iter().map(|x| x.clone() * s).collect(),
        }
    }
}

/// `|x * y|` for a paravector `x`; left multiplication by a paravector is norm-multiplicative,
/// so this equals `|x| |y|`.
pub fn para_mul_norm_check<S: Scalar>(x: &Paravector<S>, y: &CliffordNumber<S>) -> Result<f64> {
    Ok(x.to_clifford().checked_mul(y)?.norm())
}
