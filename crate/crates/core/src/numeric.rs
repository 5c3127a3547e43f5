//! Numeric substrate: signed-log scalars, index windows, bilateral vectors
//! and the space norms.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A real number stored as `sign * exp(ln_mag)`.
///
/// Products of long weight sequences stay finite in this form. Division by
/// zero yields an infinite magnitude rather than NaN.
#[derive(Clone, Copy, PartialEq)]
pub struct SignedLog {
    sign: i8,
    ln_mag: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln_mag: f64::NEG_INFINITY,
    };
    pub const ONE: SignedLog = SignedLog {
        sign: 1,
        ln_mag: 0.0,
    };

    pub fn new(sign: i8, ln_mag: f64) -> Self {
        if sign == 0 || ln_mag == f64::NEG_INFINITY {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                ln_mag,
            }
        }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_mag: x.abs().ln(),
            }
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn ln_mag(self) -> f64 {
        self.ln_mag
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_finite(self) -> bool {
        self.sign == 0 || self.ln_mag.is_finite()
    }

    pub fn to_real(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.ln_mag.exp()
        }
    }

    pub fn abs(self) -> Self {
        SignedLog {
            sign: self.sign.abs(),
            ln_mag: self.ln_mag,
        }
    }

    /// `|self|^p`.
    pub fn abs_pow(self, p: f64) -> Self {
        if self.sign == 0 {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: 1,
                ln_mag: self.ln_mag * p,
            }
        }
    }

    pub fn recip(self) -> Self {
        SignedLog::ONE / self
    }

    pub fn cmp_magnitude(self, other: SignedLog) -> Ordering {
        self.ln_mag.total_cmp(&other.ln_mag)
    }

    pub fn sum<I: IntoIterator<Item = SignedLog>>(terms: I) -> SignedLog {
        terms.into_iter().fold(SignedLog::ZERO, |acc, t| acc + t)
    }
}

impl Add for SignedLog {
    type Output = SignedLog;

    /// Sum computed without leaving log space.
    fn add(self, other: SignedLog) -> SignedLog {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_mag >= other.ln_mag {
            (self, other)
        } else {
            (other, self)
        };
        if big.ln_mag == f64::INFINITY {
            return big;
        }
        let t = (small.ln_mag - big.ln_mag).exp();
        if big.sign == small.sign {
            SignedLog::new(big.sign, big.ln_mag + t.ln_1p())
        } else if t == 1.0 {
            SignedLog::ZERO
        } else {
            SignedLog::new(big.sign, big.ln_mag + (-t).ln_1p())
        }
    }
}

impl Sub for SignedLog {
    type Output = SignedLog;

    fn sub(self, other: SignedLog) -> SignedLog {
        self + -other
    }
}

impl fmt::Debug for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => f.write_str("0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.ln_mag),
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, rhs: SignedLog) -> SignedLog {
        if self.sign == 0 || rhs.sign == 0 {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: self.sign * rhs.sign,
                ln_mag: self.ln_mag + rhs.ln_mag,
            }
        }
    }
}

impl Div for SignedLog {
    type Output = SignedLog;

    fn div(self, rhs: SignedLog) -> SignedLog {
        match (self.sign, rhs.sign) {
            (0, _) => SignedLog::ZERO,
            (s, 0) => SignedLog {
                sign: s,
                ln_mag: f64::INFINITY,
            },
            (s, t) => SignedLog {
                sign: s * t,
                ln_mag: self.ln_mag - rhs.ln_mag,
            },
        }
    }
}

impl Neg for SignedLog {
    type Output = SignedLog;

    fn neg(self) -> SignedLog {
        SignedLog {
            sign: -self.sign,
            ln_mag: self.ln_mag,
        }
    }
}

impl std::iter::Product for SignedLog {
    fn product<I: Iterator<Item = SignedLog>>(iter: I) -> SignedLog {
        iter.fold(SignedLog::ONE, Mul::mul)
    }
}

/// Product of `factors` in signed-log form; the empty product is one.
pub fn slog_product<I: IntoIterator<Item = f64>>(factors: I) -> SignedLog {
    factors.into_iter().map(SignedLog::from_real).product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Lp(f64),
    C0,
}

impl NormKind {
    pub fn lp(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(NormKind::Lp(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// Conjugate exponent `q`; `None` stands for `q = inf`.
    pub fn conjugate(self) -> Option<f64> {
        match self {
            NormKind::Lp(p) if p > 1.0 => Some(p / (p - 1.0)),
            NormKind::Lp(_) => None,
            NormKind::C0 => Some(1.0),
        }
    }

    /// Norm of a finite list of coefficients, factoring out the largest one.
    pub fn norm_of<I: IntoIterator<Item = f64>>(self, values: I) -> f64 {
        let values: Vec<f64> = values.into_iter().map(f64::abs).collect();
        let m = values.iter().copied().fold(0.0, f64::max);
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        match self {
            NormKind::C0 => m,
            NormKind::Lp(p) => {
                let s: f64 = values.iter().map(|x| (x / m).powf(p)).sum();
                m * s.powf(1.0 / p)
            }
        }
    }

    /// Norm of signed-log coefficients, returned in signed-log form.
    pub fn norm_of_logs<I: IntoIterator<Item = SignedLog>>(self, values: I) -> SignedLog {
        let lns: Vec<f64> = values
            .into_iter()
            .filter(|v| !v.is_zero())
            .map(SignedLog::ln_mag)
            .collect();
        let m = lns.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return SignedLog::ZERO;
        }
        if !m.is_finite() {
            return SignedLog::new(1, m);
        }
        match self {
            NormKind::C0 => SignedLog::new(1, m),
            NormKind::Lp(p) => {
                let s: f64 = lns.iter().map(|l| ((l - m) * p).exp()).sum();
                SignedLog::new(1, m + s.ln() / p)
            }
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Lp(p) => write!(f, "l^{p}"),
            NormKind::C0 => f.write_str("c0"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisVariant {
    /// `f_n = (a_n + b_n z) z^n` for every `n`.
    FullAffine,
    /// `f_n = a_n z^n` for `n <= -1`, affine for `n >= 0`.
    SplitAffine,
}

impl BasisVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisVariant::FullAffine => "full_affine",
            BasisVariant::SplitAffine => "split_affine",
        }
    }
}

/// Contiguous index range `[min, max]` with `min < 0 < max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    min: i64,
    max: i64,
}

impl Default for Window {
    fn default() -> Self {
        Window { min: -64, max: 64 }
    }
}

impl Window {
    pub fn new(min: i64, max: i64) -> Result<Self> {
        if min < 0 && 0 < max {
            Ok(Window { min, max })
        } else {
            Err(Error::InvalidWindow { min, max })
        }
    }

    pub fn min(self) -> i64 {
        self.min
    }

    pub fn max(self) -> i64 {
        self.max
    }

    pub fn len(self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, n: i64) -> bool {
        self.min <= n && n <= self.max
    }

    pub fn index(self, n: i64) -> Option<usize> {
        self.contains(n).then(|| (n - self.min) as usize)
    }

    pub fn indices(self) -> std::ops::RangeInclusive<i64> {
        self.min..=self.max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceParams {
    pub norm: NormKind,
    pub variant: BasisVariant,
    pub window: Window,
}

impl Default for SpaceParams {
    fn default() -> Self {
        SpaceParams {
            norm: NormKind::Lp(2.0),
            variant: BasisVariant::SplitAffine,
            window: Window::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// Coefficients of the monomials `z^n`.
    Laurent,
    /// Coefficients of the basis functions `f_n`.
    Schauder,
}

impl BasisTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisTag::Laurent => "laurent",
            BasisTag::Schauder => "schauder",
        }
    }
}

/// Finitely supported coefficient vector over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct BilateralVector {
    window: Window,
    coeffs: Vec<f64>,
    basis: BasisTag,
}

impl BilateralVector {
    pub fn zeros(window: Window, basis: BasisTag) -> Self {
        BilateralVector {
            window,
            coeffs: vec![0.0; window.len()],
            basis,
        }
    }

    pub fn unit(window: Window, n: i64, basis: BasisTag) -> Self {
        let mut v = Self::zeros(window, basis);
        v.set(n, 1.0);
        v
    }

    pub fn from_coeffs(window: Window, coeffs: Vec<f64>, basis: BasisTag) -> Result<Self> {
        if coeffs.len() != window.len() {
            return Err(Error::LengthMismatch {
                len: coeffs.len(),
                size: window.len(),
            });
        }
        Ok(BilateralVector {
            window,
            coeffs,
            basis,
        })
    }

    /// Builds a vector from `(index, value)` pairs; indices outside the
    /// window are rejected.
    pub fn from_entries<I>(window: Window, entries: I, basis: BasisTag) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, f64)>,
    {
        let mut v = Self::zeros(window, basis);
        for (n, x) in entries {
            if !window.contains(n) {
                return Err(Error::Config(format!(
                    "vector index {n} outside window [{}, {}]",
                    window.min(),
                    window.max()
                )));
            }
            v.set(n, x);
        }
        Ok(v)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient at `n`; zero outside the window.
    pub fn get(&self, n: i64) -> f64 {
        self.window.index(n).map_or(0.0, |i| self.coeffs[i])
    }

    /// Sets the coefficient at `n`.
    ///
    /// # Panics
    /// If `n` lies outside the window.
    pub fn set(&mut self, n: i64, x: f64) {
        let i = self
            .window
            .index(n)
            .unwrap_or_else(|| panic!("index {n} outside window"));
        self.coeffs[i] = x;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.window.indices().zip(self.coeffs.iter().copied())
    }

    /// Indices carrying a nonzero coefficient.
    pub fn support(&self) -> Option<(i64, i64)> {
        let mut nz = self.iter().filter(|(_, x)| *x != 0.0).map(|(n, _)| n);
        let lo = nz.next()?;
        let hi = nz.last().unwrap_or(lo);
        Some((lo, hi))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|x| *x == 0.0)
    }

    pub fn sub(&self, other: &BilateralVector) -> BilateralVector {
        let mut out = self.clone();
        for (n, x) in other.iter() {
            if let Some(i) = self.window.index(n) {
                out.coeffs[i] -= x;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> BilateralVector {
        BilateralVector {
            window: self.window,
            coeffs: self.coeffs.iter().map(|x| x * s).collect(),
            basis: self.basis,
        }
    }
}

/// Space norm of a vector given in the Schauder basis.
pub fn vector_norm(v: &BilateralVector, params: &SpaceParams) -> Result<f64> {
    if v.basis() != BasisTag::Schauder {
        return Err(Error::WrongBasis {
            expected: BasisTag::Schauder.as_str(),
            found: v.basis().as_str(),
        });
    }
    Ok(params.norm.norm_of(v.coeffs().iter().copied()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_examples() {
        let p = slog_product([2.0, 2.0, 2.0, 2.0]);
        assert_eq!(p.sign(), 1);
        assert!((p.ln_mag() - 4.0 * 2f64.ln()).abs() < 1e-15);

        let empty = slog_product([]);
        assert_eq!((empty.sign(), empty.ln_mag()), (1, 0.0));

        let inv: SignedLog = (0..10)
            .map(|k| slog_product([2f64.powi(-k)]).recip())
            .product();
        assert_eq!(inv.sign(), 1);
        assert!((inv.ln_mag() - 45.0 * 2f64.ln()).abs() < 1e-12);
        assert!((inv.to_real() / 2f64.powi(45) - 1.0).abs() < 1e-14);

        assert!(slog_product([3.0, 0.0, -1.0]).is_zero());
        assert_eq!(slog_product([-2.0, 3.0]).to_real(), -6.0);
    }

    #[test]
    fn signed_sums() {
        let s = SignedLog::from_real(3.0) + SignedLog::from_real(-5.0);
        assert!((s.to_real() + 2.0).abs() < 1e-15);
        assert!((SignedLog::from_real(2.0) + SignedLog::from_real(-2.0)).is_zero());
        let big = SignedLog::new(1, 2000.0) + SignedLog::new(1, 2000.0);
        assert!((big.ln_mag() - 2000.0 - 2f64.ln()).abs() < 1e-12);
        assert_eq!(
            SignedLog::ONE / SignedLog::ZERO,
            SignedLog::new(1, f64::INFINITY)
        );
    }

    #[test]
    fn norms() {
        let w = Window::new(-8, 8).unwrap();
        let params = SpaceParams {
            window: w,
            ..SpaceParams::default()
        };
        let e7 = BilateralVector::unit(w, 7, BasisTag::Schauder);
        for norm in [NormKind::Lp(1.0), NormKind::Lp(2.5), NormKind::C0] {
            let p = SpaceParams { norm, ..params };
            assert_eq!(vector_norm(&e7, &p).unwrap(), 1.0);
        }
        let ones =
            BilateralVector::from_entries(w, (0..4).map(|n| (n, 1.0)), BasisTag::Schauder).unwrap();
        assert_eq!(vector_norm(&ones, &params).unwrap(), 2.0);

        let laurent = BilateralVector::unit(w, 0, BasisTag::Laurent);
        assert!(matches!(
            vector_norm(&laurent, &params),
            Err(Error::WrongBasis { .. })
        ));
    }

    #[test]
    fn log_norm_matches_real_norm() {
        let xs = [0.5, -3.0, 0.0, 1e-3, 7.25];
        for kind in [NormKind::Lp(1.0), NormKind::Lp(3.0), NormKind::C0] {
            let direct = kind.norm_of(xs);
            let logged = kind
                .norm_of_logs(xs.iter().map(|x| SignedLog::from_real(*x)))
                .to_real();
            assert!((direct - logged).abs() <= 1e-14 * direct);
        }
    }

    #[test]
    fn window_rules() {
        assert!(Window::new(0, 5).is_err());
        assert!(Window::new(-5, 0).is_err());
        let w = Window::new(-3, 4).unwrap();
        assert_eq!(w.len(), 8);
        assert_eq!(w.index(-3), Some(0));
        assert_eq!(w.index(5), None);
    }
}
