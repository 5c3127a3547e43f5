//! Truncated matrices of `B_w^ν` in the Schauder basis, the closed-form
//! action of `B_w^ν` on coefficient vectors, and the splitting
//! `[B_w] = T_{-1} + D + Σ_i T_i`.
//!
//! Column `n` of `[B_w^ν]` holds `A_{n,ν}` at row `n-ν`, `C_{n,ν}` at row
//! `n-ν+1` and `C_{n,ν} (-1)^j ∏_{k<j} b_{n-ν+1+k}/a_{n-ν+2+k}` at row
//! `n-ν+1+j`, where
//! `A_{n,ν} = w_n⋯w_{n-ν+1} a_n / a_{n-ν}` and
//! `C_{n,ν} = w_{n+1}⋯w_{n-ν+2} b_n / a_{n-ν+1}
//!          - w_n⋯w_{n-ν+1} a_n b_{n-ν} / (a_{n-ν} a_{n-ν+1})`.

use rayon::prelude::*;

use crate::config::WeightedShift;
use crate::error::{Error, Result};
use crate::numeric::{BasisTag, BasisVariant, BilateralVector, SignedLog, Window};
use crate::report::Json;
use crate::verdict::Status;

/// Dense block of `[B_w^ν]` over a window, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMatrix {
    window: Window,
    power: i64,
    variant: BasisVariant,
    data: Vec<f64>,
}

impl TruncatedMatrix {
    fn zeros(window: Window, power: i64, variant: BasisVariant) -> Self {
        let n = window.len();
        TruncatedMatrix {
            window,
            power,
            variant,
            data: vec![0.0; n * n],
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn power(&self) -> i64 {
        self.power
    }

    pub fn variant(&self) -> BasisVariant {
        self.variant
    }

    pub fn size(&self) -> usize {
        self.window.len()
    }

    /// Entry at `(row, col)` in bilateral indices; zero outside the window.
    pub fn get(&self, row: i64, col: i64) -> f64 {
        match (self.window.index(row), self.window.index(col)) {
            (Some(r), Some(c)) => self.data[r * self.size() + c],
            _ => 0.0,
        }
    }

    fn set(&mut self, row: i64, col: i64, x: f64) {
        if let (Some(r), Some(c)) = (self.window.index(row), self.window.index(col)) {
            let n = self.size();
            self.data[r * n + c] = x;
        }
    }

    pub fn row(&self, row: i64) -> &[f64] {
        let r = self.window.index(row).expect("row outside window");
        let n = self.size();
        &self.data[r * n..(r + 1) * n]
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &TruncatedMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Plain matrix-vector product over the window.
    pub fn mul_vec(&self, v: &BilateralVector) -> Result<BilateralVector> {
        if v.window() != self.window {
            return Err(Error::LengthMismatch {
                len: v.window().len(),
                size: self.size(),
            });
        }
        let n = self.size();
        let x = v.coeffs();
        let coeffs = (0..n)
            .map(|r| {
                self.data[r * n..(r + 1) * n]
                    .iter()
                    .zip(x)
                    .filter(|(_, xi)| **xi != 0.0)
                    .map(|(m, xi)| m * xi)
                    .sum()
            })
            .collect();
        BilateralVector::from_coeffs(self.window, coeffs, v.basis())
    }

    /// The block as CSV, one line per row; the header lists column indices.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for c in self.window.indices() {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
        for r in self.window.indices() {
            out.push_str(&r.to_string());
            for x in self.row(r) {
                out.push(',');
                out.push_str(&crate::report::format_float(*x));
            }
            out.push('\n');
        }
        out
    }
}

fn slog(x: f64) -> SignedLog {
    SignedLog::from_real(x)
}

/// `w_lo ⋯ w_hi` (empty product when `lo > hi`).
fn weight_product(op: &WeightedShift, lo: i64, hi: i64) -> SignedLog {
    (lo..=hi).map(|k| slog(op.w(k))).product()
}

/// `c_n = w_{n+1} b_n / a_n - w_n b_{n-1} / a_{n-1}`.
pub fn c_coefficient(op: &WeightedShift, n: i64) -> f64 {
    let term = |k: i64| {
        let b = op.b(k);
        if b == 0.0 {
            0.0
        } else {
            op.w(k + 1) * b / op.a(k)
        }
    };
    term(n) - term(n - 1)
}

/// `A_{n,ν}`.
pub fn a_power_coefficient(op: &WeightedShift, n: i64, nu: i64) -> SignedLog {
    weight_product(op, n - nu + 1, n) * slog(op.a(n)) / slog(op.a(n - nu))
}

/// `C_{n,ν}`; in the split variant the terms vanishing through `b_k = 0`,
/// `k <= -1`, are dropped by case.
pub fn c_power_coefficient(op: &WeightedShift, n: i64, nu: i64) -> SignedLog {
    let first = || {
        let b = op.b(n);
        if b == 0.0 {
            SignedLog::ZERO
        } else {
            weight_product(op, n - nu + 2, n + 1) * slog(b) / slog(op.a(n - nu + 1))
        }
    };
    let second = || {
        let b = op.b(n - nu);
        if b == 0.0 {
            SignedLog::ZERO
        } else {
            weight_product(op, n - nu + 1, n) * slog(op.a(n)) * slog(b)
                / (slog(op.a(n - nu)) * slog(op.a(n - nu + 1)))
        }
    };
    match op.variant() {
        BasisVariant::SplitAffine if n <= -1 => SignedLog::ZERO,
        BasisVariant::SplitAffine if n < nu => first(),
        _ => first() - second(),
    }
}

/// `-b_k / a_{k+1}`: one step down a column.
fn column_step(op: &WeightedShift, k: i64) -> SignedLog {
    slog(column_step_real(op, k))
}

fn column_step_real(op: &WeightedShift, k: i64) -> f64 {
    let b = op.b(k);
    if b == 0.0 {
        0.0
    } else {
        -b / op.a(k + 1)
    }
}

/// `A_{n,ν}` in plain floating point.
fn a_power_real(op: &WeightedShift, n: i64, nu: i64) -> f64 {
    let w: f64 = (n - nu + 1..=n).map(|k| op.w(k)).product();
    w * op.a(n) / op.a(n - nu)
}

/// `C_{n,ν}` in plain floating point, by the same cases as
/// [`c_power_coefficient`].
fn c_power_real(op: &WeightedShift, n: i64, nu: i64) -> f64 {
    let first = || {
        let b = op.b(n);
        if b == 0.0 {
            0.0
        } else {
            let w: f64 = (n - nu + 2..=n + 1).map(|k| op.w(k)).product();
            w * b / op.a(n - nu + 1)
        }
    };
    let second = || {
        let b = op.b(n - nu);
        if b == 0.0 {
            0.0
        } else {
            let w: f64 = (n - nu + 1..=n).map(|k| op.w(k)).product();
            w * op.a(n) * b / (op.a(n - nu) * op.a(n - nu + 1))
        }
    };
    match op.variant() {
        BasisVariant::SplitAffine if n <= -1 => 0.0,
        BasisVariant::SplitAffine if n < nu => first(),
        _ => first() - second(),
    }
}

/// Column `n` of `[B_w^ν]` restricted to `window`, as `(row, value)`.
fn closed_form_column(op: &WeightedShift, n: i64, nu: i64, window: Window) -> Vec<(i64, f64)> {
    let mut out = Vec::new();
    let top = n - nu;
    if window.contains(top) {
        out.push((top, a_power_real(op, n, nu)));
    }
    let mut row = top + 1;
    let mut value = c_power_real(op, n, nu);
    while row <= window.max() && value != 0.0 {
        if window.contains(row) {
            out.push((row, value));
        }
        value *= column_step_real(op, row);
        row += 1;
    }
    out
}

/// Assembles `[B_w^ν]` on the operator's window.
pub fn assemble_matrix(op: &WeightedShift, nu: i64) -> Result<TruncatedMatrix> {
    assemble_on(op, nu, op.window())
}

fn assemble_on(op: &WeightedShift, nu: i64, window: Window) -> Result<TruncatedMatrix> {
    if nu < 1 {
        return Err(Error::InvalidPower(nu));
    }
    let mut m = TruncatedMatrix::zeros(window, nu, op.variant());
    if op.variant() == BasisVariant::FullAffine && nu > 1 {
        // no closed form for full-variant powers: build columns by iteration
        let cols: Vec<BilateralVector> = window
            .indices()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&n| {
                apply_iterated(
                    op,
                    nu,
                    &BilateralVector::unit(window, n, BasisTag::Schauder),
                )
            })
            .collect::<Result<_>>()?;
        for (n, col) in window.indices().zip(cols) {
            for (row, x) in col.iter() {
                m.set(row, n, x);
            }
        }
        return Ok(m);
    }
    let cols: Vec<Vec<(i64, f64)>> = window
        .indices()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| closed_form_column(op, n, nu, window))
        .collect();
    for (n, col) in window.indices().zip(cols) {
        for (row, x) in col {
            m.set(row, n, x);
        }
    }
    Ok(m)
}

/// Image of a vector under `B_w^ν`, with per-coordinate truncation flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftImage {
    pub vector: BilateralVector,
    /// The same coefficients before conversion to `f64`.
    pub values: Vec<SignedLog>,
    /// Coordinates within `ν` of a window edge.
    pub tainted: Vec<bool>,
}

impl ShiftImage {
    pub fn value(&self, n: i64) -> SignedLog {
        self.vector
            .window()
            .index(n)
            .map_or(SignedLog::ZERO, |i| self.values[i])
    }

    pub fn is_tainted(&self, n: i64) -> bool {
        self.vector
            .window()
            .index(n)
            .is_none_or(|i| self.tainted[i])
    }

    fn from_values(window: Window, nu: i64, values: Vec<SignedLog>) -> Result<Self> {
        let coeffs = values.iter().map(|x| x.to_real()).collect();
        let tainted = window
            .indices()
            .map(|j| j > window.max() - nu || j < window.min() + nu)
            .collect();
        Ok(ShiftImage {
            vector: BilateralVector::from_coeffs(window, coeffs, BasisTag::Schauder)?,
            values,
            tainted,
        })
    }
}

fn require_schauder(v: &BilateralVector) -> Result<()> {
    if v.basis() == BasisTag::Schauder {
        Ok(())
    } else {
        Err(Error::WrongBasis {
            expected: BasisTag::Schauder.as_str(),
            found: v.basis().as_str(),
        })
    }
}

/// `[B_w^ν] u` from the closed form for its coordinates `α_{j,ν}`.
///
/// `α_{j,ν} = A_{ν+j,ν} λ_{ν+j} + C_{ν+j-1,ν} λ_{ν+j-1}
///          + Σ_{k <= ν+j-2} (-1)^{ν+j-1-k} P_k C_{k,ν} λ_k`
/// with `P_k = b_{k-ν+1}⋯b_{j-1} / (a_{k-ν+2}⋯a_j)`. In the split variant
/// `P_k = 0` once `k - ν + 1 <= -1`, so the sum starts at `k = ν-1` and is
/// empty for `j <= 0`. Full-variant powers `ν > 1` fall back to iteration.
pub fn apply(op: &WeightedShift, nu: i64, v: &BilateralVector) -> Result<ShiftImage> {
    if nu < 1 {
        return Err(Error::InvalidPower(nu));
    }
    require_schauder(v)?;
    let window = v.window();
    if op.variant() == BasisVariant::FullAffine && nu > 1 {
        let out = apply_iterated(op, nu, v)?;
        let values = out.coeffs().iter().map(|x| slog(*x)).collect();
        return ShiftImage::from_values(window, nu, values);
    }
    let Some((lo, _)) = v.support() else {
        return ShiftImage::from_values(window, nu, vec![SignedLog::ZERO; window.len()]);
    };
    let lambda = |k: i64| slog(v.get(k));
    let mut c_cache = std::collections::HashMap::new();
    let mut c_at = |k: i64| {
        *c_cache
            .entry(k)
            .or_insert_with(|| c_power_coefficient(op, k, nu))
    };

    let mut values = Vec::with_capacity(window.len());
    for j in window.indices() {
        let mut acc = SignedLog::ZERO;
        let top = lambda(nu + j);
        if !top.is_zero() {
            acc = acc + a_power_coefficient(op, nu + j, nu) * top;
        }
        let diag = lambda(nu + j - 1);
        if !diag.is_zero() {
            acc = acc + c_at(nu + j - 1) * diag;
        }
        // P for k = ν+j-2 is b_{j-1}/a_j, with sign -1
        let mut p = column_step(op, j - 1);
        let mut k = nu + j - 2;
        while !p.is_zero() && k >= lo {
            let l = lambda(k);
            if !l.is_zero() {
                acc = acc + p * c_at(k) * l;
            }
            p = p * column_step(op, k - nu);
            k -= 1;
        }
        values.push(acc);
    }
    ShiftImage::from_values(window, nu, values)
}

/// `[B_w]` applied `ν` times by matrix multiplication; the test oracle for
/// [`apply`].
pub fn apply_iterated(op: &WeightedShift, nu: i64, v: &BilateralVector) -> Result<BilateralVector> {
    if nu < 1 {
        return Err(Error::InvalidPower(nu));
    }
    require_schauder(v)?;
    let m = assemble_on(op, 1, v.window())?;
    let mut out = v.clone();
    for _ in 0..nu {
        out = m.mul_vec(&out)?;
    }
    Ok(out)
}

/// `[B_w] = T_{-1} + D + Σ_{i>=1} T_i` on the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub window: Window,
    pub variant: BasisVariant,
    /// `α_n = w_{n+1} a_{n+1} / a_n`; `T_{-1}` has `α_{n-1}` at `(n-1, n)`.
    pub alpha: Vec<f64>,
    /// Diagonal `c_n`.
    pub c: Vec<f64>,
    /// `t_entries[i-1][col]` is the `T_i` entry in column `n`, at row `n+i`.
    pub t_entries: Vec<Vec<f64>>,
    /// `‖T_i‖`, `i = 1..=i_max`.
    pub t_norms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Top-quartile estimate of `limsup |b_n / a_{n+1}|`.
    pub rho: f64,
    /// Bound on `Σ_{i>i_max} ‖T_i‖`, when `rho < 1`.
    pub tail_bound: Option<f64>,
    /// Whether `c_n → 0` at both ends of the window.
    pub compactness: Status,
    pub compactness_reason: String,
}

impl Decomposition {
    pub fn alpha_at(&self, n: i64) -> f64 {
        self.window.index(n).map_or(f64::NAN, |i| self.alpha[i])
    }

    pub fn c_at(&self, n: i64) -> f64 {
        self.window.index(n).map_or(f64::NAN, |i| self.c[i])
    }

    pub fn i_max(&self) -> usize {
        self.t_norms.len()
    }

    /// `T_{-1} + D + Σ T_i` as a matrix.
    pub fn reassemble(&self) -> TruncatedMatrix {
        let mut m = TruncatedMatrix::zeros(self.window, 1, self.variant);
        for (col, n) in self.window.indices().enumerate() {
            if n > self.window.min() {
                m.set(n - 1, n, self.alpha[col - 1]);
            }
            m.set(n, n, self.c[col]);
            for (i, t) in self.t_entries.iter().enumerate() {
                m.set(n + i as i64 + 1, n, t[col]);
            }
        }
        m
    }

    pub fn to_json(&self, spectrum: Option<&EssentialSpectrum>) -> Json {
        let compact = Json::obj()
            .with("status", self.compactness.as_str())
            .with("reason", self.compactness_reason.as_str());
        Json::obj()
            .with("window", vec![self.window.min(), self.window.max()])
            .with("alpha", self.alpha.as_slice())
            .with("c", self.c.as_slice())
            .with("T_norms", self.t_norms.as_slice())
            .with("T_partial_sums", self.partial_sums.as_slice())
            .with("rho", self.rho)
            .with("tail_bound", self.tail_bound)
            .with("compactness", compact)
            .with(
                "essential_spectrum",
                spectrum.map_or(Json::Null, EssentialSpectrum::to_json),
            )
    }
}

/// Top-quartile maximum of `|b_n / a_{n+1}|` over `n >= 0` in the window.
pub(crate) fn rho_estimate(op: &WeightedShift) -> (f64, Vec<(i64, f64)>) {
    let max = op.window().max();
    let start = ((3 * max + 3) / 4).max(0);
    let tail: Vec<(i64, f64)> = (start..=max)
        .map(|n| (n, (op.b(n) / op.a(n + 1)).abs()))
        .collect();
    let rho = tail.iter().map(|(_, x)| *x).fold(0.0, f64::max);
    (rho, tail)
}

fn tail_vanishes(values: &[f64]) -> (Status, &'static str) {
    let abs: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    if abs.iter().all(|x| *x == 0.0) {
        return (Status::Holds, "identically zero");
    }
    let first = abs[0];
    let last = abs[abs.len() - 1];
    if abs.windows(2).all(|w| w[1] == w[0]) {
        return (Status::Fails, "constant nonzero");
    }
    if abs.windows(2).all(|w| w[1] <= w[0]) && last <= 0.5 * first {
        return (Status::Holds, "monotone decay");
    }
    (Status::Inconclusive, "no decay certificate")
}

pub fn decompose(op: &WeightedShift, i_max: usize) -> Result<Decomposition> {
    if i_max < 1 {
        return Err(Error::InvalidPower(i_max as i64));
    }
    let window = op.window();
    let alpha: Vec<f64> = window
        .indices()
        .map(|n| op.w(n + 1) * op.a(n + 1) / op.a(n))
        .collect();
    let c: Vec<f64> = window.indices().map(|n| c_coefficient(op, n)).collect();

    let mut t_entries = vec![vec![0.0; window.len()]; i_max];
    for (col, n) in window.indices().enumerate() {
        let mut value = c[col];
        for (i, row) in t_entries.iter_mut().enumerate() {
            value *= column_step_real(op, n + i as i64);
            if value == 0.0 {
                break;
            }
            row[col] = value;
        }
    }
    let t_norms: Vec<f64> = t_entries
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).fold(0.0, f64::max))
        .collect();
    let partial_sums = t_norms
        .iter()
        .scan(0.0, |s, x| {
            *s += x;
            Some(*s)
        })
        .collect();

    let (rho, _) = rho_estimate(op);
    let tail_bound = (rho < 1.0).then(|| {
        let ratios: Vec<f64> = window
            .indices()
            .map(|n| (op.b(n) / op.a(n + 1)).abs())
            .collect();
        let big_m = ratios
            .iter()
            .chain(c.iter())
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        let n0 = ratios.iter().filter(|x| **x > rho).count() as f64;
        big_m.powf(n0 + 1.0) * rho.powf(i_max as f64 - n0 + 1.0) / (1.0 - rho)
    });

    let half = window.len() / 4;
    let neg: Vec<f64> = c[..half].iter().rev().copied().collect();
    let pos = &c[c.len() - half..];
    let (s_neg, r_neg) = tail_vanishes(&neg);
    let (s_pos, r_pos) = tail_vanishes(pos);
    let compactness = s_neg.and(s_pos);
    let compactness_reason = format!("c_n as n -> -inf: {r_neg}; as n -> +inf: {r_pos}");

    Ok(Decomposition {
        window,
        variant: op.variant(),
        alpha,
        c,
        t_entries,
        t_norms,
        partial_sums,
        rho,
        tail_bound,
        compactness,
        compactness_reason,
    })
}

/// Annulus estimate for the essential spectrum of the weighted shift with
/// weights `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct EssentialSpectrum {
    pub inner: f64,
    pub outer: f64,
    /// Block length of the geometric means.
    pub block: usize,
    pub meets_unit_circle: bool,
    /// `Holds` if the annulus meets the unit circle, `Fails` if not,
    /// `Inconclusive` when compactness of the perturbation is not
    /// established.
    pub status: Status,
}

impl EssentialSpectrum {
    pub fn to_json(&self) -> Json {
        Json::obj()
            .with("status", self.status.as_str())
            .with("inner", self.inner)
            .with("outer", self.outer)
            .with("block", self.block)
            .with("meets_unit_circle", self.meets_unit_circle)
            .with("method", "finite-window geometric means of |alpha|")
    }
}

/// Min and max over the window of block geometric means of `|α|`.
pub fn essential_spectrum_estimate(dec: &Decomposition) -> Result<EssentialSpectrum> {
    for (n, a) in dec.window.indices().zip(&dec.alpha) {
        if *a == 0.0 {
            return Err(Error::ZeroWeight(n));
        }
    }
    let ln: Vec<f64> = dec.alpha.iter().map(|a| a.abs().ln()).collect();
    let block = (ln.len() / 2).max(1);
    let mut inner = f64::INFINITY;
    let mut outer = f64::NEG_INFINITY;
    let mut s: f64 = ln[..block].iter().sum();
    for start in 0..=ln.len() - block {
        if start > 0 {
            s += ln[start + block - 1] - ln[start - 1];
        }
        let mean = s / block as f64;
        inner = inner.min(mean);
        outer = outer.max(mean);
    }
    let (inner, outer) = (inner.exp(), outer.exp());
    let meets = inner <= 1.0 && 1.0 <= outer;
    let status = match dec.compactness {
        Status::Holds if meets => Status::Holds,
        Status::Holds => Status::Fails,
        _ => Status::Inconclusive,
    };
    Ok(EssentialSpectrum {
        inner,
        outer,
        block,
        meets_unit_circle: meets,
        status,
    })
}
