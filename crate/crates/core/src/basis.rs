//! Schauder basis `f_n` versus Laurent basis `z^n`.
//!
//! In the split variant `f_n = a_n z^n` for `n <= -1` and
//! `f_n = (a_n + b_n z) z^n` for `n >= 0`; in the full variant the affine
//! form is used everywhere. Inverting `f_ν` gives
//! `z^ν = (1/a_ν) Σ_j (-1)^j (b_ν⋯b_{ν+j-1})/(a_{ν+1}⋯a_{ν+j}) f_{ν+j}`.

use num_complex::Complex64;

use crate::config::WeightedShift;
use crate::error::{Error, Result};
use crate::numeric::{BasisTag, BilateralVector, NormKind};

/// Relative cutoff for expansion tails.
pub const TRUNCATION_EPS: f64 = 1e-16;
/// Hard cap on terms summed beyond the window.
const MAX_TERMS: usize = 10_000;
/// Step ratios used to estimate the geometric decay at the window edge.
const RHO_SAMPLE: usize = 16;

/// Schauder coefficients of `z^ν`: `leading * ratios[j]` on `f_{ν+j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialExpansion {
    pub nu: i64,
    /// `1 / a_ν`.
    pub leading: f64,
    /// `ratios[0] = 1`, `ratios[j] = (-1)^j ∏_{k<j} b_{ν+k}/a_{ν+k+1}`.
    pub ratios: Vec<f64>,
    /// Upper bound on the sum of the absolute values of the dropped
    /// coefficients.
    pub tail_bound: f64,
}

impl MonomialExpansion {
    /// Coefficient on `f_{ν+j}`, zero past the stored terms.
    pub fn coefficient(&self, j: usize) -> f64 {
        self.ratios.get(j).map_or(0.0, |r| self.leading * r)
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.ratios
            .iter()
            .enumerate()
            .map(move |(j, r)| (self.nu + j as i64, self.leading * r))
    }
}

/// Expands `z^ν` in the Schauder basis, stopping at the cutoff or at the
/// window edge.
pub fn monomial_expansion(op: &WeightedShift, nu: i64) -> Result<MonomialExpansion> {
    let window = op.window();
    let leading = 1.0 / op.try_a(nu)?;
    let mut ratios = vec![1.0];
    let mut steps: Vec<f64> = Vec::new();
    let mut m = nu;
    loop {
        let b = op.try_b(m)?;
        if b == 0.0 {
            return Ok(MonomialExpansion {
                nu,
                leading,
                ratios,
                tail_bound: 0.0,
            });
        }
        let step = -b / op.try_a(m + 1)?;
        let last = *ratios.last().unwrap_or(&1.0);
        let next = last * step;
        if next.abs() < TRUNCATION_EPS || !window.contains(m + 1) {
            // bound the dropped tail geometrically
            steps.push(step.abs());
            let tail = &steps[steps.len().saturating_sub(RHO_SAMPLE)..];
            let rho = tail.iter().copied().fold(0.0, f64::max);
            if rho < 1.0 {
                return Ok(MonomialExpansion {
                    nu,
                    leading,
                    ratios,
                    tail_bound: leading.abs() * last.abs() * rho / (1.0 - rho),
                });
            }
            if next.abs() < TRUNCATION_EPS && window.contains(m + 1) {
                // not yet geometric: keep going inside the window
                ratios.push(next);
                m += 1;
                continue;
            }
            return Err(Error::WindowExhausted { nu });
        }
        steps.push(step.abs());
        ratios.push(next);
        m += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialNorm {
    pub nu: i64,
    /// `‖z^ν‖`, infinite when `z^ν` is not in the space.
    pub norm: f64,
    /// Whether the series defining the norm converges.
    pub member: bool,
    /// Terms summed, beyond which the remainder is below the cutoff.
    pub terms: usize,
}

/// `‖z^ν‖` from the closed-form series, summed past the window when needed.
pub fn monomial_norm(op: &WeightedShift, nu: i64) -> Result<MonomialNorm> {
    let a = op.try_a(nu)?;
    let ln_lead = -a.abs().ln();
    // ln |ratio_j|
    let mut ln_r = 0.0f64;
    let mut max_ln_r = 0.0f64;
    let mut terms = 1usize;
    let mut acc = match op.norm() {
        NormKind::Lp(_) => 1.0,
        NormKind::C0 => 0.0,
    };
    let mut m = nu;
    let mut converged = false;
    while terms < MAX_TERMS {
        let b = op.try_b(m)?;
        if b == 0.0 {
            converged = true;
            break;
        }
        let ln_step = b.abs().ln() - op.try_a(m + 1)?.abs().ln();
        ln_r += ln_step;
        max_ln_r = max_ln_r.max(ln_r);
        terms += 1;
        m += 1;
        match op.norm() {
            NormKind::Lp(p) => {
                let t = (p * ln_r).exp();
                if !t.is_finite() {
                    return Err(Error::DivergentSeries { nu });
                }
                acc += t;
                if t < TRUNCATION_EPS * acc && ln_step < 0.0 {
                    converged = true;
                    break;
                }
            }
            NormKind::C0 => {
                if !ln_r.is_finite() || ln_r > 700.0 {
                    return Err(Error::DivergentSeries { nu });
                }
                acc = acc.max(ln_r);
                if ln_r < TRUNCATION_EPS.ln() {
                    converged = true;
                    break;
                }
            }
        }
    }
    if !converged {
        // cap reached: member only if the terms have clearly decayed
        if ln_r > max_ln_r - 1e3f64.ln() {
            return Ok(MonomialNorm {
                nu,
                norm: f64::INFINITY,
                member: false,
                terms,
            });
        }
    }
    let lead = 1.0 / a.abs();
    let norm = match op.norm() {
        NormKind::Lp(p) if lead.is_finite() => lead * acc.powf(1.0 / p),
        NormKind::Lp(p) => (ln_lead + acc.ln() / p).exp(),
        NormKind::C0 => (ln_lead + acc).exp(),
    };
    Ok(MonomialNorm {
        nu,
        norm,
        member: true,
        terms,
    })
}

fn require(v: &BilateralVector, tag: BasisTag) -> Result<()> {
    if v.basis() == tag {
        Ok(())
    } else {
        Err(Error::WrongBasis {
            expected: tag.as_str(),
            found: v.basis().as_str(),
        })
    }
}

/// Laurent coefficient `k_n(v) = a_n λ_n + b_{n-1} λ_{n-1}` of a Schauder vector.
pub fn coefficient_functional(op: &WeightedShift, v: &BilateralVector, n: i64) -> Result<f64> {
    require(v, BasisTag::Schauder)?;
    let mut x = v.get(n) * op.try_a(n)?;
    let prev = v.get(n - 1);
    if prev != 0.0 {
        x += prev * op.try_b(n - 1)?;
    }
    Ok(x)
}

/// Laurent coefficients on the same window; the coefficient at
/// `window.max() + 1` is dropped.
pub fn laurent_from_schauder(op: &WeightedShift, v: &BilateralVector) -> Result<BilateralVector> {
    require(v, BasisTag::Schauder)?;
    let window = v.window();
    let coeffs = window
        .indices()
        .map(|n| coefficient_functional(op, v, n))
        .collect::<Result<Vec<_>>>()?;
    BilateralVector::from_coeffs(window, coeffs, BasisTag::Laurent)
}

/// Schauder coefficients by superposing monomial expansions.
pub fn schauder_from_laurent(op: &WeightedShift, v: &BilateralVector) -> Result<BilateralVector> {
    require(v, BasisTag::Laurent)?;
    let window = v.window();
    let mut out = BilateralVector::zeros(window, BasisTag::Schauder);
    for (nu, x) in v.iter() {
        if x == 0.0 {
            continue;
        }
        let exp = monomial_expansion(op, nu)?;
        for (m, c) in exp.iter() {
            if window.contains(m) {
                out.set(m, out.get(m) + x * c);
            }
        }
    }
    Ok(out)
}

/// `f(ζ)` for a vector in either basis.
pub fn evaluate(op: &WeightedShift, v: &BilateralVector, zeta: Complex64) -> Result<Complex64> {
    let (r, big_r) = op.radii();
    let modulus = zeta.norm();
    if !(modulus > r && modulus < big_r) {
        return Err(Error::OutsideAnnulus { modulus, r, big_r });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, x) in v.iter() {
        if x == 0.0 {
            continue;
        }
        let zn = zeta.powi(n as i32);
        let term = match v.basis() {
            BasisTag::Laurent => zn,
            BasisTag::Schauder => zn * (op.try_a(n)? + op.try_b(n)? * zeta),
        };
        sum += term * x;
    }
    Ok(sum)
}

/// Upper bound for `‖k_n‖` in the dual norm.
pub fn coefficient_functional_bound(op: &WeightedShift, n: i64) -> Result<f64> {
    let a = op.try_a(n)?.abs();
    let b = op.try_b(n - 1)?.abs();
    Ok(match op.norm() {
        NormKind::Lp(p) if p > 1.0 => {
            let q = p / (p - 1.0);
            NormKind::Lp(q).norm_of([a, b])
        }
        NormKind::Lp(_) => a.max(b),
        NormKind::C0 => a + b,
    })
}
