use nalgebra::{DMatrix, DVector};

use super::sequence::SequenceSpec;
use crate::error::{Error, Result};
use crate::numeric::{BasisVariant, SpaceParams};
use crate::report::Json;

/// Number of indices probed on each side when extrapolating the radii.
const RADIUS_PROBE: i64 = 256;
/// Relative tolerance for comparing the two radii.
const RADIUS_TOL: f64 = 1e-6;
const GROWTH_THRESHOLD: f64 = 1e9;

/// Estimated inner and outer radius of the annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiiEstimate {
    /// Extrapolated `r`.
    pub r: f64,
    /// Extrapolated `R`.
    pub big_r: f64,
    /// Maximum of `(|a_{-n}| + |b_{-n}|)^{1/n}` over the top quartile of the window.
    pub r_window_max: f64,
    /// Reciprocal of the maximum of `(|a_n| + |b_n|)^{1/n}` over the top quartile.
    pub big_r_window_max: f64,
    /// `(n, (|a_{-n}| + |b_{-n}|)^{1/n})` over the top quartile.
    pub r_tail: Vec<(i64, f64)>,
    /// `(n, (|a_n| + |b_n|)^{1/n})` over the top quartile.
    pub inv_big_r_tail: Vec<(i64, f64)>,
    /// Largest index used by the extrapolation on each side.
    pub probe: (i64, i64),
    /// `r` and `R` agree within tolerance: the annulus degenerates to a circle.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthCondition {
    /// Some `b_n` with `n <= -1` vanishes, so the supremum is trivially infinite.
    Degenerate { zero_b_at: i64 },
    /// Natural logs of the running supremum of `|a_{n+1}...a_0 / (b_n...b_{-1})|`
    /// for `n = -1, -2, ...` down to the window edge.
    PartialSups {
        ln_running_sup: Vec<f64>,
        diverging: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub radii: RadiiEstimate,
    pub growth: GrowthCondition,
}

fn pairs(xs: &[(i64, f64)]) -> Json {
    Json::Arr(
        xs.iter()
            .map(|(n, x)| Json::Arr(vec![(*n).into(), (*x).into()]))
            .collect(),
    )
}

impl ValidationReport {
    pub fn to_json(&self) -> Json {
        let r = &self.radii;
        let radii = Json::obj()
            .with("r", r.r)
            .with("R", r.big_r)
            .with("r_window_max", r.r_window_max)
            .with("R_window_max", r.big_r_window_max)
            .with("probe", vec![r.probe.0, r.probe.1])
            .with("degenerate", r.degenerate)
            .with("r_tail", pairs(&r.r_tail))
            .with("inv_R_tail", pairs(&r.inv_big_r_tail));
        let growth = match &self.growth {
            GrowthCondition::Degenerate { zero_b_at } => Json::obj()
                .with("status", "degenerate")
                .with("zero_b_at", *zero_b_at),
            GrowthCondition::PartialSups {
                ln_running_sup,
                diverging,
            } => Json::obj()
                .with(
                    "status",
                    if *diverging {
                        "diverging"
                    } else {
                        "not_diverging"
                    },
                )
                .with("ln_running_sup", ln_running_sup.as_slice()),
        };
        Json::obj().with("radii", radii).with("growth", growth)
    }
}

fn effective_b(b: &SequenceSpec, variant: BasisVariant, n: i64) -> Result<f64> {
    if variant == BasisVariant::SplitAffine && n <= -1 {
        Ok(0.0)
    } else {
        b.eval(n)
    }
}

/// Checks the standing assumptions on `(a, b, w)` over the window and
/// estimates the annulus radii.
pub fn validate_config(
    a: &SequenceSpec,
    b: &SequenceSpec,
    w: &SequenceSpec,
    params: &SpaceParams,
) -> Result<ValidationReport> {
    let window = params.window;
    for n in window.indices() {
        if a.eval(n)? == 0.0 {
            return Err(Error::ZeroA(n));
        }
        effective_b(b, params.variant, n)?;
        w.eval(n)?;
    }

    let growth = growth_condition(a, b, params)?;
    let radii = estimate_radii(a, b, params)?;
    if radii.r > radii.big_r * (1.0 + RADIUS_TOL) || radii.big_r == 0.0 {
        return Err(Error::RadiiCollapse {
            r: radii.r,
            big_r: radii.big_r,
        });
    }
    Ok(ValidationReport { radii, growth })
}

fn growth_condition(
    a: &SequenceSpec,
    b: &SequenceSpec,
    params: &SpaceParams,
) -> Result<GrowthCondition> {
    let window = params.window;
    let mut ln_ratio = 0.0;
    let mut running = f64::NEG_INFINITY;
    let mut sups = Vec::new();
    for n in (window.min()..=-1).rev() {
        let bn = effective_b(b, params.variant, n)?;
        if bn == 0.0 {
            return Ok(GrowthCondition::Degenerate { zero_b_at: n });
        }
        ln_ratio += a.eval(n + 1)?.abs().ln() - bn.abs().ln();
        running = running.max(ln_ratio);
        sups.push(running);
    }
    let diverging = running > GROWTH_THRESHOLD.ln()
        && sups
            .iter()
            .position(|s| *s == running)
            .is_some_and(|i| 4 * i >= 3 * sups.len());
    Ok(GrowthCondition::PartialSups {
        ln_running_sup: sups,
        diverging,
    })
}

/// `ln(|a_n| + |b_n|)` for `n = side * k`, `k = 1..`, stopping at the first
/// failed evaluation outside the window.
fn probe_side(
    a: &SequenceSpec,
    b: &SequenceSpec,
    params: &SpaceParams,
    side: i64,
) -> Result<Vec<f64>> {
    let window = params.window;
    let edge = if side < 0 {
        -window.min()
    } else {
        window.max()
    };
    let extent = edge.max(RADIUS_PROBE);
    let mut out = Vec::with_capacity(extent as usize);
    for k in 1..=extent {
        let n = side * k;
        let value = a
            .eval(n)
            .and_then(|x| Ok(x.abs() + effective_b(b, params.variant, n)?.abs()));
        match value {
            Ok(v) if v > 0.0 && v.is_finite() => out.push(v.ln()),
            Ok(_) | Err(_) if k > edge => break,
            Ok(_) => return Err(Error::ZeroA(n)),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Root-test limit `lim (y_k)^{1/k}` from `ln y_k`, `k = 1..`, fitted with
/// an asymptotic model `ln y_k ~ k ln(rho) + c ln k + sum_j d_j k^{-j/2}`.
fn extrapolate_root(ln_y: &[f64]) -> Option<f64> {
    let n = ln_y.len();
    let lo = n / 4;
    if n - lo < 16 {
        return None;
    }
    let rows = n - lo;
    let basis = |k: f64| {
        [
            k,
            1.0,
            k.ln(),
            k.powf(-0.5),
            1.0 / k,
            k.powf(-1.5),
            1.0 / (k * k),
        ]
    };
    let cols = 7;
    let mut x = DMatrix::<f64>::zeros(rows, cols);
    let mut y = DVector::<f64>::zeros(rows);
    for (r, i) in (lo..n).enumerate() {
        let k = (i + 1) as f64;
        for (c, v) in basis(k).into_iter().enumerate() {
            x[(r, c)] = v;
        }
        y[r] = ln_y[i];
    }
    let scale: Vec<f64> = (0..cols)
        .map(|c| x.column(c).amax().max(f64::MIN_POSITIVE))
        .collect();
    for (c, s) in scale.iter().enumerate() {
        x.column_mut(c).scale_mut(1.0 / s);
    }
    let coef = x.svd(true, true).solve(&y, 1e-14).ok()?;
    let slope = coef[0] / scale[0];
    slope.is_finite().then(|| slope.exp())
}

fn estimate_radii(
    a: &SequenceSpec,
    b: &SequenceSpec,
    params: &SpaceParams,
) -> Result<RadiiEstimate> {
    let window = params.window;
    let neg = probe_side(a, b, params, -1)?;
    let pos = probe_side(a, b, params, 1)?;

    let quartile = |edge: i64, ln_y: &[f64]| -> Vec<(i64, f64)> {
        let start = (3 * edge + 3) / 4;
        (start.max(1)..=edge)
            .map(|k| (k, (ln_y[(k - 1) as usize] / k as f64).exp()))
            .collect()
    };
    let r_tail = quartile(-window.min(), &neg);
    let inv_big_r_tail = quartile(window.max(), &pos);
    let tail_max = |t: &[(i64, f64)]| t.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let r_window_max = tail_max(&r_tail);
    let big_r_window_max = 1.0 / tail_max(&inv_big_r_tail);

    let r = extrapolate_root(&neg).unwrap_or(r_window_max);
    let big_r = extrapolate_root(&pos).map_or(big_r_window_max, |inv| 1.0 / inv);
    let degenerate = (r - big_r).abs() <= RADIUS_TOL * big_r;
    Ok(RadiiEstimate {
        r,
        big_r,
        r_window_max,
        big_r_window_max,
        r_tail,
        inv_big_r_tail,
        probe: (neg.len() as i64, pos.len() as i64),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Window;

    fn spec(name: &str, pieces: &[(&str, &str)], dz: bool) -> SequenceSpec {
        SequenceSpec::parse(name, pieces.iter().copied(), dz).unwrap()
    }

    fn params() -> SpaceParams {
        SpaceParams::default()
    }

    #[test]
    fn zero_one_failure_radii() {
        let a = spec("a", &[("n>=0", "1"), ("n<=-1", "2^n")], false);
        let b = spec("b", &[("n>=0", "1/2")], true);
        let w = SequenceSpec::constant("w", 2.0);
        let rep = validate_config(&a, &b, &w, &params()).unwrap();
        assert!((rep.radii.r - 0.5).abs() < 1e-9);
        assert!((rep.radii.big_r - 1.0).abs() < 1e-9);
        // the plain windowed estimate is much cruder than the extrapolation
        assert!((rep.radii.r_window_max - 0.5).abs() < 1e-12);
        assert!((rep.radii.big_r_window_max - 1.5f64.powf(-1.0 / 48.0)).abs() < 1e-12);
        assert!(matches!(
            rep.growth,
            GrowthCondition::Degenerate { zero_b_at: -1 }
        ));
    }

    #[test]
    fn classical_shift_is_degenerate_but_valid() {
        let a = SequenceSpec::constant("a", 1.0);
        let b = spec("b", &[], true);
        let w = SequenceSpec::constant("w", 1.0);
        let rep = validate_config(&a, &b, &w, &params()).unwrap();
        assert!(rep.radii.degenerate);
        assert!(matches!(rep.growth, GrowthCondition::Degenerate { .. }));
    }

    #[test]
    fn zero_a_rejected() {
        let a = spec("a", &[("n==3", "0"), ("otherwise", "1")], false);
        let b = spec("b", &[], true);
        let w = SequenceSpec::constant("w", 1.0);
        assert_eq!(
            validate_config(&a, &b, &w, &params()).unwrap_err(),
            Error::ZeroA(3)
        );
    }

    #[test]
    fn collapse_detected() {
        // r = 2 > R = 1/2
        let a = spec("a", &[("n>=0", "2^n"), ("n<=-1", "2^(-n)")], false);
        let b = spec("b", &[], true);
        let w = SequenceSpec::constant("w", 1.0);
        assert!(matches!(
            validate_config(&a, &b, &w, &params()),
            Err(Error::RadiiCollapse { .. })
        ));
    }

    #[test]
    fn growth_partial_sups_full_affine() {
        let a = SequenceSpec::constant("a", 1.0);
        let b = SequenceSpec::constant("b", 0.5);
        let w = SequenceSpec::constant("w", 1.0);
        let p = SpaceParams {
            variant: BasisVariant::FullAffine,
            window: Window::new(-40, 40).unwrap(),
            ..params()
        };
        // r = R = 1 here: a degenerate annulus, still accepted
        let rep = validate_config(&a, &b, &w, &p).unwrap();
        match rep.growth {
            GrowthCondition::PartialSups {
                ln_running_sup,
                diverging,
            } => {
                assert_eq!(ln_running_sup.len(), 40);
                assert!((ln_running_sup[39] - 40.0 * 2f64.ln()).abs() < 1e-9);
                assert!(diverging);
            }
            other => panic!("{other:?}"),
        }
    }
}
