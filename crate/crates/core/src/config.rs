//! Shift configurations: the sequences `a`, `b`, `w` together with the
//! space parameters, and the JSON experiment schema built on top of them.

use serde::Deserialize;

use crate::dynamics::AnalysisParams;
use crate::error::{Error, Result};
use crate::numeric::{BasisTag, BasisVariant, BilateralVector, NormKind, SpaceParams, Window};
use crate::orbit::Schedule;
use crate::seqexpr::{validate_config, Piece, SequenceSpec, ValidationReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftConfig {
    pub params: SpaceParams,
    pub a: SequenceSpec,
    pub b: SequenceSpec,
    pub w: SequenceSpec,
}

/// A validated configuration with its sequences sampled around the window.
///
/// Values of `b` are zero for `n <= -1` in the split variant regardless of
/// what the `b` spec says there.
#[derive(Debug, Clone)]
pub struct WeightedShift {
    config: ShiftConfig,
    report: ValidationReport,
    lo: i64,
    a: Vec<f64>,
    b: Vec<f64>,
    w: Vec<f64>,
}

const SAMPLE_PAD: i64 = 128;

impl WeightedShift {
    pub fn new(config: ShiftConfig) -> Result<Self> {
        let report = validate_config(&config.a, &config.b, &config.w, &config.params)?;
        let window = config.params.window;
        let pad = window.len() as i64 + SAMPLE_PAD;
        let lo = window.min() - pad;
        let hi = window.max() + pad;
        let sample = |spec: &SequenceSpec| -> Vec<f64> {
            (lo..=hi)
                .map(|n| spec.eval(n).unwrap_or(f64::NAN))
                .collect()
        };
        let split = config.params.variant == BasisVariant::SplitAffine;
        let mut b = sample(&config.b);
        if split {
            for (i, n) in (lo..=hi).enumerate() {
                if n <= -1 {
                    b[i] = 0.0;
                }
            }
        }
        Ok(WeightedShift {
            a: sample(&config.a),
            w: sample(&config.w),
            b,
            lo,
            report,
            config,
        })
    }

    pub fn config(&self) -> &ShiftConfig {
        &self.config
    }

    pub fn params(&self) -> &SpaceParams {
        &self.config.params
    }

    pub fn window(&self) -> Window {
        self.config.params.window
    }

    pub fn norm(&self) -> NormKind {
        self.config.params.norm
    }

    pub fn variant(&self) -> BasisVariant {
        self.config.params.variant
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.report
    }

    /// Estimated `(r, R)`.
    pub fn radii(&self) -> (f64, f64) {
        (self.report.radii.r, self.report.radii.big_r)
    }

    fn lookup(&self, table: &[f64], n: i64) -> Option<f64> {
        let i = n - self.lo;
        (i >= 0 && (i as usize) < table.len()).then(|| table[i as usize])
    }

    pub fn try_a(&self, n: i64) -> Result<f64> {
        match self.lookup(&self.a, n) {
            Some(x) if !x.is_nan() => Ok(x),
            _ => self.config.a.eval(n),
        }
    }

    pub fn try_b(&self, n: i64) -> Result<f64> {
        if self.variant() == BasisVariant::SplitAffine && n <= -1 {
            return Ok(0.0);
        }
        match self.lookup(&self.b, n) {
            Some(x) if !x.is_nan() => Ok(x),
            _ => self.config.b.eval(n),
        }
    }

    pub fn try_w(&self, n: i64) -> Result<f64> {
        match self.lookup(&self.w, n) {
            Some(x) if !x.is_nan() => Ok(x),
            _ => self.config.w.eval(n),
        }
    }

    /// `a_n`, or NaN where the sequence cannot be evaluated.
    pub fn a(&self, n: i64) -> f64 {
        self.try_a(n).unwrap_or(f64::NAN)
    }

    /// Effective `b_n`, or NaN where the sequence cannot be evaluated.
    pub fn b(&self, n: i64) -> f64 {
        self.try_b(n).unwrap_or(f64::NAN)
    }

    /// `w_n`, or NaN where the sequence cannot be evaluated.
    pub fn w(&self, n: i64) -> f64 {
        self.try_w(n).unwrap_or(f64::NAN)
    }
}

/// Coefficients of a vector given as `(index, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSpec {
    pub basis: BasisTag,
    pub entries: Vec<(i64, f64)>,
}

impl VectorSpec {
    pub fn to_vector(&self, window: Window) -> Result<BilateralVector> {
        BilateralVector::from_entries(window, self.entries.iter().copied(), self.basis)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawVector =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.build()
    }

    pub fn list_from_json(text: &str) -> Result<Vec<Self>> {
        let raw: Vec<RawVector> =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.into_iter().map(RawVector::build).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OrbitRequest {
    pub vector: Option<VectorSpec>,
    pub steps: Option<u64>,
    pub schedule: Option<Schedule>,
    pub candidates: Vec<VectorSpec>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MatrixRequest {
    pub power: Option<i64>,
    pub i_max: Option<usize>,
}

/// Everything a config file can hold.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub shift: ShiftConfig,
    pub analysis: AnalysisParams,
    pub orbit: Option<OrbitRequest>,
    pub matrix: Option<MatrixRequest>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawExperiment =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.build()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawExponent {
    Number(f64),
    Name(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    #[serde(rename = "where")]
    condition: String,
    expr: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSequence {
    Pieces(Vec<RawPiece>),
    Flagged {
        #[serde(default)]
        default_zero: bool,
        pieces: Vec<RawPiece>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    min: i64,
    max: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    horizon: Option<usize>,
    n_max: Option<i64>,
    diverge_threshold: Option<f64>,
    full_limit_threshold: Option<f64>,
    growth_rate_threshold: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVector {
    #[serde(default)]
    basis: Option<String>,
    entries: Vec<(i64, f64)>,
}

impl RawVector {
    fn build(self) -> Result<VectorSpec> {
        let basis = match self.basis.as_deref() {
            None | Some("schauder") => BasisTag::Schauder,
            Some("laurent") => BasisTag::Laurent,
            Some(other) => return Err(Error::Config(format!("unknown vector basis `{other}`"))),
        };
        Ok(VectorSpec {
            basis,
            entries: self.entries,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrbit {
    vector: Option<RawVector>,
    steps: Option<u64>,
    schedule: Option<String>,
    #[serde(default)]
    candidates: Vec<RawVector>,
    tolerance: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    power: Option<i64>,
    i_max: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    p: RawExponent,
    basis_variant: Option<String>,
    a: Vec<RawPiece>,
    b: Option<RawSequence>,
    w: Vec<RawPiece>,
    window: Option<RawWindow>,
    analysis: Option<RawAnalysis>,
    orbit: Option<RawOrbit>,
    matrix: Option<RawMatrix>,
}

fn build_sequence(name: &str, pieces: Vec<RawPiece>, default_zero: bool) -> Result<SequenceSpec> {
    let pieces = pieces
        .into_iter()
        .map(|p| {
            Ok(Piece {
                condition: p.condition.parse()?,
                expr: crate::seqexpr::parse_expression(&p.expr)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SequenceSpec::new(name, pieces, default_zero)
}

impl RawExperiment {
    fn build(self) -> Result<ExperimentConfig> {
        let norm = match self.p {
            RawExponent::Number(p) => NormKind::lp(p)?,
            RawExponent::Name(s) if s == "c0" => NormKind::C0,
            RawExponent::Name(s) => {
                return Err(Error::Config(format!(
                    "p must be a number or \"c0\", got `{s}`"
                )))
            }
        };
        let variant = match self.basis_variant.as_deref() {
            None | Some("split_affine") => BasisVariant::SplitAffine,
            Some("full_affine") => BasisVariant::FullAffine,
            Some(other) => return Err(Error::Config(format!("unknown basis_variant `{other}`"))),
        };
        let window = match self.window {
            Some(w) => Window::new(w.min, w.max)?,
            None => Window::default(),
        };
        let a = build_sequence("a", self.a, false)?;
        let b = match self.b {
            None => SequenceSpec::new("b", Vec::new(), true)?,
            Some(RawSequence::Pieces(p)) => build_sequence("b", p, false)?,
            Some(RawSequence::Flagged {
                default_zero,
                pieces,
            }) => build_sequence("b", pieces, default_zero)?,
        };
        let w = build_sequence("w", self.w, false)?;

        let mut analysis = AnalysisParams::default();
        if let Some(raw) = self.analysis {
            if let Some(h) = raw.horizon {
                analysis.horizon = h;
            }
            if let Some(n) = raw.n_max {
                analysis.n_max = n;
            }
            if let Some(t) = raw.diverge_threshold {
                analysis.thresholds.diverge = t;
            }
            if let Some(t) = raw.full_limit_threshold {
                analysis.thresholds.full_limit = t;
            }
            if let Some(t) = raw.growth_rate_threshold {
                analysis.thresholds.growth_rate = t;
            }
        }

        let orbit = self
            .orbit
            .map(|o| -> Result<OrbitRequest> {
                Ok(OrbitRequest {
                    vector: o.vector.map(RawVector::build).transpose()?,
                    steps: o.steps,
                    schedule: o.schedule.as_deref().map(str::parse).transpose()?,
                    candidates: o
                        .candidates
                        .into_iter()
                        .map(RawVector::build)
                        .collect::<Result<_>>()?,
                    tolerance: o.tolerance,
                })
            })
            .transpose()?;
        let matrix = self.matrix.map(|m| MatrixRequest {
            power: m.power,
            i_max: m.i_max,
        });

        Ok(ExperimentConfig {
            shift: ShiftConfig {
                params: SpaceParams {
                    norm,
                    variant,
                    window,
                },
                a,
                b,
                w,
            },
            analysis,
            orbit,
            matrix,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "p": 2,
        "a": [{"where": "otherwise", "expr": "1"}],
        "w": [{"where": "otherwise", "expr": "2"}]
    }"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.shift.params.window, Window::default());
        assert_eq!(cfg.shift.params.variant, BasisVariant::SplitAffine);
        assert_eq!(cfg.shift.b.eval(3).unwrap(), 0.0);
        assert_eq!(cfg.analysis, AnalysisParams::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("\"p\": 2", "\"p\": 2, \"q\": 2");
        assert!(matches!(
            ExperimentConfig::from_json(&text),
            Err(Error::Config(_))
        ));
        let text = MINIMAL.replace("\"expr\": \"2\"", "\"expr\": \"2\", \"when\": 1");
        assert!(ExperimentConfig::from_json(&text).is_err());
    }

    #[test]
    fn exponent_forms() {
        let c0 = MINIMAL.replace("\"p\": 2", "\"p\": \"c0\"");
        assert_eq!(
            ExperimentConfig::from_json(&c0).unwrap().shift.params.norm,
            NormKind::C0
        );
        for bad in ["\"p\": 0.5", "\"p\": \"l2\""] {
            let text = MINIMAL.replace("\"p\": 2", bad);
            assert!(ExperimentConfig::from_json(&text).is_err(), "{bad}");
        }
    }

    #[test]
    fn split_variant_ignores_negative_b() {
        let text = MINIMAL.replace(
            "\"w\"",
            "\"b\": [{\"where\": \"otherwise\", \"expr\": \"0.25\"}], \"w\"",
        );
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        let op = WeightedShift::new(cfg.shift).unwrap();
        assert_eq!(op.b(-3), 0.0);
        assert_eq!(op.b(3), 0.25);
        assert_eq!(op.b(10_000), 0.25);
    }
}
