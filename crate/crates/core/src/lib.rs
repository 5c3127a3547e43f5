//! Bilateral weighted backward shifts on weighted ℓ^p and c0 spaces of
//! analytic functions on an annulus.
//!
//! A space is fixed by three real sequences `a`, `b`, `w` given as piecewise
//! closed-form expressions, a norm (ℓ^p or c0) and a basis variant. The
//! crate assembles truncated operator matrices, applies powers of the shift,
//! converts between the Schauder basis `f_n = (a_n + b_n z) z^n` and the
//! Laurent basis, and reports dynamical criteria as tri-state verdicts with
//! the numerical evidence behind them.

pub mod basis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod numeric;
pub mod orbit;
pub mod presets;
pub mod report;
pub mod seqexpr;
pub mod shiftmatrix;
pub mod verdict;

pub use basis::{
    coefficient_functional, coefficient_functional_bound, evaluate, laurent_from_schauder,
    monomial_expansion, monomial_norm, schauder_from_laurent, MonomialExpansion, MonomialNorm,
};
pub use config::{
    ExperimentConfig, MatrixRequest, OrbitRequest, ShiftConfig, VectorSpec, WeightedShift,
};
pub use dynamics::{
    analyze, check_boundedness, check_chaotic, check_dichotomy_preconditions,
    check_generic_criteria, check_hypercyclic, check_mixing, check_supercyclic, AnalysisParams,
    AnalysisReport, CriterionSeries, Thresholds,
};
pub use error::{Error, Result};
pub use numeric::{
    slog_product, vector_norm, BasisTag, BasisVariant, BilateralVector, NormKind, SignedLog,
    SpaceParams, Window,
};
pub use orbit::{
    check_divergent_subspace, detect_limit_point, simulate_orbit, DivergenceReport,
    LimitPointReport, OrbitRecord, OrbitRun, Schedule,
};
pub use seqexpr::{eval_sequence, parse_expression, validate_config, Expr, SequenceSpec};
pub use shiftmatrix::{
    apply, apply_iterated, assemble_matrix, c_coefficient, decompose, essential_spectrum_estimate,
    Decomposition, EssentialSpectrum, ShiftImage, TruncatedMatrix,
};
pub use verdict::{Evidence, Status, Verdict};
