//! Piecewise closed-form sequences over the integers.

mod expr;
mod sequence;
mod validate;

pub use expr::{parse_expression, BinOp, Expr, Func, ParseError};
pub use sequence::{eval_sequence, Piece, PieceCondition, SequenceSpec};
pub use validate::{validate_config, GrowthCondition, RadiiEstimate, ValidationReport};
