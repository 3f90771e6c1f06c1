//! Exact arithmetic over `Z[1/N][x_1..x_t]` and determinant-one matrices over it.

mod matrix;
mod parse;
mod poly;
mod scalar;
mod spec;

pub use matrix::{append_reduced, free_reduce, GroupElement, Letter, Mat};
pub use parse::{parse_poly, PolyExpr};
pub use poly::{Monomial, RingCtx, RingElement};
pub use scalar::{log2_big, NLocInt};
pub use spec::{Generator, GroupSpec};

pub(crate) use spec::power_token;
