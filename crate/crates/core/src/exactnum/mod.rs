//! Exact arithmetic substrate.

mod poly;
mod quad;
mod rational;
mod roots;

pub use poly::PolyP;
pub use quad::{quad_sign, QuadValue};
pub use rational::{format_rational, int, parse_rational, rat, rational_sign, Rational};
pub use roots::{isolate_real_roots, sturm_chain, sturm_root_count, RootInterval};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("value needs more than two square-free radicands")]
    RadicandOverflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand {0} is not a positive square-free integer")]
    BadRadicand(u64),
    #[error("malformed rational {0:?} (expected \"a\" or \"a/b\")")]
    ParseRational(String),
}
