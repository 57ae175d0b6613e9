//! Rational map expressions: parsing, normal form, evaluation, critical points.

pub mod parser;
pub mod poly;
pub mod rational;
pub mod roots;

pub use parser::{parse_expr, Expr};
pub use poly::Poly;
pub use rational::{parse_dynamical_map, parse_map, CriticalPoint, RationalMap};
