//! Exact computations with loops, loop words, brackets and truncated
//! nonassociative power series.

pub mod context;
pub mod brackets;
pub mod bridge;
pub mod error;
pub mod finite_loop;
pub mod graded;
pub mod identities;
pub mod rational;
pub mod series;
pub mod terms;

pub use context::{LoopAlgebra, LoopContext};
pub use error::{Error, Result};
pub use finite_loop::{CayleyLoop, Subloop};
pub use rational::Rational;
pub use series::{Monomial, Series, SeriesContext, Valuation};
pub use terms::{degree, eval_term, format_term, parse_term, GeneratorId, LoopTerm, MultiDegree};
