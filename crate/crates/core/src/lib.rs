//! Feedback synthesis and Lyapunov verification for two-degree-of-freedom
//! mechanical systems with one actuated cyclic coordinate.
//!
//! The pipeline: build a [`system::MechanicalSystem`] and a quadratic control,
//! take the normal form, classify it ([`geometry`]), decide whether it is
//! variational and build a multiplier and energy ([`variational`]),
//! synthesize or check controls ([`synth`]) and simulate ([`sim`]).

pub mod cli;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod quadrature;
pub mod roots;
pub mod sim;
pub mod synth;
pub mod system;
pub mod table;
pub mod variational;

pub use error::{Error, EvalError, Result};
pub use expr::{parse, parse_with, Expr, Jet2};
