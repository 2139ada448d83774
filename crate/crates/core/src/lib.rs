//! Kernel and extraction engine for a combinatory calculus with star
//! (finite nonempty set) types: typed terms, a strongly normalizing
//! rewriter, bracket abstraction, a formula language with a witness-set
//! translation, a Hilbert-style proof checker with realizer extraction,
//! and an evaluator for the decidable arithmetic fragment.

pub mod abstraction;
pub mod hr;
pub mod kernel;
pub mod logic;
pub mod proof;
pub mod rewrite;
pub mod syntax;
pub mod verify;

pub use kernel::{Const, Context, Mode, Signature, Term, Type, Var};
pub use logic::Formula;
pub use rewrite::{Budget, WitnessSet};
