//! Exact calculus for Poisson vertex algebras on arc spaces with odd
//! (shifted-cotangent) variables.
//!
//! The crate is organized around a graded differential polynomial engine
//! ([`algebra`]) over exact rationals with declared parameter symbols
//! ([`param`]). On top of it sit the variational calculus ([`variational`]),
//! the λ-bracket machinery ([`lambda`]), the bracket on local functionals
//! ([`schouten`]), chart transitions and the ℂP¹ gluing classifier
//! ([`geometry`]), a finite-dimensional polyvector module with the
//! subregular sl₃ dataset ([`finite`]), and a floating-point verifier for
//! the R-deformed flow with its Lax pair and spectral curve ([`flows`]).
//! [`parse`] and [`printer`] provide the textual surface; [`report`] the
//! JSON report types; [`presets`] the built-in example contexts.

pub mod algebra;
pub mod context;
pub mod error;
pub mod finite;
pub mod flows;
pub mod geometry;
pub mod lambda;
pub mod linalg;
pub mod param;
pub mod parse;
pub mod presets;
pub mod printer;
pub mod report;
pub mod schouten;
pub mod variational;

pub use algebra::{DiffPoly, Generator, Parity, SubstMap};
pub use context::{Chart, ChartId, Context, Ctx};
pub use error::{Error, Result};
pub use finite::{FinitePoisson, PolyVector, RMatrix};
pub use lambda::{HamOperator, LambdaMuPoly, LambdaPoly};
pub use param::{ParamPoly, Rat};
pub use schouten::LocalFunctional;
pub use variational::Density;
