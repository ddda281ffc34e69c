//! Spin(7)-instanton gluing laboratory on the flat model ℝ⁴ × ℝ⁴.
//!
//! Modules are layered bottom-up: [`exterior8`] (Cayley form, Λ² splitting),
//! [`asd4`] (the charge-one instanton and its deformation complex), [`fueter`]
//! (quaternionic Dirac and component-wise instanton checks), [`norms`]
//! (weighted Hölder norms), [`glue`] (pregluing and its error), [`solve`]
//! (model operator and fixed-point solve) and [`chern`] (index formulas).
//! [`cli`] wires the verification suites into machine-readable reports.

pub mod asd4;
pub mod chern;
pub mod cli;
pub mod error;
pub mod exterior8;
pub mod fueter;
pub mod glue;
pub mod norms;
pub mod product;
pub mod numerics;
pub mod quat;
pub mod solve;

pub use error::{Error, Result};
pub use quat::Quat;
