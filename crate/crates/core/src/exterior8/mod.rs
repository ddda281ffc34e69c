//! Exterior algebra on ℝ⁸, the Cayley form and the Λ² = Λ²₇ ⊕ Λ²₂₁ splitting.
//!
//! Coordinates are indexed `0..8`; the first factor S (tangent to Q) is
//! `span(e₀..e₃)` and the second factor T (normal) is `span(e₄..e₇)`.

mod form;
mod gamma;
mod spin7;

pub use form::{hodge_star, pair_index, wedge, Exact, KForm8, Scalar, PAIRS};
pub use gamma::{complex_structure, gamma_matrix, gamma_project, hom_to_two_form, Mat4, QuaternionicPair};
pub use spin7::{
    g2_line_form, hodge_star7, hyperkahler_pair_form, phi0, standard_g2_form, standard_mus,
    standard_omegas, EigenSignature, Provenance, Proj7F64, Spin7Structure, TwoFormOperator,
};
