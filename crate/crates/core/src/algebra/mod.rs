//! Exact coefficient arithmetic and the bigraded exterior algebra.

pub mod basis;
pub mod form;
pub mod scalar;
pub mod trig;

pub use basis::BasisIndex;
pub use form::{form_conj, inner, l2_inner, wedge, Form};
pub use scalar::{fmt_rational, parse_rational, Scalar};
pub use trig::{tp_integrate, tp_mul, ModeIndex, TrigPoly};
