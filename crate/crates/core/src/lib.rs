//! Invariant instantons on the Stenzel Calabi-Yau metric on `T*S^4`.
//!
//! The crate covers the left-invariant coframe algebra of `SO(5)`, the
//! Stenzel geometry on the principal orbits, curvature and instanton
//! residuals for the invariant connection families, the singular initial
//! value problem for the Spin(7) ODE system, and the resulting moduli
//! description with certified blowup and global-existence bounds.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod coframe;
pub mod connections;
pub mod error;
pub mod geometry;
pub mod ivp;
pub mod jet;
pub mod moduli;
mod sweep;

pub use error::{Error, Result};
pub use jet::Jet;
pub use sweep::Execution;
