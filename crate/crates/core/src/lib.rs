//! Sharp constants for the periodic embedding `H^r(-T, T) -> L_q(-T, T)`,
//! the positive periodic solutions of `-y'' + y = y^(q-1)`, and grid-based
//! certificates for the inequalities behind the monotonicity of the period
//! integral.
//!
//! Modules, bottom-up:
//!
//! - [`phase_plane`]: closed-form oval quantities.
//! - [`quadrature`]: the period integral, its derivative and limit.
//! - [`solutions`]: period equation, solution counts, profile reconstruction.
//! - [`embedding`]: norms, the functional `J`, the second variation and the
//!   sharp-constant decision.
//! - [`certify`]: numerical certificates with margins.

pub mod certify;
pub mod embedding;
pub mod error;
pub mod par;
pub mod phase_plane;
pub mod quadrature;
pub mod roots;
pub mod solutions;
mod spectral;

pub use error::{Error, Result};
pub use par::Exec;
