//! Theta partial sums `F_{s,n}(x,t)`, the companion function `Omega_s(x,t)`
//! of their approximate modular equation, and the continued-fraction
//! dynamics (regular, even, and the T/G/U maps) that drive its iteration.

pub mod cf;
pub mod diagnostics;
pub mod error;
pub mod expansion;
pub mod figures;
pub mod omega;
pub mod precision;
pub mod quad;
pub mod theta;

pub use error::{Error, ErrorKind, Result};
