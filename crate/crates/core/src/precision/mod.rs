//! Scalar arithmetic shared by the rest of the crate.

mod bigfloat;
mod phase;
mod real;
mod sum;
mod surd;

pub use bigfloat::{BigFloat, DEFAULT_PREC, MIN_PREC};
pub use num_rational::BigRational as Rational;
pub use phase::{cis_turns, phase_mod2, sincos_turns, Cplx, EighthRoot, ShiftedPhase, ThetaPhase};
pub use real::{parse_real, RealInput};
pub use sum::{chunked_sum, chunked_sum_sequential, comp_sum, ordered_map, CompSum, CHUNK};
pub use surd::{is_square_free, QuadSurd};
