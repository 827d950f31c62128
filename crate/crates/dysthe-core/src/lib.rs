//! Numerical verification toolkit for the periodic Dysthe equation.
//!
//! The crate models fields on the torus by their Fourier coefficients and
//! verifies, at desk scale, the estimates that control the equation's
//! low-regularity theory: the exact space-time L^6 identity, Strichartz-type
//! ratios, the dyadic bilinear bound, bilinear and trilinear product
//! estimates in Bourgain spaces, resonance-count growth, the ill-posedness
//! mechanism of the third Picard iterate, and a viscously regularized solver
//! with its energy functional.
//!
//! Conventions fixed project-wide:
//! * `u(x) = sum_n uhat(n) e^{inx}` with no `1/2pi` in synthesis;
//! * the torus `[0,2pi]_x x [0,2pi]_t` carries plain Lebesgue measure
//!   (total mass `4 pi^2`);
//! * temporal frequencies are integers;
//! * the dispersion polynomial is `P(n) = n^3 - 2n^2 + 8n`.

pub mod dispersion;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod norms;
pub mod random;
pub mod resonance;
pub mod spacetime;
pub mod verify;
pub mod window;

pub use dispersion::{dispersion, resonance_identity};
pub use error::{CoreError, Result};
pub use field::{Multiplier, SpectralField};
pub use spacetime::{japanese_bracket, modulation_weight, SpaceTimeField};
