//! Numerical laboratory for degree-one Dirichlet series with a functional
//! equation of gamma type.
//!
//! Given the functional-equation data (Q, λⱼ, μⱼ, ω) and coefficients a(n),
//! the pipeline fits the gamma-ratio constants A, B, C, evaluates the
//! oscillatory transform F(α, T) by quadrature and by exponential sums,
//! locates its support on rationals k/q, reads off the periodic
//! coefficients and matches them to a shifted Dirichlet L-function
//! L(s + iA, χ′).
//!
//! Every numeric routine is generic over [`scalar::Real`]; the `*64`
//! aliases below fix the scalar to `f64`.
//!
//! ```
//! use selberg_core::characters::{build_l_element, enumerate_characters};
//! use selberg_core::identifier::{identify, Verdict};
//!
//! let chi = enumerate_characters(4).unwrap().remove(1);
//! let el = build_l_element::<f64>(&chi, 0.0).unwrap();
//! let id = identify(&el).unwrap();
//! assert_eq!(id.verdict, Verdict::Identified);
//! assert_eq!(id.q_prime, Some(4));
//! ```

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod characters;
pub mod complexfn;
pub mod detector;
pub mod error;
pub mod identifier;
pub mod oscillatory;
pub mod scalar;
pub mod selberg;
pub mod smoothing;
pub mod transform;

pub use num_complex::Complex64;

pub use crate::asymptotics::StirlingConstants;
pub use crate::characters::{build_l_element, DirichletCharacter};
pub use crate::detector::{DetectionReport, DetectorConfig};
pub use crate::error::{Error, Result};
pub use crate::identifier::{identify, Identification, Verdict};
pub use crate::selberg::{CoefficientSource, FunctionalEquation, GammaFactorTerm, SelbergElement};

pub type FunctionalEquation64 = FunctionalEquation<f64>;
pub type GammaFactorTerm64 = GammaFactorTerm<f64>;
pub type CoefficientSource64 = CoefficientSource<f64>;
pub type SelbergElement64 = SelbergElement<f64>;
pub type StirlingConstants64 = StirlingConstants<f64>;
pub type DetectionReport64 = DetectionReport<f64>;
pub type Identification64 = Identification<f64>;
