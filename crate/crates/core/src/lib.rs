//! Stirling's iterative root-finding method, `z - f(z) / f'(z - f(z))`, built
//! symbolically as a rational map on the Riemann sphere.
//!
//! The crate constructs the iteration map for polynomials, rational functions,
//! Möbius maps and unicritical quadratics ([`iterators`]), classifies its fixed
//! and critical points ([`classification`]), follows orbits and classifies whole
//! grids of starting points ([`dynamics`]), writes basin images ([`render`]) and
//! checks the known dynamical facts about the method numerically ([`verify`]).
//!
//! ```
//! use stirling::{iterators, polynomial::Poly, rational::SpherePoint};
//! use num_complex::Complex64;
//!
//! // z^2 - 4 has superattracting fixed points at +-2.
//! let p = Poly::from_real(&[-4.0, 0.0, 1.0]);
//! let st = iterators::build_stirling_polynomial(&p).unwrap();
//! let two = SpherePoint::Finite(Complex64::new(2.0, 0.0));
//! assert!(st.eval_sphere(two).unwrap().distance(&two) < 1e-12);
//! ```

pub mod classification;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod iterators;
pub mod polynomial;
pub mod rational;
pub mod render;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
