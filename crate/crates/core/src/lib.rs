//! Potential theory for the operator L_rho = Laplacian + 2 rho d/dx + rho^2 on the torus
//! (0,P) x (-pi,pi): spectra of the associated quadratic pencil, growth of Martin functions
//! of dilation-invariant plane domains, fundamental solutions, and the calculus of
//! L_rho-subfunctions.

pub mod acceptance;
pub mod domain;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod fundsol;
pub mod grid;
pub mod martin;
pub mod pencil;
pub mod shape;
pub mod sparse;
pub mod subfunction;
pub mod subminorant;
pub mod window;

pub use error::{Error, Result};
