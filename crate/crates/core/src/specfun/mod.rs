//! Complex special functions and arithmetic functions.

pub mod arith;
pub mod dirichlet;
pub mod gamma;
pub mod hurwitz;
pub mod zeta;

pub use arith::{chebyshev_psi, mangoldt, moebius, primes_up_to};
pub use dirichlet::{dirichlet_l, DirichletCharacter};
pub use gamma::{digamma, gamma, gamma_ln};
pub use hurwitz::hurwitz_zeta;
pub use zeta::{chi_plus, chi_plus_log_derivative, eta, zeta};
