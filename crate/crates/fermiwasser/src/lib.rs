//! Quadratic optimal transport between ℤ₂-graded quantum systems at desk
//! scale: standard forms of matrix algebras with modular data and gradings,
//! twisted/KMS duals of channels, the fermionic↔usual transport-plan
//! bijection, Wasserstein-type distances by semidefinite programming,
//! detailed-balance checks with deviation bounds, and a CAR/Jordan–Wigner
//! lattice model.

pub mod car;
pub mod channel;
pub mod detailed_balance;
pub mod error;
pub mod examples;
pub mod gns;
pub mod mat;
pub mod plan;
pub mod rng;
pub mod sdp;
pub mod standard_form;
pub mod system;
pub mod wasserstein;

pub use error::{Error, Result};
