//! Ready-made example systems: small graded algebras with reference states
//! and invariant dynamics, used by the test suites and the command-line
//! demos.

use crate::channel::Channel;
use crate::error::Result;
use crate::mat::{conj, cr, kron, powm_it, CMat, CVec};
use crate::rng::{random_diagonal_faithful_state, rng_from_seed};
use crate::standard_form::StandardForm;
use crate::system::{GradedSystem, NamedMap};

/// Pauli `σ_x`.
pub fn sigma_x() -> CMat {
    let mut m = CMat::zeros(2, 2);
    m[(0, 1)] = cr(1.0);
    m[(1, 0)] = cr(1.0);
    m
}

/// Pauli `σ_z` (the standard qubit grading unitary).
pub fn sigma_z() -> CMat {
    CMat::from_diagonal(&CVec::from_vec(vec![cr(1.0), cr(-1.0)]))
}

/// Modular flow at a fixed time as a channel: `a ↦ ρ^{it} a ρ^{−it}`.
///
/// For any faithful even `ρ` this is an even unital `ρ`-preserving
/// *-automorphism, so it is admissible dynamics on any system with state `ρ`.
pub fn modular_dynamics_map(rho: &CMat, t: f64) -> Result<Channel> {
    let u = powm_it(rho, t)?;
    let sup = kron(&u, &conj(&u));
    Channel::from_superop(sup, rho.nrows(), rho.nrows())
}

/// Even `ρ`-invariant qubit channel for diagonal `ρ` and `σ_z` grading:
/// generalized amplitude damping with fixed point `diag(ρ₀₀, ρ₁₁)` and
/// damping strength `lam ∈ (0,1)`. All Kraus operators are homogeneous for
/// `σ_z`, so the map is even.
pub fn qubit_damping_dynamics(rho: &CMat, lam: f64) -> Channel {
    let p = rho[(0, 0)].re;
    let s = lam;
    let mut k0 = CMat::zeros(2, 2);
    k0[(0, 0)] = cr(1.0);
    k0[(1, 1)] = cr((1.0 - s).sqrt());
    let mut k1 = CMat::zeros(2, 2);
    k1[(0, 1)] = cr(s.sqrt());
    let mut k2 = CMat::zeros(2, 2);
    k2[(0, 0)] = cr((1.0 - s).sqrt());
    k2[(1, 1)] = cr(1.0);
    let mut k3 = CMat::zeros(2, 2);
    k3[(1, 0)] = cr(s.sqrt());
    // Schrödinger map: ρ ↦ q·(K0ρK0† + K1ρK1†) + (1−q)·(K2ρK2† + K3ρK3†)
    // has fixed point diag(q, 1−q); the Heisenberg picture is its adjoint.
    let q = p;
    let weighted: Vec<CMat> = vec![
        k0.scale(q.sqrt()),
        k1.scale(q.sqrt()),
        k2.scale((1.0 - q).sqrt()),
        k3.scale((1.0 - q).sqrt()),
    ];
    let mut schro = CMat::zeros(4, 4);
    for k in &weighted {
        schro += kron(k, &conj(k));
    }
    Channel::from_superop(schro.adjoint(), 2, 2).expect("qubit superoperator")
}

/// Seeded qubit system: `M₂` with `σ_z` grading, a random faithful diagonal
/// (hence even) state, damping dynamics named `"alpha"`, and the coordinate
/// `σ_x`.
pub fn qubit_system(seed: u64) -> GradedSystem {
    let mut rng = rng_from_seed(seed);
    let form = StandardForm::new(2, sigma_z()).expect("qubit grading");
    let rho = random_diagonal_faithful_state(&mut rng, 2, 0.1);
    let alpha = qubit_damping_dynamics(&rho, 0.35);
    GradedSystem::new(form, rho, vec![NamedMap::new("alpha", alpha)], vec![sigma_x()])
        .expect("qubit system")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::dist;

    #[test]
    fn modular_dynamics_is_admissible() {
        let sys = qubit_system(7);
        let sigma = modular_dynamics_map(&sys.rho, 0.7).unwrap();
        let augmented = GradedSystem::new(
            sys.form.clone(),
            sys.rho.clone(),
            vec![NamedMap::new("sigma", sigma)],
            sys.coords.clone(),
        );
        assert!(augmented.is_ok());
    }

    #[test]
    fn modular_dynamics_group_law() {
        let sys = qubit_system(8);
        let a = modular_dynamics_map(&sys.rho, 0.3).unwrap();
        let b = modular_dynamics_map(&sys.rho, 0.5).unwrap();
        let ab = a.compose(&b).unwrap();
        let c = modular_dynamics_map(&sys.rho, 0.8).unwrap();
        assert!(dist(&ab.sup, &c.sup) <= 1e-10);
    }
}
