//! Graded quantum systems: an algebra in standard form, a faithful even
//! state, a named family of state-preserving even dynamics maps, and a tuple
//! of coordinate observables — together with the system-level transforms
//! (grading-augmented, KMS-dual, twisted-dual).

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::mat::{conj, dist, identity, kron, logm_pd, trace, C, CMat};
use crate::standard_form::StandardForm;

/// Dynamics-name under which the grading automorphism is adjoined by
/// [`GradedSystem::with_grading_as_dynamics`].
pub const GRADING_DYNAMICS_NAME: &str = "grading";

/// Dynamics-name reserved for a reversing operation adjoined alongside a
/// copying map.
pub const THETA_DYNAMICS_NAME: &str = "theta";

/// A named dynamics map. Most maps are channels (CP); order-reversing maps
/// (unital positive with `E(ab) = E(b)E(a)`) carry the flag so downstream
/// code never assumes complete positivity for them.
#[derive(Clone, Debug)]
pub struct NamedMap {
    pub name: String,
    pub map: Channel,
    pub antimultiplicative: bool,
}

impl NamedMap {
    pub fn new(name: impl Into<String>, map: Channel) -> Self {
        Self {
            name: name.into(),
            map,
            antimultiplicative: false,
        }
    }

    pub fn reversing(name: impl Into<String>, map: Channel) -> Self {
        Self {
            name: name.into(),
            map,
            antimultiplicative: true,
        }
    }
}

/// A graded system: `(algebra+grading, dynamics, state, coordinates)`.
#[derive(Clone, Debug)]
pub struct GradedSystem {
    pub form: StandardForm,
    /// Faithful even density matrix of the reference state.
    pub rho: CMat,
    /// Named unital positive even state-preserving maps; two systems are
    /// comparable when their name lists coincide.
    pub dynamics: Vec<NamedMap>,
    /// Coordinate observables (arbitrary elements of the algebra).
    pub coords: Vec<CMat>,
    /// Optional copying map onto the twisted commutant; attached through
    /// [`GradedSystem::with_copying_map`], which also adjoins the induced
    /// reversing operation to the dynamics.
    pub copying: Option<crate::detailed_balance::CopyingMap>,
}

impl GradedSystem {
    pub fn new(
        form: StandardForm,
        rho: CMat,
        dynamics: Vec<NamedMap>,
        coords: Vec<CMat>,
    ) -> Result<Self> {
        let sys = Self {
            form,
            rho,
            dynamics,
            coords,
            copying: None,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn n(&self) -> usize {
        self.form.n
    }

    /// Number of coordinates `d`.
    pub fn coord_count(&self) -> usize {
        self.coords.len()
    }

    pub fn dynamics_names(&self) -> Vec<&str> {
        self.dynamics.iter().map(|m| m.name.as_str()).collect()
    }

    pub fn expect(&self, a: &CMat) -> C {
        trace(&(&self.rho * a))
    }

    /// All coordinates self-adjoint?
    pub fn is_hermitian_system(&self) -> bool {
        self.coords
            .iter()
            .all(|k| (k - k.adjoint()).norm() <= 1e-10 * (1.0 + k.norm()))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        self.form.check_state(&self.rho)?;
        for k in &self.coords {
            if k.shape() != (n, n) {
                return Err(Error::Dimension(
                    "coordinate has wrong dimensions".into(),
                ));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for nm in &self.dynamics {
            if !seen.insert(nm.name.clone()) {
                return Err(Error::Config(format!(
                    "duplicate dynamics name '{}'",
                    nm.name
                )));
            }
            if nm.map.n_in != n || nm.map.n_out != n {
                return Err(Error::Dimension(format!(
                    "dynamics '{}' has wrong dimensions",
                    nm.name
                )));
            }
            let herm = nm.map.herm_preserving_residual();
            if herm > 1e-9 {
                return Err(Error::NotHermitian { deviation: herm });
            }
            let uni = nm.map.unital_residual();
            if uni > 1e-9 {
                return Err(Error::NotUnital { residual: uni });
            }
            let even = nm.map.even_residual(&self.form.u, &self.form.u);
            if even > 1e-9 {
                return Err(Error::NotEven { residual: even });
            }
            let inv_res = dist(&nm.map.pull_state(&self.rho), &self.rho);
            if inv_res > 1e-9 {
                return Err(Error::NotInvariant {
                    name: nm.name.clone(),
                    residual: inv_res,
                });
            }
        }
        Ok(())
    }

    /// Shared-name precondition against a partner system.
    pub fn same_index_names(&self, other: &GradedSystem) -> bool {
        self.dynamics.len() == other.dynamics.len()
            && self
                .dynamics
                .iter()
                .zip(&other.dynamics)
                .all(|(a, b)| a.name == b.name)
            && self.coord_count() == other.coord_count()
    }

    /// Superoperator of the modular commutator `a ↦ [log ρ, a]`; a plan's
    /// channel intertwines the modular groups iff it intertwines these
    /// generators.
    pub fn modular_generator_sup(&self) -> Result<CMat> {
        Self::modular_generator_of(&self.rho)
    }

    /// Same as [`GradedSystem::modular_generator_sup`] for a bare density.
    pub fn modular_generator_of(rho: &CMat) -> Result<CMat> {
        let l = logm_pd(rho)?;
        let n = rho.nrows();
        Ok(kron(&l, &identity(n)) - kron(&identity(n), &l.transpose()))
    }

    /// Adjoin the grading automorphism `γ(a) = u a u` to the dynamics under
    /// [`GRADING_DYNAMICS_NAME`]; idempotent.
    pub fn with_grading_as_dynamics(&self) -> GradedSystem {
        if self
            .dynamics
            .iter()
            .any(|m| m.name == GRADING_DYNAMICS_NAME)
        {
            return self.clone();
        }
        let mut out = self.clone();
        out.dynamics.push(NamedMap::new(
            GRADING_DYNAMICS_NAME,
            Channel::from_conjugation(&self.form.u),
        ));
        out
    }

    /// KMS-dual system: every dynamics map replaced by its KMS dual with
    /// respect to the reference state; algebra, state, grading and
    /// coordinates unchanged. An attached copying map is not carried over.
    pub fn kms_dual_system(&self) -> Result<GradedSystem> {
        let mut dynamics = Vec::with_capacity(self.dynamics.len());
        for nm in &self.dynamics {
            dynamics.push(NamedMap {
                name: nm.name.clone(),
                map: nm.map.kms_dual(&self.rho, &self.rho)?,
                antimultiplicative: nm.antimultiplicative,
            });
        }
        GradedSystem::new(
            self.form.clone(),
            self.rho.clone(),
            dynamics,
            self.coords.clone(),
        )
    }

    /// Twisted-dual system, realized in twisted-commutant carrier
    /// coordinates: grading unitary `conj(u)`, state density `conj(ρ)`,
    /// dynamics replaced by their dual carrier maps, coordinates by
    /// `conj(k_i)` (the carrier of `γ^{1/2}(j(k_i*))`).
    ///
    /// Applying this twice returns the original system exactly; the
    /// element-level double twist instead lands on coordinates `γ(k_i)`, and
    /// the two presentations differ by the grading automorphism, which is an
    /// isomorphism of systems. An attached copying map is not carried over.
    pub fn twisted_dual_system(&self) -> Result<GradedSystem> {
        let form = StandardForm::new(self.n(), conj(&self.form.u))?;
        let rho = conj(&self.rho);
        let mut dynamics = Vec::with_capacity(self.dynamics.len());
        for nm in &self.dynamics {
            dynamics.push(NamedMap {
                name: nm.name.clone(),
                map: nm.map.dual_carrier(&self.rho, &self.rho)?,
                antimultiplicative: nm.antimultiplicative,
            });
        }
        let coords = self.coords.iter().map(conj).collect();
        GradedSystem::new(form, rho, dynamics, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{ci, powm_it, vec_mat, CVec};
    use crate::rng::{
        random_diagonal_faithful_state, random_even_cp_unital, rng_from_seed,
    };

    use crate::examples::{qubit_system, sigma_z};

    #[test]
    fn validation_accepts_invariant_even_dynamics() {
        let sys = qubit_system(41);
        assert!(sys.validate().is_ok());
        assert!(sys.is_hermitian_system());
    }

    #[test]
    fn validation_rejects_non_invariant_dynamics() {
        let mut rng = rng_from_seed(42);
        let form = StandardForm::new(2, sigma_z()).unwrap();
        let rho = random_diagonal_faithful_state(&mut rng, 2, 0.15);
        // An even CP unital map with no relation to ρ is generically
        // non-invariant.
        let e = random_even_cp_unital(&mut rng, &sigma_z(), &sigma_z(), 4);
        let res = GradedSystem::new(form, rho, vec![NamedMap::new("a", e)], vec![]);
        assert!(matches!(res, Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn validation_rejects_duplicate_names() {
        let sys = qubit_system(43);
        let mut dup = sys.clone();
        dup.dynamics.push(dup.dynamics[0].clone());
        assert!(matches!(dup.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn grading_augmentation_is_idempotent() {
        let sys = qubit_system(44);
        let g1 = sys.with_grading_as_dynamics();
        assert_eq!(g1.dynamics.len(), 2);
        let g2 = g1.with_grading_as_dynamics();
        assert_eq!(g2.dynamics.len(), 2);
        assert!(g1.validate().is_ok());
        // The added map is conjugation by u.
        let gmap = &g1.dynamics[1];
        assert_eq!(gmap.name, GRADING_DYNAMICS_NAME);
        let a = CMat::from_fn(2, 2, |i, j| C::new((i + 2 * j) as f64, 1.0));
        assert!(dist(&gmap.map.apply(&a), &(sigma_z() * &a * sigma_z())) <= 1e-13);
    }

    #[test]
    fn kms_dual_system_is_involutive() {
        let sys = qubit_system(45);
        let dual = sys.kms_dual_system().unwrap();
        assert!(dual.validate().is_ok());
        let back = dual.kms_dual_system().unwrap();
        for (orig, rt) in sys.dynamics.iter().zip(&back.dynamics) {
            assert!(dist(&orig.map.sup, &rt.map.sup) <= 1e-9);
        }
    }

    #[test]
    fn kms_dual_of_even_unitary_conjugation_with_tracial_state() {
        // Tracial state, dynamics a ↦ U a U† with U even unitary diag phases:
        // the KMS dual is a ↦ U† a U.
        let form = StandardForm::new(2, sigma_z()).unwrap();
        let rho = identity(2).scale(0.5);
        let u = CMat::from_diagonal(&CVec::from_vec(vec![
            C::new(0.6, 0.8),
            C::new(0.0, 1.0),
        ]));
        let alpha = Channel::from_conjugation(&u.adjoint()); // a ↦ U a U†
        let sys = GradedSystem::new(
            form,
            rho,
            vec![NamedMap::new("u", alpha)],
            vec![],
        )
        .unwrap();
        let dual = sys.kms_dual_system().unwrap();
        let expect = Channel::from_conjugation(&u); // a ↦ U† a U
        assert!(dist(&dual.dynamics[0].map.sup, &expect.sup) <= 1e-12);
    }

    #[test]
    fn twisted_dual_system_carrier_involution() {
        let sys = qubit_system(46);
        let tw = sys.twisted_dual_system().unwrap();
        assert!(tw.validate().is_ok());
        assert!(dist(&tw.form.u, &conj(&sys.form.u)) <= 1e-14);
        assert!(dist(&tw.rho, &conj(&sys.rho)) <= 1e-14);
        let back = tw.twisted_dual_system().unwrap();
        assert!(dist(&back.rho, &sys.rho) <= 1e-12);
        for (orig, rt) in sys.dynamics.iter().zip(&back.dynamics) {
            assert!(dist(&orig.map.sup, &rt.map.sup) <= 1e-8);
        }
        for (orig, rt) in sys.coords.iter().zip(&back.coords) {
            assert!(dist(orig, rt) <= 1e-14);
        }
    }

    #[test]
    fn element_level_double_twist_lands_on_graded_coordinate() {
        // On the original GNS space, twisting a coordinate twice with the
        // *correct* twisted-side modular conjugation gJ gives γ(k) ⊗ I.
        let sys = qubit_system(47);
        let sf = &sys.form;
        let k = &sys.coords[0];
        let j = sf.modular_conjugation();
        let g = sf.g();

        // First twist: k^≀ = γ^{1/2}(j(k*)) with j(x) = J x* J.
        // j(k*) = J k J has carrier conj(k); embed through the Klein map.
        let k_tw = sf.twisted_carrier(&conj(k));

        // Second twist uses the twisted side's own modular conjugation,
        // which is g·J (not J): j_tw(x) = (gJ) x* (gJ). Applied to (k^≀)*
        // the starred argument collapses: j_tw((k^≀)*) = (gJ)·k^≀·(gJ).
        // For an antilinear operator with matrix M (x ↦ M conj(x)), the
        // conjugation sandwich acts on a linear operator z as
        // (M∘conj)·z·(M∘conj): x ↦ M conj(z) conj(M) x.
        let gj = g * &j.m; // antilinear matrix part of gJ
        let j_tw_of_star = &gj * conj(&k_tw) * conj(&gj);
        let second = sf.klein(&j_tw_of_star);

        let expect = sf.left(&sf.gamma_alg(k));
        assert!(
            dist(&second, &expect) <= 1e-12,
            "double twist should give γ(k)⊗I, got distance {}",
            dist(&second, &expect)
        );

        // With the untwisted J the same computation would land on k ⊗ I —
        // distinguishable whenever k is not even.
        let j_plain_of_star = &j.m * conj(&k_tw) * conj(&j.m);
        let second_plain = sf.klein(&j_plain_of_star);
        assert!(dist(&second_plain, &sf.left(k)) <= 1e-12);
        assert!(dist(&sf.left(k), &expect) > 0.5, "test needs an odd coordinate");
    }

    #[test]
    fn modular_generator_exponentiates_to_the_flow() {
        let sys = qubit_system(48);
        let ad = sys.modular_generator_sup().unwrap();
        let t = 0.37;
        let flow = crate::mat::matrix_function(&ad, |x| (ci(t * x)).exp()).unwrap();
        let rp = powm_it(&sys.rho, t).unwrap();
        let rm = powm_it(&sys.rho, -t).unwrap();
        let direct = kron(&rp, &rm.transpose());
        assert!(dist(&flow, &direct) <= 1e-10);
        // And the flow fixes Λ-compatible data: generator annihilates vec(ρ).
        assert!((&ad * vec_mat(&sys.rho)).norm() <= 1e-10);
    }
}
