//! Unital completely positive maps between matrix algebras in the Heisenberg
//! picture, with their commutant duals, twisted duals and KMS duals.
//!
//! A map `E: M_n → M_m` is stored as its superoperator on row-major vec
//! coordinates: `sup · vec(a) = vec(E(a))`, so `sup` is `m² × n²` with
//! `sup[(p·m+q),(i·n+j)] = E(e_ij)[p,q]`. The Choi matrix rearranges the same
//! numbers as `X[(p·n+i),(q·n+j)] = E(e_ij)[p,q]`; `X ⪰ 0` iff `E` is
//! completely positive.
//!
//! Duality: given faithful states ρ_μ (input) and ρ_ν (output) with
//! `ν∘E = μ`, the dual `E′: B′ → A′` is the unique map with
//! `⟨Λ_μ, a E′(b′) Λ_μ⟩ = ⟨Λ_ν, E(a) b′ Λ_ν⟩`; in commutant carrier
//! coordinates it solves `T_μᵀ D = Eᵀ T_νᵀ` where `T_ρ` is the superoperator
//! of `y ↦ ρ^{1/2} y ρ^{1/2}`. The twisted dual between graded algebras has
//! the *same* carrier map — the grading twist lives entirely in the embedding
//! of carrier coordinates into the twisted commutant. The KMS dual
//! `E^σ = j_A ∘ E′ ∘ j_B` maps `B → A`; its superoperator is the entrywise
//! conjugate of the dual's, and it equals the sandwich form
//! `E^σ(b) = ρ_μ^{−1/2} E†(ρ_ν^{1/2} b ρ_ν^{1/2}) ρ_μ^{−1/2}` (both routes
//! are implemented and kept as mutual checks).

use crate::error::{Error, Result};
use crate::mat::{
    conj, dist, herm_eig, herm_part, identity, inv, kron, powm_pd, sqrtm_psd, trace, unvec,
    vec_mat, CMat,
};

/// Structural properties of a map at standard tolerances; `positive` is a
/// sampled heuristic (CP maps are reported positive without sampling).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChannelFlags {
    pub hermiticity_preserving: bool,
    pub positive: bool,
    pub completely_positive: bool,
    pub unital: bool,
    pub even: bool,
    pub antimultiplicative: bool,
}

/// A linear map `E: M_{n_in} → M_{n_out}` in superoperator form.
#[derive(Clone, Debug)]
pub struct Channel {
    pub n_in: usize,
    pub n_out: usize,
    /// `n_out² × n_in²` matrix with `sup · vec(a) = vec(E(a))`.
    pub sup: CMat,
}

impl Channel {
    pub fn from_superop(sup: CMat, n_in: usize, n_out: usize) -> Result<Self> {
        if sup.shape() != (n_out * n_out, n_in * n_in) {
            return Err(Error::Dimension(format!(
                "superoperator must be {}×{}, got {}×{}",
                n_out * n_out,
                n_in * n_in,
                sup.nrows(),
                sup.ncols()
            )));
        }
        Ok(Self { n_in, n_out, sup })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_in: n,
            n_out: n,
            sup: identity(n * n),
        }
    }

    /// `E(a) = Σ_k K_k† a K_k` with each `K_k` of shape `n_in × n_out`;
    /// unital when `Σ K† K = I`.
    pub fn from_kraus_heisenberg(kraus: &[CMat], n_in: usize, n_out: usize) -> Self {
        let mut sup = CMat::zeros(n_out * n_out, n_in * n_in);
        for k in kraus {
            assert_eq!(
                k.shape(),
                (n_in, n_out),
                "Kraus operator must be n_in × n_out"
            );
            sup += kron(&k.adjoint(), &k.transpose());
        }
        Self { n_in, n_out, sup }
    }

    /// Conjugation `a ↦ w* a w` by a single (typically unitary) `w`.
    pub fn from_conjugation(w: &CMat) -> Self {
        Self::from_kraus_heisenberg(std::slice::from_ref(w), w.nrows(), w.ncols())
    }

    pub fn apply(&self, a: &CMat) -> CMat {
        assert_eq!(a.shape(), (self.n_in, self.n_in), "input dimension mismatch");
        unvec(&(&self.sup * vec_mat(a)), self.n_out, self.n_out)
    }

    /// Composition `self ∘ inner` (first `inner`, then `self`).
    pub fn compose(&self, inner: &Channel) -> Result<Channel> {
        if self.n_in != inner.n_out {
            return Err(Error::Dimension(format!(
                "cannot compose: inner output {} ≠ outer input {}",
                inner.n_out, self.n_in
            )));
        }
        Ok(Channel {
            n_in: inner.n_in,
            n_out: self.n_out,
            sup: &self.sup * &inner.sup,
        })
    }

    /// Hilbert–Schmidt adjoint `E†` (so `Tr(E(a)† b) = Tr(a† E†(b))`);
    /// in the Schrödinger picture this pushes densities backwards:
    /// `ν∘E = μ ⟺ E†(ρ_ν) = ρ_μ`.
    pub fn adjoint(&self) -> Channel {
        Channel {
            n_in: self.n_out,
            n_out: self.n_in,
            sup: self.sup.adjoint(),
        }
    }

    /// Density of the pulled-back state: `E†(ρ_out)`.
    pub fn pull_state(&self, rho_out: &CMat) -> CMat {
        self.adjoint().apply(rho_out)
    }

    // -- Choi form -------------------------------------------------------------

    /// Choi matrix `X[(p·n_in+i),(q·n_in+j)] = E(e_ij)[p,q]`, of size
    /// `(n_out·n_in)²`. PSD ⟺ completely positive.
    pub fn choi(&self) -> CMat {
        let (n, m) = (self.n_in, self.n_out);
        let mut x = CMat::zeros(m * n, m * n);
        for p in 0..m {
            for q in 0..m {
                for i in 0..n {
                    for j in 0..n {
                        x[(p * n + i, q * n + j)] = self.sup[(p * m + q, i * n + j)];
                    }
                }
            }
        }
        x
    }

    pub fn from_choi(x: &CMat, n_in: usize, n_out: usize) -> Result<Self> {
        let (n, m) = (n_in, n_out);
        if x.shape() != (m * n, m * n) {
            return Err(Error::Dimension(format!(
                "Choi matrix must be {}×{}, got {}×{}",
                m * n,
                m * n,
                x.nrows(),
                x.ncols()
            )));
        }
        let mut sup = CMat::zeros(m * m, n * n);
        for p in 0..m {
            for q in 0..m {
                for i in 0..n {
                    for j in 0..n {
                        sup[(p * m + q, i * n + j)] = x[(p * n + i, q * n + j)];
                    }
                }
            }
        }
        Self::from_superop(sup, n_in, n_out)
    }

    // -- structural checks -------------------------------------------------------

    /// `‖E(I) − I‖`.
    pub fn unital_residual(&self) -> f64 {
        dist(&self.apply(&identity(self.n_in)), &identity(self.n_out))
    }

    /// Hermiticity-preservation residual: `max ‖E(h)† − E(h)‖` over a
    /// Hermitian frame (equivalently, Choi Hermiticity).
    pub fn herm_preserving_residual(&self) -> f64 {
        let x = self.choi();
        (&x - x.adjoint()).norm()
    }

    /// Most negative Choi eigenvalue (0 when CP up to tolerance).
    pub fn cp_defect(&self) -> f64 {
        let x = herm_part(&self.choi());
        match herm_eig(&x) {
            Ok((vals, _)) => (-vals[0]).max(0.0),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.herm_preserving_residual() <= tol && self.cp_defect() <= tol
    }

    /// Covariance residual for gradings: `‖E∘Ad(u_in) − Ad(u_out)∘E‖`.
    pub fn even_residual(&self, u_in: &CMat, u_out: &CMat) -> f64 {
        let g_in = kron(u_in, &conj(u_in));
        let g_out = kron(u_out, &conj(u_out));
        (&self.sup * g_in - g_out * &self.sup).norm()
    }

    /// Residual of the state compatibility `ν∘E = μ`, i.e. `‖E†(ρ_ν) − ρ_μ‖`.
    pub fn state_residual(&self, rho_mu: &CMat, rho_nu: &CMat) -> f64 {
        dist(&self.pull_state(rho_nu), rho_mu)
    }

    // -- duals -------------------------------------------------------------------

    /// Commutant dual `E′: B′ → A′` in carrier coordinates
    /// (`I ⊗ c ↦ I ⊗ E′_car(c)`), as the unique solution of
    /// `⟨Λ_μ, a E′(b′) Λ_μ⟩ = ⟨Λ_ν, E(a) b′ Λ_ν⟩`.
    ///
    /// Requires `ν∘E = μ`; the guard is lenient (1e-6) so that channels
    /// extracted from numerical optimization remain acceptable.
    pub fn dual_carrier(&self, rho_mu: &CMat, rho_nu: &CMat) -> Result<Channel> {
        let res = self.state_residual(rho_mu, rho_nu);
        if res > 1e-6 {
            return Err(Error::StateMismatch { residual: res });
        }
        let t_mu = state_sandwich_sup(rho_mu)?;
        let t_nu = state_sandwich_sup(rho_nu)?;
        // T_μᵀ · D = Eᵀ · T_νᵀ  ⇒  D = (T_μᵀ)⁻¹ Eᵀ T_νᵀ
        let lhs = t_mu.transpose();
        let rhs = self.sup.transpose() * t_nu.transpose();
        let d = inv(&lhs)? * rhs;
        Channel::from_superop(d, self.n_out, self.n_in)
    }

    /// Twisted dual `E^≀: B^≀ → A^≀` in carrier coordinates, for an even map
    /// between graded algebras. Its carrier map is identical to the commutant
    /// dual's: conjugating both sides of the defining relation by the Klein
    /// square roots moves the twist into the embedding
    /// `c ↦ g^{1/2}(I⊗c)g^{−1/2}` and leaves the coordinates untouched.
    pub fn twisted_dual_carrier(
        &self,
        u_in: &CMat,
        u_out: &CMat,
        rho_mu: &CMat,
        rho_nu: &CMat,
    ) -> Result<Channel> {
        let even = self.even_residual(u_in, u_out);
        if even > 1e-9 {
            return Err(Error::NotEven { residual: even });
        }
        self.dual_carrier(rho_mu, rho_nu)
    }

    /// KMS dual `E^σ = j_A ∘ E′ ∘ j_B : B → A` via the carrier route
    /// (entrywise conjugate of the dual superoperator).
    pub fn kms_dual(&self, rho_mu: &CMat, rho_nu: &CMat) -> Result<Channel> {
        let d = self.dual_carrier(rho_mu, rho_nu)?;
        Channel::from_superop(conj(&d.sup), self.n_out, self.n_in)
    }

    /// KMS dual through the sandwich closed form
    /// `E^σ(b) = ρ_μ^{−1/2} E†(ρ_ν^{1/2} b ρ_ν^{1/2}) ρ_μ^{−1/2}`
    /// (independent route, used as a cross-check of [`Channel::kms_dual`]).
    pub fn kms_dual_sandwich(&self, rho_mu: &CMat, rho_nu: &CMat) -> Result<Channel> {
        let res = self.state_residual(rho_mu, rho_nu);
        if res > 1e-6 {
            return Err(Error::StateMismatch { residual: res });
        }
        let mu_mh = powm_pd(rho_mu, -0.5)?;
        let nu_h = sqrtm_psd(rho_nu)?;
        let outer = kron(&mu_mh, &mu_mh.transpose());
        let inner = kron(&nu_h, &nu_h.transpose());
        let sup = outer * self.sup.adjoint() * inner;
        Channel::from_superop(sup, self.n_out, self.n_in)
    }

    /// Expectation `Tr(ρ E(a))`.
    pub fn expect(&self, rho_out: &CMat, a: &CMat) -> crate::mat::C {
        trace(&(rho_out * self.apply(a)))
    }

    /// `max ‖E(e_ij e_kl) − E(e_ij)E(e_kl)‖` over matrix-unit pairs
    /// (zero iff the map is an algebra homomorphism).
    pub fn multiplicative_residual(&self) -> f64 {
        self.product_residual(false)
    }

    /// `max ‖E(e_ij e_kl) − E(e_kl)E(e_ij)‖` over matrix-unit pairs
    /// (zero iff the map reverses products, as θ-type maps do).
    pub fn antimultiplicative_residual(&self) -> f64 {
        self.product_residual(true)
    }

    fn product_residual(&self, reversed: bool) -> f64 {
        let n = self.n_in;
        let images: Vec<CMat> = (0..n * n)
            .map(|idx| {
                let mut e = CMat::zeros(n, n);
                e[(idx / n, idx % n)] = crate::mat::cr(1.0);
                self.apply(&e)
            })
            .collect();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        // e_ij e_kl = δ_jk e_il
                        let prod_image = if j == k {
                            images[i * n + l].clone()
                        } else {
                            CMat::zeros(self.n_out, self.n_out)
                        };
                        let (x, y) = (&images[i * n + j], &images[k * n + l]);
                        let split = if reversed { y * x } else { x * y };
                        worst = worst.max(dist(&prod_image, &split));
                    }
                }
            }
        }
        worst
    }

    /// Largest negativity of `E(a)` over sampled random PSD inputs `a` — a
    /// heuristic positivity probe (deterministic for a fixed seed), never a
    /// proof of positivity.
    pub fn positivity_defect_sampled(&self, trials: usize, seed: u64) -> f64 {
        let mut rng = crate::rng::rng_from_seed(seed);
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let g = crate::rng::ginibre(&mut rng, self.n_in, self.n_in);
            let a = &g * g.adjoint();
            let out = herm_part(&self.apply(&a));
            if let Ok((vals, _)) = herm_eig(&out) {
                worst = worst.max((-vals[0]).max(0.0));
            }
        }
        worst
    }

    /// Structural flags at the standard tolerances. `even` is only
    /// meaningful when gradings are supplied (it stays `false` otherwise).
    pub fn flags(&self, gradings: Option<(&CMat, &CMat)>) -> ChannelFlags {
        let cp = self.is_cp(1e-9);
        ChannelFlags {
            hermiticity_preserving: self.herm_preserving_residual() <= 1e-9,
            positive: cp || self.positivity_defect_sampled(200, 0x9e3779b9) <= 1e-9,
            completely_positive: cp,
            unital: self.unital_residual() <= 1e-9,
            even: gradings
                .map(|(ua, ub)| self.even_residual(ua, ub) <= 1e-9)
                .unwrap_or(false),
            antimultiplicative: self.antimultiplicative_residual() <= 1e-9,
        }
    }

    /// The constant channel onto the input expectation: `a ↦ μ(a)·I`.
    pub fn product_channel(rho_mu: &CMat, n_out: usize) -> Self {
        let n = rho_mu.nrows();
        let mut sup = CMat::zeros(n_out * n_out, n * n);
        let id_vec = vec_mat(&identity(n_out));
        let mu_row = vec_mat(&rho_mu.transpose());
        for r in 0..n_out * n_out {
            for c in 0..n * n {
                // vec(E(a))[r] = Tr(ρ a) · vec(I)[r]; Tr(ρ a) = Σ_ij ρ[j,i] a[i,j]
                sup[(r, c)] = id_vec[r] * mu_row[c];
            }
        }
        Self {
            n_in: n,
            n_out,
            sup,
        }
    }
}

/// Superoperator of `y ↦ ρ^{1/2} y ρ^{1/2}`.
pub fn state_sandwich_sup(rho: &CMat) -> Result<CMat> {
    let h = sqrtm_psd(rho)?;
    Ok(kron(&h, &h.transpose()))
}

/// GNS inner product `⟨Λ_ρ, x Λ_ρ⟩` for a carrier operator `x` acting on
/// `vec` coordinates of the algebra containing ρ.
pub fn gns_expect(rho: &CMat, x: &CMat) -> Result<crate::mat::C> {
    let lam = vec_mat(&sqrtm_psd(rho)?);
    Ok(lam.dotc(&(x * &lam)))
}
