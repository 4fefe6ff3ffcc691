//! Standard forms of matrix algebras: the GNS carrier `C^n ⊗ C^n`, modular
//! data (S, Δ, J), ℤ₂-gradings with their Klein square roots, commutants and
//! twisted commutants.
//!
//! The algebra `A ≅ M_n` acts on vec coordinates by left multiplication
//! (`a ⊗ I`); its commutant `A′` is the right-multiplication algebra, carried
//! by the *-isomorphism `c ↦ I ⊗ c`. The modular conjugation for the trace
//! vector is `J vec(X) = vec(X†)`, and a faithful state ρ has
//! `Λ = vec(ρ^{1/2})`, `Δ vec(X) = vec(ρ X ρ⁻¹)`.
//!
//! A grading is a self-adjoint unitary `u` on `C^n`; on the carrier it acts
//! as `g = u ⊗ conj(u)`, so `g vec(X) = vec(u X u)` and `gΛ = Λ` for even
//! states. The Klein square root `g^{1/2} := p⁺ − i·p⁻` (spectral projections
//! `p± = (1 ± g)/2`) satisfies `(g^{1/2})² = g` and `(g^{1/2})* = g^{−1/2}`,
//! and conjugation by it carries the commutant onto the twisted commutant
//! `A^≀ = g^{1/2} A′ g^{−1/2}`, whose homogeneous elements supercommute with
//! those of `A`.

use crate::error::{Error, Result};
use crate::mat::{
    conj, cr, dist, herm_eig, identity, inv, is_hermitian, kron, powm_pd, sqrtm_psd, trace,
    vec_mat, Antilinear, C, CMat, CVec, TOL_HERM, TOL_PD,
};

/// A matrix algebra `M_n` in its standard representation on `C^n ⊗ C^n`,
/// together with a grading.
#[derive(Clone, Debug)]
pub struct StandardForm {
    /// Algebra size: `A ≅ M_n`.
    pub n: usize,
    /// Algebra-level grading unitary: self-adjoint, `u² = I`.
    pub u: CMat,
    /// Carrier grading `g = u ⊗ conj(u)`.
    g: CMat,
    /// Klein square root `g^{1/2} = p⁺ − i·p⁻`.
    g_half: CMat,
    /// Its inverse (= adjoint) `g^{−1/2} = p⁺ + i·p⁻`.
    g_half_inv: CMat,
    /// Permutation matrix of `vec(X) ↦ vec(Xᵀ)` (the linear part of J).
    swap: CMat,
}

impl StandardForm {
    pub fn new(n: usize, u: CMat) -> Result<Self> {
        if u.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "grading unitary must be {n}×{n}, got {}×{}",
                u.nrows(),
                u.ncols()
            )));
        }
        if !is_hermitian(&u, TOL_HERM) {
            return Err(Error::BadGrading {
                deviation: (&u - u.adjoint()).norm(),
            });
        }
        let dev = dist(&(&u * &u), &identity(n));
        if dev > 1e-10 {
            return Err(Error::BadGrading { deviation: dev });
        }
        let g = kron(&u, &conj(&u));
        let d = n * n;
        let id = identity(d);
        let p_plus = (&id + &g).scale(0.5);
        let p_minus = (&id - &g).scale(0.5);
        let g_half = &p_plus - &p_minus.scale(1.0).map(|z| z * C::new(0.0, 1.0));
        let g_half_inv = &p_plus + &p_minus.scale(1.0).map(|z| z * C::new(0.0, 1.0));
        let mut swap = CMat::zeros(d, d);
        for i in 0..n {
            for j in 0..n {
                // vec(Xᵀ)[i·n+j] = X[j,i] = vec(X)[j·n+i]
                swap[(i * n + j, j * n + i)] = cr(1.0);
            }
        }
        Ok(Self {
            n,
            u,
            g,
            g_half,
            g_half_inv,
            swap,
        })
    }

    /// Trivially graded algebra (`u = I`).
    pub fn trivial(n: usize) -> Self {
        Self::new(n, identity(n)).expect("identity grading is valid")
    }

    /// Dimension of the GNS carrier, `n²`.
    pub fn dim_h(&self) -> usize {
        self.n * self.n
    }

    pub fn grading_is_trivial(&self) -> bool {
        dist(&self.u, &identity(self.n)) <= 1e-12
    }

    // -- algebra-level maps ---------------------------------------------------

    /// Grading automorphism on algebra elements: `γ(a) = u a u`.
    pub fn gamma_alg(&self, a: &CMat) -> CMat {
        &self.u * a * &self.u
    }

    /// Even part `(a + γ(a))/2`.
    pub fn even_part(&self, a: &CMat) -> CMat {
        (a + self.gamma_alg(a)).scale(0.5)
    }

    /// Odd part `(a − γ(a))/2`.
    pub fn odd_part(&self, a: &CMat) -> CMat {
        (a - self.gamma_alg(a)).scale(0.5)
    }

    // -- carrier representations ---------------------------------------------

    /// Left action of an algebra element: `a ⊗ I`.
    pub fn left(&self, a: &CMat) -> CMat {
        kron(a, &identity(self.n))
    }

    /// Commutant element in carrier coordinates: `c ↦ I ⊗ c` (a *-isomorphism
    /// onto `A′`; right multiplication by `b` is carried by `c = bᵀ`).
    pub fn right_carrier(&self, c: &CMat) -> CMat {
        kron(&identity(self.n), c)
    }

    /// Twisted-commutant element with carrier coordinate `c`:
    /// `g^{1/2} (I ⊗ c) g^{−1/2}`.
    pub fn twisted_carrier(&self, c: &CMat) -> CMat {
        &self.g_half * self.right_carrier(c) * &self.g_half_inv
    }

    /// Carrier grading `g = u ⊗ conj(u)`.
    pub fn g(&self) -> &CMat {
        &self.g
    }

    /// Klein square root `g^{1/2} = p⁺ − i p⁻`.
    pub fn g_half(&self) -> &CMat {
        &self.g_half
    }

    /// `g^{−1/2} = p⁺ + i p⁻`.
    pub fn g_half_inv(&self) -> &CMat {
        &self.g_half_inv
    }

    /// Grading automorphism on carrier operators: `x ↦ g x g`.
    pub fn gamma_gns(&self, x: &CMat) -> CMat {
        &self.g * x * &self.g
    }

    /// Klein twist on carrier operators: `x ↦ g^{1/2} x g^{−1/2}`
    /// (carries `A′` onto `A^≀`).
    pub fn klein(&self, x: &CMat) -> CMat {
        &self.g_half * x * &self.g_half_inv
    }

    /// Inverse Klein twist `x ↦ g^{−1/2} x g^{1/2}`.
    pub fn klein_inv(&self, x: &CMat) -> CMat {
        &self.g_half_inv * x * &self.g_half
    }

    /// `unvec(g^{1/2} vec(Y))` without forming the n²×n² operator:
    /// `g^{1/2} vec(Y) = vec((Y + uYu)/2 − i(Y − uYu)/2)`.
    pub fn klein_apply_mat(&self, y: &CMat) -> CMat {
        let uyu = &self.u * y * &self.u;
        let even = (y + &uyu).scale(0.5);
        let odd = (y - &uyu).scale(0.5);
        even - odd.map(|z| z * C::new(0.0, 1.0))
    }

    /// `unvec(g^{−1/2} vec(Y))`, inverse of [`StandardForm::klein_apply_mat`].
    pub fn klein_apply_mat_inv(&self, y: &CMat) -> CMat {
        let uyu = &self.u * y * &self.u;
        let even = (y + &uyu).scale(0.5);
        let odd = (y - &uyu).scale(0.5);
        even + odd.map(|z| z * C::new(0.0, 1.0))
    }

    // -- modular data ----------------------------------------------------------

    /// Modular conjugation for the tracial/canonical form:
    /// `J vec(X) = vec(X†)` (antilinear; matrix part is the transpose swap).
    pub fn modular_conjugation(&self) -> Antilinear {
        Antilinear::new(self.swap.clone())
    }

    /// `j(a) = J a* J` for an algebra element, returned in commutant carrier
    /// coordinates: `j(a) = I ⊗ aᵀ`, so the carrier coordinate is `aᵀ`.
    pub fn j_of_algebra(&self, a: &CMat) -> CMat {
        a.transpose()
    }

    /// `j` applied to a commutant element with carrier coordinate `c` lands in
    /// the algebra: `J (I⊗c)* J = conj(c*) ⊗ I`; as a map of the *element*
    /// `j(x′) = J x′* J`, the algebra coordinate is `conj(c†)ᵀ… ` — concretely
    /// `j_carrier(c) = c̄*ᵀ = c` conjugated appropriately; we expose the form
    /// used throughout: `J (I⊗c) J = conj(c) ⊗ I`.
    pub fn j_of_carrier(&self, c: &CMat) -> CMat {
        conj(c)
    }

    /// State sanity: Hermitian, trace one, faithful, even for the grading.
    pub fn check_state(&self, rho: &CMat) -> Result<()> {
        if rho.shape() != (self.n, self.n) {
            return Err(Error::Dimension("state has wrong dimensions".into()));
        }
        if !is_hermitian(rho, TOL_HERM) {
            return Err(Error::NotHermitian {
                deviation: (rho - rho.adjoint()).norm(),
            });
        }
        let (vals, _) = herm_eig(rho)?;
        if vals[0] <= TOL_PD {
            return Err(Error::NotFaithful {
                eigenvalue: vals[0],
            });
        }
        let t = trace(rho);
        if (t - cr(1.0)).norm() > 1e-9 {
            return Err(Error::StateMismatch {
                residual: (t - cr(1.0)).norm(),
            });
        }
        let even_dev = dist(&self.gamma_alg(rho), rho);
        if even_dev > 1e-9 {
            return Err(Error::NotEven { residual: even_dev });
        }
        Ok(())
    }

    /// GNS vector of a faithful state: `Λ = vec(ρ^{1/2})`.
    pub fn lambda(&self, rho: &CMat) -> Result<CVec> {
        Ok(vec_mat(&sqrtm_psd(rho)?))
    }

    /// Modular operator `Δ vec(X) = vec(ρ X ρ⁻¹)`, i.e. `Δ = ρ ⊗ conj(ρ⁻¹)`.
    pub fn modular_operator(&self, rho: &CMat) -> Result<CMat> {
        let rho_inv = inv(rho)?;
        Ok(kron(rho, &conj(&rho_inv)))
    }

    /// `Δ^p` through the spectral form (ρ ⊗ conj(ρ⁻¹) powers).
    pub fn modular_power(&self, rho: &CMat, p: f64) -> Result<CMat> {
        let rp = powm_pd(rho, p)?;
        let rmp = powm_pd(rho, -p)?;
        Ok(kron(&rp, &conj(&rmp)))
    }

    /// The Tomita involution `S aΛ = a*Λ`, constructed **from its defining
    /// action** on the matrix-unit frame (not from the J·Δ^{1/2} formula), so
    /// its polar decomposition is an independent check of the modular data.
    pub fn tomita_operator(&self, rho: &CMat) -> Result<Antilinear> {
        let n = self.n;
        let d = self.dim_h();
        let r_half = sqrtm_psd(rho)?;
        // Columns: vec(e_ij ρ^{1/2}) and vec(e_ji ρ^{1/2}).
        let mut b = CMat::zeros(d, d);
        let mut b_star = CMat::zeros(d, d);
        for i in 0..n {
            for j in 0..n {
                let col = i * n + j;
                let mut eij = CMat::zeros(n, n);
                eij[(i, j)] = cr(1.0);
                b.set_column(col, &CVec::from(vec_mat(&(&eij * &r_half))));
                let mut eji = CMat::zeros(n, n);
                eji[(j, i)] = cr(1.0);
                b_star.set_column(col, &CVec::from(vec_mat(&(&eji * &r_half))));
            }
        }
        // S (B x) = B* x for real coefficient vectors x; antilinear matrix M
        // satisfies M conj(B) = B*, so M = B* conj(B)⁻¹.
        let m = &b_star * inv(&conj(&b))?;
        Ok(Antilinear::new(m))
    }

    /// Canonical modular conjugation for the state ρ — for matrix factors the
    /// polar J of S is state-independent and equals `vec(X) ↦ vec(X†)`.
    pub fn canonical_j(&self) -> Antilinear {
        self.modular_conjugation()
    }

    /// Modular automorphism group on algebra elements:
    /// `σ_t(a) = ρ^{it} a ρ^{−it}`.
    pub fn sigma_t(&self, rho: &CMat, a: &CMat, t: f64) -> Result<CMat> {
        let ut = crate::mat::powm_it(rho, t)?;
        let ut_inv = crate::mat::powm_it(rho, -t)?;
        Ok(&ut * a * ut_inv)
    }

    /// Expectation `μ(a) = Tr(ρ a)`.
    pub fn expect(&self, rho: &CMat, a: &CMat) -> C {
        trace(&(rho * a))
    }

    /// Density of the commutant state `μ′ = μ∘j` in carrier coordinates:
    /// `μ′(I⊗c) = Tr(conj(ρ) c)`.
    pub fn commutant_state_density(&self, rho: &CMat) -> CMat {
        conj(rho)
    }

    /// Basis of the algebra's left action (n² carrier matrices).
    pub fn left_basis(&self) -> Vec<CMat> {
        self.matrix_units()
            .iter()
            .map(|e| self.left(e))
            .collect()
    }

    /// Basis of the commutant (n² carrier matrices `I ⊗ e_ij`).
    pub fn commutant_basis(&self) -> Vec<CMat> {
        self.matrix_units()
            .iter()
            .map(|e| self.right_carrier(e))
            .collect()
    }

    /// Basis of the twisted commutant.
    pub fn twisted_basis(&self) -> Vec<CMat> {
        self.matrix_units()
            .iter()
            .map(|e| self.twisted_carrier(e))
            .collect()
    }

    /// Matrix units `e_ij` of `M_n`, row-major order.
    pub fn matrix_units(&self) -> Vec<CMat> {
        let n = self.n;
        let mut units = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e = CMat::zeros(n, n);
                e[(i, j)] = cr(1.0);
                units.push(e);
            }
        }
        units
    }

    /// Membership test for the natural cone (vec'd PSD matrices in canonical
    /// form): smallest eigenvalue of `unvec(v)`'s Hermitian part ≥ −tol.
    pub fn in_natural_cone(&self, v: &CVec, tol: f64) -> bool {
        let x = crate::mat::unvec(v, self.n, self.n);
        if (&x - x.adjoint()).norm() > tol * (1.0 + x.norm()) {
            return false;
        }
        match herm_eig(&crate::mat::herm_part(&x)) {
            Ok((vals, _)) => vals[0] >= -tol,
            Err(_) => false,
        }
    }
}
