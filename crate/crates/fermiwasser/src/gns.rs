//! GNS space of a transport plan over product monomials `a ⊙ c` (algebra
//! element times second-factor carrier coordinate), with:
//!
//! * the cyclic vector and the product representation `π`,
//! * the grading involution `h` (induced by `γ ⊙ γ̃`) and its square-root
//!   twists `η^{±1/2}`,
//! * the fermionic representation `π^F(a ⊗F c) = π(a⊙1)·η^{1/2}(π(1⊙c))`,
//!   which turns the same Hilbert space into a representation of the graded
//!   tensor product,
//! * the isometric embedding of the second factor's standard form and the
//!   extraction of the channel witness from the representation,
//! * the quadratic transport cost as a sum of squared vector distances.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::mat::{conj, herm_eig, herm_part, identity, inv, kron, vec_mat, C, CMat, CVec, TOL_RANK};
use crate::plan::TransportPlan;

/// GNS data of a plan: quotient coordinates, cyclic vector, representation
/// builders, grading involution and second-factor embedding.
#[derive(Clone, Debug)]
pub struct GnsSpace {
    n: usize,
    m: usize,
    /// Dimension of the quotient Hilbert space.
    pub dim: usize,
    graded: bool,
    /// Quotient coordinates: `w` maps monomial coefficient vectors to the
    /// Hilbert space, and `w · w_pinv = id` there.
    w: CMat,
    w_pinv: CMat,
    /// The cyclic vector `Ω = class of 1⊙1`.
    pub omega: CVec,
    h: CMat,
    h_half: CMat,
    h_half_inv: CMat,
    u_nu: CMat,
    sqrt_nu: CMat,
}

/// Gram matrix of the monomials `e_{i1 i2} ⊙ e_{j1 j2}` under the plan's
/// commutant-picture pairing; positive semidefinite for every admitted plan.
pub fn usual_gram(plan: &TransportPlan) -> CMat {
    let n = plan.n();
    let m = plan.m();
    let t = plan.usual_table();
    gram_from_table(&t, n, m)
}

/// Gram matrix of the graded monomials `e_{i1 i2} ⊗F e_{j1 j2}` under the
/// fermionic pairing, with the graded star/product signs
/// `(−1)^{∂a_I ∂c_I + ∂c_I ∂a_K}`. Positive semidefinite exactly when the
/// plan is graded; requires diagonal `±1` grading unitaries so that matrix
/// units are homogeneous.
pub fn fermionic_gram(plan: &TransportPlan) -> Result<CMat> {
    let n = plan.n();
    let m = plan.m();
    let pa = diag_signs(&plan.form_a.u)?;
    let pb = diag_signs(&plan.form_b.u)?;
    let t = plan.fermionic_table();
    let mut g = gram_from_table(&t, n, m);
    let par_a = |i1: usize, i2: usize| usize::from(pa[i1] != pa[i2]);
    let par_c = |j1: usize, j2: usize| usize::from(pb[j1] != pb[j2]);
    for i1 in 0..n {
        for i2 in 0..n {
            for j1 in 0..m {
                for j2 in 0..m {
                    let row = (i1 * n + i2) * m * m + (j1 * m + j2);
                    let pai = par_a(i1, i2);
                    let pci = par_c(j1, j2);
                    for k1 in 0..n {
                        for k2 in 0..n {
                            let pak = par_a(k1, k2);
                            if (pai * pci + pci * pak) % 2 == 0 {
                                continue;
                            }
                            for l1 in 0..m {
                                for l2 in 0..m {
                                    let col = (k1 * n + k2) * m * m + (l1 * m + l2);
                                    g[(row, col)] = -g[(row, col)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(g)
}

fn gram_from_table(t: &CMat, n: usize, m: usize) -> CMat {
    // ⟨e_{i1 i2} ⊙ e_{j1 j2}, e_{k1 k2} ⊙ e_{l1 l2}⟩
    //   = δ_{i1 k1} δ_{j1 l1} · ω(e_{i2 k2} ⊙ e_{j2 l2}).
    let nn = n * n * m * m;
    let mut g = CMat::zeros(nn, nn);
    for i1 in 0..n {
        for i2 in 0..n {
            for j1 in 0..m {
                for j2 in 0..m {
                    let row = (i1 * n + i2) * m * m + (j1 * m + j2);
                    for k2 in 0..n {
                        for l2 in 0..m {
                            let col = (i1 * n + k2) * m * m + (j1 * m + l2);
                            g[(row, col)] = t[(i2 * n + k2, j2 * m + l2)];
                        }
                    }
                }
            }
        }
    }
    g
}

/// Coefficient vector of the monomial `a ⊙ c` over matrix-unit monomials.
fn mono_vec(a: &CMat, c: &CMat) -> CVec {
    let va = vec_mat(a);
    let vc = vec_mat(c);
    let mut out = CVec::zeros(va.len() * vc.len());
    for i in 0..va.len() {
        for j in 0..vc.len() {
            out[i * vc.len() + j] = va[i] * vc[j];
        }
    }
    out
}

fn diag_signs(u: &CMat) -> Result<Vec<bool>> {
    let n = u.nrows();
    for i in 0..n {
        for j in 0..n {
            if i != j && u[(i, j)].norm() > 1e-12 {
                return Err(Error::Config(
                    "homogeneous matrix units need a diagonal grading".into(),
                ));
            }
        }
    }
    Ok((0..n).map(|i| u[(i, i)].re > 0.0).collect())
}

impl GnsSpace {
    /// Build the GNS space of a plan (commutant-picture monomials). Fails
    /// with [`Error::NotAPlan`] if the Gram matrix has an eigenvalue below
    /// `−tol`, i.e. the pairing is not a state.
    pub fn of_plan(plan: &TransportPlan) -> Result<Self> {
        let gram = usual_gram(plan);
        Self::from_gram(gram, plan)
    }

    fn from_gram(gram: CMat, plan: &TransportPlan) -> Result<Self> {
        let n = plan.n();
        let m = plan.m();
        let nn = n * n * m * m;
        let (vals, vecs) = herm_eig(&herm_part(&gram))?;
        let lam_max = vals[vals.len() - 1].max(0.0);
        if vals[0] < -1e-10 * (1.0 + lam_max) {
            return Err(Error::NotAPlan(format!(
                "monomial Gram matrix has eigenvalue {:.3e} — the pairing is not a state",
                vals[0]
            )));
        }
        let kept: Vec<usize> = (0..nn)
            .filter(|&i| vals[i] > TOL_RANK * (1.0 + lam_max))
            .collect();
        let r = kept.len();
        let mut w = CMat::zeros(r, nn);
        let mut w_pinv = CMat::zeros(nn, r);
        for (row, &i) in kept.iter().enumerate() {
            let s = vals[i].sqrt();
            for col in 0..nn {
                w[(row, col)] = vecs[(col, i)].conj() * s;
                w_pinv[(col, row)] = vecs[(col, i)] / s;
            }
        }
        let omega = &w * mono_vec(&identity(n), &identity(m));

        // Grading involution on monomial coefficients: γ on the first factor,
        // conjugated-grading conjugation on the carrier.
        let gam_a = kron(&plan.form_a.u, &plan.form_a.u.transpose());
        let wb = conj(&plan.form_b.u);
        let gam_c = kron(&wb, &wb.transpose());
        let k_mono = kron(&gam_a, &gam_c);
        let h = &w * k_mono * &w_pinv;
        let idr = identity(r);
        let q_p = (&idr + &h).scale(0.5);
        let q_m = (&idr - &h).scale(0.5);
        let h_half = &q_p - q_m.map(|z| z * C::new(0.0, 1.0));
        let h_half_inv = &q_p + q_m.map(|z| z * C::new(0.0, 1.0));

        // Isometry u_ν : G_ν → H_ω, b′Λ_ν ↦ π(1⊙b′)Ω.
        let sqrt_nu = plan.sqrt_nu().clone();
        let mut x = CMat::zeros(m * m, m * m);
        let mut y = CMat::zeros(r, m * m);
        let id_a = identity(n);
        let mut e = CMat::zeros(m, m);
        for p in 0..m {
            for q in 0..m {
                e[(p, q)] = C::new(1.0, 0.0);
                x.column_mut(p * m + q)
                    .copy_from(&vec_mat(&(&sqrt_nu * e.transpose())));
                y.column_mut(p * m + q)
                    .copy_from(&(&w * mono_vec(&id_a, &e)));
                e[(p, q)] = C::new(0.0, 0.0);
            }
        }
        let u_nu = y * inv(&x)?;

        Ok(Self {
            n,
            m,
            dim: r,
            graded: plan.tags.graded,
            w,
            w_pinv,
            omega,
            h,
            h_half,
            h_half_inv,
            u_nu,
            sqrt_nu,
        })
    }

    /// Class vector of the monomial `a ⊙ c` (equals `π(a⊙c)Ω`).
    pub fn vector_of(&self, a: &CMat, c: &CMat) -> CVec {
        &self.w * mono_vec(a, c)
    }

    /// Product representation `π(a ⊙ c)` on the quotient space.
    pub fn pi(&self, a: &CMat, c: &CMat) -> CMat {
        let mono = kron(
            &kron(a, &identity(self.n)),
            &kron(c, &identity(self.m)),
        );
        &self.w * mono * &self.w_pinv
    }

    /// The grading involution `h`: `h π(a⊙c) h = π(γ(a) ⊙ γ̃(c))`, `hΩ = Ω`.
    pub fn h(&self) -> &CMat {
        &self.h
    }

    /// `η^{1/2}(t) = h^{1/2} t h^{−1/2}` with `h^{1/2} = q⁺ − i q⁻`.
    pub fn eta_half(&self, t: &CMat) -> CMat {
        &self.h_half * t * &self.h_half_inv
    }

    /// `η^{−1/2}(t) = h^{−1/2} t h^{1/2}`, inverse of [`GnsSpace::eta_half`].
    pub fn eta_half_inv(&self, t: &CMat) -> CMat {
        &self.h_half_inv * t * &self.h_half
    }

    /// Fermionic representation of the graded monomial `a ⊗F c`:
    /// `π^F(a ⊗F c) = π(a⊙1) · η^{1/2}(π(1⊙c))`. Requires a graded plan.
    pub fn pi_fermionic(&self, a: &CMat, c: &CMat) -> Result<CMat> {
        if !self.graded {
            return Err(Error::NotEven { residual: f64::NAN });
        }
        let first = self.pi(a, &identity(self.m));
        let second = self.eta_half(&self.pi(&identity(self.n), c));
        Ok(first * second)
    }

    /// Inverse representation transform: rebuild `π(a⊙c)` from the fermionic
    /// operators by undoing the `η^{1/2}` twist on the second factor.
    pub fn usual_from_fermionic(&self, a: &CMat, c: &CMat) -> Result<CMat> {
        let first = self.pi_fermionic(a, &identity(self.m))?;
        let second = self.eta_half_inv(&self.pi_fermionic(&identity(self.n), c)?);
        Ok(first * second)
    }

    /// Isometry `u_ν : G_ν → H_ω` with `u_ν(b′Λ_ν) = π(1⊙b′)Ω`.
    pub fn u_nu(&self) -> &CMat {
        &self.u_nu
    }

    /// Orthogonal projection onto the second factor's embedded standard form.
    pub fn p_nu(&self) -> CMat {
        &self.u_nu * self.u_nu.adjoint()
    }

    /// Recover the channel witness from the representation: compressing
    /// `π(a⊙1)` to the embedded copy of `G_ν` acts as `E(a) ⊗ I`.
    pub fn extract_channel(&self) -> Result<Channel> {
        let (n, m) = (self.n, self.m);
        let mut sup = CMat::zeros(m * m, n * n);
        let mut e = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                e[(i, j)] = C::new(1.0, 0.0);
                let t_a = self.u_nu.adjoint() * self.pi(&e, &identity(m)) * &self.u_nu;
                e[(i, j)] = C::new(0.0, 0.0);
                let mut img = CMat::zeros(m, m);
                for p in 0..m {
                    for r in 0..m {
                        let s: C = (0..m).map(|q| t_a[(p * m + q, r * m + q)]).sum();
                        img[(p, r)] = s / C::new(m as f64, 0.0);
                    }
                }
                sup.column_mut(i * n + j).copy_from(&vec_mat(&img));
            }
        }
        Channel::from_superop(sup, n, m)
    }

    /// Quadratic transport cost in vector form:
    /// `Σ_i ‖π(k_i⊙1)Ω − u_ν(l_i Λ_ν)‖²` for coordinate lists `k` (first
    /// factor) and `l` (second factor).
    pub fn cost_norm_form(&self, coords_a: &[CMat], coords_b: &[CMat]) -> Result<f64> {
        if coords_a.len() != coords_b.len() {
            return Err(Error::Config(
                "coordinate lists must have equal length".into(),
            ));
        }
        let mut total = 0.0;
        for (k, l) in coords_a.iter().zip(coords_b) {
            let lhs = self.vector_of(k, &identity(self.m));
            let rhs = &self.u_nu * vec_mat(&(l * &self.sqrt_nu));
            total += (lhs - rhs).norm_squared();
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::sigma_z;
    use crate::mat::{cr, dist, min_eig, trace};
    use crate::plan::{diagonal_plan, product_plan, random_graded_plan, TransportPlan};
    use crate::rng::{
        random_even_faithful_state, random_hermitian, random_unitary, rng_from_seed,
    };
    use crate::standard_form::StandardForm;

    fn m3_grading() -> CMat {
        CMat::from_diagonal(&crate::mat::CVec::from_vec(vec![
            cr(1.0),
            cr(-1.0),
            cr(-1.0),
        ]))
    }

    fn qubit_plan(seed: u64) -> TransportPlan {
        let mut rng = rng_from_seed(seed);
        let f = StandardForm::new(2, sigma_z()).unwrap();
        random_graded_plan(&mut rng, &f, &f).unwrap()
    }

    #[test]
    fn diagonal_plan_space_is_the_standard_form() {
        let mut rng = rng_from_seed(80);
        for (n, u) in [(2usize, sigma_z()), (3usize, m3_grading())] {
            let f = StandardForm::new(n, u).unwrap();
            let rho = random_even_faithful_state(&mut rng, &f.u, 0.1);
            let p = diagonal_plan(&f, &rho).unwrap();
            let gns = GnsSpace::of_plan(&p).unwrap();
            assert_eq!(gns.dim, n * n, "pure pairing has GNS dimension m²");
        }
    }

    #[test]
    fn product_plan_gram_factorizes() {
        let mut rng = rng_from_seed(81);
        let fa = StandardForm::new(2, sigma_z()).unwrap();
        let fb = StandardForm::new(3, m3_grading()).unwrap();
        let rho_mu = random_even_faithful_state(&mut rng, &fa.u, 0.1);
        let rho_nu = random_even_faithful_state(&mut rng, &fb.u, 0.1);
        let p = product_plan(&fa, &fb, &rho_mu, &rho_nu).unwrap();
        let g = usual_gram(&p);

        let mut g_mu = CMat::zeros(4, 4);
        for i1 in 0..2 {
            for i2 in 0..2 {
                for k1 in 0..2 {
                    for k2 in 0..2 {
                        if i1 == k1 {
                            g_mu[(i1 * 2 + i2, k1 * 2 + k2)] = rho_mu[(k2, i2)];
                        }
                    }
                }
            }
        }
        let nu_c = conj(&rho_nu);
        let mut g_nu = CMat::zeros(9, 9);
        for j1 in 0..3 {
            for j2 in 0..3 {
                for l1 in 0..3 {
                    for l2 in 0..3 {
                        if j1 == l1 {
                            g_nu[(j1 * 3 + j2, l1 * 3 + l2)] = nu_c[(l2, j2)];
                        }
                    }
                }
            }
        }
        assert!(dist(&g, &kron(&g_mu, &g_nu)) <= 1e-12);
    }

    #[test]
    fn pi_is_a_star_representation_reproducing_the_plan() {
        let p = qubit_plan(82);
        let gns = GnsSpace::of_plan(&p).unwrap();
        let mut rng = rng_from_seed(820);
        for _ in 0..4 {
            let a1 = random_hermitian(&mut rng, 2);
            let c1 = random_hermitian(&mut rng, 2);
            let a2 = random_hermitian(&mut rng, 2);
            let c2 = random_hermitian(&mut rng, 2);
            // Multiplicativity on the product algebra.
            let lhs = gns.pi(&a1, &c1) * gns.pi(&a2, &c2);
            let rhs = gns.pi(&(&a1 * &a2), &(&c1 * &c2));
            assert!(dist(&lhs, &rhs) <= 1e-9);
            // Star compatibility (Hermitian arguments give Hermitian images).
            let img = gns.pi(&a1, &c1);
            assert!(dist(&img, &img.adjoint()) <= 1e-9);
            // The cyclic vector reproduces the pairing.
            let val = (gns.omega.adjoint() * gns.pi(&a1, &c1) * &gns.omega)[(0, 0)];
            assert!((val - p.usual_eval(&a1, &c1)).norm() <= 1e-10);
            // vector_of is π(·)Ω.
            assert!((gns.vector_of(&a1, &c1) - gns.pi(&a1, &c1) * &gns.omega).norm() <= 1e-10);
        }
    }

    #[test]
    fn grading_involution_properties() {
        let p = qubit_plan(83);
        let gns = GnsSpace::of_plan(&p).unwrap();
        let h = gns.h().clone();
        let r = gns.dim;
        assert!(dist(&(&h * &h), &identity(r)) <= 1e-10, "h² = 1");
        assert!(dist(&h, &h.adjoint()) <= 1e-10, "h self-adjoint");
        assert!((&h * &gns.omega - &gns.omega).norm() <= 1e-10, "hΩ = Ω");
        let mut rng = rng_from_seed(830);
        let a = random_hermitian(&mut rng, 2);
        let c = random_hermitian(&mut rng, 2);
        let w = conj(&p.form_b.u);
        let lhs = &h * gns.pi(&a, &c) * &h;
        let rhs = gns.pi(&p.form_a.gamma_alg(&a), &(&w * &c * &w));
        assert!(dist(&lhs, &rhs) <= 1e-9, "h implements γ ⊙ γ̃");
    }

    #[test]
    fn fermionic_gram_matches_the_twisted_representation() {
        let p = qubit_plan(84);
        let gns = GnsSpace::of_plan(&p).unwrap();
        let gf = fermionic_gram(&p).unwrap();
        assert!(min_eig(&herm_part(&gf)).unwrap() >= -1e-10, "graded ⇒ PSD");
        let units_a = p.form_a.matrix_units();
        let units_c = p.form_b.matrix_units();
        // Vectors π^F(unit)Ω; their Gram must equal the signed table Gram.
        let mut vecs: Vec<CVec> = Vec::new();
        for a in &units_a {
            for c in &units_c {
                let op = gns.pi_fermionic(a, c).unwrap();
                vecs.push(op * &gns.omega);
            }
        }
        for (i, vi) in vecs.iter().enumerate() {
            for (j, vj) in vecs.iter().enumerate() {
                let ip = (vi.adjoint() * vj)[(0, 0)];
                assert!(
                    (ip - gf[(i, j)]).norm() <= 1e-10,
                    "entry ({i},{j}): {ip} vs {}",
                    gf[(i, j)]
                );
            }
        }
    }

    #[test]
    fn fermionic_representation_is_a_graded_homomorphism() {
        let p = qubit_plan(85);
        let gns = GnsSpace::of_plan(&p).unwrap();
        let units = p.form_a.matrix_units();
        // Parities of qubit matrix units under σ_z: e_00,e_11 even; e_01,e_10 odd.
        let par = [0usize, 1, 1, 0];
        for (ia, a) in units.iter().enumerate() {
            for (ic, c) in units.iter().enumerate() {
                for (ja, a2) in units.iter().enumerate() {
                    for (jc, c2) in units.iter().enumerate() {
                        let lhs = gns.pi_fermionic(a, c).unwrap()
                            * gns.pi_fermionic(a2, c2).unwrap();
                        let sign = if par[ic] * par[ja] == 1 { -1.0 } else { 1.0 };
                        let rhs = gns
                            .pi_fermionic(&(a * a2), &(c * c2))
                            .unwrap()
                            .scale(sign);
                        assert!(
                            dist(&lhs, &rhs) <= 1e-9,
                            "a={ia} c={ic} a2={ja} c2={jc}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn nongraded_plans_fail_fermionic_positivity() {
        // Conjugation by a generic (non-homogeneous) unitary with tracial
        // states: admitted as a plan, but not graded, and the fermionic
        // pairing is not positive.
        let mut rng = rng_from_seed(86);
        let f = StandardForm::new(2, sigma_z()).unwrap();
        let v = random_unitary(&mut rng, 2);
        let e = Channel::from_conjugation(&v);
        let rho = identity(2).scale(0.5);
        let p = TransportPlan::from_channel(e, f.clone(), f.clone(), rho.clone(), rho).unwrap();
        assert!(!p.tags.graded);
        let gf = fermionic_gram(&p).unwrap();
        let lo = min_eig(&herm_part(&gf)).unwrap();
        assert!(lo < -1e-3, "expected a clearly negative eigenvalue, got {lo}");
    }

    #[test]
    fn eta_twisted_second_leg_commutes_with_the_first() {
        let p = qubit_plan(87);
        let gns = GnsSpace::of_plan(&p).unwrap();
        let mut rng = rng_from_seed(870);
        for _ in 0..4 {
            let a = random_hermitian(&mut rng, 2);
            let c = random_hermitian(&mut rng, 2);
            let first = gns.pi_fermionic(&a, &identity(2)).unwrap();
            let second = gns.pi_fermionic(&identity(2), &c).unwrap();
            for twisted in [gns.eta_half(&second), gns.eta_half_inv(&second)] {
                assert!(
                    dist(&(&first * &twisted), &(&twisted * &first)) <= 1e-9,
                    "η^{{±1/2}}-twisted second-leg operators commute plainly"
                );
            }
        }
        // The untwisted legs supercommute with the graded sign.
        let units = p.form_a.matrix_units();
        let par = [0usize, 1, 1, 0];
        for (ia, a) in units.iter().enumerate() {
            for (ic, c) in units.iter().enumerate() {
                let first = gns.pi_fermionic(a, &identity(2)).unwrap();
                let second = gns.pi_fermionic(&identity(2), c).unwrap();
                let sign = if par[ia] * par[ic] == 1 { -1.0 } else { 1.0 };
                assert!(
                    dist(&(&second * &first), &(&first * &second).scale(sign)) <= 1e-9,
                    "units {ia},{ic}"
                );
            }
        }
    }

    #[test]
    fn representation_transform_round_trips() {
        let p = qubit_plan(88);
        let gns = GnsSpace::of_plan(&p).unwrap();
        let mut rng = rng_from_seed(880);
        let a = random_hermitian(&mut rng, 2);
        let c = random_hermitian(&mut rng, 2);
        let rebuilt = gns.usual_from_fermionic(&a, &c).unwrap();
        assert!(dist(&rebuilt, &gns.pi(&a, &c)) <= 1e-10);
    }

    #[test]
    fn second_leg_embedding_is_isometric() {
        let p = qubit_plan(89);
        let gns = GnsSpace::of_plan(&p).unwrap();
        let u = gns.u_nu();
        assert!(dist(&(u.adjoint() * u), &identity(4)) <= 1e-10);
        let pn = gns.p_nu();
        assert!(dist(&(&pn * &pn), &pn) <= 1e-10);
        assert!(dist(&pn, &pn.adjoint()) <= 1e-10);
    }

    #[test]
    fn extracted_channel_matches_the_witness() {
        for seed in [90, 91] {
            let p = qubit_plan(seed);
            let gns = GnsSpace::of_plan(&p).unwrap();
            let e = gns.extract_channel().unwrap();
            assert!(dist(&e.sup, &p.channel.sup) <= 1e-8);
            // The compression acts exactly as E(a) ⊗ I.
            let mut rng = rng_from_seed(seed * 10);
            let a = random_hermitian(&mut rng, 2);
            let t_a = gns.u_nu().adjoint() * gns.pi(&a, &identity(2)) * gns.u_nu();
            let structured = kron(&p.channel.apply(&a), &identity(2));
            assert!(dist(&t_a, &structured) <= 1e-9);
        }
    }

    #[test]
    fn cost_norm_form_equals_the_algebraic_cost() {
        let p = qubit_plan(92);
        let gns = GnsSpace::of_plan(&p).unwrap();
        let mut rng = rng_from_seed(920);
        let coords_a: Vec<CMat> = (0..3).map(|_| random_hermitian(&mut rng, 2)).collect();
        let coords_b: Vec<CMat> = (0..3).map(|_| random_hermitian(&mut rng, 2)).collect();
        let norm_form = gns.cost_norm_form(&coords_a, &coords_b).unwrap();
        let mut algebraic = 0.0;
        for (k, l) in coords_a.iter().zip(&coords_b) {
            let mu_part = trace(&(&p.rho_mu * k.adjoint() * k)).re;
            let nu_part = trace(&(&p.rho_nu * l.adjoint() * l)).re;
            let cross = trace(&(&p.rho_nu * p.channel.apply(k).adjoint() * l)).re;
            algebraic += mu_part + nu_part - 2.0 * cross;
        }
        assert!(
            (norm_form - algebraic).abs() <= 1e-8,
            "{norm_form} vs {algebraic}"
        );
    }

    #[test]
    fn non_positive_grams_are_rejected() {
        let p = qubit_plan(93);
        let mut gram = usual_gram(&p);
        gram[(0, 0)] = cr(-1.0);
        let res = GnsSpace::from_gram(gram, &p);
        assert!(matches!(res, Err(Error::NotAPlan(_))), "got {res:?}");
    }
}
