//! Transport plans between graded systems.
//!
//! A plan pairs two standard-form algebras with faithful even states through
//! a channel witness `E: A → B` that is unital, completely positive and
//! state-compatible (`ν∘E = μ`). Its bilinear evaluation table lives on the
//! second factor's representation space and can be read in two pictures:
//! against the plain commutant `I⊗c` (the *commutant* picture) or against
//! the twisted commutant `g^{1/2}(I⊗c)g^{−1/2}` (the *fermionic* picture).
//! Both pictures are parametrized by the same channel, which is what makes
//! the correspondence between them a bijection.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::mat::{
    conj, dist, herm_part, inv, kron, min_eig, sqrtm_psd, trace, vec_mat, C, CMat,
};
use crate::rng::{random_even_cp_unital, random_even_faithful_state};
use crate::standard_form::StandardForm;
use crate::system::GradedSystem;
use rand_chacha::ChaCha8Rng;

/// Evaluation picture of a plan (which commutant the second factor uses).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    /// Second factor embedded as `I ⊗ c`.
    Commutant,
    /// Second factor embedded as `g^{1/2} (I ⊗ c) g^{−1/2}`.
    Twisted,
}

/// Which admissibility classes a plan belongs to. `plain`, `graded`,
/// `fermionic` and `modular` are decided from the plan data alone;
/// `kms` needs dynamics and is set by [`TransportPlan::check_balance`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassTags {
    /// Unital completely positive state-compatible channel witness.
    pub plain: bool,
    /// The channel intertwines the grading automorphisms.
    pub graded: bool,
    /// Graded with even states on both legs, so the twisted pairing is
    /// positive on the graded product.
    pub fermionic: bool,
    /// The channel intertwines the modular generators `[log ρ, ·]`.
    pub modular: bool,
    /// The channel intertwines the KMS duals of all named dynamics.
    pub kms: bool,
}

/// Tolerance below which the tag residuals count as exact memberships.
pub const TAG_TOL: f64 = 1e-7;

/// Tolerance used by [`TransportPlan::check_balance`] reports.
pub const BALANCE_TOL: f64 = 1e-7;

const ADMIT_UNITAL: f64 = 1e-8;
const ADMIT_CP: f64 = 1e-8;
const ADMIT_STATE: f64 = 1e-6;

/// A transport plan between `(A, μ)` and `(B, ν)`, stored through its
/// channel witness `E: A → B`.
#[derive(Clone, Debug)]
pub struct TransportPlan {
    pub form_a: StandardForm,
    pub form_b: StandardForm,
    pub rho_mu: CMat,
    pub rho_nu: CMat,
    /// Heisenberg channel `E: M_n → M_m` with `ν∘E = μ`.
    pub channel: Channel,
    pub picture: Picture,
    pub tags: ClassTags,
    sqrt_mu: CMat,
    sqrt_nu: CMat,
}

/// Raw evaluation table of a plan: entry `(i·n+j, k·m+l)` is the pairing of
/// the matrix units `e_ij` (first factor) and `e_kl` (second factor's
/// carrier coordinate), in the picture recorded by `fermionic`.
#[derive(Clone, Debug)]
pub struct RawPlanTable {
    pub values: CMat,
    pub fermionic: bool,
}

/// Residuals of the intertwining relations a plan's channel must satisfy
/// against a pair of systems: one row per named dynamics map, the modular
/// generator, and one row per KMS-dual dynamics map.
#[derive(Clone, Debug)]
pub struct BalanceReport {
    pub dynamics: Vec<(String, f64)>,
    pub modular: f64,
    pub kms: Vec<(String, f64)>,
    pub tol: f64,
}

impl BalanceReport {
    /// All named dynamics intertwined.
    pub fn balanced(&self) -> bool {
        self.dynamics.iter().all(|(_, r)| *r <= self.tol)
    }

    /// Dynamics and modular generators intertwined.
    pub fn modular_balanced(&self) -> bool {
        self.balanced() && self.modular <= self.tol
    }

    /// Dynamics, modular generators and KMS-dual dynamics intertwined.
    pub fn kms_balanced(&self) -> bool {
        self.modular_balanced() && self.kms.iter().all(|(_, r)| *r <= self.tol)
    }
}

fn compute_tags(
    channel: &Channel,
    form_a: &StandardForm,
    form_b: &StandardForm,
    rho_mu: &CMat,
    rho_nu: &CMat,
) -> Result<ClassTags> {
    let graded = channel.even_residual(&form_a.u, &form_b.u) <= TAG_TOL;
    let ad_a = GradedSystem::modular_generator_of(rho_mu)?;
    let ad_b = GradedSystem::modular_generator_of(rho_nu)?;
    let modular = dist(&(&channel.sup * ad_a), &(ad_b * &channel.sup)) <= TAG_TOL;
    Ok(ClassTags {
        plain: true,
        // Both states are even by construction (the state check enforces
        // it), so gradedness of the channel is also the fermionic property.
        graded,
        fermionic: graded,
        modular,
        kms: false,
    })
}

impl TransportPlan {
    /// Admit a channel as a transport plan between `(A, μ)` and `(B, ν)`,
    /// starting in the commutant picture.
    pub fn from_channel(
        channel: Channel,
        form_a: StandardForm,
        form_b: StandardForm,
        rho_mu: CMat,
        rho_nu: CMat,
    ) -> Result<Self> {
        if channel.n_in != form_a.n || channel.n_out != form_b.n {
            return Err(Error::Dimension(
                "channel dimensions do not match the algebra pair".into(),
            ));
        }
        form_a.check_state(&rho_mu)?;
        form_b.check_state(&rho_nu)?;
        let uni = channel.unital_residual();
        if uni > ADMIT_UNITAL {
            return Err(Error::NotUnital { residual: uni });
        }
        let herm = channel.herm_preserving_residual();
        if herm > ADMIT_CP {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let defect = channel.cp_defect();
        if defect > ADMIT_CP {
            return Err(Error::NotCompletelyPositive { defect });
        }
        let state = channel.state_residual(&rho_mu, &rho_nu);
        if state > ADMIT_STATE {
            return Err(Error::StateMismatch { residual: state });
        }
        let tags = compute_tags(&channel, &form_a, &form_b, &rho_mu, &rho_nu)?;
        let sqrt_mu = sqrtm_psd(&rho_mu)?;
        let sqrt_nu = sqrtm_psd(&rho_nu)?;
        Ok(Self {
            form_a,
            form_b,
            rho_mu,
            rho_nu,
            channel,
            picture: Picture::Commutant,
            tags,
            sqrt_mu,
            sqrt_nu,
        })
    }

    pub fn n(&self) -> usize {
        self.form_a.n
    }

    pub fn m(&self) -> usize {
        self.form_b.n
    }

    pub fn sqrt_mu(&self) -> &CMat {
        &self.sqrt_mu
    }

    pub fn sqrt_nu(&self) -> &CMat {
        &self.sqrt_nu
    }

    /// Pairing in the current picture.
    pub fn eval(&self, a: &CMat, c: &CMat) -> C {
        match self.picture {
            Picture::Commutant => self.usual_eval(a, c),
            Picture::Twisted => self.fermionic_eval(a, c),
        }
    }

    /// `⟨Λ_ν, E(a)·(I⊗c)·Λ_ν⟩ = Tr(ρ_ν^{1/2} E(a) ρ_ν^{1/2} cᵀ)`.
    pub fn usual_eval(&self, a: &CMat, c: &CMat) -> C {
        let img = self.channel.apply(a);
        trace(&(&self.sqrt_nu * img * &self.sqrt_nu * c.transpose()))
    }

    /// `⟨Λ_ν, E(a)·g^{1/2}(I⊗c)g^{−1/2}·Λ_ν⟩`, evaluated through the Klein
    /// square root of the second factor's grading.
    pub fn fermionic_eval(&self, a: &CMat, c: &CMat) -> C {
        let img = self.channel.apply(a);
        let w = self.form_b.klein_apply_mat(&(&self.sqrt_nu * img));
        trace(&(w * &self.sqrt_nu * c.transpose()))
    }

    /// Full matrix-unit evaluation table in the commutant picture.
    pub fn usual_table(&self) -> CMat {
        table_of_channel(&self.channel, &self.form_b, &self.sqrt_nu, false)
    }

    /// Full matrix-unit evaluation table in the fermionic picture.
    pub fn fermionic_table(&self) -> CMat {
        table_of_channel(&self.channel, &self.form_b, &self.sqrt_nu, true)
    }

    /// Table in the current picture.
    pub fn eval_table(&self) -> CMat {
        match self.picture {
            Picture::Commutant => self.usual_table(),
            Picture::Twisted => self.fermionic_table(),
        }
    }

    /// Current-picture table together with its picture flag.
    pub fn raw_table(&self) -> RawPlanTable {
        RawPlanTable {
            values: self.eval_table(),
            fermionic: self.picture == Picture::Twisted,
        }
    }

    /// Largest deviations of the table marginals from `(μ, ν)`:
    /// first component against `μ(e_ij)`, second against the commutant
    /// state `Tr(conj(ρ_ν) e_kl)`. The marginal values agree between the
    /// two pictures because the grading fixes the state vector.
    pub fn marginal_residuals(&self) -> (f64, f64) {
        table_marginal_residuals(
            &self.eval_table(),
            self.n(),
            self.m(),
            &self.rho_mu,
            &self.rho_nu,
        )
    }

    /// Deviation from the graded balance identity
    /// `ω(γ(a) ⊗ c) = ω(a ⊗ γ̃(c))`, where `γ̃` conjugates the carrier by
    /// `conj(u_b)`; zero for every plan with an even channel witness.
    pub fn grading_balance_residual(&self) -> f64 {
        let t = self.fermionic_table();
        let ga = kron(&self.form_a.u, &self.form_a.u.transpose());
        let w = conj(&self.form_b.u);
        let gb = kron(&w, &w.transpose());
        dist(&(ga.transpose() * &t), &(&t * gb))
    }

    /// Switch to the fermionic picture. Requires a graded plan: the
    /// usual↔fermionic correspondence keeps the channel and only changes
    /// which commutant the second factor is read in.
    pub fn to_fermionic(&self) -> Result<Self> {
        if !self.tags.graded {
            return Err(Error::NotEven {
                residual: self
                    .channel
                    .even_residual(&self.form_a.u, &self.form_b.u),
            });
        }
        let mut p = self.clone();
        p.picture = Picture::Twisted;
        Ok(p)
    }

    /// Switch to the commutant picture (always possible).
    pub fn to_usual(&self) -> Self {
        let mut p = self.clone();
        p.picture = Picture::Commutant;
        p
    }

    /// Commutant-dual plan between the commutant systems
    /// `(B′, ν′)` and `(A′, μ′)` in carrier coordinates: gradings and state
    /// densities conjugate entrywise, the channel becomes its dual.
    pub fn plan_dual(&self) -> Result<Self> {
        self.dual_like(false)
    }

    /// Twist-dual plan between `(B^≀, ν^≀)` and `((A^≀)^≀, μ^≀)` in carrier
    /// coordinates; same carrier data as [`TransportPlan::plan_dual`] but
    /// read in the fermionic picture, and admissible only for graded plans.
    /// Applying it twice restores the original plan.
    pub fn plan_twisted(&self) -> Result<Self> {
        self.dual_like(true)
    }

    fn dual_like(&self, twisted: bool) -> Result<Self> {
        let d = if twisted {
            self.channel.twisted_dual_carrier(
                &self.form_a.u,
                &self.form_b.u,
                &self.rho_mu,
                &self.rho_nu,
            )?
        } else {
            self.channel.dual_carrier(&self.rho_mu, &self.rho_nu)?
        };
        let fa = StandardForm::new(self.form_b.n, conj(&self.form_b.u))?;
        let fb = StandardForm::new(self.form_a.n, conj(&self.form_a.u))?;
        let mut p = TransportPlan::from_channel(
            d,
            fa,
            fb,
            conj(&self.rho_nu),
            conj(&self.rho_mu),
        )?;
        p.picture = if twisted {
            Picture::Twisted
        } else {
            Picture::Commutant
        };
        Ok(p)
    }

    /// KMS-reflected plan: endpoints swapped, channel replaced by its KMS
    /// dual `E^σ: B → A`.
    pub fn plan_kms(&self) -> Result<Self> {
        let e_sigma = self.channel.kms_dual(&self.rho_mu, &self.rho_nu)?;
        let mut p = TransportPlan::from_channel(
            e_sigma,
            self.form_b.clone(),
            self.form_a.clone(),
            self.rho_nu.clone(),
            self.rho_mu.clone(),
        )?;
        p.picture = self.picture;
        Ok(p)
    }

    /// Evaluation of the twist-dual pairing in the *original* representation
    /// space: the first slot takes the carrier coordinate `c` of a twisted
    /// commutant element of the second factor, the second slot an element
    /// `a` of the first algebra, and the value is
    /// `⟨Λ_μ, φ^≀(D(c)) · (a⊗I) · Λ_μ⟩` with `D` the dual carrier channel.
    pub fn twisted_eval_element(&self, c_b: &CMat, a: &CMat) -> Result<C> {
        let d = self.channel.twisted_dual_carrier(
            &self.form_a.u,
            &self.form_b.u,
            &self.rho_mu,
            &self.rho_nu,
        )?;
        let m = d.apply(c_b);
        let t1 = a * &self.sqrt_mu;
        let t2 = self.form_a.klein_apply_mat_inv(&t1);
        let t3 = t2 * m.transpose();
        let t4 = self.form_a.klein_apply_mat(&t3);
        Ok(trace(&(&self.sqrt_mu * t4)))
    }

    /// Intertwining residuals of the plan's channel against two systems
    /// sharing dynamics names; updates the `kms` tag.
    pub fn check_balance(
        &mut self,
        sys_a: &GradedSystem,
        sys_b: &GradedSystem,
    ) -> Result<BalanceReport> {
        if sys_a.n() != self.n()
            || sys_b.n() != self.m()
            || dist(&sys_a.form.u, &self.form_a.u) > 1e-9
            || dist(&sys_b.form.u, &self.form_b.u) > 1e-9
            || dist(&sys_a.rho, &self.rho_mu) > 1e-9
            || dist(&sys_b.rho, &self.rho_nu) > 1e-9
        {
            return Err(Error::Config(
                "plan endpoints do not match the given systems".into(),
            ));
        }
        if !sys_a.same_index_names(sys_b) {
            return Err(Error::Config(
                "systems do not share dynamics names and coordinate counts".into(),
            ));
        }
        let e = &self.channel.sup;
        let mut dynamics = Vec::with_capacity(sys_a.dynamics.len());
        let mut kms = Vec::with_capacity(sys_a.dynamics.len());
        for (na, nb) in sys_a.dynamics.iter().zip(&sys_b.dynamics) {
            let r = dist(&(e * &na.map.sup), &(&nb.map.sup * e));
            dynamics.push((na.name.clone(), r));
            let a_sigma = na.map.kms_dual(&sys_a.rho, &sys_a.rho)?;
            let b_sigma = nb.map.kms_dual(&sys_b.rho, &sys_b.rho)?;
            let rk = dist(&(e * &a_sigma.sup), &(&b_sigma.sup * e));
            kms.push((na.name.clone(), rk));
        }
        let ad_a = sys_a.modular_generator_sup()?;
        let ad_b = sys_b.modular_generator_sup()?;
        let modular = dist(&(e * ad_a), &(ad_b * e));
        let report = BalanceReport {
            dynamics,
            modular,
            kms,
            tol: BALANCE_TOL,
        };
        self.tags.kms = report.kms_balanced();
        Ok(report)
    }
}

fn table_of_channel(
    channel: &Channel,
    form_b: &StandardForm,
    sqrt_nu: &CMat,
    fermionic: bool,
) -> CMat {
    let n = channel.n_in;
    let m = channel.n_out;
    let mut t = CMat::zeros(n * n, m * m);
    let mut e = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            e[(i, j)] = C::new(1.0, 0.0);
            let img = channel.apply(&e);
            e[(i, j)] = C::new(0.0, 0.0);
            let w = sqrt_nu * img;
            let core = if fermionic {
                form_b.klein_apply_mat(&w) * sqrt_nu
            } else {
                w * sqrt_nu
            };
            t.row_mut(i * n + j).copy_from(&vec_mat(&core).transpose());
        }
    }
    t
}

fn table_marginal_residuals(
    t: &CMat,
    n: usize,
    m: usize,
    rho_mu: &CMat,
    rho_nu: &CMat,
) -> (f64, f64) {
    let mut first: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s: C = (0..m).map(|k| t[(i * n + j, k * m + k)]).sum();
            first = first.max((s - rho_mu[(j, i)]).norm());
        }
    }
    let nu_comm = conj(rho_nu);
    let mut second: f64 = 0.0;
    for k in 0..m {
        for l in 0..m {
            let s: C = (0..n).map(|i| t[(i * n + i, k * m + l)]).sum();
            second = second.max((s - nu_comm[(l, k)]).norm());
        }
    }
    (first, second)
}

/// Recover the channel witness from a raw evaluation table. Fails with
/// [`Error::NotAPlan`] when the table's marginals do not match the states or
/// when the table is not the pairing table of any channel.
pub fn channel_from_raw(
    raw: &RawPlanTable,
    form_a: &StandardForm,
    form_b: &StandardForm,
    rho_mu: &CMat,
    rho_nu: &CMat,
) -> Result<Channel> {
    let n = form_a.n;
    let m = form_b.n;
    if raw.values.shape() != (n * n, m * m) {
        return Err(Error::Dimension("plan table has wrong dimensions".into()));
    }
    let scale = 1.0 + raw.values.norm();
    let (first, second) = table_marginal_residuals(&raw.values, n, m, rho_mu, rho_nu);
    if first > 1e-8 * scale {
        return Err(Error::NotAPlan(format!(
            "first-factor marginal deviates from μ by {first:.3e}"
        )));
    }
    if second > 1e-8 * scale {
        return Err(Error::NotAPlan(format!(
            "second-factor marginal deviates from ν by {second:.3e}"
        )));
    }
    let x = sqrtm_psd(rho_nu)?;
    let xi = inv(&x)?;
    let mut sup = CMat::zeros(m * m, n * n);
    for r in 0..n * n {
        let core = CMat::from_fn(m, m, |k, l| raw.values[(r, k * m + l)]);
        let img = if raw.fermionic {
            &xi * form_b.klein_apply_mat_inv(&(&core * &xi))
        } else {
            &xi * core * &xi
        };
        sup.column_mut(r).copy_from(&vec_mat(&img));
    }
    let channel = Channel::from_superop(sup, n, m)?;
    let rebuilt = table_of_channel(&channel, form_b, &x, raw.fermionic);
    let residual = dist(&rebuilt, &raw.values) / scale;
    if residual > 1e-8 {
        return Err(Error::NotAPlan(format!(
            "table is not the pairing table of a channel (residual {residual:.3e})"
        )));
    }
    Ok(channel)
}

/// Full plan admission from a raw table: recover the channel, then admit it
/// in the picture the table was given in.
pub fn plan_from_raw(
    raw: &RawPlanTable,
    form_a: &StandardForm,
    form_b: &StandardForm,
    rho_mu: &CMat,
    rho_nu: &CMat,
) -> Result<TransportPlan> {
    let channel = channel_from_raw(raw, form_a, form_b, rho_mu, rho_nu)?;
    let plan = TransportPlan::from_channel(
        channel,
        form_a.clone(),
        form_b.clone(),
        rho_mu.clone(),
        rho_nu.clone(),
    )?;
    if raw.fermionic {
        plan.to_fermionic()
    } else {
        Ok(plan)
    }
}

/// Identity coupling of a system with itself (channel witness `id`). Lies in
/// every dynamics-free class.
pub fn diagonal_plan(form: &StandardForm, rho: &CMat) -> Result<TransportPlan> {
    TransportPlan::from_channel(
        Channel::identity(form.n),
        form.clone(),
        form.clone(),
        rho.clone(),
        rho.clone(),
    )
}

/// Product coupling `μ ⊗ ν` (channel witness `a ↦ μ(a)·I`). Balances every
/// pair of matched state-preserving dynamics, so it is admissible in all
/// classes.
pub fn product_plan(
    form_a: &StandardForm,
    form_b: &StandardForm,
    rho_mu: &CMat,
    rho_nu: &CMat,
) -> Result<TransportPlan> {
    TransportPlan::from_channel(
        Channel::product_channel(rho_mu, form_b.n),
        form_a.clone(),
        form_b.clone(),
        rho_mu.clone(),
        rho_nu.clone(),
    )
}

/// Convex combination of two plans with identical endpoints; the channel
/// witness (hence the evaluation table) mixes linearly.
pub fn mix_plans(lam: f64, p: &TransportPlan, q: &TransportPlan) -> Result<TransportPlan> {
    if !(0.0..=1.0).contains(&lam) {
        return Err(Error::Config("mixing weight must lie in [0,1]".into()));
    }
    if dist(&p.form_a.u, &q.form_a.u) > 1e-12
        || dist(&p.form_b.u, &q.form_b.u) > 1e-12
        || dist(&p.rho_mu, &q.rho_mu) > 1e-9
        || dist(&p.rho_nu, &q.rho_nu) > 1e-9
    {
        return Err(Error::Config("plans have different endpoints".into()));
    }
    let sup = p.channel.sup.scale(lam) + q.channel.sup.scale(1.0 - lam);
    let mut mixed = TransportPlan::from_channel(
        Channel::from_superop(sup, p.n(), p.m())?,
        p.form_a.clone(),
        p.form_b.clone(),
        p.rho_mu.clone(),
        p.rho_nu.clone(),
    )?;
    mixed.picture = p.picture;
    Ok(mixed)
}

/// Random graded plan between the given forms: draws an even faithful state
/// on the second factor and an even CP unital channel, then takes the first
/// factor's state to be the pulled-back marginal (resampling until it is
/// comfortably faithful).
pub fn random_graded_plan(
    rng: &mut ChaCha8Rng,
    form_a: &StandardForm,
    form_b: &StandardForm,
) -> Result<TransportPlan> {
    for _ in 0..100 {
        let rho_nu = random_even_faithful_state(rng, &form_b.u, 0.08);
        let e = random_even_cp_unital(rng, &form_a.u, &form_b.u, 4);
        let pulled = herm_part(&e.pull_state(&rho_nu));
        let t = trace(&pulled).re;
        let rho_mu = pulled.scale(1.0 / t);
        if min_eig(&rho_mu)? < 1e-3 {
            continue;
        }
        return TransportPlan::from_channel(
            e,
            form_a.clone(),
            form_b.clone(),
            rho_mu,
            rho_nu,
        );
    }
    Err(Error::Config(
        "could not draw a faithful pulled-back marginal".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{modular_dynamics_map, qubit_system, sigma_z};
    use crate::mat::{cr, identity};
    use crate::rng::{random_even_faithful_state, rng_from_seed};
    use crate::standard_form::StandardForm;
    use crate::system::{GradedSystem, NamedMap};

    fn m3_grading() -> CMat {
        CMat::from_diagonal(&crate::mat::CVec::from_vec(vec![
            cr(1.0),
            cr(-1.0),
            cr(-1.0),
        ]))
    }

    fn qubit_forms() -> (StandardForm, StandardForm) {
        (
            StandardForm::new(2, sigma_z()).unwrap(),
            StandardForm::new(2, sigma_z()).unwrap(),
        )
    }

    #[test]
    fn diagonal_plan_is_fully_tagged() {
        let mut rng = rng_from_seed(60);
        let form = StandardForm::new(2, sigma_z()).unwrap();
        let rho = random_even_faithful_state(&mut rng, &form.u, 0.1);
        let p = diagonal_plan(&form, &rho).unwrap();
        assert!(p.tags.plain && p.tags.graded && p.tags.fermionic && p.tags.modular);
        assert!(!p.tags.kms);
        let (m1, m2) = p.marginal_residuals();
        assert!(m1 <= 1e-10 && m2 <= 1e-10, "marginals {m1} {m2}");
        assert!(p.grading_balance_residual() <= 1e-12);
    }

    #[test]
    fn product_plan_balances_every_matched_dynamics() {
        let mut rng = rng_from_seed(61);
        let fa = StandardForm::new(2, sigma_z()).unwrap();
        let fb = StandardForm::new(3, m3_grading()).unwrap();
        let rho_mu = random_even_faithful_state(&mut rng, &fa.u, 0.1);
        let rho_nu = random_even_faithful_state(&mut rng, &fb.u, 0.1);
        let mut p = product_plan(&fa, &fb, &rho_mu, &rho_nu).unwrap();
        assert!(p.tags.modular, "product plan intertwines modular generators");
        let (m1, m2) = p.marginal_residuals();
        assert!(m1 <= 1e-10 && m2 <= 1e-10);

        let sys_a = GradedSystem::new(
            fa,
            rho_mu.clone(),
            vec![NamedMap::new(
                "alpha",
                modular_dynamics_map(&rho_mu, 0.4).unwrap(),
            )],
            vec![crate::examples::sigma_x()],
        )
        .unwrap();
        let k_b = {
            let mut k = CMat::zeros(3, 3);
            k[(0, 1)] = cr(1.0);
            k[(1, 0)] = cr(1.0);
            k
        };
        let sys_b = GradedSystem::new(
            StandardForm::new(3, m3_grading()).unwrap(),
            rho_nu.clone(),
            vec![NamedMap::new(
                "alpha",
                modular_dynamics_map(&rho_nu, -0.7).unwrap(),
            )],
            vec![k_b],
        )
        .unwrap();
        let report = p.check_balance(&sys_a, &sys_b).unwrap();
        assert!(report.balanced(), "dynamics rows: {:?}", report.dynamics);
        assert!(report.modular_balanced(), "modular row: {}", report.modular);
        assert!(report.kms_balanced(), "kms rows: {:?}", report.kms);
        assert!(p.tags.kms);
    }

    #[test]
    fn tables_round_trip_in_both_pictures() {
        let mut rng = rng_from_seed(62);
        let fa = StandardForm::new(2, sigma_z()).unwrap();
        let fb = StandardForm::new(3, m3_grading()).unwrap();
        let p = random_graded_plan(&mut rng, &fa, &fb).unwrap();

        let raw_u = RawPlanTable {
            values: p.usual_table(),
            fermionic: false,
        };
        let e_u = channel_from_raw(&raw_u, &fa, &fb, &p.rho_mu, &p.rho_nu).unwrap();
        assert!(dist(&e_u.sup, &p.channel.sup) <= 1e-9);

        let raw_f = RawPlanTable {
            values: p.fermionic_table(),
            fermionic: true,
        };
        let e_f = channel_from_raw(&raw_f, &fa, &fb, &p.rho_mu, &p.rho_nu).unwrap();
        assert!(dist(&e_f.sup, &p.channel.sup) <= 1e-9);

        let pf = plan_from_raw(&raw_f, &fa, &fb, &p.rho_mu, &p.rho_nu).unwrap();
        assert_eq!(pf.picture, Picture::Twisted);
    }

    #[test]
    fn picture_switch_fixes_the_channel_and_tables() {
        let mut rng = rng_from_seed(63);
        let (fa, fb) = qubit_forms();
        let p = random_graded_plan(&mut rng, &fa, &fb).unwrap();
        let round = p.to_fermionic().unwrap().to_usual();
        assert_eq!(dist(&round.channel.sup, &p.channel.sup), 0.0);
        assert_eq!(dist(&round.usual_table(), &p.usual_table()), 0.0);
        assert_eq!(dist(&round.fermionic_table(), &p.fermionic_table()), 0.0);
    }

    #[test]
    fn random_plans_have_exact_marginals_and_graded_balance() {
        let fa = StandardForm::new(2, sigma_z()).unwrap();
        let fb3 = StandardForm::new(3, m3_grading()).unwrap();
        for seed in 64..74 {
            let mut rng = rng_from_seed(seed);
            let p = if seed % 2 == 0 {
                random_graded_plan(&mut rng, &fa, &fb3).unwrap()
            } else {
                random_graded_plan(&mut rng, &fa, &fa).unwrap()
            };
            let (m1, m2) = p.marginal_residuals();
            assert!(m1 <= 1e-10 && m2 <= 1e-10, "seed {seed}: {m1} {m2}");
            assert!(
                p.grading_balance_residual() <= 1e-10,
                "seed {seed}: balance {}",
                p.grading_balance_residual()
            );
            assert!(p.tags.graded && p.tags.fermionic);
        }
        // A generic random plan does not intertwine the modular generators.
        let mut rng = rng_from_seed(64);
        let p = random_graded_plan(&mut rng, &fa, &fb3).unwrap();
        assert!(!p.tags.modular);
    }

    #[test]
    fn twisted_evaluation_obeys_the_sign_rule() {
        let mut rng = rng_from_seed(65);
        let (fa, fb) = qubit_forms();
        let p = random_graded_plan(&mut rng, &fa, &fb).unwrap();

        // Homogeneous matrix units for the σ_z grading: parity of e_ij is
        // (i+j) mod 2 on both the algebra and the carrier side.
        let units = fa.matrix_units();
        for (ra, a) in units.iter().enumerate() {
            let pa = (ra / 2 + ra % 2) % 2;
            for (rc, c) in units.iter().enumerate() {
                let pc = (rc / 2 + rc % 2) % 2;
                let v1 = p.twisted_eval_element(c, a).unwrap();
                let sign = if pa * pc == 1 { -1.0 } else { 1.0 };
                let v2 = p.fermionic_eval(a, c) * cr(sign);
                assert!(
                    (v1 - v2).norm() <= 1e-10,
                    "units a={ra} c={rc}: {v1} vs {v2}"
                );
            }
        }

        // Four-term expansion on random (inhomogeneous) arguments.
        for _ in 0..5 {
            let a = crate::rng::random_hermitian(&mut rng, 2);
            let c = crate::rng::random_hermitian(&mut rng, 2);
            let w = conj(&fb.u);
            let c_p = (&c + &w * &c * &w).scale(0.5);
            let c_m = (&c - &w * &c * &w).scale(0.5);
            let a_p = fa.even_part(&a);
            let a_m = fa.odd_part(&a);
            let v1 = p.twisted_eval_element(&c, &a).unwrap();
            let v3 = p.fermionic_eval(&a_p, &c_p)
                + p.fermionic_eval(&a_p, &c_m)
                + p.fermionic_eval(&a_m, &c_p)
                - p.fermionic_eval(&a_m, &c_m);
            assert!((v1 - v3).norm() <= 1e-9, "{v1} vs {v3}");
        }
    }

    #[test]
    fn twisted_plan_matches_element_level_evaluation() {
        // The carrier realization of the twist-dual plan evaluates second-leg
        // elements through the grading automorphism: a ↦ carrier γ(a). The
        // unitary g^{1/2}·swap intertwines the two realizations.
        let mut rng = rng_from_seed(66);
        let (fa, fb) = qubit_forms();
        let p = random_graded_plan(&mut rng, &fa, &fb).unwrap();
        let ptw = p.plan_twisted().unwrap();
        assert_eq!(ptw.picture, Picture::Twisted);
        for _ in 0..5 {
            let a = crate::rng::random_hermitian(&mut rng, 2);
            let c = crate::rng::random_hermitian(&mut rng, 2);
            let v_elem = p.twisted_eval_element(&c, &a).unwrap();
            let v_carrier = ptw.fermionic_eval(&c, &fa.gamma_alg(&a));
            assert!(
                (v_elem - v_carrier).norm() <= 1e-9,
                "{v_elem} vs {v_carrier}"
            );
        }
    }

    #[test]
    fn double_twist_restores_the_plan() {
        let mut rng = rng_from_seed(67);
        let fa = StandardForm::new(2, sigma_z()).unwrap();
        let fb = StandardForm::new(3, m3_grading()).unwrap();
        let p = random_graded_plan(&mut rng, &fa, &fb).unwrap();
        let back = p.plan_twisted().unwrap().plan_twisted().unwrap();
        assert!(dist(&back.channel.sup, &p.channel.sup) <= 1e-9);
        assert!(dist(&back.form_a.u, &p.form_a.u) <= 1e-14);
        assert!(dist(&back.form_b.u, &p.form_b.u) <= 1e-14);
        assert!(dist(&back.rho_mu, &p.rho_mu) <= 1e-12);
        assert!(dist(&back.rho_nu, &p.rho_nu) <= 1e-12);
    }

    #[test]
    fn kms_reflection_is_involutive() {
        let mut rng = rng_from_seed(68);
        let fa = StandardForm::new(2, sigma_z()).unwrap();
        let fb = StandardForm::new(3, m3_grading()).unwrap();
        let p = random_graded_plan(&mut rng, &fa, &fb).unwrap();
        let refl = p.plan_kms().unwrap();
        assert_eq!(refl.n(), p.m());
        assert_eq!(refl.m(), p.n());
        let back = refl.plan_kms().unwrap();
        assert!(dist(&back.channel.sup, &p.channel.sup) <= 1e-8);
    }

    #[test]
    fn balance_transfers_to_the_twisted_side() {
        // System with modular dynamics; the dynamics map itself is a channel
        // witness that balances exactly (it commutes with itself, with the
        // modular generator, and its KMS dual composes to the identity from
        // both sides).
        let base = qubit_system(69);
        let alpha = modular_dynamics_map(&base.rho, 0.6).unwrap();
        let sys = GradedSystem::new(
            base.form.clone(),
            base.rho.clone(),
            vec![NamedMap::new("alpha", alpha.clone())],
            base.coords.clone(),
        )
        .unwrap();
        let mut p = TransportPlan::from_channel(
            alpha,
            sys.form.clone(),
            sys.form.clone(),
            sys.rho.clone(),
            sys.rho.clone(),
        )
        .unwrap();
        let report = p.check_balance(&sys, &sys).unwrap();
        assert!(report.kms_balanced(), "report: {report:?}");
        assert!(p.tags.kms && p.tags.modular);

        let mut ptw = p.plan_twisted().unwrap();
        let sys_tw = sys.twisted_dual_system().unwrap();
        let report_tw = ptw.check_balance(&sys_tw, &sys_tw).unwrap();
        assert!(report_tw.kms_balanced(), "twisted report: {report_tw:?}");
    }

    #[test]
    fn mixing_plans_is_linear_on_tables() {
        let mut rng = rng_from_seed(70);
        let (fa, fb) = qubit_forms();
        let p = random_graded_plan(&mut rng, &fa, &fb).unwrap();
        // Second plan with the same endpoints: precompose with modular flow
        // of μ (a μ-preserving automorphism keeps the pulled-back marginal).
        let sigma = modular_dynamics_map(&p.rho_mu, 0.9).unwrap();
        let q = TransportPlan::from_channel(
            p.channel.compose(&sigma).unwrap(),
            fa.clone(),
            fb.clone(),
            p.rho_mu.clone(),
            p.rho_nu.clone(),
        )
        .unwrap();
        let lam = 0.3;
        let mixed = mix_plans(lam, &p, &q).unwrap();
        let expect = p.fermionic_table().scale(lam) + q.fermionic_table().scale(1.0 - lam);
        assert!(dist(&mixed.fermionic_table(), &expect) <= 1e-12);
    }

    #[test]
    fn admission_rejects_bad_channels() {
        let form = StandardForm::new(2, sigma_z()).unwrap();
        let rho = identity(2).scale(0.5);

        // Transpose map: positive, unital, tracial-state compatible, not CP.
        let transpose = {
            let mut sup = CMat::zeros(4, 4);
            for i in 0..2 {
                for j in 0..2 {
                    sup[(j * 2 + i, i * 2 + j)] = cr(1.0);
                }
            }
            Channel::from_superop(sup, 2, 2).unwrap()
        };
        let res = TransportPlan::from_channel(
            transpose,
            form.clone(),
            form.clone(),
            rho.clone(),
            rho.clone(),
        );
        assert!(matches!(res, Err(Error::NotCompletelyPositive { .. })));

        // Shrunk identity: not unital.
        let shrunk = Channel::from_superop(identity(4).scale(0.9), 2, 2).unwrap();
        let res = TransportPlan::from_channel(
            shrunk,
            form.clone(),
            form.clone(),
            rho.clone(),
            rho.clone(),
        );
        assert!(matches!(res, Err(Error::NotUnital { .. })));

        // Identity channel with mismatched states.
        let mut rng = rng_from_seed(71);
        let other = random_even_faithful_state(&mut rng, &form.u, 0.1);
        let res = TransportPlan::from_channel(
            Channel::identity(2),
            form.clone(),
            form.clone(),
            other,
            rho,
        );
        assert!(matches!(res, Err(Error::StateMismatch { .. })));
    }

    #[test]
    fn corrupted_tables_are_rejected() {
        let mut rng = rng_from_seed(72);
        let (fa, fb) = qubit_forms();
        let p = random_graded_plan(&mut rng, &fa, &fb).unwrap();

        // Breaking a marginal-relevant entry fails table admission outright.
        let mut raw = p.raw_table();
        raw.values[(0, 0)] += cr(0.05);
        let res = channel_from_raw(&raw, &fa, &fb, &p.rho_mu, &p.rho_nu);
        assert!(matches!(res, Err(Error::NotAPlan(_))), "got {res:?}");

        // A marginal-preserving but Hermitian-symmetric corruption of the
        // interior recovers a channel that is no longer completely positive.
        let mut raw = p.raw_table();
        raw.values[(1, 2)] += cr(0.5);
        raw.values[(2, 1)] += cr(0.5);
        let res = plan_from_raw(&raw, &fa, &fb, &p.rho_mu, &p.rho_nu);
        assert!(
            matches!(res, Err(Error::NotCompletelyPositive { .. })),
            "got {res:?}"
        );

        // Without the symmetric partner the recovered map is not even
        // Hermiticity-preserving.
        let mut raw = p.raw_table();
        raw.values[(1, 2)] += cr(0.5);
        let res = plan_from_raw(&raw, &fa, &fb, &p.rho_mu, &p.rho_nu);
        assert!(matches!(res, Err(Error::NotHermitian { .. })), "got {res:?}");
    }
}
