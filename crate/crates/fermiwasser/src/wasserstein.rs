//! Quadratic transport distances between graded systems.
//!
//! The minimization runs over channel witnesses in Choi form: the variable
//! is the Choi matrix `X[(i·m+p),(j·m+q)] = E(e_ij)[p,q]`, complete
//! positivity is the PSD cone, and every other membership condition of the
//! plan classes — unitality, state transport, evenness, dynamics
//! intertwining, the modular generator, KMS-dual intertwining — is a linear
//! equality in `X`. The three classes are nested by construction: the
//! constraint stack for the plain class is a prefix of the modular class,
//! which is a prefix of the KMS class, so the distance values are
//! automatically monotone up to solver tolerance ([`wasserstein_chain`]
//! checks the numbers as well).
//!
//! The optimizer's iterate is projected back onto the exact constraint
//! affine space and PSD-clipped before it is admitted as a
//! [`TransportPlan`], and the reported distance is the exact cost of that
//! returned plan (the raw solver value is kept alongside and
//! cross-checked).

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::gns::GnsSpace;
use crate::mat::{conj, dist, herm_eig, herm_part, identity, kron, rank, trace, C, CMat};
use crate::plan::TransportPlan;
use crate::sdp::{SdpOptions, SdpProblem, SdpSolution, SdpStatus};
use crate::system::GradedSystem;

/// Which membership conditions the minimization enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportClass {
    /// Graded plans: unital, state transport, even.
    F,
    /// Additionally intertwines the modular generators.
    FSigma,
    /// Additionally intertwines the KMS duals of every named dynamics.
    FSigmaSigma,
}

impl TransportClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransportClass::F => "F",
            TransportClass::FSigma => "Fsigma",
            TransportClass::FSigmaSigma => "Fsigmasigma",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "F" => Ok(TransportClass::F),
            "Fsigma" => Ok(TransportClass::FSigma),
            "Fsigmasigma" => Ok(TransportClass::FSigmaSigma),
            other => Err(Error::Config(format!(
                "unknown transport class '{other}' (expected F, Fsigma or Fsigmasigma)"
            ))),
        }
    }
}

/// Cost of a plan between two coordinate-carrying systems.
#[derive(Clone, Debug)]
pub struct CostReport {
    /// `Σ_i [μ(k_i*k_i) + ν(l_i*l_i) − ν(E(k_i)*l_i) − ν(l_i*E(k_i))]`.
    pub value: f64,
    /// The summands above, one per coordinate.
    pub per_coordinate: Vec<f64>,
    /// The same quantity evaluated as `Σ_i ‖π(k_i⊙1)Ω − u_ν(l_i Λ_ν)‖²`
    /// in the plan's GNS space; agreement with `value` is enforced.
    pub norm_form: f64,
}

/// One distance computation: the value, the optimizing plan, its exact cost
/// and the solver diagnostics.
#[derive(Clone, Debug)]
pub struct DistanceResult {
    pub value: f64,
    pub plan: TransportPlan,
    pub report: CostReport,
    /// Raw solver objective (cost scale, before the plan projection).
    pub sdp_value: f64,
    pub status: SdpStatus,
    pub iterations: usize,
}

/// The three distances of one ordered pair, monotonicity enforced.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub f: DistanceResult,
    pub f_sigma: DistanceResult,
    pub f_sigma_sigma: DistanceResult,
}

/// Residuals of a candidate isomorphism extracted from a zero-cost plan.
#[derive(Clone, Debug)]
pub struct IsomorphismReport {
    /// `max ‖ι(xy) − ι(x)ι(y)‖` over matrix-unit pairs.
    pub multiplicativity: f64,
    pub evenness: f64,
    /// Worst intertwining defect over matched dynamics names.
    pub intertwining: f64,
    /// `max_i ‖ι(k_i) − l_i‖`.
    pub coordinate_match: f64,
}

impl IsomorphismReport {
    pub fn max_residual(&self) -> f64 {
        self.multiplicativity
            .max(self.evenness)
            .max(self.intertwining)
            .max(self.coordinate_match)
    }
}

fn check_comparable(sys_a: &GradedSystem, sys_b: &GradedSystem) -> Result<()> {
    if !sys_a.same_index_names(sys_b) {
        return Err(Error::Config(
            "systems must carry the same dynamics names".into(),
        ));
    }
    if sys_a.coord_count() != sys_b.coord_count() {
        return Err(Error::Config(
            "systems must have the same number of coordinates".into(),
        ));
    }
    Ok(())
}

/// Evaluate the cost of a plan whose endpoints are the two systems' states,
/// and cross-check it against the GNS vector-norm form (agreement `≤ 1e-8`).
pub fn cost(sys_a: &GradedSystem, sys_b: &GradedSystem, plan: &TransportPlan) -> Result<CostReport> {
    check_comparable(sys_a, sys_b)?;
    if dist(&plan.rho_mu, &sys_a.rho) > 1e-9 || dist(&plan.rho_nu, &sys_b.rho) > 1e-9 {
        return Err(Error::Config(
            "plan endpoints do not match the systems' states".into(),
        ));
    }
    let mut per = Vec::with_capacity(sys_a.coords.len());
    let mut value = 0.0;
    for (k, l) in sys_a.coords.iter().zip(&sys_b.coords) {
        let mu_part = trace(&(&sys_a.rho * k.adjoint() * k)).re;
        let nu_part = trace(&(&sys_b.rho * l.adjoint() * l)).re;
        let cross = trace(&(&sys_b.rho * plan.channel.apply(k).adjoint() * l)).re;
        let term = mu_part + nu_part - 2.0 * cross;
        per.push(term);
        value += term;
    }
    let gns = GnsSpace::of_plan(plan)?;
    let norm_form = gns.cost_norm_form(&sys_a.coords, &sys_b.coords)?;
    if (value - norm_form).abs() > 1e-8 * (1.0 + value.abs()) {
        return Err(Error::Solver(format!(
            "cost cross-check failed: formula {value:.3e} vs norm form {norm_form:.3e}"
        )));
    }
    Ok(CostReport {
        value,
        per_coordinate: per,
        norm_form,
    })
}

/// Choi position of the superoperator entry `sup[a, b]`.
fn choi_pos(a: usize, b: usize, n: usize, m: usize) -> (usize, usize) {
    let (p, q) = (a / m, a % m);
    let (i, j) = (b / n, b % n);
    (i * m + p, j * m + q)
}

fn sup_from_choi(x: &CMat, n: usize, m: usize) -> CMat {
    let mut sup = CMat::zeros(m * m, n * n);
    for a in 0..m * m {
        for b in 0..n * n {
            let (r, c) = choi_pos(a, b, n, m);
            sup[(a, b)] = x[(r, c)];
        }
    }
    sup
}

/// Append the rows of the superoperator identity `L·S − S·R = 0` (with `S`
/// the channel variable) as complex equality constraints on the Choi matrix.
fn add_intertwining_rows(
    p: &mut SdpProblem,
    l: &CMat,
    r: &CMat,
    n: usize,
    m: usize,
) -> Result<()> {
    for rr in 0..m * m {
        for cc in 0..n * n {
            let mut coef = CMat::zeros(n * m, n * m);
            for a in 0..m * m {
                let la = l[(rr, a)];
                if la.norm_sqr() > 0.0 {
                    let (x, y) = choi_pos(a, cc, n, m);
                    coef[(x, y)] += la;
                }
            }
            for b in 0..n * n {
                let rb = r[(b, cc)];
                if rb.norm_sqr() > 0.0 {
                    let (x, y) = choi_pos(rr, b, n, m);
                    coef[(x, y)] -= rb;
                }
            }
            if coef.norm() == 0.0 {
                continue;
            }
            // Σ coef[r,c]·X[r,c] = Tr(A†X) with A = conj(coef).
            p.add_complex_constraint(&conj(&coef), C::new(0.0, 0.0))?;
        }
    }
    Ok(())
}

/// Assemble the SDP of one distance computation. Returns the problem (with
/// the product-plan Choi matrix as seed) and the constant cost offset
/// `Σ_i [μ(k_i*k_i) + ν(l_i*l_i)]`, so that cost = offset + Re⟨C, X⟩.
pub fn transport_problem(
    sys_a: &GradedSystem,
    sys_b: &GradedSystem,
    class: TransportClass,
) -> Result<(SdpProblem, f64)> {
    check_comparable(sys_a, sys_b)?;
    let n = sys_a.n();
    let m = sys_b.n();
    let d = n * m;
    let rho_nu = &sys_b.rho;

    // Objective: −Σ_i 2·Re Tr(ρ_ν l_i† E(k_i)).
    let mut c = CMat::zeros(d, d);
    for (k, l) in sys_a.coords.iter().zip(&sys_b.coords) {
        let a = kron(&conj(k), &(l * rho_nu));
        c -= &a + a.adjoint();
    }
    let mut offset = 0.0;
    for (k, l) in sys_a.coords.iter().zip(&sys_b.coords) {
        offset += trace(&(&sys_a.rho * k.adjoint() * k)).re
            + trace(&(rho_nu * l.adjoint() * l)).re;
    }
    let mut p = SdpProblem::new(d, herm_part(&c))?;

    // Unitality: Σ_i X[(i·m+p),(i·m+q)] = δ_pq.
    let mut e = CMat::zeros(m, m);
    for pp in 0..m {
        for qq in 0..m {
            e[(pp, qq)] = C::new(1.0, 0.0);
            let a = kron(&identity(n), &e);
            e[(pp, qq)] = C::new(0.0, 0.0);
            let b = if pp == qq { 1.0 } else { 0.0 };
            p.add_complex_constraint(&a, C::new(b, 0.0))?;
        }
    }
    // State transport: Tr(ρ_ν E(e_ij)) = ρ_μ[j,i].
    let mut e = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            e[(i, j)] = C::new(1.0, 0.0);
            let a = kron(&e, rho_nu);
            e[(i, j)] = C::new(0.0, 0.0);
            p.add_complex_constraint(&a, sys_a.rho[(j, i)])?;
        }
    }
    // Evenness: E ∘ γ_A = γ_B ∘ E.
    let ga = kron(&sys_a.form.u, &sys_a.form.u.transpose());
    let gb = kron(&sys_b.form.u, &sys_b.form.u.transpose());
    add_intertwining_rows(&mut p, &gb, &ga, n, m)?;
    // Named dynamics: E ∘ α_υ = β_υ ∘ E, the reversing ones included.
    for named in &sys_a.dynamics {
        let beta = sys_b
            .dynamics
            .iter()
            .find(|d| d.name == named.name)
            .expect("name sets already checked");
        add_intertwining_rows(&mut p, &beta.map.sup, &named.map.sup, n, m)?;
    }
    if matches!(class, TransportClass::FSigma | TransportClass::FSigmaSigma) {
        // Modular rows: E intertwines the modular generators.
        let ad_mu = GradedSystem::modular_generator_of(&sys_a.rho)?;
        let ad_nu = GradedSystem::modular_generator_of(&sys_b.rho)?;
        add_intertwining_rows(&mut p, &ad_nu, &ad_mu, n, m)?;
    }
    if matches!(class, TransportClass::FSigmaSigma) {
        // KMS rows: E intertwines the KMS duals of every named dynamics.
        for named in &sys_a.dynamics {
            let beta = sys_b
                .dynamics
                .iter()
                .find(|d| d.name == named.name)
                .expect("name sets already checked");
            let alpha_sigma = named.map.kms_dual(&sys_a.rho, &sys_a.rho)?;
            let beta_sigma = beta.map.kms_dual(&sys_b.rho, &sys_b.rho)?;
            add_intertwining_rows(&mut p, &beta_sigma.sup, &alpha_sigma.sup, n, m)?;
        }
    }
    // Product-plan Choi matrix: strictly feasible in every class.
    p.seed = Some(kron(&conj(&sys_a.rho), &identity(m)));
    Ok((p, offset))
}

/// Distance of the given class with explicit solver options.
pub fn wasserstein_with_options(
    sys_a: &GradedSystem,
    sys_b: &GradedSystem,
    class: TransportClass,
    options: SdpOptions,
) -> Result<DistanceResult> {
    let (mut problem, offset) = transport_problem(sys_a, sys_b, class)?;
    problem.options = options;
    let sol = problem.solve()?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => {
            return Err(Error::Infeasible(
                "transport constraint set reported infeasible".into(),
            ))
        }
        SdpStatus::MaxIter => {
            return Err(Error::Solver(format!(
                "no certificate after {} iterations (primal residual {:.3e}, gap {:.3e})",
                sol.iterations, sol.primal_residual, sol.dual_gap
            )))
        }
    }
    let plan = plan_from_choi_iterate(&problem, &sol, sys_a, sys_b)?;
    let report = cost(sys_a, sys_b, &plan)?;
    // Interior-point accuracy caps the cost at ~gap·scale, which the square
    // root amplifies badly near zero. When the optimum looks like zero, try
    // to land exactly on the zero-cost face (a linear condition on the Choi
    // matrix); keep the refined plan only when it is feasible and cheaper.
    let (plan, report) = if report.value <= 1e-4 {
        match refine_zero_cost(&problem, &sol.x, sys_a, sys_b) {
            Some(refined) => match cost(sys_a, sys_b, &refined) {
                Ok(r2) if r2.value < report.value => (refined, r2),
                _ => (plan, report),
            },
            None => (plan, report),
        }
    } else {
        (plan, report)
    };
    let sdp_value = offset + sol.value;
    if (report.value - sdp_value).abs() > 1e-6 * (1.0 + report.value.abs()) {
        return Err(Error::Solver(format!(
            "projected plan cost {:.6e} drifted from solver value {:.6e}",
            report.value, sdp_value
        )));
    }
    Ok(DistanceResult {
        value: report.value.max(0.0).sqrt(),
        plan,
        report,
        sdp_value,
        status: sol.status,
        iterations: sol.iterations,
    })
}

/// Distance of the given class (default solver options).
pub fn wasserstein(
    sys_a: &GradedSystem,
    sys_b: &GradedSystem,
    class: TransportClass,
) -> Result<DistanceResult> {
    wasserstein_with_options(sys_a, sys_b, class, SdpOptions::default())
}

/// All three distances of a pair; enforces the monotonicity chain
/// `W^F ≤ W^F_σ ≤ W^F_σσ` (up to `1e-6` slack).
pub fn wasserstein_chain(sys_a: &GradedSystem, sys_b: &GradedSystem) -> Result<ChainReport> {
    let f = wasserstein(sys_a, sys_b, TransportClass::F)?;
    let f_sigma = wasserstein(sys_a, sys_b, TransportClass::FSigma)?;
    let f_sigma_sigma = wasserstein(sys_a, sys_b, TransportClass::FSigmaSigma)?;
    let slack = 1e-6 * (1.0 + f_sigma_sigma.value);
    if f.value > f_sigma.value + slack || f_sigma.value > f_sigma_sigma.value + slack {
        return Err(Error::Solver(format!(
            "distance chain not monotone: {} / {} / {}",
            f.value, f_sigma.value, f_sigma_sigma.value
        )));
    }
    Ok(ChainReport {
        f,
        f_sigma,
        f_sigma_sigma,
    })
}

/// Try to land exactly on the zero-cost face: each per-coordinate cost
/// summand is an affine function of the Choi matrix that is nonnegative on
/// feasible plans, so zero total cost pins a stack of extra equalities.
/// Alternating projections between the augmented affine space and the PSD
/// cone converge when that face is nonempty; the final iterate satisfies
/// the equalities to machine precision, so the plan's cost is exactly zero
/// up to rounding. Returns `None` when the alternation stalls (the face is
/// empty or out of reach) — the caller then keeps the unrefined plan.
fn refine_zero_cost(
    problem: &SdpProblem,
    x_start: &CMat,
    sys_a: &GradedSystem,
    sys_b: &GradedSystem,
) -> Option<TransportPlan> {
    let n = sys_a.n();
    let m = sys_b.n();
    let mut aug = problem.clone();
    for (k, l) in sys_a.coords.iter().zip(&sys_b.coords) {
        let a = kron(&conj(k), &(l * &sys_b.rho));
        let c_i = -(&a + a.adjoint());
        let const_i = trace(&(&sys_a.rho * k.adjoint() * k)).re
            + trace(&(&sys_b.rho * l.adjoint() * l)).re;
        aug.add_constraint(c_i, -const_i).ok()?;
    }
    let scale = 1.0 + m as f64;
    let mut x = x_start.clone();
    let mut clipped_mass = f64::INFINITY;
    for _ in 0..500 {
        x = aug.project_onto_constraints(&x).ok()?;
        let (vals, vecs) = herm_eig(&x).ok()?;
        let mut clipped = CMat::zeros(n * m, n * m);
        let mut neg = 0.0f64;
        for (i, &v) in vals.iter().enumerate() {
            if v > 0.0 {
                let col = vecs.column(i);
                clipped += (col * col.adjoint()).scale(v);
            } else {
                neg = neg.max(-v);
            }
        }
        x = clipped;
        clipped_mass = neg;
        if neg <= 1e-14 * scale {
            break;
        }
    }
    if clipped_mass > 1e-12 * scale {
        return None;
    }
    // Finish on the affine space so the zero-cost equalities hold exactly;
    // the PSD defect left behind is at most the last clipped mass.
    let x = aug.project_onto_constraints(&x).ok()?;
    let sup = sup_from_choi(&x, n, m);
    let channel = Channel::from_superop(sup, n, m).ok()?;
    TransportPlan::from_channel(
        channel,
        sys_a.form.clone(),
        sys_b.form.clone(),
        sys_a.rho.clone(),
        sys_b.rho.clone(),
    )
    .ok()
}

/// Project the solver iterate back onto the exact constraint affine space,
/// clip it to the PSD cone, and admit it as a plan.
fn plan_from_choi_iterate(
    problem: &SdpProblem,
    sol: &SdpSolution,
    sys_a: &GradedSystem,
    sys_b: &GradedSystem,
) -> Result<TransportPlan> {
    let n = sys_a.n();
    let m = sys_b.n();
    let x = problem.project_onto_constraints(&sol.x)?;
    // Clip tiny negative eigenvalues introduced by the projection.
    let (vals, vecs) = herm_eig(&x)?;
    let mut xp = CMat::zeros(n * m, n * m);
    for (i, &v) in vals.iter().enumerate() {
        if v > 0.0 {
            let col = vecs.column(i);
            xp += (col * col.adjoint()).scale(v);
        }
    }
    let sup = sup_from_choi(&xp, n, m);
    let channel = Channel::from_superop(sup, n, m)?;
    TransportPlan::from_channel(
        channel,
        sys_a.form.clone(),
        sys_b.form.clone(),
        sys_a.rho.clone(),
        sys_b.rho.clone(),
    )
}

/// From a zero-cost plan between hermitian systems with generating
/// coordinates, extract the channel as a candidate isomorphism and report
/// its residuals.
pub fn extract_isomorphism(
    sys_a: &GradedSystem,
    sys_b: &GradedSystem,
    plan: &TransportPlan,
    w_value: f64,
) -> Result<(Channel, IsomorphismReport)> {
    check_comparable(sys_a, sys_b)?;
    if !sys_a.is_hermitian_system() || !sys_b.is_hermitian_system() {
        return Err(Error::Config(
            "isomorphism extraction needs hermitian coordinates".into(),
        ));
    }
    if w_value > 1e-6 {
        return Err(Error::Config(format!(
            "isomorphism extraction needs a zero distance (got {w_value:.3e})"
        )));
    }
    for (sys, label) in [(sys_a, "first"), (sys_b, "second")] {
        if !coords_generate(&sys.coords, sys.n()) {
            return Err(Error::Config(format!(
                "{label} system's coordinates do not generate its algebra"
            )));
        }
    }
    let iota = plan.channel.clone();
    let units = sys_a.form.matrix_units();
    let mut multiplicativity: f64 = 0.0;
    let images: Vec<CMat> = units.iter().map(|x| iota.apply(x)).collect();
    for (ix, x) in units.iter().enumerate() {
        for (iy, y) in units.iter().enumerate() {
            let lhs = iota.apply(&(x * y));
            let rhs = &images[ix] * &images[iy];
            multiplicativity = multiplicativity.max(dist(&lhs, &rhs));
        }
    }
    let evenness = iota.even_residual(&sys_a.form.u, &sys_b.form.u);
    let mut intertwining: f64 = 0.0;
    for named in &sys_a.dynamics {
        let beta = sys_b
            .dynamics
            .iter()
            .find(|d| d.name == named.name)
            .expect("name sets already checked");
        intertwining =
            intertwining.max(dist(&(&iota.sup * &named.map.sup), &(&beta.map.sup * &iota.sup)));
    }
    let mut coordinate_match: f64 = 0.0;
    for (k, l) in sys_a.coords.iter().zip(&sys_b.coords) {
        coordinate_match = coordinate_match.max(dist(&iota.apply(k), l));
    }
    Ok((
        iota,
        IsomorphismReport {
            multiplicativity,
            evenness,
            intertwining,
            coordinate_match,
        },
    ))
}

/// Do iterated products of `{1, k_i, k_i*}` span the full matrix algebra?
fn coords_generate(coords: &[CMat], n: usize) -> bool {
    let mut basis: Vec<CMat> = vec![identity(n)];
    for k in coords {
        basis.push(k.clone());
        basis.push(k.adjoint());
    }
    let span_rank = |list: &[CMat]| -> usize {
        let mut m = CMat::zeros(n * n, list.len());
        for (c, x) in list.iter().enumerate() {
            m.column_mut(c).copy_from(&crate::mat::vec_mat(x));
        }
        rank(&m)
    };
    let mut r = span_rank(&basis);
    for _ in 0..n * n {
        if r == n * n {
            return true;
        }
        let snapshot = basis.clone();
        for x in &snapshot {
            for y in &snapshot {
                basis.push(x * y);
            }
        }
        let r_new = span_rank(&basis);
        if r_new == r {
            return false;
        }
        r = r_new;
        // Keep the list from growing quadratically between rounds.
        if basis.len() > 4 * n * n * n {
            let kept = basis.split_off(basis.len() - 2 * n * n * n);
            basis = snapshot.into_iter().chain(kept).collect();
        }
    }
    r == n * n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{qubit_damping_dynamics, sigma_x, sigma_z};
    use crate::plan::{diagonal_plan, product_plan};
    use crate::rng::{random_diagonal_faithful_state, random_hermitian, rng_from_seed};
    use crate::standard_form::StandardForm;
    use crate::system::NamedMap;

    fn qubit_form() -> StandardForm {
        StandardForm::new(2, sigma_z()).unwrap()
    }

    /// A qubit system with damping dynamics named "alpha" and coordinates
    /// (σ_x, σ_z).
    fn damped_system(seed: u64) -> GradedSystem {
        let mut rng = rng_from_seed(seed);
        let rho = random_diagonal_faithful_state(&mut rng, 2, 0.15);
        let alpha = qubit_damping_dynamics(&rho, 0.35);
        GradedSystem::new(
            qubit_form(),
            rho,
            vec![NamedMap::new("alpha", alpha)],
            vec![sigma_x(), sigma_z()],
        )
        .unwrap()
    }

    fn tracial_system(coords: Vec<CMat>) -> GradedSystem {
        let rho = identity(2).scale(0.5);
        GradedSystem::new(qubit_form(), rho, vec![], coords).unwrap()
    }

    /// Even unitary `exp(i·h)` with `h` even Hermitian.
    fn even_unitary(seed: u64, form: &StandardForm) -> CMat {
        let mut rng = rng_from_seed(seed);
        let h = form.even_part(&random_hermitian(&mut rng, form.n));
        let (vals, vecs) = herm_eig(&h).unwrap();
        let mut v = CMat::zeros(form.n, form.n);
        for (i, &lam) in vals.iter().enumerate() {
            let col = vecs.column(i);
            v += (col * col.adjoint()).map(|z| z * C::from_polar(1.0, lam));
        }
        v
    }

    #[test]
    fn cost_vanishes_on_shared_coordinates() {
        let sys = damped_system(110);
        let plan = diagonal_plan(&sys.form, &sys.rho).unwrap();
        let rep = cost(&sys, &sys, &plan).unwrap();
        assert!(rep.value.abs() <= 1e-12);
        assert!(rep.norm_form.abs() <= 1e-12);
    }

    #[test]
    fn product_plan_cost_on_tracial_qubits_is_two() {
        let sys_a = tracial_system(vec![sigma_x()]);
        let sys_b = tracial_system(vec![sigma_x()]);
        let plan = product_plan(&sys_a.form, &sys_b.form, &sys_a.rho, &sys_b.rho).unwrap();
        let rep = cost(&sys_a, &sys_b, &plan).unwrap();
        assert!((rep.value - 2.0).abs() <= 1e-12, "value {}", rep.value);
        assert_eq!(rep.per_coordinate.len(), 1);
    }

    #[test]
    fn cost_depends_only_on_the_channel() {
        let sys_a = damped_system(111);
        let sys_b = damped_system(112);
        let plan = product_plan(&sys_a.form, &sys_b.form, &sys_a.rho, &sys_b.rho).unwrap();
        let rep1 = cost(&sys_a, &sys_b, &plan).unwrap();
        let fermionic = plan.to_fermionic().unwrap();
        let rep2 = cost(&sys_a, &sys_b, &fermionic).unwrap();
        assert_eq!(rep1.value, rep2.value, "same channel ⇒ identical cost");
    }

    #[test]
    fn self_distance_is_zero_and_extracts_the_identity() {
        let sys = damped_system(113);
        let chain = wasserstein_chain(&sys, &sys).unwrap();
        for run in [&chain.f, &chain.f_sigma, &chain.f_sigma_sigma] {
            assert!(run.value <= 1e-6, "self distance {}", run.value);
        }
        let run = &chain.f_sigma_sigma;
        let (_iota, rep) = extract_isomorphism(&sys, &sys, &run.plan, run.value).unwrap();
        assert!(rep.max_residual() <= 1e-5, "residuals {rep:?}");
    }

    #[test]
    fn unitarily_conjugate_systems_are_at_zero_distance() {
        let sys_a = damped_system(114);
        let v = even_unitary(1140, &sys_a.form);
        let vd = v.adjoint();
        let iota = Channel::from_conjugation(&vd); // a ↦ V a V†
        let iota_inv = Channel::from_conjugation(&v);
        let rho_b = &v * &sys_a.rho * &vd;
        let dynamics_b: Vec<NamedMap> = sys_a
            .dynamics
            .iter()
            .map(|d| {
                NamedMap::new(
                    d.name.clone(),
                    iota.compose(&d.map.compose(&iota_inv).unwrap()).unwrap(),
                )
            })
            .collect();
        let coords_b: Vec<CMat> = sys_a.coords.iter().map(|k| &v * k * &vd).collect();
        let sys_b = GradedSystem::new(sys_a.form.clone(), rho_b, dynamics_b, coords_b).unwrap();

        let run = wasserstein(&sys_a, &sys_b, TransportClass::FSigmaSigma).unwrap();
        assert!(run.value <= 1e-6, "distance {}", run.value);
        let (extracted, rep) = extract_isomorphism(&sys_a, &sys_b, &run.plan, run.value).unwrap();
        assert!(rep.max_residual() <= 1e-5, "residuals {rep:?}");
        // The extracted channel is conjugation by V on the coordinates.
        for k in &sys_a.coords {
            assert!(dist(&extracted.apply(k), &(&v * k * &vd)) <= 1e-4);
        }
    }

    #[test]
    fn chain_is_monotone_and_kms_class_is_symmetric() {
        let sys_a = damped_system(115);
        let sys_b = damped_system(116);
        let ab = wasserstein_chain(&sys_a, &sys_b).unwrap();
        assert!(ab.f.value <= ab.f_sigma.value + 1e-6);
        assert!(ab.f_sigma.value <= ab.f_sigma_sigma.value + 1e-6);
        assert!(ab.f_sigma_sigma.value > 1e-3, "systems genuinely differ");
        let ba = wasserstein(&sys_b, &sys_a, TransportClass::FSigmaSigma).unwrap();
        assert!(
            (ab.f_sigma_sigma.value - ba.value).abs() <= 1e-5,
            "asymmetry {} vs {}",
            ab.f_sigma_sigma.value,
            ba.value
        );
    }

    #[test]
    fn triangle_inequality_in_the_kms_class() {
        let sys_a = damped_system(117);
        let sys_b = damped_system(118);
        let sys_c = damped_system(119);
        let ab = wasserstein(&sys_a, &sys_b, TransportClass::FSigmaSigma)
            .unwrap()
            .value;
        let bc = wasserstein(&sys_b, &sys_c, TransportClass::FSigmaSigma)
            .unwrap()
            .value;
        let ac = wasserstein(&sys_a, &sys_c, TransportClass::FSigmaSigma)
            .unwrap()
            .value;
        assert!(ac <= ab + bc + 1e-5, "ac {ac} ab {ab} bc {bc}");
    }

    #[test]
    fn grading_pre_extension_changes_nothing() {
        let sys_a = damped_system(120);
        let sys_b = damped_system(121);
        let v1 = wasserstein(&sys_a, &sys_b, TransportClass::F).unwrap().value;
        let v2 = wasserstein(
            &sys_a.with_grading_as_dynamics(),
            &sys_b.with_grading_as_dynamics(),
            TransportClass::F,
        )
        .unwrap()
        .value;
        assert!((v1 - v2).abs() <= 1e-6, "{v1} vs {v2}");
    }

    #[test]
    fn distance_matches_the_first_order_oracle() {
        let sys_a = damped_system(122);
        let sys_b = damped_system(123);
        let run = wasserstein(&sys_a, &sys_b, TransportClass::FSigmaSigma).unwrap();
        let (problem, offset) = transport_problem(&sys_a, &sys_b, TransportClass::FSigmaSigma).unwrap();
        let oracle_obj = crate::sdp::solve_projected_gradient(&problem, 300, 1200).unwrap();
        let oracle_cost = (offset + oracle_obj).max(0.0);
        assert!(
            (run.value * run.value - oracle_cost).abs() <= 1e-4 * (1.0 + oracle_cost),
            "ipm cost {} oracle cost {}",
            run.value * run.value,
            oracle_cost
        );
    }

    #[test]
    fn product_seed_is_feasible_in_every_class() {
        let sys_a = damped_system(124);
        let sys_b = damped_system(125);
        for class in [
            TransportClass::F,
            TransportClass::FSigma,
            TransportClass::FSigmaSigma,
        ] {
            let (p, _) = transport_problem(&sys_a, &sys_b, class).unwrap();
            let seed = p.seed.clone().unwrap();
            assert!(
                p.constraint_residual(&seed) <= 1e-10,
                "class {class:?} residual {}",
                p.constraint_residual(&seed)
            );
            let x = p.feasible_point().unwrap();
            assert!(crate::mat::min_eig(&x).unwrap() >= 1e-6);
        }
    }

    #[test]
    fn nongenerating_coordinates_are_rejected() {
        let sys = tracial_system(vec![sigma_x()]); // {1, σ_x} is not all of M₂
        let plan = diagonal_plan(&sys.form, &sys.rho).unwrap();
        let res = extract_isomorphism(&sys, &sys, &plan, 0.0);
        assert!(matches!(res, Err(Error::Config(_))));
        // (σ_x, σ_z) does generate.
        assert!(coords_generate(&[sigma_x(), sigma_z()], 2));
    }
}
