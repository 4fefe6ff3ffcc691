//! Copying maps onto the twisted commutant, the reversing operations they
//! induce, reversed channels and systems, detailed-balance checks, and the
//! deviation bounds a detailed-balanced partner imposes on transport
//! distances.
//!
//! A *copying map* for an algebra in standard form with faithful even state
//! `ρ` is an even *-isomorphism `ϰ` of the algebra onto its twisted
//! commutant, implemented by a unitary `K` on the GNS space:
//! `ϰ(a) = K a K†` together with the GNS pairing `K a Λ_ρ = ϰ(a) Λ_ϱ`,
//! where `ϱ` is the state transported through `ϰ` and `Λ_ϱ` its positive
//! vector representative. Since the twisted commutant is parametrized by
//! carrier coordinates ([`StandardForm::twisted_carrier`]), `ϰ` is stored as
//! the carrier map `κ: M_n → M_n`, which is a *-automorphism (hence
//! implemented by a unitary superoperator). The map is *state-copying* when
//! the transported state is the twisted restriction of the reference state —
//! carrier density `conj(ρ)` — and `K² = g`. In that case:
//!
//! * `θ(a) = κ(a)ᵀ` is a reversing operation — an even antimultiplicative
//!   unital involution preserving the state (the composition of `ϰ`, the
//!   inverse Klein twist into the commutant, and the commutant conjugation
//!   `j`, which is what the transpose of the carrier coordinate computes);
//! * every state-compatible channel `E` acquires a reverse
//!   `E^← = ϰ_A⁻¹ ∘ E^≀ ∘ ϰ_B`, equal to `θ_A ∘ E^σ ∘ θ_B` (both routes are
//!   computed and compared);
//! * a dynamics map `α` satisfies detailed balance when `α^← = α`,
//!   equivalently when its copy `κ∘α∘κ⁻¹` coincides with its twisted dual.
//!
//! Whenever a copying map is attached to a [`GradedSystem`], the induced
//! reversing operation is adjoined to the dynamics under
//! [`THETA_DYNAMICS_NAME`], so transport plans between reversible systems
//! are required to intertwine the reversing operations as well — this is
//! what makes the reversal and copy symmetries of the distances hold.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::mat::{conj, dist, herm_part, identity, inv, kron, sqrtm_psd, vec_mat, C, CMat};
use crate::standard_form::StandardForm;
use crate::system::{GradedSystem, NamedMap, THETA_DYNAMICS_NAME};
use crate::wasserstein::{wasserstein, TransportClass};

/// Admission tolerance for the structural identities of copying maps and
/// reversing operations.
pub const TOL_COPY: f64 = 1e-9;

/// Threshold on the detailed-balance residual `‖α^← − α‖`.
pub const TOL_FDB: f64 = 1e-7;

/// An even *-isomorphism onto the twisted commutant, in carrier coordinates,
/// together with its implementing GNS unitary.
#[derive(Clone, Debug)]
pub struct CopyingMap {
    /// Carrier map `κ`: the image of `a` is the twisted-commutant element
    /// with carrier coordinate `κ(a)`.
    pub kappa: Channel,
    /// Inverse carrier map `κ⁻¹`.
    pub kappa_inv: Channel,
    /// Implementing unitary `K` on the GNS space (`n² × n²`).
    pub k: CMat,
    /// Carrier density of the transported state:
    /// `Tr(copy_state · c) = ρ(κ⁻¹(c))`.
    pub copy_state: CMat,
    /// `‖copy_state − conj(ρ)‖` — zero exactly when the transported state is
    /// the twisted restriction of the reference state.
    pub state_residual: f64,
    /// `‖K² − g‖`.
    pub involution_residual: f64,
    /// Both residuals above within [`TOL_COPY`]. Only state-copying maps
    /// induce reversing operations and reversed channels.
    pub is_state_copying: bool,
}

/// Extract the carrier coordinate of `Y = I ⊗ c` and the deviation of `Y`
/// from that form.
fn commutant_coordinate(y: &CMat, n: usize) -> (CMat, f64) {
    let mut c = CMat::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            let mut s = C::new(0.0, 0.0);
            for r in 0..n {
                s += y[(r * n + p, r * n + q)];
            }
            c[(p, q)] = s / C::new(n as f64, 0.0);
        }
    }
    let res = dist(y, &kron(&identity(n), &c));
    (c, res)
}

/// `twisted_carrier(c) · vec(Λ)` computed at matrix level (three `n × n`
/// products instead of an `n² × n²` sandwich).
fn twisted_action(form: &StandardForm, c: &CMat, lam_mat: &CMat) -> CMat {
    form.klein_apply_mat(&(form.klein_apply_mat_inv(lam_mat) * c.transpose()))
}

/// Build a copying map from its implementing unitary `K`.
///
/// Checks, in order: `K` unitary; the conjugation `K a K†` maps a generating
/// set of the algebra into the twisted commutant (the remaining images are
/// then twisted-commutant elements automatically and are obtained
/// multiplicatively); the carrier map is a unital *-homomorphism; `K`
/// commutes with the carrier grading; and the GNS pairing
/// `K a Λ_ρ = ϰ(a) Λ_ϱ` holds on a basis. Any failure is a
/// [`Error::BadCopyingMap`]. The state-copying flag records whether the
/// transported state is `conj(ρ)` *and* `K² = g`; it is diagnosed, not
/// required.
pub fn make_copying_map(form: &StandardForm, rho: &CMat, k: &CMat) -> Result<CopyingMap> {
    let n = form.n;
    let d = n * n;
    if k.shape() != (d, d) {
        return Err(Error::Dimension(format!(
            "implementing operator must be {d}×{d}, got {}×{}",
            k.nrows(),
            k.ncols()
        )));
    }
    form.check_state(rho)?;
    let uni = dist(&(k.adjoint() * k), &identity(d));
    if uni > TOL_COPY {
        return Err(Error::BadCopyingMap(format!(
            "implementing operator is not unitary (residual {uni:.3e})"
        )));
    }

    // Carrier images of the ladder generators e_{m,m+1} from the conjugated
    // operators K (e ⊗ I) K†, read in commutant coordinates after an inverse
    // Klein twist: with Z = g^{−1/2} K, the twisted coordinate of
    // K (e_{m,m+1} ⊗ I) K† is found inside Z (e ⊗ I) Z†, which only needs
    // two n²×n column blocks of Z.
    let z = form.g_half_inv() * k;
    let mut ladder = Vec::with_capacity(n.saturating_sub(1));
    for m in 0..n.saturating_sub(1) {
        let zi = z.columns(m * n, n);
        let zj = z.columns((m + 1) * n, n);
        let y = zi * zj.adjoint();
        let (c, res) = commutant_coordinate(&y, n);
        if res > TOL_COPY * (1.0 + y.norm()) {
            return Err(Error::BadCopyingMap(format!(
                "image of the algebra is not inside the twisted commutant (residual {res:.3e})"
            )));
        }
        ladder.push(c);
    }

    // All unit images multiplicatively: e_ij = e_{i,i+1}···e_{j−1,j} above
    // the diagonal, diagonal units from ladder products, adjoints below.
    let mut images = vec![CMat::zeros(n, n); d];
    if n == 1 {
        images[0] = identity(1);
    } else {
        for i in 0..n - 1 {
            let mut acc = ladder[i].clone();
            images[i * n + i + 1] = acc.clone();
            for j in i + 2..n {
                acc = &acc * &ladder[j - 1];
                images[i * n + j] = acc.clone();
            }
        }
        for i in 0..n - 1 {
            images[i * n + i] = &ladder[i] * ladder[i].adjoint();
        }
        images[(n - 1) * n + n - 1] = ladder[n - 2].adjoint() * &ladder[n - 2];
        for i in 0..n {
            for j in 0..i {
                images[i * n + j] = images[j * n + i].adjoint();
            }
        }
    }

    let mut kappa_sup = CMat::zeros(d, d);
    for (idx, c) in images.iter().enumerate() {
        kappa_sup.set_column(idx, &vec_mat(c));
    }
    let kappa = Channel::from_superop(kappa_sup, n, n)?;

    // Unital *-homomorphism checks. Multiplicativity on the factored family
    // κ(e_i0)κ(e_0j) = κ(e_ij) and κ(e_0i)κ(e_j0) = δ_ij κ(e_00) implies
    // multiplicativity on all unit pairs.
    let mut unit_sum = CMat::zeros(n, n);
    for i in 0..n {
        unit_sum += &images[i * n + i];
    }
    let unital = dist(&unit_sum, &identity(n));
    let mut mult = 0.0f64;
    let mut star = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            star = star.max(dist(&images[i * n + j].adjoint(), &images[j * n + i]));
            mult = mult.max(dist(&(&images[i * n] * &images[j]), &images[i * n + j]));
            let expect = if i == j {
                images[0].clone()
            } else {
                CMat::zeros(n, n)
            };
            mult = mult.max(dist(&(&images[i] * &images[j * n]), &expect));
        }
    }
    if unital > TOL_COPY || mult > TOL_COPY || star > TOL_COPY {
        return Err(Error::BadCopyingMap(format!(
            "carrier map is not a unital *-homomorphism (unitality {unital:.3e}, \
             multiplicativity {mult:.3e}, star {star:.3e})"
        )));
    }

    let even = (k * form.g() - form.g() * k).norm();
    if even > TOL_COPY * (1.0 + form.g().norm()) {
        return Err(Error::BadCopyingMap(format!(
            "not even: implementing operator does not commute with the carrier grading \
             (residual {even:.3e})"
        )));
    }

    let kappa_inv = Channel::from_superop(inv(&kappa.sup)?, n, n)?;
    let copy_state = herm_part(&kappa_inv.pull_state(rho));

    // GNS pairing on the unit basis: K vec(e_ij ρ^{1/2}) = ϰ(e_ij) Λ_ϱ with
    // Λ_ϱ = vec(sqrt(conj(copy_state))) the positive representative of the
    // transported state.
    let rho_half = sqrtm_psd(rho)?;
    let lam_mat = sqrtm_psd(&conj(&copy_state))?;
    let lhs = k * kron(&identity(n), &rho_half.transpose());
    let mut rhs = CMat::zeros(d, d);
    for (idx, c) in images.iter().enumerate() {
        rhs.set_column(idx, &vec_mat(&twisted_action(form, c, &lam_mat)));
    }
    let gns = (&lhs - &rhs).norm();
    if gns > TOL_COPY * (1.0 + rhs.norm()) {
        return Err(Error::BadCopyingMap(format!(
            "implementing operator does not match the carrier map on the GNS space \
             (residual {gns:.3e})"
        )));
    }

    let state_residual = dist(&copy_state, &conj(rho));
    let involution_residual = (k * k - form.g()).norm();
    let is_state_copying = state_residual <= TOL_COPY && involution_residual <= TOL_COPY;
    Ok(CopyingMap {
        kappa,
        kappa_inv,
        k: k.clone(),
        copy_state,
        state_residual,
        involution_residual,
        is_state_copying,
    })
}

/// Build a copying map from its carrier *-automorphism `κ`: the implementing
/// unitary is reconstructed from the GNS pairing (`K` is determined by
/// `K a Λ_ρ = ϰ(a) Λ_ϱ`) and then revalidated through
/// [`make_copying_map`].
pub fn copying_map_from_kappa(
    form: &StandardForm,
    rho: &CMat,
    kappa: &Channel,
) -> Result<CopyingMap> {
    let n = form.n;
    if kappa.n_in != n || kappa.n_out != n {
        return Err(Error::Dimension(
            "carrier map has wrong dimensions".into(),
        ));
    }
    form.check_state(rho)?;
    let kappa_inv = Channel::from_superop(inv(&kappa.sup)?, n, n)?;
    let copy_state = herm_part(&kappa_inv.pull_state(rho));
    let lam_mat = sqrtm_psd(&conj(&copy_state))?;
    let rho_half = sqrtm_psd(rho)?;
    let mut r = CMat::zeros(n * n, n * n);
    for (idx, e) in form.matrix_units().iter().enumerate() {
        let c = kappa.apply(e);
        r.set_column(idx, &vec_mat(&twisted_action(form, &c, &lam_mat)));
    }
    let k = r * kron(&identity(n), &inv(&rho_half)?.transpose());
    make_copying_map(form, rho, &k)
}

/// An even antimultiplicative unital involution preserving the reference
/// state, stored as a plain superoperator map.
#[derive(Clone, Debug)]
pub struct ReversingOperation {
    pub theta: Channel,
}

impl ReversingOperation {
    /// The reversing operation as a named dynamics entry (flagged
    /// antimultiplicative) under [`THETA_DYNAMICS_NAME`].
    pub fn as_dynamics(&self) -> NamedMap {
        NamedMap::reversing(THETA_DYNAMICS_NAME, self.theta.clone())
    }
}

/// Superoperator of `θ(a) = κ(a)ᵀ` (no validation).
fn reversing_sup(form: &StandardForm, cm: &CopyingMap) -> CMat {
    form.modular_conjugation().m * &cm.kappa.sup
}

/// The reversing operation induced by a state-copying map: `θ(a) = κ(a)ᵀ`.
/// Fails on maps that are not state-copying; verifies that θ is an even
/// state-preserving antimultiplicative involution.
pub fn reversing_from_copying(
    form: &StandardForm,
    rho: &CMat,
    cm: &CopyingMap,
) -> Result<ReversingOperation> {
    if !cm.is_state_copying {
        return Err(Error::BadCopyingMap(format!(
            "a reversing operation requires a state-copying map (state residual {:.3e}, \
             involution residual {:.3e})",
            cm.state_residual, cm.involution_residual
        )));
    }
    let n = form.n;
    let theta = Channel::from_superop(reversing_sup(form, cm), n, n)?;
    let invol = dist(&(&theta.sup * &theta.sup), &identity(n * n));
    let units = form.matrix_units();
    let t: Vec<CMat> = units.iter().map(|e| theta.apply(e)).collect();
    // Antimultiplicativity on the factored family, mirroring the
    // multiplicativity check of the carrier map.
    let mut anti = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            anti = anti.max(dist(&(&t[j] * &t[i * n]), &t[i * n + j]));
            let expect = if i == j { t[0].clone() } else { CMat::zeros(n, n) };
            anti = anti.max(dist(&(&t[j * n] * &t[i]), &expect));
        }
    }
    let state = dist(&theta.pull_state(rho), rho);
    let even = theta.even_residual(&form.u, &form.u);
    if invol > TOL_COPY || anti > TOL_COPY || state > TOL_COPY || even > TOL_COPY {
        return Err(Error::BadCopyingMap(format!(
            "induced reversing operation fails its structural identities (involution \
             {invol:.3e}, antimultiplicativity {anti:.3e}, state {state:.3e}, evenness \
             {even:.3e})"
        )));
    }
    Ok(ReversingOperation { theta })
}

/// Reverse of a state-compatible channel `E: A → B` with respect to
/// state-copying maps on both ends: `E^← = ϰ_A⁻¹ ∘ E^≀ ∘ ϰ_B : B → A`,
/// computed through the twisted dual's carrier map and cross-checked against
/// the independent route `θ_A ∘ E^σ ∘ θ_B`.
pub fn reverse_channel(
    e: &Channel,
    cm_a: &CopyingMap,
    form_a: &StandardForm,
    rho_a: &CMat,
    cm_b: &CopyingMap,
    form_b: &StandardForm,
    rho_b: &CMat,
) -> Result<Channel> {
    if e.n_in != form_a.n || e.n_out != form_b.n {
        return Err(Error::Dimension(
            "channel dimensions do not match the standard forms".into(),
        ));
    }
    if !cm_a.is_state_copying || !cm_b.is_state_copying {
        return Err(Error::BadCopyingMap(
            "channel reversal requires state-copying maps on both ends".into(),
        ));
    }
    // The twisted dual E^≀: B^≀ → A^≀ has the same carrier map as the
    // commutant dual, so in carrier coordinates the reverse is
    // κ_A⁻¹ ∘ E′ ∘ κ_B.
    let dual = e.dual_carrier(rho_a, rho_b)?;
    let rev_sup = &cm_a.kappa_inv.sup * &dual.sup * &cm_b.kappa.sup;
    let sigma = e.kms_dual(rho_a, rho_b)?;
    let alt_sup = reversing_sup(form_a, cm_a) * &sigma.sup * reversing_sup(form_b, cm_b);
    let res = (&rev_sup - &alt_sup).norm();
    if res > TOL_COPY * (1.0 + rev_sup.norm()) {
        return Err(Error::BadCopyingMap(format!(
            "reversed-channel routes disagree (residual {res:.3e})"
        )));
    }
    Channel::from_superop(rev_sup, e.n_out, e.n_in)
}

fn reversible_copying(sys: &GradedSystem) -> Result<&CopyingMap> {
    match &sys.copying {
        None => Err(Error::NotReversible("no copying map attached".into())),
        Some(cm) if !cm.is_state_copying => Err(Error::NotReversible(
            "attached copying map is not state-copying".into(),
        )),
        Some(cm) => Ok(cm),
    }
}

/// Detailed-balance residuals for one named dynamics map, through both
/// available routes.
#[derive(Clone, Debug)]
pub struct FdbResidual {
    pub name: String,
    /// `‖κ∘α∘κ⁻¹ − α^≀‖`: the copy of the dynamics against its twisted dual.
    pub copy_route: f64,
    /// `‖α^← − α‖`: the reversed dynamics against the dynamics.
    pub reverse_route: f64,
}

/// Result of [`check_fdb`].
#[derive(Clone, Debug)]
pub struct FdbReport {
    pub per_dynamics: Vec<FdbResidual>,
    pub max_residual: f64,
    /// Threshold used for [`FdbReport::holds`] ([`TOL_FDB`]).
    pub tol: f64,
    pub holds: bool,
}

/// Detailed-balance check for a reversible system: for every named dynamics
/// map, compare the copy `κ∘α∘κ⁻¹` with the twisted dual `α^≀`, and
/// equivalently `α^←` with `α`. The two routes agree to rounding because the
/// carrier map's superoperator is unitary; both are reported and their
/// agreement is enforced.
pub fn check_fdb(sys: &GradedSystem) -> Result<FdbReport> {
    let cm = reversible_copying(sys)?;
    let mut per_dynamics = Vec::with_capacity(sys.dynamics.len());
    let mut max_residual = 0.0f64;
    for nm in &sys.dynamics {
        let tw = nm.map.dual_carrier(&sys.rho, &sys.rho)?;
        let copy_sup = &cm.kappa.sup * &nm.map.sup * &cm.kappa_inv.sup;
        let copy_route = (&copy_sup - &tw.sup).norm();
        let rev = reverse_channel(
            &nm.map, cm, &sys.form, &sys.rho, cm, &sys.form, &sys.rho,
        )?;
        let reverse_route = (&rev.sup - &nm.map.sup).norm();
        if (copy_route - reverse_route).abs() > 1e-9 * (1.0 + copy_route) {
            return Err(Error::BadCopyingMap(format!(
                "detailed-balance routes disagree for '{}' ({copy_route:.3e} vs \
                 {reverse_route:.3e})",
                nm.name
            )));
        }
        max_residual = max_residual.max(reverse_route);
        per_dynamics.push(FdbResidual {
            name: nm.name.clone(),
            copy_route,
            reverse_route,
        });
    }
    Ok(FdbReport {
        per_dynamics,
        max_residual,
        tol: TOL_FDB,
        holds: max_residual <= TOL_FDB,
    })
}

/// The reversed system: every dynamics map replaced by its reverse; algebra,
/// state, coordinates and copying map unchanged. A reversible system
/// satisfies detailed balance exactly when it coincides with its reverse,
/// and reversing twice returns the original system.
pub fn reverse_system(sys: &GradedSystem) -> Result<GradedSystem> {
    let cm = reversible_copying(sys)?.clone();
    let mut dynamics = Vec::with_capacity(sys.dynamics.len());
    for nm in &sys.dynamics {
        let rev = reverse_channel(
            &nm.map, &cm, &sys.form, &sys.rho, &cm, &sys.form, &sys.rho,
        )?;
        dynamics.push(NamedMap {
            name: nm.name.clone(),
            map: rev,
            antimultiplicative: nm.antimultiplicative,
        });
    }
    let mut out = GradedSystem::new(
        sys.form.clone(),
        sys.rho.clone(),
        dynamics,
        sys.coords.clone(),
    )?;
    out.copying = Some(cm);
    Ok(out)
}

/// The copy of a reversible system on its twisted commutant, presented in
/// carrier coordinates: grading `conj(u)`, state `conj(ρ)`, every dynamics
/// map `κ∘α∘κ⁻¹` under its original name, coordinates `κ(k_i)`.
///
/// The induced copying map of the copy is attached (its carrier map is
/// `γ ∘ κ⁻¹`, so that composing the two copying maps gives the grading
/// automorphism), which makes the copy reversible in turn; copying twice
/// returns the original system with coordinates `γ(k_i)`. The copy's
/// `θ`-named dynamics is the name-matched copy of the original reversing
/// operation — the object the distance symmetries compare — which may differ
/// from the intrinsic reversing operation of the induced map (available via
/// [`reversing_from_copying`]) by the grading automorphism.
pub fn copy_system(sys: &GradedSystem) -> Result<GradedSystem> {
    let cm = reversible_copying(sys)?;
    let n = sys.n();
    let form = StandardForm::new(n, conj(&sys.form.u))?;
    let rho = conj(&sys.rho);
    let mut dynamics = Vec::with_capacity(sys.dynamics.len());
    for nm in &sys.dynamics {
        let sup = &cm.kappa.sup * &nm.map.sup * &cm.kappa_inv.sup;
        dynamics.push(NamedMap {
            name: nm.name.clone(),
            map: Channel::from_superop(sup, n, n)?,
            antimultiplicative: nm.antimultiplicative,
        });
    }
    let coords = sys.coords.iter().map(|k| cm.kappa.apply(k)).collect();
    let kappa2 = Channel::from_superop(sys.form.g() * &cm.kappa_inv.sup, n, n)?;
    let cm2 = copying_map_from_kappa(&form, &rho, &kappa2)?;
    if !cm2.is_state_copying {
        return Err(Error::BadCopyingMap(format!(
            "induced copying map of the copy is not state-copying (state {:.3e}, \
             involution {:.3e})",
            cm2.state_residual, cm2.involution_residual
        )));
    }
    let mut out = GradedSystem::new(form, rho, dynamics, coords)?;
    out.copying = Some(cm2);
    Ok(out)
}

/// The system with coordinates pushed through the reversing operation,
/// `k_i ↦ θ(k_i*)`; dynamics, state and copying map unchanged. Transport
/// distances between two reversible systems are unchanged when both are
/// transformed this way.
pub fn reversed_coordinate_system(sys: &GradedSystem) -> Result<GradedSystem> {
    let cm = reversible_copying(sys)?;
    let theta = reversing_from_copying(&sys.form, &sys.rho, cm)?;
    let mut out = sys.clone();
    out.coords = sys
        .coords
        .iter()
        .map(|k| theta.theta.apply(&k.adjoint()))
        .collect();
    Ok(out)
}

/// Result of [`fdb_deviation`].
#[derive(Clone, Debug)]
pub struct DeviationReport {
    pub class: TransportClass,
    /// `W(A, A^←)`.
    pub w_to_reverse: f64,
    /// `W(A^←, A)`.
    pub w_from_reverse: f64,
    /// `W(A, B)`.
    pub w_ab: f64,
    /// `W(B, A)`.
    pub w_ba: f64,
    /// Additive slack allowed on the bounds.
    pub tol: f64,
    /// `W(A, A^←) ≤ 2·W(A, B)` and `W(A^←, A) ≤ 2·W(B, A)` within `tol`.
    pub holds: bool,
}

/// Deviation-from-balance bounds: when the partner `B` satisfies detailed
/// balance, the distance from `A` to its own reverse is controlled by the
/// distance to `B`, in the modular and doubly-modular transport classes:
/// `W(A, A^←) ≤ 2 W(A, B)` and `W(A^←, A) ≤ 2 W(B, A)`.
pub fn fdb_deviation(
    sys_a: &GradedSystem,
    sys_b: &GradedSystem,
    class: TransportClass,
) -> Result<DeviationReport> {
    if matches!(class, TransportClass::F) {
        return Err(Error::Config(
            "deviation bounds hold in the modular transport classes".into(),
        ));
    }
    reversible_copying(sys_a)?;
    let fdb_b = check_fdb(sys_b)?;
    if !fdb_b.holds {
        return Err(Error::Config(format!(
            "partner system does not satisfy detailed balance (max residual {:.3e})",
            fdb_b.max_residual
        )));
    }
    let a_rev = reverse_system(sys_a)?;
    let w_to_reverse = wasserstein(sys_a, &a_rev, class)?.value;
    let w_from_reverse = wasserstein(&a_rev, sys_a, class)?.value;
    let w_ab = wasserstein(sys_a, sys_b, class)?.value;
    let w_ba = wasserstein(sys_b, sys_a, class)?.value;
    let tol = 1e-5;
    let holds =
        w_to_reverse <= 2.0 * w_ab + tol && w_from_reverse <= 2.0 * w_ba + tol;
    Ok(DeviationReport {
        class,
        w_to_reverse,
        w_from_reverse,
        w_ab,
        w_ba,
        tol,
        holds,
    })
}

impl GradedSystem {
    /// Attach the copying map implemented by the unitary `K`. The map must
    /// be state-copying; the induced reversing operation is adjoined to the
    /// dynamics under [`THETA_DYNAMICS_NAME`] (or, when a reversing dynamics
    /// is already present, verified against it).
    pub fn with_copying_map(&self, k: &CMat) -> Result<GradedSystem> {
        let cm = make_copying_map(&self.form, &self.rho, k)?;
        if !cm.is_state_copying {
            return Err(Error::BadCopyingMap(format!(
                "attached copying map must be state-copying (state residual {:.3e}, \
                 involution residual {:.3e})",
                cm.state_residual, cm.involution_residual
            )));
        }
        let theta = reversing_from_copying(&self.form, &self.rho, &cm)?;
        let mut out = self.clone();
        if let Some(existing) = out
            .dynamics
            .iter()
            .find(|nm| nm.name == THETA_DYNAMICS_NAME)
        {
            let res = dist(&existing.map.sup, &theta.theta.sup);
            if res > TOL_COPY {
                return Err(Error::BadCopyingMap(format!(
                    "dynamics already contain a reversing map that differs from the \
                     induced one (residual {res:.3e})"
                )));
            }
        } else {
            out.dynamics.push(theta.as_dynamics());
        }
        out.copying = Some(cm);
        out.validate()?;
        Ok(out)
    }

    /// True when a state-copying map is attached.
    pub fn is_reversible(&self) -> bool {
        self.copying
            .as_ref()
            .is_some_and(|cm| cm.is_state_copying)
    }
}
