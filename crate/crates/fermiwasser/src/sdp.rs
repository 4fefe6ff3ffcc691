//! Semidefinite programming over Hermitian matrices:
//!
//!   minimize Re⟨C, X⟩   subject to   Re⟨A_k, X⟩ = b_k,   X ⪰ 0,
//!
//! with the trace pairing ⟨A, B⟩ = Tr(A†B). The solver works on the real
//! symmetric embedding
//!
//!   T(M) = [[Re M, −Im M], [Im M, Re M]],
//!
//! which doubles trace pairings — `Tr(T(A)·T(B)) = 2·Re⟨A, B⟩` — so the
//! embedded problem carries objective `T(C)` and right-hand sides `2·b_k`,
//! and real optimal values are halved on the way back out. This factor-2
//! bookkeeping is asserted by a unit test.
//!
//! Algorithm: primal-dual path following with HKM scaling and a Mehrotra
//! predictor-corrector step; the Schur complement is solved by LU. Equality
//! constraints are orthonormalized by modified Gram-Schmidt first, which
//! prunes redundant rows and detects contradictory ones (the only
//! infeasibility certificate issued without iteration). Divergence of the
//! dual iterates is reported as infeasible; anything that neither converges
//! nor diverges within the iteration budget comes back as `MaxIter` with its
//! residuals. After convergence a polish step identifies the optimal face
//! from the dual slack, re-solves the equality constraints on that face, and
//! keeps the polished point only if it is feasible and does not worsen the
//! value — this sharpens degenerate optima (e.g. zero-distance self-transport)
//! well past the interior-point gap tolerance.
//!
//! A single solve is deterministic and single-threaded; callers may run many
//! solves concurrently. `solve_projected_gradient` is an independent
//! first-order method (augmented Lagrangian with FISTA inner loops, run at
//! the complex level with no real embedding) used as a cross-check oracle.

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mat::{dist, herm_eig, herm_part, identity, trace, C, CMat};

type RMat = DMatrix<f64>;
type RVec = DVector<f64>;

/// Solver options; defaults: `tol_feas = 1e-8`, `tol_gap = 1e-7`,
/// `max_iter = 200`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpOptions {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol_feas: 1e-8,
            tol_gap: 1e-7,
            max_iter: 200,
        }
    }
}

/// Termination status of a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIter,
}

/// A Hermitian SDP in equality form.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    /// Matrix side length of the variable.
    pub dim: usize,
    /// Hermitian objective; the value is `Re⟨C, X⟩`.
    pub objective: CMat,
    constraints: Vec<(CMat, f64)>,
    pub options: SdpOptions,
    /// Optional strictly feasible starting point (e.g. a product-plan Choi
    /// matrix); used by [`SdpProblem::feasible_point`] and to warm the solver.
    pub seed: Option<CMat>,
}

/// Result of a solve. `status == Optimal` certifies
/// `primal_residual ≤ tol_feas`, `dual_gap` within tolerance and `x ⪰ 0`.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: CMat,
    pub value: f64,
    /// Best dual bound found; weak duality gives `dual_value ≤ value + tol`.
    pub dual_value: f64,
    pub primal_residual: f64,
    pub dual_gap: f64,
    pub status: SdpStatus,
    pub iterations: usize,
}

impl SdpProblem {
    pub fn new(dim: usize, objective: CMat) -> Result<Self> {
        if objective.nrows() != dim || objective.ncols() != dim {
            return Err(Error::Dimension("objective must be dim × dim".into()));
        }
        let dev = dist(&objective, &objective.adjoint());
        if dev > 1e-10 * (1.0 + objective.norm()) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self {
            dim,
            objective,
            constraints: Vec::new(),
            options: SdpOptions::default(),
            seed: None,
        })
    }

    /// Add one real equality `Re⟨a, X⟩ = b` with Hermitian `a`.
    pub fn add_constraint(&mut self, a: CMat, b: f64) -> Result<()> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(Error::Dimension("constraint matrix must be dim × dim".into()));
        }
        let dev = dist(&a, &a.adjoint());
        if dev > 1e-10 * (1.0 + a.norm()) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        self.constraints.push((a, b));
        Ok(())
    }

    /// Add the complex equality `⟨a, X⟩ = b` for arbitrary `a` by splitting
    /// it into two Hermitian constraints (Hermitian and anti-Hermitian part).
    pub fn add_complex_constraint(&mut self, a: &CMat, b: C) -> Result<()> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(Error::Dimension("constraint matrix must be dim × dim".into()));
        }
        // ⟨a, X⟩ = Tr(h X) − i·Tr(k X) with a = h + i k, h, k Hermitian.
        let h = herm_part(a);
        let k = (a - a.adjoint()).map(|z| z / C::new(0.0, 2.0));
        self.add_constraint(h, b.re)?;
        self.add_constraint(k, -b.im)
    }

    pub fn constraints(&self) -> &[(CMat, f64)] {
        &self.constraints
    }

    /// Worst relative violation of the constraint list at `x`.
    pub fn constraint_residual(&self, x: &CMat) -> f64 {
        self.constraints
            .iter()
            .map(|(a, b)| {
                let v = trace(&(a * x)).re;
                (v - b).abs() / (1.0 + b.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Objective value `Re⟨C, X⟩` at `x`.
    pub fn objective_value(&self, x: &CMat) -> f64 {
        trace(&(&self.objective * x)).re
    }

    /// Solve by the interior-point method over the real embedding.
    pub fn solve(&self) -> Result<SdpSolution> {
        let d2 = 2 * self.dim;
        let pre = match self.preprocess()? {
            Pre::Reduced(q, beta) => (q, beta),
            Pre::Contradiction(gap) => {
                return Ok(SdpSolution {
                    x: CMat::zeros(self.dim, self.dim),
                    value: f64::NAN,
                    dual_value: f64::NAN,
                    primal_residual: gap,
                    dual_gap: f64::NAN,
                    status: SdpStatus::Infeasible,
                    iterations: 0,
                });
            }
        };
        let (q, beta) = pre;
        let c_r = embed(&self.objective);
        let seed_r = self.seed.as_ref().map(embed);
        let run = ipm(d2, &c_r, &q, &beta, seed_r.as_ref(), self.options)?;

        // Back to the complex picture (extraction averages the two embedded
        // copies, which is exactly the J₀-symmetrization of the iterate).
        let x = herm_part(&extract(&run.x, self.dim));
        let z = herm_part(&extract(&run.z, self.dim));
        let mut value = self.objective_value(&x);
        let mut primal_residual = self.constraint_residual(&x);
        let dual_value = 0.5 * beta.dot(&run.y);
        let mut dual_gap = trace(&(&x * &z)).re.abs();
        let mut x_out = x;

        if run.status == SdpStatus::Optimal {
            if let Some(xp) = self.polish(&x_out, &z) {
                let vp = self.objective_value(&xp);
                let rp = self.constraint_residual(&xp);
                if rp <= self.options.tol_feas && vp <= value + 1e-9 * (1.0 + value.abs()) {
                    value = vp;
                    primal_residual = rp;
                    dual_gap = dual_gap.min((vp - dual_value).abs());
                    x_out = xp;
                }
            }
        }

        Ok(SdpSolution {
            x: x_out,
            value,
            dual_value,
            primal_residual,
            dual_gap,
            status: run.status,
            iterations: run.iterations,
        })
    }

    /// A strictly feasible interior point: validates and (if needed) centers
    /// a caller-supplied seed, otherwise solves for one. Contradictory
    /// constraints yield [`Error::Infeasible`].
    pub fn feasible_point(&self) -> Result<CMat> {
        let (q, beta) = match self.preprocess()? {
            Pre::Reduced(q, beta) => (q, beta),
            Pre::Contradiction(_) => {
                return Err(Error::Infeasible("contradictory equality constraints".into()))
            }
        };
        if let Some(seed) = &self.seed {
            if self.constraint_residual(seed) > 1e-7 {
                return Err(Error::Config(
                    "supplied seed violates the constraints".into(),
                ));
            }
            return self.center(seed.clone(), &q);
        }
        // Minimum-norm affine solution (rows of q are orthonormal).
        let x_mn = herm_part(&extract(&smat(&(q.transpose() * &beta), 2 * self.dim), self.dim));
        let lo = min_eig_c(&x_mn)?;
        if lo >= 1e-6 {
            return Ok(x_mn);
        }
        let centered = self.center(x_mn, &q)?;
        if min_eig_c(&centered)? >= 1e-9 {
            return Ok(centered);
        }
        // Last resort: drive the interior-point method with a zero objective;
        // it converges to an analytic-center-like interior point when the
        // feasible set has one.
        let mut p = self.clone();
        p.objective = CMat::zeros(self.dim, self.dim);
        p.seed = None;
        let sol = p.solve()?;
        if sol.status == SdpStatus::Optimal && min_eig_c(&sol.x)? > 0.0 {
            Ok(sol.x)
        } else {
            Err(Error::Infeasible("no strictly feasible point found".into()))
        }
    }

    /// Minimum-norm correction of `x` onto the affine span of the equality
    /// constraints (the PSD cone is not enforced here).
    pub fn project_onto_constraints(&self, x: &CMat) -> Result<CMat> {
        let (q, beta) = match self.preprocess()? {
            Pre::Reduced(q, beta) => (q, beta),
            Pre::Contradiction(_) => {
                return Err(Error::Infeasible(
                    "contradictory equality constraints".into(),
                ))
            }
        };
        let v = svec(&embed(x));
        let corrected = &v + q.transpose() * (beta - &q * &v);
        Ok(herm_part(&extract(
            &smat(&corrected, 2 * self.dim),
            self.dim,
        )))
    }

    /// Move along the projection of the identity onto the constraint null
    /// space to push the smallest eigenvalue up without leaving the affine
    /// feasible set.
    fn center(&self, x: CMat, q: &RMat) -> Result<CMat> {
        let lo = min_eig_c(&x)?;
        if lo >= 1e-6 {
            return Ok(x);
        }
        let id_s = svec(&embed(&identity(self.dim)));
        let proj = &id_s - q.transpose() * (q * &id_s);
        if proj.norm() <= 1e-12 {
            return Ok(x);
        }
        let dir = herm_part(&extract(&smat(&proj, 2 * self.dim), self.dim));
        let span = 5.0 * (1.0 + trace(&x).re.abs());
        let mut best = x.clone();
        let mut best_lo = lo;
        for step in 1..=50 {
            let t = span * step as f64 / 50.0;
            let cand = &x + dir.scale(t);
            let l = min_eig_c(&cand)?;
            if l > best_lo {
                best_lo = l;
                best = cand;
            }
        }
        Ok(best)
    }

    fn preprocess(&self) -> Result<Pre> {
        let d2 = 2 * self.dim;
        let s_dim = d2 * (d2 + 1) / 2;
        let mut rows: Vec<RVec> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for (a, b) in &self.constraints {
            let mut v = svec(&embed(a));
            let mut beta = 2.0 * *b;
            let orig = v.norm().max(b.abs());
            for (u, ub) in rows.iter().zip(&rhs) {
                let c = u.dot(&v);
                v -= u * c;
                beta -= ub * c;
            }
            if v.norm() <= 1e-12 * (1.0 + orig) {
                if beta.abs() > 1e-9 * (1.0 + orig) {
                    return Ok(Pre::Contradiction(beta.abs()));
                }
                continue; // redundant row
            }
            let nrm = v.norm();
            rows.push(v / nrm);
            rhs.push(beta / nrm);
        }
        let r = rows.len();
        let mut q = RMat::zeros(r, s_dim);
        for (k, row) in rows.iter().enumerate() {
            q.row_mut(k).copy_from(&row.transpose());
        }
        Ok(Pre::Reduced(q, RVec::from_vec(rhs)))
    }

    /// Face polish: restrict to the near-null space of the dual slack,
    /// re-solve the equalities there by least squares, and return the
    /// PSD-projected candidate (validated by the caller).
    fn polish(&self, x: &CMat, z: &CMat) -> Option<CMat> {
        let d = self.dim;
        let (vals, vecs) = herm_eig(z).ok()?;
        let top = vals.last().copied().unwrap_or(0.0).max(0.0);
        let kept: Vec<usize> = (0..d).filter(|&i| vals[i] <= 1e-5 * (1.0 + top)).collect();
        let f = kept.len();
        if f == 0 || f == d {
            return None;
        }
        let mut v = CMat::zeros(d, f);
        for (col, &i) in kept.iter().enumerate() {
            v.column_mut(col).copy_from(&vecs.column(i));
        }
        // Hermitian basis of the face: f² real parameters.
        let basis = herm_basis(f);
        let r = self.constraints.len();
        let mut m = RMat::zeros(r, basis.len());
        let mut b = RVec::zeros(r);
        for (k, (a, bk)) in self.constraints.iter().enumerate() {
            for (t, e) in basis.iter().enumerate() {
                m[(k, t)] = trace(&(a * &v * e * v.adjoint())).re;
            }
            b[k] = *bk;
        }
        let svd = m.svd(true, true);
        let w = svd.solve(&b, 1e-12).ok()?;
        let mut h = CMat::zeros(f, f);
        for (t, e) in basis.iter().enumerate() {
            h += e.scale(w[t]);
        }
        // Project the face variable onto the PSD cone.
        let (hv, hu) = herm_eig(&herm_part(&h)).ok()?;
        let mut hp = CMat::zeros(f, f);
        for (i, &ev) in hv.iter().enumerate() {
            if ev > 0.0 {
                let col = hu.column(i);
                hp += (col * col.adjoint()).scale(ev);
            }
        }
        let cand = &v * hp * v.adjoint();
        // Seed it with the interior solution if the face missed badly.
        if dist(&cand, x) > 10.0 * (1.0 + x.norm()) {
            return None;
        }
        Some(herm_part(&cand))
    }

    /// Serialize the problem for external cross-checks.
    pub fn to_json(&self) -> String {
        let mat = |m: &CMat| -> Value {
            let rows: Vec<Value> = (0..m.nrows())
                .map(|i| {
                    let cols: Vec<Value> =
                        (0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect();
                    Value::Array(cols)
                })
                .collect();
            Value::Array(rows)
        };
        let cons: Vec<Value> = self
            .constraints
            .iter()
            .map(|(a, b)| json!({"a": mat(a), "b": b}))
            .collect();
        json!({
            "dim": self.dim,
            "objective": mat(&self.objective),
            "constraints": cons,
            "options": {
                "tol_feas": self.options.tol_feas,
                "tol_gap": self.options.tol_gap,
                "max_iter": self.options.max_iter,
            },
        })
        .to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let dim = v["dim"].as_u64().ok_or_else(bad_json)? as usize;
        let mat = |val: &Value| -> Result<CMat> {
            let rows = val.as_array().ok_or_else(bad_json)?;
            let nr = rows.len();
            let nc = rows
                .first()
                .and_then(|r| r.as_array())
                .map(|r| r.len())
                .unwrap_or(0);
            let mut m = CMat::zeros(nr, nc);
            for (i, row) in rows.iter().enumerate() {
                let row = row.as_array().ok_or_else(bad_json)?;
                if row.len() != nc {
                    return Err(bad_json());
                }
                for (j, z) in row.iter().enumerate() {
                    let pair = z.as_array().ok_or_else(bad_json)?;
                    if pair.len() != 2 {
                        return Err(bad_json());
                    }
                    let re = pair[0].as_f64().ok_or_else(bad_json)?;
                    let im = pair[1].as_f64().ok_or_else(bad_json)?;
                    m[(i, j)] = C::new(re, im);
                }
            }
            Ok(m)
        };
        let mut p = SdpProblem::new(dim, mat(&v["objective"])?)?;
        for item in v["constraints"].as_array().ok_or_else(bad_json)? {
            p.add_constraint(mat(&item["a"])?, item["b"].as_f64().ok_or_else(bad_json)?)?;
        }
        if let Some(opts) = v.get("options") {
            p.options = SdpOptions {
                tol_feas: opts["tol_feas"].as_f64().ok_or_else(bad_json)?,
                tol_gap: opts["tol_gap"].as_f64().ok_or_else(bad_json)?,
                max_iter: opts["max_iter"].as_u64().ok_or_else(bad_json)? as usize,
            };
        }
        Ok(p)
    }
}

enum Pre {
    Reduced(RMat, RVec),
    Contradiction(f64),
}

fn bad_json() -> Error {
    Error::Config("malformed SDP JSON".into())
}

struct IpmRun {
    x: RMat,
    z: RMat,
    y: RVec,
    status: SdpStatus,
    iterations: usize,
}

/// Core real-symmetric interior-point iteration (HKM + Mehrotra).
fn ipm(
    d2: usize,
    c: &RMat,
    q: &RMat,
    beta: &RVec,
    seed: Option<&RMat>,
    opts: SdpOptions,
) -> Result<IpmRun> {
    let r = q.nrows();
    let id = RMat::identity(d2, d2);
    let b_scale = 1.0 + beta.amax();
    let c_scale = 1.0 + c.norm();
    let mut x = match seed {
        Some(s) if min_eig_r(s)? >= 1e-6 => s.clone(),
        _ => id.scale(b_scale),
    };
    let mut z = id.scale(c_scale);
    let mut y = RVec::zeros(r);
    let mut status = SdpStatus::MaxIter;
    let mut iterations = opts.max_iter;

    for iter in 0..opts.max_iter {
        let xz = (&x * &z).trace();
        let mu = xz / d2 as f64;
        let rp = beta - q * svec(&x);
        let rd = c - smat(&(q.transpose() * &y), d2) - &z;
        let pres = rp.norm() / b_scale;
        let dres = rd.norm() / c_scale;
        let obj = (c.transpose() * &x).trace();
        let relgap = xz.abs() / (1.0 + obj.abs());
        if pres <= opts.tol_feas && dres <= opts.tol_feas && relgap <= opts.tol_gap {
            status = SdpStatus::Optimal;
            iterations = iter;
            break;
        }
        if y.amax() > 1e10 * b_scale && pres > 1e3 * opts.tol_feas {
            status = SdpStatus::Infeasible;
            iterations = iter;
            break;
        }

        let Some(chz) = nalgebra::Cholesky::new(z.clone()) else {
            iterations = iter;
            break;
        };
        let zinv = chz.inverse();

        // Schur complement M[k,l] = Tr(A_k · X · A_l · Z⁻¹).
        let mut schur = RMat::zeros(r, r);
        for l in 0..r {
            let a_l = smat(&q.row(l).transpose(), d2);
            let w = sym(&(&x * a_l * &zinv));
            schur.column_mut(l).copy_from(&(q * svec(&w)));
        }
        let lu = schur.clone().lu();

        // Predictor (affine scaling, σ = 0).
        let base_aff = -&x - sym(&(&x * &rd * &zinv));
        let rhs_aff = &rp - q * svec(&base_aff);
        let Some(dy_aff) = lu.solve(&rhs_aff) else {
            iterations = iter;
            break;
        };
        let dz_aff = &rd - smat(&(q.transpose() * &dy_aff), d2);
        let dx_aff = sym(&(-&x - &x * &dz_aff * &zinv));
        let ap_aff = max_step(&x, &dx_aff)?.min(1.0);
        let ad_aff = max_step(&z, &dz_aff)?.min(1.0);
        let mu_aff = ((&x + dx_aff.scale(ap_aff)) * (&z + dz_aff.scale(ad_aff))).trace()
            / d2 as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(1e-8, 1.0);

        // Corrector with the Mehrotra second-order term.
        let corr = &dx_aff * &dz_aff;
        let base = &zinv.scale(sigma * mu) - &x - sym(&((&x * &rd + &corr) * &zinv));
        let rhs = &rp - q * svec(&base);
        let Some(dy) = lu.solve(&rhs) else {
            iterations = iter;
            break;
        };
        let dz = &rd - smat(&(q.transpose() * &dy), d2);
        let dx = sym(&(&zinv.scale(sigma * mu) - &x - (&x * &dz + &corr) * &zinv));
        let ap = (0.98 * max_step(&x, &dx)?).min(1.0);
        let ad = (0.98 * max_step(&z, &dz)?).min(1.0);
        x = sym(&(&x + dx.scale(ap)));
        y += dy.scale(ad);
        z = sym(&(&z + dz.scale(ad)));
    }

    Ok(IpmRun {
        x,
        z,
        y,
        status,
        iterations,
    })
}

/// Largest step `α` with `s + α·ds ⪰ 0` (capped at 1000).
fn max_step(s: &RMat, ds: &RMat) -> Result<f64> {
    let Some(ch) = nalgebra::Cholesky::new(s.clone()) else {
        return Ok(0.0);
    };
    let l = ch.l();
    let step1 = l
        .solve_lower_triangular(ds)
        .ok_or_else(|| Error::Solver("triangular solve failed".into()))?;
    let step2 = l
        .solve_lower_triangular(&step1.transpose())
        .ok_or_else(|| Error::Solver("triangular solve failed".into()))?;
    let lo = min_eig_r(&sym(&step2))?;
    if lo >= -1e-13 {
        Ok(1e3)
    } else {
        Ok(-1.0 / lo)
    }
}

fn sym(m: &RMat) -> RMat {
    (m + m.transpose()).scale(0.5)
}

/// Real embedding `T(M) = [[Re M, −Im M], [Im M, Re M]]`.
fn embed(m: &CMat) -> RMat {
    let d = m.nrows();
    let mut out = RMat::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            out[(i, j)] = m[(i, j)].re;
            out[(d + i, d + j)] = m[(i, j)].re;
            out[(i, d + j)] = -m[(i, j)].im;
            out[(d + i, j)] = m[(i, j)].im;
        }
    }
    out
}

/// Inverse of [`embed`], averaging the two copies (J₀-symmetrization).
fn extract(y: &RMat, d: usize) -> CMat {
    let mut out = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let re = 0.5 * (y[(i, j)] + y[(d + i, d + j)]);
            let im = 0.5 * (y[(d + i, j)] - y[(i, d + j)]);
            out[(i, j)] = C::new(re, im);
        }
    }
    out
}

/// Isometric vectorization of real symmetric matrices
/// (off-diagonals scaled by √2 so that `⟨svec a, svec b⟩ = Tr(ab)`).
fn svec(m: &RMat) -> RVec {
    let d = m.nrows();
    let mut out = RVec::zeros(d * (d + 1) / 2);
    let mut t = 0;
    let s2 = std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in i..d {
            out[t] = if i == j { m[(i, i)] } else { s2 * m[(i, j)] };
            t += 1;
        }
    }
    out
}

fn smat(v: &RVec, d: usize) -> RMat {
    let mut out = RMat::zeros(d, d);
    let mut t = 0;
    let s2 = std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in i..d {
            if i == j {
                out[(i, i)] = v[t];
            } else {
                out[(i, j)] = v[t] / s2;
                out[(j, i)] = v[t] / s2;
            }
            t += 1;
        }
    }
    out
}

fn min_eig_r(m: &RMat) -> Result<f64> {
    let c = m.map(|x| C::new(x, 0.0));
    let (vals, _) = herm_eig(&herm_part(&c))?;
    Ok(vals[0])
}

fn min_eig_c(m: &CMat) -> Result<f64> {
    let (vals, _) = herm_eig(&herm_part(m))?;
    Ok(vals[0])
}

/// Orthonormal-free Hermitian basis of `M_f` (f² elements).
fn herm_basis(f: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(f * f);
    for i in 0..f {
        let mut e = CMat::zeros(f, f);
        e[(i, i)] = C::new(1.0, 0.0);
        out.push(e);
    }
    for i in 0..f {
        for j in i + 1..f {
            let mut e = CMat::zeros(f, f);
            e[(i, j)] = C::new(1.0, 0.0);
            e[(j, i)] = C::new(1.0, 0.0);
            out.push(e);
            let mut e = CMat::zeros(f, f);
            e[(i, j)] = C::new(0.0, 1.0);
            e[(j, i)] = C::new(0.0, -1.0);
            out.push(e);
        }
    }
    out
}

/// Independent first-order solver: augmented Lagrangian outer loop with
/// FISTA (projected accelerated gradient) inner minimization, run entirely
/// in complex Hermitian arithmetic. Slow but reliable at small sizes; used
/// to cross-check the interior-point values.
pub fn solve_projected_gradient(
    p: &SdpProblem,
    outer_iters: usize,
    inner_iters: usize,
) -> Result<f64> {
    let d = p.dim;
    let cons = p.constraints();
    let r = cons.len();
    let mut x = match &p.seed {
        Some(s) => herm_part(s),
        None => identity(d),
    };
    let mut lam = vec![0.0; r];
    let mut rho = 1.0;
    let a_norm_sq: f64 = cons.iter().map(|(a, _)| a.norm_squared()).sum::<f64>() + 1.0;
    let mut prev_res = f64::INFINITY;

    let psd = |m: &CMat| -> Result<CMat> {
        let (vals, vecs) = herm_eig(&herm_part(m))?;
        let mut out = CMat::zeros(m.nrows(), m.ncols());
        for (i, &v) in vals.iter().enumerate() {
            if v > 0.0 {
                let col = vecs.column(i);
                out += (col * col.adjoint()).scale(v);
            }
        }
        Ok(out)
    };

    for _ in 0..outer_iters {
        // FISTA on  f(X) = Re⟨C,X⟩ + Σ λ_k g_k + (ρ/2) Σ g_k²  over X ⪰ 0.
        let lip = rho * a_norm_sq;
        let step = 1.0 / lip;
        let mut yv = x.clone();
        let mut t: f64 = 1.0;
        for _ in 0..inner_iters {
            let mut grad = p.objective.clone();
            for (k, (a, b)) in cons.iter().enumerate() {
                let g = trace(&(a * &yv)).re - b;
                grad += a.scale(lam[k] + rho * g);
            }
            let x_new = psd(&(&yv - grad.scale(step)))?;
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            yv = &x_new + (&x_new - &x).scale((t - 1.0) / t_new);
            if dist(&x_new, &x) <= 1e-12 * (1.0 + x.norm()) {
                x = x_new;
                break;
            }
            x = x_new;
            t = t_new;
        }
        let mut res: f64 = 0.0;
        for (k, (a, b)) in cons.iter().enumerate() {
            let g = trace(&(a * &x)).re - b;
            lam[k] += rho * g;
            res = res.max(g.abs());
        }
        if res <= 1e-10 {
            break;
        }
        if res > 0.5 * prev_res {
            rho = (rho * 2.0).min(1e7);
        }
        prev_res = res;
    }
    Ok(p.objective_value(&x))
}
