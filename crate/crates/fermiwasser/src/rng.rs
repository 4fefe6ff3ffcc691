//! Seeded random generators for states, unitaries and channels.
//!
//! Every randomized property suite draws from a [`rand_chacha::ChaCha8Rng`]
//! seeded explicitly, so runs are reproducible bit-for-bit on a platform.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mat::{conj, cr, herm_part, identity, inv, kron, sqrtm_psd, trace, C, CMat, CVec};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian entry.
fn gauss(rng: &mut ChaCha8Rng) -> C {
    // Box–Muller from two uniforms, complex normal.
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    C::new(
        r * (2.0 * std::f64::consts::PI * u2).cos(),
        r * (2.0 * std::f64::consts::PI * u2).sin(),
    ) / 2f64.sqrt()
}

/// Matrix with i.i.d. complex Gaussian entries.
pub fn ginibre(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| gauss(rng))
}

/// Random Hermitian matrix (GUE-like, unnormalized).
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    herm_part(&ginibre(rng, n, n))
}

/// Haar-ish random unitary via QR of a Ginibre matrix with phase fixing.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let g = ginibre(rng, n, n);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // Normalize column phases so the distribution is Haar.
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Random faithful density matrix with smallest eigenvalue bounded below.
pub fn random_faithful_state(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> CMat {
    let g = ginibre(rng, n, n);
    let mut rho = &g * g.adjoint() + identity(n).scale(floor * n as f64);
    let t = trace(&rho).re;
    rho.scale_mut(1.0 / t);
    rho
}

/// Random faithful state that is even for the grading unitary `u`
/// (projects onto the commutant of `u` spectral blocks).
pub fn random_even_faithful_state(rng: &mut ChaCha8Rng, u: &CMat, floor: f64) -> CMat {
    let n = u.nrows();
    let raw = random_faithful_state(rng, n, floor);
    // Average over the grading: (ρ + uρu)/2 is even, remains faithful PSD.
    let mut rho = (&raw + u * &raw * u).scale(0.5);
    let t = trace(&rho).re;
    rho.scale_mut(1.0 / t);
    rho
}

/// Random even CP unital map `E: M_n → M_m` (Heisenberg picture) with
/// grading unitaries `u_a` (input algebra) and `u_b` (output algebra):
/// homogeneous Kraus operators, then unital normalization by an even PD
/// factor, preserving homogeneity.
pub fn random_even_cp_unital(
    rng: &mut ChaCha8Rng,
    u_a: &CMat,
    u_b: &CMat,
    kraus_count: usize,
) -> crate::channel::Channel {
    let n = u_a.nrows();
    let m = u_b.nrows();
    let mut kraus: Vec<CMat> = Vec::new();
    for idx in 0..kraus_count.max(2) {
        let g = ginibre(rng, n, m);
        // Homogeneous component: even for even idx, odd for odd idx.
        let sign = if idx % 2 == 0 { 1.0 } else { -1.0 };
        let k = (&g + (u_a * &g * u_b).scale(sign)).scale(0.5);
        if k.norm() > 1e-8 {
            kraus.push(k);
        }
    }
    // Unitalize: S = Σ K†K is even PD; replace K ← K S^{-1/2}.
    let mut s = CMat::zeros(m, m);
    for k in &kraus {
        s += k.adjoint() * k;
    }
    let s_inv_half = inv(&sqrtm_psd(&s).expect("kraus gram psd")).expect("kraus gram invertible");
    for k in &mut kraus {
        *k = &*k * &s_inv_half;
    }
    crate::channel::Channel::from_kraus_heisenberg(&kraus, n, m)
}

/// Random even faithful diagonal density (always even when the grading is
/// diagonal, e.g. σ_z-type lattice gradings).
pub fn random_diagonal_faithful_state(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> CMat {
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(floor..1.0)).collect();
    let s: f64 = p.iter().sum();
    for x in &mut p {
        *x /= s;
    }
    CMat::from_diagonal(&CVec::from_iterator(n, p.iter().map(|&x| cr(x))))
}

/// Grading unitary diag(±1) with a balanced-ish random sign pattern
/// (never all +1, so the grading is nontrivial).
pub fn random_diagonal_grading(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    loop {
        let signs: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        if signs.iter().any(|&s| s < 0.0) {
            return CMat::from_diagonal(&CVec::from_iterator(n, signs.iter().map(|&s| cr(s))));
        }
    }
}

/// Random grading unitary: a diag(±1) pattern conjugated by a random unitary.
pub fn random_grading(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let d = random_diagonal_grading(rng, n);
    let v = random_unitary(rng, n);
    let g = &v * d * v.adjoint();
    herm_part(&g)
}

/// Kronecker-delta sanity helper for tests: grading of a bipartite carrier.
pub fn carrier_grading(u: &CMat) -> CMat {
    kron(u, &conj(u))
}
