//! Seeded random instances: subspaces, projections, complexes, scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::complex::FiniteComplex;
use crate::linalg::{c, identity, orth, zeros, CMat, HermitianSpace, OrthoProjection};
use crate::scattering::{LimitingSubspace, YModel};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derived seed for the `i`-th item of a batch, so batches can be generated
/// independently of evaluation order.
pub fn child_seed(seed: u64, i: u64) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(i.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Random `k`-dimensional subspace of `C^n` (orthonormal basis).
pub fn subspace(rng: &mut impl Rng, n: usize, k: usize) -> CMat {
    if k == 0 || n == 0 {
        return zeros(n, 0);
    }
    let q = orth(&gaussian(rng, n, k.min(n)));
    debug_assert_eq!(q.ncols(), k.min(n));
    q
}

pub fn unitary(rng: &mut impl Rng, n: usize) -> CMat {
    if n == 0 {
        return identity(0);
    }
    gaussian(rng, n, n).qr().q()
}

pub fn hermitian(rng: &mut impl Rng, n: usize) -> CMat {
    let g = gaussian(rng, n, n);
    (&g + g.adjoint()).scale(0.5)
}

/// Random positive definite Gram matrix with condition number at most ~20.
pub fn gram(rng: &mut impl Rng, n: usize) -> CMat {
    let u = unitary(rng, n);
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..10.0)).collect();
    let d = crate::linalg::from_real_diag(&d);
    let g = &u * d * u.adjoint();
    crate::linalg::hermitian_part(&g)
}

/// Random Lagrangian limiting subspace: each `𝓛^p_abs` has a uniformly drawn
/// dimension in `0..=h_p`.
pub fn lagrangian(rng: &mut impl Rng, y: &YModel) -> LimitingSubspace {
    let abs = y
        .h
        .iter()
        .map(|&h| {
            let k = rng.random_range(0..=h);
            subspace(rng, h, k)
        })
        .collect();
    LimitingSubspace::from_abs(y.clone(), abs).expect("shapes match the model")
}

/// Random model with `h_p ∈ 0..=max_h[p]`.
pub fn ymodel(rng: &mut impl Rng, max_h: &[usize]) -> YModel {
    YModel::new(max_h.iter().map(|&m| rng.random_range(0..=m)).collect())
}

/// Random pair of Lagrangian subspaces on a random model bounded by `max_h`.
pub fn subspace_pair(seed: u64, max_h: &[usize]) -> (LimitingSubspace, LimitingSubspace) {
    let mut r = rng(seed);
    let y = ymodel(&mut r, max_h);
    let l1 = lagrangian(&mut r, &y);
    let l2 = lagrangian(&mut r, &y);
    (l1, l2)
}

/// Random orthogonal projection of random rank on `C^n` with a random metric.
pub fn projection_pair(rng: &mut impl Rng, n: usize) -> (OrthoProjection, OrthoProjection) {
    let space = HermitianSpace::new(gram(rng, n)).expect("random gram is valid");
    let k1 = rng.random_range(0..=n);
    let k2 = rng.random_range(0..=n);
    let b1 = gaussian(rng, n, k1);
    let b2 = gaussian(rng, n, k2);
    (
        OrthoProjection::onto_span(space.clone(), &b1).expect("shapes match"),
        OrthoProjection::onto_span(space, &b2).expect("shapes match"),
    )
}

/// Random exact complex with `len` spaces starting in degree `offset`.
///
/// Built in an orthonormal frame as a sum of isomorphisms between summands
/// `U_j ⊂ V^j` and `W_{j+1} ⊂ V^{j+1}`, then transported to random Gram
/// metrics and random bases.
pub fn exact_complex(rng: &mut impl Rng, len: usize, max_rank: usize, offset: i64) -> FiniteComplex {
    assert!(len >= 2);
    // ranks[j] = rank of ∂_j, j = 0..len-2
    let ranks: Vec<usize> = (0..len - 1).map(|_| rng.random_range(1..=max_rank)).collect();
    let dims: Vec<usize> = (0..len)
        .map(|j| {
            let r_in = if j > 0 { ranks[j - 1] } else { 0 };
            let r_out = ranks.get(j).copied().unwrap_or(0);
            r_in + r_out
        })
        .collect();
    // Orthonormal frame: V^j = W_j (image of ∂_{j-1}) ⊕ U_j (complement).
    let mut maps = Vec::with_capacity(len - 1);
    for j in 0..len - 1 {
        let (rin_src, r) = (if j > 0 { ranks[j - 1] } else { 0 }, ranks[j]);
        let mut m = zeros(dims[j + 1], dims[j]);
        let core = crate::linalg::hermitian_part(&gaussian(rng, r, r)) + identity(r).scale(3.0);
        let core = &unitary(rng, r) * core;
        m.view_mut((0, rin_src), (r, r)).copy_from(&core);
        maps.push(m);
    }
    // Random change of basis in each degree, condition number at most 4: x = B y, so ∂' = B_{j+1}⁻¹ ∂ B_j.
    let bases: Vec<CMat> = dims
        .iter()
        .map(|&n| {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
            unitary(rng, n) * crate::linalg::from_real_diag(&d) * unitary(rng, n)
        })
        .collect();
    let maps = maps
        .iter()
        .enumerate()
        .map(|(j, m)| bases[j + 1].clone().try_inverse().expect("generic basis") * m * &bases[j])
        .collect();
    let spaces = dims.iter().map(|&n| HermitianSpace::new(gram(rng, n)).expect("valid gram")).collect();
    FiniteComplex::starting_at(offset, spaces, maps).expect("composition vanishes by construction")
}
