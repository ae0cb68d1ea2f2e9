//! Scattering algebra on `𝓗(Y)[du] = 𝓗(Y) ⊕ 𝓗(Y)du`.
//!
//! Coordinates: the degree-`p` block is `H^p ⊕ H^{p−1}du` with the `H^p`
//! coordinates first. Harmonic forms on `Y` are taken in an orthonormal
//! basis, so every block carries the standard inner product.

use serde::{Deserialize, Serialize};

use crate::error::{invariant, Error, Result};
use crate::linalg::{
    block_diag, complement, identity, intersect, max_abs, null_space, orth, projector, real, same_subspace,
    zeros, CMat,
};

/// Dimensions of the cohomology of the cross-section `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YModel {
    /// `h[p] = dim H^p(Y)` for `p = 0..n−1`; `n = h.len()` is the dimension of
    /// the glued manifold.
    pub h: Vec<usize>,
}

impl YModel {
    pub fn new(h: Vec<usize>) -> Self {
        Self { h }
    }

    /// Top degree `n = dim Z`.
    pub fn top_degree(&self) -> usize {
        self.h.len()
    }

    /// `dim H^p(Y)`, zero outside `0..n`.
    pub fn hp(&self, p: isize) -> usize {
        if p < 0 {
            0
        } else {
            self.h.get(p as usize).copied().unwrap_or(0)
        }
    }

    /// `(dim H^p, dim H^{p−1})`, the two parts of block `p`.
    pub fn split(&self, p: usize) -> (usize, usize) {
        (self.hp(p as isize), self.hp(p as isize - 1))
    }

    pub fn block_dim(&self, p: usize) -> usize {
        let (a, b) = self.split(p);
        a + b
    }

    /// Block degrees `0..=n`.
    pub fn degrees(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.top_degree()
    }

    pub fn total_dim(&self) -> usize {
        self.degrees().map(|p| self.block_dim(p)).sum()
    }

    /// Offset of block `p` inside the total space.
    pub fn block_offset(&self, p: usize) -> usize {
        (0..p).map(|q| self.block_dim(q)).sum()
    }
}

/// `χ(Y) = Σ (−1)^p dim H^p(Y)`.
pub fn chi_euler(y: &YModel) -> i64 {
    y.h.iter().enumerate().map(|(p, &h)| if p % 2 == 0 { h as i64 } else { -(h as i64) }).sum()
}

/// The operators `du∧`, `i_{∂u}` and `c(du) = du∧ − i_{∂u}` on the total space.
#[derive(Debug, Clone)]
pub struct DuOperators {
    pub wedge: CMat,
    pub interior: CMat,
    pub clifford: CMat,
}

impl DuOperators {
    pub fn new(y: &YModel) -> Self {
        let n = y.total_dim();
        let mut wedge = zeros(n, n);
        for p in 0..y.top_degree() {
            // H^p in block p  →  H^p du in block p+1
            let (hp, _) = y.split(p);
            let src = y.block_offset(p);
            let dst = y.block_offset(p + 1) + y.split(p + 1).0;
            for i in 0..hp {
                wedge[(dst + i, src + i)] = real(1.0);
            }
        }
        let interior = wedge.adjoint();
        let clifford = &wedge - &interior;
        Self { wedge, interior, clifford }
    }
}

/// A subspace `𝓛 = ⊕_p 𝓛^p_abs ⊕ 𝓛^p_rel` of `𝓗(Y)[du]` with
/// `𝓛^p_abs ⊆ H^p` and `𝓛^p_rel ⊆ H^{p−1}du`.
///
/// Bases are orthonormal; `rel[p]` is expressed in `H^{p−1}` coordinates.
#[derive(Debug, Clone)]
pub struct LimitingSubspace {
    y: YModel,
    abs: Vec<CMat>,
    rel: Vec<CMat>,
}

impl LimitingSubspace {
    /// General split subspace. Each basis is re-orthonormalized.
    pub fn from_parts(y: YModel, abs: Vec<CMat>, rel: Vec<CMat>) -> Result<Self> {
        let n = y.top_degree();
        if abs.len() != n + 1 || rel.len() != n + 1 {
            return Err(Error::Dimension(format!("need {} absolute and relative parts", n + 1)));
        }
        for p in y.degrees() {
            let (hp, hq) = y.split(p);
            if abs[p].nrows() != hp {
                return Err(invariant("abs_in_h", format!("absolute part in degree {p} is not inside H^{p}")));
            }
            if rel[p].nrows() != hq {
                return Err(invariant("rel_in_hdu", format!("relative part in degree {p} is not inside H^{{p-1}}du")));
            }
        }
        let abs = abs.iter().map(orth).collect();
        let rel = rel.iter().map(orth).collect();
        Ok(Self { y, abs, rel })
    }

    /// The subspace determined by its absolute parts: `𝓛^{p+1}_rel` is forced
    /// to be `du∧(𝓛^p_abs)^⊥`.
    pub fn from_abs(y: YModel, abs: Vec<CMat>) -> Result<Self> {
        let n = y.top_degree();
        if abs.len() != n {
            return Err(Error::Dimension(format!("need {n} absolute parts, got {}", abs.len())));
        }
        let mut full_abs = Vec::with_capacity(n + 1);
        let mut rel = vec![zeros(0, 0)];
        for (p, a) in abs.iter().enumerate() {
            if a.nrows() != y.h[p] {
                return Err(invariant("abs_in_h", format!("absolute part in degree {p} is not inside H^{p}")));
            }
            let a = orth(a);
            rel.push(complement(&a));
            full_abs.push(a);
        }
        full_abs.push(zeros(0, 0));
        Ok(Self { y, abs: full_abs, rel })
    }

    pub fn full(y: YModel) -> Self {
        let abs = y.degrees().map(|p| identity(y.split(p).0)).collect();
        let rel = y.degrees().map(|p| identity(y.split(p).1)).collect();
        Self { y, abs, rel }
    }

    pub fn zero(y: YModel) -> Self {
        let abs = y.degrees().map(|p| zeros(y.split(p).0, 0)).collect();
        let rel = y.degrees().map(|p| zeros(y.split(p).1, 0)).collect();
        Self { y, abs, rel }
    }

    pub fn ymodel(&self) -> &YModel {
        &self.y
    }

    /// Orthonormal basis of `𝓛^p_abs` in `H^p` coordinates.
    pub fn abs(&self, p: usize) -> &CMat {
        &self.abs[p]
    }

    /// Orthonormal basis of `𝓛^p_rel` in `H^{p−1}` coordinates.
    pub fn rel(&self, p: usize) -> &CMat {
        &self.rel[p]
    }

    /// Orthonormal basis of `𝓛^p` in block-`p` coordinates.
    pub fn block_basis(&self, p: usize) -> CMat {
        let a = &self.abs[p];
        let r = &self.rel[p];
        block_diag(&[a, r])
    }

    pub fn dim(&self, p: usize) -> usize {
        self.abs[p].ncols() + self.rel[p].ncols()
    }

    /// Checks `(𝓛^p_abs)^⊥ = i_{∂u} 𝓛^{p+1}_rel` in every degree, the condition
    /// that makes `2P_𝓛 − 1` anti-commute with `c(du)`.
    pub fn check_lagrangian(&self) -> Result<()> {
        let y = &self.y;
        if self.rel[0].ncols() != 0 {
            return Err(invariant("lagrangian_complement", "relative part in degree 0 must vanish"));
        }
        for p in 0..y.top_degree() {
            let a = &self.abs[p];
            let r = &self.rel[p + 1];
            if a.ncols() + r.ncols() != y.h[p] {
                return Err(invariant(
                    "lagrangian_complement",
                    format!(
                        "degree {p}: dim L_abs = {} and dim L_rel^{} = {} do not sum to h_{p} = {}",
                        a.ncols(),
                        p + 1,
                        r.ncols(),
                        y.h[p]
                    ),
                ));
            }
            let overlap = max_abs(&(a.adjoint() * r));
            if overlap > 1e-8 {
                return Err(invariant(
                    "lagrangian_complement",
                    format!("degree {p}: L_abs is not orthogonal to i(L_rel^{}) (overlap {overlap:.3e})", p + 1),
                ));
            }
        }
        Ok(())
    }

    pub fn is_lagrangian(&self) -> bool {
        self.check_lagrangian().is_ok()
    }

    /// Largest principal-angle sine against another subspace, over all parts.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.y != other.y {
            return 1.0;
        }
        self.y
            .degrees()
            .map(|p| {
                let a = crate::linalg::subspace_distance(&self.abs[p], &other.abs[p]);
                let r = crate::linalg::subspace_distance(&self.rel[p], &other.rel[p]);
                a.max(r)
            })
            .fold(0.0, f64::max)
    }
}

/// Graded operator on `𝓗(Y)[du]`, one block per degree.
#[derive(Debug, Clone)]
pub struct ScatteringMatrix {
    y: YModel,
    blocks: Vec<CMat>,
}

impl ScatteringMatrix {
    pub fn new(y: YModel, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != y.top_degree() + 1 {
            return Err(Error::Dimension(format!("need {} blocks", y.top_degree() + 1)));
        }
        for p in y.degrees() {
            let d = y.block_dim(p);
            if blocks[p].shape() != (d, d) {
                return Err(Error::Dimension(format!("block {p} must be {d}x{d}")));
            }
        }
        Ok(Self { y, blocks })
    }

    pub fn identity(y: &YModel) -> Self {
        Self { y: y.clone(), blocks: y.degrees().map(|p| identity(y.block_dim(p))).collect() }
    }

    pub fn minus_identity(y: &YModel) -> Self {
        Self { y: y.clone(), blocks: y.degrees().map(|p| -identity(y.block_dim(p))).collect() }
    }

    pub fn ymodel(&self) -> &YModel {
        &self.y
    }

    pub fn block(&self, p: usize) -> &CMat {
        &self.blocks[p]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn total(&self) -> CMat {
        let refs: Vec<&CMat> = self.blocks.iter().collect();
        block_diag(&refs)
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.blocks.iter().map(|b| max_abs(&(b.adjoint() * b - identity(b.nrows())))).fold(0.0, f64::max)
    }

    pub fn involution_defect(&self) -> f64 {
        self.blocks.iter().map(|b| max_abs(&(b * b - identity(b.nrows())))).fold(0.0, f64::max)
    }

    /// Largest entry mixing `H^p` with `H^{p−1}du`.
    pub fn grading_defect(&self) -> f64 {
        self.y
            .degrees()
            .map(|p| {
                let (a, b) = self.y.split(p);
                let blk = &self.blocks[p];
                let x = max_abs(&blk.view((0, a), (a, b)).into_owned());
                let z = max_abs(&blk.view((a, 0), (b, a)).into_owned());
                x.max(z)
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of `C c(du) + c(du) C`.
    pub fn anticommutation_defect(&self) -> f64 {
        let c = self.total();
        let cl = DuOperators::new(&self.y).clifford;
        max_abs(&(&c * &cl + &cl * &c))
    }

    fn check_grading(&self) -> Result<()> {
        let d = self.grading_defect();
        if d > 1e-10 {
            return Err(invariant("grading", format!("block mixes H and Hdu (defect {d:.3e})")));
        }
        Ok(())
    }

    /// Block-wise product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.y != other.y {
            return Err(Error::Dimension("scattering matrices on different models".into()));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        Ok(Self { y: self.y.clone(), blocks })
    }

    pub fn inverse(&self) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.clone().try_inverse().ok_or_else(|| Error::Consistency("singular scattering block".into())))
            .collect::<Result<_>>()?;
        Ok(Self { y: self.y.clone(), blocks })
    }
}

/// `C = 2P_𝓛 − 1`.
pub fn scattering_from_subspace(l: &LimitingSubspace) -> ScatteringMatrix {
    let y = l.ymodel().clone();
    let blocks = y
        .degrees()
        .map(|p| projector(&l.block_basis(p)).scale(2.0) - identity(y.block_dim(p)))
        .collect();
    ScatteringMatrix { y, blocks }
}

/// `𝓛 = ker(C − 1)` split into its `H` and `Hdu` parts.
pub fn limiting_from_scattering(c: &ScatteringMatrix) -> Result<LimitingSubspace> {
    let d = c.involution_defect();
    if d > 1e-10 {
        return Err(invariant("involutive", format!("C^2 != 1 (defect {d:.3e})")));
    }
    c.check_grading()?;
    let y = c.ymodel().clone();
    let mut abs = Vec::new();
    let mut rel = Vec::new();
    for p in y.degrees() {
        let (a, b) = y.split(p);
        let blk = c.block(p);
        let haa = blk.view((0, 0), (a, a)).into_owned() - identity(a);
        let hbb = blk.view((a, a), (b, b)).into_owned() - identity(b);
        abs.push(null_space(&haa));
        rel.push(null_space(&hbb));
    }
    LimitingSubspace::from_parts(y, abs, rel)
}

/// `C₂⁻¹C₁` for constant scattering matrices.
pub fn c12_matrix(c1: &ScatteringMatrix, c2: &ScatteringMatrix) -> Result<ScatteringMatrix> {
    c2.inverse()?.compose(c1)
}

/// Side of the decomposition `Z = Z₁ ∪ Z₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    One,
    Two,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::One => -1.0,
            Side::Two => 1.0,
        }
    }
}

/// `C_{j,bd} = (−1)^j (C_j|_H − C_j|_{Hdu})`.
pub fn c_bd(c: &ScatteringMatrix, side: Side) -> Result<ScatteringMatrix> {
    c.check_grading()?;
    let y = c.ymodel().clone();
    let blocks = y
        .degrees()
        .map(|p| {
            let (a, b) = y.split(p);
            let mut d = vec![1.0; a];
            d.extend(std::iter::repeat_n(-1.0, b));
            c.block(p) * crate::linalg::from_real_diag(&d).scale(side.sign())
        })
        .collect();
    Ok(ScatteringMatrix { y, blocks })
}

/// `dim ker(C^p − 1)` for every block.
pub fn fixed_dims(c: &ScatteringMatrix) -> Vec<usize> {
    c.blocks().iter().map(|b| null_space(&(b - identity(b.nrows()))).ncols()).collect()
}

/// `χ'(C) = Σ_p (−1)^p p dim ker(C^p − 1)`.
pub fn chi_prime_of(c: &ScatteringMatrix) -> i64 {
    weighted_alternating(&fixed_dims(c))
}

/// `Σ_p (−1)^p p x_p`.
pub fn weighted_alternating(x: &[usize]) -> i64 {
    x.iter()
        .enumerate()
        .map(|(p, &v)| {
            let t = (p * v) as i64;
            if p % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// The three scattering matrices entering the gluing formulas.
#[derive(Debug, Clone)]
pub struct GluedScattering {
    pub c1: ScatteringMatrix,
    pub c2: ScatteringMatrix,
    pub c12: ScatteringMatrix,
    pub c1_bd: ScatteringMatrix,
    pub c2_bd: ScatteringMatrix,
}

impl GluedScattering {
    pub fn new(l1: &LimitingSubspace, l2: &LimitingSubspace) -> Result<Self> {
        if l1.ymodel() != l2.ymodel() {
            return Err(Error::Dimension("limiting subspaces on different models".into()));
        }
        let c1 = scattering_from_subspace(l1);
        let c2 = scattering_from_subspace(l2);
        let c12 = c12_matrix(&c1, &c2)?;
        let c1_bd = c_bd(&c1, Side::One)?;
        let c2_bd = c_bd(&c2, Side::Two)?;
        Ok(Self { c1, c2, c12, c1_bd, c2_bd })
    }
}

/// `χ'` from the identity `χ'(C₁₂) − χ'(C_{1,bd}) − χ'(C_{2,bd}) = 2χ'`.
pub fn chi_prime_top(l1: &LimitingSubspace, l2: &LimitingSubspace) -> Result<i64> {
    let g = GluedScattering::new(l1, l2)?;
    let diff = chi_prime_of(&g.c12) - chi_prime_of(&g.c1_bd) - chi_prime_of(&g.c2_bd);
    if diff % 2 != 0 {
        return Err(Error::Parity(diff));
    }
    Ok(diff / 2)
}

/// Kernel of `C₁₂^p − 1` predicted from the subspaces:
/// `(𝓛₁^p ∩ 𝓛₂^p) ⊕ i(𝓛^{p+1}_{1,rel} ∩ 𝓛^{p+1}_{2,rel}) ⊕ du∧(𝓛^{p−1}_{1,abs} ∩ 𝓛^{p−1}_{2,abs})`.
pub fn c12_kernel_prediction(l1: &LimitingSubspace, l2: &LimitingSubspace, p: usize) -> CMat {
    let y = l1.ymodel();
    let (a, b) = y.split(p);
    let n = y.top_degree();
    let abs = intersect(l1.abs(p), l2.abs(p));
    let rel = intersect(l1.rel(p), l2.rel(p));
    let up = if p < n { intersect(l1.rel(p + 1), l2.rel(p + 1)) } else { zeros(a, 0) };
    let down = if p > 0 { intersect(l1.abs(p - 1), l2.abs(p - 1)) } else { zeros(b, 0) };
    let h_part = crate::linalg::hcat(&abs, &up);
    let du_part = crate::linalg::hcat(&rel, &down);
    orth(&block_diag(&[&h_part, &du_part]))
}

/// Kernel of `C_{j,bd}^p − 1` predicted from `𝓛_j`.
pub fn c_bd_kernel_prediction(l: &LimitingSubspace, side: Side, p: usize) -> CMat {
    let y = l.ymodel();
    let (a, b) = y.split(p);
    let n = y.top_degree();
    match side {
        Side::One => {
            let h = if p < n { l.rel(p + 1).clone() } else { zeros(a, 0) };
            block_diag(&[&h, l.rel(p)])
        }
        Side::Two => {
            let du = if p > 0 { l.abs(p - 1).clone() } else { zeros(b, 0) };
            block_diag(&[l.abs(p), &du])
        }
    }
}

pub fn kernel_of_minus_one(c: &ScatteringMatrix, p: usize) -> CMat {
    let b = c.block(p);
    null_space(&(b - identity(b.nrows())))
}

pub fn kernels_match(predicted: &CMat, actual: &CMat) -> bool {
    same_subspace(&orth(predicted), actual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_characteristics() {
        assert_eq!(chi_euler(&YModel::new(vec![1])), 1);
        assert_eq!(chi_euler(&YModel::new(vec![1, 1])), 0);
        assert_eq!(chi_euler(&YModel::new(vec![2])), 2);
    }

    #[test]
    fn du_operator_identities() {
        let y = YModel::new(vec![2, 1, 3]);
        let du = DuOperators::new(&y);
        let n = y.total_dim();
        assert!(max_abs(&(&du.wedge * &du.wedge)) == 0.0);
        assert!(max_abs(&(&du.interior * &du.interior)) == 0.0);
        assert!(max_abs(&(&du.clifford * &du.clifford + identity(n))) < 1e-15);
        assert!(max_abs(&(du.clifford.adjoint() + &du.clifford)) < 1e-15);
    }

    #[test]
    fn trivial_subspaces() {
        let y = YModel::new(vec![1]);
        let c = scattering_from_subspace(&LimitingSubspace::full(y.clone()));
        assert!(max_abs(&(c.total() - identity(2))) < 1e-15);
        assert_eq!(chi_prime_of(&c), -1);
        let m = scattering_from_subspace(&LimitingSubspace::zero(y.clone()));
        assert!(max_abs(&(m.total() + identity(2))) < 1e-15);
        assert_eq!(chi_prime_of(&m), 0);
        let back = limiting_from_scattering(&c).unwrap();
        assert_eq!(back.dim(0) + back.dim(1), 2);
        let back = limiting_from_scattering(&m).unwrap();
        assert_eq!(back.dim(0) + back.dim(1), 0);
    }

    #[test]
    fn boundary_signs_for_identity() {
        let y = YModel::new(vec![1, 2]);
        let id = ScatteringMatrix::identity(&y);
        let two = c_bd(&id, Side::Two).unwrap();
        let one = c_bd(&id, Side::One).unwrap();
        for p in y.degrees() {
            let (a, b) = y.split(p);
            for i in 0..a + b {
                let expect = if i < a { 1.0 } else { -1.0 };
                assert_eq!(two.block(p)[(i, i)].re, expect);
                assert_eq!(one.block(p)[(i, i)].re, -expect);
            }
        }
    }

    #[test]
    fn c12_of_identity_and_minus_identity() {
        let y = YModel::new(vec![1, 1]);
        let c = c12_matrix(&ScatteringMatrix::identity(&y), &ScatteringMatrix::minus_identity(&y)).unwrap();
        assert!(max_abs(&(c.total() + identity(y.total_dim()))) < 1e-15);
    }

    #[test]
    fn single_line_gives_zero_chi_prime() {
        let y = YModel::new(vec![1]);
        let l = LimitingSubspace::from_abs(y, vec![identity(1)]).unwrap();
        assert_eq!(chi_prime_top(&l, &l).unwrap(), 0);
    }

    #[test]
    fn full_and_zero_pairs_have_even_difference() {
        let y = YModel::new(vec![1]);
        assert_eq!(chi_prime_top(&LimitingSubspace::full(y.clone()), &LimitingSubspace::full(y.clone())).unwrap(), 0);
        assert_eq!(chi_prime_top(&LimitingSubspace::zero(y.clone()), &LimitingSubspace::zero(y)).unwrap(), 0);
    }

    #[test]
    fn corrupted_split_is_named() {
        let y = YModel::new(vec![2]);
        let bad = LimitingSubspace::from_parts(
            y.clone(),
            vec![crate::linalg::from_real_rows(2, 1, &[1.0, 0.0]), zeros(0, 0)],
            vec![zeros(0, 0), crate::linalg::from_real_rows(2, 1, &[1.0, 0.0])],
        )
        .unwrap();
        match bad.check_lagrangian() {
            Err(Error::Invariant { name, .. }) => assert_eq!(name, "lagrangian_complement"),
            other => panic!("expected invariant error, got {other:?}"),
        }
    }
}
