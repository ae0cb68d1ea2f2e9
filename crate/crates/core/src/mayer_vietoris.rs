//! The limiting-value exact sequence of a pair `(𝓛₁, 𝓛₂)`, its torsion, and a
//! finite model of the `R`-scaled Mayer–Vietoris sequence.
//!
//! Degrees are 0-based. For `p = 0..=n` the sequence has
//! `V^{3p} = 𝓛^p_{1,rel}`, `V^{3p+1} = 𝓛₁^p ∩ 𝓛₂^p` (absolute part first) and
//! `V^{3p+2} = 𝓛^p_{2,abs}`, with maps `α_p`, `β_p`, `δ_p`.

use std::ops::AddAssign;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::FiniteComplex;
use crate::error::{invariant, Error, Result};
use crate::exec::Exec;
use crate::linalg::{
    block_diag, det_star_std, hermitian_part, identity, intersect, op_norm, rank, zeros, CMat, HermitianSpace,
};
use crate::sample::{gaussian, hermitian, rng};
use crate::scattering::{chi_prime_of, chi_prime_top, GluedScattering, LimitingSubspace, YModel};
use crate::zeta::weighted_log_det_term;

fn sign(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn alt(x: &[usize]) -> i64 {
    x.iter().enumerate().map(|(p, &v)| if p % 2 == 0 { v as i64 } else { -(v as i64) }).sum()
}

#[derive(Debug, Clone)]
pub struct LSequence {
    pub complex: FiniteComplex,
    /// `a_p = rank α_p`.
    pub a: Vec<usize>,
    /// `b_p = rank β_p`.
    pub b: Vec<usize>,
    /// `d_p = rank δ_p`.
    pub d: Vec<usize>,
    /// `dim 𝓛^p_{1,rel}`.
    pub dim_rel1: Vec<usize>,
    /// `dim 𝓛₁^p ∩ 𝓛₂^p`.
    pub dim_cap: Vec<usize>,
    /// `dim 𝓛^p_{2,abs}`.
    pub dim_abs2: Vec<usize>,
}

/// The three maps of one degree, in orthonormal bases of the spaces.
struct DegreeMaps {
    alpha: CMat,
    beta: CMat,
    delta: CMat,
}

fn degree_maps(l1: &LimitingSubspace, l2: &LimitingSubspace, p: usize) -> DegreeMaps {
    let y = l1.ymodel();
    let n = y.top_degree();
    let r1 = l1.rel(p);
    let a2 = l2.abs(p);
    let cap_abs = intersect(l1.abs(p), a2);
    let cap_rel = intersect(r1, l2.rel(p));
    // α: project onto 𝓛_{1,rel} ∩ 𝓛_{2,rel}, then include
    let alpha = crate::linalg::vcat(&zeros(cap_abs.ncols(), r1.ncols()), &(cap_rel.adjoint() * r1));
    // β: include 𝓛_{1,abs} ∩ 𝓛_{2,abs}, kill the relative part
    let beta = crate::linalg::hcat(&(a2.adjoint() * &cap_abs), &zeros(a2.ncols(), cap_rel.ncols()));
    // δ: du∧ followed by projection onto 𝓛^{p+1}_{1,rel}
    let delta = if p < n { l1.rel(p + 1).adjoint() * a2 } else { zeros(0, a2.ncols()) };
    DegreeMaps { alpha, beta, delta }
}

pub fn build_l_sequence(l1: &LimitingSubspace, l2: &LimitingSubspace) -> Result<LSequence> {
    if l1.ymodel() != l2.ymodel() {
        return Err(Error::Dimension("limiting subspaces on different models".into()));
    }
    let y = l1.ymodel();
    let mut spaces = Vec::new();
    let mut maps = Vec::new();
    let (mut a, mut b, mut d) = (Vec::new(), Vec::new(), Vec::new());
    let (mut dim_rel1, mut dim_cap, mut dim_abs2) = (Vec::new(), Vec::new(), Vec::new());
    for p in y.degrees() {
        let m = degree_maps(l1, l2, p);
        dim_rel1.push(m.alpha.ncols());
        dim_cap.push(m.alpha.nrows());
        dim_abs2.push(m.beta.nrows());
        a.push(rank(&m.alpha));
        b.push(rank(&m.beta));
        d.push(rank(&m.delta));
        spaces.push(HermitianSpace::standard(m.alpha.ncols()));
        spaces.push(HermitianSpace::standard(m.alpha.nrows()));
        spaces.push(HermitianSpace::standard(m.beta.nrows()));
        maps.push(m.alpha);
        maps.push(m.beta);
        if p < y.top_degree() {
            maps.push(m.delta);
        }
    }
    let complex = FiniteComplex::new(spaces, maps)
        .map_err(|e| invariant("l_sequence_complex", format!("maps do not form a complex: {e}")))?;
    if let Some(deg) = complex.exactness_defect() {
        return Err(invariant("l_sequence_exact", format!("sequence is not exact at degree {deg}")));
    }
    Ok(LSequence { complex, a, b, d, dim_rel1, dim_cap, dim_abs2 })
}

impl LSequence {
    /// `χ' = Σ_p (−1)^p d_p`.
    pub fn chi_prime(&self) -> i64 {
        alt(&self.d)
    }

    /// `Σ_p (−1)^p (a_p − b_p)`, which equals `χ'(C₁₂)`.
    pub fn chi_prime_c12(&self) -> i64 {
        alt(&self.a) - alt(&self.b)
    }

    /// `Σ_p (−1)^p (dim 𝓛^p_{1,rel} − dim 𝓛₁^p∩𝓛₂^p + dim 𝓛^p_{2,abs})`;
    /// zero by exactness.
    pub fn euler_sum(&self) -> i64 {
        alt(&self.dim_rel1) - alt(&self.dim_cap) + alt(&self.dim_abs2)
    }

    /// Degrees where `dim 𝓛₁^p ∩ 𝓛₂^p != a_p + b_p`.
    pub fn cap_rank_failures(&self) -> Vec<usize> {
        (0..self.dim_cap.len()).filter(|&p| self.dim_cap[p] != self.a[p] + self.b[p]).collect()
    }
}

/// Torsion of the sequence with the metrics restricted from `𝓗(Y)[du]`.
pub fn torsion_l(seq: &LSequence) -> Result<f64> {
    seq.complex.torsion()
}

/// The two product formulas for the torsion of the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionForms {
    /// `∏_p det*((2 − S₁^pS₂^p − S₂^pS₁^p)/4)^{−(−1)^p/4}`, with
    /// `S_j^p = 1 on 𝓛^p_{j,abs}`, `−1 on its complement in H^p`.
    pub reflections: f64,
    /// `∏_p det*((2 − C₁₂^p − (C₁₂^p)⁻¹)/4)^{(−1)^p p/4}`.
    pub c12: f64,
}

pub fn torsion_l_forms(l1: &LimitingSubspace, l2: &LimitingSubspace) -> Result<TorsionForms> {
    let y = l1.ymodel();
    let mut log_s = 0.0;
    for p in 0..y.top_degree() {
        let h = y.h[p];
        let refl = |q: &CMat| crate::linalg::projector(q).scale(2.0) - identity(h);
        let (s1, s2) = (refl(l1.abs(p)), refl(l2.abs(p)));
        let m = (identity(h).scale(2.0) - &s1 * &s2 - &s2 * &s1).scale(0.25);
        log_s -= 0.25 * sign(p) * det_star_std(&hermitian_part(&m))?.ln();
    }
    let g = GluedScattering::new(l1, l2)?;
    let log_c = 0.5 * weighted_log_det_term(&g.c12)?;
    Ok(TorsionForms { reflections: log_s.exp(), c12: log_c.exp() })
}

/// Closed form of the torsion; both product formulas are evaluated and must
/// agree.
pub fn torsion_l_closed_form(l1: &LimitingSubspace, l2: &LimitingSubspace) -> Result<f64> {
    let f = torsion_l_forms(l1, l2)?;
    let rel = (f.reflections / f.c12 - 1.0).abs();
    if rel > 1e-9 {
        return Err(Error::Consistency(format!(
            "torsion product formulas disagree: {} vs {} (relative {rel:.3e})",
            f.reflections, f.c12
        )));
    }
    Ok(f.c12)
}

/// `2^{χ'(C₁₂)/2} R^{χ'} ∏_p det*((2 − C₁₂^p − (C₁₂^p)⁻¹)/4)^{(p/4)(−1)^p}`.
pub fn mv_asymptotic_rhs(l1: &LimitingSubspace, l2: &LimitingSubspace, r: f64) -> Result<f64> {
    Ok(log_mv_asymptotic_rhs(l1, l2, r)?.exp())
}

pub fn log_mv_asymptotic_rhs(l1: &LimitingSubspace, l2: &LimitingSubspace, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    let g = GluedScattering::new(l1, l2)?;
    let chi = chi_prime_top(l1, l2)?;
    Ok(0.5 * chi_prime_of(&g.c12) as f64 * 2f64.ln() + chi as f64 * r.ln() + 0.5 * weighted_log_det_term(&g.c12)?)
}

/// Bounded corrections added to the leading-order diagram.
///
/// Every space gets an `O(1)` Hermitian term on its `𝓛` block, an `O(1)`
/// coupling between its `L²` and `𝓛` blocks, and an `e^{−cR}` term on the
/// whole metric, each of operator norm at most `magnitude`. Maps are
/// conjugated by `g = [[1, εY], [0, 1 + (ε/R)F]]`, which keeps the row exact.
/// The random data depend on `seed` only, not on `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub magnitude: f64,
    pub seed: u64,
    /// Rate `c` of the exponentially small terms.
    pub decay: f64,
}

/// Finite model of the middle row of the Mayer–Vietoris diagram at length
/// `R`: the `L²` parts `K₁^p`, `K₂^p` with their canonical maps, summed with
/// the limiting sequence carrying maps `½α`, `β`, `R⁻¹δ` and metrics `R`,
/// `2R`, `R`.
#[derive(Debug, Clone)]
pub struct ScaledDiagram {
    pub l1: LimitingSubspace,
    pub l2: LimitingSubspace,
    /// `dim K₁^p` for `p = 0..=n`.
    pub k1: Vec<usize>,
    /// `dim K₂^p` for `p = 0..=n`.
    pub k2: Vec<usize>,
    pub r: f64,
    pub perturbation: Option<Perturbation>,
}

impl ScaledDiagram {
    pub fn new(l1: LimitingSubspace, l2: LimitingSubspace, r: f64) -> Self {
        let n = l1.ymodel().top_degree();
        Self { l1, l2, k1: vec![0; n + 1], k2: vec![0; n + 1], r, perturbation: None }
    }

    pub fn with_l2_parts(mut self, k1: Vec<usize>, k2: Vec<usize>) -> Self {
        self.k1 = k1;
        self.k2 = k2;
        self
    }

    pub fn with_perturbation(mut self, p: Perturbation) -> Self {
        self.perturbation = Some(p);
        self
    }

    pub fn at(&self, r: f64) -> Self {
        Self { r, ..self.clone() }
    }

    /// Middle row as a finite complex.
    pub fn middle_row(&self) -> Result<FiniteComplex> {
        let y: &YModel = self.l1.ymodel();
        let n = y.top_degree();
        if self.k1.len() != n + 1 || self.k2.len() != n + 1 {
            return Err(Error::Dimension(format!("need {} L² dimensions per side", n + 1)));
        }
        if self.r.is_nan() || self.r < 1.0 {
            return Err(Error::Domain(format!("R must be at least 1, got {}", self.r)));
        }
        let r = self.r;
        let seq = build_l_sequence(&self.l1, &self.l2)?;
        let lmaps = seq.complex.maps();
        let ldims = seq.complex.dims();

        // (K dimension, 𝓛 scale) per position
        let mut kdims = Vec::new();
        let mut scales = Vec::new();
        for p in 0..=n {
            kdims.extend([self.k1[p], self.k1[p] + self.k2[p], self.k2[p]]);
            scales.extend([r, 2.0 * r, r]);
        }
        let len = kdims.len();

        let mut maps = Vec::with_capacity(len - 1);
        for j in 0..len - 1 {
            let p = j / 3;
            let (kin, kout) = (kdims[j], kdims[j + 1]);
            let kmap = match j % 3 {
                // K₁ → K₁ ⊕ K₂
                0 => crate::linalg::vcat(&identity(self.k1[p]), &zeros(self.k2[p], self.k1[p])),
                // K₁ ⊕ K₂ → K₂
                1 => crate::linalg::hcat(&zeros(self.k2[p], self.k1[p]), &identity(self.k2[p])),
                _ => zeros(kout, kin),
            };
            let factor = match j % 3 {
                0 => 0.5,
                1 => 1.0,
                _ => 1.0 / r,
            };
            maps.push(block_diag(&[&kmap, &lmaps[j].scale(factor)]));
        }
        let mut grams: Vec<CMat> = (0..len)
            .map(|j| block_diag(&[&identity(kdims[j]), &identity(ldims[j]).scale(scales[j])]))
            .collect();

        if let Some(pert) = self.perturbation {
            let eps = pert.magnitude;
            if !(0.0..0.5).contains(&eps) {
                return Err(Error::Domain(format!("perturbation magnitude must lie in [0, 0.5), got {eps}")));
            }
            let mut g = rng(pert.seed);
            let normalized = |m: CMat| {
                let nrm = op_norm(&m);
                if nrm > 0.0 {
                    m.scale(1.0 / nrm)
                } else {
                    m
                }
            };
            let mut conj = Vec::with_capacity(len);
            for j in 0..len {
                let (k, l) = (kdims[j], ldims[j]);
                let e_l = normalized(hermitian(&mut g, l)).scale(eps);
                let x = normalized(gaussian(&mut g, k, l)).scale(eps);
                let tiny = normalized(hermitian(&mut g, k + l)).scale(eps * (-pert.decay * r).exp());
                let mut gram = grams[j].clone();
                gram.view_mut((k, k), (l, l)).add_assign(&e_l);
                gram.view_mut((0, k), (k, l)).add_assign(&x);
                gram.view_mut((k, 0), (l, k)).add_assign(&x.adjoint());
                grams[j] = hermitian_part(&(gram + tiny));

                let yk = normalized(gaussian(&mut g, k, l)).scale(eps);
                let f = normalized(gaussian(&mut g, l, l)).scale(eps / r);
                let mut gj = identity(k + l);
                gj.view_mut((0, k), (k, l)).copy_from(&yk);
                gj.view_mut((k, k), (l, l)).add_assign(&f);
                conj.push(gj);
            }
            for j in 0..len - 1 {
                let inv = conj[j].clone().try_inverse().ok_or_else(|| Error::Consistency("singular conjugation".into()))?;
                maps[j] = &conj[j + 1] * &maps[j] * inv;
            }
        }

        let spaces = grams.into_iter().map(HermitianSpace::new).collect::<Result<Vec<_>>>()?;
        let row = FiniteComplex::new(spaces, maps).map_err(|e| invariant("middle_row_complex", e.to_string()))?;
        if let Some(deg) = row.exactness_defect() {
            return Err(invariant("middle_row_exact", format!("middle row is not exact at degree {deg}")));
        }
        Ok(row)
    }
}

/// Torsion of the middle row of the scaled diagram.
pub fn mv_torsion_scaled(d: &ScaledDiagram) -> Result<f64> {
    Ok(d.middle_row()?.log_torsion_singular()?.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub r: f64,
    pub torsion: f64,
    pub rhs: f64,
    /// `|𝒯_R / RHS − 1|`.
    pub error: f64,
}

/// `𝒯_R` against the asymptotic formula over a grid of lengths.
pub fn convergence_sweep(d: &ScaledDiagram, rs: &[f64]) -> Result<Vec<ConvergencePoint>> {
    rs.iter()
        .map(|&r| {
            let dr = d.at(r);
            let log_t = dr.middle_row()?.log_torsion_singular()?;
            let log_rhs = log_mv_asymptotic_rhs(&d.l1, &d.l2, r)?;
            Ok(ConvergencePoint { r, torsion: log_t.exp(), rhs: log_rhs.exp(), error: (log_t - log_rhs).exp_m1().abs() })
        })
        .collect()
}

pub fn convergence_batch(exec: Exec, diagrams: &[ScaledDiagram], rs: &[f64]) -> Vec<Result<Vec<ConvergencePoint>>> {
    exec.map(diagrams, |d| convergence_sweep(d, rs))
}

/// Random `L²` dimensions in `0..=max` for each degree.
pub fn random_l2_dims(rng: &mut impl Rng, n: usize, max: usize) -> (Vec<usize>, Vec<usize>) {
    let k1 = (0..=n).map(|_| rng.random_range(0..=max)).collect();
    let k2 = (0..=n).map(|_| rng.random_range(0..=max)).collect();
    (k1, k2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_real_rows};

    fn line(theta: f64) -> CMat {
        from_real_rows(2, 1, &[theta.cos(), theta.sin()])
    }

    fn lines(theta: f64) -> (LimitingSubspace, LimitingSubspace) {
        let y = YModel::new(vec![2]);
        let l1 = LimitingSubspace::from_abs(y.clone(), vec![line(0.0)]).unwrap();
        let l2 = LimitingSubspace::from_abs(y, vec![line(theta)]).unwrap();
        (l1, l2)
    }

    #[test]
    fn equal_subspaces_give_unit_torsion() {
        let (l1, _) = lines(0.3);
        let seq = build_l_sequence(&l1, &l1).unwrap();
        assert!(seq.d.iter().all(|&x| x == 0));
        assert!((torsion_l(&seq).unwrap() - 1.0).abs() < 1e-12);
        assert!((torsion_l_closed_form(&l1, &l1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_lines() {
        for theta in [0.2, 0.7, 1.3] {
            let (l1, l2) = lines(theta);
            let seq = build_l_sequence(&l1, &l2).unwrap();
            let brute = torsion_l(&seq).unwrap();
            assert!((brute - 1.0 / theta.sin()).abs() < 1e-12, "{brute}");
            assert!((torsion_l_closed_form(&l1, &l2).unwrap() - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_lines_have_no_absolute_intersection() {
        let (l1, l2) = lines(std::f64::consts::FRAC_PI_2);
        let seq = build_l_sequence(&l1, &l2).unwrap();
        assert!(seq.b.iter().all(|&x| x == 0));
        assert_eq!(seq.euler_sum(), 0);
    }

    #[test]
    fn degenerate_scaled_diagram_matches_rhs() {
        let (l1, l2) = lines(0.9);
        for r in [1.0, 10.0, 1e4] {
            let d = ScaledDiagram::new(l1.clone(), l2.clone(), r).with_l2_parts(vec![1, 2], vec![2, 0]);
            let t = mv_torsion_scaled(&d).unwrap();
            let rhs = mv_asymptotic_rhs(&l1, &l2, r).unwrap();
            assert!((t / rhs - 1.0).abs() < 1e-10, "{t} vs {rhs}");
        }
    }

    #[test]
    fn full_subspaces_rhs() {
        let y = YModel::new(vec![1]);
        let full = LimitingSubspace::full(y);
        let chi = chi_prime_top(&full, &full).unwrap();
        let r = 7.0;
        let v = mv_asymptotic_rhs(&full, &full, r).unwrap();
        assert!((v - 2f64.powf(-0.5) * r.powi(chi as i32)).abs() < 1e-12);
    }

    #[test]
    fn perturbed_row_converges() {
        let (l1, l2) = lines(0.9);
        let d = ScaledDiagram::new(l1, l2, 1.0)
            .with_l2_parts(vec![1, 1], vec![1, 1])
            .with_perturbation(Perturbation { magnitude: 0.1, seed: 3, decay: 1.0 });
        let pts = convergence_sweep(&d, &[1e2, 1e3, 1e4]).unwrap();
        assert!(pts[0].error > pts[1].error && pts[1].error > pts[2].error, "{pts:?}");
        assert!(pts[2].error < 1e-3);
    }

    #[test]
    fn rejects_broken_splitting() {
        let y = YModel::new(vec![1]);
        let l1 = LimitingSubspace::full(y.clone());
        let l2 = LimitingSubspace::from_abs(y, vec![CMat::from_element(1, 1, c(1.0, 0.0))]).unwrap();
        let err = build_l_sequence(&l1, &l2).unwrap_err();
        assert!(matches!(err, Error::Invariant { name: "l_sequence_complex", .. }), "{err}");
    }
}
