//! Gluing checks: the model-level zeta gluing identity and an exactly
//! solvable circle cut into two arcs.

use serde::{Deserialize, Serialize};

use crate::complex::FiniteComplex;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{from_real_rows, zeros, HermitianSpace};
use crate::mayer_vietoris::build_l_sequence;
use crate::scattering::{chi_euler, chi_prime_of, chi_prime_top, GluedScattering, LimitingSubspace};
use crate::zeta::{model_weighted_zeta_from_blocks, model_weighted_zeta_prime0, weighted_log_det_term, EigenvalueCatalog, Method, Progression, Which};

/// A pair of limiting subspaces and the lengths at which to compare.
#[derive(Debug, Clone)]
pub struct GluingScenario {
    pub l1: LimitingSubspace,
    pub l2: LimitingSubspace,
    pub r_grid: Vec<f64>,
    pub tolerance: f64,
}

impl GluingScenario {
    pub fn new(l1: LimitingSubspace, l2: LimitingSubspace, r_grid: Vec<f64>, tolerance: f64) -> Result<Self> {
        if r_grid.windows(2).any(|w| w[0] >= w[1]) || r_grid.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::Domain("R grid must be positive and strictly increasing".into()));
        }
        if l1.ymodel() != l2.ymodel() {
            return Err(Error::Dimension("limiting subspaces on different models".into()));
        }
        Ok(Self { l1, l2, r_grid, tolerance })
    }
}

/// Where the value of `χ'` in the right-hand side came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiPrimeSource {
    /// `Σ_p (−1)^p d_p` from the limiting sequence.
    LimitingSequence,
    /// Half of `χ'(C₁₂) − χ'(C_{1,bd}) − χ'(C_{2,bd})`, used when the pair is
    /// not Lagrangian and the sequence does not exist.
    ScatteringParity,
}

/// One row of the model zeta gluing check, with every term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZetaGluingRow {
    pub r: f64,
    pub zeta_glued: f64,
    pub zeta_side1: f64,
    pub zeta_side2: f64,
    pub chi_prime: i64,
    pub chi_prime_source: ChiPrimeSource,
    pub chi_y: i64,
    pub chi_prime_c12: i64,
    pub log_det_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_error: f64,
    pub passed: bool,
}

fn chi_prime_with_source(l1: &LimitingSubspace, l2: &LimitingSubspace) -> Result<(i64, ChiPrimeSource)> {
    if l1.is_lagrangian() && l2.is_lagrangian() {
        Ok((build_l_sequence(l1, l2)?.chi_prime(), ChiPrimeSource::LimitingSequence))
    } else {
        Ok((chi_prime_top(l1, l2)?, ChiPrimeSource::ScatteringParity))
    }
}

/// Left side `ζ'_* − ζ'_{*,1} − ζ'_{*,2}` from block-wise model zetas against
/// `2χ' log R + (χ(Y) + χ'(C₁₂)) log 2 + Σ_p (p/2)(−1)^p log det*(…)`.
pub fn zeta_gluing_model_check(s: &GluingScenario) -> Result<Vec<ZetaGluingRow>> {
    let g = GluedScattering::new(&s.l1, &s.l2)?;
    let (chi_prime, chi_prime_source) = chi_prime_with_source(&s.l1, &s.l2)?;
    let chi_y = chi_euler(s.l1.ymodel());
    let chi_prime_c12 = chi_prime_of(&g.c12);
    let log_det_term = weighted_log_det_term(&g.c12)?;
    let ln2 = 2f64.ln();
    s.r_grid
        .iter()
        .map(|&r| {
            let zeta_glued = model_weighted_zeta_from_blocks(Which::Glued, &s.l1, &s.l2, r)?;
            let zeta_side1 = model_weighted_zeta_from_blocks(Which::Side1, &s.l1, &s.l2, r)?;
            let zeta_side2 = model_weighted_zeta_from_blocks(Which::Side2, &s.l1, &s.l2, r)?;
            let lhs = zeta_glued - zeta_side1 - zeta_side2;
            let rhs = 2.0 * chi_prime as f64 * r.ln() + (chi_y + chi_prime_c12) as f64 * ln2 + log_det_term;
            let abs_error = (lhs - rhs).abs();
            Ok(ZetaGluingRow {
                r,
                zeta_glued,
                zeta_side1,
                zeta_side2,
                chi_prime,
                chi_prime_source,
                chi_y,
                chi_prime_c12,
                log_det_term,
                lhs,
                rhs,
                abs_error,
                passed: abs_error <= s.tolerance,
            })
        })
        .collect()
}

/// Same comparison with the closed-form model zetas on the left.
pub fn zeta_gluing_closed_form_lhs(l1: &LimitingSubspace, l2: &LimitingSubspace, r: f64) -> Result<f64> {
    Ok(model_weighted_zeta_prime0(Which::Glued, l1, l2, r)?
        - model_weighted_zeta_prime0(Which::Side1, l1, l2, r)?
        - model_weighted_zeta_prime0(Which::Side2, l1, l2, r)?)
}

pub fn zeta_gluing_batch(exec: Exec, scenarios: &[GluingScenario]) -> Vec<Result<Vec<ZetaGluingRow>>> {
    exec.map(scenarios, zeta_gluing_model_check)
}

/// A circle of circumference `a + b + 4R` cut into arcs `Z₁` of length
/// `a + 2R` (relative conditions) and `Z₂` of length `b + 2R` (absolute
/// conditions), with the trivial flat line bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleGeometry {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Neumann,
    Periodic,
}

/// One Laplacian spectrum of the circle geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleSpectrum {
    pub name: &'static str,
    pub length: f64,
    pub degree: usize,
    pub boundary: Boundary,
}

impl CircleSpectrum {
    /// Nonzero spectrum as a progression `((2πk)/(4R'))²`, `k ≥ 1`.
    pub fn progression(&self) -> Progression {
        match self.boundary {
            // (2πk/ℓ)², each twice
            Boundary::Periodic => Progression { theta: 0.0, r: self.length / 4.0, degree: self.degree, multiplicity: 2 },
            // (πk/L)², once
            _ => Progression { theta: 0.0, r: self.length / 2.0, degree: self.degree, multiplicity: 1 },
        }
    }
}

impl CircleGeometry {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!("arc lengths must be positive, got a = {a}, b = {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn lengths(&self, r: f64) -> (f64, f64, f64) {
        (self.a + self.b + 4.0 * r, self.a + 2.0 * r, self.b + 2.0 * r)
    }

    /// Spectra of the circle and of both arcs, in degrees 0 and 1.
    pub fn spectra(&self, r: f64) -> [Vec<CircleSpectrum>; 3] {
        let (l, l1, l2) = self.lengths(r);
        let s = |name, length, degree, boundary| CircleSpectrum { name, length, degree, boundary };
        [
            vec![s("circle_0", l, 0, Boundary::Periodic), s("circle_1", l, 1, Boundary::Periodic)],
            vec![s("arc1_rel_0", l1, 0, Boundary::Dirichlet), s("arc1_rel_1", l1, 1, Boundary::Neumann)],
            vec![s("arc2_abs_0", l2, 0, Boundary::Neumann), s("arc2_abs_1", l2, 1, Boundary::Dirichlet)],
        ]
    }

    /// Mayer–Vietoris sequence `H^p_rel(Z₁) → H^p(Z) → H^p_abs(Z₂)` with
    /// `L²` metrics on harmonic representatives: constants and multiples of
    /// `du`.
    pub fn mv_complex(&self, r: f64) -> Result<FiniteComplex> {
        let (l, l1, l2) = self.lengths(r);
        let sp = |g: f64| HermitianSpace::new(from_real_rows(1, 1, &[g]));
        let spaces = vec![
            HermitianSpace::standard(0), // H⁰_rel(Z₁)
            sp(l)?,                      // H⁰(Z)
            sp(l2)?,                     // H⁰(Z₂)
            sp(l1)?,                     // H¹_rel(Z₁)
            sp(l)?,                      // H¹(Z)
            HermitianSpace::standard(0), // H¹_abs(Z₂)
        ];
        let maps = vec![
            zeros(1, 0),
            // restriction of the constant 1
            from_real_rows(1, 1, &[1.0]),
            // connecting map vanishes
            zeros(1, 1),
            // du on Z₁ extended by zero has harmonic part (L₁/ℓ) du
            from_real_rows(1, 1, &[l1 / l]),
            zeros(0, 1),
        ];
        FiniteComplex::new(spaces, maps)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleReport {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub zeta_circle: f64,
    pub zeta_arc1: f64,
    pub zeta_arc2: f64,
    pub log_torsion: f64,
    /// `½ζ' − ½ζ₁' − ½ζ₂' − log 𝒯`.
    pub combination: f64,
    /// `½ χ(Y) log 2` with `χ(Y) = 2` for two cut points.
    pub expected: f64,
    pub abs_error: f64,
    pub passed: bool,
}

fn catalog(spectra: &[CircleSpectrum]) -> EigenvalueCatalog {
    EigenvalueCatalog { entries: spectra.iter().map(|s| s.progression()).collect() }
}

/// Weighted `ζ'(0)` of each spectrum set through the Hurwitz continuation.
pub fn circle_zetas(g: &CircleGeometry, r: f64) -> Result<[f64; 3]> {
    let [c, z1, z2] = g.spectra(r);
    Ok([
        catalog(&c).weighted_zeta_prime0(Method::Hurwitz)?.zeta_prime_0,
        catalog(&z1).weighted_zeta_prime0(Method::Hurwitz)?.zeta_prime_0,
        catalog(&z2).weighted_zeta_prime0(Method::Hurwitz)?.zeta_prime_0,
    ])
}

pub const CIRCLE_TOLERANCE: f64 = 1e-6;

pub fn circle_gluing_check(g: &CircleGeometry, r: f64) -> Result<CircleReport> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    let [zeta_circle, zeta_arc1, zeta_arc2] = circle_zetas(g, r)?;
    let log_torsion = g.mv_complex(r)?.log_torsion()?;
    let combination = 0.5 * zeta_circle - 0.5 * zeta_arc1 - 0.5 * zeta_arc2 - log_torsion;
    let expected = 0.5 * 2.0 * 2f64.ln();
    let abs_error = (combination - expected).abs();
    Ok(CircleReport {
        a: g.a,
        b: g.b,
        r,
        zeta_circle,
        zeta_arc1,
        zeta_arc2,
        log_torsion,
        combination,
        expected,
        abs_error,
        passed: abs_error <= CIRCLE_TOLERANCE,
    })
}

/// Cell-centered finite-difference Laplacians on an interval or a circle.
pub mod fd {
    use nalgebra::{DMatrix, SymmetricEigen};

    use super::{Boundary, CircleSpectrum};

    /// `−d²/dx²` on `cells` cells of a segment of length `length`, with ghost
    /// cells `−u` (Dirichlet), `u` (Neumann) or wrap-around (periodic).
    pub fn laplacian(boundary: Boundary, length: f64, cells: usize) -> DMatrix<f64> {
        let h = length / cells as f64;
        let mut m = DMatrix::zeros(cells, cells);
        for i in 0..cells {
            m[(i, i)] = 2.0;
            if i > 0 {
                m[(i, i - 1)] = -1.0;
            }
            if i + 1 < cells {
                m[(i, i + 1)] = -1.0;
            }
        }
        match boundary {
            Boundary::Dirichlet => {
                m[(0, 0)] = 3.0;
                m[(cells - 1, cells - 1)] = 3.0;
            }
            Boundary::Neumann => {
                m[(0, 0)] = 1.0;
                m[(cells - 1, cells - 1)] = 1.0;
            }
            Boundary::Periodic => {
                m[(0, cells - 1)] -= 1.0;
                m[(cells - 1, 0)] -= 1.0;
            }
        }
        m / (h * h)
    }

    /// Nonzero eigenvalues, increasing.
    pub fn eigenvalues(boundary: Boundary, length: f64, cells: usize) -> Vec<f64> {
        let m = laplacian(boundary, length, cells);
        let scale = m.amax();
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().filter(|&x| x > 1e-9 * scale).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// First `count` eigenvalues Richardson-extrapolated from `cells` and
    /// `cells / 2` cells (second-order scheme).
    pub fn richardson(boundary: Boundary, length: f64, cells: usize, count: usize) -> Vec<f64> {
        let fine = eigenvalues(boundary, length, cells);
        let coarse = eigenvalues(boundary, length, cells / 2);
        (0..count).map(|i| (4.0 * fine[i] - coarse[i]) / 3.0).collect()
    }

    /// Largest relative deviation between extrapolated finite-difference
    /// eigenvalues and the progression assigned to the spectrum.
    pub fn max_relative_error(s: &CircleSpectrum, cells: usize, count: usize) -> f64 {
        let fd = richardson(s.boundary, s.length, cells, count);
        let p = s.progression();
        let per_k = p.eigenvalues(count);
        let exact: Vec<f64> = per_k.iter().flat_map(|&x| std::iter::repeat_n(x, p.multiplicity)).take(count).collect();
        fd.iter().zip(&exact).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;
    use crate::scattering::YModel;

    #[test]
    fn circle_identity() {
        for (a, b, r) in [(1.0, 1.0, 0.5), (1.0, 2.0, 1.0), (0.5, 3.0, 2.0)] {
            let rep = circle_gluing_check(&CircleGeometry::new(a, b).unwrap(), r).unwrap();
            assert!(rep.abs_error < 1e-10, "{rep:?}");
        }
    }

    #[test]
    fn circle_torsion_closed_form() {
        let g = CircleGeometry::new(1.0, 2.0).unwrap();
        let (l, l1, l2) = g.lengths(1.5);
        let t = g.mv_complex(1.5).unwrap().torsion().unwrap();
        assert!((t - (l1 * l2).sqrt() / l).abs() < 1e-14);
    }

    #[test]
    fn boundary_conditions_match_progressions() {
        let g = CircleGeometry::new(1.0, 1.0).unwrap();
        for set in g.spectra(0.5) {
            for s in set {
                assert!(fd::max_relative_error(&s, 200, 20) < 1e-3, "{}", s.name);
            }
        }
    }

    #[test]
    fn full_pair_model_gluing() {
        let y = YModel::new(vec![1]);
        let full = LimitingSubspace::full(y);
        let s = GluingScenario::new(full.clone(), full, vec![1.0, 10.0], 1e-10).unwrap();
        for row in zeta_gluing_model_check(&s).unwrap() {
            assert!(row.passed, "{row:?}");
            assert_eq!(row.chi_prime_source, ChiPrimeSource::ScatteringParity);
        }
    }

    #[test]
    fn rejects_unsorted_grid() {
        let y = YModel::new(vec![1]);
        let l = LimitingSubspace::from_abs(y, vec![CMat::identity(1, 1)]).unwrap();
        assert!(GluingScenario::new(l.clone(), l, vec![10.0, 1.0], 1e-10).is_err());
    }
}
