//! Hurwitz zeta continuation, arithmetic-progression determinants and the
//! model zeta functions built from scattering matrices.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{det_star_std, eigenphases, hermitian_part, identity, max_abs, null_space, CMat, C64};
use crate::scattering::{chi_euler, chi_prime_of, GluedScattering, LimitingSubspace, ScatteringMatrix};

/// Number of terms summed directly before the Euler–Maclaurin tail.
pub const EM_DIRECT_TERMS: usize = 8;
/// Number of Bernoulli correction terms in the Euler–Maclaurin tail.
pub const EM_CORRECTIONS: usize = 20;

/// `B_{2j}/(2j)!` for `j = 1..=20`.
const BERNOULLI_OVER_FACTORIAL: [f64; EM_CORRECTIONS] = [
    8.3333333333333333e-2,
    -1.3888888888888889e-3,
    3.3068783068783069e-5,
    -8.2671957671957672e-7,
    2.0876756987868099e-8,
    -5.2841901386874932e-10,
    1.3382536530684679e-11,
    -3.3896802963225829e-13,
    8.5860620562778446e-15,
    -2.1748686985580619e-16,
    5.5090028283602295e-18,
    -1.3954464685812523e-19,
    3.5347070396294675e-21,
    -8.9535174270375469e-23,
    2.2679524523376831e-24,
    -5.7447906688722024e-26,
    1.4551724756148649e-27,
    -3.6859949406653102e-29,
    9.3367342570950447e-31,
    -2.3650224157006299e-32,
];

fn cpow(x: f64, s: C64) -> C64 {
    // x^{-s} for x > 0
    (-s * x.ln()).exp()
}

/// `ζ_H(s, a)` and `∂_s ζ_H(s, a)` by Euler–Maclaurin summation.
pub fn hurwitz_zeta_with_derivative(s: C64, a: f64) -> Result<(C64, C64)> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::Domain(format!("Hurwitz zeta needs a > 0, got {a}")));
    }
    if (s - 1.0).norm() < 1e-14 {
        return Err(Error::Domain("Hurwitz zeta has a pole at s = 1".into()));
    }
    let n = EM_DIRECT_TERMS;
    let mut z = C64::new(0.0, 0.0);
    let mut dz = C64::new(0.0, 0.0);
    for k in 0..n {
        let x = k as f64 + a;
        let t = cpow(x, s);
        z += t;
        dz -= t * x.ln();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let xs = cpow(x, s); // x^{-s}
    let one = C64::new(1.0, 0.0);
    // x^{1-s}/(s-1)
    let tail = xs * x / (s - one);
    z += tail;
    dz += -tail * lx - tail / (s - one);
    z += xs * 0.5;
    dz -= xs * 0.5 * lx;
    // Σ_j B_{2j}/(2j)! (s)_{2j−1} x^{−s−2j+1}, with (s)_m the rising factorial.
    let (mut poch, mut dpoch) = (s, one);
    let mut xpow = xs / x; // x^{-s-1}
    for (j, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            for i in [2 * j - 1, 2 * j] {
                let f = s + i as f64;
                dpoch = dpoch * f + poch;
                poch *= f;
            }
            xpow /= x * x;
        }
        z += poch * xpow * b;
        dz += (dpoch - poch * lx) * xpow * b;
    }
    Ok((z, dz))
}

pub fn hurwitz_zeta(s: C64, a: f64) -> Result<C64> {
    Ok(hurwitz_zeta_with_derivative(s, a)?.0)
}

/// `−∂_s|₀ Σ_{k≥1} ((2πk − θ)/(4R))^{−2s}` for a single progression with
/// `θ ∈ [0, 2π)`, evaluated through the Hurwitz zeta continuation.
pub fn single_progression_hurwitz(theta: f64, r: f64) -> Result<f64> {
    let a = check_progression(theta, r)?;
    let (z0, dz0) = hurwitz_zeta_with_derivative(C64::new(0.0, 0.0), a)?;
    let c = TAU / (4.0 * r);
    Ok(2.0 * c.ln() * z0.re - 2.0 * dz0.re)
}

/// Same quantity through Lerch's formula `∂_sζ_H(0, a) = lnΓ(a) − ½ln 2π`.
pub fn single_progression_lerch(theta: f64, r: f64) -> Result<f64> {
    let a = check_progression(theta, r)?;
    let c = TAU / (4.0 * r);
    Ok(2.0 * c.ln() * (0.5 - a) - 2.0 * ln_gamma(a) + TAU.ln())
}

fn check_progression(theta: f64, r: f64) -> Result<f64> {
    if !(0.0..TAU).contains(&theta) {
        return Err(Error::Domain(format!("progression offset must lie in [0, 2π), got {theta}")));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    Ok(1.0 - theta / TAU)
}

/// Closed form for a progression paired with its conjugate: `log(4R)` for
/// `θ = 0`, `½log(2 − 2cosθ)` for `0 < θ ≤ π`.
///
/// For `0 < θ < π` this is the mean of the offsets `θ` and `2π − θ`; a lone
/// progression with such an offset depends on `R`.
pub fn progression_zeta_prime0(theta: f64, r: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("θ must lie in [0, π], got {theta}")));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    if theta == 0.0 {
        Ok((4.0 * r).ln())
    } else {
        Ok(0.5 * (2.0 - 2.0 * theta.cos()).ln())
    }
}

/// Numeric counterpart of [`progression_zeta_prime0`]: the conjugate-pair mean
/// evaluated with the Euler–Maclaurin continuation.
pub fn progression_pair_hurwitz(theta: f64, r: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("θ must lie in [0, π], got {theta}")));
    }
    if theta == 0.0 {
        return single_progression_hurwitz(0.0, r);
    }
    Ok(0.5 * (single_progression_hurwitz(theta, r)? + single_progression_hurwitz(TAU - theta, r)?))
}

/// Spectrum `{((2πk − θ)/(4R))² : k ≥ 1}` repeated `multiplicity` times in
/// form degree `degree`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Progression {
    pub theta: f64,
    pub r: f64,
    pub degree: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Euler–Maclaurin continuation of the Hurwitz zeta function.
    Hurwitz,
    /// Lerch's closed form via `lnΓ`.
    Lerch,
}

impl Progression {
    pub fn new(theta: f64, r: f64, degree: usize, multiplicity: usize) -> Result<Self> {
        check_progression(theta, r)?;
        if multiplicity == 0 {
            return Err(Error::Domain("multiplicity must be at least 1".into()));
        }
        Ok(Self { theta, r, degree, multiplicity })
    }

    /// `−∂_s|₀` of the progression's spectral zeta function (one copy).
    pub fn value(&self, method: Method) -> Result<f64> {
        match method {
            Method::Hurwitz => single_progression_hurwitz(self.theta, self.r),
            Method::Lerch => single_progression_lerch(self.theta, self.r),
        }
    }

    /// The first `count` eigenvalues `λ²`, increasing.
    pub fn eigenvalues(&self, count: usize) -> Vec<f64> {
        (1..=count).map(|k| ((TAU * k as f64 - self.theta) / (4.0 * self.r)).powi(2)).collect()
    }
}

/// Degree-tagged spectrum assembled from progressions.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EigenvalueCatalog {
    pub entries: Vec<Progression>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZetaResult {
    pub zeta_prime_0: f64,
    /// Weighted contribution of each progression, in catalog order.
    pub decomposition: Vec<(Progression, f64)>,
}

impl EigenvalueCatalog {
    pub fn push(&mut self, p: Progression) {
        self.entries.push(p);
    }

    /// Entries sorted by `(degree, θ)`, the summation order.
    fn sorted(&self) -> Vec<Progression> {
        let mut e = self.entries.clone();
        e.sort_by(|a, b| a.degree.cmp(&b.degree).then(a.theta.total_cmp(&b.theta)).then(a.r.total_cmp(&b.r)));
        e
    }

    fn accumulate(&self, method: Method, weight: impl Fn(&Progression) -> f64) -> Result<ZetaResult> {
        let mut total = 0.0;
        let mut decomposition = Vec::new();
        for p in self.sorted() {
            let w = weight(&p);
            let v = if w == 0.0 { 0.0 } else { w * p.value(method)? };
            total += v;
            decomposition.push((p, v));
        }
        Ok(ZetaResult { zeta_prime_0: total, decomposition })
    }

    /// `ζ'(0)` of `ζ(s) = −Σ_λ (λ²)^{−s}` over the whole catalog.
    pub fn plain_zeta_prime0(&self, method: Method) -> Result<ZetaResult> {
        self.accumulate(method, |p| p.multiplicity as f64)
    }

    /// `ζ'(0)` of the degree-weighted `ζ(s) = −Σ_p (−1)^p p ζ_{Δ_p}(s)`.
    pub fn weighted_zeta_prime0(&self, method: Method) -> Result<ZetaResult> {
        self.accumulate(method, |p| {
            let sgn = if p.degree % 2 == 0 { 1.0 } else { -1.0 };
            sgn * p.degree as f64 * p.multiplicity as f64
        })
    }
}

const PHASE_SNAP: f64 = 1e-8;

/// Catalog of the model spectrum `{λ > 0 : det(e^{iκλ}C − 1) = 0}` with
/// `κ = 4R`, tagged with `degree`.
pub fn catalog_for_block(c: &CMat, r: f64, degree: usize) -> Result<EigenvalueCatalog> {
    let (phases, _) = eigenphases(c)?;
    let mut cat = EigenvalueCatalog::default();
    for th in phases {
        let t = if th.abs() < PHASE_SNAP { 0.0 } else { th.rem_euclid(TAU) };
        let t = if TAU - t < PHASE_SNAP { 0.0 } else { t };
        cat.push(Progression::new(t, r, degree, 1)?);
    }
    Ok(cat)
}

fn check_unitary(c: &CMat) -> Result<()> {
    let d = max_abs(&(c.adjoint() * c - identity(c.nrows())));
    if d > 1e-8 {
        return Err(crate::error::invariant("unitary", format!("block is not unitary (defect {d:.3e})")));
    }
    Ok(())
}

/// Checks that the eigenphases are closed under `θ ↦ −θ`, returning them.
pub fn conjugation_closed_phases(c: &CMat) -> Result<Vec<f64>> {
    let (phases, _) = eigenphases(c)?;
    let mut used = vec![false; phases.len()];
    for i in 0..phases.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let target = -phases[i];
        let dist = |t: f64| ((t - target + PI).rem_euclid(TAU) - PI).abs();
        if dist(phases[i]) < 1e-8 {
            continue;
        }
        let partner = (0..phases.len()).filter(|&j| !used[j]).min_by(|&a, &b| dist(phases[a]).total_cmp(&dist(phases[b])));
        match partner {
            Some(j) if dist(phases[j]) < 1e-8 => used[j] = true,
            Some(j) => return Err(Error::NotConjugationClosed(dist(phases[j]))),
            None => return Err(Error::NotConjugationClosed(dist(phases[i]))),
        }
    }
    Ok(phases)
}

/// `log det*((2 − C − C⁻¹)/4)` for unitary `C`.
pub fn log_det_star_c(c: &CMat) -> Result<f64> {
    let m = c.nrows();
    let a = (identity(m).scale(2.0) - c - c.adjoint()).scale(0.25);
    Ok(det_star_std(&hermitian_part(&a))?.ln())
}

/// `ζ'_{C,R}(0) = r log(2R) + m log 2 + ½ log det*((2 − C − C⁻¹)/4)` with
/// `r = dim ker(C − 1)` and `m = dim`.
pub fn model_zeta_prime0(c: &CMat, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    check_unitary(c)?;
    conjugation_closed_phases(c)?;
    let m = c.nrows();
    let fixed = null_space(&(c - identity(m))).ncols();
    Ok(fixed as f64 * (2.0 * r).ln() + m as f64 * 2f64.ln() + 0.5 * log_det_star_c(c)?)
}

/// The same value as a sum of progression closed forms over eigenphases.
pub fn model_zeta_prime0_by_progressions(c: &CMat, r: f64) -> Result<f64> {
    check_unitary(c)?;
    let phases = conjugation_closed_phases(c)?;
    phases
        .iter()
        .map(|&t| {
            let t = t.abs();
            progression_zeta_prime0(if t < PHASE_SNAP { 0.0 } else { t.min(PI) }, r)
        })
        .sum()
}

/// Which of the three model operators in a gluing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Glued,
    Side1,
    Side2,
}

/// Degree blocks and phase scale of the model problem: the glued operator
/// uses `C₁₂` with `e^{4iλR}`, each side its boundary matrix with `e^{2iλR}`.
fn model_blocks(which: Which, g: &GluedScattering, r: f64) -> (&ScatteringMatrix, f64) {
    match which {
        Which::Glued => (&g.c12, r),
        Which::Side1 => (&g.c1_bd, 0.5 * r),
        Which::Side2 => (&g.c2_bd, 0.5 * r),
    }
}

fn sign(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `Σ_p (p/2)(−1)^p log det*((2 − C₁₂^p − (C₁₂^p)⁻¹)/4)`.
pub fn weighted_log_det_term(c12: &ScatteringMatrix) -> Result<f64> {
    let mut t = 0.0;
    for (p, b) in c12.blocks().iter().enumerate() {
        t += 0.5 * p as f64 * sign(p) * log_det_star_c(b)?;
    }
    Ok(t)
}

/// Weighted model zeta derivative from the χ-invariants:
/// glued `χ'(C₁₂)log(2R) − χ(Y)log 2 + Σ_p (p/2)(−1)^p log det*(…)`,
/// side `j`: `χ'(C_{j,bd})log R − χ(Y)log 2`.
pub fn model_weighted_zeta_prime0(which: Which, l1: &LimitingSubspace, l2: &LimitingSubspace, r: f64) -> Result<f64> {
    let g = GluedScattering::new(l1, l2)?;
    let chi = chi_euler(l1.ymodel()) as f64;
    let ln2 = 2f64.ln();
    Ok(match which {
        Which::Glued => chi_prime_of(&g.c12) as f64 * (2.0 * r).ln() - chi * ln2 + weighted_log_det_term(&g.c12)?,
        Which::Side1 => chi_prime_of(&g.c1_bd) as f64 * r.ln() - chi * ln2,
        Which::Side2 => chi_prime_of(&g.c2_bd) as f64 * r.ln() - chi * ln2,
    })
}

/// The same value recomposed as `Σ_p (−1)^p p ζ'_{C^p, R}(0)` over blocks.
pub fn model_weighted_zeta_from_blocks(which: Which, l1: &LimitingSubspace, l2: &LimitingSubspace, r: f64) -> Result<f64> {
    let g = GluedScattering::new(l1, l2)?;
    let (c, scale) = model_blocks(which, &g, r);
    let mut total = 0.0;
    for (p, b) in c.blocks().iter().enumerate() {
        if p > 0 && b.nrows() > 0 {
            total += sign(p) * p as f64 * model_zeta_prime0(b, scale)?;
        }
    }
    Ok(total)
}

/// Degree-tagged progression catalog of a model operator.
pub fn model_catalog(which: Which, l1: &LimitingSubspace, l2: &LimitingSubspace, r: f64) -> Result<EigenvalueCatalog> {
    let g = GluedScattering::new(l1, l2)?;
    let (c, scale) = model_blocks(which, &g, r);
    let mut cat = EigenvalueCatalog::default();
    for (p, b) in c.blocks().iter().enumerate() {
        cat.entries.extend(catalog_for_block(b, scale, p)?.entries);
    }
    Ok(cat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_real_diag};

    #[test]
    fn classical_values() {
        let z = hurwitz_zeta(c(2.0, 0.0), 1.0).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-12 && z.im.abs() < 1e-15);
        for a in [0.001, 0.3, 1.0, 2.5] {
            let z = hurwitz_zeta(c(0.0, 0.0), a).unwrap();
            assert!((z.re - (0.5 - a)).abs() < 1e-12);
        }
        let (_, d) = hurwitz_zeta_with_derivative(c(0.0, 0.0), 1.0).unwrap();
        assert!((d.re + 0.5 * TAU.ln()).abs() < 1e-10);
    }

    #[test]
    fn pole_and_domain() {
        assert!(hurwitz_zeta(c(1.0, 0.0), 1.0).is_err());
        assert!(hurwitz_zeta(c(2.0, 0.0), 0.0).is_err());
        assert!(progression_zeta_prime0(4.0, 1.0).is_err());
    }

    #[test]
    fn progression_closed_forms() {
        assert!((progression_zeta_prime0(0.0, 1.0).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!((progression_zeta_prime0(PI, 123.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        let num = progression_pair_hurwitz(PI / 2.0, 3.0).unwrap();
        assert!((num - 0.5 * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn appendix_cases() {
        let r = 2.7;
        assert!((model_zeta_prime0(&identity(1), r).unwrap() - (4.0 * r).ln()).abs() < 1e-12);
        assert!((model_zeta_prime0(&-identity(1), r).unwrap() - 2f64.ln()).abs() < 1e-12);
        let a = PI / 3.0;
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::from_polar(1.0, a), C64::from_polar(1.0, -a)]));
        assert!(model_zeta_prime0(&m, r).unwrap().abs() < 1e-12);
        let by_prog = model_zeta_prime0_by_progressions(&m, r).unwrap();
        assert!(by_prog.abs() < 1e-12);
    }

    #[test]
    fn rejects_non_conjugation_closed() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::from_polar(1.0, 0.4)]));
        assert!(matches!(model_zeta_prime0(&m, 1.0), Err(Error::NotConjugationClosed(_))));
        let d = from_real_diag(&[1.0, -1.0]);
        assert!(model_zeta_prime0(&d, 1.0).is_ok());
    }
}
