//! λ-dependent scattering matrices `C(λ)` acting on one matrix space.

use crate::error::{invariant, Error, Result};
use crate::linalg::{c, identity, max_abs, real, CMat, C64};

/// A family `λ ↦ C(λ)` of `m × m` matrices valid for `|λ| < radius`.
#[derive(Debug, Clone)]
pub enum ScatteringFamily {
    /// Truncated power series `Σ_k C_k λ^k`.
    Series { coeffs: Vec<CMat>, radius: f64 },
    /// `e^{iλH/2} C₀ e^{iλH/2}` with `C₀² = 1` and `H` Hermitian; unitary with
    /// `C(λ)C(−λ) = 1` for every real λ.
    Exponential { base: CMat, generator: CMat, radius: f64 },
    /// `den(λ)⁻¹ num(λ)`.
    Quotient { num: Box<ScatteringFamily>, den: Box<ScatteringFamily> },
}

/// `exp(iλH)` for Hermitian `H`, via its eigen-decomposition.
fn unitary_exp(h: &CMat, lambda: f64) -> CMat {
    let n = h.nrows();
    if n == 0 {
        return identity(0);
    }
    let eig = nalgebra::SymmetricEigen::new(crate::linalg::hermitian_part(h));
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&x| C64::from_polar(1.0, x * lambda)),
    ));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

impl ScatteringFamily {
    pub fn constant(c0: CMat) -> Self {
        ScatteringFamily::Series { coeffs: vec![c0], radius: f64::INFINITY }
    }

    /// `e^{iaλ}·1`.
    pub fn scalar_phase(dim: usize, a: f64, radius: f64) -> Self {
        ScatteringFamily::Exponential { base: identity(dim), generator: identity(dim).scale(a), radius }
    }

    /// Truncated Taylor series of `e^{iaλ}·C₀` up to `λ^degree`.
    pub fn truncated_phase(c0: CMat, a: f64, degree: usize, radius: f64) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut factor = C64::new(1.0, 0.0);
        for k in 0..=degree {
            if k > 0 {
                factor *= c(0.0, a) / k as f64;
            }
            coeffs.push(&c0 * factor);
        }
        ScatteringFamily::Series { coeffs, radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            ScatteringFamily::Series { coeffs, .. } => coeffs[0].nrows(),
            ScatteringFamily::Exponential { base, .. } => base.nrows(),
            ScatteringFamily::Quotient { num, .. } => num.dim(),
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            ScatteringFamily::Series { radius, .. } | ScatteringFamily::Exponential { radius, .. } => *radius,
            ScatteringFamily::Quotient { num, den } => num.radius().min(den.radius()),
        }
    }

    /// Polynomial degree in λ of the defining data (0 for constant families).
    pub fn degree(&self) -> usize {
        match self {
            ScatteringFamily::Series { coeffs, .. } => {
                coeffs.iter().rposition(|m| max_abs(m) > 0.0).unwrap_or(0)
            }
            ScatteringFamily::Exponential { generator, .. } => usize::from(max_abs(generator) > 0.0),
            ScatteringFamily::Quotient { num, den } => num.degree().max(den.degree()),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn at_zero(&self) -> CMat {
        self.eval(0.0)
    }

    pub fn eval(&self, lambda: f64) -> CMat {
        match self {
            ScatteringFamily::Series { coeffs, .. } => {
                // Horner
                let mut acc = coeffs.last().expect("non-empty series").clone();
                for ck in coeffs.iter().rev().skip(1) {
                    acc = acc * real(lambda) + ck;
                }
                acc
            }
            ScatteringFamily::Exponential { base, generator, .. } => {
                let half = unitary_exp(generator, 0.5 * lambda);
                &half * base * &half
            }
            ScatteringFamily::Quotient { num, den } => {
                let d = den.eval(lambda);
                let n = num.eval(lambda);
                d.lu().solve(&n).expect("invertible denominator")
            }
        }
    }

    /// `dC/dλ`.
    pub fn derivative(&self, lambda: f64) -> CMat {
        match self {
            ScatteringFamily::Series { coeffs, .. } => {
                let m = coeffs[0].nrows();
                let mut acc = CMat::zeros(m, m);
                for (k, ck) in coeffs.iter().enumerate().skip(1).rev() {
                    acc = acc * real(lambda) + ck * real(k as f64);
                }
                acc
            }
            ScatteringFamily::Exponential { generator, .. } => {
                let cl = self.eval(lambda);
                (generator * &cl + &cl * generator) * c(0.0, 0.5)
            }
            ScatteringFamily::Quotient { num, den } => {
                let d = den.eval(lambda).lu();
                let q = self.eval(lambda);
                let rhs = num.derivative(lambda) - den.derivative(lambda) * q;
                d.solve(&rhs).expect("invertible denominator")
            }
        }
    }

    /// Sample grid used for validation: 33 points across `(−δ, δ)`, or
    /// `[−1, 1]` when the radius is infinite.
    fn validation_grid(&self) -> Vec<f64> {
        let r = if self.radius().is_finite() { self.radius() } else { 1.0 };
        (0..33).map(|i| r * 0.999 * (-1.0 + 2.0 * i as f64 / 32.0)).collect()
    }

    /// Checks unitarity and `C(λ)C(−λ) = 1` on a grid inside the radius.
    pub fn validate(&self) -> Result<()> {
        let m = self.dim();
        for lambda in self.validation_grid() {
            let cl = self.eval(lambda);
            let u = max_abs(&(cl.adjoint() * &cl - identity(m)));
            if u > 1e-8 {
                return Err(invariant("unitary", format!("C({lambda}) is not unitary (defect {u:.3e})")));
            }
            let s = max_abs(&(&cl * self.eval(-lambda) - identity(m)));
            if s > 1e-8 {
                return Err(invariant("reflection", format!("C(λ)C(−λ) != 1 at λ = {lambda} (defect {s:.3e})")));
            }
        }
        Ok(())
    }
}

/// Series inverse `(Σ A_k λ^k)⁻¹` truncated at the same degree.
fn series_inverse(a: &[CMat]) -> Result<Vec<CMat>> {
    let a0inv = a[0].clone().try_inverse().ok_or_else(|| Error::Consistency("C(0) is singular".into()))?;
    let mut b = vec![a0inv.clone()];
    for n in 1..a.len() {
        let mut s = CMat::zeros(a[0].nrows(), a[0].ncols());
        for k in 1..=n {
            s += &a[k] * &b[n - k];
        }
        b.push(-&a0inv * s);
    }
    Ok(b)
}

/// `C₁₂(λ) = C₂(λ)⁻¹C₁(λ)`. Two series give the truncated product series to
/// the common degree; anything else gives the exact quotient.
pub fn c12(c1: &ScatteringFamily, c2: &ScatteringFamily) -> Result<ScatteringFamily> {
    if c1.dim() != c2.dim() {
        return Err(Error::Dimension(format!("families of size {} and {}", c1.dim(), c2.dim())));
    }
    match (c1, c2) {
        (
            ScatteringFamily::Series { coeffs: a, radius: ra },
            ScatteringFamily::Series { coeffs: b, radius: rb },
        ) => {
            let d = a.len().max(b.len());
            let pad = |v: &[CMat]| -> Vec<CMat> {
                let mut v = v.to_vec();
                while v.len() < d {
                    v.push(CMat::zeros(v[0].nrows(), v[0].ncols()));
                }
                v
            };
            let (a, b) = (pad(a), pad(b));
            let binv = series_inverse(&b)?;
            let coeffs = (0..d)
                .map(|n| (0..=n).fold(CMat::zeros(a[0].nrows(), a[0].ncols()), |acc, k| acc + &binv[k] * &a[n - k]))
                .collect();
            Ok(ScatteringFamily::Series { coeffs, radius: ra.min(*rb) })
        }
        _ => Ok(ScatteringFamily::Quotient { num: Box::new(c1.clone()), den: Box::new(c2.clone()) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_diag;

    #[test]
    fn constant_c12() {
        let a = ScatteringFamily::constant(from_real_diag(&[1.0, -1.0]));
        let id = c12(&a, &a).unwrap();
        assert!(max_abs(&(id.at_zero() - identity(2))) < 1e-15);
        let m = ScatteringFamily::constant(-identity(2));
        let r = c12(&ScatteringFamily::constant(identity(2)), &m).unwrap();
        assert!(max_abs(&(r.at_zero() + identity(2))) < 1e-15);
    }

    #[test]
    fn exponential_family_is_valid() {
        let f = ScatteringFamily::scalar_phase(2, 0.1, 1.0);
        f.validate().unwrap();
        let z = f.eval(0.5);
        assert!((z[(0, 0)] - C64::from_polar(1.0, 0.05)).norm() < 1e-14);
        let h = 1e-6;
        let fd = (f.eval(0.3 + h) - f.eval(0.3 - h)) / real(2.0 * h);
        assert!(max_abs(&(fd - f.derivative(0.3))) < 1e-8);
    }

    #[test]
    fn truncated_series_fails_unitarity_outside_small_radius() {
        assert!(ScatteringFamily::truncated_phase(identity(1), 1.0, 3, 0.01).validate().is_ok());
        assert!(ScatteringFamily::truncated_phase(identity(1), 1.0, 3, 0.5).validate().is_err());
    }

    #[test]
    fn series_quotient_matches_pointwise_inverse() {
        let a = ScatteringFamily::truncated_phase(identity(2), 1.0, 4, 0.1);
        let b = ScatteringFamily::truncated_phase(from_real_diag(&[1.0, -1.0]), -0.5, 4, 0.1);
        let q = c12(&a, &b).unwrap();
        let lam = 0.01;
        let exact = b.eval(lam).try_inverse().unwrap() * a.eval(lam);
        assert!(max_abs(&(q.eval(lam) - exact)) < 1e-9);
    }
}
