//! Dense complex linear algebra at small dimension.
//!
//! Eigendecompositions are delegated to `nalgebra`; this module adds
//! singular values through the Hermitian eigensolver, metric-aware adjoints,
//! `det*`, projections and subspace utilities on top.

use nalgebra::{Cholesky, Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative zero threshold shared by `det*`, ranks and kernel counts.
pub const ZERO_TOL: f64 = 1e-10;
/// Absolute floor for the zero threshold.
pub const ZERO_FLOOR: f64 = 1e-14;

/// Cut below which an eigenvalue or singular value counts as zero, given the
/// largest magnitude present.
pub fn zero_cut(scale: f64) -> f64 {
    (ZERO_TOL * scale.max(1.0)).max(ZERO_FLOOR)
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn real(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn from_real_diag(d: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(d.len(), d.iter().map(|&x| real(x))))
}

pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMat {
    CMat::from_row_iterator(rows, cols, data.iter().map(|&x| real(x)))
}

/// Largest entry modulus, 0 for empty matrices.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Block-diagonal matrix from square or rectangular blocks.
pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Columns of `a` followed by columns of `b`.
pub fn hcat(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

/// Rows of `a` followed by rows of `b`.
pub fn vcat(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.ncols());
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// Singular values of `a`, sorted in decreasing order.
/// Thin SVD read off the Hermitian eigendecomposition of `[[0, A], [Aᴴ, 0]]`,
/// whose spectrum is `±σ` plus zeros.
///
/// nalgebra's complex SVD occasionally returns factors that do not
/// reconstruct rank-deficient inputs, so it is not used.
struct Svd {
    /// Singular values, descending, `min(m, n)` of them.
    values: Vec<f64>,
    /// Left and right singular vectors for the positive singular values.
    u: CMat,
    v: CMat,
}

fn svd(a: &CMat) -> Svd {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return Svd { values: Vec::new(), u: zeros(m, 0), v: zeros(n, 0) };
    }
    let mut jw = zeros(m + n, m + n);
    jw.view_mut((0, m), (m, n)).copy_from(a);
    jw.view_mut((m, 0), (n, m)).copy_from(&a.adjoint());
    let eig = SymmetricEigen::new(jw);
    let mut order: Vec<usize> = (0..m + n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order[..k].iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let cut = zero_cut(values[0]);
    let keep: Vec<usize> = order[..k].iter().copied().filter(|&i| eig.eigenvalues[i] > cut).collect();
    let z = eig.eigenvectors.select_columns(&keep);
    let scale = real(std::f64::consts::SQRT_2);
    Svd { values, u: z.rows(0, m) * scale, v: z.rows(m, n) * scale }
}

/// Singular values, descending.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    svd(a).values
}

pub fn rank(a: &CMat) -> usize {
    if a.is_empty() {
        return 0;
    }
    svd(a).u.ncols()
}

/// Orthonormal basis (standard inner product) of the column span of `a`.
pub fn orth(a: &CMat) -> CMat {
    if a.is_empty() {
        return zeros(a.nrows(), 0);
    }
    svd(a).u
}

/// Orthonormal basis (standard inner product) of the kernel of `a`.
pub fn null_space(a: &CMat) -> CMat {
    let n = a.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    if a.nrows() == 0 {
        return identity(n);
    }
    // the eigenvalue-one eigenvectors of 1 − VVᴴ, V spanning the row space
    let v = svd(a).v;
    if v.ncols() == 0 {
        return identity(n);
    }
    let q = hermitian_part(&(identity(n) - &v * v.adjoint()));
    let eig = SymmetricEigen::new(q);
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    eig.eigenvectors.select_columns(&keep)
}

/// Orthonormal basis of the orthogonal complement of the span of `q`
/// (standard inner product, ambient dimension `q.nrows()`).
pub fn complement(q: &CMat) -> CMat {
    if q.ncols() == 0 {
        return identity(q.nrows());
    }
    null_space(&q.adjoint())
}

/// Orthonormal basis of span(a) ∩ span(b) for orthonormal `a`, `b`.
pub fn intersect(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return zeros(n, 0);
    }
    let k = null_space(&hcat(a, &-b));
    if k.ncols() == 0 {
        return zeros(n, 0);
    }
    orth(&(a * k.rows(0, a.ncols())))
}

/// Orthogonal projector (standard inner product) onto the span of orthonormal `q`.
pub fn projector(q: &CMat) -> CMat {
    q * q.adjoint()
}

/// Spectral-norm distance between the orthogonal projectors onto two spans;
/// equals the sine of the largest principal angle when dimensions agree.
pub fn subspace_distance(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    op_norm(&(projector(a) - projector(b)))
}

pub const SUBSPACE_TOL: f64 = 1e-8;

pub fn same_subspace(a: &CMat, b: &CMat) -> bool {
    subspace_distance(a, b) <= SUBSPACE_TOL
}

/// A finite-dimensional complex inner-product space given by a Gram matrix in
/// a fixed basis.
#[derive(Debug, Clone)]
pub struct HermitianSpace {
    gram: CMat,
    /// Lower Cholesky factor of the Gram matrix.
    chol: CMat,
}

impl HermitianSpace {
    pub fn new(gram: CMat) -> Result<Self> {
        if gram.nrows() != gram.ncols() {
            return Err(Error::Dimension(format!(
                "gram must be square, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        let asym = max_abs(&(&gram - gram.adjoint()));
        if asym > 1e-12 * max_abs(&gram).max(1.0) {
            return Err(Error::GramNotHermitian(asym));
        }
        let gram = hermitian_part(&gram);
        if gram.nrows() == 0 {
            return Ok(Self { chol: gram.clone(), gram });
        }
        // complex Cholesky happily takes square roots of negative pivots
        let vals = eigvals_hermitian(&gram);
        if vals[0] <= ZERO_FLOOR * vals[vals.len() - 1].abs() {
            return Err(Error::GramNotPositive);
        }
        let chol = Cholesky::new(gram.clone()).ok_or(Error::GramNotPositive)?.l();
        Ok(Self { gram, chol })
    }

    pub fn standard(n: usize) -> Self {
        Self { gram: identity(n), chol: identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn inner(&self, x: &CVec, y: &CVec) -> C64 {
        (x.adjoint() * &self.gram * y)[(0, 0)]
    }

    pub fn norm(&self, x: &CVec) -> f64 {
        self.inner(x, x).re.max(0.0).sqrt()
    }

    /// Coordinates in which the metric becomes standard: `x ↦ Lᴴx`.
    pub fn whiten(&self, x: &CMat) -> CMat {
        self.chol.adjoint() * x
    }

    /// Inverse of [`whiten`](Self::whiten): `y ↦ L⁻ᴴy`.
    pub fn unwhiten(&self, y: &CMat) -> CMat {
        if self.dim() == 0 {
            return y.clone();
        }
        self.chol
            .adjoint()
            .solve_upper_triangular(y)
            .expect("Cholesky factor is invertible")
    }

    /// Matrix of an operator `A: V → V` in whitened coordinates, `Lᴴ A L⁻ᴴ`.
    pub fn whiten_operator(&self, a: &CMat) -> CMat {
        self.whiten_map(a, self)
    }

    /// Matrix of a map `A: self → target` between whitened coordinates,
    /// `L_tᴴ A L_s⁻ᴴ`.
    pub fn whiten_map(&self, a: &CMat, target: &HermitianSpace) -> CMat {
        let x = target.whiten(a);
        if self.dim() == 0 {
            return x;
        }
        // (X L⁻ᴴ)ᴴ = L⁻¹ Xᴴ
        self.chol
            .solve_lower_triangular(&x.adjoint())
            .expect("Cholesky factor is invertible")
            .adjoint()
    }

    /// Adjoint of `A: V → V` with respect to the Gram matrix, `G⁻¹AᴴG`.
    pub fn adjoint(&self, a: &CMat) -> CMat {
        self.adjoint_to(a, self)
    }

    /// Adjoint of `A: self → target`, a map `target → self`.
    pub fn adjoint_to(&self, a: &CMat, target: &HermitianSpace) -> CMat {
        let rhs = a.adjoint() * &target.gram;
        if self.dim() == 0 {
            return rhs;
        }
        Cholesky::new(self.gram.clone()).expect("validated gram").solve(&rhs)
    }

    /// Largest entry of `GA − (GA)ᴴ`, zero exactly when `A` is self-adjoint.
    pub fn self_adjoint_defect(&self, a: &CMat) -> f64 {
        let ga = &self.gram * a;
        max_abs(&(&ga - ga.adjoint()))
    }

    fn check_self_adjoint(&self, a: &CMat) -> Result<()> {
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "operator is {}x{} on a space of dimension {}",
                a.nrows(),
                a.ncols(),
                self.dim()
            )));
        }
        let defect = self.self_adjoint_defect(a);
        let scale = max_abs(&(&self.gram * a)).max(1.0);
        if defect > 1e-9 * scale {
            return Err(Error::NotSelfAdjoint(defect));
        }
        Ok(())
    }

    /// Gram-orthonormal basis of the span of the columns of `x`.
    pub fn orthonormal_span(&self, x: &CMat) -> CMat {
        self.unwhiten(&orth(&self.whiten(x)))
    }

    /// Volume of the parallelepiped spanned by the columns of `x`,
    /// `sqrt(det(xᴴGx))`.
    pub fn volume(&self, x: &CMat) -> f64 {
        if x.ncols() == 0 {
            return 1.0;
        }
        let g = x.adjoint() * &self.gram * x;
        g.determinant().re.abs().sqrt()
    }
}

/// Spectral data of a self-adjoint operator.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Eigenvalues in increasing order.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, orthonormal for the Gram matrix.
    pub vectors: CMat,
}

/// Eigen-decomposition of an operator that is self-adjoint for the metric of
/// `space`.
pub fn hermitian_eig(space: &HermitianSpace, a: &CMat) -> Result<Eigen> {
    space.check_self_adjoint(a)?;
    let n = space.dim();
    if n == 0 {
        return Ok(Eigen { values: Vec::new(), vectors: zeros(0, 0) });
    }
    let b = hermitian_part(&space.whiten_operator(a));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let w = eig.eigenvectors.select_columns(&order);
    Ok(Eigen { values, vectors: space.unwhiten(&w) })
}

/// Eigenvalues of a Hermitian matrix (standard metric), increasing.
pub fn eigvals_hermitian(a: &CMat) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(a)).eigenvalues.iter().cloned().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn det_star_of_values(values: &[f64]) -> f64 {
    let scale = values.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let cut = zero_cut(scale);
    values.iter().filter(|x| x.abs() > cut).product()
}

/// Product of the non-zero eigenvalues of an operator self-adjoint for the
/// metric of `space`; 1 when all eigenvalues vanish.
pub fn det_star(space: &HermitianSpace, a: &CMat) -> Result<f64> {
    Ok(det_star_of_values(&hermitian_eig(space, a)?.values))
}

/// `det*` of a Hermitian matrix in the standard metric.
pub fn det_star_std(a: &CMat) -> Result<f64> {
    det_star(&HermitianSpace::standard(a.nrows()), a)
}

/// Eigenvalues and orthonormal eigenvectors of a normal matrix (e.g. a
/// unitary one) from its complex Schur form.
pub fn normal_eigen(a: &CMat) -> Result<(Vec<C64>, CMat)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let schur = nalgebra::Schur::try_new(a.clone(), 1e-15, 10_000).ok_or(Error::Eigen("Schur iteration failed"))?;
    let (q, t) = schur.unpack();
    let values = (0..n).map(|i| t[(i, i)]).collect();
    Ok((values, q))
}

/// Eigenphases in `(−π, π]` of a unitary matrix, with eigenvectors.
pub fn eigenphases(u: &CMat) -> Result<(Vec<f64>, CMat)> {
    let (values, q) = normal_eigen(u)?;
    Ok((values.iter().map(|z| z.arg()).collect(), q))
}

/// Orthogonal projection on a Hermitian space.
#[derive(Debug, Clone)]
pub struct OrthoProjection {
    space: HermitianSpace,
    matrix: CMat,
}

impl OrthoProjection {
    pub fn new(space: HermitianSpace, matrix: CMat) -> Result<Self> {
        space.check_self_adjoint(&matrix).map_err(|e| match e {
            Error::NotSelfAdjoint(d) => Error::NotProjection(d),
            other => other,
        })?;
        let idem = max_abs(&(&matrix * &matrix - &matrix));
        if idem > 1e-10 * max_abs(&matrix).max(1.0) {
            return Err(Error::NotProjection(idem));
        }
        Ok(Self { space, matrix })
    }

    /// Projection onto the span of the columns of `basis`.
    pub fn onto_span(space: HermitianSpace, basis: &CMat) -> Result<Self> {
        if basis.nrows() != space.dim() {
            return Err(Error::Dimension(format!(
                "basis vectors have length {}, space has dimension {}",
                basis.nrows(),
                space.dim()
            )));
        }
        let q = space.orthonormal_span(basis);
        let matrix = &q * q.adjoint() * space.gram();
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> &HermitianSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        rank(&self.matrix)
    }
}

/// `det*(1 − P₁ − P₂ + P₁P₂ + P₂P₁)^{1/4}`, which equals the absolute
/// determinant of `P₁` restricted to `Im(P₂P₁)` (as a map onto its image).
pub fn projection_pair_detstar(p1: &OrthoProjection, p2: &OrthoProjection) -> Result<f64> {
    let n = p1.space.dim();
    if p2.space.dim() != n || max_abs(&(p1.space.gram() - p2.space.gram())) > 1e-12 {
        return Err(Error::Dimension("projections live on different spaces".into()));
    }
    let (a, b) = (&p1.matrix, &p2.matrix);
    let m = identity(n) - a - b + a * b + b * a;
    let m = (&m + p1.space.adjoint(&m)).scale(0.5);
    Ok(det_star(&p1.space, &m)?.max(0.0).powf(0.25))
}

/// `|det(P₁|_{Im(P₂P₁)})|` computed directly: the volume of `P₁U` for a
/// Gram-orthonormal basis `U` of `Im(P₂P₁)`.
pub fn projection_restriction_det(p1: &OrthoProjection, p2: &OrthoProjection) -> f64 {
    let u = p1.space.orthonormal_span(&(&p2.matrix * &p1.matrix));
    p1.space.volume(&(&p1.matrix * u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_star_drops_zero_eigenvalues() {
        assert!((det_star_std(&identity(3)).unwrap() - 1.0).abs() < 1e-14);
        let d = from_real_diag(&[0.0, 2.0, 3.0]);
        assert!((det_star_std(&d).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(det_star_std(&zeros(2, 2)).unwrap(), 1.0);
    }

    #[test]
    fn det_star_rejects_non_hermitian() {
        let a = from_real_rows(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(det_star_std(&a), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn small_eigenproblems() {
        let e = hermitian_eig(&HermitianSpace::standard(2), &from_real_diag(&[2.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
        let x = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = hermitian_eig(&HermitianSpace::standard(2), &x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gram_aware_eigenvectors_are_orthonormal() {
        let g = from_real_rows(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let space = HermitianSpace::new(g.clone()).unwrap();
        // G⁻¹H is self-adjoint for G whenever H is Hermitian.
        let h = from_real_rows(2, 2, &[1.0, 3.0, 3.0, -2.0]);
        let a = g.clone().try_inverse().unwrap() * h;
        let e = hermitian_eig(&space, &a).unwrap();
        let v = &e.vectors;
        let gram = v.adjoint() * &g * v;
        assert!(max_abs(&(gram - identity(2))) < 1e-12);
        for i in 0..2 {
            let r = &a * v.column(i) - v.column(i) * real(e.values[i]);
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_grams() {
        let g = from_real_rows(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(HermitianSpace::new(g), Err(Error::GramNotHermitian(_))));
        let g = from_real_diag(&[1.0, -1.0]);
        assert!(matches!(HermitianSpace::new(g), Err(Error::GramNotPositive)));
    }

    #[test]
    fn projection_lemma_on_lines() {
        let s = HermitianSpace::standard(2);
        let e1 = from_real_rows(2, 1, &[1.0, 0.0]);
        let p1 = OrthoProjection::onto_span(s.clone(), &e1).unwrap();
        assert!((projection_pair_detstar(&p1, &p1).unwrap() - 1.0).abs() < 1e-12);
        let t = std::f64::consts::FRAC_PI_3;
        let v = from_real_rows(2, 1, &[t.cos(), t.sin()]);
        let p2 = OrthoProjection::onto_span(s, &v).unwrap();
        assert!((projection_pair_detstar(&p1, &p2).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn subspace_helpers() {
        let a = from_real_rows(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = from_real_rows(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        let i = intersect(&a, &b);
        assert_eq!(i.ncols(), 1);
        assert!(same_subspace(&i, &from_real_rows(3, 1, &[0.0, 1.0, 0.0])));
        let k = complement(&a);
        assert!(same_subspace(&k, &from_real_rows(3, 1, &[0.0, 0.0, 1.0])));
        assert_eq!(null_space(&from_real_rows(1, 3, &[1.0, 1.0, 0.0])).ncols(), 2);
    }
}
