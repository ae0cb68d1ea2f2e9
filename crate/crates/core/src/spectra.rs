//! Roots of `det(e^{iκλ}C(λ) − 1) = 0` for scattering families.
//!
//! `κ = 4R` for the glued problem and `κ = 2R` for a single side with its
//! boundary matrix. Eigenphases of `C(λ)` are tracked as continuous branches
//! `θ_j(λ)` and each branch contributes the roots of `κλ + θ_j(λ) ∈ 2πZ`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::family::ScatteringFamily;
use crate::linalg::{eigenphases, identity, singular_values, CMat, CVec, C64};

/// Phases closer than this are treated as one eigenvalue.
pub const CLUSTER_TOL: f64 = 1e-7;
const MAX_NEWTON: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `e^{4iλR}C₁₂(λ)`.
    Full,
    /// `e^{2iλR}C_{j,bd}(λ)`.
    Boundary,
}

impl Mode {
    pub fn kappa(self, r: f64) -> f64 {
        match self {
            Mode::Full => 4.0 * r,
            Mode::Boundary => 2.0 * r,
        }
    }
}

/// `x` reduced to `(−π, π]`.
pub fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Groups phases that agree modulo `2π`; each group keeps its first phase
/// as representative.
fn cluster_phases(phases: &[f64]) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &t) in phases.iter().enumerate() {
        match clusters.iter_mut().find(|c| wrap(phases[c[0]] - t).abs() < CLUSTER_TOL) {
            Some(c) => c.push(i),
            None => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Eigenphase branches of `C(λ)` sampled on a uniform grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseBranches {
    pub grid: Vec<f64>,
    /// `branches[j][i] = θ_j(grid[i])`, unwrapped along the grid.
    pub branches: Vec<Vec<f64>>,
    /// Branches that coincide on the whole grid, i.e. one eigenvalue of
    /// multiplicity `cluster.len()`.
    pub clusters: Vec<Vec<usize>>,
    /// Largest `|e^{iθ_j} − μ/|μ||` over grid points and branches.
    pub max_residual: f64,
}

/// Grid step keeping per-step phase motion small for a family of polynomial
/// degree `d`: `window/(64(d+1))`.
pub fn default_grid_step(family: &ScatteringFamily, window: (f64, f64)) -> f64 {
    (window.1 - window.0) / (64.0 * (family.degree() as f64 + 1.0))
}

fn check_window(family: &ScatteringFamily, window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("bad window ({lo}, {hi})")));
    }
    let rad = family.radius();
    if lo.abs() > rad || hi.abs() > rad {
        return Err(Error::Domain(format!("window ({lo}, {hi}) leaves the validity radius {rad}")));
    }
    Ok(())
}

/// Unit-modulus phases of the eigenvalues with their eigenvectors; for a
/// non-unitary matrix (a truncated series) the phase of each eigenvalue.
fn phases_at(family: &ScatteringFamily, lambda: f64) -> Result<(Vec<f64>, CMat)> {
    eigenphases(&family.eval(lambda))
}

pub fn phase_branches(family: &ScatteringFamily, window: (f64, f64), grid_step: f64) -> Result<PhaseBranches> {
    check_window(family, window)?;
    if grid_step.is_nan() || grid_step <= 0.0 {
        return Err(Error::Domain(format!("grid step must be positive, got {grid_step}")));
    }
    let (lo, hi) = window;
    let steps = ((hi - lo) / grid_step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect();
    let m = family.dim();

    let (first, q) = phases_at(family, grid[0])?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| first[a].total_cmp(&first[b]));
    let mut current: Vec<f64> = order.iter().map(|&i| first[i]).collect();
    // per-step slope, seeded by Hellmann–Feynman and then by the last step,
    // so that branches crossing transversally keep their labels
    let mut slope: Vec<f64> = if family.is_constant() {
        vec![0.0; m]
    } else {
        let dc = family.derivative(grid[0]);
        order
            .iter()
            .map(|&i| {
                let v = q.column(i);
                let d = (v.adjoint() * &dc * v)[(0, 0)];
                (C64::from_polar(1.0, -first[i]) * d).im * (grid[1] - grid[0])
            })
            .collect()
    };
    let mut branches: Vec<Vec<f64>> = current.iter().map(|&t| vec![t]).collect();
    let mut max_residual: f64 = 0.0;
    for &lambda in &grid[1..] {
        let (phases, _) = phases_at(family, lambda)?;
        // greedy matching against the predicted phases, closest pairs first
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(m * m);
        for j in 0..m {
            let pred = current[j] + slope[j];
            for (k, &ph) in phases.iter().enumerate() {
                pairs.push((wrap(ph - pred).abs(), j, k));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut taken_b = vec![false; m];
        let mut taken_p = vec![false; m];
        let mut next = current.clone();
        for (d, j, k) in pairs {
            if taken_b[j] || taken_p[k] {
                continue;
            }
            if d >= PI / 4.0 {
                return Err(Error::BranchJump { lambda, jump: d });
            }
            taken_b[j] = true;
            taken_p[k] = true;
            let pred = current[j] + slope[j];
            next[j] = pred + wrap(phases[k] - pred);
            max_residual = max_residual.max(wrap(next[j] - phases[k]).abs());
        }
        for j in 0..m {
            slope[j] = next[j] - current[j];
            // the grid no longer resolves the branch
            if slope[j].abs() >= PI / 2.0 {
                return Err(Error::BranchJump { lambda, jump: slope[j].abs() });
            }
        }
        for (j, b) in branches.iter_mut().enumerate() {
            b.push(next[j]);
        }
        current = next;
    }

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for j in 0..m {
        let same = |c: &Vec<usize>| branches[c[0]].iter().zip(&branches[j]).all(|(a, b)| (a - b).abs() < CLUSTER_TOL);
        match clusters.iter_mut().find(|c| same(c)) {
            Some(c) => c.push(j),
            None => clusters.push(vec![j]),
        }
    }
    Ok(PhaseBranches { grid, branches, clusters, max_residual })
}

/// State of one eigen-cluster at a given λ.
struct ClusterState {
    theta: f64,
    dtheta: f64,
    basis: CMat,
}

/// Picks the `mult` eigenphases of `C(λ)` closest to `guess` and returns the
/// unwrapped mean phase, its λ-derivative and an orthonormal eigenbasis.
fn cluster_state(family: &ScatteringFamily, lambda: f64, guess: f64, mult: usize) -> Result<ClusterState> {
    let cl = family.eval(lambda);
    let (phases, q) = eigenphases(&cl)?;
    let mut idx: Vec<usize> = (0..phases.len()).collect();
    idx.sort_by(|&a, &b| wrap(phases[a] - guess).abs().total_cmp(&wrap(phases[b] - guess).abs()));
    idx.truncate(mult);
    let theta = guess + idx.iter().map(|&i| wrap(phases[i] - guess)).sum::<f64>() / mult as f64;
    let basis = q.select_columns(&idx);
    // Hellmann–Feynman: θ' = Im(conj(μ) tr(Qᴴ C' Q)) / mult
    let dtheta = if family.is_constant() {
        0.0
    } else {
        let dc = family.derivative(lambda);
        let tr = (basis.adjoint() * dc * &basis).trace();
        (C64::from_polar(1.0, -theta) * tr).im / mult as f64
    };
    Ok(ClusterState { theta, dtheta, basis })
}

impl PhaseBranches {
    /// Linearly interpolated branch value, used as a continuation guess.
    pub fn interpolate(&self, j: usize, lambda: f64) -> f64 {
        let g = &self.grid;
        let n = g.len();
        if n == 1 || lambda <= g[0] {
            return self.branches[j][0];
        }
        if lambda >= g[n - 1] {
            return self.branches[j][n - 1];
        }
        let h = (g[n - 1] - g[0]) / (n - 1) as f64;
        let i = (((lambda - g[0]) / h).floor() as usize).min(n - 2);
        let t = (lambda - g[i]) / (g[i + 1] - g[i]);
        self.branches[j][i] * (1.0 - t) + self.branches[j][i + 1] * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub lambda: f64,
    pub multiplicity: usize,
    /// Index of the eigen-cluster the root belongs to.
    pub branch: usize,
    /// The integer with `κλ + θ(λ) = 2πk`.
    pub k: i64,
    /// Normalized residual: the `multiplicity`-th smallest singular value of
    /// `e^{iκλ}C(λ) − 1`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaSet {
    pub r: f64,
    pub window: (f64, f64),
    pub mode: Mode,
    /// Sorted by `(λ, branch)`.
    pub roots: Vec<Root>,
}

impl LambdaSet {
    /// Roots counted with multiplicity.
    pub fn count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// `Σ f(λ)` counted with multiplicity.
    pub fn sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.roots.iter().map(|r| r.multiplicity as f64 * f(r.lambda)).sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.roots.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

fn root_residual(family: &ScatteringFamily, kappa: f64, lambda: f64, mult: usize) -> f64 {
    let m = family.dim();
    let a = family.eval(lambda) * C64::from_polar(1.0, kappa * lambda) - identity(m);
    let sv = singular_values(&a);
    sv[m - mult]
}

fn in_window(lambda: f64, window: (f64, f64)) -> bool {
    lambda > window.0 && lambda < window.1 && lambda.abs() > 1e-12 * window.0.abs().max(window.1.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Closed form for constant families, branch solver otherwise.
    Auto,
    /// Branch tracking and Newton even for constant families.
    Iterative,
}

/// All roots in the open window, excluding `λ = 0`.
pub fn lambda_roots(family: &ScatteringFamily, r: f64, window: (f64, f64), mode: Mode) -> Result<LambdaSet> {
    lambda_roots_with(family, r, window, mode, Solver::Auto)
}

pub fn lambda_roots_with(family: &ScatteringFamily, r: f64, window: (f64, f64), mode: Mode, solver: Solver) -> Result<LambdaSet> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    check_window(family, window)?;
    let kappa = mode.kappa(r);
    let mut roots = if family.is_constant() && solver == Solver::Auto {
        constant_roots(family, kappa, window)?
    } else {
        let pb = phase_branches(family, window, default_grid_step(family, window))?;
        let mut out = Vec::new();
        for (ci, cluster) in pb.clusters.iter().enumerate() {
            out.extend(branch_roots(family, &pb, ci, cluster, kappa, window)?);
        }
        out
    };
    roots.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.branch.cmp(&b.branch)));
    Ok(LambdaSet { r, window, mode, roots })
}

/// `λ = (2πk − θ_j)/κ` for constant `C`.
fn constant_roots(family: &ScatteringFamily, kappa: f64, window: (f64, f64)) -> Result<Vec<Root>> {
    let (phases, _) = eigenphases(&family.at_zero())?;
    let mut out = Vec::new();
    for (ci, cluster) in cluster_phases(&phases).iter().enumerate() {
        let theta = phases[cluster[0]];
        let mult = cluster.len();
        let k_lo = ((kappa * window.0 + theta) / TAU).floor() as i64;
        let k_hi = ((kappa * window.1 + theta) / TAU).ceil() as i64;
        for k in k_lo..=k_hi {
            let lambda = (TAU * k as f64 - theta) / kappa;
            if in_window(lambda, window) {
                out.push(Root { lambda, multiplicity: mult, branch: ci, k, residual: root_residual(family, kappa, lambda, mult) });
            }
        }
    }
    Ok(out)
}

/// Roots of one cluster by bracketing on the grid and safeguarded Newton.
fn branch_roots(
    family: &ScatteringFamily,
    pb: &PhaseBranches,
    ci: usize,
    cluster: &[usize],
    kappa: f64,
    window: (f64, f64),
) -> Result<Vec<Root>> {
    let j = cluster[0];
    let mult = cluster.len();
    let g: Vec<f64> = pb.grid.iter().zip(&pb.branches[j]).map(|(l, t)| kappa * l + t).collect();
    let mut out = Vec::new();
    for i in 0..pb.grid.len() - 1 {
        let (g0, g1) = (g[i], g[i + 1]);
        let (lo_g, hi_g) = if g0 <= g1 { (g0, g1) } else { (g1, g0) };
        // 2πk ∈ (lo_g, hi_g]
        let k_start = (lo_g / TAU).floor() as i64 + 1;
        let k_end = (hi_g / TAU).floor() as i64;
        for k in k_start..=k_end {
            let lambda = solve_branch(family, pb, j, mult, kappa, k, (pb.grid[i], pb.grid[i + 1]))?;
            if in_window(lambda, window) {
                out.push(Root { lambda, multiplicity: mult, branch: ci, k, residual: root_residual(family, kappa, lambda, mult) });
            }
        }
    }
    Ok(out)
}

fn solve_branch(
    family: &ScatteringFamily,
    pb: &PhaseBranches,
    j: usize,
    mult: usize,
    kappa: f64,
    k: i64,
    bracket: (f64, f64),
) -> Result<f64> {
    let target = TAU * k as f64;
    let h = |x: f64| -> Result<(f64, f64)> {
        let st = cluster_state(family, x, pb.interpolate(j, x), mult)?;
        Ok((kappa * x + st.theta - target, kappa + st.dtheta))
    };
    let (mut a, mut b) = bracket;
    let (mut ha, _) = h(a)?;
    let (hb, _) = h(b)?;
    if ha == 0.0 {
        return Ok(a);
    }
    if hb == 0.0 {
        return Ok(b);
    }
    if ha.signum() == hb.signum() {
        return Err(Error::NoConvergence { lo: a, hi: b });
    }
    let mut x = a - ha * (b - a) / (hb - ha);
    for _ in 0..MAX_NEWTON {
        let (hx, dx) = h(x)?;
        if hx == 0.0 {
            return Ok(x);
        }
        if hx.signum() == ha.signum() {
            a = x;
            ha = hx;
        } else {
            b = x;
        }
        let newton = x - hx / dx;
        let next = if dx != 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) || (b - a) <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence { lo: a, hi: b })
}

/// One output of [`near_root_refine`].
#[derive(Debug, Clone)]
pub struct Refined {
    /// Eigenphase of `C(z₀)` of this cluster.
    pub theta: f64,
    pub z: f64,
    pub w: CVec,
    /// `P_j(z₀)v`.
    pub projected: CVec,
}

fn fixed_point_defect(family: &ScatteringFamily, kappa: f64, z: f64, v: &CVec) -> f64 {
    let e = family.eval(z) * C64::from_polar(1.0, kappa * z);
    (e * v - v).norm()
}

/// Splits an approximate solution `(z₀, v)` of `e^{4iRz}C(z)v = v` into
/// exact solutions `(z_j, w_j)`, one per eigen-cluster of `C(z₀)`.
pub fn near_root_refine(family: &ScatteringFamily, r: f64, z0: f64, v: &CVec) -> Result<Vec<Refined>> {
    if v.len() != family.dim() {
        return Err(Error::Dimension(format!("vector of length {} for a family of size {}", v.len(), family.dim())));
    }
    let kappa = Mode::Full.kappa(r);
    let norm = v.norm();
    let eps = fixed_point_defect(family, kappa, z0, v);
    if !(eps < norm) {
        return Err(Error::Precondition { residual: eps, norm });
    }
    let (phases, q) = eigenphases(&family.eval(z0))?;
    let mut out = Vec::new();
    for cluster in cluster_phases(&phases) {
        let theta = phases[cluster[0]];
        let basis = q.select_columns(&cluster);
        let projected: CVec = &basis * (basis.adjoint() * v);
        if projected.norm_squared() < norm * eps {
            out.push(Refined { theta, z: z0, w: CVec::zeros(v.len()), projected });
            continue;
        }
        let k = ((kappa * z0 + theta) / TAU).round();
        let (z, basis_z) = if family.is_constant() {
            ((TAU * k - theta) / kappa, basis)
        } else {
            refine_newton(family, kappa, z0, theta, cluster.len(), TAU * k)?
        };
        let w = &basis_z * (basis_z.adjoint() * v);
        out.push(Refined { theta, z, w, projected });
    }
    Ok(out)
}

/// Newton on `κz + θ(z) = target`, following the cluster by continuation.
fn refine_newton(family: &ScatteringFamily, kappa: f64, z0: f64, theta0: f64, mult: usize, target: f64) -> Result<(f64, CMat)> {
    let mut z = z0;
    let mut theta = theta0;
    for _ in 0..MAX_NEWTON {
        let st = cluster_state(family, z, theta, mult)?;
        theta = st.theta;
        let hz = kappa * z + st.theta - target;
        let step = hz / (kappa + st.dtheta);
        if step.abs() <= 4.0 * f64::EPSILON * z.abs().max(1e-300) || hz == 0.0 {
            return Ok((z, st.basis));
        }
        z -= step;
    }
    Err(Error::NoConvergence { lo: z0, hi: z })
}

/// Margins of the three refinement bounds; each is satisfied when the
/// corresponding field is `≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineBounds {
    /// `max_j |z_j − z₀|² − ε/‖v‖`.
    pub root_shift: f64,
    /// `max_j ‖P_j(z₀)v − w_j‖² − ‖v‖ε`.
    pub vector_shift: f64,
    /// `max_j ‖e^{4iRz_j}C(z_j)w_j − w_j‖ − 1e-10·max(1, ‖v‖)`.
    pub fixed_point: f64,
}

impl RefineBounds {
    pub fn hold(&self) -> bool {
        self.root_shift <= 0.0 && self.vector_shift <= 0.0 && self.fixed_point <= 0.0
    }
}

pub fn refine_bounds(family: &ScatteringFamily, r: f64, z0: f64, v: &CVec, refined: &[Refined]) -> RefineBounds {
    let kappa = Mode::Full.kappa(r);
    let norm = v.norm();
    let eps = fixed_point_defect(family, kappa, z0, v);
    let mut b = RefineBounds { root_shift: f64::NEG_INFINITY, vector_shift: f64::NEG_INFINITY, fixed_point: f64::NEG_INFINITY };
    for x in refined {
        b.root_shift = b.root_shift.max((x.z - z0).powi(2) - eps / norm);
        b.vector_shift = b.vector_shift.max((&x.projected - &x.w).norm_squared() - norm * eps);
        b.fixed_point = b.fixed_point.max(fixed_point_defect(family, kappa, x.z, &x.w) - 1e-10 * norm.max(1.0));
    }
    b
}

/// `|Σ_{ρ∈Λ_R(C), 0<ρ<γ} f(ρ) − Σ_{λ∈Λ*_R(C), 0<λ<γ} f(λ)|`, where `Λ*` uses
/// the frozen matrix `C(0)`.
pub fn lambda_compare(family: &ScatteringFamily, r: f64, gamma: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let window = (0.0, gamma);
    let live = lambda_roots(family, r, window, Mode::Full)?;
    let frozen = lambda_roots(&ScatteringFamily::constant(family.at_zero()), r, window, Mode::Full)?;
    Ok((live.sum(&f) - frozen.sum(&f)).abs())
}

/// Test function with its derivative, for the `Λ` versus `Λ*` comparison.
#[derive(Clone, Copy)]
pub struct TestFunction<'a> {
    pub name: &'a str,
    pub f: &'a (dyn Fn(f64) -> f64 + Sync),
    pub df: &'a (dyn Fn(f64) -> f64 + Sync),
}

impl TestFunction<'_> {
    /// `γ² sup|f'| + γ sup|f|` over `|x| ≤ γ`, sampled on 2001 points.
    pub fn bound_shape(&self, gamma: f64) -> f64 {
        let (mut sf, mut sd) = (0.0f64, 0.0f64);
        for i in 0..=2000 {
            let x = gamma * (-1.0 + i as f64 / 1000.0);
            sf = sf.max((self.f)(x).abs());
            sd = sd.max((self.df)(x).abs());
        }
        gamma * gamma * sd + gamma * sf
    }
}

/// Observed ratio `difference / (γ² sup|f'| + γ sup|f|)` at each `(R, γ)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareSample {
    pub r: f64,
    pub gamma: f64,
    pub difference: f64,
    pub ratio: f64,
}

/// `γ` values log-spaced over `[R^{−1+κ}, 1]`.
pub fn gamma_grid(r: f64, kappa: f64, count: usize) -> Vec<f64> {
    let lo = r.powf(-1.0 + kappa).ln();
    (0..count).map(|i| (lo * (1.0 - i as f64 / (count - 1).max(1) as f64)).exp()).collect()
}

pub fn compare_sweep(
    exec: Exec,
    family: &ScatteringFamily,
    rs: &[f64],
    kappa: f64,
    gammas_per_r: usize,
    test: TestFunction<'_>,
) -> Result<Vec<CompareSample>> {
    let cases: Vec<(f64, f64)> = rs.iter().flat_map(|&r| gamma_grid(r, kappa, gammas_per_r).into_iter().map(move |g| (r, g))).collect();
    exec.map(&cases, |&(r, gamma)| {
        let difference = lambda_compare(family, r, gamma, test.f)?;
        let shape = test.bound_shape(gamma);
        let ratio = if shape > 0.0 { difference / shape } else if difference == 0.0 { 0.0 } else { f64::INFINITY };
        Ok(CompareSample { r, gamma, difference, ratio })
    })
    .into_iter()
    .collect()
}

/// Smallest `a` covering every sample.
pub fn fit_compare_constant(samples: &[CompareSample]) -> f64 {
    samples.iter().map(|s| s.ratio).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_real_diag};

    fn diag_phases(ph: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(ph.len(), ph.iter().map(|&t| C64::from_polar(1.0, t))))
    }

    #[test]
    fn identity_branches_and_roots() {
        let f = ScatteringFamily::constant(identity(2));
        let pb = phase_branches(&f, (0.0, 1.0), 0.1).unwrap();
        assert_eq!(pb.clusters, vec![vec![0, 1]]);
        assert!(pb.branches.iter().flatten().all(|t| t.abs() < 1e-14));
        let set = lambda_roots(&f, 1.0, (0.0, TAU), Mode::Full).unwrap();
        let l: Vec<f64> = set.roots.iter().map(|r| r.lambda).collect();
        assert_eq!(l.len(), 3);
        for (x, k) in l.iter().zip(1..) {
            assert!((x - PI * k as f64 / 2.0).abs() < 1e-14);
        }
        assert!(set.roots.iter().all(|r| r.multiplicity == 2));
    }

    #[test]
    fn minus_identity_roots() {
        let f = ScatteringFamily::constant(-identity(1));
        let set = lambda_roots(&f, 1.0, (0.0, PI), Mode::Full).unwrap();
        let l: Vec<f64> = set.roots.iter().map(|r| r.lambda).collect();
        assert_eq!(l.len(), 2);
        assert!((l[0] - PI / 4.0).abs() < 1e-14 && (l[1] - 3.0 * PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn constant_branches_are_eigenphases() {
        let f = ScatteringFamily::constant(diag_phases(&[PI / 3.0, -PI / 3.0]));
        let pb = phase_branches(&f, (-1.0, 1.0), 0.05).unwrap();
        let mut ends: Vec<f64> = pb.branches.iter().map(|b| b[b.len() - 1]).collect();
        ends.sort_by(f64::total_cmp);
        assert!((ends[0] + PI / 3.0).abs() < 1e-12 && (ends[1] - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_phase_branch() {
        let f = ScatteringFamily::truncated_phase(identity(1), 1.0, 3, 0.2);
        let pb = phase_branches(&f, (-0.1, 0.1), 0.01).unwrap();
        for (x, t) in pb.grid.iter().zip(&pb.branches[0]) {
            let direct = f.eval(*x)[(0, 0)].arg();
            assert!((t - direct).abs() < 1e-14);
            assert!((t - x).abs() < 1e-6);
        }
    }

    #[test]
    fn degree_one_family_roots() {
        let (a, r) = (0.1, 10.0);
        let f = ScatteringFamily::scalar_phase(2, a, f64::INFINITY);
        let set = lambda_roots(&f, r, (0.0, 2.0), Mode::Full).unwrap();
        assert!(!set.roots.is_empty());
        for root in &set.roots {
            let exact = TAU * root.k as f64 / (4.0 * r + a);
            assert!((root.lambda - exact).abs() < 1e-12, "{} vs {}", root.lambda, exact);
            assert_eq!(root.multiplicity, 2);
            assert!(root.residual < 1e-9);
        }
        assert_eq!(set.roots.len(), ((4.0 * r + a) * 2.0 / TAU).floor() as usize);
    }

    #[test]
    fn branch_jump_is_reported() {
        let f = ScatteringFamily::scalar_phase(1, 50.0, f64::INFINITY);
        let err = phase_branches(&f, (0.0, 1.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::BranchJump { .. }));
    }

    #[test]
    fn refine_exact_root() {
        let f = ScatteringFamily::constant(from_real_diag(&[1.0, -1.0]));
        let r = 2.0;
        let z0 = TAU / (4.0 * r);
        let v = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let out = near_root_refine(&f, r, z0, &v).unwrap();
        let hit = out.iter().find(|x| x.w.norm() > 0.0).unwrap();
        assert!((hit.z - z0).abs() < 1e-14);
        assert!((&hit.w - &v).norm() < 1e-14);
        assert!(refine_bounds(&f, r, z0, &v, &out).hold());
    }

    #[test]
    fn refine_perturbed_root() {
        let f = ScatteringFamily::constant(from_real_diag(&[1.0, -1.0]));
        let r = 5.0;
        let z0 = TAU / (4.0 * r) + 1e-4;
        let v = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let out = near_root_refine(&f, r, z0, &v).unwrap();
        let b = refine_bounds(&f, r, z0, &v, &out);
        assert!(b.hold(), "{b:?}");
        assert!(b.root_shift < -1e-4);
    }

    #[test]
    fn refine_refuses_bad_start() {
        let f = ScatteringFamily::constant(-identity(1));
        let v = CVec::from_vec(vec![c(1.0, 0.0)]);
        // e^{0}·(−1)v − v = −2v
        assert!(matches!(near_root_refine(&f, 1.0, 0.0, &v), Err(Error::Precondition { .. })));
    }

    #[test]
    fn frozen_comparison_vanishes_for_constant_families() {
        let f = ScatteringFamily::constant(diag_phases(&[0.3, -0.3, PI]));
        for g in [0.3, 0.7, 1.0] {
            assert_eq!(lambda_compare(&f, 10.0, g, |x| x).unwrap(), 0.0);
        }
    }

    #[test]
    fn frozen_comparison_counts_shifted_roots() {
        let (a, r) = (0.1, 10.0);
        let f = ScatteringFamily::scalar_phase(1, a, f64::INFINITY);
        for gamma in [0.3, 0.55, 1.0] {
            let live = ((4.0 * r + a) * gamma / TAU).ceil() as i64 - 1;
            let frozen = ((4.0 * r) * gamma / TAU).ceil() as i64 - 1;
            let d = lambda_compare(&f, r, gamma, |_| 1.0).unwrap();
            assert_eq!(d, (live - frozen).abs() as f64);
        }
    }
}
