//! Finite metrized cochain complexes, their torsion and canonical section.

use crate::error::{Error, Result};
use crate::linalg::{block_diag, eigvals_hermitian, hcat, max_abs, op_norm, rank, zeros, CMat, HermitianSpace};

/// A bounded cochain complex `V^k → V^{k+1} → …` of Hermitian spaces.
///
/// `spaces[j]` sits in degree `offset + j` and `maps[j]` goes from
/// `spaces[j]` to `spaces[j + 1]`.
#[derive(Debug, Clone)]
pub struct FiniteComplex {
    offset: i64,
    spaces: Vec<HermitianSpace>,
    maps: Vec<CMat>,
}

fn sign(d: i64) -> f64 {
    if d.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl FiniteComplex {
    /// Complex starting in degree 0.
    pub fn new(spaces: Vec<HermitianSpace>, maps: Vec<CMat>) -> Result<Self> {
        Self::starting_at(0, spaces, maps)
    }

    pub fn starting_at(offset: i64, spaces: Vec<HermitianSpace>, maps: Vec<CMat>) -> Result<Self> {
        if spaces.is_empty() {
            if !maps.is_empty() {
                return Err(Error::Dimension("maps given without spaces".into()));
            }
            return Ok(Self { offset, spaces, maps });
        }
        if maps.len() + 1 != spaces.len() {
            return Err(Error::Dimension(format!(
                "{} spaces need {} maps, got {}",
                spaces.len(),
                spaces.len() - 1,
                maps.len()
            )));
        }
        for (j, m) in maps.iter().enumerate() {
            if m.ncols() != spaces[j].dim() || m.nrows() != spaces[j + 1].dim() {
                return Err(Error::Dimension(format!(
                    "map in degree {} is {}x{}, expected {}x{}",
                    offset + j as i64,
                    m.nrows(),
                    m.ncols(),
                    spaces[j + 1].dim(),
                    spaces[j].dim()
                )));
            }
        }
        for j in 1..maps.len() {
            let comp = &maps[j] * &maps[j - 1];
            let scale = (op_norm(&maps[j]) * op_norm(&maps[j - 1])).max(1.0);
            let residual = max_abs(&comp) / scale;
            if residual > 1e-10 {
                return Err(Error::NotComplex { degree: offset + j as i64 - 1, residual });
            }
        }
        Ok(Self { offset, spaces, maps })
    }

    /// Short complex `0 → V → W → 0` with `V` in degree 1, standard metrics.
    pub fn short(a: CMat) -> Result<Self> {
        let v = HermitianSpace::standard(a.ncols());
        let w = HermitianSpace::standard(a.nrows());
        Self::starting_at(1, vec![v, w], vec![a])
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    pub fn spaces(&self) -> &[HermitianSpace] {
        &self.spaces
    }

    pub fn maps(&self) -> &[CMat] {
        &self.maps
    }

    pub fn degree(&self, j: usize) -> i64 {
        self.offset + j as i64
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim()).collect()
    }

    /// Rank of the differential leaving position `j` (0 past either end).
    pub fn rank_out(&self, j: usize) -> usize {
        self.maps.get(j).map(rank).unwrap_or(0)
    }

    fn rank_in(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.rank_out(j - 1)
        }
    }

    /// First degree where exactness fails, if any.
    pub fn exactness_defect(&self) -> Option<i64> {
        (0..self.len())
            .find(|&j| self.rank_in(j) + self.rank_out(j) != self.spaces[j].dim())
            .map(|j| self.degree(j))
    }

    pub fn is_exact(&self) -> bool {
        self.exactness_defect().is_none()
    }

    fn require_exact(&self) -> Result<()> {
        match self.exactness_defect() {
            Some(d) => Err(Error::NotExact(d)),
            None => Ok(()),
        }
    }

    /// Differential at position `j` in whitened (orthonormal) coordinates.
    fn whitened_map(&self, j: usize) -> CMat {
        self.spaces[j].whiten_map(&self.maps[j], &self.spaces[j + 1])
    }

    /// `log` of the torsion `∏_j det((∂+∂*)²|V^j)^{(−1)^j j/2}`.
    pub fn log_torsion(&self) -> Result<f64> {
        self.require_exact()?;
        let whitened: Vec<CMat> = (0..self.maps.len()).map(|j| self.whitened_map(j)).collect();
        let mut total = 0.0;
        for j in 0..self.len() {
            let n = self.spaces[j].dim();
            if n == 0 {
                continue;
            }
            let mut lap = zeros(n, n);
            if j > 0 {
                let d = &whitened[j - 1];
                lap += d * d.adjoint();
            }
            if let Some(d) = whitened.get(j) {
                lap += d.adjoint() * d;
            }
            let log_det: f64 = eigvals_hermitian(&lap).iter().map(|x| x.ln()).sum();
            let deg = self.degree(j);
            total += sign(deg) * deg as f64 * 0.5 * log_det;
        }
        Ok(total)
    }

    /// `log` of the torsion from singular values of the whitened
    /// differentials: an isomorphism from degree `k` to `k + 1` contributes
    /// `|det|^{(−1)^{k+1}}`. Equal to [`log_torsion`](Self::log_torsion) but
    /// keeps full relative accuracy when the differentials have very
    /// different scales.
    pub fn log_torsion_singular(&self) -> Result<f64> {
        self.require_exact()?;
        let mut total = 0.0;
        for j in 0..self.maps.len() {
            let r = self.rank_out(j);
            let sv = crate::linalg::singular_values(&self.whitened_map(j));
            let log_det: f64 = sv[..r].iter().map(|x| x.ln()).sum();
            total -= sign(self.degree(j)) * log_det;
        }
        Ok(total)
    }

    pub fn torsion(&self) -> Result<f64> {
        Ok(self.log_torsion()?.exp())
    }

    /// Norm of the canonical section built from lifts `s_j` spanning the
    /// orthogonal complement of `ker ∂_j`, as the alternating product of
    /// volumes of the bases `(∂ s_{j−1}, s_j)` of `V^j`.
    pub fn canonical_section_norm(&self) -> Result<f64> {
        self.require_exact()?;
        let lifts: Vec<CMat> = (0..self.len()).map(|j| self.lifts(j)).collect();
        let mut log_norm = 0.0;
        for j in 0..self.len() {
            let s = &lifts[j];
            let basis = if j > 0 { hcat(&(&self.maps[j - 1] * &lifts[j - 1]), s) } else { s.clone() };
            let vol = self.spaces[j].volume(&basis);
            log_norm += sign(self.degree(j)) * vol.ln();
        }
        Ok(log_norm.exp())
    }

    /// Gram-orthonormal basis of `(ker ∂_j)^⊥ ⊆ V^j` from right singular
    /// vectors of the whitened differential.
    fn lifts(&self, j: usize) -> CMat {
        let n = self.spaces[j].dim();
        if j >= self.maps.len() || n == 0 {
            return zeros(n, 0);
        }
        let d = self.whitened_map(j);
        let r = rank(&d);
        let k = crate::linalg::null_space(&d);
        let complement = crate::linalg::complement(&k);
        debug_assert_eq!(complement.ncols(), r);
        self.spaces[j].unwhiten(&complement)
    }

    /// Right shift by `n`: the space in degree `k` moves to degree `k + n`.
    pub fn shift(&self, n: i64) -> Self {
        Self { offset: self.offset + n, spaces: self.spaces.clone(), maps: self.maps.clone() }
    }

    /// Degreewise orthogonal direct sum, padding with zero spaces where the
    /// degree ranges differ.
    pub fn direct_sum(&self, other: &Self) -> Self {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let lo = self.offset.min(other.offset);
        let hi = (self.offset + self.len() as i64).max(other.offset + other.len() as i64);
        let space_at = |c: &Self, d: i64| -> HermitianSpace {
            let j = d - c.offset;
            if j >= 0 && (j as usize) < c.len() {
                c.spaces[j as usize].clone()
            } else {
                HermitianSpace::standard(0)
            }
        };
        let map_at = |c: &Self, d: i64| -> CMat {
            let j = d - c.offset;
            if j >= 0 && (j as usize) < c.maps.len() {
                c.maps[j as usize].clone()
            } else {
                zeros(space_at(c, d + 1).dim(), space_at(c, d).dim())
            }
        };
        let mut spaces = Vec::new();
        let mut maps = Vec::new();
        for d in lo..hi {
            let (a, b) = (space_at(self, d), space_at(other, d));
            let gram = block_diag(&[a.gram(), b.gram()]);
            spaces.push(HermitianSpace::new(gram).expect("sum of valid grams"));
            if d + 1 < hi {
                maps.push(block_diag(&[&map_at(self, d), &map_at(other, d)]));
            }
        }
        Self { offset: lo, spaces, maps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real_diag, identity};

    #[test]
    fn short_sequences() {
        let c = FiniteComplex::short(from_real_diag(&[2.0, 3.0])).unwrap();
        assert!((c.torsion().unwrap() - 6.0).abs() < 1e-12);
        assert!((c.shift(1).torsion().unwrap() - 1.0 / 6.0).abs() < 1e-12);
        // The same map placed in degrees 0, 1.
        assert!((c.shift(-1).torsion().unwrap() - 1.0 / 6.0).abs() < 1e-12);
        let id = FiniteComplex::short(identity(3)).unwrap();
        assert!((id.torsion().unwrap() - 1.0).abs() < 1e-12);
        assert!((id.canonical_section_norm().unwrap() - 1.0).abs() < 1e-12);
        let five = FiniteComplex::short(from_real_diag(&[5.0])).unwrap();
        assert!((five.canonical_section_norm().unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn exactness() {
        assert!(FiniteComplex::short(identity(1)).unwrap().is_exact());
        let z = FiniteComplex::short(zeros(1, 1)).unwrap();
        assert!(!z.is_exact());
        assert!(matches!(z.torsion(), Err(Error::NotExact(1))));
    }

    #[test]
    fn direct_sum_multiplies() {
        let a = FiniteComplex::short(from_real_diag(&[2.0])).unwrap();
        let b = FiniteComplex::short(from_real_diag(&[3.0])).unwrap();
        assert!((a.direct_sum(&b).torsion().unwrap() - 6.0).abs() < 1e-12);
        let trivial = FiniteComplex::new(vec![], vec![]).unwrap();
        assert!((a.direct_sum(&trivial).torsion().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_complex() {
        let s = || HermitianSpace::standard(1);
        let one = identity(1);
        let err = FiniteComplex::new(vec![s(), s(), s()], vec![one.clone(), one]).unwrap_err();
        assert!(matches!(err, Error::NotComplex { degree: 0, .. }));
    }
}
