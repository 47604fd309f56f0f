//! Coherence measures with respect to a fixed basis or a Lüders measurement.
//!
//! For a Lüders measurement `{Pi_j}` the incoherent states are those with
//! `sum_j Pi_j delta Pi_j = delta`. The divergence minimum over them is
//! `(N^alpha - 1)/(alpha - 1)` with `N = sum_j Tr (Pi_j rho^alpha Pi_j)^(1/alpha)`,
//! attained at `delta* = (1/N) sum_j (Pi_j rho^alpha Pi_j)^(1/alpha)`.
//! A basis is the special case of rank-one projectors.

use rand::Rng;

use crate::correlations::Measure;
use crate::entropies::AlphaParam;
use crate::error::{Error, Result};
use crate::linalg::{
    self, clipped_power, frobenius_norm, hermiticity_deviation, identity, require_unitary,
    CMatrix, C64, DEFAULT_EIG_CLIP, DEFAULT_HERMITICITY_TOL,
};
use crate::states::{random_density_with, DensityMatrix};

pub const MEASUREMENT_TOL: f64 = 1e-10;

/// Complete set of mutually orthogonal projectors.
#[derive(Debug, Clone)]
pub struct LudersMeasurement {
    projectors: Vec<CMatrix>,
    /// Orthonormal basis of each projector's range, as columns.
    ranges: Vec<CMatrix>,
}

impl LudersMeasurement {
    pub fn new(projectors: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = projectors.first() else {
            return Err(Error::InvalidMeasurement("no projectors".into()));
        };
        let d = first.nrows();
        let mut total = CMatrix::zeros(d, d);
        let mut ranges = Vec::with_capacity(projectors.len());
        for (j, p) in projectors.iter().enumerate() {
            if p.nrows() != d || p.ncols() != d {
                return Err(Error::InvalidMeasurement(format!(
                    "projector {j} is {}x{}, expected {d}x{d}",
                    p.nrows(),
                    p.ncols()
                )));
            }
            if hermiticity_deviation(p) > MEASUREMENT_TOL {
                return Err(Error::InvalidMeasurement(format!("projector {j} is not Hermitian")));
            }
            if frobenius_norm(&(p * p - p)) > MEASUREMENT_TOL {
                return Err(Error::InvalidMeasurement(format!("projector {j} is not idempotent")));
            }
            for (k, q) in projectors.iter().enumerate().skip(j + 1) {
                if q.shape() == p.shape() && frobenius_norm(&(p * q)) > MEASUREMENT_TOL {
                    return Err(Error::InvalidMeasurement(format!(
                        "projectors {j} and {k} are not orthogonal"
                    )));
                }
            }
            total += p;
            ranges.push(range_basis(p)?);
        }
        if frobenius_norm(&(total - identity(d))) > MEASUREMENT_TOL {
            return Err(Error::InvalidMeasurement("projectors do not sum to the identity".into()));
        }
        Ok(Self { projectors, ranges })
    }

    /// Rank-one projectors onto the columns of a unitary.
    pub fn from_basis(basis: &CMatrix) -> Result<Self> {
        require_unitary(basis, 1e-8)?;
        let projectors = (0..basis.ncols())
            .map(|j| linalg::outer(&basis.column(j).into_owned()))
            .collect();
        Self::new(projectors)
    }

    /// Projectors onto consecutive blocks of computational basis states with
    /// the given sizes.
    pub fn from_block_sizes(sizes: &[usize]) -> Result<Self> {
        let d: usize = sizes.iter().sum();
        let mut start = 0;
        let mut projectors = Vec::with_capacity(sizes.len());
        for &size in sizes {
            let mut p = CMatrix::zeros(d, d);
            for k in start..start + size {
                p[(k, k)] = C64::new(1.0, 0.0);
            }
            projectors.push(p);
            start += size;
        }
        Self::new(projectors)
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// `sum_j Pi_j M Pi_j`.
    pub fn dephase(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for p in &self.projectors {
            out += p * m * p;
        }
        out
    }

    /// Membership in the incoherent set: `‖sum_j Pi_j delta Pi_j − delta‖_F <= tol`.
    pub fn is_incoherent(&self, delta: &DensityMatrix, tol: f64) -> Result<bool> {
        self.check_dim(delta)?;
        Ok(frobenius_norm(&(self.dephase(delta.matrix()) - delta.matrix())) <= tol)
    }

    /// Random incoherent state: independent random states on each range,
    /// mixed with Dirichlet weights.
    pub fn random_incoherent<R: Rng + ?Sized>(&self, rng: &mut R) -> DensityMatrix {
        let weights = crate::rng::dirichlet_uniform(self.len(), rng);
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (w, range) in weights.iter().zip(&self.ranges) {
            let r = range.ncols();
            let sigma = random_density_with(r, r, rng);
            out += range * sigma.matrix() * range.adjoint() * C64::new(*w, 0.0);
        }
        DensityMatrix::new(out).expect("mixture of states is a state")
    }

    fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::InvalidMeasurement(format!(
                "measurement on dimension {} applied to a state of dimension {}",
                self.dim(),
                rho.dim()
            )));
        }
        Ok(())
    }

    /// `N` and the embedded operators `(Pi_j rho^alpha Pi_j)^(1/alpha)`, with
    /// each power taken on the compressed range of `Pi_j`.
    fn powered_blocks(&self, rho: &DensityMatrix, alpha: AlphaParam) -> Result<(f64, Vec<CMatrix>)> {
        self.check_dim(rho)?;
        if self.len() == 1 {
            // Trivial measurement: (rho^alpha)^(1/alpha) = rho and Tr rho = 1.
            return Ok((1.0, vec![rho.matrix().clone()]));
        }
        let powered = linalg::mat_pow(rho.matrix(), alpha.get(), DEFAULT_EIG_CLIP)?;
        let inv = 1.0 / alpha.get();
        let mut parts = Vec::with_capacity(self.len());
        for range in &self.ranges {
            let compressed = range.adjoint() * &powered * range;
            let eig = linalg::herm_eig(&compressed, DEFAULT_HERMITICITY_TOL)?;
            let tr: f64 = eig
                .eigenvalues
                .iter()
                .map(|&l| clipped_power(l, inv, DEFAULT_EIG_CLIP))
                .sum();
            let x = eig.map_spectrum(|l| clipped_power(l, inv, DEFAULT_EIG_CLIP));
            parts.push((tr, range * x * range.adjoint()));
        }
        // Canonical summation order makes the result independent of how the
        // projectors are listed.
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = parts.iter().map(|p| p.0).sum();
        Ok((n, parts.into_iter().map(|p| p.1).collect()))
    }

    /// `N = sum_j Tr (Pi_j rho^alpha Pi_j)^(1/alpha)`.
    pub fn n(&self, rho: &DensityMatrix, alpha: AlphaParam) -> Result<f64> {
        Ok(self.powered_blocks(rho, alpha)?.0)
    }
}

fn range_basis(p: &CMatrix) -> Result<CMatrix> {
    let eig = linalg::herm_eig(p, DEFAULT_HERMITICITY_TOL)?;
    let cols: Vec<usize> = (0..eig.dim()).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
    if cols.is_empty() {
        return Err(Error::InvalidMeasurement("zero projector".into()));
    }
    Ok(eig.eigenvectors.select_columns(cols.iter()))
}

fn basis_diagonal_n(rho: &DensityMatrix, basis: &CMatrix, alpha: AlphaParam) -> Result<f64> {
    if basis.nrows() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis of size {} for a state of dimension {}",
            basis.nrows(),
            rho.dim()
        )));
    }
    require_unitary(basis, 1e-8)?;
    let powered = linalg::mat_pow(rho.matrix(), alpha.get(), DEFAULT_EIG_CLIP)?;
    let inv = 1.0 / alpha.get();
    Ok((0..basis.ncols())
        .map(|j| {
            let u = basis.column(j);
            let diag = (u.adjoint() * &powered * u)[(0, 0)].re;
            clipped_power(diag, inv, DEFAULT_EIG_CLIP)
        })
        .sum())
}

/// `C_alpha(rho) = ((sum_j <j|rho^alpha|j>^(1/alpha))^alpha - 1)/(alpha - 1)`.
pub fn c_alpha(rho: &DensityMatrix, basis: &CMatrix, alpha: AlphaParam) -> Result<f64> {
    Ok(Measure::Standard.from_n(basis_diagonal_n(rho, basis, alpha)?, alpha))
}

/// `C~_alpha(rho) = (sum_j <j|rho^alpha|j>^(1/alpha) - 1)/(alpha - 1)`.
pub fn c_tilde_alpha(rho: &DensityMatrix, basis: &CMatrix, alpha: AlphaParam) -> Result<f64> {
    Ok(Measure::Modified.from_n(basis_diagonal_n(rho, basis, alpha)?, alpha))
}

/// Partial coherence `(N^alpha - 1)/(alpha - 1)` for a Lüders measurement.
pub fn luders_c(rho: &DensityMatrix, measurement: &LudersMeasurement, alpha: AlphaParam) -> Result<f64> {
    Ok(Measure::Standard.from_n(measurement.n(rho, alpha)?, alpha))
}

/// Modified partial coherence `(N - 1)/(alpha - 1)`.
pub fn luders_c_tilde(rho: &DensityMatrix, measurement: &LudersMeasurement, alpha: AlphaParam) -> Result<f64> {
    Ok(Measure::Modified.from_n(measurement.n(rho, alpha)?, alpha))
}

/// The closest incoherent state `(1/N) sum_j (Pi_j rho^alpha Pi_j)^(1/alpha)`.
pub fn luders_optimal_incoherent(
    rho: &DensityMatrix,
    measurement: &LudersMeasurement,
    alpha: AlphaParam,
) -> Result<DensityMatrix> {
    let (n, blocks) = measurement.powered_blocks(rho, alpha)?;
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for x in &blocks {
        out += x;
    }
    out /= C64::new(n, 0.0);
    DensityMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropies::tsallis_relative;
    use crate::states::{random_density, random_unitary};
    use approx::assert_abs_diff_eq;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    fn plus_state() -> DensityMatrix {
        let h = C64::new(0.5, 0.0);
        DensityMatrix::new(CMatrix::from_element(2, 2, h)).unwrap()
    }

    #[test]
    fn diagonal_states_are_incoherent() {
        let rho = DensityMatrix::new(linalg::real_diagonal(&[0.2, 0.3, 0.5])).unwrap();
        for a in [0.5, 1.5, 2.0] {
            assert_abs_diff_eq!(c_alpha(&rho, &identity(3), alpha(a)).unwrap(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(c_tilde_alpha(&rho, &identity(3), alpha(a)).unwrap(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn maximally_coherent_qubit() {
        let plus = plus_state();
        assert_abs_diff_eq!(c_alpha(&plus, &identity(2), alpha(2.0)).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            c_tilde_alpha(&plus, &identity(2), alpha(2.0)).unwrap(),
            2f64.sqrt() - 1.0,
            epsilon = 1e-14
        );
        let computational = LudersMeasurement::from_basis(&identity(2)).unwrap();
        assert_abs_diff_eq!(
            luders_c_tilde(&plus, &computational, alpha(2.0)).unwrap(),
            2f64.sqrt() - 1.0,
            epsilon = 1e-14
        );
        let delta = luders_optimal_incoherent(&plus, &computational, alpha(2.0)).unwrap();
        assert!(frobenius_norm(&(delta.matrix() - linalg::real_diagonal(&[0.5, 0.5]))) < 1e-14);
    }

    #[test]
    fn trivial_measurement_gives_zero() {
        let whole = LudersMeasurement::new(vec![identity(3)]).unwrap();
        let rho = random_density(3, 3, 4).unwrap();
        for a in [0.5, 1.5, 2.0] {
            assert_abs_diff_eq!(whole.n(&rho, alpha(a)).unwrap(), 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(luders_c(&rho, &whole, alpha(a)).unwrap(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(luders_c_tilde(&rho, &whole, alpha(a)).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rank_one_reduces_to_basis_measures() {
        for seed in 0..5 {
            let rho = random_density(3, 3, seed).unwrap();
            let basis = random_unitary(3, 100 + seed);
            let l = LudersMeasurement::from_basis(&basis).unwrap();
            for a in [0.5, 1.5, 2.0] {
                assert_abs_diff_eq!(
                    luders_c(&rho, &l, alpha(a)).unwrap(),
                    c_alpha(&rho, &basis, alpha(a)).unwrap(),
                    epsilon = 1e-12
                );
                assert_abs_diff_eq!(
                    luders_c_tilde(&rho, &l, alpha(a)).unwrap(),
                    c_tilde_alpha(&rho, &basis, alpha(a)).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn block_diagonal_state_is_its_own_optimum() {
        let l = LudersMeasurement::from_block_sizes(&[2, 1]).unwrap();
        let mut rng = crate::rng::from_seed(3);
        let delta = l.random_incoherent(&mut rng);
        assert!(l.is_incoherent(&delta, 1e-12).unwrap());
        for a in [0.5, 2.0] {
            assert_abs_diff_eq!(luders_c(&delta, &l, alpha(a)).unwrap(), 0.0, epsilon = 1e-10);
            let opt = luders_optimal_incoherent(&delta, &l, alpha(a)).unwrap();
            assert!(frobenius_norm(&(opt.matrix() - delta.matrix())) < 1e-10);
        }
    }

    #[test]
    fn optimal_incoherent_attains_measure() {
        let l = LudersMeasurement::from_block_sizes(&[2, 2]).unwrap();
        for seed in 0..5 {
            let rho = random_density(4, 4, seed).unwrap();
            for a in [0.5, 1.5, 2.0] {
                let delta = luders_optimal_incoherent(&rho, &l, alpha(a)).unwrap();
                assert!(l.is_incoherent(&delta, 1e-10).unwrap());
                assert_abs_diff_eq!(linalg::trace(delta.matrix()).re, 1.0, epsilon = 1e-12);
                let d = tsallis_relative(&rho, &delta, alpha(a)).unwrap().to_f64();
                assert_abs_diff_eq!(d, luders_c(&rho, &l, alpha(a)).unwrap(), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn invalid_measurements() {
        let half = identity(2) * C64::new(0.5, 0.0);
        assert!(LudersMeasurement::new(vec![half.clone(), half]).is_err());
        let p0 = linalg::real_diagonal(&[1.0, 0.0]);
        assert!(LudersMeasurement::new(vec![p0.clone()]).is_err());
        assert!(LudersMeasurement::new(vec![p0.clone(), p0.clone()]).is_err());
        assert!(LudersMeasurement::new(vec![]).is_err());
        let l = LudersMeasurement::from_basis(&identity(2)).unwrap();
        let rho = random_density(3, 3, 0).unwrap();
        assert!(matches!(luders_c(&rho, &l, alpha(2.0)), Err(Error::InvalidMeasurement(_))));
    }

    #[test]
    fn relabeling_projectors_changes_nothing() {
        let l = LudersMeasurement::from_block_sizes(&[1, 2, 1]).unwrap();
        let mut reversed = l.projectors().to_vec();
        reversed.reverse();
        let r = LudersMeasurement::new(reversed).unwrap();
        let rho = random_density(4, 3, 9).unwrap();
        let a = luders_c(&rho, &l, alpha(1.5)).unwrap();
        let b = luders_c(&rho, &r, alpha(1.5)).unwrap();
        assert_eq!(a, b);
    }
}
