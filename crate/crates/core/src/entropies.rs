//! Tsallis divergences and related scalar kernels. Natural logarithms
//! throughout.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, clipped_power, CMatrix, DEFAULT_EIG_CLIP, DEFAULT_HERMITICITY_TOL};
use crate::states::DensityMatrix;

/// Mass of `rho` outside `supp(sigma)` beyond this counts as a support violation.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Order parameter, restricted to `(0, 1) ∪ (1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) || alpha == 1.0 {
            return Err(Error::ParamOutOfRange(format!(
                "alpha = {alpha} must lie in (0, 1) or (1, 2]"
            )));
        }
        if alpha < 0.5 {
            log::warn!("alpha = {alpha} is below 1/2, outside the range where the quantum divergence is usually defined");
        }
        Ok(Self(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn above_one(self) -> bool {
        self.0 > 1.0
    }
}

impl fmt::Display for AlphaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A divergence value: finite, or `+∞` when the support condition fails.
///
/// `Infinite` compares greater than every finite value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    /// `f64::INFINITY` for the infinite value.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(f(v)),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => v.fmt(f),
            ExtendedReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => serializer.serialize_f64(*v),
            ExtendedReal::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// Nonnegative entries summing to one within `1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ParamOutOfRange("empty probability vector".into()));
        }
        if let Some(bad) = entries.iter().find(|&&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::ParamOutOfRange(format!("negative or non-finite probability {bad}")));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { trace: total });
        }
        Ok(Self(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `log_alpha(xi) = (xi^(1-alpha) - 1) / (1 - alpha)`.
pub fn alpha_log(xi: f64, alpha: AlphaParam) -> Result<f64> {
    if xi.is_nan() || xi <= 0.0 {
        return Err(Error::Domain(format!("alpha-logarithm of {xi}")));
    }
    let a = alpha.get();
    Ok((xi.powf(1.0 - a) - 1.0) / (1.0 - a))
}

/// Classical Tsallis relative entropy `(sum p^a q^(1-a) - 1) / (a - 1)`.
pub fn tsallis_classical(
    p: &ProbabilityVector,
    q: &ProbabilityVector,
    alpha: AlphaParam,
) -> Result<ExtendedReal> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    let a = alpha.get();
    let mut sum = 0.0;
    for (&pj, &qj) in p.as_slice().iter().zip(q.as_slice()) {
        if pj == 0.0 {
            continue;
        }
        if qj == 0.0 {
            if alpha.above_one() {
                return Ok(ExtendedReal::Infinite);
            }
            continue;
        }
        sum += pj.powf(a) * qj.powf(1.0 - a);
    }
    Ok(ExtendedReal::Finite((sum - 1.0) / (a - 1.0)))
}

fn same_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// `Tr(rho^a sigma^(1-a))` on matrices; `+∞` when `a > 1` and `rho` has weight
/// outside `supp(sigma)`.
pub(crate) fn f_alpha_matrices(rho: &CMatrix, sigma: &CMatrix, alpha: f64) -> Result<ExtendedReal> {
    let sigma_eig = linalg::herm_eig(sigma, DEFAULT_HERMITICITY_TOL)?;
    if alpha > 1.0 {
        let support = sigma_eig.map_spectrum(|l| if l > DEFAULT_EIG_CLIP { 1.0 } else { 0.0 });
        let inside = linalg::trace_of_product(&support, rho).re;
        if inside < linalg::trace(rho).re - SUPPORT_TOL {
            return Ok(ExtendedReal::Infinite);
        }
    }
    let rho_pow = linalg::mat_pow(rho, alpha, DEFAULT_EIG_CLIP)?;
    let sigma_pow = sigma_eig.map_spectrum(|l| clipped_power(l, 1.0 - alpha, DEFAULT_EIG_CLIP));
    Ok(ExtendedReal::Finite(linalg::trace_of_product(&rho_pow, &sigma_pow).re))
}

/// `f_alpha(rho, sigma) = Tr(rho^alpha sigma^(1 - alpha))`.
pub fn f_alpha(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: AlphaParam) -> Result<ExtendedReal> {
    same_dims(rho, sigma)?;
    f_alpha_matrices(rho.matrix(), sigma.matrix(), alpha.get())
}

/// Quantum Tsallis relative entropy `(f_alpha - 1) / (alpha - 1)`.
pub fn tsallis_relative(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: AlphaParam,
) -> Result<ExtendedReal> {
    let a = alpha.get();
    Ok(f_alpha(rho, sigma, alpha)?.map(|f| (f - 1.0) / (a - 1.0)))
}

/// Modified Tsallis relative entropy `(f_alpha^(1/alpha) - 1) / (alpha - 1)`.
pub fn tsallis_relative_modified(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: AlphaParam,
) -> Result<ExtendedReal> {
    let a = alpha.get();
    Ok(f_alpha(rho, sigma, alpha)?.map(|f| (f.max(0.0).powf(1.0 / a) - 1.0) / (a - 1.0)))
}

/// Umegaki relative entropy `Tr(rho log rho - rho log sigma)`.
pub fn von_neumann_relative(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ExtendedReal> {
    same_dims(rho, sigma)?;
    let sigma_eig = linalg::herm_eig(sigma.matrix(), DEFAULT_HERMITICITY_TOL)?;
    let support = sigma_eig.map_spectrum(|l| if l > DEFAULT_EIG_CLIP { 1.0 } else { 0.0 });
    let inside = linalg::trace_of_product(&support, rho.matrix()).re;
    if inside < 1.0 - SUPPORT_TOL {
        return Ok(ExtendedReal::Infinite);
    }
    let neg_entropy: f64 = rho
        .eigenvalues()
        .into_iter()
        .filter(|&l| l > DEFAULT_EIG_CLIP)
        .map(|l| l * l.ln())
        .sum();
    let log_sigma = sigma_eig.map_spectrum(|l| if l > DEFAULT_EIG_CLIP { l.ln() } else { 0.0 });
    let cross = linalg::trace_of_product(rho.matrix(), &log_sigma).re;
    Ok(ExtendedReal::Finite(neg_entropy - cross))
}

/// `(sum_j lambda_j^(1/alpha) - 1) / (alpha - 1)` for Schmidt coefficients
/// `lambda`: the modified correlation measure of a pure state.
pub fn tsallis_entanglement_pure(lambda: &ProbabilityVector, alpha: AlphaParam) -> f64 {
    let a = alpha.get();
    let sum: f64 = lambda
        .as_slice()
        .iter()
        .map(|&l| if l > 0.0 { l.powf(1.0 / a) } else { 0.0 })
        .sum();
    (sum - 1.0) / (a - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_diagonal;
    use approx::assert_abs_diff_eq;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    fn diag_state(v: &[f64]) -> DensityMatrix {
        DensityMatrix::new(real_diagonal(v)).unwrap()
    }

    #[test]
    fn alpha_range() {
        for bad in [0.0, -0.5, 1.0, 2.0001, f64::NAN] {
            assert!(AlphaParam::new(bad).is_err(), "{bad}");
        }
        for good in [0.1, 0.5, 0.9999, 1.0001, 2.0] {
            assert!(AlphaParam::new(good).is_ok());
        }
    }

    #[test]
    fn extended_real_ordering() {
        assert!(ExtendedReal::Infinite > ExtendedReal::Finite(f64::MAX));
        assert!(ExtendedReal::Finite(1.0) < ExtendedReal::Finite(2.0));
        assert_eq!(ExtendedReal::Infinite.to_string(), "inf");
    }

    #[test]
    fn alpha_log_values() {
        assert_eq!(alpha_log(1.0, alpha(0.3)).unwrap(), 0.0);
        assert_eq!(alpha_log(1.0, alpha(1.7)).unwrap(), 0.0);
        assert_abs_diff_eq!(alpha_log(4.0, alpha(0.5)).unwrap(), 2.0, epsilon = 1e-15);
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(alpha_log(e, alpha(1.0 + 1e-4)).unwrap(), 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(alpha_log(e, alpha(1.0 - 1e-4)).unwrap(), 1.0, epsilon = 1e-3);
        assert!(matches!(alpha_log(0.0, alpha(0.5)), Err(Error::Domain(_))));
        assert!(matches!(alpha_log(-1.0, alpha(0.5)), Err(Error::Domain(_))));
    }

    #[test]
    fn alpha_log_is_concave() {
        let a = alpha(0.6);
        for &(x, y) in &[(0.1, 3.0), (0.5, 0.7), (1.0, 10.0)] {
            let mid = alpha_log(0.5 * (x + y), a).unwrap();
            let chord = 0.5 * (alpha_log(x, a).unwrap() + alpha_log(y, a).unwrap());
            assert!(mid > chord);
        }
    }

    #[test]
    fn classical_divergence() {
        let p = pv(&[0.2, 0.3, 0.5]);
        assert_eq!(tsallis_classical(&p, &p, alpha(1.5)).unwrap(), ExtendedReal::Finite(0.0));
        let v = tsallis_classical(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5]), alpha(2.0)).unwrap();
        assert_abs_diff_eq!(v.to_f64(), 1.0, epsilon = 1e-15);
        let v = tsallis_classical(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0]), alpha(2.0)).unwrap();
        assert_eq!(v, ExtendedReal::Infinite);
        assert!(matches!(
            tsallis_classical(&pv(&[1.0]), &pv(&[0.5, 0.5]), alpha(2.0)),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn f_alpha_examples() {
        let rho = diag_state(&[1.0, 0.0]);
        let mixed = diag_state(&[0.5, 0.5]);
        assert_abs_diff_eq!(f_alpha(&mixed, &mixed, alpha(1.3)).unwrap().to_f64(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f_alpha(&rho, &mixed, alpha(2.0)).unwrap().to_f64(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(tsallis_relative(&rho, &mixed, alpha(2.0)).unwrap().to_f64(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            tsallis_relative_modified(&rho, &mixed, alpha(2.0)).unwrap().to_f64(),
            std::f64::consts::SQRT_2 - 1.0,
            epsilon = 1e-14
        );
        assert_eq!(tsallis_relative(&mixed, &rho, alpha(1.5)).unwrap(), ExtendedReal::Infinite);
        assert!(tsallis_relative(&mixed, &rho, alpha(0.5)).unwrap().is_finite());
        assert!(matches!(
            f_alpha(&rho, &DensityMatrix::maximally_mixed(3), alpha(2.0)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn diagonal_reduction() {
        let p = [0.1, 0.6, 0.3];
        let q = [0.4, 0.4, 0.2];
        for a in [0.3, 0.5, 0.8, 1.5, 2.0] {
            let quantum = tsallis_relative(&diag_state(&p), &diag_state(&q), alpha(a)).unwrap();
            let classical = tsallis_classical(&pv(&p), &pv(&q), alpha(a)).unwrap();
            assert_abs_diff_eq!(quantum.to_f64(), classical.to_f64(), epsilon = 1e-10);
            let f = f_alpha(&diag_state(&p), &diag_state(&q), alpha(a)).unwrap().to_f64();
            assert_abs_diff_eq!(f, 1.0 + (a - 1.0) * classical.to_f64(), epsilon = 1e-12);
        }
        let kl: f64 = p.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum();
        let s = von_neumann_relative(&diag_state(&p), &diag_state(&q)).unwrap();
        assert_abs_diff_eq!(s.to_f64(), kl, epsilon = 1e-12);
    }

    #[test]
    fn von_neumann_examples() {
        let mixed = diag_state(&[0.5, 0.5]);
        assert_abs_diff_eq!(von_neumann_relative(&mixed, &mixed).unwrap().to_f64(), 0.0, epsilon = 1e-15);
        let rho = diag_state(&[1.0, 0.0]);
        assert_abs_diff_eq!(
            von_neumann_relative(&rho, &mixed).unwrap().to_f64(),
            std::f64::consts::LN_2,
            epsilon = 1e-14
        );
        assert_eq!(von_neumann_relative(&mixed, &rho).unwrap(), ExtendedReal::Infinite);
    }

    #[test]
    fn pure_entanglement_values() {
        assert_eq!(tsallis_entanglement_pure(&pv(&[1.0, 0.0]), alpha(2.0)), 0.0);
        assert_abs_diff_eq!(
            tsallis_entanglement_pure(&pv(&[0.5, 0.5]), alpha(2.0)),
            std::f64::consts::SQRT_2 - 1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(tsallis_entanglement_pure(&pv(&[0.5, 0.5]), alpha(0.5)), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
    }
}
