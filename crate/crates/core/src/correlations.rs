//! Discordlike correlation measures `Q_alpha` and `Q~_alpha`.
//!
//! For a fixed orthonormal basis `{|i>}` of subsystem A, the minimum of the
//! Tsallis divergence over classical-quantum states diagonal in that basis is
//! attained at `Y_i = X_i / N` where
//!
//! ```text
//! X_i = <i|rho^alpha|i>^(1/alpha),   N = sum_i Tr X_i,
//! ```
//!
//! giving `(N^alpha - 1) / (alpha - 1)`; the modified divergence gives
//! `(N - 1) / (alpha - 1)`. The measures minimise these over the basis.

use serde::Serialize;

use crate::entropies::{tsallis_entanglement_pure, AlphaParam};
use crate::error::{Error, Result};
use crate::linalg::{
    self, clipped_power, hermitize_in_place, partial_block, require_unitary, CMatrix, C64,
    DEFAULT_EIG_CLIP,
};
use crate::optimizer::{minimize_over_unitaries, OptimizerOptions};
use crate::states::{cq_state, schmidt, BipartiteState, ClassicalQuantumState};

/// Bases further than this from unitarity (Frobenius) are rejected.
pub const UNITARY_TOL: f64 = 1e-8;

/// The per-basis quantity `N` together with the operators `X_i`.
#[derive(Debug, Clone)]
pub struct NValue {
    pub n: f64,
    pub blocks_x: Vec<CMatrix>,
}

impl NValue {
    /// `(n - 1)(alpha - 1)`; nonnegative up to rounding for every basis.
    pub fn sign_margin(&self, alpha: AlphaParam) -> f64 {
        (self.n - 1.0) * (alpha.get() - 1.0)
    }
}

/// Outcome of a basis minimisation.
#[derive(Debug, Clone)]
pub struct MeasureResult {
    pub value: f64,
    /// Columns are the minimising basis vectors of subsystem A.
    pub basis: CMatrix,
    pub n: NValue,
    pub restarts_used: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Measure {
    /// `(N^alpha - 1) / (alpha - 1)`.
    Standard,
    /// `(N - 1) / (alpha - 1)`.
    Modified,
}

impl Measure {
    pub fn from_n(self, n: f64, alpha: AlphaParam) -> f64 {
        let a = alpha.get();
        match self {
            Measure::Standard => (n.powf(a) - 1.0) / (a - 1.0),
            Measure::Modified => (n - 1.0) / (a - 1.0),
        }
    }
}

/// `(1 + (alpha - 1) q_tilde)^alpha - 1) / (alpha - 1)`: the standard measure
/// as a function of the modified one at the same basis.
pub fn standard_from_modified(q_tilde: f64, alpha: AlphaParam) -> f64 {
    let a = alpha.get();
    ((1.0 + (a - 1.0) * q_tilde).powf(a) - 1.0) / (a - 1.0)
}

/// `rho^alpha` cut into its `d_a x d_a` grid of `d_b x d_b` blocks, ready for
/// repeated evaluation of `N` in different bases.
#[derive(Debug, Clone)]
pub struct PoweredBlocks {
    d_a: usize,
    d_b: usize,
    alpha: AlphaParam,
    blocks: Vec<CMatrix>,
}

impl PoweredBlocks {
    pub fn new(rho: &BipartiteState, alpha: AlphaParam) -> Result<Self> {
        let powered = linalg::mat_pow(rho.matrix(), alpha.get(), DEFAULT_EIG_CLIP)?;
        let (d_a, d_b) = (rho.d_a(), rho.d_b());
        let mut blocks = Vec::with_capacity(d_a * d_a);
        for i in 0..d_a {
            for j in 0..d_a {
                blocks.push(partial_block(&powered, d_a, d_b, i, j)?);
            }
        }
        Ok(Self {
            d_a,
            d_b,
            alpha,
            blocks,
        })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    fn check_basis(&self, basis: &CMatrix) -> Result<()> {
        if basis.nrows() != self.d_a || basis.ncols() != self.d_a {
            return Err(Error::DimensionMismatch(format!(
                "basis is {}x{} but d_a = {}",
                basis.nrows(),
                basis.ncols(),
                self.d_a
            )));
        }
        require_unitary(basis, UNITARY_TOL)
    }

    /// `R = <u|rho^alpha|u>` for the column `col` of `basis`.
    fn diagonal_block(&self, basis: &CMatrix, col: usize) -> CMatrix {
        let mut r = CMatrix::zeros(self.d_b, self.d_b);
        for a in 0..self.d_a {
            let ua = basis[(a, col)].conj();
            for b in 0..self.d_a {
                let w: C64 = ua * basis[(b, col)];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                r += &self.blocks[a * self.d_a + b] * w;
            }
        }
        hermitize_in_place(&mut r);
        r
    }

    /// `Tr X_i` for each basis vector.
    fn traces_unchecked(&self, basis: &CMatrix) -> Vec<f64> {
        let inv = 1.0 / self.alpha.get();
        (0..self.d_a)
            .map(|i| {
                linalg::hermitian_eigenvalues(&self.diagonal_block(basis, i))
                    .into_iter()
                    .map(|l| clipped_power(l, inv, DEFAULT_EIG_CLIP))
                    .sum()
            })
            .collect()
    }

    /// `N` without the `X_i`; the basis is assumed unitary.
    pub fn n_unchecked(&self, basis: &CMatrix) -> f64 {
        self.traces_unchecked(basis).iter().sum()
    }

    pub fn n_value(&self, basis: &CMatrix) -> Result<NValue> {
        self.check_basis(basis)?;
        let inv = 1.0 / self.alpha.get();
        let mut blocks_x = Vec::with_capacity(self.d_a);
        let mut n = 0.0;
        for i in 0..self.d_a {
            let r = self.diagonal_block(basis, i);
            let eig = linalg::herm_eig(&r, linalg::DEFAULT_HERMITICITY_TOL)?;
            n += eig
                .eigenvalues
                .iter()
                .map(|&l| clipped_power(l, inv, DEFAULT_EIG_CLIP))
                .sum::<f64>();
            blocks_x.push(eig.map_spectrum(|l| clipped_power(l, inv, DEFAULT_EIG_CLIP)));
        }
        Ok(NValue { n, blocks_x })
    }
}

/// `N` and the `X_i` of `rho` in `basis`.
pub fn n_value(rho: &BipartiteState, basis: &CMatrix, alpha: AlphaParam) -> Result<NValue> {
    PoweredBlocks::new(rho, alpha)?.n_value(basis)
}

/// `(N^alpha - 1)/(alpha - 1)` in a fixed basis: the minimum of the divergence
/// over classical-quantum states diagonal in that basis.
pub fn q_alpha_fixed_basis(rho: &BipartiteState, basis: &CMatrix, alpha: AlphaParam) -> Result<f64> {
    let n = n_value(rho, basis, alpha)?;
    Ok(Measure::Standard.from_n(n.n, alpha))
}

/// `(N - 1)/(alpha - 1)` in a fixed basis.
pub fn q_tilde_alpha_fixed_basis(rho: &BipartiteState, basis: &CMatrix, alpha: AlphaParam) -> Result<f64> {
    let n = n_value(rho, basis, alpha)?;
    Ok(Measure::Modified.from_n(n.n, alpha))
}

/// The minimiser `chi = sum_i |i><i| ⊗ X_i / N` in `basis`.
pub fn optimal_cq(rho: &BipartiteState, basis: &CMatrix, alpha: AlphaParam) -> Result<ClassicalQuantumState> {
    let n = n_value(rho, basis, alpha)?;
    let scale = C64::new(1.0 / n.n, 0.0);
    let blocks = n.blocks_x.iter().map(|x| x * scale).collect();
    cq_state(basis.clone(), blocks)
}

/// Canonical representative of a basis: columns ordered by `Tr X_i`
/// descending (stable), each column's largest-magnitude entry made real
/// positive.
pub fn fix_gauge(basis: &CMatrix, traces: &[f64]) -> CMatrix {
    let d = basis.ncols();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| traces[b].total_cmp(&traces[a]));
    let mut out = CMatrix::zeros(basis.nrows(), d);
    for (dst, &src) in order.iter().enumerate() {
        let col = basis.column(src);
        let mut pivot = 0;
        for r in 1..col.len() {
            if col[r].norm() > col[pivot].norm() * (1.0 + 1e-12) {
                pivot = r;
            }
        }
        let p = col[pivot];
        let phase = if p.norm() > 0.0 { p.conj() / p.norm() } else { C64::new(1.0, 0.0) };
        for r in 0..col.len() {
            out[(r, dst)] = col[r] * phase;
        }
    }
    out
}

/// Minimise `measure` over bases of subsystem A.
pub fn minimize_measure(
    rho: &BipartiteState,
    alpha: AlphaParam,
    measure: Measure,
    opts: &OptimizerOptions,
) -> Result<MeasureResult> {
    let prepared = PoweredBlocks::new(rho, alpha)?;
    let objective = |u: &CMatrix| measure.from_n(prepared.n_unchecked(u), alpha);
    let found = minimize_over_unitaries(&objective, rho.d_a(), opts)?;
    let traces = prepared.traces_unchecked(&found.basis);
    let basis = fix_gauge(&found.basis, &traces);
    let n = prepared.n_value(&basis)?;
    let value = measure.from_n(n.n, alpha);
    if !found.converged() {
        log::debug!("basis search did not converge; best value {value}");
    }
    Ok(MeasureResult {
        value,
        basis,
        n,
        restarts_used: found.restarts_used(),
        converged: found.converged(),
    })
}

/// `Q_alpha(rho)`.
pub fn q_alpha(rho: &BipartiteState, alpha: AlphaParam, opts: &OptimizerOptions) -> Result<MeasureResult> {
    minimize_measure(rho, alpha, Measure::Standard, opts)
}

/// `Q~_alpha(rho)`.
pub fn q_tilde_alpha(rho: &BipartiteState, alpha: AlphaParam, opts: &OptimizerOptions) -> Result<MeasureResult> {
    minimize_measure(rho, alpha, Measure::Modified, opts)
}

/// `Q~_alpha` of a pure state from its Schmidt coefficients.
pub fn pure_q_tilde(psi: &BipartiteState, alpha: AlphaParam) -> Result<f64> {
    Ok(tsallis_entanglement_pure(&schmidt(psi)?, alpha))
}

fn check_family(d: usize, x: f64, lo: f64, hi: f64, family: &str) -> Result<()> {
    if d < 2 || !(lo..=hi).contains(&x) {
        return Err(Error::ParamOutOfRange(format!(
            "{family}: need d >= 2 and x in [{lo}, {hi}], got d = {d}, x = {x}"
        )));
    }
    Ok(())
}

/// Closed-form `N` of the `d ⊗ d` Werner state (any basis).
pub fn werner_n(d: usize, x: f64, alpha: AlphaParam) -> Result<f64> {
    check_family(d, x, -1.0, 1.0, "werner")?;
    let (df, a) = (d as f64, alpha.get());
    let sym = (1.0 + x) / (df + 1.0);
    let anti = (1.0 - x) / (df - 1.0);
    let mean = 0.5 * sym.powf(a) + 0.5 * anti.powf(a);
    Ok(sym + (df - 1.0) * mean.powf(1.0 / a))
}

/// Closed-form `N` of the `d ⊗ d` isotropic state (any basis).
///
/// With `c = (1 - x)/(d^2 - 1)` the weight off `|Phi>`, each block
/// `<i|rho^alpha|i>` has eigenvalue `c^alpha` (multiplicity `d - 1`) and
/// `((d - 1) c^alpha + x^alpha)/d` on `|i>`, so
/// `N = d (1 - x)/(d + 1) + d^(1 - 1/alpha) ((d - 1) c^alpha + x^alpha)^(1/alpha)`.
pub fn isotropic_n(d: usize, x: f64, alpha: AlphaParam) -> Result<f64> {
    check_family(d, x, 0.0, 1.0, "isotropic")?;
    let (df, a) = (d as f64, alpha.get());
    let c = (1.0 - x) / (df * df - 1.0);
    let tail = (df - 1.0) * c.powf(a) + x.powf(a);
    Ok(df * (1.0 - x) / (df + 1.0) + df.powf(1.0 - 1.0 / a) * tail.powf(1.0 / a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropies::tsallis_relative;
    use crate::linalg::{frobenius_norm, identity};
    use crate::states::{isotropic, random_unitary, werner, DensityMatrix};
    use approx::assert_abs_diff_eq;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    #[test]
    fn maximally_mixed_has_unit_n() {
        let mm = BipartiteState::new(DensityMatrix::maximally_mixed(6), 2, 3).unwrap();
        for a in [0.5, 1.5, 2.0] {
            for seed in 0..3 {
                let n = n_value(&mm, &random_unitary(2, seed), alpha(a)).unwrap();
                assert_abs_diff_eq!(n.n, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn werner_qubit_fixed_basis() {
        // N = (2 + sqrt 2)/3 from the projector decomposition of (I + V)/6
        let w = werner(2, 1.0).unwrap();
        let n = n_value(&w, &identity(2), alpha(2.0)).unwrap();
        let expected = (2.0 + 2f64.sqrt()) / 3.0;
        assert_abs_diff_eq!(n.n, expected, epsilon = 1e-12);
        let q = q_alpha_fixed_basis(&w, &identity(2), alpha(2.0)).unwrap();
        assert_abs_diff_eq!(q, expected * expected - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q, 0.29521, epsilon = 1e-5);
        let total: f64 = n.blocks_x.iter().map(|x| linalg::trace(x).re).sum();
        assert_abs_diff_eq!(total, n.n, epsilon = 1e-12);
    }

    #[test]
    fn werner_closed_form_values() {
        assert_abs_diff_eq!(
            werner_n(2, 1.0, alpha(2.0)).unwrap(),
            (2.0 + 2f64.sqrt()) / 3.0,
            epsilon = 1e-15
        );
        for d in 2..=5 {
            for a in [0.3, 0.5, 1.5, 2.0] {
                assert_abs_diff_eq!(werner_n(d, 1.0 / d as f64, alpha(a)).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
        assert!(werner_n(2, 1.1, alpha(2.0)).is_err());
        assert!(isotropic_n(1, 0.5, alpha(2.0)).is_err());
    }

    #[test]
    fn isotropic_closed_form_zero_point_and_bell() {
        for d in 2..=4 {
            let df = d as f64;
            for a in [0.5, 1.5, 2.0] {
                assert_abs_diff_eq!(isotropic_n(d, 1.0 / (df * df), alpha(a)).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
        // Bell state, alpha = 2: numerical value of n_value, frozen
        let bell = isotropic(2, 1.0).unwrap();
        let numeric = n_value(&bell, &identity(2), alpha(2.0)).unwrap().n;
        assert_abs_diff_eq!(numeric, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(isotropic_n(2, 1.0, alpha(2.0)).unwrap(), numeric, epsilon = 1e-12);
    }

    #[test]
    fn cq_state_in_own_basis() {
        let basis = random_unitary(2, 4);
        let s0 = crate::states::random_density(3, 3, 1).unwrap();
        let s1 = crate::states::random_density(3, 2, 2).unwrap();
        let chi = cq_state(
            basis.clone(),
            vec![s0.matrix() * C64::new(0.3, 0.0), s1.matrix() * C64::new(0.7, 0.0)],
        )
        .unwrap();
        let rho = chi.materialize().unwrap();
        for a in [0.5, 1.5, 2.0] {
            let n = n_value(&rho, &basis, alpha(a)).unwrap();
            assert_abs_diff_eq!(n.n, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(q_alpha_fixed_basis(&rho, &basis, alpha(a)).unwrap(), 0.0, epsilon = 1e-10);
            let opt = optimal_cq(&rho, &basis, alpha(a)).unwrap();
            assert!(frobenius_norm(&(opt.to_matrix() - rho.matrix())) < 1e-10);
        }
    }

    #[test]
    fn optimal_cq_attains_fixed_basis_value() {
        let w = werner(2, 1.0).unwrap();
        let chi = optimal_cq(&w, &identity(2), alpha(2.0)).unwrap();
        let chi_state = DensityMatrix::new(chi.to_matrix()).unwrap();
        let d = tsallis_relative(w.state(), &chi_state, alpha(2.0)).unwrap().to_f64();
        let q = q_alpha_fixed_basis(&w, &identity(2), alpha(2.0)).unwrap();
        assert_abs_diff_eq!(d, q, epsilon = 1e-9);
        let total: f64 = chi.blocks().iter().map(|y| linalg::trace(y).re).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bad_basis_is_rejected() {
        let w = werner(2, 0.2).unwrap();
        let not_unitary = identity(2) * C64::new(1.1, 0.0);
        assert!(matches!(
            n_value(&w, &not_unitary, alpha(2.0)),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            n_value(&w, &identity(3), alpha(2.0)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn gauge_fix_is_idempotent_and_value_preserving() {
        let rho = BipartiteState::new(crate::states::random_density(4, 4, 3).unwrap(), 2, 2).unwrap();
        let prepared = PoweredBlocks::new(&rho, alpha(1.5)).unwrap();
        let u = random_unitary(2, 8);
        let fixed = fix_gauge(&u, &prepared.traces_unchecked(&u));
        assert_abs_diff_eq!(prepared.n_unchecked(&u), prepared.n_unchecked(&fixed), epsilon = 1e-12);
        let again = fix_gauge(&fixed, &prepared.traces_unchecked(&fixed));
        assert!(frobenius_norm(&(again - &fixed)) < 1e-12);
    }

    #[test]
    fn pure_state_reduction() {
        let bell = isotropic(2, 1.0).unwrap();
        assert_abs_diff_eq!(pure_q_tilde(&bell, alpha(2.0)).unwrap(), 2f64.sqrt() - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pure_q_tilde(&bell, alpha(0.5)).unwrap(), 1.0, epsilon = 1e-12);
        let product = BipartiteState::new(
            DensityMatrix::new(linalg::real_diagonal(&[0.0, 1.0, 0.0, 0.0])).unwrap(),
            2,
            2,
        )
        .unwrap();
        assert_eq!(pure_q_tilde(&product, alpha(2.0)).unwrap(), 0.0);
        assert!(matches!(
            pure_q_tilde(&werner(2, 0.0).unwrap(), alpha(2.0)),
            Err(Error::NotPure { .. })
        ));
    }

    #[test]
    fn functional_relation_is_exact_for_any_n() {
        for a in [0.3, 0.5, 1.5, 2.0] {
            for n in [0.7, 1.0, 1.3] {
                let q = Measure::Standard.from_n(n, alpha(a));
                let qt = Measure::Modified.from_n(n, alpha(a));
                assert_abs_diff_eq!(standard_from_modified(qt, alpha(a)), q, epsilon = 1e-13);
            }
        }
    }
}
