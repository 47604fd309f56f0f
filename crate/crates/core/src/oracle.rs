//! Brute-force checks of the analytic optima on small instances.
//!
//! Each check returns an [`OracleReport`] whose `worst_violation` is compared
//! against a declared `tolerance`. Trials draw from independent seeded
//! streams and are reduced in index order, so a report is a pure function of
//! its inputs and seed.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coherence::{c_alpha, luders_c, luders_c_tilde, luders_optimal_incoherent, LudersMeasurement};
use crate::correlations::{
    isotropic_n, n_value, optimal_cq, q_alpha, q_alpha_fixed_basis, standard_from_modified, werner_n,
    Measure, PoweredBlocks,
};
use crate::entropies::{tsallis_relative, tsallis_relative_modified, von_neumann_relative, AlphaParam, ExtendedReal};
use crate::error::Result;
use crate::linalg::{frobenius_norm, identity, kron, CMatrix, C64};
use crate::optimizer::{nelder_mead, NelderMeadOptions, OptimizerOptions};
use crate::par;
use crate::rng;
use crate::states::{
    cq_state, is_cq_in_basis, isotropic, random_channel_with, random_density_with, random_pure,
    random_unitary_with, werner, BipartiteState, DensityMatrix,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub trials: usize,
    pub worst_violation: f64,
    pub passed: bool,
    pub seed: u64,
    pub tolerance: f64,
    /// Auxiliary figures (convergence constants, documented deviations).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, trials: usize, worst_violation: f64, tolerance: f64, seed: u64) -> Self {
        Self {
            name: name.into(),
            trials,
            worst_violation,
            passed: worst_violation <= tolerance,
            seed,
            tolerance,
            details: BTreeMap::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Max over `values`; NaN counts as an infinite violation.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .map(|v| if v.is_nan() { f64::INFINITY } else { v })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn divergence(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: AlphaParam) -> Result<f64> {
    Ok(tsallis_relative(rho, sigma, alpha)?.to_f64())
}

/// Random classical-quantum state: Haar basis, Ginibre blocks, uniform
/// Dirichlet weights.
fn sample_cq(d_a: usize, d_b: usize, seed: u64, index: u64) -> Result<DensityMatrix> {
    let mut rng = rng::stream(seed, index);
    let basis = random_unitary_with(d_a, &mut rng);
    let weights = rng::dirichlet_uniform(d_a, &mut rng);
    let blocks = weights
        .iter()
        .map(|&w| random_density_with(d_b, d_b, &mut rng).matrix() * C64::new(w, 0.0))
        .collect();
    DensityMatrix::new(cq_state(basis, blocks)?.to_matrix())
}

/// Samples `trials` classical-quantum states and checks that none has a
/// smaller divergence from `rho` than the optimised `Q_alpha`; also checks
/// that the analytic optimal state attains it.
pub fn cq_dominance_check(
    rho: &BipartiteState,
    alpha: AlphaParam,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<OracleReport> {
    let q = q_alpha(rho, alpha, &OptimizerOptions::with_seed(seed))?;
    let margins = par::map_indexed(trials, true, |t| -> Result<f64> {
        let chi = sample_cq(rho.d_a(), rho.d_b(), seed, t as u64)?;
        Ok(q.value - divergence(rho.state(), &chi, alpha)?)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let optimum = DensityMatrix::new(optimal_cq(rho, &q.basis, alpha)?.to_matrix())?;
    let equality_gap = (divergence(rho.state(), &optimum, alpha)? - q.value).abs();
    let sampled = worst(margins);
    Ok(OracleReport::new("cq_dominance", trials, sampled.max(equality_gap), tol, seed)
        .with_detail("q_alpha", q.value)
        .with_detail("equality_gap", equality_gap)
        .with_detail("max_sampled_margin", sampled))
}

/// Lower-triangular factor `G` from `d^2` reals: the diagonal, then real and
/// imaginary parts of the strictly lower entries.
fn lower_factor(d: usize, params: &[f64]) -> CMatrix {
    let mut g = CMatrix::zeros(d, d);
    for k in 0..d {
        g[(k, k)] = C64::new(params[k], 0.0);
    }
    let mut idx = d;
    for r in 0..d {
        for c in 0..r {
            g[(r, c)] = C64::new(params[idx], params[idx + 1]);
            idx += 2;
        }
    }
    g
}

/// Blocks `Y_i = G_i G_i† / sum_j Tr(G_j G_j†)`.
fn blocks_from_params(d_a: usize, d_b: usize, params: &[f64]) -> Option<Vec<CMatrix>> {
    let per = d_b * d_b;
    let raw: Vec<CMatrix> = (0..d_a)
        .map(|i| {
            let g = lower_factor(d_b, &params[i * per..(i + 1) * per]);
            &g * g.adjoint()
        })
        .collect();
    let total: f64 = raw.iter().map(|y| crate::linalg::trace(y).re).sum();
    if total <= 0.0 || !total.is_finite() {
        return None;
    }
    Some(raw.into_iter().map(|y| y / C64::new(total, 0.0)).collect())
}

fn cq_matrix(basis: &CMatrix, blocks: &[CMatrix]) -> CMatrix {
    let d_b = blocks[0].nrows();
    let mut out = CMatrix::zeros(basis.nrows() * d_b, basis.nrows() * d_b);
    for (i, y) in blocks.iter().enumerate() {
        let ket = basis.column(i).into_owned();
        out += kron(&crate::linalg::outer(&ket), y);
    }
    crate::linalg::hermitize_in_place(&mut out);
    out
}

/// Minimises `D_alpha(rho || sum_i |i><i| ⊗ Y_i)` over the blocks directly
/// (Cholesky-parameterised, Nelder–Mead) and compares with the closed form.
///
/// `worst_violation = max(|value gap|, block_distance^2)`, so the report
/// passes iff the value agrees within `tol` and the optimal blocks agree with
/// `X_i / N` within `sqrt(tol)` in Frobenius norm.
pub fn fixed_basis_block_opt(
    rho: &BipartiteState,
    basis: &CMatrix,
    alpha: AlphaParam,
    tol: f64,
) -> Result<OracleReport> {
    let (d_a, d_b) = (rho.d_a(), rho.d_b());
    let analytic = q_alpha_fixed_basis(rho, basis, alpha)?;
    let target = optimal_cq(rho, basis, alpha)?;

    let objective = |params: &[f64]| -> f64 {
        let Some(blocks) = blocks_from_params(d_a, d_b, params) else {
            return f64::INFINITY;
        };
        let chi = cq_matrix(basis, &blocks);
        match crate::entropies::f_alpha_matrices(rho.matrix(), &chi, alpha.get()) {
            Ok(ExtendedReal::Finite(f)) => (f - 1.0) / (alpha.get() - 1.0),
            _ => f64::INFINITY,
        }
    };

    let per = d_b * d_b;
    let mut x = vec![0.0; d_a * per];
    for i in 0..d_a {
        for k in 0..d_b {
            x[i * per + k] = 1.0;
        }
    }
    let mut best = objective(&x);
    let mut step = 0.3;
    let mut cycles = 0;
    for _ in 0..40 {
        cycles += 1;
        let out = nelder_mead(
            &objective,
            &x,
            step,
            &NelderMeadOptions {
                max_iters: 20_000,
                f_tol: 1e-15,
                x_tol: 1e-9,
            },
        );
        let improvement = best - out.f;
        if out.f < best {
            best = out.f;
            x = out.x;
        }
        if cycles > 1 && improvement <= 1e-14 * (1.0 + best.abs()) {
            break;
        }
        step = (step * 0.5).max(1e-4);
    }

    let found = blocks_from_params(d_a, d_b, &x).unwrap_or_default();
    let block_distance = found
        .iter()
        .zip(target.blocks())
        .map(|(a, b)| frobenius_norm(&(a - b)).powi(2))
        .sum::<f64>()
        .sqrt();
    let gap = (best - analytic).abs();
    Ok(OracleReport::new("fixed_basis_block_opt", cycles, gap.max(block_distance.powi(2)), tol, 0)
        .with_detail("analytic", analytic)
        .with_detail("oracle", best)
        .with_detail("block_distance", block_distance))
}

/// Checks `D_{1±eps}(rho||sigma)` against the von Neumann relative entropy.
/// `worst_violation` is the larger deviation divided by `1 + S`, against a
/// tolerance of `1e-3`; `details.constant` is the deviation divided by `eps`.
pub fn limit_check_alpha_to_one(rho: &DensityMatrix, sigma: &DensityMatrix, eps: f64) -> Result<OracleReport> {
    let s = von_neumann_relative(rho, sigma)?.to_f64();
    let mut deviation: f64 = 0.0;
    for a in [1.0 - eps, 1.0 + eps] {
        let d = tsallis_relative(rho, sigma, AlphaParam::new(a)?)?.to_f64();
        deviation = deviation.max((d - s).abs());
    }
    Ok(OracleReport::new("alpha_to_one", 2, deviation / (1.0 + s), 1e-3, 0)
        .with_detail("von_neumann", s)
        .with_detail("constant", deviation / eps))
}

/// Isotropic-state `N` written with a free multiplicity `m` for the
/// complementary eigenvalue and without the `d^(1 - 1/alpha)` factor:
/// `d(1 - x)/(d^2 - 1) + ((m - 1) c^alpha + x^alpha)^(1/alpha)`. Only used to
/// measure how far that expression is from the validated closed form.
pub fn isotropic_n_free_multiplicity(d: usize, x: f64, alpha: AlphaParam, m: f64) -> f64 {
    let (df, a) = (d as f64, alpha.get());
    let c = (1.0 - x) / (df * df - 1.0);
    df * (1.0 - x) / (df * df - 1.0) + ((m - 1.0) * c.powf(a) + x.powf(a)).powf(1.0 / a)
}

/// Closed-form `N` for both families against the numerical `n_value`, in the
/// computational basis and a seeded random basis.
///
/// Werner states use `x_grid` as given; isotropic states use its affine image
/// `(x + 1)/2` in `[0, 1]`. The zero points `x = 1/d` and `x = 1/d^2` are
/// always included.
pub fn family_closed_form_regression(d_list: &[usize], x_grid: &[f64], alpha_list: &[f64]) -> Result<OracleReport> {
    const TOL: f64 = 1e-10;
    let mut werner_dev: f64 = 0.0;
    let mut iso_dev: f64 = 0.0;
    let mut dev_m_d: f64 = 0.0;
    let mut dev_m_d2: f64 = 0.0;
    let mut cases = 0;
    for &d in d_list {
        let df = d as f64;
        let mut w_points: Vec<f64> = x_grid.iter().map(|x| x.clamp(-1.0, 1.0)).collect();
        w_points.push(1.0 / df);
        let mut i_points: Vec<f64> = x_grid.iter().map(|x| ((x + 1.0) / 2.0).clamp(0.0, 1.0)).collect();
        i_points.push(1.0 / (df * df));
        for &a in alpha_list {
            let alpha = AlphaParam::new(a)?;
            let bases = [identity(d), random_unitary_with(d, &mut rng::stream(d as u64, a.to_bits()))];
            for &x in &w_points {
                let closed = werner_n(d, x, alpha)?;
                let prepared = PoweredBlocks::new(&werner(d, x)?, alpha)?;
                for basis in &bases {
                    werner_dev = werner_dev.max((prepared.n_value(basis)?.n - closed).abs());
                }
                cases += 1;
            }
            for &x in &i_points {
                let closed = isotropic_n(d, x, alpha)?;
                let prepared = PoweredBlocks::new(&isotropic(d, x)?, alpha)?;
                for basis in &bases {
                    iso_dev = iso_dev.max((prepared.n_value(basis)?.n - closed).abs());
                }
                dev_m_d = dev_m_d.max((isotropic_n_free_multiplicity(d, x, alpha, df) - closed).abs());
                dev_m_d2 = dev_m_d2.max((isotropic_n_free_multiplicity(d, x, alpha, df * df) - closed).abs());
                cases += 1;
            }
        }
    }
    Ok(OracleReport::new("family_closed_forms", cases, werner_dev.max(iso_dev), TOL, 0)
        .with_detail("werner_max_deviation", werner_dev)
        .with_detail("isotropic_max_deviation", iso_dev)
        .with_detail("free_multiplicity_m_eq_d_deviation", dev_m_d)
        .with_detail("free_multiplicity_m_eq_d2_deviation", dev_m_d2))
}

/// Verification suites exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Entropy,
    Correlation,
    Coherence,
    Families,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "entropy" => Ok(Suite::Entropy),
            "correlation" => Ok(Suite::Correlation),
            "coherence" => Ok(Suite::Coherence),
            "families" => Ok(Suite::Families),
            other => Err(format!("unknown suite {other:?}")),
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> Result<Vec<OracleReport>> {
    let mut reports = Vec::new();
    if matches!(suite, Suite::All | Suite::Entropy) {
        reports.extend(entropy_suite(seed, trials)?);
    }
    if matches!(suite, Suite::All | Suite::Correlation) {
        reports.extend(correlation_suite(seed, trials)?);
    }
    if matches!(suite, Suite::All | Suite::Coherence) {
        reports.extend(coherence_suite(seed, trials)?);
    }
    if matches!(suite, Suite::All | Suite::Families) {
        reports.extend(families_suite(seed)?);
    }
    Ok(reports)
}

const ENTROPY_ALPHAS: [f64; 5] = [0.3, 0.5, 0.8, 1.5, 2.0];

fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// Nonnegativity, channel monotonicity, joint convexity and the `alpha -> 1`
/// limit of the divergence kernels.
pub fn entropy_suite(seed: u64, trials: usize) -> Result<Vec<OracleReport>> {
    let nonneg = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let mut rng = rng::stream(seed ^ 0x01, t as u64);
        let d = 2 + t % 3;
        let rho = random_density_with(d, 1 + t % d, &mut rng);
        let sigma = random_density_with(d, d, &mut rng);
        let alpha = AlphaParam::new(ENTROPY_ALPHAS[t % ENTROPY_ALPHAS.len()])?;
        let plain = tsallis_relative(&rho, &sigma, alpha)?.to_f64();
        let modified = tsallis_relative_modified(&rho, &sigma, alpha)?.to_f64();
        Ok(-plain.min(modified))
    }))?;

    let monotone = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let mut rng = rng::stream(seed ^ 0x02, t as u64);
        let rho = random_density_with(3, 3, &mut rng);
        let sigma = random_density_with(3, 3, &mut rng);
        let channel = random_channel_with(3, 1 + t % 3, &mut rng);
        let alpha = AlphaParam::new(ENTROPY_ALPHAS[t % ENTROPY_ALPHAS.len()])?;
        let before = divergence(&rho, &sigma, alpha)?;
        let after = divergence(&channel.apply(&rho)?, &channel.apply(&sigma)?, alpha)?;
        Ok(after - before)
    }))?;

    let convex = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let mut rng = rng::stream(seed ^ 0x03, t as u64);
        let alpha = AlphaParam::new(ENTROPY_ALPHAS[t % ENTROPY_ALPHAS.len()])?;
        let p = rng::dirichlet_uniform(3, &mut rng);
        let mut mix_rho = CMatrix::zeros(3, 3);
        let mut mix_sigma = CMatrix::zeros(3, 3);
        let mut average = 0.0;
        for &pj in &p {
            let rho = random_density_with(3, 3, &mut rng);
            let sigma = random_density_with(3, 3, &mut rng);
            average += pj * divergence(&rho, &sigma, alpha)?;
            mix_rho += rho.matrix() * C64::new(pj, 0.0);
            mix_sigma += sigma.matrix() * C64::new(pj, 0.0);
        }
        let mixed = divergence(&DensityMatrix::new(mix_rho)?, &DensityMatrix::new(mix_sigma)?, alpha)?;
        Ok(mixed - average)
    }))?;

    let limit_trials = trials.clamp(1, 20);
    let limits = collect(par::map_indexed(limit_trials, true, |t| -> Result<OracleReport> {
        let mut rng = rng::stream(seed ^ 0x04, t as u64);
        let rho = random_density_with(3, 3, &mut rng);
        let sigma = random_density_with(3, 3, &mut rng);
        limit_check_alpha_to_one(&rho, &sigma, 1e-4)
    }))?;
    let constant = worst(limits.iter().map(|r| r.details["constant"]));

    Ok(vec![
        OracleReport::new("entropy.nonnegativity", trials, worst(nonneg), 1e-10, seed),
        OracleReport::new("entropy.monotonicity", trials, worst(monotone), 1e-8, seed),
        OracleReport::new("entropy.joint_convexity", trials, worst(convex), 1e-8, seed),
        OracleReport::new("entropy.alpha_to_one", limit_trials, worst(limits.iter().map(|r| r.worst_violation)), 1e-3, seed)
            .with_detail("constant", constant),
    ])
}

fn random_two_qubit(seed: u64, index: u64) -> Result<BipartiteState> {
    let mut rng = rng::stream(seed, index);
    BipartiteState::new(random_density_with(4, 4, &mut rng), 2, 2)
}

/// Dominance over sampled classical-quantum states, faithfulness, local
/// unitary invariance, monotonicity under channels on B and the relation
/// between the two measures.
pub fn correlation_suite(seed: u64, trials: usize) -> Result<Vec<OracleReport>> {
    let opts = OptimizerOptions::with_seed(seed);
    let states = 4;
    let mut dominance = Vec::new();
    for s in 0..states {
        let rho = random_two_qubit(seed ^ 0x11, s as u64)?;
        for a in [0.5, 2.0] {
            dominance.push(cq_dominance_check(&rho, AlphaParam::new(a)?, trials, rng::derive_seed(seed, s as u64), 1e-9)?);
        }
    }

    let lu = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let mut rng = rng::stream(seed ^ 0x12, t as u64);
        let rho = BipartiteState::new(random_density_with(4, 4, &mut rng), 2, 2)?;
        let u_a = random_unitary_with(2, &mut rng);
        let u_b = random_unitary_with(2, &mut rng);
        let alpha = AlphaParam::new([0.5, 1.5, 2.0][t % 3])?;
        let before = q_alpha(&rho, alpha, &opts)?.value;
        let after = q_alpha(&rho.local_unitary(&u_a, &u_b)?, alpha, &opts)?.value;
        Ok((before - after).abs())
    }))?;

    let channel = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let mut rng = rng::stream(seed ^ 0x13, t as u64);
        let rho = BipartiteState::new(random_density_with(4, 4, &mut rng), 2, 2)?;
        let phi = random_channel_with(2, 1 + t % 3, &mut rng);
        let alpha = AlphaParam::new([0.5, 1.5, 2.0][t % 3])?;
        let before = q_alpha(&rho, alpha, &opts)?.value;
        let after = q_alpha(&rho.apply_on_b(&phi)?, alpha, &opts)?.value;
        Ok(after - before)
    }))?;

    let faithful = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let rho = if t % 2 == 0 {
            let dm = sample_cq(2, 2, seed ^ 0x14, t as u64)?;
            BipartiteState::new(dm, 2, 2)?
        } else {
            random_two_qubit(seed ^ 0x15, t as u64)?
        };
        let alpha = AlphaParam::new([0.5, 1.5, 2.0][t % 3])?;
        let result = q_alpha(&rho, alpha, &opts)?;
        let zero = result.value <= 1e-8;
        let cq = is_cq_in_basis(&rho, &result.basis, 1e-7)?;
        let expected_cq = t % 2 == 0;
        Ok(if zero == cq && cq == expected_cq { 0.0 } else { 1.0 })
    }))?;

    let relation = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let rho = random_two_qubit(seed ^ 0x16, t as u64)?;
        let alpha = AlphaParam::new([0.5, 0.8, 1.5, 2.0][t % 4])?;
        let result = q_alpha(&rho, alpha, &opts)?;
        let q_tilde = Measure::Modified.from_n(result.n.n, alpha);
        Ok((standard_from_modified(q_tilde, alpha) - result.value).abs())
    }))?;

    let dominance_worst = worst(dominance.iter().map(|r| r.worst_violation));
    Ok(vec![
        OracleReport::new("correlation.cq_dominance", dominance.len() * trials, dominance_worst, 1e-9, seed),
        OracleReport::new("correlation.faithfulness", trials, worst(faithful), 0.0, seed),
        OracleReport::new("correlation.local_unitary_invariance", trials, worst(lu), 1e-6, seed),
        OracleReport::new("correlation.channel_monotonicity", trials, worst(channel), 1e-6, seed),
        OracleReport::new("correlation.functional_relation", trials, worst(relation), 1e-9, seed),
    ])
}

/// Rank-one reduction, attainment by the optimal incoherent state and
/// dominance over sampled block-diagonal states.
pub fn coherence_suite(seed: u64, trials: usize) -> Result<Vec<OracleReport>> {
    let reduction = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let mut rng = rng::stream(seed ^ 0x21, t as u64);
        let d = 2 + t % 3;
        let rho = random_density_with(d, 1 + t % d, &mut rng);
        let basis = random_unitary_with(d, &mut rng);
        let l = LudersMeasurement::from_basis(&basis)?;
        let alpha = AlphaParam::new([0.5, 1.5, 2.0][t % 3])?;
        Ok((luders_c(&rho, &l, alpha)? - c_alpha(&rho, &basis, alpha)?).abs())
    }))?;

    let partitions: [&[usize]; 3] = [&[2, 2], &[1, 2, 1], &[3, 1]];
    let attain = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let mut rng = rng::stream(seed ^ 0x22, t as u64);
        let l = LudersMeasurement::from_block_sizes(partitions[t % 3])?;
        let rho = random_density_with(4, 4, &mut rng);
        let alpha = AlphaParam::new([0.5, 1.5, 2.0][t % 3])?;
        let delta = luders_optimal_incoherent(&rho, &l, alpha)?;
        let in_set = if l.is_incoherent(&delta, 1e-10)? { 0.0 } else { 1.0 };
        let gap = (divergence(&rho, &delta, alpha)? - luders_c(&rho, &l, alpha)?).abs();
        let tilde_gap = (standard_from_modified(luders_c_tilde(&rho, &l, alpha)?, alpha) - luders_c(&rho, &l, alpha)?).abs();
        Ok(gap.max(in_set).max(tilde_gap))
    }))?;

    let dominance = collect(par::map_indexed(trials, true, |t| -> Result<f64> {
        let mut rng = rng::stream(seed ^ 0x23, t as u64);
        let l = LudersMeasurement::from_block_sizes(partitions[t % 3])?;
        let rho = random_density_with(4, 4, &mut rng);
        let alpha = AlphaParam::new([0.5, 1.5, 2.0][t % 3])?;
        let value = luders_c(&rho, &l, alpha)?;
        let mut margin = f64::NEG_INFINITY;
        for _ in 0..200 {
            let delta = l.random_incoherent(&mut rng);
            margin = margin.max(value - divergence(&rho, &delta, alpha)?);
        }
        Ok(margin)
    }))?;

    Ok(vec![
        OracleReport::new("coherence.rank_one_reduction", trials, worst(reduction), 1e-12, seed),
        OracleReport::new("coherence.optimal_incoherent", trials, worst(attain), 1e-9, seed),
        OracleReport::new("coherence.incoherent_dominance", trials * 200, worst(dominance), 1e-9, seed),
    ])
}

/// Closed forms for the two families and their zero points through the full
/// optimisation pipeline.
pub fn families_suite(seed: u64) -> Result<Vec<OracleReport>> {
    let x_grid: Vec<f64> = (0..21).map(|k| -1.0 + 0.1 * k as f64).collect();
    let regression = family_closed_form_regression(&[2, 3], &x_grid, &[0.5, 0.8, 1.5, 2.0])?;

    let mut zero = 0.0f64;
    let opts = OptimizerOptions::with_seed(seed);
    for d in [2usize, 3] {
        let df = d as f64;
        for a in [0.5, 1.5, 2.0] {
            let alpha = AlphaParam::new(a)?;
            zero = zero.max(q_alpha(&werner(d, 1.0 / df)?, alpha, &opts)?.value);
            zero = zero.max(q_alpha(&isotropic(d, 1.0 / (df * df))?, alpha, &opts)?.value);
        }
    }

    let mut pure = 0.0f64;
    for t in 0..4u64 {
        let psi = random_pure(2, 2, rng::derive_seed(seed, t));
        let alpha = AlphaParam::new([0.5, 2.0][t as usize % 2])?;
        let numeric = crate::correlations::q_tilde_alpha(&psi, alpha, &opts)?.value;
        pure = pure.max((numeric - crate::correlations::pure_q_tilde(&psi, alpha)?).abs());
    }

    let sweep_check = {
        let w = werner(2, 1.0)?;
        let alpha = AlphaParam::new(2.0)?;
        let closed = werner_n(2, 1.0, alpha)?;
        (n_value(&w, &identity(2), alpha)?.n - closed).abs()
    };

    Ok(vec![
        regression,
        OracleReport::new("families.zero_points", 12, zero, 1e-8, seed),
        OracleReport::new("families.pure_state_reduction", 4, pure, 1e-6, seed),
        OracleReport::new("families.werner_qubit_point", 1, sweep_check, 1e-10, seed),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::DensityMatrix;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    #[test]
    fn dominance_on_cq_input() {
        let rho = BipartiteState::new(sample_cq(2, 2, 5, 0).unwrap(), 2, 2).unwrap();
        let report = cq_dominance_check(&rho, alpha(2.0), 50, 1, 1e-9).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.details["q_alpha"] < 1e-8);
    }

    #[test]
    fn block_oracle_on_cq_input() {
        let chi = sample_cq(2, 2, 9, 0).unwrap();
        let rho = BipartiteState::new(chi, 2, 2).unwrap();
        let basis = {
            let mut rng = rng::stream(9, 0);
            random_unitary_with(2, &mut rng)
        };
        let report = fixed_basis_block_opt(&rho, &basis, alpha(1.5), 1e-6).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.details["oracle"].abs() < 1e-6);
    }

    #[test]
    fn limit_check_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let same = limit_check_alpha_to_one(&mixed, &mixed, 1e-4).unwrap();
        assert!(same.passed && same.worst_violation < 1e-12);
        let rho = DensityMatrix::new(crate::linalg::real_diagonal(&[1.0, 0.0])).unwrap();
        let report = limit_check_alpha_to_one(&rho, &mixed, 1e-4).unwrap();
        assert!(report.passed);
        assert!((report.details["von_neumann"] - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("families".parse::<Suite>().unwrap(), Suite::Families);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = OracleReport::new("x", 3, 0.5, 1.0, 42);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["trials"], 3);
        assert_eq!(v["passed"], true);
        assert_eq!(v["seed"], 42);
        assert_eq!(v["worst_violation"], 0.5);
    }
}
