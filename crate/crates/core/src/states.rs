//! Quantum states, channels and the random ensembles used for testing.

use nalgebra::DVector;
use rand::Rng;

use crate::entropies::ProbabilityVector;
use crate::error::{Error, Result};
use crate::linalg::{
    self, frobenius_norm, hermiticity_deviation, hermitize_in_place, identity, kron, outer,
    partial_block, partial_trace, CMatrix, Subsystem, C64, DEFAULT_EIG_CLIP, ONE, ZERO,
};
use crate::rng;

pub const DEFAULT_VALIDATION_TOL: f64 = 1e-10;

/// Purity below `1 - PURITY_TOL` is rejected where a pure state is required.
pub const PURITY_TOL: f64 = 1e-8;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    validation_tol: f64,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_VALIDATION_TOL)
    }

    pub fn with_tolerance(mut matrix: CMatrix, validation_tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > validation_tol {
            return Err(Error::NotHermitian { deviation });
        }
        hermitize_in_place(&mut matrix);
        let trace = linalg::trace(&matrix).re;
        if (trace - 1.0).abs() > validation_tol {
            return Err(Error::NotNormalized { trace });
        }
        let min_eigenvalue = linalg::hermitian_eigenvalues(&matrix)[0];
        if min_eigenvalue < -validation_tol {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self {
            matrix,
            validation_tol,
        })
    }

    /// `I / d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: identity(d) / C64::new(d as f64, 0.0),
            validation_tol: DEFAULT_VALIDATION_TOL,
        }
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn from_pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let unit = psi / C64::new(norm, 0.0);
        Self::new(outer(&unit))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn validation_tol(&self) -> f64 {
        self.validation_tol
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_of_product(&self.matrix, &self.matrix).re
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// `U rho U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary of dimension {} on state of dimension {}",
                u.nrows(),
                self.dim()
            )));
        }
        Self::with_tolerance(u * &self.matrix * u.adjoint(), self.validation_tol)
    }
}

/// Density matrix with a declared factorization `H_A ⊗ H_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    state: DensityMatrix,
    d_a: usize,
    d_b: usize,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || d_a * d_b != state.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} does not factor as {d_a} x {d_b}",
                state.dim()
            )));
        }
        Ok(Self { state, d_a, d_b })
    }

    pub fn from_matrix(matrix: CMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(DensityMatrix::new(matrix)?, d_a, d_b)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &CMatrix {
        self.state.matrix()
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn reduced(&self, keep: Subsystem) -> CMatrix {
        partial_trace(self.matrix(), self.d_a, self.d_b, keep)
            .expect("factorization checked at construction")
    }

    /// `(U_A ⊗ U_B) rho (U_A ⊗ U_B)†`.
    pub fn local_unitary(&self, u_a: &CMatrix, u_b: &CMatrix) -> Result<Self> {
        if u_a.nrows() != self.d_a || u_b.nrows() != self.d_b {
            return Err(Error::DimensionMismatch(
                "local unitaries do not match the factorization".into(),
            ));
        }
        Self::new(self.state.conjugate(&kron(u_a, u_b))?, self.d_a, self.d_b)
    }

    /// `(I ⊗ Φ)(rho)` for a channel acting on subsystem B.
    pub fn apply_on_b(&self, channel: &QuantumChannel) -> Result<Self> {
        if channel.d_in() != self.d_b {
            return Err(Error::DimensionMismatch(format!(
                "channel input dimension {} but d_b = {}",
                channel.d_in(),
                self.d_b
            )));
        }
        let lifted = channel.lift_on_b(self.d_a);
        let out = lifted.apply_matrix(self.matrix());
        Self::from_matrix(out, self.d_a, channel.d_out())
    }
}

/// `chi = sum_i |i><i| ⊗ Y_i` in the orthonormal basis given by the columns of
/// `basis`.
#[derive(Debug, Clone)]
pub struct ClassicalQuantumState {
    basis: CMatrix,
    blocks: Vec<CMatrix>,
}

impl ClassicalQuantumState {
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn d_a(&self) -> usize {
        self.basis.nrows()
    }

    pub fn d_b(&self) -> usize {
        self.blocks[0].nrows()
    }

    /// The operator `sum_i |i><i| ⊗ Y_i` on the full space.
    pub fn to_matrix(&self) -> CMatrix {
        let d_a = self.d_a();
        let d_b = self.d_b();
        let mut out = CMatrix::zeros(d_a * d_b, d_a * d_b);
        for (i, y) in self.blocks.iter().enumerate() {
            let ket = self.basis.column(i).into_owned();
            out += kron(&outer(&ket), y);
        }
        hermitize_in_place(&mut out);
        out
    }

    pub fn materialize(&self) -> Result<BipartiteState> {
        BipartiteState::from_matrix(self.to_matrix(), self.d_a(), self.d_b())
    }
}

/// Validated classical-quantum state. Blocks must be PSD and their traces
/// must sum to one.
pub fn cq_state(basis: CMatrix, blocks: Vec<CMatrix>) -> Result<ClassicalQuantumState> {
    linalg::require_unitary(&basis, 1e-8)?;
    if blocks.len() != basis.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks for a basis of size {}",
            blocks.len(),
            basis.nrows()
        )));
    }
    let d_b = blocks[0].nrows();
    let mut total = 0.0;
    let mut checked = Vec::with_capacity(blocks.len());
    for mut y in blocks {
        if y.nrows() != d_b || y.ncols() != d_b {
            return Err(Error::DimensionMismatch("blocks differ in size".into()));
        }
        let deviation = hermiticity_deviation(&y);
        if deviation > DEFAULT_VALIDATION_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        hermitize_in_place(&mut y);
        let min_eigenvalue = linalg::hermitian_eigenvalues(&y)[0];
        if min_eigenvalue < -DEFAULT_VALIDATION_TOL {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        total += linalg::trace(&y).re;
        checked.push(y);
    }
    if (total - 1.0).abs() > DEFAULT_VALIDATION_TOL {
        return Err(Error::NotNormalized { trace: total });
    }
    Ok(ClassicalQuantumState {
        basis,
        blocks: checked,
    })
}

/// True iff every off-diagonal block `<i|rho|j>` (`i != j`) in `basis` has
/// Frobenius norm at most `tol`.
pub fn is_cq_in_basis(rho: &BipartiteState, basis: &CMatrix, tol: f64) -> Result<bool> {
    if basis.nrows() != rho.d_a() || basis.ncols() != rho.d_a() {
        return Err(Error::DimensionMismatch(format!(
            "basis of size {}x{} for d_a = {}",
            basis.nrows(),
            basis.ncols(),
            rho.d_a()
        )));
    }
    let rotated = rotate_a(rho.matrix(), basis, rho.d_b());
    for i in 0..rho.d_a() {
        for j in 0..rho.d_a() {
            if i != j {
                let block = partial_block(&rotated, rho.d_a(), rho.d_b(), i, j)?;
                if frobenius_norm(&block) > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `(U† ⊗ I) M (U ⊗ I)`: the operator expressed in the basis of `U`'s columns.
pub fn rotate_a(m: &CMatrix, basis: &CMatrix, d_b: usize) -> CMatrix {
    let lifted = kron(basis, &identity(d_b));
    lifted.adjoint() * m * lifted
}

/// Swap operator `V|ij> = |ji>` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> CMatrix {
    let mut v = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            v[(j * d + i, i * d + j)] = ONE;
        }
    }
    v
}

/// `|Phi> = (1/sqrt d) sum_k |kk>`.
pub fn maximally_entangled(d: usize) -> DVector<C64> {
    let mut psi = DVector::from_element(d * d, ZERO);
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for k in 0..d {
        psi[k * d + k] = amp;
    }
    psi
}

fn check_family(d: usize, x: f64, lo: f64, hi: f64, family: &str) -> Result<()> {
    if d < 2 {
        return Err(Error::ParamOutOfRange(format!("{family}: d = {d} < 2")));
    }
    if !(lo..=hi).contains(&x) {
        return Err(Error::ParamOutOfRange(format!(
            "{family}: x = {x} outside [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// `d ⊗ d` Werner state with `x = Tr(rho V)`:
/// `((d - x) I + (d x - 1) V) / (d^3 - d)`.
pub fn werner(d: usize, x: f64) -> Result<BipartiteState> {
    check_family(d, x, -1.0, 1.0, "werner")?;
    let df = d as f64;
    let denom = df * df * df - df;
    let m = identity(d * d) * C64::new((df - x) / denom, 0.0)
        + swap_operator(d) * C64::new((df * x - 1.0) / denom, 0.0);
    BipartiteState::from_matrix(m, d, d)
}

/// `d ⊗ d` isotropic state with fidelity `x = <Phi|rho|Phi>`.
pub fn isotropic(d: usize, x: f64) -> Result<BipartiteState> {
    check_family(d, x, 0.0, 1.0, "isotropic")?;
    let df = d as f64;
    let denom = df * df - 1.0;
    let phi = outer(&maximally_entangled(d));
    let m = identity(d * d) * C64::new((1.0 - x) / denom, 0.0)
        + phi * C64::new((df * df * x - 1.0) / denom, 0.0);
    BipartiteState::from_matrix(m, d, d)
}

/// Haar-random `d x d` unitary: QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_unitary(d: usize, seed: u64) -> CMatrix {
    random_unitary_with(d, &mut rng::from_seed(seed))
}

pub fn random_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    phase_fixed_q(rng::ginibre(d, d, rng))
}

/// `Q` of the QR factorization of `m`, normalized so `R` has a positive real
/// diagonal.
pub fn phase_fixed_q(m: CMatrix) -> CMatrix {
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..q.ncols() {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / C64::new(rkk.norm(), 0.0)
        } else {
            ONE
        };
        for i in 0..q.nrows() {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Haar-random pure state on `C^{d_a} ⊗ C^{d_b}`.
pub fn random_pure(d_a: usize, d_b: usize, seed: u64) -> BipartiteState {
    let mut rng = rng::from_seed(seed);
    let v = rng::ginibre(d_a * d_b, 1, &mut rng);
    let psi = DVector::from_iterator(d_a * d_b, v.iter().copied());
    let state = DensityMatrix::from_pure(&psi).expect("gaussian vector is nonzero");
    BipartiteState::new(state, d_a, d_b).expect("dimensions match by construction")
}

/// Ginibre-induced mixed state `G G† / Tr(G G†)` with `G` of size `d x rank`.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(Error::ParamOutOfRange(format!(
            "rank {rank} must lie in [1, {d}]"
        )));
    }
    Ok(random_density_with(d, rank, &mut rng::from_seed(seed)))
}

pub fn random_density_with<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = rng::ginibre(d, rank, rng);
    let mut m = &g * g.adjoint();
    let t = linalg::trace(&m).re;
    m /= C64::new(t, 0.0);
    DensityMatrix::new(m).expect("Ginibre construction is a valid state")
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus_ops: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus_ops: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = kraus_ops.first() else {
            return Err(Error::DimensionMismatch("no Kraus operators".into()));
        };
        let (d_out, d_in) = first.shape();
        if kraus_ops.iter().any(|k| k.shape() != (d_out, d_in)) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        let mut completeness = CMatrix::zeros(d_in, d_in);
        for k in &kraus_ops {
            completeness += k.adjoint() * k;
        }
        let deviation = frobenius_norm(&(completeness - identity(d_in)));
        if deviation > 1e-10 {
            return Err(Error::ParamOutOfRange(format!(
                "Kraus operators are not trace preserving (deviation {deviation:.3e})"
            )));
        }
        Ok(Self { kraus_ops })
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.kraus_ops
    }

    pub fn d_in(&self) -> usize {
        self.kraus_ops[0].ncols()
    }

    pub fn d_out(&self) -> usize {
        self.kraus_ops[0].nrows()
    }

    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.d_out(), self.d_out());
        for k in &self.kraus_ops {
            out += k * m * k.adjoint();
        }
        hermitize_in_place(&mut out);
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d_in() {
            return Err(Error::DimensionMismatch(format!(
                "channel input dimension {} but state dimension {}",
                self.d_in(),
                rho.dim()
            )));
        }
        DensityMatrix::new(self.apply_matrix(rho.matrix()))
    }

    /// `id_{d_a} ⊗ Φ`.
    pub fn lift_on_b(&self, d_a: usize) -> QuantumChannel {
        let eye = identity(d_a);
        QuantumChannel {
            kraus_ops: self.kraus_ops.iter().map(|k| kron(&eye, k)).collect(),
        }
    }
}

/// Stinespring-random channel on `C^d`: the Kraus operators are the
/// environment slices `(<k|_E ⊗ I) W` of a Haar isometry `W: C^d -> C^{env} ⊗ C^d`.
pub fn random_channel(d: usize, env_dim: usize, seed: u64) -> Result<QuantumChannel> {
    if d == 0 || env_dim == 0 {
        return Err(Error::ParamOutOfRange("channel dimensions must be >= 1".into()));
    }
    Ok(random_channel_with(d, env_dim, &mut rng::from_seed(seed)))
}

pub fn random_channel_with<R: Rng + ?Sized>(d: usize, env_dim: usize, rng: &mut R) -> QuantumChannel {
    let big = random_unitary_with(d * env_dim, rng);
    let kraus = (0..env_dim)
        .map(|k| big.view((k * d, 0), (d, d)).into_owned())
        .collect();
    QuantumChannel::new(kraus).expect("isometry slices are trace preserving")
}

/// Schmidt coefficients of a pure bipartite state, descending.
pub fn schmidt(psi: &BipartiteState) -> Result<ProbabilityVector> {
    let purity = psi.state().purity();
    if (purity - 1.0).abs() > PURITY_TOL {
        return Err(Error::NotPure { purity });
    }
    let reduced = psi.reduced(Subsystem::A);
    let mut lambda: Vec<f64> = linalg::hermitian_eigenvalues(&reduced)
        .into_iter()
        .rev()
        .map(|l| if l <= DEFAULT_EIG_CLIP { 0.0 } else { l })
        .collect();
    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|l| *l /= total);
    ProbabilityVector::new(lambda)
}
