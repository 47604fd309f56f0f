//! Randomized invariants of the linear algebra, state constructors,
//! divergences and coherence measures.

use proptest::prelude::*;

use tsallis_qc::coherence::{luders_c, luders_c_tilde, LudersMeasurement};
use tsallis_qc::correlations::standard_from_modified;
use tsallis_qc::entropies::{
    tsallis_classical, tsallis_relative, tsallis_relative_modified, AlphaParam, ProbabilityVector,
};
use tsallis_qc::linalg::{
    frobenius_norm, herm_eig, identity, kron, mat_pow, partial_block, real_diagonal, trace, CMatrix,
    C64, DEFAULT_EIG_CLIP,
};
use tsallis_qc::rng;
use tsallis_qc::states::{
    cq_state, is_cq_in_basis, isotropic, random_density_with, random_unitary_with, werner, BipartiteState,
    DensityMatrix,
};

const ALPHAS: [f64; 5] = [0.3, 0.5, 0.8, 1.5, 2.0];

fn random_hermitian(d: usize, seed: u64) -> CMatrix {
    let g = rng::ginibre(d, d, &mut rng::from_seed(seed));
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

fn random_psd(d: usize, seed: u64) -> CMatrix {
    let g = rng::ginibre(d, d, &mut rng::from_seed(seed));
    &g * g.adjoint()
}

fn conj_kron(u: &CMatrix, v: &CMatrix, m: &CMatrix) -> CMatrix {
    let w = kron(u, v);
    &w * m * w.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eigendecomposition_reconstructs(d in 2usize..=9, seed in any::<u64>()) {
        let m = random_hermitian(d, seed);
        let eig = herm_eig(&m, 1e-10).unwrap();
        let scale = frobenius_norm(&m);
        prop_assert!(frobenius_norm(&(eig.reconstruct() - &m)) <= 1e-10 * scale);
        let v = &eig.eigenvectors;
        prop_assert!(frobenius_norm(&(v.adjoint() * v - identity(d))) <= 1e-10);
        prop_assert!(eig.eigenvalues.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn powers_compose(seed in any::<u64>(), t in -1.5f64..2.5, s in -1.5f64..2.5) {
        let m = random_psd(4, seed);
        let lhs = mat_pow(&mat_pow(&m, t, DEFAULT_EIG_CLIP).unwrap(), s, DEFAULT_EIG_CLIP).unwrap();
        let rhs = mat_pow(&m, t * s, DEFAULT_EIG_CLIP).unwrap();
        prop_assert!(frobenius_norm(&(lhs - &rhs)) <= 1e-9 * (1.0 + frobenius_norm(&rhs)));
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, dc in 1usize..4) {
        let mut r = rng::from_seed(seed);
        let a = rng::ginibre(da, da, &mut r);
        let b = rng::ginibre(db, db, &mut r);
        let c = rng::ginibre(dc, dc, &mut r);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(frobenius_norm(&(left - right)) <= 1e-12);
    }

    #[test]
    fn diagonal_blocks_carry_the_trace(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let m = rng::ginibre(da * db, da * db, &mut rng::from_seed(seed));
        let total: C64 = (0..da).map(|i| trace(&partial_block(&m, da, db, i, i).unwrap())).sum();
        prop_assert!((total - trace(&m)).norm() <= 1e-12);
    }

    #[test]
    fn werner_and_isotropic_symmetries(seed in any::<u64>(), d in 2usize..4, x in 0.0f64..1.0) {
        let u = random_unitary_with(d, &mut rng::from_seed(seed));
        let w = werner(d, 2.0 * x - 1.0).unwrap();
        prop_assert!(frobenius_norm(&(conj_kron(&u, &u, w.matrix()) - w.matrix())) <= 1e-10);
        let iso = isotropic(d, x).unwrap();
        let uc = u.conjugate();
        prop_assert!(frobenius_norm(&(conj_kron(&u, &uc, iso.matrix()) - iso.matrix())) <= 1e-10);
    }

    #[test]
    fn cq_states_are_recognized(seed in any::<u64>(), da in 2usize..4, db in 1usize..4) {
        let mut r = rng::from_seed(seed);
        let basis = random_unitary_with(da, &mut r);
        let w = rng::dirichlet_uniform(da, &mut r);
        let blocks = w.iter().map(|&p| random_density_with(db, db, &mut r).matrix() * C64::new(p, 0.0)).collect();
        let state = cq_state(basis.clone(), blocks).unwrap().materialize().unwrap();
        prop_assert!(is_cq_in_basis(&state, &basis, 1e-10).unwrap());
    }

    #[test]
    fn divergences_nonnegative(seed in any::<u64>(), d in 2usize..5, k in 0usize..5) {
        let mut r = rng::from_seed(seed);
        let rank = 1 + (seed as usize) % d;
        let rho = random_density_with(d, rank, &mut r);
        let sigma = random_density_with(d, d, &mut r);
        let alpha = AlphaParam::new(ALPHAS[k]).unwrap();
        prop_assert!(tsallis_relative(&rho, &sigma, alpha).unwrap().to_f64() >= -1e-10);
        prop_assert!(tsallis_relative_modified(&rho, &sigma, alpha).unwrap().to_f64() >= -1e-10);
        prop_assert!(tsallis_relative(&rho, &rho, alpha).unwrap().to_f64().abs() <= 1e-10);
    }

    #[test]
    fn diagonal_inputs_match_classical(seed in any::<u64>(), d in 2usize..6, k in 0usize..5) {
        let mut r = rng::from_seed(seed);
        let p = rng::dirichlet_uniform(d, &mut r);
        let q = rng::dirichlet_uniform(d, &mut r);
        let alpha = AlphaParam::new(ALPHAS[k]).unwrap();
        let quantum = tsallis_relative(
            &DensityMatrix::new(real_diagonal(&p)).unwrap(),
            &DensityMatrix::new(real_diagonal(&q)).unwrap(),
            alpha,
        ).unwrap().to_f64();
        let classical = tsallis_classical(
            &ProbabilityVector::new(p).unwrap(),
            &ProbabilityVector::new(q).unwrap(),
            alpha,
        ).unwrap().to_f64();
        prop_assert!((quantum - classical).abs() <= 1e-10);
    }

    #[test]
    fn luders_measures_are_related(seed in any::<u64>(), k in 0usize..5, split in 1usize..4) {
        let mut r = rng::from_seed(seed);
        let rho = random_density_with(4, 4, &mut r);
        let l = LudersMeasurement::from_block_sizes(&[split, 4 - split]).unwrap();
        let alpha = AlphaParam::new(ALPHAS[k]).unwrap();
        let c = luders_c(&rho, &l, alpha).unwrap();
        prop_assert!(c >= -1e-10);
        let from_tilde = standard_from_modified(luders_c_tilde(&rho, &l, alpha).unwrap(), alpha);
        prop_assert!((c - from_tilde).abs() <= 1e-12);
        let dephased = DensityMatrix::new(l.dephase(rho.matrix())).unwrap();
        prop_assert!(luders_c(&dephased, &l, alpha).unwrap().abs() <= 1e-8);
    }
}

#[test]
fn local_unitary_conjugation_preserves_spectrum() {
    let mut r = rng::from_seed(7);
    for _ in 0..20 {
        let rho = BipartiteState::new(random_density_with(6, 6, &mut r), 2, 3).unwrap();
        let u_a = random_unitary_with(2, &mut r);
        let u_b = random_unitary_with(3, &mut r);
        let moved = rho.local_unitary(&u_a, &u_b).unwrap();
        let before = rho.state().eigenvalues();
        let after = moved.state().eigenvalues();
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
