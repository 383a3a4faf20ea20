use magnus_sim::circuit::{
    assemble_lcu_target, comp_oracle, exponentiate_block_encoding, fig1_block_encoding, fig1_proportionality,
    ham_t_oracle, hermitian_dilation, interaction_ham_t, verify_block_encoding, RyPlacement, INDEX,
};
use magnus_sim::integrators::{omega2_riemann, step_unitary};
use magnus_sim::operators::{
    spectral_norm, CMatrix, GridSpec, HermitianMatrix, InteractionPicture, Potential, TimeHamiltonian, C64,
};
use proptest::prelude::*;

fn block_diagonal(blocks: &[HermitianMatrix], slots: usize) -> CMatrix {
    let n = blocks[0].dim();
    let mut out = CMatrix::zeros(slots * n, slots * n);
    for (k, b) in blocks.iter().enumerate() {
        out.view_mut((k * n, k * n), (n, n)).copy_from(b.as_matrix());
    }
    out
}

#[test]
fn comparator_is_a_self_inverse_permutation() {
    for n_m in 1..=3 {
        let u = comp_oracle(n_m).unwrap();
        let m = u.matrix();
        for row in m.row_iter() {
            assert_eq!(row.iter().filter(|z| z.norm() == 1.0).count(), 1);
            assert_eq!(row.iter().filter(|z| z.norm() == 0.0).count(), m.ncols() - 1);
        }
        let square = m * m;
        assert!(spectral_norm(&(square - CMatrix::identity(m.nrows(), m.ncols()))) == 0.0);
    }
}

#[test]
fn comparator_needs_an_index_qubit() {
    assert!(comp_oracle(0).is_err());
}

#[test]
fn oracle_blocks_hold_the_samples() {
    let h_t = TimeHamiltonian::random_smooth(2, 1.0, 7).unwrap();
    for m in [2, 4, 8] {
        let be = ham_t_oracle(&h_t, 2, 0.25, m, 1.0).unwrap();
        let slots = 1usize << be.layout().width(INDEX).unwrap();
        let samples = h_t.sample_window(0.5, 0.25, m).unwrap();
        let report = verify_block_encoding(&be, &block_diagonal(&samples, slots), 1e-12);
        assert!(report.passed, "M={m}: {}", report.deviation);
        assert!(be.unitary().unitarity_defect() < 1e-12);
    }
}

#[test]
fn interaction_oracle_matches_sampled_interaction_hamiltonian() {
    let ip = InteractionPicture::schrodinger(&GridSpec::periodic(4).unwrap(), Potential::Cos).unwrap();
    let h_i = ip.interaction_hamiltonian();
    for m in [2, 4] {
        let be = interaction_ham_t(&ip, 1, 0.3, m).unwrap();
        let slots = 1usize << be.layout().width(INDEX).unwrap();
        let samples = h_i.sample_window(0.3, 0.3, m).unwrap();
        let report = verify_block_encoding(&be, &block_diagonal(&samples, slots), 1e-11);
        assert!(report.passed, "M={m}: {}", report.deviation);
    }
}

#[test]
fn exponentiated_circuit_reproduces_the_magnus_step() {
    let h_t = TimeHamiltonian::random_smooth(1, 1.0, 11).unwrap();
    let (j, h, m) = (1, 0.5, 4);
    let be = fig1_block_encoding(&h_t, j, h, m, 1.0, RyPlacement::Dedicated).unwrap();
    let step = exponentiate_block_encoding(&be, 1.0).unwrap();
    let want = step_unitary(&omega2_riemann(&h_t, j as f64 * h, h, m).unwrap()).unwrap();
    assert!(spectral_norm(&(step.block() - want.matrix())) < 1e-12);
    assert!(step.unitary().unitarity_defect() < 1e-12);
}

#[test]
fn lcu_target_is_i_times_the_generator() {
    let h_t = TimeHamiltonian::random_smooth(2, 1.5, 3).unwrap();
    let target = assemble_lcu_target(&h_t, 0, 0.4, 8, 1.5).unwrap();
    let omega = omega2_riemann(&h_t, 0.0, 0.4, 8).unwrap();
    assert!(spectral_norm(&(target.as_matrix() - omega.matrix() * C64::new(0.0, 1.0))) < 1e-13);
}

#[test]
fn shared_flag_rotation_leaks_into_the_block() {
    let h_t = TimeHamiltonian::random_smooth(1, 1.0, 5).unwrap();
    let shared = fig1_proportionality(&h_t, 1, 0.5, 2, 1.0, RyPlacement::SharedFlag).unwrap();
    assert!(shared.relative_residual() > 1e-6, "{}", shared.relative_residual());
}

#[test]
fn dilation_of_a_hermitian_contraction_is_unitary() {
    let h = TimeHamiltonian::random_smooth(2, 0.9, 1).unwrap().sample(0.3).unwrap();
    let u = hermitian_dilation(&h).unwrap();
    let defect = spectral_norm(&(u.adjoint() * &u - CMatrix::identity(u.nrows(), u.ncols())));
    assert!(defect < 1e-13, "{defect}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fig1_block_is_proportional_to_the_target(seed in 0u64..10_000, ns in 1usize..3, log_m in 1u32..3, h in 0.05..1.0f64) {
        let alpha = 1.0;
        let m = 1usize << log_m;
        let h_t = TimeHamiltonian::random_smooth(ns, alpha, seed).unwrap();
        let fit = fig1_proportionality(&h_t, 1, h, m, alpha, RyPlacement::Dedicated).unwrap();
        prop_assert!(fit.relative_residual() < 1e-9, "residual {}", fit.relative_residual());
        prop_assert!((fit.factor / (2.0 * alpha * h) - 1.0).abs() < 1e-9, "factor {}", fit.factor);
    }
}
