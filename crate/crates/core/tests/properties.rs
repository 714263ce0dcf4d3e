//! Property-based checks of the core invariants.

use epower_core::bounds::entropy_lipschitz;
use epower_core::gates::{ancilla_slice, extend_with_ancilla, AncillaDims};
use epower_core::minimize::{pencil_product_count, PencilCount};
use epower_core::multipartite::cp::{cp_fit_curve, CpOptions};
use epower_core::multipartite::{generic_multipartite_sr, genuinely_entangled, min_cut_generic_sr};
use epower_core::sampling::{haar_state, haar_unitary, random_subspace, Rng, Seed, Subspace};
use epower_core::tensor::{
    entropy_of_entanglement, kron_vectors, matricize, negativity_from_coefficients, negativity_partial_transpose,
    schmidt_coefficients, schmidt_rank, tail_energy, unitarity_residual, CVector, Cut, Gate, PureState, Shape, C64,
};
use epower_core::varieties::{
    generic_border_rank_power, generic_border_rank_power_oracle, generic_min_sr, generic_min_sr_from_rank,
    generic_min_sr_from_rank_oracle, generic_min_sr_oracle, secant_expected_dim, segre_dim, BipartiteDims,
    BorderRankPower,
};
use proptest::prelude::*;

fn bipartite_cut() -> Cut {
    Cut::new(2, &[0]).unwrap()
}

fn local_unitary(dims: &[usize], seed: Seed) -> Gate {
    let factors: Vec<_> = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| haar_unitary(d, seed.derive(i as u64)))
        .collect();
    Gate::local(&factors).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formulas_match_oracles(a in 2usize..400, b in 2usize..400) {
        let d = BipartiteDims::new(a, b).unwrap();
        prop_assert_eq!(generic_min_sr(d), generic_min_sr_oracle(d));
        prop_assert_eq!(generic_min_sr_from_rank(d, 1).unwrap(), generic_min_sr(d));
        let mut previous = usize::MAX;
        for r in 1..=d.d_a() {
            let s = generic_min_sr_from_rank(d, r).unwrap();
            prop_assert_eq!(s, generic_min_sr_from_rank_oracle(d, r).unwrap());
            prop_assert!(s <= previous);
            previous = s;
        }
    }

    #[test]
    fn border_rank_power_matches_oracle(mut dims in prop::collection::vec(2usize..6, 3..5)) {
        dims.sort_unstable();
        if let BorderRankPower::Value(v) = generic_border_rank_power(&dims).unwrap() {
            prop_assert_eq!(v, generic_border_rank_power_oracle(&dims).unwrap());
        }
        let ambient = dims.iter().product::<usize>() as i64 - 1;
        prop_assert!(segre_dim(&dims).unwrap() <= ambient);
        for r in 1..4 {
            prop_assert!(secant_expected_dim(&dims, r).unwrap().value <= ambient);
        }
    }

    #[test]
    fn multipartite_generic_is_min_over_cuts(dims in prop::collection::vec(2usize..7, 3..6)) {
        let shape = Shape::new(dims.clone()).unwrap();
        prop_assert_eq!(generic_multipartite_sr(&dims).unwrap(), min_cut_generic_sr(&shape).unwrap());
    }

    #[test]
    fn schmidt_data_is_local_unitary_invariant(a in 2usize..5, b in 2usize..5, seed in any::<u64>()) {
        let shape = Shape::bipartite(a, b).unwrap();
        let psi = haar_state(&shape, Seed(seed));
        let moved = local_unitary(&[a, b], Seed(seed).derive(9)).apply(&psi).unwrap();
        let cut = bipartite_cut();
        let s1 = schmidt_coefficients(&psi, &cut).unwrap();
        let s2 = schmidt_coefficients(&moved, &cut).unwrap();
        for (x, y) in s1.iter().zip(&s2) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let e1 = entropy_of_entanglement(&psi, &cut).unwrap();
        let e2 = entropy_of_entanglement(&moved, &cut).unwrap();
        prop_assert!((e1 - e2).abs() < 1e-10);
    }

    #[test]
    fn schmidt_coefficients_are_normalized_and_tails_decrease(a in 2usize..6, b in 2usize..6, seed in any::<u64>()) {
        let psi = haar_state(&Shape::bipartite(a, b).unwrap(), Seed(seed));
        let cut = bipartite_cut();
        let s = schmidt_coefficients(&psi, &cut).unwrap();
        prop_assert!((s.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let m = a.min(b);
        let mut previous = 1.0;
        for k in 1..=m {
            let t = tail_energy(&psi, &cut, k).unwrap();
            prop_assert!(t <= previous + 1e-15);
            previous = t;
        }
        prop_assert!(previous < 1e-12);
        let e = entropy_of_entanglement(&psi, &cut).unwrap();
        prop_assert!(e >= 0.0 && e <= (m as f64).log2() + 1e-12);
    }

    #[test]
    fn negativity_routes_agree(a in 2usize..5, b in 2usize..5, seed in any::<u64>()) {
        let psi = haar_state(&Shape::bipartite(a, b).unwrap(), Seed(seed));
        let cut = bipartite_cut();
        let schmidt = negativity_from_coefficients(&schmidt_coefficients(&psi, &cut).unwrap());
        let trace = negativity_partial_transpose(&matricize(&psi, &cut).unwrap());
        prop_assert!((schmidt - trace).abs() < 1e-8);
        prop_assert!(schmidt <= (a.min(b) as f64 - 1.0) / 2.0 + 1e-12);
    }

    #[test]
    fn entropy_is_lipschitz(a in 2usize..5, extra in 0usize..3, seed in any::<u64>(), log_scale in -6.0f64..0.0) {
        let b = a + extra;
        let shape = Shape::bipartite(a, b).unwrap();
        let psi = haar_state(&shape, Seed(seed));
        let mut rng = Rng::new(Seed(seed).derive(1));
        let noise = rng.complex_gaussian_vector(a * b) * C64::new(10f64.powf(log_scale), 0.0);
        let phi = PureState::normalize(psi.amplitudes() + noise, shape).unwrap();
        let cut = bipartite_cut();
        let de = (entropy_of_entanglement(&psi, &cut).unwrap() - entropy_of_entanglement(&phi, &cut).unwrap()).abs();
        let dist = (psi.amplitudes() - phi.amplitudes()).norm();
        prop_assert!(de <= entropy_lipschitz(a) * dist + 1e-12);
    }

    #[test]
    fn haar_unitaries_are_unitary_and_reproducible(n in 1usize..16, seed in any::<u64>()) {
        let u = haar_unitary(n, Seed(seed));
        prop_assert!(unitarity_residual(&u) < 1e-12);
        prop_assert_eq!(u, haar_unitary(n, Seed(seed)));
    }

    #[test]
    fn ancilla_slice_is_gate_on_slices(
        a in 1usize..4, b in 1usize..4, da in 2usize..4, db in 2usize..4, seed in any::<u64>(),
        i_pick in any::<usize>(), j_pick in any::<usize>(),
    ) {
        let anc = AncillaDims::new(a, b).unwrap();
        let gate = Gate::new(haar_unitary(da * db, Seed(seed)), Shape::bipartite(da, db).unwrap()).unwrap();
        let big = extend_with_ancilla(&gate, anc).unwrap();
        let mut rng = Rng::new(Seed(seed).derive(3));
        let alpha = rng.unit_vector(a * da);
        let beta = rng.unit_vector(db * b);
        let input = PureState::new(kron_vectors(&[alpha.clone(), beta.clone()]), big.shape().clone()).unwrap();
        let output = big.apply(&input).unwrap();
        let (i, j) = (i_pick % a, j_pick % b);
        let alpha_i = CVector::from_fn(da, |x, _| alpha[i * da + x]);
        let beta_j = CVector::from_fn(db, |y, _| beta[y * b + j]);
        prop_assume!(alpha_i.norm() > 1e-6 && beta_j.norm() > 1e-6);
        let expected = gate.matrix() * kron_vectors(&[alpha_i.normalize(), beta_j.normalize()]);
        let slice = ancilla_slice(&output, anc, i, j).unwrap();
        let overlap = slice.state.amplitudes().dotc(&expected).norm();
        prop_assert!((overlap - 1.0).abs() < 1e-10);
        let cut_full = anc.system_cut().unwrap();
        let full = schmidt_rank(&output, &cut_full, 1e-9).unwrap();
        prop_assert!(schmidt_rank(&slice.state, &bipartite_cut(), 1e-9).unwrap() <= full);
    }

    #[test]
    fn generic_pencils_have_d_singular_members(d in 2usize..5, seed in any::<u64>()) {
        let shape = Shape::bipartite(d, d).unwrap();
        let s = random_subspace(&shape, 2, Seed(seed)).unwrap();
        prop_assert_eq!(pencil_product_count(&s).unwrap(), PencilCount::Finite(d));
    }

    #[test]
    fn products_are_not_genuinely_entangled(seed in any::<u64>(), split in 1usize..3) {
        let shape3 = Shape::new(vec![2, 2, 3]).unwrap();
        let full = haar_state(&shape3, Seed(seed));
        prop_assert!(genuinely_entangled(&full, 1e-6).unwrap().entangled);
        let mut rng = Rng::new(Seed(seed));
        let left_dims: usize = [2, 2, 3][..split].iter().product();
        let right_dims: usize = [2, 2, 3][split..].iter().product();
        let v = kron_vectors(&[rng.unit_vector(left_dims), rng.unit_vector(right_dims)]);
        let product = PureState::new(v, shape3).unwrap();
        let rep = genuinely_entangled(&product, 1e-6).unwrap();
        prop_assert!(!rep.entangled);
        prop_assert!(rep.witness.is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn cp_residual_curve_is_monotone(seed in any::<u64>()) {
        let psi = haar_state(&Shape::new(vec![2, 2, 2]).unwrap(), Seed(seed));
        let opts = CpOptions { restarts: 2, lm_steps: 500, ..CpOptions::default() };
        let curve = cp_fit_curve(&psi, 3, Seed(seed), &opts).unwrap();
        prop_assert!(curve.windows(2).all(|w| w[1].residual <= w[0].residual + 1e-12));
        for m in &curve {
            let diff = (m.reconstruct() - psi.amplitudes()).norm();
            prop_assert!((diff - m.residual).abs() < 1e-9);
        }
    }
}

#[test]
fn pencil_spanned_by_two_products_counts_them() {
    let shape = Shape::bipartite(2, 2).unwrap();
    let mut rng = Rng::new(Seed(21));
    for _ in 0..20 {
        let p1 = kron_vectors(&[rng.unit_vector(2), rng.unit_vector(2)]);
        let p2 = kron_vectors(&[rng.unit_vector(2), rng.unit_vector(2)]);
        let s = Subspace::span(&[p1, p2], shape.clone()).unwrap();
        assert_eq!(pencil_product_count(&s).unwrap(), PencilCount::Finite(2));
    }
}

#[test]
fn haar_states_have_expected_mean_purity() {
    // E tr ρ_A² = (d_A + d_B)/(d_A d_B + 1) for Haar states.
    let (a, b) = (3usize, 4usize);
    let shape = Shape::bipartite(a, b).unwrap();
    let cut = bipartite_cut();
    let n = 4000;
    let mean: f64 = (0..n)
        .map(|t| {
            let s = schmidt_coefficients(&haar_state(&shape, Seed(40).derive(t)), &cut).unwrap();
            s.iter().map(|x| x.powi(4)).sum::<f64>()
        })
        .sum::<f64>()
        / n as f64;
    let expected = (a + b) as f64 / (a * b + 1) as f64;
    assert!((mean - expected).abs() < 0.01, "mean purity {mean} vs {expected}");
}
