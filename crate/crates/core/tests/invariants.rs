use proptest::prelude::*;
use qmi_core::npp::{gnp, rgnp_indices, PartitionInput};
use qmi_core::permopt::{
    apply_assignment, disentangle, exhaustive_search, random_spectrum, rgnp_two_step, LatticeAssignment,
};
use qmi_core::qlinalg::{kron, random_unitary, ComplexMatrix};
use qmi_core::states::{
    apply_bipartite_unitary, mutual_info_report, random_pure_state, reduced_states, rho_ab, theorem1_optimal_unitary,
    Dims, TripartitePureState,
};
use qmi_core::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn dims() -> impl Strategy<Value = Dims> {
    (2usize..=3, 2usize..=3, 1usize..=6).prop_map(|(a, b, c)| Dims::new(a, b, c))
}

/// Reduced state of one party by explicit summation over the other two indices.
fn reduce_by_hand(psi: &TripartitePureState, party: usize) -> ComplexMatrix {
    let d = psi.dims();
    let sizes = [d.a, d.b, d.c];
    let amp = |i: [usize; 3]| psi.amplitudes()[(i[0] * d.b + i[1]) * d.c + i[2]];
    let (o1, o2) = match party {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    ComplexMatrix::from_fn(sizes[party], sizes[party], |r, s| {
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 0..sizes[o1] {
            for y in 0..sizes[o2] {
                let mut i = [0; 3];
                let mut j = [0; 3];
                i[party] = r;
                j[party] = s;
                i[o1] = x;
                j[o1] = x;
                i[o2] = y;
                j[o2] = y;
                acc += amp(i) * amp(j).conj();
            }
        }
        acc
    })
}

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Brute force over all `k^n` assignments: (smallest max-sum, largest min-sum).
fn brute_force_extremes(numbers: &[f64], k: usize) -> (f64, f64) {
    let n = numbers.len();
    let mut best_max = f64::INFINITY;
    let mut best_min = f64::NEG_INFINITY;
    let mut code = vec![0usize; n];
    loop {
        let mut sums = vec![0.0; k];
        for (i, &g) in code.iter().enumerate() {
            sums[g] += numbers[i];
        }
        let hi = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = sums.iter().cloned().fold(f64::INFINITY, f64::min);
        best_max = best_max.min(hi);
        best_min = best_min.max(lo);
        let mut p = 0;
        loop {
            if p == n {
                return (best_max, best_min);
            }
            code[p] += 1;
            if code[p] < k {
                break;
            }
            code[p] = 0;
            p += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mutual_informations_sum_to_twice_s_c(d in dims(), seed in any::<u64>(), useed in any::<u64>()) {
        let psi = random_pure_state(d, seed).unwrap();
        let u = random_unitary(d.ab(), &mut ChaCha20Rng::seed_from_u64(useed));
        for st in [psi.clone(), apply_bipartite_unitary(&psi, &u).unwrap()] {
            let r = mutual_info_report(&st).unwrap();
            prop_assert!((r.i_ac + r.i_bc - 2.0 * r.s_c).abs() < 1e-9);
            prop_assert!((r.i_ab_c - 2.0 * r.s_c).abs() < 1e-9);
            prop_assert!(r.delta_s <= r.s_c + 1e-9);
            prop_assert!(-r.delta_s <= r.s_c + 1e-9);
        }
    }

    #[test]
    fn a_unitary_on_ab_leaves_s_c_alone(d in dims(), seed in any::<u64>(), useed in any::<u64>()) {
        let psi = random_pure_state(d, seed).unwrap();
        let u = random_unitary(d.ab(), &mut ChaCha20Rng::seed_from_u64(useed));
        let before = mutual_info_report(&psi).unwrap();
        let after = mutual_info_report(&apply_bipartite_unitary(&psi, &u).unwrap()).unwrap();
        prop_assert!((before.s_c - after.s_c).abs() < 1e-9);
        prop_assert!((before.s_ab - after.s_ab).abs() < 1e-9);
    }

    #[test]
    fn every_method_respects_the_ceiling(d in dims(), seed in any::<u64>()) {
        let psi = random_pure_state(d, seed).unwrap();
        let r = mutual_info_report(&psi).unwrap();
        let (_, spec) = disentangle(&rho_ab(&psi), d.a, d.b).unwrap();
        let ex = exhaustive_search(&spec).unwrap().delta_s;
        let rg = rgnp_two_step(&spec).unwrap().delta_s;
        prop_assert!(ex <= r.s_c + 1e-9);
        prop_assert!(rg <= ex + 1e-12);
        if r.rank_c <= d.a {
            let (_, t1) = theorem1_optimal_unitary(&psi).unwrap();
            prop_assert!((t1.delta_s - r.s_c).abs() < 1e-8);
            prop_assert!(ex <= t1.delta_s + 1e-9);
        }
    }

    #[test]
    fn partial_traces_match_explicit_sums(d in dims(), seed in any::<u64>()) {
        let psi = random_pure_state(d, seed).unwrap();
        let r = reduced_states(&psi).unwrap();
        prop_assert!(max_diff(r.a.matrix(), &reduce_by_hand(&psi, 0)) < 1e-12);
        prop_assert!(max_diff(r.b.matrix(), &reduce_by_hand(&psi, 1)) < 1e-12);
        prop_assert!(max_diff(r.c.matrix(), &reduce_by_hand(&psi, 2)) < 1e-12);
    }

    #[test]
    fn kron_trace_and_mixed_product(a in 1usize..4, b in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (ua, ub) = (random_unitary(a, &mut rng), random_unitary(b, &mut rng));
        let (va, vb) = (random_unitary(a, &mut rng), random_unitary(b, &mut rng));
        let k = kron(&ua, &ub);
        prop_assert!((k.trace() - ua.trace() * ub.trace()).norm() < 1e-12);
        let lhs = kron(&ua, &ub).matmul(&kron(&va, &vb));
        let rhs = kron(&ua.matmul(&va), &ub.matmul(&vb));
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn coset_relabeling_keeps_delta_s(da in 2usize..=3, db in 2usize..=3, seed in any::<u64>()) {
        let spec = random_spectrum(da, db, seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5555);
        let mut cells: Vec<usize> = (0..da * db).collect();
        cells.shuffle(&mut rng);
        let s = LatticeAssignment::new(da, db, cells.iter().map(|&c| (c / db, c % db)).collect()).unwrap();
        let mut rows: Vec<usize> = (0..da).collect();
        let mut cols: Vec<usize> = (0..db).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        let base = apply_assignment(&spec, &s).unwrap().delta_s;
        let moved = apply_assignment(&spec, &s.relabel(&rows, &cols).unwrap()).unwrap().delta_s;
        prop_assert!((base - moved).abs() < 1e-12);
    }

    #[test]
    fn rgnp_terminates_with_full_sets(k_a in 1usize..7, k_b in 1usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let numbers: Vec<f64> = (0..k_a * k_b).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
        let p = rgnp_indices(&PartitionInput::balanced(numbers.clone(), k_a, k_b).unwrap()).unwrap();
        prop_assert_eq!(p.sets.len(), k_a);
        let mut seen: Vec<usize> = p.sets.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..k_a * k_b).collect::<Vec<_>>());
        for s in &p.sets {
            prop_assert_eq!(s.len(), k_b);
        }
        let sums: Vec<f64> = p.sets.iter().map(|s| s.iter().map(|&i| numbers[i]).sum()).collect();
        prop_assert!(sums.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn gnp_within_classical_bounds_of_brute_force() {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    for trial in 0..1000 {
        let k = 2 + trial % 3;
        let n = k + rand::Rng::random_range(&mut rng, 0..=(8 - k));
        let numbers: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0.01..1.0)).collect();
        let g = gnp(&PartitionInput::new(numbers.clone(), k).unwrap()).unwrap();
        let (opt_max, opt_min) = brute_force_extremes(&numbers, k);
        let kf = k as f64;
        assert!(
            g.max_sum() <= (4.0 * kf - 1.0) / (3.0 * kf) * opt_max + 1e-12,
            "trial {trial}: max {} vs optimum {opt_max}",
            g.max_sum()
        );
        assert!(
            g.min_sum() >= (3.0 * kf - 1.0) / (4.0 * kf - 2.0) * opt_min - 1e-12,
            "trial {trial}: min {} vs optimum {opt_min}",
            g.min_sum()
        );
        assert!(g.max_sum() >= opt_max - 1e-12 && g.min_sum() <= opt_min + 1e-12);
    }
}
