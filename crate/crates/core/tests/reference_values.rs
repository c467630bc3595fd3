use qmi_core::npp::{rgnp, PartitionInput};
use qmi_core::states::{random_pure_state, rho_c, Dims};

const EIGENVALUES_D6: [f64; 36] = [
    0.184233, 0.172701, 0.167875, 0.130484, 0.007168, 0.006866, 0.005525, 0.00415, 0.002577, 0.002313, 0.101274,
    0.009832, 0.008887, 0.008416, 0.007561, 0.006997, 0.006116, 0.004571, 0.003275, 0.000357, 0.000128, 0.043433,
    0.011384, 0.011262, 0.010695, 0.010573, 0.010166, 0.010124, 0.009745, 0.008469, 0.008223, 0.007007, 0.006151,
    0.005061, 0.003894, 0.002506,
];

#[test]
fn rgnp_on_the_reference_d6_spectrum() {
    let expected: [[f64; 6]; 6] = [
        [0.184233, 0.007007, 0.005061, 0.003894, 0.002313, 0.000128],
        [0.172701, 0.009745, 0.008223, 0.006116, 0.003275, 0.000357],
        [0.167875, 0.010124, 0.008469, 0.006151, 0.004571, 0.002506],
        [0.130484, 0.007168, 0.006866, 0.005525, 0.00415, 0.002577],
        [0.101274, 0.009832, 0.008887, 0.008416, 0.007561, 0.006997],
        [0.043433, 0.011384, 0.011262, 0.010695, 0.010573, 0.010166],
    ];
    let input = PartitionInput::balanced(EIGENVALUES_D6.to_vec(), 6, 6).unwrap();
    let start = std::time::Instant::now();
    let got = rgnp(&input).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(got.sets, expected.map(|s| s.to_vec()).to_vec());
    assert!(elapsed.as_millis() < 10, "{elapsed:?}");
}

/// Mean purity of a Haar-random reduced state: `(d_A + d_R) / (d_A d_R + 1)`.
#[test]
fn haar_states_have_the_expected_mean_purity() {
    let (d_keep, d_rest) = (3usize, 4usize);
    // party C kept; A and B together form the rest
    let dims = Dims::new(2, 2, d_keep);
    let n = 10_000;
    let purities: Vec<f64> = (0..n)
        .map(|seed| {
            let rho = rho_c(&random_pure_state(dims, seed).unwrap());
            let m = rho.matrix();
            m.matmul(m).trace().re
        })
        .collect();
    let mean = purities.iter().sum::<f64>() / n as f64;
    let var = purities.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sigma = (var / n as f64).sqrt();
    let expected = (d_keep + d_rest) as f64 / (d_keep * d_rest + 1) as f64;
    assert!((mean - expected).abs() < 3.0 * sigma, "mean {mean}, expected {expected}, sigma {sigma}");
}
