mod oracles;

use convden::operator::{ConvolutionOperator, LinearMap};
use convden::signal::{convolve_oracle, dft_vec, idft};
use convden::{ComplexSignal, SpectralVector, C64};
use oracles::*;

fn rel_err(a: &SpectralVector, b: &SpectralVector) -> f64 {
    a.sub(b).norm2() / b.norm2().max(1e-300)
}

#[test]
fn transforms_match_naive_sums() {
    let mut r = rng(1);
    for len in [1, 2, 5, 9, 17, 33, 64, 129] {
        let x = random_complex(&mut r, len);
        assert!(max_abs_diff(&dft_vec(&x).unwrap(), &naive_dft(&x)) < 1e-10 * (len as f64));
        assert!(max_abs_diff(&idft(&x).unwrap(), &naive_idft(&x)) < 1e-10 * (len as f64));
    }
}

#[test]
fn fft_path_matches_time_domain_chain() {
    let mut r = rng(2);
    for n in [0, 1, 4, 16, 31, 64] {
        for _ in 0..5 {
            let y = random_complex(&mut r, 2 * n + 1);
            let op = ConvolutionOperator::build(&ComplexSignal::two_sided(y.clone()).unwrap()).unwrap();
            let u = random_spectral(&mut r, n + 1);
            let fast = op.apply(&u).unwrap();
            assert!(rel_err(&fast, &brute_apply(&y, n, &u)) < 1e-10, "n={n}");
        }
    }
}

#[test]
fn library_convolution_oracle_agrees_with_naive_sum() {
    let mut r = rng(3);
    let n = 16;
    let y = random_complex(&mut r, 2 * n + 1);
    let phi = random_complex(&mut r, n + 1);
    let lib = convolve_oracle(
        &ComplexSignal::one_sided(phi.clone()).unwrap(),
        &ComplexSignal::two_sided(y.clone()).unwrap(),
        n,
    )
    .unwrap();
    assert!(max_abs_diff(&lib, &naive_convolve(&phi, &y, n)) < 1e-12);
}

#[test]
fn adjoint_against_dense_transpose() {
    let mut r = rng(4);
    let n = 6;
    let y = random_complex(&mut r, 2 * n + 1);
    let op = ConvolutionOperator::build(&ComplexSignal::two_sided(y.clone()).unwrap()).unwrap();
    let cols = dense_matrix(&y, n);
    let v = random_spectral(&mut r, n + 1);
    let expected: Vec<f64> = cols.iter().map(|c| real_dot(c, v.as_slice())).collect();
    let got = op.apply_adjoint(&v).unwrap();
    for (a, b) in got.as_slice().iter().zip(&expected) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn norm_bound_dominates_dense_norm() {
    let mut r = rng(5);
    for n in [0, 3, 8, 12] {
        let y = random_complex(&mut r, 2 * n + 1);
        let op = ConvolutionOperator::build(&ComplexSignal::two_sided(y.clone()).unwrap()).unwrap();
        let exact = spectral_norm(&dense_matrix(&y, n));
        assert!(exact <= op.operator_norm_bound() * (1.0 + 1e-9), "n={n}: {exact} > {}", op.operator_norm_bound());
        assert_eq!(op.norm_bound(), op.operator_norm_bound());
    }
}

#[test]
fn norm_1_to_inf_matches_dense_columns() {
    let mut r = rng(6);
    let n = 9;
    let y = random_complex(&mut r, 2 * n + 1);
    let op = ConvolutionOperator::build(&ComplexSignal::two_sided(y.clone()).unwrap()).unwrap();
    // complex column j is the image of e_j = 1 + 0i, i.e. real column 2j
    let expected = dense_matrix(&y, n)
        .iter()
        .step_by(2)
        .flat_map(|c| c.chunks(2).map(|p| p[0].hypot(p[1])).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    assert!((op.norm_1_to_inf() - expected).abs() < 1e-10);
}

#[test]
fn periodic_signal_attains_exact_norm() {
    // noiseless (n+1)-periodic observations: the 1 -> inf norm equals sqrt(n+1) ||F_n x||_inf
    let mut r = rng(7);
    for n in [3, 7, 12] {
        let period = random_complex(&mut r, n + 1);
        let x: Vec<C64> = (-(n as i64)..=n as i64)
            .map(|t| period[t.rem_euclid(n as i64 + 1) as usize])
            .collect();
        let op = ConvolutionOperator::build(&ComplexSignal::two_sided(x).unwrap()).unwrap();
        let peak = naive_dft(&period).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let expected = ((n + 1) as f64).sqrt() * peak;
        assert!((op.norm_1_to_inf() - expected).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn impulse_and_zero_observations() {
    let n = 5;
    let mut y = vec![C64::new(0.0, 0.0); 2 * n + 1];
    y[n] = C64::new(1.0, 0.0);
    let op = ConvolutionOperator::build(&ComplexSignal::two_sided(y).unwrap()).unwrap();
    assert!((op.norm_1_to_inf() - 1.0).abs() < 1e-12);
    let mut r = rng(8);
    let u = random_spectral(&mut r, n + 1);
    assert!(op.apply(&u).unwrap().sub(&u).norm2() < 1e-12);

    let zero = ConvolutionOperator::build(&ComplexSignal::zeros(-(n as i64), 2 * n + 1).unwrap()).unwrap();
    assert_eq!(zero.norm_1_to_inf(), 0.0);
    assert_eq!(zero.apply(&u).unwrap().norm2(), 0.0);
}

#[test]
fn impulse_filter_reproduces_offset() {
    let mut r = rng(9);
    let n = 11;
    let y = random_observation(&mut r, n);
    let op = ConvolutionOperator::build(&y).unwrap();
    let mut delta = vec![C64::new(0.0, 0.0); n + 1];
    delta[0] = C64::new(1.0, 0.0);
    let u = SpectralVector::from_complex(&dft_vec(&delta).unwrap());
    assert!(op.apply(&u).unwrap().sub(op.b()).norm2() < 1e-12);
}

#[test]
fn bad_support_is_rejected() {
    let y = ComplexSignal::new(0, vec![C64::new(1.0, 0.0); 5]).unwrap();
    assert!(ConvolutionOperator::build(&y).is_err());
    let op = ConvolutionOperator::build(&ComplexSignal::two_sided(vec![C64::new(1.0, 0.0); 5]).unwrap()).unwrap();
    assert!(op.apply(&SpectralVector::zeros(2)).is_err());
}
