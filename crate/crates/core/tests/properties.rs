use convden::certificate::{gap_bound, CertificateEntry, CertificateState, DualBall, SaddleGeometry};
use convden::operator::ConvolutionOperator;
use convden::prox::{
    project_l1_ball_complex, project_l2_ball, prox_composite, prox_pen_q1, BregmanPoint, ProxTerm, ProximalSetup,
};
use convden::signal::{convolve_oracle, dft_vec, idft, restrict, vec, vec_adjoint, zero_pad};
use convden::{ComplexSignal, SpectralVector, C64};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn cvec(min: usize, max: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(), min..=max)
}

fn l2(z: &[C64]) -> f64 {
    z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn hermitian(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Observation half-length with a matching observation and two spectral vectors.
fn operator_case() -> impl Strategy<Value = (usize, Vec<C64>, Vec<C64>, Vec<C64>)> {
    (0usize..20).prop_flat_map(|n| (Just(n), cvec(2 * n + 1, 2 * n + 1), cvec(n + 1, n + 1), cvec(n + 1, n + 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(x in cvec(1, 80)) {
        let y = dft_vec(&x).unwrap();
        let (a, b) = (l2(&x), l2(&y));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn dft_round_trips(x in cvec(1, 80)) {
        let there = idft(&dft_vec(&x).unwrap()).unwrap();
        let back = dft_vec(&idft(&x).unwrap()).unwrap();
        let s = l2(&x).max(1.0);
        for ((a, b), c) in x.iter().zip(&there).zip(&back) {
            prop_assert!((a - b).norm() <= 1e-12 * s);
            prop_assert!((a - c).norm() <= 1e-12 * s);
        }
    }

    #[test]
    fn vec_is_an_isometry((a, b) in (1usize..30).prop_flat_map(|k| (cvec(k, k), cvec(k, k)))) {
        let real = vec(&a).dot(&vec(&b));
        prop_assert!((real - hermitian(&a, &b).re).abs() <= 1e-12 * (l2(&a) * l2(&b)).max(1.0));
        prop_assert_eq!(vec_adjoint(&vec(&a)), a);
    }

    #[test]
    fn restrict_and_pad_are_adjoint(
        (n, long, short) in (0usize..20, 0usize..10)
            .prop_flat_map(|(n, extra)| (Just(n), cvec(n + 1 + extra, n + 1 + extra), cvec(n + 1, n + 1)))
    ) {
        let lhs = hermitian(&restrict(&long, n).unwrap(), &short);
        let rhs = hermitian(&long, &zero_pad(&short, long.len()).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-14 * (l2(&long) * l2(&short)).max(1.0));
    }

    #[test]
    fn impulse_convolution_is_identity(y in (0usize..15).prop_flat_map(|n| cvec(2 * n + 1, 2 * n + 1))) {
        let n = (y.len() - 1) / 2;
        let ys = ComplexSignal::two_sided(y.clone()).unwrap();
        let delta = ComplexSignal::one_sided(vec![C64::new(1.0, 0.0)]).unwrap();
        let out = convolve_oracle(&delta, &ys, n).unwrap();
        prop_assert_eq!(&out[..], &y[n..]);
    }

    #[test]
    fn operator_is_linear_and_adjoint(
        (n, y, u, w) in operator_case(),
        alpha in -3.0..3.0f64,
        beta in -3.0..3.0f64,
    ) {
        let op = ConvolutionOperator::build(&ComplexSignal::two_sided(y).unwrap()).unwrap();
        let (u, w) = (SpectralVector::from_complex(&u), SpectralVector::from_complex(&w));
        let lhs = op.apply(&u.combine(alpha, &w, beta)).unwrap();
        let rhs = op.apply(&u).unwrap().combine(alpha, &op.apply(&w).unwrap(), beta);
        let scale = op.operator_norm_bound() * (u.norm2() + w.norm2()) * 3.0 + 1.0;
        prop_assert!(lhs.sub(&rhs).norm2() <= 1e-12 * scale);

        let a = op.apply(&u).unwrap().dot(&w);
        let b = u.dot(&op.apply_adjoint(&w).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * (op.operator_norm_bound() * u.norm2() * w.norm2()).max(1.0));
        prop_assert!(op.apply(&u).unwrap().norm2() <= op.operator_norm_bound() * u.norm2() * (1.0 + 1e-12) + 1e-300);
        prop_assert_eq!(op.diag().len(), 2 * n + 1);
    }

    #[test]
    fn projections_land_in_their_balls(z in cvec(1, 40), radius in 0.0..5.0f64) {
        let p1 = project_l1_ball_complex(&z, radius).unwrap();
        prop_assert!(p1.iter().map(|v| v.norm()).sum::<f64>() <= radius * (1.0 + 1e-12) + 1e-12);
        let p2 = project_l2_ball(&z, radius).unwrap();
        prop_assert!(l2(&p2) <= radius * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn bregman_point_caches_dgf(z in cvec(1, 40), l1 in any::<bool>()) {
        let setup = if l1 { ProximalSetup::complex_l1(z.len()) } else { ProximalSetup::l2(z.len()) }.unwrap();
        let u = SpectralVector::from_complex(&z);
        let p = BregmanPoint::new(&setup, u.clone()).unwrap();
        let fresh = setup.dgf(&u).unwrap();
        prop_assert!((p.dgf_value() - fresh).abs() <= 1e-12 * fresh.max(1.0));
        prop_assert!(setup.bregman(&p, &u).unwrap().abs() <= 1e-10 * fresh.max(1.0));
    }

    #[test]
    fn q1_prox_first_order_condition(z in cvec(1, 12), thr in 0.0..5.0f64, l1 in any::<bool>()) {
        // 0 in z + omega'(x) + thr d||x||_1
        let setup = if l1 { ProximalSetup::complex_l1(z.len()) } else { ProximalSetup::l2(z.len()) }.unwrap();
        let x = prox_pen_q1(&setup, &z, thr).unwrap();
        let g = setup.dgf_grad(&SpectralVector::from_complex(&x)).unwrap().to_complex();
        for j in 0..z.len() {
            let base = z[j] + g[j];
            let s = z[j].norm().max(1.0);
            if x[j].norm() > 0.0 {
                prop_assert!((base + x[j] / x[j].norm() * thr).norm() <= 1e-8 * s);
            } else {
                prop_assert!(base.norm() <= thr + 1e-8 * s);
            }
        }
    }

    #[test]
    fn composite_ball_prox_is_feasible(
        (c, g) in (1usize..20).prop_flat_map(|k| (cvec(k, k), cvec(k, k))),
        radius in 0.01..3.0f64,
        l1 in any::<bool>(),
    ) {
        let k = c.len();
        let setup = if l1 { ProximalSetup::complex_l1(k) } else { ProximalSetup::l2(k) }.unwrap();
        let center = project_l1_ball_complex(&c, radius).unwrap();
        let center = BregmanPoint::new(&setup, SpectralVector::from_complex(&center)).unwrap();
        let out = prox_composite(&setup, &center, &SpectralVector::from_complex(&g), &ProxTerm::L1Ball { radius }).unwrap();
        prop_assert!(out.complex_l1() <= radius * (1.0 + 1e-8) + 1e-12);
    }

    #[test]
    fn certificate_weights_are_a_distribution(weights in prop::collection::vec(0.01..10.0f64, 1..30)) {
        let geom = SaddleGeometry::new(Some(1.0), 0.0, DualBall::L1).unwrap();
        let mut s = CertificateState::new(2, 2);
        let one = SpectralVector::from_real(vec![1.0, 0.0]).unwrap();
        for &w in &weights {
            let e = CertificateEntry::new(&geom, one.clone(), one.clone(), one.clone(), one.clone(), w);
            s.update(&e).unwrap();
        }
        // averaging a constant returns it exactly when the weights sum to one
        prop_assert!((s.averaged_u().as_slice()[0] - 1.0).abs() <= 1e-12);
        prop_assert!(gap_bound(&s, &geom) >= 0.0);
        let total: f64 = weights.iter().sum();
        prop_assert!((s.weight_total() - total).abs() <= 1e-12 * total);
    }
}
