use kinklab_core::minkowski::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn velocity(max: f64) -> impl Strategy<Value = Vec<f64>> {
    (1usize..=3).prop_flat_map(move |n| {
        prop::collection::vec(-1.0..1.0f64, n).prop_map(move |raw| {
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= max {
                raw
            } else {
                raw.iter().map(|x| x * max / norm).collect()
            }
        })
    })
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n + 1)
}

fn sym(size: usize) -> impl Strategy<Value = SymTensor<f64>> {
    prop::collection::vec(-1.0..1.0f64, size * size).prop_map(move |v| {
        let mut t = SymTensor::zeros(size);
        for i in 0..size {
            for j in i..size {
                t.set(i, j, v[i * size + j]);
            }
        }
        t
    })
}

/// Real parts of the eigenvalues of ηA from nalgebra's Schur decomposition.
fn oracle_eigs(t: &SymTensor<f64>) -> (Vec<f64>, f64) {
    let m = t.lower_first();
    let s = m.size();
    let d = DMatrix::from_fn(s, s, |i, j| m.get(i, j));
    let ev = d.complex_eigenvalues();
    let mut re: Vec<f64> = ev.iter().map(|c| c.re).collect();
    re.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let im = ev.iter().fold(0.0f64, |a, c| a.max(c.im.abs()));
    (re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn boosts_preserve_the_inner_product((v, a) in velocity(0.99).prop_flat_map(|v| { let n = v.len(); (Just(v), vector(n)) })) {
        let b = boost(&v).unwrap();
        let x = MinkVector::from_components(&a).unwrap();
        let y = b.apply(&x).unwrap();
        let before = mink_inner(&x, &x).unwrap();
        let after = mink_inner(&y, &y).unwrap();
        let scale = y.euclidean_norm_sq().max(1.0);
        prop_assert!((before - after).abs() <= 1e-10 * scale, "{before} vs {after}");
    }

    #[test]
    fn boost_matrices_are_lorentz(v in velocity(0.99)) {
        let b = boost(&v).unwrap();
        let s = v.len() + 1;
        let lhs = b.matrix.transpose().mul(&Mat::eta(s)).mul(&b.matrix);
        prop_assert!(lhs.max_abs_diff(&Mat::eta(s)) <= 1e-12 * b.gamma * b.gamma);
    }

    #[test]
    fn spectrum_matches_dense_oracle(t in (2usize..=4).prop_flat_map(sym)) {
        let ours = eig_eta_selfadjoint(&t);
        let (re, im) = oracle_eigs(&t);
        if im < 1e-6 && ours.real {
            for (a, b) in ours.values.iter().zip(&re) {
                prop_assert!((a - b).abs() <= 1e-8, "{:?} vs {:?}", ours.values, re);
            }
        }
        if im > 1e-6 {
            prop_assert!(!ours.real);
        }
    }

    #[test]
    fn spectrum_is_lorentz_invariant(
        (d, v1, v2) in (1usize..=3).prop_flat_map(|n| (
            prop::collection::vec(-2.0..2.0f64, n + 1),
            prop::collection::vec(-0.5..0.5f64, n),
            prop::collection::vec(-0.5..0.5f64, n),
        ))
    ) {
        // real spectrum by construction: a boosted diagonal tensor
        let t = SymTensor::diag(&d).congruence(&boost(&v1).unwrap().matrix);
        let mut sorted = d.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // well-separated spectra only: root conditioning degrades near multiple roots
        let gap = sorted.windows(2).fold(f64::INFINITY, |m, w| m.min(w[0] - w[1]));
        prop_assume!(gap > 1e-2);
        let a = eig_eta_selfadjoint(&t);
        let c = eig_eta_selfadjoint(&t.congruence(&boost(&v2).unwrap().matrix));
        prop_assert!(a.real && c.real);
        for (x, y) in a.values.iter().zip(&c.values) {
            prop_assert!((x - y).abs() <= 1e-8, "{:?} vs {:?}", a.values, c.values);
        }
    }

    #[test]
    fn causal_class_is_boost_invariant((v, a) in velocity(0.99).prop_flat_map(|v| { let n = v.len(); (Just(v), vector(n)) })) {
        let b = boost(&v).unwrap();
        let x = MinkVector::from_components(&a).unwrap();
        let y = b.apply(&x).unwrap();
        let q = mink_inner(&x, &x).unwrap();
        let scale = x.euclidean_norm_sq().max(y.euclidean_norm_sq());
        prop_assume!(q.abs() > 10.0 * DEFAULT_TOL_NULL * scale);
        prop_assert_eq!(causal_classify(&x, DEFAULT_TOL_NULL), causal_classify(&y, DEFAULT_TOL_NULL));
    }

    #[test]
    fn char_poly_roots_reproduce_trace(t in (2usize..=4).prop_flat_map(sym)) {
        let s = eig_eta_selfadjoint(&t);
        if s.real {
            let sum: f64 = s.values.iter().sum();
            prop_assert!((sum - t.eta_trace()).abs() <= 1e-8);
        }
    }
}
