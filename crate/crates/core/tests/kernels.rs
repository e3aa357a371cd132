use edgestates::band_eig::{
    banded_inertia, bisect_eigenvalue, dense_eigs_oracle, sturm_count, BandedHermitian, DenseHermitian, SymTridiag,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn oracle_count(eig: &[f64], lambda: f64) -> usize {
    eig.iter().filter(|&&e| e < lambda).count()
}

/// Shifts well separated from every oracle eigenvalue.
fn probe_levels(eig: &[f64]) -> Vec<f64> {
    let mut out = vec![eig[0] - 1.0, eig[eig.len() - 1] + 1.0];
    for w in eig.windows(2) {
        if w[1] - w[0] > 1e-8 * (1.0 + w[1].abs()) {
            out.push(0.5 * (w[0] + w[1]));
        }
    }
    out
}

fn tridiag_strategy() -> impl Strategy<Value = SymTridiag> {
    (1usize..=200).prop_flat_map(|n| {
        (
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-5.0f64..5.0, n - 1),
        )
            .prop_map(|(d, e)| SymTridiag::new(d, e).unwrap())
    })
}

fn banded_strategy() -> impl Strategy<Value = BandedHermitian> {
    (2usize..=60, 1usize..=6).prop_flat_map(|(n, b)| {
        let b = b.min(n - 1);
        let len = n * (b + 1);
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), len).prop_map(move |vals| {
            let mut a = BandedHermitian::zeros(n, b).unwrap();
            for j in 0..n {
                for d in 0..=b {
                    if j + d < n {
                        let (re, im) = vals[j * (b + 1) + d];
                        let v = if d == 0 {
                            Complex64::new(re, 0.0)
                        } else {
                            Complex64::new(re, im)
                        };
                        a.set_lower(j + d, j, v).unwrap();
                    }
                }
            }
            a
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, .. ProptestConfig::default() })]

    #[test]
    fn sturm_matches_dense_oracle(t in tridiag_strategy()) {
        let eig = dense_eigs_oracle(&t.to_dense()).unwrap();
        for lambda in probe_levels(&eig) {
            prop_assert_eq!(sturm_count(&t, lambda), oracle_count(&eig, lambda));
        }
    }

    #[test]
    fn sturm_sweep_covers_spectrum(t in tridiag_strategy(), k in 0usize..64) {
        let (lo, hi) = t.gershgorin();
        prop_assert_eq!(sturm_count(&t, lo - 1.0), 0);
        prop_assert_eq!(sturm_count(&t, hi + 1.0), t.dim());
        let mut last = 0;
        for j in 0..=k {
            let lambda = lo + (hi - lo) * j as f64 / k.max(1) as f64;
            let c = sturm_count(&t, lambda);
            prop_assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn bisection_hits_oracle(t in tridiag_strategy(), k_frac in 0.0f64..1.0) {
        let eig = dense_eigs_oracle(&t.to_dense()).unwrap();
        let k = ((eig.len() - 1) as f64 * k_frac) as usize;
        let tol = 1e-9;
        let e = bisect_eigenvalue(&t, k, tol).unwrap();
        let (lo, hi) = t.gershgorin();
        prop_assert!((e - eig[k]).abs() <= tol + 1e-10 * (hi - lo).max(1.0));
    }

    #[test]
    fn banded_matches_dense_oracle(a in banded_strategy()) {
        let eig = dense_eigs_oracle(&a.to_dense()).unwrap();
        let mut last = 0;
        for lambda in { let mut v = probe_levels(&eig); v.sort_by(f64::total_cmp); v } {
            let r = banded_inertia(&a, lambda).unwrap();
            let inertia = r.inertia;
            prop_assert_eq!(inertia.n_neg + inertia.n_zero + inertia.n_pos, a.dim());
            prop_assert_eq!(inertia.n_neg, oracle_count(&eig, lambda + r.shift));
            prop_assert!(inertia.n_neg >= last);
            last = inertia.n_neg;
        }
    }
}

#[test]
fn documented_small_cases() {
    let t = SymTridiag::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]).unwrap();
    assert_eq!(sturm_count(&t, 2.5), 2);
    let t = SymTridiag::new(vec![2.0, 2.0], vec![-1.0]).unwrap();
    assert_eq!(sturm_count(&t, 2.0), 1);
    assert!((bisect_eigenvalue(&t, 1, 1e-12).unwrap() - 3.0).abs() < 1e-12);
    let e = dense_eigs_oracle(&DenseHermitian::identity(3)).unwrap();
    assert_eq!(e, vec![1.0, 1.0, 1.0]);
    let i = Complex64::i();
    let a = DenseHermitian::from_rows(2, vec![Complex64::new(0.0, 0.0), i, -i, Complex64::new(0.0, 0.0)]).unwrap();
    let e = dense_eigs_oracle(&a).unwrap();
    assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
    assert!(dense_eigs_oracle(&DenseHermitian::zeros(201)).is_err());
}
