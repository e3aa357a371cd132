use std::f64::consts::PI;

use edgestates::de_gennes::DeGennes;
use edgestates::model_ops::{
    count_curved_cylinder, count_half_cylinder_exact, count_half_cylinder_oracle, count_strip,
    curved_cylinder_main_term, curved_model_eig, half_cylinder_main_term, CurvedModelSpec, HalfCylinderSpec, SBoundary,
    StripGrid, StripSpec,
};
use edgestates::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dg() -> &'static DeGennes {
    DeGennes::shared()
}

#[test]
fn exact_count_equals_mode_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let spec = HalfCylinderSpec::new(
            rng.gen_range(0.5..7.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(1e-3..2e-2),
        )
        .unwrap();
        let lambda = rng.gen_range(0.0..0.98) * spec.h * spec.field;
        let a = count_half_cylinder_exact(dg(), &spec, lambda).unwrap();
        let b = count_half_cylinder_oracle(dg(), &spec, lambda).unwrap();
        assert_eq!(a, b, "{spec:?} lambda = {lambda}");
    }
}

#[test]
fn half_cylinder_counts_are_monotone() {
    let spec = HalfCylinderSpec::new(2.0 * PI, 1.0, 1e-3).unwrap();
    let mut last = 0;
    for k in 0..8 {
        let n = count_half_cylinder_exact(dg(), &spec, spec.h * (0.6 + 0.05 * k as f64)).unwrap();
        assert!(n >= last);
        last = n;
    }
    // in S the lattice count follows the interval length up to ±1
    let lambda = 0.8e-3;
    let w = dg().nu_width(0.8).unwrap();
    let mut prev: Option<(f64, u64)> = None;
    for k in 0..10 {
        let s = 3.0 + 0.4 * k as f64;
        let n = count_half_cylinder_exact(dg(), &HalfCylinderSpec::new(s, 1.0, 1e-3).unwrap(), lambda).unwrap();
        if let Some((s0, n0)) = prev {
            let grow = (s - s0) * w / (2.0 * PI * 1e-3f64.sqrt());
            assert!((n as f64 - n0 as f64 - grow).abs() <= 2.0);
        }
        prev = Some((s, n));
    }
}

#[test]
fn half_cylinder_estimate() {
    for h in [1e-2, 1e-3, 1e-4] {
        let spec = HalfCylinderSpec::new(2.0 * PI, 1.0, h).unwrap();
        let n = count_half_cylinder_exact(dg(), &spec, 0.8 * h).unwrap();
        let main = half_cylinder_main_term(dg(), &spec, 0.8).unwrap();
        assert!((h.sqrt() * n as f64 - main).abs() <= h.sqrt());
    }
    let spec = HalfCylinderSpec::new(1.0, 1.0, 1e-3).unwrap();
    assert!(matches!(
        half_cylinder_main_term(dg(), &spec, 1.0),
        Err(Error::InfiniteCount { .. })
    ));
}

#[test]
fn strip_below_theta0_is_empty() {
    for kappa in [0.0, 0.8] {
        let spec = StripSpec {
            s_len: 1.0,
            t_len: 0.5,
            field: 1.0,
            h: 0.01,
            kappa,
            bc_s: SBoundary::Dirichlet,
        };
        assert_eq!(
            count_strip(&spec, StripGrid::default(), 0.5 * spec.h * dg().theta0()).unwrap(),
            0
        );
    }
}

#[test]
fn periodic_strip_dominates_dirichlet_strip() {
    // same grid: extension by zero is an exact discrete form inclusion
    for kappa in [-0.5, 0.0, 0.5] {
        let spec = StripSpec {
            s_len: 1.0,
            t_len: 0.5,
            field: 1.0,
            h: 0.01,
            kappa,
            bc_s: SBoundary::Dirichlet,
        };
        let per = StripSpec {
            bc_s: SBoundary::Periodic,
            ..spec
        };
        for beta in [0.7, 0.8, 0.9, 0.99] {
            let lambda = beta * spec.h;
            let d = count_strip(&spec, StripGrid::default(), lambda).unwrap();
            let p = count_strip(&per, StripGrid::default(), lambda).unwrap();
            assert!(d <= p, "kappa {kappa} beta {beta}: {d} > {p}");
        }
    }
}

#[test]
fn periodic_strip_matches_curved_cylinder() {
    // both discretize the same operator; modes agree up to grid error
    for kappa in [-1.0, 0.0, 1.0] {
        let spec = StripSpec {
            s_len: 1.0,
            t_len: 0.5,
            field: 1.0,
            h: 0.01,
            kappa,
            bc_s: SBoundary::Periodic,
        };
        for beta in [0.7, 0.9] {
            let lambda = beta * spec.h;
            let grid = count_strip(
                &spec,
                StripGrid {
                    points_per_length: 20.0,
                },
                lambda,
            )
            .unwrap();
            let modes = count_curved_cylinder(dg(), &spec, lambda, None).unwrap().total;
            assert!(
                (grid as i64 - modes as i64).abs() <= 1,
                "kappa {kappa}: {grid} vs {modes}"
            );
        }
    }
}

fn perturbation_ratio(samples: &[(f64, f64, f64)], c: Option<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for &(xi, alpha, l) in samples {
        let n = 4000;
        for j in 0..2 {
            let flat = curved_model_eig(&CurvedModelSpec { xi, alpha: 0.0, l }, j, n).unwrap();
            let bent = curved_model_eig(&CurvedModelSpec { xi, alpha, l }, j, n).unwrap();
            let ratio = (bent - flat).abs() / (alpha.abs() * l * l * (1.0 + flat));
            if let Some(c) = c {
                assert!(ratio <= c, "xi {xi} alpha {alpha} L {l} j {j}: {ratio} > {c}");
            }
            worst = worst.max(ratio);
        }
    }
    worst
}

#[test]
fn curvature_perturbation_bound() {
    let train: Vec<(f64, f64, f64)> = [-2.0, -0.77, 0.0, 1.0]
        .iter()
        .flat_map(|&xi| [2.0, 5.0, 10.0].map(|l| (xi, 0.5 / (2.0 * l), l)))
        .collect();
    let c = 2.0 * perturbation_ratio(&train, None);
    let test: Vec<(f64, f64, f64)> = [-1.5, -0.3, 0.5]
        .iter()
        .flat_map(|&xi| [(3.0, -0.1), (7.0, 0.04), (4.0, -0.0625)].map(|(l, a)| (xi, a, l)))
        .collect();
    perturbation_ratio(&test, Some(c));
}

fn expansion_residual(xi: f64, alpha: f64) -> (f64, f64) {
    let c = &dg().constants;
    let l = 20.0;
    let e = curved_model_eig(&CurvedModelSpec { xi, alpha, l }, 0, 8000).unwrap();
    let d = xi - c.xi0;
    let r = e - c.theta0 - 3.0 * c.c1 * c.xi0.abs() * d * d + c.c1 * alpha;
    (r.abs(), d.abs().powi(3) + alpha.abs() * d.abs() + alpha * alpha)
}

#[test]
fn curved_ground_state_expansion() {
    // fit on a training grid, check on an interleaved one
    const FLOOR: f64 = 1e-6;
    let mut c_fit: f64 = 0.0;
    for d in [-0.1, -0.05, 0.05, 0.1] {
        for alpha in [-0.02, 0.0, 0.02] {
            let (r, s) = expansion_residual(dg().xi0() + d, alpha);
            c_fit = c_fit.max((r - FLOOR).max(0.0) / s);
        }
    }
    let c = 2.0 * c_fit;
    assert!(c < 50.0, "fitted constant {c}");
    for d in [-0.08, -0.02, 0.0, 0.03, 0.07] {
        for alpha in [-0.015, -0.005, 0.01] {
            let (r, s) = expansion_residual(dg().xi0() + d, alpha);
            assert!(r <= c * s + FLOOR, "d {d} alpha {alpha}: {r} > {}", c * s);
        }
    }
}

#[test]
fn concave_cylinder_count_stays_bounded() {
    // κ + κ₀ < 0: no main term, counts do not grow
    for h in [1e-3, 1e-4, 1e-5] {
        let spec = StripSpec {
            s_len: 2.0 * PI,
            t_len: 12.0 * f64::sqrt(h),
            field: 1.0,
            h,
            kappa: -1.0,
            bc_s: SBoundary::Periodic,
        };
        let lambda = h * dg().theta0() + h.powf(1.5) * dg().c1() * 0.5;
        let c = count_curved_cylinder(dg(), &spec, lambda, None).unwrap();
        assert!(c.total <= 2);
        assert_eq!(curved_cylinder_main_term(dg(), 2.0 * PI, h, -1.0, 0.5), 0.0);
    }
}

#[test]
fn flat_truncated_cylinder_matches_exact() {
    for h in [1e-2, 1e-3] {
        for beta in [0.7, 0.9] {
            let spec = StripSpec {
                s_len: 2.0 * PI,
                t_len: 10.0 * f64::sqrt(h),
                field: 1.0,
                h,
                kappa: 0.0,
                bc_s: SBoundary::Periodic,
            };
            let c = count_curved_cylinder(dg(), &spec, beta * h, None).unwrap();
            let e =
                count_half_cylinder_exact(dg(), &HalfCylinderSpec::new(2.0 * PI, 1.0, h).unwrap(), beta * h).unwrap();
            assert!(
                (c.total as i64 - e as i64).abs() <= 1,
                "h {h} beta {beta}: {} vs {e}",
                c.total
            );
            // excluded edges have no eigenvalue even slightly above the level
            assert!(c.per_mode.iter().all(|(n, _)| *n > c.window.0 && *n < c.window.1));
        }
    }
}
