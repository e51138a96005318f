use std::f64::consts::PI;

use hardyheat_core::forms::{
    bump_suite, dirichlet_form, gsr_terms, hardy_excess, hardy_form, integral_regimes, regime_prediction,
    semigroup_form_with, Interpolation, TestFunction,
};
use hardyheat_core::quad::{best_effort, integrate_breaks, Tolerance};
use hardyheat_core::{CouplingParams, PerturbedKernel, SeriesControl};

/// ∫₀^∞ k^α |(ℱ U u)(k)|² dk at ζ = 1, where J_{1/2}(x) = √(2/(πx)) sin x
/// turns the Fourier–Bessel transform into the sine transform of r·u(r).
fn spectral_energy_zeta_one(alpha: f64, u: &TestFunction, k_max: f64) -> f64 {
    let (a, b) = u.support();
    let transform = |k: f64| {
        let panels = 8 + (k * (b - a)) as usize;
        let pts: Vec<f64> = (0..=panels).map(|j| a + (b - a) * j as f64 / panels as f64).collect();
        let v = best_effort(integrate_breaks(|r| (k * r).sin() * r * u.value(r), &pts, &Tolerance::rel(1e-13).with_abs(1e-15)))
            .unwrap()
            .value;
        (2.0 / PI).sqrt() * v
    };
    let pts: Vec<f64> = (0..=k_max as usize).map(|j| j as f64).collect();
    best_effort(integrate_breaks(
        |k| {
            let f = transform(k);
            k.powf(alpha) * f * f
        },
        &pts,
        &Tolerance::rel(1e-10).with_abs(1e-300),
    ))
    .unwrap()
    .value
}

#[test]
fn dirichlet_form_matches_the_spectral_side() {
    let bump = TestFunction::smooth_bump(1.5, 1.0, 1.0).unwrap();
    let hat = TestFunction::hat(1.0, 1.0, 1.0).unwrap();
    // the hat's transform decays like k^{-2}, so its k^α-weighted tail beyond
    // k_max is O(k_max^{α-3}); α = 0.5 keeps that near 1e-7
    for (alpha, u, k_max) in [(1.0, &bump, 400.0), (1.5, &bump, 400.0), (0.5, &bump, 400.0), (0.5, &hat, 1000.0)] {
        let t0 = std::time::Instant::now();
        let e = dirichlet_form(1.0, alpha, u).unwrap();
        let t1 = t0.elapsed();
        let s = spectral_energy_zeta_one(alpha, u, k_max);
        eprintln!("alpha {alpha}: {} vs {s} ({:?} / {:?})", e.value, t1, t0.elapsed());
        assert!((e.value / s - 1.0).abs() < 1e-4, "alpha {alpha}: {} vs {s}", e.value);
    }
}

fn table(values: &[f64]) -> TestFunction {
    let nodes: Vec<f64> = (0..values.len()).map(|j| 0.6 + 0.15 * j as f64).collect();
    TestFunction::tabulated(nodes, values.to_vec(), Interpolation::Cubic).unwrap()
}

#[test]
fn zero_eta_ground_state_form_is_the_dirichlet_form() {
    let u = TestFunction::smooth_bump(1.0, 1.0, 1.0).unwrap();
    let e = dirichlet_form(1.0, 1.0, &u).unwrap();
    let i = hardy_form(CouplingParams::free(1.0, 1.0).unwrap(), &u).unwrap();
    assert!((i.value / e.value - 1.0).abs() < 1e-10);
    let (d, o) = e.decomposition.unwrap();
    assert!(d > 0.0 && o > 0.0 && ((d + o) / e.value - 1.0).abs() < 1e-14);
    assert_eq!(dirichlet_form(1.0, 1.0, &u.scaled(0.0)).unwrap().value, 0.0);
    assert!(dirichlet_form(1.0, 2.0, &u).is_err());
}

#[test]
fn quadratic_homogeneity_and_parallelogram_law() {
    let a = [0.0, 0.3, 1.0, 0.8, -0.2, 0.4, 0.0];
    let b = [0.0, -0.5, 0.1, 0.6, 0.9, 0.2, 0.0];
    let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let params = CouplingParams::new(1.0, 1.2, 0.3).unwrap();
    let f = |u: &TestFunction| hardy_form(params, u).unwrap();
    let (fu, fv) = (f(&table(&a)), f(&table(&b)));
    let (fs, fd) = (f(&table(&sum)), f(&table(&diff)));
    let lhs = fs.value + fd.value;
    let rhs = 2.0 * (fu.value + fv.value);
    let tol = fs.err_est + fd.err_est + 2.0 * (fu.err_est + fv.err_est);
    assert!((lhs - rhs).abs() <= tol.max(1e-8 * rhs), "{lhs} vs {rhs} (tol {tol})");
    let scaled = f(&table(&a).scaled(-3.0));
    assert!((scaled.value / (9.0 * fu.value) - 1.0).abs() < 1e-8);
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig { cases: 10, failure_persistence: None, ..Default::default() })]
    #[test]
    fn ground_state_form_is_nonnegative(
        inner in proptest::collection::vec(-2.0f64..2.0, 5),
        eta in -0.9f64..0.5,
    ) {
        let mut v = vec![0.0];
        v.extend(inner);
        v.push(0.0);
        let params = CouplingParams::new(1.0, 1.0, eta).unwrap();
        let i = hardy_form(params, &table(&v)).unwrap();
        proptest::prop_assert!(i.value >= -i.err_est, "{i:?}");
    }
}

#[test]
fn ground_state_representation_on_the_suite() {
    for (zeta, alpha) in [(1.0, 1.0), (1.5, 1.5), (0.5, 0.75)] {
        for eta in [0.5, -0.5] {
            let params = CouplingParams::new(zeta, alpha, eta).unwrap();
            for u in bump_suite() {
                let g = gsr_terms(params, &u).unwrap();
                assert!(
                    g.residual.abs() <= 1e-4 * g.dirichlet.value,
                    "zeta {zeta} alpha {alpha} eta {eta} {u:?}: {g:?}"
                );
                assert!(g.residual.abs() <= 10.0 * g.err_est + 1e-12 * g.dirichlet.value, "{g:?}");
            }
        }
    }
}

#[test]
fn hardy_inequality_is_sharp() {
    let zeta = 1.0;
    let alpha = 1.0;
    let kc = CouplingParams::free(zeta, alpha).unwrap().kappa_crit();
    for u in bump_suite() {
        let x = hardy_excess(zeta, alpha, kc, &u).unwrap();
        assert!(x.value >= -x.err_est, "{u:?}: {x:?}");
    }
    // r^{-η_c} times a bump in ln r: the ratio to the potential term tends to
    // κ_c as the log-width grows
    let eta_c = CouplingParams::free(zeta, alpha).unwrap().critical_eta();
    let wide = TestFunction::log_bump(1.0, 16.0, eta_c).unwrap();
    assert!(hardy_excess(zeta, alpha, kc, &wide).unwrap().value > 0.0);
    let x = hardy_excess(zeta, alpha, 1.05 * kc, &wide).unwrap();
    assert!(x.value + x.err_est < 0.0, "{x:?}");
}

fn richardson(e: [f64; 3]) -> f64 {
    let r1 = 2.0 * e[1] - e[0];
    let r2 = 2.0 * e[2] - e[1];
    (4.0 * r2 - r1) / 3.0
}

#[test]
fn semigroup_form_converges_to_the_dirichlet_form() {
    let params = CouplingParams::free(1.0, 1.0).unwrap();
    let k = PerturbedKernel::new(params, SeriesControl::default()).unwrap();
    let u = TestFunction::smooth_bump(1.0, 1.0, 1.0).unwrap();
    let at = |t: f64| semigroup_form_with(&k, t, &u).unwrap().value;
    let e = [at(0.5), at(0.25), at(0.125)];
    assert!(e[0] <= e[1] && e[1] <= e[2], "{e:?}");
    let limit = dirichlet_form(1.0, 1.0, &u).unwrap().value;
    let e = [at(1.0 / 32.0), at(1.0 / 64.0), at(1.0 / 128.0)];
    let x = richardson(e);
    assert!((x / limit - 1.0).abs() < 1e-3, "{x} vs {limit} from {e:?}");
    assert_eq!(semigroup_form_with(&k, 0.5, &u.scaled(0.0)).unwrap().value, 0.0);
}

#[test]
fn regimes_of_the_time_integrated_moment() {
    let (zeta, alpha, t) = (1.0, 1.0, 1.0);
    // δ = α with r^α ≫ t: t/r^α to leading order
    let r = 64.0;
    let v = integral_regimes(zeta, alpha, alpha, t, r).unwrap();
    assert!((v * r / t - 1.0).abs() < 0.05, "{}", v * r / t);
    for delta in [0.5, 1.0, 2.0] {
        let ratios: Vec<f64> = (-5..=5)
            .map(|j| {
                let r = 2f64.powi(j);
                integral_regimes(zeta, alpha, delta, t, r).unwrap() / regime_prediction(alpha, delta, t, r)
            })
            .collect();
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        eprintln!("delta {delta}: {lo} .. {hi}");
        assert!(lo > 0.0 && hi / lo < 10.0, "delta {delta}: {ratios:?}");
    }
    assert!(integral_regimes(zeta, alpha, 3.0, t, 1.0).is_err());
}

#[test]
fn perturbed_semigroup_form_converges_to_the_ground_state_form() {
    let params = CouplingParams::new(1.0, 1.0, 0.5).unwrap();
    let k = PerturbedKernel::new(params, SeriesControl::default()).unwrap();
    let u = TestFunction::smooth_bump(1.0, 1.0, 1.0).unwrap();
    let at = |t: f64| semigroup_form_with(&k, t, &u).unwrap().value;
    let e = [at(0.5), at(0.25), at(0.125)];
    assert!(e[0] <= e[1] && e[1] <= e[2], "{e:?}");
    let limit = hardy_form(params, &u).unwrap().value;
    let x = richardson([at(1.0 / 32.0), at(1.0 / 64.0), at(1.0 / 128.0)]);
    assert!((x / limit - 1.0).abs() < 1e-3, "{x} vs {limit}");
}
