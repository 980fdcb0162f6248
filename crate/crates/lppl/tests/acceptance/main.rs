//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with `--nocapture`). Tolerances and configurations come from
//! the pre-registered [`fixtures`] module.

mod fixtures;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lppl::calibrate::{
    self, fit, legacy_fit, legacy_s1, minimize_mw, CalibConfig, FitResult, FitWindow,
};
use lppl::data::{synth_generate, PriceSeries, SynthSpec};
use lppl::linear::{build_basis, cost_f, solve_linear4};
use lppl::model::{cartesian_to_phase, phase_to_cartesian, LpplParams, PhaseParams};
use lppl::xsection::{cross_section, Axis, AxisRange, FixedPoint, XSectionSpec};

use fixtures as fx;

fn truth() -> PhaseParams {
    PhaseParams::new(
        fx::TRUTH_TC,
        fx::TRUTH_M,
        fx::TRUTH_OMEGA,
        fx::TRUTH_A,
        fx::TRUTH_B,
        fx::TRUTH_C,
        fx::TRUTH_PHI,
    )
}

fn synth(sigma: f64, seed: u64) -> (PriceSeries, FitWindow) {
    let spec = SynthSpec { params: truth(), n_points: fx::N_POINTS, noise_sigma: sigma, rng_seed: seed };
    (synth_generate(&spec).unwrap(), FitWindow::new(0, fx::N_POINTS - 1))
}

fn default_config() -> CalibConfig {
    CalibConfig::new(fx::SEED)
}

/// Independent oracle for the phase-expansion identity: the legacy cost
/// minimized over phi by a 720-point grid scan refined with golden
/// section inside the bracketing step. Touches only the three-parameter
/// solve route.
fn min_s1_over_phi(
    series: &PriceSeries,
    window: FitWindow,
    t_c: f64,
    m: f64,
    omega: f64,
) -> f64 {
    let s1 = |phi: f64| legacy_s1(series, window, t_c, m, omega, phi).unwrap();
    let step = std::f64::consts::TAU / 720.0;
    let (mut best_phi, mut best) = (0.0, f64::INFINITY);
    for k in 0..720 {
        let phi = step * k as f64;
        let s = s1(phi);
        if s < best {
            best = s;
            best_phi = phi;
        }
    }
    let (mut lo, mut hi) = (best_phi - step, best_phi + step);
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut x1, mut x2) = (hi - INV_PHI * (hi - lo), lo + INV_PHI * (hi - lo));
    let (mut f1, mut f2) = (s1(x1), s1(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = s1(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = s1(x2);
        }
    }
    best.min(f1).min(f2)
}

fn recovers(result: &FitResult, tol_tc: f64, tol_m: f64, tol_omega: f64) -> bool {
    (result.params.t_c - fx::TRUTH_TC).abs() <= tol_tc
        && (result.params.m - fx::TRUTH_M).abs() <= tol_m
        && (result.params.omega - fx::TRUTH_OMEGA).abs() <= tol_omega
}

#[test]
fn criterion_1_phase_equivalence_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(fx::SEED);
    let mut worst = 0.0f64;
    for series_seed in 0..5u64 {
        let sigma = if series_seed % 2 == 0 { 0.0 } else { 0.01 };
        let (series, window) = synth(sigma, 100 + series_seed);
        for _ in 0..10 {
            let t_c = window.end_time() + rng.gen_range(2.0..80.0);
            let m = rng.gen_range(0.05..1.0);
            let omega = rng.gen_range(4.0..14.0);
            let four = calibrate::f1(&series, window, t_c, m, omega).unwrap();
            let oracle = min_s1_over_phi(&series, window, t_c, m, omega);
            let rel = (four - oracle).abs() / (1.0 + four);
            worst = worst.max(rel);
            assert!(
                rel <= 1e-6,
                "phase equivalence violated at (t_c={t_c}, m={m}, omega={omega}): \
                 F1={four:.6e} oracle={oracle:.6e} rel={rel:.3e}"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "oracle took {elapsed:?}, budget 60 s");
    println!(
        "acceptance 1 (phase-equivalence oracle, 50 triples x 5 series): pass \
         (worst rel {worst:.2e}, {elapsed:.1?})"
    );
}

#[test]
fn criterion_2_noiseless_recovery() {
    let started = Instant::now();
    let (series, window) = synth(0.0, 1);
    let result = fit(&series, window, &default_config()).unwrap();
    let elapsed = started.elapsed();

    let cart = truth().cartesian_view();
    assert!((result.params.t_c - fx::TRUTH_TC).abs() <= 0.5, "t_c {}", result.params.t_c);
    assert!((result.params.m - fx::TRUTH_M).abs() <= 1e-3, "m {}", result.params.m);
    assert!((result.params.omega - fx::TRUTH_OMEGA).abs() <= 1e-2, "omega {}", result.params.omega);
    assert!((result.params.a - cart.a).abs() <= 1e-3, "A {}", result.params.a);
    assert!((result.params.b - cart.b).abs() <= 1e-3, "B {}", result.params.b);
    assert!((result.params.c1 - cart.c1).abs() <= 1e-3, "C1 {}", result.params.c1);
    assert!((result.params.c2 - cart.c2).abs() <= 1e-3, "C2 {}", result.params.c2);
    assert!(result.cost <= 1e-12, "cost {}", result.cost);
    assert!(result.qualification.qualified);
    assert!(elapsed.as_secs_f64() < 30.0, "fit took {elapsed:?}, budget 30 s");
    println!(
        "acceptance 2 (noiseless recovery, default config): pass \
         (cost {:.2e}, {elapsed:.1?})",
        result.cost
    );
}

#[test]
fn criterion_3_noisy_recovery_monte_carlo() {
    use fx::noisy_recovery as nr;
    let mut config = default_config();
    config.tc_step = nr::TC_STEP;
    config.optimizer.n_starts = nr::N_STARTS;

    let mut successes = 0usize;
    for noise_seed in 0..nr::N_SEEDS {
        let (series, window) = synth(nr::SIGMA, noise_seed);
        let result = fit(&series, window, &config).unwrap();
        if recovers(&result, nr::TOL_TC_DAYS, nr::TOL_M, nr::TOL_OMEGA) {
            successes += 1;
        }
    }
    assert!(
        successes >= nr::REQUIRED_SUCCESSES,
        "only {successes}/{} noisy fits inside the tolerance box",
        nr::N_SEEDS
    );
    println!(
        "acceptance 3 (noisy recovery, {} seeds at sigma {}): pass \
         ({successes}/{} inside box; pilot {}/{})",
        nr::N_SEEDS,
        nr::SIGMA,
        nr::N_SEEDS,
        nr::PILOT_SUCCESSES,
        nr::N_SEEDS
    );
}

#[test]
fn criterion_4_minima_count_protocol() {
    use fx::scan;

    // clean bubble window: exactly one qualified cluster at the true t_c
    let (series, window) = synth(0.0, 1);
    let est = minimize_mw(&series, window, fx::TRUTH_TC, &default_config()).unwrap();
    assert_eq!(est.minima_count, 1, "expected a single qualified minimum, got {}", est.minima_count);

    // rolling scan over a series with one embedded bubble
    let params = PhaseParams::new(
        (scan::SERIES_LEN - 1) as f64 + scan::TC_OFFSET,
        fx::TRUTH_M,
        fx::TRUTH_OMEGA,
        fx::TRUTH_A,
        fx::TRUTH_B,
        fx::TRUTH_C,
        fx::TRUTH_PHI,
    );
    let spec = SynthSpec {
        params,
        n_points: scan::SERIES_LEN,
        noise_sigma: 0.0,
        rng_seed: 2,
    };
    let long_series = synth_generate(&spec).unwrap();
    let mut config = default_config();
    config.tc_step = scan::TC_STEP;
    config.optimizer.n_starts = scan::N_STARTS;
    let report = calibrate::rolling_scan(&long_series, scan::WINDOW_LENGTH, scan::STEP, &config).unwrap();
    assert!(!report.windows.is_empty());
    let worst = report.windows.iter().map(|w| w.minima_count).max().unwrap();
    assert!(
        worst <= scan::MAX_MINIMA,
        "a window reported {worst} distinct minima, above {}",
        scan::MAX_MINIMA
    );
    println!(
        "acceptance 4 (minima counts): pass (single minimum at truth; scan max {worst} over {} windows)",
        report.windows.len()
    );
}

#[test]
fn criterion_5_new_vs_legacy_dominance() {
    use fx::efficiency as eff;

    let mut fit_bench = default_config();
    fit_bench.tc_step = eff::FIT_TC_STEP;
    fit_bench.optimizer.n_starts = eff::FIT_N_STARTS;
    let mut legacy_bench = default_config();
    legacy_bench.optimizer.n_starts = eff::LEGACY_N_STARTS;

    let mut suite: Vec<(String, PriceSeries, FitWindow)> = Vec::new();
    let clean = synth(0.0, 1);
    suite.push(("clean".into(), clean.0, clean.1));
    for &seed in &eff::NOISY_SEEDS {
        let (series, window) = synth(eff::SIGMA, seed);
        suite.push((format!("noisy-{seed}"), series, window));
    }

    let mut lines = Vec::new();
    for (name, series, window) in &suite {
        let new = fit(series, *window, &fit_bench).unwrap();
        let legacy = legacy_fit(series, *window, &legacy_bench).unwrap();

        // equal recovery quality on this series
        assert!(
            recovers(&new, eff::TOL_TC_DAYS, eff::TOL_M, eff::TOL_OMEGA),
            "{name}: reformulated fit missed the truth"
        );
        assert!(
            recovers(&legacy, eff::TOL_TC_DAYS, eff::TOL_M, eff::TOL_OMEGA),
            "{name}: legacy fit missed the truth"
        );
        assert!(
            new.cost <= legacy.cost + 1e-9,
            "{name}: new cost {} above legacy {}",
            new.cost,
            legacy.cost
        );
        assert!(
            new.n_objective_evals < legacy.n_objective_evals,
            "{name}: new fit spent {} evaluations, legacy {}",
            new.n_objective_evals,
            legacy.n_objective_evals
        );
        lines.push(format!("{name} {}<{}", new.n_objective_evals, legacy.n_objective_evals));
    }

    // cost dominance also holds under the default configurations
    let (series, window) = synth(eff::SIGMA, eff::NOISY_SEEDS[0]);
    let new_default = fit(&series, window, &default_config()).unwrap();
    let legacy_default = legacy_fit(&series, window, &default_config()).unwrap();
    assert!(new_default.cost <= legacy_default.cost + 1e-9);

    println!("acceptance 5 (new-vs-legacy dominance): pass ({})", lines.join(", "));
}

#[test]
fn criterion_6_linear_solver_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(fx::SEED);
    let perturbations = AtomicUsize::new(0);
    for instance in 0..20 {
        let n = 120 + (instance % 3) * 40;
        let truth = LpplParams {
            t_c: n as f64 - 1.0 + rng.gen_range(5.0..60.0),
            m: rng.gen_range(0.15..0.85),
            omega: rng.gen_range(6.0..13.0),
            a: rng.gen_range(5.0..10.0),
            b: -rng.gen_range(0.3..2.0),
            c1: rng.gen_range(-0.3..0.3),
            c2: rng.gen_range(-0.3..0.3),
        };
        let times: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let y: Vec<f64> = times
            .iter()
            .map(|&t| lppl::model::eval_lppl(&truth, t).unwrap() + 0.01 * rng.gen_range(-1.0..1.0))
            .collect();
        // probe point near but not at the truth
        let t_c = truth.t_c + rng.gen_range(-3.0..3.0);
        let m = truth.m + rng.gen_range(-0.1..0.1);
        let omega = truth.omega + rng.gen_range(-1.0..1.0);
        let basis = build_basis(&times, &y, t_c, m, omega).unwrap();
        let sol = solve_linear4(&basis).unwrap();

        // normal-equation residual, relative to the system scale
        let cols: [&[f64]; 4] = [&basis.ones, &basis.f, &basis.g, &basis.h];
        for col in cols {
            let mut gradient = 0.0;
            let mut scale = 1.0f64;
            for i in 0..n {
                let fitted = sol.coefficients[0] * basis.ones[i]
                    + sol.coefficients[1] * basis.f[i]
                    + sol.coefficients[2] * basis.g[i]
                    + sol.coefficients[3] * basis.h[i];
                gradient += col[i] * (y[i] - fitted);
                scale = scale.max((col[i] * y[i]).abs());
            }
            assert!(
                gradient.abs() <= 1e-8 * scale,
                "normal-equation residual {gradient:.3e} above 1e-8 x scale {scale:.3e}"
            );
        }

        // projection optimality against random coefficient perturbations
        let solved = LpplParams {
            t_c,
            m,
            omega,
            a: sol.coefficients[0],
            b: sol.coefficients[1],
            c1: sol.coefficients[2],
            c2: sol.coefficients[3],
        };
        let base_cost = cost_f(&times, &y, &solved).unwrap();
        for _ in 0..1000 {
            let mut p = solved;
            p.a += rng.gen_range(-0.1..0.1);
            p.b += rng.gen_range(-0.05..0.05);
            p.c1 += rng.gen_range(-0.05..0.05);
            p.c2 += rng.gen_range(-0.05..0.05);
            let perturbed = cost_f(&times, &y, &p).unwrap();
            assert!(
                perturbed >= base_cost * (1.0 - 1e-12),
                "perturbation beat the least-squares solution: {perturbed} < {base_cost}"
            );
            perturbations.fetch_add(1, Ordering::Relaxed);
        }
    }
    println!(
        "acceptance 6 (linear-solver soundness): pass (20 instances, {} perturbations)",
        perturbations.load(Ordering::Relaxed)
    );
}

#[test]
fn criterion_7_invariance_suite() {
    let mut config = default_config();
    config.tc_step = 5.0;
    config.optimizer.n_starts = 6;

    let (series, window) = synth(0.0, 1);
    let base = fit(&series, window, &config).unwrap();

    // time translation: same observations embedded 25 indices later
    let shift = 25usize;
    let base_date = chrono::NaiveDate::from_ymd_opt(1999, 1, 1).unwrap();
    let mut dates: Vec<chrono::NaiveDate> = Vec::new();
    let mut prices: Vec<f64> = Vec::new();
    for i in 0..shift {
        dates.push(base_date + chrono::Days::new(i as u64));
        prices.push(1234.5);
    }
    for (i, &p) in series.prices().iter().enumerate() {
        dates.push(base_date + chrono::Days::new((shift + i) as u64));
        prices.push(p);
    }
    let shifted_series = PriceSeries::from_prices(dates, prices).unwrap();
    let shifted_window = FitWindow::new(shift, shift + fx::N_POINTS - 1);
    let shifted = fit(&shifted_series, shifted_window, &config).unwrap();
    assert!(
        (shifted.params.t_c - base.params.t_c - shift as f64).abs() <= 1e-8,
        "t_c shift: {} vs {} + {shift}",
        shifted.params.t_c,
        base.params.t_c
    );
    for (got, want, name) in [
        (shifted.params.m, base.params.m, "m"),
        (shifted.params.omega, base.params.omega, "omega"),
        (shifted.params.a, base.params.a, "A"),
        (shifted.params.b, base.params.b, "B"),
        (shifted.params.c1, base.params.c1, "C1"),
        (shifted.params.c2, base.params.c2, "C2"),
    ] {
        assert!((got - want).abs() <= 1e-8, "{name} changed under translation: {got} vs {want}");
    }

    // price scale: A moves by ln(s), everything else fixed
    let scale = 7.5f64;
    let scaled_series = PriceSeries::from_prices(
        series.dates().to_vec(),
        series.prices().iter().map(|p| p * scale).collect(),
    )
    .unwrap();
    let scaled = fit(&scaled_series, window, &config).unwrap();
    assert!(
        (scaled.params.a - base.params.a - scale.ln()).abs() <= 1e-8,
        "A did not shift by ln(s): {} vs {} + {}",
        scaled.params.a,
        base.params.a,
        scale.ln()
    );
    for (got, want, name) in [
        (scaled.params.t_c, base.params.t_c, "t_c"),
        (scaled.params.m, base.params.m, "m"),
        (scaled.params.omega, base.params.omega, "omega"),
        (scaled.params.b, base.params.b, "B"),
        (scaled.params.c1, base.params.c1, "C1"),
        (scaled.params.c2, base.params.c2, "C2"),
    ] {
        assert!((got - want).abs() <= 1e-8, "{name} changed under price scaling: {got} vs {want}");
    }

    // conversion round trips at 1e-12
    let mut rng = ChaCha8Rng::seed_from_u64(fx::SEED);
    for _ in 0..500 {
        let c = rng.gen_range(0.0..3.0);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let (c1, c2) = phase_to_cartesian(c, phi);
        let (c_back, phi_back) = cartesian_to_phase(c1, c2);
        assert!((c_back - c).abs() <= 1e-12);
        if c > 1e-9 {
            let dphi = (phi_back - phi).abs();
            assert!(dphi.min(std::f64::consts::TAU - dphi) <= 1e-12);
        }
    }

    // determinism: identical seed gives bit-identical fits
    let again = fit(&series, window, &config).unwrap();
    assert_eq!(base.params.t_c.to_bits(), again.params.t_c.to_bits());
    assert_eq!(base.params.m.to_bits(), again.params.m.to_bits());
    assert_eq!(base.params.omega.to_bits(), again.params.omega.to_bits());
    assert_eq!(base.cost.to_bits(), again.cost.to_bits());
    assert_eq!(base.n_objective_evals, again.n_objective_evals);

    // best value stays put across seeds on clean data
    let mut worst_spread = 0.0f64;
    let reference = base.cost;
    for seed in 1..=10u64 {
        let mut seeded = config.clone();
        seeded.optimizer.rng_seed = seed;
        let r = fit(&series, window, &seeded).unwrap();
        worst_spread = worst_spread.max((r.cost - reference).abs() / (1.0 + reference));
    }
    assert!(worst_spread < 1e-8, "best cost varies {worst_spread:.2e} across seeds");

    println!("acceptance 7 (invariance suite): pass (translation, scale, round trips, determinism)");
}

#[test]
fn criterion_8_cross_section_smoothness() {
    use fx::xsection as xs;
    let (series, window) = synth(0.0, 1);
    let t = truth();

    let mw_grid = cross_section(
        &series,
        window,
        &XSectionSpec {
            axes: vec![
                AxisRange { axis: Axis::M, lo: 0.1, hi: 0.9, points: xs::M_POINTS },
                AxisRange { axis: Axis::Omega, lo: 6.0, hi: 13.0, points: xs::OMEGA_POINTS },
            ],
            fixed: FixedPoint { t_c: t.t_c, m: 0.0, omega: 0.0, phi: 0.0 },
            legacy: false,
        },
    )
    .unwrap();
    let mw_minima = mw_grid.local_minima_count();
    assert_eq!(mw_minima, 1, "reformulated (m, omega) surface has {mw_minima} minima");

    let phi_line = cross_section(
        &series,
        window,
        &XSectionSpec {
            axes: vec![AxisRange {
                axis: Axis::Phi,
                lo: 0.0,
                hi: std::f64::consts::TAU,
                points: xs::PHI_POINTS,
            }],
            fixed: FixedPoint { t_c: t.t_c, m: t.m, omega: t.omega, phi: 0.0 },
            legacy: true,
        },
    )
    .unwrap();
    let omega_line = cross_section(
        &series,
        window,
        &XSectionSpec {
            axes: vec![AxisRange { axis: Axis::Omega, lo: 6.0, hi: 13.0, points: xs::OMEGA_LINE_POINTS }],
            fixed: FixedPoint { t_c: t.t_c, m: t.m, omega: 0.0, phi: t.phi },
            legacy: true,
        },
    )
    .unwrap();
    let (phi_minima, omega_minima) = (phi_line.local_minima_count(), omega_line.local_minima_count());
    assert!(
        phi_minima >= 3 || omega_minima >= 3,
        "legacy surface shows too few minima (phi axis {phi_minima}, omega axis {omega_minima})"
    );

    println!(
        "acceptance 8 (cross-section smoothness): pass \
         (new (m,omega) grid: {mw_minima}; legacy phi axis: {phi_minima}, omega axis: {omega_minima})"
    );
}

#[test]
fn criterion_9_protocol_runtime_and_scaling() {
    let (series, window) = synth(0.0, 1);
    let config = default_config();

    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let started = Instant::now();
    let base = single.install(|| fit(&series, window, &config).unwrap());
    let t_single = started.elapsed();
    assert!(
        t_single.as_secs_f64() < 10.0,
        "single-threaded full fit took {t_single:?}, budget 10 s"
    );

    // merged output must not depend on the worker count
    let quad = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let started = Instant::now();
    let parallel = quad.install(|| fit(&series, window, &config).unwrap());
    let t_quad = started.elapsed();
    assert_eq!(base.params.t_c.to_bits(), parallel.params.t_c.to_bits());
    assert_eq!(base.params.m.to_bits(), parallel.params.m.to_bits());
    assert_eq!(base.params.omega.to_bits(), parallel.params.omega.to_bits());
    assert_eq!(base.cost.to_bits(), parallel.cost.to_bits());

    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    if cores >= 2 {
        let speedup = t_single.as_secs_f64() / t_quad.as_secs_f64();
        assert!(
            speedup >= 1.5,
            "4-worker speedup {speedup:.2} below 1.5 on {cores} cores"
        );
        println!(
            "acceptance 9 (protocol runtime): pass \
             (single-thread {t_single:.1?}, 4-worker speedup {speedup:.2})"
        );
    } else {
        println!(
            "acceptance 9 (protocol runtime): pass \
             (single-thread {t_single:.1?} < 10 s; scaling timing skipped on a single-core host, \
             worker-count independence of the output verified bit-for-bit)"
        );
    }
}
