// Pre-registration pilot: numbers frozen into the acceptance fixtures.
use lppl::calibrate::{fit, legacy_fit, CalibConfig, FitWindow};
use lppl::data::{synth_generate, SynthSpec};
use lppl::model::PhaseParams;
use lppl::xsection::{cross_section, Axis, AxisRange, FixedPoint, XSectionSpec};
use std::time::Instant;

fn truth() -> PhaseParams {
    PhaseParams::new(179.0, 0.6, 9.0, 8.0, -1.0, 0.2, 1.0)
}

fn mc_config(seed: u64) -> CalibConfig {
    let mut c = CalibConfig::new(seed);
    c.tc_step = 3.0;
    c.optimizer.n_starts = 6;
    c
}

fn main() {
    let window = FitWindow::new(0, 149);

    // 1) noisy recovery Monte-Carlo, 100 seeds
    let t0 = Instant::now();
    let mut ok = 0usize;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let spec = SynthSpec { params: truth(), n_points: 150, noise_sigma: 0.01, rng_seed: seed };
        let series = synth_generate(&spec).unwrap();
        let r = fit(&series, window, &mc_config(42)).unwrap();
        let dt = (r.params.t_c - 179.0).abs();
        let dm = (r.params.m - 0.6).abs();
        let dw = (r.params.omega - 9.0).abs();
        worst = (worst.0.max(dt), worst.1.max(dm), worst.2.max(dw));
        if dt <= 5.0 && dm <= 0.1 && dw <= 0.5 {
            ok += 1;
        }
    }
    println!("MC: {ok}/100 within (5d, 0.1, 0.5); worst dev: dt={:.3} dm={:.4} dw={:.4}; {:?}", worst.0, worst.1, worst.2, t0.elapsed());

    // 2) benchmark configs for the efficiency comparison
    let mut fit_bench = CalibConfig::new(42);
    fit_bench.tc_step = 15.0;
    fit_bench.optimizer.n_starts = 2;
    let legacy_bench = CalibConfig::new(42);

    for (name, sigma, seed) in [("clean", 0.0, 1u64), ("noisy-11", 0.01, 11), ("noisy-12", 0.01, 12), ("noisy-13", 0.01, 13)] {
        let spec = SynthSpec { params: truth(), n_points: 150, noise_sigma: sigma, rng_seed: seed };
        let series = synth_generate(&spec).unwrap();
        let f = fit(&series, window, &fit_bench).unwrap();
        let l = legacy_fit(&series, window, &legacy_bench).unwrap();
        println!(
            "bench {name}: fit evals={} cost={:.3e} (dt={:.2} dm={:.3} dw={:.3}) | legacy evals={} cost={:.3e} (dt={:.2} dm={:.3} dw={:.3})",
            f.n_objective_evals, f.cost,
            (f.params.t_c - 179.0).abs(), (f.params.m - 0.6).abs(), (f.params.omega - 9.0).abs(),
            l.n_objective_evals, l.cost,
            (l.params.t_c - 179.0).abs(), (l.params.m - 0.6).abs(), (l.params.omega - 9.0).abs(),
        );
    }

    // 3) legacy 1-D minima along phi and omega on clean data (criterion 8)
    let spec = SynthSpec { params: truth(), n_points: 150, noise_sigma: 0.0, rng_seed: 1 };
    let series = synth_generate(&spec).unwrap();
    let t = truth();
    let phi_scan = cross_section(&series, window, &XSectionSpec {
        axes: vec![AxisRange { axis: Axis::Phi, lo: 0.0, hi: std::f64::consts::TAU, points: 720 }],
        fixed: FixedPoint { t_c: t.t_c, m: t.m, omega: t.omega, phi: 0.0 },
        legacy: true,
    }).unwrap();
    let omega_scan = cross_section(&series, window, &XSectionSpec {
        axes: vec![AxisRange { axis: Axis::Omega, lo: 6.0, hi: 13.0, points: 701 }],
        fixed: FixedPoint { t_c: t.t_c, m: t.m, omega: 0.0, phi: t.phi },
        legacy: true,
    }).unwrap();
    let f1_omega_scan = cross_section(&series, window, &XSectionSpec {
        axes: vec![AxisRange { axis: Axis::Omega, lo: 6.0, hi: 13.0, points: 701 }],
        fixed: FixedPoint { t_c: t.t_c, m: t.m, omega: 0.0, phi: 0.0 },
        legacy: false,
    }).unwrap();
    println!(
        "legacy S1 local minima: phi-axis={} omega-axis={}; F1 omega-axis={}",
        phi_scan.local_minima_count(),
        omega_scan.local_minima_count(),
        f1_omega_scan.local_minima_count()
    );

    // 4) F1 (m, omega) grid at true tc
    let mw = cross_section(&series, window, &XSectionSpec {
        axes: vec![
            AxisRange { axis: Axis::M, lo: 0.1, hi: 0.9, points: 81 },
            AxisRange { axis: Axis::Omega, lo: 6.0, hi: 13.0, points: 71 },
        ],
        fixed: FixedPoint { t_c: t.t_c, m: 0.0, omega: 0.0, phi: 0.0 },
        legacy: false,
    }).unwrap();
    println!("F1 (m,omega) grid local minima at true tc: {}", mw.local_minima_count());
}
