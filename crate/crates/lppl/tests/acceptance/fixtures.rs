//! Pre-registered tolerances, configurations and pilot measurements for
//! the acceptance suite. These values were fixed by a pilot run committed
//! together with the tests; the assertions must not be tuned afterwards.

/// Generating truth shared by the synthetic protocols:
/// `t_c = 179` (30 trading days past the 150-point window end),
/// `m = 0.6`, `omega = 9`, `A = 8`, `B = -1`, `C = 0.2`, `phi = 1.0`.
pub const TRUTH_TC: f64 = 179.0;
pub const TRUTH_M: f64 = 0.6;
pub const TRUTH_OMEGA: f64 = 9.0;
pub const TRUTH_A: f64 = 8.0;
pub const TRUTH_B: f64 = -1.0;
pub const TRUTH_C: f64 = 0.2;
pub const TRUTH_PHI: f64 = 1.0;
pub const N_POINTS: usize = 150;

/// Optimizer seed used by every acceptance run.
pub const SEED: u64 = 42;

/// Noisy-recovery Monte-Carlo (criterion 3).
///
/// Pilot (100 fits, sigma = 0.01, noise seeds 0..100, config below):
/// 100/100 inside the tolerance box; worst deviations 0.112 trading days
/// on t_c, 0.0020 on m, 0.0131 on omega; 19 s single-threaded.
pub mod noisy_recovery {
    pub const N_SEEDS: u64 = 100;
    pub const SIGMA: f64 = 0.01;
    pub const TOL_TC_DAYS: f64 = 5.0;
    pub const TOL_M: f64 = 0.1;
    pub const TOL_OMEGA: f64 = 0.5;
    pub const REQUIRED_SUCCESSES: usize = 90;
    /// Monte-Carlo pipeline configuration: coarser grid and fewer starts
    /// than the defaults, sufficient per the pilot.
    pub const TC_STEP: f64 = 3.0;
    pub const N_STARTS: usize = 6;
    pub const PILOT_SUCCESSES: usize = 100;
}

/// Efficiency benchmark (criterion 5): configurations at which both
/// routes recover the truth on every suite series (equal recovery
/// quality), so evaluation counts are comparable.
///
/// Pilot evaluation counts: reformulated fit 3.9k..4.0k vs legacy
/// 10.7k..11.1k on the four suite series.
pub mod efficiency {
    /// Reformulated route: 6-point critical-time grid, 2 starts per point.
    pub const FIT_TC_STEP: f64 = 15.0;
    pub const FIT_N_STARTS: usize = 2;
    /// Legacy route: the default 20 four-dimensional starts.
    pub const LEGACY_N_STARTS: usize = 20;
    /// Noise seeds of the suite's noisy series (plus one clean series).
    pub const NOISY_SEEDS: [u64; 3] = [11, 12, 13];
    pub const SIGMA: f64 = 0.01;
    /// Recovery box demonstrating equal quality, as in criterion 3.
    pub const TOL_TC_DAYS: f64 = 5.0;
    pub const TOL_M: f64 = 0.1;
    pub const TOL_OMEGA: f64 = 0.5;
}

/// Rolling-scan configuration for the minima-count protocol
/// (criterion 4): 260-point series with one embedded bubble, 120-point
/// windows advanced by 35, 5-day critical-time grid, 6 starts.
pub mod scan {
    pub const SERIES_LEN: usize = 260;
    pub const TC_OFFSET: f64 = 25.0;
    pub const WINDOW_LENGTH: usize = 120;
    pub const STEP: usize = 35;
    pub const TC_STEP: f64 = 5.0;
    pub const N_STARTS: usize = 6;
    pub const MAX_MINIMA: usize = 3;
}

/// Cross-section protocol (criterion 8). Pilot counts on the clean
/// series: reformulated (m, omega) grid at the true critical time has
/// exactly 1 interior minimum; the legacy surface has 11 along the omega
/// axis and 2 along the phi axis.
pub mod xsection {
    pub const M_POINTS: usize = 81;
    pub const OMEGA_POINTS: usize = 71;
    pub const PHI_POINTS: usize = 720;
    pub const OMEGA_LINE_POINTS: usize = 701;
}
