//! Derivative-free local minimization (Nelder-Mead simplex) and a seeded
//! multistart driver that clusters converged points to enumerate distinct
//! local minima.
//!
//! Determinism is a hard requirement here: every start draws from its own
//! counter-indexed stream of a portable generator, so results are
//! bit-identical for a given seed regardless of how the starts are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Value substituted for objective evaluations that are non-finite or
/// undefined; large enough to lose against any genuine cost.
pub const PENALTY: f64 = 1e300;

/// Nelder-Mead coefficients: reflection, expansion, contraction, shrink.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Fraction of the box width used for the initial simplex edge in
/// multistart launches.
const INITIAL_STEP_FRACTION: f64 = 0.05;

/// Axis-aligned search region; starts are drawn uniformly from it.
/// Local searches may leave the box afterwards.
#[derive(Debug, Clone)]
pub struct SearchBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidConfig("search box bounds must have equal nonzero length".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::InvalidConfig("search box requires lower < upper per dimension".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).collect()
    }

    fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| rng.gen_range(l..u))
            .collect()
    }
}

/// Tuning knobs for the local search and the multistart driver.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    pub x_tolerance: f64,
    pub f_tolerance: f64,
    pub n_starts: usize,
    pub rng_seed: u64,
    /// Per-dimension merge distance for clustering converged starts.
    pub cluster_tolerance: Vec<f64>,
}

impl OptimizerConfig {
    pub fn new(rng_seed: u64) -> Self {
        Self {
            max_iterations: 2000,
            x_tolerance: 1e-8,
            f_tolerance: 1e-10,
            n_starts: 20,
            rng_seed,
            cluster_tolerance: Vec::new(),
        }
    }

    pub fn with_cluster_tolerance(mut self, tolerance: Vec<f64>) -> Self {
        self.cluster_tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(Error::InvalidConfig("n_starts must be at least 1".into()));
        }
        if !(self.x_tolerance > 0.0) || !(self.f_tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// One local minimum: its location, value, how many starts merged into it,
/// and whether the simplex met a tolerance before the iteration cap.
#[derive(Debug, Clone)]
pub struct LocalMinimum {
    pub location: Vec<f64>,
    pub value: f64,
    pub start_count: usize,
    pub converged: bool,
}

/// Local Nelder-Mead minimization from `x0` with a default initial simplex
/// edge of 5% of `max(|x0_i|, 1)` per dimension.
pub fn local_minimize<F>(objective: F, x0: &[f64], config: &OptimizerConfig) -> LocalMinimum
where
    F: FnMut(&[f64]) -> f64,
{
    let steps: Vec<f64> = x0.iter().map(|x| 0.05 * x.abs().max(1.0)).collect();
    local_minimize_with_steps(objective, x0, &steps, config)
}

/// Local Nelder-Mead minimization with explicit initial simplex edges.
pub fn local_minimize_with_steps<F>(
    mut objective: F,
    x0: &[f64],
    steps: &[f64],
    config: &OptimizerConfig,
) -> LocalMinimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(dim > 0, "empty start point");
    assert_eq!(steps.len(), dim, "one initial step per dimension");

    let mut eval = move |x: &[f64]| -> f64 {
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            PENALTY
        }
    };

    // vertices kept sorted by value ascending
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim + 1);
    simplex.push((eval(x0), x0.to_vec()));
    for d in 0..dim {
        let mut v = x0.to_vec();
        v[d] += steps[d];
        simplex.push((eval(&v), v));
    }
    sort_simplex(&mut simplex);

    let mut converged = false;
    for _ in 0..config.max_iterations {
        if simplex_converged(&simplex, config) {
            converged = true;
            break;
        }

        let centroid = centroid_excluding_worst(&simplex);
        let worst = simplex[dim].clone();
        let second_worst_value = simplex[dim - 1].0;
        let best_value = simplex[0].0;

        let reflected = affine(&centroid, &worst.1, -REFLECT);
        let f_reflected = eval(&reflected);

        if f_reflected < best_value {
            let expanded = affine(&centroid, &worst.1, -EXPAND);
            let f_expanded = eval(&expanded);
            if f_expanded < f_reflected {
                simplex[dim] = (f_expanded, expanded);
            } else {
                simplex[dim] = (f_reflected, reflected);
            }
        } else if f_reflected < second_worst_value {
            simplex[dim] = (f_reflected, reflected);
        } else if f_reflected < worst.0 {
            // outside contraction
            let contracted = affine(&centroid, &reflected, CONTRACT);
            let f_contracted = eval(&contracted);
            if f_contracted <= f_reflected {
                simplex[dim] = (f_contracted, contracted);
            } else {
                shrink(&mut simplex, &mut eval);
            }
        } else {
            // inside contraction
            let contracted = affine(&centroid, &worst.1, CONTRACT);
            let f_contracted = eval(&contracted);
            if f_contracted < worst.0 {
                simplex[dim] = (f_contracted, contracted);
            } else {
                shrink(&mut simplex, &mut eval);
            }
        }
        sort_simplex(&mut simplex);
    }

    let (value, location) = simplex.swap_remove(0);
    LocalMinimum { location, value, start_count: 1, converged }
}

/// `base + coeff * (point - base)`; negative `coeff` reflects through `base`.
fn affine(base: &[f64], point: &[f64], coeff: f64) -> Vec<f64> {
    base.iter().zip(point).map(|(&b, &p)| b + coeff * (p - b)).collect()
}

fn centroid_excluding_worst(simplex: &[(f64, Vec<f64>)]) -> Vec<f64> {
    let dim = simplex.len() - 1;
    let mut centroid = vec![0.0; dim];
    for (_, vertex) in &simplex[..dim] {
        for (c, &x) in centroid.iter_mut().zip(vertex) {
            *c += x;
        }
    }
    for c in &mut centroid {
        *c /= dim as f64;
    }
    centroid
}

fn shrink<F: FnMut(&[f64]) -> f64>(simplex: &mut [(f64, Vec<f64>)], eval: &mut F) {
    let best = simplex[0].1.clone();
    for entry in simplex.iter_mut().skip(1) {
        let shrunk = affine(&best, &entry.1, SHRINK);
        entry.0 = eval(&shrunk);
        entry.1 = shrunk;
    }
}

fn sort_simplex(simplex: &mut [(f64, Vec<f64>)]) {
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
}

// Both spreads must be small: the value test alone stalls on simplexes
// that straddle a minimum symmetrically.
fn simplex_converged(simplex: &[(f64, Vec<f64>)], config: &OptimizerConfig) -> bool {
    let f_best = simplex[0].0;
    let f_spread = simplex.last().unwrap().0 - f_best;
    if f_spread > config.f_tolerance * (1.0 + f_best.abs()) {
        return false;
    }
    let best = &simplex[0].1;
    let x_spread = simplex[1..]
        .iter()
        .flat_map(|(_, v)| v.iter().zip(best).map(|(x, b)| (x - b).abs()))
        .fold(0.0f64, f64::max);
    x_spread <= config.x_tolerance
}

/// Runs `config.n_starts` local searches from seeded uniform draws inside
/// `bounds`, then merges results whose locations agree within
/// `config.cluster_tolerance` per dimension, keeping the best value per
/// cluster. Output is sorted by value ascending and is a pure function of
/// `(objective, bounds, config)` regardless of thread scheduling.
///
/// Returns an empty vector only if every start failed to reach a finite
/// cost.
pub fn multistart<F>(
    objective: F,
    bounds: &SearchBox,
    config: &OptimizerConfig,
) -> Result<Vec<LocalMinimum>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    if config.cluster_tolerance.len() != bounds.dim() {
        return Err(Error::InvalidConfig(format!(
            "cluster tolerance has {} dimensions, search box has {}",
            config.cluster_tolerance.len(),
            bounds.dim()
        )));
    }

    let steps: Vec<f64> = bounds.widths().iter().map(|w| INITIAL_STEP_FRACTION * w).collect();
    let results: Vec<LocalMinimum> = (0..config.n_starts)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
            rng.set_stream(start as u64);
            let x0 = bounds.sample(&mut rng);
            local_minimize_with_steps(|x| objective(x), &x0, &steps, config)
        })
        .collect();

    let mut finite: Vec<LocalMinimum> =
        results.into_iter().filter(|r| r.value < PENALTY).collect();
    finite.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| lex_cmp(&a.location, &b.location))
    });

    Ok(cluster(finite, &config.cluster_tolerance))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.total_cmp(y);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Greedy clustering of value-sorted results: each result joins the first
/// cluster whose representative (its best member) is within tolerance in
/// every dimension, otherwise it opens a new cluster.
fn cluster(sorted: Vec<LocalMinimum>, tolerance: &[f64]) -> Vec<LocalMinimum> {
    let mut clusters: Vec<LocalMinimum> = Vec::new();
    for result in sorted {
        match clusters.iter_mut().find(|c| within(&c.location, &result.location, tolerance)) {
            Some(cluster) => {
                cluster.start_count += result.start_count;
                cluster.converged = cluster.converged || result.converged;
            }
            None => clusters.push(result),
        }
    }
    clusters
}

fn within(a: &[f64], b: &[f64], tolerance: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .zip(tolerance)
        .all(|((x, y), tol)| (x - y).abs() < *tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn config(seed: u64) -> OptimizerConfig {
        OptimizerConfig::new(seed)
    }

    #[test]
    fn quadratic_minimum_found() {
        let result = local_minimize(|x| (x[0] - 3.0).powi(2), &[0.0], &config(0));
        assert!(result.converged);
        assert!((result.location[0] - 3.0).abs() < 1e-6, "got {}", result.location[0]);
    }

    #[test]
    fn rosenbrock_minimum_found() {
        let rosenbrock = |x: &[f64]| {
            100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
        };
        let mut cfg = config(0);
        cfg.max_iterations = 5000;
        let result = local_minimize(rosenbrock, &[-1.2, 1.0], &cfg);
        assert!(result.converged);
        assert!((result.location[0] - 1.0).abs() < 1e-4);
        assert!((result.location[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn result_never_worse_than_start() {
        type Case = (fn(&[f64]) -> f64, Vec<f64>);
        let objectives: Vec<Case> = vec![
            (|x| x[0].sin() + 0.1 * x[0].abs(), vec![2.0]),
            (|x| (x[0] * x[1]).cos() + x[0] * x[0], vec![1.5, -0.7]),
        ];
        for (f, x0) in objectives {
            let at_start = f(&x0);
            let result = local_minimize(f, &x0, &config(0));
            assert!(result.value <= at_start);
        }
    }

    #[test]
    fn non_finite_objective_is_penalized_not_fatal() {
        // undefined left of 1; minimum at 2 reachable from the right
        let f = |x: &[f64]| {
            if x[0] < 1.0 {
                f64::NAN
            } else {
                (x[0] - 2.0).powi(2)
            }
        };
        let result = local_minimize(f, &[1.4], &config(0));
        assert!((result.location[0] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn multistart_convex_single_cluster_any_seed() {
        let bounds = SearchBox::new(vec![-4.0, -4.0], vec![4.0, 4.0]).unwrap();
        for seed in [1, 99, 4242] {
            let cfg = config(seed).with_cluster_tolerance(vec![0.05, 0.05]);
            let clusters =
                multistart(|x| x[0] * x[0] + 2.0 * x[1] * x[1], &bounds, &cfg).unwrap();
            assert_eq!(clusters.len(), 1, "seed {seed}");
            assert_eq!(clusters[0].start_count, cfg.n_starts);
            assert!(clusters[0].value < 1e-12);
        }
    }

    /// Brute-force oracle: interior local minima of a 1-d function on a
    /// uniform grid fine enough to separate basins.
    fn grid_local_minima(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let values: Vec<f64> = (0..n).map(|i| f(lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect();
        let mut minima = Vec::new();
        for i in 1..n - 1 {
            if values[i] < values[i - 1] && values[i] < values[i + 1] {
                minima.push(lo + (hi - lo) * i as f64 / (n - 1) as f64);
            }
        }
        minima
    }

    #[test]
    fn multistart_enumerates_cosine_basins() {
        let f = |x: f64| (3.0 * x).cos();
        // odd point count: an even one puts each true minimum exactly
        // midway between grid points, tying the straddling values
        let oracle = grid_local_minima(f, 0.0, 2.0 * PI, 10_001);
        assert_eq!(oracle.len(), 3); // pi/3, pi, 5*pi/3

        let bounds = SearchBox::new(vec![0.0], vec![2.0 * PI]).unwrap();
        let cfg = config(7).with_cluster_tolerance(vec![0.1]);
        let clusters = multistart(|x| f(x[0]), &bounds, &cfg).unwrap();

        let inside: Vec<&LocalMinimum> = clusters
            .iter()
            .filter(|c| c.location[0] > 0.0 && c.location[0] < 2.0 * PI)
            .collect();
        assert_eq!(inside.len(), oracle.len());
        for minimum in inside {
            assert!(
                oracle.iter().any(|&x| (x - minimum.location[0]).abs() < 0.1),
                "cluster at {} matches no grid basin",
                minimum.location[0]
            );
        }
    }

    #[test]
    fn multistart_cluster_count_matches_grid_basins_2d() {
        // four wells at (+-1, +-1), separation 2 >> cluster tolerance
        let f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2) + (x[1] * x[1] - 1.0).powi(2);
        let bounds = SearchBox::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let mut cfg = config(3).with_cluster_tolerance(vec![0.05, 0.05]);
        cfg.n_starts = 60;
        let clusters = multistart(f, &bounds, &cfg).unwrap();
        assert_eq!(clusters.len(), 4);
        for c in &clusters {
            assert!((c.location[0].abs() - 1.0).abs() < 0.01);
            assert!((c.location[1].abs() - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn multistart_is_bitwise_deterministic() {
        let f = |x: &[f64]| (3.0 * x[0]).cos() + 0.3 * (2.0 * x[1]).sin() + 0.01 * x[1] * x[1];
        let bounds = SearchBox::new(vec![0.0, -3.0], vec![2.0 * PI, 3.0]).unwrap();
        let cfg = config(123).with_cluster_tolerance(vec![0.1, 0.1]);
        let a = multistart(f, &bounds, &cfg).unwrap();
        let b = multistart(f, &bounds, &cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.value.to_bits(), y.value.to_bits());
            assert_eq!(x.start_count, y.start_count);
            for (p, q) in x.location.iter().zip(&y.location) {
                assert_eq!(p.to_bits(), q.to_bits());
            }
        }
    }

    #[test]
    fn multistart_results_sorted_by_value() {
        let f = |x: &[f64]| (3.0 * x[0]).cos() + 0.05 * x[0];
        let bounds = SearchBox::new(vec![0.0], vec![2.0 * PI]).unwrap();
        let cfg = config(5).with_cluster_tolerance(vec![0.1]);
        let clusters = multistart(f, &bounds, &cfg).unwrap();
        assert!(clusters.len() >= 2);
        assert!(clusters.windows(2).all(|w| w[0].value <= w[1].value));
    }

    #[test]
    fn multistart_empty_when_objective_never_finite() {
        let bounds = SearchBox::new(vec![0.0], vec![1.0]).unwrap();
        let cfg = config(1).with_cluster_tolerance(vec![0.1]);
        let clusters = multistart(|_| f64::NAN, &bounds, &cfg).unwrap();
        assert!(clusters.is_empty());
    }

    #[test]
    fn multistart_rejects_mismatched_cluster_tolerance() {
        let bounds = SearchBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let cfg = config(1).with_cluster_tolerance(vec![0.1]);
        assert!(matches!(
            multistart(|x| x[0], &bounds, &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }
}
