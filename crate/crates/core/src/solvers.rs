//! Regret-based learning dynamics on a tabulated two-player game.
//!
//! Three algorithms share the same driver shape: sampled regret matching,
//! its fully deterministic expected-update variant (no sampling, regrets
//! accumulate exact counterfactual values against the opponent's current
//! mixed strategy), and stochastic fictitious play with a softmax response.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discrete::{DiscreteGame, Matrix};
use crate::metrics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    RegretMatching,
    Cfr,
    StochasticFictitiousPlay,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// For regret matching one iteration is `a` sampled steps (`a` = size of
    /// player 1's grid); for the other algorithms one iteration is one
    /// strategy update. Either way an iteration costs `O(a^2)`.
    pub iterations: usize,
    pub seed: u64,
    /// Softmax temperature, fictitious play only.
    pub softmax_temperature: f64,
    /// Record NashConv of the running average strategies every this many
    /// iterations; 0 disables the trace.
    pub trace_every: usize,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, iterations: usize, seed: u64) -> Self {
        assert!(iterations >= 1);
        SolverConfig {
            algorithm,
            iterations,
            seed,
            softmax_temperature: 0.05,
            trace_every: 0,
        }
    }
}

/// A probability vector over one player's grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    pub probs: Vec<f64>,
}

impl MixedStrategy {
    pub fn uniform(len: usize) -> Self {
        MixedStrategy { probs: vec![1.0 / len as f64; len] }
    }

    pub fn is_valid(&self) -> bool {
        self.probs.iter().all(|&p| p >= 0.0)
            && (self.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12
    }

    /// Mean grid value under this strategy.
    pub fn mean_action(&self, actions: &[f64]) -> f64 {
        self.probs.iter().zip(actions).map(|(p, a)| p * a).sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub avg_strategy_p1: MixedStrategy,
    pub avg_strategy_p2: MixedStrategy,
    /// Empirical distribution of sampled joint plays (regret matching only).
    pub empirical_joint: Option<Matrix>,
    /// `(iteration, NashConv of the average strategies so far)`.
    pub nashconv_trace: Vec<(usize, f64)>,
    /// `(iteration, max over players of average positive regret)`.
    pub regret_trace: Vec<(usize, f64)>,
    /// Final average positive regret per player (cumulative positive regret
    /// of the best action divided by elapsed steps).
    pub avg_positive_regret: [f64; 2],
    pub wall_time: f64,
}

/// Runs the configured algorithm.
pub fn solve(game: &DiscreteGame, cfg: &SolverConfig) -> SolveResult {
    match cfg.algorithm {
        Algorithm::RegretMatching => regret_matching(game, cfg),
        Algorithm::Cfr => cfr(game, cfg),
        Algorithm::StochasticFictitiousPlay => stochastic_fictitious_play(game, cfg),
    }
}

/// Draws an index proportionally to the positive parts of `weights`
/// (uniform when none is positive). `pos_total` must equal the sum of the
/// positive parts.
fn sample_positive(weights: &[f64], pos_total: f64, rng: &mut ChaCha8Rng) -> usize {
    if pos_total <= 0.0 {
        return rng.random_range(0..weights.len());
    }
    let mut u = rng.random::<f64>() * pos_total;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    weights.len() - 1
}

fn normalized_counts(counts: &[u64]) -> MixedStrategy {
    let total: u64 = counts.iter().sum();
    MixedStrategy {
        probs: counts.iter().map(|&c| c as f64 / total as f64).collect(),
    }
}

fn max_positive(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x))
}

/// Sampled regret matching over unconditional regrets.
///
/// Each step both players sample from their positive-regret strategies and
/// the full counterfactual payoff vector against the opponent's realized
/// action is added to the regrets. Outputs the empirical time-average
/// strategies and the empirical joint play distribution.
pub fn regret_matching(game: &DiscreteGame, cfg: &SolverConfig) -> SolveResult {
    let start = Instant::now();
    let (a1, a2) = game.actions();
    let u1t = game.u1.transposed();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut regrets1 = vec![0.0f64; a1];
    let mut regrets2 = vec![0.0f64; a2];
    let mut pos1 = 0.0;
    let mut pos2 = 0.0;
    let mut counts1 = vec![0u64; a1];
    let mut counts2 = vec![0u64; a2];
    let mut joint = vec![0u64; a1 * a2];
    let mut nashconv_trace = Vec::new();
    let mut regret_trace = Vec::new();

    let steps_per_iter = a1;
    let mut steps = 0u64;
    for iter in 1..=cfg.iterations {
        for _ in 0..steps_per_iter {
            let i = sample_positive(&regrets1, pos1, &mut rng);
            let j = sample_positive(&regrets2, pos2, &mut rng);
            counts1[i] += 1;
            counts2[j] += 1;
            joint[i * a2 + j] += 1;
            steps += 1;

            let col = u1t.row(j);
            let played = col[i];
            pos1 = 0.0;
            for (r, &u) in regrets1.iter_mut().zip(col) {
                *r += u - played;
                pos1 += r.max(0.0);
            }
            let row = game.u2.row(i);
            let played = row[j];
            pos2 = 0.0;
            for (r, &u) in regrets2.iter_mut().zip(row) {
                *r += u - played;
                pos2 += r.max(0.0);
            }
        }
        if cfg.trace_every > 0 && iter % cfg.trace_every == 0 {
            let s1 = normalized_counts(&counts1);
            let s2 = normalized_counts(&counts2);
            nashconv_trace.push((iter, metrics::nash_conv(game, &s1, &s2)));
            let avg = max_positive(&regrets1).max(max_positive(&regrets2)) / steps as f64;
            regret_trace.push((iter, avg));
        }
    }

    let total = steps as f64;
    SolveResult {
        avg_strategy_p1: normalized_counts(&counts1),
        avg_strategy_p2: normalized_counts(&counts2),
        empirical_joint: Some(Matrix {
            rows: a1,
            cols: a2,
            data: joint.iter().map(|&c| c as f64 / total).collect(),
        }),
        nashconv_trace,
        regret_trace,
        avg_positive_regret: [
            max_positive(&regrets1) / total,
            max_positive(&regrets2) / total,
        ],
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Deterministic regret matching: regrets accumulate exact expected
/// counterfactual payoffs against the opponent's current strategy, and the
/// output is the uniformly weighted average of the per-iteration strategies.
/// The seed is unused.
pub fn cfr(game: &DiscreteGame, cfg: &SolverConfig) -> SolveResult {
    let start = Instant::now();
    let (a1, a2) = game.actions();
    let u2t = game.u2.transposed();

    let mut regrets1 = vec![0.0f64; a1];
    let mut regrets2 = vec![0.0f64; a2];
    let mut avg1 = vec![0.0f64; a1];
    let mut avg2 = vec![0.0f64; a2];
    let mut nashconv_trace = Vec::new();
    let mut regret_trace = Vec::new();

    for iter in 1..=cfg.iterations {
        let s1 = positive_strategy(&regrets1);
        let s2 = positive_strategy(&regrets2);

        let ev1: Vec<f64> = (0..a1).map(|i| dot(game.u1.row(i), &s2)).collect();
        let ev2: Vec<f64> = (0..a2).map(|j| dot(u2t.row(j), &s1)).collect();
        let base1 = dot(&ev1, &s1);
        let base2 = dot(&ev2, &s2);
        for (r, &v) in regrets1.iter_mut().zip(&ev1) {
            *r += v - base1;
        }
        for (r, &v) in regrets2.iter_mut().zip(&ev2) {
            *r += v - base2;
        }
        for (a, &s) in avg1.iter_mut().zip(&s1) {
            *a += s;
        }
        for (a, &s) in avg2.iter_mut().zip(&s2) {
            *a += s;
        }

        if cfg.trace_every > 0 && iter % cfg.trace_every == 0 {
            let m1 = MixedStrategy { probs: avg1.iter().map(|&x| x / iter as f64).collect() };
            let m2 = MixedStrategy { probs: avg2.iter().map(|&x| x / iter as f64).collect() };
            nashconv_trace.push((iter, metrics::nash_conv(game, &m1, &m2)));
            let avg = max_positive(&regrets1).max(max_positive(&regrets2)) / iter as f64;
            regret_trace.push((iter, avg));
        }
    }

    let t = cfg.iterations as f64;
    SolveResult {
        avg_strategy_p1: MixedStrategy { probs: avg1.iter().map(|&x| x / t).collect() },
        avg_strategy_p2: MixedStrategy { probs: avg2.iter().map(|&x| x / t).collect() },
        empirical_joint: None,
        nashconv_trace,
        regret_trace,
        avg_positive_regret: [max_positive(&regrets1) / t, max_positive(&regrets2) / t],
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Fictitious play against the opponent's empirical action frequencies,
/// smoothed by a softmax response at the configured temperature.
pub fn stochastic_fictitious_play(game: &DiscreteGame, cfg: &SolverConfig) -> SolveResult {
    assert!(cfg.softmax_temperature > 0.0, "softmax temperature must be positive");
    let start = Instant::now();
    let (a1, a2) = game.actions();
    let u2t = game.u2.transposed();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut freq1 = vec![0.0f64; a1];
    let mut freq2 = vec![0.0f64; a2];
    let mut avg1 = vec![0.0f64; a1];
    let mut avg2 = vec![0.0f64; a2];
    let mut nashconv_trace = Vec::new();

    for iter in 1..=cfg.iterations {
        let belief2 = normalize_or_uniform(&freq2);
        let belief1 = normalize_or_uniform(&freq1);
        let ev1: Vec<f64> = (0..a1).map(|i| dot(game.u1.row(i), &belief2)).collect();
        let ev2: Vec<f64> = (0..a2).map(|j| dot(u2t.row(j), &belief1)).collect();
        let s1 = softmax(&ev1, cfg.softmax_temperature);
        let s2 = softmax(&ev2, cfg.softmax_temperature);

        let i = sample_distribution(&s1, &mut rng);
        let j = sample_distribution(&s2, &mut rng);
        freq1[i] += 1.0;
        freq2[j] += 1.0;
        for (a, &s) in avg1.iter_mut().zip(&s1) {
            *a += s;
        }
        for (a, &s) in avg2.iter_mut().zip(&s2) {
            *a += s;
        }

        if cfg.trace_every > 0 && iter % cfg.trace_every == 0 {
            let m1 = MixedStrategy { probs: avg1.iter().map(|&x| x / iter as f64).collect() };
            let m2 = MixedStrategy { probs: avg2.iter().map(|&x| x / iter as f64).collect() };
            nashconv_trace.push((iter, metrics::nash_conv(game, &m1, &m2)));
        }
    }

    let t = cfg.iterations as f64;
    SolveResult {
        avg_strategy_p1: MixedStrategy { probs: avg1.iter().map(|&x| x / t).collect() },
        avg_strategy_p2: MixedStrategy { probs: avg2.iter().map(|&x| x / t).collect() },
        empirical_joint: None,
        nashconv_trace,
        regret_trace: Vec::new(),
        avg_positive_regret: [f64::NAN, f64::NAN],
        wall_time: start.elapsed().as_secs_f64(),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn positive_strategy(regrets: &[f64]) -> Vec<f64> {
    let total: f64 = regrets.iter().map(|r| r.max(0.0)).sum();
    if total <= 0.0 {
        vec![1.0 / regrets.len() as f64; regrets.len()]
    } else {
        regrets.iter().map(|r| r.max(0.0) / total).collect()
    }
}

fn normalize_or_uniform(freq: &[f64]) -> Vec<f64> {
    let total: f64 = freq.iter().sum();
    if total <= 0.0 {
        vec![1.0 / freq.len() as f64; freq.len()]
    } else {
        freq.iter().map(|&f| f / total).collect()
    }
}

fn softmax(values: &[f64], temperature: f64) -> Vec<f64> {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = values.iter().map(|&v| ((v - m) / temperature).exp()).collect();
    let total: f64 = out.iter().sum();
    for v in &mut out {
        *v /= total;
    }
    out
}

fn sample_distribution(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let mut u = rng.random::<f64>();
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    probs.len() - 1
}
