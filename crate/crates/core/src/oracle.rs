//! Monte Carlo playout engine.
//!
//! Simulates the raw game (latent normals, failure draws, reward
//! allocation) without going through any expected-utility formula, so the
//! closed forms in [`crate::model`] can be validated against it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::metrics::AtomicStrategyPair;
use crate::model::{sigmoid_scaled, std_normal_cdf, Action, GameSpec, TieRule};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayoutEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl PlayoutEstimate {
    fn from_sums(sum: f64, sum_sq: f64, n: u64) -> Self {
        let mean = sum / n as f64;
        let std_error = if n > 1 {
            let var = ((sum_sq - sum * sum / n as f64) / (n as f64 - 1.0)).max(0.0);
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        PlayoutEstimate { mean, std_error, samples: n }
    }

    /// Distance from `reference` in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - reference).abs() / self.std_error
        }
    }
}

/// Polar Box-Muller; returns two independent standard normals.
pub fn standard_normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let u = 2.0 * rng.random::<f64>() - 1.0;
        let v = 2.0 * rng.random::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let factor = (-2.0 * s.ln() / s).sqrt();
            return (u * factor, v * factor);
        }
    }
}

/// Fills `out` with independent standard normals.
pub fn fill_standard_normal(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut i = 0;
    while i + 1 < out.len() {
        let (a, b) = standard_normal_pair(rng);
        out[i] = a;
        out[i + 1] = b;
        i += 2;
    }
    if i < out.len() {
        out[i] = standard_normal_pair(rng).0;
    }
}

/// One correlated failure draw `(f1, f2)`, both marginally uniform.
///
/// Latent normals through the Cholesky factor of the correlation matrix,
/// mapped by the normal CDF (the standard normal-to-uniform construction).
#[inline]
fn correlated_uniform_pair(rho: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let (z1, raw) = standard_normal_pair(rng);
    let z2 = rho * z1 + (1.0 - rho * rho).max(0.0).sqrt() * raw;
    (std_normal_cdf(z1), std_normal_cdf(z2))
}

/// `count` correlated failure draws from the given seed.
pub fn sample_correlated_failures(rho: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    assert!((-1.0..=1.0).contains(&rho));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| correlated_uniform_pair(rho, &mut rng)).collect()
}

/// One playout of the two-player game at fixed actions; returns the payoff
/// pair.
#[inline]
fn playout(r1: f64, r2: f64, spec: &GameSpec, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let (f1, f2) = correlated_uniform_pair(spec.rho, rng);
    let fail1 = f1 < r1;
    let fail2 = f2 < r2;
    match (fail1, fail2) {
        (true, true) => (-spec.penalty, -spec.penalty),
        (true, false) => (-spec.penalty, spec.reward),
        (false, true) => (spec.reward, -spec.penalty),
        (false, false) => {
            if spec.tau > 0.0 {
                // The reward goes to exactly one player; player 1 wins with
                // the sigmoid probability.
                if rng.random::<f64>() < sigmoid_scaled(r1 - r2, spec.tau) {
                    (spec.reward, 0.0)
                } else {
                    (0.0, spec.reward)
                }
            } else if r1 > r2 {
                (spec.reward, 0.0)
            } else if r2 > r1 {
                (0.0, spec.reward)
            } else {
                match spec.tie_rule {
                    TieRule::Shared => (0.5 * spec.reward, 0.5 * spec.reward),
                    TieRule::NoReward => (0.0, 0.0),
                }
            }
        }
    }
}

/// Monte Carlo estimate of both players' expected utilities at a fixed
/// action pair.
pub fn mc_utility2(
    r1: Action,
    r2: Action,
    spec: &GameSpec,
    samples: u64,
    seed: u64,
) -> (PlayoutEstimate, PlayoutEstimate) {
    assert_eq!(spec.players, 2);
    assert!(samples >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s1, mut sq1, mut s2, mut sq2) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let (u1, u2) = playout(r1.value(), r2.value(), spec, &mut rng);
        s1 += u1;
        sq1 += u1 * u1;
        s2 += u2;
        sq2 += u2 * u2;
    }
    (
        PlayoutEstimate::from_sums(s1, sq1, samples),
        PlayoutEstimate::from_sums(s2, sq2, samples),
    )
}

/// Playout estimates of a mixed-strategy profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyPlayout {
    pub utility: [PlayoutEstimate; 2],
    pub risk: [PlayoutEstimate; 2],
}

/// Samples actions from the atomic strategies and plays the game out;
/// estimates each player's expected utility and mean risk.
pub fn mc_strategy_playout(
    strategies: &AtomicStrategyPair,
    spec: &GameSpec,
    samples: u64,
    seed: u64,
) -> StrategyPlayout {
    assert_eq!(spec.players, 2);
    let cum1 = cumulative(&strategies.p1.atoms);
    let cum2 = cumulative(&strategies.p2.atoms);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = [[0.0f64; 2]; 4]; // u1, u2, r1, r2 as (sum, sum_sq)
    for _ in 0..samples {
        let x = pick(&strategies.p1.atoms, &cum1, rng.random::<f64>());
        let y = pick(&strategies.p2.atoms, &cum2, rng.random::<f64>());
        let (u1, u2) = playout(x, y, spec, &mut rng);
        for (slot, v) in [u1, u2, x, y].into_iter().enumerate() {
            acc[slot][0] += v;
            acc[slot][1] += v * v;
        }
    }
    let est = |slot: usize| PlayoutEstimate::from_sums(acc[slot][0], acc[slot][1], samples);
    StrategyPlayout { utility: [est(0), est(1)], risk: [est(2), est(3)] }
}

fn cumulative(atoms: &[(f64, f64)]) -> Vec<f64> {
    let mut acc = 0.0;
    atoms
        .iter()
        .map(|&(_, p)| {
            acc += p;
            acc
        })
        .collect()
}

fn pick(atoms: &[(f64, f64)], cum: &[f64], u: f64) -> f64 {
    let idx = cum.partition_point(|&c| c < u).min(atoms.len() - 1);
    atoms[idx].0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::AtomicStrategy;
    use crate::model::utility2;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfectly_correlated_draws_coincide() {
        for (f1, f2) in sample_correlated_failures(1.0, 1000, 1) {
            assert_eq!(f1, f2);
            assert!((0.0..=1.0).contains(&f1));
        }
    }

    #[test]
    fn marginals_are_uniform() {
        // Kolmogorov-Smirnov against the uniform CDF at 1e5 draws; the
        // critical value below corresponds to p = 0.001.
        for rho in [-0.8, 0.0, 0.6] {
            let draws = sample_correlated_failures(rho, 100_000, 5);
            for side in 0..2 {
                let mut xs: Vec<f64> =
                    draws.iter().map(|&(a, b)| if side == 0 { a } else { b }).collect();
                xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let n = xs.len() as f64;
                let mut ks = 0.0f64;
                for (i, &x) in xs.iter().enumerate() {
                    ks = ks.max((x - i as f64 / n).abs());
                    ks = ks.max(((i + 1) as f64 / n - x).abs());
                }
                let critical = ((2.0f64 / 0.001).ln() / (2.0 * n)).sqrt();
                assert!(ks < critical, "rho {rho} side {side}: KS {ks} >= {critical}");
            }
        }
    }

    #[test]
    fn empirical_correlation_matches_arcsine_law() {
        for (rho, expect, tol) in [
            (0.0, 0.0, 0.005),
            (0.5, crate::model::pearson_uniform_corr(0.5), 0.01),
        ] {
            let draws = sample_correlated_failures(rho, 1_000_000, 9);
            let n = draws.len() as f64;
            let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for &(a, b) in &draws {
                sa += a;
                sb += b;
                saa += a * a;
                sbb += b * b;
                sab += a * b;
            }
            let cov = sab / n - (sa / n) * (sb / n);
            let var_a = saa / n - (sa / n) * (sa / n);
            let var_b = sbb / n - (sb / n) * (sb / n);
            let corr = cov / (var_a * var_b).sqrt();
            assert!((corr - expect).abs() < tol, "rho {rho}: corr {corr} vs {expect}");
        }
    }

    #[test]
    fn playout_matches_closed_form_baseline() {
        let spec = GameSpec::two_player(1.0, 0.0, 0.0, TieRule::Shared).unwrap();
        let (e1, _) = mc_utility2(
            Action::new(0.3).unwrap(),
            Action::new(0.2).unwrap(),
            &spec,
            10_000_000,
            13,
        );
        assert!(e1.std_error < 0.0007);
        assert!(e1.z_score(0.4) < 4.0, "mean {} se {}", e1.mean, e1.std_error);
    }

    #[test]
    fn degenerate_playouts_are_exact() {
        let spec = GameSpec::two_player(2.0, 0.0, 0.0, TieRule::Shared).unwrap();
        let zero = Action::new(0.0).unwrap();
        let (e1, e2) = mc_utility2(zero, zero, &spec, 1000, 3);
        assert_eq!(e1.mean, 0.5);
        assert_eq!(e1.std_error, 0.0);
        assert_eq!(e2.mean, 0.5);

        // Comonotone tie at 0.5 with no reward on ties: utility is -P r.
        let spec = GameSpec::two_player(1.0, 0.0, 1.0, TieRule::NoReward).unwrap();
        let half = Action::new(0.5).unwrap();
        let (e1, _) = mc_utility2(half, half, &spec, 1_000_000, 4);
        let (closed, _) = utility2(half, half, &spec);
        assert_abs_diff_eq!(closed, -0.5, epsilon = 1e-15);
        assert!(e1.z_score(closed) < 4.0);
    }

    #[test]
    fn playout_agrees_with_formula_across_regimes() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut failures = 0;
        let cases = 12;
        for case in 0..cases {
            let r1 = Action::clamped(rng.random::<f64>());
            let r2 = Action::clamped(rng.random::<f64>());
            let p = rng.random_range(0.0..3.0);
            let tau = if case % 2 == 0 { 0.0 } else { rng.random_range(0.01..0.3) };
            let rho = rng.random_range(-1.0..1.0);
            let spec = GameSpec::two_player(p, tau, rho, TieRule::Shared).unwrap();
            let (want1, want2) = utility2(r1, r2, &spec);
            let (e1, e2) = mc_utility2(r1, r2, &spec, 1_000_000, 1000 + case);
            if e1.z_score(want1) > 4.0 || e2.z_score(want2) > 4.0 {
                failures += 1;
            }
        }
        assert!(failures <= 1, "{failures}/{cases} playouts off by more than 4 sigma");
    }

    #[test]
    fn strategy_playout_estimates() {
        // Point masses at zero: no randomness at all.
        let spec = GameSpec::two_player(1.0, 0.0, 0.0, TieRule::Shared).unwrap();
        let zeros = AtomicStrategyPair {
            p1: AtomicStrategy::point_mass(0.0),
            p2: AtomicStrategy::point_mass(0.0),
        };
        let res = mc_strategy_playout(&zeros, &spec, 2000, 21);
        assert_eq!(res.utility[0].mean, 0.5);
        assert_eq!(res.risk[0].mean, 0.0);

        // The analytic equilibrium earns its own mean action.
        let eq = crate::analytic::solve_two_player(1.0);
        let atoms = AtomicStrategy { atoms: eq.quantile_atoms(10_000) };
        let pair = AtomicStrategyPair { p1: atoms.clone(), p2: atoms };
        let res = mc_strategy_playout(&pair, &spec, 1_000_000, 22);
        for p in 0..2 {
            assert!(
                res.utility[p].z_score(eq.u_star) < 4.0,
                "utility {} vs {}",
                res.utility[p].mean,
                eq.u_star
            );
            assert!(res.risk[p].z_score(eq.r_bar) < 4.0);
        }

        // Joint uniform on [0, 0.2] approximated by a fine atom grid.
        let eps = 0.1;
        let n_atoms = 2000;
        let uniform = AtomicStrategy {
            atoms: (0..n_atoms)
                .map(|i| ((i as f64 + 0.5) * 2.0 * eps / n_atoms as f64, 1.0 / n_atoms as f64))
                .collect(),
        };
        let pair = AtomicStrategyPair { p1: uniform.clone(), p2: uniform };
        let res = mc_strategy_playout(&pair, &spec, 1_000_000, 23);
        let want = crate::analytic::pareto_payoff(eps, 1.0);
        assert!(
            (res.utility[0].mean - want).abs() < 4.0 * res.utility[0].std_error + 1e-3,
            "mean {} vs {}",
            res.utility[0].mean,
            want
        );
    }
}
