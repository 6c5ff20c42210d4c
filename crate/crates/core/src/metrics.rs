//! Distance-to-equilibrium metrics.
//!
//! `nash_conv` scans pure deviations on the grid a game was tabulated on;
//! `quasi_nash_conv` scans quasi-random deviations in the full continuous
//! action space, so it also penalizes mass the grid cannot express.

use serde::{Deserialize, Serialize};

use crate::discrete::DiscreteGame;
use crate::model::{utility2, Action, GameSpec};
use crate::solvers::MixedStrategy;

/// A finitely supported strategy on `[0, 1]`: `(action, probability)` atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicStrategy {
    pub atoms: Vec<(f64, f64)>,
}

impl AtomicStrategy {
    pub fn from_grid(actions: &[f64], strategy: &MixedStrategy) -> Self {
        AtomicStrategy {
            atoms: actions.iter().copied().zip(strategy.probs.iter().copied()).collect(),
        }
    }

    pub fn point_mass(x: f64) -> Self {
        AtomicStrategy { atoms: vec![(x, 1.0)] }
    }

    pub fn is_valid(&self) -> bool {
        self.atoms.iter().all(|&(x, p)| (0.0..=1.0).contains(&x) && p >= 0.0)
            && (self.atoms.iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs() <= 1e-12
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(x, p)| x * p).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicStrategyPair {
    pub p1: AtomicStrategy,
    pub p2: AtomicStrategy,
}

impl AtomicStrategyPair {
    pub fn from_game(game: &DiscreteGame, s1: &MixedStrategy, s2: &MixedStrategy) -> Self {
        AtomicStrategyPair {
            p1: AtomicStrategy::from_grid(&game.grid.actions_p1, s1),
            p2: AtomicStrategy::from_grid(&game.grid.actions_p2, s2),
        }
    }
}

/// Summed best-response gaps over both players on the game's own grid.
pub fn nash_conv(game: &DiscreteGame, s1: &MixedStrategy, s2: &MixedStrategy) -> f64 {
    let (a1, a2) = game.actions();
    assert_eq!(s1.probs.len(), a1);
    assert_eq!(s2.probs.len(), a2);

    let mut current1 = 0.0;
    let mut best1 = f64::NEG_INFINITY;
    for i in 0..a1 {
        let ev: f64 = game.u1.row(i).iter().zip(&s2.probs).map(|(u, p)| u * p).sum();
        best1 = best1.max(ev);
        current1 += s1.probs[i] * ev;
    }
    let mut ev2 = vec![0.0f64; a2];
    for i in 0..a1 {
        let p = s1.probs[i];
        if p != 0.0 {
            for (e, &u) in ev2.iter_mut().zip(game.u2.row(i)) {
                *e += p * u;
            }
        }
    }
    let best2 = ev2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let current2: f64 = ev2.iter().zip(&s2.probs).map(|(e, p)| e * p).sum();

    (best1 - current1) + (best2 - current2)
}

/// First `m` points of the one-dimensional Sobol sequence (Gray-code ordered
/// base-2 radical inverse, starting at index 1 so 0 is excluded):
/// `0.5, 0.75, 0.25, 0.375, ...`.
pub fn sobol_1d(m: usize) -> Vec<f64> {
    assert!(m >= 1);
    (1..=m as u64)
        .map(|i| {
            let gray = i ^ (i >> 1);
            let mut x = 0.0;
            let mut scale = 0.5;
            let mut bits = gray;
            while bits != 0 {
                if bits & 1 == 1 {
                    x += scale;
                }
                scale *= 0.5;
                bits >>= 1;
            }
            x
        })
        .collect()
}

/// Exact expected utility of the pure action `x` for `player` (0 or 1)
/// against the opponent's atoms.
fn deviation_value(x: f64, opponent: &AtomicStrategy, spec: &GameSpec, player: usize) -> f64 {
    let own = Action::clamped(x);
    opponent
        .atoms
        .iter()
        .map(|&(y, p)| {
            if p == 0.0 {
                return 0.0;
            }
            let other = Action::clamped(y);
            let u = if player == 0 {
                utility2(own, other, spec).0
            } else {
                utility2(other, own, spec).0
            };
            p * u
        })
        .sum()
}

/// NashConv against explicit per-player deviation sets.
pub fn nash_conv_with_points(
    spec: &GameSpec,
    strategies: &AtomicStrategyPair,
    points1: &[f64],
    points2: &[f64],
) -> f64 {
    let mut current1 = 0.0;
    for &(x, p) in &strategies.p1.atoms {
        if p != 0.0 {
            current1 += p * deviation_value(x, &strategies.p2, spec, 0);
        }
    }
    let mut current2 = 0.0;
    for &(y, p) in &strategies.p2.atoms {
        if p != 0.0 {
            current2 += p * deviation_value(y, &strategies.p1, spec, 1);
        }
    }
    let best1 = points1
        .iter()
        .map(|&x| deviation_value(x, &strategies.p2, spec, 0))
        .fold(f64::NEG_INFINITY, f64::max);
    let best2 = points2
        .iter()
        .map(|&y| deviation_value(y, &strategies.p1, spec, 1))
        .fold(f64::NEG_INFINITY, f64::max);

    (best1 - current1).max(0.0) + (best2 - current2).max(0.0)
}

/// NashConv with both players' deviations drawn from the first `m` Sobol
/// points of the continuous action space.
pub fn quasi_nash_conv(spec: &GameSpec, strategies: &AtomicStrategyPair, m: usize) -> f64 {
    let pts = sobol_1d(m);
    nash_conv_with_points(spec, strategies, &pts, &pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::solve_two_player;
    use crate::discrete::{build_grid, payoff_matrices, DiscreteGame, Matrix};
    use crate::model::TieRule;
    use approx::assert_abs_diff_eq;

    fn spec() -> GameSpec {
        GameSpec::two_player(1.0, 0.0, 0.0, TieRule::Shared).unwrap()
    }

    #[test]
    fn sobol_prefix() {
        assert_eq!(sobol_1d(1), vec![0.5]);
        assert_eq!(sobol_1d(3), vec![0.5, 0.75, 0.25]);
        assert_eq!(sobol_1d(4), vec![0.5, 0.75, 0.25, 0.375]);
        let pts = sobol_1d(4096);
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        assert_eq!(sorted.len(), 4096);
        assert!(pts.iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn nash_conv_known_games() {
        let s = GameSpec::two_player(1.0, 0.0, 0.0, TieRule::NoReward).unwrap();
        let u1 = Matrix::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let u2 = Matrix { data: u1.data.iter().map(|v| -v).collect(), ..u1.clone() };
        let pennies = DiscreteGame::from_matrices(u1, u2, s);
        let uni = MixedStrategy::uniform(2);
        assert_abs_diff_eq!(nash_conv(&pennies, &uni, &uni), 0.0, epsilon = 1e-15);

        let coord = DiscreteGame::from_matrices(
            Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]),
            Matrix::from_rows(&[&[0.0, 0.0], &[0.0, 1.0]]),
            s,
        );
        assert_abs_diff_eq!(nash_conv(&coord, &uni, &uni), 0.5, epsilon = 1e-15);

        let dominant = DiscreteGame::from_matrices(
            Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 0.0]]),
            Matrix::from_rows(&[&[1.0, 0.0], &[1.0, 0.0]]),
            s,
        );
        let best1 = MixedStrategy { probs: vec![1.0, 0.0] };
        let best2 = MixedStrategy { probs: vec![1.0, 0.0] };
        assert_abs_diff_eq!(nash_conv(&dominant, &best1, &best2), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn quasi_nash_conv_examples() {
        // The analytic equilibrium discretized to quantile atoms is nearly
        // deviation-proof.
        let eq = solve_two_player(1.0);
        let atoms = AtomicStrategy { atoms: eq.quantile_atoms(10_000) };
        let pair = AtomicStrategyPair { p1: atoms.clone(), p2: atoms };
        let qnc = quasi_nash_conv(&spec(), &pair, 4096);
        assert!(qnc <= 0.005, "qnc = {qnc}");

        // Sitting at zero risk is easy to exploit.
        let zeros = AtomicStrategyPair {
            p1: AtomicStrategy::point_mass(0.0),
            p2: AtomicStrategy::point_mass(0.0),
        };
        assert!(quasi_nash_conv(&spec(), &zeros, 256) >= 0.49);

        // A single deviation point equal to the current play gains nothing.
        let half = AtomicStrategyPair {
            p1: AtomicStrategy::point_mass(0.5),
            p2: AtomicStrategy::point_mass(0.5),
        };
        assert_abs_diff_eq!(quasi_nash_conv(&spec(), &half, 1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn quasi_nash_conv_nondecreasing_in_m() {
        let eq = solve_two_player(1.0);
        let atoms = AtomicStrategy { atoms: eq.quantile_atoms(64) };
        let pair = AtomicStrategyPair { p1: atoms.clone(), p2: atoms };
        let mut last = 0.0;
        for m in [4, 16, 64, 256, 1024] {
            let v = quasi_nash_conv(&spec(), &pair, m);
            assert!(v >= last - 1e-12);
            last = v;
        }
    }

    #[test]
    fn grid_points_reduce_to_nash_conv() {
        let s = GameSpec::two_player(1.0, 0.0, 0.0, TieRule::NoReward).unwrap();
        let game = payoff_matrices(&build_grid(20, true), &s);
        let s1 = MixedStrategy {
            probs: (0..20).map(|i| (i + 1) as f64 / 210.0).collect(),
        };
        let s2 = MixedStrategy {
            probs: (0..20).map(|i| (20 - i) as f64 / 210.0).collect(),
        };
        let pair = AtomicStrategyPair::from_game(&game, &s1, &s2);
        let qnc =
            nash_conv_with_points(&s, &pair, &game.grid.actions_p1, &game.grid.actions_p2);
        let nc = nash_conv(&game, &s1, &s2);
        assert_abs_diff_eq!(qnc, nc, epsilon = 1e-12);
    }
}
