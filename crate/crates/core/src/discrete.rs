//! Discretization of the continuous game onto finite action grids.

use serde::{Deserialize, Serialize};

use crate::model::{utility2, Action, GameSpec};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transposed(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// CSV rendering, one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Per-player action grids.
///
/// With `shift` the two players get disjoint interleaved grids, so the
/// frictionless winner comparison never lands on a tie.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionGrid {
    pub actions_p1: Vec<f64>,
    pub actions_p2: Vec<f64>,
    pub shift: bool,
}

/// Evenly spaced grids anchored at 0 (1 itself is strictly dominated and
/// excluded). `shift = false` gives both players `i / a`; `shift = true`
/// interleaves `j / 2a`, even multiples to player 1 and odd to player 2.
pub fn build_grid(a: usize, shift: bool) -> ActionGrid {
    assert!(a >= 2, "need at least two actions per player");
    if shift {
        let step = 1.0 / (2 * a) as f64;
        ActionGrid {
            actions_p1: (0..a).map(|i| (2 * i) as f64 * step).collect(),
            actions_p2: (0..a).map(|i| (2 * i + 1) as f64 * step).collect(),
            shift,
        }
    } else {
        let pts: Vec<f64> = (0..a).map(|i| i as f64 / a as f64).collect();
        ActionGrid { actions_p1: pts.clone(), actions_p2: pts, shift }
    }
}

/// A two-player game tabulated on a grid: `U1[i][j]` and `U2[i][j]` are the
/// expected utilities when player 1 plays `actions_p1[i]` and player 2 plays
/// `actions_p2[j]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteGame {
    pub grid: ActionGrid,
    pub u1: Matrix,
    pub u2: Matrix,
    pub spec: GameSpec,
}

/// Tabulates both payoff matrices. `O(a^2)` utility evaluations, each one
/// bivariate CDF when `rho` is off the closed-form special cases.
pub fn payoff_matrices(grid: &ActionGrid, spec: &GameSpec) -> DiscreteGame {
    assert_eq!(spec.players, 2, "payoff matrices are two-player");
    let a1 = grid.actions_p1.len();
    let a2 = grid.actions_p2.len();
    let mut u1 = Matrix::zeros(a1, a2);
    let mut u2 = Matrix::zeros(a1, a2);
    for (i, &x) in grid.actions_p1.iter().enumerate() {
        let ax = Action::clamped(x);
        for (j, &y) in grid.actions_p2.iter().enumerate() {
            let (v1, v2) = utility2(ax, Action::clamped(y), spec);
            u1.set(i, j, v1);
            u2.set(i, j, v2);
        }
    }
    DiscreteGame { grid: grid.clone(), u1, u2, spec: *spec }
}

impl DiscreteGame {
    pub fn actions(&self) -> (usize, usize) {
        (self.grid.actions_p1.len(), self.grid.actions_p2.len())
    }

    /// Builds a game directly from payoff matrices; used for injected test
    /// games (matching pennies, chicken) that are not grid discretizations.
    pub fn from_matrices(u1: Matrix, u2: Matrix, spec: GameSpec) -> Self {
        assert_eq!(u1.rows, u2.rows);
        assert_eq!(u1.cols, u2.cols);
        let grid = ActionGrid {
            actions_p1: (0..u1.rows).map(|i| i as f64 / u1.rows as f64).collect(),
            actions_p2: (0..u1.cols).map(|j| j as f64 / u1.cols as f64).collect(),
            shift: false,
        };
        DiscreteGame { grid, u1, u2, spec }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TieRule;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn grid_construction() {
        let g = build_grid(2, false);
        assert_eq!(g.actions_p1, vec![0.0, 0.5]);
        assert_eq!(g.actions_p2, vec![0.0, 0.5]);

        let g = build_grid(2, true);
        assert_eq!(g.actions_p1, vec![0.0, 0.5]);
        assert_eq!(g.actions_p2, vec![0.25, 0.75]);

        let g = build_grid(4, true);
        for x in &g.actions_p1 {
            assert!(!g.actions_p2.contains(x));
        }
    }

    #[test]
    fn payoff_matrix_2x2_shared() {
        let spec = GameSpec::two_player(1.0, 0.0, 0.0, TieRule::Shared).unwrap();
        let game = payoff_matrices(&build_grid(2, false), &spec);
        // Values confirmed by the Monte Carlo playout oracle (see the oracle
        // module tests): u1(0,0) = 1/2 shared, u1(0, .5) = .5, u1(.5, 0) = 0,
        // u1(.5, .5) = -1/8.
        let expect = [[0.5, 0.5], [0.0, -0.125]];
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(game.u1.get(i, j), expect[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn u2_is_swapped_transpose() {
        let spec = GameSpec::two_player(0.7, 0.05, 0.3, TieRule::NoReward).unwrap();
        let game = payoff_matrices(&build_grid(6, true), &spec);
        for (j, &y) in game.grid.actions_p2.iter().enumerate() {
            for (i, &x) in game.grid.actions_p1.iter().enumerate() {
                let swapped = utility2(Action::clamped(y), Action::clamped(x), &spec).0;
                assert_eq!(game.u2.get(i, j), swapped);
            }
        }
    }

    #[test]
    fn comonotone_entries_use_min_form() {
        let spec = GameSpec::two_player(1.0, 0.0, 1.0, TieRule::NoReward).unwrap();
        let game = payoff_matrices(&build_grid(2, true), &spec);
        // u1(x, y) = (y - min(x,y)) - x + (1-x-y+min(x,y)) [x > y].
        assert_abs_diff_eq!(game.u1.get(0, 0), 0.25, epsilon = 1e-15); // (0, .25)
        assert_abs_diff_eq!(game.u1.get(1, 0), -0.25, epsilon = 1e-15); // (.5, .25)
        assert_abs_diff_eq!(game.u1.get(1, 1), -0.5, epsilon = 1e-15); // (.5, .75)
    }

    #[test]
    fn entries_bounded_by_penalty_and_reward() {
        let spec = GameSpec::two_player(2.5, 0.1, -0.4, TieRule::Shared).unwrap();
        let game = payoff_matrices(&build_grid(16, false), &spec);
        for &v in game.u1.data.iter().chain(&game.u2.data) {
            assert!((-2.5..=1.0).contains(&v));
        }
    }

    #[test]
    fn best_response_value_converges_with_refinement() {
        // Discretize the analytic equilibrium onto player 2's grid and watch
        // the best pure response converge to u* as the grid doubles.
        let spec = GameSpec::two_player(1.0, 0.0, 0.0, TieRule::NoReward).unwrap();
        let eq = crate::analytic::solve_two_player(1.0);
        let mut errors = Vec::new();
        for a in [64usize, 128, 256, 512] {
            let game = payoff_matrices(&build_grid(a, true), &spec);
            let pts = &game.grid.actions_p2;
            let mut weights = vec![0.0; a];
            for j in 0..a {
                let lo = if j == 0 { 0.0 } else { 0.5 * (pts[j - 1] + pts[j]) };
                let hi = if j + 1 == a { 1.0 } else { 0.5 * (pts[j] + pts[j + 1]) };
                weights[j] = eq.cdf(hi) - eq.cdf(lo);
            }
            let best = (0..a)
                .map(|i| {
                    game.u1.row(i).iter().zip(&weights).map(|(u, w)| u * w).sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            errors.push((best - eq.u_star).abs());
        }
        for pair in errors.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-3, "errors not shrinking: {errors:?}");
        }
        assert!(errors.last().unwrap() < &0.01);
    }

    proptest! {
        #[test]
        fn shifted_grids_never_tie(a in 2usize..80) {
            let g = build_grid(a, true);
            for &x in &g.actions_p1 {
                for &y in &g.actions_p2 {
                    prop_assert!(x != y);
                }
            }
            // Strictly increasing and interleaved.
            for w in g.actions_p1.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for i in 0..a {
                prop_assert!(g.actions_p1[i] < g.actions_p2[i]);
            }
        }
    }
}
