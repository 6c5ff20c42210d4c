//! Closed-form and numerically solved symmetric mixed equilibria.
//!
//! Four families are covered: the two-player closed form, the n-player
//! density solved by nested binary search in log space, and the two
//! perfectly correlated two-player cases (`rho = +1`, `rho = -1`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{utility2, Action, GameSpec};
use crate::quad;

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error(
        "solver did not converge: |mass residual| = {mass_residual:.3e}, \
         |mean residual| = {mean_residual:.3e}, log w bracket [{log_w_lo}, {log_w_hi}]"
    )]
    NonConvergence {
        mass_residual: f64,
        mean_residual: f64,
        log_w_lo: f64,
        log_w_hi: f64,
    },
}

/// Which equilibrium family a density belongs to, with its family constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum EquilibriumKind {
    /// Two players, independent failures: `f(x) = (k - 1) / (1 - x)^3`.
    TwoPlayer { k: f64 },
    /// `n` players, independent failures. `w` is the probability of winning
    /// when taking no risk; `log_w` stays meaningful when `w` underflows.
    MultiPlayer { w: f64, log_w: f64 },
    /// Two players, comonotone failures: `p(x) = (1 + P) / (1 - x)`.
    RhoPlusOne,
    /// Two players, countermonotone failures: `p(x) = P / (1 - 2x)^{3/2}`.
    RhoMinusOne,
}

/// A solved symmetric equilibrium density on `[0, r_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumDensity {
    #[serde(flatten)]
    pub kind: EquilibriumKind,
    pub penalty: f64,
    pub players: usize,
    /// Upper endpoint of the support.
    pub r_max: f64,
    /// Mean action under the density.
    pub r_bar: f64,
    /// Equilibrium utility of each player.
    pub u_star: f64,
}

/// Sign of the perfect correlation in [`solve_correlated_extreme`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremeRho {
    PlusOne,
    MinusOne,
}

/// Closed-form two-player equilibrium for penalty `P >= 0`.
pub fn solve_two_player(penalty: f64) -> EquilibriumDensity {
    assert!(penalty >= 0.0, "penalty must be nonnegative");
    let k = ((penalty + 1.0) * (penalty + 1.0) + 1.0).sqrt();
    let r_max = 1.0 - ((k - 1.0) / (k + 1.0)).sqrt();
    let r_bar = k - (penalty + 1.0);
    EquilibriumDensity {
        kind: EquilibriumKind::TwoPlayer { k },
        penalty,
        players: 2,
        r_max,
        r_bar,
        u_star: r_bar,
    }
}

/// Closed-form two-player equilibrium under perfect correlation.
///
/// `rho = -1` requires `P > 0` (the density constant is `P` itself).
pub fn solve_correlated_extreme(
    penalty: f64,
    sign: ExtremeRho,
) -> Result<EquilibriumDensity, AnalyticError> {
    if penalty < 0.0 {
        return Err(AnalyticError::Domain(format!("penalty {penalty} < 0")));
    }
    match sign {
        ExtremeRho::PlusOne => {
            let e = (-1.0 / (penalty + 1.0)).exp();
            let r_max = 1.0 - e;
            let r_bar = 1.0 - (penalty + 1.0) * (1.0 - e);
            Ok(EquilibriumDensity {
                kind: EquilibriumKind::RhoPlusOne,
                penalty,
                players: 2,
                r_max,
                r_bar,
                u_star: r_bar,
            })
        }
        ExtremeRho::MinusOne => {
            if penalty == 0.0 {
                return Err(AnalyticError::Domain(
                    "rho = -1 equilibrium needs a positive penalty".into(),
                ));
            }
            let ratio = penalty / (penalty + 1.0);
            let r_max = 0.5 - 0.5 * ratio * ratio;
            let r_bar = 1.0 / (2.0 * penalty + 2.0);
            Ok(EquilibriumDensity {
                kind: EquilibriumKind::RhoMinusOne,
                penalty,
                players: 2,
                r_max,
                r_bar,
                u_star: r_bar,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Signed log-space arithmetic for the multiplayer antiderivatives.
// ---------------------------------------------------------------------------

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `sign * exp(ln)` with `sign` in `{-1, 0, 1}`.
#[derive(Debug, Clone, Copy)]
struct SLog {
    sign: f64,
    ln: f64,
}

impl SLog {
    const ZERO: SLog = SLog { sign: 0.0, ln: f64::NEG_INFINITY };

    fn pos(ln: f64) -> Self {
        SLog { sign: 1.0, ln }
    }

    fn neg(ln: f64) -> Self {
        SLog { sign: -1.0, ln }
    }

    fn to_f64(self) -> f64 {
        self.sign * self.ln.exp()
    }
}

/// Signed log-sum-exp.
fn slog_sum(terms: &[SLog]) -> SLog {
    let m = terms
        .iter()
        .filter(|t| t.sign != 0.0)
        .map(|t| t.ln)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return SLog::ZERO;
    }
    let s: f64 = terms.iter().filter(|t| t.sign != 0.0).map(|t| t.sign * (t.ln - m).exp()).sum();
    if s == 0.0 {
        SLog::ZERO
    } else {
        SLog { sign: s.signum(), ln: m + s.abs().ln() }
    }
}

/// Parameters shared by the antiderivative evaluations.
#[derive(Clone, Copy)]
struct MultiParams {
    n: f64,
    penalty: f64,
    log_w: f64,
}

impl MultiParams {
    fn log_p_plus_w(&self) -> f64 {
        logaddexp(self.penalty.ln(), self.log_w)
    }

    /// `log((P x + w) / (1 - x))^{1/(n-1)}`; at `x = 0` this is `log w / (n-1)`.
    fn log_power_term(&self, x: f64) -> f64 {
        let log_px_w = if x == 0.0 {
            self.log_w
        } else {
            logaddexp(self.penalty.ln() + x.ln(), self.log_w)
        };
        (log_px_w - (1.0 - x).ln()) / (self.n - 1.0)
    }

    /// Antiderivative of the density mass, in log space (always positive).
    fn log_antideriv_mass(&self, x: f64) -> f64 {
        let numer = logaddexp(
            logaddexp(self.log_w, (self.n * self.penalty * (1.0 - x)).ln()),
            if x == 0.0 { f64::NEG_INFINITY } else { (self.penalty * x).ln() },
        );
        let denom = self.n.ln() + (1.0 - x).ln() + self.log_p_plus_w();
        numer - denom + self.log_power_term(x)
    }

    /// Antiderivative of `x f(x)`, signed (the numerator can be negative).
    fn antideriv_mean(&self, x: f64) -> SLog {
        let numer = slog_sum(&[
            SLog::pos(self.log_w),
            SLog::neg(self.n.ln() + self.log_w + (1.0 - x).ln()),
            if x == 0.0 { SLog::ZERO } else { SLog::pos((self.penalty * x).ln()) },
        ]);
        let denom = self.n.ln() + (1.0 - x).ln() + self.log_p_plus_w();
        SLog { sign: numer.sign, ln: numer.ln - denom + self.log_power_term(x) }
    }

    /// `int_0^x f`, as a plain float.
    fn mass_integral(&self, x: f64) -> f64 {
        slog_sum(&[
            SLog::pos(self.log_antideriv_mass(x)),
            SLog::neg(self.log_antideriv_mass(0.0)),
        ])
        .to_f64()
    }

    /// `int_0^x t f(t) dt`, as a plain float.
    fn mean_integral(&self, x: f64) -> f64 {
        let at_x = self.antideriv_mean(x);
        let at_0 = self.antideriv_mean(0.0);
        slog_sum(&[at_x, SLog { sign: -at_0.sign, ln: at_0.ln }]).to_f64()
    }

    /// Density in log space, valid for any `x` in `[0, 1)`.
    fn log_density(&self, x: f64) -> f64 {
        let log_px_w = if x == 0.0 {
            self.log_w
        } else {
            logaddexp(self.penalty.ln() + x.ln(), self.log_w)
        };
        self.log_p_plus_w()
            - (self.n - 1.0).ln()
            - (2.0 + 1.0 / (self.n - 1.0)) * (1.0 - x).ln()
            - (1.0 - 1.0 / (self.n - 1.0)) * log_px_w
    }
}

/// Given `w`, the support cutoff solves `int_0^h f = 1`; the integral is
/// increasing in `h`, so plain bisection works.
fn cutoff_for_w(params: &MultiParams) -> f64 {
    let mut hi = 0.5;
    while params.mass_integral(hi) < 1.0 && hi < 1.0 - 1e-14 {
        hi = 1.0 - 0.5 * (1.0 - hi);
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if params.mass_integral(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Numerically solved symmetric equilibrium for `n >= 2` players.
///
/// Nested binary search: for each trial `w` (kept as `log w`, the value
/// underflows quickly as `n` grows) the cutoff comes from the mass equation,
/// and the outer search drives the mean equation's residual
/// `int x f dx - w^{1/(n-1)}` to zero. All antiderivatives are evaluated in
/// signed log space. `P = 0` is approximated by `P = 1e-12` (the closed-form
/// antiderivatives degenerate at exactly zero).
pub fn solve_multiplayer(
    n: usize,
    penalty: f64,
    tol: f64,
) -> Result<EquilibriumDensity, AnalyticError> {
    if n < 2 {
        return Err(AnalyticError::Domain(format!("{n} players (need >= 2)")));
    }
    if penalty < 0.0 {
        return Err(AnalyticError::Domain(format!("penalty {penalty} < 0")));
    }
    let penalty_eff = if penalty == 0.0 { 1e-12 } else { penalty };

    let residual = |log_w: f64| -> f64 {
        let params = MultiParams { n: n as f64, penalty: penalty_eff, log_w };
        let h = cutoff_for_w(&params);
        params.mean_integral(h) - (log_w / (n as f64 - 1.0)).exp()
    };

    // One sign change on [log 1e-300, 0]: positive below the root, negative
    // above it.
    let (mut lo, mut hi) = (-690.0, 0.0);
    if !(residual(lo) > 0.0 && residual(hi) < 0.0) {
        return Err(AnalyticError::NonConvergence {
            mass_residual: f64::NAN,
            mean_residual: residual(lo),
            log_w_lo: lo,
            log_w_hi: hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let log_w = 0.5 * (lo + hi);
    let params = MultiParams { n: n as f64, penalty: penalty_eff, log_w };
    let r_max = cutoff_for_w(&params);
    let r_bar = (log_w / (n as f64 - 1.0)).exp();
    let w = log_w.exp();

    let mass_residual = (params.mass_integral(r_max) - 1.0).abs();
    let mean_residual = (params.mean_integral(r_max) - r_bar).abs();
    if !(mass_residual <= tol && mean_residual <= tol) {
        return Err(AnalyticError::NonConvergence {
            mass_residual,
            mean_residual,
            log_w_lo: lo,
            log_w_hi: hi,
        });
    }

    Ok(EquilibriumDensity {
        kind: EquilibriumKind::MultiPlayer { w, log_w },
        penalty,
        players: n,
        r_max,
        r_bar,
        u_star: w,
    })
}

impl EquilibriumDensity {
    fn multi_params(&self) -> Option<MultiParams> {
        match self.kind {
            EquilibriumKind::MultiPlayer { log_w, .. } => Some(MultiParams {
                n: self.players as f64,
                penalty: if self.penalty == 0.0 { 1e-12 } else { self.penalty },
                log_w,
            }),
            _ => None,
        }
    }

    /// Density value at `x` (zero outside `[0, r_max)`).
    pub fn density(&self, x: f64) -> f64 {
        if !(0.0..self.r_max).contains(&x) {
            return 0.0;
        }
        match self.kind {
            EquilibriumKind::TwoPlayer { k } => (k - 1.0) / (1.0 - x).powi(3),
            EquilibriumKind::MultiPlayer { .. } => {
                self.multi_params().unwrap().log_density(x).exp()
            }
            EquilibriumKind::RhoPlusOne => (1.0 + self.penalty) / (1.0 - x),
            EquilibriumKind::RhoMinusOne => self.penalty / (1.0 - 2.0 * x).powf(1.5),
        }
    }

    /// Cumulative distribution at `x`, clamped to `[0, 1]`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.r_max {
            return 1.0;
        }
        let v = match self.kind {
            EquilibriumKind::TwoPlayer { k } => {
                0.5 * (k - 1.0) * (1.0 / ((1.0 - x) * (1.0 - x)) - 1.0)
            }
            EquilibriumKind::MultiPlayer { .. } => self.multi_params().unwrap().mass_integral(x),
            EquilibriumKind::RhoPlusOne => -(1.0 + self.penalty) * (1.0 - x).ln(),
            EquilibriumKind::RhoMinusOne => {
                self.penalty * (1.0 / (1.0 - 2.0 * x).sqrt() - 1.0)
            }
        };
        v.clamp(0.0, 1.0)
    }

    /// Right inverse of [`cdf`](Self::cdf); `q = 1` maps to `r_max`.
    pub fn inverse_cdf(&self, q: f64) -> f64 {
        assert!((0.0..=1.0).contains(&q), "quantile level {q} outside [0, 1]");
        if q >= 1.0 {
            return self.r_max;
        }
        if q <= 0.0 {
            return 0.0;
        }
        match self.kind {
            EquilibriumKind::TwoPlayer { k } => {
                1.0 - (2.0 * q / (k - 1.0) + 1.0).sqrt().recip()
            }
            EquilibriumKind::RhoPlusOne => 1.0 - (-q / (1.0 + self.penalty)).exp(),
            EquilibriumKind::RhoMinusOne => {
                let t = q / self.penalty + 1.0;
                0.5 * (1.0 - 1.0 / (t * t))
            }
            EquilibriumKind::MultiPlayer { .. } => {
                let (mut lo, mut hi) = (0.0, self.r_max);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < q {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-16 {
                        break;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// `count` equal-weight atoms at midpoint quantiles of the density.
    pub fn quantile_atoms(&self, count: usize) -> Vec<(f64, f64)> {
        let p = 1.0 / count as f64;
        (0..count).map(|i| (self.inverse_cdf((i as f64 + 0.5) * p), p)).collect()
    }

    /// Expected utility of the pure action `x` when every opponent plays this
    /// density.
    ///
    /// Two-player families integrate the game utility against the density by
    /// adaptive quadrature (split at the winner-comparison kink); the
    /// multiplayer family uses the closed-form antiderivatives of its win
    /// probability.
    pub fn pure_action_utility(&self, x: f64, spec: &GameSpec) -> f64 {
        match self.kind {
            EquilibriumKind::MultiPlayer { .. } => {
                let params = self.multi_params().unwrap();
                let below = if x < self.r_max { params.mass_integral(x) } else { 1.0 };
                let mean_above = if x < self.r_max {
                    params.mean_integral(self.r_max) - params.mean_integral(x)
                } else {
                    0.0
                };
                let win = (below + mean_above).clamp(0.0, 1.0);
                -x * spec.penalty + (1.0 - x) * win.powi(self.players as i32 - 1)
            }
            _ => {
                let own = Action::clamped(x);
                let f = |b: f64| utility2(own, Action::clamped(b), spec).0 * self.density(b);
                quad::integrate_with_breaks(f, 0.0, self.r_max, &[x], 1e-10)
            }
        }
    }
}

/// Efficiency `E = n w` of the symmetric equilibrium, and the price of
/// anarchy `1 / E`.
pub fn efficiency(n: usize, w: f64) -> (f64, f64) {
    assert!(w > 0.0 && w <= 1.0, "w must lie in (0, 1]");
    let e = n as f64 * w;
    debug_assert!(e <= 1.0 + 1e-9, "efficiency {e} above 1");
    let e = e.clamp(0.0, 1.0);
    (e, 1.0 / e)
}

/// Per-player payoff of the joint strategy where both players draw uniformly
/// from `[0, 2 eps]`: `eps (1 - eps) R - eps P + (1 - eps)^2 / 2 R`.
///
/// Approaches `R / 2` as `eps -> 0`, which pins down the almost-Pareto
/// frontier of the game.
pub fn pareto_payoff(eps: f64, penalty: f64) -> f64 {
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    eps * (1.0 - eps) - eps * penalty + 0.5 * (1.0 - eps) * (1.0 - eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TieRule;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_player_closed_form() {
        let eq = solve_two_player(1.0);
        assert_abs_diff_eq!(eq.r_max, 0.3819660112501051, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.r_bar, 0.2360679774997896, epsilon = 1e-12);
        assert_eq!(eq.r_bar, eq.u_star);

        // P = 0: the normalization identity confirms the Theorem-4 cutoff.
        let eq0 = solve_two_player(0.0);
        assert_abs_diff_eq!(eq0.r_max, 0.5857864376269049, epsilon = 1e-12);
        let mass = quad::integrate(|x| eq0.density(x), 0.0, eq0.r_max, 1e-12);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn two_player_cdf_and_inverse() {
        let eq = solve_two_player(1.0);
        assert_abs_diff_eq!(eq.cdf(eq.r_max), 1.0, epsilon = 1e-15);
        assert_eq!(eq.inverse_cdf(0.0), 0.0);
        assert_eq!(eq.inverse_cdf(1.0), eq.r_max);
        // Frozen against the quadrature of f over [0, 0.2].
        let direct = quad::integrate(|x| eq.density(x), 0.0, 0.2, 1e-12);
        assert_abs_diff_eq!(eq.cdf(0.2), direct, epsilon = 1e-10);
        assert_abs_diff_eq!(eq.cdf(0.2), 0.34764411866263496, epsilon = 1e-10);
        for q in [0.001, 0.1, 0.37, 0.62, 0.9, 0.999] {
            assert_abs_diff_eq!(eq.cdf(eq.inverse_cdf(q)), q, epsilon = 1e-10);
        }
    }

    #[test]
    fn normalization_and_mean_all_kinds() {
        let penalties = [0.01, 0.1, 1.0, 10.0];
        for &p in &penalties {
            for eq in [
                solve_two_player(p),
                solve_correlated_extreme(p.max(0.01), ExtremeRho::PlusOne).unwrap(),
                solve_correlated_extreme(p.max(0.01), ExtremeRho::MinusOne).unwrap(),
            ] {
                let mass = quad::integrate(|x| eq.density(x), 0.0, eq.r_max, 1e-10);
                let mean = quad::integrate(|x| x * eq.density(x), 0.0, eq.r_max, 1e-10);
                assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
                assert_abs_diff_eq!(mean, eq.r_bar, epsilon = 1e-8);
            }
        }
        // Multiplayer: integrate under u = x^{1/(n-1)} to tame the spike at 0.
        for &n in &[2usize, 3, 5, 10, 100] {
            for &p in &penalties {
                let eq = solve_multiplayer(n, p, 1e-9).unwrap();
                let m = (n - 1) as f64;
                let u_max = eq.r_max.powf(1.0 / m);
                let params = eq.multi_params().unwrap();
                let mass = quad::integrate(
                    |u| {
                        if u <= 0.0 {
                            return 0.0;
                        }
                        let x = u.powf(m);
                        (params.log_density(x) + m.ln() + (m - 1.0) * u.ln()).exp()
                    },
                    0.0,
                    u_max,
                    1e-10,
                );
                assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
                // Mean via the closed-form antiderivatives must match r_bar.
                assert_abs_diff_eq!(params.mean_integral(eq.r_max), eq.r_bar, epsilon = 1e-8);
                // w = r_bar^{n-1} by construction.
                match eq.kind {
                    EquilibriumKind::MultiPlayer { log_w, .. } => {
                        assert_abs_diff_eq!(log_w, m * eq.r_bar.ln(), epsilon = 1e-9);
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn multiplayer_reduces_to_two_player() {
        for &p in &[0.1, 1.0, 5.0] {
            let multi = solve_multiplayer(2, p, 1e-9).unwrap();
            let two = solve_two_player(p);
            assert_abs_diff_eq!(multi.r_max, two.r_max, epsilon = 1e-6);
            assert_abs_diff_eq!(multi.r_bar, two.r_bar, epsilon = 1e-6);
            match multi.kind {
                EquilibriumKind::MultiPlayer { w, .. } => {
                    assert_abs_diff_eq!(w, multi.r_bar, epsilon = 1e-9)
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn multiplayer_asymptotics() {
        let eq = solve_multiplayer(1000, 1.0, 1e-9).unwrap();
        assert!((eq.r_max - 0.5).abs() < 0.01, "r_max = {}", eq.r_max);
        let scaled = 1000.0 * eq.r_bar;
        assert!((scaled - 1.0).abs() < 0.1, "n P r_bar = {scaled}");
    }

    #[test]
    fn cutoff_grows_with_n_and_r_bar_falls_with_penalty() {
        let mut last = 0.0;
        for n in [2, 3, 5, 10, 50] {
            let eq = solve_multiplayer(n, 1.0, 1e-9).unwrap();
            assert!(eq.r_max > last);
            last = eq.r_max;
        }
        let mut prev = f64::INFINITY;
        for &p in &[0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0] {
            let eq = solve_two_player(p);
            assert!(eq.r_bar < prev);
            prev = eq.r_bar;
        }
    }

    #[test]
    fn correlated_extremes() {
        let minus = solve_correlated_extreme(1.0, ExtremeRho::MinusOne).unwrap();
        assert_abs_diff_eq!(minus.r_bar, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(minus.r_max, 0.375, epsilon = 1e-15);
        let plus = solve_correlated_extreme(1.0, ExtremeRho::PlusOne).unwrap();
        assert_abs_diff_eq!(plus.r_max, 0.3934693402873666, epsilon = 1e-12);
        for eq in [minus, plus] {
            let mass = quad::integrate(|x| eq.density(x), 0.0, eq.r_max, 1e-12);
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
        }
        assert!(solve_correlated_extreme(0.0, ExtremeRho::MinusOne).is_err());
    }

    #[test]
    fn equal_utility_on_support() {
        // Two-player independent case, three penalties.
        for &p in &[0.1, 1.0, 10.0] {
            let eq = solve_two_player(p);
            let spec = GameSpec::two_player(p, 0.0, 0.0, TieRule::Shared).unwrap();
            for i in 0..64 {
                let x = eq.r_max * i as f64 / 64.0;
                let u = eq.pure_action_utility(x, &spec);
                assert_abs_diff_eq!(u, eq.u_star, epsilon = 1e-5);
            }
            for x in [eq.r_max + 0.05, 0.9, 1.0] {
                assert!(eq.pure_action_utility(x, &spec) <= eq.u_star + 1e-5);
            }
        }
        // Multiplayer, via the closed-form win probability.
        for &n in &[3usize, 5] {
            let eq = solve_multiplayer(n, 1.0, 1e-9).unwrap();
            let spec = GameSpec::frictionless(1.0, n, TieRule::Shared).unwrap();
            for i in 0..64 {
                let x = eq.r_max * i as f64 / 64.0;
                assert_abs_diff_eq!(eq.pure_action_utility(x, &spec), eq.u_star, epsilon = 1e-5);
            }
            for x in [eq.r_max + 0.05, 0.95] {
                assert!(eq.pure_action_utility(x, &spec) <= eq.u_star + 1e-5);
            }
        }
    }

    #[test]
    fn inverse_cdf_sampling_matches_mean() {
        use rand::Rng;
        use rand::SeedableRng;
        let eq = solve_two_player(1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = eq.inverse_cdf(rng.random::<f64>());
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        let tol = 4.0 * (var / n as f64).sqrt();
        assert!((mean - eq.r_bar).abs() < tol, "mean {mean} vs {}", eq.r_bar);
    }

    #[test]
    fn efficiency_and_pareto() {
        let eq = solve_two_player(1.0);
        let (e, poa) = efficiency(2, eq.r_bar);
        assert_abs_diff_eq!(e, 0.4721359549995794, epsilon = 1e-12);
        assert_abs_diff_eq!(poa, 1.0 / e, epsilon = 1e-12);
        let (e, _) = efficiency(4, 0.25);
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-15);

        assert_abs_diff_eq!(pareto_payoff(0.1, 1.0), 0.395, epsilon = 1e-15);
        assert_abs_diff_eq!(pareto_payoff(0.5, 0.0), 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(pareto_payoff(1e-9, 1.0), 0.5, epsilon = 1e-8);
    }

    #[test]
    fn equal_utility_under_perfect_correlation() {
        for (sign, rho) in [(ExtremeRho::PlusOne, 1.0), (ExtremeRho::MinusOne, -1.0)] {
            for &p in &[0.5, 1.0, 3.0] {
                let eq = solve_correlated_extreme(p, sign).unwrap();
                let spec = GameSpec::two_player(p, 0.0, rho, TieRule::Shared).unwrap();
                for i in 0..64 {
                    let x = eq.r_max * i as f64 / 64.0;
                    let u = eq.pure_action_utility(x, &spec);
                    assert_abs_diff_eq!(u, eq.u_star, epsilon = 1e-5);
                }
                for x in [eq.r_max + 0.02, 0.8] {
                    assert!(eq.pure_action_utility(x, &spec) <= eq.u_star + 1e-5);
                }
            }
        }
    }
}
