//! Game parameters and expected-utility formulas.
//!
//! Everything in this module is a pure function of its arguments. The
//! two-player utility covers market frictions (`tau`) and correlated failure
//! events (`rho`, a latent-normal correlation); the n-player utility covers
//! the frictionless independent game only.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The reward is normalized to 1; penalties scale relative to it.
pub const REWARD: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("action {0} outside [0, 1]")]
    ActionOutOfRange(f64),
    #[error("invalid game parameters: {0}")]
    InvalidSpec(String),
    #[error("risk profile has {got} entries but the game has {expected} players")]
    ProfileLength { got: usize, expected: usize },
    #[error("quantile argument {0} outside (0, 1)")]
    QuantileDomain(f64),
}

/// How the reward is allocated when surviving players tie on risk level.
///
/// Only relevant on discrete grids (the equilibrium densities are atomless,
/// so ties have probability zero in the continuous game).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TieRule {
    /// Nobody gets the reward.
    #[default]
    NoReward,
    /// The reward is split equally among the tied survivors.
    Shared,
}

/// A failure probability chosen by a player.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Action(f64);

impl Action {
    pub fn new(r: f64) -> Result<Self, ModelError> {
        if (0.0..=1.0).contains(&r) {
            Ok(Action(r))
        } else {
            Err(ModelError::ActionOutOfRange(r))
        }
    }

    /// Clamps into `[0, 1]`; handy for quadrature nodes that overshoot by an ulp.
    pub fn clamped(r: f64) -> Self {
        Action(r.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Parameters of one game instance.
///
/// `rho != 0` and `tau > 0` are only meaningful for `players == 2`; the
/// constructor rejects other combinations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    /// Penalty paid on failure, `>= 0`.
    pub penalty: f64,
    /// Reward for the boldest survivor, fixed to 1.
    pub reward: f64,
    /// Market friction: temperature of the sigmoid replacing the hard
    /// winner comparison. `0` is the frictionless (Heaviside) game.
    pub tau: f64,
    /// Latent-normal correlation between the two failure draws.
    pub rho: f64,
    /// Number of players, `>= 2`.
    pub players: usize,
    pub tie_rule: TieRule,
}

impl GameSpec {
    pub fn new(
        penalty: f64,
        tau: f64,
        rho: f64,
        players: usize,
        tie_rule: TieRule,
    ) -> Result<Self, ModelError> {
        let spec = GameSpec { penalty, reward: REWARD, tau, rho, players, tie_rule };
        spec.validate()?;
        Ok(spec)
    }

    /// Two-player game with frictions and correlation.
    pub fn two_player(penalty: f64, tau: f64, rho: f64, tie_rule: TieRule) -> Result<Self, ModelError> {
        Self::new(penalty, tau, rho, 2, tie_rule)
    }

    /// Frictionless independent game for `n` players.
    pub fn frictionless(penalty: f64, players: usize, tie_rule: TieRule) -> Result<Self, ModelError> {
        Self::new(penalty, 0.0, 0.0, players, tie_rule)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.penalty >= 0.0) {
            return Err(ModelError::InvalidSpec(format!("penalty {} < 0", self.penalty)));
        }
        if self.reward != REWARD {
            return Err(ModelError::InvalidSpec(format!("reward {} != 1", self.reward)));
        }
        if !(self.tau >= 0.0) {
            return Err(ModelError::InvalidSpec(format!("tau {} < 0", self.tau)));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(ModelError::InvalidSpec(format!("rho {} outside [-1, 1]", self.rho)));
        }
        if self.players < 2 {
            return Err(ModelError::InvalidSpec(format!("{} players (need >= 2)", self.players)));
        }
        if self.players > 2 && (self.rho != 0.0 || self.tau != 0.0) {
            return Err(ModelError::InvalidSpec(
                "frictions and correlation are two-player features".into(),
            ));
        }
        Ok(())
    }
}

/// Scaled sigmoid `1 / (1 + exp(-x / tau))`.
///
/// At `tau = 0` this is the Heaviside step with value `1/2` at `x = 0`.
pub fn sigmoid_scaled(x: f64, tau: f64) -> f64 {
    debug_assert!(tau >= 0.0);
    if tau == 0.0 {
        return match x.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => 1.0,
            Some(std::cmp::Ordering::Less) => 0.0,
            _ => 0.5,
        };
    }
    1.0 / (1.0 + (-x / tau).exp())
}

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.3989422804014327;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF, accurate to a few ulp via `erfc`.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal quantile.
///
/// Acklam's rational approximation polished by one Halley step, which brings
/// the round trip `quantile(cdf(x))` to full double precision.
pub fn std_normal_quantile(p: f64) -> Result<f64, ModelError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(ModelError::QuantileDomain(p));
    }
    Ok(quantile_unchecked(p))
}

fn quantile_unchecked(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // Halley refinement.
    let e = std_normal_cdf(x) - p;
    let u = e / std_normal_pdf(x);
    x - u / (1.0 + 0.5 * x * u)
}

// Gauss-Legendre nodes and weights used by the bivariate normal routine,
// from Genz's tvpack (Drezner & Wesolowsky correlation-integral method).
const QUAD_6: [(f64, f64); 3] = [
    (0.1713244923791705, -0.9324695142031522),
    (0.3607615730481384, -0.6612093864662647),
    (0.4679139345726904, -0.2386191860831970),
];
const QUAD_12: [(f64, f64); 6] = [
    (0.04717533638651177, -0.9815606342467191),
    (0.1069393259953183, -0.9041172563704750),
    (0.1600783285433464, -0.7699026741943050),
    (0.2031674267230659, -0.5873179542866171),
    (0.2334925365383547, -0.3678314989981802),
    (0.2491470458134029, -0.1252334085114692),
];
const QUAD_20: [(f64, f64); 10] = [
    (0.01761400713915212, -0.9931285991850949),
    (0.04060142980038694, -0.9639719272779138),
    (0.06267204833410906, -0.9122344282513259),
    (0.08327674157670475, -0.8391169718222188),
    (0.1019301198172404, -0.7463319064601508),
    (0.1181945319615184, -0.6360536807265150),
    (0.1316886384491766, -0.5108670019508271),
    (0.1420961093183821, -0.3737060887154196),
    (0.1491729864726037, -0.2277858511416451),
    (0.1527533871307259, -0.07652652113349733),
];

fn select_quadrature(rho_abs: f64) -> &'static [(f64, f64)] {
    if rho_abs < 0.3 {
        &QUAD_6
    } else if rho_abs < 0.75 {
        &QUAD_12
    } else {
        &QUAD_20
    }
}

/// Bivariate standard normal CDF `Pr[X <= v1, Y <= v2]` with correlation `rho`.
///
/// A scalar port of Genz's tvpack `BVND` (Drezner-Wesolowsky quadrature,
/// 6/12/20 Gauss-Legendre nodes depending on `|rho|`, with the transformed
/// expansion for `|rho| > 0.925`). Absolute accuracy is around 1e-15; the
/// special values `rho = 0, +1, -1` take exact closed forms.
pub fn bivariate_normal_cdf(v1: f64, v2: f64, rho: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&rho));
    if rho == 0.0 {
        return std_normal_cdf(v1) * std_normal_cdf(v2);
    }
    if rho == 1.0 {
        return std_normal_cdf(v1.min(v2));
    }
    if rho == -1.0 {
        return (std_normal_cdf(v1) + std_normal_cdf(v2) - 1.0).max(0.0);
    }
    // Pr[X <= v1, Y <= v2] = Pr[X > -v1, Y > -v2].
    genz_upper_tail(-v1, -v2, rho).clamp(0.0, 1.0)
}

/// `Pr[X > dh, Y > dk]` for standard normals with correlation `r`, `0 < |r| < 1`.
fn genz_upper_tail(dh: f64, dk: f64, r: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let h = dh;
    let mut k = dk;
    let mut hk = h * k;
    let mut bvn = 0.0;
    let quad = select_quadrature(r.abs());

    if r.abs() <= 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = r.asin();
        for &(w, x) in quad {
            for is in [-1.0, 1.0] {
                let sn = (asr * (is * x + 1.0) * 0.5).sin();
                bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        bvn * asr / (2.0 * two_pi) + std_normal_cdf(-h) * std_normal_cdf(-k)
    } else {
        // |r| close to 1: expand about the degenerate case and integrate the
        // remainder. For r < 0 reduce to positive correlation via (h, -k).
        if r < 0.0 {
            k = -k;
            hk = -hk;
        }
        let a_s = (1.0 - r) * (1.0 + r);
        let mut a = a_s.sqrt();
        let b_s = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        let asr = -0.5 * (b_s / a_s + hk);
        if asr > -100.0 {
            bvn = a
                * asr.exp()
                * (1.0 - c * (b_s - a_s) * (1.0 - d * b_s / 5.0) / 3.0 + c * d * a_s * a_s / 5.0);
        }
        if -hk < 100.0 {
            let b = b_s.sqrt();
            bvn -= (-0.5 * hk).exp()
                * two_pi.sqrt()
                * std_normal_cdf(-b / a)
                * b
                * (1.0 - c * b_s * (1.0 - d * b_s / 5.0) / 3.0);
        }
        a *= 0.5;
        for &(w, x) in quad {
            for is in [-1.0, 1.0] {
                let xa = a * (is * x + 1.0);
                let x_s = xa * xa;
                let r_s = (1.0 - x_s).sqrt();
                let asr = -0.5 * (b_s / x_s + hk);
                if asr > -100.0 {
                    bvn += a
                        * w
                        * asr.exp()
                        * ((-hk * (1.0 - r_s) / (2.0 * (1.0 + r_s))).exp() / r_s
                            - (1.0 + c * x_s * (1.0 + d * x_s)));
                }
            }
        }
        bvn /= -two_pi;
        if r > 0.0 {
            bvn + std_normal_cdf(-h.max(k))
        } else {
            bvn = -bvn;
            if k > h {
                bvn += std_normal_cdf(k) - std_normal_cdf(h);
            }
            bvn
        }
    }
}

/// Probability that both players fail when their failure draws are coupled
/// through a Gaussian copula with latent correlation `rho`.
///
/// Boundary actions and the exact correlations `0, +1, -1` are handled in
/// closed form, so the normal quantile is never evaluated at 0 or 1.
pub fn joint_failure_prob(r1: Action, r2: Action, rho: f64) -> f64 {
    let (a, b) = (r1.value(), r2.value());
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if a == 1.0 {
        return b;
    }
    if b == 1.0 {
        return a;
    }
    if rho == 0.0 {
        return a * b;
    }
    if rho == 1.0 {
        return a.min(b);
    }
    if rho == -1.0 {
        return (a + b - 1.0).max(0.0);
    }
    bivariate_normal_cdf(quantile_unchecked(a), quantile_unchecked(b), rho)
        .clamp((a + b - 1.0).max(0.0), a.min(b))
}

/// Pearson correlation of the two uniform failure draws induced by latent
/// normal correlation `rho_z`: `(6/pi) asin(rho_z / 2)`.
pub fn pearson_uniform_corr(rho_z: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&rho_z));
    6.0 / std::f64::consts::PI * (rho_z / 2.0).asin()
}

/// Winner weights for the surviving pair: `(w1, w2)` with `w1 + w2 <= 1`.
///
/// With friction this is the sigmoid pair; frictionless it is the strict
/// comparison, with ties resolved by the tie rule.
fn winner_weights(r1: f64, r2: f64, spec: &GameSpec) -> (f64, f64) {
    if spec.tau > 0.0 {
        let w1 = sigmoid_scaled(r1 - r2, spec.tau);
        (w1, 1.0 - w1)
    } else if r1 > r2 {
        (1.0, 0.0)
    } else if r1 < r2 {
        (0.0, 1.0)
    } else {
        match spec.tie_rule {
            TieRule::Shared => (0.5, 0.5),
            TieRule::NoReward => (0.0, 0.0),
        }
    }
}

/// Expected utilities `(u1, u2)` of the two-player game.
///
/// `u1 = (r2 - rt) R - r1 P + (1 - r1 - r2 + rt) w1 R` where `rt` is the
/// joint failure probability and `w1` the winner weight of player 1; `u2`
/// is the same formula with the players swapped (exact symmetry).
pub fn utility2(r1: Action, r2: Action, spec: &GameSpec) -> (f64, f64) {
    debug_assert_eq!(spec.players, 2);
    let (a, b) = (r1.value(), r2.value());
    let rt = joint_failure_prob(r1, r2, spec.rho);
    let both_survive = (1.0 - a - b + rt).max(0.0);
    let (w1, w2) = winner_weights(a, b, spec);
    let u1 = (b - rt) * spec.reward - a * spec.penalty + both_survive * w1 * spec.reward;
    let u2 = (a - rt) * spec.reward - b * spec.penalty + both_survive * w2 * spec.reward;
    (u1, u2)
}

/// Expected utility vector for a pure risk profile of the frictionless
/// independent `n`-player game.
///
/// Player `i` wins the (possibly shared) reward iff they survive, every
/// bolder player fails, and the tie rule permits it among surviving players
/// at the same risk level. Equal split among tied survivors is computed
/// exactly through the survivor-count distribution of the tied group.
pub fn utility_n(risks: &[Action], spec: &GameSpec) -> Result<Vec<f64>, ModelError> {
    spec.validate()?;
    if spec.tau != 0.0 || spec.rho != 0.0 {
        return Err(ModelError::InvalidSpec(
            "n-player utilities are frictionless and independent".into(),
        ));
    }
    if risks.len() != spec.players {
        return Err(ModelError::ProfileLength { got: risks.len(), expected: spec.players });
    }
    let us = risks
        .iter()
        .enumerate()
        .map(|(i, &ri)| {
            let r = ri.value();
            // Every strictly bolder player must fail.
            let mut win = 1.0;
            let mut tied = Vec::new();
            for (j, &rj) in risks.iter().enumerate() {
                if j == i {
                    continue;
                }
                if rj.value() > r {
                    win *= rj.value();
                } else if rj.value() == r {
                    tied.push(rj.value());
                }
            }
            let share = match spec.tie_rule {
                TieRule::NoReward => tied.iter().product::<f64>(),
                TieRule::Shared => expected_equal_share(&tied),
            };
            -r * spec.penalty + spec.reward * (1.0 - r) * win * share
        })
        .collect();
    Ok(us)
}

/// `E[1 / (1 + T)]` where `T` counts survivors among players with failure
/// probabilities `tied` (independent). Poisson-binomial by direct DP.
fn expected_equal_share(tied: &[f64]) -> f64 {
    let mut dist = vec![1.0];
    for &rj in tied {
        let mut next = vec![0.0; dist.len() + 1];
        for (t, &p) in dist.iter().enumerate() {
            next[t] += p * rj;
            next[t + 1] += p * (1.0 - rj);
        }
        dist = next;
    }
    dist.iter().enumerate().map(|(t, &p)| p / (t + 1) as f64).sum()
}
