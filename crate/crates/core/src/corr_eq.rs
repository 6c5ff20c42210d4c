//! Correlated-equilibrium polytope tooling.
//!
//! The CE constraints of a two-player grid game form a convex polytope over
//! the joint action probabilities. This module builds that polytope as an
//! explicit dense linear program, optimizes over it with a self-contained
//! two-phase simplex, bounds its diameter with the randomized
//! direction-sampling estimate, and checks whether a joint distribution is a
//! product (rank 1, hence a Nash equilibrium) through its singular-value
//! ratio.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discrete::{DiscreteGame, Matrix};
use crate::oracle;

pub const DEFAULT_DIRECTIONS: u32 = 5;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Error, PartialEq)]
pub enum CorrEqError {
    #[error("linear program infeasible")]
    Infeasible,
    #[error("linear program unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("quantile level {0} outside (0, 1)")]
    QuantileDomain(f64),
    #[error("rank-1 gap of an all-zero matrix")]
    ZeroMatrix,
}

/// A joint distribution over the two players' grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub probs: Matrix,
}

impl JointDistribution {
    pub fn is_valid(&self) -> bool {
        self.probs.data.iter().all(|&p| p >= 0.0) && (self.probs.sum() - 1.0).abs() <= 1e-9
    }

    pub fn marginal_p1(&self) -> Vec<f64> {
        (0..self.probs.rows).map(|i| self.probs.row(i).iter().sum()).collect()
    }

    pub fn marginal_p2(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.probs.cols];
        for i in 0..self.probs.rows {
            for (acc, &v) in m.iter_mut().zip(self.probs.row(i)) {
                *acc += v;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// A dense LP over nonnegative variables: `rows` plus implicit `x >= 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Default objective (total expected reward for CE programs).
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
}

impl LinearProgram {
    /// Explicit rows plus the implicit nonnegativity constraints.
    pub fn total_constraint_count(&self) -> usize {
        self.rows.len() + self.num_vars
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub point: Vec<f64>,
}

/// Builds the CE polytope of a two-player game: one deviation row per
/// ordered action pair of each player, and the probability normalization.
pub fn build_ce_lp(game: &DiscreteGame) -> LinearProgram {
    let (a1, a2) = game.actions();
    let nv = a1 * a2;
    let mut rows = Vec::with_capacity(a1 * (a1 - 1) + a2 * (a2 - 1) + 1);

    for i in 0..a1 {
        for alt in 0..a1 {
            if alt == i {
                continue;
            }
            let mut coeffs = vec![0.0; nv];
            for j in 0..a2 {
                coeffs[i * a2 + j] = game.u1.get(i, j) - game.u1.get(alt, j);
            }
            rows.push(LpRow { coeffs, cmp: Cmp::Ge, rhs: 0.0 });
        }
    }
    for j in 0..a2 {
        for alt in 0..a2 {
            if alt == j {
                continue;
            }
            let mut coeffs = vec![0.0; nv];
            for i in 0..a1 {
                coeffs[i * a2 + j] = game.u2.get(i, j) - game.u2.get(i, alt);
            }
            rows.push(LpRow { coeffs, cmp: Cmp::Ge, rhs: 0.0 });
        }
    }
    rows.push(LpRow { coeffs: vec![1.0; nv], cmp: Cmp::Eq, rhs: 1.0 });

    let objective = (0..nv)
        .map(|idx| game.u1.data[idx] + game.u2.data[idx])
        .collect();
    LinearProgram { num_vars: nv, objective, rows }
}

/// Largest violation of the CE deviation constraints by `joint` (0 when the
/// distribution is a correlated equilibrium).
pub fn ce_violation(game: &DiscreteGame, joint: &JointDistribution) -> f64 {
    let (a1, a2) = game.actions();
    let mut worst = 0.0f64;
    for i in 0..a1 {
        for alt in 0..a1 {
            if alt == i {
                continue;
            }
            let gain: f64 = (0..a2)
                .map(|j| joint.probs.get(i, j) * (game.u1.get(alt, j) - game.u1.get(i, j)))
                .sum();
            worst = worst.max(gain);
        }
    }
    for j in 0..a2 {
        for alt in 0..a2 {
            if alt == j {
                continue;
            }
            let gain: f64 = (0..a1)
                .map(|i| joint.probs.get(i, j) * (game.u2.get(i, alt) - game.u2.get(i, j)))
                .sum();
            worst = worst.max(gain);
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Dense two-phase simplex.
// ---------------------------------------------------------------------------

const EPS_COST: f64 = 1e-9;
const EPS_PIVOT: f64 = 1e-10;

struct Tableau {
    rows: usize,
    cols: usize, // structural + slack + artificial columns, rhs excluded
    data: Vec<f64>,
    basis: Vec<usize>,
    artificial_start: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.cols + 1;
        let inv = 1.0 / self.data[row * width + col];
        for v in &mut self.data[row * width..(row + 1) * width] {
            *v *= inv;
        }
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.data[r * width + col];
            if factor == 0.0 {
                continue;
            }
            // Split borrows: the pivot row is read, row r is written.
            let (pivot_row, target) = if r < row {
                let (a, b) = self.data.split_at_mut(row * width);
                (&b[..width], &mut a[r * width..(r + 1) * width])
            } else {
                let (a, b) = self.data.split_at_mut(r * width);
                (&a[row * width..(row + 1) * width], &mut b[..width])
            };
            for (t, &p) in target.iter_mut().zip(pivot_row) {
                *t -= factor * p;
            }
        }
        self.basis[row] = col;
    }
}

/// One simplex phase: maximizes `cost` over the current basis. `allowed`
/// marks columns permitted to enter. Entering column by Dantzig's rule,
/// switching to Bland's rule after a run of degenerate pivots so cycling
/// cannot occur.
fn run_phase(t: &mut Tableau, cost: &[f64], allowed: impl Fn(usize) -> bool) -> Result<(), CorrEqError> {
    let width = t.cols + 1;
    // Reduced costs and objective under the current basis.
    let mut reduced: Vec<f64> = cost.to_vec();
    reduced.push(0.0); // objective value slot (negated)
    for r in 0..t.rows {
        let cb = cost[t.basis[r]];
        if cb != 0.0 {
            for c in 0..width {
                reduced[c] -= cb * t.at(r, c);
            }
        }
    }

    let max_iter = 400 * (t.rows + t.cols) + 10_000;
    let mut degenerate_run = 0usize;
    let mut bland = false;
    for _ in 0..max_iter {
        // Entering column.
        let mut entering = None;
        if bland {
            for c in 0..t.cols {
                if allowed(c) && reduced[c] > EPS_COST {
                    entering = Some(c);
                    break;
                }
            }
        } else {
            let mut best = EPS_COST;
            for c in 0..t.cols {
                if allowed(c) && reduced[c] > best {
                    best = reduced[c];
                    entering = Some(c);
                }
            }
        }
        let Some(col) = entering else {
            return Ok(());
        };

        // Ratio test; ties broken on the smallest basic variable index.
        let mut leaving: Option<(usize, f64)> = None;
        for r in 0..t.rows {
            let a = t.at(r, col);
            if a > EPS_PIVOT {
                let ratio = t.rhs(r) / a;
                match leaving {
                    None => leaving = Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-12
                            || (ratio < lratio + 1e-12 && t.basis[r] < t.basis[lr])
                        {
                            leaving = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, ratio)) = leaving else {
            return Err(CorrEqError::Unbounded);
        };

        if ratio <= 1e-12 {
            degenerate_run += 1;
            if degenerate_run > 2 * (t.rows + t.cols) {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }

        // Update the reduced-cost row alongside the tableau.
        let factor = reduced[col];
        t.pivot(row, col);
        if factor != 0.0 {
            for c in 0..width {
                reduced[c] -= factor * t.at(row, c);
            }
        }
    }
    Err(CorrEqError::IterationLimit)
}

fn solve_simplex(lp: &LinearProgram, objective: &[f64], dir: Direction) -> Result<LpSolution, CorrEqError> {
    assert_eq!(objective.len(), lp.num_vars);
    let n = lp.num_vars;

    // Normalize rows: nonnegative rhs; `>= 0` rows become `<= 0`.
    struct NormRow {
        coeffs: Vec<f64>,
        cmp: Cmp,
        rhs: f64,
    }
    let rows: Vec<NormRow> = lp
        .rows
        .iter()
        .map(|row| {
            let mut coeffs = row.coeffs.clone();
            let mut rhs = row.rhs;
            let mut cmp = row.cmp;
            if rhs < 0.0 || (rhs == 0.0 && cmp == Cmp::Ge) {
                for c in &mut coeffs {
                    *c = -*c;
                }
                rhs = -rhs;
                cmp = match cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
            NormRow { coeffs, cmp, rhs }
        })
        .collect();

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.cmp != Cmp::Eq).count();
    let n_art = rows.iter().filter(|r| r.cmp != Cmp::Le).count();
    let cols = n + n_slack + n_art;
    let width = cols + 1;

    let mut t = Tableau {
        rows: m,
        cols,
        data: vec![0.0; m * width],
        basis: vec![0; m],
        artificial_start: n + n_slack,
    };
    let mut slack_idx = n;
    let mut art_idx = n + n_slack;
    for (r, row) in rows.iter().enumerate() {
        t.data[r * width..r * width + n].copy_from_slice(&row.coeffs);
        t.data[r * width + cols] = row.rhs;
        match row.cmp {
            Cmp::Le => {
                t.data[r * width + slack_idx] = 1.0;
                t.basis[r] = slack_idx;
                slack_idx += 1;
            }
            Cmp::Ge => {
                t.data[r * width + slack_idx] = -1.0;
                slack_idx += 1;
                t.data[r * width + art_idx] = 1.0;
                t.basis[r] = art_idx;
                art_idx += 1;
            }
            Cmp::Eq => {
                t.data[r * width + art_idx] = 1.0;
                t.basis[r] = art_idx;
                art_idx += 1;
            }
        }
    }

    // Phase 1: drive the artificials to zero.
    if n_art > 0 {
        let mut cost = vec![0.0; cols];
        for c in t.artificial_start..cols {
            cost[c] = -1.0;
        }
        run_phase(&mut t, &cost, |_| true)?;
        let infeasibility: f64 =
            (0..m).filter(|&r| t.basis[r] >= t.artificial_start).map(|r| t.rhs(r)).sum();
        if infeasibility > 1e-9 {
            return Err(CorrEqError::Infeasible);
        }
        // Pivot lingering zero-level artificials out where possible.
        for r in 0..m {
            if t.basis[r] >= t.artificial_start {
                if let Some(c) = (0..t.artificial_start).find(|&c| t.at(r, c).abs() > EPS_PIVOT) {
                    t.pivot(r, c);
                }
            }
        }
    }

    // Phase 2 on the requested objective; artificials may not re-enter.
    let sign = match dir {
        Direction::Maximize => 1.0,
        Direction::Minimize => -1.0,
    };
    let mut cost = vec![0.0; cols];
    for (c, &v) in objective.iter().enumerate() {
        cost[c] = sign * v;
    }
    let art_start = t.artificial_start;
    run_phase(&mut t, &cost, |c| c < art_start)?;

    let mut point = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            point[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let value: f64 = objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    Ok(LpSolution { value, point })
}

/// Optimizes the LP's own objective.
pub fn lp_solve(lp: &LinearProgram, dir: Direction) -> Result<LpSolution, CorrEqError> {
    solve_simplex(lp, &lp.objective.clone(), dir)
}

/// Optimizes an arbitrary objective over the LP's constraint set.
pub fn lp_solve_objective(
    lp: &LinearProgram,
    objective: &[f64],
    dir: Direction,
) -> Result<LpSolution, CorrEqError> {
    solve_simplex(lp, objective, dir)
}

// ---------------------------------------------------------------------------
// Randomized diameter bound.
// ---------------------------------------------------------------------------

/// Sum of squared polytope widths along `k` independent standard normal
/// directions. Zero (up to solver tolerance) iff the polytope is a point.
///
/// Direction `i` is drawn from stream `i + 1` of the seeded generator, so
/// the sum does not depend on evaluation order.
pub fn sum_diam_squared(k: u32, lp: &LinearProgram, seed: u64) -> Result<f64, CorrEqError> {
    assert!(k >= 1);
    let mut total = 0.0;
    for i in 0..k {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let mut v = vec![0.0; lp.num_vars];
        oracle::fill_standard_normal(&mut rng, &mut v);
        let lo = lp_solve_objective(lp, &v, Direction::Minimize)?.value;
        let hi = lp_solve_objective(lp, &v, Direction::Maximize)?.value;
        let width = hi - lo;
        total += width * width;
    }
    Ok(total)
}

/// Which tail the chi-square quantile is taken at. The upper-tail form
/// (`Q(1 - p, K)`) is the reported-value convention; the lower-tail form
/// (`Q(p, K)`) matches the confidence-interval pseudocode. Both vanish
/// exactly when the polytope is a single point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantileConvention {
    UpperTail,
    LowerTail,
}

/// Turns a sum of squared widths into the diameter bound
/// `sum / chi2_quantile(tail, k)`.
pub fn d_max_from_sum(
    sum: f64,
    confidence: f64,
    k: u32,
    convention: QuantileConvention,
) -> Result<f64, CorrEqError> {
    let level = match convention {
        QuantileConvention::UpperTail => 1.0 - confidence,
        QuantileConvention::LowerTail => confidence,
    };
    Ok(sum / chi2_quantile(level, k)?)
}

/// The reported diameter statistic: `sum_diam_squared / Q(1 - p, K)`.
pub fn max_diameter(
    confidence: f64,
    k: u32,
    lp: &LinearProgram,
    seed: u64,
) -> Result<f64, CorrEqError> {
    let sum = sum_diam_squared(k, lp, seed)?;
    d_max_from_sum(sum, confidence, k, QuantileConvention::UpperTail)
}

/// Square-root companion of [`max_diameter`], in the polytope's own units.
pub fn max_diameter_sqrt(
    confidence: f64,
    k: u32,
    lp: &LinearProgram,
    seed: u64,
) -> Result<f64, CorrEqError> {
    Ok(max_diameter(confidence, k, lp, seed)?.sqrt())
}

// ---------------------------------------------------------------------------
// Chi-square distribution.
// ---------------------------------------------------------------------------

/// Regularized lower incomplete gamma `P(a, x)`; series for small `x`,
/// Lentz continued fraction otherwise.
fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    let log_prefactor = a * x.ln() - x - libm::lgamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut denom = a;
        for _ in 0..500 {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        sum * log_prefactor.exp()
    } else {
        // Continued fraction for Q(a, x).
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 - log_prefactor.exp() * h
    }
}

/// Chi-square CDF with `k` degrees of freedom.
pub fn chi2_cdf(x: f64, k: u32) -> f64 {
    assert!(k >= 1);
    if x <= 0.0 {
        return 0.0;
    }
    gamma_p(k as f64 / 2.0, x / 2.0)
}

/// Chi-square quantile by monotone bisection (to about 1e-12 relative).
pub fn chi2_quantile(q: f64, k: u32) -> Result<f64, CorrEqError> {
    assert!(k >= 1);
    if !(q > 0.0 && q < 1.0) {
        return Err(CorrEqError::QuantileDomain(q));
    }
    let mut hi = k as f64;
    while chi2_cdf(hi, k) < q {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi2_cdf(mid, k) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Rank-1 check.
// ---------------------------------------------------------------------------

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Ratio of the two largest singular values of a joint-distribution matrix.
///
/// Power iteration on the Gram operator `A^T A` followed by one deflation
/// step; zero means the matrix factorizes as an outer product of its
/// marginals, i.e. the joint distribution is an independent (Nash) play.
pub fn rank1_gap(joint: &Matrix) -> Result<f64, CorrEqError> {
    if joint.data.iter().all(|&v| v == 0.0) {
        return Err(CorrEqError::ZeroMatrix);
    }
    if joint.rows.min(joint.cols) == 1 {
        return Ok(0.0);
    }

    let gram_apply = |v: &[f64], out: &mut [f64], tmp: &mut [f64]| {
        for (i, t) in tmp.iter_mut().enumerate() {
            *t = joint.row(i).iter().zip(v).map(|(a, x)| a * x).sum();
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &t) in tmp.iter().enumerate() {
            if t != 0.0 {
                for (o, &a) in out.iter_mut().zip(joint.row(i)) {
                    *o += t * a;
                }
            }
        }
    };

    let n = joint.cols;
    let mut tmp = vec![0.0; joint.rows];
    let mut power = |deflate: Option<(&[f64], f64)>, salt: u64| -> (f64, Vec<f64>) {
        let mut v: Vec<f64> = (0..n)
            .map(|i| splitmix(i as u64 + salt) as f64 / u64::MAX as f64 - 0.5)
            .collect();
        if let Some((v1, _)) = deflate {
            let proj: f64 = v1.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (x, &a) in v.iter_mut().zip(v1) {
                *x -= proj * a;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        let mut lambda = 0.0;
        let mut out = vec![0.0; n];
        for _ in 0..100_000 {
            gram_apply(&v, &mut out, &mut tmp);
            if let Some((v1, l1)) = deflate {
                let proj: f64 = v1.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (o, &a) in out.iter_mut().zip(v1) {
                    *o -= l1 * proj * a;
                }
            }
            let new_lambda: f64 = v.iter().zip(&out).map(|(a, b)| a * b).sum();
            let norm: f64 = out.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= 1e-300 {
                return (0.0, v);
            }
            for (x, &o) in v.iter_mut().zip(&out) {
                *x = o / norm;
            }
            if (new_lambda - lambda).abs() <= 1e-10 * new_lambda.abs().max(1e-30) {
                return (new_lambda.max(0.0), v);
            }
            lambda = new_lambda;
        }
        (lambda.max(0.0), v)
    };

    let (l1, v1) = power(None, 12345);
    if l1 <= 0.0 {
        return Err(CorrEqError::ZeroMatrix);
    }
    let (l2, _) = power(Some((&v1, l1)), 777);
    Ok((l2.max(0.0) / l1).sqrt().clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// Full polytope diagnostics.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CeStatus {
    Solved,
    Infeasible,
}

/// Diagnostics of one CE polytope: the total-reward-maximizing equilibrium,
/// its rank-1 gap, and the randomized diameter bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CePolytopeResult {
    pub best_ce: Option<JointDistribution>,
    pub best_value: f64,
    pub lambda: f64,
    pub sum_diam_squared: f64,
    pub d_max: f64,
    pub directions: u32,
    pub confidence: f64,
    pub status: CeStatus,
}

fn infeasible_result(k: u32, confidence: f64) -> CePolytopeResult {
    CePolytopeResult {
        best_ce: None,
        best_value: f64::NAN,
        lambda: f64::NAN,
        sum_diam_squared: f64::NAN,
        d_max: f64::NAN,
        directions: k,
        confidence,
        status: CeStatus::Infeasible,
    }
}

/// Maximizes total expected reward over the CE polytope. The diameter
/// fields are left at zero; [`analyze_ce_polytope`] fills everything.
pub fn max_total_reward_ce(game: &DiscreteGame) -> Result<CePolytopeResult, CorrEqError> {
    let lp = build_ce_lp(game);
    best_ce_of(game, &lp).map(|r| r.0)
}

fn best_ce_of(
    game: &DiscreteGame,
    lp: &LinearProgram,
) -> Result<(CePolytopeResult, bool), CorrEqError> {
    let (a1, a2) = game.actions();
    match lp_solve(lp, Direction::Maximize) {
        Ok(sol) => {
            let joint = JointDistribution {
                probs: Matrix { rows: a1, cols: a2, data: sol.point },
            };
            let lambda = rank1_gap(&joint.probs)?;
            Ok((
                CePolytopeResult {
                    best_ce: Some(joint),
                    best_value: sol.value,
                    lambda,
                    sum_diam_squared: 0.0,
                    d_max: 0.0,
                    directions: 0,
                    confidence: DEFAULT_CONFIDENCE,
                    status: CeStatus::Solved,
                },
                true,
            ))
        }
        Err(CorrEqError::Infeasible) => {
            Ok((infeasible_result(0, DEFAULT_CONFIDENCE), false))
        }
        Err(e) => Err(e),
    }
}

/// Full diagnostics: best CE, rank-1 gap, and diameter bound at the given
/// confidence with `k` random directions.
pub fn analyze_ce_polytope(
    game: &DiscreteGame,
    k: u32,
    confidence: f64,
    seed: u64,
) -> Result<CePolytopeResult, CorrEqError> {
    let lp = build_ce_lp(game);
    let (mut result, solved) = best_ce_of(game, &lp)?;
    result.directions = k;
    result.confidence = confidence;
    if !solved {
        return Ok(result);
    }
    match sum_diam_squared(k, &lp, seed) {
        Ok(sum) => {
            result.sum_diam_squared = sum;
            result.d_max = d_max_from_sum(sum, confidence, k, QuantileConvention::UpperTail)?;
            Ok(result)
        }
        Err(CorrEqError::Infeasible) => Ok(infeasible_result(k, confidence)),
        Err(e) => Err(e),
    }
}
