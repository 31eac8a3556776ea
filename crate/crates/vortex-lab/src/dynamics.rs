//! Dual-space dynamics: the cumulative-payoff state, MWU and FTRL one-step
//! updates, step-size schedules, the primal transform, the Eshel–Akin reduced
//! coordinates, and trajectory simulation.
//!
//! Convention: dual coordinates absorb the step-size, so the primal mixed
//! strategy is the plain softmax of the dual block and one update step reads
//! `r' = r + eps * E(r)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{BimatrixGame, Game, GraphicalGame};

/// Point in the cumulative-payoff (dual) space: one real vector per player.
/// Bimatrix games use blocks `[p, q]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualState {
    pub blocks: Vec<Vec<f64>>,
}

impl DualState {
    pub fn new(blocks: Vec<Vec<f64>>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::Validation("need at least two player blocks".into()));
        }
        for b in &blocks {
            if b.len() < 2 {
                return Err(Error::Validation("each block needs length >= 2".into()));
            }
            if b.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation("non-finite dual coordinate".into()));
            }
        }
        Ok(Self { blocks })
    }

    pub fn bimatrix(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        Self::new(vec![p, q])
    }

    /// Origin state matching a game's strategy counts (uniform primal image).
    pub fn origin(counts: &[usize]) -> Self {
        Self {
            blocks: counts.iter().map(|&c| vec![0.0; c]).collect(),
        }
    }

    pub fn p(&self) -> &[f64] {
        &self.blocks[0]
    }

    pub fn q(&self) -> &[f64] {
        &self.blocks[1]
    }

    /// Flat copy of all coordinates, blocks concatenated in player order.
    pub fn flat(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Largest coordinate-wise distance to another state.
    pub fn linf_distance(&self, other: &DualState) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Numerically safe softmax: subtracts the max coordinate before
/// exponentiating. Output is strictly positive and sums to 1.
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|&z| (z - mx).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// The primal transform: per-block softmax of the dual coordinates.
pub fn primal_of_dual(r: &DualState) -> Vec<Vec<f64>> {
    r.blocks.iter().map(|b| softmax(b)).collect()
}

/// Step-size schedule. The injectivity bound `eps < 1/(4 d_bar)` (with
/// `d_bar` the maximum degree of the game graph, 1 for bimatrix games) is
/// enforced by [`StepSchedule::validate`] at configuration time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepSchedule {
    Constant { eps: f64 },
    /// `eps_t = min(c0, c1 / sqrt(t))`.
    Diminishing { c0: f64, c1: f64 },
}

impl StepSchedule {
    pub fn validate(&self, d_bar: usize) -> Result<()> {
        let cap = 1.0 / (4.0 * d_bar.max(1) as f64);
        match *self {
            StepSchedule::Constant { eps } => {
                if !(eps > 0.0) || !eps.is_finite() {
                    return Err(Error::Validation(format!("step-size must be > 0, got {eps}")));
                }
                if eps >= cap {
                    return Err(Error::Validation(format!(
                        "step-size {eps} violates the injectivity bound eps < {cap}"
                    )));
                }
            }
            StepSchedule::Diminishing { c0, c1 } => {
                if !(c0 > 0.0 && c0.is_finite()) || c0 >= cap {
                    return Err(Error::Validation(format!(
                        "diminishing cap c0 = {c0} must lie in (0, {cap})"
                    )));
                }
                if !(c1 > 0.0 && c1.is_finite()) {
                    return Err(Error::Validation(format!("c1 must be > 0, got {c1}")));
                }
            }
        }
        Ok(())
    }

    /// Step-size for step `t` (1-based).
    pub fn step_size(&self, t: u64) -> f64 {
        debug_assert!(t >= 1);
        match *self {
            StepSchedule::Constant { eps } => eps,
            StepSchedule::Diminishing { c0, c1 } => c0.min(c1 / (t as f64).sqrt()),
        }
    }
}

/// Separable regularizer applied uniformly to each strategy coordinate of a
/// player. `d1` and `d2` are the first and second derivatives of the scalar
/// function `h` on `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regularizer {
    /// `h(z) = z ln z`; gives MWU.
    Entropy,
    /// `h(z) = z^2 / 2`; flat second derivative. Its gradient is bounded at
    /// 0, so it supports shadow distributions but not interior responses.
    Quadratic,
    /// `h(z) = z^2/2 - lambda ln z`, `lambda > 0`.
    QuadraticLog { lambda: f64 },
}

impl Regularizer {
    pub fn validate(&self) -> Result<()> {
        if let Regularizer::QuadraticLog { lambda } = *self {
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(Error::Validation(format!(
                    "quadratic-log weight must be > 0, got {lambda}"
                )));
            }
        }
        Ok(())
    }

    /// First derivative `h'(z)`.
    pub fn d1(&self, z: f64) -> f64 {
        match *self {
            Regularizer::Entropy => z.ln() + 1.0,
            Regularizer::Quadratic => z,
            Regularizer::QuadraticLog { lambda } => z - lambda / z,
        }
    }

    /// Second derivative `h''(z)`; strictly positive on `(0, 1]`.
    pub fn d2(&self, z: f64) -> f64 {
        match *self {
            Regularizer::Entropy => 1.0 / z,
            Regularizer::Quadratic => 1.0,
            Regularizer::QuadraticLog { lambda } => 1.0 + lambda / (z * z),
        }
    }

    /// True when `h'(z) -> -inf` as `z -> 0+`, which keeps FTRL responses
    /// strictly inside the simplex.
    pub fn is_steep(&self) -> bool {
        !matches!(self, Regularizer::Quadratic)
    }
}

const FTRL_MAX_ITERS: usize = 200;
const FTRL_SUM_TOL: f64 = 1e-12;

/// Inverse of `h'` by bisection: the unique `z > 0` with `d1(z) = w`.
fn d1_inverse(reg: &Regularizer, w: f64) -> f64 {
    // h' is strictly increasing; bracket [lo, hi] by geometric search.
    let mut lo = 0.5;
    while reg.d1(lo) > w {
        lo *= 0.5;
        if lo < 1e-300 {
            return lo; // steep regularizer never reaches this in practice
        }
    }
    let mut hi = 1.0;
    while reg.d1(hi) < w {
        hi *= 2.0;
        if hi > 1e300 {
            return hi;
        }
    }
    for _ in 0..FTRL_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if reg.d1(mid) < w {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// FTRL response: the unique fully mixed `x` maximizing
/// `<eps * p, x> - h(x)` over the simplex, characterized by
/// `eps * p_j - h'(x_j) = v` for a scalar `v` with `sum x = 1`.
/// Solved by monotone bisection on `v`.
pub fn ftrl_response(p: &[f64], reg: &Regularizer, eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Validation(format!("eps must be > 0, got {eps}")));
    }
    reg.validate()?;
    if !reg.is_steep() {
        return Err(Error::Domain(
            "regularizer gradient is bounded at 0; response may leave the open simplex".into(),
        ));
    }
    let n = p.len();
    if n < 2 {
        return Err(Error::Validation("need at least 2 coordinates".into()));
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite payoff coordinate".into()));
    }

    let w: Vec<f64> = p.iter().map(|&v| eps * v).collect();
    let wmax = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let pivot = reg.d1(1.0 / n as f64);
    // At v = wmax - pivot every x_j <= 1/n; at v = wmin - pivot every
    // x_j >= 1/n. The sum is continuous and decreasing in v.
    let mut v_lo = wmin - pivot;
    let mut v_hi = wmax - pivot;
    let sum_at = |v: f64| -> f64 { w.iter().map(|&wj| d1_inverse(reg, wj - v)).sum() };

    let mut v = 0.5 * (v_lo + v_hi);
    let mut converged = v_hi - v_lo <= 0.0;
    for _ in 0..FTRL_MAX_ITERS {
        v = 0.5 * (v_lo + v_hi);
        let s = sum_at(v);
        if (s - 1.0).abs() <= FTRL_SUM_TOL {
            converged = true;
            break;
        }
        if s > 1.0 {
            v_lo = v;
        } else {
            v_hi = v;
        }
        if v_hi - v_lo <= 1e-16 * (1.0 + v.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "FTRL response bisection exhausted {FTRL_MAX_ITERS} iterations; residual {}",
            (sum_at(v) - 1.0).abs()
        )));
    }
    let mut x: Vec<f64> = w.iter().map(|&wj| d1_inverse(reg, wj - v)).collect();
    let s: f64 = x.iter().sum();
    for xi in &mut x {
        *xi /= s;
    }
    Ok(x)
}

/// Which update rule drives the dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Dynamic {
    Mwu,
    /// One regularizer per player. Dual coordinates absorb the step-size, so
    /// responses are evaluated at effective scale 1.
    Ftrl { regs: Vec<Regularizer> },
}

impl Dynamic {
    pub fn validate(&self, player_count: usize) -> Result<()> {
        if let Dynamic::Ftrl { regs } = self {
            if regs.len() != player_count {
                return Err(Error::Validation(format!(
                    "{} regularizers for {} players",
                    regs.len(),
                    player_count
                )));
            }
            for r in regs {
                r.validate()?;
                if !r.is_steep() {
                    return Err(Error::Validation(
                        "FTRL dynamics need a steep regularizer (unbounded gradient at 0)".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The mixed strategies each player feeds to the others: softmax blocks for
/// MWU, regularized responses for FTRL.
pub fn response_blocks(dynamic: &Dynamic, r: &DualState) -> Result<Vec<Vec<f64>>> {
    match dynamic {
        Dynamic::Mwu => Ok(primal_of_dual(r)),
        Dynamic::Ftrl { regs } => {
            if regs.len() != r.blocks.len() {
                return Err(Error::Validation(format!(
                    "{} regularizers for {} player blocks",
                    regs.len(),
                    r.blocks.len()
                )));
            }
            r.blocks
                .iter()
                .zip(regs)
                .map(|(b, reg)| ftrl_response(b, reg, 1.0))
                .collect()
        }
    }
}

/// The payoff field `E`: expected payoff of each pure strategy against the
/// opponents' mixed strategies `xs`.
pub fn payoff_field(game: &Game, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    match game {
        Game::Bimatrix(g) => {
            let (x, y) = (&xs[0], &xs[1]);
            let ep: Vec<f64> = g.a.iter().map(|row| dot(row, y)).collect();
            let eq: Vec<f64> = (0..g.m())
                .map(|k| (0..g.n()).map(|j| g.b[j][k] * x[j]).sum())
                .collect();
            vec![ep, eq]
        }
        Game::Graphical(g) => {
            let mut e: Vec<Vec<f64>> = g
                .strategy_counts
                .iter()
                .map(|&c| vec![0.0; c])
                .collect();
            for edge in &g.edges {
                let (x1, x2) = (&xs[edge.i1], &xs[edge.i2]);
                for (j, row) in edge.payoff.iter().enumerate() {
                    e[edge.i1][j] += dot(row, x2);
                }
                for k in 0..x2.len() {
                    // i2's payoff matrix is the negated transpose of the edge.
                    e[edge.i2][k] -= (0..x1.len()).map(|j| edge.payoff[j][k] * x1[j]).sum::<f64>();
                }
            }
            e
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One step of the chosen dynamic: `r' = r + eps * E(responses(r))`.
pub fn dynamic_step(game: &Game, dynamic: &Dynamic, r: &DualState, eps: f64) -> Result<DualState> {
    let xs = response_blocks(dynamic, r)?;
    let e = payoff_field(game, &xs);
    let blocks = r
        .blocks
        .iter()
        .zip(&e)
        .map(|(b, eb)| b.iter().zip(eb).map(|(v, de)| v + eps * de).collect())
        .collect();
    Ok(DualState { blocks })
}

/// MWU step on a bimatrix game.
pub fn mwu_step(game: &BimatrixGame, r: &DualState, eps: f64) -> DualState {
    dynamic_step(&Game::Bimatrix(game.clone()), &Dynamic::Mwu, r, eps)
        .expect("MWU step cannot fail on finite inputs")
}

/// MWU step on a graphical game.
pub fn mwu_step_graphical(game: &GraphicalGame, r: &DualState, eps: f64) -> DualState {
    dynamic_step(&Game::Graphical(game.clone()), &Dynamic::Mwu, r, eps)
        .expect("MWU step cannot fail on finite inputs")
}

/// FTRL step on a bimatrix game with per-player regularizers.
pub fn ftrl_step(
    game: &BimatrixGame,
    r: &DualState,
    eps: f64,
    regs: &[Regularizer],
) -> Result<DualState> {
    dynamic_step(
        &Game::Bimatrix(game.clone()),
        &Dynamic::Ftrl {
            regs: regs.to_vec(),
        },
        r,
        eps,
    )
}

/// Recorded trajectory of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `(t, state)` pairs with strictly increasing `t`; always contains
    /// `t = 0` and `t = T`.
    pub states: Vec<(u64, DualState)>,
    pub stride: u64,
}

/// Iterate the dynamic for `t_max` steps, recording every `stride`-th state
/// plus the first and last. Deterministic.
pub fn simulate(
    game: &Game,
    r0: &DualState,
    schedule: &StepSchedule,
    t_max: u64,
    dynamic: &Dynamic,
    stride: u64,
) -> Result<Trajectory> {
    if t_max < 1 {
        return Err(Error::Validation("horizon must be >= 1".into()));
    }
    if stride < 1 {
        return Err(Error::Validation("stride must be >= 1".into()));
    }
    let d_bar = match game {
        Game::Bimatrix(_) => 1,
        Game::Graphical(g) => g.max_degree(),
    };
    schedule.validate(d_bar)?;
    dynamic.validate(r0.blocks.len())?;

    let mut states = Vec::with_capacity((t_max / stride + 2) as usize);
    let mut r = r0.clone();
    states.push((0, r.clone()));
    for t in 1..=t_max {
        let eps = schedule.step_size(t);
        r = dynamic_step(game, dynamic, &r, eps)
            .map_err(|e| Error::Numeric(format!("step {t}: {e}")))?;
        if t % stride == 0 || t == t_max {
            states.push((t, r.clone()));
        }
    }
    Ok(Trajectory { states, stride })
}

/// Eshel–Akin reduced coordinates: `f_j = ln x_j - ln x_n`, dropping the
/// redundant last coordinate.
pub fn ea_forward(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::Validation("need at least 2 coordinates".into()));
    }
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::Domain("EA transform needs strictly positive input".into()));
    }
    let last = x[x.len() - 1].ln();
    Ok(x[..x.len() - 1].iter().map(|&v| v.ln() - last).collect())
}

/// Inverse of [`ea_forward`]: renormalize `(e^{f_1}, ..., e^{f_{n-1}}, 1)`.
pub fn ea_inverse(f: &[f64]) -> Result<Vec<f64>> {
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite EA coordinate".into()));
    }
    let mut ext: Vec<f64> = f.to_vec();
    ext.push(0.0);
    Ok(softmax(&ext))
}

/// KL divergence `KL(x_star || x) = sum x*_j ln(x*_j / x_j)` with the
/// `0 ln 0 = 0` convention; `+inf` where `x` vanishes on the support of
/// `x_star`.
pub fn kl_divergence(x: &[f64], x_star: &[f64]) -> f64 {
    x_star
        .iter()
        .zip(x)
        .map(|(&s, &v)| {
            if s == 0.0 {
                0.0
            } else if v == 0.0 {
                f64::INFINITY
            } else {
                s * (s / v).ln()
            }
        })
        .sum()
}
