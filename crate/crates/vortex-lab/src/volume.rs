//! Volume analysis of one update step: Jacobian matrices of the dual-space
//! maps, exact determinants, the second-order (eps^2) volume coefficient,
//! shadow distributions, theoretical step-size thresholds, and ensemble
//! evolution with per-point volume multipliers.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    ftrl_response, primal_of_dual, DualState, Dynamic, Regularizer, StepSchedule,
};
use crate::error::{Error, Result};
use crate::games::{BimatrixGame, Game, GraphicalGame, Matrix};

/// One-step Jacobian `M = I + eps * dE/dr` at a dual point.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianStep {
    pub matrix: Matrix,
    pub eps: f64,
    pub source: DualState,
}

fn identity(n: usize) -> Matrix {
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat_vec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn mat_t_vec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    let m = a[0].len();
    (0..m)
        .map(|k| a.iter().zip(v).map(|(row, &x)| row[k] * x).sum())
        .collect()
}

/// Fill the two cross blocks of an MWU Jacobian for a pairwise interaction.
/// Rows `ro..` belong to the row player with primal `x` and payoff matrix
/// `a`; rows `co..` to the column player with primal `y` and payoffs
/// `b` (same `n x m` orientation as `a`).
fn fill_cross_blocks(
    m: &mut Matrix,
    ro: usize,
    co: usize,
    a: &Matrix,
    b: &Matrix,
    x: &[f64],
    y: &[f64],
    eps: f64,
) {
    let ay = mat_vec(a, y);
    let btx = mat_t_vec(b, x);
    for j in 0..x.len() {
        for k in 0..y.len() {
            m[ro + j][co + k] = eps * y[k] * (a[j][k] - ay[j]);
            m[co + k][ro + j] = eps * x[j] * (b[j][k] - btx[k]);
        }
    }
}

/// Jacobian of the MWU step on a bimatrix game. Diagonal entries are 1,
/// within-player blocks vanish, and the cross blocks are
/// `M_jk = eps * y_k (A_jk - [Ay]_j)` and `M_kj = eps * x_j (B_jk - [B^T x]_k)`.
pub fn jacobian_mwu(game: &BimatrixGame, r: &DualState, eps: f64) -> JacobianStep {
    let xs = primal_of_dual(r);
    let (n, m) = (game.n(), game.m());
    let mut mat = identity(n + m);
    fill_cross_blocks(&mut mat, 0, n, &game.a, &game.b, &xs[0], &xs[1], eps);
    JacobianStep {
        matrix: mat,
        eps,
        source: r.clone(),
    }
}

/// Jacobian of the FTRL step. Cross entries use the raw shadow weights
/// `x_bar_j = 1 / h''(x_j)`: `M_jk = eps * y_bar_k (A_jk - sum_l A_jl y_bar_l / H)`.
pub fn jacobian_ftrl(
    game: &BimatrixGame,
    r: &DualState,
    eps: f64,
    regs: &[Regularizer],
) -> Result<JacobianStep> {
    if regs.len() != 2 {
        return Err(Error::Validation(format!(
            "need 2 regularizers, got {}",
            regs.len()
        )));
    }
    let x = ftrl_response(r.p(), &regs[0], 1.0)?;
    let y = ftrl_response(r.q(), &regs[1], 1.0)?;
    let xbar = shadow_weights(&x, &regs[0])?;
    let ybar = shadow_weights(&y, &regs[1])?;
    let hx: f64 = xbar.iter().sum();
    let hy: f64 = ybar.iter().sum();

    let (n, m) = (game.n(), game.m());
    let mut mat = identity(n + m);
    // Same structure as the MWU cross blocks, but the averaging weights are
    // the normalized shadow weights while the prefactor keeps the raw ones.
    let a_avg = mat_vec(&game.a, &ybar.iter().map(|v| v / hy).collect::<Vec<_>>());
    let b_avg = mat_t_vec(&game.b, &xbar.iter().map(|v| v / hx).collect::<Vec<_>>());
    for j in 0..n {
        for k in 0..m {
            mat[j][n + k] = eps * ybar[k] * (game.a[j][k] - a_avg[j]);
            mat[n + k][j] = eps * xbar[j] * (game.b[j][k] - b_avg[k]);
        }
    }
    Ok(JacobianStep {
        matrix: mat,
        eps,
        source: r.clone(),
    })
}

/// Jacobian of the MWU step on a graphical game: block matrix whose cross
/// blocks for each edge equal the pairwise MWU blocks of that edge's game;
/// non-adjacent players contribute zero blocks.
pub fn jacobian_graphical(game: &GraphicalGame, r: &DualState, eps: f64) -> JacobianStep {
    let xs = primal_of_dual(r);
    let offsets: Vec<usize> = game
        .strategy_counts
        .iter()
        .scan(0, |acc, &c| {
            let o = *acc;
            *acc += c;
            Some(o)
        })
        .collect();
    let total = game.n_total();
    let mut mat = identity(total);
    for e in &game.edges {
        let pair = game.edge_game(e);
        fill_cross_blocks(
            &mut mat,
            offsets[e.i1],
            offsets[e.i2],
            &pair.a,
            &pair.b,
            &xs[e.i1],
            &xs[e.i2],
            eps,
        );
    }
    JacobianStep {
        matrix: mat,
        eps,
        source: r.clone(),
    }
}

/// Raw shadow weights `1 / h''(x_j)` (unnormalized).
fn shadow_weights(x: &[f64], reg: &Regularizer) -> Result<Vec<f64>> {
    x.iter()
        .map(|&v| {
            let d2 = reg.d2(v);
            if d2 <= 0.0 || !d2.is_finite() {
                Err(Error::Domain(format!(
                    "regularizer second derivative {d2} at {v} is not positive"
                )))
            } else {
                Ok(1.0 / d2)
            }
        })
        .collect()
}

/// Shadow distribution: `(1/h''(x_j)) / sum_l (1/h''(x_l))`.
pub fn shadow_distribution(x: &[f64], reg: &Regularizer) -> Result<Vec<f64>> {
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::Domain("shadow distribution needs positive input".into()));
    }
    let w = shadow_weights(x, reg)?;
    let s: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / s).collect())
}

/// The second-order volume coefficient
/// `C = - sum_{j,k} x_j y_k (A_jk - [Ay]_j)(B_jk - [B^T x]_k)`:
/// the eps^2 coefficient of `det(I + eps * dE/dr)`.
pub fn second_order_coeff(game: &BimatrixGame, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != game.n() || y.len() != game.m() {
        return Err(Error::Validation("point dimensions do not match the game".into()));
    }
    if x.iter().chain(y).any(|&v| v <= 0.0) {
        return Err(Error::Domain("need strictly positive probability vectors".into()));
    }
    let ay = mat_vec(&game.a, y);
    let btx = mat_t_vec(&game.b, x);
    let mut c = 0.0;
    for j in 0..x.len() {
        for k in 0..y.len() {
            c -= x[j] * y[k] * (game.a[j][k] - ay[j]) * (game.b[j][k] - btx[k]);
        }
    }
    Ok(c)
}

/// FTRL analogue of [`second_order_coeff`]: the base formula evaluated at the
/// shadow distributions, scaled by the product of total shadow weights.
pub fn second_order_coeff_ftrl(
    game: &BimatrixGame,
    x: &[f64],
    y: &[f64],
    regs: &[Regularizer],
) -> Result<f64> {
    if regs.len() != 2 {
        return Err(Error::Validation(format!(
            "need 2 regularizers, got {}",
            regs.len()
        )));
    }
    let xbar = shadow_weights(x, &regs[0])?;
    let ybar = shadow_weights(y, &regs[1])?;
    let hx: f64 = xbar.iter().sum();
    let hy: f64 = ybar.iter().sum();
    let xs: Vec<f64> = xbar.iter().map(|v| v / hx).collect();
    let ys: Vec<f64> = ybar.iter().map(|v| v / hy).collect();
    Ok(hx * hy * second_order_coeff(game, &xs, &ys)?)
}

/// Determinant by LU factorization with partial pivoting. Returns 0 for
/// singular input.
pub fn det(m: &JacobianStep) -> f64 {
    det_matrix(&m.matrix)
}

pub fn det_matrix(a: &Matrix) -> f64 {
    let n = a.len();
    let mut lu: Vec<Vec<f64>> = a.to_vec();
    let mut sign = 1.0f64;
    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, lu[r][col].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if pivot_val == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            lu.swap(pivot_row, col);
            sign = -sign;
        }
        let pivot = lu[col][col];
        for r in col + 1..n {
            let f = lu[r][col] / pivot;
            if f != 0.0 {
                for c in col..n {
                    let v = lu[col][c];
                    lu[r][c] -= f * v;
                }
            }
        }
    }
    sign * lu.iter().enumerate().map(|(i, row)| row[i]).product::<f64>()
}

/// Solve a small dense linear system `A x = b` (LU, partial pivoting).
fn solve_dense(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| m[r1][col].abs().partial_cmp(&m[r2][col].abs()).unwrap())
            .unwrap();
        if m[pivot_row][col] == 0.0 {
            return Err(Error::Numeric("singular system in polynomial fit".into()));
        }
        m.swap(pivot_row, col);
        let pivot = m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / pivot;
            for c in col..=n {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = m[row][n];
        for c in row + 1..n {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

/// Extract the eps^2 coefficient of `det(M(eps))` by fitting the listed
/// powers of eps to `det - 1` at `len(powers)` sample step-sizes
/// `base, 2*base, 4*base, ...`.
pub fn second_order_from_fit<F>(det_at: F, base_eps: f64, powers: &[u32]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let k = powers.len();
    let samples: Vec<f64> = (0..k).map(|i| base_eps * (1 << i) as f64).collect();
    let a: Matrix = samples
        .iter()
        .map(|&e| powers.iter().map(|&p| e.powi(p as i32)).collect())
        .collect();
    let b: Vec<f64> = samples.iter().map(|&e| det_at(e) - 1.0).collect();
    let coeffs = solve_dense(&a, &b)?;
    let idx = powers
        .iter()
        .position(|&p| p == 2)
        .ok_or_else(|| Error::Validation("power list must contain 2".into()))?;
    Ok(coeffs[idx])
}

/// Even-power fit (eps^2, eps^4, eps^6) at eps in {base, 2 base, 4 base}:
/// the right extraction for bimatrix games, where odd powers vanish.
pub fn second_order_even_fit<F>(det_at: F, base_eps: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    second_order_from_fit(det_at, base_eps, &[2, 4, 6])
}

/// Step-size threshold of the zero-sum volume-growth guarantee:
/// `min(1/(32 n^2 m^2), delta^2 c(A)^2 / 8)`.
pub fn epsilon_threshold_zero_sum(delta: f64, n: usize, m: usize, c_a: f64) -> f64 {
    let nm = (n * n * m * m) as f64;
    (1.0 / (32.0 * nm)).min(delta * delta * c_a * c_a / 8.0)
}

/// Graphical-game threshold: `min(1/(64 n^6), Cbar^2 / 8)` with `n` the total
/// strategy count.
pub fn epsilon_threshold_graphical(n_total: usize, cbar: f64) -> f64 {
    let n6 = (n_total as f64).powi(6);
    (1.0 / (64.0 * n6)).min(cbar * cbar / 8.0)
}

/// Extrema of the shadow machinery over the region slice of one player's
/// simplex (all entries >= delta), scanned on a lattice of the given
/// resolution. Returns `(max total shadow weight, min shadow probability)`.
pub fn shadow_extrema(
    reg: &Regularizer,
    count: usize,
    delta: f64,
    resolution: f64,
) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 1.0 / count as f64 + 1e-12) {
        return Err(Error::Validation(format!(
            "delta = {delta} leaves no room in a {count}-simplex"
        )));
    }
    let steps = (1.0 / resolution).round() as usize;
    let min_steps = (delta / resolution).ceil() as usize;
    let mut h_max = f64::NEG_INFINITY;
    let mut p_min = f64::INFINITY;
    let mut point = vec![0usize; count];
    scan_simplex(
        min_steps,
        count,
        0,
        steps,
        &mut point,
        &mut |cells: &[usize]| {
            let x: Vec<f64> = cells.iter().map(|&c| c as f64 * resolution).collect();
            let w: Vec<f64> = x.iter().map(|&v| 1.0 / reg.d2(v)).collect();
            let h: f64 = w.iter().sum();
            h_max = h_max.max(h);
            let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
            p_min = p_min.min(wmin / h);
        },
    );
    if !h_max.is_finite() {
        return Err(Error::Numeric("empty region lattice".into()));
    }
    Ok((h_max, p_min))
}

fn scan_simplex(
    min_steps: usize,
    count: usize,
    idx: usize,
    remaining: usize,
    point: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if idx == count - 1 {
        if remaining >= min_steps {
            point[idx] = remaining;
            visit(point);
        }
        return;
    }
    let reserve = min_steps * (count - 1 - idx);
    let hi = remaining.saturating_sub(reserve);
    for c in min_steps..=hi {
        point[idx] = c;
        scan_simplex(min_steps, count, idx + 1, remaining - c, point, visit);
    }
}

/// Conservative numerical estimates of the FTRL threshold quantities over the
/// region with primal entries >= delta, at lattice resolution 0.01:
/// `h_bar` = max total shadow weight over both players,
/// `delta_shadow` = min shadow probability over both players.
pub fn ftrl_region_estimates(
    regs: &[Regularizer],
    n: usize,
    m: usize,
    delta: f64,
) -> Result<(f64, f64)> {
    let (h1, d1) = shadow_extrema(&regs[0], n, delta, 0.01)?;
    let (h2, d2) = shadow_extrema(&regs[1], m, delta, 0.01)?;
    Ok((h1.max(h2), d1.min(d2)))
}

/// FTRL step-size threshold: the minimum of the four stated terms, with
/// `h_bar` and `delta_shadow` taken from lattice estimates.
pub fn epsilon_threshold_ftrl(
    delta: f64,
    n: usize,
    m: usize,
    c_a: f64,
    regs: &[Regularizer],
) -> Result<f64> {
    let (h_bar, delta_shadow) = ftrl_region_estimates(regs, n, m, delta)?;
    let (h_bar_half, _) = ftrl_region_estimates(regs, n, m, delta / 2.0)?;
    let nm = (n * n * m * m) as f64;
    let t1 = 1.0 / (2.0 * h_bar.max(2.0).powi(4) * nm);
    let t2 = delta_shadow * delta_shadow * c_a * c_a / 8.0;
    let t3 = 1.0 / (4.0 * h_bar_half);
    // min of h'' over z >= delta/2 across both players, scanned numerically.
    let mut d2_min = f64::INFINITY;
    let lo = delta / 2.0;
    let samples = 2000;
    for reg in regs {
        for i in 0..=samples {
            let z = lo + (1.0 - lo) * i as f64 / samples as f64;
            d2_min = d2_min.min(reg.d2(z));
        }
    }
    let t4 = delta / 9.0 * d2_min;
    Ok(t1.min(t2).min(t3).min(t4))
}

/// Which volume-growth guarantee to quote.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthKind {
    /// `1 + delta^2 c(A)^2 / 8 * eps^2`.
    ZeroSum { delta: f64, c_a: f64 },
    /// `1 + cbar / 2 * eps^2`.
    Graphical { cbar: f64 },
    /// `1 + delta_shadow^2 c(A)^2 / 8 * eps^2`.
    Ftrl { delta_shadow: f64, c_a: f64 },
}

/// Per-step lower bound on the volume multiplier.
pub fn growth_rate_bound(kind: &GrowthKind, eps: f64) -> f64 {
    let coeff = match *kind {
        GrowthKind::ZeroSum { delta, c_a } => delta * delta * c_a * c_a / 8.0,
        GrowthKind::Graphical { cbar } => cbar / 2.0,
        GrowthKind::Ftrl { delta_shadow, c_a } => {
            delta_shadow * delta_shadow * c_a * c_a / 8.0
        }
    };
    1.0 + coeff * eps * eps
}

/// True iff every row satisfies `|diag| > sum of off-diagonal |entries|`.
pub fn is_strictly_diagonally_dominant(m: &Matrix) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        let off: f64 = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.abs())
            .sum();
        row[i].abs() > off
    })
}

/// The region `R(delta)`: dual points whose primal image has every
/// probability at least `delta` (closed inequality).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub delta: f64,
}

impl RegionSpec {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Validation(format!("delta must be > 0, got {delta}")));
        }
        Ok(Self { delta })
    }
}

pub fn in_region(r: &DualState, spec: &RegionSpec) -> bool {
    primal_of_dual(r)
        .iter()
        .flatten()
        .all(|&v| v >= spec.delta)
}

/// One tracked point of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePoint {
    pub id: u64,
    pub state: DualState,
    /// Product of one-step Jacobian determinants along the path.
    pub multiplier: f64,
}

/// Coordinates of every point at one snapshot time. Coordinates are the
/// reduced Eshel–Akin pair when every player has 2 strategies, the full dual
/// vector otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: u64,
    pub coords: Vec<(u64, Vec<f64>)>,
}

/// A tagged point cloud with accumulated volume multipliers and snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub points: Vec<EnsemblePoint>,
    pub snapshots: Vec<Snapshot>,
}

impl Ensemble {
    pub fn from_states(states: Vec<DualState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Validation("ensemble needs at least one point".into()));
        }
        Ok(Self {
            points: states
                .into_iter()
                .enumerate()
                .map(|(i, state)| EnsemblePoint {
                    id: i as u64,
                    state,
                    multiplier: 1.0,
                })
                .collect(),
            snapshots: Vec::new(),
        })
    }

    /// Axis-aligned grid cloud in the reduced 2-strategy coordinates:
    /// `res x res` points over the ell-infinity ball of the given radius
    /// around `(f, g)`, mapped into dual states `p = (f, 0), q = (g, 0)`.
    pub fn grid_cloud_2x2(center: (f64, f64), radius: f64, res: usize) -> Result<Self> {
        if res < 2 {
            return Err(Error::Validation("grid resolution must be >= 2".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::Validation("grid radius must be > 0".into()));
        }
        let mut states = Vec::with_capacity(res * res);
        for i in 0..res {
            for j in 0..res {
                let f = center.0 - radius + 2.0 * radius * i as f64 / (res - 1) as f64;
                let g = center.1 - radius + 2.0 * radius * j as f64 / (res - 1) as f64;
                states.push(DualState::bimatrix(vec![f, 0.0], vec![g, 0.0])?);
            }
        }
        Self::from_states(states)
    }
}

/// Reduced snapshot coordinates: EA pair when all blocks have 2 strategies.
fn snapshot_coords(r: &DualState) -> Vec<f64> {
    if r.blocks.iter().all(|b| b.len() == 2) {
        // softmax is shift-invariant, so f = ln x_1 - ln x_2 = p_1 - p_2.
        r.blocks.iter().map(|b| b[0] - b[1]).collect()
    } else {
        r.flat()
    }
}

/// Advance every point of the ensemble `t_max` steps, multiplying each
/// point's volume multiplier by the Jacobian determinant at the pre-step
/// point, and recording snapshots at the requested times.
pub fn evolve_ensemble(
    game: &Game,
    ensemble: &Ensemble,
    schedule: &StepSchedule,
    t_max: u64,
    dynamic: &Dynamic,
    snapshot_times: &[u64],
) -> Result<Ensemble> {
    if snapshot_times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("snapshot times must be strictly increasing".into()));
    }
    if let Some(&last) = snapshot_times.last() {
        if last > t_max {
            return Err(Error::Validation(format!(
                "snapshot time {last} beyond horizon {t_max}"
            )));
        }
    }
    let d_bar = match game {
        Game::Bimatrix(_) => 1,
        Game::Graphical(g) => g.max_degree(),
    };
    schedule.validate(d_bar)?;
    dynamic.validate(ensemble.points[0].state.blocks.len())?;

    let jacobian = |r: &DualState, eps: f64| -> Result<JacobianStep> {
        match (game, dynamic) {
            (Game::Bimatrix(g), Dynamic::Mwu) => Ok(jacobian_mwu(g, r, eps)),
            (Game::Bimatrix(g), Dynamic::Ftrl { regs }) => jacobian_ftrl(g, r, eps, regs),
            (Game::Graphical(g), Dynamic::Mwu) => Ok(jacobian_graphical(g, r, eps)),
            (Game::Graphical(_), Dynamic::Ftrl { .. }) => Err(Error::Unsupported(
                "FTRL dynamics on graphical games".into(),
            )),
        }
    };

    let mut out = ensemble.clone();
    let mut snap_iter = snapshot_times.iter().peekable();
    if snap_iter.peek() == Some(&&0) {
        snap_iter.next();
        out.snapshots.push(Snapshot {
            t: 0,
            coords: out
                .points
                .iter()
                .map(|p| (p.id, snapshot_coords(&p.state)))
                .collect(),
        });
    }
    for t in 1..=t_max {
        let eps = schedule.step_size(t);
        for p in &mut out.points {
            let jac = jacobian(&p.state, eps)
                .map_err(|e| Error::Numeric(format!("point {}, step {t}: {e}", p.id)))?;
            p.multiplier *= det(&jac);
            p.state = crate::dynamics::dynamic_step(game, dynamic, &p.state, eps)
                .map_err(|e| Error::Numeric(format!("point {}, step {t}: {e}", p.id)))?;
        }
        if snap_iter.peek() == Some(&&t) {
            snap_iter.next();
            out.snapshots.push(Snapshot {
                t,
                coords: out
                    .points
                    .iter()
                    .map(|p| (p.id, snapshot_coords(&p.state)))
                    .collect(),
            });
        }
    }
    Ok(out)
}

/// Convex hull area of a planar point set (monotone chain + shoelace).
/// Fewer than 3 non-collinear points give 0.
pub fn hull_measure(points: &[(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let chain = |iter: &mut dyn Iterator<Item = (f64, f64)>| {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for p in iter {
            while out.len() >= 2 && cross(out[out.len() - 2], out[out.len() - 1], p) <= 0.0 {
                out.pop();
            }
            out.push(p);
        }
        out.pop(); // endpoint repeats in the other chain
        out
    };
    let mut hull = chain(&mut pts.iter().copied());
    hull.extend(chain(&mut pts.iter().rev().copied()));
    if hull.len() < 3 {
        return 0.0;
    }
    let mut area2 = 0.0;
    for i in 0..hull.len() {
        let (x1, y1) = hull[i];
        let (x2, y2) = hull[(i + 1) % hull.len()];
        area2 += x1 * y2 - x2 * y1;
    }
    area2.abs() / 2.0
}
