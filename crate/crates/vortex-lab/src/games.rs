//! Game families: bimatrix games, graphical polymatrix games with zero-sum
//! edges, the generalized rock-paper-scissors family, and the triviality gap
//! `c(A)` measuring the distance of a payoff matrix from the dominant-strategy
//! (row-minus-column) form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<f64>>;

/// Two-player game in normal form. Entries are dimensionless payoffs in
/// `[-1, 1]`; `A` is the row player's matrix, `B` the column player's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimatrixGame {
    pub a: Matrix,
    pub b: Matrix,
}

impl BimatrixGame {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        validate_payoff_matrix(&a)?;
        validate_payoff_matrix(&b)?;
        if a.len() != b.len() || a[0].len() != b[0].len() {
            return Err(Error::Validation(format!(
                "A is {}x{} but B is {}x{}",
                a.len(),
                a[0].len(),
                b.len(),
                b[0].len()
            )));
        }
        Ok(Self { a, b })
    }

    /// Row player's strategy count.
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Column player's strategy count.
    pub fn m(&self) -> usize {
        self.a[0].len()
    }

    pub fn is_zero_sum(&self) -> bool {
        self.a
            .iter()
            .zip(&self.b)
            .all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| x + y == 0.0))
    }
}

fn validate_payoff_matrix(a: &Matrix) -> Result<()> {
    let n = a.len();
    if n < 2 {
        return Err(Error::Validation(format!("need at least 2 rows, got {n}")));
    }
    let m = a[0].len();
    if m < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 columns, got {m}"
        )));
    }
    for row in a {
        if row.len() != m {
            return Err(Error::Validation("ragged payoff matrix".into()));
        }
        for &v in row {
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(Error::Validation(format!(
                    "payoff entry {v} outside [-1, 1]"
                )));
            }
        }
    }
    Ok(())
}

/// Zero-sum game from the row player's matrix: `B = -A` elementwise.
pub fn zero_sum_from(a: Matrix) -> Result<BimatrixGame> {
    validate_payoff_matrix(&a)?;
    let b = a
        .iter()
        .map(|row| row.iter().map(|v| -v).collect())
        .collect();
    Ok(BimatrixGame { a, b })
}

/// The Matching Pennies game, `A = I`, `B = -I`.
pub fn matching_pennies() -> BimatrixGame {
    zero_sum_from(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).expect("static matrix is valid")
}

/// Parameters of the generalized rock-paper-scissors family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpsParams {
    pub p: f64,
    pub q: f64,
}

impl RpsParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 0.0 && q >= 0.0) || !p.is_finite() || !q.is_finite() {
            return Err(Error::Validation(format!("P, Q must be >= 0, got ({p}, {q})")));
        }
        if p == 0.0 && q == 0.0 {
            return Err(Error::Validation("(P, Q) must not both be zero".into()));
        }
        Ok(Self { p, q })
    }
}

/// Generalized RPS game with payoffs `(A, A^T)` where `A` is the 3x3 cyclic
/// matrix with wins worth `P` and losses `-Q`. With `normalize` set, entries
/// are rescaled by `1/max(P, Q)` when `max(P, Q) > 1`.
pub fn rps_game(params: RpsParams, normalize: bool) -> Result<BimatrixGame> {
    let RpsParams { mut p, mut q } = params;
    let mx = p.max(q);
    if mx > 1.0 {
        if normalize {
            p /= mx;
            q /= mx;
        } else {
            return Err(Error::Validation(format!(
                "RPS entries out of [-1, 1] for (P, Q) = ({p}, {q}); pass normalize to rescale"
            )));
        }
    }
    let a = vec![
        vec![0.0, p, -q],
        vec![-q, 0.0, p],
        vec![p, -q, 0.0],
    ];
    let b = transpose(&a);
    BimatrixGame::new(a, b)
}

fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    let m = a[0].len();
    (0..m)
        .map(|k| (0..n).map(|j| a[j][k]).collect())
        .collect()
}

/// One edge of a graphical polymatrix game: a zero-sum bimatrix game between
/// players `i1` and `i2`. Only the `i1`-side payoff matrix is stored; `i2`
/// receives its negated transpose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i1: usize,
    pub i2: usize,
    pub payoff: Matrix,
}

/// Graphical constant-sum game: players on a graph, every edge a zero-sum
/// bimatrix game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphicalGame {
    pub strategy_counts: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl GraphicalGame {
    pub fn new(strategy_counts: Vec<usize>, edges: Vec<Edge>) -> Result<Self> {
        let players = strategy_counts.len();
        if players < 2 {
            return Err(Error::Validation("need at least 2 players".into()));
        }
        for (i, &c) in strategy_counts.iter().enumerate() {
            if c < 2 {
                return Err(Error::Validation(format!(
                    "player {i} needs at least 2 strategies, got {c}"
                )));
            }
        }
        if edges.is_empty() {
            return Err(Error::Validation("need at least one edge".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.i1 >= players || e.i2 >= players {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) references a player out of range",
                    e.i1, e.i2
                )));
            }
            if e.i1 == e.i2 {
                return Err(Error::Validation("self-edges are not allowed".into()));
            }
            let key = (e.i1.min(e.i2), e.i1.max(e.i2));
            if !seen.insert(key) {
                return Err(Error::Validation(format!(
                    "duplicate edge between players {} and {}",
                    key.0, key.1
                )));
            }
            if e.payoff.len() != strategy_counts[e.i1] {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) matrix has {} rows, expected {}",
                    e.i1,
                    e.i2,
                    e.payoff.len(),
                    strategy_counts[e.i1]
                )));
            }
            for row in &e.payoff {
                if row.len() != strategy_counts[e.i2] {
                    return Err(Error::Validation(format!(
                        "edge ({}, {}) matrix has ragged or wrong-width rows",
                        e.i1, e.i2
                    )));
                }
                for &v in row {
                    if !v.is_finite() || v.abs() > 1.0 {
                        return Err(Error::Validation(format!(
                            "edge payoff entry {v} outside [-1, 1]"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            strategy_counts,
            edges,
        })
    }

    pub fn player_count(&self) -> usize {
        self.strategy_counts.len()
    }

    /// Total strategy count over all players (dual-space dimension).
    pub fn n_total(&self) -> usize {
        self.strategy_counts.iter().sum()
    }

    /// Maximum degree of the underlying graph.
    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.player_count()];
        for e in &self.edges {
            deg[e.i1] += 1;
            deg[e.i2] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Edge (i1, i2) viewed as a standalone zero-sum bimatrix game.
    pub fn edge_game(&self, e: &Edge) -> BimatrixGame {
        let b = transpose(&e.payoff)
            .iter()
            .map(|row| row.iter().map(|v| -v).collect::<Vec<_>>())
            .collect::<Matrix>();
        BimatrixGame {
            a: e.payoff.clone(),
            b: transpose(&b),
        }
    }
}

/// Any game the lab can load.
#[derive(Debug, Clone, PartialEq)]
pub enum Game {
    Bimatrix(BimatrixGame),
    Graphical(GraphicalGame),
}

/// JSON wire format for games.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GameDoc {
    Bimatrix {
        #[serde(rename = "A")]
        a: Matrix,
        #[serde(rename = "B")]
        b: Matrix,
    },
    Graphical {
        strategy_counts: Vec<usize>,
        edges: Vec<Edge>,
    },
    Rps {
        #[serde(rename = "P")]
        p: f64,
        #[serde(rename = "Q")]
        q: f64,
        #[serde(default)]
        normalize: bool,
    },
}

impl GameDoc {
    pub fn build(&self) -> Result<Game> {
        match self {
            GameDoc::Bimatrix { a, b } => Ok(Game::Bimatrix(BimatrixGame::new(a.clone(), b.clone())?)),
            GameDoc::Graphical {
                strategy_counts,
                edges,
            } => Ok(Game::Graphical(GraphicalGame::new(
                strategy_counts.clone(),
                edges.clone(),
            )?)),
            GameDoc::Rps { p, q, normalize } => Ok(Game::Bimatrix(rps_game(
                RpsParams::new(*p, *q)?,
                *normalize,
            )?)),
        }
    }
}

pub fn game_from_json(s: &str) -> Result<Game> {
    let doc: GameDoc =
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("game JSON: {e}")))?;
    doc.build()
}

pub fn game_to_json(game: &Game) -> String {
    let doc = match game {
        Game::Bimatrix(g) => GameDoc::Bimatrix {
            a: g.a.clone(),
            b: g.b.clone(),
        },
        Game::Graphical(g) => GameDoc::Graphical {
            strategy_counts: g.strategy_counts.clone(),
            edges: g.edges.clone(),
        },
    };
    serde_json::to_string_pretty(&doc).expect("game serialization cannot fail")
}

/// Absolute tolerance of the triviality-gap solve.
pub const TRIVIALITY_GAP_TOL: f64 = 1e-9;

/// The triviality gap `c(A)`: the minimum over offset vectors `a`, `b` of the
/// span (max minus min) of `A_jk - a_j + b_k`. Zero exactly for games where
/// both players have dominant strategies.
///
/// Solved as a parametric feasibility problem: a span `s` is achievable iff
/// the difference constraints `a_j - b_k <= A_jk` and `b_k - a_j <= s - A_jk`
/// admit a solution, which holds iff the constraint graph has no negative
/// cycle. Feasibility is monotone in `s`, so bisection pins the optimum.
pub fn triviality_gap(a: &Matrix) -> Result<f64> {
    let n = a.len();
    if n == 0 || a[0].is_empty() {
        return Err(Error::Validation("empty matrix".into()));
    }
    let m = a[0].len();
    for row in a {
        if row.len() != m {
            return Err(Error::Validation("ragged matrix".into()));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite matrix entry".into()));
        }
    }

    let flat: Vec<f64> = a.iter().flatten().copied().collect();
    let max = flat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = flat.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = max - min;
    if hi <= TRIVIALITY_GAP_TOL {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    if span_feasible(a, lo) {
        return Ok(0.0);
    }

    let mut iters = 0usize;
    while hi - lo > TRIVIALITY_GAP_TOL {
        iters += 1;
        if iters > 200 {
            return Err(Error::Numeric(format!(
                "triviality gap bisection stalled: bracket [{lo}, {hi}], residual {}",
                hi - lo
            )));
        }
        let mid = 0.5 * (lo + hi);
        if span_feasible(a, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bellman-Ford feasibility of the difference-constraint system for span `s`.
fn span_feasible(a: &Matrix, s: f64) -> bool {
    let n = a.len();
    let m = a[0].len();
    // Nodes 0..n are row offsets, n..n+m are column offsets.
    // x_u - x_v <= w becomes edge (v -> u, w).
    let mut edges = Vec::with_capacity(2 * n * m);
    for (j, row) in a.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            edges.push((n + k, j, v)); // a_j - b_k <= A_jk
            edges.push((j, n + k, s - v)); // b_k - a_j <= s - A_jk
        }
    }
    let mut dist = vec![0.0f64; n + m];
    for _ in 0..(n + m) {
        let mut changed = false;
        for &(u, v, w) in &edges {
            let cand = dist[u] + w;
            if cand < dist[v] - 1e-15 {
                dist[v] = cand;
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
    // Still relaxing after |V| rounds: negative cycle.
    false
}

/// True iff `triviality_gap(a) <= tol`.
pub fn is_trivial(a: &Matrix, tol: f64) -> Result<bool> {
    if tol <= 0.0 {
        return Err(Error::Validation("tolerance must be positive".into()));
    }
    Ok(triviality_gap(a)? <= tol)
}

/// Build the trivial-form matrix `A_jk = a_j - b_k`.
pub fn trivial_form(a_off: &[f64], b_off: &[f64]) -> Matrix {
    a_off
        .iter()
        .map(|aj| b_off.iter().map(|bk| aj - bk).collect())
        .collect()
}
