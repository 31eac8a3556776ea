//! Chaos quantification and closed-form specializations: the boundary-time
//! root, Lyapunov/divergence measurements, diminishing-step admissibility,
//! and the generalized rock-paper-scissors and 2x2 reductions.

use serde::{Deserialize, Serialize};

use crate::dynamics::{dynamic_step, DualState, Dynamic, StepSchedule};
use crate::error::{Error, Result};
use crate::games::Game;

/// Result of the boundary-time solve: the first positive root of
/// `(1 + delta^2 c^2 eps^2 / 8)^t * vol0 = (2 eps t + gamma)^(m+n)`,
/// with both sides reported in log space at the root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryTime {
    pub t_star: f64,
    pub lhs_log: f64,
    pub rhs_log: f64,
}

/// First positive root of the boundary-time equation, found by doubling scan
/// plus bisection in log space to relative tolerance 1e-9. Valid inputs have
/// `vol0 <= gamma^(m+n)` (the exponential side starts below the box side).
pub fn boundary_time(
    vol0: f64,
    delta: f64,
    c_a: f64,
    eps: f64,
    n: usize,
    m: usize,
    gamma: f64,
) -> Result<BoundaryTime> {
    if !(vol0 > 0.0) || !(gamma > 0.0) || !(delta > 0.0) || !(c_a > 0.0) || !(eps > 0.0) {
        return Err(Error::Validation(
            "boundary-time inputs must all be positive".into(),
        ));
    }
    let dims = (n + m) as f64;
    let ln_growth = (delta * delta * c_a * c_a * eps * eps / 8.0).ln_1p();
    let lhs = |t: f64| t * ln_growth + vol0.ln();
    let rhs = |t: f64| dims * (2.0 * eps * t + gamma).ln();
    if lhs(0.0) > rhs(0.0) + 1e-12 {
        return Err(Error::Validation(format!(
            "initial volume {vol0} already exceeds the hyper-box bound {}",
            gamma.powf(dims)
        )));
    }

    // Doubling scan for the first bracket [lo, hi] with a sign change.
    let mut lo = 0.0;
    let mut hi = 1.0;
    let cap = (1u64 << 60) as f64;
    while lhs(hi) <= rhs(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Err(Error::Numeric(format!(
                "no boundary crossing within 2^60 steps (eps = {eps}, c(A) = {c_a})"
            )));
        }
    }
    // Bisection to relative tolerance.
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) <= rhs(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = 0.5 * (lo + hi);
    Ok(BoundaryTime {
        t_star,
        lhs_log: lhs(t_star),
        rhs_log: rhs(t_star),
    })
}

/// Check the bracketing certificate of a boundary-time root: the exponential
/// side is still below the box side just before `t_star` and above it just
/// after.
pub fn boundary_certificate_ok(
    bt: &BoundaryTime,
    vol0: f64,
    delta: f64,
    c_a: f64,
    eps: f64,
    n: usize,
    m: usize,
    gamma: f64,
) -> bool {
    let dims = (n + m) as f64;
    let ln_growth = (delta * delta * c_a * c_a * eps * eps / 8.0).ln_1p();
    let lhs = |t: f64| t * ln_growth + vol0.ln();
    let rhs = |t: f64| dims * (2.0 * eps * t + gamma).ln();
    let before = bt.t_star * (1.0 - 1e-6);
    let after = bt.t_star * (1.0 + 1e-6);
    lhs(before) < rhs(before) && lhs(after) > rhs(after)
}

/// Base trajectory plus the `2 * dim` axis-aligned companions perturbed by
/// `+/- radius` along each dual coordinate.
fn companion_cloud(r0: &DualState, radius: f64) -> Vec<DualState> {
    let mut cloud = vec![r0.clone()];
    for (bi, block) in r0.blocks.iter().enumerate() {
        for ci in 0..block.len() {
            for sign in [1.0, -1.0] {
                let mut c = r0.clone();
                c.blocks[bi][ci] += sign * radius;
                cloud.push(c);
            }
        }
    }
    cloud
}

/// Max over coordinates of (max - min) across the cloud: the largest
/// pairwise ell-infinity distance.
fn max_pairwise_linf(cloud: &[DualState]) -> f64 {
    let dim = cloud[0].dim();
    let mut worst = 0.0f64;
    for c in 0..dim {
        let mut mx = f64::NEG_INFINITY;
        let mut mn = f64::INFINITY;
        for s in cloud {
            let v = s.flat()[c];
            mx = mx.max(v);
            mn = mn.min(v);
        }
        worst = worst.max(mx - mn);
    }
    worst
}

/// Horizon cap for Lyapunov-time searches.
pub const LYAPUNOV_HORIZON: u64 = 10_000_000;

/// Outcome of a Lyapunov-time search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovReport {
    /// First step at which some companion drifted `factor * radius` away
    /// from the base trajectory; `None` if the horizon was exhausted.
    pub time: Option<u64>,
    pub horizon: u64,
}

/// Steps until a `radius`-perturbation of the start grows to
/// `factor * radius` (measured against the base trajectory, ell-infinity).
pub fn lyapunov_time(
    game: &Game,
    r0: &DualState,
    perturb_radius: f64,
    eps: f64,
    dynamic: &Dynamic,
    factor: f64,
) -> Result<LyapunovReport> {
    lyapunov_time_capped(game, r0, perturb_radius, eps, dynamic, factor, LYAPUNOV_HORIZON)
}

/// [`lyapunov_time`] with an explicit horizon cap.
pub fn lyapunov_time_capped(
    game: &Game,
    r0: &DualState,
    perturb_radius: f64,
    eps: f64,
    dynamic: &Dynamic,
    factor: f64,
    horizon: u64,
) -> Result<LyapunovReport> {
    if !(perturb_radius > 0.0) {
        return Err(Error::Validation("perturbation radius must be > 0".into()));
    }
    if !(factor >= 2.0) {
        return Err(Error::Validation(format!(
            "divergence factor must be >= 2, got {factor}"
        )));
    }
    let mut cloud = companion_cloud(r0, perturb_radius);
    let threshold = factor * perturb_radius;
    for t in 1..=horizon {
        for s in cloud.iter_mut() {
            *s = dynamic_step(game, dynamic, s, eps)?;
        }
        let base = cloud[0].clone();
        let drift = cloud[1..]
            .iter()
            .map(|s| s.linf_distance(&base))
            .fold(0.0, f64::max);
        if drift >= threshold {
            return Ok(LyapunovReport {
                time: Some(t),
                horizon,
            });
        }
    }
    Ok(LyapunovReport { time: None, horizon })
}

/// Per-step maximum pairwise distance among the base-plus-companion cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceCurve {
    pub values: Vec<(u64, f64)>,
}

pub fn divergence_curve(
    game: &Game,
    r0: &DualState,
    perturb_radius: f64,
    eps: f64,
    dynamic: &Dynamic,
    t_max: u64,
) -> Result<DivergenceCurve> {
    if perturb_radius < 0.0 {
        return Err(Error::Validation("perturbation radius must be >= 0".into()));
    }
    let mut cloud = companion_cloud(r0, perturb_radius);
    let mut values = Vec::with_capacity(t_max as usize + 1);
    values.push((0, max_pairwise_linf(&cloud)));
    for t in 1..=t_max {
        for s in cloud.iter_mut() {
            *s = dynamic_step(game, dynamic, s, eps)?;
        }
        values.push((t, max_pairwise_linf(&cloud)));
    }
    Ok(DivergenceCurve { values })
}

/// The two RPS volume constants `C1 = 2P^2 + 2Q^2 + 5PQ`, `C2 = (P-Q)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpsCoefficients {
    pub c1: f64,
    pub c2: f64,
}

pub fn rps_coefficients(p: f64, q: f64) -> Result<RpsCoefficients> {
    crate::games::RpsParams::new(p, q)?;
    Ok(RpsCoefficients {
        c1: 2.0 * p * p + 2.0 * q * q + 5.0 * p * q,
        c2: (p - q) * (p - q),
    })
}

/// The escape level `C2/(2C1 + C2) = (1-r)^2 / (5 + 8r + 5r^2)` as a function
/// of the payoff ratio `r = Q/P`: trajectories eventually push some
/// probability entry below this value.
pub fn rps_threshold(r: f64) -> f64 {
    let d = 1.0 - r;
    d * d / (5.0 + 8.0 * r + 5.0 * r * r)
}

/// The region-condition constant `C2/(2C1) = (1-r)^2 / (4 + 10r + 4r^2)`,
/// used in the ratio conditions that define the region `W`. Distinct from
/// [`rps_threshold`].
pub fn rps_condition_constant(r: f64) -> f64 {
    let d = 1.0 - r;
    d * d / (4.0 + 10.0 * r + 4.0 * r * r)
}

/// Closed-form second-order coefficient for the RPS game at a dual point,
/// with `a..c = e^{p_j}`, `d..f = e^{q_k}` (max-subtracted; the expression is
/// scale-invariant per block):
/// `[C1 (abdf+abef+acde+acef+bcde+bcdf) - C2 (abde+acdf+bcef)] / [(a+b+c)^2 (d+e+f)^2]`.
pub fn rps_second_order(p: &[f64], q: &[f64], pp: f64, qq: f64) -> Result<f64> {
    if p.len() != 3 || q.len() != 3 {
        return Err(Error::Validation("RPS needs 3 strategies per player".into()));
    }
    let coeffs = rps_coefficients(pp, qq)?;
    let exps = |v: &[f64]| -> Vec<f64> {
        let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        v.iter().map(|&z| (z - mx).exp()).collect()
    };
    let pe = exps(p);
    let qe = exps(q);
    let (a, b, c) = (pe[0], pe[1], pe[2]);
    let (d, e, f) = (qe[0], qe[1], qe[2]);
    let pos = a * b * d * f + a * b * e * f + a * c * d * e + a * c * e * f
        + b * c * d * e
        + b * c * d * f;
    let neg = a * b * d * e + a * c * d * f + b * c * e * f;
    let den = (a + b + c) * (a + b + c) * (d + e + f) * (d + e + f);
    Ok((coeffs.c1 * pos - coeffs.c2 * neg) / den)
}

fn ratio_cycle(x: &[f64]) -> [f64; 6] {
    [
        x[0] / x[1],
        x[1] / x[2],
        x[2] / x[0],
        x[1] / x[0],
        x[2] / x[1],
        x[0] / x[2],
    ]
}

/// Membership in the RPS region `W`: no strategy ratio of either player
/// falls below `C2/(2C1)`.
pub fn rps_in_w(x: &[f64], y: &[f64], p: f64, q: f64) -> Result<bool> {
    check_rps_point(x, y)?;
    let coeffs = rps_coefficients(p, q)?;
    let bound = coeffs.c2 / (2.0 * coeffs.c1);
    let cond_a = ratio_cycle(x).iter().any(|&v| v < bound);
    let cond_b = ratio_cycle(y).iter().any(|&v| v < bound);
    Ok(!cond_a && !cond_b)
}

/// Membership in the refined region `W_{kappa,delta}`: one player's ratios
/// all clear `C2/(2C1) + kappa` while at least two of the other player's
/// entries are at least `delta` (either orientation).
pub fn rps_in_w_kappa_delta(
    x: &[f64],
    y: &[f64],
    p: f64,
    q: f64,
    kappa: f64,
    delta: f64,
) -> Result<bool> {
    check_rps_point(x, y)?;
    if !(kappa > 0.0 && delta > 0.0) {
        return Err(Error::Validation("kappa and delta must be > 0".into()));
    }
    let coeffs = rps_coefficients(p, q)?;
    let bound = coeffs.c2 / (2.0 * coeffs.c1) + kappa;
    let clears = |v: &[f64]| ratio_cycle(v).iter().all(|&r| r >= bound);
    let two_large = |v: &[f64]| v.iter().filter(|&&e| e >= delta).count() >= 2;
    Ok((clears(x) && two_large(y)) || (clears(y) && two_large(x)))
}

fn check_rps_point(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != 3 || y.len() != 3 {
        return Err(Error::Validation("RPS needs 3 strategies per player".into()));
    }
    if x.iter().chain(y).any(|&v| v <= 0.0) {
        return Err(Error::Domain("RPS region tests need positive entries".into()));
    }
    Ok(())
}

/// Lower bound on the second-order coefficient inside `W`:
/// `(6 C1 - 3 C2) / (1 + 4 C1/C2)^4`. Degenerates to `+inf` at `P = Q`,
/// where the region condition becomes vacuous.
pub fn rps_lower_bound_in_w(p: f64, q: f64) -> Result<f64> {
    let coeffs = rps_coefficients(p, q)?;
    if coeffs.c2 == 0.0 {
        return Ok(f64::INFINITY);
    }
    let base = 1.0 + 4.0 * coeffs.c1 / coeffs.c2;
    Ok((6.0 * coeffs.c1 - 3.0 * coeffs.c2) / base.powi(4))
}

/// Constant step-size threshold for RPS escape:
/// `min(1/2592, (6 C1 - 3 C2) / (2 (1 + 4 C1/C2)^4))`.
pub fn rps_constant_step_threshold(p: f64, q: f64) -> Result<f64> {
    let lb = rps_lower_bound_in_w(p, q)?;
    Ok((1.0f64 / 2592.0).min(lb / 2.0))
}

/// Volume trend of a 2x2 game in reduced coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeSign {
    Increasing,
    Preserved,
    Decreasing,
}

/// Classify the volume trend by the sign of `-(R1+R2)(R3+R4)` for the
/// reduced game `A = [[0, R1], [R2, 0]]`, `B = [[0, R3], [R4, 0]]`.
pub fn twobytwo_volume_sign(r1: f64, r2: f64, r3: f64, r4: f64) -> VolumeSign {
    let prod = (r1 + r2) * (r3 + r4);
    if prod < 0.0 {
        VolumeSign::Increasing
    } else if prod == 0.0 {
        VolumeSign::Preserved
    } else {
        VolumeSign::Decreasing
    }
}

/// Logistic density factor `sigma(z) = e^z / (1 + e^z)^2`, computed as
/// `1 / (2 cosh(z/2))^2` for symmetry and overflow safety.
fn sigma(z: f64) -> f64 {
    let c = 2.0 * (z / 2.0).cosh();
    1.0 / (c * c)
}

/// One step of the 2x2 MWU dynamic in reduced coordinates `(f, g)`:
/// `f' = f + eps (R1 y2 - R2 y1)`, `g' = g + eps (R4 x2 - R3 x1)` with
/// `x1 = e^f / (1 + e^f)`, `y1 = e^g / (1 + e^g)`.
pub fn twobytwo_step(rs: [f64; 4], f: f64, g: f64, eps: f64) -> (f64, f64) {
    let [r1, r2, r3, r4] = rs;
    let x1 = 1.0 / (1.0 + (-f).exp());
    let y1 = 1.0 / (1.0 + (-g).exp());
    (
        f + eps * (r1 * (1.0 - y1) - r2 * y1),
        g + eps * (r4 * (1.0 - x1) - r3 * x1),
    )
}

/// Exact Jacobian determinant of [`twobytwo_step`]:
/// `1 - eps^2 (R1+R2)(R3+R4) sigma(f) sigma(g)`.
pub fn twobytwo_det(rs: [f64; 4], f: f64, g: f64, eps: f64) -> f64 {
    let [r1, r2, r3, r4] = rs;
    1.0 - eps * eps * (r1 + r2) * (r3 + r4) * sigma(f) * sigma(g)
}

/// Which asymptotic escape guarantee a diminishing schedule is tested
/// against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdmissibilityKind {
    /// Threshold `16 (m+n) / (delta^2 c(A)^2)`.
    ZeroSum { delta: f64, c_a: f64, n: usize, m: usize },
    /// Threshold `4 n / cbar` with `n` the total strategy count.
    Graphical { n_total: usize, cbar: f64 },
    /// Threshold `8 (1 + 4 C1/C2)^4 / (2 C1 - C2)`.
    RpsW { p: f64, q: f64 },
    /// Threshold `12 (1 + 4 C1/C2)^2 / (C2 kappa delta^2)`.
    RpsWKappaDelta { p: f64, q: f64, kappa: f64, delta: f64 },
}

/// Admissibility verdict with the margin `c1^2 - threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub threshold: f64,
    pub margin: f64,
}

/// For schedules `eps_t = min(c0, c1/sqrt(t))` the squared sums grow like
/// `c1^2 ln t`, so the limsup admissibility conditions reduce to
/// `c1^2 > threshold`. Other schedule families are not analytically
/// checkable and are rejected.
pub fn diminishing_admissible(
    schedule: &StepSchedule,
    kind: &AdmissibilityKind,
) -> Result<AdmissibilityReport> {
    let c1 = match schedule {
        StepSchedule::Diminishing { c1, .. } => *c1,
        StepSchedule::Constant { .. } => {
            return Err(Error::Unsupported(
                "admissibility analysis needs the min(c0, c1/sqrt(t)) family".into(),
            ))
        }
    };
    let threshold = match *kind {
        AdmissibilityKind::ZeroSum { delta, c_a, n, m } => {
            if !(delta > 0.0 && c_a > 0.0) {
                return Err(Error::Validation("delta and c(A) must be > 0".into()));
            }
            16.0 * (m + n) as f64 / (delta * delta * c_a * c_a)
        }
        AdmissibilityKind::Graphical { n_total, cbar } => {
            if !(cbar > 0.0) {
                return Err(Error::Validation("cbar must be > 0".into()));
            }
            4.0 * n_total as f64 / cbar
        }
        AdmissibilityKind::RpsW { p, q } => {
            let c = rps_coefficients(p, q)?;
            if c.c2 == 0.0 {
                return Err(Error::Validation(
                    "RPS admissibility needs P != Q (C2 > 0)".into(),
                ));
            }
            let base = 1.0 + 4.0 * c.c1 / c.c2;
            8.0 * base.powi(4) / (2.0 * c.c1 - c.c2)
        }
        AdmissibilityKind::RpsWKappaDelta { p, q, kappa, delta } => {
            if !(kappa > 0.0 && delta > 0.0) {
                return Err(Error::Validation("kappa and delta must be > 0".into()));
            }
            let c = rps_coefficients(p, q)?;
            if c.c2 == 0.0 {
                return Err(Error::Validation(
                    "RPS admissibility needs P != Q (C2 > 0)".into(),
                ));
            }
            let base = 1.0 + 4.0 * c.c1 / c.c2;
            12.0 * base * base / (c.c2 * kappa * delta * delta)
        }
    };
    Ok(AdmissibilityReport {
        admissible: c1 * c1 > threshold,
        threshold,
        margin: c1 * c1 - threshold,
    })
}
