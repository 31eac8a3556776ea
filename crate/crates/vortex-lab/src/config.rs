//! JSON experiment configurations consumed by the command-line front end.
//! Every config validates fully before any computation starts, so a bad
//! field fails fast with its path in the message.

use serde::{Deserialize, Serialize};

use crate::dynamics::{DualState, Dynamic, StepSchedule};
use crate::error::{Error, Result};
use crate::games::{Game, GameDoc};

fn default_stride() -> u64 {
    1
}

fn default_factor() -> f64 {
    2.0
}

fn default_dynamic() -> Dynamic {
    Dynamic::Mwu
}

/// Where a run starts: a single dual point, or a filled grid cloud in the
/// reduced 2-strategy coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialCondition {
    Point { blocks: Vec<Vec<f64>> },
    Grid {
        center: [f64; 2],
        radius: f64,
        resolution: usize,
    },
}

/// Config of the `simulate` command: one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub game: GameDoc,
    #[serde(default = "default_dynamic")]
    pub dynamic: Dynamic,
    pub schedule: StepSchedule,
    pub horizon: u64,
    pub initial: InitialCondition,
    #[serde(default = "default_stride")]
    pub stride: u64,
}

impl SimulateConfig {
    pub fn build(&self) -> Result<(Game, DualState)> {
        let game = self.game.build().map_err(prefix("game"))?;
        let r0 = match &self.initial {
            InitialCondition::Point { blocks } => {
                DualState::new(blocks.clone()).map_err(prefix("initial"))?
            }
            InitialCondition::Grid { .. } => {
                return Err(Error::Config(
                    "initial: simulate needs a point start, not a grid cloud".into(),
                ))
            }
        };
        check_state_matches(&game, &r0)?;
        self.schedule.validate(d_bar(&game)).map_err(prefix("schedule"))?;
        self.dynamic
            .validate(r0.blocks.len())
            .map_err(prefix("dynamic"))?;
        if self.horizon < 1 {
            return Err(Error::Config("horizon: must be >= 1".into()));
        }
        if self.stride < 1 {
            return Err(Error::Config("stride: must be >= 1".into()));
        }
        Ok((game, r0))
    }
}

/// Config of the `volume` command: ensemble evolution with per-point
/// multipliers, snapshots, hull summaries, and an optional boundary-time
/// certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeConfig {
    pub game: GameDoc,
    #[serde(default = "default_dynamic")]
    pub dynamic: Dynamic,
    pub schedule: StepSchedule,
    pub horizon: u64,
    pub initial: InitialCondition,
    #[serde(default)]
    pub snapshot_times: Vec<u64>,
    /// When set, also solve the boundary-time equation for these parameters
    /// (the step-size comes from the constant schedule, `c(A)` from the game).
    #[serde(default)]
    pub boundary: Option<BoundaryParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub vol0: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl VolumeConfig {
    pub fn build(&self) -> Result<(Game, crate::volume::Ensemble)> {
        let game = self.game.build().map_err(prefix("game"))?;
        let ensemble = match &self.initial {
            InitialCondition::Point { blocks } => {
                let r0 = DualState::new(blocks.clone()).map_err(prefix("initial"))?;
                check_state_matches(&game, &r0)?;
                crate::volume::Ensemble::from_states(vec![r0])?
            }
            InitialCondition::Grid {
                center,
                radius,
                resolution,
            } => {
                if strategy_counts(&game) != vec![2, 2] {
                    return Err(Error::Config(
                        "initial: grid clouds need a 2x2 game (reduced coordinates)".into(),
                    ));
                }
                crate::volume::Ensemble::grid_cloud_2x2((center[0], center[1]), *radius, *resolution)
                    .map_err(prefix("initial"))?
            }
        };
        self.schedule.validate(d_bar(&game)).map_err(prefix("schedule"))?;
        self.dynamic
            .validate(strategy_counts(&game).len())
            .map_err(prefix("dynamic"))?;
        if self.horizon < 1 {
            return Err(Error::Config("horizon: must be >= 1".into()));
        }
        if self.boundary.is_some() && !matches!(self.schedule, StepSchedule::Constant { .. }) {
            return Err(Error::Config(
                "boundary: boundary-time certificates need a constant schedule".into(),
            ));
        }
        Ok((game, ensemble))
    }
}

/// Config of the `coeff` command: pointwise volume-coefficient report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffConfig {
    pub game: GameDoc,
    /// Dual point; defaults to the origin (uniform primal).
    #[serde(default)]
    pub point: Option<Vec<Vec<f64>>>,
    /// Region floors to report thresholds for.
    pub deltas: Vec<f64>,
}

impl CoeffConfig {
    pub fn build(&self) -> Result<(crate::games::BimatrixGame, DualState)> {
        let game = match self.game.build().map_err(prefix("game"))? {
            Game::Bimatrix(g) => g,
            Game::Graphical(_) => {
                return Err(Error::Config(
                    "game: the coeff report covers bimatrix games only".into(),
                ))
            }
        };
        let r = match &self.point {
            Some(blocks) => DualState::new(blocks.clone()).map_err(prefix("point"))?,
            None => DualState::origin(&[game.n(), game.m()]),
        };
        if r.blocks.len() != 2 || r.p().len() != game.n() || r.q().len() != game.m() {
            return Err(Error::Config("point: dimensions do not match the game".into()));
        }
        if self.deltas.is_empty() {
            return Err(Error::Config("deltas: need at least one value".into()));
        }
        for &d in &self.deltas {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Config(format!("deltas: {d} is not positive")));
            }
        }
        Ok((game, r))
    }
}

/// Config of the `lyapunov` command: divergence curves over a step-size
/// sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    pub game: GameDoc,
    #[serde(default = "default_dynamic")]
    pub dynamic: Dynamic,
    pub start: Vec<Vec<f64>>,
    pub radius: f64,
    pub eps_list: Vec<f64>,
    #[serde(default = "default_factor")]
    pub factor: f64,
    /// Search cap; defaults to the library horizon.
    #[serde(default)]
    pub horizon: Option<u64>,
}

impl LyapunovConfig {
    pub fn build(&self) -> Result<(Game, DualState)> {
        let game = self.game.build().map_err(prefix("game"))?;
        let r0 = DualState::new(self.start.clone()).map_err(prefix("start"))?;
        check_state_matches(&game, &r0)?;
        self.dynamic
            .validate(r0.blocks.len())
            .map_err(prefix("dynamic"))?;
        if !(self.radius > 0.0) {
            return Err(Error::Config(format!(
                "radius: must be > 0, got {}",
                self.radius
            )));
        }
        if self.eps_list.is_empty() {
            return Err(Error::Config("eps_list: need at least one step-size".into()));
        }
        for &e in &self.eps_list {
            StepSchedule::Constant { eps: e }
                .validate(d_bar(&game))
                .map_err(prefix("eps_list"))?;
        }
        if !(self.factor >= 2.0) {
            return Err(Error::Config(format!(
                "factor: must be >= 2, got {}",
                self.factor
            )));
        }
        Ok((game, r0))
    }
}

pub fn d_bar(game: &Game) -> usize {
    match game {
        Game::Bimatrix(_) => 1,
        Game::Graphical(g) => g.max_degree(),
    }
}

pub fn strategy_counts(game: &Game) -> Vec<usize> {
    match game {
        Game::Bimatrix(g) => vec![g.n(), g.m()],
        Game::Graphical(g) => g.strategy_counts.clone(),
    }
}

fn check_state_matches(game: &Game, r: &DualState) -> Result<()> {
    let counts = strategy_counts(game);
    let got: Vec<usize> = r.blocks.iter().map(|b| b.len()).collect();
    if counts != got {
        return Err(Error::Config(format!(
            "initial: state blocks {got:?} do not match game strategy counts {counts:?}"
        )));
    }
    Ok(())
}

fn prefix(field: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Config(format!("{field}: {e}"))
}

/// Parse a JSON config file of any command type.
pub fn load<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp_doc() -> GameDoc {
        GameDoc::Bimatrix {
            a: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            b: vec![vec![-1.0, 0.0], vec![0.0, -1.0]],
        }
    }

    #[test]
    fn simulate_config_round_trip() {
        let cfg = SimulateConfig {
            game: mp_doc(),
            dynamic: Dynamic::Mwu,
            schedule: StepSchedule::Constant { eps: 0.1 },
            horizon: 100,
            initial: InitialCondition::Point {
                blocks: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            },
            stride: 10,
        };
        let s = serde_json::to_string(&cfg).unwrap();
        let back: SimulateConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(cfg, back);
        assert!(back.build().is_ok());
    }

    #[test]
    fn simulate_config_rejects_big_eps() {
        let cfg = SimulateConfig {
            game: mp_doc(),
            dynamic: Dynamic::Mwu,
            schedule: StepSchedule::Constant { eps: 0.3 },
            horizon: 100,
            initial: InitialCondition::Point {
                blocks: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            },
            stride: 1,
        };
        assert!(matches!(cfg.build(), Err(Error::Config(_))));
    }

    #[test]
    fn simulate_config_rejects_mismatched_state() {
        let cfg = SimulateConfig {
            game: mp_doc(),
            dynamic: Dynamic::Mwu,
            schedule: StepSchedule::Constant { eps: 0.1 },
            horizon: 100,
            initial: InitialCondition::Point {
                blocks: vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0]],
            },
            stride: 1,
        };
        assert!(cfg.build().is_err());
    }

    #[test]
    fn lyapunov_config_rejects_zero_radius() {
        let cfg = LyapunovConfig {
            game: mp_doc(),
            dynamic: Dynamic::Mwu,
            start: vec![vec![0.5, 0.0], vec![0.2, 0.0]],
            radius: 0.0,
            eps_list: vec![0.1],
            factor: 2.0,
            horizon: None,
        };
        assert!(cfg.build().is_err());
    }

    #[test]
    fn volume_config_grid_needs_2x2() {
        let cfg = VolumeConfig {
            game: GameDoc::Rps {
                p: 1.0,
                q: 1.0,
                normalize: false,
            },
            dynamic: Dynamic::Mwu,
            schedule: StepSchedule::Constant { eps: 0.1 },
            horizon: 10,
            initial: InitialCondition::Grid {
                center: [0.0, 0.0],
                radius: 0.05,
                resolution: 5,
            },
            snapshot_times: vec![],
            boundary: None,
        };
        assert!(cfg.build().is_err());
    }
}
