//! TOML experiment configuration with sections `[scenario]`, `[strategy]`,
//! `[adversary]` and `[run]`. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blackwell::BlackwellStrategy;
use crate::blocks::{BlockStrategy, ConstantPlay};
use crate::error::{Error, Result};
use crate::geometry::{MixedAction, Norm, PayoffMatrix, TargetSet};
use crate::scenarios::{
    build_constrained_scenario, default_checkpoints, AdversaryKind, PeriodUnit, Player, RunOptions, Scenario,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub strategy: StrategyConfig,
    pub adversary: AdversaryConfig,
    pub run: RunConfig,
}

/// A target set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    NegativeOrthant { dim: usize, norm: Norm },
    Singleton { point: Vec<f64>, norm: Norm },
    HalfLineBelow { threshold: f64 },
    HalfLineAbove { threshold: f64 },
    Polytope { vertices: Vec<Vec<f64>>, norm: Norm },
    Whole { dim: usize },
}

impl TargetConfig {
    pub fn build(&self) -> Result<TargetSet> {
        match self {
            TargetConfig::NegativeOrthant { dim, norm } => TargetSet::negative_orthant(*dim, *norm),
            TargetConfig::Singleton { point, norm } => TargetSet::singleton(point.clone(), *norm),
            TargetConfig::HalfLineBelow { threshold } => TargetSet::half_line_below(*threshold),
            TargetConfig::HalfLineAbove { threshold } => TargetSet::half_line_above(*threshold),
            TargetConfig::Polytope { vertices, norm } => TargetSet::polytope(vertices.clone(), *norm),
            TargetConfig::Whole { dim } => TargetSet::whole(*dim),
        }
    }
}

/// A payoff matrix written as its list of columns, one per action.
pub type Columns = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioConfig {
    Example1 {},
    Example2 {},
    Example2Quadrant {},
    Custom {
        vertices: Vec<Columns>,
        target: TargetConfig,
    },
    Constrained {
        payoff_vertices: Vec<Columns>,
        cost_vertices: Vec<Columns>,
        cost_set: TargetConfig,
        payoff_target: TargetConfig,
    },
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<Scenario> {
        let matrices = |list: &[Columns], key: &str| -> Result<Vec<PayoffMatrix>> {
            list.iter()
                .map(|c| PayoffMatrix::from_columns(c).map_err(|e| Error::config(key, e.to_string())))
                .collect()
        };
        match self {
            ScenarioConfig::Example1 {} => Ok(Scenario::example1()),
            ScenarioConfig::Example2 {} => Ok(Scenario::example2()),
            ScenarioConfig::Example2Quadrant {} => Ok(Scenario::example2_quadrant()),
            ScenarioConfig::Custom { vertices, target } => {
                let target = target
                    .build()
                    .map_err(|e| Error::config("scenario.target", e.to_string()))?;
                Scenario::custom("custom", matrices(vertices, "scenario.vertices")?, target)
                    .map_err(|e| Error::config("scenario.vertices", e.to_string()))
            }
            ScenarioConfig::Constrained {
                payoff_vertices,
                cost_vertices,
                cost_set,
                payoff_target,
            } => build_constrained_scenario(
                &matrices(payoff_vertices, "scenario.payoff_vertices")?,
                &matrices(cost_vertices, "scenario.cost_vertices")?,
                cost_set
                    .build()
                    .map_err(|e| Error::config("scenario.cost_set", e.to_string()))?,
                payoff_target
                    .build()
                    .map_err(|e| Error::config("scenario.payoff_target", e.to_string()))?,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyConfig {
    /// The block strategy with the scenario's `x⋆` response.
    Block {},
    /// The known-game strategy with the scenario's `x⋆` response.
    Blackwell {},
    Constant { action: Vec<f64> },
}

impl StrategyConfig {
    pub fn build(&self, scenario: &Scenario) -> Result<Player> {
        match self {
            StrategyConfig::Block {} => Ok(Player::Block(BlockStrategy::new(
                scenario.d(),
                scenario.actions(),
                scenario.default_response(),
            ))),
            StrategyConfig::Blackwell {} => Ok(Player::Blackwell(BlackwellStrategy::new(
                scenario.body.clone(),
                scenario.default_response(),
            )?)),
            StrategyConfig::Constant { action } => {
                if action.len() != scenario.actions() {
                    return Err(Error::config(
                        "strategy.action",
                        format!("expected {} weights, found {}", scenario.actions(), action.len()),
                    ));
                }
                let x = MixedAction::new(action.clone()).map_err(|e| Error::config("strategy.action", e.to_string()))?;
                Ok(Player::Constant(ConstantPlay::new(x)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversaryConfig {
    /// One matrix, given by a parameter `point` or by its `columns`.
    Constant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        columns: Option<Columns>,
    },
    /// Parameter points cycled every `rounds` rounds, or per block if `rounds` is absent.
    Periodic {
        schedule: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rounds: Option<usize>,
    },
    /// The switching opponent of the first example.
    Switching {
        #[serde(default = "default_eps0")]
        eps0: f64,
    },
    /// Independent draws over the vertices of `K` (uniform if `weights` is absent).
    RandomIid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    /// Parameter points played once each, in order, then repeated.
    Script { points: Vec<Vec<f64>> },
}

fn default_eps0() -> f64 {
    0.1
}

impl AdversaryConfig {
    pub fn build(&self, scenario: &Scenario) -> Result<AdversaryKind> {
        let points = |list: &[Vec<f64>], key: &str| -> Result<Vec<PayoffMatrix>> {
            if list.is_empty() {
                return Err(Error::config(key, "must not be empty"));
            }
            list.iter()
                .map(|p| scenario.point(p).map_err(|e| Error::config(key, e.to_string())))
                .collect()
        };
        match self {
            AdversaryConfig::Constant { point, columns } => {
                let (m, key) = match (point, columns) {
                    (Some(p), None) => (scenario.point(p), "adversary.point"),
                    (None, Some(c)) => (PayoffMatrix::from_columns(c), "adversary.columns"),
                    _ => return Err(Error::config("adversary", "give exactly one of `point` and `columns`")),
                };
                let m = m.map_err(|e| Error::config(key, e.to_string()))?;
                if m.d() != scenario.d() || m.actions() != scenario.actions() {
                    return Err(Error::config(
                        key,
                        format!("expected a {}×{} matrix", scenario.d(), scenario.actions()),
                    ));
                }
                Ok(AdversaryKind::Constant(m))
            }
            AdversaryConfig::Periodic { schedule, rounds } => {
                let unit = match rounds {
                    Some(0) => return Err(Error::config("adversary.rounds", "must be ≥ 1")),
                    Some(n) => PeriodUnit::Rounds(*n),
                    None => PeriodUnit::Blocks,
                };
                Ok(AdversaryKind::Periodic {
                    schedule: points(schedule, "adversary.schedule")?,
                    unit,
                })
            }
            AdversaryConfig::Switching { eps0 } => {
                if scenario.example != Some(crate::targets::Example::One) {
                    return Err(Error::config("adversary.kind", "the switching opponent needs scenario example1"));
                }
                if !(*eps0 > 0.0) {
                    return Err(Error::config("adversary.eps0", "must be positive"));
                }
                Ok(AdversaryKind::switching_example1(*eps0))
            }
            AdversaryConfig::RandomIid { weights } => {
                let vertices = scenario.body.vertices().to_vec();
                let weights = match weights {
                    None => vec![1.0 / vertices.len() as f64; vertices.len()],
                    Some(w) if w.len() == vertices.len() && w.iter().all(|v| *v >= 0.0) && w.iter().sum::<f64>() > 0.0 => {
                        w.clone()
                    }
                    Some(_) => {
                        return Err(Error::config(
                            "adversary.weights",
                            format!("need {} non-negative weights", vertices.len()),
                        ))
                    }
                };
                Ok(AdversaryKind::RandomIid { vertices, weights })
            }
            AdversaryConfig::Script { points: list } => Ok(AdversaryKind::Periodic {
                schedule: points(list, "adversary.points")?,
                unit: PeriodUnit::Rounds(1),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckpointSpec {
    /// `"geometric"` (the default) or `"every:<k>"`.
    Named(String),
    List(Vec<usize>),
}

impl Default for CheckpointSpec {
    fn default() -> Self {
        CheckpointSpec::Named("geometric".into())
    }
}

impl CheckpointSpec {
    pub fn build(&self, horizon: usize) -> Result<Vec<usize>> {
        match self {
            CheckpointSpec::Named(s) if s == "geometric" => Ok(default_checkpoints(horizon)),
            CheckpointSpec::Named(s) => {
                let every = s
                    .strip_prefix("every:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| Error::config("run.checkpoints", format!("unknown checkpoint rule `{s}`")))?;
                let mut out: Vec<usize> = (every..=horizon).step_by(every).collect();
                if out.last() != Some(&horizon) {
                    out.push(horizon);
                }
                Ok(out)
            }
            CheckpointSpec::List(list) => {
                if list.is_empty() || list.windows(2).any(|w| w[0] >= w[1]) || list[0] == 0 || list[list.len() - 1] > horizon {
                    return Err(Error::config(
                        "run.checkpoints",
                        "must be strictly increasing within [1, horizon]",
                    ));
                }
                Ok(list.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub metrics: Vec<String>,
    #[serde(default)]
    pub checkpoints: CheckpointSpec,
    #[serde(default)]
    pub audit: bool,
    #[serde(default)]
    pub no_grouping: bool,
    /// Output file name, relative to the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// Everything needed for one simulation.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub scenario: Scenario,
    pub player: Player,
    pub adversary: AdversaryKind,
    pub options: RunOptions,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(config_error)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn build(&self) -> Result<Experiment> {
        if self.run.horizon == 0 {
            return Err(Error::config("run.horizon", "must be ≥ 1"));
        }
        let scenario = self.scenario.build()?;
        let player = self.strategy.build(&scenario)?;
        let adversary = self.adversary.build(&scenario)?;
        let mut options = RunOptions::new(self.run.horizon, self.run.seed);
        options.checkpoints = self.run.checkpoints.build(self.run.horizon)?;
        options.metrics = self
            .run
            .metrics
            .iter()
            .map(|name| scenario.metric(name).map_err(|e| Error::config("run.metrics", e.to_string())))
            .collect::<Result<_>>()?;
        options.audit = self.run.audit;
        options.no_grouping = self.run.no_grouping;
        Ok(Experiment {
            scenario,
            player,
            adversary,
            options,
        })
    }
}

/// Turns a TOML error into a config error naming the offending key.
fn config_error(e: toml::de::Error) -> Error {
    let message = e.message().to_string();
    let key = ["unknown field `", "missing field `", "unknown variant `"]
        .iter()
        .find_map(|prefix| {
            let rest = message.split(prefix).nth(1)?;
            rest.split('`').next().map(str::to_string)
        })
        .unwrap_or_else(|| "config".into());
    Error::Config {
        key,
        message: e.to_string().trim().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"
[scenario]
kind = "example1"

[strategy]
kind = "block"

[adversary]
kind = "constant"
point = [1.0]

[run]
horizon = 1000
seed = 1
metrics = ["phi_star", "phi_xstar"]
"#;

    #[test]
    fn parses_minimal_config() {
        let c = Config::from_toml(MINIMAL).unwrap();
        assert_eq!(c.scenario, ScenarioConfig::Example1 {});
        assert_eq!(c.run.checkpoints, CheckpointSpec::Named("geometric".into()));
        let e = c.build().unwrap();
        assert_eq!(*e.options.checkpoints.last().unwrap(), 1000);
        assert_eq!(e.options.metrics.len(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let bad = MINIMAL.replace("seed = 1", "sed = 1");
        match Config::from_toml(&bad).unwrap_err() {
            Error::Config { key, .. } => assert_eq!(key, "sed"),
            other => panic!("{other:?}"),
        }
        let bad = MINIMAL.replace("kind = \"block\"", "kind = \"block\"\nrate = 2");
        assert!(matches!(Config::from_toml(&bad), Err(Error::Config { .. })));
        let bad = MINIMAL.replace("kind = \"example1\"", "kind = \"example1\"\nscale = 2");
        assert!(matches!(Config::from_toml(&bad), Err(Error::Config { .. })));
    }

    #[test]
    fn semantic_errors_name_the_key() {
        let bad = MINIMAL.replace("point = [1.0]", "point = [1.0, 2.0]");
        match Config::from_toml(&bad).unwrap().build().unwrap_err() {
            Error::Config { key, .. } => assert_eq!(key, "adversary.point"),
            other => panic!("{other:?}"),
        }
        let bad = MINIMAL.replace("\"phi_xstar\"", "\"phi_typo\"");
        match Config::from_toml(&bad).unwrap().build().unwrap_err() {
            Error::Config { key, .. } => assert_eq!(key, "run.metrics"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip_is_stable() {
        let configs = [
            MINIMAL.to_string(),
            r#"
[scenario]
kind = "custom"
vertices = [[[1.0, 0.0], [0.0, 1.0]], [[-1.0, 0.0], [0.0, -1.0]]]
target = { shape = "singleton", point = [0.0, 0.0], norm = "2" }
[strategy]
kind = "constant"
action = [0.5, 0.5]
[adversary]
kind = "random_iid"
weights = [0.25, 0.75]
[run]
horizon = 50
checkpoints = [10, 20, 50]
"#
            .to_string(),
            r#"
[scenario]
kind = "constrained"
payoff_vertices = [[[1.0], [0.0]]]
cost_vertices = [[[1.0], [0.0]]]
cost_set = { shape = "half_line_below", threshold = 0.5 }
payoff_target = { shape = "half_line_above", threshold = 1.0 }
[strategy]
kind = "block"
[adversary]
kind = "constant"
columns = [[1.0, 1.0], [0.0, 0.0]]
[run]
horizon = 100
metrics = ["cost", "payoff"]
checkpoints = "every:10"
"#
            .to_string(),
        ];
        for text in configs {
            let c = Config::from_toml(&text).unwrap();
            let again = Config::from_toml(&c.to_toml().unwrap()).unwrap();
            assert_eq!(c, again);
            assert_eq!(c.to_toml().unwrap(), again.to_toml().unwrap());
            c.build().unwrap();
        }
    }
}
