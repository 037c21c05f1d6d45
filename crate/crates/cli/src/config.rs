//! Scenario and sweep configuration files.
//!
//! Configs are TOML with up to four flat tables:
//!
//! ```toml
//! [scenario]
//! mean_service_1 = 2.0
//! drop_prob_1 = 0.8
//! weight_1 = 0.2
//! mean_service_2 = 3.0
//! drop_prob_2 = 0.9
//! # weight_2 defaults to 1 - weight_1
//!
//! [service]            # optional, both default to "deterministic"
//! kind_1 = "exponential"
//! kind_2 = "gamma"
//! variance_2 = 4.5     # gamma only
//!
//! [sweep]              # required by `sweep`
//! varying = "drop_prob_1"          # or mean_service_1, weight_1
//! grid = [0.0, 0.1, 0.2]
//! methods = ["optimal", "pgaw", "round_robin", "insertion_search"]
//! alpha = 200
//!
//! [sim]                # optional; required when methods include pgaw
//! slots = 200000       # simulated slots per method and grid point
//! warmup_cycles = 1000
//! batches = 20
//! seed = 1
//! pgaw_grid_step = 0.05
//! ```
//!
//! Service variances are implied by the kind: 0 for deterministic, `mean²`
//! for exponential, `variance_i` for gamma.

use std::path::Path;

use cyclic_aoi_core::optimizer::DEFAULT_ALPHA;
use cyclic_aoi_core::{Scenario, ServiceKind, ServiceModel, SourceParams};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error("missing [{0}] table")]
    MissingTable(&'static str),
}

fn field(field: &'static str, reason: impl ToString) -> ConfigError {
    ConfigError::Field {
        field,
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioTable {
    mean_service_1: f64,
    drop_prob_1: f64,
    weight_1: f64,
    mean_service_2: f64,
    drop_prob_2: f64,
    weight_2: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum KindName {
    #[default]
    Deterministic,
    Exponential,
    Gamma,
}

impl From<KindName> for ServiceKind {
    fn from(k: KindName) -> Self {
        match k {
            KindName::Deterministic => ServiceKind::Deterministic,
            KindName::Exponential => ServiceKind::Exponential,
            KindName::Gamma => ServiceKind::Gamma,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ServiceTable {
    #[serde(default)]
    kind_1: KindName,
    #[serde(default)]
    kind_2: KindName,
    variance_1: Option<f64>,
    variance_2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepTable {
    varying: Param,
    grid: Vec<f64>,
    methods: Option<Vec<Method>>,
    alpha: Option<u64>,
    max_cycle: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimTable {
    slots: u64,
    #[serde(default = "default_warmup")]
    warmup_cycles: u64,
    #[serde(default = "default_batches")]
    batches: u64,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_step")]
    pgaw_grid_step: f64,
}

fn default_warmup() -> u64 {
    1000
}
fn default_batches() -> u64 {
    20
}
fn default_seed() -> u64 {
    1
}
fn default_step() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: ScenarioTable,
    #[serde(default)]
    service: ServiceTable,
    sweep: Option<SweepTable>,
    sim: Option<SimTable>,
}

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
pub enum Param {
    #[serde(rename = "drop_prob_1")]
    DropProb1,
    #[serde(rename = "mean_service_1")]
    MeanService1,
    #[serde(rename = "weight_1")]
    Weight1,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::DropProb1 => "drop_prob_1",
            Param::MeanService1 => "mean_service_1",
            Param::Weight1 => "weight_1",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    InsertionSearch,
    Optimal,
    Pgaw,
    RoundRobin,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::InsertionSearch,
        Method::Optimal,
        Method::Pgaw,
        Method::RoundRobin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::InsertionSearch => "insertion_search",
            Method::Optimal => "optimal",
            Method::Pgaw => "pgaw",
            Method::RoundRobin => "round_robin",
        }
    }
}

/// Raw per-source numbers; rebuilt into a validated [`Base`] after a sweep
/// parameter is substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseParams {
    pub mean: [f64; 2],
    pub drop: [f64; 2],
    pub weight_1: f64,
    pub kind: [ServiceKind; 2],
    pub gamma_variance: [Option<f64>; 2],
}

/// A validated scenario together with the matching service models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Base {
    pub scenario: Scenario,
    pub services: [ServiceModel; 2],
}

impl BaseParams {
    pub fn build(&self) -> Result<Base, ConfigError> {
        let mut services = [ServiceModel::deterministic(1.0).expect("valid"); 2];
        for k in 0..2 {
            let var = self.gamma_variance[k].unwrap_or(0.0);
            services[k] = ServiceModel::new(self.kind[k], self.mean[k], var).map_err(|e| {
                field(
                    if k == 0 {
                        "service.kind_1"
                    } else {
                        "service.kind_2"
                    },
                    e,
                )
            })?;
        }
        if !(self.weight_1 > 0.0 && self.weight_1 < 1.0) {
            return Err(field("scenario.weight_1", "must lie in (0, 1)"));
        }
        let w = [self.weight_1, 1.0 - self.weight_1];
        let src = |k: usize, name: &'static str| {
            SourceParams::new(services[k].mean, services[k].variance, self.drop[k], w[k])
                .map_err(|e| field(name, e))
        };
        let scenario = Scenario::new(
            src(0, "scenario (source 1)")?,
            src(1, "scenario (source 2)")?,
        )
        .map_err(|e| field("scenario", e))?;
        Ok(Base { scenario, services })
    }

    pub fn with_param(&self, param: Param, value: f64) -> BaseParams {
        let mut out = self.clone();
        match param {
            Param::DropProb1 => out.drop[0] = value,
            Param::MeanService1 => out.mean[0] = value,
            Param::Weight1 => out.weight_1 = value,
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub slots: u64,
    pub warmup_cycles: u64,
    pub batches: u64,
    pub seed: u64,
    pub pgaw_grid_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub varying: Param,
    pub grid: Vec<f64>,
    pub base: BaseParams,
    pub methods: Vec<Method>,
    pub alpha: u64,
    pub max_cycle: Option<usize>,
    pub sim: Option<SimSettings>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid.is_empty() {
            return Err(field("sweep.grid", "grid must not be empty"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(field("sweep.grid", "grid must be strictly ascending"));
        }
        for &g in &self.grid {
            let ok = match self.varying {
                Param::DropProb1 => (0.0..1.0).contains(&g),
                Param::MeanService1 => g > 0.0 && g.is_finite(),
                Param::Weight1 => g > 0.0 && g < 1.0,
            };
            if !ok {
                return Err(field(
                    "sweep.grid",
                    format!("{g} outside the domain of {}", self.varying.name()),
                ));
            }
            self.base.with_param(self.varying, g).build()?;
        }
        if self.methods.is_empty() {
            return Err(field("sweep.methods", "at least one method is required"));
        }
        if self.alpha == 0 {
            return Err(field("sweep.alpha", "must be at least 1"));
        }
        if self.methods.contains(&Method::Pgaw) && self.sim.is_none() {
            return Err(field("sweep.methods", "pgaw requires a [sim] table"));
        }
        if let Some(sim) = &self.sim {
            if sim.batches < 10 || sim.slots < 100 * sim.batches {
                return Err(field(
                    "sim.slots",
                    "need batches >= 10 and slots >= 100 x batches",
                ));
            }
            if !(sim.pgaw_grid_step > 0.0 && sim.pgaw_grid_step <= 0.1) {
                return Err(field("sim.pgaw_grid_step", "must lie in (0, 0.1]"));
            }
        }
        Ok(())
    }
}

/// A parsed config file: always a base scenario, optionally a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub base: BaseParams,
    pub sweep: Option<SweepSpec>,
}

impl Config {
    pub fn sweep(&self) -> Result<&SweepSpec, ConfigError> {
        self.sweep
            .as_ref()
            .ok_or(ConfigError::MissingTable("sweep"))
    }
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let raw: ConfigFile = toml::from_str(text)?;
    let sc = &raw.scenario;
    if let Some(w2) = sc.weight_2 {
        if (sc.weight_1 + w2 - 1.0).abs() > 1e-12 {
            return Err(field("scenario.weight_2", "weights must sum to 1"));
        }
    }
    let base = BaseParams {
        mean: [sc.mean_service_1, sc.mean_service_2],
        drop: [sc.drop_prob_1, sc.drop_prob_2],
        weight_1: sc.weight_1,
        kind: [raw.service.kind_1.into(), raw.service.kind_2.into()],
        gamma_variance: [raw.service.variance_1, raw.service.variance_2],
    };
    base.build()?;
    let sim = raw.sim.map(|s| SimSettings {
        slots: s.slots,
        warmup_cycles: s.warmup_cycles,
        batches: s.batches,
        seed: s.seed,
        pgaw_grid_step: s.pgaw_grid_step,
    });
    let sweep = match raw.sweep {
        None => None,
        Some(sw) => {
            let mut methods = sw.methods.unwrap_or_else(|| Method::ALL.to_vec());
            methods.sort();
            methods.dedup();
            let spec = SweepSpec {
                varying: sw.varying,
                grid: sw.grid,
                base: base.clone(),
                methods,
                alpha: sw.alpha.unwrap_or(DEFAULT_ALPHA),
                max_cycle: sw.max_cycle,
                sim,
            };
            spec.validate()?;
            Some(spec)
        }
    };
    Ok(Config { base, sweep })
}

pub fn load(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[scenario]
mean_service_1 = 1.0
drop_prob_1 = 0.5
weight_1 = 0.5
mean_service_2 = 1.0
drop_prob_2 = 0.0
"#;

    #[test]
    fn minimal_scenario_defaults_to_deterministic() {
        let cfg = parse(MINIMAL).unwrap();
        let base = cfg.base.build().unwrap();
        assert_eq!(base.scenario.src1.var_service, 0.0);
        assert_eq!(base.scenario.src2.weight, 0.5);
        assert!(cfg.sweep.is_none());
        assert!(matches!(
            cfg.sweep(),
            Err(ConfigError::MissingTable("sweep"))
        ));
    }

    #[test]
    fn parse_error_reports_position() {
        let err = parse("[scenario]\nmean_service_1 = \n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}bogus = 3\n");
        assert!(matches!(parse(&text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn invalid_field_named() {
        let text = MINIMAL.replace("drop_prob_1 = 0.5", "drop_prob_1 = 1.0");
        let msg = parse(&text).unwrap_err().to_string();
        assert!(msg.contains("source 1"), "{msg}");
        let text = format!("{MINIMAL}weight_2 = 0.7\n");
        assert!(parse(&text).unwrap_err().to_string().contains("weight_2"));
    }

    #[test]
    fn exponential_and_gamma_variances() {
        let text = format!("{MINIMAL}\n[service]\nkind_1 = \"exponential\"\nkind_2 = \"gamma\"\nvariance_2 = 2.5\n");
        let base = parse(&text).unwrap().base.build().unwrap();
        assert_eq!(base.scenario.src1.var_service, 1.0);
        assert_eq!(base.scenario.src2.var_service, 2.5);
        let text = format!("{MINIMAL}\n[service]\nkind_2 = \"gamma\"\n");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn sweep_validation() {
        let sweep = |grid: &str, methods: &str, sim: bool| {
            let mut t = format!(
                "{MINIMAL}\n[sweep]\nvarying = \"drop_prob_1\"\ngrid = {grid}\nmethods = {methods}\n"
            );
            if sim {
                t.push_str("\n[sim]\nslots = 5000\n");
            }
            parse(&t)
        };
        assert!(sweep("[0.1, 0.2]", "[\"optimal\"]", false).is_ok());
        assert!(sweep("[]", "[\"optimal\"]", false).is_err());
        assert!(sweep("[0.2, 0.1]", "[\"optimal\"]", false).is_err());
        assert!(sweep("[0.1, 1.0]", "[\"optimal\"]", false).is_err());
        assert!(sweep("[0.1]", "[\"pgaw\"]", false).is_err());
        assert!(sweep("[0.1]", "[\"pgaw\"]", true).is_ok());
        let spec = sweep("[0.1]", "[\"round_robin\", \"optimal\"]", false).unwrap();
        assert_eq!(
            spec.sweep.unwrap().methods,
            vec![Method::Optimal, Method::RoundRobin]
        );
    }
}
