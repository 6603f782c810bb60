//! Plain-text experiment configs: one `[section]` naming the subcommand,
//! `key = value` parameters below it. Parsing is strict (unknown sections or
//! keys are errors) and canonical rendering round-trips every value, so a
//! config hash pins down the run exactly.

use super::CliError;

/// Defaults shared by every subcommand.
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_STREAMS: usize = 64;
pub const DEFAULT_OUT: &str = "out";

/// Everything that determines a run's output bytes. Worker-pool size is
/// deliberately not part of this (or of the hash): it may only change speed.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub streams: usize,
    pub out: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Ball { radius: u32, lattice: String, budget: usize },
    Perimeter { source: String },
    IsoScan,
    Poincare { phi: String, p: f64 },
    Criterion { omega: String, r: f64, cutoff: f64 },
    C1 { metric: String, semimetric: bool },
    Negtype { metric: String, semimetric: bool },
    Gap { instance: String },
    HeisGap { radius: u32, lattice: String, transform: String },
    Vbar {
        region: String,
        set: String,
        r: Option<f64>,
        budget: usize,
        s_min: f64,
        step: f64,
        comparability: f64,
    },
    Lipgraph {
        family: String,
        r: f64,
        budget: usize,
        lip_budget: usize,
        target_lambda: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ball { .. } => "ball",
            Command::Perimeter { .. } => "perimeter",
            Command::IsoScan => "iso-scan",
            Command::Poincare { .. } => "poincare",
            Command::Criterion { .. } => "criterion",
            Command::C1 { .. } => "c1",
            Command::Negtype { .. } => "negtype",
            Command::Gap { .. } => "gap",
            Command::HeisGap { .. } => "heis-gap",
            Command::Vbar { .. } => "vbar",
            Command::Lipgraph { .. } => "lipgraph",
        }
    }
}

impl ExperimentConfig {
    pub fn new(command: Command) -> ExperimentConfig {
        ExperimentConfig {
            command,
            seed: DEFAULT_SEED,
            streams: DEFAULT_STREAMS,
            out: DEFAULT_OUT.to_string(),
        }
    }

    /// Canonical text form: section header, shared keys, then the command's
    /// parameters in a fixed order.
    pub fn to_text(&self) -> String {
        let mut out = format!("[{}]\n", self.command.name());
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("seed", self.seed.to_string());
        kv("streams", self.streams.to_string());
        kv("out", self.out.clone());
        match &self.command {
            Command::Ball { radius, lattice, budget } => {
                kv("radius", radius.to_string());
                kv("lattice", lattice.clone());
                kv("budget", budget.to_string());
            }
            Command::Perimeter { source } => kv("source", source.clone()),
            Command::IsoScan => {}
            Command::Poincare { phi, p } => {
                kv("phi", phi.clone());
                kv("p", p.to_string());
            }
            Command::Criterion { omega, r, cutoff } => {
                kv("omega", omega.clone());
                kv("r", r.to_string());
                kv("cutoff", cutoff.to_string());
            }
            Command::C1 { metric, semimetric } | Command::Negtype { metric, semimetric } => {
                kv("metric", metric.clone());
                kv("semimetric", semimetric.to_string());
            }
            Command::Gap { instance } => kv("instance", instance.clone()),
            Command::HeisGap { radius, lattice, transform } => {
                kv("radius", radius.to_string());
                kv("lattice", lattice.clone());
                kv("transform", transform.clone());
            }
            Command::Vbar { region, set, r, budget, s_min, step, comparability } => {
                kv("region", region.clone());
                kv("set", set.clone());
                if let Some(r) = r {
                    kv("r", r.to_string());
                }
                kv("budget", budget.to_string());
                kv("s_min", s_min.to_string());
                kv("step", step.to_string());
                kv("comparability", comparability.to_string());
            }
            Command::Lipgraph { family, r, budget, lip_budget, target_lambda } => {
                kv("family", family.clone());
                kv("r", r.to_string());
                kv("budget", budget.to_string());
                kv("lip_budget", lip_budget.to_string());
                if let Some(t) = target_lambda {
                    kv("target_lambda", t.to_string());
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        let mut section: Option<String> = None;
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                if section.is_some() {
                    return Err(CliError::Invalid(
                        "config must contain exactly one section".into(),
                    ));
                }
                section = Some(name.trim().to_string());
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Invalid(format!(
                    "line {}: expected key = value, got {line:?}",
                    lineno + 1
                )));
            };
            if section.is_none() {
                return Err(CliError::Invalid(format!(
                    "line {}: key before any [section]",
                    lineno + 1
                )));
            }
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let Some(section) = section else {
            return Err(CliError::Invalid("config contains no [section]".into()));
        };
        Self::from_pairs(&section, pairs)
    }

    fn from_pairs(
        section: &str,
        pairs: Vec<(String, String)>,
    ) -> Result<ExperimentConfig, CliError> {
        let mut bag = KeyBag::new(section, pairs)?;
        let command = match section {
            "ball" => Command::Ball {
                radius: bag.take_parsed("radius")?.unwrap_or(1),
                lattice: bag.take("lattice").unwrap_or_else(|| "h5".into()),
                budget: bag.take_parsed("budget")?.unwrap_or(20_000_000),
            },
            "perimeter" => Command::Perimeter {
                source: bag.require("source")?,
            },
            "iso-scan" => Command::IsoScan,
            "poincare" => Command::Poincare {
                phi: bag.require("phi")?,
                p: bag.take_parsed("p")?.unwrap_or(4.0),
            },
            "criterion" => Command::Criterion {
                omega: bag.require("omega")?,
                r: bag.require_parsed("r")?,
                cutoff: bag.take_parsed("cutoff")?.unwrap_or(0.25),
            },
            "c1" => Command::C1 {
                metric: bag.require("metric")?,
                semimetric: bag.take_parsed("semimetric")?.unwrap_or(false),
            },
            "negtype" => Command::Negtype {
                metric: bag.require("metric")?,
                semimetric: bag.take_parsed("semimetric")?.unwrap_or(false),
            },
            "gap" => Command::Gap {
                instance: bag.require("instance")?,
            },
            "heis-gap" => Command::HeisGap {
                radius: bag.take_parsed("radius")?.unwrap_or(1),
                lattice: bag.take("lattice").unwrap_or_else(|| "h5".into()),
                transform: bag.take("transform").unwrap_or_else(|| "raw".into()),
            },
            "vbar" => Command::Vbar {
                region: bag.take("region").unwrap_or_else(|| "ball:1".into()),
                set: bag.take("set").unwrap_or_else(|| "upper-z".into()),
                r: bag.take_parsed("r")?,
                budget: bag.take_parsed("budget")?.unwrap_or(20_000),
                s_min: bag.take_parsed("s_min")?.unwrap_or(-10.0),
                step: bag.take_parsed("step")?.unwrap_or(0.25),
                comparability: bag.take_parsed("comparability")?.unwrap_or(4.0),
            },
            "lipgraph" => Command::Lipgraph {
                family: bag.require("family")?,
                r: bag.require_parsed("r")?,
                budget: bag.take_parsed("budget")?.unwrap_or(20_000),
                lip_budget: bag.take_parsed("lip_budget")?.unwrap_or(60_000),
                target_lambda: bag.take_parsed("target_lambda")?,
            },
            other => {
                return Err(CliError::Invalid(format!("unknown subcommand section [{other}]")))
            }
        };
        let mut cfg = ExperimentConfig::new(command);
        if let Some(seed) = bag.take_parsed("seed")? {
            cfg.seed = seed;
        }
        if let Some(streams) = bag.take_parsed("streams")? {
            cfg.streams = streams;
        }
        if let Some(out) = bag.take("out") {
            cfg.out = out;
        }
        bag.finish()?;
        Ok(cfg)
    }
}

/// Key store that tracks consumption so leftovers can be rejected.
struct KeyBag {
    section: String,
    pairs: Vec<(String, String)>,
}

impl KeyBag {
    fn new(section: &str, pairs: Vec<(String, String)>) -> Result<KeyBag, CliError> {
        for (i, (k, _)) in pairs.iter().enumerate() {
            if pairs[..i].iter().any(|(other, _)| other == k) {
                return Err(CliError::Invalid(format!("duplicate key {k:?} in [{section}]")));
            }
        }
        Ok(KeyBag { section: section.to_string(), pairs })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let at = self.pairs.iter().position(|(k, _)| k == key)?;
        Some(self.pairs.remove(at).1)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Invalid(format!(
                    "key {key:?} in [{}]: cannot parse {raw:?}",
                    self.section
                ))
            }),
        }
    }

    fn require(&mut self, key: &str) -> Result<String, CliError> {
        self.take(key).ok_or_else(|| {
            CliError::Invalid(format!("missing key {key:?} in [{}]", self.section))
        })
    }

    fn require_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, CliError> {
        let raw = self.require(key)?;
        raw.parse::<T>().map_err(|_| {
            CliError::Invalid(format!("key {key:?} in [{}]: cannot parse {raw:?}", self.section))
        })
    }

    fn finish(self) -> Result<(), CliError> {
        if let Some((k, _)) = self.pairs.first() {
            return Err(CliError::Invalid(format!("unknown key {k:?} in [{}]", self.section)));
        }
        Ok(())
    }
}
