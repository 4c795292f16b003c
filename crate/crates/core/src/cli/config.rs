//! Flat `key = value` experiment configuration.
//!
//! Settings come from an optional config file and are overridden by command
//! line flags. Keys use the long flag names, with `-` and `_` interchangeable.

use crate::error::{Error, Result};
use crate::grid::{parse_dims, GridSpec, Stencil, WorkloadScenario};
use crate::partition::{Method, PartitionerConfig};
use crate::simulate::{CostModelParams, STRONG_SCALING_GRID};
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Every key accepted in a config file.
pub const KEYS: [&str; 23] = [
    "grid",
    "stencil",
    "periodic",
    "scenario",
    "comm_scenario",
    "weights",
    "partition",
    "k",
    "methods",
    "method",
    "seeds",
    "seed",
    "epsilon",
    "coarsen_stop",
    "fm_max_passes",
    "steps",
    "repartition_every",
    "t_unit",
    "alpha",
    "beta",
    "gamma_mig",
    "out",
    "format",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Partition,
    Evaluate,
    Weak,
    Strong,
    Dynamic,
    Compare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Partition => "partition",
            Mode::Evaluate => "evaluate",
            Mode::Weak => "weak",
            Mode::Strong => "strong",
            Mode::Dynamic => "dynamic",
            Mode::Compare => "compare",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::config(
                "format",
                format!("expected csv or json, got '{other}'"),
            )),
        }
    }
}

/// Raw string settings keyed by canonical (underscore) names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn canonical(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

impl Settings {
    /// Parses a config file: one `key = value` per line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    "config",
                    format!("line {}: expected 'key = value'", i + 1),
                ));
            };
            let key = canonical(key);
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::config(
                    key,
                    format!("unknown setting on config line {}", i + 1),
                ));
            }
            if settings.values.contains_key(&key) {
                return Err(Error::config(
                    key,
                    format!("set twice (config line {})", i + 1),
                ));
            }
            settings.values.insert(key, value.trim().to_string());
        }
        Ok(settings)
    }

    /// Sets `key` if `value` is present. `seed` and `seeds` replace each other.
    pub fn set(&mut self, key: &str, value: Option<&str>) {
        let Some(value) = value else { return };
        let key = canonical(key);
        match key.as_str() {
            "seed" => {
                self.values.remove("seeds");
            }
            "seeds" => {
                self.values.remove("seed");
            }
            _ => {}
        }
        self.values.insert(key, value.trim().to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| match relabel(key, &e) {
                    Error::Config { message, .. } if message == e.to_string() => {
                        Error::config(key, format!("cannot parse '{v}': {message}"))
                    }
                    relabeled => relabeled,
                })
            })
            .transpose()
    }
}

/// Reports a parse failure under `field`, keeping the original message.
fn relabel(field: &str, err: impl fmt::Display) -> Error {
    let message = err.to_string();
    let message = message
        .strip_prefix("invalid ")
        .and_then(|m| m.split_once(": ").map(|(_, rest)| rest.to_string()))
        .unwrap_or(message);
    Error::config(field, message)
}

/// Parses a comma-separated list of part counts.
pub fn parse_k_list(s: &str) -> Result<Vec<usize>> {
    let ks = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<usize>() {
                Ok(0) => Err(Error::config("k", "part counts must be at least 1")),
                Ok(k) => Ok(k),
                Err(_) => Err(Error::config(
                    "k",
                    format!("'{t}' is not a positive integer in '{s}'"),
                )),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ks)
}

/// `N` means seeds `0..N`; a comma list names seeds explicitly.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = |t: &str| Error::config("seeds", format!("'{t}' is not a non-negative integer"));
    if s.contains(',') {
        return s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| bad(t.trim())))
            .collect();
    }
    let n = s.trim().parse::<u64>().map_err(|_| bad(s.trim()))?;
    if n == 0 {
        return Err(Error::config("seeds", "seed count must be at least 1"));
    }
    Ok((0..n).collect())
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let methods = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Method>>>()?;
    if methods.is_empty() {
        return Err(Error::config("methods", "at least one method required"));
    }
    Ok(methods)
}

fn parse_periodic(s: &str) -> Result<[bool; 3]> {
    let mut periodic = [false; 3];
    if s.trim().eq_ignore_ascii_case("none") {
        return Ok(periodic);
    }
    for c in s.trim().chars() {
        match c.to_ascii_lowercase() {
            'x' => periodic[0] = true,
            'y' => periodic[1] = true,
            'z' => periodic[2] = true,
            _ => {
                return Err(Error::config(
                    "periodic",
                    format!("expected axes from 'xyz', got '{s}'"),
                ))
            }
        }
    }
    Ok(periodic)
}

/// Fully validated settings of one CLI run.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Grid of every mode except weak scaling, which derives one per k.
    pub grid: GridSpec,
    pub stencil: Stencil,
    pub scenario: WorkloadScenario,
    /// Separate halo payload scenario; payload equals compute when absent.
    pub comm_scenario: Option<WorkloadScenario>,
    /// Weight snapshot replacing `grid` and the scenarios.
    pub weights_file: Option<PathBuf>,
    pub partition_file: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub k_list: Vec<usize>,
    pub seeds: Vec<u64>,
    pub partitioner: PartitionerConfig,
    pub steps: usize,
    /// `None` never repartitions.
    pub repartition_every: Option<usize>,
    pub params: CostModelParams<f64>,
    pub out: PathBuf,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn resolve(mode: Mode, s: &Settings) -> Result<Self> {
        let stencil: Stencil = s.parsed("stencil")?.unwrap_or_default();
        let periodic = s
            .get("periodic")
            .map(parse_periodic)
            .transpose()?
            .unwrap_or([false; 3]);
        let [nx, ny, nz] = s
            .get("grid")
            .map(parse_dims)
            .transpose()?
            .unwrap_or(STRONG_SCALING_GRID);
        let grid = GridSpec::new(nx, ny, nz)
            .map_err(|e| relabel("grid", e))?
            .with_stencil(stencil)
            .with_periodic(periodic);

        let weights_file = s.get("weights").map(PathBuf::from);
        if weights_file.is_some() {
            for key in ["grid", "scenario", "comm_scenario"] {
                if s.contains(key) {
                    return Err(Error::config(
                        key,
                        "cannot be combined with a weights snapshot",
                    ));
                }
            }
            if !matches!(mode, Mode::Partition | Mode::Evaluate | Mode::Compare) {
                return Err(Error::config("weights", format!("not supported by {mode}")));
            }
        }

        let steps: usize = s.parsed("steps")?.unwrap_or(match mode {
            Mode::Dynamic => 50,
            _ => 100,
        });
        let scenario = match s.parsed::<WorkloadScenario>("scenario")? {
            Some(sc) => sc,
            None if mode == Mode::Dynamic => WorkloadScenario::ShockFront {
                axis: crate::grid::Axis::X,
                w_hot: 4.0,
                w_cold: 1.0,
                period: steps.max(1),
            },
            None => WorkloadScenario::Uniform { w: 1.0 },
        };
        scenario.validate().map_err(|e| relabel("scenario", e))?;
        let comm_scenario = s.parsed::<WorkloadScenario>("comm_scenario")?;
        if let Some(c) = &comm_scenario {
            c.validate().map_err(|e| relabel("comm_scenario", e))?;
            if !matches!(mode, Mode::Partition | Mode::Evaluate | Mode::Compare) {
                return Err(Error::config(
                    "comm_scenario",
                    format!("not supported by {mode}"),
                ));
            }
        }

        let methods = match mode {
            Mode::Partition | Mode::Dynamic => {
                if s.contains("methods") && !s.contains("method") {
                    let m = parse_methods(s.get("methods").unwrap_or_default())?;
                    if m.len() != 1 {
                        return Err(Error::config(
                            "methods",
                            format!("{mode} takes a single method"),
                        ));
                    }
                    m
                } else {
                    vec![s.parsed::<Method>("method")?.unwrap_or(Method::HgMl)]
                }
            }
            Mode::Evaluate => Vec::new(),
            _ => match s.get("methods") {
                Some(v) => parse_methods(v)?,
                None => Method::ALL.to_vec(),
            },
        };

        let k_list = match s.get("k") {
            Some(v) => parse_k_list(v)?,
            None => match mode {
                Mode::Weak => vec![1, 8, 64, 512],
                Mode::Strong => vec![4, 8, 16, 32, 64, 128, 256],
                Mode::Evaluate => Vec::new(),
                Mode::Partition | Mode::Dynamic | Mode::Compare => vec![8],
            },
        };
        if matches!(mode, Mode::Partition | Mode::Dynamic) && k_list.len() != 1 {
            return Err(Error::config(
                "k",
                format!("{mode} takes a single part count"),
            ));
        }

        let seeds = match (s.get("seeds"), s.get("seed")) {
            (Some(v), _) => parse_seeds(v)?,
            (None, Some(v)) => vec![v.trim().parse::<u64>().map_err(|_| {
                Error::config("seed", format!("'{v}' is not a non-negative integer"))
            })?],
            (None, None) => vec![0],
        };

        let defaults = PartitionerConfig::default();
        let partitioner = PartitionerConfig {
            epsilon: s.parsed("epsilon")?.unwrap_or(defaults.epsilon),
            seed: seeds[0],
            coarsen_stop: s.parsed("coarsen_stop")?.unwrap_or(defaults.coarsen_stop),
            fm_max_passes: s.parsed("fm_max_passes")?.unwrap_or(defaults.fm_max_passes),
        };
        partitioner.validate()?;

        let repartition_every = match s.get("repartition_every").map(str::trim) {
            None => Some(10),
            Some(v) if v.eq_ignore_ascii_case("never") => None,
            Some(v) => match v.parse::<usize>() {
                Ok(0) | Err(_) => {
                    return Err(Error::config(
                        "repartition_every",
                        format!("expected a positive step count or 'never', got '{v}'"),
                    ))
                }
                Ok(r) => Some(r),
            },
        };

        let d = CostModelParams::<f64>::default();
        let params = CostModelParams {
            t_unit: s.parsed("t_unit")?.unwrap_or(d.t_unit),
            alpha: s.parsed("alpha")?.unwrap_or(d.alpha),
            beta: s.parsed("beta")?.unwrap_or(d.beta),
            gamma_mig: s.parsed("gamma_mig")?.unwrap_or(d.gamma_mig),
        };
        params.validate()?;
        for (field, v) in [
            ("t_unit", params.t_unit),
            ("alpha", params.alpha),
            ("beta", params.beta),
            ("gamma_mig", params.gamma_mig),
        ] {
            if !v.is_finite() {
                return Err(Error::config(field, "must be finite"));
            }
        }

        let partition_file = s.get("partition").map(PathBuf::from);
        if mode == Mode::Evaluate && partition_file.is_none() {
            return Err(Error::config(
                "partition",
                "evaluate needs a partition file",
            ));
        }

        let config = ExperimentConfig {
            mode,
            grid,
            stencil,
            scenario,
            comm_scenario,
            weights_file,
            partition_file,
            methods,
            k_list,
            seeds,
            partitioner,
            steps,
            repartition_every,
            params,
            out: PathBuf::from(s.get("out").unwrap_or("results")),
            format: s.parsed("format")?.unwrap_or(Format::Csv),
        };
        config.check_k()?;
        Ok(config)
    }

    /// Part counts must fit the grid they partition.
    fn check_k(&self) -> Result<()> {
        if self.weights_file.is_some() {
            return Ok(());
        }
        let cells = self.grid.cell_count();
        if matches!(
            self.mode,
            Mode::Partition | Mode::Dynamic | Mode::Compare | Mode::Strong
        ) {
            if let Some(&k) = self.k_list.iter().find(|&&k| k > cells) {
                return Err(Error::config(
                    "k",
                    format!("k = {k} exceeds the {cells} cells of grid {}", self.grid),
                ));
            }
        }
        Ok(())
    }

    pub fn config(&self, seed: u64) -> PartitionerConfig {
        self.partitioner.with_seed(seed)
    }
}
