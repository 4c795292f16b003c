//! Bulk-synchronous runtime model and the scaling / repartitioning
//! experiment drivers.
//!
//! A time step costs `max_p (t_unit * load_p + alpha * messages_p + beta * send_p)`.
//! Partitioner wall-clock time is measured around each partitioner call,
//! including construction of the model it consumes.

use crate::error::{Error, Result};
use crate::grid::{generate_weights, CellWeights, GridSpec, Stencil, WorkloadScenario};
use crate::metrics::{comm_volume, imbalance, quality_report, QualityRow};
use crate::models::build_hypergraph;
use crate::partition::{Method, Partition, PartitionerConfig};
use crate::scalar::Weight;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// Grid used by strong-scaling runs unless overridden.
pub const STRONG_SCALING_GRID: [usize; 3] = [32, 32, 16];

/// Cells per process in weak-scaling runs.
pub const WEAK_CELLS_PER_PROCESS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModelParams<W> {
    /// Seconds per compute-weight unit.
    pub t_unit: W,
    /// Seconds per message.
    pub alpha: W,
    /// Seconds per halo payload unit.
    pub beta: W,
    /// Seconds per migrated compute-weight unit.
    pub gamma_mig: W,
}

impl<W: Weight> Default for CostModelParams<W> {
    fn default() -> Self {
        CostModelParams {
            t_unit: W::from_f64_lossy(1e-4),
            alpha: W::from_f64_lossy(1e-5),
            beta: W::from_f64_lossy(1e-8),
            gamma_mig: W::from_f64_lossy(1e-8),
        }
    }
}

impl<W: Weight> CostModelParams<W> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_unit", self.t_unit),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma_mig", self.gamma_mig),
        ] {
            if !(v >= W::zero()) {
                return Err(Error::config(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartCost<W> {
    pub load: W,
    pub compute: W,
    pub messages: usize,
    pub send: W,
    pub comm: W,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCost<W> {
    pub makespan: W,
    /// Lowest-numbered part attaining the makespan.
    pub critical_part: usize,
    pub parts: Vec<PartCost<W>>,
}

impl<W: Weight> StepCost<W> {
    pub fn critical(&self) -> &PartCost<W> {
        &self.parts[self.critical_part]
    }
}

/// Modeled cost of one time step of `part`.
pub fn step_cost<W: Weight>(
    spec: &GridSpec,
    weights: &CellWeights<W>,
    part: &Partition,
    params: &CostModelParams<W>,
) -> Result<StepCost<W>> {
    weights.check_spec(spec)?;
    part.check_len(spec.cell_count())?;
    let hg = build_hypergraph(spec, weights)?;
    let volume = comm_volume(&hg, part)?;
    let loads = part.loads(weights.compute());
    let parts: Vec<PartCost<W>> = (0..part.k())
        .map(|p| {
            let messages = volume.per_part_messages[p];
            let send = volume.per_part_send[p];
            PartCost {
                load: loads[p],
                compute: params.t_unit * loads[p],
                messages,
                send,
                comm: params.alpha * W::from_usize_exact(messages) + params.beta * send,
            }
        })
        .collect();
    let mut critical_part = 0;
    let mut makespan = W::zero();
    for (p, c) in parts.iter().enumerate() {
        let t = c.compute + c.comm;
        if p == 0 || t > makespan {
            makespan = t;
            critical_part = p;
        }
    }
    Ok(StepCost {
        makespan,
        critical_part,
        parts,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalingMode {
    Weak,
    Strong,
}

impl fmt::Display for ScalingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalingMode::Weak => "weak",
            ScalingMode::Strong => "strong",
        })
    }
}

impl FromStr for ScalingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "weak" => Ok(ScalingMode::Weak),
            "strong" => Ok(ScalingMode::Strong),
            other => Err(Error::config(
                "mode",
                format!("unknown scaling mode '{other}'"),
            )),
        }
    }
}

/// Near-cubic grid of `8k` cells: the prime factors of `8k`, smallest first,
/// each multiply the currently shortest axis (x first on ties).
pub fn weak_scaling_grid(k: usize, stencil: Stencil) -> Result<GridSpec> {
    if k == 0 {
        return Err(Error::config("k", "part count must be at least 1"));
    }
    let mut rest = WEAK_CELLS_PER_PROCESS * k;
    let mut dims = [1usize; 3];
    while rest > 1 {
        let p = crate::partition::smallest_prime_factor(rest);
        rest /= p;
        let shortest = (0..3).min_by_key(|&a| dims[a]).unwrap();
        dims[shortest] *= p;
    }
    Ok(GridSpec::new(dims[0], dims[1], dims[2])?.with_stencil(stencil))
}

/// Inputs of a weak- or strong-scaling sweep.
#[derive(Clone, Debug)]
pub struct ScalingExperiment<W> {
    pub mode: ScalingMode,
    pub methods: Vec<Method>,
    pub k_list: Vec<usize>,
    pub scenario: WorkloadScenario,
    pub params: CostModelParams<W>,
    pub steps: usize,
    pub seeds: Vec<u64>,
    pub partitioner: PartitionerConfig,
    pub stencil: Stencil,
    /// Strong-scaling grid extents.
    pub strong_grid: [usize; 3],
}

impl<W: Weight> ScalingExperiment<W> {
    pub fn new(mode: ScalingMode, methods: Vec<Method>, k_list: Vec<usize>) -> Self {
        ScalingExperiment {
            mode,
            methods,
            k_list,
            scenario: WorkloadScenario::Uniform { w: 1.0 },
            params: CostModelParams::default(),
            steps: 100,
            seeds: vec![0],
            partitioner: PartitionerConfig::default(),
            stencil: Stencil::Face6,
            strong_grid: STRONG_SCALING_GRID,
        }
    }

    pub fn grid_for(&self, k: usize) -> Result<GridSpec> {
        match self.mode {
            ScalingMode::Weak => weak_scaling_grid(k, self.stencil),
            ScalingMode::Strong => {
                let [nx, ny, nz] = self.strong_grid;
                Ok(GridSpec::new(nx, ny, nz)?.with_stencil(self.stencil))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::config("methods", "at least one method required"));
        }
        if self.k_list.is_empty() {
            return Err(Error::config("k", "at least one part count required"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed required"));
        }
        self.params.validate()?;
        self.partitioner.validate()?;
        self.scenario.validate()?;
        for &k in &self.k_list {
            let spec = self.grid_for(k)?;
            if k == 0 || k > spec.cell_count() {
                return Err(Error::config(
                    "k",
                    format!("k = {k} not in 1..={} for grid {spec}", spec.cell_count()),
                ));
            }
        }
        Ok(())
    }
}

/// One `(method, k, seed)` result of a scaling sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow<W> {
    pub mode: ScalingMode,
    pub method: Method,
    pub k: usize,
    pub seed: u64,
    pub cells: usize,
    /// `partition_time_s + compute_time_s + comm_time_s`.
    pub total_time_s: W,
    pub partition_time_s: W,
    /// `steps` times the compute share of the critical part.
    pub compute_time_s: W,
    /// `steps` times the communication share of the critical part.
    pub comm_time_s: W,
    pub imbalance: W,
    pub comm_volume: W,
}

/// Column header of scaling CSV files.
pub const SCALING_CSV_HEADER: &str =
    "mode,method,k,seed,cells,total_time_s,partition_time_s,compute_time_s,comm_time_s,imbalance,comm_volume";

/// Columns holding measured wall-clock time.
pub const SCALING_TIMING_COLUMNS: [&str; 2] = ["total_time_s", "partition_time_s"];

impl<W: Weight> ScalingRow<W> {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.mode,
            self.method,
            self.k,
            self.seed,
            self.cells,
            self.total_time_s,
            self.partition_time_s,
            self.compute_time_s,
            self.comm_time_s,
            self.imbalance,
            self.comm_volume
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 11 {
            return Err(Error::parse(
                1,
                format!("expected 11 scaling columns, got {}", f.len()),
            ));
        }
        let bad = |i: usize| Error::parse(1, format!("bad value '{}' in column {}", f[i], i + 1));
        let w = |i: usize| f[i].parse::<W>().map_err(|_| bad(i));
        Ok(ScalingRow {
            mode: f[0].parse()?,
            method: f[1].parse()?,
            k: f[2].parse().map_err(|_| bad(2))?,
            seed: f[3].parse().map_err(|_| bad(3))?,
            cells: f[4].parse().map_err(|_| bad(4))?,
            total_time_s: w(5)?,
            partition_time_s: w(6)?,
            compute_time_s: w(7)?,
            comm_time_s: w(8)?,
            imbalance: w(9)?,
            comm_volume: w(10)?,
        })
    }
}

/// Runs `method` and measures its wall-clock time in seconds.
pub fn timed_partition<W: Weight>(
    method: Method,
    spec: &GridSpec,
    weights: &CellWeights<W>,
    k: usize,
    config: &PartitionerConfig,
) -> Result<(Partition, f64)> {
    let start = Instant::now();
    let part = method.partition(spec, weights, k, config)?;
    Ok((part, start.elapsed().as_secs_f64()))
}

/// Weak or strong scaling sweep. Rows are ordered by k, then method, then
/// seed.
pub fn run_scaling<W: Weight>(exp: &ScalingExperiment<W>) -> Result<Vec<ScalingRow<W>>> {
    exp.validate()?;
    let mut rows = Vec::new();
    for &k in &exp.k_list {
        let spec = exp.grid_for(k)?;
        let weights: CellWeights<W> = generate_weights(&exp.scenario, &spec, 0)?;
        for &method in &exp.methods {
            for &seed in &exp.seeds {
                let config = exp.partitioner.with_seed(seed);
                let (part, secs) = timed_partition(method, &spec, &weights, k, &config)?;
                let cost = step_cost(&spec, &weights, &part, &exp.params)?;
                let steps = W::from_usize_exact(exp.steps);
                let partition_time_s = W::from_seconds(secs);
                let compute_time_s = steps * cost.critical().compute;
                let comm_time_s = steps * cost.critical().comm;
                rows.push(ScalingRow {
                    mode: exp.mode,
                    method,
                    k,
                    seed,
                    cells: spec.cell_count(),
                    total_time_s: partition_time_s + compute_time_s + comm_time_s,
                    partition_time_s,
                    compute_time_s,
                    comm_time_s,
                    imbalance: imbalance(&weights, &part)?,
                    comm_volume: cost.parts.iter().map(|p| p.send).sum(),
                });
            }
        }
    }
    Ok(rows)
}

/// Quality of every `(method, seed)` pair on one grid and part count.
pub fn run_compare<W: Weight>(
    spec: &GridSpec,
    weights: &CellWeights<W>,
    methods: &[Method],
    k: usize,
    seeds: &[u64],
    partitioner: &PartitionerConfig,
) -> Result<Vec<QualityRow<W>>> {
    if methods.is_empty() {
        return Err(Error::config("methods", "at least one method required"));
    }
    if seeds.is_empty() {
        return Err(Error::config("seeds", "at least one seed required"));
    }
    let mut rows = Vec::with_capacity(methods.len() * seeds.len());
    for &method in methods {
        for &seed in seeds {
            let (part, secs) =
                timed_partition(method, spec, weights, k, &partitioner.with_seed(seed))?;
            let quality = quality_report(spec, weights, &part)?;
            rows.push(QualityRow::new(method, k, seed, &quality, secs * 1e3));
        }
    }
    Ok(rows)
}

/// Which value a plot table tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotColumn {
    TotalTime,
    PartitionTime,
    Imbalance,
}

/// Whitespace table with one row per k and one column per method, each
/// entry the mean over seeds.
pub fn plot_table<W: Weight>(rows: &[ScalingRow<W>], column: PlotColumn) -> String {
    let mut methods: Vec<Method> = Vec::new();
    let mut ks: Vec<usize> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
        if !ks.contains(&r.k) {
            ks.push(r.k);
        }
    }
    let mut out = String::from("# k");
    for m in &methods {
        out.push(' ');
        out.push_str(m.name());
    }
    out.push('\n');
    for &k in &ks {
        out.push_str(&k.to_string());
        for &m in &methods {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.k == k && r.method == m)
                .map(|r| match column {
                    PlotColumn::TotalTime => r.total_time_s,
                    PlotColumn::PartitionTime => r.partition_time_s,
                    PlotColumn::Imbalance => r.imbalance,
                })
                .map(Weight::to_f64_lossy)
                .collect();
            if vals.is_empty() {
                out.push_str(" nan");
            } else {
                out.push_str(&format!(
                    " {}",
                    vals.iter().sum::<f64>() / vals.len() as f64
                ));
            }
        }
        out.push('\n');
    }
    out
}

/// Inputs of a dynamic repartitioning run.
#[derive(Clone, Debug)]
pub struct DynamicExperiment<W> {
    pub spec: GridSpec,
    pub scenario: WorkloadScenario,
    pub method: Method,
    pub k: usize,
    pub params: CostModelParams<W>,
    pub steps: usize,
    /// Repartition every this many steps; `None` never repartitions.
    pub repartition_every: Option<usize>,
    pub seeds: Vec<u64>,
    pub partitioner: PartitionerConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicStepRow<W> {
    pub step: usize,
    pub makespan: W,
    pub imbalance: W,
    /// Makespan of the step-0 partition kept for the whole run.
    pub static_makespan: W,
    pub static_imbalance: W,
    pub repartitioned: bool,
    pub partition_time_s: W,
    pub migrated_weight: W,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicReport<W> {
    pub seed: u64,
    pub rows: Vec<DynamicStepRow<W>>,
    /// Time of the step-0 partition, shared by both strategies and excluded
    /// from both totals.
    pub initial_partition_time_s: W,
    pub repartition_count: usize,
    pub total_partition_time_s: W,
    pub total_migrated_weight: W,
    /// `sum makespan + sum over repartitions (partition time + gamma_mig * migrated)`.
    pub total_with_repartition: W,
    /// `sum static_makespan`.
    pub total_static: W,
}

/// Step at which a time-varying scenario is evaluated: shock fronts sweep
/// `0..=period` and then restart.
pub fn scenario_step(scenario: &WorkloadScenario, t: usize) -> usize {
    match scenario {
        WorkloadScenario::ShockFront { period, .. } => t % (period + 1),
        _ => t,
    }
}

pub const DYNAMIC_CSV_HEADER: &str =
    "seed,step,makespan,imbalance,static_makespan,static_imbalance,repartitioned,partition_time_s,migrated_weight";

impl<W: Weight> DynamicReport<W> {
    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        self.rows.iter().map(move |r| {
            format!(
                "{},{},{},{},{},{},{},{},{}",
                self.seed,
                r.step,
                r.makespan,
                r.imbalance,
                r.static_makespan,
                r.static_imbalance,
                r.repartitioned as u8,
                r.partition_time_s,
                r.migrated_weight
            )
        })
    }
}

/// Time-stepped run with periodic repartitioning against a static baseline.
pub fn run_dynamic<W: Weight>(exp: &DynamicExperiment<W>) -> Result<Vec<DynamicReport<W>>> {
    if exp.repartition_every == Some(0) {
        return Err(Error::config("repartition_every", "must be at least 1"));
    }
    if exp.seeds.is_empty() {
        return Err(Error::config("seeds", "at least one seed required"));
    }
    exp.params.validate()?;
    exp.partitioner.validate()?;
    exp.scenario.validate()?;
    crate::partition::check_k(exp.k, exp.spec.cell_count())?;

    let mut reports = Vec::with_capacity(exp.seeds.len());
    for &seed in &exp.seeds {
        let config = exp.partitioner.with_seed(seed);
        let w0: CellWeights<W> =
            generate_weights(&exp.scenario, &exp.spec, scenario_step(&exp.scenario, 0))?;
        let (initial, t0) = timed_partition(exp.method, &exp.spec, &w0, exp.k, &config)?;
        let mut current = initial.clone();
        let mut rows = Vec::with_capacity(exp.steps);
        let mut report = DynamicReport {
            seed,
            rows: Vec::new(),
            initial_partition_time_s: W::from_seconds(t0),
            repartition_count: 0,
            total_partition_time_s: W::zero(),
            total_migrated_weight: W::zero(),
            total_with_repartition: W::zero(),
            total_static: W::zero(),
        };
        for t in 0..exp.steps {
            let weights: CellWeights<W> = if t == 0 {
                w0.clone()
            } else {
                generate_weights(&exp.scenario, &exp.spec, scenario_step(&exp.scenario, t))?
            };
            let mut row_partition_time = W::zero();
            let mut migrated = W::zero();
            let repartition = t > 0 && exp.repartition_every.is_some_and(|r| t % r == 0);
            if repartition {
                let (next, secs) =
                    timed_partition(exp.method, &exp.spec, &weights, exp.k, &config)?;
                migrated = current
                    .assignment()
                    .iter()
                    .zip(next.assignment())
                    .zip(weights.compute())
                    .filter(|((a, b), _)| a != b)
                    .map(|(_, &w)| w)
                    .sum();
                row_partition_time = W::from_seconds(secs);
                current = next;
                report.repartition_count += 1;
                report.total_partition_time_s += row_partition_time;
                report.total_migrated_weight += migrated;
                report.total_with_repartition +=
                    row_partition_time + exp.params.gamma_mig * migrated;
            }
            let cost = step_cost(&exp.spec, &weights, &current, &exp.params)?;
            let static_cost = step_cost(&exp.spec, &weights, &initial, &exp.params)?;
            report.total_with_repartition += cost.makespan;
            report.total_static += static_cost.makespan;
            rows.push(DynamicStepRow {
                step: t,
                makespan: cost.makespan,
                imbalance: imbalance(&weights, &current)?,
                static_makespan: static_cost.makespan,
                static_imbalance: imbalance(&weights, &initial)?,
                repartitioned: repartition,
                partition_time_s: row_partition_time,
                migrated_weight: migrated,
            });
        }
        report.rows = rows;
        reports.push(report);
    }
    Ok(reports)
}
