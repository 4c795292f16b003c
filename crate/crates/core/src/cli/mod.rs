//! Command-line front end of the `gridpart` binary.
//!
//! Exit codes: 0 on success, 2 on configuration errors (including usage
//! errors), 1 on runtime failures. Every report is computed before anything
//! is written; files then land in the output directory via rename.

mod config;

pub use config::{
    parse_k_list, parse_methods, parse_seeds, ExperimentConfig, Format, Mode, Settings, KEYS,
};

use crate::error::Error;
use crate::grid::{
    generate_weights, generate_weights_with_comm, read_snapshot, CellWeights, GridSpec,
};
use crate::metrics::{quality_report, QualityRow, QUALITY_CSV_HEADER};
use crate::partition::Partition;
use crate::simulate::{
    plot_table, run_compare, run_dynamic, run_scaling, timed_partition, DynamicExperiment,
    DynamicReport, PlotColumn, ScalingExperiment, ScalingMode, ScalingRow, DYNAMIC_CSV_HEADER,
    SCALING_CSV_HEADER,
};
use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Comment line opening compare CSV files.
pub const COMPARE_TIMING_NOTE: &str =
    "# partition_ms is measured wall-clock time and varies between runs";
/// Comment line opening scaling CSV files.
pub const SCALING_TIMING_NOTE: &str =
    "# total_time_s and partition_time_s include measured wall-clock time and vary between runs";
/// Comment line opening dynamic CSV files.
pub const DYNAMIC_TIMING_NOTE: &str =
    "# partition_time_s is measured wall-clock time and varies between runs";

#[derive(Debug, Parser)]
#[command(
    name = "gridpart",
    version,
    about = "Partition 3D stencil grids and model their halo-exchange cost"
)]
pub struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Flat `key = value` settings file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Allowed imbalance slack (default 0.05).
    #[arg(long, global = true)]
    epsilon: Option<String>,
    /// Single seed.
    #[arg(long, global = true, conflicts_with = "seeds")]
    seed: Option<String>,
    /// Seed count N (seeds 0..N) or a comma-separated seed list.
    #[arg(long, global = true)]
    seeds: Option<String>,
    /// face6 or full26.
    #[arg(long, global = true)]
    stencil: Option<String>,
    /// Output directory (default `results`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Coarsening stops at this many vertices (default 64).
    #[arg(long, global = true)]
    coarsen_stop: Option<String>,
    /// FM passes per level (default 8).
    #[arg(long, global = true)]
    fm_max_passes: Option<String>,
}

#[derive(Debug, Args)]
struct GridOpts {
    /// Grid extents, e.g. 32x32x16.
    #[arg(long)]
    grid: Option<String>,
    /// Periodic axes, e.g. `xz`.
    #[arg(long)]
    periodic: Option<String>,
    /// Compute workload: uniform:W | gaussian:cx,cy,cz,sigma,peak,floor | shock:axis,hot,cold,period.
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Debug, Args)]
struct WeightOpts {
    /// Halo payload workload (same syntax as --scenario); defaults to compute.
    #[arg(long)]
    comm_scenario: Option<String>,
    /// Weight snapshot file replacing --grid and the scenarios.
    #[arg(long, value_name = "FILE")]
    weights: Option<String>,
}

#[derive(Debug, Args)]
struct CostOpts {
    /// Time steps to model.
    #[arg(long)]
    steps: Option<String>,
    /// Seconds per compute weight unit.
    #[arg(long)]
    t_unit: Option<String>,
    /// Seconds per message.
    #[arg(long)]
    alpha: Option<String>,
    /// Seconds per payload unit.
    #[arg(long)]
    beta: Option<String>,
    /// Seconds per migrated weight unit.
    #[arg(long)]
    gamma_mig: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Partition a grid and write the partition file.
    Partition {
        #[command(flatten)]
        grid: GridOpts,
        #[command(flatten)]
        weights: WeightOpts,
        /// Number of parts.
        #[arg(long)]
        k: Option<String>,
        /// block, sfc, rcb, graph-ml or hg-ml.
        #[arg(long)]
        method: Option<String>,
    },
    /// Report the quality of an existing partition file.
    Evaluate {
        #[command(flatten)]
        grid: GridOpts,
        #[command(flatten)]
        weights: WeightOpts,
        /// Partition file (`n k` header, then one part per line).
        #[arg(long, value_name = "FILE")]
        partition: Option<String>,
    },
    /// Weak scaling: 8 cells per part.
    Weak {
        /// Comma-separated part counts.
        #[arg(long)]
        k: Option<String>,
        /// Comma-separated methods.
        #[arg(long)]
        methods: Option<String>,
        /// Compute workload.
        #[arg(long)]
        scenario: Option<String>,
        #[command(flatten)]
        cost: CostOpts,
    },
    /// Strong scaling on a fixed grid.
    Strong {
        /// Grid extents (default 32x32x16).
        #[arg(long)]
        grid: Option<String>,
        /// Comma-separated part counts.
        #[arg(long)]
        k: Option<String>,
        /// Comma-separated methods.
        #[arg(long)]
        methods: Option<String>,
        /// Compute workload.
        #[arg(long)]
        scenario: Option<String>,
        #[command(flatten)]
        cost: CostOpts,
    },
    /// Time-stepped run with periodic repartitioning.
    Dynamic {
        #[command(flatten)]
        grid: GridOpts,
        /// Number of parts.
        #[arg(long)]
        k: Option<String>,
        /// Partitioning method.
        #[arg(long)]
        method: Option<String>,
        /// Repartition every R steps, or `never`.
        #[arg(long, value_name = "R")]
        repartition_every: Option<String>,
        #[command(flatten)]
        cost: CostOpts,
    },
    /// Partition quality of several methods and seeds.
    Compare {
        #[command(flatten)]
        grid: GridOpts,
        #[command(flatten)]
        weights: WeightOpts,
        /// Comma-separated part counts.
        #[arg(long)]
        k: Option<String>,
        /// Comma-separated methods.
        #[arg(long)]
        methods: Option<String>,
    },
}

impl GridOpts {
    fn apply(&self, s: &mut Settings) {
        s.set("grid", self.grid.as_deref());
        s.set("periodic", self.periodic.as_deref());
        s.set("scenario", self.scenario.as_deref());
    }
}

impl WeightOpts {
    fn apply(&self, s: &mut Settings) {
        s.set("comm_scenario", self.comm_scenario.as_deref());
        s.set("weights", self.weights.as_deref());
    }
}

impl CostOpts {
    fn apply(&self, s: &mut Settings) {
        s.set("steps", self.steps.as_deref());
        s.set("t_unit", self.t_unit.as_deref());
        s.set("alpha", self.alpha.as_deref());
        s.set("beta", self.beta.as_deref());
        s.set("gamma_mig", self.gamma_mig.as_deref());
    }
}

impl Cli {
    /// Mode and merged settings: config file first, then flags.
    pub fn settings(&self) -> anyhow::Result<(Mode, Settings)> {
        let mut s = match &self.global.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Error::config("config", format!("cannot read {}: {e}", path.display()))
                })?;
                Settings::parse(&text)?
            }
            None => Settings::default(),
        };
        let g = &self.global;
        s.set("epsilon", g.epsilon.as_deref());
        s.set("seed", g.seed.as_deref());
        s.set("seeds", g.seeds.as_deref());
        s.set("stencil", g.stencil.as_deref());
        s.set("out", g.out.as_deref());
        s.set("format", g.format.as_deref());
        s.set("coarsen_stop", g.coarsen_stop.as_deref());
        s.set("fm_max_passes", g.fm_max_passes.as_deref());
        let mode = match &self.command {
            Command::Partition {
                grid,
                weights,
                k,
                method,
            } => {
                grid.apply(&mut s);
                weights.apply(&mut s);
                s.set("k", k.as_deref());
                s.set("method", method.as_deref());
                Mode::Partition
            }
            Command::Evaluate {
                grid,
                weights,
                partition,
            } => {
                grid.apply(&mut s);
                weights.apply(&mut s);
                s.set("partition", partition.as_deref());
                Mode::Evaluate
            }
            Command::Weak {
                k,
                methods,
                scenario,
                cost,
            } => {
                s.set("k", k.as_deref());
                s.set("methods", methods.as_deref());
                s.set("scenario", scenario.as_deref());
                cost.apply(&mut s);
                Mode::Weak
            }
            Command::Strong {
                grid,
                k,
                methods,
                scenario,
                cost,
            } => {
                s.set("grid", grid.as_deref());
                s.set("k", k.as_deref());
                s.set("methods", methods.as_deref());
                s.set("scenario", scenario.as_deref());
                cost.apply(&mut s);
                Mode::Strong
            }
            Command::Dynamic {
                grid,
                k,
                method,
                repartition_every,
                cost,
            } => {
                grid.apply(&mut s);
                s.set("k", k.as_deref());
                s.set("method", method.as_deref());
                s.set("repartition_every", repartition_every.as_deref());
                cost.apply(&mut s);
                Mode::Dynamic
            }
            Command::Compare {
                grid,
                weights,
                k,
                methods,
            } => {
                grid.apply(&mut s);
                weights.apply(&mut s);
                s.set("k", k.as_deref());
                s.set("methods", methods.as_deref());
                Mode::Compare
            }
        };
        Ok((mode, s))
    }
}

/// Files produced by one run, written only once all of them are ready.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<(String, String)>,
    pub summary: String,
}

impl Report {
    fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    /// Writes every file plus `summary.txt` into `dir`, each through a
    /// temporary file and a rename.
    pub fn write_to(&self, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let summary = ("summary.txt".to_string(), self.summary.clone());
        let mut written = Vec::new();
        for (name, contents) in self.files.iter().chain(std::iter::once(&summary)) {
            let path = dir.join(name);
            let tmp = dir.join(format!(".{name}.tmp"));
            fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, &path)
                .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn load_weights(cfg: &ExperimentConfig) -> anyhow::Result<(GridSpec, CellWeights<f64>)> {
    if let Some(path) = &cfg.weights_file {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading weights {}", path.display()))?;
        let (spec, weights) =
            read_snapshot(&text).with_context(|| format!("parsing weights {}", path.display()))?;
        return Ok((spec, weights));
    }
    let weights = match &cfg.comm_scenario {
        Some(comm) => generate_weights_with_comm(&cfg.scenario, comm, &cfg.grid, 0)?,
        None => generate_weights(&cfg.scenario, &cfg.grid, 0)?,
    };
    Ok((cfg.grid, weights))
}

fn json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn fmt_quality(out: &mut String, q: &crate::metrics::PartitionQuality<f64>) {
    writeln!(out, "imbalance        {:.6}", q.imbalance).unwrap();
    writeln!(out, "edge cut         {}", q.edge_cut).unwrap();
    writeln!(out, "comm volume      {}", q.comm_volume_total).unwrap();
    writeln!(out, "comm imbalance   {:.6}", q.comm_imbalance).unwrap();
    writeln!(out, "messages         {}", q.message_count_total).unwrap();
}

fn run_partition(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let (spec, weights) = load_weights(cfg)?;
    let (method, k, seed) = (cfg.methods[0], cfg.k_list[0], cfg.seeds[0]);
    let (part, secs) = timed_partition(method, &spec, &weights, k, &cfg.config(seed))?;
    let q = quality_report(&spec, &weights, &part)?;
    let mut report = Report::default();
    match cfg.format {
        Format::Csv => report.add("partition.txt", part.to_text()),
        Format::Json => report.add("partition.json", json(&part)?),
    }
    let mut s = String::new();
    writeln!(
        s,
        "partition: {method} k={k} seed={seed} grid={spec} ({} cells)",
        spec.cell_count()
    )?;
    writeln!(s, "partition time   {:.3} ms", secs * 1e3)?;
    fmt_quality(&mut s, &q);
    report.summary = s;
    Ok(report)
}

fn run_evaluate(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let (spec, weights) = load_weights(cfg)?;
    let path = cfg.partition_file.as_ref().expect("validated");
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading partition {}", path.display()))?;
    let part = Partition::from_text(&text)
        .with_context(|| format!("parsing partition {}", path.display()))?;
    let q = quality_report(&spec, &weights, &part)?;
    let mut report = Report::default();
    match cfg.format {
        Format::Csv => {
            let mut csv =
                String::from("k,imbalance,edge_cut,comm_volume,comm_imbalance,messages\n");
            writeln!(
                csv,
                "{},{},{},{},{},{}",
                part.k(),
                q.imbalance,
                q.edge_cut,
                q.comm_volume_total,
                q.comm_imbalance,
                q.message_count_total
            )?;
            report.add("quality.csv", csv);
        }
        Format::Json => report.add("quality.json", json(&q)?),
    }
    let mut s = String::new();
    writeln!(s, "evaluate: {} k={} grid={spec}", path.display(), part.k())?;
    fmt_quality(&mut s, &q);
    writeln!(s, "send per part    {:?}", q.per_part_send)?;
    report.summary = s;
    Ok(report)
}

fn run_compare_mode(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let (spec, weights) = load_weights(cfg)?;
    let mut rows: Vec<QualityRow<f64>> = Vec::new();
    for &k in &cfg.k_list {
        rows.extend(run_compare(
            &spec,
            &weights,
            &cfg.methods,
            k,
            &cfg.seeds,
            &cfg.partitioner,
        )?);
    }
    let mut report = Report::default();
    match cfg.format {
        Format::Csv => {
            let mut csv = format!("{COMPARE_TIMING_NOTE}\n{QUALITY_CSV_HEADER}\n");
            for r in &rows {
                csv.push_str(&r.to_csv());
                csv.push('\n');
            }
            report.add("compare.csv", csv);
        }
        Format::Json => report.add("compare.json", json(&rows)?),
    }
    let mut s = String::new();
    writeln!(
        s,
        "compare: grid={spec} ({} cells), {} seed(s)",
        spec.cell_count(),
        cfg.seeds.len()
    )?;
    writeln!(
        s,
        "{:>6} {:>9} {:>10} {:>12} {:>12} {:>9} {:>12}",
        "k", "method", "imbalance", "edge_cut", "volume", "messages", "time_ms"
    )?;
    for &k in &cfg.k_list {
        for &m in &cfg.methods {
            let sel: Vec<&QualityRow<f64>> =
                rows.iter().filter(|r| r.k == k && r.method == m).collect();
            let mean = |f: &dyn Fn(&QualityRow<f64>) -> f64| {
                sel.iter().map(|r| f(r)).sum::<f64>() / sel.len() as f64
            };
            writeln!(
                s,
                "{:>6} {:>9} {:>10.4} {:>12.1} {:>12.1} {:>9.1} {:>12.3}",
                k,
                m.name(),
                mean(&|r| r.imbalance),
                mean(&|r| r.edge_cut),
                mean(&|r| r.comm_volume),
                mean(&|r| r.messages as f64),
                mean(&|r| r.partition_ms)
            )?;
        }
    }
    writeln!(s, "values are means over seeds; time is wall clock")?;
    report.summary = s;
    Ok(report)
}

fn run_scaling_mode(cfg: &ExperimentConfig, mode: ScalingMode) -> anyhow::Result<Report> {
    let mut exp = ScalingExperiment::new(mode, cfg.methods.clone(), cfg.k_list.clone());
    exp.scenario = cfg.scenario.clone();
    exp.params = cfg.params;
    exp.steps = cfg.steps;
    exp.seeds = cfg.seeds.clone();
    exp.partitioner = cfg.partitioner;
    exp.stencil = cfg.stencil;
    exp.strong_grid = cfg.grid.dims();
    let rows: Vec<ScalingRow<f64>> = run_scaling(&exp)?;

    let mut report = Report::default();
    match cfg.format {
        Format::Csv => {
            let mut csv = format!("{SCALING_TIMING_NOTE}\n{SCALING_CSV_HEADER}\n");
            for r in &rows {
                csv.push_str(&r.to_csv());
                csv.push('\n');
            }
            report.add("scaling.csv", csv);
        }
        Format::Json => report.add("scaling.json", json(&rows)?),
    }
    report.add(
        format!("fig1_{mode}.dat"),
        plot_table(&rows, PlotColumn::TotalTime),
    );
    report.add(
        format!("fig2_{mode}.dat"),
        plot_table(&rows, PlotColumn::PartitionTime),
    );
    report.add(
        format!("fig3_{mode}.dat"),
        plot_table(&rows, PlotColumn::Imbalance),
    );

    let mut s = String::new();
    writeln!(
        s,
        "{mode} scaling: {} steps, {} seed(s), scenario {}",
        cfg.steps,
        cfg.seeds.len(),
        cfg.scenario
    )?;
    writeln!(
        s,
        "{:>6} {:>8} {:>9} {:>12} {:>12} {:>12} {:>12} {:>10}",
        "k", "cells", "method", "total_s", "partition_s", "compute_s", "comm_s", "imbalance"
    )?;
    for &k in &cfg.k_list {
        for &m in &cfg.methods {
            let sel: Vec<&ScalingRow<f64>> =
                rows.iter().filter(|r| r.k == k && r.method == m).collect();
            let mean = |f: &dyn Fn(&ScalingRow<f64>) -> f64| {
                sel.iter().map(|r| f(r)).sum::<f64>() / sel.len() as f64
            };
            writeln!(
                s,
                "{:>6} {:>8} {:>9} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>10.4}",
                k,
                sel[0].cells,
                m.name(),
                mean(&|r| r.total_time_s),
                mean(&|r| r.partition_time_s),
                mean(&|r| r.compute_time_s),
                mean(&|r| r.comm_time_s),
                mean(&|r| r.imbalance)
            )?;
        }
    }
    report.summary = s;
    Ok(report)
}

fn dynamic_plot(reports: &[DynamicReport<f64>]) -> String {
    let mut out = String::from("# step makespan_repartitioned makespan_static\n");
    let steps = reports.first().map_or(0, |r| r.rows.len());
    for t in 0..steps {
        let n = reports.len() as f64;
        let dynamic: f64 = reports.iter().map(|r| r.rows[t].makespan).sum::<f64>() / n;
        let fixed: f64 = reports
            .iter()
            .map(|r| r.rows[t].static_makespan)
            .sum::<f64>()
            / n;
        out.push_str(&format!("{t} {dynamic} {fixed}\n"));
    }
    out
}

fn run_dynamic_mode(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let exp = DynamicExperiment {
        spec: cfg.grid,
        scenario: cfg.scenario.clone(),
        method: cfg.methods[0],
        k: cfg.k_list[0],
        params: cfg.params,
        steps: cfg.steps,
        repartition_every: cfg.repartition_every,
        seeds: cfg.seeds.clone(),
        partitioner: cfg.partitioner,
    };
    let reports = run_dynamic(&exp)?;
    let mut report = Report::default();
    match cfg.format {
        Format::Csv => {
            let mut csv = format!("{DYNAMIC_TIMING_NOTE}\n{DYNAMIC_CSV_HEADER}\n");
            for r in &reports {
                for line in r.csv_rows() {
                    csv.push_str(&line);
                    csv.push('\n');
                }
            }
            report.add("dynamic.csv", csv);
        }
        Format::Json => report.add("dynamic.json", json(&reports)?),
    }
    report.add("dynamic.dat", dynamic_plot(&reports));

    let every = cfg
        .repartition_every
        .map_or("never".to_string(), |r| r.to_string());
    let mut s = String::new();
    writeln!(
        s,
        "dynamic: {} k={} grid={} scenario {} steps={} repartition every {every}",
        exp.method, exp.k, exp.spec, exp.scenario, exp.steps
    )?;
    writeln!(
        s,
        "{:>6} {:>14} {:>14} {:>8} {:>14} {:>14}",
        "seed", "total_repart_s", "total_static_s", "reparts", "partition_s", "migrated"
    )?;
    for r in &reports {
        writeln!(
            s,
            "{:>6} {:>14.6} {:>14.6} {:>8} {:>14.6} {:>14}",
            r.seed,
            r.total_with_repartition,
            r.total_static,
            r.repartition_count,
            r.total_partition_time_s,
            r.total_migrated_weight
        )?;
    }
    report.summary = s;
    Ok(report)
}

/// Runs one validated experiment, producing its report without touching
/// the file system beyond reading inputs.
pub fn execute(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    match cfg.mode {
        Mode::Partition => run_partition(cfg),
        Mode::Evaluate => run_evaluate(cfg),
        Mode::Compare => run_compare_mode(cfg),
        Mode::Weak => run_scaling_mode(cfg, ScalingMode::Weak),
        Mode::Strong => run_scaling_mode(cfg, ScalingMode::Strong),
        Mode::Dynamic => run_dynamic_mode(cfg),
    }
}

/// Parses, runs and writes; returns the list of written files.
pub fn run(cli: &Cli) -> anyhow::Result<Vec<PathBuf>> {
    let (mode, settings) = cli.settings()?;
    let cfg = ExperimentConfig::resolve(mode, &settings)?;
    let report = execute(&cfg)?;
    let files = report.write_to(&cfg.out)?;
    // a closed stdout (e.g. piped into `head`) is not a failure of the run
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(report.summary.as_bytes());
    for f in &files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
    Ok(files)
}

/// Exit code for an error: 2 for configuration problems, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config { .. }) => 2,
        _ => 1,
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Method;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("gridpart").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_reach_settings() {
        let cli = parse(&[
            "compare",
            "--grid",
            "8x8x4",
            "--k",
            "4,8",
            "--methods",
            "rcb",
            "--seeds",
            "2",
        ]);
        let (mode, s) = cli.settings().unwrap();
        assert_eq!(mode, Mode::Compare);
        let cfg = ExperimentConfig::resolve(mode, &s).unwrap();
        assert_eq!(cfg.k_list, vec![4, 8]);
        assert_eq!(cfg.seeds, vec![0, 1]);
        assert_eq!(cfg.methods, vec![Method::Rcb]);
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = parse(&[
            "weak",
            "--k",
            "1,8",
            "--epsilon",
            "0.1",
            "--stencil",
            "full26",
        ]);
        let (mode, s) = cli.settings().unwrap();
        let cfg = ExperimentConfig::resolve(mode, &s).unwrap();
        assert_eq!(cfg.partitioner.epsilon, 0.1);
        assert_eq!(cfg.stencil, crate::grid::Stencil::Full26);
    }

    #[test]
    fn config_errors_map_to_exit_two() {
        let cli = parse(&["compare", "--k", "8,,x"]);
        let err = run(&cli).unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(err.to_string().contains("k"));
        let io: anyhow::Error = Error::Io(std::io::Error::other("disk")).into();
        assert_eq!(exit_code(&io), 1);
    }

    #[test]
    fn compare_report_has_one_row_per_method_and_seed() {
        let cli = parse(&[
            "compare",
            "--grid",
            "6x6x4",
            "--k",
            "4",
            "--methods",
            "graph-ml,hg-ml",
            "--seeds",
            "3",
        ]);
        let (mode, s) = cli.settings().unwrap();
        let report = execute(&ExperimentConfig::resolve(mode, &s).unwrap()).unwrap();
        let (name, csv) = &report.files[0];
        assert_eq!(name, "compare.csv");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], COMPARE_TIMING_NOTE);
        assert_eq!(lines[1], QUALITY_CSV_HEADER);
        assert_eq!(lines.len(), 2 + 6);
        for l in &lines[2..] {
            QualityRow::<f64>::from_csv(l).unwrap();
        }
    }
}
