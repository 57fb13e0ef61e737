//! Seeded benchmarking: one record per run, plus per-configuration
//! aggregates across seeds.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{read_metis, Graph};
use crate::multisection::{map_hierarchical, RunStats, Strategy};
use crate::partitioner::{PartitionConfig, Preset};
use crate::ratio::{parse_ratio, Rational};
use crate::topology::Hierarchy;

/// Outcome of a single mapping run, with fixed keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub hierarchy: String,
    pub distance: String,
    pub eps: String,
    pub strategy: String,
    pub preset: String,
    pub threads: usize,
    pub seed: u64,
    #[serde(rename = "J")]
    pub j: u64,
    pub edge_cut: u64,
    pub max_imbalance: f64,
    pub wall_time_ms: f64,
}

/// Run settings shared by [`RunRecord`] and bench rows.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RunConfig {
    pub strategy: Strategy,
    pub preset: Preset,
    pub threads: usize,
}

impl RunRecord {
    pub fn new(
        instance: &str,
        hierarchy: &Hierarchy,
        eps: &str,
        config: &RunConfig,
        seed: u64,
        stats: &RunStats,
    ) -> Self {
        RunRecord {
            instance: instance.to_string(),
            hierarchy: hierarchy.arity_string(),
            distance: hierarchy.distance_string(),
            eps: eps.to_string(),
            strategy: config.strategy.name().to_string(),
            preset: config.preset.name().to_string(),
            threads: config.threads,
            seed,
            j: stats.comm_cost,
            edge_cut: stats.edge_cut,
            max_imbalance: stats.balance.max_imbalance_f64(),
            // a measured run always took some time; keep the record strictly positive
            wall_time_ms: (stats.wall_time.as_secs_f64() * 1e3).max(1e-3),
        }
    }
}

/// One line of the bench CSV. Failed runs keep their identifying columns,
/// leave the measurements empty and carry the error message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub hierarchy: String,
    pub distance: String,
    pub eps: String,
    pub strategy: String,
    pub preset: String,
    pub threads: usize,
    pub seed: u64,
    #[serde(rename = "J")]
    pub j: Option<u64>,
    pub edge_cut: Option<u64>,
    pub max_imbalance: Option<f64>,
    pub wall_time_ms: Option<f64>,
    pub error: String,
}

impl BenchRow {
    fn ok(record: RunRecord) -> Self {
        BenchRow {
            instance: record.instance,
            hierarchy: record.hierarchy,
            distance: record.distance,
            eps: record.eps,
            strategy: record.strategy,
            preset: record.preset,
            threads: record.threads,
            seed: record.seed,
            j: Some(record.j),
            edge_cut: Some(record.edge_cut),
            max_imbalance: Some(record.max_imbalance),
            wall_time_ms: Some(record.wall_time_ms),
            error: String::new(),
        }
    }

    fn failed(run: &PlannedRun, plan: &BenchPlan, error: &Error) -> Self {
        let h = &plan.hierarchies[run.hierarchy];
        BenchRow {
            instance: plan.instances[run.instance].name.clone(),
            hierarchy: h.arity_string(),
            distance: h.distance_string(),
            eps: plan.eps_text.clone(),
            strategy: run.config.strategy.name().to_string(),
            preset: run.config.preset.name().to_string(),
            threads: run.config.threads,
            seed: run.seed,
            j: None,
            edge_cut: None,
            max_imbalance: None,
            wall_time_ms: None,
            error: error.to_string(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub path: PathBuf,
}

impl Instance {
    /// Named after the file stem.
    pub fn from_path(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        Instance { name, path }
    }
}

/// Reads an instance list: one graph path per line, `#` starts a comment,
/// relative paths are resolved against the list's directory.
pub fn read_instance_list(path: &Path) -> Result<Vec<Instance>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| Instance::from_path(base.join(l)))
        .collect())
}

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub instances: Vec<Instance>,
    pub hierarchies: Vec<Hierarchy>,
    pub eps_text: String,
    pub seeds: Vec<u64>,
    pub configs: Vec<RunConfig>,
    /// Runs executed concurrently; each run uses its own thread budget.
    pub jobs: usize,
}

#[derive(Clone, Debug)]
struct PlannedRun {
    instance: usize,
    hierarchy: usize,
    config: RunConfig,
    seed: u64,
}

impl BenchPlan {
    /// Cross product of strategies, presets and thread counts.
    pub fn configs(strategies: &[Strategy], presets: &[Preset], threads: &[usize]) -> Vec<RunConfig> {
        let mut configs = Vec::new();
        for &strategy in strategies {
            for &preset in presets {
                for &threads in threads {
                    configs.push(RunConfig { strategy, preset, threads });
                }
            }
        }
        configs
    }

    /// Runs in output order: instance, hierarchy, configuration, seed.
    fn runs(&self) -> Vec<PlannedRun> {
        let mut runs = Vec::new();
        for instance in 0..self.instances.len() {
            for hierarchy in 0..self.hierarchies.len() {
                for config in &self.configs {
                    for &seed in &self.seeds {
                        runs.push(PlannedRun { instance, hierarchy, config: config.clone(), seed });
                    }
                }
            }
        }
        runs
    }

    pub fn num_runs(&self) -> usize {
        self.instances.len() * self.hierarchies.len() * self.configs.len() * self.seeds.len()
    }
}

/// Executes every run of the plan. Failures become rows with an error
/// message; the remaining runs continue. Rows come back in plan order
/// regardless of `jobs`.
pub fn run_bench(plan: &BenchPlan) -> Result<Vec<BenchRow>> {
    if plan.jobs == 0 {
        return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
    }
    let eps: Rational = parse_ratio(&plan.eps_text)?;
    let graphs: Vec<OnceLock<std::result::Result<Graph, Error>>> =
        plan.instances.iter().map(|_| OnceLock::new()).collect();
    let runs = plan.runs();
    let rows: Mutex<Vec<Option<BenchRow>>> = Mutex::new(vec![None; runs.len()]);
    let cursor = AtomicUsize::new(0);
    let workers = plan.jobs.min(runs.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                let Some(run) = runs.get(i) else { break };
                let instance = &plan.instances[run.instance];
                let graph = graphs[run.instance].get_or_init(|| load_graph(&instance.path));
                let row = match graph {
                    Ok(graph) => execute(graph, plan, run, &eps),
                    Err(e) => BenchRow::failed(run, plan, e),
                };
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });
    Ok(rows.into_inner().unwrap().into_iter().map(|r| r.expect("every run produces a row")).collect())
}

fn load_graph(path: &Path) -> std::result::Result<Graph, Error> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_metis(std::io::BufReader::new(file))
}

fn execute(graph: &Graph, plan: &BenchPlan, run: &PlannedRun, eps: &Rational) -> BenchRow {
    let h = &plan.hierarchies[run.hierarchy];
    let cfg = PartitionConfig::preset(run.config.preset);
    match map_hierarchical(graph, h, eps, run.config.threads, run.config.strategy, &cfg, run.seed) {
        Ok((_, stats)) => BenchRow::ok(RunRecord::new(
            &plan.instances[run.instance].name,
            h,
            &plan.eps_text,
            &run.config,
            run.seed,
            &stats,
        )),
        Err(e) => BenchRow::failed(run, plan, &e),
    }
}

pub fn write_rows<W: Write, T: Serialize>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn geometric_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
}

/// Baseline configuration for speedups, written `PRESET-THREADS` (compared
/// within the same strategy) or `STRATEGY/PRESET-THREADS`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Baseline {
    pub strategy: Option<Strategy>,
    pub preset: Preset,
    pub threads: usize,
}

impl std::str::FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("baseline {s:?} is not of the form [strategy/]preset-threads"));
        let (strategy, rest) = match s.split_once('/') {
            Some((st, rest)) => (Some(st.parse::<Strategy>()?), rest),
            None => (None, s),
        };
        let (preset, threads) = rest.rsplit_once('-').ok_or_else(bad)?;
        Ok(Baseline { strategy, preset: preset.parse::<Preset>()?, threads: threads.parse().map_err(|_| bad())? })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub instance: String,
    pub hierarchy: String,
    pub distance: String,
    pub eps: String,
    pub strategy: String,
    pub preset: String,
    pub threads: usize,
    pub runs: usize,
    pub geomean_time_ms: f64,
    #[serde(rename = "mean_J")]
    pub mean_j: f64,
    pub speedup: Option<f64>,
}

/// Groups successful rows by configuration: geometric-mean time and
/// arithmetic-mean `J` across seeds, and the speedup
/// `baseline_time / time` when a baseline is given and present.
pub fn aggregate(rows: &[BenchRow], baseline: Option<&Baseline>) -> Vec<AggregateRow> {
    type Key = (String, String, String, String, String, String, usize);
    let mut groups: BTreeMap<Key, (Vec<f64>, Vec<u64>)> = BTreeMap::new();
    let mut order: Vec<Key> = Vec::new();
    for row in rows.iter().filter(|r| r.is_ok()) {
        let key = (
            row.instance.clone(),
            row.hierarchy.clone(),
            row.distance.clone(),
            row.eps.clone(),
            row.strategy.clone(),
            row.preset.clone(),
            row.threads,
        );
        let entry = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (Vec::new(), Vec::new())
        });
        entry.0.extend(row.wall_time_ms);
        entry.1.extend(row.j);
    }
    let time_of = |key: &Key| groups.get(key).map(|(t, _)| geometric_mean(t));
    order
        .iter()
        .map(|key| {
            let (times, js) = &groups[key];
            let time = geometric_mean(times);
            let speedup = baseline.and_then(|b| {
                let strategy = b.strategy.map_or_else(|| key.4.clone(), |s| s.name().to_string());
                let base_key = (
                    key.0.clone(),
                    key.1.clone(),
                    key.2.clone(),
                    key.3.clone(),
                    strategy,
                    b.preset.name().to_string(),
                    b.threads,
                );
                time_of(&base_key).map(|base| base / time)
            });
            AggregateRow {
                instance: key.0.clone(),
                hierarchy: key.1.clone(),
                distance: key.2.clone(),
                eps: key.3.clone(),
                strategy: key.4.clone(),
                preset: key.5.clone(),
                threads: key.6,
                runs: times.len(),
                geomean_time_ms: time,
                mean_j: js.iter().map(|&j| j as f64).sum::<f64>() / js.len() as f64,
                speedup,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geomean_of_two_and_eight() {
        assert!((geometric_mean(&[2.0, 8.0]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn baseline_parsing() {
        let b: Baseline = "strong-1".parse().unwrap();
        assert_eq!(b, Baseline { strategy: None, preset: Preset::Strong, threads: 1 });
        let b: Baseline = "nb-layer/eco-4".parse().unwrap();
        assert_eq!(b.strategy, Some(Strategy::NbLayer));
        assert!("strong".parse::<Baseline>().is_err());
        assert!("strong-x".parse::<Baseline>().is_err());
    }

    fn row(threads: usize, seed: u64, time: f64, j: u64) -> BenchRow {
        BenchRow {
            instance: "g".into(),
            hierarchy: "2:2".into(),
            distance: "1:10".into(),
            eps: "0.03".into(),
            strategy: "nb-layer".into(),
            preset: "strong".into(),
            threads,
            seed,
            j: Some(j),
            edge_cut: Some(0),
            max_imbalance: Some(0.0),
            wall_time_ms: Some(time),
            error: String::new(),
        }
    }

    #[test]
    fn aggregate_speedup_against_baseline() {
        let rows = vec![row(1, 1, 2.0, 10), row(1, 2, 8.0, 20), row(4, 1, 1.0, 12), row(4, 2, 1.0, 14)];
        let agg = aggregate(&rows, Some(&"strong-1".parse().unwrap()));
        assert_eq!(agg.len(), 2);
        assert!((agg[0].geomean_time_ms - 4.0).abs() < 1e-12);
        assert_eq!(agg[0].mean_j, 15.0);
        assert!((agg[0].speedup.unwrap() - 1.0).abs() < 1e-12);
        assert!((agg[1].speedup.unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(agg[1].runs, 2);
    }

    #[test]
    fn failed_rows_are_skipped_in_aggregates() {
        let mut bad = row(1, 3, 0.0, 0);
        bad.j = None;
        bad.wall_time_ms = None;
        bad.error = "boom".into();
        let agg = aggregate(&[row(1, 1, 3.0, 6), bad], None);
        assert_eq!(agg[0].runs, 1);
        assert_eq!(agg[0].speedup, None);
    }

    #[test]
    fn header_is_stable() {
        let mut out = Vec::new();
        write_rows(&[row(1, 1, 1.5, 3)], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "instance,hierarchy,distance,eps,strategy,preset,threads,seed,J,edge_cut,max_imbalance,wall_time_ms,error"
        );
        assert_eq!(text.lines().nth(1).unwrap(), "g,2:2,1:10,0.03,nb-layer,strong,1,1,3,0,0.0,1.5,");
    }
}
