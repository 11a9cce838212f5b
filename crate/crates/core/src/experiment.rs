//! Reporting and the batch experiments: ordering spread under exhaustive
//! search (rq1, which also scores annealing against the optimum), proxy vs
//! T-count rank agreement (rq3), annealing vs Random-K across sizes (rq4) and
//! anytime curves under long budgets (rq5).
//!
//! Instances are generated from `master_seed + i`. Instance pipelines run on
//! the current rayon pool and are collected in index order, so every report
//! is identical regardless of thread count.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{emit_circuit, Circuit};
use crate::cost::{spearman_rho, CostReport};
use crate::database::{Database, Permutation};
use crate::error::{Error, Result};
use crate::esop::{extract_truth_tables, minimize_all};
use crate::search::{self, ExhaustiveStats, Method, SearchConfig, SearchResult};

/// Acceptance windows for the batch experiments. The minimizer here is
/// weaker than EXORCISM-4, so published point estimates get wide bands.
pub mod windows {
    pub const RQ1_MAX_OVER_MIN: (f64, f64) = (1.6, 2.6);
    pub const RQ1_MIN_OVER_AVG: (f64, f64) = (0.6, 0.8);
    pub const RQ2_SLACK: f64 = 1.1;
    pub const RQ2_REQUIRED_FRACTION: f64 = 13.0 / 15.0;
    pub const RQ3_MIN_RHO: f64 = 0.7;
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub n: usize,
    pub d: usize,
    pub instances: usize,
    pub master_seed: u64,
    pub budget: u64,
    pub base: SearchConfig,
}

impl ExperimentSpec {
    pub fn new(n: usize, d: usize, instances: usize, master_seed: u64, budget: u64) -> Self {
        ExperimentSpec {
            n,
            d,
            instances,
            master_seed,
            budget,
            base: SearchConfig::default(),
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.instances as u64).map(|i| self.master_seed + i).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.instances == 0 {
            return Err(Error::Config("instance count must be at least 1".into()));
        }
        self.base.validate()
    }

    fn config(&self, method: Method, seed: u64) -> SearchConfig {
        SearchConfig {
            method,
            budget: self.budget,
            seed,
            ..self.base.clone()
        }
    }
}

/// Median and quartiles with linear interpolation between order statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Spread {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Spread {
    pub fn of(values: &[f64]) -> Spread {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Spread {
            median: quantile(&v, 0.5),
            q1: quantile(&v, 0.25),
            q3: quantile(&v, 0.75),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodOutcome {
    pub best_score: u64,
    pub ratio_to_baseline: f64,
    pub t_count: u64,
    pub cube_count: u64,
    pub evaluations: u64,
    pub accepted_uphill: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustiveSummary {
    pub min: u64,
    pub max: u64,
    pub avg: f64,
    pub max_over_min: f64,
    pub min_over_avg: f64,
}

impl From<ExhaustiveStats> for ExhaustiveSummary {
    fn from(s: ExhaustiveStats) -> Self {
        ExhaustiveSummary {
            min: s.min,
            max: s.max,
            avg: s.avg,
            max_over_min: s.max as f64 / s.min as f64,
            min_over_avg: s.min as f64 / s.avg,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    /// Literal total of the unminimized minterm covers.
    pub org_score: u64,
    /// Proxy of the identity ordering after minimization.
    pub baseline_score: u64,
    pub baseline_t_count: u64,
    pub methods: BTreeMap<Method, MethodOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<ExhaustiveSummary>,
}

/// Literal total of the minterm covers: `n` per true point of every bit.
pub fn org_score(db: &Database) -> u64 {
    extract_truth_tables(db).iter().map(|t| t.count_ones() as u64).sum::<u64>() * db.n() as u64
}

/// Minimized covers of `reorder(db, perm)` and the matching circuit.
pub fn synthesize(db: &Database, perm: &Permutation) -> Result<(Database, Circuit)> {
    let reordered = db.reorder(perm)?;
    let circuit = emit_circuit(db.n(), &minimize_all(&reordered));
    Ok((reordered, circuit))
}

fn outcome(db: &Database, baseline: u64, r: &SearchResult) -> Result<MethodOutcome> {
    let (_, circuit) = synthesize(db, &r.best_perm)?;
    let cost = circuit.cost_report();
    debug_assert_eq!(cost.proxy, r.best_score);
    Ok(MethodOutcome {
        best_score: r.best_score,
        ratio_to_baseline: ratio(r.best_score, baseline),
        t_count: cost.t_count,
        cube_count: cost.cube_count,
        evaluations: r.evaluations,
        accepted_uphill: r.accepted_uphill,
    })
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Baseline and per-method results for one database. Search results are
/// returned alongside for trace export.
pub fn run_instance(
    db: &Database,
    seed: u64,
    configs: &[SearchConfig],
) -> Result<(InstanceReport, Vec<SearchResult>)> {
    let baseline_cost = CostReport::from_covers(db.n(), &minimize_all(db));
    let baseline = baseline_cost.proxy;
    let mut methods = BTreeMap::new();
    let mut exhaustive = None;
    let mut results = Vec::with_capacity(configs.len());
    for cfg in configs {
        let r = search::run(db, cfg)?;
        if let Some(stats) = r.stats {
            exhaustive = Some(ExhaustiveSummary::from(stats));
        }
        methods.insert(cfg.method, outcome(db, baseline, &r)?);
        results.push(r);
    }
    Ok((
        InstanceReport {
            seed,
            n: db.n(),
            d: db.d(),
            org_score: org_score(db),
            baseline_score: baseline,
            baseline_t_count: baseline_cost.t_count,
            methods,
            exhaustive,
        },
        results,
    ))
}

fn run_all(spec: &ExperimentSpec, n: usize, methods: &[Method]) -> Result<Vec<(InstanceReport, Vec<SearchResult>)>> {
    spec.validate()?;
    spec.seeds()
        .into_par_iter()
        .map(|seed| {
            let db = Database::random(n, spec.d, seed)?;
            let configs: Vec<SearchConfig> = methods.iter().map(|&m| spec.config(m, seed)).collect();
            run_instance(&db, seed, &configs)
        })
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(Error::from)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub low: f64,
    pub high: f64,
    pub value: f64,
    pub pass: bool,
}

impl Window {
    fn check(value: f64, (low, high): (f64, f64)) -> Window {
        Window {
            low,
            high,
            value,
            pass: (low..=high).contains(&value),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rq1Report {
    pub n: usize,
    pub d: usize,
    pub budget: u64,
    pub max_over_min: Spread,
    pub min_over_avg: Spread,
    /// Instances where annealing is within the slack factor of the optimum.
    pub anneal_near_optimal: usize,
    /// Instances where annealing reached the optimum exactly.
    pub anneal_optimal: usize,
    pub anneal_below_min: usize,
    pub max_over_min_window: Window,
    pub min_over_avg_window: Window,
    pub near_optimal_pass: bool,
    pub instances: Vec<InstanceReport>,
}

/// Exhaustive statistics per instance plus annealing on the same instances.
pub fn run_rq1(spec: &ExperimentSpec) -> Result<Rq1Report> {
    let runs = run_all(spec, spec.n, &[Method::Exhaustive, Method::Anneal])?;
    let instances: Vec<InstanceReport> = runs.into_iter().map(|(r, _)| r).collect();
    let ex: Vec<&ExhaustiveSummary> = instances.iter().filter_map(|r| r.exhaustive.as_ref()).collect();
    let max_over_min = Spread::of(&ex.iter().map(|e| e.max_over_min).collect::<Vec<_>>());
    let min_over_avg = Spread::of(&ex.iter().map(|e| e.min_over_avg).collect::<Vec<_>>());
    let mut near = 0;
    let mut optimal = 0;
    let mut below = 0;
    for r in &instances {
        let min = r.exhaustive.as_ref().expect("exhaustive ran").min;
        let best = r.methods[&Method::Anneal].best_score;
        near += (best as f64 <= windows::RQ2_SLACK * min as f64) as usize;
        optimal += (best == min) as usize;
        below += (best < min) as usize;
    }
    Ok(Rq1Report {
        n: spec.n,
        d: spec.d,
        budget: spec.budget,
        max_over_min,
        min_over_avg,
        anneal_near_optimal: near,
        anneal_optimal: optimal,
        anneal_below_min: below,
        max_over_min_window: Window::check(max_over_min.median, windows::RQ1_MAX_OVER_MIN),
        min_over_avg_window: Window::check(min_over_avg.median, windows::RQ1_MIN_OVER_AVG),
        near_optimal_pass: below == 0
            && near as f64 >= (windows::RQ2_REQUIRED_FRACTION * instances.len() as f64).ceil(),
        instances,
    })
}

impl Rq1Report {
    pub fn write(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        write_json(&dir.join("rq1.json"), self)?;
        let mut w = csv_writer(&dir.join("rq1_instances.csv"))?;
        w.write_record(["seed", "org", "baseline", "min", "avg", "max", "anneal"])?;
        for r in &self.instances {
            let ex = r.exhaustive.as_ref().expect("exhaustive ran");
            w.write_record([
                r.seed.to_string(),
                r.org_score.to_string(),
                r.baseline_score.to_string(),
                ex.min.to_string(),
                ex.avg.to_string(),
                ex.max.to_string(),
                r.methods[&Method::Anneal].best_score.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(dir, e))?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rq3Row {
    pub seed: u64,
    pub proxy_ratio: f64,
    pub t_count_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rq3Report {
    pub n: usize,
    pub d: usize,
    pub budget: u64,
    /// How the T-count side of the correlation is obtained.
    pub t_count_source: &'static str,
    /// `None` when one side is constant and the rank correlation is undefined.
    pub rho: Option<f64>,
    pub min_rho: f64,
    pub pass: bool,
    pub rows: Vec<Rq3Row>,
}

/// Rank agreement between the proxy ratio and the T-count ratio of the
/// annealed ordering against the baseline ordering.
pub fn run_rq3(spec: &ExperimentSpec) -> Result<Rq3Report> {
    if spec.instances < 2 {
        return Err(Error::TooFewSamples(spec.instances));
    }
    let runs = run_all(spec, spec.n, &[Method::Anneal])?;
    let rows: Vec<Rq3Row> = runs
        .iter()
        .map(|(r, _)| {
            let a = &r.methods[&Method::Anneal];
            Rq3Row {
                seed: r.seed,
                proxy_ratio: a.ratio_to_baseline,
                t_count_ratio: ratio(a.t_count, r.baseline_t_count),
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.proxy_ratio).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.t_count_ratio).collect();
    let rho = spearman_rho(&xs, &ys)?;
    let rho = (!rho.is_nan()).then_some(rho);
    Ok(Rq3Report {
        n: spec.n,
        d: spec.d,
        budget: spec.budget,
        t_count_source: "formula estimate: 8k-12 T gates per MCX with k >= 2 controls, 0 otherwise",
        rho,
        min_rho: windows::RQ3_MIN_RHO,
        pass: rho.is_some_and(|r| r >= windows::RQ3_MIN_RHO),
        rows,
    })
}

impl Rq3Report {
    pub fn write(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        write_json(&dir.join("rq3.json"), self)?;
        let mut w = csv_writer(&dir.join("rq3_scatter.csv"))?;
        w.write_record(["seed", "proxy_ratio", "t_count_ratio"])?;
        for r in &self.rows {
            w.write_record([r.seed.to_string(), r.proxy_ratio.to_string(), r.t_count_ratio.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(dir, e))?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rq4Row {
    pub n: usize,
    pub size: usize,
    pub anneal: Spread,
    pub random: Spread,
    pub anneal_not_worse: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rq4Report {
    pub d: usize,
    pub budget: u64,
    pub instances: usize,
    pub rows: Vec<Rq4Row>,
    pub pass: bool,
}

/// Best/baseline ratios of annealing and Random-K at equal budgets, for each
/// address width in `widths`.
pub fn run_rq4(spec: &ExperimentSpec, widths: &[usize]) -> Result<Rq4Report> {
    let mut rows = Vec::new();
    for &n in widths {
        let runs = run_all(spec, n, &[Method::Anneal, Method::Random])?;
        let collect = |m: Method| -> Vec<f64> { runs.iter().map(|(r, _)| r.methods[&m].ratio_to_baseline).collect() };
        let anneal = Spread::of(&collect(Method::Anneal));
        let random = Spread::of(&collect(Method::Random));
        rows.push(Rq4Row {
            n,
            size: 1 << n,
            anneal,
            random,
            anneal_not_worse: anneal.median <= random.median,
        });
    }
    Ok(Rq4Report {
        d: spec.d,
        budget: spec.budget,
        instances: spec.instances,
        pass: rows.iter().all(|r| r.anneal_not_worse),
        rows,
    })
}

impl Rq4Report {
    pub fn write(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        write_json(&dir.join("rq4.json"), self)?;
        let mut w = csv_writer(&dir.join("rq4.csv"))?;
        w.write_record([
            "size",
            "anneal_median",
            "anneal_q1",
            "anneal_q3",
            "random_median",
            "random_q1",
            "random_q3",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.size.to_string(),
                r.anneal.median.to_string(),
                r.anneal.q1.to_string(),
                r.anneal.q3.to_string(),
                r.random.median.to_string(),
                r.random.q1.to_string(),
                r.random.q3.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(dir, e))?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub step: u64,
    pub anneal_median_ratio: f64,
    pub random_median_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rq5Report {
    pub n: usize,
    pub d: usize,
    pub budget: u64,
    pub instances: usize,
    pub checkpoints: Vec<Checkpoint>,
    /// Median best score (not ratio) at the full budget.
    pub anneal_median_best: f64,
    pub random_median_best: f64,
    pub anneal_beats_random: bool,
    pub traces_non_increasing: bool,
    #[serde(skip)]
    pub runs: Vec<(InstanceReport, Vec<SearchResult>)>,
}

/// Anytime curves of annealing and Random-K under one long budget.
pub fn run_rq5(spec: &ExperimentSpec) -> Result<Rq5Report> {
    let runs = run_all(spec, spec.n, &[Method::Anneal, Method::Random])?;
    let median_ratio_at = |idx: usize, step: u64| -> f64 {
        let v: Vec<f64> = runs
            .iter()
            .map(|(r, res)| ratio(res[idx].best_at(step), r.baseline_score))
            .collect();
        Spread::of(&v).median
    };
    let mut steps: Vec<u64> = [100, 300, 1000, 3000, 10_000, 30_000, 100_000]
        .into_iter()
        .filter(|&s| s < spec.budget)
        .collect();
    steps.push(spec.budget);
    let checkpoints = steps
        .into_iter()
        .map(|step| Checkpoint {
            step,
            anneal_median_ratio: median_ratio_at(0, step),
            random_median_ratio: median_ratio_at(1, step),
        })
        .collect();
    let final_best = |idx: usize| {
        let v: Vec<f64> = runs.iter().map(|(_, res)| res[idx].best_score as f64).collect();
        Spread::of(&v).median
    };
    let anneal_median_best = final_best(0);
    let random_median_best = final_best(1);
    let traces_non_increasing = runs
        .iter()
        .flat_map(|(_, res)| res)
        .all(|r| r.trace.windows(2).all(|w| w[1].best_score <= w[0].best_score));
    Ok(Rq5Report {
        n: spec.n,
        d: spec.d,
        budget: spec.budget,
        instances: spec.instances,
        checkpoints,
        anneal_median_best,
        random_median_best,
        anneal_beats_random: anneal_median_best < random_median_best,
        traces_non_increasing,
        runs,
    })
}

impl Rq5Report {
    pub fn write(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        write_json(&dir.join("rq5.json"), self)?;
        let mut w = csv_writer(&dir.join("rq5_traces.csv"))?;
        w.write_record(["method", "seed", "step", "best_score", "ratio"])?;
        for (report, results) in &self.runs {
            for r in results {
                for p in &r.trace {
                    w.write_record([
                        r.method.as_str().to_string(),
                        report.seed.to_string(),
                        p.step.to_string(),
                        p.best_score.to_string(),
                        ratio(p.best_score, report.baseline_score).to_string(),
                    ])?;
                }
            }
        }
        w.flush().map_err(|e| Error::io(dir, e))?;
        let mut w = csv_writer(&dir.join("rq5_summary.csv"))?;
        w.write_record(["step", "anneal_median_ratio", "random_median_ratio"])?;
        for c in &self.checkpoints {
            w.write_record([
                c.step.to_string(),
                c.anneal_median_ratio.to_string(),
                c.random_median_ratio.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(dir, e))?;
        Ok(())
    }
}

/// Report for a single `search` run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub method: Method,
    pub budget: u64,
    pub seed: u64,
    pub instance: InstanceReport,
    pub best_perm: Permutation,
    pub best_cost: CostReport,
    pub verified: bool,
}

/// Runs one search and writes `report.json`, `permutation.txt`,
/// `circuit.qasm`, `circuit.json` and `trace.csv` into `dir`.
pub fn search_to_dir(db: &Database, cfg: &SearchConfig, dir: &Path) -> Result<SearchReport> {
    let (instance, mut results) = run_instance(db, cfg.seed, std::slice::from_ref(cfg))?;
    let result = results.pop().expect("one config");
    let (reordered, circuit) = synthesize(db, &result.best_perm)?;
    let verified = circuit.verify(&reordered)?.ok;
    let report = SearchReport {
        method: cfg.method,
        budget: cfg.budget,
        seed: cfg.seed,
        instance,
        best_perm: result.best_perm.clone(),
        best_cost: circuit.cost_report(),
        verified,
    };
    create_dir(dir)?;
    write_json(&dir.join("report.json"), &report)?;
    result.best_perm.save(dir.join("permutation.txt"))?;
    let qasm = dir.join("circuit.qasm");
    fs::write(&qasm, circuit.to_qasm()).map_err(|e| Error::io(&qasm, e))?;
    let json = dir.join("circuit.json");
    fs::write(&json, circuit.to_json()? + "\n").map_err(|e| Error::io(&json, e))?;
    let trace = dir.join("trace.csv");
    let file = fs::File::create(&trace).map_err(|e| Error::io(&trace, e))?;
    result.write_trace_csv(file)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let s = Spread::of(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.q3, 3.25);
        let one = Spread::of(&[2.0]);
        assert_eq!((one.q1, one.median, one.q3), (2.0, 2.0, 2.0));
    }

    #[test]
    fn org_score_counts_minterm_literals() {
        let db = Database::parse("1110\n1001\n0100\n1111\n").unwrap();
        assert_eq!(org_score(&db), 2 * 10);
    }

    #[test]
    fn rq1_single_instance_has_degenerate_iqr() {
        let spec = ExperimentSpec::new(2, 3, 1, 5, 50);
        let r = run_rq1(&spec).unwrap();
        assert_eq!(r.instances.len(), 1);
        assert_eq!(r.max_over_min.q1, r.max_over_min.q3);
        let ex = r.instances[0].exhaustive.as_ref().unwrap();
        assert!(ex.min as f64 <= ex.avg && ex.avg <= ex.max as f64);
        assert!(r.instances[0].methods[&Method::Anneal].best_score >= ex.min);
    }

    #[test]
    fn rq3_needs_two_instances() {
        assert!(matches!(
            run_rq3(&ExperimentSpec::new(3, 6, 1, 0, 10)),
            Err(Error::TooFewSamples(1))
        ));
    }

    #[test]
    fn rq4_budget_zero_is_unit_ratio() {
        let spec = ExperimentSpec::new(0, 6, 3, 0, 0);
        let r = run_rq4(&spec, &[4]).unwrap();
        assert_eq!(r.rows[0].anneal.median, 1.0);
        assert_eq!(r.rows[0].random.median, 1.0);
    }

    #[test]
    fn zero_instances_rejected() {
        assert!(run_rq1(&ExperimentSpec::new(3, 6, 0, 0, 10)).is_err());
    }
}
