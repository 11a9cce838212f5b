//! Permutation search over the literal-count proxy.
//!
//! Three strategies share the same evaluator: simulated annealing over
//! pairwise swaps, a Random-K baseline of independent uniform orderings, and
//! lexicographic enumeration for small tables. Every run records an anytime
//! trace of the best score seen so far.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::database::{Database, Permutation};
use crate::error::{Error, Result};
use crate::esop::{minimize, TruthTable};

/// Default permutation cap for exhaustive search, `8!`.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 40_320;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Anneal,
    Random,
    Exhaustive,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Anneal => "anneal",
            Method::Random => "random",
            Method::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "anneal" => Ok(Method::Anneal),
            "random" => Ok(Method::Random),
            "exhaustive" => Ok(Method::Exhaustive),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub method: Method,
    /// Candidate evaluations after the initial ordering.
    pub budget: u64,
    pub t_max: f64,
    pub t_min: f64,
    pub seed: u64,
    /// Stop annealing after this many steps without a new best.
    pub patience: Option<u64>,
    /// Largest `N!` exhaustive search accepts without `force`.
    pub exhaustive_cap: u64,
    pub force: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            method: Method::Anneal,
            budget: 1000,
            t_max: 25_000.0,
            t_min: 2.5,
            seed: 0,
            patience: None,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            force: false,
        }
    }
}

impl SearchConfig {
    pub fn new(method: Method, budget: u64, seed: u64) -> Self {
        SearchConfig {
            method,
            budget,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(Error::Config(format!(
                "temperatures must satisfy t_max > t_min > 0, got t_max={} t_min={}",
                self.t_max, self.t_min
            )));
        }
        if self.patience == Some(0) {
            return Err(Error::Config("patience must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePoint {
    pub step: u64,
    pub best_score: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveStats {
    pub min: u64,
    pub max: u64,
    pub avg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub method: Method,
    pub best_perm: Permutation,
    pub best_score: u64,
    #[serde(skip)]
    pub trace: Vec<TracePoint>,
    /// Orderings scored, including the initial one.
    pub evaluations: u64,
    /// Annealing moves accepted despite a worse score.
    pub accepted_uphill: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<ExhaustiveStats>,
}

impl SearchResult {
    /// Best score after `step` evaluations (the trace is step-indexed from 0).
    pub fn best_at(&self, step: u64) -> u64 {
        let idx = self.trace.partition_point(|p| p.step <= step);
        self.trace[idx.saturating_sub(1)].best_score
    }

    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "best_score"])?;
        for p in &self.trace {
            w.write_record([p.step.to_string(), p.best_score.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<trace>", e))?;
        Ok(())
    }
}

/// Per-bit truth tables of `reorder(db, perm)`, built without materializing
/// the reordered database.
fn reordered_tables(db: &Database, perm: &Permutation) -> Vec<TruthTable> {
    let d = db.d();
    let mut tables = vec![TruthTable::zeros(db.n()); d];
    for (a, &word) in db.entries().iter().enumerate() {
        let target = perm.apply(a);
        for (j, t) in tables.iter_mut().enumerate() {
            if (word >> (d - 1 - j)) & 1 == 1 {
                t.set(target, true);
            }
        }
    }
    tables
}

/// Proxy score of one ordering: minimized literal total over all bits.
pub fn evaluate(db: &Database, perm: &Permutation) -> Result<u64> {
    check_len(db, perm)?;
    Ok(reordered_tables(db, perm)
        .iter()
        .map(|t| minimize(t).literal_count())
        .sum())
}

fn check_len(db: &Database, perm: &Permutation) -> Result<()> {
    if perm.len() != db.len() {
        return Err(Error::SizeMismatch {
            what: "permutation",
            got: perm.len(),
            expected: db.len(),
        });
    }
    Ok(())
}

/// Memoizing scorer. Minimization is a pure function of one truth table, so
/// caching per table gives the same scores as [`evaluate`].
pub struct Evaluator<'a> {
    db: &'a Database,
    cache: HashMap<TruthTable, u64>,
    evaluations: u64,
}

impl<'a> Evaluator<'a> {
    /// Bounds memory on long runs; the cache is simply dropped when full.
    const CACHE_LIMIT: usize = 1 << 20;

    pub fn new(db: &'a Database) -> Self {
        Evaluator {
            db,
            cache: HashMap::new(),
            evaluations: 0,
        }
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn score(&mut self, perm: &Permutation) -> u64 {
        debug_assert_eq!(perm.len(), self.db.len());
        self.evaluations += 1;
        let mut total = 0;
        for table in reordered_tables(self.db, perm) {
            total += match self.cache.get(&table) {
                Some(&lits) => lits,
                None => {
                    let lits = minimize(&table).literal_count();
                    if self.cache.len() >= Self::CACHE_LIMIT {
                        self.cache.clear();
                    }
                    self.cache.insert(table, lits);
                    lits
                }
            };
        }
        total
    }
}

/// Unbiased shuffle of `0..len` from the given generator.
pub fn uniform_permutation<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Permutation {
    let mut mapping: Vec<u32> = (0..len as u32).collect();
    mapping.shuffle(rng);
    Permutation::from_mapping(mapping).expect("shuffle of identity")
}

pub fn run(db: &Database, cfg: &SearchConfig) -> Result<SearchResult> {
    match cfg.method {
        Method::Anneal => anneal(db, cfg),
        Method::Random => random_k(db, cfg),
        Method::Exhaustive => exhaustive(db, cfg),
    }
}

/// Simulated annealing from the identity ordering.
///
/// Step `k` of `K = budget` swaps the words at two distinct random addresses
/// and accepts a worse score with probability `exp(-delta / T_k)`, where
/// `T_k = t_max * (t_min / t_max)^(k / K)`. Returns the best ordering visited.
pub fn anneal(db: &Database, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let len = db.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut eval = Evaluator::new(db);

    let mut current = Permutation::identity(len);
    let mut current_score = eval.score(&current);
    let mut best_perm = current.clone();
    let mut best_score = current_score;
    let mut trace = vec![TracePoint {
        step: 0,
        best_score,
    }];
    let mut accepted_uphill = 0;
    let mut last_improvement = 0;
    let ratio = cfg.t_min / cfg.t_max;

    for step in 1..=cfg.budget {
        if len >= 2 {
            let temperature = cfg.t_max * ratio.powf(step as f64 / cfg.budget as f64);
            let u = rng.random_range(0..len);
            let mut v = rng.random_range(0..len - 1);
            if v >= u {
                v += 1;
            }
            current.swap(u, v);
            let score = eval.score(&current);
            let delta = score as f64 - current_score as f64;
            let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
            if accept {
                if delta > 0.0 {
                    accepted_uphill += 1;
                }
                current_score = score;
                if score < best_score {
                    best_score = score;
                    best_perm.clone_from(&current);
                    last_improvement = step;
                }
            } else {
                current.swap(u, v);
            }
        }
        trace.push(TracePoint { step, best_score });
        if let Some(p) = cfg.patience {
            if step - last_improvement >= p {
                break;
            }
        }
    }

    Ok(SearchResult {
        method: Method::Anneal,
        best_perm,
        best_score,
        trace,
        evaluations: eval.evaluations(),
        accepted_uphill,
        stats: None,
    })
}

/// Scores the identity, then `budget` independent uniform orderings.
pub fn random_k(db: &Database, cfg: &SearchConfig) -> Result<SearchResult> {
    let len = db.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut eval = Evaluator::new(db);

    let mut best_perm = Permutation::identity(len);
    let mut best_score = eval.score(&best_perm);
    let mut trace = vec![TracePoint {
        step: 0,
        best_score,
    }];
    for step in 1..=cfg.budget {
        let perm = uniform_permutation(len, &mut rng);
        let score = eval.score(&perm);
        if score < best_score || (score == best_score && perm < best_perm) {
            best_score = score;
            best_perm = perm;
        }
        trace.push(TracePoint { step, best_score });
    }

    Ok(SearchResult {
        method: Method::Random,
        best_perm,
        best_score,
        trace,
        evaluations: eval.evaluations(),
        accepted_uphill: 0,
        stats: None,
    })
}

fn factorial_saturating(k: usize) -> u64 {
    (1..=k as u64).fold(1u64, |acc, x| acc.saturating_mul(x))
}

/// Enumerates every ordering in lexicographic order. The first minimum found
/// is also the lexicographically smallest one.
pub fn exhaustive(db: &Database, cfg: &SearchConfig) -> Result<SearchResult> {
    let len = db.len();
    let total = factorial_saturating(len);
    if total > cfg.exhaustive_cap && !cfg.force {
        return Err(Error::ExhaustiveCap {
            size: len,
            cap: cfg.exhaustive_cap,
        });
    }
    let mut eval = Evaluator::new(db);
    let mut perm = Permutation::identity(len);
    let first = eval.score(&perm);
    let (mut best_perm, mut best_score) = (perm.clone(), first);
    let (mut max, mut sum) = (first, first as u128);
    let mut trace = vec![TracePoint {
        step: 0,
        best_score,
    }];
    let mut step = 0;
    while perm.next_lexicographic() {
        step += 1;
        let score = eval.score(&perm);
        if score < best_score {
            best_score = score;
            best_perm.clone_from(&perm);
        }
        max = max.max(score);
        sum += score as u128;
        trace.push(TracePoint { step, best_score });
    }
    let evaluations = eval.evaluations();
    Ok(SearchResult {
        method: Method::Exhaustive,
        best_perm,
        best_score,
        trace,
        evaluations,
        accepted_uphill: 0,
        stats: Some(ExhaustiveStats {
            min: best_score,
            max,
            avg: sum as f64 / evaluations as f64,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Database {
        Database::parse("1110\n1001\n0100\n1111\n").unwrap()
    }

    #[test]
    fn evaluator_matches_uncached_evaluate() {
        let db = Database::random(4, 6, 3).unwrap();
        let mut eval = Evaluator::new(&db);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let p = uniform_permutation(db.len(), &mut rng);
            assert_eq!(eval.score(&p), evaluate(&db, &p).unwrap());
        }
        assert_eq!(eval.evaluations(), 50);
    }

    #[test]
    fn evaluate_rejects_wrong_size() {
        assert!(evaluate(&fig1(), &Permutation::identity(8)).is_err());
    }

    #[test]
    fn swap_example_not_worse_than_identity() {
        let db = fig1();
        let id = evaluate(&db, &Permutation::identity(4)).unwrap();
        let swapped = evaluate(&db, &Permutation::from_mapping(vec![2, 1, 0, 3]).unwrap()).unwrap();
        assert_eq!(id, evaluate(&db, &Permutation::identity(4)).unwrap());
        assert!(swapped <= id, "swapped {swapped} identity {id}");
    }

    #[test]
    fn budget_zero() {
        let db = Database::random(3, 6, 1).unwrap();
        for method in [Method::Anneal, Method::Random] {
            let r = run(&db, &SearchConfig::new(method, 0, 5)).unwrap();
            assert!(r.best_perm.is_identity());
            assert_eq!(r.trace.len(), 1);
            assert_eq!(r.evaluations, 1);
        }
    }

    #[test]
    fn exhaustive_sizes_and_cap() {
        let db = Database::new(1, vec![0, 1]).unwrap();
        let r = exhaustive(&db, &SearchConfig::default()).unwrap();
        assert_eq!(r.evaluations, 2);
        let db = fig1();
        let r = exhaustive(&db, &SearchConfig::default()).unwrap();
        assert_eq!(r.evaluations, 24);
        let s = r.stats.unwrap();
        assert!(s.min as f64 <= s.avg && s.avg <= s.max as f64);
        assert!(s.min <= evaluate(&db, &Permutation::identity(4)).unwrap());

        let big = Database::random(4, 2, 0).unwrap();
        assert!(matches!(
            exhaustive(&big, &SearchConfig::default()),
            Err(Error::ExhaustiveCap { size: 16, .. })
        ));
    }

    #[test]
    fn greedy_limit_never_goes_uphill() {
        let db = Database::random(4, 6, 21).unwrap();
        let cfg = SearchConfig {
            t_max: 1e-9,
            t_min: 1e-12,
            ..SearchConfig::new(Method::Anneal, 300, 4)
        };
        let r = anneal(&db, &cfg).unwrap();
        assert_eq!(r.accepted_uphill, 0);
    }

    #[test]
    fn default_temperatures_explore() {
        let db = Database::random(4, 6, 21).unwrap();
        let r = anneal(&db, &SearchConfig::new(Method::Anneal, 300, 4)).unwrap();
        assert!(r.accepted_uphill > 0);
    }

    #[test]
    fn patience_stops_early() {
        let db = Database::random(4, 6, 2).unwrap();
        let cfg = SearchConfig {
            patience: Some(20),
            ..SearchConfig::new(Method::Anneal, 5000, 1)
        };
        let r = anneal(&db, &cfg).unwrap();
        assert!(r.trace.len() < 5001);
        let last = r.trace.last().unwrap().step;
        let improved = r.trace.windows(2).rfind(|w| w[1].best_score < w[0].best_score);
        let since = improved.map_or(0, |w| w[1].step);
        assert_eq!(last - since, 20);
    }

    #[test]
    fn config_validation() {
        let bad = SearchConfig {
            t_max: 1.0,
            t_min: 2.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let db = fig1();
        assert!(anneal(&db, &bad).is_err());
        assert_eq!("random".parse::<Method>().unwrap(), Method::Random);
        assert!("beam".parse::<Method>().is_err());
    }

    #[test]
    fn single_address_permutation_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(uniform_permutation(1, &mut rng).is_identity());
    }

    #[test]
    fn best_at_reads_prefix() {
        let db = Database::random(4, 6, 8).unwrap();
        let r = random_k(&db, &SearchConfig::new(Method::Random, 200, 3)).unwrap();
        assert_eq!(r.best_at(0), r.trace[0].best_score);
        assert_eq!(r.best_at(200), r.best_score);
        assert_eq!(r.best_at(10_000), r.best_score);
    }

    #[test]
    fn trace_csv() {
        let db = fig1();
        let r = random_k(&db, &SearchConfig::new(Method::Random, 2, 0)).unwrap();
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,best_score\n0,"));
        assert_eq!(text.lines().count(), 4);
    }
}
