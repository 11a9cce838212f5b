//! Literal-count proxy, gate histograms, formula T-counts and rank
//! correlation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esop::{Cover, Cube};

pub fn literal_count(cube: &Cube) -> u32 {
    cube.literal_count()
}

/// Total specified literals over all cubes of all output bits.
pub fn proxy_score(covers: &[Cover]) -> u64 {
    covers
        .iter()
        .flat_map(|c| c.cubes())
        .map(|c| literal_count(c) as u64)
        .sum()
}

/// T gates for one MCX with `controls` controls. X and CX are Clifford;
/// from two controls on, the `8k - 12` decomposition count applies.
pub fn mcx_t_count(controls: usize) -> u64 {
    if controls <= 1 {
        0
    } else {
        8 * controls as u64 - 12
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub n: usize,
    pub d: usize,
    pub proxy: u64,
    pub cube_count: u64,
    /// Control count -> number of gates.
    pub gate_histogram: BTreeMap<usize, u64>,
    pub t_count: u64,
}

impl CostReport {
    pub fn from_histogram(n: usize, d: usize, gate_histogram: BTreeMap<usize, u64>) -> CostReport {
        let proxy = gate_histogram.iter().map(|(&k, &g)| k as u64 * g).sum();
        let cube_count = gate_histogram.values().sum();
        let t_count = gate_histogram.iter().map(|(&k, &g)| mcx_t_count(k) * g).sum();
        CostReport {
            n,
            d,
            proxy,
            cube_count,
            gate_histogram,
            t_count,
        }
    }

    pub fn from_covers(n: usize, covers: &[Cover]) -> CostReport {
        let mut hist = BTreeMap::new();
        for cube in covers.iter().flat_map(|c| c.cubes()) {
            *hist.entry(cube.literal_count() as usize).or_insert(0) += 1;
        }
        CostReport::from_histogram(n, covers.len(), hist)
    }

    /// Number of gates with exactly `k` controls.
    pub fn gates_with(&self, k: usize) -> u64 {
        self.gate_histogram.get(&k).copied().unwrap_or(0)
    }
}

/// Average (1-based) ranks; tied values share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho as the Pearson correlation of average ranks. Returns NaN
/// when either side is constant.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::SizeMismatch {
            what: "ys",
            got: ys.len(),
            expected: xs.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewSamples(xs.len()));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let mean = (xs.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - mean, b - mean);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(f64::NAN);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Cube {
        s.parse().unwrap()
    }

    #[test]
    fn literal_counts() {
        assert_eq!(literal_count(&c("01-")), 2);
        assert_eq!(literal_count(&c("1--")), 1);
        assert_eq!(literal_count(&c("---")), 0);
    }

    #[test]
    fn proxy_sums() {
        assert_eq!(proxy_score(&[Cover::empty(3), Cover::empty(3)]), 0);
        assert_eq!(proxy_score(&[Cover::new(3, vec![c("01-"), c("1--")])]), 3);
    }

    #[test]
    fn t_counts() {
        assert_eq!(mcx_t_count(0), 0);
        assert_eq!(mcx_t_count(1), 0);
        assert_eq!(mcx_t_count(2), 4);
        assert_eq!(mcx_t_count(3), 12);
        assert_eq!(mcx_t_count(7), 44);
    }

    #[test]
    fn report_identities() {
        let covers = vec![
            Cover::new(3, vec![c("01-"), c("1--"), c("---")]),
            Cover::new(3, vec![c("011"), c("10-")]),
        ];
        let r = CostReport::from_covers(3, &covers);
        assert_eq!(r.d, 2);
        assert_eq!(r.proxy, 2 + 1 + 3 + 2);
        assert_eq!(r.cube_count, 5);
        assert_eq!(r.t_count, 4 + 12 + 4);
        assert_eq!(r.gates_with(0), 1);
        let json = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        assert_eq!(keys.len(), 6);
    }

    #[test]
    fn spearman_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman_rho(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman_rho(&xs, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((spearman_rho(&xs, &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!((spearman_rho(&[0.5, 0.9], &[0.1, 0.7]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_ties_and_errors() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
        assert!(spearman_rho(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap().is_nan());
        assert!(matches!(spearman_rho(&[1.0], &[1.0]), Err(Error::TooFewSamples(1))));
        assert!(spearman_rho(&[1.0, 2.0], &[1.0]).is_err());
    }
}
