//! Heuristic ESOP minimization by iterated cube transforms.
//!
//! Starting from the minterm cover, each iteration
//!
//! 1. sorts the cubes lexicographically,
//! 2. cancels identical pairs (`x ^ x = 0`),
//! 3. greedily merges distance-1 pairs in scan order, restarting the scan
//!    after every merge,
//! 4. runs one exorlink-2 pass that reshapes a distance-2 pair only when one
//!    of the new cubes is within distance 1 of some other cube in the cover,
//!
//! until an iteration changes nothing or [`MAX_ITERATIONS`] is reached. The
//! cheapest cover seen, by (literals, cubes), is returned.

use super::cover::{Cover, TruthTable};
use super::cube::Cube;

pub const MAX_ITERATIONS: usize = 50;

/// Minimizes one output bit. Pure and deterministic.
pub fn minimize(tt: &TruthTable) -> Cover {
    let n = tt.n();
    let cubes = Cover::minterms(tt).into_cubes();
    Cover::new(n, minimize_cubes(cubes, tt))
}

/// Runs the pass schedule on an arbitrary starting cover of `tt`.
pub fn minimize_cover(cover: &Cover, tt: &TruthTable) -> Cover {
    Cover::new(cover.n(), minimize_cubes(cover.cubes().to_vec(), tt))
}

fn cost(cubes: &[Cube]) -> (u64, usize) {
    (cubes.iter().map(|c| c.literal_count() as u64).sum(), cubes.len())
}

fn minimize_cubes(mut cubes: Vec<Cube>, _tt: &TruthTable) -> Vec<Cube> {
    cubes.sort_unstable();
    let mut changed = cancel_pairs(&mut cubes);
    let mut best = cubes.clone();
    let mut best_cost = cost(&best);

    for _ in 0..MAX_ITERATIONS {
        changed |= merge_pass(&mut cubes);
        changed |= exorlink_pass(&mut cubes);
        cubes.sort_unstable();
        changed |= cancel_pairs(&mut cubes);

        #[cfg(debug_assertions)]
        check_equivalent(&cubes, _tt);

        let c = cost(&cubes);
        if c < best_cost {
            best_cost = c;
            best.clone_from(&cubes);
        }
        if !changed {
            break;
        }
        changed = false;
    }
    best
}

#[cfg(debug_assertions)]
fn check_equivalent(cubes: &[Cube], tt: &TruthTable) {
    for a in 0..tt.len() {
        let v = cubes.iter().filter(|c| c.matches(a)).count() % 2 == 1;
        assert_eq!(v, tt.get(a), "minimizer broke XOR equivalence at address {a}");
    }
}

/// Removes identical pairs from a sorted list; an odd copy survives.
fn cancel_pairs(cubes: &mut Vec<Cube>) -> bool {
    let before = cubes.len();
    let mut out: Vec<Cube> = Vec::with_capacity(before);
    for &c in cubes.iter() {
        if out.last() == Some(&c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    *cubes = out;
    cubes.len() != before
}

/// Inserts into a sorted list, cancelling against an identical cube.
/// Returns the insertion index, or the index of the cancelled cube.
fn insert_sorted(cubes: &mut Vec<Cube>, c: Cube) -> (usize, bool) {
    match cubes.binary_search(&c) {
        Ok(i) => {
            cubes.remove(i);
            (i, false)
        }
        Err(i) => {
            cubes.insert(i, c);
            (i, true)
        }
    }
}

/// Greedy distance-1 merging over a sorted, duplicate-free list.
///
/// Produces exactly what restarting a row-major scan after every merge
/// would, without rescanning rows already known to be merge-free: after a
/// merge at row `p` landing at index `k`, rows before `min(p, k)` only need
/// to be tested against the new cube.
fn merge_pass(cubes: &mut Vec<Cube>) -> bool {
    let mut changed = false;
    let mut clean_rows = 0usize;
    let mut fresh: Option<usize> = None;
    loop {
        let m = cubes.len();
        let mut found = None;
        'scan: for p in 0..m {
            if p < clean_rows {
                if let Some(k) = fresh {
                    if k > p && cubes[p].distance(&cubes[k]) == 1 {
                        found = Some((p, k));
                        break 'scan;
                    }
                }
                continue;
            }
            let cp = cubes[p];
            if let Some(q) = cubes[p + 1..m].iter().position(|c| cp.distance(c) == 1) {
                found = Some((p, p + 1 + q));
                break 'scan;
            }
        }
        let Some((p, q)) = found else { break };
        changed = true;
        let merged = cubes[p].merge_unchecked(&cubes[q]);
        cubes.remove(q);
        cubes.remove(p);
        let (k, inserted) = insert_sorted(cubes, merged);
        clean_rows = p.min(k);
        fresh = inserted.then_some(k);
    }
    changed
}

/// One exorlink-2 pass with depth-1 lookahead. Each cube takes part in at
/// most one reshape per pass.
fn exorlink_pass(cubes: &mut [Cube]) -> bool {
    let m = cubes.len();
    let mut touched = vec![false; m];
    let mut changed = false;
    for p in 0..m {
        if touched[p] {
            continue;
        }
        for q in p + 1..m {
            if touched[q] || cubes[p].distance(&cubes[q]) != 2 {
                continue;
            }
            let mut alts = cubes[p].exorlink2_unchecked(&cubes[q]).map(|(x, y)| if y < x { (y, x) } else { (x, y) });
            alts.sort_unstable();
            let enabling = alts.into_iter().find(|&(x, y)| {
                cubes
                    .iter()
                    .enumerate()
                    .any(|(r, other)| r != p && r != q && (x.distance(other) <= 1 || y.distance(other) <= 1))
            });
            if let Some((x, y)) = enabling {
                cubes[p] = x;
                cubes[q] = y;
                touched[p] = true;
                touched[q] = true;
                changed = true;
                break;
            }
        }
    }
    changed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(cover: &Cover) -> Vec<String> {
        cover.cubes().iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn constant_false_is_empty() {
        assert!(minimize(&TruthTable::zeros(3)).is_empty());
    }

    #[test]
    fn single_minterm_stays() {
        let tt = TruthTable::from_bits(&[false, false, false, true]);
        assert_eq!(lines(&minimize(&tt)), ["11"]);
    }

    #[test]
    fn adjacent_minterms_merge() {
        let tt = TruthTable::from_bits(&[true, true, false, false]);
        assert_eq!(lines(&minimize(&tt)), ["0-"]);
    }

    #[test]
    fn constant_true_is_universe() {
        let tt = TruthTable::from_bits(&[true; 4]);
        assert_eq!(lines(&minimize(&tt)), ["--"]);
        let tt = TruthTable::from_fn(5, |_| true);
        assert_eq!(lines(&minimize(&tt)), ["-----"]);
    }

    #[test]
    fn parity_stays_correct() {
        // Every pair of parity minterms is at distance >= 2 and no single
        // exorlink-2 step creates a mergeable cube, so the cover stays put.
        let tt = TruthTable::from_fn(4, |a| a.count_ones() % 2 == 1);
        let cover = minimize(&tt);
        assert_eq!(cover.to_truth_table(), tt);
        assert_eq!(cover.literal_count(), 32);
    }

    #[test]
    fn cancel_pairs_keeps_odd_copy() {
        let c: Cube = "01".parse().unwrap();
        let d: Cube = "1-".parse().unwrap();
        let mut v = vec![c, c, c, d, d];
        assert!(cancel_pairs(&mut v));
        assert_eq!(v, vec![c]);
    }

    #[test]
    fn merge_pass_matches_naive_restart() {
        // Reference: full rescan after each merge.
        fn naive(mut cubes: Vec<Cube>) -> Vec<Cube> {
            'restart: loop {
                for p in 0..cubes.len() {
                    for q in p + 1..cubes.len() {
                        if cubes[p].distance(&cubes[q]) == 1 {
                            let m = cubes[p].merge_unchecked(&cubes[q]);
                            cubes.remove(q);
                            cubes.remove(p);
                            insert_sorted(&mut cubes, m);
                            continue 'restart;
                        }
                    }
                }
                return cubes;
            }
        }
        for seed in 0..300u64 {
            let n = 3 + (seed % 4) as usize;
            let tt = TruthTable::from_fn(n, |a| {
                (a as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(seed * 0x1234_5677) >> 61 & 1 == 1
            });
            let start = Cover::minterms(&tt).into_cubes();
            let mut fast = start.clone();
            merge_pass(&mut fast);
            assert_eq!(fast, naive(start), "seed {seed}");
        }
    }
}
