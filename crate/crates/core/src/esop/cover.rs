use std::fmt;

use super::cube::Cube;
use crate::database::Database;

/// A single-output Boolean function over `n` address bits, packed 64 points
/// per word. Unused high bits of the last word are zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(n: usize) -> TruthTable {
        let len = 1usize << n;
        TruthTable {
            n,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> TruthTable {
        let mut tt = TruthTable::zeros(n);
        for a in 0..tt.len() {
            if f(a) {
                tt.set(a, true);
            }
        }
        tt
    }

    pub fn from_bits(bits: &[bool]) -> TruthTable {
        assert!(bits.len().is_power_of_two(), "truth table length must be 2^n");
        TruthTable::from_fn(bits.len().trailing_zeros() as usize, |a| bits[a])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, a: usize) -> bool {
        (self.words[a / 64] >> (a % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, a: usize, v: bool) {
        let bit = 1u64 << (a % 64);
        if v {
            self.words[a / 64] |= bit;
        } else {
            self.words[a / 64] &= !bit;
        }
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len()).map(|a| self.get(a)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Addresses where the function is true, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// One truth table per output bit, `tables[j]` for bit `j` (0 = MSB).
pub fn extract_truth_tables(db: &Database) -> Vec<TruthTable> {
    let d = db.d();
    let mut tables = vec![TruthTable::zeros(db.n()); d];
    for (a, &word) in db.entries().iter().enumerate() {
        for (j, table) in tables.iter_mut().enumerate() {
            if (word >> (d - 1 - j)) & 1 == 1 {
                table.set(a, true);
            }
        }
    }
    tables
}

/// An XOR of cubes over a common width.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cover {
    n: usize,
    cubes: Vec<Cube>,
}

impl Cover {
    pub fn empty(n: usize) -> Cover {
        Cover { n, cubes: Vec::new() }
    }

    pub fn new(n: usize, cubes: Vec<Cube>) -> Cover {
        assert!(cubes.iter().all(|c| c.width() == n), "cube width mismatch");
        Cover { n, cubes }
    }

    /// One fully specified cube per true point.
    pub fn minterms(tt: &TruthTable) -> Cover {
        Cover {
            n: tt.n(),
            cubes: tt.ones().map(|a| Cube::minterm(tt.n(), a)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn into_cubes(self) -> Vec<Cube> {
        self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn eval(&self, a: usize) -> bool {
        self.cubes.iter().filter(|c| c.matches(a)).count() % 2 == 1
    }

    pub fn to_truth_table(&self) -> TruthTable {
        TruthTable::from_fn(self.n, |a| self.eval(a))
    }

    pub fn literal_count(&self) -> u64 {
        self.cubes.iter().map(|c| c.literal_count() as u64).sum()
    }

    /// Removes one cube, returning it.
    pub fn remove(&mut self, index: usize) -> Cube {
        self.cubes.remove(index)
    }
}

/// `bit j: <cube>` lines for a set of per-bit covers.
pub struct CoverListing<'a>(pub &'a [Cover]);

impl fmt::Display for CoverListing<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, cover) in self.0.iter().enumerate() {
            for cube in cover.cubes() {
                writeln!(f, "bit {j}: {cube}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Cube {
        s.parse().unwrap()
    }

    #[test]
    fn extract_from_motivation_table() {
        let db = Database::parse("1110\n1001\n0100\n1111\n").unwrap();
        let tables = extract_truth_tables(&db);
        assert_eq!(tables.len(), 4);
        assert_eq!(tables[0].bits(), vec![true, true, false, true]);
        assert_eq!(tables[3].bits(), vec![false, true, false, true]);
    }

    #[test]
    fn extract_constant_and_tiny() {
        let db = Database::new(3, vec![0; 8]).unwrap();
        assert!(extract_truth_tables(&db).iter().all(|t| t.count_ones() == 0));
        let db = Database::new(1, vec![1, 0]).unwrap();
        assert_eq!(extract_truth_tables(&db)[0].bits(), vec![true, false]);
    }

    #[test]
    fn eval_xor_semantics() {
        assert!((0..4).all(|a| !Cover::empty(2).eval(a)));
        let cover = Cover::new(2, vec![c("0-"), c("00")]);
        let got: Vec<bool> = (0..4).map(|a| cover.eval(a)).collect();
        assert_eq!(got, vec![false, true, false, false]);
        let twice = Cover::new(3, vec![c("1-0"), c("1-0")]);
        assert!((0..8).all(|a| !twice.eval(a)));
    }

    #[test]
    fn ones_iterates_across_words() {
        let tt = TruthTable::from_fn(8, |a| a % 37 == 0);
        assert_eq!(tt.ones().collect::<Vec<_>>(), vec![0, 37, 74, 111, 148, 185, 222]);
        assert_eq!(Cover::minterms(&tt).to_truth_table(), tt);
    }

    #[test]
    fn listing_format() {
        let covers = vec![Cover::new(3, vec![c("01-")]), Cover::empty(3), Cover::new(3, vec![c("1--")])];
        assert_eq!(CoverListing(&covers).to_string(), "bit 0: 01-\nbit 2: 1--\n");
    }
}
