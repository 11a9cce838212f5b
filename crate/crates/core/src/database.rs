//! Fixed lookup tables and address permutations.
//!
//! A [`Database`] holds `2^n` data words of `d` bits. Words are written
//! MSB-first: output bit `j` of the data register is character `j` of the
//! textual word, i.e. bit `d - 1 - j` of the stored integer.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported address width. Cubes pack one address variable per bit
/// of a `u32`, and truth tables hold `2^n` bits in memory.
pub const MAX_ADDRESS_WIDTH: usize = 24;

/// Largest supported data width (one `u64` per word).
pub const MAX_DATA_WIDTH: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Database {
    n: usize,
    d: usize,
    entries: Vec<u64>,
}

fn data_mask(d: usize) -> u64 {
    if d >= 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

impl Database {
    /// Builds a database from raw words. The entry count fixes `n`.
    pub fn new(d: usize, entries: Vec<u64>) -> Result<Self> {
        if d == 0 || d > MAX_DATA_WIDTH {
            return Err(Error::DataWidth(d));
        }
        let len = entries.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_ADDRESS_WIDTH {
            return Err(Error::AddressWidth {
                got: n,
                max: MAX_ADDRESS_WIDTH,
            });
        }
        let mask = data_mask(d);
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, &v)| v & !mask != 0) {
            return Err(Error::EntryTooWide {
                index,
                value,
                width: d,
            });
        }
        Ok(Self { n, d, entries })
    }

    /// Address width in bits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Data width in bits.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of addresses, `2^n`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn entry(&self, address: usize) -> u64 {
        self.entries[address]
    }

    /// Output bit `j` (0 = MSB) of the word at `address`.
    pub fn bit(&self, address: usize, j: usize) -> bool {
        (self.entries[address] >> (self.d - 1 - j)) & 1 == 1
    }

    /// Formats one word MSB-first.
    pub fn format_word(&self, word: u64) -> String {
        (0..self.d)
            .map(|j| if (word >> (self.d - 1 - j)) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Moves the word stored at `a` to `perm(a)`.
    pub fn reorder(&self, perm: &Permutation) -> Result<Database> {
        if perm.len() != self.len() {
            return Err(Error::SizeMismatch {
                what: "permutation",
                got: perm.len(),
                expected: self.len(),
            });
        }
        let mut entries = vec![0u64; self.len()];
        for (a, &word) in self.entries.iter().enumerate() {
            entries[perm.apply(a)] = word;
        }
        Ok(Database {
            n: self.n,
            d: self.d,
            entries,
        })
    }

    /// Uniform random words, deterministic in `seed`. Duplicates are kept.
    pub fn random(n: usize, d: usize, seed: u64) -> Result<Database> {
        if n == 0 || n > MAX_ADDRESS_WIDTH {
            return Err(Error::AddressWidth {
                got: n,
                max: MAX_ADDRESS_WIDTH,
            });
        }
        if d == 0 || d > MAX_DATA_WIDTH {
            return Err(Error::DataWidth(d));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = data_mask(d);
        let entries = (0..1usize << n).map(|_| rng.random::<u64>() & mask).collect();
        Database::new(d, entries)
    }

    /// Parses the line-per-word text format.
    pub fn parse(text: &str) -> Result<Database> {
        let mut width = None;
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            let lineno = i + 1;
            let expected = *width.get_or_insert(line.len());
            if line.len() != expected || expected == 0 {
                return Err(Error::InconsistentWidth {
                    line: lineno,
                    expected,
                    found: line.len(),
                });
            }
            if expected > MAX_DATA_WIDTH {
                return Err(Error::DataWidth(expected));
            }
            let mut word = 0u64;
            for ch in line.chars() {
                word = (word << 1)
                    | match ch {
                        '0' => 0,
                        '1' => 1,
                        other => return Err(Error::BadCharacter { line: lineno, ch: other }),
                    };
            }
            entries.push(word);
        }
        let len = entries.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        Database::new(width.unwrap_or(0), entries)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * (self.d + 1));
        for &w in &self.entries {
            out.push_str(&self.format_word(w));
            out.push('\n');
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Database> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Database::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct DatabaseJson {
    n: usize,
    d: usize,
    entries: Vec<String>,
}

impl Serialize for Database {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DatabaseJson {
            n: self.n,
            d: self.d,
            entries: self.entries.iter().map(|&w| self.format_word(w)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Database {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DatabaseJson::deserialize(de)?;
        let mut text = raw.entries.join("\n");
        text.push('\n');
        let db = Database::parse(&text).map_err(D::Error::custom)?;
        if db.n != raw.n || db.d != raw.d {
            return Err(D::Error::custom(format!(
                "header n={}, d={} disagrees with entries (n={}, d={})",
                raw.n, raw.d, db.n, db.d
            )));
        }
        Ok(db)
    }
}

/// A bijection on `0..N`, stored as `mapping[a] = pi(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    mapping: Vec<u32>,
}

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Self {
            mapping: (0..len as u32).collect(),
        }
    }

    pub fn from_mapping(mapping: Vec<u32>) -> Result<Self> {
        let len = mapping.len();
        let mut seen = vec![false; len];
        for (a, &p) in mapping.iter().enumerate() {
            let p = p as usize;
            if p >= len {
                return Err(Error::NotABijection {
                    len,
                    reason: format!("pi({a}) = {p} is out of range"),
                });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::NotABijection {
                    len,
                    reason: format!("value {p} appears twice"),
                });
            }
        }
        Ok(Self { mapping })
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[u32] {
        &self.mapping
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.mapping[a] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(a, &p)| a == p as usize)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.len()];
        for (a, &p) in self.mapping.iter().enumerate() {
            inv[p as usize] = a as u32;
        }
        Permutation { mapping: inv }
    }

    /// `self` followed by `next`: the result maps `a` to `next(self(a))`.
    pub fn then(&self, next: &Permutation) -> Result<Permutation> {
        if next.len() != self.len() {
            return Err(Error::SizeMismatch {
                what: "permutation",
                got: next.len(),
                expected: self.len(),
            });
        }
        Ok(Permutation {
            mapping: self.mapping.iter().map(|&p| next.mapping[p as usize]).collect(),
        })
    }

    /// Exchanges the images of `a` and `b`.
    pub fn swap(&mut self, a: usize, b: usize) {
        self.mapping.swap(a, b);
    }

    /// Advances to the next permutation in lexicographic order. Returns
    /// `false` (leaving `self` untouched) when already at the last one.
    pub fn next_lexicographic(&mut self) -> bool {
        let m = &mut self.mapping;
        let Some(i) = (1..m.len()).rev().find(|&i| m[i - 1] < m[i]) else {
            return false;
        };
        let pivot = i - 1;
        let j = (i..m.len()).rev().find(|&j| m[j] > m[pivot]).expect("successor exists");
        m.swap(pivot, j);
        m[i..].reverse();
        true
    }

    /// One address per line, line `i` holding `pi(i)`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.mapping {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Permutation> {
        let mapping = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.parse::<u32>().map_err(|e| Error::NotABijection {
                    len: 0,
                    reason: format!("bad line {l:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_mapping(mapping)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Permutation> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Permutation::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}
