use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One position of a product term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Zero,
    One,
    DontCare,
}

impl Literal {
    pub fn as_char(self) -> char {
        match self {
            Literal::Zero => '0',
            Literal::One => '1',
            Literal::DontCare => '-',
        }
    }

    /// Pointwise XOR of two distinct single-variable literals, viewed as the
    /// functions `!x`, `x` and `1`.
    fn xor(self, other: Literal) -> Literal {
        use Literal::*;
        match (self, other) {
            (Zero, One) | (One, Zero) => DontCare,
            (Zero, DontCare) | (DontCare, Zero) => One,
            (One, DontCare) | (DontCare, One) => Zero,
            _ => unreachable!("xor of equal literals is the zero function"),
        }
    }
}

/// A product term over `width` address variables.
///
/// Variable 0 is the address MSB. Internally variable `i` lives at bit
/// `width - 1 - i` of `care`/`value`, so a cube matches address `a` exactly
/// when `a & care == value`. Bits of `value` outside `care` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    width: u8,
    care: u32,
    value: u32,
}

impl Cube {
    pub const MAX_WIDTH: usize = 32;

    /// The cube with every position don't-care.
    pub fn universe(width: usize) -> Cube {
        assert!(width <= Self::MAX_WIDTH);
        Cube {
            width: width as u8,
            care: 0,
            value: 0,
        }
    }

    /// The fully specified cube matching only `address`.
    pub fn minterm(width: usize, address: usize) -> Cube {
        assert!(width <= Self::MAX_WIDTH);
        let care = mask(width);
        Cube {
            width: width as u8,
            care,
            value: address as u32 & care,
        }
    }

    pub fn from_literals(lits: &[Literal]) -> Cube {
        let mut cube = Cube::universe(lits.len());
        for (i, &lit) in lits.iter().enumerate() {
            cube.set(i, lit);
        }
        cube
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Bitmask (in address-bit space) of the specified positions.
    pub fn care_mask(&self) -> u32 {
        self.care
    }

    /// Required address bits on the specified positions.
    pub fn value_mask(&self) -> u32 {
        self.value
    }

    #[inline]
    fn bit_of(&self, var: usize) -> u32 {
        debug_assert!(var < self.width());
        1 << (self.width() - 1 - var)
    }

    pub fn literal(&self, var: usize) -> Literal {
        let b = self.bit_of(var);
        if self.care & b == 0 {
            Literal::DontCare
        } else if self.value & b == 0 {
            Literal::Zero
        } else {
            Literal::One
        }
    }

    pub fn set(&mut self, var: usize, lit: Literal) {
        let b = self.bit_of(var);
        match lit {
            Literal::DontCare => {
                self.care &= !b;
                self.value &= !b;
            }
            Literal::Zero => {
                self.care |= b;
                self.value &= !b;
            }
            Literal::One => {
                self.care |= b;
                self.value |= b;
            }
        }
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        (0..self.width()).map(|i| self.literal(i))
    }

    /// Number of specified (non don't-care) positions.
    #[inline]
    pub fn literal_count(&self) -> u32 {
        self.care.count_ones()
    }

    #[inline]
    pub fn matches(&self, address: usize) -> bool {
        (address as u32) & self.care == self.value
    }

    #[inline]
    fn diff_mask(&self, other: &Cube) -> u32 {
        (self.care ^ other.care) | (self.care & other.care & (self.value ^ other.value))
    }

    /// Number of positions whose ternary values differ.
    #[inline]
    pub fn distance(&self, other: &Cube) -> u32 {
        debug_assert_eq!(self.width, other.width);
        self.diff_mask(other).count_ones()
    }

    /// Variables (in 0..width order) at which the two cubes differ.
    fn differing_vars(&self, other: &Cube) -> impl Iterator<Item = usize> {
        let diff = self.diff_mask(other);
        let width = self.width();
        (0..width).filter(move |&i| diff & (1 << (width - 1 - i)) != 0)
    }

    /// Replaces a distance-1 pair with the single cube equal to their XOR.
    pub fn merge_distance1(&self, other: &Cube) -> Result<Cube> {
        let dist = self.distance(other);
        if dist != 1 || self.width != other.width {
            return Err(Error::CubeDistance { got: dist, expected: 1 });
        }
        Ok(self.merge_unchecked(other))
    }

    #[inline]
    pub(crate) fn merge_unchecked(&self, other: &Cube) -> Cube {
        let var = self.differing_vars(other).next().expect("distance 1");
        let mut out = *self;
        out.set(var, self.literal(var).xor(other.literal(var)));
        out
    }

    /// The two exorlink reshapes of a distance-2 pair. Each returned pair has
    /// the same XOR as `(self, other)`; the first resolves the lower-index
    /// differing variable first, the second the higher one.
    ///
    /// With `self = x·a·b`, `other = x·a'·b'` the identity used is
    /// `a·b ^ a'·b' = (a^a')·b ^ a'·(b^b')`.
    pub fn exorlink2(&self, other: &Cube) -> Result<[(Cube, Cube); 2]> {
        let dist = self.distance(other);
        if dist != 2 || self.width != other.width {
            return Err(Error::CubeDistance { got: dist, expected: 2 });
        }
        Ok(self.exorlink2_unchecked(other))
    }

    pub(crate) fn exorlink2_unchecked(&self, other: &Cube) -> [(Cube, Cube); 2] {
        let mut vars = self.differing_vars(other);
        let p = vars.next().expect("distance 2");
        let q = vars.next().expect("distance 2");
        let (ap, aq) = (self.literal(p), self.literal(q));
        let (bp, bq) = (other.literal(p), other.literal(q));
        let build = |lp: Literal, lq: Literal| {
            let mut c = *self;
            c.set(p, lp);
            c.set(q, lq);
            c
        };
        [
            (build(ap.xor(bp), aq), build(bp, aq.xor(bq))),
            (build(ap, aq.xor(bq)), build(ap.xor(bp), bq)),
        ]
    }
}

#[inline]
pub(crate) fn mask(width: usize) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

/// Lexicographic over variables 0..width with `Zero < One < DontCare`.
impl Ord for Cube {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width.cmp(&other.width).then_with(|| {
            let diff = (self.care ^ other.care) | (self.value ^ other.value);
            if diff == 0 {
                return Ordering::Equal;
            }
            let top = 1u32 << (31 - diff.leading_zeros());
            let code = |c: &Cube| {
                if c.care & top == 0 {
                    2
                } else {
                    (c.value & top != 0) as u8
                }
            };
            code(self).cmp(&code(other))
        })
    }
}

impl PartialOrd for Cube {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for lit in self.literals() {
            write!(f, "{}", lit.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cube({self})")
    }
}

impl FromStr for Cube {
    type Err = Error;

    fn from_str(s: &str) -> Result<Cube> {
        let lits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(Literal::Zero),
                '1' => Ok(Literal::One),
                '-' => Ok(Literal::DontCare),
                other => Err(Error::BadCubeChar(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        if lits.len() > Cube::MAX_WIDTH {
            return Err(Error::AddressWidth {
                got: lits.len(),
                max: Cube::MAX_WIDTH,
            });
        }
        Ok(Cube::from_literals(&lits))
    }
}
