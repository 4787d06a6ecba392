use std::fmt;
use std::str::FromStr;

use super::RulesError;

/// A board square in a8-major order: a8 = 0, b8 = 1, ..., h1 = 63.
///
/// This is also the order of the 64 board labels, so label `i` describes
/// `Square(i)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Square(u8);

impl Square {
    pub const A8: Square = Square(0);
    pub const E8: Square = Square(4);
    pub const H8: Square = Square(7);
    pub const A1: Square = Square(56);
    pub const E1: Square = Square(60);
    pub const H1: Square = Square(63);

    #[inline]
    pub const fn new(index: u8) -> Option<Square> {
        if index < 64 {
            Some(Square(index))
        } else {
            None
        }
    }

    /// Caller guarantees `index < 64`.
    #[inline]
    pub(crate) const fn new_unchecked(index: u8) -> Square {
        debug_assert!(index < 64);
        Square(index)
    }

    /// `file` 0..8 is a..h, `rank` 0..8 is rank 1..8.
    #[inline]
    pub const fn from_file_rank(file: u8, rank: u8) -> Option<Square> {
        if file < 8 && rank < 8 {
            Some(Square((7 - rank) * 8 + file))
        } else {
            None
        }
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// 0 for the a-file, 7 for the h-file.
    #[inline]
    pub const fn file(self) -> u8 {
        self.0 & 7
    }

    /// 0 for rank 1, 7 for rank 8.
    #[inline]
    pub const fn rank(self) -> u8 {
        7 - (self.0 >> 3)
    }

    #[inline]
    pub const fn bb(self) -> u64 {
        1u64 << self.0
    }

    /// Whether the square is dark; only compared for equality.
    #[inline]
    pub const fn is_dark(self) -> bool {
        (self.file() + self.rank()) % 2 == 0
    }

    pub fn all() -> impl Iterator<Item = Square> {
        (0..64).map(Square)
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.file()) as char, (b'1' + self.rank()) as char)
    }
}

impl fmt::Debug for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Square {
    type Err = RulesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.as_bytes() {
            [f @ b'a'..=b'h', r @ b'1'..=b'8'] => Ok(Square::from_file_rank(f - b'a', r - b'1').unwrap()),
            _ => Err(RulesError::BadSquare(s.to_string())),
        }
    }
}

/// Iterates the set squares of a bitboard, lowest index first.
#[derive(Clone, Copy)]
pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = Square;

    #[inline]
    fn next(&mut self) -> Option<Square> {
        if self.0 == 0 {
            return None;
        }
        let sq = self.0.trailing_zeros() as u8;
        self.0 &= self.0 - 1;
        Some(Square(sq))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a8_major_indexing() {
        assert_eq!("a8".parse::<Square>().unwrap().index(), 0);
        assert_eq!("b8".parse::<Square>().unwrap().index(), 1);
        assert_eq!("h1".parse::<Square>().unwrap().index(), 63);
        assert_eq!("e2".parse::<Square>().unwrap().index(), 52);
        assert_eq!("e4".parse::<Square>().unwrap().index(), 36);
        for sq in Square::all() {
            assert_eq!(sq.to_string().parse::<Square>().unwrap(), sq);
            let expected = (8 - (sq.rank() as usize + 1)) * 8 + sq.file() as usize;
            assert_eq!(sq.index(), expected);
        }
        assert!("i1".parse::<Square>().is_err());
        assert!("a9".parse::<Square>().is_err());
    }

    #[test]
    fn square_colours() {
        let a1: Square = "a1".parse().unwrap();
        let h1: Square = "h1".parse().unwrap();
        assert!(a1.is_dark());
        assert!(!h1.is_dark());
    }
}
