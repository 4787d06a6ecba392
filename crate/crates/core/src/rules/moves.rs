use std::fmt;
use std::str::FromStr;

use super::{PieceKind, RulesError, Square};

/// Promotion selector in token order: none, queen, rook, bishop, knight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Promotion {
    #[default]
    None = 0,
    Queen = 1,
    Rook = 2,
    Bishop = 3,
    Knight = 4,
}

impl Promotion {
    pub const PIECES: [Promotion; 4] = [Promotion::Queen, Promotion::Rook, Promotion::Bishop, Promotion::Knight];

    #[inline]
    pub const fn code(self) -> u8 {
        self as u8
    }

    pub const fn from_code(code: u8) -> Option<Promotion> {
        Some(match code {
            0 => Promotion::None,
            1 => Promotion::Queen,
            2 => Promotion::Rook,
            3 => Promotion::Bishop,
            4 => Promotion::Knight,
            _ => return None,
        })
    }

    pub const fn kind(self) -> Option<PieceKind> {
        match self {
            Promotion::None => None,
            Promotion::Queen => Some(PieceKind::Queen),
            Promotion::Rook => Some(PieceKind::Rook),
            Promotion::Bishop => Some(PieceKind::Bishop),
            Promotion::Knight => Some(PieceKind::Knight),
        }
    }

    pub const fn from_kind(kind: PieceKind) -> Option<Promotion> {
        match kind {
            PieceKind::Queen => Some(Promotion::Queen),
            PieceKind::Rook => Some(Promotion::Rook),
            PieceKind::Bishop => Some(Promotion::Bishop),
            PieceKind::Knight => Some(Promotion::Knight),
            _ => None,
        }
    }
}

/// A move as source square, target square and promotion selector.
///
/// Castling is the king's two-square move (`e1g1`), as in UCI.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    src: Square,
    tgt: Square,
    promo: Promotion,
}

impl Move {
    /// Fails when `src == tgt`.
    pub fn new(src: Square, tgt: Square, promo: Promotion) -> Result<Move, RulesError> {
        if src == tgt {
            return Err(RulesError::NullMove(src));
        }
        Ok(Move { src, tgt, promo })
    }

    #[inline]
    pub(crate) const fn new_unchecked(src: Square, tgt: Square, promo: Promotion) -> Move {
        Move { src, tgt, promo }
    }

    #[inline]
    pub const fn src(self) -> Square {
        self.src
    }

    #[inline]
    pub const fn tgt(self) -> Square {
        self.tgt
    }

    #[inline]
    pub const fn promo(self) -> Promotion {
        self.promo
    }

    /// Packed vocabulary id: `src * 320 + tgt * 5 + promo`.
    #[inline]
    pub const fn packed_id(self) -> u16 {
        self.src.index() as u16 * 320 + self.tgt.index() as u16 * 5 + self.promo as u16
    }

    pub fn uci(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.src, self.tgt)?;
        if let Some(kind) = self.promo.kind() {
            write!(f, "{}", kind.letter().to_ascii_lowercase())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Move {
    type Err = RulesError;

    /// Parses UCI notation (`e2e4`, `e7e8q`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RulesError::BadUci(s.to_string());
        if !(4..=5).contains(&s.len()) || !s.is_ascii() {
            return Err(bad());
        }
        let src: Square = s[0..2].parse().map_err(|_| bad())?;
        let tgt: Square = s[2..4].parse().map_err(|_| bad())?;
        let promo = match s[4..].chars().next() {
            None => Promotion::None,
            Some(c) => PieceKind::from_letter(c)
                .filter(|_| c.is_ascii_lowercase())
                .and_then(Promotion::from_kind)
                .ok_or_else(bad)?,
        };
        Move::new(src, tgt, promo).map_err(|_| bad())
    }
}
