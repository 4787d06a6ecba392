//! Packed move tokens and the 75-label state vector.
//!
//! Move ids: `src * 320 + tgt * 5 + promo` for the 20,480 geometries, then
//! START = 20480 and PAD = 20481.
//!
//! State labels, one byte each:
//!
//! | index  | meaning                                   | classes |
//! |--------|-------------------------------------------|---------|
//! | 0..64  | square a8..h1 piece code                  | 13      |
//! | 64     | side to move (0 white, 1 black)           | 2       |
//! | 65..69 | castling K, Q, k, q (1 = available)       | 2 each  |
//! | 69     | en passant file (0 none, 1..=8 = a..h)    | 9       |
//! | 70     | en passant rank (0 none, 1 rank 3, 2 rank 6) | 3    |
//! | 71..73 | halfmove clock, big-endian u16            | 256 each|
//! | 73..75 | fullmove number, big-endian u16           | 256 each|

use std::collections::BTreeSet;
use std::fmt;

use crate::rules::{attacks, Color, Move, Piece, Position, Promotion, RulesError, Square};

pub const MOVE_GEOMETRIES: u16 = 64 * 64 * 5;
pub const START_TOKEN: u16 = 20480;
pub const PAD_TOKEN: u16 = 20481;
pub const VOCAB_SIZE: usize = 20482;

pub const NUM_LABELS: usize = 75;
pub const NUM_BOARD_LABELS: usize = 64;
pub const SIDE: usize = 64;
pub const CASTLING: usize = 65;
pub const EP_FILE: usize = 69;
pub const EP_RANK: usize = 70;
pub const HALFMOVE: usize = 71;
pub const FULLMOVE: usize = 73;

/// Class count of every label position.
pub const fn cardinality(label: usize) -> usize {
    match label {
        0..=63 => 13,
        64..=68 => 2,
        69 => 9,
        70 => 3,
        _ => 256,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("token {0} is a special symbol, not a move")]
    SpecialToken(u16),
    #[error("token {0} is outside the vocabulary")]
    TokenOutOfRange(u16),
    #[error("{field} = {value} does not fit in 16 bits")]
    CounterOverflow { field: &'static str, value: u32 },
    #[error("en passant file {file} and rank {rank} disagree on none-ness")]
    InconsistentLabels { file: u8, rank: u8 },
    #[error("label {index} = {value} exceeds its {classes} classes")]
    LabelOutOfRange { index: usize, value: u8, classes: usize },
    #[error(transparent)]
    Position(#[from] RulesError),
}

/// A packed move token: a move geometry, START or PAD.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MoveToken(u16);

impl MoveToken {
    pub const START: MoveToken = MoveToken(START_TOKEN);
    pub const PAD: MoveToken = MoveToken(PAD_TOKEN);

    pub fn new(id: u16) -> Result<MoveToken, CodecError> {
        if (id as usize) < VOCAB_SIZE {
            Ok(MoveToken(id))
        } else {
            Err(CodecError::TokenOutOfRange(id))
        }
    }

    #[inline]
    pub fn id(self) -> u16 {
        self.0
    }

    pub fn is_special(self) -> bool {
        self.0 >= MOVE_GEOMETRIES
    }
}

impl fmt::Display for MoveToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            START_TOKEN => f.write_str("<START>"),
            PAD_TOKEN => f.write_str("<PAD>"),
            _ => write!(f, "{}", decode_move(*self).unwrap()),
        }
    }
}

/// An unvalidated (source, target, promotion) triple, as decoded from a token.
///
/// Id 0 decodes to `a8a8`, which is a geometry but not a move.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct RawMove {
    pub src: Square,
    pub tgt: Square,
    pub promo: Promotion,
}

impl RawMove {
    pub fn to_move(self) -> Result<Move, RulesError> {
        Move::new(self.src, self.tgt, self.promo)
    }
}

impl fmt::Display for RawMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.src, self.tgt)?;
        if let Some(k) = self.promo.kind() {
            write!(f, "{}", k.letter().to_ascii_lowercase())?;
        }
        Ok(())
    }
}

#[inline]
pub fn encode_move(m: Move) -> MoveToken {
    MoveToken(m.packed_id())
}

pub fn decode_move(t: MoveToken) -> Result<RawMove, CodecError> {
    let id = t.id();
    if id >= MOVE_GEOMETRIES {
        return Err(CodecError::SpecialToken(id));
    }
    Ok(RawMove {
        src: Square::new((id / 320) as u8).unwrap(),
        tgt: Square::new((id % 320 / 5) as u8).unwrap(),
        promo: Promotion::from_code((id % 5) as u8).unwrap(),
    })
}

/// How the two en passant labels are derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Hash)]
pub enum EpEncoding {
    /// Set only when an en passant capture is legal.
    #[default]
    LegalityGated,
    /// Set after every double pawn push.
    Raw,
}

/// The 75 categorical targets for one timestep.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateLabels(pub [u8; NUM_LABELS]);

impl StateLabels {
    pub fn as_bytes(&self) -> &[u8; NUM_LABELS] {
        &self.0
    }

    /// Validates cardinalities and en passant consistency.
    pub fn from_bytes(bytes: [u8; NUM_LABELS]) -> Result<StateLabels, CodecError> {
        let s = StateLabels(bytes);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        for (index, &value) in self.0.iter().enumerate() {
            let classes = cardinality(index);
            if value as usize >= classes {
                return Err(CodecError::LabelOutOfRange { index, value, classes });
            }
        }
        let (file, rank) = (self.0[EP_FILE], self.0[EP_RANK]);
        if (file == 0) != (rank == 0) {
            return Err(CodecError::InconsistentLabels { file, rank });
        }
        Ok(())
    }

    pub fn halfmove_clock(&self) -> u16 {
        u16::from_be_bytes([self.0[HALFMOVE], self.0[HALFMOVE + 1]])
    }

    pub fn fullmove_number(&self) -> u16 {
        u16::from_be_bytes([self.0[FULLMOVE], self.0[FULLMOVE + 1]])
    }
}

impl fmt::Debug for StateLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateLabels(board={:?}, aux={:?})", &self.0[..64], &self.0[64..])
    }
}

/// Piece-to-label table. Only the standard table is used outside self-checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PieceCodes(pub [u8; 13]);

impl PieceCodes {
    /// 0 empty, 1..=6 white PNBRQK, 7..=12 black PNBRQK.
    pub const STANDARD: PieceCodes = PieceCodes([0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]);

    fn inverse(&self) -> [u8; 13] {
        let mut inv = [0u8; 13];
        for (code, &label) in self.0.iter().enumerate() {
            if let Some(slot) = inv.get_mut(label as usize) {
                *slot = code as u8;
            }
        }
        inv
    }
}

pub fn encode_state(p: &Position, ep: EpEncoding) -> Result<StateLabels, CodecError> {
    encode_state_with(p, ep, &PieceCodes::STANDARD)
}

pub fn encode_state_with(p: &Position, ep: EpEncoding, codes: &PieceCodes) -> Result<StateLabels, CodecError> {
    let b = p.board();
    let mut s = [0u8; NUM_LABELS];
    for sq in Square::all() {
        s[sq.index()] = codes.0[b.code_at(sq) as usize];
    }
    s[SIDE] = (b.side_to_move() == Color::Black) as u8;
    for (i, flag) in b.castling().flags().into_iter().enumerate() {
        s[CASTLING + i] = flag as u8;
    }
    let ep_sq = match ep {
        EpEncoding::LegalityGated => b.legal_ep_square(),
        EpEncoding::Raw => b.ep_square(),
    };
    if let Some(sq) = ep_sq {
        s[EP_FILE] = sq.file() + 1;
        s[EP_RANK] = if sq.rank() == 2 { 1 } else { 2 };
    }
    let counter = |field: &'static str, value: u32| {
        u16::try_from(value).map_err(|_| CodecError::CounterOverflow { field, value })
    };
    let half = counter("halfmove_clock", b.halfmove_clock())?.to_be_bytes();
    let full = counter("fullmove_number", b.fullmove_number())?.to_be_bytes();
    s[HALFMOVE..HALFMOVE + 2].copy_from_slice(&half);
    s[FULLMOVE..FULLMOVE + 2].copy_from_slice(&full);
    Ok(StateLabels(s))
}

/// Rebuilds the position a label vector describes. The repetition history
/// is not representable in 75 labels and comes back empty.
pub fn decode_state(s: &StateLabels) -> Result<Position, CodecError> {
    decode_state_with(s, &PieceCodes::STANDARD)
}

pub fn decode_state_with(s: &StateLabels, codes: &PieceCodes) -> Result<Position, CodecError> {
    s.validate()?;
    let inv = codes.inverse();
    let mut placement = [None; 64];
    for (i, slot) in placement.iter_mut().enumerate() {
        *slot = Piece::from_code(inv[s.0[i] as usize]);
    }
    let side = if s.0[SIDE] == 1 { Color::Black } else { Color::White };
    let castling = [0, 1, 2, 3].map(|i| s.0[CASTLING + i] == 1);
    let ep = match (s.0[EP_FILE], s.0[EP_RANK]) {
        (0, 0) => None,
        (file, rank) => Square::from_file_rank(file - 1, if rank == 1 { 2 } else { 5 }),
    };
    Ok(Position::from_parts(
        &placement,
        side,
        castling,
        ep,
        s.halfmove_clock() as u32,
        s.fullmove_number() as u32,
    )?)
}

/// Every packed id some legal chess move can produce: queen-line and knight
/// geometries without promotion, plus the four promotions on every pawn
/// push or capture onto the last rank.
pub fn enumerate_possible_moves() -> BTreeSet<MoveToken> {
    let mut ids = BTreeSet::new();
    for src in Square::all() {
        let targets = attacks::queen(src, 0) | attacks::knight(src);
        for tgt in crate::rules::BitIter(targets) {
            ids.insert(encode_move(Move::new_unchecked(src, tgt, Promotion::None)));
        }
    }
    for color in [Color::White, Color::Black] {
        let (from_rank, step): (u8, i8) = match color {
            Color::White => (6, 1),
            Color::Black => (1, -1),
        };
        for file in 0..8u8 {
            let src = Square::from_file_rank(file, from_rank).unwrap();
            let to_rank = (from_rank as i8 + step) as u8;
            let push = Square::from_file_rank(file, to_rank).unwrap().bb();
            let targets = push | attacks::pawn(color, src);
            for tgt in crate::rules::BitIter(targets) {
                for promo in Promotion::PIECES {
                    ids.insert(encode_move(Move::new_unchecked(src, tgt, promo)));
                }
            }
        }
    }
    ids
}

/// Short description of a board label code.
pub fn piece_code_name(code: u8) -> &'static str {
    const NAMES: [&str; 13] = ["empty", "P", "N", "B", "R", "Q", "K", "p", "n", "b", "r", "q", "k"];
    NAMES.get(code as usize).copied().unwrap_or("?")
}
