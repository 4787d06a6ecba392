use super::attacks;
use super::square::BitIter;
use super::{Color, Move, Piece, PieceKind, Square};

/// Castling availability as four flags (K, Q, k, q).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CastlingRights(u8);

impl CastlingRights {
    pub const WHITE_KING: u8 = 1;
    pub const WHITE_QUEEN: u8 = 2;
    pub const BLACK_KING: u8 = 4;
    pub const BLACK_QUEEN: u8 = 8;
    pub const ALL: CastlingRights = CastlingRights(15);
    pub const NONE: CastlingRights = CastlingRights(0);

    /// Flags in label order K, Q, k, q.
    pub fn from_flags(flags: [bool; 4]) -> CastlingRights {
        CastlingRights(flags.iter().enumerate().fold(0, |acc, (i, &f)| acc | (f as u8) << i))
    }

    pub fn flags(self) -> [bool; 4] {
        [0, 1, 2, 3].map(|i| self.0 & (1 << i) != 0)
    }

    #[inline]
    pub fn has(self, flag: u8) -> bool {
        self.0 & flag != 0
    }

    #[inline]
    pub fn bits(self) -> u8 {
        self.0
    }

    /// Rights that survive a move touching `sq` (as source or target).
    #[inline]
    fn keep_mask(sq: Square) -> u8 {
        match sq.index() {
            0 => !Self::BLACK_QUEEN,
            4 => !(Self::BLACK_KING | Self::BLACK_QUEEN),
            7 => !Self::BLACK_KING,
            56 => !Self::WHITE_QUEEN,
            60 => !(Self::WHITE_KING | Self::WHITE_QUEEN),
            63 => !Self::WHITE_KING,
            _ => 0xff,
        }
    }

    pub fn to_fen(self) -> String {
        if self.0 == 0 {
            return "-".to_string();
        }
        "KQkq"
            .chars()
            .enumerate()
            .filter(|&(i, _)| self.0 & (1 << i) != 0)
            .map(|(_, c)| c)
            .collect()
    }
}

impl std::fmt::Debug for CastlingRights {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_fen())
    }
}

/// Placement plus the FEN auxiliary fields, without repetition history.
///
/// Cheap to copy; move generation and perft work on this type directly.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Board {
    mailbox: [u8; 64],
    colors: [u64; 2],
    kinds: [u64; 6],
    side: Color,
    castling: CastlingRights,
    ep_square: Option<Square>,
    halfmove_clock: u32,
    fullmove_number: u32,
}

pub(crate) struct Played {
    pub irreversible: bool,
}

impl Board {
    pub(crate) fn empty() -> Board {
        Board {
            mailbox: [0; 64],
            colors: [0; 2],
            kinds: [0; 6],
            side: Color::White,
            castling: CastlingRights::NONE,
            ep_square: None,
            halfmove_clock: 0,
            fullmove_number: 1,
        }
    }

    pub fn initial() -> Board {
        let mut b = Board::empty();
        let back = [
            PieceKind::Rook,
            PieceKind::Knight,
            PieceKind::Bishop,
            PieceKind::Queen,
            PieceKind::King,
            PieceKind::Bishop,
            PieceKind::Knight,
            PieceKind::Rook,
        ];
        for (file, &kind) in back.iter().enumerate() {
            b.put(Square::new_unchecked(file as u8), Piece::new(Color::Black, kind));
            b.put(
                Square::new_unchecked(8 + file as u8),
                Piece::new(Color::Black, PieceKind::Pawn),
            );
            b.put(
                Square::new_unchecked(48 + file as u8),
                Piece::new(Color::White, PieceKind::Pawn),
            );
            b.put(Square::new_unchecked(56 + file as u8), Piece::new(Color::White, kind));
        }
        b.castling = CastlingRights::ALL;
        b
    }

    #[inline]
    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        Piece::from_code(self.mailbox[sq.index()])
    }

    /// Board-label code of the square (0 empty, 1..=12 pieces).
    #[inline]
    pub fn code_at(&self, sq: Square) -> u8 {
        self.mailbox[sq.index()]
    }

    #[inline]
    pub fn side_to_move(&self) -> Color {
        self.side
    }

    #[inline]
    pub fn castling(&self) -> CastlingRights {
        self.castling
    }

    /// The square skipped by the last double pawn push, whether or not an
    /// en passant capture onto it is legal.
    #[inline]
    pub fn ep_square(&self) -> Option<Square> {
        self.ep_square
    }

    #[inline]
    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    #[inline]
    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    #[inline]
    pub(crate) fn occupied(&self) -> u64 {
        self.colors[0] | self.colors[1]
    }

    #[inline]
    pub(crate) fn color_bb(&self, c: Color) -> u64 {
        self.colors[c.index()]
    }

    #[inline]
    pub(crate) fn kind_bb(&self, k: PieceKind) -> u64 {
        self.kinds[k.index()]
    }

    #[inline]
    pub(crate) fn pieces(&self, c: Color, k: PieceKind) -> u64 {
        self.colors[c.index()] & self.kinds[k.index()]
    }

    pub(crate) fn king_square(&self, c: Color) -> Square {
        let bb = self.pieces(c, PieceKind::King);
        debug_assert!(bb != 0, "no {c:?} king");
        Square::new_unchecked(bb.trailing_zeros() as u8)
    }

    #[inline]
    pub(crate) fn put(&mut self, sq: Square, p: Piece) {
        let bb = sq.bb();
        self.mailbox[sq.index()] = p.code();
        self.colors[p.color.index()] |= bb;
        self.kinds[p.kind.index()] |= bb;
    }

    #[inline]
    pub(crate) fn remove(&mut self, sq: Square) -> Option<Piece> {
        let p = Piece::from_code(self.mailbox[sq.index()])?;
        let bb = sq.bb();
        self.mailbox[sq.index()] = 0;
        self.colors[p.color.index()] &= !bb;
        self.kinds[p.kind.index()] &= !bb;
        Some(p)
    }

    pub(crate) fn set_aux(
        &mut self,
        side: Color,
        castling: CastlingRights,
        ep_square: Option<Square>,
        halfmove_clock: u32,
        fullmove_number: u32,
    ) {
        self.side = side;
        self.castling = castling;
        self.ep_square = ep_square;
        self.halfmove_clock = halfmove_clock;
        self.fullmove_number = fullmove_number;
    }

    /// Pieces of `by` attacking `sq` under occupancy `occ`, restricted to `mask`.
    #[inline]
    pub(crate) fn attackers(&self, sq: Square, by: Color, occ: u64, mask: u64) -> u64 {
        let them = self.colors[by.index()] & mask;
        let diag = self.kinds[PieceKind::Bishop.index()] | self.kinds[PieceKind::Queen.index()];
        let orth = self.kinds[PieceKind::Rook.index()] | self.kinds[PieceKind::Queen.index()];
        them & ((attacks::pawn(!by, sq) & self.kinds[PieceKind::Pawn.index()])
            | (attacks::knight(sq) & self.kinds[PieceKind::Knight.index()])
            | (attacks::king(sq) & self.kinds[PieceKind::King.index()])
            | (attacks::bishop(sq, occ) & diag)
            | (attacks::rook(sq, occ) & orth))
    }

    #[inline]
    pub(crate) fn is_attacked(&self, sq: Square, by: Color) -> bool {
        self.attackers(sq, by, self.occupied(), !0) != 0
    }

    pub fn in_check(&self) -> bool {
        self.is_attacked(self.king_square(self.side), !self.side)
    }

    /// Whether the side to move has a legal en passant capture right now.
    pub fn has_legal_ep(&self) -> bool {
        self.legal_ep_square().is_some()
    }

    /// The raw ep square if an en passant capture onto it is legal.
    pub fn legal_ep_square(&self) -> Option<Square> {
        let ep = self.ep_square?;
        let us = self.side;
        let capturers = attacks::pawn(!us, ep) & self.pieces(us, PieceKind::Pawn);
        BitIter(capturers)
            .any(|from| self.ep_capture_is_safe(from, ep))
            .then_some(ep)
    }

    /// Square of the pawn removed by an en passant capture onto `ep`.
    #[inline]
    pub(crate) fn ep_victim(&self, ep: Square) -> Square {
        match self.side {
            Color::White => Square::new_unchecked(ep.index() as u8 + 8),
            Color::Black => Square::new_unchecked(ep.index() as u8 - 8),
        }
    }

    pub(crate) fn ep_capture_is_safe(&self, from: Square, ep: Square) -> bool {
        let us = self.side;
        let victim = self.ep_victim(ep);
        if self.pieces(!us, PieceKind::Pawn) & victim.bb() == 0 || self.occupied() & ep.bb() != 0 {
            return false;
        }
        let occ = (self.occupied() ^ from.bb() ^ victim.bb()) | ep.bb();
        let king = self.king_square(us);
        self.attackers(king, !us, occ, !victim.bb()) == 0
    }

    /// Applies a move known to be legal.
    pub(crate) fn play(&mut self, m: Move) -> Played {
        let (src, tgt) = (m.src(), m.tgt());
        let us = self.side;
        let piece = self.remove(src).expect("move from an empty square");
        let captured = self.remove(tgt);
        let mut reset = captured.is_some();
        let old_castling = self.castling;
        let old_ep = self.ep_square.take();

        match piece.kind {
            PieceKind::Pawn => {
                reset = true;
                if Some(tgt) == old_ep && captured.is_none() {
                    let victim = self.ep_victim(tgt);
                    self.remove(victim);
                }
                let placed = match m.promo().kind() {
                    Some(kind) => Piece::new(us, kind),
                    None => piece,
                };
                self.put(tgt, placed);
                if src.index().abs_diff(tgt.index()) == 16 {
                    self.ep_square = Some(Square::new_unchecked(((src.index() + tgt.index()) / 2) as u8));
                }
            }
            PieceKind::King if src.file().abs_diff(tgt.file()) == 2 => {
                self.put(tgt, piece);
                let base = src.index() as u8 - src.file();
                let (rook_from, rook_to) = if tgt.file() > src.file() {
                    (base + 7, base + 5)
                } else {
                    (base, base + 3)
                };
                let rook = self
                    .remove(Square::new_unchecked(rook_from))
                    .expect("castling without rook");
                self.put(Square::new_unchecked(rook_to), rook);
            }
            _ => self.put(tgt, piece),
        }

        self.castling =
            CastlingRights(self.castling.0 & CastlingRights::keep_mask(src) & CastlingRights::keep_mask(tgt));
        self.halfmove_clock = if reset { 0 } else { self.halfmove_clock + 1 };
        if us == Color::Black {
            self.fullmove_number += 1;
        }
        self.side = !us;
        Played {
            irreversible: reset || self.castling != old_castling,
        }
    }

    /// Generates the legal moves (unordered) into `out`.
    #[inline]
    pub(crate) fn generate(&self, out: &mut MoveList) {
        super::movegen::generate(self, out)
    }
}

pub(crate) type MoveList = arrayvec::ArrayVec<Move, 256>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_layout() {
        let b = Board::initial();
        let rank8: Vec<u8> = (0..8).map(|i| b.code_at(Square::new(i).unwrap())).collect();
        assert_eq!(rank8, vec![10, 8, 9, 11, 12, 9, 8, 10]);
        let rank1: Vec<u8> = (56..64).map(|i| b.code_at(Square::new(i).unwrap())).collect();
        assert_eq!(rank1, vec![4, 2, 3, 5, 6, 3, 2, 4]);
        assert_eq!(b.occupied().count_ones(), 32);
        assert!(!b.in_check());
    }

    #[test]
    fn castling_flags_round_trip() {
        for bits in 0..16u8 {
            let c = CastlingRights(bits);
            assert_eq!(CastlingRights::from_flags(c.flags()), c);
        }
        assert_eq!(CastlingRights::ALL.to_fen(), "KQkq");
        assert_eq!(CastlingRights::NONE.to_fen(), "-");
        assert_eq!(
            CastlingRights(CastlingRights::WHITE_QUEEN | CastlingRights::BLACK_KING).to_fen(),
            "Qk"
        );
    }
}
