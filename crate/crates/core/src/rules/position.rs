use std::collections::HashMap;
use std::fmt;

use super::board::{Board, CastlingRights, MoveList};
use super::movegen;
use super::{Color, Move, Piece, PieceKind, RulesError, Square};

/// Repetition identity of a position: placement, side to move, castling
/// rights and the en passant file only when a capture there is legal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PositionKey {
    placement: [u8; 32],
    side_and_castling: u8,
    legal_ep_file: u8,
}

impl PositionKey {
    fn of(b: &Board) -> PositionKey {
        let mut placement = [0u8; 32];
        for (i, pair) in placement.iter_mut().enumerate() {
            let lo = b.code_at(Square::new_unchecked(2 * i as u8));
            let hi = b.code_at(Square::new_unchecked(2 * i as u8 + 1));
            *pair = lo | hi << 4;
        }
        PositionKey {
            placement,
            side_and_castling: b.side_to_move() as u8 | b.castling().bits() << 1,
            legal_ep_file: b.legal_ep_square().map_or(0, |sq| sq.file() + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    Ongoing,
    Checkmate,
    Stalemate,
    InsufficientMaterial,
    SeventyFiveMove,
    FivefoldRepetition,
    ClaimableFiftyMove,
    ClaimableThreefold,
}

impl Termination {
    pub const ALL: [Termination; 8] = [
        Termination::Ongoing,
        Termination::Checkmate,
        Termination::Stalemate,
        Termination::InsufficientMaterial,
        Termination::SeventyFiveMove,
        Termination::FivefoldRepetition,
        Termination::ClaimableFiftyMove,
        Termination::ClaimableThreefold,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Ongoing => "ongoing",
            Termination::Checkmate => "checkmate",
            Termination::Stalemate => "stalemate",
            Termination::InsufficientMaterial => "insufficient_material",
            Termination::SeventyFiveMove => "seventyfive_move",
            Termination::FivefoldRepetition => "fivefold_repetition",
            Termination::ClaimableFiftyMove => "claimable_fifty_move",
            Termination::ClaimableThreefold => "claimable_threefold",
        }
    }

    pub fn is_over(self) -> bool {
        self != Termination::Ongoing
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Termination {
    type Err = RulesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Termination::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| RulesError::BadTermination(s.to_string()))
    }
}

/// A complete chess position, including the repetition history since the
/// last irreversible move.
#[derive(Clone, PartialEq, Eq)]
pub struct Position {
    board: Board,
    history: Vec<PositionKey>,
}

impl Default for Position {
    fn default() -> Self {
        Position::initial()
    }
}

impl Position {
    pub fn initial() -> Position {
        Position::with_board(Board::initial())
    }

    /// Wraps a board, seeding the repetition history with its own key.
    pub(crate) fn with_board(board: Board) -> Position {
        let key = PositionKey::of(&board);
        Position {
            board,
            history: vec![key],
        }
    }

    /// Builds a position from raw parts with an empty repetition history.
    ///
    /// Requires one king per side, no pawns on the back ranks, and castling
    /// flags backed by king and rook on their home squares. A raw en passant
    /// square must sit on rank 3 (black to move) or rank 6 (white to move).
    pub fn from_parts(
        placement: &[Option<Piece>; 64],
        side: Color,
        castling: [bool; 4],
        ep_square: Option<Square>,
        halfmove_clock: u32,
        fullmove_number: u32,
    ) -> Result<Position, RulesError> {
        let mut board = Board::empty();
        for (i, p) in placement.iter().enumerate() {
            if let Some(p) = *p {
                board.put(Square::new_unchecked(i as u8), p);
            }
        }
        let castling = CastlingRights::from_flags(castling);
        board.set_aux(side, castling, ep_square, halfmove_clock, fullmove_number);
        validate(&board)?;
        Ok(Position {
            board,
            history: Vec::new(),
        })
    }

    pub(crate) fn from_validated_board(board: Board) -> Result<Position, RulesError> {
        validate(&board)?;
        Ok(Position::with_board(board))
    }

    #[inline]
    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.board.piece_at(sq)
    }

    pub fn side_to_move(&self) -> Color {
        self.board.side_to_move()
    }

    /// K, Q, k, q.
    pub fn castling(&self) -> [bool; 4] {
        self.board.castling().flags()
    }

    pub fn castling_rights(&self) -> CastlingRights {
        self.board.castling()
    }

    /// Raw en passant square (set after every double push).
    pub fn ep_square(&self) -> Option<Square> {
        self.board.ep_square()
    }

    /// En passant square only when a capture onto it is legal.
    pub fn legal_ep_square(&self) -> Option<Square> {
        self.board.legal_ep_square()
    }

    pub fn halfmove_clock(&self) -> u32 {
        self.board.halfmove_clock()
    }

    pub fn fullmove_number(&self) -> u32 {
        self.board.fullmove_number()
    }

    pub fn repetition_history(&self) -> &[PositionKey] {
        &self.history
    }

    pub fn key(&self) -> PositionKey {
        PositionKey::of(&self.board)
    }

    pub fn in_check(&self) -> bool {
        self.board.in_check()
    }

    /// All legal moves, sorted by ascending packed id.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut list = MoveList::new();
        self.board.generate(&mut list);
        let mut moves = list.to_vec();
        moves.sort_unstable_by_key(|m| m.packed_id());
        moves
    }

    pub fn legal_move_count(&self) -> usize {
        let mut list = MoveList::new();
        self.board.generate(&mut list);
        list.len()
    }

    pub fn is_legal(&self, m: Move) -> bool {
        let mut list = MoveList::new();
        self.board.generate(&mut list);
        list.contains(&m)
    }

    /// Returns the position after `m`, or `IllegalMove`.
    pub fn apply_move(&self, m: Move) -> Result<Position, RulesError> {
        let mut next = self.clone();
        next.play(m)?;
        Ok(next)
    }

    /// In-place form of [`Position::apply_move`].
    pub fn play(&mut self, m: Move) -> Result<(), RulesError> {
        if !self.is_legal(m) {
            return Err(RulesError::IllegalMove(m.uci()));
        }
        self.play_unchecked(m);
        Ok(())
    }

    /// Applies a move the caller took from [`Position::legal_moves`].
    pub(crate) fn play_unchecked(&mut self, m: Move) {
        let played = self.board.play(m);
        if played.irreversible {
            self.history.clear();
        }
        self.history.push(PositionKey::of(&self.board));
    }

    pub fn is_insufficient_material(&self) -> bool {
        let b = &self.board;
        let kings = b.kind_bb(PieceKind::King);
        let others = b.occupied() & !kings;
        match others.count_ones() {
            0 => true,
            1 => others & (b.kind_bb(PieceKind::Bishop) | b.kind_bb(PieceKind::Knight)) != 0,
            2 => {
                let wb = b.pieces(Color::White, PieceKind::Bishop);
                let bb = b.pieces(Color::Black, PieceKind::Bishop);
                if wb.count_ones() != 1 || bb.count_ones() != 1 {
                    return false;
                }
                let dark = |bb: u64| Square::new_unchecked(bb.trailing_zeros() as u8).is_dark();
                dark(wb) == dark(bb)
            }
            _ => false,
        }
    }

    fn max_repetitions(&self) -> usize {
        let mut counts: HashMap<&PositionKey, usize> = HashMap::with_capacity(self.history.len());
        let mut best = 0;
        for k in &self.history {
            let c = counts.entry(k).or_insert(0);
            *c += 1;
            best = best.max(*c);
        }
        best
    }

    /// Game-over status; claimable draws count as terminal.
    ///
    /// Order: checkmate and stalemate, then forced draws (dead material,
    /// 75-move, fivefold), then claimable draws (50-move, threefold).
    pub fn termination_status(&self) -> Termination {
        if self.legal_move_count() == 0 {
            return if self.in_check() {
                Termination::Checkmate
            } else {
                Termination::Stalemate
            };
        }
        if self.is_insufficient_material() {
            return Termination::InsufficientMaterial;
        }
        let halfmove = self.halfmove_clock();
        if halfmove >= 150 {
            return Termination::SeventyFiveMove;
        }
        let reps = self.max_repetitions();
        if reps >= 5 {
            return Termination::FivefoldRepetition;
        }
        if halfmove >= 100 {
            return Termination::ClaimableFiftyMove;
        }
        if reps >= 3 {
            return Termination::ClaimableThreefold;
        }
        Termination::Ongoing
    }

    pub fn perft(&self, depth: u32) -> u64 {
        movegen::perft(&self.board, depth)
    }

    /// Eight text rows, rank 8 first, `.` for empty squares.
    pub fn render(&self) -> String {
        render_board(&self.board)
    }
}

pub(crate) fn render_board(b: &Board) -> String {
    let mut s = String::with_capacity(72);
    for row in 0..8u8 {
        for col in 0..8u8 {
            let sq = Square::new_unchecked(row * 8 + col);
            s.push(b.piece_at(sq).map_or('.', Piece::fen_char));
        }
        s.push('\n');
    }
    s
}

fn validate(b: &Board) -> Result<(), RulesError> {
    for c in [Color::White, Color::Black] {
        let n = b.pieces(c, PieceKind::King).count_ones();
        if n != 1 {
            return Err(RulesError::InvalidPosition(format!("{n} {c:?} kings")));
        }
    }
    if b.kind_bb(PieceKind::Pawn) & (0xff | 0xff << 56) != 0 {
        return Err(RulesError::InvalidPosition("pawn on a back rank".into()));
    }
    let rights = b.castling();
    let home = [
        (CastlingRights::WHITE_KING, Color::White, 60, 63),
        (CastlingRights::WHITE_QUEEN, Color::White, 60, 56),
        (CastlingRights::BLACK_KING, Color::Black, 4, 7),
        (CastlingRights::BLACK_QUEEN, Color::Black, 4, 0),
    ];
    for (flag, c, king, rook) in home {
        if rights.has(flag)
            && (b.piece_at(Square::new_unchecked(king)) != Some(Piece::new(c, PieceKind::King))
                || b.piece_at(Square::new_unchecked(rook)) != Some(Piece::new(c, PieceKind::Rook)))
        {
            return Err(RulesError::InvalidPosition(format!(
                "castling right {} without king and rook",
                rights.to_fen()
            )));
        }
    }
    if let Some(ep) = b.ep_square() {
        let expected_rank = match b.side_to_move() {
            Color::White => 5,
            Color::Black => 2,
        };
        if ep.rank() != expected_rank {
            return Err(RulesError::InvalidPosition(format!(
                "en passant square {ep} on the wrong rank"
            )));
        }
    }
    if b.fullmove_number() == 0 {
        return Err(RulesError::InvalidPosition("fullmove number 0".into()));
    }
    if b.is_attacked(b.king_square(!b.side_to_move()), b.side_to_move()) {
        return Err(RulesError::InvalidPosition("side not to move is in check".into()));
    }
    Ok(())
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Position({})", super::fen::to_fen(self))
    }
}
