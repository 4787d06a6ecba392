//! Chess rules: positions, legal moves, move application and game
//! termination, including claimable draws.

pub mod attacks;
mod board;
pub mod fen;
mod movegen;
mod moves;
mod piece;
mod position;
mod square;

pub use board::{Board, CastlingRights};
pub use fen::STARTING_FEN;
pub use moves::{Move, Promotion};
pub use piece::{Color, Piece, PieceKind};
pub use position::{Position, PositionKey, Termination};
pub use square::Square;

pub(crate) use square::BitIter;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RulesError {
    #[error("illegal move {0}")]
    IllegalMove(String),
    #[error("source and target are both {0}")]
    NullMove(Square),
    #[error("bad square {0:?}")]
    BadSquare(String),
    #[error("bad UCI move {0:?}")]
    BadUci(String),
    #[error("bad FEN, {0}")]
    BadFen(String),
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("unknown termination kind {0:?}")]
    BadTermination(String),
}

/// Leaf count of the legal-move tree at exactly `depth` plies.
pub fn perft(p: &Position, depth: u32) -> u64 {
    p.perft(depth)
}
