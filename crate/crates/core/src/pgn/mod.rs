//! PGN ingestion: streaming parse, SAN resolution, trajectory building and
//! the hash-based train/validation split.

mod parser;
mod san;
mod split;
mod trajectory;

pub use parser::{game_id_from_site, parse_pgn_stream, GameIdMode, GameResult, PgnReader, RawGame};
pub use san::{move_to_san, san_to_move};
pub use split::{split_of, split_residue, Split, SPLIT_MODULUS, VALIDATION_THRESHOLD};
pub use trajectory::{
    build_trajectory, passes_length_filter, passes_length_filter_with, Trajectory, DEFAULT_MIN_FULL_MOVES,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SanError {
    #[error("unparseable SAN {0:?}")]
    Syntax(String),
    #[error("no legal move matches {0:?}")]
    NoMatch(String),
    #[error("{0:?} matches more than one legal move")]
    Ambiguous(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PgnError {
    /// One game could not be parsed; the stream continues.
    #[error("game {index}: {reason}")]
    Malformed { index: u64, reason: String },
    /// A move could not be resolved while replaying.
    #[error("game {index}, ply {ply} ({san}): {reason}")]
    IllegalGame {
        index: u64,
        ply: usize,
        san: String,
        reason: String,
    },
    /// Framing is broken beyond recovery; no further games are read.
    #[error("corrupt stream: {0}")]
    StreamCorrupt(String),
    #[error("read error: {0}")]
    Io(String),
}

impl PgnError {
    /// Whether the stream can continue past this error.
    pub fn is_per_game(&self) -> bool {
        matches!(self, PgnError::Malformed { .. } | PgnError::IllegalGame { .. })
    }
}
