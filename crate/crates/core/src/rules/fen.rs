//! Six-field FEN import and export.
//!
//! Export writes the en passant field only when a capture is legal, which
//! is also what the repetition key and the default state encoding use.

use super::board::{Board, CastlingRights};
use super::position::render_board;
use super::{Color, Piece, Position, RulesError, Square};

pub const STARTING_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

pub fn to_fen(p: &Position) -> String {
    let b = p.board();
    format!(
        "{} {} {} {} {} {}",
        placement_fen(b),
        match b.side_to_move() {
            Color::White => 'w',
            Color::Black => 'b',
        },
        b.castling().to_fen(),
        b.legal_ep_square().map_or_else(|| "-".to_string(), |sq| sq.to_string()),
        b.halfmove_clock(),
        b.fullmove_number()
    )
}

pub(crate) fn placement_fen(b: &Board) -> String {
    let rows = render_board(b);
    let mut out = String::with_capacity(72);
    for (i, row) in rows.lines().enumerate() {
        if i > 0 {
            out.push('/');
        }
        let mut gap = 0;
        for c in row.chars() {
            if c == '.' {
                gap += 1;
                continue;
            }
            if gap > 0 {
                out.push(char::from_digit(gap, 10).unwrap());
                gap = 0;
            }
            out.push(c);
        }
        if gap > 0 {
            out.push(char::from_digit(gap, 10).unwrap());
        }
    }
    out
}

pub fn from_fen(fen: &str) -> Result<Position, RulesError> {
    let bad = |why: &str| RulesError::BadFen(format!("{why}: {fen:?}"));
    let fields: Vec<&str> = fen.split_whitespace().collect();
    if fields.len() != 6 && fields.len() != 4 {
        return Err(bad("expected six fields"));
    }

    let mut board = Board::empty();
    let ranks: Vec<&str> = fields[0].split('/').collect();
    if ranks.len() != 8 {
        return Err(bad("expected eight ranks"));
    }
    for (row, rank) in ranks.iter().enumerate() {
        let mut col = 0u8;
        for c in rank.chars() {
            if let Some(d) = c.to_digit(10) {
                if !(1..=8).contains(&d) {
                    return Err(bad("bad empty-run digit"));
                }
                col += d as u8;
            } else {
                let piece = Piece::from_fen_char(c).ok_or_else(|| bad("bad piece letter"))?;
                if col >= 8 {
                    return Err(bad("rank overflow"));
                }
                board.put(Square::new_unchecked(row as u8 * 8 + col), piece);
                col += 1;
            }
        }
        if col != 8 {
            return Err(bad("rank does not span eight files"));
        }
    }

    let side = match fields[1] {
        "w" => Color::White,
        "b" => Color::Black,
        _ => return Err(bad("bad side to move")),
    };

    let mut flags = [false; 4];
    if fields[2] != "-" {
        for c in fields[2].chars() {
            let i = "KQkq".find(c).ok_or_else(|| bad("bad castling field"))?;
            flags[i] = true;
        }
    }

    let ep = match fields[3] {
        "-" => None,
        s => Some(s.parse::<Square>().map_err(|_| bad("bad en passant square"))?),
    };

    let (halfmove, fullmove) = if fields.len() == 6 {
        (
            fields[4].parse::<u32>().map_err(|_| bad("bad halfmove clock"))?,
            fields[5].parse::<u32>().map_err(|_| bad("bad fullmove number"))?,
        )
    } else {
        (0, 1)
    };

    board.set_aux(side, CastlingRights::from_flags(flags), ep, halfmove, fullmove);
    Position::from_validated_board(board)
}

impl Position {
    pub fn from_fen(fen: &str) -> Result<Position, RulesError> {
        from_fen(fen)
    }

    pub fn fen(&self) -> String {
        to_fen(self)
    }
}
