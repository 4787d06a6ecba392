//! Standard Algebraic Notation: resolving SAN text to a legal move, and
//! writing the canonical SAN of a legal move.

use crate::rules::{Move, PieceKind, Position, Promotion, Square};

use super::SanError;

#[derive(Debug, PartialEq, Eq)]
enum Parsed {
    Castle {
        long: bool,
    },
    Normal {
        piece: PieceKind,
        from_file: Option<u8>,
        from_rank: Option<u8>,
        capture: bool,
        to: Square,
        promo: Promotion,
    },
}

fn parse(san: &str) -> Option<Parsed> {
    let s = san.trim_end_matches(['+', '#', '!', '?']);
    let s = s.strip_suffix("e.p.").unwrap_or(s);
    match s {
        "O-O" | "0-0" => return Some(Parsed::Castle { long: false }),
        "O-O-O" | "0-0-0" => return Some(Parsed::Castle { long: true }),
        _ => {}
    }
    let b = s.as_bytes();
    if !b.is_ascii() || b.len() < 2 {
        return None;
    }
    let (piece, mut rest) = match b[0] {
        b'N' | b'B' | b'R' | b'Q' | b'K' => (PieceKind::from_letter(b[0] as char)?, &b[1..]),
        _ => (PieceKind::Pawn, b),
    };

    let mut promo = Promotion::None;
    if let Some(&last) = rest.last() {
        if let Some(kind) = PieceKind::from_letter(last as char).filter(|_| last.is_ascii_uppercase()) {
            promo = Promotion::from_kind(kind)?;
            rest = &rest[..rest.len() - 1];
            if rest.last() == Some(&b'=') {
                rest = &rest[..rest.len() - 1];
            }
        }
    }
    if rest.len() < 2 {
        return None;
    }
    let (head, tail) = rest.split_at(rest.len() - 2);
    let to: Square = std::str::from_utf8(tail).ok()?.parse().ok()?;

    let mut from_file = None;
    let mut from_rank = None;
    let mut capture = false;
    for &c in head {
        match c {
            b'a'..=b'h' if from_file.is_none() && from_rank.is_none() && !capture => from_file = Some(c - b'a'),
            b'1'..=b'8' if from_rank.is_none() && !capture => from_rank = Some(c - b'1'),
            b'x' | b':' if !capture => capture = true,
            b'-' => {}
            _ => return None,
        }
    }
    if piece == PieceKind::Pawn && promo == Promotion::None && (to.rank() == 0 || to.rank() == 7) {
        return None;
    }
    if piece != PieceKind::Pawn && promo != Promotion::None {
        return None;
    }
    Some(Parsed::Normal {
        piece,
        from_file,
        from_rank,
        capture,
        to,
        promo,
    })
}

/// Resolves SAN to the unique matching legal move. Check and mate suffixes
/// are ignored for matching.
pub fn san_to_move(p: &Position, san: &str) -> Result<Move, SanError> {
    let parsed = parse(san).ok_or_else(|| SanError::Syntax(san.to_string()))?;
    let board = p.board();
    let mut found: Option<Move> = None;
    let mut count = 0;
    for m in p.legal_moves() {
        let piece = board.piece_at(m.src()).expect("legal move from empty square");
        let matches = match parsed {
            Parsed::Castle { long } => {
                piece.kind == PieceKind::King
                    && m.src().file().abs_diff(m.tgt().file()) == 2
                    && (m.tgt().file() < m.src().file()) == long
            }
            Parsed::Normal {
                piece: kind,
                from_file,
                from_rank,
                to,
                promo,
                ..
            } => {
                piece.kind == kind
                    && m.tgt() == to
                    && m.promo() == promo
                    && from_file.is_none_or(|f| m.src().file() == f)
                    && from_rank.is_none_or(|r| m.src().rank() == r)
                    // "Kg1" never names castling
                    && !(kind == PieceKind::King && m.src().file().abs_diff(m.tgt().file()) == 2)
            }
        };
        if matches {
            count += 1;
            found = Some(m);
        }
    }
    match (count, found) {
        (1, Some(m)) => Ok(m),
        (0, _) => Err(SanError::NoMatch(san.to_string())),
        _ => Err(SanError::Ambiguous(san.to_string())),
    }
}

/// Canonical SAN with minimal disambiguation and `+`/`#` suffix.
pub fn move_to_san(p: &Position, m: Move) -> Result<String, SanError> {
    let board = p.board();
    let legal = p.legal_moves();
    if !legal.contains(&m) {
        return Err(SanError::NoMatch(m.uci()));
    }
    let piece = board.piece_at(m.src()).unwrap();
    let mut san = String::with_capacity(8);
    let castles = piece.kind == PieceKind::King && m.src().file().abs_diff(m.tgt().file()) == 2;
    if castles {
        san.push_str(if m.tgt().file() > m.src().file() {
            "O-O"
        } else {
            "O-O-O"
        });
    } else {
        let capture =
            board.piece_at(m.tgt()).is_some() || (piece.kind == PieceKind::Pawn && m.src().file() != m.tgt().file());
        if piece.kind == PieceKind::Pawn {
            if capture {
                san.push((b'a' + m.src().file()) as char);
            }
        } else {
            san.push(piece.kind.letter());
            let rivals: Vec<Square> = legal
                .iter()
                .filter(|o| o.tgt() == m.tgt() && o.src() != m.src() && board.piece_at(o.src()) == Some(piece))
                .map(|o| o.src())
                .collect();
            if !rivals.is_empty() {
                let file_unique = rivals.iter().all(|s| s.file() != m.src().file());
                let rank_unique = rivals.iter().all(|s| s.rank() != m.src().rank());
                if file_unique {
                    san.push((b'a' + m.src().file()) as char);
                } else if rank_unique {
                    san.push((b'1' + m.src().rank()) as char);
                } else {
                    san.push_str(&m.src().to_string());
                }
            }
        }
        if capture {
            san.push('x');
        }
        san.push_str(&m.tgt().to_string());
        if let Some(kind) = m.promo().kind() {
            san.push('=');
            san.push(kind.letter());
        }
    }
    let next = p.apply_move(m).expect("legal move");
    if next.in_check() {
        san.push(if next.legal_move_count() == 0 { '#' } else { '+' });
    }
    Ok(san)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(fen: &str) -> Position {
        Position::from_fen(fen).unwrap()
    }

    #[test]
    fn simple_pawn_push() {
        assert_eq!(san_to_move(&Position::initial(), "e4").unwrap().uci(), "e2e4");
        assert_eq!(san_to_move(&Position::initial(), "Nf3").unwrap().uci(), "g1f3");
    }

    #[test]
    fn knight_disambiguation() {
        // knights on b1 and f3 can both reach d2
        let p = pos("4k3/8/8/8/8/5N2/8/1N2K3 w - - 0 1");
        assert_eq!(san_to_move(&p, "Nbd2").unwrap().uci(), "b1d2");
        assert_eq!(san_to_move(&p, "Nfd2").unwrap().uci(), "f3d2");
        assert!(matches!(san_to_move(&p, "Nd2"), Err(SanError::Ambiguous(_))));
        assert_eq!(move_to_san(&p, "b1d2".parse().unwrap()).unwrap(), "Nbd2");
    }

    #[test]
    fn rank_and_square_disambiguation() {
        let p = pos("4k3/8/8/R7/8/8/8/R3K3 w - - 0 1");
        assert_eq!(san_to_move(&p, "R1a3").unwrap().uci(), "a1a3");
        assert_eq!(move_to_san(&p, "a5a3".parse().unwrap()).unwrap(), "R5a3");
        let p = pos("4k3/8/8/8/8/Q1Q5/8/Q3K3 w - - 0 1");
        assert_eq!(move_to_san(&p, "a3b2".parse().unwrap()).unwrap(), "Qa3b2");
        assert_eq!(san_to_move(&p, "Qa3b2").unwrap().uci(), "a3b2");
    }

    #[test]
    fn castling_and_promotion() {
        let p = pos("r3k2r/1P6/8/8/8/8/8/R3K2R w KQkq - 0 1");
        assert_eq!(san_to_move(&p, "O-O").unwrap().uci(), "e1g1");
        assert_eq!(san_to_move(&p, "O-O-O").unwrap().uci(), "e1c1");
        assert_eq!(san_to_move(&p, "0-0").unwrap().uci(), "e1g1");
        assert_eq!(san_to_move(&p, "bxa8=Q+").unwrap().uci(), "b7a8q");
        assert_eq!(san_to_move(&p, "b8N").unwrap().uci(), "b7b8n");
        assert!(matches!(san_to_move(&p, "b8"), Err(SanError::Syntax(_))));
        assert!(matches!(san_to_move(&p, "Kg1"), Err(SanError::NoMatch(_))));
        assert_eq!(move_to_san(&p, "e1c1".parse().unwrap()).unwrap(), "O-O-O");
        assert_eq!(move_to_san(&p, "b7a8q".parse().unwrap()).unwrap(), "bxa8=Q+");
    }

    #[test]
    fn en_passant_and_mate_suffix() {
        let mut p = Position::initial();
        for s in ["e4", "a6", "e5", "d5", "exd6"] {
            let m = san_to_move(&p, s).unwrap();
            p.play(m).unwrap();
        }
        assert_eq!(p.piece_at("d5".parse().unwrap()), None);
        let mut p = Position::initial();
        for s in ["f3", "e5", "g4"] {
            p.play(san_to_move(&p, s).unwrap()).unwrap();
        }
        let m = san_to_move(&p, "Qh4#").unwrap();
        assert_eq!(move_to_san(&p, m).unwrap(), "Qh4#");
    }

    #[test]
    fn no_match_and_syntax() {
        let p = Position::initial();
        assert!(matches!(san_to_move(&p, "e5"), Err(SanError::NoMatch(_))));
        assert!(matches!(san_to_move(&p, "Nf6"), Err(SanError::NoMatch(_))));
        assert!(matches!(san_to_move(&p, "Zz9"), Err(SanError::Syntax(_))));
        assert!(matches!(san_to_move(&p, ""), Err(SanError::Syntax(_))));
    }
}
