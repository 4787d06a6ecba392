//! Legal move generation with check and pin masks.

use super::attacks;
use super::board::{Board, CastlingRights, MoveList};
use super::square::BitIter;
use super::{Color, Move, PieceKind, Promotion, Square};

const LAST_RANK: [u64; 2] = [0xff, 0xff << 56];
const PUSH_START: [u64; 2] = [0xff << 48, 0xff << 8];

#[inline]
fn push_moves(out: &mut MoveList, from: Square, mut targets: u64) {
    while targets != 0 {
        let to = Square::new_unchecked(targets.trailing_zeros() as u8);
        targets &= targets - 1;
        out.push(Move::new_unchecked(from, to, Promotion::None));
    }
}

#[inline]
fn push_pawn_moves(out: &mut MoveList, from: Square, targets: u64, us: Color) {
    for to in BitIter(targets) {
        if to.bb() & LAST_RANK[us.index()] != 0 {
            for promo in Promotion::PIECES {
                out.push(Move::new_unchecked(from, to, promo));
            }
        } else {
            out.push(Move::new_unchecked(from, to, Promotion::None));
        }
    }
}

#[inline]
fn forward(sq: Square, us: Color) -> Option<Square> {
    match us {
        Color::White => Square::new(sq.index().wrapping_sub(8) as u8),
        Color::Black => Square::new(sq.index() as u8 + 8),
    }
}

pub(crate) fn generate(b: &Board, out: &mut MoveList) {
    let us = b.side_to_move();
    let them = !us;
    let ours = b.color_bb(us);
    let theirs = b.color_bb(them);
    let occ = ours | theirs;
    let ksq = b.king_square(us);

    let checkers = b.attackers(ksq, them, occ, !0);

    // King steps: test each target with our king lifted off the board so
    // sliding checkers still see through the vacated square.
    let occ_without_king = occ ^ ksq.bb();
    let mut king_targets = attacks::king(ksq) & !ours;
    for to in BitIter(king_targets) {
        if b.attackers(to, them, occ_without_king, !0) != 0 {
            king_targets &= !to.bb();
        }
    }
    push_moves(out, ksq, king_targets);

    if checkers.count_ones() > 1 {
        return;
    }

    if checkers == 0 {
        gen_castling(b, us, occ, out);
    }

    let check_mask = if checkers == 0 {
        !0u64
    } else {
        let checker = Square::new_unchecked(checkers.trailing_zeros() as u8);
        checkers | attacks::between(ksq, checker)
    };

    let pinned = pinned_pieces(b, us, ksq, occ);
    let pin_mask = |from: Square| -> u64 {
        if pinned & from.bb() != 0 {
            attacks::line(ksq, from)
        } else {
            !0
        }
    };

    for from in BitIter(b.pieces(us, PieceKind::Knight) & !pinned) {
        push_moves(out, from, attacks::knight(from) & !ours & check_mask);
    }
    let diag = b.pieces(us, PieceKind::Bishop) | b.pieces(us, PieceKind::Queen);
    for from in BitIter(diag) {
        push_moves(
            out,
            from,
            attacks::bishop(from, occ) & !ours & check_mask & pin_mask(from),
        );
    }
    let orth = b.pieces(us, PieceKind::Rook) | b.pieces(us, PieceKind::Queen);
    for from in BitIter(orth) {
        push_moves(
            out,
            from,
            attacks::rook(from, occ) & !ours & check_mask & pin_mask(from),
        );
    }

    let ep = b.ep_square();
    for from in BitIter(b.pieces(us, PieceKind::Pawn)) {
        let mut targets = attacks::pawn(us, from) & theirs;
        if let Some(one) = forward(from, us) {
            if occ & one.bb() == 0 {
                targets |= one.bb();
                if from.bb() & PUSH_START[us.index()] != 0 {
                    let two = forward(one, us).unwrap();
                    if occ & two.bb() == 0 {
                        targets |= two.bb();
                    }
                }
            }
        }
        push_pawn_moves(out, from, targets & check_mask & pin_mask(from), us);

        if let Some(ep) = ep {
            if attacks::pawn(us, from) & ep.bb() != 0 && b.ep_capture_is_safe(from, ep) {
                out.push(Move::new_unchecked(from, ep, Promotion::None));
            }
        }
    }
}

fn pinned_pieces(b: &Board, us: Color, ksq: Square, occ: u64) -> u64 {
    let them = !us;
    let snipers = (attacks::rook(ksq, 0) & (b.pieces(them, PieceKind::Rook) | b.pieces(them, PieceKind::Queen)))
        | (attacks::bishop(ksq, 0) & (b.pieces(them, PieceKind::Bishop) | b.pieces(them, PieceKind::Queen)));
    let mut pinned = 0;
    for s in BitIter(snipers) {
        let blockers = attacks::between(ksq, s) & occ;
        if blockers.count_ones() == 1 && blockers & b.color_bb(us) != 0 {
            pinned |= blockers;
        }
    }
    pinned
}

fn gen_castling(b: &Board, us: Color, occ: u64, out: &mut MoveList) {
    let rights = b.castling();
    let (king_flag, queen_flag, base) = match us {
        Color::White => (CastlingRights::WHITE_KING, CastlingRights::WHITE_QUEEN, 56u8),
        Color::Black => (CastlingRights::BLACK_KING, CastlingRights::BLACK_QUEEN, 0u8),
    };
    let sq = |file: u8| Square::new_unchecked(base + file);
    let king_from = sq(4);
    if b.pieces(us, PieceKind::King) & king_from.bb() == 0 {
        return;
    }
    let safe = |file: u8| !b.is_attacked(sq(file), !us);
    let empty = |files: &[u8]| files.iter().all(|&f| occ & sq(f).bb() == 0);
    let has_rook = |file: u8| b.pieces(us, PieceKind::Rook) & sq(file).bb() != 0;

    if rights.has(king_flag) && has_rook(7) && empty(&[5, 6]) && safe(5) && safe(6) {
        out.push(Move::new_unchecked(king_from, sq(6), Promotion::None));
    }
    if rights.has(queen_flag) && has_rook(0) && empty(&[1, 2, 3]) && safe(3) && safe(2) {
        out.push(Move::new_unchecked(king_from, sq(2), Promotion::None));
    }
}

/// Leaf count of the legal-move tree at exactly `depth` plies.
pub fn perft(b: &Board, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let mut moves = MoveList::new();
    b.generate(&mut moves);
    if depth == 1 {
        return moves.len() as u64;
    }
    moves
        .iter()
        .map(|&m| {
            let mut child = *b;
            child.play(m);
            perft(&child, depth - 1)
        })
        .sum()
}
