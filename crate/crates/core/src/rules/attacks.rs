//! Precomputed attack tables over a8-major bitboards.
//!
//! Sliding attacks use the classical ray method: each of the eight rays is
//! cut at its first blocker, found with a forward or reverse bit scan
//! depending on whether the ray runs toward higher or lower indices.

use std::sync::OnceLock;

use super::{Color, Square};

// (file delta, rank delta); the first four run toward higher indices and
// direction d + 4 is the reverse of direction d.
const DIRS: [(i8, i8); 8] = [
    (0, -1),  // south
    (1, 0),   // east
    (1, -1),  // south-east
    (-1, -1), // south-west
    (0, 1),   // north
    (-1, 0),  // west
    (-1, 1),  // north-west
    (1, 1),   // north-east
];
const ROOK_DIRS: [usize; 4] = [0, 1, 4, 5];
const BISHOP_DIRS: [usize; 4] = [2, 3, 6, 7];

struct Tables {
    knight: [u64; 64],
    king: [u64; 64],
    pawn: [[u64; 64]; 2],
    rays: [[u64; 64]; 8],
    between: Vec<[u64; 64]>,
    line: Vec<[u64; 64]>,
}

fn offset(sq: usize, df: i8, dr: i8) -> Option<usize> {
    let s = Square::new_unchecked(sq as u8);
    let f = s.file() as i8 + df;
    let r = s.rank() as i8 + dr;
    Square::from_file_rank(f as u8, r as u8)
        .filter(|_| (0..8).contains(&f) && (0..8).contains(&r))
        .map(Square::index)
}

fn jumps(sq: usize, deltas: &[(i8, i8)]) -> u64 {
    deltas
        .iter()
        .filter_map(|&(df, dr)| offset(sq, df, dr))
        .fold(0, |bb, t| bb | 1 << t)
}

fn build() -> Tables {
    const KNIGHT: [(i8, i8); 8] = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)];
    const KING: [(i8, i8); 8] = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)];
    let mut t = Tables {
        knight: [0; 64],
        king: [0; 64],
        pawn: [[0; 64]; 2],
        rays: [[0; 64]; 8],
        between: vec![[0; 64]; 64],
        line: vec![[0; 64]; 64],
    };
    for sq in 0..64 {
        t.knight[sq] = jumps(sq, &KNIGHT);
        t.king[sq] = jumps(sq, &KING);
        t.pawn[Color::White.index()][sq] = jumps(sq, &[(-1, 1), (1, 1)]);
        t.pawn[Color::Black.index()][sq] = jumps(sq, &[(-1, -1), (1, -1)]);
        for (d, &(df, dr)) in DIRS.iter().enumerate() {
            let mut cur = sq;
            let mut ray = 0u64;
            while let Some(next) = offset(cur, df, dr) {
                ray |= 1 << next;
                cur = next;
            }
            t.rays[d][sq] = ray;
        }
    }
    for a in 0..64 {
        for d in 0..8 {
            let ray = t.rays[d][a];
            let opposite = t.rays[(d + 4) % 8][a];
            let mut bits = ray;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                // squares strictly between a and b along this ray
                t.between[a][b] = ray & !t.rays[d][b] & !(1 << b);
                t.line[a][b] = ray | opposite | 1 << a;
            }
        }
    }
    t
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(build)
}

#[inline]
pub fn knight(sq: Square) -> u64 {
    tables().knight[sq.index()]
}

#[inline]
pub fn king(sq: Square) -> u64 {
    tables().king[sq.index()]
}

/// Squares attacked by a pawn of `color` standing on `sq`.
#[inline]
pub fn pawn(color: Color, sq: Square) -> u64 {
    tables().pawn[color.index()][sq.index()]
}

#[inline]
fn ray_attacks(t: &Tables, dir: usize, sq: usize, occ: u64) -> u64 {
    let ray = t.rays[dir][sq];
    let blockers = ray & occ;
    if blockers == 0 {
        return ray;
    }
    let first = if dir < 4 {
        blockers.trailing_zeros()
    } else {
        63 - blockers.leading_zeros()
    } as usize;
    ray ^ t.rays[dir][first]
}

#[inline]
pub fn rook(sq: Square, occ: u64) -> u64 {
    let t = tables();
    ROOK_DIRS
        .iter()
        .fold(0, |bb, &d| bb | ray_attacks(t, d, sq.index(), occ))
}

#[inline]
pub fn bishop(sq: Square, occ: u64) -> u64 {
    let t = tables();
    BISHOP_DIRS
        .iter()
        .fold(0, |bb, &d| bb | ray_attacks(t, d, sq.index(), occ))
}

#[inline]
pub fn queen(sq: Square, occ: u64) -> u64 {
    rook(sq, occ) | bishop(sq, occ)
}

/// Squares strictly between two aligned squares; empty when not aligned.
#[inline]
pub fn between(a: Square, b: Square) -> u64 {
    tables().between[a.index()][b.index()]
}

/// The full line through two aligned squares; empty when not aligned.
#[inline]
pub fn line(a: Square, b: Square) -> u64 {
    tables().line[a.index()][b.index()]
}
