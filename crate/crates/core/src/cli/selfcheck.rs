//! Hermetic consistency checks with pinned expected values.

use rand_core::RngCore;

use crate::codec::{
    decode_move, decode_state, encode_move, encode_state_with, enumerate_possible_moves, EpEncoding, PieceCodes,
};
use crate::evalkit::{evaluate, lagk_predict, oracle_predict};
use crate::pgn::{split_of, split_residue, Split};
use crate::randgen::{game_rng, generate_random_game, generate_test_set, GenConfig};
use crate::rules::Position;
use crate::shardio::Shard;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const PERFT: [(&str, &str, [u64; 4]); 6] = [
    ("startpos", crate::rules::STARTING_FEN, [20, 400, 8902, 197281]),
    (
        "kiwipete",
        "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
        [48, 2039, 97862, 4085603],
    ),
    (
        "endgame",
        "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1",
        [14, 191, 2812, 43238],
    ),
    (
        "promotions",
        "r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1",
        [6, 264, 9467, 422333],
    ),
    (
        "talkchess",
        "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8",
        [44, 1486, 62379, 2103487],
    ),
    (
        "steven",
        "r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10",
        [46, 2079, 89890, 3894594],
    ),
];

/// Labels of the initial position under the standard table.
const INITIAL_LABELS: [u8; 75] = [
    10, 8, 9, 11, 12, 9, 8, 10, //
    7, 7, 7, 7, 7, 7, 7, 7, //
    0, 0, 0, 0, 0, 0, 0, 0, //
    0, 0, 0, 0, 0, 0, 0, 0, //
    0, 0, 0, 0, 0, 0, 0, 0, //
    0, 0, 0, 0, 0, 0, 0, 0, //
    1, 1, 1, 1, 1, 1, 1, 1, //
    4, 2, 3, 5, 6, 3, 2, 4, //
    0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 1,
];

fn row(name: &'static str, passed: bool, detail: impl Into<String>) -> CheckRow {
    CheckRow {
        name,
        passed,
        detail: detail.into(),
    }
}

fn check_perft() -> CheckRow {
    for (name, fen, expected) in PERFT {
        let p = Position::from_fen(fen).expect("pinned FEN parses");
        for (d, &want) in expected.iter().enumerate() {
            let got = p.perft(d as u32 + 1);
            if got != want {
                return row("perft", false, format!("{name} depth {}: {got} != {want}", d + 1));
            }
        }
    }
    row("perft", true, "6 positions, depths 1-4")
}

fn check_enumeration() -> CheckRow {
    let ids = enumerate_possible_moves();
    let non_promo = ids.iter().filter(|t| t.id() % 5 == 0).count();
    let ok = ids.len() == 1968 && non_promo == 1792;
    row(
        "move_enumeration",
        ok,
        format!("{} ids, {non_promo} without promotion", ids.len()),
    )
}

fn check_move_codec() -> CheckRow {
    for t in enumerate_possible_moves() {
        let back = decode_move(t).ok().and_then(|m| m.to_move().ok()).map(encode_move);
        if back != Some(t) {
            return row("move_codec", false, format!("id {} does not round-trip", t.id()));
        }
    }
    row("move_codec", true, "1968 ids round-trip")
}

fn check_state_codec(codes: &PieceCodes) -> CheckRow {
    let initial = encode_state_with(&Position::initial(), EpEncoding::LegalityGated, codes);
    if initial.as_ref().map(|s| s.0) != Ok(INITIAL_LABELS) {
        return row(
            "state_codec",
            false,
            "initial position labels differ from the pinned vector",
        );
    }
    let mut checked = 0;
    for seed in 0..8 {
        let g = generate_random_game(seed).expect("pinned seeds terminate");
        let mut p = Position::initial();
        for m in &g.moves {
            p.play(*m).expect("generated moves are legal");
            let round_trip = encode_state_with(&p, EpEncoding::LegalityGated, codes)
                .ok()
                .and_then(|s| decode_state(&s).ok())
                .map(|q| q.fen());
            if round_trip.as_deref() != Some(p.fen().as_str()) {
                return row(
                    "state_codec",
                    false,
                    format!("seed {seed}: {} does not round-trip", p.fen()),
                );
            }
            checked += 1;
        }
    }
    row("state_codec", true, format!("{checked} positions round-trip"))
}

fn check_golden_hashes() -> CheckRow {
    let residue = split_residue("abc");
    let mut rng = game_rng(0);
    let first = rng.next_u64();
    let first_move = generate_random_game(0).map_or_else(|e| e.to_string(), |g| g.moves[0].uci());
    let ok =
        residue == 3570 && split_of("abc") == Split::Train && first == 11091344671253066420 && first_move == "a2a4";
    row(
        "golden_md5_prng",
        ok,
        format!("abc residue {residue}, seed 0 first output {first}, first move {first_move}"),
    )
}

fn check_metrics() -> CheckRow {
    let set = generate_test_set(&GenConfig::new(0, 20), 2).expect("seed 0 set generates");
    let shard = Shard {
        flags: 0,
        trajectories: set.trajectories,
    };
    let (Ok(oracle), Ok(lag)) = (
        evaluate(&shard, &oracle_predict(&shard)),
        evaluate(&shard, &lagk_predict(&shard, 1)),
    ) else {
        return row("oracle_vs_lag", false, "evaluation failed");
    };
    let oracle_ok = oracle.cross_entropy() == 0.0
        && oracle.exact_state_rate() == 1.0
        && oracle.labelwise_accuracy() == 1.0
        && oracle.trajectory_exact_rate() == 1.0;
    let lag_ok = lag.exact_timesteps == lag.games
        && lag.exact_games == 0
        && lag.labelwise_accuracy() < 1.0
        && lag.recombined_exact_rate() == lag.exact_state_rate();
    row(
        "oracle_vs_lag",
        oracle_ok && lag_ok,
        format!(
            "oracle exact {:.6}, lag-1 exact {:.6} ({} / {}), lag-1 labelwise {:.6}",
            oracle.exact_state_rate(),
            lag.exact_state_rate(),
            lag.exact_timesteps,
            lag.timesteps,
            lag.labelwise_accuracy()
        ),
    )
}

/// Runs every check; `codes` replaces the piece-code table in the state
/// codec check only.
pub fn run_selfcheck(codes: &PieceCodes) -> Vec<CheckRow> {
    vec![
        check_perft(),
        check_enumeration(),
        check_move_codec(),
        check_state_codec(codes),
        check_golden_hashes(),
        check_metrics(),
    ]
}
