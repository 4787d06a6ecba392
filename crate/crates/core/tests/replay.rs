//! Replays the real-game fixture and compares against python-chess output
//! frozen in tests/data/replay_*.tsv.

mod common;

use cwm_core::codec::{decode_state, encode_state, EpEncoding};
use cwm_core::pgn::{build_trajectory, move_to_san, san_to_move};
use cwm_core::rules::Position;

fn replay(game: &cwm_core::pgn::RawGame) -> Vec<Position> {
    let mut p = Position::initial();
    let mut out = vec![p.clone()];
    for san in &game.san_moves {
        let m = san_to_move(&p, san).unwrap_or_else(|e| panic!("{}: {e}", game.game_id));
        p.play(m).unwrap();
        out.push(p.clone());
    }
    out
}

#[test]
fn fixture_has_enough_games() {
    assert_eq!(common::real_games().len(), 1548);
}

#[test]
fn final_positions_match_oracle() {
    let games = common::real_games();
    let oracle = common::replay_oracle();
    assert_eq!(oracle.len(), 1000);
    for (i, (g, o)) in games.iter().zip(&oracle).enumerate() {
        assert_eq!(
            g.headers.get("Site").map(String::as_str).unwrap_or("?"),
            o.site,
            "game {i}"
        );
        let positions = replay(g);
        let last = positions.last().unwrap();
        assert_eq!(g.san_moves.len(), o.plies, "game {i}");
        assert_eq!(last.fen(), o.final_fen, "game {i} ({})", g.game_id);
    }
}

#[test]
fn moves_match_oracle_uci() {
    let games = common::real_games();
    for (i, (g, o)) in games.iter().zip(common::replay_oracle()).enumerate() {
        let mut p = Position::initial();
        for (san, uci) in g.san_moves.iter().zip(&o.uci) {
            let m = san_to_move(&p, san).unwrap();
            assert_eq!(&m.uci(), uci, "game {i} san {san}");
            p.play(m).unwrap();
        }
    }
}

#[test]
fn every_ply_matches_oracle() {
    let games = common::real_games();
    for (i, ply, fen) in common::per_ply_oracle() {
        let positions = replay(&games[i]);
        assert_eq!(positions[ply].fen(), fen, "game {i} ply {ply}");
    }
}

#[test]
fn san_round_trip_is_idempotent() {
    for g in common::real_games().iter().take(300) {
        let positions = replay(g);
        for (p, san) in positions.iter().zip(&g.san_moves) {
            let m = san_to_move(p, san).unwrap();
            let written = move_to_san(p, m).unwrap();
            assert_eq!(san_to_move(p, &written).unwrap(), m, "{san} -> {written}");
            assert_eq!(&written, san, "canonical SAN differs from source");
        }
    }
}

#[test]
fn trajectory_states_round_trip_and_realign() {
    for g in common::real_games().iter().take(200) {
        let t = build_trajectory(g, EpEncoding::LegalityGated).unwrap();
        t.check_shape().unwrap();
        let positions = replay(g);
        assert_eq!(t.states.len(), positions.len());
        for (s, p) in t.states.iter().zip(&positions) {
            assert_eq!(*s, encode_state(p, EpEncoding::LegalityGated).unwrap());
            let back = decode_state(s).unwrap();
            assert_eq!(encode_state(&back, EpEncoding::LegalityGated).unwrap(), *s);
        }
    }
}
