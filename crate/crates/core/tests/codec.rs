//! Property tests for the move and state codecs and the shard round trip.

use cwm_core::codec::{
    decode_move, decode_state, encode_move, encode_state, EpEncoding, MoveToken, StateLabels, EP_FILE, EP_RANK,
    MOVE_GEOMETRIES, NUM_LABELS,
};
use cwm_core::pgn::{GameResult, Trajectory};
use cwm_core::rules::Position;
use cwm_core::shardio::{read_shard, write_shard, FLAG_RAW_EP};
use proptest::prelude::*;

/// Positions reached by following `choices` through the legal move lists.
fn walk(choices: &[u16]) -> Vec<Position> {
    let mut p = Position::initial();
    let mut out = vec![p.clone()];
    for &c in choices {
        let legal = p.legal_moves();
        if legal.is_empty() {
            break;
        }
        p.play(legal[c as usize % legal.len()]).unwrap();
        out.push(p.clone());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn geometric_ids_round_trip(id in 0u16..MOVE_GEOMETRIES) {
        let raw = decode_move(MoveToken::new(id).unwrap()).unwrap();
        match raw.to_move() {
            Ok(m) => prop_assert_eq!(encode_move(m).id(), id),
            Err(_) => prop_assert_eq!(raw.src, raw.tgt),
        }
    }

    #[test]
    fn out_of_vocabulary_ids_are_rejected(id in 20482u16..) {
        prop_assert!(MoveToken::new(id).is_err());
    }

    #[test]
    fn states_round_trip_along_random_walks(choices in prop::collection::vec(any::<u16>(), 0..160)) {
        for p in walk(&choices) {
            for ep in [EpEncoding::LegalityGated, EpEncoding::Raw] {
                let s = encode_state(&p, ep).unwrap();
                prop_assert!(StateLabels::from_bytes(s.0).is_ok());
                prop_assert_eq!(decode_state(&s).unwrap().fen(), p.fen());
            }
            let gated = encode_state(&p, EpEncoding::LegalityGated).unwrap();
            let raw = encode_state(&p, EpEncoding::Raw).unwrap();
            // gating can only clear the en passant labels
            prop_assert_eq!(&gated.0[..EP_FILE], &raw.0[..EP_FILE]);
            prop_assert!(gated.0[EP_FILE] == raw.0[EP_FILE] || gated.0[EP_FILE] == 0);
            prop_assert_eq!(gated.0[EP_FILE] == 0, gated.0[EP_RANK] == 0);
        }
    }

    #[test]
    fn invalid_labels_are_rejected(index in 0usize..NUM_LABELS, value in 13u8..) {
        let mut bytes = encode_state(&Position::initial(), EpEncoding::LegalityGated).unwrap().0;
        bytes[index] = value;
        // counters accept any byte; everything else tops out below 13
        prop_assert_eq!(StateLabels::from_bytes(bytes).is_ok(), index >= 71);
    }

    #[test]
    fn shards_round_trip(
        games in prop::collection::vec((prop::collection::vec(any::<u16>(), 0..60), "[a-zA-Z0-9]{1,20}", 0u8..4), 0..6),
        raw in any::<bool>(),
    ) {
        let ep = if raw { EpEncoding::Raw } else { EpEncoding::LegalityGated };
        let trajectories: Vec<Trajectory> = games
            .iter()
            .map(|(choices, id, result)| {
                let positions = walk(choices);
                let mut t = Trajectory::start(id.clone(), ep);
                t.result = GameResult::from_code(*result).unwrap();
                for pair in positions.windows(2) {
                    let m = pair[0].legal_moves().into_iter().find(|m| pair[0].apply_move(*m).unwrap() == pair[1]).unwrap();
                    t.move_tokens.push(encode_move(m));
                    t.states.push(encode_state(&pair[1], ep).unwrap());
                }
                t
            })
            .collect();
        let flags = if raw { FLAG_RAW_EP } else { 0 };
        let mut buf = Vec::new();
        write_shard(&mut buf, &trajectories, flags).unwrap();
        let back = read_shard(&buf[..]).unwrap();
        prop_assert_eq!(back.flags, flags);
        prop_assert_eq!(back.trajectories, trajectories);
    }
}
