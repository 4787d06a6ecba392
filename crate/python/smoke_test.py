"""Smoke test for the chesswm extension module.

Build and install first:  maturin develop -m crates/py/Cargo.toml
Then run:                 python python/smoke_test.py
"""

import os
import tempfile

import chesswm as cw


def main() -> None:
    p = cw.Position()
    assert p.fen() == cw.STARTING_FEN
    assert len(p.legal_moves()) == 20
    assert p.perft(3) == 8902

    labels = p.labels()
    assert len(labels) == cw.NUM_LABELS == 75
    assert labels[:8] == [10, 8, 9, 11, 12, 9, 8, 10]
    assert cw.Position.from_labels(labels) == p

    assert p.push_san("e4") == "e2e4"
    # the double push gives no legal capture, so gated ep stays empty
    assert p.labels()[69:71] == [0, 0]
    assert p.labels(raw_ep=True)[69:71] == [5, 1]

    assert cw.encode_move("e2e4") == 52 * 320 + 36 * 5
    assert cw.decode_move(cw.encode_move("a7a8q")) == "a7a8q"
    assert len(cw.possible_move_ids()) == 1968

    assert cw.split_residue("abc") == 3570 and cw.split_of("abc") == "train"

    game, termination = cw.random_game(0)
    assert game.tokens[0] == cw.START_TOKEN
    assert len(game) == game.plies + 1 == len(game.states)
    assert len(game.states_bytes()) == 75 * len(game)
    assert cw.decode_move(game.tokens[1]) == "a2a4"

    pgn = '[Site "https://lichess.org/abcd1234"]\n\n1. f3 e5 2. g4 Qh4# 0-1\n'
    kept, skipped = cw.parse_pgn(pgn)
    assert skipped == 0 and kept[0].game_id == "abcd1234" and kept[0].result == "0-1"
    assert not cw.passes_length_filter(kept[0])

    games = cw.random_test_set(0, 20)
    with tempfile.TemporaryDirectory() as tmp:
        shard = os.path.join(tmp, "s.cwm")
        cw.write_shard(shard, games)
        assert [g.game_id for g in cw.read_shard(shard)] == [g.game_id for g in games]

        oracle = os.path.join(tmp, "oracle.cwmp")
        cw.reference_predictions(shard, oracle)
        m = cw.evaluate(shard, oracle)
        assert m["exact_state_rate"] == 1.0 and m["cross_entropy"] == 0.0

        lag = os.path.join(tmp, "lag.cwmp")
        cw.reference_predictions(shard, lag, "lag", 1)
        m = cw.evaluate(shard, lag)
        assert m["exact_timesteps"] == m["games"] == 20

        # hand-written predictions: gold labels, certain except one uniform label
        rows = [
            (g.game_id, g.states, [[0.0] * 75 for _ in g.states]) for g in games
        ]
        rows[0][2][0][0] = -2.0
        hand = os.path.join(tmp, "hand.cwmp")
        cw.write_predictions(hand, rows)
        m = cw.evaluate(shard, hand)
        assert abs(m["cross_entropy"] * m["timesteps"] * 75 - 2.0) < 1e-9

    print("chesswm smoke test passed")


if __name__ == "__main__":
    main()
