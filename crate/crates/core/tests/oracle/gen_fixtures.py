"""Regenerates the frozen oracle fixtures under ../data using python-chess.

Nothing here imports the Rust crate; every value is computed from python-chess,
hashlib and a from-scratch splitmix64/xoshiro256** reference.

    python3 gen_fixtures.py
"""

import hashlib
import math
import os

import chess
import chess.pgn

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

PERFT_POSITIONS = [
    ("startpos", chess.STARTING_FEN),
    ("kiwipete", "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1"),
    ("endgame", "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1"),
    ("promotions", "r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1"),
    ("talkchess", "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8"),
    ("steven", "r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10"),
]

# Depth-5 totals published with the standard perft suite. The oracle below
# recomputes depths 1..ORACLE_DEPTH with python-chess and checks they agree
# with this table before anything is written.
PUBLISHED = {
    "startpos": [20, 400, 8902, 197281, 4865609],
    "kiwipete": [48, 2039, 97862, 4085603, 193690690],
    "endgame": [14, 191, 2812, 43238, 674624],
    "promotions": [6, 264, 9467, 422333, 15833292],
    "talkchess": [44, 1486, 62379, 2103487, 89941194],
    "steven": [46, 2079, 89890, 3894594, 164075551],
}
ORACLE_DEPTH = 3

MASK64 = (1 << 64) - 1


def to_index(sq):
    """python-chess square (a1 = 0) to a8-major index (a8 = 0)."""
    return (7 - chess.square_rank(sq)) * 8 + chess.square_file(sq)


PROMO = {None: 0, chess.QUEEN: 1, chess.ROOK: 2, chess.BISHOP: 3, chess.KNIGHT: 4}


def pack(move):
    return to_index(move.from_square) * 320 + to_index(move.to_square) * 5 + PROMO[move.promotion]


def perft(board, depth):
    if depth == 0:
        return 1
    if depth == 1:
        return board.legal_moves.count()
    n = 0
    for m in board.legal_moves:
        board.push(m)
        n += perft(board, depth - 1)
        board.pop()
    return n


def gen_perft():
    lines = ["# name\tfen\td1\td2\td3\td4\td5"]
    for name, fen in PERFT_POSITIONS:
        b = chess.Board(fen)
        for d in range(1, ORACLE_DEPTH + 1):
            got = perft(b, d)
            assert got == PUBLISHED[name][d - 1], (name, d, got)
        lines.append("\t".join([name, fen] + [str(v) for v in PUBLISHED[name]]))
    write("perft.tsv", lines)


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    def __init__(self, seed):
        st = seed
        self.s = []
        for _ in range(4):
            st, z = splitmix64(st)
            self.s.append(z)

    def next(self):
        s = self.s
        result = (rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result


def sorted_legal(board):
    return sorted(board.legal_moves, key=pack)


def gen_prng():
    lines = ["# seed\tfirst five next_u64 outputs\tfirst move (uci) of the random game"]
    for seed in [0, 1, 42, 0xDEADBEEF, MASK64]:
        rng = Xoshiro256StarStar(seed)
        outs = [rng.next() for _ in range(5)]
        rng = Xoshiro256StarStar(seed)
        b = chess.Board()
        moves = sorted_legal(b)
        first = moves[rng.next() % len(moves)]
        lines.append("\t".join([str(seed), " ".join(str(o) for o in outs), first.uci()]))
    write("prng.tsv", lines)

    # A short random playout under the same sampling rule, for ply-by-ply comparison.
    rng = Xoshiro256StarStar(0)
    b = chess.Board()
    ucis = []
    for _ in range(40):
        moves = sorted_legal(b)
        if not moves:
            break
        m = moves[rng.next() % len(moves)]
        ucis.append(m.uci())
        b.push(m)
    write("prng_playout_seed0.txt", [" ".join(ucis), b.fen()])


def gen_md5():
    ids = ["abc", "AbCd1234", "ENPo6ReH", "migo3Sgt", "https://lichess.org/AbCd1234", "a", "z" * 64]
    ids += ["id%06d" % i for i in range(2000)]
    lines = ["# game_id\tresidue\tsplit"]
    for gid in ids:
        r = int.from_bytes(hashlib.md5(gid.encode("utf-8")).digest(), "big") % 10000
        lines.append("%s\t%d\t%s" % (gid, r, "validation" if r < 50 else "train"))
    write("md5_split.tsv", lines)


def gen_possible_moves():
    empty = chess.BaseBoard.empty()
    ids = set()
    for sq in chess.SQUARES:
        queen = chess.BaseBoard.empty()
        queen.set_piece_at(sq, chess.Piece(chess.QUEEN, chess.WHITE))
        for tgt in queen.attacks(sq):
            ids.add(to_index(sq) * 320 + to_index(tgt) * 5)
        for tgt in chess.SquareSet(chess.BB_KNIGHT_ATTACKS[sq]):
            ids.add(to_index(sq) * 320 + to_index(tgt) * 5)
    non_promo = len(ids)
    del empty
    for color, from_rank, to_rank in [(chess.WHITE, 6, 7), (chess.BLACK, 1, 0)]:
        for f in range(8):
            src = chess.square(f, from_rank)
            for df in (-1, 0, 1):
                if 0 <= f + df < 8:
                    tgt = chess.square(f + df, to_rank)
                    for promo in (chess.QUEEN, chess.ROOK, chess.BISHOP, chess.KNIGHT):
                        ids.add(to_index(src) * 320 + to_index(tgt) * 5 + PROMO[promo])
    lines = ["# packed ids realizable by some legal move; non-promotion=%d total=%d" % (non_promo, len(ids))]
    lines += [str(i) for i in sorted(ids)]
    write("possible_moves.txt", lines)


def fixture_games():
    games = []
    for name in ["lichess_db_1000k.pgn", "twic1599_1000k.pgn"]:
        with open(os.path.join(DATA, name), encoding="utf-8") as f:
            while True:
                g = chess.pgn.read_game(f)
                if g is None:
                    break
                games.append(g)
    return games[:1000]


def gen_replay():
    """Final legality-gated FEN, ply count and UCI sequence for the first 1000 fixture games."""
    lines = ["# index\tsite\tplies\tfinal_fen\tuci_moves"]
    per_ply = ["# index\tply\tfen (legality-gated ep)"]
    for i, g in enumerate(fixture_games()):
        b = g.board()
        ucis = []
        for ply, m in enumerate(g.mainline_moves(), start=1):
            ucis.append(m.uci())
            b.push(m)
            if i < 100:
                per_ply.append("%d\t%d\t%s" % (i, ply, b.fen()))
        site = g.headers.get("Site", "?")
        lines.append("\t".join([str(i), site, str(len(ucis)), b.fen(), " ".join(ucis)]))
    write("replay_oracle.tsv", lines)
    write("replay_per_ply.tsv", per_ply)


def gen_misc():
    lines = [
        "ln13_times64_over75\t%r" % (64 * math.log(13) / 75),
        "ln13\t%r" % math.log(13),
    ]
    write("arith.tsv", lines)


PIECE_CODE = {(chess.WHITE, k): k for k in range(1, 7)}
PIECE_CODE.update({(chess.BLACK, k): k + 6 for k in range(1, 7)})


def labels(b):
    """The 75 state labels, ep legality-gated, counters big-endian."""
    out = [0] * 64
    for sq, pc in b.piece_map().items():
        out[to_index(sq)] = PIECE_CODE[(pc.color, pc.piece_type)]
    out.append(0 if b.turn == chess.WHITE else 1)
    for right in (chess.BB_H1, chess.BB_A1, chess.BB_H8, chess.BB_A8):
        out.append(1 if b.castling_rights & right else 0)
    if b.has_legal_en_passant():
        out.append(chess.square_file(b.ep_square) + 1)
        out.append(1 if chess.square_rank(b.ep_square) == 2 else 2)
    else:
        out += [0, 0]
    out += [b.halfmove_clock >> 8, b.halfmove_clock & 255]
    out += [b.fullmove_number >> 8, b.fullmove_number & 255]
    return out


def narrow_insufficient(b):
    pm = b.piece_map()
    others = [(sq, p) for sq, p in pm.items() if p.piece_type != chess.KING]
    if not others:
        return True
    if len(others) == 1:
        return others[0][1].piece_type in (chess.BISHOP, chess.KNIGHT)
    if len(others) == 2 and all(p.piece_type == chess.BISHOP for _, p in others):
        (s1, p1), (s2, p2) = others
        return p1.color != p2.color and bool(chess.BB_SQUARES[s1] & chess.BB_DARK_SQUARES) == bool(
            chess.BB_SQUARES[s2] & chess.BB_DARK_SQUARES
        )
    return False


def termination(b):
    """Status under the crate's precedence; claimable draws end the game."""
    if b.is_checkmate():
        return "checkmate"
    if b.is_stalemate():
        return "stalemate"
    if narrow_insufficient(b):
        return "insufficient_material"
    if b.halfmove_clock >= 150:
        return "seventyfive_move"
    if b.is_repetition(5):
        return "fivefold_repetition"
    if b.halfmove_clock >= 100:
        return "claimable_fifty_move"
    if b.is_repetition(3):
        return "claimable_threefold"
    return None


def random_game(seed, max_plies=2048):
    """(board, states s_0..s_T, termination) of the uniform random game for `seed`; None if capped."""
    rng = Xoshiro256StarStar(seed)
    b = chess.Board()
    states = [labels(b)]
    while True:
        term = termination(b)
        if term is not None:
            return b, states, term
        if len(states) - 1 >= max_plies:
            return None
        moves = sorted_legal(b)
        b.push(moves[rng.next() % len(moves)])
        states.append(labels(b))


def random_game_states(seed):
    g = random_game(seed)
    return None if g is None else g[1]


def gen_random_games():
    lines = ["# seed\tplies\ttermination\tfinal fen\tmd5 of space-joined uci moves"]
    for seed in range(500):
        g = random_game(seed)
        if g is None:
            lines.append("%d\tcap" % seed)
            continue
        b, states, term = g
        ucis = " ".join(m.uci() for m in b.move_stack)
        lines.append("\t".join([str(seed), str(len(states) - 1), term, b.fen(), hashlib.md5(ucis.encode()).hexdigest()]))
    write("random_games.tsv", lines)


def gen_eval_probe():
    """Metric counters for reference predictors on the seed-0, 100-game random set."""
    games = []
    seed = 0
    while len(games) < 100:
        st = random_game_states(seed)
        if st is not None and len(st) - 1 >= 20:
            games.append(st)
        seed += 1
    lines = ["# predictor\tgames\ttimesteps\texact_timesteps\tcorrect_labels\texact_games\tlast_seed\t" + str(seed - 1)]
    predictors = {
        "lag1": lambda st, t: st[max(0, t - 1)],
        "lag2": lambda st, t: st[max(0, t - 2)],
        "amnesiac": lambda st, t: st[t][:65] + st[0][65:],
    }
    for name, f in predictors.items():
        steps = exact = correct = exact_games = 0
        for st in games:
            all_exact = True
            for t, gold in enumerate(st):
                c = sum(1 for a, b in zip(gold, f(st, t)) if a == b)
                steps += 1
                correct += c
                exact += c == 75
                all_exact &= c == 75
            exact_games += all_exact
        lines.append("\t".join(str(v) for v in [name, len(games), steps, exact, correct, exact_games]))
    write("eval_probe.tsv", lines)


def write(name, lines):
    with open(os.path.join(DATA, name), "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    print("wrote", name, len(lines), "lines")


if __name__ == "__main__":
    gen_possible_moves()
    gen_md5()
    gen_prng()
    gen_misc()
    gen_eval_probe()
    gen_random_games()
    gen_replay()
    gen_perft()
