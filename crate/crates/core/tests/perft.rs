//! Perft against the frozen python-chess / published table (tests/data/perft.tsv).

use cwm_core::rules::Position;

fn suite() -> Vec<(String, String, Vec<u64>)> {
    include_str!("data/perft.tsv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (
                f[0].to_string(),
                f[1].to_string(),
                f[2..].iter().map(|v| v.parse().unwrap()).collect(),
            )
        })
        .collect()
}

#[test]
fn perft_depths_one_to_four() {
    for (name, fen, expected) in suite() {
        let p = Position::from_fen(&fen).unwrap();
        for depth in 1..=4 {
            assert_eq!(p.perft(depth as u32), expected[depth - 1], "{name} depth {depth}");
        }
    }
}

#[test]
fn initial_position_small_depths() {
    let p = Position::initial();
    assert_eq!(p.perft(0), 1);
    assert_eq!(p.perft(1), 20);
    assert_eq!(p.perft(2), 400);
    assert_eq!(p.perft(3), 8902);
}

#[test]
#[ignore]
fn perft_depth_five_timing() {
    let t = std::time::Instant::now();
    for (name, fen, expected) in suite() {
        let p = Position::from_fen(&fen).unwrap();
        assert_eq!(p.perft(5), expected[4], "{name}");
    }
    eprintln!("depth 5 suite: {:?}", t.elapsed());
}
