#![allow(dead_code)]

use std::io::BufReader;

use cwm_core::pgn::{parse_pgn_stream, RawGame};

pub const LICHESS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/lichess_db_1000k.pgn");
pub const TWIC: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/twic1599_1000k.pgn");

/// Every real game in the fixtures, Lichess first, in file order.
pub fn real_games() -> Vec<RawGame> {
    [LICHESS, TWIC]
        .iter()
        .flat_map(|path| {
            let f = std::fs::File::open(path).unwrap();
            parse_pgn_stream(BufReader::new(f))
                .map(|g| g.expect("fixture parses"))
                .collect::<Vec<_>>()
        })
        .collect()
}

pub struct OracleGame {
    pub site: String,
    pub plies: usize,
    pub final_fen: String,
    pub uci: Vec<String>,
}

pub fn replay_oracle() -> Vec<OracleGame> {
    include_str!("../data/replay_oracle.tsv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            OracleGame {
                site: f[1].to_string(),
                plies: f[2].parse().unwrap(),
                final_fen: f[3].to_string(),
                uci: f
                    .get(4)
                    .map_or(vec![], |s| s.split_whitespace().map(String::from).collect()),
            }
        })
        .collect()
}

/// (game index, ply, fen) for the first 100 fixture games.
pub fn per_ply_oracle() -> Vec<(usize, usize, String)> {
    include_str!("../data/replay_per_ply.tsv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].to_string())
        })
        .collect()
}
