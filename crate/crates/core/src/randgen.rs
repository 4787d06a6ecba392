//! Uniformly random legal self-play.
//!
//! Each game owns a xoshiro256** stream seeded from its 64-bit seed by four
//! splitmix64 steps. At every ply the generator draws `next_u64() % n` over
//! the legal moves in ascending packed-id order and stops at the first
//! non-ongoing status, claimable draws included.

use std::fmt::Write as _;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use rayon::prelude::*;

use crate::codec::EpEncoding;
use crate::pgn::{passes_length_filter_with, GameResult, Trajectory};
use crate::rules::{Color, Move, Position, Termination};

pub const DEFAULT_MAX_PLIES: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RandGenError {
    #[error("seed {seed}: no termination within {plies} plies")]
    CapReached { seed: u64, plies: usize },
    #[error("target_games must be positive")]
    NoTarget,
    #[error("bad manifest: {0}")]
    BadManifest(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub master_seed: u64,
    pub target_games: usize,
    pub min_full_moves: usize,
    pub max_plies: usize,
    pub ep: EpEncoding,
}

impl GenConfig {
    pub fn new(master_seed: u64, target_games: usize) -> GenConfig {
        GenConfig {
            master_seed,
            target_games,
            min_full_moves: 10,
            max_plies: DEFAULT_MAX_PLIES,
            ep: EpEncoding::LegalityGated,
        }
    }
}

/// The per-game PRNG.
pub fn game_rng(seed: u64) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// Uniform pick over `moves` (modulo bias is below 2^-56 for n <= 218).
#[inline]
pub fn sample_index(rng: &mut impl RngCore, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomGame {
    pub seed: u64,
    pub trajectory: Trajectory,
    pub moves: Vec<Move>,
    pub termination: Termination,
}

pub fn random_game_id(seed: u64) -> String {
    format!("uniform-{seed}")
}

pub fn generate_random_game(seed: u64) -> Result<RandomGame, RandGenError> {
    generate_random_game_with(seed, DEFAULT_MAX_PLIES, EpEncoding::LegalityGated)
}

pub fn generate_random_game_with(seed: u64, max_plies: usize, ep: EpEncoding) -> Result<RandomGame, RandGenError> {
    let mut rng = game_rng(seed);
    let mut pos = Position::initial();
    let mut traj = Trajectory::start(random_game_id(seed), ep);
    let mut moves = Vec::new();
    loop {
        let status = pos.termination_status();
        if status.is_over() {
            traj.result = match status {
                Termination::Checkmate => match pos.side_to_move() {
                    Color::White => GameResult::BlackWins,
                    Color::Black => GameResult::WhiteWins,
                },
                _ => GameResult::Draw,
            };
            return Ok(RandomGame {
                seed,
                trajectory: traj,
                moves,
                termination: status,
            });
        }
        if moves.len() >= max_plies {
            return Err(RandGenError::CapReached {
                seed,
                plies: moves.len(),
            });
        }
        let legal = pos.legal_moves();
        let m = legal[sample_index(&mut rng, legal.len())];
        pos.play_unchecked(m);
        traj.push(m, &pos, ep)
            .expect("counters stay below 2^16 under the ply cap");
        moves.push(m);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub seed: u64,
    pub accepted: bool,
    pub plies: usize,
    /// `None` when the ply cap was hit.
    pub termination: Option<Termination>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub master_seed: u64,
    pub target_games: usize,
    pub min_full_moves: usize,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn accepted(&self) -> usize {
        self.entries.iter().filter(|e| e.accepted).count()
    }

    pub fn rejected(&self) -> usize {
        self.entries.len() - self.accepted()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        self.accepted() as f64 / self.entries.len() as f64
    }

    /// Line-delimited text: `#`-prefixed summary lines, a column header,
    /// then `seed accepted plies termination` per tried seed, tab-separated.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# master_seed\t{}", self.master_seed).unwrap();
        writeln!(s, "# target_games\t{}", self.target_games).unwrap();
        writeln!(s, "# min_full_moves\t{}", self.min_full_moves).unwrap();
        writeln!(s, "# accepted\t{}", self.accepted()).unwrap();
        writeln!(s, "# rejected\t{}", self.rejected()).unwrap();
        writeln!(s, "seed\taccepted\tplies\ttermination").unwrap();
        for e in &self.entries {
            let term = e.termination.map_or("cap_reached", Termination::as_str);
            writeln!(s, "{}\t{}\t{}\t{}", e.seed, e.accepted as u8, e.plies, term).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Manifest, RandGenError> {
        let bad = |why: String| RandGenError::BadManifest(why);
        let mut m = Manifest {
            master_seed: 0,
            target_games: 0,
            min_full_moves: 0,
            entries: Vec::new(),
        };
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest.split_once('\t').ok_or_else(|| bad(line.into()))?;
                let v: u64 = v.parse().map_err(|_| bad(line.into()))?;
                match k {
                    "master_seed" => m.master_seed = v,
                    "target_games" => m.target_games = v as usize,
                    "min_full_moves" => m.min_full_moves = v as usize,
                    _ => {}
                }
                continue;
            }
            if line.is_empty() || line.starts_with("seed\t") {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(bad(line.into()));
            }
            m.entries.push(ManifestEntry {
                seed: f[0].parse().map_err(|_| bad(line.into()))?,
                accepted: f[1] == "1",
                plies: f[2].parse().map_err(|_| bad(line.into()))?,
                termination: match f[3] {
                    "cap_reached" => None,
                    t => Some(t.parse().map_err(|_| bad(line.into()))?),
                },
            });
        }
        Ok(m)
    }
}

pub struct TestSet {
    pub trajectories: Vec<Trajectory>,
    pub manifest: Manifest,
}

/// Generates games for seeds `master_seed, master_seed + 1, ...`, skipping
/// (but recording) capped and too-short games, until `target_games` pass.
///
/// Output is independent of `workers`: seeds are evaluated in ordered
/// batches and the scan stops at the exact seed that fills the target.
pub fn generate_test_set(cfg: &GenConfig, workers: usize) -> Result<TestSet, RandGenError> {
    if cfg.target_games == 0 {
        return Err(RandGenError::NoTarget);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RandGenError::Pool(e.to_string()))?;

    let mut trajectories = Vec::with_capacity(cfg.target_games);
    let mut entries = Vec::new();
    let mut counter: u64 = 0;
    while trajectories.len() < cfg.target_games {
        let batch = ((cfg.target_games - trajectories.len()) * 5 / 4 + 16) as u64;
        let seeds: Vec<u64> = (counter..counter + batch)
            .map(|c| cfg.master_seed.wrapping_add(c))
            .collect();
        counter += batch;
        let results: Vec<_> = pool.install(|| {
            seeds
                .par_iter()
                .map(|&s| generate_random_game_with(s, cfg.max_plies, cfg.ep))
                .collect()
        });
        for (seed, r) in seeds.into_iter().zip(results) {
            if trajectories.len() == cfg.target_games {
                break;
            }
            match r {
                Ok(g) => {
                    let accepted = passes_length_filter_with(&g.trajectory, cfg.min_full_moves);
                    entries.push(ManifestEntry {
                        seed,
                        accepted,
                        plies: g.moves.len(),
                        termination: Some(g.termination),
                    });
                    if accepted {
                        trajectories.push(g.trajectory);
                    }
                }
                Err(RandGenError::CapReached { plies, .. }) => entries.push(ManifestEntry {
                    seed,
                    accepted: false,
                    plies,
                    termination: None,
                }),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(TestSet {
        trajectories,
        manifest: Manifest {
            master_seed: cfg.master_seed,
            target_games: cfg.target_games,
            min_full_moves: cfg.min_full_moves,
            entries,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_game() {
        let a = generate_random_game(7).unwrap();
        let b = generate_random_game(7).unwrap();
        assert_eq!(a, b);
        assert!(a.termination.is_over());
        assert_eq!(a.trajectory.plies(), a.moves.len());
    }

    #[test]
    fn replay_reproduces_states() {
        let g = generate_random_game(3).unwrap();
        let mut p = Position::initial();
        for (i, m) in g.moves.iter().enumerate() {
            p.play(*m).unwrap();
            let s = crate::codec::encode_state(&p, EpEncoding::LegalityGated).unwrap();
            assert_eq!(g.trajectory.states[i + 1], s);
        }
        assert_eq!(p.termination_status(), g.termination);
    }

    #[test]
    fn cap_is_reported() {
        assert_eq!(
            generate_random_game_with(0, 5, EpEncoding::LegalityGated),
            Err(RandGenError::CapReached { seed: 0, plies: 5 })
        );
    }

    #[test]
    fn manifest_text_round_trip() {
        let set = generate_test_set(&GenConfig::new(11, 5), 2).unwrap();
        let text = set.manifest.to_text();
        assert_eq!(Manifest::from_text(&text).unwrap(), set.manifest);
        assert_eq!(set.manifest.accepted(), 5);
        assert!(set.trajectories.iter().all(|t| t.plies() >= 20));
    }

    #[test]
    fn zero_target_rejected() {
        assert!(matches!(
            generate_test_set(&GenConfig::new(0, 0), 1),
            Err(RandGenError::NoTarget)
        ));
    }
}
