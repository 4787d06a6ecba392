use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::codec::{decode_move, enumerate_possible_moves, MoveToken, MOVE_GEOMETRIES};
use crate::shardio::read_shard_file;

use super::CliError;

/// Expands directories into their `*.cwm` files, sorted by name.
pub fn shard_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .filter(|f| f.extension().is_some_and(|x| x == "cwm"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn unique_ids(paths: &[PathBuf]) -> Result<(BTreeSet<MoveToken>, u64), CliError> {
    let mut ids = BTreeSet::new();
    let mut games = 0;
    for p in paths {
        let shard = read_shard_file(Path::new(p))?;
        games += shard.trajectories.len() as u64;
        for t in &shard.trajectories {
            ids.extend(t.move_tokens[1..].iter().copied());
        }
    }
    Ok((ids, games))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub games: u64,
    pub unique: BTreeSet<MoveToken>,
    pub both: usize,
    pub primary_only: BTreeSet<MoveToken>,
    pub compare_only: BTreeSet<MoveToken>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub games: u64,
    pub unique: BTreeSet<MoveToken>,
    /// Ids seen that no legal move can produce.
    pub outside_possible: BTreeSet<MoveToken>,
    pub possible_unseen: usize,
    pub comparison: Option<Comparison>,
}

impl CoverageReport {
    pub fn coverage_pct(&self) -> f64 {
        100.0 * self.unique.len() as f64 / MOVE_GEOMETRIES as f64
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "games\t{}", self.games).unwrap();
        writeln!(s, "unique_ids\t{}", self.unique.len()).unwrap();
        writeln!(s, "vocabulary\t{MOVE_GEOMETRIES}").unwrap();
        writeln!(s, "coverage_pct\t{:.2}", self.coverage_pct()).unwrap();
        writeln!(s, "possible_ids\t{}", enumerate_possible_moves().len()).unwrap();
        writeln!(s, "possible_unseen\t{}", self.possible_unseen).unwrap();
        writeln!(s, "outside_possible\t{}", self.outside_possible.len()).unwrap();
        for id in &self.outside_possible {
            writeln!(s, "outside\t{}\t{}", id.id(), describe(*id)).unwrap();
        }
        if let Some(c) = &self.comparison {
            writeln!(s, "compare_games\t{}", c.games).unwrap();
            writeln!(s, "compare_unique_ids\t{}", c.unique.len()).unwrap();
            writeln!(s, "both\t{}", c.both).unwrap();
            writeln!(s, "primary_only\t{}", c.primary_only.len()).unwrap();
            writeln!(s, "compare_only\t{}", c.compare_only.len()).unwrap();
            for id in &c.compare_only {
                writeln!(s, "compare_only_id\t{}\t{}", id.id(), describe(*id)).unwrap();
            }
        }
        s
    }
}

fn describe(id: MoveToken) -> String {
    decode_move(id).map_or_else(|_| "special".into(), |m| m.to_string())
}

/// Unique packed ids in `primary`, checked against the geometric vocabulary
/// and, when `compare` is non-empty, against a second shard set.
pub fn cmd_coverage(primary: &[PathBuf], compare: &[PathBuf]) -> Result<CoverageReport, CliError> {
    let possible = enumerate_possible_moves();
    let (unique, games) = unique_ids(primary)?;
    let outside_possible = unique.difference(&possible).copied().collect();
    let possible_unseen = possible.difference(&unique).count();
    let comparison = if compare.is_empty() {
        None
    } else {
        let (other, games) = unique_ids(compare)?;
        Some(Comparison {
            games,
            both: unique.intersection(&other).count(),
            primary_only: unique.difference(&other).copied().collect(),
            compare_only: other.difference(&unique).copied().collect(),
            unique: other,
        })
    };
    Ok(CoverageReport {
        games,
        unique,
        outside_possible,
        possible_unseen,
        comparison,
    })
}
