use std::collections::HashSet;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::io::{BufRead, BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;

use crate::codec::EpEncoding;
use crate::pgn::{
    build_trajectory, passes_length_filter_with, split_of, split_residue, GameIdMode, PgnError, PgnReader, Split,
};
use crate::shardio::{ShardWriter, FLAG_RAW_EP};

use super::CliError;

/// Games parsed before each parallel replay batch.
const BATCH: usize = 4096;

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub out_dir: PathBuf,
    pub shard_size: usize,
    pub workers: usize,
    pub min_full_moves: usize,
    pub split_report: Option<PathBuf>,
    pub game_id: GameIdMode,
    pub ep: EpEncoding,
}

impl BuildOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> BuildOptions {
        BuildOptions {
            out_dir: out_dir.into(),
            shard_size: super::DEFAULT_SHARD_SIZE,
            workers: 1,
            min_full_moves: crate::pgn::DEFAULT_MIN_FULL_MOVES,
            split_report: None,
            game_id: GameIdMode::SiteSegment,
            ep: EpEncoding::LegalityGated,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuildSummary {
    pub games_read: u64,
    pub malformed: u64,
    pub illegal: u64,
    pub too_short: u64,
    pub unwritable: u64,
    /// Kept games whose id was already used by an earlier kept game.
    pub duplicate_ids: u64,
    pub train: u64,
    pub validation: u64,
    pub shards: Vec<PathBuf>,
    /// One line per skipped game.
    pub skipped: Vec<String>,
}

impl BuildSummary {
    pub fn kept(&self) -> u64 {
        self.train + self.validation
    }

    pub fn validation_fraction(&self) -> f64 {
        if self.kept() == 0 {
            0.0
        } else {
            self.validation as f64 / self.kept() as f64
        }
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("games_read", self.games_read),
            ("malformed", self.malformed),
            ("illegal", self.illegal),
            ("too_short", self.too_short),
            ("unwritable", self.unwritable),
            ("duplicate_ids", self.duplicate_ids),
            ("kept", self.kept()),
            ("train", self.train),
            ("validation", self.validation),
            ("shards", self.shards.len() as u64),
            ("warnings", self.skipped.len() as u64),
        ] {
            writeln!(s, "{k}\t{v}").unwrap();
        }
        writeln!(s, "validation_fraction\t{:.6}", self.validation_fraction()).unwrap();
        for p in &self.shards {
            writeln!(s, "shard\t{}", p.display()).unwrap();
        }
        if self.duplicate_ids > 0 {
            writeln!(s, "note\tgame ids repeat; repeated ids share one split").unwrap();
        }
        if self.kept() == 0 {
            writeln!(s, "note\tno game passed the filters; no shards written").unwrap();
        }
        s
    }
}

struct SplitSink {
    prefix: &'static str,
    next_index: usize,
    open: Option<ShardWriter>,
}

impl SplitSink {
    fn new(split: Split) -> SplitSink {
        SplitSink {
            prefix: split.as_str(),
            next_index: 0,
            open: None,
        }
    }

    fn push(
        &mut self,
        t: &crate::pgn::Trajectory,
        opts: &BuildOptions,
        flags: u16,
        done: &mut Vec<PathBuf>,
    ) -> Result<(), CliError> {
        if self.open.is_none() {
            let path = opts.out_dir.join(format!("{}-{:05}.cwm", self.prefix, self.next_index));
            self.next_index += 1;
            self.open = Some(ShardWriter::create(&path, flags)?);
        }
        let w = self.open.as_mut().unwrap();
        w.push(t)?;
        if w.len() == opts.shard_size {
            self.close(done)?;
        }
        Ok(())
    }

    fn close(&mut self, done: &mut Vec<PathBuf>) -> Result<(), CliError> {
        if let Some(w) = self.open.take() {
            done.push(w.finish()?.0);
        }
        Ok(())
    }
}

fn id_hash(id: &str) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    id.hash(&mut h);
    h.finish()
}

/// Streams PGN from `input` into `train-NNNNN.cwm` / `validation-NNNNN.cwm`
/// shards under `opts.out_dir`. Games keep their input order within each
/// split whatever the worker count.
pub fn cmd_build(input: impl BufRead, opts: &BuildOptions) -> Result<BuildSummary, CliError> {
    if opts.shard_size == 0 {
        return Err(CliError::Usage("--shard-size must be positive".into()));
    }
    std::fs::create_dir_all(&opts.out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    let flags = if opts.ep == EpEncoding::Raw { FLAG_RAW_EP } else { 0 };
    let mut report = match &opts.split_report {
        Some(p) => {
            let mut w = BufWriter::new(std::fs::File::create(p)?);
            writeln!(w, "game_id\tsplit\tresidue\tplies")?;
            Some(w)
        }
        None => None,
    };

    let mut summary = BuildSummary::default();
    let mut train = SplitSink::new(Split::Train);
    let mut validation = SplitSink::new(Split::Validation);
    let mut seen_ids: HashSet<u64> = HashSet::new();
    let mut reader = PgnReader::with_mode(input, opts.game_id);
    loop {
        let mut batch = Vec::with_capacity(BATCH);
        let mut fatal = None;
        for item in reader.by_ref() {
            summary.games_read += 1;
            match item {
                Ok(g) => batch.push(g),
                Err(e) if e.is_per_game() => {
                    summary.malformed += 1;
                    summary.skipped.push(format!("malformed\t{e}"));
                }
                Err(e) => {
                    summary.games_read -= 1;
                    fatal = Some(e);
                    break;
                }
            }
            if batch.len() == BATCH {
                break;
            }
        }
        let exhausted = batch.len() < BATCH;
        let built: Vec<_> = pool.install(|| batch.par_iter().map(|g| build_trajectory(g, opts.ep)).collect());
        for r in built {
            let t = match r {
                Ok(t) => t,
                Err(e @ PgnError::IllegalGame { .. }) => {
                    summary.illegal += 1;
                    summary.skipped.push(format!("illegal\t{e}"));
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            if !passes_length_filter_with(&t, opts.min_full_moves) {
                summary.too_short += 1;
                continue;
            }
            if t.game_id.len() > u8::MAX as usize || t.plies() > u16::MAX as usize {
                summary.unwritable += 1;
                summary.skipped.push(format!(
                    "unwritable\t{}: id or length exceeds the record format",
                    t.game_id
                ));
                continue;
            }
            if !seen_ids.insert(id_hash(&t.game_id)) {
                summary.duplicate_ids += 1;
            }
            let split = split_of(&t.game_id);
            match split {
                Split::Train => {
                    summary.train += 1;
                    train.push(&t, opts, flags, &mut summary.shards)?;
                }
                Split::Validation => {
                    summary.validation += 1;
                    validation.push(&t, opts, flags, &mut summary.shards)?;
                }
            }
            if let Some(w) = report.as_mut() {
                writeln!(
                    w,
                    "{}\t{}\t{}\t{}",
                    t.game_id,
                    split.as_str(),
                    split_residue(&t.game_id),
                    t.plies()
                )?;
            }
        }
        if let Some(e) = fatal {
            return Err(e.into());
        }
        if exhausted {
            break;
        }
    }
    train.close(&mut summary.shards)?;
    validation.close(&mut summary.shards)?;
    summary.shards.sort();
    if let Some(mut w) = report {
        w.flush()?;
    }
    Ok(summary)
}
