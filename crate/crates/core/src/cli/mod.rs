//! The `cwm` command line. Every subcommand prints `key<TAB>value` lines on
//! success and a single `error<TAB>kind<TAB>message` line on failure.

mod build;
mod coverage;
mod inspect;
mod selfcheck;

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::codec::{EpEncoding, PieceCodes};
use crate::evalkit::{self, EvalError};
use crate::pgn::{split_of, split_residue, GameIdMode, PgnError};
use crate::randgen::{generate_test_set, GenConfig, RandGenError, DEFAULT_MAX_PLIES};
use crate::shardio::{self, ShardError, ShardWriter, FLAG_RAW_EP};

pub use build::{cmd_build, BuildOptions, BuildSummary};
pub use coverage::{cmd_coverage, shard_paths, CoverageReport};
pub use selfcheck::{run_selfcheck, CheckRow};

pub const DEFAULT_SHARD_SIZE: usize = 65_536;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Pgn(#[from] PgnError),
    #[error(transparent)]
    Shard(#[from] ShardError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    RandGen(#[from] RandGenError),
    #[error("{0} self-check(s) failed")]
    SelfCheck(usize),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Pgn(_) => "pgn",
            CliError::Shard(e) => match e {
                ShardError::BadMagic(_) => "bad_magic",
                ShardError::BadVersion(_) => "bad_version",
                ShardError::ChecksumMismatch { .. } => "checksum_mismatch",
                ShardError::TruncatedRecord(_) => "truncated_record",
                ShardError::InvalidRecord { .. } => "invalid_record",
                ShardError::Unwritable(_) => "unwritable",
                ShardError::Io(_) => "io",
            },
            CliError::Eval(EvalError::Mismatch(_)) => "mismatch",
            CliError::Eval(EvalError::BadLogProb { .. }) => "bad_log_prob",
            CliError::RandGen(_) => "randgen",
            CliError::SelfCheck(_) => "selfcheck",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "cwm", version, about = "Chess world-model benchmark toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EpArg {
    /// En passant labels only when a legal capture exists.
    Gated,
    /// En passant labels after every double push.
    Raw,
}

impl From<EpArg> for EpEncoding {
    fn from(e: EpArg) -> EpEncoding {
        match e {
            EpArg::Gated => EpEncoding::LegalityGated,
            EpArg::Raw => EpEncoding::Raw,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GameIdArg {
    /// Trailing path segment of the Site URL.
    Segment,
    /// The Site header verbatim.
    FullSite,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PredictorArg {
    Oracle,
    Lag,
    Amnesiac,
}

#[derive(clap::Args, Debug, Clone, Copy)]
pub struct WorkerArgs {
    /// Worker threads [default: available parallelism].
    #[arg(long, env = "CWM_WORKERS")]
    pub workers: Option<usize>,
}

impl WorkerArgs {
    pub fn resolve(self) -> usize {
        self.workers
            .filter(|&w| w > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert PGN into train/validation shards.
    Build {
        /// PGN file, or `-` for standard input.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Games per shard.
        #[arg(long, default_value_t = DEFAULT_SHARD_SIZE)]
        shard_size: usize,
        #[command(flatten)]
        workers: WorkerArgs,
        #[arg(long, default_value_t = 10)]
        min_full_moves: usize,
        /// Write a per-game `game_id split residue plies` table here.
        #[arg(long)]
        split_report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "segment")]
        game_id: GameIdArg,
        #[arg(long, value_enum, default_value = "gated")]
        ep_encoding: EpArg,
    },
    /// Generate the uniformly random test set.
    Randgen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        games: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        min_full_moves: usize,
        #[arg(long, default_value_t = DEFAULT_SHARD_SIZE)]
        shard_size: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_PLIES)]
        max_plies: usize,
        #[arg(long, value_enum, default_value = "gated")]
        ep_encoding: EpArg,
        #[command(flatten)]
        workers: WorkerArgs,
    },
    /// Print the MD5 residue and split of game ids.
    Split {
        ids: Vec<String>,
        /// Read ids one per line from this file (`-` for standard input).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Print only totals.
        #[arg(long)]
        summary: bool,
    },
    /// Move-token coverage of shards against the geometric vocabulary.
    Coverage {
        /// Shard files or directories of `*.cwm` files.
        #[arg(required = true)]
        shards: Vec<PathBuf>,
        /// A second shard set to compare against.
        #[arg(long, num_args = 1..)]
        compare: Vec<PathBuf>,
    },
    /// Print headers and sample games of a shard or prediction file.
    Inspect {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        games: usize,
    },
    /// Score a prediction file against a shard.
    Evaluate {
        #[arg(long)]
        shard: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        /// Also write the report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Report per-game macro-averaged cross-entropy as the headline value.
        #[arg(long)]
        per_game_macro: bool,
    },
    /// Write reference predictions for a shard.
    Predict {
        #[arg(long)]
        shard: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "oracle")]
        predictor: PredictorArg,
        /// Lag for the `lag` predictor.
        #[arg(long, default_value_t = 1)]
        lag: usize,
    },
    /// Run the built-in consistency checks.
    Selfcheck {
        /// Comma-separated replacement piece-code table (for testing the check itself).
        #[arg(long, hide = true)]
        piece_codes: Option<String>,
    },
}

/// Runs a parsed command, writing reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Build {
            input,
            out_dir,
            shard_size,
            workers,
            min_full_moves,
            split_report,
            game_id,
            ep_encoding,
        } => {
            let opts = BuildOptions {
                out_dir,
                shard_size,
                workers: workers.resolve(),
                min_full_moves,
                split_report,
                game_id: match game_id {
                    GameIdArg::Segment => GameIdMode::SiteSegment,
                    GameIdArg::FullSite => GameIdMode::FullSite,
                },
                ep: ep_encoding.into(),
            };
            let summary = if input.as_os_str() == "-" {
                cmd_build(std::io::stdin().lock(), &opts)?
            } else {
                cmd_build(BufReader::new(std::fs::File::open(&input)?), &opts)?
            };
            for w in &summary.skipped {
                eprintln!("warning\tskipped\t{w}");
            }
            out.write_all(summary.to_kv().as_bytes())?;
        }
        Command::Randgen {
            seed,
            games,
            out_dir,
            min_full_moves,
            shard_size,
            max_plies,
            ep_encoding,
            workers,
        } => {
            let cfg = GenConfig {
                master_seed: seed,
                target_games: games,
                min_full_moves,
                max_plies,
                ep: ep_encoding.into(),
            };
            let text = cmd_randgen(&cfg, &out_dir, shard_size, workers.resolve())?;
            out.write_all(text.as_bytes())?;
        }
        Command::Split { ids, input, summary } => {
            let mut all = ids;
            if let Some(path) = input {
                let lines: Vec<String> = if path.as_os_str() == "-" {
                    std::io::stdin().lock().lines().collect::<Result<_, _>>()?
                } else {
                    BufReader::new(std::fs::File::open(path)?)
                        .lines()
                        .collect::<Result<_, _>>()?
                };
                all.extend(lines.into_iter().filter(|l| !l.is_empty()));
            }
            let mut validation = 0usize;
            for id in &all {
                let split = split_of(id);
                validation += (split == crate::pgn::Split::Validation) as usize;
                if !summary {
                    writeln!(out, "{id}\t{}\t{}", split_residue(id), split.as_str())?;
                }
            }
            if summary {
                writeln!(out, "ids\t{}", all.len())?;
                writeln!(out, "validation\t{validation}")?;
                let frac = if all.is_empty() {
                    0.0
                } else {
                    validation as f64 / all.len() as f64
                };
                writeln!(out, "validation_fraction\t{frac:.6}")?;
            }
        }
        Command::Coverage { shards, compare } => {
            let report = cmd_coverage(&shard_paths(&shards)?, &shard_paths(&compare)?)?;
            out.write_all(report.to_kv().as_bytes())?;
        }
        Command::Inspect { file, games } => inspect::inspect(&file, games, out)?,
        Command::Evaluate {
            shard,
            predictions,
            report,
            per_game_macro,
        } => {
            let s = shardio::read_shard_file(&shard)?;
            let p = shardio::read_predictions(BufReader::new(std::fs::File::open(&predictions)?))?;
            let r = evalkit::evaluate(&s, &p)?;
            let text = r.to_kv(per_game_macro);
            if let Some(path) = report {
                std::fs::write(path, &text)?;
            }
            for w in &r.warnings {
                eprintln!("warning\t{w}");
            }
            out.write_all(text.as_bytes())?;
        }
        Command::Predict {
            shard,
            out: path,
            predictor,
            lag,
        } => {
            let s = shardio::read_shard_file(&shard)?;
            let p = match predictor {
                PredictorArg::Oracle => evalkit::oracle_predict(&s),
                PredictorArg::Lag if lag == 0 => return Err(CliError::Usage("--lag must be at least 1".into())),
                PredictorArg::Lag => evalkit::lagk_predict(&s, lag),
                PredictorArg::Amnesiac => evalkit::amnesiac_predict(&s),
            };
            let bytes = shardio::write_predictions(std::io::BufWriter::new(std::fs::File::create(&path)?), &p)?;
            writeln!(out, "games\t{}", p.games.len())?;
            writeln!(out, "bytes\t{bytes}")?;
        }
        Command::Selfcheck { piece_codes } => {
            let codes = match piece_codes {
                None => PieceCodes::STANDARD,
                Some(text) => parse_piece_codes(&text)?,
            };
            let rows = run_selfcheck(&codes);
            let failed = rows.iter().filter(|r| !r.passed).count();
            for r in &rows {
                writeln!(
                    out,
                    "{}\t{}\t{}",
                    r.name,
                    if r.passed { "pass" } else { "FAIL" },
                    r.detail
                )?;
            }
            if failed > 0 {
                return Err(CliError::SelfCheck(failed));
            }
        }
    }
    Ok(())
}

fn parse_piece_codes(text: &str) -> Result<PieceCodes, CliError> {
    let codes: Vec<u8> = text
        .split(',')
        .map(|v| v.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad piece-code table {text:?}")))?;
    let table: [u8; 13] = codes
        .try_into()
        .map_err(|_| CliError::Usage("piece-code table needs 13 entries".into()))?;
    Ok(PieceCodes(table))
}

/// Writes `random-NNNNN.cwm` shards and `manifest.tsv`; returns the summary.
pub fn cmd_randgen(cfg: &GenConfig, out_dir: &Path, shard_size: usize, workers: usize) -> Result<String, CliError> {
    if shard_size == 0 {
        return Err(CliError::Usage("--shard-size must be positive".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let set = generate_test_set(cfg, workers)?;
    let flags = if cfg.ep == EpEncoding::Raw { FLAG_RAW_EP } else { 0 };
    let mut shards = 0;
    for (i, chunk) in set.trajectories.chunks(shard_size).enumerate() {
        let mut w = ShardWriter::create(&out_dir.join(format!("random-{i:05}.cwm")), flags)?;
        for t in chunk {
            w.push(t)?;
        }
        w.finish()?;
        shards += 1;
    }
    std::fs::write(out_dir.join("manifest.tsv"), set.manifest.to_text())?;
    let m = &set.manifest;
    Ok(format!(
        "master_seed\t{}\naccepted\t{}\nrejected\t{}\nacceptance_rate\t{:.6}\nshards\t{shards}\n",
        m.master_seed,
        m.accepted(),
        m.rejected(),
        m.acceptance_rate()
    ))
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error\tusage\t{first}");
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            let msg = e.to_string().replace(['\n', '\t'], " ");
            eprintln!("error\t{}\t{msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}
