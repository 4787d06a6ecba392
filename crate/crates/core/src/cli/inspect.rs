use std::io::{Read, Write};
use std::path::Path;

use crate::codec::{decode_move, decode_state, StateLabels, EP_FILE, EP_RANK, SIDE};
use crate::shardio::{read_predictions, read_shard_file, ShardError, FLAG_RAW_EP, PREDICTION_MAGIC, SHARD_MAGIC};

use super::CliError;

const SHOWN_MOVES: usize = 12;

pub(super) fn inspect(path: &Path, games: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let mut magic = [0u8; 4];
    std::fs::File::open(path)?
        .read_exact(&mut magic)
        .map_err(|_| ShardError::BadMagic([0; 4]))?;
    if &magic == SHARD_MAGIC {
        inspect_shard(path, games, out)
    } else if &magic == PREDICTION_MAGIC {
        inspect_predictions(path, games, out)
    } else {
        Err(ShardError::BadMagic(magic).into())
    }
}

fn inspect_shard(path: &Path, games: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let shard = read_shard_file(path)?;
    writeln!(out, "format\tshard")?;
    writeln!(out, "games\t{}", shard.trajectories.len())?;
    writeln!(out, "timesteps\t{}", shard.timesteps())?;
    let ep = if shard.flags & FLAG_RAW_EP != 0 { "raw" } else { "gated" };
    writeln!(out, "ep_encoding\t{ep}")?;
    for (i, t) in shard.trajectories.iter().take(games).enumerate() {
        writeln!(out)?;
        writeln!(out, "game\t{i}\t{}\t{}\t{} plies", t.game_id, t.result, t.plies())?;
        let moves: Vec<String> = t.move_tokens[1..]
            .iter()
            .take(SHOWN_MOVES)
            .map(|m| decode_move(*m).map_or_else(|_| "?".into(), |m| m.to_string()))
            .collect();
        let more = if t.plies() > SHOWN_MOVES { " ..." } else { "" };
        writeln!(out, "moves\t{}{more}", moves.join(" "))?;
        let last = t.states.last().expect("trajectories are never empty");
        write!(out, "{}", render_state(last))?;
    }
    Ok(())
}

fn render_state(s: &StateLabels) -> String {
    let aux = format!(
        "side {}  castling {}{}{}{}  ep {}/{}  halfmove {}  fullmove {}\n",
        if s.0[SIDE] == 0 { "w" } else { "b" },
        s.0[65],
        s.0[66],
        s.0[67],
        s.0[68],
        s.0[EP_FILE],
        s.0[EP_RANK],
        s.halfmove_clock(),
        s.fullmove_number()
    );
    match decode_state(s) {
        Ok(p) => p.render() + &aux,
        Err(e) => format!("(undecodable: {e})\n{aux}"),
    }
}

fn inspect_predictions(path: &Path, games: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let file = read_predictions(std::io::BufReader::new(std::fs::File::open(path)?))?;
    writeln!(out, "format\tpredictions")?;
    writeln!(out, "games\t{}", file.games.len())?;
    writeln!(
        out,
        "timesteps\t{}",
        file.games.iter().map(|g| g.timesteps()).sum::<usize>()
    )?;
    for (i, g) in file.games.iter().take(games).enumerate() {
        let worst = g.log_probs.iter().flatten().fold(0f32, |a, &b| a.min(b));
        writeln!(
            out,
            "game\t{i}\t{}\t{} timesteps\tmin log p {worst}",
            g.game_id,
            g.timesteps()
        )?;
    }
    Ok(())
}
