use std::io::{Read, Write};

use crate::codec::NUM_LABELS;

use super::{check_header, put_game_id, take_game_id, verify_trailer, CrcWriter, Cursor, ShardError, FORMAT_VERSION};

pub const PREDICTION_MAGIC: &[u8; 4] = b"CWMP";

/// Model output for one game: per timestep, the predicted label and the
/// log-probability the model assigned to the true label.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GamePredictions {
    pub game_id: String,
    pub labels: Vec<[u8; NUM_LABELS]>,
    pub log_probs: Vec<[f32; NUM_LABELS]>,
}

impl GamePredictions {
    pub fn timesteps(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PredictionFile {
    pub games: Vec<GamePredictions>,
}

pub fn write_predictions<W: Write>(w: W, file: &PredictionFile) -> Result<u64, ShardError> {
    let count = u32::try_from(file.games.len()).map_err(|_| ShardError::Unwritable("too many games".into()))?;
    let mut w = CrcWriter::new(w);
    w.put(PREDICTION_MAGIC)?;
    w.put(&FORMAT_VERSION.to_le_bytes())?;
    w.put(&count.to_le_bytes())?;
    let mut row = Vec::with_capacity(NUM_LABELS * 5);
    for g in &file.games {
        if g.labels.is_empty() || g.labels.len() != g.log_probs.len() {
            return Err(ShardError::Unwritable(format!(
                "{}: {} label rows, {} log-prob rows",
                g.game_id,
                g.labels.len(),
                g.log_probs.len()
            )));
        }
        let plies = u16::try_from(g.labels.len() - 1)
            .map_err(|_| ShardError::Unwritable(format!("{}: too many timesteps", g.game_id)))?;
        put_game_id(&mut w, &g.game_id)?;
        w.put(&plies.to_le_bytes())?;
        for (labels, lps) in g.labels.iter().zip(&g.log_probs) {
            row.clear();
            row.extend_from_slice(labels);
            row.extend(lps.iter().flat_map(|x| x.to_le_bytes()));
            w.put(&row)?;
        }
    }
    Ok(w.finish()?)
}

const ROW: usize = NUM_LABELS * 5;

fn walk(body: &[u8]) -> Result<(), ShardError> {
    let mut c = Cursor::new(body);
    c.take(6)?;
    let count = c.u32()?;
    for _ in 0..count {
        let len = c.u8()? as usize;
        c.take(len)?;
        let steps = c.u16()? as usize + 1;
        c.take(steps * ROW)?;
    }
    Ok(())
}

pub fn read_predictions<R: Read>(mut r: R) -> Result<PredictionFile, ShardError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    check_header(&mut Cursor::new(&bytes), PREDICTION_MAGIC)?;
    let body = verify_trailer(&bytes, walk)?;
    let mut c = Cursor::new(body);
    c.take(6)?;
    let count = c.u32()? as usize;
    let mut games = Vec::with_capacity(count.min(1 << 20));
    for game in 0..count {
        let game_id = take_game_id(&mut c, game)?;
        let steps = c.u16()? as usize + 1;
        let mut g = GamePredictions {
            game_id,
            labels: Vec::with_capacity(steps),
            log_probs: Vec::with_capacity(steps),
        };
        for row in c.take(steps * ROW)?.chunks_exact(ROW) {
            let (labels, lps) = row.split_at(NUM_LABELS);
            g.labels.push(labels.try_into().unwrap());
            let mut out = [0f32; NUM_LABELS];
            for (o, b) in out.iter_mut().zip(lps.chunks_exact(4)) {
                *o = f32::from_le_bytes(b.try_into().unwrap());
            }
            g.log_probs.push(out);
        }
        games.push(g);
    }
    if c.pos() != body.len() {
        return Err(ShardError::InvalidRecord {
            game: count,
            reason: format!("{} trailing bytes", body.len() - c.pos()),
        });
    }
    Ok(PredictionFile { games })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PredictionFile {
        let g = |id: &str, t: usize| GamePredictions {
            game_id: id.into(),
            labels: (0..=t).map(|i| [i as u8; NUM_LABELS]).collect(),
            log_probs: (0..=t).map(|i| [-(i as f32) * 0.25; NUM_LABELS]).collect(),
        };
        PredictionFile {
            games: vec![g("a", 3), g("bb", 0)],
        }
    }

    #[test]
    fn round_trip_and_size() {
        let f = sample();
        let mut buf = Vec::new();
        let n = write_predictions(&mut buf, &f).unwrap();
        assert_eq!(n as usize, buf.len());
        assert_eq!(buf.len(), 10 + (1 + 1 + 2 + 4 * ROW) + (1 + 2 + 2 + ROW) + 4);
        assert_eq!(read_predictions(&buf[..]).unwrap(), f);
    }

    #[test]
    fn corruption_detected() {
        let mut buf = Vec::new();
        write_predictions(&mut buf, &sample()).unwrap();
        let mut flipped = buf.clone();
        flipped[40] ^= 0x80;
        assert!(matches!(
            read_predictions(&flipped[..]),
            Err(ShardError::ChecksumMismatch { .. })
        ));
        assert!(matches!(
            read_predictions(&buf[..50]),
            Err(ShardError::TruncatedRecord(_))
        ));
        assert!(matches!(
            read_predictions(&b"CWM1\x01\x00"[..]),
            Err(ShardError::BadMagic(_))
        ));
    }

    #[test]
    fn mismatched_rows_unwritable() {
        let mut f = sample();
        f.games[0].log_probs.pop();
        assert!(matches!(
            write_predictions(Vec::new(), &f),
            Err(ShardError::Unwritable(_))
        ));
    }
}
