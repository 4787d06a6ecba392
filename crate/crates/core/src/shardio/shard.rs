use std::fs::File;
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::codec::{MoveToken, StateLabels, NUM_LABELS};
use crate::pgn::{GameResult, Trajectory};

use super::{check_header, take_game_id, verify_trailer, CrcWriter, Cursor, ShardError, FORMAT_VERSION};

pub const SHARD_MAGIC: &[u8; 4] = b"CWM1";
/// Header flag: en passant labels use raw encoding instead of legality-gated.
pub const FLAG_RAW_EP: u16 = 1;

const HEADER_LEN: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Shard {
    pub flags: u16,
    pub trajectories: Vec<Trajectory>,
}

impl Shard {
    pub fn timesteps(&self) -> usize {
        self.trajectories.iter().map(Trajectory::timesteps).sum()
    }
}

/// Exact file size for the given trajectories.
pub fn shard_size_bytes(trajectories: &[Trajectory]) -> u64 {
    let records: u64 = trajectories
        .iter()
        .map(|t| (1 + t.game_id.len() + 1 + 2 + t.timesteps() * (2 + NUM_LABELS)) as u64)
        .sum();
    HEADER_LEN as u64 + records + 4
}

fn encode_record(t: &Trajectory, out: &mut Vec<u8>) -> Result<(), ShardError> {
    t.check_shape().map_err(ShardError::Unwritable)?;
    let plies =
        u16::try_from(t.plies()).map_err(|_| ShardError::Unwritable(format!("{}: {} plies", t.game_id, t.plies())))?;
    let id_len = u8::try_from(t.game_id.len())
        .map_err(|_| ShardError::Unwritable(format!("game id longer than 255 bytes: {:?}", t.game_id)))?;
    out.push(id_len);
    out.extend_from_slice(t.game_id.as_bytes());
    out.push(t.result.code());
    out.extend_from_slice(&plies.to_le_bytes());
    out.extend(t.move_tokens.iter().flat_map(|m| m.id().to_le_bytes()));
    out.extend(t.states.iter().flat_map(|s| s.0));
    Ok(())
}

fn header(count: u32, flags: u16) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[..4].copy_from_slice(SHARD_MAGIC);
    h[4..6].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
    h[6..10].copy_from_slice(&count.to_le_bytes());
    h[10..12].copy_from_slice(&flags.to_le_bytes());
    h
}

pub fn write_shard<W: Write>(w: W, trajectories: &[Trajectory], flags: u16) -> Result<u64, ShardError> {
    let count = u32::try_from(trajectories.len()).map_err(|_| ShardError::Unwritable("too many games".into()))?;
    let mut w = CrcWriter::new(w);
    w.put(&header(count, flags))?;
    let mut rec = Vec::new();
    for t in trajectories {
        rec.clear();
        encode_record(t, &mut rec)?;
        w.put(&rec)?;
    }
    Ok(w.finish()?)
}

/// Incremental shard writer for sets too large to hold in memory.
///
/// Records stream to `<path>.partial`; `finish` fills in the header, appends
/// the trailer and renames the file into place. The bytes are identical to
/// [`write_shard`] over the same trajectories.
pub struct ShardWriter {
    path: PathBuf,
    partial: PathBuf,
    file: BufWriter<File>,
    records: crc32fast::Hasher,
    count: u32,
    flags: u16,
    buf: Vec<u8>,
}

impl ShardWriter {
    pub fn create(path: &Path, flags: u16) -> Result<ShardWriter, ShardError> {
        let mut partial = path.as_os_str().to_owned();
        partial.push(".partial");
        let partial = PathBuf::from(partial);
        let mut file = BufWriter::new(File::create(&partial)?);
        file.write_all(&[0u8; HEADER_LEN])?;
        Ok(ShardWriter {
            path: path.to_path_buf(),
            partial,
            file,
            records: crc32fast::Hasher::new(),
            count: 0,
            flags,
            buf: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.count as usize
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn push(&mut self, t: &Trajectory) -> Result<(), ShardError> {
        self.buf.clear();
        encode_record(t, &mut self.buf)?;
        self.count = self
            .count
            .checked_add(1)
            .ok_or_else(|| ShardError::Unwritable("too many games".into()))?;
        self.records.update(&self.buf);
        self.file.write_all(&self.buf)?;
        Ok(())
    }

    /// Returns the final path and size in bytes.
    pub fn finish(self) -> Result<(PathBuf, u64), ShardError> {
        let head = header(self.count, self.flags);
        let mut crc = crc32fast::Hasher::new();
        crc.update(&head);
        crc.combine(&self.records);
        let mut file = self.file.into_inner().map_err(|e| ShardError::Io(e.into_error()))?;
        file.write_all(&crc.finalize().to_le_bytes())?;
        file.seek(SeekFrom::Start(0))?;
        file.write_all(&head)?;
        file.sync_all()?;
        let size = file.metadata()?.len();
        drop(file);
        std::fs::rename(&self.partial, &self.path)?;
        Ok((self.path, size))
    }
}

pub fn write_shard_file(path: &Path, trajectories: &[Trajectory], flags: u16) -> Result<u64, ShardError> {
    let f = File::create(path)?;
    write_shard(BufWriter::new(f), trajectories, flags)
}

pub fn read_shard<R: Read>(mut r: R) -> Result<Shard, ShardError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_shard(&bytes)
}

pub fn read_shard_file(path: &Path) -> Result<Shard, ShardError> {
    parse_shard(&std::fs::read(path)?)
}

fn walk(body: &[u8]) -> Result<(), ShardError> {
    let mut c = Cursor::new(body);
    c.take(6)?;
    let count = c.u32()?;
    c.u16()?;
    for _ in 0..count {
        let len = c.u8()? as usize;
        c.take(len + 1)?;
        let steps = c.u16()? as usize + 1;
        c.take(steps * (2 + NUM_LABELS))?;
    }
    Ok(())
}

fn parse_shard(bytes: &[u8]) -> Result<Shard, ShardError> {
    check_header(&mut Cursor::new(bytes), SHARD_MAGIC)?;
    let body = verify_trailer(bytes, walk)?;
    let mut c = Cursor::new(body);
    c.take(6)?;
    let count = c.u32()? as usize;
    let flags = c.u16()?;
    let mut trajectories = Vec::with_capacity(count.min(1 << 20));
    for game in 0..count {
        let invalid = |reason: String| ShardError::InvalidRecord { game, reason };
        let game_id = take_game_id(&mut c, game)?;
        let code = c.u8()?;
        let result = GameResult::from_code(code).ok_or_else(|| invalid(format!("result code {code}")))?;
        let steps = c.u16()? as usize + 1;
        let token_bytes = c.take(steps * 2)?;
        let move_tokens = token_bytes
            .chunks_exact(2)
            .map(|b| MoveToken::new(u16::from_le_bytes([b[0], b[1]])))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(e.to_string()))?;
        let states = c
            .take(steps * NUM_LABELS)?
            .chunks_exact(NUM_LABELS)
            .map(|row| StateLabels::from_bytes(row.try_into().unwrap()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(e.to_string()))?;
        let t = Trajectory {
            game_id,
            result,
            move_tokens,
            states,
        };
        t.check_shape().map_err(invalid)?;
        trajectories.push(t);
    }
    if c.pos() != body.len() {
        return Err(ShardError::InvalidRecord {
            game: count,
            reason: format!("{} trailing bytes", body.len() - c.pos()),
        });
    }
    Ok(Shard { flags, trajectories })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::EpEncoding;
    use crate::randgen::generate_random_game;

    fn sample(n: u64) -> Vec<Trajectory> {
        (0..n).map(|s| generate_random_game(s).unwrap().trajectory).collect()
    }

    fn bytes(trajs: &[Trajectory]) -> Vec<u8> {
        let mut buf = Vec::new();
        write_shard(&mut buf, trajs, 0).unwrap();
        buf
    }

    #[test]
    fn round_trip() {
        let trajs = sample(20);
        let buf = bytes(&trajs);
        assert_eq!(buf.len() as u64, shard_size_bytes(&trajs));
        let shard = read_shard(&buf[..]).unwrap();
        assert_eq!(shard.trajectories, trajs);
        assert_eq!(shard.flags, 0);
    }

    #[test]
    fn empty_shard() {
        let buf = bytes(&[]);
        assert_eq!(buf.len(), 16);
        assert_eq!(&buf[..4], b"CWM1");
        let shard = read_shard(&buf[..]).unwrap();
        assert!(shard.trajectories.is_empty());
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_shard(&mut buf, &sample(3), FLAG_RAW_EP).unwrap();
        assert_eq!(&buf[4..6], &[1, 0]);
        assert_eq!(&buf[6..10], &[3, 0, 0, 0]);
        assert_eq!(&buf[10..12], &[1, 0]);
        // first record: id "uniform-0"
        assert_eq!(buf[12], 9);
        assert_eq!(&buf[13..22], b"uniform-0");
        // result byte at 22, T at 23..25, then the START token
        assert_eq!(&buf[25..27], &20480u16.to_le_bytes());
    }

    #[test]
    fn flipped_byte_fails_checksum() {
        let trajs = sample(3);
        let mut buf = bytes(&trajs);
        let last_state_byte = buf.len() - 10;
        buf[last_state_byte] ^= 0x01;
        assert!(matches!(read_shard(&buf[..]), Err(ShardError::ChecksumMismatch { .. })));
    }

    #[test]
    fn bad_magic_and_version() {
        let mut buf = bytes(&sample(1));
        buf[0] = b'X';
        assert!(matches!(read_shard(&buf[..]), Err(ShardError::BadMagic(_))));
        let mut buf = bytes(&sample(1));
        buf[4] = 9;
        assert!(matches!(read_shard(&buf[..]), Err(ShardError::BadVersion(9))));
    }

    #[test]
    fn truncation_detected() {
        let buf = bytes(&sample(2));
        let cut = &buf[..buf.len() - 100];
        assert!(matches!(read_shard(cut), Err(ShardError::TruncatedRecord(_))));
        assert!(matches!(read_shard(&buf[..3]), Err(ShardError::BadMagic(_))));
    }

    #[test]
    fn incremental_writer_matches_batch_writer() {
        let dir = tempfile::tempdir().unwrap();
        let trajs = sample(7);
        let path = dir.path().join("a.cwm");
        let mut w = ShardWriter::create(&path, FLAG_RAW_EP).unwrap();
        for t in &trajs {
            w.push(t).unwrap();
        }
        assert_eq!(w.len(), 7);
        let (p, size) = w.finish().unwrap();
        let mut expected = Vec::new();
        write_shard(&mut expected, &trajs, FLAG_RAW_EP).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), expected);
        assert_eq!(size, expected.len() as u64);
        assert!(!dir.path().join("a.cwm.partial").exists());
    }

    #[test]
    fn id_too_long_is_unwritable() {
        let mut t = Trajectory::start("x".repeat(256), EpEncoding::LegalityGated);
        t.game_id = "y".repeat(300);
        assert!(matches!(
            write_shard(Vec::new(), &[t], 0),
            Err(ShardError::Unwritable(_))
        ));
    }
}
