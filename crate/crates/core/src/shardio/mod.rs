//! Binary containers: trajectory shards (`CWM1`) and prediction files
//! (`CWMP`). Both end in a CRC-32 of every preceding byte. Layouts are
//! documented in `docs/formats.md`.

mod predictions;
mod shard;

pub use predictions::{read_predictions, write_predictions, GamePredictions, PredictionFile, PREDICTION_MAGIC};
pub use shard::{
    read_shard, read_shard_file, shard_size_bytes, write_shard, write_shard_file, Shard, ShardWriter, FLAG_RAW_EP,
    SHARD_MAGIC,
};

pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ShardError {
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    BadVersion(u16),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("truncated record at byte {0}")]
    TruncatedRecord(usize),
    #[error("invalid record {game}: {reason}")]
    InvalidRecord { game: usize, reason: String },
    #[error("cannot write {0}")]
    Unwritable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Little-endian cursor over a byte slice that reports truncation offsets.
pub(crate) struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Cursor { buf, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], ShardError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(ShardError::TruncatedRecord(self.pos)),
        }
    }

    pub fn u8(&mut self) -> Result<u8, ShardError> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16, ShardError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32, ShardError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Splits off and verifies the CRC trailer. `walk` re-parses the body
/// structurally so that a short file reports truncation rather than a
/// checksum failure.
pub(crate) fn verify_trailer(
    bytes: &[u8],
    walk: impl Fn(&[u8]) -> Result<(), ShardError>,
) -> Result<&[u8], ShardError> {
    if bytes.len() < 4 {
        return Err(ShardError::TruncatedRecord(bytes.len()));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(trailer.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        if let Err(e @ ShardError::TruncatedRecord(_)) = walk(body) {
            return Err(e);
        }
        return Err(ShardError::ChecksumMismatch { stored, computed });
    }
    Ok(body)
}

pub(crate) fn check_header(c: &mut Cursor<'_>, magic: &[u8; 4]) -> Result<(), ShardError> {
    let got: [u8; 4] = c.take(4).map_err(|_| ShardError::BadMagic([0; 4]))?.try_into().unwrap();
    if &got != magic {
        return Err(ShardError::BadMagic(got));
    }
    let version = c.u16()?;
    if version != FORMAT_VERSION {
        return Err(ShardError::BadVersion(version));
    }
    Ok(())
}

/// A writer that accumulates the CRC of everything written through it.
pub(crate) struct CrcWriter<W> {
    inner: W,
    hasher: crc32fast::Hasher,
    written: u64,
}

impl<W: std::io::Write> CrcWriter<W> {
    pub fn new(inner: W) -> Self {
        CrcWriter {
            inner,
            hasher: crc32fast::Hasher::new(),
            written: 0,
        }
    }

    pub fn put(&mut self, bytes: &[u8]) -> std::io::Result<()> {
        self.hasher.update(bytes);
        self.written += bytes.len() as u64;
        self.inner.write_all(bytes)
    }

    /// Writes the trailer and returns the total byte count.
    pub fn finish(mut self) -> std::io::Result<u64> {
        let crc = self.hasher.clone().finalize();
        self.inner.write_all(&crc.to_le_bytes())?;
        self.inner.flush()?;
        Ok(self.written + 4)
    }
}

pub(crate) fn put_game_id(w: &mut CrcWriter<impl std::io::Write>, id: &str) -> Result<(), ShardError> {
    let len =
        u8::try_from(id.len()).map_err(|_| ShardError::Unwritable(format!("game id longer than 255 bytes: {id:?}")))?;
    w.put(&[len])?;
    w.put(id.as_bytes())?;
    Ok(())
}

pub(crate) fn take_game_id(c: &mut Cursor<'_>, game: usize) -> Result<String, ShardError> {
    let len = c.u8()? as usize;
    let bytes = c.take(len)?;
    String::from_utf8(bytes.to_vec()).map_err(|_| ShardError::InvalidRecord {
        game,
        reason: "game id is not UTF-8".into(),
    })
}
