use md5::{Digest, Md5};

pub const SPLIT_MODULUS: u128 = 10_000;
pub const VALIDATION_THRESHOLD: u16 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Validation,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
        }
    }
}

/// MD5 of the UTF-8 id, read as a big-endian 128-bit integer, mod 10,000.
pub fn split_residue(game_id: &str) -> u16 {
    let digest: [u8; 16] = Md5::digest(game_id.as_bytes()).into();
    (u128::from_be_bytes(digest) % SPLIT_MODULUS) as u16
}

/// Validation iff the residue is below 50 (about 0.5% of ids).
pub fn split_of(game_id: &str) -> Split {
    if split_residue(game_id) < VALIDATION_THRESHOLD {
        Split::Validation
    } else {
        Split::Train
    }
}
