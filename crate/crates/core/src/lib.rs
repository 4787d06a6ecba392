pub mod cli;
pub mod codec;
pub mod evalkit;
pub mod pgn;
pub mod randgen;
pub mod rules;
pub mod shardio;
