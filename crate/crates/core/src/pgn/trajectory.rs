use crate::codec::{encode_move, encode_state, EpEncoding, MoveToken, StateLabels};
use crate::rules::{Move, Position};

use super::parser::{GameResult, RawGame};
use super::san::san_to_move;
use super::PgnError;

/// Aligned move tokens `x_0..x_T` (with `x_0 = START`) and states `s_0..s_T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub game_id: String,
    pub result: GameResult,
    pub move_tokens: Vec<MoveToken>,
    pub states: Vec<StateLabels>,
}

impl Trajectory {
    /// Starts a trajectory at the initial position.
    pub fn start(game_id: impl Into<String>, ep: EpEncoding) -> Trajectory {
        let s0 = encode_state(&Position::initial(), ep).expect("initial counters fit");
        Trajectory {
            game_id: game_id.into(),
            result: GameResult::Unknown,
            move_tokens: vec![MoveToken::START],
            states: vec![s0],
        }
    }

    /// Number of plies `T`.
    pub fn plies(&self) -> usize {
        self.move_tokens.len() - 1
    }

    pub fn timesteps(&self) -> usize {
        self.move_tokens.len()
    }

    /// Appends a move already applied to `after`.
    pub(crate) fn push(&mut self, m: Move, after: &Position, ep: EpEncoding) -> Result<(), crate::codec::CodecError> {
        let s = encode_state(after, ep)?;
        self.move_tokens.push(encode_move(m));
        self.states.push(s);
        Ok(())
    }

    /// Checks the alignment invariants that do not need a replay.
    pub fn check_shape(&self) -> Result<(), String> {
        if self.move_tokens.is_empty() || self.move_tokens.len() != self.states.len() {
            return Err(format!(
                "{} move tokens vs {} states",
                self.move_tokens.len(),
                self.states.len()
            ));
        }
        if self.move_tokens[0] != MoveToken::START {
            return Err("first token is not START".into());
        }
        if self.move_tokens[1..].iter().any(|t| t.is_special()) {
            return Err("special token after position 0".into());
        }
        Ok(())
    }
}

/// Replays a parsed game from the initial position.
pub fn build_trajectory(g: &RawGame, ep: EpEncoding) -> Result<Trajectory, PgnError> {
    let mut traj = Trajectory::start(g.game_id.clone(), ep);
    traj.result = g.result;
    traj.move_tokens.reserve(g.san_moves.len());
    traj.states.reserve(g.san_moves.len());
    let mut pos = Position::initial();
    for (i, san) in g.san_moves.iter().enumerate() {
        let illegal = |reason: String| PgnError::IllegalGame {
            index: g.index,
            ply: i + 1,
            san: san.clone(),
            reason,
        };
        let m = san_to_move(&pos, san).map_err(|e| illegal(e.to_string()))?;
        pos.play_unchecked(m);
        traj.push(m, &pos, ep).map_err(|e| illegal(e.to_string()))?;
    }
    Ok(traj)
}

/// At least `min_full_moves` completed full moves, i.e. `T >= 2 * min_full_moves`.
pub fn passes_length_filter_with(t: &Trajectory, min_full_moves: usize) -> bool {
    t.plies() >= 2 * min_full_moves
}

pub const DEFAULT_MIN_FULL_MOVES: usize = 10;

/// `T >= 20` plies.
pub fn passes_length_filter(t: &Trajectory) -> bool {
    passes_length_filter_with(t, DEFAULT_MIN_FULL_MOVES)
}
