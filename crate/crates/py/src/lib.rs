//! Python bindings. Module name: `chesswm`.
//!
//! Moves cross the boundary as UCI strings or packed ids, state labels as
//! lists of 75 ints. Errors surface as `ValueError` (bad input) or `OSError`.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict, PyList};

use cwm_core::codec::{self, EpEncoding, MoveToken, StateLabels, NUM_LABELS};
use cwm_core::evalkit::{self, MetricReport};
use cwm_core::pgn::{self, GameResult};
use cwm_core::randgen::{self, GenConfig};
use cwm_core::rules::{self, Move};
use cwm_core::shardio::{self, GamePredictions, PredictionFile, ShardError, FLAG_RAW_EP};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn shard_err(e: ShardError) -> PyErr {
    match e {
        ShardError::Io(e) => PyOSError::new_err(e.to_string()),
        other => value_err(other),
    }
}

fn ep_mode(raw_ep: bool) -> EpEncoding {
    if raw_ep {
        EpEncoding::Raw
    } else {
        EpEncoding::LegalityGated
    }
}

fn labels_from(v: Vec<u8>) -> PyResult<StateLabels> {
    let arr: [u8; NUM_LABELS] = v
        .try_into()
        .map_err(|v: Vec<u8>| value_err(format!("expected {NUM_LABELS} labels, got {}", v.len())))?;
    StateLabels::from_bytes(arr).map_err(value_err)
}

#[pyclass(name = "Position", module = "chesswm", skip_from_py_object)]
#[derive(Clone)]
struct PyPosition(rules::Position);

#[pymethods]
impl PyPosition {
    #[new]
    #[pyo3(signature = (fen=None))]
    fn new(fen: Option<&str>) -> PyResult<Self> {
        match fen {
            None => Ok(PyPosition(rules::Position::initial())),
            Some(f) => rules::Position::from_fen(f).map(PyPosition).map_err(value_err),
        }
    }

    /// Rebuilds a position from 75 state labels.
    #[staticmethod]
    fn from_labels(labels: Vec<u8>) -> PyResult<Self> {
        codec::decode_state(&labels_from(labels)?)
            .map(PyPosition)
            .map_err(value_err)
    }

    fn fen(&self) -> String {
        self.0.fen()
    }

    /// Legal moves in UCI, ordered by packed id.
    fn legal_moves(&self) -> Vec<String> {
        self.0.legal_moves().into_iter().map(Move::uci).collect()
    }

    fn push_uci(&mut self, uci: &str) -> PyResult<()> {
        let m: Move = uci.parse().map_err(value_err)?;
        self.0.play(m).map_err(value_err)
    }

    fn push_san(&mut self, san: &str) -> PyResult<String> {
        let m = pgn::san_to_move(&self.0, san).map_err(value_err)?;
        self.0.play(m).map_err(value_err)?;
        Ok(m.uci())
    }

    fn perft(&self, py: Python<'_>, depth: u32) -> u64 {
        py.detach(|| self.0.perft(depth))
    }

    #[pyo3(signature = (raw_ep=false))]
    fn labels<'py>(&self, py: Python<'py>, raw_ep: bool) -> PyResult<Bound<'py, PyList>> {
        let s = codec::encode_state(&self.0, ep_mode(raw_ep)).map_err(value_err)?;
        PyList::new(py, s.0)
    }

    /// One of "ongoing", "checkmate", "stalemate", "insufficient_material", ...
    fn termination(&self) -> &'static str {
        self.0.termination_status().as_str()
    }

    fn is_over(&self) -> bool {
        self.0.termination_status().is_over()
    }

    fn in_check(&self) -> bool {
        self.0.in_check()
    }

    #[getter]
    fn turn(&self) -> &'static str {
        match self.0.side_to_move() {
            rules::Color::White => "white",
            rules::Color::Black => "black",
        }
    }

    fn __str__(&self) -> String {
        self.0.render()
    }

    fn __repr__(&self) -> String {
        format!("Position('{}')", self.0.fen())
    }

    fn __eq__(&self, other: &PyPosition) -> bool {
        self.0.fen() == other.0.fen()
    }
}

/// A game as move tokens (START first) and T+1 state label rows.
#[pyclass(name = "Trajectory", module = "chesswm", from_py_object)]
#[derive(Clone)]
struct PyTrajectory(pgn::Trajectory);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn game_id(&self) -> &str {
        &self.0.game_id
    }

    #[getter]
    fn result(&self) -> &'static str {
        self.0.result.as_str()
    }

    #[getter]
    fn plies(&self) -> usize {
        self.0.plies()
    }

    #[getter]
    fn tokens(&self) -> Vec<u16> {
        self.0.move_tokens.iter().map(|t| t.id()).collect()
    }

    #[getter]
    fn states<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyList>>> {
        self.0.states.iter().map(|s| PyList::new(py, s.0)).collect()
    }

    /// States as one row-major `(T+1) * 75` byte string.
    fn states_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        let flat: Vec<u8> = self.0.states.iter().flat_map(|s| s.0).collect();
        PyBytes::new(py, &flat)
    }

    fn __len__(&self) -> usize {
        self.0.timesteps()
    }

    fn __repr__(&self) -> String {
        format!(
            "Trajectory('{}', plies={}, result='{}')",
            self.0.game_id,
            self.0.plies(),
            self.0.result.as_str()
        )
    }
}

#[pyfunction]
fn encode_move(uci: &str) -> PyResult<u16> {
    let m: Move = uci.parse().map_err(value_err)?;
    Ok(codec::encode_move(m).id())
}

/// UCI text for a packed id. Geometrically impossible moves still decode.
#[pyfunction]
fn decode_move(id: u16) -> PyResult<String> {
    let t = MoveToken::new(id).map_err(value_err)?;
    codec::decode_move(t).map(|m| m.to_string()).map_err(value_err)
}

#[pyfunction]
fn possible_move_ids() -> Vec<u16> {
    codec::enumerate_possible_moves()
        .into_iter()
        .map(MoveToken::id)
        .collect()
}

#[pyfunction]
fn split_of(game_id: &str) -> &'static str {
    pgn::split_of(game_id).as_str()
}

#[pyfunction]
fn split_residue(game_id: &str) -> u16 {
    pgn::split_residue(game_id)
}

#[pyfunction]
fn random_game(seed: u64) -> PyResult<(PyTrajectory, &'static str)> {
    let g = randgen::generate_random_game(seed).map_err(value_err)?;
    Ok((PyTrajectory(g.trajectory), g.termination.as_str()))
}

/// The accepted games for `master_seed, master_seed + 1, ...`.
#[pyfunction]
#[pyo3(signature = (master_seed, games, workers=1))]
fn random_test_set(py: Python<'_>, master_seed: u64, games: usize, workers: usize) -> PyResult<Vec<PyTrajectory>> {
    let set = py
        .detach(|| randgen::generate_test_set(&GenConfig::new(master_seed, games), workers))
        .map_err(value_err)?;
    Ok(set.trajectories.into_iter().map(PyTrajectory).collect())
}

/// Parses PGN text into trajectories. Returns `(kept, skipped)` where
/// skipped counts malformed and illegal games; no length filter is applied.
#[pyfunction]
#[pyo3(signature = (text, raw_ep=false))]
fn parse_pgn(text: &str, raw_ep: bool) -> PyResult<(Vec<PyTrajectory>, usize)> {
    let mut kept = Vec::new();
    let mut skipped = 0;
    for item in pgn::parse_pgn_stream(text.as_bytes()) {
        match item {
            Ok(g) => match pgn::build_trajectory(&g, ep_mode(raw_ep)) {
                Ok(t) => kept.push(PyTrajectory(t)),
                Err(_) => skipped += 1,
            },
            Err(e) if e.is_per_game() => skipped += 1,
            Err(e) => return Err(value_err(e)),
        }
    }
    Ok((kept, skipped))
}

#[pyfunction]
fn passes_length_filter(t: &PyTrajectory) -> bool {
    pgn::passes_length_filter(&t.0)
}

#[pyfunction]
fn read_shard(path: PathBuf) -> PyResult<Vec<PyTrajectory>> {
    let shard = shardio::read_shard_file(&path).map_err(shard_err)?;
    Ok(shard.trajectories.into_iter().map(PyTrajectory).collect())
}

#[pyfunction]
#[pyo3(signature = (path, trajectories, raw_ep=false))]
fn write_shard(path: PathBuf, trajectories: Vec<PyTrajectory>, raw_ep: bool) -> PyResult<u64> {
    let ts: Vec<_> = trajectories.into_iter().map(|t| t.0).collect();
    let flags = if raw_ep { FLAG_RAW_EP } else { 0 };
    shardio::write_shard_file(&path, &ts, flags).map_err(shard_err)
}

/// `(game_id, label rows, log-prob rows)` as passed from Python.
type GameRows = (String, Vec<Vec<u8>>, Vec<Vec<f32>>);

/// Writes a prediction file. Each game is `(game_id, labels, log_probs)`
/// with one 75-wide row per timestep in both tables.
#[pyfunction]
fn write_predictions(path: PathBuf, games: Vec<GameRows>) -> PyResult<()> {
    let mut out = Vec::with_capacity(games.len());
    for (game_id, labels, log_probs) in games {
        let labels = labels
            .into_iter()
            .map(|row| <[u8; NUM_LABELS]>::try_from(row).map_err(|_| value_err("label rows must have 75 entries")))
            .collect::<PyResult<_>>()?;
        let log_probs = log_probs
            .into_iter()
            .map(|row| <[f32; NUM_LABELS]>::try_from(row).map_err(|_| value_err("log-prob rows must have 75 entries")))
            .collect::<PyResult<_>>()?;
        out.push(GamePredictions {
            game_id,
            labels,
            log_probs,
        });
    }
    let file = std::fs::File::create(&path).map_err(|e| PyOSError::new_err(e.to_string()))?;
    shardio::write_predictions(std::io::BufWriter::new(file), &PredictionFile { games: out })
        .map(|_| ())
        .map_err(shard_err)
}

/// Writes a reference predictor's output for `shard_path`: "oracle",
/// "lag" (with `k`) or "amnesiac".
#[pyfunction]
#[pyo3(signature = (shard_path, out_path, predictor="oracle", k=1))]
fn reference_predictions(shard_path: PathBuf, out_path: PathBuf, predictor: &str, k: usize) -> PyResult<()> {
    let shard = shardio::read_shard_file(&shard_path).map_err(shard_err)?;
    let preds = match predictor {
        "oracle" => evalkit::oracle_predict(&shard),
        "lag" if k > 0 => evalkit::lagk_predict(&shard, k),
        "amnesiac" => evalkit::amnesiac_predict(&shard),
        _ => return Err(value_err(format!("unknown predictor {predictor} (k={k})"))),
    };
    let file = std::fs::File::create(&out_path).map_err(|e| PyOSError::new_err(e.to_string()))?;
    shardio::write_predictions(std::io::BufWriter::new(file), &preds)
        .map(|_| ())
        .map_err(shard_err)
}

fn report_dict<'py>(py: Python<'py>, r: &MetricReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("games", r.games)?;
    d.set_item("timesteps", r.timesteps)?;
    d.set_item("exact_timesteps", r.exact_timesteps)?;
    d.set_item("exact_games", r.exact_games)?;
    d.set_item("correct_labels", r.correct_labels)?;
    d.set_item("exact_state_rate", r.exact_state_rate())?;
    d.set_item("labelwise_accuracy", r.labelwise_accuracy())?;
    d.set_item("trajectory_exact_rate", r.trajectory_exact_rate())?;
    d.set_item("cross_entropy", r.cross_entropy())?;
    d.set_item("cross_entropy_macro", r.cross_entropy_macro)?;
    let bins: Vec<(u64, u64, u64, u64)> = r
        .bins
        .iter()
        .map(|b| (b.start as u64, b.timesteps, b.exact, b.correct_labels))
        .collect();
    d.set_item("bins", bins)?;
    d.set_item("warnings", r.warnings.clone())?;
    Ok(d)
}

/// Scores a prediction file against a shard and returns the metrics dict.
#[pyfunction]
fn evaluate<'py>(py: Python<'py>, shard_path: PathBuf, predictions_path: PathBuf) -> PyResult<Bound<'py, PyDict>> {
    let report = py.detach(|| -> PyResult<MetricReport> {
        let shard = shardio::read_shard_file(&shard_path).map_err(shard_err)?;
        let file = std::fs::File::open(&predictions_path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        let preds = shardio::read_predictions(std::io::BufReader::new(file)).map_err(shard_err)?;
        evalkit::evaluate(&shard, &preds).map_err(value_err)
    })?;
    report_dict(py, &report)
}

#[pyfunction]
fn result_code(result: &str) -> PyResult<u8> {
    GameResult::from_token(result)
        .map(GameResult::code)
        .ok_or_else(|| value_err(format!("unknown result {result}")))
}

#[pymodule]
fn chesswm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPosition>()?;
    m.add_class::<PyTrajectory>()?;
    m.add("NUM_LABELS", NUM_LABELS)?;
    m.add("START_TOKEN", codec::START_TOKEN)?;
    m.add("PAD_TOKEN", codec::PAD_TOKEN)?;
    m.add("STARTING_FEN", rules::STARTING_FEN)?;
    m.add_function(wrap_pyfunction!(encode_move, m)?)?;
    m.add_function(wrap_pyfunction!(decode_move, m)?)?;
    m.add_function(wrap_pyfunction!(possible_move_ids, m)?)?;
    m.add_function(wrap_pyfunction!(split_of, m)?)?;
    m.add_function(wrap_pyfunction!(split_residue, m)?)?;
    m.add_function(wrap_pyfunction!(random_game, m)?)?;
    m.add_function(wrap_pyfunction!(random_test_set, m)?)?;
    m.add_function(wrap_pyfunction!(parse_pgn, m)?)?;
    m.add_function(wrap_pyfunction!(passes_length_filter, m)?)?;
    m.add_function(wrap_pyfunction!(read_shard, m)?)?;
    m.add_function(wrap_pyfunction!(write_shard, m)?)?;
    m.add_function(wrap_pyfunction!(write_predictions, m)?)?;
    m.add_function(wrap_pyfunction!(reference_predictions, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(result_code, m)?)?;
    Ok(())
}
