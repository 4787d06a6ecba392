//! Exactness metrics over (shard, predictions) pairs, plus reference
//! predictors that exercise the metric stack without a model.
//!
//! Rates are kept as exact integer counters and only divided when read.
//! Cross-entropy sums are accumulated per game with compensated summation
//! and reduced over games in sorted order, so the result does not depend on
//! game order or worker scheduling.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::codec::{StateLabels, NUM_LABELS, SIDE};
use crate::pgn::Trajectory;
use crate::shardio::{GamePredictions, PredictionFile, Shard};

pub const BIN_WIDTH: usize = 20;
/// Log-probability written by constructed predictors for a wrong label.
pub const LOG_PROB_FLOOR: f32 = -30.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("predictions do not match shard: {0}")]
    Mismatch(String),
    #[error("game {game_id} t={t} label {label}: log-probability {value} is not <= 0")]
    BadLogProb {
        game_id: String,
        t: usize,
        label: usize,
        value: f32,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BinStats {
    pub start: usize,
    pub timesteps: u64,
    pub exact: u64,
    pub correct_labels: u64,
}

impl BinStats {
    pub fn exact_rate(&self) -> f64 {
        ratio(self.exact, self.timesteps)
    }

    pub fn labelwise(&self) -> f64 {
        ratio(self.correct_labels, self.timesteps * NUM_LABELS as u64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub games: u64,
    pub timesteps: u64,
    pub exact_timesteps: u64,
    pub correct_labels: u64,
    pub exact_games: u64,
    /// Sum of -log p over every (timestep, label) pair.
    pub nll_sum: f64,
    /// Mean over games of each game's per-target mean -log p.
    pub cross_entropy_macro: f64,
    pub bins: Vec<BinStats>,
    pub warnings: Vec<String>,
}

/// Empty denominators yield 1.0 (vacuous truth).
fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

impl MetricReport {
    pub fn exact_state_rate(&self) -> f64 {
        ratio(self.exact_timesteps, self.timesteps)
    }

    pub fn labelwise_accuracy(&self) -> f64 {
        ratio(self.correct_labels, self.timesteps * NUM_LABELS as u64)
    }

    pub fn trajectory_exact_rate(&self) -> f64 {
        ratio(self.exact_games, self.games)
    }

    /// Micro-averaged: every (timestep, label) pair of every game weighs the same.
    pub fn cross_entropy(&self) -> f64 {
        if self.timesteps == 0 {
            return 0.0;
        }
        self.nll_sum / (self.timesteps * NUM_LABELS as u64) as f64
    }

    /// Exact-state rate rebuilt from the bins.
    pub fn recombined_exact_rate(&self) -> f64 {
        let exact: u64 = self.bins.iter().map(|b| b.exact).sum();
        let total: u64 = self.bins.iter().map(|b| b.timesteps).sum();
        ratio(exact, total)
    }

    /// `key<TAB>value` lines; bins as `bin<TAB>start<TAB>count<TAB>exact<TAB>labelwise`.
    /// Both cross-entropy aggregations are always listed; `macro_headline`
    /// picks which one is reported under `cross_entropy`.
    pub fn to_kv(&self, macro_headline: bool) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k}\t{v}").unwrap();
        kv("games", self.games.to_string());
        kv("timesteps", self.timesteps.to_string());
        kv("exact_timesteps", self.exact_timesteps.to_string());
        kv("exact_games", self.exact_games.to_string());
        let (headline, name) = if macro_headline {
            (self.cross_entropy_macro, "macro")
        } else {
            (self.cross_entropy(), "micro")
        };
        kv("cross_entropy", format!("{headline:.9}"));
        kv("cross_entropy_aggregation", name.to_string());
        kv("cross_entropy_micro", format!("{:.9}", self.cross_entropy()));
        kv("cross_entropy_macro", format!("{:.9}", self.cross_entropy_macro));
        kv("labelwise_accuracy", format!("{:.9}", self.labelwise_accuracy()));
        kv("exact_state_rate", format!("{:.9}", self.exact_state_rate()));
        kv("trajectory_exact_rate", format!("{:.9}", self.trajectory_exact_rate()));
        for w in &self.warnings {
            kv("warning", w.clone());
        }
        for b in &self.bins {
            writeln!(
                s,
                "bin\t{}\t{}\t{:.9}\t{:.9}",
                b.start,
                b.timesteps,
                b.exact_rate(),
                b.labelwise()
            )
            .unwrap();
        }
        s
    }
}

struct GameStats {
    exact_timesteps: u64,
    correct_labels: u64,
    exact_game: bool,
    nll: f64,
    timesteps: u64,
    bins: Vec<BinStats>,
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

fn sorted_sum(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mut acc = CompensatedSum::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

fn game_stats(gold: &Trajectory, pred: &GamePredictions) -> Result<GameStats, EvalError> {
    let mut st = GameStats {
        exact_timesteps: 0,
        correct_labels: 0,
        exact_game: true,
        nll: 0.0,
        timesteps: gold.timesteps() as u64,
        bins: Vec::new(),
    };
    let mut nll = CompensatedSum::default();
    for (t, (g, (p, lp))) in gold
        .states
        .iter()
        .zip(pred.labels.iter().zip(&pred.log_probs))
        .enumerate()
    {
        if let Some((label, &value)) = lp.iter().enumerate().find(|(_, v)| !(**v <= 0.0)) {
            return Err(EvalError::BadLogProb {
                game_id: gold.game_id.clone(),
                t,
                label,
                value,
            });
        }
        let correct = g.0.iter().zip(p).filter(|(a, b)| a == b).count() as u64;
        let exact = correct == NUM_LABELS as u64;
        // below-floor values, -inf included, score as the floor
        for &x in lp {
            nll.add(-(x.max(LOG_PROB_FLOOR) as f64));
        }
        if t % BIN_WIDTH == 0 {
            st.bins.push(BinStats {
                start: t,
                ..BinStats::default()
            });
        }
        let bin = st.bins.last_mut().unwrap();
        bin.timesteps += 1;
        bin.exact += exact as u64;
        bin.correct_labels += correct;
        st.correct_labels += correct;
        st.exact_timesteps += exact as u64;
        st.exact_game &= exact;
    }
    st.nll = nll.value();
    Ok(st)
}

/// Pairs prediction games with shard games: positionally when the id
/// sequences agree, otherwise by (unique) game id.
fn pair<'a>(
    shard: &'a Shard,
    preds: &'a PredictionFile,
) -> Result<Vec<(&'a Trajectory, &'a GamePredictions)>, EvalError> {
    let gold = &shard.trajectories;
    if gold.len() != preds.games.len() {
        return Err(EvalError::Mismatch(format!(
            "{} games in shard, {} in predictions",
            gold.len(),
            preds.games.len()
        )));
    }
    let pairs: Vec<_> = if gold.iter().zip(&preds.games).all(|(g, p)| g.game_id == p.game_id) {
        gold.iter().zip(&preds.games).collect()
    } else {
        let mut by_id: HashMap<&str, &GamePredictions> = HashMap::with_capacity(preds.games.len());
        for p in &preds.games {
            if by_id.insert(&p.game_id, p).is_some() {
                return Err(EvalError::Mismatch(format!("duplicate prediction id {:?}", p.game_id)));
            }
        }
        let mut out = Vec::with_capacity(gold.len());
        for g in gold {
            let p = by_id
                .remove(g.game_id.as_str())
                .ok_or_else(|| EvalError::Mismatch(format!("no predictions for {:?}", g.game_id)))?;
            out.push((g, p));
        }
        out
    };
    for (g, p) in &pairs {
        if p.labels.len() != g.timesteps() || p.log_probs.len() != g.timesteps() {
            return Err(EvalError::Mismatch(format!(
                "{:?}: shard has {} timesteps, predictions {}",
                g.game_id,
                g.timesteps(),
                p.labels.len()
            )));
        }
    }
    Ok(pairs)
}

pub fn evaluate(shard: &Shard, preds: &PredictionFile) -> Result<MetricReport, EvalError> {
    let pairs = pair(shard, preds)?;
    let stats = pairs
        .par_iter()
        .map(|(g, p)| game_stats(g, p))
        .collect::<Result<Vec<_>, _>>()?;

    let mut r = MetricReport {
        games: stats.len() as u64,
        timesteps: 0,
        exact_timesteps: 0,
        correct_labels: 0,
        exact_games: 0,
        nll_sum: 0.0,
        cross_entropy_macro: 0.0,
        bins: Vec::new(),
        warnings: Vec::new(),
    };
    for s in &stats {
        r.timesteps += s.timesteps;
        r.exact_timesteps += s.exact_timesteps;
        r.correct_labels += s.correct_labels;
        r.exact_games += s.exact_game as u64;
        for (i, b) in s.bins.iter().enumerate() {
            if r.bins.len() <= i {
                r.bins.push(BinStats {
                    start: b.start,
                    ..BinStats::default()
                });
            }
            let acc = &mut r.bins[i];
            acc.timesteps += b.timesteps;
            acc.exact += b.exact;
            acc.correct_labels += b.correct_labels;
        }
    }
    r.nll_sum = sorted_sum(stats.iter().map(|s| s.nll).collect());
    if !stats.is_empty() {
        let per_game = stats
            .iter()
            .map(|s| s.nll / (s.timesteps * NUM_LABELS as u64) as f64)
            .collect();
        r.cross_entropy_macro = sorted_sum(per_game) / stats.len() as f64;
    }
    if r.games == 0 {
        r.warnings
            .push("empty shard: rates reported as 1.0 by convention".into());
    }
    Ok(r)
}

fn scored(game_id: &str, gold: &[StateLabels], predicted: impl Fn(usize) -> [u8; NUM_LABELS]) -> GamePredictions {
    let mut g = GamePredictions {
        game_id: game_id.to_string(),
        labels: Vec::with_capacity(gold.len()),
        log_probs: Vec::with_capacity(gold.len()),
    };
    for (t, s) in gold.iter().enumerate() {
        let p = predicted(t);
        let mut lp = [0f32; NUM_LABELS];
        for j in 0..NUM_LABELS {
            if p[j] != s.0[j] {
                lp[j] = LOG_PROB_FLOOR;
            }
        }
        g.labels.push(p);
        g.log_probs.push(lp);
    }
    g
}

fn predict_each(shard: &Shard, f: impl Fn(&Trajectory) -> GamePredictions + Sync + Send) -> PredictionFile {
    PredictionFile {
        games: shard.trajectories.par_iter().map(f).collect(),
    }
}

/// Gold labels with log p = 0 everywhere.
pub fn oracle_predict(shard: &Shard) -> PredictionFile {
    predict_each(shard, |t| scored(&t.game_id, &t.states, |i| t.states[i].0))
}

/// Predicts `s_{max(0, t-k)}` at timestep `t`.
///
/// # Panics
/// If `k == 0`.
pub fn lagk_predict(shard: &Shard, k: usize) -> PredictionFile {
    assert!(k >= 1, "lag must be at least 1");
    predict_each(shard, |t| {
        scored(&t.game_id, &t.states, |i| t.states[i.saturating_sub(k)].0)
    })
}

/// Board and side-to-move are gold; castling, en passant and both counters
/// stay at their `t = 0` values.
pub fn amnesiac_predict(shard: &Shard) -> PredictionFile {
    predict_each(shard, |t| {
        scored(&t.game_id, &t.states, |i| {
            let mut p = t.states[0].0;
            p[..=SIDE].copy_from_slice(&t.states[i].0[..=SIDE]);
            p
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randgen::{generate_test_set, GenConfig};

    fn shard(n: usize) -> Shard {
        Shard {
            flags: 0,
            trajectories: generate_test_set(&GenConfig::new(0, n), 4).unwrap().trajectories,
        }
    }

    #[test]
    fn oracle_is_perfect() {
        let s = shard(10);
        let r = evaluate(&s, &oracle_predict(&s)).unwrap();
        assert_eq!(r.cross_entropy(), 0.0);
        assert_eq!(r.exact_state_rate(), 1.0);
        assert_eq!(r.trajectory_exact_rate(), 1.0);
        assert_eq!(r.labelwise_accuracy(), 1.0);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn empty_shard_is_vacuously_exact() {
        let s = Shard::default();
        let r = evaluate(&s, &oracle_predict(&s)).unwrap();
        assert_eq!((r.games, r.timesteps), (0, 0));
        assert_eq!(r.exact_state_rate(), 1.0);
        assert_eq!(r.trajectory_exact_rate(), 1.0);
        assert_eq!(r.cross_entropy(), 0.0);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn lag_one_is_exact_only_at_t0() {
        let s = shard(10);
        let r = evaluate(&s, &lagk_predict(&s, 1)).unwrap();
        assert_eq!(r.exact_timesteps, r.games);
        assert_eq!(r.exact_games, 0);
    }

    #[test]
    fn amnesiac_misses_counters() {
        let s = shard(10);
        let r = evaluate(&s, &amnesiac_predict(&s)).unwrap();
        assert!(r.exact_state_rate() < 1.0);
        assert_eq!(r.exact_games, 0);
    }

    #[test]
    fn positive_log_prob_rejected() {
        let s = shard(2);
        let mut p = oracle_predict(&s);
        p.games[1].log_probs[3][7] = 0.5;
        assert!(matches!(
            evaluate(&s, &p),
            Err(EvalError::BadLogProb { t: 3, label: 7, .. })
        ));
        p.games[1].log_probs[3][7] = f32::NAN;
        assert!(matches!(evaluate(&s, &p), Err(EvalError::BadLogProb { .. })));
    }

    #[test]
    fn mismatches_rejected() {
        let s = shard(3);
        let mut p = oracle_predict(&s);
        p.games[0].game_id = "other".into();
        assert!(matches!(evaluate(&s, &p), Err(EvalError::Mismatch(_))));
        let mut p = oracle_predict(&s);
        p.games[2].labels.pop();
        p.games[2].log_probs.pop();
        assert!(matches!(evaluate(&s, &p), Err(EvalError::Mismatch(_))));
        let mut p = oracle_predict(&s);
        p.games.pop();
        assert!(matches!(evaluate(&s, &p), Err(EvalError::Mismatch(_))));
    }

    #[test]
    fn kv_report_lines() {
        let s = shard(3);
        let text = evaluate(&s, &oracle_predict(&s)).unwrap().to_kv(true);
        assert!(text.contains("exact_state_rate\t1.000000000\n"));
        assert!(text.contains("cross_entropy_aggregation\tmacro\n"));
        assert!(text.contains("cross_entropy_micro\t"));
        assert!(text.lines().any(|l| l.starts_with("bin\t0\t60\t")));
    }
}
