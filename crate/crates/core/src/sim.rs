//! Seeded Monte Carlo over uniformly random games.
//!
//! Game `g` of a run draws from [`game_rng`]`(seed, g)`, and lengths are
//! collected in game order before any aggregation, so the sequential and
//! parallel paths produce bit-identical statistics.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::state::GameState;
use crate::strategy::{game_rng, play_with_rng, random_move, GameRecord, Policy};

pub const DEFAULT_TRIALS: u64 = 9999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub n: u32,
    pub trials: u64,
    pub seed: u64,
    /// Game length → number of games.
    pub histogram: BTreeMap<u32, u64>,
    pub mean: f64,
    /// Sample variance (divisor `trials - 1`).
    pub variance: f64,
    /// Moment skewness `m3 / m2^1.5`; 0 when all lengths coincide.
    pub skewness: f64,
    /// `m4 / m2^2 - 3`; 0 when all lengths coincide.
    pub excess_kurtosis: f64,
    pub p1_wins: u64,
    pub p2_wins: u64,
}

impl SimStats {
    pub fn from_histogram(n: u32, seed: u64, histogram: BTreeMap<u32, u64>) -> SimStats {
        let trials: u64 = histogram.values().sum();
        let t = trials as f64;
        let mean = histogram
            .iter()
            .map(|(&l, &f)| f64::from(l) * f as f64)
            .sum::<f64>()
            / t;
        let central = |k: i32| {
            histogram
                .iter()
                .map(|(&l, &f)| f as f64 * (f64::from(l) - mean).powi(k))
                .sum::<f64>()
                / t
        };
        let (m2, m3, m4) = (central(2), central(3), central(4));
        let variance = if trials > 1 { m2 * t / (t - 1.0) } else { 0.0 };
        let (skewness, excess_kurtosis) = if m2 > 0.0 {
            (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
        } else {
            (0.0, 0.0)
        };
        let odd: u64 = histogram
            .iter()
            .filter(|(&l, _)| l % 2 == 1)
            .map(|(_, &f)| f)
            .sum();
        let even_nonzero: u64 = histogram
            .iter()
            .filter(|(&l, _)| l > 0 && l % 2 == 0)
            .map(|(_, &f)| f)
            .sum();
        SimStats {
            n,
            trials,
            seed,
            histogram,
            mean,
            variance,
            skewness,
            excess_kurtosis,
            p1_wins: odd,
            p2_wins: even_nonzero,
        }
    }

    pub fn min_length(&self) -> Option<u32> {
        self.histogram.keys().next().copied()
    }

    pub fn max_length(&self) -> Option<u32> {
        self.histogram.keys().next_back().copied()
    }

    /// Metadata as `# key=value` lines, then `length,frequency` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in [
            ("n", self.n.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("mean", self.mean.to_string()),
            ("variance", self.variance.to_string()),
            ("skewness", self.skewness.to_string()),
            ("excess_kurtosis", self.excess_kurtosis.to_string()),
            ("p1_wins", self.p1_wins.to_string()),
            ("p2_wins", self.p2_wins.to_string()),
        ] {
            writeln!(out, "# {k}={v}").unwrap();
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["length", "frequency"]).unwrap();
        for (l, f) in &self.histogram {
            w.write_record([l.to_string(), f.to_string()]).unwrap();
        }
        out.push_str(std::str::from_utf8(&w.into_inner().unwrap()).unwrap());
        out
    }

    /// Parses the output of [`SimStats::to_csv`].
    pub fn from_csv(text: &str) -> Result<SimStats> {
        let bad = |m: String| GameError::Parse(m);
        let mut meta = BTreeMap::new();
        for line in text.lines().filter_map(|l| l.strip_prefix("# ")) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("bad metadata `{line}`")))?;
            meta.insert(k.to_string(), v.to_string());
        }
        fn field<T: std::str::FromStr>(meta: &BTreeMap<String, String>, k: &str) -> Result<T> {
            meta.get(k)
                .ok_or_else(|| GameError::Parse(format!("missing `{k}`")))?
                .parse()
                .map_err(|_| GameError::Parse(format!("bad value for `{k}`")))
        }

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut histogram = BTreeMap::new();
        for row in reader.deserialize::<(u32, u64)>() {
            let (l, f) = row.map_err(|e| bad(e.to_string()))?;
            histogram.insert(l, f);
        }
        let stats = SimStats {
            n: field(&meta, "n")?,
            trials: field(&meta, "trials")?,
            seed: field(&meta, "seed")?,
            histogram,
            mean: field(&meta, "mean")?,
            variance: field(&meta, "variance")?,
            skewness: field(&meta, "skewness")?,
            excess_kurtosis: field(&meta, "excess_kurtosis")?,
            p1_wins: field(&meta, "p1_wins")?,
            p2_wins: field(&meta, "p2_wins")?,
        };
        let total: u64 = stats.histogram.values().sum();
        if total != stats.trials {
            return Err(bad(format!(
                "frequencies sum to {total}, trials = {}",
                stats.trials
            )));
        }
        Ok(stats)
    }

    pub fn write_csv<W: io::Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(self.to_csv().as_bytes())
    }
}

/// Length of game `game` in the run seeded with `seed`.
pub fn random_game_length(n: u32, seed: u64, game: u64) -> Result<u32> {
    let mut rng = game_rng(seed, game);
    let mut state = GameState::initial(n)?;
    let mut length = 0;
    while !state.is_terminal() {
        let mv = random_move(&state, &mut rng)?;
        state = state.apply(mv)?;
        length += 1;
    }
    Ok(length)
}

fn check_args(n: u32, trials: u64) -> Result<()> {
    GameState::initial(n)?;
    if trials == 0 {
        return Err(GameError::ZeroTrials);
    }
    Ok(())
}

fn map_games<T: Send>(trials: u64, exec: Execution, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    match exec {
        Execution::Sequential => (0..trials).map(f).collect(),
        Execution::Parallel => (0..trials).into_par_iter().map(f).collect(),
    }
}

pub fn simulate(n: u32, trials: u64, seed: u64) -> Result<SimStats> {
    simulate_with(n, trials, seed, Execution::Parallel)
}

pub fn simulate_with(n: u32, trials: u64, seed: u64, exec: Execution) -> Result<SimStats> {
    check_args(n, trials)?;
    let lengths = map_games(trials, exec, |g| {
        random_game_length(n, seed, g).expect("validated n")
    });
    let mut histogram = BTreeMap::new();
    for l in lengths {
        *histogram.entry(l).or_insert(0) += 1;
    }
    Ok(SimStats::from_histogram(n, seed, histogram))
}

/// Full records of the same games [`simulate_with`] plays.
pub fn random_games(n: u32, trials: u64, seed: u64, exec: Execution) -> Result<Vec<GameRecord>> {
    check_args(n, trials)?;
    Ok(map_games(trials, exec, |g| {
        play_with_rng(n, Policy::UniformRandom { seed }, &mut game_rng(seed, g))
            .expect("validated n")
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub length: u32,
    /// Expected frequency: `trials · N(length; mu, sigma)` with unit bins.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub mu: f64,
    pub sigma: f64,
    pub curve: Vec<CurvePoint>,
}

/// Moment-matched normal over the histogram's support.
pub fn gaussian_fit(stats: &SimStats) -> Result<GaussianFit> {
    if stats.trials < 2 || stats.variance <= 0.0 {
        return Err(GameError::DegenerateFit);
    }
    let mu = stats.mean;
    let sigma = stats.variance.sqrt();
    let (lo, hi) = (stats.min_length().unwrap(), stats.max_length().unwrap());
    let norm = stats.trials as f64 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let curve = (lo..=hi)
        .map(|l| {
            let z = (f64::from(l) - mu) / sigma;
            CurvePoint {
                length: l,
                expected: norm * (-0.5 * z * z).exp(),
            }
        })
        .collect();
    Ok(GaussianFit { mu, sigma, curve })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: u32,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub trials: u64,
    pub seed: u64,
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
    pub intercept: f64,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "mean"]).unwrap();
        for p in &self.points {
            w.write_record([p.n.to_string(), p.mean.to_string()])
                .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Ordinary least squares `y = slope · x + intercept`.
pub fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(GameError::TooFewPoints(points.len()));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(GameError::DegenerateRegression);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Mean random-game length for each `n`, with a least-squares line.
pub fn average_scaling(ns: &[u32], trials: u64, seed: u64) -> Result<ScalingReport> {
    if ns.len() < 2 {
        return Err(GameError::TooFewPoints(ns.len()));
    }
    if ns.iter().all(|&n| n == ns[0]) {
        return Err(GameError::DegenerateRegression);
    }
    let points = ns
        .iter()
        .map(|&n| simulate(n, trials, seed).map(|s| ScalingPoint { n, mean: s.mean }))
        .collect::<Result<Vec<_>>>()?;
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (f64::from(p.n), p.mean)).collect();
    let (slope, intercept) = least_squares(&xy)?;
    Ok(ScalingReport {
        trials,
        seed,
        points,
        slope,
        intercept,
    })
}
