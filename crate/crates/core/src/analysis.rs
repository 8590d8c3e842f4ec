//! Selectivity, closed-form success probability and distribution distances.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::sim::{Distribution, Histogram};
use crate::{Error, Result};

/// Anything that can be read as outcome probabilities.
pub trait Outcomes {
    fn probabilities(&self) -> Vec<f64>;
}

impl Outcomes for Distribution {
    fn probabilities(&self) -> Vec<f64> {
        self.probs.clone()
    }
}

impl Outcomes for Histogram {
    fn probabilities(&self) -> Vec<f64> {
        self.frequencies()
    }
}

impl Outcomes for [f64] {
    fn probabilities(&self) -> Vec<f64> {
        self.to_vec()
    }
}

/// Threshold at which the goal counts as recognised.
pub const RECOGNITION_DB: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectivityReport {
    pub goal: usize,
    pub p_goal: f64,
    pub p_max_other: f64,
    /// `10·log10(p_goal / p_max_other)`; `±∞` when one side is zero,
    /// serialised as `"inf"` / `"-inf"`.
    #[serde(serialize_with = "ser_db", deserialize_with = "de_db")]
    pub s_db: f64,
    pub recognized: bool,
}

fn ser_db<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

fn de_db<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Db {
        Num(f64),
        Str(String),
    }
    match Db::deserialize(d)? {
        Db::Num(v) => Ok(v),
        Db::Str(s) if s == "inf" => Ok(f64::INFINITY),
        Db::Str(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        Db::Str(s) => Err(serde::de::Error::custom(format!("bad decibel value {s:?}"))),
    }
}

/// Selectivity of `goal` in decibels; counts are normalised first.
pub fn selectivity<O: Outcomes + ?Sized>(outcomes: &O, goal: usize) -> Result<SelectivityReport> {
    let probs = outcomes.probabilities();
    if probs.len() < 2 {
        return Err(Error::invalid("distribution", "need at least two outcomes"));
    }
    if goal >= probs.len() {
        return Err(Error::invalid(
            "goal",
            format!("{goal} out of range for {} outcomes", probs.len()),
        ));
    }
    let p_goal = probs[goal];
    let p_max_other = probs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != goal)
        .map(|(_, &p)| p)
        .fold(0.0, f64::max);
    let s_db = match (p_goal > 0.0, p_max_other > 0.0) {
        (true, true) => 10.0 * (p_goal / p_max_other).log10(),
        (true, false) => f64::INFINITY,
        (false, _) => f64::NEG_INFINITY,
    };
    Ok(SelectivityReport {
        goal,
        p_goal,
        p_max_other,
        s_db,
        recognized: s_db >= RECOGNITION_DB,
    })
}

/// `sin²((2R+1)·arcsin(1/√N))`, the single-target success probability after `R` rounds.
pub fn theoretical_success(size: usize, repetitions: usize) -> f64 {
    let theta = (1.0 / (size as f64).sqrt()).asin();
    ((2 * repetitions + 1) as f64 * theta).sin().powi(2)
}

/// Half the L1 distance.
pub fn total_variation(a: &Distribution, b: &Distribution) -> Result<f64> {
    if a.probs.len() != b.probs.len() {
        return Err(Error::invalid(
            "distribution",
            format!("size mismatch {} vs {}", a.probs.len(), b.probs.len()),
        ));
    }
    Ok(0.5 * a.probs.iter().zip(&b.probs).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Mean and sample standard deviation of per-seed values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub mean: f64,
    pub stddev: f64,
    pub seeds: usize,
}

pub fn summarize(values: &[f64]) -> SeedSummary {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n.max(1) as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    SeedSummary {
        mean,
        stddev: var.sqrt(),
        seeds: n,
    }
}
