use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_MIN_GAP: f64 = 1e-3;

// relative slack on the gap bound for schedules built as k * gap
const GAP_SLACK: f64 = 1e-9;

/// Global sampling instants `0 = t₀ < t₁ < …` with `t_{k+1} - t_k ≤ τ̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSchedule {
    instants: Vec<f64>,
    tau_bar: f64,
}

impl SamplingSchedule {
    pub fn new(instants: Vec<f64>, tau_bar: f64) -> Result<Self> {
        if !(tau_bar.is_finite() && tau_bar > 0.0) {
            return Err(Error::param(format!(
                "tau_bar must be positive, got {tau_bar}"
            )));
        }
        match instants.first() {
            Some(&0.0) => {}
            Some(&t0) => return Err(Error::param(format!("first instant must be 0, got {t0}"))),
            None => return Err(Error::param("schedule has no instants")),
        }
        for (k, w) in instants.windows(2).enumerate() {
            let gap = w[1] - w[0];
            if !(gap > 0.0) {
                return Err(Error::param(format!(
                    "instants not increasing at index {}",
                    k + 1
                )));
            }
            if gap > tau_bar * (1.0 + GAP_SLACK) {
                return Err(Error::param(format!(
                    "gap {gap} at index {} exceeds tau_bar {tau_bar}",
                    k + 1
                )));
            }
        }
        Ok(SamplingSchedule { instants, tau_bar })
    }

    /// Instants `k·gap` for `k = 0..=ceil(horizon/gap)`.
    pub fn periodic(gap: f64, horizon: f64) -> Result<Self> {
        if !(gap > 0.0 && horizon > 0.0) {
            return Err(Error::param("gap and horizon must be positive"));
        }
        let count = (horizon / gap).ceil() as usize;
        let instants = (0..=count).map(|k| k as f64 * gap).collect();
        SamplingSchedule::new(instants, gap)
    }

    pub fn instants(&self) -> &[f64] {
        &self.instants
    }

    pub fn tau_bar(&self) -> f64 {
        self.tau_bar
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }

    pub fn end(&self) -> f64 {
        *self.instants.last().expect("non-empty by construction")
    }

    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.instants.windows(2).map(|w| w[1] - w[0])
    }

    /// Index `k` of the hold interval `[t_k, t_{k+1})` containing `t`; the
    /// last instant maps to the last interval.
    pub fn interval_of(&self, t: f64) -> usize {
        let k = self.instants.partition_point(|&s| s <= t);
        k.saturating_sub(1)
            .min(self.instants.len().saturating_sub(2))
    }

    /// One instant per row, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.instants.len() * 24);
        for t in &self.instants {
            let _ = writeln!(out, "{t:.16e}");
        }
        out
    }

    /// Parses [`Self::to_csv`] output; `tau_bar` is the bound to validate against.
    pub fn parse_csv(text: &str, tau_bar: f64) -> Result<Self> {
        let instants = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, l)| {
                l.parse::<f64>()
                    .map_err(|e| Error::parse(format!("schedule row {}", i + 1), e))
            })
            .collect::<Result<Vec<_>>>()?;
        SamplingSchedule::new(instants, tau_bar)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Aperiodic schedule with gaps drawn uniformly from `[min_gap, tau_bar]`
/// (ChaCha8 seeded by `seed`) until the last instant reaches `horizon`.
pub fn generate_schedule(
    tau_bar: f64,
    min_gap: f64,
    horizon: f64,
    seed: u64,
) -> Result<SamplingSchedule> {
    if !(min_gap > 0.0 && min_gap < tau_bar && tau_bar.is_finite()) {
        return Err(Error::param(format!(
            "need 0 < min_gap < tau_bar, got min_gap = {min_gap}, tau_bar = {tau_bar}"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instants = vec![0.0];
    let mut t = 0.0;
    while t < horizon {
        t += rng.random_range(min_gap..=tau_bar);
        instants.push(t);
    }
    SamplingSchedule::new(instants, tau_bar)
}
