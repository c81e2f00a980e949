//! Settings shared by the verification suites.

use serde::Serialize;

use crate::report::DEFAULT_CAP;

/// Suites with at most this many checks run exhaustively by default.
pub const DEFAULT_EXHAUSTIVE_LIMIT: u64 = 10_000_000;
pub const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exhaustive below `exhaustive_limit`, sampled above it.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub mode: Mode,
    pub exhaustive_limit: u64,
    pub samples: u64,
    pub seed: u64,
    pub cap: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            mode: Mode::Auto,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            cap: DEFAULT_CAP,
        }
    }
}

impl VerifyConfig {
    pub fn exhaustive() -> Self {
        VerifyConfig {
            mode: Mode::Exhaustive,
            ..Self::default()
        }
    }

    pub fn sampled(samples: u64, seed: u64) -> Self {
        VerifyConfig {
            mode: Mode::Sampled,
            samples,
            seed,
            ..Self::default()
        }
    }

    /// Whether a suite of `checks` instances should be enumerated in full.
    pub fn exhaustive_for(&self, checks: u64) -> bool {
        match self.mode {
            Mode::Exhaustive => true,
            Mode::Sampled => checks <= self.samples,
            Mode::Auto => checks <= self.exhaustive_limit,
        }
    }
}
