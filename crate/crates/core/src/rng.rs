//! Reproducible random streams.
//!
//! Every multisample is drawn from its own ChaCha stream. The key comes
//! from the master seed and the stream id from the label (run, iteration,
//! purpose), so any stream can be regenerated without replaying the ones
//! before it, and parallel repetitions see the same numbers as serial ones.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

/// Why a multisample was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Purpose {
    Design = 0,
    Validation = 1,
    Certify = 2,
}

/// Identifies one stream within a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct StreamLabel {
    pub run: u32,
    pub iteration: u32,
    pub purpose: Purpose,
}

impl StreamLabel {
    pub fn new(run: u32, iteration: u32, purpose: Purpose) -> Self {
        Self {
            run,
            iteration,
            purpose,
        }
    }

    /// Packs the label into a 64-bit ChaCha stream id. Iterations above
    /// `2^30 - 1` would alias and are rejected by the algorithms long before.
    pub fn stream_id(&self) -> u64 {
        (u64::from(self.run) << 32)
            | (u64::from(self.iteration & 0x3fff_ffff) << 2)
            | self.purpose as u64
    }
}

/// Master seed plus the repetition index of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RunSeed {
    pub master: u64,
    pub run: u32,
}

impl RunSeed {
    pub fn new(master: u64, run: u32) -> Self {
        Self { master, run }
    }

    pub fn label(&self, iteration: u32, purpose: Purpose) -> StreamLabel {
        StreamLabel::new(self.run, iteration, purpose)
    }
}

impl From<u64> for RunSeed {
    fn from(master: u64) -> Self {
        Self { master, run: 0 }
    }
}

/// Opens the stream for `label` under `master`.
pub fn stream(master: u64, label: StreamLabel) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(label.stream_id());
    rng
}
