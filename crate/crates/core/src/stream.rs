//! Counter-based random streams keyed by record.
//!
//! Every random decision made while transforming a record is a pure function
//! of `(seed, record_id, side, index, lane)`. Nothing is carried between
//! records, so output does not depend on processing order or thread count.
//!
//! The hash is fixed: FNV-1a (64-bit) over the UTF-8 bytes of the record id,
//! combined with the seed, side and index through the SplitMix64 finalizer.
//! Changing any constant here changes every generated dataset.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// SplitMix64 output function.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over raw bytes.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

/// Stable 64-bit hash of `(seed, key, tag)`.
pub fn stable_hash(seed: u64, key: &str, tag: u64) -> u64 {
    mix64(mix64(seed ^ fnv1a(key.as_bytes())) ^ tag.wrapping_mul(GOLDEN_GAMMA))
}

/// Which part of a training record a stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Query,
    Document,
    /// The negative passage of a training triple.
    Negative,
}

impl Side {
    fn tag(self) -> u64 {
        match self {
            Side::Query => 1,
            Side::Document => 2,
            Side::Negative => 3,
        }
    }
}

/// Independent sub-streams of one record stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lane {
    /// Bernoulli switch decisions, one per word token.
    Switch,
    /// Target-language choice, one per word token or per text.
    Language,
}

impl Lane {
    fn tag(self) -> u64 {
        match self {
            Lane::Switch => 0x5157_4954_4348,
            Lane::Language => 0x4c41_4e47,
        }
    }
}

/// Random stream for one side of one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordStream {
    key: u64,
}

impl RecordStream {
    pub fn new(seed: u64, record_id: &str, side: Side) -> Self {
        Self {
            key: stable_hash(seed, record_id, side.tag()),
        }
    }

    /// Raw 64-bit draw at position `index` of `lane`.
    pub fn draw(&self, index: u64, lane: Lane) -> u64 {
        mix64(mix64(self.key ^ index.wrapping_mul(GOLDEN_GAMMA)) ^ lane.tag())
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn unit(&self, index: u64, lane: Lane) -> f64 {
        (self.draw(index, lane) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli(p) on the switch lane. `p = 0` never fires, `p = 1` always does.
    pub fn bernoulli(&self, index: u64, p: f64) -> bool {
        self.unit(index, Lane::Switch) < p
    }

    /// Uniform choice in `0..n` on the language lane. `n` must be positive.
    pub fn choose(&self, index: u64, n: usize) -> usize {
        debug_assert!(n > 0);
        ((u128::from(self.draw(index, Lane::Language)) * n as u128) >> 64) as usize
    }
}

/// Uniform choice in `0..n` keyed by `(seed, key)`, independent of any other
/// key. Used where a whole record picks one option.
pub fn keyed_choice(seed: u64, key: &str, n: usize) -> usize {
    debug_assert!(n > 0);
    ((u128::from(stable_hash(seed, key, 0x004d_4958)) * n as u128) >> 64) as usize
}
