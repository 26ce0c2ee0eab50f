//! Deterministic random streams.
//!
//! Every random draw in an experiment comes from a stream identified by
//! `(base_seed, purpose tag, index)`. The triple is folded into a 64-bit
//! stream id with SplitMix64 finalisers and the id seeds a ChaCha8 generator.
//! The same triple always reproduces the same sequence, independently of how
//! work is scheduled across threads. Sequences are not meant to match other
//! implementations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every stream.
pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Train and test draws never share a tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum StreamTag {
    TrainInputs = 1,
    LabelFlips = 2,
    TrainInputNoise = 3,
    TestInputs = 4,
    TestInputNoise = 5,
    Subsample = 6,
    Verify = 7,
}

impl StreamTag {
    pub const ALL: [StreamTag; 7] = [
        StreamTag::TrainInputs,
        StreamTag::LabelFlips,
        StreamTag::TrainInputNoise,
        StreamTag::TestInputs,
        StreamTag::TestInputNoise,
        StreamTag::Subsample,
        StreamTag::Verify,
    ];

    /// Whether draws on this stream feed the training sample.
    pub fn is_training(self) -> bool {
        matches!(
            self,
            StreamTag::TrainInputs
                | StreamTag::LabelFlips
                | StreamTag::TrainInputNoise
                | StreamTag::Subsample
        )
    }
}

/// Address of one random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Stream {
    pub base_seed: u64,
    pub tag: StreamTag,
    pub index: u64,
}

impl Stream {
    pub fn new(base_seed: u64, tag: StreamTag, index: u64) -> Self {
        Stream {
            base_seed,
            tag,
            index,
        }
    }

    /// The 64-bit stream id.
    pub fn id(&self) -> u64 {
        let h = splitmix64(self.base_seed ^ 0x6a09_e667_f3bc_c908);
        let h = splitmix64(h ^ (self.tag as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        splitmix64(h ^ self.index)
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng::seed_from_u64(self.id())
    }
}

#[inline]
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
