use std::fmt;

use serde::{Deserialize, Serialize};

use super::CorpusError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockSource {
    Authentic,
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub source: BlockSource,
    pub count: usize,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.source {
            BlockSource::Authentic => 'A',
            BlockSource::Synthetic => 'S',
        };
        write!(f, "{tag}{}", self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub block_size: usize,
    pub blocks: Vec<Block>,
}

impl BlockPlan {
    pub fn total(&self, source: BlockSource) -> usize {
        self.blocks.iter().filter(|b| b.source == source).map(|b| b.count).sum()
    }
}

impl fmt::Display for BlockPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(Block::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Mixing ratio of authentic to synthetic blocks, e.g. `2:1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub authentic: usize,
    pub synthetic: usize,
}

impl std::str::FromStr for Ratio {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::InvalidPlan(format!("ratio {s:?} is not of the form a:s"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        Ok(Ratio { authentic: a.trim().parse().map_err(|_| bad())?, synthetic: b.trim().parse().map_err(|_| bad())? })
    }
}

/// Round-robin schedule of homogeneous blocks: each round has `ratio.authentic`
/// authentic blocks then `ratio.synthetic` synthetic ones, every block
/// `block_size` pairs or whatever remains. Exhausted sources are skipped.
pub fn plan_blocks(authentic: usize, synthetic: usize, block_size: usize, ratio: Ratio) -> Result<BlockPlan, CorpusError> {
    if block_size == 0 {
        return Err(CorpusError::InvalidPlan("block size must be at least 1".into()));
    }
    if ratio.authentic == 0 && ratio.synthetic == 0 {
        return Err(CorpusError::InvalidPlan("ratio components cannot both be 0".into()));
    }
    let mut remaining = [authentic, synthetic];
    let slots = [(BlockSource::Authentic, ratio.authentic), (BlockSource::Synthetic, ratio.synthetic)];
    let mut blocks = Vec::new();
    let live = |rem: &[usize; 2]| slots.iter().zip(rem).any(|((_, per_round), r)| *per_round > 0 && *r > 0);
    while live(&remaining) {
        for (i, (source, per_round)) in slots.iter().enumerate() {
            for _ in 0..*per_round {
                if remaining[i] == 0 {
                    break;
                }
                let count = remaining[i].min(block_size);
                remaining[i] -= count;
                blocks.push(Block { source: *source, count });
            }
        }
    }
    Ok(BlockPlan { block_size, blocks })
}
