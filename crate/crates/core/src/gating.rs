//! Update gate and per-sample mistake memory.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// When a training sample is allowed to change the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GatePolicy {
    /// Ungated backprop: every presentation updates.
    Always,
    /// Update only while the sample is misclassified.
    PureMistake,
    /// Update if the sample is misclassified now or ever was before.
    MemorizedMistake,
}

impl GatePolicy {
    pub const ALL: [GatePolicy; 3] = [
        GatePolicy::Always,
        GatePolicy::PureMistake,
        GatePolicy::MemorizedMistake,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GatePolicy::Always => "always",
            GatePolicy::PureMistake => "pure",
            GatePolicy::MemorizedMistake => "memorized",
        }
    }
}

impl fmt::Display for GatePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GatePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "always" | "backprop" => Ok(GatePolicy::Always),
            "pure" | "pure-mistake" => Ok(GatePolicy::PureMistake),
            "memorized" | "memorized-mistake" => Ok(GatePolicy::MemorizedMistake),
            other => Err(Error::Config(format!("unknown gate policy `{other}`"))),
        }
    }
}

/// One Boolean per training sample, set the first time the sample is
/// misclassified and never cleared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MistakeMemory {
    flags: Vec<bool>,
    true_count: usize,
}

impl MistakeMemory {
    pub fn new(len: usize) -> Self {
        Self {
            flags: vec![false; len],
            true_count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn get(&self, id: usize) -> Result<bool> {
        self.flags
            .get(id)
            .copied()
            .ok_or(Error::Index { index: id, len: self.flags.len() })
    }

    /// Marks `id` as mistaken. Returns whether the flag was already set.
    pub fn mark(&mut self, id: usize) -> Result<bool> {
        let len = self.flags.len();
        let flag = self.flags.get_mut(id).ok_or(Error::Index { index: id, len })?;
        let was = *flag;
        if !was {
            *flag = true;
            self.true_count += 1;
        }
        Ok(was)
    }

    /// Number of distinct samples ever misclassified.
    pub fn unique_mistake_count(&self) -> usize {
        self.true_count
    }

    /// Re-indexes the memory onto a larger sample space. `mapping[k]` is the
    /// new id of old sample `k`; ids not hit by the mapping start false.
    pub fn extend_into(&self, new_len: usize, mapping: &[usize]) -> Result<Self> {
        if mapping.len() != self.flags.len() {
            return Err(Error::Shape(format!(
                "mapping covers {} ids, memory has {}",
                mapping.len(),
                self.flags.len()
            )));
        }
        let mut out = Self::new(new_len);
        for (&flag, &target) in self.flags.iter().zip(mapping) {
            if flag {
                out.mark(target)?;
            }
        }
        Ok(out)
    }
}

/// Decides whether the current presentation triggers an update.
///
/// A misclassification always sets the sample's memory flag, whatever the
/// policy, so core-set sizes are comparable between policies.
pub fn gate_decision(
    policy: GatePolicy,
    sample_id: usize,
    predicted: usize,
    label: usize,
    memory: &mut MistakeMemory,
) -> Result<bool> {
    let mistaken = predicted != label;
    let remembered = if mistaken {
        memory.mark(sample_id)?;
        true
    } else {
        memory.get(sample_id)?
    };
    Ok(match policy {
        GatePolicy::Always => true,
        GatePolicy::PureMistake => mistaken,
        GatePolicy::MemorizedMistake => remembered,
    })
}
