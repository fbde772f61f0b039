use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QubitKind {
    Photon,
    Spin,
}

/// Names one qubit of a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QubitLabel {
    pub kind: QubitKind,
    pub index: u32,
}

impl QubitLabel {
    pub const fn photon(index: u32) -> Self {
        QubitLabel {
            kind: QubitKind::Photon,
            index,
        }
    }

    pub const fn spin(index: u32) -> Self {
        QubitLabel {
            kind: QubitKind::Spin,
            index,
        }
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            QubitKind::Photon => write!(f, "photon{}", self.index),
            QubitKind::Spin => write!(f, "spin{}", self.index),
        }
    }
}
