//! Torsion subgroups and automorphism groups of curves, computed inside a
//! bounded tower of extensions `F_p ⊂ F_{p^2} ⊂ … ⊂ F_{p^k_max}`.

mod automorphism;
mod torsion;

pub use automorphism::{
    apply_automorphism, automorphism_group, automorphism_group_over, expected_aut_label,
    group_structure_check, AutGroup, AutLabel, Automorphism, StructureReport,
};
pub use torsion::{torsion_over, torsion_subgroup, TorsionData, TorsionStructure, M_MAX};

use thiserror::Error;

use crate::curve::CurveError;
use crate::field::{FieldError, K_MAX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("{what} is not rational over F_(p^k) for any k <= {k_max}")]
    NotFoundWithinTower { what: String, k_max: u32 },
    #[error("no point of order {m}: the p-part of a supersingular curve is trivial")]
    UnsupportedMixedOrder { m: u64 },
    #[error("torsion order {0} outside 1..={M_MAX}")]
    OrderOutOfRange(u64),
    #[error("automorphism group of order {found} contradicts the expected {expected} ({label})")]
    TableMismatch {
        expected: usize,
        found: usize,
        label: AutLabel,
    },
    #[error("automorphism candidate failed validation: {0}")]
    InvalidAutomorphism(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl From<FieldError> for StructureError {
    fn from(e: FieldError) -> Self {
        StructureError::Curve(e.into())
    }
}

/// Bounds the extension degrees searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tower {
    k_max: u32,
}

impl Default for Tower {
    fn default() -> Self {
        Tower { k_max: K_MAX }
    }
}

impl Tower {
    /// A tower capped at `k_max`, clamped into `1..=K_MAX`.
    pub fn new(k_max: u32) -> Self {
        Tower {
            k_max: k_max.clamp(1, K_MAX),
        }
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub(crate) fn exhausted(&self, what: impl Into<String>) -> StructureError {
        StructureError::NotFoundWithinTower {
            what: what.into(),
            k_max: self.k_max,
        }
    }
}
