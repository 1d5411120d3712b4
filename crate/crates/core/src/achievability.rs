//! Deciding whether a gate can be realized by the post-selected two-photon
//! scheme. Two independent criteria are provided: one on the canonical
//! angles, one on the canonical weights. They must agree.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::{self, CanonicalTriple, CanonicalWeights, CartanDecomposition};
use crate::error::Result;
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleCondition {
    AlphaMinusBeta,
    AlphaPlusBeta,
    AlphaMinusGamma,
    AlphaPlusGamma,
    BetaMinusGamma,
    BetaPlusGamma,
}

impl AngleCondition {
    pub const ALL: [AngleCondition; 6] = [
        AngleCondition::AlphaMinusBeta,
        AngleCondition::AlphaPlusBeta,
        AngleCondition::AlphaMinusGamma,
        AngleCondition::AlphaPlusGamma,
        AngleCondition::BetaMinusGamma,
        AngleCondition::BetaPlusGamma,
    ];

    pub fn evaluate(self, t: &CanonicalTriple) -> f64 {
        use AngleCondition::*;
        match self {
            AlphaMinusBeta => t.alpha - t.beta,
            AlphaPlusBeta => t.alpha + t.beta,
            AlphaMinusGamma => t.alpha - t.gamma,
            AlphaPlusGamma => t.alpha + t.gamma,
            BetaMinusGamma => t.beta - t.gamma,
            BetaPlusGamma => t.beta + t.gamma,
        }
    }
}

impl fmt::Display for AngleCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AngleCondition::*;
        let s = match self {
            AlphaMinusBeta => "alpha-beta",
            AlphaPlusBeta => "alpha+beta",
            AlphaMinusGamma => "alpha-gamma",
            AlphaPlusGamma => "alpha+gamma",
            BetaMinusGamma => "beta-gamma",
            BetaPlusGamma => "beta+gamma",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// An angle combination equal to `target` (0 or pi/2) modulo pi.
    Angle {
        condition: AngleCondition,
        target: f64,
        residual: f64,
    },
    /// `w1 + s2 w2 + s3 w3 + s4 w4 = 0` with `signs = [s2, s3, s4]`;
    /// `branch` is the matching `(b1, b2, b4)` of the construction.
    SignedSum {
        signs: [i8; 3],
        branch: [i8; 3],
        residual: f64,
    },
    /// `w_index = 0` (1-based index).
    ZeroWeight { index: usize, residual: f64 },
}

impl Witness {
    pub fn residual(&self) -> f64 {
        match *self {
            Witness::Angle { residual, .. }
            | Witness::SignedSum { residual, .. }
            | Witness::ZeroWeight { residual, .. } => residual,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Angle {
                condition, target, ..
            } => {
                let t = if *target == 0.0 { "0" } else { "pi/2" };
                write!(f, "{condition} = {t} (mod pi)")
            }
            Witness::SignedSum { signs, .. } => {
                let s = |x: i8| if x > 0 { '+' } else { '-' };
                write!(
                    f,
                    "w1 {} w2 {} w3 {} w4 = 0",
                    s(signs[0]),
                    s(signs[1]),
                    s(signs[2])
                )
            }
            Witness::ZeroWeight { index, .. } => write!(f, "w{index} = 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AchievabilityVerdict {
    pub achievable: bool,
    /// The condition closest to exact satisfaction (first in enumeration
    /// order on ties).
    pub witness: Witness,
    /// Residual of `witness`.
    pub residual: f64,
    pub tolerance: f64,
    /// Every condition satisfied within tolerance, in enumeration order.
    pub satisfied: Vec<Witness>,
}

impl AchievabilityVerdict {
    fn from_candidates(candidates: Vec<Witness>, tol: f64) -> Self {
        let witness = *candidates
            .iter()
            .reduce(|best, w| if w.residual() < best.residual() { w } else { best })
            .expect("candidate list is never empty");
        let satisfied: Vec<Witness> = candidates
            .into_iter()
            .filter(|w| w.residual() <= tol)
            .collect();
        Self {
            achievable: !satisfied.is_empty(),
            residual: witness.residual(),
            witness,
            tolerance: tol,
            satisfied,
        }
    }
}

/// Distance from `x` to the nearest multiple of pi/2, and that multiple
/// reduced to {0, pi/2}.
fn lattice_distance(x: f64) -> (f64, f64) {
    let n = (x / FRAC_PI_2).round();
    let target = if (n as i64).rem_euclid(2) == 0 { 0.0 } else { FRAC_PI_2 };
    ((x - n * FRAC_PI_2).abs(), target)
}

/// Angle criterion: some of `alpha +- beta`, `alpha +- gamma`, `beta +- gamma`
/// is 0 or pi/2 modulo pi, within `tol`.
pub fn check_triple(t: &CanonicalTriple, tol: f64) -> AchievabilityVerdict {
    let candidates = AngleCondition::ALL
        .iter()
        .map(|&condition| {
            let (residual, target) = lattice_distance(condition.evaluate(t));
            Witness::Angle {
                condition,
                target,
                residual,
            }
        })
        .collect();
    AchievabilityVerdict::from_candidates(candidates, tol)
}

/// Sign triples `(b1, b2, b4)` in lexicographic order, -1 before +1.
pub const BRANCH_TRIPLES: [[i8; 3]; 8] = [
    [-1, -1, -1],
    [-1, -1, 1],
    [-1, 1, -1],
    [-1, 1, 1],
    [1, -1, -1],
    [1, -1, 1],
    [1, 1, -1],
    [1, 1, 1],
];

/// Signs `[s2, s3, s4]` of `w1 + s2 w2 + s3 w3 + s4 w4` equivalent to
/// `b2 w2 = b1 b4 w3 - b4 w4 + w1`.
pub fn sum_signs_for_branch([b1, b2, b4]: [i8; 3]) -> [i8; 3] {
    [-b2, b1 * b4, -b4]
}

/// Weight criterion: some `w_i` vanishes or some signed sum
/// `w1 +- w2 +- w3 +- w4` vanishes, within `tol`.
pub fn check_weights(w: &CanonicalWeights, tol: f64) -> AchievabilityVerdict {
    let ws = w.as_array();
    let mut candidates: Vec<Witness> = ws
        .iter()
        .enumerate()
        .map(|(i, wi)| Witness::ZeroWeight {
            index: i + 1,
            residual: wi.norm(),
        })
        .collect();
    for branch in BRANCH_TRIPLES {
        let signs = sum_signs_for_branch(branch);
        let sum = ws[0]
            + ws[1] * f64::from(signs[0])
            + ws[2] * f64::from(signs[1])
            + ws[3] * f64::from(signs[2]);
        candidates.push(Witness::SignedSum {
            signs,
            branch,
            residual: sum.norm(),
        });
    }
    AchievabilityVerdict::from_candidates(candidates, tol)
}

/// KAK-decomposes `w` and applies the angle criterion to its triple.
pub fn check_gate(
    w: &ComplexMatrix,
    tol: f64,
) -> Result<(AchievabilityVerdict, CartanDecomposition)> {
    let decomposition = cartan::kak_decompose(w)?;
    Ok((check_triple(&decomposition.triple, tol), decomposition))
}
