//! Self-contained certificates: each variant carries every operator needed
//! to re-run its exact checks.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lemma::{AffineComboResult, ProportionalityResult, RankOneVerdict};
use crate::linalg::Matrix;
use crate::preserver::{CorollaryMismatch, MapModel, PairCounterexample, StepViolation};
use crate::spectral::CoreChainCertificate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "certificate", rename_all = "snake_case")]
pub enum Certificate {
    CoreChain(CoreChainCertificate),
    AffineCombo {
        t: Matrix,
        s: Matrix,
        result: AffineComboResult,
    },
    RankOne {
        a: Matrix,
        verdict: RankOneVerdict,
    },
    Proportionality {
        a: Matrix,
        b: Matrix,
        result: ProportionalityResult,
    },
    /// Counterexample attributed to a concrete map.
    MapCounterexample {
        map: MapModel,
        pair: PairCounterexample,
    },
    /// Counterexample from a black-box map; only the recorded images are checked.
    PairCounterexample(PairCounterexample),
    StepViolation(StepViolation),
    CorollaryMismatch(CorollaryMismatch),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::CoreChain(_) => "core_chain",
            Self::AffineCombo { .. } => "affine_combo",
            Self::RankOne { .. } => "rank_one",
            Self::Proportionality { .. } => "proportionality",
            Self::MapCounterexample { .. } => "map_counterexample",
            Self::PairCounterexample(_) => "pair_counterexample",
            Self::StepViolation(_) => "step_violation",
            Self::CorollaryMismatch(_) => "corollary_mismatch",
        }
    }

    /// Re-runs the exact checks behind the certificate.
    pub fn replay(&self) -> Result<()> {
        match self {
            Self::CoreChain(c) => c.verify(),
            Self::AffineCombo { t, s, result } => result.verify(t, s),
            Self::RankOne { a, verdict } => verdict.verify(a),
            Self::Proportionality { a, b, result } => result.verify(a, b),
            Self::MapCounterexample { map, pair } => pair.verify_against(map),
            Self::PairCounterexample(p) => p.verify(),
            Self::StepViolation(v) => v.verify(),
            Self::CorollaryMismatch(m) => m.verify(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lemma::affine_combo_recover;
    use crate::linalg::Vector;
    use crate::spectral::core_chain_certificate;

    fn round_trip(c: &Certificate) -> Certificate {
        serde_json::from_str(&serde_json::to_string(c).unwrap()).unwrap()
    }

    #[test]
    fn replay_after_serialization() {
        let t = Matrix::from_int_rows(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, 0]]);
        let chain = core_chain_certificate(&t, &Vector::from_ints(&[1, 1, 0]), 4).unwrap();
        let s = Matrix::from_int_rows(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]]);
        let sq = &s * &s;
        let certs = [
            Certificate::CoreChain(chain),
            Certificate::AffineCombo {
                result: affine_combo_recover(&sq, &s).unwrap(),
                t: sq,
                s,
            },
        ];
        for c in &certs {
            let back = round_trip(c);
            assert_eq!(&back, c);
            back.replay().unwrap();
        }
    }

    #[test]
    fn replay_detects_wrong_operator() {
        let s = Matrix::identity(3);
        let t = Matrix::scalar(3, &4.into());
        let result = affine_combo_recover(&t, &s).unwrap();
        let bad = Certificate::AffineCombo {
            t: Matrix::identity(3),
            s,
            result,
        };
        assert!(bad.replay().is_err());
    }
}
