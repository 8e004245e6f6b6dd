//! Certificate-producing constructions on operator pairs.
//!
//! * [`affine`]: decide whether `T = λI + μS`, or exhibit `x` with
//!   `Tx ∉ span{x, Sx}`.
//! * [`rank_one`]: rank-one detection through `dim K(TA + AT) ≤ 2`, with an
//!   explicit `T` inflating the core to dimension 3 when `rank A ≥ 2`.
//! * [`proportional`]: decide whether `B = λA`, or exhibit a rank-one `F`
//!   with `K(AF + FA) ≠ K(BF + FB)`.
//!
//! Candidate vectors are visited in a fixed order (standard basis, sums of
//! pairs of basis vectors, then seeded random vectors) so every result is
//! reproducible from its seed.

pub mod affine;
pub mod proportional;
pub mod rank_one;

pub use affine::{affine_combo_recover, AffineComboResult};
pub use proportional::{proportionality_test, ProportionalityCase, ProportionalityResult};
pub use rank_one::{
    construct_core_inflating_operator, rank_one_by_core_criterion, ProofCase, RankOneVerdict,
};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::sample::Sampler;

/// Deterministic candidate vectors: `e_i`, then `e_i + e_j` for `i < j`, then
/// seeded random vectors with small Gaussian-integer entries.
pub struct VectorSweep {
    n: usize,
    structured: Vec<Vector>,
    position: usize,
    sampler: Sampler,
}

impl VectorSweep {
    pub fn new(n: usize, seed: u64) -> Self {
        let mut structured: Vec<Vector> = (0..n).map(|k| Vector::unit(n, k)).collect();
        for i in 0..n {
            for j in i + 1..n {
                structured.push(&Vector::unit(n, i) + &Vector::unit(n, j));
            }
        }
        Self {
            n,
            structured,
            position: 0,
            sampler: Sampler::new(seed),
        }
    }

    /// Number of structured candidates before the random tail starts.
    pub fn structured_len(&self) -> usize {
        self.structured.len()
    }
}

impl Iterator for VectorSweep {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        let v = match self.structured.get(self.position) {
            Some(v) => v.clone(),
            None => self.sampler.small_vector(self.n),
        };
        self.position += 1;
        Some(v)
    }
}

/// Builds the operator sending each `domain[k]` to `images[k]` and vanishing
/// on a complement of `span(domain)` made of standard basis vectors.
pub fn operator_from_images(domain: &[Vector], images: &[Vector]) -> Result<Matrix> {
    assert_eq!(domain.len(), images.len(), "one image per domain vector");
    let n = domain
        .first()
        .map(Vector::dim)
        .ok_or_else(|| Error::InvalidArgument("empty domain".into()))?;
    let refs: Vec<&Vector> = domain.iter().collect();
    if crate::linalg::rank_of_vectors(&refs) != domain.len() {
        return Err(Error::InvalidArgument("domain vectors are dependent".into()));
    }
    let mut basis: Vec<Vector> = domain.to_vec();
    let mut targets: Vec<Vector> = images.to_vec();
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let e = Vector::unit(n, k);
        let mut trial: Vec<&Vector> = basis.iter().collect();
        trial.push(&e);
        if crate::linalg::rank_of_vectors(&trial) > basis.len() {
            basis.push(e);
            targets.push(Vector::zeros(n));
        }
    }
    let basis_matrix = Matrix::from_columns(&basis)?;
    let target_matrix = Matrix::from_columns(&targets)?;
    let inverse = basis_matrix
        .inverse()
        .expect("extended domain is a basis");
    Ok(&target_matrix * &inverse)
}
