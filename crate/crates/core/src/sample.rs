//! Seeded generators for exact test operators.
//!
//! Entries are Gaussian rationals whose real and imaginary parts have
//! numerators in `[-5, 5]` and denominators in `[1, 5]`. Structured families
//! (low rank, nilpotent, planted spectrum) are built from those entries.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{Functional, Matrix, Vector};
use crate::scalar::GaussianRational;

/// Mixes a run seed with a stream label and a trial index, so each trial can
/// be regenerated on its own regardless of evaluation order.
pub fn trial_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn for_trial(seed: u64, stream: u64, index: u64) -> Self {
        Self::new(trial_seed(seed, stream, index))
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn usize_in(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn u64(&mut self) -> u64 {
        self.rng.gen()
    }

    /// Entry from the documented distribution.
    pub fn scalar(&mut self) -> GaussianRational {
        let mut part = || (self.rng.gen_range(-5..=5i64), self.rng.gen_range(1..=5i64));
        let (a, b) = part();
        let (c, d) = part();
        GaussianRational::from_fractions(a, b, c, d)
    }

    pub fn nonzero_scalar(&mut self) -> GaussianRational {
        loop {
            let z = self.scalar();
            if !num_traits::Zero::is_zero(&z) {
                return z;
            }
        }
    }

    /// Gaussian integer with both parts in `[-bound, bound]`.
    pub fn gaussian_integer(&mut self, bound: i64) -> GaussianRational {
        GaussianRational::from_ints(
            self.rng.gen_range(-bound..=bound),
            self.rng.gen_range(-bound..=bound),
        )
    }

    pub fn vector(&mut self, n: usize) -> Vector {
        Vector::new((0..n).map(|_| self.scalar()).collect())
    }

    pub fn nonzero_vector(&mut self, n: usize) -> Vector {
        loop {
            let v = self.vector(n);
            if !v.is_zero() {
                return v;
            }
        }
    }

    /// Vector with small Gaussian-integer entries, for witness sweeps.
    pub fn small_vector(&mut self, n: usize) -> Vector {
        Vector::new((0..n).map(|_| self.gaussian_integer(2)).collect())
    }

    pub fn functional(&mut self, n: usize) -> Functional {
        Functional::new((0..n).map(|_| self.scalar()).collect())
    }

    pub fn matrix(&mut self, n: usize) -> Matrix {
        Matrix::from_fn(n, |_, _| self.scalar())
    }

    /// Matrix with a random fraction of its entries zeroed.
    pub fn sparse_matrix(&mut self, n: usize, density: f64) -> Matrix {
        Matrix::from_fn(n, |_, _| {
            if self.rng.gen_bool(density) {
                self.scalar()
            } else {
                GaussianRational::default()
            }
        })
    }

    /// Invertible matrix with small Gaussian-integer entries, used for
    /// similarity transforms. Returns `(P, P⁻¹)`.
    pub fn invertible(&mut self, n: usize) -> (Matrix, Matrix) {
        loop {
            let p = Matrix::from_fn(n, |_, _| self.gaussian_integer(2));
            if let Some(inv) = p.inverse() {
                return (p, inv);
            }
        }
    }

    /// Sum of `rank` random rank-one operators with exactly that rank.
    pub fn rank_exactly(&mut self, n: usize, rank: usize) -> Matrix {
        assert!(rank <= n);
        loop {
            let mut m = Matrix::zeros(n);
            for _ in 0..rank {
                let x = self.small_vector(n);
                let f = Functional::new((0..n).map(|_| self.gaussian_integer(2)).collect());
                m = &m + &outer(&x, &f);
            }
            if m.rank() == rank {
                return m;
            }
        }
    }

    /// Strictly upper-triangular matrix, optionally conjugated by a random
    /// invertible matrix. Always nilpotent.
    pub fn nilpotent(&mut self, n: usize, conjugate: bool) -> Matrix {
        let strict = Matrix::from_fn(n, |i, j| {
            if j > i {
                self.scalar()
            } else {
                GaussianRational::default()
            }
        });
        if conjugate {
            let (p, p_inv) = self.invertible(n);
            &(&p * &strict) * &p_inv
        } else {
            strict
        }
    }

    /// `P·J·P⁻¹` where `J` is block diagonal with Jordan blocks
    /// `(eigenvalue, size)`. Returns the matrix and `J`.
    pub fn planted(&mut self, blocks: &[(GaussianRational, usize)]) -> (Matrix, Matrix) {
        let n: usize = blocks.iter().map(|(_, s)| s).sum();
        let mut j = Matrix::zeros(n);
        let mut offset = 0;
        for (lambda, size) in blocks {
            for k in 0..*size {
                j[(offset + k, offset + k)] = lambda.clone();
                if k + 1 < *size {
                    j[(offset + k, offset + k + 1)] = GaussianRational::from_int(1);
                }
            }
            offset += size;
        }
        let (p, p_inv) = self.invertible(n);
        (&(&p * &j) * &p_inv, j)
    }

    /// Operator drawn from a mix of dense, sparse, rank-deficient and
    /// nilpotent families, so cores of every dimension show up.
    pub fn mixed_operator(&mut self, n: usize) -> Matrix {
        match self.usize_in(0, 3) {
            0 => self.matrix(n),
            1 => self.sparse_matrix(n, 0.3),
            2 => {
                let r = self.usize_in(1, n.saturating_sub(1).max(1));
                self.rank_exactly(n, r)
            }
            _ => {
                let conjugate = self.coin(0.5);
                self.nilpotent(n, conjugate)
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.rng);
    }
}

fn outer(x: &Vector, f: &Functional) -> Matrix {
    Matrix::from_fn(x.dim(), |i, j| &x[i] * &f[j])
}
