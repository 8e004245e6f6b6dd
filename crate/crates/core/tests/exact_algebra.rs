//! Exact arithmetic and elimination checked against independent oracles.

use locspec::linalg::{null_space, rank_of_vectors, rref, solve, Matrix, MatrixFile, Vector};
use locspec::sample::Sampler;
use locspec::{GaussianRational, Subspace};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn gr(rn: i64, rd: i64, inn: i64, id: i64) -> GaussianRational {
    GaussianRational::from_fractions(rn, rd, inn, id)
}

fn scalar() -> impl Strategy<Value = GaussianRational> {
    (-9i64..=9, 1i64..=7, -9i64..=9, 1i64..=7).prop_map(|(a, b, c, d)| gr(a, b, c, d))
}

/// Laplace expansion along the first row; independent of elimination.
fn det(m: &[Vec<GaussianRational>]) -> GaussianRational {
    let n = m.len();
    if n == 0 {
        return GaussianRational::one();
    }
    let mut total = GaussianRational::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<GaussianRational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * &det(&minor);
        if j % 2 == 0 {
            total += &term;
        } else {
            total -= &term;
        }
    }
    total
}

fn matrix_strategy(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n, any::<u64>(), 0u8..3).prop_map(|(n, seed, kind)| {
        let mut rng = Sampler::new(seed);
        match kind {
            0 => rng.matrix(n),
            1 => rng.sparse_matrix(n, 0.3),
            _ => {
                let r = rng.usize_in(0, n);
                if r == 0 {
                    Matrix::zeros(n)
                } else {
                    rng.rank_exactly(n, r)
                }
            }
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if let Some(inv) = a.inv() {
            prop_assert_eq!(&a * &inv, GaussianRational::one());
            prop_assert_eq!(&(&b / &a) * &a, b.clone());
        } else {
            prop_assert!(a.is_zero());
        }
        prop_assert_eq!(a.norm_sqr(), (&a * &a.conj()).re().clone());
    }

    #[test]
    fn scalar_text_round_trip(a in scalar()) {
        let text = a.to_string();
        let back: GaussianRational = text.parse().unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn exact_square_roots(a in scalar()) {
        let sq = &a * &a;
        let r = sq.sqrt().unwrap();
        prop_assert_eq!(&r * &r, sq);
    }

    #[test]
    fn rank_agrees_with_determinant(m in matrix_strategy(4)) {
        let full = m.rank() == m.dim();
        prop_assert_eq!(full, !det(&m.rows()).is_zero());
        prop_assert_eq!(m.inverse().is_some(), full);
        if let Some(inv) = m.inverse() {
            prop_assert_eq!(&m * &inv, Matrix::identity(m.dim()));
        }
    }

    #[test]
    fn determinant_is_multiplicative(a in matrix_strategy(3), seed in any::<u64>()) {
        let b = Sampler::new(seed).matrix(a.dim());
        prop_assert_eq!(det(&(&a * &b).rows()), &det(&a.rows()) * &det(&b.rows()));
    }

    #[test]
    fn kernel_has_complementary_dimension(m in matrix_strategy(6)) {
        let n = m.dim();
        let kernel = null_space(&m.rows(), n);
        prop_assert_eq!(kernel.len() + m.rank(), n);
        for v in &kernel {
            prop_assert!(m.apply(&Vector::new(v.clone())).is_zero());
        }
        let vs: Vec<Vector> = kernel.into_iter().map(Vector::new).collect();
        let refs: Vec<&Vector> = vs.iter().collect();
        prop_assert_eq!(rank_of_vectors(&refs), vs.len());
    }

    #[test]
    fn rref_is_reduced_and_row_equivalent(m in matrix_strategy(5)) {
        let n = m.dim();
        let r = rref(&m.rows(), n);
        prop_assert_eq!(r.rank(), r.pivots.len());
        for (k, &p) in r.pivots.iter().enumerate() {
            prop_assert!(r.rows[k][p].is_one());
            for (i, row) in r.rows.iter().enumerate() {
                if i != k {
                    prop_assert!(row[p].is_zero());
                }
            }
            prop_assert!(r.rows[k][..p].iter().all(Zero::is_zero));
        }
        // Same row space: each reduced row lies in the span of the original rows.
        let original = Subspace::span(n, &m.rows().into_iter().map(Vector::new).collect::<Vec<_>>()).unwrap();
        let reduced = Subspace::span(n, &r.rows.iter().cloned().map(Vector::new).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(original, reduced);
    }

    #[test]
    fn solve_returns_solutions(m in matrix_strategy(5), seed in any::<u64>()) {
        let mut rng = Sampler::new(seed);
        let x = rng.vector(m.dim());
        let b = m.apply(&x);
        let sol = solve(&m.rows(), m.dim(), b.entries()).unwrap();
        prop_assert_eq!(m.apply(&Vector::new(sol)), b);
    }

    #[test]
    fn subspace_dimension_formula(n in 2usize..6, seed in any::<u64>()) {
        let mut rng = Sampler::new(seed);
        let ku = rng.usize_in(0, n);
        let kv = rng.usize_in(0, n);
        let u = Subspace::span(n, &(0..ku).map(|_| rng.small_vector(n)).collect::<Vec<_>>()).unwrap();
        let v = Subspace::span(n, &(0..kv).map(|_| rng.small_vector(n)).collect::<Vec<_>>()).unwrap();
        let sum = u.sum(&v).unwrap();
        let cap = u.intersect(&v).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), u.dim() + v.dim());
        prop_assert!(cap.is_subspace_of(&u).unwrap() && cap.is_subspace_of(&v).unwrap());
        prop_assert!(u.is_subspace_of(&sum).unwrap() && v.is_subspace_of(&sum).unwrap());
    }

    #[test]
    fn matrix_file_round_trip(m in matrix_strategy(5)) {
        let text = serde_json::to_string(&m).unwrap();
        let back: Matrix = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

#[test]
fn positioned_parse_errors() {
    let bad: MatrixFile =
        serde_json::from_str(r#"{"dim":2,"entries":[["0","1"],["0","x"]]}"#).unwrap();
    assert!(bad.to_matrix().unwrap_err().starts_with("entries[1][1]"));
    let ragged: MatrixFile = serde_json::from_str(r#"{"dim":2,"entries":[["0","1"],["0"]]}"#).unwrap();
    assert!(ragged.to_matrix().unwrap_err().starts_with("entries[1]"));
    let shift: Matrix = serde_json::from_str(r#"{"dim":2,"entries":[["0","1"],["0","0"]]}"#).unwrap();
    assert_eq!(shift, Matrix::from_int_rows(&[&[0, 1], &[0, 0]]));
}
