//! Matrix files, vector literals and report output.

use std::fs;
use std::path::Path;

use locspec::linalg::MatrixFile;
use locspec::{GaussianRational, Matrix, Vector};

use crate::error::CliError;

/// Parses a `{"dim": n, "entries": [[SCALAR, ...], ...]}` document.
pub fn parse_matrix(text: &str) -> Result<Matrix, String> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    file.to_matrix()
}

/// Canonical single-line rendering; `parse_matrix(render_matrix(m)) == m`.
pub fn render_matrix(m: &Matrix) -> String {
    serde_json::to_string(&MatrixFile::from(m)).expect("matrix files always serialize")
}

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text).map_err(|message| CliError::Parse {
        path: path.to_path_buf(),
        message,
    })
}

/// Comma-separated scalars, e.g. `"1,2/3-5i,i"`.
pub fn parse_vector(text: &str) -> Result<Vector, CliError> {
    text.split(',')
        .enumerate()
        .map(|(k, s)| {
            s.trim()
                .parse::<GaussianRational>()
                .map_err(|e| CliError::Usage(format!("--vec entry {k}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Vector::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_shift_file() {
        let m = parse_matrix(r#"{"dim":2,"entries":[["0","1"],["0","0"]]}"#).unwrap();
        assert_eq!(m, Matrix::from_int_rows(&[&[0, 1], &[0, 0]]));
        assert_eq!(parse_matrix(&render_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn dim_mismatch_is_positioned() {
        let err = parse_matrix(r#"{"dim":3,"entries":[["0","1"],["0","0"]]}"#).unwrap_err();
        assert!(err.contains("entries"), "{err}");
    }

    #[test]
    fn vector_literals() {
        let v = parse_vector("1, 2/3-5i ,i").unwrap();
        assert_eq!(v[1], "2/3-5i".parse().unwrap());
        assert!(parse_vector("1,-i").is_err());
    }
}
