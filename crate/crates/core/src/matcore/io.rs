//! Matrix Market dense array format.
//!
//! Written files use the symmetric variant:
//!
//! ```text
//! %%MatrixMarket matrix array real symmetric
//! n n
//! a11
//! a21
//! ...
//! ```
//!
//! with the lower triangle listed column by column, one entry per line, in
//! scientific notation with 17 significant digits. The reader also accepts
//! `general` arrays (full column-major) and symmetrizes them.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use thiserror::Error;

use super::{LinalgError, SymMatrix};

pub const HEADER: &str = "%%MatrixMarket matrix array real symmetric";

#[derive(Debug, Error)]
pub enum MatrixMarketError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid matrix: {0}")]
    Matrix(#[from] LinalgError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> MatrixMarketError {
    MatrixMarketError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn write_matrix_market<W: Write>(a: &SymMatrix, mut w: W) -> std::io::Result<()> {
    let n = a.n();
    writeln!(w, "{HEADER}")?;
    writeln!(w, "{n} {n}")?;
    for j in 0..n {
        for i in j..n {
            writeln!(w, "{:.16e}", a.get(i, j))?;
        }
    }
    w.flush()
}

pub fn read_matrix_market<R: BufRead>(r: R) -> Result<SymMatrix, MatrixMarketError> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, format!("bad header `{header}`")));
    }
    if tokens[2] != "array" {
        return Err(parse_err(1, format!("unsupported format `{}`", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "double" && tokens[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field `{}`", tokens[3])));
    }
    let symmetric = match tokens[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(parse_err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut data = lines.filter_map(|(no, l)| match l {
        Ok(s) => {
            let t = s.trim();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((no, t.to_string())))
            }
        }
        Err(e) => Some(Err(e)),
    });

    let (no, size) = data.next().ok_or_else(|| parse_err(2, "missing size line"))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(no, format!("bad dimension `{t}`"))))
        .collect::<Result<_, _>>()?;
    if dims.len() != 2 {
        return Err(parse_err(no, "size line must hold `rows cols`"));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols }.into());
    }
    let n = rows;

    let mut m = DMatrix::<f64>::zeros(n, n);
    let positions: Box<dyn Iterator<Item = (usize, usize)>> = if symmetric {
        Box::new((0..n).flat_map(move |j| (j..n).map(move |i| (i, j))))
    } else {
        Box::new((0..n).flat_map(move |j| (0..n).map(move |i| (i, j))))
    };
    let mut last_line = no;
    for (i, j) in positions {
        let (no, tok) = data
            .next()
            .ok_or_else(|| parse_err(last_line + 1, "unexpected end of data"))??;
        last_line = no;
        let v: f64 = tok
            .parse()
            .map_err(|_| parse_err(no, format!("bad value `{tok}`")))?;
        m[(i, j)] = v;
        if symmetric {
            m[(j, i)] = v;
        }
    }
    if let Some(extra) = data.next() {
        let (no, _) = extra?;
        return Err(parse_err(no, "trailing data after matrix entries"));
    }
    Ok(SymMatrix::new(m)?)
}

pub fn write_file(a: &SymMatrix, path: &std::path::Path) -> std::io::Result<()> {
    let f = std::fs::File::create(path)?;
    write_matrix_market(a, std::io::BufWriter::new(f))
}

pub fn read_file(path: &std::path::Path) -> Result<SymMatrix, MatrixMarketError> {
    let f = std::fs::File::open(path)?;
    read_matrix_market(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn writes_lower_triangle_column_major() {
        let a = SymMatrix::from_row_slice(2, &[1.0, 0.5, 0.5, 1.0 / 3.0]).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "%%MatrixMarket matrix array real symmetric\n2 2\n\
             1.0000000000000000e0\n5.0000000000000000e-1\n3.3333333333333331e-1\n"
        );
    }

    #[test]
    fn reads_general_and_comments() {
        let text = "%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n2\n2\n5\n";
        let a = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(a.get(1, 0), 2.0);
        assert_eq!(a.get(1, 1), 5.0);
    }

    #[test]
    fn rejects_malformed() {
        let bad_header = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1\n";
        assert!(read_matrix_market(bad_header.as_bytes()).is_err());
        let short = "%%MatrixMarket matrix array real symmetric\n2 2\n1\n0\n";
        assert!(matches!(
            read_matrix_market(short.as_bytes()),
            Err(MatrixMarketError::Parse { line: 5, .. })
        ));
        let junk = "%%MatrixMarket matrix array real symmetric\n1 1\nabc\n";
        assert!(matches!(
            read_matrix_market(junk.as_bytes()),
            Err(MatrixMarketError::Parse { line: 3, .. })
        ));
        let rect = "%%MatrixMarket matrix array real general\n2 1\n1\n2\n";
        assert!(matches!(
            read_matrix_market(rect.as_bytes()),
            Err(MatrixMarketError::Matrix(LinalgError::NotSquare { .. }))
        ));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(n in 1usize..6, seed in proptest::collection::vec(-1e6f64..1e6, 36)) {
            let a = SymMatrix::from_fn(n, |i, j| seed[i * 6 + j] / (1.0 + j as f64 * 7.0)).unwrap();
            let mut buf = Vec::new();
            write_matrix_market(&a, &mut buf).unwrap();
            let b = read_matrix_market(buf.as_slice()).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(a.get(i, j).to_bits(), b.get(i, j).to_bits());
                }
            }
        }
    }
}
