//! Matrix Market exchange format: coordinate and array storage, real and
//! complex fields, general / symmetric / hermitian / skew-symmetric.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use quotient_core::{DenseMatrix, C64};

use crate::error::{CliError, Result};

/// Dimension above which [`Triplets::to_dense`] refuses by default.
pub const DEFAULT_DENSE_CAP: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixMarketHeader {
    pub format: Format,
    pub field: Field,
    pub symmetry: Symmetry,
}

impl FromStr for MatrixMarketHeader {
    type Err = CliError;

    fn from_str(line: &str) -> Result<Self> {
        let bad = |m: &str| CliError::parse(1, m);
        let lower = line.trim().to_ascii_lowercase();
        let mut words = lower.split_whitespace();
        if words.next() != Some("%%matrixmarket") {
            return Err(bad("missing %%MatrixMarket banner"));
        }
        if words.next() != Some("matrix") {
            return Err(bad("only the matrix object is supported"));
        }
        let format = match words.next() {
            Some("coordinate") => Format::Coordinate,
            Some("array") => Format::Array,
            _ => return Err(bad("format must be coordinate or array")),
        };
        let field = match words.next() {
            Some("real") | Some("double") | Some("integer") => Field::Real,
            Some("complex") => Field::Complex,
            Some("pattern") => Field::Pattern,
            _ => return Err(bad("field must be real, integer, complex or pattern")),
        };
        let symmetry = match words.next() {
            Some("general") => Symmetry::General,
            Some("symmetric") => Symmetry::Symmetric,
            Some("hermitian") => Symmetry::Hermitian,
            Some("skew-symmetric") => Symmetry::SkewSymmetric,
            _ => return Err(bad("unknown symmetry")),
        };
        if words.next().is_some() {
            return Err(bad("trailing words in banner"));
        }
        if field == Field::Pattern {
            return Err(bad("pattern unsupported"));
        }
        if symmetry == Symmetry::Hermitian && field != Field::Complex {
            return Err(bad("hermitian storage needs the complex field"));
        }
        Ok(Self { format, field, symmetry })
    }
}

impl fmt::Display for MatrixMarketHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let format = match self.format {
            Format::Coordinate => "coordinate",
            Format::Array => "array",
        };
        let field = match self.field {
            Field::Real => "real",
            Field::Complex => "complex",
            Field::Pattern => "pattern",
        };
        let symmetry = match self.symmetry {
            Symmetry::General => "general",
            Symmetry::Symmetric => "symmetric",
            Symmetry::Hermitian => "hermitian",
            Symmetry::SkewSymmetric => "skew-symmetric",
        };
        write!(f, "%%MatrixMarket matrix {format} {field} {symmetry}")
    }
}

/// Full (mirrored) 0-based entry list. Duplicates are kept and summed on
/// conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct Triplets {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl Triplets {
    pub fn to_dense(&self, cap: usize) -> Result<DenseMatrix> {
        let n = self.rows.max(self.cols);
        if n > cap {
            return Err(CliError::Overflow { n, cap });
        }
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        Ok(m)
    }

    /// Rows with no stored nonzero.
    pub fn empty_rows(&self) -> usize {
        let mut seen = vec![false; self.rows];
        for &(i, _, v) in &self.entries {
            if v != C64::new(0.0, 0.0) {
                seen[i] = true;
            }
        }
        seen.iter().filter(|s| !**s).count()
    }
}

fn parse_index(tok: Option<&str>, bound: usize, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| CliError::parse(line, "missing index"))?;
    let i: usize = tok.parse().map_err(|_| CliError::parse(line, format!("bad index {tok:?}")))?;
    if i == 0 || i > bound {
        return Err(CliError::parse(line, format!("index {i} outside 1..={bound}")));
    }
    Ok(i - 1)
}

fn parse_value<'a>(words: &mut impl Iterator<Item = &'a str>, field: Field, line: usize) -> Result<C64> {
    let mut next = || -> Result<f64> {
        let tok = words.next().ok_or_else(|| CliError::parse(line, "missing value"))?;
        tok.parse().map_err(|_| CliError::parse(line, format!("bad value {tok:?}")))
    };
    match field {
        Field::Real => Ok(C64::new(next()?, 0.0)),
        Field::Complex => Ok(C64::new(next()?, next()?)),
        Field::Pattern => Err(CliError::parse(line, "pattern unsupported")),
    }
}

fn push_mirrored(entries: &mut Vec<(usize, usize, C64)>, sym: Symmetry, i: usize, j: usize, v: C64, line: usize) -> Result<()> {
    if sym != Symmetry::General && i < j {
        return Err(CliError::parse(line, "symmetric storage must list the lower triangle"));
    }
    entries.push((i, j, v));
    if i != j {
        match sym {
            Symmetry::General => {}
            Symmetry::Symmetric => entries.push((j, i, v)),
            Symmetry::Hermitian => entries.push((j, i, v.conj())),
            Symmetry::SkewSymmetric => entries.push((j, i, -v)),
        }
    } else if sym == Symmetry::SkewSymmetric && v != C64::new(0.0, 0.0) {
        return Err(CliError::parse(line, "skew-symmetric diagonal must be zero"));
    }
    Ok(())
}

/// Parses Matrix Market text from a line source.
pub fn parse_lines<I, S>(lines: I) -> Result<(MatrixMarketHeader, Triplets)>
where
    I: IntoIterator<Item = std::io::Result<S>>,
    S: AsRef<str>,
{
    let mut lines = lines.into_iter().enumerate().map(|(k, l)| (k + 1, l));
    let read_err = |k: usize, e: std::io::Error| CliError::parse(k, e.to_string());
    let header: MatrixMarketHeader = match lines.next() {
        Some((k, l)) => l.map_err(|e| read_err(k, e))?.as_ref().parse()?,
        None => return Err(CliError::parse(1, "empty file")),
    };
    let mut data = lines.filter_map(|(k, l)| match l {
        Ok(s) => {
            let t = s.as_ref().trim();
            (!t.is_empty() && !t.starts_with('%')).then(|| Ok((k, t.to_string())))
        }
        Err(e) => Some(Err(read_err(k, e))),
    });
    let (size_line, size) = data.next().ok_or_else(|| CliError::parse(1, "missing size line"))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|w| w.parse().map_err(|_| CliError::parse(size_line, format!("bad size {w:?}"))))
        .collect::<Result<_>>()?;
    let mut entries = Vec::new();
    let (rows, cols) = match (header.format, dims.as_slice()) {
        (Format::Coordinate, &[rows, cols, nnz]) => {
            entries.reserve(if header.symmetry == Symmetry::General { nnz } else { 2 * nnz });
            let mut count = 0;
            for item in data.by_ref() {
                let (k, line) = item?;
                if count == nnz {
                    return Err(CliError::parse(k, "more entries than declared"));
                }
                let mut w = line.split_whitespace();
                let i = parse_index(w.next(), rows, k)?;
                let j = parse_index(w.next(), cols, k)?;
                let v = parse_value(&mut w, header.field, k)?;
                if w.next().is_some() {
                    return Err(CliError::parse(k, "trailing tokens"));
                }
                push_mirrored(&mut entries, header.symmetry, i, j, v, k)?;
                count += 1;
            }
            if count != nnz {
                return Err(CliError::parse(size_line, format!("declared {nnz} entries, found {count}")));
            }
            (rows, cols)
        }
        (Format::Array, &[rows, cols]) => {
            if header.symmetry != Symmetry::General && rows != cols {
                return Err(CliError::parse(size_line, "symmetric storage needs a square matrix"));
            }
            let mut slots = Vec::new();
            for j in 0..cols {
                let start = match header.symmetry {
                    Symmetry::General => 0,
                    Symmetry::SkewSymmetric => j + 1,
                    _ => j,
                };
                slots.extend((start..rows).map(|i| (i, j)));
            }
            let mut it = slots.into_iter();
            for item in data.by_ref() {
                let (k, line) = item?;
                let Some((i, j)) = it.next() else {
                    return Err(CliError::parse(k, "more values than the array holds"));
                };
                let mut w = line.split_whitespace();
                let v = parse_value(&mut w, header.field, k)?;
                if w.next().is_some() {
                    return Err(CliError::parse(k, "trailing tokens"));
                }
                push_mirrored(&mut entries, header.symmetry, i, j, v, k)?;
            }
            if it.next().is_some() {
                return Err(CliError::parse(size_line, "fewer values than the array holds"));
            }
            (rows, cols)
        }
        _ => return Err(CliError::parse(size_line, "size line does not match the format")),
    };
    Ok((header, Triplets { rows, cols, entries }))
}

pub fn parse_str(text: &str) -> Result<(MatrixMarketHeader, Triplets)> {
    parse_lines(text.lines().map(Ok::<_, std::io::Error>))
}

pub fn read_triplets(path: &Path) -> Result<(MatrixMarketHeader, Triplets)> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_lines(BufReader::new(file).lines())
}

/// Dense matrix from a file, refusing dimensions above `cap`.
pub fn read_matrix_market(path: &Path, cap: usize) -> Result<DenseMatrix> {
    read_triplets(path)?.1.to_dense(cap)
}

/// Coordinate format. Real matrices are written with the real field, and
/// with symmetric storage when `symmetric` is set and the matrix is exactly
/// symmetric. Values use the shortest round-trip representation.
pub fn write_matrix_market(out: &mut impl Write, m: &DenseMatrix, symmetric: bool) -> std::io::Result<()> {
    let real = m.is_real();
    let sym = symmetric && m.is_square() && m.sub(&m.transpose()).max_abs() == 0.0;
    let header = MatrixMarketHeader {
        format: Format::Coordinate,
        field: if real { Field::Real } else { Field::Complex },
        symmetry: if sym { Symmetry::Symmetric } else { Symmetry::General },
    };
    let zero = C64::new(0.0, 0.0);
    let keep = |i: usize, j: usize| (!sym || i >= j) && m[(i, j)] != zero;
    let nnz = (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).filter(|&(i, j)| keep(i, j)).count();
    writeln!(out, "{header}")?;
    writeln!(out, "{} {} {}", m.rows(), m.cols(), nnz)?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            if !keep(i, j) {
                continue;
            }
            let v = m[(i, j)];
            if real {
                writeln!(out, "{} {} {:e}", i + 1, j + 1, v.re)?;
            } else {
                writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im)?;
            }
        }
    }
    Ok(())
}
