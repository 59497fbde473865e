//! Shared matrix text format.
//!
//! Header line `gf <q> <rows> <cols>` or `int <rows> <cols>`, then one
//! whitespace-separated row per line. Field entries lie in [0, q);
//! integer entries are arbitrary signed decimals.

use num_bigint::BigInt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{FieldMatrix, PrimeField};
use crate::intmat::IntMatrix;

/// A matrix read from text: either over GF(q) or over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixData {
    Field(FieldMatrix),
    Int(IntMatrix),
}

pub fn parse_matrix(text: &str) -> Result<MatrixData> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let parse_usize = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::Parse(format!("bad count {s:?}")))
    };
    match tokens.as_slice() {
        ["gf", q, r, c] => {
            let q = q.parse::<u64>().map_err(|_| Error::Parse(format!("bad modulus {q:?}")))?;
            let field = PrimeField::new(q)?;
            let (rows, cols) = (parse_usize(r)?, parse_usize(c)?);
            let entries = parse_entries(lines, rows, cols, |tok| {
                tok.parse::<u64>().map_err(|_| Error::Parse(format!("bad entry {tok:?}")))
            })?;
            Ok(MatrixData::Field(FieldMatrix::new(field, rows, cols, entries)?))
        }
        ["int", r, c] => {
            let (rows, cols) = (parse_usize(r)?, parse_usize(c)?);
            let entries = parse_entries(lines, rows, cols, |tok| {
                BigInt::from_str(tok).map_err(|_| Error::Parse(format!("bad entry {tok:?}")))
            })?;
            Ok(MatrixData::Int(IntMatrix::new(rows, cols, entries)?))
        }
        _ => Err(Error::Parse(format!("bad header {header:?}"))),
    }
}

fn parse_entries<'a, T>(
    lines: impl Iterator<Item = &'a str>,
    rows: usize,
    cols: usize,
    parse: impl Fn(&str) -> Result<T>,
) -> Result<Vec<T>> {
    let mut entries = Vec::with_capacity(rows * cols);
    let mut count = 0usize;
    for line in lines {
        let row: Vec<&str> = line.split_whitespace().collect();
        if row.len() != cols {
            return Err(Error::Parse(format!("row has {} entries, expected {cols}", row.len())));
        }
        for tok in row {
            entries.push(parse(tok)?);
        }
        count += 1;
    }
    if count != rows {
        return Err(Error::Parse(format!("got {count} rows, expected {rows}")));
    }
    Ok(entries)
}

pub fn write_field_matrix(m: &FieldMatrix) -> String {
    let mut out = format!("gf {} {} {}\n", m.field().modulus(), m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_int_matrix(m: &IntMatrix) -> String {
    let mut out = format!("int {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_matrix(m: &MatrixData) -> String {
    match m {
        MatrixData::Field(m) => write_field_matrix(m),
        MatrixData::Int(m) => write_int_matrix(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let text = "gf 5 2 3\n1 2 0\n4 0 3\n";
        let MatrixData::Field(m) = parse_matrix(text).unwrap() else { panic!() };
        assert_eq!(m.get(1, 0), 4);
        assert_eq!(write_field_matrix(&m), text);
    }

    #[test]
    fn int_round_trip() {
        let text = "int 2 2\n-7 123456789012345678901\n0 9\n";
        let MatrixData::Int(m) = parse_matrix(text).unwrap() else { panic!() };
        assert_eq!(write_int_matrix(&m), text);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("gf 4 1 1\n0\n").is_err()); // modulus not prime
        assert!(parse_matrix("gf 5 1 1\n7\n").is_err()); // entry out of field
        assert!(parse_matrix("gf 5 2 2\n1 2\n").is_err()); // row count
        assert!(parse_matrix("int 1 2\n1\n").is_err()); // column count
        assert!(parse_matrix("float 1 1\n0\n").is_err());
    }
}
