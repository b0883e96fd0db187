//! The plain-text matrix format: a header line `q rows cols`, then the
//! entries in row-major order.  Prime-field entries are residues; entries of
//! a proper extension are discrete logarithms of the chosen primitive
//! element, with `-1` for zero.

use super::field::{Elem, Field};
use super::matrix::FMatrix;
use crate::error::{Error, Result};

pub fn encode_elem(field: &Field, x: Elem) -> i64 {
    if field.is_prime_field() {
        x as i64
    } else {
        field.log(x).map_or(-1, |l| l as i64)
    }
}

pub fn decode_elem(field: &Field, v: i64) -> Result<Elem> {
    if field.is_prime_field() {
        if v < 0 || v >= field.q() as i64 {
            return Err(Error::Parse(format!("entry {v} out of range for F_{}", field.q())));
        }
        Ok(v as Elem)
    } else if v == -1 {
        Ok(0)
    } else if v >= 0 && v < field.q() as i64 - 1 {
        Ok(field.exp(v as u32))
    } else {
        Err(Error::Parse(format!("log index {v} out of range for F_{}", field.q())))
    }
}

pub fn write_matrix(m: &FMatrix) -> String {
    let f = m.field();
    let mut s = format!("{} {} {}\n", f.q(), m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| encode_elem(f, x).to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// Parses one matrix; the field is taken from the header.
pub fn read_matrix(text: &str) -> Result<FMatrix> {
    let mut tokens = text.split_whitespace();
    let mut next = |what: &str| -> Result<i64> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .parse::<i64>()
            .map_err(|e| Error::Parse(format!("{what}: {e}")))
    };
    let q = next("q")?;
    let rows = next("rows")?;
    let cols = next("cols")?;
    if q < 2 || rows < 0 || cols < 0 {
        return Err(Error::Parse("bad header".into()));
    }
    let field = Field::of_order(q as u64)?;
    let mut data = Vec::with_capacity((rows * cols) as usize);
    for _ in 0..rows * cols {
        data.push(decode_elem(&field, next("entry")?)?);
    }
    Ok(FMatrix::from_vec(&field, rows as usize, cols as usize, data))
}

/// Parses a matrix over a given field (the header must agree).
pub fn read_matrix_over(field: &Field, text: &str) -> Result<FMatrix> {
    let m = read_matrix(text)?;
    if m.field().q() != field.q() {
        return Err(Error::Parse(format!("expected a matrix over F_{}, found F_{}", field.q(), m.field().q())));
    }
    Ok(FMatrix::from_vec(field, m.rows(), m.cols(), m.data().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        for q in [2u64, 3, 4, 9] {
            let f = Field::of_order(q).unwrap();
            let data: Vec<Elem> = (0..6).map(|i| (i % q) as Elem).collect();
            let m = FMatrix::from_vec(&f, 2, 3, data);
            let text = write_matrix(&m);
            assert_eq!(read_matrix(&text).unwrap(), m);
        }
        let f4 = Field::of_order(4).unwrap();
        let m = FMatrix::from_rows(&f4, &[vec![0, 1]]);
        assert_eq!(write_matrix(&m), "4 1 2\n-1 0\n");
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_matrix("2 1 2\n0").is_err());
        assert!(read_matrix("6 1 1\n0").is_err());
        assert!(read_matrix("3 1 1\n3").is_err());
    }
}
