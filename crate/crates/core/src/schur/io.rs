//! Matrix serialization: CSV with complex entries written `a+bi`, and a
//! compact binary dump (`SCHR1`, u64 rows, u64 cols, row-major LE f64 pairs).

use std::io::{Read, Write};

use super::SchurError;
use crate::linalg::{CMatrix, C64};

const MAGIC: &[u8; 5] = b"SCHR1";

fn parse_real(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parses `3`, `-1.5e-3`, `2i`, `-i`, `1+2i`, `1.5e-3-4i`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return parse_real(s).map(|re| C64::new(re, 0.0));
    };
    // split at the last sign that is not part of an exponent and not leading
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => parse_real(x)?,
    };
    Some(C64::new(re, im))
}

pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:e}", z.re)
    } else if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{:e}-{:e}i", z.re, -z.im)
    } else {
        format!("{:e}+{:e}i", z.re, z.im)
    }
}

pub fn read_csv<R: Read>(mut r: R) -> Result<CMatrix, SchurError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                parse_complex(f).ok_or_else(|| SchurError::Parse(format!("line {}: bad entry `{}`", ln + 1, f.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(SchurError::Parse(format!("line {}: ragged row", ln + 1)));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(SchurError::Empty);
    }
    let cols = rows[0].len();
    Ok(CMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn write_csv<W: Write>(m: &CMatrix, mut w: W) -> Result<(), SchurError> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_binary<W: Write>(m: &CMatrix, mut w: W) -> Result<(), SchurError> {
    w.write_all(MAGIC)?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].re.to_le_bytes())?;
            w.write_all(&m[(i, j)].im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<CMatrix, SchurError> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SchurError::Parse("bad magic bytes".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let count = rows
        .checked_mul(cols)
        .filter(|&c| c <= 1 << 28)
        .ok_or_else(|| SchurError::Parse("implausible dimensions".into()))?;
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let im = f64::from_le_bytes(word);
        data.push(C64::new(re, im));
    }
    Ok(CMatrix::from_row_iterator(rows, cols, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("3"), Some(C64::new(3.0, 0.0)));
        assert_eq!(parse_complex("-2i"), Some(C64::new(0.0, -2.0)));
        assert_eq!(parse_complex("i"), Some(C64::new(0.0, 1.0)));
        assert_eq!(parse_complex("1+2i"), Some(C64::new(1.0, 2.0)));
        assert_eq!(parse_complex("1e-3-4.5i"), Some(C64::new(1e-3, -4.5)));
        assert_eq!(parse_complex("-1e+2+1e-2i"), Some(C64::new(-100.0, 0.01)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex("nan"), None);
    }

    #[test]
    fn csv_round_trip() {
        let m = CMatrix::from_fn(2, 3, |i, j| C64::new(i as f64 - 0.25, j as f64 * -1.5));
        let mut buf = Vec::new();
        write_csv(&m, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn malformed_csv() {
        assert!(matches!(read_csv("1,2\n3".as_bytes()), Err(SchurError::Parse(_))));
        assert!(matches!(read_csv("1,x".as_bytes()), Err(SchurError::Parse(_))));
        assert!(matches!(read_csv("".as_bytes()), Err(SchurError::Empty)));
    }

    #[test]
    fn binary_round_trip() {
        let m = CMatrix::from_fn(3, 2, |i, j| C64::new(i as f64, -(j as f64) / 3.0));
        let mut buf = Vec::new();
        write_binary(&m, &mut buf).unwrap();
        assert_eq!(&buf[..5], b"SCHR1");
        assert_eq!(buf.len(), 5 + 16 + 6 * 16);
        assert_eq!(read_binary(buf.as_slice()).unwrap(), m);
        buf[0] = b'X';
        assert!(read_binary(buf.as_slice()).is_err());
    }
}
