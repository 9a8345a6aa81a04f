//! Matrix Market coordinate format (real, general, 1-based indices).
//!
//! Values are written with shortest round-trip formatting, so an export
//! followed by an import reproduces the matrix bitwise after canonical
//! sorting.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use emqs_core::sparse::{Coo, Csr};

pub const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

pub fn write<W: Write>(mut w: W, m: &Csr) -> io::Result<()> {
    writeln!(w, "{HEADER}")?;
    writeln!(w, "{} {} {}", m.nrows, m.ncols, m.nnz())?;
    for (r, c, v) in m.iter() {
        writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
    }
    Ok(())
}

pub fn write_file(path: &Path, m: &Csr) -> io::Result<()> {
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    write(&mut f, m)?;
    f.flush()
}

pub fn read<R: Read>(r: R) -> Result<Csr, Error> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines().enumerate();

    let (n, header) = lines
        .next()
        .ok_or(Error::Format { line: 1, message: "empty file".into() })?;
    let header = header?;
    if header.trim() != HEADER {
        return Err(Error::Format {
            line: n + 1,
            message: format!("expected header `{HEADER}`, found `{header}`"),
        });
    }

    let mut dims: Option<(usize, usize, usize)> = None;
    let mut coo: Option<Coo> = None;
    let mut seen = 0usize;
    for (idx, line) in lines {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        match dims {
            None => {
                if fields.len() != 3 {
                    return Err(Error::Format {
                        line: idx + 1,
                        message: "size line must be `rows cols nnz`".into(),
                    });
                }
                let parse = |s: &str| -> Result<usize, Error> {
                    s.parse().map_err(|_| Error::Format {
                        line: idx + 1,
                        message: format!("invalid size `{s}`"),
                    })
                };
                let d = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                coo = Some(Coo::new(d.0, d.1));
                dims = Some(d);
            }
            Some((nrows, ncols, _)) => {
                if fields.len() != 3 {
                    return Err(Error::Format {
                        line: idx + 1,
                        message: "entry line must be `row col value`".into(),
                    });
                }
                let row: usize = fields[0].parse().map_err(|_| Error::Format {
                    line: idx + 1,
                    message: format!("invalid row index `{}`", fields[0]),
                })?;
                let col: usize = fields[1].parse().map_err(|_| Error::Format {
                    line: idx + 1,
                    message: format!("invalid column index `{}`", fields[1]),
                })?;
                let value: f64 = fields[2].parse().map_err(|_| Error::Format {
                    line: idx + 1,
                    message: format!("invalid value `{}`", fields[2]),
                })?;
                if row == 0 || row > nrows || col == 0 || col > ncols {
                    return Err(Error::Format {
                        line: idx + 1,
                        message: format!("index ({row}, {col}) outside {nrows} x {ncols}"),
                    });
                }
                coo.as_mut().expect("dims parsed").push(row - 1, col - 1, value);
                seen += 1;
            }
        }
    }
    let (_, _, nnz) = dims.ok_or(Error::Format { line: 2, message: "missing size line".into() })?;
    if seen != nnz {
        return Err(Error::Format {
            line: 0,
            message: format!("size line promised {nnz} entries, found {seen}"),
        });
    }
    Ok(coo.expect("dims parsed").to_csr())
}

pub fn read_file(path: &Path) -> Result<Csr, Error> {
    read(fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Csr {
        let mut coo = Coo::new(3, 2);
        coo.push(0, 0, 1.5);
        coo.push(2, 1, -0.125);
        coo.push(1, 0, 1.0 / 3.0);
        coo.to_csr()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let m = sample();
        let mut buf = Vec::new();
        write(&mut buf, &m).unwrap();
        let back = read(buf.as_slice()).unwrap();
        assert_eq!(m.max_abs_diff(&back), 0.0);
        assert_eq!(m.nnz(), back.nnz());
        let mut buf2 = Vec::new();
        write(&mut buf2, &back).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn header_is_the_standard_one() {
        let mut buf = Vec::new();
        write(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n"));
        assert!(text.contains("\n3 2 3\n"));
    }

    #[test]
    fn bad_header_is_rejected() {
        let err = read("%%MatrixMarket matrix array real general\n1 1 0\n".as_bytes());
        assert!(matches!(err, Err(Error::Format { line: 1, .. })));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let err = read(format!("{HEADER}\n2 2 1\n3 1 1.0\n").as_bytes());
        assert!(matches!(err, Err(Error::Format { line: 3, .. })));
    }

    #[test]
    fn entry_count_mismatch_is_rejected() {
        let err = read(format!("{HEADER}\n2 2 2\n1 1 1.0\n").as_bytes());
        assert!(matches!(err, Err(Error::Format { .. })));
    }
}
