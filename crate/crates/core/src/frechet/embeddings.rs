use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;

use crate::linalg::Matrix;
use crate::scalar::Real;

use super::{EmbeddingSet, FrechetError};

/// Reads an embedding file: a `D=<dim>` header, then one whitespace-separated
/// vector per line. Gzip input is detected by its magic bytes. Blank lines are
/// ignored.
pub fn read_embeddings<T: Real>(path: &Path) -> Result<EmbeddingSet<T>, FrechetError> {
    let label = path.display().to_string();
    read_embeddings_from(open_text(path)?, &label)
}

/// Opens a possibly gzip-compressed text file.
pub(crate) fn open_text(path: &Path) -> Result<Box<dyn BufRead>, FrechetError> {
    let io_err = |source| FrechetError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = File::open(path).map_err(io_err)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic).map_err(io_err)?;
    let file = File::open(path).map_err(io_err)?;
    Ok(if n == 2 && magic == [0x1f, 0x8b] {
        Box::new(BufReader::new(GzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    })
}

pub fn read_embeddings_from<T: Real, R: BufRead>(reader: R, label: &str) -> Result<EmbeddingSet<T>, FrechetError> {
    let rows = read_rows(reader, label, 1)?;
    let vectors = Matrix::from_rows(&rows.into_iter().map(|(_, r)| r).collect::<Vec<_>>());
    EmbeddingSet::new(vectors, label)
}

/// Parses the header and data lines; each data row must hold
/// `dim * width_factor` values. Returns `(line number, values)` pairs.
pub(crate) fn read_rows<T: Real, R: BufRead>(
    reader: R,
    label: &str,
    width_factor: usize,
) -> Result<Vec<(usize, Vec<T>)>, FrechetError> {
    let format = |line: usize, message: String| FrechetError::Format {
        path: label.to_string(),
        line,
        message,
    };
    let mut dim: Option<usize> = None;
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| FrechetError::Io {
            path: label.to_string(),
            source,
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some(d) = dim else {
            let d = line
                .strip_prefix("D=")
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&d| d > 0)
                .ok_or_else(|| format(line_no, format!("expected header D=<dim>, found {line:?}")))?;
            dim = Some(d);
            continue;
        };
        let values = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .and_then(T::from_f64)
                    .ok_or_else(|| format(line_no, format!("invalid number {tok:?}")))
            })
            .collect::<Result<Vec<T>, _>>()?;
        if values.len() != d * width_factor {
            return Err(format(
                line_no,
                format!("expected {} values, found {}", d * width_factor, values.len()),
            ));
        }
        rows.push((line_no, values));
    }
    if dim.is_none() {
        return Err(format(0, "missing D=<dim> header".into()));
    }
    Ok(rows)
}

/// Writes the plain-text embedding format.
pub fn write_embeddings<T: Real, W: Write>(set: &EmbeddingSet<T>, mut w: W) -> std::io::Result<()> {
    writeln!(w, "D={}", set.dim())?;
    for i in 0..set.len() {
        let row: Vec<String> = set.vectors().row(i).iter().map(|x| format!("{x}")).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_rows() {
        let text = "D=2\n1 2\n\n3.5 -4e-1\n";
        let set: EmbeddingSet<f64> = read_embeddings_from(text.as_bytes(), "mem").unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.vectors().row(1), [3.5, -0.4]);
    }

    #[test]
    fn reports_line_numbers() {
        let err = read_embeddings_from::<f64, _>("D=2\n1 2\n1 2 3\n".as_bytes(), "mem").unwrap_err();
        assert!(matches!(err, FrechetError::Format { line: 3, .. }));
        let err = read_embeddings_from::<f64, _>("1 2\n".as_bytes(), "mem").unwrap_err();
        assert!(matches!(err, FrechetError::Format { line: 1, .. }));
        let err = read_embeddings_from::<f64, _>("D=1\n1\nx\n".as_bytes(), "mem").unwrap_err();
        assert!(matches!(err, FrechetError::Format { line: 3, .. }));
        let err = read_embeddings_from::<f64, _>("".as_bytes(), "mem").unwrap_err();
        assert!(matches!(err, FrechetError::Format { line: 0, .. }));
    }

    #[test]
    fn gzip_and_plain_agree() {
        use flate2::write::GzEncoder;
        let dir = tempfile::tempdir().unwrap();
        let text = "D=3\n1 2 3\n4 5 6\n0 1 0\n";
        let plain = dir.path().join("a.txt");
        std::fs::write(&plain, text).unwrap();
        let gz = dir.path().join("a.txt.gz");
        let mut enc = GzEncoder::new(File::create(&gz).unwrap(), flate2::Compression::default());
        enc.write_all(text.as_bytes()).unwrap();
        enc.finish().unwrap();
        let a: EmbeddingSet<f64> = read_embeddings(&plain).unwrap();
        let b: EmbeddingSet<f64> = read_embeddings(&gz).unwrap();
        assert_eq!(a.vectors(), b.vectors());
    }

    #[test]
    fn write_then_read() {
        let set: EmbeddingSet<f64> = read_embeddings_from("D=2\n0.1 0.2\n-3 1e10\n".as_bytes(), "mem").unwrap();
        let mut buf = Vec::new();
        write_embeddings(&set, &mut buf).unwrap();
        let back: EmbeddingSet<f64> = read_embeddings_from(buf.as_slice(), "mem").unwrap();
        assert_eq!(back.vectors(), set.vectors());
    }
}
