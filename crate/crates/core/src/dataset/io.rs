//! CSV dataset format.
//!
//! Each data row holds `2n` decimals `x_1,…,x_n,xp_1,…,xp_n`. A single non-numeric
//! first row is taken as a header. Lines starting with `#` are comments; comments of
//! the form `# key=value` are kept as dataset metadata.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use super::{Dataset, DatasetError};

/// Reads a dataset file. When `dim` is given, every row must have `2·dim` columns.
pub fn load_dataset(path: impl AsRef<Path>, dim: Option<usize>) -> Result<Dataset, DatasetError> {
    let text = std::fs::read_to_string(path)?;
    read_dataset(&text, dim)
}

/// Parses dataset text; see [`load_dataset`].
pub fn read_dataset(text: &str, dim: Option<usize>) -> Result<Dataset, DatasetError> {
    let mut metadata = BTreeMap::new();
    for line in text.lines() {
        if let Some(comment) = line.trim_start().strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                metadata.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut width = dim.map(|n| 2 * n);
    let mut xs = Vec::new();
    let mut xps = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| DatasetError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(e) => {
                return Err(DatasetError::Malformed {
                    line,
                    reason: e.to_string(),
                });
            }
        };
        first = false;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DatasetError::Malformed {
                line,
                reason: "non-finite value".into(),
            });
        }
        let expected = *width.get_or_insert(values.len());
        if values.len() != expected || !expected.is_multiple_of(2) || expected == 0 {
            return Err(DatasetError::Dimension {
                line,
                expected,
                found: values.len(),
            });
        }
        let n = expected / 2;
        xs.extend_from_slice(&values[..n]);
        xps.extend_from_slice(&values[n..]);
    }

    let n = width.ok_or(DatasetError::Empty)? / 2;
    if xs.is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut data = Dataset::from_flat(n, xs, xps);
    data.metadata = metadata;
    Ok(data)
}

/// Writes metadata comments, a header and one row per pair.
pub fn write_dataset(data: &Dataset, out: impl Write) -> Result<(), DatasetError> {
    let mut out = std::io::BufWriter::new(out);
    for (k, v) in data.metadata() {
        writeln!(out, "# {k}={v}")?;
    }
    let n = data.dim();
    let header: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=n).map(|i| format!("xp{i}")))
        .collect();
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| DatasetError::Io(std::io::Error::other(e));
    w.write_record(&header).map_err(csv_err)?;
    for j in 0..data.len() {
        let row = data
            .x(j)
            .iter()
            .chain(data.x_plus(j))
            .map(|v| v.to_string());
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let d = read_dataset("0,0,0,0\n1,1,0.5,0.5\n", Some(2)).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.x_plus(1), &[0.5, 0.5]);
    }

    #[test]
    fn declared_dimension_enforced() {
        let e = read_dataset("0,0,0\n", Some(2)).unwrap_err();
        assert!(matches!(
            e,
            DatasetError::Dimension {
                line: 1,
                expected: 4,
                found: 3
            }
        ));
    }

    #[test]
    fn inferred_dimension_must_be_even_and_consistent() {
        assert!(matches!(
            read_dataset("0,0,0\n", None),
            Err(DatasetError::Dimension { .. })
        ));
        assert!(matches!(
            read_dataset("0,0\n1,1,1,1\n", None),
            Err(DatasetError::Dimension {
                line: 2,
                expected: 2,
                found: 4
            })
        ));
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(
            read_dataset("", Some(2)),
            Err(DatasetError::Empty)
        ));
        assert!(matches!(
            read_dataset("# only a comment\nx1,x2,xp1,xp2\n", None),
            Err(DatasetError::Empty)
        ));
    }

    #[test]
    fn malformed_row() {
        let e = read_dataset("x1,xp1\n0,1\n0,abc\n", None).unwrap_err();
        assert!(matches!(e, DatasetError::Malformed { line: 3, .. }));
    }

    #[test]
    fn header_comments_and_metadata() {
        let text = "# system=linear2d\n# seed=7\nx1,x2,xp1,xp2\n# stray comment\n0.1,0.2,0.3,0.4\n";
        let d = read_dataset(text, None).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(
            d.metadata().get("system").map(String::as_str),
            Some("linear2d")
        );
        assert_eq!(d.metadata().get("seed").map(String::as_str), Some("7"));
    }

    #[test]
    fn write_then_read_preserves_bits() {
        let mut d = read_dataset("0.1,0.7,-1e-300,3.3333333333333335\n", None).unwrap();
        d.set_metadata("system", "custom");
        let mut buf = Vec::new();
        write_dataset(&d, &mut buf).unwrap();
        let back = read_dataset(std::str::from_utf8(&buf).unwrap(), Some(2)).unwrap();
        assert_eq!(back.fingerprint(), d.fingerprint());
        assert_eq!(back.metadata(), d.metadata());
    }
}
