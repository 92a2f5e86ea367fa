//! Reading `x,y` data files and score tables.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use truncstat_core::sample::SampleError;
use truncstat_core::{ScoreFunction, TruncatedSample};

use crate::error::{ConfigError, InputError};

fn open(path: &Path) -> Result<File, InputError> {
    File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => InputError::FileNotFound(path.to_path_buf()),
        _ => InputError::Read(format!("{}: {e}", path.display())),
    })
}

/// Reads a two-column table with the given header. Returns rows in file
/// order.
fn read_pairs<R: Read>(reader: R, header: [&str; 2]) -> Result<Vec<(f64, f64)>, InputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let found = rdr
        .headers()
        .map_err(|e| InputError::Read(e.to_string()))?
        .clone();
    if found.len() != 2 || found[0] != *header[0] || found[1] != *header[1] {
        return Err(InputError::BadHeader(
            found.iter().collect::<Vec<_>>().join(","),
        ));
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| InputError::Read(e.to_string()))?;
        let mut values = [0.0; 2];
        for (col, name) in header.iter().enumerate() {
            let v = record
                .get(col)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite());
            values[col] = v.ok_or_else(|| InputError::BadNumber {
                row,
                column: name.to_string(),
            })?;
        }
        if record.len() > 2 {
            return Err(InputError::Read(format!(
                "row {row}: expected 2 fields, found {}",
                record.len()
            )));
        }
        rows.push((values[0], values[1]));
    }
    Ok(rows)
}

/// Parses an `x,y` table from any reader. Rows keep file order.
pub fn parse_csv_reader<R: Read>(reader: R) -> Result<TruncatedSample, InputError> {
    let pairs = read_pairs(reader, ["x", "y"])?;
    TruncatedSample::new(pairs).map_err(|e| {
        InputError::Sample(match e {
            SampleError::TruncationViolated(rows) => {
                SampleError::TruncationViolated(rows.into_iter().map(|r| r + 1).collect())
            }
            SampleError::NonFinite(r) => SampleError::NonFinite(r + 1),
            other => other,
        })
    })
}

pub fn parse_csv(path: &Path) -> Result<TruncatedSample, InputError> {
    parse_csv_reader(open(path)?)
}

/// Parses a score specification: `identity`, `indicator:<t>`, `power:<k>`,
/// `constant:<c>` or `table:<path>`, where the file has header `x,phi`.
pub fn parse_phi(spec: &str) -> Result<ScoreFunction, crate::error::Error> {
    if let Some(path) = spec.strip_prefix("table:") {
        let table = read_pairs(open(Path::new(path.trim()))?, ["x", "phi"])?;
        return Ok(ScoreFunction::tabulated(table).map_err(ConfigError::from)?);
    }
    spec.parse::<ScoreFunction>()
        .map_err(|e| ConfigError::BadPhi(e.to_string()).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<TruncatedSample, InputError> {
        parse_csv_reader(text.as_bytes())
    }

    #[test]
    fn three_rows_in_order() {
        let s = parse("x,y\n1,0.5\n2,0.4\n3,2.5").unwrap();
        assert_eq!(s.pairs(), &[(1.0, 0.5), (2.0, 0.4), (3.0, 2.5)]);
        let s = parse("x,y\n3,2.5\n1,0.5\n").unwrap();
        assert_eq!(s.pairs(), &[(3.0, 2.5), (1.0, 0.5)]);
    }

    #[test]
    fn violation_rows_are_one_based() {
        match parse("x,y\n1,2") {
            Err(InputError::Sample(SampleError::TruncationViolated(rows))) => {
                assert_eq!(rows, vec![1])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_number_names_row_and_column() {
        match parse("x,y\n1,abc") {
            Err(InputError::BadNumber { row, column }) => {
                assert_eq!((row, column.as_str()), (1, "y"))
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("x,y\n1,0\n2"),
            Err(InputError::BadNumber { row: 2, .. })
        ));
        assert!(matches!(
            parse("x,y\nnan,0"),
            Err(InputError::BadNumber { row: 1, .. })
        ));
    }

    #[test]
    fn header_is_checked() {
        assert!(matches!(parse("a,b\n1,0"), Err(InputError::BadHeader(_))));
        assert!(matches!(parse("y,x\n1,0"), Err(InputError::BadHeader(_))));
        assert!(matches!(
            parse("x,y\n"),
            Err(InputError::Sample(SampleError::EmptySample))
        ));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            parse_csv(Path::new("/nonexistent/data.csv")),
            Err(InputError::FileNotFound(_))
        ));
    }
}
