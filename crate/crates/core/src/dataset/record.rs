use std::path::Path;

use crate::error::{Error, Result};

/// Number of explanatory variables in the record schema.
pub const NUM_VARIABLES: usize = 8;

/// Explanatory variable names, in schema order.
pub const VARIABLE_NAMES: [&str; NUM_VARIABLES] = [
    "mean_wea", "mean_vis", "mean_vol", "mean_ocu", "mean_spe", "std_vol", "std_ocu", "std_spe",
];

/// Expected CSV header: the eight variables plus the binary label column.
pub const CSV_HEADER: &str =
    "mean_wea,mean_vis,mean_vol,mean_ocu,mean_spe,std_vol,std_ocu,std_spe,accident";

/// One labeled observation: eight finite continuous variables and a binary
/// label (`true` = positive / pre-crash, `false` = normal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRecord {
    pub values: [f64; NUM_VARIABLES],
    pub label: bool,
}

impl RawRecord {
    pub fn new(values: [f64; NUM_VARIABLES], label: bool) -> Self {
        Self { values, label }
    }
}

/// Loads records from a CSV file, rejecting malformed input.
///
/// The header must match [`CSV_HEADER`] exactly. Every variable cell must
/// parse to a finite number; the label cell must be 0 or 1. Errors name the
/// offending data row (1-based) and column.
pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Vec<RawRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path.as_ref())?;

    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Schema {
            expected: CSV_HEADER.to_string(),
            found: header,
        });
    }

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let row_no = idx + 1;
        if row.len() != NUM_VARIABLES + 1 {
            return Err(Error::RowLength {
                row: row_no,
                expected: NUM_VARIABLES + 1,
                found: row.len(),
            });
        }
        let mut values = [0.0; NUM_VARIABLES];
        for (col, slot) in values.iter_mut().enumerate() {
            let cell = row.get(col).unwrap_or("");
            *slot = match cell.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => {
                    return Err(Error::NonNumeric {
                        row: row_no,
                        column: VARIABLE_NAMES[col].to_string(),
                        value: cell.to_string(),
                    })
                }
            };
        }
        let label_cell = row.get(NUM_VARIABLES).unwrap_or("").trim();
        let label = match label_cell.parse::<f64>() {
            Ok(v) if v == 0.0 => false,
            Ok(v) if v == 1.0 => true,
            _ => {
                return Err(Error::InvalidLabel {
                    row: row_no,
                    value: label_cell.to_string(),
                })
            }
        };
        records.push(RawRecord::new(values, label));
    }
    log::debug!("loaded {} records", records.len());
    Ok(records)
}

/// Writes records in the schema's CSV layout.
pub fn write_csv<P: AsRef<Path>>(path: P, records: &[RawRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(CSV_HEADER.split(','))?;
    for rec in records {
        let mut row: Vec<String> = rec.values.iter().map(|v| v.to_string()).collect();
        row.push(if rec.label { "1" } else { "0" }.to_string());
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_well_formed_rows() {
        let f = write_temp(&format!(
            "{CSV_HEADER}\n1,2,3,4,5,6,7,8,1\n0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0\n"
        ));
        let recs = load_csv(f.path()).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs[0].label);
        assert!(!recs[1].label);
        assert_eq!(recs[0].values[2], 3.0);
    }

    #[test]
    fn header_only_file_is_empty_not_error() {
        let f = write_temp(&format!("{CSV_HEADER}\n"));
        assert!(load_csv(f.path()).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_header() {
        let f = write_temp("a,b,c\n1,2,3\n");
        match load_csv(f.path()) {
            Err(Error::Schema { .. }) => {}
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_label_outside_binary() {
        let f = write_temp(&format!("{CSV_HEADER}\n1,2,3,4,5,6,7,8,2\n"));
        match load_csv(f.path()) {
            Err(Error::InvalidLabel { row: 1, value }) => assert_eq!(value, "2"),
            other => panic!("expected label error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_numeric_cell_naming_row_and_column() {
        let f = write_temp(&format!(
            "{CSV_HEADER}\n1,2,3,4,5,6,7,8,0\n1,2,oops,4,5,6,7,8,1\n"
        ));
        match load_csv(f.path()) {
            Err(Error::NonNumeric { row: 2, column, .. }) => assert_eq!(column, "mean_vol"),
            other => panic!("expected non-numeric error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_finite_cell() {
        let f = write_temp(&format!("{CSV_HEADER}\n1,2,NaN,4,5,6,7,8,0\n"));
        assert!(matches!(
            load_csv(f.path()),
            Err(Error::NonNumeric { row: 1, .. })
        ));
    }

    #[test]
    fn rejects_short_row() {
        let f = write_temp(&format!("{CSV_HEADER}\n1,2,3,4\n"));
        assert!(matches!(
            load_csv(f.path()),
            Err(Error::RowLength { row: 1, .. })
        ));
    }

    #[test]
    fn csv_round_trip_preserves_values() {
        let recs = vec![
            RawRecord::new([0.1, -2.5, 3e-7, 4.0, 5.5, 6.25, 7.125, 1313.0], true),
            RawRecord::new([1.0; 8], false),
        ];
        let f = tempfile::NamedTempFile::new().unwrap();
        write_csv(f.path(), &recs).unwrap();
        let back = load_csv(f.path()).unwrap();
        assert_eq!(back, recs);
    }
}
