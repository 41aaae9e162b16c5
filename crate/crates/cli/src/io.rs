//! File formats: headerless matrix CSVs, labelled data CSVs, probability
//! columns, and the 17-significant-digit decimal emitter.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A file's contents together with its SHA-256 digest.
pub struct Loaded {
    pub path: PathBuf,
    pub digest: String,
    pub text: String,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::input(path, None, e.to_string()))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| CliError::input(path, None, "file is not valid UTF-8"))?;
    Ok(Loaded {
        path: path.to_path_buf(),
        digest,
        text,
    })
}

fn parse_value(path: &Path, line: u64, field: &str) -> Result<f64, CliError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| CliError::input(path, Some(line), format!("cannot parse {field:?} as a number")))?;
    if !v.is_finite() {
        return Err(CliError::input(path, Some(line), format!("non-finite value {field:?}")));
    }
    Ok(v)
}

fn reader(text: &str, headers: bool) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Headerless, comma-separated, one matrix row per line.
pub fn parse_matrix(file: &Loaded) -> Result<DMatrix<f64>, CliError> {
    let path = file.path.as_path();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader(&file.text, false).records() {
        let record = record.map_err(|e| CliError::input(path, e.position().map(|p| p.line()), e.to_string()))?;
        let line = record_line(&record);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .map(|f| parse_value(path, line, f))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(CliError::input(
                    path,
                    Some(line),
                    format!("row has {} values, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map(Vec::len).ok_or_else(|| CliError::input(path, None, "matrix file is empty"))?;
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &flat))
}

/// A labelled table: `id` column followed by numeric columns.
pub struct DataTable {
    pub ids: Vec<String>,
    pub columns: Vec<String>,
    pub values: DMatrix<f64>,
}

pub fn parse_data_table(file: &Loaded) -> Result<DataTable, CliError> {
    let path = file.path.as_path();
    let mut rdr = reader(&file.text, true);
    let header = rdr
        .headers()
        .map_err(|e| CliError::input(path, Some(1), e.to_string()))?
        .clone();
    if header.get(0) != Some("id") {
        return Err(CliError::input(path, Some(1), "first column must be named `id`"));
    }
    if header.len() < 2 {
        return Err(CliError::input(path, Some(1), "need at least one numeric column"));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut ids = Vec::new();
    let mut flat = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::input(path, e.position().map(|p| p.line()), e.to_string()))?;
        let line = record_line(&record);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() != header.len() {
            return Err(CliError::input(
                path,
                Some(line),
                format!("row has {} fields, header has {}", record.len(), header.len()),
            ));
        }
        ids.push(record[0].to_string());
        for f in record.iter().skip(1) {
            flat.push(parse_value(path, line, f)?);
        }
    }
    if ids.is_empty() {
        return Err(CliError::input(path, None, "no data rows"));
    }
    let values = DMatrix::from_row_slice(ids.len(), columns.len(), &flat);
    Ok(DataTable { ids, columns, values })
}

/// Single column with header `rho`.
pub fn parse_probabilities(file: &Loaded) -> Result<Vec<f64>, CliError> {
    let path = file.path.as_path();
    let mut rdr = reader(&file.text, true);
    let header = rdr
        .headers()
        .map_err(|e| CliError::input(path, Some(1), e.to_string()))?
        .clone();
    if header.len() != 1 || &header[0] != "rho" {
        return Err(CliError::input(path, Some(1), "expected a single column with header `rho`"));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::input(path, e.position().map(|p| p.line()), e.to_string()))?;
        let line = record_line(&record);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() != 1 {
            return Err(CliError::input(path, Some(line), "expected exactly one value per row"));
        }
        out.push(parse_value(path, line, &record[0])?);
    }
    if out.is_empty() {
        return Err(CliError::input(path, None, "no probabilities"));
    }
    Ok(out)
}

/// 17 significant digits; re-parses to the identical `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loaded(text: &str) -> Loaded {
        Loaded {
            path: PathBuf::from("mem.csv"),
            digest: String::new(),
            text: text.to_string(),
        }
    }

    #[test]
    fn parses_matrix_with_whitespace_and_blank_lines() {
        let m = parse_matrix(&loaded("1, 2\n3 ,4\n\n")).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
    }

    #[test]
    fn matrix_errors_name_the_line() {
        match parse_matrix(&loaded("1,2\n3,x\n")) {
            Err(CliError::Input { line: Some(2), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_matrix(&loaded("1,2\n3\n")) {
            Err(CliError::Input { line: Some(2), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_matrix(&loaded("")).is_err());
        assert!(parse_matrix(&loaded("1,inf\n")).is_err());
    }

    #[test]
    fn data_table_and_probabilities() {
        let t = parse_data_table(&loaded("id,m1,m2\na,1,2\nb,3,4\n")).unwrap();
        assert_eq!(t.ids, vec!["a", "b"]);
        assert_eq!(t.columns, vec!["m1", "m2"]);
        assert_eq!(t.values[(1, 0)], 3.0);
        assert!(parse_data_table(&loaded("name,m1\na,1\n")).is_err());
        assert_eq!(parse_probabilities(&loaded("rho\n0.5\n0.25\n")).unwrap(), vec![0.5, 0.25]);
        assert!(parse_probabilities(&loaded("p\n0.5\n")).is_err());
    }

    #[test]
    fn emitter_round_trips_bits() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1.7976931348623157e308, std::f64::consts::PI, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        let m = DMatrix::from_row_slice(2, 2, &[0.1, 0.2, 1.0 / 3.0, -7.0]);
        let back = parse_matrix(&loaded(&write_matrix_csv(&m))).unwrap();
        assert_eq!(back, m);
    }
}
