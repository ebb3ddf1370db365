//! CSV ingestion and persistence (RFC-4180-style, header row required).

use std::path::Path;

use super::{AttributeKind, AttributeSpec, Cell, EncodedDataset, RawTable, Schema};
use crate::error::{Error, Result};

/// Parsing options shared by all readers.
#[derive(Debug, Clone)]
pub struct CsvOptions {
    /// Cell text treated as a missing value.
    pub missing_marker: String,
    /// Column names whose values are always treated as category labels,
    /// even if every cell parses as a number.
    pub force_categorical: Vec<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            missing_marker: "?".to_string(),
            force_categorical: Vec::new(),
        }
    }
}

fn read_grid(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::format(path, 1, "empty input: no header row"));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    if rows.is_empty() {
        return Err(Error::format(path, 1, "no data rows after the header"));
    }
    Ok((headers, rows))
}

fn resolve_class_column(headers: &[String], class_column: &str, path: &Path) -> Result<usize> {
    if let Some(i) = headers.iter().position(|h| h == class_column) {
        return Ok(i);
    }
    if let Ok(i) = class_column.parse::<usize>() {
        if i < headers.len() {
            return Ok(i);
        }
    }
    Err(Error::format(
        path,
        1,
        format!("class column '{class_column}' not found among {headers:?}"),
    ))
}

/// Infer a schema from a CSV file: a column is numeric iff every non-missing
/// cell parses as a finite real and the column was not forced categorical;
/// category values are collected in first-appearance order. The class column
/// (by name, or by index if no header matches) is always categorical.
pub fn infer_schema(path: impl AsRef<Path>, class_column: &str, options: &CsvOptions) -> Result<Schema> {
    let path = path.as_ref();
    let (headers, rows) = read_grid(path)?;
    let class_index = resolve_class_column(&headers, class_column, path)?;

    let mut seen = std::collections::HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(Error::format(path, 1, format!("duplicate column name '{h}'")));
        }
    }

    let mut attributes = Vec::with_capacity(headers.len());
    for (c, name) in headers.iter().enumerate() {
        let forced = options.force_categorical.iter().any(|f| f == name);
        let cells: Vec<&str> = rows
            .iter()
            .map(|row| row.get(c).map_or("", |s| s.as_str()))
            .filter(|s| *s != options.missing_marker)
            .collect();
        let numeric = !forced
            && c != class_index
            && !cells.is_empty()
            && cells
                .iter()
                .all(|s| s.parse::<f64>().map(f64::is_finite).unwrap_or(false));
        if numeric {
            attributes.push(AttributeSpec::numeric(name.clone()));
        } else {
            let mut categories = Vec::new();
            for cell in cells {
                if !categories.iter().any(|c: &String| c == cell) {
                    categories.push(cell.to_string());
                }
            }
            attributes.push(AttributeSpec::categorical(name.clone(), categories));
        }
    }
    Schema::new(attributes, class_index)
}

fn parse_cells(
    rows: Vec<Vec<String>>,
    schema: &Schema,
    options: &CsvOptions,
    path: &Path,
) -> Result<RawTable> {
    let mut table_rows = Vec::with_capacity(rows.len());
    for (r, row) in rows.into_iter().enumerate() {
        let line = r + 2; // header is line 1
        if row.len() != schema.attributes.len() {
            return Err(Error::format(
                path,
                line,
                format!(
                    "row has {} fields, schema has {} attributes",
                    row.len(),
                    schema.attributes.len()
                ),
            ));
        }
        let mut cells = Vec::with_capacity(row.len());
        for (a, text) in row.into_iter().enumerate() {
            let spec = &schema.attributes[a];
            if text == options.missing_marker {
                cells.push(Cell::Missing);
                continue;
            }
            match &spec.kind {
                AttributeKind::Numeric { .. } => {
                    let value: f64 = text.parse().map_err(|_| {
                        Error::format(
                            path,
                            line,
                            format!("field '{}' is not a number in numeric attribute '{}'", text, spec.name),
                        )
                    })?;
                    if !value.is_finite() {
                        return Err(Error::format(
                            path,
                            line,
                            format!("non-finite number in attribute '{}'", spec.name),
                        ));
                    }
                    cells.push(Cell::Number(value));
                }
                AttributeKind::Categorical { categories } => {
                    if !categories.iter().any(|c| *c == text) {
                        return Err(Error::format(
                            path,
                            line,
                            format!("unknown category '{}' for attribute '{}'", text, spec.name),
                        ));
                    }
                    cells.push(Cell::Label(text));
                }
            }
        }
        table_rows.push(cells);
    }
    RawTable::new(schema.clone(), table_rows)
}

/// Read a CSV file, inferring its schema along the way.
pub fn read_raw_csv(
    path: impl AsRef<Path>,
    class_column: &str,
    options: &CsvOptions,
) -> Result<RawTable> {
    let path = path.as_ref();
    let schema = infer_schema(path, class_column, options)?;
    let (_, rows) = read_grid(path)?;
    parse_cells(rows, &schema, options, path)
}

/// Read a CSV file that must conform to an existing schema (matching header
/// names, known categories).
pub fn read_table_with_schema(
    path: impl AsRef<Path>,
    schema: &Schema,
    options: &CsvOptions,
) -> Result<RawTable> {
    let path = path.as_ref();
    let (headers, rows) = read_grid(path)?;
    let expected: Vec<&str> = schema.attributes.iter().map(|a| a.name.as_str()).collect();
    if headers != expected {
        return Err(Error::format(
            path,
            1,
            format!("header {headers:?} does not match schema attributes {expected:?}"),
        ));
    }
    parse_cells(rows, schema, options, path)
}

/// Write a table as CSV with a header row; missing cells are written as the
/// missing marker.
pub fn write_table(table: &RawTable, path: impl AsRef<Path>, options: &CsvOptions) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(table.schema.attributes.iter().map(|a| a.name.as_str()))?;
    for row in &table.rows {
        let record: Vec<String> = row
            .iter()
            .map(|cell| match cell {
                Cell::Number(v) => format!("{v}"),
                Cell::Label(s) => s.clone(),
                Cell::Missing => options.missing_marker.clone(),
            })
            .collect();
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Persist an encoded matrix as CSV (header names derived from the schema).
pub fn write_encoded(dataset: &EncodedDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(dataset.schema.encoded_column_names())?;
    for row in &dataset.matrix {
        writer.write_record(row.iter().map(|v| format!("{v}")))?;
    }
    writer.flush()?;
    Ok(())
}

/// Read an encoded matrix back against its schema sidecar. Values must be
/// finite and in `[0,1]`; malformed files fail without returning partial data.
pub fn read_encoded(path: impl AsRef<Path>, schema: &Schema) -> Result<EncodedDataset> {
    let path = path.as_ref();
    let (headers, rows) = read_grid(path)?;
    let expected = schema.encoded_column_names();
    if headers != expected {
        return Err(Error::format(
            path,
            1,
            format!("encoded header does not match schema columns {expected:?}"),
        ));
    }
    let width = schema.encoded_width();
    let mut matrix = Vec::with_capacity(rows.len());
    for (r, row) in rows.into_iter().enumerate() {
        let line = r + 2;
        if row.len() != width {
            return Err(Error::format(
                path,
                line,
                format!("row has {} fields, expected {width}", row.len()),
            ));
        }
        let mut values = Vec::with_capacity(width);
        for (c, text) in row.into_iter().enumerate() {
            let value: f64 = text.parse().map_err(|_| {
                Error::format(path, line, format!("field {c}: '{text}' is not a number"))
            })?;
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::format(
                    path,
                    line,
                    format!("field {c}: {value} outside [0,1]"),
                ));
            }
            values.push(value);
        }
        matrix.push(values);
    }
    Ok(EncodedDataset {
        schema: schema.clone(),
        matrix,
        column_map: schema.column_map(),
    })
}

/// Provenance sidecar for generated rows: `(seed_index, replicate_index)`.
pub fn write_provenance(pairs: &[(usize, usize)], path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(["seed_index", "replicate_index"])?;
    for (s, t) in pairs {
        writer.write_record([s.to_string(), t.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fit_encode;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn infer_mixed_columns() {
        let f = write_temp("x,color,class\n1.5,red,yes\n2.5,green,no\n3.5,blue,yes\n");
        let schema = infer_schema(f.path(), "class", &CsvOptions::default()).unwrap();
        assert!(schema.attributes[0].is_numeric());
        assert_eq!(
            schema.attributes[1].categories().unwrap(),
            &["red".to_string(), "green".to_string(), "blue".to_string()]
        );
        assert_eq!(schema.class_index, 2);
        assert_eq!(schema.class_count(), 2);
    }

    #[test]
    fn class_column_is_categorical_even_when_numeric_looking() {
        let f = write_temp("a,b,class\n1,2,0\n3,4,1\n5,6,0\n");
        let schema = infer_schema(f.path(), "class", &CsvOptions::default()).unwrap();
        assert!(schema.attributes[0].is_numeric());
        assert!(schema.attributes[1].is_numeric());
        assert_eq!(
            schema.class_attribute().categories().unwrap(),
            &["0".to_string(), "1".to_string()]
        );
    }

    #[test]
    fn missing_marker_does_not_change_numeric_inference() {
        let f = write_temp("x,class\n1,a\n?,b\n3,a\n");
        let schema = infer_schema(f.path(), "class", &CsvOptions::default()).unwrap();
        assert!(schema.attributes[0].is_numeric());
        let table = read_raw_csv(f.path(), "class", &CsvOptions::default()).unwrap();
        assert_eq!(table.rows[1][0], Cell::Missing);
    }

    #[test]
    fn class_by_index_and_error_cases() {
        let f = write_temp("a,b\n1,x\n2,y\n");
        let schema = infer_schema(f.path(), "1", &CsvOptions::default()).unwrap();
        assert_eq!(schema.class_index, 1);

        assert!(infer_schema(f.path(), "missing_col", &CsvOptions::default()).is_err());

        let dup = write_temp("a,a\n1,2\n");
        assert!(infer_schema(dup.path(), "a", &CsvOptions::default()).is_err());

        let empty = write_temp("");
        assert!(infer_schema(empty.path(), "a", &CsvOptions::default()).is_err());

        let header_only = write_temp("a,b\n");
        assert!(infer_schema(header_only.path(), "b", &CsvOptions::default()).is_err());
    }

    #[test]
    fn forced_categorical_column() {
        let f = write_temp("code,class\n1,a\n2,b\n1,a\n");
        let options = CsvOptions {
            force_categorical: vec!["code".to_string()],
            ..CsvOptions::default()
        };
        let schema = infer_schema(f.path(), "class", &options).unwrap();
        assert_eq!(
            schema.attributes[0].categories().unwrap(),
            &["1".to_string(), "2".to_string()]
        );
    }

    #[test]
    fn encoded_roundtrip_is_exact() {
        let f = write_temp("x,color,class\n1.5,red,yes\n2.5,green,no\n3.25,blue,yes\n");
        let table = read_raw_csv(f.path(), "class", &CsvOptions::default()).unwrap();
        let encoded = fit_encode(&table).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("data.encoded.csv");
        write_encoded(&encoded, &csv_path).unwrap();
        let back = read_encoded(&csv_path, &encoded.schema).unwrap();
        assert_eq!(back.matrix, encoded.matrix);
        assert_eq!(back.column_map, encoded.column_map);
    }

    #[test]
    fn truncated_encoded_file_is_an_error_not_partial_data() {
        let f = write_temp("x,class\n1,a\n2,b\n3,a\n4,b\n");
        let table = read_raw_csv(f.path(), "class", &CsvOptions::default()).unwrap();
        let encoded = fit_encode(&table).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("data.encoded.csv");
        write_encoded(&encoded, &csv_path).unwrap();
        let full = std::fs::read_to_string(&csv_path).unwrap();
        let cut = full.len() - 4; // slice through the final record
        std::fs::write(&csv_path, &full[..cut]).unwrap();
        let err = read_encoded(&csv_path, &encoded.schema).unwrap_err();
        // Either our own width check or the csv reader's record check fires;
        // both carry a line position and no partial data escapes.
        assert!(matches!(err, Error::Format { .. } | Error::Csv(_)), "got: {err}");
    }

    #[test]
    fn unicode_labels_roundtrip_through_table_io() {
        let f = write_temp("barva,class\nrdeča,da\nzelena,ne\n");
        let options = CsvOptions::default();
        let table = read_raw_csv(f.path(), "class", &options).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("table.csv");
        write_table(&table, &out, &options).unwrap();
        let back = read_table_with_schema(&out, &table.schema, &options).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn missing_cells_roundtrip_through_the_marker() {
        let f = write_temp("x,class\n1,a\n?,b\n");
        let options = CsvOptions::default();
        let table = read_raw_csv(f.path(), "class", &options).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("table.csv");
        write_table(&table, &out, &options).unwrap();
        let back = read_table_with_schema(&out, &table.schema, &options).unwrap();
        assert_eq!(back.rows[1][0], Cell::Missing);
    }
}
