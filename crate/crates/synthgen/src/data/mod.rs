//! Tabular data ingestion, encoding, splitting, and decoding.
//!
//! Raw tables hold numbers, category labels, and missing markers. Encoding
//! min-max scales numeric attributes to `[0,1]` and expands categorical
//! attributes into one-hot substitute columns; decoding inverts both. The
//! split follows the 25% train / 25% seeding / 50% evaluation protocol.

mod csv_io;
mod sidecar;

pub use csv_io::{
    infer_schema, read_encoded, read_raw_csv, read_table_with_schema, write_encoded,
    write_provenance, write_table, CsvOptions,
};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed::rng_from;

/// Fitted normalization bounds of a numeric attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    /// `range` is learned by [`fit_encode`] and `None` before fitting.
    Numeric { range: Option<NumericRange> },
    /// Category order is fixed and determines one-hot column order.
    Categorical { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
}

impl AttributeSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttributeKind::Numeric { range: None },
        }
    }

    pub fn categorical(name: impl Into<String>, categories: Vec<String>) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttributeKind::Categorical { categories },
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, AttributeKind::Numeric { .. })
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.kind {
            AttributeKind::Categorical { categories } => Some(categories),
            AttributeKind::Numeric { .. } => None,
        }
    }

    /// Number of encoded columns this attribute occupies.
    pub fn encoded_width(&self) -> usize {
        match &self.kind {
            AttributeKind::Numeric { .. } => 1,
            AttributeKind::Categorical { categories } => categories.len(),
        }
    }
}

/// Ordered attribute list with one designated class attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub attributes: Vec<AttributeSpec>,
    pub class_index: usize,
}

/// Where an encoded column came from: `(attribute, Some(category))` for
/// one-hot columns, `(attribute, None)` for numeric ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnSource {
    pub attribute: usize,
    pub category: Option<usize>,
}

impl Schema {
    pub fn new(attributes: Vec<AttributeSpec>, class_index: usize) -> Result<Self> {
        let schema = Schema {
            attributes,
            class_index,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.attributes.is_empty() {
            return Err(Error::schema("schema has no attributes"));
        }
        let mut seen = std::collections::HashSet::new();
        for spec in &self.attributes {
            if spec.name.is_empty() {
                return Err(Error::schema("attribute with empty name"));
            }
            if !seen.insert(spec.name.as_str()) {
                return Err(Error::schema(format!("duplicate attribute name '{}'", spec.name)));
            }
            if let AttributeKind::Categorical { categories } = &spec.kind {
                if categories.len() < 2 {
                    return Err(Error::schema(format!(
                        "categorical attribute '{}' has fewer than 2 values",
                        spec.name
                    )));
                }
                let mut cat_seen = std::collections::HashSet::new();
                for c in categories {
                    if !cat_seen.insert(c.as_str()) {
                        return Err(Error::schema(format!(
                            "attribute '{}' lists duplicate category '{}'",
                            spec.name, c
                        )));
                    }
                }
            }
            if let AttributeKind::Numeric { range: Some(r) } = &spec.kind {
                if !(r.min.is_finite() && r.max.is_finite() && r.min <= r.max) {
                    return Err(Error::schema(format!(
                        "attribute '{}' has invalid range [{}, {}]",
                        spec.name, r.min, r.max
                    )));
                }
            }
        }
        match self.attributes.get(self.class_index) {
            None => {
                return Err(Error::schema(format!(
                    "class index {} out of range",
                    self.class_index
                )))
            }
            Some(class) if class.is_numeric() => {
                return Err(Error::schema(format!(
                    "class attribute '{}' must be categorical",
                    class.name
                )))
            }
            Some(_) => {}
        }
        Ok(())
    }

    pub fn class_attribute(&self) -> &AttributeSpec {
        &self.attributes[self.class_index]
    }

    /// Number of class values (Table-style column `C`).
    pub fn class_count(&self) -> usize {
        self.class_attribute().categories().map_or(0, |c| c.len())
    }

    /// Attribute count excluding nothing; the class attribute counts too.
    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    /// Width of the encoded representation:
    /// `#numeric + Σ #categories over categorical attributes`.
    pub fn encoded_width(&self) -> usize {
        self.attributes.iter().map(AttributeSpec::encoded_width).sum()
    }

    pub fn column_map(&self) -> Vec<ColumnSource> {
        let mut map = Vec::with_capacity(self.encoded_width());
        for (a, spec) in self.attributes.iter().enumerate() {
            match &spec.kind {
                AttributeKind::Numeric { .. } => map.push(ColumnSource {
                    attribute: a,
                    category: None,
                }),
                AttributeKind::Categorical { categories } => {
                    for c in 0..categories.len() {
                        map.push(ColumnSource {
                            attribute: a,
                            category: Some(c),
                        });
                    }
                }
            }
        }
        map
    }

    /// Header names for encoded columns: `attr` or `attr=category`.
    pub fn encoded_column_names(&self) -> Vec<String> {
        self.column_map()
            .iter()
            .map(|src| {
                let spec = &self.attributes[src.attribute];
                match src.category {
                    None => spec.name.clone(),
                    Some(c) => format!("{}={}", spec.name, spec.categories().expect("categorical")[c]),
                }
            })
            .collect()
    }

    /// Canonical sidecar text (format tag included); see [`Schema::write_sidecar`].
    pub fn to_sidecar_string(&self) -> String {
        sidecar::to_string(self)
    }

    pub fn from_sidecar_str(text: &str) -> Result<Self> {
        sidecar::from_str(text)
    }

    pub fn write_sidecar(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_sidecar_string())?;
        Ok(())
    }

    pub fn read_sidecar(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path)?;
        Self::from_sidecar_str(&text)
    }

    /// Hex digest of the canonical sidecar text; stored in trained models so
    /// a model is never applied to data with a different layout.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_sidecar_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Label(String),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

/// A table of cells conforming to a schema.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub schema: Schema,
    pub rows: Vec<Vec<Cell>>,
}

impl RawTable {
    pub fn new(schema: Schema, rows: Vec<Vec<Cell>>) -> Result<Self> {
        let table = RawTable { schema, rows };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        self.schema.validate()?;
        let width = self.schema.attributes.len();
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::schema(format!(
                    "row {r} has {} cells, schema has {width} attributes",
                    row.len()
                )));
            }
            for (a, cell) in row.iter().enumerate() {
                match (cell, &self.schema.attributes[a].kind) {
                    (Cell::Number(v), AttributeKind::Numeric { .. }) if !v.is_finite() => {
                        return Err(Error::schema(format!("row {r}, attribute {a}: non-finite number")))
                    }
                    (Cell::Number(_), AttributeKind::Categorical { .. }) => {
                        return Err(Error::schema(format!(
                            "row {r}, attribute {a}: number in categorical attribute"
                        )))
                    }
                    (Cell::Label(_), AttributeKind::Numeric { .. }) => {
                        return Err(Error::schema(format!(
                            "row {r}, attribute {a}: label in numeric attribute"
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Instances encoded as rows of `[0,1]` reals.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    pub schema: Schema,
    pub matrix: Vec<Vec<f64>>,
    pub column_map: Vec<ColumnSource>,
}

impl EncodedDataset {
    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    pub fn width(&self) -> usize {
        self.column_map.len()
    }

    /// New dataset containing the given rows (in the given order).
    pub fn select_rows(&self, indices: &[usize]) -> EncodedDataset {
        EncodedDataset {
            schema: self.schema.clone(),
            matrix: indices.iter().map(|&i| self.matrix[i].clone()).collect(),
            column_map: self.column_map.clone(),
        }
    }

    /// Class label per row: argmax over the class one-hot group, ties to the
    /// lowest category index.
    pub fn class_labels(&self) -> Vec<usize> {
        let group: Vec<usize> = self
            .column_map
            .iter()
            .enumerate()
            .filter(|(_, src)| src.attribute == self.schema.class_index)
            .map(|(i, _)| i)
            .collect();
        self.matrix
            .iter()
            .map(|row| {
                let mut best = 0usize;
                let mut best_value = f64::NEG_INFINITY;
                for (c, &col) in group.iter().enumerate() {
                    if row[col] > best_value {
                        best_value = row[col];
                        best = c;
                    }
                }
                best
            })
            .collect()
    }

    /// Rows without the class one-hot group, paired with class labels; the
    /// classifier view of the dataset.
    pub fn features_and_labels(&self) -> (Vec<Vec<f64>>, Vec<usize>) {
        let keep: Vec<usize> = self
            .column_map
            .iter()
            .enumerate()
            .filter(|(_, src)| src.attribute != self.schema.class_index)
            .map(|(i, _)| i)
            .collect();
        let features = self
            .matrix
            .iter()
            .map(|row| keep.iter().map(|&i| row[i]).collect())
            .collect();
        (features, self.class_labels())
    }

    /// `(attribute name, column values)` for each numeric attribute.
    pub fn numeric_columns(&self) -> Vec<(String, Vec<f64>)> {
        self.column_map
            .iter()
            .enumerate()
            .filter(|(_, src)| src.category.is_none())
            .map(|(i, src)| {
                let name = self.schema.attributes[src.attribute].name.clone();
                let column = self.matrix.iter().map(|row| row[i]).collect();
                (name, column)
            })
            .collect()
    }
}

/// Replace numeric missing cells with the attribute mean and categorical
/// missing cells with the attribute mode (ties to the lowest category
/// index). Non-missing cells are never changed.
pub fn impute_missing(table: &RawTable) -> Result<RawTable> {
    table.validate()?;
    let mut fills: Vec<Option<Cell>> = Vec::with_capacity(table.schema.attributes.len());
    for (a, spec) in table.schema.attributes.iter().enumerate() {
        let any_missing = table.rows.iter().any(|row| row[a].is_missing());
        if !any_missing {
            fills.push(None);
            continue;
        }
        let fill = match &spec.kind {
            AttributeKind::Numeric { .. } => {
                let values: Vec<f64> = table
                    .rows
                    .iter()
                    .filter_map(|row| match &row[a] {
                        Cell::Number(v) => Some(*v),
                        _ => None,
                    })
                    .collect();
                if values.is_empty() {
                    return Err(Error::schema(format!(
                        "attribute '{}' has all cells missing",
                        spec.name
                    )));
                }
                Cell::Number(values.iter().sum::<f64>() / values.len() as f64)
            }
            AttributeKind::Categorical { categories } => {
                let mut counts = vec![0usize; categories.len()];
                for row in &table.rows {
                    if let Cell::Label(label) = &row[a] {
                        if let Some(c) = categories.iter().position(|cat| cat == label) {
                            counts[c] += 1;
                        }
                    }
                }
                let best = counts
                    .iter()
                    .enumerate()
                    .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
                    .map(|(i, _)| i)
                    .expect("categories non-empty");
                if counts[best] == 0 {
                    return Err(Error::schema(format!(
                        "attribute '{}' has all cells missing",
                        spec.name
                    )));
                }
                Cell::Label(categories[best].clone())
            }
        };
        fills.push(Some(fill));
    }

    let rows = table
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(a, cell)| {
                    if cell.is_missing() {
                        fills[a].clone().expect("fill computed for missing attribute")
                    } else {
                        cell.clone()
                    }
                })
                .collect()
        })
        .collect();
    RawTable::new(table.schema.clone(), rows)
}

/// Learn min/max per numeric attribute over the whole table, then encode:
/// numeric attributes min-max scaled to `[0,1]` (constant attributes map to
/// 0.0), categorical attributes expanded to one-hot groups. The fitted
/// ranges are stored in the returned schema.
pub fn fit_encode(table: &RawTable) -> Result<EncodedDataset> {
    table.validate()?;
    let mut schema = table.schema.clone();
    for (a, spec) in schema.attributes.iter_mut().enumerate() {
        if let AttributeKind::Numeric { range } = &mut spec.kind {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for row in &table.rows {
                match &row[a] {
                    Cell::Number(v) => {
                        min = min.min(*v);
                        max = max.max(*v);
                    }
                    Cell::Missing => {
                        return Err(Error::schema(format!(
                            "cannot fit with missing cells in attribute '{}'; impute first",
                            spec.name
                        )))
                    }
                    Cell::Label(_) => unreachable!("validated as numeric"),
                }
            }
            if table.rows.is_empty() {
                return Err(Error::schema("cannot fit an empty table"));
            }
            *range = Some(NumericRange { min, max });
        }
    }
    encode_with(table, &schema)
}

/// Encode a table using an already-fitted schema. Numeric values are scaled
/// with the stored ranges and clamped to `[0,1]` (values outside a fitted
/// range only occur when fitting was done on a different split).
pub fn encode_with(table: &RawTable, schema: &Schema) -> Result<EncodedDataset> {
    schema.validate()?;
    if table.schema.attributes.len() != schema.attributes.len() {
        return Err(Error::schema(format!(
            "table has {} attributes, schema has {}",
            table.schema.attributes.len(),
            schema.attributes.len()
        )));
    }
    let width = schema.encoded_width();
    let mut matrix = Vec::with_capacity(table.rows.len());
    for (r, row) in table.rows.iter().enumerate() {
        let mut encoded = Vec::with_capacity(width);
        for (a, spec) in schema.attributes.iter().enumerate() {
            match (&row[a], &spec.kind) {
                (Cell::Number(v), AttributeKind::Numeric { range }) => {
                    let range = range.ok_or_else(|| {
                        Error::schema(format!("attribute '{}' has no fitted range", spec.name))
                    })?;
                    let span = range.max - range.min;
                    let scaled = if span == 0.0 {
                        0.0
                    } else {
                        ((v - range.min) / span).clamp(0.0, 1.0)
                    };
                    encoded.push(scaled);
                }
                (Cell::Label(label), AttributeKind::Categorical { categories }) => {
                    let hit = categories.iter().position(|c| c == label).ok_or_else(|| {
                        Error::schema(format!(
                            "row {r}: unknown category '{label}' for attribute '{}'",
                            spec.name
                        ))
                    })?;
                    for c in 0..categories.len() {
                        encoded.push(if c == hit { 1.0 } else { 0.0 });
                    }
                }
                (Cell::Missing, _) => {
                    return Err(Error::schema(format!(
                        "row {r}: missing cell in attribute '{}'; impute first",
                        spec.name
                    )))
                }
                _ => {
                    return Err(Error::schema(format!(
                        "row {r}: cell type does not match attribute '{}'",
                        spec.name
                    )))
                }
            }
        }
        matrix.push(encoded);
    }
    Ok(EncodedDataset {
        schema: schema.clone(),
        matrix,
        column_map: schema.column_map(),
    })
}

/// Decode encoded rows back to the original representation: numeric columns
/// are clipped to `[0,1]` and inverse-scaled through the stored ranges, and
/// each one-hot group becomes the argmax category (ties to the lowest
/// category index).
pub fn decode(rows: &[Vec<f64>], schema: &Schema) -> Result<RawTable> {
    schema.validate()?;
    let width = schema.encoded_width();
    let mut decoded = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::dimension(format!(
                "row {r} has {} columns, schema encodes {width}",
                row.len()
            )));
        }
        let mut cells = Vec::with_capacity(schema.attributes.len());
        let mut col = 0usize;
        for spec in &schema.attributes {
            match &spec.kind {
                AttributeKind::Numeric { range } => {
                    let range = range.ok_or_else(|| {
                        Error::schema(format!("attribute '{}' has no fitted range", spec.name))
                    })?;
                    let v = row[col].clamp(0.0, 1.0);
                    cells.push(Cell::Number(range.min + v * (range.max - range.min)));
                    col += 1;
                }
                AttributeKind::Categorical { categories } => {
                    let group = &row[col..col + categories.len()];
                    let mut best = 0usize;
                    let mut best_value = f64::NEG_INFINITY;
                    for (c, &v) in group.iter().enumerate() {
                        if v > best_value {
                            best_value = v;
                            best = c;
                        }
                    }
                    cells.push(Cell::Label(categories[best].clone()));
                    col += categories.len();
                }
            }
        }
        decoded.push(cells);
    }
    RawTable::new(schema.clone(), decoded)
}

/// Row indices of the three experiment parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    /// Generator training set (≈ 25%).
    pub train: Vec<usize>,
    /// Generator seeding set (≈ 25%).
    pub seeding: Vec<usize>,
    /// Evaluation set (≈ 50%).
    pub eval: Vec<usize>,
    pub rng_seed: u64,
}

/// Partition `0..n` into 25% train / 25% seeding / 50% evaluation by a
/// seeded uniform permutation. Deterministic for a fixed seed.
pub fn split_25_25_50(n: usize, rng_seed: u64) -> Result<SplitIndices> {
    if n < 8 {
        return Err(Error::invalid(format!(
            "need at least 8 instances to split, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from(rng_seed));
    let half = n / 2;
    let quarter = half / 2;
    Ok(SplitIndices {
        train: order[..quarter].to_vec(),
        seeding: order[quarter..half].to_vec(),
        eval: order[half..].to_vec(),
        rng_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn color_schema() -> Schema {
        Schema::new(
            vec![
                AttributeSpec::numeric("x"),
                AttributeSpec::categorical(
                    "color",
                    vec!["red".into(), "green".into(), "blue".into()],
                ),
                AttributeSpec::categorical("class", vec!["yes".into(), "no".into()]),
            ],
            2,
        )
        .unwrap()
    }

    fn color_table() -> RawTable {
        RawTable::new(
            color_schema(),
            vec![
                vec![Cell::Number(10.0), Cell::Label("red".into()), Cell::Label("yes".into())],
                vec![Cell::Number(20.0), Cell::Label("blue".into()), Cell::Label("no".into())],
                vec![Cell::Number(30.0), Cell::Label("green".into()), Cell::Label("yes".into())],
            ],
        )
        .unwrap()
    }

    #[test]
    fn schema_invariants_are_enforced() {
        // duplicate names
        assert!(Schema::new(
            vec![
                AttributeSpec::numeric("x"),
                AttributeSpec::numeric("x"),
                AttributeSpec::categorical("c", vec!["a".into(), "b".into()]),
            ],
            2,
        )
        .is_err());
        // numeric class
        assert!(Schema::new(vec![AttributeSpec::numeric("x")], 0).is_err());
        // single-category attribute
        assert!(Schema::new(
            vec![AttributeSpec::categorical("c", vec!["only".into()])],
            0,
        )
        .is_err());
    }

    #[test]
    fn one_hot_encoding_matches_substitute_variable_layout() {
        // X=blue over [red, green, blue] → (0, 0, 1)
        let encoded = fit_encode(&color_table()).unwrap();
        assert_eq!(encoded.width(), 1 + 3 + 2);
        assert_eq!(&encoded.matrix[1][1..4], &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn numeric_min_max_scaling() {
        let encoded = fit_encode(&color_table()).unwrap();
        let xs: Vec<f64> = encoded.matrix.iter().map(|r| r[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn constant_numeric_column_encodes_to_zero() {
        let schema = Schema::new(
            vec![
                AttributeSpec::numeric("k"),
                AttributeSpec::categorical("class", vec!["a".into(), "b".into()]),
            ],
            1,
        )
        .unwrap();
        let table = RawTable::new(
            schema,
            vec![
                vec![Cell::Number(5.0), Cell::Label("a".into())],
                vec![Cell::Number(5.0), Cell::Label("b".into())],
                vec![Cell::Number(5.0), Cell::Label("a".into())],
            ],
        )
        .unwrap();
        let encoded = fit_encode(&table).unwrap();
        assert!(encoded.matrix.iter().all(|r| r[0] == 0.0));
    }

    #[test]
    fn decode_argmax_and_tie_break() {
        let schema = {
            let mut s = color_schema();
            if let AttributeKind::Numeric { range } = &mut s.attributes[0].kind {
                *range = Some(NumericRange { min: 0.0, max: 10.0 });
            }
            s
        };
        // (0.1, 0.7, 0.2) → green
        let table = decode(&[vec![0.5, 0.1, 0.7, 0.2, 1.0, 0.0]], &schema).unwrap();
        assert_eq!(table.rows[0][1], Cell::Label("green".into()));
        // (0.5, 0.5, 0.0) → red (lowest category index wins)
        let table = decode(&[vec![0.5, 0.5, 0.5, 0.0, 0.0, 1.0]], &schema).unwrap();
        assert_eq!(table.rows[0][1], Cell::Label("red".into()));
        // width mismatch is an error
        assert!(decode(&[vec![0.5, 0.5]], &schema).is_err());
    }

    #[test]
    fn encode_decode_roundtrip_is_identity() {
        let table = color_table();
        let encoded = fit_encode(&table).unwrap();
        let back = decode(&encoded.matrix, &encoded.schema).unwrap();
        assert_eq!(back.rows.len(), table.rows.len());
        for (got, want) in back.rows.iter().zip(&table.rows) {
            for (g, w) in got.iter().zip(want) {
                match (g, w) {
                    (Cell::Number(a), Cell::Number(b)) => {
                        assert!((a - b).abs() <= 1e-9, "{a} vs {b}")
                    }
                    _ => assert_eq!(g, w),
                }
            }
        }
    }

    #[test]
    fn impute_mean_and_mode() {
        let schema = Schema::new(
            vec![
                AttributeSpec::numeric("x"),
                AttributeSpec::categorical("c", vec!["red".into(), "green".into()]),
                AttributeSpec::categorical("class", vec!["a".into(), "b".into()]),
            ],
            2,
        )
        .unwrap();
        let table = RawTable::new(
            schema,
            vec![
                vec![Cell::Number(1.0), Cell::Label("red".into()), Cell::Label("a".into())],
                vec![Cell::Missing, Cell::Label("red".into()), Cell::Label("b".into())],
                vec![Cell::Number(3.0), Cell::Missing, Cell::Label("a".into())],
            ],
        )
        .unwrap();
        let imputed = impute_missing(&table).unwrap();
        assert_eq!(imputed.rows[1][0], Cell::Number(2.0));
        assert_eq!(imputed.rows[2][1], Cell::Label("red".into()));
        // non-missing cells unchanged
        assert_eq!(imputed.rows[0], table.rows[0]);
    }

    #[test]
    fn impute_without_missing_is_identity() {
        let table = color_table();
        assert_eq!(impute_missing(&table).unwrap(), table);
    }

    #[test]
    fn impute_all_missing_attribute_is_an_error() {
        let schema = Schema::new(
            vec![
                AttributeSpec::numeric("x"),
                AttributeSpec::categorical("class", vec!["a".into(), "b".into()]),
            ],
            1,
        )
        .unwrap();
        let table = RawTable::new(
            schema,
            vec![
                vec![Cell::Missing, Cell::Label("a".into())],
                vec![Cell::Missing, Cell::Label("b".into())],
            ],
        )
        .unwrap();
        assert!(impute_missing(&table).is_err());
    }

    #[test]
    fn split_sizes_follow_the_quarter_quarter_half_protocol() {
        let split = split_25_25_50(768, 1).unwrap();
        assert_eq!(
            (split.train.len(), split.seeding.len(), split.eval.len()),
            (192, 192, 384)
        );
        let split = split_25_25_50(8, 1).unwrap();
        assert_eq!(
            (split.train.len(), split.seeding.len(), split.eval.len()),
            (2, 2, 4)
        );
        assert!(split_25_25_50(7, 1).is_err());
    }

    #[test]
    fn split_is_a_seed_deterministic_partition() {
        let a = split_25_25_50(101, 99).unwrap();
        let b = split_25_25_50(101, 99).unwrap();
        assert_eq!(a, b);

        let mut all: Vec<usize> = a
            .train
            .iter()
            .chain(&a.seeding)
            .chain(&a.eval)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<_>>());

        let c = split_25_25_50(101, 100).unwrap();
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn class_labels_and_features_split_out_the_class_group() {
        let encoded = fit_encode(&color_table()).unwrap();
        assert_eq!(encoded.class_labels(), vec![0, 1, 0]);
        let (features, labels) = encoded.features_and_labels();
        assert_eq!(features[0].len(), 4); // 1 numeric + 3 one-hot
        assert_eq!(labels, vec![0, 1, 0]);
    }

    #[test]
    fn numeric_columns_view() {
        let encoded = fit_encode(&color_table()).unwrap();
        let cols = encoded.numeric_columns();
        assert_eq!(cols.len(), 1);
        assert_eq!(cols[0].0, "x");
        assert_eq!(cols[0].1, vec![0.0, 0.5, 1.0]);
    }
}
