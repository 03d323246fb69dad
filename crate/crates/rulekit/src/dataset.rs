//! Tabular dataset representation, CSV ingestion and train/test handling.
//!
//! A [`Dataset`] holds an n×m matrix of optional real-valued cells (absent =
//! missing) plus one nominal class column. Missing cells are an explicit
//! `None`, never a sentinel number, so real values can never collide with
//! the missing marker. The class column is stored separately as indices into
//! `class_labels` and can never be missing.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How an attribute's values are interpreted.
///
/// Categorical-numeric attributes are integer-coded categories; they are
/// still ordered numerics for rule conditions, but equality tests are
/// reserved for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttributeKind {
    Continuous,
    CategoricalNumeric,
}

/// One feature column of a dataset schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
    /// Zero-based column position; contiguous 0..m-1 within a schema.
    pub index: usize,
}

/// Immutable tabular dataset: typed feature columns with optional cells and
/// one nominal class column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    schema: Vec<AttributeSpec>,
    class_name: String,
    class_labels: Vec<String>,
    /// Row-major n×m cells; `None` marks a missing value.
    cells: Vec<Option<f64>>,
    /// Per-row class index into `class_labels`.
    classes: Vec<usize>,
}

/// Disjoint grow/prune partition of a dataset.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub grow: Dataset,
    pub prune: Dataset,
}

impl Dataset {
    /// Builds a dataset, validating the schema and shape invariants.
    pub fn new(
        schema: Vec<AttributeSpec>,
        class_name: String,
        class_labels: Vec<String>,
        cells: Vec<Option<f64>>,
        classes: Vec<usize>,
    ) -> Result<Self> {
        let mut names = HashSet::new();
        for (i, attr) in schema.iter().enumerate() {
            if attr.index != i {
                return Err(Error::Data(format!(
                    "attribute '{}' has index {} at position {}",
                    attr.name, attr.index, i
                )));
            }
            if !names.insert(attr.name.as_str()) {
                return Err(Error::Data(format!("duplicate attribute name '{}'", attr.name)));
            }
        }
        if class_labels.len() < 2 {
            return Err(Error::Data("need >=2 classes".into()));
        }
        if cells.len() != classes.len() * schema.len() {
            return Err(Error::Data(format!(
                "cell matrix has {} entries, expected {} rows x {} attributes",
                cells.len(),
                classes.len(),
                schema.len()
            )));
        }
        if let Some(bad) = classes.iter().find(|&&c| c >= class_labels.len()) {
            return Err(Error::Data(format!(
                "class index {bad} out of range for {} labels",
                class_labels.len()
            )));
        }
        Ok(Dataset {
            schema,
            class_name,
            class_labels,
            cells,
            classes,
        })
    }

    /// Builds a dataset from a dense feature matrix; NaN entries become
    /// missing cells.
    pub fn from_array(
        names: Vec<String>,
        kind: AttributeKind,
        features: &Array2<f64>,
        class_name: String,
        class_labels: Vec<String>,
        classes: Vec<usize>,
    ) -> Result<Self> {
        if names.len() != features.ncols() {
            return Err(Error::Data(format!(
                "{} attribute names for {} columns",
                names.len(),
                features.ncols()
            )));
        }
        let schema = names
            .into_iter()
            .enumerate()
            .map(|(index, name)| AttributeSpec { name, kind, index })
            .collect();
        let cells = features
            .iter()
            .map(|&v| if v.is_nan() { None } else { Some(v) })
            .collect();
        Dataset::new(schema, class_name, class_labels, cells, classes)
    }

    pub fn schema(&self) -> &[AttributeSpec] {
        &self.schema
    }

    pub fn class_name(&self) -> &str {
        &self.class_name
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn n_rows(&self) -> usize {
        self.classes.len()
    }

    /// Number of feature attributes (the class column is not counted).
    pub fn n_attributes(&self) -> usize {
        self.schema.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row * self.schema.len() + col]
    }

    pub fn row(&self, row: usize) -> &[Option<f64>] {
        let m = self.schema.len();
        &self.cells[row * m..(row + 1) * m]
    }

    pub fn class_of(&self, row: usize) -> usize {
        self.classes[row]
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    /// Instance count per class index.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_labels.len()];
        for &c in &self.classes {
            counts[c] += 1;
        }
        counts
    }

    pub fn missing_cell_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    /// Dense feature matrix with NaN in place of missing cells, for the
    /// numeric front-ends. NaN cannot occur as a loaded value, so the
    /// encoding is collision-free.
    pub fn features_array(&self) -> Array2<f64> {
        let (n, m) = (self.n_rows(), self.n_attributes());
        Array2::from_shape_fn((n, m), |(r, c)| self.cell(r, c).unwrap_or(f64::NAN))
    }

    /// New dataset containing only the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let m = self.schema.len();
        let mut cells = Vec::with_capacity(rows.len() * m);
        let mut classes = Vec::with_capacity(rows.len());
        for &r in rows {
            cells.extend_from_slice(self.row(r));
            classes.push(self.classes[r]);
        }
        Dataset {
            schema: self.schema.clone(),
            class_name: self.class_name.clone(),
            class_labels: self.class_labels.clone(),
            cells,
            classes,
        }
    }

    /// New dataset keeping only the given feature columns (re-indexed in the
    /// given order). The class column is always carried along.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Dataset> {
        let m = self.schema.len();
        if let Some(&bad) = cols.iter().find(|&&c| c >= m) {
            return Err(Error::Data(format!("column {bad} out of range for {m} attributes")));
        }
        let schema = cols
            .iter()
            .enumerate()
            .map(|(index, &c)| AttributeSpec {
                name: self.schema[c].name.clone(),
                kind: self.schema[c].kind,
                index,
            })
            .collect();
        let mut cells = Vec::with_capacity(self.n_rows() * cols.len());
        for r in 0..self.n_rows() {
            let row = self.row(r);
            cells.extend(cols.iter().map(|&c| row[c]));
        }
        Ok(Dataset {
            schema,
            class_name: self.class_name.clone(),
            class_labels: self.class_labels.clone(),
            cells,
            classes: self.classes.clone(),
        })
    }

    /// Returns a copy with the given feature cells masked out.
    pub(crate) fn with_masked(&self, mask: &[(usize, usize)]) -> Dataset {
        let mut out = self.clone();
        let m = self.schema.len();
        for &(r, c) in mask {
            out.cells[r * m + c] = None;
        }
        out
    }
}

/// Options controlling delimited-text ingestion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub missing_marker: String,
    pub class_column: String,
    /// Columns dropped on load (identifiers, dates, ...).
    pub drop_columns: Vec<String>,
    /// Integer-valued columns with at most this many distinct values are
    /// typed categorical-numeric.
    pub categorical_max_distinct: usize,
}

impl CsvOptions {
    pub fn new(class_column: impl Into<String>) -> Self {
        CsvOptions {
            delimiter: b',',
            missing_marker: "?".into(),
            class_column: class_column.into(),
            drop_columns: Vec::new(),
            categorical_max_distinct: 10,
        }
    }
}

/// Loads a delimited text file with a header row into a [`Dataset`].
///
/// Cells equal to the missing marker are recorded as missing; class labels
/// are collected in first-appearance order.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                Error::io(path, std::io::Error::other(e.to_string()))
            }
            _ => Error::Data(e.to_string()),
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Data(format!("{}: bad header: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let class_col = headers
        .iter()
        .position(|h| h == &options.class_column)
        .ok_or_else(|| {
            Error::Config(format!(
                "class column '{}' not found in {}",
                options.class_column,
                path.display()
            ))
        })?;
    let mut dropped = HashSet::new();
    for name in &options.drop_columns {
        let idx = headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Config(format!("drop column '{name}' not found in {}", path.display()))
        })?;
        if idx == class_col {
            return Err(Error::Config(format!("cannot drop the class column '{name}'")));
        }
        dropped.insert(idx);
    }

    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&i| i != class_col && !dropped.contains(&i))
        .collect();

    let mut cells: Vec<Option<f64>> = Vec::new();
    let mut classes: Vec<usize> = Vec::new();
    let mut class_labels: Vec<String> = Vec::new();
    let mut label_index: HashMap<String, usize> = HashMap::new();

    for (i, record) in reader.records().enumerate() {
        let rownum = i + 1; // 1-based data row
        let record = record.map_err(|e| Error::Data(format!("row {rownum}: {e}")))?;
        if record.len() != headers.len() {
            return Err(Error::Data(format!(
                "row {rownum}: has {} fields, expected {}",
                record.len(),
                headers.len()
            )));
        }
        for &c in &feature_cols {
            let raw = record[c].trim();
            if raw == options.missing_marker {
                cells.push(None);
                continue;
            }
            let value: f64 = raw.parse().map_err(|_| {
                Error::Data(format!(
                    "row {rownum}, column '{}': cannot parse '{raw}' as a number",
                    headers[c]
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::Data(format!(
                    "row {rownum}, column '{}': non-finite value '{raw}'",
                    headers[c]
                )));
            }
            cells.push(Some(value));
        }
        let raw_class = record[class_col].trim();
        if raw_class == options.missing_marker || raw_class.is_empty() {
            return Err(Error::Data(format!("row {rownum}: class value is missing")));
        }
        let idx = *label_index.entry(raw_class.to_string()).or_insert_with(|| {
            class_labels.push(raw_class.to_string());
            class_labels.len() - 1
        });
        classes.push(idx);
    }

    if class_labels.len() < 2 {
        return Err(Error::Data(format!(
            "need >=2 classes, found {} in {}",
            class_labels.len(),
            path.display()
        )));
    }

    let schema = infer_schema(&headers, &feature_cols, &cells, options);
    Dataset::new(
        schema,
        headers[class_col].clone(),
        class_labels,
        cells,
        classes,
    )
}

fn infer_schema(
    headers: &[String],
    feature_cols: &[usize],
    cells: &[Option<f64>],
    options: &CsvOptions,
) -> Vec<AttributeSpec> {
    let m = feature_cols.len();
    let n = if m == 0 { 0 } else { cells.len() / m };
    feature_cols
        .iter()
        .enumerate()
        .map(|(index, &c)| {
            let mut distinct: Vec<f64> = Vec::new();
            let mut all_integer = true;
            for r in 0..n {
                if let Some(v) = cells[r * m + index] {
                    if v.fract() != 0.0 {
                        all_integer = false;
                        break;
                    }
                    if !distinct.contains(&v) {
                        distinct.push(v);
                        if distinct.len() > options.categorical_max_distinct {
                            break;
                        }
                    }
                }
            }
            let kind = if all_integer
                && !distinct.is_empty()
                && distinct.len() <= options.categorical_max_distinct
            {
                AttributeKind::CategoricalNumeric
            } else {
                AttributeKind::Continuous
            };
            AttributeSpec {
                name: headers[c].clone(),
                kind,
                index,
            }
        })
        .collect()
}

/// Writes a dataset back to delimited text. Non-missing cells round-trip
/// exactly (shortest representation that parses back to the same value);
/// missing cells are written as the marker.
pub fn save_csv(data: &Dataset, path: impl AsRef<Path>, options: &CsvOptions) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::WriterBuilder::new()
        .delimiter(options.delimiter)
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;

    let mut header: Vec<&str> = data.schema.iter().map(|a| a.name.as_str()).collect();
    header.push(data.class_name());
    writer
        .write_record(&header)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;

    let mut record: Vec<String> = Vec::with_capacity(data.n_attributes() + 1);
    for r in 0..data.n_rows() {
        record.clear();
        for cell in data.row(r) {
            record.push(match cell {
                Some(v) => format!("{v}"),
                None => options.missing_marker.clone(),
            });
        }
        record.push(data.class_labels[data.classes[r]].clone());
        writer
            .write_record(&record)
            .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Splits a dataset into grow/prune subsets by seeded stratified sampling.
///
/// The grow side receives `round(ratio * n)` rows, apportioned per class by
/// largest remainder so each class stays within one instance of its
/// stratified ideal. Classes with fewer than two instances force a fallback
/// to unstratified sampling.
pub fn split_grow_prune(data: &Dataset, ratio: f64, seed: u64) -> Result<SplitPair> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config(format!("grow ratio must be in (0,1), got {ratio}")));
    }
    let n = data.n_rows();
    if n == 0 {
        return Err(Error::Data("cannot split an empty dataset".into()));
    }
    let grow_target = (ratio * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let counts = data.class_counts();
    let stratifiable = counts.iter().all(|&c| c == 0 || c >= 2);

    let mut grow_rows: Vec<usize> = Vec::with_capacity(grow_target);
    if stratifiable {
        // Largest-remainder apportionment of the grow target across classes.
        let quotas: Vec<f64> = counts
            .iter()
            .map(|&c| grow_target as f64 * c as f64 / n as f64)
            .collect();
        let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let assigned: usize = take.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = quotas[a] - quotas[a].floor();
            let fb = quotas[b] - quotas[b].floor();
            fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
        });
        for &c in order.iter().take(grow_target - assigned) {
            take[c] += 1;
        }
        for class in 0..counts.len() {
            let mut rows: Vec<usize> = (0..n).filter(|&r| data.class_of(r) == class).collect();
            rows.shuffle(&mut rng);
            grow_rows.extend(rows.into_iter().take(take[class]));
        }
    } else {
        log::warn!("a class has fewer than 2 instances; falling back to unstratified sampling");
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        grow_rows.extend(rows.into_iter().take(grow_target));
    }

    grow_rows.sort_unstable();
    let grow_set: HashSet<usize> = grow_rows.iter().copied().collect();
    let prune_rows: Vec<usize> = (0..n).filter(|r| !grow_set.contains(r)).collect();
    Ok(SplitPair {
        grow: data.subset(&grow_rows),
        prune: data.subset(&prune_rows),
    })
}

/// Class indices sorted from least to most prevalent; ties break toward the
/// lower class index.
pub fn class_prevalence_order(data: &Dataset) -> Vec<usize> {
    let counts = data.class_counts();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[a].cmp(&counts[b]).then(a.cmp(&b)));
    order
}
