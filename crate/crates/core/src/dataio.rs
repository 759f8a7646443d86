//! Sparse feature-typed datasets and their on-disk text formats.
//!
//! Vector file: one row per line, `<label>\t<col>:<value> <col>:<value> ...`,
//! with 0-based column indices. Blank lines and lines starting with `#` are
//! skipped.
//!
//! Boundaries file: one feature type per line,
//! `<type_name>\t<start_col>\t<end_col_exclusive>`, sorted by start column.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};

use crate::enumeration::ClassPartition;
use crate::error::{Error, Result};
use crate::format::fmt_value;

/// One named, contiguous block of columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureBlock {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

impl FeatureBlock {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn contains(&self, col: usize) -> bool {
        (self.start..self.end).contains(&col)
    }
}

/// Ordered feature-type blocks that jointly tile `[0, n_columns)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureTypeLayout {
    blocks: Vec<FeatureBlock>,
}

impl FeatureTypeLayout {
    pub fn new(blocks: Vec<FeatureBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Layout("no feature types".into()));
        }
        let mut names = BTreeSet::new();
        let mut expected_start = 0;
        for b in &blocks {
            if b.name.is_empty() || b.name.contains(|c: char| c.is_whitespace() || c == ',') {
                return Err(Error::Layout(format!(
                    "invalid type name `{}` (no whitespace or ',')",
                    b.name
                )));
            }
            if !names.insert(b.name.as_str()) {
                return Err(Error::Layout(format!("duplicate type name `{}`", b.name)));
            }
            if b.end <= b.start {
                return Err(Error::Layout(format!("type `{}` is empty", b.name)));
            }
            if b.start != expected_start {
                let what = if b.start < expected_start {
                    "overlaps"
                } else {
                    "leaves a gap before"
                };
                return Err(Error::Layout(format!(
                    "type `{}` {} column {}",
                    b.name, what, expected_start
                )));
            }
            expected_start = b.end;
        }
        Ok(Self { blocks })
    }

    /// Builds a layout from `(name, width)` pairs laid out back to back.
    pub fn from_widths<S: Into<String>>(widths: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut start = 0;
        let blocks = widths
            .into_iter()
            .map(|(name, w)| {
                let b = FeatureBlock {
                    name: name.into(),
                    start,
                    end: start + w,
                };
                start += w;
                b
            })
            .collect();
        Self::new(blocks)
    }

    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut blocks = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            }
            let num = |s: &str, what: &str| {
                s.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid {what} `{s}`"),
                })
            };
            blocks.push(FeatureBlock {
                name: fields[0].to_string(),
                start: num(fields[1], "start column")?,
                end: num(fields[2], "end column")?,
            });
        }
        Self::new(blocks)
    }

    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        for b in &self.blocks {
            writeln!(w, "{}\t{}\t{}", b.name, b.start, b.end)?;
        }
        Ok(())
    }

    pub fn blocks(&self) -> &[FeatureBlock] {
        &self.blocks
    }

    pub fn n_columns(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.end)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == name)
    }

    pub fn block_of(&self, col: usize) -> Option<usize> {
        // blocks are sorted, so a binary search on `end` finds the owner
        let i = self.blocks.partition_point(|b| b.end <= col);
        (i < self.blocks.len()).then_some(i)
    }
}

/// A nonempty selection of feature types, kept in layout order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSubset {
    selected: Vec<String>,
}

impl FeatureSubset {
    pub fn new<S: AsRef<str>>(names: &[S], layout: &FeatureTypeLayout) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Subset("empty subset".into()));
        }
        let mut positions = BTreeSet::new();
        for n in names {
            let n = n.as_ref();
            let pos = layout
                .position(n)
                .ok_or_else(|| Error::Subset(format!("unknown feature type `{n}`")))?;
            positions.insert(pos);
        }
        Ok(Self {
            selected: positions.into_iter().map(|p| layout.blocks()[p].name.clone()).collect(),
        })
    }

    /// Subset for a bitmask over the layout's blocks (bit `i` = block `i`).
    pub fn from_mask(mask: u64, layout: &FeatureTypeLayout) -> Result<Self> {
        let names: Vec<&str> = layout
            .blocks()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < 64 && mask & (1 << i) != 0)
            .map(|(_, b)| b.name.as_str())
            .collect();
        Self::new(&names, layout)
    }

    pub fn all(layout: &FeatureTypeLayout) -> Self {
        Self {
            selected: layout.blocks().iter().map(|b| b.name.clone()).collect(),
        }
    }

    /// Parses the comma-joined form used in the output files.
    pub fn parse(text: &str, layout: &FeatureTypeLayout) -> Result<Self> {
        let names: Vec<&str> = text.split(',').filter(|s| !s.is_empty()).collect();
        Self::new(&names, layout)
    }

    pub fn names(&self) -> &[String] {
        &self.selected
    }

    pub fn contains(&self, name: &str) -> bool {
        self.selected.iter().any(|s| s == name)
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.selected.join(","))
    }
}

/// Sparse row with strictly increasing column indices and nonzero values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseRow {
    /// Builds a row from `(col, value)` pairs; zero values are dropped.
    /// Returns the first duplicated column on failure.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> std::result::Result<Self, usize> {
        pairs.sort_by_key(|&(c, _)| c);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(w[0].0);
        }
        let (indices, values) = pairs.into_iter().filter(|&(_, v)| v != 0.0).unzip();
        Ok(Self { indices, values })
    }

    pub fn from_dense(values: &[f64]) -> Self {
        let (indices, values) = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .unzip();
        Self { indices, values }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn to_dense(&self, n_columns: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_columns];
        for (c, v) in self.iter() {
            out[c] = v;
        }
        out
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(c, v)| v * dense[c]).sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    fn has_nonzero_in(&self, block: &FeatureBlock) -> bool {
        let i = self.indices.partition_point(|&c| c < block.start);
        i < self.indices.len() && self.indices[i] < block.end
    }
}

/// Validated row-sparse dataset with per-row labels and a feature-type layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDataset {
    rows: Vec<SparseRow>,
    labels: Vec<String>,
    layout: FeatureTypeLayout,
}

pub(crate) fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() || label.contains(|c: char| c.is_whitespace() || c == ',' || c == '/') {
        return Err(Error::InvalidLabel(label.to_string()));
    }
    Ok(())
}

impl SparseDataset {
    pub fn new(rows: Vec<SparseRow>, labels: Vec<String>, layout: FeatureTypeLayout) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: labels.len(),
            });
        }
        let n_columns = layout.n_columns();
        for (r, (row, label)) in rows.iter().zip(&labels).enumerate() {
            validate_label(label)?;
            for (c, v) in row.iter() {
                if c >= n_columns {
                    return Err(Error::ColumnOutOfRange {
                        row: r,
                        col: c,
                        n_columns,
                    });
                }
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "row {r}: value {v} at column {c} is not a finite nonnegative number"
                    )));
                }
            }
            if let Some(b) = layout.blocks().iter().find(|b| !row.has_nonzero_in(b)) {
                return Err(Error::MissingBlock {
                    row: r,
                    block: b.name.clone(),
                });
            }
        }
        let distinct: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        if rows.len() < 2 || distinct.len() < 2 {
            return Err(Error::TooFewLabels {
                rows: rows.len(),
                labels: distinct.len(),
            });
        }
        Ok(Self { rows, labels, layout })
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn layout(&self) -> &FeatureTypeLayout {
        &self.layout
    }

    pub fn n_columns(&self) -> usize {
        self.layout.n_columns()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn label_set(&self) -> BTreeSet<String> {
        self.labels.iter().cloned().collect()
    }

    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        self.rows[i].to_dense(self.n_columns())
    }

    pub fn write_vectors(&self, mut w: impl Write) -> std::io::Result<()> {
        for (row, label) in self.rows.iter().zip(&self.labels) {
            write!(w, "{label}\t")?;
            for (k, (c, v)) in row.iter().enumerate() {
                if k > 0 {
                    w.write_all(b" ")?;
                }
                write!(w, "{c}:{}", fmt_value(v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Parses a vector file against a boundaries file.
pub fn parse_dataset(vectors: impl BufRead, boundaries: impl BufRead) -> Result<SparseDataset> {
    let layout = FeatureTypeLayout::parse(boundaries)?;
    let n_columns = layout.n_columns();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in vectors.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, rest) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: "expected `<label><TAB><col>:<value> ...`".into(),
        })?;
        validate_label(label).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let mut pairs = Vec::new();
        for tok in rest.split_ascii_whitespace() {
            let (c, v) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("malformed entry `{tok}`"),
            })?;
            let c: usize = c.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("invalid column index `{c}`"),
            })?;
            let v: f64 = v.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("invalid value `{v}`"),
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("value `{v}` is not a finite nonnegative number"),
                });
            }
            if c >= n_columns {
                return Err(Error::ColumnOutOfRange {
                    row: rows.len(),
                    col: c,
                    n_columns,
                });
            }
            pairs.push((c, v));
        }
        let row = SparseRow::from_pairs(pairs).map_err(|col| Error::DuplicateColumn { row: rows.len(), col })?;
        rows.push(row);
        labels.push(label.to_string());
    }
    SparseDataset::new(rows, labels, layout)
}

/// Keeps only the columns of `subset`'s blocks, re-indexed densely in block order.
pub fn project(ds: &SparseDataset, subset: &FeatureSubset) -> Result<SparseDataset> {
    if subset.is_empty() {
        return Err(Error::Subset("empty subset".into()));
    }
    let layout = ds.layout();
    // old column -> new column offset for each retained block
    let mut offsets: Vec<Option<usize>> = vec![None; layout.len()];
    let mut widths = Vec::with_capacity(subset.len());
    let mut next = 0;
    for (i, b) in layout.blocks().iter().enumerate() {
        if subset.contains(&b.name) {
            offsets[i] = Some(next);
            widths.push((b.name.clone(), b.len()));
            next += b.len();
        }
    }
    if widths.len() != subset.len() {
        return Err(Error::Subset(format!("subset `{subset}` does not match the layout")));
    }
    let new_layout = FeatureTypeLayout::from_widths(widths)?;
    let rows = ds
        .rows()
        .iter()
        .map(|row| {
            let (indices, values) = row
                .iter()
                .filter_map(|(c, v)| {
                    let bi = layout.block_of(c)?;
                    offsets[bi].map(|off| (off + c - layout.blocks()[bi].start, v))
                })
                .unzip();
            SparseRow { indices, values }
        })
        .collect();
    Ok(SparseDataset {
        rows,
        labels: ds.labels.clone(),
        layout: new_layout,
    })
}

/// Row indices of the positive and negative side, in original order.
pub fn split_by_partition(ds: &SparseDataset, part: &ClassPartition) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, label) in ds.labels().iter().enumerate() {
        if part.positive().contains(label) {
            pos.push(i);
        } else if part.negative().contains(label) {
            neg.push(i);
        } else {
            return Err(Error::Partition(format!("label `{label}` is not covered by {part}")));
        }
    }
    if pos.is_empty() {
        return Err(Error::EmptyClass("positive"));
    }
    if neg.is_empty() {
        return Err(Error::EmptyClass("negative"));
    }
    Ok((pos, neg))
}
