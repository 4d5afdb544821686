//! Loading tabular data into discrete datasets: parsing, type inference,
//! discretization, and the missing-value policy (listwise row deletion).

use crate::distribution::{JointDistribution, MeasureError};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Malformed(String),
    #[error("file has no header row")]
    MissingHeader,
    #[error("column `{column}` contains non-finite numeric value {value}")]
    NonFiniteNumeric { column: String, value: f64 },
    #[error("no rows remain after dropping {dropped} rows with missing values")]
    EmptyAfterFiltering { dropped: usize },
    #[error("bin count must be at least 1, got {0}")]
    BadBinCount(usize),
}

/// Input table format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Tsv,
}

/// A parsed table: header plus string cells, no typing yet.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Reads a delimited file with a header row. Rows with the wrong arity are
/// an error naming the offending line.
pub fn read_table(path: &Path, format: TableFormat) -> Result<RawTable, IngestError> {
    let delimiter = match format {
        TableFormat::Csv => b',',
        TableFormat::Tsv => b'\t',
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => IngestError::Io {
                path: path.display().to_string(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => IngestError::Malformed(e.to_string()),
        })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| IngestError::Malformed(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(IngestError::MissingHeader);
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::Malformed(e.to_string()))?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(RawTable { headers, rows })
}

/// Discretization strategy for numeric columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinStrategy {
    /// Quantile bins: each bin gets within one row of `N / bins` when values
    /// are distinct.
    EqualFrequency,
    /// Bins of equal width over the observed range.
    EqualWidth,
}

/// Options controlling [`encode`].
#[derive(Clone, Debug)]
pub struct EncodeOptions {
    pub bins: usize,
    pub strategy: BinStrategy,
    /// Cell contents treated as missing; the empty string always counts.
    pub na_sentinels: Vec<String>,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            bins: 4,
            strategy: BinStrategy::EqualFrequency,
            na_sentinels: Vec::new(),
        }
    }
}

/// How a column's codes map back to original values.
#[derive(Clone, Debug, PartialEq)]
pub enum ColumnKind {
    /// Codes index original category strings, in first-appearance order.
    Categorical,
    /// Codes index half-open numeric intervals.
    Binned,
}

/// Per-column decode table: `levels[code]` describes the original value.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnMap {
    pub kind: ColumnKind,
    pub levels: Vec<String>,
}

/// A fully encoded dataset: equal-length columns of dense category codes.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub columns: Vec<Vec<u32>>,
    pub maps: Vec<ColumnMap>,
    pub row_count: usize,
    pub dropped_rows: usize,
}

impl Dataset {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Number of distinct codes in a column.
    pub fn cardinality(&self, col: usize) -> usize {
        self.maps[col].levels.len()
    }

    /// Original value text for a code.
    pub fn decode(&self, col: usize, code: u32) -> &str {
        &self.maps[col].levels[code as usize]
    }

    /// Dense joint count table over the given columns, variable order as
    /// listed, first column fastest. Returns the counts and the row total,
    /// which the counts sum to exactly.
    pub fn joint_counts(&self, cols: &[usize]) -> (Vec<u64>, u64) {
        let cards: Vec<usize> = cols.iter().map(|&c| self.cardinality(c)).collect();
        let size: usize = cards.iter().product::<usize>().max(1);
        let mut counts = vec![0u64; size];
        for row in 0..self.row_count {
            let mut idx = 0;
            let mut stride = 1;
            for (k, &c) in cols.iter().enumerate() {
                idx += self.columns[c][row] as usize * stride;
                stride *= cards[k];
            }
            counts[idx] += 1;
        }
        (counts, self.row_count as u64)
    }

    /// Empirical joint distribution over the given columns.
    pub fn joint_distribution(&self, cols: &[usize]) -> Result<JointDistribution, MeasureError> {
        let names: Vec<String> = cols.iter().map(|&c| self.names[c].clone()).collect();
        let cards: Vec<usize> = cols.iter().map(|&c| self.cardinality(c)).collect();
        let (counts, _) = self.joint_counts(cols);
        JointDistribution::from_counts(names, cards, &counts)
    }
}

fn is_missing(cell: &str, opts: &EncodeOptions) -> bool {
    cell.is_empty() || opts.na_sentinels.iter().any(|s| s == cell)
}

fn encode_categorical(cells: &[&str]) -> (Vec<u32>, ColumnMap) {
    let mut codes = Vec::with_capacity(cells.len());
    let mut levels: Vec<String> = Vec::new();
    let mut index: BTreeMap<&str, u32> = BTreeMap::new();
    for &cell in cells {
        let code = match index.get(cell) {
            Some(&c) => c,
            None => {
                let c = levels.len() as u32;
                levels.push(cell.to_string());
                index.insert(cell, c);
                c
            }
        };
        codes.push(code);
    }
    (
        codes,
        ColumnMap {
            kind: ColumnKind::Categorical,
            levels,
        },
    )
}

/// Quantile cut points: edge `k` sits at the midpoint between the sorted
/// values flanking position `k * N / bins`; a value equal to an edge goes to
/// the lower bin.
fn equal_frequency_edges(sorted: &[f64], bins: usize) -> Vec<f64> {
    let n = sorted.len();
    let mut edges = Vec::new();
    for k in 1..bins {
        let pos = k * n / bins;
        if pos == 0 || pos >= n {
            continue;
        }
        edges.push((sorted[pos - 1] + sorted[pos]) / 2.0);
    }
    edges.dedup();
    edges
}

fn equal_width_edges(sorted: &[f64], bins: usize) -> Vec<f64> {
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    if lo == hi {
        return Vec::new();
    }
    let width = (hi - lo) / bins as f64;
    (1..bins).map(|k| lo + width * k as f64).collect()
}

fn encode_numeric(values: &[f64], opts: &EncodeOptions) -> Result<(Vec<u32>, ColumnMap), IngestError> {
    if opts.bins == 0 {
        return Err(IngestError::BadBinCount(0));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let edges = match opts.strategy {
        BinStrategy::EqualFrequency => equal_frequency_edges(&sorted, opts.bins),
        BinStrategy::EqualWidth => equal_width_edges(&sorted, opts.bins),
    };
    // Raw bin of a value: count of edges strictly below it (ties go lower).
    let raw_bin = |v: f64| edges.iter().filter(|&&e| v > e).count();
    let mut used: Vec<bool> = vec![false; edges.len() + 1];
    for &v in values {
        used[raw_bin(v)] = true;
    }
    // Dense re-map, dropping bins nothing fell into.
    let mut dense = vec![u32::MAX; edges.len() + 1];
    let mut next = 0u32;
    for (bin, flag) in used.iter().enumerate() {
        if *flag {
            dense[bin] = next;
            next += 1;
        }
    }
    let codes: Vec<u32> = values.iter().map(|&v| dense[raw_bin(v)]).collect();
    let mut levels = Vec::new();
    for (bin, flag) in used.iter().enumerate() {
        if !*flag {
            continue;
        }
        let lo = if bin == 0 {
            "-inf".to_string()
        } else {
            format!("{}", edges[bin - 1])
        };
        let hi = if bin == edges.len() {
            "+inf".to_string()
        } else {
            format!("{}", edges[bin])
        };
        levels.push(format!("({lo}, {hi}]"));
    }
    Ok((
        codes,
        ColumnMap {
            kind: ColumnKind::Binned,
            levels,
        },
    ))
}

/// Encodes a raw table: rows with any missing cell are dropped and counted,
/// fully numeric columns are discretized per the options, and everything
/// else is coded categorically by first appearance.
pub fn encode(raw: &RawTable, opts: &EncodeOptions) -> Result<Dataset, IngestError> {
    let n_cols = raw.headers.len();
    for (i, row) in raw.rows.iter().enumerate() {
        if row.len() != n_cols {
            return Err(IngestError::Malformed(format!(
                "row {} has {} fields, expected {n_cols}",
                i + 1,
                row.len()
            )));
        }
    }
    let kept: Vec<&Vec<String>> = raw
        .rows
        .iter()
        .filter(|row| !row.iter().any(|cell| is_missing(cell, opts)))
        .collect();
    let dropped_rows = raw.rows.len() - kept.len();
    if kept.is_empty() {
        return Err(IngestError::EmptyAfterFiltering {
            dropped: dropped_rows,
        });
    }

    let mut columns = Vec::with_capacity(n_cols);
    let mut maps = Vec::with_capacity(n_cols);
    for (c, name) in raw.headers.iter().enumerate() {
        let cells: Vec<&str> = kept.iter().map(|row| row[c].as_str()).collect();
        let numeric: Option<Vec<f64>> = cells
            .iter()
            .map(|s| s.trim().parse::<f64>().ok())
            .collect();
        let (codes, map) = match numeric {
            Some(values) => {
                if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
                    return Err(IngestError::NonFiniteNumeric {
                        column: name.clone(),
                        value: bad,
                    });
                }
                encode_numeric(&values, opts)?
            }
            None => encode_categorical(&cells),
        };
        columns.push(codes);
        maps.push(map);
    }
    Ok(Dataset {
        names: raw.headers.clone(),
        columns,
        maps,
        row_count: kept.len(),
        dropped_rows,
    })
}
