//! Node rosters, raw path-loss files and the canonical symmetric path-loss matrix.
//!
//! File formats:
//!
//! * roster CSV: header `id,lat,lon,elev_m`; coordinate columns may be empty.
//! * matrix CSV: first row `id,<id_1>,...,<id_n>`, then one row per node
//!   `<id_i>,<v_i1>,...,<v_in>`. Cells are decimal numbers or `NA` (no path).
//!
//! "No path" is held in memory as `+inf` dB so that taking the maximum of the
//! two link directions propagates it without special cases.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// File token for a link with no propagation path.
pub const NO_PATH_TOKEN: &str = "NA";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate node id \"{id}\"")]
    DuplicateId { line: usize, id: String },
    #[error("roster is empty")]
    EmptyRoster,
    #[error("matrix header/roster mismatch: {0}")]
    RosterMismatch(String),
    #[error("line {line}: non-numeric cell {cell:?} in column \"{column}\"")]
    NonNumeric {
        line: usize,
        column: String,
        cell: String,
    },
    #[error("line {line}: expected {expected} cells, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub id: String,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    pub elevation_m: Option<f64>,
}

impl NodeRecord {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            latitude: None,
            longitude: None,
            elevation_m: None,
        }
    }
}

/// Ordered node set. Position in the roster is the row/column index of every
/// matrix downstream.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRoster {
    nodes: Vec<NodeRecord>,
    index: HashMap<String, usize>,
}

impl NodeRoster {
    pub fn new(nodes: Vec<NodeRecord>) -> Result<Self, IngestError> {
        if nodes.is_empty() {
            return Err(IngestError::EmptyRoster);
        }
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node.id.trim().is_empty() {
                return Err(IngestError::Malformed {
                    line: i + 2,
                    message: "empty node id".into(),
                });
            }
            if index.insert(node.id.clone(), i).is_some() {
                return Err(IngestError::DuplicateId {
                    line: i + 2,
                    id: node.id.clone(),
                });
            }
        }
        Ok(Self { nodes, index })
    }

    /// Roster of bare ids without coordinates.
    pub fn from_ids<S: AsRef<str>>(ids: &[S]) -> Result<Self, IngestError> {
        Self::new(ids.iter().map(|s| NodeRecord::new(s.as_ref())).collect())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn ids(&self) -> Vec<&str> {
        self.nodes.iter().map(|n| n.id.as_str()).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut w = BufWriter::new(w);
        writeln!(w, "id,lat,lon,elev_m")?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        for n in &self.nodes {
            writeln!(
                w,
                "{},{},{},{}",
                n.id,
                opt(n.latitude),
                opt(n.longitude),
                opt(n.elevation_m)
            )?;
        }
        w.flush()
    }
}

/// Loss from node `i` transmitting to node `j`, in roster order. Not
/// necessarily reciprocal.
#[derive(Clone, Debug, PartialEq)]
pub struct RawPathLoss<T> {
    pub values: Matrix<T>,
}

/// Symmetric path loss in dB with an exactly zero diagonal. Off-diagonal
/// entries are finite and non-negative, or `+inf` for "no path".
#[derive(Clone, Debug, PartialEq)]
pub struct PathLossMatrix<T> {
    values: Matrix<T>,
}

impl<T: Scalar> PathLossMatrix<T> {
    /// Wraps an already-symmetric matrix, checking the invariants.
    pub fn new(values: Matrix<T>) -> Result<Self, IngestError> {
        if !values.is_square() {
            return Err(IngestError::NotSquare {
                rows: values.rows(),
                cols: values.cols(),
            });
        }
        let n = values.rows();
        for i in 0..n {
            if values[(i, i)] != T::zero() {
                return Err(IngestError::Malformed {
                    line: i + 2,
                    message: "path-loss diagonal must be zero".into(),
                });
            }
            for j in 0..n {
                let v = values[(i, j)];
                if v.is_nan() || v < T::zero() || v != values[(j, i)] {
                    return Err(IngestError::Malformed {
                        line: i + 2,
                        message: format!("entry ({i},{j}) breaks symmetry or is invalid"),
                    });
                }
            }
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[(i, j)]
    }
}

pub fn is_no_path<T: Scalar>(v: T) -> bool {
    v.is_infinite() && v > T::zero()
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_opt_coord(line: usize, column: &str, cell: &str) -> Result<Option<f64>, IngestError> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| IngestError::NonNumeric {
            line,
            column: column.into(),
            cell: cell.into(),
        })
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r)
}

fn csv_err(e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    IngestError::Malformed {
        line,
        message: e.to_string(),
    }
}

pub fn read_roster<R: Read>(r: R) -> Result<NodeRoster, IngestError> {
    let mut rdr = csv_reader(r);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(IngestError::EmptyRoster),
        Some(h) => h.map_err(csv_err)?,
    };
    let cols: Vec<&str> = header.iter().collect();
    if cols != ["id", "lat", "lon", "elev_m"] {
        return Err(IngestError::Malformed {
            line: 1,
            message: format!("roster header must be id,lat,lon,elev_m, got {}", cols.join(",")),
        });
    }
    let mut nodes = Vec::new();
    for (k, rec) in records.enumerate() {
        let line = k + 2;
        let rec = rec.map_err(csv_err)?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 4 {
            return Err(IngestError::Ragged {
                line,
                expected: 4,
                found: rec.len(),
            });
        }
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(IngestError::Malformed {
                line,
                message: "empty node id".into(),
            });
        }
        nodes.push(NodeRecord {
            latitude: parse_opt_coord(line, "lat", &rec[1])?,
            longitude: parse_opt_coord(line, "lon", &rec[2])?,
            elevation_m: parse_opt_coord(line, "elev_m", &rec[3])?,
            id,
        });
    }
    if nodes.is_empty() {
        return Err(IngestError::EmptyRoster);
    }
    NodeRoster::new(nodes)
}

pub fn load_roster(path: impl AsRef<Path>) -> Result<NodeRoster, IngestError> {
    read_roster(open(path.as_ref())?)
}

/// Matrix CSV as stored on disk: ids in file order plus the values.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix<T> {
    pub ids: Vec<String>,
    pub values: Matrix<T>,
}

fn parse_cell<T: Scalar>(line: usize, column: &str, cell: &str) -> Result<T, IngestError> {
    if cell == NO_PATH_TOKEN {
        return Ok(T::infinity());
    }
    cell.parse::<T>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| IngestError::NonNumeric {
            line,
            column: column.into(),
            cell: cell.into(),
        })
}

/// Reads a square matrix CSV. Row ids must match the header ids in the same
/// order.
pub fn read_matrix_csv<T: Scalar, R: Read>(r: R) -> Result<LabeledMatrix<T>, IngestError> {
    let mut rdr = csv_reader(r);
    let mut records = rdr.records();
    let header = match records.next() {
        None => {
            return Err(IngestError::Malformed {
                line: 1,
                message: "empty matrix file".into(),
            })
        }
        Some(h) => h.map_err(csv_err)?,
    };
    if header.get(0) != Some("id") {
        return Err(IngestError::Malformed {
            line: 1,
            message: "matrix header must start with \"id\"".into(),
        });
    }
    let ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = ids.len();
    let mut rows = Vec::with_capacity(n);
    for (k, rec) in records.enumerate() {
        let line = k + 2;
        let rec = rec.map_err(csv_err)?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != n + 1 {
            return Err(IngestError::Ragged {
                line,
                expected: n + 1,
                found: rec.len(),
            });
        }
        let row_id = &rec[0];
        match ids.get(rows.len()) {
            Some(expected) if expected == row_id => {}
            _ => {
                return Err(IngestError::RosterMismatch(format!(
                    "line {line}: row id \"{row_id}\" does not match header position {}",
                    rows.len()
                )))
            }
        }
        let row = rec
            .iter()
            .skip(1)
            .zip(&ids)
            .map(|(cell, col)| parse_cell::<T>(line, col, cell))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(IngestError::NotSquare {
            rows: rows.len(),
            cols: n,
        });
    }
    let values = Matrix::from_rows(rows).expect("row lengths checked");
    Ok(LabeledMatrix { ids, values })
}

/// Reorders a labeled matrix into roster order. The id sets must coincide.
pub fn align_to_roster<T: Scalar>(
    m: LabeledMatrix<T>,
    roster: &NodeRoster,
) -> Result<RawPathLoss<T>, IngestError> {
    let mut seen = HashSet::with_capacity(m.ids.len());
    for id in &m.ids {
        if !seen.insert(id.as_str()) {
            return Err(IngestError::RosterMismatch(format!("id \"{id}\" repeated in header")));
        }
        if roster.index_of(id).is_none() {
            return Err(IngestError::RosterMismatch(format!("id \"{id}\" not in roster")));
        }
    }
    if let Some(missing) = roster.ids().into_iter().find(|id| !seen.contains(id)) {
        return Err(IngestError::RosterMismatch(format!(
            "roster id \"{missing}\" missing from matrix"
        )));
    }
    // file position of each roster index
    let pos: Vec<usize> = {
        let mut pos = vec![0; roster.len()];
        for (p, id) in m.ids.iter().enumerate() {
            pos[roster.index_of(id).expect("checked")] = p;
        }
        pos
    };
    let n = roster.len();
    let values = Matrix::from_fn(n, n, |i, j| m.values[(pos[i], pos[j])]);
    Ok(RawPathLoss { values })
}

pub fn read_raw_pathloss<T: Scalar, R: Read>(
    r: R,
    roster: &NodeRoster,
) -> Result<RawPathLoss<T>, IngestError> {
    let m = read_matrix_csv(r)?;
    for (i, row) in m.values.to_rows().iter().enumerate() {
        if let Some(v) = row.iter().find(|v| **v < T::zero()) {
            return Err(IngestError::NonNumeric {
                line: i + 2,
                column: m.ids[i].clone(),
                cell: format!("{v} (negative path loss)"),
            });
        }
    }
    align_to_roster(m, roster)
}

pub fn load_raw_pathloss<T: Scalar>(
    path: impl AsRef<Path>,
    roster: &NodeRoster,
) -> Result<RawPathLoss<T>, IngestError> {
    read_raw_pathloss(open(path.as_ref())?, roster)
}

/// Canonical symmetric matrix: `max` of both directions off the diagonal,
/// zero on it. `+inf` (no path) dominates.
pub fn symmetrize<T: Scalar>(raw: &RawPathLoss<T>) -> PathLossMatrix<T> {
    let m = &raw.values;
    assert!(m.is_square(), "raw path-loss matrix must be square");
    let n = m.rows();
    let values = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            T::zero()
        } else {
            m[(i, j)].max(m[(j, i)])
        }
    });
    PathLossMatrix { values }
}

/// Writes a matrix in the matrix CSV format. Infinite entries are written as
/// `NA`; finite ones through `fmt`.
pub fn write_matrix_csv<T: Scalar, W: Write>(
    w: W,
    ids: &[&str],
    m: &Matrix<T>,
    fmt: impl Fn(T) -> String,
) -> io::Result<()> {
    assert_eq!(ids.len(), m.rows());
    let mut w = BufWriter::new(w);
    write!(w, "id")?;
    for id in ids {
        write!(w, ",{id}")?;
    }
    writeln!(w)?;
    for (i, id) in ids.iter().enumerate() {
        write!(w, "{id}")?;
        for &v in m.row(i) {
            if v.is_infinite() {
                write!(w, ",{NO_PATH_TOKEN}")?;
            } else {
                write!(w, ",{}", fmt(v))?;
            }
        }
        writeln!(w)?;
    }
    w.flush()
}
