//! Coefficient matrix of the numbering integer program and its total
//! unimodularity, decided structurally: the matrix is TU exactly when the
//! underlying graph is complete.

use std::fmt;

use crate::digraph::{Dag, DagError};

/// Provenance of a matrix row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowTag {
    /// `S(v) - S(u) >= 1` for arc `(u, v)` (internal indices).
    Arc(usize, usize),
    /// `k - f(v) >= 0`.
    Vertex(usize),
}

/// Rows: arcs in input order, then one row per vertex. Columns: `f(0..n)`
/// then `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpfMatrix {
    pub entries: Vec<Vec<i8>>,
    pub row_tags: Vec<RowTag>,
    pub n: usize,
}

impl IpfMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.n + 1
    }

    /// Column index of `k`.
    pub fn k_col(&self) -> usize {
        self.n
    }
}

impl fmt::Display for IpfMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>2}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn build_ipf_matrix(d: &Dag) -> IpfMatrix {
    let n = d.n();
    let mut entries = Vec::with_capacity(d.num_arcs() + n);
    let mut row_tags = Vec::with_capacity(d.num_arcs() + n);
    for &(u, v) in d.arcs() {
        let mut row = vec![0i8; n + 1];
        for &x in d.neighbors(v) {
            row[x] += 1;
        }
        for &x in d.neighbors(u) {
            row[x] -= 1;
        }
        entries.push(row);
        row_tags.push(RowTag::Arc(u, v));
    }
    for v in 0..n {
        let mut row = vec![0i8; n + 1];
        row[n] = 1;
        row[v] = -1;
        entries.push(row);
        row_tags.push(RowTag::Vertex(v));
    }
    IpfMatrix {
        entries,
        row_tags,
        n,
    }
}

/// TU status of the coefficient matrix of a connected DAG.
pub fn is_tu_structural(d: &Dag) -> Result<bool, DagError> {
    d.require_connected()?;
    Ok(d.is_complete())
}
