//! Brute-force reference implementations. Nothing here calls into the
//! production solver, LP or witness checker: neighborhoods and sums are
//! rebuilt from the raw arc list.

use thiserror::Error;

use crate::digraph::{Dag, Labeling};
use crate::formulation::{IpfMatrix, RowTag};
use crate::reduction::CnfFormula;

/// Largest `k^n` the enumerator will attempt at one level.
pub const ENUMERATION_GUARD: u128 = 1_000_000_000;

/// Largest number of search nodes [`backtrack_eta`] will visit.
pub const NODE_GUARD: u64 = 2_000_000_000;

/// Largest number of square submatrices the TU oracle will visit.
pub const SUBMATRIX_GUARD: u128 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration of {k}^{n} labelings exceeds the guard")]
    EnumerationGuard { k: u64, n: usize },
    #[error("{0} square submatrices exceed the guard")]
    SubmatrixGuard(u128),
    #[error("backtracking exceeded {0} nodes")]
    NodeGuard(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport<A> {
    pub answer: A,
    pub enumerated_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaAnswer {
    NotFoundUpTo(u64),
    Solved(u64, Labeling),
}

/// Tries every labeling in `{1..k}^n` for `k = 1..=k_max`.
pub fn brute_force_eta(d: &Dag, k_max: u64) -> Result<OracleReport<EtaAnswer>, OracleError> {
    let n = d.n();
    let mut nbrs = vec![Vec::new(); n];
    for &(u, v) in d.arcs() {
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    let arcs = d.arcs();
    let mut count = 0u64;
    for k in 1..=k_max {
        if (k as u128).checked_pow(n as u32).is_none_or(|c| c > ENUMERATION_GUARD) {
            return Err(OracleError::EnumerationGuard { k, n });
        }
        let mut f = vec![1u64; n];
        let mut sums: Vec<u64> = nbrs.iter().map(|l| l.len() as u64).collect();
        loop {
            count += 1;
            if arcs.iter().all(|&(u, v)| sums[u] < sums[v]) {
                let witness = Labeling::new(f).expect("labels start at 1");
                return Ok(OracleReport {
                    answer: EtaAnswer::Solved(k, witness),
                    enumerated_count: count,
                });
            }
            // odometer step, vertex 0 fastest
            let mut i = 0;
            while i < n && f[i] == k {
                let drop = k - 1;
                f[i] = 1;
                for &w in &nbrs[i] {
                    sums[w] -= drop;
                }
                i += 1;
            }
            if i == n {
                break;
            }
            f[i] += 1;
            for &w in &nbrs[i] {
                sums[w] += 1;
            }
        }
    }
    Ok(OracleReport {
        answer: EtaAnswer::NotFoundUpTo(k_max),
        enumerated_count: count,
    })
}

/// Same answer as [`brute_force_eta`] for label ranges too large to
/// enumerate outright. Vertices are labeled in index order and a branch is
/// cut only when some arc fails even with every unlabeled vertex at its most
/// favorable value, so each `{1..k}^n` is still covered exhaustively.
/// `enumerated_count` counts search nodes.
pub fn backtrack_eta(d: &Dag, k_max: u64) -> Result<OracleReport<EtaAnswer>, OracleError> {
    let n = d.n();
    let mut nbrs = vec![Vec::new(); n];
    for &(u, v) in d.arcs() {
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    // S(v) - S(u) as (vertex, ±1) terms; shared neighbors cancel
    let mut terms: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut watch = vec![Vec::new(); n];
    for &(u, v) in d.arcs() {
        let mut coef = vec![0i64; n];
        for &w in &nbrs[v] {
            coef[w] += 1;
        }
        for &w in &nbrs[u] {
            coef[w] -= 1;
        }
        let t: Vec<(usize, i64)> = (0..n).filter(|&w| coef[w] != 0).map(|w| (w, coef[w])).collect();
        for &(w, _) in &t {
            watch[w].push(terms.len());
        }
        terms.push(t);
    }
    let mut count = 0u64;
    for k in 1..=k_max {
        let mut f = vec![0u64; n];
        let found = backtrack(0, k, &terms, &watch, &mut f, &mut count)?;
        if found {
            return Ok(OracleReport {
                answer: EtaAnswer::Solved(k, Labeling::new(f).expect("all labeled")),
                enumerated_count: count,
            });
        }
    }
    Ok(OracleReport {
        answer: EtaAnswer::NotFoundUpTo(k_max),
        enumerated_count: count,
    })
}

fn backtrack(
    i: usize,
    k: u64,
    terms: &[Vec<(usize, i64)>],
    watch: &[Vec<usize>],
    f: &mut [u64],
    count: &mut u64,
) -> Result<bool, OracleError> {
    if i == f.len() {
        return Ok(true);
    }
    for label in 1..=k {
        *count += 1;
        if *count > NODE_GUARD {
            return Err(OracleError::NodeGuard(NODE_GUARD));
        }
        f[i] = label;
        let alive = watch[i].iter().all(|&a| {
            let best: i64 = terms[a]
                .iter()
                .map(|&(w, c)| match (f[w], c > 0) {
                    (0, true) => k as i64,
                    (0, false) => -1,
                    (x, _) => c * x as i64,
                })
                .sum();
            best >= 1
        });
        if alive && backtrack(i + 1, k, terms, watch, f, count)? {
            return Ok(true);
        }
    }
    f[i] = 0;
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub det: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TuAnswer {
    Tu,
    Violation(Violation),
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Visits square submatrices by increasing size and returns the first with
/// determinant outside `{-1, 0, 1}`.
pub fn tu_subdeterminant(m: &IpfMatrix) -> Result<OracleReport<TuAnswer>, OracleError> {
    let (r, c) = (m.rows(), m.cols());
    // sum_s C(r,s) C(c,s) = C(r+c, c)
    let total = binomial((r + c) as u128, c as u128) - 1;
    if total > SUBMATRIX_GUARD {
        return Err(OracleError::SubmatrixGuard(total));
    }
    let mut count = 0u64;
    for size in 1..=r.min(c) {
        for rows in combinations(r, size) {
            for cols in combinations(c, size) {
                count += 1;
                let sub: Vec<Vec<i64>> = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| m.entries[i][j] as i64).collect())
                    .collect();
                let det = bareiss_det(sub);
                if det.abs() >= 2 {
                    return Ok(OracleReport {
                        answer: TuAnswer::Violation(Violation { rows, cols, det }),
                        enumerated_count: count,
                    });
                }
            }
        }
    }
    Ok(OracleReport {
        answer: TuAnswer::Tu,
        enumerated_count: count,
    })
}

/// Searches for a 3×3 submatrix built from one arc row and the two vertex
/// rows of `a` and `b`, on columns `f(a)`, `f(b)`, `k`, with `|det| = 2`.
pub fn find_mprime(m: &IpfMatrix) -> Option<Violation> {
    let vertex_row = |v: usize| {
        m.row_tags
            .iter()
            .position(|t| *t == RowTag::Vertex(v))
            .expect("every vertex has a row")
    };
    for (i, tag) in m.row_tags.iter().enumerate() {
        if !matches!(tag, RowTag::Arc(..)) {
            continue;
        }
        for a in 0..m.n {
            for b in a + 1..m.n {
                let rows = vec![i, vertex_row(a), vertex_row(b)];
                let cols = vec![a, b, m.k_col()];
                let sub: Vec<Vec<i64>> = rows
                    .iter()
                    .map(|&r| cols.iter().map(|&c| m.entries[r][c] as i64).collect())
                    .collect();
                let det = bareiss_det(sub);
                if det.abs() == 2 {
                    return Some(Violation { rows, cols, det });
                }
            }
        }
    }
    None
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_det(mut a: Vec<Vec<i64>>) -> i64 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i64;
    let mut prev = 1i64;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let c = current.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatAnswer {
    /// `assignment[i]` is the value of variable `i + 1`.
    Sat(Vec<bool>),
    Unsat,
}

/// Complete DPLL with unit propagation.
pub fn dpll_sat(phi: &CnfFormula) -> SatAnswer {
    let mut values: Vec<Option<bool>> = vec![None; phi.num_vars];
    if dpll(&phi.clauses, &mut values) {
        SatAnswer::Sat(values.into_iter().map(|v| v.unwrap_or(false)).collect())
    } else {
        SatAnswer::Unsat
    }
}

fn lit_value(lit: i32, values: &[Option<bool>]) -> Option<bool> {
    values[lit.unsigned_abs() as usize - 1].map(|b| b == (lit > 0))
}

fn dpll(clauses: &[Vec<i32>], values: &mut Vec<Option<bool>>) -> bool {
    let saved = values.clone();
    // unit propagation to fixpoint
    loop {
        let mut unit = None;
        for clause in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut satisfied = false;
            for &lit in clause {
                match lit_value(lit, values) {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            if open == 0 {
                *values = saved;
                return false;
            }
            if open == 1 {
                unit = unassigned;
                break;
            }
        }
        match unit {
            Some(lit) => values[lit.unsigned_abs() as usize - 1] = Some(lit > 0),
            None => break,
        }
    }
    let Some(var) = values.iter().position(Option::is_none) else {
        return true;
    };
    for choice in [true, false] {
        values[var] = Some(choice);
        if dpll(clauses, values) {
            return true;
        }
        values[var] = None;
    }
    *values = saved;
    false
}
