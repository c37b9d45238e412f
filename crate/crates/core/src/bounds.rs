//! Lower bounds on the topological additive number.

use thiserror::Error;

use crate::digraph::{is_topological_additive, Dag, DagError, Labeling};
use crate::lp::{ceil_to_u64, Rational};

/// Default cap on the number of enumerated cliques.
pub const DEFAULT_CLIQUE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("membership must be established with a valid numbering first")]
    MembershipNotEstablished,
    #[error("relaxation optimum {0} is not a usable bound")]
    BadRelaxationValue(String),
    #[error(transparent)]
    Dag(#[from] DagError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueEnumeration {
    /// Sorted vertex sets, ordered by size then lexicographically.
    pub cliques: Vec<Vec<usize>>,
    pub truncated: bool,
}

/// Every clique of G(D) with at least two vertices, not only maximal ones.
///
/// Each node of the Bron–Kerbosch expansion tree (candidates restricted to
/// larger indices, no pivot and no exclusion set) is one clique, so every
/// clique is produced exactly once.
pub fn enumerate_cliques(d: &Dag, max_count: usize) -> CliqueEnumeration {
    let mut out = Vec::new();
    let mut truncated = false;
    let mut current = Vec::new();
    for v in 0..d.n() {
        let candidates: Vec<usize> = d.neighbors(v).iter().copied().filter(|&w| w > v).collect();
        current.push(v);
        expand(d, &mut current, &candidates, &mut out, max_count, &mut truncated);
        current.pop();
        if truncated {
            break;
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    CliqueEnumeration {
        cliques: out,
        truncated,
    }
}

fn expand(
    d: &Dag,
    current: &mut Vec<usize>,
    candidates: &[usize],
    out: &mut Vec<Vec<usize>>,
    cap: usize,
    truncated: &mut bool,
) {
    for (i, &w) in candidates.iter().enumerate() {
        if out.len() >= cap {
            *truncated = true;
            return;
        }
        current.push(w);
        out.push(current.clone());
        let next: Vec<usize> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|&x| d.adjacent(w, x))
            .collect();
        expand(d, current, &next, out, cap, truncated);
        current.pop();
        if *truncated {
            return;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueBound {
    pub clique: Vec<usize>,
    pub q_first: usize,
    pub q_last: usize,
    pub value: u64,
    /// The clique scan hit its cap; the bound is still valid but may not be
    /// the best available.
    pub truncated: bool,
}

/// Source and sink of the transitive tournament the arcs induce on `q`.
fn clique_ends(d: &Dag, q: &[usize]) -> (usize, usize) {
    let indeg = |v: usize| q.iter().filter(|&&w| d.has_arc(w, v)).count();
    let first = *q.iter().find(|&&v| indeg(v) == 0).expect("tournament has a source");
    let last = *q
        .iter()
        .find(|&&v| indeg(v) == q.len() - 1)
        .expect("tournament has a sink");
    (first, last)
}

/// `ceil((d(q_first) + 1) / (d(q_last) - |Q| + 2))` for one clique.
pub fn clique_value(d: &Dag, q: &[usize]) -> (usize, usize, u64) {
    let (first, last) = clique_ends(d, q);
    let num = d.degree(first) as u64 + 1;
    // d(q_last) >= |Q| - 1, so the denominator is at least 1
    let den = (d.degree(last) + 2 - q.len()) as u64;
    (first, last, num.div_ceil(den))
}

fn require_membership(d: &Dag, witness: &Labeling) -> Result<(), BoundsError> {
    if is_topological_additive(d, witness)? {
        Ok(())
    } else {
        Err(BoundsError::MembershipNotEstablished)
    }
}

/// Best clique bound over all cliques of size >= 2. `witness` is any valid
/// numbering of `d`, proving membership.
pub fn clique_lower_bound(d: &Dag, witness: &Labeling) -> Result<CliqueBound, BoundsError> {
    clique_lower_bound_capped(d, witness, DEFAULT_CLIQUE_CAP)
}

pub fn clique_lower_bound_capped(
    d: &Dag,
    witness: &Labeling,
    cap: usize,
) -> Result<CliqueBound, BoundsError> {
    require_membership(d, witness)?;
    let found = enumerate_cliques(d, cap);
    let mut best = CliqueBound {
        clique: vec![0],
        q_first: 0,
        q_last: 0,
        value: 1,
        truncated: found.truncated,
    };
    for q in found.cliques {
        let (first, last, value) = clique_value(d, &q);
        if value > best.value {
            best = CliqueBound {
                clique: q,
                q_first: first,
                q_last: last,
                value,
                truncated: found.truncated,
            };
        }
    }
    Ok(best)
}

/// `ceil(ω / (n - ω + 1))`, the additive-coloring bound on G(D).
pub fn omega_bound(d: &Dag) -> u64 {
    let omega = enumerate_cliques(d, DEFAULT_CLIQUE_CAP)
        .cliques
        .last()
        .map_or(1, Vec::len) as u64;
    omega.div_ceil(d.n() as u64 - omega + 1)
}

/// True iff `d(u) < d(v)` on every arc, i.e. the all-ones labeling works.
pub fn eta_one_test(d: &Dag) -> bool {
    d.arcs().iter().all(|&(u, v)| d.degree(u) < d.degree(v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBounds {
    pub clique: CliqueBound,
    pub omega: u64,
    pub relaxation: u64,
    pub best: u64,
}

/// Combines the clique bound, the ω bound and `ceil(lr_opt)`.
pub fn best_lower_bound(
    d: &Dag,
    witness: &Labeling,
    lr_opt: &Rational,
) -> Result<LowerBounds, BoundsError> {
    let clique = clique_lower_bound(d, witness)?;
    let omega = omega_bound(d);
    let relaxation =
        ceil_to_u64(lr_opt).ok_or_else(|| BoundsError::BadRelaxationValue(lr_opt.to_string()))?;
    let best = clique.value.max(omega).max(relaxation);
    Ok(LowerBounds {
        clique,
        omega,
        relaxation,
        best,
    })
}
