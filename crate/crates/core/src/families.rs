//! Closed forms for complete monotone multipartite and monotone bipartite
//! digraphs.

use thiserror::Error;

use crate::digraph::{Dag, DagError, Labeling, Partition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("partition is inconsistent with the digraph: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// Part sizes and the target part sums `s_1..s_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartSums {
    pub sizes: Vec<u64>,
    pub s: Vec<u64>,
}

impl PartSums {
    /// `s_r = |V_r|`, `s_i = max(1 + s_{i+1}, |V_i|)`.
    pub fn new(sizes: &[u64]) -> Self {
        let mut s = vec![0; sizes.len()];
        for i in (0..sizes.len()).rev() {
            s[i] = match s.get(i + 1) {
                Some(&next) => (next + 1).max(sizes[i]),
                None => sizes[i],
            };
        }
        PartSums {
            sizes: sizes.to_vec(),
            s,
        }
    }

    /// `max_i ceil(s_i / |V_i|)`.
    pub fn value(&self) -> u64 {
        self.s
            .iter()
            .zip(&self.sizes)
            .map(|(s, size)| s.div_ceil(*size))
            .max()
            .unwrap_or(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub value: u64,
    pub witness: Labeling,
}

fn check_complete_monotone(parts: &Partition, d: &Dag) -> Result<(), FamilyError> {
    let n = d.n();
    if parts.parts().iter().map(Vec::len).sum::<usize>() != n {
        return Err(FamilyError::Inconsistent("parts do not cover V".into()));
    }
    let which = parts.part_of(n);
    for u in 0..n {
        for v in u + 1..n {
            let same = which[u] == which[v];
            if same == d.adjacent(u, v) {
                return Err(FamilyError::Inconsistent(format!(
                    "vertices {} and {} break complete multipartiteness",
                    d.original_id(u),
                    d.original_id(v)
                )));
            }
        }
    }
    check_monotone(&which, d)
}

fn check_monotone(which: &[usize], d: &Dag) -> Result<(), FamilyError> {
    match d.arcs().iter().find(|&&(u, v)| which[u] >= which[v]) {
        Some(&(u, v)) => Err(FamilyError::Inconsistent(format!(
            "arc ({}, {}) does not go to a later part",
            d.original_id(u),
            d.original_id(v)
        ))),
        None => Ok(()),
    }
}

/// η_t of a complete monotone r-partite digraph, with a witness giving part
/// `V_i` the labels `floor(s_i/|V_i|)` and `ceil(s_i/|V_i|)` summing to `s_i`;
/// the larger label goes to the lowest vertex indices.
pub fn eta_complete_monotone_rpartite(
    parts: &Partition,
    d: &Dag,
) -> Result<ClosedForm, FamilyError> {
    check_complete_monotone(parts, d)?;
    let sizes: Vec<u64> = parts.parts().iter().map(|p| p.len() as u64).collect();
    let sums = PartSums::new(&sizes);
    let mut f = vec![0u64; d.n()];
    for ((part, &s), &size) in parts.parts().iter().zip(&sums.s).zip(&sizes) {
        let (floor, extra) = (s / size, (s % size) as usize);
        for (rank, &v) in part.iter().enumerate() {
            f[v] = if rank < extra { floor + 1 } else { floor };
        }
    }
    Ok(ClosedForm {
        value: sums.value(),
        witness: Labeling::new(f)?,
    })
}

/// η_t of a connected monotone bipartite digraph:
/// `max { floor(d(u)/d(v)) + 1 : v ∈ V_2, u ∈ N(v) }`, witnessed by labels
/// `p` on `V_1` and 1 on `V_2`.
pub fn eta_monotone_bipartite(parts: &Partition, d: &Dag) -> Result<ClosedForm, FamilyError> {
    d.require_connected()?;
    if parts.len() != 2 {
        return Err(FamilyError::Inconsistent(format!(
            "expected 2 parts, got {}",
            parts.len()
        )));
    }
    let which = parts.part_of(d.n());
    check_monotone(&which, d)?;
    let value = parts.parts()[1]
        .iter()
        .flat_map(|&v| {
            d.neighbors(v)
                .iter()
                .map(move |&u| (d.degree(u) / d.degree(v)) as u64 + 1)
        })
        .max()
        .ok_or_else(|| FamilyError::Inconsistent("V_2 has no neighbors".into()))?;
    let f = which
        .iter()
        .map(|&p| if p == 0 { value } else { 1 })
        .collect();
    Ok(ClosedForm {
        value,
        witness: Labeling::new(f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{
        detect_complete_monotone_multipartite, detect_monotone_bipartite, is_topological_additive,
    };

    fn dag(n: usize, arcs: &[(usize, usize)]) -> Dag {
        Dag::from_arcs(n, arcs).unwrap()
    }

    #[test]
    fn part_sums() {
        let p = PartSums::new(&[1, 3]);
        assert_eq!(p.s, vec![4, 3]);
        assert_eq!(p.value(), 4);
        let p = PartSums::new(&[2, 3]);
        assert_eq!(p.s, vec![4, 3]);
        assert_eq!(p.value(), 2);
        let p = PartSums::new(&[1, 1, 1]);
        assert_eq!(p.s, vec![3, 2, 1]);
        assert_eq!(p.value(), 3);
        let p = PartSums::new(&[3, 1, 2]);
        assert_eq!(p.s, vec![4, 3, 2]);
        assert_eq!(p.value(), 3);
    }

    #[test]
    fn rpartite_examples() {
        let d = dag(4, &[(1, 2), (1, 3), (1, 4)]);
        let parts = detect_complete_monotone_multipartite(&d).unwrap().unwrap();
        let c = eta_complete_monotone_rpartite(&parts, &d).unwrap();
        assert_eq!(c.value, 4);
        assert_eq!(c.witness.values(), &[4, 1, 1, 1]);

        let d = dag(5, &[(1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]);
        let parts = detect_complete_monotone_multipartite(&d).unwrap().unwrap();
        let c = eta_complete_monotone_rpartite(&parts, &d).unwrap();
        assert_eq!(c.value, 2);
        assert_eq!(c.witness.values(), &[2, 2, 1, 1, 1]);
        assert!(is_topological_additive(&d, &c.witness).unwrap());

        let d = dag(3, &[(1, 2), (1, 3), (2, 3)]);
        let parts = detect_complete_monotone_multipartite(&d).unwrap().unwrap();
        let c = eta_complete_monotone_rpartite(&parts, &d).unwrap();
        assert_eq!((c.value, c.witness.values()), (3, &[3u64, 2, 1][..]));
    }

    #[test]
    fn uneven_split_gives_larger_labels_to_low_ids() {
        // sizes (2, 2): s = (3, 2) -> part 1 gets 2, 1
        let d = dag(4, &[(1, 3), (1, 4), (2, 3), (2, 4)]);
        let parts = detect_complete_monotone_multipartite(&d).unwrap().unwrap();
        let c = eta_complete_monotone_rpartite(&parts, &d).unwrap();
        assert_eq!(c.witness.values(), &[2, 1, 1, 1]);
        assert_eq!(c.value, 2);
    }

    #[test]
    fn rpartite_rejects_inconsistent_parts() {
        let d = dag(3, &[(1, 2), (1, 3), (2, 3)]);
        let wrong = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert!(matches!(
            eta_complete_monotone_rpartite(&wrong, &d),
            Err(FamilyError::Inconsistent(_))
        ));
        let reversed = Partition::new(3, vec![vec![2], vec![1], vec![0]]).unwrap();
        assert!(eta_complete_monotone_rpartite(&reversed, &d).is_err());
    }

    #[test]
    fn bipartite_examples() {
        let d = dag(4, &[(1, 2), (1, 3), (1, 4)]);
        let parts = detect_monotone_bipartite(&d).unwrap().unwrap();
        let c = eta_monotone_bipartite(&parts, &d).unwrap();
        assert_eq!(c.value, 4);
        assert_eq!(c.witness.values(), &[4, 1, 1, 1]);

        let star = dag(4, &[(1, 4), (2, 4), (3, 4)]);
        let parts = detect_monotone_bipartite(&star).unwrap().unwrap();
        let c = eta_monotone_bipartite(&parts, &star).unwrap();
        assert_eq!(c.value, 1);
        assert!(is_topological_additive(&star, &c.witness).unwrap());

        let arc = dag(2, &[(1, 2)]);
        let parts = detect_monotone_bipartite(&arc).unwrap().unwrap();
        let c = eta_monotone_bipartite(&parts, &arc).unwrap();
        assert_eq!((c.value, c.witness.values()), (2, &[2u64, 1][..]));
    }

    #[test]
    fn bipartite_rejects_bad_input() {
        let d = dag(3, &[(1, 2), (2, 3)]);
        let parts = Partition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
        assert!(eta_monotone_bipartite(&parts, &d).is_err());
        let disconnected = dag(4, &[(1, 2), (3, 4)]);
        let parts = Partition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(
            eta_monotone_bipartite(&parts, &disconnected),
            Err(FamilyError::Dag(DagError::Disconnected))
        );
    }
}
