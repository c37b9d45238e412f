#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use tan::oracle::{backtrack_eta, brute_force_eta, EtaAnswer, OracleError};
use tan::reduction::CnfFormula;
use tan::Dag;

/// Every connected DAG on `1..=n` whose arcs go from lower to higher id,
/// for each `n` in `1..=max_n`. Every DAG is isomorphic to one of these.
pub fn all_connected_dags(max_n: usize) -> Vec<Dag> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let arcs: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let d = Dag::from_arcs(n, &arcs).unwrap();
            if d.is_connected() {
                out.push(d);
            }
        }
    }
    out
}

/// Relabels `1..=n` by a random permutation and shuffles the arc order.
pub fn scramble<R: Rng>(rng: &mut R, n: usize, arcs: &[(usize, usize)]) -> Dag {
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    let mut arcs: Vec<(usize, usize)> = arcs.iter().map(|&(u, v)| (perm[u - 1], perm[v - 1])).collect();
    arcs.shuffle(rng);
    Dag::from_arcs(n, &arcs).unwrap()
}

pub fn random_connected_dag<R: Rng>(rng: &mut R, n: usize) -> Dag {
    loop {
        let p = rng.gen_range(0.2..0.8);
        let mut arcs = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                if rng.gen_bool(p) {
                    arcs.push((i, j));
                }
            }
        }
        let d = scramble(rng, n, &arcs);
        if d.is_connected() {
            return d;
        }
    }
}

/// Connected DAG with arcs only from `V_1` to `V_2`, `|V_1| + |V_2| <= max_n`.
pub fn random_monotone_bipartite<R: Rng>(rng: &mut R, max_n: usize) -> Dag {
    loop {
        let n = rng.gen_range(2..=max_n);
        let n1 = rng.gen_range(1..n);
        let p = rng.gen_range(0.3..1.0);
        let mut arcs = Vec::new();
        for u in 1..=n1 {
            for v in n1 + 1..=n {
                if rng.gen_bool(p) {
                    arcs.push((u, v));
                }
            }
        }
        let d = scramble(rng, n, &arcs);
        if d.is_connected() {
            return d;
        }
    }
}

/// Parts of the given sizes in order, every cross pair oriented forward.
pub fn complete_multipartite(sizes: &[usize]) -> Dag {
    let mut starts = vec![1];
    for s in sizes {
        starts.push(starts.last().unwrap() + s);
    }
    let mut arcs = Vec::new();
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            for u in starts[i]..starts[i + 1] {
                for v in starts[j]..starts[j + 1] {
                    arcs.push((u, v));
                }
            }
        }
    }
    Dag::from_arcs(starts[sizes.len()] - 1, &arcs).unwrap()
}

pub fn transitive_tournament(n: usize) -> Dag {
    complete_multipartite(&vec![1; n])
}

/// Every part-size tuple with `1..=max_parts` parts of sizes `1..=max_size`.
pub fn size_tuples(max_parts: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..max_parts {
        out = out
            .iter()
            .flat_map(|t| {
                (1..=max_size).map(move |s| {
                    let mut t = t.clone();
                    t.push(s);
                    t
                })
            })
            .collect();
        all.extend(out.iter().cloned());
    }
    all
}

/// Every clause of three distinct literals over variables `1..=3`.
pub fn distinct_literal_clauses() -> Vec<Vec<i32>> {
    let lits = [1, -1, 2, -2, 3, -3];
    let mut out = Vec::new();
    for a in 0..6 {
        for b in a + 1..6 {
            for c in b + 1..6 {
                out.push(vec![lits[a], lits[b], lits[c]]);
            }
        }
    }
    out
}

/// Every formula over 3 variables made of 1 to 3 distinct such clauses.
pub fn small_formulas() -> Vec<CnfFormula> {
    let clauses = distinct_literal_clauses();
    let m = clauses.len();
    let mut out = Vec::new();
    for a in 0..m {
        out.push(CnfFormula::new(3, vec![clauses[a].clone()]));
        for b in a + 1..m {
            out.push(CnfFormula::new(3, vec![clauses[a].clone(), clauses[b].clone()]));
            for c in b + 1..m {
                out.push(CnfFormula::new(
                    3,
                    vec![clauses[a].clone(), clauses[b].clone(), clauses[c].clone()],
                ));
            }
        }
    }
    out
}

/// The 8 clauses over `x, y, z` using every sign pattern once.
pub fn all_sign_formula() -> CnfFormula {
    let clauses = (0..8)
        .map(|m| {
            (1..=3)
                .map(|v| if m >> (v - 1) & 1 == 1 { -v } else { v })
                .collect()
        })
        .collect();
    CnfFormula::new(3, clauses)
}

/// Largest `k` whose cumulative labeling count `1^n + ... + k^n` stays
/// within `total`, at least 1.
pub fn kmax_within(n: usize, total: u128) -> u64 {
    let mut acc = 0u128;
    let mut k = 0u64;
    loop {
        let next = acc + (k as u128 + 1).pow(n as u32);
        if next > total {
            return k.max(1);
        }
        acc = next;
        k += 1;
    }
}

fn least(a: EtaAnswer) -> Option<u64> {
    match a {
        EtaAnswer::Solved(k, _) => Some(k),
        EtaAnswer::NotFoundUpTo(_) => None,
    }
}

/// Brute-force η_t, or `None` when nothing exists up to `k_max`.
pub fn brute_eta(d: &Dag, k_max: u64) -> Option<u64> {
    least(brute_force_eta(d, k_max).expect("within enumeration guard").answer)
}

pub fn backtrack_least(d: &Dag, k_max: u64) -> Option<u64> {
    least(backtrack_eta(d, k_max).expect("within node guard").answer)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    Enumeration,
    Backtracking,
}

/// Least `k <= k_max` admitting a numbering. Uses plain enumeration when the
/// guard allows and the backtracking oracle otherwise; when enumeration runs,
/// the backtracking oracle must agree with it.
pub fn oracle_eta(d: &Dag, k_max: u64) -> (Option<u64>, Oracle) {
    match brute_force_eta(d, k_max) {
        Ok(r) => {
            let a = least(r.answer);
            assert_eq!(a, backtrack_least(d, k_max), "oracles disagree on {:?}", d.original_arcs());
            (a, Oracle::Enumeration)
        }
        Err(OracleError::EnumerationGuard { .. }) => (backtrack_least(d, k_max), Oracle::Backtracking),
        Err(e) => panic!("{e}"),
    }
}
