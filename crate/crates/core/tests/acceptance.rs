//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one `[PASS]` or `[FAIL]` line; the process fails if any
//! criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;

use common::*;
use tan::bounds::{best_lower_bound, clique_lower_bound};
use tan::digraph::{
    detect_complete_monotone_multipartite, detect_monotone_bipartite, is_topological_additive,
    Partition,
};
use tan::families::{eta_complete_monotone_rpartite, eta_monotone_bipartite, PartSums};
use tan::formulation::{build_ipf_matrix, is_tu_structural, RowTag};
use tan::lp::{membership, Membership};
use tan::oracle::{dpll_sat, find_mprime, tu_subdeterminant, SatAnswer, TuAnswer};
use tan::reduction::build_dphi;
use tan::solver::{compute_eta_t, decide_k, Budget, Decision, SolveResult};
use tan::Dag;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Total labelings the brute force may try on one instance known to be
/// outside D.
const NOT_IN_D_ENUMERATION: u128 = 5_000_000;

fn instance_set_one() -> Vec<Dag> {
    let mut set = all_connected_dags(5);
    let mut rng = StdRng::seed_from_u64(0x7a0_0001);
    for i in 0..200 {
        let n = 2 + i % 7;
        set.push(random_connected_dag(&mut rng, n));
    }
    set
}

fn describe(d: &Dag) -> String {
    format!("n={} arcs={:?}", d.n(), d.original_arcs())
}

fn criterion_1(set: &[Dag]) -> Outcome {
    let (mut in_d, mut out_d, mut beyond_guard) = (0, 0, 0);
    for d in set {
        let solved = compute_eta_t(d, Budget::default()).map_err(|e| format!("{}: {e}", describe(d)))?;
        match solved {
            SolveResult::Solved { eta_t, witness, .. } => {
                ensure!(
                    is_topological_additive(d, &witness).unwrap() && witness.k() == eta_t,
                    "bad witness for {}",
                    describe(d)
                );
                let (reference, oracle) = oracle_eta(d, eta_t);
                ensure!(
                    reference == Some(eta_t),
                    "{}: solver {eta_t}, {oracle:?} oracle {reference:?}",
                    describe(d)
                );
                if oracle == Oracle::Backtracking {
                    beyond_guard += 1;
                }
                in_d += 1;
            }
            SolveResult::NotInD => {
                let k = kmax_within(d.n(), NOT_IN_D_ENUMERATION);
                let brute = brute_eta(d, k);
                ensure!(brute.is_none(), "{}: solver says not in D, brute force {brute:?}", describe(d));
                out_d += 1;
            }
        }
    }
    Ok(format!(
        "{} instances agree ({in_d} in D, {out_d} not in D; {beyond_guard} past the enumeration guard checked by backtracking)",
        set.len()
    ))
}

fn criterion_2(set: &[Dag]) -> Outcome {
    let (mut in_d, mut out_d) = (0, 0);
    for d in set {
        match membership(d).map_err(|e| format!("{}: {e}", describe(d)))? {
            Membership::InD { witness, .. } => {
                ensure!(
                    is_topological_additive(d, &witness).unwrap(),
                    "{}: witness {witness} fails",
                    describe(d)
                );
                let k_ub = witness.k();
                let (found, oracle) = oracle_eta(d, k_ub);
                ensure!(
                    found.is_some_and(|k| k <= k_ub),
                    "{}: {oracle:?} oracle finds no numbering with labels <= {k_ub}",
                    describe(d)
                );
                in_d += 1;
            }
            Membership::NotInD => {
                let k = kmax_within(d.n(), NOT_IN_D_ENUMERATION);
                ensure!(
                    brute_eta(d, k).is_none(),
                    "{}: not in D but brute force finds a numbering",
                    describe(d)
                );
                out_d += 1;
            }
        }
    }
    Ok(format!("{in_d} in D with verified witnesses, {out_d} not in D"))
}

fn criterion_3(set: &[Dag]) -> Outcome {
    let mut checked = 0;
    for d in set {
        if let SolveResult::Solved { eta_t, bounds, .. } =
            compute_eta_t(d, Budget::default()).map_err(|e| e.to_string())?
        {
            let Membership::InD {
                witness, lr_value, ..
            } = membership(d).map_err(|e| e.to_string())?
            else {
                return Err(format!("{}: solved but not in D", describe(d)));
            };
            let b = best_lower_bound(d, &witness, &lr_value).map_err(|e| e.to_string())?;
            ensure!(
                b.best <= eta_t && bounds.best <= eta_t,
                "{}: lower bound {} > eta_t {eta_t}",
                describe(d),
                b.best
            );
            checked += 1;
        }
    }
    for n in 2..=6 {
        let d = transitive_tournament(n);
        let eta = brute_eta(&d, n as u64);
        let witness = Membership::witness(&membership(&d).unwrap()).cloned().unwrap();
        let bound = clique_lower_bound(&d, &witness).map_err(|e| e.to_string())?.value;
        ensure!(
            bound == n as u64 && eta == Some(n as u64),
            "K_{n}: clique bound {bound}, eta_t {eta:?}"
        );
    }
    let mut bipartite = 0;
    for a in 1..=4 {
        for b in 1..=4 {
            let d = complete_multipartite(&[a, b]);
            let parts = detect_complete_monotone_multipartite(&d).unwrap().unwrap();
            let closed = eta_complete_monotone_rpartite(&parts, &d).map_err(|e| e.to_string())?;
            let witness = Membership::witness(&membership(&d).unwrap()).cloned().unwrap();
            let bound = clique_lower_bound(&d, &witness).map_err(|e| e.to_string())?.value;
            ensure!(
                bound == closed.value,
                "K({a},{b}): clique bound {bound}, closed form {}",
                closed.value
            );
            bipartite += 1;
        }
    }
    Ok(format!(
        "bound <= eta_t on {checked} members, tight on K_2..K_6 and {bipartite} complete bipartite"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x7a0_0004);
    for _ in 0..100 {
        let d = random_monotone_bipartite(&mut rng, 8);
        let parts = detect_monotone_bipartite(&d)
            .unwrap()
            .ok_or_else(|| format!("{}: bipartition not detected", describe(&d)))?;
        let closed = eta_monotone_bipartite(&parts, &d).map_err(|e| e.to_string())?;
        ensure!(
            is_topological_additive(&d, &closed.witness).unwrap() && closed.witness.k() == closed.value,
            "{}: closed-form witness invalid",
            describe(&d)
        );
        let brute = brute_eta(&d, closed.value);
        ensure!(
            brute == Some(closed.value),
            "{}: closed form {}, brute force {brute:?}",
            describe(&d),
            closed.value
        );
    }
    let tuples = size_tuples(4, 3);
    for sizes in &tuples {
        let d = complete_multipartite(sizes);
        let mut parts = Vec::new();
        let mut next = 0;
        for &s in sizes {
            parts.push((next..next + s).collect());
            next += s;
        }
        let parts = Partition::new(d.n(), parts).unwrap();
        let closed = eta_complete_monotone_rpartite(&parts, &d).map_err(|e| e.to_string())?;
        let expected = PartSums::new(&sizes.iter().map(|&s| s as u64).collect::<Vec<_>>()).value();
        ensure!(closed.value == expected, "{sizes:?}: closed form {}", closed.value);
        ensure!(
            is_topological_additive(&d, &closed.witness).unwrap() && closed.witness.k() == closed.value,
            "{sizes:?}: closed-form witness invalid"
        );
        let brute = brute_eta(&d, closed.value);
        ensure!(
            brute == Some(closed.value),
            "{sizes:?}: closed form {}, brute force {brute:?}",
            closed.value
        );
        if sizes.len() > 1 {
            ensure!(
                detect_complete_monotone_multipartite(&d).unwrap().as_ref() == Some(&parts),
                "{sizes:?}: parts not detected"
            );
        }
    }
    Ok(format!("100 monotone bipartite and {} complete multipartite match", tuples.len()))
}

fn criterion_5() -> Outcome {
    let (mut tu, mut not_tu) = (0, 0);
    for d in all_connected_dags(5) {
        let structural = is_tu_structural(&d).unwrap();
        let m = build_ipf_matrix(&d);
        let oracle = tu_subdeterminant(&m).map_err(|e| e.to_string())?;
        let oracle_tu = matches!(oracle.answer, TuAnswer::Tu);
        ensure!(
            structural == oracle_tu,
            "{}: structural {structural}, oracle {oracle_tu}",
            describe(&d)
        );
        if structural {
            tu += 1;
            continue;
        }
        not_tu += 1;
        let v = find_mprime(&m).ok_or_else(|| format!("{}: no M' found", describe(&d)))?;
        let arc_rows = v.rows.iter().filter(|&&r| matches!(m.row_tags[r], RowTag::Arc(..))).count();
        let vertex_cols: Vec<usize> = v.rows.iter().filter_map(|&r| match m.row_tags[r] {
            RowTag::Vertex(x) => Some(x),
            RowTag::Arc(..) => None,
        }).collect();
        ensure!(
            v.rows.len() == 3
                && v.det.abs() == 2
                && arc_rows == 1
                && v.cols.len() == 3
                && v.cols[2] == m.k_col()
                && v.cols[..2] == vertex_cols[..],
            "{}: unexpected M' {v:?}",
            describe(&d)
        );
    }
    Ok(format!("{tu} TU and {not_tu} non-TU instances agree, each non-TU with an M'"))
}

fn criterion_6_and_8() -> (Outcome, Outcome) {
    let formulas = small_formulas();
    let mut sums_checked = 0;
    let mut sums_failure = None;
    let mut sat = 0;
    for phi in &formulas {
        let r = match build_dphi(phi) {
            Ok(r) => r,
            Err(e) => return (Err(format!("{phi:?}: {e}")), Err("not run".into())),
        };
        let dpll = dpll_sat(&r.formula);
        let decision = decide_k(&r.dag, 2, Budget::default());
        let result: Outcome = (|| {
            match (&dpll, &decision) {
                (SatAnswer::Sat(gamma), Decision::Found(f)) => {
                    let lemmas = r.check_lemmas(f);
                    ensure!(lemmas.is_ok(), "{phi:?}: lemma violations {lemmas:?}");
                    let decoded = r.decode_labeling(f).map_err(|e| e.to_string())?;
                    ensure!(r.formula.is_satisfied_by(&decoded), "{phi:?}: decoded search witness fails");
                    let encoded = r.encode_assignment(gamma).map_err(|e| e.to_string())?;
                    ensure!(
                        is_topological_additive(&r.dag, &encoded).unwrap() && encoded.k() <= 2,
                        "{phi:?}: encoded labeling is not a 2-numbering"
                    );
                    let round = r.decode_labeling(&encoded).map_err(|e| e.to_string())?;
                    ensure!(r.formula.is_satisfied_by(&round), "{phi:?}: round trip fails");
                    if sums_failure.is_none() {
                        let gs = r.gadget_sums(&encoded).map_err(|e| e.to_string())?;
                        let vars_ok = gs.vars.iter().all(|&(x2, x1)| x2 == 4 && x1 == 5);
                        let clauses_ok = gs.clauses.iter().all(|&(c, c1)| (5..=7).contains(&c) && c1 == 8);
                        if vars_ok && clauses_ok {
                            sums_checked += 1;
                        } else {
                            sums_failure = Some(format!("{phi:?}: gadget sums {gs:?}"));
                        }
                    }
                    Ok(String::new())
                }
                (SatAnswer::Unsat, Decision::None) => Ok(String::new()),
                (a, b) => Err(format!("{phi:?}: dpll {a:?}, decide {b:?}")),
            }
        })();
        if let Err(e) = result {
            return (Err(e), Err("not run to completion".into()));
        }
        if matches!(dpll, SatAnswer::Sat(_)) {
            sat += 1;
        }
    }
    let six = Ok(format!(
        "{} formulas ({sat} satisfiable): dpll and decide_k agree, lemmas hold, encode/decode round-trips",
        formulas.len()
    ));
    let eight = match sums_failure {
        Some(e) => Err(e),
        None => Ok(format!("S(x^2)=4, S(x^1)=5, S(c^1)=8, 5<=S(c)<=7 on {sums_checked} instances")),
    };
    (six, eight)
}

fn criterion_7() -> Outcome {
    let phi = all_sign_formula();
    ensure!(matches!(dpll_sat(&phi), SatAnswer::Unsat), "all-sign formula should be unsatisfiable");
    let r = build_dphi(&phi).map_err(|e| e.to_string())?;
    let (vertices, arcs) = (13 * 3 + 6 * 8, 12 * 3 + 8 * 8);
    ensure!(
        r.dag.n() == vertices && r.dag.num_arcs() == arcs,
        "D_phi has {} vertices and {} arcs, expected {vertices} and {arcs}",
        r.dag.n(),
        r.dag.num_arcs()
    );
    let budget = Budget {
        max_time: Duration::from_secs(60),
        ..Budget::default()
    };
    let start = Instant::now();
    let decision = decide_k(&r.dag, 2, budget);
    let elapsed = start.elapsed();
    ensure!(decision == Decision::None, "decide_k(D_phi, 2) = {decision:?}");
    Ok(format!("{vertices} vertices, {arcs} arcs, no 2-numbering ({elapsed:.2?})"))
}

fn guarded<T>(f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let set = instance_set_one();
    let mut results: Vec<(usize, Outcome, Duration)> = Vec::new();
    let timed = |n: usize, f: &dyn Fn() -> Outcome, results: &mut Vec<_>| {
        let start = Instant::now();
        let o = guarded(f);
        results.push((n, o, start.elapsed()));
    };
    timed(1, &|| criterion_1(&set), &mut results);
    timed(2, &|| criterion_2(&set), &mut results);
    timed(3, &|| criterion_3(&set), &mut results);
    timed(4, &criterion_4, &mut results);
    timed(5, &criterion_5, &mut results);
    let start = Instant::now();
    let (six, eight) = guarded(|| Ok::<_, String>(criterion_6_and_8()))
        .unwrap_or_else(|e| (Err(e.clone()), Err(e)));
    let shared = start.elapsed();
    results.push((6, six, shared));
    timed(7, &criterion_7, &mut results);
    results.push((8, eight, shared));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, outcome, elapsed) in &results {
        match outcome {
            Ok(detail) => println!("[PASS] criterion {n}: {detail} ({elapsed:.1?})"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {n}: {detail} ({elapsed:.1?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
