//! Exact η_t computation.
//!
//! `decide_k` is a depth-first search over label assignments. Every arc
//! `(u, v)` is the linear constraint
//! `Σ_{N(v)∖N(u)} f − Σ_{N(u)∖N(v)} f ≥ 1`, and the search keeps a label
//! interval per vertex, tightening intervals to a fixpoint after every
//! assignment and backtracking as soon as some arc's largest achievable
//! difference drops below one.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bounds::{best_lower_bound, BoundsError, LowerBounds};
use crate::digraph::{
    detect_complete_monotone_multipartite, detect_monotone_bipartite, is_topological_additive,
    Dag, DagError, Labeling,
};
use crate::families::{eta_complete_monotone_rpartite, eta_monotone_bipartite, FamilyError};
use crate::lp::{membership, LpError, Membership};

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("search budget exceeded at k = {k} after {nodes} nodes")]
    BudgetExceeded { k: u64, nodes: u64 },
    #[error("closed form gives {closed}, search gives {search}")]
    Disagreement { closed: u64, search: u64 },
    #[error("lower bound {lower} exceeds the relaxation witness bound {upper}")]
    InconsistentBounds { lower: u64, upper: u64 },
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Limits for one `decide_k` call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: DEFAULT_NODE_LIMIT,
            max_time: DEFAULT_TIME_LIMIT,
        }
    }
}

/// Order in which vertices are branched on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VarOrder {
    /// Highest degree first, ties by topological position.
    #[default]
    DegreeDescending,
    /// Topological order.
    Topological,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: Budget,
    pub order: VarOrder,
    /// With propagation off, labelings are enumerated and checked only when
    /// complete.
    pub propagate: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: Budget::default(),
            order: VarOrder::default(),
            propagate: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Found(Labeling),
    None,
    BudgetExceeded,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Looks for a topological additive numbering with labels in `1..=k`.
pub fn decide_k(d: &Dag, k: u64, budget: Budget) -> Decision {
    decide_k_with(
        d,
        k,
        SearchOptions {
            budget,
            ..SearchOptions::default()
        },
    )
    .0
}

pub fn decide_k_with(d: &Dag, k: u64, opts: SearchOptions) -> (Decision, SearchStats) {
    let start = Instant::now();
    let mut search = Search::new(d, k, opts, start);
    let decision = if k == 0 {
        Decision::None
    } else {
        search.run()
    };
    let stats = SearchStats {
        nodes: search.nodes,
        elapsed: start.elapsed(),
    };
    (decision, stats)
}

/// One arc as `Σ plus − Σ minus ≥ 1`.
struct ArcConstraint {
    plus: Vec<usize>,
    minus: Vec<usize>,
}

enum Outcome {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search<'a> {
    d: &'a Dag,
    opts: SearchOptions,
    start: Instant,
    constraints: Vec<ArcConstraint>,
    /// constraint indices per vertex
    watch: Vec<Vec<usize>>,
    order: Vec<usize>,
    lo: Vec<u64>,
    hi: Vec<u64>,
    trail: Vec<(usize, u64, u64)>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(d: &'a Dag, k: u64, opts: SearchOptions, start: Instant) -> Self {
        let n = d.n();
        let mut constraints = Vec::with_capacity(d.num_arcs());
        let mut watch = vec![Vec::new(); n];
        for (i, &(u, v)) in d.arcs().iter().enumerate() {
            let (nu, nv) = (d.neighbors(u), d.neighbors(v));
            let plus: Vec<usize> = nv.iter().copied().filter(|x| nu.binary_search(x).is_err()).collect();
            let minus: Vec<usize> = nu.iter().copied().filter(|x| nv.binary_search(x).is_err()).collect();
            for &x in plus.iter().chain(&minus) {
                watch[x].push(i);
            }
            constraints.push(ArcConstraint { plus, minus });
        }
        let mut order: Vec<usize> = (0..n).collect();
        if opts.order == VarOrder::DegreeDescending {
            order.sort_by_key(|&v| std::cmp::Reverse(d.degree(v)));
        }
        Search {
            d,
            opts,
            start,
            constraints,
            watch,
            order,
            lo: vec![1; n],
            hi: vec![k.max(1); n],
            trail: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; d.num_arcs()],
            nodes: 0,
        }
    }

    fn run(&mut self) -> Decision {
        if self.opts.propagate {
            self.queue = (0..self.constraints.len()).collect();
            self.queued.iter_mut().for_each(|q| *q = true);
            if !self.propagate() {
                return Decision::None;
            }
        }
        match self.dfs(0) {
            Outcome::Found => {
                let f = Labeling::new(self.lo.clone()).expect("labels are >= 1");
                debug_assert_eq!(is_topological_additive(self.d, &f), Ok(true));
                Decision::Found(f)
            }
            Outcome::Exhausted => Decision::None,
            Outcome::OutOfBudget => Decision::BudgetExceeded,
        }
    }

    fn out_of_budget(&self) -> bool {
        self.nodes > self.opts.budget.max_nodes
            || (self.nodes.is_multiple_of(1024) && self.start.elapsed() > self.opts.budget.max_time)
    }

    fn dfs(&mut self, depth: usize) -> Outcome {
        let Some(pos) = (depth..self.order.len()).find(|&p| {
            let v = self.order[p];
            self.lo[v] < self.hi[v]
        }) else {
            if self.opts.propagate {
                return Outcome::Found;
            }
            let f = Labeling::new(self.lo.clone()).expect("labels are >= 1");
            return if is_topological_additive(self.d, &f).expect("length matches") {
                Outcome::Found
            } else {
                Outcome::Exhausted
            };
        };
        let v = self.order[pos];
        let (lo, hi) = (self.lo[v], self.hi[v]);
        for value in lo..=hi {
            self.nodes += 1;
            if self.out_of_budget() {
                return Outcome::OutOfBudget;
            }
            let mark = self.trail.len();
            self.set(v, value, value);
            let consistent = if self.opts.propagate {
                self.enqueue_watchers(v);
                self.propagate()
            } else {
                true
            };
            if consistent {
                match self.dfs(pos + 1) {
                    Outcome::Exhausted => {}
                    other => return other,
                }
            }
            self.undo(mark);
        }
        Outcome::Exhausted
    }

    fn set(&mut self, v: usize, lo: u64, hi: u64) {
        self.trail.push((v, self.lo[v], self.hi[v]));
        self.lo[v] = lo;
        self.hi[v] = hi;
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, lo, hi) = self.trail.pop().unwrap();
            self.lo[v] = lo;
            self.hi[v] = hi;
        }
    }

    fn enqueue_watchers(&mut self, v: usize) {
        for &c in &self.watch[v] {
            if !self.queued[c] {
                self.queued[c] = true;
                self.queue.push(c);
            }
        }
    }

    /// Bounds propagation to fixpoint; false on a wipe-out.
    fn propagate(&mut self) -> bool {
        while let Some(c) = self.queue.pop() {
            self.queued[c] = false;
            // largest achievable Σ plus − Σ minus, kept as plus part and minus part
            let max_plus: u64 = self.constraints[c].plus.iter().map(|&x| self.hi[x]).sum();
            let min_minus: u64 = self.constraints[c].minus.iter().map(|&x| self.lo[x]).sum();
            if max_plus < min_minus + 1 {
                self.clear_queue();
                return false;
            }
            let slack = max_plus - min_minus - 1;
            let mut changed = Vec::new();
            for &x in &self.constraints[c].plus {
                // f(x) >= hi(x) - slack
                if self.hi[x] > slack && self.hi[x] - slack > self.lo[x] {
                    changed.push((x, self.hi[x] - slack, self.hi[x]));
                }
            }
            for &x in &self.constraints[c].minus {
                // f(x) <= lo(x) + slack
                if self.lo[x] + slack < self.hi[x] {
                    changed.push((x, self.lo[x], self.lo[x] + slack));
                }
            }
            for (x, lo, hi) in changed {
                self.set(x, lo, hi);
                self.enqueue_watchers(x);
            }
        }
        true
    }

    fn clear_queue(&mut self) {
        for c in self.queue.drain(..) {
            self.queued[c] = false;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Search,
    CompleteMultipartite,
    MonotoneBipartite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    NotInD,
    Solved {
        eta_t: u64,
        witness: Labeling,
        bounds: LowerBounds,
        /// Max label of the scaled relaxation witness.
        upper: u64,
        method: Method,
        stats: SearchStats,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub search: SearchOptions,
    /// Use the closed forms when the structure is detected.
    pub closed_forms: bool,
    /// Also run the search when a closed form applies and fail on mismatch.
    pub cross_check: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            search: SearchOptions::default(),
            closed_forms: true,
            cross_check: false,
        }
    }
}

pub fn compute_eta_t(d: &Dag, budget: Budget) -> Result<SolveResult, SolveError> {
    compute_eta_t_with(
        d,
        SolveOptions {
            search: SearchOptions {
                budget,
                ..SearchOptions::default()
            },
            ..SolveOptions::default()
        },
    )
}

pub fn compute_eta_t_with(d: &Dag, opts: SolveOptions) -> Result<SolveResult, SolveError> {
    d.require_connected()?;
    let start = Instant::now();
    let Membership::InD {
        witness: lr_witness,
        lr_value,
        ..
    } = membership(d)?
    else {
        return Ok(SolveResult::NotInD);
    };
    let upper = lr_witness.k();
    let bounds = best_lower_bound(d, &lr_witness, &lr_value)?;
    if bounds.best > upper {
        return Err(SolveError::InconsistentBounds {
            lower: bounds.best,
            upper,
        });
    }

    let closed = if opts.closed_forms {
        closed_form(d)?
    } else {
        None
    };
    if let Some((method, form)) = &closed {
        if !opts.cross_check {
            return Ok(SolveResult::Solved {
                eta_t: form.value,
                witness: form.witness.clone(),
                bounds,
                upper,
                method: *method,
                stats: SearchStats {
                    nodes: 0,
                    elapsed: start.elapsed(),
                },
            });
        }
    }

    let mut nodes = 0;
    for k in bounds.best..=upper {
        let (decision, stats) = decide_k_with(d, k, opts.search);
        nodes += stats.nodes;
        match decision {
            Decision::Found(witness) => {
                if let Some((method, form)) = closed {
                    if form.value != k {
                        return Err(SolveError::Disagreement {
                            closed: form.value,
                            search: k,
                        });
                    }
                    return Ok(SolveResult::Solved {
                        eta_t: k,
                        witness: form.witness,
                        bounds,
                        upper,
                        method,
                        stats: SearchStats {
                            nodes,
                            elapsed: start.elapsed(),
                        },
                    });
                }
                return Ok(SolveResult::Solved {
                    eta_t: k,
                    witness,
                    bounds,
                    upper,
                    method: Method::Search,
                    stats: SearchStats {
                        nodes,
                        elapsed: start.elapsed(),
                    },
                });
            }
            Decision::None => {}
            Decision::BudgetExceeded => return Err(SolveError::BudgetExceeded { k, nodes }),
        }
    }
    // the relaxation witness is an upper-bound numbering, so the sweep
    // always finds one by k = upper
    unreachable!("no numbering found up to the relaxation witness bound")
}

fn closed_form(d: &Dag) -> Result<Option<(Method, crate::families::ClosedForm)>, SolveError> {
    if let Some(parts) = detect_complete_monotone_multipartite(d)? {
        return Ok(Some((
            Method::CompleteMultipartite,
            eta_complete_monotone_rpartite(&parts, d)?,
        )));
    }
    if let Some(parts) = detect_monotone_bipartite(d)? {
        return Ok(Some((
            Method::MonotoneBipartite,
            eta_monotone_bipartite(&parts, d)?,
        )));
    }
    Ok(None)
}
