//! 3-SAT to 2-numbering reduction.
//!
//! Every variable `x` becomes a 13-vertex gadget (`x`, `¬x`, `x^1..x^5`,
//! `u^1..u^6`) and every clause `c = y ∨ z ∨ w` a 6-vertex gadget (`c`,
//! `c^1..c^5`) wired to its three literal vertices. The digraph has a
//! topological additive 2-numbering iff the formula is satisfiable.
//!
//! Vertex id layout (1-based, as written to files): variable `i` (0-based)
//! owns ids `13i+1 ..= 13i+13` in the order `x, ¬x, x^1..x^5, u^1..u^6`;
//! clause `j` owns ids `13|X| + 6j + 1 ..= 13|X| + 6j + 6` in the order
//! `c, c^1..c^5`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::digraph::{is_topological_additive, neighbor_sums, Dag, DagError, Labeling};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("clause {clause} has {len} literals; only 3-literal clauses are supported")]
    ClauseLength { clause: usize, len: usize },
    #[error("literal {lit} out of range for {num_vars} variables")]
    LiteralOutOfRange { lit: i32, num_vars: usize },
    #[error("clause {0} repeats a literal; normalize the formula first")]
    RepeatedLiteral(usize),
    #[error("formula has no clauses")]
    EmptyFormula,
    #[error("assignment has {got} values, formula has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
    #[error("assignment does not satisfy clause {0}")]
    NotSatisfying(usize),
    #[error("not a topological additive 2-numbering: {0}")]
    InvalidNumbering(String),
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// CNF formula over variables `1..=num_vars`, literals as signed integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    /// Variables `1..=original_vars` come from the input; the rest were
    /// introduced by [`normalize_clauses`].
    pub original_vars: usize,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Self {
        CnfFormula {
            num_vars,
            clauses,
            original_vars: num_vars,
        }
    }

    /// Indices of clauses that contain some literal twice.
    pub fn repeated_literal_clauses(&self) -> Vec<usize> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| first_repeat(c).is_some())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn has_repeated_literals(&self) -> bool {
        !self.repeated_literal_clauses().is_empty()
    }

    /// `assignment[i]` is the value of variable `i + 1`. Variables beyond the
    /// assignment's length count as false.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.first_unsatisfied(assignment).is_none()
    }

    fn first_unsatisfied(&self, assignment: &[bool]) -> Option<usize> {
        let value = |lit: i32| {
            let b = assignment
                .get(lit.unsigned_abs() as usize - 1)
                .copied()
                .unwrap_or(false);
            b == (lit > 0)
        };
        self.clauses
            .iter()
            .position(|c| !c.iter().any(|&l| value(l)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{l} ");
            }
            s.push_str("0\n");
        }
        s
    }
}

fn first_repeat(clause: &[i32]) -> Option<(usize, usize)> {
    (0..clause.len()).find_map(|i| {
        (i + 1..clause.len())
            .find(|&j| clause[i] == clause[j])
            .map(|j| (i, j))
    })
}

/// Parses DIMACS CNF. Clauses may span lines; each must have exactly 3
/// literals.
pub fn parse_cnf(text: &str) -> Result<CnfFormula, ReductionError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        let syntax = |msg: String| ReductionError::Syntax { line, msg };
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax("duplicate header".into()));
            }
            let t: Vec<&str> = trimmed.split_whitespace().collect();
            if t.len() != 4 || t[0] != "p" || t[1] != "cnf" {
                return Err(syntax("expected 'p cnf <vars> <clauses>'".into()));
            }
            let vars = t[2].parse().map_err(|_| syntax(format!("bad count '{}'", t[2])))?;
            let count = t[3].parse().map_err(|_| syntax(format!("bad count '{}'", t[3])))?;
            header = Some((vars, count));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(syntax("clause before header".into()));
        };
        for tok in trimmed.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| syntax(format!("'{tok}' is not a literal")))?;
            if lit == 0 {
                let clause = std::mem::take(&mut current);
                if clause.len() != 3 {
                    return Err(ReductionError::ClauseLength {
                        clause: clauses.len(),
                        len: clause.len(),
                    });
                }
                clauses.push(clause);
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(ReductionError::LiteralOutOfRange { lit, num_vars });
                }
                current.push(lit);
            }
        }
    }
    let (num_vars, count) = header.ok_or(ReductionError::Syntax {
        line: 0,
        msg: "missing 'p cnf' header".into(),
    })?;
    if !current.is_empty() {
        return Err(ReductionError::Syntax {
            line: 0,
            msg: "last clause is not terminated by 0".into(),
        });
    }
    if clauses.len() != count {
        return Err(ReductionError::Syntax {
            line: 0,
            msg: format!("header declares {count} clauses, found {}", clauses.len()),
        });
    }
    Ok(CnfFormula::new(num_vars, clauses))
}

/// Rewrites every clause with a repeated literal: the first repeated
/// occurrence of `y` in `y ∨ y ∨ z` is replaced by a fresh `a` and `¬a`,
/// giving two clauses. Repeats until no clause repeats a literal. Each
/// rewrite depth of one input clause shares one fresh variable, so
/// `x ∨ x ∨ x` becomes four clauses over `x` and two fresh variables.
pub fn normalize_clauses(phi: &CnfFormula) -> CnfFormula {
    let mut num_vars = phi.num_vars;
    let mut clauses = Vec::with_capacity(phi.clauses.len());
    for clause in &phi.clauses {
        let mut level = vec![clause.clone()];
        while level.iter().any(|c| first_repeat(c).is_some()) {
            num_vars += 1;
            let fresh = num_vars as i32;
            let mut next = Vec::new();
            for c in level {
                match first_repeat(&c) {
                    Some((i, _)) => {
                        for lit in [fresh, -fresh] {
                            let mut split = c.clone();
                            split[i] = lit;
                            next.push(split);
                        }
                    }
                    None => next.push(c),
                }
            }
            level = next;
        }
        clauses.extend(level);
    }
    CnfFormula {
        num_vars,
        clauses,
        original_vars: phi.original_vars,
    }
}

/// Internal indices of one variable gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarGadget {
    pub pos: usize,
    pub neg: usize,
    /// `x^1..x^5`
    pub x: [usize; 5],
    /// `u^1..u^6`
    pub u: [usize; 6],
}

/// Internal indices of one clause gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseGadget {
    pub c: usize,
    /// `c^1..c^5`
    pub aux: [usize; 5],
    /// literal vertices `y, z, w`
    pub literals: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionMap {
    pub vars: Vec<VarGadget>,
    pub clauses: Vec<ClauseGadget>,
}

/// A built reduction: normalized formula, its digraph and the gadget map.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub formula: CnfFormula,
    pub dag: Dag,
    pub map: ReductionMap,
}

pub fn build_dphi(phi: &CnfFormula) -> Result<Reduction, ReductionError> {
    if phi.clauses.is_empty() {
        return Err(ReductionError::EmptyFormula);
    }
    for (i, c) in phi.clauses.iter().enumerate() {
        if c.len() != 3 {
            return Err(ReductionError::ClauseLength {
                clause: i,
                len: c.len(),
            });
        }
        if first_repeat(c).is_some() {
            return Err(ReductionError::RepeatedLiteral(i));
        }
        if let Some(&lit) = c
            .iter()
            .find(|l| l.unsigned_abs() as usize > phi.num_vars || **l == 0)
        {
            return Err(ReductionError::LiteralOutOfRange {
                lit,
                num_vars: phi.num_vars,
            });
        }
    }
    let nv = phi.num_vars;
    let n = 13 * nv + 6 * phi.clauses.len();
    let var_id = |i: usize, offset: usize| 13 * i + offset + 1;
    let lit_id = |lit: i32| {
        let i = lit.unsigned_abs() as usize - 1;
        var_id(i, if lit > 0 { 0 } else { 1 })
    };
    let clause_id = |j: usize, offset: usize| 13 * nv + 6 * j + offset + 1;

    let mut arcs = Vec::with_capacity(12 * nv + 8 * phi.clauses.len());
    for i in 0..nv {
        let (x, nx) = (var_id(i, 0), var_id(i, 1));
        let xs = |t: usize| var_id(i, 1 + t);
        let us = |t: usize| var_id(i, 6 + t);
        arcs.extend([
            (xs(1), x),
            (xs(1), nx),
            (xs(2), xs(1)),
            (xs(3), xs(2)),
            (xs(4), xs(2)),
            (xs(5), xs(2)),
            (us(1), x),
            (us(2), x),
            (us(3), x),
            (us(4), nx),
            (us(5), nx),
            (us(6), nx),
        ]);
    }
    for (j, clause) in phi.clauses.iter().enumerate() {
        let c = clause_id(j, 0);
        let cs = |t: usize| clause_id(j, t);
        for &lit in clause {
            arcs.push((c, lit_id(lit)));
        }
        arcs.extend([(c, cs(1)), (cs(2), cs(1)), (cs(3), cs(1)), (cs(4), cs(1)), (cs(5), c)]);
    }
    let dag = Dag::from_arcs(n, &arcs)?;
    if dag.two_coloring().is_none() {
        // cannot happen for this construction; kept as a build-time check
        return Err(ReductionError::InvalidNumbering(
            "constructed digraph is not bipartite".into(),
        ));
    }

    let idx = |id: usize| dag.index_of(id).expect("id in range");
    let vars = (0..nv)
        .map(|i| VarGadget {
            pos: idx(var_id(i, 0)),
            neg: idx(var_id(i, 1)),
            x: std::array::from_fn(|t| idx(var_id(i, 2 + t))),
            u: std::array::from_fn(|t| idx(var_id(i, 7 + t))),
        })
        .collect();
    let clauses = phi
        .clauses
        .iter()
        .enumerate()
        .map(|(j, clause)| ClauseGadget {
            c: idx(clause_id(j, 0)),
            aux: std::array::from_fn(|t| idx(clause_id(j, 1 + t))),
            literals: std::array::from_fn(|t| idx(lit_id(clause[t]))),
        })
        .collect();
    Ok(Reduction {
        formula: phi.clone(),
        dag,
        map: ReductionMap { vars, clauses },
    })
}

/// Per-variable and per-clause inequalities that every 2-numbering obeys.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LemmaReport {
    /// Variables (0-based) with `f(x) + f(¬x) < 3`.
    pub variable_violations: Vec<usize>,
    /// Clauses with `f(y) + f(z) + f(w) > 5`.
    pub clause_violations: Vec<usize>,
}

impl LemmaReport {
    pub fn is_ok(&self) -> bool {
        self.variable_violations.is_empty() && self.clause_violations.is_empty()
    }
}

impl Reduction {
    /// The fixed labeling induced by a satisfying assignment.
    pub fn encode_assignment(&self, gamma: &[bool]) -> Result<Labeling, ReductionError> {
        if gamma.len() != self.formula.num_vars {
            return Err(ReductionError::AssignmentLength {
                expected: self.formula.num_vars,
                got: gamma.len(),
            });
        }
        if let Some(c) = self.formula.first_unsatisfied(gamma) {
            return Err(ReductionError::NotSatisfying(c));
        }
        let mut f = vec![0u64; self.dag.n()];
        for (g, &value) in self.map.vars.iter().zip(gamma) {
            for &v in &[g.x[0], g.x[2], g.x[3], g.x[4]] {
                f[v] = 1;
            }
            f[g.x[1]] = 2;
            for &v in &g.u {
                f[v] = 2;
            }
            (f[g.pos], f[g.neg]) = if value { (1, 2) } else { (2, 1) };
        }
        for g in &self.map.clauses {
            f[g.c] = 2;
            f[g.aux[1]] = 2;
            f[g.aux[2]] = 2;
            f[g.aux[3]] = 2;
            f[g.aux[0]] = 1;
            f[g.aux[4]] = 1;
        }
        Ok(Labeling::new(f)?)
    }

    fn require_two_numbering(&self, f: &Labeling) -> Result<(), ReductionError> {
        if f.len() != self.dag.n() {
            return Err(DagError::LengthMismatch {
                expected: self.dag.n(),
                got: f.len(),
            }
            .into());
        }
        if f.k() > 2 {
            return Err(ReductionError::InvalidNumbering(format!("label {} > 2", f.k())));
        }
        if !is_topological_additive(&self.dag, f)? {
            return Err(ReductionError::InvalidNumbering(
                "some arc has S(u) >= S(v)".into(),
            ));
        }
        Ok(())
    }

    /// Reads a satisfying assignment off a 2-numbering: `x` is true unless
    /// `f(x) = 2` and `f(¬x) = 1`. Covers all variables of the normalized
    /// formula.
    pub fn decode_labeling(&self, f: &Labeling) -> Result<Vec<bool>, ReductionError> {
        self.require_two_numbering(f)?;
        let gamma: Vec<bool> = self
            .map
            .vars
            .iter()
            .map(|g| !(f.get(g.pos) == 2 && f.get(g.neg) == 1))
            .collect();
        if let Some(c) = self.formula.first_unsatisfied(&gamma) {
            return Err(ReductionError::NotSatisfying(c));
        }
        Ok(gamma)
    }

    pub fn check_lemmas(&self, f: &Labeling) -> LemmaReport {
        let variable_violations = self
            .map
            .vars
            .iter()
            .enumerate()
            .filter(|(_, g)| f.get(g.pos) + f.get(g.neg) < 3)
            .map(|(i, _)| i)
            .collect();
        let clause_violations = self
            .map
            .clauses
            .iter()
            .enumerate()
            .filter(|(_, g)| g.literals.iter().map(|&v| f.get(v)).sum::<u64>() > 5)
            .map(|(j, _)| j)
            .collect();
        LemmaReport {
            variable_violations,
            clause_violations,
        }
    }

    /// Gadget sums `(S(x^2), S(x^1))` per variable and `(S(c), S(c^1))` per
    /// clause.
    pub fn gadget_sums(&self, f: &Labeling) -> Result<GadgetSums, ReductionError> {
        let s = neighbor_sums(&self.dag, f)?;
        Ok(GadgetSums {
            vars: self
                .map
                .vars
                .iter()
                .map(|g| (s.get(g.x[1]), s.get(g.x[0])))
                .collect(),
            clauses: self
                .map
                .clauses
                .iter()
                .map(|g| (s.get(g.c), s.get(g.aux[0])))
                .collect(),
        })
    }

    /// Sidecar text: one line `<id> var <i> <role>` or `<id> clause <j> <role>`
    /// per vertex, sorted by id, 1-based owners.
    pub fn map_text(&self) -> String {
        let mut lines: Vec<(usize, String)> = Vec::with_capacity(self.dag.n());
        let id = |v: usize| self.dag.original_id(v);
        for (i, g) in self.map.vars.iter().enumerate() {
            let owner = i + 1;
            lines.push((id(g.pos), format!("var {owner} x")));
            lines.push((id(g.neg), format!("var {owner} not_x")));
            for (t, &v) in g.x.iter().enumerate() {
                lines.push((id(v), format!("var {owner} x{}", t + 1)));
            }
            for (t, &v) in g.u.iter().enumerate() {
                lines.push((id(v), format!("var {owner} u{}", t + 1)));
            }
        }
        for (j, g) in self.map.clauses.iter().enumerate() {
            let owner = j + 1;
            lines.push((id(g.c), format!("clause {owner} c")));
            for (t, &v) in g.aux.iter().enumerate() {
                lines.push((id(v), format!("clause {owner} c{}", t + 1)));
            }
        }
        lines.sort();
        let mut s = String::from("c vertex owner index role\n");
        for (v, rest) in lines {
            let _ = writeln!(s, "{v} {rest}");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetSums {
    pub vars: Vec<(u64, u64)>,
    pub clauses: Vec<(u64, u64)>,
}
