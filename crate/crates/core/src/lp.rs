//! Exact linear relaxation of the numbering integer program.
//!
//! The relaxation has variables `f(1..n)` and `k`, one row per arc
//! (`S(v) - S(u) >= 1` written over the symmetric difference of the two
//! neighborhoods), one row `k - f(v) >= 0` and one row `f(v) >= 1` per vertex.
//! It is solved with a dense two-phase primal simplex over `BigRational`
//! using Bland's rule, so the feasibility answer is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::digraph::{is_topological_additive, Dag, Labeling};

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("entry {index} is {value}, expected >= 1")]
    EntryBelowOne { index: usize, value: String },
    #[error("scaled label does not fit in 64 bits")]
    Overflow,
}

/// One constraint `coeffs · x >= rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

/// `min objective · x` subject to `rows`, with every variable nonnegative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub rows: Vec<Row>,
    pub var_names: Vec<String>,
}

impl LinearProgram {
    pub fn width(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        let w = self.width();
        if self.var_names.len() != w {
            return Err(LpError::Malformed(format!(
                "{} names for {w} variables",
                self.var_names.len()
            )));
        }
        if let Some(i) = self.rows.iter().position(|r| r.coeffs.len() != w) {
            return Err(LpError::Malformed(format!("row {i} has the wrong width")));
        }
        Ok(())
    }

    /// True iff `x` satisfies every row exactly and is nonnegative.
    pub fn is_feasible(&self, x: &RationalVector) -> bool {
        x.0.len() == self.width()
            && x.0.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|row| dot(&row.coeffs, &x.0) >= row.rhs)
    }

    pub fn objective_value(&self, x: &RationalVector) -> Rational {
        dot(&self.objective, &x.0)
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Exact rational vector (lowest terms, positive denominators by construction
/// of `BigRational`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn from_integers(values: &[i64]) -> Self {
        RationalVector(values.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Optimal { x: RationalVector, value: Rational },
}

/// Builds the relaxation for `d`. Columns are `f(0..n)` in internal index
/// order followed by `k`.
pub fn build_lr(d: &Dag) -> LinearProgram {
    let n = d.n();
    let w = n + 1;
    let int = |v: i64| Rational::from_integer(BigInt::from(v));
    let mut rows = Vec::with_capacity(d.num_arcs() + 2 * n);
    for &(u, v) in d.arcs() {
        let mut coeffs = vec![Rational::zero(); w];
        for &x in d.neighbors(v) {
            coeffs[x] += int(1);
        }
        for &x in d.neighbors(u) {
            coeffs[x] -= int(1);
        }
        rows.push(Row {
            coeffs,
            rhs: int(1),
        });
    }
    for v in 0..n {
        let mut coeffs = vec![Rational::zero(); w];
        coeffs[n] = int(1);
        coeffs[v] = int(-1);
        rows.push(Row {
            coeffs,
            rhs: int(0),
        });
    }
    for v in 0..n {
        let mut coeffs = vec![Rational::zero(); w];
        coeffs[v] = int(1);
        rows.push(Row {
            coeffs,
            rhs: int(1),
        });
    }
    let mut objective = vec![Rational::zero(); w];
    objective[n] = int(1);
    let mut var_names: Vec<String> = (0..n).map(|v| format!("f({})", d.original_id(v))).collect();
    var_names.push("k".into());
    LinearProgram {
        objective,
        rows,
        var_names,
    }
}

struct Tableau {
    /// m rows of `cols` coefficients followed by the rhs.
    a: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        for x in self.a[r].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost · x` over columns `< active` starting from the current
    /// basis. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], active: usize) -> bool {
        let m = self.a.len();
        loop {
            // reduced cost z_j = c_j - c_B · column_j
            let entering = (0..active).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut z = cost[j].clone();
                for i in 0..m {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !self.a[i][j].is_zero() {
                        z -= cb * &self.a[i][j];
                    }
                }
                z.is_negative()
            });
            let Some(j) = entering else { return true };
            let rhs = self.cols;
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..m {
                if self.a[i][j].is_positive() {
                    let ratio = &self.a[i][rhs] / &self.a[i][j];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, j);
        }
    }
}

/// Solves `lp` exactly. Variables are nonnegative.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let n = lp.width();
    let m = lp.rows.len();
    // Standard form: coeffs·x - s_i = rhs. Rows with rhs <= 0 are negated so
    // the surplus becomes a basic slack; the rest get an artificial.
    let needs_artificial: Vec<bool> = lp.rows.iter().map(|r| r.rhs.is_positive()).collect();
    let num_art = needs_artificial.iter().filter(|&&b| b).count();
    let cols = n + m + num_art;
    let mut a = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = n + m;
    for (i, row) in lp.rows.iter().enumerate() {
        let mut t = vec![Rational::zero(); cols + 1];
        if needs_artificial[i] {
            t[..n].clone_from_slice(&row.coeffs);
            t[n + i] = -Rational::one();
            t[next_art] = Rational::one();
            t[cols] = row.rhs.clone();
            basis.push(next_art);
            next_art += 1;
        } else {
            for (x, c) in t.iter_mut().zip(&row.coeffs) {
                *x = -c.clone();
            }
            t[n + i] = Rational::one();
            t[cols] = -row.rhs.clone();
            basis.push(n + i);
        }
        a.push(t);
    }
    let mut tab = Tableau { a, basis, cols };

    if num_art > 0 {
        let mut cost = vec![Rational::zero(); cols];
        for c in cost.iter_mut().skip(n + m) {
            *c = Rational::one();
        }
        // phase 1 is bounded below by zero
        tab.optimize(&cost, cols);
        let infeasibility: Rational = (0..m)
            .filter(|&i| tab.basis[i] >= n + m)
            .map(|i| tab.a[i][cols].clone())
            .sum();
        if infeasibility.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < tab.a.len() {
            if tab.basis[i] >= n + m {
                match (0..n + m).find(|&j| !tab.a[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.a.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); cols];
    cost[..n].clone_from_slice(&lp.objective);
    if !tab.optimize(&cost, n + m) {
        return Err(LpError::Unbounded);
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.a[i][cols].clone();
        }
    }
    let x = RationalVector(x);
    let value = lp.objective_value(&x);
    Ok(LpOutcome::Optimal { x, value })
}

/// Multiplies by the least common multiple of the denominators.
pub fn scale_to_integer(x: &RationalVector) -> Result<Labeling, LpError> {
    if let Some(index) = x.0.iter().position(|v| *v < Rational::one()) {
        return Err(LpError::EntryBelowOne {
            index,
            value: x.0[index].to_string(),
        });
    }
    let lcm = x
        .0
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let values = x
        .0
        .iter()
        .map(|v| {
            (v.numer() * (&lcm / v.denom()))
                .to_u64()
                .ok_or(LpError::Overflow)
        })
        .collect::<Result<Vec<u64>, _>>()?;
    // entries >= 1 so every scaled value is >= 1
    Ok(Labeling::new(values).expect("scaled entries are positive"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    NotInD,
    InD {
        witness: Labeling,
        /// Optimal value of the relaxation.
        lr_value: Rational,
        /// Optimal relaxation solution, `f` entries then `k`.
        lr_solution: RationalVector,
    },
}

impl Membership {
    pub fn witness(&self) -> Option<&Labeling> {
        match self {
            Membership::InD { witness, .. } => Some(witness),
            Membership::NotInD => None,
        }
    }
}

/// Decides whether `d` has a topological additive numbering.
pub fn membership(d: &Dag) -> Result<Membership, LpError> {
    match simplex_solve(&build_lr(d))? {
        LpOutcome::Infeasible => Ok(Membership::NotInD),
        LpOutcome::Optimal { x, value } => {
            let f = RationalVector(x.0[..d.n()].to_vec());
            let witness = scale_to_integer(&f)?;
            debug_assert_eq!(is_topological_additive(d, &witness), Ok(true));
            Ok(Membership::InD {
                witness,
                lr_value: value,
                lr_solution: x,
            })
        }
    }
}

/// Smallest integer `>= q`.
pub fn ceil_to_u64(q: &Rational) -> Option<u64> {
    q.ceil().to_integer().to_u64()
}
