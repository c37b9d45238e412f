//! Command-line front end. [`run`] does all the work and returns the exit
//! code and output instead of exiting, so it can be tested in-process.
//!
//! Exit codes: 0 definitive positive answer, 1 definitive negative answer
//! (not in D, no k-numbering, not TU, invalid witness), 2 usage or input
//! error, 3 search budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::bounds::{best_lower_bound, eta_one_test};
use crate::digraph::{
    is_topological_additive, neighbor_sums, obs22_infeasibility, parse_dag, Dag, Labeling,
};
use crate::formulation::{build_ipf_matrix, is_tu_structural};
use crate::lp::{membership, Membership};
use crate::oracle::{brute_force_eta, find_mprime, tu_subdeterminant, EtaAnswer, TuAnswer, Violation};
use crate::reduction::{build_dphi, normalize_clauses, parse_cnf};
use crate::solver::{
    compute_eta_t, decide_k_with, Budget, Decision, Method, SearchOptions, SolveError, SolveResult,
    DEFAULT_NODE_LIMIT,
};

pub const SCHEMA_VERSION: u64 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tan", version, about = "Topological additive numbering of DAGs")]
struct Cli {
    /// Print a JSON payload instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct BudgetArgs {
    /// Search node limit per k.
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    budget_nodes: u64,
    /// Search time limit per k, in seconds.
    #[arg(long, default_value_t = 60.0)]
    budget_secs: f64,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.budget_nodes,
            max_time: Duration::from_secs_f64(self.budget_secs.max(0.0)),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide membership in D and print a witness numbering.
    Check { dag: PathBuf },
    /// Print the clique, omega and relaxation lower bounds.
    Bound { dag: PathBuf },
    /// Compute eta_t with a minimum witness.
    Solve {
        dag: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Find a k-numbering or prove none exists.
    Decide {
        dag: PathBuf,
        #[arg(long)]
        k: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Brute-force eta_t over labels 1..=kmax.
    Oracle {
        dag: PathBuf,
        #[arg(long, default_value_t = 4)]
        kmax: u64,
    },
    /// Total unimodularity of the coefficient matrix.
    Tu {
        dag: PathBuf,
        /// Confirm by enumerating subdeterminants.
        #[arg(long)]
        oracle: bool,
        /// Also print the coefficient matrix.
        #[arg(long)]
        matrix: bool,
    },
    /// Build the reduction digraph of a 3-CNF formula.
    Reduce {
        cnf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Check a numbering given in original vertex order ("3,2,1", "3 2 1"
    /// or "@file").
    Verify {
        dag: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        witness: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub human_text: String,
    pub json_payload: Option<Value>,
}

impl CommandResult {
    /// What the binary prints.
    pub fn output(&self) -> String {
        match &self.json_payload {
            Some(v) => format!("{}\n", serde_json::to_string_pretty(v).expect("valid json")),
            None => self.human_text.clone(),
        }
    }
}

struct Outcome {
    exit_code: i32,
    status: &'static str,
    text: String,
    fields: Value,
}

impl Outcome {
    fn new(exit_code: i32, status: &'static str, text: String, fields: Value) -> Self {
        Outcome {
            exit_code,
            status,
            text,
            fields,
        }
    }
}

pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return CommandResult {
                exit_code: code,
                human_text: e.to_string(),
                json_payload: None,
            };
        }
    };
    let (name, input) = describe(&cli.command);
    let outcome = execute(&cli.command)
        .unwrap_or_else(|msg| Outcome::new(EXIT_INPUT, "error", format!("error: {msg}\n"), json!({ "error": msg })));
    let json_payload = cli.json.then(|| {
        let mut payload = json!({
            "schema": SCHEMA_VERSION,
            "command": name,
            "input": input,
            "status": outcome.status,
        });
        if let (Value::Object(dst), Value::Object(src)) = (&mut payload, outcome.fields) {
            dst.extend(src);
        }
        payload
    });
    CommandResult {
        exit_code: outcome.exit_code,
        human_text: outcome.text,
        json_payload,
    }
}

fn describe(cmd: &Command) -> (&'static str, String) {
    let p = |p: &Path| p.display().to_string();
    match cmd {
        Command::Check { dag } => ("check", p(dag)),
        Command::Bound { dag } => ("bound", p(dag)),
        Command::Solve { dag, .. } => ("solve", p(dag)),
        Command::Decide { dag, .. } => ("decide", p(dag)),
        Command::Oracle { dag, .. } => ("oracle", p(dag)),
        Command::Tu { dag, .. } => ("tu", p(dag)),
        Command::Reduce { cnf, .. } => ("reduce", p(cnf)),
        Command::Verify { dag, .. } => ("verify", p(dag)),
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_dag(path: &Path) -> Result<Dag, String> {
    parse_dag(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn labels_text(d: &Dag, f: &Labeling) -> String {
    join(&d.to_original_order(f))
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn ids(d: &Dag, vs: &[usize]) -> Vec<usize> {
    vs.iter().map(|&v| d.original_id(v)).collect()
}

fn execute(cmd: &Command) -> Result<Outcome, String> {
    match cmd {
        Command::Check { dag } => check(&load_dag(dag)?),
        Command::Bound { dag } => bound(&load_dag(dag)?),
        Command::Solve { dag, budget } => solve(&load_dag(dag)?, budget.budget()),
        Command::Decide { dag, k, budget } => decide(&load_dag(dag)?, *k, budget.budget()),
        Command::Oracle { dag, kmax } => oracle(&load_dag(dag)?, *kmax),
        Command::Tu {
            dag,
            oracle,
            matrix,
        } => tu(&load_dag(dag)?, *oracle, *matrix),
        Command::Reduce { cnf, out, map } => reduce(cnf, out.as_deref(), map.as_deref()),
        Command::Verify { dag, witness } => verify(&load_dag(dag)?, witness),
    }
}

fn check(d: &Dag) -> Result<Outcome, String> {
    match membership(d).map_err(|e| e.to_string())? {
        Membership::InD {
            witness, lr_value, ..
        } => Ok(Outcome::new(
            EXIT_OK,
            "in_d",
            format!("in D, witness {}\n", labels_text(d, &witness)),
            json!({
                "witness": d.to_original_order(&witness),
                "bounds": { "relaxation_optimum": lr_value.to_string() },
                "stats": {},
            }),
        )),
        Membership::NotInD => {
            let mut text = String::from("not in D\n");
            let mut fields = json!({ "stats": {} });
            if let Some((u, v)) = obs22_infeasibility(d) {
                let (u, v) = (d.original_id(u), d.original_id(v));
                text.push_str(&format!(
                    "obstruction: N({u}) is contained in N({v}) and there is a path from {v} to {u}\n"
                ));
                fields["obstruction"] = json!({ "u": u, "v": v });
            }
            Ok(Outcome::new(EXIT_NEGATIVE, "not_in_d", text, fields))
        }
    }
}

fn bound(d: &Dag) -> Result<Outcome, String> {
    let Membership::InD {
        witness, lr_value, ..
    } = membership(d).map_err(|e| e.to_string())?
    else {
        return Ok(Outcome::new(
            EXIT_NEGATIVE,
            "not_in_d",
            "not in D; lower bounds apply only to members of D\n".into(),
            json!({ "stats": {} }),
        ));
    };
    let b = best_lower_bound(d, &witness, &lr_value).map_err(|e| e.to_string())?;
    let clique = ids(d, &b.clique.clique);
    let (first, last) = (d.original_id(b.clique.q_first), d.original_id(b.clique.q_last));
    let eta_one = eta_one_test(d);
    let text = format!(
        "clique bound = {} (clique {}, first {first}, last {last}{})\n\
         omega bound = {}\n\
         relaxation bound = {} (optimum {lr_value})\n\
         best lower bound = {}\n\
         upper bound = {}\n\
         eta_t = 1: {eta_one}\n",
        b.clique.value,
        join(&clique),
        if b.clique.truncated { ", truncated scan" } else { "" },
        b.omega,
        b.relaxation,
        b.best,
        witness.k(),
    );
    Ok(Outcome::new(
        EXIT_OK,
        "bounded",
        text,
        json!({
            "bounds": {
                "clique": b.clique.value,
                "clique_vertices": clique,
                "clique_first": first,
                "clique_last": last,
                "clique_truncated": b.clique.truncated,
                "omega": b.omega,
                "relaxation": b.relaxation,
                "relaxation_optimum": lr_value.to_string(),
                "best": b.best,
                "upper": witness.k(),
            },
            "eta_one": eta_one,
            "stats": {},
        }),
    ))
}

fn solve(d: &Dag, budget: Budget) -> Result<Outcome, String> {
    match compute_eta_t(d, budget) {
        Ok(SolveResult::NotInD) => Ok(Outcome::new(
            EXIT_NEGATIVE,
            "not_in_d",
            "not in D\n".into(),
            json!({ "stats": {} }),
        )),
        Ok(SolveResult::Solved {
            eta_t,
            witness,
            bounds,
            upper,
            method,
            stats,
        }) => {
            let method = match method {
                Method::Search => "search",
                Method::CompleteMultipartite => "complete_multipartite",
                Method::MonotoneBipartite => "monotone_bipartite",
            };
            Ok(Outcome::new(
                EXIT_OK,
                "solved",
                format!(
                    "eta_t = {eta_t}, witness {}\nlower bound {}, upper bound {upper}, method {method}, nodes {}\n",
                    labels_text(d, &witness),
                    bounds.best,
                    stats.nodes
                ),
                json!({
                    "eta_t": eta_t,
                    "witness": d.to_original_order(&witness),
                    "bounds": { "lower": bounds.best, "upper": upper },
                    "method": method,
                    "stats": { "nodes": stats.nodes, "elapsed_ms": stats.elapsed.as_millis() as u64 },
                }),
            ))
        }
        Err(SolveError::BudgetExceeded { k, nodes }) => Ok(Outcome::new(
            EXIT_BUDGET,
            "budget_exceeded",
            format!("budget exceeded while deciding k = {k} ({nodes} nodes)\n"),
            json!({ "k": k, "stats": { "nodes": nodes } }),
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn decide(d: &Dag, k: u64, budget: Budget) -> Result<Outcome, String> {
    let opts = SearchOptions {
        budget,
        ..SearchOptions::default()
    };
    let (decision, stats) = decide_k_with(d, k, opts);
    let stats_json = json!({ "nodes": stats.nodes, "elapsed_ms": stats.elapsed.as_millis() as u64 });
    Ok(match decision {
        Decision::Found(f) => Outcome::new(
            EXIT_OK,
            "found",
            format!("found {k}-numbering: {}\nnodes {}\n", labels_text(d, &f), stats.nodes),
            json!({ "k": k, "witness": d.to_original_order(&f), "stats": stats_json }),
        ),
        Decision::None => Outcome::new(
            EXIT_NEGATIVE,
            "none",
            format!("no {k}-numbering exists\nnodes {}\n", stats.nodes),
            json!({ "k": k, "stats": stats_json }),
        ),
        Decision::BudgetExceeded => Outcome::new(
            EXIT_BUDGET,
            "budget_exceeded",
            format!("budget exceeded at k = {k}\nnodes {}\n", stats.nodes),
            json!({ "k": k, "stats": stats_json }),
        ),
    })
}

fn oracle(d: &Dag, kmax: u64) -> Result<Outcome, String> {
    let report = brute_force_eta(d, kmax).map_err(|e| e.to_string())?;
    let count = report.enumerated_count;
    Ok(match report.answer {
        EtaAnswer::Solved(k, f) => Outcome::new(
            EXIT_OK,
            "solved",
            format!("eta_t = {k}, witness {}\nenumerated {count}\n", labels_text(d, &f)),
            json!({
                "eta_t": k,
                "witness": d.to_original_order(&f),
                "stats": { "enumerated": count },
            }),
        ),
        EtaAnswer::NotFoundUpTo(k) => Outcome::new(
            EXIT_NEGATIVE,
            "not_found",
            format!("no numbering with labels <= {k}\nenumerated {count}\n"),
            json!({ "kmax": k, "stats": { "enumerated": count } }),
        ),
    })
}

fn violation_json(d: &Dag, m: &crate::formulation::IpfMatrix, v: &Violation) -> (String, Value) {
    let col_name = |c: usize| {
        if c == m.k_col() {
            "k".to_string()
        } else {
            format!("f({})", d.original_id(c))
        }
    };
    let row_name = |r: usize| match m.row_tags[r] {
        crate::formulation::RowTag::Arc(u, v) => {
            format!("arc({},{})", d.original_id(u), d.original_id(v))
        }
        crate::formulation::RowTag::Vertex(v) => format!("k-f({})", d.original_id(v)),
    };
    let rows: Vec<String> = v.rows.iter().map(|&r| row_name(r)).collect();
    let cols: Vec<String> = v.cols.iter().map(|&c| col_name(c)).collect();
    let text = format!("rows {}; columns {}; det {}", rows.join(" "), cols.join(" "), v.det);
    (text, json!({ "rows": rows, "cols": cols, "det": v.det }))
}

fn tu(d: &Dag, use_oracle: bool, print_matrix: bool) -> Result<Outcome, String> {
    let structural = is_tu_structural(d).map_err(|e| e.to_string())?;
    let m = build_ipf_matrix(d);
    let mut text = format!("{}\n", if structural { "TU" } else { "not TU" });
    let mut fields = json!({ "tu": structural, "stats": {} });
    if print_matrix {
        text.push_str(&m.to_string());
        fields["matrix"] = json!(m.entries);
    }
    if use_oracle {
        let report = tu_subdeterminant(&m).map_err(|e| e.to_string())?;
        fields["stats"] = json!({ "submatrices": report.enumerated_count });
        let oracle_tu = matches!(report.answer, TuAnswer::Tu);
        if let TuAnswer::Violation(v) = &report.answer {
            let (t, j) = violation_json(d, &m, v);
            text.push_str(&format!("oracle: first violation {t}\n"));
            fields["violation"] = j;
        } else {
            text.push_str(&format!(
                "oracle: all {} square submatrices have determinant in {{-1, 0, 1}}\n",
                report.enumerated_count
            ));
        }
        if !structural {
            if let Some(v) = find_mprime(&m) {
                let (t, j) = violation_json(d, &m, &v);
                text.push_str(&format!("oracle: arc/vertex-row witness {t}\n"));
                fields["mprime"] = j;
            }
        }
        if oracle_tu != structural {
            return Err("structural and subdeterminant answers disagree".into());
        }
    }
    let (code, status) = if structural {
        (EXIT_OK, "tu")
    } else {
        (EXIT_NEGATIVE, "not_tu")
    };
    Ok(Outcome::new(code, status, text, fields))
}

fn reduce(cnf: &Path, out: Option<&Path>, map: Option<&Path>) -> Result<Outcome, String> {
    let phi = parse_cnf(&read(cnf)?).map_err(|e| format!("{}: {e}", cnf.display()))?;
    let normalized = normalize_clauses(&phi);
    let r = build_dphi(&normalized).map_err(|e| e.to_string())?;
    let dag_text = r.dag.to_text();
    let fresh = normalized.num_vars - phi.num_vars;
    let mut text = format!(
        "D_phi: {} vertices, {} arcs ({} variables, {} clauses, {fresh} fresh variables)\n",
        r.dag.n(),
        r.dag.num_arcs(),
        normalized.num_vars,
        normalized.clauses.len()
    );
    match out {
        Some(path) => fs::write(path, &dag_text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => text.push_str(&dag_text),
    }
    if let Some(path) = map {
        fs::write(path, r.map_text()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(Outcome::new(
        EXIT_OK,
        "built",
        text,
        json!({
            "vertices": r.dag.n(),
            "arcs": r.dag.num_arcs(),
            "variables": normalized.num_vars,
            "clauses": normalized.clauses.len(),
            "fresh_variables": fresh,
            "stats": {},
        }),
    ))
}

fn parse_witness(arg: &str) -> Result<Vec<u64>, String> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => arg.to_string(),
    };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("'{t}' is not a label")))
        .collect()
}

fn verify(d: &Dag, witness: &str) -> Result<Outcome, String> {
    let values = parse_witness(witness)?;
    let f = d.labeling_from_original(&values).map_err(|e| e.to_string())?;
    let ok = is_topological_additive(d, &f).map_err(|e| e.to_string())?;
    if ok {
        return Ok(Outcome::new(
            EXIT_OK,
            "valid",
            format!("valid topological additive {}-numbering\n", f.k()),
            json!({ "k": f.k(), "stats": {} }),
        ));
    }
    let s = neighbor_sums(d, &f).map_err(|e| e.to_string())?;
    let &(u, v) = d
        .arcs()
        .iter()
        .find(|&&(u, v)| s.get(u) >= s.get(v))
        .expect("some arc fails");
    let (iu, iv) = (d.original_id(u), d.original_id(v));
    Ok(Outcome::new(
        EXIT_NEGATIVE,
        "invalid",
        format!(
            "invalid: arc ({iu}, {iv}) has S({iu}) = {} >= S({iv}) = {}\n",
            s.get(u),
            s.get(v)
        ),
        json!({
            "arc": [iu, iv],
            "sums": [s.get(u), s.get(v)],
            "stats": {},
        }),
    ))
}
