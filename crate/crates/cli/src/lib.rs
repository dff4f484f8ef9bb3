//! File formats and command dispatch for the `qiqp` binary.
//!
//! An IQP file lists its sections in order, each header on its own line:
//!
//! ```text
//! IQP
//! VARS 2
//! Q            # VARS rows of VARS integers
//! 1 0
//! 0 1
//! QLIN         # optional, one row of VARS integers
//! -4 0
//! QCONST       # optional, one integer
//! 3
//! A            # any number of rows of VARS integers
//! -1 0
//! B            # one integer per row of A, across any number of lines
//! -3
//! END
//! ```
//!
//! A graph file is `GRAPH`, `N <vertices>`, `EDGES <count>`, then one
//! `u v` pair per line with 0-based endpoints, optionally closed by `END`.

use std::fmt::Write as _;

use clap::{Parser, Subcommand};
use num_traits::One;
use qiqp::ola::{solve_ola, Graph, MAX_COVER};
use qiqp::oracle::{brute_force_iqp, brute_force_ola, Box};
use qiqp::solver::{self, SearchStats, SolverConfig};
use qiqp::unbounded::{decide, DecideConfig};
use qiqp::{Int, Iqp, Matrix, Rat, SolveOutcome};

/// Environment variable read when `--node-budget` is absent.
pub const NODE_BUDGET_ENV: &str = "QIQP_NODE_BUDGET";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] qiqp::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(qiqp::Error::ResourceExhausted { .. }) => 3,
            CliError::Solver(_) => 1,
            _ => 2,
        }
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { line, message: message.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty())
        .collect()
}

fn integer(line: usize, token: &str) -> Result<Int, CliError> {
    token.parse().map_err(|_| parse_error(line, format!("expected an integer, found `{token}`")))
}

fn integers(line: usize, tokens: &[&str]) -> Result<Vec<Int>, CliError> {
    tokens.iter().map(|t| integer(line, t)).collect()
}

struct Cursor<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines = content_lines(text);
        let last_line = text.lines().count().max(1);
        Cursor { lines, pos: 0, last_line }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.lines.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), CliError> {
        let item = self.lines.get(self.pos).cloned().ok_or_else(|| parse_error(self.last_line, format!("missing {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    fn keyword(&mut self, word: &str) -> Result<usize, CliError> {
        let (line, tokens) = self.next(word)?;
        if tokens != [word] {
            return Err(parse_error(line, format!("expected `{word}`")));
        }
        Ok(line)
    }

    fn at_keyword(&self, word: &str) -> bool {
        self.peek().is_some_and(|(_, t)| t[0] == word)
    }

    fn counted(&mut self, word: &str) -> Result<(usize, usize), CliError> {
        let (line, tokens) = self.next(word)?;
        match tokens.as_slice() {
            [w, v] if *w == word => v.parse().map(|v| (line, v)).map_err(|_| parse_error(line, format!("bad {word} count `{v}`"))),
            _ => Err(parse_error(line, format!("expected `{word} <count>`"))),
        }
    }

    fn row(&mut self, what: &str, width: usize) -> Result<Vec<Int>, CliError> {
        let (line, tokens) = self.next(what)?;
        if tokens.len() != width {
            return Err(parse_error(line, format!("{what} row has {} entries, expected {width}", tokens.len())));
        }
        integers(line, &tokens)
    }
}

/// Parse the IQP text format.
pub fn parse_iqp(text: &str) -> Result<Iqp, CliError> {
    let mut cur = Cursor::new(text);
    cur.keyword("IQP")?;
    let (_, n) = cur.counted("VARS")?;
    cur.keyword("Q")?;
    let q: Vec<Vec<Int>> = (0..n).map(|_| cur.row("Q", n)).collect::<Result<_, _>>()?;
    let linear = if cur.at_keyword("QLIN") {
        cur.keyword("QLIN")?;
        Some(cur.row("QLIN", n)?)
    } else {
        None
    };
    let constant = if cur.at_keyword("QCONST") {
        cur.keyword("QCONST")?;
        Some(cur.row("QCONST", 1)?.remove(0))
    } else {
        None
    };
    let a_line = cur.keyword("A")?;
    let mut a = Vec::new();
    while cur.peek().is_some() && !cur.at_keyword("B") {
        a.push(cur.row("A", n)?);
    }
    let b_line = cur.keyword("B")?;
    let mut b = Vec::new();
    while cur.peek().is_some() && !cur.at_keyword("END") {
        let (line, tokens) = cur.next("B")?;
        b.extend(integers(line, &tokens)?);
    }
    cur.keyword("END")?;
    if let Some((line, _)) = cur.peek() {
        return Err(parse_error(*line, "content after END"));
    }
    if b.len() != a.len() {
        return Err(parse_error(b_line, format!("B has {} entries but A has {} rows", b.len(), a.len())));
    }
    let bad = |e: qiqp::Error| parse_error(a_line, e.to_string());
    let mut iqp = Iqp::new(Matrix::from_rows(n, q).map_err(bad)?, Matrix::from_rows(n, a).map_err(bad)?, b).map_err(bad)?;
    if let Some(l) = linear {
        iqp = iqp.with_linear(l).map_err(bad)?;
    }
    if let Some(c) = constant {
        iqp = iqp.with_constant(c);
    }
    Ok(iqp)
}

fn join(v: &[Int]) -> String {
    v.iter().map(Int::to_string).collect::<Vec<_>>().join(" ")
}

/// Canonical text for an IQP; [`parse_iqp`] reads it back unchanged.
pub fn emit_iqp(iqp: &Iqp) -> String {
    let mut out = format!("IQP\nVARS {}\nQ\n", iqp.n());
    for row in iqp.q.row_iter() {
        writeln!(out, "{}", join(row)).unwrap();
    }
    if let Some(l) = &iqp.linear {
        writeln!(out, "QLIN\n{}", join(l)).unwrap();
    }
    if let Some(c) = &iqp.constant {
        writeln!(out, "QCONST\n{c}").unwrap();
    }
    out.push_str("A\n");
    for row in iqp.a.row_iter() {
        writeln!(out, "{}", join(row)).unwrap();
    }
    out.push_str("B\n");
    for v in &iqp.b {
        writeln!(out, "{v}").unwrap();
    }
    out.push_str("END\n");
    out
}

/// Parse the graph text format.
pub fn parse_graph(text: &str) -> Result<Graph, CliError> {
    let mut cur = Cursor::new(text);
    cur.keyword("GRAPH")?;
    let (_, n) = cur.counted("N")?;
    let (count_line, m) = cur.counted("EDGES")?;
    let mut edges = Vec::with_capacity(m);
    while cur.peek().is_some() && !cur.at_keyword("END") {
        let (line, tokens) = cur.next("edge")?;
        let [u, v] = tokens.as_slice() else {
            return Err(parse_error(line, "an edge line holds two endpoints"));
        };
        let endpoint = |t: &str| t.parse::<usize>().map_err(|_| parse_error(line, format!("bad endpoint `{t}`")));
        let (u, v) = (endpoint(u)?, endpoint(v)?);
        Graph::new(n, &[(u, v)]).map_err(|e| parse_error(line, e.to_string()))?;
        if edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)) {
            return Err(parse_error(line, format!("duplicate edge {u} {v}")));
        }
        edges.push((u, v));
    }
    if cur.at_keyword("END") {
        cur.keyword("END")?;
    }
    if let Some((line, _)) = cur.peek() {
        return Err(parse_error(*line, "content after END"));
    }
    if edges.len() != m {
        return Err(parse_error(count_line, format!("EDGES says {m} but {} edge lines follow", edges.len())));
    }
    Graph::new(n, &edges).map_err(|e| parse_error(count_line, e.to_string()))
}

#[derive(Debug, Parser)]
#[command(name = "qiqp", about = "Exact integer quadratic programming", version)]
pub struct Cli {
    /// Append search counters to the report.
    #[arg(long, global = true)]
    pub stats: bool,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    pub parallel: usize,
    /// Cap on search nodes; falls back to QIQP_NODE_BUDGET.
    #[arg(long, global = true, value_name = "N")]
    pub node_budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimise with the branching solver.
    Solve { file: String },
    /// Classify as infeasible, unbounded or optimal.
    Status { file: String },
    /// Minimise by enumerating the box [lo, hi]^n.
    Brute {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        lo: i64,
        #[arg(long, allow_hyphen_values = true)]
        hi: i64,
    },
    /// Optimal linear arrangement via the cover parameterization.
    Ola {
        file: String,
        /// Largest vertex cover to accept.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Optimal linear arrangement by trying every permutation.
    OlaBrute { file: String },
}

/// A finished command: the report text and the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub code: i32,
}

fn render(v: &Rat) -> String {
    if v.denom().is_one() { v.numer().to_string() } else { format!("{}/{}", v.numer(), v.denom()) }
}

fn stats_line(nodes: u64, leaves: u64) -> String {
    format!("STATS nodes={nodes} leaves={leaves}\n")
}

fn outcome_report(outcome: &SolveOutcome, stats: Option<&SearchStats>) -> Outcome {
    let (status, point, code) = match outcome {
        SolveOutcome::Infeasible => ("INFEASIBLE", None, 0),
        SolveOutcome::Unbounded => ("UNBOUNDED", None, 0),
        SolveOutcome::Optimal { x, value } => ("OPTIMAL", Some((x, value)), 0),
        SolveOutcome::FeasibleOnly { x, value } => ("FEASIBLE", Some((x, value)), 3),
    };
    let mut report = format!("STATUS {status}\n");
    if let Some((x, value)) = point {
        writeln!(report, "X {}\nOBJ {}", join(x), render(value)).unwrap();
    }
    if let Some(s) = stats {
        report.push_str(&stats_line(s.nodes, s.leaves));
    }
    Outcome { report, code }
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))
}

fn solver_config(cli: &Cli) -> Result<SolverConfig, CliError> {
    let mut config = SolverConfig::default().with_workers(cli.parallel);
    let budget = match cli.node_budget {
        Some(b) => Some(b),
        None => match std::env::var(NODE_BUDGET_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Usage(format!("{NODE_BUDGET_ENV} must be an integer")))?),
            Err(_) => None,
        },
    };
    if let Some(b) = budget {
        config = config.with_node_budget(b);
    }
    Ok(config)
}

/// Run a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let config = solver_config(cli)?;
    match &cli.command {
        Command::Solve { file } => {
            let report = solver::solve(&parse_iqp(&read(file)?)?, &config)?;
            Ok(outcome_report(&report.outcome, cli.stats.then_some(&report.stats)))
        }
        Command::Status { file } => {
            let decide_config = DecideConfig { solver: config, ..DecideConfig::default() };
            let report = decide(&parse_iqp(&read(file)?)?, &decide_config)?;
            Ok(outcome_report(&report.outcome, cli.stats.then_some(&report.stats)))
        }
        Command::Brute { file, lo, hi } => {
            let iqp = parse_iqp(&read(file)?)?;
            let bx = Box::cube(iqp.n(), *lo, *hi).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(outcome_report(&brute_force_iqp(&iqp, &bx)?, None))
        }
        Command::Ola { file, k } => {
            let g = parse_graph(&read(file)?)?;
            let Some(sol) = solve_ola(&g, k.unwrap_or(MAX_COVER), &config)? else {
                return Ok(Outcome { report: "STATUS UNKNOWN\n".into(), code: 3 });
            };
            let mut report = arrangement_report(sol.arrangement.positions(), sol.cost);
            if cli.stats {
                report.push_str(&stats_line(sol.nodes, 0));
            }
            Ok(Outcome { report, code: 0 })
        }
        Command::OlaBrute { file } => {
            let (arrangement, cost) = brute_force_ola(&parse_graph(&read(file)?)?)?;
            Ok(Outcome { report: arrangement_report(arrangement.positions(), cost), code: 0 })
        }
    }
}

fn arrangement_report(positions: &[usize], cost: u64) -> String {
    let x: Vec<String> = positions.iter().map(usize::to_string).collect();
    format!("STATUS OPTIMAL\nX {}\nOBJ {cost}\n", x.join(" "))
}

/// Parse `args` (program name first) and run. Usage errors print help text
/// and exit with 2, resource limits yield `STATUS UNKNOWN` with 3.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { report: e.render().to_string(), code };
        }
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(CliError::Solver(qiqp::Error::ResourceExhausted { .. })) => Outcome { report: "STATUS UNKNOWN\n".into(), code: 3 },
        Err(e) => Outcome { report: format!("error: {e}\n"), code: e.exit_code() },
    }
}
