//! Command-line front end. `run` parses arguments, executes one subcommand and
//! returns what the binary prints together with its exit code:
//! 0 pass, 1 check failed, 2 input error, 3 precondition failure.

mod problem;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

pub use problem::{ChartSpec, Kind, OneOrMany, Payload, Problem, ProblemFile, System, TupleSpec, Window};

use crate::euler_lagrange::{on_shell_point, on_shell_reduce, prolong_system, regularity_probe, ProlongedSystem};
use crate::expr::{zero_test, EquivConfig, Expr, Point};
use crate::forms::{interior, VectorField};
use crate::jet::{total_derivative, Chart};
use crate::noether::{
    fiber_projection, noether_direct, noether_inverse_ansatz, noether_inverse_hamiltonian, NoetherPair,
};
use crate::symmetry::{is_action_symmetry, is_d_symmetry, prolong_v, SymmetryReport};
use crate::verify::{conservation_report, integrate_hamiltonian, on_shell_residuals, DerivativeSource, VerifyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Failed(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Precondition(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "jetvar", version, about = "Variational calculus on jet spaces")]
pub struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Override the chart order k.
    #[arg(long = "chart-order", global = true, value_name = "K")]
    pub chart_order: Option<usize>,
    /// Seed for randomized equivalence checks and sampling.
    #[arg(long, global = true, default_value_t = EquivConfig::default().seed)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the Euler-Lagrange (source form) components.
    El { problem: PathBuf },
    /// Print the prolonged system and a regularity probe.
    Prolong {
        problem: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Check that a v-tuple prolongs to a symmetry.
    Symcheck {
        problem: PathBuf,
        /// JSON file with `{"v0": ..., "v": [...]}`; defaults to the problem's `symmetry`.
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Symmetry to constant of motion, or back.
    #[command(group(ArgGroup::new("mode").required(true).args(["direct", "inverse"])))]
    Noether {
        problem: PathBuf,
        #[arg(long)]
        direct: bool,
        #[arg(long)]
        inverse: bool,
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Integrate Hamilton's equations and check conservation.
    Verify {
        problem: PathBuf,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Result of a subcommand: text lines, the JSON document and the verdict.
pub struct Report {
    pub lines: Vec<String>,
    pub json: Value,
    pub pass: bool,
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput { code: 2, stdout: String::new(), stderr: text }
            } else {
                CliOutput { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok(r) => {
            let stdout = if cli.json { render_json(&r.json) } else { render_lines(&r.lines) };
            CliOutput { code: if r.pass { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err(e) => {
            let stdout = if cli.json {
                render_json(&json!({"error": {"code": e.code(), "message": e.to_string()}}))
            } else {
                String::new()
            };
            CliOutput { code: e.code(), stdout, stderr: format!("error: {e}\n") }
        }
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn render_lines(lines: &[String]) -> String {
    lines.iter().map(|l| format!("{l}\n")).collect()
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let cfg = EquivConfig::with_seed(cli.seed);
    let load = |p: &PathBuf| Problem::load(&ProblemFile::read(p)?, cli.chart_order);
    match &cli.command {
        Command::El { problem } => cmd_el(&load(problem)?),
        Command::Prolong { problem, depth } => cmd_prolong(&load(problem)?, *depth, cli.seed),
        Command::Symcheck { problem, field } => {
            let pr = load(problem)?;
            let spec = tuple_spec(&pr, field.as_ref())?;
            cmd_symcheck(&pr, &spec, &cfg)
        }
        Command::Noether { problem, direct, field, .. } => {
            let pr = load(problem)?;
            if *direct {
                let spec = tuple_spec(&pr, field.as_ref())?;
                cmd_noether_direct(&pr, &spec, &cfg)
            } else {
                cmd_noether_inverse(&pr, &cfg)
            }
        }
        Command::Verify { problem, t0, t1, dt, tol } => {
            let pr = load(problem)?;
            let w = Window {
                t0: t0.or(pr.window.t0),
                t1: t1.or(pr.window.t1),
                dt: dt.or(pr.window.dt),
                tol: tol.or(pr.window.tol),
            };
            cmd_verify(&pr, &w)
        }
    }
}

fn tuple_spec(pr: &Problem, field: Option<&PathBuf>) -> Result<TupleSpec, CliError> {
    match field {
        Some(path) => problem::read_tuple(path),
        None => pr
            .symmetry
            .clone()
            .ok_or_else(|| CliError::Input("no symmetry given: pass --field or set `symmetry`".into())),
    }
}

fn show(e: &Expr, chart: &Chart) -> String {
    e.display(chart).to_string()
}

fn show_field(x: &VectorField, chart: &Chart) -> String {
    x.display(chart).to_string()
}

pub fn cmd_el(pr: &Problem) -> Result<Report, CliError> {
    let s = pr.source()?;
    let sigma: Vec<String> = s.sigma.iter().map(|e| show(e, &pr.chart)).collect();
    let lines = sigma.iter().enumerate().map(|(i, e)| format!("sigma_{} = {e}", i + 1)).collect();
    Ok(Report {
        lines,
        json: json!({"command": "el", "order": s.order, "sigma": sigma}),
        pass: true,
    })
}

const REGULARITY_SAMPLES: usize = 10;

fn on_shell_samples(ps: &ProlongedSystem, chart: &Chart, count: usize, seed: u64) -> Option<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let free: Point = chart.coords().into_iter().map(|c| (c, rng.gen_range(-1.0..1.0))).collect();
            on_shell_point(ps, &free).ok()
        })
        .collect()
}

pub fn cmd_prolong(pr: &Problem, depth: Option<usize>, seed: u64) -> Result<Report, CliError> {
    let s = pr.source()?;
    let depth = depth.unwrap_or(pr.chart.k().saturating_sub(s.order));
    let ps = prolong_system(&s, depth);
    let top = ps.flat().map(Expr::order).max().unwrap_or(0);
    let chart = pr.chart.prolong(top.saturating_sub(pr.chart.k()));
    let mut lines = vec![format!("depth = {depth}")];
    let mut rows = Vec::new();
    for (l, level) in ps.rows.iter().enumerate() {
        for (i, e) in level.iter().enumerate() {
            let text = show(e, &chart);
            let head = if l == 0 { format!("sigma_{}", i + 1) } else { format!("(d/dt)^{l} sigma_{}", i + 1) };
            lines.push(format!("{head} = {text}"));
            rows.push(json!({"derivative": l, "component": i + 1, "expr": text}));
        }
    }
    let probe = on_shell_samples(&ps, &chart, REGULARITY_SAMPLES, seed)
        .and_then(|pts| regularity_probe(&ps, &chart.coords(), &pts).ok());
    let regularity = match &probe {
        Some(r) => {
            let min = r.ranks.iter().copied().min().unwrap_or(0);
            lines.push(format!(
                "regular: {} (minimum rank {min} of {} over {} on-shell samples)",
                r.regular,
                r.expected_rank,
                r.ranks.len()
            ));
            json!({"regular": r.regular, "expected_rank": r.expected_rank, "ranks": r.ranks})
        }
        None => {
            lines.push("regular: unknown (system is not in solved form)".into());
            Value::Null
        }
    };
    Ok(Report {
        lines,
        json: json!({"command": "prolong", "depth": depth, "rows": rows, "regularity": regularity}),
        pass: true,
    })
}

fn report_lines(name: &str, r: &SymmetryReport, chart: &Chart, lines: &mut Vec<String>) -> Value {
    let verdict = if r.pass { "pass" } else { "fail" };
    let prob = if r.probabilistic { ", probabilistic" } else { "" };
    lines.push(format!("{name}: {verdict} ({} checks{prob})", r.checked));
    let failures: Vec<Value> = r
        .failures
        .iter()
        .map(|f| {
            let v = show(&f.value, chart);
            lines.push(format!("  {} = {v}", f.label));
            json!({"label": f.label, "value": v})
        })
        .collect();
    json!({"pass": r.pass, "probabilistic": r.probabilistic, "checked": r.checked, "failures": failures})
}

pub fn cmd_symcheck(pr: &Problem, spec: &TupleSpec, cfg: &EquivConfig) -> Result<Report, CliError> {
    let chart = &pr.chart;
    let x = prolong_v(&pr.tuple(spec)?, chart).map_err(|e| CliError::Input(e.to_string()))?;
    let mut lines = vec![format!("X = {}", show_field(&x, chart))];
    let d = is_d_symmetry(&x, chart, cfg);
    let dj = report_lines("D-symmetry", &d, chart, &mut lines);
    let a = is_action_symmetry(&x, &pr.action_form(), chart, cfg).map_err(|e| CliError::Precondition(e.to_string()))?;
    let aj = report_lines("action symmetry", &a, chart, &mut lines);
    Ok(Report {
        lines,
        json: json!({"command": "symcheck", "field": show_field(&x, chart), "d_symmetry": dj, "action_symmetry": aj}),
        pass: d.pass && a.pass,
    })
}

fn on_shell_rate(pr: &Problem, conserved: &Expr) -> Result<Option<Expr>, CliError> {
    let s = pr.source()?;
    let ps = prolong_system(&s, pr.chart.k().saturating_sub(s.order));
    Ok(on_shell_reduce(&total_derivative(conserved), &ps).ok())
}

fn pair_block(pr: &Problem, pair: &NoetherPair, cfg: &EquivConfig, lines: &mut Vec<String>) -> Result<(Value, bool), CliError> {
    let chart = &pr.chart;
    let x = show_field(&pair.x, chart);
    let f = show(&pair.f, chart);
    let g: Vec<String> = pair.g.iter().map(|e| show(e, chart)).collect();
    let contraction = interior(&pair.x, &pair.a_o).map_err(|e| CliError::Precondition(e.to_string()))?.coefficient(&[]);
    let identity = zero_test(&(&contraction - pair.conserved()), cfg);
    let proj = show_field(&fiber_projection(&pair.x, chart), chart);
    let d = is_d_symmetry(&pair.x, chart, cfg).pass;
    let rate = on_shell_rate(pr, &pair.conserved())?;
    let rate_text = rate.as_ref().map(|r| show(r, chart));
    let rate_ok = rate.as_ref().map(|r| zero_test(r, cfg).equal);

    lines.push(format!("f = {f}"));
    lines.push(format!("X = {x}"));
    lines.push(format!("g = [{}]", g.join(", ")));
    lines.push(format!("interior(X, a_o) = {}", show(&contraction, chart)));
    lines.push(format!("fiber projection = {proj}"));
    lines.push(format!("D-symmetry: {}", if d { "pass" } else { "fail" }));
    lines.push(format!(
        "on-shell d/dt (f + sum g) = {}",
        rate_text.clone().unwrap_or_else(|| "unknown".into())
    ));
    let pass = identity.equal && rate_ok != Some(false);
    Ok((
        json!({
            "f": f,
            "x": x,
            "g": g,
            "interior": show(&contraction, chart),
            "identity_holds": identity.equal,
            "fiber_projection": proj,
            "d_symmetry": d,
            "on_shell_rate": rate_text,
        }),
        pass,
    ))
}

pub fn cmd_noether_direct(pr: &Problem, spec: &TupleSpec, cfg: &EquivConfig) -> Result<Report, CliError> {
    let chart = &pr.chart;
    let x = prolong_v(&pr.tuple(spec)?, chart).map_err(|e| CliError::Input(e.to_string()))?;
    let a_o = pr.pc_form()?;
    let f = noether_direct(&x, &a_o, chart, cfg).map_err(|e| problem::noether_error(e, chart))?;
    let pair = NoetherPair { x, f, g: vec![], a_o };
    let mut lines = vec![format!("a_o = {}", pair.a_o.display(chart))];
    let (block, pass) = pair_block(pr, &pair, cfg, &mut lines)?;
    Ok(Report {
        lines,
        json: json!({"command": "noether", "mode": "direct", "a_o": pair.a_o.display(chart).to_string(), "pairs": [block]}),
        pass,
    })
}

pub fn cmd_noether_inverse(pr: &Problem, cfg: &EquivConfig) -> Result<Report, CliError> {
    if pr.first_integrals.is_empty() {
        return Err(CliError::Input("no `first_integral` in the problem file".into()));
    }
    let chart = &pr.chart;
    let mut lines = Vec::new();
    let mut blocks = Vec::new();
    let mut pass = true;
    let (a_o, path) = match (&pr.system, pr.basis.is_empty()) {
        (System::Hamiltonian(hp), true) => (hp.alpha_h(), "hamiltonian"),
        (_, false) => (pr.pc_form()?, "ansatz"),
        _ => return Err(CliError::Precondition("the inverse map needs a hamiltonian problem or a `basis`".into())),
    };
    lines.push(format!("a_o = {}", a_o.display(chart)));
    for f in &pr.first_integrals {
        let pair = match (&pr.system, path) {
            (System::Hamiltonian(hp), "hamiltonian") => noether_inverse_hamiltonian(f, hp, cfg).map(Some),
            _ => noether_inverse_ansatz(f, &pr.source()?, &a_o, &pr.basis, chart, cfg),
        }
        .map_err(|e| problem::noether_error(e, chart))?;
        match pair {
            Some(pair) => {
                let (b, ok) = pair_block(pr, &pair, cfg, &mut lines)?;
                blocks.push(b);
                pass &= ok;
            }
            None => {
                let f = show(f, chart);
                lines.push(format!("f = {f}"));
                lines.push("no symmetry with coefficients in the basis span".into());
                blocks.push(json!({"f": f, "x": Value::Null}));
                pass = false;
            }
        }
    }
    Ok(Report {
        lines,
        json: json!({"command": "noether", "mode": "inverse", "path": path, "a_o": a_o.display(chart).to_string(), "pairs": blocks}),
        pass,
    })
}

fn verify_error(e: VerifyError) -> CliError {
    match e {
        VerifyError::Eval(_) => CliError::Precondition(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

pub const DEFAULT_WINDOW: Window = Window {
    t0: Some(0.0),
    t1: Some(10.0),
    dt: Some(1e-3),
    tol: Some(1e-8),
};

pub fn cmd_verify(pr: &Problem, w: &Window) -> Result<Report, CliError> {
    let System::Hamiltonian(hp) = &pr.system else {
        return Err(CliError::Precondition("numeric verification needs a hamiltonian problem".into()));
    };
    let init = pr
        .initial
        .as_ref()
        .ok_or_else(|| CliError::Input("no `initial` state in the problem file".into()))?;
    let pick = |a: Option<f64>, d: Option<f64>| a.or(d).expect("default window is complete");
    let (t0, t1) = (pick(w.t0, DEFAULT_WINDOW.t0), pick(w.t1, DEFAULT_WINDOW.t1));
    let (dt, tol) = (pick(w.dt, DEFAULT_WINDOW.dt), pick(w.tol, DEFAULT_WINDOW.tol));
    let traj = integrate_hamiltonian(hp, init, t0, t1, dt).map_err(verify_error)?;
    let chart = &pr.chart;
    let mut lines = vec![format!(
        "trajectory: {}, {} samples, step {:.3e}, t in [{t0}, {t1}]",
        traj.meta.method,
        traj.len(),
        traj.meta.step
    )];
    let mut pass = true;
    let mut checks = Vec::new();
    let mut quantities = vec![("H".to_string(), hp.h().clone())];
    quantities.extend(pr.first_integrals.iter().map(|f| (show(f, chart), f.clone())));
    for (name, f) in &quantities {
        let r = conservation_report(f, &traj, tol).map_err(verify_error)?;
        pass &= r.pass;
        lines.push(format!(
            "conserved {name}: max drift {:.3e} (tol {tol:e}) {}",
            r.max_drift,
            if r.pass { "pass" } else { "fail" }
        ));
        checks.push(json!({"quantity": name, "max_drift": r.max_drift, "tol": tol, "pass": r.pass}));
    }
    let rows: Vec<Expr> = hp.full_prolongation().flat().cloned().collect();
    let res = on_shell_residuals(&rows, hp, &traj, DerivativeSource::RightHandSide).map_err(verify_error)?;
    let res_pass = res.overall() <= tol;
    pass &= res_pass;
    let per_row: Vec<String> = res.max.iter().map(|m| format!("{m:.3e}")).collect();
    lines.push(format!(
        "on-shell residuals (right-hand side): [{}] {}",
        per_row.join(", "),
        if res_pass { "pass" } else { "fail" }
    ));
    Ok(Report {
        lines,
        json: json!({
            "command": "verify",
            "trajectory": {"method": traj.meta.method, "samples": traj.len(), "step": traj.meta.step, "t0": t0, "t1": t1},
            "conservation": checks,
            "residuals": {"source": res.source, "max": res.max, "pass": res_pass},
            "pass": pass,
        }),
        pass,
    })
}
