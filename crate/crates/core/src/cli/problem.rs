use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::euler_lagrange::{el_source, source_of_alpha, SourceForm};
use crate::expr::{parse_expr, Expr};
use crate::forms::DiffForm;
use crate::jet::{contact_form, Chart};
use crate::noether::{poincare_cartan_form, HamiltonianProblem, NoetherError};
use crate::symmetry::VTuple;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Lagrangian,
    Hamiltonian,
    OneForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_dof: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

/// Expression text, or `(coefficient, coframe element)` pairs where the
/// element is `dt`, `d<coordinate>` or `omega(<coordinate>)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Text(String),
    Terms(Vec<(String, String)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleSpec {
    pub v0: String,
    pub v: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub dt: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    pub chart: ChartSpec,
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<TupleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_integral: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("problem file: {e}")))
    }

    pub fn read(path: &Path) -> Result<ProblemFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

pub fn read_tuple(path: &Path) -> Result<TupleSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("field file: {e}")))
}

#[derive(Clone, Debug)]
pub enum System {
    Lagrangian(Expr),
    Hamiltonian(HamiltonianProblem),
    OneForm(DiffForm),
}

/// A problem file with every payload parsed under its chart.
#[derive(Clone, Debug)]
pub struct Problem {
    pub chart: Chart,
    pub system: System,
    pub symmetry: Option<TupleSpec>,
    pub first_integrals: Vec<Expr>,
    pub basis: Vec<Expr>,
    pub initial: Option<Vec<f64>>,
    pub window: Window,
}

fn parse_in(text: &str, chart: &Chart, what: &str) -> Result<Expr, CliError> {
    parse_expr(text, chart).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

fn parse_form(terms: &[(String, String)], chart: &Chart) -> Result<DiffForm, CliError> {
    let mut a = DiffForm::zero(1);
    for (coef, elem) in terms {
        let c = parse_in(coef, chart, "1-form coefficient")?;
        let elem = elem.trim();
        let unknown = || CliError::Input(format!("unknown coframe element `{elem}`"));
        let basis = if elem == "dt" {
            DiffForm::dt()
        } else if let Some(name) = elem.strip_prefix("omega(").and_then(|r| r.strip_suffix(')')) {
            let y = chart.resolve(name.trim()).ok_or_else(unknown)?;
            let i = y.index().ok_or_else(unknown)?;
            contact_form(i, y.order(), chart).map_err(|_| unknown())?
        } else if let Some(name) = elem.strip_prefix('d') {
            DiffForm::differential(chart.resolve(name).ok_or_else(unknown)?)
        } else {
            return Err(unknown());
        };
        a = a + basis.scale(&c);
    }
    Ok(a)
}

impl Problem {
    pub fn load(file: &ProblemFile, chart_order: Option<usize>) -> Result<Problem, CliError> {
        let k = chart_order.or(file.chart.k);
        let chart = match (file.kind, file.chart.n, file.chart.n_dof) {
            (Kind::Hamiltonian, None, Some(d)) => {
                Chart::hamiltonian(d, k.unwrap_or(HamiltonianProblem::ORDER))
            }
            (Kind::Hamiltonian, ..) => return Err(CliError::Input("a hamiltonian problem needs `chart.n_dof` only".into())),
            (_, Some(n), None) => Chart::new(n, k.ok_or_else(|| CliError::Input("`chart.k` is required".into()))?),
            (_, None, Some(d)) => Chart::hamiltonian(d, k.ok_or_else(|| CliError::Input("`chart.k` is required".into()))?),
            _ => return Err(CliError::Input("give exactly one of `chart.n` and `chart.n_dof`".into())),
        }
        .map_err(|e| CliError::Input(e.to_string()))?;

        let system = match (&file.kind, &file.payload) {
            (Kind::Lagrangian, Payload::Text(s)) => System::Lagrangian(parse_in(s, &chart, "Lagrangian")?),
            (Kind::Hamiltonian, Payload::Text(s)) => {
                let h = parse_in(s, &chart, "Hamiltonian")?;
                let hp = HamiltonianProblem::with_order(chart.n() / 2, chart.k(), h).map_err(|e| noether_error(e, &chart))?;
                System::Hamiltonian(hp)
            }
            (Kind::OneForm, Payload::Terms(t)) => System::OneForm(parse_form(t, &chart)?),
            (Kind::OneForm, Payload::Text(_)) => {
                return Err(CliError::Input("a one_form payload is a list of [coefficient, element] pairs".into()))
            }
            (_, Payload::Terms(_)) => return Err(CliError::Input("payload must be expression text".into())),
        };
        let first_integrals = match &file.first_integral {
            None => vec![],
            Some(OneOrMany::One(s)) => vec![parse_in(s, &chart, "first integral")?],
            Some(OneOrMany::Many(v)) => v
                .iter()
                .map(|s| parse_in(s, &chart, "first integral"))
                .collect::<Result<_, _>>()?,
        };
        let basis = file
            .basis
            .iter()
            .flatten()
            .map(|s| parse_in(s, &chart, "basis"))
            .collect::<Result<_, _>>()?;
        Ok(Problem {
            chart,
            system,
            symmetry: file.symmetry.clone(),
            first_integrals,
            basis,
            initial: file.initial.clone(),
            window: file.window.clone().unwrap_or_default(),
        })
    }

    pub fn tuple(&self, spec: &TupleSpec) -> Result<VTuple, CliError> {
        let v0 = parse_in(&spec.v0, &self.chart, "v0")?;
        let v = spec
            .v
            .iter()
            .map(|s| parse_in(s, &self.chart, "v"))
            .collect::<Result<_, _>>()?;
        VTuple::new(v0, v, &self.chart).map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn source(&self) -> Result<SourceForm, CliError> {
        let s = match &self.system {
            System::Lagrangian(l) => el_source(l, &self.chart),
            System::Hamiltonian(hp) => Ok(hp.source()),
            System::OneForm(a) => source_of_alpha(a, &self.chart),
        };
        s.map_err(|e| CliError::Precondition(e.to_string()))
    }

    /// The 1-form whose action is varied.
    pub fn action_form(&self) -> DiffForm {
        match &self.system {
            System::Lagrangian(l) => DiffForm::dt().scale(l),
            System::Hamiltonian(hp) => hp.alpha_h(),
            System::OneForm(a) => a.clone(),
        }
    }

    /// A Poincare-Cartan representative used by the Noether commands.
    pub fn pc_form(&self) -> Result<DiffForm, CliError> {
        match &self.system {
            System::Lagrangian(l) => poincare_cartan_form(l, &self.chart).map_err(|e| noether_error(e, &self.chart)),
            System::Hamiltonian(hp) => Ok(hp.alpha_h()),
            System::OneForm(a) => Ok(a.clone()),
        }
    }
}

pub(crate) fn noether_error(e: NoetherError, chart: &Chart) -> CliError {
    match e {
        NoetherError::NotASymmetry(_) => CliError::Failed(e.to_string()),
        NoetherError::NotFirstIntegral(b) => {
            CliError::Precondition(format!("not a first integral: {{f, H}} = {}", b.display(chart)))
        }
        _ => CliError::Precondition(e.to_string()),
    }
}
