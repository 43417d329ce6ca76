//! Symmetries of the holonomic distribution and of actions.

use thiserror::Error;

use crate::euler_lagrange::{source_of_alpha, vertical_part, ElError, SourceForm};
use crate::expr::{zero_test, CoordId, EquivConfig, Expr};
use crate::forms::{
    exterior_d, interior, is_holonomic_with, lie_bracket, lie_derivative, DiffForm, FormError,
    VectorField,
};
use crate::jet::{holonomic_frame, total_derivative, total_derivative_field, truncated_total_derivative, Chart};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    El(#[from] ElError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Base data `(v^0, v^1, ..., v^n)` of a D-symmetry. No component may depend
/// on a top-order coordinate of the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct VTuple {
    pub v0: Expr,
    pub v: Vec<Expr>,
}

impl VTuple {
    pub fn new(v0: Expr, v: Vec<Expr>, chart: &Chart) -> Result<VTuple, SymmetryError> {
        let t = VTuple { v0, v };
        t.check(chart)?;
        Ok(t)
    }

    fn check(&self, chart: &Chart) -> Result<(), SymmetryError> {
        if self.v.len() != chart.n() {
            return Err(SymmetryError::InvariantViolation(format!(
                "expected {} fiber components, got {}",
                chart.n(),
                self.v.len()
            )));
        }
        for e in std::iter::once(&self.v0).chain(&self.v) {
            if let Some(c) = e.coords().into_iter().find(|c| c.order() >= chart.k() && *c != CoordId::Time) {
                return Err(SymmetryError::InvariantViolation(format!(
                    "component {e} depends on {c}, of order >= {}",
                    chart.k()
                )));
            }
        }
        Ok(())
    }

    /// `(dt(X), X^{y^i})` of a field.
    pub fn of_field(x: &VectorField, chart: &Chart) -> VTuple {
        VTuple {
            v0: x.component(CoordId::Time),
            v: (1..=chart.n()).map(|i| x.component(CoordId::fiber(i, 0))).collect(),
        }
    }
}

/// `X_v` with `v^i_(a) = (d/dt)^a (v^i - y^i_(1) v^0) + y^i_(a+1) v^0`, the
/// truncated `d/dt` and `y^i_(k+1) = 0`.
pub fn prolong_v(v: &VTuple, chart: &Chart) -> Result<VectorField, SymmetryError> {
    v.check(chart)?;
    let mut comps = vec![(CoordId::Time, v.v0.clone())];
    for (idx, vi) in v.v.iter().enumerate() {
        let i = idx + 1;
        comps.push((CoordId::fiber(i, 0), vi.clone()));
        let mut q = vi - Expr::y(i, 1) * &v.v0;
        for a in 1..=chart.k() {
            q = truncated_total_derivative(&q, chart);
            let comp = if a < chart.k() {
                &q + Expr::y(i, a + 1) * &v.v0
            } else {
                q.clone()
            };
            comps.push((CoordId::fiber(i, a), comp));
        }
    }
    Ok(VectorField::from_components(comps))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub label: String,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub pass: bool,
    /// Some zero verdict came from random sampling.
    pub probabilistic: bool,
    pub checked: usize,
    /// Residuals that are not zero.
    pub failures: Vec<Residual>,
}

impl SymmetryReport {
    fn from_residuals(residuals: Vec<Residual>, cfg: &EquivConfig) -> SymmetryReport {
        let mut probabilistic = false;
        let mut failures = Vec::new();
        let checked = residuals.len();
        for r in residuals {
            let z = zero_test(&r.value, cfg);
            probabilistic |= z.probabilistic;
            if !z.equal {
                failures.push(r);
            }
        }
        SymmetryReport {
            pass: failures.is_empty(),
            probabilistic,
            checked,
            failures,
        }
    }
}

fn frame_with_labels(chart: &Chart) -> Vec<(String, VectorField)> {
    let (d, tops) = holonomic_frame(chart);
    let mut out = vec![("d/dt".to_string(), d)];
    for (j, g) in tops.into_iter().enumerate() {
        let name = chart.coord_name(CoordId::fiber(j + 1, chart.k()));
        out.push((format!("d/d{name}"), g));
    }
    out
}

/// Residuals `omega^i_(a)([X, G])` for every frame generator `G` of the
/// holonomic distribution and `0 <= a <= k - 1`.
pub fn is_d_symmetry(x: &VectorField, chart: &Chart, cfg: &EquivConfig) -> SymmetryReport {
    let mut residuals = Vec::new();
    for (gname, g) in frame_with_labels(chart) {
        let b = lie_bracket(x, &g);
        let bt = b.component(CoordId::Time);
        for a in 0..chart.k() {
            for i in 1..=chart.n() {
                let value = b.component(CoordId::fiber(i, a)) - Expr::y(i, a + 1) * &bt;
                let w = chart.coord_name(CoordId::fiber(i, a));
                residuals.push(Residual {
                    label: format!("omega[{w}]([X, {gname}])"),
                    value,
                });
            }
        }
    }
    SymmetryReport::from_residuals(residuals, cfg)
}

/// Residuals `(L_X a)(G)` for the frame generators `G`.
pub fn is_action_symmetry(
    x: &VectorField,
    a: &DiffForm,
    chart: &Chart,
    cfg: &EquivConfig,
) -> Result<SymmetryReport, SymmetryError> {
    if a.degree() != 1 {
        return Err(FormError::WrongDegree {
            expected: 1,
            got: a.degree(),
        }
        .into());
    }
    let lx = lie_derivative(x, a);
    let residuals = frame_with_labels(chart)
        .into_iter()
        .map(|(gname, g)| Residual {
            label: format!("(L_X alpha)({gname})"),
            value: interior(&g, &lx).expect("1-form").coefficient(&[]),
        })
        .collect();
    Ok(SymmetryReport::from_residuals(residuals, cfg))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PcReport {
    pub pass: bool,
    pub probabilistic: bool,
    pub residual: Expr,
}

/// Residual `d/dt(a_o(X_v)) - sigma(d/dt, X_v)`.
pub fn check_pc_criterion(
    v: &VTuple,
    a_o: &DiffForm,
    s: &SourceForm,
    chart: &Chart,
    cfg: &EquivConfig,
) -> Result<PcReport, SymmetryError> {
    let x = prolong_v(v, chart)?;
    let ax = interior(&x, a_o)?.coefficient(&[]);
    let d = total_derivative_field(chart);
    let residual = total_derivative(&ax) - s.contract(&d, &x);
    let z = zero_test(&residual, cfg);
    Ok(PcReport {
        pass: z.equal,
        probabilistic: z.probabilistic,
        residual,
    })
}

/// `d a - sigma` is holonomic, where `sigma` is the source form of `[a]`.
pub fn is_poincare_cartan_type(a: &DiffForm, chart: &Chart, cfg: &EquivConfig) -> Result<bool, SymmetryError> {
    let s = source_of_alpha(a, chart)?;
    let rest = exterior_d(a) - s.as_two_form();
    Ok(is_holonomic_with(&rest, chart, cfg).equal)
}

/// `sigma(X, d/dt) = sum sigma_i omega^i_(0)(X)` vanishes.
pub fn is_trivial_symmetry(x: &VectorField, s: &SourceForm, cfg: &EquivConfig) -> bool {
    let value: Expr = s
        .sigma
        .iter()
        .enumerate()
        .map(|(i, si)| si * vertical_part(x, i + 1))
        .sum();
    zero_test(&value, cfg).equal
}
