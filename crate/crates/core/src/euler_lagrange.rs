//! Lagrangians, source forms and their prolongations, regularity and on-shell
//! reduction.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{CoordId, EvalError, Expr, Point};
use crate::forms::{DiffForm, FormError, VectorField};
use crate::jet::{total_derivative, Chart};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElError {
    #[error("Lagrangian of order {order} needs a chart of order {needed}, have {have}")]
    OrderBudgetExceeded {
        order: usize,
        needed: usize,
        have: usize,
    },
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("sample {index} is off shell (row residual {residual:e})")]
    SampleOffShell { index: usize, residual: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("row {row} cannot be solved for a top-order coordinate: {reason}")]
    NotSolvable { row: usize, reason: String },
}

/// Components `sigma_i` of `sigma = sigma_i omega^i_(0) ^ dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceForm {
    pub sigma: Vec<Expr>,
    /// Highest jet order among the components.
    pub order: usize,
}

impl SourceForm {
    pub fn new(sigma: Vec<Expr>) -> SourceForm {
        let order = sigma.iter().map(Expr::order).max().unwrap_or(0);
        SourceForm { sigma, order }
    }

    pub fn is_zero(&self) -> bool {
        self.sigma.iter().all(Expr::is_zero)
    }

    /// `sum sigma_i dy^i_(0) ^ dt`.
    pub fn as_two_form(&self) -> DiffForm {
        let mut out = DiffForm::zero(2);
        for (i, s) in self.sigma.iter().enumerate() {
            out = out + DiffForm::monomial(s.clone(), &[CoordId::fiber(i + 1, 0), CoordId::Time]);
        }
        out
    }

    /// `sigma(X, Y) = sum sigma_i (omega^i_(0)(X) dt(Y) - omega^i_(0)(Y) dt(X))`.
    pub fn contract(&self, x: &VectorField, y: &VectorField) -> Expr {
        let (xt, yt) = (x.component(CoordId::Time), y.component(CoordId::Time));
        self.sigma
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let i = i + 1;
                let wx = vertical_part(x, i);
                let wy = vertical_part(y, i);
                s * (wx * &yt - wy * &xt)
            })
            .sum()
    }
}

/// `omega^i_(0)(X) = X^{y^i} - y^i_(1) X^t`.
pub fn vertical_part(x: &VectorField, i: usize) -> Expr {
    x.component(CoordId::fiber(i, 0)) - Expr::y(i, 1) * x.component(CoordId::Time)
}

/// The dt-coefficient of the contact decomposition of `a` pulled back one
/// order up: `L = a_t + sum a_{i(a)} y^i_(a+1)`.
pub fn lagrangian_of(a: &DiffForm) -> Result<Expr, ElError> {
    if a.degree() != 1 {
        return Err(FormError::WrongDegree {
            expected: 1,
            got: a.degree(),
        }
        .into());
    }
    Ok(a.terms()
        .map(|(idx, c)| match idx[0].raised(1) {
            None => c.clone(),
            Some(next) => c * Expr::coord(next),
        })
        .sum())
}

/// Euler-Lagrange expressions `sigma_i = sum_a (-1)^a (d/dt)^a dL/dy^i_(a)`
/// with the prolonging total derivative.
pub fn el_source(l: &Expr, chart: &Chart) -> Result<SourceForm, ElError> {
    let r = l.order();
    if 2 * r > chart.k() {
        return Err(ElError::OrderBudgetExceeded {
            order: r,
            needed: 2 * r,
            have: chart.k(),
        });
    }
    let sigma = (1..=chart.n())
        .map(|i| {
            (0..=r)
                .map(|a| {
                    let mut term = l.partial(CoordId::fiber(i, a));
                    for _ in 0..a {
                        term = total_derivative(&term);
                    }
                    if a % 2 == 1 {
                        -term
                    } else {
                        term
                    }
                })
                .sum()
        })
        .collect();
    Ok(SourceForm::new(sigma))
}

pub fn source_of_alpha(a: &DiffForm, chart: &Chart) -> Result<SourceForm, ElError> {
    el_source(&lagrangian_of(a)?, chart)
}

/// Rows `(d/dt)^l sigma_i` for `l = 0..=depth`; `rows[l][i - 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProlongedSystem {
    pub rows: Vec<Vec<Expr>>,
    pub depth: usize,
}

impl ProlongedSystem {
    /// Rows in stacking order: all components at depth 0, then depth 1, ...
    pub fn flat(&self) -> impl Iterator<Item = &Expr> {
        self.rows.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn prolong_system(s: &SourceForm, depth: usize) -> ProlongedSystem {
    let mut rows = vec![s.sigma.clone()];
    for _ in 0..depth {
        let next = rows.last().unwrap().iter().map(total_derivative).collect();
        rows.push(next);
    }
    ProlongedSystem { rows, depth }
}

pub const FD_STEP: f64 = 1e-6;
pub const RANK_THRESHOLD: f64 = 1e-8;
pub const ON_SHELL_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub ranks: Vec<usize>,
    pub expected_rank: usize,
    pub regular: bool,
    pub no_samples: bool,
}

/// Numeric rank of the Jacobian of the stacked rows with respect to
/// `coords`, at each sample.
pub fn regularity_probe(
    ps: &ProlongedSystem,
    coords: &[CoordId],
    samples: &[Point],
) -> Result<RegularityReport, ElError> {
    let rows: Vec<&Expr> = ps.flat().collect();
    let mut ranks = Vec::with_capacity(samples.len());
    for (index, pt) in samples.iter().enumerate() {
        for r in &rows {
            let v = r.eval(pt)?;
            if v.abs() > ON_SHELL_TOLERANCE {
                return Err(ElError::SampleOffShell { index, residual: v });
            }
        }
        let mut jac = DMatrix::<f64>::zeros(rows.len(), coords.len());
        for (j, c) in coords.iter().enumerate() {
            let x = *pt.get(c).ok_or(EvalError::MissingAssignment(*c))?;
            let mut up = pt.clone();
            up.insert(*c, x + FD_STEP);
            let mut down = pt.clone();
            down.insert(*c, x - FD_STEP);
            for (i, r) in rows.iter().enumerate() {
                jac[(i, j)] = (r.eval(&up)? - r.eval(&down)?) / (2.0 * FD_STEP);
            }
        }
        let sv = jac.singular_values();
        let max = sv.iter().copied().fold(0.0, f64::max);
        ranks.push(sv.iter().filter(|s| **s > RANK_THRESHOLD * max).count());
    }
    let expected_rank = rows.len();
    Ok(RegularityReport {
        regular: ranks.iter().all(|r| *r == expected_rank),
        ranks,
        expected_rank,
        no_samples: samples.is_empty(),
    })
}

/// Each row solved for one top-order coordinate with a nonzero constant
/// coefficient.
pub fn solved_form(ps: &ProlongedSystem) -> Result<BTreeMap<CoordId, Expr>, ElError> {
    let mut solved = BTreeMap::new();
    for (row, e) in ps.flat().enumerate() {
        if e.is_zero() {
            continue;
        }
        let top = e.order();
        let pick = e.coords().into_iter().find_map(|c| {
            if c == CoordId::Time || c.order() != top || solved.contains_key(&c) {
                return None;
            }
            let coef = e.partial(c);
            let k = coef.as_rational()?;
            (!coef.is_zero()).then_some((c, k))
        });
        let Some((c, k)) = pick else {
            return Err(ElError::NotSolvable {
                row,
                reason: format!("no free top-order coordinate with constant coefficient in {e}"),
            });
        };
        let rest = e - Expr::coord(c) * Expr::constant(k.clone());
        solved.insert(c, -rest / Expr::constant(k));
    }
    Ok(solved)
}

/// Substitutes the solved form of `ps` into `e` until no solved coordinate
/// remains.
pub fn on_shell_reduce(e: &Expr, ps: &ProlongedSystem) -> Result<Expr, ElError> {
    let solved = solved_form(ps)?;
    let mut cur = e.clone();
    for _ in 0..=2 * solved.len() + 1 {
        if !cur.coords().iter().any(|c| solved.contains_key(c)) {
            return Ok(cur);
        }
        cur = cur.substitute(&solved);
    }
    Err(ElError::NotSolvable {
        row: 0,
        reason: "substitution does not terminate".into(),
    })
}

/// Completes `free` with the values the solved form of `ps` assigns to
/// its solved coordinates.
pub fn on_shell_point(ps: &ProlongedSystem, free: &Point) -> Result<Point, ElError> {
    let solved = solved_form(ps)?;
    let mut out = free.clone();
    for c in solved.keys() {
        out.remove(c);
    }
    for c in solved.keys() {
        let v = on_shell_reduce(&Expr::coord(*c), ps)?.eval(&out)?;
        out.insert(*c, v);
    }
    Ok(out)
}
