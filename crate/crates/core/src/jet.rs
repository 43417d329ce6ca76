//! Jet charts, total derivatives, and the holonomic frame and coframe.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{CoordId, Expr};
use crate::forms::{DiffForm, VectorField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}

/// Adapted coordinates `(t, y^i_(a))`, `1 <= i <= n`, `0 <= a <= k`.
///
/// A Hamiltonian chart labels the first `n_dof` fibers as `q` and the
/// remaining ones as `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chart {
    n: usize,
    k: usize,
    n_dof: Option<usize>,
}

impl Chart {
    pub fn new(n: usize, k: usize) -> Result<Chart, JetError> {
        if n == 0 || k == 0 {
            return Err(JetError::InvalidChart(format!(
                "need n >= 1 and k >= 1, got n = {n}, k = {k}"
            )));
        }
        Ok(Chart { n, k, n_dof: None })
    }

    pub fn hamiltonian(n_dof: usize, k: usize) -> Result<Chart, JetError> {
        let mut c = Chart::new(2 * n_dof, k)?;
        c.n_dof = Some(n_dof);
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_dof(&self) -> Option<usize> {
        self.n_dof
    }

    pub fn is_hamiltonian(&self) -> bool {
        self.n_dof.is_some()
    }

    /// Same fibers, order `k + dk`.
    pub fn prolong(&self, dk: usize) -> Chart {
        Chart {
            k: self.k + dk,
            ..*self
        }
    }

    /// Same fibers, order `k` (which must be at least 1).
    pub fn with_order(&self, k: usize) -> Result<Chart, JetError> {
        if k == 0 {
            return Err(JetError::InvalidChart("order must be at least 1".into()));
        }
        Ok(Chart { k, ..*self })
    }

    /// All coordinates in the fixed coordinate order.
    pub fn coords(&self) -> Vec<CoordId> {
        let mut v: Vec<CoordId> = (0..=self.k)
            .flat_map(|a| (1..=self.n).map(move |i| CoordId::fiber(i, a)))
            .collect();
        v.push(CoordId::Time);
        v
    }

    pub fn contains(&self, c: CoordId) -> bool {
        match c {
            CoordId::Time => true,
            CoordId::Fiber { order, index } => {
                index >= 1 && index as usize <= self.n && order as usize <= self.k
            }
        }
    }

    /// `q^i_(a)`; `None` on non-Hamiltonian charts.
    pub fn q(&self, i: usize, a: usize) -> Option<CoordId> {
        self.n_dof.map(|_| CoordId::fiber(i, a))
    }

    /// `p_j_(a)`; `None` on non-Hamiltonian charts.
    pub fn p(&self, j: usize, a: usize) -> Option<CoordId> {
        self.n_dof.map(|d| CoordId::fiber(d + j, a))
    }

    pub fn coord_name(&self, c: CoordId) -> String {
        match (c, self.n_dof) {
            (CoordId::Fiber { order, index }, Some(d)) => {
                let (letter, i) = if index as usize <= d {
                    ('q', index as usize)
                } else {
                    ('p', index as usize - d)
                };
                if order == 0 {
                    format!("{letter}{i}")
                } else {
                    format!("{letter}{i}_{order}")
                }
            }
            _ => c.to_string(),
        }
    }

    /// Resolves a coordinate name, including the `q`/`p` aliases on
    /// Hamiltonian charts. Names outside the chart resolve to `None`.
    pub fn resolve(&self, name: &str) -> Option<CoordId> {
        if name == "t" {
            return Some(CoordId::Time);
        }
        if !name.is_char_boundary(1) {
            return None;
        }
        let (letter, rest) = name.split_at(1);
        let (idx, order) = match rest.split_once('_') {
            Some((i, a)) => (i, Some(a)),
            None => (rest, None),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !digits(idx) || order.is_some_and(|a| !digits(a)) {
            return None;
        }
        let i: usize = idx.parse().ok()?;
        let c = match (letter, order, self.n_dof) {
            ("y", Some(a), _) => CoordId::fiber(i, a.parse().ok()?),
            ("q", a, Some(d)) if i >= 1 && i <= d => {
                CoordId::fiber(i, a.map_or(Some(0), |a| a.parse().ok())?)
            }
            ("p", a, Some(d)) if i >= 1 && i <= d => {
                CoordId::fiber(d + i, a.map_or(Some(0), |a| a.parse().ok())?)
            }
            _ => return None,
        };
        self.contains(c).then_some(c)
    }
}

pub fn prolong_chart(chart: &Chart, dk: usize) -> Chart {
    chart.prolong(dk)
}

/// Prolonging total derivative: every `y^i_(a)` contributes
/// `y^i_(a+1) * de/dy^i_(a)`, so the result may reach order `k + 1`.
pub fn total_derivative(e: &Expr) -> Expr {
    derivative_impl(e, None)
}

/// Truncated total derivative on `chart`: the frame field `d/dt` applied to
/// `e`, with `y^i_(k+1) = 0`.
pub fn truncated_total_derivative(e: &Expr, chart: &Chart) -> Expr {
    derivative_impl(e, Some(chart.k()))
}

fn derivative_impl(e: &Expr, top: Option<usize>) -> Expr {
    e.coords()
        .into_iter()
        .filter_map(|c| match c.raised(1) {
            None => Some(e.partial(c)),
            Some(_) if top.is_some_and(|k| c.order() >= k) => None,
            Some(next) => Some(Expr::coord(next) * e.partial(c)),
        })
        .sum()
}

/// Truncated `d/dt` as a vector field.
pub fn total_derivative_field(chart: &Chart) -> VectorField {
    let mut comps = vec![(CoordId::Time, Expr::one())];
    for a in 0..chart.k() {
        for i in 1..=chart.n() {
            comps.push((CoordId::fiber(i, a), Expr::y(i, a + 1)));
        }
    }
    VectorField::from_components(comps)
}

/// Generators of the holonomic distribution: `d/dt` and the `n` fields
/// `d/dy^i_(k)`.
pub fn holonomic_frame(chart: &Chart) -> (VectorField, Vec<VectorField>) {
    let tops = (1..=chart.n())
        .map(|i| VectorField::partial(CoordId::fiber(i, chart.k())))
        .collect();
    (total_derivative_field(chart), tops)
}

/// `omega^i_(a) = dy^i_(a) - y^i_(a+1) dt`.
pub fn contact_form(i: usize, a: usize, chart: &Chart) -> Result<DiffForm, JetError> {
    if i == 0 || i > chart.n() || a >= chart.k() {
        return Err(JetError::IndexOutOfRange(format!(
            "contact form ({i}, {a}) on a chart with n = {}, k = {}",
            chart.n(),
            chart.k()
        )));
    }
    Ok(DiffForm::differential(CoordId::fiber(i, a))
        - DiffForm::dt().scale(&Expr::y(i, a + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn resolve_names() {
        let c = Chart::new(2, 2).unwrap();
        assert_eq!(c.resolve("y2_1"), Some(CoordId::fiber(2, 1)));
        assert_eq!(c.resolve("y3_0"), None);
        assert_eq!(c.resolve("y1_3"), None);
        assert_eq!(c.resolve("q1"), None);
        let h = Chart::hamiltonian(2, 2).unwrap();
        assert_eq!(h.resolve("p1"), Some(CoordId::fiber(3, 0)));
        assert_eq!(h.resolve("q2_2"), Some(CoordId::fiber(2, 2)));
        assert_eq!(h.resolve("p3"), None);
        assert_eq!(h.resolve(""), None);
        assert_eq!(h.resolve("é1"), None);
        assert_eq!(h.coord_name(CoordId::fiber(4, 1)), "p2_1");
    }

    #[test]
    fn chart_prolongation() {
        let c = Chart::new(1, 2).unwrap();
        assert!(c.prolong(1).coords().contains(&CoordId::fiber(1, 3)));
        assert_eq!(c.prolong(0), c);
        assert!(Chart::new(0, 1).is_err());
    }

    #[test]
    fn total_derivative_examples() {
        let c = Chart::new(1, 1).unwrap();
        let e = parse_expr("t*y1_1", &c).unwrap();
        let expect = parse_expr("y1_1 + t*y1_2", &c.prolong(1)).unwrap();
        assert_eq!(total_derivative(&e), expect);
        assert_eq!(total_derivative(&Expr::y(1, 0)), Expr::y(1, 1));
        assert_eq!(truncated_total_derivative(&Expr::y(1, 1), &c), Expr::zero());
    }

    #[test]
    fn frame_sizes() {
        let (d, tops) = holonomic_frame(&Chart::new(2, 2).unwrap());
        assert_eq!(d.components().count(), 5);
        assert_eq!(tops.len(), 2);
    }

    #[test]
    fn contact_form_range() {
        let c = Chart::new(1, 1).unwrap();
        assert!(contact_form(1, 0, &c).is_ok());
        assert!(contact_form(1, 1, &c).is_err());
        assert!(contact_form(2, 0, &c).is_err());
    }
}
