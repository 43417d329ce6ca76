//! Numeric integration of Hamilton's equations and conservation checks.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{CoordId, EvalError, Expr, Point};
use crate::noether::{poisson_bracket, HamiltonianProblem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("empty window [{t0}, {t1}]")]
    InvalidWindow { t0: f64, t1: f64 },
    #[error("initial state has {got} entries, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("finite differences need at least 3 samples, trajectory has {0}")]
    TooShort(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub step: f64,
    pub method: &'static str,
}

/// Uniform-grid samples of `[q_1..q_n, p_1..p_n]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Base-order points `(t, y^i_(0))`.
    pub fn points(&self) -> Vec<Point> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(t, s)| base_point(*t, s))
            .collect()
    }

    pub fn map_states(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            states: self.states.iter().map(|s| f(s)).collect(),
            meta: self.meta.clone(),
        }
    }
}

fn base_point(t: f64, state: &[f64]) -> Point {
    let mut p: Point = state
        .iter()
        .enumerate()
        .map(|(i, v)| (CoordId::fiber(i + 1, 0), *v))
        .collect();
    p.insert(CoordId::Time, t);
    p
}

/// Classical RK4 on `q' = dH/dp`, `p' = -dH/dq`. The window is split into
/// `ceil((t1 - t0) / dt)` equal steps.
pub fn integrate_hamiltonian(
    hp: &HamiltonianProblem,
    init: &[f64],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory, VerifyError> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(VerifyError::InvalidStep(dt));
    }
    if t1.partial_cmp(&t0) != Some(std::cmp::Ordering::Greater) {
        return Err(VerifyError::InvalidWindow { t0, t1 });
    }
    let d = hp.n_dof();
    if init.len() != 2 * d {
        return Err(VerifyError::StateLength { expected: 2 * d, got: init.len() });
    }
    let rhs: Vec<Expr> = (1..=d)
        .map(|i| hp.h().partial(hp.p(i)))
        .chain((1..=d).map(|i| -hp.h().partial(hp.q(i))))
        .collect();
    let field = |t: f64, s: &[f64]| -> Result<Vec<f64>, EvalError> {
        let pt = base_point(t, s);
        rhs.iter().map(|e| e.eval(&pt)).collect()
    };
    hp.h().eval(&base_point(t0, init))?;

    let steps = (((t1 - t0) / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut s = init.to_vec();
    times.push(t0);
    states.push(s.clone());
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let k1 = field(t, &s)?;
        let k2 = field(t + h / 2.0, &axpy(&s, h / 2.0, &k1))?;
        let k3 = field(t + h / 2.0, &axpy(&s, h / 2.0, &k2))?;
        let k4 = field(t + h, &axpy(&s, h, &k3))?;
        for j in 0..s.len() {
            s[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        times.push(t0 + (n + 1) as f64 * h);
        states.push(s.clone());
    }
    Ok(Trajectory {
        times,
        states,
        meta: TrajectoryMeta { step: h, method: "rk4" },
    })
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(x, y)| x + a * y).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    pub max_drift: f64,
    pub tol: f64,
    pub pass: bool,
}

/// `max_t |f(t) - f(t0)|` over the given points.
pub fn conservation_report_on(f: &Expr, points: &[Point], tol: f64) -> Result<ConservationReport, VerifyError> {
    let mut max_drift = 0.0f64;
    if let Some(first) = points.first() {
        let f0 = f.eval(first)?;
        for p in points {
            max_drift = max_drift.max((f.eval(p)? - f0).abs());
        }
    }
    Ok(ConservationReport { max_drift, tol, pass: max_drift <= tol })
}

pub fn conservation_report(f: &Expr, traj: &Trajectory, tol: f64) -> Result<ConservationReport, VerifyError> {
    conservation_report_on(f, &traj.points(), tol)
}

/// How jet coordinates of order >= 1 are assigned along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    /// Iterated brackets with `H`, evaluated at each state.
    RightHandSide,
    /// Second-order central differences of the sampled states.
    FiniteDifference,
}

/// Points carrying `y^i_(a)` for `a <= max_order`.
pub fn jet_points(
    hp: &HamiltonianProblem,
    traj: &Trajectory,
    max_order: usize,
    source: DerivativeSource,
) -> Result<Vec<Point>, VerifyError> {
    let n = 2 * hp.n_dof();
    let mut points = traj.points();
    match source {
        DerivativeSource::RightHandSide => {
            let mut exprs: Vec<Vec<Expr>> = vec![(1..=n).map(|i| Expr::y(i, 0)).collect()];
            for _ in 0..max_order {
                let next = exprs
                    .last()
                    .unwrap()
                    .iter()
                    .map(|e| poisson_bracket(e, hp.h(), hp.chart()).expect("phase-space chart"))
                    .collect();
                exprs.push(next);
            }
            for pt in points.iter_mut() {
                for (a, row) in exprs.iter().enumerate().skip(1) {
                    for (i, e) in row.iter().enumerate() {
                        let v = e.eval(pt)?;
                        pt.insert(CoordId::fiber(i + 1, a), v);
                    }
                }
            }
        }
        DerivativeSource::FiniteDifference => {
            if max_order > 0 && traj.len() < 3 {
                return Err(VerifyError::TooShort(traj.len()));
            }
            let h = traj.meta.step;
            for i in 0..n {
                let mut series: Vec<f64> = traj.states.iter().map(|s| s[i]).collect();
                for a in 1..=max_order {
                    series = central_difference(&series, h);
                    for (pt, v) in points.iter_mut().zip(&series) {
                        pt.insert(CoordId::fiber(i + 1, a), *v);
                    }
                }
            }
        }
    }
    Ok(points)
}

fn central_difference(x: &[f64], h: f64) -> Vec<f64> {
    let m = x.len();
    (0..m)
        .map(|j| {
            if j == 0 {
                (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h)
            } else if j == m - 1 {
                (3.0 * x[m - 1] - 4.0 * x[m - 2] + x[m - 3]) / (2.0 * h)
            } else {
                (x[j + 1] - x[j - 1]) / (2.0 * h)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max: Vec<f64>,
    pub source: DerivativeSource,
}

impl ResidualReport {
    pub fn overall(&self) -> f64 {
        self.max.iter().copied().fold(0.0, f64::max)
    }
}

/// Per-row maximum of `|row|` along the trajectory.
pub fn on_shell_residuals(
    rows: &[Expr],
    hp: &HamiltonianProblem,
    traj: &Trajectory,
    source: DerivativeSource,
) -> Result<ResidualReport, VerifyError> {
    let max_order = rows.iter().map(Expr::order).max().unwrap_or(0);
    let points = jet_points(hp, traj, max_order, source)?;
    let mut max = vec![0.0f64; rows.len()];
    for pt in &points {
        for (m, row) in max.iter_mut().zip(rows) {
            *m = m.max(row.eval(pt)?.abs());
        }
    }
    Ok(ResidualReport { max, source })
}
