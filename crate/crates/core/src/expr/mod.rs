//! Symbolic scalar expressions over jet coordinates.
//!
//! [`Expr`] values are immutable and cheap to clone. Arithmetic through the
//! operator traits and every method here returns the canonical form: sums and
//! products flattened, polynomial parts expanded over rational coefficients,
//! and transcendental applications treated as opaque atoms. Unsimplified trees
//! can still be built with [`Expr::from_node`] and brought to canonical form
//! with [`Expr::simplify`].

mod parse;
pub(crate) mod poly;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use parse::{parse_expr, ParseError};
pub use print::ExprDisplay;

use crate::jet::Chart;
use poly::Poly;

/// A coordinate of a jet chart: the time `t` or a fiber coordinate `y^i_(a)`.
///
/// The derived order (fibers by derivative order, then index; time last) is
/// the fixed total order used for canonical forms and coframe sorting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoordId {
    Fiber { order: u32, index: u32 },
    Time,
}

impl CoordId {
    /// Fiber coordinate `y^i_(a)` (index `i` is 1-based).
    pub fn fiber(i: usize, a: usize) -> CoordId {
        CoordId::Fiber {
            order: a as u32,
            index: i as u32,
        }
    }

    /// Derivative order; `0` for time.
    pub fn order(self) -> usize {
        match self {
            CoordId::Fiber { order, .. } => order as usize,
            CoordId::Time => 0,
        }
    }

    /// Fiber index, `None` for time.
    pub fn index(self) -> Option<usize> {
        match self {
            CoordId::Fiber { index, .. } => Some(index as usize),
            CoordId::Time => None,
        }
    }

    /// The same fiber one derivative order higher; time has no successor.
    pub fn raised(self, by: usize) -> Option<CoordId> {
        match self {
            CoordId::Fiber { order, index } => Some(CoordId::Fiber {
                order: order + by as u32,
                index,
            }),
            CoordId::Time => None,
        }
    }
}

impl fmt::Display for CoordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordId::Time => write!(f, "t"),
            CoordId::Fiber { order, index } => write!(f, "y{index}_{order}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Const(BigRational),
    Coord(CoordId),
    Neg(Expr),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, BigRational),
    Div(Expr, Expr),
    Func(Func, Expr),
}

struct Inner {
    node: Node,
    canon: OnceLock<Arc<Poly>>,
}

/// Immutable symbolic expression.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.node == other.0.node
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.node.hash(state)
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.node.cmp(&other.0.node)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

/// Numeric assignment of coordinates.
pub type Point = BTreeMap<CoordId, f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no value assigned to coordinate {0}")]
    MissingAssignment(CoordId),
    #[error("domain error: {0}")]
    DomainError(String),
}

impl Expr {
    /// Wraps a raw node without simplifying it.
    pub fn from_node(node: Node) -> Expr {
        Expr(Arc::new(Inner {
            node,
            canon: OnceLock::new(),
        }))
    }

    pub(crate) fn from_poly(p: Poly) -> Expr {
        let p = p.normalize();
        let node = print::canonical_node(&p);
        let inner = Inner {
            node,
            canon: OnceLock::new(),
        };
        let _ = inner.canon.set(Arc::new(p));
        Expr(Arc::new(inner))
    }

    pub(crate) fn poly(&self) -> &Poly {
        self.0
            .canon
            .get_or_init(|| Arc::new(poly_of_node(&self.0.node).normalize()))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn constant(c: BigRational) -> Expr {
        Expr::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(poly::rat(n))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn coord(c: CoordId) -> Expr {
        Expr::from_poly(Poly::coord(c))
    }

    pub fn t() -> Expr {
        Expr::coord(CoordId::Time)
    }

    /// Fiber coordinate `y^i_(a)`.
    pub fn y(i: usize, a: usize) -> Expr {
        Expr::coord(CoordId::fiber(i, a))
    }

    /// Canonical form. Idempotent and value-preserving wherever both sides
    /// are defined.
    pub fn simplify(&self) -> Expr {
        Expr::from_poly(self.poly().clone())
    }

    /// True for the canonical zero (no probabilistic fallback).
    pub fn is_zero(&self) -> bool {
        self.poly().is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.poly().as_constant()
    }

    /// Partial derivative, treating all coordinates as independent symbols.
    pub fn partial(&self, c: CoordId) -> Expr {
        Expr::from_poly(self.poly().partial(c))
    }

    pub fn pow(&self, r: BigRational) -> Expr {
        Expr::from_poly(self.poly().pow_rat(&r))
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(poly::rat(n))
    }

    pub fn apply(f: Func, arg: &Expr) -> Expr {
        Expr::from_poly(Poly::apply(f, arg.poly().clone()))
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Func::Sin, self)
    }

    pub fn cos(&self) -> Expr {
        Expr::apply(Func::Cos, self)
    }

    pub fn exp(&self) -> Expr {
        Expr::apply(Func::Exp, self)
    }

    pub fn ln(&self) -> Expr {
        Expr::apply(Func::Ln, self)
    }

    pub fn sqrt(&self) -> Expr {
        Expr::apply(Func::Sqrt, self)
    }

    /// Replaces coordinates by expressions, simultaneously.
    pub fn substitute(&self, map: &BTreeMap<CoordId, Expr>) -> Expr {
        if map.is_empty() {
            return self.simplify();
        }
        let pm: BTreeMap<CoordId, Poly> =
            map.iter().map(|(c, e)| (*c, e.poly().clone())).collect();
        Expr::from_poly(self.poly().substitute(&pm))
    }

    /// Coordinates occurring in the canonical form.
    pub fn coords(&self) -> BTreeSet<CoordId> {
        let mut s = BTreeSet::new();
        self.poly().collect_coords(&mut s);
        s
    }

    pub fn depends_on(&self, c: CoordId) -> bool {
        self.coords().contains(&c)
    }

    /// Highest derivative order among the fiber coordinates that occur.
    pub fn order(&self) -> usize {
        self.poly().max_order()
    }

    /// Laurent polynomial in the coordinates (no function or group atoms).
    pub fn is_polynomial(&self) -> bool {
        self.poly().is_laurent()
    }

    /// Chart-aware display (uses `q`/`p` aliases on Hamiltonian charts).
    pub fn display<'a>(&'a self, chart: &'a Chart) -> ExprDisplay<'a> {
        ExprDisplay::new(self, Some(chart))
    }

    /// Numeric evaluation of the tree as written.
    pub fn eval(&self, point: &Point) -> Result<f64, EvalError> {
        let v = eval_node(&self.0.node, point)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::DomainError(format!("non-finite value in {self}")))
        }
    }
}

fn poly_of_node(node: &Node) -> Poly {
    match node {
        Node::Const(c) => Poly::constant(c.clone()),
        Node::Coord(c) => Poly::coord(*c),
        Node::Neg(e) => e.poly().neg(),
        Node::Add(xs) => xs.iter().fold(Poly::zero(), |acc, x| acc.add(x.poly())),
        Node::Mul(xs) => xs.iter().fold(Poly::one(), |acc, x| acc.mul(x.poly())),
        Node::Pow(b, r) => b.poly().pow_rat(r),
        Node::Div(a, b) => a.poly().mul(&b.poly().pow_rat(&poly::rat(-1))),
        Node::Func(f, a) => Poly::apply(*f, a.poly().clone()),
    }
}

fn rat_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

fn eval_pow(b: f64, r: &BigRational) -> Result<f64, EvalError> {
    if r.is_integer() {
        let n = r.to_integer().to_i32().ok_or_else(|| {
            EvalError::DomainError("exponent out of range".to_string())
        })?;
        if b == 0.0 && n < 0 {
            return Err(EvalError::DomainError("division by zero".to_string()));
        }
        return Ok(b.powi(n));
    }
    let p = r.numer().to_i32().unwrap_or(0);
    let q = r.denom().to_i32().unwrap_or(1);
    if b < 0.0 && q % 2 == 0 {
        return Err(EvalError::DomainError(format!(
            "even root of negative value {b}"
        )));
    }
    if b == 0.0 && p < 0 {
        return Err(EvalError::DomainError("division by zero".to_string()));
    }
    let root = if b < 0.0 {
        -(-b).powf(1.0 / q as f64)
    } else {
        b.powf(1.0 / q as f64)
    };
    Ok(root.powi(p))
}

fn eval_node(node: &Node, point: &Point) -> Result<f64, EvalError> {
    Ok(match node {
        Node::Const(c) => rat_to_f64(c),
        Node::Coord(c) => *point.get(c).ok_or(EvalError::MissingAssignment(*c))?,
        Node::Neg(e) => -eval_node(e.node(), point)?,
        Node::Add(xs) => {
            let mut s = 0.0;
            for x in xs {
                s += eval_node(x.node(), point)?;
            }
            s
        }
        Node::Mul(xs) => {
            let mut s = 1.0;
            for x in xs {
                s *= eval_node(x.node(), point)?;
            }
            s
        }
        Node::Pow(b, r) => eval_pow(eval_node(b.node(), point)?, r)?,
        Node::Div(a, b) => {
            let d = eval_node(b.node(), point)?;
            if d == 0.0 {
                return Err(EvalError::DomainError("division by zero".to_string()));
            }
            eval_node(a.node(), point)? / d
        }
        Node::Func(f, a) => {
            let x = eval_node(a.node(), point)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(EvalError::DomainError(format!("ln of {x}")));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(EvalError::DomainError(format!("sqrt of {x}")));
                    }
                    x.sqrt()
                }
            }
        }
    })
}

/// Parameters of the randomized equivalence fallback.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivConfig {
    pub samples: usize,
    pub tolerance: f64,
    /// Half-width of the sampling box `[-range, range]`.
    pub range: f64,
    pub seed: u64,
}

impl Default for EquivConfig {
    fn default() -> Self {
        EquivConfig {
            samples: 20,
            tolerance: 1e-9,
            range: 2.0,
            seed: 0x5eed,
        }
    }
}

impl EquivConfig {
    pub fn with_seed(seed: u64) -> Self {
        EquivConfig {
            seed,
            ..EquivConfig::default()
        }
    }
}

/// Outcome of an equivalence or zero test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Equivalence {
    pub equal: bool,
    /// Set when the verdict comes from random sampling instead of
    /// canonical-form comparison.
    pub probabilistic: bool,
}

/// Canonical comparison first; randomized evaluation when the canonical forms
/// differ and are not plain polynomials.
pub fn equivalent(a: &Expr, b: &Expr, cfg: &EquivConfig) -> Equivalence {
    let diff = a - b;
    if diff.is_zero() {
        return Equivalence {
            equal: true,
            probabilistic: false,
        };
    }
    if diff.is_polynomial() {
        return Equivalence {
            equal: false,
            probabilistic: false,
        };
    }
    let mut coords = a.coords();
    coords.extend(b.coords());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < cfg.samples && attempts < cfg.samples * 50 {
        attempts += 1;
        let point: Point = coords
            .iter()
            .map(|c| (*c, rng.gen_range(-cfg.range..=cfg.range)))
            .collect();
        let (Ok(va), Ok(vb)) = (a.eval(&point), b.eval(&point)) else {
            continue;
        };
        accepted += 1;
        if (va - vb).abs() >= cfg.tolerance {
            return Equivalence {
                equal: false,
                probabilistic: true,
            };
        }
    }
    Equivalence {
        equal: accepted > 0,
        probabilistic: true,
    }
}

/// Zero test with the same fallback policy as [`equivalent`].
pub fn zero_test(e: &Expr, cfg: &EquivConfig) -> Equivalence {
    equivalent(e, &Expr::zero(), cfg)
}

/// Finds rational `lambda` with `sum lambda_j * columns[j] == target`
/// (canonical identity, by coefficient matching).
pub fn solve_linear_combination(columns: &[Expr], target: &Expr) -> Option<Vec<BigRational>> {
    let cols: Vec<Poly> = columns.iter().map(|c| c.poly().clone()).collect();
    poly::solve_linear_combination(&cols, target.poly())
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<CoordId> for Expr {
    fn from(c: CoordId) -> Expr {
        Expr::coord(c)
    }
}

impl From<BigRational> for Expr {
    fn from(c: BigRational) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $f:expr) => {
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Poly, &Poly) -> Poly = $f;
                Expr::from_poly(f(self.poly(), rhs.poly()))
            }
        }
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                ops::$trait::$method(&self, &rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                ops::$trait::$method(&self, rhs)
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                ops::$trait::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add(b));
binop!(Sub, sub, |a, b| a.sub(b));
binop!(Mul, mul, |a, b| a.mul(b));
binop!(Div, div, |a, b| a.mul(&b.pow_rat(&poly::rat(-1))));

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::from_poly(self.poly().neg())
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::from_poly(iter.fold(Poly::zero(), |acc, e| acc.add(e.poly())))
    }
}

impl<'a> std::iter::Sum<&'a Expr> for Expr {
    fn sum<I: Iterator<Item = &'a Expr>>(iter: I) -> Expr {
        Expr::from_poly(iter.fold(Poly::zero(), |acc, e| acc.add(e.poly())))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        ExprDisplay::new(self, None).fmt(f)
    }
}
