//! Canonical tree construction and text rendering in the input grammar.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{Atom, Monomial, Poly};
use super::{CoordId, Expr, Node};
use crate::jet::Chart;

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn atom_expr(a: &Atom) -> Expr {
    match a {
        Atom::Coord(c) => Expr::from_node(Node::Coord(*c)),
        Atom::Func(f, p) => Expr::from_node(Node::Func(*f, Expr::from_poly(p.clone()))),
        Atom::Group(p) => Expr::from_poly(p.clone()),
    }
}

fn term_node(m: &Monomial, c: &BigRational) -> Node {
    let mut factors: Vec<Expr> = m
        .0
        .iter()
        .map(|(a, e)| {
            let base = atom_expr(a);
            if e.is_one() {
                base
            } else {
                Expr::from_node(Node::Pow(base, e.clone()))
            }
        })
        .collect();
    if factors.is_empty() {
        return Node::Const(c.clone());
    }
    if c.is_one() {
        if factors.len() == 1 {
            return factors.pop().unwrap().node().clone();
        }
        return Node::Mul(factors);
    }
    let mut all = Vec::with_capacity(factors.len() + 1);
    all.push(Expr::from_node(Node::Const(c.clone())));
    all.extend(factors);
    Node::Mul(all)
}

/// Builds the canonical tree for a normalized polynomial. Terms follow the
/// monomial order with the constant term last.
pub(crate) fn canonical_node(p: &Poly) -> Node {
    let mut keys: Vec<Monomial> = Vec::new();
    let mut groups: Vec<Poly> = Vec::new();
    let mut constant = None;
    for (m, c) in p.terms() {
        if m.is_one() {
            constant = Some(c.clone());
            continue;
        }
        let (key, rest) = split_denominator(m);
        let slot = match keys.iter().position(|k| *k == key) {
            Some(i) if !key.is_one() => i,
            _ => {
                keys.push(key);
                groups.push(Poly::zero());
                keys.len() - 1
            }
        };
        groups[slot].0.insert(rest, c.clone());
    }
    let mut terms: Vec<Expr> = keys
        .iter()
        .zip(&groups)
        .map(|(key, num)| match num.0.len() {
            1 => {
                let (m, c) = num.0.iter().next().unwrap();
                let mut full = m.0.clone();
                full.extend(key.0.iter().map(|(a, e)| (a.clone(), e.clone())));
                Expr::from_node(term_node(&Monomial(full), c))
            }
            _ => {
                let mut factors = vec![Expr::from_node(canonical_node(num))];
                factors.extend(key.0.iter().map(|(a, e)| Expr::from_node(Node::Pow(atom_expr(a), e.clone()))));
                Expr::from_node(Node::Mul(factors))
            }
        })
        .collect();
    if let Some(c) = constant {
        terms.push(Expr::from_node(Node::Const(c)));
    }
    match terms.len() {
        0 => Node::Const(BigRational::zero()),
        1 => terms.pop().unwrap().node().clone(),
        _ => Node::Add(terms),
    }
}

/// Splits off the groups raised to negative powers.
fn split_denominator(m: &Monomial) -> (Monomial, Monomial) {
    let (den, rest) = m
        .0
        .iter()
        .map(|(a, e)| (a.clone(), e.clone()))
        .partition(|(a, e)| matches!(a, Atom::Group(_)) && e.is_negative());
    (Monomial(den), Monomial(rest))
}

/// Renders an expression in the input grammar, optionally with the naming
/// conventions of a chart.
pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    chart: Option<&'a Chart>,
}

impl<'a> ExprDisplay<'a> {
    pub(crate) fn new(expr: &'a Expr, chart: Option<&'a Chart>) -> Self {
        ExprDisplay { expr, chart }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = Renderer { chart: self.chart };
        f.write_str(&r.render(self.expr.node()).0)
    }
}

struct Renderer<'a> {
    chart: Option<&'a Chart>,
}

fn rational_text(c: &BigRational) -> (String, u8) {
    let s = if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    };
    let prec = if c.is_negative() {
        NEG
    } else if c.is_integer() {
        ATOM
    } else {
        MUL
    };
    (s, prec)
}

fn exponent_text(r: &BigRational) -> String {
    if r.is_integer() && r.is_positive() {
        r.numer().to_string()
    } else if r.is_integer() {
        format!("({})", r.numer())
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

impl Renderer<'_> {
    fn name(&self, c: CoordId) -> String {
        match self.chart {
            Some(ch) => ch.coord_name(c),
            None => c.to_string(),
        }
    }

    fn wrap(&self, node: &Node, min: u8) -> String {
        let (s, p) = self.render(node);
        if p < min {
            format!("({s})")
        } else {
            s
        }
    }

    fn render(&self, node: &Node) -> (String, u8) {
        match node {
            Node::Const(c) => rational_text(c),
            Node::Coord(c) => (self.name(*c), ATOM),
            Node::Func(f, a) => (format!("{}({})", f.name(), self.render(a.node()).0), ATOM),
            Node::Neg(x) => (format!("-{}", self.wrap(x.node(), NEG)), NEG),
            Node::Pow(b, r) => self.render_pow(b, r),
            Node::Div(a, b) => (
                format!("{}/{}", self.wrap(a.node(), MUL), self.wrap(b.node(), POW)),
                MUL,
            ),
            Node::Mul(xs) => self.render_mul(xs),
            Node::Add(xs) => {
                let mut out = String::new();
                for (k, x) in xs.iter().enumerate() {
                    match (k, negated(x.node())) {
                        (0, _) => out.push_str(&self.wrap(x.node(), ADD + 1)),
                        (_, Some(n)) => {
                            out.push_str(" - ");
                            out.push_str(&self.wrap(&n, MUL));
                        }
                        (_, None) => {
                            out.push_str(" + ");
                            out.push_str(&self.wrap(x.node(), ADD + 1));
                        }
                    }
                }
                (out, ADD)
            }
        }
    }

    fn render_pow(&self, b: &Expr, r: &BigRational) -> (String, u8) {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        if *r == half {
            return (format!("sqrt({})", self.render(b.node()).0), ATOM);
        }
        if r.is_negative() {
            let pos = -r.clone();
            let den = if pos.is_one() {
                self.wrap(b.node(), POW)
            } else {
                self.wrap(&Node::Pow(b.clone(), pos), POW)
            };
            return (format!("1/{den}"), MUL);
        }
        (
            format!("{}^{}", self.wrap(b.node(), ATOM), exponent_text(r)),
            POW,
        )
    }

    fn render_mul(&self, xs: &[Expr]) -> (String, u8) {
        let (coef, rest) = match xs.first().map(|x| x.node()) {
            Some(Node::Const(c)) => (c.clone(), &xs[1..]),
            _ => (BigRational::one(), xs),
        };
        let negative = coef.is_negative();
        let mag = coef.abs();
        let mut num = Vec::new();
        let mut den = Vec::new();
        if !mag.is_one() {
            num.push(rational_text(&mag).0);
        }
        for x in rest {
            match x.node() {
                Node::Pow(b, r) if r.is_negative() => {
                    let pos = -r.clone();
                    den.push(if pos.is_one() {
                        self.wrap(b.node(), POW)
                    } else {
                        self.wrap(&Node::Pow(b.clone(), pos), POW)
                    });
                }
                other => num.push(self.wrap(other, POW)),
            }
        }
        let mut s = String::new();
        if negative {
            s.push('-');
        }
        if num.is_empty() {
            s.push('1');
        } else {
            s.push_str(&num.join("*"));
        }
        for d in den {
            s.push('/');
            s.push_str(&d);
        }
        (s, if negative { NEG } else { MUL })
    }
}

/// For a summand that renders with a leading minus, the summand with that
/// minus removed.
fn negated(node: &Node) -> Option<Node> {
    match node {
        Node::Const(c) if c.is_negative() => Some(Node::Const(-c.clone())),
        Node::Neg(x) => Some(x.node().clone()),
        Node::Mul(xs) => match xs.first().map(|x| x.node()) {
            Some(Node::Const(c)) if c.is_negative() => {
                let mut v = xs.to_vec();
                let pos = -c.clone();
                if pos.is_one() && v.len() == 2 {
                    return Some(v[1].node().clone());
                }
                if pos.is_one() {
                    v.remove(0);
                } else {
                    v[0] = Expr::from_node(Node::Const(pos));
                }
                Some(Node::Mul(v))
            }
            _ => None,
        },
        _ => None,
    }
}
