//! Canonical polynomial representation behind [`Expr`](super::Expr).
//!
//! A canonical expression is a finite sum of terms `c * a1^e1 * ... * am^em`
//! where `c` is a nonzero rational and each `ai` is an atom: a coordinate, a
//! transcendental function applied to a canonical argument, or a
//! parenthesised group (a polynomial kept unexpanded because it is raised to a
//! negative integer or a non-integer power).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CoordId, Func};

/// Upper bound on reduction steps in [`Poly::div_exact`].
const DIVISION_STEP_LIMIT: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Coord(CoordId),
    Func(Func, Poly),
    Group(Poly),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Monomial(pub(crate) BTreeMap<Atom, BigRational>);

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Poly(pub(crate) BTreeMap<Monomial, BigRational>);

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_pow_int(c: &BigRational, n: i64) -> BigRational {
    let e = n.unsigned_abs() as u32;
    let num = num_traits::pow::Pow::pow(c.numer(), e);
    let den = num_traits::pow::Pow::pow(c.denom(), e);
    let r = BigRational::new(num, den);
    if n < 0 {
        r.recip()
    } else {
        r
    }
}

/// Exact rational value of `c^r` when it exists (perfect powers only).
fn rat_pow_exact(c: &BigRational, r: &BigRational) -> Option<BigRational> {
    let p = r.numer().to_i64()?;
    let q = r.denom().to_u32()?;
    if c.is_zero() {
        return if p > 0 { Some(BigRational::zero()) } else { None };
    }
    let negative = c.is_negative();
    if negative && q % 2 == 0 {
        return None;
    }
    let a = c.numer().abs();
    let b = c.denom().clone();
    let ra = a.nth_root(q);
    let rb = b.nth_root(q);
    if num_traits::pow::Pow::pow(&ra, q) != a || num_traits::pow::Pow::pow(&rb, q) != b {
        return None;
    }
    let mut root = BigRational::new(ra, rb);
    if negative {
        root = -root;
    }
    Some(rat_pow_int(&root, p))
}

impl Monomial {
    pub(crate) fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    fn single(atom: Atom, e: BigRational) -> Self {
        let mut m = BTreeMap::new();
        m.insert(atom, e);
        Monomial(m)
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> BigRational {
        self.0.values().fold(BigRational::zero(), |acc, e| acc + e)
    }

    /// Graded-lexicographic comparison used for polynomial division.
    fn grlex_cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let keys: BTreeSet<&Atom> = self.0.keys().chain(other.0.keys()).collect();
        let zero = BigRational::zero();
        for k in keys {
            let a = self.0.get(k).unwrap_or(&zero);
            let b = other.0.get(k).unwrap_or(&zero);
            match a.cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    fn divides(&self, other: &Self) -> bool {
        self.0
            .iter()
            .all(|(a, e)| other.0.get(a).is_some_and(|f| f >= e))
    }

    fn quotient(&self, divisor: &Self) -> Monomial {
        let mut m = self.0.clone();
        for (a, e) in &divisor.0 {
            let slot = m.get_mut(a).expect("divisibility checked");
            *slot -= e;
            if slot.is_zero() {
                m.remove(a);
            }
        }
        Monomial(m)
    }

    fn plain_nonnegative(&self) -> bool {
        self.0.iter().all(|(a, e)| {
            matches!(a, Atom::Coord(_) | Atom::Func(..)) && e.is_integer() && e.is_positive()
        })
    }
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub(crate) fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub(crate) fn coord(c: CoordId) -> Self {
        Poly::atom(Atom::Coord(c))
    }

    fn atom(a: Atom) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::single(a, BigRational::one()), BigRational::one());
        p
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.0.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&m) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.0.remove(&m);
                }
            }
            None => {
                self.0.insert(m, c);
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c.clone())).collect())
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub(crate) fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    /// Product of two monomials; groups whose exponent becomes a positive
    /// integer are expanded back into polynomial form.
    fn mul_monomials(a: &Monomial, b: &Monomial) -> Poly {
        let mut m = a.0.clone();
        for (atom, e) in &b.0 {
            match m.get_mut(atom) {
                Some(slot) => {
                    *slot += e;
                    if slot.is_zero() {
                        m.remove(atom);
                    }
                }
                None => {
                    m.insert(atom.clone(), e.clone());
                }
            }
        }
        let expand: Vec<(Atom, BigRational)> = m
            .iter()
            .filter(|(a, e)| Poly::group_needs_rewrite(a, e))
            .map(|(a, e)| (a.clone(), e.clone()))
            .collect();
        let mut out = Poly::zero();
        if expand.is_empty() {
            out.add_term(Monomial(m), BigRational::one());
            return out;
        }
        for (a, _) in &expand {
            m.remove(a);
        }
        out.add_term(Monomial(m), BigRational::one());
        for (a, e) in expand {
            out = out.mul(&Poly::atom_power(&a, &e));
        }
        out
    }

    fn is_monic(&self) -> bool {
        self.0.values().next().is_some_and(|c| c.is_one())
    }

    /// Group powers with a canonical alternative: positive integer powers
    /// expand, and negative integer powers become `(g^n)^(-1)` with `g^n`
    /// expanded and monic.
    fn group_needs_rewrite(a: &Atom, e: &BigRational) -> bool {
        match a {
            Atom::Group(g) if e.is_integer() && !g.is_zero() => {
                e.is_positive() || *e != rat(-1) || !g.is_monic() || g.0.len() < 2
            }
            _ => false,
        }
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let c = ca * cb;
                if ma.is_one() {
                    out.add_term(mb.clone(), c);
                } else if mb.is_one() {
                    out.add_term(ma.clone(), c);
                } else {
                    let prod = Poly::mul_monomials(ma, mb);
                    for (m, k) in prod.0 {
                        out.add_term(m, k * &c);
                    }
                }
            }
        }
        out
    }

    fn pow_int(&self, n: i64) -> Poly {
        if n == 0 {
            return Poly::one();
        }
        if n > 0 {
            let mut acc = Poly::one();
            let mut base = self.clone();
            let mut e = n;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.mul(&base);
                }
                e >>= 1;
                if e > 0 {
                    base = base.mul(&base);
                }
            }
            return acc;
        }
        self.pow_rat(&rat(n))
    }

    fn atom_power(atom: &Atom, e: &BigRational) -> Poly {
        if e.is_zero() {
            return Poly::one();
        }
        if let Atom::Group(g) = atom {
            if Poly::group_needs_rewrite(atom, e) {
                let n = e.to_integer().to_i64().unwrap_or(1);
                if n > 0 {
                    return g.pow_int(n);
                }
                return g.pow_int(-n).pow_rat(&rat(-1));
            }
        }
        let mut p = Poly::zero();
        p.add_term(Monomial::single(atom.clone(), e.clone()), BigRational::one());
        p
    }

    /// `self^r` for a rational exponent.
    pub(crate) fn pow_rat(&self, r: &BigRational) -> Poly {
        if r.is_zero() {
            return Poly::one();
        }
        if r.is_integer() && r.is_positive() {
            return self.pow_int(r.to_integer().to_i64().unwrap_or(1));
        }
        if self.is_zero() {
            if r.is_positive() {
                return Poly::zero();
            }
            return Poly::atom_power(&Atom::Group(Poly::zero()), r);
        }
        if self.0.len() == 1 {
            let (m, c) = self.0.iter().next().unwrap();
            if r.is_integer() {
                // Integer powers distribute over a single term.
                let n = r.to_integer().to_i64().unwrap_or(-1);
                let mut out = Poly::constant(rat_pow_int(c, n));
                for (a, e) in &m.0 {
                    out = out.mul(&Poly::atom_power(a, &(e * r)));
                }
                return out;
            }
            if m.is_one() {
                if let Some(v) = rat_pow_exact(c, r) {
                    return Poly::constant(v);
                }
                return Poly::atom_power(&Atom::Group(self.clone()), r);
            }
            if c.is_one() && m.0.len() == 1 {
                let (a, e) = m.0.iter().next().unwrap();
                if e.is_one() {
                    return Poly::atom_power(a, r);
                }
            }
            return Poly::atom_power(&Atom::Group(self.clone()), r);
        }
        if r.is_integer() {
            // Negative integer power of a sum: pull out the leading coefficient.
            let lead = self.0.values().next().unwrap().clone();
            let monic = self.scale(&lead.recip());
            let n = r.to_integer().to_i64().unwrap_or(-1);
            if n < -1 {
                return self.pow_int(-n).pow_rat(&rat(-1));
            }
            return Poly::atom_power(&Atom::Group(monic), r).scale(&rat_pow_int(&lead, n));
        }
        Poly::atom_power(&Atom::Group(self.clone()), r)
    }

    pub(crate) fn apply(f: Func, arg: Poly) -> Poly {
        let arg = arg.normalize();
        if f == Func::Sqrt {
            return arg.pow_rat(&BigRational::new(BigInt::from(1), BigInt::from(2)));
        }
        if let Some(c) = arg.as_constant() {
            match f {
                Func::Sin | Func::Exp | Func::Cos if c.is_zero() => {
                    return if f == Func::Sin {
                        Poly::zero()
                    } else {
                        Poly::one()
                    };
                }
                Func::Ln if c.is_one() => return Poly::zero(),
                _ => {}
            }
        }
        Poly::atom(Atom::Func(f, arg))
    }

    fn atom_partial(atom: &Atom, x: CoordId) -> Poly {
        match atom {
            Atom::Coord(c) => {
                if *c == x {
                    Poly::one()
                } else {
                    Poly::zero()
                }
            }
            Atom::Group(g) => g.partial(x),
            Atom::Func(f, arg) => {
                let inner = arg.partial(x);
                if inner.is_zero() {
                    return Poly::zero();
                }
                let outer = match f {
                    Func::Sin => Poly::apply(Func::Cos, arg.clone()),
                    Func::Cos => Poly::apply(Func::Sin, arg.clone()).neg(),
                    Func::Exp => Poly::apply(Func::Exp, arg.clone()),
                    Func::Ln => arg.pow_rat(&rat(-1)),
                    Func::Sqrt => arg
                        .pow_rat(&BigRational::new(BigInt::from(-1), BigInt::from(2)))
                        .scale(&BigRational::new(BigInt::from(1), BigInt::from(2))),
                };
                outer.mul(&inner)
            }
        }
    }

    pub(crate) fn partial(&self, x: CoordId) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            for (atom, e) in &m.0 {
                if !atom.mentions(x) {
                    continue;
                }
                let da = Poly::atom_partial(atom, x);
                if da.is_zero() {
                    continue;
                }
                let mut rest = m.0.clone();
                rest.remove(atom);
                let mut term = Poly::zero();
                term.add_term(Monomial(rest), c * e);
                let reduced = Poly::atom_power(atom, &(e - BigRational::one()));
                out = out.add(&term.mul(&reduced).mul(&da));
            }
        }
        out
    }

    pub(crate) fn substitute(&self, map: &BTreeMap<CoordId, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            let mut term = Poly::constant(c.clone());
            for (atom, e) in &m.0 {
                let base = match atom {
                    Atom::Coord(x) => match map.get(x) {
                        Some(p) => p.clone(),
                        None => Poly::atom(atom.clone()),
                    },
                    Atom::Func(f, arg) => Poly::apply(*f, arg.substitute(map)),
                    Atom::Group(g) => g.substitute(map).normalize(),
                };
                term = term.mul(&base.pow_rat(e));
            }
            out = out.add(&term);
        }
        out
    }

    pub(crate) fn collect_coords(&self, out: &mut BTreeSet<CoordId>) {
        for m in self.0.keys() {
            for a in m.0.keys() {
                match a {
                    Atom::Coord(c) => {
                        out.insert(*c);
                    }
                    Atom::Func(_, p) | Atom::Group(p) => p.collect_coords(out),
                }
            }
        }
    }

    /// True when every atom is a coordinate raised to an integer power, so
    /// the canonical form is unique and structural comparison is decisive.
    pub(crate) fn is_laurent(&self) -> bool {
        self.0.keys().all(|m| {
            m.0.iter()
                .all(|(a, e)| matches!(a, Atom::Coord(_)) && e.is_integer())
        })
    }

    fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.0.iter().max_by(|a, b| a.0.grlex_cmp(b.0))
    }

    /// Exact quotient `self / divisor` when the division leaves no remainder.
    fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if !self.0.keys().all(Monomial::plain_nonnegative_or_one)
            || !divisor.0.keys().all(Monomial::plain_nonnegative_or_one)
        {
            return None;
        }
        let (lm, lc) = divisor.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        for _ in 0..DIVISION_STEP_LIMIT {
            let Some((rm, rc)) = rem.leading() else {
                return Some(quot);
            };
            if !lm.divides(rm) {
                return None;
            }
            let mut t = Poly::zero();
            t.add_term(rm.quotient(&lm), rc / &lc);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(divisor));
        }
        None
    }

    /// Cancels group denominators against numerators they divide exactly.
    pub(crate) fn normalize(self) -> Poly {
        let mut current = self;
        loop {
            let mut by_denom: BTreeMap<Monomial, Poly> = BTreeMap::new();
            for (m, c) in &current.0 {
                let mut denom = BTreeMap::new();
                let mut rest = BTreeMap::new();
                for (a, e) in &m.0 {
                    if matches!(a, Atom::Group(_)) && e.is_integer() && e.is_negative() {
                        denom.insert(a.clone(), e.clone());
                    } else {
                        rest.insert(a.clone(), e.clone());
                    }
                }
                by_denom
                    .entry(Monomial(denom))
                    .or_default()
                    .add_term(Monomial(rest), c.clone());
            }
            let mut changed = false;
            let mut rebuilt = Poly::zero();
            for (denom, numer) in by_denom {
                if denom.is_one() {
                    rebuilt = rebuilt.add(&numer);
                    continue;
                }
                let mut numer = numer;
                let mut remaining = denom.0.clone();
                for (a, e) in &denom.0 {
                    let Atom::Group(g) = a else { continue };
                    let mut e = e.clone();
                    while e.is_negative() {
                        match numer.div_exact(g) {
                            Some(q) => {
                                numer = q;
                                e += BigRational::one();
                                changed = true;
                            }
                            None => break,
                        }
                    }
                    if e.is_zero() {
                        remaining.remove(a);
                    } else {
                        remaining.insert(a.clone(), e);
                    }
                }
                let mut den = Poly::zero();
                den.add_term(Monomial(remaining), BigRational::one());
                rebuilt = rebuilt.add(&numer.mul(&den));
            }
            if !changed {
                return rebuilt;
            }
            current = rebuilt;
        }
    }

    pub(crate) fn max_order(&self) -> usize {
        let mut coords = BTreeSet::new();
        self.collect_coords(&mut coords);
        coords
            .iter()
            .filter_map(|c| match c {
                CoordId::Fiber { order, .. } => Some(*order as usize),
                CoordId::Time => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Iterates terms and their coefficients in canonical order.
    pub(crate) fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.0.iter()
    }
}

impl Monomial {
    fn plain_nonnegative_or_one(&self) -> bool {
        self.is_one() || self.plain_nonnegative()
    }
}

impl Atom {
    fn mentions(&self, x: CoordId) -> bool {
        match self {
            Atom::Coord(c) => *c == x,
            Atom::Func(_, p) | Atom::Group(p) => {
                let mut s = BTreeSet::new();
                p.collect_coords(&mut s);
                s.contains(&x)
            }
        }
    }
}

/// Solves `sum_j lambda_j * columns[j] == target` by matching coefficients of
/// canonical monomials. Returns one exact rational solution (free unknowns set
/// to zero) or `None` when the system is inconsistent.
pub(crate) fn solve_linear_combination(columns: &[Poly], target: &Poly) -> Option<Vec<BigRational>> {
    let mut rows: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for p in columns.iter().chain(std::iter::once(target)) {
        for m in p.0.keys() {
            let next = rows.len();
            rows.entry(m).or_insert(next);
        }
    }
    let nrows = rows.len();
    let ncols = columns.len();
    let mut a = vec![vec![BigRational::zero(); ncols + 1]; nrows];
    for (j, p) in columns.iter().enumerate() {
        for (m, c) in &p.0 {
            a[rows[m]][j] = c.clone();
        }
    }
    for (m, c) in &target.0 {
        a[rows[m]][ncols] = c.clone();
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][col].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..nrows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let pivot = a[r][col..=ncols].to_vec();
                for (x, y) in a[i][col..=ncols].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == nrows {
            break;
        }
    }
    if (r..nrows).any(|i| !a[i][ncols].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); ncols];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = a[i][ncols].clone();
    }
    Some(sol)
}
