//! Exterior algebra over a jet chart.
//!
//! A [`DiffForm`] is a sum of coefficient times a wedge of coordinate
//! differentials; the differentials in each term are strictly increasing in
//! the coordinate order, so `dt` always comes last.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;

use thiserror::Error;

use crate::expr::{zero_test, CoordId, EquivConfig, Equivalence, Expr};
use crate::jet::{holonomic_frame, Chart};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("interior product of a 0-form")]
    DegreeError,
    #[error("expected a {expected}-form, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("coordinate {0} lies outside the chart")]
    OutsideChart(CoordId),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiffForm {
    degree: usize,
    terms: BTreeMap<Vec<CoordId>, Expr>,
}

impl DiffForm {
    pub fn zero(degree: usize) -> DiffForm {
        DiffForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(e: Expr) -> DiffForm {
        DiffForm::zero(0).with_term(Vec::new(), e)
    }

    /// The coordinate differential `dc`.
    pub fn differential(c: CoordId) -> DiffForm {
        DiffForm::zero(1).with_term(vec![c], Expr::one())
    }

    pub fn dt() -> DiffForm {
        DiffForm::differential(CoordId::Time)
    }

    /// Builds `coef * dc_1 ^ ... ^ dc_p` from differentials in any order.
    pub fn monomial(coef: Expr, cs: &[CoordId]) -> DiffForm {
        let mut idx = cs.to_vec();
        let mut sign = 1;
        for i in 0..idx.len() {
            for j in 0..idx.len() - 1 - i {
                if idx[j] > idx[j + 1] {
                    idx.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return DiffForm::zero(cs.len());
        }
        let coef = if sign < 0 { -coef } else { coef };
        DiffForm::zero(cs.len()).with_term(idx, coef)
    }

    fn with_term(mut self, idx: Vec<CoordId>, c: Expr) -> DiffForm {
        self.add_term(idx, c);
        self
    }

    fn add_term(&mut self, idx: Vec<CoordId>, c: Expr) {
        debug_assert_eq!(idx.len(), self.degree);
        let sum = match self.terms.remove(&idx) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(idx, sum);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[CoordId], &Expr)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Coefficient of the sorted differential multi-index `idx`.
    pub fn coefficient(&self, idx: &[CoordId]) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of a 0-form.
    pub fn as_scalar(&self) -> Option<Expr> {
        (self.degree == 0).then(|| self.coefficient(&[]))
    }

    /// Multiplies every coefficient by `e`.
    pub fn scale(&self, e: &Expr) -> DiffForm {
        let mut out = DiffForm::zero(self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * e);
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> DiffForm {
        let mut out = DiffForm::zero(self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v));
        }
        out
    }

    /// Highest jet order among differentials and coefficients.
    pub fn order(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|(k, v)| k.iter().map(|c| c.order()).chain([v.order()]))
            .max()
            .unwrap_or(0)
    }

    /// Full evaluation on `fields`, first slot first.
    pub fn evaluate(&self, fields: &[&VectorField]) -> Result<Expr, FormError> {
        if fields.len() != self.degree {
            return Err(FormError::WrongDegree {
                expected: fields.len(),
                got: self.degree,
            });
        }
        let mut f = self.clone();
        for x in fields {
            f = interior(x, &f)?;
        }
        Ok(f.coefficient(&[]))
    }

    /// Zero test of every coefficient, with probabilistic fallback.
    pub fn zero_test(&self, cfg: &EquivConfig) -> Equivalence {
        let mut probabilistic = false;
        for v in self.terms.values() {
            let r = zero_test(v, cfg);
            probabilistic |= r.probabilistic;
            if !r.equal {
                return r;
            }
        }
        Equivalence {
            equal: true,
            probabilistic,
        }
    }

    pub fn display<'a>(&'a self, chart: &'a Chart) -> FormDisplay<'a> {
        FormDisplay {
            form: self,
            chart: Some(chart),
        }
    }
}

fn combine(a: &DiffForm, b: &DiffForm, sign: i64) -> DiffForm {
    assert_eq!(a.degree, b.degree, "adding forms of different degree");
    let mut out = a.clone();
    for (k, v) in &b.terms {
        let v = if sign < 0 { -v } else { v.clone() };
        out.add_term(k.clone(), v);
    }
    out
}

impl ops::Add<&DiffForm> for &DiffForm {
    type Output = DiffForm;
    fn add(self, rhs: &DiffForm) -> DiffForm {
        combine(self, rhs, 1)
    }
}

impl ops::Add for DiffForm {
    type Output = DiffForm;
    fn add(self, rhs: DiffForm) -> DiffForm {
        combine(&self, &rhs, 1)
    }
}

impl ops::Sub<&DiffForm> for &DiffForm {
    type Output = DiffForm;
    fn sub(self, rhs: &DiffForm) -> DiffForm {
        combine(self, rhs, -1)
    }
}

impl ops::Sub for DiffForm {
    type Output = DiffForm;
    fn sub(self, rhs: DiffForm) -> DiffForm {
        combine(&self, &rhs, -1)
    }
}

impl ops::Neg for &DiffForm {
    type Output = DiffForm;
    fn neg(self) -> DiffForm {
        self.scale(&Expr::int(-1))
    }
}

impl ops::Neg for DiffForm {
    type Output = DiffForm;
    fn neg(self) -> DiffForm {
        -&self
    }
}

pub struct FormDisplay<'a> {
    form: &'a DiffForm,
    chart: Option<&'a Chart>,
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return f.write_str("0");
        }
        let name = |c: CoordId| match self.chart {
            Some(ch) => ch.coord_name(c),
            None => c.to_string(),
        };
        for (n, (idx, c)) in self.form.terms.iter().enumerate() {
            let coef = match self.chart {
                Some(ch) => c.display(ch).to_string(),
                None => c.to_string(),
            };
            let basis: Vec<String> = idx.iter().map(|c| format!("d{}", name(*c))).collect();
            let neg = !idx.is_empty() && coef == "-1";
            write_separator(f, n, neg)?;
            if idx.is_empty() {
                write!(f, "{coef}")?;
            } else if neg || coef == "1" {
                f.write_str(&basis.join("∧"))?;
            } else {
                write!(f, "({coef}) {}", basis.join("∧"))?;
            }
        }
        Ok(())
    }
}

fn write_separator(f: &mut fmt::Formatter<'_>, n: usize, negative: bool) -> fmt::Result {
    match (n, negative) {
        (0, false) => Ok(()),
        (0, true) => f.write_str("-"),
        (_, false) => f.write_str(" + "),
        (_, true) => f.write_str(" - "),
    }
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        FormDisplay {
            form: self,
            chart: None,
        }
        .fmt(f)
    }
}

impl fmt::Debug for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffForm[{}]({self})", self.degree)
    }
}

/// Sorted-merge of two strictly increasing index lists, with the sign of the
/// shuffle; `None` if they share an element.
fn merge(a: &[CoordId], b: &[CoordId]) -> Option<(Vec<CoordId>, bool)> {
    let mut inversions = 0usize;
    for x in a {
        for y in b {
            if x == y {
                return None;
            }
            if y < x {
                inversions += 1;
            }
        }
    }
    let mut v: Vec<CoordId> = a.iter().chain(b).copied().collect();
    v.sort();
    Some((v, inversions % 2 == 1))
}

pub fn wedge(a: &DiffForm, b: &DiffForm) -> DiffForm {
    let mut out = DiffForm::zero(a.degree + b.degree);
    for (ia, ca) in &a.terms {
        for (ib, cb) in &b.terms {
            if let Some((idx, odd)) = merge(ia, ib) {
                let c = ca * cb;
                out.add_term(idx, if odd { -c } else { c });
            }
        }
    }
    out
}

pub fn exterior_d(a: &DiffForm) -> DiffForm {
    let mut out = DiffForm::zero(a.degree + 1);
    for (idx, c) in &a.terms {
        for x in c.coords() {
            if let Some((nidx, odd)) = merge(&[x], idx) {
                let p = c.partial(x);
                out.add_term(nidx, if odd { -p } else { p });
            }
        }
    }
    out
}

/// Contraction in the first slot.
pub fn interior(x: &VectorField, a: &DiffForm) -> Result<DiffForm, FormError> {
    if a.degree == 0 {
        return Err(FormError::DegreeError);
    }
    let mut out = DiffForm::zero(a.degree - 1);
    for (idx, c) in &a.terms {
        for (pos, coord) in idx.iter().enumerate() {
            let xc = x.component(*coord);
            if xc.is_zero() {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(pos);
            let v = c * &xc;
            out.add_term(rest, if pos % 2 == 1 { -v } else { v });
        }
    }
    Ok(out)
}

/// Cartan's formula; on 0-forms, the directional derivative.
pub fn lie_derivative(x: &VectorField, a: &DiffForm) -> DiffForm {
    let da = exterior_d(a);
    let first = interior(x, &da).expect("d raises degree");
    if a.degree == 0 {
        return first;
    }
    first + exterior_d(&interior(x, a).expect("degree checked"))
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VectorField {
    components: BTreeMap<CoordId, Expr>,
}

impl VectorField {
    pub fn zero() -> VectorField {
        VectorField::default()
    }

    /// The coordinate field `d/dc`.
    pub fn partial(c: CoordId) -> VectorField {
        VectorField::from_components([(c, Expr::one())])
    }

    pub fn from_components(comps: impl IntoIterator<Item = (CoordId, Expr)>) -> VectorField {
        let mut v = VectorField::zero();
        for (c, e) in comps {
            v.add_component(c, e);
        }
        v
    }

    fn add_component(&mut self, c: CoordId, e: Expr) {
        let sum = match self.components.remove(&c) {
            Some(old) => old + e,
            None => e,
        };
        if !sum.is_zero() {
            self.components.insert(c, sum);
        }
    }

    pub fn component(&self, c: CoordId) -> Expr {
        self.components.get(&c).cloned().unwrap_or_else(Expr::zero)
    }

    /// Nonzero components in coordinate order.
    pub fn components(&self) -> impl Iterator<Item = (CoordId, &Expr)> {
        self.components.iter().map(|(c, e)| (*c, e))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scale(&self, e: &Expr) -> VectorField {
        VectorField::from_components(self.components.iter().map(|(c, v)| (*c, v * e)))
    }

    /// `X(e) = sum X^c de/dc`.
    pub fn apply(&self, e: &Expr) -> Expr {
        self.components
            .iter()
            .map(|(c, v)| v * e.partial(*c))
            .sum()
    }

    pub fn order(&self) -> usize {
        self.components
            .iter()
            .map(|(c, e)| c.order().max(e.order()))
            .max()
            .unwrap_or(0)
    }

    pub fn zero_test(&self, cfg: &EquivConfig) -> Equivalence {
        let mut probabilistic = false;
        for e in self.components.values() {
            let r = zero_test(e, cfg);
            probabilistic |= r.probabilistic;
            if !r.equal {
                return r;
            }
        }
        Equivalence {
            equal: true,
            probabilistic,
        }
    }

    pub fn display<'a>(&'a self, chart: &'a Chart) -> FieldDisplay<'a> {
        FieldDisplay {
            field: self,
            chart: Some(chart),
        }
    }
}

impl ops::Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        for (c, e) in &rhs.components {
            out.add_component(*c, e.clone());
        }
        out
    }
}

impl ops::Sub<&VectorField> for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        for (c, e) in &rhs.components {
            out.add_component(*c, -e);
        }
        out
    }
}

impl ops::Add for VectorField {
    type Output = VectorField;
    fn add(self, rhs: VectorField) -> VectorField {
        &self + &rhs
    }
}

impl ops::Sub for VectorField {
    type Output = VectorField;
    fn sub(self, rhs: VectorField) -> VectorField {
        &self - &rhs
    }
}

pub struct FieldDisplay<'a> {
    field: &'a VectorField,
    chart: Option<&'a Chart>,
}

impl fmt::Display for FieldDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_zero() {
            return f.write_str("0");
        }
        for (n, (c, e)) in self.field.components().enumerate() {
            let (name, coef) = match self.chart {
                Some(ch) => (ch.coord_name(c), e.display(ch).to_string()),
                None => (c.to_string(), e.to_string()),
            };
            write_separator(f, n, coef == "-1")?;
            if coef == "1" || coef == "-1" {
                write!(f, "d/d{name}")?;
            } else {
                write!(f, "({coef}) d/d{name}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        FieldDisplay {
            field: self,
            chart: None,
        }
        .fmt(f)
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField({self})")
    }
}

/// `[X, Y]^c = X(Y^c) - Y(X^c)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    let keys: BTreeSet<CoordId> = x
        .components
        .keys()
        .chain(y.components.keys())
        .copied()
        .collect();
    VectorField::from_components(
        keys.into_iter()
            .map(|c| (c, x.apply(&y.component(c)) - y.apply(&x.component(c)))),
    )
}

/// Contractions of `a` with the generators of the holonomic distribution.
pub fn holonomic_residuals(a: &DiffForm, chart: &Chart) -> Vec<DiffForm> {
    if a.degree == 0 {
        return vec![a.clone()];
    }
    let (d, tops) = holonomic_frame(chart);
    std::iter::once(&d)
        .chain(tops.iter())
        .map(|g| interior(g, a).expect("degree checked"))
        .collect()
}

pub fn is_holonomic_with(a: &DiffForm, chart: &Chart, cfg: &EquivConfig) -> Equivalence {
    let mut probabilistic = false;
    for r in holonomic_residuals(a, chart) {
        let z = r.zero_test(cfg);
        probabilistic |= z.probabilistic;
        if !z.equal {
            return z;
        }
    }
    Equivalence {
        equal: true,
        probabilistic,
    }
}

/// True iff `a` annihilates `d/dt` and every `d/dy^j_(k)` (first slot).
pub fn is_holonomic(a: &DiffForm, chart: &Chart) -> bool {
    is_holonomic_with(a, chart, &EquivConfig::default()).equal
}

/// `a = lagrangian dt + sum contact[(i, a)] omega^i_(a) + sum top[j] dy^j_(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactDecomposition {
    pub lagrangian: Expr,
    pub contact: BTreeMap<(usize, usize), Expr>,
    pub top: BTreeMap<usize, Expr>,
}

impl ContactDecomposition {
    pub fn reconstruct(&self, chart: &Chart) -> DiffForm {
        let mut out = DiffForm::dt().scale(&self.lagrangian);
        for ((i, a), c) in &self.contact {
            let w = crate::jet::contact_form(*i, *a, chart).expect("decomposition index");
            out = out + w.scale(c);
        }
        for (j, c) in &self.top {
            out = out + DiffForm::differential(CoordId::fiber(*j, chart.k())).scale(c);
        }
        out
    }
}

pub fn contact_decompose(a: &DiffForm, chart: &Chart) -> Result<ContactDecomposition, FormError> {
    if a.degree != 1 {
        return Err(FormError::WrongDegree {
            expected: 1,
            got: a.degree,
        });
    }
    let mut d = ContactDecomposition {
        lagrangian: Expr::zero(),
        contact: BTreeMap::new(),
        top: BTreeMap::new(),
    };
    let mut lagrangian = Vec::new();
    for (idx, c) in &a.terms {
        let coord = idx[0];
        if !chart.contains(coord) {
            return Err(FormError::OutsideChart(coord));
        }
        match coord {
            CoordId::Time => lagrangian.push(c.clone()),
            CoordId::Fiber { order, index } => {
                let (i, ord) = (index as usize, order as usize);
                if ord == chart.k() {
                    d.top.insert(i, c.clone());
                } else {
                    lagrangian.push(c * Expr::y(i, ord + 1));
                    d.contact.insert((i, ord), c.clone());
                }
            }
        }
    }
    d.lagrangian = lagrangian.into_iter().sum();
    Ok(d)
}

/// For 1-forms: the difference is holonomic.
pub fn variationally_equivalent_1forms(a: &DiffForm, b: &DiffForm, chart: &Chart) -> bool {
    is_holonomic(&(a - b), chart)
}
