//! The Noether correspondence between symmetries and constants of motion.

use thiserror::Error;

use crate::euler_lagrange::{prolong_system, source_of_alpha, vertical_part, ElError, ProlongedSystem, SourceForm};
use crate::expr::{solve_linear_combination, zero_test, CoordId, EquivConfig, Expr};
use crate::forms::{
    contact_decompose, exterior_d, interior, lie_derivative, DiffForm, FormError, VectorField,
};
use crate::jet::{contact_form, total_derivative, truncated_total_derivative, Chart, JetError};
use crate::symmetry::{is_action_symmetry, is_poincare_cartan_type, prolong_v, SymmetryError, VTuple};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoetherError {
    #[error("not a symmetry of the action: {0}")]
    NotASymmetry(String),
    #[error("not a first integral: {{f, H}} = {0}")]
    NotFirstIntegral(Expr),
    #[error("degenerate region: {0}")]
    DegenerateRegion(String),
    #[error("precondition failed: {0}")]
    PreconditionFailure(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    El(#[from] ElError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Form(#[from] FormError),
}

fn precondition<T>(msg: impl Into<String>) -> Result<T, NoetherError> {
    Err(NoetherError::PreconditionFailure(msg.into()))
}

/// Time-independent Hamiltonian on a chart of order 2.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianProblem {
    chart: Chart,
    h: Expr,
}

impl HamiltonianProblem {
    pub const ORDER: usize = 2;

    pub fn new(n_dof: usize, h: Expr) -> Result<HamiltonianProblem, NoetherError> {
        Self::with_order(n_dof, Self::ORDER, h)
    }

    /// Same problem on a chart of order `k >= 2`.
    pub fn with_order(n_dof: usize, k: usize, h: Expr) -> Result<HamiltonianProblem, NoetherError> {
        if k < Self::ORDER {
            return precondition(format!("a Hamiltonian problem needs chart order at least {}, got {k}", Self::ORDER));
        }
        let chart = Chart::hamiltonian(n_dof, k)?;
        check_phase_function(&h, &chart, "H")?;
        Ok(HamiltonianProblem { chart, h })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn h(&self) -> &Expr {
        &self.h
    }

    pub fn n_dof(&self) -> usize {
        self.chart.n() / 2
    }

    pub fn q(&self, i: usize) -> CoordId {
        CoordId::fiber(i, 0)
    }

    pub fn p(&self, j: usize) -> CoordId {
        CoordId::fiber(self.n_dof() + j, 0)
    }

    /// `theta = sum p_i dq^i`.
    pub fn theta(&self) -> DiffForm {
        (1..=self.n_dof()).fold(DiffForm::zero(1), |acc, i| {
            acc + DiffForm::differential(self.q(i)).scale(&Expr::coord(self.p(i)))
        })
    }

    /// `Omega = d theta = sum dp_i ^ dq^i`.
    pub fn omega(&self) -> DiffForm {
        exterior_d(&self.theta())
    }

    /// `alpha^H = theta - H dt`.
    pub fn alpha_h(&self) -> DiffForm {
        self.theta() - DiffForm::dt().scale(&self.h)
    }

    pub fn source(&self) -> SourceForm {
        source_of_alpha(&self.alpha_h(), &self.chart).expect("first-order Lagrangian on an order-2 chart")
    }

    /// Prolongation to depth `k - r_o`.
    pub fn full_prolongation(&self) -> ProlongedSystem {
        let s = self.source();
        prolong_system(&s, self.chart.k() - s.order)
    }
}

fn check_phase_function(f: &Expr, chart: &Chart, name: &str) -> Result<(), NoetherError> {
    if let Some(c) = f.coords().into_iter().find(|c| *c == CoordId::Time || c.order() > 0 || !chart.contains(*c)) {
        return precondition(format!("{name} must be a time-independent phase-space function, depends on {}", chart.coord_name(c)));
    }
    Ok(())
}

/// `L dt + sum dL/dy^i_(1) omega^i_(0)` for a Lagrangian of order at most 1.
pub fn poincare_cartan_form(l: &Expr, chart: &Chart) -> Result<DiffForm, NoetherError> {
    if l.order() > 1 {
        return precondition(format!("Lagrangian has order {}, only first-order ones are supported", l.order()));
    }
    if chart.k() < 2 {
        return precondition("chart order must be at least 2");
    }
    let mut a = DiffForm::dt().scale(l);
    for i in 1..=chart.n() {
        let m = l.partial(CoordId::fiber(i, 1));
        if !m.is_zero() {
            a = a + contact_form(i, 0, chart)?.scale(&m);
        }
    }
    Ok(a)
}

/// A symmetry with its constant of motion `f` and on-shell-vanishing
/// corrections `g`, satisfying `interior(x, a_o) = f + sum g`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoetherPair {
    pub x: VectorField,
    pub f: Expr,
    pub g: Vec<Expr>,
    pub a_o: DiffForm,
}

impl NoetherPair {
    pub fn conserved(&self) -> Expr {
        self.g.iter().fold(self.f.clone(), |acc, g| acc + g)
    }

    /// `d/dt (f + sum g)` reduced on shell; zero for a genuine pair.
    pub fn on_shell_derivative(&self, ps: &ProlongedSystem) -> Result<Expr, ElError> {
        crate::euler_lagrange::on_shell_reduce(&total_derivative(&self.conserved()), ps)
    }
}

/// `f = interior(X, a_o)` after checking that `a_o` is of Poincare-Cartan
/// type and `X` is a symmetry of the action.
pub fn noether_direct(
    x: &VectorField,
    a_o: &DiffForm,
    chart: &Chart,
    cfg: &EquivConfig,
) -> Result<Expr, NoetherError> {
    if !is_poincare_cartan_type(a_o, chart, cfg)? {
        return precondition("the 1-form is not of Poincare-Cartan type");
    }
    let r = is_action_symmetry(x, a_o, chart, cfg)?;
    if !r.pass {
        let labels: Vec<String> = r
            .failures
            .iter()
            .map(|f| format!("{} = {}", f.label, f.value.display(chart)))
            .collect();
        return Err(NoetherError::NotASymmetry(labels.join(", ")));
    }
    Ok(interior(x, a_o)?.coefficient(&[]))
}

fn require_hamiltonian(chart: &Chart) -> Result<usize, NoetherError> {
    chart
        .n_dof()
        .ok_or_else(|| NoetherError::PreconditionFailure("chart has no q/p labeling".into()))
}

/// `Y^(f) = sum df/dp_i d/dq^i - df/dq^i d/dp_i`.
pub fn hamiltonian_vector_field(f: &Expr, chart: &Chart) -> Result<VectorField, NoetherError> {
    let d = require_hamiltonian(chart)?;
    check_phase_function(f, chart, "f")?;
    let mut comps = Vec::new();
    for i in 1..=d {
        let (q, p) = (CoordId::fiber(i, 0), CoordId::fiber(d + i, 0));
        comps.push((q, f.partial(p)));
        comps.push((p, -f.partial(q)));
    }
    Ok(VectorField::from_components(comps))
}

/// `{f, g} = sum df/dq^i dg/dp_i - df/dp_i dg/dq^i`.
pub fn poisson_bracket(f: &Expr, g: &Expr, chart: &Chart) -> Result<Expr, NoetherError> {
    let d = require_hamiltonian(chart)?;
    Ok((1..=d)
        .map(|i| {
            let (q, p) = (CoordId::fiber(i, 0), CoordId::fiber(d + i, 0));
            f.partial(q) * g.partial(p) - f.partial(p) * g.partial(q)
        })
        .sum())
}

pub fn is_elementary_first_integral(f: &Expr, hp: &HamiltonianProblem, cfg: &EquivConfig) -> Result<bool, NoetherError> {
    check_phase_function(f, hp.chart(), "f")?;
    Ok(zero_test(&poisson_bracket(f, hp.h(), hp.chart())?, cfg).equal)
}

/// `L_Y Omega = 0` and `dH(Y) = 0`.
pub fn is_h_symplectic(y: &VectorField, hp: &HamiltonianProblem, cfg: &EquivConfig) -> Result<bool, NoetherError> {
    for (c, e) in y.components() {
        if c == CoordId::Time || c.order() > 0 || e.order() > 0 || e.depends_on(CoordId::Time) {
            return precondition(format!(
                "field must live on phase space, has component {} along {}",
                e.display(hp.chart()),
                hp.chart().coord_name(c)
            ));
        }
    }
    let lo = lie_derivative(y, &hp.omega());
    let dh = interior(y, &exterior_d(&DiffForm::scalar(hp.h().clone())))?.coefficient(&[]);
    Ok(lo.zero_test(cfg).equal && zero_test(&dh, cfg).equal)
}

/// Symmetry `X^(f)` of `alpha^H` associated with an elementary first
/// integral `f`, with `g = 0`.
pub fn noether_inverse_hamiltonian(
    f: &Expr,
    hp: &HamiltonianProblem,
    cfg: &EquivConfig,
) -> Result<NoetherPair, NoetherError> {
    let chart = hp.chart();
    check_phase_function(f, chart, "f")?;
    let bracket = poisson_bracket(f, hp.h(), chart)?;
    if !zero_test(&bracket, cfg).equal {
        return Err(NoetherError::NotFirstIntegral(bracket));
    }
    let d = hp.n_dof();
    let den: Expr = (1..=d).map(|i| Expr::coord(hp.p(i)) * Expr::y(i, 1)).sum::<Expr>() - hp.h();
    if den.is_zero() {
        return Err(NoetherError::DegenerateRegion("sum p_i q^i_(1) - H vanishes identically".into()));
    }
    let euler: Expr = (1..=d).map(|i| f.partial(hp.p(i)) * Expr::coord(hp.p(i))).sum();
    let v0 = (f - euler) / den;
    let mut v = Vec::with_capacity(2 * d);
    for i in 1..=d {
        v.push(f.partial(hp.p(i)) + Expr::y(i, 1) * &v0);
    }
    for j in 1..=d {
        v.push(-f.partial(hp.q(j)) + Expr::y(d + j, 1) * &v0);
    }
    let x = prolong_v(&VTuple::new(v0, v, chart)?, chart)?;
    Ok(NoetherPair {
        x,
        f: f.clone(),
        g: vec![Expr::zero()],
        a_o: hp.alpha_h(),
    })
}

/// `sum_i omega^i_(0)(X) d/dy^i`.
pub fn fiber_projection(x: &VectorField, chart: &Chart) -> VectorField {
    VectorField::from_components((1..=chart.n()).map(|i| (CoordId::fiber(i, 0), vertical_part(x, i))))
}

/// Seeks `-d/dt f = sum_{l, i} c_{l,i} (d/dt)^l sigma_i` with each `c_{l,i}`
/// in the span of `basis`, then integrates by parts down to `l = 0` and
/// solves `interior(X, a_o) = f + sum g` for the time component.
pub fn noether_inverse_ansatz(
    f: &Expr,
    s: &SourceForm,
    a_o: &DiffForm,
    basis: &[Expr],
    chart: &Chart,
    cfg: &EquivConfig,
) -> Result<Option<NoetherPair>, NoetherError> {
    let k = chart.k();
    if f.order() + 1 > k {
        return precondition(format!("f has order {}, the chart allows at most {}", f.order(), k - 1));
    }
    if a_o.degree() != 1 || a_o.order() + 1 > k {
        return precondition(format!("the 1-form must have order at most {}", k - 1));
    }
    if s.order > k || s.sigma.len() != chart.n() {
        return precondition("source form does not fit the chart");
    }
    if !is_poincare_cartan_type(a_o, chart, cfg)? {
        return precondition("the 1-form is not of Poincare-Cartan type");
    }
    let dec = contact_decompose(a_o, chart)?;
    if dec.lagrangian.is_zero() {
        return precondition("a_o(d/dt) vanishes identically");
    }
    let p_o = k - s.order;
    let n = chart.n();

    let mut derivs = vec![s.sigma.clone()];
    for _ in 0..p_o {
        let next = derivs.last().unwrap().iter().map(total_derivative).collect();
        derivs.push(next);
    }
    let mut columns = Vec::new();
    for row in &derivs {
        for sig in row {
            for b in basis {
                columns.push(b * sig);
            }
        }
    }
    let target = -total_derivative(f);
    let Some(lambda) = solve_linear_combination(&columns, &target) else {
        return Ok(None);
    };
    let nb = basis.len();
    let mut c: Vec<Vec<Expr>> = (0..=p_o)
        .map(|l| {
            (0..n)
                .map(|i| {
                    basis
                        .iter()
                        .enumerate()
                        .map(|(b, e)| e * Expr::constant(lambda[(l * n + i) * nb + b].clone()))
                        .sum()
                })
                .collect()
        })
        .collect();

    let mut g = Vec::with_capacity(p_o);
    for m in (1..=p_o).rev() {
        let gm: Expr = (0..n).map(|i| &c[m][i] * &derivs[m - 1][i]).sum();
        g.push(gm);
        let (lower, upper) = c.split_at_mut(m);
        for (dst, src) in lower[m - 1].iter_mut().zip(&upper[0]) {
            *dst = &*dst - total_derivative(src);
        }
    }
    let vt = &c[0];

    let mut contraction = Expr::zero();
    for (i, v) in vt.iter().enumerate() {
        let mut dv = v.clone();
        for a in 0..k {
            if let Some(coef) = dec.contact.get(&(i + 1, a)) {
                contraction = contraction + coef * &dv;
            }
            dv = truncated_total_derivative(&dv, chart);
        }
    }
    let total = g.iter().fold(f.clone(), |acc, gi| acc + gi);
    let v0 = (&total - contraction) / &dec.lagrangian;
    let v: Vec<Expr> = (0..n).map(|i| &vt[i] + Expr::y(i + 1, 1) * &v0).collect();
    let tuple = VTuple::new(v0, v, chart).map_err(|e| {
        NoetherError::PreconditionFailure(format!("the constructed tuple is not admissible: {e}"))
    })?;
    let x = prolong_v(&tuple, chart)?;
    Ok(Some(NoetherPair {
        x,
        f: f.clone(),
        g,
        a_o: a_o.clone(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler_lagrange::on_shell_reduce;
    use crate::expr::parse_expr;
    use crate::symmetry::is_d_symmetry;
    use proptest::prelude::*;

    fn cfg() -> EquivConfig {
        EquivConfig::default()
    }

    fn problem(n_dof: usize, h: &str) -> HamiltonianProblem {
        let c = Chart::hamiltonian(n_dof, 2).unwrap();
        HamiltonianProblem::new(n_dof, parse_expr(h, &c).unwrap()).unwrap()
    }

    fn e(s: &str, hp: &HamiltonianProblem) -> Expr {
        parse_expr(s, hp.chart()).unwrap()
    }

    #[test]
    fn problem_validation() {
        let c = Chart::hamiltonian(1, 2).unwrap();
        assert!(HamiltonianProblem::new(1, parse_expr("t*p1", &c).unwrap()).is_err());
        assert!(HamiltonianProblem::new(1, parse_expr("q1_1", &c).unwrap()).is_err());
        assert!(HamiltonianProblem::with_order(1, 1, Expr::zero()).is_err());
        let hp = HamiltonianProblem::with_order(1, 3, parse_expr("p1^2/2", &c).unwrap()).unwrap();
        assert_eq!(hp.full_prolongation().depth, 2);
    }

    #[test]
    fn lagrangian_poincare_cartan_form() {
        let c = Chart::new(1, 2).unwrap();
        let l = parse_expr("y1_1^2/2 - y1_0^2/2", &c).unwrap();
        let a = poincare_cartan_form(&l, &c).unwrap();
        assert!(is_poincare_cartan_type(&a, &c, &cfg()).unwrap());
        assert_eq!(source_of_alpha(&a, &c).unwrap(), crate::euler_lagrange::el_source(&l, &c).unwrap());
        let f = noether_direct(&VectorField::partial(CoordId::Time), &a, &c, &cfg()).unwrap();
        assert_eq!(f, parse_expr("-y1_1^2/2 - y1_0^2/2", &c).unwrap());
        let c4 = Chart::new(1, 4).unwrap();
        assert!(poincare_cartan_form(&parse_expr("y1_2^2", &c4).unwrap(), &c4).is_err());
    }

    #[test]
    fn direct_examples() {
        let hp = problem(1, "(p1^2 + q1^2)/2");
        let f = noether_direct(&VectorField::partial(CoordId::Time), &hp.alpha_h(), hp.chart(), &cfg()).unwrap();
        assert_eq!(f, -hp.h().clone());
        let ps = hp.full_prolongation();
        assert!(on_shell_reduce(&total_derivative(&f), &ps).unwrap().is_zero());
        let dq = VectorField::partial(hp.q(1));
        assert!(matches!(
            noether_direct(&dq, &hp.alpha_h(), hp.chart(), &cfg()),
            Err(NoetherError::NotASymmetry(_))
        ));
        let free = problem(1, "p1^2/2");
        let f = noether_direct(&dq, &free.alpha_h(), free.chart(), &cfg()).unwrap();
        assert_eq!(f, e("p1", &free));
    }

    #[test]
    fn hamiltonian_fields() {
        let hp = problem(1, "(p1^2 + q1^2)/2");
        let y = hamiltonian_vector_field(hp.h(), hp.chart()).unwrap();
        let expect = VectorField::from_components([(hp.q(1), e("p1", &hp)), (hp.p(1), e("-q1", &hp))]);
        assert_eq!(y, expect);
        assert_eq!(hamiltonian_vector_field(&e("p1", &hp), hp.chart()).unwrap(), VectorField::partial(hp.q(1)));
        assert_eq!(
            hamiltonian_vector_field(&e("q1", &hp), hp.chart()).unwrap(),
            VectorField::partial(hp.p(1)).scale(&Expr::int(-1))
        );
        // iota_Y Omega = -df with Omega = dp ^ dq.
        let df = exterior_d(&DiffForm::scalar(hp.h().clone()));
        assert_eq!(interior(&y, &hp.omega()).unwrap(), -df);
    }

    #[test]
    fn brackets() {
        let hp = problem(1, "(p1^2 + q1^2)/2");
        let c = hp.chart();
        assert_eq!(poisson_bracket(&e("q1", &hp), &e("p1", &hp), c).unwrap(), Expr::one());
        assert!(poisson_bracket(hp.h(), hp.h(), c).unwrap().is_zero());
        assert_eq!(poisson_bracket(&e("q1^2", &hp), &e("p1", &hp), c).unwrap(), e("2*q1", &hp));
        assert!(poisson_bracket(&Expr::one(), &Expr::one(), &Chart::new(2, 2).unwrap()).is_err());
    }

    #[test]
    fn first_integrals() {
        let hp = problem(1, "(p1^2 + q1^2)/2");
        assert!(is_elementary_first_integral(hp.h(), &hp, &cfg()).unwrap());
        let free = problem(1, "p1^2/2");
        assert!(is_elementary_first_integral(&e("p1", &free), &free, &cfg()).unwrap());
        assert!(!is_elementary_first_integral(&e("q1", &free), &free, &cfg()).unwrap());
    }

    #[test]
    fn h_symplectic() {
        let hp = problem(1, "(p1^2 + q1^2)/2");
        let y = hamiltonian_vector_field(hp.h(), hp.chart()).unwrap();
        assert!(is_h_symplectic(&y, &hp, &cfg()).unwrap());
        let free = problem(1, "p1^2/2");
        assert!(is_h_symplectic(&VectorField::partial(free.q(1)), &free, &cfg()).unwrap());
        let scaling = VectorField::partial(free.q(1)).scale(&e("q1", &free));
        assert!(!is_h_symplectic(&scaling, &free, &cfg()).unwrap());
        assert!(is_h_symplectic(&VectorField::partial(CoordId::Time), &free, &cfg()).is_err());
    }

    fn check_inverse(hp: &HamiltonianProblem, f: &Expr) -> NoetherPair {
        let pair = noether_inverse_hamiltonian(f, hp, &cfg()).unwrap();
        assert_eq!(interior(&pair.x, &hp.alpha_h()).unwrap().coefficient(&[]), *f);
        assert_eq!(pair.g, vec![Expr::zero()]);
        assert_eq!(fiber_projection(&pair.x, hp.chart()), hamiltonian_vector_field(f, hp.chart()).unwrap());
        assert_eq!(noether_direct(&pair.x, &hp.alpha_h(), hp.chart(), &cfg()).unwrap(), *f);
        assert!(pair.on_shell_derivative(&hp.full_prolongation()).unwrap().is_zero());
        pair
    }

    #[test]
    fn inverse_examples() {
        let osc = problem(1, "(p1^2 + q1^2)/2");
        let pair = check_inverse(&osc, osc.h());
        assert!(!pair.x.component(CoordId::Time).is_zero());
        let neg = check_inverse(&osc, &-osc.h().clone());
        let y = hamiltonian_vector_field(osc.h(), osc.chart()).unwrap();
        assert_eq!(fiber_projection(&neg.x, osc.chart()), y.scale(&Expr::int(-1)));

        let free = problem(1, "p1^2/2");
        let pair = check_inverse(&free, &e("p1", &free));
        assert_eq!(pair.x, VectorField::partial(free.q(1)));

        let planar = problem(2, "(p1^2 + p2^2)/2");
        let l = e("q1*p2 - q2*p1", &planar);
        let pair = check_inverse(&planar, &l);
        let expect = VectorField::from_components([
            (planar.q(1), e("-q2", &planar)),
            (planar.q(2), e("q1", &planar)),
            (planar.p(1), e("-p2", &planar)),
            (planar.p(2), e("p1", &planar)),
        ]);
        assert_eq!(fiber_projection(&pair.x, planar.chart()), expect);
        assert!(matches!(
            noether_inverse_hamiltonian(&e("q1", &free), &free, &cfg()),
            Err(NoetherError::NotFirstIntegral(_))
        ));
    }

    #[test]
    fn inverse_field_is_not_a_d_symmetry_when_v0_is_nonzero() {
        let osc = problem(1, "(p1^2 + q1^2)/2");
        let pair = noether_inverse_hamiltonian(osc.h(), &osc, &cfg()).unwrap();
        assert!(!is_d_symmetry(&pair.x, osc.chart(), &cfg()).pass);
        assert!(is_action_symmetry(&pair.x, &osc.alpha_h(), osc.chart(), &cfg()).unwrap().pass);
    }

    #[test]
    fn zero_integral_gives_zero_field() {
        let free = problem(1, "p1^2/2");
        let pair = noether_inverse_hamiltonian(&Expr::zero(), &free, &cfg()).unwrap();
        assert!(pair.x.is_zero());
    }

    fn phase_poly() -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-3i64..=3, 15)
    }

    fn build(coefs: &[i64], hp: &HamiltonianProblem) -> Expr {
        let vars = [hp.q(1), hp.q(2), hp.p(1), hp.p(2)];
        let mut monos = vec![Expr::one()];
        for (i, a) in vars.iter().enumerate() {
            monos.push(Expr::coord(*a));
            for b in &vars[i..] {
                monos.push(Expr::coord(*a) * Expr::coord(*b));
            }
        }
        monos.iter().zip(coefs).map(|(m, c)| m * Expr::int(*c)).sum()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn bracket_identities(a in phase_poly(), b in phase_poly(), c in phase_poly()) {
            let hp = problem(2, "(p1^2 + p2^2)/2");
            let ch = hp.chart();
            let (f, g, h) = (build(&a, &hp), build(&b, &hp), build(&c, &hp));
            let pb = |x: &Expr, y: &Expr| poisson_bracket(x, y, ch).unwrap();
            prop_assert!((pb(&f, &g) + pb(&g, &f)).is_zero());
            let jacobi = pb(&f, &pb(&g, &h)) + pb(&g, &pb(&h, &f)) + pb(&h, &pb(&f, &g));
            prop_assert!(jacobi.is_zero());
            let leibniz = pb(&f, &(&g * &h)) - pb(&f, &g) * &h - &g * pb(&f, &h);
            prop_assert!(leibniz.is_zero());
            let yf = hamiltonian_vector_field(&f, ch).unwrap();
            prop_assert!((yf.apply(&g) - pb(&g, &f)).is_zero());
        }
    }

    #[test]
    fn ansatz_reproduces_hamiltonian_path() {
        let free = problem(1, "p1^2/2");
        let basis = vec![Expr::one(), e("q1", &free), e("p1", &free)];
        let f = e("p1", &free);
        let pair = noether_inverse_ansatz(&f, &free.source(), &free.alpha_h(), &basis, free.chart(), &cfg())
            .unwrap()
            .unwrap();
        let direct = noether_inverse_hamiltonian(&f, &free, &cfg()).unwrap();
        assert_eq!(pair.x, direct.x);
        assert_eq!(pair.g, vec![Expr::zero()]);
        assert_eq!(interior(&pair.x, &pair.a_o).unwrap().coefficient(&[]), pair.conserved());
    }

    #[test]
    fn ansatz_for_constants_and_order_gate() {
        let free = problem(1, "p1^2/2");
        let basis = vec![Expr::one()];
        let f = Expr::int(3);
        let pair = noether_inverse_ansatz(&f, &free.source(), &free.alpha_h(), &basis, free.chart(), &cfg())
            .unwrap()
            .unwrap();
        assert!(pair.g.iter().all(Expr::is_zero));
        assert_eq!(interior(&pair.x, &pair.a_o).unwrap().coefficient(&[]), f);
        let too_high = e("q1_2", &free);
        assert!(matches!(
            noether_inverse_ansatz(&too_high, &free.source(), &free.alpha_h(), &basis, free.chart(), &cfg()),
            Err(NoetherError::PreconditionFailure(_))
        ));
        let none = noether_inverse_ansatz(&e("p1", &free), &free.source(), &free.alpha_h(), &[e("q1", &free)], free.chart(), &cfg())
            .unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn ansatz_energy_and_angular_momentum() {
        let osc = problem(1, "(p1^2 + q1^2)/2");
        let basis = vec![Expr::one(), e("q1", &osc), e("p1", &osc)];
        let pair = noether_inverse_ansatz(osc.h(), &osc.source(), &osc.alpha_h(), &basis, osc.chart(), &cfg())
            .unwrap()
            .unwrap();
        assert_eq!(interior(&pair.x, &pair.a_o).unwrap().coefficient(&[]), pair.conserved());
        assert!(pair.on_shell_derivative(&osc.full_prolongation()).unwrap().is_zero());

        let planar = problem(2, "(p1^2 + p2^2)/2");
        let basis: Vec<Expr> = ["1", "q1", "q2", "p1", "p2"].iter().map(|s| e(s, &planar)).collect();
        let l = e("q1*p2 - q2*p1", &planar);
        let pair = noether_inverse_ansatz(&l, &planar.source(), &planar.alpha_h(), &basis, planar.chart(), &cfg())
            .unwrap()
            .unwrap();
        assert_eq!(interior(&pair.x, &pair.a_o).unwrap().coefficient(&[]), pair.conserved());
        assert!(pair.on_shell_derivative(&planar.full_prolongation()).unwrap().is_zero());
    }
}
