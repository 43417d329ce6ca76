use jetvar::euler_lagrange::{el_source, source_of_alpha};
use jetvar::expr::{parse_expr, EquivConfig, Expr};
use jetvar::forms::{exterior_d, interior, lie_derivative, wedge, DiffForm, VectorField};
use jetvar::jet::{contact_form, total_derivative, Chart};
use jetvar::noether::HamiltonianProblem;
use jetvar::symmetry::{is_d_symmetry, prolong_v, VTuple};
use jetvar::verify::{conservation_report, integrate_hamiltonian};
use proptest::prelude::*;

/// Sum of `c * vars[i] * vars[j]` plus linear and constant terms.
fn quadratic(coefs: &[i64], vars: &[Expr]) -> Expr {
    let mut monos = vec![Expr::one()];
    for (i, a) in vars.iter().enumerate() {
        monos.push(a.clone());
        for b in &vars[i..] {
            monos.push(a * b);
        }
    }
    monos.iter().zip(coefs).map(|(m, c)| m * Expr::int(*c)).sum()
}

fn coefs(n: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-2i64..=2, n)
}

fn vars(chart: &Chart, names: &[&str]) -> Vec<Expr> {
    names.iter().map(|s| parse_expr(s, chart).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn d_squared_vanishes(a in coefs(10), b in coefs(10)) {
        let c = Chart::new(1, 2).unwrap();
        let v = vars(&c, &["t", "y1_0", "y1_1"]);
        let f = quadratic(&a, &v);
        prop_assert!(exterior_d(&exterior_d(&DiffForm::scalar(f.clone()))).is_zero());
        let one = contact_form(1, 0, &c).unwrap().scale(&f) + DiffForm::dt().scale(&quadratic(&b, &v));
        prop_assert!(exterior_d(&exterior_d(&one)).is_zero());
    }

    #[test]
    fn lie_derivative_commutes_with_d(a in coefs(10), b in coefs(10), g in coefs(10)) {
        let c = Chart::new(1, 2).unwrap();
        let v = vars(&c, &["t", "y1_0", "y1_1"]);
        let x = VectorField::from_components([
            (jetvar::expr::CoordId::fiber(1, 0), quadratic(&a, &v)),
            (jetvar::expr::CoordId::Time, quadratic(&b, &v)),
        ]);
        let f = DiffForm::scalar(quadratic(&g, &v));
        let lhs = lie_derivative(&x, &exterior_d(&f));
        let rhs = exterior_d(&lie_derivative(&x, &f));
        prop_assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn wedge_of_one_forms_is_antisymmetric(a in coefs(10), b in coefs(10)) {
        let c = Chart::new(1, 2).unwrap();
        let v = vars(&c, &["t", "y1_0", "y1_1"]);
        let al = contact_form(1, 0, &c).unwrap().scale(&quadratic(&a, &v));
        let be = contact_form(1, 1, &c).unwrap() + DiffForm::dt().scale(&quadratic(&b, &v));
        prop_assert!((wedge(&al, &be) + wedge(&be, &al)).is_zero());
        prop_assert!(wedge(&al, &al).is_zero());
    }

    #[test]
    fn contact_forms_annihilate_the_total_derivative(i in 1usize..=2, a in 0usize..2) {
        let c = Chart::new(2, 2).unwrap();
        let d = jetvar::jet::total_derivative_field(&c);
        prop_assert!(interior(&d, &contact_form(i, a, &c).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn total_derivatives_are_null_lagrangians(a in coefs(10)) {
        let c = Chart::new(2, 2).unwrap();
        let g = quadratic(&a, &vars(&c, &["t", "y1_0", "y2_0"]));
        prop_assert!(el_source(&total_derivative(&g), &c).unwrap().is_zero());
    }

    #[test]
    fn holonomic_terms_do_not_change_the_source(a in coefs(10), b in coefs(10)) {
        let c = Chart::new(1, 2).unwrap();
        let v = vars(&c, &["t", "y1_0", "y1_1"]);
        let l = parse_expr("y1_1^2/2 - y1_0^4", &c).unwrap();
        let alpha = DiffForm::dt().scale(&l);
        let lambda = contact_form(1, 0, &c).unwrap().scale(&quadratic(&a, &v))
            + contact_form(1, 1, &c).unwrap().scale(&quadratic(&b, &v));
        prop_assert_eq!(source_of_alpha(&(alpha.clone() + lambda), &c).unwrap(), source_of_alpha(&alpha, &c).unwrap());
    }

    #[test]
    fn base_tuples_prolong_to_d_symmetries(a in coefs(10), b in coefs(10), g in coefs(10)) {
        let c = Chart::new(2, 2).unwrap();
        let v = vars(&c, &["t", "y1_0", "y2_0"]);
        let tuple = VTuple::new(quadratic(&a, &v), vec![quadratic(&b, &v), quadratic(&g, &v)], &c).unwrap();
        let x = prolong_v(&tuple, &c).unwrap();
        prop_assert!(is_d_symmetry(&x, &c, &EquivConfig::default()).pass);
        prop_assert_eq!(VTuple::of_field(&x, &c), tuple);
    }

    #[test]
    fn oscillator_energy_is_conserved(q in -2.0f64..2.0, p in -2.0f64..2.0) {
        let c = Chart::hamiltonian(1, 2).unwrap();
        let hp = HamiltonianProblem::new(1, parse_expr("(p1^2 + q1^2)/2", &c).unwrap()).unwrap();
        let tr = integrate_hamiltonian(&hp, &[q, p], 0.0, 5.0, 1e-2).unwrap();
        prop_assert!(conservation_report(hp.h(), &tr, 1e-7).unwrap().pass);
    }
}
