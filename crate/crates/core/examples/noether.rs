//! Symmetries to constants of motion and back for a planar oscillator.

use jetvar::expr::{parse_expr, CoordId, EquivConfig, Expr};
use jetvar::forms::VectorField;
use jetvar::jet::Chart;
use jetvar::noether::{
    fiber_projection, hamiltonian_vector_field, noether_direct, noether_inverse_ansatz, noether_inverse_hamiltonian,
    poisson_bracket, HamiltonianProblem, NoetherError,
};

fn main() {
    let cfg = EquivConfig::default();
    let chart = Chart::hamiltonian(2, 2).unwrap();
    let e = |s: &str| parse_expr(s, &chart).unwrap();
    let hp = HamiltonianProblem::new(2, e("(p1^2 + p2^2)/2 + (q1^2 + q2^2)/2")).unwrap();
    println!("alpha^H = {}", hp.alpha_h().display(&chart));

    let f = noether_direct(&VectorField::partial(CoordId::Time), &hp.alpha_h(), &chart, &cfg).unwrap();
    println!("time translation -> f = {}", f.display(&chart));

    let integrals = [e("q1*p2 - q2*p1"), e("q1*q2 + p1*p2"), e("(p1^2 - p2^2 + q1^2 - q2^2)/2")];
    for f in &integrals {
        println!("{{f, H}} = {} for f = {}", poisson_bracket(f, hp.h(), &chart).unwrap().display(&chart), f.display(&chart));
        let pair = noether_inverse_hamiltonian(f, &hp, &cfg).unwrap();
        println!("  projection = {}", fiber_projection(&pair.x, &chart).display(&chart));
        println!("  Y^(f)      = {}", hamiltonian_vector_field(f, &chart).unwrap().display(&chart));
        let back = noether_direct(&pair.x, &hp.alpha_h(), &chart, &cfg).unwrap();
        println!("  direct map returns {}", back.display(&chart));
    }

    let basis: Vec<Expr> = ["1", "q1", "q2", "p1", "p2"].iter().map(|s| e(s)).collect();
    let pair = noether_inverse_ansatz(&integrals[0], &hp.source(), &hp.alpha_h(), &basis, &chart, &cfg)
        .unwrap()
        .unwrap();
    println!("ansatz: g = [{}]", pair.g.iter().map(|g| g.display(&chart).to_string()).collect::<Vec<_>>().join(", "));
    println!("ansatz: projection = {}", fiber_projection(&pair.x, &chart).display(&chart));

    if let Err(NoetherError::NotFirstIntegral(b)) = noether_inverse_hamiltonian(&e("q1"), &hp, &cfg) {
        println!("q1 is not a first integral: {{q1, H}} = {}", b.display(&chart));
    }
}
