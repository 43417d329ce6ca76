//! Parsing, canonical simplification, differentiation and equivalence.

use jetvar::expr::{equivalent, parse_expr, CoordId, EquivConfig};
use jetvar::jet::Chart;

fn main() {
    let chart = Chart::hamiltonian(1, 2).unwrap();
    let e = parse_expr("(q1 + p1)^2 - 2*q1*p1 + sin(q1)^2 + cos(q1)^2", &chart).unwrap();
    println!("canonical:   {}", e.display(&chart));

    let q = CoordId::fiber(1, 0);
    println!("d/dq1:       {}", e.partial(q).display(&chart));

    let r = parse_expr("(q1^2 - p1^2)/(q1 - p1)", &chart).unwrap();
    println!("cancelled:   {}", r.display(&chart));

    let lhs = parse_expr("sin(q1)^2", &chart).unwrap();
    let rhs = parse_expr("1 - cos(q1)^2", &chart).unwrap();
    let v = equivalent(&lhs, &rhs, &EquivConfig::default());
    println!("sin^2 = 1 - cos^2: {} (probabilistic: {})", v.equal, v.probabilistic);

    match parse_expr("q1_3 + p1", &chart) {
        Ok(_) => unreachable!(),
        Err(err) => println!("rejected:    {err}"),
    }
}
