//! RK4 trajectories, conservation drift and on-shell residuals.

use jetvar::expr::parse_expr;
use jetvar::jet::Chart;
use jetvar::noether::HamiltonianProblem;
use jetvar::verify::{conservation_report, integrate_hamiltonian, on_shell_residuals, DerivativeSource};

fn main() {
    let chart = Chart::hamiltonian(1, 2).unwrap();
    // Pendulum.
    let hp = HamiltonianProblem::new(1, parse_expr("p1^2/2 - cos(q1)", &chart).unwrap()).unwrap();
    for dt in [1e-1, 5e-2, 2.5e-2] {
        let tr = integrate_hamiltonian(&hp, &[1.0, 0.0], 0.0, 20.0, dt).unwrap();
        let r = conservation_report(hp.h(), &tr, 1e-6).unwrap();
        println!("dt {dt:<7} energy drift {:.3e} pass {}", r.max_drift, r.pass);
    }

    let tr = integrate_hamiltonian(&hp, &[1.0, 0.0], 0.0, 20.0, 1e-3).unwrap();
    let rows: Vec<_> = hp.full_prolongation().flat().cloned().collect();
    for src in [DerivativeSource::RightHandSide, DerivativeSource::FiniteDifference] {
        let r = on_shell_residuals(&rows, &hp, &tr, src).unwrap();
        println!("{src:?}: {:?}", r.max);
    }

    let q = parse_expr("q1", &chart).unwrap();
    let r = conservation_report(&q, &tr, 1e-6).unwrap();
    println!("q1 drift {:.3} pass {}", r.max_drift, r.pass);
}
