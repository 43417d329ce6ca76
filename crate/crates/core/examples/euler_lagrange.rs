//! Source forms of Lagrangians, their prolongations and a regularity probe.

use jetvar::euler_lagrange::{el_source, on_shell_point, prolong_system, regularity_probe};
use jetvar::expr::{parse_expr, Point};
use jetvar::jet::Chart;

fn main() {
    let chart = Chart::new(2, 2).unwrap();
    // Two coupled oscillators.
    let l = parse_expr("(y1_1^2 + y2_1^2)/2 - (y1_0^2 + y2_0^2)/2 - (y1_0 - y2_0)^2/4", &chart).unwrap();
    let s = el_source(&l, &chart).unwrap();
    for (i, sigma) in s.sigma.iter().enumerate() {
        println!("sigma_{} = {}", i + 1, sigma.display(&chart));
    }

    let big = chart.prolong(1);
    let ps = prolong_system(&s, 1);
    for (i, row) in ps.rows[1].iter().enumerate() {
        println!("(d/dt) sigma_{} = {}", i + 1, row.display(&big));
    }

    let free: Point = big.coords().into_iter().enumerate().map(|(j, c)| (c, 0.1 * j as f64 - 0.3)).collect();
    let pt = on_shell_point(&ps, &free).unwrap();
    let r = regularity_probe(&ps, &big.coords(), &[pt]).unwrap();
    println!("rank {:?} of {}, regular: {}", r.ranks, r.expected_rank, r.regular);

    let higher = Chart::new(1, 4).unwrap();
    let l2 = parse_expr("y1_2^2/2", &higher).unwrap();
    println!("second order: sigma_1 = {}", el_source(&l2, &higher).unwrap().sigma[0].display(&higher));
}
