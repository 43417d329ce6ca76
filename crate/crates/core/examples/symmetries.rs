//! Prolonged vector fields, D-symmetries and symmetries of an action.

use jetvar::expr::{parse_expr, EquivConfig, Expr};
use jetvar::forms::{lie_bracket, DiffForm};
use jetvar::jet::Chart;
use jetvar::symmetry::{is_action_symmetry, is_d_symmetry, prolong_v, VTuple};

fn main() {
    let chart = Chart::new(2, 2).unwrap();
    let cfg = EquivConfig::default();
    let e = |s: &str| parse_expr(s, &chart).unwrap();
    let alpha = DiffForm::dt().scale(&e("(y1_1^2 + y2_1^2)/2 - (y1_0^2 + y2_0^2)/2"));

    let candidates = [
        ("time translation", Expr::one(), vec![Expr::zero(), Expr::zero()]),
        ("rotation", Expr::zero(), vec![e("-y2_0"), e("y1_0")]),
        ("shift", Expr::zero(), vec![Expr::one(), Expr::zero()]),
        ("scaling", e("2*t"), vec![e("y1_0"), e("y2_0")]),
    ];
    let mut fields = Vec::new();
    for (name, v0, v) in candidates {
        let x = prolong_v(&VTuple::new(v0, v, &chart).unwrap(), &chart).unwrap();
        let d = is_d_symmetry(&x, &chart, &cfg);
        let a = is_action_symmetry(&x, &alpha, &chart, &cfg).unwrap();
        println!("{name:16} D-symmetry {:5} action symmetry {:5}", d.pass, a.pass);
        for f in &a.failures {
            println!("    {} = {}", f.label, f.value.display(&chart));
        }
        println!("    X = {}", x.display(&chart));
        fields.push(x);
    }
    let b = lie_bracket(&fields[0], &fields[1]);
    println!("[time, rotation] = {}", b.display(&chart));
}
