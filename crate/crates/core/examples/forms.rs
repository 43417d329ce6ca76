//! Contact forms, exterior calculus and the holonomic test.

use jetvar::expr::CoordId;
use jetvar::forms::{exterior_d, interior, is_holonomic, lie_derivative, wedge, DiffForm};
use jetvar::jet::{contact_form, total_derivative_field, Chart};

fn main() {
    let chart = Chart::new(1, 2).unwrap();
    let w0 = contact_form(1, 0, &chart).unwrap();
    let w1 = contact_form(1, 1, &chart).unwrap();
    println!("omega_0      = {}", w0.display(&chart));
    println!("d omega_0    = {}", exterior_d(&w0).display(&chart));

    let d = total_derivative_field(&chart);
    println!("D            = {}", d.display(&chart));
    println!("omega_0(D)   = {}", interior(&d, &w0).unwrap().display(&chart));
    println!("L_D omega_0  = {}", lie_derivative(&d, &w0).display(&chart));

    let two = wedge(&w0, &DiffForm::dt());
    println!("omega_0 ^ dt = {}", two.display(&chart));
    println!("holonomic: omega_0 {}, omega_1 {}, d omega_0 {}", is_holonomic(&w0, &chart), is_holonomic(&w1, &chart), is_holonomic(&exterior_d(&w0), &chart));

    let dy = DiffForm::differential(CoordId::fiber(1, 0));
    println!("dy1_0 holonomic: {}", is_holonomic(&dy, &chart));
}
