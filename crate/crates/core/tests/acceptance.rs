use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use jetvar::cli::run;
use jetvar::euler_lagrange::{el_source, on_shell_reduce, prolong_system, regularity_probe, source_of_alpha};
use jetvar::expr::{parse_expr, CoordId, EquivConfig, Expr, Point};
use jetvar::forms::{interior, DiffForm, VectorField};
use jetvar::jet::{contact_form, total_derivative, Chart};
use jetvar::noether::{
    fiber_projection, hamiltonian_vector_field, is_h_symplectic, noether_direct, noether_inverse_hamiltonian,
    poisson_bracket, HamiltonianProblem,
};
use jetvar::symmetry::{is_d_symmetry, prolong_v, VTuple};
use jetvar::verify::{conservation_report, integrate_hamiltonian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg() -> EquivConfig {
    EquivConfig::default()
}

fn problem(n_dof: usize, h: &str) -> HamiltonianProblem {
    let c = Chart::hamiltonian(n_dof, 2).unwrap();
    HamiltonianProblem::new(n_dof, parse_expr(h, &c).unwrap()).unwrap()
}

fn e(s: &str, c: &Chart) -> Expr {
    parse_expr(s, c).unwrap()
}

/// Random polynomial with up to `terms` monomials of total degree at most `deg`.
fn random_poly(rng: &mut ChaCha8Rng, vars: &[Expr], deg: u32, terms: usize) -> Expr {
    let count = rng.gen_range(1..=terms);
    let mut out = Expr::zero();
    for _ in 0..count {
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-3i64..=3);
        }
        let mut m = Expr::int(c);
        let d = rng.gen_range(0..=deg);
        for _ in 0..d {
            m = m * &vars[rng.gen_range(0..vars.len())];
        }
        out = out + m;
    }
    out
}

fn c1_el_correctness() -> Check {
    let c = Chart::new(1, 2).unwrap();
    let start = Instant::now();
    let s = el_source(&e("y1_1^2/2 - y1_0^2/2", &c), &c).map_err(|x| x.to_string())?;
    let took = start.elapsed();
    ensure(s.sigma == vec![e("-y1_0 - y1_2", &c)], || format!("sigma = {:?}", s.sigma))?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("sigma_1 = -y1_0 - y1_2 in {took:?}"))
}

fn c2_source_uniqueness() -> Check {
    let hp = problem(1, "(p1^2 + q1^2)/2");
    let c = hp.chart();
    let base = source_of_alpha(&hp.alpha_h(), c).map_err(|x| x.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let vars: Vec<Expr> = ["t", "q1", "p1", "q1_1", "p1_1"].iter().map(|s| e(s, c)).collect();
    for trial in 0..10 {
        let mut lambda = DiffForm::zero(1);
        for i in 1..=2 {
            for a in 0..c.k() {
                let coef = random_poly(&mut rng, &vars, 2, 3);
                lambda = lambda + contact_form(i, a, c).unwrap().scale(&coef);
            }
        }
        let s = source_of_alpha(&(hp.alpha_h() + lambda), c).map_err(|x| x.to_string())?;
        ensure(s == base, || format!("trial {trial}: {:?}", s.sigma))?;
    }
    Ok("10 perturbations leave the source form unchanged".into())
}

fn c3_null_lagrangians() -> Check {
    let c = Chart::new(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let vars: Vec<Expr> = ["t", "y1_0", "y2_0"].iter().map(|s| e(s, &c)).collect();
    for trial in 0..10 {
        let mut g = random_poly(&mut rng, &vars, 3, 4);
        if trial % 2 == 1 {
            g = g + vars[1].sin() * &vars[2] + (&vars[0] * &vars[2]).exp();
        }
        let s = el_source(&total_derivative(&g), &c).map_err(|x| x.to_string())?;
        ensure(s.is_zero(), || format!("g = {g}: {:?}", s.sigma))?;
    }
    Ok("10 total derivatives have zero source".into())
}

fn c4_d_symmetry_characterization() -> Check {
    let c = Chart::new(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let vars: Vec<Expr> = ["t", "y1_0", "y2_0"].iter().map(|s| e(s, &c)).collect();
    let mut fails = 0;
    for trial in 0..20 {
        let v0 = random_poly(&mut rng, &vars, 2, 3);
        let v = vec![random_poly(&mut rng, &vars, 2, 3), random_poly(&mut rng, &vars, 2, 3)];
        let x = prolong_v(&VTuple::new(v0, v, &c).unwrap(), &c).unwrap();
        ensure(is_d_symmetry(&x, &c, &cfg()).pass, || format!("trial {trial}: prolongation rejected"))?;
        let i = rng.gen_range(1..=2);
        let a = rng.gen_range(1..=2);
        let target = CoordId::fiber(i, a);
        let delta = random_poly(&mut rng, &vars, 1, 2);
        let perturbed = x.clone() + VectorField::partial(target).scale(&delta);
        ensure(!is_d_symmetry(&perturbed, &c, &cfg()).pass, || {
            format!("trial {trial}: perturbation of {target} by {delta} accepted")
        })?;
        fails += 1;
    }
    Ok(format!("20 prolongations pass, {fails} perturbations fail"))
}

fn c5_hamiltonian_prolongation() -> Check {
    let hp = problem(1, "(p1^2 + q1^2)/2");
    let c = hp.chart();
    let (q, p) = (CoordId::fiber(1, 0), CoordId::fiber(2, 0));
    let h = hp.h();
    let (q1, p1, q2, p2) = (e("q1_1", c), e("p1_1", c), e("q1_2", c), e("p1_2", c));
    // H_q + p_1, H_p - q_1 and their time derivatives through second partials.
    let expected = [
        h.partial(q) + &p1,
        h.partial(p) - &q1,
        h.partial(q).partial(q) * &q1 + h.partial(q).partial(p) * &p1 + &p2,
        h.partial(p).partial(q) * &q1 + h.partial(p).partial(p) * &p1 - &q2,
    ];
    let ps = prolong_system(&hp.source(), 1);
    let rows: Vec<Expr> = ps.flat().cloned().collect();
    ensure(rows.len() == 4, || format!("{} rows", rows.len()))?;
    for (r, x) in rows.iter().zip(&expected) {
        ensure(*r == -x.clone(), || format!("{r} vs -({x})"))?;
    }
    Ok("four rows match with overall sign -1".into())
}

fn c6_noether_direct() -> Check {
    let hp = problem(1, "(p1^2 + q1^2)/2");
    let f = noether_direct(&VectorField::partial(CoordId::Time), &hp.alpha_h(), hp.chart(), &cfg())
        .map_err(|x| x.to_string())?;
    ensure(f == -hp.h().clone(), || format!("f = {f}"))?;
    let rate = on_shell_reduce(&total_derivative(&f), &hp.full_prolongation()).map_err(|x| x.to_string())?;
    ensure(rate.is_zero(), || format!("df/dt on shell = {rate}"))?;
    let tr = integrate_hamiltonian(&hp, &[1.0, 0.0], 0.0, 10.0, 1e-3).map_err(|x| x.to_string())?;
    let r = conservation_report(hp.h(), &tr, 1e-8).map_err(|x| x.to_string())?;
    ensure(r.pass, || format!("drift {:e}", r.max_drift))?;
    Ok(format!("f = -H, on-shell rate 0, drift {:.2e}", r.max_drift))
}

fn c7_noether_inverse() -> Check {
    let cases = [
        ("(p1^2 + q1^2)/2", 1, "(p1^2 + q1^2)/2"),
        ("p1^2/2", 1, "p1"),
        ("(p1^2 + p2^2)/2", 2, "q1*p2 - q2*p1"),
    ];
    for (h, d, f) in cases {
        let hp = problem(d, h);
        let c = hp.chart();
        let f = e(f, c);
        let pair = noether_inverse_hamiltonian(&f, &hp, &cfg()).map_err(|x| x.to_string())?;
        let contraction = interior(&pair.x, &hp.alpha_h()).unwrap().coefficient(&[]);
        ensure(contraction == f, || format!("interior = {contraction}"))?;
        ensure(pair.g.iter().all(Expr::is_zero), || "g is not zero".into())?;
        let y = hamiltonian_vector_field(&f, c).unwrap();
        ensure(fiber_projection(&pair.x, c) == y, || format!("projection differs for {f}"))?;
        let back = noether_direct(&pair.x, &hp.alpha_h(), c, &cfg()).map_err(|x| x.to_string())?;
        ensure(back == f, || format!("round trip gives {back}"))?;
    }
    Ok("H, p1, angular momentum: identity, g = 0, projection, round trip".into())
}

fn c8_h_symplectic() -> Check {
    let corpus = [
        ("(p1^2 + q1^2)/2", 1, vec!["(p1^2 + q1^2)/2"]),
        ("p1^2/2", 1, vec!["p1", "p1^2/2"]),
        ("(p1^2 + p2^2)/2", 2, vec!["q1*p2 - q2*p1", "p1", "p2", "(p1^2 + p2^2)/2"]),
    ];
    let mut n = 0;
    for (h, d, fs) in corpus {
        let hp = problem(d, h);
        for f in fs {
            let y = hamiltonian_vector_field(&e(f, hp.chart()), hp.chart()).unwrap();
            ensure(is_h_symplectic(&y, &hp, &cfg()).map_err(|x| x.to_string())?, || format!("{f} rejected"))?;
            n += 1;
        }
    }
    let hp = problem(1, "(p1^2 + q1^2)/2");
    let y = VectorField::partial(CoordId::fiber(1, 0)).scale(&Expr::y(1, 0));
    ensure(!is_h_symplectic(&y, &hp, &cfg()).map_err(|x| x.to_string())?, || "q1 d/dq1 accepted".into())?;
    Ok(format!("{n} Hamiltonian fields accepted, q1 d/dq1 rejected"))
}

fn c9_poisson_algebra() -> Check {
    let c = Chart::hamiltonian(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let vars: Vec<Expr> = ["q1", "q2", "p1", "p2"].iter().map(|s| e(s, &c)).collect();
    let pb = |a: &Expr, b: &Expr| poisson_bracket(a, b, &c).unwrap();
    for trial in 0..10 {
        let f = random_poly(&mut rng, &vars, 3, 4);
        let g = random_poly(&mut rng, &vars, 3, 4);
        let h = random_poly(&mut rng, &vars, 3, 4);
        ensure((pb(&f, &g) + pb(&g, &f)).is_zero(), || format!("trial {trial}: antisymmetry"))?;
        let leibniz = pb(&f, &(&g * &h)) - pb(&f, &g) * &h - &g * pb(&f, &h);
        ensure(leibniz.is_zero(), || format!("trial {trial}: Leibniz"))?;
        let jacobi = pb(&f, &pb(&g, &h)) + pb(&g, &pb(&h, &f)) + pb(&h, &pb(&f, &g));
        ensure(jacobi.is_zero(), || format!("trial {trial}: Jacobi"))?;
    }
    Ok("10 triples: antisymmetry, Leibniz, Jacobi".into())
}

fn c10_rk4_order() -> Check {
    let hp = problem(1, "(p1^2 + q1^2)/2");
    let err = |dt: f64| -> Result<f64, String> {
        let tr = integrate_hamiltonian(&hp, &[1.0, 0.0], 0.0, 10.0, dt).map_err(|x| x.to_string())?;
        let s = tr.final_state();
        Ok(((s[0] - 10f64.cos()).powi(2) + (s[1] + 10f64.sin()).powi(2)).sqrt())
    };
    let mut ratios = Vec::new();
    for dt in [1e-2, 5e-3] {
        let r = err(dt)? / err(dt / 2.0)?;
        ensure((12.0..=20.0).contains(&r), || format!("dt = {dt}: ratio {r}"))?;
        ratios.push(format!("{r:.2}"));
    }
    Ok(format!("error ratios {}", ratios.join(", ")))
}

fn c11_regularity() -> Check {
    let hp = problem(1, "(p1^2 + q1^2)/2");
    let c = hp.chart();
    let ps = hp.full_prolongation();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples: Vec<Point> = (0..10)
        .map(|_| {
            let (t, q, p): (f64, f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            // On the flow of the oscillator: q' = p, p' = -q.
            [("t", t), ("q1", q), ("p1", p), ("q1_1", p), ("p1_1", -q), ("q1_2", -q), ("p1_2", -p)]
                .into_iter()
                .map(|(n, v)| (c.resolve(n).unwrap(), v))
                .collect()
        })
        .collect();
    let r = regularity_probe(&ps, &c.coords(), &samples).map_err(|x| x.to_string())?;
    ensure(r.expected_rank == 4, || format!("expected rank {}", r.expected_rank))?;
    ensure(r.regular && r.ranks.iter().all(|k| *k == 4), || format!("ranks {:?}", r.ranks))?;
    Ok("rank 4 at 10 on-shell samples".into())
}

fn c12_cli_golden() -> Check {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let file = dir.join("oscillator.json").to_string_lossy().into_owned();
    let commands: [(&str, &[&str]); 6] = [
        ("el", &["el"]),
        ("prolong", &["prolong"]),
        ("symcheck", &["symcheck"]),
        ("noether_direct", &["noether", "--direct"]),
        ("noether_inverse", &["noether", "--inverse"]),
        ("verify", &["verify"]),
    ];
    for (name, args) in commands {
        let mut argv = vec!["jetvar", "--seed", "24301"];
        argv.extend(args);
        argv.push(&file);
        let first = run(argv.clone());
        let second = run(argv);
        let golden = std::fs::read_to_string(dir.join(format!("{name}.txt"))).map_err(|x| x.to_string())?;
        ensure(first.code == 0, || format!("{name}: exit {}", first.code))?;
        ensure(first == second, || format!("{name}: output differs between runs"))?;
        ensure(first.stdout == golden, || format!("{name}: output differs from golden file"))?;
    }
    Ok("five subcommands byte-identical to golden files".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("EL correctness", c1_el_correctness),
        ("source form unchanged by holonomic terms", c2_source_uniqueness),
        ("null Lagrangians", c3_null_lagrangians),
        ("D-symmetry characterization", c4_d_symmetry_characterization),
        ("Hamiltonian prolongation rows", c5_hamiltonian_prolongation),
        ("Noether direct", c6_noether_direct),
        ("Noether inverse (Hamiltonian)", c7_noether_inverse),
        ("H-symplectic equivalence", c8_h_symplectic),
        ("Poisson algebra", c9_poisson_algebra),
        ("RK4 order", c10_rk4_order),
        ("regularity probe", c11_regularity),
        ("CLI golden files", c12_cli_golden),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
