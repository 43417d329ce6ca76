//! Drives the command-line pipeline in-process on an inline problem file.

use jetvar::cli::run;

const PROBLEM: &str = r#"{
  "kind": "hamiltonian",
  "chart": { "n_dof": 1 },
  "payload": "p1^2/2 + q1^4/4",
  "symmetry": { "v0": "1", "v": ["0", "0"] },
  "first_integral": "p1^2/2 + q1^4/4",
  "initial": [1.0, 0.0],
  "window": { "t1": 5.0 }
}"#;

fn main() {
    let path = std::env::temp_dir().join("jetvar_quartic.json");
    std::fs::write(&path, PROBLEM).unwrap();
    let file = path.to_string_lossy().into_owned();
    for args in [vec!["el"], vec!["prolong"], vec!["symcheck"], vec!["noether", "--direct"], vec!["verify"]] {
        let mut argv = vec!["jetvar"];
        argv.extend(&args);
        argv.push(&file);
        let out = run(argv);
        println!("$ jetvar {} (exit {})", args.join(" "), out.code);
        print!("{}{}", out.stdout, out.stderr);
    }
}
