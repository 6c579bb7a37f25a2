use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pds-stretch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn simulate_csv(dir: &Path, name: &str, extra: &[&str]) -> String {
    let out = dir.join(name);
    let mut args = vec!["simulate", "--n", "500", "--k", "1", "--seed", "42", "--paths", "sp,up,gp,sw", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn help_on_every_subcommand() {
    for sub in ["simulate", "walk-count", "n0", "l0", "variance", "pixels", "theorems", "integrals", "bound", "animal"] {
        let o = run(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("Usage"), "{sub}");
    }
}

#[test]
fn bound_at_the_reference_point() {
    let o = run(&["bound", "--rho", "1.25e-10", "--intensity", "153"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("P = 2.514419e-3"), "{s}");
    assert!(s.contains("= 2.471204e-11"), "{s}");
    assert!(s.contains("lambda = 34"), "{s}");
}

#[test]
fn bound_outside_its_range_is_a_usage_error() {
    assert_eq!(run(&["bound", "--rho", "1e-4"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--rho", "1e-4", "--unchecked"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["simulate", "--trials", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--paths", "zz"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--margin", "corridor", "--trials", "1"]).status.code(), Some(2));
}

#[test]
fn simulate_csv_is_reproducible_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let a = simulate_csv(dir.path(), "a.csv", &["--trials", "4"]);
    let b = simulate_csv(dir.path(), "b.csv", &["--trials", "4"]);
    assert_eq!(a, b);
    assert!(a.starts_with("path,intensity,k,trials,master_seed,mean_length,std_length,mean_size_over_sqrt_n,std_size_over_sqrt_n\n"));
    let mut r = csv::Reader::from_reader(a.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[0][0], "sp");
    let sp: f64 = rows[0][5].parse().unwrap();
    assert!((1.0..1.998).contains(&sp));
    assert_eq!(&rows[3][5], "");
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str, threads: &str| {
        let p = dir.path().join(name);
        let o = bin()
            .env("PDS_STRETCH_THREADS", threads)
            .args(["simulate", "--n", "400", "--trials", "6", "--seed", "3", "--out", p.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        std::fs::read_to_string(p).unwrap()
    };
    assert_eq!(out("one.csv", "1"), out("three.csv", "3"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "command = \"simulate\"\nintensity = 500\ntrials = 3\nseed = 42\npaths = [\"up\"]\n").unwrap();
    let out = dir.path().join("o.csv");
    let o = run(&["--config", cfg.to_str().unwrap(), "simulate", "--trials", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = std::fs::read_to_string(&out).unwrap();
    assert_eq!(s.lines().count(), 2);
    assert!(s.lines().nth(1).unwrap().starts_with("up,500.0,1.0,2,42,"));

    // The file alone selects the command and its values.
    std::fs::write(&cfg, format!("command = \"simulate\"\nintensity = 500\ntrials = 3\nseed = 42\npaths = [\"up\"]\nout = {:?}\n", out.to_str().unwrap())).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = std::fs::read_to_string(&out).unwrap();
    assert!(s.lines().nth(1).unwrap().starts_with("up,500.0,1.0,3,42,"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "trials = 3\nwindow_size = 2\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("window_size"));
}

#[test]
fn animal_bound_on_polyline_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "# center to center\n0 0\n1,1\n").unwrap();
    let o = run(&["animal", "--file", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("animal size: 4"));

    // Corner to corner touches seven pixels against a bound of four.
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "-0.5 -0.5\n0.5 0.5\n").unwrap();
    let o = run(&["animal", "--file", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("lattice points"));

    let o = run(&["animal", "--file", good.to_str().unwrap(), "--scale", "2", "--color", "pink"]);
    assert_eq!(o.status.code(), Some(0));
    let garbage = dir.path().join("garbage.txt");
    std::fs::write(&garbage, "1 2 3\n").unwrap();
    assert_eq!(run(&["animal", "--file", garbage.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["animal"]).status.code(), Some(2));
}

#[test]
fn theorem_suite_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = run(&["theorems", "--instances", "2", "--polylines", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = std::fs::read_to_string(out).unwrap();
    assert!(s.starts_with("check,instances,passes,failures,first_failing_seed\n"));
    assert!(s.contains("\nlength_animal,2,2,0,\n"));
}

#[test]
fn integrals_pass_at_a_million_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("i.csv");
    let o = run(&["integrals", "--samples", "1e6", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = std::fs::read_to_string(out).unwrap();
    assert!(s.starts_with("integral_id,estimate,closed_form,rel_err,pass\n"));
    assert!(s.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn origin_and_pixel_commands() {
    let o = run(&["n0", "--n", "1e3", "--trials", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["l0", "--n", "1e3", "--trials", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["pixels", "--rho", "1e-7", "--windows", "2", "--half", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["walk-count", "--n", "1e3", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["variance", "--n", "1e3,1e4", "--trials", "40"]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    assert!(stdout(&o).contains("variance decreasing"));
}
