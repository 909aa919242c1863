use std::f64::consts::PI;
use std::process::Command;

use besselsum::cli::{run_command, CommandOutput};
use besselsum::report::Report;

fn run(args: &str) -> CommandOutput {
    run_command(std::iter::once("besselsum").chain(args.split_whitespace()))
}

fn arctan_oracle(a: f64, b: f64) -> f64 {
    2.0 / (PI.sqrt() * b) * (b.sin() / (a.exp() - b.cos())).atan()
}

#[test]
fn eval_json_reports_theorem2_value() {
    let o = run("eval --kind J --a 0.01 --b 1.0 --nu 0.5 --method auto --format json");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let r = Report::from_json(&o.stdout).unwrap();
    assert_eq!(r.results.len(), 1);
    assert_eq!(r.results[0].method, "theorem2");
    let expect = arctan_oracle(0.01, 1.0);
    assert!((r.results[0].value - expect).abs() < 1e-11 * expect);
    assert_eq!(r.meta.version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn region_violation_exits_2_and_names_constraint() {
    let o = run("eval --kind J --a 0 --b 7.0 --nu 1");
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("b < 2π"), "{}", o.stderr);
    let o = run("eval --kind K --a 0.1 --b 7.0 --nu 0.3 --method theorem");
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("direct"), "{}", o.stderr);
    let o = run("eval --kind K --a -1 --b 1 --nu 0.3");
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("domain"), "{}", o.stderr);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(
        run("eval --kind J --a 0.1 --b 1 --nu 0.5 --frobnicate").code,
        64
    );
    assert_eq!(run("eval --kind X --a 0.1 --b 1 --nu 0.5").code, 64);
    assert_eq!(run("solve").code, 64);
    assert_eq!(run("eval --a 0.1 --b 1 --nu 0.5 --tol -1").code, 64);
    assert_eq!(run("--version").code, 0);
}

#[test]
fn verify_quick_passes_every_check() {
    let o = run("verify --suite quick --format json");
    assert_eq!(o.code, 0, "{}", o.stdout);
    let r = Report::from_json(&o.stdout).unwrap();
    assert_eq!(r.checks.len(), 10);
    assert_eq!(r.checks.iter().filter(|c| c.passed).count(), r.checks.len());
}

#[test]
fn json_round_trips_bit_exactly() {
    let o = run("sweep --kind K --a 0.013,0.7,1.9 --b 0.3,2.2 --nu 0.37 --format json");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let r = Report::from_json(&o.stdout).unwrap();
    assert_eq!(r.to_json(), o.stdout);
    for rec in &r.results {
        let again: Report = Report::from_json(&r.to_json()).unwrap();
        let twin = again
            .results
            .iter()
            .find(|x| x.a == rec.a && x.b == rec.b)
            .unwrap();
        assert_eq!(twin.value.to_bits(), rec.value.to_bits());
        assert_eq!(twin.est_error.to_bits(), rec.est_error.to_bits());
    }
}

#[test]
fn sweep_output_follows_grid_order() {
    let o1 = run("sweep --kind J --a 0.5,0.01,2 --b 1,3 --nu 0.25 --format csv");
    let o2 = run("sweep --kind J --a 0.5,0.01,2 --b 1,3 --nu 0.25 --format csv");
    assert_eq!(o1, o2);
    let lines: Vec<&str> = o1.stdout.lines().collect();
    assert_eq!(lines.len(), 7);
    let grid: Vec<(f64, f64)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    let expect: Vec<(f64, f64)> = [0.5, 0.01, 2.0]
        .iter()
        .flat_map(|&a| [1.0, 3.0].map(|b| (a, b)))
        .collect();
    assert_eq!(grid, expect);
}

#[test]
fn sweep_reports_failed_points() {
    let o = run("sweep --kind J --a 0,0.1 --b 7 --nu 0.5 --format json");
    assert_eq!(o.code, 2);
    let r = Report::from_json(&o.stdout).unwrap();
    assert!(r.results[0].error.is_some() && r.results[0].value.is_nan());
    assert!(r.results[1].error.is_none());
}

#[test]
fn table_csv_has_fixed_columns() {
    let o = run("table --kind K --a 0.05 --b 1 --nu 0.3 --methods theorem3-asymptotic,direct --reference direct --levels 1,2,4,8 --format csv");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "method,level,value,abs_error,seconds");
    assert_eq!(lines.len(), 1 + 2 * 4);
    assert!(lines.iter().all(|l| l.split(',').count() == 5));
    let o = run("table --kind J --a 0.5 --b 1 --nu 0.5 --methods direct --levels 3,1");
    assert_eq!(o.code, 2);
}

#[test]
fn table_with_self_reference_reaches_zero() {
    let o = run("table --kind J --a 0.3 --b 1 --nu 0.5 --methods theorem2 --reference theorem2 --levels 1,64 --format json");
    let r = Report::from_json(&o.stdout).unwrap();
    assert_eq!(r.rows.last().unwrap().abs_error, 0.0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_besselsum");
    let st = Command::new(bin)
        .args([
            "eval", "--kind", "K", "--a", "0.5", "--b", "1", "--nu", "0.5",
        ])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&st.stdout).contains("half-integer"));
    let st = Command::new(bin)
        .args(["eval", "--kind", "J", "--a", "0", "--b", "7.0", "--nu", "1"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = Command::new(bin).arg("--nope").output().unwrap();
    assert_eq!(st.status.code(), Some(64));
}
