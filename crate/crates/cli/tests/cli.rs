use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const FAST: [&str; 6] = ["--n", "1024", "--dt", "0.004", "--workers", "1"];

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tunnelclock"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("TUNNELCLOCK_WORKERS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_writes_record_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[&["simulate", "--v", "1.5"], &FAST[..]].concat(), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let csv = fs::read_to_string(dir.path().join("boundary_record.csv")).unwrap();
    assert!(csv.starts_with("t,rho_L,rho_R\n"));
    assert!(csv.lines().count() > 100);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert_eq!(json["status"], "ok");
    assert_eq!(json["config"]["n"], 1024);
    let dt = json["dt_tunnel"].as_f64().unwrap();
    let (t_in, t_out) = (json["t_in"].as_f64().unwrap(), json["t_out"].as_f64().unwrap());
    assert_eq!(dt, t_out - t_in);
    assert_eq!(json["regime"], "II");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [&["sweep-velocity", "--v-from", "1.0", "--v-to", "1.4", "--v-step", "0.2", "--plot"], &FAST[..]].concat();
    assert_eq!(code(&run(&args, a.path())), 0);
    let mut args_two = args.clone();
    *args_two.last_mut().unwrap() = "2";
    assert_eq!(code(&run(&args_two, b.path())), 0);
    for name in ["sweep.csv", "result.json", "fig2a.svg", "fig2b.svg"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
    let csv = fs::read_to_string(a.path().join("sweep.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "v,E0,t_in,t_out,dt_tunnel,transmission,t_classical,t_semiclassical,regime,status"
    );
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn fit_reads_a_sweep_back() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = [&["sweep-velocity", "--v-from", "0.65", "--v-to", "1.0", "--v-step", "0.05"], &FAST[..]].concat();
    assert_eq!(code(&run(&sweep, dir.path())), 0);
    let input = dir.path().join("sweep.csv");
    let fit_dir = dir.path().join("fit");
    let o = run(
        &["fit", "--input", input.to_str().unwrap(), "--ii-from", "0.65", "--ii-to", "1.0"],
        &fit_dir,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("regime II"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fit_dir.join("result.json")).unwrap()).unwrap();
    assert_eq!(json["regime_ii_fit"]["model"], "linear-law");
    assert!(json["regime_i_fit"].is_null());
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--q", "-1"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`q` out of bounds"));

    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "q = 2\nwidth = 1\n").unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = run(&["simulate", "--n", "1000"], dir.path());
    assert_eq!(code(&o), 1);
    let o = run(&["simulate", "--species", "He4"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn numerics_failure_exits_with_two_and_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[&["simulate", "--t-final-cap", "3"], &FAST[..]].concat(), dir.path());
    assert_eq!(code(&o), 2);
    let json = fs::read_to_string(dir.path().join("result.json")).unwrap();
    assert!(json.contains("t_final_cap"));

    let o = run(
        &[&["sweep-velocity", "--v-from", "1.0", "--v-to", "1.2", "--v-step", "0.2", "--t-final-cap", "3"], &FAST[..]].concat(),
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    fs::write(&cfg, "# narrow grid\nn = 1024\ndt = 0.004\nv = 1.1\nw = 0.8\n").unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--w", "0.9"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["w"], 0.9);
    assert_eq!(json["config"]["v"], 1.1);
    assert_eq!(json["config"]["n"], 1024);
}

#[test]
fn convert_prints_milliseconds() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["convert", "--value", "0.4795", "--kind", "time"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("0.656 ms"), "{}", stdout(&o));

    let o = run(&["convert", "--value", "1", "--kind", "length", "--species", "Li7"], dir.path());
    assert!(stdout(&o).starts_with("1.000 um"));

    let o = run(&["convert", "--value", "0.000656", "--kind", "time", "--inverse"], dir.path());
    let x: f64 = stdout(&o).split_whitespace().next().unwrap().parse().unwrap();
    assert!((x - 0.4794).abs() < 1e-3, "{x}");
}

#[test]
fn schema_and_help() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["schema"], dir.path());
    assert_eq!(code(&o), 0);
    let schema: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(schema["files"]["boundary_record.csv"].is_object());

    let o = run(&["--help"], dir.path());
    assert!(stdout(&o).contains("rho_L"));
}
