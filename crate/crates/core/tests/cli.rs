use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use geocascade::io::{parse_snapshot, strip_wall_clock, SWEEP_HEADER};

fn geocascade(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geocascade"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

const SMALL_SWEEP: &str = "n_nodes = 400\nL = 200.0\nR = 16.0\nn_runs = 4\n\
    [sweep]\naxis1 = { param = \"phi\", start = 0.05, stop = 0.24, step = 0.01 }\n\
    axis2 = { param = \"R\", start = 10.0, stop = 39.0, step = 1.0 }\n";

#[test]
fn sweep_grid_cardinality_and_header() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("grid.toml"), SMALL_SWEEP).unwrap();
    let out = geocascade(&["sweep", "--config", "grid.toml", "--out", "grid.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows[0], SWEEP_HEADER);
    assert_eq!(rows.len(), 1 + 600);
    assert!(text.contains("# rows: 600\n"));
    assert!(rows[1].starts_with("0.05,10,"));
    assert!(rows[2].starts_with("0.05,11,"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let doc = "phi = 0.1\nR = 16.0\nn_nodes = 500\nL = 220.0\nn_runs = 6\nmaster_seed = 1\n\
               [sweep]\naxis1 = { param = \"p_r\", values = [0.0, 0.05] }\n";
    fs::write(dir.path().join("s.toml"), doc).unwrap();
    let run = |extra: &[&str], out: &str| {
        let mut args = vec!["sweep", "--config", "s.toml", "--out", out];
        args.extend_from_slice(extra);
        assert!(geocascade(&args, dir.path()).status.success());
        strip_wall_clock(&fs::read_to_string(dir.path().join(out)).unwrap())
    };
    let from_config = run(&[], "a.csv");
    let flag_same = run(&["--seed", "1"], "b.csv");
    let flag_other = run(&["--seed", "2"], "c.csv");
    assert_eq!(from_config, flag_same);
    assert!(from_config.contains("# master_seed: 1\n"));
    assert!(flag_other.contains("# master_seed: 2\n"));
}

#[test]
fn run_writes_summary_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let doc = "phi = 0.12\nR = 16.0\nn_nodes = 2500\nL = 500.0\nscheme = \"uniform\"\np_r = 0.01\nseed = \"triple\"\n";
    fs::write(dir.path().join("run.toml"), doc).unwrap();
    let out = geocascade(
        &["run", "--config", "run.toml", "--out", "out/run.csv", "--snapshots", "0,5,100000"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let summary = fs::read_to_string(dir.path().join("out/run.csv")).unwrap();
    let rows = data_rows(&summary);
    assert_eq!(rows.len(), 2);
    let header: Vec<&str> = rows[0].split(',').collect();
    let values: Vec<&str> = rows[1].split(',').collect();
    let field = |name: &str| values[header.iter().position(|h| *h == name).unwrap()];
    let active_count: usize = field("active_count").parse().unwrap();

    let read = |t: usize| {
        let f = fs::File::open(dir.path().join(format!("out/run.snapshot_t{t}.csv"))).unwrap();
        parse_snapshot(std::io::BufReader::new(f)).unwrap()
    };
    let (s0, s5, end) = (read(0), read(5), read(100000));
    assert_eq!(s0.active_count(), 3);
    assert!(s0.active_count() <= s5.active_count() && s5.active_count() <= end.active_count());
    assert_eq!(end.active_count(), active_count);
    if field("is_global") == "1" {
        assert!(end.active_count() as f64 >= 0.85 * 2500.0);
    }
    assert_eq!(end.long_links().count(), 25);
    assert_eq!(field("long_links"), "25");
    assert_eq!(s0.edges, end.edges);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("bad_value.toml"), "phi = 1.5\nR = 16.0\n").unwrap();
    fs::write(p.join("unknown.toml"), "phi = 0.1\nR = 16.0\nradius = 3\n").unwrap();
    fs::write(p.join("no_sweep.toml"), "phi = 0.1\nR = 16.0\n").unwrap();
    fs::write(p.join("sparse.toml"), "phi = 0.1\nR = 0.5\nn_nodes = 50\nL = 100.0\nn_runs = 3\nseed = \"triple\"\n").unwrap();

    let code = |args: &[&str]| geocascade(args, p).status.code();
    assert_eq!(code(&["run", "--config", "bad_value.toml"]), Some(2));
    let out = geocascade(&["run", "--config", "unknown.toml"], p);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("radius") && err.contains("line 3"), "{err}");
    assert_eq!(code(&["sweep", "--config", "no_sweep.toml"]), Some(2));
    assert_eq!(code(&["run", "--config", "sparse.toml"]), Some(3));
    assert_eq!(code(&["run", "--config", "missing.toml"]), Some(4));
    fs::write(p.join("blocker"), "").unwrap();
    assert_eq!(code(&["run", "--config", "no_sweep.toml", "--out", "blocker/x.csv"]), Some(4));
}

#[test]
fn transition_reports_edges_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let doc = "n_nodes = 2500\nL = 500.0\nn_runs = 30\n\
               [sweep]\naxis1 = { param = \"phi\", values = [0.05, 0.1, 0.2] }\n\
               axis2 = { param = \"R\", start = 10.0, stop = 40.0, step = 2.0 }\n";
    fs::write(dir.path().join("t.toml"), doc).unwrap();
    let out = geocascade(&["transition", "--config", "t.toml"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows[0], "phi,r_lower,r_upper");
    assert_eq!(rows.len(), 4);
    let slope: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# upper_boundary_slope: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((-1.0..-0.2).contains(&slope), "{slope}");
}

#[test]
fn readme_config_example_parses() {
    let readme = include_str!("../../../README.md");
    let block = readme.split("```toml\n").nth(1).unwrap().split("```").next().unwrap();
    let doc = geocascade::io::parse_config(block).unwrap();
    let geocascade::io::ConfigDoc::Sweep(spec) = doc else { panic!("expected a sweep") };
    assert_eq!(spec.cells().len(), 3 * 31);
    assert_eq!(spec.base.scheme, geocascade::LinkScheme::cutoff(0.01, 300.0));
}
