use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mimome-tas"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn report(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn select_from_generated_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(
        &["gen", "--nr", "4", "--nt", "12", "--seed", "3", "--out", "m.mat"],
        d
    )
    .status
    .success());
    assert!(run(
        &["gen", "--nr", "8", "--nt", "12", "--seed", "4", "--out", "e.mat", "--binary"],
        d
    )
    .status
    .success());
    assert!(std::fs::read_to_string(d.join("m.mat"))
        .unwrap()
        .starts_with("MIMOME-MAT v1 4 12\n"));

    let ncsie = run(
        &[
            "select",
            "--scenario",
            "ncsie",
            "--hm",
            "m.mat",
            "-L",
            "4",
            "--rho-m-db",
            "9",
        ],
        d,
    );
    let v = report(&ncsie);
    let idx: Vec<u64> = v["indices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    assert_eq!(idx.len(), 4);
    assert!(idx.windows(2).all(|w| w[0] < w[1]));
    assert!(v["secrecy_capacity_bits"].is_null());

    let args = [
        "select",
        "--scenario",
        "csie",
        "--hm",
        "m.mat",
        "--he",
        "e.mat",
        "-L",
        "3",
        "--rho-m-db",
        "5",
        "--rho-e-db",
        "1",
    ];
    let (a, b) = (report(&run(&args, d)), report(&run(&args, d)));
    for key in [
        "indices",
        "objective_bits",
        "secrecy_capacity_bits",
        "visited_nodes",
    ] {
        assert_eq!(a[key], b[key]);
    }
    let mut es_args = args.to_vec();
    es_args.extend(["--method", "es"]);
    let es = report(&run(&es_args, d));
    let gap = a["objective_bits"].as_f64().unwrap() - es["objective_bits"].as_f64().unwrap();
    assert!(gap.abs() < 1e-9);
    assert_eq!(es["visited_nodes"], 10 + 55 + 220);
}

#[test]
fn mismatched_columns_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        &[
            "gen", "--nr", "4", "--nt", "8", "--seed", "1", "--out", "m.mat",
        ],
        d,
    );
    run(
        &[
            "gen", "--nr", "4", "--nt", "9", "--seed", "2", "--out", "e.mat",
        ],
        d,
    );
    let o = run(
        &[
            "select",
            "--scenario",
            "csie",
            "--hm",
            "m.mat",
            "--he",
            "e.mat",
            "-L",
            "2",
            "--rho-m-db",
            "3",
            "--rho-e-db",
            "1",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension mismatch"));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn bad_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.mat"), "MIMOME-MAT v1 2 2\n1 0\n").unwrap();
    let o = run(
        &["select", "--hm", "bad.mat", "-L", "1", "--rho-m-db", "0"],
        d,
    );
    assert_eq!(o.status.code(), Some(2));
    let o = run(
        &[
            "select",
            "--hm",
            "missing.mat",
            "-L",
            "1",
            "--rho-m-db",
            "0",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(2));
    let o = run(
        &[
            "select",
            "--seed",
            "1",
            "--nt",
            "4",
            "-L",
            "5",
            "--rho-m-db",
            "0",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"], d);
    assert_eq!(o.status.code(), Some(2));
    let o = run(
        &[
            "sweep",
            "--nt",
            "8",
            "--rho-m-db",
            "1",
            "--rho-e-db",
            "1",
            "--trials",
            "0",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(d.join("c.json"), r#"{"scenario":"ncsie","Nr":4,"Ne":4,"L":2,"rho_m_db":1,"rho_e_db":1,"n_trials":0,"methods":["bab"]}"#).unwrap();
    let o = run(&["sweep", "--config", "c.json"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_trials"));
}

#[test]
fn sweep_from_config_writes_csv_json_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("fig.json"),
        r#"{"scenario":"ncsie","Nt":12,"Nr":4,"Ne":8,"L":4,"rho_m_db":[-5,5],"rho_e_db":5,"n_trials":10,"methods":["bab","norm"],"seed":9}"#,
    )
    .unwrap();
    let o = run(
        &[
            "sweep",
            "--config",
            "fig.json",
            "--out",
            "fig.csv",
            "--emit-plot",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.join("fig.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "scenario,method,Nt,Nr,Ne,L,rho_m_db,rho_e_db,n_trials,mean_cs_bits,mean_nodes"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("ncsie,bab,12,4,8,4,-5,5,10,"));
    let plot = std::fs::read_to_string(d.join("fig.bab.dat")).unwrap();
    assert_eq!(plot.lines().filter(|l| !l.starts_with('#')).count(), 2);
    assert!(d.join("fig.norm.dat").exists());

    let o = run(&["sweep", "--config", "fig.json", "--format", "json"], d);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[0]["method"], "bab");

    // Inline flags, complexity sweep over Nt.
    let o = run(
        &[
            "sweep",
            "--scenario",
            "csie",
            "--nt",
            "8:12:4",
            "-L",
            "4",
            "--rho-m-db",
            "9",
            "--rho-e-db",
            "1",
            "--trials",
            "5",
            "--methods",
            "bab,norm,es",
            "--complexity",
            "--emit-plot",
            "--out",
            "c.csv",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.join("c.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    let es_plot = std::fs::read_to_string(d.join("c.es.dat")).unwrap();
    assert!(es_plot.contains("# Nt mean_nodes"));
}

#[test]
fn bench_reports_ratios_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(
        &[
            "bench",
            "--nt",
            "16",
            "-L",
            "4",
            "--rho-m-db",
            "9",
            "--rho-e-db",
            "1",
            "--trials",
            "10",
            "--methods",
            "bab,es",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let bab = out.lines().find(|l| l.starts_with("bab")).unwrap();
    let ratio: f64 = bab.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!(ratio < 1.0);

    let budget = |cap: &str| {
        run(
            &[
                "bench",
                "--nt",
                "30",
                "-L",
                "4",
                "--rho-m-db",
                "1",
                "--rho-e-db",
                "1",
                "--trials",
                "1",
                "--methods",
                "es",
                "--es-cap",
                cap,
            ],
            d,
        )
    };
    let refused = budget("10000");
    assert_eq!(refused.status.code(), Some(4));
    assert!(stderr(&refused).contains("27405"));
    assert!(budget("100000").status.success());

    let o = run(
        &[
            "bench",
            "--nt",
            "20",
            "-L",
            "4",
            "--rho-m-db",
            "9",
            "--rho-e-db",
            "1",
            "--trials",
            "3",
            "--methods",
            "norm",
        ],
        d,
    );
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("norm"))
        .unwrap()
        .to_string();
    assert_eq!(line.split_whitespace().nth(1), Some("20"));
}
