use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qwalk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .current_dir(dir)
        .env_remove("QWALK_THREADS")
        .output()
        .expect("qwalk runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let o = qwalk(dir, args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// The `# command:` line of a file, split into arguments after `qwalk`.
fn recorded_command(text: &str) -> Vec<String> {
    let json = serde_json::from_str::<serde_json::Value>(text).ok();
    let line = match &json {
        Some(v) => v["command"].as_str().expect("command field"),
        None => text
            .lines()
            .find_map(|l| l.strip_prefix("# command: "))
            .expect("command header"),
    };
    line.split(' ').skip(1).map(str::to_owned).collect()
}

fn rerun_matches(dir: &Path, first: &str, others: &[&str]) {
    let original = read(dir.join(first));
    let mut args = recorded_command(&original);
    args.extend(["--out".into(), "again".into()]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    ok(dir, &args);
    let suffix = first.split_once('.').map_or("", |(_, s)| s);
    assert_eq!(read(dir.join(format!("again.{suffix}"))), original);
    for f in others {
        let suffix = f.split_once('.').map_or("", |(_, s)| s);
        assert_eq!(
            read(dir.join(format!("again.{suffix}"))),
            read(dir.join(f)),
            "{f}"
        );
    }
}

#[test]
fn hadamard_profile_from_the_command_line() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "evolve", "--mode", "clean", "--theta", "pi/4", "--wall", "minus", "--steps", "80",
            "--out", "run",
        ],
    );
    let text = read(d.path().join("run.dist.csv"));
    let rows: Vec<(i64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[1].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect();
    let peak = rows.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(peak.0, 0);
    let right = rows
        .iter()
        .filter(|r| r.0 > 10)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((45..=58).contains(&right.0), "{right:?}");
    let series = read(d.path().join("run.series.csv"));
    let mut data = series.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(data.next(), Some("t,P0,v,stderr_P0,stderr_v"));
    let first: Vec<f64> = data
        .next()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert!((first[1] - 1.0).abs() < 1e-15 && first[2] == 0.0);
}

#[test]
fn clean_runs_do_not_depend_on_seed() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "evolve",
            "--steps",
            "30",
            "--samples",
            "1",
            "--seed",
            "1",
            "--out",
            "a",
        ],
    );
    ok(
        d.path(),
        &[
            "evolve",
            "--steps",
            "30",
            "--samples",
            "1",
            "--seed",
            "2",
            "--out",
            "b",
        ],
    );
    for s in ["series.csv", "dist.csv", "json"] {
        assert_eq!(
            read(d.path().join(format!("a.{s}"))),
            read(d.path().join(format!("b.{s}")))
        );
    }
}

#[test]
fn evolve_reruns_from_its_header() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "evolve",
            "--mode",
            "spatial",
            "--dtheta-s",
            "pi/4",
            "--steps",
            "40",
            "--samples",
            "9",
            "--seed",
            "12",
            "--stride",
            "5",
            "--snapshots",
            "20,40",
            "--out",
            "run",
        ],
    );
    rerun_matches(d.path(), "run.series.csv", &["run.dist.csv", "run.json"]);
}

#[test]
fn dos_reruns_from_its_header() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "dos",
            "--N",
            "60",
            "--samples",
            "10",
            "--dtheta-s",
            "pi/2",
            "--wall",
            "minus",
            "--seed",
            "4",
            "--out",
            "run",
        ],
    );
    rerun_matches(d.path(), "run.csv", &["run.json"]);
}

#[test]
fn lyapunov_reruns_from_its_header() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "lyapunov",
            "--dtheta-s",
            "pi/4,pi",
            "--delta-omega",
            "1e-8..1e-2:4",
            "--omega",
            "0",
            "--N",
            "20000",
            "--seed",
            "3",
            "--out",
            "run",
        ],
    );
    rerun_matches(d.path(), "run.csv", &["run.json"]);
    let text = read(d.path().join("run.csv"));
    assert!(text.contains("\nomega,delta_omega,dtheta_s,xi,stderr,N,seed\n"));
    assert_eq!(
        text.lines().filter(|l| !l.starts_with('#')).count(),
        1 + 2 * 5
    );
}

#[test]
fn fit_reruns_from_its_header() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "lyapunov",
            "--dtheta-s",
            "pi/2,pi",
            "--delta-omega",
            "1e-11..1e-4:8",
            "--N",
            "20000",
            "--out",
            "xi",
        ],
    );
    ok(
        d.path(),
        &["fit", "xi", "--input", "xi.csv", "--out", "fit"],
    );
    rerun_matches(d.path(), "fit.json", &["fit.collapse.csv"]);
    let report: serde_json::Value = serde_json::from_str(&read(d.path().join("fit.json"))).unwrap();
    assert_eq!(report["results"]["fits"].as_array().unwrap().len(), 2);
    assert!(report["results"]["collapse_scatter"].as_f64().unwrap() < 0.5);
}

#[test]
fn worker_count_never_changes_output() {
    let d = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &[
            "evolve",
            "--mode",
            "temporal",
            "--dtheta",
            "pi/4",
            "--steps",
            "30",
            "--samples",
            "150",
            "--seed",
            "8",
        ],
        &[
            "dos",
            "--N",
            "40",
            "--samples",
            "150",
            "--dtheta-s",
            "pi",
            "--seed",
            "8",
        ],
        &[
            "lyapunov",
            "--dtheta-s",
            "pi/4,pi/2,pi",
            "--delta-omega",
            "1e-3,1e-2",
            "--N",
            "10000",
        ],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut outs = Vec::new();
        for threads in ["1", "4"] {
            let prefix = format!("r{k}_{threads}");
            let mut a: Vec<&str> = args.to_vec();
            a.extend(["--threads", threads, "--out", &prefix]);
            ok(d.path(), &a);
            let mut files: Vec<_> = std::fs::read_dir(d.path())
                .unwrap()
                .map(|e| e.unwrap().file_name().into_string().unwrap())
                .filter(|f| f.starts_with(&format!("{prefix}.")))
                .collect();
            files.sort();
            outs.push(
                files
                    .iter()
                    .map(|f| read(d.path().join(f)))
                    .collect::<Vec<_>>(),
            );
        }
        assert!(!outs[0].is_empty());
        assert_eq!(outs[0], outs[1], "{args:?}");
    }
    // The environment variable is honoured the same way.
    let o = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args([
            "dos",
            "--N",
            "40",
            "--samples",
            "150",
            "--dtheta-s",
            "pi",
            "--seed",
            "8",
            "--out",
            "env",
        ])
        .current_dir(d.path())
        .env("QWALK_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        read(d.path().join("env.csv")),
        read(d.path().join("r1_1.csv"))
    );
}

#[test]
fn malformed_input_exits_two() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("bad.csv"), "delta_omega,xi\n1e-3,oops\n").unwrap();
    let o = qwalk(d.path(), &["fit", "xi", "--input", "bad.csv", "--out", "f"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a number"));
    std::fs::write(d.path().join("cols.csv"), "frequency,xi\n1e-3,2\n").unwrap();
    let o = qwalk(
        d.path(),
        &["fit", "xi", "--input", "cols.csv", "--out", "f"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta_omega"));
    let o = qwalk(
        d.path(),
        &["fit", "xi", "--input", "missing.csv", "--out", "f"],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = qwalk(
        d.path(),
        &["evolve", "--steps", "10", "--sites", "7", "--out", "f"],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = qwalk(d.path(), &["dos", "--bins", "7", "--out", "f"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fitting_extended_states_is_a_numerical_failure() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "lyapunov",
            "--dtheta-s",
            "0",
            "--theta",
            "pi/4",
            "--delta-omega",
            "1e-10..1e-4:7",
            "--N",
            "10000",
            "--out",
            "clean",
        ],
    );
    let o = qwalk(
        d.path(),
        &["fit", "xi", "--input", "clean.csv", "--out", "f"],
    );
    assert_eq!(
        o.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("fit failed"));
}

#[test]
fn edge_states_follow_the_wall() {
    let d = tempfile::tempdir().unwrap();
    let edges = |prefix: &str| -> (f64, f64) {
        let v: serde_json::Value =
            serde_json::from_str(&read(d.path().join(format!("{prefix}.json")))).unwrap();
        let e = &v["results"]["edge_states"];
        (e["at_zero"].as_f64().unwrap(), e["at_pi"].as_f64().unwrap())
    };
    ok(
        d.path(),
        &[
            "dos",
            "--N",
            "500",
            "--samples",
            "20",
            "--dtheta-s",
            "pi/4",
            "--wall",
            "minus",
            "--out",
            "minus",
        ],
    );
    assert_eq!(edges("minus"), (2.0, 2.0));
    ok(
        d.path(),
        &[
            "dos",
            "--N",
            "500",
            "--dtheta-s",
            "0",
            "--wall",
            "plus",
            "--out",
            "plus",
        ],
    );
    assert_eq!(edges("plus"), (0.0, 0.0));
}
