use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moea-lab"))
        .args(args)
        .env_remove("MOEA_LAB_SEED")
        .output()
        .unwrap()
}

fn lab_env(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moea-lab"))
        .args(args)
        .env("MOEA_LAB_SEED", seed)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn seed_column(csv: &str) -> Vec<&str> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap())
        .collect()
}

#[test]
fn exit_codes() {
    assert_eq!(
        lab(&["run", "--n", "8", "--iterations", "3"]).status.code(),
        Some(0)
    );
    assert_eq!(
        lab(&["run", "--n", "8", "--algo", "nsga2", "--divisions", "12"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lab(&["run", "--n", "9"]).status.code(), Some(2));
    assert_eq!(
        lab(&["run", "--n", "8", "--crossover-rate", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lab(&["run", "--n", "8", "--stop", "never"]).status.code(),
        Some(2)
    );
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let inside = blocker.join("out.csv");
    let o = lab(&[
        "run",
        "--n",
        "8",
        "--iterations",
        "1",
        "--out",
        inside.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let missing = dir.path().join("nope.spec");
    let o = lab(&[
        "sweep",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_precedence() {
    let base = ["run", "--n", "6", "--iterations", "2"];
    assert!(seed_column(&stdout(&lab(&base))).iter().all(|s| *s == "0"));
    assert!(seed_column(&stdout(&lab_env(&base, "42")))
        .iter()
        .all(|s| *s == "42"));
    let mut flagged = base.to_vec();
    flagged.extend(["--seed", "7"]);
    assert!(seed_column(&stdout(&lab_env(&flagged, "42")))
        .iter()
        .all(|s| *s == "7"));
    assert_eq!(stdout(&lab_env(&base, "42")), stdout(&lab_env(&base, "42")));
    assert_ne!(stdout(&lab_env(&base, "42")), stdout(&lab_env(&base, "43")));
}

#[test]
fn single_config_sweep_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("one.spec");
    fs::write(
        &spec,
        "problem = 3omm\nn = 10\nalgo = nsga3\ndivisions = 47\nchi = 0.5\niterations = 40\nseeds = 3\nseed = 12\n",
    )
    .unwrap();
    let out = dir.path().join("sweep");
    let o = lab(&[
        "sweep",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let run_file = dir.path().join("run.csv");
    let o = lab(&[
        "run",
        "--problem",
        "3omm",
        "--n",
        "10",
        "--algo",
        "nsga3",
        "--divisions",
        "47",
        "--crossover-rate",
        "0.5",
        "--iterations",
        "40",
        "--seeds",
        "3",
        "--seed",
        "12",
        "--out",
        run_file.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read(out.join("runs.csv")).unwrap(),
        fs::read(&run_file).unwrap()
    );
    for id in 0..3 {
        assert!(out.join(format!("runs/run-0000{id}.csv")).exists());
    }
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn summary_recomputes_from_per_run_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.json");
    fs::write(
        &spec,
        r#"{"n": [6, 8], "chi": [0, 0.9], "seeds": 4, "seed": 3, "iterations": 500, "stop": "coverage"}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = lab(&[
        "sweep",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    // (algo, n, N, p, chi) -> iterations to coverage
    let mut by_config: std::collections::BTreeMap<
        (String, String, String, String, String),
        Vec<usize>,
    > = Default::default();
    let mut files: Vec<_> = fs::read_dir(out.join("runs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert_eq!(files.len(), 16);
    for f in files {
        let rows = read_rows(&f);
        let r = &rows[0];
        let key = (
            r[1].clone(),
            r[2].clone(),
            r[3].clone(),
            r[4].clone(),
            r[5].clone(),
        );
        let hit = rows
            .iter()
            .find(|r| r[8] == r[9])
            .map(|r| r[7].parse::<usize>().unwrap());
        by_config.entry(key).or_default().extend(hit);
    }

    let summary = read_rows(&out.join("summary.csv"));
    assert_eq!(summary.len(), 4);
    for s in summary {
        let key = (
            s[2].clone(),
            s[3].clone(),
            s[4].clone(),
            s[5].clone(),
            s[6].clone(),
        );
        let mut t = by_config[&key].clone();
        t.sort();
        assert_eq!(s[9], t.len().to_string());
        let mean = t.iter().sum::<usize>() as f64 / t.len() as f64;
        let median = if t.len() % 2 == 1 {
            t[t.len() / 2] as f64
        } else {
            (t[t.len() / 2 - 1] + t[t.len() / 2]) as f64 / 2.0
        };
        assert_eq!(s[10], mean.to_string());
        assert_eq!(s[11], median.to_string());
        assert_eq!(s[12], t.last().unwrap().to_string());
    }
}

#[test]
fn malformed_and_empty_specs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let bad = dir.path().join("bad.spec");
    fs::write(&bad, "n = 8\nchi = 0.5\nchi 0.9\n").unwrap();
    let o = lab(&[
        "sweep",
        bad.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let empty = dir.path().join("empty.spec");
    fs::write(&empty, "# nothing here\n").unwrap();
    let o = lab(&[
        "sweep",
        empty.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn verification_subcommands() {
    let o = lab(&["verify", "--n", "8", "--p", "168"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,p,min_pairwise_angle,max_assoc_angle,separated,collisions")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!((row[0], row[1], row[4], row[5]), ("8", "168", "true", "0"));

    let o = lab(&["verify", "--n", "8", "--p", "4"]);
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.split(',').nth(5).unwrap().parse::<usize>().unwrap() > 0);

    let o = lab(&["verify-min-p", "--n", "12", "--p-max", "300"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
}
