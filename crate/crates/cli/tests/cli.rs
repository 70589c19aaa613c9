use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn codegree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codegree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_table_has_classical_rows() {
    let o = codegree(&["bounds", "--t", "4", "--r", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("t,r,ell,n,value,kind,provenance,status,seed,version\n"));
    assert!(out.contains("4,3,,,5/9,classical-lo,derived,ok,"));
    assert!(out.contains("4,3,,,2/3,classical-hi,derived,ok,"));
    assert!(!out.contains("tau-lo"), "no envelope without constants");

    let o = codegree(&["bounds", "--t", "16", "--r", "3", "--c1", "0.5", "--c2", "24"]);
    let out = stdout(&o);
    assert!(out.contains(",tau-lo,user-supplied,"), "{out}");
    assert!(out.contains(",tau-hi,user-supplied,"), "{out}");
}

#[test]
fn oracle_record() {
    let o = codegree(&["oracle", "--n", "5", "--t", "3", "--r", "3", "--ell", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("3,3,2,5,3,oracle,derived,ok,"));
    let o = codegree(&["oracle", "--n", "9", "--t", "3", "--r", "3", "--ell", "2"]);
    assert_eq!(o.status.code(), Some(2), "too large for the oracle");
}

#[test]
fn steiner_blowup_alpha_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.txt");
    let b = dir.path().join("b.txt");
    let o = codegree(&["gen-steiner", "--m", "9", "--r", "3", "--restarts", "3", "--seed", "7", "--out", path(&s)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&s).unwrap();
    assert!(text.contains("# kind=steiner"));

    let o = codegree(&["blowup", path(&s), "--d", "2", "--t", "40", "--out", path(&b)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let witness = fs::read_to_string(dir.path().join("b.txt.witness.csv")).unwrap();
    let row = witness.lines().nth(1).unwrap();
    assert!(row.starts_with("40,3,2,18,1/8,witness,derived,ok,"), "{row}");

    let o = codegree(&["codegree", path(&b)]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("18,3,2,"));

    let exact = codegree(&["alpha", path(&b)]);
    let brute = codegree(&["alpha", path(&b), "--method", "exhaustive"]);
    let alpha_of = |o: &Output| stdout(o).lines().nth(1).unwrap().split(',').nth(2).unwrap().to_string();
    assert_eq!(alpha_of(&exact), alpha_of(&brute));
}

#[test]
fn inconclusive_alpha_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.txt");
    assert!(codegree(&["gen-steiner", "--m", "30", "--seed", "1", "--out", path(&s)]).status.success());
    let o = codegree(&["alpha", path(&s), "--node-budget", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("exact-bb,inconclusive,"));
}

#[test]
fn subsample_prints_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("fano.txt");
    fs::write(&f, "3 7 7\n0 1 2\n0 3 4\n0 5 6\n1 3 5\n1 4 6\n2 3 6\n2 4 5\n").unwrap();
    let b = dir.path().join("b.txt");
    let sub = dir.path().join("sub.txt");
    assert!(codegree(&["blowup", path(&f), "--d", "3", "--out", path(&b)]).status.success());
    let o = codegree(&["subsample", path(&b), "--epsilon", "2", "--seed", "4", "--out", path(&sub)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    assert_eq!(line.lines().count(), 1);
    assert!(line.contains("\"m\": 20"), "{line}");
    assert!(fs::read_to_string(&sub).unwrap().starts_with("# kind=subsample"));

    let o = codegree(&["subsample", path(&b), "--epsilon", "2", "--seed", "4", "--stats", "200"]);
    assert!(stdout(&o).contains("\"trials\": 200"));
    let o = codegree(&["subsample", path(&b), "--epsilon", "0.5", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = [
        "",
        "3 4\n",
        "3 4 1\n0 1 2 3\n",
        "3 4 1\n0 1 9\n",
        "3 4 2\n0 1 2\n0 1 2\n",
        "3 4 1\n2 1 0\n",
        "x y z\n",
        "3 4 2\n0 1 2\n",
        "3 -4 0\n",
        "99999999999999999999 4 0\n",
    ];
    for (i, text) in corpus.iter().enumerate() {
        let f = dir.path().join(format!("bad{i}.txt"));
        fs::write(&f, text).unwrap();
        for args in [vec!["alpha", path(&f)], vec!["codegree", path(&f)], vec!["blowup", path(&f), "--d", "2", "--out", "/dev/null"]] {
            let o = codegree(&args);
            assert_eq!(o.status.code(), Some(2), "{text:?} {args:?}: {}", stderr(&o));
        }
    }
    assert_eq!(codegree(&["alpha", "/no/such/file"]).status.code(), Some(2));
    assert_eq!(codegree(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(codegree(&["gen-steiner", "--m", "9"]).status.code(), Some(2));
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "# comment\nmode = scaling\nr = 3\nt_list = 16, 8\nseed = 1\n").unwrap();
    let o = codegree(&["experiment", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    fs::write(&cfg, "mode = scaling\nr = 3\nt_list = 8, 16\nc2_guess = 15\n").unwrap();
    let o = codegree(&["experiment", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
}

#[test]
fn experiment_writes_to_output_dir_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    let out_dir = dir.path().join("results");
    fs::write(
        &cfg,
        format!(
            "mode = oracle-sweep\nr = 3\nt_list = 3, 4, 5\nn_max = 6\nseed = 1\noutput_dir = {}\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let o = codegree(&["experiment", path(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out_dir.join("oracle-sweep.csv")).unwrap();
    assert!(csv.contains("4,3,2,6,2,oracle,derived,ok,1,"), "{csv}");

    let alt = dir.path().join("alt.csv");
    assert!(codegree(&["experiment", path(&cfg), "--seed", "8", "--out", path(&alt)]).status.success());
    assert!(fs::read_to_string(alt).unwrap().contains("4,3,2,6,2,oracle,derived,ok,8,"));
}

#[test]
fn help_documents_columns_and_exit_codes() {
    let o = codegree(&["--help"]);
    let out = stdout(&o);
    assert!(out.contains("t,r,ell,n,value,kind,provenance,status,seed,version"));
    assert!(out.contains("Exit codes"));
}
