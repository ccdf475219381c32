use std::fs;
use std::process::{Command, Output};

use crosstalk::netlist::Netlist;

fn crosstalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crosstalk"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const AND_OR: &str =
    "input A\ninput B\nctrl Ct\ngate g kind=POLY_AND_OR in=A,B ctrl=Ct out=Y\noutput F=Y\n";

#[test]
fn verify_against_builtin_functions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("and_or.net");
    fs::write(&path, AND_OR).unwrap();
    let p = path.to_str().unwrap();

    let ok = crosstalk(&["verify", p, "--oracle", "and2", "--ctrl", "Ct=0"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("4/4 cases pass"));

    let high = crosstalk(&[
        "verify", p, "--oracle", "or2", "--ctrl", "Ct=1", "--mode", "analog",
    ]);
    assert_eq!(high.status.code(), Some(0));

    let bad = crosstalk(&[
        "verify", p, "--oracle", "or2", "--ctrl", "Ct=0", "--format", "machine",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["exit_status"], 1);
    assert_eq!(report["results"]["failures"].as_array().unwrap().len(), 2);

    let table = dir.path().join("f.tt");
    fs::write(&table, "# or2, LSB first\n0111\n").unwrap();
    let file = crosstalk(&[
        "verify",
        p,
        "--oracle",
        table.to_str().unwrap(),
        "--ctrl",
        "Ct=1",
    ]);
    assert_eq!(file.status.code(), Some(0));

    let faulty = crosstalk(&[
        "verify",
        p,
        "--oracle",
        "and2",
        "--ctrl",
        "Ct=0",
        "--fault",
        "stuck:Y=0",
    ]);
    assert_eq!(faulty.status.code(), Some(1));
}

#[test]
fn usage_and_io_errors_exit_two() {
    assert_eq!(
        crosstalk(&["verify", "/no/such/file", "--oracle", "and2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(crosstalk(&["synth", "0001", "0001"]).status.code(), Some(2));
    assert_eq!(crosstalk(&["synth", "012"]).status.code(), Some(2));
    assert_eq!(crosstalk(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.net");
    fs::write(&path, AND_OR).unwrap();
    // missing control value
    assert_eq!(
        crosstalk(&["verify", path.to_str().unwrap(), "--oracle", "and2"])
            .status
            .code(),
        Some(2)
    );
    // arity mismatch with the oracle
    assert_eq!(
        crosstalk(&[
            "verify",
            path.to_str().unwrap(),
            "--oracle",
            "and3",
            "--ctrl",
            "Ct=0"
        ])
        .status
        .code(),
        Some(2)
    );
    let p = dir.path().join("p.txt");
    fs::write(&p, "M 11 10\n").unwrap();
    let args = [
        "faults",
        "--program",
        p.to_str().unwrap(),
        "--rediscover-every",
        "0",
    ];
    assert_eq!(crosstalk(&args).status.code(), Some(2));
}

#[test]
fn synth_reports() {
    let o = crosstalk(&["synth", "0001", "0111"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("weights 1,1 ctrl 1 theta 2\n"));
    let x = crosstalk(&["synth", "0110"]);
    assert_eq!(x.status.code(), Some(1));
    assert!(stdout(&x).starts_with("infeasible"));
    let single = crosstalk(&["synth", "00000001"]);
    assert_eq!(stdout(&single), "weights 1,1,1 theta 3\n");
}

#[test]
fn msa_commands() {
    let v = crosstalk(&["msa", "verify"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("total: 48/48 pass"));

    let census = crosstalk(&["msa", "census", "--format", "machine"]);
    let report: serde_json::Value = serde_json::from_slice(&census.stdout).unwrap();
    assert_eq!(report["results"]["reported"]["gates"], 31);
    assert_eq!(report["results"]["reported"]["transistors"], 155);
    assert_eq!(report["results"]["economy_holds"], true);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("msa.net");
    let e = crosstalk(&["msa", "export", "--out", out.to_str().unwrap()]);
    assert_eq!(e.status.code(), Some(0));
    assert!(e.stdout.is_empty());
    let n = Netlist::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(
        n.gates().len(),
        crosstalk::msa_block::build_msa().gates().len()
    );

    // the exported file is an ordinary netlist: verify it with a fault
    let faulted = crosstalk(&["msa", "verify", "--fault", "dead_block:bit3"]);
    assert_eq!(faulted.status.code(), Some(1));
}

#[test]
fn fault_campaigns() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("prog.txt");
    fs::write(
        &prog,
        "M 11 10\nS 11 10\nA 11 10\nM 10 01\nS 10 01\nA 10 01\n",
    )
    .unwrap();
    let prog = prog.to_str().unwrap();

    let clean = crosstalk(&["faults", "--program", prog, "--format", "machine"]);
    assert_eq!(clean.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&clean.stdout).unwrap();
    let kinds: Vec<&str> = r["results"]["log"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds.iter().filter(|k| **k == "discovery").count(), 1);
    assert_eq!(kinds.iter().filter(|k| **k == "reroute").count(), 0);

    let two = dir.path().join("two.txt");
    fs::write(&two, "0 dead block1\n0 dead block2\n").unwrap();
    let o = crosstalk(&[
        "faults",
        "--program",
        prog,
        "--schedule",
        two.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("6 correct, 0 wrong, 0 unrecoverable"));

    let three = dir.path().join("three.txt");
    fs::write(&three, "0 dead block1\n0 dead block2\n0 dead block3\n").unwrap();
    let o = crosstalk(&[
        "faults",
        "--program",
        prog,
        "--schedule",
        three.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("0 correct, 0 wrong, 6 unrecoverable"));
}

#[test]
fn table2_figures() {
    let o = crosstalk(&["table2", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = r["results"]["rows"].as_array().unwrap();
    let row = |name: &str| rows.iter().find(|x| x["circuit"] == name).unwrap().clone();
    assert_eq!(row("AND2-OR2")["computed"], 5);
    assert_eq!(row("AND2-OR2")["reported_cmos"], 18);
    assert_eq!(row("AND2-OR2")["reported_nwfet"], 6);
    assert_eq!(
        r["results"]["msa_reduction_percent"]["reported_vs_cmos"],
        62
    );
    assert_eq!(
        r["results"]["msa_reduction_percent"]["reported_vs_nwfet"],
        28
    );
}

#[test]
fn reports_are_byte_stable() {
    for args in [
        &["table2", "--format", "machine"][..],
        &["msa", "census", "--format", "machine"],
        &["msa", "verify"],
        &["synth", "0001", "0111", "--format", "machine"],
    ] {
        let a = crosstalk(args);
        let b = crosstalk(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
