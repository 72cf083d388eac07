use std::path::Path;
use std::process::{Command, Output};

use pisynth::document::ResultDocument;
use pisynth::tree::Label;

fn pisynth(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pisynth"))
        .current_dir(dir)
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_synth_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let g = pisynth(
        p,
        &[
            "gen", "--system", "linear2d", "--mode", "uniform", "--m", "10000", "--seed", "7",
            "--out", "d.csv",
        ],
    );
    assert_eq!(g.status.code(), Some(0));
    let text = std::fs::read_to_string(p.join("d.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 10_001);

    let s = pisynth(
        p,
        &[
            "synth",
            "--data",
            "d.csv",
            "--lipschitz",
            "0.8225",
            "--tau",
            "0.01",
            "--out",
            "r.json",
            "--svg",
            "r.svg",
        ],
    );
    assert_eq!(
        s.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&s.stderr)
    );
    assert!(stdout(&s).contains("certificate ExactCoverage passed"));
    assert!(std::fs::read_to_string(p.join("r.svg"))
        .unwrap()
        .starts_with("<?xml"));

    let doc = ResultDocument::load(p.join("r.json")).unwrap();
    assert_eq!(doc.manifest.rows, 10_000);
    assert_eq!(doc.manifest.system.as_deref(), Some("linear2d"));
    assert_eq!(doc.manifest.seed, Some(7));
    assert!(doc.certificate.as_ref().unwrap().passed);
    assert!(doc.volume > 0.5);

    let v = pisynth(p, &["verify", "r.json", "--monte-carlo", "20000"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("MonteCarlo passed"));

    // Identical inputs give identical results and identical pictures.
    let again = pisynth(
        p,
        &[
            "synth",
            "--data",
            "d.csv",
            "--lipschitz",
            "0.8225",
            "--tau",
            "0.01",
            "--out",
            "r2.json",
            "--svg",
            "r2.svg",
        ],
    );
    assert_eq!(again.status.code(), Some(0));
    let doc2 = ResultDocument::load(p.join("r2.json")).unwrap();
    assert_eq!(doc2.tree, doc.tree);
    assert_eq!(
        std::fs::read(p.join("r.svg")).unwrap(),
        std::fs::read(p.join("r2.svg")).unwrap()
    );
}

#[test]
fn tampered_radius_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(
        pisynth(
            p,
            &[
                "gen",
                "--system",
                "nonlinear2d",
                "--mode",
                "grid",
                "--tau",
                "0.01",
                "--out",
                "g.csv"
            ]
        )
        .status
        .code(),
        Some(0)
    );
    let s = pisynth(
        p,
        &[
            "synth",
            "--data",
            "g.csv",
            "--lipschitz",
            "5.728",
            "--tau",
            "0.01",
            "--out",
            "r.json",
        ],
    );
    assert_eq!(s.status.code(), Some(0));

    let mut doc = ResultDocument::load(p.join("r.json")).unwrap();
    let nodes = &doc.tree.nodes;
    let id = (0..nodes.len())
        .find(|&i| nodes[i].label == Label::Included && !nodes.iter().any(|n| n.parent == Some(i)))
        .unwrap();
    doc.tree.nodes[id].sample_radius *= 0.9;
    doc.save(p.join("bad.json")).unwrap();
    let v = pisynth(p, &["verify", "bad.json"]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains(&format!("FAILED at leaf {id}")));
}

#[test]
fn empty_result_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    pisynth(
        p,
        &[
            "gen",
            "--system",
            "nonlinear2d",
            "--m",
            "2000",
            "--seed",
            "1",
            "--out",
            "d.csv",
        ],
    );
    let s = pisynth(
        p,
        &[
            "synth",
            "--data",
            "d.csv",
            "--lipschitz",
            "5.728",
            "--tau",
            "0.01",
            "--out",
            "r.json",
        ],
    );
    assert_eq!(s.status.code(), Some(0));
    assert!(stdout(&s).starts_with("volume 0\n"));
    assert_eq!(
        pisynth(p, &["verify", "r.json", "--monte-carlo", "10"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn bounds_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = pisynth(
        dir.path(),
        &[
            "bounds",
            "--domain=-0.25,-1:1,0.25",
            "--tau",
            "0.01",
            "--delta",
            "0.05",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("deterministic  15625\n"));
    assert!(out.contains("canonical      197687\n"));
    assert!(out.contains("warning: sample_count_verbatim"));
    let coarse = pisynth(
        dir.path(),
        &["bounds", "--vol", "1", "--n", "2", "--tau", "1.5"],
    );
    assert_eq!(coarse.status.code(), Some(2));
    let bad_delta = pisynth(
        dir.path(),
        &[
            "bounds", "--vol", "1", "--n", "2", "--tau", "0.1", "--delta", "0",
        ],
    );
    assert_eq!(bad_delta.status.code(), Some(2));
}

#[test]
fn report_groups_results() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::create_dir(p.join("res")).unwrap();
    for (sys, l, seed) in [
        ("linear2d", "0.8225", "1"),
        ("linear2d", "0.8225", "2"),
        ("nonlinear2d", "5.728", "1"),
    ] {
        pisynth(
            p,
            &[
                "gen", "--system", sys, "--m", "2000", "--seed", seed, "--out", "d.csv",
            ],
        );
        let out = format!("res/{sys}-{seed}.json");
        assert_eq!(
            pisynth(
                p,
                &[
                    "synth",
                    "--data",
                    "d.csv",
                    "--lipschitz",
                    l,
                    "--tau",
                    "0.01",
                    "--out",
                    &out
                ]
            )
            .status
            .code(),
            Some(0)
        );
    }
    let r = pisynth(p, &["report", "res", "--out", "summary.csv"]);
    assert_eq!(r.status.code(), Some(0));
    let csv = std::fs::read_to_string(p.join("summary.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("linear2d,2000,0.01,2,"));
    assert!(lines[2].starts_with("nonlinear2d,2000,0.01,1,1,"));
    std::fs::create_dir(p.join("none")).unwrap();
    assert_eq!(pisynth(p, &["report", "none"]).status.code(), Some(2));
}

#[test]
fn usage_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(
        pisynth(p, &["gen", "--system", "bogus", "--m", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pisynth(
            p,
            &["gen", "--system", "linear2d", "--domain", "1,1:0,0", "--m", "5"]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(pisynth(p, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        pisynth(p, &["verify", "missing.json"]).status.code(),
        Some(3)
    );
    std::fs::write(p.join("junk.json"), "{not json").unwrap();
    assert_eq!(pisynth(p, &["verify", "junk.json"]).status.code(), Some(3));
    assert_eq!(
        pisynth(
            p,
            &[
                "synth",
                "--data",
                "missing.csv",
                "--lipschitz",
                "1",
                "--tau",
                "0.1"
            ]
        )
        .status
        .code(),
        Some(3)
    );

    pisynth(
        p,
        &[
            "gen", "--system", "linear2d", "--m", "100", "--out", "d.csv",
        ],
    );
    for (l, tau) in [("0", "0.01"), ("-1", "0.01"), ("1", "0"), ("1", "-0.5")] {
        let o = pisynth(
            p,
            &["synth", "--data", "d.csv", "--lipschitz", l, "--tau", tau],
        );
        assert_eq!(o.status.code(), Some(2), "L={l} tau={tau}");
    }
}

#[test]
fn custom_matrix_and_external_data() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let g = pisynth(
        p,
        &[
            "gen",
            "--matrix",
            "0.5,0.1;0,0.4",
            "--domain=-1,-1:1,1",
            "--m",
            "4000",
            "--out",
            "d.csv",
        ],
    );
    assert_eq!(g.status.code(), Some(0));
    // Hand-written rows without metadata need an explicit domain.
    std::fs::write(
        p.join("plain.csv"),
        "x1,x2,xp1,xp2\n0,0,0,0\n0.5,0.5,0.25,0.25\n",
    )
    .unwrap();
    assert_eq!(
        pisynth(
            p,
            &[
                "synth",
                "--data",
                "plain.csv",
                "--lipschitz",
                "0.5",
                "--tau",
                "0.5"
            ]
        )
        .status
        .code(),
        Some(2)
    );
    let s = pisynth(
        p,
        &[
            "synth",
            "--data",
            "d.csv",
            "--lipschitz",
            "0.6",
            "--tau",
            "0.02",
            "--mode",
            "batch",
        ],
    );
    assert_eq!(s.status.code(), Some(0));
    assert!(stdout(&s).contains("passed"));
}
