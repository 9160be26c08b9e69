//! End-to-end tests of the pdlab binary: exit codes, greppable RESULT
//! lines, output formats, and rendering determinism.

use std::io::Write as _;
use std::process::{Command, Output};

fn pdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn validate_passes_corpus_and_rejects_bad_diagrams() {
    for name in ["gr25", "gr24frozen", "triv13", "triv13twi", "triv13twb"] {
        let out = pdlab(&["validate", &format!("corpus:{}", name)]);
        assert_eq!(code_of(&out), 0, "{} should validate", name);
        assert!(stdout_of(&out).contains("RESULT: PASS"));
    }
    let out = pdlab(&["validate", "tests/fixtures/p4bad.plabic"]);
    assert_eq!(code_of(&out), 1);
    let text = stdout_of(&out);
    assert!(text.contains("RESULT: FAIL"));
    assert!(text.contains("P4"), "names the violated axiom: {}", text);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code_of(&pdlab(&["validate", "corpus:nope"])), 2);
    assert_eq!(code_of(&pdlab(&["validate", "/no/such/file.plabic"])), 2);
    assert_eq!(code_of(&pdlab(&["quiver", "corpus:gr25", "--bogus"])), 2);
    assert_eq!(code_of(&pdlab(&["nosuchcommand"])), 2);
    // A face that cannot be square-moved is a usage error too.
    assert_eq!(
        code_of(&pdlab(&["squaremove", "corpus:gr25", "--face", "15"])),
        2
    );
}

#[test]
fn malformed_input_data_exits_one() {
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    writeln!(f, "plabic v1\nn 3\nnode u b\nnode u w").expect("write");
    let out = pdlab(&["validate", f.path().to_str().expect("utf8 path")]);
    assert_eq!(code_of(&out), 1);
}

#[test]
fn quiver_emits_the_documented_text_format() {
    let out = pdlab(&["quiver", "corpus:gr25", "--reduce"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    let count = |prefix: &str| text.lines().filter(|l| l.starts_with(prefix)).count();
    assert_eq!(count("vertex "), 7);
    assert_eq!(count("arrow "), 14);
    assert_eq!(count("term "), 8);
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("vertex ") && l.ends_with(" f"))
            .count(),
        5
    );
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("arrow ") && l.ends_with(" f"))
            .count(),
        5
    );
    assert!(text.contains("vertex 25 m"));
    assert!(text.contains("vertex 24 m"));
}

#[test]
fn type_and_labels_report_the_diagram_shape() {
    let out = pdlab(&["type", "corpus:gr25"]);
    assert_eq!(stdout_of(&out), "k\tn\n2\t5\n");
    let out = pdlab(&["labels", "corpus:gr25"]);
    let text = stdout_of(&out);
    assert!(text.starts_with("face\tkind\tarc\tlabel\n"));
    for label in ["15", "12", "23", "34", "45", "25", "24"] {
        assert!(
            text.lines().any(|l| l.ends_with(&format!("\t{}", label))),
            "missing label {}",
            label
        );
    }
    let out = pdlab(&["strands", "corpus:triv13"]);
    let text = stdout_of(&out);
    assert!(text.contains("1\t2\tu"));
    assert!(text.contains("3\t1\tu"));
}

#[test]
fn thin_and_cycheck_pass_on_the_corpus() {
    let out = pdlab(&["thin", "corpus:triv13", "--maxdeg", "6"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("RESULT: PASS"));
    assert!(text.starts_with("from\tto\tdegree\tdim\n"));
    let out = pdlab(&[
        "cycheck",
        "corpus:gr24frozen",
        "--maxdeg",
        "8",
        "--positions",
        "-3,-2",
    ]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("RESULT: PASS"));
    // Positions outside the complex are usage errors.
    let out = pdlab(&["cycheck", "corpus:triv13", "--positions", "-7"]);
    assert_eq!(code_of(&out), 2);
}

#[test]
fn squaremove_output_round_trips_as_input() {
    let out = pdlab(&["squaremove", "corpus:gr25", "--face", "25"]);
    assert_eq!(code_of(&out), 0);
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    f.write_all(&out.stdout).expect("write");
    let path = f.path().to_str().expect("utf8 path").to_string();
    let out = pdlab(&["validate", &path]);
    assert_eq!(code_of(&out), 0);
    // Moving back at the relabelled face restores the original labels.
    let out = pdlab(&["squaremove", &path, "--face", "14"]);
    assert_eq!(code_of(&out), 0);
    let mut f2 = tempfile::NamedTempFile::new().expect("temp file");
    f2.write_all(&out.stdout).expect("write");
    let out = pdlab(&["labels", f2.path().to_str().expect("utf8 path")]);
    assert!(stdout_of(&out).lines().any(|l| l.ends_with("\t25")));
}

#[test]
fn exchange_graph_reports_truncation_as_indeterminate() {
    let out = pdlab(&["exchangegraph", "corpus:gr25", "--max", "10"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("seeds 5; edges 5; distinct mutable variables 5; complete true"));
    assert!(text.contains("RESULT: PASS"));
    let out = pdlab(&["exchangegraph", "corpus:gr25", "--max", "3"]);
    assert_eq!(code_of(&out), 3);
    assert!(stdout_of(&out).contains("RESULT: INDETERMINATE"));
    let out = pdlab(&["exchangegraph", "corpus:gr25", "--max", "10", "--dot"]);
    let text = stdout_of(&out);
    assert!(text.contains("graph exchange {"));
    assert!(text.contains("s0 -- "));
}

#[test]
fn seed_commands_print_cluster_variables() {
    let out = pdlab(&["seed", "corpus:gr25"]);
    let text = stdout_of(&out);
    assert!(text.contains("5\t25\tm\tx25"));
    assert!(text.contains("0\t15\tf\tx15"));
    let out = pdlab(&["mutateseed", "corpus:gr25", "--at", "25"]);
    let text = stdout_of(&out);
    assert!(
        text.contains("x12*x45*x25^-1 + x15*x25^-1*x24"),
        "exchange variable missing: {}",
        text
    );
    // The character of the simple at the mutated vertex, with the
    // matching index, is the same Laurent polynomial.
    let out = pdlab(&[
        "char",
        "corpus:gr25",
        "--index",
        "12,45,-25",
        "--module",
        "support=25",
    ]);
    assert_eq!(stdout_of(&out), "x12*x45*x25^-1 + x15*x25^-1*x24\n");
    // The zero module gives back a plain variable.
    let out = pdlab(&[
        "char",
        "corpus:gr25",
        "--index",
        "24",
        "--module",
        "support=",
    ]);
    assert_eq!(stdout_of(&out), "x24\n");
    // Unknown vertices in the module are usage errors.
    let out = pdlab(&[
        "char",
        "corpus:gr25",
        "--index",
        "24",
        "--module",
        "support=99",
    ]);
    assert_eq!(code_of(&out), 2);
}

#[test]
fn necklace_and_wstest_read_the_boundary_labels() {
    let out = pdlab(&["necklace", "corpus:gr25"]);
    let text = stdout_of(&out);
    assert!(text.starts_with("arc\tlabel\n1\t15\n2\t12\n3\t23\n4\t34\n5\t45\n"));
    let out = pdlab(&["wstest", "corpus:gr25"]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("RESULT: PASS"));
}

#[test]
fn measure_supports_files_samples_and_single_subsets() {
    let out = pdlab(&["measure", "corpus:gr24frozen", "--subset", "14"]);
    assert_eq!(stdout_of(&out), "subset\tvalue\n14\t0\n");
    let out = pdlab(&["measure", "corpus:gr24frozen", "--subset", "2,3"]);
    assert_eq!(stdout_of(&out), "subset\tvalue\n23\t1\n");
    // A weight file changes exactly the matchings using that edge.
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    writeln!(f, "edge b w 5/3").expect("write");
    let out = pdlab(&[
        "measure",
        "corpus:gr24frozen",
        "--weights",
        f.path().to_str().expect("utf8 path"),
        "--subset",
        "23",
    ]);
    assert_eq!(stdout_of(&out), "subset\tvalue\n23\t5/3\n");
    // Sampled weights are reproducible per seed.
    let a = pdlab(&["measure", "corpus:gr25", "--rng-seed", "2"]);
    let b = pdlab(&["measure", "corpus:gr25", "--rng-seed", "2"]);
    assert_eq!(stdout_of(&a), stdout_of(&b));
    let c = pdlab(&["measure", "corpus:gr25", "--rng-seed", "3"]);
    assert_ne!(stdout_of(&a), stdout_of(&c));
    // The full table covers every subset.
    let out = pdlab(&["measure", "corpus:gr25"]);
    assert_eq!(stdout_of(&out).lines().count(), 11);
}

#[test]
fn verifygl_passes_on_pentagon_words() {
    for word in ["25", "25,24"] {
        let out = pdlab(&["verifygl", "corpus:gr25", "--word", word, "--rng-seed", "1"]);
        assert_eq!(code_of(&out), 0, "word {}", word);
        assert!(stdout_of(&out).contains("RESULT: PASS"));
    }
    // A word hitting a boundary face leaves the square-move regime.
    let out = pdlab(&["verifygl", "corpus:gr25", "--word", "15"]);
    assert_eq!(code_of(&out), 2);
}

#[test]
fn svg_rendering_is_deterministic_with_diagram_conventions() {
    let a = pdlab(&["svg", "corpus:gr25"]);
    let b = pdlab(&["svg", "corpus:gr25"]);
    assert_eq!(code_of(&a), 0);
    assert_eq!(a.stdout, b.stdout, "byte-identical across runs");
    let text = stdout_of(&a);
    assert!(text.starts_with("<svg "));
    assert_eq!(text.matches("<polygon").count(), 5, "frozen diamonds");
    assert_eq!(text.matches("r=\"14\"").count(), 2, "mutable circles");
    assert_eq!(
        text.matches("stroke-width=\"3\"").count(),
        5,
        "bold frozen arrows"
    );
    let triv = stdout_of(&pdlab(&["svg", "corpus:triv13"]));
    assert_eq!(triv.matches("<polygon").count(), 3);
    assert_eq!(triv.matches("stroke-width=\"3\"").count(), 3);
    let graph = stdout_of(&pdlab(&["svg", "corpus:gr25", "--graph"]));
    assert_eq!(graph.matches("r=\"8\"").count(), 8, "one dot per node");
}

#[test]
fn output_flag_writes_the_same_bytes_to_a_file() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("quiver.txt");
    let to_file = pdlab(&[
        "quiver",
        "corpus:gr25",
        "-o",
        path.to_str().expect("utf8 path"),
    ]);
    assert_eq!(code_of(&to_file), 0);
    assert!(to_file.stdout.is_empty());
    let direct = pdlab(&["quiver", "corpus:gr25"]);
    assert_eq!(std::fs::read(&path).expect("file written"), direct.stdout);
}
