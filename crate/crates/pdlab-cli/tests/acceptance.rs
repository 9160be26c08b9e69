//! Acceptance gate: one test per shipping criterion.  Each test prints a
//! single `criterion N: PASS|FAIL` line (visible with `--nocapture`) and
//! enforces its own wall-clock budget.
//!
//! Criterion 3 deserves a note up front: its negative control asks for a
//! single potential-term sign flip that breaks exactness.  No such flip
//! exists — every term of a diagram potential contains a boundary-leg
//! arrow occurring in that term alone, so rescaling the arrow by -1 is an
//! algebra isomorphism absorbing the flip.  `criterion_3` therefore
//! prints an honest FAIL for that clause (the positive clause passes) and
//! asserts the gauge-triviality it rests on; `criterion_3_control_strict`
//! states the clause literally and is `#[ignore]`d because it can never
//! pass.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use pdlab_core::algebra::{boundary_truncation, verify_thin};
use pdlab_core::cluster::{
    cluster_character_thin, exchange_graph, exchange_monomials, mutate_seed, projective_class,
    seed_from_diagram, verify_exchange_relation, LaurentPoly, Seed, ThinModule,
};
use pdlab_core::corpus;
use pdlab_core::cy::{check_exactness, graded_resolution_length, sign_flip_survey};
use pdlab_core::moves::square_move;
use pdlab_core::parse_plabic;
use pdlab_core::positroid::{
    all_boundary_measurements, plucker_relations_ok, verify_specialization, WeightedPlabic,
};
use pdlab_core::quiver::{qp_from_diagram, reduce_qp, untwist_boundary};
use pdlab_core::{IceQP, PlabicGraph};

fn diagram(name: &str) -> PlabicGraph {
    parse_plabic(corpus::lookup(name).expect("corpus name")).expect("corpus parses")
}

fn reduced(name: &str) -> IceQP {
    let (qp, _) = reduce_qp(&qp_from_diagram(&diagram(name)).expect("diagram builds a QP"))
        .expect("QP reduces");
    qp
}

fn pdlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pdlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Print the one-line verdict and enforce the budget.  Call last, after
/// all content assertions, so a failing criterion still names its
/// failing check rather than a generic line.
fn report(criterion: u32, verdict: &str, started: Instant, budget: Duration, detail: &str) {
    let elapsed = started.elapsed();
    println!(
        "criterion {}: {} ({:.2}s) — {}",
        criterion,
        verdict,
        elapsed.as_secs_f64(),
        detail
    );
    assert!(
        elapsed < budget,
        "criterion {} exceeded its {:?} budget: {:?}",
        criterion,
        budget,
        elapsed
    );
}

#[test]
fn criterion_1_reduced_quiver_shape() {
    let started = Instant::now();
    let out = pdlab(&["quiver", "corpus:gr25", "--reduce"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).expect("utf8");
    let vertex_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("vertex ")).collect();
    let arrow_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("arrow ")).collect();
    let term_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("term ")).collect();
    assert_eq!(vertex_lines.len(), 7);
    assert_eq!(vertex_lines.iter().filter(|l| l.ends_with(" f")).count(), 5);
    assert_eq!(arrow_lines.len(), 14);
    assert_eq!(arrow_lines.iter().filter(|l| l.ends_with(" f")).count(), 5);
    assert_eq!(term_lines.len(), 8);
    let mut labels: Vec<&str> = vertex_lines
        .iter()
        .map(|l| l.split_whitespace().nth(1).expect("vertex id"))
        .collect();
    labels.sort();
    assert_eq!(labels, ["12", "15", "23", "24", "25", "34", "45"]);
    report(
        1,
        "PASS",
        started,
        Duration::from_secs(1),
        "reduced pentagon quiver: 7 vertices (5 frozen), 14 arrows (5 frozen), 8 terms, \
         labels {12,23,34,45,15,25,24}",
    );
}

#[test]
fn criterion_2_thinness_certificates() {
    let started = Instant::now();
    for (name, n) in [("gr25", 5u32), ("gr24frozen", 4), ("triv13", 3)] {
        let one = Instant::now();
        let out = pdlab(&[
            "thin",
            &format!("corpus:{}", name),
            "--maxdeg",
            &(2 * n).to_string(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{} thin run", name);
        let text = String::from_utf8(out.stdout).expect("utf8");
        assert!(text.contains("RESULT: PASS"), "{}: {}", name, text);
        assert!(
            one.elapsed() < Duration::from_secs(10),
            "{} exceeded its per-diagram budget",
            name
        );
    }
    report(
        2,
        "PASS",
        started,
        Duration::from_secs(30),
        "every graded piece is at most one-dimensional on gr25, gr24frozen and triv13 \
         up to degree 2n",
    );
}

#[test]
fn criterion_3_exactness_and_sign_flip_control() {
    let started = Instant::now();
    // Positive clause: the complex at every vertex of every corpus
    // diagram is exact in positions -3 and -2 within degree 8.
    let mut vertex_checks = 0usize;
    for (name, text) in corpus::ALL {
        let qp = reduced_from_text(text);
        let (td, rep) = verify_thin(&qp, 8).expect("thinness verifies");
        assert!(rep.passed, "{} is thin", name);
        for v in 0..qp.quiver.vertices.len() {
            let report = check_exactness(&td, v, &[-3, -2]).expect("checker runs");
            assert!(
                report.passed,
                "{} vertex {} shows homology: {:?}",
                name, report.vertex, report.failures
            );
            vertex_checks += 1;
        }
    }
    // Control clause: flip each potential term sign in turn and look for
    // a vertex where exactness breaks.  None exists; assert that
    // gauge-triviality so this analysis is re-checked on every run.
    let mut flips = 0usize;
    for (_, text) in corpus::ALL {
        let qp = qp_from_diagram(&parse_plabic(text).expect("parses")).expect("builds");
        for o in sign_flip_survey(&qp, 6, &[-3, -2]).expect("survey runs") {
            assert!(o.witnesses.is_empty(), "flip unexpectedly found a witness");
            flips += 1;
        }
    }
    for o in sign_flip_survey(&reduced("gr25"), 8, &[-3, -2]).expect("survey runs") {
        assert!(o.witnesses.is_empty(), "flip unexpectedly found a witness");
        flips += 1;
    }
    report(
        3,
        "FAIL",
        started,
        Duration::from_secs(60),
        &format!(
            "positive clause passes ({} vertex checks exact at positions -3,-2 within \
             degree 8), but the required failing control does not exist: all {} \
             single-term sign flips are gauge-trivial, since each term contains a leg \
             arrow lying in that term alone and rescaling it by -1 is an isomorphism \
             absorbing the flip; reported red rather than substituting a weaker control",
            vertex_checks, flips
        ),
    );
}

fn reduced_from_text(text: &str) -> IceQP {
    let (qp, _) =
        reduce_qp(&qp_from_diagram(&parse_plabic(text).expect("parses")).expect("builds"))
            .expect("reduces");
    qp
}

/// The control clause of criterion 3, stated literally.  Ignored because
/// it is unattainable: see the module docs and `criterion_3` for the
/// gauge-triviality argument.  Run with `--ignored` to watch it fail.
#[test]
#[ignore = "no single-term sign flip can break exactness; kept as the literal statement"]
fn criterion_3_control_strict() {
    let qp = reduced("gr25");
    let outcomes = sign_flip_survey(&qp, 8, &[-3, -2]).expect("survey runs");
    assert!(
        outcomes.iter().any(|o| !o.witnesses.is_empty()),
        "criterion demands a sign flip with a homology witness; every flip is absorbed \
         by rescaling the unique leg arrow of the flipped term"
    );
}

#[test]
fn criterion_4_resolution_lengths() {
    let started = Instant::now();
    let qp = reduced("gr24frozen");
    let (td, rep) = verify_thin(&qp, 8).expect("thinness verifies");
    assert!(rep.passed);
    let mut lengths: BTreeMap<String, usize> = BTreeMap::new();
    for v in 0..qp.quiver.vertices.len() {
        let (len, tor) = graded_resolution_length(&td, v).expect("resolution certified");
        assert_eq!(tor[0], 1, "Tor0 is the simple itself");
        lengths.insert(qp.quiver.vertices[v].id.clone(), len);
    }
    let max = *lengths.values().max().expect("has vertices");
    assert_eq!(max, 2, "lengths {:?}", lengths);
    assert_eq!(lengths.get("13"), Some(&2));
    for short in ["12", "23", "34"] {
        assert_eq!(lengths.get(short), Some(&1), "lengths {:?}", lengths);
    }
    report(
        4,
        "PASS",
        started,
        Duration::from_secs(5),
        "graded resolution lengths on gr24frozen are {12:1, 23:1, 34:1, 13:2}, maximum 2",
    );
}

#[test]
fn criterion_5_pentagon_exchange_graph() {
    let started = Instant::now();
    let seed = seed_from_diagram(&diagram("gr25")).expect("seed builds");
    let graph = exchange_graph(&seed, 64).expect("graph explores");
    assert!(graph.complete, "exploration hit the cap");
    assert_eq!(graph.seeds.len(), 5);
    assert_eq!(graph.edges.len(), 5);
    assert_eq!(graph.mutable_variable_count(), 5);
    let frozen_ids: Vec<&str> = ["15", "12", "23", "34", "45"].to_vec();
    for (i, s) in graph.seeds.iter().enumerate() {
        // Quivers stay clean: no loops, no directed 2-cycles.
        let mut pairs = std::collections::BTreeSet::new();
        for a in &s.quiver.arrows {
            assert_ne!(a.tail, a.head, "seed {} has a loop", i);
            pairs.insert((a.tail, a.head));
        }
        for &(t, h) in &pairs {
            assert!(
                !pairs.contains(&(h, t)),
                "seed {} has a 2-cycle between {} and {}",
                i,
                t,
                h
            );
        }
        // Frozen slots persist verbatim: same ids, untouched variables.
        for (slot, &id) in frozen_ids.iter().enumerate() {
            assert_eq!(s.quiver.vertices[slot].id, id);
            assert!(s.quiver.vertices[slot].frozen);
            assert_eq!(s.vars[slot], LaurentPoly::var(7, slot));
        }
    }
    let out = pdlab(&["exchangegraph", "corpus:gr25", "--max", "10"]);
    assert_eq!(out.status.code(), Some(0));
    report(
        5,
        "PASS",
        started,
        Duration::from_secs(5),
        "exchange graph of gr25 is the pentagon: 5 seeds, 5 edges, 5 distinct mutable \
         variables, clean quivers, frozen data persists",
    );
}

#[test]
fn criterion_6_cluster_character() {
    let started = Instant::now();
    let qp = reduced("gr25");
    let seed = seed_from_diagram(&diagram("gr25")).expect("seed builds");
    let nv = seed.vars.len();
    let slot25 = seed
        .quiver
        .vertex_index("25")
        .expect("pentagon has face 25");
    // The character of the thin simple at 25 with index [P12]+[P45]-[P25]
    // is the mutated variable there.
    let mut index = vec![0i64; nv];
    index[seed.quiver.vertex_index("12").expect("face 12")] = 1;
    index[seed.quiver.vertex_index("45").expect("face 45")] = 1;
    index[slot25] = -1;
    let phi = cluster_character_thin(&qp, &index, &ThinModule::simple(slot25))
        .expect("character computes");
    let mutated = mutate_seed(&seed, slot25).expect("mutation applies");
    assert_eq!(phi, mutated.vars[slot25]);
    // The zero module with index [P_j] recovers each initial variable.
    let zero = ThinModule {
        support: Default::default(),
        arrows: Default::default(),
    };
    for j in 0..nv {
        let phi_j = cluster_character_thin(&qp, &projective_class(nv, j), &zero)
            .expect("character computes");
        assert_eq!(phi_j, LaurentPoly::var(nv, j), "slot {}", j);
    }
    // Every exchange-graph edge satisfies a genuine exchange relation.
    // Slot arrangements of stored seeds are path-dependent, so recompute
    // each edge's far seed from its near seed before comparing slots.
    let graph = exchange_graph(&seed, 64).expect("graph explores");
    assert_eq!(graph.edges.len(), 5);
    for e in &graph.edges {
        let from: &Seed = &graph.seeds[e.from];
        let next = mutate_seed(from, e.slot).expect("mutation applies");
        assert_eq!(next.cluster_key(), graph.seeds[e.to].cluster_key());
        let (plus, minus) = exchange_monomials(from, e.slot);
        assert!(
            verify_exchange_relation(&from.vars[e.slot], &next.vars[e.slot], &plus, &minus),
            "edge {:?} fails its exchange relation",
            e
        );
    }
    report(
        6,
        "PASS",
        started,
        Duration::from_secs(1),
        "character of the thin simple at 25 equals the mutated variable, projective \
         indices recover initial variables, and all 5 pentagon edges satisfy exchange \
         relations",
    );
}

#[test]
fn criterion_7_specialization_and_plucker() {
    let started = Instant::now();
    let g = diagram("gr25");
    // The five words end at the five pentagon seeds; verify_specialization
    // checks every mutable slot of its final seed, so together these
    // cover every mutable variable of every seed.
    let words: [&[&str]; 5] = [&[], &["25"], &["24"], &["25", "24"], &["24", "25"]];
    for rng_seed in [0u64, 1, 2] {
        let wg = WeightedPlabic::sample(&g, rng_seed);
        for word in words {
            let ok = verify_specialization(&g, &wg, word).expect("protocol runs");
            assert!(ok, "rng seed {} word {:?}", rng_seed, word);
        }
        let values = all_boundary_measurements(&wg).expect("measurements compute");
        assert!(
            plucker_relations_ok(&values, g.n),
            "rng seed {} measurements break a three-term relation",
            rng_seed
        );
    }
    report(
        7,
        "PASS",
        started,
        Duration::from_secs(10),
        "for 3 sampled weightings, cluster variables specialize to minors along all 5 \
         mutation words and the measurements satisfy every three-term relation",
    );
}

#[test]
fn criterion_8_twisted_triangles_normalize() {
    let started = Instant::now();
    let table_of = |qp: &IceQP| {
        let (td, rep) = verify_thin(qp, 6).expect("thinness verifies");
        assert!(rep.passed);
        full_dim_table(&td)
    };
    let plain = table_of(&qp_from_diagram(&diagram("triv13")).expect("builds"));
    let (twi, _) =
        reduce_qp(&qp_from_diagram(&diagram("triv13twi")).expect("builds")).expect("reduces");
    assert_eq!(table_of(&twi), plain, "interior-twisted triangle");
    let (twb_red, _) =
        reduce_qp(&qp_from_diagram(&diagram("triv13twb")).expect("builds")).expect("reduces");
    let (twb, _) = untwist_boundary(&twb_red).expect("boundary pair removed");
    assert_eq!(table_of(&twb), plain, "boundary-twisted triangle");
    report(
        8,
        "PASS",
        started,
        Duration::from_secs(5),
        "both twisted triangles reduce to algebras with the same graded dimension \
         table as the plain one up to degree 6",
    );
}

/// Graded dimension table keyed by (source id, target id, total degree).
fn full_dim_table(td: &pdlab_core::algebra::ThinData) -> BTreeMap<(String, String, u32), usize> {
    let mut acc = BTreeMap::new();
    for (v, w, wt, bucket) in td.buckets_iter() {
        if bucket.dim == 0 {
            continue;
        }
        *acc.entry((
            td.qp.quiver.vertices[v].id.clone(),
            td.qp.quiver.vertices[w].id.clone(),
            wt.iter().sum::<u32>(),
        ))
        .or_default() += bucket.dim;
    }
    acc
}

#[test]
fn criterion_9_square_move_preserves_boundary_algebra() {
    let started = Instant::now();
    let table = |g: &PlabicGraph| {
        let (td, rep) =
            verify_thin(&qp_from_diagram(g).expect("builds"), 10).expect("thinness verifies");
        assert!(rep.passed);
        boundary_truncation(&td)
    };
    let before = diagram("gr25");
    let after = square_move(&before, "25").expect("square move applies");
    let rows = table(&before);
    assert!(!rows.is_empty());
    assert_eq!(rows, table(&after));
    report(
        9,
        "PASS",
        started,
        Duration::from_secs(30),
        "boundary-restricted graded dimensions of gr25 agree with its square move at \
         face 25 up to degree 10",
    );
}
