//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use divmon_core::{
    brute_force_divisibility, census, full_suite, is_garside, local_delta, quasi_center, upsilon_iteration,
    validate_divisibility, Alphabet, CanonicalPresentation, CensusOptions, ClassBudget, ConditionId, Element,
    HasseFormat, Monoid, QuadraticPresentation, RelationPair, SamplingPlan,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pres(generators: &[&str], relations: &[(&str, &str)]) -> QuadraticPresentation {
    QuadraticPresentation::from_relations(generators, relations).expect("well-formed sample presentation")
}

fn m35() -> QuadraticPresentation {
    pres(&["x", "y", "z"], &[("x x", "y z"), ("y y", "z x"), ("z z", "x y")])
}

fn m1() -> QuadraticPresentation {
    pres(&["x", "y", "z"], &[("x y", "y z"), ("y x", "z y")])
}

fn m2() -> QuadraticPresentation {
    pres(&["x", "y", "z"], &[("x z", "y x"), ("y z", "z x")])
}

fn census_counts() -> Outcome {
    let mut details = Vec::new();
    for (rank, expected, limit) in [(2, 2, 1), (3, 5, 30), (4, 23, 600)] {
        let started = Instant::now();
        let report = census(rank, &CensusOptions::default()).map_err(|e| format!("rank {rank}: {e}"))?;
        let elapsed = started.elapsed();
        ensure(report.garside_divisibility == expected, || {
            format!("rank {rank}: {} Garside divisibility monoids, expected {expected}", report.garside_divisibility)
        })?;
        ensure(elapsed <= Duration::from_secs(limit), || {
            format!("rank {rank} took {elapsed:.2?}, limit {limit} s")
        })?;
        details.push(format!("rank {rank}: {expected} in {elapsed:.2?}"));
    }
    Ok(details.join(", "))
}

fn rank_three_quasi_centers() -> Outcome {
    let report = census(3, &CensusOptions::default()).map_err(|e| e.to_string())?;
    let ranks = report.garside_quasi_center_ranks;
    ensure(ranks == [1, 2, 2, 2, 3], || format!("quasi-center ranks {ranks:?}"))?;
    Ok(format!("{ranks:?}"))
}

fn elements(m: &Monoid, words: &[&str]) -> BTreeSet<Element> {
    words.iter().map(|w| m.parse_element(w).expect("sample word")).collect()
}

fn m35_golden() -> Outcome {
    let m = Monoid::divisibility(m35()).map_err(|e| e.to_string())?;
    let x = m.generator(0);
    let trace = upsilon_iteration(&m, &x).map_err(|e| e.to_string())?;
    ensure(trace.failure.is_none(), || "Υ iteration of x failed".into())?;
    ensure(trace.stages.get(1) == Some(&elements(&m, &["1", "x", "z"])), || "Υ_1(x) != {1,x,z}".into())?;
    let full = elements(&m, &["1", "x", "y", "z"]);
    ensure(trace.stages.len() == 3 && trace.stages[2] == full, || "Υ_2(x) != {1,x,y,z} fixpoint".into())?;
    let cube = m.parse_element("x x x").map_err(|e| e.to_string())?;
    for g in m.generators() {
        let d = local_delta(&m, &g).map_err(|e| e.to_string())?.delta;
        ensure(d.as_ref() == Some(&cube), || format!("Δ({}) != x x x", m.render(&g)))?;
    }
    let qc = quasi_center(&m).map_err(|e| e.to_string())?;
    ensure(qc.rank() == 1 && qc.generators == [cube], || "quasi-center is not generated by x x x".into())?;
    Ok("Υ stages, Δ = x x x for all generators, quasi-center rank 1".into())
}

fn upsilon_examples() -> Outcome {
    let m = Monoid::divisibility(m1()).map_err(|e| e.to_string())?;
    let qc = quasi_center(&m).map_err(|e| e.to_string())?;
    ensure(qc.generators == [m.generator(1)], || "M1 quasi-center is not generated by {y}".into())?;

    let m = Monoid::divisibility(m2()).map_err(|e| e.to_string())?;
    let (x, y, z) = (m.generator(0), m.generator(1), m.generator(2));
    for g in [&x, &z] {
        let outcome = local_delta(&m, g).map_err(|e| e.to_string())?;
        ensure(!outcome.exists() && outcome.trace.stages.len() == 1, || {
            format!("Δ({}) in M2 does not fail immediately", m.render(g))
        })?;
    }
    let at_y = local_delta(&m, &y).map_err(|e| e.to_string())?;
    let failure = at_y.trace.failure.ok_or("Δ(y) in M2 exists")?;
    ensure(failure.c == x && failure.b == z, || {
        format!("Δ(y) fails at ({}, {})", m.render(&failure.c), m.render(&failure.b))
    })?;
    ensure(m.right_lcm(&x, &z).map_err(|e| e.to_string())?.is_none(), || "x ∨ z exists in M2".into())?;
    ensure(quasi_center(&m).map_err(|e| e.to_string())?.rank() == 0, || "M2 quasi-center is not trivial".into())?;
    Ok("M1 quasi-center {y}; M2 deltas fail, y at (x, z); M2 quasi-center trivial".into())
}

fn trace_presentations(rank: usize) -> Vec<QuadraticPresentation> {
    let pairs: Vec<(u8, u8)> = (0..rank as u8).flat_map(|a| (a + 1..rank as u8).map(move |b| (a, b))).collect();
    (0..1u32 << pairs.len())
        .map(|mask| {
            let relations = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & 1 << i != 0)
                .filter_map(|(_, &(a, b))| RelationPair::new([a, b], [b, a]));
            QuadraticPresentation::new(Alphabet::standard(rank), relations).expect("trace presentation")
        })
        .collect()
}

fn validator_verdicts() -> Outcome {
    let bad = validate_divisibility(&pres(&["x", "y", "z"], &[("x x", "y z"), ("x y", "z z")]));
    ensure(!bad.accepted(), || "<x,y,z : xx=yz, xy=zz> accepted".into())?;
    let v = &bad.violations[0];
    ensure(v.condition == ConditionId::KuskeI && v.witness.first().map(String::as_str) == Some("x x x"), || {
        format!("rejection {:?} at {:?}, expected K-i at x x x", v.condition, v.witness)
    })?;
    for relations in [
        vec![("x y", "y z")],
        vec![("x x", "y z")],
        vec![("x x", "y z"), ("y x", "z z")],
    ] {
        let p = pres(&["x", "y", "z"], &relations);
        ensure(validate_divisibility(&p).accepted(), || format!("{p} rejected"))?;
    }
    let mut traces = 0;
    for rank in 1..=4 {
        for p in trace_presentations(rank) {
            ensure(validate_divisibility(&p).accepted(), || format!("trace presentation {p} rejected"))?;
            traces += 1;
        }
    }
    Ok(format!("K-i at x x x; 3 non-trace accepted; {traces} trace presentations accepted"))
}

fn hypercubes() -> Outcome {
    let mut certified = 0;
    for rank in 2..=4 {
        let report = census(rank, &CensusOptions::default()).map_err(|e| e.to_string())?;
        for entry in report.entries.iter().filter(|e| e.garside == Some(true)) {
            ensure(entry.simple_lattice_size == Some(1 << rank) && entry.hypercube == Some(true), || {
                format!("{}: simple lattice {:?}, hypercube {:?}", entry.presentation, entry.simple_lattice_size, entry.hypercube)
            })?;
            if rank == 3 {
                let p = CanonicalPresentation {
                    rank,
                    encoding: entry.encoding.clone(),
                }
                .presentation();
                let m = Monoid::divisibility(p).map_err(|e| e.to_string())?;
                let lattice = is_garside(&m).map_err(|e| e.to_string())?.simple_lattice.ok_or("no simple lattice")?;
                let dot = lattice.export_hasse(HasseFormat::Dot).map_err(|e| e.to_string())?;
                let nodes = dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count();
                let edges = dot.matches("->").count();
                ensure(nodes == 8 && edges == 12, || format!("{}: {nodes} nodes, {edges} edges", entry.presentation))?;
            }
            certified += 1;
        }
    }
    Ok(format!("{certified} Garside entries certified; rank 3 Hasse diagrams are 8 nodes / 12 edges"))
}

fn property_suites() -> Outcome {
    let samples = [
        ("free2", pres(&["x", "y"], &[])),
        ("N2", pres(&["x", "y"], &[("x y", "y x")])),
        ("K", pres(&["x", "y"], &[("x x", "y y")])),
        ("M1", m1()),
        ("M2", m2()),
        ("DIV1", pres(&["x", "y", "z"], &[("x y", "y z")])),
        ("M35", m35()),
    ];
    let started = Instant::now();
    let mut checks = 0;
    for (name, p) in samples {
        let m = Monoid::divisibility(p).map_err(|e| format!("{name}: {e}"))?;
        let report = full_suite(&m, &SamplingPlan::default()).map_err(|e| format!("{name}: {e}"))?;
        ensure(report.passed(), || format!("{name}: {:?}", report.violations.first()))?;
        checks += report.checked.values().sum::<usize>();
    }
    let elapsed = started.elapsed();
    ensure(elapsed <= Duration::from_secs(60), || format!("took {elapsed:.2?}"))?;
    Ok(format!("{checks} checks, 0 violations, {elapsed:.2?}"))
}

fn oracle_cross_check() -> Outcome {
    let started = Instant::now();
    let mut details = Vec::new();
    for rank in 1..=3 {
        let report = census(rank, &CensusOptions::default()).map_err(|e| e.to_string())?;
        let pruned: BTreeSet<CanonicalPresentation> = report
            .entries
            .iter()
            .map(|e| CanonicalPresentation {
                rank,
                encoding: e.encoding.clone(),
            })
            .collect();
        let oracle = brute_force_divisibility(rank, ClassBudget::default()).map_err(|e| e.to_string())?;
        ensure(pruned == oracle, || {
            format!("rank {rank}: pruned {} vs brute force {}", pruned.len(), oracle.len())
        })?;
        details.push(format!("rank {rank}: {}", oracle.len()));
    }
    let elapsed = started.elapsed();
    ensure(elapsed <= Duration::from_secs(300), || format!("took {elapsed:.2?}"))?;
    Ok(format!("{} divisibility classes agree, {elapsed:.2?}", details.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("census counts 2/5/23", census_counts),
        ("rank-3 quasi-center ranks", rank_three_quasi_centers),
        ("M_{3,5} local deltas", m35_golden),
        ("M1/M2 local deltas", upsilon_examples),
        ("validator verdicts", validator_verdicts),
        ("simple lattices are hypercubes", hypercubes),
        ("property suites", property_suites),
        ("pruned census vs brute force", oracle_cross_check),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({reason})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
