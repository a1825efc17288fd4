use std::collections::BTreeSet;

use shareval_core::search::{estimate, search_grid, Lattice, SearchOptions, SearchReport, SearchTask};
use shareval_core::{Error, FieldElem};

fn small_degree2() -> SearchTask {
    let mut t = SearchTask::degree2();
    t.lattice = Lattice::Gaussian { radius: 1 };
    t.shard_size = 20_000;
    t
}

fn zero_case_two_values() -> SearchTask {
    let mut t = SearchTask::two_values();
    t.values = [0, 1, -1].iter().map(|&n| FieldElem::from_int(n)).collect();
    t
}

fn run(task: &SearchTask) -> SearchReport {
    search_grid(task, &SearchOptions::default()).unwrap()
}

fn hit_functions(r: &SearchReport) -> BTreeSet<String> {
    r.hits.iter().map(|h| format!("{} {}", h.function, h.pair)).collect()
}

#[test]
fn coverage_and_cardinality() {
    for task in [small_degree2(), zero_case_two_values(), SearchTask::question3()] {
        let r = run(&task);
        assert_eq!(r.cardinality, estimate(&task).unwrap());
        assert_eq!(r.tally.analyzed + r.tally.pruned.values().sum::<u64>(), r.cardinality);
    }
}

#[test]
fn theorem_prunes_lose_no_hits() {
    for task in [small_degree2(), zero_case_two_values()] {
        let mut open = task.clone();
        open.prune = false;
        let (a, b) = (run(&task), run(&open));
        assert_eq!(hit_functions(&a), hit_functions(&b));
        assert!(b.tally.analyzed >= a.tally.analyzed);
    }
}

#[test]
fn hits_are_real_and_classified() {
    let r = run(&small_degree2());
    assert!(!r.hits.is_empty());
    assert_eq!(r.novel_hits, 0);
    for h in &r.hits {
        assert!(["r1_6_1", "r2_6_1"].contains(&h.classification.as_str()), "{}", h.classification);
    }
    let r = run(&zero_case_two_values());
    assert!(!r.hits.is_empty());
    for h in &r.hits {
        assert!(h.verdicts.iter().all(|v| v.mode != "not_shared"));
        assert!(h.verdicts.iter().any(|v| v.value == "0"));
    }
}

#[test]
fn reports_are_deterministic() {
    let task = small_degree2();
    assert_eq!(run(&task).to_json(), run(&task).to_json());
}

#[test]
fn resume_after_interruption() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.jsonl");
    let mut task = small_degree2();
    task.shard_size = 20;
    let opts = SearchOptions { checkpoint: Some(path.clone()), ..SearchOptions::default() };
    let full = search_grid(&task, &opts).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() > 4);
    // keep three finished shards and half of the fourth record
    let mut cut = lines[..3].join("\n");
    cut.push('\n');
    cut.push_str(&lines[3][..lines[3].len() / 2]);
    std::fs::write(&path, cut).unwrap();
    let resumed = search_grid(&task, &SearchOptions { resume: true, ..opts.clone() }).unwrap();
    assert_eq!(full.to_json(), resumed.to_json());
    // a second resume reads every shard back from the file
    let again = search_grid(&task, &SearchOptions { resume: true, ..opts.clone() }).unwrap();
    assert_eq!(full.to_json(), again.to_json());

    let mut other = task.clone();
    other.lattice = Lattice::Integer { radius: 1 };
    let err = search_grid(&other, &SearchOptions { resume: true, ..opts }).unwrap_err();
    assert!(matches!(err, Error::Checkpoint(_)));
}

#[test]
fn grid_cap_is_enforced() {
    let opts = SearchOptions { cap: 1000, ..SearchOptions::default() };
    assert!(matches!(search_grid(&small_degree2(), &opts), Err(Error::GridTooLarge { .. })));
}

#[test]
fn question1_small_grid_has_no_nonzero_c() {
    let mut t = SearchTask::question1();
    t.lattice = Lattice::Integer { radius: 2 };
    let r = run(&t);
    assert_eq!(r.novel_hits, 0);
    assert!(r.statement.starts_with("no hits"));
}
