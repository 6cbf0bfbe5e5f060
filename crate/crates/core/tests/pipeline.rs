use std::fs;
use std::path::Path;

use ks_core::pipeline::catalog::read_records;
use ks_core::pipeline::{load_catalog, report_counts, run_search, validate_record, verify_known, JobSpec, RunControl};
use ks_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(dir: &Path, n_max: usize, depth: usize, workers: usize) -> JobSpec {
    let mut s = JobSpec::new(1, n_max, dir);
    s.tickets_depth = depth;
    s.workers = workers;
    s
}

#[test]
fn catalog_is_identical_across_runs_and_worker_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sa = run_search(&spec(a.path(), 9, 5, 1), false, RunControl::default()).unwrap();
    let sb = run_search(&spec(b.path(), 9, 5, 3), false, RunControl::default()).unwrap();
    assert!(sa.complete && sb.complete);
    let ca = fs::read(a.path().join("catalog.jsonl")).unwrap();
    assert_eq!(ca, fs::read(b.path().join("catalog.jsonl")).unwrap());
    assert_eq!(fs::read(a.path().join("summary.json")).unwrap(), fs::read(b.path().join("summary.json")).unwrap());
    let counts: Vec<u64> = sa.per_n.values().map(|r| r.count).collect();
    assert_eq!(counts, [1, 1, 2, 3, 8, 19, 57, 186, 740]);
    assert_eq!(sa.ticket_count_sum, counts.iter().sum::<u64>());
    assert!(sa.uncolourable.is_empty());
}

#[test]
fn interrupted_runs_resume_to_the_same_catalog() {
    let reference = tempfile::tempdir().unwrap();
    run_search(&spec(reference.path(), 9, 4, 2), false, RunControl::default()).unwrap();
    let want = fs::read(reference.path().join("catalog.jsonl")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..4 {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(dir.path(), 9, 4, 2);
        let mut resume = false;
        let mut rounds = 0;
        loop {
            let limit = rng.gen_range(0..60);
            let summary = run_search(&s, resume, RunControl { max_tickets: Some(limit) }).unwrap();
            resume = true;
            rounds += 1;
            if trial % 2 == 1 && !summary.complete {
                // simulate a crash mid-write: a stray temp shard and a torn log line
                fs::write(dir.path().join("shards").join("n09-stray.tmp"), "{\"graph6\":").unwrap();
                let mut log = fs::OpenOptions::new().append(true).open(dir.path().join("done.log")).unwrap();
                use std::io::Write;
                write!(log, "{{\"n\":9,\"tick").unwrap();
            }
            if summary.complete {
                break;
            }
            assert!(rounds < 200);
        }
        assert_eq!(fs::read(dir.path().join("catalog.jsonl")).unwrap(), want, "trial {trial}");
    }
}

#[test]
fn records_revalidate() {
    let dir = tempfile::tempdir().unwrap();
    run_search(&spec(dir.path(), 8, 5, 0), false, RunControl::default()).unwrap();
    let records = load_catalog(dir.path()).unwrap();
    assert_eq!(records.len(), 1 + 1 + 2 + 3 + 8 + 19 + 57 + 186);
    for r in &records {
        validate_record(r).unwrap();
        assert!(r.timestamp.is_none());
    }
    let shards: Vec<_> = fs::read_dir(dir.path().join("shards")).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(shards.iter().any(|p| read_records(p).unwrap().iter().any(|r| r.timestamp.is_some())));
}

#[test]
fn tampered_records_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    run_search(&spec(dir.path(), 5, 3, 0), false, RunControl::default()).unwrap();
    let mut r = load_catalog(dir.path()).unwrap().pop().unwrap();
    r.flags.colourable_101 = !r.flags.colourable_101;
    assert!(validate_record(&r).is_err());
}

#[test]
fn report_counts_rows() {
    let dir = tempfile::tempdir().unwrap();
    run_search(&spec(dir.path(), 6, 3, 0), false, RunControl::default()).unwrap();
    let csv = report_counts(&load_catalog(dir.path()).unwrap(), 10).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,count,extrapolated_count,extrapolated_cumulative");
    assert!(rows[3].starts_with("3,2,"));
    assert!(rows[4].starts_with("4,3,"));
    assert!(rows[10].starts_with("10,,"));
    assert!(matches!(report_counts(&[], 10), Err(Error::Precondition(_))));
}

#[test]
fn specs_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(dir.path(), 5, 3, 0);
    s.grid_ladder = vec![2, 1];
    assert!(matches!(run_search(&s, false, RunControl::default()), Err(Error::InvalidSpec(_))));
    let mut s = spec(dir.path(), 5, 3, 0);
    s.n_min = 6;
    assert!(s.validate().is_err());
    let mut s = spec(dir.path(), 5, 3, 0);
    s.delta = 0.0;
    assert!(s.validate().is_err());
}

#[test]
fn existing_jobs_need_resume_and_a_matching_spec() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec(dir.path(), 5, 3, 0);
    run_search(&s, false, RunControl::default()).unwrap();
    assert!(run_search(&s, false, RunControl::default()).is_err());
    let again = run_search(&s, true, RunControl::default()).unwrap();
    assert!(again.complete);
    let mut other = s.clone();
    other.delta = 1e-3;
    assert!(run_search(&other, true, RunControl::default()).is_err());
}

#[test]
fn unknown_bundle_is_an_error() {
    assert!(matches!(verify_known("fig-2"), Err(Error::UnknownBundle(_))));
}

#[test]
fn random_batches_are_reproducible() {
    use ks_core::pipeline::random::{random_graphs, RandomModel};
    let a = random_graphs(14, 20, 5, RandomModel::SquareFree).unwrap();
    assert_eq!(a, random_graphs(14, 20, 5, RandomModel::SquareFree).unwrap());
    assert_ne!(a, random_graphs(14, 20, 6, RandomModel::SquareFree).unwrap());
    assert!(a.iter().all(|g| g.is_square_free()));
}
