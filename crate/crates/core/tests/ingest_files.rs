use std::fs;

use chrono::NaiveDate;
use pamix::ingest::{build_replay, load_dataset, replay_to_samplelog};

const EDGES: &str = "# citing cited\n1001 1000\n2001 1000\n2001 1001\n2002 2001\n2002 2002\n2003 1000\n2003 2099\n2003 2099\n";
const DATES: &str = "# id date\n1001\t1992-02-11\n2001\t1992-03-02\n2002\t1992-03-02\n2003\t1992-04-20\n";

#[test]
fn replay_from_files_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.txt");
    let dates = dir.path().join("dates.txt");
    fs::write(&edges, EDGES).unwrap();
    fs::write(&dates, DATES).unwrap();

    let cutoff = NaiveDate::from_ymd_opt(1992, 2, 29).unwrap();
    let run = || {
        let (ds, report) = load_dataset(&edges, &dates).unwrap();
        let replay = replay_to_samplelog(&build_replay(&ds, cutoff).unwrap());
        let mut csv = Vec::new();
        replay.log.write_csv(&mut csv).unwrap();
        (report, replay.manifest, csv)
    };
    let (report, manifest, csv) = run();
    assert_eq!(report.self_citations, 1);
    assert_eq!(report.duplicate_edges, 1);
    assert_eq!((manifest.seed_nodes, manifest.seed_edges), (2, 1));
    assert_eq!(manifest.arrivals, 3);
    assert_eq!((manifest.final_nodes, manifest.final_edges), (6, 6));
    assert_eq!(
        String::from_utf8(csv.clone()).unwrap(),
        "step,k,e_prev,n_prev\n1,1,1,2\n1,0,1,2\n2,0,3,3\n3,2,4,4\n3,0,4,4\n"
    );
    let (_, manifest2, csv2) = run();
    assert_eq!(manifest, manifest2);
    assert_eq!(csv, csv2);
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_dataset(&dir.path().join("nope"), &dir.path().join("nope2")).unwrap_err();
    assert!(err.is_io());
}
