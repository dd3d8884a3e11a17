use riemplan::harness::export::{read_json, write_json, write_runs_csv, PathExport, RUNS_HEADER};
use riemplan::harness::{Algorithm, Experiment, ScenarioConfig};

fn experiment(name: &str, n: usize) -> Experiment {
    let mut cfg = ScenarioConfig::preset(name).unwrap();
    cfg.planner.n_samples = n;
    Experiment::new(cfg).unwrap()
}

#[test]
fn exported_path_is_self_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let exp = experiment("peak6-4d", 2000);
    let (rec, out) = exp.run_single(Algorithm::RrtStarR, 3).unwrap();
    let file = dir.path().join("path.json");
    write_json(&file, &exp.path_export(&rec, &out)).unwrap();
    let back: PathExport = read_json(&file).unwrap();
    let recomputed = exp.model().curve_length(&back.planar, riemplan::planner::PATH_LENGTH_PANELS).unwrap();
    assert!(((recomputed - back.h_length) / back.h_length).abs() < 1e-6);
    assert_eq!(back.lifted.len(), back.planar.len());
    assert!(back.lifted.iter().all(|p| p.coords().len() == 4));
}

#[test]
fn repeat_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let exp = experiment("repeat-3d", 1500);
    let bytes = |tag: &str| {
        let r = exp.run_repeat(Algorithm::RrtStarR, 4, 100).unwrap();
        let file = dir.path().join(format!("runs-{tag}.csv"));
        write_runs_csv(&file, &r.records).unwrap();
        std::fs::read(file).unwrap()
    };
    let a = bytes("a");
    assert_eq!(a, bytes("b"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), RUNS_HEADER.join(","));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn planner_never_beats_the_geodesic() {
    let exp = experiment("peak1-3d", 3000);
    let oracle = exp.run_geodesic_oracle().unwrap();
    let r = exp.run_repeat(Algorithm::RrtStarR, 4, 0).unwrap();
    for rec in &r.records {
        assert!(rec.h_length.unwrap() >= oracle.length - 1e-3, "{rec:?} vs {}", oracle.length);
    }
}
