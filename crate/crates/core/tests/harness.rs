use std::process::Command;

use gibbs_qaoa::harness::{
    emit_fig_data, fig_panels, from_json, run_sweep, to_csv, to_json, Figure, Method, Start, SweepConfig,
    CSV_HEADER, THREADS_ENV,
};
use gibbs_qaoa::variational::Scheme;

fn small_config() -> SweepConfig {
    SweepConfig {
        depths: vec![1, 2, 4],
        temperatures: vec![1.0, 2.0],
        record_timing: false,
        linearized_restarts: 1,
        ..SweepConfig::default()
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gibbs-qaoa"))
}

#[test]
fn sweep_is_deterministic() {
    let cfg = small_config();
    let a = run_sweep(&cfg).unwrap().into_result().unwrap();
    let b = run_sweep(&SweepConfig { threads: Some(1), ..cfg.clone() }).unwrap().into_result().unwrap();
    assert_eq!(a.len(), 3 * (2 + 2 * 2));
    assert_eq!(to_csv(&a), to_csv(&b));

    let csv = to_csv(&a);
    let header = csv.lines().next().unwrap();
    assert_eq!(header, format!("{CSV_HEADER},tvd_T1,tvd_T2"));
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 16);
        assert_eq!(cells[3].is_empty(), cells[0] == "qaoa");
    }
    for r in &a {
        let sum: f64 = r.orbit_probs.iter().sum();
        assert!((sum - r.p_gs).abs() <= 1e-12);
        assert!(r.p_gs <= 1.0 + 1e-12);
    }
}

#[test]
fn json_and_figures_are_projections() {
    let cfg = small_config();
    let recs = run_sweep(&cfg).unwrap().into_result().unwrap();
    assert_eq!(from_json(&to_json(&recs).unwrap()).unwrap(), recs);

    let dir = tempfile::tempdir().unwrap();
    let first = emit_fig_data(&recs, Figure::GroundState, 1.0, dir.path(), true).unwrap();
    let first_text: Vec<String> = first.iter().map(|p| std::fs::read_to_string(p).unwrap()).collect();
    assert_eq!(first.len(), 8);
    let again = emit_fig_data(&recs, Figure::GroundState, 1.0, dir.path(), true).unwrap();
    for (p, text) in again.iter().zip(&first_text) {
        assert_eq!(&std::fs::read_to_string(p).unwrap(), text);
    }
    let fig3 = emit_fig_data(&recs, Figure::Tvd, 1.0, dir.path(), false).unwrap();
    assert_eq!(fig3.len(), 2);

    let panels = fig_panels(&recs, Figure::GroundState, 1.0).unwrap();
    let c = &panels[2];
    let series: Vec<_> = recs
        .iter()
        .filter(|r| r.method == Method::Sbo && r.scheme == Scheme::Full && r.temperature == Some(1.0))
        .collect();
    assert_eq!(c.rows.len(), series.len());
    for (row, r) in c.rows.iter().zip(&series) {
        assert_eq!(row[0], r.p as f64);
        assert_eq!(&row[1..4], &r.orbit_probs[..]);
        assert_eq!(row[4], r.p_gs);
    }
    let tvd = &fig_panels(&recs, Figure::Tvd, 1.0).unwrap()[1];
    assert_eq!(tvd.columns, vec!["p", "D_TVD_T1", "D_TVD_T2"]);
    for row in &tvd.rows {
        for (k, t) in [1.0, 2.0].into_iter().enumerate() {
            let r = recs
                .iter()
                .find(|r| r.scheme == Scheme::Linearized && r.p == row[0] as usize && r.temperature == Some(t))
                .unwrap();
            assert_eq!(row[k + 1], r.tvd.unwrap());
        }
    }
}

#[test]
fn previous_start_never_hurts() {
    let base = SweepConfig {
        methods: vec![Method::Sbo],
        schemes: vec![Scheme::Linearized],
        depths: vec![2, 5, 12],
        temperatures: vec![1.0],
        linearized_restarts: 0,
        record_timing: false,
        ..SweepConfig::default()
    };
    let cold = run_sweep(&SweepConfig { starts: vec![Start::Tqa], ..base.clone() }).unwrap().records;
    let warm = run_sweep(&SweepConfig { starts: vec![Start::Tqa, Start::Previous], ..base }).unwrap().records;
    for (c, w) in cold.iter().zip(&warm) {
        assert!(w.objective <= c.objective);
        assert!(w.n_eval >= c.n_eval);
    }
    assert_eq!(cold[0], warm[0]);
}

#[test]
fn thread_count_resolution() {
    let cfg = SweepConfig { threads: Some(3), ..SweepConfig::default() };
    std::env::set_var(THREADS_ENV, "2");
    assert_eq!(cfg.effective_threads(), 2);
    std::env::set_var(THREADS_ENV, "junk");
    assert_eq!(cfg.effective_threads(), 3);
    std::env::remove_var(THREADS_ENV);
    assert_eq!(cfg.effective_threads(), 3);
}

#[test]
fn cli_exit_codes() {
    let out = bin().args(["verify-instance", "--toy"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("E0 = -4") && text.contains("ground states: 6") && text.contains("PASS"));

    let out = bin().args(["gibbs", "--toy", "-T", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("P_GS = 0.8359"));

    let out = bin().args(["oracle", "--toy", "-T", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("PASS"));

    assert_eq!(bin().arg("--nope").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["gibbs", "--instance", "/no/such/file"]).output().unwrap().status.code(), Some(1));
}

#[test]
fn cli_oracle_reports_failure() {
    // at low temperature the gap above the kernel underflows the tolerance,
    // so uniqueness can no longer be certified
    let out = bin().args(["oracle", "--toy", "-T", "0.1"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(2), "{text}");
    assert!(text.contains("FAIL"));
}

#[test]
fn cli_sweep_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("sweep.cfg");
    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");
    let figs = dir.path().join("figs");
    std::fs::write(
        &cfg_path,
        format!(
            "# small grid\ninstance toy\ndepths 1 2\ntemperatures 1\nlinearized_restarts 0\ntiming false\ncsv {}\njson {}\nfig_dir {}\n",
            csv.display(),
            json.display(),
            figs.display()
        ),
    )
    .unwrap();
    let out = bin().args(["sweep", "--config", cfg_path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 1 + 2 * 4);
    let recs = from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(recs.len(), 8);
    assert_eq!(to_csv(&recs), table);
    for name in ["fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b"] {
        let text = std::fs::read_to_string(figs.join(format!("{name}.dat"))).unwrap();
        assert!(text.starts_with("# p "));
        assert_eq!(text.lines().count(), 3);
    }
}
