//! End-to-end pipelines through the public API.

use elastic_bounds::export::{load_compliance, load_profile, save_compliance, save_profile};
use elastic_bounds::pea_design::{
    actuator_load, bistable_family, dissipation_dominated_design, freeplay, matched_freeplay_stiffness, one_way_drive,
    polynomial_family,
};
use elastic_bounds::power::{metrics_pea_loop, power_metrics};
use elastic_bounds::sea_design::{actuator_displacement, dwell_time_compliance, optimal_linear_compliance};
use elastic_bounds::signal::Signal;
use elastic_bounds::verify::{forward_integrate, verify_pea_design, verify_sea_design, Drive, IntegrationOptions};
use elastic_bounds::*;

fn reference(m: f64, c: f64, cq: f64) -> (DynamicsModel, PeriodicWaveform, LoadWaveform) {
    let w = make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, 2048).unwrap();
    let d = if m == 0.0 { DynamicsModel::dissipation_dominated(c, cq) } else { DynamicsModel::new(m, c, cq) }.unwrap();
    let g = inelastic_load(&d, &w);
    (d, w, g)
}

#[test]
fn pea_families_agree_across_loop_and_time_domains() {
    let (_, w, g) = reference(1.0, 1.0, 0.0);
    let l = build_pea_loop(&g, &w).unwrap();
    let k = matched_freeplay_stiffness(&l, 0.2).unwrap();
    let families = [
        polynomial_family(&l, 1.0, 3, 0.5).unwrap(),
        freeplay(&l, k, 0.2).unwrap(),
        bistable_family(&l, 0.3, 0.02).unwrap(),
        one_way_drive(&l, Side::Lower),
    ];
    let q = Penalty::Constant(1.33);
    for fs in &families {
        assert!(check_elastic_bound(fs, &l, None).optimal, "{:?}", fs.summary().representation);
        let f = actuator_load(fs, &g, &w).unwrap();
        let t = power_metrics(&f, &w.velocity(), &q).unwrap();
        let lp = metrics_pea_loop(&l, fs, &q, &q).unwrap();
        for (a, b) in [(t.p_a, lp.p_a), (t.p_b, lp.p_b), (t.p_c, lp.p_c), (t.p_d, lp.p_d)] {
            assert!((a - b).abs() <= 1e-6 * t.p_b, "{a} vs {b}");
        }
        assert!((t.p_b - t.p_a).abs() <= 1e-6 * t.p_a);
    }
}

#[test]
fn exported_profile_keeps_its_verdict() {
    let (_, w, g) = reference(1.0, 1.0, 0.0);
    let l = build_pea_loop(&g, &w).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("stiff.csv");
    save_profile(&p, &ElasticProfile::linear(1.5, (l.x1, l.x2)), 401).unwrap();
    let back = load_profile(&p).unwrap();
    let r = check_elastic_bound(&back, &l, None);
    assert!(!r.optimal && r.max_violation > 0.1);
}

#[test]
fn verify_suites_pass_on_reference_designs() {
    let (d, w, g) = reference(1.0, 1.0, 0.0);
    let l = build_pea_loop(&g, &w).unwrap();
    let s = verify_pea_design(&d, &w, &l, &ElasticProfile::linear(1.0, (l.x1, l.x2)), 2.0).unwrap();
    assert!(s.passed, "{s:?}");

    let sl = build_sea_loop(&g, &w).unwrap();
    let (_, k1) = optimal_linear_compliance(1.0, 1.0, 1.0).unwrap();
    let cp = ComplianceProfile::linear(k1, (sl.f1, sl.f2), 0.0).unwrap();
    let s = verify_sea_design(&d, &w, &sl, &cp, 2.0).unwrap();
    assert!(s.passed, "{s:?}");
}

#[test]
fn sea_dwell_compliance_is_optimal_and_round_trips() {
    let (_, w, f) = reference(1.0, 1.0, 0.0);
    let l = build_sea_loop(&f, &w).unwrap();
    let cp = dwell_time_compliance(&l, Side::Lower).unwrap();
    assert!(check_sea_bound(&cp, &l, None).optimal);
    let u = actuator_displacement(&cp, &f, &w).unwrap();
    let r = power_metrics(&f, &u.rate_signal(), &Penalty::Constant(2.0)).unwrap();
    assert!((r.p_b - r.p_a).abs() <= 1e-6 * r.p_a);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("lin.csv");
    let lin = ComplianceProfile::linear(2.0, (l.f1, l.f2), 0.0).unwrap();
    save_compliance(&p, &lin, 257).unwrap();
    assert!(check_sea_bound(&load_compliance(&p).unwrap(), &l, None).optimal);
}

#[test]
fn zero_inertia_designs_are_neutral() {
    let (d, w, g) = reference(0.0, 1.0, 0.0);
    let l = build_pea_loop(&g, &w).unwrap();
    let fs = one_way_drive(&l, Side::Upper);
    let r = dissipation_dominated_design(&d, &w, &g, &l, &fs).unwrap();
    assert!(r.unidirectional);
    assert!(r.improvement.abs() <= 1e-9 * r.p_b_inelastic);
    assert!(r.bound.optimal);
}

#[test]
fn forward_integration_tracks_prescribed_cycle() {
    let (d, w, g) = reference(1.0, 1.0, 0.0);
    let fs = ElasticProfile::linear(1.0, (-1.0, 1.0));
    let f = actuator_load(&fs, &g, &w).unwrap();
    let drive = Drive::Pea { profile: fs, load: f };
    let t = forward_integrate(&d, &drive, IntegrationOptions { x0: 1.0, ..Default::default() }, Some(&w)).unwrap();
    assert!(t.converged && !t.diverged);
    assert!(t.deviation_from_prescribed.unwrap() < 1e-4);
}

#[test]
fn mismatched_grids_and_missing_inertia_are_errors() {
    let (d0, w, g) = reference(0.0, 1.0, 0.0);
    let other = Signal::from_fn(w.period(), 512, f64::sin, f64::cos);
    assert!(matches!(power_metrics(&g, &other, &Penalty::Constant(1.0)), Err(Error::GridMismatch(_))));
    let drive = Drive::Pea { profile: ElasticProfile::zero((-1.0, 1.0)), load: g.clone() };
    assert!(forward_integrate(&d0, &drive, IntegrationOptions::default(), None).is_err());
    assert!(power_metrics(&g, &w.velocity(), &Penalty::Constant(-1.0)).is_err());
}
