use simonforge::attacks::{
    instantiate, run_attack, AttackKind, AttackReport, AttackSpec, ForgeryOrigin,
};
use simonforge::qsim::OracleFamily;
use simonforge::rng::{derive_seed, rng_from_seed};

fn run(spec: &AttackSpec, trial: u64) -> AttackReport {
    run_attack(spec, &mut rng_from_seed(derive_seed(spec.seed, trial))).unwrap()
}

fn margin(bound: f64, trials: usize) -> f64 {
    let p = bound.clamp(0.0, 1.0);
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[test]
fn success_dominates_bound_at_small_widths() {
    for kind in AttackKind::ALL {
        for width in [8u32, 10, 12] {
            let trials = 50;
            let wins = (0..trials)
                .filter(|&i| run(&AttackSpec::new(kind, width, 1000 + i as u64), i as u64).success)
                .count();
            let spec = AttackSpec::new(kind, width, 0);
            let bound = spec.theoretical_bound();
            let rate = wins as f64 / trials as f64;
            assert!(
                rate >= bound - margin(bound, trials),
                "{kind} width {width}: {rate} < {bound}"
            );
        }
    }
}

#[test]
fn recovered_values_match_ground_truth() {
    for kind in AttackKind::ALL {
        for seed in 0..10 {
            let spec = AttackSpec::new(kind, 10, seed);
            let report = run(&spec, 0);
            let inst = instantiate(&spec).unwrap();
            if report.success {
                assert_eq!(report.period, inst.planted_period(), "{kind} seed {seed}");
                for truth in inst.ground_truth() {
                    assert_eq!(
                        report.recovered_value(&truth.label),
                        Some(truth.value.value()),
                        "{kind} seed {seed} {}",
                        truth.label
                    );
                }
            }
        }
    }
}

#[test]
fn forging_attacks_keep_the_books() {
    for kind in AttackKind::ALL.into_iter().filter(|k| k.forges()) {
        for seed in 0..10 {
            let spec = AttackSpec::new(kind, 8, seed);
            let report = run(&spec, seed);
            assert_eq!(
                report.total_queries,
                report.superposition_queries + report.verification_queries + report.classical_queries
            );
            assert_eq!(report.subroutine_steps, 6 * spec.simon_width() as u64);
            if report.success {
                assert!(report.forgeries.iter().all(|f| f.verified));
                assert!(report.forgeries.len() as u64 > report.total_queries);
                let queried = report
                    .forgeries
                    .iter()
                    .filter(|f| f.origin == ForgeryOrigin::Queried)
                    .count() as u64;
                let derived = report.forgeries.len() as u64 - queried;
                // one classical query per sibling at most
                assert!(derived <= queried);
                assert!(report.total_queries >= queried + report.superposition_queries);
                for f in report.forgeries.iter() {
                    if let ForgeryOrigin::Derived { source } = f.origin {
                        let q = &report.forgeries[source];
                        assert_eq!(q.origin, ForgeryOrigin::Queried);
                        assert_ne!(
                            (q.nonce, &q.associated_data, &q.payload),
                            (f.nonce, &f.associated_data, &f.payload)
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn null_models_yield_the_distinguisher_verdict() {
    for kind in [AttackKind::Feistel3, AttackKind::Lrw] {
        let mut spec = AttackSpec::new(kind, 8, 77);
        spec.null_model = true;
        let report = run(&spec, 0);
        assert!(report.success);
        assert_eq!(report.failure.as_deref(), Some("dimension 0"));
        assert_eq!(report.kernel_dimension, 0);
    }
}

#[test]
fn gmac_tables_differ_per_nonce_but_share_the_period() {
    let inst = instantiate(&AttackSpec::new(AttackKind::Gmac, 8, 3)).unwrap();
    let s = inst.planted_period().unwrap().value();
    let t0 = inst.simon_table(5).unwrap();
    let t1 = inst.simon_table(6).unwrap();
    assert_ne!(t0, t1);
    let offset = t0.eval(0) ^ t1.eval(0);
    assert!((0..512).all(|x| t0.eval(x) ^ t1.eval(x) == offset));
    assert!(t0.has_period(s) && t1.has_period(s));
}

#[test]
fn even_mansour_and_slide_identities() {
    let inst = instantiate(&AttackSpec::new(AttackKind::EvenMansour, 8, 9)).unwrap();
    let k1 = inst.ground_truth()[0].value.value();
    assert!((0..256).all(|x| inst.simon_eval(0, x ^ k1) == inst.simon_eval(0, x)));

    let inst = instantiate(&AttackSpec::new(AttackKind::Slide, 8, 9)).unwrap();
    let k = inst.ground_truth()[0].value.value();
    assert!((0..256).all(|x| inst.simon_eval(0, x) == inst.simon_eval(0, 256 | x ^ k)));
}

#[test]
fn nonce_families_draw_fresh_tables() {
    let inst = instantiate(&AttackSpec::new(AttackKind::OcbEnc, 8, 1)).unwrap();
    let fam = inst.family().unwrap();
    let mut rng = rng_from_seed(4);
    let a = fam.fresh(&mut rng).unwrap();
    let b = fam.fresh(&mut rng).unwrap();
    assert_ne!(a, b);
    assert_eq!(inst.counter().superposition(), 2);
}

#[test]
fn reports_are_reproducible() {
    let spec = AttackSpec::new(AttackKind::Gcm, 10, 12);
    assert_eq!(run(&spec, 3), run(&spec, 3));
}
