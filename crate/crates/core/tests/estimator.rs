use linstab::corpus;
use linstab::*;

fn cfg(samples: usize, targeted: bool) -> EstimatorConfig {
    EstimatorConfig {
        samples,
        seed: 2024,
        targeted,
        ..EstimatorConfig::default()
    }
}

#[test]
fn rhs_estimates_never_exceed_closed_form() {
    let tol = Tolerances::default();
    for (name, sys) in corpus::all() {
        let closed = lipusc_rhs(&sys, &tol).unwrap().value.value();
        let r = estimate_lipusc_rhs(&sys, &cfg(20_000, true), &tol).unwrap();
        assert!(
            r.estimate <= closed + 1e-9,
            "{name}: {} > {closed}",
            r.estimate
        );
        assert_eq!(r.recomputed(), r.estimate, "{name}");
    }
}

#[test]
fn targeting_never_hurts() {
    let tol = Tolerances::default();
    for (name, sys) in corpus::all() {
        for mode in [Mode::Rhs, Mode::Full] {
            let plain = match estimate_lipusc(&sys, &cfg(10_000, false), mode, &tol) {
                Ok(r) => r,
                Err(Error::UnboundedFullMode) => continue,
                Err(e) => panic!("{name}: {e}"),
            };
            let targeted = estimate_lipusc(&sys, &cfg(10_000, true), mode, &tol).unwrap();
            assert!(targeted.estimate >= plain.estimate, "{name} {mode:?}");
            assert_eq!(
                targeted,
                estimate_lipusc(&sys, &cfg(10_000, true), mode, &tol).unwrap()
            );
        }
    }
}

#[test]
fn thread_count_does_not_change_the_report() {
    let tol = Tolerances::default();
    let sys = corpus::example1_limit();
    let many = estimate_lipusc_full(&sys, &cfg(12_000, true), &tol).unwrap();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| estimate_lipusc_full(&sys, &cfg(12_000, true), &tol).unwrap());
    assert_eq!(many, single);
}

#[test]
fn half_line_full_mode_runs() {
    let r = estimate_lipusc_full(
        &corpus::half_line(),
        &cfg(10_000, true),
        &Tolerances::default(),
    )
    .unwrap();
    assert!(r.estimate >= 0.99);
}
