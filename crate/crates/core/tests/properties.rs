use proptest::prelude::*;
use spectra_core::bounds::{
    c_hypothesis_holds, check_cheng_yang_type, check_corollary_trio, check_thm_drift, check_thm_tensor,
    euclidean_comparators, intro_comparators, lemma_c_bound, recursion_lemma, upsilon_shift, BoundReport, Spectrum,
    SpectrumSource, TensorMode,
};
use spectra_core::geometry::GeometricConstants;

/// Ascending positive sequences with gaps bounded away from zero.
fn sequence(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    (0.5f64..5.0, prop::collection::vec(0.1f64..10.0, 2..max_len)).prop_map(|(base, steps)| {
        let mut v = vec![base];
        for s in steps {
            let last = *v.last().unwrap();
            v.push(last + s);
        }
        v
    })
}

/// Sequences whose spacing is small relative to the first value, so that
/// the Yang-form inequality holds for a good share of them.
fn clustered(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    (1.0f64..10.0, prop::collection::vec(0.0f64..1.0, 2..max_len)).prop_map(|(base, steps)| {
        let mut v = vec![base];
        for s in steps {
            let last = *v.last().unwrap();
            v.push(last + 0.3 * base * s);
        }
        v
    })
}

fn constants(n: usize) -> impl Strategy<Value = GeometricConstants> {
    (0.0f64..3.0, -3.0f64..3.0, 0.0f64..2.0, 0.0f64..2.0, 0.5f64..3.0).prop_map(
        move |(eta_0, eta_bar_0, h_0, a_0, tr)| {
            let mut c = GeometricConstants::zero(n, n + 1, 1.0);
            c.eta_0 = eta_0;
            c.eta_bar_0 = eta_bar_0;
            c.h_0 = h_0;
            c.a_0 = a_0;
            c.t_star = tr;
            c.tr_t_inf = tr;
            c.tr_t_sup = tr;
            c
        },
    )
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn yang_1(spectrum: &Spectrum, k: usize) -> BoundReport {
    euclidean_comparators(spectrum, k, None)
        .unwrap()
        .into_iter()
        .find(|r| r.name == "yang_1")
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn drift_theorem_is_the_yang_form_of_the_shifted_sequence(
        c in (1usize..=4).prop_flat_map(constants),
        values in sequence(16),
    ) {
        let n = c.n;
        let lambda = Spectrum::new(values, n, SpectrumSource::Synthetic).unwrap();
        let shifted = upsilon_shift(&lambda, &c);
        prop_assume!(shifted.is_ok());
        let shifted = shifted.unwrap();
        for k in 1..lambda.len() {
            let drift = check_thm_drift(&lambda, &c, k).unwrap();
            let yang = yang_1(&shifted, k);
            prop_assert!(close(drift.lhs, yang.lhs, 1e-12), "k={k}: {} vs {}", drift.lhs, yang.lhs);
            prop_assert!(close(drift.rhs, yang.rhs, 1e-12), "k={k}: {} vs {}", drift.rhs, yang.rhs);
            prop_assert_eq!(drift.holds, yang.holds);
        }
    }

    #[test]
    fn cheng_yang_is_the_c_one_bound(n in 1usize..=4, values in clustered(16)) {
        let s = Spectrum::new(values, n, SpectrumSource::Synthetic).unwrap();
        for k in 1..s.len() {
            let lemma = lemma_c_bound(&s, 1.0, k).unwrap();
            if lemma.is_evaluated() {
                let cy = check_cheng_yang_type(&s, k).unwrap();
                prop_assert_eq!((lemma.lhs, lemma.rhs, lemma.holds), (cy.lhs, cy.rhs, cy.holds));
            }
        }
    }

    #[test]
    fn appendix_quantities_stay_in_range(n in 1usize..=4, values in clustered(16), c in prop::sample::select(vec![1.0, 2.0])) {
        let s = Spectrum::new(values, n, SpectrumSource::Synthetic).unwrap();
        let nf = n as f64;
        for k in 1..s.len() {
            if !(1..=k).all(|j| c_hypothesis_holds(s.values(), nf, c, j, s.slack())) {
                break;
            }
            let (now, _, report) = recursion_lemma(&s, c, k).unwrap();
            prop_assert!(now.c_constant > 0.0 && now.c_constant < 1.0, "C = {}", now.c_constant);
            prop_assert!(now.f > 0.0, "F = {}", now.f);
            prop_assert!(report.note.is_empty(), "{}", report.note);
        }
    }

    #[test]
    fn degenerate_sequences_satisfy_every_gap_inequality(
        c in (1usize..=4).prop_flat_map(constants),
        value in 0.1f64..1e3,
        len in 3usize..12,
    ) {
        let n = c.n;
        let s = Spectrum::new(vec![value; len], n, SpectrumSource::Synthetic).unwrap();
        for k in 1..len {
            prop_assert!(check_thm_drift(&s, &c, k).unwrap().holds);
            prop_assert!(check_thm_tensor(&s, &c, k, TensorMode::InfTrace, None).unwrap().holds);
            prop_assert!(check_corollary_trio(&s, k).unwrap().iter().all(|r| r.holds));
            prop_assert!(check_cheng_yang_type(&s, k).unwrap().holds);
            prop_assert!(lemma_c_bound(&s, 2.0, k).unwrap().holds);
            prop_assert!(recursion_lemma(&s, 1.0, k).unwrap().2.holds);
            for r in intro_comparators(&s, k, Some(&c)).unwrap() {
                prop_assert!(r.name == "li_yau" || r.holds, "{}", r);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn yang_form_implies_the_second_yang_bound(n in 1usize..=4, values in clustered(16)) {
        let s = Spectrum::new(values, n, SpectrumSource::Synthetic).unwrap();
        for k in 1..s.len() {
            if yang_1(&s, k).holds {
                let trio = check_corollary_trio(&s, k).unwrap();
                prop_assert!(trio[0].holds, "k={k}: {}", trio[0]);
            }
        }
    }
}
