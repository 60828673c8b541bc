//! Certificate verification: published ω-lines, sensitivity to corruption,
//! identity at points beyond the four that decide it, and soundness against
//! exact minima.

mod common;

use apdensity_core::apcount;
use apdensity_core::certify::{
    self, check_certificate, general_candidates, lambda_general, lambda_small, smallprime_candidates, verify_general,
    verify_smallprime, Certificate, TermLine,
};
use apdensity_core::qfield::rat;
use apdensity_core::{CertificateReport, OmegaVector, OrbitTable, PrimeModulus, QuadExt};
use common::*;
use proptest::prelude::*;

fn pm(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

/// Sum of the ω-lines of every term whose name starts with `prefix`, at `d`.
fn line_sum(lines: &[TermLine], prefix: &str, d: i64) -> OmegaVector {
    let mut parts = lines
        .iter()
        .filter(|l| l.term.starts_with(prefix) && l.d == d)
        .map(|l| l.omega.clone().expect("every term is invariant"));
    let first = parts.next().expect("term present");
    parts.fold(first, |acc, w| acc.try_add(&w).unwrap())
}

fn winner(report: &CertificateReport, candidates: Vec<Certificate>) -> Certificate {
    let conv = report.convention.clone().expect("verified");
    candidates.into_iter().find(|c| c.convention == conv).unwrap()
}

#[test]
fn general_certificate_lines_match_the_published_displays() {
    for p in primes(5, 31) {
        let r = verify_general(pm(p));
        assert!(r.verified, "p = {p}");
        for d in certify::CHECK_POINTS {
            let want = general_lines(p as i64, d);
            for (i, w) in want.iter().enumerate() {
                let got = line_sum(&r.term_lines, &format!("sigma{}", i + 1), d);
                assert_eq!(&got, w, "p = {p}, D = {d}, sigma{}", i + 1);
            }
        }
    }
}

#[test]
fn small_prime_lines_match_the_published_displays() {
    for p in certify::SMALL_PRIMES {
        let r = verify_smallprime(pm(p as u64)).unwrap();
        assert!(r.verified, "p = {p}");
        for d in certify::CHECK_POINTS {
            let want = small_lines(p as i64, d);
            for (i, w) in want.iter().enumerate() {
                let got = line_sum(&r.term_lines, &format!("sigma{}", i + 1), d);
                assert_eq!(&got, w, "p = {p}, D = {d}, sigma{}", i + 1);
            }
        }
    }
}

#[test]
fn seven_indexed_square_line() {
    let r = verify_smallprime(pm(7)).unwrap();
    let got = line_sum(&r.term_lines, "sigma4", 2);
    assert_eq!(got.to_string(), "ω(0, 0, 1/8, 1/4, -3/4)");
}

#[test]
fn identity_holds_at_every_density() {
    // four points decide a cubic identity; check the rest anyway
    for p in [5u64, 7, 11, 13, 17, 19, 23] {
        let table = OrbitTable::new(pm(p));
        let extra: Vec<i64> = (4..=p as i64).collect();
        let g = winner(&verify_general(pm(p)), general_candidates(pm(p)));
        assert!(check_certificate(&g, &table, &extra).verified, "general p = {p}");
        if certify::SMALL_PRIMES.contains(&(p as u32)) {
            let s = winner(
                &verify_smallprime(pm(p)).unwrap(),
                smallprime_candidates(pm(p)).unwrap(),
            );
            assert!(check_certificate(&s, &table, &extra).verified, "small p = {p}");
        }
    }
}

#[test]
fn rejected_readings_are_reported() {
    let r = verify_smallprime(pm(17)).unwrap();
    assert!(r.trials.len() > 1);
    assert!(r.trials[..r.trials.len() - 1].iter().all(|t| !t.verified));
    assert!(r.trials.last().unwrap().verified);
    assert_eq!(r.bound_formula.split(" = ").last().unwrap(), "D(D-1)(D-5)/24");
}

fn nonzero_delta() -> impl Strategy<Value = QuadExt> {
    (1i64..=9, 1i64..=9, prop::bool::ANY).prop_map(|(n, d, neg)| QuadExt::frac(if neg { -n } else { n }, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn corrupted_general_certificates_fail(p in prop::sample::select(vec![5u64, 7, 11, 13]),
                                           slot in 0usize..5, delta in nonzero_delta()) {
        let cert = winner(&verify_general(pm(p)), general_candidates(pm(p)));
        let bad = if slot == 4 { cert.perturbed_lambda(&delta) } else { cert.perturbed(slot, &delta) }.unwrap();
        let t = check_certificate(&bad, &OrbitTable::new(pm(p)), &certify::CHECK_POINTS);
        prop_assert!(!t.verified);
    }

    #[test]
    fn corrupted_small_prime_certificates_fail(p in prop::sample::select(vec![5u64, 7, 11, 13, 17]),
                                               slot in 0usize..6, delta in nonzero_delta()) {
        let cert = winner(&verify_smallprime(pm(p)).unwrap(), smallprime_candidates(pm(p)).unwrap());
        let slot = slot % (cert.terms.len() + 1);
        let bad = if slot == cert.terms.len() { cert.perturbed_lambda(&delta) } else { cert.perturbed(slot, &delta) }.unwrap();
        let t = check_certificate(&bad, &OrbitTable::new(pm(p)), &certify::CHECK_POINTS);
        prop_assert!(!t.verified);
    }
}

#[test]
fn bounds_on_the_diagonal() {
    for (p, w) in [(5u64, 10i64), (7, 21), (11, 55), (13, 78), (17, 136)] {
        assert_eq!(lambda_general(pm(p), p as i64), rat(w));
        assert_eq!(lambda_small(pm(p), p as i64).unwrap(), QuadExt::int(w));
    }
}

#[test]
fn bounds_are_sandwiched_by_exact_minima() {
    for p in primes(5, 23) {
        for d in 0..=p as i64 {
            let w = apcount::min_aps(p as usize, 3, d as usize, 24).unwrap().min_count;
            let lg = lambda_general(pm(p), d);
            assert!(lg <= rat(w as i64), "general p={p} D={d}");
            if let Ok(ls) = lambda_small(pm(p), d) {
                assert!(QuadExt::from(lg) <= ls, "p={p} D={d}");
                assert!(ls <= QuadExt::int(w as i64), "small p={p} D={d}");
            }
        }
    }
}

#[test]
fn named_perturbations_are_rejected() {
    use apdensity_core::Theorem;
    let r = certify::verify_perturbed(pm(11), Theorem::SmallPrime, "sigma3", &QuadExt::frac(1, 5)).unwrap();
    assert!(!r.verified);
    assert!(r.trials[0].convention.contains("sigma3 shifted by 1/5"));
    let r = certify::verify_perturbed(pm(19), Theorem::General, "lambda", &QuadExt::frac(-1, 2)).unwrap();
    assert!(!r.verified);
    assert!(
        certify::verify_perturbed(pm(19), Theorem::General, "lambda", &QuadExt::zero())
            .unwrap()
            .verified
    );
    assert!(certify::verify_perturbed(pm(19), Theorem::General, "sigma9", &QuadExt::one()).is_err());
    assert!(certify::verify_perturbed(pm(19), Theorem::SmallPrime, "sigma1", &QuadExt::one()).is_err());
}
