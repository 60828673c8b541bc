//! Randomised and exhaustive property checks.

mod common;

use std::collections::BTreeSet;

use apdensity_core::apcount::{self, ApCounter};
use apdensity_core::modgroup::{canonical_subset, is_prime, sorted_triple};
use apdensity_core::necklace::{self, bubble_step, hamming, is_necklace};
use apdensity_core::qfield::ratio;
use apdensity_core::sympoly::{omega_of, reconstruct};
use apdensity_core::{OmegaVector, OrbitTable, Order, PrimeModulus, QuadExt};
use num_integer::Integer;
use proptest::prelude::*;

fn subset(n: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0u8..=1, n)
}

fn quad(m: u32) -> impl Strategy<Value = QuadExt> {
    (-40i64..=40, 1i64..=12, -40i64..=40, 1i64..=12)
        .prop_map(move |(a, da, b, db)| QuadExt::new(ratio(a, da), ratio(b, db), m).unwrap())
}

fn same_field_triple() -> impl Strategy<Value = (QuadExt, QuadExt, QuadExt)> {
    prop_oneof![Just(1u32), Just(3), Just(5)].prop_flat_map(|m| (quad(m), quad(m), quad(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn counts_are_rotation_invariant(n in 5usize..=20, bits in subset(20), shift in 0usize..20) {
        let bits = &bits[..n];
        let counter = ApCounter::new(n, 3).unwrap();
        let mut rotated = bits.to_vec();
        rotated.rotate_left(shift % n);
        prop_assert_eq!(counter.count(bits), counter.count(&rotated));
    }

    #[test]
    fn counts_are_invariant_under_units(n in 5usize..=20, bits in subset(20), unit in 1usize..20, k in 3usize..=5) {
        prop_assume!(unit < n && unit.gcd(&n) == 1 && k <= n);
        let bits = &bits[..n];
        let counter = ApCounter::new(n, k).unwrap();
        let mut scaled = vec![0u8; n];
        for (i, &b) in bits.iter().enumerate() {
            scaled[i * unit % n] = b;
        }
        prop_assert_eq!(counter.count(bits), counter.count(&scaled));
    }

    #[test]
    fn counts_agree_within_affine_orbits(p in prop::sample::select(vec![5u64, 7, 11, 13, 17, 19, 23, 29, 31]),
                                          a in 1u64..31, b in 0u64..31, x in 0u32..31, y in 0u32..31, z in 0u32..31) {
        let pm = PrimeModulus::new(p).unwrap();
        let table = OrbitTable::new(pm);
        let (a, b) = (a % p, b % p);
        prop_assume!(a != 0);
        let (x, y, z) = (x % p as u32, y % p as u32, z % p as u32);
        let Some(t) = sorted_triple(x, y, z) else { return Ok(()); };
        let map = |v: u32| ((a * v as u64 + b) % p) as u32;
        let image = sorted_triple(map(x), map(y), map(z)).unwrap();
        prop_assert_eq!(table.orbit_of(&t), table.orbit_of(&image));
        let (orbit, rep) = canonical_subset([x, y, z], &table).unwrap();
        prop_assert_eq!(orbit, table.orbit_of(&t));
        prop_assert_eq!(canonical_subset(rep, &table).unwrap(), (orbit, rep));
    }

    #[test]
    fn order_is_compatible_with_arithmetic((x, y, z) in same_field_triple()) {
        let lhs = x.try_cmp(&y).unwrap();
        prop_assert_eq!((&x + &z).try_cmp(&(&y + &z)).unwrap(), lhs);
        prop_assert_eq!(x.signum() as f64, x.to_f64().signum() * if x.is_zero() { 0.0 } else { 1.0 });
    }

    #[test]
    fn omega_round_trip_and_linearity(p in prop::sample::select(vec![5u64, 7, 11, 13]),
                                      seed in proptest::collection::vec(-9i64..=9, 12),
                                      s in -5i64..=5) {
        let pm = PrimeModulus::new(p).unwrap();
        let table = OrbitTable::new(pm);
        let d = table.num_orbits();
        let make = |off: usize| {
            OmegaVector::from_slots((0..d + 3).map(|i| QuadExt::frac(seed[(i + off) % 12], 1 + (i as i64 % 3))).collect()).unwrap()
        };
        let (w1, w2) = (make(0), make(5));
        let p1 = reconstruct(&w1, &table).unwrap();
        prop_assert_eq!(omega_of(&p1, &table).unwrap(), w1.clone());
        let p2 = reconstruct(&w2, &table).unwrap();
        let mut comb = p1.clone();
        comb.add_scaled(&p2, &QuadExt::int(s)).unwrap();
        let expect = OmegaVector::from_slots(
            w1.slots().iter().zip(w2.slots()).map(|(a, b)| *a + &(b * &QuadExt::int(s))).collect(),
        ).unwrap();
        prop_assert_eq!(omega_of(&comb, &table).unwrap(), expect);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn field_axioms((x, y, z) in same_field_triple()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x + &QuadExt::zero(), x.clone());
        prop_assert_eq!(&x * &QuadExt::one(), x.clone());
        prop_assert!((&x - &x).is_zero());
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.inverse().unwrap(), QuadExt::one());
            prop_assert_eq!(&(&y / &x) * &x, y.clone());
        } else {
            prop_assert!(x.inverse().is_err());
        }
    }

    #[test]
    fn conjugation_is_a_field_automorphism((x, y, _z) in same_field_triple()) {
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
        prop_assert_eq!(x.conj().conj(), x.clone());
        // x * conj(x) is the (rational) norm
        let n = &x * &x.conj();
        prop_assert!(n.is_rational());
        prop_assert_eq!(n.to_rational().unwrap(), x.norm());
    }
}

#[test]
fn orbits_partition_the_triples() {
    for p in (5u64..=31).filter(|&p| is_prime(p)) {
        let table = OrbitTable::new(PrimeModulus::new(p).unwrap());
        let mut all = BTreeSet::new();
        for t in 0..table.num_orbits() {
            let members = table.members(t);
            assert_eq!(members.len(), table.orbit_sizes()[t]);
            for m in members {
                assert_eq!(table.orbit_of(&m), t);
                assert!(all.insert(m), "triple in two orbits");
            }
        }
        let p = p as usize;
        assert_eq!(all.len(), p * (p - 1) * (p - 2) / 6);
        // the progression orbit is exactly the set of 3-APs of Z_p
        let full = vec![1u8; p];
        let aps = apcount::count_aps(&full, 3).unwrap();
        assert_eq!(table.orbit_sizes()[table.ap_orbit()] as u64, aps);
    }
}

#[test]
fn necklaces_form_a_bubble_language() {
    for n in 1..=14 {
        for ones in 0..=n {
            for b in necklace::generate(n, ones, Order::Colex).unwrap() {
                match bubble_step(b.bits()) {
                    Ok(next) => assert!(is_necklace(&next), "{b} -> {next:?}"),
                    Err(_) => assert!(!b.bits().windows(2).any(|w| w == [1, 0])),
                }
            }
        }
    }
}

#[test]
fn cool_lex_changes_are_local() {
    // consecutive strings differ by at most two transpositions
    for n in 2..=16 {
        for ones in 1..n {
            let list = necklace::gen_coollex(n, ones).unwrap();
            for w in list.windows(2) {
                let d = hamming(w[0].bits(), w[1].bits());
                assert!(d <= 4, "{} -> {} differ in {d} places", w[0], w[1]);
            }
        }
    }
}

#[test]
fn minimum_is_monotone_in_density() {
    for k in 3..=5 {
        for n in k.max(5)..=16 {
            let row: Vec<u64> = (0..=n)
                .map(|d| apcount::min_aps(n, k, d, 24).unwrap().min_count)
                .collect();
            assert!(row.windows(2).all(|w| w[0] <= w[1]), "k={k} n={n}: {row:?}");
        }
    }
}
