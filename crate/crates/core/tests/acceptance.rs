//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.
//!
//! Set `APDENSITY_SLOW=1` to add the n = 31 spot rows to the table check
//! (about a minute of single-core enumeration under cap 32).

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use apdensity_core::apcount::{self, ApCounter};
use apdensity_core::certify::{self, lambda_general, lambda_small, verify_general, verify_smallprime};
use apdensity_core::lpbound::{self, bracket, solve_lp, threshold};
use apdensity_core::necklace::{self, bits_to_string, parse_bits};
use apdensity_core::qfield::rat;
use apdensity_core::{LpStatus, OmegaVector, OrbitTable, Order, PrimeModulus, QuadExt, MAX_CAP};
use common::*;
use num_traits::ToPrimitive;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn pm(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

fn slow_enabled() -> bool {
    std::env::var("APDENSITY_SLOW").is_ok_and(|v| v == "1")
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let mut report = Vec::new();
    let mut total_bad = 0usize;
    for k in 3..=5usize {
        let want = reference_w(k);
        let rows = apcount::w_table(k, 5..=20, 24);
        let mut bad = Vec::new();
        for row in &rows {
            for (d, cell) in row.cells.iter().enumerate() {
                let expected = want[&(row.n, d)];
                match cell.value() {
                    Some(v) if v == expected => {}
                    got => bad.push(format!("(n={},D={}: got {:?}, published {expected})", row.n, d, got)),
                }
            }
        }
        total_bad += bad.len();
        let cells: usize = rows.iter().map(|r| r.cells.len()).sum();
        let shown: Vec<&str> = bad.iter().take(4).map(String::as_str).collect();
        report.push(format!(
            "k={k}: {}/{cells} cells agree{}",
            cells - bad.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(", e.g. {}", shown.join(" "))
            }
        ));
    }
    let took = start.elapsed();
    let mut slow_note = "n=31 spot rows skipped (set APDENSITY_SLOW=1)".to_string();
    if slow_enabled() {
        let want = reference_w(3);
        let counter = ApCounter::new(31, 3).map_err(|e| e.to_string())?;
        let mut bad = Vec::new();
        for d in [14usize, 15, 16, 17] {
            let got = apcount::min_aps_with(&counter, d).map_err(|e| e.to_string())?.min_count;
            if got != want[&(31, d)] {
                bad.push(format!("D={d}: got {got}, published {}", want[&(31, d)]));
            }
        }
        total_bad += bad.len();
        slow_note = if bad.is_empty() {
            "n=31 spot rows D=14..17 agree under cap 32".into()
        } else {
            format!("n=31 spot rows disagree: {}", bad.join("; "))
        };
    }
    let line = format!("{}; {slow_note}; {:.1}s", report.join("; "), took.as_secs_f64());
    if total_bad == 0 && took < Duration::from_secs(120) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn witness_counts() -> Outcome {
    let ws = reference_witnesses();
    let mut bad = Vec::new();
    for w in &ws {
        let bits = parse_bits(&w.bits).map_err(|e| e.to_string())?;
        let ones = bits.iter().filter(|&&b| b == 1).count();
        let got = apcount::count_aps(&bits, 3).map_err(|e| e.to_string())?;
        if got != w.count || bits.len() != w.n || ones != w.d {
            bad.push(format!(
                "{} (n={}, D={}): count {got}, listed {}",
                w.bits, w.n, w.d, w.count
            ));
        }
    }
    let line = format!(
        "{}/{} listed witnesses for Z_7 and Z_31 have the listed AP count",
        ws.len() - bad.len(),
        ws.len()
    );
    if bad.is_empty() {
        Ok(line)
    } else {
        Err(format!("{line}; {}", bad.join("; ")))
    }
}

fn sum_lines(lines: &[certify::TermLine], prefix: &str, d: i64) -> Option<OmegaVector> {
    let mut parts = lines
        .iter()
        .filter(|l| l.term.starts_with(prefix) && l.d == d)
        .map(|l| l.omega.clone());
    let mut acc = parts.next()??;
    for w in parts {
        acc = acc.try_add(&w?).ok()?;
    }
    Some(acc)
}

fn certificates() -> Outcome {
    let mut bad = Vec::new();
    let general: Vec<u64> = primes(5, 31);
    for &p in &general {
        let r = verify_general(pm(p));
        if !r.verified {
            bad.push(format!("general p={p} not verified"));
            continue;
        }
        for d in certify::CHECK_POINTS {
            for (i, w) in general_lines(p as i64, d).iter().enumerate() {
                if sum_lines(&r.term_lines, &format!("sigma{}", i + 1), d).as_ref() != Some(w) {
                    bad.push(format!("general p={p} D={d} sigma{} line differs", i + 1));
                }
            }
        }
    }
    for p in certify::SMALL_PRIMES {
        let r = match verify_smallprime(pm(p as u64)) {
            Ok(r) if r.verified => r,
            _ => {
                bad.push(format!("small-prime p={p} not verified"));
                continue;
            }
        };
        for d in certify::CHECK_POINTS {
            for (i, w) in small_lines(p as i64, d).iter().enumerate() {
                if sum_lines(&r.term_lines, &format!("sigma{}", i + 1), d).as_ref() != Some(w) {
                    bad.push(format!("small-prime p={p} D={d} sigma{} line differs", i + 1));
                }
            }
        }
        if p == 7 {
            let s4 = sum_lines(&r.term_lines, "sigma4", 2).map(|w| w.to_string());
            if s4.as_deref() != Some("ω(0, 0, 1/8, 1/4, -3/4)") {
                bad.push(format!("p=7 sigma4 line is {s4:?}"));
            }
        }
    }
    let line = format!(
        "general certificate verified for {} primes 5..31, small-prime certificates for {:?}, ω-lines compared exactly",
        general.len(),
        certify::SMALL_PRIMES
    );
    if bad.is_empty() {
        Ok(line)
    } else {
        Err(format!("{line}; {}", bad.join("; ")))
    }
}

fn diagonals() -> Outcome {
    let mut bad = Vec::new();
    for (p, w) in [(5u64, 10i64), (7, 21), (11, 55), (13, 78), (17, 136)] {
        let lg = lambda_general(pm(p), p as i64);
        let ls = lambda_small(pm(p), p as i64).map_err(|e| e.to_string())?;
        if lg != rat(w) || ls != QuadExt::int(w) {
            bad.push(format!("p={p}: general {lg}, small {ls}, expected {w}"));
        }
    }
    if bad.is_empty() {
        Ok("lambda_general(p,p) and lambda_small(p,p) equal 10, 21, 55, 78, 136".into())
    } else {
        Err(bad.join("; "))
    }
}

fn sandwich() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut checked = 0usize;
    for p in primes(5, 31) {
        let counter = ApCounter::new(p as usize, 3).map_err(|e| e.to_string())?;
        assert!(p as usize <= MAX_CAP);
        for d in 0..=p as i64 {
            let w = apcount::min_aps_with(&counter, d as usize)
                .map_err(|e| e.to_string())?
                .min_count;
            let w = rat(w as i64);
            let lg = lambda_general(pm(p), d);
            if lg > w {
                bad.push(format!("p={p} D={d}: general {lg} > W {w}"));
            }
            if let Ok(ls) = lambda_small(pm(p), d) {
                if QuadExt::from(lg.clone()) > ls || ls > QuadExt::from(w.clone()) {
                    bad.push(format!("p={p} D={d}: general {lg}, small {ls}, W {w}"));
                }
            }
            checked += 1;
        }
    }
    let line = format!(
        "general <= small-prime <= W at all {checked} (p, D) pairs with p <= 31 ({:.1}s)",
        start.elapsed().as_secs_f64()
    );
    if bad.is_empty() {
        Ok(line)
    } else {
        Err(format!("{line}; {}", bad.join("; ")))
    }
}

fn lp_dominance() -> Outcome {
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut solved = 0usize;
    for p in primes(5, 61) {
        // constraint construction is a one-off per prime, not part of a solve
        lpbound::instance(p).map_err(|e| e.to_string())?;
        for d in 0..=p as u32 {
            let start = Instant::now();
            let r = solve_lp(p, d).map_err(|e| e.to_string())?;
            slowest = slowest.max(start.elapsed());
            solved += 1;
            let lg = lambda_general(pm(p), d as i64).to_f64().unwrap();
            if r.status != LpStatus::Optimal || r.bound < lg - 1e-6 {
                bad.push(format!("p={p} D={d}: {:?} {} vs general {lg}", r.status, r.bound));
            }
        }
    }
    for (p, want) in [(17u64, 136.0), (5, 10.0)] {
        let got = solve_lp(p, p as u32).map_err(|e| e.to_string())?.bound;
        if (got - want).abs() > 1e-6 {
            bad.push(format!("solve_lp({p},{p}) = {got}, expected {want}"));
        }
    }
    if slowest >= Duration::from_millis(100) {
        bad.push(format!("slowest LP took {slowest:?}"));
    }
    let line = format!(
        "{solved} LPs for p <= 61 dominate lambda_general; solve_lp(17,17)=136, solve_lp(5,5)=10; slowest {:.1} ms",
        slowest.as_secs_f64() * 1e3
    );
    if bad.is_empty() {
        Ok(line)
    } else {
        Err(format!("{line}; {}", bad.join("; ")))
    }
}

fn threshold_bracket() -> Outcome {
    let mut bad = Vec::new();
    let ps = primes(5, 101);
    for &p in &ps {
        let (lo, hi) = bracket(p as u32);
        match threshold(p) {
            Ok(t) if (lo..=hi).contains(&t) => {}
            other => bad.push(format!("p={p}: {other:?} outside [{lo}, {hi}]")),
        }
    }
    let line = format!(
        "threshold(p) within [ceil((p+3)/4), (p+3)/2] for all {} primes 5..101",
        ps.len()
    );
    if bad.is_empty() {
        Ok(line)
    } else {
        Err(format!("{line}; {}", bad.join("; ")))
    }
}

fn generators() -> Outcome {
    let strings = |order| -> Vec<String> {
        necklace::generate(8, 4, order)
            .unwrap()
            .iter()
            .map(|b| bits_to_string(b.bits()))
            .collect()
    };
    let colex = [
        "00001111", "00010111", "00100111", "00011011", "00101011", "00110011", "00011101", "00101101", "00110101",
        "01010101",
    ];
    let coollex = [
        "00100111", "00010111", "00101011", "00110011", "00011011", "00101101", "01010101", "00110101", "00011101",
        "00001111",
    ];
    let mut bad = Vec::new();
    if strings(Order::Colex) != colex {
        bad.push(format!("gen_colex(8,4) = {:?}", strings(Order::Colex)));
    }
    if strings(Order::Coollex) != coollex {
        bad.push(format!("gen_coollex(8,4) = {:?}", strings(Order::Coollex)));
    }
    let mut cases = 0;
    for n in 1..=16 {
        for ones in 0..=n {
            let want = oracle_necklaces(n, ones).len();
            for order in [Order::Colex, Order::Coollex] {
                let got = necklace::generate(n, ones, order).map_err(|e| e.to_string())?.len();
                if got != want {
                    bad.push(format!("n={n} ones={ones} {order:?}: {got} vs {want}"));
                }
                cases += 1;
            }
        }
    }
    let line =
        format!("both (8,4) sequences verbatim; counts match the rotation filter in {cases} (n, D, order) cases");
    if bad.is_empty() {
        Ok(line)
    } else {
        Err(format!("{line}; {}", bad.join("; ")))
    }
}

fn histogram() -> Outcome {
    let got = apcount::distribution(7, 3, 4, 24).map_err(|e| e.to_string())?;
    let want: BTreeMap<u64, u64> = [(2, 3), (3, 2)].into();
    if got == want {
        Ok("distribution(7,3,4) = {2:3, 3:2}".into())
    } else {
        Err(format!("distribution(7,3,4) = {got:?}"))
    }
}

/// Deterministic sweep over the property families; the randomised suites in
/// `tests/properties.rs` and `tests/certificates.rs` cover the same ground
/// with more cases.
fn property_suites() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();

    // affine invariance of AP counts, including every unit scaling
    let mut rng = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        rng
    };
    for n in 5..=20usize {
        for k in 3..=5 {
            let counter = ApCounter::new(n, k).unwrap();
            for _ in 0..20 {
                let bits: Vec<u8> = (0..n).map(|_| (next() & 1) as u8).collect();
                let base = counter.count(&bits);
                for a in (1..n).filter(|a| num_integer::gcd(*a, n) == 1) {
                    let b = (next() as usize) % n;
                    let mut image = vec![0u8; n];
                    for (i, &x) in bits.iter().enumerate() {
                        image[(a * i + b) % n] = x;
                    }
                    if counter.count(&image) != base {
                        bad.push(format!("affine invariance n={n} k={k} a={a} b={b}"));
                    }
                }
            }
        }
    }

    // orbit partition
    for p in primes(5, 31) {
        let table = OrbitTable::new(pm(p));
        let total: usize = table.orbit_sizes().iter().sum();
        let pu = p as usize;
        if total != pu * (pu - 1) * (pu - 2) / 6 || table.num_orbits() != orbit_count(p as i64) {
            bad.push(format!("orbit partition p={p}"));
        }
        for t in 0..table.num_orbits() {
            if table.members(t).iter().any(|m| table.orbit_of(m) != t) {
                bad.push(format!("orbit membership p={p} orbit {t}"));
            }
        }
    }

    // field axioms on a grid of elements of Q(sqrt 3) and Q(sqrt 5)
    for m in [3u32, 5] {
        let elems: Vec<QuadExt> = [(1, 2, 0, 1), (-3, 1, 1, 3), (0, 1, -2, 5), (7, 4, 1, 1), (0, 1, 0, 1)]
            .iter()
            .map(|&(a, da, b, db)| QuadExt::new(rat(a) / rat(da), rat(b) / rat(db), m).unwrap())
            .collect();
        for x in &elems {
            for y in &elems {
                for z in &elems {
                    let ok = &(x + y) + z == x + &(y + z)
                        && &(x * y) * z == x * &(y * z)
                        && x * &(y + z) == &(x * y) + &(x * z)
                        && (x.is_zero() || &(y / x) * x == y.clone());
                    if !ok {
                        bad.push(format!("field axioms in Q(sqrt {m})"));
                    }
                }
            }
        }
    }

    // mutation sensitivity: corrupting any coefficient breaks verification
    let mut mutations = 0;
    for p in [5u64, 7, 11, 13] {
        let table = OrbitTable::new(pm(p));
        let report = verify_general(pm(p));
        let conv = report.convention.clone().unwrap_or_default();
        let cert = certify::general_candidates(pm(p))
            .into_iter()
            .find(|c| c.convention == conv)
            .unwrap();
        for delta in [QuadExt::frac(1, 7), QuadExt::frac(-2, 3)] {
            for slot in 0..=cert.terms.len() {
                let mutated = if slot == cert.terms.len() {
                    cert.perturbed_lambda(&delta)
                } else {
                    cert.perturbed(slot, &delta)
                }
                .unwrap();
                mutations += 1;
                if certify::check_certificate(&mutated, &table, &certify::CHECK_POINTS).verified {
                    bad.push(format!("mutation p={p} slot={slot} still verifies"));
                }
            }
        }
    }

    let took = start.elapsed();
    let line = format!(
        "affine invariance, orbit partition, field axioms, {mutations} verifier mutations ({:.1}s)",
        took.as_secs_f64()
    );
    if bad.is_empty() && took < Duration::from_secs(300) {
        Ok(line)
    } else {
        bad.dedup();
        Err(format!("{line}; {}", bad.join("; ")))
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("table reproduction", table_reproduction),
        ("witness counts", witness_counts),
        ("certificate verification", certificates),
        ("closed-form diagonals", diagonals),
        ("soundness sandwich", sandwich),
        ("LP dominance and optimality", lp_dominance),
        ("threshold bracket", threshold_bracket),
        ("generator correctness", generators),
        ("histogram", histogram),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
