//! Acceptance criteria. Each test checks one criterion exactly and prints a
//! single `[PASS]`/`[FAIL]` line; run with `--nocapture` to see them.

use catalan_automaton::analysis::{
    census_by_oracle_sweep, census_series, forced_zero_digit_set, zero_density_curve,
};
use catalan_automaton::automaton::transition_closed_form;
use catalan_automaton::bipoly::{q_power, step, table1_closed_form, Basis};
use catalan_automaton::field::is_prime;
use catalan_automaton::oracle::{catalan_convolution, catalan_lucas_oracle, catalan_lucas_u64};
use catalan_automaton::{Automaton, BiPoly, CatalanEvaluator, DigitString, PrimeContext};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

fn primes(lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    (lo..=hi).filter(|&p| is_prime(p))
}

/// Prints the verdict line and fails the test with the first problem.
fn verdict(criterion: &str, problems: &[String]) {
    if problems.is_empty() {
        println!("[PASS] {criterion}");
    } else {
        println!("[FAIL] {criterion}: {}", problems[0]);
        panic!(
            "{criterion}: {} problem(s), first: {}",
            problems.len(),
            problems[0]
        );
    }
}

#[test]
fn ac01_oracle_equivalence() {
    let mut problems = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        for n in 0..=100_000u64 {
            let auto = a
                .evaluate(&DigitString::from_u128(u128::from(n), &c))
                .unwrap();
            let oracle = catalan_lucas_u64(n, &c);
            if auto != oracle {
                problems.push(format!("p={p} n={n}: automaton {auto} vs oracle {oracle}"));
            }
        }
        let conv = catalan_convolution(5000, &c).unwrap();
        for (n, &v) in conv.iter().enumerate() {
            if catalan_lucas_u64(n as u64, &c) != v {
                problems.push(format!("p={p} n={n}: Lucas vs convolution"));
            }
        }
    }
    verdict(
        "oracle equivalence: automaton = Lucas (n <= 1e5), Lucas = convolution (n <= 5000)",
        &problems,
    );
}

#[test]
fn ac02_table1_conformance() {
    let mut problems = Vec::new();
    for p in primes(5, 97) {
        let c = ctx(p);
        let qp = q_power(&c);
        for basis in Basis::ALL {
            for d in 0..c.p() {
                let generic = step(&basis.poly(c.p()), d, &qp).unwrap();
                let closed = table1_closed_form(basis, d, &c).unwrap();
                if generic != closed {
                    problems.push(format!("p={p} {basis} d={d}: {generic} vs {closed}"));
                }
            }
        }
    }
    verdict(
        "Table 1: generic Cartier steps = closed forms, 5 <= p <= 97",
        &problems,
    );
}

#[test]
fn ac03_table2_conformance() {
    let mut problems = Vec::new();
    for p in primes(5, 97) {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        for s in a.states() {
            for d in 0..c.p() {
                let expected = transition_closed_form(s.kind, d, &c).unwrap();
                let built = &a.states()[a.next(s.id, d)].poly;
                if Some(built) != expected.poly(c.p()).as_ref() {
                    problems.push(format!(
                        "p={p} ({}, {d}) -> {built}, expected {expected:?}",
                        s.poly
                    ));
                }
            }
        }
    }
    verdict(
        "Table 2: every built transition = closed form, 5 <= p <= 97",
        &problems,
    );
}

#[test]
fn ac04_state_bound() {
    let mut problems = Vec::new();
    for p in primes(5, 199) {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        let pp = c.p();
        if a.states().len() > pp as usize + 3 {
            problems.push(format!("p={p}: {} states", a.states().len()));
        }
        for poly in [
            BiPoly::initial_state(pp),
            BiPoly::second_state(pp),
            BiPoly::minus_y_plus_one(pp),
        ] {
            if a.find(&poly).is_none() {
                problems.push(format!("p={p}: missing {poly}"));
            }
        }
    }
    verdict(
        "state bound: |states| <= p + 3 with R, 2xy(y+1), -(y+1), 5 <= p <= 199",
        &problems,
    );
}

#[test]
fn ac05_all_max_digits_give_minus_one() {
    let mut problems = Vec::new();
    for p in [5u64, 7, 11, 13] {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        let minus_one = c.fp(-1);
        let mut pk = BigUint::one();
        for k in 1..=20 {
            pk *= p;
            let n = &pk - 1u32;
            let decimal = n.to_string();
            let digits = DigitString::from_decimal(&decimal, &c).unwrap();
            assert_eq!(digits.digits().len(), k);
            let auto = a.evaluate(&digits).unwrap();
            let oracle = catalan_lucas_oracle(&n, &c);
            if auto != minus_one || oracle != minus_one {
                problems.push(format!(
                    "p={p} k={k} n={decimal}: automaton {auto}, oracle {oracle}"
                ));
            }
        }
    }
    verdict(
        "C(p^k - 1) = -1 mod p, p in {5,7,11,13}, k = 1..20",
        &problems,
    );
}

#[test]
fn ac06_forced_zero_claims() {
    let mut problems = Vec::new();
    for p in [5u64, 7, 11] {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        let set = forced_zero_digit_set(&c);
        for n in 0..=100_000u64 {
            let digits = DigitString::from_u128(u128::from(n), &c);
            let has_forced = digits.digits().iter().any(|&d| set.contains(d));
            let residue_forced = set.contains((n % p) as u32);
            if !(has_forced || residue_forced) {
                continue;
            }
            let oracle = catalan_lucas_u64(n, &c);
            let auto = a.evaluate(&digits).unwrap();
            if !oracle.is_zero() || !auto.is_zero() {
                problems.push(format!("p={p} n={n}: oracle {oracle}, automaton {auto}"));
            }
        }
    }
    verdict(
        "forced zeros: digit or residue in {(p+1)/2..p-2} gives p | C_n, n <= 1e5",
        &problems,
    );
}

#[test]
fn ac07_density() {
    let c = ctx(5);
    let a = Automaton::build(&c).unwrap();
    let mut problems = Vec::new();
    let curve = zero_density_curve(&a, 8).unwrap();
    let one = BigRational::one();
    // Every nonzero C_n avoids digit 3, so at most 4^k of the 5^k strings
    // survive; C = 1 in the bound C (4/5)^(k-1).
    let ratio = BigRational::new(4.into(), 5.into());
    for (i, z) in curve.iter().enumerate() {
        let k = i + 1;
        if i > 0 && z < &curve[i - 1] {
            problems.push(format!("density decreased at k={k}"));
        }
        let bound = ratio.clone().pow((k - 1) as i32);
        if &one - z > bound {
            problems.push(format!(
                "k={k}: nonzero fraction {} > (4/5)^{}",
                &one - z,
                k - 1
            ));
        }
    }
    let threshold = BigRational::new(95.into(), 100.into());
    if curve[7] <= threshold {
        problems.push(format!(
            "k=8 density {} ({:.6}) does not exceed 0.95",
            curve[7],
            curve[7].to_f64().unwrap()
        ));
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        let mut k_max = 0;
        while p.pow(k_max + 1) <= 200_000 {
            k_max += 1;
        }
        for census in census_series(&a, k_max).unwrap() {
            let sweep = census_by_oracle_sweep(&c, census.k).unwrap();
            if census != sweep {
                problems.push(format!("p={p} k={}: census differs from sweep", census.k));
            }
            if census.total() != BigUint::from(p.pow(census.k)) {
                problems.push(format!("p={p} k={}: counts do not sum to p^k", census.k));
            }
        }
    }
    verdict(
        "density: p=5 zero density nondecreasing, > 0.95 at k=8, census = sweep for p^k <= 2e5",
        &problems,
    );
}

#[test]
fn ac08_parity_characterization() {
    let c = ctx(2);
    let a = Automaton::build(&c).unwrap();
    let mut problems = Vec::new();
    for n in 0..(1u64 << 16) {
        let odd = a
            .evaluate(&DigitString::from_u128(u128::from(n), &c))
            .unwrap()
            .value()
            == 1;
        if odd != (n + 1).is_power_of_two() {
            problems.push(format!("n={n}: odd={odd}"));
        }
    }
    verdict(
        "p = 2: C_n odd exactly when n = 2^k - 1, n < 2^16",
        &problems,
    );
}

fn random_poly(rng: &mut StdRng, p: u32, max_deg: u32) -> BiPoly {
    let n_terms = rng.gen_range(0..16);
    BiPoly::from_terms(
        p,
        (0..n_terms).map(|_| {
            (
                rng.gen_range(0..max_deg),
                rng.gen_range(0..max_deg),
                rng.gen_range(0..i64::from(p)),
            )
        }),
    )
}

#[test]
fn ac09_property_suite() {
    let mut problems = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for p in [2u64, 3, 5, 7, 13] {
        let c = ctx(p);
        let pp = c.p();
        for _ in 0..1000 {
            let f = random_poly(&mut rng, pp, pp * pp);
            let g = random_poly(&mut rng, pp, pp * pp);
            let a = c.fp(rng.gen_range(0..p as i64));
            let b = c.fp(rng.gen_range(0..p as i64));
            let d1 = rng.gen_range(0..pp);
            let d2 = rng.gen_range(0..pp);
            let lhs = (&f.scale(a) + &g.scale(b)).cartier(d1, d2).unwrap();
            let rhs = &f.cartier(d1, d2).unwrap().scale(a) + &g.cartier(d1, d2).unwrap().scale(b);
            if lhs != rhs {
                problems.push(format!("p={p}: linearity fails for {f} and {g}"));
            }
            let mut rebuilt = BiPoly::zero(pp);
            for e1 in 0..pp {
                for e2 in 0..pp {
                    rebuilt = &rebuilt + &f.cartier(e1, e2).unwrap().inflate().shift(e1, e2);
                }
            }
            if rebuilt != f {
                problems.push(format!("p={p}: decomposition fails for {f}"));
            }
        }
    }
    for p in [5u64, 7, 11] {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        for n in 1..=10_000u64 {
            let digits = DigitString::from_u128(u128::from(n), &c);
            let base = a.evaluate(&digits).unwrap();
            let mut padded = digits.digits().to_vec();
            for pad in 1..=3 {
                padded.push(0);
                let got = a.states()[a.run(&padded).unwrap()].output;
                if got != base {
                    problems.push(format!("p={p} n={n}: {pad} zero(s) change {base} to {got}"));
                }
            }
        }
    }
    verdict(
        "properties: Cartier linearity + decomposition (1000 polys/prime), zero padding",
        &problems,
    );
}

#[test]
fn ac10_export() {
    let c = ctx(5);
    let a = Automaton::build(&c).unwrap();
    let mut problems = Vec::new();

    let dot = a.export_dot();
    if let Err(e) = graphviz_rust::parse(&dot) {
        problems.push(format!("DOT does not parse: {e}"));
    }
    let s1 = a.find(&BiPoly::initial_state(5)).unwrap();
    let m = a.find(&BiPoly::minus_y_plus_one(5)).unwrap();
    let edge = format!("s{s1} -> s{m} [label=\"4\"];");
    if dot.matches(&edge).count() != 1 {
        problems.push(format!("expected exactly one edge {edge}"));
    }

    let back = Automaton::from_json(&a.export_json()).unwrap();
    let same_delta = (0..a.states().len()).all(|s| a.row(s) == back.row(s));
    if !same_delta || back.states().len() != a.states().len() {
        problems.push("JSON round-trip changed the delta table".into());
    }
    verdict(
        "export: p=5 DOT parses, JSON round-trips the delta table",
        &problems,
    );
}
