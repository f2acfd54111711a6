use catalan_automaton::analysis::generator_check;
use catalan_automaton::field::is_prime;
use catalan_automaton::oracle::catalan_lucas_oracle;
use catalan_automaton::{
    Automaton, CatalanEvaluator, ClosedFormAutomaton, DigitString, PrimeContext,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn big_n_matches_oracle(
        p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 97]),
        digits in "[1-9][0-9]{0,40}",
    ) {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        let n: BigUint = digits.parse().unwrap();
        let ds = DigitString::from_decimal(&digits, &c).unwrap();
        prop_assert_eq!(ds.to_biguint(), n.clone());
        let expected = catalan_lucas_oracle(&n, &c);
        prop_assert_eq!(a.evaluate(&ds).unwrap(), expected);
        if p >= 5 {
            let cf = ClosedFormAutomaton::new(&c).unwrap();
            prop_assert_eq!(cf.evaluate(&ds).unwrap(), expected);
        }
    }

    #[test]
    fn zero_state_absorbs(
        p in prop::sample::select(vec![5u64, 7, 11, 13]),
        raw in prop::collection::vec(0u32..1000, 1..30),
    ) {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        let z = a.zero_state().unwrap();
        let digits: Vec<u32> = raw.iter().map(|d| d % c.p()).collect();
        let mut s = a.initial();
        let mut seen_zero = false;
        for &d in &digits {
            s = a.next(s, d);
            if seen_zero {
                prop_assert_eq!(s, z);
            }
            seen_zero |= s == z;
        }
    }
}

#[test]
fn generator_closure_equals_constant_states() {
    for p in (5u64..=199).filter(|&p| is_prime(p)) {
        let c = ctx(p);
        let a = Automaton::build(&c).unwrap();
        let report = generator_check(&c, Some(&a)).unwrap();
        assert_eq!(report.matches_constant_states, Some(true), "p = {p}");
    }
}

#[test]
fn closed_form_reachable_states_match_build_up_to_199() {
    for p in (5u64..=199).filter(|&p| is_prime(p)) {
        let c = ctx(p);
        let cf = ClosedFormAutomaton::new(&c).unwrap();
        assert_eq!(
            cf.materialize().unwrap(),
            Automaton::build(&c).unwrap(),
            "p = {p}"
        );
    }
}
