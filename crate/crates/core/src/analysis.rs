//! Exact residue counts and checks of the structural congruences.
//!
//! Counting works on all length-`k` digit strings, leading zeros included.
//! Padding with high zeros never changes the output, so the `p^k` strings
//! are exactly the integers `0 <= n < p^k`. The one string that needs care
//! is all zeros: it is `n = 0`, whose value is 1 by convention.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::automaton::{Automaton, CatalanEvaluator, DigitString};
use crate::error::{Error, Result};
use crate::field::{Fp, PrimeContext};
use crate::oracle::catalan_lucas_oracle;
use crate::oracle::catalan_lucas_u64;

/// Upper bound on `k * ceil(log2 p)`, the bit length of the counts.
pub const MAX_CENSUS_BITS: u64 = 1 << 16;

/// Exact number of `n < p^k` in each residue class of `C_n mod p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueCensus {
    pub p: u32,
    pub k: u32,
    /// Indexed by residue.
    pub counts: Vec<BigUint>,
}

impl ResidueCensus {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn density(&self, residue: u32) -> BigRational {
        let total = BigUint::from(self.p).pow(self.k);
        BigRational::new(self.counts[residue as usize].clone().into(), total.into())
    }
}

impl fmt::Display for ResidueCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "census for p = {}, n < {}^{}", self.p, self.p, self.k)?;
        writeln!(f, "{:>8}  {:>24}  density", "residue", "count")?;
        for (r, c) in self.counts.iter().enumerate() {
            writeln!(f, "{:>8}  {:>24}  {}", r, c, self.density(r as u32))?;
        }
        Ok(())
    }
}

fn census_guard(p: u32, k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("digit count k must be >= 1".into()));
    }
    let bits_per_digit = u64::from(32 - (p - 1).leading_zeros()).max(1);
    if u64::from(k) * bits_per_digit > MAX_CENSUS_BITS {
        return Err(Error::Resource(format!(
            "census of {k} base-{p} digits needs more than {MAX_CENSUS_BITS}-bit counts"
        )));
    }
    Ok(())
}

/// Censuses for every length `1..=k_max` from a single transfer-matrix pass.
pub fn census_series(a: &Automaton, k_max: u32) -> Result<Vec<ResidueCensus>> {
    let p = a.p();
    census_guard(p, k_max)?;
    let n_states = a.states().len();

    // Transition count matrix, sparse by row.
    let mult: Vec<Vec<(usize, u64)>> = (0..n_states)
        .map(|s| {
            let mut m: BTreeMap<usize, u64> = BTreeMap::new();
            for &t in a.row(s) {
                *m.entry(t as usize).or_default() += 1;
            }
            m.into_iter().collect()
        })
        .collect();

    let mut v = vec![BigUint::zero(); n_states];
    v[a.initial()] = BigUint::one();
    let mut all_zero_state = a.initial();
    let mut out = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let mut w = vec![BigUint::zero(); n_states];
        for (s, row) in mult.iter().enumerate() {
            if v[s].is_zero() {
                continue;
            }
            for &(t, m) in row {
                w[t] += &v[s] * m;
            }
        }
        v = w;
        all_zero_state = a.next(all_zero_state, 0);

        let mut counts = vec![BigUint::zero(); p as usize];
        for (s, c) in v.iter().enumerate() {
            counts[a.states()[s].output.value() as usize] += c;
        }
        counts[a.states()[all_zero_state].output.value() as usize] -= 1u32;
        counts[a.ctx().one().value() as usize] += 1u32;
        out.push(ResidueCensus { p, k, counts });
    }
    Ok(out)
}

pub fn residue_census(a: &Automaton, k: u32) -> Result<ResidueCensus> {
    Ok(census_series(a, k)?.pop().expect("k >= 1"))
}

/// The same census by evaluating the Lucas oracle at every `n < p^k`.
pub fn census_by_oracle_sweep(ctx: &PrimeContext, k: u32) -> Result<ResidueCensus> {
    let p = ctx.p();
    let limit = u64::from(p)
        .checked_pow(k)
        .filter(|&n| n <= 50_000_000)
        .ok_or_else(|| Error::Resource(format!("oracle sweep over {p}^{k} values")))?;
    let mut counts = vec![0u64; p as usize];
    for n in 0..limit {
        counts[catalan_lucas_u64(n, ctx).value() as usize] += 1;
    }
    Ok(ResidueCensus {
        p,
        k,
        counts: counts.into_iter().map(BigUint::from).collect(),
    })
}

/// Fraction of `n < p^k` with `p | C_n`, for `k = 1..=k_max`.
pub fn zero_density_curve(a: &Automaton, k_max: u32) -> Result<Vec<BigRational>> {
    Ok(census_series(a, k_max)?
        .iter()
        .map(|c| c.density(0))
        .collect())
}

/// Digits `(p+1)/2 ..= p-2`; any one of them in `n` forces `p | C_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcedZeroSet {
    pub p: u32,
    pub digits: Vec<u32>,
    /// False for `p < 5`, where the set is empty.
    pub applicable: bool,
}

impl ForcedZeroSet {
    pub fn contains(&self, d: u32) -> bool {
        self.digits.binary_search(&d).is_ok()
    }
}

pub fn forced_zero_digit_set(ctx: &PrimeContext) -> ForcedZeroSet {
    let p = ctx.p();
    let digits = if p >= 5 {
        (p.div_ceil(2)..=p - 2).collect()
    } else {
        Vec::new()
    };
    ForcedZeroSet {
        p,
        digits,
        applicable: p >= 5,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Failed,
}

/// Outcome of one checked claim, serialisable as
/// `{ "claim", "p", "params", "status", "counterexample"? }`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claim: String,
    pub p: u32,
    pub params: Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl ClaimReport {
    pub fn new(claim: &str, p: u32, params: Value, counterexample: Option<Value>) -> Self {
        ClaimReport {
            claim: claim.to_string(),
            p,
            params,
            status: if counterexample.is_none() {
                Status::Verified
            } else {
                Status::Failed
            },
            counterexample,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialisation")
    }
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.status {
            Status::Verified => "PASS",
            Status::Failed => "FAIL",
        };
        write!(
            f,
            "[{verdict}] p={:<5} {:<32} {}",
            self.p, self.claim, self.params
        )?;
        if let Some(c) = &self.counterexample {
            write!(f, " counterexample: {c}")?;
        }
        Ok(())
    }
}

/// `C_n ≡ 0` for every `n <= n_max` with `n mod p` in the forced set.
pub fn forced_zero_residues_check(ctx: &PrimeContext, n_max: u64) -> Result<ClaimReport> {
    let set = forced_zero_digit_set(ctx);
    if !set.applicable {
        return Err(Error::UnsupportedModulus(ctx.p()));
    }
    let p = u64::from(ctx.p());
    let bad = (0..=n_max)
        .filter(|n| set.contains((n % p) as u32))
        .find(|&n| !catalan_lucas_u64(n, ctx).is_zero());
    Ok(ClaimReport::new(
        "forced-zero residues",
        ctx.p(),
        json!({ "n_max": n_max, "residues": set.digits }),
        bad.map(|n| json!({ "n": n })),
    ))
}

/// Every `n <= n_max` with some forced digit evaluates to 0, both through
/// the automaton and the oracle.
pub fn forced_zero_digits_check(a: &Automaton, n_max: u64) -> Result<ClaimReport> {
    let ctx = a.ctx();
    let set = forced_zero_digit_set(ctx);
    if !set.applicable {
        return Err(Error::UnsupportedModulus(ctx.p()));
    }
    let mut bad = None;
    for n in 0..=n_max {
        let digits = DigitString::from_u128(u128::from(n), ctx);
        if !digits.digits().iter().any(|&d| set.contains(d)) {
            continue;
        }
        let auto = a.evaluate(&digits)?;
        let oracle = catalan_lucas_u64(n, ctx);
        if !auto.is_zero() || !oracle.is_zero() {
            bad = Some(json!({ "n": n, "automaton": auto.value(), "oracle": oracle.value() }));
            break;
        }
    }
    Ok(ClaimReport::new(
        "forced-zero digits",
        ctx.p(),
        json!({ "n_max": n_max, "digits": set.digits }),
        bad,
    ))
}

/// `C_{p^k - 1} ≡ -1` for `k = 1..=k_max`, through the evaluator and the
/// Lucas oracle.
pub fn pk_minus_1_check(
    eval: &dyn CatalanEvaluator,
    ctx: &PrimeContext,
    k_max: u32,
) -> Result<ClaimReport> {
    let p = ctx.p();
    let minus_one = ctx.fp(-1);
    let mut bad = None;
    let mut pk = BigUint::one();
    for k in 1..=k_max {
        pk *= p;
        let n = &pk - 1u32;
        let digits = DigitString::from_biguint(&n, ctx);
        let auto = eval.evaluate(&digits)?;
        let oracle = catalan_lucas_oracle(&n, ctx);
        if auto != minus_one || oracle != minus_one {
            bad = Some(json!({
                "k": k,
                "n": n.to_string(),
                "automaton": auto.value(),
                "oracle": oracle.value(),
            }));
            break;
        }
    }
    Ok(ClaimReport::new(
        "C(p^k - 1) = -1",
        p,
        json!({ "k_max": k_max }),
        bad,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorReport {
    pub p: u32,
    /// Distinct nonzero values of `C(2d, d)` for `0 <= d <= (p-1)/2`.
    pub generators: Vec<u32>,
    /// The multiplicative closure of the generators.
    pub closure: Vec<u32>,
    /// Whether the closure is the whole unit group.
    pub generates: bool,
    /// Whether the closure coincides with the nonzero constant states of
    /// the automaton, when one was supplied.
    pub matches_constant_states: Option<bool>,
}

pub fn generator_check(
    ctx: &PrimeContext,
    automaton: Option<&Automaton>,
) -> Result<GeneratorReport> {
    let p = ctx.p();
    if p < 5 {
        return Err(Error::UnsupportedModulus(p));
    }
    let gens: BTreeSet<Fp> = (0..=i64::from((p - 1) / 2))
        .map(|d| ctx.binom_small(2 * d, d))
        .filter(|c| !c.is_zero())
        .collect();
    let mut closure: BTreeSet<Fp> = BTreeSet::from([ctx.one()]);
    let mut frontier = vec![ctx.one()];
    while let Some(x) = frontier.pop() {
        for &g in &gens {
            let y = ctx.mul(x, g);
            if closure.insert(y) {
                frontier.push(y);
            }
        }
    }
    let matches = automaton.map(|a| {
        let consts: BTreeSet<Fp> = a.constant_values().into_iter().collect();
        consts == closure
    });
    Ok(GeneratorReport {
        p,
        generators: gens.iter().map(|g| g.value()).collect(),
        generates: closure.len() == (p - 1) as usize,
        closure: closure.iter().map(|c| c.value()).collect(),
        matches_constant_states: matches,
    })
}

impl fmt::Display for GeneratorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, closure size {}", self.generates, self.closure.len())
    }
}

/// The p = 2 automaton outputs 1 exactly at `n = 2^j - 1`, for `n < 2^k_max`.
pub fn mod2_characterization_check(k_max: u32) -> Result<ClaimReport> {
    if k_max > 20 {
        return Err(Error::Resource(format!("k_max = {k_max} exceeds 20")));
    }
    let ctx = PrimeContext::new(2)?;
    let a = Automaton::build(&ctx)?;
    let mut bad = None;
    for n in 0..(1u64 << k_max) {
        let odd = a
            .evaluate(&DigitString::from_u128(u128::from(n), &ctx))?
            .value()
            == 1;
        if odd != (n + 1).is_power_of_two() {
            bad = Some(json!({ "n": n, "odd": odd }));
            break;
        }
    }
    Ok(ClaimReport::new(
        "odd iff n = 2^k - 1",
        2,
        json!({ "k_max": k_max }),
        bad,
    ))
}

/// Evaluator output equals the Lucas oracle for every `n <= n_max`.
pub fn oracle_equivalence_check(
    eval: &dyn CatalanEvaluator,
    ctx: &PrimeContext,
    n_max: u64,
) -> Result<ClaimReport> {
    let mut bad = None;
    for n in 0..=n_max {
        let auto = eval.evaluate(&DigitString::from_u128(u128::from(n), ctx))?;
        let oracle = catalan_lucas_u64(n, ctx);
        if auto != oracle {
            bad = Some(json!({ "n": n, "automaton": auto.value(), "oracle": oracle.value() }));
            break;
        }
    }
    Ok(ClaimReport::new(
        "automaton = Lucas oracle",
        ctx.p(),
        json!({ "n_max": n_max }),
        bad,
    ))
}

/// Lucas oracle equals the convolution oracle for every `n <= n_max`.
pub fn cross_oracle_check(ctx: &PrimeContext, n_max: usize) -> Result<ClaimReport> {
    let conv = crate::oracle::catalan_convolution(n_max, ctx)?;
    let bad = conv
        .iter()
        .enumerate()
        .find(|&(n, &v)| catalan_lucas_u64(n as u64, ctx) != v)
        .map(|(n, _)| json!({ "n": n }));
    Ok(ClaimReport::new(
        "Lucas oracle = convolution",
        ctx.p(),
        json!({ "n_max": n_max }),
        bad,
    ))
}

/// Appending up to `max_pad` high zeros never changes the output.
pub fn zero_padding_check(a: &Automaton, n_max: u64, max_pad: usize) -> Result<ClaimReport> {
    let ctx = a.ctx();
    let mut bad = None;
    'outer: for n in 1..=n_max {
        let digits = DigitString::from_u128(u128::from(n), ctx);
        let base = a.states()[a.run(digits.digits())?].output;
        let mut padded = digits.digits().to_vec();
        for pad in 1..=max_pad {
            padded.push(0);
            if a.states()[a.run(&padded)?].output != base {
                bad = Some(json!({ "n": n, "pad": pad }));
                break 'outer;
            }
        }
    }
    Ok(ClaimReport::new(
        "zero-padding invariance",
        ctx.p(),
        json!({ "n_max": n_max, "max_pad": max_pad }),
        bad,
    ))
}

/// Transfer-matrix census equals the oracle sweep for every `k` with
/// `p^k <= sweep_limit`.
pub fn census_sweep_check(a: &Automaton, sweep_limit: u64) -> Result<ClaimReport> {
    let ctx = a.ctx();
    let p = u64::from(ctx.p());
    let mut k_max = 0u32;
    while p.pow(k_max + 1) <= sweep_limit {
        k_max += 1;
    }
    let mut bad = None;
    if k_max > 0 {
        for census in census_series(a, k_max)? {
            let sweep = census_by_oracle_sweep(ctx, census.k)?;
            if census != sweep || census.total() != BigUint::from(p.pow(census.k)) {
                bad = Some(json!({
                    "k": census.k,
                    "census": census.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "sweep": sweep.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                }));
                break;
            }
        }
    }
    Ok(ClaimReport::new(
        "census = oracle sweep",
        ctx.p(),
        json!({ "k_max": k_max, "sweep_limit": sweep_limit }),
        bad,
    ))
}

/// Zero-class density is nondecreasing in `k` and its complement stays
/// below the digit-survival bound `((p+3)/(2p))^k`.
pub fn density_check(a: &Automaton, k_max: u32) -> Result<ClaimReport> {
    let p = a.p();
    let curve = zero_density_curve(a, k_max)?;
    let survive = if p >= 5 {
        BigRational::new(BigUint::from(p + 3).into(), BigUint::from(2 * p).into())
    } else {
        BigRational::one()
    };
    let one = BigRational::one();
    let mut bad = None;
    let mut bound = BigRational::one();
    for (i, z) in curve.iter().enumerate() {
        let k = i as u32 + 1;
        bound = &bound * &survive;
        if i > 0 && z < &curve[i - 1] {
            bad = Some(json!({ "k": k, "reason": "density decreased" }));
            break;
        }
        if (&one - z) > bound {
            bad = Some(json!({ "k": k, "reason": "nonzero fraction above survival bound" }));
            break;
        }
    }
    let last = curve.last().and_then(|z| z.to_f64()).unwrap_or(0.0);
    Ok(ClaimReport::new(
        "zero density monotone",
        p,
        json!({ "k_max": k_max, "final_density": format!("{last:.6}") }),
        bad,
    ))
}
