//! Named verification suites, each a list of [`ClaimReport`]s.

use std::fmt;
use std::str::FromStr;

use serde_json::json;

use crate::analysis::{
    census_sweep_check, cross_oracle_check, density_check, forced_zero_digits_check,
    forced_zero_residues_check, mod2_characterization_check, oracle_equivalence_check,
    pk_minus_1_check, zero_padding_check, ClaimReport,
};
use crate::automaton::{transition_closed_form, Automaton, StateKind};
use crate::bipoly::{q_power, step, table1_closed_form, Basis, BiPoly};
use crate::error::{Error, Result};
use crate::field::PrimeContext;

/// Census-versus-sweep comparisons run for every `k` with `p^k` below this.
pub const SWEEP_LIMIT: u64 = 200_000;
/// Digit length for the density curve.
pub const DENSITY_DIGITS: u32 = 8;
/// Exponent range for `n = p^k - 1`.
pub const PK_MINUS_1_MAX_K: u32 = 20;
/// `n < 2^MOD2_DIGITS` for the parity characterization.
pub const MOD2_DIGITS: u32 = 16;
/// Cross-oracle comparisons stop here; the convolution oracle is quadratic.
pub const CROSS_ORACLE_MAX_N: u64 = 5_000;
pub const PADDING_MAX_N: u64 = 10_000;
pub const PADDING_ZEROS: usize = 3;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Suite {
    Table1,
    Table2,
    Oracle,
    Density,
    Mod2,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "table1" => Suite::Table1,
            "table2" => Suite::Table2,
            "oracle" => Suite::Oracle,
            "density" => Suite::Density,
            "mod2" => Suite::Mod2,
            "all" => Suite::All,
            other => return Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Table1 => "table1",
            Suite::Table2 => "table2",
            Suite::Oracle => "oracle",
            Suite::Density => "density",
            Suite::Mod2 => "mod2",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

/// Generic Cartier steps on the basis monomials agree with their closed forms.
pub fn table1_check(ctx: &PrimeContext) -> Result<ClaimReport> {
    let p = ctx.p();
    if p < 5 {
        return Err(Error::UnsupportedModulus(p));
    }
    let qp = q_power(ctx);
    let mut bad = None;
    'outer: for basis in Basis::ALL {
        for d in 0..p {
            let generic = step(&basis.poly(p), d, &qp)?;
            let closed = table1_closed_form(basis, d, ctx)?;
            if generic != closed {
                bad = Some(json!({
                    "basis": basis.to_string(),
                    "d": d,
                    "generic": generic.to_string(),
                    "closed_form": closed.to_string(),
                }));
                break 'outer;
            }
        }
    }
    Ok(ClaimReport::new(
        "Cartier steps on basis monomials",
        p,
        json!({ "bases": Basis::ALL.iter().map(|b| b.to_string()).collect::<Vec<_>>() }),
        bad,
    ))
}

/// Every transition of the built automaton matches its closed form.
pub fn table2_check(a: &Automaton) -> Result<ClaimReport> {
    let ctx = a.ctx();
    let p = ctx.p();
    if p < 5 {
        return Err(Error::UnsupportedModulus(p));
    }
    let mut bad = None;
    'outer: for s in a.states() {
        for d in 0..p {
            let expected = transition_closed_form(s.kind, d, ctx)?;
            let target = &a.states()[a.next(s.id, d)];
            if Some(&target.poly) != expected.poly(p).as_ref() {
                bad = Some(json!({
                    "state": s.poly.to_string(),
                    "d": d,
                    "built": target.poly.to_string(),
                    "closed_form": format!("{expected:?}"),
                }));
                break 'outer;
            }
        }
    }
    Ok(ClaimReport::new(
        "transitions match closed forms",
        p,
        json!({ "states": a.states().len() }),
        bad,
    ))
}

/// State count within `p + 3`, the three non-constant states present, the
/// zero state absorbing and the initial state without predecessors.
pub fn structure_check(a: &Automaton) -> Result<ClaimReport> {
    let p = a.p();
    if p < 5 {
        return Err(Error::UnsupportedModulus(p));
    }
    let n = a.states().len();
    let mut problems = Vec::new();
    if n > p as usize + 3 {
        problems.push(format!("{n} states exceed p + 3"));
    }
    for poly in [
        BiPoly::initial_state(p),
        BiPoly::second_state(p),
        BiPoly::minus_y_plus_one(p),
    ] {
        if a.find(&poly).is_none() {
            problems.push(format!("missing state {poly}"));
        }
    }
    match a.zero_state() {
        Some(z) if a.row(z).iter().all(|&t| t as usize == z) => {}
        Some(_) => problems.push("zero state is not a loop".into()),
        None => problems.push("no zero state".into()),
    }
    if (0..n).any(|s| a.row(s).iter().any(|&t| t as usize == a.initial())) {
        problems.push("initial state has an incoming transition".into());
    }
    if a.states().iter().any(|s| s.kind == StateKind::Other) {
        problems.push("unclassified state".into());
    }
    Ok(ClaimReport::new(
        "at most p + 3 states",
        p,
        json!({ "states": n, "bound": p + 3 }),
        (!problems.is_empty()).then(|| json!(problems)),
    ))
}

/// Runs a suite; `max_n` bounds the oracle sweeps.
pub fn run_suite(ctx: &PrimeContext, suite: Suite, max_n: u64) -> Result<Vec<ClaimReport>> {
    let p = ctx.p();
    if matches!(suite, Suite::Table1 | Suite::Table2) && p < 5 {
        return Err(Error::UnsupportedModulus(p));
    }
    let mut reports = Vec::new();
    let needs_automaton = !matches!(suite, Suite::Table1 | Suite::Mod2);
    let automaton = if needs_automaton {
        Some(Automaton::build(ctx)?)
    } else {
        None
    };
    let a = automaton.as_ref();
    let run = |s: Suite| s == suite || (suite == Suite::All && (p >= 5 || !s.needs_p5()));

    if run(Suite::Table1) {
        reports.push(table1_check(ctx)?);
    }
    if run(Suite::Table2) {
        let a = a.expect("automaton built");
        reports.push(table2_check(a)?);
        reports.push(structure_check(a)?);
    }
    if run(Suite::Oracle) {
        let a = a.expect("automaton built");
        reports.push(oracle_equivalence_check(a, ctx, max_n)?);
        reports.push(cross_oracle_check(
            ctx,
            max_n.min(CROSS_ORACLE_MAX_N) as usize,
        )?);
        reports.push(pk_minus_1_check(a, ctx, PK_MINUS_1_MAX_K)?);
        reports.push(zero_padding_check(
            a,
            max_n.min(PADDING_MAX_N),
            PADDING_ZEROS,
        )?);
        if p >= 5 {
            reports.push(forced_zero_residues_check(ctx, max_n)?);
            reports.push(forced_zero_digits_check(a, max_n)?);
        }
    }
    if run(Suite::Density) {
        let a = a.expect("automaton built");
        reports.push(census_sweep_check(a, SWEEP_LIMIT)?);
        reports.push(density_check(a, DENSITY_DIGITS)?);
    }
    if run(Suite::Mod2) {
        reports.push(mod2_characterization_check(MOD2_DIGITS)?);
    }
    Ok(reports)
}

impl Suite {
    fn needs_p5(self) -> bool {
        matches!(self, Suite::Table1 | Suite::Table2)
    }
}
