//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 resource guard.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::analysis::{census_series, forced_zero_digit_set, generator_check};
use crate::automaton::{
    Automaton, CatalanEvaluator, ClosedFormAutomaton, DigitString, CLOSED_FORM_THRESHOLD,
};
use crate::error::Error;
use crate::field::PrimeContext;
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "catalan-mod",
    version,
    about = "Catalan numbers modulo a prime via automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the automaton and optionally export it.
    Build {
        p: u64,
        /// Write a Graphviz rendering here.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the JSON form here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Use closed-form transitions instead of the polynomial closure.
        #[arg(long)]
        closed_form: bool,
    },
    /// Print C_n mod p for a decimal n of any size.
    Eval {
        p: u64,
        n: String,
        /// Print the state path.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        closed_form: bool,
    },
    /// Run verification suites.
    Verify {
        p: u64,
        #[arg(long, default_value_t = 10_000)]
        max_n: u64,
        /// table1, table2, oracle, density, mod2 or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// One JSON report per line instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Exact residue counts and densities for n < p^k.
    Density {
        p: u64,
        #[arg(long)]
        digits: u32,
    },
    /// Digits and residues that force p | C_n.
    Table { p: u64 },
    /// Whether the central binomials generate the unit group.
    Gens { p: u64 },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrimeGuard { .. } | Error::Resource(_) => EXIT_RESOURCE,
        Error::StateBound { .. } | Error::UnexpectedState { .. } => EXIT_VERIFICATION,
        _ => EXIT_USAGE,
    }
}

enum Failure {
    Error(Error),
    Code(i32, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match cli.command {
        Command::Build {
            p,
            dot,
            json,
            closed_form,
        } => cmd_build(p, dot, json, closed_form, out, err),
        Command::Eval {
            p,
            n,
            trace,
            closed_form,
        } => cmd_eval(p, &n, trace, closed_form, out, err),
        Command::Verify {
            p,
            max_n,
            suite,
            json,
        } => cmd_verify(p, max_n, &suite, json, out),
        Command::Density { p, digits } => cmd_density(p, digits, out),
        Command::Table { p } => cmd_table(p, out),
        Command::Gens { p } => cmd_gens(p, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Error(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Code(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn io_failure(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure::Code(EXIT_USAGE, format!("cannot write {}: {e}", path.display()))
}

fn use_closed_form(flag: bool, p: u32, err: &mut dyn Write) -> bool {
    if !flag && p > CLOSED_FORM_THRESHOLD {
        let _ = writeln!(
            err,
            "note: p > {CLOSED_FORM_THRESHOLD}, using closed-form transitions"
        );
        return true;
    }
    flag
}

fn cmd_build(
    p: u64,
    dot: Option<PathBuf>,
    json: Option<PathBuf>,
    closed_form: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let ctx = PrimeContext::new(p)?;
    let p = ctx.p();
    let wants_export = dot.is_some() || json.is_some();
    let (count, automaton) = if use_closed_form(closed_form, p, err) {
        let cf = ClosedFormAutomaton::new(&ctx)?;
        if wants_export {
            let a = cf.materialize()?;
            (a.states().len(), Some(a))
        } else {
            (cf.reachable_states()?.len(), None)
        }
    } else {
        let a = Automaton::build(&ctx)?;
        (a.states().len(), Some(a))
    };

    if let (Some(path), Some(a)) = (&dot, &automaton) {
        fs::write(path, a.export_dot()).map_err(|e| io_failure(path, e))?;
    }
    if let (Some(path), Some(a)) = (&json, &automaton) {
        fs::write(path, a.export_json()).map_err(|e| io_failure(path, e))?;
    }
    if p >= 5 {
        let _ = writeln!(out, "states: {count} (≤ p + 3 = {})", p + 3);
    } else {
        let _ = writeln!(out, "states: {count}");
    }
    Ok(EXIT_OK)
}

fn cmd_eval(
    p: u64,
    n: &str,
    trace: bool,
    closed_form: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let ctx = PrimeContext::new(p)?;
    let digits = DigitString::from_decimal(n, &ctx)?;
    let value = if use_closed_form(closed_form, ctx.p(), err) {
        let cf = ClosedFormAutomaton::new(&ctx)?;
        if trace {
            let _ = writeln!(
                out,
                "digits (least significant first): {:?}",
                digits.digits()
            );
            let path = cf.trace(&digits)?;
            for (i, kind) in path.iter().enumerate() {
                let poly = kind.poly(ctx.p()).expect("closed-form kinds are concrete");
                match i {
                    0 => writeln!(out, "{}: {poly}", kind.name()),
                    _ => writeln!(
                        out,
                        "  --{}--> {}: {poly}",
                        digits.digits()[i - 1],
                        kind.name()
                    ),
                }
                .ok();
            }
        }
        cf.evaluate(&digits)?
    } else {
        let a = Automaton::build(&ctx)?;
        if trace {
            let _ = writeln!(
                out,
                "digits (least significant first): {:?}",
                digits.digits()
            );
            for (i, &s) in a.trace(&digits)?.iter().enumerate() {
                let poly = &a.states()[s].poly;
                match i {
                    0 => writeln!(out, "s{s}: {poly}"),
                    _ => writeln!(out, "  --{}--> s{s}: {poly}", digits.digits()[i - 1]),
                }
                .ok();
            }
        }
        a.evaluate(&digits)?
    };
    if trace && digits.is_empty() {
        let _ = writeln!(out, "n = 0: C_0 = 1 by convention");
    }
    let _ = writeln!(out, "{value}");
    Ok(EXIT_OK)
}

fn cmd_verify(p: u64, max_n: u64, suite: &str, json: bool, out: &mut dyn Write) -> CmdResult {
    let suite: Suite = suite.parse()?;
    let ctx = PrimeContext::new(p)?;
    let reports = run_suite(&ctx, suite, max_n)?;
    for r in &reports {
        if json {
            let _ = writeln!(out, "{}", r.to_json());
        } else {
            let _ = writeln!(out, "{r}");
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if !json {
        let _ = writeln!(
            out,
            "{} of {} claims verified",
            reports.len() - failed,
            reports.len()
        );
    }
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    })
}

fn cmd_density(p: u64, digits: u32, out: &mut dyn Write) -> CmdResult {
    let ctx = PrimeContext::new(p)?;
    let a = Automaton::build(&ctx)?;
    let series = census_series(&a, digits)?;
    let last = series.last().expect("digits >= 1");
    let _ = write!(out, "{last}");
    let sum: num_rational::BigRational = (0..ctx.p()).map(|r| last.density(r)).sum();
    let _ = writeln!(out, "sum of densities: {sum}");
    let _ = writeln!(out, "zero-class density by digit count:");
    for c in &series {
        let z = c.density(0);
        let approx = num_traits::ToPrimitive::to_f64(&z).unwrap_or(f64::NAN);
        let _ = writeln!(out, "  k = {:>3}: {z} ≈ {approx:.6}", c.k);
    }
    Ok(EXIT_OK)
}

fn format_set(values: &[u32]) -> String {
    let inner: Vec<String> = values.iter().map(u32::to_string).collect();
    format!("{{{}}}", inner.join(", "))
}

fn cmd_table(p: u64, out: &mut dyn Write) -> CmdResult {
    let ctx = PrimeContext::new(p)?;
    let set = forced_zero_digit_set(&ctx);
    if !set.applicable {
        return Err(Failure::Code(
            EXIT_USAGE,
            format!(
                "the forced-zero digit set {{(p+1)/2..p-2}} is empty for p = {} (needs p >= 5)",
                ctx.p()
            ),
        ));
    }
    let s = format_set(&set.digits);
    let _ = writeln!(out, "forced-zero digits: {s}");
    let _ = writeln!(
        out,
        "forced-zero residues: n mod {} in {s} implies {} | C_n",
        ctx.p(),
        ctx.p()
    );
    Ok(EXIT_OK)
}

fn cmd_gens(p: u64, out: &mut dyn Write) -> CmdResult {
    let ctx = PrimeContext::new(p)?;
    let automaton = if ctx.p() >= 5 && ctx.p() <= CLOSED_FORM_THRESHOLD {
        Some(Automaton::build(&ctx)?)
    } else {
        None
    };
    let report = generator_check(&ctx, automaton.as_ref())?;
    let _ = writeln!(out, "{report}");
    let _ = writeln!(out, "generators: {}", format_set(&report.generators));
    match report.matches_constant_states {
        Some(m) => writeln!(out, "closure equals constant states: {m}"),
        None => writeln!(
            out,
            "closure equals constant states: not checked (p > {CLOSED_FORM_THRESHOLD})"
        ),
    }
    .ok();
    Ok(EXIT_OK)
}
