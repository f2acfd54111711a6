//! The automaton computing `C_n mod p`.
//!
//! States are polynomials; the automaton is obtained by breadth-first
//! closure of the initial polynomial under the digit transitions
//! `s -> Λ_{d,d}(s · Q^(p-1))`. Digits of `n` are read least significant
//! first, and the answer is the constant term of the final state.
//!
//! For `p >= 5` every transition also has a closed form (see
//! [`transition_closed_form`]), which [`ClosedFormAutomaton`] uses to
//! evaluate without building the dense table.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bipoly::{BiPoly, QPowerKernel};
use crate::error::{Error, Result};
use crate::field::{Fp, PrimeContext, MAX_PRIME};

/// Primes above this are better served by [`ClosedFormAutomaton`].
pub const CLOSED_FORM_THRESHOLD: u32 = 1000;

/// Structural classification of a state polynomial.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateKind {
    /// The initial polynomial `y(1 - 2xy - 2xy^2)`.
    S1,
    /// `2xy(y+1)`.
    S2,
    /// `-(y+1)`.
    MinusYPlusOne,
    /// A nonzero constant.
    Constant(Fp),
    Zero,
    /// Anything else; only possible for `p < 5`.
    Other,
}

impl StateKind {
    pub fn classify(poly: &BiPoly) -> StateKind {
        let p = poly.p();
        if *poly == BiPoly::initial_state(p) {
            StateKind::S1
        } else if poly.is_zero() {
            StateKind::Zero
        } else if let Some(c) = poly.as_constant() {
            StateKind::Constant(c)
        } else if *poly == BiPoly::second_state(p) {
            StateKind::S2
        } else if *poly == BiPoly::minus_y_plus_one(p) {
            StateKind::MinusYPlusOne
        } else {
            StateKind::Other
        }
    }

    /// The polynomial this kind stands for, if it is determined by the kind.
    pub fn poly(self, p: u32) -> Option<BiPoly> {
        match self {
            StateKind::S1 => Some(BiPoly::initial_state(p)),
            StateKind::S2 => Some(BiPoly::second_state(p)),
            StateKind::MinusYPlusOne => Some(BiPoly::minus_y_plus_one(p)),
            StateKind::Constant(c) => Some(BiPoly::constant(p, c)),
            StateKind::Zero => Some(BiPoly::zero(p)),
            StateKind::Other => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StateKind::S1 => "s1",
            StateKind::S2 => "s2",
            StateKind::MinusYPlusOne => "minus_y_plus_1",
            StateKind::Constant(_) => "constant",
            StateKind::Zero => "zero",
            StateKind::Other => "other",
        }
    }

    fn output(self, ctx: &PrimeContext) -> Fp {
        match self {
            StateKind::MinusYPlusOne => ctx.fp(-1),
            StateKind::Constant(c) => c,
            _ => ctx.zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub id: usize,
    pub poly: BiPoly,
    /// Constant term of `poly`.
    pub output: Fp,
    pub kind: StateKind,
}

impl State {
    fn new(id: usize, poly: BiPoly) -> State {
        State {
            id,
            output: poly.eval00(),
            kind: StateKind::classify(&poly),
            poly,
        }
    }
}

/// Base-p digits of `n`, least significant first, with no high-order zero.
/// The empty string represents `n = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitString {
    p: u32,
    digits: Vec<u32>,
}

impl DigitString {
    pub fn new(p: u32, digits: Vec<u32>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::DigitOutOfRange { digit: d, p });
        }
        if digits.last() == Some(&0) {
            return Err(Error::NonCanonical(format!(
                "most significant digit is zero in {digits:?}"
            )));
        }
        Ok(DigitString { p, digits })
    }

    /// Parses a nonnegative decimal integer of any size.
    pub fn from_decimal(text: &str, ctx: &PrimeContext) -> Result<Self> {
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(text.to_string()));
        }
        let n = BigUint::parse_bytes(text.as_bytes(), 10)
            .ok_or_else(|| Error::Parse(text.to_string()))?;
        Ok(Self::from_biguint(&n, ctx))
    }

    pub fn from_biguint(n: &BigUint, ctx: &PrimeContext) -> Self {
        DigitString {
            p: ctx.p(),
            digits: ctx.digits_of(n),
        }
    }

    pub fn from_u128(n: u128, ctx: &PrimeContext) -> Self {
        DigitString {
            p: ctx.p(),
            digits: ctx.digits_of_u128(n),
        }
    }

    /// `p^k - 1`, i.e. `k` copies of the digit `p - 1`.
    pub fn all_max(p: u32, k: usize) -> Self {
        DigitString {
            p,
            digits: vec![p - 1; k],
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn to_biguint(&self) -> BigUint {
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * self.p + d)
    }
}

/// Anything that can compute `C_n mod p` from the digits of `n`.
pub trait CatalanEvaluator {
    fn prime(&self) -> u32;

    fn evaluate(&self, n: &DigitString) -> Result<Fp>;
}

/// A fully materialised automaton with a dense transition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    ctx: PrimeContext,
    states: Vec<State>,
    initial: usize,
    /// Row-major `[state][digit]`.
    delta: Vec<u32>,
}

impl Automaton {
    /// Builds the automaton by closure, refusing primes above [`MAX_PRIME`].
    pub fn build(ctx: &PrimeContext) -> Result<Automaton> {
        Self::build_with_guard(ctx, MAX_PRIME)
    }

    pub fn build_with_guard(ctx: &PrimeContext, guard: u32) -> Result<Automaton> {
        let p = ctx.p();
        if p > guard {
            return Err(Error::PrimeGuard {
                p: u64::from(p),
                guard,
            });
        }
        let kernel = QPowerKernel::new(ctx);
        let mut states = vec![State::new(0, BiPoly::initial_state(p))];
        let mut index: HashMap<BiPoly, usize> = HashMap::new();
        index.insert(states[0].poly.clone(), 0);
        let mut delta: Vec<u32> = Vec::new();
        let mut queue = VecDeque::from([0usize]);

        // Ids are assigned in discovery order and rows are filled in id
        // order, so the FIFO queue keeps `delta` contiguous.
        while let Some(id) = queue.pop_front() {
            debug_assert_eq!(delta.len(), id * p as usize);
            for d in 0..p {
                let next = kernel.step(&states[id].poly, d)?;
                let target = match index.get(&next) {
                    Some(&t) => t,
                    None => {
                        let t = states.len();
                        if p >= 5 && t >= p as usize + 3 {
                            return Err(Error::StateBound { p, states: t + 1 });
                        }
                        index.insert(next.clone(), t);
                        states.push(State::new(t, next));
                        queue.push_back(t);
                        t
                    }
                };
                delta.push(target as u32);
            }
        }

        if p >= 5 {
            if let Some(s) = states.iter().find(|s| s.kind == StateKind::Other) {
                return Err(Error::UnexpectedState {
                    p,
                    poly: s.poly.to_string(),
                });
            }
        }
        Ok(Automaton {
            ctx: ctx.clone(),
            states,
            initial: 0,
            delta,
        })
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn p(&self) -> u32 {
        self.ctx.p()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn next(&self, state: usize, digit: u32) -> usize {
        self.delta[state * self.p() as usize + digit as usize] as usize
    }

    pub fn row(&self, state: usize) -> &[u32] {
        let p = self.p() as usize;
        &self.delta[state * p..(state + 1) * p]
    }

    pub fn find(&self, poly: &BiPoly) -> Option<usize> {
        self.states.iter().position(|s| s.poly == *poly)
    }

    pub fn zero_state(&self) -> Option<usize> {
        self.find(&BiPoly::zero(self.p()))
    }

    /// Runs raw digits (LSD first, zero padding allowed) from the initial
    /// state and returns the final state id.
    pub fn run(&self, digits: &[u32]) -> Result<usize> {
        let p = self.p();
        let mut s = self.initial;
        for &d in digits {
            if d >= p {
                return Err(Error::DigitOutOfRange { digit: d, p });
            }
            s = self.next(s, d);
        }
        Ok(s)
    }

    /// State ids visited while reading `n`, starting with the initial state.
    pub fn trace(&self, n: &DigitString) -> Result<Vec<usize>> {
        self.check_prime(n)?;
        let mut path = vec![self.initial];
        let mut s = self.initial;
        for &d in n.digits() {
            s = self.next(s, d);
            path.push(s);
        }
        Ok(path)
    }

    fn check_prime(&self, n: &DigitString) -> Result<()> {
        if n.p() != self.p() {
            return Err(Error::ModulusMismatch(n.p(), self.p()));
        }
        Ok(())
    }

    /// Nonzero constants that occur as states.
    pub fn constant_values(&self) -> Vec<Fp> {
        let mut out: Vec<Fp> = self
            .states
            .iter()
            .filter_map(|s| match s.kind {
                StateKind::Constant(c) => Some(c),
                _ => None,
            })
            .collect();
        out.sort();
        out
    }

    /// Graphviz rendering: constant states are grouped in a cluster, the
    /// zero state is drawn as a filled double circle and parallel edges are
    /// merged into one edge labelled with a digit set.
    pub fn export_dot(&self) -> String {
        let p = self.p();
        let mut out = String::new();
        let _ = writeln!(out, "digraph catalan_mod_{p} {{");
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(out, "  node [shape=circle];");
        let _ = writeln!(out, "  start [shape=point];");
        let _ = writeln!(out, "  start -> s{};", self.initial);

        let node = |s: &State| {
            let label = format!("s{}: {} (out={})", s.id, s.poly, s.output);
            let extra = match s.kind {
                StateKind::Zero => ", shape=doublecircle, style=filled, fillcolor=gray80",
                StateKind::Constant(_) => ", shape=box",
                _ => "",
            };
            format!("s{} [label=\"{}\"{}];", s.id, escape(&label), extra)
        };
        let constants: Vec<&State> = self
            .states
            .iter()
            .filter(|s| matches!(s.kind, StateKind::Constant(_)))
            .collect();
        for s in self
            .states
            .iter()
            .filter(|s| !matches!(s.kind, StateKind::Constant(_)))
        {
            let _ = writeln!(out, "  {}", node(s));
        }
        if !constants.is_empty() {
            let _ = writeln!(out, "  subgraph cluster_constants {{");
            let _ = writeln!(out, "    label=\"C\";");
            for s in constants {
                let _ = writeln!(out, "    {}", node(s));
            }
            let _ = writeln!(out, "  }}");
        }

        for s in &self.states {
            let mut by_target: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
            for (d, &t) in self.row(s.id).iter().enumerate() {
                by_target.entry(t).or_default().push(d as u32);
            }
            for (t, digits) in by_target {
                let _ = writeln!(
                    out,
                    "  s{} -> s{} [label=\"{}\"];",
                    s.id,
                    t,
                    digit_set_label(&digits, p)
                );
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json_model(&self) -> AutomatonJson {
        AutomatonJson {
            p: self.p(),
            states: self
                .states
                .iter()
                .map(|s| StateJson {
                    id: s.id,
                    poly: s
                        .poly
                        .terms()
                        .map(|(dx, dy, c)| [dx, dy, c.value()])
                        .collect(),
                    output: s.output.value(),
                    kind: s.kind.name().to_string(),
                })
                .collect(),
            initial: self.initial,
            delta: (0..self.states.len())
                .map(|s| self.row(s).to_vec())
                .collect(),
        }
    }

    pub fn export_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json_model())
            .expect("automaton JSON serialisation");
        text.push('\n');
        text
    }

    /// Reads an automaton back from [`Automaton::export_json`] output,
    /// validating every field against the polynomial it carries.
    pub fn from_json(text: &str) -> Result<Automaton> {
        let model: AutomatonJson =
            serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        Self::from_json_model(model)
    }

    pub fn from_json_model(model: AutomatonJson) -> Result<Automaton> {
        let bad = |msg: String| Error::Json(msg);
        let ctx = PrimeContext::new(u64::from(model.p))?;
        let p = ctx.p();
        let n = model.states.len();
        if model.initial >= n {
            return Err(bad(format!("initial state {} out of range", model.initial)));
        }
        if model.delta.len() != n {
            return Err(bad(format!(
                "{} delta rows for {} states",
                model.delta.len(),
                n
            )));
        }
        let mut states = Vec::with_capacity(n);
        for (i, s) in model.states.into_iter().enumerate() {
            if s.id != i {
                return Err(bad(format!("state at position {i} has id {}", s.id)));
            }
            if let Some(t) = s.poly.iter().find(|t| t[2] == 0 || t[2] >= p) {
                return Err(bad(format!("coefficient {} not a nonzero residue", t[2])));
            }
            let poly = BiPoly::from_terms(p, s.poly.iter().map(|t| (t[0], t[1], i64::from(t[2]))));
            if poly.num_terms() != s.poly.len() {
                return Err(bad(format!("state {i} repeats a monomial")));
            }
            let state = State::new(i, poly);
            if state.output.value() != s.output || state.kind.name() != s.kind {
                return Err(bad(format!(
                    "state {i} output or kind disagrees with its polynomial"
                )));
            }
            states.push(state);
        }
        let mut delta = Vec::with_capacity(n * p as usize);
        for (i, row) in model.delta.iter().enumerate() {
            if row.len() != p as usize {
                return Err(bad(format!("delta row {i} has {} entries", row.len())));
            }
            if let Some(&t) = row.iter().find(|&&t| t as usize >= n) {
                return Err(bad(format!("delta row {i} targets missing state {t}")));
            }
            delta.extend_from_slice(row);
        }
        Ok(Automaton {
            ctx,
            states,
            initial: model.initial,
            delta,
        })
    }
}

impl CatalanEvaluator for Automaton {
    fn prime(&self) -> u32 {
        self.p()
    }

    /// `C_n mod p`. The empty string (`n = 0`) returns 1 directly: the
    /// initial state's constant term is 0 while `C_0 = 1`.
    fn evaluate(&self, n: &DigitString) -> Result<Fp> {
        self.check_prime(n)?;
        if n.is_empty() {
            return Ok(self.ctx.one());
        }
        let s = self.run(n.digits())?;
        Ok(self.states[s].output)
    }
}

/// JSON form: `{ "p", "states": [{ "id", "poly": [[dx, dy, coeff]], "output",
/// "kind" }], "initial", "delta": [[target per digit]] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub p: u32,
    pub states: Vec<StateJson>,
    pub initial: usize,
    pub delta: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateJson {
    pub id: usize,
    pub poly: Vec<[u32; 3]>,
    pub output: u32,
    pub kind: String,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Formats a sorted digit set as in `{0..2, 4}`; a single digit is printed
/// bare and the full alphabet as `all`.
pub fn digit_set_label(digits: &[u32], p: u32) -> String {
    if digits.len() == p as usize {
        return "all".to_string();
    }
    if let [d] = digits {
        return d.to_string();
    }
    let mut runs: Vec<String> = Vec::new();
    let mut i = 0;
    while i < digits.len() {
        let mut j = i;
        while j + 1 < digits.len() && digits[j + 1] == digits[j] + 1 {
            j += 1;
        }
        if i == j {
            runs.push(digits[i].to_string());
        } else {
            runs.push(format!("{}..{}", digits[i], digits[j]));
        }
        i = j + 1;
    }
    format!("{{{}}}", runs.join(", "))
}

/// Closed-form transition for `p >= 5`.
///
/// With `h = (p-1)/2`:
///
/// | digit            | s1                 | s2               | c               | -(y+1)              |
/// |------------------|--------------------|------------------|-----------------|---------------------|
/// | 0                | s2                 | s2               | c               | -1                  |
/// | 1 ..= h          | C(2d, d-1) / d     | 2 C(2d-1, d)     | c C(2d, d)      | -C(2d+1, d)         |
/// | h+1 ..= p-2      | 0                  | 0                | 0               | 0                   |
/// | p-1              | -(y+1)             | 0                | 0               | -(y+1)              |
///
/// Constants that come out as zero are the zero state, which loops.
pub fn transition_closed_form(kind: StateKind, d: u32, ctx: &PrimeContext) -> Result<StateKind> {
    let p = ctx.p();
    if p < 5 {
        return Err(Error::UnsupportedModulus(p));
    }
    if d >= p {
        return Err(Error::DigitOutOfRange { digit: d, p });
    }
    let half = (p - 1) / 2;
    let di = i64::from(d);
    let constant = |c: Fp| {
        if c.is_zero() {
            StateKind::Zero
        } else {
            StateKind::Constant(c)
        }
    };
    let low = (1..=half).contains(&d);

    Ok(match kind {
        StateKind::Zero => StateKind::Zero,
        StateKind::Other => {
            return Err(Error::UnexpectedState {
                p,
                poly: "unclassified".to_string(),
            })
        }
        StateKind::S1 if d == 0 => StateKind::S2,
        StateKind::S1 if low => {
            let inv_d = ctx.inv(ctx.fp(di))?;
            constant(ctx.mul(inv_d, ctx.binom_small(2 * di, di - 1)))
        }
        StateKind::S1 if d == p - 1 => StateKind::MinusYPlusOne,
        StateKind::S2 if d == 0 => StateKind::S2,
        StateKind::S2 if low => constant(ctx.mul(ctx.fp(2), ctx.binom_small(2 * di - 1, di))),
        StateKind::Constant(c) if d <= half => constant(ctx.mul(c, ctx.binom_small(2 * di, di))),
        StateKind::MinusYPlusOne if d == 0 => constant(ctx.fp(-1)),
        StateKind::MinusYPlusOne if low => constant(ctx.neg(ctx.binom_small(2 * di + 1, di))),
        StateKind::MinusYPlusOne if d == p - 1 => StateKind::MinusYPlusOne,
        _ => StateKind::Zero,
    })
}

/// Evaluates through [`transition_closed_form`] with O(1) memory per step.
#[derive(Clone, Debug)]
pub struct ClosedFormAutomaton {
    ctx: PrimeContext,
}

impl ClosedFormAutomaton {
    pub fn new(ctx: &PrimeContext) -> Result<Self> {
        if ctx.p() < 5 {
            return Err(Error::UnsupportedModulus(ctx.p()));
        }
        Ok(ClosedFormAutomaton { ctx: ctx.clone() })
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn next(&self, kind: StateKind, d: u32) -> Result<StateKind> {
        transition_closed_form(kind, d, &self.ctx)
    }

    /// States visited while reading `n`, starting with `s1`.
    pub fn trace(&self, n: &DigitString) -> Result<Vec<StateKind>> {
        if n.p() != self.ctx.p() {
            return Err(Error::ModulusMismatch(n.p(), self.ctx.p()));
        }
        let mut path = vec![StateKind::S1];
        let mut s = StateKind::S1;
        for &d in n.digits() {
            s = self.next(s, d)?;
            path.push(s);
        }
        Ok(path)
    }

    /// Reachable kinds in the same breadth-first order as
    /// [`Automaton::build`], without storing transitions.
    pub fn reachable_states(&self) -> Result<Vec<StateKind>> {
        let p = self.ctx.p();
        let mut seen: HashMap<StateKind, usize> = HashMap::from([(StateKind::S1, 0)]);
        let mut order = vec![StateKind::S1];
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for d in 0..p {
                let t = self.next(s, d)?;
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(t) {
                    e.insert(order.len());
                    order.push(t);
                }
            }
            i += 1;
        }
        Ok(order)
    }

    /// Builds the dense automaton from closed forms. Ids match
    /// [`Automaton::build`] whenever the two agree on every transition.
    pub fn materialize(&self) -> Result<Automaton> {
        let p = self.ctx.p();
        let kinds = self.reachable_states()?;
        let index: HashMap<StateKind, usize> =
            kinds.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let mut delta = Vec::with_capacity(kinds.len() * p as usize);
        for &k in &kinds {
            for d in 0..p {
                delta.push(index[&self.next(k, d)?] as u32);
            }
        }
        let states = kinds
            .iter()
            .enumerate()
            .map(|(i, k)| State::new(i, k.poly(p).expect("closed-form kinds are concrete")))
            .collect();
        Ok(Automaton {
            ctx: self.ctx.clone(),
            states,
            initial: 0,
            delta,
        })
    }
}

impl CatalanEvaluator for ClosedFormAutomaton {
    fn prime(&self) -> u32 {
        self.ctx.p()
    }

    fn evaluate(&self, n: &DigitString) -> Result<Fp> {
        if n.is_empty() {
            if n.p() != self.ctx.p() {
                return Err(Error::ModulusMismatch(n.p(), self.ctx.p()));
            }
            return Ok(self.ctx.one());
        }
        let last = *self.trace(n)?.last().expect("nonempty path");
        Ok(last.output(&self.ctx))
    }
}
