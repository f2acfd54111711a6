//! Sparse bivariate polynomials over F_p and the Cartier operator.
//!
//! Automaton states are polynomials in `x` and `y`. A transition on digit
//! `d` multiplies a state by `Q^(p-1)`, where `Q = x(y+1)^2 - 1`, and keeps
//! only the terms whose x- and y-degrees are both `d` modulo `p`, dividing
//! those degrees by `p`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeContext};

/// A polynomial in `F_p[x, y]` in canonical sparse form.
///
/// Terms are keyed by `(deg_x, deg_y)` in lexicographic order and no stored
/// coefficient is zero, so structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiPoly {
    p: u32,
    terms: BTreeMap<(u32, u32), Fp>,
}

impl BiPoly {
    pub fn zero(p: u32) -> Self {
        BiPoly {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: u32, c: Fp) -> Self {
        Self::monomial(p, 0, 0, c)
    }

    pub fn monomial(p: u32, dx: u32, dy: u32, c: Fp) -> Self {
        let mut f = Self::zero(p);
        f.add_term(dx, dy, u64::from(c.value()));
        f
    }

    /// Builds a polynomial from `(deg_x, deg_y, coefficient)` triples with
    /// arbitrary signed coefficients; repeated monomials are summed.
    pub fn from_terms<I>(p: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, i64)>,
    {
        let mut f = Self::zero(p);
        for (dx, dy, c) in terms {
            f.add_term(dx, dy, c.rem_euclid(i64::from(p)) as u64);
        }
        f
    }

    fn add_term(&mut self, dx: u32, dy: u32, c: u64) {
        let p = u64::from(self.p);
        let c = c % p;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry((dx, dy)).or_insert(Fp::raw(0));
        let sum = (u64::from(entry.value()) + c) % p;
        if sum == 0 {
            self.terms.remove(&(dx, dy));
        } else {
            *entry = Fp::raw(sum as u32);
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Terms as `(deg_x, deg_y, coefficient)` in lexicographic degree order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u32, u32, Fp)> + '_ {
        self.terms.iter().map(|(&(dx, dy), &c)| (dx, dy, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, dx: u32, dy: u32) -> Fp {
        self.terms.get(&(dx, dy)).copied().unwrap_or_default()
    }

    /// The value of the polynomial at `x = y = 0`.
    pub fn eval00(&self) -> Fp {
        self.coeff(0, 0)
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Fp> {
        match self.terms.len() {
            0 => Some(Fp::raw(0)),
            1 => self.terms.get(&(0, 0)).copied(),
            _ => None,
        }
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(dx, _)| dx).max()
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, dy)| dy).max()
    }

    fn check_modulus(&self, other: &BiPoly) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &BiPoly) -> Result<BiPoly> {
        self.check_modulus(other)?;
        let mut out = self.clone();
        for (dx, dy, c) in other.terms() {
            out.add_term(dx, dy, u64::from(c.value()));
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &BiPoly) -> Result<BiPoly> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &BiPoly) -> Result<BiPoly> {
        self.check_modulus(other)?;
        let p = u64::from(self.p);
        let mut out = BiPoly::zero(self.p);
        for (ax, ay, a) in self.terms() {
            for (bx, by, b) in other.terms() {
                out.add_term(
                    ax + bx,
                    ay + by,
                    u64::from(a.value()) * u64::from(b.value()) % p,
                );
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: Fp) -> BiPoly {
        let p = u64::from(self.p);
        let c = u64::from(c.value()) % p;
        if c == 0 {
            return BiPoly::zero(self.p);
        }
        let terms = self
            .terms
            .iter()
            .map(|(&k, &v)| (k, Fp::raw((u64::from(v.value()) * c % p) as u32)))
            .collect();
        BiPoly { p: self.p, terms }
    }

    fn neg_ref(&self) -> BiPoly {
        self.scale(Fp::raw(self.p - 1))
    }

    /// Multiplies by the monomial `x^dx y^dy`.
    pub fn shift(&self, dx: u32, dy: u32) -> BiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(&(a, b), &c)| ((a + dx, b + dy), c))
            .collect();
        BiPoly { p: self.p, terms }
    }

    /// Substitutes `x -> x^p`, `y -> y^p`.
    pub fn inflate(&self) -> BiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(&(a, b), &c)| ((a * self.p, b * self.p), c))
            .collect();
        BiPoly { p: self.p, terms }
    }

    pub fn pow(&self, e: u32) -> BiPoly {
        let mut acc = BiPoly::constant(self.p, Fp::raw(1 % self.p));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The Cartier operator `Λ_{d1,d2}`: keeps the terms `x^m y^n` with
    /// `m ≡ d1`, `n ≡ d2 (mod p)` and maps them to `x^(m div p) y^(n div p)`.
    pub fn cartier(&self, d1: u32, d2: u32) -> Result<BiPoly> {
        self.check_digit(d1)?;
        self.check_digit(d2)?;
        let p = self.p;
        let terms = self
            .terms
            .iter()
            .filter(|(&(m, n), _)| m % p == d1 && n % p == d2)
            .map(|(&(m, n), &c)| ((m / p, n / p), c))
            .collect();
        Ok(BiPoly { p, terms })
    }

    fn check_digit(&self, d: u32) -> Result<()> {
        if d >= self.p {
            return Err(Error::DigitOutOfRange {
                digit: d,
                p: self.p,
            });
        }
        Ok(())
    }

    /// `Q = x(y+1)^2 - 1`.
    pub fn kernel_q(p: u32) -> BiPoly {
        BiPoly::from_terms(p, [(1, 2, 1), (1, 1, 2), (1, 0, 1), (0, 0, -1)])
    }

    /// The initial state `R = y(1 - 2xy - 2xy^2)`.
    pub fn initial_state(p: u32) -> BiPoly {
        BiPoly::from_terms(p, [(0, 1, 1), (1, 2, -2), (1, 3, -2)])
    }

    /// `2xy(y+1)`, the state reached from the initial state on digit 0.
    pub fn second_state(p: u32) -> BiPoly {
        BiPoly::from_terms(p, [(1, 2, 2), (1, 1, 2)])
    }

    /// `-(y+1)`.
    pub fn minus_y_plus_one(p: u32) -> BiPoly {
        BiPoly::from_terms(p, [(0, 1, -1), (0, 0, -1)])
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;

    fn add(self, rhs: &BiPoly) -> BiPoly {
        self.checked_add(rhs).expect("BiPoly addition")
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;

    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self.checked_sub(rhs).expect("BiPoly subtraction")
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;

    fn mul(self, rhs: &BiPoly) -> BiPoly {
        self.checked_mul(rhs).expect("BiPoly multiplication")
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;

    fn neg(self) -> BiPoly {
        self.neg_ref()
    }
}

impl fmt::Display for BiPoly {
    /// Highest degree first, coefficients as signed residues, e.g.
    /// `-2xy^3 - 2xy^2 + y`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let p = i64::from(self.p);
        for (i, (&(dx, dy), &c)) in self.terms.iter().rev().enumerate() {
            let mut c = i64::from(c.value());
            if 2 * c > p {
                c -= p;
            }
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            match (i, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                (_, s) => write!(f, " {s} ")?,
            }
            let monomial = (dx, dy) != (0, 0);
            if mag != 1 || !monomial {
                write!(f, "{mag}")?;
            }
            match dx {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{dx}")?,
            }
            match dy {
                0 => {}
                1 => write!(f, "y")?,
                _ => write!(f, "y^{dy}")?,
            }
        }
        Ok(())
    }
}

/// `Q^(p-1)` from its binomial expansion: the coefficient of `x^k y^l` is
/// `C(p-1, k) C(2k, l) (-1)^k` for `0 <= k <= p-1`, `0 <= l <= 2k`.
pub fn q_power(ctx: &PrimeContext) -> BiPoly {
    let kernel = QPowerKernel::new(ctx);
    let p = ctx.p();
    let mut out = BiPoly::zero(p);
    for k in 0..p {
        for l in 0..=2 * k {
            let c = kernel.coeff(k, l);
            if !c.is_zero() {
                out.terms.insert((k, l), c);
            }
        }
    }
    out
}

/// One automaton transition, `Λ_{d,d}(s · qp)`, against an explicit
/// multiplier polynomial.
///
/// Only products landing in the `(d, d)` residue class are formed; the full
/// product `s · qp` is never materialised.
pub fn step(s: &BiPoly, d: u32, qp: &BiPoly) -> Result<BiPoly> {
    s.check_modulus(qp)?;
    s.check_digit(d)?;
    let p = s.p;
    let pm = u64::from(p);
    let mut out = BiPoly::zero(p);
    for (a, b, sc) in s.terms() {
        let want_k = (d + p - a % p) % p;
        let want_l = (d + p - b % p) % p;
        for (k, l, qc) in qp.terms() {
            if k % p == want_k && l % p == want_l {
                out.add_term(
                    (a + k) / p,
                    (b + l) / p,
                    u64::from(sc.value()) * u64::from(qc.value()) % pm,
                );
            }
        }
    }
    Ok(out)
}

/// Transitions against `Q^(p-1)` without materialising it.
///
/// Coefficients of `Q^(p-1)` come from the binomial expansion on demand, and
/// for each state term only the at most `1 x 3` kernel terms in the matching
/// residue class are visited, so a step costs O(#terms of the state).
#[derive(Clone, Debug)]
pub struct QPowerKernel<'a> {
    ctx: &'a PrimeContext,
}

impl<'a> QPowerKernel<'a> {
    pub fn new(ctx: &'a PrimeContext) -> Self {
        QPowerKernel { ctx }
    }

    /// Coefficient of `x^k y^l` in `Q^(p-1)`.
    pub fn coeff(&self, k: u32, l: u32) -> Fp {
        let ctx = self.ctx;
        let p = ctx.p();
        if k >= p || l > 2 * k {
            return ctx.zero();
        }
        let c = ctx.mul(
            ctx.binom_small(i64::from(p - 1), i64::from(k)),
            ctx.binom_small(i64::from(2 * k), i64::from(l)),
        );
        if k % 2 == 1 {
            ctx.neg(c)
        } else {
            c
        }
    }

    pub fn step(&self, s: &BiPoly, d: u32) -> Result<BiPoly> {
        let p = self.ctx.p();
        if s.p != p {
            return Err(Error::ModulusMismatch(s.p, p));
        }
        s.check_digit(d)?;
        let pm = u64::from(p);
        let mut out = BiPoly::zero(p);
        for (a, b, sc) in s.terms() {
            // x-degrees of Q^(p-1) run over 0..p, so exactly one is congruent.
            let k = (d + p - a % p) % p;
            let mut l = (d + p - b % p) % p;
            while l <= 2 * k {
                let qc = self.coeff(k, l);
                if !qc.is_zero() {
                    out.add_term(
                        (a + k) / p,
                        (b + l) / p,
                        u64::from(sc.value()) * u64::from(qc.value()) % pm,
                    );
                }
                l += p;
            }
        }
        Ok(out)
    }
}

/// The basis monomials whose transitions have closed forms.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    One,
    Y,
    XY,
    XY2,
    XY3,
}

impl Basis {
    pub const ALL: [Basis; 5] = [Basis::One, Basis::Y, Basis::XY, Basis::XY2, Basis::XY3];

    pub fn poly(self, p: u32) -> BiPoly {
        let (dx, dy) = match self {
            Basis::One => (0, 0),
            Basis::Y => (0, 1),
            Basis::XY => (1, 1),
            Basis::XY2 => (1, 2),
            Basis::XY3 => (1, 3),
        };
        BiPoly::monomial(p, dx, dy, Fp::raw(1))
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::One => "1",
            Basis::Y => "y",
            Basis::XY => "xy",
            Basis::XY2 => "xy^2",
            Basis::XY3 => "xy^3",
        };
        f.write_str(s)
    }
}

/// Closed form of `Λ_{d,d}(basis · Q^(p-1))`, valid for `p >= 5`.
pub fn table1_closed_form(basis: Basis, d: u32, ctx: &PrimeContext) -> Result<BiPoly> {
    let p = ctx.p();
    if p < 5 {
        return Err(Error::UnsupportedModulus(p));
    }
    if d >= p {
        return Err(Error::DigitOutOfRange { digit: d, p });
    }
    let d = i64::from(d);
    let last = i64::from(p) - 1;
    let c = |n: i64, k: i64| BiPoly::constant(p, ctx.binom_small(n, k));
    let xy_y_plus_1 = BiPoly::from_terms(p, [(1, 2, 1), (1, 1, 1)]);
    let y_plus_1 = BiPoly::from_terms(p, [(0, 1, 1), (0, 0, 1)]);

    Ok(match basis {
        Basis::One => c(2 * d, d),
        Basis::Y if d == last => y_plus_1,
        Basis::Y => c(2 * d, d - 1),
        Basis::XY => c(2 * d - 2, d - 1),
        Basis::XY2 if d == 0 => xy_y_plus_1,
        Basis::XY2 => c(2 * d - 2, d - 2),
        Basis::XY3 if d == 0 => xy_y_plus_1.scale(ctx.fp(-2)),
        Basis::XY3 if d == last => y_plus_1,
        Basis::XY3 => c(2 * d - 2, d - 3),
    })
}
