//! Arithmetic in F_p and binomial coefficients modulo p.
//!
//! [`PrimeContext`] owns the modulus together with factorial and inverse
//! factorial tables, which makes `C(n, k) mod p` an O(1) lookup for
//! `n < p` and a digit-wise product (Lucas) for everything larger.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest prime accepted by [`PrimeContext::new`].
///
/// The dense transition table of the automaton has `(p + 3) * p` entries,
/// so this also bounds how far the builder can go.
pub const MAX_PRIME: u32 = 50_021;

/// An element of F_p stored as its least nonnegative residue.
///
/// The modulus is not carried along; arithmetic goes through a
/// [`PrimeContext`].
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u32);

impl Fp {
    pub(crate) const fn raw(value: u32) -> Self {
        Fp(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime modulus with precomputed `k!` and `(k!)^-1` for `0 <= k < p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeContext {
    p: u32,
    fact: Vec<u32>,
    inv_fact: Vec<u32>,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > u64::from(MAX_PRIME) {
            return Err(Error::PrimeGuard {
                p,
                guard: MAX_PRIME,
            });
        }
        let p = p as u32;
        let m = u64::from(p);
        let n = p as usize;

        let mut fact = vec![1u32; n];
        for k in 1..n {
            fact[k] = (u64::from(fact[k - 1]) * k as u64 % m) as u32;
        }
        // (p-1)! = -1 (Wilson), but go through Fermat so the tables do not
        // depend on that identity.
        let mut inv_fact = vec![1u32; n];
        inv_fact[n - 1] = pow_mod(u64::from(fact[n - 1]), m - 2, m) as u32;
        for k in (1..n).rev() {
            inv_fact[k - 1] = (u64::from(inv_fact[k]) * k as u64 % m) as u32;
        }
        Ok(PrimeContext { p, fact, inv_fact })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn fact(&self) -> &[u32] {
        &self.fact
    }

    pub fn inv_fact(&self) -> &[u32] {
        &self.inv_fact
    }

    /// Reduces an arbitrary signed integer into F_p.
    pub fn fp(&self, value: i64) -> Fp {
        Fp(value.rem_euclid(i64::from(self.p)) as u32)
    }

    pub fn zero(&self) -> Fp {
        Fp(0)
    }

    pub fn one(&self) -> Fp {
        Fp(1 % self.p)
    }

    pub fn add(&self, a: Fp, b: Fp) -> Fp {
        let s = u64::from(a.0) + u64::from(b.0);
        Fp((s % u64::from(self.p)) as u32)
    }

    pub fn sub(&self, a: Fp, b: Fp) -> Fp {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: Fp) -> Fp {
        if a.0 == 0 {
            a
        } else {
            Fp(self.p - a.0)
        }
    }

    pub fn mul(&self, a: Fp, b: Fp) -> Fp {
        Fp((u64::from(a.0) * u64::from(b.0) % u64::from(self.p)) as u32)
    }

    pub fn pow(&self, a: Fp, e: u64) -> Fp {
        Fp(pow_mod(u64::from(a.0), e, u64::from(self.p)) as u32)
    }

    /// Multiplicative inverse; zero is a domain error.
    pub fn inv(&self, a: Fp) -> Result<Fp> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, u64::from(self.p) - 2))
    }

    /// Signed representative in `(-p/2, p/2]`, used for display.
    pub fn signed(&self, a: Fp) -> i64 {
        let v = i64::from(a.0);
        if 2 * v > i64::from(self.p) {
            v - i64::from(self.p)
        } else {
            v
        }
    }

    fn binom_digit(&self, n: u32, k: u32) -> u64 {
        debug_assert!(n < self.p && k < self.p);
        if k > n {
            return 0;
        }
        let m = u64::from(self.p);
        u64::from(self.fact[n as usize]) * u64::from(self.inv_fact[k as usize]) % m
            * u64::from(self.inv_fact[(n - k) as usize])
            % m
    }

    /// `C(n, k) mod p` for machine-size arguments.
    ///
    /// Returns zero when `k < 0` or `k > n`; this is also the value used for
    /// a negative upper argument. For `n < p` this is a table lookup, above
    /// that the base-p digits are combined by Lucas' theorem.
    pub fn binom_small(&self, n: i64, k: i64) -> Fp {
        if k < 0 || n < 0 || k > n {
            return Fp(0);
        }
        self.binom_lucas_u128(n as u128, k as u128)
    }

    /// `C(n, k) mod p` by Lucas' theorem over base-p digits.
    pub fn binom_lucas(&self, n: &BigUint, k: &BigUint) -> Fp {
        if k > n {
            return Fp(0);
        }
        let nd = self.digits_of(n);
        let kd = self.digits_of(k);
        self.lucas_product(&nd, &kd)
    }

    pub fn binom_lucas_u128(&self, n: u128, k: u128) -> Fp {
        if k > n {
            return Fp(0);
        }
        let m = u128::from(self.p);
        let (mut n, mut k) = (n, k);
        let mut acc = 1 % u64::from(self.p);
        while k > 0 {
            let c = self.binom_digit((n % m) as u32, (k % m) as u32);
            if c == 0 {
                return Fp(0);
            }
            acc = acc * c % u64::from(self.p);
            n /= m;
            k /= m;
        }
        Fp(acc as u32)
    }

    fn lucas_product(&self, nd: &[u32], kd: &[u32]) -> Fp {
        let m = u64::from(self.p);
        let mut acc = 1 % m;
        for (i, &ki) in kd.iter().enumerate() {
            let ni = nd.get(i).copied().unwrap_or(0);
            let c = self.binom_digit(ni, ki);
            if c == 0 {
                return Fp(0);
            }
            acc = acc * c % m;
        }
        Fp(acc as u32)
    }

    /// Base-p digits of `n`, least significant first, without high zeros.
    pub fn digits_of(&self, n: &BigUint) -> Vec<u32> {
        let p = u64::from(self.p);
        // Largest power of p that fits in a u64, so most of the work is
        // done on machine words.
        let mut chunk = p;
        let mut per_chunk = 1usize;
        while let Some(next) = chunk.checked_mul(p) {
            chunk = next;
            per_chunk += 1;
        }
        let chunk_big = BigUint::from(chunk);
        let mut digits = Vec::new();
        let mut rest = n.clone();
        while !rest.is_zero() {
            let mut low = (&rest % &chunk_big).to_u64().expect("remainder fits u64");
            rest /= &chunk_big;
            for _ in 0..per_chunk {
                digits.push((low % p) as u32);
                low /= p;
            }
        }
        while digits.last() == Some(&0) {
            digits.pop();
        }
        digits
    }

    pub fn digits_of_u128(&self, mut n: u128) -> Vec<u32> {
        let m = u128::from(self.p);
        let mut digits = Vec::new();
        while n > 0 {
            digits.push((n % m) as u32);
            n /= m;
        }
        digits
    }
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn exact_binom(n: u64, k: u64) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        let k = k.min(n - k);
        let mut acc = BigUint::from(1u32);
        for i in 0..k {
            acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
        }
        acc
    }

    #[test]
    fn rejects_composites_and_small_values() {
        for n in [0u64, 1, 4, 9, 15, 91, 561] {
            assert_eq!(PrimeContext::new(n), Err(Error::NotPrime(n)));
        }
        assert!(matches!(
            PrimeContext::new(50_023),
            Err(Error::PrimeGuard { .. })
        ));
        assert!(PrimeContext::new(50_021).is_ok());
    }

    #[test]
    fn factorial_tables() {
        for p in [2u64, 3, 5, 7, 13, 97] {
            let c = ctx(p);
            assert_eq!(c.fact()[0], 1);
            for k in 1..p as usize {
                assert_eq!(
                    u64::from(c.fact()[k]),
                    u64::from(c.fact()[k - 1]) * k as u64 % p
                );
            }
            for k in 0..p as usize {
                assert_eq!(u64::from(c.fact()[k]) * u64::from(c.inv_fact()[k]) % p, 1);
            }
        }
    }

    #[test]
    fn inverses() {
        let c7 = ctx(7);
        assert_eq!(c7.inv(c7.fp(1)), Ok(c7.fp(1)));
        assert_eq!(c7.inv(c7.fp(2)), Ok(c7.fp(4)));
        assert_eq!(c7.inv(c7.zero()), Err(Error::ZeroInverse));

        let c11 = ctx(11);
        let brute = (1..11).find(|b| 3 * b % 11 == 1).unwrap();
        assert_eq!(brute, 4);
        assert_eq!(c11.inv(c11.fp(3)).unwrap().value(), brute);
    }

    #[test]
    fn binom_small_named_values() {
        let c13 = ctx(13);
        for d in 0..13i64 {
            let expected = if d % 2 == 0 { 1 } else { 12 };
            assert_eq!(c13.binom_small(12, d).value(), expected);
        }
        let c7 = ctx(7);
        assert_eq!(c7.binom_small(12, 5).value(), 1);
        assert_eq!(c7.binom_small(12, 4).value(), 5);
        assert_eq!(c7.binom_small(4, -1).value(), 0);
        assert_eq!(c7.binom_small(-2, -1).value(), 0);
        assert_eq!(c7.binom_small(3, 4).value(), 0);
    }

    #[test]
    fn pascal_identity() {
        for p in [2u64, 3, 5, 7, 13] {
            let c = ctx(p);
            let p = p as i64;
            for n in 0..=2 * p {
                for m in 0..=n {
                    let lhs = c.add(c.binom_small(n, m), c.binom_small(n, m - 1));
                    assert_eq!(lhs, c.binom_small(n + 1, m), "p={p} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn central_binomial_vanishes_above_half() {
        for p in [5u64, 7, 11, 13, 97] {
            let c = ctx(p);
            let p = p as i64;
            for d in (p + 1) / 2..p {
                assert!(c.binom_small(2 * d, d).is_zero());
            }
        }
    }

    #[test]
    fn lucas_matches_exact_binomials() {
        for p in [2u64, 3, 5, 7, 13] {
            let c = ctx(p);
            let bp = BigUint::from(p);
            for n in 0..=500u64 {
                for k in 0..=n + 1 {
                    let expected = exact_binom(n, k) % &bp;
                    let got = c.binom_lucas(&BigUint::from(n), &BigUint::from(k));
                    assert_eq!(BigUint::from(got.value()), expected, "p={p} C({n},{k})");
                    assert_eq!(got, c.binom_lucas_u128(u128::from(n), u128::from(k)));
                }
            }
        }
    }

    #[test]
    fn lucas_named_values() {
        let c11 = ctx(11);
        assert!(c11
            .binom_lucas(&BigUint::from(20u32), &BigUint::from(10u32))
            .is_zero());
        let c7 = ctx(7);
        assert_eq!(
            c7.binom_lucas(&BigUint::from(123_456u32), &BigUint::zero()),
            c7.one()
        );
        let expected = exact_binom(100, 50) % BigUint::from(7u32);
        assert_eq!(
            BigUint::from(
                c7.binom_lucas(&BigUint::from(100u32), &BigUint::from(50u32))
                    .value()
            ),
            expected
        );
    }

    #[test]
    fn digits_roundtrip_large_values() {
        let c = ctx(13);
        let n: BigUint = "98765432123456789012345678901234567890".parse().unwrap();
        let digits = c.digits_of(&n);
        let back = digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * 13u32 + d);
        assert_eq!(back, n);
        assert!(c.digits_of(&BigUint::zero()).is_empty());
    }
}
