//! Brute-force references for `C_n mod p`, independent of the automaton.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeContext};

/// Largest `N` accepted by [`catalan_convolution`].
pub const CONVOLUTION_LIMIT: usize = 100_000;

/// `C_n mod p` as `C(2n, n) - C(2n, n+1)`, each binomial by Lucas' theorem.
///
/// The ballot form avoids dividing by `n + 1`, which fails when `p | n + 1`.
pub fn catalan_lucas_oracle(n: &BigUint, ctx: &PrimeContext) -> Fp {
    let two_n = n * 2u32;
    let n1 = n + 1u32;
    ctx.sub(ctx.binom_lucas(&two_n, n), ctx.binom_lucas(&two_n, &n1))
}

/// Machine-word variant of [`catalan_lucas_oracle`] for sweeps.
pub fn catalan_lucas_u64(n: u64, ctx: &PrimeContext) -> Fp {
    let n = u128::from(n);
    ctx.sub(
        ctx.binom_lucas_u128(2 * n, n),
        ctx.binom_lucas_u128(2 * n, n + 1),
    )
}

/// `[C_0, ..., C_N] mod p` from the Segner recurrence
/// `C_{n+1} = sum_{i=0}^{n} C_i C_{n-i}`. Quadratic, kept naive on purpose.
pub fn catalan_convolution(limit: usize, ctx: &PrimeContext) -> Result<Vec<Fp>> {
    if limit > CONVOLUTION_LIMIT {
        return Err(Error::Resource(format!(
            "convolution oracle limit {limit} exceeds {CONVOLUTION_LIMIT}"
        )));
    }
    let p = u64::from(ctx.p());
    let mut c: Vec<u64> = Vec::with_capacity(limit + 1);
    c.push(1 % p);
    for n in 0..limit {
        let mut acc = 0u64;
        for i in 0..=n {
            acc = (acc + c[i] * c[n - i]) % p;
        }
        c.push(acc);
    }
    Ok(c.into_iter().map(|v| ctx.fp(v as i64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn convolution_prefix_p5() {
        let c = ctx(5);
        let got: Vec<u32> = catalan_convolution(9, &c)
            .unwrap()
            .iter()
            .map(|v| v.value())
            .collect();
        // C_0..C_9 = 1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862
        assert_eq!(got, vec![1, 1, 2, 0, 4, 2, 2, 4, 0, 2]);
        assert_eq!(catalan_convolution(0, &c).unwrap(), vec![c.one()]);
        assert!(matches!(
            catalan_convolution(CONVOLUTION_LIMIT + 1, &c),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn oracles_agree() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let c = ctx(p);
            let conv = catalan_convolution(5000, &c).unwrap();
            for (n, &v) in conv.iter().enumerate() {
                assert_eq!(catalan_lucas_u64(n as u64, &c), v, "p={p} n={n}");
            }
            for n in [0u64, 1, 17, 4999] {
                assert_eq!(
                    catalan_lucas_oracle(&BigUint::from(n), &c),
                    conv[n as usize]
                );
            }
        }
    }

    #[test]
    fn all_max_digit_values() {
        for p in [5u64, 7] {
            let c = ctx(p);
            let mut n = BigUint::from(1u32);
            for _ in 1..=6 {
                n *= p;
                let m = &n - 1u32;
                assert_eq!(catalan_lucas_oracle(&m, &c), c.fp(-1));
            }
        }
    }

    #[test]
    fn parity_of_catalan_numbers() {
        let c = ctx(2);
        for n in 0..=(1u64 << 16) {
            let odd = (n + 1).is_power_of_two();
            assert_eq!(catalan_lucas_u64(n, &c).value() == 1, odd, "n = {n}");
        }
    }
}
