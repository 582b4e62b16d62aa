//! Arithmetic in the prime field `F_p`.
//!
//! Elements are plain `u64` values already reduced into `[0, p)`; the field
//! itself is a small copyable handle carrying the modulus. Keeping elements
//! untagged makes vectors and matrices flat arrays, which is what the
//! elimination kernels in [`crate::linalg`] want.

use crate::{Error, Result};

/// A prime field `F_p`, `2 <= p < 2^31`.
///
/// The bound on `p` keeps products of reduced elements inside `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Checked constructor; rejects composites, 0, 1 and primes >= 2^31.
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::BadParameter(format!("modulus {p} too large")));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.p
    }

    /// Reduce a signed value into `[0, p)`.
    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u64 {
        let p = self.p as i64;
        (((x % p) + p) % p) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat; panics on zero, which is always a
    /// logic error at call sites.
    #[inline]
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p - 2)
    }

    /// All field elements, `0..p`.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.p
    }

    /// Binomial coefficient `C(n, k) mod p` by Lucas' theorem: the product of
    /// digitwise binomials in base p, zero as soon as a digit of `k` exceeds
    /// the matching digit of `n`.
    pub fn binomial(&self, mut n: u64, mut k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut acc = 1u64;
        while k > 0 || n > 0 {
            let (nd, kd) = (n % self.p, k % self.p);
            if kd > nd {
                return 0;
            }
            acc = self.mul(acc, small_binomial(self, nd, kd));
            n /= self.p;
            k /= self.p;
        }
        acc
    }
}

/// `C(n, k) mod p` for digits `k <= n < p`, by the multiplicative formula.
fn small_binomial(f: &PrimeField, n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = f.mul(num, (n - i) % f.p());
        den = f.mul(den, (i + 1) % f.p());
    }
    f.mul(num, f.inv(den.max(1)))
}

/// Deterministic Miller-Rabin, exact for all u64 with this witness set.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mod_pow_u128(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b: u128 = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rejects_non_primes() {
        for n in [0u64, 1, 4, 6, 9, 15, 21, 25, 1 << 32] {
            assert!(PrimeField::new(n).is_err(), "{n} accepted");
        }
        for n in [2u64, 3, 5, 7, 11, 101, 65537] {
            assert!(PrimeField::new(n).is_ok(), "{n} rejected");
        }
    }

    /// Field axioms, checked exhaustively for every small characteristic the
    /// rest of the crate exercises.
    #[test]
    fn field_axioms_exhaustive() {
        for p in [2u64, 3, 5, 7] {
            let f = fp(p);
            for a in f.elements() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "p={p} a={a}");
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    /// Independent oracle: exact big-integer factorials, reduced at the end.
    fn binomial_oracle(n: u64, k: u64, p: u64) -> u64 {
        if k > n {
            return 0;
        }
        let fact = |m: u64| -> BigUint {
            let mut acc = BigUint::from(1u32);
            for i in 1..=m {
                acc *= i;
            }
            acc
        };
        let c = fact(n) / (fact(k) * fact(n - k));
        (c % BigUint::from(p)).try_into().unwrap()
    }

    #[test]
    fn lucas_matches_bigint_factorials() {
        for p in [2u64, 3, 5, 7] {
            let f = fp(p);
            for n in 0..60 {
                for k in 0..=n {
                    assert_eq!(
                        f.binomial(n, k),
                        binomial_oracle(n, k, p),
                        "C({n},{k}) mod {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn binomial_pinned_values() {
        assert_eq!(fp(5).binomial(7, 2), 1);
        // Digits of p in base p are (1,0): every 0 < k < p has a larger digit.
        for p in [5u64, 7] {
            let f = fp(p);
            for k in 1..p {
                assert_eq!(f.binomial(p, k), 0);
            }
            assert_eq!(f.binomial(p, 0), 1);
            assert_eq!(f.binomial(p, p), 1);
        }
    }

    proptest! {
        #[test]
        fn pow_matches_repeated_mul(p in prop::sample::select(vec![2u64,3,5,7,11]),
                                    a in 0u64..11, e in 0u64..40) {
            let f = fp(p);
            let a = f.reduce(a);
            let mut acc = 1u64;
            for _ in 0..e { acc = f.mul(acc, a); }
            prop_assert_eq!(f.pow(a, e), acc);
        }

        #[test]
        fn reduce_i64_is_congruent(p in prop::sample::select(vec![2u64,3,5,7,11]),
                                   x in -10_000i64..10_000) {
            let f = fp(p);
            let r = f.reduce_i64(x);
            prop_assert!(r < p);
            let back = (r as i64 - x).rem_euclid(p as i64);
            prop_assert_eq!(back, 0);
        }
    }
}
