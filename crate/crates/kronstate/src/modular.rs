//! Word-sized prime fields and Chinese remaindering.
//!
//! Primes stay below 2³⁰ so products fit in 60 bits and sixteen of them can
//! be summed in a `u64` before reducing.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

/// Largest prime modulus bound (exclusive).
pub const PRIME_LIMIT: u64 = 1 << 30;

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `count` largest primes below [`PRIME_LIMIT`], descending.
pub fn primes_below_limit(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = PRIME_LIMIT - 1;
    while out.len() < count {
        if is_prime_u64(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// Arithmetic modulo a prime `p < 2³⁰`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModP {
    pub p: u64,
}

impl ModP {
    pub fn new(p: u64) -> Self {
        assert!(
            p < PRIME_LIMIT && is_prime_u64(p),
            "modulus must be a prime below 2^30"
        );
        ModP { p }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn pow(self, a: u64, e: u64) -> u64 {
        pow_mod_u64(a, e, self.p)
    }

    pub fn inv(self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn from_bigint(self, x: &BigInt) -> u64 {
        let r = x % BigInt::from(self.p);
        let r = r.to_i64().unwrap();
        self.from_i64(r)
    }

    pub fn from_biguint(self, x: &BigUint) -> u64 {
        (x % BigUint::from(self.p)).to_u64().unwrap()
    }

    /// Symmetric representative in `(−p/2, p/2]`.
    pub fn signed(self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

/// Incremental Chinese remaindering with symmetric reconstruction.
#[derive(Clone, Debug)]
pub struct Crt {
    moduli: Vec<u64>,
    product: BigUint,
}

impl Crt {
    pub fn new(moduli: Vec<u64>) -> Self {
        let product = moduli.iter().fold(BigUint::one(), |acc, &m| acc * m);
        Crt { moduli, product }
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn product(&self) -> &BigUint {
        &self.product
    }

    /// Number of primes from `primes_below_limit` needed to recover any
    /// integer of absolute value at most `2^bits`.
    pub fn primes_for_bits(bits: f64) -> usize {
        // each prime is above 2^29.99; the extra bit covers the sign
        ((bits + 2.0) / 29.9).ceil().max(1.0) as usize
    }

    /// Recovers the integer in `(−M/2, M/2]` with the given residues (Garner).
    pub fn reconstruct(&self, residues: &[u64]) -> BigInt {
        assert_eq!(residues.len(), self.moduli.len());
        // mixed-radix digits
        let k = self.moduli.len();
        let mut digits: Vec<u64> = Vec::with_capacity(k);
        for i in 0..k {
            let f = ModP { p: self.moduli[i] };
            let mut x = residues[i] % f.p;
            let mut prod = 1u64;
            let mut acc = 0u64;
            for (j, &d) in digits.iter().enumerate() {
                acc = f.add(acc, f.mul(d % f.p, prod));
                prod = f.mul(prod, self.moduli[j] % f.p);
            }
            x = f.sub(x, acc);
            digits.push(f.mul(x, f.inv(prod)));
        }
        let mut value = BigUint::zero();
        for i in (0..k).rev() {
            value = value * self.moduli[i] + digits[i];
        }
        let half = &self.product >> 1;
        if value > half {
            BigInt::from(value) - BigInt::from(self.product.clone())
        } else {
            BigInt::from(value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let ps = primes_below_limit(3);
        assert!(ps.iter().all(|&p| p < PRIME_LIMIT && is_prime_u64(p)));
        assert!(ps[0] > ps[1]);
        assert!(!is_prime_u64(1 << 29));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(3215031751));
    }

    #[test]
    fn crt_round_trip() {
        let ps = primes_below_limit(4);
        let crt = Crt::new(ps.clone());
        for x in [
            BigInt::from(0),
            BigInt::from(-1),
            BigInt::from(123456789012345678i64) * 98765,
            BigInt::from(-7) << 100,
        ] {
            let res: Vec<u64> = ps.iter().map(|&p| ModP { p }.from_bigint(&x)).collect();
            assert_eq!(crt.reconstruct(&res), x);
        }
    }

    #[test]
    fn field_ops() {
        let f = ModP::new(primes_below_limit(1)[0]);
        let a = 123456789 % f.p;
        assert_eq!(f.mul(a, f.inv(a)), 1);
        assert_eq!(f.signed(f.from_i64(-5)), -5);
        assert_eq!(f.sub(3, 5), f.p - 2);
    }
}
