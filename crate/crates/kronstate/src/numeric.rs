//! Exact rationals and finite sums of quadratic surds.
//!
//! A [`SurdSum`] stores `Σ a·√b` as a map from squarefree radicand `b` to a
//! nonzero rational `a`, so structural equality is numeric equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{KronError, Result};

pub type Rational = num_rational::BigRational;

/// Default trial-division bound used by [`squarefree_split`].
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

/// Splits `m = s²·r` with `r` squarefree, returning `(s, r)`.
///
/// Small primes are removed by trial division up to `bound`. A cofactor left
/// over is folded into `s` when it is a perfect square and otherwise kept whole,
/// i.e. assumed squarefree.
pub fn squarefree_split(m: &BigUint, bound: u64) -> (BigUint, BigUint) {
    if m.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    if let Some(small) = m.to_u64() {
        return split_u64(small, bound);
    }
    let mut rest = m.clone();
    let mut s = BigUint::one();
    let mut r = BigUint::one();
    let mut p: u64 = 2;
    while p <= bound {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, rem) = rest.div_rem(&pb);
            if !rem.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            s *= pb.pow(e / 2);
            if e % 2 == 1 {
                r *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
        if let Some(small) = rest.to_u64() {
            let (s2, r2) = split_u64(small, bound);
            return (s * s2, r * r2);
        }
    }
    if rest.is_one() {
        return (s, r);
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        return (s * root, r);
    }
    // a cofactor with no prime factor below the bound is kept whole
    (s, r * rest)
}

fn split_u64(mut m: u64, bound: u64) -> (BigUint, BigUint) {
    let mut s: u128 = 1;
    let mut r: u128 = 1;
    let mut p: u64 = 2;
    while p <= bound && (p as u128) * (p as u128) <= m as u128 {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            for _ in 0..e / 2 {
                s *= p as u128;
            }
            if e % 2 == 1 {
                r *= p as u128;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        let root = m.sqrt();
        if root * root == m {
            s *= root as u128;
        } else {
            r *= m as u128;
        }
    }
    (BigUint::from(s), BigUint::from(r))
}

/// Exact value `Σ a·√b` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SurdSum {
    terms: BTreeMap<BigUint, Rational>,
}

impl SurdSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(BigUint::one(), q);
        }
        SurdSum { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// `a·√b` for an arbitrary nonnegative integer `b` (reduced on the way in).
    pub fn surd(a: Rational, b: &BigUint) -> Self {
        if a.is_zero() || b.is_zero() {
            return Self::zero();
        }
        let (s, r) = squarefree_split(b, DEFAULT_TRIAL_BOUND);
        let mut terms = BTreeMap::new();
        terms.insert(r, a * Rational::from_integer(BigInt::from(s)));
        SurdSum { terms }
    }

    /// `a·√r` where the caller guarantees `r` is squarefree.
    pub fn surd_unchecked(a: Rational, r: BigUint) -> Self {
        let mut terms = BTreeMap::new();
        if !a.is_zero() {
            terms.insert(r, a);
        }
        SurdSum { terms }
    }

    /// Nonnegative square root of a rational.
    pub fn sqrt_of(q: &Rational) -> Result<Self> {
        Self::sqrt_of_with_bound(q, DEFAULT_TRIAL_BOUND)
    }

    pub fn sqrt_of_with_bound(q: &Rational, bound: u64) -> Result<Self> {
        if q.is_negative() {
            return Err(KronError::Domain(format!(
                "square root of negative rational {q}"
            )));
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        // √(a/b) = √(a·b)/b
        let a = q.numer().magnitude();
        let b = q.denom().magnitude();
        let (s, r) = squarefree_split(&(a * b), bound);
        let coeff = Rational::new(BigInt::from(s), BigInt::from(b.clone()));
        Ok(Self::surd_unchecked(coeff, r))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The rational value, if the number has no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    /// `(a, r)` when the value is a single surd `a·√r` (zero gives `(0, 1)`).
    pub fn as_single(&self) -> Option<(Rational, BigUint)> {
        match self.terms.len() {
            0 => Some((Rational::zero(), BigUint::one())),
            1 => {
                let (r, a) = self.terms.iter().next().unwrap();
                Some((a.clone(), r.clone()))
            }
            _ => None,
        }
    }

    /// Inverse of a single nonzero surd: `1/(a√r) = √r/(a·r)`.
    pub fn inv_single(&self) -> Result<Self> {
        let (a, r) = self
            .as_single()
            .ok_or_else(|| KronError::Domain("inverse of a multi-term surd sum".into()))?;
        if a.is_zero() {
            return Err(KronError::Domain("division by zero".into()));
        }
        let denom = a * Rational::from_integer(BigInt::from(r.clone()));
        Ok(Self::surd_unchecked(denom.recip(), r))
    }

    pub fn div_single(&self, other: &SurdSum) -> Result<Self> {
        Ok(self * &other.inv_single()?)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        SurdSum {
            terms: self.terms.iter().map(|(r, a)| (r.clone(), a * q)).collect(),
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Lossy conversion for diagnostics.
    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, a)| rational_to_f64(a) * biguint_to_f64(r).sqrt())
            .sum()
    }

    /// Exact sign, by interval refinement of the square roots.
    pub fn signum(&self) -> i32 {
        if self.terms.is_empty() {
            return 0;
        }
        if self.terms.len() == 1 {
            let a = self.terms.values().next().unwrap();
            return if a.is_positive() { 1 } else { -1 };
        }
        let mut bits = 64u64;
        loop {
            let (lo, hi) = self.enclose(bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
        }
    }

    /// Rational bounds `lo ≤ value ≤ hi` using `bits` fractional bits per root.
    fn enclose(&self, bits: u64) -> (Rational, Rational) {
        let scale = BigUint::one() << (2 * bits);
        let denom = BigInt::one() << bits;
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (r, a) in &self.terms {
            if r.is_one() {
                lo += a;
                hi += a;
                continue;
            }
            let floor = (r * &scale).sqrt();
            let f = Rational::new(BigInt::from(floor.clone()), denom.clone());
            let c = Rational::new(BigInt::from(floor + 1u32), denom.clone());
            if a.is_positive() {
                lo += a * &f;
                hi += a * &c;
            } else {
                lo += a * &c;
                hi += a * &f;
            }
        }
        (lo, hi)
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact square root when the value is rational and nonnegative.
    pub fn sqrt(&self) -> Result<Self> {
        match self.as_rational() {
            Some(q) => Self::sqrt_of(&q),
            None => Err(KronError::IrrationalNorm(self.clone())),
        }
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // fall back through logs for huge parts
        let n = bigint_to_f64(q.numer());
        let d = bigint_to_f64(q.denom());
        n / d
    })
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.sign() == Sign::Minus {
        f64::MIN
    } else {
        f64::MAX
    })
}

fn biguint_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::MAX)
}

impl Zero for SurdSum {
    fn zero() -> Self {
        SurdSum::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl From<Rational> for SurdSum {
    fn from(q: Rational) -> Self {
        SurdSum::from_rational(q)
    }
}

impl From<i64> for SurdSum {
    fn from(n: i64) -> Self {
        SurdSum::from_int(n)
    }
}

impl AddAssign<&SurdSum> for SurdSum {
    fn add_assign(&mut self, rhs: &SurdSum) {
        for (r, a) in &rhs.terms {
            add_term(&mut self.terms, r.clone(), a.clone());
        }
    }
}

impl SubAssign<&SurdSum> for SurdSum {
    fn sub_assign(&mut self, rhs: &SurdSum) {
        for (r, a) in &rhs.terms {
            add_term(&mut self.terms, r.clone(), -a);
        }
    }
}

fn add_term(terms: &mut BTreeMap<BigUint, Rational>, r: BigUint, a: Rational) {
    use std::collections::btree_map::Entry;
    match terms.entry(r) {
        Entry::Vacant(v) => {
            if !a.is_zero() {
                v.insert(a);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += a;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl<'a> Add<&'a SurdSum> for &'a SurdSum {
    type Output = SurdSum;
    fn add(self, rhs: &SurdSum) -> SurdSum {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for SurdSum {
    type Output = SurdSum;
    fn add(mut self, rhs: SurdSum) -> SurdSum {
        self += &rhs;
        self
    }
}

impl<'a> Sub<&'a SurdSum> for &'a SurdSum {
    type Output = SurdSum;
    fn sub(self, rhs: &SurdSum) -> SurdSum {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for SurdSum {
    type Output = SurdSum;
    fn sub(mut self, rhs: SurdSum) -> SurdSum {
        self -= &rhs;
        self
    }
}

impl<'a> Mul<&'a SurdSum> for &'a SurdSum {
    type Output = SurdSum;
    fn mul(self, rhs: &SurdSum) -> SurdSum {
        let mut terms = BTreeMap::new();
        for (r1, a1) in &self.terms {
            for (r2, a2) in &rhs.terms {
                // √r1·√r2 = g·√((r1/g)(r2/g)) with g = gcd(r1, r2); both squarefree
                let g = r1.gcd(r2);
                let r = (r1 / &g) * (r2 / &g);
                let a = a1 * a2 * Rational::from_integer(BigInt::from(g));
                add_term(&mut terms, r, a);
            }
        }
        SurdSum { terms }
    }
}

impl Mul for SurdSum {
    type Output = SurdSum;
    fn mul(self, rhs: SurdSum) -> SurdSum {
        &self * &rhs
    }
}

impl MulAssign<&SurdSum> for SurdSum {
    fn mul_assign(&mut self, rhs: &SurdSum) {
        *self = &*self * rhs;
    }
}

impl Neg for SurdSum {
    type Output = SurdSum;
    fn neg(mut self) -> SurdSum {
        for a in self.terms.values_mut() {
            *a = -a.clone();
        }
        self
    }
}

impl Neg for &SurdSum {
    type Output = SurdSum;
    fn neg(self) -> SurdSum {
        -self.clone()
    }
}

impl std::iter::Sum for SurdSum {
    fn sum<I: Iterator<Item = SurdSum>>(iter: I) -> SurdSum {
        let mut acc = SurdSum::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

pub fn surd_add(x: &SurdSum, y: &SurdSum) -> SurdSum {
    x + y
}

pub fn surd_mul(x: &SurdSum, y: &SurdSum) -> SurdSum {
    x * y
}

pub fn surd_neg(x: &SurdSum) -> SurdSum {
    -x
}

pub fn surd_from_sqrt(q: &Rational) -> Result<SurdSum> {
    SurdSum::sqrt_of(q)
}

pub fn surd_as_rational(x: &SurdSum) -> Option<Rational> {
    x.as_rational()
}

fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, a)) in self.terms.iter().enumerate() {
            let mag = a.abs();
            if a.is_negative() {
                write!(f, "-")?;
            } else if i > 0 {
                write!(f, "+")?;
            }
            if r.is_one() {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "sqrt({r})")?;
            } else {
                write!(f, "{}*sqrt({r})", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SurdSum({self})")
    }
}

impl FromStr for SurdSum {
    type Err = KronError;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.replace('\u{2212}', "-");
        if s.is_empty() {
            return Err(KronError::Parse("empty surd".into()));
        }
        let mut out = SurdSum::zero();
        let bytes = s.as_bytes();
        let mut start = 0;
        let mut depth = 0i32;
        for i in 0..=bytes.len() {
            let boundary = i == bytes.len()
                || (i > start
                    && depth == 0
                    && (bytes[i] == b'+' || bytes[i] == b'-')
                    && bytes[i - 1] != b'/');
            if i < bytes.len() {
                match bytes[i] {
                    b'(' => depth += 1,
                    b')' => depth -= 1,
                    _ => {}
                }
            }
            if boundary {
                out += &parse_term(&s[start..i])?;
                start = i;
            }
        }
        Ok(out)
    }
}

fn parse_term(t: &str) -> Result<SurdSum> {
    let bad = || KronError::Parse(format!("bad surd term '{t}'"));
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (coef, rad) = if let Some(idx) = body.find("sqrt(") {
        let head = &body[..idx];
        let tail = &body[idx + 5..];
        let close = tail.find(')').ok_or_else(bad)?;
        if close + 1 != tail.len() {
            return Err(bad());
        }
        let rad: BigUint = tail[..close].parse().map_err(|_| bad())?;
        let coef = if head.is_empty() {
            Rational::one()
        } else {
            let head = head.strip_suffix('*').ok_or_else(bad)?;
            head.parse::<Rational>().map_err(|_| bad())?
        };
        (coef, rad)
    } else {
        (body.parse::<Rational>().map_err(|_| bad())?, BigUint::one())
    };
    let coef = if neg { -coef } else { coef };
    Ok(SurdSum::surd(coef, &rad))
}
