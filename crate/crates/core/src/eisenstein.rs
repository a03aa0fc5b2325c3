//! Exact arithmetic in the Eisenstein integers `Z[tau]`.
//!
//! Elements are written `a + b*tau` with `tau = (-1 + sqrt(-3))/2`, so
//! `tau^2 + tau + 1 = 0`, the conjugate of `a + b*tau` is `(a - b) - b*tau`,
//! and the norm is `a^2 - a b + b^2`.  The unit group is the six roots of
//! unity `{+-1, +-tau, +-tau^2}`.  The rational prime 2 stays inert, 3
//! ramifies as `-tau^2 (sqrt(-3))^2`, and `p = 1 (mod 3)` splits.
//!
//! The module provides the exact building blocks for the character-sum
//! formula: Euclidean division with a fixed tie rule, canonical gcds, a
//! deterministic primality test, enumeration of normalized split primes,
//! power residue symbols of degree 2, 3 and 6, and residue systems modulo a
//! squarefree product whose representatives come in `{c, -c}` pairs.

use crate::{CheckRow, Error, Result};
use serde::Serialize;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// An element `a + b*tau` of `Z[tau]`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct EisensteinInt {
    /// Rational coordinate.
    pub a: i128,
    /// Coefficient of `tau`.
    pub b: i128,
}

/// Zero element.
pub const ZERO: EisensteinInt = EisensteinInt { a: 0, b: 0 };
/// Multiplicative identity.
pub const ONE: EisensteinInt = EisensteinInt { a: 1, b: 0 };
/// The ramified element `sqrt(-3) = 1 + 2*tau`.
pub const SQRT_M3: EisensteinInt = EisensteinInt { a: 1, b: 2 };

impl EisensteinInt {
    /// Builds `a + b*tau`.
    pub const fn new(a: i128, b: i128) -> Self {
        EisensteinInt { a, b }
    }

    /// Embeds a rational integer.
    pub const fn from_int(n: i128) -> Self {
        EisensteinInt { a: n, b: 0 }
    }

    /// `a^2 - a b + b^2 >= 0`.
    pub fn norm(&self) -> i128 {
        self.a * self.a - self.a * self.b + self.b * self.b
    }

    /// Trace `x + conj(x) = 2a - b`.
    pub fn trace(&self) -> i128 {
        2 * self.a - self.b
    }

    /// Complex conjugate `(a - b) - b*tau`.
    pub fn conj(&self) -> Self {
        EisensteinInt::new(self.a - self.b, -self.b)
    }

    /// True for the zero element.
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// True for the six roots of unity.
    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    /// The six units `tau^k` and `-tau^k`.
    pub fn units() -> [EisensteinInt; 6] {
        [
            EisensteinInt::new(1, 0),
            EisensteinInt::new(0, 1),
            EisensteinInt::new(-1, -1),
            EisensteinInt::new(-1, 0),
            EisensteinInt::new(0, -1),
            EisensteinInt::new(1, 1),
        ]
    }

    /// The six associates `u * self`.
    pub fn associates(&self) -> [EisensteinInt; 6] {
        let mut out = [ZERO; 6];
        for (slot, u) in out.iter_mut().zip(Self::units()) {
            *slot = u * *self;
        }
        out
    }

    /// Associate maximizing `(trace, b)` lexicographically, with the unit
    /// `u` such that the result equals `u * self`.
    pub fn canonical_associate(&self) -> (EisensteinInt, UnitRoot) {
        let mut best = *self;
        let mut best_u = UnitRoot::ONE;
        for u in UnitRoot::all() {
            let cand = u.value() * *self;
            if (cand.trace(), cand.b) > (best.trace(), best.b) {
                best = cand;
                best_u = u;
            }
        }
        (best, best_u)
    }

    /// Euclidean division `self = q * rhs + r` rounding each coordinate of
    /// the exact quotient to the nearest integer, ties toward zero; the
    /// remainder then satisfies `norm(r) <= (3/4) norm(rhs) < norm(rhs)`.
    pub fn divmod(&self, rhs: &EisensteinInt) -> Result<(EisensteinInt, EisensteinInt)> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = rhs.norm();
        let p = *self * rhs.conj();
        let q = EisensteinInt::new(round_nearest_ties_to_zero(p.a, n), round_nearest_ties_to_zero(p.b, n));
        let r = *self - q * *rhs;
        Ok((q, r))
    }

    /// Remainder of [`EisensteinInt::divmod`].
    pub fn rem(&self, rhs: &EisensteinInt) -> Result<EisensteinInt> {
        Ok(self.divmod(rhs)?.1)
    }

    /// True when `self` divides `other` exactly.
    pub fn divides(&self, other: &EisensteinInt) -> bool {
        match other.divmod(self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Greatest common divisor as the canonical associate; both zero is an error.
    pub fn gcd(x: &EisensteinInt, y: &EisensteinInt) -> Result<EisensteinInt> {
        if x.is_zero() && y.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let (mut a, mut b) = (*x, *y);
        while !b.is_zero() {
            let (_, r) = a.divmod(&b)?;
            a = b;
            b = r;
        }
        Ok(a.canonical_associate().0)
    }

    /// `self^e` modulo `m` by square-and-multiply with reduction each step.
    pub fn pow_mod(&self, e: u64, m: &EisensteinInt) -> Result<EisensteinInt> {
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut base = self.rem(m)?;
        let mut acc = ONE.rem(m)?;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = (acc * base).rem(m)?;
            }
            base = (base * base).rem(m)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Deterministic primality test, total on all inputs.
    ///
    /// Prime elements are: associates of `sqrt(-3)` (norm 3), elements of
    /// rational prime norm `p = 1 (mod 3)` (split), and associates of inert
    /// rational primes `q = 2 (mod 3)` (norm `q^2`), including 2.
    pub fn is_prime(&self) -> bool {
        let n = self.norm();
        if n <= 1 {
            return false;
        }
        if n == 3 {
            return true;
        }
        if is_rational_prime(n) {
            // Norms are never congruent to 2 mod 3, so this is the split case.
            return n % 3 == 1;
        }
        let q = integer_sqrt(n);
        if q * q != n || !is_rational_prime(q) || q % 3 != 2 {
            return false;
        }
        // Inert case: must be a unit multiple of q itself.
        self.a % q == 0 && self.b % q == 0
    }
}

impl Add for EisensteinInt {
    type Output = EisensteinInt;
    fn add(self, rhs: EisensteinInt) -> EisensteinInt {
        EisensteinInt::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for EisensteinInt {
    type Output = EisensteinInt;
    fn sub(self, rhs: EisensteinInt) -> EisensteinInt {
        EisensteinInt::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Mul for EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, rhs: EisensteinInt) -> EisensteinInt {
        // (a + b tau)(c + d tau) = ac - bd + (ad + bc - bd) tau
        let (a, b, c, d) = (self.a, self.b, rhs.a, rhs.b);
        EisensteinInt::new(a * c - b * d, a * d + b * c - b * d)
    }
}

impl Neg for EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt::new(-self.a, -self.b)
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "t"),
            (0, -1) => write!(f, "-t"),
            (0, b) => write!(f, "{b}*t"),
            (a, 1) => write!(f, "{a}+t"),
            (a, -1) => write!(f, "{a}-t"),
            (a, b) if b > 0 => write!(f, "{a}+{b}*t"),
            (a, b) => write!(f, "{a}-{}*t", -b),
        }
    }
}

impl FromStr for EisensteinInt {
    type Err = Error;

    /// Parses `a+b*t` with optional whitespace and optional `*`, e.g.
    /// `"13+12*t"`, `"13 + 12t"`, `"-t"`, `"1-12t"`, `"7"`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse {
                detail: "empty element".into(),
            });
        }
        let bad = |detail: String| Error::Parse { detail };
        let mut a: i128 = 0;
        let mut b: i128 = 0;
        // Split into signed terms.
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for term in &terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1i128, rest),
                None => (1i128, term.strip_prefix('+').unwrap_or(term)),
            };
            if body.is_empty() {
                return Err(bad(format!("dangling sign in {s:?}")));
            }
            if let Some(coeff) = body.strip_suffix('t') {
                let coeff = match coeff.strip_suffix('*') {
                    Some(c) if c.is_empty() => {
                        return Err(bad(format!("bad tau coefficient in {s:?}")))
                    }
                    Some(c) => c,
                    None => coeff,
                };
                let v: i128 = if coeff.is_empty() {
                    1
                } else {
                    coeff
                        .parse()
                        .map_err(|_| bad(format!("bad tau coefficient {coeff:?} in {s:?}")))?
                };
                b += sign * v;
            } else {
                let v: i128 = body
                    .parse()
                    .map_err(|_| bad(format!("bad integer term {body:?} in {s:?}")))?;
                a += sign * v;
            }
        }
        Ok(EisensteinInt::new(a, b))
    }
}

/// A root of unity `sign * tau^tau_exp`.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
pub struct UnitRoot {
    /// `+1` or `-1`.
    pub sign: i8,
    /// Exponent of `tau`, reduced into `{0, 1, 2}`.
    pub tau_exp: u8,
}

impl UnitRoot {
    /// The identity unit.
    pub const ONE: UnitRoot = UnitRoot { sign: 1, tau_exp: 0 };
    /// `-1`.
    pub const MINUS_ONE: UnitRoot = UnitRoot { sign: -1, tau_exp: 0 };

    /// All six units in the order `tau^k`, then `-tau^k`.
    pub fn all() -> [UnitRoot; 6] {
        let mut out = [UnitRoot::ONE; 6];
        for k in 0..3u8 {
            out[k as usize] = UnitRoot { sign: 1, tau_exp: k };
            out[3 + k as usize] = UnitRoot { sign: -1, tau_exp: k };
        }
        out
    }

    /// The unit as an element of `Z[tau]`.
    pub fn value(&self) -> EisensteinInt {
        let t = match self.tau_exp {
            0 => EisensteinInt::new(1, 0),
            1 => EisensteinInt::new(0, 1),
            _ => EisensteinInt::new(-1, -1),
        };
        if self.sign < 0 {
            -t
        } else {
            t
        }
    }

    /// Recognizes a unit element.
    pub fn from_element(x: &EisensteinInt) -> Option<UnitRoot> {
        UnitRoot::all().into_iter().find(|u| u.value() == *x)
    }

    /// Group law.
    pub fn mul(self, other: UnitRoot) -> UnitRoot {
        UnitRoot {
            sign: self.sign * other.sign,
            tau_exp: (self.tau_exp + other.tau_exp) % 3,
        }
    }

    /// `self^e`.
    pub fn pow(self, e: u64) -> UnitRoot {
        UnitRoot {
            sign: if self.sign < 0 && e % 2 == 1 { -1 } else { 1 },
            tau_exp: ((self.tau_exp as u64 * e) % 3) as u8,
        }
    }

    /// For quadratic symbols: the value as `+1` or `-1`.
    pub fn as_sign(&self) -> Result<i64> {
        if self.tau_exp != 0 {
            return Err(Error::Invariant {
                detail: format!("quadratic symbol produced tau^{}", self.tau_exp),
            });
        }
        Ok(self.sign as i64)
    }
}

/// Which normalization a prime list is validated against.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
pub enum CongruenceClass {
    /// `a = 1 (mod 12)` and `b = 0 (mod 12)`.
    Mod12,
    /// `x = 1 (mod 4 sqrt(-3))`; weaker than [`CongruenceClass::Mod12`].
    Mod4SqrtM3,
}

/// True when `x` satisfies the normalization of the given class.
pub fn satisfies_congruence(x: &EisensteinInt, class: CongruenceClass) -> bool {
    match class {
        CongruenceClass::Mod12 => x.a.rem_euclid(12) == 1 && x.b.rem_euclid(12) == 0,
        CongruenceClass::Mod4SqrtM3 => {
            // 4 sqrt(-3) = 4 + 8 tau
            let m = EisensteinInt::new(4, 8);
            m.divides(&(*x - ONE))
        }
    }
}

fn round_nearest_ties_to_zero(p: i128, n: i128) -> i128 {
    debug_assert!(n > 0);
    let mut q = p.div_euclid(n);
    let r = p.rem_euclid(n);
    if 2 * r > n || (2 * r == n && q < 0) {
        q += 1;
    }
    q
}

fn integer_sqrt(n: i128) -> i128 {
    if n < 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for `n < 2^64` (witness set 2..=37).
pub fn is_rational_prime(n: i128) -> bool {
    if n < 2 {
        return false;
    }
    assert!(
        n <= u64::MAX as i128,
        "primality test supports values up to 2^64"
    );
    let n = n as u64;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for w in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(w, d, n);
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

/// Enumerates normalized split primes with norm at most `norm_bound`.
///
/// Returned elements have rational prime norm `p = 1 (mod 3)` (degree one),
/// satisfy the congruence normalization of `class`, and are sorted by
/// `(norm, a, b)`.  Conjugates appear as separate entries since they generate
/// distinct ideals.
pub fn find_primes(norm_bound: i128, class: CongruenceClass) -> Vec<EisensteinInt> {
    let mut out = Vec::new();
    if norm_bound < 7 {
        return out;
    }
    // norm >= 3 a^2 / 4 and symmetrically for b, so |a|, |b| <= 2 sqrt(B/3).
    let lim = (2.0 * (norm_bound as f64 / 3.0).sqrt()).ceil() as i128 + 1;
    for a in -lim..=lim {
        for b in -lim..=lim {
            let x = EisensteinInt::new(a, b);
            let n = x.norm();
            if n < 7 || n > norm_bound {
                continue;
            }
            if !is_rational_prime(n) || n % 3 != 1 {
                continue;
            }
            if satisfies_congruence(&x, class) {
                out.push(x);
            }
        }
    }
    out.sort_by_key(|x| (x.norm(), x.a, x.b));
    out
}

fn tau_root_mod_p(p: u64) -> Result<u64> {
    // A primitive cube root of unity mod p, for p = 1 (mod 3).
    for g in 2..p {
        let t = pow_mod_u64(g, (p - 1) / 3, p);
        if t != 1 && (mul_mod_u64(t, t, p) + t + 1) % p == 0 {
            return Ok(t);
        }
    }
    Err(Error::Invariant {
        detail: format!("no cube root of unity mod {p}"),
    })
}

/// A prime element above the split rational prime `p = 1 (mod 3)`,
/// normalized to the canonical associate.
pub fn prime_above(p: i128) -> Result<EisensteinInt> {
    if p <= 3 || p % 3 != 1 || !is_rational_prime(p) {
        return Err(Error::NotPrime {
            element: p.to_string(),
            reason: "prime_above requires a rational prime p = 1 (mod 3)".into(),
        });
    }
    let t = tau_root_mod_p(p as u64)? as i128;
    // tau maps to t under one embedding mod p, so tau - t lies in one prime above p.
    let g = EisensteinInt::gcd(&EisensteinInt::from_int(p), &EisensteinInt::new(-t, 1))?;
    if g.norm() != p {
        return Err(Error::Invariant {
            detail: format!("prime_above({p}) produced norm {}", g.norm()),
        });
    }
    Ok(g)
}

fn factor_into_primes(beta: &EisensteinInt) -> Result<Vec<(EisensteinInt, u32)>> {
    let mut factors: Vec<(EisensteinInt, u32)> = Vec::new();
    let mut rem = *beta;
    let push = |p: EisensteinInt, factors: &mut Vec<(EisensteinInt, u32)>| {
        if let Some(slot) = factors.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += 1;
        } else {
            factors.push((p, 1));
        }
    };
    let mut n = rem.norm();
    let mut p: i128 = 2;
    while p * p <= n {
        while n % p == 0 {
            let candidates: Vec<EisensteinInt> = if p % 3 == 2 {
                vec![EisensteinInt::from_int(p)]
            } else if p == 3 {
                vec![SQRT_M3]
            } else {
                let g = prime_above(p)?;
                vec![g, g.conj()]
            };
            let mut divided = false;
            for c in candidates {
                let (q, r) = rem.divmod(&c)?;
                if r.is_zero() {
                    push(c, &mut factors);
                    rem = q;
                    n = rem.norm();
                    divided = true;
                    break;
                }
            }
            if !divided {
                return Err(Error::Invariant {
                    detail: format!("factorization stalled at {rem} over {p}"),
                });
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        // The cofactor has prime norm, hence is itself prime.
        push(rem, &mut factors);
    }
    Ok(factors)
}

fn symbol_at_prime(alpha: &EisensteinInt, pi: &EisensteinInt, degree: u64) -> Result<UnitRoot> {
    // Residue field size: p for split primes, q^2 for inert ones.
    let np = pi.norm();
    debug_assert_eq!((np - 1) % degree as i128, 0);
    let e = ((np - 1) / degree as i128) as u64;
    let r = alpha.pow_mod(e, pi)?;
    for u in UnitRoot::all() {
        if pi.divides(&(r - u.value())) {
            // The d-th power residue symbol lands in the d-th roots of unity.
            let ok = match degree {
                2 => u.tau_exp == 0,
                3 => u.sign > 0,
                _ => true,
            };
            if !ok {
                return Err(Error::Invariant {
                    detail: format!("symbol of degree {degree} produced unit {}", u.value()),
                });
            }
            return Ok(u);
        }
    }
    Err(Error::SymbolNotCoprime {
        alpha: alpha.to_string(),
        beta: pi.to_string(),
    })
}

/// The power residue symbol `(alpha | beta)_degree` for `degree` in `{2, 3, 6}`,
/// extended multiplicatively over the prime factorization of `beta`.
///
/// `beta` must be coprime to 6; a unit `beta` gives the trivial symbol, and
/// arguments sharing a prime factor are an error.
pub fn power_residue_symbol(
    alpha: &EisensteinInt,
    beta: &EisensteinInt,
    degree: u32,
) -> Result<UnitRoot> {
    assert!(
        matches!(degree, 2 | 3 | 6),
        "symbol degree must be 2, 3, or 6"
    );
    if beta.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if beta.is_unit() {
        return Ok(UnitRoot::ONE);
    }
    let n = beta.norm();
    if n % 2 == 0 || n % 3 == 0 {
        return Err(Error::SymbolBadDenominator {
            beta: beta.to_string(),
        });
    }
    let g = EisensteinInt::gcd(alpha, beta)?;
    if !g.is_unit() {
        return Err(Error::SymbolNotCoprime {
            alpha: alpha.to_string(),
            beta: beta.to_string(),
        });
    }
    let mut acc = UnitRoot::ONE;
    for (pi, mult) in factor_into_primes(beta)? {
        let s = symbol_at_prime(alpha, &pi, degree as u64)?;
        acc = acc.mul(s.pow(mult as u64));
    }
    Ok(acc)
}

/// A validated squarefree product `D = pi_1 ... pi_n` of normalized split primes.
#[derive(Clone, Debug)]
pub struct SquarefreeD {
    primes: Vec<EisensteinInt>,
    class: CongruenceClass,
    d: EisensteinInt,
}

impl SquarefreeD {
    /// Validates the prime list: each entry prime, degree one, normalized,
    /// and pairwise non-associate.  The empty list gives `D = 1`.
    pub fn new(primes: Vec<EisensteinInt>, class: CongruenceClass) -> Result<Self> {
        for p in &primes {
            if !p.is_prime() {
                return Err(Error::NotPrime {
                    element: p.to_string(),
                    reason: "not a prime of Z[tau]".into(),
                });
            }
            if !is_rational_prime(p.norm()) || p.norm() % 3 != 1 {
                return Err(Error::NotPrime {
                    element: p.to_string(),
                    reason: "must be a degree-one prime with norm = 1 (mod 3)".into(),
                });
            }
            if !satisfies_congruence(p, class) {
                return Err(Error::CongruenceViolation {
                    element: p.to_string(),
                    reason: match class {
                        CongruenceClass::Mod12 => "requires a = 1, b = 0 (mod 12)".into(),
                        CongruenceClass::Mod4SqrtM3 => "requires x = 1 (mod 4 sqrt(-3))".into(),
                    },
                });
            }
        }
        for i in 0..primes.len() {
            for j in i + 1..primes.len() {
                if primes[i].norm() == primes[j].norm() {
                    let assoc = primes[i]
                        .associates()
                        .iter()
                        .any(|x| *x == primes[j]);
                    if assoc {
                        return Err(Error::DuplicatePrime {
                            first: primes[i].to_string(),
                            second: primes[j].to_string(),
                        });
                    }
                }
            }
        }
        let d = primes.iter().fold(ONE, |acc, p| acc * *p);
        Ok(SquarefreeD { primes, class, d })
    }

    /// Parses a comma-separated list such as `"13+12*t, 1-12*t"`.
    pub fn parse_list(s: &str, class: CongruenceClass) -> Result<Self> {
        let primes = if s.trim().is_empty() {
            Vec::new()
        } else {
            s.split(',')
                .map(|part| part.trim().parse())
                .collect::<Result<Vec<EisensteinInt>>>()?
        };
        SquarefreeD::new(primes, class)
    }

    /// The prime factors in input order.
    pub fn primes(&self) -> &[EisensteinInt] {
        &self.primes
    }

    /// The product `D`.
    pub fn d(&self) -> EisensteinInt {
        self.d
    }

    /// Number of prime factors `n`.
    pub fn n(&self) -> usize {
        self.primes.len()
    }

    /// The congruence class the list was validated against.
    pub fn class(&self) -> CongruenceClass {
        self.class
    }
}

/// A subset `T` of the primes of a [`SquarefreeD`], as a bitmask.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SubsetSelector {
    mask: u32,
}

impl SubsetSelector {
    /// Validates `mask < 2^n` for a list of `n` primes.
    pub fn new(mask: u32, prime_count: usize) -> Result<Self> {
        if prime_count < 32 && mask >= (1u32 << prime_count) {
            return Err(Error::SubsetMaskOutOfRange {
                mask,
                count: prime_count,
            });
        }
        Ok(SubsetSelector { mask })
    }

    /// The empty subset (`D_T = 1`).
    pub fn empty() -> Self {
        SubsetSelector { mask: 0 }
    }

    /// The full subset for `n` primes.
    pub fn full(prime_count: usize) -> Self {
        SubsetSelector {
            mask: if prime_count == 0 {
                0
            } else {
                (1u32 << prime_count) - 1
            },
        }
    }

    /// The raw mask.
    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Whether prime `k` is selected.
    pub fn contains(&self, k: usize) -> bool {
        self.mask >> k & 1 == 1
    }

    /// `D_T`, the product over the selected primes.
    pub fn d_t(&self, d: &SquarefreeD) -> EisensteinInt {
        d.primes()
            .iter()
            .enumerate()
            .filter(|(k, _)| self.contains(*k))
            .fold(ONE, |acc, (_, p)| acc * *p)
    }

    /// `D-hat_T = D / D_T`, the product over the complement.
    pub fn d_hat(&self, d: &SquarefreeD) -> EisensteinInt {
        d.primes()
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.contains(*k))
            .fold(ONE, |acc, (_, p)| acc * *p)
    }

    /// Indices of the complement primes.
    pub fn complement_indices(&self, d: &SquarefreeD) -> Vec<usize> {
        (0..d.n()).filter(|k| !self.contains(*k)).collect()
    }
}

/// A complete residue system prime to `D`, closed under negation.
#[derive(Clone, Debug)]
pub struct ResidueSystem {
    d: EisensteinInt,
    reps: Vec<EisensteinInt>,
}

impl ResidueSystem {
    /// The modulus `D`.
    pub fn d(&self) -> EisensteinInt {
        self.d
    }

    /// The representatives; for `D != 1` they come as adjacent exact pairs
    /// `[c, -c]`.
    pub fn reps(&self) -> &[EisensteinInt] {
        &self.reps
    }

    /// Number of representatives, `prod (N pi_k - 1)`.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    /// True only in the degenerate case of an empty system (never produced).
    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Builds the residue system for `D` by the Chinese remainder theorem.
///
/// For each prime `pi_k` of norm `p_k`, the invertible classes are represented
/// by the rational residues `1..p_k`; a mixed-radix scan over index tuples
/// emits each `{J, J'}` negation pair (`j'_k = p_k - j_k`) as two adjacent
/// entries `[c, -c]` with `-c` the exact elementwise negation.  `D = 1`
/// produces the single representative 0.
pub fn residue_system(d: &SquarefreeD) -> Result<ResidueSystem> {
    if d.n() == 0 {
        return Ok(ResidueSystem {
            d: ONE,
            reps: vec![ZERO],
        });
    }
    let dd = d.d();
    let n = d.n();
    let mut basis = Vec::with_capacity(n);
    let mut radix = Vec::with_capacity(n);
    for pi in d.primes() {
        let p = pi.norm();
        let (m_k, r) = dd.divmod(pi)?;
        debug_assert!(r.is_zero());
        // Inverse of M_k in the residue field F_p by Fermat.
        let u_k = m_k.pow_mod((p - 2) as u64, pi)?;
        let e_k = (m_k * u_k).rem(&dd)?;
        basis.push(e_k);
        radix.push(p);
    }
    let total: usize = radix.iter().map(|p| (*p - 1) as usize).product();
    let mut reps = Vec::with_capacity(total);
    let mut tuple: Vec<i128> = vec![1; n];
    loop {
        // Emit only the lexicographically smaller member of each pair.
        let partner: Vec<i128> = tuple.iter().zip(&radix).map(|(j, p)| *p - *j).collect();
        if tuple < partner {
            let mut sum = ZERO;
            for (j, e) in tuple.iter().zip(&basis) {
                sum = sum + EisensteinInt::new(j * e.a, j * e.b);
            }
            let c = sum.rem(&dd)?;
            reps.push(c);
            reps.push(-c);
        }
        // Mixed-radix increment.
        let mut k = n;
        loop {
            if k == 0 {
                return finish_residue_system(dd, reps, total);
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < radix[k] {
                break;
            }
            tuple[k] = 1;
        }
    }
}

fn finish_residue_system(
    d: EisensteinInt,
    reps: Vec<EisensteinInt>,
    expected: usize,
) -> Result<ResidueSystem> {
    if reps.len() != expected {
        return Err(Error::Invariant {
            detail: format!(
                "residue system size {} does not match prod(Np - 1) = {expected}",
                reps.len()
            ),
        });
    }
    Ok(ResidueSystem { d, reps })
}

/// Quadratic character `(c | D_T)_2` as `+-1`, using the known factorization.
pub fn chi_quadratic(
    c: &EisensteinInt,
    d: &SquarefreeD,
    t: &SubsetSelector,
) -> Result<i64> {
    let mut acc = 1i64;
    for (k, pi) in d.primes().iter().enumerate() {
        if t.contains(k) {
            acc *= symbol_at_prime(c, pi, 2)?.as_sign()?;
        }
    }
    Ok(acc)
}

/// Exact consistency suite for symbols and character sums over `D`.
///
/// Every check is exact (unit algebra or integer sums); rows report a count
/// of violations as the "error".  Requires `n >= 1`.
pub fn symbol_suite(d: &SquarefreeD) -> Result<Vec<CheckRow>> {
    if d.n() == 0 {
        return Err(Error::CertificateRequiresPrimes {
            detail: "symbol suite needs at least one prime".into(),
        });
    }
    let sys = residue_system(d)?;
    let dd = d.d();
    let n = d.n();
    let masks: Vec<SubsetSelector> = (1u32..1 << n)
        .map(|m| SubsetSelector::new(m, n))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let exact_row = |name: &str, violations: usize, witness: Option<String>| CheckRow {
        name: name.into(),
        error: violations.to_string(),
        tolerance: "0".into(),
        pass: violations == 0,
        witness,
    };

    // (-1 | D_T)_2 = 1 for every nonempty subset.
    let mut bad = 0;
    for t in &masks {
        let s = power_residue_symbol(&-ONE, &t.d_t(d), 2)?.as_sign()?;
        if s != 1 {
            bad += 1;
        }
    }
    rows.push(exact_row("symbol(-1, D_T, 2) = +1", bad, None));

    // Reciprocity and the sixfold shift, over all c and nonempty T.
    let mut bad_rec = 0usize;
    let mut bad_shift = 0usize;
    let mut witness_rec = None;
    let mut witness_shift = None;
    for t in &masks {
        let dt = t.d_t(d);
        for c in sys.reps() {
            let alpha = EisensteinInt::new(6 * c.a + dd.a, 6 * c.b + dd.b);
            let lhs = power_residue_symbol(&dt, &alpha, 2)?.as_sign()?;
            let mid = power_residue_symbol(&alpha, &dt, 2)?.as_sign()?;
            let two_c = EisensteinInt::new(2 * c.a, 2 * c.b);
            let rhs = power_residue_symbol(&two_c, &dt, 2)?.as_sign()?;
            if lhs != mid {
                bad_rec += 1;
                witness_rec.get_or_insert_with(|| format!("c = {c}, D_T = {dt}"));
            }
            if mid != rhs {
                bad_shift += 1;
                witness_shift.get_or_insert_with(|| format!("c = {c}, D_T = {dt}"));
            }
        }
    }
    rows.push(exact_row(
        "reciprocity symbol(D_T, 6c+D, 2) = symbol(6c+D, D_T, 2)",
        bad_rec,
        witness_rec,
    ));
    rows.push(exact_row(
        "shift symbol(6c+D, D_T, 2) = symbol(2c, D_T, 2)",
        bad_shift,
        witness_shift,
    ));

    // Character sums vanish for nonempty T.
    let mut bad_sum = 0;
    for t in &masks {
        let mut s = 0i64;
        for c in sys.reps() {
            s += chi_quadratic(c, d, t)?;
        }
        if s != 0 {
            bad_sum += 1;
        }
    }
    rows.push(exact_row("sum of chi over residue system = 0", bad_sum, None));

    // Twisted conjugate sum vanishes exactly: sum chi(c) conj(c) = 0.
    let mut bad_conj = 0;
    for t in &masks {
        let mut sa = 0i128;
        let mut sb = 0i128;
        for c in sys.reps() {
            let chi = chi_quadratic(c, d, t)? as i128;
            let cc = c.conj();
            sa += chi * cc.a;
            sb += chi * cc.b;
        }
        if sa != 0 || sb != 0 {
            bad_conj += 1;
        }
    }
    rows.push(exact_row("sum of chi(c) conj(c) = 0", bad_conj, None));

    // 6c + D = 1 (mod 6) elementwise.
    let mut bad_cong = 0;
    for c in sys.reps() {
        let alpha = EisensteinInt::new(6 * c.a + dd.a, 6 * c.b + dd.b);
        if (alpha.a - 1).rem_euclid(6) != 0 || alpha.b.rem_euclid(6) != 0 {
            bad_cong += 1;
        }
    }
    rows.push(exact_row("6c + D = 1 (mod 6)", bad_cong, None));

    // Sextic symbol compatibility on a deterministic sample: chi_6^3 = chi_2
    // and chi_6^2 = chi_3.
    let mut bad_sextic = 0;
    for t in &masks {
        let dt = t.d_t(d);
        for c in sys.reps().iter().step_by(17) {
            let s6 = power_residue_symbol(c, &dt, 6)?;
            let s2 = power_residue_symbol(c, &dt, 2)?;
            let s3 = power_residue_symbol(c, &dt, 3)?;
            if s6.pow(3) != s2 || s6.pow(2) != s3 {
                bad_sextic += 1;
            }
        }
    }
    rows.push(exact_row(
        "sextic symbol: chi_6^3 = chi_2 and chi_6^2 = chi_3",
        bad_sextic,
        None,
    ));

    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(a: i128, b: i128) -> EisensteinInt {
        EisensteinInt::new(a, b)
    }

    const PI: EisensteinInt = EisensteinInt { a: 13, b: 12 };

    #[test]
    fn multiplication_and_norm_agree() {
        let x = e(3, -5);
        let y = e(-7, 2);
        assert_eq!((x * y).norm(), x.norm() * y.norm());
        assert_eq!(x.conj().norm(), x.norm());
        assert_eq!((x * x.conj()).a, x.norm());
        assert_eq!((x * x.conj()).b, 0);
        // tau^2 + tau + 1 = 0
        let tau = e(0, 1);
        assert_eq!(tau * tau + tau + ONE, ZERO);
        // sqrt(-3)^2 = -3
        assert_eq!(SQRT_M3 * SQRT_M3, e(-3, 0));
    }

    #[test]
    fn divmod_remainder_is_small_on_a_grid() {
        for xa in -12..=12i128 {
            for xb in -12..=12 {
                for ya in -4..=4i128 {
                    for yb in -4..=4 {
                        let y = e(ya, yb);
                        if y.is_zero() {
                            continue;
                        }
                        let x = e(xa, xb);
                        let (q, r) = x.divmod(&y).unwrap();
                        assert_eq!(q * y + r, x);
                        assert!(r.norm() < y.norm(), "x={x} y={y} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn divmod_tie_rule_is_toward_zero() {
        // x / y = 1/2 exactly: quotient rounds to 0, not 1.
        let (q, r) = e(1, 0).divmod(&e(2, 0)).unwrap();
        assert_eq!(q, ZERO);
        assert_eq!(r, ONE);
        // x / y = -1/2 exactly: also rounds to 0.
        let (q, r) = e(-1, 0).divmod(&e(2, 0)).unwrap();
        assert_eq!(q, ZERO);
        assert_eq!(r, e(-1, 0));
    }

    #[test]
    fn gcd_matches_known_cases() {
        // gcd(x, 0) = canonical associate of x.
        let g = EisensteinInt::gcd(&e(0, 0), &e(5, 3)).unwrap();
        assert_eq!(g, e(5, 3).canonical_associate().0);
        // Conjugate split primes are coprime.
        let g = EisensteinInt::gcd(&PI, &PI.conj()).unwrap();
        assert!(g.is_unit());
        // gcd(6, sqrt(-3)) is an associate of sqrt(-3).
        let g = EisensteinInt::gcd(&e(6, 0), &SQRT_M3).unwrap();
        assert_eq!(g.norm(), 3);
        assert!(EisensteinInt::gcd(&ZERO, &ZERO).is_err());
    }

    #[test]
    fn canonical_associate_is_stable() {
        let (c, u) = PI.canonical_associate();
        assert_eq!(u.value() * PI, c);
        for a in PI.associates() {
            assert_eq!(a.canonical_associate().0, c);
        }
    }

    #[test]
    fn primality_matches_norm_splitting() {
        assert!(PI.is_prime()); // norm 157, split
        assert!(!e(13, 0).is_prime()); // 13 = pi pi-bar splits
        assert!(e(2, 0).is_prime()); // 2 inert
        assert!(e(-11, 0).is_prime()); // 11 inert
        assert!(SQRT_M3.is_prime()); // ramified
        assert!(e(2, 1).is_prime()); // norm 3
        assert!(!ONE.is_prime());
        assert!(!ZERO.is_prime());
        assert!(!e(6, 0).is_prime());
        assert!(e(3, 1).is_prime()); // norm 7
        assert!(!e(157, 0).is_prime()); // 157 splits
    }

    #[test]
    fn find_primes_matches_pinned_examples() {
        let found = find_primes(157, CongruenceClass::Mod12);
        assert_eq!(found, vec![e(1, -12), e(13, 12)]);
        assert!(find_primes(100, CongruenceClass::Mod12).is_empty());
        let found = find_primes(397, CongruenceClass::Mod12);
        assert!(found.contains(&e(-11, 12)));
        assert_eq!(found.len(), 4); // 157 pair and 397 pair
        // Mod 4 sqrt(-3) is weaker, so it never returns fewer primes.
        let weak = find_primes(397, CongruenceClass::Mod4SqrtM3);
        for p in &found {
            assert!(weak.contains(p));
        }
    }

    #[test]
    fn mod12_implies_mod_4_sqrt_m3() {
        for p in find_primes(2000, CongruenceClass::Mod12) {
            assert!(satisfies_congruence(&p, CongruenceClass::Mod4SqrtM3));
        }
    }

    #[test]
    fn quadratic_symbol_matches_square_table_mod_pi() {
        // Residue field of pi = 13 + 12 tau is F_157 with rational representatives.
        let p = 157i128;
        let mut squares = vec![false; p as usize];
        for j in 1..p {
            squares[((j * j) % p) as usize] = true;
        }
        for j in 1..p {
            let s = power_residue_symbol(&e(j, 0), &PI, 2)
                .unwrap()
                .as_sign()
                .unwrap();
            assert_eq!(s == 1, squares[j as usize], "j = {j}");
        }
    }

    #[test]
    fn symbol_edge_cases() {
        // Unit denominator: trivial symbol.
        let s = power_residue_symbol(&e(5, 3), &ONE, 2).unwrap();
        assert_eq!(s, UnitRoot::ONE);
        // Denominator divisible by 2 or sqrt(-3): error.
        assert!(power_residue_symbol(&e(5, 0), &e(2, 0), 2).is_err());
        assert!(power_residue_symbol(&e(5, 0), &SQRT_M3, 2).is_err());
        // Shared factor: error.
        assert!(power_residue_symbol(&PI, &PI, 2).is_err());
        assert!(power_residue_symbol(&(PI * e(2, 0)), &(PI * PI.conj()), 2).is_err());
    }

    #[test]
    fn symbol_is_multiplicative_in_alpha() {
        let d = PI * PI.conj();
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        let mut tested = 0;
        while tested < 100 {
            let a = e((next() % 401) as i128 - 200, (next() % 401) as i128 - 200);
            let b = e((next() % 401) as i128 - 200, (next() % 401) as i128 - 200);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let ga = EisensteinInt::gcd(&a, &d).unwrap();
            let gb = EisensteinInt::gcd(&b, &d).unwrap();
            if !ga.is_unit() || !gb.is_unit() {
                continue;
            }
            for degree in [2u32, 3, 6] {
                let sa = power_residue_symbol(&a, &d, degree).unwrap();
                let sb = power_residue_symbol(&b, &d, degree).unwrap();
                let sab = power_residue_symbol(&(a * b), &d, degree).unwrap();
                assert_eq!(sa.mul(sb), sab);
            }
            tested += 1;
        }
    }

    #[test]
    fn residue_system_shapes() {
        let d1 = SquarefreeD::new(vec![], CongruenceClass::Mod12).unwrap();
        let sys = residue_system(&d1).unwrap();
        assert_eq!(sys.reps(), &[ZERO]);

        let d = SquarefreeD::new(vec![PI], CongruenceClass::Mod12).unwrap();
        let sys = residue_system(&d).unwrap();
        assert_eq!(sys.len(), 156);
        // Adjacent exact negation pairs.
        for pair in sys.reps().chunks(2) {
            assert_eq!(pair[0], -pair[1]);
        }
        // All coprime to D and pairwise incongruent.
        for c in sys.reps() {
            assert!(EisensteinInt::gcd(c, &PI).unwrap().is_unit());
        }
        for i in 0..sys.len() {
            for j in i + 1..sys.len() {
                let diff = sys.reps()[i] - sys.reps()[j];
                assert!(!diff.rem(&PI).unwrap().is_zero(), "collision {i} {j}");
            }
        }
    }

    #[test]
    fn residue_system_for_two_primes() {
        let d =
            SquarefreeD::new(vec![PI, PI.conj()], CongruenceClass::Mod12).unwrap();
        let sys = residue_system(&d).unwrap();
        assert_eq!(sys.len(), 156 * 156);
        for pair in sys.reps().chunks(2).take(500) {
            assert_eq!(pair[0], -pair[1]);
        }
        let dd = d.d();
        assert_eq!(dd, PI * PI.conj());
        assert_eq!(dd, e(157, 0));
        // Spot-check coprimality on a slice.
        for c in sys.reps().iter().step_by(997) {
            assert!(EisensteinInt::gcd(c, &dd).unwrap().is_unit());
        }
    }

    #[test]
    fn squarefree_validation_rejects_bad_lists() {
        assert!(SquarefreeD::new(vec![e(13, 0)], CongruenceClass::Mod12).is_err());
        assert!(SquarefreeD::new(vec![e(-11, 0)], CongruenceClass::Mod12).is_err());
        assert!(SquarefreeD::new(vec![e(3, 1)], CongruenceClass::Mod12).is_err());
        assert!(SquarefreeD::new(vec![PI, PI], CongruenceClass::Mod12).is_err());
        // An associate pair is rejected even with distinct coordinates.
        let assoc = e(0, 1) * PI;
        assert!(SquarefreeD::new(vec![PI, assoc], CongruenceClass::Mod12).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["13+12*t", "1-12*t", "-11+12*t", "7", "t", "-t", "0", "1+t", "1-t"] {
            let x: EisensteinInt = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
            let y: EisensteinInt = x.to_string().parse().unwrap();
            assert_eq!(x, y);
        }
        assert_eq!("13 + 12t".parse::<EisensteinInt>().unwrap(), PI);
        assert_eq!("12t+13".parse::<EisensteinInt>().unwrap(), PI);
        assert!("".parse::<EisensteinInt>().is_err());
        assert!("1+*t".parse::<EisensteinInt>().is_err());
        assert!("q".parse::<EisensteinInt>().is_err());
    }

    #[test]
    fn symbol_suite_passes_for_pi() {
        let d = SquarefreeD::new(vec![PI], CongruenceClass::Mod12).unwrap();
        let rows = symbol_suite(&d).unwrap();
        assert!(CheckRow::all_pass(&rows), "{rows:?}");
    }

    proptest! {
        #[test]
        fn divmod_invariants(xa in -1_000_000i128..1_000_000, xb in -1_000_000i128..1_000_000,
                             ya in -1000i128..1000, yb in -1000i128..1000) {
            prop_assume!(ya != 0 || yb != 0);
            let x = e(xa, xb);
            let y = e(ya, yb);
            let (q, r) = x.divmod(&y).unwrap();
            prop_assert_eq!(q * y + r, x);
            prop_assert!(r.norm() < y.norm());
        }

        #[test]
        fn gcd_divides_both(xa in -4000i128..4000, xb in -4000i128..4000,
                            ya in -4000i128..4000, yb in -4000i128..4000) {
            let x = e(xa, xb);
            let y = e(ya, yb);
            prop_assume!(!x.is_zero() || !y.is_zero());
            let g = EisensteinInt::gcd(&x, &y).unwrap();
            prop_assert!(g.divides(&x));
            prop_assert!(g.divides(&y));
            prop_assert_eq!(g.canonical_associate().0, g);
        }

        #[test]
        fn norm_is_multiplicative(xa in -100_000i128..100_000, xb in -100_000i128..100_000,
                                  ya in -100_000i128..100_000, yb in -100_000i128..100_000) {
            let x = e(xa, xb);
            let y = e(ya, yb);
            prop_assert_eq!((x * y).norm(), x.norm() * y.norm());
        }
    }
}
