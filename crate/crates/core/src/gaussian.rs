//! Exact arithmetic in the Gaussian integers Z[i].
//!
//! Components are `i64`; every product goes through `i128` so that norms up
//! to about 10^18 are handled without overflow. Operations that would leave
//! that range return [`Error::Overflow`] instead of wrapping.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest norm accepted by [`factor`]; trial division covers it completely.
pub const FACTOR_NORM_LIMIT: u128 = 1_000_000_000_000;
/// Largest modulus norm accepted by the brute-force counting routines.
pub const BRUTE_FORCE_NORM_LIMIT: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

pub const UNITS: [GaussianInt; 4] = [
    GaussianInt { re: 1, im: 0 },
    GaussianInt { re: 0, im: 1 },
    GaussianInt { re: -1, im: 0 },
    GaussianInt { re: 0, im: -1 },
];

impl GaussianInt {
    pub const ZERO: GaussianInt = GaussianInt { re: 0, im: 0 };
    pub const ONE: GaussianInt = GaussianInt { re: 1, im: 0 };
    pub const I: GaussianInt = GaussianInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussianInt { re, im }
    }

    pub fn norm(self) -> u128 {
        let (a, b) = (self.re as i128, self.im as i128);
        (a * a + b * b) as u128
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        self.norm() == 1
    }

    pub fn conj(self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        let (a, b) = wide_mul(self, rhs);
        narrow(a, b)
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        Ok(GaussianInt::new(
            self.re.checked_add(rhs.re).ok_or(Error::Overflow)?,
            self.im.checked_add(rhs.im).ok_or(Error::Overflow)?,
        ))
    }

    pub fn scale(self, k: i64) -> Self {
        GaussianInt::new(self.re * k, self.im * k)
    }

    /// Nearest-integer quotient `self / d` (ties rounded toward +inf per component).
    pub fn div_round(self, d: Self) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let (nr, ni) = wide_mul(self, d.conj());
        let n = d.norm() as i128;
        narrow(round_div(nr, n), round_div(ni, n))
    }

    /// Exact quotient when `d | self`.
    pub fn div_exact(self, d: Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (nr, ni) = wide_mul(self, d.conj());
        let n = d.norm() as i128;
        if nr % n == 0 && ni % n == 0 {
            narrow(nr / n, ni / n).ok()
        } else {
            None
        }
    }

    /// Whether `self` divides `n`.
    pub fn divides(self, n: Self) -> bool {
        if self.is_zero() {
            return n.is_zero();
        }
        let (nr, ni) = wide_mul(n, self.conj());
        let m = self.norm() as i128;
        nr % m == 0 && ni % m == 0
    }

    pub fn rem_round(self, d: Self) -> Result<Self> {
        let q = self.div_round(d)?;
        let (pr, pi) = wide_mul(q, d);
        narrow(self.re as i128 - pr, self.im as i128 - pi)
    }

    pub fn pow(self, e: u32) -> Result<Self> {
        let mut acc = GaussianInt::ONE;
        for _ in 0..e {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Argument in (-pi, pi].
    pub fn arg(self) -> f64 {
        (self.im as f64).atan2(self.re as f64)
    }
}

fn wide_mul(a: GaussianInt, b: GaussianInt) -> (i128, i128) {
    let (ar, ai, br, bi) = (a.re as i128, a.im as i128, b.re as i128, b.im as i128);
    (ar * br - ai * bi, ar * bi + ai * br)
}

fn narrow(a: i128, b: i128) -> Result<GaussianInt> {
    Ok(GaussianInt::new(
        i64::try_from(a).map_err(|_| Error::Overflow)?,
        i64::try_from(b).map_err(|_| Error::Overflow)?,
    ))
}

fn round_div(a: i128, n: i128) -> i128 {
    // floor((2a + n) / 2n)
    (2 * a + n).div_euclid(2 * n)
}

impl Add for GaussianInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianInt::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianInt::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussianInt {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianInt::new(-self.re, -self.im)
    }
}

impl Mul for GaussianInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("Gaussian integer overflow")
    }
}

impl From<i64> for GaussianInt {
    fn from(n: i64) -> Self {
        GaussianInt::new(n, 0)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0 {
            write!(f, "{}-{}i", self.re, -(self.im as i128))
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl FromStr for GaussianInt {
    type Err = Error;

    /// Accepts `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("not a Gaussian integer: {s:?}"));
        if t.is_empty() {
            return Err(bad());
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussianInt::new(t.parse().map_err(|_| bad())?, 0));
        };
        // split at the last sign that is not in leading position
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im_part {
            "" | "+" => 1,
            "-" => -1,
            x => x.parse::<i64>().map_err(|_| bad())?,
        };
        Ok(GaussianInt::new(re_part.parse().map_err(|_| bad())?, im))
    }
}

/// The associate with `re > 0, im >= 0`; zero maps to zero.
pub fn canonical_assoc(g: GaussianInt) -> GaussianInt {
    if g.is_zero() {
        return g;
    }
    let (a, b) = (g.re, g.im);
    if a > 0 && b >= 0 {
        g
    } else if b > 0 && a <= 0 {
        GaussianInt::new(b, -a) // times -i
    } else if a < 0 && b <= 0 {
        GaussianInt::new(-a, -b)
    } else {
        GaussianInt::new(-b, a) // times i
    }
}

pub fn gi_gcd(a: GaussianInt, b: GaussianInt) -> Result<GaussianInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroGcd);
    }
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let r = x.rem_round(y)?;
        x = y;
        y = r;
    }
    Ok(canonical_assoc(x))
}

/// Returns `(g, x, y)` with `a x + b y = g`, `g` a gcd (not normalised).
fn ext_gcd(a: GaussianInt, b: GaussianInt) -> Result<(GaussianInt, GaussianInt, GaussianInt)> {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (GaussianInt::ONE, GaussianInt::ZERO);
    let (mut y0, mut y1) = (GaussianInt::ZERO, GaussianInt::ONE);
    while !r1.is_zero() {
        let q = r0.div_round(r1)?;
        let r2 = r0 - q.checked_mul(r1)?;
        let x2 = x0 - q.checked_mul(x1)?;
        let y2 = y0 - q.checked_mul(y1)?;
        (r0, r1) = (r1, r2);
        (x0, x1) = (x1, x2);
        (y0, y1) = (y1, y2);
    }
    Ok((r0, x0, y0))
}

fn int_ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

/// A complete residue system modulo `q`: the rectangle
/// `{x + iy : 0 <= x < N(q)/g, 0 <= y < g}` with `g = gcd(re q, im q)`,
/// ordered lexicographically by `(im, re)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSystem {
    modulus: GaussianInt,
    width: i64,
    height: i64,
    shear: i64,
}

impl ResidueSystem {
    pub fn new(q: GaussianInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let n = i64::try_from(q.norm()).map_err(|_| Error::Overflow)?;
        let (g, u, v) = int_ext_gcd(q.im, q.re);
        // u*q + v*(i q) has imaginary part u*im + v*re = g
        let shear_raw = u as i128 * q.re as i128 - v as i128 * q.im as i128;
        let width = n / g;
        let shear = shear_raw.rem_euclid(width as i128) as i64;
        Ok(ResidueSystem { modulus: q, width, height: g, shear })
    }

    pub fn modulus(&self) -> GaussianInt {
        self.modulus
    }

    pub fn len(&self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Canonical representative of `z` modulo `q`.
    pub fn reduce(&self, z: GaussianInt) -> GaussianInt {
        let k = z.im.div_euclid(self.height);
        let y = z.im - k * self.height;
        let x = (z.re as i128 - k as i128 * self.shear as i128).rem_euclid(self.width as i128) as i64;
        GaussianInt::new(x, y)
    }

    /// Position of `reduce(z)` in [`ResidueSystem::elements`].
    pub fn index(&self, z: GaussianInt) -> usize {
        let r = self.reduce(z);
        (r.im * self.width + r.re) as usize
    }

    pub fn element(&self, idx: usize) -> GaussianInt {
        let idx = idx as i64;
        GaussianInt::new(idx % self.width, idx / self.width)
    }

    pub fn elements(&self) -> impl Iterator<Item = GaussianInt> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| GaussianInt::new(x, y)))
    }

    pub fn is_zero_mod(&self, z: GaussianInt) -> bool {
        self.reduce(z).is_zero()
    }
}

pub fn residue_system(q: GaussianInt) -> Result<Vec<GaussianInt>> {
    Ok(ResidueSystem::new(q)?.elements().collect())
}

pub fn inv_mod(a: GaussianInt, q: GaussianInt) -> Result<GaussianInt> {
    let rs = ResidueSystem::new(q)?;
    let (g, x, _) = ext_gcd(a, q)?;
    if !g.is_unit() {
        return Err(Error::NotInvertible(a.to_string(), q.to_string()));
    }
    // g x a = g^2 ... divide by the unit g: g^{-1} = conj(g)
    Ok(rs.reduce(x.checked_mul(g.conj())?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub unit: GaussianInt,
    pub factors: Vec<(GaussianInt, u32)>,
}

impl Factorization {
    pub fn product(&self) -> Result<GaussianInt> {
        let mut acc = self.unit;
        for &(p, e) in &self.factors {
            acc = acc.checked_mul(p.pow(e)?)?;
        }
        Ok(acc)
    }

    /// Number of canonical divisors, `prod (e_i + 1)`.
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b128 = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m128;
        }
        b128 = b128 * b128 % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// x with x^2 = -1 mod p, for a prime p = 1 mod 4.
fn sqrt_minus_one(p: u64) -> u64 {
    for c in 2..p {
        let x = mod_pow(c, (p - 1) / 4, p);
        if (x as u128 * x as u128) % p as u128 == p as u128 - 1 {
            return x;
        }
    }
    unreachable!("p must be a prime congruent to 1 mod 4")
}

/// Rational prime factorisation by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The canonical Gaussian primes above a rational prime `p`.
pub fn primes_above(p: u64) -> Vec<GaussianInt> {
    if p == 2 {
        vec![GaussianInt::new(1, 1)]
    } else if p % 4 == 3 {
        vec![GaussianInt::new(p as i64, 0)]
    } else {
        let x = sqrt_minus_one(p) as i64;
        let pi = gi_gcd(GaussianInt::new(p as i64, 0), GaussianInt::new(x, 1)).expect("nonzero");
        let mut v = vec![pi, canonical_assoc(pi.conj())];
        v.sort_by_key(|g| (g.norm(), g.re));
        v
    }
}

pub fn factor(n: GaussianInt) -> Result<Factorization> {
    factor_with(n, &mut primes_above)
}

/// [`factor`] with a caller-supplied (typically cached) `primes_above`.
pub(crate) fn factor_with(n: GaussianInt, above: &mut impl FnMut(u64) -> Vec<GaussianInt>) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let norm = n.norm();
    if norm > FACTOR_NORM_LIMIT {
        return Err(Error::TooLarge { norm, limit: FACTOR_NORM_LIMIT });
    }
    let mut rest = n;
    let mut factors = Vec::new();
    for (p, _) in factor_u64(norm as u64) {
        for pi in above(p) {
            let mut e = 0;
            while let Some(q) = rest.div_exact(pi) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                factors.push((pi, e));
            }
        }
    }
    debug_assert!(rest.is_unit());
    factors.sort_by_key(|&(g, _)| (g.norm(), g.re));
    Ok(Factorization { unit: rest, factors })
}

/// Canonical divisors of `n`, sorted by `(norm, re, im)`.
pub fn canonical_divisors(n: GaussianInt) -> Result<Vec<GaussianInt>> {
    let f = factor(n)?;
    let mut divs = vec![GaussianInt::ONE];
    for &(p, e) in &f.factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for &d in &divs {
            let mut pk = GaussianInt::ONE;
            for _ in 0..=e {
                next.push(canonical_assoc(d.checked_mul(pk)?));
                pk = pk.checked_mul(p)?;
            }
        }
        divs = next;
    }
    divs.sort_by_key(|g| (g.norm(), g.re, g.im));
    Ok(divs)
}

/// All divisors of `n`, each canonical divisor followed by its associates.
pub fn divisors(n: GaussianInt) -> Result<Vec<GaussianInt>> {
    let canon = canonical_divisors(n)?;
    let mut out = Vec::with_capacity(4 * canon.len());
    for d in canon {
        for u in UNITS {
            out.push(d * u);
        }
    }
    Ok(out)
}

/// `sigma_alpha(n) = 4^{-1} sum_{d | n} |d|^{2 alpha}` over all divisors.
pub fn sigma_alpha(n: GaussianInt, alpha: Complex64) -> Result<Complex64> {
    let canon = canonical_divisors(n)?;
    // the four associates share |d| and cancel the 1/4
    Ok(canon
        .iter()
        .map(|d| (alpha * (d.norm() as f64).ln()).exp())
        .sum())
}

/// `rho_q(n) = #{x mod 2q : x^2 = n mod 4q}`, by exhaustive enumeration.
pub fn rho_q(q: GaussianInt, n: GaussianInt) -> Result<u64> {
    check_brute_force(q)?;
    let two_q = q.scale(2);
    let four_q = ResidueSystem::new(q.scale(4))?;
    let xs = ResidueSystem::new(two_q)?;
    let target = four_q.reduce(n);
    Ok(xs
        .elements()
        .filter(|&x| four_q.reduce(x * x) == target)
        .count() as u64)
}

pub(crate) fn check_brute_force(q: GaussianInt) -> Result<()> {
    if q.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let norm = q.norm();
    if norm > BRUTE_FORCE_NORM_LIMIT {
        return Err(Error::TooLarge { norm, limit: BRUTE_FORCE_NORM_LIMIT });
    }
    Ok(())
}

/// Histogram of `x^2 mod 4q` over `x mod 2q`; `rho_q(n)` for every `n` at once.
#[derive(Clone, Debug)]
pub struct SquareCounts {
    four_q: ResidueSystem,
    counts: Vec<u32>,
}

impl SquareCounts {
    pub fn new(q: GaussianInt) -> Result<Self> {
        check_brute_force(q)?;
        let four_q = ResidueSystem::new(q.scale(4))?;
        let xs = ResidueSystem::new(q.scale(2))?;
        let mut counts = vec![0u32; four_q.len()];
        for x in xs.elements() {
            counts[four_q.index(x * x)] += 1;
        }
        Ok(SquareCounts { four_q, counts })
    }

    pub fn rho(&self, n: GaussianInt) -> u64 {
        self.counts[self.four_q.index(n)] as u64
    }
}

/// Canonical representatives (`re > 0, im >= 0`) with `0 < N(q) <= max_norm`,
/// sorted by `(norm, re, im)`.
pub fn canonical_up_to(max_norm: u64) -> Vec<GaussianInt> {
    let r = (max_norm as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for a in 1..=r {
        for b in 0..=r {
            let g = GaussianInt::new(a, b);
            if g.norm() <= max_norm as u128 {
                out.push(g);
            }
        }
    }
    out.sort_by_key(|g| (g.norm(), g.re, g.im));
    out
}

/// All nonzero Gaussian integers with `N(n) <= max_norm`, sorted by `(norm, re, im)`.
pub fn all_up_to(max_norm: u64) -> Vec<GaussianInt> {
    let r = (max_norm as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let g = GaussianInt::new(a, b);
            if !g.is_zero() && g.norm() <= max_norm as u128 {
                out.push(g);
            }
        }
    }
    out.sort_by_key(|g| (g.norm(), g.re, g.im));
    out
}
