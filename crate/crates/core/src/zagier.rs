//! The Zagier series `L_k(s; n) = zeta_k(2s)/zeta_k(s) sum_{q != 0} rho_q(n) |q|^{-2s}`
//! and the Kloosterman-Zagier identity.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{self, canonical_assoc, GaussianInt, ResidueSystem, SquareCounts};
use crate::par::{self, Execution};
use crate::zeta::dedekind_zeta;

/// Prime powers at or below this norm get their local factors by direct
/// enumeration on the Kloosterman side even when a closed form applies.
pub const LOCAL_ENUMERATION_NORM: u64 = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationConfig {
    pub max_norm: u64,
    pub tail_tol: f64,
}

impl TruncationConfig {
    pub fn new(max_norm: u64, tail_tol: f64) -> Result<Self> {
        if max_norm < 4 {
            return Err(Error::Domain(format!("max_norm must be at least 4, got {max_norm}")));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::Domain(format!("tail_tol must be positive, got {tail_tol}")));
        }
        Ok(TruncationConfig { max_norm, tail_tol })
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig { max_norm: 10_000, tail_tol: 1e-2 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZagierMethod {
    /// Partial sum over `N(q) <= max_norm` with an empirical tail bound.
    #[default]
    Truncated,
    /// Local factors at every prime; only for real `s` and `n` zero or a square.
    EulerProduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZagierQuery {
    pub s: Complex64,
    pub n: GaussianInt,
    pub truncation: TruncationConfig,
    pub method: ZagierMethod,
}

impl ZagierQuery {
    pub fn new(s: Complex64, n: GaussianInt, truncation: TruncationConfig) -> Result<Self> {
        check_half_plane(s)?;
        Ok(ZagierQuery { s, n, truncation, method: ZagierMethod::Truncated })
    }

    pub fn with_method(mut self, method: ZagierMethod) -> Self {
        self.method = method;
        self
    }
}

fn check_half_plane(s: Complex64) -> Result<()> {
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("the series needs Re s > 1, got {s}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZagierValue {
    pub value: Complex64,
    /// Empirical bound on the omitted tail (see [`empirical_tail`]).
    pub tail_bound: f64,
    /// The bound from `rho_q(n) <= N(2q)`; `None` where it diverges (`Re s <= 2`).
    pub crude_tail_bound: Option<f64>,
    pub within_tol: bool,
    pub method: ZagierMethod,
    pub max_norm: u64,
}

#[derive(Clone, Debug)]
struct Entry {
    norm: u64,
    two_exp: u32,
    /// (index into `primes`, exponent) for the odd part.
    odd: Vec<(u32, u32)>,
}

#[derive(Clone, Copy, Debug)]
struct Prime {
    pi: GaussianInt,
    norm: u64,
}

/// Canonical moduli up to a norm bound with their factorizations, and the
/// weights `N(q)^{-s}` for one `s`. Built once and shared across many
/// discriminants.
pub struct SeriesContext {
    s: Complex64,
    max_norm: u64,
    entries: Vec<Entry>,
    primes: Vec<Prime>,
    weights: Vec<Complex64>,
    two_adic: Vec<SquareCounts>,
    exec: Execution,
}

impl SeriesContext {
    pub fn new(s: Complex64, max_norm: u64) -> Result<Self> {
        Self::with_execution(s, max_norm, Execution::default())
    }

    pub fn with_execution(s: Complex64, max_norm: u64, exec: Execution) -> Result<Self> {
        check_half_plane(s)?;
        let moduli = gaussian::canonical_up_to(max_norm);
        let mut above: HashMap<u64, Vec<GaussianInt>> = HashMap::new();
        let mut index: HashMap<GaussianInt, u32> = HashMap::new();
        let mut primes = Vec::new();
        let mut entries = Vec::with_capacity(moduli.len());
        for q in &moduli {
            let f = gaussian::factor_with(*q, &mut |p| above.entry(p).or_insert_with(|| gaussian::primes_above(p)).clone())?;
            let mut two_exp = 0;
            let mut odd = Vec::new();
            for (pi, k) in f.factors {
                if pi == GaussianInt::new(1, 1) {
                    two_exp = k;
                    continue;
                }
                let idx = *index.entry(pi).or_insert_with(|| {
                    primes.push(Prime { pi, norm: pi.norm() as u64 });
                    (primes.len() - 1) as u32
                });
                odd.push((idx, k));
            }
            entries.push(Entry { norm: q.norm() as u64, two_exp, odd });
        }
        let norms: Vec<u64> = entries.iter().map(|e| e.norm).collect();
        let weights = par::map_with(exec, &norms, |&n| (-s * (n as f64).ln()).exp());
        let max_e = entries.iter().map(|e| e.two_exp).max().unwrap_or(0);
        let exps: Vec<u32> = (0..=max_e).collect();
        let two_adic = par::map_with(exec, &exps, |&e| SquareCounts::new(one_plus_i_pow(e)?))
            .into_iter()
            .collect::<Result<_>>()?;
        Ok(SeriesContext { s, max_norm, entries, primes, weights, two_adic, exec })
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn max_norm(&self) -> u64 {
        self.max_norm
    }

    fn len_up_to(&self, cutoff: u64) -> usize {
        self.entries.partition_point(|e| e.norm <= cutoff)
    }

    /// `sum_{0 < N(q) <= cutoff} rho_q(d) N(q)^{-s}` over all `q` (four
    /// associates each) with its empirical tail bound.
    pub fn rho_series(&self, d: GaussianInt, cutoff: u64) -> Result<(Complex64, f64)> {
        let local = LocalRho::new(self, d)?;
        let len = self.len_up_to(cutoff);
        let coeffs: Vec<f64> = self.entries[..len].iter().map(|e| 4.0 * local.rho(e) as f64).collect();
        Ok(self.finish(&coeffs, cutoff))
    }

    /// The Kloosterman side `sum_{0 < N(q) <= cutoff} |q|^{-2-2s}
    /// sum_{c mod q} S(l^2, c^2; q) e[nc/q]`, with its empirical tail bound.
    pub fn kloosterman_series(&self, l: GaussianInt, n: GaussianInt, cutoff: u64) -> Result<(Complex64, f64)> {
        let local = LocalKloosterman::new(self, l, n, cutoff)?;
        let len = self.len_up_to(cutoff);
        let coeffs: Vec<f64> = self.entries[..len].iter().map(|e| 4.0 * local.coefficient(e) as f64).collect();
        Ok(self.finish(&coeffs, cutoff))
    }

    fn finish(&self, coeffs: &[f64], cutoff: u64) -> (Complex64, f64) {
        let terms: Vec<Complex64> = coeffs.iter().zip(&self.weights).map(|(&a, &w)| w * a).collect();
        let norms: Vec<u64> = self.entries[..coeffs.len()].iter().map(|e| e.norm).collect();
        (par::pairwise_sum(&terms), empirical_tail(&norms, coeffs, cutoff, self.s.re))
    }
}

/// Tail bound for `sum_{N(q) > X} a_q N(q)^{-sigma}` from the model
/// `sum_{N(q) <= t} |a_q| <= C t log t`, with `C` the largest observed ratio
/// over `t` in `[X/16, X]`. Partial summation then gives
/// `sigma C X^{1-sigma} (log X/(sigma-1) + 1/(sigma-1)^2)`.
///
/// This is calibrated on the computed coefficients, not proven.
pub fn empirical_tail(norms: &[u64], coeffs: &[f64], cutoff: u64, sigma: f64) -> f64 {
    let lo = (cutoff / 16).max(2);
    let mut acc = 0.0;
    let mut c: f64 = 0.0;
    for (i, (&n, &a)) in norms.iter().zip(coeffs).enumerate() {
        acc += a.abs();
        let last_of_shell = norms.get(i + 1).is_none_or(|&m| m != n);
        if n >= lo && last_of_shell {
            let t = n as f64;
            c = c.max(acc / (t * t.ln()));
        }
    }
    let x = cutoff as f64;
    let sm1 = sigma - 1.0;
    sigma * c * x.powf(1.0 - sigma) * (x.ln() / sm1 + 1.0 / (sm1 * sm1))
}

/// The crude tail from `rho_q <= 4 N(q)` and `#{q : N(q) <= t} <= pi t + O(sqrt t)`:
/// `4 pi X^{2-sigma}/(sigma - 2)`, divergent for `sigma <= 2`.
pub fn crude_tail(cutoff: u64, sigma: f64) -> Option<f64> {
    (sigma > 2.0).then(|| 4.0 * PI * (cutoff as f64).powf(2.0 - sigma) / (sigma - 2.0))
}

/// `(v_pi(d), chi(d / pi^v))` for each odd prime; `v = None` when `d = 0`.
fn local_symbols(primes: &[Prime], d: GaussianInt, exec: Execution) -> Result<Vec<(Option<u32>, i8)>> {
    par::map_with(exec, primes, |p| {
        if d.is_zero() {
            return Ok((None, 0));
        }
        let mut rest = d;
        let mut v = 0;
        while let Some(q) = rest.div_exact(p.pi) {
            rest = q;
            v += 1;
        }
        Ok((Some(v), quadratic_character(rest, p.pi, p.norm)?))
    })
    .into_iter()
    .collect()
}

/// Euler's criterion in `Z[i]/(pi)` for odd `pi`: `1`, `-1`, or `0` if `pi | a`.
pub(crate) fn quadratic_character(a: GaussianInt, pi: GaussianInt, norm: u64) -> Result<i8> {
    let mut b = a.rem_round(pi)?;
    if b.is_zero() {
        return Ok(0);
    }
    let mut r = GaussianInt::ONE;
    let mut e = (norm - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r.checked_mul(b)?.rem_round(pi)?;
        }
        b = b.checked_mul(b)?.rem_round(pi)?;
        e >>= 1;
    }
    if pi.divides(r - GaussianInt::ONE) {
        Ok(1)
    } else if pi.divides(r + GaussianInt::ONE) {
        Ok(-1)
    } else {
        Err(Error::Domain(format!("{pi} is not an odd prime")))
    }
}

fn one_plus_i_pow(e: u32) -> Result<GaussianInt> {
    GaussianInt::new(1, 1).pow(e)
}

/// `rho_q(d)` through the Chinese remainder theorem: the 2-part by direct
/// enumeration, odd prime powers by Hensel lifting.
struct LocalRho<'a> {
    ctx: &'a SeriesContext,
    two_adic: Vec<u64>,
    symbols: Vec<(Option<u32>, i8)>,
}

impl<'a> LocalRho<'a> {
    fn new(ctx: &'a SeriesContext, d: GaussianInt) -> Result<Self> {
        Ok(Self::with_symbols(ctx, d, local_symbols(&ctx.primes, d, ctx.exec)?))
    }

    fn with_symbols(ctx: &'a SeriesContext, d: GaussianInt, symbols: Vec<(Option<u32>, i8)>) -> Self {
        let two_adic = ctx.two_adic.iter().map(|c| c.rho(d)).collect();
        LocalRho { ctx, two_adic, symbols }
    }

    fn rho(&self, e: &Entry) -> u64 {
        let mut r = self.two_adic[e.two_exp as usize];
        for &(idx, k) in &e.odd {
            if r == 0 {
                break;
            }
            let (v, chi) = self.symbols[idx as usize];
            r *= hensel_count(self.ctx.primes[idx as usize].norm, k, v, chi);
        }
        r
    }
}

/// `#{x mod pi^k : x^2 = d mod pi^k}` for odd `pi` of norm `nn`, given
/// `v = v_pi(d)` (`None` for `d = 0`) and `chi` the character of `d/pi^v`.
pub(crate) fn hensel_count(nn: u64, k: u32, v: Option<u32>, chi: i8) -> u64 {
    match v {
        None => nn.pow(k / 2),
        Some(v) if k <= v => nn.pow(k / 2),
        Some(v) if v % 2 == 1 => 0,
        Some(v) => (1 + chi as i64) as u64 * nn.pow(v / 2),
    }
}

/// Local factors of the Kloosterman side. After `c -> a c` the inner sum is
/// `sum_{c mod q} R_q(c^2 + n c + l^2)` with the Ramanujan sum `R_q`, which
/// factors over the prime powers of `q`.
struct LocalKloosterman<'a> {
    ctx: &'a SeriesContext,
    two_adic: Vec<i64>,
    /// Per odd prime: enumerated `A(pi^k)` for small powers, else `None`.
    enumerated: Vec<Option<Vec<i64>>>,
    symbols: Vec<(Option<u32>, i8)>,
}

impl<'a> LocalKloosterman<'a> {
    fn new(ctx: &'a SeriesContext, l: GaussianInt, n: GaussianInt, cutoff: u64) -> Result<Self> {
        let d = discriminant(l, n)?;
        Self::with_symbols(ctx, l, n, cutoff, local_symbols(&ctx.primes, d, ctx.exec)?)
    }

    fn with_symbols(
        ctx: &'a SeriesContext,
        l: GaussianInt,
        n: GaussianInt,
        cutoff: u64,
        symbols: Vec<(Option<u32>, i8)>,
    ) -> Result<Self> {
        let l2 = l.checked_mul(l)?;
        let quad = move |c: GaussianInt| c * c + n * c + l2;
        let max_e = ctx.entries[..ctx.len_up_to(cutoff)].iter().map(|e| e.two_exp).max().unwrap_or(0);
        let exps: Vec<u32> = (0..=max_e).collect();
        let two_adic = par::map_with(ctx.exec, &exps, |&e| local_ramanujan(one_plus_i_pow(e)?, &quad))
            .into_iter()
            .collect::<Result<_>>()?;
        let enumerated = par::map_with(ctx.exec, &ctx.primes, |p| -> Result<Option<Vec<i64>>> {
            if p.norm > cutoff.min(LOCAL_ENUMERATION_NORM) {
                return Ok(None);
            }
            let mut out = vec![1];
            let mut pk = p.pi;
            let mut nk = p.norm;
            while nk <= cutoff.min(LOCAL_ENUMERATION_NORM) {
                out.push(local_ramanujan(pk, &quad)?);
                pk = pk.checked_mul(p.pi)?;
                nk *= p.norm;
            }
            Ok(Some(out))
        })
        .into_iter()
        .collect::<Result<_>>()?;
        Ok(LocalKloosterman { ctx, two_adic, enumerated, symbols })
    }

    fn coefficient(&self, e: &Entry) -> i64 {
        let mut a = self.two_adic[e.two_exp as usize];
        for &(idx, k) in &e.odd {
            if a == 0 {
                break;
            }
            let i = idx as usize;
            let local = match &self.enumerated[i] {
                Some(v) if (k as usize) < v.len() => v[k as usize],
                _ => {
                    // With x = 2c + n the roots of c^2 + nc + l^2 mod pi^j are
                    // the square roots of d mod pi^j, so A(pi^k) is a difference
                    // of Hensel counts: chi, then 0, when pi does not divide d.
                    let (v, chi) = self.symbols[i];
                    let nn = self.ctx.primes[i].norm;
                    hensel_count(nn, k, v, chi) as i64 - hensel_count(nn, k - 1, v, chi) as i64
                }
            };
            a *= local;
        }
        a
    }
}

/// `N(q)^{-1} sum_{c mod q} R_q(Q(c))` for a prime power `q = pi^k`, with
/// `R_{pi^k}(m) = N(pi)^k [pi^k | m] - N(pi)^{k-1} [pi^{k-1} | m]`.
fn local_ramanujan(q: GaussianInt, quad: &impl Fn(GaussianInt) -> GaussianInt) -> Result<i64> {
    if q.is_unit() {
        return Ok(1);
    }
    let f = gaussian::factor(q)?;
    let &[(pi, k)] = f.factors.as_slice() else {
        return Err(Error::Domain(format!("{q} is not a prime power")));
    };
    let rs = ResidueSystem::new(q)?;
    let lower = ResidueSystem::new(pi.pow(k - 1)?)?;
    let nk = q.norm() as i64;
    let nk1 = nk / pi.norm() as i64;
    let mut total = 0i64;
    for c in rs.elements() {
        let m = quad(c);
        if lower.is_zero_mod(m) {
            total += if rs.is_zero_mod(m) { nk - nk1 } else { -nk1 };
        }
    }
    Ok(total / nk)
}

/// `L_k(s; n)`.
pub fn zagier_l(q: &ZagierQuery) -> Result<ZagierValue> {
    check_half_plane(q.s)?;
    match q.method {
        ZagierMethod::Truncated => {
            let ctx = SeriesContext::new(q.s, q.truncation.max_norm)?;
            zagier_l_in(&ctx, q.n, q.truncation)
        }
        ZagierMethod::EulerProduct => zagier_l_euler(q.s, q.n, q.truncation),
    }
}

/// Truncated `L_k(s; d)` reusing a prepared context.
pub fn zagier_l_in(ctx: &SeriesContext, d: GaussianInt, cfg: TruncationConfig) -> Result<ZagierValue> {
    if cfg.max_norm > ctx.max_norm {
        return Err(Error::Domain(format!("context only reaches norm {}", ctx.max_norm)));
    }
    let s = ctx.s;
    let factor = dedekind_zeta(2.0 * s)? / dedekind_zeta(s)?;
    let (sum, tail) = ctx.rho_series(d, cfg.max_norm)?;
    let tail_bound = factor.norm() * tail;
    Ok(ZagierValue {
        value: factor * sum,
        tail_bound,
        crude_tail_bound: crude_tail(cfg.max_norm, s.re).map(|t| t * factor.norm()),
        within_tol: tail_bound <= cfg.tail_tol,
        method: ZagierMethod::Truncated,
        max_norm: cfg.max_norm,
    })
}

fn mobius(n: u32) -> i32 {
    let mut n = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        -sign
    } else {
        sign
    }
}

fn sieve(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Norms of the odd Gaussian primes with norm `<= y`, with multiplicity.
fn odd_prime_norms(y: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for p in sieve(y as usize) {
        if p % 4 == 1 {
            out.push(p);
            out.push(p);
        } else if p % 4 == 3 && p * p <= y {
            out.push(p * p);
        }
    }
    out
}

/// `sum_{pi odd, N(pi) > y} N(pi)^{-u}` for real `u > 1`, from
/// `P(u) = sum_j mu(j)/j log zeta_k(j u)` minus the explicit head.
fn odd_prime_zeta_tail(u: f64, head: &[u64]) -> Result<f64> {
    let mut total = 0.0;
    let mut j = 1;
    while j as f64 * u < 70.0 {
        let mu = mobius(j);
        if mu != 0 {
            let z = dedekind_zeta(Complex64::new(j as f64 * u, 0.0))?.re;
            total += mu as f64 / j as f64 * z.ln();
        }
        j += 1;
    }
    let explicit: f64 = 2f64.powf(-u) + head.iter().map(|&n| (n as f64).powf(-u)).sum::<f64>();
    Ok(total - explicit)
}

/// Primes up to this norm enter the Euler product explicitly.
const EULER_EXPLICIT_NORM: u64 = 2_000_000;
const TWO_ADIC_DEPTH: u32 = 20;

fn is_square(d: GaussianInt) -> Result<bool> {
    if d.is_zero() {
        return Ok(true);
    }
    let f = gaussian::factor(d)?;
    Ok(f.factors.iter().all(|&(_, e)| e % 2 == 0) && (f.unit == GaussianInt::ONE || f.unit == -GaussianInt::ONE))
}

/// `sum_{e >= 0} rho_{(1+i)^e}(d) y^e`, enumerating `e <= TWO_ADIC_DEPTH` and
/// closing the tail once the counts settle into a constant or into doubling
/// every second step.
fn two_adic_factor(d: GaussianInt, y: f64) -> Result<f64> {
    let exps: Vec<u32> = (0..=TWO_ADIC_DEPTH).collect();
    let counts: Vec<u64> = par::map(&exps, |&e| Ok(SquareCounts::new(one_plus_i_pow(e)?)?.rho(d)))
        .into_iter()
        .collect::<Result<_>>()?;
    let top = TWO_ADIC_DEPTH as usize;
    let head: f64 = counts.iter().enumerate().map(|(e, &c)| c as f64 * y.powi(e as i32)).sum();
    let window = top - 6..=top;
    if window.clone().all(|e| counts[e] == counts[top]) {
        return Ok(head + counts[top] as f64 * y.powi(top as i32 + 1) / (1.0 - y));
    }
    if window.clone().skip(2).all(|e| counts[e] == 2 * counts[e - 2]) {
        let last_two = counts[top - 1] as f64 * y.powi(top as i32 - 1) + counts[top] as f64 * y.powi(top as i32);
        return Ok(head + last_two * 2.0 * y * y / (1.0 - 2.0 * y * y));
    }
    Err(Error::Precision("2-adic square-root counts did not stabilise".into()))
}

fn zagier_l_euler(s: Complex64, d: GaussianInt, cfg: TruncationConfig) -> Result<ZagierValue> {
    if s.im != 0.0 {
        return Err(Error::Domain("the Euler product route needs real s".into()));
    }
    if !is_square(d)? {
        return Err(Error::Domain(format!("the Euler product route needs a square argument, got {d}")));
    }
    let sig = s.re;
    let e2 = two_adic_factor(d, 2f64.powf(-sig))?;
    let head = odd_prime_norms(EULER_EXPLICIT_NORM);
    let generic = |nn: f64| -> f64 {
        let x = nn.powf(-sig);
        if d.is_zero() {
            (1.0 + x).ln() - (1.0 - nn * x * x).ln()
        } else {
            (1.0 + x).ln() - (1.0 - x).ln()
        }
    };
    let terms: Vec<f64> = head.iter().map(|&n| generic(n as f64)).collect();
    let mut log_odd = par::pairwise_sum(&terms);
    // primes beyond the explicit range, through the prime zeta function
    let y = EULER_EXPLICIT_NORM as f64;
    let mut j = 1;
    while y.powf(-(j as f64) * (2.0 * sig - 1.0).min(sig)) > 1e-20 {
        let jf = j as f64;
        if d.is_zero() {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            log_odd += sign / jf * odd_prime_zeta_tail(jf * sig, &head)?;
            log_odd += odd_prime_zeta_tail(jf * (2.0 * sig - 1.0), &head)? / jf;
        } else if j % 2 == 1 {
            log_odd += 2.0 / jf * odd_prime_zeta_tail(jf * sig, &head)?;
        }
        j += 1;
    }
    // odd primes dividing a nonzero square: replace the generic factor
    if !d.is_zero() {
        for (pi, v) in gaussian::factor(d)?.factors {
            if pi == GaussianInt::new(1, 1) {
                continue;
            }
            let nn = pi.norm() as f64;
            let x = nn.powf(-sig);
            let mut exact = 0.0;
            for k in 0..=v {
                exact += nn.powi((k / 2) as i32) * x.powi(k as i32);
            }
            exact += 2.0 * nn.powi((v / 2) as i32) * x.powi(v as i32 + 1) / (1.0 - x);
            log_odd += exact.ln() - generic(nn);
        }
    }
    let factor = dedekind_zeta(2.0 * s)? / dedekind_zeta(s)?;
    let value = factor * 4.0 * e2 * log_odd.exp();
    let tail_bound = 1e-11 * value.norm();
    Ok(ZagierValue {
        value,
        tail_bound,
        crude_tail_bound: None,
        within_tol: tail_bound <= cfg.tail_tol,
        method: ZagierMethod::EulerProduct,
        max_norm: EULER_EXPLICIT_NORM,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub l: GaussianInt,
    pub n: GaussianInt,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_gap: f64,
    pub lhs_tail: f64,
    pub rhs_tail: f64,
    /// `lhs_tail + rhs_tail`: both sides are truncated at the same cutoff.
    pub tail_bound: f64,
}

/// Compares the truncated Kloosterman side with `L_k(s; n^2 - 4l^2)/zeta_k(2s)`
/// truncated at the same cutoff.
pub fn kloosterman_zagier_identity(
    l: GaussianInt,
    n: GaussianInt,
    s: Complex64,
    cfg: TruncationConfig,
) -> Result<IdentityReport> {
    let ctx = SeriesContext::new(s, cfg.max_norm)?;
    identity_in(&ctx, l, n, cfg.max_norm)
}

pub fn identity_in(ctx: &SeriesContext, l: GaussianInt, n: GaussianInt, cutoff: u64) -> Result<IdentityReport> {
    Ok(identity_at(ctx, l, n, &[cutoff])?.remove(0))
}

/// `n^2 - 4 l^2`.
pub fn discriminant(l: GaussianInt, n: GaussianInt) -> Result<GaussianInt> {
    n.checked_mul(n)?.checked_add(l.checked_mul(l)?.scale(-4))
}

/// One report per cutoff; local data is computed once at the largest.
pub fn identity_at(ctx: &SeriesContext, l: GaussianInt, n: GaussianInt, cutoffs: &[u64]) -> Result<Vec<IdentityReport>> {
    if l.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let top = cutoffs.iter().copied().max().ok_or_else(|| Error::Domain("no cutoffs given".into()))?;
    if top > ctx.max_norm {
        return Err(Error::Domain(format!("context only reaches norm {}", ctx.max_norm)));
    }
    let d = discriminant(l, n)?;
    let symbols = local_symbols(&ctx.primes, d, ctx.exec)?;
    let kl = LocalKloosterman::with_symbols(ctx, l, n, top, symbols.clone())?;
    let rho = LocalRho::with_symbols(ctx, d, symbols);
    let entries = &ctx.entries[..ctx.len_up_to(top)];
    let kl_coeffs: Vec<f64> = entries.iter().map(|e| 4.0 * kl.coefficient(e) as f64).collect();
    let rho_coeffs: Vec<f64> = entries.iter().map(|e| 4.0 * rho.rho(e) as f64).collect();
    let inv = dedekind_zeta(ctx.s)?.inv();
    let reports = cutoffs
        .iter()
        .map(|&cutoff| {
            let len = ctx.len_up_to(cutoff);
            let (lhs, lhs_tail) = ctx.finish(&kl_coeffs[..len], cutoff);
            let (sum, tail) = ctx.finish(&rho_coeffs[..len], cutoff);
            let rhs = sum * inv;
            let rhs_tail = tail * inv.norm();
            IdentityReport {
                l,
                n,
                lhs,
                rhs,
                abs_gap: (lhs - rhs).norm(),
                lhs_tail,
                rhs_tail,
                tail_bound: lhs_tail + rhs_tail,
            }
        })
        .collect();
    Ok(reports)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZagierRow {
    pub n: GaussianInt,
    pub disc_norm: u128,
    pub value: Complex64,
    pub tail: f64,
}

pub const ZAGIER_HEADER: &str = "n_re,n_im,disc_norm,L_re,L_im,tail";

/// `L_k(s; n^2 - 4l^2)` for canonical `n` with `N(n) <= n_max_norm`, skipping
/// zero discriminants; rows sorted by `(disc_norm, re, im)`.
pub fn zagier_sweep(l: GaussianInt, n_max_norm: u64, s: Complex64, cfg: TruncationConfig) -> Result<Vec<ZagierRow>> {
    let ctx = SeriesContext::new(s, cfg.max_norm)?;
    let mut ns = gaussian::canonical_up_to(n_max_norm);
    ns.push(GaussianInt::ZERO);
    let mut rows = Vec::new();
    for n in ns {
        let d = discriminant(l, n)?;
        if d.is_zero() {
            continue;
        }
        let v = zagier_l_in(&ctx, d, cfg)?;
        rows.push(ZagierRow { n, disc_norm: d.norm(), value: v.value, tail: v.tail_bound });
    }
    rows.sort_by_key(|r| (r.disc_norm, r.n.re, r.n.im));
    Ok(rows)
}

/// Least-squares slope of `log |L|` against `log |d|` (`|d| = N(d)^{1/2}`);
/// the exponent a subconvexity bound `|d|^{2 theta}` would cap.
pub fn subconvexity_slope(rows: &[ZagierRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.disc_norm > 1 && r.value.norm() > 0.0)
        .map(|r| (0.5 * (r.disc_norm as f64).ln(), r.value.norm().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Canonical representative of `l^2`, which is all the identity depends on.
pub fn l_squared_class(l: GaussianInt) -> GaussianInt {
    canonical_assoc(l * l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::{additive_char, kloosterman, KloostermanQuery};
    use proptest::prelude::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    fn s15() -> Complex64 {
        Complex64::new(1.5, 0.0)
    }

    /// `N(q)^{-1} sum_{c mod q} S(l^2, c^2; q) e[nc/q]` straight from the definition.
    fn naive_coefficient(l: GaussianInt, n: GaussianInt, q: GaussianInt) -> Complex64 {
        let mut t = Complex64::new(0.0, 0.0);
        for c in gaussian::residue_system(q).unwrap() {
            let s = kloosterman(&KloostermanQuery::new(l * l, c * c, q).unwrap()).unwrap();
            t += s * additive_char((n * c).to_complex() / q.to_complex());
        }
        t / q.norm() as f64
    }

    #[test]
    fn config_validation() {
        assert!(TruncationConfig::new(3, 1.0).is_err());
        assert!(TruncationConfig::new(4, 0.0).is_err());
        assert!(ZagierQuery::new(Complex64::new(1.0, 3.0), g(1, 0), TruncationConfig::default()).is_err());
    }

    #[test]
    fn multiplicative_rho_matches_brute_force() {
        let ctx = SeriesContext::new(s15(), 300).unwrap();
        let moduli = gaussian::canonical_up_to(300);
        for d in [g(0, 0), g(1, 0), g(-4, 0), g(3, 2), g(-7, 4), g(9, 0), g(0, 8)] {
            let local = LocalRho::new(&ctx, d).unwrap();
            for (q, e) in moduli.iter().zip(&ctx.entries) {
                assert_eq!(local.rho(e), gaussian::rho_q(*q, d).unwrap(), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn local_kloosterman_matches_definition() {
        let ctx = SeriesContext::new(s15(), 40).unwrap();
        let moduli = gaussian::canonical_up_to(40);
        for (l, n) in [(g(1, 0), g(0, 0)), (g(1, 1), g(2, 1)), (g(2, 1), g(-1, 3))] {
            let local = LocalKloosterman::new(&ctx, l, n, 40).unwrap();
            for (q, e) in moduli.iter().zip(&ctx.entries) {
                let want = naive_coefficient(l, n, *q);
                assert!((want - local.coefficient(e) as f64).norm() < 1e-9, "l={l} n={n} q={q}: {want}");
            }
        }
    }

    #[test]
    fn closed_form_kloosterman_factors_at_large_primes() {
        // A prime above the enumeration threshold, against enumeration.
        let pi = gaussian::primes_above(2017)[0];
        for (l, n) in [(g(1, 0), g(1, 0)), (g(2, 1), g(0, 3))] {
            let l2 = l * l;
            let d = n * n - l2.scale(4);
            let direct = local_ramanujan(pi, &|c| c * c + n * c + l2).unwrap();
            assert_eq!(direct, quadratic_character(d, pi, pi.norm() as u64).unwrap() as i64);
        }
    }

    #[test]
    fn hensel_differences_match_enumeration() {
        let pi = g(3, 2);
        for (l, n) in [(g(1, 0), g(2, 0)), (g(3, 2), g(0, 0)), (g(1, 0), g(5, 1)), (g(2, 1), g(4, 2) + pi * pi)] {
            let l2 = l * l;
            let d = n * n - l2.scale(4);
            let (v, chi) = local_symbols(&[Prime { pi, norm: 13 }], d, Execution::Sequential).unwrap()[0];
            for k in 1..=3 {
                let direct = local_ramanujan(pi.pow(k).unwrap(), &|c| c * c + n * c + l2).unwrap();
                let closed = hensel_count(13, k, v, chi) as i64 - hensel_count(13, k - 1, v, chi) as i64;
                assert_eq!(direct, closed, "l={l} n={n} k={k}");
            }
        }
    }

    #[test]
    fn identity_examples() {
        let cfg = TruncationConfig::new(2000, 1.0).unwrap();
        let r = kloosterman_zagier_identity(g(1, 0), g(0, 0), s15(), cfg).unwrap();
        assert!(r.abs_gap <= r.tail_bound, "{r:?}");
        let r = kloosterman_zagier_identity(g(1, 0), g(2, 0), s15(), cfg).unwrap();
        assert!(r.abs_gap <= r.tail_bound, "{r:?}");
        assert!(kloosterman_zagier_identity(g(0, 0), g(2, 0), s15(), cfg).is_err());
        assert!(kloosterman_zagier_identity(g(1, 0), g(2, 0), Complex64::new(0.9, 0.0), cfg).is_err());
    }

    #[test]
    fn special_value_by_euler_product() {
        for s in [1.25, 1.5, 2.0] {
            let s = Complex64::new(s, 0.0);
            let q = ZagierQuery::new(s, g(0, 0), TruncationConfig::default()).unwrap().with_method(ZagierMethod::EulerProduct);
            let v = zagier_l(&q).unwrap().value;
            let want = 4.0 * dedekind_zeta(2.0 * s - 1.0).unwrap();
            assert!(((v - want) / want).norm() < 1e-9, "s={s}: {v} vs {want}");
        }
    }

    #[test]
    fn euler_product_matches_truncation_for_square() {
        let s = Complex64::new(2.5, 0.0);
        let cfg = TruncationConfig::new(20_000, 1.0).unwrap();
        let q = ZagierQuery::new(s, g(9, 0), cfg).unwrap();
        let t = zagier_l(&q).unwrap();
        let e = zagier_l(&q.with_method(ZagierMethod::EulerProduct)).unwrap();
        assert!((t.value - e.value).norm() <= t.tail_bound, "{t:?} {e:?}");
        assert!(zagier_l(&q.with_method(ZagierMethod::EulerProduct).clone_with_n(g(2, 0))).is_err());
    }

    impl ZagierQuery {
        fn clone_with_n(&self, n: GaussianInt) -> Self {
            ZagierQuery { n, ..*self }
        }
    }

    #[test]
    fn truncated_value_stable_in_cutoff() {
        let s = s15();
        let ctx = SeriesContext::new(s, 40_000).unwrap();
        let a = zagier_l_in(&ctx, g(4, 0), TruncationConfig::new(10_000, 1.0).unwrap()).unwrap();
        let b = zagier_l_in(&ctx, g(4, 0), TruncationConfig::new(40_000, 1.0).unwrap()).unwrap();
        assert!((a.value - b.value).norm() <= a.tail_bound);
        assert!(b.tail_bound < a.tail_bound);
        assert!(a.crude_tail_bound.is_none());
    }

    #[test]
    fn sweep_and_slope() {
        let cfg = TruncationConfig::new(500, 10.0).unwrap();
        let rows = zagier_sweep(g(1, 0), 25, Complex64::new(1.1, 2.0), cfg).unwrap();
        assert!(rows.windows(2).all(|w| w[0].disc_norm <= w[1].disc_norm));
        assert!(subconvexity_slope(&rows).unwrap().is_finite());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn character_is_multiplicative(a in -30i64..30, b in -30i64..30, c2 in -30i64..30, d2 in -30i64..30) {
            let pi = g(3, 2);
            let (x, y) = (g(a, b), g(c2, d2));
            let lhs = quadratic_character(x * y, pi, 13).unwrap();
            let rhs = quadratic_character(x, pi, 13).unwrap() * quadratic_character(y, pi, 13).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
