//! Additive characters and Kloosterman sums over Z[i].

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{self, check_brute_force, gi_gcd, inv_mod, GaussianInt, ResidueSystem};
use crate::par;

/// `e[x] = exp(2 pi i Re x)`.
pub fn additive_char(x: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x.re.rem_euclid(1.0))
}

/// Table of `e[k / N]` for `k = 0..N`, built once per modulus.
pub(crate) struct PhaseTable {
    n: i128,
    table: Vec<Complex64>,
}

impl PhaseTable {
    pub(crate) fn new(n: u128) -> Self {
        let table = (0..n)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
            .collect();
        PhaseTable { n: n as i128, table }
    }

    /// `e[z / c]` where `self` was built for `N(c)`: uses `Re(z conj c) mod N(c)`.
    pub(crate) fn over(&self, z: GaussianInt, c: GaussianInt) -> Complex64 {
        let num = z.re as i128 * c.re as i128 + z.im as i128 * c.im as i128;
        self.table[num.rem_euclid(self.n) as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KloostermanQuery {
    pub m: GaussianInt,
    pub n: GaussianInt,
    pub c: GaussianInt,
}

impl KloostermanQuery {
    pub fn new(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroModulus);
        }
        Ok(KloostermanQuery { m, n, c })
    }
}

/// Reduced residues modulo `c` paired with their inverses.
pub(crate) fn unit_pairs(c: GaussianInt) -> Result<Vec<(GaussianInt, GaussianInt)>> {
    let rs = ResidueSystem::new(c)?;
    rs.elements()
        .filter(|&a| gi_gcd(a, c).map(|g| g.is_unit()).unwrap_or(false))
        .map(|a| Ok((a, inv_mod(a, c)?)))
        .collect()
}

/// `S(m, n; c) = sum_{a mod c, (a, c) = 1} e[(m a + n a*) / c]`.
///
/// Phases are reduced exactly (`Re((m a + n a*) conj c) mod N(c)`) before
/// the table lookup, so large moduli lose no accuracy in the argument.
pub fn kloosterman(q: &KloostermanQuery) -> Result<Complex64> {
    check_brute_force(q.c)?;
    let phases = PhaseTable::new(q.c.norm());
    let pairs = unit_pairs(q.c)?;
    let terms: Vec<Complex64> = pairs
        .iter()
        .map(|&(a, ainv)| {
            let z = q.m.checked_mul(a)?.checked_add(q.n.checked_mul(ainv)?)?;
            Ok(phases.over(z, q.c))
        })
        .collect::<Result<_>>()?;
    Ok(par::pairwise_sum(&terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeilDiagnostic {
    pub value_abs: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Reference envelope `|c| N(gcd(m, n, c))^{1/2} d(c)`, `d(c)` the number of
/// canonical divisors of `c`. A diagnostic, not a proven constant.
pub fn weil_envelope(q: &KloostermanQuery) -> Result<f64> {
    let g = gi_gcd(gi_gcd(q.m, q.n).unwrap_or(GaussianInt::ZERO), q.c)?;
    let d = gaussian::canonical_divisors(q.c)?.len() as f64;
    Ok((q.c.norm() as f64).sqrt() * (g.norm() as f64).sqrt() * d)
}

pub fn weil_diagnostic(q: &KloostermanQuery) -> Result<WeilDiagnostic> {
    let value_abs = kloosterman(q)?.norm();
    let bound = weil_envelope(q)?;
    Ok(WeilDiagnostic { value_abs, bound, ratio: value_abs / bound })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: GaussianInt,
    pub norm_c: u128,
    pub value: Complex64,
    pub bound: f64,
    pub ratio: f64,
}

pub const SWEEP_HEADER: &str = "c_re,c_im,norm_c,S_re,S_im,bound,ratio";

/// `S(m, n; c)` for every nonzero `c` with `N(c) <= max_norm`, rows sorted by
/// `(norm, re, im)`.
pub fn kloosterman_sweep(m: GaussianInt, n: GaussianInt, max_norm: u64) -> Result<Vec<SweepRow>> {
    let moduli = gaussian::all_up_to(max_norm);
    par::map(&moduli, |&c| {
        let q = KloostermanQuery::new(m, n, c)?;
        let value = kloosterman(&q)?;
        let bound = weil_envelope(&q)?;
        Ok(SweepRow { c, norm_c: c.norm(), value, bound, ratio: value.norm() / bound })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    /// Textbook evaluation: brute-force inverse search and floating phases.
    fn naive(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> Complex64 {
        let rs = gaussian::residue_system(c).unwrap();
        let cc = c.to_complex();
        let mut s = Complex64::new(0.0, 0.0);
        for &a in &rs {
            let Some(&ainv) = rs.iter().find(|&&x| c.divides(a * x - GaussianInt::ONE)) else {
                continue;
            };
            let x = (m * a).to_complex() / cc + (n * ainv).to_complex() / cc;
            s += additive_char(x);
        }
        s
    }

    #[test]
    fn character_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert!((additive_char(Complex64::new(0.0, 0.0)) - one).norm() < 1e-15);
        assert!((additive_char(Complex64::new(0.0, 3.7)) - one).norm() < 1e-15);
        assert!((additive_char(Complex64::new(1.0, -1.0)) - one).norm() < 1e-15);
        assert!((additive_char(Complex64::new(0.25, 9.0)) - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn kloosterman_examples() {
        let s = kloosterman(&KloostermanQuery::new(g(5, 3), g(-2, 7), g(1, 0)).unwrap()).unwrap();
        assert!((s - 1.0).norm() < 1e-15);
        let s = kloosterman(&KloostermanQuery::new(g(1, 0), g(1, 0), g(1, 1)).unwrap()).unwrap();
        assert!((s - 1.0).norm() < 1e-15);
        let s = kloosterman(&KloostermanQuery::new(g(1, 0), g(1, 0), g(2, 0)).unwrap()).unwrap();
        assert!((s - naive(g(1, 0), g(1, 0), g(2, 0))).norm() < 1e-12);
        assert_eq!(KloostermanQuery::new(g(1, 0), g(1, 0), g(0, 0)), Err(Error::ZeroModulus));
    }

    #[test]
    fn agrees_with_naive_evaluation() {
        for (m, n, c) in [(g(1, 2), g(3, -1), g(3, 4)), (g(0, 1), g(2, 2), g(4, 1)), (g(7, 0), g(1, 1), g(2, 2))] {
            let fast = kloosterman(&KloostermanQuery::new(m, n, c).unwrap()).unwrap();
            assert!((fast - naive(m, n, c)).norm() < 1e-10);
        }
    }

    #[test]
    fn weil_examples() {
        let d = weil_diagnostic(&KloostermanQuery::new(g(1, 0), g(1, 0), g(1, 0)).unwrap()).unwrap();
        assert!(d.ratio <= 1.0);
        let d = weil_diagnostic(&KloostermanQuery::new(g(1, 0), g(1, 0), g(1, 1)).unwrap()).unwrap();
        assert!((d.value_abs - 1.0).abs() < 1e-12);
        assert!((d.bound - 2f64.sqrt() * 2.0).abs() < 1e-12);
        assert!(d.ratio <= 1.0);
    }

    #[test]
    fn sweep_is_sorted_and_complete() {
        let rows = kloosterman_sweep(g(1, 0), g(1, 0), 100).unwrap();
        assert_eq!(rows.len(), gaussian::all_up_to(100).len());
        for w in rows.windows(2) {
            let (a, b) = (w[0].c, w[1].c);
            assert!((a.norm(), a.re, a.im) < (b.norm(), b.re, b.im));
        }
    }

    fn arb_gi(r: i64) -> impl Strategy<Value = GaussianInt> {
        (-r..=r, -r..=r).prop_map(|(a, b)| GaussianInt::new(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn symmetric_and_real(m in arb_gi(40), n in arb_gi(40), c in arb_gi(70)) {
            prop_assume!(!c.is_zero() && c.norm() <= 10_000);
            let s = kloosterman(&KloostermanQuery::new(m, n, c).unwrap()).unwrap();
            let t = kloosterman(&KloostermanQuery::new(n, m, c).unwrap()).unwrap();
            prop_assert!((s - t).norm() <= 1e-12 * c.norm() as f64);
            prop_assert!(s.im.abs() <= 1e-10 * c.norm() as f64);
        }

        #[test]
        fn envelope_is_unit_invariant(m in arb_gi(20), n in arb_gi(20), c in arb_gi(30), u in 0usize..4) {
            prop_assume!(!c.is_zero());
            let a = weil_envelope(&KloostermanQuery::new(m, n, c).unwrap()).unwrap();
            let b = weil_envelope(&KloostermanQuery::new(m, n, c * gaussian::UNITS[u]).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
