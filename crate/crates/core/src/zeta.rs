//! Dedekind zeta of Q(i) and the Lerch-type lattice zeta
//! `sum_{n + xi != 0} ((n + xi)/|n + xi|)^m |n + xi|^{-2s}` with its
//! continuation and functional equation.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{dirichlet_beta, gamma_inc_upper, ln_gamma, rgamma, riemann_zeta};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `zeta_k(s) = zeta(s) L(s, chi_{-4})`, reflected through
/// `zeta_k(s) = pi^{2s-1} Gamma(1-s)/Gamma(s) zeta_k(1-s)` left of `Re s = -1/2`.
pub fn dedekind_zeta(s: Complex64) -> Result<Complex64> {
    if s == c(1.0, 0.0) {
        return Err(Error::Pole { residue: FRAC_PI_4 });
    }
    if s.re >= -0.5 {
        return Ok(riemann_zeta(s)? * dirichlet_beta(s)?);
    }
    let t = c(1.0, 0.0) - s;
    let factor = ((2.0 * s - 1.0) * PI.ln() + ln_gamma(t)).exp() * rgamma(s);
    Ok(factor * riemann_zeta(t)? * dirichlet_beta(t)?)
}

/// `zeta_k(s)` from the theta-split lattice sum; the independent route.
pub fn dedekind_zeta_lattice(s: Complex64) -> Result<Complex64> {
    if s == c(1.0, 0.0) {
        return Err(Error::Pole { residue: FRAC_PI_4 });
    }
    Ok(theta_split(s, 0, c(0.0, 0.0), c(0.0, 0.0), 1.0)?.value / 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LerchQuery {
    pub s: Complex64,
    pub m: i32,
    pub xi: Complex64,
}

impl LerchQuery {
    pub fn new(s: Complex64, m: i32, xi: Complex64) -> Result<Self> {
        if !(s.is_finite() && xi.is_finite()) {
            return Err(Error::Domain("Lerch parameters must be finite".into()));
        }
        Ok(LerchQuery { s, m, xi })
    }
}

/// A value with an estimate of its absolute error (truncation plus rounding).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

pub fn lerch_zeta(q: &LerchQuery) -> Result<Complex64> {
    Ok(lerch_zeta_estimate(q)?.value)
}

pub fn lerch_zeta_estimate(q: &LerchQuery) -> Result<Estimate> {
    if q.m == 0 && q.s == c(1.0, 0.0) {
        return Err(Error::Pole { residue: PI });
    }
    theta_split(q.s, q.m, q.xi, c(0.0, 0.0), 1.0)
}

/// `(-i)^{|m|} pi^{2s-1} Gamma(1-s+|m|/2)/Gamma(s+|m|/2) sum_{n != 0} (n/|n|)^{-m} e[n xi] |n|^{-2(1-s)}`.
///
/// The sum is the twisted lattice zeta at `1 - s`, evaluated by its own
/// theta split with a different splitting parameter.
pub fn lerch_functional_equation_rhs(q: &LerchQuery) -> Result<Complex64> {
    Ok(lerch_functional_equation_rhs_estimate(q)?.value)
}

pub fn lerch_functional_equation_rhs_estimate(q: &LerchQuery) -> Result<Estimate> {
    if q.s.re >= 0.0 {
        return Err(Error::Domain(format!("functional equation side needs Re s < 0, got {}", q.s)));
    }
    let am = q.m.unsigned_abs() as f64;
    let t = c(1.0, 0.0) - q.s;
    // n -> conj(n) turns (n/|n|)^{-m} e[n xi] into (n/|n|)^m e(n . xi).
    let series = theta_split(t, q.m, c(0.0, 0.0), q.xi, 1.7)?;
    let unit = Complex64::i().powu(q.m.unsigned_abs()).conj();
    let factor = unit * ((2.0 * q.s - 1.0) * PI.ln() + ln_gamma(t + am / 2.0)).exp() * rgamma(q.s + am / 2.0);
    Ok(Estimate { value: factor * series.value, error: factor.norm() * series.error })
}

/// `P_m(w) = w^m` for `m >= 0`, `conj(w)^{|m|}` otherwise.
fn harmonic(w: Complex64, m: i32) -> Complex64 {
    if m >= 0 {
        w.powu(m as u32)
    } else {
        w.conj().powu(m.unsigned_abs())
    }
}

fn near_lattice(z: Complex64) -> bool {
    (z.re - z.re.round()).abs() < 1e-15 && (z.im - z.im.round()).abs() < 1e-15
}

fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Sums `f(d)` over square shells `max(|d.re|, |d.im|) = k` until a shell
/// contributes below `1e-18` of the running total. Returns the sum, the sum
/// of absolute values, and the last shell's contribution.
fn shells(mut f: impl FnMut(i64, i64) -> Complex64) -> Result<(Complex64, f64, f64)> {
    let mut total = f(0, 0);
    let mut abs_total = total.norm();
    for k in 1..400i64 {
        let mut shell = c(0.0, 0.0);
        let mut shell_abs = 0.0;
        for j in -k..k {
            for (x, y) in [(j, -k), (k, j), (-j, k), (-k, -j)] {
                let v = f(x, y);
                shell += v;
                shell_abs += v.norm();
            }
        }
        total += shell;
        abs_total += shell_abs;
        if k >= 3 && shell_abs <= 1e-18 * abs_total.max(1e-300) {
            return Ok((total, abs_total, shell_abs));
        }
    }
    Err(Error::Precision("lattice theta sum did not converge".into()))
}

/// Twisted, shifted lattice zeta
/// `Z = sum_{w = n + xi != 0} P_m(w) e(n . eta) |w|^{-2 s - |m|}`
/// through the split of its Mellin integral at `a`:
///
/// `Gamma(v) pi^{-v} Z = sum_w P(w) e(n.eta) (pi|w|^2)^{-v} Gamma(v, pi a |w|^2)
///  + (-i)^{|m|} sum_{u = k - eta} e(xi.u) P(u) (pi|u|^2)^{v-|m|-1} Gamma(|m|+1-v, pi|u|^2/a)
///  - [m = 0, xi in Z^2] e(-xi.eta) a^v/v + [m = 0, eta in Z^2] a^{v-1}/(v-1)`
///
/// with `v = s + |m|/2`.
pub(crate) fn theta_split(s: Complex64, m: i32, xi: Complex64, eta: Complex64, a: f64) -> Result<Estimate> {
    let am = m.unsigned_abs();
    let nu = s + am as f64 / 2.0;
    let xi_lattice = near_lattice(xi);
    let eta_lattice = near_lattice(eta);
    if m == 0 && eta_lattice && (nu - 1.0).norm() == 0.0 {
        return Err(Error::Pole { residue: PI });
    }
    let e = |x: f64| Complex64::from_polar(1.0, TAU * x);
    if m == 0 && xi_lattice && nu.norm() == 0.0 {
        return Ok(Estimate { value: -e(-dot(xi, eta)), error: 1e-16 });
    }

    let mut err = None;
    let mut record = |r: Result<Complex64>| match r {
        Ok(v) => v,
        Err(x) => {
            err.get_or_insert(x);
            c(0.0, 0.0)
        }
    };

    let base = c(-xi.re.round(), -xi.im.round());
    let (direct, direct_abs, direct_tail) = shells(|dx, dy| {
        let n = base + c(dx as f64, dy as f64);
        let w = n + xi;
        let r2 = w.norm_sqr();
        if r2 < 1e-28 {
            return c(0.0, 0.0);
        }
        let x = PI * r2;
        let g = record(gamma_inc_upper(nu, a * x));
        harmonic(w, m) * e(dot(n, eta)) * (-nu * x.ln()).exp() * g
    })?;

    let center = c(eta.re.round(), eta.im.round());
    let unit = Complex64::i().powu(am).conj();
    let (dual, dual_abs, dual_tail) = shells(|dx, dy| {
        let u = center + c(dx as f64, dy as f64) - eta;
        let r2 = u.norm_sqr();
        if r2 < 1e-28 {
            return c(0.0, 0.0);
        }
        let x = PI * r2;
        let g = record(gamma_inc_upper(am as f64 + 1.0 - nu, x / a));
        e(dot(xi, u)) * harmonic(u, m) * ((nu - am as f64 - 1.0) * x.ln()).exp() * g
    })?;
    let dual = unit * dual;
    if let Some(x) = err {
        return Err(x);
    }

    let mut bracket = direct + dual;
    if m == 0 && xi_lattice {
        bracket -= e(-dot(xi, eta)) * (nu * a.ln()).exp() / nu;
    }
    if m == 0 && eta_lattice {
        bracket += ((nu - 1.0) * a.ln()).exp() / (nu - 1.0);
    }
    let scale = (nu * PI.ln()).exp() * rgamma(nu);
    let value = scale * bracket;
    let error = scale.norm() * (direct_tail + dual_tail + 1e-16 * (direct_abs + dual_abs + bracket.norm()));
    if !value.is_finite() {
        return Err(Error::Precision("lattice zeta overflowed".into()));
    }
    Ok(Estimate { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    /// Direct truncated sum over the box `|re|, |im| <= r`.
    fn direct(s: Complex64, m: i32, xi: Complex64, eta: Complex64, r: i64) -> Complex64 {
        let mut t = c(0.0, 0.0);
        for x in -r..=r {
            for y in -r..=r {
                let n = c(x as f64, y as f64);
                let w = n + xi;
                if w.norm() < 1e-14 {
                    continue;
                }
                t += (w / w.norm()).powi(m) * (-s * w.norm_sqr().ln()).exp() * Complex64::from_polar(1.0, TAU * dot(n, eta));
            }
        }
        t
    }

    // Reference values from a 20-digit arbitrary precision evaluation.

    #[test]
    fn dedekind_reference() {
        assert!(close(dedekind_zeta(c(2.0, 0.0)).unwrap(), c(1.506703009922985, 0.0), 1e-14));
        assert!(close(dedekind_zeta(c(3.0, 0.0)).unwrap(), c(1.1647284039009609, 0.0), 1e-14));
        assert!(close(dedekind_zeta(c(0.5, 5.0)).unwrap(), c(0.71886929724913897, -0.36831912223471105), 1e-12));
        assert!(close(dedekind_zeta(c(-3.3, 2.0)).unwrap(), c(0.02109334614763805, -0.40989468481582091), 1e-12));
        assert!(close(dedekind_zeta(c(1.5, 40.0)).unwrap(), c(0.7343074512224571, -0.28315633110908052), 1e-11));
        assert!(close(dedekind_zeta(c(-0.5, 0.0)).unwrap(), c(-0.057206077594304738, 0.0), 1e-12));
        assert_eq!(dedekind_zeta(c(1.0, 0.0)), Err(Error::Pole { residue: FRAC_PI_4 }));
        assert_eq!(dedekind_zeta(c(-2.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn dedekind_residue() {
        let h = 1e-7;
        let v = dedekind_zeta(c(1.0 + h, 0.0)).unwrap() * h;
        assert!((v.re - FRAC_PI_4).abs() < 1e-6);
    }

    #[test]
    fn dedekind_two_routes() {
        for s in [c(0.5, 5.0), c(2.0, 0.0), c(3.0, 0.0), c(-1.5, 0.5), c(0.0, 0.0)] {
            let a = dedekind_zeta(s).unwrap();
            let b = dedekind_zeta_lattice(s).unwrap();
            assert!((a - b).norm() <= 1e-9 * a.norm().max(1e-3), "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn lerch_examples() {
        let q = LerchQuery::new(c(1.5, 0.0), 0, c(0.0, 0.0)).unwrap();
        let want = 4.0 * dedekind_zeta(c(1.5, 0.0)).unwrap();
        assert!(close(lerch_zeta(&q).unwrap(), want, 1e-12));
        let q = LerchQuery::new(c(1.5, 0.0), 2, c(0.0, 0.0)).unwrap();
        assert!(lerch_zeta(&q).unwrap().norm() < 1e-12);
        let q = LerchQuery::new(c(1.0, 0.0), 0, c(0.3, 0.1)).unwrap();
        assert_eq!(lerch_zeta(&q), Err(Error::Pole { residue: PI }));
        let q = LerchQuery::new(c(-0.5, 0.0), 2, c(0.3, 0.4)).unwrap();
        let want = c(-0.066830512133700229455, 0.041907250596597755783);
        assert!(close(lerch_zeta(&q).unwrap(), want, 1e-12));
        assert!(close(lerch_functional_equation_rhs(&q).unwrap(), want, 1e-12));
        let q = LerchQuery::new(c(-1.2, 0.0), 4, c(0.1, 0.7)).unwrap();
        let want = c(0.16482253786083594992, 0.022041703336457401628);
        assert!(close(lerch_zeta(&q).unwrap(), want, 1e-12));
        assert!(close(lerch_functional_equation_rhs(&q).unwrap(), want, 1e-12));
    }

    #[test]
    fn rhs_closed_form_at_origin() {
        let q = LerchQuery::new(c(-0.5, 0.0), 0, c(0.0, 0.0)).unwrap();
        let g = |x: f64| ln_gamma(c(x, 0.0)).exp();
        let want = PI.powi(-2) * g(1.5) / g(-0.5) * 4.0 * dedekind_zeta(c(1.5, 0.0)).unwrap();
        assert!(close(lerch_functional_equation_rhs(&q).unwrap(), want, 1e-12));
        assert!(matches!(lerch_functional_equation_rhs(&LerchQuery { s: c(0.5, 0.0), ..q }), Err(Error::Domain(_))));
    }

    #[test]
    fn theta_split_matches_direct_sums() {
        let s = c(4.0, 0.3);
        let cases = [
            (2, c(0.3, 0.4), c(0.0, 0.0)),
            (-3, c(0.0, 0.0), c(0.1, 0.7)),
            (1, c(-0.2, 0.35), c(0.25, -0.5)),
            (0, c(0.5, 0.5), c(0.0, 0.0)),
        ];
        for (m, xi, eta) in cases {
            let a = theta_split(s, m, xi, eta, 1.0).unwrap().value;
            let b = direct(s, m, xi, eta, 80);
            assert!((a - b).norm() < 1e-9, "m={m} xi={xi} eta={eta}: {a} vs {b}");
        }
    }

    #[test]
    fn split_parameter_independence() {
        for a in [0.5, 1.0, 2.0] {
            let v = theta_split(c(-0.7, 1.1), 3, c(0.2, -0.1), c(0.4, 0.3), a).unwrap().value;
            let w = theta_split(c(-0.7, 1.1), 3, c(0.2, -0.1), c(0.4, 0.3), 1.0).unwrap().value;
            assert!((v - w).norm() < 1e-11 * w.norm().max(1.0));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn unit_rotation_kills_non_multiples_of_four(re in -3.0f64..4.0, im in -5.0f64..5.0, k in 0i32..12) {
            let m = if k % 4 == 0 { k + 1 } else { k };
            prop_assume!(!(m == 0 && (re - 1.0).abs() < 1e-3 && im.abs() < 1e-3));
            let q = LerchQuery::new(c(re, im), m, c(0.0, 0.0)).unwrap();
            prop_assert!(lerch_zeta(&q).unwrap().norm() <= 1e-8);
        }

        #[test]
        fn functional_equation(m in -6i32..7, xr in -0.5f64..0.5, xim in -0.5f64..0.5, t in -2.0f64..2.0) {
            let q = LerchQuery::new(c(-0.5, t), m, c(xr, xim)).unwrap();
            let l = lerch_zeta(&q).unwrap();
            let r = lerch_functional_equation_rhs(&q).unwrap();
            prop_assert!((l - r).norm() <= 1e-8 * l.norm().max(1.0));
        }

        #[test]
        fn conjugate_symmetry(re in -2.0f64..4.0, im in 0.1f64..30.0) {
            let s = c(re, im);
            let a = dedekind_zeta(s.conj()).unwrap();
            let b = dedekind_zeta(s).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0));
        }
    }
}
