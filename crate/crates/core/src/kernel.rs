//! Kernel coordinates, the `N1..N9` classification of `n`, and the test
//! functions `omega_T`, `q_N`, `h`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianInt;
use crate::special::erf_diff;

fn check_first_quadrant(l: GaussianInt) -> Result<()> {
    if l.is_zero() {
        return Err(Error::ZeroArgument);
    }
    if !(l.re > 0 && l.im >= 0) {
        return Err(Error::Domain(format!("l = {l} must lie in the first quadrant (re > 0, im >= 0)")));
    }
    Ok(())
}

fn rat(n: i128, d: i128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub n: GaussianInt,
    pub l: GaussianInt,
    pub y: f64,
    pub z: Complex64,
    pub x_plus: f64,
    pub x_minus: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    #[serde(with = "rational_string")]
    pub y_n: BigRational,
    #[serde(with = "rational_string")]
    pub s_n: BigRational,
}

pub(crate) mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(y_n, s_n) = (Re, Im)(n / 2l)` as `((ac+bd), (ad-bc)) / (a^2+b^2)` with
/// `2l = a+ib`, `n = c+id`.
pub fn yn_sn(n: GaussianInt, l: GaussianInt) -> (BigRational, BigRational) {
    let (a, b) = (2 * l.re as i128, 2 * l.im as i128);
    let (c, d) = (n.re as i128, n.im as i128);
    let den = a * a + b * b;
    (rat(a * c + b * d, den), rat(a * d - b * c, den))
}

/// `f_-(n/l, y) = y^2 - |z| y cos(arg z) + |z/2|^2` from its definition, with
/// `|z| cos(arg z) = Re(n conj l) / N(l)` and `|z|^2 = N(n)/N(l)`.
pub fn f_minus_exact(n: GaussianInt, l: GaussianInt, y: &BigRational) -> BigRational {
    let nl = l.norm() as i128;
    let re_z = rat(n.re as i128 * l.re as i128 + n.im as i128 * l.im as i128, nl);
    let z2 = rat(n.norm() as i128, nl);
    y * y - &re_z * y + z2 / BigRational::from_integer(4.into())
}

/// `(y - y_n)^2 + s_n^2`.
pub fn f_minus_completed(n: GaussianInt, l: GaussianInt, y: &BigRational) -> BigRational {
    let (yn, sn) = yn_sn(n, l);
    let d = y - yn;
    &d * &d + &sn * &sn
}

pub fn kernel_point(n: GaussianInt, l: GaussianInt, y: f64) -> Result<KernelPoint> {
    check_first_quadrant(l)?;
    if !(0.0..1.0).contains(&y) {
        return Err(Error::Domain(format!("y must lie in [0, 1), got {y}")));
    }
    let z = n.to_complex() / l.to_complex();
    let (y_n, s_n) = yn_sn(n, l);
    // |z| cos(arg z) = Re z; f_- through the completed square keeps accuracy near its minimum
    let f_minus = (y - to_f64(&y_n)).powi(2) + to_f64(&s_n).powi(2);
    let f_plus = y * y + z.re * y + z.norm_sqr() / 4.0;
    let w = 1.0 - y * y;
    Ok(KernelPoint { n, l, y, z, x_plus: f_plus / w, x_minus: f_minus / w, f_plus, f_minus, y_n, s_n })
}

/// `x_+-(z, y)` for a complex `z` directly.
pub fn x_pm(z: Complex64, y: f64) -> (f64, f64) {
    let w = 1.0 - y * y;
    let base = y * y + z.norm_sqr() / 4.0;
    ((base + z.re * y) / w, ((y - z.re / 2.0).powi(2) + (z.im / 2.0).powi(2)) / w)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionConstants {
    pub eps: f64,
    pub eps1: f64,
    pub c_sn: f64,
    pub c_n: f64,
}

impl Default for PartitionConstants {
    fn default() -> Self {
        PartitionConstants { eps: 0.1, eps1: 0.01, c_sn: 1.0, c_n: 1.0 }
    }
}

impl PartitionConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps1 > 0.0 && self.eps1 < 1.0 && self.c_sn > 0.0 && self.c_n > 0.0) {
            return Err(Error::Domain(format!("invalid partition constants {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    N1,
    N2,
    N3,
    N4,
    N5,
    N6,
    N7,
    N8,
    N9,
    Excluded,
}

pub const LABELS: [Label; 9] =
    [Label::N1, Label::N2, Label::N3, Label::N4, Label::N5, Label::N6, Label::N7, Label::N8, Label::N9];

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Excluded => write!(f, "excluded"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// Sign of `q - c` for a rational `q` and a real threshold `c`; the
/// difference is formed before rounding.
fn cmp_threshold(q: &BigRational, c: f64) -> std::cmp::Ordering {
    let d = match BigRational::from_float(c) {
        Some(cq) => q - cq,
        None => return std::cmp::Ordering::Less,
    };
    if d.is_zero() {
        std::cmp::Ordering::Equal
    } else if d.is_positive() {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Less
    }
}

fn check_admissible(n: GaussianInt, l: GaussianInt) -> Result<()> {
    check_first_quadrant(l)?;
    let two_l = l.scale(2);
    if n.is_zero() || n == two_l || n == -two_l {
        return Err(Error::Domain(format!("n = {n} is one of 0, +-2l")));
    }
    Ok(())
}

/// `cos(arg(n/l)) > 0`, i.e. `Re(n conj l) > 0`.
pub fn cos_positive(n: GaussianInt, l: GaussianInt) -> bool {
    n.re as i128 * l.re as i128 + n.im as i128 * l.im as i128 > 0
}

/// The label of `n`, evaluated as a decision chain.
pub fn partition_label(n: GaussianInt, l: GaussianInt, t: f64, pc: &PartitionConstants) -> Result<Label> {
    check_admissible(n, l)?;
    pc.validate()?;
    if !cos_positive(n, l) {
        return Ok(Label::Excluded);
    }
    use std::cmp::Ordering::*;
    let (yn, sn) = yn_sn(n, l);
    let sn_abs = sn.abs();
    let s_thr = pc.c_sn * t.powf(-1.0 + pc.eps);
    let y_thr = t.powf(-2.0 + pc.eps);
    let one = BigRational::from_integer(1.into());
    if cmp_threshold(&sn_abs, s_thr) == Greater {
        return Ok(Label::N1);
    }
    if sn.is_zero() {
        return Ok(if yn <= one { Label::N3 } else { Label::N9 });
    }
    if yn == one {
        return Ok(Label::N2);
    }
    let below = &one - &yn;
    let above = &yn - &one;
    Ok(if yn < one {
        if cmp_threshold(&yn, 1.0 - pc.eps1) == Less {
            Label::N4
        } else if cmp_threshold(&below, y_thr) == Greater {
            Label::N6
        } else {
            Label::N5
        }
    } else if cmp_threshold(&above, y_thr) == Greater {
        Label::N7
    } else {
        Label::N8
    })
}

/// Membership of `n` in each of `N1..N9` tested independently from the set
/// definitions (with the explicit constants and half-open conventions).
pub fn memberships(n: GaussianInt, l: GaussianInt, t: f64, pc: &PartitionConstants) -> Result<[bool; 9]> {
    check_admissible(n, l)?;
    let (yn, sn) = yn_sn(n, l);
    let ynf = to_f64(&yn);
    let one = BigRational::from_integer(1.into());
    let s_small = cmp_threshold(&sn.abs(), pc.c_sn * t.powf(-1.0 + pc.eps)) != std::cmp::Ordering::Greater;
    let s_mid = s_small && !sn.is_zero();
    let y_thr = t.powf(-2.0 + pc.eps);
    let gap = to_f64(&(&yn - &one));
    let cos = cos_positive(n, l);
    Ok([
        cos && !s_small,
        cos && yn == one && s_mid,
        cos && yn <= one && sn.is_zero(),
        cos && ynf < 1.0 - pc.eps1 && cmp_threshold(&yn, 1.0 - pc.eps1).is_lt() && s_mid,
        cos && gap < 0.0 && -gap <= y_thr && s_mid,
        cos && cmp_threshold(&yn, 1.0 - pc.eps1).is_ge() && gap < 0.0 && -gap > y_thr && s_mid,
        cos && gap > y_thr && s_mid,
        cos && gap > 0.0 && gap <= y_thr && s_mid,
        cos && yn > one && sn.is_zero(),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub l: GaussianInt,
    pub t: f64,
    pub counts: BTreeMap<Label, usize>,
    /// `n` in range with `n != 0, +-2l` and `cos(arg(n/l)) > 0`.
    pub admissible: usize,
    /// In range but with `cos(arg(n/l)) <= 0`.
    pub excluded: usize,
}

/// `n` with `0 < |n| <= c_n T^eps |l|`, `n != +-2l`, in `(norm, re, im)` order.
pub fn n_range(l: GaussianInt, t: f64, pc: &PartitionConstants) -> Vec<GaussianInt> {
    let bound = pc.c_n * t.powf(pc.eps) * (l.norm() as f64).sqrt();
    let max_norm = (bound * bound).floor() as u64;
    let two_l = l.scale(2);
    crate::gaussian::all_up_to(max_norm).into_iter().filter(|&n| n != two_l && n != -two_l).collect()
}

pub fn pgt_partition_report(l: GaussianInt, t: f64, pc: &PartitionConstants) -> Result<PartitionReport> {
    check_first_quadrant(l)?;
    pc.validate()?;
    let mut counts: BTreeMap<Label, usize> = LABELS.iter().map(|&k| (k, 0)).collect();
    let (mut admissible, mut excluded) = (0, 0);
    for n in n_range(l, t, pc) {
        match partition_label(n, l, t, pc)? {
            Label::Excluded => excluded += 1,
            lab => {
                admissible += 1;
                *counts.get_mut(&lab).expect("all labels present") += 1;
            }
        }
    }
    Ok(PartitionReport { l, t, counts, admissible, excluded })
}

/// `(G sqrt pi)^{-1} int_T^{2T} exp(-(r-K)^2/G^2) dK
/// = (erf((2T-r)/G) - erf((T-r)/G)) / 2`.
pub fn omega_t(r: f64, t: f64, g: f64) -> f64 {
    0.5 * erf_diff((2.0 * t - r) / g, (t - r) / g)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    pub t: f64,
    pub g: f64,
    pub k: f64,
    pub n: u32,
}

impl TestFunctionSpec {
    pub fn new(t: f64, g: f64, k: f64, n: u32) -> Result<Self> {
        if !(t > 0.0 && g > 0.0 && g <= t && n >= 1 && k.is_finite()) {
            return Err(Error::Domain(format!("need 0 < G <= T and N >= 1, got T={t}, G={g}, N={n}")));
        }
        Ok(TestFunctionSpec { t, g, k, n })
    }

    /// `G = T^{0.9}`, `K = T`, `N = 1`.
    pub fn standard(t: f64) -> Result<Self> {
        Self::new(t, t.powf(0.9), t, 1)
    }
}

/// `q_N(r) = prod_{k<=N} (r^2 + (k-1/2)^2)(r^2 + k^2) / (r^2 + 100 N^2)^{2N}`.
pub fn q_n(r: Complex64, n: u32) -> Complex64 {
    let r2 = r * r;
    let nn = n as f64;
    let mut num = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        let kf = k as f64;
        num *= (r2 + (kf - 0.5).powi(2)) * (r2 + kf * kf);
    }
    num / (r2 + 100.0 * nn * nn).powi(2 * n as i32)
}

/// `h(r) = q_N(r) (exp(-(r-K)^2/G^2) + exp(-(r+K)^2/G^2))`.
pub fn h_test(r: Complex64, spec: &TestFunctionSpec) -> Complex64 {
    let g2 = spec.g * spec.g;
    q_n(r, spec.n) * ((-(r - spec.k).powi(2) / g2).exp() + (-(r + spec.k).powi(2) / g2).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss_kronrod, Tolerance};
    use proptest::prelude::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    #[test]
    fn kernel_point_examples() {
        let p = kernel_point(g(0, 0), g(1, 0), 0.5).unwrap();
        assert_eq!(p.x_plus, p.x_minus);
        assert!((p.x_plus - 0.25 / 0.75).abs() < 1e-15);
        let p = kernel_point(g(3, 1), g(2, 1), 0.25).unwrap();
        let (xp, xm) = x_pm(p.z, 0.25);
        assert!((p.x_plus - xp).abs() < 1e-14 && (p.x_minus - xm).abs() < 1e-14);
        assert!(kernel_point(g(1, 0), g(0, 0), 0.5).is_err());
        assert!(kernel_point(g(1, 0), g(-1, 2), 0.5).is_err());
        assert!(kernel_point(g(1, 0), g(1, 0), 1.0).is_err());
    }

    #[test]
    fn f_minus_at_its_minimum() {
        let (n, l) = (g(7, -3), g(2, 5));
        let (yn, sn) = yn_sn(n, l);
        assert_eq!(f_minus_exact(n, l, &yn), &sn * &sn);
    }

    #[test]
    fn partition_paper_families() {
        let pc = PartitionConstants::default();
        let l = g(3, 4);
        // n = l is 2l * j/(a,b) with (a,b) = 2, j = 1
        assert_eq!(partition_label(l, l, 100.0, &pc).unwrap(), Label::N3);
        let r = pgt_partition_report(l, 100.0, &pc).unwrap();
        assert_eq!(r.counts[&Label::N3], 1);
        // y_n = 1 with s_n != 0: n = 2l (1 + i k/(a,b)) = 2l + i k l
        let l = g(2, 0);
        let n = l.scale(2) + GaussianInt::I * l;
        let (yn, sn) = yn_sn(n, l);
        assert_eq!(yn, rat(1, 1));
        assert_eq!(sn, rat(1, 2));
        let loose = PartitionConstants { c_sn: 100.0, ..pc };
        assert_eq!(partition_label(n, l, 100.0, &loose).unwrap(), Label::N2);
        assert!(partition_label(l.scale(2), l, 100.0, &pc).is_err());
        assert!(partition_label(g(0, 0), l, 100.0, &pc).is_err());
        assert_eq!(partition_label(g(-1, 0), l, 100.0, &pc).unwrap(), Label::Excluded);
    }

    #[test]
    fn labels_match_set_memberships() {
        let pc = PartitionConstants::default();
        for t in [50.0, 100.0] {
            for l in crate::gaussian::canonical_up_to(25) {
                for n in n_range(l, t, &pc) {
                    let lab = partition_label(n, l, t, &pc).unwrap();
                    let m = memberships(n, l, t, &pc).unwrap();
                    let hits: Vec<usize> = (0..9).filter(|&i| m[i]).collect();
                    if lab == Label::Excluded {
                        assert!(hits.is_empty());
                    } else {
                        assert_eq!(hits, vec![LABELS.iter().position(|&x| x == lab).unwrap()], "l={l} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn eps1_moves_only_between_n4_and_n6() {
        let a = PartitionConstants::default();
        let b = PartitionConstants { eps1: 0.02, ..a };
        for l in [g(3, 4), g(5, 0), g(4, 3), g(1, 1)] {
            let ra = pgt_partition_report(l, 100.0, &a).unwrap();
            let rb = pgt_partition_report(l, 100.0, &b).unwrap();
            assert_eq!(ra.admissible, rb.admissible);
            for lab in LABELS {
                if lab != Label::N4 && lab != Label::N6 {
                    assert_eq!(ra.counts[&lab], rb.counts[&lab]);
                }
            }
            assert_eq!(ra.counts[&Label::N4] + ra.counts[&Label::N6], rb.counts[&Label::N4] + rb.counts[&Label::N6]);
        }
    }

    #[test]
    fn omega_matches_quadrature() {
        let (t, gg) = (100.0, 100f64.powf(0.9));
        for r in [0.0, 100.0, 150.0, 250.0, 400.0] {
            let direct = gauss_kronrod(
                |k| Complex64::new((-(r - k) * (r - k) / (gg * gg)).exp(), 0.0),
                t,
                2.0 * t,
                Tolerance { abs: 1e-14, rel: 1e-13, max_intervals: 500 },
            )
            .unwrap()
            .value
            .re
                / (gg * std::f64::consts::PI.sqrt());
            assert!((omega_t(r, t, gg) - direct).abs() < 1e-12, "r={r}");
        }
        // narrow window: interior and exterior behave as the limits say
        assert!((omega_t(150.0, 100.0, 5.0) - 1.0).abs() < 1e-12);
        assert!(omega_t(400.0, 100.0, 5.0) < 1e-100);
    }

    #[test]
    fn h_zeros_and_parity() {
        let spec = TestFunctionSpec::new(50.0, 10.0, 60.0, 3).unwrap();
        for k in 1..=3 {
            let kf = k as f64;
            for r in [Complex64::new(0.0, kf - 0.5), Complex64::new(0.0, kf), Complex64::new(0.0, -kf)] {
                assert_eq!(h_test(r, &spec), Complex64::new(0.0, 0.0));
            }
        }
        let r = Complex64::new(41.3, 0.7);
        assert!((h_test(r, &spec) - h_test(-r, &spec)).norm() < 1e-15 * h_test(r, &spec).norm());
        let spec = TestFunctionSpec::new(200.0, 5.0, 150.0, 1).unwrap();
        let v = h_test(Complex64::new(150.0, 0.0), &spec);
        assert!((v - q_n(Complex64::new(150.0, 0.0), 1)).norm() < 1e-15);
        assert!(TestFunctionSpec::new(10.0, 20.0, 1.0, 1).is_err());
    }

    fn arb_gi(r: i64) -> impl Strategy<Value = GaussianInt> {
        (-r..=r, -r..=r).prop_map(|(a, b)| GaussianInt::new(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn f_minus_identity_exact(n in arb_gi(1000), lr in 1i64..200, li in 0i64..200, p in 0i64..1_000_000, q in 1i64..1_000_000) {
            let l = GaussianInt::new(lr, li);
            let y = rat(p.min(q - 1) as i128, q as i128);
            prop_assert_eq!(f_minus_exact(n, l, &y), f_minus_completed(n, l, &y));
        }
    }
}
