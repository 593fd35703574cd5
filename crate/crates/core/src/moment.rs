//! The kernel `I(z, y, s)` in its two integral representations, the
//! K-averaged kernel `J`, the weight `V`, and the explicit-formula terms.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{sigma_alpha, GaussianInt};
use crate::hyp::{negative_axis, OracleConfig};
use crate::kernel::{h_test, omega_t, q_n, x_pm, TestFunctionSpec};
use crate::par::{self, Execution};
use crate::quad::{fixed_gauss_legendre, gauss_kronrod, gauss_legendre, integrate, QuadResult, Tolerance};
use crate::special::ln_gamma;
use crate::zagier::{zagier_l, TruncationConfig, ZagierMethod, ZagierQuery};
use crate::zeta::dedekind_zeta;

/// Largest `T` accepted by the kernel routines.
pub const MAX_T: f64 = 200.0;
/// Gaussian half-width multiple kept on each side of `+-K`.
pub const WIDTH_MULTIPLE: f64 = 8.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ln_cosh_pi(r: f64) -> f64 {
    let a = PI * r.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelForm {
    /// `F(1-s+ir, 1-s-ir, 1; -x)` against `Gamma(1-s-ir) Gamma(1-s+ir)`.
    #[default]
    Hypergeometric,
    /// `x^{-ir} Gamma(-2ir) F(1-s+ir, 1-s+ir, 1+2ir; -1/x)`, the connection form.
    Connection,
}

/// `cosh(pi r) Gamma(1-s-ir) Gamma(1-s+ir) F(1-s+ir, 1-s-ir, 1; -x)`.
pub fn density_hypergeometric(r: f64, x: f64, s: Complex64) -> Result<Complex64> {
    let a = 1.0 - s + c(0.0, r);
    let b = 1.0 - s - c(0.0, r);
    let g = (ln_cosh_pi(r) + ln_gamma(a) + ln_gamma(b)).exp();
    if x == 0.0 {
        return Ok(g);
    }
    Ok(g * negative_axis(a, b, c(1.0, 0.0), x, OracleConfig::default())?.value)
}

/// `cosh(pi r) x^{-ir} Gamma(1-s+ir) Gamma(-2ir) / Gamma(s-ir) F(1-s+ir, 1-s+ir, 1+2ir; -1/x)`
/// times `r^2`, which removes the pole at `r = 0`.
pub fn density_connection_r2(r: f64, x: f64, s: Complex64) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("the connection form needs x > 0, got {x}")));
    }
    if r == 0.0 {
        return Ok(c(0.0, 0.0));
    }
    let a = 1.0 - s + c(0.0, r);
    let cc = c(1.0, 2.0 * r);
    let lg = ln_cosh_pi(r) - c(0.0, r * x.ln()) + ln_gamma(a) + ln_gamma(c(0.0, -2.0 * r)) - ln_gamma(s - c(0.0, r));
    let f = negative_axis(a, a, cc, 1.0 / x, OracleConfig::default())?.value;
    Ok(r * r * lg.exp() * f)
}

/// `V(y, r, s) = (2 pi i)^{-1} int_(a) gamma(s+z, r)/gamma(s, r) zeta_k(2s+2z) e^{z^2} P_n(z^2) y^{-2z} dz/z`
/// with `gamma(s, r) = pi^{-3s} Gamma(s) Gamma(s+ir) Gamma(s-ir)` and
/// `P_n(w) = sum_{k<=n} w^k/k!`. The `r`-free part of the integrand is
/// stored on fixed Gauss-Legendre nodes of `|Im z| <= H`.
#[derive(Clone, Debug)]
pub struct AfeWeight {
    pub y: f64,
    pub s: Complex64,
    pub a: f64,
    pub degree: u32,
    pub height: f64,
    nodes: Vec<(Complex64, Complex64)>,
}

const AFE_PANEL: f64 = 0.25;
const AFE_ORDER: usize = 16;

impl AfeWeight {
    pub fn new(y: f64, s: Complex64, a: f64, degree: u32) -> Result<Self> {
        if !(a > 0.0 && a < 3.0) {
            return Err(Error::Domain(format!("contour abscissa must lie in (0, 3), got {a}")));
        }
        Self::on_line(y, s, a, degree, AFE_PANEL)
    }

    /// Any abscissa off the poles, and a chosen panel width.
    pub(crate) fn on_line(y: f64, s: Complex64, a: f64, degree: u32, panel: f64) -> Result<Self> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::Domain(format!("y must be positive, got {y}")));
        }
        // e^{-v^2} against the growth |gamma ratio| <~ r^{2a} up to r ~ 2000
        let height = (36.9 + a * a + 2.0 * a.abs() * 2000f64.ln()).sqrt() + 1.0;
        let panels = (2.0 * height / panel).ceil() as usize;
        let h = 2.0 * height / panels as f64;
        let (gx, gw) = gauss_legendre(AFE_ORDER);
        let mut pts = Vec::with_capacity(panels * AFE_ORDER);
        for p in 0..panels {
            let mid = -height + h * (p as f64 + 0.5);
            for (xi, wi) in gx.iter().zip(&gw) {
                pts.push((mid + 0.5 * h * xi, 0.5 * h * wi));
            }
        }
        let ln_gs = ln_gamma(s);
        let nodes = par::map(&pts, |&(v, w)| -> Result<(Complex64, Complex64)> {
            let z = c(a, v);
            let w2 = z * z;
            let mut poly = c(1.0, 0.0);
            let mut term = c(1.0, 0.0);
            for k in 1..=degree {
                term *= w2 / k as f64;
                poly += term;
            }
            let zeta = dedekind_zeta(2.0 * s + 2.0 * z)?;
            let ln_part = -3.0 * z * PI.ln() + ln_gamma(s + z) - ln_gs + w2 - 2.0 * z * y.ln();
            Ok((z, ln_part.exp() * zeta * poly / z * (w / (2.0 * PI))))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(AfeWeight { y, s, a, degree, height, nodes })
    }

    pub fn at(&self, r: f64) -> Complex64 {
        let ir = c(0.0, r);
        let base = ln_gamma(self.s + ir) + ln_gamma(self.s - ir);
        let terms: Vec<Complex64> = self
            .nodes
            .iter()
            .map(|&(z, w)| w * (ln_gamma(self.s + z + ir) + ln_gamma(self.s + z - ir) - base).exp())
            .collect();
        par::pairwise_sum(&terms)
    }
}

pub fn afe_weight_v(y: f64, r: f64, s: Complex64, a: f64, poly_degree: u32) -> Result<Complex64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("r must be non-negative, got {r}")));
    }
    Ok(AfeWeight::new(y, s, a, poly_degree)?.at(r))
}

/// The even spectral weight the kernel integral is taken against, with the
/// `r`-range outside which it is negligible.
#[derive(Clone, Copy, Debug)]
pub enum Profile<'a> {
    /// `h(r)`.
    Single(&'a TestFunctionSpec),
    /// `q_N(r) (omega_T(r) + omega_T(-r))`, the K-average of `h`.
    Averaged(&'a TestFunctionSpec),
}

impl Profile<'_> {
    pub fn at(&self, r: f64) -> Complex64 {
        match *self {
            Profile::Single(spec) => h_test(c(r, 0.0), spec),
            Profile::Averaged(spec) => q_n(c(r, 0.0), spec.n) * (omega_t(r, spec.t, spec.g) + omega_t(-r, spec.t, spec.g)),
        }
    }

    pub fn r_max(&self) -> f64 {
        match *self {
            Profile::Single(spec) => spec.k.abs() + WIDTH_MULTIPLE * spec.g,
            Profile::Averaged(spec) => 2.0 * spec.t + WIDTH_MULTIPLE * spec.g,
        }
    }

    fn spec(&self) -> &TestFunctionSpec {
        match self {
            Profile::Single(s) | Profile::Averaged(s) => s,
        }
    }
}

fn check_spec(spec: &TestFunctionSpec) -> Result<()> {
    if spec.t > MAX_T {
        return Err(Error::Domain(format!("T = {} exceeds the desk-scale limit {MAX_T}", spec.t)));
    }
    Ok(())
}

/// Runs a fallible integrand through the infallible quadrature, keeping the
/// first failure.
struct Failure(Mutex<Option<Error>>);

impl Failure {
    fn new() -> Self {
        Failure(Mutex::new(None))
    }

    fn wrap(&self, v: Result<Complex64>) -> Complex64 {
        match v {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.0.lock().expect("failure slot");
                slot.get_or_insert(e);
                c(f64::NAN, 0.0)
            }
        }
    }

    fn check<T>(&self, r: Result<T>) -> Result<T> {
        match self.0.lock().expect("failure slot").take() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

/// `int r^2 w(r) cosh(pi r) |Gamma(1-s+ir)|^2 dr` over `[0, R]`, the scale the
/// quadrature tolerance is measured against.
fn l1_scale(w: &(dyn Fn(f64) -> Complex64 + Sync), s: Complex64, r_max: f64) -> f64 {
    let f = |r: f64| {
        let a = 1.0 - s + c(0.0, r);
        let b = 1.0 - s - c(0.0, r);
        let g = (ln_cosh_pi(r) + ln_gamma(a) + ln_gamma(b)).exp().norm();
        c(r * r * w(r).norm() * g, 0.0)
    };
    fixed_gauss_legendre(f, 0.0, r_max, 16, (r_max / 4.0).ceil() as usize).re
}

fn tolerance(scale: f64, eps: f64) -> Tolerance {
    Tolerance { abs: eps * scale.max(1e-300), rel: eps * 10.0, max_intervals: 4000 }
}

/// Relative accuracy (against the `L1` scale) of a standalone kernel integral.
const KERNEL_EPS: f64 = 1e-11;
/// The same inside the `tau`-integrals of the explicit terms.
const NESTED_EPS: f64 = 1e-9;

/// `int r^2 w(r) D(r, x) dr` over the whole line, `D` being the density of the
/// chosen form; `w` must be even.
pub fn spectral_integral(
    form: KernelForm,
    x: f64,
    s: Complex64,
    w: &(dyn Fn(f64) -> Complex64 + Sync),
    r_max: f64,
    exec: Execution,
) -> Result<QuadResult> {
    spectral_integral_eps(form, x, s, w, r_max, exec, KERNEL_EPS)
}

fn spectral_integral_eps(
    form: KernelForm,
    x: f64,
    s: Complex64,
    w: &(dyn Fn(f64) -> Complex64 + Sync),
    r_max: f64,
    exec: Execution,
    eps: f64,
) -> Result<QuadResult> {
    let tol = tolerance(l1_scale(w, s, r_max), eps);
    let failure = Failure::new();
    let res = match form {
        KernelForm::Hypergeometric => {
            let f = |r: f64| failure.wrap(density_hypergeometric(r, x, s).map(|d| r * r * w(r) * d));
            let panels = (r_max / 8.0).ceil() as usize;
            integrate(exec, f, 0.0, r_max, panels, Tolerance { abs: tol.abs / 2.0, ..tol })
                .map(|q| QuadResult { value: 2.0 * q.value, error: 2.0 * q.error, ..q })
        }
        KernelForm::Connection => {
            let f = |r: f64| failure.wrap(density_connection_r2(r, x, s).map(|d| w(r) * d));
            let panels = (r_max / 4.0).ceil() as usize;
            integrate(exec, f, -r_max, r_max, panels, tol)
        }
    };
    failure.check(res)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub x_plus: f64,
    pub x_minus: f64,
    pub plus: Complex64,
    pub minus: Complex64,
    pub error: f64,
}

/// `I_+-(z, y, s) = (1-y^2)^{s-1} int r^2 w(r) cosh(pi r) Gamma(1-s-ir) Gamma(1-s+ir) F(..; -x_+-) dr`,
/// in the form 1 representation, or its connection-form equivalent
/// `2 (x (1-y^2))^{s-1} int r^2 w(r) cosh(pi r) x^{-ir} ... dr`.
pub fn kernel_branches(
    form: KernelForm,
    z: Complex64,
    y: f64,
    s: Complex64,
    profile: Profile<'_>,
    v: Option<&AfeWeight>,
    exec: Execution,
) -> Result<KernelValue> {
    check_spec(profile.spec())?;
    if !(0.0..1.0).contains(&y) {
        return Err(Error::Domain(format!("y must lie in [0, 1), got {y}")));
    }
    let (x_plus, x_minus) = x_pm(z, y);
    let w = |r: f64| match v {
        Some(v) => profile.at(r) * v.at(r.abs()),
        None => profile.at(r),
    };
    let one_minus = 1.0 - y * y;
    let branch = |x: f64| -> Result<(Complex64, f64)> {
        let q = spectral_integral(form, x, s, &w, profile.r_max(), exec)?;
        let pre = match form {
            KernelForm::Hypergeometric => c(one_minus, 0.0).powc(s - 1.0),
            KernelForm::Connection => 2.0 * c(x * one_minus, 0.0).powc(s - 1.0),
        };
        Ok((pre * q.value, pre.norm() * q.error))
    };
    let (plus, e1) = branch(x_plus)?;
    let (minus, e2) = if z == c(0.0, 0.0) { (plus, e1) } else { branch(x_minus)? };
    Ok(KernelValue { x_plus, x_minus, plus, minus, error: e1 + e2 })
}

/// Both branches of `I(z, y, s)` for the test function `h`, optionally with
/// the weight `V`.
pub fn kernel_i(z: Complex64, y: f64, s: Complex64, spec: &TestFunctionSpec, v: Option<&AfeWeight>) -> Result<KernelValue> {
    kernel_branches(KernelForm::Hypergeometric, z, y, s, Profile::Single(spec), v, Execution::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragedKernel {
    /// `(G sqrt pi)^{-1} int_T^{2T} I dK` by a 128-point rule in `K`.
    pub plus: Complex64,
    pub minus: Complex64,
    /// Change between the 64- and 128-point rules.
    pub k_error: f64,
    /// The same average as a single integral against `omega_T`.
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    pub omega_error: f64,
    pub x_plus: f64,
    pub x_minus: f64,
}

const R_ORDER: usize = 24;

/// Composite Gauss-Legendre nodes on `[0, R]` fine enough for the
/// oscillation of `F(..; -x)` in `r` (frequency about `2 asinh(sqrt x)`).
fn r_nodes(x: f64, r_max: f64) -> Vec<(f64, f64)> {
    let freq = 2.0 * x.sqrt().asinh() + 1.0;
    let width = (2.0 * PI / freq).min(8.0);
    let panels = (r_max / width).ceil() as usize;
    let h = r_max / panels as f64;
    let (gx, gw) = gauss_legendre(R_ORDER);
    let mut out = Vec::with_capacity(panels * R_ORDER);
    for p in 0..panels {
        let mid = h * (p as f64 + 0.5);
        for (xi, wi) in gx.iter().zip(&gw) {
            out.push((mid + 0.5 * h * xi, 0.5 * h * wi));
        }
    }
    out
}

/// `I` at each `K` from tabulated `r^2 q_N(r) D(r)` on fixed nodes.
fn k_average(table: &[(f64, f64, Complex64)], spec: &TestFunctionSpec, k_rule: usize, panels: usize) -> Complex64 {
    let g2 = spec.g * spec.g;
    let at_k = |k: f64| {
        let terms: Vec<Complex64> = table
            .iter()
            .map(|&(r, w, d)| d * (w * ((-(r - k) * (r - k) / g2).exp() + (-(r + k) * (r + k) / g2).exp())))
            .collect();
        2.0 * par::pairwise_sum(&terms)
    };
    fixed_gauss_legendre(at_k, spec.t, 2.0 * spec.t, k_rule, panels) / (spec.g * PI.sqrt())
}

/// `J_+-(n/l, y, T)`: the K-average of `I_+-` over `[T, 2T]` with weight
/// `(G sqrt pi)^{-1}`. `spec.k` is ignored.
pub fn kernel_j_avg(n: GaussianInt, l: GaussianInt, y: f64, s: Complex64, spec: &TestFunctionSpec) -> Result<AveragedKernel> {
    kernel_j_avg_with(n, l, y, s, spec, Execution::default())
}

pub fn kernel_j_avg_with(
    n: GaussianInt,
    l: GaussianInt,
    y: f64,
    s: Complex64,
    spec: &TestFunctionSpec,
    exec: Execution,
) -> Result<AveragedKernel> {
    let point = crate::kernel::kernel_point(n, l, y)?;
    check_spec(spec)?;
    let profile = Profile::Averaged(spec);
    let r_max = profile.r_max();
    let pre = c(1.0 - y * y, 0.0).powc(s - 1.0);
    let by_k = |x: f64| -> Result<(Complex64, f64)> {
        let nodes = r_nodes(x, r_max);
        let table = par::map_with(exec, &nodes, |&(r, w)| {
            density_hypergeometric(r, x, s).map(|d| (r, w, d * r * r * q_n(c(r, 0.0), spec.n)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let coarse = k_average(&table, spec, 64, 1);
        let fine = k_average(&table, spec, 64, 2);
        Ok((pre * fine, (pre * (fine - coarse)).norm()))
    };
    let (plus, ep) = by_k(point.x_plus)?;
    let (minus, em) = if point.z == c(0.0, 0.0) { (plus, ep) } else { by_k(point.x_minus)? };
    let omega = kernel_branches(KernelForm::Hypergeometric, point.z, y, s, profile, None, exec)?;
    Ok(AveragedKernel {
        plus,
        minus,
        k_error: ep + em,
        omega_plus: omega.plus,
        omega_minus: omega.minus,
        omega_error: omega.error,
        x_plus: point.x_plus,
        x_minus: point.x_minus,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermValue {
    pub value: Complex64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitTerms {
    pub mt: Result<TermValue>,
    pub ct: Result<TermValue>,
    pub et: Result<TermValue>,
    pub sigma0: Result<TermValue>,
    pub sigma2: Result<TermValue>,
}

fn check_strip(s: Complex64, what: &str) -> Result<()> {
    if !(s.re >= 0.5 && s.re < 1.0) {
        return Err(Error::Domain(format!("{what} needs 1/2 <= Re s < 1, got {s}")));
    }
    Ok(())
}

fn term_tolerance() -> Tolerance {
    Tolerance { abs: 0.0, rel: 1e-10, max_intervals: 4000 }
}

/// `4 zeta_k(2s) / (pi^2 |l|^{2s}) int r^2 h(r) tanh(pi r) dr`.
pub fn main_term(l: GaussianInt, s: Complex64, spec: &TestFunctionSpec) -> Result<TermValue> {
    check_strip(s, "MT")?;
    let zeta = dedekind_zeta(2.0 * s)?;
    let r_max = spec.k.abs() + WIDTH_MULTIPLE * spec.g;
    let f = |r: f64| r * r * h_test(c(r, 0.0), spec) * (PI * r).tanh();
    let scale = fixed_gauss_legendre(|r| c((r * r * h_test(c(r, 0.0), spec)).norm(), 0.0), 0.0, r_max, 16, 64).re;
    // the integrand is odd for even h, so only an absolute target is meaningful
    let tol = Tolerance { abs: 1e-10 * scale, ..term_tolerance() };
    let q = integrate(Execution::default(), f, -r_max, r_max, 16, tol)?;
    let pre = 4.0 * zeta / (PI * PI) * c(l.norm() as f64, 0.0).powc(-s);
    Ok(TermValue { value: pre * q.value, error: pre.norm() * q.error })
}

/// `-8 pi zeta_k(s) int h(r) sigma_{ir}(l^2) |l|^{-2ir} zeta_k(s+ir) zeta_k(s-ir) / (zeta_k(1+ir) zeta_k(1-ir)) dr`
/// over `|r| <= K + 8G`.
pub fn continuous_term(l: GaussianInt, s: Complex64, spec: &TestFunctionSpec) -> Result<TermValue> {
    check_strip(s, "CT")?;
    if l.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let l2 = l * l;
    let ln_norm = (l.norm() as f64).ln();
    let r_max = spec.k.abs() + WIDTH_MULTIPLE * spec.g;
    let density = |r: f64| -> Result<Complex64> {
        if r == 0.0 {
            return Ok(c(0.0, 0.0));
        }
        let ir = c(0.0, r);
        let sig = sigma_alpha(l2, ir)? * (-ir * ln_norm).exp();
        let num = dedekind_zeta(s + ir)? * dedekind_zeta(s - ir)?;
        let den = dedekind_zeta(1.0 + ir)? * dedekind_zeta(1.0 - ir)?;
        Ok(h_test(c(r, 0.0), spec) * sig * num / den)
    };
    let failure = Failure::new();
    let f = |r: f64| failure.wrap(density(r));
    let scale = fixed_gauss_legendre(|r| c(h_test(c(r, 0.0), spec).norm(), 0.0), 0.0, r_max, 16, 64).re;
    let tol = Tolerance { abs: 1e-12 * scale, ..term_tolerance() };
    let q = failure.check(integrate(Execution::default(), f, -r_max, r_max, (r_max / 4.0).ceil() as usize, tol))?;
    let pre = -8.0 * PI * dedekind_zeta(s)?;
    Ok(TermValue { value: pre * q.value, error: pre.norm() * q.error })
}

/// `-16 pi^2 h(i(s-1)) zeta_k(2s-1)/zeta_k(2-s) (sigma_{1-s}(l^2)/|l|^{2-2s} + sigma_{s-1}(l^2)/|l|^{2s-2})`.
pub fn exceptional_term(l: GaussianInt, s: Complex64, spec: &TestFunctionSpec) -> Result<TermValue> {
    check_strip(s, "ET")?;
    if l.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let hv = h_test(c(0.0, 1.0) * (s - 1.0), spec);
    if hv == c(0.0, 0.0) {
        return Ok(TermValue { value: hv, error: 0.0 });
    }
    let l2 = l * l;
    let nl = c(l.norm() as f64, 0.0);
    let one = c(1.0, 0.0);
    let sig = sigma_alpha(l2, one - s)? / nl.powc(one - s) + sigma_alpha(l2, s - one)? / nl.powc(s - one);
    let value = -16.0 * PI * PI * hv * dedekind_zeta(2.0 * s - 1.0)? / dedekind_zeta(2.0 - s)? * sig;
    Ok(TermValue { value, error: 1e-14 * value.norm() })
}

/// `int r^2 h(r) D(r, x) dr` with `D` the hypergeometric density; for
/// `x > 1` through the connection form, whose argument is then `-1/x`.
fn base_integral(x: f64, s: Complex64, spec: &TestFunctionSpec) -> Result<QuadResult> {
    let profile = Profile::Single(spec);
    let w = |r: f64| profile.at(r);
    if x <= 1.0 {
        return spectral_integral_eps(KernelForm::Hypergeometric, x, s, &w, profile.r_max(), Execution::default(), NESTED_EPS);
    }
    let q = spectral_integral_eps(KernelForm::Connection, x, s, &w, profile.r_max(), Execution::default(), NESTED_EPS)?;
    let pre = 2.0 * c(x, 0.0).powc(s - 1.0);
    Ok(QuadResult { value: pre * q.value, error: pre.norm() * q.error, ..q })
}

/// Smallest `pi/2 - tau` kept in the `tau`-integrals.
const TAU_GAP: f64 = 1e-8;

/// `int_0^{pi/2} g(tau) dtau` for `g` carrying a `cos^{2s-2} tau` factor; the
/// endpoint is resolved by `pi/2 - tau = w^m`.
fn tau_integral(s: Complex64, g: &(dyn Fn(f64) -> Result<Complex64> + Sync)) -> Result<TermValue> {
    let tol = Tolerance { abs: 0.0, rel: 1e-6, max_intervals: 60 };
    let failure = Failure::new();
    let head = failure.check(gauss_kronrod(|t| failure.wrap(g(t)), 0.0, FRAC_PI_4, tol))?;
    let m = if s.re < 1.0 { (1.0 / (2.0 * s.re - 1.0)).min(8.0) } else { 1.0 };
    let tail_fn = |w: f64| {
        let u = w.powf(m);
        failure.wrap(g(FRAC_PI_2 - u).map(|v| v * m * w.powf(m - 1.0)))
    };
    // the tail may be tiny next to the head
    let tail_tol = Tolerance { abs: 1e-7 * head.value.norm(), ..tol };
    let tail = failure.check(gauss_kronrod(tail_fn, TAU_GAP.powf(1.0 / m), FRAC_PI_4.powf(1.0 / m), tail_tol))?;
    // the dropped end piece, with g ~ u^{2s-2} there
    let dropped = g(FRAC_PI_2 - TAU_GAP).map(|v| v.norm() * TAU_GAP / (2.0 * s.re - 1.0)).unwrap_or(f64::INFINITY);
    Ok(TermValue { value: head.value + tail.value, error: head.error + tail.error + dropped })
}

/// `8 (2 pi)^{2s-1} / (pi^2 |l|^{2-2s}) L_k(s; -4l^2) int_0^{pi/2} I(0, tau, s) dtau`, `Re s > 1`.
pub fn sigma0_term(l: GaussianInt, s: Complex64, spec: &TestFunctionSpec) -> Result<TermValue> {
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("Sigma0 needs Re s > 1, got {s}")));
    }
    check_spec(spec)?;
    let d = -(l * l).scale(4);
    let query = ZagierQuery::new(s, d, TruncationConfig::default())?;
    let lv = if s.im == 0.0 {
        zagier_l(&query.with_method(ZagierMethod::EulerProduct))?
    } else {
        zagier_l(&query)?
    };
    let g = |tau: f64| -> Result<Complex64> {
        let cs = tau.cos();
        let x = tau.tan().powi(2);
        // both branches coincide at z = 0
        Ok(c(cs, 0.0).powc(2.0 * s - 2.0) * base_integral(x, s, spec)?.value / 8.0)
    };
    let tau = tau_integral(s, &g)?;
    let pre = 8.0 * c(2.0 * PI, 0.0).powc(2.0 * s - 1.0) / (PI * PI) * c(l.norm() as f64, 0.0).powc(s - 1.0);
    let value = pre * lv.value * tau.value;
    let error = (pre * lv.value).norm() * tau.error + (pre * tau.value).norm() * lv.tail_bound;
    Ok(TermValue { value, error })
}

/// `32 (2 pi)^{2s-1} zeta_k(2s-1) / (pi^2 |l|^{2-2s}) int_0^{pi/2} sum_+- I(+-2, tau, s) dtau`, `Re s > 1/2`.
pub fn sigma2_term(l: GaussianInt, s: Complex64, spec: &TestFunctionSpec) -> Result<TermValue> {
    if !(s.re > 0.5) {
        return Err(Error::Domain(format!("Sigma2 needs Re s > 1/2, got {s}")));
    }
    check_spec(spec)?;
    let zeta = dedekind_zeta(2.0 * s - 1.0)?;
    let g = |tau: f64| -> Result<Complex64> {
        let (sn, cs) = tau.sin_cos();
        // x_+-(2, tau) = (1 +- sin tau)^2 / cos^2 tau; z = -2 swaps them
        let xp = (1.0 + sn) * (1.0 + sn) / (cs * cs);
        let xm = cs * cs / ((1.0 + sn) * (1.0 + sn));
        let sum = base_integral(xp, s, spec)?.value + base_integral(xm, s, spec)?.value;
        Ok(c(cs, 0.0).powc(2.0 * s - 2.0) * sum / 8.0)
    };
    let tau = tau_integral(s, &g)?;
    let pre = 32.0 * c(2.0 * PI, 0.0).powc(2.0 * s - 1.0) * zeta / (PI * PI) * c(l.norm() as f64, 0.0).powc(s - 1.0);
    Ok(TermValue { value: pre * tau.value, error: pre.norm() * tau.error })
}

pub fn explicit_terms(l: GaussianInt, s: Complex64, spec: &TestFunctionSpec) -> Result<ExplicitTerms> {
    if !(l.re > 0 && l.im >= 0) {
        return Err(Error::Domain(format!("l = {l} must be nonzero in the first quadrant")));
    }
    check_spec(spec)?;
    Ok(ExplicitTerms {
        mt: main_term(l, s, spec),
        ct: continuous_term(l, s, spec),
        et: exceptional_term(l, s, spec),
        sigma0: sigma0_term(l, s, spec),
        sigma2: sigma2_term(l, s, spec),
    })
}
