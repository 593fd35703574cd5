//! Quadrature: adaptive Gauss-Kronrod (7/15) and fixed Gauss-Legendre rules
//! for complex-valued integrands on finite intervals.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::{self, Execution};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-9, rel: 1e-10, max_intervals: 2000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Piece {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let fc = f(m);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(m - x) + f(m + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let error = ((k - g) * h).norm();
    Piece { a, b, value: k * h, error }
}

/// Adaptive Gauss-Kronrod on `[a, b]`, bisecting the worst interval until
/// the summed error estimate meets `max(abs, rel |I|)`.
pub fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    heap.push(kronrod(&f, a, b));
    loop {
        let value: Complex64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::Precision("non-finite integrand".into()));
        }
        if error <= tol.abs.max(tol.rel * value.norm()) {
            let (value, intervals) = sum_in_order(heap);
            return Ok(QuadResult { value, error, intervals });
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Precision(format!(
                "quadrature did not converge on [{a}, {b}]: error {error:.3e} after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// Sums pieces in left-to-right order so results do not depend on heap layout.
fn sum_in_order(heap: BinaryHeap<Piece>) -> (Complex64, usize) {
    let mut v = heap.into_vec();
    v.sort_by(|p, q| p.a.total_cmp(&q.a));
    let n = v.len();
    let vals: Vec<Complex64> = v.into_iter().map(|p| p.value).collect();
    (par::pairwise_sum(&vals), n)
}

/// Splits `[a, b]` into `panels` equal pieces and integrates each adaptively,
/// in parallel when `exec` allows. Per-panel absolute tolerance is `tol.abs /
/// panels`; panel results are summed in order and the summed error is
/// checked against `max(abs, rel * sum |panel|)`.
pub fn integrate<F>(exec: Execution, f: F, a: f64, b: f64, panels: usize, tol: Tolerance) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let bounds: Vec<(f64, f64)> = (0..panels)
        .map(|k| (a + h * k as f64, if k + 1 == panels { b } else { a + h * (k + 1) as f64 }))
        .collect();
    let sub = Tolerance { abs: tol.abs / panels as f64, ..tol };
    let parts = par::map_with(exec, &bounds, |&(lo, hi)| gauss_kronrod(&f, lo, hi, sub));
    let mut values = Vec::with_capacity(panels);
    let mut error = 0.0;
    let mut intervals = 0;
    for p in parts {
        let p = p?;
        values.push(p.value);
        error += p.error;
        intervals += p.intervals;
    }
    let value = par::pairwise_sum(&values);
    // panels meet their own relative targets, so the bound scales with their sizes
    let mass: f64 = values.iter().map(|v| v.norm()).sum();
    if error > tol.abs.max(tol.rel * mass) {
        return Err(Error::Precision(format!("panel quadrature error {error:.3e} exceeds tolerance")));
    }
    Ok(QuadResult { value, error, intervals })
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite fixed Gauss-Legendre rule with `panels` equal pieces.
pub fn fixed_gauss_legendre<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize, panels: usize) -> Complex64 {
    let (x, w) = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    let mut parts = Vec::with_capacity(panels);
    for k in 0..panels {
        let lo = a + h * k as f64;
        let m = lo + 0.5 * h;
        let s: Complex64 = x.iter().zip(&w).map(|(&xi, &wi)| f(m + 0.5 * h * xi) * wi).sum();
        parts.push(s * (0.5 * h));
    }
    par::pairwise_sum(&parts)
}
