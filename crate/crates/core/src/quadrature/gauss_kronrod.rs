//! Globally adaptive 21-point Gauss-Kronrod integration in the style of
//! QUADPACK's `qag`, with support for integrands that carry their own
//! error estimates (nested integrals).

use std::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_626_368_729,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// A sampled integrand value with an absolute error attached to it.
pub type Sample = (f64, f64);

#[derive(Clone, Copy, Debug)]
pub(crate) struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn qk21(f: &mut dyn FnMut(f64) -> Result<Sample>, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [0.0f64; 21];
    let mut nested = 0.0;
    let mut eval = |x: f64, w: f64| -> Result<f64> {
        let (v, e) = f(x)?;
        if !v.is_finite() || !e.is_finite() {
            return Err(Error::NonFinite);
        }
        nested += w * e;
        Ok(v)
    };
    fv[10] = eval(center, WGK[10])?;
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[j] = eval(center - dx, WGK[j])?;
        fv[20 - j] = eval(center + dx, WGK[j])?;
    }
    let mut resk = WGK[10] * fv[10];
    let mut resg = 0.0;
    let mut resabs = WGK[10] * fv[10].abs();
    for j in 0..10 {
        let pair = fv[j] + fv[20 - j];
        resk += WGK[j] * pair;
        resabs += WGK[j] * (fv[j].abs() + fv[20 - j].abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fv[10] - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[20 - j] - mean).abs());
    }
    let h = half.abs();
    let value = resk * half;
    let resabs = resabs * h;
    let resasc = resasc * h;
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel { a, b, value, error: err + nested * h, abs: resabs })
}

/// Result of an adaptive run. `converged` is false when the subdivision
/// budget ran out before the tolerance was met.
#[derive(Clone, Copy, Debug)]
pub struct Outcome {
    pub value: f64,
    pub error: f64,
    pub abs_value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Outcome {
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { value: self.value, error: self.error })
        }
    }
}

/// Integrates over consecutive panels `[breaks[i], breaks[i+1]]`, always
/// bisecting the panel with the largest error. The target is
/// `error <= max(abs_tol, rel_tol * integral of |f|)`.
pub fn adaptive(
    f: &mut dyn FnMut(f64) -> Result<Sample>,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Outcome> {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(qk21(f, w[0], w[1])?);
            evaluations += 21;
        }
    }
    let mut subdivisions = 0;
    loop {
        let (mut value, mut error, mut abs) = (0.0, 0.0, 0.0);
        for p in heap.iter().chain(frozen.iter()) {
            value += p.value;
            error += p.error;
            abs += p.abs;
        }
        let target = abs_tol.max(rel_tol * abs);
        if error <= target || heap.is_empty() || subdivisions >= max_subdivisions {
            let converged = error <= target;
            return Ok(Outcome { value, error, abs_value: abs, evaluations, converged });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let scale = worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
        if worst.b - worst.a <= 1e3 * f64::EPSILON * scale || mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        heap.push(qk21(f, worst.a, mid)?);
        heap.push(qk21(f, mid, worst.b)?);
        evaluations += 42;
        subdivisions += 1;
    }
}

/// Where a graded node sits inside `[a, b]`: the coordinate and its distances
/// to both endpoints, each computed without cancellation.
#[derive(Clone, Copy, Debug)]
pub struct Node {
    pub x: f64,
    pub from_lo: f64,
    pub from_hi: f64,
}

pub(crate) const GRADING: i32 = 4;

/// Integrates `f` over `[a, b]` after the substitutions `x = a + h v^4` on the
/// left half and `x = b - h v^4` on the right half, `h = (b - a)/2`. Power and
/// logarithmic endpoint singularities become mild in `v`.
pub fn graded(
    f: &mut dyn FnMut(Node) -> Result<Sample>,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Outcome> {
    let width = b - a;
    let h = 0.5 * width;
    let mut g = |v: f64| -> Result<Sample> {
        let d = h * v.powi(GRADING);
        let jac = h * GRADING as f64 * v.powi(GRADING - 1);
        if jac == 0.0 {
            return Ok((0.0, 0.0));
        }
        let (l, le) = f(Node { x: a + d, from_lo: d, from_hi: width - d })?;
        let (r, re) = f(Node { x: b - d, from_lo: width - d, from_hi: d })?;
        Ok((jac * (l + r), jac * (le + re)))
    };
    adaptive(&mut g, &[0.0, 1.0], rel_tol, abs_tol, max_subdivisions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plain(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<Sample> {
        move |x| Ok((f(x), 0.0))
    }

    #[test]
    fn polynomial_is_exact_on_one_panel() {
        let out = adaptive(&mut plain(|x| x.powi(12)), &[0.0, 1.0], 1e-13, 0.0, 10).unwrap();
        assert_relative_eq!(out.value, 1.0 / 13.0, max_relative = 1e-14);
        assert!(out.converged);
        assert_eq!(out.evaluations, 21);
    }

    #[test]
    fn breakpoints_cover_all_panels() {
        let out = adaptive(&mut plain(|x| x.abs()), &[-1.0, 0.0, 2.0], 1e-12, 0.0, 50).unwrap();
        assert_relative_eq!(out.value, 2.5, max_relative = 1e-13);
    }

    #[test]
    fn graded_handles_endpoint_singularities() {
        let mut f = |n: Node| Ok((n.from_hi.powf(-0.9) * n.from_lo.ln().abs(), 0.0));
        let out = graded(&mut f, 0.0, 1.0, 1e-10, 0.0, 500).unwrap();
        // integral of (1-x)^{s-1}(-ln x) over (0,1) is (psi(1+s) - psi(1))/s = sum_k 1/(k(k+s))
        let n = 2_000_000;
        let mut series: f64 = (1..n).map(|k| 1.0 / (k as f64 * (k as f64 + 0.1))).sum();
        series += 1.0 / n as f64;
        assert_relative_eq!(out.value, series, max_relative = 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut f = plain(|x: f64| (1.0 / x).sin() / x);
        let out = adaptive(&mut f, &[1e-6, 1.0], 1e-14, 0.0, 3).unwrap();
        assert!(!out.converged);
        assert!(matches!(out.into_result(), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn non_finite_values_are_errors() {
        let mut f = plain(|_| f64::NAN);
        assert_eq!(adaptive(&mut f, &[0.0, 1.0], 1e-8, 0.0, 10).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn nested_errors_are_propagated() {
        let mut f = |_x: f64| Ok((1.0, 1e-3));
        let out = adaptive(&mut f, &[0.0, 2.0], 1e-2, 0.0, 10).unwrap();
        assert_relative_eq!(out.value, 2.0, max_relative = 1e-14);
        assert!(out.error >= 2e-3 * 0.999);
    }
}
