//! Integration engines: graded adaptive quadrature on `(0, 1)`, sphere and
//! ball integrals through slice reduction, and a seeded Monte Carlo fallback.

mod disk;
pub mod gauss_kronrod;
pub mod montecarlo;

use core::cell::Cell;

use crate::error::{invalid, Result};
use crate::geometry::{CPoint, C64};
pub(crate) use disk::{ball_slice_weight, circle_mean, disk_integral};
pub use gauss_kronrod::{Node, Sample};
use gauss_kronrod::graded;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// ChaCha stream for Monte Carlo draws; sweeps set it to the row index.
    pub stream: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_subdivisions: 2000, mc_samples: 200_000, seed: 0, stream: 0 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol must be positive"));
        }
        if self.mc_samples < 1000 {
            return Err(invalid("mc_samples must be at least 1000"));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("max_subdivisions must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    Adaptive,
    SliceReduced,
    MonteCarlo,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Adaptive => "adaptive",
            Method::SliceReduced => "slice-reduced",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub method: Method,
}

fn finish(out: gauss_kronrod::Outcome, method: Method) -> Result<IntegrationResult> {
    let out = out.into_result()?;
    Ok(IntegrationResult {
        value: out.value,
        error_estimate: out.error,
        evaluations: out.evaluations,
        method,
    })
}

/// `int_0^1 f(r) dr` for integrands with power or logarithmic singularities
/// at either endpoint.
pub fn integrate_radial(f: &dyn Fn(f64) -> f64, cfg: &QuadConfig) -> Result<IntegrationResult> {
    integrate_radial_gap(&|r, _| f(r), cfg)
}

/// Like [`integrate_radial`], but `f` also receives `1 - r` computed without
/// cancellation, which matters when the singularity sits at `r = 1`.
pub fn integrate_radial_gap(
    f: &dyn Fn(f64, f64) -> f64,
    cfg: &QuadConfig,
) -> Result<IntegrationResult> {
    cfg.validate()?;
    let mut g = |node: Node| Ok((f(node.x, node.from_hi), 0.0));
    finish(graded(&mut g, 0.0, 1.0, cfg.rel_tol, 0.0, cfg.max_subdivisions)?, Method::Adaptive)
}

/// `(1/pi) int_D h(lambda) W(1 - |lambda|^2) dA(lambda)` with `W` given as a
/// function of the gap. Peaks of `h` near the circle are announced by angle.
pub fn integrate_slice(
    weight: &dyn Fn(f64) -> Result<f64>,
    h: &dyn Fn(C64) -> f64,
    peaks: &[f64],
    cfg: &QuadConfig,
) -> Result<IntegrationResult> {
    cfg.validate()?;
    finish(
        disk_integral(weight, h, peaks, cfg.rel_tol, cfg.max_subdivisions)?,
        Method::SliceReduced,
    )
}

/// `(1/2pi) int h(e^{i theta}) d theta` with peaks announced by angle.
pub fn circle_average(
    h: &dyn Fn(C64) -> f64,
    peaks: &[f64],
    cfg: &QuadConfig,
) -> Result<IntegrationResult> {
    cfg.validate()?;
    finish(
        circle_mean(h, 1.0, peaks, cfg.rel_tol, 0.0, cfg.max_subdivisions)?,
        Method::SliceReduced,
    )
}

/// A unit vector `e` with the given point on the line `C e`, and a unit
/// vector orthogonal to it (absent when `n = 1`).
fn slice_frame(base: &CPoint, n: usize) -> Result<(CPoint, Option<CPoint>)> {
    if base.dim() != n {
        return Err(crate::Error::DimensionMismatch { left: base.dim(), right: n });
    }
    let e = base.normalized().unwrap_or_else(|| CPoint::basis(n, 0));
    if n == 1 {
        return Ok((e, None));
    }
    let j = (0..n)
        .min_by(|&i, &k| e.coords()[i].norm().total_cmp(&e.coords()[k].norm()))
        .unwrap_or(0);
    let b = CPoint::basis(n, j);
    let perp = b.sub(&e.scale(b.inner(&e)?))?;
    let perp = perp.normalized().ok_or_else(|| invalid("degenerate slice frame"))?;
    Ok((e, Some(perp)))
}

fn lift(e: &CPoint, perp: Option<&CPoint>, lambda: C64, t: f64) -> CPoint {
    let on_line = e.scale(lambda);
    match perp {
        Some(p) if t > 0.0 => on_line.add(&p.scale(C64::new(t, 0.0))).expect("same dimension"),
        _ => on_line,
    }
}

/// Integral over the unit sphere against the normalized surface measure.
/// With `slice_base = Some(w)`, `f` must depend on `xi` only through `<xi, w>`
/// and the integral is reduced to the disk (`n >= 2`) or the circle (`n = 1`).
/// Without it, Monte Carlo is used.
pub fn integrate_sphere(
    f: &dyn Fn(&CPoint) -> f64,
    n: usize,
    cfg: &QuadConfig,
    slice_base: Option<&CPoint>,
) -> Result<IntegrationResult> {
    cfg.validate()?;
    check_dim(n)?;
    let Some(base) = slice_base else {
        return montecarlo::mc_mean(f, montecarlo::sample_sphere, n, cfg);
    };
    let (e, perp) = slice_frame(base, n)?;
    if n == 1 {
        let h = |lambda: C64| f(&e.scale(lambda));
        return circle_average(&h, &[0.0], cfg);
    }
    let h = |lambda: C64| {
        let t = (1.0 - lambda.norm_sqr()).max(0.0).sqrt();
        f(&lift(&e, perp.as_ref(), lambda, t))
    };
    let nf = n as f64;
    let weight = |x: f64| Ok((nf - 1.0) * x.powf(nf - 2.0));
    integrate_slice(&weight, &h, &[0.0], cfg)
}

/// Integral over the unit ball against the normalized volume measure. With
/// `slice_base = Some(w)`, `f` must depend on `z` only through `<z, w>` and
/// `|z|`; the sphere at each radius is reduced to the disk.
pub fn integrate_ball(
    f: &dyn Fn(&CPoint) -> f64,
    n: usize,
    cfg: &QuadConfig,
    slice_base: Option<&CPoint>,
) -> Result<IntegrationResult> {
    cfg.validate()?;
    check_dim(n)?;
    let Some(base) = slice_base else {
        return montecarlo::mc_mean(f, montecarlo::sample_ball, n, cfg);
    };
    let (e, perp) = slice_frame(base, n)?;
    let one = |_x: f64| Ok(1.0);
    if n == 1 {
        let h = |lambda: C64| f(&e.scale(lambda));
        return integrate_slice(&one, &h, &[0.0], cfg);
    }
    // polar form: int_0^1 2n r^{2n-1} (int_S f(r xi) d sigma) dr, sphere part slice-reduced
    let nf = n as f64;
    let weight = |x: f64| Ok((nf - 1.0) * x.powf(nf - 2.0));
    let inner_evals = Cell::new(0usize);
    let mut radial = |node: Node| -> Result<Sample> {
        let r = node.x;
        let h = |lambda: C64| {
            let t = (1.0 - lambda.norm_sqr()).max(0.0).sqrt();
            f(&lift(&e, perp.as_ref(), lambda, t).scale(C64::new(r, 0.0)))
        };
        let inner = disk_integral(&weight, &h, &[0.0], 0.25 * cfg.rel_tol, (cfg.max_subdivisions / 10).max(20))?;
        inner_evals.set(inner_evals.get() + inner.evaluations);
        let jac = 2.0 * nf * r.powf(2.0 * nf - 1.0);
        Ok((jac * inner.value, jac * inner.error))
    };
    let mut out = graded(&mut radial, 0.0, 1.0, cfg.rel_tol, 0.0, cfg.max_subdivisions)?;
    out.evaluations += inner_evals.get();
    finish(out, Method::SliceReduced)
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    Ok(())
}

/// Peak angles of `lambda -> 1 - lambda conj(c)` for the given slice
/// coordinates: the modulus is smallest where `arg lambda = arg c`.
pub fn peak_angles(coords: &[C64]) -> Vec<f64> {
    coords.iter().filter(|c| c.norm() > 0.0).map(|c| c.arg()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn radial_examples() {
        assert_relative_eq!(integrate_radial(&|r| r, &cfg()).unwrap().value, 0.5, max_relative = 1e-12);
        let inv_sqrt = integrate_radial_gap(&|_, t| t.powf(-0.5), &cfg()).unwrap();
        assert!((inv_sqrt.value - 2.0).abs() <= 1e-8 * 2.0);
        let log2 = integrate_radial(&|r| 1.0 / (1.0 - 0.5 * r), &cfg()).unwrap();
        assert!((log2.value - 2.0 * 2f64.ln()).abs() <= 1e-8);
        assert_eq!(log2.method, Method::Adaptive);
    }

    #[test]
    fn normalization_in_low_dimensions() {
        for n in 1..=3 {
            let base = CPoint::basis(n, 0);
            let s = integrate_sphere(&|_| 1.0, n, &cfg(), Some(&base)).unwrap();
            let b = integrate_ball(&|_| 1.0, n, &cfg(), Some(&base)).unwrap();
            assert!((s.value - 1.0).abs() < 1e-10, "sphere n={n}: {}", s.value);
            assert!((b.value - 1.0).abs() < 1e-10, "ball n={n}: {}", b.value);
            assert_eq!(s.method, Method::SliceReduced);
        }
        let mc = integrate_sphere(&|_| 1.0, 2, &cfg(), None).unwrap();
        assert_eq!(mc.value, 1.0);
        assert_eq!(mc.method, Method::MonteCarlo);
    }

    #[test]
    fn circle_kernel_closed_form() {
        let w = CPoint::from_real(&[0.5]);
        let f = |xi: &CPoint| (C64::new(1.0, 0.0) - xi.inner(&w).unwrap()).norm_sqr().recip();
        let res = integrate_sphere(&f, 1, &cfg(), Some(&w)).unwrap();
        assert!((res.value - 4.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn ball_moments() {
        let base = CPoint::basis(1, 0);
        let r1 = integrate_ball(&|z| z.gap(), 1, &cfg(), Some(&base)).unwrap();
        assert!((r1.value - 0.5).abs() < 1e-8);
        let base2 = CPoint::basis(2, 0);
        let r2 = integrate_ball(&|z| z.gap(), 2, &cfg(), Some(&base2)).unwrap();
        assert!((r2.value - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn slice_and_monte_carlo_agree_in_two_dimensions() {
        let w = CPoint::new(vec![C64::new(0.3, 0.2), C64::new(0.0, -0.4)]);
        let f = |xi: &CPoint| (C64::new(1.0, 0.0) - xi.inner(&w).unwrap()).norm_sqr().recip();
        let slice = integrate_sphere(&f, 2, &cfg(), Some(&w)).unwrap();
        let mc = integrate_sphere(&f, 2, &cfg(), None).unwrap();
        assert!((slice.value - mc.value).abs() <= 3.0 * mc.error_estimate);
        // closed form for n = 2: int_S |1-<xi,w>|^{-2} d sigma = log(1/(1-|w|^2))/|w|^2
        let r2 = w.norm_sq();
        assert_relative_eq!(slice.value, -(1.0 - r2).ln() / r2, max_relative = 1e-8);
    }

    #[test]
    fn monte_carlo_is_bit_reproducible() {
        let f = |z: &CPoint| z.coords()[0].re.exp();
        let a = integrate_ball(&f, 2, &cfg(), None).unwrap();
        let b = integrate_ball(&f, 2, &cfg(), None).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn slice_base_dimension_is_checked() {
        let w = CPoint::from_real(&[0.1, 0.2]);
        assert!(integrate_sphere(&|_| 1.0, 3, &cfg(), Some(&w)).is_err());
    }

    #[test]
    fn bad_config_is_rejected() {
        let bad = QuadConfig { rel_tol: 0.0, ..cfg() };
        assert!(integrate_radial(&|r| r, &bad).is_err());
        let few = QuadConfig { mc_samples: 10, ..cfg() };
        assert!(integrate_sphere(&|_| 1.0, 2, &few, None).is_err());
    }

    #[test]
    fn refinement_stays_within_reported_error() {
        let f = |_r: f64, t: f64| t.powf(-0.7) * (1.0 - t.ln()).powi(2);
        let coarse = integrate_radial_gap(&f, &QuadConfig { rel_tol: 1e-6, ..cfg() }).unwrap();
        let fine = integrate_radial_gap(&f, &QuadConfig { rel_tol: 5e-7, ..cfg() }).unwrap();
        assert!((coarse.value - fine.value).abs() <= coarse.error_estimate);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn slice_reduction_matches_monte_carlo(
            re in -1.0f64..1.0, im in -1.0f64..1.0, r in 0.0f64..0.7, q in 0.1f64..1.9, seed in 0u64..1000
        ) {
            let dir = CPoint::new(vec![C64::new(re, im), C64::new(im, -re)]);
            let w = dir.normalized().unwrap_or_else(|| CPoint::basis(2, 0)).scale(C64::new(r, 0.0));
            let f = |xi: &CPoint| (C64::new(1.0, 0.0) - xi.inner(&w).unwrap()).norm().powf(-q);
            let c = QuadConfig { seed, ..cfg() };
            let slice = integrate_sphere(&f, 2, &c, Some(&w)).unwrap();
            let mc = integrate_sphere(&f, 2, &c, None).unwrap();
            prop_assert!((slice.value - mc.value).abs() <= 3.0 * mc.error_estimate + 1e-12);
        }
    }
}
