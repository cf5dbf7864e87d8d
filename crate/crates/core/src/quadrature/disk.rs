//! Circle and disk integrals with graded panels around known peak angles.
//! These carry the slice reductions: integrals over the sphere or ball of
//! functions of `<z, e>` become weighted integrals over the unit disk.

use core::cell::Cell;
use core::f64::consts::PI;

use super::gauss_kronrod::{adaptive, graded, Node, Outcome, Sample, GRADING};
use crate::error::Result;
use crate::geometry::C64;

const TWO_PI: f64 = 2.0 * PI;

fn wrap_angle(t: f64) -> f64 {
    let r = t % TWO_PI;
    if r < 0.0 {
        r + TWO_PI
    } else {
        r
    }
}

/// Panel edges around the circle: the sorted peak angles, or a single edge.
fn panel_edges(peaks: &[f64]) -> Vec<f64> {
    let mut edges: Vec<f64> = peaks.iter().map(|p| wrap_angle(*p)).collect();
    edges.sort_by(|a, b| a.total_cmp(b));
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if edges.len() > 1 && (edges[0] + TWO_PI - edges[edges.len() - 1]) < 1e-12 {
        edges.pop();
    }
    if edges.is_empty() {
        edges.push(0.0);
    }
    edges
}

/// `(1/2pi) int_0^{2pi} h(s e^{i theta}) d theta`, each panel between
/// consecutive peaks graded towards both of its ends.
pub(crate) fn circle_mean(
    h: &dyn Fn(C64) -> f64,
    s: f64,
    peaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Outcome> {
    let edges = panel_edges(peaks);
    let count = edges.len();
    let panel = |i: usize| {
        let a = edges[i];
        let b = if i + 1 < count { edges[i + 1] } else { edges[0] + TWO_PI };
        (a, b)
    };
    let mut g = |v: f64| -> Result<Sample> {
        let i = (v.floor() as usize).min(count - 1);
        let u = v - i as f64;
        let (a, b) = panel(i);
        let half = 0.5 * (b - a);
        let d = half * u.powi(GRADING);
        let jac = half * GRADING as f64 * u.powi(GRADING - 1);
        if jac == 0.0 {
            return Ok((0.0, 0.0));
        }
        let left = h(C64::from_polar(s, a + d));
        let right = h(C64::from_polar(s, b - d));
        Ok((jac * (left + right) / TWO_PI, 0.0))
    };
    let breaks: Vec<f64> = (0..=count).map(|i| i as f64).collect();
    adaptive(&mut g, &breaks, rel_tol, abs_tol, max_subdivisions)
}

/// `(1/pi) int_D h(lambda) W(1 - |lambda|^2) dA(lambda)` in polar form. The
/// weight is evaluated once per radial node, from the cancellation-free gap.
pub(crate) fn disk_integral(
    weight: &dyn Fn(f64) -> Result<f64>,
    h: &dyn Fn(C64) -> f64,
    peaks: &[f64],
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Outcome> {
    let inner_evals = Cell::new(0usize);
    let inner_tol = 0.25 * rel_tol;
    let inner_budget = (max_subdivisions / 10).max(20);
    let mut outer = |node: Node| -> Result<Sample> {
        let s = node.x;
        let gap = node.from_hi * (1.0 + s);
        let w = weight(gap)?;
        if w == 0.0 {
            return Ok((0.0, 0.0));
        }
        // an inner integral that stalls on rounding noise reports its error upward
        let inner = circle_mean(h, s, peaks, inner_tol, 0.0, inner_budget)?;
        inner_evals.set(inner_evals.get() + inner.evaluations);
        let scale = 2.0 * s * w;
        Ok((scale * inner.value, scale * inner.error))
    };
    let mut out = graded(&mut outer, 0.0, 1.0, rel_tol, 0.0, max_subdivisions)?;
    out.evaluations += inner_evals.get();
    Ok(out)
}

/// Radial weight of the ball slice reduction in dimension `n >= 2`:
/// `W(x) = n(n-1) x^{n-1} int_0^1 g(x y) (1-y)^{n-2} dy`, so that
/// `int_B g(1-|z|^2) h(<z,e>) dv = (1/pi) int_D h W(1-|lambda|^2) dA`.
pub(crate) fn ball_slice_weight(
    ln_g: &dyn Fn(f64) -> f64,
    n: usize,
    x: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<f64> {
    let nf = n as f64;
    let mut f = |node: Node| -> Result<Sample> {
        let y = node.x;
        let v = (ln_g(x * y) + (nf - 2.0) * node.from_hi.ln()).exp();
        Ok((v, 0.0))
    };
    let out = graded(&mut f, 0.0, 1.0, rel_tol, 0.0, max_subdivisions)?.into_result()?;
    Ok(nf * (nf - 1.0) * x.powf(nf - 1.0) * out.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn poisson_kernel_mean_is_one() {
        // mean of (1-r^2)/|1 - r e^{-i t0} z|^2 over the circle is 1
        let r: f64 = 1.0 - 1e-4;
        let t0: f64 = 0.7;
        let w = C64::from_polar(r, t0);
        let h = |z: C64| (1.0 - r * r) / (C64::new(1.0, 0.0) - z * w.conj()).norm_sqr();
        let out = circle_mean(&h, 1.0, &[t0], 1e-10, 0.0, 2000).unwrap();
        assert_relative_eq!(out.value, 1.0, max_relative = 1e-9);
        assert!(out.converged);
    }

    #[test]
    fn disk_area_weight() {
        let one = |_g: f64| Ok(1.0);
        let h = |_z: C64| 1.0;
        let out = disk_integral(&one, &h, &[], 1e-12, 100).unwrap();
        assert_relative_eq!(out.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn edges_wrap_and_dedupe() {
        assert_eq!(panel_edges(&[]), vec![0.0]);
        assert_eq!(panel_edges(&[0.0, TWO_PI]).len(), 1);
        assert_eq!(panel_edges(&[1.0, -1.0]).len(), 2);
    }

    #[test]
    fn ball_weight_for_pure_power_matches_beta_closed_form() {
        // g(x) = x^d gives W(x) = n! Gamma(d+1)/Gamma(n+d) x^{n-1+d}
        let d = 0.5;
        let n = 3;
        let x = 0.3;
        let w = ball_slice_weight(&|x: f64| d * x.ln(), n, x, 1e-12, 200).unwrap();
        let expect = 6.0 * crate::special::gamma(d + 1.0) / crate::special::gamma(3.0 + d)
            * x.powf(2.0 + d);
        assert_relative_eq!(w, expect, max_relative = 1e-11);
    }
}
