//! Normal weights `mu(r) = (1-r^2)^alpha log^beta(e/(1-r^2)) (loglog(e^2/(1-r^2)))^gamma`,
//! their comparison bounds and the lacunary series attached to them.


use crate::error::{invalid, Error, Result};
use crate::geometry::{bergman_metric, CPoint, C64};
use crate::special::{log_e_over, loglog_e2_over};

/// A normal weight together with its declared normality exponents `a <= alpha <= b`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalWeight {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub decl_a: f64,
    pub decl_b: f64,
}

impl NormalWeight {
    pub fn new(alpha: f64, beta: f64, gamma: f64, decl_a: f64, decl_b: f64) -> Result<Self> {
        let all_finite = [alpha, beta, gamma, decl_a, decl_b].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(invalid("weight parameters must be finite"));
        }
        if alpha <= 0.0 {
            return Err(invalid("weight exponent alpha must be positive"));
        }
        if !(decl_a > 0.0 && decl_a <= alpha && decl_b >= alpha) {
            return Err(invalid("declared exponents must satisfy 0 < a <= alpha <= b"));
        }
        Ok(Self { alpha, beta, gamma, decl_a, decl_b })
    }

    /// The pure power `(1-r^2)^alpha` with `a = b = alpha`.
    pub fn power(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, 0.0, alpha, alpha)
    }

    /// `ln mu` as a function of the gap `x = 1 - r^2 in (0, 1]`.
    pub fn ln_at_gap(&self, x: f64) -> f64 {
        let mut v = self.alpha * x.ln();
        if self.beta != 0.0 {
            v += self.beta * log_e_over(x).ln();
        }
        if self.gamma != 0.0 {
            v += self.gamma * loglog_e2_over(x).ln();
        }
        v
    }

    /// `mu` as a function of the gap `x = 1 - r^2`.
    pub fn at_gap(&self, x: f64) -> f64 {
        self.ln_at_gap(x).exp()
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        weight_eval(self, r)
    }
}

/// `mu(r)` for `0 <= r < 1`.
pub fn weight_eval(mu: &NormalWeight, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(invalid("weight argument must lie in [0, 1)"));
    }
    Ok(mu.at_gap(1.0 - r * r))
}

/// Gap `1 - r^2` of the point `r = 1 - t`, computed without cancellation.
fn gap_from_distance(t: f64) -> f64 {
    t * (2.0 - t)
}

/// Checks both monotonicity conditions of a normal weight on `[0, 1)`.
pub fn normality_check(mu: &NormalWeight, grid_size: usize) -> bool {
    normality_check_from(mu, 0.0, grid_size)
}

/// Checks that `mu/(1-r^2)^a` is non-increasing and `mu/(1-r^2)^b` is
/// non-decreasing on `[r0, 1)`, over a grid geometric in `1 - r` that reaches
/// `1 - r = (1 - r0) 2^-40`. Each step may violate monotonicity by a relative 1e-12.
pub fn normality_check_from(mu: &NormalWeight, r0: f64, grid_size: usize) -> bool {
    let grid_size = grid_size.max(100);
    let t0 = 1.0 - r0;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..grid_size {
        let t = t0 * (-(40.0 * i as f64 / (grid_size - 1) as f64) * core::f64::consts::LN_2).exp();
        let x = gap_from_distance(t);
        let lm = mu.ln_at_gap(x);
        let qa = lm - mu.decl_a * x.ln();
        let qb = lm - mu.decl_b * x.ln();
        if let Some((pa, pb)) = prev {
            // log-space comparison with relative slack 1e-12
            if qa > pa + 1e-12 || qb < pb - 1e-12 {
                return false;
            }
        }
        prev = Some((qa, qb));
    }
    true
}

/// The comparison `mu(|z|)/mu(|w|) <= X^a + X^b`, `X = (1-|z|^2)/(1-|w|^2)`.
pub fn weight_ratio_within_bounds(mu: &NormalWeight, z: &CPoint, w: &CPoint) -> Result<bool> {
    z.require_interior()?;
    w.require_interior()?;
    let (xz, xw) = (z.gap(), w.gap());
    let ratio = (mu.ln_at_gap(xz) - mu.ln_at_gap(xw)).exp();
    let x = xz / xw;
    let bound = x.powf(mu.decl_a) + x.powf(mu.decl_b);
    Ok(ratio <= bound * (1.0 + 1e-12))
}

/// `mu(|w|)/mu(|z|)` for `w` in the Bergman ball `D(z, 1)`, with the window
/// `C = 2^(b+2)` inside which the ratio and its reciprocal must stay.
pub fn bergman_ball_ratio(mu: &NormalWeight, z: &CPoint, w: &CPoint) -> Result<(f64, f64)> {
    if bergman_metric(z, w)? >= 1.0 {
        return Err(invalid("w must lie in the Bergman ball D(z, 1)"));
    }
    let ratio = (mu.ln_at_gap(w.gap()) - mu.ln_at_gap(z.gap())).exp();
    Ok((ratio, 2f64.powf(mu.decl_b + 2.0)))
}

/// One term `coeff * u^exponent` of the lacunary series. Exponents can exceed
/// the integer range for slowly decaying weights, so they are stored as
/// integer-valued floats.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GTerm {
    pub coeff: f64,
    pub exponent: f64,
}

/// Truncation of `g(u) = 1 + sum_j 2^j u^{n_j}` where `n_j = floor(1/(1-r_j))`
/// and `mu(r_j) = 2^-j`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GSeries {
    pub terms: Vec<GTerm>,
    pub weight: NormalWeight,
}

const SCAN_STEP: f64 = 1.0 / 16.0;
const SCAN_LIMIT: f64 = 1000.0;

/// Builds the series with `j = 1..=big_j`. Roots are located in the variable
/// `v = -log2(1 - r)`; when `mu = 2^-j` has several roots the smallest is used.
pub fn build_g(mu: &NormalWeight, big_j: u32) -> Result<GSeries> {
    if big_j == 0 || big_j > 60 {
        return Err(invalid("truncation J must lie in 1..=60"));
    }
    let ln_mu = |v: f64| mu.ln_at_gap(gap_from_distance((-v * core::f64::consts::LN_2).exp()));
    let mut terms = Vec::with_capacity(big_j as usize);
    let mut start = 0.0;
    for j in 1..=big_j {
        let target = -(j as f64) * core::f64::consts::LN_2;
        let f = |v: f64| ln_mu(v) - target;
        let v = smallest_root(&f, start).ok_or(Error::NoRoot { j })?;
        // mu > 2^-j on [0, r_j) implies the next root lies further out
        if f(0.0) > 0.0 {
            start = v;
        }
        let exponent = (v * core::f64::consts::LN_2).exp().floor();
        if let Some(prev) = terms.last().map(|t: &GTerm| t.exponent) {
            if exponent <= prev {
                return Err(invalid("lacunary exponents are not strictly increasing"));
            }
        }
        terms.push(GTerm { coeff: 2f64.powi(j as i32), exponent });
    }
    Ok(GSeries { terms, weight: *mu })
}

fn smallest_root(f: &dyn Fn(f64) -> f64, start: f64) -> Option<f64> {
    let mut lo = start;
    let mut flo = f(lo);
    if flo == 0.0 {
        return Some(lo);
    }
    while lo < SCAN_LIMIT {
        let hi = lo + SCAN_STEP;
        let fhi = f(hi);
        if fhi == 0.0 {
            return Some(hi);
        }
        if (flo > 0.0) != (fhi > 0.0) {
            return Some(bisect(f, lo, hi, flo));
        }
        lo = hi;
        flo = fhi;
    }
    None
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let lo_positive = flo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl GSeries {
    pub fn truncation(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, u: C64) -> Result<C64> {
        g_eval(self, u)
    }

    pub fn deriv(&self, r: f64) -> Result<f64> {
        g_deriv(self, r)
    }
}

/// Partial sum `1 + sum_j 2^j u^{n_j}` for `|u| < 1`.
pub fn g_eval(g: &GSeries, u: C64) -> Result<C64> {
    let m = u.norm();
    if !(m < 1.0) {
        return Err(invalid("lacunary series argument must satisfy |u| < 1"));
    }
    let mut acc = C64::new(1.0, 0.0);
    if m == 0.0 {
        return Ok(acc);
    }
    let lu = u.ln();
    for t in &g.terms {
        let mag = t.exponent * lu.re;
        if mag < -745.0 {
            break;
        }
        let arg = (t.exponent * lu.im) % (2.0 * core::f64::consts::PI);
        acc += C64::from_polar(t.coeff * mag.exp(), arg);
    }
    Ok(acc)
}

/// Term-wise derivative `sum_j 2^j n_j r^{n_j - 1}` of the partial sum on `[0, 1)`.
pub fn g_deriv(g: &GSeries, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(invalid("lacunary derivative argument must lie in [0, 1)"));
    }
    let mut acc = 0.0;
    for t in &g.terms {
        let p = t.exponent - 1.0;
        let term = if p == 0.0 {
            1.0
        } else if r == 0.0 {
            0.0
        } else {
            (p * r.ln()).exp()
        };
        acc += t.coeff * t.exponent * term;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn w(alpha: f64, beta: f64, a: f64, b: f64) -> NormalWeight {
        NormalWeight::new(alpha, beta, 0.0, a, b).unwrap()
    }

    #[test]
    fn weight_values() {
        let lin = NormalWeight::power(1.0).unwrap();
        assert_eq!(weight_eval(&lin, 0.0).unwrap(), 1.0);
        let logw = w(1.0, 1.0, 0.5, 1.5);
        assert_relative_eq!(
            weight_eval(&logw, 0.5).unwrap(),
            0.75 * (1.0 + (4.0f64 / 3.0).ln()),
            max_relative = 1e-15
        );
        let half = NormalWeight::power(0.5).unwrap();
        assert_relative_eq!(weight_eval(&half, 0.8).unwrap(), 0.6, max_relative = 1e-15);
        assert!(weight_eval(&half, 1.0).is_err());
        let ll = NormalWeight::new(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(weight_eval(&ll, 0.0).unwrap(), 2f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn construction_rejects_bad_exponents() {
        assert!(NormalWeight::new(0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(NormalWeight::new(1.0, 0.0, 0.0, 1.5, 2.0).is_err());
        assert!(NormalWeight::new(1.0, 0.0, 0.0, 0.5, 0.9).is_err());
    }

    #[test]
    fn normality_of_pure_power() {
        assert!(normality_check(&NormalWeight::power(1.0).unwrap(), 200));
    }

    #[test]
    fn negative_log_power_breaks_first_condition() {
        assert!(!normality_check(&w(1.0, -5.0, 1.0, 1.0), 200));
    }

    #[test]
    fn positive_log_power_is_normal_only_away_from_origin() {
        // x^{1/2}(1 - ln x) increases in r until 1 - r^2 = 1/e, so the first
        // condition holds from r0 = sqrt(1 - 1/e) on but not from 0.
        let mu = w(1.0, 1.0, 0.5, 1.5);
        assert!(!normality_check(&mu, 400));
        let r0 = (1.0 - (-1.0f64).exp()).sqrt();
        assert!(normality_check_from(&mu, r0, 400));
    }

    #[test]
    fn ratio_check_examples() {
        let lin = NormalWeight::power(1.0).unwrap();
        let z = CPoint::from_real(&[0.9]);
        let wp = CPoint::from_real(&[0.5]);
        assert!(weight_ratio_within_bounds(&lin, &z, &z).unwrap());
        assert!(weight_ratio_within_bounds(&lin, &z, &wp).unwrap());
    }

    #[test]
    fn first_lacunary_exponents() {
        let g = build_g(&NormalWeight::power(1.0).unwrap(), 20).unwrap();
        assert_eq!(g.terms[0].exponent, 3.0);
        assert_eq!(g.terms[1].exponent, 7.0);
        assert_eq!(g.terms[0].coeff, 2.0);
        assert_eq!(g_eval(&g, C64::new(0.0, 0.0)).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(g_deriv(&g, 0.0).unwrap(), 0.0);
        for w in g.terms.windows(2) {
            assert!(w[1].exponent > w[0].exponent);
        }
    }

    #[test]
    fn partial_sum_matches_direct_oracle() {
        let mu = NormalWeight::power(1.0).unwrap();
        let g = build_g(&mu, 20).unwrap();
        // independent oracle: r_j = sqrt(1 - 2^-j) in closed form
        let mut expect = 1.0;
        for j in 1..=20 {
            let r = (1.0 - 2f64.powi(-j)).sqrt();
            let n = (1.0 / (1.0 - r)).floor();
            expect += 2f64.powi(j) * 0.5f64.powf(n);
        }
        let got = g_eval(&g, C64::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(got.re, expect, max_relative = 1e-14);
        assert_eq!(got.im, 0.0);
    }

    #[test]
    fn slowly_decaying_weight_gets_huge_exponents() {
        let g = build_g(&NormalWeight::power(0.5).unwrap(), 60).unwrap();
        assert!(g.terms[59].exponent > 1e30);
        assert!(g_eval(&g, C64::new(0.999, 0.0)).unwrap().re.is_finite());
    }

    #[test]
    fn lacunary_arguments_are_checked() {
        let g = build_g(&NormalWeight::power(1.0).unwrap(), 5).unwrap();
        assert!(g_eval(&g, C64::new(1.0, 0.0)).is_err());
        assert!(g_deriv(&g, 1.0).is_err());
        assert!(build_g(&NormalWeight::power(1.0).unwrap(), 61).is_err());
    }

    #[test]
    fn missing_root_names_the_index() {
        // the log factor keeps mu above 1/2 until 1 - r underflows
        let mu = NormalWeight::new(1e-3, 1.0, 0.0, 1e-3, 1.0).unwrap();
        assert_eq!(build_g(&mu, 1), Err(Error::NoRoot { j: 1 }));
    }

    proptest! {
        #[test]
        fn weight_is_positive(alpha in 0.01f64..3.0, beta in -3.0f64..3.0, gamma in -2.0f64..2.0, r in 0.0f64..0.999999) {
            let mu = NormalWeight::new(alpha, beta, gamma, alpha, alpha).unwrap();
            let v = weight_eval(&mu, r).unwrap();
            prop_assert!(v > 0.0 && v.is_finite());
        }

        #[test]
        fn ratio_bound_for_log_weight(rz in 0.0f64..0.99999, rw in 0.0f64..0.99999) {
            let mu = w(1.0, 1.0, 0.5, 1.5);
            prop_assert!(weight_ratio_within_bounds(&mu, &CPoint::from_real(&[rz]), &CPoint::from_real(&[rw])).unwrap());
        }
    }
}
