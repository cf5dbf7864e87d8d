//! Weighted gradient seminorms, Bloch-type norms, a catalog of holomorphic
//! test functions with exact gradients, and grid-based multiplier criteria.
//!
//! Suprema over the ball are replaced by maxima over a boundary-refined grid,
//! so every norm reported here is a lower bound for the true one.

use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::geometry::{common_line, CPoint, C64};
use crate::kernels::weighted_volume_constant;
use crate::quadrature::{
    ball_slice_weight, integrate_ball, integrate_radial_gap, integrate_slice, peak_angles,
    IntegrationResult, Method, QuadConfig,
};
use crate::special::{ln_gamma, log_e_over};
use crate::weights::NormalWeight;

/// Exponents and weights of the function spaces.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpaceParams {
    pub p: f64,
    pub s: f64,
    pub mu: NormalWeight,
    pub nu: NormalWeight,
    pub n: usize,
}

impl SpaceParams {
    pub fn new(p: f64, s: f64, mu: NormalWeight, nu: NormalWeight, n: usize) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(invalid("p must be positive"));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(invalid("s must be non-negative"));
        }
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self { p, s, mu, nu, n })
    }

    /// `(n - s)/p`, the exponent of the gradient growth bound.
    pub fn growth_exponent(&self) -> f64 {
        (self.n as f64 - self.s) / self.p
    }
}

/// Holomorphic functions with closed-form values and gradients.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum HoloFunction {
    Constant(C64),
    /// `coeff * prod z_j^{exponents_j}`
    Monomial { coeff: C64, exponents: Vec<u32> },
    /// `(1 - <z, w0>)^{-gamma}`
    KernelPower { w0: CPoint, gamma: f64 },
    /// `log(e / (1 - <z, w0>))`
    LogKernel { w0: CPoint },
    /// `C_w (1-<z,w>)^{-A} (<z,w> - |w|^2)` with `A = b + 1 + n/p` and
    /// `C_w = (1-|w|^2)^{1+b+s/p} / mu(|w|)`, `b = mu.decl_b`; it vanishes at `w`
    /// and has gradient of size `(1-|w|^2)^{-(n-s)/p}/mu(|w|)` there.
    KernelDifference { w: CPoint, p: f64, s: f64, mu: NormalWeight },
    /// `Phi(<z,w>)^2 / Phi(|w|^2) - 2 Phi(<z,w>)` with
    /// `Phi(x) = int_0^x (1-t)^{-1} log^{-beta}(e/(1-t)) dt`.
    SquaredLogPrimitive { w: CPoint, beta: f64 },
    /// `exp((z_1 + 1)/(z_1 - 1))`: bounded, with a steep boundary gradient.
    ExpCusp,
    /// `log log(e^2/(1 - z_1))`
    LogLog,
    /// `log log log(e^4/(1 - z_1))`
    LogLogLog,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `L(u) = log(e/(1-u)) = 1 - Log(1-u)`.
fn log_e_over_c(u: C64) -> C64 {
    one() - (one() - u).ln()
}

/// `Phi(u)` in closed form: `(L^{1-beta} - 1)/(1-beta)`, or `log L` at `beta = 1`.
fn log_primitive(u: C64, beta: f64) -> C64 {
    let l = log_e_over_c(u);
    if beta == 1.0 {
        l.ln()
    } else {
        (l.powf(1.0 - beta) - one()) / (1.0 - beta)
    }
}

fn singular(u: C64) -> Result<()> {
    if (one() - u).norm() == 0.0 {
        return Err(invalid("evaluation at the boundary singularity"));
    }
    Ok(())
}

impl HoloFunction {
    /// `f(z) = F(<z, v>)` for catalog entries that depend on one linear form.
    fn linear_form(&self, n: usize) -> Option<CPoint> {
        match self {
            HoloFunction::Monomial { exponents, .. } => {
                let nz: Vec<usize> = (0..exponents.len()).filter(|&j| exponents[j] != 0).collect();
                match nz.as_slice() {
                    [] => None,
                    [j] => Some(CPoint::basis(n, *j)),
                    _ => None,
                }
            }
            HoloFunction::KernelPower { w0, .. } | HoloFunction::LogKernel { w0 } => Some(w0.clone()),
            HoloFunction::KernelDifference { w, .. } | HoloFunction::SquaredLogPrimitive { w, .. } => {
                Some(w.clone())
            }
            HoloFunction::ExpCusp | HoloFunction::LogLog | HoloFunction::LogLogLog => Some(CPoint::basis(n, 0)),
            HoloFunction::Constant(_) => None,
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            HoloFunction::Constant(_) => true,
            HoloFunction::Monomial { coeff, exponents } => coeff.norm() == 0.0 || exponents.iter().all(|&e| e == 0),
            _ => false,
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        let own = match self {
            HoloFunction::Monomial { exponents, .. } => Some(exponents.len()),
            HoloFunction::KernelPower { w0, .. } | HoloFunction::LogKernel { w0 } => Some(w0.dim()),
            HoloFunction::KernelDifference { w, .. } | HoloFunction::SquaredLogPrimitive { w, .. } => Some(w.dim()),
            _ => None,
        };
        match own {
            Some(d) if d != n => Err(Error::DimensionMismatch { left: d, right: n }),
            _ => Ok(()),
        }
    }

    /// `F(u)` and `F'(u)` for the single-form entries.
    fn profile(&self, u: C64) -> Result<(C64, C64)> {
        match self {
            HoloFunction::Monomial { coeff, exponents } => {
                let k = exponents.iter().copied().max().unwrap_or(0) as i32;
                let d = if k == 0 { C64::new(0.0, 0.0) } else { *coeff * (k as f64) * u.powi(k - 1) };
                Ok((*coeff * u.powi(k), d))
            }
            HoloFunction::KernelPower { gamma, .. } => {
                singular(u)?;
                let q = one() - u;
                Ok((q.powf(-gamma), *gamma * q.powf(-gamma - 1.0)))
            }
            HoloFunction::LogKernel { .. } => {
                singular(u)?;
                Ok((log_e_over_c(u), (one() - u).inv()))
            }
            HoloFunction::KernelDifference { w, p, s, mu } => {
                singular(u)?;
                let n = w.dim() as f64;
                let b = mu.decl_b;
                let a = b + 1.0 + n / p;
                let gw = w.gap();
                let c = ((1.0 + b + s / p) * gw.ln() - mu.ln_at_gap(gw)).exp();
                let q = one() - u;
                let wn = w.norm_sq();
                let val = c * q.powf(-a) * (u - wn);
                let der = c * q.powf(-a - 1.0) * (a * (u - wn) + q);
                Ok((val, der))
            }
            HoloFunction::SquaredLogPrimitive { w, beta } => {
                singular(u)?;
                let norm = log_primitive(C64::new(w.norm_sq(), 0.0), *beta);
                if norm.norm() == 0.0 {
                    return Err(invalid("normalizing primitive vanishes (w = 0)"));
                }
                let phi = log_primitive(u, *beta);
                let dphi = log_e_over_c(u).powf(-beta) / (one() - u);
                Ok((phi * phi / norm - 2.0 * phi, 2.0 * dphi * (phi / norm - one())))
            }
            HoloFunction::ExpCusp => {
                singular(u)?;
                let m = u - one();
                let v = ((u + one()) / m).exp();
                Ok((v, v * (-2.0) / (m * m)))
            }
            HoloFunction::LogLog => {
                singular(u)?;
                let q = one() - u;
                let inner = C64::new(2.0, 0.0) - q.ln();
                Ok((inner.ln(), (inner * q).inv()))
            }
            HoloFunction::LogLogLog => {
                singular(u)?;
                let q = one() - u;
                let a = C64::new(4.0, 0.0) - q.ln();
                let b = a.ln();
                Ok((b.ln(), (b * a * q).inv()))
            }
            HoloFunction::Constant(c) => Ok((*c, C64::new(0.0, 0.0))),
        }
    }

    /// `f(z)`.
    pub fn value(&self, z: &CPoint) -> Result<C64> {
        z.require_interior()?;
        self.check_dim(z.dim())?;
        match self {
            HoloFunction::Constant(c) => Ok(*c),
            HoloFunction::Monomial { coeff, exponents } if self.linear_form(z.dim()).is_none() => {
                Ok(exponents.iter().zip(z.coords()).fold(*coeff, |acc, (&e, &zj)| acc * zj.powi(e as i32)))
            }
            _ => {
                let v = self.linear_form(z.dim()).expect("single-form entry");
                Ok(self.profile(z.inner(&v)?)?.0)
            }
        }
    }

    /// `|f(z)|`.
    pub fn modulus(&self, z: &CPoint) -> Result<f64> {
        Ok(self.value(z)?.norm())
    }
}

/// The holomorphic gradient `(df/dz_1, ..., df/dz_n)`.
pub fn gradient(f: &HoloFunction, z: &CPoint) -> Result<CPoint> {
    z.require_interior()?;
    let n = z.dim();
    f.check_dim(n)?;
    if f.is_constant() {
        return Ok(CPoint::zero(n));
    }
    if let HoloFunction::Monomial { coeff, exponents } = f {
        if f.linear_form(n).is_none() {
            let zc = z.coords();
            let g = (0..n)
                .map(|j| {
                    if exponents[j] == 0 {
                        return C64::new(0.0, 0.0);
                    }
                    let mut acc = *coeff * exponents[j] as f64;
                    for (i, &e) in exponents.iter().enumerate() {
                        let pow = if i == j { e as i32 - 1 } else { e as i32 };
                        acc *= zc[i].powi(pow);
                    }
                    acc
                })
                .collect();
            return Ok(CPoint::new(g));
        }
    }
    let v = f.linear_form(n).expect("single-form entry");
    let d = f.profile(z.inner(&v)?)?.1;
    // d/dz_j F(sum z_i conj(v_i)) = F'(u) conj(v_j)
    Ok(CPoint::new(v.coords().iter().map(|vj| d * vj.conj()).collect()))
}

/// `|grad f(z)|`.
pub fn gradient_norm(f: &HoloFunction, z: &CPoint) -> Result<f64> {
    Ok(gradient(f, z)?.norm())
}

/// Ball slice weight for `g(x) = mu^p(x)/x` as a function of the gap.
fn space_weight(sp: &SpaceParams, x: f64, cfg: &QuadConfig) -> Result<f64> {
    let ln_g = |y: f64| sp.p * sp.mu.ln_at_gap(y) - y.ln();
    if sp.n == 1 {
        return Ok(ln_g(x).exp());
    }
    let nf = sp.n as f64;
    if sp.mu.beta == 0.0 && sp.mu.gamma == 0.0 {
        // g(y) = y^q, q = p alpha - 1: W(x) = n! Gamma(q+1)/Gamma(n+q) x^{n-1+q}
        let q = sp.p * sp.mu.alpha - 1.0;
        let ln_c = ln_gamma(nf + 1.0) + ln_gamma(q + 1.0) - ln_gamma(nf + q);
        return Ok((ln_c + (nf - 1.0 + q) * x.ln()).exp());
    }
    ball_slice_weight(&ln_g, sp.n, x, 1e-3 * cfg.rel_tol, cfg.max_subdivisions)
}

/// `int_B (1-|w|^2)^s |grad f(z)|^p |1-<z,w>|^{-2s} mu^p(|z|)/(1-|z|^2) dv(z)`.
pub fn fpms_local(f: &HoloFunction, w: &CPoint, sp: &SpaceParams, cfg: &QuadConfig) -> Result<IntegrationResult> {
    w.require_interior()?;
    if w.dim() != sp.n {
        return Err(Error::DimensionMismatch { left: w.dim(), right: sp.n });
    }
    f.check_dim(sp.n)?;
    if f.is_constant() {
        return Ok(IntegrationResult { value: 0.0, error_estimate: 0.0, evaluations: 0, method: Method::Adaptive });
    }
    let gw = w.gap();
    let ln_pre = sp.s * gw.ln();
    if let Some(v) = f.linear_form(sp.n) {
        if let Some(line) = common_line(&[&v, w], sp.n) {
            let (cv, cw) = (line.coordinates[0], line.coordinates[1]);
            let vn = v.norm();
            let h = |lambda: C64| {
                let u = lambda * cv.conj();
                let d = match f.profile(u) {
                    Ok((_, d)) => d.norm() * vn,
                    Err(_) => f64::INFINITY,
                };
                let dist = (one() - lambda * cw.conj()).norm();
                (ln_pre + sp.p * d.ln() - 2.0 * sp.s * dist.ln()).exp()
            };
            let peaks = peak_angles(&line.coordinates);
            let weight = |x: f64| space_weight(sp, x, cfg);
            return integrate_slice(&weight, &h, &peaks, cfg);
        }
    }
    let integrand = |z: &CPoint| {
        let g = gradient_norm(f, z).unwrap_or(f64::INFINITY);
        let dist = (one() - z.inner(w).expect("same dimension")).norm();
        let x = z.gap();
        (ln_pre + sp.p * g.ln() - 2.0 * sp.s * dist.ln() + sp.p * sp.mu.ln_at_gap(x) - x.ln()).exp()
    };
    integrate_ball(&integrand, sp.n, cfg, None)
}

/// A boundary-refined point grid standing in for the whole ball.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryGrid {
    pub points: Vec<CPoint>,
    /// Shell index per point: 0 for the center, `m` for radius `1 - 2^{-m}`.
    pub shell: Vec<u32>,
    pub max_shell: u32,
}

/// Unit directions: 16 roots of unity for `n = 1`; for `n >= 2`, 64 points
/// `(cos a e^{i t1}, sin a e^{i t2}, 0, ...)` in the first two coordinates.
pub fn grid_directions(n: usize) -> Vec<CPoint> {
    let pad = |a: C64, b: C64| {
        let mut c = vec![C64::new(0.0, 0.0); n];
        c[0] = a;
        if n > 1 {
            c[1] = b;
        }
        CPoint::new(c)
    };
    let zero = C64::new(0.0, 0.0);
    if n == 1 {
        return (0..16).map(|k| pad(C64::from_polar(1.0, 2.0 * PI * k as f64 / 16.0), zero)).collect();
    }
    let mut out: Vec<CPoint> = (0..16).map(|k| pad(C64::from_polar(1.0, 2.0 * PI * k as f64 / 16.0), zero)).collect();
    for a in [PI / 8.0, PI / 4.0, 3.0 * PI / 8.0] {
        for i in 0..4 {
            for j in 0..4 {
                let t1 = 2.0 * PI * i as f64 / 4.0;
                let t2 = 2.0 * PI * j as f64 / 4.0;
                out.push(pad(C64::from_polar(a.cos(), t1), C64::from_polar(a.sin(), t2)));
            }
        }
    }
    out
}

/// Center, shells `1 - 2^{-m}` for `m = 1..=max_shell` along [`grid_directions`],
/// and points `r e^{i theta} e_1` with `theta = ±sqrt(1-r), ±2 sqrt(1-r)`
/// approaching `e_1` tangentially.
pub fn boundary_grid(n: usize, max_shell: u32) -> BoundaryGrid {
    let dirs = grid_directions(n);
    let mut points = vec![CPoint::zero(n)];
    let mut shell = vec![0];
    for m in 1..=max_shell {
        let gap = (-(m as f64)).exp2();
        let r = 1.0 - gap;
        for d in &dirs {
            points.push(d.scale(C64::new(r, 0.0)));
            shell.push(m);
        }
        for k in [-2.0, -1.0, 1.0, 2.0] {
            let th = k * gap.sqrt();
            points.push(CPoint::basis(n, 0).scale(C64::from_polar(r, th)));
            shell.push(m);
        }
    }
    BoundaryGrid { points, shell, max_shell }
}

/// `|f(0)| + (max_w local(w))^{1/p}` from precomputed local integrals.
pub fn norm_from_locals(f: &HoloFunction, p: f64, n: usize, locals: &[f64]) -> Result<f64> {
    let f0 = f.modulus(&CPoint::zero(n))?;
    let sup = locals.iter().copied().fold(0.0, f64::max);
    Ok(f0 + sup.powf(1.0 / p))
}

/// Grid version of the `F(p, mu, s)` norm; a lower bound for the true norm.
pub fn fpms_norm(f: &HoloFunction, sp: &SpaceParams, wgrid: &[CPoint], cfg: &QuadConfig) -> Result<f64> {
    let locals = wgrid
        .iter()
        .map(|w| fpms_local(f, w, sp, cfg).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    norm_from_locals(f, sp.p, sp.n, &locals)
}

/// `|f(0)| + max nu(|z|) |grad f(z)|` over the grid.
pub fn bloch_norm(f: &HoloFunction, nu: &NormalWeight, zgrid: &[CPoint]) -> Result<f64> {
    let n = zgrid.first().map(|z| z.dim()).ok_or_else(|| invalid("empty grid"))?;
    let f0 = f.modulus(&CPoint::zero(n))?;
    let mut sup: f64 = 0.0;
    for z in zgrid {
        sup = sup.max(nu.at_gap(z.gap()) * gradient_norm(f, z)?);
    }
    Ok(f0 + sup)
}

/// Result of the gradient growth check.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GrowthCheck {
    /// `max |grad f(w)| (1-|w|^2)^{(n-s)/p} mu(|w|) / norm`
    pub constant: f64,
    pub norm: f64,
}

/// Checks `|grad f(w)| <~ norm / ((1-|w|^2)^{(n-s)/p} mu(|w|))` over a grid.
pub fn gradient_growth_check(f: &HoloFunction, sp: &SpaceParams, wgrid: &[CPoint], cfg: &QuadConfig) -> Result<GrowthCheck> {
    let norm = fpms_norm(f, sp, wgrid, cfg)?;
    growth_constant(f, sp, wgrid, norm)
}

/// The growth constant for an already computed norm.
pub fn growth_constant(f: &HoloFunction, sp: &SpaceParams, wgrid: &[CPoint], norm: f64) -> Result<GrowthCheck> {
    if !norm.is_finite() {
        return Err(invalid("norm is not finite"));
    }
    let q = sp.growth_exponent();
    let mut worst: f64 = 0.0;
    for w in wgrid {
        let x = w.gap();
        worst = worst.max(gradient_norm(f, w)? * (q * x.ln() + sp.mu.ln_at_gap(x)).exp());
    }
    Ok(GrowthCheck { constant: if norm > 0.0 { worst / norm } else { 0.0 }, norm })
}

/// `(M, M')` with `M = max mu1|h|/mu2` and `M' = max (1-|z|^2) mu1 |grad h| / mu2`.
pub fn derivative_transfer_check(
    h: &HoloFunction,
    mu1: &NormalWeight,
    mu2: &NormalWeight,
    zgrid: &[CPoint],
) -> Result<(f64, f64)> {
    let (mut m, mut mp): (f64, f64) = (0.0, 0.0);
    for z in zgrid {
        let x = z.gap();
        let w = (mu1.ln_at_gap(x) - mu2.ln_at_gap(x)).exp();
        m = m.max(w * h.modulus(z)?);
        mp = mp.max(x * w * gradient_norm(h, z)?);
    }
    Ok((m, mp))
}

/// `int_0^r mu^{-1}(rho) (1-rho^2)^{(s-n)/p} d rho`.
pub fn growth_integral(sp: &SpaceParams, r: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(invalid("radius must lie in [0, 1)"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let q = -sp.growth_exponent();
    // rho = r t; 1 - rho^2 = (1 - r t)(1 + r t) with 1 - r t = (1 - t) + t (1 - r)
    let f = |t: f64, one_minus_t: f64| {
        let rho = r * t;
        let x = (one_minus_t + t * (1.0 - r)) * (1.0 + rho);
        r * (q * x.ln() - sp.mu.ln_at_gap(x)).exp()
    };
    Ok(integrate_radial_gap(&f, cfg)?.value)
}

/// `(1 + growth_integral(r)) / (mu^{-1}(r) (1-r^2)^{1+(s-n)/p})` at each radius: the
/// comparison that decides whether the pointwise bound on `|f|` matches the
/// gradient bound.
pub fn growth_comparison(sp: &SpaceParams, radii: &[f64], cfg: &QuadConfig) -> Result<Vec<f64>> {
    let q = -sp.growth_exponent();
    radii
        .iter()
        .map(|&r| {
            let x = (1.0 - r) * (1.0 + r);
            let rhs = ((1.0 + q) * x.ln() - sp.mu.ln_at_gap(x)).exp();
            Ok((1.0 + growth_integral(sp, r, cfg)?) / rhs)
        })
        .collect()
}

/// Which multiplier quantity a [`CriterionValue`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Criterion {
    /// `nu |psi| / (mu (1-|z|^2)^{(n-s)/p})`
    WeightedModulus,
    /// `nu |grad psi| log log(e/(1-|z|^2))`
    GradientLogLog,
    /// `nu |grad psi| log^{1-beta}(e/(1-|z|^2))`
    GradientLogPower,
    /// `(1-|z|^2) |grad psi| log(e/(1-|z|^2)) log log(e/(1-|z|^2))`
    BlochLogLog,
    /// `(1-|z|^2) |grad psi| log(e/(1-|z|^2))`
    BlochLog,
    /// `nu |grad psi| int_0^{|z|} mu^{-1}(rho) (1-rho^2)^{(s-n)/p} d rho`
    GradientGrowthIntegral,
    /// `nu |grad psi|`
    Bloch,
    /// `|psi|`
    Modulus,
}

impl Criterion {
    pub const ALL: [Criterion; 8] = [
        Criterion::WeightedModulus,
        Criterion::GradientLogLog,
        Criterion::GradientLogPower,
        Criterion::BlochLogLog,
        Criterion::BlochLog,
        Criterion::GradientGrowthIntegral,
        Criterion::Bloch,
        Criterion::Modulus,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Criterion::WeightedModulus => "weighted_modulus",
            Criterion::GradientLogLog => "gradient_loglog",
            Criterion::GradientLogPower => "gradient_log_power",
            Criterion::BlochLogLog => "bloch_log_loglog",
            Criterion::BlochLog => "bloch_log",
            Criterion::GradientGrowthIntegral => "gradient_growth_integral",
            Criterion::Bloch => "bloch",
            Criterion::Modulus => "modulus",
        }
    }
}

/// Grid supremum of one criterion with its per-shell maxima.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriterionValue {
    pub id: &'static str,
    pub value: f64,
    /// Maximum over each shell, center first.
    pub shells: Vec<f64>,
    pub diverges: bool,
}

/// All criteria for one function on one grid.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MultiplierReport {
    pub criteria: Vec<CriterionValue>,
    pub grid_points: usize,
    pub max_shell: u32,
    pub n: usize,
}

impl MultiplierReport {
    pub fn get(&self, c: Criterion) -> &CriterionValue {
        self.criteria.iter().find(|v| v.id == c.id()).expect("every criterion is reported")
    }
}

/// Number of trailing shell increments the divergence test looks at.
const DIVERGENCE_WINDOW: usize = 4;
/// Increments decaying like `m^{-q}` with `q` below this are read as divergent.
const DIVERGENCE_DECAY: f64 = 1.5;

/// Divergence flag for a sequence of shell maxima at radii `1 - 2^{-m}`.
///
/// Fires when the last value more than doubles the previous one, or when
/// the last few increments are positive and decay no faster than
/// `m^{-1.5}`. Since `m` is proportional to `log(1/(1-r))`, the second rule
/// catches growth like `log log(1/(1-r))`, which never doubles from one shell
/// to the next.
pub fn shell_divergence(shells: &[f64]) -> bool {
    let k = shells.len();
    if k < 2 {
        return false;
    }
    let (last, prev) = (shells[k - 1], shells[k - 2]);
    if prev > 0.0 && last > 2.0 * prev {
        return true;
    }
    if k < DIVERGENCE_WINDOW + 2 {
        return false;
    }
    let mut xs = Vec::with_capacity(DIVERGENCE_WINDOW);
    let mut ys = Vec::with_capacity(DIVERGENCE_WINDOW);
    for m in k - DIVERGENCE_WINDOW..k {
        let d = shells[m] - shells[m - 1];
        if !(d > 1e-9 * shells[m].abs().max(1e-300)) {
            return false;
        }
        xs.push((m as f64).ln());
        ys.push(d.ln());
    }
    let nx = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / nx;
    let my = ys.iter().sum::<f64>() / nx;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let q = -sxy / sxx;
    q < DIVERGENCE_DECAY
}

/// Grid suprema of the multiplier quantities for `psi`.
pub fn multiplier_criteria(psi: &HoloFunction, sp: &SpaceParams, grid: &BoundaryGrid, cfg: &QuadConfig) -> Result<MultiplierReport> {
    let shells = grid.max_shell as usize + 1;
    let mut table = vec![vec![0.0f64; shells]; Criterion::ALL.len()];
    let q = sp.growth_exponent();
    let beta = sp.mu.beta;
    for (z, &sh) in grid.points.iter().zip(&grid.shell) {
        if z.dim() != sp.n {
            return Err(Error::DimensionMismatch { left: z.dim(), right: sp.n });
        }
        let x = z.gap();
        let modulus = psi.modulus(z)?;
        let g = gradient_norm(psi, z)?;
        let nu = sp.nu.at_gap(x);
        let l = log_e_over(x);
        let ll = l.ln();
        let growth = growth_integral(sp, z.norm(), cfg)?;
        let vals = [
            (sp.nu.ln_at_gap(x) - sp.mu.ln_at_gap(x) - q * x.ln()).exp() * modulus,
            nu * g * ll,
            nu * g * l.powf(1.0 - beta),
            x * g * l * ll,
            x * g * l,
            nu * g * growth,
            nu * g,
            modulus,
        ];
        for (row, v) in table.iter_mut().zip(vals) {
            let slot = &mut row[sh as usize];
            *slot = slot.max(v);
        }
    }
    let criteria = Criterion::ALL
        .iter()
        .zip(table)
        .map(|(c, shells)| CriterionValue {
            id: c.id(),
            value: shells.iter().copied().fold(0.0, f64::max),
            diverges: shell_divergence(&shells),
            shells,
        })
        .collect();
    Ok(MultiplierReport { criteria, grid_points: grid.points.len(), max_shell: grid.max_shell, n: sp.n })
}

/// Polynomial values on the closed ball.
fn poly_value(f: &HoloFunction, z: &CPoint) -> C64 {
    match f {
        HoloFunction::Constant(c) => *c,
        HoloFunction::Monomial { coeff, exponents } => {
            exponents.iter().zip(z.coords()).fold(*coeff, |acc, (&e, &zj)| acc * zj.powi(e as i32))
        }
        _ => C64::new(f64::NAN, 0.0),
    }
}

/// `int_B f(w) (1 - <z,w>)^{-(n+1+alpha)} dv_alpha(w)` next to `f(z)`.
pub fn bergman_reproduce(f: &HoloFunction, alpha: f64, z: &CPoint, cfg: &QuadConfig) -> Result<(C64, C64)> {
    if !(alpha > -1.0) {
        return Err(invalid("alpha must exceed -1"));
    }
    if !matches!(f, HoloFunction::Constant(_) | HoloFunction::Monomial { .. }) {
        return Err(Error::Unsupported(String::from("reproduction is checked for polynomials only")));
    }
    z.require_interior()?;
    let n = z.dim();
    f.check_dim(n)?;
    let direct = f.value(z)?;
    let c = weighted_volume_constant(n, alpha);
    let power = -(n as f64 + 1.0 + alpha);
    let integrand = |w: &CPoint| -> C64 {
        let fw = poly_value(f, w);
        let k = (one() - z.inner(w).expect("same dimension")).powf(power);
        fw * k * (c * w.gap().max(0.0).powf(alpha))
    };
    // one complex line suffices when f depends only on the coordinate along z
    let base = match f.linear_form(n) {
        _ if n == 1 => Some(z.clone()),
        None if f.is_constant() => Some(z.clone()),
        Some(v) if common_line(&[&v, z], n).is_some() => Some(v),
        _ => None,
    };
    // dv_alpha has total mass 1; adding `shift dv_alpha` keeps a vanishing
    // real or imaginary part from defeating the relative tolerance
    let shift = 1.0 + direct.norm();
    let mass = |w: &CPoint| shift * c * w.gap().max(0.0).powf(alpha);
    let re = integrate_ball(&|w| integrand(w).re + mass(w), n, cfg, base.as_ref())?;
    let im = integrate_ball(&|w| integrand(w).im + mass(w), n, cfg, base.as_ref())?;
    Ok((C64::new(re.value - shift, im.value - shift), direct))
}
