//! The integral families as evaluatable left-hand sides.


use crate::error::{invalid, Error, Result};
use crate::geometry::{common_line, CPoint, C64};
use crate::quadrature::{
    ball_slice_weight, circle_average, integrate_ball, integrate_radial_gap, integrate_slice,
    integrate_sphere, peak_angles, IntegrationResult, QuadConfig,
};
use crate::special::{ln_gamma, log_e_over};

/// Parameters of one integral family.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Family {
    /// `int_S |1-<xi,w>|^{-(n+c)} d sigma`
    PropAI { c: f64 },
    /// `int_B (1-|z|^2)^t |1-<z,w>|^{-(n+1+t+c)} dv`
    PropAJ { t: f64, c: f64 },
    /// `int_S |1-<xi,w>|^{-(n+c)} |Log(e/(1-<xi,w>))|^k d sigma`
    P31G { c: f64, k: f64 },
    /// `int_B (1-|z|^2)^delta |1-<z,w>|^{-(n+1+delta+c)} |Log(e/(1-<z,w>))|^k dv`
    P31F { delta: f64, c: f64, k: f64 },
    /// `int_B (1-|z|^2)^delta |1-<z,w>|^{-t} |1-<z,a>|^{-r} log^k(e/(1-|z|^2)) dv`
    PropB { delta: f64, t: f64, r: f64, k: f64 },
    /// `int_S |1-<xi,w>|^{-(n+t)} |1-<xi,a>|^{-(n+r)} d sigma`
    PropC { t: f64, r: f64 },
    /// `int_B (1-|z|^2)^delta |1-<z,w>|^{-t} |1-<z,eta>|^{-r} |Log(e/(1-<z,eta>))|^{-k} log^k(e/(1-|z|^2)) dv`
    P32 { delta: f64, t: f64, r: f64, k: f64 },
    /// `int_S |1-<xi,w>|^{-t} |1-<xi,eta>|^{-r} log^k(e/|1-<xi,eta>|) d sigma`
    L22 { t: f64, r: f64, k: f64 },
    /// `int_0^1 (1-r)^delta (1-r rho)^{-(delta+1+c)} log^k(e/(1-rho r)) dr`
    L21I1 { delta: f64, c: f64, k: f64 },
    /// `int_0^1 (1-r)^delta (1-r rho)^{-(delta+1+c)} log^k(e(1-rho r)/(1-rho)) dr`
    L21I2 { delta: f64, c: f64, k: f64 },
}

/// How `|log(e/u)|` is read for complex `u`: the modulus of the principal
/// logarithm, or `log(e/|u|)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LogForm {
    #[default]
    Complex,
    Modulus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    OnePoint,
    TwoPoint,
    Radial,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelFamily {
    pub family: Family,
    pub n: usize,
    pub log_form: LogForm,
}

fn finite(vals: &[f64]) -> bool {
    vals.iter().all(|v| v.is_finite())
}

impl KernelFamily {
    /// Validates the parameter ranges of the family.
    pub fn new(family: Family, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let nf = n as f64;
        use Family::*;
        let ok = match family {
            PropAI { c } => finite(&[c]),
            PropAJ { t, c } => finite(&[t, c]) && t > -1.0,
            P31G { c, k } => finite(&[c, k]),
            P31F { delta, c, k } => finite(&[delta, c, k]) && delta > -1.0,
            PropB { delta, t, r, k } => {
                finite(&[delta, t, r, k]) && delta > -1.0 && r >= 0.0 && t >= 0.0 && k >= 0.0
            }
            PropC { t, r } => finite(&[t, r]) && t + nf > 0.0 && r + nf > 0.0,
            P32 { delta, t, r, k } => {
                finite(&[delta, t, r, k]) && delta > -1.0 && r > 0.0 && t > 0.0 && k > 0.0
            }
            L22 { t, r, k } => finite(&[t, r, k]) && t > nf && nf > r && r > 0.0 && k < 0.0,
            L21I1 { delta, c, k } | L21I2 { delta, c, k } => {
                finite(&[delta, c, k]) && c >= 0.0 && delta > -1.0
            }
        };
        if !ok {
            return Err(invalid(format!("parameters out of range for {family:?} with n = {n}")));
        }
        Ok(Self { family, n, log_form: LogForm::Complex })
    }

    pub fn with_log_form(mut self, log_form: LogForm) -> Self {
        self.log_form = log_form;
        self
    }

    pub fn arity(&self) -> Arity {
        use Family::*;
        match self.family {
            PropAI { .. } | PropAJ { .. } | P31G { .. } | P31F { .. } => Arity::OnePoint,
            PropB { .. } | PropC { .. } | P32 { .. } | L22 { .. } => Arity::TwoPoint,
            L21I1 { .. } | L21I2 { .. } => Arity::Radial,
        }
    }

    /// Short tag used on the command line and in reports.
    pub fn tag(&self) -> &'static str {
        use Family::*;
        match self.family {
            PropAI { .. } => "propA-I",
            PropAJ { .. } => "propA-J",
            P31G { .. } => "p31-G",
            P31F { .. } => "p31-F",
            PropB { .. } => "propB",
            PropC { .. } => "propC",
            P32 { .. } => "p32",
            L22 { .. } => "l22",
            L21I1 { .. } => "l21-I1",
            L21I2 { .. } => "l21-I2",
        }
    }
}

/// The points at which a family is evaluated.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointPair {
    pub w: CPoint,
    pub second: Option<CPoint>,
    pub rho: Option<f64>,
}

impl PointPair {
    pub fn one(w: CPoint) -> Self {
        Self { w, second: None, rho: None }
    }

    pub fn two(w: CPoint, a: CPoint) -> Self {
        Self { w, second: Some(a), rho: None }
    }

    pub fn radial(rho: f64) -> Self {
        Self { w: CPoint::zero(1), second: None, rho: Some(rho) }
    }

    pub(crate) fn check(&self, fam: &KernelFamily) -> Result<()> {
        match fam.arity() {
            Arity::Radial => {
                let rho = self.rho.ok_or(Error::Arity { expected: "a radius rho" })?;
                if !(0.0..1.0).contains(&rho) {
                    return Err(invalid("rho must lie in [0, 1)"));
                }
            }
            Arity::OnePoint | Arity::TwoPoint => {
                let two = fam.arity() == Arity::TwoPoint;
                if two != self.second.is_some() || self.rho.is_some() {
                    return Err(Error::Arity { expected: if two { "two" } else { "one" } });
                }
                for p in core::iter::once(&self.w).chain(self.second.as_ref()) {
                    if p.dim() != fam.n {
                        return Err(Error::DimensionMismatch { left: p.dim(), right: fam.n });
                    }
                    p.require_interior()?;
                }
            }
        }
        Ok(())
    }
}

/// `|Log(e/u)|^k` with the principal branch, for `0 < |u| <= 2`.
pub fn log_factor(u: C64, k: f64) -> Result<f64> {
    if u.norm() == 0.0 {
        return Err(invalid("log factor at u = 0 (boundary contact)"));
    }
    Ok(complex_log_modulus(u).powf(k))
}

/// `|Log(e/u)| = |1 - Log u|`.
fn complex_log_modulus(u: C64) -> f64 {
    let l = u.ln();
    (1.0 - l.re).hypot(l.im)
}

/// Which point a factor `|1 - <z, p>|` refers to.
#[derive(Clone, Copy, Debug)]
enum Pt {
    W,
    A,
}

/// `|u|^{-power} L(u)^{log_power}` with `u = 1 - <z, p>`.
#[derive(Clone, Copy, Debug)]
struct PointFactor {
    pt: Pt,
    power: f64,
    log_power: f64,
    log: LogForm,
}

/// A family rewritten as radial part times point factors:
/// `g(1-|z|^2) prod |1-<z,p>|^{-q} L^k`, integrated over the ball, or the
/// point factors alone integrated over the sphere.
struct Integrand {
    sphere: bool,
    radial_power: f64,
    radial_log_power: f64,
    factors: Vec<PointFactor>,
}

impl Integrand {
    fn of(fam: &KernelFamily) -> Self {
        let nf = fam.n as f64;
        let lf = fam.log_form;
        let pf = |pt, power, log_power, log| PointFactor { pt, power, log_power, log };
        use Family::*;
        let (sphere, rp, rl, factors) = match fam.family {
            PropAI { c } => (true, 0.0, 0.0, vec![pf(Pt::W, nf + c, 0.0, lf)]),
            PropAJ { t, c } => (false, t, 0.0, vec![pf(Pt::W, nf + 1.0 + t + c, 0.0, lf)]),
            P31G { c, k } => (true, 0.0, 0.0, vec![pf(Pt::W, nf + c, k, lf)]),
            P31F { delta, c, k } => {
                (false, delta, 0.0, vec![pf(Pt::W, nf + 1.0 + delta + c, k, lf)])
            }
            PropB { delta, t, r, k } => (
                false,
                delta,
                k,
                vec![pf(Pt::W, t, 0.0, lf), pf(Pt::A, r, 0.0, lf)],
            ),
            PropC { t, r } => (
                true,
                0.0,
                0.0,
                vec![pf(Pt::W, nf + t, 0.0, lf), pf(Pt::A, nf + r, 0.0, lf)],
            ),
            P32 { delta, t, r, k } => (
                false,
                delta,
                k,
                vec![pf(Pt::W, t, 0.0, lf), pf(Pt::A, r, -k, lf)],
            ),
            L22 { t, r, k } => (
                true,
                0.0,
                0.0,
                vec![pf(Pt::W, t, 0.0, lf), pf(Pt::A, r, k, LogForm::Modulus)],
            ),
            L21I1 { .. } | L21I2 { .. } => unreachable!("radial families have no point factors"),
        };
        Self { sphere, radial_power: rp, radial_log_power: rl, factors }
    }

    /// `ln g(x)` for the radial part.
    fn ln_radial(&self, x: f64) -> f64 {
        let mut v = self.radial_power * x.ln();
        if self.radial_log_power != 0.0 {
            v += self.radial_log_power * log_e_over(x).ln();
        }
        v
    }

    /// `ln prod |u_p|^{-q} L(u_p)^k` given `u_w` and `u_a`.
    fn ln_points(&self, uw: C64, ua: C64) -> f64 {
        let mut v = 0.0;
        for f in &self.factors {
            let u = match f.pt {
                Pt::W => uw,
                Pt::A => ua,
            };
            let m = u.norm();
            v -= f.power * m.ln();
            if f.log_power != 0.0 {
                let l = match f.log {
                    LogForm::Complex => complex_log_modulus(u),
                    LogForm::Modulus => log_e_over(m),
                };
                v += f.log_power * l.ln();
            }
        }
        v
    }
}

/// Evaluates the left-hand side of a family at the given points.
pub fn eval_lhs(fam: &KernelFamily, pts: &PointPair, cfg: &QuadConfig) -> Result<IntegrationResult> {
    pts.check(fam)?;
    match fam.family {
        Family::L21I1 { delta, c, k } | Family::L21I2 { delta, c, k } => {
            let rho = pts.rho.expect("checked");
            let second = matches!(fam.family, Family::L21I2 { .. });
            eval_radial(delta, c, k, rho, second, cfg)
        }
        _ => eval_points(fam, pts, cfg),
    }
}

fn eval_radial(
    delta: f64,
    c: f64,
    k: f64,
    rho: f64,
    second: bool,
    cfg: &QuadConfig,
) -> Result<IntegrationResult> {
    let gap_rho = 1.0 - rho;
    let f = |r: f64, one_minus_r: f64| {
        // 1 - r rho = (1 - r) + r (1 - rho)
        let d = one_minus_r + r * gap_rho;
        // log(e (1 - rho r)/(1 - rho)) = log(e / x) with x = (1 - rho)/(1 - rho r)
        let log_arg = if second { gap_rho / d } else { d };
        let mut v = delta * one_minus_r.ln() - (delta + 1.0 + c) * d.ln();
        if k != 0.0 {
            v += k * log_e_over(log_arg).ln();
        }
        v.exp()
    };
    integrate_radial_gap(&f, cfg)
}

fn eval_points(fam: &KernelFamily, pts: &PointPair, cfg: &QuadConfig) -> Result<IntegrationResult> {
    let n = fam.n;
    let integrand = Integrand::of(fam);
    let w = &pts.w;
    let a = pts.second.as_ref().unwrap_or(w);
    let one = C64::new(1.0, 0.0);
    if let Some(line) = common_line(&[w, a], n) {
        let (cw, ca) = (line.coordinates[0], line.coordinates[1]);
        let peaks = peak_angles(&line.coordinates);
        let h = |lambda: C64| {
            integrand.ln_points(one - lambda * cw.conj(), one - lambda * ca.conj()).exp()
        };
        if integrand.sphere {
            if n == 1 {
                return circle_average(&h, &peaks, cfg);
            }
            let nf = n as f64;
            let weight = |x: f64| Ok((nf - 1.0) * x.powf(nf - 2.0));
            return integrate_slice(&weight, &h, &peaks, cfg);
        }
        let weight = |x: f64| ball_weight(&integrand, n, x, cfg);
        return integrate_slice(&weight, &h, &peaks, cfg);
    }
    // the points span more than one complex line
    let f = |z: &CPoint| {
        let uw = one - z.inner(w).expect("same dimension");
        let ua = one - z.inner(a).expect("same dimension");
        let mut v = integrand.ln_points(uw, ua);
        if !integrand.sphere {
            v += integrand.ln_radial(z.gap());
        }
        v.exp()
    };
    if integrand.sphere {
        integrate_sphere(&f, n, cfg, None)
    } else {
        integrate_ball(&f, n, cfg, None)
    }
}

/// Weight of the ball slice reduction for the radial part of `integrand`.
fn ball_weight(integrand: &Integrand, n: usize, x: f64, cfg: &QuadConfig) -> Result<f64> {
    if n == 1 {
        return Ok(integrand.ln_radial(x).exp());
    }
    let p = integrand.radial_power;
    if integrand.radial_log_power == 0.0 {
        // n(n-1) x^{n-1} B(p+1, n-1) x^p
        let nf = n as f64;
        let ln_c = ln_gamma(nf + 1.0) + ln_gamma(p + 1.0) - ln_gamma(nf + p);
        return Ok((ln_c + (nf - 1.0 + p) * x.ln()).exp());
    }
    ball_slice_weight(&|y| integrand.ln_radial(y), n, x, 1e-3 * cfg.rel_tol, cfg.max_subdivisions)
}

/// `c_alpha = Gamma(n+1+alpha) / (n! Gamma(alpha+1))`, the normalizer of `dv_alpha`.
pub fn weighted_volume_constant(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    (ln_gamma(nf + 1.0 + alpha) - ln_gamma(nf + 1.0) - ln_gamma(alpha + 1.0)).exp()
}
