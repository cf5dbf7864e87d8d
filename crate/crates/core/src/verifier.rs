//! Boundary sweeps: evaluate a family and its estimate along radii tending to
//! the sphere, then judge whether the ratio stays in a bounded window and the
//! growth exponent matches.


use crate::asymptotics::{rhs_formula, CaseId, Estimate};
use crate::error::{invalid, Error, Result};
use crate::geometry::{CPoint, C64};
use crate::kernels::{eval_lhs, Arity, KernelFamily, PointPair};
use crate::quadrature::QuadConfig;
use crate::special::log_e_over;

/// How the second point is produced from `w`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Coupling {
    /// `a = w`
    Same,
    /// `a = -w`
    Antipodal,
    /// A fixed interior point.
    Fixed(CPoint),
    /// `a = e^{i theta} w`
    Rotated(f64),
}

impl Coupling {
    pub fn tag(&self) -> String {
        match self {
            Coupling::Same => String::from("same"),
            Coupling::Antipodal => String::from("antipodal"),
            Coupling::Fixed(_) => String::from("fixed"),
            Coupling::Rotated(th) => format!("rotated:{th}"),
        }
    }

    fn second(&self, w: &CPoint) -> CPoint {
        match self {
            Coupling::Same => w.clone(),
            Coupling::Antipodal => w.scale(C64::new(-1.0, 0.0)),
            Coupling::Fixed(a) => a.clone(),
            Coupling::Rotated(th) => w.scale(C64::from_polar(1.0, *th)),
        }
    }
}

/// Where and how a sweep is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    /// Strictly increasing, inside `(0, 1 - 1e-6]`.
    pub radii: Vec<f64>,
    /// Unit vectors; `w = radius * direction`. Ignored for radial families.
    pub directions: Vec<CPoint>,
    pub coupling: Coupling,
    pub cfg: QuadConfig,
    /// Multiplies the estimate by `gap^shift`. Zero except in negative controls.
    pub rhs_shift: f64,
}

/// `1 - 2^{-m}` for each `m`.
pub fn dyadic_radii(ms: impl IntoIterator<Item = u32>) -> Vec<f64> {
    ms.into_iter().map(|m| 1.0 - (-(m as f64)).exp2()).collect()
}

impl SweepPlan {
    pub fn new(radii: Vec<f64>, directions: Vec<CPoint>, coupling: Coupling, cfg: QuadConfig) -> Result<Self> {
        let plan = Self { radii, directions, coupling, cfg, rhs_shift: 0.0 };
        plan.validate()?;
        Ok(plan)
    }

    /// Radii `1 - 2^{-m}` for `m = 2..=13` along the first coordinate axis.
    pub fn standard(n: usize, coupling: Coupling) -> Self {
        Self {
            radii: dyadic_radii(2..=13),
            directions: vec![CPoint::basis(n, 0)],
            coupling,
            cfg: QuadConfig::default(),
            rhs_shift: 0.0,
        }
    }

    pub fn with_rhs_shift(mut self, shift: f64) -> Self {
        self.rhs_shift = shift;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(invalid("sweep needs at least one radius"));
        }
        if self.radii.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(invalid("radii must be strictly increasing"));
        }
        if !(self.radii[0] > 0.0) || !(self.radii[self.radii.len() - 1] <= 1.0 - 1e-6) {
            return Err(invalid("radii must lie in (0, 1 - 1e-6]"));
        }
        if self.directions.is_empty() {
            return Err(invalid("sweep needs at least one direction"));
        }
        for d in &self.directions {
            if (d.norm() - 1.0).abs() > 1e-12 {
                return Err(invalid("directions must be unit vectors"));
            }
        }
        if let Coupling::Fixed(a) = &self.coupling {
            a.require_interior()?;
        }
        self.cfg.validate()
    }

    /// Every grid point of the plan, in report order.
    pub fn rows(&self, fam: &KernelFamily) -> Vec<PlannedRow> {
        let dirs = if fam.arity() == Arity::Radial { 1 } else { self.directions.len() };
        let mut out = Vec::with_capacity(dirs * self.radii.len());
        for dir_index in 0..dirs {
            for (ri, &radius) in self.radii.iter().enumerate() {
                out.push(PlannedRow { index: out.len(), radius_index: ri, radius, dir_index });
            }
        }
        out
    }

    fn points(&self, fam: &KernelFamily, row: &PlannedRow) -> Result<(PointPair, f64)> {
        let r = row.radius;
        match fam.arity() {
            Arity::Radial => Ok((PointPair::radial(r), 1.0 - r)),
            arity => {
                let dir = &self.directions[row.dir_index];
                if dir.dim() != fam.n {
                    return Err(Error::DimensionMismatch { left: dir.dim(), right: fam.n });
                }
                let w = dir.scale(C64::new(r, 0.0));
                // (1 - r)(1 + r) keeps the gap accurate near r = 1
                let gap = (1.0 - r) * (1.0 + r);
                if arity == Arity::OnePoint {
                    Ok((PointPair::one(w), gap))
                } else {
                    let a = self.coupling.second(&w);
                    Ok((PointPair::two(w, a), gap))
                }
            }
        }
    }
}

/// Identifies one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannedRow {
    pub index: usize,
    pub radius_index: usize,
    pub radius: f64,
    pub dir_index: usize,
}

/// The dyadic level of a radius when it is `1 - 2^{-m}`, else the position.
fn level(row: &PlannedRow) -> u32 {
    let m = -(1.0 - row.radius).log2();
    let mr = m.round();
    if (m - mr).abs() < 1e-9 && mr >= 0.0 {
        mr as u32
    } else {
        row.radius_index as u32
    }
}

/// One evaluated grid point.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepRow {
    pub index: usize,
    pub m: u32,
    pub radius: f64,
    pub dir_index: usize,
    pub coupling: String,
    /// `1 - |w|^2`, or `1 - rho` for radial families.
    pub gap: f64,
    pub lhs: f64,
    pub lhs_err: f64,
    pub rhs: f64,
    /// The estimate with logarithmic factors dropped.
    pub rhs_power: f64,
    pub ratio: f64,
    pub case_id: String,
    /// Index of the largest term of a multi-term estimate.
    pub dominant_term: usize,
    /// Quadrature failure message, if any.
    pub failure: Option<String>,
}

impl SweepRow {
    /// Usable for windows and fits.
    pub fn usable(&self) -> bool {
        self.failure.is_none() && self.lhs.is_finite() && self.lhs > 0.0 && self.lhs_err <= 1e-3 * self.lhs
    }
}

/// Rows plus the summary statistics computed from the usable ones.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepReport {
    pub family: String,
    pub case: CaseId,
    pub rows: Vec<SweepRow>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub window: f64,
    /// Fitted boundary exponent with the estimate's log factors divided out.
    pub slope: f64,
    /// Plain least-squares slope of `ln lhs` against `ln gap`.
    pub raw_slope: f64,
    pub predicted: f64,
    pub excluded_rows: Vec<usize>,
    pub has_log_factors: bool,
}

/// The estimate a sweep compares against, including any negative-control shift.
pub fn sweep_estimate(fam: &KernelFamily, plan: &SweepPlan) -> Result<Estimate> {
    let est = rhs_formula(fam)?;
    Ok(if plan.rhs_shift != 0.0 {
        est.with_boundary_shift(fam.arity() == Arity::Radial, plan.rhs_shift)
    } else {
        est
    })
}

/// Evaluates one grid point. Quadrature failures are recorded in the row.
pub fn evaluate_row(fam: &KernelFamily, est: &Estimate, plan: &SweepPlan, row: &PlannedRow) -> Result<SweepRow> {
    let (pts, gap) = plan.points(fam, row)?;
    let rhs = est.value(&pts)?;
    let rhs_power = est.power_value(&pts)?;
    let terms = est.term_values(&pts)?;
    let dominant_term = terms
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
        .0;
    let mut cfg = plan.cfg.clone();
    cfg.stream = row.index as u64;
    let (lhs, lhs_err, failure) = match eval_lhs(fam, &pts, &cfg) {
        Ok(res) => (res.value, res.error_estimate, None),
        Err(Error::NotConverged { value, error }) => {
            (value, error, Some(format!("not converged (error estimate {error:e})")))
        }
        Err(e) => (f64::NAN, f64::NAN, Some(format!("{e}"))),
    };
    Ok(SweepRow {
        index: row.index,
        m: level(row),
        radius: row.radius,
        dir_index: row.dir_index,
        coupling: if fam.arity() == Arity::TwoPoint { plan.coupling.tag() } else { String::from("none") },
        gap,
        lhs,
        lhs_err,
        rhs,
        rhs_power,
        ratio: lhs / rhs,
        case_id: est.case.label(),
        dominant_term,
        failure,
    })
}

/// Number of trailing radii used by the exponent fit.
pub const FIT_TAIL: usize = 6;
/// Fewest usable tail radii a fit accepts.
pub const FIT_MIN: usize = 4;

fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Sorts rows by index and computes the summary. Deterministic in the
/// order rows were produced.
pub fn assemble(fam: &KernelFamily, case: CaseId, has_log_factors: bool, mut rows: Vec<SweepRow>) -> Result<SweepReport> {
    rows.sort_by_key(|r| r.index);
    if rows.iter().any(|r| r.case_id != case.label()) {
        return Err(invalid("case changed within one sweep"));
    }
    let excluded_rows: Vec<usize> = rows.iter().filter(|r| !r.usable()).map(|r| r.index).collect();
    let usable: Vec<&SweepRow> = rows.iter().filter(|r| r.usable()).collect();
    if usable.is_empty() {
        return Err(Error::InsufficientRows { have: 0, need: FIT_MIN });
    }
    let ratio_min = usable.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let ratio_max = usable.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let fit = fit_rows(&rows)?;
    Ok(SweepReport {
        family: String::from(fam.tag()),
        case,
        ratio_min,
        ratio_max,
        window: ratio_max / ratio_min,
        slope: fit.slope,
        raw_slope: fit.raw_slope,
        predicted: fit.predicted,
        rows,
        excluded_rows,
        has_log_factors,
    })
}

struct Fit {
    slope: f64,
    raw_slope: f64,
    predicted: f64,
}

fn directions_of(rows: &[SweepRow]) -> Vec<usize> {
    let mut dirs: Vec<usize> = rows.iter().map(|r| r.dir_index).collect();
    dirs.sort_unstable();
    dirs.dedup();
    dirs
}

/// Per-direction fits over the last usable radii, averaged over directions.
fn fit_rows(rows: &[SweepRow]) -> Result<Fit> {
    let dirs = directions_of(rows);
    let (mut slope, mut raw, mut pred) = (0.0, 0.0, 0.0);
    for &d in &dirs {
        let tail: Vec<&SweepRow> = {
            let mut v: Vec<&SweepRow> = rows.iter().filter(|r| r.dir_index == d && r.usable()).collect();
            let skip = v.len().saturating_sub(FIT_TAIL);
            v.drain(..skip);
            v
        };
        if tail.len() < FIT_MIN {
            return Err(Error::InsufficientRows { have: tail.len(), need: FIT_MIN });
        }
        let x: Vec<f64> = tail.iter().map(|r| r.gap.ln()).collect();
        let ln_lhs: Vec<f64> = tail.iter().map(|r| r.lhs.ln()).collect();
        let ln_ratio: Vec<f64> = tail.iter().map(|r| r.ratio.ln()).collect();
        let ln_pow: Vec<f64> = tail.iter().map(|r| r.rhs_power.ln()).collect();
        let p = ols_slope(&x, &ln_pow);
        pred += p;
        // ln lhs - ln(log factors) = ln ratio + ln rhs_power
        slope += ols_slope(&x, &ln_ratio) + p;
        raw += ols_slope(&x, &ln_lhs);
    }
    let k = dirs.len() as f64;
    Ok(Fit { slope: slope / k, raw_slope: raw / k, predicted: pred / k })
}

/// `(slope, predicted)` of a finished report.
pub fn fit_boundary_exponent(report: &SweepReport) -> Result<(f64, f64)> {
    let fit = fit_rows(&report.rows)?;
    Ok((fit.slope, fit.predicted))
}

/// Least-squares slope of `ln lhs` against `ln log(e/gap)` over the fit tail:
/// the power of the logarithm for families that grow only logarithmically.
pub fn fit_log_exponent(report: &SweepReport) -> Result<f64> {
    let dirs = directions_of(&report.rows);
    let mut total = 0.0;
    for &d in &dirs {
        let mut tail: Vec<&SweepRow> = report.rows.iter().filter(|r| r.dir_index == d && r.usable()).collect();
        let skip = tail.len().saturating_sub(FIT_TAIL);
        tail.drain(..skip);
        if tail.len() < FIT_MIN {
            return Err(Error::InsufficientRows { have: tail.len(), need: FIT_MIN });
        }
        let x: Vec<f64> = tail.iter().map(|r| log_e_over(r.gap).ln()).collect();
        let y: Vec<f64> = tail.iter().map(|r| r.lhs.ln()).collect();
        total += ols_slope(&x, &y);
    }
    Ok(total / dirs.len() as f64)
}

/// Evaluates every row in order and assembles the report.
pub fn run_sweep(fam: &KernelFamily, plan: &SweepPlan) -> Result<SweepReport> {
    plan.validate()?;
    let est = sweep_estimate(fam, plan)?;
    let rows = plan
        .rows(fam)
        .iter()
        .map(|row| evaluate_row(fam, &est, plan, row))
        .collect::<Result<Vec<_>>>()?;
    assemble(fam, est.case, est.has_log_factors(), rows)
}

/// Default ratio window bound.
pub const DEFAULT_WINDOW_BOUND: f64 = 50.0;
/// Slope tolerance floor when the estimate has log factors.
pub const LOG_SLOPE_TOL: f64 = 0.1;
/// The window over the last 4 radii must be within this fraction of the
/// window over the last 8.
pub const STABILITY_FRACTION: f64 = 0.25;

/// Outcome of [`verdict`] with the quantities it was based on.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Verdict {
    pub pass: bool,
    pub one_sided: bool,
    pub window_ok: bool,
    pub slope_ok: bool,
    pub stable_ok: bool,
    pub window: f64,
    pub tail4_window: f64,
    pub tail8_window: f64,
    pub slope: f64,
    pub predicted: f64,
    pub slope_tol: f64,
}

fn tail_window(rows: &[SweepRow], radii: usize) -> f64 {
    let mut idx: Vec<usize> = rows.iter().filter(|r| r.usable()).map(|r| r.m as usize).collect();
    idx.sort_unstable();
    idx.dedup();
    let cut = idx.len().saturating_sub(radii);
    let keep = &idx[cut..];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in rows.iter().filter(|r| r.usable() && keep.contains(&(r.m as usize))) {
        lo = lo.min(r.ratio);
        hi = hi.max(r.ratio);
    }
    hi / lo
}

/// Two-sided estimates pass when the window is bounded, the fitted exponent
/// matches, and the window has stopped growing; one-sided lower bounds only
/// need `ratio_min >= 1 / window_bound`.
pub fn verdict(report: &SweepReport, window_bound: f64, slope_tol: f64) -> Verdict {
    let tol = if report.has_log_factors { slope_tol.max(LOG_SLOPE_TOL) } else { slope_tol };
    let t4 = tail_window(&report.rows, 4);
    let t8 = tail_window(&report.rows, 8);
    let one_sided = report.case.one_sided();
    let (window_ok, slope_ok, stable_ok, pass);
    if one_sided {
        window_ok = report.ratio_min >= 1.0 / window_bound;
        slope_ok = true;
        stable_ok = true;
        pass = window_ok;
    } else {
        window_ok = report.window <= window_bound;
        slope_ok = (report.slope - report.predicted).abs() <= tol;
        stable_ok = (t8 - t4).abs() <= STABILITY_FRACTION * t8;
        pass = window_ok && slope_ok && stable_ok;
    }
    Verdict {
        pass,
        one_sided,
        window_ok,
        slope_ok,
        stable_ok,
        window: report.window,
        tail4_window: t4,
        tail8_window: t8,
        slope: report.slope,
        predicted: report.predicted,
        slope_tol: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Family;
    use approx::assert_relative_eq;

    fn fam(f: Family, n: usize) -> KernelFamily {
        KernelFamily::new(f, n).unwrap()
    }

    fn one_point(f: Family) -> SweepReport {
        run_sweep(&fam(f, 1), &SweepPlan::standard(1, Coupling::Same)).unwrap()
    }

    #[test]
    fn closed_form_window_is_tight() {
        let rep = one_point(Family::PropAI { c: 1.0 });
        assert_eq!(rep.case.label(), "A(3)");
        assert!(rep.window <= 1.001, "window {}", rep.window);
        assert!((rep.slope + 1.0).abs() <= 0.02);
        assert!(verdict(&rep, 2.0, 0.05).pass);
        // |1 - zw|^{-4} over the disk integrates to (1-|w|^2)^{-2} exactly
        let rep = one_point(Family::PropAJ { t: 0.0, c: 2.0 });
        assert!(rep.window <= 1.01, "window {}", rep.window);
        // the circle kernel |1 - xi w|^{-3} is only asymptotic: its ratio tends to 4/pi
        let rep = one_point(Family::PropAI { c: 2.0 });
        assert!(rep.ratio_max <= 4.0 / core::f64::consts::PI * (1.0 + 1e-6));
        assert!(rep.ratio_max >= 1.27);
    }

    #[test]
    fn bounded_case_has_flat_slope() {
        let rep = one_point(Family::PropAI { c: -0.5 });
        assert!(rep.slope.abs() <= 0.05);
        assert!(verdict(&rep, DEFAULT_WINDOW_BOUND, 0.05).pass);
    }

    #[test]
    fn log_corrected_slope() {
        let rep = one_point(Family::P31G { c: 0.5, k: 1.0 });
        assert_eq!(rep.case.label(), "3.1(2)");
        assert!((rep.slope + 0.5).abs() <= 0.1, "slope {}", rep.slope);
        // the plain fit still sees the logarithm
        assert!(rep.raw_slope < -0.55);
        assert!(verdict(&rep, DEFAULT_WINDOW_BOUND, 0.05).pass);
    }

    #[test]
    fn radial_closed_forms() {
        let plan = SweepPlan::standard(1, Coupling::Same);
        for c in [0.0, 1.0] {
            let rep = run_sweep(&fam(Family::L21I1 { delta: 0.0, c, k: 0.0 }, 1), &plan).unwrap();
            assert!(rep.window <= 1.01 || c == 0.0, "window {}", rep.window);
        }
        let rep = run_sweep(&fam(Family::L21I1 { delta: 0.0, c: 0.0, k: 0.0 }, 1), &plan).unwrap();
        // -log(1-rho)/rho against log(e/(1-rho)): tends to 1 slowly
        let p = fit_log_exponent(&rep).unwrap();
        assert!((p - 1.0).abs() <= 0.2, "log exponent {p}");
    }

    #[test]
    fn two_point_same_coupling() {
        let f = fam(Family::PropB { delta: 0.0, t: 1.5, r: 1.0, k: 0.0 }, 1);
        let rep = run_sweep(&f, &SweepPlan::standard(1, Coupling::Same)).unwrap();
        assert!(rep.rows.iter().all(|r| r.ratio.is_finite()));
        assert!(rep.window <= 50.0, "window {}", rep.window);
    }

    #[test]
    fn one_sided_lower_bound() {
        let f = fam(Family::L22 { t: 1.6, r: 0.4, k: -1.0 }, 1);
        let rep = run_sweep(&f, &SweepPlan::standard(1, Coupling::Same)).unwrap();
        let v = verdict(&rep, DEFAULT_WINDOW_BOUND, 0.05);
        assert!(v.one_sided && v.pass);
    }

    #[test]
    fn shifted_estimate_fails_slope() {
        let plan = SweepPlan::standard(1, Coupling::Same).with_rhs_shift(0.5);
        let rep = run_sweep(&fam(Family::PropAI { c: 1.0 }, 1), &plan).unwrap();
        let v = verdict(&rep, DEFAULT_WINDOW_BOUND, 0.05);
        assert!(!v.slope_ok && !v.pass);
        assert_relative_eq!(rep.predicted, -0.5, epsilon = 1e-9);
    }

    fn synthetic(ratios: &[f64]) -> SweepReport {
        let case = crate::asymptotics::classify(&fam(Family::PropAI { c: 1.0 }, 1)).unwrap();
        let rows = ratios
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                let gap = (-((i + 2) as f64)).exp2();
                SweepRow {
                    index: i,
                    m: i as u32 + 2,
                    radius: 1.0 - gap,
                    dir_index: 0,
                    coupling: String::from("none"),
                    gap,
                    lhs: q / gap,
                    lhs_err: 0.0,
                    rhs: 1.0 / gap,
                    rhs_power: 1.0 / gap,
                    ratio: q,
                    case_id: case.label(),
                    dominant_term: 0,
                    failure: None,
                }
            })
            .collect();
        assemble(&fam(Family::PropAI { c: 1.0 }, 1), case, false, rows).unwrap()
    }

    #[test]
    fn divergent_tail_fails_stabilization() {
        let mut q = vec![1.0; 10];
        q[9] = 10.0;
        let v = verdict(&synthetic(&q), DEFAULT_WINDOW_BOUND, 0.05);
        assert!(!v.pass);
        let v = verdict(&synthetic(&[1.0; 10]), DEFAULT_WINDOW_BOUND, 0.05);
        assert!(v.pass && v.stable_ok);
    }

    #[test]
    fn excluded_rows_are_reported() {
        let mut rep = synthetic(&[1.0; 10]);
        rep.rows[3].failure = Some(String::from("not converged"));
        let rep = assemble(&fam(Family::PropAI { c: 1.0 }, 1), rep.case, false, rep.rows).unwrap();
        assert_eq!(rep.excluded_rows, vec![3]);
    }

    #[test]
    fn assembly_ignores_production_order() {
        let f = fam(Family::PropAI { c: 0.5 }, 2);
        let plan = SweepPlan::standard(2, Coupling::Same);
        let est = sweep_estimate(&f, &plan).unwrap();
        let mut rows: Vec<SweepRow> =
            plan.rows(&f).iter().map(|s| evaluate_row(&f, &est, &plan, s).unwrap()).collect();
        let a = assemble(&f, est.case, false, rows.clone()).unwrap();
        rows.reverse();
        let b = assemble(&f, est.case, false, rows).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn plan_validation() {
        let cfg = QuadConfig::default();
        let d = vec![CPoint::basis(1, 0)];
        assert!(SweepPlan::new(vec![0.5, 0.4], d.clone(), Coupling::Same, cfg.clone()).is_err());
        assert!(SweepPlan::new(vec![0.5, 1.0 - 1e-7], d.clone(), Coupling::Same, cfg.clone()).is_err());
        assert!(SweepPlan::new(vec![0.5], vec![CPoint::from_real(&[0.5])], Coupling::Same, cfg.clone()).is_err());
        assert!(SweepPlan::new(vec![0.5, 0.75], d, Coupling::Same, cfg).is_ok());
    }

    #[test]
    fn uncovered_regime_is_refused() {
        let f = fam(Family::P32 { delta: 0.0, t: 1.0, r: 3.0, k: 1.0 }, 1);
        let err = run_sweep(&f, &SweepPlan::standard(1, Coupling::Fixed(CPoint::from_real(&[0.5])))).unwrap_err();
        assert!(matches!(err, Error::UncoveredRegime { .. }));
    }
}
