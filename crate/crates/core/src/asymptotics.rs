//! Case tables: which two-sided estimate applies to a parameter set, and the
//! value of that estimate at given points.


use crate::error::{invalid, Error, Result};
use crate::geometry::{mobius, mobius_gap, CPoint, C64};
use crate::kernels::{Family, KernelFamily, PointPair};
use crate::special::{log_e_over, loglog_e2_over};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PropTag {
    A,
    L21,
    P31,
    B,
    C,
    P32,
    L22Lower,
}

impl PropTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PropTag::A => "A",
            PropTag::L21 => "2.1",
            PropTag::P31 => "3.1",
            PropTag::B => "B",
            PropTag::C => "C",
            PropTag::P32 => "3.2",
            PropTag::L22Lower => "2.2-lower",
        }
    }
}

/// One row of a case table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CaseId {
    pub prop: PropTag,
    pub index: u8,
    pub condition: &'static str,
    pub formula: &'static str,
}

impl CaseId {
    /// `B(4)`, `3.1(2)`, `2.2-lower`.
    pub fn label(&self) -> String {
        match self.prop {
            PropTag::L22Lower => String::from(self.prop.as_str()),
            p => format!("{}({})", p.as_str(), self.index),
        }
    }

    /// Lower-bound-only estimates.
    pub fn one_sided(&self) -> bool {
        self.prop == PropTag::L22Lower
    }
}

impl core::fmt::Display for CaseId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.label(), self.condition)
    }
}

/// Quantities the estimates are built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// `1 - |w|^2`
    GapW,
    /// `1 - |a|^2`
    GapA,
    /// `1 - rho`
    GapRho,
    /// `|1 - <w, a>|`
    DistWA,
    /// `|1 - <w, phi_w(a)>|`
    DistWPhiWA,
    /// `|1 - <a, phi_a(w)>|`
    DistAPhiAW,
    /// `1 - |phi_w(a)|^2 = 1 - |phi_a(w)|^2`
    GapPhi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    /// `q^e`
    Pow(Quantity, f64),
    /// `log^e(e/q)`
    Log(Quantity, f64),
    /// `log log(e^2/q)`
    LogLog(Quantity),
}

/// A sum of products of factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub case: CaseId,
    pub terms: Vec<Vec<Factor>>,
}

struct Resolved {
    vals: [Option<f64>; 7],
}

fn slot(q: Quantity) -> usize {
    q as usize
}

impl Resolved {
    fn new(pts: &PointPair, needs: &[Quantity]) -> Result<Self> {
        let mut vals = [None; 7];
        let one = C64::new(1.0, 0.0);
        let a = pts.second.as_ref();
        let need_a = || a.ok_or(Error::Arity { expected: "two" });
        for &q in needs {
            if vals[slot(q)].is_some() {
                continue;
            }
            let v = match q {
                Quantity::GapW => pts.w.gap(),
                Quantity::GapA => need_a()?.gap(),
                Quantity::GapRho => 1.0 - pts.rho.ok_or(Error::Arity { expected: "a radius rho" })?,
                Quantity::DistWA => (one - pts.w.inner(need_a()?)?).norm(),
                Quantity::DistWPhiWA => {
                    let phi = mobius(&pts.w, need_a()?)?;
                    (one - pts.w.inner(&phi)?).norm()
                }
                Quantity::DistAPhiAW => {
                    let a = need_a()?;
                    let phi = mobius(a, &pts.w)?;
                    (one - a.inner(&phi)?).norm()
                }
                Quantity::GapPhi => mobius_gap(&pts.w, need_a()?)?,
            };
            vals[slot(q)] = Some(v);
        }
        Ok(Self { vals })
    }

    fn get(&self, q: Quantity) -> f64 {
        self.vals[slot(q)].expect("resolved")
    }
}

fn factor_quantity(f: &Factor) -> Quantity {
    match *f {
        Factor::Pow(q, _) | Factor::Log(q, _) | Factor::LogLog(q) => q,
    }
}

impl Estimate {
    fn quantities(&self) -> Vec<Quantity> {
        self.terms.iter().flatten().map(factor_quantity).collect()
    }

    fn eval_with(&self, pts: &PointPair, powers_only: bool) -> Result<f64> {
        let res = Resolved::new(pts, &self.quantities())?;
        let mut total = 0.0;
        for term in &self.terms {
            let mut ln = 0.0;
            for f in term {
                ln += match *f {
                    Factor::Pow(q, e) => e * res.get(q).ln(),
                    Factor::Log(_, _) | Factor::LogLog(_) if powers_only => 0.0,
                    Factor::Log(q, e) => e * log_e_over(res.get(q)).ln(),
                    Factor::LogLog(q) => loglog_e2_over(res.get(q)).ln(),
                };
            }
            total += ln.exp();
        }
        Ok(total)
    }

    /// Value of the estimate; two-term cases return the sum of both terms.
    pub fn value(&self, pts: &PointPair) -> Result<f64> {
        self.eval_with(pts, false)
    }

    /// The same sum with every logarithmic factor replaced by 1.
    pub fn power_value(&self, pts: &PointPair) -> Result<f64> {
        self.eval_with(pts, true)
    }

    /// Values of the individual terms.
    pub fn term_values(&self, pts: &PointPair) -> Result<Vec<f64>> {
        self.terms
            .iter()
            .map(|t| Estimate { case: self.case, terms: vec![t.clone()] }.value(pts))
            .collect()
    }

    pub fn has_log_factors(&self) -> bool {
        self.terms.iter().flatten().any(|f| !matches!(f, Factor::Pow(..)))
    }

    /// Multiplies every term by `(1 - |w|^2)^shift` (or `(1 - rho)^shift` for
    /// radial families): a deliberately wrong estimate for negative controls.
    pub fn with_boundary_shift(mut self, radial: bool, shift: f64) -> Self {
        let q = if radial { Quantity::GapRho } else { Quantity::GapW };
        for t in &mut self.terms {
            t.push(Factor::Pow(q, shift));
        }
        self
    }
}

fn uncovered(fam: &KernelFamily, detail: &str) -> Error {
    Error::UncoveredRegime { family: String::from(fam.tag()), detail: String::from(detail) }
}

fn case(prop: PropTag, index: u8, condition: &'static str, formula: &'static str) -> CaseId {
    CaseId { prop, index, condition, formula }
}

use Factor::{Log, LogLog, Pow};
use Quantity::*;

/// Finds the unique case that covers the parameters of `fam`.
pub fn classify(fam: &KernelFamily) -> Result<CaseId> {
    Ok(rhs_formula(fam)?.case)
}

/// The classified case together with its estimate.
pub fn rhs_formula(fam: &KernelFamily) -> Result<Estimate> {
    let nf = fam.n as f64;
    let np1 = nf + 1.0;
    let est = |case: CaseId, terms: Vec<Vec<Factor>>| Ok(Estimate { case, terms });
    match fam.family {
        Family::PropAI { c } | Family::PropAJ { c, .. } => {
            if c < 0.0 {
                est(case(PropTag::A, 1, "c<0", "bounded"), vec![vec![]])
            } else if c == 0.0 {
                est(case(PropTag::A, 2, "c=0", "log(e/(1−|w|²))"), vec![vec![Log(GapW, 1.0)]])
            } else {
                est(case(PropTag::A, 3, "c>0", "(1−|w|²)^{−c}"), vec![vec![Pow(GapW, -c)]])
            }
        }
        Family::L21I1 { c, k, .. } | Family::L21I2 { c, k, .. } => {
            let first = matches!(fam.family, Family::L21I1 { .. });
            if c == 0.0 && k < -1.0 {
                est(case(PropTag::L21, 1, "c=0, k<−1", "bounded"), vec![vec![]])
            } else if c > 0.0 {
                if !first {
                    return Err(uncovered(fam, "c>0 is stated for I1 only"));
                }
                est(
                    case(PropTag::L21, 2, "c>0", "(1−ρ)^{−c} log^k(e/(1−ρ))"),
                    vec![vec![Pow(GapRho, -c), Log(GapRho, k)]],
                )
            } else if c == 0.0 && k > -1.0 {
                est(
                    case(PropTag::L21, 3, "c=0, k>−1", "log^{k+1}(e/(1−ρ))"),
                    vec![vec![Log(GapRho, k + 1.0)]],
                )
            } else if c == 0.0 && k == -1.0 {
                est(case(PropTag::L21, 4, "c=0, k=−1", "loglog(e²/(1−ρ))"), vec![vec![LogLog(GapRho)]])
            } else {
                Err(uncovered(fam, "c must be non-negative"))
            }
        }
        Family::P31G { c, k } | Family::P31F { c, k, .. } => {
            if c < 0.0 || (c == 0.0 && k < -1.0) {
                est(case(PropTag::P31, 1, "c<0, or c=0 and k<−1", "bounded"), vec![vec![]])
            } else if c > 0.0 {
                est(
                    case(PropTag::P31, 2, "c>0", "(1−|w|²)^{−c} log^k(e/(1−|w|²))"),
                    vec![vec![Pow(GapW, -c), Log(GapW, k)]],
                )
            } else if k > -1.0 {
                est(
                    case(PropTag::P31, 3, "c=0, k>−1", "log^{k+1}(e/(1−|w|²))"),
                    vec![vec![Log(GapW, k + 1.0)]],
                )
            } else {
                est(case(PropTag::P31, 4, "c=0, k=−1", "loglog(e²/(1−|w|²))"), vec![vec![LogLog(GapW)]])
            }
        }
        Family::PropB { delta, t, r, k } => {
            let s = t + r - delta;
            let tt = t - delta;
            let rr = r - delta;
            if s < np1 {
                est(case(PropTag::B, 1, "t+r−δ<n+1", "bounded"), vec![vec![]])
            } else if s == np1 && t > 0.0 && r > 0.0 {
                est(
                    case(PropTag::B, 2, "t+r−δ=n+1, t>0, r>0", "log^{k+1}(e/|1−⟨w,a⟩|)"),
                    vec![vec![Log(DistWA, k + 1.0)]],
                )
            } else if tt == np1 && r == 0.0 {
                est(
                    case(PropTag::B, 9, "t−δ=n+1, r=0", "log^{k+1}(e/(1−|w|²))"),
                    vec![vec![Log(GapW, k + 1.0)]],
                )
            } else if tt == np1 && np1 > rr && r > 0.0 {
                est(
                    case(
                        PropTag::B,
                        3,
                        "t−δ=n+1>r−δ, r>0",
                        "|1−⟨w,a⟩|^{−r} log^k(e/(1−|w|²)) log(e/|1−⟨w,φ_w(a)⟩|)",
                    ),
                    vec![vec![Pow(DistWA, -r), Log(GapW, k), Log(DistWPhiWA, 1.0)]],
                )
            } else if tt == np1 && rr == np1 {
                est(
                    case(
                        PropTag::B,
                        5,
                        "t−δ=n+1=r−δ",
                        "|1−⟨w,a⟩|^{−(δ+n+1)} [log^k(e/(1−|w|²)) log(e/|1−⟨w,φ_w(a)⟩|) + log^k(e/(1−|a|²)) log(e/|1−⟨a,φ_a(w)⟩|)]",
                    ),
                    vec![
                        vec![Pow(DistWA, -(delta + np1)), Log(GapW, k), Log(DistWPhiWA, 1.0)],
                        vec![Pow(DistWA, -(delta + np1)), Log(GapA, k), Log(DistAPhiAW, 1.0)],
                    ],
                )
            } else if s > np1 && np1 > rr.max(tt) {
                est(
                    case(
                        PropTag::B,
                        4,
                        "t+r−δ>n+1>max{r−δ,t−δ}",
                        "|1−⟨w,a⟩|^{−(t+r−δ−n−1)} log^k(e/|1−⟨w,a⟩|)",
                    ),
                    vec![vec![Pow(DistWA, -(s - np1)), Log(DistWA, k)]],
                )
            } else if tt > np1 && np1 > rr {
                est(
                    case(
                        PropTag::B,
                        6,
                        "t−δ>n+1>r−δ",
                        "(1−|w|²)^{−(t−δ−n−1)} |1−⟨w,a⟩|^{−r} log^k(e/(1−|w|²))",
                    ),
                    vec![vec![Pow(GapW, -(tt - np1)), Pow(DistWA, -r), Log(GapW, k)]],
                )
            } else if tt > np1 && rr > np1 {
                est(
                    case(
                        PropTag::B,
                        7,
                        "t−δ>n+1, r−δ>n+1",
                        "(1−|w|²)^{n+1+δ−t} |1−⟨w,a⟩|^{−r} log^k(e/(1−|w|²)) + (1−|a|²)^{n+1+δ−r} |1−⟨w,a⟩|^{−t} log^k(e/(1−|a|²))",
                    ),
                    vec![
                        vec![Pow(GapW, np1 + delta - t), Pow(DistWA, -r), Log(GapW, k)],
                        vec![Pow(GapA, np1 + delta - r), Pow(DistWA, -t), Log(GapA, k)],
                    ],
                )
            } else if tt > np1 && rr == np1 {
                est(
                    case(
                        PropTag::B,
                        8,
                        "t−δ>n+1=r−δ",
                        "(1−|w|²)^{−(t−δ−n−1)} |1−⟨w,a⟩|^{−(δ+n+1)} log^k(e/(1−|w|²)) + |1−⟨w,a⟩|^{−t} log^k(e/(1−|a|²)) log(e/|1−⟨a,φ_a(w)⟩|)",
                    ),
                    vec![
                        vec![Pow(GapW, -(tt - np1)), Pow(DistWA, -(delta + np1)), Log(GapW, k)],
                        vec![Pow(DistWA, -t), Log(GapA, k), Log(DistAPhiAW, 1.0)],
                    ],
                )
            } else {
                Err(uncovered(fam, "only the mirror image (roles of t and r exchanged) of a stated case applies"))
            }
        }
        Family::PropC { t, r } => {
            let s = t + r + nf;
            if s < 0.0 {
                est(case(PropTag::C, 1, "t+r+n<0", "bounded"), vec![vec![]])
            } else if s == 0.0 {
                est(case(PropTag::C, 2, "t+r+n=0", "log(e/|1−⟨w,a⟩|)"), vec![vec![Log(DistWA, 1.0)]])
            } else if t == 0.0 && r < 0.0 {
                est(
                    case(PropTag::C, 3, "t=0>r", "|1−⟨w,a⟩|^{−(n+r)} log(e/|1−⟨w,φ_w(a)⟩|)"),
                    vec![vec![Pow(DistWA, -(nf + r)), Log(DistWPhiWA, 1.0)]],
                )
            } else if t < 0.0 && r < 0.0 {
                est(
                    case(PropTag::C, 4, "t+r+n>0>max{r,t}", "|1−⟨w,a⟩|^{−(t+r+n)}"),
                    vec![vec![Pow(DistWA, -s)]],
                )
            } else if t == 0.0 && r == 0.0 {
                est(
                    case(PropTag::C, 5, "t=0=r", "|1−⟨w,a⟩|^{−n} log(e/(1−|φ_w(a)|²))"),
                    vec![vec![Pow(DistWA, -nf), Log(GapPhi, 1.0)]],
                )
            } else if t > 0.0 && r < 0.0 {
                est(
                    case(PropTag::C, 6, "t>0>r", "(1−|w|²)^{−t} |1−⟨w,a⟩|^{−(n+r)}"),
                    vec![vec![Pow(GapW, -t), Pow(DistWA, -(nf + r))]],
                )
            } else if t > 0.0 && r > 0.0 {
                est(
                    case(
                        PropTag::C,
                        7,
                        "t>0, r>0",
                        "(1−|w|²)^{−t} |1−⟨w,a⟩|^{−(n+r)} + (1−|a|²)^{−r} |1−⟨w,a⟩|^{−(n+t)}",
                    ),
                    vec![
                        vec![Pow(GapW, -t), Pow(DistWA, -(nf + r))],
                        vec![Pow(GapA, -r), Pow(DistWA, -(nf + t))],
                    ],
                )
            } else if t > 0.0 && r == 0.0 {
                est(
                    case(
                        PropTag::C,
                        8,
                        "t>0=r",
                        "(1−|w|²)^{−t} |1−⟨w,a⟩|^{−n} + |1−⟨w,a⟩|^{−(n+t)} log(e/(1−|φ_a(w)|²))",
                    ),
                    vec![
                        vec![Pow(GapW, -t), Pow(DistWA, -nf)],
                        vec![Pow(DistWA, -(nf + t)), Log(GapPhi, 1.0)],
                    ],
                )
            } else {
                Err(uncovered(fam, "only the mirror image (roles of t and r exchanged) of a stated case applies"))
            }
        }
        Family::P32 { delta, t, r, k } => {
            let s = r + t - delta;
            let tt = t - delta;
            let rr = r - delta;
            if s > np1 && np1 > tt.max(rr) {
                est(
                    case(PropTag::P32, 1, "r+t−δ>n+1>max{t−δ,r−δ}", "|1−⟨w,η⟩|^{−(r+t−δ−n−1)}"),
                    vec![vec![Pow(DistWA, -(s - np1))]],
                )
            } else if tt == np1 && np1 > rr {
                est(
                    case(
                        PropTag::P32,
                        2,
                        "t−δ=n+1>r−δ",
                        "|1−⟨w,η⟩|^{−r} log^{−k}(e/|1−⟨w,η⟩|) log^k(e/(1−|w|²)) log(e/|1−⟨w,φ_w(η)⟩|)",
                    ),
                    vec![vec![Pow(DistWA, -r), Log(DistWA, -k), Log(GapW, k), Log(DistWPhiWA, 1.0)]],
                )
            } else if tt > np1 && np1 > rr {
                est(
                    case(
                        PropTag::P32,
                        3,
                        "t−δ>n+1>r−δ",
                        "(1−|w|²)^{−(t−δ−n−1)} |1−⟨w,η⟩|^{−r} log^{−k}(e/|1−⟨w,η⟩|) log^k(e/(1−|w|²))",
                    ),
                    vec![vec![Pow(GapW, -(tt - np1)), Pow(DistWA, -r), Log(DistWA, -k), Log(GapW, k)]],
                )
            } else {
                Err(uncovered(fam, "outside the three stated cases"))
            }
        }
        Family::L22 { t, r, k } => est(
            case(
                PropTag::L22Lower,
                1,
                "t>n>r>0, k<0 (lower bound)",
                "(1−|w|²)^{−(t−n)} |1−⟨w,η⟩|^{−r} log^k(e/|1−⟨w,η⟩|)",
            ),
            vec![vec![Pow(GapW, -(t - nf)), Pow(DistWA, -r), Log(DistWA, k)]],
        ),
    }
}

/// Classifies and evaluates the estimate at `pts`.
pub fn eval_rhs(fam: &KernelFamily, pts: &PointPair) -> Result<(CaseId, f64)> {
    pts.check(fam)?;
    let est = rhs_formula(fam)?;
    let v = est.value(pts)?;
    Ok((est.case, v))
}

/// The two equivalent forms of the same estimate together with the explicit
/// constant `M = sup_{0<x<2} x^eps log(e/x)`, `eps = t - delta - n - 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalentForms {
    pub l1: f64,
    pub l2: f64,
    pub m: f64,
}

/// `L1` uses `log(e/(1-|phi_a(w)|^2))` in its second term and `L2` uses
/// `log(e/|1-<phi_a(w), a>|)`; both share the first term
/// `(1-|w|^2)^{delta+n+1-t} / |1-<w,a>|^{delta+n+1}`. The optional `k0`
/// multiplies both second terms by `log^{k0}(e/(1-|a|^2))`.
pub fn equivalent_forms(w: &CPoint, a: &CPoint, delta: f64, t: f64, k0: f64) -> Result<EquivalentForms> {
    w.require_interior()?;
    a.require_interior()?;
    let n = w.dim() as f64;
    let eps = t - delta - n - 1.0;
    if !(eps > 0.0) || !(delta > -1.0) {
        return Err(invalid("requires delta > -1 and t - delta > n + 1"));
    }
    let one = C64::new(1.0, 0.0);
    let d = (one - w.inner(a)?).norm();
    let first = ((delta + n + 1.0 - t) * w.gap().ln() - (delta + n + 1.0) * d.ln()).exp();
    let phi = mobius(a, w)?;
    let pair = (one - phi.inner(a)?).norm();
    let scale = d.powf(-t) * log_e_over(a.gap()).powf(k0);
    let l1 = first + scale * log_e_over(mobius_gap(a, w)?);
    let l2 = first + scale * log_e_over(pair);
    Ok(EquivalentForms { l1, l2, m: sup_x_pow_log(eps) })
}

/// `sup_{0<x<2} x^eps log(e/x)`: stationary point `x* = e^{1-1/eps}` when it
/// lies in `(0, 2)`, compared with the endpoint value at 2.
fn sup_x_pow_log(eps: f64) -> f64 {
    let h = |x: f64| x.powf(eps) * log_e_over(x);
    let xs = (1.0 - 1.0 / eps).exp();
    let end = h(2.0);
    if xs < 2.0 {
        h(xs).max(end)
    } else {
        end
    }
}

/// `sup_{0<x<2} x^eps log^y(e/x)` and the closed-form bound
/// `max{e^{eps-|y|}((|y|+1)/eps)^{|y|}, 2^eps log^y(e/2)}` for it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupBound {
    pub sup_value: f64,
    pub closed_form_bound: f64,
}

pub fn sup_power_log(eps: f64, y: f64) -> Result<SupBound> {
    if !(eps > 0.0) || !y.is_finite() {
        return Err(invalid("requires eps > 0 and finite y"));
    }
    // h(x) = x^eps log^y(e/x); h'(x) = 0 where eps log(e/x) = y, i.e. x* = e^{1 - y/eps}
    let h = |x: f64| x.powf(eps) * log_e_over(x).powf(y);
    let mut sup = h(2.0);
    let xs = (1.0 - y / eps).exp();
    if xs > 0.0 && xs < 2.0 {
        sup = sup.max(h(xs));
    }
    // with y < 0 the limit at 0 is 0 and with y >= 0 too; nothing else to add
    let ay = y.abs();
    let bound = ((eps - ay).exp() * ((ay + 1.0) / eps).powf(ay)).max(2f64.powf(eps) * log_e_over(2.0).powf(y));
    Ok(SupBound { sup_value: sup, closed_form_bound: bound })
}
