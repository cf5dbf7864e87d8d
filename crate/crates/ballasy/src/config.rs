//! Run parameters shared by the command line and the config file.
//!
//! The file format is flat `key = value` text whose keys are the long flag
//! names with dashes replaced by underscores. Flags override file values.

use std::path::{Path, PathBuf};

use ballasy_core::kernels::{Family, KernelFamily, LogForm};
use ballasy_core::quadrature::QuadConfig;
use ballasy_core::spaces::{HoloFunction, SpaceParams};
use ballasy_core::verifier::{dyadic_radii, Coupling, SweepPlan, DEFAULT_WINDOW_BOUND};
use ballasy_core::weights::NormalWeight;
use ballasy_core::{CPoint, C64};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Report format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Slope tolerance used when none is configured.
pub const DEFAULT_SLOPE_TOL: f64 = 0.05;

/// Every setting a subcommand may read. Unset fields take documented defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Integral family: propA-I, propA-J, p31-G, p31-F, propB, propC, p32, l22, l21-I1, l21-I2
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Complex dimension
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Reading of |log(e/u)| for complex u: complex (principal branch) or modulus
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_form: Option<String>,

    /// First dyadic level; radii are 1 - 2^-m
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_min: Option<u32>,
    /// Last dyadic level
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u32>,
    /// Number of sweep directions, spread over the first coordinate circle
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    /// Second point: same, antipodal, fixed, rotated:THETA
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<String>,
    /// Fixed second point as re,im pairs per coordinate
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u32>,
    /// Largest accepted max/min ratio
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_bound: Option<f64>,
    /// Allowed gap between fitted and predicted exponent
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_tol: Option<f64>,
    /// Multiply the estimate by gap^SHIFT (debugging negative control)
    #[arg(long, allow_negative_numbers = true, hide = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs_shift: Option<f64>,

    /// Multiplier symbol: one, z1, log-kernel, psi1, psi2, psi3
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Source weight exponents (1-r^2)^alpha log^beta loglog^gamma
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_gamma: Option<f64>,
    /// Target weight; defaults to mu (1-r^2)^((n-s)/p)
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_gamma: Option<f64>,
    /// Deepest grid shell, radius 1 - 2^-max_shell
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_shell: Option<u32>,

    /// Report destination; stdout when absent
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),* $(,)?) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

fn need<T: Copy>(v: Option<T>, name: &str, family: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{name} is required for family {family}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.message())))
    }

    pub fn emit(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overridden_by(mut self, flags: &RunConfig) -> Self {
        overlay!(self, flags;
            family, n, delta, t, r, c, k, log_form, m_min, m_max, directions, coupling, fixed_point,
            rel_tol, max_subdivisions, mc_samples, seed, window_bound, slope_tol, rhs_shift,
            psi, p, s, mu_alpha, mu_beta, mu_gamma, nu_alpha, nu_beta, nu_gamma, max_shell,
            output, format,
        );
        self
    }

    pub fn dim(&self) -> usize {
        self.n.unwrap_or(1)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn window_bound(&self) -> f64 {
        self.window_bound.unwrap_or(DEFAULT_WINDOW_BOUND)
    }

    pub fn slope_tol(&self) -> f64 {
        self.slope_tol.unwrap_or(DEFAULT_SLOPE_TOL)
    }

    pub fn quad(&self) -> QuadConfig {
        let d = QuadConfig::default();
        QuadConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            max_subdivisions: self.max_subdivisions.unwrap_or(d.max_subdivisions),
            mc_samples: self.mc_samples.unwrap_or(d.mc_samples),
            seed: self.seed.map(u64::from).unwrap_or(d.seed),
            stream: d.stream,
        }
    }

    /// The integral family named by `family` with its exponents.
    pub fn kernel_family(&self) -> Result<KernelFamily, CliError> {
        let tag = self.family.as_deref().ok_or_else(|| CliError::Usage("--family is required".into()))?;
        let delta = self.delta.unwrap_or(0.0);
        let c = || need(self.c, "c", tag);
        let k = || need(self.k, "k", tag);
        let t = || need(self.t, "t", tag);
        let r = || need(self.r, "r", tag);
        let family = match tag {
            "propA-I" => Family::PropAI { c: c()? },
            "propA-J" => Family::PropAJ { t: t()?, c: c()? },
            "p31-G" => Family::P31G { c: c()?, k: k()? },
            "p31-F" => Family::P31F { delta, c: c()?, k: k()? },
            "propB" => Family::PropB { delta, t: t()?, r: r()?, k: self.k.unwrap_or(0.0) },
            "propC" => Family::PropC { t: t()?, r: r()? },
            "p32" => Family::P32 { delta, t: t()?, r: r()?, k: k()? },
            "l22" => Family::L22 { t: t()?, r: r()?, k: k()? },
            "l21-I1" => Family::L21I1 { delta, c: c()?, k: self.k.unwrap_or(0.0) },
            "l21-I2" => Family::L21I2 { delta, c: c()?, k: self.k.unwrap_or(0.0) },
            other => return Err(CliError::Usage(format!("unknown family {other:?}"))),
        };
        let log_form = match self.log_form.as_deref() {
            None | Some("complex") => LogForm::Complex,
            Some("modulus") => LogForm::Modulus,
            Some(other) => return Err(CliError::Usage(format!("unknown log form {other:?}"))),
        };
        Ok(KernelFamily::new(family, self.dim())?.with_log_form(log_form))
    }

    fn coupling_value(&self, n: usize) -> Result<Coupling, CliError> {
        let tag = self.coupling.as_deref().unwrap_or("same");
        match tag {
            "same" => Ok(Coupling::Same),
            "antipodal" => Ok(Coupling::Antipodal),
            "fixed" => {
                let text = self.fixed_point.as_deref().ok_or_else(|| CliError::Usage("fixed coupling needs --fixed-point".into()))?;
                Ok(Coupling::Fixed(parse_point(text, n)?))
            }
            _ => match tag.strip_prefix("rotated:").map(str::parse::<f64>) {
                Some(Ok(theta)) if theta.is_finite() => Ok(Coupling::Rotated(theta)),
                _ => Err(CliError::Usage(format!("unknown coupling {tag:?}"))),
            },
        }
    }

    /// The sweep plan: radii `1 - 2^{-m}`, `m_min..=m_max` (default 2..=13).
    pub fn sweep_plan(&self) -> Result<SweepPlan, CliError> {
        let n = self.dim();
        let (lo, hi) = (self.m_min.unwrap_or(2), self.m_max.unwrap_or(13));
        if lo == 0 || lo > hi || hi > 19 {
            return Err(CliError::Usage("need 1 <= m_min <= m_max <= 19".into()));
        }
        let count = self.directions.unwrap_or(1);
        if count == 0 {
            return Err(CliError::Usage("--directions must be positive".into()));
        }
        let dirs = (0..count)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / count as f64;
                CPoint::basis(n, 0).scale(C64::from_polar(1.0, th))
            })
            .collect();
        let plan = SweepPlan::new(dyadic_radii(lo..=hi), dirs, self.coupling_value(n)?, self.quad())?;
        Ok(plan.with_rhs_shift(self.rhs_shift.unwrap_or(0.0)))
    }

    /// `mu`, and `nu` defaulting to `mu (1-r^2)^{(n-s)/p}`.
    pub fn space_params(&self) -> Result<SpaceParams, CliError> {
        let n = self.dim();
        let p = self.p.unwrap_or(2.0);
        let s = self.s.unwrap_or(0.0);
        let mu_alpha = self.mu_alpha.unwrap_or(0.5);
        let mu = weight(mu_alpha, self.mu_beta.unwrap_or(0.0), self.mu_gamma.unwrap_or(0.0))?;
        let nu_alpha = self.nu_alpha.unwrap_or(mu_alpha + (n as f64 - s) / p);
        let nu = weight(nu_alpha, self.nu_beta.or(self.mu_beta).unwrap_or(0.0), self.nu_gamma.or(self.mu_gamma).unwrap_or(0.0))?;
        Ok(SpaceParams::new(p, s, mu, nu, n)?)
    }

    /// The catalog function named by `psi`.
    pub fn symbol(&self) -> Result<HoloFunction, CliError> {
        let n = self.dim();
        let tag = self.psi.as_deref().ok_or_else(|| CliError::Usage("--psi is required".into()))?;
        let mut e1 = vec![0; n];
        e1[0] = 1;
        Ok(match tag {
            "one" => HoloFunction::Constant(C64::new(1.0, 0.0)),
            "z1" => HoloFunction::Monomial { coeff: C64::new(1.0, 0.0), exponents: e1 },
            "log-kernel" => HoloFunction::LogKernel { w0: CPoint::basis(n, 0) },
            "psi1" => HoloFunction::ExpCusp,
            "psi2" => HoloFunction::LogLog,
            "psi3" => HoloFunction::LogLogLog,
            other => return Err(CliError::Usage(format!("unknown catalog function {other:?}"))),
        })
    }
}

/// A weight whose declared exponents bracket `alpha`; log factors widen the bracket.
fn weight(alpha: f64, beta: f64, gamma: f64) -> Result<NormalWeight, CliError> {
    let w = if beta == 0.0 && gamma == 0.0 {
        NormalWeight::power(alpha)
    } else {
        NormalWeight::new(alpha, beta, gamma, 0.5 * alpha, alpha + 0.5)
    };
    Ok(w?)
}

/// `re,im,re,im,...` with one pair per coordinate.
pub fn parse_point(text: &str, n: usize) -> Result<CPoint, CliError> {
    let vals = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("fixed point {text:?}: {e}")))?;
    if vals.len() != 2 * n {
        return Err(CliError::Usage(format!("fixed point needs {} numbers, got {}", 2 * n, vals.len())));
    }
    let p = CPoint::new(vals.chunks(2).map(|c| C64::new(c[0], c[1])).collect());
    p.require_interior()?;
    Ok(p)
}
