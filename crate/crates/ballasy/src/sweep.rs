//! Parallel boundary sweeps and grid norms.
//!
//! Rows are independent: each draws Monte Carlo samples from its own stream,
//! so results do not depend on how the work is scheduled.

use ballasy_core::kernels::KernelFamily;
use ballasy_core::quadrature::QuadConfig;
use ballasy_core::spaces::{fpms_local, norm_from_locals, HoloFunction, SpaceParams};
use ballasy_core::verifier::{assemble, evaluate_row, sweep_estimate, SweepPlan, SweepReport};
use ballasy_core::{CPoint, Result};
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "BALL_ASY_THREADS";

/// Worker count from `BALL_ASY_THREADS`, or rayon's default when unset or invalid.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&k| k > 0)
}

fn in_pool<T: Send>(job: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_cap() {
        builder = builder.num_threads(k);
    }
    match builder.build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// Same result as [`ballasy_core::verifier::run_sweep`], rows evaluated in parallel.
pub fn run_sweep_parallel(fam: &KernelFamily, plan: &SweepPlan) -> Result<SweepReport> {
    plan.validate()?;
    let est = sweep_estimate(fam, plan)?;
    let rows = plan.rows(fam);
    let evaluated = in_pool(|| rows.par_iter().map(|row| evaluate_row(fam, &est, plan, row)).collect::<Result<Vec<_>>>())?;
    assemble(fam, est.case, est.has_log_factors(), evaluated)
}

/// [`ballasy_core::spaces::fpms_norm`] with the local integrals in parallel.
pub fn fpms_norm_parallel(f: &HoloFunction, sp: &SpaceParams, wgrid: &[CPoint], cfg: &QuadConfig) -> Result<f64> {
    let locals = in_pool(|| {
        wgrid.par_iter().map(|w| fpms_local(f, w, sp, cfg).map(|r| r.value)).collect::<Result<Vec<_>>>()
    })?;
    norm_from_locals(f, sp.p, sp.n, &locals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ballasy_core::kernels::Family;
    use ballasy_core::spaces::{boundary_grid, fpms_norm};
    use ballasy_core::verifier::{run_sweep, Coupling};
    use ballasy_core::weights::NormalWeight;

    #[test]
    fn parallel_sweep_matches_serial() {
        let fam = KernelFamily::new(Family::PropC { t: 0.5, r: -0.5 }, 1).unwrap();
        let a = CPoint::new(vec![ballasy_core::C64::new(-0.3, 0.4)]);
        let mut plan = SweepPlan::standard(1, Coupling::Fixed(a));
        plan.radii = ballasy_core::verifier::dyadic_radii(2..=7);
        assert_eq!(run_sweep_parallel(&fam, &plan).unwrap(), run_sweep(&fam, &plan).unwrap());
    }

    #[test]
    fn parallel_norm_matches_serial() {
        let mu = NormalWeight::power(0.5).unwrap();
        let sp = SpaceParams::new(2.0, 0.5, mu, mu, 1).unwrap();
        let f = HoloFunction::LogKernel { w0: CPoint::from_real(&[0.9]) };
        let grid = boundary_grid(1, 4).points;
        let cfg = QuadConfig::default();
        assert_eq!(fpms_norm_parallel(&f, &sp, &grid, &cfg).unwrap(), fpms_norm(&f, &sp, &grid, &cfg).unwrap());
    }
}
