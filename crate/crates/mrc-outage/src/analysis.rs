//! Application-layer computations on top of the outage laws: critical
//! density solving, the small-density (log-log) outage slope, the
//! small-density expansion constants, model deviation ratios, and the √N
//! density-gain fit.

use std::cell::RefCell;

use crate::bounds::{ccdf_fc, ccdf_max, ccdf_min, cdf_fc_n2};
use crate::core::{
    interference_scale_c, single_antenna_cdf, ModelKind, SystemParams,
};
use crate::error::{Error, Result};
use crate::quadrature::{cdf_exact_n2, inner_r_integral, integrate_adaptive, QuadratureConfig};
use crate::simulator::{estimate_outage, MonteCarloConfig};

/// Result of a critical-density solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalDensityResult {
    pub lambda_eps: f64,
    pub epsilon: f64,
    /// Bisection iterations performed.
    pub iterations: u32,
    /// Outage at `lambda_eps` minus `epsilon`.
    pub residual: f64,
}

/// Least-squares line fit of log-outage against log-density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// How to evaluate the outage CDF P(SIR < T) during solves and sweeps.
#[derive(Debug, Clone)]
pub enum OutageEvaluator {
    /// Exact law: closed form at N = 1, quadrature at N = 2.
    Exact { cfg: QuadratureConfig },
    /// Full-correlation closed form, any N.
    FullCorrelation,
    /// Min-fading sandwich side: a lower bound on the exact CDF.
    MinFadingBound,
    /// Max-fading sandwich side: an upper bound on the exact CDF.
    MaxFadingBound,
    /// Monte Carlo point estimate (fixed seed makes solves reproducible).
    Simulated { model: ModelKind, mc: MonteCarloConfig },
}

impl OutageEvaluator {
    pub fn exact() -> Self {
        OutageEvaluator::Exact { cfg: QuadratureConfig::default() }
    }

    /// P(SIR < T) under this evaluator.
    pub fn outage(&self, t: f64, p: &SystemParams) -> Result<f64> {
        match self {
            OutageEvaluator::Exact { cfg } => match p.n_antennas {
                1 => Ok(single_antenna_cdf(t, p)?.value()),
                2 => Ok(cdf_exact_n2(t, p, cfg)?.value()),
                got => Err(Error::AntennaMismatch { expected: 2, got }),
            },
            OutageEvaluator::FullCorrelation => {
                if p.n_antennas == 2 {
                    Ok(cdf_fc_n2(t, p)?.value())
                } else {
                    Ok(ccdf_fc(t, p)?.complement().value())
                }
            }
            OutageEvaluator::MinFadingBound => Ok(ccdf_min(t, p)?.complement().value()),
            OutageEvaluator::MaxFadingBound => Ok(ccdf_max(t, p)?.complement().value()),
            OutageEvaluator::Simulated { model, mc } => {
                Ok(estimate_outage(t, p, *model, mc)?.point.value())
            }
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::NonPositive { name: "epsilon (must lie in (0,1))", value: epsilon });
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::NonPositive { name, value });
    }
    Ok(())
}

/// Largest density whose single-antenna outage stays at `epsilon`:
/// λ_ε = −ln(1−ε) / (c(1,α) d² T^{2/α}), the exact inverse of the
/// single-antenna CDF in λ.
pub fn critical_density_single(epsilon: f64, t: f64, alpha: f64, d: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_positive("threshold T", t)?;
    check_positive("d", d)?;
    let c_unit = interference_scale_c(1.0, alpha)?;
    Ok(-(1.0 - epsilon).ln() / (c_unit * d * d * t.powf(2.0 / alpha)))
}

/// Critical density for any antenna count and evaluator, by bisection in λ
/// (outage is increasing in λ, so the root is simple).
///
/// The initial bracket is (0, 4·λ_ε(N=1)]; if the outage at the upper end
/// still falls short of `epsilon`, the bracket doubles up to 16 times before
/// reporting `BracketFailure`. Bisection stops once |outage − ε| ≤ `tol` or
/// after 60 iterations; for noisy (Monte Carlo) evaluators pick `tol` at the
/// scale of the estimator's confidence radius.
pub fn critical_density(
    epsilon: f64,
    t: f64,
    alpha: f64,
    d: f64,
    n_antennas: u32,
    evaluator: &OutageEvaluator,
    tol: f64,
) -> Result<CriticalDensityResult> {
    check_epsilon(epsilon)?;
    check_positive("tol", tol)?;
    let single = critical_density_single(epsilon, t, alpha, d)?;
    let outage_at = |lambda: f64| -> Result<f64> {
        let p = SystemParams::new(lambda, alpha, d, n_antennas)?;
        evaluator.outage(t, &p)
    };

    let mut hi = 4.0 * single;
    let mut hi_val = outage_at(hi)?;
    let mut expansions = 0;
    while hi_val < epsilon {
        expansions += 1;
        if expansions > 16 {
            return Err(Error::BracketFailure { target: epsilon, hi_value: hi_val });
        }
        hi *= 2.0;
        hi_val = outage_at(hi)?;
    }

    let mut lo = 0.0f64;
    let mut iterations = 0u32;
    let (lambda_eps, residual) = loop {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        let v = outage_at(mid)?;
        let r = v - epsilon;
        if r.abs() <= tol || iterations >= 60 {
            break (mid, r);
        }
        if v < epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    };
    Ok(CriticalDensityResult { lambda_eps, epsilon, iterations, residual })
}

/// The default density grid for slope estimation: 8 log-spaced points
/// spanning 1e-7 to 1e-5 (two decades into the small-outage regime).
pub fn scdo_default_grid() -> Vec<f64> {
    let (lo, hi, n) = (1e-7f64, 1e-5f64, 8);
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            10f64.powf(lo.log10() + t * (hi.log10() - lo.log10()))
        })
        .collect()
}

/// Spatial-contention diversity order estimate: least-squares slope of
/// log P(SIR ≤ T) against log λ over `lambda_grid`, for the dual-antenna
/// system under `evaluator`. The analytic evaluators keep full relative
/// accuracy at outages far below anything Monte Carlo could resolve.
pub fn scdo_slope(
    t: f64,
    alpha: f64,
    d: f64,
    lambda_grid: &[f64],
    evaluator: &OutageEvaluator,
) -> Result<SlopeFit> {
    if lambda_grid.len() < 2 {
        return Err(Error::DegenerateDesign);
    }
    let mut outages = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let p = SystemParams::new(lambda, alpha, d, 2)?;
        outages.push(evaluator.outage(t, &p)?);
    }
    fit_loglog(lambda_grid, &outages)
}

/// Plain least squares of ln(y) on ln(x). All inputs must be positive.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateDesign);
    }
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::NonPositive {
                name: "log-log fit data (must be positive and finite)",
                value: if x > 0.0 { y } else { x },
            });
        }
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(SlopeFit { slope, intercept: my - slope * mx, r_squared })
}

/// The two constants of the small-density outage expansion
/// P(SIR ≤ T) = λ(A₂ − A₁) + O(λ²) for N = 2:
/// A₂ = c(1,α) d² T^{2/α} in closed form, A₁ = 2π ∫₀^T I(z,T) dz by
/// quadrature. Their difference is strictly positive.
pub fn a1_a2(t: f64, alpha: f64, d: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    check_positive("threshold T", t)?;
    cfg.validate()?;
    let p = SystemParams::new(1.0, alpha, d, 2)?;
    let a2 = interference_scale_c(1.0, alpha)? * d * d * t.powf(2.0 / alpha);

    let slot: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |z: f64| match inner_r_integral(z, t, &p, cfg) {
        Ok(v) => v,
        Err(e) => {
            slot.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let outer_cfg = QuadratureConfig {
        rel_tol: cfg.rel_tol * 100.0,
        abs_tol: cfg.abs_tol * 100.0,
        max_subdivisions: cfg.max_subdivisions,
    };
    let outer = integrate_adaptive(integrand, 0.0, t, &outer_cfg);
    if let Some(e) = slot.into_inner() {
        return Err(e);
    }
    let a1 = 2.0 * std::f64::consts::PI * outer?.value;
    Ok((a1, a2))
}

/// CDF deviation of the full-correlation approximation,
/// δ_FC(T) = P(SIR_FC ≤ T) / P(SIR ≤ T), for N ≤ 2 (the models coincide at
/// N = 1). Both CDFs must exceed an absolute floor of 1e-15.
pub fn delta_fc(t: f64, p: &SystemParams) -> Result<f64> {
    const FLOOR: f64 = 1e-15;
    let (fc, exact) = match p.n_antennas {
        1 => {
            let v = single_antenna_cdf(t, p)?.value();
            (v, v)
        }
        2 => (
            cdf_fc_n2(t, p)?.value(),
            cdf_exact_n2(t, p, &QuadratureConfig::default())?.value(),
        ),
        got => return Err(Error::AntennaMismatch { expected: 2, got }),
    };
    for v in [fc, exact] {
        if v < FLOOR {
            return Err(Error::DivisionByNearZero { value: v, floor: FLOOR });
        }
    }
    Ok(fc / exact)
}

/// Gap between the sandwich bounds, δ_minmax(T) = P(SIR_max ≤ T) /
/// P(SIR_min ≤ T) ≥ 1, any antenna count. Same 1e-15 floor as [`delta_fc`].
pub fn delta_minmax(t: f64, p: &SystemParams) -> Result<f64> {
    const FLOOR: f64 = 1e-15;
    let cdf_upper = ccdf_max(t, p)?.complement().value();
    let cdf_lower = ccdf_min(t, p)?.complement().value();
    for v in [cdf_upper, cdf_lower] {
        if v < FLOOR {
            return Err(Error::DivisionByNearZero { value: v, floor: FLOOR });
        }
    }
    Ok(cdf_upper / cdf_lower)
}

/// Least-squares fit of density gains to the model gain ≈ a·√N + b.
pub fn sqrt_fit(n_list: &[u32], gains: &[f64]) -> Result<(f64, f64)> {
    if n_list.len() != gains.len() || n_list.len() < 2 {
        return Err(Error::DegenerateDesign);
    }
    for &n in n_list {
        if n == 0 {
            return Err(Error::ZeroAntennas);
        }
    }
    let xs: Vec<f64> = n_list.iter().map(|&n| (n as f64).sqrt()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = gains.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(gains) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let a = sxy / sxx;
    Ok((a, my - a * mx))
}
