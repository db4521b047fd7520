//! Seeded Monte Carlo estimator: Poisson interferer fields, per-model fading,
//! post-combiner SIR/SINR samples, and Wilson-interval outage estimates.
//!
//! Sampling is deterministic: sample index i uses its own ChaCha8 stream
//! derived from (seed, i), so results are bit-identical for a fixed seed no
//! matter how work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;

use crate::core::{check_threshold, validate_params, ModelKind, Probability, SystemParams};
use crate::error::{Error, Result};

/// Truncation radius of the simulated window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowRadius {
    /// Radius chosen from the mean-tail criterion (see [`auto_radius`]).
    Auto,
    /// Fixed radius in the same length units as `SystemParams::d`.
    Explicit(f64),
}

/// Knobs of one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub num_samples: u64,
    pub window_radius: WindowRadius,
    pub seed: u64,
    /// Governs the Auto radius: the mean interference arriving from beyond
    /// the window must stay below `tail_frac · d^{−α}/T_max`.
    pub tail_frac: f64,
    /// Mean per-branch SNR in dB (E[g]·d^{−α} over the noise power); absent
    /// means pure SIR with no noise term.
    pub noise_snr_db: Option<f64>,
    /// Adds the mean interference of the truncated far field,
    /// 2πλR^{2−α}/(α−2) per unit-mean branch (scaled per model), to every
    /// denominator. This cancels the first-order truncation bias, letting a
    /// modest window stand in for a much larger one. Off by default: the
    /// plain setting simulates exactly the truncated window.
    pub restore_far_mean: bool,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            num_samples: 100_000,
            window_radius: WindowRadius::Auto,
            seed: 0,
            tail_frac: 1e-3,
            noise_snr_db: None,
            restore_far_mean: false,
        }
    }
}

/// One estimated outage point with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfEstimate {
    pub threshold: f64,
    /// Fraction of samples in outage (SIR < threshold).
    pub point: Probability,
    pub ci_low: Probability,
    pub ci_high: Probability,
    /// Samples used.
    pub n: u64,
}

fn validate_config(mc: &MonteCarloConfig) -> Result<()> {
    if mc.num_samples == 0 {
        return Err(Error::NonPositive { name: "num_samples", value: 0.0 });
    }
    if !(mc.tail_frac > 0.0 && mc.tail_frac < 1.0) {
        return Err(Error::NonPositive { name: "tail_frac (must lie in (0,1))", value: mc.tail_frac });
    }
    if let WindowRadius::Explicit(r) = mc.window_radius {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::NonPositive { name: "window_radius", value: r });
        }
    }
    if let Some(snr) = mc.noise_snr_db {
        if !snr.is_finite() {
            return Err(Error::NonPositive { name: "noise_snr_db", value: snr });
        }
    }
    Ok(())
}

/// Window radius satisfying the mean-tail criterion
/// 2πλR^{2−α}/(α−2) ≤ tail_frac · d^{−α}/t_max, floored at 50·d.
pub fn auto_radius(p: &SystemParams, t_max: f64, tail_frac: f64) -> Result<f64> {
    validate_params(p)?;
    check_threshold(t_max)?;
    if !(tail_frac > 0.0 && tail_frac < 1.0) {
        return Err(Error::NonPositive { name: "tail_frac (must lie in (0,1))", value: tail_frac });
    }
    let floor = 50.0 * p.d;
    if t_max == 0.0 {
        return Ok(floor);
    }
    let base = 2.0 * std::f64::consts::PI * p.lambda * t_max * p.d.powf(p.alpha)
        / (tail_frac * (p.alpha - 2.0));
    Ok(base.powf(1.0 / (p.alpha - 2.0)).max(floor))
}

/// Distances of one Poisson field restricted to the disk of radius `radius`:
/// count ~ Poisson(λπR²), each distance R√U for uniform U (area-uniform
/// positions; only distances matter under isotropic path loss).
pub fn sample_field<R: Rng + ?Sized>(lambda: f64, radius: f64, rng: &mut R) -> Vec<f64> {
    assert!(lambda >= 0.0 && lambda.is_finite(), "lambda must be nonnegative, got {lambda}");
    assert!(radius > 0.0 && radius.is_finite(), "radius must be positive, got {radius}");
    let mean = lambda * std::f64::consts::PI * radius * radius;
    let mut out = Vec::new();
    if mean > 0.0 {
        let poisson = Poisson::new(mean).expect("mean is positive and finite");
        fill_field(&Some(poisson), radius, rng, &mut out);
    }
    out
}

fn fill_field<R: Rng + ?Sized>(
    poisson: &Option<Poisson<f64>>,
    radius: f64,
    rng: &mut R,
    out: &mut Vec<f64>,
) {
    out.clear();
    let Some(dist) = poisson else { return };
    let count = dist.sample(rng) as usize;
    out.reserve(count);
    for _ in 0..count {
        let u: f64 = rng.random();
        out.push(radius * u.sqrt());
    }
}

/// Per-branch interference sums for one field realization.
///
/// Every model draws N gains per interferer in the same order, so runs with
/// a common seed are coupled sample-by-sample: per interferer the min gain
/// ≤ each branch gain ≤ the max gain, which makes the min/exact/max SIR
/// ordering hold pathwise, not just in distribution. `NoCorrelation` fills
/// only branch 0 here; the caller resamples whole fields for the others.
fn branch_interference<R: Rng + ?Sized>(
    model: ModelKind,
    alpha: f64,
    field: &[f64],
    rng: &mut R,
    acc: &mut [f64],
) {
    acc.fill(0.0);
    let nb = acc.len();
    match model {
        ModelKind::ExactCorrelated => {
            for &r in field {
                let w = r.powf(-alpha);
                for a in acc.iter_mut() {
                    let h: f64 = rng.sample(Exp1);
                    *a += h * w;
                }
            }
        }
        ModelKind::FullCorrelation => {
            for &r in field {
                let w = r.powf(-alpha);
                let h0: f64 = rng.sample(Exp1);
                for _ in 1..nb {
                    let _: f64 = rng.sample(Exp1);
                }
                for a in acc.iter_mut() {
                    *a += h0 * w;
                }
            }
        }
        ModelKind::MinFading => {
            for &r in field {
                let w = r.powf(-alpha);
                let mut m: f64 = rng.sample(Exp1);
                for _ in 1..nb {
                    let h: f64 = rng.sample(Exp1);
                    m = m.min(h);
                }
                for a in acc.iter_mut() {
                    *a += m * w;
                }
            }
        }
        ModelKind::MaxFading => {
            for &r in field {
                let w = r.powf(-alpha);
                let mut m: f64 = rng.sample(Exp1);
                for _ in 1..nb {
                    let h: f64 = rng.sample(Exp1);
                    m = m.max(h);
                }
                for a in acc.iter_mut() {
                    *a += m * w;
                }
            }
        }
        ModelKind::NoCorrelation => {
            for &r in field {
                let w = r.powf(-alpha);
                let h0: f64 = rng.sample(Exp1);
                for _ in 1..nb {
                    let _: f64 = rng.sample(Exp1);
                }
                acc[0] += h0 * w;
            }
        }
    }
}

/// Far-field restoration multiplier: the truncated tail has unit-mean gains
/// under the exact, full-correlation, and no-correlation models, mean 1/N
/// under min-fading, and mean H_N = Σ_{k≤N} 1/k under max-fading.
fn far_mean_multiplier(model: ModelKind, nb: usize) -> f64 {
    match model {
        ModelKind::MinFading => 1.0 / nb as f64,
        ModelKind::MaxFading => (1..=nb).map(|k| 1.0 / k as f64).sum(),
        _ => 1.0,
    }
}

/// The combining core: interference per branch (resampling whole fields for
/// the extra `NoCorrelation` branches), then signal gains, then the ratio
/// sum Σ g_k d^{−α} / (I_k + noise + mu_add). Infinite when a denominator
/// is exactly zero.
#[allow(clippy::too_many_arguments)]
fn combined_ratio<R: Rng + ?Sized>(
    model: ModelKind,
    alpha: f64,
    d_pow: f64,
    field: &[f64],
    poisson: &Option<Poisson<f64>>,
    radius: f64,
    noise: f64,
    mu_add: f64,
    rng: &mut R,
    scratch: &mut Vec<f64>,
    acc: &mut [f64],
) -> f64 {
    branch_interference(model, alpha, field, rng, acc);
    if model == ModelKind::NoCorrelation {
        for slot in acc.iter_mut().skip(1) {
            fill_field(poisson, radius, rng, scratch);
            for &r in scratch.iter() {
                let h: f64 = rng.sample(Exp1);
                *slot += h * r.powf(-alpha);
            }
        }
    }
    let mut total = 0.0;
    for &a in acc.iter() {
        let den = a + noise + mu_add;
        if den == 0.0 {
            return f64::INFINITY;
        }
        let g: f64 = rng.sample(Exp1);
        total += g * d_pow / den;
    }
    total
}

/// One SIR sample for a given field realization.
///
/// `window_radius` is the radius the field was drawn with; `NoCorrelation`
/// uses it (with `p.lambda`) to resample an independent field per extra
/// antenna. Empty field means infinite SIR and is reported as
/// [`Error::EmptyField`]; estimators count such samples as non-outage.
pub fn sample_sir<R: Rng + ?Sized>(
    p: &SystemParams,
    model: ModelKind,
    field: &[f64],
    window_radius: f64,
    rng: &mut R,
) -> Result<f64> {
    validate_params(p)?;
    if !(window_radius > 0.0) || !window_radius.is_finite() {
        return Err(Error::NonPositive { name: "window_radius", value: window_radius });
    }
    if field.is_empty() {
        return Err(Error::EmptyField);
    }
    let poisson = resample_distribution(p, model, window_radius);
    let mut scratch = Vec::new();
    let mut acc = vec![0.0; p.n_antennas as usize];
    Ok(combined_ratio(
        model,
        p.alpha,
        p.d.powf(-p.alpha),
        field,
        &poisson,
        window_radius,
        0.0,
        0.0,
        rng,
        &mut scratch,
        &mut acc,
    ))
}

/// One SINR sample: like [`sample_sir`] with `noise_power` added to every
/// branch denominator. Noise removes the empty-field singularity, so an
/// empty field is a legitimate (large) sample rather than an error.
pub fn sample_sinr<R: Rng + ?Sized>(
    p: &SystemParams,
    model: ModelKind,
    field: &[f64],
    window_radius: f64,
    rng: &mut R,
    noise_power: f64,
) -> Result<f64> {
    validate_params(p)?;
    if !(window_radius > 0.0) || !window_radius.is_finite() {
        return Err(Error::NonPositive { name: "window_radius", value: window_radius });
    }
    if !(noise_power > 0.0) || !noise_power.is_finite() {
        return Err(Error::NonPositive { name: "noise_power", value: noise_power });
    }
    let poisson = resample_distribution(p, model, window_radius);
    let mut scratch = Vec::new();
    let mut acc = vec![0.0; p.n_antennas as usize];
    Ok(combined_ratio(
        model,
        p.alpha,
        p.d.powf(-p.alpha),
        field,
        &poisson,
        window_radius,
        noise_power,
        0.0,
        rng,
        &mut scratch,
        &mut acc,
    ))
}

fn resample_distribution(
    p: &SystemParams,
    model: ModelKind,
    radius: f64,
) -> Option<Poisson<f64>> {
    if model != ModelKind::NoCorrelation || p.n_antennas == 1 {
        return None;
    }
    let mean = p.lambda * std::f64::consts::PI * radius * radius;
    Some(Poisson::new(mean).expect("mean is positive and finite"))
}

/// splitmix64 finalizer: decorrelates consecutive sample indices into
/// independent-looking 64-bit stream keys.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(splitmix64(seed).wrapping_add(index)))
}

struct SampleCtx {
    model: ModelKind,
    nb: usize,
    alpha: f64,
    d_pow: f64,
    radius: f64,
    poisson: Option<Poisson<f64>>,
    resample: Option<Poisson<f64>>,
    noise: f64,
    mu_add: f64,
    seed: u64,
}

fn sample_value(
    ctx: &SampleCtx,
    index: u64,
    field: &mut Vec<f64>,
    scratch: &mut Vec<f64>,
    acc: &mut [f64],
) -> f64 {
    let mut rng = stream_rng(ctx.seed, index);
    fill_field(&ctx.poisson, ctx.radius, &mut rng, field);
    if field.is_empty() && ctx.noise == 0.0 && ctx.mu_add == 0.0 {
        return f64::INFINITY;
    }
    combined_ratio(
        ctx.model,
        ctx.alpha,
        ctx.d_pow,
        field,
        &ctx.resample,
        ctx.radius,
        ctx.noise,
        ctx.mu_add,
        &mut rng,
        scratch,
        acc,
    )
}

const WILSON_Z: f64 = 1.959963984540054;

fn wilson_estimate(threshold: f64, outages: u64, n: u64) -> CcdfEstimate {
    let nf = n as f64;
    let phat = outages as f64 / nf;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / nf;
    let center = (phat + z2 / (2.0 * nf)) / denom;
    let half = WILSON_Z * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let low = if outages == 0 { 0.0 } else { (center - half).clamp(0.0, phat) };
    let high = if outages == n { 1.0 } else { (center + half).clamp(phat, 1.0) };
    let prob = |v: f64| Probability::new(v).expect("Wilson quantities lie in [0,1]");
    CcdfEstimate {
        threshold,
        point: prob(phat),
        ci_low: prob(low),
        ci_high: prob(high),
        n,
    }
}

/// Outage estimates at every threshold in `t_list`, all from one common set
/// of `mc.num_samples` SIR samples (so the empirical curve is monotone in T).
/// Results come back in the order of `t_list`.
pub fn estimate_outage_curve(
    t_list: &[f64],
    p: &SystemParams,
    model: ModelKind,
    mc: &MonteCarloConfig,
) -> Result<Vec<CcdfEstimate>> {
    validate_params(p)?;
    validate_config(mc)?;
    for &t in t_list {
        check_threshold(t)?;
    }
    if t_list.is_empty() {
        return Ok(Vec::new());
    }

    let t_max = t_list.iter().cloned().fold(0.0f64, f64::max);
    let radius = match mc.window_radius {
        WindowRadius::Auto => auto_radius(p, t_max, mc.tail_frac)?,
        WindowRadius::Explicit(r) => r,
    };
    let mean = p.lambda * std::f64::consts::PI * radius * radius;
    let poisson = if mean > 0.0 {
        Some(Poisson::new(mean).expect("mean is positive and finite"))
    } else {
        None
    };
    let nb = p.n_antennas as usize;
    let noise = match mc.noise_snr_db {
        Some(db) => p.d.powf(-p.alpha) / 10f64.powf(db / 10.0),
        None => 0.0,
    };
    let mu_add = if mc.restore_far_mean {
        let base = 2.0 * std::f64::consts::PI * p.lambda * radius.powf(2.0 - p.alpha)
            / (p.alpha - 2.0);
        base * far_mean_multiplier(model, nb)
    } else {
        0.0
    };
    let ctx = SampleCtx {
        model,
        nb,
        alpha: p.alpha,
        d_pow: p.d.powf(-p.alpha),
        radius,
        poisson,
        resample: resample_distribution(p, model, radius),
        noise,
        mu_add,
        seed: mc.seed,
    };

    let m = t_list.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| t_list[a].total_cmp(&t_list[b]).then(a.cmp(&b)));
    let sorted_ts: Vec<f64> = order.iter().map(|&i| t_list[i]).collect();

    // hist[j] counts samples whose SIR first drops below the j-th sorted
    // threshold; slot m collects never-outage samples (including infinite
    // SIR from empty windows). Integer counts make the parallel reduction
    // order-insensitive, hence bit-deterministic for any worker count.
    let hist = (0..mc.num_samples)
        .into_par_iter()
        .fold(
            || (vec![0u64; m + 1], Vec::new(), Vec::new(), vec![0.0; ctx.nb]),
            |(mut hist, mut field, mut scratch, mut acc), i| {
                let s = sample_value(&ctx, i, &mut field, &mut scratch, &mut acc);
                let idx = sorted_ts.partition_point(|&t| !(s < t));
                hist[idx] += 1;
                (hist, field, scratch, acc)
            },
        )
        .map(|(hist, _, _, _)| hist)
        .reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let mut results = vec![None; m];
    let mut cum = 0u64;
    for (j, &orig) in order.iter().enumerate() {
        cum += hist[j];
        results[orig] = Some(wilson_estimate(t_list[orig], cum, mc.num_samples));
    }
    Ok(results.into_iter().map(|r| r.expect("every slot filled")).collect())
}

/// Outage estimate at a single threshold; see [`estimate_outage_curve`].
pub fn estimate_outage(
    t: f64,
    p: &SystemParams,
    model: ModelKind,
    mc: &MonteCarloConfig,
) -> Result<CcdfEstimate> {
    Ok(estimate_outage_curve(&[t], p, model, mc)?.pop().expect("one estimate"))
}
