//! Adaptive Gauss-Kronrod quadrature and the exact dual-antenna SIR
//! distribution.
//!
//! The exact N=2 CCDF is, on paper, a nested object: an outer integral over
//! the auxiliary variable z of `C(z,T) · I(z,T)`, where both factors are
//! themselves integrals over the interferer distance r. Both r-integrals
//! reduce to closed form: after w = r^{−α} d^α their integrands are w^{−β}
//! (β = 2/α) times a rational function of w, and partial fractions split
//! them into Beta integrals ∫₀^∞ w^{−β}/(1+aw)^k dw = a^{β−1}·(known Γ
//! products). With K = Γ(β)Γ(1−β) = π/sin(πβ) and s = (T−z)⁺:
//!
//!   C(z,T) = exp{ −(2πλd²/α) · K · (z^{β+1} − s^{β+1})/(z − s) }
//!   I(z,T) = (d²/α) · K · (s^{β+1} − s z^β − β z^β (s−z))/(s−z)²
//!
//! Both difference quotients are evaluated by series near the removable
//! point z = s. Only the single outer z-integral is numeric.
//!
//! For z ≥ T the outer integrand collapses: `I` becomes
//! (d²/α) z^{2/α−1} Γ(1−2/α) Γ(1+2/α) and `C` reduces to
//! exp(−c(λ,α) d² z^{2/α}), making the integrand an exact derivative in z.
//! The tail integral over (T,∞) therefore equals exp(−c d² T^{2/α}), the
//! single-antenna CCDF, and the evaluator only ever integrates over (0,T):
//!
//!   ccdf(T) = 2πλ ∫₀^T C(z,T) I(z,T) dz + exp(−c d² T^{2/α})
//!
//! with no truncation error and the exact value 1 at T = 0.

use crate::core::{
    check_threshold, interference_scale_c, single_antenna_ccdf, validate_params, Probability,
    SystemParams,
};
use crate::error::{Error, Result};
use crate::special::gamma;

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tolerances for one adaptive integration.
///
/// The CCDF/CDF evaluators pass these straight to their single numeric
/// z-integral (the r-integrals are closed-form).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rel_tol: 1e-8, abs_tol: 1e-12, max_subdivisions: 200 }
    }
}

impl QuadratureConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::NonPositive { name: "rel_tol", value: self.rel_tol });
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::NonPositive { name: "abs_tol", value: self.abs_tol });
        }
        if self.max_subdivisions == 0 {
            return Err(Error::NonPositive { name: "max_subdivisions", value: 0.0 });
        }
        Ok(())
    }

}

/// Value, error estimate, and evaluation count of one integration.
#[derive(Debug, Clone, Copy)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

// 15-point Kronrod nodes (positive half) and weights, with the embedded
// 7-point Gauss rule on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod pass over [lo, hi]: (integral, error estimate).
///
/// The error estimate follows the usual practice of sharpening the raw
/// |Kronrod − Gauss| difference against the integrand's mean deviation, so
/// panels containing smooth integrands converge without over-refinement.
fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { at: x })
        }
    };

    let fc = eval(center)?;
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut fv = [0.0f64; 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv[j] = f1;
        fv[j + 7] = f2;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - reskh).abs() + (fv[j + 7] - reskh).abs());
    }
    resasc *= half.abs();

    let value = resk * half;
    let raw = ((resk - resg) * half).abs();
    let error = if resasc != 0.0 && raw != 0.0 {
        resasc * 1.0f64.min((200.0 * raw / resasc).powf(1.5))
    } else {
        raw
    };
    Ok((value, error))
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Max-heap by error; ties broken by creation order for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Adaptive integration of `f` over (lo, hi); `hi` may be `f64::INFINITY`.
///
/// Semi-infinite domains are mapped to (0,1) by x = lo + t/(1−t) before
/// subdivision. Endpoints are never evaluated, so integrable endpoint
/// singularities are fine. Subdivision always bisects the current
/// worst-error panel; the final sum runs over panels sorted by position so
/// the result does not depend on refinement order.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegrationResult> {
    integrate_adaptive_with_breakpoints(f, lo, hi, &[], cfg)
}

/// [`integrate_adaptive`] with forced initial subdivision points. Use when
/// the integrand has interior kinks or known localized mass; breakpoints
/// outside (lo, hi) are ignored.
pub fn integrate_adaptive_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegrationResult> {
    integrate_dyn(&f, lo, hi, breakpoints, cfg)
}

// Dynamic-dispatch core: the infinite-interval branch recurses with a new
// closure, which would otherwise instantiate an unbounded tower of generic
// copies.
fn integrate_dyn(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegrationResult> {
    cfg.validate()?;
    if !lo.is_finite() {
        return Err(Error::NonFiniteIntegrand { at: lo });
    }
    if hi == lo {
        return Ok(IntegrationResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    if !(hi > lo) {
        return Err(Error::NonPositive { name: "integration range", value: hi - lo });
    }

    if hi.is_infinite() {
        // x = lo + t/(1−t), dx = dt/(1−t)².
        let g = move |t: f64| {
            let om = 1.0 - t;
            f(lo + t / om) / (om * om)
        };
        let mapped: Vec<f64> = breakpoints
            .iter()
            .filter(|&&b| b.is_finite() && b > lo)
            .map(|&b| (b - lo) / (1.0 + b - lo))
            .collect();
        return integrate_dyn(&g, 0.0, 1.0, &mapped, cfg);
    }

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    let mut seq: u64 = 0;
    let mut evaluations = 0usize;
    let mut total_value = 0.0f64;
    let mut total_error = 0.0f64;

    let push = |heap: &mut BinaryHeap<Panel>,
                    a: f64,
                    b: f64,
                    seq: &mut u64,
                    evals: &mut usize,
                    tv: &mut f64,
                    te: &mut f64|
     -> Result<()> {
        let (value, error) = gk15(&f, a, b)?;
        *evals += 15;
        *tv += value;
        *te += error;
        heap.push(Panel { lo: a, hi: b, value, error, seq: *seq });
        *seq += 1;
        Ok(())
    };

    let mut a = lo;
    for b in cuts {
        push(&mut heap, a, b, &mut seq, &mut evaluations, &mut total_value, &mut total_error)?;
        a = b;
    }

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
        if total_error <= tol {
            break;
        }
        if heap.len() >= cfg.max_subdivisions {
            let (value, error_estimate) = finish(heap);
            return Err(Error::MaxSubdivisionsExceeded {
                estimate: value,
                error_estimate,
                limit: cfg.max_subdivisions,
            });
        }
        let worst = heap.pop().expect("heap cannot be empty while error > 0");
        total_value -= worst.value;
        total_error -= worst.error;
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel at floating-point resolution; keep it as is and stop
            // counting its error against the budget.
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        push(&mut heap, worst.lo, mid, &mut seq, &mut evaluations, &mut total_value, &mut total_error)?;
        push(&mut heap, mid, worst.hi, &mut seq, &mut evaluations, &mut total_value, &mut total_error)?;
    }

    let (value, error_estimate) = finish(heap);
    Ok(IntegrationResult { value, error_estimate, evaluations })
}

/// Position-ordered final summation: refinement order cannot perturb the result.
fn finish(heap: BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let mut value = 0.0;
    let mut error = 0.0;
    for p in &panels {
        value += p.value;
        error += p.error;
    }
    (value, error)
}

/// Runs `body`, routing any domain error raised inside an integrand closure
/// around the f64-only quadrature interface.
fn with_error_slot<T>(
    body: impl FnOnce(&RefCell<Option<Error>>) -> Result<T>,
) -> Result<T> {
    let slot = RefCell::new(None);
    let out = body(&slot);
    if let Some(e) = slot.into_inner() {
        return Err(e);
    }
    out
}

fn stash(slot: &RefCell<Option<Error>>, e: Error) -> f64 {
    let mut s = slot.borrow_mut();
    if s.is_none() {
        *s = Some(e);
    }
    f64::NAN
}

/// Γ(β)Γ(1−β), the reflection value every r-integral carries.
fn beta_reflection(beta: f64) -> f64 {
    std::f64::consts::PI / (std::f64::consts::PI * beta).sin()
}

/// (z^{β+1} − s^{β+1})/(z − s) for z, s ≥ 0 not both zero, continued through
/// z = s by a Taylor step around the midpoint (the quotient is smooth there;
/// direct evaluation would cancel catastrophically).
fn power_difference_quotient(z: f64, s: f64, beta: f64) -> f64 {
    let m = 0.5 * (z + s);
    let r = 0.5 * (z - s) / m;
    if r.abs() > 1e-4 {
        (z.powf(beta + 1.0) - s.powf(beta + 1.0)) / (z - s)
    } else {
        (beta + 1.0) * m.powf(beta) * (1.0 + beta * (beta - 1.0) * r * r / 6.0)
    }
}

/// (s^{β+1} − s z^β − β z^β (s−z))/(s−z)², the partial-fraction kernel of
/// the inner r-integral, continued through s = z (limit β(β+1)/2 · z^{β−1})
/// via the series of ((1+e)^{β+1} − 1 − (β+1)e)/e², e = (s−z)/z.
fn inner_difference_kernel(z: f64, s: f64, beta: f64) -> f64 {
    if z == 0.0 {
        return s.powf(beta - 1.0);
    }
    let e = (s - z) / z;
    if e.abs() > 1e-3 {
        let diff = s - z;
        (s.powf(beta + 1.0) - s * z.powf(beta) - beta * z.powf(beta) * diff) / (diff * diff)
    } else {
        let c2 = (beta + 1.0) * beta / 2.0;
        let c3 = c2 * (beta - 1.0) / 3.0;
        let c4 = c3 * (beta - 2.0) / 4.0;
        let c5 = c4 * (beta - 3.0) / 5.0;
        z.powf(beta - 1.0) * (c2 + e * (c3 + e * (c4 + e * c5)))
    }
}

/// Interference suppression factor C(z,T) of the exact dual-antenna CCDF:
///
///   C(z,T) = exp{ −2πλ ∫₀^∞ r (1 − 1/((1+z r^{−α}d^α)(1+s r^{−α}d^α))) dr },
///
/// with s = (T−z)⁺. The exponent integral has the closed value
/// (d²/α) Γ(β)Γ(1−β) (z^{β+1} − s^{β+1})/(z − s); see the module docs.
/// C(0,T) equals the single-antenna CCDF at T, and C ∈ (0,1]. `cfg` is
/// validated for interface uniformity; no quadrature runs.
pub fn c_factor(z: f64, t: f64, p: &SystemParams, cfg: &QuadratureConfig) -> Result<f64> {
    validate_params(p)?;
    check_threshold(t)?;
    cfg.validate()?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::NonPositive { name: "z", value: z });
    }
    let s = (t - z).max(0.0);
    if z == 0.0 && s == 0.0 {
        return Ok(1.0);
    }
    let beta = p.beta();
    let j = beta_reflection(beta) * power_difference_quotient(z, s, beta);
    Ok((-(2.0 * std::f64::consts::PI * p.lambda * p.d * p.d / p.alpha) * j).exp())
}

/// Closed form of [`c_factor`] at α = 4:
/// C₄(z,T) = exp(−(π²/2) λ d² (z^{3/2} − s^{3/2})/(z − s)), s = (T−z)⁺.
///
/// With u = √z, v = √s the fraction factors as (u² + uv + v²)/(u + v),
/// which is finite and smooth through the removable singularity at z = s
/// (value (3/2)√z there) without a limit branch.
pub fn c_factor_alpha4(z: f64, t: f64, p: &SystemParams) -> Result<f64> {
    validate_params(p)?;
    check_threshold(t)?;
    if p.alpha != 4.0 {
        return Err(Error::AlphaMismatch { expected: 4.0, got: p.alpha });
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::NonPositive { name: "z", value: z });
    }
    let s = (t - z).max(0.0);
    let (u, v) = (z.sqrt(), s.sqrt());
    if u + v == 0.0 {
        return Ok(1.0);
    }
    let frac = (u * u + u * v + v * v) / (u + v);
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    Ok((-(pi2 / 2.0) * p.lambda * p.d * p.d * frac).exp())
}

/// Inner r-integral I(z,T) of the exact dual-antenna CCDF:
///
///   I(z,T) = ∫₀^∞ r^{1−α} d^α / ((1+z r^{−α}d^α)² (1+s r^{−α}d^α)) dr
///          = (d²/α) ∫₀^∞ w^{−2/α} / ((1+zw)² (1+sw)) dw,  s = (T−z)⁺.
///
/// For s = 0 (z ≥ T) the Beta integral gives the semi-closed value
/// (d²/α) z^{2/α−1} Γ(1−2/α) Γ(1+2/α), kept as an explicit fast path; the
/// general case is the partial-fraction closed form of the module docs.
/// `cfg` is validated for interface uniformity; no quadrature runs.
pub fn inner_r_integral(z: f64, t: f64, p: &SystemParams, cfg: &QuadratureConfig) -> Result<f64> {
    validate_params(p)?;
    check_threshold(t)?;
    cfg.validate()?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::NonPositive { name: "z", value: z });
    }
    let s = (t - z).max(0.0);
    if z == 0.0 && s == 0.0 {
        // ∫ w^{−2/α} dw over (0,∞) diverges; the caller must keep z or T positive.
        return Err(Error::NonPositive { name: "z + (T-z)+ (inner integral diverges)", value: 0.0 });
    }
    let beta = p.beta();
    let scale = p.d * p.d / p.alpha;
    if s == 0.0 {
        return Ok(scale * z.powf(beta - 1.0) * gamma(1.0 - beta) * gamma(1.0 + beta));
    }
    Ok(scale * beta_reflection(beta) * inner_difference_kernel(z, s, beta))
}

/// Forced outer subdivision points: dyadically refined toward 0, where the
/// integrand's z^{2/α−1} endpoint singularity and (for large α) most of its
/// mass sit, plus the midpoint region.
fn outer_breakpoints(t: f64) -> [f64; 6] {
    [t / 256.0, t / 64.0, t / 16.0, t / 4.0, t / 2.0, 0.75 * t]
}

fn require_n2(p: &SystemParams) -> Result<()> {
    if p.n_antennas != 2 {
        return Err(Error::AntennaMismatch { expected: 2, got: p.n_antennas });
    }
    Ok(())
}

/// Exact dual-antenna SIR CCDF, P(SIR > T) for N = 2 (general α > 2).
///
/// Evaluates 2πλ ∫₀^T C(z,T) I(z,T) dz + exp(−c d² T^{2/α}); see the module
/// docs for why the tail over (T,∞) is available in closed form and why the
/// integrand itself is closed-form. A result outside [0,1] by more than the
/// estimated error is reported as an error, never clamped away.
pub fn ccdf_exact_n2(t: f64, p: &SystemParams, cfg: &QuadratureConfig) -> Result<Probability> {
    validate_params(p)?;
    require_n2(p)?;
    check_threshold(t)?;
    cfg.validate()?;
    if t == 0.0 {
        return Ok(Probability::ONE);
    }
    let tail = single_antenna_ccdf(t, p)?.value();

    let res = with_error_slot(|slot| {
        let f = |z: f64| match (c_factor(z, t, p, cfg), inner_r_integral(z, t, p, cfg)) {
            (Ok(c), Ok(i)) => c * i,
            (Err(e), _) | (_, Err(e)) => stash(slot, e),
        };
        integrate_adaptive_with_breakpoints(f, 0.0, t, &outer_breakpoints(t), cfg)
    })?;

    let two_pi_lambda = 2.0 * std::f64::consts::PI * p.lambda;
    let value = two_pi_lambda * res.value + tail;
    let err = two_pi_lambda * res.error_estimate + 2.0 * cfg.rel_tol * value.abs();
    Probability::clamped(value, (10.0 * err).max(1e-9))
}

/// Exact dual-antenna CCDF specialized to α = 4.
///
/// Single quadrature of C₄(z,T) against the closed integrand factor
/// (z^{3/2} − 3√z s + 2 s^{3/2})/(z−s)², s = (T−z)⁺, written in the factored
/// form (u + 2v)/(u+v)² with u = √z, v = √s; the factored form passes
/// smoothly through z = T/2 with the limit 3/(4√z). The z ≥ T tail again
/// sums to the closed value exp(−(π²/2) λ d² √T).
pub fn ccdf_exact_n2_alpha4(t: f64, p: &SystemParams, cfg: &QuadratureConfig) -> Result<Probability> {
    validate_params(p)?;
    require_n2(p)?;
    if p.alpha != 4.0 {
        return Err(Error::AlphaMismatch { expected: 4.0, got: p.alpha });
    }
    check_threshold(t)?;
    cfg.validate()?;
    if t == 0.0 {
        return Ok(Probability::ONE);
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let tail = (-(pi2 / 2.0) * p.lambda * p.d * p.d * t.sqrt()).exp();

    let res = with_error_slot(|slot| {
        let f = |z: f64| {
            let s = (t - z).max(0.0);
            let (u, v) = (z.sqrt(), s.sqrt());
            let den = u + v;
            if den == 0.0 {
                return 0.0;
            }
            let frac = (u + 2.0 * v) / (den * den);
            match c_factor_alpha4(z, t, p) {
                Ok(c4) => c4 * frac,
                Err(e) => stash(slot, e),
            }
        };
        integrate_adaptive_with_breakpoints(f, 0.0, t, &outer_breakpoints(t), cfg)
    })?;

    let value = (pi2 / 4.0) * p.lambda * p.d * p.d * res.value + tail;
    let err = (pi2 / 4.0) * p.lambda * p.d * p.d * res.error_estimate + 2.0 * cfg.rel_tol * value.abs();
    Probability::clamped(value, (10.0 * err).max(1e-9))
}

/// Exact dual-antenna SIR CDF, P(SIR ≤ T) for N = 2, with *relative*
/// accuracy preserved at small outage.
///
/// Uses the identity 1 = 2πλ ∫₀^T C(z,0⁺-form) I₀(z) dz + exp(−c d² T^{2/α})
/// (the z ≥ T closed forms integrated over (0,T)) to cancel the tail term
/// exactly against [`ccdf_exact_n2`]'s:
///
///   cdf(T) = 2πλ ∫₀^T [ e^{−c d² z^{2/α}} I₀(z) − C(z,T) I(z,T) ] dz,
///
/// whose integrand is pointwise nonnegative, so the adaptive relative
/// tolerance applies to the CDF itself. This is what the small-λ diversity
/// slope and critical-density solvers need; computing 1 − CCDF would lose
/// all relative precision below outage ~1e-8.
pub fn cdf_exact_n2(t: f64, p: &SystemParams, cfg: &QuadratureConfig) -> Result<Probability> {
    validate_params(p)?;
    require_n2(p)?;
    check_threshold(t)?;
    cfg.validate()?;
    if t == 0.0 {
        return Ok(Probability::ZERO);
    }
    let beta = p.beta();
    let c = interference_scale_c(p.lambda, p.alpha)?;
    let d2 = p.d * p.d;
    let i0_scale = d2 / p.alpha * gamma(1.0 - beta) * gamma(1.0 + beta);

    let res = with_error_slot(|slot| {
        let f = |z: f64| {
            let closed = (-c * d2 * z.powf(beta)).exp() * i0_scale * z.powf(beta - 1.0);
            match (c_factor(z, t, p, cfg), inner_r_integral(z, t, p, cfg)) {
                (Ok(cf), Ok(i)) => closed - cf * i,
                (Err(e), _) | (_, Err(e)) => stash(slot, e),
            }
        };
        integrate_adaptive_with_breakpoints(f, 0.0, t, &outer_breakpoints(t), cfg)
    })?;

    let two_pi_lambda = 2.0 * std::f64::consts::PI * p.lambda;
    let value = two_pi_lambda * res.value;
    let err = two_pi_lambda * res.error_estimate + 2.0 * cfg.rel_tol * value.abs();
    Probability::clamped(value, (10.0 * err).max(1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::scale_transform;

    const PI: f64 = std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn p35() -> SystemParams {
        SystemParams::new(1e-3, 3.5, 10.0, 2).unwrap()
    }

    fn p4d15() -> SystemParams {
        SystemParams::new(1e-3, 4.0, 15.0, 2).unwrap()
    }

    #[test]
    fn engine_exponential_tail() {
        let r = integrate_adaptive(|t| (-t).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "got {}", r.value);
        assert!(r.error_estimate < 1e-8);
    }

    #[test]
    fn engine_beta_integral_with_sqrt_singularity() {
        // ∫₀^∞ t^{−1/2}/(1+t)² dt = B(1/2, 3/2) = π/2.
        let r = integrate_adaptive(|t| t.powf(-0.5) / (1.0 + t).powi(2), 0.0, f64::INFINITY, &cfg())
            .unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-8 * PI, "got {}", r.value);
    }

    #[test]
    fn engine_zero_integrand_and_empty_range() {
        let r = integrate_adaptive(|_| 0.0, 0.0, 1.0, &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
        let r = integrate_adaptive(|t| t, 3.0, 3.0, &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn engine_interior_kink_with_breakpoint() {
        let f = |t: f64| (t - 1.0).abs();
        let r = integrate_adaptive_with_breakpoints(f, 0.0, 2.0, &[1.0], &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        // Breakpoints outside the range are ignored.
        let r2 = integrate_adaptive_with_breakpoints(f, 0.0, 2.0, &[-5.0, 1.0, 7.0], &cfg()).unwrap();
        assert_eq!(r.value, r2.value);
    }

    #[test]
    fn engine_subdivision_budget_reports_partial_estimate() {
        let tight = QuadratureConfig { rel_tol: 1e-13, abs_tol: 1e-30, max_subdivisions: 4 };
        let e = integrate_adaptive(|t: f64| t.powf(-0.9), 0.0, 1.0, &tight).unwrap_err();
        match e {
            Error::MaxSubdivisionsExceeded { estimate, limit, .. } => {
                assert_eq!(limit, 4);
                assert!(estimate.is_finite() && estimate > 0.0);
            }
            other => panic!("wrong error: {other:?}"),
        }
    }

    #[test]
    fn engine_rejects_non_finite_integrand() {
        // The pole lands exactly on the first panel's center node.
        let e = integrate_adaptive(|t| (t - 0.5f64).recip(), 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(e, Error::NonFiniteIntegrand { at } if at == 0.5));
        let e = integrate_adaptive(|_| f64::NAN, 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(e, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn engine_error_estimate_bounds_tighter_rerun() {
        let loose = QuadratureConfig { rel_tol: 1e-5, abs_tol: 1e-9, ..cfg() };
        let tight = QuadratureConfig { rel_tol: 1e-12, abs_tol: 1e-15, ..cfg() };
        let f = |t: f64| t.powf(-0.5) / (1.0 + t).powi(2);
        let a = integrate_adaptive(f, 0.0, f64::INFINITY, &loose).unwrap();
        let b = integrate_adaptive(f, 0.0, f64::INFINITY, &tight).unwrap();
        assert!((a.value - b.value).abs() <= a.error_estimate, "estimate not honest");
    }

    #[test]
    fn engine_deterministic_rerun() {
        // Kinky oscillation: every |sin| zero forces local refinement, so the
        // panel budget must be generous.
        let wide = QuadratureConfig { max_subdivisions: 5000, ..cfg() };
        let f = |t: f64| (t * 7.3).sin().abs().powf(1.3) * (-t).exp();
        let a = integrate_adaptive(f, 0.0, f64::INFINITY, &wide).unwrap();
        let b = integrate_adaptive(f, 0.0, f64::INFINITY, &wide).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn inner_integral_frozen_values() {
        // Independent-oracle values (different change of variables).
        let v = inner_r_integral(0.0, 2.0, &p35(), &cfg()).unwrap();
        assert!((v - 68.406_357_957_298_78).abs() < 1e-6 * v, "got {v}");
        let v = inner_r_integral(0.0, 1.0, &p4d15(), &cfg()).unwrap();
        assert!((v - 176.714_586_764_425_86).abs() < 1e-6 * v, "got {v}");
    }

    #[test]
    fn inner_integral_fast_path_matches_numeric() {
        // Force the numeric path by tiny s, compare against the s = 0 closed form.
        for (alpha, z) in [(3.5, 2.0), (4.0, 0.7), (2.5, 5.0)] {
            let p = SystemParams::new(1e-3, alpha, 10.0, 2).unwrap();
            let closed = inner_r_integral(z, z * 0.5, &p, &cfg()).unwrap(); // z > T → fast path
            let beta = p.beta();
            let expect = p.d * p.d / p.alpha * z.powf(beta - 1.0) * gamma(1.0 - beta) * gamma(1.0 + beta);
            assert_eq!(closed, expect);
            let near = move |s: f64| {
                let integrand = move |u: f64| {
                    let om = 1.0 - u;
                    let w = u / om;
                    let qz = 1.0 + z * w;
                    u.powf(-beta) * om.powf(beta - 2.0) / (qz * qz * (1.0 + s * w))
                };
                p.d * p.d / p.alpha * integrate_adaptive(integrand, 0.0, 1.0, &cfg()).unwrap().value
            };
            assert!((near(0.0) - closed).abs() < 1e-7 * closed, "alpha={alpha} z={z}");
        }
    }

    #[test]
    fn inner_integral_alpha4_beta_identity() {
        // z > T, α=4: (d²/4) z^{−1/2} Γ(1/2) Γ(3/2).
        let p = SystemParams::new(1e-3, 4.0, 10.0, 2).unwrap();
        let z = 3.0;
        let v = inner_r_integral(z, 1.0, &p, &cfg()).unwrap();
        let expect = p.d * p.d / 4.0 * z.powf(-0.5) * gamma(0.5) * gamma(1.5);
        assert!((v - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn inner_integral_diverges_at_origin() {
        assert!(inner_r_integral(0.0, 0.0, &p35(), &cfg()).is_err());
    }

    #[test]
    fn c_factor_at_z_zero_is_single_antenna_ccdf() {
        // C(0,T) must reproduce the one-antenna closed form: the dual-antenna
        // machinery with the auxiliary variable pinned at zero is the N = 1 law.
        let p = p35();
        let v = c_factor(0.0, 2.0, &p, &cfg()).unwrap();
        assert!((v - 0.423_323_064_122_606_5).abs() < 1e-8, "got {v}");
        for t in [0.1, 1.0, 10.0, 50.0] {
            let c = c_factor(0.0, t, &p, &cfg()).unwrap();
            let s = single_antenna_ccdf(t, &p).unwrap().value();
            assert!((c - s).abs() < 1e-7 * s.max(1e-3), "T={t}: {c} vs {s}");
        }
    }

    #[test]
    fn c_factor_matches_defining_integral() {
        // Brute-force the exponent r-integral (in w = r^{−α}d^α form, split
        // at w = 1 with the tail inverted) and exponentiate.
        let p = p35();
        let beta = p.beta();
        for (z, t) in [(0.4f64, 1.0), (0.5, 1.0), (2.0, 3.0), (0.02, 1.0), (5.0, 2.0)] {
            let s = (t - z).max(0.0);
            let head = integrate_adaptive(
                |w| w.powf(-beta) * (z + s + z * s * w) / ((1.0 + z * w) * (1.0 + s * w)),
                0.0,
                1.0,
                &cfg(),
            )
            .unwrap()
            .value;
            let tail = integrate_adaptive(
                |v| v.powf(beta - 1.0) * ((z + s) * v + z * s) / ((v + z) * (v + s)),
                0.0,
                1.0,
                &cfg(),
            )
            .unwrap()
            .value;
            let expect =
                (-(2.0 * PI * p.lambda * p.d * p.d / p.alpha) * (head + tail)).exp();
            let got = c_factor(z, t, &p, &cfg()).unwrap();
            assert!((got - expect).abs() < 1e-7, "z={z} T={t}: {got} vs {expect}");
        }
    }

    #[test]
    fn inner_integral_matches_defining_integral() {
        let p = p35();
        let beta = p.beta();
        for (z, t) in [(0.4f64, 1.0), (0.5, 1.0), (2.0, 3.0), (0.03, 2.0)] {
            let s = t - z;
            let head = integrate_adaptive(
                |w| {
                    let qz = 1.0 + z * w;
                    w.powf(-beta) / (qz * qz * (1.0 + s * w))
                },
                0.0,
                1.0,
                &cfg(),
            )
            .unwrap()
            .value;
            let tail = integrate_adaptive(
                |v| {
                    let vz = v + z;
                    v.powf(beta + 1.0) / (vz * vz * (v + s))
                },
                0.0,
                1.0,
                &cfg(),
            )
            .unwrap()
            .value;
            let expect = p.d * p.d / p.alpha * (head + tail);
            let got = inner_r_integral(z, t, &p, &cfg()).unwrap();
            assert!((got - expect).abs() < 1e-6 * expect, "z={z} T={t}: {got} vs {expect}");
        }
    }

    #[test]
    fn c_factor_trivial_cases() {
        let p = p35();
        assert_eq!(c_factor(0.0, 0.0, &p, &cfg()).unwrap(), 1.0);
        let tiny = SystemParams::new(1e-300, 3.5, 10.0, 2).unwrap();
        assert!(c_factor(1.0, 2.0, &tiny, &cfg()).unwrap() > 1.0 - 1e-12);
        let v = c_factor(5.0, 2.0, &p, &cfg()).unwrap();
        assert!(v > 0.0 && v <= 1.0);
    }

    #[test]
    fn c_factor_alpha4_matches_general_form() {
        let p = SystemParams::new(1e-3, 4.0, 15.0, 2).unwrap();
        for (z, t) in [(0.0, 1.0), (0.3, 1.0), (0.5, 1.0), (0.9, 1.0), (2.0, 1.0), (1.0, 2.0), (4.0, 0.0)] {
            let closed = c_factor_alpha4(z, t, &p).unwrap();
            let numeric = c_factor(z, t, &p, &cfg()).unwrap();
            assert!(
                (closed - numeric).abs() < 1e-6 * closed.max(1e-12),
                "z={z} T={t}: {closed} vs {numeric}"
            );
        }
    }

    #[test]
    fn c_factor_alpha4_removable_singularity() {
        let p = SystemParams::new(1e-3, 4.0, 15.0, 2).unwrap();
        let t = 1.0;
        let at = c_factor_alpha4(t / 2.0, t, &p).unwrap();
        // Exponent fraction limit (3/2)√(T/2) at the singular point.
        let expect = (-(PI * PI / 2.0) * p.lambda * p.d * p.d * 1.5 * (t / 2.0f64).sqrt()).exp();
        assert!((at - expect).abs() < 1e-14);
        for eps in [1e-6, -1e-6] {
            let near = c_factor_alpha4(t / 2.0 + eps, t, &p).unwrap();
            assert!((near - at).abs() < 1e-6, "continuity at the removable point");
        }
    }

    #[test]
    fn c_factor_alpha4_beyond_t_reduces_to_sqrt_exponent() {
        let p = SystemParams::new(1e-3, 4.0, 15.0, 2).unwrap();
        let z = 7.0;
        let v = c_factor_alpha4(z, 2.0, &p).unwrap();
        let expect = (-(PI * PI / 2.0) * p.lambda * p.d * p.d * z.sqrt()).exp();
        assert!((v - expect).abs() < 1e-15);
        assert!(matches!(c_factor_alpha4(1.0, 1.0, &p35()), Err(Error::AlphaMismatch { .. })));
    }

    #[test]
    fn ccdf_exact_frozen_general_alpha() {
        let p = p35();
        for (t, expect) in [
            (0.1, 0.940_203_303_326_965_4),
            (1.0, 0.762_250_501_040_253_5),
            (10.0, 0.261_388_644_457_248_3),
            (100.0, 0.001_530_120_876_749_092_4),
        ] {
            let v = ccdf_exact_n2(t, &p, &cfg()).unwrap().value();
            assert!((v - expect).abs() < 2e-6 * expect.max(1e-3), "T={t}: {v} vs {expect}");
        }
    }

    #[test]
    fn ccdf_exact_frozen_alpha4() {
        let p = p4d15();
        for (t, expect) in [(0.5, 0.651_842_418_790_603_5), (2.0, 0.380_788_924_226_606_7)] {
            let general = ccdf_exact_n2(t, &p, &cfg()).unwrap().value();
            let special = ccdf_exact_n2_alpha4(t, &p, &cfg()).unwrap().value();
            assert!((general - expect).abs() < 2e-6, "general T={t}: {general}");
            assert!((special - expect).abs() < 2e-6, "alpha4 T={t}: {special}");
        }
    }

    #[test]
    fn ccdf_threshold_zero_is_one_exactly() {
        assert_eq!(ccdf_exact_n2(0.0, &p35(), &cfg()).unwrap().value(), 1.0);
        assert_eq!(ccdf_exact_n2_alpha4(0.0, &p4d15(), &cfg()).unwrap().value(), 1.0);
        assert_eq!(cdf_exact_n2(0.0, &p35(), &cfg()).unwrap().value(), 0.0);
    }

    #[test]
    fn ccdf_requires_two_antennas_and_matching_alpha() {
        let p1 = SystemParams::new(1e-3, 3.5, 10.0, 1).unwrap();
        assert!(matches!(ccdf_exact_n2(1.0, &p1, &cfg()), Err(Error::AntennaMismatch { .. })));
        assert!(matches!(
            ccdf_exact_n2_alpha4(1.0, &p35(), &cfg()),
            Err(Error::AlphaMismatch { .. })
        ));
    }

    #[test]
    fn cdf_complements_ccdf() {
        let p = p35();
        for t in [0.1, 1.0, 10.0] {
            let ccdf = ccdf_exact_n2(t, &p, &cfg()).unwrap().value();
            let cdf = cdf_exact_n2(t, &p, &cfg()).unwrap().value();
            assert!((ccdf + cdf - 1.0).abs() < 1e-7, "T={t}: {ccdf} + {cdf}");
        }
    }

    #[test]
    fn cdf_keeps_relative_accuracy_at_small_density() {
        // Frozen small-λ slope: cdf/λ → 214.58 at λ=1e-7 (α=4, d=10, T=1).
        let p = SystemParams::new(1e-7, 4.0, 10.0, 2).unwrap();
        let cdf = cdf_exact_n2(1.0, &p, &cfg()).unwrap().value();
        let ratio = cdf / 1e-7;
        assert!((ratio - 214.586).abs() < 0.05, "got {ratio}");
    }

    #[test]
    fn ccdf_monotone_in_parameters() {
        let mut last = 1.0;
        for t in [0.5, 1.0, 2.0, 4.0] {
            let v = ccdf_exact_n2(t, &p35(), &cfg()).unwrap().value();
            assert!(v < last, "not decreasing in T at {t}");
            last = v;
        }
        let mut last = 1.0;
        for lam in [3e-4, 1e-3, 3e-3] {
            let p = SystemParams::new(lam, 3.5, 10.0, 2).unwrap();
            let v = ccdf_exact_n2(1.0, &p, &cfg()).unwrap().value();
            assert!(v < last, "not decreasing in lambda at {lam}");
            last = v;
        }
        let mut last = 1.0;
        for d in [5.0, 10.0, 20.0] {
            let p = SystemParams::new(1e-3, 3.5, d, 2).unwrap();
            let v = ccdf_exact_n2(1.0, &p, &cfg()).unwrap().value();
            assert!(v < last, "not decreasing in d at {d}");
            last = v;
        }
    }

    #[test]
    fn ccdf_scale_invariant() {
        let p = p35();
        let base = ccdf_exact_n2(2.0, &p, &cfg()).unwrap().value();
        for kappa in [0.25, 3.0, 10.0] {
            let q = scale_transform(&p, kappa);
            let v = ccdf_exact_n2(2.0, &q, &cfg()).unwrap().value();
            assert!((v - base).abs() < 1e-8, "kappa={kappa}: {v} vs {base}");
        }
    }
}
