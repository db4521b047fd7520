//! Closed-form CCDFs built from derivatives of the interference Laplace
//! transform: the full-correlation model and the min/max-fading sandwich
//! bounds, for any antenna count.
//!
//! Everything rests on one identity: for N unit-mean exponential signal
//! gains and a common interference variable U,
//!
//!   P((g₁+…+g_N)/(U d^α) ≥ v) = Σ_{k=0}^{N−1} (−1)^k (s^k/k!) ∂^k L_U(s),
//!
//! evaluated at s = v d^α. The interference transforms here are all
//! stretched exponentials L(s) = exp(−c s^β) with β = 2/α, whose derivatives
//! follow from the complete Bell polynomials over the derivatives of the
//! exponent (Faà di Bruno), computed by the standard recurrence.

use crate::core::{
    check_threshold, interference_scale_c, validate_params, Probability,
    SystemParams,
};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, QuadratureConfig};
use crate::special::{binomial, gamma};

/// A stretched-exponential Laplace transform L(s) = exp(−c_scale · s^beta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceSpec {
    pub c_scale: f64,
    pub beta: f64,
}

impl LaplaceSpec {
    pub fn new(c_scale: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::NonPositive { name: "beta (must lie in (0,1))", value: beta });
        }
        if !(c_scale >= 0.0) || !c_scale.is_finite() {
            return Err(Error::NonPositive { name: "c_scale", value: c_scale });
        }
        Ok(LaplaceSpec { c_scale, beta })
    }
}

/// ∂^k L(s) for k = 0..K−1 at one point s.
///
/// L is a Laplace transform of a nonnegative variable, hence completely
/// monotone: the entries alternate in sign, (−1)^k values[k] ≥ 0.
#[derive(Debug, Clone)]
pub struct DerivativeTable {
    pub s: f64,
    pub values: Vec<f64>,
}

/// Exact derivatives of exp(−c s^β) up to order K−1.
///
/// Writes ∂^k e^{f(s)} = e^{f(s)} B_k(f′, …, f^{(k)}) with
/// f^{(j)}(s) = −c β(β−1)⋯(β−j+1) s^{β−j} and builds the complete Bell
/// polynomials by the recurrence B_{k+1} = Σ_j C(k,j) B_{k−j} f^{(j+1)};
/// cost O(K²), exact to floating point (no finite differencing).
pub fn exp_power_derivatives(spec: &LaplaceSpec, s: f64, k_count: usize) -> Result<DerivativeTable> {
    LaplaceSpec::new(spec.c_scale, spec.beta)?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::NonPositive { name: "s", value: s });
    }
    if k_count == 0 {
        return Err(Error::NonPositive { name: "k_count", value: 0.0 });
    }

    // f^{(j)} for j = 1..K−1 (index j−1).
    let mut fderiv = Vec::with_capacity(k_count.saturating_sub(1));
    let mut falling = 1.0f64; // β(β−1)⋯(β−j+1)
    for j in 1..k_count {
        falling *= spec.beta - (j as f64 - 1.0);
        fderiv.push(-spec.c_scale * falling * s.powf(spec.beta - j as f64));
    }

    let mut bell = vec![0.0f64; k_count];
    bell[0] = 1.0;
    for k in 0..k_count - 1 {
        let mut acc = 0.0;
        for j in 0..=k {
            acc += binomial(k as u32, j as u32) * bell[k - j] * fderiv[j];
        }
        bell[k + 1] = acc;
    }

    let l0 = (-spec.c_scale * s.powf(spec.beta)).exp();
    let values: Vec<f64> = bell.iter().map(|b| l0 * b).collect();
    debug_assert!(
        values
            .iter()
            .enumerate()
            .all(|(k, v)| if k % 2 == 0 { *v >= 0.0 } else { *v <= 0.0 }),
        "complete monotonicity violated"
    );
    Ok(DerivativeTable { s, values })
}

/// The alternating Laplace-derivative sum: P(Σ gains ≥ s·U) from a table of
/// ∂^k L_U at s, truncated after n terms.
pub fn ccdf_from_laplace(table: &DerivativeTable, n: usize) -> Result<Probability> {
    if n == 0 || n > table.values.len() {
        return Err(Error::NonPositive {
            name: "n (table must hold at least n derivatives)",
            value: n as f64,
        });
    }
    let mut term = 1.0f64; // (−1)^k s^k / k!
    let mut sum = table.values[0];
    for k in 1..n {
        term *= -table.s / k as f64;
        sum += term * table.values[k];
    }
    Probability::clamped(sum, 1e-9)
}

fn laplace_model_ccdf(spec: &LaplaceSpec, s: f64, n: u32) -> Result<Probability> {
    let table = exp_power_derivatives(spec, s, n as usize)?;
    ccdf_from_laplace(&table, n as usize)
}

/// CCDF under the full-correlation assumption (all antennas see the same
/// interference realization), any N: the Laplace sum over L(s) = e^{−c s^β}
/// at s = T d^α.
pub fn ccdf_fc(t: f64, p: &SystemParams) -> Result<Probability> {
    validate_params(p)?;
    check_threshold(t)?;
    if t == 0.0 {
        return Ok(Probability::ONE);
    }
    let spec = LaplaceSpec::new(interference_scale_c(p.lambda, p.alpha)?, p.beta())?;
    laplace_model_ccdf(&spec, t * p.d.powf(p.alpha), p.n_antennas)
}

/// N = 2 full-correlation fast path: e^{−y}(1 + βy) with y = c d² T^{2/α}.
///
/// The sign of the second term is plus: differentiating e^{−c s^β} once
/// gives −cβ s^{β−1} e^{−c s^β}, and the k = 1 term of the alternating sum
/// negates it. Only the plus sign keeps the value inside [0,1] and matches
/// both the general path above and the full-correlation simulator.
pub fn ccdf_fc_n2(t: f64, p: &SystemParams) -> Result<Probability> {
    validate_params(p)?;
    require_n(p, 2)?;
    check_threshold(t)?;
    let beta = p.beta();
    let y = interference_scale_c(p.lambda, p.alpha)? * p.d * p.d * t.powf(beta);
    Probability::clamped((-y).exp() * (1.0 + beta * y), 1e-12)
}

/// CDF counterpart of [`ccdf_fc_n2`], stable at small outage:
/// 1 − e^{−y}(1+βy) = −expm1(−y) − βy e^{−y}.
pub fn cdf_fc_n2(t: f64, p: &SystemParams) -> Result<Probability> {
    validate_params(p)?;
    require_n(p, 2)?;
    check_threshold(t)?;
    let beta = p.beta();
    let y = interference_scale_c(p.lambda, p.alpha)? * p.d * p.d * t.powf(beta);
    Probability::clamped(-(-y).exp_m1() - beta * y * (-y).exp(), 1e-12)
}

/// E[h_max^{2/α}] for h_max the maximum of N unit-mean exponentials.
///
/// Closed form N Γ(1+2/α) Σ_{j<N} C(N−1,j)(−1)^j (j+1)^{−1−2/α} with
/// compensated summation; the alternating sum sheds digits as N grows, so
/// beyond N = 30 the moment is taken by quadrature of the order-statistic
/// density h^{2/α} N (1−e^{−h})^{N−1} e^{−h} instead.
pub fn hmax_moment(n: u32, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroAntennas);
    }
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let beta = 2.0 / alpha;
    if n > 30 {
        let nf = n as f64;
        let f = move |h: f64| h.powf(beta) * nf * (1.0 - (-h).exp()).powf(nf - 1.0) * (-h).exp();
        let r = integrate_adaptive(f, 0.0, f64::INFINITY, &QuadratureConfig::default())?;
        return Ok(r.value);
    }
    // Kahan summation over the alternating binomial series.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in 0..n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * binomial(n - 1, j) * ((j + 1) as f64).powf(-1.0 - beta);
        let yk = term - comp;
        let tk = sum + yk;
        comp = (tk - sum) - yk;
        sum = tk;
    }
    Ok(n as f64 * gamma(1.0 + beta) * sum)
}

/// Min-fading bound CCDF (every interferer keeps its smallest per-antenna
/// gain): an upper bound on the exact CCDF. The minimum is Exp(N), which
/// rescales the evaluation point to s = (T/N) d^α with the unchanged c.
pub fn ccdf_min(t: f64, p: &SystemParams) -> Result<Probability> {
    validate_params(p)?;
    check_threshold(t)?;
    if t == 0.0 {
        return Ok(Probability::ONE);
    }
    let spec = LaplaceSpec::new(interference_scale_c(p.lambda, p.alpha)?, p.beta())?;
    laplace_model_ccdf(&spec, t / p.n_antennas as f64 * p.d.powf(p.alpha), p.n_antennas)
}

/// Max-fading bound CCDF (largest per-antenna gain): a lower bound on the
/// exact CCDF. The Laplace exponent coefficient becomes
/// λ π Γ(1−2/α) E[h_max^{2/α}].
pub fn ccdf_max(t: f64, p: &SystemParams) -> Result<Probability> {
    validate_params(p)?;
    check_threshold(t)?;
    if t == 0.0 {
        return Ok(Probability::ONE);
    }
    let beta = p.beta();
    let c_max =
        p.lambda * std::f64::consts::PI * gamma(1.0 - beta) * hmax_moment(p.n_antennas, p.alpha)?;
    let spec = LaplaceSpec::new(c_max, beta)?;
    laplace_model_ccdf(&spec, t * p.d.powf(p.alpha), p.n_antennas)
}

fn require_n(p: &SystemParams, expected: u32) -> Result<()> {
    if p.n_antennas != expected {
        return Err(Error::AntennaMismatch { expected, got: p.n_antennas });
    }
    Ok(())
}

/// Dual-antenna closed forms of the sandwich: both bounds are
/// e^{−y}(α + 2y)/α = e^{−y}(1 + βy) with y = c_i d² T^{2/α}, where
/// c₁ = c·2^{−2/α} (min side, upper CCDF bound) and c₂ = c·(2 − 2^{−2/α})
/// (max side, lower bound). Returns (lower, upper).
pub fn minmax_closed_n2(t: f64, p: &SystemParams) -> Result<(Probability, Probability)> {
    validate_params(p)?;
    require_n(p, 2)?;
    check_threshold(t)?;
    let beta = p.beta();
    let c = interference_scale_c(p.lambda, p.alpha)?;
    let pow2 = 2.0f64.powf(-beta);
    let eval = |ci: f64| {
        let y = ci * p.d * p.d * t.powf(beta);
        Probability::clamped((-y).exp() * (1.0 + beta * y), 1e-12)
    };
    Ok((eval(c * (2.0 - pow2))?, eval(c * pow2)?))
}

/// Four-antenna closed forms of the sandwich: cubic polynomial weight
///
///   e^{−y} [3α³ + (11α² − 12α + 4) y + 12(α−1) y² + 4 y³] / (3α³),
///
/// y = c_i d² T^{2/α}, with c₁ = c·4^{−2/α} (upper) and
/// c₂ = λπΓ(1−2/α)E[h_max^{2/α}] for N = 4 (lower). The d² factor is part
/// of y; the polynomial agrees with the general Laplace-sum path to
/// floating-point accuracy. Returns (lower, upper).
pub fn minmax_closed_n4(t: f64, p: &SystemParams) -> Result<(Probability, Probability)> {
    validate_params(p)?;
    require_n(p, 4)?;
    check_threshold(t)?;
    let a = p.alpha;
    let beta = p.beta();
    let c = interference_scale_c(p.lambda, p.alpha)?;
    let c1 = c * 4.0f64.powf(-beta);
    let c2 = p.lambda * std::f64::consts::PI * gamma(1.0 - beta) * hmax_moment(4, a)?;
    let a3 = 3.0 * a * a * a;
    let eval = |ci: f64| {
        let y = ci * p.d * p.d * t.powf(beta);
        let poly = a3 + y * ((11.0 * a * a - 12.0 * a + 4.0) + y * (12.0 * (a - 1.0) + y * 4.0));
        Probability::clamped((-y).exp() * poly / a3, 1e-9)
    };
    Ok((eval(c2)?, eval(c1)?))
}

/// Pochhammer (rising factorial) (a)_k = a(a+1)⋯(a+k−1).
fn poch_rising(a: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= a + i as f64;
    }
    acc
}

/// Small-density limits of P(SIR ≤ T)/c′ with c′ = πλd²T^{2/α}Γ(1−2/α):
/// returns (lower_coeff, upper_coeff) = (N^{−2/α}Γ(1+2/α)·D, E[h_max^{2/α}]·D)
/// where D(α,N) = Σ_{k<N} ((−1)^k/k!) (1+2/α−k)_k.
pub fn asymptotic_cdf_slope_bounds(alpha: f64, n: u32) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::ZeroAntennas);
    }
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let beta = 2.0 / alpha;
    let mut d = 0.0f64;
    let mut kfact = 1.0f64;
    for k in 0..n {
        if k > 0 {
            kfact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        d += sign / kfact * poch_rising(1.0 + beta - k as f64, k);
    }
    let lower = (n as f64).powf(-beta) * gamma(1.0 + beta) * d;
    let upper = hmax_moment(n, alpha)? * d;
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::single_antenna_ccdf;
    use rand::Rng;
    use rand::SeedableRng;

    fn p(lambda: f64, alpha: f64, d: f64, n: u32) -> SystemParams {
        SystemParams::new(lambda, alpha, d, n).unwrap()
    }

    #[test]
    fn derivatives_low_orders_closed_form() {
        let spec = LaplaceSpec::new(0.7, 0.5).unwrap();
        let s = 2.3;
        let t = exp_power_derivatives(&spec, s, 2).unwrap();
        let l0 = (-0.7 * s.sqrt()).exp();
        assert!((t.values[0] - l0).abs() < 1e-16);
        let d1 = -0.7 * 0.5 * s.powf(-0.5) * l0;
        assert!((t.values[1] - d1).abs() < 1e-16 * d1.abs().max(1.0));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for (c, beta, s) in [(0.49, 0.5, 1.7), (2.0, 2.0 / 3.5, 0.8), (0.05, 0.9, 12.0)] {
            let spec = LaplaceSpec::new(c, beta).unwrap();
            let table = exp_power_derivatives(&spec, s, 4).unwrap();
            let l = |x: f64| (-c * x.powf(beta)).exp();
            let h2 = 1e-4 * s;
            let fd2 = (l(s + h2) - 2.0 * l(s) + l(s - h2)) / (h2 * h2);
            let h3 = 1e-3 * s;
            let fd3 = (l(s + 2.0 * h3) - 2.0 * l(s + h3) + 2.0 * l(s - h3) - l(s - 2.0 * h3))
                / (2.0 * h3 * h3 * h3);
            assert!((table.values[2] - fd2).abs() < 1e-6 * fd2.abs(), "k=2: {} vs {fd2}", table.values[2]);
            assert!((table.values[3] - fd3).abs() < 1e-3 * fd3.abs(), "k=3: {} vs {fd3}", table.values[3]);
        }
    }

    #[test]
    fn derivatives_alternate_in_sign() {
        for beta in [0.15, 0.5, 2.0 / 3.5, 0.85] {
            for s in [0.01, 1.0, 40.0] {
                let spec = LaplaceSpec::new(1.3, beta).unwrap();
                let t = exp_power_derivatives(&spec, s, 9).unwrap();
                for (k, v) in t.values.iter().enumerate() {
                    let signed = if k % 2 == 0 { *v } else { -*v };
                    assert!(signed >= 0.0, "beta={beta} s={s} k={k}: {v}");
                }
            }
        }
    }

    #[test]
    fn laplace_sum_n1_is_transform_itself() {
        let spec = LaplaceSpec::new(0.9, 0.5).unwrap();
        let t = exp_power_derivatives(&spec, 4.0, 1).unwrap();
        let v = ccdf_from_laplace(&t, 1).unwrap().value();
        assert!((v - (-0.9 * 2.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn laplace_sum_n2_stretched_form() {
        let spec = LaplaceSpec::new(0.31, 2.0 / 3.5).unwrap();
        let s = 5.0;
        let t = exp_power_derivatives(&spec, s, 2).unwrap();
        let v = ccdf_from_laplace(&t, 2).unwrap().value();
        let y = 0.31 * s.powf(2.0 / 3.5);
        let expect = (-y).exp() * (1.0 + 2.0 / 3.5 * y);
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn laplace_sum_exponential_interference_vs_monte_carlo() {
        // U ~ Exp(rate μ) has L(s) = μ/(μ+s) and ∂^k L = (−1)^k k! μ/(μ+s)^{k+1}.
        let (mu, s) = (0.8f64, 1.4f64);
        let values: Vec<f64> = (0..2)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * (1..=k).map(|i| i as f64).product::<f64>() * mu
                    / (mu + s).powi(k + 1)
            })
            .collect();
        let table = DerivativeTable { s, values };
        let analytic = ccdf_from_laplace(&table, 2).unwrap().value();

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 200_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let g1: f64 = -rng.random::<f64>().ln();
            let g2: f64 = -rng.random::<f64>().ln();
            let u: f64 = -rng.random::<f64>().ln() / mu;
            if g1 + g2 >= s * u {
                hits += 1;
            }
        }
        let mc = hits as f64 / n as f64;
        let sigma = (mc * (1.0 - mc) / n as f64).sqrt();
        assert!((analytic - mc).abs() < 4.0 * sigma, "{analytic} vs {mc} ± {sigma}");
    }

    #[test]
    fn fc_reference_point() {
        // α=4, λ=1e-3, d=10; pick T so that y = c d² √T = 1: CCDF = 1.5/e.
        let params = p(1e-3, 4.0, 10.0, 2);
        let cd2 = interference_scale_c(1e-3, 4.0).unwrap() * 100.0;
        let t = cd2.powi(-2);
        let v = ccdf_fc(t, &params).unwrap().value();
        assert!((v - 0.551_819_161_757_163_5).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn fc_fast_path_equals_general_path() {
        for alpha in [2.5, 3.0, 3.5, 4.0, 5.0] {
            let params = p(1e-3, alpha, 15.0, 2);
            for t in [0.01, 0.5, 1.0, 8.0, 120.0] {
                let fast = ccdf_fc_n2(t, &params).unwrap().value();
                let general = ccdf_fc(t, &params).unwrap().value();
                assert!((fast - general).abs() <= 1e-12, "alpha={alpha} T={t}: {fast} vs {general}");
            }
        }
    }

    #[test]
    fn fc_cdf_is_stable_complement() {
        let params = p(1e-3, 4.0, 15.0, 2);
        for t in [0.0, 0.3, 2.0, 50.0] {
            let a = cdf_fc_n2(t, &params).unwrap().value();
            let b = 1.0 - ccdf_fc_n2(t, &params).unwrap().value();
            assert!((a - b).abs() < 1e-14);
        }
        // Relative accuracy at vanishing outage.
        let sparse = p(1e-12, 4.0, 15.0, 2);
        let y = interference_scale_c(1e-12, 4.0).unwrap() * 225.0; // T = 1
        let expect = (1.0 - 0.5) * y; // leading term (1−β)y
        let got = cdf_fc_n2(1.0, &sparse).unwrap().value();
        assert!((got - expect).abs() < 1e-3 * expect, "{got} vs {expect}");
    }

    #[test]
    fn fc_n1_reduces_to_single_antenna() {
        let params = p(1e-3, 3.5, 10.0, 1);
        for t in [0.2, 1.0, 30.0] {
            let a = ccdf_fc(t, &params).unwrap().value();
            let b = single_antenna_ccdf(t, &params).unwrap().value();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn hmax_moment_reference_values() {
        assert!((hmax_moment(1, 4.0).unwrap() - gamma(1.5)).abs() < 1e-15);
        assert!((hmax_moment(2, 4.0).unwrap() - 1.145_796_782_247_766).abs() < 1e-14);
        assert!((hmax_moment(4, 4.0).unwrap() - 1.388_505_243_031_128_7).abs() < 1e-14);
        // Spec'd closed expression for N=2: 2Γ(3/2)(1 − 2^{−3/2}).
        let expect = 2.0 * gamma(1.5) * (1.0 - 2.0f64.powf(-1.5));
        assert!((hmax_moment(2, 4.0).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn hmax_moment_matches_order_statistic_quadrature() {
        for (n, alpha) in [(1u32, 3.0), (3, 3.5), (8, 2.5), (20, 6.0), (30, 4.0)] {
            let closed = hmax_moment(n, alpha).unwrap();
            let beta = 2.0 / alpha;
            let nf = n as f64;
            let f = move |h: f64| h.powf(beta) * nf * (1.0 - (-h).exp()).powf(nf - 1.0) * (-h).exp();
            let q = integrate_adaptive(f, 0.0, f64::INFINITY, &QuadratureConfig::default())
                .unwrap()
                .value;
            assert!((closed - q).abs() < 1e-8 * q, "n={n} alpha={alpha}: {closed} vs {q}");
        }
    }

    #[test]
    fn hmax_moment_fallback_joins_smoothly() {
        // Monotone increasing in N across the closed-form/quadrature switch.
        let mut last = 0.0;
        for n in 28..=34 {
            let v = hmax_moment(n, 3.5).unwrap();
            assert!(v > last, "n={n}: {v} ≤ {last}");
            last = v;
        }
    }

    #[test]
    fn min_max_n1_collapse_to_single_antenna() {
        let params = p(2e-3, 3.0, 8.0, 1);
        for t in [0.1, 1.0, 12.0] {
            let single = single_antenna_ccdf(t, &params).unwrap().value();
            let lo = ccdf_max(t, &params).unwrap().value();
            let hi = ccdf_min(t, &params).unwrap().value();
            assert!((lo - single).abs() < 1e-15, "max-side N=1");
            assert!((hi - single).abs() < 1e-15, "min-side N=1");
        }
    }

    #[test]
    fn sandwich_ordering_holds_everywhere() {
        for n in [1u32, 2, 3, 4, 8] {
            for alpha in [2.5, 3.5, 4.0, 5.0] {
                for t in [0.05, 0.8, 5.0, 60.0] {
                    let params = p(1e-3, alpha, 10.0, n);
                    let hi = ccdf_min(t, &params).unwrap().value();
                    let lo = ccdf_max(t, &params).unwrap().value();
                    assert!(hi >= lo - 1e-12, "N={n} α={alpha} T={t}: {hi} < {lo}");
                }
            }
        }
    }

    #[test]
    fn closed_n2_agrees_with_general_path() {
        for alpha in [2.5, 3.5, 4.0, 6.0] {
            let params = p(1e-3, alpha, 15.0, 2);
            for t in [0.0, 0.2, 1.0, 9.0] {
                let (lo_c, hi_c) = minmax_closed_n2(t, &params).unwrap();
                let hi = ccdf_min(t, &params).unwrap().value();
                let lo = ccdf_max(t, &params).unwrap().value();
                assert!((hi_c.value() - hi).abs() < 1e-12, "upper α={alpha} T={t}");
                assert!((lo_c.value() - lo).abs() < 1e-12, "lower α={alpha} T={t}");
            }
        }
    }

    #[test]
    fn closed_n2_alpha4_constants() {
        // c₁ = (√2/4)π²λ and c₂ = ((4−√2)/4)π²λ at α = 4.
        let c = interference_scale_c(1e-3, 4.0).unwrap();
        let pi2l = std::f64::consts::PI.powi(2) * 1e-3;
        let c1 = c * 2.0f64.powf(-0.5);
        let c2 = c * (2.0 - 2.0f64.powf(-0.5));
        assert!((c1 - 2.0f64.sqrt() / 4.0 * pi2l).abs() < 1e-18);
        assert!((c2 - (4.0 - 2.0f64.sqrt()) / 4.0 * pi2l).abs() < 1e-18);
    }

    #[test]
    fn closed_n4_agrees_with_general_path() {
        for alpha in [3.0, 4.0, 5.5] {
            let params = p(1e-3, alpha, 15.0, 4);
            for t in [0.0, 0.2, 1.0, 9.0, 80.0] {
                let (lo_c, hi_c) = minmax_closed_n4(t, &params).unwrap();
                let hi = ccdf_min(t, &params).unwrap().value();
                let lo = ccdf_max(t, &params).unwrap().value();
                assert!((hi_c.value() - hi).abs() < 1e-10, "upper α={alpha} T={t}: {} vs {hi}", hi_c.value());
                assert!((lo_c.value() - lo).abs() < 1e-10, "lower α={alpha} T={t}: {} vs {lo}", lo_c.value());
            }
        }
    }

    #[test]
    fn closed_n4_alpha4_printed_constants() {
        // c₁ = 0.25 π²λd² exactly; c₂ ≈ 0.7834 π²λd².
        let c = interference_scale_c(1e-3, 4.0).unwrap();
        let c1 = c * 0.5;
        assert!((c1 - 0.25 * std::f64::consts::PI.powi(2) * 1e-3).abs() < 1e-18);
        let c2 = 1e-3 * std::f64::consts::PI * gamma(0.5) * hmax_moment(4, 4.0).unwrap();
        let ratio = c2 / (std::f64::consts::PI.powi(2) * 1e-3);
        assert!((ratio - 0.783_380_194_819_608_6).abs() < 1e-13, "got {ratio}");
    }

    #[test]
    fn asymptotic_bounds_reference_values() {
        let (_, _) = asymptotic_cdf_slope_bounds(4.0, 1).unwrap();
        // D(α,N): frozen oracle values.
        let d_of = |alpha: f64, n: u32| {
            let beta = 2.0 / alpha;
            let (lo, _) = asymptotic_cdf_slope_bounds(alpha, n).unwrap();
            lo / ((n as f64).powf(-beta) * gamma(1.0 + beta))
        };
        assert!((d_of(4.0, 2) - 0.5).abs() < 1e-15);
        assert!((d_of(4.0, 4) - 0.3125).abs() < 1e-14);
        assert!((d_of(3.5, 8) - 0.156_322_828_836_589_5).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_bounds_n1_coincide() {
        for alpha in [2.5, 3.5, 5.0] {
            let (lo, hi) = asymptotic_cdf_slope_bounds(alpha, 1).unwrap();
            let g = gamma(1.0 + 2.0 / alpha);
            assert!((lo - g).abs() < 1e-14 && (hi - g).abs() < 1e-14);
        }
    }

    #[test]
    fn asymptotic_bounds_ordered_and_positive() {
        for alpha in [2.5, 3.0, 4.0, 6.0] {
            let mut last_d = f64::INFINITY;
            for n in 1..=8u32 {
                let (lo, hi) = asymptotic_cdf_slope_bounds(alpha, n).unwrap();
                assert!(lo > 0.0, "α={alpha} N={n}: lower {lo} not positive");
                assert!(lo <= hi + 1e-15, "α={alpha} N={n}: {lo} > {hi}");
                let beta = 2.0 / alpha;
                let d = lo / ((n as f64).powf(-beta) * gamma(1.0 + beta));
                assert!(d < last_d + 1e-15, "D not decreasing in N at α={alpha} N={n}");
                last_d = d;
            }
        }
    }

    #[test]
    fn all_ccdfs_start_at_one_and_stay_in_unit_interval() {
        for n in [1u32, 2, 4, 7] {
            let params = p(5e-4, 3.2, 12.0, n);
            for f in [ccdf_fc, ccdf_min, ccdf_max] {
                assert_eq!(f(0.0, &params).unwrap().value(), 1.0);
                let mut last = 1.0;
                for t in [0.01, 0.4, 2.0, 25.0, 400.0] {
                    let v = f(t, &params).unwrap().value();
                    assert!((0.0..=1.0).contains(&v));
                    assert!(v <= last + 1e-12, "non-monotone at N={n} T={t}");
                    last = v;
                }
            }
        }
    }
}
