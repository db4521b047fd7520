//! Domain types, parameter validation, the single-antenna closed form, and
//! the λd² scale invariance helper.

use crate::error::{Error, Result};

/// Receiver/field parameters: interferer density λ (per unit area), path-loss
/// exponent α > 2, desired-link distance d, and antenna count N.
///
/// Fading is fixed by the model (unit-mean exponential power gains) and has
/// no parameters here. All formulas depend on λ and d only through λd², see
/// [`scale_transform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub lambda: f64,
    pub alpha: f64,
    pub d: f64,
    pub n_antennas: u32,
}

impl SystemParams {
    pub fn new(lambda: f64, alpha: f64, d: f64, n_antennas: u32) -> Result<Self> {
        let p = SystemParams { lambda, alpha, d, n_antennas };
        validate_params(&p)?;
        Ok(p)
    }

    /// The ubiquitous exponent β = 2/α ∈ (0,1).
    pub fn beta(&self) -> f64 {
        2.0 / self.alpha
    }
}

/// Checks all `SystemParams` invariants, returning the first violation.
pub fn validate_params(p: &SystemParams) -> Result<()> {
    if !(p.alpha > 2.0) || !p.alpha.is_finite() {
        return Err(Error::AlphaOutOfRange(p.alpha));
    }
    if !(p.lambda > 0.0) || !p.lambda.is_finite() {
        return Err(Error::NonPositive { name: "lambda", value: p.lambda });
    }
    if !(p.d > 0.0) || !p.d.is_finite() {
        return Err(Error::NonPositive { name: "d", value: p.d });
    }
    if p.n_antennas == 0 {
        return Err(Error::ZeroAntennas);
    }
    Ok(())
}

/// Which joint law the per-antenna interference powers follow.
///
/// The interferer *locations* are always one Poisson field shared by all
/// antennas; the variants differ in how the per-interferer fading marks are
/// tied across antennas (identical, independent, extremal), and
/// `NoCorrelation` additionally redraws the locations per antenna.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ModelKind {
    /// Shared locations, independent fading across antennas: the reference model.
    #[default]
    ExactCorrelated,
    /// All antennas see the identical interference realization.
    FullCorrelation,
    /// Independent field realization per antenna (locations and fading).
    NoCorrelation,
    /// Every interferer's mark replaced by the minimum over the antennas:
    /// stochastically smallest interference, upper CCDF bound.
    MinFading,
    /// Maximum over the antennas: lower CCDF bound.
    MaxFading,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::ExactCorrelated,
        ModelKind::FullCorrelation,
        ModelKind::NoCorrelation,
        ModelKind::MinFading,
        ModelKind::MaxFading,
    ];
}

/// A checked probability. Construction is the only way in, so a held value
/// is always inside [0,1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        Self::clamped(value, 0.0)
    }

    /// Accepts values that stray outside [0,1] by at most `slack` (quadrature
    /// round-off) and clamps them; anything further out is an error. The
    /// numeric evaluators use this so that a genuinely broken integral is
    /// reported instead of silently clamped.
    pub fn clamped(value: f64, slack: f64) -> Result<Self> {
        if !value.is_finite() || value < -slack || value > 1.0 + slack {
            return Err(Error::OutOfUnitInterval { value, slack });
        }
        Ok(Probability(value.clamp(0.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// 1 − p, exact in floating point for p ∈ [0,1].
    pub fn complement(self) -> Probability {
        Probability(1.0 - self.0)
    }
}

impl std::fmt::Display for Probability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Interference scale constant c(λ, α) = (2/α) π² λ csc(2π/α).
///
/// This is the coefficient of the stretched exponential in the interference
/// Laplace transform: E[e^{−sI}] = exp(−c(λ,α) s^{2/α}) for a unit-mean
/// Rayleigh-faded Poisson field. Equals λ π Γ(1−2/α) Γ(1+2/α) by the
/// reflection formula.
pub fn interference_scale_c(lambda: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositive { name: "lambda", value: lambda });
    }
    let pi = std::f64::consts::PI;
    Ok((2.0 / alpha) * pi * pi * lambda / (2.0 * pi / alpha).sin())
}

/// Single-antenna SIR CCDF: P(SIR > T) = exp(−c(λ,α) d² T^{2/α}).
pub fn single_antenna_ccdf(t: f64, p: &SystemParams) -> Result<Probability> {
    validate_params(p)?;
    check_threshold(t)?;
    let c = interference_scale_c(p.lambda, p.alpha)?;
    Probability::new((-c * p.d * p.d * t.powf(p.beta())).exp())
}

/// CDF counterpart of [`single_antenna_ccdf`], computed with full relative
/// accuracy at small outage via expm1.
pub fn single_antenna_cdf(t: f64, p: &SystemParams) -> Result<Probability> {
    validate_params(p)?;
    check_threshold(t)?;
    let c = interference_scale_c(p.lambda, p.alpha)?;
    Probability::new(-(-c * p.d * p.d * t.powf(p.beta())).exp_m1())
}

/// Rescales space by κ: densities shrink by κ², lengths grow by κ.
/// Every SIR distribution in this crate is invariant under this map
/// (all formulas see λ and d only through λd²).
pub fn scale_transform(p: &SystemParams, kappa: f64) -> SystemParams {
    assert!(kappa > 0.0 && kappa.is_finite(), "kappa must be positive, got {kappa}");
    SystemParams {
        lambda: p.lambda / (kappa * kappa),
        alpha: p.alpha,
        d: kappa * p.d,
        n_antennas: p.n_antennas,
    }
}

pub(crate) fn check_threshold(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NonPositive { name: "threshold T", value: t });
    }
    Ok(())
}
