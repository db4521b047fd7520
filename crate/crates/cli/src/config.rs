//! Layered run configuration. Every knob is optional in each layer; layers
//! merge with a fixed precedence: built-in defaults < `--preset` < config
//! file < explicit flags. Commands then extract what they need, applying
//! their own defaults for anything still unset.

use std::fmt;
use std::path::Path;

use mrc_outage::core::ModelKind;
use serde::Deserialize;

/// Error carrying the process exit code: 2 for configuration problems,
/// 3 for numerical failures.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<mrc_outage::error::Error> for CliError {
    fn from(e: mrc_outage::error::Error) -> Self {
        use mrc_outage::error::Error::*;
        match e {
            AlphaOutOfRange(_) | NonPositive { .. } | ZeroAntennas | AlphaMismatch { .. }
            | AntennaMismatch { .. } | DegenerateDesign | EmptyField => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// One configuration layer. Field names double as the config-file keys.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overlay {
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub d: Option<f64>,
    pub n_antennas: Option<u32>,
    pub threshold: Option<f64>,
    pub t_grid: Option<String>,
    pub lambda_grid: Option<String>,
    pub n_list: Option<String>,
    pub epsilon: Option<f64>,
    pub model: Option<String>,
    pub kind: Option<String>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub radius: Option<f64>,
    pub snr_db: Option<f64>,
    pub tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub format: Option<String>,
}

impl Overlay {
    /// Fields set in `self` win; anything unset falls through to `under`.
    pub fn over(self, under: Overlay) -> Overlay {
        Overlay {
            lambda: self.lambda.or(under.lambda),
            alpha: self.alpha.or(under.alpha),
            d: self.d.or(under.d),
            n_antennas: self.n_antennas.or(under.n_antennas),
            threshold: self.threshold.or(under.threshold),
            t_grid: self.t_grid.or(under.t_grid),
            lambda_grid: self.lambda_grid.or(under.lambda_grid),
            n_list: self.n_list.or(under.n_list),
            epsilon: self.epsilon.or(under.epsilon),
            model: self.model.or(under.model),
            kind: self.kind.or(under.kind),
            samples: self.samples.or(under.samples),
            seed: self.seed.or(under.seed),
            radius: self.radius.or(under.radius),
            snr_db: self.snr_db.or(under.snr_db),
            tol: self.tol.or(under.tol),
            rel_tol: self.rel_tol.or(under.rel_tol),
            abs_tol: self.abs_tol.or(under.abs_tol),
            format: self.format.or(under.format),
        }
    }
}

pub fn load_config_file(path: &Path) -> CliResult<Overlay> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Named parameter presets pinning the captioned setups of the reference
/// experiments. Explicit flags and config-file values override any of them.
pub fn preset(name: &str) -> CliResult<Overlay> {
    let mut o = Overlay::default();
    match name {
        // Outage curves for the exact dual-antenna law against correlated and
        // uncorrelated simulation.
        "fig3" => {
            o.lambda = Some(1e-3);
            o.alpha = Some(3.5);
            o.d = Some(10.0);
            o.n_antennas = Some(2);
            o.t_grid = Some("0.1,100,25,log".into());
            o.model = Some("exact,exact-sim,no-correlation-sim".into());
            o.samples = Some(200_000);
            o.radius = Some(150.0);
            o.seed = Some(1);
        }
        // Full-correlation deviation ratio across thresholds.
        "fig4" => {
            o.lambda = Some(1e-3);
            o.alpha = Some(4.0);
            o.d = Some(15.0);
            o.n_antennas = Some(2);
            o.kind = Some("fc".into());
            o.t_grid = Some("1e-4,100,41,log".into());
        }
        // Exact dual-antenna law between its fading bounds, with the
        // full-correlation approximation alongside.
        "fig5a" => {
            o.lambda = Some(1e-3);
            o.alpha = Some(4.0);
            o.d = Some(15.0);
            o.n_antennas = Some(2);
            o.t_grid = Some("0.05,50,25,log".into());
            o.model = Some("exact,full-correlation,min-bound,max-bound".into());
        }
        // Min/max fading-bound gap across antenna counts at a -3 dB threshold.
        "fig5b" => {
            o.lambda = Some(1e-3);
            o.alpha = Some(4.0);
            o.d = Some(10.0);
            o.kind = Some("minmax".into());
            o.threshold = Some(0.501_187_233_627_272_2);
            o.n_list = Some("1,2,3,4,5,6,7,8".into());
        }
        // Outage vs density on log-log axes with noise-limited simulated
        // curves for 1, 2, and 4 antennas.
        "fig6b" => {
            o.alpha = Some(4.0);
            o.d = Some(10.0);
            o.threshold = Some(1.0);
            o.snr_db = Some(14.0);
            o.lambda_grid = Some("1e-7,1e-3,25,log".into());
            o.samples = Some(50_000);
            o.radius = Some(150.0);
            o.seed = Some(1);
        }
        // Critical-density gain over a single antenna vs antenna count.
        "fig7" => {
            o.epsilon = Some(0.05);
            o.alpha = Some(4.0);
            o.d = Some(15.0);
            o.threshold = Some(1.0);
            o.n_list = Some("1,2,4,8".into());
            o.samples = Some(200_000);
            o.radius = Some(200.0);
            o.seed = Some(1);
        }
        other => {
            return Err(CliError::config(format!(
                "unknown preset '{other}' (expected fig3, fig4, fig5a, fig5b, fig6b, or fig7)"
            )))
        }
    }
    Ok(o)
}

/// Parses a grid spec: either "min,max,count,log|lin" or an explicit
/// comma-separated list of strictly increasing values.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() == 4 && matches!(parts[3], "log" | "lin") {
        let lo: f64 = parse_num(parts[0])?;
        let hi: f64 = parse_num(parts[1])?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| CliError::config(format!("bad grid count '{}'", parts[2])))?;
        if count < 2 {
            return Err(CliError::config("grid count must be at least 2"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CliError::config(format!("grid range must satisfy min < max, got {lo}, {hi}")));
        }
        if parts[3] == "log" && lo <= 0.0 {
            return Err(CliError::config("log grid requires min > 0"));
        }
        let n = count as f64;
        let grid = (0..count)
            .map(|i| {
                let frac = i as f64 / (n - 1.0);
                if parts[3] == "log" {
                    10f64.powf(lo.log10() + frac * (hi.log10() - lo.log10()))
                } else {
                    lo + frac * (hi - lo)
                }
            })
            .collect();
        Ok(grid)
    } else {
        let values: CliResult<Vec<f64>> = parts.iter().map(|p| parse_num(p)).collect();
        let values = values?;
        if values.is_empty() {
            return Err(CliError::config("grid is empty"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::config("grid values must be strictly increasing"));
        }
        Ok(values)
    }
}

fn parse_num(s: &str) -> CliResult<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| CliError::config(format!("bad number '{s}'")))?;
    if !v.is_finite() {
        return Err(CliError::config(format!("number '{s}' is not finite")));
    }
    Ok(v)
}

/// Parses an antenna-count list like "1,2,4,8": nonempty, strictly
/// increasing, all at least 1.
pub fn parse_n_list(spec: &str) -> CliResult<Vec<u32>> {
    let values: CliResult<Vec<u32>> = spec
        .split(',')
        .map(str::trim)
        .map(|p| {
            p.parse::<u32>()
                .map_err(|_| CliError::config(format!("bad antenna count '{p}'")))
        })
        .collect();
    let values = values?;
    if values.is_empty() {
        return Err(CliError::config("antenna list is empty"));
    }
    if values.contains(&0) {
        return Err(CliError::config("antenna counts must be at least 1"));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::config("antenna list must be strictly increasing"));
    }
    Ok(values)
}

/// One requested outage-curve column: an analytic formula or a simulated
/// model, identified by its token on the command line and in output rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSel {
    ExactAnalytic,
    FullCorrelationAnalytic,
    MinBound,
    MaxBound,
    Sim(ModelKind),
}

impl ModelSel {
    pub fn parse(token: &str) -> CliResult<ModelSel> {
        Ok(match token {
            "exact" => ModelSel::ExactAnalytic,
            "full-correlation" => ModelSel::FullCorrelationAnalytic,
            "min-bound" => ModelSel::MinBound,
            "max-bound" => ModelSel::MaxBound,
            "exact-sim" => ModelSel::Sim(ModelKind::ExactCorrelated),
            "full-correlation-sim" => ModelSel::Sim(ModelKind::FullCorrelation),
            "no-correlation-sim" => ModelSel::Sim(ModelKind::NoCorrelation),
            "min-fading-sim" => ModelSel::Sim(ModelKind::MinFading),
            "max-fading-sim" => ModelSel::Sim(ModelKind::MaxFading),
            other => {
                return Err(CliError::config(format!(
                    "unknown model '{other}' (expected exact, full-correlation, min-bound, \
                     max-bound, exact-sim, full-correlation-sim, no-correlation-sim, \
                     min-fading-sim, or max-fading-sim)"
                )))
            }
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            ModelSel::ExactAnalytic => "exact",
            ModelSel::FullCorrelationAnalytic => "full-correlation",
            ModelSel::MinBound => "min-bound",
            ModelSel::MaxBound => "max-bound",
            ModelSel::Sim(ModelKind::ExactCorrelated) => "exact-sim",
            ModelSel::Sim(ModelKind::FullCorrelation) => "full-correlation-sim",
            ModelSel::Sim(ModelKind::NoCorrelation) => "no-correlation-sim",
            ModelSel::Sim(ModelKind::MinFading) => "min-fading-sim",
            ModelSel::Sim(ModelKind::MaxFading) => "max-fading-sim",
        }
    }

    pub fn source(&self) -> &'static str {
        match self {
            ModelSel::Sim(_) => "simulation",
            _ => "analytic",
        }
    }
}

pub fn parse_models(spec: &str) -> CliResult<Vec<ModelSel>> {
    let models: CliResult<Vec<ModelSel>> =
        spec.split(',').map(str::trim).map(ModelSel::parse).collect();
    let models = models?;
    if models.is_empty() {
        return Err(CliError::config("model list is empty"));
    }
    Ok(models)
}
