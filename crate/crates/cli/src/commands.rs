//! The five subcommands. Each builds a [`Table`] plus JSON metadata and an
//! optional human-readable note (printed to stderr so data files stay clean).
//!
//! Simulated estimates always restore the mean of the truncated far field:
//! the CLI is a measurement front end, so the first-order window bias is
//! corrected no matter how the radius was chosen.

use serde_json::{json, Map, Value};

use mrc_outage::analysis::{
    a1_a2, critical_density, critical_density_single, delta_fc, delta_minmax, scdo_default_grid,
    scdo_slope, sqrt_fit, OutageEvaluator,
};
use mrc_outage::bounds::{ccdf_fc, ccdf_max, ccdf_min, cdf_fc_n2};
use mrc_outage::core::{single_antenna_cdf, ModelKind, SystemParams};
use mrc_outage::quadrature::{cdf_exact_n2, QuadratureConfig};
use mrc_outage::simulator::{
    estimate_outage, estimate_outage_curve, MonteCarloConfig, WindowRadius,
};

use crate::config::{
    parse_grid, parse_models, parse_n_list, CliError, CliResult, ModelSel, Overlay,
};
use crate::output::{Cell, Table};

/// Fully merged configuration plus the preset name for provenance.
pub struct Ctx {
    pub overlay: Overlay,
    pub preset_name: Option<String>,
}

/// What a command hands back to the driver.
pub struct Outcome {
    pub table: Table,
    pub meta: Map<String, Value>,
    pub note: Option<String>,
}

impl Ctx {
    fn params(&self, default_n: u32) -> CliResult<SystemParams> {
        Ok(SystemParams::new(
            self.overlay.lambda.unwrap_or(1e-3),
            self.overlay.alpha.unwrap_or(4.0),
            self.overlay.d.unwrap_or(10.0),
            self.overlay.n_antennas.unwrap_or(default_n),
        )?)
    }

    fn qcfg(&self) -> QuadratureConfig {
        let base = QuadratureConfig::default();
        QuadratureConfig {
            rel_tol: self.overlay.rel_tol.unwrap_or(base.rel_tol),
            abs_tol: self.overlay.abs_tol.unwrap_or(base.abs_tol),
            max_subdivisions: base.max_subdivisions,
        }
    }

    fn mc(&self, default_samples: u64) -> MonteCarloConfig {
        MonteCarloConfig {
            num_samples: self.overlay.samples.unwrap_or(default_samples),
            window_radius: self
                .overlay
                .radius
                .map_or(WindowRadius::Auto, WindowRadius::Explicit),
            seed: self.overlay.seed.unwrap_or(0),
            noise_snr_db: self.overlay.snr_db,
            restore_far_mean: true,
            ..Default::default()
        }
    }

    /// Threshold axis: `--t-grid` wins, a single `--threshold` gives a
    /// one-point grid, otherwise the command's default grid spec applies.
    fn t_grid_or(&self, default_spec: &str) -> CliResult<Vec<f64>> {
        if let Some(spec) = &self.overlay.t_grid {
            parse_grid(spec)
        } else if let Some(t) = self.overlay.threshold {
            Ok(vec![t])
        } else {
            parse_grid(default_spec)
        }
    }
}

fn params_meta(p: &SystemParams) -> Value {
    json!({
        "lambda": p.lambda,
        "alpha": p.alpha,
        "d": p.d,
        "n_antennas": p.n_antennas,
    })
}

fn mc_meta(mc: &MonteCarloConfig) -> Value {
    let radius = match mc.window_radius {
        WindowRadius::Auto => json!("auto"),
        WindowRadius::Explicit(r) => json!(r),
    };
    json!({
        "samples": mc.num_samples,
        "seed": mc.seed,
        "radius": radius,
        "tail_frac": mc.tail_frac,
        "snr_db": mc.noise_snr_db,
        "restore_far_mean": mc.restore_far_mean,
    })
}

fn quad_meta(cfg: &QuadratureConfig) -> Value {
    json!({
        "rel_tol": cfg.rel_tol,
        "abs_tol": cfg.abs_tol,
        "max_subdivisions": cfg.max_subdivisions,
    })
}

fn analytic_cdf(
    sel: ModelSel,
    t: f64,
    p: &SystemParams,
    qcfg: &QuadratureConfig,
) -> CliResult<f64> {
    Ok(match sel {
        ModelSel::ExactAnalytic => match p.n_antennas {
            1 => single_antenna_cdf(t, p)?.value(),
            2 => cdf_exact_n2(t, p, qcfg)?.value(),
            n => {
                return Err(CliError::config(format!(
                    "the analytic exact law covers n_antennas <= 2, got {n}; \
                     use min-bound/max-bound or a simulated model"
                )))
            }
        },
        ModelSel::FullCorrelationAnalytic => {
            if p.n_antennas == 2 {
                cdf_fc_n2(t, p)?.value()
            } else {
                ccdf_fc(t, p)?.complement().value()
            }
        }
        ModelSel::MinBound => ccdf_min(t, p)?.complement().value(),
        ModelSel::MaxBound => ccdf_max(t, p)?.complement().value(),
        ModelSel::Sim(_) => unreachable!("simulated models take the estimator path"),
    })
}

const CURVE_COLUMNS: [&str; 6] = ["T", "model", "cdf", "ci_low", "ci_high", "source"];

/// Builds the (T, model) outage table shared by `ccdf` and `simulate`.
fn curve_table(
    grid: &[f64],
    models: &[ModelSel],
    p: &SystemParams,
    qcfg: &QuadratureConfig,
    mc: &MonteCarloConfig,
) -> CliResult<Table> {
    let mut per_model: Vec<Vec<(f64, f64, f64)>> = Vec::with_capacity(models.len());
    for sel in models {
        match sel {
            ModelSel::Sim(kind) => {
                let curve = estimate_outage_curve(grid, p, *kind, mc)?;
                per_model.push(
                    curve
                        .iter()
                        .map(|e| (e.point.value(), e.ci_low.value(), e.ci_high.value()))
                        .collect(),
                );
            }
            analytic => {
                let mut column = Vec::with_capacity(grid.len());
                for &t in grid {
                    let cdf = analytic_cdf(*analytic, t, p, qcfg)?;
                    column.push((cdf, cdf, cdf));
                }
                per_model.push(column);
            }
        }
    }
    let mut table = Table::new(CURVE_COLUMNS.to_vec());
    for (i, &t) in grid.iter().enumerate() {
        for (sel, column) in models.iter().zip(&per_model) {
            let (cdf, lo, hi) = column[i];
            table.push(vec![
                Cell::F(t),
                Cell::S(sel.label().to_string()),
                Cell::F(cdf),
                Cell::F(lo),
                Cell::F(hi),
                Cell::S(sel.source().to_string()),
            ]);
        }
    }
    Ok(table)
}

pub fn cmd_ccdf(ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params(2)?;
    let grid = ctx.t_grid_or("0.1,100,25,log")?;
    let models = parse_models(ctx.overlay.model.as_deref().unwrap_or("exact"))?;
    let qcfg = ctx.qcfg();
    let mc = ctx.mc(100_000);
    let table = curve_table(&grid, &models, &p, &qcfg, &mc)?;

    let mut meta = crate::output::base_meta("ccdf", ctx.preset_name.as_deref());
    meta.insert("params".into(), params_meta(&p));
    meta.insert("thresholds".into(), json!(grid));
    meta.insert(
        "models".into(),
        json!(models.iter().map(|m| m.label()).collect::<Vec<_>>()),
    );
    meta.insert("quadrature".into(), quad_meta(&qcfg));
    if models.iter().any(|m| matches!(m, ModelSel::Sim(_))) {
        meta.insert("mc".into(), mc_meta(&mc));
    }
    Ok(Outcome { table, meta, note: None })
}

pub fn cmd_simulate(ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params(2)?;
    let grid = ctx.t_grid_or("0.1,100,25,log")?;
    let models = parse_models(ctx.overlay.model.as_deref().unwrap_or("exact-sim"))?;
    if let Some(bad) = models.iter().find(|m| !matches!(m, ModelSel::Sim(_))) {
        return Err(CliError::config(format!(
            "simulate runs simulation models only, got '{}'",
            bad.label()
        )));
    }
    let qcfg = ctx.qcfg();
    let mc = ctx.mc(100_000);
    let table = curve_table(&grid, &models, &p, &qcfg, &mc)?;

    let mut meta = crate::output::base_meta("simulate", ctx.preset_name.as_deref());
    meta.insert("params".into(), params_meta(&p));
    meta.insert("thresholds".into(), json!(grid));
    meta.insert(
        "models".into(),
        json!(models.iter().map(|m| m.label()).collect::<Vec<_>>()),
    );
    meta.insert("mc".into(), mc_meta(&mc));
    Ok(Outcome { table, meta, note: None })
}

pub fn cmd_critical_density(ctx: &Ctx) -> CliResult<Outcome> {
    let alpha = ctx.overlay.alpha.unwrap_or(4.0);
    let d = ctx.overlay.d.unwrap_or(10.0);
    let epsilon = ctx.overlay.epsilon.unwrap_or(0.05);
    let t = ctx.overlay.threshold.unwrap_or(1.0);
    let n_list = parse_n_list(ctx.overlay.n_list.as_deref().unwrap_or("1,2,4,8"))?;
    let tol_exact = ctx.overlay.tol.unwrap_or(1e-9);
    let tol_mc = ctx.overlay.tol.unwrap_or(1e-3);
    let qcfg = ctx.qcfg();
    let mc = ctx.mc(100_000);

    let single = critical_density_single(epsilon, t, alpha, d)?;
    let exact_ev = OutageEvaluator::Exact { cfg: qcfg };
    let mc_ev = OutageEvaluator::Simulated { model: ModelKind::ExactCorrelated, mc };

    let mut table = Table::new(vec![
        "n",
        "lambda_exact",
        "lambda_lo",
        "lambda_hi",
        "lambda_mc",
        "gain",
    ]);
    let mut gains = Vec::with_capacity(n_list.len());
    for &n in &n_list {
        let exact = match n {
            1 => Some(single),
            2 => Some(critical_density(epsilon, t, alpha, d, 2, &exact_ev, tol_exact)?.lambda_eps),
            _ => None,
        };
        // The max-fading substitution overstates outage, so it needs the
        // least density; min-fading the most. Together they bracket the true
        // critical density for any N.
        let lo = critical_density(epsilon, t, alpha, d, n, &OutageEvaluator::MaxFadingBound, tol_exact)?
            .lambda_eps;
        let hi = critical_density(epsilon, t, alpha, d, n, &OutageEvaluator::MinFadingBound, tol_exact)?
            .lambda_eps;
        let mc_point = critical_density(epsilon, t, alpha, d, n, &mc_ev, tol_mc)?.lambda_eps;
        let gain = exact.unwrap_or(mc_point) / single;
        gains.push(gain);
        table.push(vec![
            Cell::U(n as u64),
            exact.map_or(Cell::Null, Cell::F),
            Cell::F(lo),
            Cell::F(hi),
            Cell::F(mc_point),
            Cell::F(gain),
        ]);
    }

    let fit = if n_list.len() >= 2 { sqrt_fit(&n_list, &gains).ok() } else { None };
    let mut meta = crate::output::base_meta("critical-density", ctx.preset_name.as_deref());
    meta.insert(
        "params".into(),
        json!({"alpha": alpha, "d": d, "epsilon": epsilon, "threshold": t}),
    );
    meta.insert("n_list".into(), json!(n_list));
    meta.insert(
        "solver".into(),
        json!({"tol_exact": tol_exact, "tol_mc": tol_mc, "lambda_single": single}),
    );
    meta.insert("quadrature".into(), quad_meta(&qcfg));
    meta.insert("mc".into(), mc_meta(&mc));
    meta.insert(
        "report".into(),
        json!({
            "sqrt_fit": fit.map(|(a, b)| json!({"a": a, "b": b})),
        }),
    );
    let note = fit.map(|(a, b)| {
        format!("gain fit: {a:.4}*sqrt(N) + {b:.4} over N = {n_list:?} (gains {gains:?})")
    });
    Ok(Outcome { table, meta, note })
}

pub fn cmd_scdo(ctx: &Ctx) -> CliResult<Outcome> {
    let alpha = ctx.overlay.alpha.unwrap_or(4.0);
    let d = ctx.overlay.d.unwrap_or(10.0);
    let t = ctx.overlay.threshold.unwrap_or(1.0);
    let grid = match &ctx.overlay.lambda_grid {
        Some(spec) => parse_grid(spec)?,
        None => scdo_default_grid(),
    };
    let qcfg = ctx.qcfg();
    let mc = ctx.mc(50_000);

    let mut table = Table::new(vec!["lambda", "model", "cdf", "ci_low", "ci_high", "source"]);
    let mut analytic = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let p = SystemParams::new(lambda, alpha, d, 2)?;
        let cdf = cdf_exact_n2(t, &p, &qcfg)?.value();
        analytic.push(cdf);
        table.push(vec![
            Cell::F(lambda),
            Cell::S("exact-n2".to_string()),
            Cell::F(cdf),
            Cell::F(cdf),
            Cell::F(cdf),
            Cell::S("analytic".to_string()),
        ]);
        if ctx.overlay.snr_db.is_some() {
            for n in [1u32, 2, 4] {
                let pn = SystemParams::new(lambda, alpha, d, n)?;
                let est = estimate_outage(t, &pn, ModelKind::ExactCorrelated, &mc)?;
                table.push(vec![
                    Cell::F(lambda),
                    Cell::S(format!("sim-n{n}")),
                    Cell::F(est.point.value()),
                    Cell::F(est.ci_low.value()),
                    Cell::F(est.ci_high.value()),
                    Cell::S("simulation".to_string()),
                ]);
            }
        }
    }

    // Fit the slope only where the outage is still small; saturation bends
    // the log-log curve and would corrupt the diversity-order estimate.
    let fit_grid: Vec<f64> = grid
        .iter()
        .zip(&analytic)
        .filter(|&(_, &cdf)| cdf < 0.01)
        .map(|(&l, _)| l)
        .collect();
    if fit_grid.len() < 3 {
        return Err(CliError::config(
            "density grid has fewer than 3 points with outage below 1%; \
             extend it toward smaller densities to expose the slope"
                .to_string(),
        ));
    }
    let fit = scdo_slope(t, alpha, d, &fit_grid, &OutageEvaluator::Exact { cfg: qcfg })?;
    let (a1, a2) = a1_a2(t, alpha, d, &qcfg)?;

    let mut meta = crate::output::base_meta("scdo", ctx.preset_name.as_deref());
    meta.insert(
        "params".into(),
        json!({"alpha": alpha, "d": d, "threshold": t}),
    );
    meta.insert("lambda_grid".into(), json!(grid));
    meta.insert("quadrature".into(), quad_meta(&qcfg));
    if ctx.overlay.snr_db.is_some() {
        meta.insert("mc".into(), mc_meta(&mc));
        meta.insert("sim_n".into(), json!([1, 2, 4]));
    }
    meta.insert(
        "report".into(),
        json!({
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "fit_points": fit_grid.len(),
            "a1": a1,
            "a2": a2,
            "a2_minus_a1": a2 - a1,
        }),
    );
    let note = format!(
        "slope {:.5} (r^2 = {:.6}) over {} small-density points; A1 = {a1:.6}, A2 = {a2:.6}, A2 - A1 = {:.6}",
        fit.slope,
        fit.r_squared,
        fit_grid.len(),
        a2 - a1,
    );
    Ok(Outcome { table, meta, note: Some(note) })
}

pub fn cmd_compare(ctx: &Ctx) -> CliResult<Outcome> {
    let kind = ctx.overlay.kind.as_deref().unwrap_or("fc");
    let qcfg = ctx.qcfg();
    let mut table = Table::new(vec!["x", "kind", "ratio"]);
    let mut meta = crate::output::base_meta("compare", ctx.preset_name.as_deref());
    meta.insert("quadrature".into(), quad_meta(&qcfg));
    match kind {
        "fc" => {
            let p = ctx.params(2)?;
            let grid = ctx.t_grid_or("1e-4,100,41,log")?;
            for &t in &grid {
                table.push(vec![
                    Cell::F(t),
                    Cell::S("fc-deviation".to_string()),
                    Cell::F(delta_fc(t, &p)?),
                ]);
            }
            meta.insert("params".into(), params_meta(&p));
            meta.insert("axis".into(), json!("threshold"));
            meta.insert("thresholds".into(), json!(grid));
        }
        "minmax" => {
            let lambda = ctx.overlay.lambda.unwrap_or(1e-3);
            let alpha = ctx.overlay.alpha.unwrap_or(4.0);
            let d = ctx.overlay.d.unwrap_or(10.0);
            let t = ctx.overlay.threshold.unwrap_or(1.0);
            let n_list = parse_n_list(ctx.overlay.n_list.as_deref().unwrap_or("1,2,3,4,5,6,7,8"))?;
            for &n in &n_list {
                let p = SystemParams::new(lambda, alpha, d, n)?;
                table.push(vec![
                    Cell::U(n as u64),
                    Cell::S("minmax-gap".to_string()),
                    Cell::F(delta_minmax(t, &p)?),
                ]);
            }
            meta.insert(
                "params".into(),
                json!({"lambda": lambda, "alpha": alpha, "d": d, "threshold": t}),
            );
            meta.insert("axis".into(), json!("n_antennas"));
            meta.insert("n_list".into(), json!(n_list));
        }
        other => {
            return Err(CliError::config(format!(
                "unknown comparison kind '{other}' (expected fc or minmax)"
            )))
        }
    }
    Ok(Outcome { table, meta, note: None })
}
