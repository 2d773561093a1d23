use crate::analytic::{cbt_latency, lbt_latency, CbtParams, LbtParams};

use super::{simulate_cbt, simulate_lbt, AccessError, Etiquette, LatencyReport, ScenarioConfig};

/// Column layout every sweep table is written with.
pub const SWEEP_CSV_HEADER: &str =
    "axis_value,lbt_norm_sim,lbt_norm_analytic,cbt_norm_sim,cbt_norm_analytic,lbt_divergent,runs,seed";

/// Which scenario field a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Requesters,
    Population,
    SpanLength,
    Coverage,
}

/// Both etiquettes measured at one axis point, with the closed-form
/// normalized latencies alongside. Sample lists are dropped to keep long
/// sweeps small; only the aggregates remain.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub lbt: LatencyReport,
    pub cbt: LatencyReport,
    /// Closed-form normalized latency; infinite past the convergence
    /// threshold or where the model has no finite prediction.
    pub lbt_analytic_norm: f64,
    pub cbt_analytic_norm: f64,
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a per-point seed out of the base seed so neighboring sweep
/// points never share random streams.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

fn integral(value: f64) -> Result<u32, AccessError> {
    if value.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&value) {
        Ok(value as u32)
    } else {
        Err(AccessError::InvalidConfig("axis value must be a non-negative integer"))
    }
}

fn apply_axis(
    base: &ScenarioConfig,
    axis: SweepAxis,
    value: f64,
) -> Result<ScenarioConfig, AccessError> {
    let mut cfg = *base;
    match axis {
        SweepAxis::Requesters => cfg.n_r = integral(value)?,
        SweepAxis::Population => cfg.n = integral(value)?,
        SweepAxis::SpanLength => cfg.mu = integral(value)?,
        SweepAxis::Coverage => {
            if !(value > 0.0 && value <= 1.0) {
                return Err(AccessError::InvalidConfig("coverage axis value must lie in (0, 1]"));
            }
            cfg.gamma = value;
        }
    }
    Ok(cfg)
}

fn lbt_analytic_norm(cfg: &ScenarioConfig) -> f64 {
    match LbtParams::new(cfg.n_r, cfg.n_v, cfg.mu) {
        Ok(p) => lbt_latency(&p).normalized().unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

fn cbt_analytic_norm(cfg: &ScenarioConfig) -> f64 {
    match CbtParams::new(cfg.n, cfg.n_r, cfg.phi, cfg.gamma, cfg.mu) {
        Ok(p) => cbt_latency(&p).normalized().unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

/// Runs both etiquettes at every axis point. Each point gets its own
/// derived seed, shared between the two simulators so they face the same
/// randomness budget; `base.etiquette` is ignored.
pub fn sweep(
    base: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<SweepRow>, AccessError> {
    let mut rows = Vec::with_capacity(values.len());
    for (index, &value) in values.iter().enumerate() {
        let mut cfg = apply_axis(base, axis, value)?;
        cfg.seed = derive_seed(base.seed, index as u64);
        cfg.etiquette = Etiquette::Lbt;
        let mut lbt = simulate_lbt(&cfg)?;
        lbt.drop_samples();
        cfg.etiquette = Etiquette::Cbt;
        let mut cbt = simulate_cbt(&cfg)?;
        cbt.drop_samples();
        rows.push(SweepRow {
            axis_value: value,
            lbt_analytic_norm: lbt_analytic_norm(&cfg),
            cbt_analytic_norm: cbt_analytic_norm(&cfg),
            lbt,
            cbt,
        });
    }
    Ok(rows)
}
