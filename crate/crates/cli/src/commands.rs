use cbt_core::access::{
    derive_seed, simulate_cbt, simulate_lbt, sweep, AccessError, Etiquette, LatencyReport,
    SweepAxis, SweepRow,
};
use cbt_core::analytic::{
    cbt_latency, crossing_point, gossip_dissemination_delay, lbt_latency, CbtParams, LbtParams,
};
use cbt_core::gossip::{run_dissemination, run_dissemination_with_records, GossipMode};

use crate::output::{fmt_axis, fmt_real, Document, Line};
use crate::settings::Settings;
use crate::RunError;

/// Coverage grid the dissemination-delay table is evaluated on. The last
/// level forces complete spread, where the logistic model has no finite
/// prediction and the table shows `inf`.
const FIG4_LEVELS: [f64; 12] =
    [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99, 0.995, 0.999, 0.9999, 1.0];

/// Requester grid for the latency-comparison table.
const FIG5_SPAN_LENGTHS: [u32; 3] = [1000, 5000, 10_000];

/// Population grid for the scalability table.
const FIG6_POPULATIONS: [u32; 7] = [100, 200, 500, 1000, 2000, 5000, 10_000];

const SWEEP_COLUMNS: [&str; 8] = [
    "axis_value",
    "lbt_norm_sim",
    "lbt_norm_analytic",
    "cbt_norm_sim",
    "cbt_norm_analytic",
    "lbt_divergent",
    "runs",
    "seed",
];

fn map_access(err: AccessError) -> RunError {
    match err {
        AccessError::InvalidConfig(msg) => RunError::Config(msg.to_string()),
        other => RunError::Runtime(other.to_string()),
    }
}

fn lbt_norm(n_r: u32, n_v: u32, mu: u32) -> f64 {
    match LbtParams::new(n_r, n_v, mu) {
        Ok(p) => lbt_latency(&p).normalized().unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

fn cbt_norm(n: u32, n_r: u32, phi: u32, gamma: f64, mu: u32) -> f64 {
    match CbtParams::new(n, n_r, phi, gamma, mu) {
        Ok(p) => cbt_latency(&p).normalized().unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

pub fn analytic(s: &Settings) -> Document {
    Document {
        comments: s.header_comments("analytic"),
        columns: vec!["etiquette", "normalized_latency"],
        lines: vec![
            Line::Row(vec!["lbt".into(), fmt_real(lbt_norm(s.n_r, s.n_v, s.mu))]),
            Line::Row(vec![
                "cbt".into(),
                fmt_real(cbt_norm(s.n, s.n_r, s.phi, s.gamma, s.mu)),
            ]),
        ],
    }
}

fn report_row(etiquette: &str, report: &LatencyReport) -> Line {
    Line::Row(vec![
        etiquette.into(),
        fmt_real(report.normalized_mean),
        fmt_real(report.mean),
        report.divergent.to_string(),
        report.runs_completed.to_string(),
        report.divergent_runs.to_string(),
        report.samples.len().to_string(),
        report.seed.to_string(),
    ])
}

pub fn sim(s: &Settings) -> Result<Document, RunError> {
    let cfg = s.scenario();
    let report = match s.etiquette {
        Etiquette::Lbt => simulate_lbt(&cfg),
        Etiquette::Cbt => simulate_cbt(&cfg),
    }
    .map_err(map_access)?;
    let label = match s.etiquette {
        Etiquette::Lbt => "lbt",
        Etiquette::Cbt => "cbt",
    };
    let mut comments = s.header_comments("sim");
    if s.trace {
        comments.push(format!("normalized_mean = {}", fmt_real(report.normalized_mean)));
        comments.push(format!("divergent = {}", report.divergent));
        let lines = report
            .samples
            .iter()
            .enumerate()
            .map(|(i, &v)| Line::Row(vec![i.to_string(), v.to_string()]))
            .collect();
        return Ok(Document {
            comments,
            columns: vec!["sample_index", "latency_slots"],
            lines,
        });
    }
    Ok(Document {
        comments,
        columns: vec![
            "etiquette",
            "normalized_mean",
            "mean_slots",
            "divergent",
            "runs_completed",
            "divergent_runs",
            "samples",
            "seed",
        ],
        lines: vec![report_row(label, &report)],
    })
}

pub fn fig4(s: &Settings) -> Result<Document, RunError> {
    let comments = s.header_comments("fig4");
    if s.trace {
        let (_, records) =
            run_dissemination_with_records(s.n, s.phi, GossipMode::Push, &FIG4_LEVELS, s.runs, s.seed)
                .map_err(|e| RunError::Runtime(e.to_string()))?;
        let mut lines = Vec::new();
        for (run, record) in records.iter().enumerate() {
            for &(level, slot) in &record.completions {
                lines.push(Line::Row(vec![
                    run.to_string(),
                    fmt_real(level),
                    (slot.0 - record.start.0).to_string(),
                ]));
            }
        }
        return Ok(Document { comments, columns: vec!["run", "gamma", "slots"], lines });
    }
    let stats = run_dissemination(s.n, s.phi, GossipMode::Push, &FIG4_LEVELS, s.runs, s.seed)
        .map_err(|e| RunError::Runtime(e.to_string()))?;
    let lines = stats
        .iter()
        .map(|level| {
            let analytic = match CbtParams::new(s.n, s.n_r, s.phi, level.gamma, s.mu) {
                Ok(p) => fmt_real(gossip_dissemination_delay(&p)),
                Err(_) => "inf".to_string(),
            };
            Line::Row(vec![
                fmt_real(level.gamma),
                fmt_real(level.mean_slots),
                fmt_real(level.std_dev_slots),
                analytic,
            ])
        })
        .collect();
    Ok(Document {
        comments,
        columns: vec!["gamma", "sim_mean_slots", "sim_std_slots", "analytic_slots"],
        lines,
    })
}

fn sweep_row_line(row: &SweepRow, runs: u32) -> Line {
    Line::Row(vec![
        fmt_axis(row.axis_value),
        fmt_real(row.lbt.normalized_mean),
        fmt_real(row.lbt_analytic_norm),
        fmt_real(row.cbt.normalized_mean),
        fmt_real(row.cbt_analytic_norm),
        row.lbt.divergent.to_string(),
        runs.to_string(),
        row.lbt.seed.to_string(),
    ])
}

pub fn fig5(s: &Settings) -> Result<Document, RunError> {
    let values: Vec<f64> = (1..=20).map(|k| f64::from(2 * k)).collect();
    let mut lines = Vec::new();
    for (section, mu) in FIG5_SPAN_LENGTHS.into_iter().enumerate() {
        let mut base = s.scenario();
        base.mu = mu;
        // Separate seed lineage per section so equal point indices do not
        // reuse random streams across span lengths.
        base.seed = derive_seed(s.seed, u64::MAX - section as u64);
        let rows = sweep(&base, SweepAxis::Requesters, &values).map_err(map_access)?;
        lines.push(Line::Comment(format!("mu = {mu}")));
        lines.extend(rows.iter().map(|row| sweep_row_line(row, s.runs)));
    }
    Ok(Document {
        comments: s.header_comments("fig5"),
        columns: SWEEP_COLUMNS.to_vec(),
        lines,
    })
}

pub fn fig6(s: &Settings) -> Result<Document, RunError> {
    let values: Vec<f64> = FIG6_POPULATIONS.into_iter().map(f64::from).collect();
    let rows = sweep(&s.scenario(), SweepAxis::Population, &values).map_err(map_access)?;
    Ok(Document {
        comments: s.header_comments("fig6"),
        columns: SWEEP_COLUMNS.to_vec(),
        lines: rows.iter().map(|row| sweep_row_line(row, s.runs)).collect(),
    })
}

pub fn crossing(s: &Settings) -> Document {
    let crossing = if s.gamma < 1.0 {
        crossing_point(s.n, s.n_v, s.phi, s.gamma, s.mu, 1..=s.n_v)
            .ok()
            .flatten()
            .map_or("none".to_string(), |v| v.to_string())
    } else {
        // Complete coverage has no finite consensus model to compare.
        "none".to_string()
    };
    Document {
        comments: s.header_comments("crossing"),
        columns: vec!["mu", "crossing_n_r"],
        lines: vec![Line::Row(vec![s.mu.to_string(), crossing])],
    }
}
