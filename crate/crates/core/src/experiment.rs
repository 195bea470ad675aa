//! Runs configured experiments and serializes them to CSV.
//!
//! `distributions.csv`: `t, x, p_noG, p_withG`.
//! `metrics.csv`: `tau, t, d, d0, D, C, C_1..C_M, c_1..c_M`.
//! `sweep.csv`: the sweep axes followed by the metrics columns.
//!
//! Reals are written with 17 significant digits; undefined values (no gate,
//! no reference run, a reference below 1e−12, τ on a line) are empty fields.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{
    is_sweep_config, validate_config, validate_sweep, ExperimentConfig, SweepSpec,
};
use crate::error::{Error, Result};
use crate::evolution::{evolve, paired_run, EvolutionRecord, RecordOptions, RunSpec, WalkerState};
use crate::observables::{kolmogorov_distance, UNDEFINED_BELOW};

/// One row of `distributions.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionRow {
    pub t: usize,
    pub x: i64,
    pub p_without_gate: f64,
    pub p_with_gate: Option<f64>,
}

/// One row of `metrics.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub tau: Option<f64>,
    pub t: usize,
    pub d: Option<f64>,
    pub d0: Option<f64>,
    pub normalized_distance: Option<f64>,
    pub coherence: f64,
    pub coherence_bins: Vec<f64>,
    pub normalized_coherence: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub coherence_m: usize,
    pub distributions: Vec<DistributionRow>,
    pub metrics: Vec<MetricsRow>,
}

impl ExperimentOutput {
    pub fn metrics_at(&self, t: usize) -> Option<&MetricsRow> {
        self.metrics.iter().find(|r| r.t == t)
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den.abs() >= UNDEFINED_BELOW).then(|| num / den)
}

type Pair = (
    EvolutionRecord<WalkerState>,
    Option<EvolutionRecord<WalkerState>>,
);

fn run_pair(spec: &RunSpec, opts: &RecordOptions) -> Result<Pair> {
    if spec.gate.is_some() {
        let (without, with) = paired_run(spec, opts)?;
        Ok((without, Some(with)))
    } else {
        Ok((evolve(spec, opts)?, None))
    }
}

fn distance(
    a: &EvolutionRecord<WalkerState>,
    b: &Option<EvolutionRecord<WalkerState>>,
    i: usize,
) -> Result<Option<f64>> {
    b.as_ref()
        .map(|b| kolmogorov_distance(&a.steps[i].distribution, &b.steps[i].distribution))
        .transpose()
}

/// Evolves the configured walk (with and without its gate) and, when
/// requested, the noiseless reference pair.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let spec = cfg.run;
    let opts = RecordOptions {
        stride: cfg.record_every.stride(spec.topology)?,
        coherence: Some((cfg.coherence_m, cfg.coherence_s)),
        keep_states: false,
    };
    let (main, reference) = rayon::join(
        || run_pair(&spec, &opts),
        || {
            cfg.reference_run
                .then(|| run_pair(&spec.without_noise(), &opts))
                .transpose()
        },
    );
    let (plain, gated) = main?;
    let reference = reference?;

    let half_turn = spec.topology.half_turn();
    let mut distributions = Vec::new();
    let mut metrics = Vec::with_capacity(plain.steps.len());
    for (i, step) in plain.steps.iter().enumerate() {
        let gated_step = gated.as_ref().map(|g| &g.steps[i]);
        for (site, (x, p)) in step.distribution.iter().enumerate() {
            distributions.push(DistributionRow {
                t: step.t,
                x,
                p_without_gate: p,
                p_with_gate: gated_step.map(|g| g.distribution.probs()[site]),
            });
        }

        // coherence is taken from the walk as run, i.e. with G when present
        let coherence_src = gated_step.unwrap_or(step);
        let profile = coherence_src
            .coherence
            .as_ref()
            .expect("coherence recorded");
        let d = distance(&plain, &gated, i)?;

        let (d0, reference_profile) = match &reference {
            Some((rp, rg)) => {
                let src = rg.as_ref().map(|g| &g.steps[i]).unwrap_or(&rp.steps[i]);
                (distance(rp, rg, i)?, src.coherence.clone())
            }
            None => (None, None),
        };
        let normalized_distance = match (d, d0) {
            (Some(d), Some(d0)) => ratio(d, d0),
            _ => None,
        };
        let normalized_coherence = match &reference_profile {
            Some(rp) => profile
                .bins
                .iter()
                .zip(&rp.bins)
                .map(|(c, c0)| ratio(*c, *c0))
                .collect(),
            None => vec![None; profile.bins.len()],
        };
        metrics.push(MetricsRow {
            tau: half_turn.map(|s| step.t as f64 / s as f64),
            t: step.t,
            d,
            d0,
            normalized_distance,
            coherence: profile.total,
            coherence_bins: profile.bins.clone(),
            normalized_coherence,
        });
    }
    Ok(ExperimentOutput {
        coherence_m: cfg.coherence_m,
        distributions,
        metrics,
    })
}

/// Formats a real with 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

fn metrics_header(m: usize) -> Vec<String> {
    let mut h: Vec<String> = ["tau", "t", "d", "d0", "D", "C"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((1..=m).map(|i| format!("C_{i}")));
    h.extend((1..=m).map(|i| format!("c_{i}")));
    h
}

fn metrics_fields(row: &MetricsRow) -> Vec<String> {
    let mut f = vec![
        opt(row.tau),
        row.t.to_string(),
        opt(row.d),
        opt(row.d0),
        opt(row.normalized_distance),
        format_real(row.coherence),
    ];
    f.extend(row.coherence_bins.iter().map(|c| format_real(*c)));
    f.extend(row.normalized_coherence.iter().map(|c| opt(*c)));
    f
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_rows(
    path: &Path,
    header: &[String],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `distributions.csv` and `metrics.csv` into `dir`.
pub fn write_experiment(out: &ExperimentOutput, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    let header: Vec<String> = ["t", "x", "p_noG", "p_withG"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    write_rows(
        &dir.join("distributions.csv"),
        &header,
        out.distributions.iter().map(|r| {
            vec![
                r.t.to_string(),
                r.x.to_string(),
                format_real(r.p_without_gate),
                opt(r.p_with_gate),
            ]
        }),
    )?;
    write_rows(
        &dir.join("metrics.csv"),
        &metrics_header(out.coherence_m),
        out.metrics.iter().map(metrics_fields),
    )
}

/// Result of one sweep grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub values: Vec<String>,
    pub output: ExperimentOutput,
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::validation("--jobs", "must be >= 1"));
        }
        b = b.num_threads(j);
    }
    b.build()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Runs every grid point on a pool of `jobs` workers (default: available
/// parallelism). Results come back in grid order regardless of scheduling.
pub fn run_sweep(
    spec: &SweepSpec,
    jobs: Option<usize>,
    adjust: impl Fn(&mut ExperimentConfig) -> Result<()> + Sync,
) -> Result<Vec<SweepPoint>> {
    let mut points = spec.points()?;
    for (_, cfg) in &mut points {
        adjust(cfg)?;
    }
    let ms: Vec<usize> = points.iter().map(|(_, c)| c.coherence_m).collect();
    if ms.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::validation(
            "coherence.M",
            "sweep points disagree on the number of bins",
        ));
    }
    pool(jobs)?.install(|| {
        points
            .into_par_iter()
            .map(|(values, cfg)| run_experiment(&cfg).map(|output| SweepPoint { values, output }))
            .collect()
    })
}

/// Writes `sweep.csv` into `dir`.
pub fn write_sweep(spec: &SweepSpec, points: &[SweepPoint], dir: &Path) -> Result<()> {
    create_dir(dir)?;
    let m = points.first().map_or(0, |p| p.output.coherence_m);
    let mut header: Vec<String> = spec.axes.iter().map(|(k, _)| k.clone()).collect();
    header.extend(metrics_header(m));
    let rows = points.iter().flat_map(|p| {
        p.output.metrics.iter().map(move |row| {
            let mut f = p.values.clone();
            f.extend(metrics_fields(row));
            f
        })
    });
    write_rows(&dir.join("sweep.csv"), &header, rows)
}

/// Overrides applied on top of a config file.
#[derive(Clone, Debug, Default)]
pub struct RunOverrides {
    pub output_dir: Option<PathBuf>,
    pub record_every: Option<crate::config::RecordEvery>,
    pub coherence_bins: Option<usize>,
    pub jobs: Option<usize>,
}

impl RunOverrides {
    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        if let Some(r) = self.record_every {
            cfg.record_every = r;
        }
        if let Some(m) = self.coherence_bins {
            cfg.set_coherence_bins(m)?;
        }
        Ok(())
    }
}

/// Validates and runs a single-run config, writing its CSVs.
pub fn run_config_text(text: &str, overrides: &RunOverrides) -> Result<ExperimentOutput> {
    let mut cfg = validate_config(text)?;
    overrides.apply(&mut cfg)?;
    let out = run_experiment(&cfg)?;
    write_experiment(&out, &cfg.output_dir)?;
    Ok(out)
}

/// Validates and runs a sweep config, writing `sweep.csv`.
pub fn sweep_config_text(text: &str, overrides: &RunOverrides) -> Result<Vec<SweepPoint>> {
    let spec = validate_sweep(text)?;
    let points = run_sweep(&spec, overrides.jobs, |c| overrides.apply(c))?;
    let dir = overrides
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    write_sweep(&spec, &points, &dir)?;
    Ok(points)
}

/// Config files shipped for each figure preset, as `(name, contents)`.
pub fn preset(name: &str) -> Option<&'static [(&'static str, &'static str)]> {
    const FIG1: &[(&str, &str)] = &[
        ("fig1-line", include_str!("../presets/fig1-line.cfg")),
        ("fig1-cycle", include_str!("../presets/fig1-cycle.cfg")),
    ];
    const FIG2: &[(&str, &str)] = &[("fig2", include_str!("../presets/fig2.cfg"))];
    const FIG3: &[(&str, &str)] = &[
        ("fig3-weak", include_str!("../presets/fig3-weak.cfg")),
        ("fig3-strong", include_str!("../presets/fig3-strong.cfg")),
    ];
    const FIG4: &[(&str, &str)] = &[
        ("fig4-g30-50", include_str!("../presets/fig4-g30-50.cfg")),
        ("fig4-g30-70", include_str!("../presets/fig4-g30-70.cfg")),
    ];
    match name {
        "fig1" => Some(FIG1),
        "fig2" => Some(FIG2),
        "fig3" => Some(FIG3),
        "fig4" => Some(FIG4),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

/// Output of one preset config.
#[derive(Clone, Debug, PartialEq)]
pub enum PresetOutput {
    Run(ExperimentOutput),
    Sweep(Vec<SweepPoint>),
}

/// Runs every config of a preset into `<output_dir>/<config name>/`.
pub fn run_preset(name: &str, overrides: &RunOverrides) -> Result<Vec<(String, PresetOutput)>> {
    let configs = preset(name).ok_or_else(|| {
        Error::validation(
            "preset",
            format!("unknown preset `{name}`, expected one of {PRESET_NAMES:?}"),
        )
    })?;
    let root = overrides
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    let mut results = Vec::new();
    for (stem, text) in configs {
        let ov = RunOverrides {
            output_dir: Some(root.join(stem)),
            ..overrides.clone()
        };
        let out = if is_sweep_config(text) {
            PresetOutput::Sweep(sweep_config_text(text, &ov)?)
        } else {
            PresetOutput::Run(run_config_text(text, &ov)?)
        };
        results.push((stem.to_string(), out));
    }
    Ok(results)
}
