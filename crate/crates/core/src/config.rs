//! Flat `key = value` experiment configs.
//!
//! One assignment per line, `#` starts a comment. Recognized keys:
//!
//! ```text
//! topology        line | cycle
//! n               sites (cycle, required) or line length (optional; default 2t+1)
//! steps | turns   run length; turns need an odd cycle, t = round(turns * (n-1)/2)
//! coin.xi coin.theta coin.zeta            degrees (xi, zeta default 0)
//! gate.alpha gate.beta                    degrees; gate absent when both unset
//! initial.theta0 initial.phi0             degrees (default 90, 0)
//! initial.position                        start position label (default 0)
//! noise.type      none | gad | phase_damping
//! noise.gamma0 noise.T noise.Delta noise.omega (omega default 1)
//! noise.lambda    direct phase damping strength (phase_damping only)
//! coherence.M     coherence bins (default min(5, s))
//! reference_run   true | false (default true)
//! ```
//!
//! Sweep configs add `sweep.<key> = v1, v2, ...` for numeric keys and an
//! optional `sweep.max_points` cap.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::evolution::{Duration, NoiseModel, RunSpec};
use crate::noise::GadParams;
use crate::operators::{CoinParams, PhaseGateParams};
use crate::state::{InitialStateParams, Topology};

pub const DEFAULT_COHERENCE_BINS: usize = 5;
pub const DEFAULT_MAX_SWEEP_POINTS: usize = 10_000;

const SCALAR_KEYS: &[&str] = &[
    "topology",
    "n",
    "steps",
    "turns",
    "coin.xi",
    "coin.theta",
    "coin.zeta",
    "gate.alpha",
    "gate.beta",
    "initial.theta0",
    "initial.phi0",
    "initial.position",
    "noise.type",
    "noise.gamma0",
    "noise.T",
    "noise.Delta",
    "noise.omega",
    "noise.lambda",
    "coherence.M",
    "reference_run",
];

const SWEEPABLE_KEYS: &[&str] = &[
    "n",
    "steps",
    "turns",
    "coin.xi",
    "coin.theta",
    "coin.zeta",
    "gate.alpha",
    "gate.beta",
    "initial.theta0",
    "initial.phi0",
    "noise.gamma0",
    "noise.T",
    "noise.Delta",
    "noise.omega",
    "noise.lambda",
];

/// Recording stride, in steps or whole turns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RecordEvery {
    Steps(usize),
    Turns(usize),
}

impl RecordEvery {
    /// Parses `5`, `5steps`, `1turn` or `2turns`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let err = || Error::validation("record_every", format!("cannot parse `{text}`"));
        let (num, turns) =
            if let Some(v) = t.strip_suffix("turns").or_else(|| t.strip_suffix("turn")) {
                (v, true)
            } else if let Some(v) = t.strip_suffix("steps").or_else(|| t.strip_suffix("step")) {
                (v, false)
            } else {
                (t, false)
            };
        let k: usize = num.trim().parse().map_err(|_| err())?;
        if k == 0 {
            return Err(Error::validation("record_every", "stride must be >= 1"));
        }
        Ok(if turns {
            RecordEvery::Turns(k)
        } else {
            RecordEvery::Steps(k)
        })
    }

    pub fn stride(&self, topology: Topology) -> Result<usize> {
        match *self {
            RecordEvery::Steps(k) => Ok(k),
            RecordEvery::Turns(k) => topology
                .half_turn()
                .map(|s| (k * s).max(1))
                .ok_or_else(|| Error::validation("record_every", "turn strides require odd n")),
        }
    }
}

/// A validated single-run experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub run: RunSpec,
    /// Also run the noiseless counterpart to normalize `d` and `C(m)`.
    pub reference_run: bool,
    pub coherence_m: usize,
    /// Bin range `s`; `(n−1)/2` on a cycle.
    pub coherence_s: usize,
    pub output_dir: PathBuf,
    pub record_every: RecordEvery,
}

impl ExperimentConfig {
    /// Overrides the number of coherence bins, rechecking `M <= s`.
    pub fn set_coherence_bins(&mut self, m: usize) -> Result<()> {
        check_bins(m, self.coherence_s)?;
        self.coherence_m = m;
        Ok(())
    }
}

/// A sweep: a base config and value lists for numeric keys.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    base: RawConfig,
    pub axes: Vec<(String, Vec<String>)>,
    pub max_points: usize,
}

impl SweepSpec {
    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    /// Validated config of the base, without any axis applied.
    pub fn base_config(&self) -> Result<ExperimentConfig> {
        build_config(&self.base)
    }

    /// Every grid point in row-major order (last axis fastest), each with
    /// its axis values.
    pub fn points(&self) -> Result<Vec<(Vec<String>, ExperimentConfig)>> {
        let count = self.point_count();
        if count > self.max_points {
            return Err(Error::Capacity(format!(
                "sweep has {count} points, cap is {}",
                self.max_points
            )));
        }
        let mut out = Vec::with_capacity(count);
        for mut idx in 0..count {
            let mut raw = self.base.clone();
            let mut values = vec![String::new(); self.axes.len()];
            for (a, (key, vals)) in self.axes.iter().enumerate().rev() {
                let v = &vals[idx % vals.len()];
                idx /= vals.len();
                values[a] = v.clone();
                raw.values.insert(key.clone(), v.clone());
                if key == "steps" {
                    raw.values.remove("turns");
                } else if key == "turns" {
                    raw.values.remove("steps");
                }
            }
            out.push((values, build_config(&raw)?));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
struct RawConfig {
    values: BTreeMap<String, String>,
    axes: Vec<(String, Vec<String>)>,
    max_points: Option<usize>,
}

fn parse_raw(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::validation(
                format!("line {}", lineno + 1),
                format!("expected key = value, got `{line}`"),
            )
        })?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(Error::validation(key, "missing value"));
        }
        if let Some(axis) = key.strip_prefix("sweep.") {
            if axis == "max_points" {
                raw.max_points = Some(parse_num(key, value)?);
                continue;
            }
            if !SWEEPABLE_KEYS.contains(&axis) {
                return Err(Error::validation(key, "not a sweepable key"));
            }
            if raw.axes.iter().any(|(k, _)| k == axis) {
                return Err(Error::validation(key, "duplicate key"));
            }
            let vals: Vec<String> = value.split(',').map(|v| v.trim().to_string()).collect();
            if vals.iter().any(String::is_empty) {
                return Err(Error::validation(key, "empty value in list"));
            }
            raw.axes.push((axis.to_string(), vals));
            continue;
        }
        if !SCALAR_KEYS.contains(&key) {
            return Err(Error::validation(key, "unknown key"));
        }
        if raw
            .values
            .insert(key.to_string(), value.to_string())
            .is_some()
        {
            return Err(Error::validation(key, "duplicate key"));
        }
    }
    Ok(raw)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::validation(
            key,
            format!("expected a {}, got `{value}`", std::any::type_name::<T>()),
        )
    })
}

struct Fields<'a>(&'a BTreeMap<String, String>);

impl Fields<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| {
                let x: f64 = parse_num(key, v)?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(Error::validation(key, "must be finite"))
                }
            })
            .transpose()
    }

    fn float_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.float(key)?.unwrap_or(default))
    }

    fn required_float(&self, key: &str) -> Result<f64> {
        self.float(key)?
            .ok_or_else(|| Error::validation(key, "required"))
    }

    fn uint(&self, key: &str) -> Result<Option<usize>> {
        self.raw(key).map(|v| parse_num(key, v)).transpose()
    }
}

fn check_bins(m: usize, s: usize) -> Result<()> {
    if m == 0 || m > s {
        return Err(Error::validation(
            "coherence.M",
            format!("need 1 <= M <= s = {s}, got {m}"),
        ));
    }
    Ok(())
}

fn build_config(raw: &RawConfig) -> Result<ExperimentConfig> {
    let f = Fields(&raw.values);

    let duration = match (f.has("steps"), f.has("turns")) {
        (true, true) => {
            return Err(Error::validation(
                "turns",
                "give either steps or turns, not both",
            ))
        }
        (false, false) => {
            return Err(Error::validation(
                "steps",
                "one of steps or turns is required",
            ))
        }
        (true, false) => Duration::Steps(f.uint("steps")?.unwrap_or_default()),
        (false, true) => {
            let tau = f.required_float("turns")?;
            if tau < 0.0 {
                return Err(Error::validation("turns", "must be non-negative"));
            }
            Duration::Turns(tau)
        }
    };

    let topology = match f.raw("topology") {
        Some("cycle") => {
            let n = f
                .uint("n")?
                .ok_or_else(|| Error::validation("n", "required for a cycle"))?;
            let topo = Topology::cycle(n).map_err(|e| Error::validation("n", e.to_string()))?;
            if matches!(duration, Duration::Turns(_)) && n % 2 == 0 {
                return Err(Error::validation("turns", "turns require odd n"));
            }
            topo
        }
        Some("line") => {
            if matches!(duration, Duration::Turns(_)) {
                return Err(Error::validation("turns", "turns require odd n on a cycle"));
            }
            let Duration::Steps(t) = duration else {
                unreachable!()
            };
            match f.uint("n")? {
                Some(len) => Topology::line(len, len.saturating_sub(1) / 2)
                    .map_err(|e| Error::validation("n", e.to_string()))?,
                None => Topology::line_for_steps(t),
            }
        }
        Some(other) => {
            return Err(Error::validation(
                "topology",
                format!("expected line or cycle, got `{other}`"),
            ))
        }
        None => return Err(Error::validation("topology", "required")),
    };

    let coin = CoinParams::new(
        f.float_or("coin.xi", 0.0)?,
        f.required_float("coin.theta")?,
        f.float_or("coin.zeta", 0.0)?,
    );

    let gate = if f.has("gate.alpha") || f.has("gate.beta") {
        Some(PhaseGateParams::new(
            f.float_or("gate.alpha", 0.0)?,
            f.float_or("gate.beta", 0.0)?,
        ))
    } else {
        None
    };

    let initial = InitialStateParams {
        theta0: f.float_or("initial.theta0", 90.0)?,
        phi0: f.float_or("initial.phi0", 0.0)?,
        start_position: match f.raw("initial.position") {
            Some(v) => parse_num("initial.position", v)?,
            None => 0,
        },
    };
    if !(0.0..=180.0).contains(&initial.theta0) {
        return Err(Error::validation("initial.theta0", "must lie in [0, 180]"));
    }
    if !(0.0..360.0).contains(&initial.phi0) {
        return Err(Error::validation("initial.phi0", "must lie in [0, 360)"));
    }
    topology
        .position_index(initial.start_position)
        .map_err(|e| Error::validation("initial.position", e.to_string()))?;

    let noise = build_noise(&f)?;

    let coherence_s = match topology.half_turn() {
        Some(s) => s,
        None => ((topology.sites() - 1) / 2).max(1),
    };
    let coherence_m = match f.uint("coherence.M")? {
        Some(m) => {
            check_bins(m, coherence_s)?;
            m
        }
        None => DEFAULT_COHERENCE_BINS.min(coherence_s),
    };

    let reference_run = match f.raw("reference_run") {
        None | Some("true") => true,
        Some("false") => false,
        Some(other) => {
            return Err(Error::validation(
                "reference_run",
                format!("expected true or false, got `{other}`"),
            ))
        }
    };

    Ok(ExperimentConfig {
        run: RunSpec {
            topology,
            duration,
            coin,
            gate,
            initial,
            noise,
        },
        reference_run,
        coherence_m,
        coherence_s,
        output_dir: PathBuf::from("."),
        record_every: RecordEvery::Steps(1),
    })
}

fn build_noise(f: &Fields<'_>) -> Result<NoiseModel> {
    const PHYSICAL: [&str; 4] = ["noise.gamma0", "noise.T", "noise.Delta", "noise.omega"];
    let physical = |f: &Fields<'_>| -> Result<GadParams> {
        let p = GadParams {
            gamma0: f.required_float("noise.gamma0")?,
            temperature: f.required_float("noise.T")?,
            delta: f.required_float("noise.Delta")?,
            omega: f.float_or("noise.omega", 1.0)?,
        };
        for (key, v, ok) in [
            ("noise.gamma0", p.gamma0, p.gamma0 >= 0.0),
            ("noise.T", p.temperature, p.temperature >= 0.0),
            ("noise.Delta", p.delta, p.delta >= 0.0),
            ("noise.omega", p.omega, p.omega > 0.0),
        ] {
            if !ok {
                return Err(Error::validation(key, format!("value {v} out of range")));
            }
        }
        Ok(p)
    };
    match f.raw("noise.type").unwrap_or("none") {
        "none" => {
            if let Some(key) = PHYSICAL
                .iter()
                .chain(["noise.lambda"].iter())
                .find(|k| f.has(k))
            {
                return Err(Error::validation(
                    *key,
                    "set noise.type to use noise parameters",
                ));
            }
            Ok(NoiseModel::None)
        }
        "gad" => {
            if f.has("noise.lambda") {
                return Err(Error::validation(
                    "noise.lambda",
                    "only valid for phase_damping",
                ));
            }
            Ok(NoiseModel::Gad(physical(f)?))
        }
        "phase_damping" => match f.float("noise.lambda")? {
            Some(lambda) => {
                if let Some(key) = PHYSICAL.iter().find(|k| f.has(k)) {
                    return Err(Error::validation(
                        *key,
                        "give noise.lambda or physical parameters, not both",
                    ));
                }
                if !(0.0..=1.0).contains(&lambda) {
                    return Err(Error::validation("noise.lambda", "must lie in [0, 1]"));
                }
                Ok(NoiseModel::PhaseDamping { lambda })
            }
            None => NoiseModel::phase_damping_from(&physical(f)?),
        },
        other => Err(Error::validation(
            "noise.type",
            format!("expected none, gad or phase_damping, got `{other}`"),
        )),
    }
}

/// Parses and validates a single-run config.
pub fn validate_config(text: &str) -> Result<ExperimentConfig> {
    let raw = parse_raw(text)?;
    if let Some((key, _)) = raw.axes.first() {
        return Err(Error::validation(
            format!("sweep.{key}"),
            "sweep keys need the sweep command",
        ));
    }
    if raw.max_points.is_some() {
        return Err(Error::validation(
            "sweep.max_points",
            "sweep keys need the sweep command",
        ));
    }
    build_config(&raw)
}

/// Parses a sweep config; every grid point is validated up front.
pub fn validate_sweep(text: &str) -> Result<SweepSpec> {
    let mut raw = parse_raw(text)?;
    let axes = std::mem::take(&mut raw.axes);
    let max_points = raw.max_points.take().unwrap_or(DEFAULT_MAX_SWEEP_POINTS);
    let spec = SweepSpec {
        base: raw,
        axes,
        max_points,
    };
    spec.points()?;
    Ok(spec)
}

/// True when the text declares any `sweep.` key.
pub fn is_sweep_config(text: &str) -> bool {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .any(|l| l.starts_with("sweep."))
}
