//! Run configuration, figure presets, time-grid evaluation and output files.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coherent::{chi_from_mean, coherent_amplitudes, poisson_window, CoherentStateSpec};
use crate::dynamics::{
    field_moments, initial_state, to_schrodinger_picture, AtomState, JointState, ModelParams, Propagator,
};
use crate::error::{JcmError, Result};
use crate::observables::{atomic_inversion, mandel_q, quadrature_variances, ObservableRecord, StandardJcm};
use crate::ode::{evolve_ode_oracle, max_amplitude_difference};
use crate::par::{try_map_samples, Execution};
use crate::spin::SpinRepresentation;

/// Number of evenly spaced checkpoints integrated when `oracle_check` is set.
pub const ORACLE_CHECKPOINTS: usize = 10;
/// Deviation above which an oracle check counts as failed.
pub const ORACLE_DEVIATION_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldModel {
    /// Spin-j field with `2j` maximal excitations.
    Spin { two_j: u32 },
    /// Harmonic-oscillator field (`2j -> infinity`), Poisson initial statistics.
    Standard,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filling {
    MeanN(f64),
    Chi(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Inversion,
    MandelQ,
    Quadratures,
}

impl FromStr for Observable {
    type Err = JcmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inversion" | "sigma3" => Ok(Observable::Inversion),
            "mandel_q" | "mandel" | "q" => Ok(Observable::MandelQ),
            "quadratures" | "squeezing" => Ok(Observable::Quadratures),
            other => Err(JcmError::Config(format!("unknown observable `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    #[default]
    Schrodinger,
    Interaction,
}

impl FromStr for Picture {
    type Err = JcmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "schrodinger" => Ok(Picture::Schrodinger),
            "interaction" => Ok(Picture::Interaction),
            other => Err(JcmError::Config(format!("unknown picture `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomInit {
    #[default]
    Excited,
    Ground,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Doc,
}

impl FromStr for OutputFormat {
    type Err = JcmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "doc" | "json" => Ok(OutputFormat::Doc),
            other => Err(JcmError::Config(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: FieldModel,
    pub filling: Filling,
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    /// Final raw time; rows cover `lambda t` in `[0, lambda t_max]`.
    pub t_max: f64,
    pub steps: usize,
    pub observables: BTreeSet<Observable>,
    pub picture: Picture,
    pub atom_init: AtomInit,
    pub phase_phi: f64,
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    pub oracle_check: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: FieldModel::Spin { two_j: 1000 },
            filling: Filling::MeanN(20.0),
            omega: 1.0,
            omega0: 1.0,
            lambda: 1.0,
            t_max: 60.0,
            steps: 3000,
            observables: BTreeSet::from([Observable::Inversion]),
            picture: Picture::Schrodinger,
            atom_init: AtomInit::Excited,
            phase_phi: 0.0,
            format: OutputFormat::Csv,
            output_path: None,
            oracle_check: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(JcmError::Config(msg));
        if self.steps < 2 {
            return bad(format!("steps must be at least 2, got {}", self.steps));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        for (name, v) in [("omega", self.omega), ("omega0", self.omega0), ("lambda", self.lambda)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.phase_phi.is_finite() {
            return bad("phase must be finite".into());
        }
        if self.observables.is_empty() {
            return bad("no observables requested".into());
        }
        match self.model {
            FieldModel::Spin { two_j } => {
                let rep = SpinRepresentation::new(two_j)?;
                self.chi(rep)?;
            }
            FieldModel::Standard => {
                let Filling::MeanN(mean) = self.filling else {
                    return bad("the standard model is parameterized by mean_n".into());
                };
                if !(mean > 0.0 && mean.is_finite()) {
                    return bad(format!("mean_n must be positive, got {mean}"));
                }
                if self.observables.iter().any(|o| *o != Observable::Inversion) {
                    return bad("the standard-model reference provides the inversion only".into());
                }
                if self.atom_init != AtomInit::Excited {
                    return bad("the standard-model reference starts from an excited atom".into());
                }
                if self.oracle_check {
                    return bad("oracle checks apply to the spin model only".into());
                }
            }
        }
        Ok(())
    }

    fn chi(&self, rep: SpinRepresentation) -> Result<f64> {
        match self.filling {
            Filling::MeanN(mean) => chi_from_mean(rep, mean),
            Filling::Chi(chi) => {
                CoherentStateSpec::with_chi(chi)?;
                Ok(chi)
            }
        }
    }

    pub fn wants(&self, observable: Observable) -> bool {
        self.observables.contains(&observable)
    }

    /// Raw sample times `t_k = k t_max / (steps - 1)`.
    pub fn time_grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.t_max * k as f64 / last).collect()
    }

    /// CSV column names, in output order.
    pub fn columns(&self) -> Vec<&'static str> {
        let mut cols = vec!["t"];
        if self.wants(Observable::Inversion) {
            cols.push("sigma3");
        }
        if self.wants(Observable::MandelQ) {
            cols.push("q_mandel");
        }
        if self.wants(Observable::Quadratures) {
            cols.extend(["var_x", "var_y", "robertson_bound"]);
        }
        cols
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    /// The time column holds `lambda * t`; divide by this to recover raw time.
    pub time_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson_n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_max_deviation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_checkpoints: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub config: RunConfig,
    pub metadata: RunMetadata,
    pub rows: Vec<ObservableRecord>,
}

impl ObservableSeries {
    pub fn oracle_passed(&self) -> Option<bool> {
        self.metadata.oracle_max_deviation.map(|d| d < ORACLE_DEVIATION_LIMIT)
    }
}

fn record_for_state(config: &RunConfig, params: &ModelParams, state: &JointState) -> Result<ObservableRecord> {
    let mut rec = ObservableRecord {
        t: params.lambda * state.t,
        ..Default::default()
    };
    if config.wants(Observable::Inversion) {
        rec.sigma3 = Some(atomic_inversion(state));
    }
    if config.wants(Observable::MandelQ) || config.wants(Observable::Quadratures) {
        let moments = field_moments(state, params.rep);
        if config.wants(Observable::MandelQ) {
            rec.q_mandel = Some(mandel_q(&moments)?);
        }
        if config.wants(Observable::Quadratures) {
            let q = quadrature_variances(&moments, params.rep);
            rec.var_x = Some(q.var_x);
            rec.var_y = Some(q.var_y);
            rec.robertson_bound = Some(q.robertson_bound);
        }
    }
    Ok(rec)
}

/// Evaluates the configured observables on the uniform time grid.
pub fn run(config: &RunConfig, exec: Execution) -> Result<ObservableSeries> {
    config.validate()?;
    let times = config.time_grid();
    match config.model {
        FieldModel::Standard => {
            let Filling::MeanN(mean) = config.filling else {
                unreachable!("validated above")
            };
            let n_max = poisson_window(mean);
            let curve = StandardJcm::new(mean, config.omega0 - config.omega, config.lambda, n_max)?;
            let rows = try_map_samples(exec, &times, |t| {
                Ok::<_, JcmError>(ObservableRecord {
                    t: config.lambda * t,
                    sigma3: Some(curve.at(t)),
                    ..Default::default()
                })
            })?;
            Ok(ObservableSeries {
                config: config.clone(),
                metadata: RunMetadata {
                    time_scale: config.lambda,
                    chi: None,
                    poisson_n_max: Some(n_max),
                    oracle_max_deviation: None,
                    oracle_checkpoints: None,
                },
                rows,
            })
        }
        FieldModel::Spin { two_j } => {
            let rep = SpinRepresentation::new(two_j)?;
            let chi = config.chi(rep)?;
            let params = ModelParams::new(config.omega, config.omega0, config.lambda, rep)?;
            let field = coherent_amplitudes(rep, CoherentStateSpec::new(chi, config.phase_phi)?);
            let atom = match config.atom_init {
                AtomInit::Excited => AtomState::Excited,
                AtomInit::Ground => AtomState::Ground,
            };
            let state0 = initial_state(rep, &field, atom)?;
            let prop = Propagator::new(&params);
            let rows = try_map_samples(exec, &times, |t| {
                let state = prop.evolve(&state0, t);
                let state = match config.picture {
                    Picture::Interaction => state,
                    Picture::Schrodinger => to_schrodinger_picture(&params, &state),
                };
                record_for_state(config, &params, &state)
            })?;
            let oracle_max_deviation = if config.oracle_check {
                Some(oracle_deviation(&prop, &state0, config.t_max)?)
            } else {
                None
            };
            Ok(ObservableSeries {
                config: config.clone(),
                metadata: RunMetadata {
                    time_scale: config.lambda,
                    chi: Some(chi),
                    poisson_n_max: None,
                    oracle_max_deviation,
                    oracle_checkpoints: config.oracle_check.then_some(ORACLE_CHECKPOINTS),
                },
                rows,
            })
        }
    }
}

/// Integrates the amplitude equations through evenly spaced checkpoints on
/// `[0, t_max]` and returns the worst distance to the closed form.
fn oracle_deviation(prop: &Propagator, state0: &JointState, t_max: f64) -> Result<f64> {
    let mut numeric = state0.clone();
    let mut worst: f64 = 0.0;
    for k in 0..ORACLE_CHECKPOINTS {
        let t = t_max * k as f64 / (ORACLE_CHECKPOINTS - 1) as f64;
        numeric = evolve_ode_oracle(prop.params(), &numeric, t)?;
        worst = worst.max(max_amplitude_difference(&prop.evolve(state0, t), &numeric));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Figure {
    Figure1,
    Figure2a,
    Figure2b,
    Figure2c,
    Figure3a,
    Figure3b,
    Figure3c,
    Figure4,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::Figure1,
        Figure::Figure2a,
        Figure::Figure2b,
        Figure::Figure2c,
        Figure::Figure3a,
        Figure::Figure3b,
        Figure::Figure3c,
        Figure::Figure4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Figure1 => "figure1",
            Figure::Figure2a => "figure2a",
            Figure::Figure2b => "figure2b",
            Figure::Figure2c => "figure2c",
            Figure::Figure3a => "figure3a",
            Figure::Figure3b => "figure3b",
            Figure::Figure3c => "figure3c",
            Figure::Figure4 => "figure4",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = JcmError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|fig| fig.name() == s)
            .ok_or_else(|| JcmError::UnknownPreset(s.to_string()))
    }
}

/// Configurations behind each figure: `<n> = 20`, `omega = omega0 = lambda = 1`,
/// excited atom, `lambda t` in `[0, 60]`.
pub fn figure_preset(figure: Figure) -> Vec<RunConfig> {
    let spin = |two_j: u32, observable: Observable| RunConfig {
        model: FieldModel::Spin { two_j },
        observables: BTreeSet::from([observable]),
        ..RunConfig::default()
    };
    match figure {
        Figure::Figure1 => vec![RunConfig {
            model: FieldModel::Standard,
            ..RunConfig::default()
        }],
        Figure::Figure2a => vec![spin(1000, Observable::Inversion)],
        Figure::Figure2b => vec![spin(100, Observable::Inversion)],
        Figure::Figure2c => vec![spin(50, Observable::Inversion)],
        Figure::Figure3a => vec![spin(1000, Observable::MandelQ)],
        Figure::Figure3b => vec![spin(100, Observable::MandelQ)],
        Figure::Figure3c => vec![spin(50, Observable::MandelQ)],
        Figure::Figure4 => [1000, 50]
            .into_iter()
            .map(|two_j| RunConfig {
                picture: Picture::Interaction,
                ..spin(two_j, Observable::Quadratures)
            })
            .collect(),
    }
}

pub fn figure_preset_by_name(name: &str) -> Result<Vec<RunConfig>> {
    Ok(figure_preset(name.parse()?))
}

/// Decimal rendering with 12 significant digits and no exponent.
pub fn format_decimal(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = String::from(sign);
    if exponent < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exponent - 1) as usize));
        out.push_str(&digits);
    } else {
        let int_len = exponent as usize + 1;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    out
}

pub fn write_csv<W: Write>(series: &ObservableSeries, mut out: W) -> std::io::Result<()> {
    let columns = series.config.columns();
    writeln!(out, "{}", columns.join(","))?;
    for row in &series.rows {
        let mut fields = vec![format_decimal(row.t)];
        for col in &columns[1..] {
            let value = match *col {
                "sigma3" => row.sigma3,
                "q_mandel" => row.q_mandel,
                "var_x" => row.var_x,
                "var_y" => row.var_y,
                "robertson_bound" => row.robertson_bound,
                _ => None,
            };
            fields.push(value.map(format_decimal).unwrap_or_default());
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()
}

pub fn write_doc<W: Write>(series: &ObservableSeries, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, series)?;
    writeln!(out).and_then(|_| out.flush()).map_err(|source| JcmError::Io {
        path: PathBuf::from("<stream>"),
        source,
    })
}

pub fn write_series<W: Write>(series: &ObservableSeries, format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(series, out).map_err(|source| JcmError::Io {
            path: PathBuf::from("<stream>"),
            source,
        }),
        OutputFormat::Doc => write_doc(series, out),
    }
}

/// Writes `series` to `path`, attaching the path to any I/O failure.
pub fn emit(series: &ObservableSeries, format: OutputFormat, path: &Path) -> Result<()> {
    let io_err = |source| JcmError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(series, &mut out).map_err(io_err),
        OutputFormat::Doc => {
            serde_json::to_writer_pretty(&mut out, series)?;
            writeln!(out).and_then(|_| out.flush()).map_err(io_err)
        }
    }
}

/// Parses CSV produced by [`write_csv`] into its header and numeric rows.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| JcmError::Config("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|line| {
            line.split(',')
                .map(|field| {
                    field
                        .parse::<f64>()
                        .map_err(|e| JcmError::Config(format!("bad CSV field `{field}`: {e}")))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}
