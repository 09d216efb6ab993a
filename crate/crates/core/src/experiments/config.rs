use super::ExperimentError;
use crate::coefficients::Preset;
use crate::integrators::Method;
use crate::micro::SetupPreset;
use serde::Deserialize;
use std::fmt;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Integrators,
    Stability,
    MicroSweep,
    HmmConvergence,
    Showcase,
    Cost,
    Homogenize,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Integrators => "integrators",
            ExperimentKind::Stability => "stability",
            ExperimentKind::MicroSweep => "micro-sweep",
            ExperimentKind::HmmConvergence => "hmm-convergence",
            ExperimentKind::Showcase => "showcase",
            ExperimentKind::Cost => "cost",
            ExperimentKind::Homogenize => "homogenize",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter lists. An absent list means the experiment's default; a
/// present list must be non-empty.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub epsilon: Option<Vec<f64>>,
    /// Macro spacings; each must be `1/n`.
    pub dx: Option<Vec<f64>>,
    pub dt: Option<Vec<f64>>,
    /// Units of ε.
    pub mu: Option<Vec<f64>>,
    /// Units of ε.
    pub mu_prime: Option<Vec<f64>>,
    /// Units of ε².
    pub eta: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub points_per_eps: Option<Vec<usize>>,
    pub methods: Option<Vec<String>>,
    pub setups: Option<Vec<String>>,
    pub presets: Option<Vec<String>>,
    pub cases: Option<Vec<String>>,
}

/// Scalar parameters; absent values take per-experiment defaults.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub epsilon: Option<f64>,
    pub final_time: Option<f64>,
    /// Macro (physical) damping.
    pub alpha: Option<f64>,
    /// Micro damping.
    pub micro_alpha: Option<f64>,
    pub mu: Option<f64>,
    pub mu_prime: Option<f64>,
    pub eta: Option<f64>,
    pub points_per_eps: Option<usize>,
    pub interp_order: Option<usize>,
    /// Spatial order of the homogenized stencil.
    pub order: Option<usize>,
    pub center: Option<Vec<f64>>,
    pub dx: Option<f64>,
    pub dt: Option<f64>,
    /// Macro step as a fraction of the stability estimate.
    pub dt_fraction: Option<f64>,
    /// Cell-problem resolution for homogenized references.
    pub resolution: Option<usize>,
    pub repeats: Option<usize>,
    pub seed: Option<u64>,
    pub method: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub preset: Option<String>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub long: bool,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub params: Params,
}

/// Parses a TOML experiment description.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ExperimentError> {
    let config: ExperimentConfig =
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Parses a config for a known experiment; the `experiment` key may be
/// omitted but must agree with `kind` when present.
pub fn parse_config_as(
    kind: ExperimentKind,
    text: &str,
) -> Result<ExperimentConfig, ExperimentError> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ExperimentError::Config(e.to_string()))?;
    match table.get("experiment") {
        None => {
            table.insert("experiment".into(), kind.name().into());
        }
        Some(toml::Value::String(name)) if name == kind.name() => {}
        Some(other) => {
            return Err(ExperimentError::Config(format!(
                "config is for experiment {other}, not {kind}"
            )));
        }
    }
    let config: ExperimentConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| ExperimentError::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

fn non_empty<T>(name: &str, list: &Option<Vec<T>>) -> Result<(), ExperimentError> {
    match list {
        Some(v) if v.is_empty() => Err(ExperimentError::Config(format!(
            "sweep list `{name}` is empty"
        ))),
        _ => Ok(()),
    }
}

fn positive(name: &str, values: impl IntoIterator<Item = f64>) -> Result<(), ExperimentError> {
    for v in values {
        if !(v > 0.0) || !v.is_finite() {
            return Err(ExperimentError::Config(format!(
                "`{name}` must be positive, got {v}"
            )));
        }
    }
    Ok(())
}

fn names<T: std::str::FromStr<Err = String>>(
    list: &Option<Vec<String>>,
) -> Result<(), ExperimentError> {
    for s in list.iter().flatten() {
        s.parse::<T>().map_err(ExperimentError::Config)?;
    }
    Ok(())
}

impl ExperimentConfig {
    /// A config with every optional field absent.
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            preset: None,
            output: None,
            workers: None,
            long: false,
            sweep: Sweep::default(),
            params: Params::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let s = &self.sweep;
        non_empty("epsilon", &s.epsilon)?;
        non_empty("dx", &s.dx)?;
        non_empty("dt", &s.dt)?;
        non_empty("mu", &s.mu)?;
        non_empty("mu_prime", &s.mu_prime)?;
        non_empty("eta", &s.eta)?;
        non_empty("alpha", &s.alpha)?;
        non_empty("points_per_eps", &s.points_per_eps)?;
        non_empty("methods", &s.methods)?;
        non_empty("setups", &s.setups)?;
        non_empty("presets", &s.presets)?;
        non_empty("cases", &s.cases)?;
        for (name, list) in [
            ("epsilon", &s.epsilon),
            ("dx", &s.dx),
            ("dt", &s.dt),
            ("mu", &s.mu),
            ("mu_prime", &s.mu_prime),
            ("eta", &s.eta),
            ("alpha", &s.alpha),
        ] {
            positive(name, list.iter().flatten().copied())?;
        }
        if s.epsilon.iter().flatten().any(|&e| e >= 1.0) {
            return Err(ExperimentError::Config("epsilon must lie in (0, 1)".into()));
        }
        if s.points_per_eps.iter().flatten().any(|&k| k < 2) {
            return Err(ExperimentError::Config(
                "points_per_eps must be at least 2".into(),
            ));
        }
        names::<Method>(&s.methods)?;
        names::<SetupPreset>(&s.setups)?;
        names::<Preset>(&s.presets)?;
        names::<Preset>(&s.cases)?;
        if let Some(p) = &self.preset {
            p.parse::<Preset>().map_err(ExperimentError::Config)?;
        }
        if let Some(m) = &self.params.method {
            m.parse::<Method>().map_err(ExperimentError::Config)?;
        }
        let p = &self.params;
        positive(
            "params",
            [
                p.epsilon,
                p.final_time,
                p.micro_alpha,
                p.mu,
                p.mu_prime,
                p.eta,
                p.dx,
                p.dt,
                p.dt_fraction,
            ]
            .into_iter()
            .flatten(),
        )?;
        if p.alpha.is_some_and(|a| !(a >= 0.0)) {
            return Err(ExperimentError::Config("alpha must be non-negative".into()));
        }
        if self.workers == Some(0) {
            return Err(ExperimentError::Config("workers must be at least 1".into()));
        }
        if p.repeats == Some(0) {
            return Err(ExperimentError::Config("repeats must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn list(&self, list: &Option<Vec<f64>>, default: &[f64]) -> Vec<f64> {
        list.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Names already checked by `validate`.
    pub(crate) fn parsed<T>(&self, list: &Option<Vec<String>>, default: &[T]) -> Vec<T>
    where
        T: std::str::FromStr<Err = String> + Clone,
    {
        match list {
            Some(v) => v.iter().filter_map(|s| s.parse().ok()).collect(),
            None => default.to_vec(),
        }
    }

    pub(crate) fn preset_or(&self, default: Preset) -> Preset {
        self.preset
            .as_deref()
            .and_then(|p| p.parse().ok())
            .unwrap_or(default)
    }

    pub(crate) fn method_or(&self, default: Method) -> Method {
        self.params
            .method
            .as_deref()
            .and_then(|m| m.parse().ok())
            .unwrap_or(default)
    }

    /// Macro point as a 3-vector.
    pub(crate) fn center(&self) -> Result<[f64; 3], ExperimentError> {
        let mut c = [0.0; 3];
        if let Some(v) = &self.params.center {
            if v.len() > 3 {
                return Err(ExperimentError::Config(
                    "center has more than three coordinates".into(),
                ));
            }
            c[..v.len()].copy_from_slice(v);
        }
        Ok(c)
    }
}
