//! Run configuration: JSON ingestion, defaults and validation.

use std::path::PathBuf;

use orbsym::expr::{parse_infix, Expr, Symbol};
use orbsym::problems::{Family, ProblemSpec};
use orbsym::symbols as sym;
use orbsym::OrbitState;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), message: message.into() }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub r: f64,
    #[serde(default)]
    pub r_dot: f64,
    #[serde(default)]
    pub angle: f64,
    pub angle_dot: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState { r: 1.0, r_dot: 0.0, angle: 0.0, angle_dot: 1.2 }
    }
}

impl InitialState {
    pub fn state(&self) -> OrbitState {
        OrbitState::new(self.r, self.r_dot, self.angle, self.angle_dot)
    }
}

/// A `(λ, ν)` point of the general MICZ frequency sweep.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub lambda: f64,
    pub nu: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub family: Family,
    #[serde(default = "default_mu")]
    pub mu: f64,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub nu: Option<f64>,
    pub g: Option<String>,
    #[serde(default)]
    pub initial: InitialState,
    /// Extra initial states for the pipeline comparison.
    pub orbits: Option<Vec<InitialState>>,
    pub grid: Option<Vec<GridPoint>>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_eps")]
    pub defect_eps: f64,
    /// Where the `orbit` subcommand writes the trajectory.
    pub csv: Option<PathBuf>,
}

fn default_mu() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-10
}
fn default_t_end() -> f64 {
    50.0
}
fn default_r_min() -> f64 {
    1e-6
}
fn default_eps() -> f64 {
    1e-3
}

/// Validated configuration with the problem built as exact expressions.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub spec: ProblemSpec,
    pub orbits: Vec<InitialState>,
    pub grid: Vec<GridPoint>,
}

/// Exact rational from the shortest decimal rendering of `x`.
pub fn exact(field: &str, x: f64) -> Result<Expr, ConfigError> {
    if !x.is_finite() {
        return Err(invalid(field, "must be finite"));
    }
    let text = format!("{x}");
    parse_infix(&text, Symbol::parameter).map_err(|e| invalid(field, e.to_string()))
}

fn parse_g(text: &str) -> Result<Expr, ConfigError> {
    let g = parse_infix(text, |name| if name == "t" { sym::t() } else { Symbol::parameter(name) })
        .map_err(|e| invalid("g", e.to_string()))?;
    if let Some(s) = g.free_symbols().into_iter().find(|s| *s != sym::t()) {
        return Err(invalid("g", format!("may depend only on t, found `{}`", s.name())));
    }
    Ok(g)
}

fn reject(raw: &RawConfig, fields: &[(&str, bool)]) -> Result<(), ConfigError> {
    match fields.iter().find(|(_, present)| *present) {
        Some((name, _)) => Err(invalid(name, format!("not used by family `{}`", raw.family.name()))),
        None => Ok(()),
    }
}

fn build_spec(raw: &RawConfig) -> Result<ProblemSpec, ConfigError> {
    let mu = exact("mu", raw.mu)?;
    let (a, l, n, g) = (raw.alpha.is_some(), raw.lambda.is_some(), raw.nu.is_some(), raw.g.is_some());
    let spec = match raw.family {
        Family::Kepler => {
            reject(raw, &[("alpha", a), ("lambda", l), ("nu", n), ("g", g)])?;
            ProblemSpec::kepler()
        }
        Family::KeplerDrag => {
            reject(raw, &[("lambda", l), ("nu", n), ("g", g)])?;
            ProblemSpec::kepler_drag().with_alpha(exact("alpha", raw.alpha.unwrap_or(0.01))?)
        }
        Family::PowerLaw => {
            reject(raw, &[("lambda", l), ("nu", n), ("g", g)])?;
            let alpha = raw.alpha.ok_or_else(|| invalid("alpha", "power_law needs the force exponent"))?;
            match exact("alpha", alpha)? {
                Expr::Num(q) => ProblemSpec::power_law(q),
                _ => return Err(invalid("alpha", "must be a rational constant")),
            }
        }
        Family::ConeDrag => {
            reject(raw, &[("alpha", a), ("lambda", l), ("nu", n)])?;
            let text = raw.g.as_deref().ok_or_else(|| invalid("g", "cone_drag needs g(t)"))?;
            ProblemSpec::cone_drag(parse_g(text)?)
        }
        Family::Micz => {
            reject(raw, &[("alpha", a), ("g", g)])?;
            let lambda = raw.lambda.ok_or_else(|| invalid("lambda", "micz needs lambda"))?;
            let mut spec = ProblemSpec::micz().with_lambda(exact("lambda", lambda)?);
            if let Some(nu) = raw.nu {
                spec = spec.with_nu(exact("nu", nu)?);
            }
            spec
        }
    };
    let spec = spec.with_mu(mu);
    spec.validate().map_err(|e| invalid("family", e.to_string()))?;
    if spec.family == Family::ConeDrag {
        spec.check_g_positive(raw.t_end, 200).map_err(|e| invalid("g", e.to_string()))?;
    }
    Ok(spec)
}

/// Parses and validates a JSON configuration. Schema errors carry the JSON
/// path of the offending value.
pub fn parse_problem_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    for (field, v, positive) in [
        ("tol", raw.tol, true),
        ("t_end", raw.t_end, true),
        ("r_min", raw.r_min, true),
        ("defect_eps", raw.defect_eps, true),
        ("mu", raw.mu, false),
    ] {
        if !v.is_finite() || (positive && v <= 0.0) {
            return Err(invalid(field, "must be a positive finite number"));
        }
    }
    if raw.initial.r <= 0.0 {
        return Err(invalid("initial.r", "must be positive"));
    }
    let spec = build_spec(&raw)?;
    let orbits = raw.orbits.clone().unwrap_or_else(|| {
        vec![raw.initial, InitialState { r: 1.0, r_dot: 0.1, angle: 0.3, angle_dot: 1.25 }, InitialState {
            r: 1.3,
            r_dot: -0.05,
            angle: 0.0,
            angle_dot: 0.95,
        }]
    });
    let grid = match (&raw.grid, raw.lambda, raw.nu) {
        (Some(g), _, _) => g.clone(),
        (None, Some(lambda), Some(nu)) => {
            vec![GridPoint { lambda, nu }, GridPoint { lambda: 0.3, nu: -0.02 }, GridPoint { lambda: 0.6, nu: 0.25 }]
        }
        _ => Vec::new(),
    };
    if spec.special_case() && raw.grid.is_some() {
        return Err(invalid("grid", "the frequency sweep applies to general nu only"));
    }
    Ok(RunConfig { raw, spec, orbits, grid })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kepler_defaults() {
        let cfg = parse_problem_config(r#"{"family":"kepler","mu":1.0}"#).unwrap();
        assert_eq!(cfg.spec.family, Family::Kepler);
        assert_eq!(cfg.raw.tol, 1e-10);
        assert_eq!(cfg.raw.t_end, 50.0);
        assert_eq!(cfg.orbits.len(), 3);
    }

    #[test]
    fn micz_special_case_detected() {
        let cfg = parse_problem_config(r#"{"family":"micz","mu":1.0,"lambda":0.5,"nu":-0.125}"#).unwrap();
        assert!(cfg.spec.special_case());
        assert!(cfg.grid.len() == 3);
        let general = parse_problem_config(r#"{"family":"micz","lambda":0.5,"nu":0.1}"#).unwrap();
        assert!(!general.spec.special_case());
    }

    #[test]
    fn cone_drag_g() {
        let cfg = parse_problem_config(r#"{"family":"cone_drag","mu":1.0,"g":"exp(-t)"}"#).unwrap();
        let g = cfg.spec.g.unwrap();
        assert!(orbsym::expr::equals(&g, &(-sym::t().expr()).exp()));
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let err = parse_problem_config(r#"{"family":"kepler","initial":{"r":1,"angle_dot":"x"}}"#).unwrap_err();
        assert!(err.to_string().starts_with("initial.angle_dot"), "{err}");
        let err = parse_problem_config(r#"{"family":"kepler","colour":1}"#).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn bad_expressions_and_parameters() {
        assert!(parse_problem_config(r#"{"family":"cone_drag","g":"exp(-t"}"#).is_err());
        assert!(parse_problem_config(r#"{"family":"cone_drag","g":"exp(-k*t)"}"#).is_err());
        assert!(parse_problem_config(r#"{"family":"cone_drag","g":"1 - t"}"#).is_err());
        assert!(parse_problem_config(r#"{"family":"kepler","lambda":0.5}"#).is_err());
        assert!(parse_problem_config(r#"{"family":"power_law"}"#).is_err());
    }
}
