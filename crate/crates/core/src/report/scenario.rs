use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::CHECK_NAMES;
use crate::eigensolve::DEFAULT_TOLERANCE;
use crate::error::{Result, SpectraError};
use crate::expr::Expr;
use crate::geometry::{Chart, Domain, Immersion, ScalarField, TensorField};

/// Weight function eta as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EtaSpec {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    Linear {
        coefficients: Vec<f64>,
    },
    /// a |xi|^2 in chart coordinates.
    RadialQuadratic {
        coefficient: f64,
    },
    Expr {
        expr: String,
    },
}

impl EtaSpec {
    pub fn to_field(&self) -> Result<ScalarField> {
        Ok(match self {
            EtaSpec::Zero => ScalarField::zero(),
            EtaSpec::Constant { value } => ScalarField::Constant(*value),
            EtaSpec::Linear { coefficients } => ScalarField::Linear(coefficients.clone()),
            EtaSpec::RadialQuadratic { coefficient } => ScalarField::RadialQuadratic(*coefficient),
            EtaSpec::Expr { expr } => ScalarField::Expr(Expr::parse(expr)?),
        })
    }
}

/// Symmetric tensor T as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TensorSpec {
    #[default]
    Metric,
    ScaledMetric {
        factor: f64,
    },
    /// Constant diagonal components in chart coordinates.
    Diagonal {
        values: Vec<f64>,
    },
    /// Components [T11, T12, T22] (or [T11] in one dimension).
    Expr {
        components: Vec<String>,
    },
}

impl TensorSpec {
    pub fn to_field(&self) -> Result<TensorField> {
        Ok(match self {
            TensorSpec::Metric => TensorField::Metric,
            TensorSpec::ScaledMetric { factor } => TensorField::Metric.scaled(*factor),
            TensorSpec::Diagonal { values } => TensorField::Diagonal(values.clone()),
            TensorSpec::Expr { components } => {
                TensorField::Expr(components.iter().map(|c| Expr::parse(c)).collect::<Result<_>>()?)
            }
        })
    }
}

/// Closed-form eigenvalues used as convergence targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    /// shift + (k pi / length)^2.
    Interval {
        length: f64,
        #[serde(default)]
        shift: f64,
    },
    /// pi^2 (p^2/a^2 + q^2/b^2).
    Rectangle {
        a: f64,
        b: f64,
    },
    /// l(l+1)/R^2 with multiplicity l, the Dirichlet spectrum of a hemisphere.
    Hemisphere {
        radius: f64,
    },
    Values {
        values: Vec<f64>,
    },
}

impl TargetSpec {
    /// The lowest `count` target eigenvalues (fewer for explicit lists).
    pub fn values(&self, count: usize) -> Vec<f64> {
        match self {
            TargetSpec::Interval { length, shift } => {
                (1..=count).map(|k| shift + (k as f64 * PI / length).powi(2)).collect()
            }
            TargetSpec::Rectangle { a, b } => crate::bounds::Spectrum::rectangle(*a, *b, count).values().to_vec(),
            TargetSpec::Hemisphere { radius } => {
                let mut out = Vec::with_capacity(count);
                let mut l = 1usize;
                while out.len() < count {
                    for _ in 0..l {
                        if out.len() < count {
                            out.push((l * (l + 1)) as f64 / (radius * radius));
                        }
                    }
                    l += 1;
                }
                out
            }
            TargetSpec::Values { values } => values.iter().take(count).copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub resolutions: Vec<usize>,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSpec {
    pub k_max: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub shift: f64,
}

fn default_checks() -> Vec<String> {
    vec!["all".to_string()]
}

fn default_c_values() -> Vec<f64> {
    vec![1.0, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSpec {
    #[serde(default = "default_checks")]
    pub names: Vec<String>,
    /// c values for the appendix growth bound.
    #[serde(default = "default_c_values")]
    pub c_values: Vec<f64>,
}

impl Default for ChecksSpec {
    fn default() -> Self {
        ChecksSpec {
            names: default_checks(),
            c_values: default_c_values(),
        }
    }
}

fn default_sample_resolution() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    #[serde(default = "default_sample_resolution")]
    pub resolution: usize,
}

impl Default for ConstantsSpec {
    fn default() -> Self {
        ConstantsSpec {
            resolution: default_sample_resolution(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub directory: Option<PathBuf>,
}

/// A complete run description, read from a TOML file of dotted keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub chart: Immersion,
    pub domain: Domain,
    #[serde(default)]
    pub eta: EtaSpec,
    #[serde(default)]
    pub tensor: TensorSpec,
    pub mesh: MeshSpec,
    pub eigen: EigenSpec,
    #[serde(default)]
    pub checks: ChecksSpec,
    #[serde(default)]
    pub constants: ConstantsSpec,
    #[serde(default)]
    pub targets: Option<TargetSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| SpectraError::Config(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SpectraError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| SpectraError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SpectraError::Config(msg));
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return bad(format!(
                "scenario name {:?} must be non-empty and use [A-Za-z0-9_-]",
                self.name
            ));
        }
        let res = &self.mesh.resolutions;
        if res.is_empty() || res.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!(
                "mesh.resolutions must be non-empty and strictly ascending, got {res:?}"
            ));
        }
        if self.eigen.k_max < 2 {
            return bad(format!("eigen.k_max must be at least 2, got {}", self.eigen.k_max));
        }
        if !(self.eigen.tolerance > 0.0) {
            return bad("eigen.tolerance must be positive".into());
        }
        for name in &self.checks.names {
            if name != "all" && !CHECK_NAMES.contains(&name.as_str()) {
                return bad(format!("unknown check {name:?}; run `spectra list` for the catalog"));
            }
        }
        if self.checks.c_values.iter().any(|c| !(*c > 0.0)) {
            return bad("checks.c_values must be positive".into());
        }
        Ok(())
    }

    /// Whether check `name` was requested.
    pub fn wants(&self, name: &str) -> bool {
        self.checks.names.iter().any(|n| n == "all" || n == name)
    }

    pub fn build_chart(&self) -> Result<Chart> {
        Ok(Chart::new(
            self.chart.clone(),
            self.domain.clone(),
            self.eta.to_field()?,
            self.tensor.to_field()?,
        )?
        .with_fd_resolution(self.constants.resolution))
    }

    /// Output directory: `<root>/<name>` when a root override is given,
    /// otherwise `output.directory` or `out/<name>`.
    pub fn output_dir(&self, root_override: Option<&Path>) -> PathBuf {
        match (root_override, &self.output.directory) {
            (Some(root), _) => root.join(&self.name),
            (None, Some(dir)) => dir.clone(),
            (None, None) => PathBuf::from("out").join(&self.name),
        }
    }
}
