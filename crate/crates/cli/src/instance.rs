//! The JSON problem-instance format. Unknown fields are rejected everywhere.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use endpoint_core::contraction::{ContractionCondition, Sampling};
use endpoint_core::gauges::{Gauge, GaugePair, GaugeSpec, Slot};
use endpoint_core::lspace::{plane_fixtures, Fixture, LimRule, DEFAULT_PREFIX_LENGTH};
use endpoint_core::sets::{BoundedSet, Shape, DEFAULT_RESOLUTION, DEFAULT_SINGLETON_EPS};
use endpoint_core::setmaps::{MapFamily, MultiMap, SelectionRule};
use endpoint_core::solver::{Direction, SolverConfig};
use endpoint_core::space::{Metric, Order, Point, Space};

use crate::commands::MapClass;
use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// A scalar (broadcast to every axis) or an explicit coordinate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coords {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Coords {
    fn expand(&self, dimension: usize) -> Result<Vec<f64>, CliError> {
        match self {
            Coords::Scalar(x) => Ok(vec![*x; dimension]),
            Coords::Vector(v) if v.len() == dimension => Ok(v.clone()),
            Coords::Vector(v) => Err(CliError::Invalid(format!(
                "space: expected {dimension} coordinates, got {}",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDecl {
    pub dimension: usize,
    pub lo: Coords,
    pub hi: Coords,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub order: Order,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugesDecl {
    pub psi: GaugeSpec,
    pub phi: GaugeSpec,
    /// Upper end of the certified domain; defaults to the space diameter.
    #[serde(default)]
    pub domain: Option<f64>,
    /// Upper end of the jump scan; defaults to twice the space diameter.
    #[serde(default)]
    pub scan: Option<f64>,
    #[serde(default)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConditionDecl {
    WeakPsiPhi,
    WeakPsiPhiDistance,
    LambdaMax { lambda: f64 },
    Rational,
    PowerWeak { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplingDecl {
    Grid { per_axis: usize },
    Random { count: usize, seed: u64 },
}

impl SamplingDecl {
    pub fn to_sampling(self) -> Sampling {
        match self {
            SamplingDecl::Grid { per_axis } => Sampling::Grid { per_axis },
            SamplingDecl::Random { count, seed } => Sampling::Random { count, seed },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDecl {
    #[serde(default)]
    pub direction: Option<Direction>,
    #[serde(default)]
    pub eps_endpoint: Option<f64>,
    #[serde(default)]
    pub eps_step: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub rule: Option<SelectionRule>,
    /// Explicit start points.
    #[serde(default)]
    pub starts: Vec<Vec<f64>>,
    /// Lattice of starts with this many nodes per axis.
    #[serde(default)]
    pub start_grid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapCheckDecl {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Expected classification per map name.
    #[serde(default)]
    pub expect: BTreeMap<String, MapClass>,
}

fn default_samples() -> usize {
    500
}

impl Default for MapCheckDecl {
    fn default() -> Self {
        MapCheckDecl {
            samples: default_samples(),
            seed: 0,
            expect: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateDecl {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixturesDecl {
    pub lim: LimRule,
    #[serde(default)]
    pub order: Order,
    #[serde(default = "default_prefix")]
    pub prefix_length: usize,
    #[serde(default)]
    pub sequences: Vec<Fixture>,
    /// Extra geometric plane fixtures drawn from a seed.
    #[serde(default)]
    pub generate: Option<GenerateDecl>,
}

fn default_prefix() -> usize {
    DEFAULT_PREFIX_LENGTH
}

impl FixturesDecl {
    pub fn all(&self) -> Vec<Fixture> {
        let mut out = self.sequences.clone();
        if let Some(g) = self.generate {
            out.extend(plane_fixtures(g.count, g.seed));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInstance {
    pub version: u32,
    #[serde(default)]
    pub description: Option<String>,
    pub space: Option<SpaceDecl>,
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapFamily>,
    #[serde(default)]
    pub gauges: Option<GaugesDecl>,
    #[serde(default)]
    pub condition: Option<ConditionDecl>,
    #[serde(default)]
    pub solver: Option<SolverDecl>,
    #[serde(default)]
    pub sampling: Option<SamplingDecl>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub singleton_eps: Option<f64>,
    #[serde(default)]
    pub check_maps: Option<MapCheckDecl>,
    #[serde(default)]
    pub sets: BTreeMap<String, Shape>,
    #[serde(default)]
    pub fixtures: Option<FixturesDecl>,
}

impl SolverDecl {
    pub fn config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            direction: self.direction.unwrap_or(d.direction),
            eps_endpoint: self.eps_endpoint.unwrap_or(d.eps_endpoint),
            eps_step: self.eps_step.unwrap_or(d.eps_step),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            rule: self.rule.unwrap_or(d.rule),
        }
    }
}

fn missing(section: &str) -> CliError {
    CliError::Invalid(format!("instance has no `{section}` section"))
}

impl ProblemInstance {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse { line, column, message, .. } => CliError::Parse {
                path: path.display().to_string(),
                line,
                column,
                message,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let inst: ProblemInstance = serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: String::from("<input>"),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        inst.validate()?;
        Ok(inst)
    }

    /// Cross-field checks that serde cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != FORMAT_VERSION {
            return Err(CliError::Invalid(format!(
                "unsupported version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        if self.space.is_some() {
            let space = self.space()?;
            for (name, _) in &self.maps {
                self.map(name)?;
            }
            for name in self.sets.keys() {
                self.set(name)?.check_within(&space)?;
            }
        } else if !self.maps.is_empty() || !self.sets.is_empty() {
            return Err(missing("space"));
        }
        if let Some(g) = &self.gauges {
            self.gauge_pair()?;
            for (name, v) in [("gauges.domain", g.domain), ("gauges.scan", g.scan)] {
                if v.is_some_and(|v| !(v.is_finite() && v > 0.0)) {
                    return Err(CliError::Invalid(format!("{name} must be finite and > 0")));
                }
            }
        }
        if self.condition.is_some() {
            self.condition()?;
        }
        if let Some(s) = &self.solver {
            s.config().validate()?;
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0) {
                return Err(CliError::Invalid("tolerance must be >= 0".into()));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<Space, CliError> {
        let decl = self.space.as_ref().ok_or_else(|| missing("space"))?;
        let lo = Point::new(decl.lo.expand(decl.dimension)?)?;
        let hi = Point::new(decl.hi.expand(decl.dimension)?)?;
        Ok(Space::new(lo, hi, decl.metric, decl.order)?)
    }

    pub fn resolution(&self) -> usize {
        self.resolution.unwrap_or(DEFAULT_RESOLUTION)
    }

    pub fn map(&self, name: &str) -> Result<MultiMap, CliError> {
        let family = self
            .maps
            .get(name)
            .ok_or_else(|| CliError::Invalid(format!("no map named `{name}`")))?;
        Ok(MultiMap::new(family.clone(), self.resolution())?)
    }

    pub fn set(&self, name: &str) -> Result<BoundedSet, CliError> {
        let shape = self
            .sets
            .get(name)
            .ok_or_else(|| CliError::Invalid(format!("no set named `{name}`")))?;
        Ok(BoundedSet::new(shape.clone(), self.resolution())?)
    }

    pub fn gauge_pair(&self) -> Result<GaugePair, CliError> {
        let g = self.gauges.as_ref().ok_or_else(|| missing("gauges"))?;
        Ok(GaugePair::new(
            Gauge::from_spec(&g.psi, Slot::Psi)?,
            Gauge::from_spec(&g.phi, Slot::Phi)?,
        ))
    }

    pub fn condition(&self) -> Result<ContractionCondition, CliError> {
        let decl = self.condition.ok_or_else(|| missing("condition"))?;
        Ok(match decl {
            ConditionDecl::WeakPsiPhi => ContractionCondition::WeakPsiPhi(self.gauge_pair()?),
            ConditionDecl::WeakPsiPhiDistance => {
                ContractionCondition::WeakPsiPhiDistance(self.gauge_pair()?)
            }
            ConditionDecl::LambdaMax { lambda } => ContractionCondition::lambda_max(lambda)?,
            ConditionDecl::Rational => ContractionCondition::Rational,
            ConditionDecl::PowerWeak { k } => {
                ContractionCondition::power_weak(self.gauge_pair()?, k)?
            }
        })
    }

    pub fn solver_config(&self) -> SolverConfig {
        self.solver.as_ref().map(SolverDecl::config).unwrap_or_default()
    }

    /// Declared starts, else the start lattice, else the upper corner.
    pub fn starts(&self) -> Result<Vec<Point>, CliError> {
        let space = self.space()?;
        let decl = self.solver.as_ref();
        let explicit = decl.map(|s| s.starts.clone()).unwrap_or_default();
        if !explicit.is_empty() {
            return explicit
                .into_iter()
                .map(|c| {
                    let p = Point::new(c)?;
                    space.check_member(&p)?;
                    Ok(p)
                })
                .collect();
        }
        if let Some(n) = decl.and_then(|s| s.start_grid) {
            return Ok(space.lattice(n));
        }
        Ok(vec![space.hi().clone()])
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
            .unwrap_or(endpoint_core::contraction::DEFAULT_TOLERANCE)
    }

    pub fn singleton_eps(&self) -> f64 {
        self.singleton_eps.unwrap_or(DEFAULT_SINGLETON_EPS)
    }

    pub fn fixtures(&self) -> Result<&FixturesDecl, CliError> {
        self.fixtures.as_ref().ok_or_else(|| missing("fixtures"))
    }
}
