//! Scenario documents: TOML files declaring presentations, comparisons,
//! solver parameters and requested outputs.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::Spanned;

use super::CliError;
use crate::isocheck::{LeafMap, VerdictParams, DEFAULT_TOL_HYP, DEFAULT_TOL_SPEC};
use crate::meancurv::{covering_lift, CoveringDatum};
use crate::profiles::{make_presentation, Descriptor, FoliationPresentation, WeightProfile};
use crate::sturm::MIN_GRID;

/// A real number written either as a literal or as a rational multiple of
/// π: `"pi"`, `"2pi"`, `"pi/2"`, `"3*pi/4"`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "RealRepr")]
pub struct Real(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum RealRepr {
    Number(f64),
    Integer(i64),
    Text(String),
}

impl TryFrom<RealRepr> for Real {
    type Error = String;

    fn try_from(r: RealRepr) -> Result<Self, String> {
        match r {
            RealRepr::Number(v) => Ok(Real(v)),
            RealRepr::Integer(v) => Ok(Real(v as f64)),
            RealRepr::Text(s) => parse_pi_multiple(&s).map(Real),
        }
    }
}

fn parse_pi_multiple(text: &str) -> Result<f64, String> {
    let bad = || format!("expected a number or a multiple of pi, got {text:?}");
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (num, den) = match compact.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (compact.as_str(), 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?;
    let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
    let coeff = if coeff.is_empty() {
        1.0
    } else {
        coeff.parse::<f64>().map_err(|_| bad())?
    };
    let v = coeff * PI / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverParams {
    /// Coarse grid `N`; spectra also use `2N`.
    pub grid: usize,
    pub eigenvalues: usize,
    pub tol_hyp: f64,
    pub tol_spec: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            grid: 2000,
            eigenvalues: 5,
            tol_hyp: DEFAULT_TOL_HYP,
            tol_spec: DEFAULT_TOL_SPEC,
        }
    }
}

impl SolverParams {
    pub fn verdict_params(&self) -> VerdictParams {
        VerdictParams {
            grid: self.grid,
            count: self.eigenvalues,
            tol_hyp: self.tol_hyp,
            tol_spec: self.tol_spec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub spectra: bool,
    pub verdicts: bool,
    pub report: bool,
    /// Doubling ladder for per-presentation convergence diagnostics.
    pub convergence_ladder: Option<Vec<usize>>,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            spectra: true,
            verdicts: true,
            report: true,
            convergence_ladder: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    solver: SolverParams,
    #[serde(default)]
    outputs: Outputs,
    #[serde(default, rename = "presentation")]
    presentations: Vec<Spanned<RawPresentation>>,
    #[serde(default, rename = "comparison")]
    comparisons: Vec<Spanned<RawComparison>>,
}

fn one() -> Real {
    Real(1.0)
}

fn one_u32() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum RawPresentation {
    SphereRotation {
        name: String,
        n: u32,
        #[serde(default = "one")]
        radius: Real,
    },
    OrbifoldInterval {
        name: String,
        length: Real,
        #[serde(default = "one_u32")]
        leaf_dim: u32,
    },
    Custom {
        name: String,
        kappa: Real,
        regular_leaf_dim: u32,
        endpoint_leaf_dims: [u32; 2],
        #[serde(default)]
        exceptional_ends: [bool; 2],
        weight: RawWeight,
    },
    CoveringLift {
        name: String,
        base: String,
        order: u32,
    },
    Reflected {
        name: String,
        of: String,
    },
    Rescaled {
        name: String,
        of: String,
        factor: Real,
    },
    Copy {
        name: String,
        of: String,
    },
}

impl RawPresentation {
    fn name(&self) -> &str {
        match self {
            Self::SphereRotation { name, .. }
            | Self::OrbifoldInterval { name, .. }
            | Self::Custom { name, .. }
            | Self::CoveringLift { name, .. }
            | Self::Reflected { name, .. }
            | Self::Rescaled { name, .. }
            | Self::Copy { name, .. } => name,
        }
    }

    fn parent(&self) -> Option<&str> {
        match self {
            Self::CoveringLift { base, .. } => Some(base),
            Self::Reflected { of, .. } | Self::Rescaled { of, .. } | Self::Copy { of, .. } => Some(of),
            _ => None,
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
enum RawWeight {
    Constant {
        #[serde(default = "one")]
        value: Real,
        length: Real,
    },
    PowerTrig {
        sin_power: u32,
        #[serde(default)]
        cos_power: u32,
        scale: Real,
        length: Real,
    },
    PolynomialTable {
        length: Real,
        pieces: Vec<[f64; 4]>,
    },
    Sampled {
        length: Real,
        values: Vec<f64>,
        orders: [u32; 2],
    },
}

impl RawWeight {
    fn build(&self) -> crate::Result<WeightProfile> {
        match self {
            Self::Constant { value, length } => WeightProfile::constant(value.0, length.0),
            Self::PowerTrig {
                sin_power,
                cos_power,
                scale,
                length,
            } => WeightProfile::power_trig(*sin_power, *cos_power, scale.0, length.0),
            Self::PolynomialTable { length, pieces } => WeightProfile::polynomial_table(length.0, pieces.clone()),
            Self::Sampled { length, values, orders } => WeightProfile::sampled(length.0, values.clone(), *orders),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawMap {
    Token(String),
    Affine {
        kind: String,
        sign: f64,
        offset: Real,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComparison {
    label: Option<String>,
    source: Spanned<String>,
    target: Spanned<String>,
    map: Option<RawMap>,
    #[serde(default)]
    claimed_codim_preserving: bool,
}

/// A requested comparison, with presentations resolved to indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub label: String,
    pub source: usize,
    pub target: usize,
    pub map: LeafMap,
    pub claimed_codim_preserving: bool,
}

#[derive(Debug, Clone)]
pub struct ScenarioDocument {
    pub solver: SolverParams,
    pub outputs: Outputs,
    pub presentations: Vec<FoliationPresentation>,
    pub comparisons: Vec<Comparison>,
    /// SHA-256 of the source text.
    pub digest: String,
}

impl ScenarioDocument {
    pub fn presentation(&self, name: &str) -> Option<&FoliationPresentation> {
        self.presentations.iter().find(|p| p.name() == name)
    }
}

fn line_of(src: &str, span: Range<usize>) -> usize {
    src[..span.start.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// The key or section header on the given line, for diagnostics.
fn field_on_line(src: &str, line: usize) -> String {
    let text = src.lines().nth(line.saturating_sub(1)).unwrap_or("").trim();
    match text.split_once('=') {
        Some((key, _)) => key.trim().to_string(),
        None => text.to_string(),
    }
}

fn parse_error(line: Option<usize>, field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        field: field.into(),
        message: message.into(),
    }
}

pub fn parse_scenario(src: &str) -> Result<ScenarioDocument, CliError> {
    let raw: RawScenario = toml::from_str(src).map_err(|e| {
        let line = e.span().map(|s| line_of(src, s));
        let field = line.map_or_else(String::new, |l| field_on_line(src, l));
        parse_error(line, field, e.message().trim())
    })?;

    let solver = raw.solver;
    if solver.grid < MIN_GRID {
        return Err(parse_error(
            None,
            "solver.grid",
            format!("grid {} is below the minimum {MIN_GRID}", solver.grid),
        ));
    }
    for (field, tol) in [("solver.tol_hyp", solver.tol_hyp), ("solver.tol_spec", solver.tol_spec)] {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(parse_error(None, field, format!("tolerance must be positive, got {tol}")));
        }
    }

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut presentations: Vec<FoliationPresentation> = Vec::new();
    for item in &raw.presentations {
        let line = line_of(src, item.span());
        let rp = item.get_ref();
        let name = rp.name().to_string();
        if index.contains_key(&name) {
            return Err(parse_error(Some(line), "name", format!("duplicate presentation {name:?}")));
        }
        let parent = match rp.parent() {
            Some(of) => match index.get(of) {
                Some(&i) => Some(&presentations[i]),
                None => {
                    return Err(CliError::UnknownPresentation {
                        name: of.to_string(),
                        line: Some(line),
                    })
                }
            },
            None => None,
        };
        let built = build_presentation(rp, parent).map_err(|e| {
            parse_error(Some(line), format!("presentation {name:?}"), e.to_string())
        })?;
        index.insert(name, presentations.len());
        presentations.push(built);
    }

    let mut comparisons = Vec::with_capacity(raw.comparisons.len());
    for item in &raw.comparisons {
        let line = line_of(src, item.span());
        let rc = item.get_ref();
        let lookup = |name: &Spanned<String>| {
            index.get(name.get_ref()).copied().ok_or_else(|| CliError::UnknownPresentation {
                name: name.get_ref().clone(),
                line: Some(line_of(src, name.span())),
            })
        };
        let (source, target) = (lookup(&rc.source)?, lookup(&rc.target)?);
        let map = resolve_map(rc.map.as_ref(), &presentations[source], &presentations[target])
            .map_err(|m| parse_error(Some(line), "map", m))?;
        comparisons.push(Comparison {
            label: rc
                .label
                .clone()
                .unwrap_or_else(|| format!("{}|{}", rc.source.get_ref(), rc.target.get_ref())),
            source,
            target,
            map,
            claimed_codim_preserving: rc.claimed_codim_preserving,
        });
    }

    Ok(ScenarioDocument {
        solver,
        outputs: raw.outputs,
        presentations,
        comparisons,
        digest: hex::encode(Sha256::digest(src.as_bytes())),
    })
}

fn build_presentation(
    rp: &RawPresentation,
    parent: Option<&FoliationPresentation>,
) -> crate::Result<FoliationPresentation> {
    match (rp, parent) {
        (RawPresentation::SphereRotation { name, n, radius }, _) => make_presentation(
            name.clone(),
            &Descriptor::SphereRotation {
                n: *n,
                radius: radius.0,
            },
        ),
        (RawPresentation::OrbifoldInterval { name, length, leaf_dim }, _) => make_presentation(
            name.clone(),
            &Descriptor::OrbifoldInterval {
                length: length.0,
                leaf_dim: *leaf_dim,
            },
        ),
        (
            RawPresentation::Custom {
                name,
                kappa,
                regular_leaf_dim,
                endpoint_leaf_dims,
                exceptional_ends,
                weight,
            },
            _,
        ) => make_presentation(
            name.clone(),
            &Descriptor::Custom {
                kappa: kappa.0,
                weight: weight.build()?,
                regular_leaf_dim: *regular_leaf_dim,
                endpoint_leaf_dims: *endpoint_leaf_dims,
                exceptional_ends: *exceptional_ends,
            },
        ),
        (RawPresentation::CoveringLift { name, order, .. }, Some(base)) => {
            let lift = covering_lift(base, &CoveringDatum::standard(base, *order)?)?;
            Ok(lift.renamed(name.clone()))
        }
        (RawPresentation::Reflected { name, .. }, Some(of)) => of.reflected(name.clone()),
        (RawPresentation::Rescaled { name, factor, .. }, Some(of)) => of.rescaled(name.clone(), factor.0),
        (RawPresentation::Copy { name, .. }, Some(of)) => Ok(of.renamed(name.clone())),
        (_, None) => unreachable!("derived presentations are resolved before construction"),
    }
}

fn resolve_map(
    raw: Option<&RawMap>,
    source: &FoliationPresentation,
    target: &FoliationPresentation,
) -> Result<LeafMap, String> {
    match raw {
        None => Ok(LeafMap::IDENTITY),
        Some(RawMap::Token(t)) => match t.as_str() {
            "identity" => Ok(LeafMap::IDENTITY),
            "reversal" => Ok(LeafMap::reversal(target.length())),
            "fold" => source
                .fold()
                .map(|f| LeafMap::Fold(*f))
                .ok_or_else(|| format!("source {:?} is not a covering lift", source.name())),
            other => Err(format!("unknown map {other:?}; expected identity, reversal, fold or an affine table")),
        },
        Some(RawMap::Affine { kind, sign, offset }) => {
            if kind != "affine" {
                return Err(format!("unknown map kind {kind:?}"));
            }
            Ok(LeafMap::Affine {
                sign: *sign,
                offset: offset.0,
            })
        }
    }
}
