//! Leaf-space isometries and isospectrality verdicts.
//!
//! A candidate isometry between two presentations is checked for the
//! metric condition, preservation of leaf codimensions, preservation of
//! quotient-codimension strata and transport of the projected mean
//! curvature. When the mean curvature is transported (and the interval
//! lengths agree) the basic spectra must coincide; a disagreement is a
//! defect in the solver or the model, never a counterexample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meancurv::mean_curvature;
use crate::profiles::{stratify, FoldMap, FoliationPresentation};
use crate::sturm::{basic_spectrum, SpectrumEstimate};

/// Default tolerance for the mean-curvature transport check.
pub const DEFAULT_TOL_HYP: f64 = 1e-8;
/// Default relative tolerance for spectrum comparison.
pub const DEFAULT_TOL_SPEC: f64 = 1e-2;
/// Sample points for the mean-curvature check.
pub const MEAN_CURVATURE_MESH: usize = 1000;
/// Fraction of the interval excluded around each zero of either weight.
pub const SINGULAR_MARGIN: f64 = 0.01;
/// Eigenvalues below this are treated as zero modes.
pub const ZERO_MODE_FLOOR: f64 = 1e-6;

const LENGTH_TOL: f64 = 1e-12;

/// Map between leaf spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeafMap {
    /// `θ ↦ sign·θ + offset`, `sign = ±1`.
    Affine { sign: f64, offset: f64 },
    /// Quotient map of a covering: the source is a lift of the target and
    /// is identified with it through the fold.
    Fold(FoldMap),
}

impl LeafMap {
    pub const IDENTITY: LeafMap = LeafMap::Affine {
        sign: 1.0,
        offset: 0.0,
    };

    /// Reversal of `[0, length]`.
    pub fn reversal(length: f64) -> Self {
        LeafMap::Affine {
            sign: -1.0,
            offset: length,
        }
    }

    /// Image and local derivative.
    pub fn apply(&self, theta: f64) -> (f64, f64) {
        match self {
            LeafMap::Affine { sign, offset } => (sign * theta + offset, *sign),
            LeafMap::Fold(fold) => fold.apply(theta),
        }
    }

    /// All source points over `target_theta`.
    pub fn preimages(&self, target_theta: f64) -> Vec<f64> {
        match self {
            LeafMap::Affine { sign, offset } => vec![(target_theta - offset) * sign],
            LeafMap::Fold(fold) => {
                let l = fold.base_length();
                (0..fold.order())
                    .map(|sheet| {
                        let start = l * f64::from(sheet);
                        if sheet.is_multiple_of(2) {
                            start + target_theta
                        } else {
                            start + l - target_theta
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IsometryDatum<'a> {
    pub source: &'a FoliationPresentation,
    pub target: &'a FoliationPresentation,
    pub map: LeafMap,
    /// Scenario author's assertion that the map is a smooth isometry.
    pub claimed_codim_preserving: bool,
}

impl<'a> IsometryDatum<'a> {
    pub fn new(source: &'a FoliationPresentation, target: &'a FoliationPresentation, map: LeafMap) -> Self {
        Self {
            source,
            target,
            map,
            claimed_codim_preserving: false,
        }
    }

    pub fn identity(source: &'a FoliationPresentation, target: &'a FoliationPresentation) -> Self {
        Self::new(source, target, LeafMap::IDENTITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCheck {
    pub ok: bool,
    pub source_length: f64,
    pub target_length: f64,
    pub detail: String,
}

pub fn check_metric(iso: &IsometryDatum) -> MetricCheck {
    let (l1, l2) = (iso.source.length(), iso.target.length());
    let tol = LENGTH_TOL * l1.max(l2).max(1.0);
    let (ok, detail) = match iso.map {
        LeafMap::Affine { sign, offset } => {
            if sign != 1.0 && sign != -1.0 {
                (false, format!("affine slope {sign} is not ±1"))
            } else if (l1 - l2).abs() > tol {
                (false, format!("interval lengths differ: {l1} vs {l2}"))
            } else {
                let expected = if sign > 0.0 { 0.0 } else { l2 };
                if (offset - expected).abs() > tol {
                    (false, format!("offset {offset} does not map [0, {l1}] onto [0, {l2}]"))
                } else {
                    (true, "unit-speed bijection of equal-length intervals".to_string())
                }
            }
        }
        LeafMap::Fold(fold) => {
            if (fold.base_length() - l2).abs() > tol {
                (false, format!("fold base {} differs from target length {l2}", fold.base_length()))
            } else if (fold.lifted_length() - l1).abs() > tol {
                (false, format!("source length {l1} is not {} × {l2}", fold.order()))
            } else {
                (true, format!("{}-sheeted fold onto the target", fold.order()))
            }
        }
    };
    MetricCheck {
        ok,
        source_length: l1,
        target_length: l2,
        detail,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodimRow {
    pub source_theta: f64,
    pub target_theta: f64,
    pub source_codim: u32,
    pub target_codim: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodimCheck {
    pub ok: bool,
    pub table: Vec<CodimRow>,
}

/// Codimension of the leaf over `θ`, for a one-dimensional leaf space.
fn leaf_codim(p: &FoliationPresentation, theta: f64) -> u32 {
    1 + p.regular_leaf_dim() - p.leaf_dim_at(theta)
}

fn special_points(p: &FoliationPresentation) -> Vec<f64> {
    let mut pts = vec![0.0, p.length()];
    pts.extend(p.interior_points().iter().map(|s| s.position));
    pts
}

/// Leaf codimensions agree at every endpoint, fold point and the regular
/// interior, in both directions of the correspondence.
pub fn check_codim(iso: &IsometryDatum) -> CodimCheck {
    let mut table = Vec::new();
    let interior = 0.5 * iso.source.length() * (1.0 + 1e-3);
    let probe = iso.source.interior_points().iter().all(|s| (s.position - interior).abs() > 1e-9);
    if probe {
        let (t, _) = iso.map.apply(interior);
        table.push(CodimRow {
            source_theta: interior,
            target_theta: t,
            source_codim: leaf_codim(iso.source, interior),
            target_codim: leaf_codim(iso.target, t),
        });
    }
    for s in special_points(iso.source) {
        let (t, _) = iso.map.apply(s);
        table.push(CodimRow {
            source_theta: s,
            target_theta: t,
            source_codim: leaf_codim(iso.source, s),
            target_codim: leaf_codim(iso.target, t),
        });
    }
    for t in special_points(iso.target) {
        for s in iso.map.preimages(t) {
            table.push(CodimRow {
                source_theta: s,
                target_theta: t,
                source_codim: leaf_codim(iso.source, s),
                target_codim: leaf_codim(iso.target, t),
            });
        }
    }
    let ok = table.iter().all(|r| r.source_codim == r.target_codim);
    CodimCheck { ok, table }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcodimCheck {
    pub ok: bool,
    /// Image under the map of the source's quotient-codimension-1 points.
    pub mapped_source: Vec<f64>,
    pub target: Vec<f64>,
}

fn same_point_set(a: &[f64], b: &[f64], tol: f64) -> bool {
    let covers = |x: &[f64], y: &[f64]| x.iter().all(|p| y.iter().any(|q| (p - q).abs() <= tol));
    covers(a, b) && covers(b, a)
}

/// The map carries the image of each quotient-codimension stratum onto the
/// corresponding image in the target. The codimension-0 part is the dense
/// interior, which any homeomorphism preserves, so only `k = 1` is compared.
pub fn check_qcodim_strata(iso: &IsometryDatum) -> QcodimCheck {
    let src = stratify(iso.source).qcodim_points(iso.source, 1);
    let tgt = stratify(iso.target).qcodim_points(iso.target, 1);
    let mut mapped: Vec<f64> = src.iter().map(|&s| iso.map.apply(s).0).collect();
    mapped.sort_by(f64::total_cmp);
    mapped.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    let tol = 1e-9 * iso.target.length().max(1.0);
    QcodimCheck {
        ok: same_point_set(&mapped, &tgt, tol),
        mapped_source: mapped,
        target: tgt,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvatureCheck {
    pub ok: bool,
    /// Infinite when a mapped point leaves the target's domain.
    #[serde(with = "extended_float")]
    pub max_deviation: f64,
    /// Source position of the largest deviation.
    pub worst_theta: Option<f64>,
    pub samples: usize,
}

/// Serialises non-finite floats as strings, which JSON cannot represent.
mod extended_float {
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Named(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        match *v {
            v if v.is_finite() => Repr::Finite(v),
            v if v.is_nan() => Repr::Named("nan".into()),
            v if v > 0.0 => Repr::Named("inf".into()),
            _ => Repr::Named("-inf".into()),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Finite(v) => Ok(v),
            Repr::Named(n) => match n.as_str() {
                "nan" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(D::Error::custom(format!("unknown float token {other:?}"))),
            },
        }
    }
}

/// `sup |s·H₁*(θ) − H₂*(φ(θ))|` over an interior mesh of the source, with
/// margins around every zero of either weight.
pub fn check_mean_curvature(iso: &IsometryDatum, tol: f64) -> MeanCurvatureCheck {
    let length = iso.source.length();
    let margin = SINGULAR_MARGIN * length;
    let mut excluded: Vec<f64> = iso.source.zeros().iter().map(|z| z.0).collect();
    for (z, _) in iso.target.zeros() {
        excluded.extend(iso.map.preimages(z));
    }
    let h1 = mean_curvature(iso.source);
    let h2 = mean_curvature(iso.target);
    let mut worst = 0.0_f64;
    let mut worst_theta = None;
    let mut samples = 0;
    for i in 1..=MEAN_CURVATURE_MESH {
        let theta = length * i as f64 / (MEAN_CURVATURE_MESH + 1) as f64;
        if excluded.iter().any(|z| (theta - z).abs() < margin) {
            continue;
        }
        let (image, slope) = iso.map.apply(theta);
        let deviation = match (h1.eval(theta), h2.eval(image)) {
            (Ok(a), Ok(b)) => (slope * a - b).abs(),
            _ => f64::INFINITY,
        };
        samples += 1;
        if worst_theta.is_none() || deviation > worst {
            worst = deviation;
            worst_theta = Some(theta);
        }
    }
    MeanCurvatureCheck {
        ok: samples > 0 && worst <= tol,
        max_deviation: worst,
        worst_theta,
        samples,
    }
}

/// Outcome of comparing two presentations under a candidate isometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub source: String,
    pub target: String,
    pub metric: MetricCheck,
    pub codim: CodimCheck,
    pub qcodim: QcodimCheck,
    pub mean_curvature: MeanCurvatureCheck,
    pub claimed_codim_preserving: bool,
    /// Basic mean curvature; holds structurally since `w` depends on the
    /// leaf-space coordinate alone.
    pub basic: bool,
    pub spectra: (SpectrumEstimate, SpectrumEstimate),
    #[serde(with = "extended_float")]
    pub max_rel_gap: f64,
    pub isospectral: bool,
    pub theorem_applies: bool,
}

impl Verdict {
    pub fn metric_ok(&self) -> bool {
        self.metric.ok
    }

    pub fn codim_ok(&self) -> bool {
        self.codim.ok
    }

    pub fn qcodim_strata_ok(&self) -> bool {
        self.qcodim.ok
    }

    pub fn mean_curvature_ok(&self) -> bool {
        self.mean_curvature.ok
    }
}

/// Relative gap between two eigenvalues; pairs of zero modes compare
/// absolutely.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale <= ZERO_MODE_FLOOR {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

/// Largest gap over index-paired eigenvalues. A pair that fails is still
/// matched if each value lies within `tol` of a member of the other
/// list's cluster (consecutive values within `tol` of each other), so
/// multiplicities split differently across the two lists do not count.
pub fn spectral_gap(a: &[f64], b: &[f64], tol: f64) -> f64 {
    let cluster = |v: &[f64], i: usize| {
        let (mut lo, mut hi) = (i, i);
        while lo > 0 && relative_gap(v[lo - 1], v[lo]) <= tol {
            lo -= 1;
        }
        while hi + 1 < v.len() && relative_gap(v[hi], v[hi + 1]) <= tol {
            hi += 1;
        }
        lo..=hi
    };
    let n = a.len().min(b.len());
    (0..n)
        .map(|i| {
            let direct = relative_gap(a[i], b[i]);
            if direct <= tol {
                return direct;
            }
            let ab = cluster(b, i).map(|j| relative_gap(a[i], b[j])).fold(f64::INFINITY, f64::min);
            let ba = cluster(a, i).map(|j| relative_gap(b[i], a[j])).fold(f64::INFINITY, f64::min);
            let clustered = ab.max(ba);
            if clustered <= tol {
                clustered
            } else {
                direct
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictParams {
    pub grid: usize,
    pub count: usize,
    pub tol_hyp: f64,
    pub tol_spec: f64,
}

impl Default for VerdictParams {
    fn default() -> Self {
        Self {
            grid: 2000,
            count: 5,
            tol_hyp: DEFAULT_TOL_HYP,
            tol_spec: DEFAULT_TOL_SPEC,
        }
    }
}

/// Runs every check and compares the basic spectra.
pub fn verdict(iso: &IsometryDatum, params: VerdictParams) -> Result<Verdict> {
    let (s1, s2) = rayon::join(
        || basic_spectrum(iso.source, params.grid, params.count),
        || basic_spectrum(iso.target, params.grid, params.count),
    );
    verdict_with_spectra(iso, (s1?, s2?), params)
}

/// Verdict from precomputed spectra (e.g. shared across comparisons).
pub fn verdict_with_spectra(
    iso: &IsometryDatum,
    spectra: (SpectrumEstimate, SpectrumEstimate),
    params: VerdictParams,
) -> Result<Verdict> {
    let metric = check_metric(iso);
    let ((codim, qcodim), mean_curvature) = rayon::join(
        || (check_codim(iso), check_qcodim_strata(iso)),
        || check_mean_curvature(iso, params.tol_hyp),
    );
    let max_rel_gap = spectral_gap(spectra.0.eigenvalues(), spectra.1.eigenvalues(), params.tol_spec);
    let isospectral = max_rel_gap <= params.tol_spec;
    let basic = true;
    let theorem_applies = metric.ok && basic && mean_curvature.ok;
    let out = Verdict {
        source: iso.source.name().to_string(),
        target: iso.target.name().to_string(),
        metric,
        codim,
        qcodim,
        mean_curvature,
        claimed_codim_preserving: iso.claimed_codim_preserving,
        basic,
        spectra,
        max_rel_gap,
        isospectral,
        theorem_applies,
    };
    if out.theorem_applies && !out.isospectral {
        return Err(Error::InconsistentTheorem(Box::new(out)));
    }
    Ok(out)
}
