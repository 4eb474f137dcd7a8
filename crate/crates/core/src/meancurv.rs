//! Projected mean curvature `H_* = −(log w)′` of the leaves.
//!
//! The quotient is oriented from `θ = 0` to `θ = L`; positive values point
//! toward increasing `θ`.

use crate::error::{Error, Result};
use crate::profiles::{FoldMap, FoliationPresentation, WeightForm, WeightProfile};

/// Below this fraction of the peak weight the declared vanishing order's
/// asymptotic `−m/(θ − θ*)` replaces direct evaluation.
pub const NEAR_SINGULAR_CUTOFF: f64 = 1e-12;

/// Interior points used by [`is_minimal`].
pub const MINIMALITY_MESH: usize = 1000;

#[derive(Debug, Clone, Copy)]
pub struct MeanCurvatureField<'a> {
    source: &'a FoliationPresentation,
}

impl<'a> MeanCurvatureField<'a> {
    pub fn source(&self) -> &'a FoliationPresentation {
        self.source
    }

    pub fn eval(&self, theta: f64) -> Result<f64> {
        let p = self.source;
        let length = p.length();
        if !(0.0..=length).contains(&theta) {
            return Err(Error::OutOfDomain { theta, length });
        }
        let zeros = p.zeros();
        let tol = 1e-14 * length.max(1.0);
        if zeros.iter().any(|&(z, _)| (theta - z).abs() <= tol) {
            return Err(Error::SingularEndpoint { theta });
        }
        let weight = p.weight();
        if weight.value(theta) <= NEAR_SINGULAR_CUTOFF * weight.peak() {
            if let Some(&(z, m)) = zeros
                .iter()
                .min_by(|a, b| (theta - a.0).abs().total_cmp(&(theta - b.0).abs()))
            {
                return Ok(-f64::from(m) / (theta - z));
            }
        }
        Ok(-weight.log_derivative(theta))
    }
}

pub fn mean_curvature(p: &FoliationPresentation) -> MeanCurvatureField<'_> {
    MeanCurvatureField { source: p }
}

/// Whether `sup |H_*|` over an interior mesh is at most `tol`.
pub fn is_minimal(p: &FoliationPresentation, tol: f64) -> bool {
    let h = mean_curvature(p);
    let length = p.length();
    (1..=MINIMALITY_MESH).all(|i| {
        let theta = length * i as f64 / (MINIMALITY_MESH + 1) as f64;
        h.eval(theta).is_ok_and(|v| v.abs() <= tol)
    })
}

/// Radial extension of a round-sphere presentation to the flat cone over
/// it, with weight `(ρ/r)^d · w(θ)` where `d` is the regular leaf
/// dimension. Angles stay in arc-length units of the sphere of radius `r`.
#[derive(Debug, Clone)]
pub struct ConeExtension {
    source: FoliationPresentation,
    radius: f64,
    exponent: u32,
}

impl ConeExtension {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn source(&self) -> &FoliationPresentation {
        &self.source
    }

    pub fn weight(&self, rho: f64, theta: f64) -> f64 {
        (rho / self.radius).powi(self.exponent as i32) * self.source.weight().value(theta)
    }

    /// `∂ρ log w′ = d/ρ`.
    pub fn radial_log_derivative(&self, rho: f64) -> f64 {
        f64::from(self.exponent) / rho
    }

    pub fn radial_mean_curvature(&self, rho: f64) -> f64 {
        -self.radial_log_derivative(rho)
    }

    /// Component of the cone's mean curvature along the unit angular
    /// direction at `(ρ, θ)`.
    pub fn angular_mean_curvature(&self, rho: f64, theta: f64) -> Result<f64> {
        Ok(self.radius / rho * mean_curvature(&self.source).eval(theta)?)
    }

    /// Leaf-space presentation of the sphere of radius `ρ` inside the cone.
    /// At `ρ = r` this is the source presentation.
    pub fn restrict(&self, rho: f64) -> Result<FoliationPresentation> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidArgument(format!("cone radius must be positive, got {rho}")));
        }
        if rho == self.radius {
            return Ok(self.source.clone());
        }
        let p = &self.source;
        let ratio = rho / self.radius;
        let WeightForm::PowerTrig {
            sin_power,
            cos_power,
            scale,
        } = p.weight().form()
        else {
            unreachable!("cone extension is built only from power-trig weights");
        };
        let weight = WeightProfile::power_trig(*sin_power, *cos_power, scale / (ratio * ratio), p.length() * ratio)?
            .scaled(p.weight().amplitude() * ratio.powi(self.exponent as i32))?;
        FoliationPresentation::new(
            format!("{}@rho={rho}", p.name()),
            p.kappa() / (ratio * ratio),
            weight,
            p.regular_leaf_dim(),
            p.endpoint_leaf_dims(),
            p.exceptional_ends(),
        )
    }
}

pub fn cone_extension(p: &FoliationPresentation) -> Result<ConeExtension> {
    if p.kappa() <= 0.0 {
        return Err(Error::NotASphere(format!("curvature {} is not positive", p.kappa())));
    }
    if !matches!(p.weight().form(), WeightForm::PowerTrig { .. }) {
        return Err(Error::NotASphere("weight is not a closed power-trig form".into()));
    }
    Ok(ConeExtension {
        source: p.clone(),
        radius: 1.0 / p.kappa().sqrt(),
        exponent: p.regular_leaf_dim(),
    })
}

/// Deck group order plus the fold realising the covering on leaf spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringDatum {
    base_name: String,
    fold: FoldMap,
}

impl CoveringDatum {
    /// Standard `m`-sheeted fold over `base`.
    pub fn standard(base: &FoliationPresentation, deck_order: u32) -> Result<Self> {
        Ok(Self {
            base_name: base.name().to_string(),
            fold: FoldMap::new(base.length(), deck_order)?,
        })
    }

    /// Fold from explicit data; the fold points must be the multiples of the
    /// base length strictly inside `[0, lifted_length]`.
    pub fn new(
        base: &FoliationPresentation,
        deck_order: u32,
        lifted_length: f64,
        fold_points: &[f64],
    ) -> Result<Self> {
        let datum = Self::standard(base, deck_order)?;
        let expected = datum.fold.lifted_length();
        if (lifted_length - expected).abs() > 1e-12 * expected {
            return Err(Error::InconsistentCover(format!(
                "lifted length {lifted_length} is not {deck_order} × {}",
                base.length()
            )));
        }
        let want = datum.fold.fold_points();
        let matches = want.len() == fold_points.len()
            && want
                .iter()
                .zip(fold_points)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * expected);
        if !matches {
            return Err(Error::InconsistentCover(format!(
                "fold points {fold_points:?} do not match {want:?}"
            )));
        }
        Ok(datum)
    }

    pub fn deck_order(&self) -> u32 {
        self.fold.order()
    }

    pub fn fold(&self) -> &FoldMap {
        &self.fold
    }

    pub fn base_name(&self) -> &str {
        &self.base_name
    }
}

/// Lift of `p` through the covering `c`. The lifted weight is the pullback
/// of `p`'s weight, so `H̃_*(θ̃) = ±H_*(fold(θ̃))` with the sign of the
/// fold's local derivative.
pub fn covering_lift(p: &FoliationPresentation, c: &CoveringDatum) -> Result<FoliationPresentation> {
    if c.base_name != p.name() {
        return Err(Error::InconsistentCover(format!(
            "covering datum is over `{}`, not `{}`",
            c.base_name,
            p.name()
        )));
    }
    if (c.fold.base_length() - p.length()).abs() > 1e-12 * p.length() {
        return Err(Error::InconsistentCover(format!(
            "covering datum base length {} differs from {}",
            c.fold.base_length(),
            p.length()
        )));
    }
    if p.fold().is_some() {
        return Err(Error::InconsistentCover("lifting an already lifted presentation".into()));
    }
    if c.deck_order() == 1 {
        return Ok(p.clone());
    }
    FoliationPresentation::lift(p, c.fold, format!("{}~{}", p.name(), c.deck_order()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{make_presentation, Descriptor};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn sphere(n: u32) -> FoliationPresentation {
        make_presentation("s", &Descriptor::SphereRotation { n, radius: 1.0 }).unwrap()
    }

    fn orbifold() -> FoliationPresentation {
        make_presentation("o", &Descriptor::OrbifoldInterval { length: PI, leaf_dim: 1 }).unwrap()
    }

    fn central_difference_h(w: impl Fn(f64) -> f64, t: f64) -> f64 {
        let step = 1e-5;
        -((w(t + step)).ln() - (w(t - step)).ln()) / (2.0 * step)
    }

    #[test]
    fn sphere_examples() {
        let p = sphere(2);
        let h = mean_curvature(&p);
        assert!(h.eval(FRAC_PI_2).unwrap().abs() < 1e-15);
        let oracle = central_difference_h(f64::sin, FRAC_PI_4);
        assert!((oracle + 1.0).abs() < 1e-9);
        assert!((h.eval(FRAC_PI_4).unwrap() - oracle).abs() < 1e-9);
    }

    #[test]
    fn evaluation_at_singular_endpoint_fails() {
        let p = sphere(2);
        let h = mean_curvature(&p);
        assert_eq!(h.eval(0.0), Err(Error::SingularEndpoint { theta: 0.0 }));
        assert!(matches!(h.eval(PI), Err(Error::SingularEndpoint { .. })));
        assert!(matches!(h.eval(-0.1), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn orbifold_is_minimal_sphere_is_not() {
        assert!(mean_curvature(&orbifold()).eval(1.0).unwrap() == 0.0);
        assert!(is_minimal(&orbifold(), 1e-12));
        assert!(!is_minimal(&sphere(2), 1e-3));
        let weight = WeightProfile::constant(5.0, 2.0).unwrap();
        let p = FoliationPresentation::new("c", 0.0, weight, 1, [1, 1], [false, false]).unwrap();
        assert!(is_minimal(&p, 0.0));
    }

    #[test]
    fn near_singular_cutoff_uses_declared_order() {
        let p = sphere(3);
        let h = mean_curvature(&p);
        let t = 1e-13;
        assert_eq!(h.eval(t).unwrap(), -2.0 / t);
        let t = PI - 1e-7;
        let v = h.eval(t).unwrap();
        assert!((v * (PI - t) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn cone_extension_examples() {
        let cone = cone_extension(&sphere(2)).unwrap();
        let oracle = {
            let step = 1e-5;
            let f = |t: f64| (1.0 * t.sin()).ln();
            -(f(FRAC_PI_4 + step) - f(FRAC_PI_4 - step)) / (2.0 * step)
        };
        let v = cone.angular_mean_curvature(1.0, FRAC_PI_4).unwrap();
        assert!((v - oracle).abs() < 1e-9 && (v + 1.0).abs() < 1e-12);
        assert_eq!(cone.weight(2.0, FRAC_PI_2), 2.0);

        let cone3 = cone_extension(&sphere(3)).unwrap();
        let step = 1e-6_f64;
        let fd = ((1.0 + step).powi(2).ln() - (1.0 - step).powi(2).ln()) / (2.0 * step);
        assert!((cone3.radial_log_derivative(1.0) - fd).abs() < 1e-8);
        assert_eq!(cone3.radial_log_derivative(1.0), 2.0);

        assert_eq!(cone.restrict(1.0).unwrap(), sphere(2));
    }

    #[test]
    fn cone_restriction_off_unit_radius_is_a_sphere_of_that_radius() {
        let cone = cone_extension(&sphere(2)).unwrap();
        let big = cone.restrict(2.0).unwrap();
        assert!((big.length() - 2.0 * PI).abs() < 1e-12);
        assert!((big.kappa() - 0.25).abs() < 1e-15);
        // the same leaf at arc-length 2θ on the big sphere
        for t in [0.3, 1.0, 2.5] {
            assert!((big.weight().value(2.0 * t) - cone.weight(2.0, t)).abs() < 1e-13);
        }
    }

    #[test]
    fn cone_extension_rejects_non_spheres() {
        assert!(matches!(cone_extension(&orbifold()), Err(Error::NotASphere(_))));
    }

    #[test]
    fn double_fold_of_orbifold_stays_minimal() {
        let o = orbifold();
        let lift = covering_lift(&o, &CoveringDatum::standard(&o, 2).unwrap()).unwrap();
        assert!((lift.length() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(lift.weight().value(4.0), 1.0);
        assert!(is_minimal(&lift, 0.0));
    }

    #[test]
    fn double_fold_of_sphere() {
        let s = sphere(2);
        let lift = covering_lift(&s, &CoveringDatum::standard(&s, 2).unwrap()).unwrap();
        let h = mean_curvature(&lift);
        assert!(h.eval(1.5 * PI).unwrap().abs() < 1e-15);
        // −(log|sin|)′ at 5π/4 by central differences
        let oracle = central_difference_h(|t: f64| t.sin().abs(), 1.25 * PI);
        assert!((oracle + 1.0).abs() < 1e-9);
        assert!((h.eval(1.25 * PI).unwrap() - oracle).abs() < 1e-9);
        assert!(matches!(h.eval(PI), Err(Error::SingularEndpoint { .. })));
        assert_eq!(lift.interior_points().len(), 1);
        assert_eq!(lift.leaf_dim_at(PI), 0);
    }

    #[test]
    fn identity_cover_returns_base() {
        let s = sphere(2);
        let lift = covering_lift(&s, &CoveringDatum::standard(&s, 1).unwrap()).unwrap();
        assert_eq!(lift, s);
    }

    #[test]
    fn covering_datum_consistency() {
        let s = sphere(2);
        assert!(CoveringDatum::new(&s, 2, 2.0 * PI, &[PI]).is_ok());
        assert!(matches!(
            CoveringDatum::new(&s, 2, 3.0 * PI, &[PI]),
            Err(Error::InconsistentCover(_))
        ));
        assert!(matches!(
            CoveringDatum::new(&s, 2, 2.0 * PI, &[3.0]),
            Err(Error::InconsistentCover(_))
        ));
        let other = orbifold();
        let c = CoveringDatum::standard(&other, 2).unwrap();
        assert!(matches!(covering_lift(&s, &c), Err(Error::InconsistentCover(_))));
    }
}
