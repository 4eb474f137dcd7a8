//! Normal Jacobi fields on space forms of curvature `κ ≥ 0`.
//!
//! A vertical Jacobi field starting tangent to a leaf with shape eigenvalue
//! `λ` has the form `f(t)·E(t)` with `E` parallel and
//!
//! ```text
//! f″ + κ f = 0,   f(0) = 1,   f′(0) = −λ.
//! ```
//!
//! Its first zero `t₀` is the focal distance to a singular leaf, and
//! conversely `λ = √κ / tan(t₀√κ)` (or `1/t₀` when `κ = 0`).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::meancurv::mean_curvature;
use crate::profiles::{FoliationPresentation, WeightForm};

/// Absolute tolerance of the conjugate-time bisection. The loop runs until
/// the bracket cannot shrink further, which is never looser than this.
pub const CONJUGATE_TIME_TOL: f64 = 1e-13;

/// First zero of a Jacobi coefficient; `Infinite` only for `κ = 0, λ ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConjugateTime {
    Finite(f64),
    Infinite,
}

impl ConjugateTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            ConjugateTime::Finite(t) => Some(t),
            ConjugateTime::Infinite => None,
        }
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_nan() || kappa.is_infinite() {
        return Err(Error::InvalidArgument(format!("curvature must be finite, got {kappa}")));
    }
    if kappa < 0.0 {
        return Err(Error::NegativeCurvature(kappa));
    }
    Ok(())
}

fn closed_form(kappa: f64, lambda: f64, t: f64) -> (f64, f64) {
    if kappa == 0.0 {
        (1.0 - lambda * t, -lambda)
    } else {
        let root = kappa.sqrt();
        let (s, c) = (t * root).sin_cos();
        (c - lambda / root * s, -root * s - lambda * c)
    }
}

/// Closed-form `f(t)`.
pub fn jacobi_coefficient(kappa: f64, lambda: f64, t: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    Ok(closed_form(kappa, lambda, t).0)
}

/// `f(t)` by classical fourth-order Runge–Kutta with `steps` uniform steps.
pub fn jacobi_coefficient_ode(kappa: f64, lambda: f64, t: f64, steps: usize) -> Result<f64> {
    check_kappa(kappa)?;
    if t.is_nan() || t < 0.0 || steps == 0 {
        return Err(Error::InvalidArgument(format!("t = {t}, steps = {steps}")));
    }
    let h = t / steps as f64;
    let rhs = |[f, df]: [f64; 2]| [df, -kappa * f];
    let mut y = [1.0, -lambda];
    for _ in 0..steps {
        let k1 = rhs(y);
        let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(y[0])
}

/// Smallest positive zero of `f`.
///
/// For `κ > 0` the root is bracketed on `(0, π/√κ)`, where `f` starts at 1
/// and ends at −1 with a single sign change.
pub fn first_conjugate_time(kappa: f64, lambda: f64) -> Result<ConjugateTime> {
    check_kappa(kappa)?;
    if kappa == 0.0 {
        return Ok(if lambda > 0.0 {
            ConjugateTime::Finite(1.0 / lambda)
        } else {
            ConjugateTime::Infinite
        });
    }
    let f = |t: f64| closed_form(kappa, lambda, t).0;
    let mut lo = 0.0_f64;
    let mut hi = PI / kappa.sqrt();
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    debug_assert!(hi - lo <= CONJUGATE_TIME_TOL);
    Ok(ConjugateTime::Finite(0.5 * (lo + hi)))
}

/// Shape eigenvalue whose Jacobi field first vanishes at `t0`.
pub fn eigenvalue_from_conjugate_time(kappa: f64, t0: ConjugateTime) -> Result<f64> {
    check_kappa(kappa)?;
    let t0 = match t0 {
        ConjugateTime::Infinite if kappa == 0.0 => return Ok(0.0),
        ConjugateTime::Infinite => {
            return Err(Error::OutOfRange(
                "an infinite conjugate time needs κ = 0".into(),
            ))
        }
        ConjugateTime::Finite(t) => t,
    };
    if t0.is_nan() || t0 <= 0.0 {
        return Err(Error::OutOfRange(format!("conjugate time must be positive, got {t0}")));
    }
    if kappa == 0.0 {
        return Ok(1.0 / t0);
    }
    let root = kappa.sqrt();
    let x = t0 * root;
    if x >= PI {
        return Err(Error::OutOfRange(format!(
            "conjugate time {t0} is not below π/√κ = {}",
            PI / root
        )));
    }
    // cot x evaluated on whichever side keeps the argument well conditioned
    Ok(if x <= FRAC_PI_4 {
        root / x.tan()
    } else {
        root * (FRAC_PI_2 - x).tan()
    })
}

/// `dim L_regular − dim L_singular`: the multiplicity with which a
/// collapsing direction contributes its focal eigenvalue.
pub fn singular_kernel_dimension(regular_leaf_dim: u32, singular_leaf_dim: u32) -> Result<u32> {
    if singular_leaf_dim > regular_leaf_dim {
        return Err(Error::DimensionOrder {
            regular: regular_leaf_dim,
            singular: singular_leaf_dim,
        });
    }
    Ok(regular_leaf_dim - singular_leaf_dim)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpectrum {
    /// `(eigenvalue, multiplicity)` pairs.
    pub entries: Vec<(f64, u32)>,
    pub at: f64,
    pub direction: f64,
}

impl ShapeSpectrum {
    pub fn trace(&self) -> f64 {
        self.entries.iter().map(|(l, m)| l * f64::from(*m)).sum()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.entries.iter().map(|(_, m)| m).sum()
    }
}

/// Principal curvatures of the leaf over `θ` in the horizontal direction
/// `direction = ±1`, for `w = sin^a(θ√s) cos^b(θ√s)`.
///
/// Looking toward decreasing `θ` (`direction = −1`) the `a` directions that
/// collapse at `θ = 0` focus at distance `θ`, giving `√s·cot(θ√s)`; the `b`
/// directions that collapse at the far end give `−√s·tan(θ√s)`. The
/// opposite direction flips every sign. Remaining directions are totally
/// geodesic (eigenvalue 0).
pub fn shape_spectrum_from_profile(p: &FoliationPresentation, theta: f64, direction: f64) -> Result<ShapeSpectrum> {
    if direction != 1.0 && direction != -1.0 {
        return Err(Error::InvalidArgument(format!("direction must be ±1, got {direction}")));
    }
    let length = p.length();
    if !(theta > 0.0 && theta < length) {
        return Err(Error::OutOfDomain { theta, length });
    }
    let (a, b, root) = match p.weight().form() {
        WeightForm::Constant => (0, 0, 0.0),
        WeightForm::PowerTrig {
            sin_power,
            cos_power,
            scale,
        } => (*sin_power, *cos_power, scale.sqrt()),
        _ => {
            return Err(Error::UnsupportedProfile(
                "shape spectra are defined only for constant and power-trig weights".into(),
            ))
        }
    };
    let dim = p.regular_leaf_dim();
    if a + b > dim {
        return Err(Error::UnsupportedProfile(format!(
            "exponents {a} + {b} exceed the regular leaf dimension {dim}"
        )));
    }
    let x = theta * root;
    let sign = -direction;
    let mut entries = Vec::new();
    if a > 0 {
        let t0 = ConjugateTime::Finite(theta);
        entries.push((sign * eigenvalue_from_conjugate_time(root * root, t0)?, a));
    }
    if b > 0 {
        entries.push((-sign * root * x.tan(), b));
    }
    if a + b < dim {
        entries.push((0.0, dim - a - b));
    }
    Ok(ShapeSpectrum {
        entries,
        at: theta,
        direction,
    })
}

/// `max |f′(t) + λ_t f(t)|` over `samples` points, where `λ_t` is the shape
/// eigenvalue transported along the geodesic (focal distance `t₀ − t`).
/// Zero residual means the field stays an eigenfield of the shape operator.
pub fn projectable_residual(kappa: f64, lambda: f64, samples: usize) -> Result<f64> {
    check_kappa(kappa)?;
    let t0 = first_conjugate_time(kappa, lambda)?;
    let span = match t0 {
        ConjugateTime::Finite(t) => 0.9 * t,
        ConjugateTime::Infinite => 10.0,
    };
    let transported = |t: f64| -> Result<f64> {
        match t0 {
            ConjugateTime::Finite(t0) => eigenvalue_from_conjugate_time(kappa, ConjugateTime::Finite(t0 - t)),
            // κ = 0, λ ≤ 0: focal point behind the start at 1/λ
            ConjugateTime::Infinite => Ok(lambda / (1.0 - lambda * t)),
        }
    };
    let mut worst = 0.0_f64;
    for i in 0..samples {
        let t = span * i as f64 / samples.max(1) as f64;
        let (f, df) = closed_form(kappa, lambda, t);
        worst = worst.max((df + transported(t)? * f).abs());
    }
    Ok(worst)
}

/// Mean curvature implied by a shape spectrum, for cross-checks.
pub fn trace_mismatch(p: &FoliationPresentation, theta: f64, direction: f64) -> Result<f64> {
    let spectrum = shape_spectrum_from_profile(p, theta, direction)?;
    let h = mean_curvature(p).eval(theta)?;
    Ok((spectrum.trace() - direction * h).abs())
}
