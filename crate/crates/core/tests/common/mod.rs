#![allow(dead_code)]

use std::f64::consts::PI;

use leafspec::profiles::{make_presentation, Descriptor, FoliationPresentation, WeightProfile};

pub fn sphere(n: u32, radius: f64) -> FoliationPresentation {
    make_presentation(format!("sphere{n}"), &Descriptor::SphereRotation { n, radius }).unwrap()
}

pub fn orbifold(length: f64) -> FoliationPresentation {
    make_presentation("orbifold", &Descriptor::OrbifoldInterval { length, leaf_dim: 1 }).unwrap()
}

/// `sinᵃ(√κ θ) cosᵇ(√κ θ)` with leaf dimension `a + b + extra`; the interval
/// ends at the first zero of the cosine factor when `b > 0`, of the sine
/// factor otherwise.
pub fn power_trig(a: u32, b: u32, kappa: f64, extra: u32) -> FoliationPresentation {
    let reach = if b > 0 { PI / 2.0 } else { PI };
    let length = reach / kappa.sqrt();
    let w = WeightProfile::power_trig(a, b, kappa, length).unwrap();
    let d = a + b + extra;
    let upper_drop = if b > 0 { b } else { a };
    FoliationPresentation::new(
        format!("sin{a}cos{b}"),
        kappa,
        w,
        d,
        [d - a, d - upper_drop],
        [false, false],
    )
    .unwrap()
}

/// Slope of `log w` against `log(distance to the endpoint)` between two
/// points close to it.
pub fn endpoint_slope(p: &FoliationPresentation, upper: bool) -> f64 {
    let l = p.length();
    let (d1, d2) = (1e-5 * l, 1e-6 * l);
    let at = |d: f64| if upper { l - d } else { d };
    let w = p.weight();
    (w.value(at(d1)).ln() - w.value(at(d2)).ln()) / (d1.ln() - d2.ln())
}
