//! Foliation presentations reduced to their one-dimensional leaf space.
//!
//! A presentation records the interval `[0, L]` of leaves, the relative
//! leaf volume `w(θ)` along it, the ambient curvature and the dimension of
//! the leaf over each point. Everything downstream (mean curvature, the
//! basic Laplacian, the isometry checks) is computed from this data alone.
//!
//! Weights are only meaningful up to a positive constant factor.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Minimum number of nodes carried by a tabulated weight.
pub const MIN_TABLE_NODES: usize = 16;

/// Relative tolerance used when deciding whether a closed-form profile
/// reaches a zero of `sin` or `cos` exactly at the right endpoint.
const ENDPOINT_MATCH_RTOL: f64 = 1e-12;

/// Points sampled when checking positivity and locating the peak weight.
const PROBE_POINTS: usize = 1024;

/// One of the two boundary points of the leaf space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Lower => 0,
            Side::Upper => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Lower => "lower endpoint",
            Side::Upper => "upper endpoint",
        }
    }
}

/// Zig-zag folding `[0, m·L] → [0, L]`, the quotient map of an `m`-sheeted
/// covering of the leaf space. Odd sheets are traversed backwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldMap {
    base_length: f64,
    order: u32,
}

impl FoldMap {
    pub fn new(base_length: f64, order: u32) -> Result<Self> {
        if !(base_length.is_finite() && base_length > 0.0) {
            return Err(Error::InconsistentCover(format!(
                "base length must be positive, got {base_length}"
            )));
        }
        if order == 0 {
            return Err(Error::InconsistentCover("fold order must be at least 1".into()));
        }
        Ok(Self { base_length, order })
    }

    pub fn base_length(&self) -> f64 {
        self.base_length
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn lifted_length(&self) -> f64 {
        self.base_length * f64::from(self.order)
    }

    /// Interior points of the lifted interval where the sheets meet.
    pub fn fold_points(&self) -> Vec<f64> {
        (1..self.order)
            .map(|j| self.base_length * f64::from(j))
            .collect()
    }

    /// Image of `t` together with the local derivative (±1) of the fold.
    pub fn apply(&self, t: f64) -> (f64, f64) {
        let l = self.base_length;
        let sheet = ((t / l).floor().max(0.0) as u32).min(self.order - 1);
        let r = (t - f64::from(sheet) * l).clamp(0.0, l);
        if sheet.is_multiple_of(2) {
            (r, 1.0)
        } else {
            (l - r, -1.0)
        }
    }

    /// Which base endpoint the lifted upper endpoint lands on.
    pub fn upper_image(&self) -> Side {
        if self.order.is_multiple_of(2) {
            Side::Lower
        } else {
            Side::Upper
        }
    }

    /// Base endpoint hit by the `j`-th fold point (`j ≥ 1`).
    pub fn fold_image(&self, j: u32) -> Side {
        if j % 2 == 1 {
            Side::Upper
        } else {
            Side::Lower
        }
    }
}

/// Piecewise cubic polynomial on uniform pieces of `[0, L]`. Each piece
/// stores `[c0, c1, c2, c3]` in the local variable `s = θ − θ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCubic {
    width: f64,
    pieces: Vec<[f64; 4]>,
    /// Values of smaller magnitude than this are rounding noise at a zero.
    floor: f64,
}

impl PiecewiseCubic {
    fn locate(&self, theta: f64) -> (usize, f64) {
        let j = ((theta / self.width).floor().max(0.0) as usize).min(self.pieces.len() - 1);
        (j, theta - j as f64 * self.width)
    }

    fn value(&self, theta: f64) -> f64 {
        let (j, s) = self.locate(theta);
        let [c0, c1, c2, c3] = self.pieces[j];
        let v = c0 + s * (c1 + s * (c2 + s * c3));
        if v.abs() <= self.floor {
            0.0
        } else {
            v
        }
    }

    fn derivative(&self, theta: f64) -> f64 {
        let (j, s) = self.locate(theta);
        let [_, c1, c2, c3] = self.pieces[j];
        c1 + s * (2.0 * c2 + s * 3.0 * c3)
    }

    /// Taylor coefficients of the last piece about the right endpoint.
    fn upper_taylor(&self) -> [f64; 4] {
        let h = self.width;
        let [c0, c1, c2, c3] = self.pieces[self.pieces.len() - 1];
        [
            c0 + h * (c1 + h * (c2 + h * c3)),
            c1 + h * (2.0 * c2 + h * 3.0 * c3),
            c2 + 3.0 * c3 * h,
            c3,
        ]
    }

    fn vanishing_order(&self, side: Side, scale: f64) -> u32 {
        let coeffs = match side {
            Side::Lower => self.pieces[0],
            Side::Upper => self.upper_taylor(),
        };
        let mut hk = 1.0;
        for (k, c) in coeffs.iter().enumerate() {
            if c.abs() * hk > 1e-12 * scale {
                return k as u32;
            }
            hk *= self.width;
        }
        4
    }

    fn reflected(&self) -> Self {
        let h = self.width;
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|&[c0, c1, c2, c3]| {
                // q(s) = p(h - s)
                [
                    c0 + h * (c1 + h * (c2 + h * c3)),
                    -(c1 + h * (2.0 * c2 + 3.0 * h * c3)),
                    c2 + 3.0 * h * c3,
                    -c3,
                ]
            })
            .collect();
        Self {
            width: h,
            pieces,
            floor: self.floor,
        }
    }
}

/// Weight values at uniform nodes with declared vanishing orders.
///
/// The endpoint factor `(θ/L)^m0 ((L−θ)/L)^m1` is divided out and the
/// remaining positive factor is interpolated with a monotone cubic, so the
/// declared orders are reproduced exactly near the endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWeight {
    length: f64,
    values: Vec<f64>,
    orders: [u32; 2],
    regular: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledWeight {
    fn new(length: f64, mut values: Vec<f64>, orders: [u32; 2]) -> Result<Self> {
        let n = values.len();
        if n < MIN_TABLE_NODES {
            return Err(Error::InvalidWeight(format!(
                "sampled weight needs at least {MIN_TABLE_NODES} nodes, got {n}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWeight("sampled weight has non-finite values".into()));
        }
        if values[1..n - 1].iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidWeight(
                "sampled weight must be positive at interior nodes".into(),
            ));
        }
        // samples of a closed form rarely vanish exactly at the ends
        let noise = 1e-12 * values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (side, idx) in [(Side::Lower, 0), (Side::Upper, n - 1)] {
            let m = orders[side.index()];
            if m > 0 && values[idx].abs() <= noise {
                values[idx] = 0.0;
            }
            let v = values[idx];
            if m > 0 && v != 0.0 {
                return Err(Error::InvalidWeight(format!(
                    "{} declared with vanishing order {m} but sample is {v}",
                    side.label()
                )));
            }
            if m == 0 && v <= 0.0 {
                return Err(Error::InvalidWeight(format!(
                    "{} sample must be positive when no vanishing order is declared",
                    side.label()
                )));
            }
        }
        let h = length / (n - 1) as f64;
        let factor = |t: f64| endpoint_factor(t, length, orders);
        let mut regular: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * h;
                if (i == 0 && orders[0] > 0) || (i == n - 1 && orders[1] > 0) {
                    0.0
                } else {
                    values[i] / factor(t)
                }
            })
            .collect();
        if orders[0] > 0 {
            regular[0] = extrapolate(regular[1], regular[2], regular[3]);
        }
        if orders[1] > 0 {
            regular[n - 1] = extrapolate(regular[n - 2], regular[n - 3], regular[n - 4]);
        }
        let slopes = pchip_slopes(&regular, h);
        Ok(Self {
            length,
            values,
            orders,
            regular,
            slopes,
        })
    }

    fn spacing(&self) -> f64 {
        self.length / (self.values.len() - 1) as f64
    }

    /// Interpolated regular factor and its derivative.
    fn regular_part(&self, theta: f64) -> (f64, f64) {
        let h = self.spacing();
        let n = self.regular.len();
        let j = ((theta / h).floor().max(0.0) as usize).min(n - 2);
        let t = (theta - j as f64 * h) / h;
        let (y0, y1) = (self.regular[j], self.regular[j + 1]);
        let (d0, d1) = (self.slopes[j] * h, self.slopes[j + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1;
        let deriv = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * d1)
            / h;
        (value, deriv)
    }

    fn value(&self, theta: f64) -> f64 {
        endpoint_factor(theta, self.length, self.orders) * self.regular_part(theta).0
    }

    fn derivative(&self, theta: f64) -> f64 {
        let (g, dg) = self.regular_part(theta);
        let l = self.length;
        let [m0, m1] = self.orders;
        let a = (theta / l).max(0.0);
        let b = ((l - theta) / l).max(0.0);
        let phi = a.powi(m0 as i32) * b.powi(m1 as i32);
        let mut dphi = 0.0;
        if m0 > 0 {
            dphi += f64::from(m0) * a.powi(m0 as i32 - 1) * b.powi(m1 as i32) / l;
        }
        if m1 > 0 {
            dphi -= f64::from(m1) * a.powi(m0 as i32) * b.powi(m1 as i32 - 1) / l;
        }
        dphi * g + phi * dg
    }

    fn log_derivative(&self, theta: f64) -> f64 {
        let (g, dg) = self.regular_part(theta);
        let [m0, m1] = self.orders;
        let mut out = dg / g;
        if m0 > 0 {
            out += f64::from(m0) / theta;
        }
        if m1 > 0 {
            out -= f64::from(m1) / (self.length - theta);
        }
        out
    }

    fn reflected(&self) -> Result<Self> {
        let mut values = self.values.clone();
        values.reverse();
        Self::new(self.length, values, [self.orders[1], self.orders[0]])
    }
}

fn endpoint_factor(theta: f64, length: f64, orders: [u32; 2]) -> f64 {
    let a = (theta / length).max(0.0);
    let b = ((length - theta) / length).max(0.0);
    a.powi(orders[0] as i32) * b.powi(orders[1] as i32)
}

/// Quadratic extrapolation to the adjacent node, falling back to the
/// nearest value if that would not stay positive.
fn extrapolate(y1: f64, y2: f64, y3: f64) -> f64 {
    let y0 = 3.0 * y1 - 3.0 * y2 + y3;
    if y0 > 0.0 {
        y0
    } else {
        y1
    }
}

/// Fritsch–Carlson slopes for uniform spacing.
fn pchip_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a * b > 0.0 {
            d[k] = 2.0 / (1.0 / a + 1.0 / b);
        }
    }
    let end_slope = |d0: f64, d1: f64| {
        let s = (3.0 * d0 - d1) / 2.0;
        if s.signum() != d0.signum() || d0 == 0.0 {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end_slope(delta[0], delta[1]);
    d[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
    d
}

/// Functional form of a weight, without its amplitude.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightForm {
    Constant,
    /// `sin^a(θ√s) · cos^b(θ√s)` with scale `s > 0`.
    PowerTrig {
        sin_power: u32,
        cos_power: u32,
        scale: f64,
    },
    PolynomialTable(PiecewiseCubic),
    Sampled(SampledWeight),
    /// Pullback of a base weight through a fold.
    Folded {
        base: Box<WeightProfile>,
        fold: FoldMap,
    },
}

/// Relative leaf volume `w` along `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    length: f64,
    amplitude: f64,
    form: WeightForm,
    peak: f64,
}

impl WeightProfile {
    pub fn constant(value: f64, length: f64) -> Result<Self> {
        check_length(length)?;
        check_amplitude(value)?;
        Self::finish(length, value, WeightForm::Constant)
    }

    /// `sin^a(θ√scale) · cos^b(θ√scale)` on `[0, length]`.
    pub fn power_trig(sin_power: u32, cos_power: u32, scale: f64, length: f64) -> Result<Self> {
        check_length(length)?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidWeight(format!(
                "power-trig scale must be positive, got {scale}"
            )));
        }
        let reach = length * scale.sqrt();
        let limit = if cos_power > 0 { FRAC_PI_2 } else { PI };
        if reach > limit * (1.0 + ENDPOINT_MATCH_RTOL) {
            return Err(Error::InvalidWeight(format!(
                "power-trig weight turns negative or vanishes inside the interval \
                 (θ√κ′ reaches {reach}, limit {limit})"
            )));
        }
        Self::finish(
            length,
            1.0,
            WeightForm::PowerTrig {
                sin_power,
                cos_power,
                scale,
            },
        )
    }

    /// Piecewise cubic table on uniform pieces of `[0, length]`.
    pub fn polynomial_table(length: f64, pieces: Vec<[f64; 4]>) -> Result<Self> {
        check_length(length)?;
        if pieces.len() + 1 < MIN_TABLE_NODES {
            return Err(Error::InvalidWeight(format!(
                "polynomial table needs at least {MIN_TABLE_NODES} nodes, got {}",
                pieces.len() + 1
            )));
        }
        if pieces.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidWeight("polynomial table has non-finite coefficients".into()));
        }
        let mut table = PiecewiseCubic {
            width: length / pieces.len() as f64,
            pieces,
            floor: 0.0,
        };
        let scale = table
            .pieces
            .iter()
            .map(|p| p[0].abs())
            .fold(0.0_f64, f64::max)
            .max(table.upper_taylor()[0].abs());
        table.floor = 1e-12 * scale;
        for j in 0..table.pieces.len() - 1 {
            let [c0, c1, c2, c3] = table.pieces[j];
            let h = table.width;
            let end = c0 + h * (c1 + h * (c2 + h * c3));
            let next = table.pieces[j + 1][0];
            if (end - next).abs() > 1e-9 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidWeight(format!(
                    "polynomial table is discontinuous at node {}: {end} vs {next}",
                    j + 1
                )));
            }
        }
        Self::finish(length, 1.0, WeightForm::PolynomialTable(table))
    }

    /// Samples at uniform nodes `θ_i = i·L/(n−1)`, with declared vanishing
    /// orders at the two endpoints.
    pub fn sampled(length: f64, values: Vec<f64>, orders: [u32; 2]) -> Result<Self> {
        check_length(length)?;
        let sampled = SampledWeight::new(length, values, orders)?;
        Self::finish(length, 1.0, WeightForm::Sampled(sampled))
    }

    /// Pullback of `base` through `fold`.
    pub fn folded(base: WeightProfile, fold: FoldMap) -> Result<Self> {
        if (fold.base_length() - base.length).abs() > 1e-12 * base.length {
            return Err(Error::InconsistentCover(format!(
                "fold base length {} does not match weight length {}",
                fold.base_length(),
                base.length
            )));
        }
        let length = fold.lifted_length();
        let peak = base.peak;
        Ok(Self {
            length,
            amplitude: 1.0,
            form: WeightForm::Folded {
                base: Box::new(base),
                fold,
            },
            peak,
        })
    }

    fn finish(length: f64, amplitude: f64, form: WeightForm) -> Result<Self> {
        let mut w = Self {
            length,
            amplitude,
            form,
            peak: 0.0,
        };
        let mut peak = 0.0_f64;
        for i in 1..PROBE_POINTS {
            let t = length * i as f64 / PROBE_POINTS as f64;
            let v = w.value(t);
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidWeight(format!(
                    "weight must be positive on the open interval, w({t}) = {v}"
                )));
            }
            peak = peak.max(v);
        }
        for t in [0.0, length] {
            let v = w.value(t);
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidWeight(format!("weight is negative at θ = {t}: {v}")));
            }
            peak = peak.max(v);
        }
        w.peak = peak;
        Ok(w)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn form(&self) -> &WeightForm {
        &self.form
    }

    /// Largest weight seen on a fine probe of the interval.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    /// Closed forms have exact derivatives; tables are interpolated.
    pub fn is_closed_form(&self) -> bool {
        match &self.form {
            WeightForm::Constant | WeightForm::PowerTrig { .. } => true,
            WeightForm::PolynomialTable(_) | WeightForm::Sampled(_) => false,
            WeightForm::Folded { base, .. } => base.is_closed_form(),
        }
    }

    /// `w(θ)`; callers are responsible for the domain check.
    pub fn value(&self, theta: f64) -> f64 {
        let raw = match &self.form {
            WeightForm::Constant => 1.0,
            WeightForm::PowerTrig {
                sin_power,
                cos_power,
                scale,
            } => {
                let x = theta * scale.sqrt();
                x.sin().max(0.0).powi(*sin_power as i32) * x.cos().max(0.0).powi(*cos_power as i32)
            }
            WeightForm::PolynomialTable(table) => table.value(theta),
            WeightForm::Sampled(s) => s.value(theta),
            WeightForm::Folded { base, fold } => base.value(fold.apply(theta).0),
        };
        self.amplitude * raw
    }

    /// `w′(θ)`.
    pub fn derivative(&self, theta: f64) -> f64 {
        let raw = match &self.form {
            WeightForm::Constant => 0.0,
            WeightForm::PowerTrig {
                sin_power,
                cos_power,
                scale,
            } => {
                let root = scale.sqrt();
                let x = theta * root;
                let (s, c) = (x.sin().max(0.0), x.cos().max(0.0));
                let (a, b) = (*sin_power as i32, *cos_power as i32);
                let mut d = 0.0;
                if a > 0 {
                    d += f64::from(a) * s.powi(a - 1) * c.powi(b + 1);
                }
                if b > 0 {
                    d -= f64::from(b) * s.powi(a + 1) * c.powi(b - 1);
                }
                root * d
            }
            WeightForm::PolynomialTable(table) => table.derivative(theta),
            WeightForm::Sampled(s) => s.derivative(theta),
            WeightForm::Folded { base, fold } => {
                let (image, sign) = fold.apply(theta);
                sign * base.derivative(image)
            }
        };
        self.amplitude * raw
    }

    /// `(log w)′(θ)`, evaluated in closed form where available. Not
    /// meaningful where `w` vanishes.
    pub fn log_derivative(&self, theta: f64) -> f64 {
        match &self.form {
            WeightForm::Constant => 0.0,
            WeightForm::PowerTrig {
                sin_power,
                cos_power,
                scale,
            } => {
                let root = scale.sqrt();
                let x = theta * root;
                let mut d = 0.0;
                if *sin_power > 0 {
                    d += f64::from(*sin_power) / x.tan();
                }
                if *cos_power > 0 {
                    d -= f64::from(*cos_power) * x.tan();
                }
                root * d
            }
            WeightForm::PolynomialTable(table) => table.derivative(theta) / table.value(theta),
            WeightForm::Sampled(s) => s.log_derivative(theta),
            WeightForm::Folded { base, fold } => {
                let (image, sign) = fold.apply(theta);
                sign * base.log_derivative(image)
            }
        }
    }

    /// Order to which `w` vanishes at an endpoint (0 if it does not).
    pub fn vanishing_order(&self, side: Side) -> u32 {
        match &self.form {
            WeightForm::Constant => 0,
            WeightForm::PowerTrig {
                sin_power,
                cos_power,
                scale,
            } => match side {
                Side::Lower => *sin_power,
                Side::Upper => {
                    let reach = self.length * scale.sqrt();
                    if *cos_power > 0 {
                        if (reach - FRAC_PI_2).abs() <= ENDPOINT_MATCH_RTOL * FRAC_PI_2 {
                            *cos_power
                        } else {
                            0
                        }
                    } else if (reach - PI).abs() <= ENDPOINT_MATCH_RTOL * PI {
                        *sin_power
                    } else {
                        0
                    }
                }
            },
            WeightForm::PolynomialTable(table) => table.vanishing_order(side, self.peak),
            WeightForm::Sampled(s) => s.orders[side.index()],
            WeightForm::Folded { base, fold } => match side {
                Side::Lower => base.vanishing_order(Side::Lower),
                Side::Upper => base.vanishing_order(fold.upper_image()),
            },
        }
    }

    /// Same profile multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        check_amplitude(factor)?;
        let mut out = self.clone();
        match &mut out.form {
            WeightForm::Folded { base, .. } => {
                **base = base.scaled(factor)?;
            }
            _ => out.amplitude *= factor,
        }
        out.peak *= factor;
        Ok(out)
    }

    /// Pullback under the reversal `θ ↦ L − θ`.
    pub fn reflected(&self) -> Result<Self> {
        let form = match &self.form {
            WeightForm::Constant => WeightForm::Constant,
            WeightForm::PowerTrig {
                sin_power,
                cos_power,
                scale,
            } => {
                let reach = self.length * scale.sqrt();
                if *cos_power == 0 && (reach - PI).abs() <= ENDPOINT_MATCH_RTOL * PI {
                    self.form.clone()
                } else if (reach - FRAC_PI_2).abs() <= ENDPOINT_MATCH_RTOL * FRAC_PI_2 {
                    WeightForm::PowerTrig {
                        sin_power: *cos_power,
                        cos_power: *sin_power,
                        scale: *scale,
                    }
                } else {
                    return Err(Error::UnsupportedProfile(
                        "reflection of a power-trig weight needs θ√κ′ to end at π/2 or π".into(),
                    ));
                }
            }
            WeightForm::PolynomialTable(table) => WeightForm::PolynomialTable(table.reflected()),
            WeightForm::Sampled(s) => WeightForm::Sampled(s.reflected()?),
            WeightForm::Folded { .. } => {
                return Err(Error::UnsupportedProfile(
                    "reflection of a folded weight is not supported".into(),
                ))
            }
        };
        Self::finish(self.length, self.amplitude, form)
    }
}

fn check_length(length: f64) -> Result<()> {
    if length.is_finite() && length > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeight(format!("interval length must be positive, got {length}")))
    }
}

fn check_amplitude(value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeight(format!("weight amplitude must be positive, got {value}")))
    }
}

/// An interior point of a lifted leaf space over a singular or exceptional
/// base endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub position: f64,
    pub leaf_dim: u32,
    pub exceptional: bool,
    pub vanishing_order: u32,
}

/// A singular Riemannian foliation reduced to its leaf-space data.
#[derive(Debug, Clone, PartialEq)]
pub struct FoliationPresentation {
    name: String,
    kappa: f64,
    weight: WeightProfile,
    regular_leaf_dim: u32,
    endpoint_leaf_dims: [u32; 2],
    exceptional_ends: [bool; 2],
    cover_order: u32,
    interior_points: Vec<SingularPoint>,
}

impl FoliationPresentation {
    /// Validates and builds a presentation.
    ///
    /// `exceptional_ends` marks endpoints whose leaves are exceptional
    /// (finite isotropy, as in a reflection orbifold) even though their
    /// dimension does not drop.
    pub fn new(
        name: impl Into<String>,
        kappa: f64,
        weight: WeightProfile,
        regular_leaf_dim: u32,
        endpoint_leaf_dims: [u32; 2],
        exceptional_ends: [bool; 2],
    ) -> Result<Self> {
        if kappa.is_nan() || kappa.is_infinite() {
            return Err(Error::InvalidArgument(format!("curvature must be finite, got {kappa}")));
        }
        if kappa < 0.0 {
            return Err(Error::NegativeCurvature(kappa));
        }
        for side in [Side::Lower, Side::Upper] {
            let dim = endpoint_leaf_dims[side.index()];
            if dim > regular_leaf_dim {
                return Err(Error::DimensionOrder {
                    regular: regular_leaf_dim,
                    singular: dim,
                });
            }
            let order = weight.vanishing_order(side);
            let drop = regular_leaf_dim - dim;
            if order != drop {
                return Err(Error::DimensionMismatch {
                    end: side.label().to_string(),
                    vanishing_order: order,
                    dimension_drop: drop,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            kappa,
            weight,
            regular_leaf_dim,
            endpoint_leaf_dims,
            exceptional_ends,
            cover_order: 1,
            interior_points: Vec::new(),
        })
    }

    /// Lifted presentation through a fold; the weight and leaf data over
    /// every point are pulled back from `base`.
    pub(crate) fn lift(base: &Self, fold: FoldMap, name: String) -> Result<Self> {
        let weight = WeightProfile::folded(base.weight.clone(), fold)?;
        let upper = fold.upper_image().index();
        let interior_points = fold
            .fold_points()
            .into_iter()
            .zip(1..)
            .map(|(position, j)| {
                let side = fold.fold_image(j);
                SingularPoint {
                    position,
                    leaf_dim: base.endpoint_leaf_dims[side.index()],
                    exceptional: base.exceptional_ends[side.index()],
                    vanishing_order: base.weight.vanishing_order(side),
                }
            })
            .collect();
        Ok(Self {
            name,
            kappa: base.kappa,
            weight,
            regular_leaf_dim: base.regular_leaf_dim,
            endpoint_leaf_dims: [base.endpoint_leaf_dims[0], base.endpoint_leaf_dims[upper]],
            exceptional_ends: [base.exceptional_ends[0], base.exceptional_ends[upper]],
            cover_order: base.cover_order * fold.order(),
            interior_points,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn weight(&self) -> &WeightProfile {
        &self.weight
    }

    pub fn length(&self) -> f64 {
        self.weight.length()
    }

    pub fn regular_leaf_dim(&self) -> u32 {
        self.regular_leaf_dim
    }

    pub fn endpoint_leaf_dims(&self) -> [u32; 2] {
        self.endpoint_leaf_dims
    }

    pub fn exceptional_ends(&self) -> [bool; 2] {
        self.exceptional_ends
    }

    pub fn cover_order(&self) -> u32 {
        self.cover_order
    }

    /// Fold points of a lifted presentation (empty otherwise).
    pub fn interior_points(&self) -> &[SingularPoint] {
        &self.interior_points
    }

    /// The fold this presentation was lifted through, if any.
    pub fn fold(&self) -> Option<&FoldMap> {
        match self.weight.form() {
            WeightForm::Folded { fold, .. } => Some(fold),
            _ => None,
        }
    }

    pub fn endpoint(&self, side: Side) -> f64 {
        match side {
            Side::Lower => 0.0,
            Side::Upper => self.length(),
        }
    }

    /// Positions where the weight vanishes, with their orders.
    pub fn zeros(&self) -> Vec<(f64, u32)> {
        let mut out = Vec::new();
        for side in [Side::Lower, Side::Upper] {
            let m = self.weight.vanishing_order(side);
            if m > 0 {
                out.push((self.endpoint(side), m));
            }
        }
        out.extend(
            self.interior_points
                .iter()
                .filter(|p| p.vanishing_order > 0)
                .map(|p| (p.position, p.vanishing_order)),
        );
        out
    }

    /// Leaf dimension over `θ`; endpoints and fold points resolve to their
    /// declared dimension, every other point is regular.
    pub fn leaf_dim_at(&self, theta: f64) -> u32 {
        let tol = 1e-12 * self.length().max(1.0);
        for side in [Side::Lower, Side::Upper] {
            if (theta - self.endpoint(side)).abs() <= tol {
                return self.endpoint_leaf_dims[side.index()];
            }
        }
        self.interior_points
            .iter()
            .find(|p| (p.position - theta).abs() <= tol)
            .map_or(self.regular_leaf_dim, |p| p.leaf_dim)
    }

    /// Copy under a new label.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        let mut out = self.clone();
        out.name = name.into();
        out
    }

    /// Same foliation with the weight multiplied by `factor`.
    pub fn rescaled(&self, name: impl Into<String>, factor: f64) -> Result<Self> {
        let mut out = self.renamed(name);
        out.weight = self.weight.scaled(factor)?;
        Ok(out)
    }

    /// Presentation pulled back under `θ ↦ L − θ`.
    pub fn reflected(&self, name: impl Into<String>) -> Result<Self> {
        if self.fold().is_some() {
            return Err(Error::UnsupportedProfile(
                "reflection of a lifted presentation is not supported".into(),
            ));
        }
        let [lo, hi] = self.endpoint_leaf_dims;
        let [elo, ehi] = self.exceptional_ends;
        Self::new(
            name,
            self.kappa,
            self.weight.reflected()?,
            self.regular_leaf_dim,
            [hi, lo],
            [ehi, elo],
        )
    }
}

/// Named families a presentation can be built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Descriptor {
    /// `SO(n)` acting on the round `n`-sphere of radius `r` by rotation
    /// about an axis.
    SphereRotation { n: u32, radius: f64 },
    /// Flat reflection orbifold `[0, L]` seen as the leaf space of a regular
    /// foliation with leaves of dimension `leaf_dim`.
    OrbifoldInterval { length: f64, leaf_dim: u32 },
    Custom {
        kappa: f64,
        weight: WeightProfile,
        regular_leaf_dim: u32,
        endpoint_leaf_dims: [u32; 2],
        exceptional_ends: [bool; 2],
    },
}

pub fn make_presentation(name: impl Into<String>, descriptor: &Descriptor) -> Result<FoliationPresentation> {
    match descriptor {
        Descriptor::SphereRotation { n, radius } => {
            if *n < 2 {
                return Err(Error::InvalidArgument(format!(
                    "sphere dimension must be at least 2, got {n}"
                )));
            }
            if !(radius.is_finite() && *radius > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "sphere radius must be positive, got {radius}"
                )));
            }
            let kappa = 1.0 / (radius * radius);
            let weight = WeightProfile::power_trig(n - 1, 0, kappa, PI * radius)?;
            FoliationPresentation::new(name, kappa, weight, n - 1, [0, 0], [false, false])
        }
        Descriptor::OrbifoldInterval { length, leaf_dim } => {
            let weight = WeightProfile::constant(1.0, *length)?;
            FoliationPresentation::new(
                name,
                0.0,
                weight,
                *leaf_dim,
                [*leaf_dim, *leaf_dim],
                [true, true],
            )
        }
        Descriptor::Custom {
            kappa,
            weight,
            regular_leaf_dim,
            endpoint_leaf_dims,
            exceptional_ends,
        } => FoliationPresentation::new(
            name,
            *kappa,
            weight.clone(),
            *regular_leaf_dim,
            *endpoint_leaf_dims,
            *exceptional_ends,
        ),
    }
}

/// Where a stratum sits in the leaf space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StratumLocation {
    /// The open interval of regular leaves.
    Interior,
    Endpoint(Side),
    /// A singular point inside the interval (fold point of a lift).
    Point(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    pub location: StratumLocation,
    pub leaf_dim: u32,
    pub qcodim: u32,
}

impl Stratum {
    /// Leaf-space coordinate of a point stratum.
    pub fn position(&self, p: &FoliationPresentation) -> Option<f64> {
        match self.location {
            StratumLocation::Interior => None,
            StratumLocation::Endpoint(side) => Some(p.endpoint(side)),
            StratumLocation::Point(t) => Some(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stratification {
    pub strata: Vec<Stratum>,
}

impl Stratification {
    pub fn regular(&self) -> &Stratum {
        &self.strata[0]
    }

    pub fn singular(&self) -> &[Stratum] {
        &self.strata[1..]
    }

    /// True if some stratum has leaves of lower dimension than the regular
    /// ones.
    pub fn has_dimension_drop(&self) -> bool {
        let top = self.regular().leaf_dim;
        self.singular().iter().any(|s| s.leaf_dim < top)
    }

    /// Leaf-space positions of the strata of quotient codimension `k ≥ 1`.
    pub fn qcodim_points(&self, p: &FoliationPresentation, k: u32) -> Vec<f64> {
        self.strata
            .iter()
            .filter(|s| s.qcodim == k)
            .filter_map(|s| s.position(p))
            .collect()
    }
}

/// Stratification by leaf dimension and exceptional type.
///
/// The interior is the regular stratum (quotient codimension 0). Each
/// endpoint or fold point whose leaf has dropped dimension or is
/// exceptional is its own stratum; its image is a point in a 1-D leaf space,
/// so its quotient codimension is 1.
pub fn stratify(p: &FoliationPresentation) -> Stratification {
    const LEAF_SPACE_DIM: u32 = 1;
    let regular = p.regular_leaf_dim();
    let mut strata = vec![Stratum {
        location: StratumLocation::Interior,
        leaf_dim: regular,
        qcodim: 0,
    }];
    for side in [Side::Lower, Side::Upper] {
        let dim = p.endpoint_leaf_dims()[side.index()];
        if dim < regular || p.exceptional_ends()[side.index()] {
            strata.push(Stratum {
                location: StratumLocation::Endpoint(side),
                leaf_dim: dim,
                qcodim: LEAF_SPACE_DIM,
            });
        }
    }
    for point in p.interior_points() {
        if point.leaf_dim < regular || point.exceptional {
            strata.push(Stratum {
                location: StratumLocation::Point(point.position),
                leaf_dim: point.leaf_dim,
                qcodim: LEAF_SPACE_DIM,
            });
        }
    }
    Stratification { strata }
}

/// Relative volume of the leaf over `θ`.
pub fn leaf_volume(p: &FoliationPresentation, theta: f64) -> Result<f64> {
    let length = p.length();
    if !(0.0..=length).contains(&theta) {
        return Err(Error::OutOfDomain { theta, length });
    }
    Ok(p.weight().value(theta))
}
