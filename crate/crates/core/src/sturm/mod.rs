//! Discrete basic Laplacian and its low spectrum.
//!
//! On a one-dimensional leaf space the basic Laplacian acts as the
//! Sturm–Liouville operator `L f = −(w f′)′ / w = −f″ + H_* f′`. It is
//! discretised with cell-centred finite volumes in divergence form:
//!
//! ```text
//! (L f)_i = −[w_{i+½}(f_{i+1} − f_i) − w_{i−½}(f_i − f_{i−1})] / (h² w_i)
//! ```
//!
//! with zero flux through both outer faces. The operator is self-adjoint
//! for `⟨f, g⟩_w = Σ w_i f_i g_i`; the diagonal similarity `f ↦ √w f`
//! turns it into a symmetric tridiagonal matrix. Where `w` vanishes at an
//! endpoint the outer face weight is zero anyway, which is exactly the
//! regularity condition for smooth basic functions.

pub mod tridiag;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{FoldMap, FoliationPresentation, WeightProfile};
pub use tridiag::SymTridiagonal;

/// Smallest accepted grid.
pub const MIN_GRID: usize = 16;

/// Richardson factor for a second-order scheme.
pub const RICHARDSON_FACTOR: f64 = 4.0;

/// Observed convergence ratios further than this fraction from 4 are
/// reported as suspect.
pub const RATIO_DEVIATION: f64 = 0.5;

/// Inverse-iteration sweeps used to refine each eigenvalue.
const INVERSE_ITERATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    h: f64,
    centers: Vec<f64>,
    cell_weights: Vec<f64>,
    face_weights: Vec<f64>,
    matrix: SymTridiagonal,
}

impl DiscreteOperator {
    /// Operator from cell masses and face weights (`n + 1` faces, outer
    /// ones carried as metadata only).
    fn from_weights(h: f64, centers: Vec<f64>, cell_weights: Vec<f64>, face_weights: Vec<f64>) -> Self {
        let n = cell_weights.len();
        let h2 = h * h;
        let diag = (0..n)
            .map(|i| {
                let left = if i > 0 { face_weights[i] } else { 0.0 };
                let right = if i + 1 < n { face_weights[i + 1] } else { 0.0 };
                (left + right) / (h2 * cell_weights[i])
            })
            .collect();
        let off = (0..n - 1)
            .map(|i| -face_weights[i + 1] / (h2 * (cell_weights[i] * cell_weights[i + 1]).sqrt()))
            .collect();
        Self {
            h,
            centers,
            cell_weights,
            face_weights,
            matrix: SymTridiagonal::new(diag, off),
        }
    }

    pub fn len(&self) -> usize {
        self.cell_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_weights.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn cell_weights(&self) -> &[f64] {
        &self.cell_weights
    }

    pub fn face_weights(&self) -> &[f64] {
        &self.face_weights
    }

    /// The symmetrised matrix `W^{1/2} L W^{-1/2}`.
    pub fn matrix(&self) -> &SymTridiagonal {
        &self.matrix
    }

    /// The divergence-form stencil applied to cell values.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        let h2 = self.h * self.h;
        (0..n)
            .map(|i| {
                let mut flux = 0.0;
                if i + 1 < n {
                    flux += self.face_weights[i + 1] * (f[i + 1] - f[i]);
                }
                if i > 0 {
                    flux -= self.face_weights[i] * (f[i] - f[i - 1]);
                }
                -flux / (h2 * self.cell_weights[i])
            })
            .collect()
    }

    pub fn weighted_inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.cell_weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    /// `⟨L f, f⟩_w` as a sum of squared differences.
    pub fn energy(&self, f: &[f64]) -> f64 {
        let h2 = self.h * self.h;
        f.windows(2)
            .zip(&self.face_weights[1..])
            .map(|(pair, w)| w * (pair[1] - pair[0]).powi(2))
            .sum::<f64>()
            / h2
    }

    pub fn to_symmetric(&self, f: &[f64]) -> Vec<f64> {
        f.iter().zip(&self.cell_weights).map(|(v, w)| v * w.sqrt()).collect()
    }

    pub fn from_symmetric(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.cell_weights).map(|(v, w)| v / w.sqrt()).collect()
    }

    /// The `k` lowest eigenvalues. Bisection brackets each one; an inverse
    /// iteration eigenvector then gives the Rayleigh quotient
    /// `energy(f) / ⟨f, f⟩_w`, which is free of cancellation near zero.
    pub fn eigenvalues(&self, k: usize) -> Vec<f64> {
        self.eigenpairs(k).into_iter().map(|(l, _)| l).collect()
    }

    /// Eigenvalues with eigenfunctions in the original (untransformed)
    /// variables, normalised to `⟨f, f⟩_w = 1`.
    pub fn eigenpairs(&self, k: usize) -> Vec<(f64, Vec<f64>)> {
        self.matrix
            .lowest_eigenvalues(k)
            .into_iter()
            .map(|estimate| {
                let x = self.matrix.inverse_iteration(estimate, INVERSE_ITERATIONS);
                let mut f = self.from_symmetric(&x);
                let mass = self.weighted_inner(&f, &f);
                let refined = self.energy(&f) / mass;
                let scale = mass.sqrt();
                f.iter_mut().for_each(|v| *v /= scale);
                let lambda = if (refined - estimate).abs() <= 1e-6 * estimate.abs().max(1.0) {
                    refined
                } else {
                    estimate
                };
                (lambda, f)
            })
            .collect()
    }

    /// Galerkin restriction to functions pulled back through `fold`
    /// (deck-invariant basic functions). Faces interior to a fold drop out.
    pub fn restrict_to_fold(&self, fold: &FoldMap) -> Result<Self> {
        let n = self.len();
        let m = fold.order() as usize;
        if !n.is_multiple_of(m) {
            return Err(Error::InconsistentCover(format!(
                "grid of {n} cells is not aligned with a {m}-sheeted fold"
            )));
        }
        let nb = n / m;
        let cell_image = |i: usize| {
            let (sheet, r) = (i / nb, i % nb);
            if sheet.is_multiple_of(2) {
                r
            } else {
                nb - 1 - r
            }
        };
        let face_image = |g: usize| {
            let sheet = (g / nb).min(m - 1);
            let r = g - sheet * nb;
            if sheet.is_multiple_of(2) {
                r
            } else {
                nb - r
            }
        };
        let mut cells = vec![0.0; nb];
        for (i, w) in self.cell_weights.iter().enumerate() {
            cells[cell_image(i)] += w;
        }
        let mut faces = vec![0.0; nb + 1];
        for (g, w) in self.face_weights.iter().enumerate() {
            let interior = g > 0 && g < n;
            if interior && cell_image(g - 1) == cell_image(g) {
                // both sides land in the same base cell: the face carries
                // no flux between distinct unknowns
                continue;
            }
            faces[face_image(g)] += w;
        }
        let centers = (0..nb).map(|i| (i as f64 + 0.5) * self.h).collect();
        Ok(Self::from_weights(self.h, centers, cells, faces))
    }
}

/// Finite-volume operator of `p` on `n` uniform cells of its own interval.
pub fn assemble(p: &FoliationPresentation, n: usize) -> Result<DiscreteOperator> {
    assemble_weight(p.weight(), n)
}

fn assemble_weight(weight: &WeightProfile, n: usize) -> Result<DiscreteOperator> {
    if n < MIN_GRID {
        return Err(Error::GridTooCoarse { n, min: MIN_GRID });
    }
    let length = weight.length();
    let h = length / n as f64;
    let centers: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let cells: Vec<f64> = centers.iter().map(|&t| weight.value(t)).collect();
    let faces: Vec<f64> = (0..=n)
        .map(|g| {
            let t = if g == n { length } else { g as f64 * h };
            weight.value(t)
        })
        .collect();
    Ok(DiscreteOperator::from_weights(h, centers, cells, faces))
}

/// Operator whose spectrum is the basic spectrum of `p`: the plain
/// assembly, or for a lifted presentation its restriction to functions
/// that descend through the covering.
fn basic_operator(p: &FoliationPresentation, n: usize) -> Result<DiscreteOperator> {
    let op = assemble(p, n)?;
    match p.fold() {
        Some(fold) => {
            let reduced = op.restrict_to_fold(fold)?;
            if reduced.len() < MIN_GRID {
                return Err(Error::GridTooCoarse {
                    n: reduced.len(),
                    min: MIN_GRID,
                });
            }
            Ok(reduced)
        }
        None => Ok(op),
    }
}

/// Lowest eigenvalues at `n` and `2n` cells, Richardson-extrapolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub label: String,
    pub grid: usize,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub extrapolated: Vec<f64>,
    pub error_estimates: Vec<f64>,
}

impl SpectrumEstimate {
    fn from_pair(label: &str, grid: usize, coarse: Vec<f64>, fine: Vec<f64>) -> Self {
        let extrapolated = coarse
            .iter()
            .zip(&fine)
            .map(|(c, f)| (RICHARDSON_FACTOR * f - c) / (RICHARDSON_FACTOR - 1.0))
            .collect();
        let error_estimates = coarse
            .iter()
            .zip(&fine)
            .map(|(c, f)| (f - c).abs() / (RICHARDSON_FACTOR - 1.0))
            .collect();
        Self {
            label: label.to_string(),
            grid,
            coarse,
            fine,
            extrapolated,
            error_estimates,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.extrapolated
    }

    pub fn grid_sizes(&self) -> (usize, usize) {
        (self.grid, 2 * self.grid)
    }

    pub fn len(&self) -> usize {
        self.extrapolated.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extrapolated.is_empty()
    }
}

fn check_request(p: &FoliationPresentation, n: usize, k: usize) -> Result<()> {
    if n < MIN_GRID {
        return Err(Error::GridTooCoarse { n, min: MIN_GRID });
    }
    let effective = n / p.fold().map_or(1, |f| f.order() as usize);
    if 4 * k > effective {
        return Err(Error::TooManyEigenvalues { k, n: effective });
    }
    Ok(())
}

fn spectrum_pair(
    label: &str,
    n: usize,
    k: usize,
    build: impl Fn(usize) -> Result<DiscreteOperator> + Sync,
) -> Result<SpectrumEstimate> {
    let (coarse, fine) = rayon::join(
        || build(n).map(|op| op.eigenvalues(k)),
        || build(2 * n).map(|op| op.eigenvalues(k)),
    );
    Ok(SpectrumEstimate::from_pair(label, n, coarse?, fine?))
}

/// The `k` lowest basic eigenvalues of `p` on grids `n` and `2n`.
pub fn basic_spectrum(p: &FoliationPresentation, n: usize, k: usize) -> Result<SpectrumEstimate> {
    check_request(p, n, k)?;
    spectrum_pair(p.name(), n, k, |m| basic_operator(p, m))
}

/// Neumann spectrum of the bare interval `[0, L]` of `p`, ignoring the
/// leaf-volume drift.
pub fn orbifold_spectrum(p: &FoliationPresentation, n: usize, k: usize) -> Result<SpectrumEstimate> {
    if n < MIN_GRID {
        return Err(Error::GridTooCoarse { n, min: MIN_GRID });
    }
    if 4 * k > n {
        return Err(Error::TooManyEigenvalues { k, n });
    }
    let flat = WeightProfile::constant(1.0, p.length())?;
    spectrum_pair(p.name(), n, k, |m| assemble_weight(&flat, m))
}

/// Eigenvalues along a doubling ladder of grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub label: String,
    pub ladder: Vec<usize>,
    /// `eigenvalues[g][i]`: eigenvalue `i` on grid `ladder[g]`.
    pub eigenvalues: Vec<Vec<f64>>,
    /// `ratios[g][i] = (λ_g − λ_{g+1}) / (λ_{g+1} − λ_{g+2})`, absent when
    /// the differences are at round-off level.
    pub ratios: Vec<Vec<Option<f64>>>,
    /// Richardson extrapolation of the two finest grids.
    pub extrapolated: Vec<f64>,
}

impl ConvergenceStudy {
    /// First eigenvalue whose observed ratio strays from 4 by more than
    /// [`RATIO_DEVIATION`].
    pub fn suspect(&self) -> Option<(usize, f64)> {
        let lo = RICHARDSON_FACTOR * (1.0 - RATIO_DEVIATION);
        let hi = RICHARDSON_FACTOR * (1.0 + RATIO_DEVIATION);
        self.ratios.iter().find_map(|row| {
            row.iter()
                .enumerate()
                .find_map(|(i, r)| r.filter(|r| !(lo..=hi).contains(r)).map(|r| (i, r)))
        })
    }
}

pub fn convergence_study(p: &FoliationPresentation, ladder: &[usize], k: usize) -> Result<ConvergenceStudy> {
    if ladder.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "a convergence ladder needs at least 3 grids, got {}",
            ladder.len()
        )));
    }
    if let Some(&n) = ladder.iter().find(|&&n| n < MIN_GRID) {
        return Err(Error::GridTooCoarse { n, min: MIN_GRID });
    }
    if ladder.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidArgument(format!(
            "each grid in the ladder must double the previous one: {ladder:?}"
        )));
    }
    check_request(p, ladder[0], k)?;
    let eigenvalues: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        ladder
            .par_iter()
            .map(|&n| basic_operator(p, n).map(|op| op.eigenvalues(k)))
            .collect::<Result<_>>()?
    };
    let ratios = eigenvalues
        .windows(3)
        .map(|w| {
            (0..k)
                .map(|i| {
                    let d1 = w[0][i] - w[1][i];
                    let d2 = w[1][i] - w[2][i];
                    let noise = 1e-9 * w[2][i].abs().max(1.0);
                    (d1.abs() > noise && d2.abs() > noise).then(|| d1 / d2)
                })
                .collect()
        })
        .collect();
    let (c, f) = (&eigenvalues[ladder.len() - 2], &eigenvalues[ladder.len() - 1]);
    let extrapolated = c
        .iter()
        .zip(f)
        .map(|(c, f)| (RICHARDSON_FACTOR * f - c) / (RICHARDSON_FACTOR - 1.0))
        .collect();
    Ok(ConvergenceStudy {
        label: p.name().to_string(),
        ladder: ladder.to_vec(),
        eigenvalues,
        ratios,
        extrapolated,
    })
}

/// Runs the ladder `n, 2n, 4n` and fails with `ConvergenceSuspect` if any
/// reported eigenvalue does not converge at second order.
pub fn check_convergence(p: &FoliationPresentation, n: usize, k: usize) -> Result<ConvergenceStudy> {
    let study = convergence_study(p, &[n, 2 * n, 4 * n], k)?;
    match study.suspect() {
        Some((index, ratio)) => Err(Error::ConvergenceSuspect { index, ratio }),
        None => Ok(study),
    }
}

/// Closed-form spectra used as references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceFamily {
    /// Laplacian of the round `n`-sphere of radius `r`.
    Sphere { n: u32, radius: f64 },
    /// Neumann Laplacian of `[0, L]`.
    Interval { length: f64 },
}

impl ReferenceFamily {
    /// Builds a family from its token and one or two parameters.
    pub fn from_token(token: &str, params: &[f64]) -> Result<Self> {
        match (token, params) {
            ("sphere", [n, r]) => Ok(Self::Sphere {
                n: *n as u32,
                radius: *r,
            }),
            ("interval", [l]) => Ok(Self::Interval { length: *l }),
            _ => Err(Error::UnknownFamily(format!("{token}/{}", params.len()))),
        }
    }
}

/// The first `k` distinct eigenvalues (multiplicities suppressed).
pub fn reference_spectrum(family: ReferenceFamily, k: usize) -> Result<Vec<f64>> {
    match family {
        ReferenceFamily::Sphere { n, radius } => {
            if n == 0 || !(radius.is_finite() && radius > 0.0) {
                return Err(Error::InvalidArgument(format!("sphere({n}, {radius})")));
            }
            let r2 = radius * radius;
            Ok((0..k as u64)
                .map(|j| (j * (j + u64::from(n) - 1)) as f64 / r2)
                .collect())
        }
        ReferenceFamily::Interval { length } => {
            if !(length.is_finite() && length > 0.0) {
                return Err(Error::InvalidArgument(format!("interval({length})")));
            }
            Ok((0..k)
                .map(|j| (j as f64 * std::f64::consts::PI / length).powi(2))
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meancurv::{covering_lift, mean_curvature, CoveringDatum};
    use crate::profiles::{make_presentation, Descriptor};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn sphere(n: u32, radius: f64) -> FoliationPresentation {
        make_presentation("s", &Descriptor::SphereRotation { n, radius }).unwrap()
    }

    fn orbifold() -> FoliationPresentation {
        make_presentation("o", &Descriptor::OrbifoldInterval { length: PI, leaf_dim: 1 }).unwrap()
    }

    fn assert_rel(got: &[f64], want: &[f64], rtol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            if *w == 0.0 {
                assert!(g.abs() < 1e-6, "{got:?} vs {want:?}");
            } else {
                assert!(((g - w) / w).abs() <= rtol, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn flat_weight_gives_neumann_stencil() {
        let op = assemble(&orbifold(), 16).unwrap();
        let h2 = op.h() * op.h();
        let m = op.matrix();
        assert!((m.diag()[0] * h2 - 1.0).abs() < 1e-14);
        assert!((m.diag()[15] * h2 - 1.0).abs() < 1e-14);
        assert!(m.diag()[1..15].iter().all(|d| (d * h2 - 2.0).abs() < 1e-14));
        assert!(m.off().iter().all(|e| (e * h2 + 1.0).abs() < 1e-14));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert_eq!(
            assemble(&orbifold(), 4).unwrap_err(),
            Error::GridTooCoarse { n: 4, min: MIN_GRID }
        );
        assert!(matches!(
            basic_spectrum(&orbifold(), 64, 17),
            Err(Error::TooManyEigenvalues { .. })
        ));
    }

    #[test]
    fn constant_rescale_leaves_matrix_unchanged() {
        let p = sphere(2, 1.0);
        let q = p.rescaled("q", 7.0).unwrap();
        let (a, b) = (assemble(&p, 200).unwrap(), assemble(&q, 200).unwrap());
        for (x, y) in a.matrix().diag().iter().zip(b.matrix().diag()) {
            assert!((x - y).abs() <= 1e-14 * x.abs());
        }
        for (x, y) in a.matrix().off().iter().zip(b.matrix().off()) {
            assert!((x - y).abs() <= 1e-14 * x.abs());
        }
    }

    #[test]
    fn kernel_is_the_constant_function() {
        for p in [sphere(2, 1.0), sphere(4, 1.0), orbifold()] {
            let op = assemble(&p, 400).unwrap();
            let pairs = op.eigenpairs(2);
            let (l0, f0) = &pairs[0];
            assert!(l0.abs() <= 1e-9 * pairs[1].0, "{l0}");
            let mean = f0.iter().sum::<f64>() / f0.len() as f64;
            assert!(f0.iter().all(|v| (v - mean).abs() < 1e-8 * mean.abs()));
        }
    }

    #[test]
    fn weighted_self_adjointness() {
        let op = assemble(&sphere(3, 1.0), 128).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let f: Vec<f64> = (0..128).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g: Vec<f64> = (0..128).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lhs = op.weighted_inner(&op.apply(&f), &g);
            let rhs = op.weighted_inner(&f, &op.apply(&g));
            let scale: f64 = op
                .cell_weights()
                .iter()
                .zip(op.apply(&f).iter().zip(&g))
                .map(|(w, (a, b))| (w * a * b).abs())
                .sum();
            assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn symmetric_form_matches_stencil() {
        let op = assemble(&sphere(2, 1.0), 64).unwrap();
        let f: Vec<f64> = op.centers().iter().map(|t| (2.0 * t).cos()).collect();
        let direct = op.apply(&f);
        let via = op.from_symmetric(&op.matrix().apply(&op.to_symmetric(&f)));
        for (a, b) in direct.iter().zip(&via) {
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn drift_identity_is_second_order() {
        // L f against −D²f + H_* D¹f on an interior patch
        let p = sphere(2, 1.0);
        let h_field = mean_curvature(&p);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let (a, b, c) = (rng.gen_range(0.5..3.0), rng.gen_range(0.0..6.0), rng.gen_range(-1.0..1.0));
            let f = |t: f64| (a * t + b).sin() + c * t * t;
            let residual = |n: usize| {
                let op = assemble(&p, n).unwrap();
                let h = op.h();
                let values: Vec<f64> = op.centers().iter().map(|&t| f(t)).collect();
                let lf = op.apply(&values);
                (n / 4..3 * n / 4)
                    .map(|i| {
                        let t = op.centers()[i];
                        let d2 = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
                        let d1 = (values[i + 1] - values[i - 1]) / (2.0 * h);
                        (lf[i] - (-d2 + h_field.eval(t).unwrap() * d1)).abs()
                    })
                    .fold(0.0, f64::max)
            };
            let (r1, r2) = (residual(200), residual(400));
            let slope = (r1 / r2).log2();
            assert!((1.7..2.3).contains(&slope), "slope {slope}, residuals {r1} {r2}");
        }
    }

    #[test]
    fn sphere_two_basic_spectrum() {
        let s = basic_spectrum(&sphere(2, 1.0), 2000, 5).unwrap();
        assert_rel(s.eigenvalues(), &[0.0, 2.0, 6.0, 12.0, 20.0], 5e-3);
        assert!(s.eigenvalues()[0] >= -1e-9 && s.eigenvalues()[0] <= 1e-6);
        assert_eq!(s.grid_sizes(), (2000, 4000));
    }

    #[test]
    fn orbifold_basic_spectrum() {
        let s = basic_spectrum(&orbifold(), 2000, 5).unwrap();
        assert_rel(s.eigenvalues(), &[0.0, 1.0, 4.0, 9.0, 16.0], 5e-3);
        let o = orbifold_spectrum(&orbifold(), 2000, 5).unwrap();
        for (a, b) in s.eigenvalues().iter().zip(o.eigenvalues()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_three_basic_spectrum() {
        let s = basic_spectrum(&sphere(3, 1.0), 2000, 4).unwrap();
        assert_rel(s.eigenvalues(), &[0.0, 3.0, 8.0, 15.0], 5e-3);
    }

    #[test]
    fn orbifold_spectrum_ignores_drift() {
        let s = orbifold_spectrum(&sphere(2, 1.0), 2000, 4).unwrap();
        assert_rel(s.eigenvalues(), &[0.0, 1.0, 4.0, 9.0], 5e-3);
        // any length: (kπ/L)²
        let half = sphere(2, 0.5);
        let s = orbifold_spectrum(&half, 1000, 4).unwrap();
        let want: Vec<f64> = (0..4).map(|k| (k as f64 * PI / half.length()).powi(2)).collect();
        assert_rel(s.eigenvalues(), &want, 1e-6);
    }

    #[test]
    fn second_order_convergence_of_first_mode() {
        let p = sphere(2, 1.0);
        let err = |n| (assemble(&p, n).unwrap().eigenvalues(2)[1] - 2.0).abs();
        let ratio = err(500) / err(1000);
        assert!((3.2..=4.8).contains(&ratio), "{ratio}");
    }

    #[test]
    fn convergence_study_ratios() {
        let study = convergence_study(&sphere(2, 1.0), &[500, 1000, 2000], 3).unwrap();
        assert!(study.ratios[0][0].is_none());
        for i in 1..3 {
            let r = study.ratios[0][i].unwrap();
            assert!((3.2..=4.8).contains(&r), "{r}");
        }
        assert!(check_convergence(&sphere(2, 1.0), 250, 3).is_ok());
        let flat = convergence_study(&orbifold(), &[500, 1000, 2000], 3).unwrap();
        assert!((flat.extrapolated[2] - 4.0).abs() < 1e-4);
        assert!(convergence_study(&orbifold(), &[500, 1000], 3).is_err());
        assert!(convergence_study(&orbifold(), &[500, 1000, 3000], 3).is_err());
        let empty = convergence_study(&orbifold(), &[64, 128, 256], 0).unwrap();
        assert!(empty.extrapolated.is_empty());
    }

    #[test]
    fn reference_spectra() {
        assert_eq!(
            reference_spectrum(ReferenceFamily::Sphere { n: 2, radius: 1.0 }, 5).unwrap(),
            vec![0.0, 2.0, 6.0, 12.0, 20.0]
        );
        let half = reference_spectrum(ReferenceFamily::Sphere { n: 2, radius: 0.5 }, 2).unwrap();
        assert_eq!(half[1], 1.0 * 2.0 / 0.25);
        let interval = reference_spectrum(ReferenceFamily::Interval { length: PI }, 4).unwrap();
        assert!((interval[3] - 9.0).abs() < 1e-14);
        assert!(matches!(
            ReferenceFamily::from_token("torus", &[1.0]),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn fold_restriction_matches_base_operator() {
        let s = sphere(2, 1.0);
        let lift = covering_lift(&s, &CoveringDatum::standard(&s, 2).unwrap()).unwrap();
        let reduced = assemble(&lift, 400).unwrap().restrict_to_fold(lift.fold().unwrap()).unwrap();
        let base = assemble(&s, 200).unwrap();
        for (a, b) in reduced.matrix().diag().iter().zip(base.matrix().diag()) {
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
        for (a, b) in reduced.matrix().off().iter().zip(base.matrix().off()) {
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
        assert!(assemble(&lift, 401).unwrap().restrict_to_fold(lift.fold().unwrap()).is_err());
    }

    #[test]
    fn full_lift_spectrum_doubles_multiplicities() {
        // without restriction the two sheets decouple at the fold point
        let s = sphere(2, 1.0);
        let lift = covering_lift(&s, &CoveringDatum::standard(&s, 2).unwrap()).unwrap();
        let ev = assemble(&lift, 800).unwrap().eigenvalues(4);
        assert!(ev[0].abs() < 1e-8 && ev[1].abs() < 1e-8);
        assert!((ev[2] - 2.0).abs() < 1e-3 && (ev[3] - 2.0).abs() < 1e-3);
    }
}
