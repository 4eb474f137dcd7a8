//! Symmetric tridiagonal eigensolver: bisection on Sturm counts for the
//! lowest eigenvalues, inverse iteration for their eigenvectors.

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off` holds the single shared sub/super-diagonal.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x`, from the signs of the
    /// `LDLᵀ` pivots of `T − xI`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.norm_bound().max(1.0);
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e = self.off[i - 1];
            q = (self.diag[i] - x) - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k` lowest eigenvalues in ascending order, each bracketed to
    /// roughly machine precision relative to `‖T‖`.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let k = k.min(self.len());
        let (glo, ghi) = self.gershgorin();
        let width = 4.0 * f64::EPSILON * self.norm_bound();
        let mut out = Vec::with_capacity(k);
        let mut floor = glo - width;
        for j in 0..k {
            let mut lo = floor;
            let mut hi = ghi + width;
            for _ in 0..256 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= width || mid <= lo || mid >= hi {
                    break;
                }
                if self.sturm_count(mid) <= j {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let value = 0.5 * (lo + hi);
            out.push(value);
            floor = lo;
        }
        out
    }

    /// Unit eigenvector for the eigenvalue nearest `shift`.
    pub fn inverse_iteration(&self, shift: f64, steps: usize) -> Vec<f64> {
        let n = self.len();
        let lu = ShiftedLu::factor(self, shift);
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_895).sin())
            .collect();
        normalize(&mut x);
        for _ in 0..steps.max(1) {
            lu.solve(&mut x);
            normalize(&mut x);
        }
        x
    }
}

fn normalize(x: &mut [f64]) {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return;
    }
    let norm = x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt() * scale;
    let sign = if x.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    x.iter_mut().for_each(|v| *v *= sign / norm);
}

/// `LU` factorisation of `T − σI` with partial pivoting (one extra
/// superdiagonal from row swaps). Tiny pivots are replaced so that nearly
/// singular shifts, the whole point of inverse iteration, stay solvable.
struct ShiftedLu {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.len();
        let mut lower = t.off.clone();
        let mut diag: Vec<f64> = t.diag.iter().map(|d| d - shift).collect();
        let mut upper = t.off.clone();
        let mut upper2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if diag[i].abs() >= lower[i].abs() {
                if diag[i] != 0.0 {
                    let fact = lower[i] / diag[i];
                    lower[i] = fact;
                    diag[i + 1] -= fact * upper[i];
                }
            } else {
                let fact = diag[i] / lower[i];
                diag[i] = lower[i];
                lower[i] = fact;
                let temp = upper[i];
                upper[i] = diag[i + 1];
                diag[i + 1] = temp - fact * diag[i + 1];
                if i + 2 < n {
                    upper2[i] = upper[i + 1];
                    upper[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let tiny = f64::EPSILON * t.norm_bound();
        for d in diag.iter_mut() {
            if d.abs() < tiny {
                *d = if *d < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            lower,
            diag,
            upper,
            upper2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.lower[i] * b[i];
            } else {
                b[i + 1] -= self.lower[i] * b[i];
            }
        }
        b[n - 1] /= self.diag[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.upper[n - 2] * b[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.upper[i] * b[i + 1] - self.upper2[i] * b[i + 2]) / self.diag[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn chain(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn sturm_count_two_by_two() {
        // eigenvalues (5 ± √5)/2 ≈ 1.382, 3.618
        let t = SymTridiagonal::new(vec![2.0, 3.0], vec![-1.0]);
        assert_eq!(t.sturm_count(0.0), 0);
        assert_eq!(t.sturm_count(2.0), 1);
        assert_eq!(t.sturm_count(4.0), 2);
    }

    #[test]
    fn dirichlet_chain_eigenvalues() {
        let n = 100;
        let t = chain(n);
        let got = t.lowest_eigenvalues(10);
        for (j, g) in got.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((g - exact).abs() < 1e-13, "j={j}: {g} vs {exact}");
        }
    }

    #[test]
    fn inverse_iteration_recovers_sine_modes() {
        let n = 64;
        let t = chain(n);
        let lambda = t.lowest_eigenvalues(3)[2];
        let v = t.inverse_iteration(lambda, 3);
        let scale = (2.0 / (n + 1) as f64).sqrt();
        let sign = v[0].signum();
        for (i, vi) in v.iter().enumerate() {
            let exact = scale * (3.0 * (i + 1) as f64 * PI / (n + 1) as f64).sin();
            assert!((vi * sign - exact).abs() < 1e-10);
        }
        let r: f64 = t
            .apply(&v)
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).abs())
            .fold(0.0, f64::max);
        assert!(r < 1e-12);
    }

    #[test]
    fn pivoted_solve_matches_dense_residual() {
        // indefinite shift forces row swaps
        let t = SymTridiagonal::new(vec![0.1, -3.0, 2.0, 0.5, 1.0], vec![4.0, 0.2, -5.0, 1.5]);
        let lu = ShiftedLu::factor(&t, 0.3);
        let b = vec![1.0, -2.0, 0.5, 3.0, -1.0];
        let mut x = b.clone();
        lu.solve(&mut x);
        let tx = t.apply(&x);
        for i in 0..5 {
            assert!((tx[i] - 0.3 * x[i] - b[i]).abs() < 1e-12);
        }
    }
}
