//! Thomas algorithm for the tridiagonal systems assembled by the implicit
//! schemes.

use crate::error::{Error, Result};

/// A tridiagonal system of size n.
///
/// `lower` and `upper` hold the n − 1 sub- and super-diagonal entries, so row
/// i reads `lower[i-1]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || rhs.len() != n || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::InvalidParameter(format!(
                "inconsistent tridiagonal shapes: lower {}, diag {}, upper {}, rhs {}",
                lower.len(),
                n,
                upper.len(),
                rhs.len()
            )));
        }
        Ok(Self {
            lower,
            diag,
            upper,
            rhs,
        })
    }

    /// Constant-coefficient (Toeplitz) system.
    pub fn toeplitz(lower: f64, diag: f64, upper: f64, rhs: Vec<f64>) -> Self {
        let n = rhs.len();
        Self {
            lower: vec![lower; n.saturating_sub(1)],
            diag: vec![diag; n],
            upper: vec![upper; n.saturating_sub(1)],
            rhs,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Strict row diagonal dominance |diag_i| > |lower_i| + |upper_i|.
    pub fn is_diagonally_dominant(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let lo = if i > 0 { self.lower[i - 1].abs() } else { 0.0 };
            let up = if i + 1 < n { self.upper[i].abs() } else { 0.0 };
            self.diag[i].abs() > lo + up
        })
    }

    /// A·x, for residual checks.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let mut c_prime = vec![0.0; n];
        let mut x = vec![0.0; n];

        // forward elimination
        let mut pivot = self.diag[0];
        check_pivot(0, pivot, self.diag[0])?;
        if n > 1 {
            c_prime[0] = self.upper[0] / pivot;
        }
        x[0] = self.rhs[0] / pivot;
        for i in 1..n {
            let l = self.lower[i - 1];
            pivot = self.diag[i] - l * c_prime[i - 1];
            check_pivot(i, pivot, self.diag[i])?;
            if i + 1 < n {
                c_prime[i] = self.upper[i] / pivot;
            }
            x[i] = (self.rhs[i] - l * x[i - 1]) / pivot;
        }

        // back substitution
        for i in (0..n - 1).rev() {
            x[i] -= c_prime[i] * x[i + 1];
        }
        Ok(x)
    }
}

fn check_pivot(row: usize, pivot: f64, diag: f64) -> Result<()> {
    if !pivot.is_finite() || pivot.abs() <= 64.0 * f64::EPSILON * diag.abs().max(f64::MIN_POSITIVE) {
        Err(Error::SingularPivot { row, pivot })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(sys: &TridiagonalSystem) -> Vec<f64> {
        let n = sys.len();
        let mut a = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            a[i][i] = sys.diag[i];
            if i > 0 {
                a[i][i - 1] = sys.lower[i - 1];
            }
            if i + 1 < n {
                a[i][i + 1] = sys.upper[i];
            }
            a[i][n] = sys.rhs[i];
        }
        for col in 0..n {
            let p = (col..n)
                .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
                .unwrap();
            a.swap(col, p);
            for r in col + 1..n {
                let factor = a[r][col] / a[col][col];
                let (pivot, rest) = a.split_at_mut(r);
                for (x, y) in rest[0][col..].iter_mut().zip(&pivot[col][col..]) {
                    *x -= factor * y;
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (a[i][n] - s) / a[i][i];
        }
        x
    }

    fn random_dominant(rng: &mut ChaCha8Rng, n: usize) -> TridiagonalSystem {
        let lower: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let upper: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag = (0..n)
            .map(|i| {
                let lo = if i > 0 { lower[i - 1].abs() } else { 0.0 };
                let up = if i + 1 < n { upper[i].abs() } else { 0.0 };
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                sign * (lo + up + rng.gen_range(0.01..2.0))
            })
            .collect();
        let rhs = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        TridiagonalSystem::new(lower, diag, upper, rhs).unwrap()
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn identity() {
        let rhs = vec![1.0, -2.0, 3.5, 0.25];
        let sys = TridiagonalSystem::toeplitz(0.0, 1.0, 0.0, rhs.clone());
        assert_eq!(sys.solve().unwrap(), rhs);
    }

    #[test]
    fn three_by_three() {
        let sys = TridiagonalSystem::new(
            vec![-1.0, -1.0],
            vec![2.0, 2.0, 2.0],
            vec![-1.0, -1.0],
            vec![1.0, 0.0, 1.0],
        )
        .unwrap();
        let x = sys.solve().unwrap();
        let oracle = dense_solve(&sys);
        for (a, b) in x.iter().zip(&oracle) {
            assert!((a - 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_unknown() {
        let sys = TridiagonalSystem::new(vec![], vec![4.0], vec![], vec![2.0]).unwrap();
        assert_eq!(sys.solve().unwrap(), vec![0.5]);
    }

    #[test]
    fn random_fifty_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sys = random_dominant(&mut rng, 50);
        let x = sys.solve().unwrap();
        let ax = sys.apply(&x);
        let res: Vec<f64> = ax.iter().zip(&sys.rhs).map(|(a, b)| a - b).collect();
        assert!(max_abs(&res) <= 1e-12 * (max_abs(&sys.rhs) + max_abs(&x)));
    }

    #[test]
    fn matches_dense_oracle_up_to_512() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in [2, 5, 17, 64, 200, 512] {
            for _ in 0..5 {
                let sys = random_dominant(&mut rng, n);
                let x = sys.solve().unwrap();
                let oracle = dense_solve(&sys);
                let scale = max_abs(&oracle);
                for (a, b) in x.iter().zip(&oracle) {
                    assert!((a - b).abs() <= 1e-10 * scale, "n={n}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let sys = TridiagonalSystem::new(vec![1.0], vec![1.0, 1.0], vec![1.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(sys.solve(), Err(Error::SingularPivot { row: 1, .. })));
        let sys = TridiagonalSystem::new(vec![], vec![0.0], vec![], vec![1.0]).unwrap();
        assert!(matches!(sys.solve(), Err(Error::SingularPivot { row: 0, .. })));
    }

    #[test]
    fn shape_validation() {
        assert!(TridiagonalSystem::new(vec![1.0], vec![1.0], vec![], vec![1.0]).is_err());
        assert!(TridiagonalSystem::new(vec![], vec![], vec![], vec![]).is_err());
    }
}
