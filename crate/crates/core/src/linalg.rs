//! Dense Gaussian elimination with partial pivoting.
//!
//! MNA systems here are small (tens of unknowns), so a dense in-place solve
//! is both fast and simple. The solver reports *which column* produced a zero
//! pivot so callers can translate it into a named floating node or dangling
//! source branch.

/// Row-major dense matrix with a reusable allocation.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn clear(&mut self) {
        self.data.fill(0.0);
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] += value;
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }
}

/// Zero pivot at `column` while eliminating; the system is singular.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularColumn(pub usize);

/// Solve `a * x = rhs` in place, overwriting both. `rhs` holds the solution
/// on success. `a` is destroyed either way.
pub fn solve_in_place(a: &mut DenseMatrix, rhs: &mut [f64]) -> Result<(), SingularColumn> {
    let n = a.n;
    assert_eq!(rhs.len(), n);
    for col in 0..n {
        // Partial pivoting: largest magnitude in this column at or below the diagonal.
        let mut pivot_row = col;
        let mut pivot_mag = a.get(col, col).abs();
        for row in col + 1..n {
            let mag = a.get(row, col).abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag < 1e-300 {
            return Err(SingularColumn(col));
        }
        if pivot_row != col {
            for k in col..n {
                let idx_a = col * n + k;
                let idx_b = pivot_row * n + k;
                a.data.swap(idx_a, idx_b);
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = a.get(col, col);
        for row in col + 1..n {
            let factor = a.get(row, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a.get(col, k);
                a.data[row * n + k] -= factor * v;
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    // Back substitution.
    for col in (0..n).rev() {
        let mut sum = rhs[col];
        for (k, &r) in rhs.iter().enumerate().skip(col + 1) {
            sum -= a.get(col, k) * r;
        }
        rhs[col] = sum / a.get(col, col);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [2 1; 1 3] x = [3; 5] -> x = [4/5, 7/5]
        let mut a = DenseMatrix::zeros(2);
        a.add(0, 0, 2.0);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        a.add(1, 1, 3.0);
        let mut rhs = vec![3.0, 5.0];
        solve_in_place(&mut a, &mut rhs).unwrap();
        assert!((rhs[0] - 0.8).abs() < 1e-12);
        assert!((rhs[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let mut a = DenseMatrix::zeros(2);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        let mut rhs = vec![2.0, 3.0];
        solve_in_place(&mut a, &mut rhs).unwrap();
        assert!((rhs[0] - 3.0).abs() < 1e-12);
        assert!((rhs[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reports_singular_column() {
        let mut a = DenseMatrix::zeros(3);
        a.add(0, 0, 1.0);
        a.add(2, 2, 1.0);
        // Column 1 is entirely zero.
        let mut rhs = vec![1.0, 1.0, 1.0];
        assert_eq!(
            solve_in_place(&mut a, &mut rhs),
            Err(SingularColumn(1))
        );
    }

    #[test]
    fn random_systems_match_residual() {
        // xorshift so the test is self-contained and deterministic.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [1usize, 3, 8, 17] {
            let mut a = DenseMatrix::zeros(n);
            let mut saved = vec![0.0; n * n];
            for r in 0..n {
                for c in 0..n {
                    let v = next() * 10.0 + if r == c { 5.0 } else { 0.0 };
                    a.add(r, c, v);
                    saved[r * n + c] = v;
                }
            }
            let rhs_orig: Vec<f64> = (0..n).map(|_| next() * 4.0).collect();
            let mut rhs = rhs_orig.clone();
            solve_in_place(&mut a, &mut rhs).unwrap();
            for r in 0..n {
                let mut acc = 0.0;
                for c in 0..n {
                    acc += saved[r * n + c] * rhs[c];
                }
                assert!((acc - rhs_orig[r]).abs() < 1e-9, "n={n} row={r}");
            }
        }
    }
}
