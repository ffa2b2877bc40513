//! Exact integer linear algebra: Smith normal form with a tracked left
//! transform, Bareiss determinants, and the divisor-class keys built on them.

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = x as i128;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul_vec(&self, x: &[i128]) -> Vec<i128> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i128) {
        if k != 0 {
            for j in 0..self.cols {
                let v = self[(src, j)];
                self[(dst, j)] += k * v;
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i128) {
        if k != 0 {
            for i in 0..self.rows {
                let v = self[(i, src)];
                self[(i, dst)] += k * v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// `left * input * (some unimodular right factor) = diag(factors, 0, ...)`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    /// Unimodular row transform.
    pub left: IntMatrix,
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub factors: Vec<i128>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Whether `x` lies in the integer column span of the decomposed matrix.
    pub fn in_column_span(&self, x: &[i128]) -> bool {
        let y = self.left.mul_vec(x);
        y.iter()
            .enumerate()
            .all(|(i, &yi)| match self.factors.get(i) {
                Some(&d) => yi % d == 0,
                None => yi == 0,
            })
    }
}

pub fn smith_normal_form(input: &IntMatrix) -> SmithForm {
    let mut a = input.clone();
    let mut left = IntMatrix::identity(a.rows);
    let (m, n) = (a.rows, a.cols);
    let mut factors = Vec::new();
    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block
        let pivot = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| a[(i, j)] != 0)
            .min_by_key(|&(i, j)| a[(i, j)].abs());
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(t, pi);
        left.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                let q = a[(i, t)].div_euclid(a[(t, t)]);
                a.add_row(i, t, -q);
                left.add_row(i, t, -q);
                if a[(i, t)] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                let q = a[(t, j)].div_euclid(a[(t, t)]);
                a.add_col(j, t, -q);
                if a[(t, j)] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // row and column cleared; enforce divisibility of the rest
                let p = a[(t, t)];
                let offender = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| a[(i, j)] % p != 0);
                match offender {
                    None => break,
                    Some((i, _)) => {
                        a.add_row(t, i, 1);
                        left.add_row(t, i, 1);
                        continue;
                    }
                }
            }
            // move the smallest remaining entry of row/column t onto the pivot
            let mut best = (t, t);
            for i in t..m {
                if a[(i, t)] != 0 && a[(i, t)].abs() < a[best].abs() {
                    best = (i, t);
                }
            }
            for j in t..n {
                if a[(t, j)] != 0 && a[(t, j)].abs() < a[best].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap_rows(t, best.0);
                left.swap_rows(t, best.0);
            } else if best.1 != t {
                a.swap_cols(t, best.1);
            }
        }
        if a[(t, t)] < 0 {
            a.negate_row(t);
            left.negate_row(t);
        }
        factors.push(a[(t, t)]);
    }
    SmithForm { left, factors }
}

/// Determinant by fraction-free Gaussian elimination.
pub fn determinant(input: &IntMatrix) -> i128 {
    assert_eq!(input.rows, input.cols, "determinant of a non-square matrix");
    let n = input.rows;
    if n == 0 {
        return 1;
    }
    let mut a = input.clone();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[(k, k)] == 0 {
            match (k + 1..n).find(|&i| a[(i, k)] != 0) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[(i, j)] = (a[(i, j)] * a[(k, k)] - a[(i, k)] * a[(k, j)]) / prev;
            }
        }
        prev = a[(k, k)];
    }
    sign * a[(n - 1, n - 1)]
}

/// Identifies a linear-equivalence class: degree plus coordinates in the
/// cyclic factors of the degree-zero class group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassKey {
    pub degree: i64,
    pub residues: Vec<i64>,
}

/// Class-group coordinates for one graph, computed from the Smith form of the
/// Laplacian with the row and column of a base vertex deleted.
#[derive(Debug, Clone)]
pub struct ClassLattice {
    base: usize,
    vertex_count: usize,
    smith: SmithForm,
    nontrivial: Vec<usize>,
}

impl ClassLattice {
    /// `laplacian` must be the full `n x n` Laplacian of a connected graph.
    pub fn new(laplacian: &[Vec<i64>], base: usize) -> Result<Self> {
        let n = laplacian.len();
        if base >= n {
            return Err(Error::BadBaseVertex(format!("#{base}")));
        }
        let keep: Vec<usize> = (0..n).filter(|&v| v != base).collect();
        let rows: Vec<Vec<i64>> = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| laplacian[i][j]).collect())
            .collect();
        let reduced = if keep.is_empty() {
            IntMatrix::zeros(0, 0)
        } else {
            IntMatrix::from_rows(&rows)
        };
        let smith = smith_normal_form(&reduced);
        if smith.rank() != keep.len() {
            return Err(Error::Parse(
                "reduced Laplacian is singular; graph disconnected".into(),
            ));
        }
        let nontrivial = (0..smith.factors.len())
            .filter(|&i| smith.factors[i] > 1)
            .collect();
        Ok(ClassLattice {
            base,
            vertex_count: n,
            smith,
            nontrivial,
        })
    }

    /// Invariant factors of the degree-zero class group (entries > 1).
    pub fn invariant_factors(&self) -> Vec<i64> {
        self.nontrivial
            .iter()
            .map(|&i| self.smith.factors[i] as i64)
            .collect()
    }

    /// Number of degree-zero classes.
    pub fn order(&self) -> i128 {
        self.smith.factors.iter().product()
    }

    fn reduced_coords(&self, coeffs: &[i64]) -> Vec<i128> {
        assert_eq!(coeffs.len(), self.vertex_count);
        (0..self.vertex_count)
            .filter(|&v| v != self.base)
            .map(|v| coeffs[v] as i128)
            .collect()
    }

    /// Whether a degree-zero coefficient vector lies in the Laplacian lattice.
    pub fn is_principal(&self, coeffs: &[i64]) -> bool {
        coeffs.iter().sum::<i64>() == 0 && self.smith.in_column_span(&self.reduced_coords(coeffs))
    }

    pub fn class_of(&self, coeffs: &[i64]) -> ClassKey {
        let y = self.smith.left.mul_vec(&self.reduced_coords(coeffs));
        ClassKey {
            degree: coeffs.iter().sum(),
            residues: self
                .nontrivial
                .iter()
                .map(|&i| y[i].rem_euclid(self.smith.factors[i]) as i64)
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_of_triangle_reduced_laplacian() {
        let m = IntMatrix::from_rows(&[vec![2, -1], vec![-1, 2]]);
        assert_eq!(smith_normal_form(&m).factors, vec![1, 3]);
        assert_eq!(determinant(&m), 3);
    }

    #[test]
    fn smith_factors_divide() {
        let m = IntMatrix::from_rows(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]]);
        assert_eq!(smith_normal_form(&m).factors, vec![1, 2, 12]);
        let singular = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        let s = smith_normal_form(&singular);
        assert_eq!(s.factors, vec![1]);
        assert!(s.in_column_span(&[3, 6]));
        assert!(!s.in_column_span(&[3, 5]));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = IntMatrix::from_rows(&[vec![0, 2, 1], vec![3, -1, 4], vec![5, 2, 0]]);
        // 0*(0-8) - 2*(0-20) + 1*(6+5)
        assert_eq!(determinant(&m), 51);
        assert_eq!(determinant(&IntMatrix::zeros(0, 0)), 1);
    }

    #[test]
    fn class_keys_of_triangle() {
        let lap = vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]];
        let lat = ClassLattice::new(&lap, 0).unwrap();
        assert_eq!(lat.invariant_factors(), vec![3]);
        assert!(lat.is_principal(&[-2, 1, 1]));
        assert!(!lat.is_principal(&[-1, 1, 0]));
        assert_eq!(lat.class_of(&[0, 2, 0]), lat.class_of(&[1, 0, 1]));
        assert_ne!(lat.class_of(&[1, 0, 0]), lat.class_of(&[0, 1, 0]));
    }
}
