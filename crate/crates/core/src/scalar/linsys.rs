use serde::Serialize;

use super::{ParamSpace, Scalar};

/// Linear equations `sum_j coeffs[j] * x_j = rhs` over Q(params).
#[derive(Clone, Debug, Serialize)]
pub struct LinearSystem {
    #[serde(skip)]
    space: ParamSpace,
    pub unknowns: Vec<String>,
    pub rows: Vec<(Vec<Scalar>, Scalar)>,
}

/// Affine solution set `particular + span(kernel)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub particular: Vec<Scalar>,
    pub kernel: Vec<Vec<Scalar>>,
}

impl LinearSystem {
    pub fn new(space: &ParamSpace, unknowns: Vec<String>) -> Self {
        LinearSystem { space: space.clone(), unknowns, rows: Vec::new() }
    }

    pub fn space(&self) -> &ParamSpace {
        &self.space
    }

    pub fn push_row(&mut self, coeffs: Vec<Scalar>, rhs: Scalar) {
        assert_eq!(coeffs.len(), self.unknowns.len(), "row length must match the unknown count");
        self.rows.push((coeffs, rhs));
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rows.iter().all(|(_, r)| r.is_zero())
    }

    /// Row-reduces the augmented matrix in place; returns pivot columns.
    /// Pivots are chosen as the structurally simplest nonzero entry in the column.
    fn rref(&self, augmented: bool) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let n = self.unknowns.len();
        let width = if augmented { n + 1 } else { n };
        let mut m: Vec<Vec<Scalar>> = self
            .rows
            .iter()
            .map(|(c, r)| {
                let mut row = c.clone();
                if augmented {
                    row.push(r.clone());
                }
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..n {
            let best = (top..m.len())
                .filter(|&r| !m[r][col].is_zero())
                .min_by_key(|&r| m[r][col].complexity());
            let Some(p) = best else { continue };
            m.swap(top, p);
            let inv = m[top][col].inv().expect("pivot is nonzero");
            for j in 0..width {
                if !m[top][j].is_zero() {
                    m[top][j] = &m[top][j] * &inv;
                }
            }
            for r in 0..m.len() {
                if r == top || m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone();
                for j in 0..width {
                    if !m[top][j].is_zero() {
                        m[r][j] = &m[r][j] - &(&f * &m[top][j]);
                    }
                }
            }
            pivots.push(col);
            top += 1;
            if top == m.len() {
                break;
            }
        }
        (m, pivots)
    }

    fn kernel_from(&self, m: &[Vec<Scalar>], pivots: &[usize]) -> Vec<Vec<Scalar>> {
        let n = self.unknowns.len();
        let mut basis = Vec::new();
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Scalar::zero(&self.space); n];
            v[free] = Scalar::one(&self.space);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[row][free];
            }
            basis.push(v);
        }
        basis
    }

    /// Basis of the solution space of the homogeneous part (right-hand sides are ignored).
    /// Empty iff only the zero vector solves it.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (m, pivots) = self.rref(false);
        self.kernel_from(&m, &pivots)
    }

    /// Full affine solution; `None` when inconsistent.
    pub fn solve(&self) -> Option<Solution> {
        let n = self.unknowns.len();
        let (m, pivots) = self.rref(true);
        // a row with zero coefficients and nonzero rhs means no solution
        for row in m.iter().skip(pivots.len()) {
            if !row[n].is_zero() {
                return None;
            }
        }
        let mut particular = vec![Scalar::zero(&self.space); n];
        for (row, &pc) in pivots.iter().enumerate() {
            particular[pc] = m[row][n].clone();
        }
        Some(Solution { particular, kernel: self.kernel_from(&m, &pivots) })
    }

    /// Left-hand side minus right-hand side for each row at `x`.
    pub fn residuals(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.rows
            .iter()
            .map(|(c, r)| {
                let lhs = c.iter().zip(x).fold(Scalar::zero(&self.space), |acc, (a, b)| acc + a * b);
                lhs - r
            })
            .collect()
    }
}
