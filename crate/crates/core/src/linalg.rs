//! Dense exact linear algebra over Q: reduced echelon form, linear solves
//! and nullspace bases with fully deterministic pivoting.

use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> QMat {
        QMat {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> QMat {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        QMat { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduced row echelon form. Pivots are chosen by scanning
    /// columns left to right and taking the first nonzero row, so the result
    /// is deterministic. Returns the pivot columns in row order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pr = 0;
        for col in 0..self.cols {
            if pr == self.rows {
                break;
            }
            let mut found = None;
            for r in pr..self.rows {
                if !self.at(r, col).is_zero() {
                    found = Some(r);
                    break;
                }
            }
            let Some(r) = found else { continue };
            self.swap_rows(pr, r);
            let inv = self.at(pr, col).recip();
            for j in col..self.cols {
                let v = self.at(pr, j) * &inv;
                self.set(pr, j, v);
            }
            for r in 0..self.rows {
                if r == pr || self.at(r, col).is_zero() {
                    continue;
                }
                let factor = self.at(r, col).clone();
                for j in col..self.cols {
                    let v = self.at(r, j) - &(self.at(pr, j) * &factor);
                    self.set(r, j, v);
                }
            }
            pivots.push(col);
            pr += 1;
        }
        pivots
    }

    /// Basis of the right nullspace, one vector per free column in ascending
    /// column order, each with a 1 in its free coordinate.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for fc in 0..self.cols {
            if is_pivot[fc] {
                continue;
            }
            let mut v = vec![BigRational::zero(); self.cols];
            v[fc] = BigRational::one();
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.at(pr, fc).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One exact solution of `self * x = rhs` with free variables set to 0,
    /// or `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(rhs.len(), self.rows, "rhs length mismatch");
        let mut aug = QMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, rhs[i].clone());
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (pr, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(pr, self.cols).clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn rq(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn nullspace_of_rank_one_matrix() {
        let m = QMat::from_rows(vec![vec![r(1), r(2)], vec![r(2), r(4)]]);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![r(-2), r(1)]]);
    }

    #[test]
    fn nullspace_of_zero_matrix_is_standard_basis() {
        let m = QMat::zeros(2, 3);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 3);
        assert_eq!(ns[0], vec![r(1), r(0), r(0)]);
        assert_eq!(ns[1], vec![r(0), r(1), r(0)]);
        assert_eq!(ns[2], vec![r(0), r(0), r(1)]);
    }

    #[test]
    fn empty_row_matrix_has_full_nullspace() {
        let m = QMat::zeros(0, 2);
        assert_eq!(m.nullspace().len(), 2);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = QMat::from_rows(vec![vec![r(2), r(0)], vec![r(0), r(4)]]);
        let x = m.solve(&[r(1), r(1)]).unwrap();
        assert_eq!(x, vec![rq(1, 2), rq(1, 4)]);

        let s = QMat::from_rows(vec![vec![r(1), r(1)], vec![r(1), r(1)]]);
        assert!(s.solve(&[r(1), r(2)]).is_none());
        let x = s.solve(&[r(3), r(3)]).unwrap();
        assert_eq!(x, vec![r(3), r(0)]);
    }

    #[test]
    fn rref_is_idempotent_and_nullspace_annihilates() {
        let m = QMat::from_rows(vec![
            vec![r(1), r(2), r(3), r(1)],
            vec![r(2), r(4), r(7), r(0)],
            vec![r(0), r(0), r(1), r(-2)],
        ]);
        let mut a = m.clone();
        a.rref();
        let mut b = a.clone();
        b.rref();
        assert_eq!(a, b);
        for v in m.nullspace() {
            for i in 0..m.rows() {
                let mut acc = BigRational::zero();
                for j in 0..m.cols() {
                    acc += m.at(i, j) * &v[j];
                }
                assert!(acc.is_zero());
            }
        }
    }
}
