//! Exact finishing steps for the numeric square search: continued-fraction
//! rationalization, positive semidefinite factorization over the rationals,
//! and four-square decompositions of integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::QMat;

/// Best rational approximation of `x` with denominator at most `max_den`,
/// through its continued fraction.
pub(crate) fn rationalize(x: f64, max_den: u64) -> BigRational {
    if !x.is_finite() || x.abs() > 1e15 {
        return BigRational::zero();
    }
    let negative = x < 0.0;
    let ax = x.abs();
    let a0 = ax.floor();
    let mut pm = BigInt::one();
    let mut qm = BigInt::zero();
    let mut p = BigInt::from(a0 as i64);
    let mut q = BigInt::one();
    let mut frac = ax - a0;
    let cap = BigInt::from(max_den);
    for _ in 0..64 {
        if frac < 1e-12 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if a > 9e15 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p_next = &ai * &p + &pm;
        let q_next = &ai * &q + &qm;
        if q_next > cap {
            break;
        }
        pm = std::mem::replace(&mut p, p_next);
        qm = std::mem::replace(&mut q, q_next);
        frac = inv - a;
    }
    let r = BigRational::new(p, q);
    if negative {
        -r
    } else {
        r
    }
}

/// Unit lower-triangular factorization Q = L D L^T over the rationals,
/// returned as pivots paired with their columns of L. `None` when Q is not
/// positive semidefinite: a negative pivot, or a nonzero entry below a zero
/// pivot, rejects.
pub(crate) fn ldl(q: &QMat) -> Option<Vec<(BigRational, Vec<BigRational>)>> {
    let n = q.rows();
    assert_eq!(q.cols(), n, "factorization needs a square matrix");
    let mut l = vec![vec![BigRational::zero(); n]; n];
    let mut d = vec![BigRational::zero(); n];
    for j in 0..n {
        let mut dj = q.at(j, j).clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if dj.is_negative() {
            return None;
        }
        l[j][j] = BigRational::one();
        d[j] = dj;
        for i in (j + 1)..n {
            let mut c = q.at(i, j).clone();
            for k in 0..j {
                c -= &l[i][k] * &l[j][k] * &d[k];
            }
            if d[j].is_zero() {
                if !c.is_zero() {
                    return None;
                }
            } else {
                l[i][j] = c / &d[j];
            }
        }
    }
    Some(
        (0..n)
            .map(|j| (d[j].clone(), (0..n).map(|i| l[i][j].clone()).collect()))
            .collect(),
    )
}

fn strip_fours(n: &BigInt) -> BigInt {
    let four = BigInt::from(4);
    let mut m = n.clone();
    while !m.is_zero() && (&m % &four).is_zero() {
        m /= &four;
    }
    m
}

// 4^e (8t + 7) is never a sum of three squares.
fn three_square_obstruction(n: &BigInt) -> bool {
    &strip_fours(n) % BigInt::from(8) == BigInt::from(7)
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

fn two_squares(n: &BigInt, budget: usize, steps: &mut usize) -> Option<[BigInt; 2]> {
    let mut c = n.sqrt();
    while !c.is_negative() {
        *steps += 1;
        if *steps > budget {
            return None;
        }
        let rest = n - &c * &c;
        if let Some(e) = exact_sqrt(&rest) {
            return Some([c, e]);
        }
        c -= 1;
    }
    None
}

fn three_squares(n: &BigInt, budget: usize, steps: &mut usize) -> Option<[BigInt; 3]> {
    let mut b = n.sqrt();
    while !b.is_negative() {
        *steps += 1;
        if *steps > budget {
            return None;
        }
        let rest = n - &b * &b;
        if !three_square_obstruction(&rest) {
            if let Some([c, e]) = two_squares(&rest, budget, steps) {
                return Some([b, c, e]);
            }
        }
        b -= 1;
    }
    None
}

/// Writes a nonnegative integer as a sum of four squares, searching from the
/// integer square root downward under a step budget.
pub(crate) fn four_squares(n: &BigInt, budget: usize) -> Option<[BigInt; 4]> {
    assert!(!n.is_negative(), "four squares needs a nonnegative input");
    if n.is_zero() {
        return Some([
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
        ]);
    }
    // Powers of four scale out of every square cleanly.
    let four = BigInt::from(4);
    let mut scale = BigInt::one();
    let mut m = n.clone();
    while (&m % &four).is_zero() {
        m /= &four;
        scale *= BigInt::from(2);
    }
    let mut steps = 0usize;
    let mut a = m.sqrt();
    while !a.is_negative() {
        steps += 1;
        if steps > budget {
            return None;
        }
        let rest = &m - &a * &a;
        if !three_square_obstruction(&rest) {
            if let Some([b, c, e]) = three_squares(&rest, budget, &mut steps) {
                return Some([&a * &scale, b * &scale, c * &scale, e * &scale]);
            }
        }
        a -= 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.25, 100), rat(1, 4));
        assert_eq!(rationalize(1.0 / 3.0, 10), rat(1, 3));
        assert_eq!(rationalize(-0.5, 8), rat(-1, 2));
        assert_eq!(rationalize(0.0, 8), rat(0, 1));
        assert_eq!(rationalize(std::f64::consts::PI, 100), rat(22, 7));
        assert_eq!(rationalize(3.0, 1), rat(3, 1));
    }

    #[test]
    fn ldl_detects_definiteness() {
        let psd = QMat::from_rows(vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(2, 1)],
        ]);
        let fact = ldl(&psd).unwrap();
        assert_eq!(fact[0].0, rat(2, 1));
        assert_eq!(fact[1].0, rat(3, 2));

        let indefinite = QMat::from_rows(vec![
            vec![rat(1, 1), rat(2, 1)],
            vec![rat(2, 1), rat(1, 1)],
        ]);
        assert!(ldl(&indefinite).is_none());

        let singular_psd = QMat::from_rows(vec![
            vec![rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1)],
        ]);
        let fact = ldl(&singular_psd).unwrap();
        assert_eq!(fact[0].0, rat(0, 1));
        assert_eq!(fact[1].0, rat(1, 1));

        let zero_pivot_nonzero_column = QMat::from_rows(vec![
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(1, 1), rat(0, 1)],
        ]);
        assert!(ldl(&zero_pivot_nonzero_column).is_none());
    }

    #[test]
    fn ldl_reconstructs_the_input() {
        let q = QMat::from_rows(vec![
            vec![rat(4, 1), rat(2, 1), rat(0, 1)],
            vec![rat(2, 1), rat(5, 1), rat(3, 1)],
            vec![rat(0, 1), rat(3, 1), rat(6, 1)],
        ]);
        let fact = ldl(&q).unwrap();
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let mut acc = rat(0, 1);
                for (d, col) in &fact {
                    acc += &col[i] * &col[j] * d;
                }
                assert_eq!(&acc, q.at(i, j));
            }
        }
    }

    #[test]
    fn four_squares_split_checks_out() {
        for n in [0i64, 1, 2, 3, 7, 15, 28, 48, 1000, 123456789, 999999937] {
            let big = BigInt::from(n);
            let parts = four_squares(&big, 200_000).unwrap();
            let sum: BigInt = parts.iter().map(|p| p * p).sum();
            assert_eq!(sum, big, "failed for {}", n);
        }
    }
}
