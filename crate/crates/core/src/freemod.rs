//! Vectors in the free module R^n and square matrix polynomials over
//! R = Q[x1..xd], with the outer-product tensor that ties the two together.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::poly::{check_same_ctx, Context, Poly};

/// Element of R^n; the rank is always at least 1.
#[derive(Clone, PartialEq, Eq)]
pub struct ModVec {
    entries: Vec<Poly>,
}

impl ModVec {
    pub fn new(entries: Vec<Poly>) -> ModVec {
        assert!(!entries.is_empty(), "rank must be at least 1");
        for w in entries.windows(2) {
            check_same_ctx(w[0].ctx(), w[1].ctx());
        }
        ModVec { entries }
    }

    pub fn zero(ctx: &Arc<Context>, rank: usize) -> ModVec {
        ModVec::new(vec![Poly::zero(ctx); rank])
    }

    /// Standard basis vector `e_j` (0-based).
    pub fn basis(ctx: &Arc<Context>, rank: usize, j: usize) -> ModVec {
        assert!(j < rank, "basis index out of range");
        let mut entries = vec![Poly::zero(ctx); rank];
        entries[j] = Poly::one(ctx);
        ModVec::new(entries)
    }

    pub fn ctx(&self) -> &Arc<Context> {
        self.entries[0].ctx()
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, j: usize) -> &Poly {
        &self.entries[j]
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn scale(&self, p: &Poly) -> ModVec {
        ModVec::new(self.entries.iter().map(|e| e * p).collect())
    }

    pub fn scale_rat(&self, c: &BigRational) -> ModVec {
        ModVec::new(self.entries.iter().map(|e| e.scale(c)).collect())
    }

    /// Multiplies every coordinate by a single term.
    pub fn mul_term(&self, mono: &crate::poly::Monomial, coeff: &BigRational) -> ModVec {
        ModVec::new(self.entries.iter().map(|e| e.mul_term(mono, coeff)).collect())
    }

    /// Maximum total degree over the coordinates, `None` when zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(Poly::total_degree).max()
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Vec<BigRational> {
        self.entries.iter().map(|e| e.evaluate(point)).collect()
    }

    /// `<self(point), u>` over Q.
    pub fn pair_at(&self, point: &[BigRational], u: &[BigRational]) -> BigRational {
        assert_eq!(u.len(), self.rank(), "vector length mismatch");
        let vals = self.evaluate(point);
        let mut acc = BigRational::zero();
        for (v, c) in vals.iter().zip(u) {
            acc += v * c;
        }
        acc
    }

    /// Outer product: entry (i, j) is `self_i * other_j`.
    pub fn tensor(&self, other: &ModVec) -> MatPoly {
        assert_eq!(self.rank(), other.rank(), "rank mismatch in tensor");
        check_same_ctx(self.ctx(), other.ctx());
        let n = self.rank();
        let rows = (0..n)
            .map(|i| ModVec::new((0..n).map(|j| &self.entries[i] * &other.entries[j]).collect()))
            .collect();
        MatPoly { n, rows }
    }

    /// Inserts a zero coordinate at position `l` (0-based), raising the rank
    /// by one. `embed` is the `l = 0` case.
    pub fn insert_zero(&self, l: usize) -> ModVec {
        assert!(l <= self.rank(), "insert position out of range");
        let mut entries = Vec::with_capacity(self.rank() + 1);
        entries.extend_from_slice(&self.entries[..l]);
        entries.push(Poly::zero(self.ctx()));
        entries.extend_from_slice(&self.entries[l..]);
        ModVec::new(entries)
    }

    /// Natural embedding of R^(n-1) into the last n-1 coordinates of R^n.
    pub fn embed(&self) -> ModVec {
        self.insert_zero(0)
    }

    /// Drops coordinate `l`, lowering the rank by one.
    pub fn remove_coord(&self, l: usize) -> ModVec {
        assert!(self.rank() >= 2, "cannot drop below rank 1");
        assert!(l < self.rank(), "coordinate out of range");
        let mut entries = Vec::with_capacity(self.rank() - 1);
        for (j, e) in self.entries.iter().enumerate() {
            if j != l {
                entries.push(e.clone());
            }
        }
        ModVec::new(entries)
    }
}

impl std::ops::Add for &ModVec {
    type Output = ModVec;
    fn add(self, rhs: &ModVec) -> ModVec {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        ModVec::new(
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl std::ops::Sub for &ModVec {
    type Output = ModVec;
    fn sub(self, rhs: &ModVec) -> ModVec {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        ModVec::new(
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl std::ops::Neg for &ModVec {
    type Output = ModVec;
    fn neg(self) -> ModVec {
        ModVec::new(self.entries.iter().map(|e| -e).collect())
    }
}

impl fmt::Display for ModVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for ModVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModVec{self}")
    }
}

/// Square matrix with polynomial entries, stored by rows.
#[derive(Clone, PartialEq, Eq)]
pub struct MatPoly {
    n: usize,
    rows: Vec<ModVec>,
}

impl MatPoly {
    pub fn from_rows(rows: Vec<ModVec>) -> MatPoly {
        let n = rows.len();
        assert!(n >= 1, "matrix size must be at least 1");
        for r in &rows {
            assert_eq!(r.rank(), n, "matrix must be square");
            check_same_ctx(rows[0].ctx(), r.ctx());
        }
        MatPoly { n, rows }
    }

    pub fn zero(ctx: &Arc<Context>, n: usize) -> MatPoly {
        MatPoly::from_rows(vec![ModVec::zero(ctx, n); n])
    }

    pub fn identity(ctx: &Arc<Context>, n: usize) -> MatPoly {
        MatPoly::from_rows((0..n).map(|i| ModVec::basis(ctx, n, i)).collect())
    }

    pub fn ctx(&self) -> &Arc<Context> {
        self.rows[0].ctx()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &ModVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[ModVec] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        self.rows[i].entry(j)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(ModVec::is_zero)
    }

    pub fn transpose(&self) -> MatPoly {
        let n = self.n;
        MatPoly::from_rows(
            (0..n)
                .map(|j| ModVec::new((0..n).map(|i| self.entry(i, j).clone()).collect()))
                .collect(),
        )
    }

    pub fn matmul(&self, other: &MatPoly) -> MatPoly {
        assert_eq!(self.n, other.n, "size mismatch in matmul");
        check_same_ctx(self.ctx(), other.ctx());
        let n = self.n;
        let ctx = self.ctx().clone();
        MatPoly::from_rows(
            (0..n)
                .map(|i| {
                    ModVec::new(
                        (0..n)
                            .map(|j| {
                                let mut acc = Poly::zero(&ctx);
                                for k in 0..n {
                                    acc = &acc + &(self.entry(i, k) * other.entry(k, j));
                                }
                                acc
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn scale(&self, p: &Poly) -> MatPoly {
        MatPoly::from_rows(self.rows.iter().map(|r| r.scale(p)).collect())
    }

    /// Row-major flattening into R^(n^2): entry (i, j) lands at i*n + j.
    pub fn flatten(&self) -> ModVec {
        let mut entries = Vec::with_capacity(self.n * self.n);
        for r in &self.rows {
            entries.extend_from_slice(r.entries());
        }
        ModVec::new(entries)
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Vec<Vec<BigRational>> {
        self.rows.iter().map(|r| r.evaluate(point)).collect()
    }

    /// `self(point) * u` over Q.
    pub fn apply(&self, point: &[BigRational], u: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(u.len(), self.n, "vector length mismatch");
        self.evaluate(point)
            .into_iter()
            .map(|row| {
                let mut acc = BigRational::zero();
                for (v, c) in row.iter().zip(u) {
                    acc += v * c;
                }
                acc
            })
            .collect()
    }
}

impl std::ops::Add for &MatPoly {
    type Output = MatPoly;
    fn add(self, rhs: &MatPoly) -> MatPoly {
        assert_eq!(self.n, rhs.n, "size mismatch");
        MatPoly::from_rows(
            self.rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl std::ops::Sub for &MatPoly {
    type Output = MatPoly;
    fn sub(self, rhs: &MatPoly) -> MatPoly {
        assert_eq!(self.n, rhs.n, "size mismatch");
        MatPoly::from_rows(
            self.rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl fmt::Display for MatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for MatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatPoly{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonomialOrder;
    use proptest::prelude::*;

    fn ctx2() -> Arc<Context> {
        Context::new(2, MonomialOrder::GrevLex)
    }

    fn vecp(ctx: &Arc<Context>, entries: &[&str]) -> ModVec {
        ModVec::new(entries.iter().map(|s| Poly::parse(ctx, s).unwrap()).collect())
    }

    #[test]
    fn tensor_of_witness_and_generator() {
        let ctx = ctx2();
        let r1 = vecp(&ctx, &["1/4*x1 - 1/4*x2", "0"]);
        let g1 = vecp(&ctx, &["x1", "x1 + x2"]);
        let t = r1.tensor(&g1);
        assert_eq!(
            t.entry(0, 0),
            &Poly::parse(&ctx, "1/4*x1^2 - 1/4*x1*x2").unwrap()
        );
        assert_eq!(
            t.entry(0, 1),
            &Poly::parse(&ctx, "1/4*x1^2 - 1/4*x2^2").unwrap()
        );
        assert!(t.entry(1, 0).is_zero());
        assert!(t.entry(1, 1).is_zero());
    }

    #[test]
    fn transpose_swaps_tensor_factors() {
        let ctx = ctx2();
        let a = vecp(&ctx, &["x1", "x2 - 1"]);
        let b = vecp(&ctx, &["x1 + x2", "2"]);
        assert_eq!(a.tensor(&b).transpose(), b.tensor(&a));
    }

    #[test]
    fn flatten_is_row_major() {
        let ctx = ctx2();
        let a = vecp(&ctx, &["1", "x1"]);
        let b = vecp(&ctx, &["x2", "3"]);
        let flat = a.tensor(&b).flatten();
        assert_eq!(flat.rank(), 4);
        assert_eq!(flat.entry(0), &Poly::parse(&ctx, "x2").unwrap());
        assert_eq!(flat.entry(1), &Poly::parse(&ctx, "3").unwrap());
        assert_eq!(flat.entry(2), &Poly::parse(&ctx, "x1*x2").unwrap());
        assert_eq!(flat.entry(3), &Poly::parse(&ctx, "3*x1").unwrap());
    }

    #[test]
    fn embed_and_insert_zero() {
        let ctx = ctx2();
        let v = vecp(&ctx, &["x1", "x2"]);
        let e = v.embed();
        assert_eq!(e, vecp(&ctx, &["0", "x1", "x2"]));
        assert_eq!(v.insert_zero(1), vecp(&ctx, &["x1", "0", "x2"]));
        assert_eq!(v.insert_zero(2), vecp(&ctx, &["x1", "x2", "0"]));
        assert_eq!(e.remove_coord(0), v);
    }

    #[test]
    fn matmul_against_identity_and_composition() {
        let ctx = ctx2();
        let m = MatPoly::from_rows(vec![
            vecp(&ctx, &["x1", "1"]),
            vecp(&ctx, &["0", "x2"]),
        ]);
        let id = MatPoly::identity(&ctx, 2);
        assert_eq!(m.matmul(&id), m);
        assert_eq!(id.matmul(&m), m);
        let sq = m.matmul(&m);
        assert_eq!(sq.entry(0, 0), &Poly::parse(&ctx, "x1^2").unwrap());
        assert_eq!(sq.entry(0, 1), &Poly::parse(&ctx, "x1 + x2").unwrap());
        assert_eq!(sq.entry(1, 1), &Poly::parse(&ctx, "x2^2").unwrap());
    }

    #[test]
    fn apply_evaluates_then_multiplies() {
        let ctx = ctx2();
        let m = MatPoly::from_rows(vec![
            vecp(&ctx, &["0", "0"]),
            vecp(&ctx, &["0", "1"]),
        ]);
        let r = |n: i64| BigRational::from_integer(n.into());
        let out = m.apply(&[r(0), r(0)], &[r(0), r(1)]);
        assert_eq!(out, vec![r(0), r(1)]);
    }

    fn arb_rational() -> impl Strategy<Value = BigRational> {
        (-5i64..=5, 1i64..=3).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
    }

    fn arb_vec(ctx: Arc<Context>, rank: usize) -> impl Strategy<Value = ModVec> {
        let d = ctx.vars();
        proptest::collection::vec(
            proptest::collection::vec(
                (proptest::collection::vec(0u32..=2, d), arb_rational()),
                0..4,
            ),
            rank,
        )
        .prop_map(move |rows| {
            ModVec::new(
                rows.into_iter()
                    .map(|pairs| {
                        Poly::from_pairs(
                            &ctx,
                            pairs
                                .into_iter()
                                .map(|(e, c)| (crate::poly::Monomial::from_exponents(e), c))
                                .collect(),
                        )
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn tensor_is_bilinear(
            (a, b, c) in (arb_vec(ctx2(), 2), arb_vec(ctx2(), 2), arb_vec(ctx2(), 2)),
            q in arb_rational(),
        ) {
            let left = (&a + &b).tensor(&c);
            let split = &a.tensor(&c) + &b.tensor(&c);
            prop_assert_eq!(left, split);
            let right = c.tensor(&(&a + &b));
            let split = &c.tensor(&a) + &c.tensor(&b);
            prop_assert_eq!(right, split);
            prop_assert_eq!(a.scale_rat(&q).tensor(&c), c.tensor(&a.scale_rat(&q)).transpose());
        }

        #[test]
        fn tensor_evaluation_is_outer_product(
            (a, b) in (arb_vec(ctx2(), 2), arb_vec(ctx2(), 2)),
            pt in proptest::collection::vec(arb_rational(), 2),
        ) {
            let t = a.tensor(&b);
            let av = a.evaluate(&pt);
            let bv = b.evaluate(&pt);
            let tv = t.evaluate(&pt);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert_eq!(&tv[i][j], &(&av[i] * &bv[j]));
                }
            }
        }

        #[test]
        fn embedding_is_injective_and_linear(
            (a, b) in (arb_vec(ctx2(), 2), arb_vec(ctx2(), 2)),
        ) {
            prop_assert_eq!(a.embed().is_zero(), a.is_zero());
            prop_assert_eq!((&a + &b).embed(), &a.embed() + &b.embed());
        }
    }
}
