//! Shared helpers for the integration suites: seeded random instances and a
//! self-contained linear-solve membership oracle that never touches the
//! library's linear algebra or Groebner machinery.
//!
//! Each suite uses its own subset.
#![allow(dead_code)]

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use realnull_core::freemod::ModVec;
use realnull_core::groebner::Submodule;
use realnull_core::poly::{Context, Monomial, MonomialOrder, Poly};

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn random_point<R: Rng>(rng: &mut R, d: usize) -> Vec<BigRational> {
    (0..d)
        .map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
        .collect()
}

pub fn random_poly<R: Rng>(rng: &mut R, ctx: &Arc<Context>, max_deg: u32) -> Poly {
    let d = ctx.vars();
    let terms = rng.gen_range(0..=3);
    let mut acc = Poly::zero(ctx);
    for _ in 0..terms {
        let mut exps = vec![0u32; d];
        let mut budget = max_deg;
        for e in exps.iter_mut() {
            *e = rng.gen_range(0..=budget);
            budget -= *e;
        }
        let coeff = rat(rng.gen_range(-3..=3), 1);
        acc = &acc + &Poly::monomial(ctx, Monomial::from_exponents(exps), coeff);
    }
    acc
}

pub fn random_modvec<R: Rng>(rng: &mut R, ctx: &Arc<Context>, n: usize, max_deg: u32) -> ModVec {
    ModVec::new((0..n).map(|_| random_poly(rng, ctx, max_deg)).collect())
}

pub struct RandomInstance {
    pub ctx: Arc<Context>,
    pub module: Submodule,
    pub f: ModVec,
}

/// Small instance in up to 3 variables and rank 2..=3 with 1..=3 nonzero
/// generators of entry degree at most 2.
pub fn random_instance<R: Rng>(rng: &mut R) -> RandomInstance {
    let d = rng.gen_range(1..=3);
    let ctx = Context::new(d, MonomialOrder::GrevLex);
    let n = rng.gen_range(2..=3);
    let m = rng.gen_range(1..=3);
    let mut gens = Vec::new();
    while gens.len() < m {
        let g = random_modvec(rng, &ctx, n, 2);
        if !g.is_zero() {
            gens.push(g);
        }
    }
    let f = random_modvec(rng, &ctx, n, 2);
    RandomInstance {
        module: Submodule::new(&ctx, n, gens),
        ctx,
        f,
    }
}

/// All exponent tuples of total degree at most `bound`, enumerated without
/// the library's monomial helpers.
pub fn monomial_exponents(d: usize, bound: u32) -> Vec<Vec<u32>> {
    fn go(d: usize, bound: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if d == 0 {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=bound {
            prefix.push(e);
            go(d - 1, bound - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(d, bound, &mut Vec::new(), &mut out);
    out
}

/// Plain Gauss elimination over Q on an augmented system; returns any exact
/// solution. Written out longhand on purpose: this is the oracle the library
/// results are checked against.
pub fn solve_dense(mut rows: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let m = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        rhs[r] = &rhs[r] * &inv;
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..cols {
                    let sub = &rows[r][j] * &factor;
                    rows[i][j] = &rows[i][j] - &sub;
                }
                let sub = &rhs[r] * &factor;
                rhs[i] = &rhs[i] - &sub;
            }
        }
        pivot_of_col[c] = r;
        r += 1;
        if r == m {
            break;
        }
    }
    // Rows eliminated to zero must have zero right-hand side.
    for i in r..m {
        if !rhs[i].is_zero() {
            return None;
        }
    }
    let mut solution = vec![BigRational::zero(); cols];
    for c in 0..cols {
        if pivot_of_col[c] != usize::MAX {
            solution[c] = rhs[pivot_of_col[c]].clone();
        }
    }
    Some(solution)
}

/// Decides whether `f` is a generator combination with cofactor degrees at
/// most `bound` by solving the coefficient system directly.
pub fn linear_membership_oracle(f: &ModVec, gens: &[ModVec], bound: u32) -> bool {
    let ctx = f.ctx();
    let d = ctx.vars();
    let n = f.rank();
    let exps = monomial_exponents(d, bound);
    // Column c = (generator i, cofactor monomial m). Products m * g_i are
    // polynomials; every (coordinate, monomial) cell of the stacked system
    // becomes one equation.
    let mut columns: Vec<Vec<Poly>> = Vec::new();
    for g in gens {
        for e in &exps {
            let m = Poly::monomial(ctx, Monomial::from_exponents(e.clone()), rat(1, 1));
            columns.push((0..n).map(|a| g.entry(a) * &m).collect());
        }
    }
    let mut cells: Vec<(usize, Monomial)> = Vec::new();
    let mut push_cells = |v: &[Poly]| {
        for (a, p) in v.iter().enumerate() {
            for t in p.terms() {
                if !cells.iter().any(|(b, mu)| *b == a && *mu == t.mono) {
                    cells.push((a, t.mono.clone()));
                }
            }
        }
    };
    for col in &columns {
        push_cells(col);
    }
    push_cells(f.entries());
    let mut rows = Vec::with_capacity(cells.len());
    let mut rhs = Vec::with_capacity(cells.len());
    for (a, mu) in &cells {
        rows.push(
            columns
                .iter()
                .map(|col| col[*a].coefficient(mu))
                .collect::<Vec<_>>(),
        );
        rhs.push(f.entry(*a).coefficient(mu));
    }
    solve_dense(rows, rhs).is_some()
}
