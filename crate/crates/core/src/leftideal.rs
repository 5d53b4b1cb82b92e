//! Left ideals of the n x n matrix algebra over the polynomial ring. Every
//! query reduces to the module generated by the rows of the generators: a
//! matrix belongs to the ideal exactly when each of its rows lies in that
//! module, so one membership engine serves both worlds.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::Error;
use crate::freemod::{MatPoly, ModVec};
use crate::groebner::Submodule;
use crate::poly::Context;
use crate::zeroset::{find_violation, SampleConfig, SaturationVerdict};

#[derive(Clone, Debug)]
pub struct LeftIdeal {
    gens: Vec<MatPoly>,
    rows: Submodule,
}

impl LeftIdeal {
    pub fn new(ctx: &Arc<Context>, n: usize, gens: Vec<MatPoly>) -> LeftIdeal {
        assert!(n >= 1, "matrix size must be at least 1");
        let mut rows = Vec::new();
        for g in &gens {
            assert_eq!(g.n(), n, "generator size mismatch");
            assert!(g.ctx() == ctx, "context mismatch");
            rows.extend(g.rows().iter().cloned());
        }
        LeftIdeal {
            gens,
            rows: Submodule::new(ctx, n, rows),
        }
    }

    /// Lifts a submodule of R^n to the left ideal generated by the matrices
    /// carrying one generator in their first row. Rows of the result span
    /// the input module again.
    pub fn from_module(module: &Submodule) -> LeftIdeal {
        let ctx = module.ctx();
        let n = module.rank();
        let gens = module
            .generators()
            .iter()
            .map(|g| {
                let mut rows = vec![ModVec::zero(ctx, n); n];
                rows[0] = g.clone();
                MatPoly::from_rows(rows)
            })
            .collect();
        LeftIdeal::new(ctx, n, gens)
    }

    pub fn ctx(&self) -> &Arc<Context> {
        self.rows.ctx()
    }

    pub fn n(&self) -> usize {
        self.rows.rank()
    }

    pub fn generators(&self) -> &[MatPoly] {
        &self.gens
    }

    pub fn rows_module(&self) -> &Submodule {
        &self.rows
    }

    fn check_size(&self, fm: &MatPoly) -> Result<(), Error> {
        if fm.ctx() != self.ctx() {
            return Err(Error::ContextMismatch);
        }
        if fm.n() != self.n() {
            return Err(Error::RankMismatch {
                expected: self.n(),
                found: fm.n(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, fm: &MatPoly) -> Result<bool, Error> {
        self.check_size(fm)?;
        Ok(fm.rows().iter().all(|r| self.rows.contains(r)))
    }

    /// Normal form of every row; the zero vector marks a member row.
    pub fn row_normal_forms(&self, fm: &MatPoly) -> Result<Vec<ModVec>, Error> {
        self.check_size(fm)?;
        Ok(fm.rows().iter().map(|r| self.rows.normal_form(r)).collect())
    }
}

/// Outcome of the realness probe for a list of matrices H_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealStepReport {
    /// Whether sum H_i^T H_i lies in J + J^T, decided in the flattened
    /// module: matrices with rows in N flatten into e_a (x) N, their
    /// transposes into N (x) e_a, so the sum is the tensor module of N.
    pub combination_in_sum: bool,
    /// Whether each H_i itself lies in J.
    pub members: Vec<bool>,
}

/// Computes both halves of the realness condition for J: if J were real,
/// `combination_in_sum` would force every entry of `members`.
pub fn verify_real_step(h_list: &[MatPoly], ideal: &LeftIdeal) -> Result<RealStepReport, Error> {
    let ctx = ideal.ctx();
    let n = ideal.n();
    let mut sum = MatPoly::zero(ctx, n);
    let mut members = Vec::with_capacity(h_list.len());
    for h in h_list {
        if h.ctx() != ctx {
            return Err(Error::ContextMismatch);
        }
        if h.n() != n {
            return Err(Error::RankMismatch {
                expected: n,
                found: h.n(),
            });
        }
        sum = &sum + &h.transpose().matmul(h);
        members.push(ideal.contains(h)?);
    }
    let tensor = ideal.rows_module().tensor_module();
    Ok(RealStepReport {
        combination_in_sum: tensor.contains(&sum.flatten()),
        members,
    })
}

/// Samples pairs (a, u) with every generator row annihilating u at a and
/// checks F(a)u = 0; the first violation refutes saturation membership.
pub fn matrix_saturation_test(
    fm: &MatPoly,
    ideal: &LeftIdeal,
    cfg: &SampleConfig,
) -> SaturationVerdict {
    assert_eq!(fm.n(), ideal.n(), "size mismatch");
    assert!(fm.ctx() == ideal.ctx(), "context mismatch");
    let fail = |a: &[num_rational::BigRational], u: &[num_rational::BigRational]| {
        fm.apply(a, u).iter().any(|c| !c.is_zero())
    };
    match find_violation(ideal.rows_module(), cfg, fail) {
        Some(pp) => SaturationVerdict::Counterexample(pp),
        None => SaturationVerdict::Consistent,
    }
}

/// Convenience for tests and the command line: a matrix with `v` in row
/// `row` and zeros elsewhere.
pub fn row_embed(v: &ModVec, row: usize) -> MatPoly {
    let n = v.rank();
    assert!(row < n, "row index out of range");
    let mut rows = vec![ModVec::zero(v.ctx(), n); n];
    rows[row] = v.clone();
    MatPoly::from_rows(rows)
}
