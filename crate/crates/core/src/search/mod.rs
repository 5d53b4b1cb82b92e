//! Degree-bounded certificate searches.
//!
//! The tensor search solves exact linear systems for witness vectors at a
//! given degree bound: first through membership cofactors, then through the
//! symmetric witness system. The square search walks exponents k = 1..k_max
//! with an exact normal-form pass for every k, then an optional numeric
//! positive-semidefinite pass whose rounded output is accepted only after an
//! exact re-verification. `None` from either search means the bounds were
//! exhausted, never that no certificate exists.

mod gram;
mod round;

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cert::{
    verify_square, verify_tensor, Side, SquareCert, TensorCert, TensorWitness, Verdict,
};
use crate::freemod::ModVec;
use crate::groebner::Submodule;
use crate::linalg::QMat;
use crate::poly::{monomials_up_to, rat, Monomial, Poly};

/// Solves `f = sum_b p_b g_b` with every cofactor degree at most
/// `deg_bound`, exactly. Free coordinates of the solution space are pinned
/// to zero, so the answer is deterministic.
pub fn membership_cofactors(
    f: &ModVec,
    module: &Submodule,
    deg_bound: u32,
) -> Option<Vec<Poly>> {
    let ctx = module.ctx();
    assert!(f.ctx() == ctx, "context mismatch");
    assert_eq!(f.rank(), module.rank(), "rank mismatch");
    let gens = module.generators();
    if gens.is_empty() {
        return if f.is_zero() { Some(vec![]) } else { None };
    }
    let basis = monomials_up_to(ctx, deg_bound);
    let order = ctx.order();

    let mut keys: Vec<(usize, Monomial)> = Vec::new();
    for a in 0..f.rank() {
        for t in f.entry(a).terms() {
            keys.push((a, t.mono.clone()));
        }
    }
    for g in gens {
        for mu in &basis {
            for a in 0..g.rank() {
                for t in g.entry(a).terms() {
                    keys.push((a, mu.mul(&t.mono)));
                }
            }
        }
    }
    keys.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| order.compare(&y.1, &x.1)));
    keys.dedup();
    let row_of: HashMap<(usize, Monomial), usize> = keys
        .iter()
        .cloned()
        .enumerate()
        .map(|(r, k)| (k, r))
        .collect();

    let cols = gens.len() * basis.len();
    let mut mat = QMat::zeros(keys.len(), cols);
    for (i, g) in gens.iter().enumerate() {
        for (mi, mu) in basis.iter().enumerate() {
            let col = i * basis.len() + mi;
            for a in 0..g.rank() {
                for t in g.entry(a).terms() {
                    let r = row_of[&(a, mu.mul(&t.mono))];
                    let cur = mat.at(r, col).clone();
                    mat.set(r, col, cur + &t.coeff);
                }
            }
        }
    }
    let mut rhs = vec![BigRational::zero(); keys.len()];
    for a in 0..f.rank() {
        for t in f.entry(a).terms() {
            rhs[row_of[&(a, t.mono.clone())]] = t.coeff.clone();
        }
    }
    let sol = mat.solve(&rhs)?;
    Some(
        (0..gens.len())
            .map(|i| {
                Poly::from_pairs(
                    ctx,
                    basis
                        .iter()
                        .enumerate()
                        .map(|(mi, mu)| (mu.clone(), sol[i * basis.len() + mi].clone()))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Searches for witness vectors r_i with
/// `f (x) f = sum_i (r_i (x) g_i + g_i (x) r_i)`.
///
/// Two exact passes. If f is a generator combination with cofactors of
/// degree at most `deg_bound`, the witnesses r_i = p_i f / 2 settle it, and
/// their degree may exceed the bound; the bound constrains the search
/// parameters, not the output. Otherwise the symmetric witness system is
/// solved coefficientwise with each entry of each r_i ranging over monomials
/// up to the bound. The returned certificate always verifies.
pub fn linear_tensor_search(
    f: &ModVec,
    module: &Submodule,
    deg_bound: u32,
) -> Option<TensorCert> {
    let ctx = module.ctx();
    assert!(f.ctx() == ctx, "context mismatch");
    assert_eq!(f.rank(), module.rank(), "rank mismatch");
    let gens = module.generators();

    if let Some(cof) = membership_cofactors(f, module, deg_bound) {
        let mut ws = Vec::new();
        for (i, p) in cof.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let r = f.scale(p).scale_rat(&rat(1, 2));
            ws.push(TensorWitness {
                gen: i,
                side: Side::Left,
                factor: r.clone(),
            });
            ws.push(TensorWitness {
                gen: i,
                side: Side::Right,
                factor: r,
            });
        }
        let cert = TensorCert {
            f: f.clone(),
            squares: vec![],
            witnesses: Some(ws),
        };
        assert!(
            matches!(verify_tensor(&cert, module), Ok(Verdict::Valid)),
            "membership witnesses failed to verify"
        );
        return Some(cert);
    }

    let basis = monomials_up_to(ctx, deg_bound);
    let order = ctx.order();
    let n = f.rank();
    let ff = f.tensor(f);

    let mut keys: Vec<(usize, usize, Monomial)> = Vec::new();
    for u in 0..n {
        for v in 0..n {
            for t in ff.entry(u, v).terms() {
                keys.push((u, v, t.mono.clone()));
            }
        }
    }
    for g in gens {
        for mu in &basis {
            for b in 0..n {
                for t in g.entry(b).terms() {
                    let prod = mu.mul(&t.mono);
                    for a in 0..n {
                        keys.push((a, b, prod.clone()));
                        keys.push((b, a, prod.clone()));
                    }
                }
            }
        }
    }
    keys.sort_by(|x, y| {
        (x.0, x.1)
            .cmp(&(y.0, y.1))
            .then_with(|| order.compare(&y.2, &x.2))
    });
    keys.dedup();
    let row_of: HashMap<(usize, usize, Monomial), usize> = keys
        .iter()
        .cloned()
        .enumerate()
        .map(|(r, k)| (k, r))
        .collect();

    let cols = gens.len() * n * basis.len();
    let mut mat = QMat::zeros(keys.len(), cols);
    for (i, g) in gens.iter().enumerate() {
        for a in 0..n {
            for (mi, mu) in basis.iter().enumerate() {
                let col = (i * n + a) * basis.len() + mi;
                for b in 0..n {
                    for t in g.entry(b).terms() {
                        let prod = mu.mul(&t.mono);
                        let r1 = row_of[&(a, b, prod.clone())];
                        let cur = mat.at(r1, col).clone();
                        mat.set(r1, col, cur + &t.coeff);
                        let r2 = row_of[&(b, a, prod)];
                        let cur = mat.at(r2, col).clone();
                        mat.set(r2, col, cur + &t.coeff);
                    }
                }
            }
        }
    }
    let mut rhs = vec![BigRational::zero(); keys.len()];
    for u in 0..n {
        for v in 0..n {
            for t in ff.entry(u, v).terms() {
                rhs[row_of[&(u, v, t.mono.clone())]] = t.coeff.clone();
            }
        }
    }
    let sol = mat.solve(&rhs)?;

    let mut ws = Vec::new();
    for i in 0..gens.len() {
        let entries: Vec<Poly> = (0..n)
            .map(|a| {
                Poly::from_pairs(
                    ctx,
                    basis
                        .iter()
                        .enumerate()
                        .map(|(mi, mu)| {
                            (mu.clone(), sol[(i * n + a) * basis.len() + mi].clone())
                        })
                        .collect(),
                )
            })
            .collect();
        let r = ModVec::new(entries);
        if r.is_zero() {
            continue;
        }
        ws.push(TensorWitness {
            gen: i,
            side: Side::Left,
            factor: r.clone(),
        });
        ws.push(TensorWitness {
            gen: i,
            side: Side::Right,
            factor: r,
        });
    }
    let cert = TensorCert {
        f: f.clone(),
        squares: vec![],
        witnesses: Some(ws),
    };
    assert!(
        matches!(verify_tensor(&cert, module), Ok(Verdict::Valid)),
        "solved witnesses failed to verify"
    );
    Some(cert)
}

/// Searches for an exponent k and squares s_i with `f^(2k) + sum s_i^2` in
/// the ideal. The exact pass tries every k first; the numeric pass, when
/// enabled, then revisits the exponents in order, so the first success in
/// that fixed order wins.
pub fn square_search(
    f: &Poly,
    ideal: &Submodule,
    k_max: u32,
    deg_bound: u32,
    numeric: bool,
    denominator_cap: u64,
) -> Option<SquareCert> {
    assert_eq!(ideal.rank(), 1, "square search needs a rank 1 module");
    assert!(f.ctx() == ideal.ctx(), "context mismatch");
    assert!(k_max >= 1, "exponent bound must be positive");
    for k in 1..=k_max {
        let pw = f.pow(2 * k);
        if ideal.contains(&ModVec::new(vec![pw])) {
            return Some(SquareCert {
                f: f.clone(),
                k,
                squares: vec![],
                cofactors: None,
            });
        }
    }
    if numeric {
        for k in 1..=k_max {
            if let Some(squares) = sos_pass(f, k, ideal, deg_bound, denominator_cap) {
                let cert = SquareCert {
                    f: f.clone(),
                    k,
                    squares,
                    cofactors: None,
                };
                assert!(
                    matches!(verify_square(&cert, ideal), Ok(Verdict::Valid)),
                    "numeric pass escaped the exact gate"
                );
                return Some(cert);
            }
        }
    }
    None
}

// Gram step: sigma = m^T Q m over the monomial basis m, Q symmetric positive
// semidefinite, with f^(2k) + sigma reducing to zero against the ideal. The
// affine constraints are exact rational data; the cone part is found at
// machine precision, rounded with growing denominators, projected back onto
// the constraints exactly, factored exactly, and finally re-verified. Only
// an exactly verified square list leaves this function.
fn sos_pass(
    f: &Poly,
    k: u32,
    ideal: &Submodule,
    deg_bound: u32,
    denominator_cap: u64,
) -> Option<Vec<Poly>> {
    let ctx = ideal.ctx();
    let basis = monomials_up_to(ctx, deg_bound);
    let dim = basis.len();
    let order = ctx.order();

    let target = ideal
        .normal_form(&ModVec::new(vec![f.pow(2 * k)]))
        .entry(0)
        .clone();
    if target.is_zero() {
        return Some(vec![]);
    }

    let mut pairs = Vec::with_capacity(dim * (dim + 1) / 2);
    for i in 0..dim {
        for j in i..dim {
            pairs.push((i, j));
        }
    }
    let nf_prod: Vec<Poly> = pairs
        .iter()
        .map(|&(i, j)| {
            let prod = Poly::monomial(ctx, basis[i].mul(&basis[j]), BigRational::one());
            ideal.normal_form(&ModVec::new(vec![prod])).entry(0).clone()
        })
        .collect();

    let mut keys: Vec<Monomial> = target.terms().iter().map(|t| t.mono.clone()).collect();
    for p in &nf_prod {
        for t in p.terms() {
            keys.push(t.mono.clone());
        }
    }
    keys.sort_by(|x, y| order.compare(y, x));
    keys.dedup();
    let row_of: HashMap<Monomial, usize> = keys
        .iter()
        .cloned()
        .enumerate()
        .map(|(r, m)| (m, r))
        .collect();

    let rows = keys.len();
    let mut a_exact = QMat::zeros(rows, pairs.len());
    for (c, &(i, j)) in pairs.iter().enumerate() {
        let w = if i == j { rat(1, 1) } else { rat(2, 1) };
        for t in nf_prod[c].terms() {
            let r = row_of[&t.mono];
            let cur = a_exact.at(r, c).clone();
            a_exact.set(r, c, cur + &t.coeff * &w);
        }
    }
    let mut b_exact = vec![BigRational::zero(); rows];
    for t in target.terms() {
        b_exact[row_of[&t.mono]] = -t.coeff.clone();
    }

    // Consistency of the affine system; a pivot in the right-hand column
    // means no Gram matrix of any signature fits at this bound.
    let mut aug = QMat::zeros(rows, pairs.len() + 1);
    for r in 0..rows {
        for c in 0..pairs.len() {
            aug.set(r, c, a_exact.at(r, c).clone());
        }
        aug.set(r, pairs.len(), b_exact[r].clone());
    }
    if aug.rref().contains(&pairs.len()) {
        return None;
    }

    // Independent rows, via the pivot columns of the transpose.
    let mut a_t = QMat::zeros(pairs.len(), rows);
    for r in 0..rows {
        for c in 0..pairs.len() {
            a_t.set(c, r, a_exact.at(r, c).clone());
        }
    }
    let indep = a_t.rref();

    let a_f64: Vec<Vec<f64>> = indep
        .iter()
        .map(|&r| {
            (0..pairs.len())
                .map(|c| a_exact.at(r, c).to_f64().unwrap_or(0.0))
                .collect()
        })
        .collect();
    let b_f64: Vec<f64> = indep
        .iter()
        .map(|&r| b_exact[r].to_f64().unwrap_or(0.0))
        .collect();

    let q_numeric = gram::alternating_projection(&a_f64, &b_f64, dim, 400, 1e-9);

    let mut cap = 1u64;
    loop {
        let q_rounded: Vec<BigRational> = q_numeric
            .iter()
            .map(|x| round::rationalize(*x, cap))
            .collect();
        if let Some(q_exact) = project_affine_exact(&a_exact, &indep, &b_exact, &q_rounded) {
            if let Some(fact) = round::ldl(&gram_matrix(&q_exact, dim)) {
                if let Some(squares) = squares_from_factorization(ctx, &basis, &fact) {
                    let mut acc = f.pow(2 * k);
                    for s in &squares {
                        acc = &acc + &(s * s);
                    }
                    if ideal.contains(&ModVec::new(vec![acc])) {
                        return Some(squares);
                    }
                }
            }
        }
        if cap >= denominator_cap {
            return None;
        }
        cap = (cap * 16).min(denominator_cap);
    }
}

fn gram_matrix(q: &[BigRational], dim: usize) -> QMat {
    let mut m = QMat::zeros(dim, dim);
    let mut idx = 0;
    for i in 0..dim {
        for j in i..dim {
            m.set(i, j, q[idx].clone());
            m.set(j, i, q[idx].clone());
            idx += 1;
        }
    }
    m
}

// Nearest point of { q : A_S q = b_S } to `q_rounded`, through the
// stationarity system of the constrained least-squares problem.
fn project_affine_exact(
    a: &QMat,
    indep: &[usize],
    b: &[BigRational],
    q_rounded: &[BigRational],
) -> Option<Vec<BigRational>> {
    let nvars = q_rounded.len();
    let s = indep.len();
    if s == 0 {
        return Some(q_rounded.to_vec());
    }
    let mut kkt = QMat::zeros(nvars + s, nvars + s);
    for i in 0..nvars {
        kkt.set(i, i, BigRational::one());
    }
    for (si, &r) in indep.iter().enumerate() {
        for c in 0..nvars {
            kkt.set(c, nvars + si, a.at(r, c).clone());
            kkt.set(nvars + si, c, a.at(r, c).clone());
        }
    }
    let mut rhs = q_rounded.to_vec();
    for &r in indep {
        rhs.push(b[r].clone());
    }
    let sol = kkt.solve(&rhs)?;
    Some(sol[..nvars].to_vec())
}

// d_i * (l_i . m)^2 = sum over a four-square split of d_i's numerator times
// denominator, each piece an exact rational multiple of the pivot row.
fn squares_from_factorization(
    ctx: &std::sync::Arc<crate::poly::Context>,
    basis: &[Monomial],
    fact: &[(BigRational, Vec<BigRational>)],
) -> Option<Vec<Poly>> {
    let mut squares = Vec::new();
    for (d, col) in fact {
        if d.is_zero() {
            continue;
        }
        let row_poly = Poly::from_pairs(
            ctx,
            basis
                .iter()
                .zip(col)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        );
        if row_poly.is_zero() {
            continue;
        }
        let pq = d.numer() * d.denom();
        debug_assert!(pq.is_positive());
        let parts = round::four_squares(&pq, 200_000)?;
        for part in parts {
            if part.is_zero() {
                continue;
            }
            let c = BigRational::new(part, d.denom().clone());
            squares.push(row_poly.scale(&c));
        }
    }
    Some(squares)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Context, MonomialOrder};
    use std::sync::Arc;

    fn ctx2() -> Arc<Context> {
        Context::new(2, MonomialOrder::GrevLex)
    }

    fn p(ctx: &Arc<Context>, s: &str) -> Poly {
        Poly::parse(ctx, s).unwrap()
    }

    fn v(ctx: &Arc<Context>, entries: &[&str]) -> ModVec {
        ModVec::new(entries.iter().map(|s| p(ctx, s)).collect())
    }

    fn plane_module(ctx: &Arc<Context>) -> Submodule {
        Submodule::new(
            ctx,
            2,
            vec![v(ctx, &["x1", "x1 + x2"]), v(ctx, &["-x1", "x1 - x2"])],
        )
    }

    #[test]
    fn membership_cofactors_reproduce_the_target() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        let member = v(&ctx, &["0", "2*x1"]);
        let cof = membership_cofactors(&member, &n, 0).unwrap();
        let mut rebuilt = ModVec::zero(&ctx, 2);
        for (pi, g) in cof.iter().zip(n.generators()) {
            rebuilt = &rebuilt + &g.scale(pi);
        }
        assert_eq!(rebuilt, member);

        assert!(membership_cofactors(&v(&ctx, &["x1", "0"]), &n, 3).is_none());
    }

    #[test]
    fn tensor_search_rediscovers_the_plane_witnesses() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        let f = v(&ctx, &["x1", "0"]);
        let cert = linear_tensor_search(&f, &n, 1).expect("witnesses exist at degree 1");
        assert_eq!(verify_tensor(&cert, &n).unwrap(), Verdict::Valid);
        let ws = cert.witnesses.as_ref().unwrap();
        assert!(!ws.is_empty());
        for w in ws {
            assert!(w.factor.total_degree().unwrap_or(0) <= 1);
        }
    }

    #[test]
    fn tensor_search_uses_membership_when_it_holds() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        let g1 = v(&ctx, &["x1", "x1 + x2"]);
        let cert = linear_tensor_search(&g1, &n, 0).expect("generators certify themselves");
        assert_eq!(verify_tensor(&cert, &n).unwrap(), Verdict::Valid);
    }

    #[test]
    fn tensor_search_exhausts_its_bound() {
        let ctx = ctx2();
        let m = Submodule::new(&ctx, 2, vec![v(&ctx, &["x1", "0"])]);
        let f = v(&ctx, &["1", "0"]);
        assert!(linear_tensor_search(&f, &m, 3).is_none());
    }

    #[test]
    fn tensor_search_is_monotone_in_the_bound() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        let f = v(&ctx, &["x1", "0"]);
        for bound in 1..=3 {
            let cert = linear_tensor_search(&f, &n, bound).expect("bound at least 1 suffices");
            assert_eq!(verify_tensor(&cert, &n).unwrap(), Verdict::Valid);
        }
    }

    #[test]
    fn square_search_exact_pass() {
        let ctx = ctx2();
        let simple = Submodule::ideal(&ctx, vec![p(&ctx, "x1^2")]);
        let cert = square_search(&p(&ctx, "x1"), &simple, 1, 0, false, 1).unwrap();
        assert_eq!(cert.k, 1);
        assert!(cert.squares.is_empty());
        assert_eq!(verify_square(&cert, &simple).unwrap(), Verdict::Valid);

        let cubic = Submodule::ideal(&ctx, vec![p(&ctx, "x1^3")]);
        let cert = square_search(&p(&ctx, "x1"), &cubic, 3, 0, false, 1).unwrap();
        assert_eq!(cert.k, 2);
    }

    #[test]
    fn square_search_numeric_finds_mixed_squares() {
        let ctx = ctx2();
        let ideal = Submodule::ideal(&ctx, vec![p(&ctx, "x1^2 + x2^4")]);
        let f = p(&ctx, "x1");
        let cert = square_search(&f, &ideal, 1, 2, true, 1 << 20)
            .expect("a quadratic square completes x1^2");
        assert_eq!(cert.k, 1);
        assert!(!cert.squares.is_empty());
        assert_eq!(verify_square(&cert, &ideal).unwrap(), Verdict::Valid);
        let mut acc = f.pow(2);
        for s in &cert.squares {
            acc = &acc + &(s * s);
        }
        assert!(ideal.contains(&ModVec::new(vec![acc])));
    }

    #[test]
    fn square_search_fails_where_the_target_takes_a_nonzero_value() {
        let ctx = ctx2();
        // x1 is 1 at the common zero x1 = 1, so no power plus squares can
        // land in the ideal; every pass must come back empty.
        let ideal = Submodule::ideal(&ctx, vec![p(&ctx, "x1 - 1")]);
        assert!(square_search(&p(&ctx, "x1"), &ideal, 3, 2, true, 1 << 12).is_none());
    }
}
