//! Gröbner bases for finitely generated submodules of R^n.
//!
//! The module order is position-over-term: the coordinate index decides
//! first (lower index wins), the context's monomial order breaks ties inside
//! a coordinate. Reduced bases are canonical, so normal forms and membership
//! answers do not depend on generator order.

use std::cmp::Ordering;
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;

use crate::freemod::ModVec;
use crate::poly::{check_same_ctx, Context, Monomial, MonomialOrder, Poly};

/// Position-over-term order on module monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuleOrder {
    pub base: MonomialOrder,
}

impl ModuleOrder {
    pub fn compare(&self, a: (usize, &Monomial), b: (usize, &Monomial)) -> Ordering {
        match b.0.cmp(&a.0) {
            Ordering::Equal => self.base.compare(a.1, b.1),
            ord => ord,
        }
    }
}

/// Leading module term of a nonzero vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadTerm {
    pub pos: usize,
    pub mono: Monomial,
    pub coeff: BigRational,
}

/// First nonzero coordinate carries the leading term under
/// position-over-term.
pub fn lead_term(v: &ModVec) -> Option<LeadTerm> {
    for (pos, p) in v.entries().iter().enumerate() {
        if let Some(t) = p.leading() {
            return Some(LeadTerm {
                pos,
                mono: t.mono.clone(),
                coeff: t.coeff.clone(),
            });
        }
    }
    None
}

fn monic(v: &ModVec) -> ModVec {
    match lead_term(v) {
        Some(lt) => v.scale_rat(&lt.coeff.recip()),
        None => v.clone(),
    }
}

/// Subtracts the single module term `(pos, mono, coeff)` from `v`.
fn sub_term(v: &ModVec, pos: usize, mono: &Monomial, coeff: &BigRational) -> ModVec {
    let mut entries: Vec<Poly> = v.entries().to_vec();
    let t = Poly::monomial(v.ctx(), mono.clone(), coeff.clone());
    entries[pos] = &entries[pos] - &t;
    ModVec::new(entries)
}

/// Full normal form of `v` against `basis`: every term of the result is
/// irreducible. Reducers are tried in basis order, so the walk is
/// deterministic.
pub fn reduce_full(v: &ModVec, basis: &[ModVec]) -> ModVec {
    let leads: Vec<LeadTerm> = basis
        .iter()
        .map(|g| lead_term(g).expect("basis vectors are nonzero"))
        .collect();
    let mut p = v.clone();
    let mut rem = ModVec::zero(v.ctx(), v.rank());
    while let Some(lt) = lead_term(&p) {
        let mut reduced = false;
        for (g, gl) in basis.iter().zip(&leads) {
            if gl.pos == lt.pos && gl.mono.divides(&lt.mono) {
                let m = gl.mono.div_into(&lt.mono);
                let c = &lt.coeff / &gl.coeff;
                p = &p - &g.mul_term(&m, &c);
                reduced = true;
                break;
            }
        }
        if !reduced {
            rem = sub_term(&rem, lt.pos, &lt.mono, &(-lt.coeff.clone()));
            p = sub_term(&p, lt.pos, &lt.mono, &lt.coeff);
        }
    }
    rem
}

fn s_pair(f: &ModVec, lf: &LeadTerm, g: &ModVec, lg: &LeadTerm) -> ModVec {
    debug_assert_eq!(lf.pos, lg.pos);
    let l = lf.mono.lcm(&lg.mono);
    let mf = lf.mono.div_into(&l);
    let mg = lg.mono.div_into(&l);
    &f.mul_term(&mf, &lf.coeff.recip()) - &g.mul_term(&mg, &lg.coeff.recip())
}

/// Buchberger completion followed by full auto-reduction. The result is the
/// unique reduced basis: monic, minimal, mutually irreducible, and sorted
/// descending by leading module term.
pub fn reduced_groebner_basis(rank: usize, gens: &[ModVec]) -> Vec<ModVec> {
    let mut basis: Vec<ModVec> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(monic)
        .collect();
    if basis.is_empty() {
        return basis;
    }
    let order = ModuleOrder {
        base: basis[0].ctx().order(),
    };

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            pairs.push((i, j));
        }
    }
    let mut next = 0;
    while next < pairs.len() {
        let (i, j) = pairs[next];
        next += 1;
        let li = lead_term(&basis[i]).unwrap();
        let lj = lead_term(&basis[j]).unwrap();
        if li.pos != lj.pos {
            continue;
        }
        // The coprime-lead shortcut is only valid in the ideal case; for
        // rank >= 2 the cross terms are vectors and the usual cancellation
        // argument does not apply.
        if rank == 1 && li.mono.coprime(&lj.mono) {
            continue;
        }
        let s = s_pair(&basis[i], &li, &basis[j], &lj);
        let nf = reduce_full(&s, &basis);
        if !nf.is_zero() {
            let nf = monic(&nf);
            let new = basis.len();
            for k in 0..new {
                pairs.push((k, new));
            }
            basis.push(nf);
        }
    }

    // Minimalize: drop vectors whose lead is divisible by another kept lead.
    let leads: Vec<LeadTerm> = basis.iter().map(|g| lead_term(g).unwrap()).collect();
    let n = basis.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || !keep[j] {
                continue;
            }
            if leads[j].pos == leads[i].pos && leads[j].mono.divides(&leads[i].mono) {
                let proper = leads[j].mono != leads[i].mono || j < i;
                if proper {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    let minimal: Vec<ModVec> = basis
        .into_iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(g, _)| g)
        .collect();

    // Auto-reduce every element against the others; leads survive because
    // the basis is minimal.
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<ModVec> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let nf = if others.is_empty() {
            minimal[i].clone()
        } else {
            reduce_full(&minimal[i], &others)
        };
        debug_assert!(!nf.is_zero());
        reduced.push(monic(&nf));
    }
    reduced.sort_by(|a, b| {
        let la = lead_term(a).unwrap();
        let lb = lead_term(b).unwrap();
        order
            .compare((lb.pos, &lb.mono), (la.pos, &la.mono))
            .then_with(|| Ordering::Equal)
    });
    reduced
}

/// Finitely generated submodule of R^n with a lazily computed reduced
/// Gröbner basis. The cache is a `OnceLock`, so concurrent readers either
/// see no basis or the complete one.
#[derive(Clone, Debug)]
pub struct Submodule {
    ctx: Arc<Context>,
    rank: usize,
    gens: Vec<ModVec>,
    gb: OnceLock<Vec<ModVec>>,
}

impl Submodule {
    /// Zero generators are dropped; the stored list is what certificates
    /// index into.
    pub fn new(ctx: &Arc<Context>, rank: usize, gens: Vec<ModVec>) -> Submodule {
        assert!(rank >= 1, "rank must be at least 1");
        let gens: Vec<ModVec> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        for g in &gens {
            assert_eq!(g.rank(), rank, "generator rank mismatch");
            check_same_ctx(ctx, g.ctx());
        }
        Submodule {
            ctx: ctx.clone(),
            rank,
            gens,
            gb: OnceLock::new(),
        }
    }

    /// Ideal of R viewed as a rank-1 submodule.
    pub fn ideal(ctx: &Arc<Context>, polys: Vec<Poly>) -> Submodule {
        let gens = polys.into_iter().map(|p| ModVec::new(vec![p])).collect();
        Submodule::new(ctx, 1, gens)
    }

    pub fn zero_module(ctx: &Arc<Context>, rank: usize) -> Submodule {
        Submodule::new(ctx, rank, Vec::new())
    }

    pub fn ctx(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[ModVec] {
        &self.gens
    }

    pub fn is_zero_module(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn order(&self) -> ModuleOrder {
        ModuleOrder {
            base: self.ctx.order(),
        }
    }

    pub fn groebner_basis(&self) -> &[ModVec] {
        self.gb
            .get_or_init(|| reduced_groebner_basis(self.rank, &self.gens))
    }

    pub fn normal_form(&self, v: &ModVec) -> ModVec {
        assert_eq!(v.rank(), self.rank, "rank mismatch");
        check_same_ctx(&self.ctx, v.ctx());
        let gb = self.groebner_basis();
        if gb.is_empty() {
            return v.clone();
        }
        reduce_full(v, gb)
    }

    pub fn contains(&self, v: &ModVec) -> bool {
        self.normal_form(v).is_zero()
    }

    /// Semantic equality via mutual containment of generators.
    pub fn equals(&self, other: &Submodule) -> bool {
        self.rank == other.rank
            && self.gens.iter().all(|g| other.contains(g))
            && other.gens.iter().all(|g| self.contains(g))
    }

    /// Image of M (x) N + N (x) M inside R^(n^2) under row-major flattening:
    /// generated by e_a (x) g and g (x) e_a over all basis indices and
    /// generators.
    pub fn tensor_module(&self) -> Submodule {
        let n = self.rank;
        let mut gens = Vec::with_capacity(2 * n * self.gens.len());
        for g in &self.gens {
            for a in 0..n {
                let e = ModVec::basis(&self.ctx, n, a);
                gens.push(e.tensor(g).flatten());
            }
        }
        for g in &self.gens {
            for a in 0..n {
                let e = ModVec::basis(&self.ctx, n, a);
                gens.push(g.tensor(&e).flatten());
            }
        }
        Submodule::new(&self.ctx, n * n, gens)
    }
}
