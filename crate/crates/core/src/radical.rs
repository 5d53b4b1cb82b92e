//! Constructive membership descent: coordinate elimination, entry-ideal
//! square combinations, and the chain assembly that stitches them into a
//! verifiable certificate.

use std::sync::Arc;

use num_traits::One;

use crate::cert::{ChainCert, ChainLayerEntry, Side, SquareCert, TensorCert, TensorWitness};
use crate::error::Error;
use crate::freemod::ModVec;
use crate::groebner::Submodule;
use crate::poly::{check_same_ctx, Poly};
use crate::search::{linear_tensor_search, square_search};
use crate::zeroset::{saturation_test, PointPair, SampleConfig, SaturationVerdict};

/// One coordinate-elimination move. The derived data lives in rank n-1;
/// position `i` of `derived_gens` comes from generator `i` (so position
/// `pivot_gen` is always zero and kept to preserve indexing).
///
/// Reinserting a zero at `pivot_coord` recovers the exact identities
/// `insert_zero(derived_gens[i]) = p*g_i - g_i[l]*g_k` and
/// `insert_zero(derived_target) = p*f - f[l]*g_k`, where `p = g_k[l]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationStep {
    pub pivot_gen: usize,
    pub pivot_coord: usize,
    pub derived_gens: Vec<ModVec>,
    pub derived_target: ModVec,
}

/// Cross-multiplies coordinate `l` away against generator `k`.
pub fn eliminate(
    module: &Submodule,
    f: &ModVec,
    k: usize,
    l: usize,
) -> Result<EliminationStep, Error> {
    check_same_ctx(module.ctx(), f.ctx());
    let n = module.rank();
    if f.rank() != n {
        return Err(Error::RankMismatch {
            expected: n,
            found: f.rank(),
        });
    }
    if n < 2 {
        return Err(Error::Malformed(
            "elimination needs a module of rank at least 2".into(),
        ));
    }
    let gens = module.generators();
    if k >= gens.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            limit: gens.len(),
        });
    }
    if l >= n {
        return Err(Error::IndexOutOfRange { index: l, limit: n });
    }
    let gk = &gens[k];
    let p = gk.entry(l);
    // Coordinate l of p*v - v[l]*g_k vanishes identically, so dropping it
    // loses nothing and insert_zero(l) undoes the move.
    let cross = |v: &ModVec| (&v.scale(p) - &gk.scale(v.entry(l))).remove_coord(l);
    Ok(EliminationStep {
        pivot_gen: k,
        pivot_coord: l,
        derived_gens: gens.iter().map(&cross).collect(),
        derived_target: cross(f),
    })
}

/// The rank 1 module generated by every coordinate of every generator.
pub fn entry_ideal(module: &Submodule) -> Submodule {
    let mut entries = Vec::new();
    for g in module.generators() {
        for j in 0..g.rank() {
            entries.push(g.entry(j).clone());
        }
    }
    Submodule::ideal(module.ctx(), entries)
}

/// Certificate that `h (x) h` lies in the tensor module of `<h_j * h>`,
/// together with that module. The witnesses halve the identity
/// `2 (h (x) h) = sum_j e_j (x) h_j h + h_j h (x) e_j`.
pub fn self_membership_cert(h: &ModVec) -> (Submodule, TensorCert) {
    let ctx = h.ctx();
    let n = h.rank();
    let mut gens = Vec::new();
    let mut witnesses = Vec::new();
    let half = crate::poly::rat(1, 2);
    for j in 0..n {
        if h.entry(j).is_zero() {
            continue;
        }
        let gen = gens.len();
        gens.push(h.scale(h.entry(j)));
        let factor = ModVec::basis(ctx, n, j).scale_rat(&half);
        witnesses.push(TensorWitness {
            gen,
            side: Side::Left,
            factor: factor.clone(),
        });
        witnesses.push(TensorWitness {
            gen,
            side: Side::Right,
            factor,
        });
    }
    let module = Submodule::new(ctx, n, gens);
    let cert = TensorCert {
        f: h.clone(),
        squares: vec![],
        witnesses: Some(witnesses),
    };
    (module, cert)
}

/// Converts a square combination for a polynomial into a tensor certificate
/// for `sc.f^k * f` over the scaled module `I*f`, which is returned with it.
/// When the input carries cofactors they transfer to exact tensor witnesses.
pub fn square_cert_to_tensor(
    sc: &SquareCert,
    ideal: &Submodule,
    f: &ModVec,
) -> Result<(Submodule, TensorCert), Error> {
    check_same_ctx(ideal.ctx(), f.ctx());
    if !crate::cert::verify_square(sc, ideal)?.is_valid() {
        return Err(Error::Malformed(
            "square certificate does not verify against the ideal".into(),
        ));
    }
    let gens: Vec<ModVec> = ideal
        .generators()
        .iter()
        .map(|g| f.scale(g.entry(0)))
        .collect();
    let zero_target = f.is_zero();
    let module = Submodule::new(f.ctx(), f.rank(), gens);
    let element = f.scale(&sc.f.pow(sc.k));
    let squares = sc.squares.iter().map(|s| f.scale(s)).collect();
    // element (x) element + sum s_i f (x) s_i f = (f^(2k) + sum s_i^2)(f (x) f),
    // and a cofactor combination q = sum c_a i_a turns each summand into
    // (i_a f) (x) (c_a f). Scaling by a nonzero f keeps generator positions.
    let witnesses = match (&sc.cofactors, zero_target) {
        (Some(cof), false) => Some(
            cof.iter()
                .enumerate()
                .map(|(a, c)| TensorWitness {
                    gen: a,
                    side: Side::Right,
                    factor: f.scale(c),
                })
                .collect(),
        ),
        (_, true) => Some(vec![]),
        (None, false) => None,
    };
    let cert = TensorCert {
        f: element,
        squares,
        witnesses,
    };
    Ok((module, cert))
}

/// Bounds steering `certify_radical_membership`. `degree_bound` caps witness
/// parametrizations (zero means constants), the others must be positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub degree_bound: u32,
    pub k_max: u32,
    pub max_depth: u32,
    pub sample_budget: usize,
    pub numeric: bool,
    pub denominator_cap: u64,
    pub seed: u64,
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            degree_bound: 2,
            k_max: 3,
            max_depth: 4,
            sample_budget: 200,
            numeric: true,
            denominator_cap: 1 << 20,
            seed: 0,
            threads: 1,
        }
    }
}

/// Why a search gave up. Every variant names the exhausted bound or the
/// exact refuting data; none of them asserts that no certificate exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchFailure {
    /// Sampling found a structured zero the target does not annihilate, so
    /// membership in the radical is impossible.
    SaturationRefuted(PointPair),
    /// The module is zero but the target is not.
    ZeroModule,
    /// Recursion ran out of elimination depth.
    DepthExhausted { max_depth: u32 },
    /// No square combination for the named target coordinate within bounds.
    SquareBoundExhausted {
        coord: usize,
        k_max: u32,
        degree_bound: u32,
    },
    /// A pivot branch failed; the inner failure explains how.
    PivotBranch {
        gen: usize,
        coord: usize,
        cause: Box<SearchFailure>,
    },
}

impl std::fmt::Display for SearchFailure {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SearchFailure::SaturationRefuted(pp) => {
                write!(out, "refuted by sampling: {pp}")
            }
            SearchFailure::ZeroModule => {
                write!(out, "the zero module admits no nonzero members")
            }
            SearchFailure::DepthExhausted { max_depth } => {
                write!(out, "chain depth bound {max_depth} exhausted")
            }
            SearchFailure::SquareBoundExhausted {
                coord,
                k_max,
                degree_bound,
            } => write!(
                out,
                "no square combination for coordinate {coord} within k <= {k_max}, degree <= {degree_bound}"
            ),
            SearchFailure::PivotBranch { gen, coord, cause } => {
                write!(out, "pivot (generator {gen}, coordinate {coord}): {cause}")
            }
        }
    }
}

/// Best-effort search for a chain certificate of `f` over `module`.
///
/// The pipeline: plain membership gives an empty chain; a sampling filter
/// refutes hopeless targets; rank 1 falls through to square search plus
/// exponent halving; otherwise a bounded witness search runs first and the
/// elimination descent is the last resort. Failures always name a bound.
pub fn certify_radical_membership(
    module: &Submodule,
    f: &ModVec,
    cfg: &SearchConfig,
) -> Result<ChainCert, SearchFailure> {
    check_same_ctx(module.ctx(), f.ctx());
    assert_eq!(module.rank(), f.rank(), "rank mismatch");
    assert!(cfg.k_max >= 1, "exponent bound must be positive");
    assert!(cfg.max_depth >= 1, "depth bound must be positive");
    assert!(cfg.sample_budget >= 1, "sample budget must be positive");
    let layers = descend(module, f, cfg, cfg.max_depth)?;
    let chain = ChainCert {
        base: module.clone(),
        layers,
        target: f.clone(),
    };
    debug_assert!(
        matches!(
            crate::cert::verify_chain(&chain, module),
            Ok(crate::cert::Verdict::Valid)
        ),
        "constructed chain must verify"
    );
    Ok(chain)
}

fn descend(
    module: &Submodule,
    f: &ModVec,
    cfg: &SearchConfig,
    depth: u32,
) -> Result<Vec<Vec<ChainLayerEntry>>, SearchFailure> {
    if module.contains(f) {
        return Ok(vec![]);
    }
    let sample_cfg = SampleConfig {
        samples: cfg.sample_budget,
        seed: cfg.seed,
        threads: cfg.threads,
        ..SampleConfig::default()
    };
    if let SaturationVerdict::Counterexample(pp) = saturation_test(f, module, &sample_cfg) {
        return Err(SearchFailure::SaturationRefuted(pp));
    }
    if module.is_zero_module() {
        return Err(SearchFailure::ZeroModule);
    }
    if module.rank() == 1 {
        return square_chain(module, f, cfg);
    }
    if let Some(cert) = linear_tensor_search(f, module, cfg.degree_bound) {
        return Ok(vec![vec![ChainLayerEntry {
            element: f.clone(),
            cert,
        }]]);
    }
    if depth == 0 {
        return Err(SearchFailure::DepthExhausted {
            max_depth: cfg.max_depth,
        });
    }
    full_descent(module, f, cfg, depth)
}

/// Rank 1 case: find `f^(2k) + sum s_i^2` in the ideal, adjoin `f^k` with
/// the squares as its certificate, then halve the exponent down to 1. Each
/// step holds because `2 ceil(k/2) >= k`.
fn square_chain(
    ideal: &Submodule,
    f: &ModVec,
    cfg: &SearchConfig,
) -> Result<Vec<Vec<ChainLayerEntry>>, SearchFailure> {
    let poly = f.entry(0);
    let sc = square_search(
        poly,
        ideal,
        cfg.k_max,
        cfg.degree_bound,
        cfg.numeric,
        cfg.denominator_cap,
    )
    .ok_or(SearchFailure::SquareBoundExhausted {
        coord: 0,
        k_max: cfg.k_max,
        degree_bound: cfg.degree_bound,
    })?;
    let wrap = |p: Poly| ModVec::new(vec![p]);
    let mut layers = vec![vec![ChainLayerEntry {
        element: wrap(poly.pow(sc.k)),
        cert: TensorCert {
            f: wrap(poly.pow(sc.k)),
            squares: sc.squares.iter().cloned().map(wrap).collect(),
            witnesses: None,
        },
    }]];
    let mut k = sc.k;
    while k > 1 {
        k = k.div_ceil(2);
        layers.push(vec![ChainLayerEntry {
            element: wrap(poly.pow(k)),
            cert: TensorCert {
                f: wrap(poly.pow(k)),
                squares: vec![],
                witnesses: None,
            },
        }]);
    }
    Ok(layers)
}

/// Distinct generator entries up to a scalar, one representative each,
/// ordered by ascending entry degree and then position. Low degree pivots
/// keep the derived data small.
fn pivot_classes(gens: &[ModVec]) -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        for l in 0..g.rank() {
            if let Some(d) = g.entry(l).total_degree() {
                cells.push((d, k, l));
            }
        }
    }
    cells.sort();
    let mut monic_seen: Vec<Poly> = Vec::new();
    let mut reps = Vec::new();
    for (_, k, l) in cells {
        let p = gens[k].entry(l);
        let lead = &p.leading().expect("nonzero entry").coeff;
        let monic = p.scale(&(num_rational::BigRational::one() / lead));
        if monic_seen.contains(&monic) {
            continue;
        }
        monic_seen.push(monic);
        reps.push((k, l));
    }
    reps
}

/// Exponent vectors of the given length summing to `total`, first position
/// descending.
fn exponent_vectors(len: usize, total: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in exponent_vectors(len - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The elimination descent. Stage one certifies `p*f` for one representative
/// `p` of every generator-entry class by recursing on the eliminated system
/// and lifting the resulting layers back with a zero coordinate. Stage two
/// finds a square combination over the entry ideal for every nonzero target
/// coordinate, putting `f_j^(t_j) * f` in reach. Stage three walks the total
/// exponent down: each product `f^beta * f` with |beta| = s splits through
/// the halved self identity into coordinates `f_j f^(2 beta) * f` of larger
/// total exponent, so the layers close under extension until `f` itself
/// lands. Elements already inside the current module are skipped.
fn full_descent(
    module: &Submodule,
    f: &ModVec,
    cfg: &SearchConfig,
    depth: u32,
) -> Result<Vec<Vec<ChainLayerEntry>>, SearchFailure> {
    let ctx: Arc<crate::poly::Context> = module.ctx().clone();
    let n = module.rank();
    let gens = module.generators().to_vec();
    let mut cur_gens = gens.clone();
    let mut cur = module.clone();
    let mut layers: Vec<Vec<ChainLayerEntry>> = Vec::new();
    let adjoin = |layer: Vec<ChainLayerEntry>,
                      cur: &mut Submodule,
                      cur_gens: &mut Vec<ModVec>,
                      layers: &mut Vec<Vec<ChainLayerEntry>>| {
        if layer.is_empty() {
            return;
        }
        cur_gens.extend(layer.iter().map(|e| e.element.clone()));
        layers.push(layer);
        *cur = Submodule::new(&ctx, n, cur_gens.clone());
    };

    for (k, l) in pivot_classes(&gens) {
        let scaled = f.scale(gens[k].entry(l));
        if cur.contains(&scaled) {
            continue;
        }
        let step = eliminate(module, f, k, l).expect("indices from the generator table");
        let derived = Submodule::new(&ctx, n - 1, step.derived_gens.clone());
        let sub_layers = descend(&derived, &step.derived_target, cfg, depth - 1).map_err(
            |cause| SearchFailure::PivotBranch {
                gen: k,
                coord: l,
                cause: Box::new(cause),
            },
        )?;
        for sub in sub_layers {
            let mut lifted = Vec::new();
            for entry in sub {
                let element = entry.element.insert_zero(l);
                if cur.contains(&element) {
                    continue;
                }
                // Witnesses index the derived generator list; after the
                // lift membership is rechecked against the full module.
                let cert = TensorCert {
                    f: element.clone(),
                    squares: entry
                        .cert
                        .squares
                        .iter()
                        .map(|s| s.insert_zero(l))
                        .collect(),
                    witnesses: None,
                };
                lifted.push(ChainLayerEntry { element, cert });
            }
            adjoin(lifted, &mut cur, &mut cur_gens, &mut layers);
        }
        debug_assert!(cur.contains(&scaled), "lift must reach the scaled target");
    }

    let ideal = entry_ideal(module);
    let mut support = Vec::new();
    let mut total_exp: u32 = 1;
    let mut square_layer = Vec::new();
    for j in 0..n {
        let fj = f.entry(j);
        if fj.is_zero() {
            continue;
        }
        let sc = square_search(
            fj,
            &ideal,
            cfg.k_max,
            cfg.degree_bound,
            cfg.numeric,
            cfg.denominator_cap,
        )
        .ok_or(SearchFailure::SquareBoundExhausted {
            coord: j,
            k_max: cfg.k_max,
            degree_bound: cfg.degree_bound,
        })?;
        support.push((j, fj.clone()));
        total_exp += sc.k - 1;
        let element = f.scale(&fj.pow(sc.k));
        if cur.contains(&element) {
            continue;
        }
        square_layer.push(ChainLayerEntry {
            element: element.clone(),
            cert: TensorCert {
                f: element,
                squares: sc.squares.iter().map(|s| f.scale(s)).collect(),
                witnesses: None,
            },
        });
    }
    adjoin(square_layer, &mut cur, &mut cur_gens, &mut layers);

    for s in (0..total_exp).rev() {
        let mut layer = Vec::new();
        for beta in exponent_vectors(support.len(), s) {
            let mut factor = Poly::one(&ctx);
            for ((_, fj), e) in support.iter().zip(&beta) {
                factor = &factor * &fj.pow(*e);
            }
            let element = f.scale(&factor);
            if cur.contains(&element) {
                continue;
            }
            layer.push(ChainLayerEntry {
                element: element.clone(),
                cert: TensorCert {
                    f: element,
                    squares: vec![],
                    witnesses: None,
                },
            });
        }
        adjoin(layer, &mut cur, &mut cur_gens, &mut layers);
    }
    debug_assert!(cur.contains(f), "exponent walk must end at the target");
    Ok(layers)
}
