//! Certificates for the membership claims the rest of the crate produces,
//! plus their verifiers.
//!
//! A certificate either carries explicit witnesses, in which case the exact
//! arithmetic identity they spell out is the contract, or it omits them, in
//! which case verification reduces the claimed combination against a Groebner
//! basis. When witnesses are present a failed identity rejects the
//! certificate even if the underlying membership happens to hold.

use std::fmt;

use crate::error::Error;
use crate::freemod::{MatPoly, ModVec};
use crate::groebner::Submodule;
use crate::poly::Poly;

/// Outcome of a verifier. `Invalid` means a well-formed certificate whose
/// claim does not check out; malformed input is reported as an `Err` at the
/// call site instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(Invalidity),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Why a certificate was rejected. `residual` holds the nonzero normal form
/// or identity defect when there is one; `layer` points into a chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invalidity {
    pub message: String,
    pub residual: Option<ModVec>,
    pub layer: Option<usize>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "valid"),
            Verdict::Invalid(inv) => match inv.layer {
                Some(l) => write!(f, "invalid at layer {}: {}", l, inv.message),
                None => write!(f, "invalid: {}", inv.message),
            },
        }
    }
}

fn invalid(message: &str, residual: Option<ModVec>, layer: Option<usize>) -> Verdict {
    Verdict::Invalid(Invalidity {
        message: message.to_string(),
        residual,
        layer,
    })
}

/// Claim: `f^(2k) + sum_i squares[i]^2` lies in a given ideal.
///
/// When `cofactors` is set it must have one entry per ideal generator and
/// spell out the combination exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareCert {
    pub f: Poly,
    pub k: u32,
    pub squares: Vec<Poly>,
    pub cofactors: Option<Vec<Poly>>,
}

/// Which side of a tensor product the recorded factor sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One summand of a witnessed tensor identity: `factor (x) gen` for `Left`,
/// `gen (x) factor` for `Right`. `gen` indexes the module's generator list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorWitness {
    pub gen: usize,
    pub side: Side,
    pub factor: ModVec,
}

/// Claim: `f (x) f + sum_i squares[i] (x) squares[i]` lies in the two-sided
/// tensor module of a given submodule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorCert {
    pub f: ModVec,
    pub squares: Vec<ModVec>,
    pub witnesses: Option<Vec<TensorWitness>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLayerEntry {
    pub element: ModVec,
    pub cert: TensorCert,
}

/// A tower of submodule extensions. Layer `l` is verified against the base
/// extended by every element of the layers before it, and the target must
/// reduce to zero in the module the last layer leaves behind.
#[derive(Clone, Debug)]
pub struct ChainCert {
    pub base: Submodule,
    pub layers: Vec<Vec<ChainLayerEntry>>,
    pub target: ModVec,
}

fn check_vec(v: &ModVec, module: &Submodule) -> Result<(), Error> {
    if v.ctx() != module.ctx() {
        return Err(Error::ContextMismatch);
    }
    if v.rank() != module.rank() {
        return Err(Error::RankMismatch {
            expected: module.rank(),
            found: v.rank(),
        });
    }
    Ok(())
}

/// Checks a square combination against a rank 1 module read as an ideal.
pub fn verify_square(cert: &SquareCert, ideal: &Submodule) -> Result<Verdict, Error> {
    if ideal.rank() != 1 {
        return Err(Error::RankMismatch {
            expected: 1,
            found: ideal.rank(),
        });
    }
    if cert.k == 0 {
        return Err(Error::Malformed(
            "square certificate exponent must be positive".into(),
        ));
    }
    let ctx = ideal.ctx();
    if cert.f.ctx() != ctx {
        return Err(Error::ContextMismatch);
    }
    for s in &cert.squares {
        if s.ctx() != ctx {
            return Err(Error::ContextMismatch);
        }
    }
    let mut lhs = cert.f.pow(2 * cert.k);
    for s in &cert.squares {
        lhs = &lhs + &(s * s);
    }
    match &cert.cofactors {
        Some(cof) => {
            let gens = ideal.generators();
            if cof.len() != gens.len() {
                return Err(Error::Malformed(format!(
                    "certificate lists {} cofactors for {} ideal generators",
                    cof.len(),
                    gens.len()
                )));
            }
            for p in cof {
                if p.ctx() != ctx {
                    return Err(Error::ContextMismatch);
                }
            }
            let mut rhs = Poly::zero(ctx);
            for (p, g) in cof.iter().zip(gens) {
                rhs = &rhs + &(p * g.entry(0));
            }
            if lhs == rhs {
                Ok(Verdict::Valid)
            } else {
                Ok(invalid(
                    "cofactor identity does not reproduce the square combination",
                    Some(ModVec::new(vec![&lhs - &rhs])),
                    None,
                ))
            }
        }
        None => {
            let nf = ideal.normal_form(&ModVec::new(vec![lhs]));
            if nf.is_zero() {
                Ok(Verdict::Valid)
            } else {
                Ok(invalid(
                    "square combination has a nonzero normal form in the ideal",
                    Some(nf),
                    None,
                ))
            }
        }
    }
}

/// Checks a tensor combination against a submodule.
pub fn verify_tensor(cert: &TensorCert, module: &Submodule) -> Result<Verdict, Error> {
    let mut tensor_cache = None;
    verify_tensor_cached(cert, module, &mut tensor_cache)
}

// `tensor_cache` lets a caller reuse one tensor module, and the Groebner
// basis inside it, across several certificates at the same level.
fn verify_tensor_cached(
    cert: &TensorCert,
    module: &Submodule,
    tensor_cache: &mut Option<Submodule>,
) -> Result<Verdict, Error> {
    check_vec(&cert.f, module)?;
    for s in &cert.squares {
        check_vec(s, module)?;
    }
    let mut combo = cert.f.tensor(&cert.f);
    for s in &cert.squares {
        combo = &combo + &s.tensor(s);
    }
    match &cert.witnesses {
        Some(ws) => {
            let gens = module.generators();
            let mut rhs = MatPoly::zero(module.ctx(), module.rank());
            for w in ws {
                if w.gen >= gens.len() {
                    return Err(Error::IndexOutOfRange {
                        index: w.gen,
                        limit: gens.len(),
                    });
                }
                check_vec(&w.factor, module)?;
                let g = &gens[w.gen];
                let term = match w.side {
                    Side::Left => w.factor.tensor(g),
                    Side::Right => g.tensor(&w.factor),
                };
                rhs = &rhs + &term;
            }
            if combo == rhs {
                Ok(Verdict::Valid)
            } else {
                Ok(invalid(
                    "witness expansion does not reproduce the tensor combination",
                    Some((&combo - &rhs).flatten()),
                    None,
                ))
            }
        }
        None => {
            let tm = tensor_cache.get_or_insert_with(|| module.tensor_module());
            let nf = tm.normal_form(&combo.flatten());
            if nf.is_zero() {
                Ok(Verdict::Valid)
            } else {
                Ok(invalid(
                    "tensor combination has a nonzero normal form in the tensor module",
                    Some(nf),
                    None,
                ))
            }
        }
    }
}

/// Walks a chain certificate against the module it claims to extend.
pub fn verify_chain(cert: &ChainCert, module: &Submodule) -> Result<Verdict, Error> {
    if cert.base.ctx() != module.ctx() {
        return Err(Error::ContextMismatch);
    }
    if cert.base.rank() != module.rank() {
        return Err(Error::RankMismatch {
            expected: module.rank(),
            found: cert.base.rank(),
        });
    }
    check_vec(&cert.target, module)?;
    if !cert.base.equals(module) {
        return Ok(invalid(
            "chain base generates a different submodule than the one under test",
            None,
            None,
        ));
    }
    let mut gens = module.generators().to_vec();
    let mut cur = module.clone();
    for (l, layer) in cert.layers.iter().enumerate() {
        let mut tensor_cache = None;
        for entry in layer {
            check_vec(&entry.element, module)?;
            if entry.cert.f != entry.element {
                return Ok(invalid(
                    "layer element differs from the element its certificate is about",
                    None,
                    Some(l),
                ));
            }
            match verify_tensor_cached(&entry.cert, &cur, &mut tensor_cache)? {
                Verdict::Valid => {}
                Verdict::Invalid(inv) => {
                    return Ok(Verdict::Invalid(Invalidity {
                        layer: Some(l),
                        ..inv
                    }));
                }
            }
        }
        if !layer.is_empty() {
            gens.extend(layer.iter().map(|e| e.element.clone()));
            cur = Submodule::new(module.ctx(), module.rank(), gens.clone());
        }
    }
    let nf = cur.normal_form(&cert.target);
    if nf.is_zero() {
        Ok(Verdict::Valid)
    } else {
        Ok(invalid(
            "target does not reduce to zero in the final extended module",
            Some(nf),
            None,
        ))
    }
}
