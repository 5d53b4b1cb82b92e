//! Certificate files: square, tensor, and chain payloads with polynomial
//! strings, pinned to an instance by hash and stamped with the bounds that
//! produced them. Rendering is canonical so identical runs emit identical
//! bytes.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use serde::{Deserialize, Serialize};

use realnull_core::cert::{
    ChainCert, ChainLayerEntry, Side, SquareCert, TensorCert, TensorWitness,
};
use realnull_core::groebner::Submodule;
use realnull_core::poly::Context;

use crate::instance::{parse_poly, parse_vector, render_vector};

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub tool_version: String,
    pub seed: u64,
    pub degree_bound: u32,
    pub k_max: u32,
    pub chain_depth: u32,
    pub samples: usize,
    pub numeric_sos: bool,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct SquarePayload {
    pub f: String,
    pub k: u32,
    pub squares: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cofactors: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct WitnessPayload {
    pub gen: usize,
    pub side: String,
    pub factor: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct TensorPayload {
    pub element: Vec<String>,
    pub squares: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<WitnessPayload>>,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct ChainEntryPayload {
    pub element: Vec<String>,
    pub cert: TensorPayload,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct ChainPayload {
    pub layers: Vec<Vec<ChainEntryPayload>>,
    pub target: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct CertFile {
    pub kind: String,
    pub instance_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square: Option<SquarePayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor: Option<TensorPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainPayload>,
    pub metadata: Metadata,
}

impl CertFile {
    pub fn load(path: &Path) -> Result<CertFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read certificate file {}", path.display()))?;
        let file: CertFile = serde_json::from_str(&text)
            .with_context(|| format!("certificate file {} is not valid", path.display()))?;
        match file.kind.as_str() {
            "square" if file.square.is_some() => {}
            "tensor" if file.tensor.is_some() => {}
            "chain" if file.chain.is_some() => {}
            "square" | "tensor" | "chain" => {
                bail!("certificate kind {:?} has no matching payload", file.kind)
            }
            other => bail!("unknown certificate kind {other:?}"),
        }
        Ok(file)
    }

    /// Canonical bytes: serde maps are key-sorted, so serializing the typed
    /// structure is already deterministic.
    pub fn canonical_json(&self) -> String {
        serde_json::to_value(self).unwrap().to_string()
    }
}

pub fn side_to_str(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn side_from_str(s: &str) -> Result<Side> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(anyhow!("witness side must be left or right, got {other:?}")),
    }
}

pub fn tensor_to_payload(cert: &TensorCert) -> TensorPayload {
    TensorPayload {
        element: render_vector(&cert.f),
        squares: cert.squares.iter().map(render_vector).collect(),
        witnesses: cert.witnesses.as_ref().map(|ws| {
            ws.iter()
                .map(|w| WitnessPayload {
                    gen: w.gen,
                    side: side_to_str(w.side).to_string(),
                    factor: render_vector(&w.factor),
                })
                .collect()
        }),
    }
}

pub fn tensor_from_payload(
    ctx: &Arc<Context>,
    n: usize,
    payload: &TensorPayload,
) -> Result<TensorCert> {
    Ok(TensorCert {
        f: parse_vector(ctx, n, &payload.element)?,
        squares: payload
            .squares
            .iter()
            .map(|s| parse_vector(ctx, n, s))
            .collect::<Result<_>>()?,
        witnesses: payload
            .witnesses
            .as_ref()
            .map(|ws| {
                ws.iter()
                    .map(|w| {
                        Ok(TensorWitness {
                            gen: w.gen,
                            side: side_from_str(&w.side)?,
                            factor: parse_vector(ctx, n, &w.factor)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?,
    })
}

pub fn square_from_payload(ctx: &Arc<Context>, payload: &SquarePayload) -> Result<SquareCert> {
    Ok(SquareCert {
        f: parse_poly(ctx, &payload.f)?,
        k: payload.k,
        squares: payload
            .squares
            .iter()
            .map(|s| parse_poly(ctx, s))
            .collect::<Result<_>>()?,
        cofactors: payload
            .cofactors
            .as_ref()
            .map(|cs| cs.iter().map(|c| parse_poly(ctx, c)).collect::<Result<_>>())
            .transpose()?,
    })
}

pub fn chain_to_payload(cert: &ChainCert) -> ChainPayload {
    ChainPayload {
        layers: cert
            .layers
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|e| ChainEntryPayload {
                        element: render_vector(&e.element),
                        cert: tensor_to_payload(&e.cert),
                    })
                    .collect()
            })
            .collect(),
        target: render_vector(&cert.target),
    }
}

/// The chain base is not stored in the file; it is the module of the
/// instance the certificate is pinned to.
pub fn chain_from_payload(
    base: &Submodule,
    payload: &ChainPayload,
) -> Result<ChainCert> {
    let ctx = base.ctx();
    let n = base.rank();
    Ok(ChainCert {
        base: base.clone(),
        layers: payload
            .layers
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|e| {
                        Ok(ChainLayerEntry {
                            element: parse_vector(ctx, n, &e.element)?,
                            cert: tensor_from_payload(ctx, n, &e.cert)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?,
        target: parse_vector(ctx, n, &payload.target)?,
    })
}
