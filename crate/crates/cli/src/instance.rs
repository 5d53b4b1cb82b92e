//! Instance files. One JSON schema covers both views: module instances list
//! generator vectors, matrix instances list square generator matrices, and
//! every polynomial is a string under the declared variable names. Loading
//! is strict; the canonical re-rendering defines the instance hash that
//! certificate files pin themselves to.

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use realnull_core::freemod::{MatPoly, ModVec};
use realnull_core::groebner::Submodule;
use realnull_core::poly::{Context, MonomialOrder, Poly};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    vars: Vec<String>,
    n: usize,
    #[serde(default)]
    generators: Option<Vec<Vec<String>>>,
    #[serde(default)]
    matrix_generators: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default)]
    target: Option<Vec<String>>,
    #[serde(default)]
    matrix_target: Option<Vec<Vec<String>>>,
    #[serde(default)]
    points: Option<Vec<Vec<String>>>,
}

pub enum Generators {
    Module(Vec<ModVec>),
    Matrix(Vec<MatPoly>),
}

pub struct Instance {
    pub ctx: Arc<Context>,
    pub n: usize,
    pub generators: Generators,
    pub target: Option<ModVec>,
    pub matrix_target: Option<MatPoly>,
    pub points: Vec<Vec<BigRational>>,
}

pub fn parse_poly(ctx: &Arc<Context>, s: &str) -> Result<Poly> {
    Poly::parse(ctx, s).map_err(|e| anyhow!("cannot parse polynomial {s:?}: {e}"))
}

pub fn parse_vector(ctx: &Arc<Context>, n: usize, entries: &[String]) -> Result<ModVec> {
    if entries.len() != n {
        bail!("vector has {} entries, expected {n}", entries.len());
    }
    Ok(ModVec::new(
        entries
            .iter()
            .map(|s| parse_poly(ctx, s))
            .collect::<Result<_>>()?,
    ))
}

pub fn parse_matrix(ctx: &Arc<Context>, n: usize, rows: &[Vec<String>]) -> Result<MatPoly> {
    if rows.len() != n {
        bail!("matrix has {} rows, expected {n}", rows.len());
    }
    Ok(MatPoly::from_rows(
        rows.iter()
            .map(|r| parse_vector(ctx, n, r))
            .collect::<Result<_>>()?,
    ))
}

pub fn render_vector(v: &ModVec) -> Vec<String> {
    v.entries().iter().map(|p| p.to_string()).collect()
}

pub fn render_matrix(m: &MatPoly) -> Vec<Vec<String>> {
    m.rows().iter().map(render_vector).collect()
}

fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|e| anyhow!("cannot parse rational {s:?}: {e}"))
}

impl Instance {
    pub fn load(path: &Path) -> Result<Instance> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read instance file {}", path.display()))?;
        let raw: RawInstance = serde_json::from_str(&text)
            .with_context(|| format!("instance file {} is not valid", path.display()))?;
        Instance::from_raw(raw)
    }

    fn from_raw(raw: RawInstance) -> Result<Instance> {
        let ctx = Context::with_names(raw.vars, MonomialOrder::GrevLex)
            .map_err(|e| anyhow!("bad variable list: {e}"))?;
        let n = raw.n;
        if n == 0 {
            bail!("n must be at least 1");
        }
        let generators = match (raw.generators, raw.matrix_generators) {
            (Some(_), Some(_)) => {
                bail!("give either generators or matrix_generators, not both")
            }
            (None, None) => bail!("one of generators or matrix_generators is required"),
            (Some(gens), None) => {
                let parsed = gens
                    .iter()
                    .map(|g| parse_vector(&ctx, n, g))
                    .collect::<Result<Vec<_>>>()?;
                for (i, g) in parsed.iter().enumerate() {
                    if g.is_zero() {
                        bail!("generator {} is the zero vector; drop it from the file", i + 1);
                    }
                }
                Generators::Module(parsed)
            }
            (None, Some(mats)) => Generators::Matrix(
                mats.iter()
                    .map(|m| parse_matrix(&ctx, n, m))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let target = raw
            .target
            .as_ref()
            .map(|t| parse_vector(&ctx, n, t))
            .transpose()?;
        let matrix_target = raw
            .matrix_target
            .as_ref()
            .map(|t| parse_matrix(&ctx, n, t))
            .transpose()?;
        if matches!(generators, Generators::Module(_)) && matrix_target.is_some() {
            bail!("matrix_target needs matrix_generators");
        }
        let d = ctx.vars();
        let mut points = Vec::new();
        for (i, p) in raw.points.unwrap_or_default().iter().enumerate() {
            if p.len() != d {
                bail!("point {} has {} coordinates, expected {d}", i + 1, p.len());
            }
            points.push(p.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?);
        }
        Ok(Instance {
            ctx,
            n,
            generators,
            target,
            matrix_target,
            points,
        })
    }

    /// The module every query runs against: the generators themselves in
    /// module mode, the rows of every generator in matrix mode.
    pub fn module(&self) -> Submodule {
        match &self.generators {
            Generators::Module(gens) => Submodule::new(&self.ctx, self.n, gens.clone()),
            Generators::Matrix(mats) => {
                let rows = mats.iter().flat_map(|m| m.rows().iter().cloned()).collect();
                Submodule::new(&self.ctx, self.n, rows)
            }
        }
    }

    pub fn matrix_generators(&self) -> Option<&[MatPoly]> {
        match &self.generators {
            Generators::Matrix(mats) => Some(mats),
            Generators::Module(_) => None,
        }
    }

    pub fn module_generators(&self) -> Option<&[ModVec]> {
        match &self.generators {
            Generators::Module(gens) => Some(gens),
            Generators::Matrix(_) => None,
        }
    }

    /// Canonical form: declared names, canonically rendered polynomials,
    /// sorted keys, no optional fields unless present. Byte-stable.
    pub fn canonical_json(&self) -> String {
        let mut value = json!({
            "vars": self.ctx.names(),
            "n": self.n,
        });
        let obj = value.as_object_mut().unwrap();
        match &self.generators {
            Generators::Module(gens) => {
                obj.insert(
                    "generators".into(),
                    Value::from(gens.iter().map(render_vector).collect::<Vec<_>>()),
                );
            }
            Generators::Matrix(mats) => {
                obj.insert(
                    "matrix_generators".into(),
                    serde_json::to_value(mats.iter().map(render_matrix).collect::<Vec<_>>())
                        .unwrap(),
                );
            }
        }
        if let Some(t) = &self.target {
            obj.insert("target".into(), Value::from(render_vector(t)));
        }
        if let Some(t) = &self.matrix_target {
            obj.insert("matrix_target".into(), serde_json::to_value(render_matrix(t)).unwrap());
        }
        if !self.points.is_empty() {
            let pts: Vec<Vec<String>> = self
                .points
                .iter()
                .map(|p| p.iter().map(|c| c.to_string()).collect())
                .collect();
            obj.insert("points".into(), serde_json::to_value(pts).unwrap());
        }
        value.to_string()
    }

    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        hex::encode(hasher.finalize())
    }
}
