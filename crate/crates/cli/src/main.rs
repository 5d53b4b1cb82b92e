//! Batch front end. Every command reads JSON files, prints one JSON report
//! to stdout and a short human line to stderr, and exits 0 on the
//! affirmative outcome, 1 on a negative verdict or counterexample, 2 on
//! anything malformed.

mod certfile;
mod instance;

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use realnull_core::cert::{verify_chain, verify_square, verify_tensor, Verdict};
use realnull_core::leftideal::{matrix_saturation_test, LeftIdeal};
use realnull_core::radical::{certify_radical_membership, eliminate, SearchConfig, SearchFailure};
use realnull_core::zeroset::{saturation_test, SampleConfig, SaturationVerdict};

use certfile::{
    chain_from_payload, chain_to_payload, square_from_payload, tensor_from_payload, CertFile,
    Metadata,
};
use instance::{render_matrix, render_vector, Instance};

#[derive(Parser)]
#[command(name = "realnull", version, about = "Certificates for module and matrix-ideal membership over Q[x1..xd]")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct SearchOpts {
    /// Witness degree bound for the linear and Gram passes.
    #[arg(long, default_value_t = 2)]
    degree_bound: u32,
    /// Largest exponent tried for square combinations.
    #[arg(long, default_value_t = 3)]
    k_max: u32,
    /// Maximum elimination recursion depth.
    #[arg(long, default_value_t = 4)]
    chain_depth: u32,
    /// Sampling budget for the refutation filter.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Seed for all randomized sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sampling (results do not depend on this).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Numeric sum-of-squares pass behind the exact gate.
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    numeric_sos: Toggle,
}

#[derive(Args)]
struct SampleOpts {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a certificate file against an instance file.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Decide plain membership of the target and print its normal form.
    Member {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Cross-multiply a coordinate away (1-based generator and coordinate).
    Eliminate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(short = 'k', long)]
        gen: usize,
        #[arg(short = 'l', long)]
        coord: usize,
    },
    /// Search for a chain certificate for the target.
    Search {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        opts: SearchOpts,
        /// Also write the certificate to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the zero set and try to refute saturation membership.
    Sample {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        opts: SampleOpts,
    },
    /// Matrix-ideal queries through the row module.
    Matrix {
        #[command(subcommand)]
        action: MatrixCmd,
    },
}

#[derive(Subcommand)]
enum MatrixCmd {
    /// Print the row generators and their reduced basis.
    Rows {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Lift a module instance to matrix generators.
    Lift {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Sample the zero set against the matrix target.
    Saturate {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        opts: SampleOpts,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn emit(report: &Value, human: &str) {
    println!("{report}");
    eprintln!("{human}");
}

fn rationals(xs: &[num_rational::BigRational]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Verify { instance, certificate } => cmd_verify(&instance, &certificate),
        Cmd::Member { instance } => cmd_member(&instance),
        Cmd::Eliminate { instance, gen, coord } => cmd_eliminate(&instance, gen, coord),
        Cmd::Search { instance, opts, out } => cmd_search(&instance, &opts, out.as_deref()),
        Cmd::Sample { instance, opts } => cmd_sample(&instance, &opts),
        Cmd::Matrix { action } => match action {
            MatrixCmd::Rows { instance } => cmd_matrix_rows(&instance),
            MatrixCmd::Lift { instance } => cmd_matrix_lift(&instance),
            MatrixCmd::Saturate { instance, opts } => cmd_matrix_saturate(&instance, &opts),
        },
    }
}

fn cmd_verify(instance: &std::path::Path, certificate: &std::path::Path) -> Result<i32> {
    let inst = Instance::load(instance)?;
    let cert = CertFile::load(certificate)?;
    let have = inst.hash();
    if cert.instance_hash != have {
        bail!(
            "certificate is pinned to instance {} but this instance hashes to {have}",
            cert.instance_hash
        );
    }
    let module = inst.module();
    let verdict = match cert.kind.as_str() {
        "square" => {
            if module.rank() != 1 {
                bail!("square certificates need a rank 1 instance");
            }
            let sq = square_from_payload(&inst.ctx, cert.square.as_ref().unwrap())?;
            verify_square(&sq, &module)
        }
        "tensor" => {
            let tc = tensor_from_payload(&inst.ctx, inst.n, cert.tensor.as_ref().unwrap())?;
            verify_tensor(&tc, &module)
        }
        "chain" => {
            let ch = chain_from_payload(&module, cert.chain.as_ref().unwrap())?;
            verify_chain(&ch, &module)
        }
        _ => unreachable!("kinds are checked on load"),
    }
    .map_err(|e| anyhow!("certificate does not fit the instance: {e}"))?;
    match verdict {
        Verdict::Valid => {
            emit(&json!({"verdict": "valid"}), "valid");
            Ok(0)
        }
        Verdict::Invalid(inv) => {
            let mut report = json!({"verdict": "invalid", "detail": inv.message});
            let obj = report.as_object_mut().unwrap();
            if let Some(layer) = inv.layer {
                obj.insert("layer".into(), json!(layer));
            }
            if let Some(residual) = &inv.residual {
                obj.insert("residual".into(), json!(render_vector(residual)));
            }
            emit(&report, &format!("invalid: {}", inv.message));
            Ok(1)
        }
    }
}

fn cmd_member(instance: &std::path::Path) -> Result<i32> {
    let inst = Instance::load(instance)?;
    let module = inst.module();
    if let Some(fm) = &inst.matrix_target {
        let forms: Vec<Vec<String>> = fm
            .rows()
            .iter()
            .map(|r| render_vector(&module.normal_form(r)))
            .collect();
        let member = fm.rows().iter().all(|r| module.contains(r));
        emit(
            &json!({"member": member, "row_normal_forms": forms}),
            if member { "member" } else { "not a member" },
        );
        return Ok(if member { 0 } else { 1 });
    }
    let target = inst
        .target
        .as_ref()
        .ok_or_else(|| anyhow!("instance has no target"))?;
    let nf = module.normal_form(target);
    let member = nf.is_zero();
    emit(
        &json!({"member": member, "normal_form": render_vector(&nf)}),
        if member { "member" } else { "not a member" },
    );
    Ok(if member { 0 } else { 1 })
}

fn cmd_eliminate(instance: &std::path::Path, gen: usize, coord: usize) -> Result<i32> {
    let inst = Instance::load(instance)?;
    if inst.module_generators().is_none() {
        bail!("eliminate needs a module instance");
    }
    let target = inst
        .target
        .as_ref()
        .ok_or_else(|| anyhow!("instance has no target"))?;
    if gen == 0 || coord == 0 {
        bail!("generator and coordinate indices are 1-based");
    }
    let module = inst.module();
    let step = eliminate(&module, target, gen - 1, coord - 1)
        .map_err(|e| anyhow!("cannot eliminate: {e}"))?;
    let derived: Vec<Vec<String>> = step.derived_gens.iter().map(render_vector).collect();
    let kept: Vec<Vec<String>> = step
        .derived_gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(render_vector)
        .collect();
    let report = json!({
        "pivot": {
            "gen": gen,
            "coord": coord,
            "entry": module.generators()[gen - 1].entry(coord - 1).to_string(),
        },
        "derived_generators": derived,
        "derived_instance": {
            "vars": inst.ctx.names(),
            "n": inst.n - 1,
            "generators": kept,
            "target": render_vector(&step.derived_target),
        },
    });
    emit(&report, "eliminated");
    Ok(0)
}

fn search_config(opts: &SearchOpts) -> SearchConfig {
    SearchConfig {
        degree_bound: opts.degree_bound,
        k_max: opts.k_max,
        max_depth: opts.chain_depth,
        sample_budget: opts.samples,
        numeric: matches!(opts.numeric_sos, Toggle::On),
        seed: opts.seed,
        threads: opts.threads,
        ..SearchConfig::default()
    }
}

fn cmd_search(
    instance: &std::path::Path,
    opts: &SearchOpts,
    out: Option<&std::path::Path>,
) -> Result<i32> {
    let inst = Instance::load(instance)?;
    if inst.module_generators().is_none() {
        bail!("search needs a module instance");
    }
    let target = inst
        .target
        .as_ref()
        .ok_or_else(|| anyhow!("instance has no target"))?;
    let module = inst.module();
    let cfg = search_config(opts);
    match certify_radical_membership(&module, target, &cfg) {
        Ok(chain) => {
            // Round-trip guarantee: never emit anything the verifier would
            // not accept.
            match verify_chain(&chain, &module) {
                Ok(Verdict::Valid) => {}
                other => bail!("search produced an unverifiable chain: {other:?}"),
            }
            let file = CertFile {
                kind: "chain".into(),
                instance_hash: inst.hash(),
                square: None,
                tensor: None,
                chain: Some(chain_to_payload(&chain)),
                metadata: Metadata {
                    tool_version: env!("CARGO_PKG_VERSION").into(),
                    seed: cfg.seed,
                    degree_bound: cfg.degree_bound,
                    k_max: cfg.k_max,
                    chain_depth: cfg.max_depth,
                    samples: cfg.sample_budget,
                    numeric_sos: cfg.numeric,
                },
            };
            let text = file.canonical_json();
            if let Some(path) = out {
                std::fs::write(path, format!("{text}\n"))?;
            }
            println!("{text}");
            eprintln!("certificate found: {} layers", chain.layers.len());
            Ok(0)
        }
        Err(failure) => {
            let mut report = json!({"failure": failure.to_string()});
            if let SearchFailure::SaturationRefuted(pp) = &failure {
                report.as_object_mut().unwrap().insert(
                    "counterexample".into(),
                    json!({"point": rationals(&pp.point), "vector": rationals(&pp.vector)}),
                );
            }
            emit(&report, &format!("no certificate: {failure}"));
            Ok(1)
        }
    }
}

fn sample_config(opts: &SampleOpts, inst: &Instance) -> SampleConfig {
    SampleConfig {
        samples: opts.samples,
        seed: opts.seed,
        threads: opts.threads,
        points: inst.points.clone(),
        ..SampleConfig::default()
    }
}

fn report_saturation(verdict: SaturationVerdict) -> (Value, &'static str, i32) {
    match verdict {
        SaturationVerdict::Consistent => (json!({"verdict": "consistent"}), "consistent", 0),
        SaturationVerdict::Counterexample(pp) => (
            json!({
                "verdict": "counterexample",
                "point": rationals(&pp.point),
                "vector": rationals(&pp.vector),
            }),
            "counterexample found",
            1,
        ),
    }
}

fn cmd_sample(instance: &std::path::Path, opts: &SampleOpts) -> Result<i32> {
    let inst = Instance::load(instance)?;
    let cfg = sample_config(opts, &inst);
    let verdict = if let Some(fm) = &inst.matrix_target {
        let mats = inst.matrix_generators().unwrap();
        let ideal = LeftIdeal::new(&inst.ctx, inst.n, mats.to_vec());
        matrix_saturation_test(fm, &ideal, &cfg)
    } else {
        let target = inst
            .target
            .as_ref()
            .ok_or_else(|| anyhow!("instance has no target"))?;
        saturation_test(target, &inst.module(), &cfg)
    };
    let (report, line, code) = report_saturation(verdict);
    emit(&report, line);
    Ok(code)
}

fn cmd_matrix_rows(instance: &std::path::Path) -> Result<i32> {
    let inst = Instance::load(instance)?;
    let mats = inst
        .matrix_generators()
        .ok_or_else(|| anyhow!("rows needs a matrix instance"))?;
    let raw: Vec<Vec<String>> = mats
        .iter()
        .flat_map(|m| m.rows().iter().map(render_vector))
        .collect();
    let module = inst.module();
    let basis: Vec<Vec<String>> = module.groebner_basis().iter().map(render_vector).collect();
    emit(
        &json!({"row_generators": raw, "reduced_basis": basis}),
        "row module computed",
    );
    Ok(0)
}

fn cmd_matrix_lift(instance: &std::path::Path) -> Result<i32> {
    let inst = Instance::load(instance)?;
    if inst.module_generators().is_none() {
        bail!("lift needs a module instance");
    }
    let ideal = LeftIdeal::from_module(&inst.module());
    let mats: Vec<Vec<Vec<String>>> = ideal.generators().iter().map(render_matrix).collect();
    emit(&json!({"matrix_generators": mats}), "lifted");
    Ok(0)
}

fn cmd_matrix_saturate(instance: &std::path::Path, opts: &SampleOpts) -> Result<i32> {
    let inst = Instance::load(instance)?;
    let mats = inst
        .matrix_generators()
        .ok_or_else(|| anyhow!("saturate needs a matrix instance"))?;
    let fm = inst
        .matrix_target
        .as_ref()
        .ok_or_else(|| anyhow!("instance has no matrix_target"))?;
    let ideal = LeftIdeal::new(&inst.ctx, inst.n, mats.to_vec());
    let cfg = sample_config(opts, &inst);
    let verdict = matrix_saturation_test(fm, &ideal, &cfg);
    let (report, line, code) = report_saturation(verdict);
    emit(&report, line);
    Ok(code)
}
