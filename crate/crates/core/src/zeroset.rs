//! Real zero sets of submodules: pairing generators with rational points,
//! exact kernel computation, and sampling-based saturation checks.
//!
//! The zero set collects pairs (a, u) where a is a point of Q^d, u a vector
//! of Q^n, and every generator evaluated at a pairs to zero with u. An
//! element lies in the saturation when it annihilates all such pairs.
//! Sampling can refute that exactly; a consistent sweep is evidence only.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::freemod::ModVec;
use crate::groebner::Submodule;
use crate::linalg::QMat;

/// A point of Q^d together with a vector of Q^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointPair {
    pub point: Vec<BigRational>,
    pub vector: Vec<BigRational>,
}

impl fmt::Display for PointPair {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[BigRational]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(
            out,
            "a = ({}), u = ({})",
            join(&self.point),
            join(&self.vector)
        )
    }
}

/// Controls the sample stream. The stream starts with the origin, then the
/// signed standard basis points, then caller-supplied points, then seeded
/// random points with coordinates in the box and denominators up to the
/// bound; `samples` is the total prefix length taken from that stream.
#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub samples: usize,
    pub coord_min: BigRational,
    pub coord_max: BigRational,
    pub denominator_bound: u32,
    pub points: Vec<Vec<BigRational>>,
    pub seed: u64,
    pub threads: usize,
}

impl Default for SampleConfig {
    fn default() -> SampleConfig {
        SampleConfig {
            samples: 200,
            coord_min: BigRational::from_integer((-10).into()),
            coord_max: BigRational::from_integer(10.into()),
            denominator_bound: 8,
            points: vec![],
            seed: 0,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SaturationVerdict {
    Consistent,
    Counterexample(PointPair),
}

fn check_point_dim(point: &[BigRational], module: &Submodule) -> Result<(), Error> {
    let d = module.ctx().vars();
    if point.len() != d {
        return Err(Error::Malformed(format!(
            "point has {} coordinates but the ring has {} variables",
            point.len(),
            d
        )));
    }
    Ok(())
}

/// True when every generator of `module` pairs to zero with `pp`.
pub fn in_zero_set(pp: &PointPair, module: &Submodule) -> Result<bool, Error> {
    check_point_dim(&pp.point, module)?;
    if pp.vector.len() != module.rank() {
        return Err(Error::RankMismatch {
            expected: module.rank(),
            found: pp.vector.len(),
        });
    }
    Ok(module
        .generators()
        .iter()
        .all(|g| g.pair_at(&pp.point, &pp.vector).is_zero()))
}

/// Exact basis of { u : <g(point), u> = 0 for every generator g }.
pub fn kernel_at(
    point: &[BigRational],
    module: &Submodule,
) -> Result<Vec<Vec<BigRational>>, Error> {
    check_point_dim(point, module)?;
    Ok(kernel_at_unchecked(point, module))
}

fn kernel_at_unchecked(point: &[BigRational], module: &Submodule) -> Vec<Vec<BigRational>> {
    let n = module.rank();
    let rows: Vec<Vec<BigRational>> = module
        .generators()
        .iter()
        .map(|g| g.evaluate(point))
        .collect();
    if rows.is_empty() {
        // No constraints, so the kernel is everything.
        return (0..n)
            .map(|i| {
                let mut e = vec![BigRational::zero(); n];
                e[i] = BigRational::one();
                e
            })
            .collect();
    }
    QMat::from_rows(rows).nullspace()
}

fn scaled_bounds(cfg: &SampleConfig, den: i64) -> (i64, i64) {
    let den_rat = BigRational::from_integer(den.into());
    let lo = (&cfg.coord_min * &den_rat).ceil().to_integer();
    let hi = (&cfg.coord_max * &den_rat).floor().to_integer();
    (
        lo.to_i64().expect("coordinate bound out of range"),
        hi.to_i64().expect("coordinate bound out of range"),
    )
}

fn random_rational(rng: &mut ChaCha8Rng, cfg: &SampleConfig) -> BigRational {
    let mut den = rng.gen_range(1..=cfg.denominator_bound) as i64;
    let (mut lo, mut hi) = scaled_bounds(cfg, den);
    if lo > hi {
        // The box holds no rational with this denominator; the largest
        // allowed denominator gives the finest grid.
        den = cfg.denominator_bound as i64;
        (lo, hi) = scaled_bounds(cfg, den);
        assert!(
            lo <= hi,
            "coordinate box contains no rational within the denominator bound"
        );
    }
    let num = rng.gen_range(lo..=hi);
    BigRational::new(num.into(), den.into())
}

pub(crate) fn sample_points(cfg: &SampleConfig, d: usize) -> Vec<Vec<BigRational>> {
    assert!(cfg.samples >= 1, "sample count must be at least 1");
    assert!(cfg.coord_min <= cfg.coord_max, "empty coordinate box");
    assert!(
        cfg.denominator_bound >= 1,
        "denominator bound must be at least 1"
    );
    let mut pts: Vec<Vec<BigRational>> = Vec::with_capacity(cfg.samples);
    pts.push(vec![BigRational::zero(); d]);
    for i in 0..d {
        for sign in [1i64, -1] {
            let mut p = vec![BigRational::zero(); d];
            p[i] = BigRational::from_integer(sign.into());
            pts.push(p);
        }
    }
    for p in &cfg.points {
        assert_eq!(p.len(), d, "caller point dimension mismatch");
        pts.push(p.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while pts.len() < cfg.samples {
        pts.push((0..d).map(|_| random_rational(&mut rng, cfg)).collect());
    }
    pts.truncate(cfg.samples);
    pts
}

// Scans the sample stream in order. At each point the kernel of the stacked
// generator evaluations is computed exactly and each basis vector is fed to
// `fail`; the first flagged pair wins regardless of the worker count.
pub(crate) fn find_violation<F>(
    module: &Submodule,
    cfg: &SampleConfig,
    fail: F,
) -> Option<PointPair>
where
    F: Fn(&[BigRational], &[BigRational]) -> bool + Sync,
{
    let pts = sample_points(cfg, module.ctx().vars());
    let check = |a: &Vec<BigRational>| -> Option<PointPair> {
        for u in kernel_at_unchecked(a, module) {
            if fail(a, &u) {
                return Some(PointPair {
                    point: a.clone(),
                    vector: u,
                });
            }
        }
        None
    };
    if cfg.threads <= 1 {
        pts.iter().find_map(check)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .expect("worker pool");
        pool.install(|| pts.par_iter().find_map_first(check))
    }
}

/// Hunts for a zero-set pair that `f` fails to annihilate.
pub fn saturation_test(
    f: &ModVec,
    module: &Submodule,
    cfg: &SampleConfig,
) -> SaturationVerdict {
    assert_eq!(f.rank(), module.rank(), "rank mismatch");
    assert!(f.ctx() == module.ctx(), "context mismatch");
    match find_violation(module, cfg, |a, u| !f.pair_at(a, u).is_zero()) {
        Some(pp) => SaturationVerdict::Counterexample(pp),
        None => SaturationVerdict::Consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, Context, MonomialOrder, Poly};
    use std::sync::Arc;

    fn ctx2() -> Arc<Context> {
        Context::new(2, MonomialOrder::GrevLex)
    }

    fn v(ctx: &Arc<Context>, entries: &[&str]) -> ModVec {
        ModVec::new(
            entries
                .iter()
                .map(|s| Poly::parse(ctx, s).unwrap())
                .collect(),
        )
    }

    fn plane_module(ctx: &Arc<Context>) -> Submodule {
        Submodule::new(
            ctx,
            2,
            vec![v(ctx, &["x1", "x1 + x2"]), v(ctx, &["-x1", "x1 - x2"])],
        )
    }

    fn qpt(coords: &[(i64, i64)]) -> Vec<BigRational> {
        coords.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn zero_set_membership_examples() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        let on = PointPair {
            point: qpt(&[(0, 1), (3, 1)]),
            vector: qpt(&[(1, 1), (0, 1)]),
        };
        assert!(in_zero_set(&on, &n).unwrap());

        let zero_vec = PointPair {
            point: qpt(&[(7, 2), (-4, 3)]),
            vector: qpt(&[(0, 1), (0, 1)]),
        };
        assert!(in_zero_set(&zero_vec, &n).unwrap());

        let off = PointPair {
            point: qpt(&[(1, 1), (0, 1)]),
            vector: qpt(&[(1, 1), (0, 1)]),
        };
        assert!(!in_zero_set(&off, &n).unwrap());

        let short_point = PointPair {
            point: qpt(&[(0, 1)]),
            vector: qpt(&[(1, 1), (0, 1)]),
        };
        assert!(matches!(
            in_zero_set(&short_point, &n),
            Err(Error::Malformed(_))
        ));

        let short_vector = PointPair {
            point: qpt(&[(0, 1), (0, 1)]),
            vector: qpt(&[(1, 1)]),
        };
        assert_eq!(
            in_zero_set(&short_vector, &n),
            Err(Error::RankMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn kernel_bases_at_fixed_points() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        assert_eq!(
            kernel_at(&qpt(&[(0, 1), (3, 1)]), &n).unwrap(),
            vec![qpt(&[(1, 1), (0, 1)])]
        );
        assert!(kernel_at(&qpt(&[(1, 1), (2, 1)]), &n).unwrap().is_empty());
        assert_eq!(
            kernel_at(&qpt(&[(0, 1), (0, 1)]), &n).unwrap(),
            vec![qpt(&[(1, 1), (0, 1)]), qpt(&[(0, 1), (1, 1)])]
        );
    }

    #[test]
    fn kernel_vectors_lie_in_the_zero_set() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        let cfg = SampleConfig {
            samples: 60,
            ..Default::default()
        };
        for a in sample_points(&cfg, 2) {
            for u in kernel_at(&a, &n).unwrap() {
                let pp = PointPair {
                    point: a.clone(),
                    vector: u,
                };
                assert!(in_zero_set(&pp, &n).unwrap());
            }
        }
    }

    #[test]
    fn sample_stream_starts_structured_and_is_seeded() {
        let cfg = SampleConfig {
            samples: 40,
            points: vec![qpt(&[(5, 1), (5, 1)])],
            ..Default::default()
        };
        let pts = sample_points(&cfg, 2);
        assert_eq!(pts.len(), 40);
        assert_eq!(pts[0], qpt(&[(0, 1), (0, 1)]));
        assert_eq!(pts[1], qpt(&[(1, 1), (0, 1)]));
        assert_eq!(pts[2], qpt(&[(-1, 1), (0, 1)]));
        assert_eq!(pts[3], qpt(&[(0, 1), (1, 1)]));
        assert_eq!(pts[4], qpt(&[(0, 1), (-1, 1)]));
        assert_eq!(pts[5], qpt(&[(5, 1), (5, 1)]));
        assert_eq!(pts, sample_points(&cfg, 2));

        let reseeded = SampleConfig {
            seed: 1,
            ..cfg.clone()
        };
        assert_ne!(pts, sample_points(&reseeded, 2));

        for p in &pts {
            for c in p {
                assert!(*c >= cfg.coord_min && *c <= cfg.coord_max);
                assert!(c.denom().to_i64().unwrap() <= cfg.denominator_bound as i64);
            }
        }
    }

    #[test]
    fn narrow_boxes_fall_back_to_the_finest_grid() {
        let cfg = SampleConfig {
            samples: 30,
            coord_min: rat(1, 3),
            coord_max: rat(1, 2),
            denominator_bound: 4,
            ..Default::default()
        };
        let pts = sample_points(&cfg, 2);
        // Structured points ignore the box; the random tail must respect it.
        for p in &pts[5..] {
            for c in p {
                assert!(*c >= cfg.coord_min && *c <= cfg.coord_max);
            }
        }
    }

    #[test]
    fn saturation_accepts_saturated_elements() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        let cfg = SampleConfig {
            samples: 1000,
            ..Default::default()
        };
        let f = v(&ctx, &["x1", "0"]);
        assert_eq!(saturation_test(&f, &n, &cfg), SaturationVerdict::Consistent);

        let g1 = v(&ctx, &["x1", "x1 + x2"]);
        let g2 = v(&ctx, &["-x1", "x1 - x2"]);
        let combo = &g1.scale(&Poly::parse(&ctx, "x2 + 3").unwrap())
            - &g2.scale(&Poly::parse(&ctx, "x1^2 - 2").unwrap());
        assert_eq!(
            saturation_test(&combo, &n, &cfg),
            SaturationVerdict::Consistent
        );
    }

    #[test]
    fn saturation_counterexample_is_deterministic() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        let f = v(&ctx, &["0", "1"]);
        let expected = SaturationVerdict::Counterexample(PointPair {
            point: qpt(&[(0, 1), (0, 1)]),
            vector: qpt(&[(0, 1), (1, 1)]),
        });
        let cfg = SampleConfig::default();
        assert_eq!(saturation_test(&f, &n, &cfg), expected);
        assert_eq!(saturation_test(&f, &n, &cfg), expected);
        let parallel = SampleConfig {
            threads: 4,
            ..Default::default()
        };
        assert_eq!(saturation_test(&f, &n, &parallel), expected);
    }

    #[test]
    fn acceptance_is_linear_over_a_fixed_sample_set() {
        let ctx = ctx2();
        let n = plane_module(&ctx);
        let cfg = SampleConfig {
            samples: 300,
            ..Default::default()
        };
        // Both pieces annihilate every sampled pair, so any polynomial
        // combination must as well.
        let f1 = v(&ctx, &["x1", "0"]);
        let f2 = v(&ctx, &["x1", "x1 + x2"]);
        assert_eq!(
            saturation_test(&f1, &n, &cfg),
            SaturationVerdict::Consistent
        );
        assert_eq!(
            saturation_test(&f2, &n, &cfg),
            SaturationVerdict::Consistent
        );
        for (p, q) in [("x2", "1"), ("x1^3 - 5", "x1*x2"), ("-7/3", "x2^2 + x1")] {
            let combo = &f1.scale(&Poly::parse(&ctx, p).unwrap())
                + &f2.scale(&Poly::parse(&ctx, q).unwrap());
            assert_eq!(
                saturation_test(&combo, &n, &cfg),
                SaturationVerdict::Consistent
            );
        }
    }
}
