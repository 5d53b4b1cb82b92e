//! Floating-point feasibility step for the square search: alternating
//! projections between the affine constraint subspace and the positive
//! semidefinite cone. Everything here is provisional; the caller rounds the
//! result and re-checks it exactly.

// A q-vector lists the upper triangle of a dim x dim symmetric matrix row
// by row, matching the unknown enumeration of the exact system.

pub(crate) fn alternating_projection(
    a: &[Vec<f64>],
    b: &[f64],
    dim: usize,
    iters: usize,
    tol: f64,
) -> Vec<f64> {
    let nvars = dim * (dim + 1) / 2;
    let zero = vec![0.0; nvars];
    if a.is_empty() {
        return project_psd(&zero, dim);
    }
    let chol = cholesky_aat(a);
    let mut x = project_affine(&zero, a, b, &chol);
    for _ in 0..iters {
        let y = project_psd(&x, dim);
        let x_next = project_affine(&y, a, b, &chol);
        if max_abs_diff(&y, &x_next) < tol {
            return y;
        }
        x = x_next;
    }
    project_psd(&x, dim)
}

fn max_abs_diff(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

// Lower Cholesky factor of A A^T, with a small ridge since the caller only
// guarantees exact rank over the rationals.
fn cholesky_aat(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = a.len();
    let mut g = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let dot: f64 = a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum();
            g[i][j] = dot;
            g[j][i] = dot;
        }
        g[i][i] += 1e-12;
    }
    let mut l = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                l[i][i] = s.max(1e-300).sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    l
}

fn solve_cholesky(l: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let m = rhs.len();
    let mut y = vec![0.0; m];
    for i in 0..m {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut z = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = y[i];
        for k in (i + 1)..m {
            s -= l[k][i] * z[k];
        }
        z[i] = s / l[i][i];
    }
    z
}

fn project_affine(x: &[f64], a: &[Vec<f64>], b: &[f64], chol: &[Vec<f64>]) -> Vec<f64> {
    let m = a.len();
    let mut resid = vec![0.0; m];
    for i in 0..m {
        let ax: f64 = a[i].iter().zip(x).map(|(c, v)| c * v).sum();
        resid[i] = ax - b[i];
    }
    let z = solve_cholesky(chol, &resid);
    let mut out = x.to_vec();
    for i in 0..m {
        for (o, c) in out.iter_mut().zip(&a[i]) {
            *o -= z[i] * c;
        }
    }
    out
}

fn project_psd(q: &[f64], dim: usize) -> Vec<f64> {
    let mut s = vec![vec![0.0; dim]; dim];
    let mut idx = 0;
    for i in 0..dim {
        for j in i..dim {
            s[i][j] = q[idx];
            s[j][i] = q[idx];
            idx += 1;
        }
    }
    let (vals, vecs) = jacobi_eigen(s, dim);
    let mut rebuilt = vec![vec![0.0; dim]; dim];
    for k in 0..dim {
        let lam = vals[k].max(0.0);
        if lam == 0.0 {
            continue;
        }
        for i in 0..dim {
            for j in 0..dim {
                rebuilt[i][j] += lam * vecs[i][k] * vecs[j][k];
            }
        }
    }
    let mut out = Vec::with_capacity(q.len());
    for i in 0..dim {
        for j in i..dim {
            out.push(rebuilt[i][j]);
        }
    }
    out
}

// Cyclic Jacobi sweeps; returns eigenvalues and the orthogonal matrix with
// eigenvectors in its columns.
fn jacobi_eigen(mut s: Vec<Vec<f64>>, dim: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut v = vec![vec![0.0; dim]; dim];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..60 {
        let mut off = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                off += s[i][j] * s[i][j];
            }
        }
        if off < 1e-26 {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..dim {
                    let skp = s[k][p];
                    let skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..dim {
                    let spk = s[p][k];
                    let sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - sn * vq;
                    row[q] = sn * vp + c * vq;
                }
            }
        }
    }
    let vals = (0..dim).map(|i| s[i][i]).collect();
    (vals, v)
}
