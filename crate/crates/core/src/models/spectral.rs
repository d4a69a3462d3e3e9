use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::rng::RngStream;

const DENSE_LIMIT: usize = 300;
const MAX_ITERS: usize = 3000;

/// Cluster nodes by the leading `k` eigenvectors of `I + D^{-1/2} A D^{-1/2}`
/// (the bottom of the normalized Laplacian), row-normalized and fed to
/// k-means. Labels are defined up to permutation.
pub fn spectral_cluster(g: &Graph, k: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(domain(format!("spectral clustering needs k >= 2, got {k}")));
    }
    let n = g.node_count();
    if n < k {
        return Err(domain(format!("cannot split {n} nodes into {k} clusters")));
    }
    let mut embedding = leading_eigenvectors(g, k, rng);
    for mut row in embedding.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    Ok(kmeans(&embedding, k, 10, 300, rng))
}

fn inv_sqrt_degrees(g: &Graph) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| match g.degree(i) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect()
}

fn apply_shifted(g: &Graph, scale: &[f64], q: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = q.clone();
    for c in 0..q.ncols() {
        let col = q.column(c);
        for i in 0..q.nrows() {
            let s: f64 = g.neighbors(i).iter().map(|&j| scale[j] * col[j]).sum();
            out[(i, c)] += scale[i] * s;
        }
    }
    out
}

/// Columns: eigenvectors for the `k` largest eigenvalues of the shifted operator.
fn leading_eigenvectors(g: &Graph, k: usize, rng: &mut RngStream) -> DMatrix<f64> {
    let n = g.node_count();
    let scale = inv_sqrt_degrees(g);
    if n <= DENSE_LIMIT {
        let dense = apply_shifted(g, &scale, &DMatrix::identity(n, n));
        return top_columns(SymmetricEigen::new(dense), k, None);
    }
    let b = (k + 6).min(n);
    let start = DMatrix::from_fn(n, b, |_, _| StandardNormal.sample(&mut *rng));
    let mut q = start.qr().q();
    let mut previous: Option<Vec<f64>> = None;
    for iter in 1..=MAX_ITERS {
        q = apply_shifted(g, &scale, &q).qr().q();
        if iter % 10 == 0 || iter == MAX_ITERS {
            let ritz = q.transpose() * apply_shifted(g, &scale, &q);
            let eig = SymmetricEigen::new(ritz);
            let values = sorted_desc(eig.eigenvalues.as_slice());
            let converged = previous
                .as_ref()
                .is_some_and(|p| p.iter().zip(&values).take(k).all(|(a, b)| (a - b).abs() < 1e-10));
            previous = Some(values);
            if converged || iter == MAX_ITERS {
                return top_columns(eig, k, Some(&q));
            }
        }
    }
    unreachable!("the final iteration always returns")
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn top_columns(eig: SymmetricEigen<f64, nalgebra::Dyn>, k: usize, basis: Option<&DMatrix<f64>>) -> DMatrix<f64> {
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let vecs = match basis {
        Some(q) => q * &eig.eigenvectors,
        None => eig.eigenvectors.clone(),
    };
    DMatrix::from_fn(vecs.nrows(), k, |i, c| vecs[(i, order[c])])
}

/// Lloyd's algorithm with k-means++ seeding; the lowest-inertia restart wins.
pub fn kmeans(points: &DMatrix<f64>, k: usize, restarts: usize, max_iters: usize, rng: &mut RngStream) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let (inertia, assign) = kmeans_once(points, k, max_iters, rng);
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, assign));
        }
    }
    best.expect("at least one restart").1
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centre: &[f64]) -> f64 {
    points.row(i).iter().zip(centre).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn kmeans_once(points: &DMatrix<f64>, k: usize, max_iters: usize, rng: &mut RngStream) -> (f64, Vec<usize>) {
    let (n, dim) = points.shape();
    let row = |i: usize| -> Vec<f64> { points.row(i).iter().copied().collect() };
    let mut centres = vec![row(rng.random_range(0..n))];
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centres[0])).collect();
    while centres.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centres.push(row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, centres.last().expect("just pushed")));
        }
    }

    let mut assign = vec![usize::MAX; n];
    for _ in 0..max_iters {
        let mut changed = false;
        for (i, a) in assign.iter_mut().enumerate() {
            let c = (0..k)
                .min_by(|&x, &y| sq_dist(points, i, &centres[x]).total_cmp(&sq_dist(points, i, &centres[y])))
                .expect("k >= 1");
            if *a != c {
                *a = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, &a) in assign.iter().enumerate() {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(points.row(i).iter()) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centres[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let inertia = assign.iter().enumerate().map(|(i, &a)| sq_dist(points, i, &centres[a])).sum();
    (inertia, assign)
}
