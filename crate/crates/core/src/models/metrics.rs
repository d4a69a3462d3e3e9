use crate::error::{Error, Result};
use crate::graph::check_len;

pub const MAX_PERMUTATION_CLASSES: usize = 8;

/// Fraction of agreeing labels, optionally maximized over relabelings of
/// `pred`.
pub fn aligned_accuracy(pred: &[usize], truth: &[usize], permutation_invariant: bool) -> Result<f64> {
    check_len("predictions", truth.len(), pred.len())?;
    if truth.is_empty() {
        return Ok(0.0);
    }
    let n = truth.len() as f64;
    if !permutation_invariant {
        return Ok(pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / n);
    }
    let k = pred.iter().chain(truth).max().map_or(0, |m| m + 1);
    if k > MAX_PERMUTATION_CLASSES {
        return Err(Error::TooManyClasses { k, max: MAX_PERMUTATION_CLASSES });
    }
    let mut confusion = vec![vec![0u64; k]; k];
    for (&p, &t) in pred.iter().zip(truth) {
        confusion[p][t] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |perm| {
        best = best.max(perm.iter().enumerate().map(|(p, &t)| confusion[p][t]).sum());
    });
    Ok(best as f64 / n)
}

fn permute(v: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == v.len() {
        visit(v);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permute(v, start + 1, visit);
        v.swap(start, i);
    }
}
