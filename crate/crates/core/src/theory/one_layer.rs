use serde::Serialize;

use super::special::{binomial_pmf_vec, erf};
use crate::error::{domain, Result};

/// A node with `n_in` same-class and `n_out` other-class neighbours, under
/// the one-layer model `sign(A X W)` with diametric means `±μ·m` and unit
/// feature noise. `cos_theta` is the cosine of the angle between `W` and `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneLayerQuery {
    pub mu: f64,
    pub cos_theta: f64,
    pub n_in: u64,
    pub n_out: u64,
}

impl OneLayerQuery {
    pub fn new(mu: f64, theta: f64, n_in: u64, n_out: u64) -> Self {
        Self::from_cos(mu, theta.cos(), n_in, n_out)
    }

    pub fn from_cos(mu: f64, cos_theta: f64, n_in: u64, n_out: u64) -> Self {
        Self {
            mu,
            cos_theta,
            n_in,
            n_out,
        }
    }
}

/// Mean of the aggregated embedding along `W` and its variance.
pub fn embedding_moments(q: &OneLayerQuery, w_norm: f64) -> Result<(f64, f64)> {
    if !(w_norm > 0.0 && w_norm.is_finite()) {
        return Err(domain(format!("|W| must be positive, got {w_norm}")));
    }
    let signal = q.n_in as f64 - q.n_out as f64;
    let mean = q.mu * signal * w_norm * q.cos_theta;
    let variance = w_norm * w_norm * (q.n_in + q.n_out) as f64;
    Ok((mean, variance))
}

/// Probability that the node is classified correctly. Isolated nodes
/// score 0.5.
pub fn conditional_accuracy(q: &OneLayerQuery) -> f64 {
    0.5 * (erf(conditional_arg(q.mu, q.cos_theta, q.n_in, q.n_out)) + 1.0)
}

fn conditional_arg(mu: f64, cos_theta: f64, n_in: u64, n_out: u64) -> f64 {
    let total = n_in + n_out;
    if total == 0 {
        return 0.0;
    }
    let signal = n_in as f64 - n_out as f64;
    mu * signal * cos_theta / (2.0 * total as f64).sqrt()
}

/// Accuracy averaged over `Binomial(N/2, p_in) × Binomial(N/2, p_out)`
/// neighbour counts.
pub fn expected_accuracy_one_layer(mu: f64, theta: f64, n_nodes: u64, p_in: f64, p_out: f64) -> Result<f64> {
    expected_accuracy_cos(mu, theta.cos(), n_nodes, p_in, p_out)
}

fn expected_accuracy_cos(mu: f64, cos_theta: f64, n_nodes: u64, p_in: f64, p_out: f64) -> Result<f64> {
    if !n_nodes.is_multiple_of(2) {
        return Err(domain(format!("N must be even, got {n_nodes}")));
    }
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("edge probability {p} outside [0, 1]")));
        }
    }
    if !mu.is_finite() {
        return Err(domain(format!("mu must be finite, got {mu}")));
    }
    let half = n_nodes / 2;
    let pin = binomial_pmf_vec(half, p_in);
    let pout = binomial_pmf_vec(half, p_out);
    // Sum the excess over 0.5, visiting (i, j) and (j, i) together: their
    // erf terms are exact negatives, so equal rates cancel exactly.
    let excess = |i: usize, j: usize| {
        0.5 * erf(conditional_arg(mu, cos_theta, i as u64, j as u64))
    };
    let mut total = 0.0;
    for i in 0..pin.len() {
        let mut row = 0.0;
        for j in i + 1..pin.len() {
            let e = excess(i, j);
            row += pin[i] * pout[j] * e - pin[j] * pout[i] * e;
        }
        total += row;
    }
    let total = 0.5 + total;
    Ok(total.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaOptimum {
    /// `0` or `π`; `None` when the two endpoints tie or the problem is
    /// degenerate.
    pub theta_star: Option<f64>,
    pub acc_at_0: f64,
    pub acc_at_pi: f64,
    /// Set when `p_in = p_out`, where the accuracy is 0.5 for every `θ`.
    pub degenerate: bool,
}

/// Compare the expected accuracy at the two critical angles `θ = 0` and
/// `θ = π` and report the better one.
pub fn optimal_theta(mu: f64, n_nodes: u64, p_in: f64, p_out: f64) -> Result<ThetaOptimum> {
    let acc_at_0 = expected_accuracy_cos(mu, 1.0, n_nodes, p_in, p_out)?;
    let acc_at_pi = expected_accuracy_cos(mu, -1.0, n_nodes, p_in, p_out)?;
    let degenerate = p_in == p_out;
    let theta_star = if degenerate || acc_at_0 == acc_at_pi {
        None
    } else if acc_at_0 > acc_at_pi {
        Some(0.0)
    } else {
        Some(std::f64::consts::PI)
    };
    Ok(ThetaOptimum {
        theta_star,
        acc_at_0,
        acc_at_pi,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::lambda_to_probs;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn moments() {
        let q = OneLayerQuery::new(1.0, 0.0, 4, 0);
        assert_eq!(embedding_moments(&q, 1.0).unwrap(), (4.0, 4.0));
        assert_eq!(embedding_moments(&OneLayerQuery::new(1.3, 0.4, 5, 5), 2.0).unwrap().0, 0.0);
        assert!(embedding_moments(&OneLayerQuery::new(1.3, FRAC_PI_2, 7, 1), 1.0).unwrap().0.abs() < 1e-15);
        assert!(embedding_moments(&q, 0.0).is_err());
    }

    #[test]
    fn conditional_values() {
        // ½(erf(√2) + 1) = Φ(2)
        let a = conditional_accuracy(&OneLayerQuery::new(1.0, 0.0, 4, 0));
        assert!((a - 0.977_249_868_051_820_8).abs() < 1e-15);
        assert_eq!(conditional_accuracy(&OneLayerQuery::new(0.0, 0.3, 9, 2)), 0.5);
        assert_eq!(conditional_accuracy(&OneLayerQuery::new(2.0, 0.3, 5, 5)), 0.5);
        assert_eq!(conditional_accuracy(&OneLayerQuery::new(2.0, 0.3, 0, 0)), 0.5);
    }

    #[test]
    fn expected_accuracy_symmetries() {
        let (p_in, p_out) = lambda_to_probs(10.0, 2.0, 1000).unwrap();
        assert_eq!(expected_accuracy_one_layer(0.0, 0.0, 1000, p_in, p_out).unwrap(), 0.5);
        assert_eq!(expected_accuracy_one_layer(1.0, 0.0, 1000, 0.01, 0.01).unwrap(), 0.5);
        assert!(expected_accuracy_one_layer(1.0, 0.0, 999, p_in, p_out).is_err());
    }

    #[test]
    fn theta_endpoints() {
        let (p_in, p_out) = lambda_to_probs(10.0, 2.0, 1000).unwrap();
        let homo = optimal_theta(1.0, 1000, p_in, p_out).unwrap();
        let hetero = optimal_theta(1.0, 1000, p_out, p_in).unwrap();
        // aligned weights win under homophily; anti-aligned under heterophily
        assert_eq!(homo.theta_star, Some(0.0));
        assert_eq!(hetero.theta_star, Some(PI));
        assert!(homo.acc_at_0 > 0.9 && homo.acc_at_pi < 0.1);
        assert!((homo.acc_at_0 - hetero.acc_at_pi).abs() < 1e-12);

        let flat = optimal_theta(0.0, 1000, p_in, p_out).unwrap();
        assert_eq!((flat.acc_at_0, flat.acc_at_pi, flat.theta_star), (0.5, 0.5, None));
        assert!(optimal_theta(1.0, 1000, 0.01, 0.01).unwrap().degenerate);
    }

    proptest! {
        #[test]
        fn monotone_in_mu(mu in 0.0f64..5.0, dmu in 0.0f64..2.0, theta in -PI..PI, n_in in 0u64..30, n_out in 0u64..30) {
            let a = conditional_accuracy(&OneLayerQuery::new(mu, theta, n_in, n_out));
            let b = conditional_accuracy(&OneLayerQuery::new(mu + dmu, theta, n_in, n_out));
            let s = (n_in as f64 - n_out as f64) * theta.cos();
            if s > 0.0 {
                prop_assert!(b >= a);
            } else if s < 0.0 {
                prop_assert!(b <= a);
            } else {
                prop_assert!((a - 0.5).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
            }
            let mirrored = conditional_accuracy(&OneLayerQuery::new(mu, -theta, n_in, n_out));
            prop_assert_eq!(a, mirrored);
        }

        #[test]
        fn expected_in_unit_interval(mu in 0.0f64..3.0, theta in 0.0..PI, p_in in 0.0f64..0.05, p_out in 0.0f64..0.05) {
            let a = expected_accuracy_one_layer(mu, theta, 200, p_in, p_out).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
